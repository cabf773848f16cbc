//! One-step formula progression over core-form formulas, plus the
//! syntactic simplifier that keeps residuals in a canonical shape.

use super::{Formula, TraceState};

/// `!f`, folding constants and double negation.
pub fn mk_not(f: Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(g) => *g,
        g => Formula::not(g),
    }
}

fn is_complement(a: &Formula, b: &Formula) -> bool {
    matches!(a, Formula::Not(x) if **x == *b) || matches!(b, Formula::Not(x) if **x == *a)
}

/// n-ary conjunction (`conj = true`) or disjunction in canonical form:
/// flattened, constant-folded, sorted, deduplicated, with complementary
/// pairs and absorbed children removed.
fn mk_junction(items: Vec<Formula>, conj: bool) -> Formula {
    let (unit, zero) = if conj {
        (Formula::True, Formula::False)
    } else {
        (Formula::False, Formula::True)
    };
    let mut flat = Vec::with_capacity(items.len());
    let mut stack = items;
    while let Some(f) = stack.pop() {
        match f {
            Formula::And(gs) if conj => stack.extend(gs),
            Formula::Or(gs) if !conj => stack.extend(gs),
            g if g == unit => {}
            g if g == zero => return zero,
            g => flat.push(g),
        }
    }
    flat.sort();
    flat.dedup();
    for i in 0..flat.len() {
        for j in i + 1..flat.len() {
            if is_complement(&flat[i], &flat[j]) {
                return zero;
            }
        }
    }
    // absorption: a & (a | b) = a, a | (a & b) = a
    let absorbed: Vec<bool> = flat
        .iter()
        .map(|f| {
            let inner = match (f, conj) {
                (Formula::Or(gs), true) | (Formula::And(gs), false) => gs,
                _ => return false,
            };
            inner.iter().any(|g| flat.contains(g))
        })
        .collect();
    let mut kept: Vec<Formula> = flat
        .into_iter()
        .zip(absorbed)
        .filter_map(|(f, a)| (!a).then_some(f))
        .collect();
    match kept.len() {
        0 => unit,
        1 => kept.pop().unwrap(),
        _ if conj => Formula::And(kept),
        _ => Formula::Or(kept),
    }
}

pub fn mk_and(items: Vec<Formula>) -> Formula {
    mk_junction(items, true)
}

pub fn mk_or(items: Vec<Formula>) -> Formula {
    mk_junction(items, false)
}

/// Rebuilds a core-form formula bottom-up through the smart constructors.
pub fn normalize(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Last | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => mk_not(normalize(g)),
        Formula::Next(g) => Formula::next(normalize(g)),
        Formula::Until(a, b) => {
            let (a, b) = (normalize(a), normalize(b));
            match (&a, &b) {
                // a U true, a U false, false U b
                (_, Formula::True) => Formula::True,
                (_, Formula::False) => Formula::False,
                (Formula::False, _) => b,
                _ => Formula::until(a, b),
            }
        }
        Formula::And(gs) => mk_and(gs.iter().map(normalize).collect()),
        Formula::Or(gs) => mk_or(gs.iter().map(normalize).collect()),
        other => panic!("normalize expects core form, got {other:?}"),
    }
}

type Clauses = Vec<Vec<Formula>>;

fn dnf_clauses(f: &Formula, negated: bool, cap: usize) -> Option<Clauses> {
    let product = |parts: Vec<Clauses>| -> Option<Clauses> {
        let mut acc: Clauses = vec![Vec::new()];
        for p in parts {
            let mut next = Vec::with_capacity(acc.len() * p.len());
            for a in &acc {
                for b in &p {
                    next.push(a.iter().chain(b).cloned().collect());
                }
            }
            if next.len() > cap {
                return None;
            }
            acc = next;
        }
        Some(acc)
    };
    let union = |parts: Vec<Clauses>| -> Option<Clauses> {
        let all: Clauses = parts.into_iter().flatten().collect();
        (all.len() <= cap).then_some(all)
    };
    let children = |gs: &[Formula]| -> Option<Vec<Clauses>> { gs.iter().map(|g| dnf_clauses(g, negated, cap)).collect() };
    match (f, negated) {
        (Formula::True, false) | (Formula::False, true) => Some(vec![Vec::new()]),
        (Formula::False, false) | (Formula::True, true) => Some(Vec::new()),
        (Formula::Not(g), _) => dnf_clauses(g, !negated, cap),
        (Formula::And(gs), false) | (Formula::Or(gs), true) => product(children(gs)?),
        (Formula::Or(gs), false) | (Formula::And(gs), true) => union(children(gs)?),
        (lit, false) => Some(vec![vec![lit.clone()]]),
        (lit, true) => Some(vec![vec![mk_not(lit.clone())]]),
    }
}

/// Disjunctive normal form over temporal literals, with contradictory
/// clauses dropped and subsumed clauses absorbed; `None` past `cap`
/// clauses. Two residuals that differ only in boolean structure map to the
/// same formula, which keeps the progression closure finite.
pub fn to_dnf(f: &Formula, cap: usize) -> Option<Formula> {
    let mut clauses: Clauses = dnf_clauses(f, false, cap)?
        .into_iter()
        .filter_map(|mut c| {
            c.sort();
            c.dedup();
            let contradictory = c.iter().enumerate().any(|(i, a)| c[i + 1..].iter().any(|b| is_complement(a, b)));
            (!contradictory).then_some(c)
        })
        .collect();
    clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    clauses.dedup();
    let mut kept: Clauses = Vec::new();
    for c in clauses {
        if !kept.iter().any(|k| k.iter().all(|l| c.contains(l))) {
            kept.push(c);
        }
    }
    kept.sort();
    Some(mk_or(kept.into_iter().map(mk_and).collect()))
}

/// Residual obligation on a non-empty continuation after reading `s`:
/// for every non-empty `rest`, `s·rest ⊨ f` iff `rest ⊨ progress(f, s)`.
///
/// `f` must be in core form.
pub fn progress(f: &Formula, s: TraceState) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        // a continuation exists, so s was not the final state
        Formula::Last => Formula::False,
        Formula::Atom(p) => {
            if s.holds(*p) {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Not(g) => mk_not(progress(g, s)),
        Formula::And(gs) => mk_and(gs.iter().map(|g| progress(g, s)).collect()),
        Formula::Or(gs) => mk_or(gs.iter().map(|g| progress(g, s)).collect()),
        Formula::Next(g) => normalize(g),
        Formula::Until(a, b) => mk_or(vec![
            progress(b, s),
            mk_and(vec![progress(a, s), normalize(f)]),
        ]),
        other => panic!("progress expects core form, got {other:?}"),
    }
}

/// Whether the trace that ends at `s` satisfies `f`, i.e. `[s] ⊨ f`.
pub fn accepts_empty_continuation(f: &Formula, s: TraceState) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Last => true,
        Formula::Atom(p) => s.holds(*p),
        Formula::Not(g) => !accepts_empty_continuation(g, s),
        Formula::And(gs) => gs.iter().all(|g| accepts_empty_continuation(g, s)),
        Formula::Or(gs) => gs.iter().any(|g| accepts_empty_continuation(g, s)),
        Formula::Next(_) => false,
        Formula::Until(_, b) => accepts_empty_continuation(b, s),
        other => panic!("accepts_empty_continuation expects core form, got {other:?}"),
    }
}
