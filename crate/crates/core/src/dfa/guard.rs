//! Two-level guard synthesis (Quine-McCluskey prime implicants with a
//! greedy cover) from an explicit set of valuations.

use std::collections::BTreeSet;

use crate::ltlf::{Formula, TraceState};

/// Cube over the atoms: bits in `mask` are don't-care.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cube {
    bits: u32,
    mask: u32,
}

impl Cube {
    fn covers(self, v: u32) -> bool {
        (v & !self.mask) == self.bits
    }

    fn literals(self, n_atoms: usize) -> usize {
        n_atoms - self.mask.count_ones() as usize
    }
}

fn prime_implicants(minterms: &[u32]) -> Vec<Cube> {
    let mut current: BTreeSet<Cube> = minterms.iter().map(|&bits| Cube { bits, mask: 0 }).collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        let items: Vec<Cube> = current.iter().copied().collect();
        let mut used = vec![false; items.len()];
        let mut next = BTreeSet::new();
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let (a, b) = (items[i], items[j]);
                if a.mask != b.mask {
                    continue;
                }
                let diff = a.bits ^ b.bits;
                if diff.count_ones() == 1 && diff & a.mask == 0 {
                    next.insert(Cube {
                        bits: a.bits & !diff,
                        mask: a.mask | diff,
                    });
                    used[i] = true;
                    used[j] = true;
                }
            }
        }
        for (c, u) in items.into_iter().zip(used) {
            if !u {
                primes.insert(c);
            }
        }
        current = next;
    }
    primes.into_iter().collect()
}

fn cover(n_atoms: usize, minterms: &[u32], primes: &[Cube]) -> Vec<Cube> {
    let mut uncovered: BTreeSet<u32> = minterms.iter().copied().collect();
    let mut chosen: Vec<Cube> = Vec::new();
    // essential primes
    for &m in minterms {
        let covering: Vec<&Cube> = primes.iter().filter(|p| p.covers(m)).collect();
        if covering.len() == 1 && !chosen.contains(covering[0]) {
            chosen.push(*covering[0]);
        }
    }
    uncovered.retain(|&m| !chosen.iter().any(|c| c.covers(m)));
    while !uncovered.is_empty() {
        let best = primes
            .iter()
            .filter(|p| !chosen.contains(p))
            .max_by(|a, b| {
                let ca = uncovered.iter().filter(|&&m| a.covers(m)).count();
                let cb = uncovered.iter().filter(|&&m| b.covers(m)).count();
                ca.cmp(&cb)
                    .then(b.literals(n_atoms).cmp(&a.literals(n_atoms)))
                    .then(b.cmp(a))
            })
            .copied()
            .expect("primes cover every minterm");
        chosen.push(best);
        uncovered.retain(|&m| !best.covers(m));
    }
    chosen.sort_by(|a, b| {
        a.literals(n_atoms)
            .cmp(&b.literals(n_atoms))
            .then(b.mask.cmp(&a.mask))
            .then(a.bits.cmp(&b.bits))
    });
    chosen
}

fn cube_formula(n_atoms: usize, c: Cube) -> Formula {
    let mut lits: Vec<Formula> = (0..n_atoms)
        .filter(|i| c.mask >> i & 1 == 0)
        .map(|i| {
            if c.bits >> i & 1 == 1 {
                Formula::Atom(i)
            } else {
                Formula::not(Formula::Atom(i))
            }
        })
        .collect();
    match lits.len() {
        0 => Formula::True,
        1 => lits.pop().unwrap(),
        _ => Formula::And(lits),
    }
}

/// Smallest-effort sum-of-products formula true exactly on `on[v]`.
pub fn synthesize(n_atoms: usize, on: &[bool]) -> Formula {
    debug_assert_eq!(on.len(), 1 << n_atoms);
    let minterms: Vec<u32> = (0..on.len() as u32).filter(|&v| on[v as usize]).collect();
    if minterms.is_empty() {
        return Formula::False;
    }
    if minterms.len() == on.len() {
        return Formula::True;
    }
    let primes = prime_implicants(&minterms);
    let mut terms: Vec<Formula> = cover(n_atoms, &minterms, &primes)
        .into_iter()
        .map(|c| cube_formula(n_atoms, c))
        .collect();
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        Formula::Or(terms)
    }
}

/// Truth value of a propositional formula under valuation `s`.
pub fn eval_propositional(f: &Formula, s: TraceState) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(i) => s.holds(*i),
        Formula::Not(g) => !eval_propositional(g, s),
        Formula::And(gs) => gs.iter().all(|g| eval_propositional(g, s)),
        Formula::Or(gs) => gs.iter().any(|g| eval_propositional(g, s)),
        Formula::Implies(a, b) => !eval_propositional(a, s) || eval_propositional(b, s),
        Formula::Iff(a, b) => eval_propositional(a, s) == eval_propositional(b, s),
        other => panic!("temporal operator in guard: {other:?}"),
    }
}
