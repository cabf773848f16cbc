use super::{Formula, Trace};

/// Decides `trace, i ⊨ f` by direct recursion on the finite-trace
/// satisfaction clauses. Exponential in nesting depth; intended as the
/// reference oracle, not for hot paths.
///
/// Panics if `i` is past the end of the trace.
pub fn evaluate(trace: &Trace, i: usize, f: &Formula) -> bool {
    let n = trace.last_index();
    assert!(i <= n, "position {i} outside trace of length {}", trace.len());
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Last => i == n,
        Formula::Atom(p) => trace.get(i).holds(*p),
        Formula::Not(g) => !evaluate(trace, i, g),
        Formula::And(gs) => gs.iter().all(|g| evaluate(trace, i, g)),
        Formula::Or(gs) => gs.iter().any(|g| evaluate(trace, i, g)),
        Formula::Implies(a, b) => !evaluate(trace, i, a) || evaluate(trace, i, b),
        Formula::Iff(a, b) => evaluate(trace, i, a) == evaluate(trace, i, b),
        Formula::Next(g) => i < n && evaluate(trace, i + 1, g),
        Formula::WeakNext(g) => i == n || evaluate(trace, i + 1, g),
        Formula::Until(a, b) => {
            (i..=n).any(|j| evaluate(trace, j, b) && (i..j).all(|k| evaluate(trace, k, a)))
        }
        Formula::Eventually(g) => (i..=n).any(|j| evaluate(trace, j, g)),
        Formula::Always(g) => (i..=n).all(|j| evaluate(trace, j, g)),
    }
}

/// `trace ⊨ f`, i.e. satisfaction at position 0.
pub fn satisfies(trace: &Trace, f: &Formula) -> bool {
    evaluate(trace, 0, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::{parse, AtomSet, TraceState};

    #[test]
    fn clauses() {
        let a = AtomSet::new(["g", "r"]).unwrap();
        let empty = Trace::single(TraceState::EMPTY);
        assert!(evaluate(&empty, 0, &parse("!r", &a).unwrap()));

        let r_then_g = Trace::new(vec![a.state(["r"]).unwrap(), a.state(["g"]).unwrap()]).unwrap();
        let example1 = parse("(!r & !g) U ((r & !g) & X ((!r & !g) U g))", &a).unwrap();
        assert!(satisfies(&r_then_g, &example1));

        let just_r = Trace::single(a.state(["r"]).unwrap());
        assert!(!evaluate(&just_r, 0, &parse("X g", &a).unwrap()));
        assert!(evaluate(&just_r, 0, &parse("N g", &a).unwrap()));
        assert!(evaluate(&just_r, 0, &parse("last", &a).unwrap()));
        assert!(!evaluate(&r_then_g, 0, &parse("last", &a).unwrap()));
    }
}
