use ltlf_rl::experiment::verify::random_formula;
use ltlf_rl::ltlf::{
    accepts_empty_continuation, all_traces, evaluate, normalize, parse, parse_core, progress, AtomSet, Formula, Style, Trace, TraceState,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn atoms(k: usize) -> AtomSet {
    AtomSet::new(["a", "b", "c"].into_iter().take(k)).unwrap()
}

fn formula(seed: u64, k: usize) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_formula(&mut rng, 4, k)
}

fn core_formula(seed: u64, k: usize) -> Formula {
    normalize(&formula(seed, k).expand_derived())
}

fn prepend(s: TraceState, t: &Trace) -> Trace {
    let mut v = vec![s];
    v.extend_from_slice(t.states());
    Trace::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn progression_is_sound(seed in any::<u64>(), k in 1usize..=3) {
        let f = core_formula(seed, k);
        for s in atoms(k).valuations() {
            let p = progress(&f, s);
            for t in all_traces(k, 4) {
                prop_assert_eq!(evaluate(&prepend(s, &t), 0, &f), evaluate(&t, 0, &p));
            }
        }
    }

    #[test]
    fn final_state_consistency(seed in any::<u64>(), k in 1usize..=3) {
        let f = core_formula(seed, k);
        for s in atoms(k).valuations() {
            prop_assert_eq!(evaluate(&Trace::single(s), 0, &f), accepts_empty_continuation(&f, s));
        }
    }

    #[test]
    fn expansion_preserves_meaning(seed in any::<u64>(), k in 1usize..=3) {
        let f = formula(seed, k);
        let g = f.expand_derived();
        prop_assert!(g.is_core());
        let n = normalize(&g);
        for t in all_traces(k, 4) {
            prop_assert_eq!(evaluate(&t, 0, &f), evaluate(&t, 0, &g));
            prop_assert_eq!(evaluate(&t, 0, &f), evaluate(&t, 0, &n));
        }
    }

    #[test]
    fn negation_flips_at_every_position(seed in any::<u64>(), k in 1usize..=2) {
        let f = formula(seed, k);
        let nf = Formula::not(f.clone());
        for t in all_traces(k, 4) {
            for i in 0..t.len() {
                prop_assert_eq!(evaluate(&t, i, &nf), !evaluate(&t, i, &f));
            }
        }
    }

    #[test]
    fn canonical_printing_round_trips(seed in any::<u64>(), k in 1usize..=3) {
        let a = atoms(k);
        let f = formula(seed, k);
        let text = f.canonical(&a).to_string();
        prop_assert_eq!(parse(&text, &a).unwrap(), f);
    }

    #[test]
    fn compact_printing_keeps_meaning(seed in any::<u64>(), k in 1usize..=2) {
        let a = atoms(k);
        let f = formula(seed, k);
        let g = parse(&f.display(&a, Style::Ascii).to_string(), &a).unwrap();
        for t in all_traces(k, 4) {
            prop_assert_eq!(evaluate(&t, 0, &f), evaluate(&t, 0, &g));
        }
    }
}

#[test]
fn red_then_green_example() {
    let a = AtomSet::new(["g", "r"]).unwrap();
    let f = parse("(!r & !g) U ((r & !g) & X ((!r & !g) U g))", &a).unwrap();
    let r = a.state(["r"]).unwrap();
    let g = a.state(["g"]).unwrap();
    assert!(evaluate(&Trace::new(vec![r, g]).unwrap(), 0, &f));
    assert!(!evaluate(&Trace::new(vec![g]).unwrap(), 0, &f));
    assert!(!evaluate(&Trace::new(vec![r, r, g]).unwrap(), 0, &f));
    assert!(evaluate(&Trace::new(vec![TraceState::EMPTY, r, TraceState::EMPTY, g]).unwrap(), 0, &f));
}

#[test]
fn semantics_examples() {
    let a = AtomSet::new(["g", "r"]).unwrap();
    let g = a.state(["g"]).unwrap();
    let r = a.state(["r"]).unwrap();
    let p = |s: &str| parse(s, &a).unwrap();
    assert!(evaluate(&Trace::single(TraceState::EMPTY), 0, &p("!r")));
    assert!(!evaluate(&Trace::single(r), 0, &p("X g")));
    assert!(evaluate(&Trace::single(r), 0, &p("N g")));
    assert!(evaluate(&Trace::single(g), 0, &p("r U g")));
    assert!(evaluate(&Trace::single(r), 0, &p("last")));
}

#[test]
fn progression_examples() {
    let a = AtomSet::new(["g", "r"]).unwrap();
    let g = a.state(["g"]).unwrap();
    let r = a.state(["r"]).unwrap();
    let core = |s: &str| parse_core(s, &a).unwrap();
    assert_eq!(progress(&core("F g"), g), Formula::True);
    assert_eq!(progress(&core("X g"), r), core("g"));
    let waiting = core("(!r & !g) U g");
    assert_eq!(progress(&waiting, TraceState::EMPTY), waiting);
    assert!(accepts_empty_continuation(&core("last"), r));
    assert!(!accepts_empty_continuation(&core("X g"), g));
    assert!(accepts_empty_continuation(&core("r U g"), g));
}
