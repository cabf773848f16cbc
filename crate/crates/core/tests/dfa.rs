use std::collections::VecDeque;

use ltlf_rl::dfa::{compile, parse_rddl_transitions, Dfa, DfaError};
use ltlf_rl::dfa::eval_propositional;
use ltlf_rl::experiment::catalog::{benchmark_task, REPORTED_DFA_STATES};
use ltlf_rl::experiment::verify::{language_mismatches, random_formula, red_green_setup};
use ltlf_rl::ltlf::{parse, AtomSet, Formula, Trace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn atoms(k: usize) -> AtomSet {
    AtomSet::new(["a", "b", "c"].into_iter().take(k)).unwrap()
}

fn random_dfa(seed: u64, k: usize) -> Option<(Formula, Dfa)> {
    let f = random_formula(&mut ChaCha8Rng::seed_from_u64(seed), 4, k);
    match compile(&f, &atoms(k)) {
        Ok(d) => Some((f, d)),
        Err(DfaError::UnsatisfiableTask) => None,
        Err(e) => panic!("{e}"),
    }
}

fn reaches(d: &Dfa, from: usize, target: impl Fn(usize) -> bool) -> bool {
    let mut seen = vec![false; d.num_states()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(q) = queue.pop_front() {
        if target(q) {
            return true;
        }
        for n in d.successors(q) {
            if !seen[n] {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    false
}

/// Length of the shortest suffix telling `p` and `q` apart, if any.
fn distinguishing_length(d: &Dfa, p: usize, q: usize) -> Option<usize> {
    let n = d.num_states();
    let mut dist = vec![usize::MAX; n * n];
    let mut queue = VecDeque::from([(p, q)]);
    dist[p * n + q] = 0;
    while let Some((a, b)) = queue.pop_front() {
        if d.is_accepting(a) != d.is_accepting(b) {
            return Some(dist[a * n + b]);
        }
        for v in d.atoms().valuations() {
            let (x, y) = (d.step(a, v), d.step(b, v));
            if dist[x * n + y] == usize::MAX {
                dist[x * n + y] = dist[a * n + b] + 1;
                queue.push_back((x, y));
            }
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn language_matches_semantics(seed in any::<u64>(), k in 1usize..=3) {
        let f = random_formula(&mut ChaCha8Rng::seed_from_u64(seed), 4, k);
        let (bad, n) = language_mismatches(&f, &atoms(k), if k <= 2 { 6 } else { 4 }).unwrap();
        prop_assert!(n > 0);
        prop_assert_eq!(bad, 0);
    }

    #[test]
    fn exactly_one_edge_enabled(seed in any::<u64>(), k in 1usize..=3) {
        if let Some((_, d)) = random_dfa(seed, k) {
            for q in 0..d.num_states() {
                for v in d.atoms().valuations() {
                    let enabled: Vec<_> = d.edges().iter().filter(|e| e.from == q && e.guard.satisfied_by(v)).collect();
                    prop_assert_eq!(enabled.len(), 1);
                    prop_assert_eq!(enabled[0].to, d.step(q, v));
                }
            }
        }
    }

    #[test]
    fn error_states_are_exactly_the_dead_ones(seed in any::<u64>(), k in 1usize..=3) {
        if let Some((_, d)) = random_dfa(seed, k) {
            for q in 0..d.num_states() {
                let live = reaches(&d, q, |x| d.is_accepting(x));
                prop_assert_eq!(d.is_error(q), !live);
                prop_assert!(!(d.is_error(q) && d.is_accepting(q)));
            }
            for q in 0..d.num_states() {
                prop_assert!(reaches(&d, d.initial(), |x| x == q));
            }
        }
    }

    #[test]
    fn states_are_pairwise_distinguishable(seed in any::<u64>(), k in 1usize..=3) {
        if let Some((_, d)) = random_dfa(seed, k) {
            for p in 0..d.num_states() {
                for q in p + 1..d.num_states() {
                    let w = distinguishing_length(&d, p, q);
                    prop_assert!(w.is_some_and(|l| l <= d.num_states()), "q{} and q{} equivalent", p + 1, q + 1);
                }
            }
        }
    }

    #[test]
    fn rddl_transitions_round_trip(seed in any::<u64>(), k in 1usize..=3) {
        if let Some((_, d)) = random_dfa(seed, k) {
            let rows = parse_rddl_transitions(&d.to_rddl(1.0), d.atoms()).unwrap();
            prop_assert_eq!(rows.len(), d.edges().len());
            for ((from, g, to), e) in rows.iter().zip(d.edges()) {
                prop_assert_eq!((*from, *to), (e.from, e.to));
                for v in d.atoms().valuations() {
                    prop_assert_eq!(eval_propositional(g, v), e.guard.satisfied_by(v));
                }
            }
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), k in 1usize..=3) {
        if let Some((_, d)) = random_dfa(seed, k) {
            let text = serde_json::to_string(&d.to_json()).unwrap();
            let back = Dfa::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            prop_assert_eq!(back.table(), d.table());
            prop_assert_eq!(back.accepting_mask(), d.accepting_mask());
            prop_assert_eq!(back.error_states(), d.error_states());
        }
    }

    #[test]
    fn entering_an_error_state_rejects(seed in any::<u64>(), k in 1usize..=2, suffix in proptest::collection::vec(0u32..4, 1..6)) {
        if let Some((_, d)) = random_dfa(seed, k) {
            let letters: Vec<_> = suffix.iter().map(|&b| ltlf_rl::ltlf::TraceState(b % (1 << k))).collect();
            let mut q = d.initial();
            for (i, &s) in letters.iter().enumerate() {
                q = d.step(q, s);
                if d.is_error(q) {
                    for m in i + 1..=letters.len() {
                        prop_assert!(!d.accepts(&Trace::new(letters[..m].to_vec()).unwrap()));
                    }
                    break;
                }
            }
        }
    }
}

#[test]
fn red_green_automaton() {
    let (d, _) = red_green_setup();
    assert_eq!(d.num_states(), 4);
    assert_eq!(d.accepting_states(), vec![3]);
    assert_eq!(d.error_states(), vec![1]);
    let a = d.atoms();
    let r = a.state(["r"]).unwrap();
    let g = a.state(["g"]).unwrap();
    assert_eq!(d.step(0, r), 2);
    assert_eq!(d.step(2, g), 3);
    assert_eq!(d.step(0, g), 1);
    for v in a.valuations() {
        assert_eq!(d.step(3, v), 3);
        assert_eq!(d.step(1, v), 1);
    }
    assert!(d.accepts(&Trace::new(vec![r, g]).unwrap()));
    assert!(!d.accepts(&Trace::new(vec![g]).unwrap()));
}

#[test]
fn red_green_rddl_matches_golden_file() {
    let (d, _) = red_green_setup();
    let text = d.to_rddl(100.0);
    assert_eq!(text, include_str!("golden/red_green.rddl"));
    assert!(text.contains("reward = 100*(fQ == @q4);"));
    assert_eq!(text.matches("then @q").count(), 8);
    assert!(text.contains("termination {fQ == @q2; fQ == @q4;};"));
}

#[test]
fn red_green_dot_lists_every_edge() {
    let (d, _) = red_green_setup();
    let dot = d.to_dot();
    assert_eq!(dot.matches("[label=").count(), d.edges().len());
    assert!(dot.contains("q4 [shape=doublecircle]"));
    assert!(!dot.contains("label=\"\""));
    assert_eq!(dot, d.to_dot());
}

#[test]
fn eventually_has_two_states() {
    let a = AtomSet::new(["g"]).unwrap();
    let d = compile(&parse("F g", &a).unwrap(), &a).unwrap();
    assert_eq!(d.num_states(), 2);
    let g = a.state(["g"]).unwrap();
    let none = ltlf_rl::ltlf::TraceState::EMPTY;
    assert_eq!(d.step(d.initial(), none), d.initial());
    let acc = d.step(d.initial(), g);
    assert!(d.is_accepting(acc));
    assert_eq!((d.step(acc, none), d.step(acc, g)), (acc, acc));
}

#[test]
fn contradiction_is_rejected() {
    let a = AtomSet::new(["g"]).unwrap();
    assert_eq!(compile(&parse("g & !g", &a).unwrap(), &a), Err(DfaError::UnsatisfiableTask));
}

#[test]
fn benchmark_automaton_sizes() {
    for n in 1..=6 {
        let (text, names) = benchmark_task(n).unwrap();
        let a = AtomSet::new(names).unwrap();
        let d = compile(&parse(&text, &a).unwrap(), &a).unwrap();
        assert_eq!(d.num_states(), REPORTED_DFA_STATES[n - 1], "task {n}");
        assert_eq!(d.accepting_states().len(), 1);
    }
}

#[test]
fn compilation_is_deterministic() {
    let (text, names) = benchmark_task(3).unwrap();
    let a = AtomSet::new(names).unwrap();
    let f = parse(&text, &a).unwrap();
    let (x, y) = (compile(&f, &a).unwrap(), compile(&f, &a).unwrap());
    assert_eq!(x, y);
    assert_eq!(x.to_rddl(100.0), y.to_rddl(100.0));
}
