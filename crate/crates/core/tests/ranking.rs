use ltlf_rl::dfa::{compile, Dfa, DfaError};
use ltlf_rl::experiment::verify::{random_formula, red_green_setup};
use ltlf_rl::ltlf::AtomSet;
use ltlf_rl::ranking::{expected_length, rank_states, simple_path_lengths};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_dfa(seed: u64, k: usize) -> Option<Dfa> {
    let atoms = AtomSet::new(["a", "b", "c"].into_iter().take(k)).unwrap();
    match compile(&random_formula(&mut ChaCha8Rng::seed_from_u64(seed), 4, k), &atoms) {
        Ok(d) => (d.num_states() >= 3).then_some(d),
        Err(DfaError::UnsatisfiableTask) => None,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn red_green_ranks_priorities_and_potentials() {
    let (d, t) = red_green_setup();
    assert_eq!(simple_path_lengths(&d, 0).unwrap(), vec![2]);
    assert_eq!(simple_path_lengths(&d, 2).unwrap(), vec![1]);
    assert_eq!(expected_length(&d, 0).unwrap(), 2.0);
    assert_eq!(expected_length(&d, 2).unwrap(), 1.0);
    // q1, q2, q3, q4
    assert_eq!(t.rank, vec![0, 2, 1, 3]);
    assert_eq!(t.priority, vec![0.25, 1.0 / 3.0, 0.5, 1.0]);
    assert_eq!(t.potential, vec![0.25, 0.25, 1.0 / 3.0, 1.0]);
    assert!((t.shaping(0, 2, 0.99) - 0.080_000_000_000_000_02).abs() < 1e-12);
    assert_eq!(t.shaping(0, 0, 1.0), 0.0);
}

#[test]
fn off_by_one_ranking_is_detectable() {
    let (d, _) = red_green_setup();
    let t = rank_states(&d, 3, 1.0).unwrap();
    assert_ne!(t.rank, vec![0, 2, 1, 3]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn table_invariants(seed in any::<u64>(), k in 1usize..=3, extra in 0usize..4, c in 0.1f64..10.0) {
        let Some(d) = random_dfa(seed, k) else { return Ok(()) };
        let n = (3 + extra).min(d.num_states());
        let t = rank_states(&d, n, c).unwrap();
        for q in 0..d.num_states() {
            let r = t.rank[q];
            if d.is_accepting(q) {
                prop_assert_eq!(r, n - 1);
            } else if d.is_error(q) {
                prop_assert_eq!(r, n - 2);
                prop_assert!((t.potential[q] - c / n as f64).abs() < 1e-12);
            } else {
                prop_assert!(r <= n - 3);
                prop_assert_eq!(t.potential[q], t.priority[r]);
            }
        }
        for i in 0..n {
            prop_assert!((t.priority[i] - c / (n - i) as f64).abs() < 1e-12);
            if i + 1 < n {
                prop_assert!(t.priority[i] < t.priority[i + 1]);
            }
        }
        prop_assert!((t.priority[0] - c / n as f64).abs() < 1e-12);
        prop_assert!(t.potential.iter().all(|&p| p >= t.priority[0]));

        let inter: Vec<usize> = (0..d.num_states()).filter(|&q| !d.is_terminal(q)).collect();
        for &p in &inter {
            for &q in &inter {
                let (lp, lq) = (t.path_length[p].unwrap(), t.path_length[q].unwrap());
                if lp < lq {
                    prop_assert!(t.rank[p] >= t.rank[q]);
                }
            }
        }
        let ls: Vec<f64> = inter.iter().map(|&q| t.path_length[q].unwrap()).collect();
        if let (Some(lo), Some(hi)) = (ls.iter().cloned().reduce(f64::min), ls.iter().cloned().reduce(f64::max)) {
            for &q in &inter {
                let l = t.path_length[q].unwrap();
                if l == lo {
                    prop_assert_eq!(t.rank[q], n - 3);
                }
                if l == hi && hi > lo {
                    prop_assert_eq!(t.rank[q], 0);
                }
            }
        }
        prop_assert_eq!(rank_states(&d, n, c).unwrap(), t);
    }
}
