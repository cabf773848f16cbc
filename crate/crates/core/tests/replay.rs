use ltlf_rl::env::{Action, SimRng};
use ltlf_rl::experiment::verify::{red_green_setup, reference_probabilities};
use ltlf_rl::product::{Encoding, ProductObservation};
use ltlf_rl::replay::{
    category_probabilities, ClassifiedBuffer, Experience, PrioritizedBuffer, Replay, ReplayError, SumTree,
    UniformBuffer,
};
use proptest::prelude::*;
use rand::SeedableRng;

const RG_PRIORITIES: [f64; 4] = [0.25, 1.0 / 3.0, 0.5, 1.0];

fn exp(category: usize, tag: f64) -> Experience {
    let o = ProductObservation {
        base: vec![tag],
        base_index: None,
        q: 0,
        num_q: 4,
        encoding: Encoding::Enumerated,
    };
    Experience {
        state: o.clone(),
        action: Action::Discrete(0),
        reward: 0.0,
        next_state: o,
        terminated: false,
        category,
    }
}

fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

#[test]
fn probabilities_match_worked_examples() {
    assert_eq!(category_probabilities(&[10, 10, 10, 10], &RG_PRIORITIES, 0.0).unwrap(), vec![0.25; 4]);
    assert_eq!(
        category_probabilities(&[30, 10, 0, 10], &RG_PRIORITIES, 0.0).unwrap(),
        vec![0.6, 0.2, 0.0, 0.2]
    );
    // 100 * 0.25^0.75 etc., normalized by hand
    let w: Vec<f64> = [100.0, 50.0, 10.0, 5.0]
        .iter()
        .zip(RG_PRIORITIES)
        .map(|(n, p): (&f64, f64)| n * p.powf(0.75))
        .collect();
    let z: f64 = w.iter().sum();
    let got = category_probabilities(&[100, 50, 10, 5], &RG_PRIORITIES, 0.75).unwrap();
    for (g, wi) in got.iter().zip(&w) {
        assert!((g - wi / z).abs() < 1e-12);
    }
    assert!((got[0] - 0.518_133_7).abs() < 1e-6);
    assert!((got[3] - 0.073_275_2).abs() < 1e-6);
}

#[test]
fn all_empty_is_an_error() {
    assert_eq!(category_probabilities(&[0, 0], &[0.5, 1.0], 1.0), Err(ReplayError::AllEmpty));
    let mut b = ClassifiedBuffer::new(8, RG_PRIORITIES.to_vec(), 0.5, 1).unwrap();
    assert_eq!(b.sample(1, &mut rng(0)), Err(ReplayError::AllEmpty));
}

#[test]
fn bad_configs_are_rejected() {
    assert!(ClassifiedBuffer::new(3, RG_PRIORITIES.to_vec(), 0.5, 1).is_err());
    assert!(ClassifiedBuffer::new(8, RG_PRIORITIES.to_vec(), -1.0, 1).is_err());
    assert!(ClassifiedBuffer::new(8, RG_PRIORITIES.to_vec(), 0.5, 0).is_err());
    assert!(ClassifiedBuffer::new(8, vec![0.0, 1.0], 0.5, 1).is_err());
    assert!(PrioritizedBuffer::new(0, 0.6, 0.4).is_err());
    assert!(PrioritizedBuffer::new(8, 0.6, 1.5).is_err());
    assert!(UniformBuffer::new(0).is_err());
}

#[test]
fn red_green_transitions_land_in_their_rank_partition() {
    let (d, ranks) = red_green_setup();
    let mut b = ClassifiedBuffer::new(40, ranks.priority.clone(), 0.5, 1).unwrap();
    let err = d.error_states()[0];
    let acc = d.accepting_states()[0];
    b.push(exp(ranks.rank_of(err), 1.0)).unwrap();
    b.push(exp(ranks.rank_of(acc), 2.0)).unwrap();
    b.push(exp(ranks.rank_of(d.initial()), 3.0)).unwrap();
    assert_eq!(b.sizes(), vec![1, 0, 1, 1]);
    assert_eq!(b.partition(2)[0].state.base, vec![1.0]);
    assert_eq!(b.partition(3)[0].state.base, vec![2.0]);
    assert_eq!(
        b.push(exp(4, 0.0)),
        Err(ReplayError::BadCategory {
            category: 4,
            partitions: 4
        })
    );
    assert_eq!(b.len(), 3);
}

#[test]
fn stale_probabilities_until_next_refresh() {
    let mut b = ClassifiedBuffer::new(400, RG_PRIORITIES.to_vec(), 0.75, 5).unwrap();
    for c in 0..4 {
        b.push(exp(c, 0.0)).unwrap();
    }
    b.begin_episode(0);
    let p0 = b.probs().to_vec();
    let mut r = rng(1);
    for ep in 1..5 {
        b.begin_episode(ep);
        for i in 0..20 {
            b.push(exp(i % 2, 0.0)).unwrap();
        }
        b.sample(8, &mut r).unwrap();
        assert_eq!(b.probs(), p0.as_slice());
    }
    b.begin_episode(5);
    assert_ne!(b.probs(), p0.as_slice());
    assert_eq!(b.probs(), category_probabilities(&b.sizes(), &RG_PRIORITIES, 0.75).unwrap().as_slice());
}

#[test]
fn degenerate_distribution_samples_one_partition() {
    let mut b = ClassifiedBuffer::new(40, RG_PRIORITIES.to_vec(), 1.0, 1).unwrap();
    for i in 0..5 {
        b.push(exp(0, i as f64)).unwrap();
    }
    b.begin_episode(0);
    assert_eq!(b.probs(), &[1.0, 0.0, 0.0, 0.0]);
    for s in b.sample(500, &mut rng(2)).unwrap() {
        assert_eq!(b.get(s.handle).category, 0);
        assert_eq!(s.weight, 1.0);
    }
    assert!(b.sample(0, &mut rng(2)).unwrap().is_empty());
}

#[test]
fn two_equal_partitions_are_sampled_evenly() {
    let mut b = ClassifiedBuffer::new(40, vec![0.5, 0.5], 1.0, 1).unwrap();
    for i in 0..3 {
        b.push(exp(0, i as f64)).unwrap();
        b.push(exp(1, i as f64)).unwrap();
    }
    let n = 100_000;
    let hits = b
        .sample(n, &mut rng(3))
        .unwrap()
        .iter()
        .filter(|s| b.get(s.handle).category == 0)
        .count();
    let f = hits as f64 / n as f64;
    assert!((f - 0.5).abs() < 0.01, "{f}");
}

#[test]
fn sampled_frequencies_follow_probabilities() {
    let mut b = ClassifiedBuffer::new(400, RG_PRIORITIES.to_vec(), 0.75, 1).unwrap();
    for (c, n) in [40, 20, 5, 2].into_iter().enumerate() {
        for i in 0..n {
            b.push(exp(c, i as f64)).unwrap();
        }
    }
    b.begin_episode(0);
    let mut counts = [0usize; 4];
    let n = 100_000;
    for s in b.sample(n, &mut rng(4)).unwrap() {
        counts[b.get(s.handle).category] += 1;
    }
    for (c, p) in b.probs().iter().enumerate() {
        assert!((counts[c] as f64 / n as f64 - p).abs() < 0.01, "{counts:?} {:?}", b.probs());
    }
}

#[test]
fn prioritized_weights_and_annealing() {
    let mut b = PrioritizedBuffer::new(4, 1.0, 0.4).unwrap();
    for i in 0..4 {
        b.push(exp(0, i as f64)).unwrap();
    }
    b.update_priorities(&[0, 1, 2, 3], &[1.0, 1.0, 1.0, 5.0]);
    assert!((b.priority(3) - (5.0 + 1e-6)).abs() < 1e-12);
    let draws = b.sample(80_000, &mut rng(5)).unwrap();
    let top = draws.iter().filter(|s| s.handle == 3).count() as f64 / draws.len() as f64;
    assert!((top - 5.0 / 8.0).abs() < 0.01, "{top}");
    let wmax = draws.iter().map(|s| s.weight).fold(0.0, f64::max);
    assert!((wmax - 1.0).abs() < 1e-12);
    for s in &draws {
        assert!(s.weight > 0.0 && s.weight <= 1.0 + 1e-12);
        if s.handle == 3 {
            assert!(s.weight < 1.0);
        }
    }
    assert_eq!(b.beta(), 0.4);
    b.set_progress(0.5);
    assert!((b.beta() - 0.7).abs() < 1e-12);
    b.set_progress(2.0);
    assert_eq!(b.beta(), 1.0);
    // new items enter at the running maximum
    b.push(exp(0, 9.0)).unwrap();
    assert_eq!(b.len(), 4);
    assert_eq!(b.get(0).state.base, vec![9.0]);
    assert!((b.priority(0) - b.priority(3)).abs() < 1e-12);
}

#[test]
fn sum_tree_finds_by_prefix_mass() {
    let mut t = SumTree::new(5);
    for (i, v) in [1.0, 2.0, 0.0, 3.0, 4.0].into_iter().enumerate() {
        t.set(i, v);
    }
    assert_eq!(t.total(), 10.0);
    assert_eq!(t.find(0.5), 0);
    assert_eq!(t.find(1.5), 1);
    assert_eq!(t.find(3.5), 3);
    assert_eq!(t.find(9.9), 4);
    t.set(1, 0.0);
    assert_eq!(t.total(), 8.0);
    assert_eq!(t.find(1.5), 3);
}

#[test]
fn uniform_ring_replaces_oldest() {
    let mut b = UniformBuffer::new(3).unwrap();
    for i in 0..5 {
        b.push(exp(0, i as f64)).unwrap();
    }
    assert_eq!(b.len(), 3);
    let mut tags: Vec<f64> = (0..3).map(|h| b.get(h).state.base[0]).collect();
    tags.sort_by(f64::total_cmp);
    assert_eq!(tags, vec![2.0, 3.0, 4.0]);
    assert!(b.sample(0, &mut rng(6)).unwrap().is_empty());
    assert!(b.sample(10, &mut rng(6)).unwrap().iter().all(|s| s.handle < 3 && s.weight == 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matches_log_space_reference(
        sizes in proptest::collection::vec(0usize..10_000, 2..8),
        alpha in 0.0f64..4.0,
        seed in any::<u64>(),
    ) {
        prop_assume!(sizes.iter().any(|&n| n > 0));
        let mut r = rng(seed);
        let pr: Vec<f64> = sizes.iter().map(|_| rand::Rng::random_range(&mut r, 0.01..10.0)).collect();
        let got = category_probabilities(&sizes, &pr, alpha).unwrap();
        let want = reference_probabilities(&sizes, &pr, alpha);
        prop_assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for i in 0..sizes.len() {
            prop_assert!((got[i] - want[i]).abs() < 1e-9);
            if sizes[i] == 0 {
                prop_assert_eq!(got[i], 0.0);
            } else {
                prop_assert!(got[i] > 0.0);
            }
        }
    }

    #[test]
    fn pushes_touch_only_their_partition(cats in proptest::collection::vec(0usize..4, 1..200), cap in 4usize..40) {
        let mut b = ClassifiedBuffer::new(cap, RG_PRIORITIES.to_vec(), 0.5, 3).unwrap();
        let m = b.partition_capacity();
        let mut pushed = [0usize; 4];
        for (i, &c) in cats.iter().enumerate() {
            let before: Vec<Vec<f64>> = (0..4).map(|j| b.partition(j).iter().map(|e| e.state.base[0]).collect()).collect();
            b.push(exp(c, i as f64)).unwrap();
            pushed[c] += 1;
            for (j, old) in before.iter().enumerate() {
                let now: Vec<f64> = b.partition(j).iter().map(|e| e.state.base[0]).collect();
                if j != c {
                    prop_assert_eq!(&now, old);
                } else {
                    prop_assert_eq!(now.last().copied(), Some(i as f64));
                    // oldest dropped first
                    let keep = old.len().min(m - 1);
                    prop_assert_eq!(&now[..now.len() - 1], &old[old.len() - keep..]);
                }
            }
            prop_assert_eq!(b.len(), b.sizes().iter().sum::<usize>());
            for (size, n) in b.sizes().into_iter().zip(pushed) {
                prop_assert_eq!(size, n.min(m));
            }
        }
    }

    #[test]
    fn handles_resolve_into_their_partition(cats in proptest::collection::vec(0usize..4, 1..100), seed in any::<u64>()) {
        let mut b = ClassifiedBuffer::new(32, RG_PRIORITIES.to_vec(), 1.0, 1).unwrap();
        for (i, &c) in cats.iter().enumerate() {
            b.push(exp(c, i as f64)).unwrap();
        }
        b.begin_episode(0);
        let probs = b.probs().to_vec();
        for s in b.sample(64, &mut rng(seed)).unwrap() {
            let e = b.get(s.handle);
            prop_assert!(probs[e.category] > 0.0);
            prop_assert!(b.partition(e.category).iter().any(|x| x.state.base == e.state.base));
        }
    }
}
