use ltlf_rl::env::{Action, ActionSpace, SimRng};
use ltlf_rl::experiment::presets;
use ltlf_rl::experiment::verify::{gradient_error, kink_margin, KINK_MARGIN};
use ltlf_rl::experiment::{compile_task, run_one, RunOptions, RunSpec, TaskFile};
use ltlf_rl::learn::td3::Td3Params;
use ltlf_rl::learn::{
    build_learner, learner_names, strategy, strategy_names, LearnError, LearnerContext, MetricsLog, Mlp,
    OutputActivation, ReplayContext, Td3, TrainConfig,
};
use ltlf_rl::product::{Encoding, ProductObservation};
use ltlf_rl::replay::Experience;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

fn short(mut task: TaskFile, steps: usize) -> TaskFile {
    task.total_steps = Some(steps);
    task.train.learning_starts = 100;
    task
}

fn run(task: &TaskFile, strategy: &str, seed: u64) -> MetricsLog {
    let compiled = compile_task(task).unwrap();
    let spec = RunSpec {
        strategy: strategy.into(),
        alpha: task.alpha,
        seed,
    };
    run_one(task, &compiled, &spec, RunOptions::default()).unwrap()
}

fn obs(base: Vec<f64>, q: usize) -> ProductObservation {
    ProductObservation {
        base,
        base_index: None,
        q,
        num_q: 3,
        encoding: Encoding::Enumerated,
    }
}

fn transition(s: Vec<f64>, a: f64, r: f64, s2: Vec<f64>, terminated: bool) -> Experience {
    Experience {
        state: obs(s, 0),
        action: Action::Continuous(vec![a]),
        reward: r,
        next_state: obs(s2, 1),
        terminated,
        category: 0,
    }
}

fn small_td3(seed: u64, tau: f64) -> Td3 {
    let mut r = rng(seed);
    let actor = Mlp::new(&[3, 8, 1], OutputActivation::Tanh, &mut r);
    let c = Mlp::new(&[4, 8, 1], OutputActivation::Identity, &mut r);
    let params = Td3Params {
        gamma: 0.9,
        tau,
        policy_delay: 2,
        target_noise: 0.2,
        target_noise_clip: 0.5,
        exploration_std: 0.1,
    };
    Td3::new(actor, [c.clone(), c], 2.0, params, 1e-2, 0.0, None)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn backprop_matches_central_differences(
        seed in any::<u64>(),
        hidden in proptest::collection::vec(1usize..12, 0..3),
        inp in 1usize..6,
        out in 1usize..4,
        tanh in any::<bool>(),
    ) {
        let mut r = rng(seed);
        let mut sizes = vec![inp];
        sizes.extend(&hidden);
        sizes.push(out);
        let act = if tanh { OutputActivation::Tanh } else { OutputActivation::Identity };
        let (net, x) = loop {
            let net = Mlp::new(&sizes, act, &mut r);
            let x: Vec<f64> = (0..inp).map(|_| r.random_range(-1.0..1.0)).collect();
            if kink_margin(&net, &x) > KINK_MARGIN {
                break (net, x);
            }
        };
        let u: Vec<f64> = (0..out).map(|_| r.random_range(-1.0..1.0)).collect();
        let err = gradient_error(&net, &x, &u, 1e-6);
        prop_assert!(err < 1e-5, "{err}");
    }
}

#[test]
fn critic_gradient_matches_loss_differences() {
    let t = small_td3(1, 0.005);
    let batch_owned = [
        transition(vec![0.1, -0.3], 0.5, 1.0, vec![0.2, 0.0], false),
        transition(vec![-0.4, 0.7], -1.5, -2.0, vec![0.0, 0.1], true),
    ];
    let batch: Vec<&Experience> = batch_owned.iter().collect();
    let weights = [1.0, 0.5];
    let y = t.targets(&batch, &mut rng(2));
    assert_eq!(y[1], -2.0);
    let (g, tds) = t.critic_gradient(0, &batch, &weights, &y);
    assert_eq!(tds.len(), 2);
    let eps = 1e-6;
    let mut c = t.critics[0].clone();
    let mut num = Vec::new();
    for i in 0..c.num_params() {
        let p = c.params()[i];
        c.params_mut()[i] = p + eps;
        let hi = Td3::critic_loss(&c, &batch, &weights, &y, 2.0);
        c.params_mut()[i] = p - eps;
        let lo = Td3::critic_loss(&c, &batch, &weights, &y, 2.0);
        c.params_mut()[i] = p;
        num.push((hi - lo) / (2.0 * eps));
    }
    let dot: f64 = g.iter().zip(&num).map(|(a, b)| a * b).sum();
    let na = g.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nb = num.iter().map(|a| a * a).sum::<f64>().sqrt();
    assert!(dot / (na * nb) > 0.9999, "cosine {}", dot / (na * nb));
    assert!((na - nb).abs() / nb < 1e-4);
}

#[test]
fn twin_critics_start_identical_and_stay_so_under_equal_targets() {
    let t = small_td3(3, 0.005);
    let b = [transition(vec![0.3, 0.3], 1.0, 0.5, vec![0.1, 0.1], false)];
    let batch: Vec<&Experience> = b.iter().collect();
    let y = t.targets(&batch, &mut rng(4));
    let (g0, _) = t.critic_gradient(0, &batch, &[1.0], &y);
    let (g1, _) = t.critic_gradient(1, &batch, &[1.0], &y);
    assert_eq!(g0, g1);
}

#[test]
fn unit_tau_copies_online_networks() {
    let mut t = small_td3(5, 1.0);
    for p in t.actor.params_mut() {
        *p += 0.25;
    }
    t.critics[1].params_mut()[0] = 7.0;
    t.sync_targets();
    assert_eq!(t.actor_target.params(), t.actor.params());
    assert_eq!(t.critic_targets[0].params(), t.critics[0].params());
    assert_eq!(t.critic_targets[1].params(), t.critics[1].params());
}

#[test]
fn zero_tau_freezes_targets() {
    let mut t = small_td3(6, 0.0);
    let before = t.actor_target.params().to_vec();
    for p in t.actor.params_mut() {
        *p -= 1.0;
    }
    t.sync_targets();
    assert_eq!(t.actor_target.params(), before.as_slice());
}

#[test]
fn seeded_training_is_reproducible() {
    for (task, steps) in [
        (presets::gridworld_red_green(), 3000),
        (presets::gridworld_task1(), 1500),
        (presets::benchmark(5).unwrap(), 600),
    ] {
        let task = short(task, steps);
        for s in ["BASE", "EC"] {
            let a = run(&task, s, 7);
            let b = run(&task, s, 7);
            assert!(!a.episodes.is_empty());
            assert_eq!(a, b, "{} {s}", task.name);
        }
        assert_ne!(run(&task, "BASE", 1), run(&task, "BASE", 2), "{}", task.name);
    }
}

#[test]
fn base_rewards_are_unshaped_and_ec_uses_four_partitions() {
    let task = short(presets::gridworld_task1(), 2000);
    let base = run(&task, "BASE", 0);
    assert!(!base.shaping);
    for e in &base.episodes {
        assert_eq!(e.shaped_return, e.raw_return);
        assert_eq!(e.buffer_sizes.len(), 1);
    }
    let ec = run(&task, "EC", 0);
    assert!(ec.shaping);
    assert_eq!(ec.replay, "classified");
    let last = ec.episodes.last().unwrap();
    assert_eq!(last.buffer_sizes.len(), 4);
    assert_eq!(last.buffer_sizes.iter().sum::<usize>(), last.steps);
    let total: f64 = last.probs.iter().sum();
    assert!((total - 1.0).abs() < 1e-9);
    for (n, p) in last.buffer_sizes.iter().zip(&last.probs) {
        if *n == 0 {
            assert_eq!(*p, 0.0);
        }
    }
    let per = run(&task, "PER", 0);
    assert_eq!(per.replay, "prioritized");
    assert!(!per.shaping);
}

#[test]
fn ec_partitions_carry_rank_priorities() {
    let compiled = compile_task(&presets::gridworld_red_green()).unwrap();
    let ranks = compiled.ranks.unwrap();
    assert_eq!(ranks.priority, vec![0.25, 1.0 / 3.0, 0.5, 1.0]);
    let replay = strategy("EC")
        .unwrap()
        .make_replay(&ReplayContext {
            capacity: 400,
            priorities: Some(ranks.priority.clone()),
            alpha: 0.75,
            k: 10,
            per_alpha: 0.6,
            per_beta0: 0.4,
        })
        .unwrap();
    assert_eq!(replay.kind(), "classified");
    assert_eq!(replay.stats().sizes, vec![0; 4]);
}

#[test]
fn registries_resolve_by_name() {
    assert_eq!(strategy_names(), vec!["BASE", "RS", "PER", "EC"]);
    for n in strategy_names() {
        assert_eq!(strategy(n).unwrap().name(), n);
        assert_eq!(strategy(&n.to_lowercase()).unwrap().name(), n);
    }
    assert!(strategy("RS").unwrap().shaping());
    assert!(!strategy("PER").unwrap().shaping());
    assert_eq!(strategy("HER").err(), Some(LearnError::UnknownStrategy("HER".into())));
    assert_eq!(learner_names(), vec!["tabular-q", "dqn", "td3"]);

    let cfg = TrainConfig::default();
    let ctx = LearnerContext {
        feature_dim: 3,
        action_space: ActionSpace::Discrete(4),
        tabular_states: None,
        config: &cfg,
    };
    assert!(build_learner("dqn", &ctx, &mut rng(0)).is_ok());
    assert!(matches!(build_learner("td3", &ctx, &mut rng(0)), Err(LearnError::Incompatible(_))));
    assert!(build_learner("tabular-q", &ctx, &mut rng(0)).is_err());
    assert!(matches!(build_learner("sarsa", &ctx, &mut rng(0)), Err(LearnError::UnknownLearner(_))));
}

#[test]
fn invalid_configs_are_rejected() {
    let ok = TrainConfig::default();
    assert!(ok.validate().is_ok());
    for bad in [
        TrainConfig { gamma: 0.0, ..ok.clone() },
        TrainConfig { gamma: 1.5, ..ok.clone() },
        TrainConfig { batch_size: 0, ..ok.clone() },
        TrainConfig { k: 0, ..ok.clone() },
        TrainConfig { alpha: -0.5, ..ok.clone() },
        TrainConfig { polyak_tau: 2.0, ..ok.clone() },
        TrainConfig { hidden: vec![0], ..ok.clone() },
    ] {
        assert!(bad.validate().is_err(), "{bad:?}");
    }
}

#[test]
fn metrics_survive_csv_round_trip() {
    let task = short(presets::gridworld_task1(), 1500);
    let log = run(&task, "EC", 3);
    let mut buf = Vec::new();
    log.write_csv(&mut buf).unwrap();
    assert_eq!(MetricsLog::read_csv(buf.as_slice()).unwrap(), log);
}
