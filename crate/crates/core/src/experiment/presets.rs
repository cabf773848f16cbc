//! Built-in task files; `tasks/*.json` in the repository mirror these.

use super::catalog::{benchmark_task, RED_GREEN};
use super::task::{EnvSpec, RandomMap, TaskFile, WaterworldSpec};
use crate::env::{CartpoleRegionsConfig, GridworldConfig};
use crate::learn::TrainConfig;

fn base(name: &str, formula: String, atoms: Vec<&str>, env: EnvSpec, train: TrainConfig) -> TaskFile {
    TaskFile {
        name: name.into(),
        formula,
        atoms: Some(atoms.into_iter().map(String::from).collect()),
        env,
        reward: 100.0,
        n: None,
        c: 1.0,
        alpha: 0.75,
        k: 10,
        gamma: 0.99,
        strategies: vec!["BASE".into(), "EC".into()],
        seeds: (0..10).collect(),
        alphas: Vec::new(),
        total_steps: None,
        horizon: None,
        train,
    }
}

/// Tabular Q-learning settings shared by the gridworld tasks.
pub fn tabular_train() -> TrainConfig {
    TrainConfig {
        learner: "tabular-q".into(),
        q_learning_rate: 0.5,
        batch_size: 4,
        train_freq: 4,
        learning_starts: 0,
        epsilon_fraction: 0.2,
        total_steps: 30_000,
        ..TrainConfig::default()
    }
}

/// Red, then blue, then green on a 7x7 grid, with the exponent sweep.
pub fn gridworld_task1() -> TaskFile {
    let (f, a) = benchmark_task(1).unwrap();
    TaskFile {
        alphas: vec![0.0, 0.25, 0.5, 0.75],
        ..base(
            "gridworld-task1",
            f,
            a,
            EnvSpec::Gridworld(GridworldConfig::red_blue_green_7x7()),
            tabular_train(),
        )
    }
}

/// The red/green task on a 7x7 grid, trained for 5000 episodes.
pub fn gridworld_red_green() -> TaskFile {
    base(
        "gridworld-red-green",
        RED_GREEN.into(),
        vec!["g", "r"],
        EnvSpec::Gridworld(GridworldConfig::red_green_7x7()),
        TrainConfig {
            total_steps: 1_000_000,
            max_episodes: Some(5000),
            ..tabular_train()
        },
    )
}

fn dqn_train(total_steps: usize) -> TrainConfig {
    TrainConfig {
        learner: "dqn".into(),
        learning_rate: 3e-3,
        train_freq: 4,
        total_steps,
        ..TrainConfig::default()
    }
}

fn td3_train(total_steps: usize) -> TrainConfig {
    TrainConfig {
        learner: "td3".into(),
        total_steps,
        ..TrainConfig::default()
    }
}

fn waterworld(boundary: f64, colors: &[&str], per_color: usize, discrete: bool) -> EnvSpec {
    let colors = colors
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.to_string(), per_color))
        .collect();
    EnvSpec::Waterworld(WaterworldSpec {
        map: None,
        random: Some(RandomMap {
            boundary,
            colors,
            map_seed: 1000,
            discrete_actions: discrete,
            respawn_on_touch: true,
        }),
    })
}

/// Task 1 on a 10x10 map with one ball per colour, learned by DQN.
pub fn waterworld_small_task1() -> TaskFile {
    let (f, a) = benchmark_task(1).unwrap();
    base("waterworld-small-task1", f, a, waterworld(10.0, &["r", "b", "g"], 1, true), dqn_train(100_000))
}

/// Benchmark task `n` (1..=6) on its full-size environment.
pub fn benchmark(n: usize) -> Option<TaskFile> {
    let (f, a) = benchmark_task(n)?;
    let name = format!("task{n}");
    Some(match n {
        1 | 2 => base(&name, f, a, waterworld(20.0, &["r", "b", "g"], 3, false), td3_train(200_000)),
        3 => base(
            &name,
            f,
            a,
            waterworld(30.0, &["r", "b", "g", "bk", "wt", "gy"], 3, false),
            td3_train(500_000),
        ),
        _ => base(
            &name,
            f,
            a,
            EnvSpec::Cartpole(CartpoleRegionsConfig::with_regions([3, 5, 7][n - 4])),
            td3_train(60_000),
        ),
    })
}

/// Every preset, keyed by file stem.
pub fn all() -> Vec<TaskFile> {
    let mut v = vec![gridworld_red_green(), gridworld_task1(), waterworld_small_task1()];
    v.extend((1..=6).filter_map(benchmark));
    v
}
