//! Learners, replay strategies and the training loop.

pub mod agent;
pub mod dqn;
pub mod metrics;
pub mod mlp;
pub mod optim;
pub mod strategy;
pub mod tabular_q;
pub mod td3;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use agent::{build_learner, learner_names, Agent, LearnerContext, PolicyArtifact};
pub use dqn::Dqn;
pub use metrics::{median, EpisodeRecord, MetricsLog};
pub use mlp::{Mlp, MlpError, OutputActivation};
pub use optim::Sgd;
pub use strategy::{strategy, strategy_names, ReplayContext, Strategy};
pub use tabular_q::{q_learning_update, TabularQ};
pub use td3::Td3;

use crate::dfa::Dfa;
use crate::env::{Action, ActionSpace, Environment, SimRng};
use crate::product::{Encoding, ProductEnv, ProductError, ProductOptions, TaskSpec};
use crate::ranking::RankTable;
use crate::replay::{Experience, ReplayError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("unknown learner '{0}'")]
    UnknownLearner(String),
    #[error("unknown strategy '{0}'")]
    UnknownStrategy(String),
    #[error("incompatible configuration: {0}")]
    Incompatible(&'static str),
    #[error("strategy needs a rank table but the automaton has too few states")]
    MissingRanks,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Replay(ReplayError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error("every reset ends the episode immediately")]
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct TrainConfig {
    pub strategy: String,
    pub learner: String,
    pub gamma: f64,
    pub reward: f64,
    pub learning_rate: f64,
    pub momentum: f64,
    pub grad_clip: Option<f64>,
    /// Step size of the tabular learner.
    pub q_learning_rate: f64,
    pub batch_size: usize,
    pub learning_starts: usize,
    /// Environment steps between updates.
    pub train_freq: usize,
    pub polyak_tau: f64,
    pub exploration_noise_std: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_fraction: f64,
    pub alpha: f64,
    pub k: usize,
    pub buffer_capacity: usize,
    pub per_alpha: f64,
    pub per_beta0: f64,
    pub hidden: Vec<usize>,
    pub seed: u64,
    pub total_steps: usize,
    /// Stop after this many episodes even if steps remain.
    pub max_episodes: Option<usize>,
    pub horizon: usize,
    pub encoding: Encoding,
    pub delayed_automaton_step: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            strategy: "EC".into(),
            learner: "dqn".into(),
            gamma: 0.99,
            reward: 100.0,
            learning_rate: 3e-4,
            momentum: 0.9,
            grad_clip: Some(10.0),
            q_learning_rate: 0.1,
            batch_size: 32,
            learning_starts: 1000,
            train_freq: 1,
            polyak_tau: 0.005,
            exploration_noise_std: 0.1,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_fraction: 0.3,
            alpha: 0.75,
            k: 10,
            buffer_capacity: 100_000,
            per_alpha: 0.6,
            per_beta0: 0.4,
            hidden: vec![64, 64],
            seed: 0,
            total_steps: 30_000,
            max_episodes: None,
            horizon: 100,
            encoding: Encoding::Enumerated,
            delayed_automaton_step: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        let bad = |m: &str| Err(LearnError::Config(m.into()));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma must lie in (0, 1]");
        }
        if self.batch_size == 0 || self.train_freq == 0 || self.k == 0 || self.horizon == 0 {
            return bad("batch size, train frequency, K and horizon must be positive");
        }
        if !(0.0..).contains(&self.alpha) {
            return bad("alpha must be non-negative");
        }
        if !(self.learning_rate >= 0.0 && self.q_learning_rate >= 0.0) {
            return bad("learning rates must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.polyak_tau) {
            return bad("polyak tau must lie in [0, 1]");
        }
        if self.hidden.contains(&0) {
            return bad("hidden layers must be non-empty");
        }
        Ok(())
    }
}

pub struct TrainOutcome {
    pub metrics: MetricsLog,
    pub agent: Box<dyn Agent>,
    pub env: ProductEnv,
}

fn random_action(space: ActionSpace, rng: &mut SimRng) -> Action {
    match space {
        ActionSpace::Discrete(n) => Action::Discrete(rng.random_range(0..n)),
        ActionSpace::Continuous { dim, high } => Action::Continuous((0..dim).map(|_| rng.random_range(-high..=high)).collect()),
    }
}

/// Builds the product environment for `cfg`'s strategy and runs the
/// training loop for `cfg.total_steps` environment steps.
pub fn train(
    base: Box<dyn Environment>,
    dfa: Arc<Dfa>,
    ranks: Option<Arc<RankTable>>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, LearnError> {
    cfg.validate()?;
    let strat = strategy(&cfg.strategy)?;
    if strat.needs_ranks() && ranks.is_none() {
        return Err(LearnError::MissingRanks);
    }
    let space = base.action_space();
    let tabular_states = base.as_tabular().map(|t| t.num_states() * dfa.num_states());
    let opts = ProductOptions {
        encoding: cfg.encoding,
        shaping: strat.shaping(),
        horizon: cfg.horizon,
        delayed_automaton_step: cfg.delayed_automaton_step,
    };
    let task = TaskSpec::new(cfg.reward, cfg.gamma)?;
    let mut env = ProductEnv::new(base, dfa, ranks.clone(), task, opts)?;
    let mut rng = SimRng::seed_from_u64(cfg.seed);
    let ctx = LearnerContext {
        feature_dim: env.feature_dim(),
        action_space: space,
        tabular_states,
        config: cfg,
    };
    let mut agent = build_learner(&cfg.learner, &ctx, &mut rng)?;
    let mut replay = strat.make_replay(&ReplayContext {
        capacity: cfg.buffer_capacity,
        priorities: ranks.as_ref().map(|r| r.priority.clone()),
        alpha: cfg.alpha,
        k: cfg.k,
        per_alpha: cfg.per_alpha,
        per_beta0: cfg.per_beta0,
    })?;
    let category = |q: usize| ranks.as_ref().map_or(0, |r| r.rank_of(q));

    let mut log = MetricsLog {
        strategy: strat.name().into(),
        shaping: strat.shaping(),
        replay: replay.kind().into(),
        episodes: Vec::new(),
    };
    let mut steps = 0usize;
    let mut stalled = 0usize;
    let mut episode = 0usize;
    while steps < cfg.total_steps && cfg.max_episodes.is_none_or(|m| episode < m) {
        replay.begin_episode(episode);
        let mut obs = env.reset(&mut rng);
        let mut raw = 0.0;
        let mut shaped = 0.0;
        let mut len = 0;
        let mut success = env.dfa().is_accepting(env.automaton_state());
        if env.is_done() {
            stalled += 1;
            if stalled >= 1000 {
                return Err(LearnError::Stalled);
            }
        } else {
            stalled = 0;
        }
        while !env.is_done() && steps < cfg.total_steps {
            let action = if steps < cfg.learning_starts {
                random_action(space, &mut rng)
            } else {
                agent.act(&obs, true, &mut rng)
            };
            let step = env.step(&action, &mut rng)?;
            raw += step.raw_reward;
            shaped += step.shaped_reward;
            success |= step.accepted;
            len += 1;
            steps += 1;
            let progress = steps as f64 / cfg.total_steps as f64;
            agent.set_progress(progress);
            replay.set_progress(progress);
            replay.push(Experience {
                state: obs,
                action,
                reward: step.shaped_reward,
                next_state: step.observation.clone(),
                terminated: step.terminated,
                category: category(step.info.q_next),
            })?;
            obs = step.observation;
            if steps >= cfg.learning_starts && steps.is_multiple_of(cfg.train_freq) {
                let drawn = replay.sample(cfg.batch_size, &mut rng)?;
                let handles: Vec<usize> = drawn.iter().map(|s| s.handle).collect();
                let weights: Vec<f64> = drawn.iter().map(|s| s.weight).collect();
                let batch: Vec<&Experience> = handles.iter().map(|&h| replay.get(h)).collect();
                let td = agent.update(&batch, &weights, &mut rng);
                replay.update_priorities(&handles, &td);
            }
        }
        let stats = replay.stats();
        log.episodes.push(EpisodeRecord {
            episode,
            steps,
            raw_return: raw,
            shaped_return: shaped,
            success,
            ep_length: len,
            buffer_sizes: stats.sizes,
            probs: stats.probs,
        });
        episode += 1;
    }
    Ok(TrainOutcome {
        metrics: log,
        agent,
        env,
    })
}
