//! Task files: formula, environment, ranking parameters and the training
//! matrix, plus compilation into automaton artifacts.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::dfa::{compile, Dfa};
use crate::env::{
    CartpoleRegions, CartpoleRegionsConfig, Environment, Gridworld, GridworldConfig, SimRng, Waterworld, WaterworldConfig,
};
use crate::learn::TrainConfig;
use crate::ltlf::{parse, parse_inferring_atoms, AtomSet, Formula, Style};
use crate::ranking::{default_categories, rank_states, RankTable};

/// A freshly generated map per run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RandomMap {
    pub boundary: f64,
    pub colors: Vec<String>,
    /// Run `s` uses the map drawn from seed `map_seed + s`.
    #[serde(default)]
    pub map_seed: u64,
    #[serde(default)]
    pub discrete_actions: bool,
    #[serde(default = "default_respawn")]
    pub respawn_on_touch: bool,
}

fn default_respawn() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WaterworldSpec {
    #[serde(default)]
    pub map: Option<WaterworldConfig>,
    #[serde(default)]
    pub random: Option<RandomMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnvSpec {
    Gridworld(GridworldConfig),
    Waterworld(WaterworldSpec),
    Cartpole(CartpoleRegionsConfig),
}

impl EnvSpec {
    pub fn default_horizon(&self) -> usize {
        match self {
            EnvSpec::Gridworld(_) => 100,
            EnvSpec::Waterworld(_) => 600,
            EnvSpec::Cartpole(_) => 500,
        }
    }

    /// Instantiates the environment used by run `seed`.
    pub fn build(&self, seed: u64) -> Result<Box<dyn Environment>, ExperimentError> {
        let cfg = |e: String| ExperimentError::Config(e);
        Ok(match self {
            EnvSpec::Gridworld(c) => Box::new(Gridworld::new(c.clone()).map_err(cfg)?),
            EnvSpec::Cartpole(c) => Box::new(CartpoleRegions::new(c.clone()).map_err(cfg)?),
            EnvSpec::Waterworld(w) => {
                let map = match (&w.map, &w.random) {
                    (Some(m), None) => m.clone(),
                    (None, Some(r)) => {
                        let mut rng = SimRng::seed_from_u64(r.map_seed.wrapping_add(seed));
                        let colors: Vec<&str> = r.colors.iter().map(|s| s.as_str()).collect();
                        WaterworldConfig {
                            discrete_actions: r.discrete_actions,
                            respawn_on_touch: r.respawn_on_touch,
                            ..WaterworldConfig::random(r.boundary, &colors, &mut rng)
                        }
                    }
                    _ => return Err(cfg("waterworld needs exactly one of `map` and `random`".into())),
                };
                Box::new(Waterworld::new(map).map_err(cfg)?)
            }
        })
    }
}

fn default_reward() -> f64 {
    100.0
}
fn default_c() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    0.75
}
fn default_k() -> usize {
    10
}
fn default_gamma() -> f64 {
    0.99
}
fn default_strategies() -> Vec<String> {
    vec!["BASE".into(), "EC".into()]
}
fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaskFile {
    pub name: String,
    pub formula: String,
    /// Inferred from the formula when absent.
    #[serde(default)]
    pub atoms: Option<Vec<String>>,
    pub env: EnvSpec,
    #[serde(default = "default_reward")]
    pub reward: f64,
    /// Category count; `min(4, |Q|)` when absent.
    #[serde(default, rename = "N")]
    pub n: Option<usize>,
    #[serde(default = "default_c", rename = "C")]
    pub c: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_k", rename = "K")]
    pub k: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<String>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Extra exponents to sweep for the EC strategy.
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub total_steps: Option<usize>,
    #[serde(default)]
    pub horizon: Option<usize>,
    /// Remaining learner settings.
    #[serde(default)]
    pub train: TrainConfig,
}

impl TaskFile {
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("task files serialize")
    }

    /// Training settings of one run.
    pub fn train_config(&self, strategy: &str, seed: u64, alpha: f64) -> TrainConfig {
        TrainConfig {
            strategy: strategy.to_string(),
            seed,
            alpha,
            reward: self.reward,
            k: self.k,
            gamma: self.gamma,
            total_steps: self.total_steps.unwrap_or(self.train.total_steps),
            horizon: self.horizon.unwrap_or_else(|| self.env.default_horizon()),
            ..self.train.clone()
        }
    }
}

/// Automaton and rank table of a task.
#[derive(Debug, Clone)]
pub struct CompiledTask {
    pub atoms: AtomSet,
    pub formula: Formula,
    pub dfa: Arc<Dfa>,
    pub ranks: Option<Arc<RankTable>>,
    /// `(requested, used)` when the requested N was clamped.
    pub clamped_n: Option<(usize, usize)>,
}

pub fn compile_task(task: &TaskFile) -> Result<CompiledTask, ExperimentError> {
    let (formula, atoms) = match &task.atoms {
        Some(names) => {
            let atoms = AtomSet::new(names.iter().map(|s| s.as_str()))?;
            (parse(&task.formula, &atoms)?, atoms)
        }
        None => parse_inferring_atoms(&task.formula)?,
    };
    let dfa = compile(&formula, &atoms)?;
    let states = dfa.num_states();
    let (n, clamped_n) = match (task.n, default_categories(states)) {
        (_, None) => (None, None),
        (None, Some(d)) => (Some(d), None),
        (Some(n), Some(_)) => {
            let used = n.clamp(3, states);
            (Some(used), (used != n).then_some((n, used)))
        }
    };
    let ranks = match n {
        Some(n) => Some(Arc::new(rank_states(&dfa, n, task.c)?)),
        None => None,
    };
    Ok(CompiledTask {
        atoms,
        formula,
        dfa: Arc::new(dfa),
        ranks,
        clamped_n,
    })
}

impl CompiledTask {
    /// Writes `dfa.json`, `dfa.dot`, `task.rddl` and `ranks.json` into
    /// `dir`. Output is byte-identical across invocations.
    pub fn write_artifacts(&self, dir: &Path, reward: f64) -> Result<(), ExperimentError> {
        let io = |e: std::io::Error| ExperimentError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let json = serde_json::to_string_pretty(&self.dfa.to_json()).expect("dfa serializes");
        fs::write(dir.join("dfa.json"), json + "\n").map_err(io)?;
        fs::write(dir.join("dfa.dot"), self.dfa.to_dot()).map_err(io)?;
        fs::write(dir.join("task.rddl"), self.dfa.to_rddl(reward)).map_err(io)?;
        let ranks = serde_json::to_string_pretty(&self.ranks.as_deref()).expect("ranks serialize");
        fs::write(dir.join("ranks.json"), ranks + "\n").map_err(io)?;
        Ok(())
    }

    /// Human-readable summary: sizes and ranks.
    pub fn describe(&self) -> String {
        let d = &self.dfa;
        let mut s = format!(
            "formula: {}\n|Q| = {}, |F| = {}, |E| = {}\n",
            self.formula.display(&self.atoms, Style::Ascii),
            d.num_states(),
            d.accepting_states().len(),
            d.error_states().len()
        );
        if let Some((req, used)) = self.clamped_n {
            s += &format!("N = {req} clamped to {used}\n");
        }
        match &self.ranks {
            Some(r) => {
                s += &format!("N = {}, C = {}\n", r.n, r.c);
                for q in 0..d.num_states() {
                    s += &format!(
                        "  {}: rank {} potential {:.6}{}\n",
                        Dfa::state_name(q),
                        r.rank[q],
                        r.potential[q],
                        if d.is_accepting(q) {
                            " (accepting)"
                        } else if d.is_error(q) {
                            " (error)"
                        } else {
                            ""
                        }
                    );
                }
            }
            None => s += "too few states to rank\n",
        }
        s
    }
}
