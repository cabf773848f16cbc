//! Synchronizes a base environment with a task automaton: the automaton
//! state becomes one extra enumerated observation variable, acceptance
//! pays the task reward, and potential-based shaping is optional.

use std::collections::VecDeque;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfa::Dfa;
use crate::env::{Action, Environment, ProductMdp, SimRng, TabularModel};
use crate::ltlf::{AtomSet, TraceState};
use crate::ranking::RankTable;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProductError {
    #[error("step called after the episode ended")]
    StepAfterTermination,
    #[error("environment does not provide proposition '{0}'")]
    MissingProposition(String),
    #[error("environment has a continuous state space")]
    NotTabular,
    #[error("shaping requires a rank table")]
    ShapingWithoutRanks,
    #[error("invalid task: {0}")]
    InvalidTask(String),
}

/// Maps the environment's proposition bits onto the formula's atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pairs: Vec<(u32, u32)>,
}

impl Labeling {
    /// Every atom must be provided by the environment; extra environment
    /// propositions are ignored.
    pub fn new(env_props: &[String], atoms: &AtomSet) -> Result<Self, ProductError> {
        let pairs = atoms
            .names()
            .iter()
            .enumerate()
            .map(|(ai, name)| {
                env_props
                    .iter()
                    .position(|p| p == name)
                    .map(|ei| (ei as u32, ai as u32))
                    .ok_or_else(|| ProductError::MissingProposition(name.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Labeling { pairs })
    }

    pub fn label(&self, env_bits: u64) -> TraceState {
        let mut bits = 0u32;
        for &(e, a) in &self.pairs {
            if env_bits >> e & 1 == 1 {
                bits |= 1 << a;
            }
        }
        TraceState(bits)
    }
}

/// How the automaton state is exposed to the learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Encoding {
    /// One variable ranging over the states; `q/(|Q|-1)` as a feature.
    #[default]
    Enumerated,
    /// One boolean variable per state.
    OneHot,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AutomatonFeature {
    Enumerated(f64),
    OneHot(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductObservation {
    pub base: Vec<f64>,
    pub base_index: Option<usize>,
    pub q: usize,
    pub num_q: usize,
    pub encoding: Encoding,
}

impl ProductObservation {
    pub fn automaton_feature(&self) -> AutomatonFeature {
        match self.encoding {
            Encoding::Enumerated => AutomatonFeature::Enumerated(if self.num_q > 1 {
                self.q as f64 / (self.num_q - 1) as f64
            } else {
                0.0
            }),
            Encoding::OneHot => AutomatonFeature::OneHot((0..self.num_q).map(|i| i == self.q).collect()),
        }
    }

    /// Flat feature vector for function approximators.
    pub fn features(&self) -> Vec<f64> {
        let mut v = self.base.clone();
        match self.automaton_feature() {
            AutomatonFeature::Enumerated(x) => v.push(x),
            AutomatonFeature::OneHot(bits) => v.extend(bits.into_iter().map(|b| if b { 1.0 } else { 0.0 })),
        }
        v
    }

    pub fn feature_dim(base_dim: usize, num_q: usize, encoding: Encoding) -> usize {
        match encoding {
            Encoding::Enumerated => base_dim + 1,
            Encoding::OneHot => base_dim + num_q,
        }
    }

    /// `s * |Q| + q` for finite base environments.
    pub fn tabular_index(&self) -> Option<usize> {
        self.base_index.map(|s| s * self.num_q + self.q)
    }
}

/// The non-Markovian reward `⟨φ, r⟩` plus the discount used for shaping.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub reward: f64,
    pub gamma: f64,
}

impl TaskSpec {
    pub fn new(reward: f64, gamma: f64) -> Result<Self, ProductError> {
        if !reward.is_finite() {
            return Err(ProductError::InvalidTask("reward must be finite".into()));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(ProductError::InvalidTask("gamma must lie in (0, 1]".into()));
        }
        Ok(TaskSpec { reward, gamma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductOptions {
    pub encoding: Encoding,
    pub shaping: bool,
    pub horizon: usize,
    /// Update the automaton from the pre-step state's labels, one step
    /// behind, as a cpfs block does; by default the initial state's labels
    /// are consumed at reset and each step consumes the successor's labels.
    pub delayed_automaton_step: bool,
}

impl Default for ProductOptions {
    fn default() -> Self {
        ProductOptions {
            encoding: Encoding::Enumerated,
            shaping: false,
            horizon: 500,
            delayed_automaton_step: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub q: usize,
    pub q_next: usize,
    pub raw_reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductStep {
    pub observation: ProductObservation,
    pub raw_reward: f64,
    /// Equal to `raw_reward` when shaping is off.
    pub shaped_reward: f64,
    pub terminated: bool,
    pub truncated: bool,
    pub accepted: bool,
    pub info: StepInfo,
}

impl ProductStep {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}

/// Product of a base environment and a task automaton.
pub struct ProductEnv {
    env: Box<dyn Environment>,
    dfa: Arc<Dfa>,
    labeling: Labeling,
    ranks: Option<Arc<RankTable>>,
    task: TaskSpec,
    opts: ProductOptions,
    q: usize,
    t: usize,
    done: bool,
    base_obs: Vec<f64>,
}

impl ProductEnv {
    pub fn new(
        env: Box<dyn Environment>,
        dfa: Arc<Dfa>,
        ranks: Option<Arc<RankTable>>,
        task: TaskSpec,
        opts: ProductOptions,
    ) -> Result<Self, ProductError> {
        if opts.shaping && ranks.is_none() {
            return Err(ProductError::ShapingWithoutRanks);
        }
        let labeling = Labeling::new(&env.propositions(), dfa.atoms())?;
        let q = dfa.initial();
        Ok(ProductEnv {
            env,
            dfa,
            labeling,
            ranks,
            task,
            opts,
            q,
            t: 0,
            done: true,
            base_obs: Vec::new(),
        })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn ranks(&self) -> Option<&RankTable> {
        self.ranks.as_deref()
    }

    pub fn options(&self) -> &ProductOptions {
        &self.opts
    }

    pub fn task(&self) -> &TaskSpec {
        &self.task
    }

    pub fn base(&self) -> &dyn Environment {
        self.env.as_ref()
    }

    pub fn base_mut(&mut self) -> &mut dyn Environment {
        self.env.as_mut()
    }

    pub fn automaton_state(&self) -> usize {
        self.q
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn feature_dim(&self) -> usize {
        ProductObservation::feature_dim(self.env.observation_dim(), self.dfa.num_states(), self.opts.encoding)
    }

    pub fn current_label(&self) -> TraceState {
        self.labeling.label(self.env.label_bits())
    }

    fn observation(&self) -> ProductObservation {
        ProductObservation {
            base: self.base_obs.clone(),
            base_index: self.env.tabular_state(),
            q: self.q,
            num_q: self.dfa.num_states(),
            encoding: self.opts.encoding,
        }
    }

    /// Starts an episode. The episode may already be over if the initial
    /// labels drive the automaton into an accepting or error state.
    pub fn reset(&mut self, rng: &mut SimRng) -> ProductObservation {
        self.base_obs = self.env.reset(rng);
        self.t = 0;
        self.q = if self.opts.delayed_automaton_step {
            self.dfa.initial()
        } else {
            self.dfa.step(self.dfa.initial(), self.current_label())
        };
        self.done = self.dfa.is_terminal(self.q);
        self.observation()
    }

    pub fn step(&mut self, action: &Action, rng: &mut SimRng) -> Result<ProductStep, ProductError> {
        if self.done {
            return Err(ProductError::StepAfterTermination);
        }
        let q = self.q;
        let before = self.current_label();
        let base = self.env.step(action, rng);
        self.base_obs = base.observation;
        self.t += 1;
        let letter = if self.opts.delayed_automaton_step {
            before
        } else {
            self.current_label()
        };
        let q_next = self.dfa.step(q, letter);
        self.q = q_next;
        let accepted = self.dfa.is_accepting(q_next);
        let raw = if accepted { self.task.reward } else { 0.0 } + base.reward;
        let shaped = match (&self.ranks, self.opts.shaping) {
            (Some(r), true) => raw + r.shaping(q, q_next, self.task.gamma),
            _ => raw,
        };
        let terminated = self.dfa.is_terminal(q_next) || base.terminated;
        let truncated = !terminated && self.t >= self.opts.horizon;
        self.done = terminated || truncated;
        Ok(ProductStep {
            observation: self.observation(),
            raw_reward: raw,
            shaped_reward: shaped,
            terminated,
            truncated,
            accepted,
            info: StepInfo {
                q,
                q_next,
                raw_reward: raw,
            },
        })
    }

    /// The exact product MDP of a finite base environment, with raw or
    /// shaped rewards.
    pub fn product_mdp(&self, shaped: bool) -> Result<ProductMdp, ProductError> {
        let model = self.env.as_tabular().ok_or(ProductError::NotTabular)?;
        let shaping = if shaped {
            Some((self.ranks.as_deref().ok_or(ProductError::ShapingWithoutRanks)?, self.task.gamma))
        } else {
            None
        };
        Ok(ProductMdp::build(
            model,
            &self.dfa,
            &self.labeling,
            self.task.reward,
            shaping,
            self.opts.delayed_automaton_step,
        ))
    }

    /// Size of the product state space under `encoding`, for finite base
    /// environments: the naive variable-assignment count and the number of
    /// product states reachable from the start distribution.
    pub fn product_state_count(&self, encoding: Encoding) -> Result<StateCount, ProductError> {
        let model = self.env.as_tabular().ok_or(ProductError::NotTabular)?;
        let s = model.num_states();
        let nq = self.dfa.num_states();
        let naive = match encoding {
            Encoding::Enumerated => nq * s,
            Encoding::OneHot => (1usize << nq) * s,
        };
        let reachable = reachable_product_states(model, &self.dfa, &self.labeling, self.opts.delayed_automaton_step);
        Ok(StateCount { naive, reachable })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateCount {
    pub naive: usize,
    pub reachable: usize,
}

/// Closed-form naive sizes: `|Q|·|S|` enumerated versus `2^|Q|·|S|`.
pub fn naive_state_count(num_q: usize, num_s: usize, encoding: Encoding) -> usize {
    match encoding {
        Encoding::Enumerated => num_q * num_s,
        Encoding::OneHot => (1usize << num_q) * num_s,
    }
}

fn reachable_product_states(model: &dyn TabularModel, dfa: &Dfa, labeling: &Labeling, delayed: bool) -> usize {
    let nq = dfa.num_states();
    let mut seen = vec![false; model.num_states() * nq];
    let mut queue = VecDeque::new();
    for (_, s) in model.start_distribution() {
        let q = if delayed {
            dfa.initial()
        } else {
            dfa.step(dfa.initial(), labeling.label(model.label_bits_of(s)))
        };
        if !seen[s * nq + q] {
            seen[s * nq + q] = true;
            queue.push_back((s, q));
        }
    }
    while let Some((s, q)) = queue.pop_front() {
        if dfa.is_terminal(q) {
            continue;
        }
        for a in 0..model.num_actions() {
            for (_, t) in model.transitions(s, a) {
                let letter = if delayed {
                    labeling.label(model.label_bits_of(s))
                } else {
                    labeling.label(model.label_bits_of(t))
                };
                let qt = dfa.step(q, letter);
                if !seen[t * nq + qt] {
                    seen[t * nq + qt] = true;
                    queue.push_back((t, qt));
                }
            }
        }
    }
    seen.iter().filter(|&&b| b).count()
}

/// One row of an episode trace log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRow {
    pub step: usize,
    pub q: usize,
    pub q_next: usize,
    pub action_hash: u64,
    pub raw_reward: f64,
    pub shaped_reward: f64,
    pub terminated: bool,
}

impl EpisodeRow {
    pub fn from_step(step: usize, action: &Action, s: &ProductStep) -> Self {
        EpisodeRow {
            step,
            q: s.info.q,
            q_next: s.info.q_next,
            action_hash: action.digest(),
            raw_reward: s.raw_reward,
            shaped_reward: s.shaped_reward,
            terminated: s.terminated,
        }
    }
}

/// Writes episode rows as CSV with states printed `q1..qn`.
pub fn write_episode_csv<W: Write>(out: W, rows: &[EpisodeRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "q", "q_next", "action_hash", "raw_reward", "shaped_reward", "terminated"])?;
    for r in rows {
        w.write_record([
            r.step.to_string(),
            Dfa::state_name(r.q),
            Dfa::state_name(r.q_next),
            format!("{:016x}", r.action_hash),
            r.raw_reward.to_string(),
            r.shaped_reward.to_string(),
            r.terminated.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
