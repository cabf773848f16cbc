//! Finite transition models, their product with a task automaton, and the
//! value-iteration oracle used to check learned policies.

use thiserror::Error;

use crate::dfa::Dfa;
use crate::product::Labeling;
use crate::ranking::RankTable;

/// A finite MDP with labelled states.
pub trait TabularModel {
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;
    /// Outcome distribution of action `a` in state `s`.
    fn transitions(&self, s: usize, a: usize) -> Vec<(f64, usize)>;
    fn label_bits_of(&self, s: usize) -> u64;
    fn start_distribution(&self) -> Vec<(f64, usize)>;
    fn proposition_names(&self) -> Vec<String>;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TabularError {
    #[error("non-finite value encountered at state {0}")]
    NonFinite(usize),
    #[error("no convergence after {0} sweeps")]
    NotConverged(usize),
}

/// One product-state outcome: probability, successor and reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub prob: f64,
    pub next: usize,
    pub reward: f64,
}

/// Product of a finite model and a DFA, indexed `s * |Q| + q`. States whose
/// automaton component is accepting or an error are absorbing with zero
/// reward.
#[derive(Debug, Clone)]
pub struct ProductMdp {
    num_s: usize,
    num_q: usize,
    num_actions: usize,
    terminal: Vec<bool>,
    accepting: Vec<bool>,
    outcomes: Vec<Vec<Outcome>>,
    start: Vec<(f64, usize)>,
}

impl ProductMdp {
    /// `shaping` adds `gamma * rho(q') - rho(q)` to every non-absorbing
    /// transition. With `delayed`, each step consumes the labels of the
    /// state being left and the start state is not consumed.
    pub fn build(
        model: &dyn TabularModel,
        dfa: &Dfa,
        labeling: &Labeling,
        reward: f64,
        shaping: Option<(&RankTable, f64)>,
        delayed: bool,
    ) -> Self {
        let num_s = model.num_states();
        let num_q = dfa.num_states();
        let num_actions = model.num_actions();
        let n = num_s * num_q;
        let mut terminal = vec![false; n];
        let mut accepting = vec![false; n];
        let mut outcomes = Vec::with_capacity(n * num_actions);
        let letters: Vec<_> = (0..num_s).map(|s| labeling.label(model.label_bits_of(s))).collect();
        for s in 0..num_s {
            for q in 0..num_q {
                let x = s * num_q + q;
                terminal[x] = dfa.is_terminal(q);
                accepting[x] = dfa.is_accepting(q);
                for a in 0..num_actions {
                    if terminal[x] {
                        outcomes.push(Vec::new());
                        continue;
                    }
                    let row = model
                        .transitions(s, a)
                        .into_iter()
                        .map(|(prob, t)| {
                            let qt = dfa.step(q, if delayed { letters[s] } else { letters[t] });
                            let mut r = if dfa.is_accepting(qt) { reward } else { 0.0 };
                            if let Some((ranks, gamma)) = shaping {
                                r += ranks.shaping(q, qt, gamma);
                            }
                            Outcome {
                                prob,
                                next: t * num_q + qt,
                                reward: r,
                            }
                        })
                        .collect();
                    outcomes.push(row);
                }
            }
        }
        let start = model
            .start_distribution()
            .into_iter()
            .map(|(p, s)| {
                let q = if delayed {
                    dfa.initial()
                } else {
                    dfa.step(dfa.initial(), letters[s])
                };
                (p, s * num_q + q)
            })
            .collect();
        ProductMdp {
            num_s,
            num_q,
            num_actions,
            terminal,
            accepting,
            outcomes,
            start,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_s * self.num_q
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn num_automaton_states(&self) -> usize {
        self.num_q
    }

    pub fn index(&self, s: usize, q: usize) -> usize {
        s * self.num_q + q
    }

    pub fn is_terminal(&self, x: usize) -> bool {
        self.terminal[x]
    }

    pub fn is_accepting(&self, x: usize) -> bool {
        self.accepting[x]
    }

    pub fn outcomes(&self, x: usize, a: usize) -> &[Outcome] {
        &self.outcomes[x * self.num_actions + a]
    }

    /// Product start distribution after the automaton has consumed the
    /// initial labels.
    pub fn start(&self) -> &[(f64, usize)] {
        &self.start
    }

    fn q_value(&self, x: usize, a: usize, v: &[f64], gamma: f64) -> f64 {
        self.outcomes(x, a)
            .iter()
            .map(|o| o.prob * (o.reward + gamma * v[o.next]))
            .sum()
    }

    /// Greedy policy with respect to `v`; ties within `tol` go to the
    /// lowest action index.
    pub fn greedy(&self, v: &[f64], gamma: f64, tol: f64) -> Vec<usize> {
        (0..self.num_states())
            .map(|x| {
                if self.terminal[x] {
                    return 0;
                }
                let qs: Vec<f64> = (0..self.num_actions).map(|a| self.q_value(x, a, v, gamma)).collect();
                let best = qs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                qs.iter().position(|&q| q >= best - tol).unwrap_or(0)
            })
            .collect()
    }

    /// Probability of eventually reaching an accepting product state from
    /// each state under `policy`.
    pub fn success_probabilities(&self, policy: &[usize]) -> Vec<f64> {
        let n = self.num_states();
        let mut p: Vec<f64> = (0..n).map(|x| if self.accepting[x] { 1.0 } else { 0.0 }).collect();
        for _ in 0..1_000_000 {
            let mut delta = 0.0f64;
            for x in 0..n {
                if self.terminal[x] {
                    continue;
                }
                let nv: f64 = self.outcomes(x, policy[x]).iter().map(|o| o.prob * p[o.next]).sum();
                delta = delta.max((nv - p[x]).abs());
                p[x] = nv;
            }
            if delta < 1e-13 {
                break;
            }
        }
        p
    }

    /// Success probability averaged over the start distribution.
    pub fn success_probability(&self, policy: &[usize]) -> f64 {
        let p = self.success_probabilities(policy);
        self.start.iter().map(|&(w, x)| w * p[x]).sum()
    }

    /// Maximal probability of reaching an accepting state, per state.
    pub fn optimal_success_probabilities(&self) -> Vec<f64> {
        let n = self.num_states();
        let mut p: Vec<f64> = (0..n).map(|x| if self.accepting[x] { 1.0 } else { 0.0 }).collect();
        for _ in 0..1_000_000 {
            let mut delta = 0.0f64;
            for x in 0..n {
                if self.terminal[x] {
                    continue;
                }
                let nv = (0..self.num_actions)
                    .map(|a| self.outcomes(x, a).iter().map(|o| o.prob * p[o.next]).sum::<f64>())
                    .fold(0.0, f64::max);
                delta = delta.max((nv - p[x]).abs());
                p[x] = nv;
            }
            if delta < 1e-13 {
                break;
            }
        }
        p
    }
}

/// Optimal values and a greedy policy.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueIteration {
    pub values: Vec<f64>,
    pub policy: Vec<usize>,
    pub sweeps: usize,
}

pub const MAX_SWEEPS: usize = 100_000;

/// In-place value iteration until the sup-norm change drops below `tol`.
pub fn value_iteration(mdp: &ProductMdp, gamma: f64, tol: f64) -> Result<ValueIteration, TabularError> {
    let n = mdp.num_states();
    let mut v = vec![0.0; n];
    for sweep in 1..=MAX_SWEEPS {
        let mut delta = 0.0f64;
        for x in 0..n {
            if mdp.terminal[x] {
                continue;
            }
            let nv = (0..mdp.num_actions)
                .map(|a| mdp.q_value(x, a, &v, gamma))
                .fold(f64::NEG_INFINITY, f64::max);
            if !nv.is_finite() {
                return Err(TabularError::NonFinite(x));
            }
            delta = delta.max((nv - v[x]).abs());
            v[x] = nv;
        }
        if delta < tol {
            let policy = mdp.greedy(&v, gamma, tol.max(1e-9) * 10.0);
            return Ok(ValueIteration {
                values: v,
                policy,
                sweeps: sweep,
            });
        }
    }
    Err(TabularError::NotConverged(MAX_SWEEPS))
}
