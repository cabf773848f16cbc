//! Deep Q-learning for discrete actions with a Polyak-averaged target.

use rand::Rng;

use super::agent::{argmax, linear_schedule, Agent, LearnerContext, NamedTensor, PolicyArtifact};
use super::mlp::{Mlp, OutputActivation};
use super::optim::Sgd;
use super::LearnError;
use crate::env::{Action, ActionSpace, SimRng};
use crate::product::ProductObservation;
use crate::replay::Experience;

#[derive(Debug, Clone)]
pub struct Dqn {
    online: Mlp,
    target: Mlp,
    opt: Sgd,
    num_actions: usize,
    gamma: f64,
    tau: f64,
    eps: (f64, f64, f64),
    epsilon: f64,
    grad: Vec<f64>,
}

impl Dqn {
    pub fn from_context(ctx: &LearnerContext, rng: &mut SimRng) -> Result<Self, LearnError> {
        let ActionSpace::Discrete(n) = ctx.action_space else {
            return Err(LearnError::Incompatible("dqn needs discrete actions"));
        };
        let c = ctx.config;
        let mut sizes = vec![ctx.feature_dim];
        sizes.extend(&c.hidden);
        sizes.push(n);
        let online = Mlp::new(&sizes, OutputActivation::Identity, rng);
        let np = online.num_params();
        Ok(Dqn {
            target: online.clone(),
            opt: Sgd::new(np, c.learning_rate, c.momentum, c.grad_clip),
            online,
            num_actions: n,
            gamma: c.gamma,
            tau: c.polyak_tau,
            eps: (c.epsilon_start, c.epsilon_end, c.epsilon_fraction),
            epsilon: c.epsilon_start,
            grad: vec![0.0; np],
        })
    }

    pub fn q_values(&self, features: &[f64]) -> Vec<f64> {
        self.online.forward(features).expect("feature size fixed at construction")
    }

    pub fn network(&self) -> &Mlp {
        &self.online
    }
}

impl Agent for Dqn {
    fn name(&self) -> &'static str {
        "dqn"
    }

    fn act(&mut self, obs: &ProductObservation, explore: bool, rng: &mut SimRng) -> Action {
        if explore && rng.random::<f64>() < self.epsilon {
            return Action::Discrete(rng.random_range(0..self.num_actions));
        }
        Action::Discrete(argmax(&self.q_values(&obs.features())))
    }

    fn update(&mut self, batch: &[&Experience], weights: &[f64], _rng: &mut SimRng) -> Vec<f64> {
        self.grad.iter_mut().for_each(|g| *g = 0.0);
        let scale = 1.0 / batch.len().max(1) as f64;
        let mut tds = Vec::with_capacity(batch.len());
        for (e, w) in batch.iter().zip(weights) {
            let Action::Discrete(a) = e.action else {
                panic!("dqn stores discrete actions only")
            };
            let next = if e.terminated {
                0.0
            } else {
                let q = self.target.forward(&e.next_state.features()).unwrap();
                q.into_iter().fold(f64::NEG_INFINITY, f64::max)
            };
            let y = e.reward + self.gamma * next;
            let cache = self.online.forward_cached(&e.state.features()).unwrap();
            let td = y - cache.output()[a];
            let mut up = vec![0.0; self.num_actions];
            up[a] = -w * td * scale;
            self.online.backward(&cache, &up, &mut self.grad);
            tds.push(td);
        }
        self.opt.step(self.online.params_mut(), &self.grad);
        self.target.soft_update(&self.online, self.tau);
        tds
    }

    fn set_progress(&mut self, fraction: f64) {
        self.epsilon = linear_schedule(self.eps.0, self.eps.1, self.eps.2, fraction);
    }

    fn export(&self) -> PolicyArtifact {
        PolicyArtifact {
            learner: self.name().into(),
            tensors: vec![NamedTensor {
                name: "q".into(),
                shape: self.online.sizes().to_vec(),
                values: self.online.params().to_vec(),
            }],
        }
    }
}
