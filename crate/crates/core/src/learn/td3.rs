//! Twin-critic deterministic actor-critic for continuous actions.

use rand_distr::{Distribution, Normal};

use super::agent::{Agent, LearnerContext, NamedTensor, PolicyArtifact};
use super::mlp::{Mlp, OutputActivation};
use super::optim::Sgd;
use super::LearnError;
use crate::env::{Action, ActionSpace, SimRng};
use crate::product::ProductObservation;
use crate::replay::Experience;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Td3Params {
    pub gamma: f64,
    pub tau: f64,
    pub policy_delay: usize,
    pub target_noise: f64,
    pub target_noise_clip: f64,
    pub exploration_std: f64,
}

#[derive(Debug, Clone)]
pub struct Td3 {
    pub actor: Mlp,
    pub critics: [Mlp; 2],
    pub actor_target: Mlp,
    pub critic_targets: [Mlp; 2],
    actor_opt: Sgd,
    critic_opts: [Sgd; 2],
    dim: usize,
    high: f64,
    params: Td3Params,
    updates: usize,
}

impl Td3 {
    pub fn from_context(ctx: &LearnerContext, rng: &mut SimRng) -> Result<Self, LearnError> {
        let ActionSpace::Continuous { dim, high } = ctx.action_space else {
            return Err(LearnError::Incompatible("td3 needs continuous actions"));
        };
        let c = ctx.config;
        let mut a_sizes = vec![ctx.feature_dim];
        a_sizes.extend(&c.hidden);
        a_sizes.push(dim);
        let mut c_sizes = vec![ctx.feature_dim + dim];
        c_sizes.extend(&c.hidden);
        c_sizes.push(1);
        let actor = Mlp::new(&a_sizes, OutputActivation::Tanh, rng);
        let critics = [
            Mlp::new(&c_sizes, OutputActivation::Identity, rng),
            Mlp::new(&c_sizes, OutputActivation::Identity, rng),
        ];
        let params = Td3Params {
            gamma: c.gamma,
            tau: c.polyak_tau,
            policy_delay: 2,
            target_noise: 0.2,
            target_noise_clip: 0.5,
            exploration_std: c.exploration_noise_std,
        };
        Ok(Td3::new(actor, critics, high, params, c.learning_rate, c.momentum, c.grad_clip))
    }

    pub fn new(actor: Mlp, critics: [Mlp; 2], high: f64, params: Td3Params, lr: f64, momentum: f64, clip: Option<f64>) -> Self {
        Td3 {
            actor_opt: Sgd::new(actor.num_params(), lr, momentum, clip),
            critic_opts: [
                Sgd::new(critics[0].num_params(), lr, momentum, clip),
                Sgd::new(critics[1].num_params(), lr, momentum, clip),
            ],
            dim: actor.output_dim(),
            actor_target: actor.clone(),
            critic_targets: critics.clone(),
            actor,
            critics,
            high,
            params,
            updates: 0,
        }
    }

    /// Actor output in `[-1, 1]^dim`.
    pub fn policy(&self, features: &[f64]) -> Vec<f64> {
        self.actor.forward(features).expect("feature size fixed at construction")
    }

    fn critic_input(features: &[f64], action: &[f64]) -> Vec<f64> {
        let mut x = features.to_vec();
        x.extend_from_slice(action);
        x
    }

    fn normalized(&self, a: &Action) -> Vec<f64> {
        match a {
            Action::Continuous(v) => v.iter().map(|x| x / self.high).collect(),
            Action::Discrete(_) => panic!("td3 stores continuous actions only"),
        }
    }

    /// Twin-critic regression targets for `batch`.
    pub fn targets(&self, batch: &[&Experience], rng: &mut SimRng) -> Vec<f64> {
        let noise = Normal::new(0.0, self.params.target_noise).unwrap();
        let clip = self.params.target_noise_clip;
        batch
            .iter()
            .map(|e| {
                if e.terminated {
                    return e.reward;
                }
                let f = e.next_state.features();
                let a: Vec<f64> = self
                    .actor_target
                    .forward(&f)
                    .unwrap()
                    .into_iter()
                    .map(|x| (x + noise.sample(rng).clamp(-clip, clip)).clamp(-1.0, 1.0))
                    .collect();
                let x = Td3::critic_input(&f, &a);
                let q1 = self.critic_targets[0].forward(&x).unwrap()[0];
                let q2 = self.critic_targets[1].forward(&x).unwrap()[0];
                e.reward + self.params.gamma * q1.min(q2)
            })
            .collect()
    }

    /// Gradient of the weighted mean squared critic loss for critic `k`.
    pub fn critic_gradient(&self, k: usize, batch: &[&Experience], weights: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut grad = vec![0.0; self.critics[k].num_params()];
        let scale = 1.0 / batch.len().max(1) as f64;
        let mut tds = Vec::with_capacity(batch.len());
        for ((e, w), yi) in batch.iter().zip(weights).zip(y) {
            let x = Td3::critic_input(&e.state.features(), &self.normalized(&e.action));
            let cache = self.critics[k].forward_cached(&x).unwrap();
            let td = yi - cache.output()[0];
            self.critics[k].backward(&cache, &[-w * td * scale], &mut grad);
            tds.push(td);
        }
        (grad, tds)
    }

    /// Weighted mean squared critic loss, for finite-difference checks.
    pub fn critic_loss(critic: &Mlp, batch: &[&Experience], weights: &[f64], y: &[f64], high: f64) -> f64 {
        let scale = 1.0 / batch.len().max(1) as f64;
        batch
            .iter()
            .zip(weights)
            .zip(y)
            .map(|((e, w), yi)| {
                let a: Vec<f64> = match &e.action {
                    Action::Continuous(v) => v.iter().map(|x| x / high).collect(),
                    Action::Discrete(_) => unreachable!(),
                };
                let q = critic.forward(&Td3::critic_input(&e.state.features(), &a)).unwrap()[0];
                0.5 * w * (yi - q).powi(2) * scale
            })
            .sum()
    }

    fn actor_step(&mut self, batch: &[&Experience]) {
        let mut grad = vec![0.0; self.actor.num_params()];
        let scale = 1.0 / batch.len().max(1) as f64;
        let fdim = self.actor.input_dim();
        for e in batch {
            let f = e.state.features();
            let ac = self.actor.forward_cached(&f).unwrap();
            let x = Td3::critic_input(&f, ac.output());
            let cc = self.critics[0].forward_cached(&x).unwrap();
            let mut dummy = vec![0.0; self.critics[0].num_params()];
            // Ascend Q: the loss is -Q.
            let gin = self.critics[0].backward(&cc, &[-scale], &mut dummy);
            self.actor.backward(&ac, &gin[fdim..], &mut grad);
        }
        self.actor_opt.step(self.actor.params_mut(), &grad);
    }

    pub fn sync_targets(&mut self) {
        let tau = self.params.tau;
        self.actor_target.soft_update(&self.actor, tau);
        for k in 0..2 {
            self.critic_targets[k].soft_update(&self.critics[k], tau);
        }
    }
}

impl Agent for Td3 {
    fn name(&self) -> &'static str {
        "td3"
    }

    fn act(&mut self, obs: &ProductObservation, explore: bool, rng: &mut SimRng) -> Action {
        let mut a = self.policy(&obs.features());
        if explore && self.params.exploration_std > 0.0 {
            let n = Normal::new(0.0, self.params.exploration_std).unwrap();
            for x in &mut a {
                *x += n.sample(rng);
            }
        }
        Action::Continuous(a.into_iter().map(|x| x.clamp(-1.0, 1.0) * self.high).collect())
    }

    fn update(&mut self, batch: &[&Experience], weights: &[f64], rng: &mut SimRng) -> Vec<f64> {
        let y = self.targets(batch, rng);
        let (g0, tds) = self.critic_gradient(0, batch, weights, &y);
        let (g1, _) = self.critic_gradient(1, batch, weights, &y);
        self.critic_opts[0].step(self.critics[0].params_mut(), &g0);
        self.critic_opts[1].step(self.critics[1].params_mut(), &g1);
        self.updates += 1;
        if self.updates.is_multiple_of(self.params.policy_delay) {
            self.actor_step(batch);
            self.sync_targets();
        }
        tds
    }

    fn export(&self) -> PolicyArtifact {
        let t = |name: &str, m: &Mlp| NamedTensor {
            name: name.into(),
            shape: m.sizes().to_vec(),
            values: m.params().to_vec(),
        };
        PolicyArtifact {
            learner: self.name().into(),
            tensors: vec![t("actor", &self.actor), t("critic1", &self.critics[0]), t("critic2", &self.critics[1])],
        }
    }
}

impl Td3 {
    pub fn action_dim(&self) -> usize {
        self.dim
    }
}
