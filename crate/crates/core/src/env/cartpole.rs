//! Cart-pole balancing on a track divided into coloured regions `g1..gk`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Action, ActionSpace, BaseStep, Environment, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct CartpoleRegionsConfig {
    pub track_half_width: f64,
    pub regions: usize,
    pub region_width: f64,
    pub angle_limit: f64,
    pub termination_penalty: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    /// Half the pole length.
    pub pole_half_length: f64,
    pub gravity: f64,
    pub force_mag: f64,
    pub dt: f64,
    /// Push left or right with full force instead of a continuous force.
    pub discrete_actions: bool,
}

impl Default for CartpoleRegionsConfig {
    fn default() -> Self {
        CartpoleRegionsConfig {
            track_half_width: 3.5,
            regions: 7,
            region_width: 1.0,
            angle_limit: 0.21,
            termination_penalty: -10.0,
            cart_mass: 1.0,
            pole_mass: 0.1,
            pole_half_length: 0.25,
            gravity: 9.8,
            force_mag: 10.0,
            dt: 0.02,
            discrete_actions: false,
        }
    }
}

impl CartpoleRegionsConfig {
    pub fn with_regions(k: usize) -> Self {
        CartpoleRegionsConfig {
            regions: k,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.regions == 0 || self.regions > 32 {
            return Err("between 1 and 32 regions".into());
        }
        if self.regions as f64 * self.region_width > 2.0 * self.track_half_width + 1e-12 {
            return Err("regions do not fit on the track".into());
        }
        if !(self.dt > 0.0 && self.cart_mass > 0.0 && self.pole_mass > 0.0 && self.pole_half_length > 0.0) {
            return Err("physical constants must be positive".into());
        }
        Ok(())
    }

    /// Interval `(lo, hi]` of region `k` (0-based), centred on the track.
    pub fn region(&self, k: usize) -> (f64, f64) {
        let lo = -(self.regions as f64) * self.region_width / 2.0 + k as f64 * self.region_width;
        (lo, lo + self.region_width)
    }

    /// Index of the region containing `x`, if any.
    pub fn region_of(&self, x: f64) -> Option<usize> {
        (0..self.regions).find(|&k| {
            let (lo, hi) = self.region(k);
            x > lo && x <= hi
        })
    }
}

/// `[x, x_dot, theta, theta_dot]`.
pub type CartState = [f64; 4];

#[derive(Debug, Clone)]
pub struct CartpoleRegions {
    cfg: CartpoleRegionsConfig,
    state: CartState,
    props: Vec<String>,
}

impl CartpoleRegions {
    pub fn new(cfg: CartpoleRegionsConfig) -> Result<Self, String> {
        cfg.validate()?;
        // Names sort lexicographically, so g10 would precede g2; bits are
        // assigned by region order and looked up by name in the product.
        let props = (1..=cfg.regions).map(|k| format!("g{k}")).collect();
        Ok(CartpoleRegions {
            cfg,
            state: [0.0; 4],
            props,
        })
    }

    pub fn config(&self) -> &CartpoleRegionsConfig {
        &self.cfg
    }

    pub fn state(&self) -> CartState {
        self.state
    }

    pub fn set_state(&mut self, s: CartState) {
        self.state = s;
    }

    fn failed(&self) -> bool {
        self.state[2].abs() > self.cfg.angle_limit || self.state[0].abs() > self.cfg.track_half_width
    }

    fn observe(&self) -> Vec<f64> {
        let [x, xd, th, thd] = self.state;
        vec![x / self.cfg.track_half_width, xd / 3.0, th / self.cfg.angle_limit, thd / 3.0]
    }

    /// Semi-implicit Euler step under horizontal force `force`.
    pub fn integrate(&mut self, force: f64) {
        let c = &self.cfg;
        let [mut x, mut xd, mut th, mut thd] = self.state;
        let total = c.cart_mass + c.pole_mass;
        let pml = c.pole_mass * c.pole_half_length;
        let (sin, cos) = th.sin_cos();
        let temp = (force + pml * thd * thd * sin) / total;
        let th_acc = (c.gravity * sin - cos * temp) / (c.pole_half_length * (4.0 / 3.0 - c.pole_mass * cos * cos / total));
        let x_acc = temp - pml * th_acc * cos / total;
        xd += c.dt * x_acc;
        x += c.dt * xd;
        thd += c.dt * th_acc;
        th += c.dt * thd;
        self.state = [x, xd, th, thd];
    }
}

impl Environment for CartpoleRegions {
    fn name(&self) -> &str {
        "cartpole"
    }

    fn observation_dim(&self) -> usize {
        4
    }

    fn action_space(&self) -> ActionSpace {
        if self.cfg.discrete_actions {
            ActionSpace::Discrete(2)
        } else {
            ActionSpace::Continuous { dim: 1, high: 1.0 }
        }
    }

    fn propositions(&self) -> Vec<String> {
        self.props.clone()
    }

    fn reset(&mut self, rng: &mut SimRng) -> Vec<f64> {
        for v in &mut self.state {
            *v = rng.random_range(-0.05..0.05);
        }
        self.observe()
    }

    fn step(&mut self, action: &Action, _rng: &mut SimRng) -> BaseStep {
        let u = match action {
            Action::Discrete(a) if self.cfg.discrete_actions && *a < 2 => {
                if *a == 0 {
                    -1.0
                } else {
                    1.0
                }
            }
            Action::Continuous(v) if !self.cfg.discrete_actions && v.len() == 1 && v[0].is_finite() => v[0].clamp(-1.0, 1.0),
            other => panic!("action {other:?} does not fit this cartpole"),
        };
        self.integrate(u * self.cfg.force_mag);
        let terminated = self.failed();
        BaseStep {
            observation: self.observe(),
            reward: if terminated { self.cfg.termination_penalty } else { 0.0 },
            terminated,
        }
    }

    fn label_bits(&self) -> u64 {
        self.cfg.region_of(self.state[0]).map_or(0, |k| 1 << k)
    }
}
