//! Continuous 2-D world of bouncing coloured balls; a proposition holds
//! on the step the agent touches a ball of that colour. A touched ball
//! reappears elsewhere unless `respawn_on_touch` is off, in which case the
//! proposition holds for as long as the contact lasts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Action, ActionSpace, BaseStep, Environment, SimRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub color: String,
}

fn default_radius() -> f64 {
    0.5
}
fn default_agent_speed() -> f64 {
    3.5
}
fn default_ball_speed() -> f64 {
    2.0
}
fn default_dt() -> f64 {
    0.1
}
fn default_accel() -> f64 {
    10.0
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WaterworldConfig {
    /// Side length of the square world.
    pub boundary: f64,
    pub balls: Vec<Ball>,
    pub agent_start: [f64; 2],
    #[serde(default = "default_radius")]
    pub ball_radius: f64,
    #[serde(default = "default_radius")]
    pub agent_radius: f64,
    #[serde(default = "default_agent_speed")]
    pub agent_max_speed: f64,
    #[serde(default = "default_ball_speed")]
    pub ball_max_speed: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Acceleration magnitude cap; `max_accel * dt` bounds the per-step
    /// velocity change.
    #[serde(default = "default_accel")]
    pub max_accel: f64,
    /// Nine accelerations (none plus eight compass directions) instead of
    /// a continuous 2-vector.
    #[serde(default)]
    pub discrete_actions: bool,
    /// Move a touched ball to a random spot away from the agent, with a
    /// fresh random velocity.
    #[serde(default = "default_true")]
    pub respawn_on_touch: bool,
}

impl WaterworldConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.boundary.is_nan() || self.boundary <= 2.0 * self.agent_radius.max(self.ball_radius) {
            return Err("boundary too small".into());
        }
        let inside = |p: [f64; 2], r: f64| p.iter().all(|&c| c >= r && c <= self.boundary - r);
        if !inside(self.agent_start, self.agent_radius) {
            return Err("agent starts outside the boundary".into());
        }
        for (i, b) in self.balls.iter().enumerate() {
            if !inside(b.position, self.ball_radius) {
                return Err(format!("ball {i} starts outside the boundary"));
            }
            if b.velocity.iter().any(|v| v.abs() > self.ball_max_speed) {
                return Err(format!("ball {i} is faster than {}", self.ball_max_speed));
            }
            if !crate::ltlf::is_valid_name(&b.color) {
                return Err(format!("invalid colour name '{}'", b.color));
            }
        }
        if !(self.dt > 0.0 && self.max_accel >= 0.0 && self.agent_max_speed > 0.0) {
            return Err("dt, acceleration and speed must be positive".into());
        }
        Ok(())
    }

    /// Random map: agent at the centre, one ball per entry of `colors`,
    /// positions and velocity components uniform, resampled until no ball
    /// touches the agent.
    pub fn random(boundary: f64, colors: &[&str], rng: &mut impl Rng) -> Self {
        let mut cfg = WaterworldConfig {
            boundary,
            balls: Vec::new(),
            agent_start: [boundary / 2.0; 2],
            ball_radius: default_radius(),
            agent_radius: default_radius(),
            agent_max_speed: default_agent_speed(),
            ball_max_speed: default_ball_speed(),
            dt: default_dt(),
            max_accel: default_accel(),
            discrete_actions: false,
            respawn_on_touch: true,
        };
        let touch = cfg.agent_radius + cfg.ball_radius;
        for c in colors {
            let r = cfg.ball_radius;
            let position = loop {
                let p = [rng.random_range(r..boundary - r), rng.random_range(r..boundary - r)];
                if dist(p, cfg.agent_start) > touch {
                    break p;
                }
            };
            let v = cfg.ball_max_speed;
            cfg.balls.push(Ball {
                position,
                velocity: [rng.random_range(-v..=v), rng.random_range(-v..=v)],
                color: c.to_string(),
            });
        }
        cfg
    }

    /// 10x10 map with one red, one blue and one green ball and discrete
    /// actions.
    pub fn small(rng: &mut impl Rng) -> Self {
        WaterworldConfig {
            discrete_actions: true,
            ..WaterworldConfig::random(10.0, &["r", "b", "g"], rng)
        }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Unit directions of the eight compass accelerations, after the null one.
fn compass(a: usize) -> [f64; 2] {
    if a == 0 {
        return [0.0, 0.0];
    }
    let angle = (a - 1) as f64 * std::f64::consts::FRAC_PI_4;
    [angle.cos(), angle.sin()]
}

#[derive(Debug, Clone)]
pub struct Waterworld {
    cfg: WaterworldConfig,
    props: Vec<String>,
    ball_bits: Vec<u64>,
    agent: [f64; 2],
    velocity: [f64; 2],
    balls: Vec<([f64; 2], [f64; 2])>,
    touched: u64,
}

impl Waterworld {
    pub fn new(cfg: WaterworldConfig) -> Result<Self, String> {
        cfg.validate()?;
        let mut props: Vec<String> = cfg.balls.iter().map(|b| b.color.clone()).collect();
        props.sort();
        props.dedup();
        let ball_bits = cfg
            .balls
            .iter()
            .map(|b| 1u64 << props.iter().position(|p| *p == b.color).unwrap())
            .collect();
        let mut w = Waterworld {
            props,
            ball_bits,
            agent: cfg.agent_start,
            velocity: [0.0; 2],
            balls: Vec::new(),
            touched: 0,
            cfg,
        };
        w.restore();
        Ok(w)
    }

    fn restore(&mut self) {
        self.agent = self.cfg.agent_start;
        self.velocity = [0.0; 2];
        self.balls = self.cfg.balls.iter().map(|b| (b.position, b.velocity)).collect();
        self.touched = self.contacts();
    }

    fn touching(&self, p: [f64; 2]) -> bool {
        dist(p, self.agent) <= self.cfg.agent_radius + self.cfg.ball_radius
    }

    fn contacts(&self) -> u64 {
        self.balls
            .iter()
            .zip(&self.ball_bits)
            .filter(|((p, _), _)| self.touching(*p))
            .fold(0, |acc, (_, b)| acc | b)
    }

    fn respawn(&mut self, i: usize, rng: &mut SimRng) {
        let (r, b, v) = (self.cfg.ball_radius, self.cfg.boundary, self.cfg.ball_max_speed);
        let position = loop {
            let p = [rng.random_range(r..b - r), rng.random_range(r..b - r)];
            if !self.touching(p) {
                break p;
            }
        };
        self.balls[i] = (position, [rng.random_range(-v..=v), rng.random_range(-v..=v)]);
    }

    pub fn config(&self) -> &WaterworldConfig {
        &self.cfg
    }

    pub fn agent(&self) -> ([f64; 2], [f64; 2]) {
        (self.agent, self.velocity)
    }

    pub fn balls(&self) -> &[([f64; 2], [f64; 2])] {
        &self.balls
    }

    /// Places the agent directly, for tests and scripted scenarios.
    pub fn set_agent(&mut self, position: [f64; 2], velocity: [f64; 2]) {
        self.agent = position;
        self.velocity = velocity;
        self.touched = self.contacts();
    }

    pub fn set_ball(&mut self, i: usize, position: [f64; 2], velocity: [f64; 2]) {
        self.balls[i] = (position, velocity);
        self.touched = self.contacts();
    }

    fn observe(&self) -> Vec<f64> {
        let b = self.cfg.boundary;
        let vs = self.cfg.agent_max_speed;
        let bs = self.cfg.ball_max_speed;
        let mut o = vec![self.agent[0] / b, self.agent[1] / b, self.velocity[0] / vs, self.velocity[1] / vs];
        for (p, v) in &self.balls {
            o.extend([(p[0] - self.agent[0]) / b, (p[1] - self.agent[1]) / b, v[0] / bs, v[1] / bs]);
        }
        o
    }

    fn acceleration(&self, action: &Action) -> [f64; 2] {
        let m = self.cfg.max_accel;
        match action {
            Action::Discrete(a) if self.cfg.discrete_actions && *a < 9 => {
                let d = compass(*a);
                [d[0] * m, d[1] * m]
            }
            Action::Continuous(v) if !self.cfg.discrete_actions && v.len() == 2 => {
                assert!(v.iter().all(|x| x.is_finite()), "non-finite action");
                let a = [v[0] * m, v[1] * m];
                let n = (a[0] * a[0] + a[1] * a[1]).sqrt();
                if n > m {
                    [a[0] * m / n, a[1] * m / n]
                } else {
                    a
                }
            }
            other => panic!("action {other:?} does not fit this waterworld"),
        }
    }
}

impl Environment for Waterworld {
    fn name(&self) -> &str {
        "waterworld"
    }

    fn observation_dim(&self) -> usize {
        4 + 4 * self.balls.len()
    }

    fn action_space(&self) -> ActionSpace {
        if self.cfg.discrete_actions {
            ActionSpace::Discrete(9)
        } else {
            ActionSpace::Continuous { dim: 2, high: 1.0 }
        }
    }

    fn propositions(&self) -> Vec<String> {
        self.props.clone()
    }

    fn reset(&mut self, _rng: &mut SimRng) -> Vec<f64> {
        self.restore();
        self.observe()
    }

    fn step(&mut self, action: &Action, rng: &mut SimRng) -> BaseStep {
        let dt = self.cfg.dt;
        let acc = self.acceleration(action);
        for d in 0..2 {
            self.velocity[d] += acc[d] * dt;
        }
        let speed = (self.velocity[0].powi(2) + self.velocity[1].powi(2)).sqrt();
        if speed > self.cfg.agent_max_speed {
            let k = self.cfg.agent_max_speed / speed;
            self.velocity = [self.velocity[0] * k, self.velocity[1] * k];
        }
        let (lo, hi) = (self.cfg.agent_radius, self.cfg.boundary - self.cfg.agent_radius);
        for d in 0..2 {
            self.agent[d] += self.velocity[d] * dt;
            if self.agent[d] < lo {
                self.agent[d] = lo;
                self.velocity[d] = self.velocity[d].max(0.0);
            } else if self.agent[d] > hi {
                self.agent[d] = hi;
                self.velocity[d] = self.velocity[d].min(0.0);
            }
        }
        let (lo, hi) = (self.cfg.ball_radius, self.cfg.boundary - self.cfg.ball_radius);
        for (p, v) in &mut self.balls {
            for d in 0..2 {
                p[d] += v[d] * dt;
                if p[d] < lo {
                    p[d] = 2.0 * lo - p[d];
                    v[d] = -v[d];
                } else if p[d] > hi {
                    p[d] = 2.0 * hi - p[d];
                    v[d] = -v[d];
                }
            }
        }
        self.touched = self.contacts();
        if self.cfg.respawn_on_touch {
            for i in 0..self.balls.len() {
                if self.touching(self.balls[i].0) {
                    self.respawn(i, rng);
                }
            }
        }
        BaseStep {
            observation: self.observe(),
            reward: 0.0,
            terminated: false,
        }
    }

    fn label_bits(&self) -> u64 {
        self.touched
    }
}
