use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Action, ActionSpace, BaseStep, Environment, SimRng, TabularModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredCell {
    pub x: usize,
    pub y: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridworldConfig {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<ColoredCell>,
    /// Fixed start cell; uniform over uncoloured cells when absent.
    #[serde(default)]
    pub start: Option<(usize, usize)>,
    /// Probability that a move is replaced by one of the other three.
    #[serde(default)]
    pub slip: f64,
}

impl GridworldConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.width == 0 || self.height == 0 {
            return Err("grid must be non-empty".into());
        }
        for c in &self.cells {
            if c.x >= self.width || c.y >= self.height {
                return Err(format!("cell ({}, {}) outside {}x{} grid", c.x, c.y, self.width, self.height));
            }
        }
        if let Some((x, y)) = self.start {
            if x >= self.width || y >= self.height {
                return Err("start outside grid".into());
            }
        }
        if !(0.0..=1.0).contains(&self.slip) {
            return Err("slip must be a probability".into());
        }
        Ok(())
    }

    /// 7x7 grid with two red and two green cells.
    pub fn red_green_7x7() -> Self {
        let cell = |x, y, l: &str| ColoredCell { x, y, label: l.into() };
        GridworldConfig {
            width: 7,
            height: 7,
            cells: vec![
                cell(1, 1, "r"),
                cell(5, 5, "r"),
                cell(5, 1, "g"),
                cell(1, 5, "g"),
            ],
            start: None,
            slip: 0.0,
        }
    }

    /// 7x7 grid with one red, one blue and one green cell in three corners.
    pub fn red_blue_green_7x7() -> Self {
        let cell = |x, y, l: &str| ColoredCell { x, y, label: l.into() };
        GridworldConfig {
            width: 7,
            height: 7,
            cells: vec![cell(0, 6, "r"), cell(6, 6, "b"), cell(6, 0, "g")],
            start: None,
            slip: 0.0,
        }
    }
}

const MOVES: [(isize, isize); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

/// Deterministic or slippery 4-action grid with coloured cells.
#[derive(Debug, Clone)]
pub struct Gridworld {
    cfg: GridworldConfig,
    props: Vec<String>,
    cell_bits: Vec<u64>,
    pos: usize,
}

impl Gridworld {
    pub fn new(cfg: GridworldConfig) -> Result<Self, String> {
        cfg.validate()?;
        let mut props: Vec<String> = cfg.cells.iter().map(|c| c.label.clone()).collect();
        props.sort();
        props.dedup();
        let mut cell_bits = vec![0u64; cfg.width * cfg.height];
        for c in &cfg.cells {
            let bit = props.iter().position(|p| *p == c.label).unwrap();
            cell_bits[c.y * cfg.width + c.x] |= 1 << bit;
        }
        let pos = cfg.start.map(|(x, y)| y * cfg.width + x).unwrap_or(0);
        Ok(Gridworld {
            cfg,
            props,
            cell_bits,
            pos,
        })
    }

    pub fn config(&self) -> &GridworldConfig {
        &self.cfg
    }

    pub fn position(&self) -> (usize, usize) {
        (self.pos % self.cfg.width, self.pos / self.cfg.width)
    }

    pub fn set_position(&mut self, s: usize) {
        self.pos = s;
    }

    fn moved(&self, s: usize, a: usize) -> usize {
        let (w, h) = (self.cfg.width as isize, self.cfg.height as isize);
        let (x, y) = ((s % self.cfg.width) as isize, (s / self.cfg.width) as isize);
        let (dx, dy) = MOVES[a];
        let (nx, ny) = (x + dx, y + dy);
        if nx < 0 || ny < 0 || nx >= w || ny >= h {
            s
        } else {
            (ny * w + nx) as usize
        }
    }

    fn features(&self) -> Vec<f64> {
        let (x, y) = self.position();
        let sx = (self.cfg.width.max(2) - 1) as f64;
        let sy = (self.cfg.height.max(2) - 1) as f64;
        vec![x as f64 / sx, y as f64 / sy]
    }
}

impl TabularModel for Gridworld {
    fn num_states(&self) -> usize {
        self.cfg.width * self.cfg.height
    }

    fn num_actions(&self) -> usize {
        4
    }

    fn transitions(&self, s: usize, a: usize) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        let mut add = |p: f64, t: usize| {
            if p <= 0.0 {
                return;
            }
            match out.iter_mut().find(|(_, u)| *u == t) {
                Some(e) => e.0 += p,
                None => out.push((p, t)),
            }
        };
        add(1.0 - self.cfg.slip, self.moved(s, a));
        for other in (0..4).filter(|&b| b != a) {
            add(self.cfg.slip / 3.0, self.moved(s, other));
        }
        out
    }

    fn label_bits_of(&self, s: usize) -> u64 {
        self.cell_bits[s]
    }

    fn start_distribution(&self) -> Vec<(f64, usize)> {
        match self.cfg.start {
            Some((x, y)) => vec![(1.0, y * self.cfg.width + x)],
            None => {
                let free: Vec<usize> = (0..self.num_states()).filter(|&s| self.cell_bits[s] == 0).collect();
                let p = 1.0 / free.len() as f64;
                free.into_iter().map(|s| (p, s)).collect()
            }
        }
    }

    fn proposition_names(&self) -> Vec<String> {
        self.props.clone()
    }
}

impl Environment for Gridworld {
    fn name(&self) -> &str {
        "gridworld"
    }

    fn observation_dim(&self) -> usize {
        2
    }

    fn action_space(&self) -> ActionSpace {
        ActionSpace::Discrete(4)
    }

    fn propositions(&self) -> Vec<String> {
        self.props.clone()
    }

    fn reset(&mut self, rng: &mut SimRng) -> Vec<f64> {
        let starts = self.start_distribution();
        self.pos = if starts.len() == 1 {
            starts[0].1
        } else {
            starts[rng.random_range(0..starts.len())].1
        };
        self.features()
    }

    fn step(&mut self, action: &Action, rng: &mut SimRng) -> BaseStep {
        let a = match action {
            Action::Discrete(a) if *a < 4 => *a,
            other => panic!("gridworld expects a discrete action in 0..4, got {other:?}"),
        };
        let a = if self.cfg.slip > 0.0 && rng.random::<f64>() < self.cfg.slip {
            let others: Vec<usize> = (0..4).filter(|&b| b != a).collect();
            others[rng.random_range(0..3)]
        } else {
            a
        };
        self.pos = self.moved(self.pos, a);
        BaseStep {
            observation: self.features(),
            reward: 0.0,
            terminated: false,
        }
    }

    fn label_bits(&self) -> u64 {
        self.cell_bits[self.pos]
    }

    fn tabular_state(&self) -> Option<usize> {
        Some(self.pos)
    }

    fn as_tabular(&self) -> Option<&dyn TabularModel> {
        Some(self)
    }
}
