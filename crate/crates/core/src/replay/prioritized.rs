use rand::Rng;

use super::{BufferStats, Experience, Replay, ReplayError, Sampled};
use crate::env::SimRng;

/// Binary tree of partial sums over a fixed number of leaves.
#[derive(Debug, Clone)]
pub struct SumTree {
    leaves: usize,
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(leaves: usize) -> Self {
        let leaves = leaves.next_power_of_two();
        SumTree {
            leaves,
            nodes: vec![0.0; 2 * leaves],
        }
    }

    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.nodes[self.leaves + i]
    }

    pub fn set(&mut self, i: usize, value: f64) {
        let mut n = self.leaves + i;
        self.nodes[n] = value;
        while n > 1 {
            n /= 2;
            self.nodes[n] = self.nodes[2 * n] + self.nodes[2 * n + 1];
        }
    }

    /// Leaf whose cumulative range contains `mass`.
    pub fn find(&self, mut mass: f64) -> usize {
        let mut n = 1;
        while n < self.leaves {
            let left = self.nodes[2 * n];
            if mass < left || self.nodes[2 * n + 1] <= 0.0 {
                n *= 2;
            } else {
                mass -= left;
                n = 2 * n + 1;
            }
        }
        n - self.leaves
    }
}

/// Proportional prioritized replay with importance weights.
#[derive(Debug, Clone)]
pub struct PrioritizedBuffer {
    items: Vec<Experience>,
    tree: SumTree,
    capacity: usize,
    next: usize,
    alpha: f64,
    beta0: f64,
    beta: f64,
    max_priority: f64,
}

pub const PRIORITY_EPS: f64 = 1e-6;

impl PrioritizedBuffer {
    pub fn new(capacity: usize, alpha: f64, beta0: f64) -> Result<Self, ReplayError> {
        if capacity == 0 || !(0.0..).contains(&alpha) || !(0.0..=1.0).contains(&beta0) {
            return Err(ReplayError::Config("bad prioritized replay parameters".into()));
        }
        Ok(PrioritizedBuffer {
            items: Vec::new(),
            tree: SumTree::new(capacity),
            capacity,
            next: 0,
            alpha,
            beta0,
            beta: beta0,
            max_priority: 1.0,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn priority(&self, handle: usize) -> f64 {
        self.tree.get(handle)
    }
}

impl Replay for PrioritizedBuffer {
    fn kind(&self) -> &'static str {
        "prioritized"
    }

    fn begin_episode(&mut self, _episode: usize) {}

    fn push(&mut self, e: Experience) -> Result<(), ReplayError> {
        if self.items.len() < self.capacity {
            self.items.push(e);
        } else {
            self.items[self.next] = e;
        }
        self.tree.set(self.next, self.max_priority);
        self.next = (self.next + 1) % self.capacity;
        Ok(())
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn sample(&mut self, n: usize, rng: &mut SimRng) -> Result<Vec<Sampled>, ReplayError> {
        if n == 0 {
            return Ok(Vec::new());
        }
        if self.items.is_empty() {
            return Err(ReplayError::AllEmpty);
        }
        let total = self.tree.total();
        let len = self.items.len() as f64;
        let min_p = (0..self.items.len()).map(|i| self.tree.get(i)).fold(f64::INFINITY, f64::min) / total;
        let max_w = (len * min_p).powf(-self.beta);
        let seg = total / n as f64;
        Ok((0..n)
            .map(|j| {
                let mass = seg * (j as f64 + rng.random::<f64>());
                let i = self.tree.find(mass.min(total * (1.0 - 1e-12))).min(self.items.len() - 1);
                let p = self.tree.get(i) / total;
                Sampled {
                    handle: i,
                    weight: (len * p).powf(-self.beta) / max_w,
                }
            })
            .collect())
    }

    fn get(&self, handle: usize) -> &Experience {
        &self.items[handle]
    }

    fn update_priorities(&mut self, handles: &[usize], td_errors: &[f64]) {
        for (&h, &d) in handles.iter().zip(td_errors) {
            let p = (d.abs() + PRIORITY_EPS).powf(self.alpha);
            if p.is_finite() {
                self.max_priority = self.max_priority.max(p);
                self.tree.set(h, p);
            }
        }
    }

    fn set_progress(&mut self, fraction: f64) {
        self.beta = self.beta0 + (1.0 - self.beta0) * fraction.clamp(0.0, 1.0);
    }

    fn stats(&self) -> BufferStats {
        BufferStats {
            sizes: vec![self.items.len()],
            probs: vec![if self.items.is_empty() { 0.0 } else { 1.0 }],
        }
    }
}
