use rand::Rng;

use super::{BufferStats, Experience, Replay, ReplayError, Sampled};
use crate::env::SimRng;

/// Single ring buffer sampled uniformly.
#[derive(Debug, Clone)]
pub struct UniformBuffer {
    items: Vec<Experience>,
    capacity: usize,
    next: usize,
}

impl UniformBuffer {
    pub fn new(capacity: usize) -> Result<Self, ReplayError> {
        if capacity == 0 {
            return Err(ReplayError::Config("capacity must be positive".into()));
        }
        Ok(UniformBuffer {
            items: Vec::new(),
            capacity,
            next: 0,
        })
    }
}

impl Replay for UniformBuffer {
    fn kind(&self) -> &'static str {
        "uniform"
    }

    fn begin_episode(&mut self, _episode: usize) {}

    fn push(&mut self, e: Experience) -> Result<(), ReplayError> {
        if self.items.len() < self.capacity {
            self.items.push(e);
        } else {
            self.items[self.next] = e;
        }
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
        Ok((0..n)
            .map(|_| Sampled {
                handle: rng.random_range(0..self.items.len()),
                weight: 1.0,
            })
            .collect())
    }

    fn get(&self, handle: usize) -> &Experience {
        &self.items[handle]
    }

    fn stats(&self) -> BufferStats {
        BufferStats {
            sizes: vec![self.items.len()],
            probs: vec![if self.items.is_empty() { 0.0 } else { 1.0 }],
        }
    }
}
