use std::collections::VecDeque;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;

use super::{BufferStats, Experience, Replay, ReplayError, Sampled};
use crate::env::SimRng;

/// `P(i) = |B_i| p_i^alpha / sum_j |B_j| p_j^alpha`.
pub fn category_probabilities(sizes: &[usize], priorities: &[f64], alpha: f64) -> Result<Vec<f64>, ReplayError> {
    let w: Vec<f64> = sizes
        .iter()
        .zip(priorities)
        .map(|(&n, &p)| if n == 0 { 0.0 } else { n as f64 * p.powf(alpha) })
        .collect();
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(ReplayError::AllEmpty);
    }
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// Replay split into one ring buffer per rank category, with category
/// probabilities refreshed every `k` episodes.
#[derive(Debug, Clone)]
pub struct ClassifiedBuffer {
    parts: Vec<VecDeque<Experience>>,
    part_capacity: usize,
    priorities: Vec<f64>,
    alpha: f64,
    k: usize,
    probs: Vec<f64>,
    dist: Option<WeightedIndex<f64>>,
}

impl ClassifiedBuffer {
    /// Each of the `priorities.len()` partitions holds
    /// `total_capacity / N` experiences.
    pub fn new(total_capacity: usize, priorities: Vec<f64>, alpha: f64, k: usize) -> Result<Self, ReplayError> {
        let n = priorities.len();
        if n == 0 || total_capacity < n {
            return Err(ReplayError::Config("need at least one slot per partition".into()));
        }
        if !(0.0..).contains(&alpha) || k == 0 || priorities.iter().any(|p| p.is_nan() || *p <= 0.0) {
            return Err(ReplayError::Config("alpha >= 0, K > 0 and positive priorities required".into()));
        }
        Ok(ClassifiedBuffer {
            parts: vec![VecDeque::new(); n],
            part_capacity: total_capacity / n,
            priorities,
            alpha,
            k,
            probs: vec![0.0; n],
            dist: None,
        })
    }

    pub fn partitions(&self) -> usize {
        self.parts.len()
    }

    pub fn partition_capacity(&self) -> usize {
        self.part_capacity
    }

    pub fn priorities(&self) -> &[f64] {
        &self.priorities
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.len()).collect()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn partition(&self, i: usize) -> &VecDeque<Experience> {
        &self.parts[i]
    }

    pub fn refresh_probs(&mut self) -> Result<(), ReplayError> {
        self.probs = category_probabilities(&self.sizes(), &self.priorities, self.alpha)?;
        self.dist = Some(WeightedIndex::new(&self.probs).expect("probabilities are a distribution"));
        Ok(())
    }
}

impl Replay for ClassifiedBuffer {
    fn kind(&self) -> &'static str {
        "classified"
    }

    fn begin_episode(&mut self, episode: usize) {
        if episode.is_multiple_of(self.k) {
            // Empty at the very start; sampling refreshes lazily then.
            let _ = self.refresh_probs();
        }
    }

    fn push(&mut self, e: Experience) -> Result<(), ReplayError> {
        let n = self.parts.len();
        let part = self.parts.get_mut(e.category).ok_or(ReplayError::BadCategory {
            category: e.category,
            partitions: n,
        })?;
        if part.len() == self.part_capacity {
            part.pop_front();
        }
        part.push_back(e);
        Ok(())
    }

    fn len(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }

    fn sample(&mut self, n: usize, rng: &mut SimRng) -> Result<Vec<Sampled>, ReplayError> {
        if n == 0 {
            return Ok(Vec::new());
        }
        if self.dist.is_none() {
            self.refresh_probs()?;
        }
        let dist = self.dist.as_ref().unwrap();
        Ok((0..n)
            .map(|_| {
                let c = dist.sample(rng);
                let i = rng.random_range(0..self.parts[c].len());
                Sampled {
                    handle: c * self.part_capacity + i,
                    weight: 1.0,
                }
            })
            .collect())
    }

    fn get(&self, handle: usize) -> &Experience {
        &self.parts[handle / self.part_capacity][handle % self.part_capacity]
    }

    fn stats(&self) -> BufferStats {
        BufferStats {
            sizes: self.sizes(),
            probs: self.probs.clone(),
        }
    }
}
