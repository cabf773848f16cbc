//! Replay/shaping strategies selectable by name: BASE (uniform replay, raw
//! reward), RS (uniform replay, shaped reward), PER (prioritized replay,
//! raw reward) and EC (rank-classified replay, shaped reward).

use crate::replay::{ClassifiedBuffer, PrioritizedBuffer, Replay, ReplayError, UniformBuffer};

use super::LearnError;

/// Inputs for building a strategy's replay buffer.
#[derive(Debug, Clone)]
pub struct ReplayContext {
    pub capacity: usize,
    /// Category priorities `p_0..p_{N-1}` when a rank table exists.
    pub priorities: Option<Vec<f64>>,
    pub alpha: f64,
    pub k: usize,
    pub per_alpha: f64,
    pub per_beta0: f64,
}

pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn shaping(&self) -> bool;
    fn needs_ranks(&self) -> bool {
        self.shaping()
    }
    fn make_replay(&self, ctx: &ReplayContext) -> Result<Box<dyn Replay>, LearnError>;
}

struct Base;
struct RewardShaping;
struct Prioritized;
struct Classified;

impl Strategy for Base {
    fn name(&self) -> &'static str {
        "BASE"
    }
    fn shaping(&self) -> bool {
        false
    }
    fn make_replay(&self, ctx: &ReplayContext) -> Result<Box<dyn Replay>, LearnError> {
        Ok(Box::new(UniformBuffer::new(ctx.capacity)?))
    }
}

impl Strategy for RewardShaping {
    fn name(&self) -> &'static str {
        "RS"
    }
    fn shaping(&self) -> bool {
        true
    }
    fn make_replay(&self, ctx: &ReplayContext) -> Result<Box<dyn Replay>, LearnError> {
        Ok(Box::new(UniformBuffer::new(ctx.capacity)?))
    }
}

impl Strategy for Prioritized {
    fn name(&self) -> &'static str {
        "PER"
    }
    fn shaping(&self) -> bool {
        false
    }
    fn make_replay(&self, ctx: &ReplayContext) -> Result<Box<dyn Replay>, LearnError> {
        Ok(Box::new(PrioritizedBuffer::new(ctx.capacity, ctx.per_alpha, ctx.per_beta0)?))
    }
}

impl Strategy for Classified {
    fn name(&self) -> &'static str {
        "EC"
    }
    fn shaping(&self) -> bool {
        true
    }
    fn make_replay(&self, ctx: &ReplayContext) -> Result<Box<dyn Replay>, LearnError> {
        let p = ctx.priorities.clone().ok_or(LearnError::MissingRanks)?;
        Ok(Box::new(ClassifiedBuffer::new(ctx.capacity, p, ctx.alpha, ctx.k)?))
    }
}

static STRATEGIES: &[&dyn Strategy] = &[&Base, &RewardShaping, &Prioritized, &Classified];

pub fn strategy_names() -> Vec<&'static str> {
    STRATEGIES.iter().map(|s| s.name()).collect()
}

pub fn strategy(name: &str) -> Result<&'static dyn Strategy, LearnError> {
    STRATEGIES
        .iter()
        .copied()
        .find(|s| s.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| LearnError::UnknownStrategy(name.to_string()))
}

impl From<ReplayError> for LearnError {
    fn from(e: ReplayError) -> Self {
        LearnError::Replay(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(priorities: Option<Vec<f64>>) -> ReplayContext {
        ReplayContext {
            capacity: 100,
            priorities,
            alpha: 0.75,
            k: 10,
            per_alpha: 0.6,
            per_beta0: 0.4,
        }
    }

    #[test]
    fn registry_round_trip() {
        assert_eq!(strategy_names(), vec!["BASE", "RS", "PER", "EC"]);
        assert_eq!(strategy("ec").unwrap().name(), "EC");
        assert!(strategy("SAC").is_err());
    }

    #[test]
    fn buffers_per_strategy() {
        let p = Some(vec![0.25, 1.0 / 3.0, 0.5, 1.0]);
        assert_eq!(strategy("BASE").unwrap().make_replay(&ctx(None)).unwrap().kind(), "uniform");
        assert_eq!(strategy("RS").unwrap().make_replay(&ctx(None)).unwrap().kind(), "uniform");
        assert_eq!(strategy("PER").unwrap().make_replay(&ctx(None)).unwrap().kind(), "prioritized");
        let ec = strategy("EC").unwrap().make_replay(&ctx(p)).unwrap();
        assert_eq!(ec.kind(), "classified");
        assert_eq!(ec.stats().sizes.len(), 4);
        assert!(matches!(strategy("EC").unwrap().make_replay(&ctx(None)), Err(LearnError::MissingRanks)));
    }
}
