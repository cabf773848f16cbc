#![allow(clippy::needless_range_loop)]

pub mod learn;
pub mod ltlf;
pub mod dfa;
pub mod experiment;
pub mod env;
pub mod product;
pub mod replay;
pub mod ranking;
