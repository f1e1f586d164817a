pub mod contopt;
pub mod dynamics;
pub mod error;
pub mod gauge_cd;
pub mod harness;
pub mod linalg;
pub mod lmg;
pub mod problem;
pub mod rl_policy;
pub mod seeds;
pub mod spin_ops;
pub mod symmetry;

pub use error::{Error, Result};
