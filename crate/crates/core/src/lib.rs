#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod error;
pub mod geometry;

pub use error::{Error, Result};
pub mod kinematics;
pub mod planner;
pub mod index;
pub mod roadmap;
pub mod scenes;
pub mod search;
pub mod steering;
