pub mod catalog;
pub mod classify;
pub mod enumerate;
pub mod error;
pub mod glued;
pub mod feasibility;
pub mod fixtures;
pub mod format;
pub mod lp;
pub mod markov;
pub mod measures;
pub mod poset;
pub mod rational;
pub mod rit;
pub mod sampling;
pub mod transform;
pub mod tree;

pub use error::{Error, Result};
pub use poset::{ElementSet, MonotoneMap, Poset};
pub use rational::Q;
