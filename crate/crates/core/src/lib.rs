//! Toolkit for large scale resemblance structures: finite checkers, symbolic
//! subsets of ℕ, asymptotic dimension, large scale maps and a nearness lab.

pub mod backends;
pub mod cli;
pub mod dimension;
pub mod error;
pub mod famtable;
pub mod lineset;
pub mod maps;
pub mod nearness_lab;
pub mod setcore;
pub mod structures;
pub mod verdict;

pub use error::{Error, Result};
pub use lineset::LineSet;
pub use setcore::{Family, Subset, Universe};
pub use verdict::{ExtendedDistance, TriVerdict, Witness};
