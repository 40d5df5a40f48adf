//! Sparse generalized linear models that fit survival orderings and binary
//! subgroup labels with one shared coefficient vector.
//!
//! The risk score `r_i = β·x_i` drives both a logistic class probability and
//! a Cox partial likelihood. Fitting minimizes the sum of both negative
//! log-likelihoods under an elastic-net penalty, following the
//! regularization path until a chosen number of features is selected.

pub mod bench;
pub mod data;
pub mod error;
pub mod io;
pub mod likelihood;
pub mod metrics;
pub mod simulate;
pub mod solver;

pub use data::{FitResult, Mode, ModeWeights, RiskSetIndex, Standardizer, SurvivalDataset};
pub use error::{Error, Result};
pub use solver::{PathConfig, PathResult, SolverConfig};
