//! Exact model checking of probabilistic knowledge over partially observed
//! Markov chains, and executable undecidability reductions.

pub mod belief;
pub mod checker;
pub mod formula;
pub mod matrix;
pub mod model;
pub mod pfa;
pub mod rational;
pub mod reductions;

pub use belief::{Belief, ObsData, ObsRecord, Semantics};
pub use matrix::{RMatrix, RVector};
pub use model::{FinitePath, Podtmc};
pub use pfa::Pfa;
pub use rational::Rational;
