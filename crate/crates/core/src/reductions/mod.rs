//! Executable versions of the undecidability reductions, plus the small
//! fixed models they are stated over.

mod dioph;
mod hilbert;
mod lrs;
mod pfa_reduction;

use crate::matrix::MatrixError;
use crate::model::{ModelError, Podtmc};

pub use dioph::{dioph_to_atom, time_var, DiophantinePoly};
pub use hilbert::{
    hilbert_chain, hilbert_f, hilbert_g, hilbert_g1, hilbert_g2, hilbert_matrix, hilbert_min_poly,
    hilbert_w, hilbert_x, perron_power, HILBERT_AGENT,
};
pub use lrs::{
    integer_matrix_to_stochastic, lrs_term, lrs_to_matrix, skolem_instance, Lrs, SkolemInstance,
    StochasticInstance, SKOLEM_AGENT, SKOLEM_PROP,
};
pub use pfa_reduction::{pair_id, pfa_to_podtmc, PfaReduction, PFA_AGENT, PFA_PROP};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("the closed-form power expansion is stated for n >= 1")]
    PerronZero,
    #[error("invalid recurrence: {0}")]
    InvalidLrs(String),
    #[error("matrix entry ({row},{col}) is not an integer")]
    NotInteger { row: usize, col: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}

/// Two-state chain separating `Pr[i](F ¬q) = 1` from `K[i] F ¬q`: from `s`
/// (labelled `q`) the chain stays with probability ½ or moves to the
/// absorbing `u`. The run that stays at `s` forever has measure 0 but
/// exists, so the blind agent `i` does not know `F ¬q`.
pub fn figure_model() -> Podtmc {
    Podtmc::parse(
        "states: s u\n\
         init: s=1\n\
         trans: s -> s : 1/2\n\
         trans: s -> u : 1/2\n\
         trans: u -> u : 1\n\
         obs i: s=⊥ u=⊥\n\
         label q: s\n",
    )
    .expect("valid model")
}
