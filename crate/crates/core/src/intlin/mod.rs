//! Exact integer linear algebra: Smith normal form, kernel lattices and
//! homology of free chain complexes over ℤ.

mod homology;
mod matrix;
mod snf;

use thiserror::Error;

pub use homology::{
    format_graded, homology, trim_graded, AbelianGroup, ChainComplex, HomologyBasis,
    HomologyClass,
};
pub use matrix::{Matrix, SparseMatrix};
pub use snf::{
    invariant_factors, kernel_basis, kernel_basis_with_left_inverse, rank, smith_normal_form,
    SnfResult,
};

use crate::cellcx::CellComplex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntlinError {
    #[error("degree {degree}")]
    BoundarySquareNonzero { degree: usize },
    #[error("boundary in degree {degree} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        degree: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("{0}")]
    NotASubcomplex(String),
    #[error("chain is not a cycle of the expected lattice")]
    NotACycle,
}

impl IntlinError {
    pub fn code(&self) -> &'static str {
        match self {
            IntlinError::BoundarySquareNonzero { .. } => "BoundarySquareNonzero",
            IntlinError::ShapeMismatch { .. } => "ShapeMismatch",
            IntlinError::NotASubcomplex(_) => "NotASubcomplex",
            IntlinError::NotACycle => "NotACycle",
        }
    }
}

/// Homology of `C_*(k) / C_*(a)`. `a` must be a subcomplex of `k` by cell id
/// with the same boundaries.
pub fn relative_homology(k: &CellComplex, a: &CellComplex) -> Result<Vec<AbelianGroup>, IntlinError> {
    let excluded = k
        .subcomplex_cells_of(a)
        .map_err(IntlinError::NotASubcomplex)?;
    let chain = k.quotient_chain_complex(&excluded);
    Ok(homology(&chain))
}
