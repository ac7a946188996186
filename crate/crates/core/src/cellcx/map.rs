use num_bigint::BigInt;
use num_traits::Zero;

use super::{CellComplex, CellError};
use crate::intlin::SparseMatrix;

/// Cellular chain map, one sparse matrix per degree (target cells × source
/// cells). Cells sent to lower-dimensional cells contribute nothing on chains
/// and are simply absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMap {
    pub matrices: Vec<SparseMatrix>,
}

impl CellMap {
    pub fn zero(source: &CellComplex, target: &CellComplex) -> Self {
        let top = source.cell_counts().len();
        CellMap {
            matrices: (0..top)
                .map(|d| SparseMatrix::zeros(target.num_cells(d), source.num_cells(d)))
                .collect(),
        }
    }

    /// Builds the map from `(source id, target id, coefficient)` triples.
    pub fn from_assignment(
        source: &CellComplex,
        target: &CellComplex,
        entries: &[(String, String, BigInt)],
    ) -> Result<Self, CellError> {
        let mut m = CellMap::zero(source, target);
        for (s, t, x) in entries {
            let sc = source.find(s).ok_or_else(|| CellError::UnknownCell(s.clone()))?;
            let tc = target.find(t).ok_or_else(|| CellError::UnknownCell(t.clone()))?;
            if tc.0 > sc.0 {
                return Err(CellError::Malformed(format!(
                    "cell map sends {s} to higher-dimensional {t}"
                )));
            }
            if tc.0 < sc.0 || x.is_zero() {
                continue;
            }
            m.matrices[sc.0].columns[sc.1].push((tc.1, x.clone()));
        }
        Ok(m)
    }

    /// Inclusion of `sub` into `ambient` matching cells by id.
    pub fn inclusion(sub: &CellComplex, ambient: &CellComplex) -> Result<Self, CellError> {
        let entries: Vec<(String, String, BigInt)> = sub
            .iter_cells()
            .map(|(_, id)| (id.to_string(), id.to_string(), BigInt::from(1)))
            .collect();
        Self::from_assignment(sub, ambient, &entries)
    }

    pub fn apply(&self, d: usize, chain: &[BigInt]) -> Vec<BigInt> {
        self.matrices[d].mul_vec(chain)
    }

    pub fn degree_matrix(&self, d: usize, source: &CellComplex, target: &CellComplex) -> SparseMatrix {
        self.matrices
            .get(d)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(target.num_cells(d), source.num_cells(d)))
    }

    /// `∂_target ∘ f = f ∘ ∂_source` in every degree.
    pub fn is_chain_map(&self, source: &CellComplex, target: &CellComplex) -> bool {
        for d in 1..self.matrices.len() {
            let f_d = self.matrices[d].to_dense();
            let f_lo = self.degree_matrix(d - 1, source, target).to_dense();
            let lhs = target.boundary_matrix(d).to_dense().mul(&f_d);
            let rhs = f_lo.mul(&source.boundary_matrix(d).to_dense());
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusion_is_chain_map() {
        let i = CellComplex::interval("a", "b", "e");
        let ends = super::super::subcomplex(&i, &["a", "b"]).unwrap();
        let m = CellMap::inclusion(&ends, &i).unwrap();
        assert!(m.is_chain_map(&ends, &i));
    }

    #[test]
    fn collapsing_map_is_chain_map() {
        let i = CellComplex::interval("a", "b", "e");
        let p = CellComplex::point("p");
        let entries = vec![
            ("a".to_string(), "p".to_string(), BigInt::from(1)),
            ("b".to_string(), "p".to_string(), BigInt::from(1)),
            ("e".to_string(), "p".to_string(), BigInt::from(1)),
        ];
        let m = CellMap::from_assignment(&i, &p, &entries).unwrap();
        assert!(m.is_chain_map(&i, &p));
        let bad = CellMap::from_assignment(&i, &p, &entries[..1]).unwrap();
        assert!(!bad.is_chain_map(&i, &p));
    }
}
