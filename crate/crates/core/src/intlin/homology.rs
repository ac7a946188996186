use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{Matrix, SparseMatrix};
use super::snf::{invariant_factors, kernel_basis_with_left_inverse, smith_normal_form};
use super::IntlinError;

/// Finitely generated abelian group `Z^rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_t` with
/// `d_1 | d_2 | … | d_t`, every `d_i ≥ 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub rank: usize,
    #[serde(with = "bigint_list")]
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn zero() -> Self {
        AbelianGroup::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    /// Group presented by the invariant factors of a relation matrix on
    /// `generators` generators: factors equal to one are dropped.
    pub fn from_presentation(generators: usize, factors: &[BigInt]) -> Self {
        AbelianGroup {
            rank: generators - factors.len(),
            torsion: factors.iter().filter(|d| !d.is_one()).cloned().collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        use num_integer::Integer;
        self.torsion.iter().all(|d| d > &BigInt::one())
            && self.torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
    }
}

impl fmt::Display for AbelianGroup {
    /// `0`, `ℤ`, `ℤ³`, `ℤ/2`, `ℤ² ⊕ ℤ/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("ℤ".to_string()),
            r => parts.push(format!("ℤ{}", superscript(r))),
        }
        for d in &self.torsion {
            parts.push(format!("ℤ/{d}"));
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

/// `(ℤ, 0, ℤ)`
pub fn format_graded(groups: &[AbelianGroup]) -> String {
    let inner: Vec<String> = trim_graded(groups).iter().map(|g| g.to_string()).collect();
    if inner.is_empty() {
        "(0)".to_string()
    } else {
        format!("({})", inner.join(", "))
    }
}

/// Drops trailing zero groups so graded lists of different lengths compare.
pub fn trim_graded(groups: &[AbelianGroup]) -> Vec<AbelianGroup> {
    let mut v = groups.to_vec();
    while v.last().is_some_and(|g| g.is_zero()) {
        v.pop();
    }
    v
}

pub(crate) mod bigint_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let as_i64: Option<Vec<i64>> = v.iter().map(|x| i64::try_from(x).ok()).collect();
        match as_i64 {
            Some(xs) => xs.serialize(s),
            None => v
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|v| crate::cellcx::json::bigint_from_value(&v).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Free chain complex given by its ranks and boundary operators.
/// `boundaries[d]` maps degree `d` to degree `d - 1`; `boundaries[0]` is the
/// zero map to nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub boundaries: Vec<Matrix>,
}

impl ChainComplex {
    /// Boundary matrices for degrees `1..=top`; chain ranks are read off their
    /// shapes. `ranks` is needed when there are no boundaries.
    pub fn new(ranks: &[usize], boundaries_from_one: Vec<Matrix>) -> Result<Self, IntlinError> {
        let mut boundaries = Vec::with_capacity(ranks.len());
        if let Some(&r0) = ranks.first() {
            boundaries.push(Matrix::zeros(0, r0));
        }
        for (i, b) in boundaries_from_one.into_iter().enumerate() {
            let d = i + 1;
            if b.shape() != (ranks[d - 1], ranks[d]) {
                return Err(IntlinError::ShapeMismatch {
                    degree: d,
                    expected: (ranks[d - 1], ranks[d]),
                    found: b.shape(),
                });
            }
            boundaries.push(b);
        }
        let c = ChainComplex { boundaries };
        c.check_square_zero()?;
        Ok(c)
    }

    pub fn from_sparse(ranks: &[usize], boundaries_from_one: &[SparseMatrix]) -> Result<Self, IntlinError> {
        Self::new(ranks, boundaries_from_one.iter().map(|b| b.to_dense()).collect())
    }

    pub fn top_degree(&self) -> Option<usize> {
        self.boundaries.len().checked_sub(1)
    }

    pub fn rank_in(&self, d: usize) -> usize {
        self.boundaries.get(d).map_or(0, |b| b.ncols())
    }

    pub fn boundary(&self, d: usize) -> Matrix {
        match self.boundaries.get(d) {
            Some(b) => b.clone(),
            None => Matrix::zeros(self.rank_in(d.saturating_sub(1)), 0),
        }
    }

    pub fn check_square_zero(&self) -> Result<(), IntlinError> {
        for d in 2..self.boundaries.len() {
            if !self.boundaries[d - 1].mul(&self.boundaries[d]).is_zero() {
                return Err(IntlinError::BoundarySquareNonzero { degree: d });
            }
        }
        Ok(())
    }
}

/// `H_d = ker ∂_d / im ∂_{d+1}` for every degree up to the top chain degree.
pub fn homology(c: &ChainComplex) -> Vec<AbelianGroup> {
    let top = match c.top_degree() {
        Some(t) => t,
        None => return Vec::new(),
    };
    let factors: Vec<Vec<BigInt>> = (0..=top + 1)
        .map(|d| {
            if d == 0 || d > top {
                Vec::new()
            } else {
                invariant_factors(&c.boundaries[d])
            }
        })
        .collect();
    (0..=top)
        .map(|d| {
            let n = c.rank_in(d);
            let kernel = n - factors[d].len();
            AbelianGroup::from_presentation(kernel, &factors[d + 1])
        })
        .collect()
}

/// Explicit generators for one homology group and the coordinate map from
/// cycles to those generators.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub group: AbelianGroup,
    /// `left * cycle` gives coordinates in the cycle-lattice basis.
    left: Matrix,
    /// Change of basis on cycle coordinates (the `U` of the relation SNF).
    change: Matrix,
    /// Number of trivial or torsion generators preceding the free ones.
    relation_rank: usize,
    factors: Vec<BigInt>,
    /// Free generators as chain vectors, one per column.
    pub free_generators: Matrix,
    cycles: Matrix,
    chain_rank: usize,
}

/// Image of a cycle in `H_d`, split into free coordinates and torsion residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl HomologyBasis {
    pub fn compute(c: &ChainComplex, d: usize) -> Self {
        let n = c.rank_in(d);
        let outgoing = if d == 0 { Matrix::zeros(0, n) } else { c.boundary(d) };
        let (cycles, left) = kernel_basis_with_left_inverse(&outgoing);
        let incoming = match c.boundaries.get(d + 1) {
            Some(b) => b.clone(),
            None => Matrix::zeros(n, 0),
        };
        let relations = left.mul(&incoming);
        debug_assert_eq!(cycles.mul(&relations), incoming);
        let snf = smith_normal_form(&relations);
        let factors = snf.invariant_factors();
        let generators = cycles.mul(&snf.u_inv);
        let z = cycles.ncols();
        let free_generators = generators.column_block(snf.rank, z);
        HomologyBasis {
            group: AbelianGroup::from_presentation(z, &factors),
            left,
            change: snf.u,
            relation_rank: snf.rank,
            factors,
            free_generators,
            cycles,
            chain_rank: n,
        }
    }

    /// Class of a chain that must be a cycle in this degree.
    pub fn classify(&self, cycle: &[BigInt]) -> Result<HomologyClass, IntlinError> {
        assert_eq!(cycle.len(), self.chain_rank);
        let coords = self.left.mul_vec(cycle);
        if self.cycles.mul_vec(&coords) != cycle {
            return Err(IntlinError::NotACycle);
        }
        let u = self.change.mul_vec(&coords);
        let free = u[self.relation_rank..].to_vec();
        let torsion = self
            .factors
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.is_one())
            .map(|(i, f)| {
                use num_integer::Integer;
                u[i].mod_floor(f)
            })
            .collect();
        Ok(HomologyClass { free, torsion })
    }
}

impl HomologyClass {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|x| x.is_zero()) && self.torsion.iter().all(|x| x.is_zero())
    }
}
