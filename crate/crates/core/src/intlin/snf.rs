use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::matrix::Matrix;

/// `u * m * v == s`, with `s` diagonal and its diagonal a divisibility chain of
/// non-negative entries. `u_inv` and `v_inv` are the exact inverses.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: Matrix,
    pub s: Matrix,
    pub v: Matrix,
    pub u_inv: Matrix,
    pub v_inv: Matrix,
    pub rank: usize,
}

impl SnfResult {
    /// Nonzero diagonal entries of `s`, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Transform tracking is optional; homology ranks only need the diagonal.
struct Transforms {
    u: Matrix,
    u_inv: Matrix,
    v: Matrix,
    v_inv: Matrix,
}

struct Reducer {
    a: Matrix,
    t: Option<Transforms>,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap_rows(i, j);
        if let Some(t) = &mut self.t {
            t.u.swap_rows(i, j);
            t.u_inv.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap_cols(i, j);
        if let Some(t) = &mut self.t {
            t.v.swap_cols(i, j);
            t.v_inv.swap_rows(i, j);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        let neg = -q;
        self.a.add_row_multiple(dst, src, &neg);
        if let Some(t) = &mut self.t {
            t.u.add_row_multiple(dst, src, &neg);
            t.u_inv.add_col_multiple(src, dst, q);
        }
    }

    /// col[dst] -= q * col[src]
    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        let neg = -q;
        self.a.add_col_multiple(dst, src, &neg);
        if let Some(t) = &mut self.t {
            t.v.add_col_multiple(dst, src, &neg);
            t.v_inv.add_row_multiple(src, dst, q);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some(t) = &mut self.t {
            t.u.negate_row(i);
            t.u_inv.negate_col(i);
        }
    }

    /// Position of the nonzero entry of least absolute value in the
    /// lower-right block starting at `(t, t)`; ties go to the first in
    /// row-major order.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.nrows() {
            for j in t..self.a.ncols() {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => x.magnitude() < self.a.get(bi, bj).magnitude(),
                };
                if better {
                    best = Some((i, j));
                    if x.magnitude() == &num_bigint::BigUint::from(1u8) {
                        return best;
                    }
                }
            }
        }
        best
    }

    /// Least nonzero entry in column `t` (rows > t) or row `t` (cols > t),
    /// compared against the pivot itself.
    fn min_in_cross(&self, t: usize) -> Option<(usize, usize)> {
        let mut best = (t, t);
        for i in t + 1..self.a.nrows() {
            let x = self.a.get(i, t);
            if !x.is_zero() && x.magnitude() < self.a.get(best.0, best.1).magnitude() {
                best = (i, t);
            }
        }
        for j in t + 1..self.a.ncols() {
            let x = self.a.get(t, j);
            if !x.is_zero() && x.magnitude() < self.a.get(best.0, best.1).magnitude() {
                best = (t, j);
            }
        }
        if best == (t, t) {
            None
        } else {
            Some(best)
        }
    }

    fn run(&mut self) -> usize {
        let (m, n) = self.a.shape();
        let mut t = 0;
        while t < m.min(n) {
            let Some((pi, pj)) = self.min_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..m {
                    if self.a.get(i, t).is_zero() {
                        continue;
                    }
                    let q = self.a.get(i, t) / self.a.get(t, t);
                    self.row_sub(i, t, &q);
                    if !self.a.get(i, t).is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..n {
                    if self.a.get(t, j).is_zero() {
                        continue;
                    }
                    let q = self.a.get(t, j) / self.a.get(t, t);
                    self.col_sub(j, t, &q);
                    if !self.a.get(t, j).is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    if let Some((i, j)) = self.min_in_cross(t) {
                        self.swap_rows(t, i);
                        self.swap_cols(t, j);
                    }
                    continue;
                }
                // Divisibility: fold an offending row into the pivot row.
                let pivot = self.a.get(t, t).clone();
                let offender = (t + 1..m).find(|&i| {
                    (t + 1..n).any(|j| !(self.a.get(i, j) % &pivot).is_zero())
                });
                match offender {
                    Some(i) => {
                        let minus_one = BigInt::from(-1);
                        self.row_sub(t, i, &minus_one);
                    }
                    None => break,
                }
            }
            if self.a.get(t, t).is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }
}

/// Smith normal form by gcd elimination with least-absolute-value pivoting.
pub fn smith_normal_form(m: &Matrix) -> SnfResult {
    let (rows, cols) = m.shape();
    let mut r = Reducer {
        a: m.clone(),
        t: Some(Transforms {
            u: Matrix::identity(rows),
            u_inv: Matrix::identity(rows),
            v: Matrix::identity(cols),
            v_inv: Matrix::identity(cols),
        }),
    };
    let rank = r.run();
    let t = r.t.expect("transforms tracked");
    SnfResult {
        u: t.u,
        s: r.a,
        v: t.v,
        u_inv: t.u_inv,
        v_inv: t.v_inv,
        rank,
    }
}

/// Invariant factors only (no transforms). Same diagonal as
/// [`smith_normal_form`].
pub fn invariant_factors(m: &Matrix) -> Vec<BigInt> {
    let mut r = Reducer {
        a: m.clone(),
        t: None,
    };
    let rank = r.run();
    (0..rank).map(|i| r.a.get(i, i).clone()).collect()
}

pub fn rank(m: &Matrix) -> usize {
    invariant_factors(m).len()
}

/// Columns form a Z-basis of `{x : m x = 0}`. The basis is a block of a
/// unimodular matrix, so it spans a primitive sublattice.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let snf = smith_normal_form(m);
    snf.v.column_block(snf.rank, m.ncols())
}

/// A kernel basis together with an integer left inverse: `left * basis = I`.
pub fn kernel_basis_with_left_inverse(m: &Matrix) -> (Matrix, Matrix) {
    let snf = smith_normal_form(m);
    let basis = snf.v.column_block(snf.rank, m.ncols());
    let left = snf.v_inv.row_block(snf.rank, m.ncols());
    (basis, left)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn check(m: &Matrix) -> SnfResult {
        let r = smith_normal_form(m);
        assert_eq!(r.u.mul(m).mul(&r.v), r.s, "U M V != S for {m:?}");
        assert_eq!(r.u.mul(&r.u_inv), Matrix::identity(m.nrows()));
        assert_eq!(r.v.mul(&r.v_inv), Matrix::identity(m.ncols()));
        for i in 0..r.s.nrows() {
            for j in 0..r.s.ncols() {
                if i != j {
                    assert!(r.s.get(i, j).is_zero());
                }
            }
        }
        let f = r.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        r
    }

    #[test]
    fn diag_two_three() {
        let r = check(&Matrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(r.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn zero_matrix_keeps_identity_transforms() {
        let r = check(&Matrix::zeros(2, 3));
        assert_eq!(r.s, Matrix::zeros(2, 3));
        assert_eq!(r.u, Matrix::identity(2));
        assert_eq!(r.v, Matrix::identity(3));
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn two_by_two_gcd_case() {
        let r = check(&Matrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(r.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn empty_matrices() {
        let r = check(&Matrix::zeros(0, 0));
        assert_eq!(r.rank, 0);
        let r = check(&Matrix::zeros(0, 4));
        assert_eq!(r.v.ncols(), 4);
        assert_eq!(kernel_basis(&Matrix::zeros(0, 4)).ncols(), 4);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&Matrix::identity(3)).ncols(), 0);
        assert_eq!(kernel_basis(&Matrix::zeros(1, 2)).ncols(), 2);
        let k = kernel_basis(&Matrix::from_rows(&[vec![1, 1]]));
        assert_eq!(k.ncols(), 1);
        let v = k.column(0);
        assert!(
            v == vec![BigInt::from(1), BigInt::from(-1)]
                || v == vec![BigInt::from(-1), BigInt::from(1)]
        );
    }

    #[test]
    fn left_inverse_recovers_coordinates() {
        let m = Matrix::from_rows(&[vec![1, 2, 3, 4], vec![2, 4, 6, 9]]);
        let (basis, left) = kernel_basis_with_left_inverse(&m);
        assert!(m.mul(&basis).is_zero());
        assert_eq!(left.mul(&basis), Matrix::identity(basis.ncols()));
    }
}
