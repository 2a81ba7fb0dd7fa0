use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{FinAbGroup, IntMatrix};

/// Result of a Smith normal form computation: `u * a * v = diag(d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Diagonal of length `min(rows, cols)`; nonzero entries form a
    /// divisibility chain and zeros trail.
    pub d: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, tracked alongside it.
    pub v_inv: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.d.iter().take_while(|x| !x.is_zero()).count()
    }

    pub fn diagonal_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(self.u.rows(), self.v.cols(), &self.d)
    }
}

struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_row(dst, src, q);
        self.u.add_row(dst, src, q);
    }

    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_col(dst, src, q);
        self.v.add_col(dst, src, q);
        // (I + q e_src e_dst^T)^{-1} = I - q e_src e_dst^T acts on rows of v_inv
        self.v_inv.add_row(src, dst, &-q);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
    }

    /// Smallest nonzero |entry| in the trailing block, first in row-major order.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                    best = Some((i, j, ax));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn run(mut self) -> SmithForm {
        let (m, n) = (self.a.rows(), self.a.cols());
        let k = m.min(n);
        let mut t = 0;
        while t < k {
            let Some((pi, pj)) = self.pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..m {
                    if !self.a[(i, t)].is_zero() {
                        let q = self.a[(i, t)].div_floor(&self.a[(t, t)]);
                        self.add_row(i, t, &-q);
                        clean &= self.a[(i, t)].is_zero();
                    }
                }
                for j in t + 1..n {
                    if !self.a[(t, j)].is_zero() {
                        let q = self.a[(t, j)].div_floor(&self.a[(t, t)]);
                        self.add_col(j, t, &-q);
                        clean &= self.a[(t, j)].is_zero();
                    }
                }
                if !clean {
                    let (pi, pj) = self.pivot(t).expect("nonzero remainder exists");
                    self.swap_rows(t, pi);
                    self.swap_cols(t, pj);
                    continue;
                }
                // Divisibility: fold an offending row into the pivot row and repeat.
                let p = self.a[(t, t)].clone();
                let bad = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !self.a[(i, j)].is_multiple_of(&p));
                match bad {
                    Some((i, _)) => self.add_row(t, i, &BigInt::from(1)),
                    None => break,
                }
            }
            if self.a[(t, t)].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        let d = (0..k).map(|i| self.a[(i, i)].clone()).collect();
        SmithForm {
            d,
            u: self.u,
            v: self.v,
            v_inv: self.v_inv,
        }
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    Reducer {
        a: a.clone(),
        u: IntMatrix::identity(a.rows()),
        v: IntMatrix::identity(a.cols()),
        v_inv: IntMatrix::identity(a.cols()),
    }
    .run()
}

/// `Z^cols / rowspace(a)`.
pub fn cokernel(a: &IntMatrix) -> FinAbGroup {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let torsion: Vec<BigInt> = snf.d[..r].to_vec();
    FinAbGroup::from_invariant_chain(a.cols() - r, &torsion)
}

/// Columns form a Z-basis of `{x : a x = 0}`; shape `cols x 0` when trivial.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let idx: Vec<usize> = (r..a.cols()).collect();
    let all: Vec<usize> = (0..a.cols()).collect();
    snf.v.select(&all, &idx)
}

/// `ker(a) / im(b)` for `a: m x n`, `b: n x k` with `a * b = 0`.
///
/// The kernel basis comes from the trailing columns of `V`; the image of `b`
/// expressed in that basis is the corresponding block of `V^{-1} b`.
pub fn subquotient(a: &IntMatrix, b: &IntMatrix) -> FinAbGroup {
    let n = a.cols();
    debug_assert_eq!(b.rows(), n);
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let coords = &snf.v_inv * b;
    let rows: Vec<usize> = (r..n).collect();
    let cols: Vec<usize> = (0..b.cols()).collect();
    let x = coords.select(&rows, &cols);
    cokernel(&x.transpose())
}
