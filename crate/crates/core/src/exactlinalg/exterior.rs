use super::{IntMatrix, LinalgError};

/// Lexicographically ordered `q`-subsets of `0..n`.
pub fn wedge_basis(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if q <= n {
        rec(0, n, q, &mut Vec::new(), &mut out);
    }
    out
}

/// Matrix of the induced map on `Λ^q`, entries are `q x q` minors.
pub fn exterior_power_matrix(a: &IntMatrix, q: usize) -> Result<IntMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if q > n {
        return Err(LinalgError::DegreeOutOfRange { q, dim: n });
    }
    let basis = wedge_basis(n, q);
    let k = basis.len();
    let mut out = IntMatrix::zeros(k, k);
    for (i, rows) in basis.iter().enumerate() {
        for (j, cols) in basis.iter().enumerate() {
            out[(i, j)] = a.select(rows, cols).determinant()?;
        }
    }
    Ok(out)
}
