//! Small dense symmetric linear algebra: cyclic Jacobi eigen-decomposition
//! and determinants.
//!
//! Everything here works on `nalgebra::DMatrix<f64>` and is meant for the
//! small matrices this crate handles (order at most 65).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Upper bound on Jacobi sweeps before giving up.
pub const MAX_JACOBI_SWEEPS: usize = 64;

/// Largest order for which determinants use cofactor expansion.
const COFACTOR_MAX_ORDER: usize = 4;

/// Eigenvalues and eigenvectors of a symmetric matrix, in the order the
/// Jacobi sweeps left them (unsorted).
#[derive(Debug, Clone)]
pub struct JacobiEigen {
    pub values: DVector<f64>,
    /// Columns are the eigenvectors.
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Rotations are applied in fixed row-major `(p, q)` order, so the result is
/// a deterministic function of the input bits. Only the upper triangle is
/// trusted; the matrix is symmetrized before the sweeps start.
pub fn jacobi_eigen(matrix: &DMatrix<f64>) -> Result<JacobiEigen> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::InvalidInput(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            n,
            matrix.ncols()
        )));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "matrix has non-finite entries".to_string(),
        ));
    }

    let mut a = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            matrix[(i, i)]
        } else {
            0.5 * (matrix[(i, j)] + matrix[(j, i)])
        }
    });
    let mut v = DMatrix::<f64>::identity(n, n);

    let frob = a.norm();
    if frob == 0.0 || n == 1 {
        return Ok(JacobiEigen {
            values: a.diagonal(),
            vectors: v,
            sweeps: 0,
        });
    }
    let target = f64::EPSILON * frob;

    for sweep in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            return Ok(JacobiEigen {
                values: a.diagonal(),
                vectors: v,
                sweeps: sweep,
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                if t == 0.0 {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }

    if off_diagonal_norm(&a) <= target {
        return Ok(JacobiEigen {
            values: a.diagonal(),
            vectors: v,
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }
    Err(Error::NumericalFailure(format!(
        "Jacobi iteration did not converge after {MAX_JACOBI_SWEEPS} sweeps \
         (off-diagonal norm {:e}, target {:e})",
        off_diagonal_norm(&a),
        target
    )))
}

/// Applies `A <- Pᵀ A P` and `V <- V P` for the plane rotation in `(p, q)`.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Determinant of a square matrix.
///
/// Orders up to four use cofactor expansion; larger matrices use an LU
/// factorization with partial pivoting.
pub fn determinant(a: &DMatrix<f64>) -> f64 {
    assert_eq!(a.nrows(), a.ncols(), "determinant of a non-square matrix");
    if a.nrows() <= COFACTOR_MAX_ORDER {
        cofactor_determinant(a)
    } else {
        lu_determinant(a)
    }
}

fn cofactor_determinant(a: &DMatrix<f64>) -> f64 {
    match a.nrows() {
        0 => 1.0,
        1 => a[(0, 0)],
        2 => a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)],
        3 => {
            a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
                - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)])
        }
        n => {
            // expand along the first row
            let mut det = 0.0;
            for col in 0..n {
                let entry = a[(0, col)];
                if entry == 0.0 {
                    continue;
                }
                let minor = a.clone().remove_row(0).remove_column(col);
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                det += sign * entry * cofactor_determinant(&minor);
            }
            det
        }
    }
}

fn lu_determinant(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut lu = a.clone();
    let mut det = 1.0;
    for k in 0..n {
        let (pivot_row, pivot_abs) =
            (k..n)
                .map(|r| (r, lu[(r, k)].abs()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_abs == 0.0 {
            return 0.0;
        }
        if pivot_row != k {
            lu.swap_rows(pivot_row, k);
            det = -det;
        }
        let pivot = lu[(k, k)];
        det *= pivot;
        for r in k + 1..n {
            let factor = lu[(r, k)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in k + 1..n {
                lu[(r, c)] -= factor * lu[(k, c)];
            }
        }
    }
    det
}
