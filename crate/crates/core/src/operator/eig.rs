//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Deterministic sweep order, no external dependencies, adequate for the
//! dense dimensions this crate is capped at.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::matrix::ComplexMatrix;
use crate::tolerances::{JACOBI_MAX_SWEEPS, JACOBI_TOL};

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in descending
/// order and the matching unitary of column eigenvectors.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Diagonalize a Hermitian matrix with cyclic Jacobi rotations.
///
/// The input is symmetrized first; callers are expected to have validated
/// the Hermiticity defect already.
pub fn jacobi_hermitian_eig(matrix: &ComplexMatrix) -> Result<EigDecomposition> {
    if !matrix.is_square() {
        return Err(Error::Domain("eigendecomposition needs a square matrix".into()));
    }
    if !matrix.is_finite() {
        return Err(Error::Numerical("non-finite entries in eigensolver input".into()));
    }
    let n = matrix.rows;
    let mut a = matrix.symmetrize();
    let mut v = ComplexMatrix::identity(n);

    if n == 1 {
        return Ok(EigDecomposition {
            eigenvalues: vec![a[(0, 0)].re],
            eigenvectors: v,
        });
    }

    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = JACOBI_TOL * scale;
    let mut converged = false;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::EPSILON * scale {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_ph = phase * s;

                // Update rows/columns p and q of A in place, keeping A
                // exactly Hermitian.
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let new_kp = akp * c - akq * s_ph.conj();
                    let new_kq = akp * s_ph + akq * c;
                    a[(k, p)] = new_kp;
                    a[(p, k)] = new_kp.conj();
                    a[(k, q)] = new_kq;
                    a[(q, k)] = new_kq.conj();
                }
                let new_pp = app * c * c - 2.0 * s * c * r + aqq * s * s;
                let new_qq = app * s * s + 2.0 * s * c * r + aqq * c * c;
                a[(p, p)] = C64::new(new_pp, 0.0);
                a[(q, q)] = C64::new(new_qq, 0.0);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * s_ph.conj();
                    v[(k, q)] = vkp * s_ph + vkq * c;
                }
            }
        }
    }

    if !converged && off_diagonal_norm(&a) > target.max(1e-10 * scale) {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not converge within {} sweeps (off-diagonal {:.3e})",
            JACOBI_MAX_SWEEPS,
            off_diagonal_norm(&a)
        )));
    }

    // Sort descending; stable tie-break on the original position keeps the
    // output deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors[(k, new_col)] = v[(k, old_col)];
        }
    }

    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

impl EigDecomposition {
    /// Rebuild `U diag(f(w)) U^dag`.
    pub fn rebuild_with(&self, mapped: &[f64]) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in mapped.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let uik = u[(i, k)];
                if uik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += uik * lam * u[(j, k)].conj();
                }
            }
        }
        out.symmetrize()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.rebuild_with(&self.eigenvalues)
    }
}
