//! Matrix functions on the support and Schatten norms.

use crate::error::{Error, Result};
use crate::operator::matrix::ComplexMatrix;
use crate::operator::types::HermitianObservable;
use crate::tolerances::SUPPORT_EPS;

/// Apply a real function to the spectrum of a Hermitian operator.
///
/// With `support_only` set, eigenvalues below `SUPPORT_EPS * lambda_max`
/// (relative clipping) are treated as exact zeros and map to zero, which
/// realizes the `0^t = 0` and support-restricted-log conventions; the input
/// must be PSD up to that clipping. Without the flag, `f` is applied to the
/// raw spectrum (this is the path `exp` takes).
pub fn matrix_function(
    a: &HermitianObservable,
    f: impl Fn(f64) -> f64,
    support_only: bool,
) -> Result<HermitianObservable> {
    let eig = a.eig()?;
    let mapped: Vec<f64> = if support_only {
        let lam_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let cut = SUPPORT_EPS * lam_max;
        let psd_floor = -1e-8 * lam_max.max(1.0);
        let mut out = Vec::with_capacity(eig.eigenvalues.len());
        for &lam in &eig.eigenvalues {
            if lam < psd_floor {
                return Err(Error::domain(format!(
                    "matrix_function(support_only) requires a PSD input; found eigenvalue {:.3e}",
                    lam
                )));
            }
            if lam <= cut {
                out.push(0.0);
            } else {
                out.push(f(lam));
            }
        }
        out
    } else {
        eig.eigenvalues.iter().map(|&lam| f(lam)).collect()
    };
    if mapped.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(
            "function undefined (non-finite) on a retained eigenvalue",
        ));
    }
    Ok(HermitianObservable::from_symmetrized(
        a.space().clone(),
        eig.rebuild_with(&mapped),
    ))
}

/// `A^t` on the support of `A` (PSD input, `0^t = 0`).
pub fn psd_power(a: &HermitianObservable, t: f64) -> Result<HermitianObservable> {
    matrix_function(a, |x| x.powf(t), true)
}

/// `log A` restricted to the support of `A`.
pub fn support_log(a: &HermitianObservable) -> Result<HermitianObservable> {
    matrix_function(a, f64::ln, true)
}

/// `exp A` on the full spectrum of a Hermitian operator.
pub fn herm_exp(a: &HermitianObservable) -> Result<HermitianObservable> {
    matrix_function(a, f64::exp, false)
}

/// Schatten p-norm of an arbitrary square matrix.
///
/// Singular values are obtained from the Hermitian eigendecomposition of
/// `M^dag M`; `p = infinity` is requested with `f64::INFINITY`.
pub fn schatten_norm_matrix(m: &ComplexMatrix, p: f64) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::domain("Schatten norm needs a square matrix"));
    }
    if p < 1.0 || p.is_nan() {
        return Err(Error::domain(format!("Schatten norm order {} is below 1", p)));
    }
    let gram = m.dagger().mul(m);
    let eig = crate::operator::eig::jacobi_hermitian_eig(&gram)?;
    let singulars: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&lam| lam.max(0.0).sqrt())
        .collect();
    if p.is_infinite() {
        return Ok(singulars.iter().cloned().fold(0.0, f64::max));
    }
    Ok(singulars
        .iter()
        .map(|s| s.powf(p))
        .sum::<f64>()
        .powf(1.0 / p))
}

/// Schatten p-norm of a Hermitian observable.
pub fn schatten_norm(a: &HermitianObservable, p: f64) -> Result<f64> {
    schatten_norm_matrix(a.matrix(), p)
}

/// Support projector of a PSD operator (eigenvalues above the relative cut).
pub fn support_projector(a: &HermitianObservable) -> Result<HermitianObservable> {
    matrix_function(a, |_| 1.0, true)
}

/// Weight of `rho` outside the support of `sigma`: `Tr[(I - P_sigma) rho]`.
///
/// Values near zero certify `rho << sigma` numerically.
pub fn weight_outside_support(
    rho: &HermitianObservable,
    sigma: &HermitianObservable,
) -> Result<f64> {
    rho.check_same_space(sigma)?;
    let proj = support_projector(sigma)?;
    let overlap = proj.trace_with(rho)?;
    Ok((rho.trace() - overlap).max(0.0))
}

/// `Tr[P_sigma rho]`, the weight of `rho` on the support of `sigma`.
/// Values near zero certify orthogonality of the supports.
pub fn weight_on_support(rho: &HermitianObservable, sigma: &HermitianObservable) -> Result<f64> {
    let proj = support_projector(sigma)?;
    proj.trace_with(rho)
}
