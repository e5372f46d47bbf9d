//! Variational lower-bound objective for the Petz and modified sandwiched
//! divergences: `(alpha/(alpha-1)) log Tr[e^((alpha-1)H) rho] - log Tr[e^(alpha H) sigma]`.
//!
//! Every Hermitian `H` yields a lower bound on both divergences; the
//! optimizer here is a self-test aid, never the reported divergence.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::eig::jacobi_hermitian_eig;
use crate::operator::matrix::ComplexMatrix;
use crate::operator::types::{DensityOperator, HermitianObservable};
use crate::opt::{nelder_mead, NelderMeadConfig};
use crate::tolerances::EXP_OVERFLOW_LIMIT;

/// Evaluate the variational objective at a fixed `H`.
///
/// The objective is invariant under `H -> H + cI`; the implementation
/// shifts by `-lambda_max(H)` so the exponentials stay bounded by one on
/// the side that matters, and reports a range error when the remaining
/// spread would still overflow.
pub fn variational_objective(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
    h: &HermitianObservable,
) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        return Err(Error::domain(format!(
            "variational objective needs alpha in (0,1) or (1,inf), got {}",
            alpha
        )));
    }
    rho.as_observable().check_same_space(sigma.as_observable())?;
    h.check_same_space(rho.as_observable())?;

    let eig = h.eig()?;
    let lam_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let lam_min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let spread = lam_max - lam_min;
    let worst_exponent = spread * (alpha.max((alpha - 1.0).abs()));
    if worst_exponent > EXP_OVERFLOW_LIMIT {
        return Err(Error::range(format!(
            "spectral spread {:.3e} of H would overflow the exponentials",
            spread
        )));
    }

    // Shifted eigenvalues are <= 0.
    let shifted: Vec<f64> = eig.eigenvalues.iter().map(|&l| l - lam_max).collect();
    let term = |scale: f64, state: &DensityOperator| -> Result<f64> {
        let mapped: Vec<f64> = shifted.iter().map(|&l| (scale * l).exp()).collect();
        let exp_h = HermitianObservable::from_symmetrized(
            h.space().clone(),
            eig.rebuild_with(&mapped),
        );
        let tr = state.expectation(&exp_h)?;
        if tr <= 0.0 {
            return Err(Error::numerical(format!("nonpositive trace {:.3e} in MGF", tr)));
        }
        Ok(tr.ln())
    };

    let first = term(alpha - 1.0, rho)?;
    let second = term(alpha, sigma)?;
    Ok(alpha / (alpha - 1.0) * first - second)
}

fn hermitian_from_params(params: &[f64], d: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        a[(i, i)] = C64::new(params[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            let v = C64::new(params[k], params[k + 1]);
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
            k += 2;
        }
    }
    a
}

fn params_from_hermitian(a: &ComplexMatrix) -> Vec<f64> {
    let d = a.rows;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(a[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(a[(i, j)].re);
            out.push(a[(i, j)].im);
        }
    }
    out
}

/// Best variational lower bound found by Nelder-Mead over `H`.
///
/// Warm-started at the log of the likelihood ratio pinched in the
/// eigenbasis of `sigma`; ratios are clamped before taking logs so the
/// start is always well-defined.
pub fn optimize_variational(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
    max_iterations: usize,
) -> Result<f64> {
    let d = rho.dim();
    let sig_eig = jacobi_hermitian_eig(sigma.matrix())?;
    let u = &sig_eig.eigenvectors;
    let mut pinched_rho = Vec::with_capacity(d);
    for k in 0..d {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += u[(i, k)].conj() * rho.matrix()[(i, j)] * u[(j, k)];
            }
        }
        pinched_rho.push(acc.re.max(0.0));
    }
    let log_ratio: Vec<f64> = pinched_rho
        .iter()
        .zip(&sig_eig.eigenvalues)
        .map(|(&p, &q)| (p.clamp(1e-12, 1e12) / q.clamp(1e-12, 1e12)).ln())
        .collect();
    let h0 = sig_eig.rebuild_with(&log_ratio);

    let objective = |params: &[f64]| {
        let h = HermitianObservable::from_symmetrized(
            rho.space().clone(),
            hermitian_from_params(params, d),
        );
        match variational_objective(rho, sigma, alpha, &h) {
            Ok(v) => -v,
            Err(_) => 1e30,
        }
    };
    let start = params_from_hermitian(&h0);
    let nm = nelder_mead(
        objective,
        &start,
        &NelderMeadConfig {
            max_iterations,
            diameter_tol: 1e-8,
            initial_step: 0.2,
        },
    );
    Ok(-nm.value)
}
