//! Sub-Gaussianity machinery: centered log-MGFs for observables and
//! scalar losses, the operator Hoeffding bound, and change-of-measure
//! sandwiches.

use serde::{Deserialize, Serialize};

use crate::divergence::quantum::quantum_relative_entropy;
use crate::divergence::value::Magnitude;
use crate::divergence::ClassicalDist;
use crate::error::{Error, Result};
use crate::operator::func::schatten_norm;
use crate::operator::types::{DensityOperator, HermitianObservable};
use crate::tolerances::EXP_OVERFLOW_LIMIT;

/// Where a sub-Gaussian certificate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertSource {
    UserSupplied,
    NormDerived,
    GridFitted,
}

/// Sub-Gaussian constants for a learning instance: `mu` for the operator
/// deviations, `tau` for the scalar (classical) deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubGaussianCert {
    pub mu: f64,
    pub tau: f64,
    pub source: CertSource,
}

impl SubGaussianCert {
    pub fn user_supplied(mu: f64, tau: f64) -> Result<Self> {
        if !mu.is_finite() || !tau.is_finite() || mu < 0.0 || tau < 0.0 {
            return Err(Error::config("sub-Gaussian constants must be finite and >= 0"));
        }
        Ok(Self {
            mu,
            tau,
            source: CertSource::UserSupplied,
        })
    }
}

/// Centered quantum log-MGF `log Tr[e^(lambda (L - Tr[L rho] I)) rho]`,
/// evaluated exactly through the eigendecomposition of the centered
/// observable.
pub fn quantum_mgf(l: &HermitianObservable, rho: &DensityOperator, lambda: f64) -> Result<f64> {
    l.check_same_space(rho.as_observable())?;
    let norm_inf = schatten_norm(l, f64::INFINITY)?;
    if lambda.abs() * norm_inf > EXP_OVERFLOW_LIMIT {
        return Err(Error::range(format!(
            "|lambda| * ||L||_inf = {:.3e} would overflow the exponential",
            lambda.abs() * norm_inf
        )));
    }
    let mean = rho.expectation(l)?;
    let centered = l.shift(-mean);
    let eig = centered.eig()?;
    let mapped: Vec<f64> = eig.eigenvalues.iter().map(|&x| (lambda * x).exp()).collect();
    let exp_op = HermitianObservable::from_symmetrized(l.space().clone(), eig.rebuild_with(&mapped));
    let tr = rho.expectation(&exp_op)?;
    if tr <= 0.0 {
        return Err(Error::numerical(format!("nonpositive MGF trace {:.3e}", tr)));
    }
    Ok(tr.ln())
}

/// Outcome of a Hoeffding-bound sweep over a lambda grid.
#[derive(Debug, Clone, Serialize)]
pub struct HoeffdingCheck {
    pub holds: bool,
    /// Minimum of `lambda^2 (b-a)^2 / 8 - mgf(lambda)` over the grid.
    pub worst_slack: f64,
}

/// Uniform lambda grid, defaulting to 101 points on [-10, 10].
pub fn lambda_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![min];
    }
    (0..steps)
        .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
        .collect()
}

pub fn default_lambda_grid() -> Vec<f64> {
    lambda_grid(-10.0, 10.0, 101)
}

/// Check the operator Hoeffding bound
/// `log Tr[e^(lambda(L - Tr[L rho] I)) rho] <= lambda^2 (b-a)^2 / 8`
/// over a lambda grid, after verifying `a I <= L <= b I` spectrally.
pub fn check_quantum_hoeffding(
    l: &HermitianObservable,
    rho: &DensityOperator,
    a: f64,
    b: f64,
    lambdas: &[f64],
) -> Result<HoeffdingCheck> {
    let eig = l.eig()?;
    let lam_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let lam_min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if lam_min < a - 1e-10 || lam_max > b + 1e-10 {
        return Err(Error::domain(format!(
            "spectrum [{:.6}, {:.6}] is not contained in [{}, {}]",
            lam_min, lam_max, a, b
        )));
    }
    let width2 = (b - a) * (b - a);
    let mut worst_slack = f64::INFINITY;
    for &lambda in lambdas {
        let lhs = quantum_mgf(l, rho, lambda)?;
        let rhs = lambda * lambda * width2 / 8.0;
        worst_slack = worst_slack.min(rhs - lhs);
    }
    Ok(HoeffdingCheck {
        holds: worst_slack >= -1e-9,
        worst_slack,
    })
}

/// Sub-Gaussian constant from the operator norm: `mu = ||L||_inf / 2`.
pub fn derive_mu_from_norm(l: &HermitianObservable) -> Result<SubGaussianCert> {
    let mu = schatten_norm(l, f64::INFINITY)? / 2.0;
    Ok(SubGaussianCert {
        mu,
        tau: mu,
        source: CertSource::NormDerived,
    })
}

/// Two-sided change-of-measure bound on `Tr[L rho]` through `sigma`:
/// `Tr[L sigma] +- mu sqrt(2 D(rho||sigma))`.
///
/// The radius constant is the operator Hoeffding one,
/// `mu = (lambda_max - lambda_min)/2`, which equals `||L||_inf / 2` for the
/// one-signed loss observables the derivation targets and stays valid for
/// arbitrary spectra. Returns `None` bounds (vacuous) when `rho` is not
/// absolutely continuous with respect to `sigma`.
pub fn change_of_measure_bound(
    l: &HermitianObservable,
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<(Option<f64>, Option<f64>)> {
    let eig = l.eig()?;
    let lam_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let lam_min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let mu = (lam_max - lam_min) / 2.0;
    let d = quantum_relative_entropy(rho, sigma)?;
    match d.value {
        Magnitude::Infinite => Ok((None, None)),
        Magnitude::Finite(v) => {
            let center = sigma.expectation(l)?;
            let radius = mu * (2.0 * v.max(0.0)).sqrt();
            Ok((Some(center + radius), Some(center - radius)))
        }
    }
}

/// Centered classical log-MGF of a finite random variable.
pub fn classical_mgf(values: &[f64], dist: &ClassicalDist, lambda: f64) -> Result<f64> {
    if values.len() != dist.len() {
        return Err(Error::config("value vector and distribution differ in length"));
    }
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    if lambda.abs() * spread.abs() > EXP_OVERFLOW_LIMIT {
        return Err(Error::range("lambda * range would overflow the exponential"));
    }
    let mean: f64 = values
        .iter()
        .zip(dist.probs())
        .map(|(v, p)| v * p)
        .sum();
    let mgf: f64 = values
        .iter()
        .zip(dist.probs())
        .map(|(v, p)| p * ((lambda * (v - mean)).exp()))
        .sum();
    if mgf <= 0.0 {
        return Err(Error::numerical("nonpositive classical MGF"));
    }
    Ok(mgf.ln())
}

/// Classical Hoeffding check with `tau = (b - a)/2` derived from the value
/// range.
pub fn check_classical_hoeffding(
    values: &[f64],
    dist: &ClassicalDist,
    lambdas: &[f64],
) -> Result<HoeffdingCheck> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let width2 = (max - min) * (max - min);
    let mut worst_slack = f64::INFINITY;
    for &lambda in lambdas {
        let lhs = classical_mgf(values, dist, lambda)?;
        let rhs = lambda * lambda * width2 / 8.0;
        worst_slack = worst_slack.min(rhs - lhs);
    }
    Ok(HoeffdingCheck {
        holds: worst_slack >= -1e-9,
        worst_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::matrix::ComplexMatrix;
    use crate::operator::space::HilbertSpace;

    fn qubit() -> HilbertSpace {
        HilbertSpace::single("q", 2).unwrap()
    }

    fn pauli_z() -> HermitianObservable {
        HermitianObservable::new(qubit(), ComplexMatrix::diag(&[1.0, -1.0])).unwrap()
    }

    #[test]
    fn pauli_z_mgf_is_log_cosh() {
        // Tr[Z rho] = 0 at the maximally mixed state, so the MGF is
        // log((e^lambda + e^-lambda)/2) = log cosh lambda.
        let rho = DensityOperator::maximally_mixed(qubit());
        let v = quantum_mgf(&pauli_z(), &rho, 1.0).unwrap();
        assert!((v - 1f64.cosh().ln()).abs() < 1e-12);
        assert!((v - 0.433781).abs() < 1e-6);
        assert!(quantum_mgf(&pauli_z(), &rho, 0.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn constant_observable_has_zero_mgf() {
        let c = HermitianObservable::identity(qubit()).scale(3.25);
        let rho = DensityOperator::diagonal(qubit(), &[0.8, 0.2]).unwrap();
        for lambda in [-5.0, -1.0, 0.5, 7.0] {
            assert!(quantum_mgf(&c, &rho, lambda).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn mgf_overflow_guard() {
        let l = pauli_z().scale(100.0);
        let rho = DensityOperator::maximally_mixed(qubit());
        assert!(matches!(
            quantum_mgf(&l, &rho, 10.0),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn hoeffding_spot_value() {
        let rho = DensityOperator::maximally_mixed(qubit());
        let check = check_quantum_hoeffding(&pauli_z(), &rho, -1.0, 1.0, &[1.0]).unwrap();
        assert!(check.holds);
        // slack = 0.5 - log cosh 1 ~= 0.066.
        assert!((check.worst_slack - (0.5 - 1f64.cosh().ln())).abs() < 1e-9);
    }

    #[test]
    fn hoeffding_rejects_wrong_interval() {
        let rho = DensityOperator::maximally_mixed(qubit());
        assert!(check_quantum_hoeffding(&pauli_z(), &rho, -0.5, 0.5, &[1.0]).is_err());
    }

    #[test]
    fn mu_from_norm_examples() {
        assert!((derive_mu_from_norm(&pauli_z()).unwrap().mu - 0.5).abs() < 1e-12);
        let x = HermitianObservable::new(
            qubit(),
            ComplexMatrix::from_rows(vec![
                vec![crate::C64::new(0.0, 0.0), crate::C64::new(3.0, 0.0)],
                vec![crate::C64::new(3.0, 0.0), crate::C64::new(0.0, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        assert!((derive_mu_from_norm(&x).unwrap().mu - 1.5).abs() < 1e-10);
        let zero = HermitianObservable::zero(qubit());
        assert!(derive_mu_from_norm(&zero).unwrap().mu.abs() < 1e-14);
    }

    #[test]
    fn change_of_measure_sandwich() {
        let l = pauli_z();
        let rho = DensityOperator::diagonal(qubit(), &[0.7, 0.3]).unwrap();
        let sigma = DensityOperator::diagonal(qubit(), &[0.5, 0.5]).unwrap();
        let (upper, lower) = change_of_measure_bound(&l, &rho, &sigma).unwrap();
        let actual = rho.expectation(&l).unwrap();
        assert!(lower.unwrap() <= actual + 1e-12);
        assert!(actual <= upper.unwrap() + 1e-12);
        // rho = sigma collapses the sandwich.
        let (u2, l2) = change_of_measure_bound(&l, &sigma, &sigma).unwrap();
        assert!((u2.unwrap() - l2.unwrap()).abs() < 1e-9);
        assert!((u2.unwrap() - sigma.expectation(&l).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn classical_mgf_fair_coin() {
        let dist = ClassicalDist::new(vec!["h".into(), "t".into()], vec![0.5, 0.5]).unwrap();
        let v = classical_mgf(&[1.0, -1.0], &dist, 1.0).unwrap();
        assert!((v - 1f64.cosh().ln()).abs() < 1e-12);
        assert!(v <= 0.5);
        // Constant and point-mass cases vanish.
        assert!(classical_mgf(&[2.0, 2.0], &dist, 3.0).unwrap().abs() < 1e-12);
        let point = ClassicalDist::new(vec!["x".into(), "y".into()], vec![1.0, 0.0]).unwrap();
        assert!(classical_mgf(&[5.0, -7.0], &point, 2.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn quantum_mgf_matches_classical_on_diagonals() {
        let l = HermitianObservable::new(qubit(), ComplexMatrix::diag(&[0.9, -0.4])).unwrap();
        let rho = DensityOperator::diagonal(qubit(), &[0.35, 0.65]).unwrap();
        let dist = ClassicalDist::new(vec!["0".into(), "1".into()], vec![0.35, 0.65]).unwrap();
        for lambda in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            let q = quantum_mgf(&l, &rho, lambda).unwrap();
            let c = classical_mgf(&[0.9, -0.4], &dist, lambda).unwrap();
            assert!((q - c).abs() < 1e-12, "lambda {}", lambda);
        }
    }
}
