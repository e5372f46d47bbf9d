//! Quantum divergences: relative entropy, Petz, sandwiched, reverse
//! sandwiched, and the modified sandwiched combination.

use crate::divergence::value::{DivergenceKind, DivergenceValue, Magnitude};
use crate::error::{Error, Result};
use crate::operator::func::{psd_power, support_log, weight_on_support, weight_outside_support};
use crate::operator::types::DensityOperator;
use crate::tolerances::{ORDER_ONE_EPS, SUPPORT_CONTAINMENT_TOL};

/// Numerical `rho << sigma`: weight of `rho` outside the support of
/// `sigma` below tolerance.
pub fn absolutely_continuous(rho: &DensityOperator, sigma: &DensityOperator) -> Result<bool> {
    Ok(
        weight_outside_support(rho.as_observable(), sigma.as_observable())?
            <= SUPPORT_CONTAINMENT_TOL,
    )
}

/// Numerical `rho  _|_ sigma`: weight of `rho` on the support of `sigma`
/// below tolerance.
pub fn orthogonal_supports(rho: &DensityOperator, sigma: &DensityOperator) -> Result<bool> {
    Ok(weight_on_support(rho.as_observable(), sigma.as_observable())? <= SUPPORT_CONTAINMENT_TOL)
}

fn check_orders(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::domain(format!("Renyi order {} must be positive", alpha)));
    }
    Ok(())
}

fn relative_entropy_magnitude(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Magnitude> {
    rho.as_observable().check_same_space(sigma.as_observable())?;
    if !absolutely_continuous(rho, sigma)? {
        return Ok(Magnitude::Infinite);
    }
    let log_rho = support_log(rho.as_observable())?;
    let log_sigma = support_log(sigma.as_observable())?;
    let diff = log_rho.sub(&log_sigma)?;
    Ok(Magnitude::Finite(rho.expectation(&diff)?))
}

/// Umegaki relative entropy `Tr[rho (log rho - log sigma)]` with
/// support-restricted logarithms; infinite when `rho` is not absolutely
/// continuous with respect to `sigma`.
pub fn quantum_relative_entropy(
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<DivergenceValue> {
    Ok(DivergenceValue {
        kind: DivergenceKind::RelativeEntropy,
        alpha: None,
        value: relative_entropy_magnitude(rho, sigma)?,
        diagnostics: None,
    })
}

fn petz_magnitude(rho: &DensityOperator, sigma: &DensityOperator, alpha: f64) -> Result<Magnitude> {
    if (alpha - 1.0).abs() <= ORDER_ONE_EPS {
        return relative_entropy_magnitude(rho, sigma);
    }
    if alpha > 1.0 {
        if !absolutely_continuous(rho, sigma)? {
            return Ok(Magnitude::Infinite);
        }
    } else if orthogonal_supports(rho, sigma)? {
        return Ok(Magnitude::Infinite);
    }
    let rho_a = psd_power(rho.as_observable(), alpha)?;
    let sigma_1a = psd_power(sigma.as_observable(), 1.0 - alpha)?;
    let t = rho_a.trace_with(&sigma_1a)?;
    if t <= 0.0 {
        return if alpha < 1.0 {
            Ok(Magnitude::Infinite)
        } else {
            Err(Error::numerical(format!(
                "nonpositive Petz trace {:.3e} despite support containment",
                t
            )))
        };
    }
    Ok(Magnitude::Finite(t.ln() / (alpha - 1.0)))
}

/// Petz Renyi divergence `(1/(alpha-1)) log Tr[rho^alpha sigma^(1-alpha)]`
/// with support-restricted powers. Orders within [`ORDER_ONE_EPS`] of 1
/// evaluate the relative entropy instead.
pub fn petz_renyi(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_orders(alpha)?;
    rho.as_observable().check_same_space(sigma.as_observable())?;
    Ok(DivergenceValue {
        kind: DivergenceKind::Petz,
        alpha: Some(alpha),
        value: petz_magnitude(rho, sigma, alpha)?,
        diagnostics: None,
    })
}

fn sandwiched_magnitude(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
) -> Result<Magnitude> {
    if (alpha - 1.0).abs() <= ORDER_ONE_EPS {
        return relative_entropy_magnitude(rho, sigma);
    }
    if alpha > 1.0 {
        if !absolutely_continuous(rho, sigma)? {
            return Ok(Magnitude::Infinite);
        }
    } else if orthogonal_supports(rho, sigma)? {
        return Ok(Magnitude::Infinite);
    }
    let exponent = (1.0 - alpha) / (2.0 * alpha);
    let s = psd_power(sigma.as_observable(), exponent)?;
    let inner = crate::operator::types::HermitianObservable::from_symmetrized(
        rho.space().clone(),
        s.matrix().mul(rho.matrix()).mul(s.matrix()),
    );
    let powered = psd_power(&inner, alpha)?;
    let t = powered.trace();
    if t <= 0.0 {
        return if alpha < 1.0 {
            Ok(Magnitude::Infinite)
        } else {
            Err(Error::numerical(format!(
                "nonpositive sandwiched trace {:.3e} despite support containment",
                t
            )))
        };
    }
    Ok(Magnitude::Finite(t.ln() / (alpha - 1.0)))
}

/// Sandwiched Renyi divergence
/// `(1/(alpha-1)) log Tr[(sigma^((1-alpha)/2alpha) rho sigma^((1-alpha)/2alpha))^alpha]`.
pub fn sandwiched_renyi(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_orders(alpha)?;
    rho.as_observable().check_same_space(sigma.as_observable())?;
    Ok(DivergenceValue {
        kind: DivergenceKind::Sandwiched,
        alpha: Some(alpha),
        value: sandwiched_magnitude(rho, sigma, alpha)?,
        diagnostics: None,
    })
}

/// Reverse sandwiched divergence
/// `(alpha/(1-alpha)) * sandwiched_{1-alpha}(sigma || rho)`, defined for
/// `alpha in (0,1)`.
pub fn reverse_sandwiched(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_orders(alpha)?;
    rho.as_observable().check_same_space(sigma.as_observable())?;
    if (alpha - 1.0).abs() <= ORDER_ONE_EPS {
        return Ok(DivergenceValue {
            kind: DivergenceKind::ReverseSandwiched,
            alpha: Some(alpha),
            value: relative_entropy_magnitude(rho, sigma)?,
            diagnostics: None,
        });
    }
    if alpha > 1.0 {
        return Err(Error::domain(
            "reverse sandwiched divergence needs alpha in (0,1): the flipped order 1-alpha leaves the sandwiched domain",
        ));
    }
    let inner = sandwiched_magnitude(sigma, rho, 1.0 - alpha)?;
    let value = match inner {
        Magnitude::Infinite => Magnitude::Infinite,
        Magnitude::Finite(v) => Magnitude::Finite(alpha / (1.0 - alpha) * v),
    };
    Ok(DivergenceValue {
        kind: DivergenceKind::ReverseSandwiched,
        alpha: Some(alpha),
        value,
        diagnostics: None,
    })
}

/// Modified sandwiched divergence: the reverse-sandwiched branch below
/// `alpha = 1/2`, the sandwiched branch at and above it (including
/// `alpha > 1`, where only the sandwiched branch is defined).
pub fn modified_sandwiched(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_orders(alpha)?;
    let inner = if alpha < 0.5 {
        reverse_sandwiched(rho, sigma, alpha)?
    } else {
        sandwiched_renyi(rho, sigma, alpha)?
    };
    Ok(DivergenceValue {
        kind: DivergenceKind::ModifiedSandwiched,
        alpha: Some(alpha),
        value: inner.value,
        diagnostics: None,
    })
}
