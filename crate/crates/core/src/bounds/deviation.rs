//! Per-pair deviation terms and the classical penalty term.

use crate::divergence::quantum::{
    modified_sandwiched, petz_renyi, quantum_relative_entropy,
};
use crate::divergence::value::Magnitude;
use crate::divergence::{classical_kl, classical_renyi, smooth_max_divergence, ClassicalDist};
use crate::error::{Error, Result};
use crate::learning::induced::InducedJoint;
use crate::learning::instance::product_te_hyp;
use crate::operator::tensor::permute_density;
use crate::operator::types::DensityOperator;
use crate::tolerances::{ORDER_ONE_EPS, OUTCOME_DROP_TOL};

/// Which quantum divergence drives the deviation terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantumDivKind {
    Modified,
    Petz,
    Kl,
}

fn divergence(
    kind: QuantumDivKind,
    alpha: Option<f64>,
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<Magnitude> {
    Ok(match kind {
        QuantumDivKind::Kl => quantum_relative_entropy(rho, sigma)?.value,
        QuantumDivKind::Modified => {
            modified_sandwiched(rho, sigma, alpha.ok_or_else(missing_alpha)?)?.value
        }
        QuantumDivKind::Petz => petz_renyi(rho, sigma, alpha.ok_or_else(missing_alpha)?)?.value,
    })
}

fn missing_alpha() -> Error {
    Error::domain("Renyi deviation terms need an order alpha")
}

/// Clamp a finite divergence to `[0, inf)` and squash sub-noise values to
/// exact zero so the radical does not amplify eigensolver noise.
pub(crate) fn cleaned(d: f64) -> f64 {
    if d < crate::tolerances::DIVERGENCE_NOISE_FLOOR {
        0.0
    } else {
        d
    }
}

/// Square-root penalty `sqrt(2 mu^2 D / c)` with `c = alpha` below 1 and
/// `c = 1` otherwise (and for the KL kind).
fn radical(mu: f64, div: Magnitude, alpha: Option<f64>) -> Magnitude {
    let c = match alpha {
        Some(a) if a < 1.0 => a,
        _ => 1.0,
    };
    match div {
        Magnitude::Infinite => Magnitude::Infinite,
        Magnitude::Finite(d) => Magnitude::Finite((2.0 * mu * mu * cleaned(d) / c).sqrt()),
    }
}

/// The two quantum deviation radicals for one retained pair:
/// `d1` against `rho_te(s) (x) sigma_hyp(w,s)` and `d2` for the hypothesis
/// drift `sigma_hyp(w,s)` versus `sigma_hyp(w)`.
pub fn deviation_terms(
    joint: &InducedJoint,
    mu: f64,
    w: usize,
    s_idx: usize,
    kind: QuantumDivKind,
    alpha: Option<f64>,
) -> Result<(Magnitude, Magnitude)> {
    if let Some(a) = alpha {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::domain(format!("order {} must be positive", a)));
        }
    }
    let pr = joint
        .pair(w, s_idx)
        .ok_or_else(|| Error::domain("pair (w, s) was dropped from the enumeration"))?;
    let reference = permute_density(
        &product_te_hyp(&joint.rho_te[s_idx], &pr.sigma_hyp)?,
        pr.sigma.space(),
    )?;
    let d1 = radical(mu, divergence(kind, alpha, &pr.sigma, &reference)?, alpha);
    let sigma_w = joint.sigma_hyp_w[w]
        .as_ref()
        .ok_or_else(|| Error::domain("hypothesis has zero probability"))?;
    let d2 = radical(
        mu,
        divergence(kind, alpha, &pr.sigma_hyp, sigma_w)?,
        alpha,
    );
    Ok((d1, d2))
}

/// Classical divergence value routed by order (KL near 1).
pub fn classical_div_by_order(
    p: &ClassicalDist,
    q: &ClassicalDist,
    gamma: f64,
) -> Result<Magnitude> {
    if (gamma - 1.0).abs() <= ORDER_ONE_EPS {
        Ok(classical_kl(p, q)?.value)
    } else {
        Ok(classical_renyi(p, q, gamma)?.value)
    }
}

/// Classical penalty `E_W[sqrt(2 tau^2 D^c_gamma(P_{S|W} || P_S)/c)]`.
pub fn classical_gamma_term(joint: &InducedJoint, tau: f64, gamma: f64) -> Result<Magnitude> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::domain(format!("order {} must be positive", gamma)));
    }
    let c = if gamma < 1.0 { gamma } else { 1.0 };
    let prior = joint.prior_s_dist();
    let mut acc = 0.0;
    for w in 0..joint.w_count() {
        if joint.marginal_w[w] <= OUTCOME_DROP_TOL {
            continue;
        }
        let posterior = joint.posterior_dist(w)?;
        match classical_div_by_order(&posterior, &prior, gamma)? {
            Magnitude::Infinite => return Ok(Magnitude::Infinite),
            Magnitude::Finite(d) => {
                acc += joint.marginal_w[w] * (2.0 * tau * tau * cleaned(d) / c).sqrt();
            }
        }
    }
    Ok(Magnitude::Finite(acc))
}

/// Renyi mutual information `I^c_gamma[S;W] = D^c_gamma(P_WS || P_W x P_S)`.
pub fn renyi_mutual_information(joint: &InducedJoint, gamma: f64) -> Result<Magnitude> {
    classical_div_by_order(&joint.joint_dist(), &joint.product_dist(), gamma)
}

/// Shannon mutual information `I[S;W]`.
pub fn mutual_information(joint: &InducedJoint) -> Result<Magnitude> {
    Ok(classical_kl(&joint.joint_dist(), &joint.product_dist())?.value)
}

/// Smooth-max mutual information `I^(nu)_max[S;W]`.
pub fn smooth_max_mutual_information(joint: &InducedJoint, nu: f64) -> Result<Magnitude> {
    Ok(smooth_max_divergence(&joint.joint_dist(), &joint.product_dist(), nu)?.value)
}

/// Renyi mutual information of `(W, Z_i)` for one sample coordinate.
pub fn coordinate_renyi_mutual_information(
    joint: &InducedJoint,
    coord: usize,
    z_count: usize,
    gamma: f64,
) -> Result<Magnitude> {
    let (j, p) = joint.coordinate_joint_and_product(coord, z_count);
    classical_div_by_order(&j, &p, gamma)
}

pub fn coordinate_mutual_information(
    joint: &InducedJoint,
    coord: usize,
    z_count: usize,
) -> Result<Magnitude> {
    let (j, p) = joint.coordinate_joint_and_product(coord, z_count);
    Ok(classical_kl(&j, &p)?.value)
}
