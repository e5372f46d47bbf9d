//! Single-draw (probabilistic) generalization-error bounds and Monte-Carlo
//! coverage verification.

use serde::Serialize;

use crate::bounds::deviation::{cleaned, renyi_mutual_information, smooth_max_mutual_information};
use crate::divergence::value::Magnitude;
use crate::divergence::modified_sandwiched;
use crate::error::{Error, Result};
use crate::learning::cert::resolved_cert;
use crate::learning::induced::{empirical_loss, sample_ws, true_loss_new, InducedJoint};
use crate::learning::instance::{product_te_hyp, LearningInstance, LearningMode};
use crate::operator::tensor::permute_density;
use crate::tolerances::OUTCOME_DROP_TOL;

/// Which tail bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    ClassicalRenyi,
    ClassicalSmoothMax,
    QuantumRenyi,
    QuantumSmoothMax,
}

impl TailKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TailKind::ClassicalRenyi => "classical-renyi",
            TailKind::ClassicalSmoothMax => "classical-smooth-max",
            TailKind::QuantumRenyi => "quantum-renyi",
            TailKind::QuantumSmoothMax => "quantum-smooth-max",
        }
    }
}

/// Result of a coverage experiment for one tail bound.
#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub kind: TailKind,
    pub delta: f64,
    /// Bound radius; `None` marks a vacuous bound.
    pub epsilon: Option<f64>,
    pub nu: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub empirical_coverage: f64,
    pub draws: usize,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) || delta <= 0.0 {
        return Err(Error::domain(format!("delta {} must lie in (0,1)", delta)));
    }
    Ok(())
}

/// Classical single-draw radius through the Renyi mutual information:
/// `sqrt((2 tau^2 / n)(I_gamma + log 2 + gamma/(gamma-1) log(1/delta)))`.
pub fn classical_tail_renyi(
    joint: &InducedJoint,
    tau: f64,
    n: usize,
    gamma: f64,
    delta: f64,
) -> Result<Option<f64>> {
    check_delta(delta)?;
    if gamma <= 1.0 {
        return Err(Error::domain("the Renyi tail bound needs gamma > 1"));
    }
    match renyi_mutual_information(joint, gamma)? {
        Magnitude::Infinite => Ok(None),
        Magnitude::Finite(i) => {
            let inner = cleaned(i)
                + 2f64.ln()
                + gamma / (gamma - 1.0) * (1.0 / delta).ln();
            Ok(Some((2.0 * tau * tau / n as f64 * inner).sqrt()))
        }
    }
}

/// Classical single-draw radius through the smooth-max mutual information:
/// `sqrt((2 tau^2 / n)(I_max^(nu) + log 2 + log(1/(delta - nu))))`.
pub fn classical_tail_smooth_max(
    joint: &InducedJoint,
    tau: f64,
    n: usize,
    nu: f64,
    delta: f64,
) -> Result<Option<f64>> {
    check_delta(delta)?;
    if !(0.0..1.0).contains(&nu) || nu >= delta {
        return Err(Error::domain(format!(
            "smoothing nu = {} must satisfy 0 <= nu < delta = {}",
            nu, delta
        )));
    }
    match smooth_max_mutual_information(joint, nu)? {
        Magnitude::Infinite => Ok(None),
        Magnitude::Finite(i) => {
            // The smooth-max information is a quantile and may be negative;
            // only the whole bracket is clamped (a negative bracket means
            // radius zero already reaches the confidence level).
            let inner = (i + 2f64.ln() + (1.0 / (delta - nu)).ln()).max(0.0);
            Ok(Some((2.0 * tau * tau / n as f64 * inner).sqrt()))
        }
    }
}

/// The hypothesis-uniform deviation term `c1(alpha)`: the supremum over
/// hypotheses in the support of `P_W` of the fresh-sample expectation of
/// the two per-sample deviation radicals with `1/(n alpha)` scaling.
/// Samples whose pair was dropped from the enumeration contribute zero.
pub fn c1_term(
    joint: &InducedJoint,
    instance: &LearningInstance,
    mu: f64,
    alpha: f64,
) -> Result<Option<f64>> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::domain("c1 is defined for alpha in (0,1)"));
    }
    let n = instance.n as f64;
    let scale = 2.0 * mu * mu / (n * alpha);
    let mut sup: f64 = 0.0;
    for w in 0..joint.w_count() {
        if joint.marginal_w[w] <= OUTCOME_DROP_TOL {
            continue;
        }
        let sigma_w = joint.sigma_hyp_w[w]
            .as_ref()
            .expect("positive-mass hypothesis has a mixed state");
        let mut acc = 0.0;
        for (s_idx, _) in joint.samples.iter().enumerate() {
            let Some(pr) = joint.pair(w, s_idx) else {
                continue;
            };
            let reference = permute_density(
                &product_te_hyp(&joint.rho_te[s_idx], &pr.sigma_hyp)?,
                pr.sigma.space(),
            )?;
            let d1 = modified_sandwiched(&pr.sigma, &reference, alpha)?.value;
            let d2 = modified_sandwiched(&pr.sigma_hyp, sigma_w, alpha)?.value;
            let (Some(d1), Some(d2)) = (d1.finite(), d2.finite()) else {
                return Ok(None);
            };
            acc += joint.prior_s[s_idx]
                * ((scale * cleaned(d1)).sqrt() + (scale * cleaned(d2)).sqrt());
        }
        sup = sup.max(acc);
    }
    Ok(Some(sup))
}

fn best_c1(
    joint: &InducedJoint,
    instance: &LearningInstance,
    mu: f64,
    alpha_grid: &[f64],
) -> Result<Option<(f64, f64)>> {
    let mut best: Option<(f64, f64)> = None;
    for &alpha in alpha_grid.iter().filter(|&&a| 0.0 < a && a < 1.0) {
        if let Some(c) = c1_term(joint, instance, mu, alpha)? {
            if best.is_none_or(|(_, b)| c < b) {
                best = Some((alpha, c));
            }
        }
    }
    Ok(best)
}

/// Quantum single-draw radius: the classical Renyi radius plus the best
/// `c1(alpha)` over the grid. Needs the i.i.d. instance structure.
pub fn quantum_tail_renyi(
    joint: &InducedJoint,
    instance: &LearningInstance,
    gamma: f64,
    delta: f64,
    alpha_grid: &[f64],
) -> Result<(Option<f64>, Option<f64>)> {
    if instance.mode != LearningMode::IidLocal {
        return Err(Error::config("the quantum tail bounds need an iid_local instance"));
    }
    let cert = resolved_cert(joint, instance)?;
    let classical = classical_tail_renyi(joint, cert.tau, instance.n, gamma, delta)?;
    let c1 = best_c1(joint, instance, cert.mu, alpha_grid)?;
    match (classical, c1) {
        (Some(radius), Some((_, c))) => Ok((Some(radius + c), Some(c))),
        _ => Ok((None, None)),
    }
}

/// Quantum smooth-max radius: analogous with the smooth-max mutual
/// information.
pub fn quantum_tail_smooth_max(
    joint: &InducedJoint,
    instance: &LearningInstance,
    nu: f64,
    delta: f64,
    alpha_grid: &[f64],
) -> Result<(Option<f64>, Option<f64>)> {
    if instance.mode != LearningMode::IidLocal {
        return Err(Error::config("the quantum tail bounds need an iid_local instance"));
    }
    let cert = resolved_cert(joint, instance)?;
    let classical = classical_tail_smooth_max(joint, cert.tau, instance.n, nu, delta)?;
    let c1 = best_c1(joint, instance, cert.mu, alpha_grid)?;
    match (classical, c1) {
        (Some(radius), Some((_, c))) => Ok((Some(radius + c), Some(c))),
        _ => Ok((None, None)),
    }
}

/// Parameters for one coverage run.
#[derive(Debug, Clone)]
pub struct TailParams {
    pub delta: f64,
    pub nu: Option<f64>,
    pub gamma: Option<f64>,
    pub alpha_grid: Vec<f64>,
}

/// Draw `(W, S)` pairs from the exact joint, evaluate `|gen(w, s)|`
/// exactly per retained pair, and report the fraction within the bound
/// radius. An infinite (vacuous) radius covers everything.
pub fn verify_coverage(
    joint: &InducedJoint,
    instance: &LearningInstance,
    kind: TailKind,
    params: &TailParams,
    draws: usize,
    seed: u64,
) -> Result<TailReport> {
    if draws < 1000 {
        return Err(Error::config("coverage verification needs at least 1000 draws"));
    }
    let cert = resolved_cert(joint, instance)?;
    let (epsilon, alpha) = match kind {
        TailKind::ClassicalRenyi => {
            let gamma = params
                .gamma
                .ok_or_else(|| Error::config("gamma required for the Renyi tail"))?;
            (
                classical_tail_renyi(joint, cert.tau, instance.n, gamma, params.delta)?,
                None,
            )
        }
        TailKind::ClassicalSmoothMax => {
            let nu = params
                .nu
                .ok_or_else(|| Error::config("nu required for the smooth-max tail"))?;
            (
                classical_tail_smooth_max(joint, cert.tau, instance.n, nu, params.delta)?,
                None,
            )
        }
        TailKind::QuantumRenyi => {
            let gamma = params
                .gamma
                .ok_or_else(|| Error::config("gamma required for the Renyi tail"))?;
            let (eps, _) =
                quantum_tail_renyi(joint, instance, gamma, params.delta, &params.alpha_grid)?;
            let best = best_c1(joint, instance, cert.mu, &params.alpha_grid)?;
            (eps, best.map(|(a, _)| a))
        }
        TailKind::QuantumSmoothMax => {
            let nu = params
                .nu
                .ok_or_else(|| Error::config("nu required for the smooth-max tail"))?;
            let (eps, _) =
                quantum_tail_smooth_max(joint, instance, nu, params.delta, &params.alpha_grid)?;
            let best = best_c1(joint, instance, cert.mu, &params.alpha_grid)?;
            (eps, best.map(|(a, _)| a))
        }
    };

    // Exact |gen| per retained pair, then a table lookup per draw.
    let mut gen_table = vec![vec![f64::NAN; joint.samples.len()]; joint.w_count()];
    #[allow(clippy::needless_range_loop)]
    for w in 0..joint.w_count() {
        if joint.marginal_w[w] <= OUTCOME_DROP_TOL {
            continue;
        }
        let true_loss = true_loss_new(joint, instance, w)?;
        for s_idx in 0..joint.samples.len() {
            if joint.pair(w, s_idx).is_some() {
                gen_table[w][s_idx] =
                    (true_loss - empirical_loss(joint, instance, w, s_idx)?).abs();
            }
        }
    }
    let draws_vec = sample_ws(joint, draws, seed);
    let covered = match epsilon {
        None => draws,
        Some(eps) => draws_vec
            .iter()
            .filter(|(w, s_idx)| gen_table[*w][*s_idx] <= eps + 1e-12)
            .count(),
    };

    Ok(TailReport {
        kind,
        delta: params.delta,
        epsilon,
        nu: params.nu,
        gamma: params.gamma,
        alpha,
        empirical_coverage: covered as f64 / draws as f64,
        draws,
    })
}
