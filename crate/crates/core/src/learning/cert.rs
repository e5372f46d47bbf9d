//! Derivation and auditing of sub-Gaussian certificates for an instance.

use crate::error::Result;
use crate::learning::induced::InducedJoint;
use crate::learning::instance::{product_te_hyp, LearningInstance};
use crate::operator::func::schatten_norm;
use crate::operator::tensor::trace_pair;
use crate::subgaussian::{classical_mgf, quantum_mgf, CertSource, SubGaussianCert};

/// The scalar loss families entering the classical deviation terms:
/// `f_w(s) = Tr[L(w,s)(rho_te(s) (x) sigma_hyp(w))]`,
/// `g_w(s) = Tr[L(w,s)(rho_te(s) (x) sigma_hyp(w,s))]`,
/// `h_w(s) = Tr[L(w,s) sigma(w,s)]` (the empirical loss).
pub struct ScalarLossTables {
    /// `[w][s_idx]`, NaN where the pair was dropped or w has no mass.
    pub f: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
}

pub fn scalar_loss_tables(
    joint: &InducedJoint,
    instance: &LearningInstance,
) -> Result<ScalarLossTables> {
    let w_count = joint.w_count();
    let s_count = joint.samples.len();
    let mut f = vec![vec![f64::NAN; s_count]; w_count];
    let mut g = vec![vec![f64::NAN; s_count]; w_count];
    let mut h = vec![vec![f64::NAN; s_count]; w_count];
    for w in 0..w_count {
        let sigma_w = joint.sigma_hyp_w[w].as_ref();
        for (s_idx, s) in joint.samples.iter().enumerate() {
            let loss = instance.loss(w, s, &joint.loss_space)?;
            if let Some(sw) = sigma_w {
                let reference = product_te_hyp(&joint.rho_te[s_idx], sw)?;
                f[w][s_idx] = trace_pair(&loss, &reference)?;
            }
            if let Some(pr) = joint.pair(w, s_idx) {
                let reference = product_te_hyp(&joint.rho_te[s_idx], &pr.sigma_hyp)?;
                g[w][s_idx] = trace_pair(&loss, &reference)?;
                h[w][s_idx] = trace_pair(&loss, &pr.sigma)?;
            }
        }
    }
    Ok(ScalarLossTables { f, g, h })
}

fn half_range(values: impl Iterator<Item = f64>) -> f64 {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        if v.is_nan() {
            continue;
        }
        min = min.min(v);
        max = max.max(v);
    }
    if min > max {
        0.0
    } else {
        (max - min) / 2.0
    }
}

/// Resolve the instance certificate: use the user-supplied constants when
/// present, otherwise derive `mu` from the worst loss-operator norm and
/// `tau` from the worst half-range of the scalar loss families.
pub fn resolved_cert(
    joint: &InducedJoint,
    instance: &LearningInstance,
) -> Result<SubGaussianCert> {
    if let Some(cert) = instance.cert {
        return Ok(cert);
    }
    let mut worst_norm: f64 = 0.0;
    for pr in &joint.pairs {
        let loss = instance.loss(pr.w, &joint.samples[pr.s_idx], &joint.loss_space)?;
        worst_norm = worst_norm.max(schatten_norm(&loss, f64::INFINITY)?);
    }
    let tables = scalar_loss_tables(joint, instance)?;
    let mut tau: f64 = 0.0;
    for w in 0..joint.w_count() {
        tau = tau.max(half_range(tables.f[w].iter().copied()));
        tau = tau.max(half_range(tables.g[w].iter().copied()));
        tau = tau.max(half_range(tables.h[w].iter().copied()));
    }
    Ok(SubGaussianCert {
        mu: worst_norm / 2.0,
        tau,
        source: CertSource::NormDerived,
    })
}

/// Audit the sub-Gaussianity assumptions behind the bound evaluators on a
/// lambda grid. Violations come back as warnings, never errors: the
/// assumptions belong to the theorems, the audit merely reports.
pub fn audit_certificates(
    joint: &InducedJoint,
    instance: &LearningInstance,
    cert: &SubGaussianCert,
    lambdas: &[f64],
) -> Result<Vec<String>> {
    let mut warnings = Vec::new();
    let slack = 1e-9;
    let mu_bound = |lambda: f64| lambda * lambda * cert.mu * cert.mu / 2.0;
    let tau_bound = |lambda: f64| lambda * lambda * cert.tau * cert.tau / 2.0;

    // Operator MGF conditions against the three reference states.
    for pr in &joint.pairs {
        let s = &joint.samples[pr.s_idx];
        let loss = instance.loss(pr.w, s, &joint.loss_space)?;
        let mut refs = vec![
            ("sigma(w,s)", pr.sigma.clone()),
            (
                "rho_te(s) x sigma_hyp(w,s)",
                crate::operator::tensor::permute_density(
                    &product_te_hyp(&joint.rho_te[pr.s_idx], &pr.sigma_hyp)?,
                    loss.space(),
                )?,
            ),
        ];
        if let Some(sw) = joint.sigma_hyp_w[pr.w].as_ref() {
            refs.push((
                "rho_te(s) x sigma_hyp(w)",
                crate::operator::tensor::permute_density(
                    &product_te_hyp(&joint.rho_te[pr.s_idx], sw)?,
                    loss.space(),
                )?,
            ));
        }
        for (name, state) in refs {
            for &lambda in lambdas {
                let value = match quantum_mgf(&loss, &state, lambda) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                if value > mu_bound(lambda) + slack {
                    warnings.push(format!(
                        "quantum MGF vs {} exceeds the mu certificate at (w={}, s={}, lambda={}): {:.3e} > {:.3e}",
                        name, pr.w, pr.s_idx, lambda, value, mu_bound(lambda)
                    ));
                    break;
                }
            }
        }
    }

    // Scalar MGF conditions under the prior and the posteriors.
    let tables = scalar_loss_tables(joint, instance)?;
    let prior = joint.prior_s_dist();
    for w in 0..joint.w_count() {
        if joint.marginal_w[w] <= 0.0 {
            continue;
        }
        let f_values: Vec<f64> = tables.f[w].iter().map(|v| if v.is_nan() { 0.0 } else { *v }).collect();
        let posterior = joint.posterior_dist(w)?;
        for (dist, dist_name) in [(&prior, "P^n"), (&posterior, "P_{S|W}")] {
            for &lambda in lambdas {
                let value = match classical_mgf(&f_values, dist, lambda) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                if value > tau_bound(lambda) + slack {
                    warnings.push(format!(
                        "classical MGF under {} exceeds the tau certificate at (w={}, lambda={}): {:.3e} > {:.3e}",
                        dist_name, w, lambda, value, tau_bound(lambda)
                    ));
                    break;
                }
            }
        }
    }
    Ok(warnings)
}
