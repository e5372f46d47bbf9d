//! Bound evaluators: the naive L1/Lp route, the KL route, the Renyi
//! families, the i.i.d. individual-sample variant, and the classical
//! reference bounds.

use crate::bounds::deviation::{
    classical_div_by_order, classical_gamma_term, cleaned, coordinate_mutual_information,
    deviation_terms, mutual_information, QuantumDivKind,
};
use crate::bounds::report::{BoundKind, BoundReport, GridPoint};
use crate::divergence::lp_distance;
use crate::divergence::value::Magnitude;
use crate::error::{Error, Result};
use crate::learning::cert::{resolved_cert, scalar_loss_tables};
use crate::learning::induced::{expected_gen, expected_gen_old, InducedJoint};
use crate::learning::instance::{product_te_hyp, LearningInstance, LearningMode};
use crate::operator::func::{schatten_norm, schatten_norm_matrix};
use crate::operator::tensor::permute_density;
use crate::tolerances::OUTCOME_DROP_TOL;

/// 25 log-spaced orders on [0.05, 0.95].
pub fn default_alpha_grid_below() -> Vec<f64> {
    log_spaced(0.05, 0.95, 25)
}

/// 25 log-spaced orders on [1.05, 4].
pub fn default_alpha_grid_above() -> Vec<f64> {
    log_spaced(1.05, 4.0, 25)
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Golden-section refinement of a scalar function around a bracketing
/// interval; returns the best (x, f(x)) among all evaluations. Vacuous
/// (None) evaluations are treated as worse than any finite value.
fn golden_refine(
    f: &impl Fn(f64) -> Option<f64>,
    mut a: f64,
    mut b: f64,
    iterations: usize,
    mut best: (f64, Option<f64>),
) -> (f64, Option<f64>) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let value_or_inf = |v: &Option<f64>| v.unwrap_or(f64::INFINITY);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iterations {
        if value_or_inf(&f1) < value_or_inf(&best.1) {
            best = (x1, f1);
        }
        if value_or_inf(&f2) < value_or_inf(&best.1) {
            best = (x2, f2);
        }
        if value_or_inf(&f1) <= value_or_inf(&f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    best
}

/// Minimize over a grid plus golden refinement around the grid argmin.
fn grid_optimize(f: &impl Fn(f64) -> Option<f64>, grid: &[f64]) -> Option<(f64, f64)> {
    if grid.is_empty() {
        return None;
    }
    let evals: Vec<Option<f64>> = grid.iter().map(|&x| f(x)).collect();
    let mut best_idx: Option<usize> = None;
    for (i, v) in evals.iter().enumerate() {
        if let Some(val) = v {
            if best_idx.is_none_or(|b| *val < evals[b].unwrap()) {
                let _ = val;
                best_idx = Some(i);
            }
        }
    }
    let best_idx = best_idx?;
    let lo = if best_idx == 0 { grid[0] } else { grid[best_idx - 1] };
    let hi = if best_idx + 1 == grid.len() {
        grid[grid.len() - 1]
    } else {
        grid[best_idx + 1]
    };
    let seed = (grid[best_idx], evals[best_idx]);
    let (x, v) = golden_refine(f, lo, hi, 20, seed);
    v.map(|val| (x, val))
}

fn split_branches(grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let below: Vec<f64> = grid.iter().copied().filter(|&a| a < 1.0).collect();
    let above: Vec<f64> = grid.iter().copied().filter(|&a| a > 1.0).collect();
    (below, above)
}

fn magnitude_to_option(m: Magnitude) -> Option<f64> {
    m.finite()
}

/// Expected quantum deviation `E_{P_WS}[d1 + d2]` at one order.
fn expected_deviation(
    joint: &InducedJoint,
    mu: f64,
    kind: QuantumDivKind,
    alpha: Option<f64>,
    include_d2: bool,
) -> Result<Magnitude> {
    let mut acc = 0.0;
    for pr in &joint.pairs {
        let (d1, d2) = deviation_terms(joint, mu, pr.w, pr.s_idx, kind, alpha)?;
        let total = match (d1, d2) {
            (Magnitude::Finite(a), Magnitude::Finite(b)) => {
                if include_d2 {
                    a + b
                } else {
                    a
                }
            }
            (Magnitude::Finite(a), Magnitude::Infinite) if !include_d2 => a,
            _ => return Ok(Magnitude::Infinite),
        };
        acc += pr.joint * total;
    }
    Ok(Magnitude::Finite(acc))
}

struct RenyiEvaluation {
    grid: Vec<GridPoint>,
    optimum_param: f64,
    optimum_value: Option<f64>,
}

/// Shared machinery of the Renyi-family bounds: per-branch infima over the
/// quantum order plus the matching classical-term infimum.
fn renyi_family(
    joint: &InducedJoint,
    mu: f64,
    tau: f64,
    alpha_grid: &[f64],
    gamma_grid: &[f64],
    kind: QuantumDivKind,
    include_d2: bool,
) -> Result<RenyiEvaluation> {
    let quantum = |alpha: f64| -> Option<f64> {
        expected_deviation(joint, mu, kind, Some(alpha), include_d2)
            .ok()
            .and_then(magnitude_to_option)
    };
    let classical = |gamma: f64| -> Option<f64> {
        classical_gamma_term(joint, tau, gamma)
            .ok()
            .and_then(magnitude_to_option)
    };

    let (alpha_lo, alpha_hi) = split_branches(alpha_grid);
    let (gamma_lo, gamma_hi) = split_branches(gamma_grid);
    let classical_opt_lo = grid_optimize(&classical, &gamma_lo);
    let classical_opt_hi = grid_optimize(&classical, &gamma_hi);

    let mut grid = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        let copt = if alpha < 1.0 {
            &classical_opt_lo
        } else {
            &classical_opt_hi
        };
        let value = match (quantum(alpha), copt) {
            (Some(q), Some((_, c))) => Some(q + c),
            _ => None,
        };
        grid.push(GridPoint {
            param: alpha,
            value,
        });
    }

    let mut optimum: Option<(f64, f64)> = None;
    for (alpha_branch, copt) in [(&alpha_lo, &classical_opt_lo), (&alpha_hi, &classical_opt_hi)] {
        let Some((_, cval)) = copt else { continue };
        if let Some((a, q)) = grid_optimize(&quantum, alpha_branch) {
            let total = q + cval;
            if optimum.is_none_or(|(_, best)| total < best) {
                optimum = Some((a, total));
            }
        }
    }

    Ok(RenyiEvaluation {
        grid,
        optimum_param: optimum.map(|(a, _)| a).unwrap_or(f64::NAN),
        optimum_value: optimum.map(|(_, v)| v),
    })
}

/// Expected generalization-error bound through the modified sandwiched or
/// Petz Renyi divergence: per-order expectation of the two deviation
/// radicals plus the classical Renyi penalty, with independent infima over
/// the quantum and classical orders on each branch.
pub fn bound_renyi(
    joint: &InducedJoint,
    instance: &LearningInstance,
    alpha_grid: &[f64],
    gamma_grid: &[f64],
    kind: BoundKind,
) -> Result<BoundReport> {
    let (div_kind, report_kind) = match kind {
        BoundKind::RenyiMod => (QuantumDivKind::Modified, BoundKind::RenyiMod),
        BoundKind::RenyiPetz => (QuantumDivKind::Petz, BoundKind::RenyiPetz),
        other => {
            return Err(Error::config(format!(
                "bound_renyi expects renyi-mod or renyi-petz, got {}",
                other.as_str()
            )))
        }
    };
    let cert = resolved_cert(joint, instance)?;
    let eval = renyi_family(
        joint,
        cert.mu,
        cert.tau,
        alpha_grid,
        gamma_grid,
        div_kind,
        true,
    )?;
    let realized = expected_gen(joint, instance)?.abs();
    Ok(BoundReport::assemble(
        report_kind,
        eval.grid,
        eval.optimum_param,
        eval.optimum_value,
        realized,
    ))
}

/// KL-route bound: expectation of the two relative-entropy radicals plus
/// `sqrt(2 tau^2 I[S;W])`.
pub fn bound_kl(joint: &InducedJoint, instance: &LearningInstance) -> Result<BoundReport> {
    let cert = resolved_cert(joint, instance)?;
    let quantum = expected_deviation(joint, cert.mu, QuantumDivKind::Kl, None, true)?;
    let info = mutual_information(joint)?;
    let value = match (quantum, info) {
        (Magnitude::Finite(q), Magnitude::Finite(i)) => {
            Some(q + (2.0 * cert.tau * cert.tau * cleaned(i)).sqrt())
        }
        _ => None,
    };
    let realized = expected_gen(joint, instance)?.abs();
    Ok(BoundReport::assemble(
        BoundKind::Kl,
        vec![GridPoint {
            param: 1.0,
            value,
        }],
        1.0,
        value,
        realized,
    ))
}

/// Recoverability-form bound: only the first deviation radical, checked
/// against the per-sample-conditioned generalization error.
pub fn bound_caro_old(
    joint: &InducedJoint,
    instance: &LearningInstance,
    alpha_grid: &[f64],
    gamma_grid: &[f64],
) -> Result<BoundReport> {
    let cert = resolved_cert(joint, instance)?;
    let eval = renyi_family(
        joint,
        cert.mu,
        cert.tau,
        alpha_grid,
        gamma_grid,
        QuantumDivKind::Modified,
        false,
    )?;
    let realized = expected_gen_old(joint, instance)?.abs();
    Ok(BoundReport::assemble(
        BoundKind::CaroOld,
        eval.grid,
        eval.optimum_param,
        eval.optimum_value,
        realized,
    ))
}

/// Norm-route bound `E[mu ||sigma(W,S) - rho_te(S) x sigma_hyp(W,S)||_p]
/// plus `tau' ||P_WS - P_W x P_S||_p` with constants derived from the
/// losses when not supplied: Schatten-q norms for the operator part, the
/// function q-norm of the scalar losses for the classical part.
pub fn bound_l1(
    joint: &InducedJoint,
    instance: &LearningInstance,
    p: f64,
    constants: Option<(f64, f64)>,
) -> Result<BoundReport> {
    if p < 1.0 {
        return Err(Error::domain("norm order p must be >= 1"));
    }
    let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
    let (mu_p, tau_p) = match constants {
        Some(c) => c,
        None => {
            let mut mu_p: f64 = 0.0;
            for pr in &joint.pairs {
                let loss = instance.loss(pr.w, &joint.samples[pr.s_idx], &joint.loss_space)?;
                mu_p = mu_p.max(schatten_norm(&loss, q)?);
            }
            let tau_p = if p == 1.0 {
                mu_p
            } else {
                let tables = scalar_loss_tables(joint, instance)?;
                let mut acc = 0.0;
                for row in &tables.g {
                    for v in row {
                        if v.is_nan() {
                            continue;
                        }
                        acc += v.abs().powf(q);
                    }
                }
                acc.powf(1.0 / q)
            };
            (mu_p, tau_p)
        }
    };

    let mut quantum = 0.0;
    for pr in &joint.pairs {
        let reference = permute_density(
            &product_te_hyp(&joint.rho_te[pr.s_idx], &pr.sigma_hyp)?,
            pr.sigma.space(),
        )?;
        let diff = pr.sigma.matrix().sub(reference.matrix());
        quantum += pr.joint * mu_p * schatten_norm_matrix(&diff, p)?;
    }
    let classical = tau_p * lp_distance(&joint.joint_dist(), &joint.product_dist(), p)?;
    let value = Some(quantum + classical);
    let realized = expected_gen_old(joint, instance)?.abs();
    Ok(BoundReport::assemble(
        if p == 1.0 { BoundKind::L1 } else { BoundKind::Lp },
        vec![GridPoint { param: p, value }],
        p,
        value,
        realized,
    ))
}

/// Individual-sample bound under the i.i.d. mode: expectation of the
/// divergences inside the radicals with `1/(n alpha)` (below 1) or `1/n`
/// (above 1) scaling, plus per-coordinate classical penalties.
pub fn bound_iid_individual(
    joint: &InducedJoint,
    instance: &LearningInstance,
    alpha_grid: &[f64],
    gamma_grid: &[f64],
    kind: BoundKind,
) -> Result<BoundReport> {
    if instance.mode != LearningMode::IidLocal {
        return Err(Error::config(
            "the individual-sample bound needs an iid_local instance",
        ));
    }
    let div_kind = match kind {
        BoundKind::IidMod => QuantumDivKind::Modified,
        BoundKind::IidPetz => QuantumDivKind::Petz,
        other => {
            return Err(Error::config(format!(
                "bound_iid_individual expects iid-mod or iid-petz, got {}",
                other.as_str()
            )))
        }
    };
    let cert = resolved_cert(joint, instance)?;
    let n = instance.n as f64;
    let z_count = instance.sample_space.len();

    // Expected divergences (not radicals) per order.
    let expected_divs = |alpha: f64| -> Option<(f64, f64)> {
        let mut acc1 = 0.0;
        let mut acc2 = 0.0;
        for pr in &joint.pairs {
            // Reuse the radical machinery by inverting it: compute the raw
            // divergences directly here.
            let reference = permute_density(
                &product_te_hyp(&joint.rho_te[pr.s_idx], &pr.sigma_hyp).ok()?,
                pr.sigma.space(),
            )
            .ok()?;
            let d1 = match div_kind {
                QuantumDivKind::Modified => {
                    crate::divergence::modified_sandwiched(&pr.sigma, &reference, alpha).ok()?
                }
                QuantumDivKind::Petz => {
                    crate::divergence::petz_renyi(&pr.sigma, &reference, alpha).ok()?
                }
                QuantumDivKind::Kl => unreachable!(),
            };
            let sigma_w = joint.sigma_hyp_w[pr.w].as_ref()?;
            let d2 = match div_kind {
                QuantumDivKind::Modified => {
                    crate::divergence::modified_sandwiched(&pr.sigma_hyp, sigma_w, alpha).ok()?
                }
                QuantumDivKind::Petz => {
                    crate::divergence::petz_renyi(&pr.sigma_hyp, sigma_w, alpha).ok()?
                }
                QuantumDivKind::Kl => unreachable!(),
            };
            acc1 += pr.joint * cleaned(d1.value.finite()?);
            acc2 += pr.joint * cleaned(d2.value.finite()?);
        }
        Some((acc1, acc2))
    };
    let quantum = |alpha: f64| -> Option<f64> {
        let (d1, d2) = expected_divs(alpha)?;
        let c = if alpha < 1.0 { alpha } else { 1.0 };
        let scale = 2.0 * cert.mu * cert.mu / (n * c);
        Some((scale * cleaned(d1)).sqrt() + (scale * cleaned(d2)).sqrt())
    };

    let prior_z = instance.prior.clone();
    let classical = |gamma: f64| -> Option<f64> {
        let c = if gamma < 1.0 { gamma } else { 1.0 };
        let mut acc = 0.0;
        for coord in 0..instance.n {
            let mut per_w = 0.0;
            for w in 0..joint.w_count() {
                if joint.marginal_w[w] <= OUTCOME_DROP_TOL {
                    continue;
                }
                let marginal = joint.posterior_coordinate_dist(w, coord, z_count).ok()?;
                let d = classical_div_by_order(&marginal, &prior_z, gamma)
                    .ok()?
                    .finite()?;
                per_w +=
                    joint.marginal_w[w] * (2.0 * cert.tau * cert.tau * cleaned(d) / c).sqrt();
            }
            acc += per_w;
        }
        Some(acc / n)
    };

    let (alpha_lo, alpha_hi) = split_branches(alpha_grid);
    let (gamma_lo, gamma_hi) = split_branches(gamma_grid);
    let classical_opt_lo = grid_optimize(&classical, &gamma_lo);
    let classical_opt_hi = grid_optimize(&classical, &gamma_hi);

    let mut grid = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        let copt = if alpha < 1.0 {
            &classical_opt_lo
        } else {
            &classical_opt_hi
        };
        let value = match (quantum(alpha), copt) {
            (Some(qv), Some((_, cv))) => Some(qv + cv),
            _ => None,
        };
        grid.push(GridPoint {
            param: alpha,
            value,
        });
    }
    let mut optimum: Option<(f64, f64)> = None;
    for (branch, copt) in [(&alpha_lo, &classical_opt_lo), (&alpha_hi, &classical_opt_hi)] {
        let Some((_, cval)) = copt else { continue };
        if let Some((a, qv)) = grid_optimize(&quantum, branch) {
            let total = qv + cval;
            if optimum.is_none_or(|(_, best)| total < best) {
                optimum = Some((a, total));
            }
        }
    }

    let realized = expected_gen(joint, instance)?.abs();
    Ok(BoundReport::assemble(
        kind,
        grid,
        optimum.map(|(a, _)| a).unwrap_or(f64::NAN),
        optimum.map(|(_, v)| v),
        realized,
    ))
}

/// The classical reference bounds on a (classically embedded) instance.
#[derive(Debug, Clone)]
pub struct ClassicalBounds {
    /// `sqrt((2 tau^2 / n) I[S;W])`.
    pub xu_raginsky: Option<f64>,
    /// `(1/n) sum_i sqrt(2 tau^2 I[Z_i;W])`.
    pub bu: Option<f64>,
    /// Per-order individual-sample values.
    pub modak: Vec<(f64, Option<f64>)>,
}

pub fn classical_bounds(
    joint: &InducedJoint,
    instance: &LearningInstance,
    gammas: &[f64],
) -> Result<ClassicalBounds> {
    let cert = resolved_cert(joint, instance)?;
    let tau = cert.tau;
    let n = instance.n as f64;
    let z_count = instance.sample_space.len();

    let xu = mutual_information(joint)?
        .finite()
        .map(|i| (2.0 * tau * tau / n * cleaned(i)).sqrt());

    let mut bu_acc = Some(0.0);
    for coord in 0..instance.n {
        let i = coordinate_mutual_information(joint, coord, z_count)?.finite();
        bu_acc = match (bu_acc, i) {
            (Some(acc), Some(i)) => Some(acc + (2.0 * tau * tau * cleaned(i)).sqrt()),
            _ => None,
        };
    }
    let bu = bu_acc.map(|v| v / n);

    let prior_z = instance.prior.clone();
    let mut modak = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let c = if gamma < 1.0 { gamma } else { 1.0 };
        let mut acc = Some(0.0);
        for coord in 0..instance.n {
            let mut per_w = Some(0.0);
            for w in 0..joint.w_count() {
                if joint.marginal_w[w] <= OUTCOME_DROP_TOL {
                    continue;
                }
                let marginal = joint.posterior_coordinate_dist(w, coord, z_count)?;
                let d = classical_div_by_order(&marginal, &prior_z, gamma)?.finite();
                per_w = match (per_w, d) {
                    (Some(acc_w), Some(d)) => Some(
                        acc_w
                            + joint.marginal_w[w]
                                * (2.0 * tau * tau * cleaned(d) / c).sqrt(),
                    ),
                    _ => None,
                };
            }
            acc = match (acc, per_w) {
                (Some(a), Some(p)) => Some(a + p),
                _ => None,
            };
        }
        modak.push((gamma, acc.map(|v| v / n)));
    }

    Ok(ClassicalBounds {
        xu_raginsky: xu,
        bu,
        modak,
    })
}
