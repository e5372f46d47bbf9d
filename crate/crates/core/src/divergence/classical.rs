//! Finite probability distributions and their divergences.

use serde::{Deserialize, Serialize};

use crate::divergence::value::{DivergenceKind, DivergenceValue, Magnitude};
use crate::error::{Error, Result};
use crate::tolerances::{ATOM_EPS, ORDER_ONE_EPS, TRACE_TOL};

/// Probability vector over a labeled finite sample space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDist {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl ClassicalDist {
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::config("labels and probabilities differ in length"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::config("probabilities must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::config(format!(
                "probabilities sum to {} (must be 1 within {:.0e})",
                total, TRACE_TOL
            )));
        }
        Ok(Self { labels, probs })
    }

    /// Build from computed weights: tiny negatives from floating-point
    /// noise are clamped to zero before validation.
    pub fn from_weights(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        let cleaned: Vec<f64> = weights
            .into_iter()
            .map(|w| if w < 0.0 && w > -1e-12 { 0.0 } else { w })
            .collect();
        Self::new(labels, cleaned)
    }

    pub fn uniform(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            probs: vec![1.0 / n as f64; n],
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob_of(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probs[i])
    }
}

fn check_same_length(p: &ClassicalDist, q: &ClassicalDist) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::config("distributions have different lengths"));
    }
    Ok(())
}

/// Raw KL sum with the `0 log 0 = 0` convention; `None` marks `P` not
/// absolutely continuous with respect to `Q`.
fn kl_sum(p: &[f64], q: &[f64]) -> Option<f64> {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= ATOM_EPS {
            continue;
        }
        if qi <= ATOM_EPS {
            return None;
        }
        acc += pi * (pi / qi).ln();
    }
    Some(acc)
}

/// Kullback-Leibler divergence `sum P log(P/Q)`.
pub fn classical_kl(p: &ClassicalDist, q: &ClassicalDist) -> Result<DivergenceValue> {
    check_same_length(p, q)?;
    Ok(match kl_sum(p.probs(), q.probs()) {
        Some(v) => DivergenceValue::finite(DivergenceKind::Kl, None, v),
        None => DivergenceValue::infinite(DivergenceKind::Kl, None),
    })
}

pub(crate) fn renyi_sum_prob(p: &[f64], q: &[f64], gamma: f64) -> Magnitude {
    if gamma > 1.0 {
        // Support containment is required: P(x) > 0 with Q(x) = 0 blows up.
        for (&pi, &qi) in p.iter().zip(q) {
            if pi > ATOM_EPS && qi <= ATOM_EPS {
                return Magnitude::Infinite;
            }
        }
    }
    // Log-sum-exp keeps extreme orders finite: p^g q^(1-g) would overflow
    // and underflow to 0 * inf for large |gamma|.
    let mut exponents = Vec::with_capacity(p.len());
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= ATOM_EPS || qi <= ATOM_EPS {
            // 0^gamma = 0, and for gamma < 1 the factor q^{1-gamma}
            // vanishes at q = 0; either way the atom contributes nothing.
            continue;
        }
        exponents.push(gamma * pi.ln() + (1.0 - gamma) * qi.ln());
    }
    let Some(&peak) = exponents
        .iter()
        .max_by(|a, b| a.partial_cmp(b).unwrap())
    else {
        // Orthogonal supports under gamma < 1.
        return Magnitude::Infinite;
    };
    let rest: f64 = exponents.iter().map(|e| (e - peak).exp()).sum();
    Magnitude::Finite((peak + rest.ln()) / (gamma - 1.0))
}

/// Renyi divergence of order `gamma in (0,1) union (1,inf)`.
///
/// Orders within [`ORDER_ONE_EPS`] of 1 (but not exactly 1) are routed to
/// the KL limit; exactly 1 is rejected in favor of [`classical_kl`].
pub fn classical_renyi(p: &ClassicalDist, q: &ClassicalDist, gamma: f64) -> Result<DivergenceValue> {
    check_same_length(p, q)?;
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::domain(format!("Renyi order {} must be positive", gamma)));
    }
    if gamma == 1.0 {
        return Err(Error::domain("Renyi order 1 is singular; use classical_kl"));
    }
    if (gamma - 1.0).abs() <= ORDER_ONE_EPS {
        let v = match kl_sum(p.probs(), q.probs()) {
            Some(v) => Magnitude::Finite(v),
            None => Magnitude::Infinite,
        };
        return Ok(DivergenceValue {
            kind: DivergenceKind::Classical,
            alpha: Some(gamma),
            value: v,
            diagnostics: None,
        });
    }
    Ok(DivergenceValue {
        kind: DivergenceKind::Classical,
        alpha: Some(gamma),
        value: renyi_sum_prob(p.probs(), q.probs(), gamma),
        diagnostics: None,
    })
}

/// Smooth max divergence: the `(1 - epsilon)`-quantile of the log-ratio
/// `log P/Q` under `P`, computed by sorting atoms and scanning cumulative
/// mass. Atoms with `P(x) = 0` are ignored; `P(x) > 0` with `Q(x) = 0`
/// makes the value infinite.
pub fn smooth_max_divergence(
    p: &ClassicalDist,
    q: &ClassicalDist,
    epsilon: f64,
) -> Result<DivergenceValue> {
    check_same_length(p, q)?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::domain(format!(
            "smoothing parameter {} must lie in [0, 1)",
            epsilon
        )));
    }
    let mut atoms: Vec<(f64, f64)> = Vec::new(); // (log-ratio, p mass)
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi <= ATOM_EPS {
            continue;
        }
        if qi <= ATOM_EPS {
            return Ok(DivergenceValue {
                kind: DivergenceKind::SmoothMax,
                alpha: Some(epsilon),
                value: Magnitude::Infinite,
                diagnostics: None,
            });
        }
        atoms.push(((pi / qi).ln(), pi));
    }
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let need = 1.0 - epsilon - 1e-9;
    let mut cum = 0.0;
    let mut result = atoms.last().map(|a| a.0).unwrap_or(0.0);
    for (r, mass) in &atoms {
        cum += mass;
        if cum >= need {
            result = *r;
            break;
        }
    }
    Ok(DivergenceValue {
        kind: DivergenceKind::SmoothMax,
        alpha: Some(epsilon),
        value: Magnitude::Finite(result),
        diagnostics: None,
    })
}

/// `L_p` distance between two distributions.
pub fn lp_distance(p: &ClassicalDist, q: &ClassicalDist, order: f64) -> Result<f64> {
    check_same_length(p, q)?;
    if order < 1.0 {
        return Err(Error::domain("L_p distance needs p >= 1"));
    }
    if order.is_infinite() {
        return Ok(p
            .probs()
            .iter()
            .zip(q.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max));
    }
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs().powf(order))
        .sum::<f64>()
        .powf(1.0 / order))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(probs: &[f64]) -> ClassicalDist {
        let labels = (0..probs.len()).map(|i| i.to_string()).collect();
        ClassicalDist::new(labels, probs.to_vec()).unwrap()
    }

    #[test]
    fn renyi_matches_direct_formula() {
        let p = dist(&[0.75, 0.25]);
        let q = dist(&[0.5, 0.5]);
        // Direct evaluation: log(0.75^2/0.5 + 0.25^2/0.5) = log 1.25.
        let v = classical_renyi(&p, &q, 2.0).unwrap().value.expect_finite("renyi");
        assert!((v - 1.25f64.ln()).abs() < 1e-12);
        // Identical arguments vanish at every order.
        for gamma in [0.3, 0.5, 2.0, 5.0] {
            let z = classical_renyi(&p, &p, gamma).unwrap().value.expect_finite("zero");
            assert!(z.abs() < 1e-12);
        }
    }

    #[test]
    fn renyi_single_atom_case() {
        let p = dist(&[1.0, 0.0]);
        let q = dist(&[0.5, 0.5]);
        let v = classical_renyi(&p, &q, 2.0).unwrap().value.expect_finite("renyi");
        assert!((v - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn renyi_infinite_without_support_containment() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[1.0, 0.0]);
        assert!(classical_renyi(&p, &q, 2.0).unwrap().is_infinite());
        // gamma < 1 stays finite on the common support.
        assert!(!classical_renyi(&p, &q, 0.5).unwrap().is_infinite());
    }

    #[test]
    fn kl_value_and_limit_bracket() {
        let p = dist(&[0.75, 0.25]);
        let q = dist(&[0.5, 0.5]);
        let expected = 0.75 * (1.5f64).ln() + 0.25 * (0.5f64).ln();
        let kl = classical_kl(&p, &q).unwrap().value.expect_finite("kl");
        assert!((kl - expected).abs() < 1e-12);
        assert!(classical_kl(&p, &p).unwrap().value.expect_finite("kl") .abs() < 1e-14);
        for gamma in [1.0 - 1e-4, 1.0 + 1e-4] {
            let v = classical_renyi(&p, &q, gamma).unwrap().value.expect_finite("renyi");
            assert!((v - kl).abs() < 5e-4, "gamma {} value {}", gamma, v);
        }
    }

    #[test]
    fn renyi_rejects_bad_orders() {
        let p = dist(&[0.5, 0.5]);
        assert!(classical_renyi(&p, &p, 1.0).is_err());
        assert!(classical_renyi(&p, &p, 0.0).is_err());
        assert!(classical_renyi(&p, &p, -2.0).is_err());
    }

    #[test]
    fn smooth_max_two_atom_enumeration() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        // Log ratios: atom0 -> log 2 (mass .5), atom1 -> log(2/3) (mass .5).
        let v0 = smooth_max_divergence(&p, &q, 0.0).unwrap().value.expect_finite("dmax");
        assert!((v0 - 2f64.ln()).abs() < 1e-12);
        let v5 = smooth_max_divergence(&p, &q, 0.5).unwrap().value.expect_finite("dmax");
        assert!((v5 - (2f64 / 3.0).ln()).abs() < 1e-12);
        for eps in [0.0, 0.3, 0.9] {
            let z = smooth_max_divergence(&p, &p, eps).unwrap().value.expect_finite("dmax");
            assert!(z.abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_max_monotone_in_epsilon() {
        let p = dist(&[0.4, 0.35, 0.15, 0.1]);
        let q = dist(&[0.25, 0.25, 0.25, 0.25]);
        let mut last = f64::INFINITY;
        for eps in [0.0, 0.1, 0.2, 0.4, 0.8] {
            let v = smooth_max_divergence(&p, &q, eps).unwrap().value.expect_finite("dmax");
            assert!(v <= last + 1e-12);
            last = v;
        }
    }

    #[test]
    fn lp_distance_decreasing_in_p() {
        let p = dist(&[0.7, 0.2, 0.1]);
        let q = dist(&[0.3, 0.3, 0.4]);
        let l1 = lp_distance(&p, &q, 1.0).unwrap();
        let l2 = lp_distance(&p, &q, 2.0).unwrap();
        let linf = lp_distance(&p, &q, f64::INFINITY).unwrap();
        assert!(l1 >= l2 && l2 >= linf);
        assert!((l1 - 0.8).abs() < 1e-12);
    }
}
