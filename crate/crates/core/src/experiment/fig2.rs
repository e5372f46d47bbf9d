//! The two-hypothesis worked example: a classical bit embedded in
//! non-orthogonal qubit pairs, measured in a data-dependent basis, with
//! product test/train states so the first deviation term vanishes.



use std::collections::BTreeMap;
use num_complex::Complex64 as C64;

use crate::bounds::{bound_kl, bound_renyi, BoundKind, BoundReport};
use crate::divergence::ClassicalDist;
use crate::error::{Error, Result};
use crate::learning::induced::induce;
use crate::learning::instance::{pair_key, LearningInstance, LearningMode};
use crate::operator::matrix::ComplexMatrix;
use crate::operator::space::HilbertSpace;
use crate::operator::types::{DensityOperator, HermitianObservable, Povm};
use crate::subgaussian::SubGaussianCert;

/// Parameters of the worked example and its sweeps.
#[derive(Debug, Clone)]
pub struct Fig2Config {
    pub p_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub p_star: f64,
    pub cos2_theta: f64,
    pub cos2_beta: f64,
    /// Amplitudes of the two measurement kets (renormalized on build).
    pub phi0: (C64, C64),
    pub phi1: (C64, C64),
    pub mu: f64,
    pub tau: f64,
    /// Sign of the orthogonal-complement phase convention; the bounds are
    /// invariant to it.
    pub complement_sign: f64,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            p_grid: (0..7).map(|i| 0.5 + 0.05 * i as f64).collect(),
            alpha_grid: crate::bounds::log_spaced(0.4, 0.99, 25),
            gamma_grid: crate::bounds::log_spaced(0.4, 0.99, 25),
            p_star: 0.6,
            cos2_theta: 0.45,
            cos2_beta: 0.5,
            phi0: (C64::new(-0.59, -0.29), C64::new(-0.25, 0.71)),
            phi1: (C64::new(0.34, -0.42), C64::new(-0.83, -0.12)),
            mu: 0.8,
            tau: 0.8,
            complement_sign: 1.0,
        }
    }
}

fn normalize(a: C64, b: C64) -> Result<(C64, C64)> {
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm <= 0.0 {
        return Err(Error::config("zero measurement ket"));
    }
    Ok((a / norm, b / norm))
}

/// Orthogonal complement of `a|0> + b|1>` with the fixed phase convention
/// `sign * (-conj(b)|0> + conj(a)|1>)`.
fn complement(a: C64, b: C64, sign: f64) -> (C64, C64) {
    (-b.conj() * sign, a.conj() * sign)
}

fn ket_pair(cos2: f64, phi: (C64, C64), sign: f64) -> Result<([C64; 2], [C64; 2], [C64; 2])> {
    let (a, b) = normalize(phi.0, phi.1)?;
    let (ap, bp) = complement(a, b, sign);
    let cos_t = cos2.sqrt();
    let sin_t = (1.0 - cos2).sqrt();
    let phi_ket = [a, b];
    let perp_ket = [ap, bp];
    let psi = [a * cos_t + ap * sin_t, b * cos_t + bp * sin_t];
    Ok((phi_ket, perp_ket, psi))
}

/// Build the learning instance of the worked example at mixing weight `p`.
pub fn build_fig2_instance(cfg: &Fig2Config, p: f64) -> Result<LearningInstance> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::config(format!("p = {} must lie in (0,1)", p)));
    }
    let te = HilbertSpace::single("te", 2)?;
    let tr = HilbertSpace::single("tr", 2)?;
    let hyp = HilbertSpace::single("hyp", 2)?;
    let sample_space = vec!["0".to_string(), "1".to_string()];
    let prior = ClassicalDist::new(sample_space.clone(), vec![p, 1.0 - p])?;

    let (phi0, perp0, psi0) = ket_pair(cfg.cos2_theta, cfg.phi0, cfg.complement_sign)?;
    let (phi1, perp1, psi1) = ket_pair(cfg.cos2_beta, cfg.phi1, cfg.complement_sign)?;

    let mut data_states = BTreeMap::new();
    for (z, psi) in [("0", &psi0), ("1", &psi1)] {
        let te_state = DensityOperator::pure(te.clone(), psi)?;
        let tr_state = DensityOperator::pure(tr.clone(), psi)?;
        data_states.insert(
            z.to_string(),
            crate::operator::tensor::tensor_density(&te_state, &tr_state)?,
        );
    }

    let projector = |space: &HilbertSpace, ket: &[C64; 2]| -> Result<HermitianObservable> {
        let mut m = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = ket[i] * ket[j].conj();
            }
        }
        HermitianObservable::new(space.clone(), m)
    };

    let mut povms = BTreeMap::new();
    for (z, kets) in [("0", (&phi0, &perp0)), ("1", (&phi1, &perp1))] {
        povms.insert(
            z.to_string(),
            Povm::new(
                tr.clone(),
                vec![
                    ("w0".to_string(), projector(&tr, kets.0)?),
                    ("w1".to_string(), projector(&tr, kets.1)?),
                ],
            )?,
        );
    }

    // A fixed loss observable; the bound values depend only on the
    // certificates, and this choice keeps them valid (its norm is 0.8).
    let loss_space = te.tensor(&hyp)?;
    let mut loss_m = ComplexMatrix::identity(4).scale_re(-0.8);
    loss_m[(0, 0)] += C64::new(1.6, 0.0);
    let loss = HermitianObservable::new(loss_space, loss_m)?;
    let mut losses = BTreeMap::new();
    for w in ["w0", "w1"] {
        for z in ["0", "1"] {
            losses.insert(pair_key(w, z), loss.clone());
        }
    }

    LearningInstance::new(
        sample_space,
        prior,
        1,
        LearningMode::IidLocal,
        te,
        tr,
        hyp,
        data_states,
        povms,
        BTreeMap::new(),
        losses,
        Some(SubGaussianCert::user_supplied(cfg.mu, cfg.tau)?),
    )
}

/// One row of the mixing-weight sweep.
#[derive(Debug, Clone)]
pub struct SweepPRow {
    pub p: f64,
    pub b_kl: Option<f64>,
    pub b_mod: Option<f64>,
    pub b_petz: Option<f64>,
    pub abs_gen: f64,
}

/// Sweep the mixing weight and report the three bound optima.
pub fn sweep_p(cfg: &Fig2Config) -> Result<Vec<SweepPRow>> {
    let mut rows = Vec::with_capacity(cfg.p_grid.len());
    for &p in &cfg.p_grid {
        let (kl, modified, petz) = evaluate_at(cfg, p)?;
        rows.push(SweepPRow {
            p,
            b_kl: kl.optimum_value,
            b_mod: modified.optimum_value,
            b_petz: petz.optimum_value,
            abs_gen: kl.realized_abs_gen,
        });
    }
    Ok(rows)
}

fn evaluate_at(cfg: &Fig2Config, p: f64) -> Result<(BoundReport, BoundReport, BoundReport)> {
    let instance = build_fig2_instance(cfg, p)?;
    let joint = induce(&instance)?;
    let kl = bound_kl(&joint, &instance)?;
    let modified = bound_renyi(
        &joint,
        &instance,
        &cfg.alpha_grid,
        &cfg.gamma_grid,
        BoundKind::RenyiMod,
    )?;
    let petz = bound_renyi(
        &joint,
        &instance,
        &cfg.alpha_grid,
        &cfg.gamma_grid,
        BoundKind::RenyiPetz,
    )?;
    Ok((kl, modified, petz))
}

/// One row of the order sweep at `p = p_star`.
#[derive(Debug, Clone)]
pub struct SweepAlphaRow {
    pub alpha: f64,
    pub b_kl: Option<f64>,
    pub b_mod: Option<f64>,
    pub b_petz: Option<f64>,
}

/// Sweep the quantum order at the fixed mixing weight; the KL column is
/// constant across rows.
pub fn sweep_alpha(cfg: &Fig2Config) -> Result<Vec<SweepAlphaRow>> {
    let (kl, modified, petz) = evaluate_at(cfg, cfg.p_star)?;
    let mut rows = Vec::with_capacity(cfg.alpha_grid.len());
    for (i, &alpha) in cfg.alpha_grid.iter().enumerate() {
        rows.push(SweepAlphaRow {
            alpha,
            b_kl: kl.optimum_value,
            b_mod: modified.grid[i].value,
            b_petz: petz.grid[i].value,
        });
    }
    Ok(rows)
}
