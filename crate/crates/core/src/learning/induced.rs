//! Exact enumeration of the joint classical-quantum behavior of a learner.


use rand::Rng;

use crate::divergence::ClassicalDist;
use crate::error::{Error, Result};
use crate::learning::instance::{product_te_hyp, LearningInstance, SampleTuple};
use crate::operator::func::psd_power;
use crate::operator::space::HilbertSpace;
use crate::operator::tensor::{
    apply_channel_on, embed, partial_trace_density, trace_pair,
};
use crate::operator::types::DensityOperator;
use crate::operator::random::rng_from_seed;
use crate::tolerances::OUTCOME_DROP_TOL;

/// Everything induced for one retained `(w, s)` pair.
#[derive(Debug, Clone)]
pub struct PairRecord {
    pub w: usize,
    pub s_idx: usize,
    /// `P(w|s) = Tr[E_s(w) rho_tr(s)]`.
    pub p_w_given_s: f64,
    /// `P(w|s) * P^n(s)`.
    pub joint: f64,
    /// Post-measurement, post-channel state on the test (x) hypothesis
    /// factors.
    pub sigma: DensityOperator,
    /// `Tr_te` of `sigma`.
    pub sigma_hyp: DensityOperator,
}

/// The learner-induced joint distribution together with all per-pair and
/// per-hypothesis states. Immutable after construction.
#[derive(Debug, Clone)]
pub struct InducedJoint {
    pub samples: Vec<SampleTuple>,
    /// `P^n(s)` per sample index.
    pub prior_s: Vec<f64>,
    pub rho: Vec<DensityOperator>,
    pub rho_te: Vec<DensityOperator>,
    pub rho_tr: Vec<DensityOperator>,
    /// Retained pairs; outcomes with `p(w|s) <= OUTCOME_DROP_TOL` carry no
    /// record and zero joint weight.
    pub pairs: Vec<PairRecord>,
    /// `[w][s_idx] -> index into pairs` for retained pairs.
    index: Vec<Vec<Option<usize>>>,
    /// `P_W`.
    pub marginal_w: Vec<f64>,
    /// `P_{S|W}(s|w)`, rows over w.
    pub posterior: Vec<Vec<f64>>,
    /// `sigma_hyp(w)`: posterior mixture of `sigma_hyp(w, s)`.
    pub sigma_hyp_w: Vec<Option<DensityOperator>>,
    pub loss_space: HilbertSpace,
}

/// Build the induced joint by exact enumeration.
pub fn induce(instance: &LearningInstance) -> Result<InducedJoint> {
    let samples = instance.enumerate_samples();
    let full_te_labels = instance.full_te_labels();
    let full_tr_labels = instance.full_tr_labels();
    let full_hyp_labels = instance.full_hyp_labels();
    let te_refs: Vec<&str> = full_te_labels.iter().map(|s| s.as_str()).collect();
    let tr_refs: Vec<&str> = full_tr_labels.iter().map(|s| s.as_str()).collect();
    let hyp_refs: Vec<&str> = full_hyp_labels.iter().map(|s| s.as_str()).collect();

    let mut prior_s = Vec::with_capacity(samples.len());
    let mut rho_all = Vec::with_capacity(samples.len());
    let mut rho_te_all = Vec::with_capacity(samples.len());
    let mut rho_tr_all = Vec::with_capacity(samples.len());
    for s in &samples {
        let rho = instance.data_state(s)?;
        rho_te_all.push(partial_trace_density(&rho, &te_refs)?);
        rho_tr_all.push(partial_trace_density(&rho, &tr_refs)?);
        rho_all.push(rho);
        prior_s.push(instance.prior_weight(s));
    }

    let w_count = instance.w_count();
    let full_tr_space = rho_tr_all[0].space().clone();
    let mut pairs: Vec<PairRecord> = Vec::new();
    let mut index = vec![vec![None; samples.len()]; w_count];
    let mut loss_space: Option<HilbertSpace> = None;

    #[allow(clippy::needless_range_loop)]
    for (s_idx, s) in samples.iter().enumerate() {
        for w in 0..w_count {
            let element = instance.extractor_element(w, s, &full_tr_space)?;
            let p = element.trace_with(rho_tr_all[s_idx].as_observable())?;
            if p <= OUTCOME_DROP_TOL {
                // Undefined post-measurement state; the pair carries zero
                // weight and is excluded from the enumeration.
                continue;
            }
            let sqrt_e = psd_power(&element, 0.5)?;
            let lifted = embed(&sqrt_e, rho_all[s_idx].space())?;
            let bruised = lifted
                .matrix()
                .mul(rho_all[s_idx].matrix())
                .mul(lifted.matrix());
            let post = DensityOperator::new(
                rho_all[s_idx].space().clone(),
                bruised.scale_re(1.0 / p),
            )?;
            let mut state = post;
            for channel in instance.channels_for(w, s)? {
                state = apply_channel_on(&state, &channel)?;
            }
            // Validate the invariants on the induced states.
            let sigma = DensityOperator::new(state.space().clone(), state.matrix().clone())?;
            let sigma_hyp = partial_trace_density(&sigma, &hyp_refs)?;
            if loss_space.is_none() {
                loss_space = Some(sigma.space().clone());
            }
            index[w][s_idx] = Some(pairs.len());
            pairs.push(PairRecord {
                w,
                s_idx,
                p_w_given_s: p,
                joint: p * prior_s[s_idx],
                sigma,
                sigma_hyp,
            });
        }
    }

    let loss_space = loss_space
        .ok_or_else(|| Error::numerical("every measurement outcome was dropped"))?;

    let mut marginal_w = vec![0.0; w_count];
    for pr in &pairs {
        marginal_w[pr.w] += pr.joint;
    }
    let mut posterior = vec![vec![0.0; samples.len()]; w_count];
    for pr in &pairs {
        if marginal_w[pr.w] > 0.0 {
            posterior[pr.w][pr.s_idx] = pr.joint / marginal_w[pr.w];
        }
    }

    let mut sigma_hyp_w: Vec<Option<DensityOperator>> = Vec::with_capacity(w_count);
    for w in 0..w_count {
        if marginal_w[w] <= OUTCOME_DROP_TOL {
            sigma_hyp_w.push(None);
            continue;
        }
        let parts: Vec<(f64, &DensityOperator)> = pairs
            .iter()
            .filter(|pr| pr.w == w)
            .map(|pr| (posterior[w][pr.s_idx], &pr.sigma_hyp))
            .collect();
        sigma_hyp_w.push(Some(DensityOperator::mixture(&parts)?));
    }

    Ok(InducedJoint {
        samples,
        prior_s,
        rho: rho_all,
        rho_te: rho_te_all,
        rho_tr: rho_tr_all,
        pairs,
        index,
        marginal_w,
        posterior,
        sigma_hyp_w,
        loss_space,
    })
}

impl InducedJoint {
    pub fn w_count(&self) -> usize {
        self.marginal_w.len()
    }

    pub fn pair(&self, w: usize, s_idx: usize) -> Option<&PairRecord> {
        self.index[w][s_idx].map(|i| &self.pairs[i])
    }

    /// `P_{WS}` flattened over all `(w, s)` atoms (dropped pairs at zero).
    pub fn joint_dist(&self) -> ClassicalDist {
        let mut labels = Vec::new();
        let mut probs = Vec::new();
        for w in 0..self.w_count() {
            for s_idx in 0..self.samples.len() {
                labels.push(format!("{}|{}", w, s_idx));
                probs.push(self.pair(w, s_idx).map(|p| p.joint).unwrap_or(0.0));
            }
        }
        normalize_enumeration(labels, probs)
    }

    /// `P_W x P_S` on the same atom order as [`InducedJoint::joint_dist`].
    pub fn product_dist(&self) -> ClassicalDist {
        let mut labels = Vec::new();
        let mut probs = Vec::new();
        for w in 0..self.w_count() {
            for s_idx in 0..self.samples.len() {
                labels.push(format!("{}|{}", w, s_idx));
                probs.push(self.marginal_w[w] * self.prior_s[s_idx]);
            }
        }
        normalize_enumeration(labels, probs)
    }

    /// Posterior `P_{S|W}(.|w)` over sample indices.
    pub fn posterior_dist(&self, w: usize) -> Result<ClassicalDist> {
        if self.marginal_w[w] <= 0.0 {
            return Err(Error::domain(format!("hypothesis {} has zero probability", w)));
        }
        let labels = (0..self.samples.len()).map(|i| i.to_string()).collect();
        ClassicalDist::from_weights(labels, self.posterior[w].clone())
    }

    /// Prior `P^n` over sample indices.
    pub fn prior_s_dist(&self) -> ClassicalDist {
        let labels = (0..self.samples.len()).map(|i| i.to_string()).collect();
        normalize_enumeration(labels, self.prior_s.clone())
    }

    /// Marginal `P_{Z_i|W}(.|w)` of the posterior on coordinate `i`.
    pub fn posterior_coordinate_dist(
        &self,
        w: usize,
        coord: usize,
        z_count: usize,
    ) -> Result<ClassicalDist> {
        if self.marginal_w[w] <= 0.0 {
            return Err(Error::domain(format!("hypothesis {} has zero probability", w)));
        }
        let mut probs = vec![0.0; z_count];
        for (s_idx, s) in self.samples.iter().enumerate() {
            probs[s[coord]] += self.posterior[w][s_idx];
        }
        let labels = (0..z_count).map(|i| i.to_string()).collect();
        ClassicalDist::from_weights(labels, probs)
    }

    /// Joint `(W, Z_i)` distribution flattened, with its product-of-
    /// marginals partner on the same atom order.
    pub fn coordinate_joint_and_product(
        &self,
        coord: usize,
        z_count: usize,
    ) -> (ClassicalDist, ClassicalDist) {
        let mut joint = vec![vec![0.0; z_count]; self.w_count()];
        for pr in &self.pairs {
            joint[pr.w][self.samples[pr.s_idx][coord]] += pr.joint;
        }
        let mut z_marg = vec![0.0; z_count];
        for row in &joint {
            for (z, v) in row.iter().enumerate() {
                z_marg[z] += v;
            }
        }
        let mut labels = Vec::new();
        let mut jp = Vec::new();
        let mut pp = Vec::new();
        for (w, row) in joint.iter().enumerate() {
            for z in 0..z_count {
                labels.push(format!("{}|{}", w, z));
                jp.push(row[z]);
                pp.push(self.marginal_w[w] * z_marg[z]);
            }
        }
        (
            normalize_enumeration(labels.clone(), jp),
            normalize_enumeration(labels, pp),
        )
    }
}

/// Enumerated weight vectors can lose the dropped-pair mass (at most a few
/// multiples of the drop tolerance). Rescale to a proper distribution.
fn normalize_enumeration(labels: Vec<String>, weights: Vec<f64>) -> ClassicalDist {
    let total: f64 = weights.iter().sum();
    let scaled = if total > 0.0 {
        weights.iter().map(|w| (w / total).max(0.0)).collect()
    } else {
        weights
    };
    ClassicalDist::from_weights(labels, scaled)
        .expect("normalized enumeration is a valid distribution")
}

/// `Tr[L(w,s) sigma(w,s)]`.
pub fn empirical_loss(
    joint: &InducedJoint,
    instance: &LearningInstance,
    w: usize,
    s_idx: usize,
) -> Result<f64> {
    let pr = joint
        .pair(w, s_idx)
        .ok_or_else(|| Error::domain("pair (w, s) was dropped from the enumeration"))?;
    let loss = instance.loss(w, &joint.samples[s_idx], &joint.loss_space)?;
    trace_pair(&loss, &pr.sigma)
}

/// True loss under the posterior-averaged hypothesis state
/// `sigma_hyp(w)`: the expectation over fresh samples of
/// `Tr[L(w, s)(rho_te(s) (x) sigma_hyp(w))]`.
pub fn true_loss_new(
    joint: &InducedJoint,
    instance: &LearningInstance,
    w: usize,
) -> Result<f64> {
    let sigma_w = joint.sigma_hyp_w[w]
        .as_ref()
        .ok_or_else(|| Error::domain(format!("hypothesis {} has zero probability", w)))?;
    let mut acc = 0.0;
    for (s_idx, s) in joint.samples.iter().enumerate() {
        let loss = instance.loss(w, s, &joint.loss_space)?;
        let reference = product_te_hyp(&joint.rho_te[s_idx], sigma_w)?;
        acc += joint.prior_s[s_idx] * trace_pair(&loss, &reference)?;
    }
    Ok(acc)
}

/// True loss in the per-sample-conditioned form: `sigma_hyp(w, s)` inside
/// the fresh-sample expectation. Terms whose `(w, s)` pair was dropped
/// contribute zero weight.
pub fn true_loss_old(
    joint: &InducedJoint,
    instance: &LearningInstance,
    w: usize,
) -> Result<f64> {
    let mut acc = 0.0;
    for (s_idx, s) in joint.samples.iter().enumerate() {
        let Some(pr) = joint.pair(w, s_idx) else {
            continue;
        };
        let loss = instance.loss(w, s, &joint.loss_space)?;
        let reference = product_te_hyp(&joint.rho_te[s_idx], &pr.sigma_hyp)?;
        acc += joint.prior_s[s_idx] * trace_pair(&loss, &reference)?;
    }
    Ok(acc)
}

/// The three expected losses: empirical, true (posterior-averaged
/// hypothesis), and true in the per-sample-conditioned form.
#[derive(Debug, Clone, Copy)]
pub struct ExpectedLosses {
    pub empirical: f64,
    pub true_new: f64,
    pub true_old: f64,
}

pub fn expected_losses(
    joint: &InducedJoint,
    instance: &LearningInstance,
) -> Result<ExpectedLosses> {
    let mut empirical = 0.0;
    for pr in &joint.pairs {
        let loss = instance.loss(pr.w, &joint.samples[pr.s_idx], &joint.loss_space)?;
        empirical += pr.joint * trace_pair(&loss, &pr.sigma)?;
    }
    let mut true_new = 0.0;
    let mut true_old = 0.0;
    for w in 0..joint.w_count() {
        if joint.marginal_w[w] <= 0.0 {
            continue;
        }
        true_new += joint.marginal_w[w] * true_loss_new(joint, instance, w)?;
        true_old += joint.marginal_w[w] * true_loss_old(joint, instance, w)?;
    }
    Ok(ExpectedLosses {
        empirical,
        true_new,
        true_old,
    })
}

/// `gen(w, s) = l(w) - l_hat(w, s)` under the posterior-averaged true loss.
pub fn gen_error(
    joint: &InducedJoint,
    instance: &LearningInstance,
    w: usize,
    s_idx: usize,
) -> Result<f64> {
    Ok(true_loss_new(joint, instance, w)? - empirical_loss(joint, instance, w, s_idx)?)
}

/// Generalization error in the per-sample-conditioned (recoverability)
/// form.
pub fn gen_error_old(
    joint: &InducedJoint,
    instance: &LearningInstance,
    w: usize,
    s_idx: usize,
) -> Result<f64> {
    Ok(true_loss_old(joint, instance, w)? - empirical_loss(joint, instance, w, s_idx)?)
}

/// Expected generalization error `E_{P_WS}[gen(W, S)]`.
pub fn expected_gen(joint: &InducedJoint, instance: &LearningInstance) -> Result<f64> {
    let l = expected_losses(joint, instance)?;
    Ok(l.true_new - l.empirical)
}

pub fn expected_gen_old(joint: &InducedJoint, instance: &LearningInstance) -> Result<f64> {
    let l = expected_losses(joint, instance)?;
    Ok(l.true_old - l.empirical)
}

/// Deterministic i.i.d. draws from the exact joint by CDF inversion over
/// the retained pairs.
pub fn sample_ws(joint: &InducedJoint, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = rng_from_seed(seed);
    let total: f64 = joint.pairs.iter().map(|p| p.joint).sum();
    let mut cdf = Vec::with_capacity(joint.pairs.len());
    let mut acc = 0.0;
    for p in &joint.pairs {
        acc += p.joint / total;
        cdf.push(acc);
    }
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let idx = cdf.partition_point(|&c| c < u).min(joint.pairs.len() - 1);
            (joint.pairs[idx].w, joint.pairs[idx].s_idx)
        })
        .collect()
}
