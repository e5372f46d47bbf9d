//! Seeded instance generators for property sweeps and the selftest.

use std::collections::BTreeMap;

use rand::Rng;

use crate::divergence::ClassicalDist;
use crate::error::Result;
use crate::learning::instance::{pair_key, LearningInstance, LearningMode};
use crate::operator::random::{
    random_cptp_with, random_density_with, random_hermitian_with, random_povm_with, rng_from_seed,
};
use crate::operator::space::HilbertSpace;
use crate::operator::types::{CptpChannel, DensityOperator, HermitianObservable, Povm};
use crate::operator::ComplexMatrix;

/// Shape of a random instance.
#[derive(Debug, Clone)]
pub struct RandomInstanceConfig {
    pub w_count: usize,
    pub z_count: usize,
    pub te_dim: usize,
    pub tr_dim: usize,
    pub hyp_dim: usize,
    pub n: usize,
    pub kraus_count: usize,
    /// Entangled data states across test/train when true; product states
    /// otherwise.
    pub entangled: bool,
    pub seed: u64,
}

impl Default for RandomInstanceConfig {
    fn default() -> Self {
        Self {
            w_count: 2,
            z_count: 2,
            te_dim: 2,
            tr_dim: 2,
            hyp_dim: 2,
            n: 1,
            kraus_count: 2,
            entangled: true,
            seed: 42,
        }
    }
}

fn random_prior(rng: &mut rand_chacha::ChaCha8Rng, labels: &[String]) -> ClassicalDist {
    let mut probs: Vec<f64> = labels.iter().map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    ClassicalDist::new(labels.to_vec(), probs).expect("random prior is valid")
}

/// Random non-negative loss observable, matching the framework's loss
/// family. Keeping the spectrum in `[0, ||L||_inf]` makes the norm-derived
/// certificate `||L||_inf / 2` exactly the Hoeffding constant.
fn random_nonneg_loss(
    rng: &mut rand_chacha::ChaCha8Rng,
    space: &HilbertSpace,
    scale: f64,
) -> HermitianObservable {
    let h = random_hermitian_with(rng, space, scale);
    let eig = h.eig().expect("random Hermitian decomposes");
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    h.shift(-min)
}

/// Fully random instance: Ginibre data states (entangled or product),
/// random extractor POVMs, random channels, random Hermitian losses.
/// Certificates are left unset so the evaluators derive valid ones.
pub fn random_instance(cfg: &RandomInstanceConfig) -> Result<LearningInstance> {
    let mut rng = rng_from_seed(cfg.seed);
    let te = HilbertSpace::single("te", cfg.te_dim)?;
    let tr = HilbertSpace::single("tr", cfg.tr_dim)?;
    let hyp = HilbertSpace::single("hyp", cfg.hyp_dim)?;
    let sample_space: Vec<String> = (0..cfg.z_count).map(|z| format!("z{}", z)).collect();
    let prior = random_prior(&mut rng, &sample_space);
    let data_space = te.tensor(&tr)?;
    let loss_space = te.tensor(&hyp)?;

    let mut data_states = BTreeMap::new();
    for z in &sample_space {
        let rho = if cfg.entangled {
            random_density_with(&mut rng, &data_space, data_space.total_dim())?
        } else {
            let a = random_density_with(&mut rng, &te, cfg.te_dim)?;
            let b = random_density_with(&mut rng, &tr, cfg.tr_dim)?;
            crate::operator::tensor::tensor_density(&a, &b)?
        };
        data_states.insert(z.clone(), rho);
    }

    let mut povms = BTreeMap::new();
    for z in &sample_space {
        let raw = random_povm_with(&mut rng, &tr, cfg.w_count)?;
        // Relabel outcomes as w0..wk for readability.
        let elements = raw
            .elements()
            .iter()
            .enumerate()
            .map(|(i, (_, e))| (format!("w{}", i), e.clone()))
            .collect();
        povms.insert(z.clone(), Povm::new(tr.clone(), elements)?);
    }

    let mut channels = BTreeMap::new();
    let mut losses = BTreeMap::new();
    for w in 0..cfg.w_count {
        for z in &sample_space {
            let key = pair_key(&format!("w{}", w), z);
            channels.insert(
                key.clone(),
                random_cptp_with(&mut rng, &tr, &hyp, cfg.kraus_count)?,
            );
            losses.insert(key, random_nonneg_loss(&mut rng, &loss_space, 0.6));
        }
    }

    LearningInstance::new(
        sample_space,
        prior,
        cfg.n,
        LearningMode::IidLocal,
        te,
        tr,
        hyp,
        data_states,
        povms,
        channels,
        losses,
        None,
    )
}

/// Classical embedding: all quantum factors one-dimensional, so the POVM
/// weights are an arbitrary conditional distribution `P(w|z)` and the
/// losses are scalars. Quantum terms of every bound vanish identically.
pub fn classical_embedding_instance(
    w_count: usize,
    z_count: usize,
    seed: u64,
) -> Result<LearningInstance> {
    let mut rng = rng_from_seed(seed);
    let te = HilbertSpace::single("te", 1)?;
    let tr = HilbertSpace::single("tr", 1)?;
    let hyp = HilbertSpace::single("hyp", 1)?;
    let sample_space: Vec<String> = (0..z_count).map(|z| format!("z{}", z)).collect();
    let prior = random_prior(&mut rng, &sample_space);
    let data_space = te.tensor(&tr)?;
    let loss_space = te.tensor(&hyp)?;

    let scalar_state = DensityOperator::new(data_space, ComplexMatrix::identity(1))?;
    let mut data_states = BTreeMap::new();
    for z in &sample_space {
        data_states.insert(z.clone(), scalar_state.clone());
    }

    let mut povms = BTreeMap::new();
    for z in &sample_space {
        let mut weights: Vec<f64> = (0..w_count).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|p| *p /= total);
        let elements = weights
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                (
                    format!("w{}", i),
                    HermitianObservable::new(tr.clone(), ComplexMatrix::identity(1).scale_re(p))
                        .expect("scalar element"),
                )
            })
            .collect();
        povms.insert(z.clone(), Povm::new(tr.clone(), elements)?);
    }

    let mut losses = BTreeMap::new();
    for w in 0..w_count {
        for z in &sample_space {
            let value: f64 = rng.gen_range(-1.0..1.0);
            losses.insert(
                pair_key(&format!("w{}", w), z),
                HermitianObservable::new(
                    loss_space.clone(),
                    ComplexMatrix::identity(1).scale_re(value),
                )?,
            );
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
        None,
    )
}

/// The scalar loss table `l(w, z)` of a classical embedding instance.
pub fn embedding_loss_table(instance: &LearningInstance) -> Vec<Vec<f64>> {
    let w_count = instance.w_labels().len();
    (0..w_count)
        .map(|w| {
            instance
                .sample_space
                .iter()
                .map(|z| {
                    instance.losses[&pair_key(&format!("w{}", w), z)].matrix()[(0, 0)].re
                })
                .collect()
        })
        .collect()
}

/// Fully independent instance: identical product data states, sample-
/// independent extractor weights and channels, one fixed loss. Every
/// deviation and information term vanishes.
pub fn independent_instance(w_count: usize, z_count: usize, seed: u64) -> Result<LearningInstance> {
    let mut rng = rng_from_seed(seed);
    let te = HilbertSpace::single("te", 2)?;
    let tr = HilbertSpace::single("tr", 2)?;
    let hyp = HilbertSpace::single("hyp", 2)?;
    let sample_space: Vec<String> = (0..z_count).map(|z| format!("z{}", z)).collect();
    let prior = random_prior(&mut rng, &sample_space);
    let loss_space = te.tensor(&hyp)?;

    let te_state = random_density_with(&mut rng, &te, 2)?;
    let tr_state = random_density_with(&mut rng, &tr, 2)?;
    let product = crate::operator::tensor::tensor_density(&te_state, &tr_state)?;
    let mut data_states = BTreeMap::new();
    for z in &sample_space {
        data_states.insert(z.clone(), product.clone());
    }

    let mut weights: Vec<f64> = (0..w_count).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|p| *p /= total);
    let elements: Vec<(String, HermitianObservable)> = weights
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            (
                format!("w{}", i),
                HermitianObservable::identity(tr.clone()).scale(p),
            )
        })
        .collect();
    let povm = Povm::new(tr.clone(), elements)?;
    let mut povms = BTreeMap::new();
    for z in &sample_space {
        povms.insert(z.clone(), povm.clone());
    }

    // One channel per hypothesis, shared across samples.
    let per_w_channels: Vec<CptpChannel> = (0..w_count)
        .map(|_| random_cptp_with(&mut rng, &tr, &hyp, 2))
        .collect::<Result<_>>()?;
    let loss = random_nonneg_loss(&mut rng, &loss_space, 0.5);
    let mut channels = BTreeMap::new();
    let mut losses = BTreeMap::new();
    for (w, ch) in per_w_channels.iter().enumerate() {
        for z in &sample_space {
            let key = pair_key(&format!("w{}", w), z);
            channels.insert(key.clone(), ch.clone());
            losses.insert(key, loss.clone());
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
        channels,
        losses,
        None,
    )
}

/// i.i.d. two-sample instance whose extractor measures the first copy;
/// the post-measurement state factorizes per copy, which is the structure
/// the individual-sample bound presumes.
pub fn random_iid_pair_instance(seed: u64) -> Result<LearningInstance> {
    let cfg = RandomInstanceConfig {
        w_count: 2,
        z_count: 2,
        n: 2,
        entangled: false,
        seed,
        ..Default::default()
    };
    random_instance(&cfg)
}
