//! Description of a finite quantum learner.

use std::collections::BTreeMap;

use crate::divergence::ClassicalDist;
use crate::error::{Error, Result};
use crate::operator::space::HilbertSpace;
use crate::operator::tensor::{embed, tensor_obs};
use crate::operator::types::{CptpChannel, DensityOperator, HermitianObservable, Povm};
use crate::subgaussian::SubGaussianCert;
use crate::tolerances::ENUMERATION_CAP;

/// How the instance's maps are keyed.
///
/// In `IidLocal` mode the data states, extractor POVMs, channels, and
/// losses are all given per single sample `z`; the instance lifts them to
/// `n` copies itself (product data states, per-copy channels, averaged
/// local losses, and a first-copy extractor POVM). In `General` mode
/// everything is keyed by the full sample tuple `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearningMode {
    General,
    IidLocal,
}

/// A sample tuple `s in Z^n`, stored as indices into the sample space.
pub type SampleTuple = Vec<usize>;

/// Join tuple labels with commas to form map keys, e.g. "z0,z1".
pub fn sample_key(sample_space: &[String], s: &[usize]) -> String {
    s.iter()
        .map(|&i| sample_space[i].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn pair_key(w: &str, s_key: &str) -> String {
    format!("{}|{}", w, s_key)
}

/// Full description of a quantum learner on finite spaces.
#[derive(Debug, Clone)]
pub struct LearningInstance {
    pub sample_space: Vec<String>,
    pub prior: ClassicalDist,
    pub n: usize,
    pub mode: LearningMode,
    /// Single-copy spaces in `IidLocal` mode, full spaces in `General`.
    pub te_space: HilbertSpace,
    pub tr_space: HilbertSpace,
    pub hyp_space: HilbertSpace,
    /// Keyed by `z` (IidLocal) or the comma-joined sample key (General).
    pub data_states: BTreeMap<String, DensityOperator>,
    pub povms: BTreeMap<String, Povm>,
    /// Keyed by `w|z` or `w|s`; a missing entry means the identity
    /// (relabeling) channel from the train to the hypothesis space.
    pub channels: BTreeMap<String, CptpChannel>,
    /// Keyed like the channels; observables on test (x) hypothesis.
    pub losses: BTreeMap<String, HermitianObservable>,
    /// User-supplied sub-Gaussian constants; derived from the losses when
    /// absent.
    pub cert: Option<SubGaussianCert>,
    w_labels: Vec<String>,
}

impl LearningInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sample_space: Vec<String>,
        prior: ClassicalDist,
        n: usize,
        mode: LearningMode,
        te_space: HilbertSpace,
        tr_space: HilbertSpace,
        hyp_space: HilbertSpace,
        data_states: BTreeMap<String, DensityOperator>,
        povms: BTreeMap<String, Povm>,
        channels: BTreeMap<String, CptpChannel>,
        losses: BTreeMap<String, HermitianObservable>,
        cert: Option<SubGaussianCert>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("n must be at least 1"));
        }
        if sample_space.is_empty() {
            return Err(Error::config("empty sample space"));
        }
        if prior.len() != sample_space.len() {
            return Err(Error::config("prior length does not match the sample space"));
        }

        // The POVM outcome labels define the hypothesis alphabet; every
        // POVM must agree on it.
        let first = povms
            .values()
            .next()
            .ok_or_else(|| Error::config("no POVMs supplied"))?;
        let w_labels: Vec<String> = first
            .outcome_labels()
            .iter()
            .map(|s| s.to_string())
            .collect();
        for (key, p) in &povms {
            let labels: Vec<String> = p.outcome_labels().iter().map(|s| s.to_string()).collect();
            if labels != w_labels {
                return Err(Error::config(format!(
                    "POVM '{}' has outcome labels {:?}, expected {:?}",
                    key, labels, w_labels
                )));
            }
        }

        let z = sample_space.len();
        let enumeration = w_labels
            .len()
            .checked_mul(z.checked_pow(n as u32).ok_or_else(|| {
                Error::config("|Z|^n overflows")
            })?)
            .ok_or_else(|| Error::config("enumeration size overflows"))?;
        if enumeration > ENUMERATION_CAP {
            return Err(Error::config(format!(
                "enumeration size |W| * |Z|^n = {} exceeds the cap {}",
                enumeration, ENUMERATION_CAP
            )));
        }

        let instance = Self {
            sample_space,
            prior,
            n,
            mode,
            te_space,
            tr_space,
            hyp_space,
            data_states,
            povms,
            channels,
            losses,
            cert,
            w_labels,
        };
        instance.validate_components()?;
        Ok(instance)
    }

    fn component_keys(&self) -> Result<Vec<String>> {
        match self.mode {
            LearningMode::IidLocal => Ok(self.sample_space.clone()),
            LearningMode::General => {
                let mut keys = Vec::new();
                for s in self.enumerate_samples() {
                    keys.push(sample_key(&self.sample_space, &s));
                }
                Ok(keys)
            }
        }
    }

    fn validate_components(&self) -> Result<()> {
        let data_space = self.te_space.tensor(&self.tr_space)?;
        for key in self.component_keys()? {
            let rho = self
                .data_states
                .get(&key)
                .ok_or_else(|| Error::config(format!("missing data state for '{}'", key)))?;
            if rho.space() != &data_space {
                return Err(Error::config(format!(
                    "data state '{}' is not on the test (x) train space",
                    key
                )));
            }
            let povm = self
                .povms
                .get(&key)
                .ok_or_else(|| Error::config(format!("missing POVM for '{}'", key)))?;
            if povm.space() != &self.tr_space {
                return Err(Error::config(format!(
                    "POVM '{}' is not on the train space",
                    key
                )));
            }
            for w in &self.w_labels {
                let pk = pair_key(w, &key);
                if let Some(ch) = self.channels.get(&pk) {
                    if ch.input_space() != &self.tr_space || ch.output_space() != &self.hyp_space {
                        return Err(Error::config(format!(
                            "channel '{}' must map the train space to the hypothesis space",
                            pk
                        )));
                    }
                }
                let loss_space = self.te_space.tensor(&self.hyp_space)?;
                let loss = self
                    .losses
                    .get(&pk)
                    .ok_or_else(|| Error::config(format!("missing loss for '{}'", pk)))?;
                if loss.space().total_dim() != loss_space.total_dim()
                    || !loss_space
                        .factors()
                        .iter()
                        .all(|f| loss.space().has_label(&f.label))
                {
                    return Err(Error::config(format!(
                        "loss '{}' is not on the test (x) hypothesis factors",
                        pk
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn w_labels(&self) -> &[String] {
        &self.w_labels
    }

    pub fn w_count(&self) -> usize {
        self.w_labels.len()
    }

    /// All sample tuples in row-major order (last coordinate fastest).
    pub fn enumerate_samples(&self) -> Vec<SampleTuple> {
        let z = self.sample_space.len();
        let total = z.pow(self.n as u32);
        (0..total)
            .map(|mut flat| {
                let mut tuple = vec![0usize; self.n];
                for slot in (0..self.n).rev() {
                    tuple[slot] = flat % z;
                    flat /= z;
                }
                tuple
            })
            .collect()
    }

    /// Product prior weight `P^n(s)`.
    pub fn prior_weight(&self, s: &[usize]) -> f64 {
        s.iter().map(|&i| self.prior.probs()[i]).product()
    }

    fn copy_suffix(&self, copy: usize) -> String {
        if self.n == 1 {
            String::new()
        } else {
            format!(".{}", copy + 1)
        }
    }

    fn relabeled(&self, base: &HilbertSpace, copy: usize) -> Result<HilbertSpace> {
        let suffix = self.copy_suffix(copy);
        HilbertSpace::from_factors(
            base.factors()
                .iter()
                .map(|f| crate::operator::space::Factor {
                    label: format!("{}{}", f.label, suffix),
                    dim: f.dim,
                })
                .collect(),
        )
    }

    /// Test-space labels of the full data state.
    pub fn full_te_labels(&self) -> Vec<String> {
        match self.mode {
            LearningMode::General => self
                .te_space
                .factors()
                .iter()
                .map(|f| f.label.clone())
                .collect(),
            LearningMode::IidLocal => (0..self.n)
                .flat_map(|c| {
                    let suffix = self.copy_suffix(c);
                    self.te_space
                        .factors()
                        .iter()
                        .map(move |f| format!("{}{}", f.label, suffix))
                        .collect::<Vec<_>>()
                })
                .collect(),
        }
    }

    pub fn full_tr_labels(&self) -> Vec<String> {
        match self.mode {
            LearningMode::General => self
                .tr_space
                .factors()
                .iter()
                .map(|f| f.label.clone())
                .collect(),
            LearningMode::IidLocal => (0..self.n)
                .flat_map(|c| {
                    let suffix = self.copy_suffix(c);
                    self.tr_space
                        .factors()
                        .iter()
                        .map(move |f| format!("{}{}", f.label, suffix))
                        .collect::<Vec<_>>()
                })
                .collect(),
        }
    }

    pub fn full_hyp_labels(&self) -> Vec<String> {
        match self.mode {
            LearningMode::General => self
                .hyp_space
                .factors()
                .iter()
                .map(|f| f.label.clone())
                .collect(),
            LearningMode::IidLocal => (0..self.n)
                .flat_map(|c| {
                    let suffix = self.copy_suffix(c);
                    self.hyp_space
                        .factors()
                        .iter()
                        .map(move |f| format!("{}{}", f.label, suffix))
                        .collect::<Vec<_>>()
                })
                .collect(),
        }
    }

    /// Full data state `rho(s)` on the test (x) train factors.
    ///
    /// `IidLocal` mode takes the tensor product of the per-sample states
    /// with per-copy relabeling, keeping the copies interleaved as
    /// `te.1, tr.1, te.2, tr.2, ...`.
    pub fn data_state(&self, s: &[usize]) -> Result<DensityOperator> {
        match self.mode {
            LearningMode::General => {
                let key = sample_key(&self.sample_space, s);
                Ok(self.data_states[&key].clone())
            }
            LearningMode::IidLocal => {
                let mut acc: Option<DensityOperator> = None;
                for (copy, &zi) in s.iter().enumerate() {
                    let rho = &self.data_states[&self.sample_space[zi]];
                    let copy_state = crate::operator::tensor::relabel_density(
                        rho,
                        &self.copy_suffix(copy),
                    )?;
                    acc = Some(match acc {
                        None => copy_state,
                        Some(prev) => crate::operator::tensor::tensor_density(&prev, &copy_state)?,
                    });
                }
                Ok(acc.unwrap())
            }
        }
    }

    /// The extractor POVM element for outcome `w` given the sample `s`,
    /// embedded on the full train factors.
    ///
    /// `IidLocal` mode with several copies lifts the per-sample extractor
    /// to the full register by measuring the first copy (a valid POVM that
    /// keeps the post-measurement state factorized per copy, which is the
    /// structure the per-sample bounds presume).
    pub fn extractor_element(
        &self,
        w: usize,
        s: &[usize],
        full_tr: &HilbertSpace,
    ) -> Result<HermitianObservable> {
        match self.mode {
            LearningMode::General => {
                let key = sample_key(&self.sample_space, s);
                let povm = &self.povms[&key];
                let element = povm
                    .element(&self.w_labels[w])
                    .ok_or_else(|| Error::config("missing POVM outcome"))?;
                embed(element, full_tr)
            }
            LearningMode::IidLocal => {
                let povm = &self.povms[&self.sample_space[s[0]]];
                let element = povm
                    .element(&self.w_labels[w])
                    .ok_or_else(|| Error::config("missing POVM outcome"))?;
                let relabeled_space = self.relabeled(&self.tr_space, 0)?;
                let relabeled = HermitianObservable::from_symmetrized(
                    relabeled_space,
                    element.matrix().clone(),
                );
                embed(&relabeled, full_tr)
            }
        }
    }

    /// Channel(s) for the pair `(w, s)`: one per copy in `IidLocal` mode,
    /// a single full-register channel in `General` mode. Each entry maps
    /// its train factor(s) to the matching hypothesis factor(s).
    pub fn channels_for(&self, w: usize, s: &[usize]) -> Result<Vec<CptpChannel>> {
        let wl = &self.w_labels[w];
        match self.mode {
            LearningMode::General => {
                let key = pair_key(wl, &sample_key(&self.sample_space, s));
                match self.channels.get(&key) {
                    Some(ch) => Ok(vec![ch.clone()]),
                    None => Ok(vec![CptpChannel::relabeling(
                        self.tr_space.clone(),
                        self.hyp_space.clone(),
                    )?]),
                }
            }
            LearningMode::IidLocal => {
                let mut out = Vec::with_capacity(self.n);
                for (copy, &zi) in s.iter().enumerate() {
                    let key = pair_key(wl, &self.sample_space[zi]);
                    let base = match self.channels.get(&key) {
                        Some(ch) => ch.clone(),
                        None => CptpChannel::relabeling(
                            self.tr_space.clone(),
                            self.hyp_space.clone(),
                        )?,
                    };
                    let input = self.relabeled(base.input_space(), copy)?;
                    let output = self.relabeled(base.output_space(), copy)?;
                    out.push(CptpChannel::new(input, output, base.kraus().to_vec())?);
                }
                Ok(out)
            }
        }
    }

    /// Loss observable for the pair `(w, s)` on the full test (x)
    /// hypothesis factors. `IidLocal` mode materializes the symmetrized
    /// local average lazily per call.
    pub fn loss(&self, w: usize, s: &[usize], loss_space: &HilbertSpace) -> Result<HermitianObservable> {
        let wl = &self.w_labels[w];
        match self.mode {
            LearningMode::General => {
                let key = pair_key(wl, &sample_key(&self.sample_space, s));
                Ok(self.losses[&key].clone())
            }
            LearningMode::IidLocal => {
                let mut acc = HermitianObservable::zero(loss_space.clone());
                for (copy, &zi) in s.iter().enumerate() {
                    let key = pair_key(wl, &self.sample_space[zi]);
                    let local = &self.losses[&key];
                    let relabeled = HermitianObservable::from_symmetrized(
                        self.relabeled(local.space(), copy)?,
                        local.matrix().clone(),
                    );
                    let lifted = embed(&relabeled, loss_space)?;
                    acc = acc.add(&lifted)?;
                }
                Ok(acc.scale(1.0 / self.n as f64))
            }
        }
    }

    /// Trivial learner: one hypothesis, identity extractor, identity
    /// channel. Useful as a fixture.
    pub fn trivial(
        sample_space: Vec<String>,
        prior: ClassicalDist,
        te_space: HilbertSpace,
        tr_space: HilbertSpace,
        data_states: BTreeMap<String, DensityOperator>,
        loss: HermitianObservable,
    ) -> Result<Self> {
        let mut povms = BTreeMap::new();
        let povm = Povm::new(
            tr_space.clone(),
            vec![("w0".to_string(), HermitianObservable::identity(tr_space.clone()))],
        )?;
        for z in &sample_space {
            povms.insert(z.clone(), povm.clone());
        }
        let mut losses = BTreeMap::new();
        for z in &sample_space {
            losses.insert(pair_key("w0", z), loss.clone());
        }
        Self::new(
            sample_space,
            prior,
            1,
            LearningMode::IidLocal,
            te_space,
            tr_space.clone(),
            tr_space,
            data_states,
            povms,
            BTreeMap::new(),
            losses,
            None,
        )
    }
}

/// Tensor product of test and hypothesis reduced states in the loss
/// factor order is needed in several places; helper for building it.
pub fn product_te_hyp(
    rho_te: &DensityOperator,
    sigma_hyp: &DensityOperator,
) -> Result<DensityOperator> {
    let obs = tensor_obs(rho_te.as_observable(), sigma_hyp.as_observable())?;
    Ok(DensityOperator::from_trusted(obs))
}
