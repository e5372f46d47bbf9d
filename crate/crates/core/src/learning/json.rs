//! JSON wire format for learning instances.
//!
//! Complex numbers travel as `[re, im]` pairs, channels as Kraus lists,
//! and a missing channel entry means the identity channel.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::divergence::ClassicalDist;
use crate::error::{Error, Result};
use crate::learning::instance::{LearningInstance, LearningMode};
use crate::operator::matrix::ComplexMatrix;
use crate::operator::space::{Factor, HilbertSpace};
use crate::operator::types::{CptpChannel, DensityOperator, HermitianObservable, Povm};
use crate::subgaussian::SubGaussianCert;

#[derive(Serialize, Deserialize)]
struct SpacesWire {
    te: Vec<Factor>,
    tr: Vec<Factor>,
    hyp: Vec<Factor>,
}

#[derive(Serialize, Deserialize)]
struct InstanceWire {
    sample_space: Vec<String>,
    prior: Vec<f64>,
    n: usize,
    mode: String,
    spaces: SpacesWire,
    data_states: BTreeMap<String, ComplexMatrix>,
    povms: BTreeMap<String, BTreeMap<String, ComplexMatrix>>,
    #[serde(default)]
    channels: BTreeMap<String, Vec<ComplexMatrix>>,
    losses: BTreeMap<String, ComplexMatrix>,
    #[serde(default)]
    mu: Option<f64>,
    #[serde(default)]
    tau: Option<f64>,
}

pub fn instance_from_json(text: &str) -> Result<LearningInstance> {
    let wire: InstanceWire = serde_json::from_str(text)
        .map_err(|e| Error::config(format!("instance JSON: {}", e)))?;
    let mode = match wire.mode.as_str() {
        "general" => LearningMode::General,
        "iid_local" => LearningMode::IidLocal,
        other => {
            return Err(Error::config(format!(
                "mode '{}' must be 'general' or 'iid_local'",
                other
            )))
        }
    };
    let te = HilbertSpace::from_factors(wire.spaces.te)?;
    let tr = HilbertSpace::from_factors(wire.spaces.tr)?;
    let hyp = HilbertSpace::from_factors(wire.spaces.hyp)?;
    let data_space = te.tensor(&tr)?;
    let loss_space = te.tensor(&hyp)?;

    let mut data_states = BTreeMap::new();
    for (key, m) in wire.data_states {
        data_states.insert(key.clone(), DensityOperator::new(data_space.clone(), m)
            .map_err(|e| Error::config(format!("data state '{}': {}", key, e)))?);
    }
    let mut povms = BTreeMap::new();
    for (key, elements) in wire.povms {
        let elems = elements
            .into_iter()
            .map(|(w, m)| {
                HermitianObservable::new(tr.clone(), m)
                    .map(|h| (w.clone(), h))
                    .map_err(|e| Error::config(format!("POVM '{}' outcome '{}': {}", key, w, e)))
            })
            .collect::<Result<Vec<_>>>()?;
        povms.insert(key.clone(), Povm::new(tr.clone(), elems)
            .map_err(|e| Error::config(format!("POVM '{}': {}", key, e)))?);
    }
    let mut channels = BTreeMap::new();
    for (key, kraus) in wire.channels {
        channels.insert(key.clone(), CptpChannel::new(tr.clone(), hyp.clone(), kraus)
            .map_err(|e| Error::config(format!("channel '{}': {}", key, e)))?);
    }
    let mut losses = BTreeMap::new();
    for (key, m) in wire.losses {
        losses.insert(key.clone(), HermitianObservable::new(loss_space.clone(), m)
            .map_err(|e| Error::config(format!("loss '{}': {}", key, e)))?);
    }
    let cert = match (wire.mu, wire.tau) {
        (Some(mu), Some(tau)) => Some(SubGaussianCert::user_supplied(mu, tau)?),
        (None, None) => None,
        _ => {
            return Err(Error::config(
                "mu and tau must be supplied together or both omitted",
            ))
        }
    };
    let prior = ClassicalDist::new(wire.sample_space.clone(), wire.prior)
        .map_err(|e| Error::config(format!("prior: {}", e)))?;

    LearningInstance::new(
        wire.sample_space,
        prior,
        wire.n,
        mode,
        te,
        tr,
        hyp,
        data_states,
        povms,
        channels,
        losses,
        cert,
    )
}

pub fn instance_to_json(instance: &LearningInstance) -> Result<String> {
    let wire = InstanceWire {
        sample_space: instance.sample_space.clone(),
        prior: instance.prior.probs().to_vec(),
        n: instance.n,
        mode: match instance.mode {
            LearningMode::General => "general".into(),
            LearningMode::IidLocal => "iid_local".into(),
        },
        spaces: SpacesWire {
            te: instance.te_space.factors().to_vec(),
            tr: instance.tr_space.factors().to_vec(),
            hyp: instance.hyp_space.factors().to_vec(),
        },
        data_states: instance
            .data_states
            .iter()
            .map(|(k, v)| (k.clone(), v.matrix().clone()))
            .collect(),
        povms: instance
            .povms
            .iter()
            .map(|(k, p)| {
                (
                    k.clone(),
                    p.elements()
                        .iter()
                        .map(|(w, e)| (w.clone(), e.matrix().clone()))
                        .collect(),
                )
            })
            .collect(),
        channels: instance
            .channels
            .iter()
            .map(|(k, c)| (k.clone(), c.kraus().to_vec()))
            .collect(),
        losses: instance
            .losses
            .iter()
            .map(|(k, l)| (k.clone(), l.matrix().clone()))
            .collect(),
        mu: instance.cert.map(|c| c.mu),
        tau: instance.cert.map(|c| c.tau),
    };
    serde_json::to_string_pretty(&wire).map_err(|e| Error::config(e.to_string()))
}
