//! Evaluated bound values per grid point plus the realized generalization
//! error for soundness checks.

use serde::{Deserialize, Serialize};

/// Which bound family a report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    L1,
    Lp,
    Kl,
    RenyiMod,
    RenyiPetz,
    CaroOld,
    IidMod,
    IidPetz,
    Classical,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::L1 => "l1",
            BoundKind::Lp => "lp",
            BoundKind::Kl => "kl",
            BoundKind::RenyiMod => "renyi-mod",
            BoundKind::RenyiPetz => "renyi-petz",
            BoundKind::CaroOld => "caro-old",
            BoundKind::IidMod => "iid-mod",
            BoundKind::IidPetz => "iid-petz",
            BoundKind::Classical => "classical",
        }
    }
}

/// One evaluated grid point; `None` marks a vacuous (infinite) value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPoint {
    pub param: f64,
    pub value: Option<f64>,
}

/// A fully evaluated bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_kind: BoundKind,
    /// Total bound value per grid parameter (quantum part at that order
    /// plus the optimized classical term of the matching branch).
    pub grid: Vec<GridPoint>,
    /// Parameter achieving the optimum after local refinement.
    pub optimum_param: f64,
    /// `None` when every grid point was vacuous.
    pub optimum_value: Option<f64>,
    pub realized_abs_gen: f64,
    pub sound: bool,
    pub vacuous: bool,
}

impl BoundReport {
    pub fn assemble(
        bound_kind: BoundKind,
        grid: Vec<GridPoint>,
        optimum_param: f64,
        optimum_value: Option<f64>,
        realized_abs_gen: f64,
    ) -> Self {
        let vacuous = optimum_value.is_none();
        let sound = match optimum_value {
            Some(v) => realized_abs_gen <= v + 1e-9,
            None => true,
        };
        Self {
            bound_kind,
            grid,
            optimum_param,
            optimum_value,
            realized_abs_gen,
            sound,
            vacuous,
        }
    }
}
