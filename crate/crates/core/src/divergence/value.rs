//! Divergence result carrier: finite value or an explicit infinity marker.

use serde::{Deserialize, Serialize};

/// Which divergence produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    Classical,
    Kl,
    SmoothMax,
    Petz,
    Sandwiched,
    ReverseSandwiched,
    ModifiedSandwiched,
    Measured,
    RelativeEntropy,
}

impl DivergenceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DivergenceKind::Classical => "classical",
            DivergenceKind::Kl => "kl",
            DivergenceKind::SmoothMax => "smooth_max",
            DivergenceKind::Petz => "petz",
            DivergenceKind::Sandwiched => "sandwiched",
            DivergenceKind::ReverseSandwiched => "reverse_sandwiched",
            DivergenceKind::ModifiedSandwiched => "modified_sandwiched",
            DivergenceKind::Measured => "measured",
            DivergenceKind::RelativeEntropy => "relative_entropy",
        }
    }
}

/// A finite value or the explicit `+inf` marker. The marker never leaks
/// into arithmetic: consumers must branch on it, and bound evaluators map
/// it to "vacuous".
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Magnitude {
    Finite(f64),
    Infinite,
}

impl Magnitude {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Magnitude::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Magnitude::Finite(v) => Some(*v),
            Magnitude::Infinite => None,
        }
    }

    /// Unwrap a value that is known finite in context (test helper).
    pub fn expect_finite(&self, what: &str) -> f64 {
        self.finite()
            .unwrap_or_else(|| panic!("{} was unexpectedly infinite", what))
    }
}

impl Serialize for Magnitude {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Magnitude::Finite(v) => s.serialize_f64(*v),
            Magnitude::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Magnitude {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Num(f64),
            Str(String),
        }
        match Wire::deserialize(d)? {
            Wire::Num(v) => Ok(Magnitude::Finite(v)),
            Wire::Str(s) if s == "inf" => Ok(Magnitude::Infinite),
            Wire::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got \"{}\"",
                s
            ))),
        }
    }
}

/// Record of the derivative-free search behind a measured-divergence value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerDiagnostics {
    pub restarts: usize,
    pub total_iterations: usize,
    /// Best minus worst restart value; a large spread flags a rugged
    /// landscape.
    pub spread: f64,
    /// Final simplex diameter of the winning restart.
    pub final_simplex_diameter: f64,
    /// Set when the winning restart hit the iteration cap before the
    /// simplex collapsed.
    pub warning: bool,
}

/// A divergence evaluation: the order (when the family has one), the value
/// or infinity marker, and optional optimizer diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceValue {
    pub kind: DivergenceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub value: Magnitude,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<OptimizerDiagnostics>,
}

impl DivergenceValue {
    pub fn finite(kind: DivergenceKind, alpha: Option<f64>, value: f64) -> Self {
        Self {
            kind,
            alpha,
            value: Magnitude::Finite(value),
            diagnostics: None,
        }
    }

    pub fn infinite(kind: DivergenceKind, alpha: Option<f64>) -> Self {
        Self {
            kind,
            alpha,
            value: Magnitude::Infinite,
            diagnostics: None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}
