//! Classical and quantum divergence families.

pub mod classical;
pub mod measured;
pub mod quantum;
pub mod value;
pub mod variational;

pub use classical::{
    classical_kl, classical_renyi, lp_distance, smooth_max_divergence, ClassicalDist,
};
pub use measured::{
    measured_renyi, measured_renyi_with_basis, tensor_power_trend, trend_upper_anchor,
    MeasuredOptConfig,
};
pub use quantum::{
    absolutely_continuous, modified_sandwiched, orthogonal_supports, petz_renyi,
    quantum_relative_entropy, reverse_sandwiched, sandwiched_renyi,
};
pub use value::{DivergenceKind, DivergenceValue, Magnitude, OptimizerDiagnostics};
pub use variational::{optimize_variational, variational_objective};
