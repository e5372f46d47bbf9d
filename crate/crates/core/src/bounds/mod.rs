//! Expected generalization-error bounds.

pub mod deviation;
pub mod evaluators;
pub mod report;

pub use deviation::{
    classical_div_by_order, classical_gamma_term, coordinate_mutual_information,
    coordinate_renyi_mutual_information, deviation_terms, mutual_information,
    renyi_mutual_information, smooth_max_mutual_information, QuantumDivKind,
};
pub use evaluators::{
    bound_caro_old, bound_iid_individual, bound_kl, bound_l1, bound_renyi, classical_bounds,
    default_alpha_grid_above, default_alpha_grid_below, log_spaced, ClassicalBounds,
};
pub use report::{BoundKind, BoundReport, GridPoint};
