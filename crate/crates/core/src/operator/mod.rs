//! Dense complex Hermitian linear algebra on labeled tensor-product spaces.

pub mod eig;
pub mod func;
pub mod matrix;
pub mod random;
pub mod space;
pub mod tensor;
pub mod types;

pub use eig::{jacobi_hermitian_eig, EigDecomposition};
pub use func::{
    herm_exp, matrix_function, psd_power, schatten_norm, schatten_norm_matrix, support_log,
    support_projector, weight_on_support, weight_outside_support,
};
pub use matrix::{ComplexMatrix, C64};
pub use random::{
    random_commuting_pair, random_cptp, random_cptp_with, random_density, random_density_with,
    random_hermitian, random_hermitian_with, random_povm, random_povm_with, random_unitary_with,
    rng_from_seed,
};
pub use space::{Factor, HilbertSpace};
pub use tensor::{
    apply_channel_on, embed, partial_trace, partial_trace_density, permute_density,
    permute_factors, relabel_density, tensor_density, tensor_obs, tensor_power_density, trace_pair,
};
pub use types::{CptpChannel, DensityOperator, HermitianObservable, OperatorWire, Povm};

use crate::error::Result;

/// Eigendecomposition of a Hermitian observable: descending eigenvalues and
/// the unitary of eigenvectors.
pub fn herm_eig(h: &HermitianObservable) -> Result<(Vec<f64>, ComplexMatrix)> {
    let d = h.eig()?;
    Ok((d.eigenvalues, d.eigenvectors))
}
