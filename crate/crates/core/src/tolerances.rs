//! Numerical thresholds shared across the crate.
//!
//! Every cutoff used by constructors, support decisions, and optimizers is
//! named here rather than inlined at call sites.

/// Hermiticity defect allowed on construction, `max |M - M^dag|`.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigenvalues of a density operator may undershoot zero by this much.
pub const PSD_TOL: f64 = 1e-10;

/// `|trace - 1|` allowed for a density operator.
pub const TRACE_TOL: f64 = 1e-10;

/// POVM completeness / channel trace-preservation defect, sup norm.
pub const COMPLETENESS_TOL: f64 = 1e-8;

/// Relative support cutoff: eigenvalues below `SUPPORT_EPS * lambda_max`
/// are treated as exact zeros when taking powers and logarithms.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Weight of a positive operator on the kernel of a reference state above
/// which absolute continuity is rejected.
pub const SUPPORT_CONTAINMENT_TOL: f64 = 1e-9;

/// Target off-diagonal mass for the Jacobi eigensolver, relative to the
/// input norm.
pub const JACOBI_TOL: f64 = 1e-13;

/// Sweep cap for the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Required reconstruction accuracy `|U diag(w) U^dag - A|` after an
/// eigendecomposition.
pub const EIG_RECONSTRUCTION_TOL: f64 = 1e-9;

/// Probability atoms at or below this weight are treated as zero when a
/// measurement outcome is enumerated.
pub const OUTCOME_DROP_TOL: f64 = 1e-12;

/// Classical probability atoms at or below this value count as outside the
/// support of a distribution.
pub const ATOM_EPS: f64 = 1e-15;

/// Orders within this distance of 1 are routed to the relative-entropy /
/// KL implementations.
pub const ORDER_ONE_EPS: f64 = 1e-6;

/// Hilbert-space dimension cap for dense kernels.
pub const DIM_CAP: usize = 256;

/// Enumeration cap `|W| * |Z|^n` for learning instances.
pub const ENUMERATION_CAP: usize = 4096;

/// `exp` argument magnitude beyond which MGF evaluation reports a range
/// error instead of overflowing.
pub const EXP_OVERFLOW_LIMIT: f64 = 700.0;

/// Divergence values below this floor are treated as exact zeros before
/// entering square-root penalty terms; keeps eigendecomposition noise of
/// identical states from surfacing as ~1e-8 bound contributions.
pub const DIVERGENCE_NOISE_FLOOR: f64 = 1e-14;
