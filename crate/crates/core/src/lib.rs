//! Numerics for quantum Renyi divergences and generalization-error bounds
//! of quantum learning algorithms on small finite-dimensional systems.
//!
//! Everything is dense, deterministic under explicit seeds, and validated
//! on construction. The crate is organized around:
//!
//! - [`operator`]: complex Hermitian linear algebra on labeled tensor
//!   factors (eigendecomposition, matrix functions, partial trace, Schatten
//!   norms, seeded generators);
//! - [`divergence`]: the classical and quantum divergence families plus the
//!   measured Renyi divergence via measurement-basis optimization;
//! - [`subgaussian`]: MGF evaluation and the operator Hoeffding bound;
//! - [`learning`]: exact enumeration of finite quantum learners;
//! - [`bounds`]: expected generalization-error bound evaluators;
//! - [`tail`]: single-draw (probabilistic) bounds and Monte-Carlo coverage;
//! - [`experiment`]: the two-state worked example, parameter sweeps, and
//!   CSV/SVG emission.

pub mod bounds;
pub mod divergence;
pub mod error;
pub mod experiment;
pub mod learning;
pub mod opt;
pub mod subgaussian;
pub mod tail;
pub mod tolerances;

pub mod operator;

pub use error::{Error, Result};
pub use operator::{
    ComplexMatrix, CptpChannel, DensityOperator, Factor, HermitianObservable, HilbertSpace, Povm,
    C64,
};
