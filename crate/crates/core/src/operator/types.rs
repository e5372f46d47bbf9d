//! Validated operator types on labeled Hilbert spaces.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::eig::{jacobi_hermitian_eig, EigDecomposition};
use crate::operator::matrix::ComplexMatrix;
use crate::operator::space::{Factor, HilbertSpace};
use crate::tolerances::{COMPLETENESS_TOL, HERMITICITY_TOL, PSD_TOL, TRACE_TOL};

/// Bounded self-adjoint operator on a labeled space.
///
/// The matrix is symmetrized on construction; inputs whose Hermiticity
/// defect exceeds [`HERMITICITY_TOL`] are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    space: HilbertSpace,
    matrix: ComplexMatrix,
}

impl HermitianObservable {
    pub fn new(space: HilbertSpace, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows != space.total_dim() {
            return Err(Error::config(format!(
                "matrix is {}x{} but the space has dimension {}",
                matrix.rows,
                matrix.cols,
                space.total_dim()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::config("non-finite matrix entries"));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::config(format!(
                "Hermiticity defect {:.3e} exceeds {:.1e}",
                defect, HERMITICITY_TOL
            )));
        }
        Ok(Self {
            space,
            matrix: matrix.symmetrize(),
        })
    }

    pub fn zero(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            space,
            matrix: ComplexMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            space,
            matrix: ComplexMatrix::identity(d),
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn eig(&self) -> Result<EigDecomposition> {
        jacobi_hermitian_eig(&self.matrix)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Internal constructor for matrices already Hermitian by construction.
    pub(crate) fn from_symmetrized(space: HilbertSpace, matrix: ComplexMatrix) -> Self {
        Self {
            space,
            matrix: matrix.symmetrize(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_symmetrized(
            self.space.clone(),
            self.matrix.add(&other.matrix),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_symmetrized(
            self.space.clone(),
            self.matrix.sub(&other.matrix),
        ))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_symmetrized(self.space.clone(), self.matrix.scale_re(factor))
    }

    /// `self + c * I`.
    pub fn shift(&self, c: f64) -> Self {
        let shifted = self
            .matrix
            .add(&ComplexMatrix::identity(self.dim()).scale_re(c));
        Self::from_symmetrized(self.space.clone(), shifted)
    }

    pub fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::config("operators live on different spaces"));
        }
        Ok(())
    }

    /// `Tr[self * other]`, both on the same space.
    pub fn trace_with(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self.matrix.trace_product(&other.matrix).re)
    }
}

/// Positive semidefinite unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: HermitianObservable,
}

impl DensityOperator {
    pub fn new(space: HilbertSpace, matrix: ComplexMatrix) -> Result<Self> {
        let op = HermitianObservable::new(space, matrix)?;
        Self::from_observable(op)
    }

    pub fn from_observable(op: HermitianObservable) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::config(format!(
                "density operator trace {} deviates from 1 by more than {:.1e}",
                tr, TRACE_TOL
            )));
        }
        let eig = op.eig()?;
        if let Some(&min) = eig
            .eigenvalues
            .iter()
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            if min < -PSD_TOL {
                return Err(Error::config(format!(
                    "density operator has eigenvalue {:.3e} below -{:.1e}",
                    min, PSD_TOL
                )));
            }
        }
        Ok(Self { op })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            op: HermitianObservable::from_symmetrized(
                space,
                ComplexMatrix::identity(d).scale_re(1.0 / d as f64),
            ),
        }
    }

    /// Pure state `|psi><psi|` from an amplitude vector, normalized here.
    pub fn pure(space: HilbertSpace, amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::config("amplitude vector length mismatch"));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 {
            return Err(Error::config("zero state vector"));
        }
        let d = amplitudes.len();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = amplitudes[i] * amplitudes[j].conj() / (norm * norm);
            }
        }
        Ok(Self {
            op: HermitianObservable::from_symmetrized(space, m),
        })
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(space: HilbertSpace, probs: &[f64]) -> Result<Self> {
        if probs.len() != space.total_dim() {
            return Err(Error::config("diagonal length mismatch"));
        }
        Self::new(space, ComplexMatrix::diag(probs))
    }

    pub(crate) fn from_trusted(op: HermitianObservable) -> Self {
        Self { op }
    }

    pub fn space(&self) -> &HilbertSpace {
        self.op.space()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn as_observable(&self) -> &HermitianObservable {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn eig(&self) -> Result<EigDecomposition> {
        self.op.eig()
    }

    /// Expectation value `Tr[L rho]`.
    pub fn expectation(&self, observable: &HermitianObservable) -> Result<f64> {
        self.op.trace_with(observable)
    }

    /// Convex mixture of states on a common space. Weights must be
    /// nonnegative and sum to 1 within tolerance.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::config("empty mixture"));
        }
        let space = parts[0].1.space().clone();
        let d = space.total_dim();
        let mut m = ComplexMatrix::zeros(d, d);
        let mut total = 0.0;
        for (w, rho) in parts {
            if *rho.space() != space {
                return Err(Error::config("mixture components on different spaces"));
            }
            total += w;
            m = m.add(&rho.matrix().scale_re(*w));
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::config(format!("mixture weights sum to {}", total)));
        }
        Ok(Self {
            op: HermitianObservable::from_symmetrized(space, m),
        })
    }
}

/// Positive operator-valued measure: labeled PSD elements summing to I.
#[derive(Debug, Clone)]
pub struct Povm {
    space: HilbertSpace,
    elements: Vec<(String, HermitianObservable)>,
}

impl Povm {
    pub fn new(space: HilbertSpace, elements: Vec<(String, HermitianObservable)>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::config("POVM needs at least one element"));
        }
        let d = space.total_dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (label, e) in &elements {
            if *e.space() != space {
                return Err(Error::config(format!(
                    "POVM element '{}' lives on the wrong space",
                    label
                )));
            }
            let eig = e.eig()?;
            let min = eig
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min < -PSD_TOL {
                return Err(Error::config(format!(
                    "POVM element '{}' has eigenvalue {:.3e}",
                    label, min
                )));
            }
            sum = sum.add(e.matrix());
        }
        let defect = sum.sub(&ComplexMatrix::identity(d)).max_abs();
        if defect > COMPLETENESS_TOL {
            return Err(Error::config(format!(
                "POVM completeness defect {:.3e} exceeds {:.1e}",
                defect, COMPLETENESS_TOL
            )));
        }
        Ok(Self { space, elements })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn elements(&self) -> &[(String, HermitianObservable)] {
        &self.elements
    }

    pub fn outcome_labels(&self) -> Vec<&str> {
        self.elements.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn element(&self, label: &str) -> Option<&HermitianObservable> {
        self.elements
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, e)| e)
    }
}

/// Completely positive trace-preserving map given by Kraus operators.
#[derive(Debug, Clone)]
pub struct CptpChannel {
    input: HilbertSpace,
    output: HilbertSpace,
    kraus: Vec<ComplexMatrix>,
}

impl CptpChannel {
    pub fn new(
        input: HilbertSpace,
        output: HilbertSpace,
        kraus: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::config("channel needs at least one Kraus operator"));
        }
        let din = input.total_dim();
        let dout = output.total_dim();
        let mut sum = ComplexMatrix::zeros(din, din);
        for (i, k) in kraus.iter().enumerate() {
            if k.rows != dout || k.cols != din {
                return Err(Error::config(format!(
                    "Kraus operator {} is {}x{}, expected {}x{}",
                    i, k.rows, k.cols, dout, din
                )));
            }
            if !k.is_finite() {
                return Err(Error::config("non-finite Kraus entries"));
            }
            sum = sum.add(&k.dagger().mul(k));
        }
        let defect = sum.sub(&ComplexMatrix::identity(din)).max_abs();
        if defect > COMPLETENESS_TOL {
            return Err(Error::config(format!(
                "channel trace-preservation defect {:.3e} exceeds {:.1e}",
                defect, COMPLETENESS_TOL
            )));
        }
        Ok(Self {
            input,
            output,
            kraus,
        })
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.total_dim();
        Self {
            input: space.clone(),
            output: space,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    /// Identity map with relabeled output factors.
    pub fn relabeling(input: HilbertSpace, output: HilbertSpace) -> Result<Self> {
        if input.total_dim() != output.total_dim() {
            return Err(Error::config("relabeling requires equal dimensions"));
        }
        let d = input.total_dim();
        Ok(Self {
            input,
            output,
            kraus: vec![ComplexMatrix::identity(d)],
        })
    }

    pub fn input_space(&self) -> &HilbertSpace {
        &self.input
    }

    pub fn output_space(&self) -> &HilbertSpace {
        &self.output
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Apply to a state living exactly on the input space.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.space() != &self.input {
            return Err(Error::config("state is not on the channel input space"));
        }
        let dout = self.output.total_dim();
        let mut out = ComplexMatrix::zeros(dout, dout);
        for k in &self.kraus {
            out = out.add(&k.mul(rho.matrix()).mul(&k.dagger()));
        }
        Ok(DensityOperator::from_trusted(
            HermitianObservable::from_symmetrized(self.output.clone(), out),
        ))
    }
}

/// Wire format shared by the operator wrappers: matrix fields plus a
/// `space` array of labeled factors.
#[derive(Serialize, Deserialize)]
pub struct OperatorWire {
    pub space: Vec<Factor>,
    #[serde(flatten)]
    pub matrix: ComplexMatrix,
}

impl OperatorWire {
    pub fn into_observable(self) -> Result<HermitianObservable> {
        HermitianObservable::new(HilbertSpace::from_factors(self.space)?, self.matrix)
    }

    pub fn into_density(self) -> Result<DensityOperator> {
        DensityOperator::new(HilbertSpace::from_factors(self.space)?, self.matrix)
    }

    pub fn from_observable(op: &HermitianObservable) -> Self {
        Self {
            space: op.space().factors().to_vec(),
            matrix: op.matrix().clone(),
        }
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        Self::from_observable(rho.as_observable())
    }
}
