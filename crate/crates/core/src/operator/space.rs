//! Labeled tensor factorizations of finite Hilbert spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::DIM_CAP;

/// One tensor factor: a label and its dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// An ordered list of labeled tensor factors.
///
/// The total dimension is the product of the factor dimensions and is
/// capped at [`DIM_CAP`] so that all dense kernels stay tractable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
    total_dim: usize,
}

impl HilbertSpace {
    pub fn new(factors: Vec<(impl Into<String>, usize)>) -> Result<Self> {
        Self::from_factors(
            factors
                .into_iter()
                .map(|(label, dim)| Factor {
                    label: label.into(),
                    dim,
                })
                .collect(),
        )
    }

    pub fn from_factors(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::config("a Hilbert space needs at least one factor"));
        }
        let mut total: usize = 1;
        for f in &factors {
            if f.dim == 0 {
                return Err(Error::config(format!("factor '{}' has dimension 0", f.label)));
            }
            total = total
                .checked_mul(f.dim)
                .ok_or_else(|| Error::config("total dimension overflow"))?;
        }
        if total > DIM_CAP {
            return Err(Error::config(format!(
                "total dimension {} exceeds the cap {}",
                total, DIM_CAP
            )));
        }
        for (i, f) in factors.iter().enumerate() {
            if factors[..i].iter().any(|g| g.label == f.label) {
                return Err(Error::config(format!("duplicate factor label '{}'", f.label)));
            }
        }
        Ok(Self {
            factors,
            total_dim: total,
        })
    }

    /// Single anonymousish factor, handy for tests and scalar embeddings.
    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new(vec![(label, dim)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.label == label)
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|f| f.label.as_str()).collect()
    }

    /// Concatenation `self (x) other`; labels must stay unique.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self::from_factors(factors)
    }

    /// Subspace formed by the named factors, in this space's order.
    pub fn subspace(&self, keep: &[&str]) -> Result<Self> {
        for label in keep {
            if !self.has_label(label) {
                return Err(Error::config(format!("unknown factor label '{}'", label)));
            }
        }
        let factors: Vec<Factor> = self
            .factors
            .iter()
            .filter(|f| keep.contains(&f.label.as_str()))
            .cloned()
            .collect();
        Self::from_factors(factors)
    }

    /// Row-major strides of the factor indices.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.factors.len()];
        for i in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.factors[i + 1].dim;
        }
        strides
    }

    /// Decompose a flat index into per-factor indices.
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.factors.len());
        for s in self.strides() {
            out.push(index / s);
            index %= s;
        }
        out
    }

    /// Flatten per-factor indices back into a flat index.
    pub fn ravel(&self, indices: &[usize]) -> usize {
        self.strides()
            .iter()
            .zip(indices.iter())
            .map(|(s, i)| s * i)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ravel_round_trip() {
        let sp = HilbertSpace::new(vec![("a", 2), ("b", 3), ("c", 2)]).unwrap();
        assert_eq!(sp.total_dim(), 12);
        for i in 0..12 {
            assert_eq!(sp.ravel(&sp.unravel(i)), i);
        }
    }

    #[test]
    fn rejects_duplicates_and_cap() {
        assert!(HilbertSpace::new(vec![("a", 2), ("a", 2)]).is_err());
        assert!(HilbertSpace::new(vec![("a", 300)]).is_err());
        assert!(HilbertSpace::new(vec![("a", 16), ("b", 16)]).is_ok());
        assert!(HilbertSpace::new(vec![("a", 16), ("b", 17)]).is_err());
    }
}
