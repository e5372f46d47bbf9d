//! Dense complex matrices in row-major layout.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::config("matrix must have at least one row"));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::config("ragged rows in matrix literal"));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Real diagonal matrix.
    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product, `self` on the slower index.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self[(i1, j1)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out[(i1 * other.rows + i2, j1 * other.cols + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// Largest absolute entry; cheap matrix-size-independent defect gauge.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermiticity defect `max |M - M^dag|` (square matrices).
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M^dag) / 2`.
    pub fn symmetrize(&self) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `Tr[self * other]` without materialising the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Solve `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> crate::error::Result<Self> {
        use crate::error::Error;
        if !self.is_square() || self.rows != rhs.rows {
            return Err(Error::Domain("solve needs a square system".into()));
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut x = rhs.clone();
        for col in 0..n {
            let mut pivot = col;
            let mut best = lu[(col, col)].norm();
            for r in col + 1..n {
                let cand = lu[(r, col)].norm();
                if cand > best {
                    best = cand;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Err(Error::Numerical("singular matrix in solve".into()));
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(pivot, j)];
                    lu[(pivot, j)] = tmp;
                }
                for j in 0..x.cols {
                    let tmp = x[(col, j)];
                    x[(col, j)] = x[(pivot, j)];
                    x[(pivot, j)] = tmp;
                }
            }
            let diag = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / diag;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let sub = factor * lu[(col, j)];
                    lu[(r, j)] -= sub;
                }
                for j in 0..x.cols {
                    let sub = factor * x[(col, j)];
                    x[(r, j)] -= sub;
                }
            }
        }
        for col in (0..n).rev() {
            let diag = lu[(col, col)];
            for j in 0..x.cols {
                let mut acc = x[(col, j)];
                for k in col + 1..n {
                    acc -= lu[(col, k)] * x[(k, j)];
                }
                x[(col, j)] = acc / diag;
            }
        }
        Ok(x)
    }

    /// Matrix exponential by [6/6] Pade approximation with scaling and
    /// squaring.
    pub fn expm(&self) -> crate::error::Result<Self> {
        use crate::error::Error;
        if !self.is_square() {
            return Err(Error::Domain("expm needs a square matrix".into()));
        }
        if !self.is_finite() {
            return Err(Error::Numerical("non-finite entries in expm".into()));
        }
        let n = self.rows;
        // Max row sum (infinity norm).
        let mut norm: f64 = 0.0;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| self[(i, j)].norm()).sum();
            norm = norm.max(row);
        }
        let squarings = if norm > 0.5 {
            ((norm / 0.5).log2().ceil() as i32).max(0)
        } else {
            0
        };
        let scaled = self.scale_re(0.5f64.powi(squarings));

        const COEFF: [f64; 7] = [
            1.0,
            0.5,
            5.0 / 44.0,
            1.0 / 66.0,
            1.0 / 792.0,
            1.0 / 15840.0,
            1.0 / 665280.0,
        ];
        let mut power = Self::identity(n);
        let mut numer = Self::identity(n).scale_re(COEFF[0]);
        let mut denom = Self::identity(n).scale_re(COEFF[0]);
        for (j, &c) in COEFF.iter().enumerate().skip(1) {
            power = power.mul(&scaled);
            numer = numer.add(&power.scale_re(c));
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            denom = denom.add(&power.scale_re(sign * c));
        }
        let mut result = denom.solve(&numer)?;
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        Ok(result)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.data.len() != wire.rows * wire.cols {
            return Err(D::Error::custom(format!(
                "matrix data length {} does not match {}x{}",
                wire.data.len(),
                wire.rows,
                wire.cols
            )));
        }
        Ok(ComplexMatrix {
            rows: wire.rows,
            cols: wire.cols,
            data: wire
                .data
                .into_iter()
                .map(|[re, im]| C64::new(re, im))
                .collect(),
        })
    }
}
