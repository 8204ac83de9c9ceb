use num_traits::Zero;

use crate::error::{GeomError, Result};
use crate::linalg::Matrix;
use crate::scalar::{Mode, Rational, Scalar};

/// Relative determinant threshold used for nondegeneracy in float mode:
/// `|det| > FLOAT_DET_THRESHOLD * (max |entry|)^n`.
pub const FLOAT_DET_THRESHOLD: f64 = 1e-12;

/// Constant symmetric nondegenerate matrix (a flat metric `η` or normal Gram `μ`).
///
/// Entries are exact; construction rejects asymmetric and exactly singular input.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMatrix {
    entries: Matrix<Rational>,
}

impl MetricMatrix {
    pub fn new(entries: Matrix<Rational>) -> Result<Self> {
        if !entries.is_square() {
            return Err(GeomError::DimensionMismatch {
                context: "metric matrix",
                expected: entries.rows(),
                found: entries.cols(),
            });
        }
        if !entries.is_symmetric() {
            return Err(GeomError::NotSymmetric {
                what: "metric matrix".into(),
            });
        }
        if entries.determinant()?.is_zero() {
            return Err(GeomError::Degenerate {
                what: "metric matrix".into(),
                detail: "determinant is exactly zero".into(),
            });
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: Matrix::identity(n),
        }
    }

    /// Antidiagonal permutation matrix (ones on `i + j = n - 1`).
    pub fn antidiagonal(n: usize) -> Self {
        Self {
            entries: Matrix::from_fn(n, n, |i, j| {
                if i + j + 1 == n {
                    Rational::from_i64(1)
                } else {
                    Rational::zero()
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn matrix(&self) -> &Matrix<Rational> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[(i, j)]
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.entries.to_f64()
    }

    /// Matrix in the requested scalar field.
    pub fn to_scalar<S: Scalar>(&self) -> Matrix<S> {
        self.entries.map(S::from_rational)
    }

    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        if c.is_zero() {
            return Err(GeomError::ZeroScale);
        }
        Ok(Self {
            entries: self.entries.scale(c),
        })
    }

    /// Nondegeneracy test for the given mode: exact `det ≠ 0` for rationals,
    /// the relative threshold [`FLOAT_DET_THRESHOLD`] for floats.
    pub fn check_nondegenerate(&self, mode: Mode) -> Result<()> {
        match mode {
            Mode::Rational => Ok(()),
            Mode::Float => {
                let m = self.to_f64();
                let det = m.determinant()?;
                let scale = m.max_abs().powi(self.dim() as i32);
                if det.abs() > FLOAT_DET_THRESHOLD * scale {
                    Ok(())
                } else {
                    Err(GeomError::Degenerate {
                        what: "metric matrix".into(),
                        detail: format!("|det| = {:.3e} below {:.1e}·{:.3e}", det.abs(), FLOAT_DET_THRESHOLD, scale),
                    })
                }
            }
        }
    }

    /// `(positive, negative)` counts of the signature.
    pub fn signature(&self) -> (usize, usize) {
        let (p, n, _) = self
            .entries
            .inertia()
            .expect("metric matrices are symmetric by construction");
        (p, n)
    }
}

/// Exact inverse `η_{ij} ↔ η^{ij}` of a nondegenerate metric.
pub fn invert_metric(m: &MetricMatrix) -> Result<MetricMatrix> {
    let inv = m.entries.inverse().map_err(|_| GeomError::Degenerate {
        what: "metric matrix".into(),
        detail: "inversion hit a zero pivot".into(),
    })?;
    Ok(MetricMatrix { entries: inv })
}

/// Float-mode inverse by partially pivoted Gauss-Jordan elimination.
pub fn invert_metric_f64(m: &MetricMatrix) -> Result<Matrix<f64>> {
    m.check_nondegenerate(Mode::Float)?;
    m.to_f64().inverse()
}
