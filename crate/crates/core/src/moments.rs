//! Moment sequences, their Hankel matrices, and the Hamburger positivity test.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{symmetric_eigen, SquareMatrix};
use crate::poly::Polynomial;

/// Default relative tolerance for the PSD decision.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("moment sequence is empty")]
    Empty,
    #[error("s0 must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("moment s{index} is not finite")]
    NonFinite { index: usize },
    #[error("Hankel order {order} needs moments up to s{needed}, have up to s{available}")]
    InsufficientMoments {
        order: usize,
        needed: usize,
        available: usize,
    },
    #[error("polynomial degree {degree} exceeds last moment index {available}")]
    DegreeTooHigh { degree: usize, available: usize },
}

/// Candidate truncated moment data `s_0, ..., s_m` with `s_0 > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMoments", into = "RawMoments")]
pub struct MomentSequence {
    moments: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMoments {
    moments: Vec<f64>,
}

impl TryFrom<RawMoments> for MomentSequence {
    type Error = MomentError;
    fn try_from(raw: RawMoments) -> Result<Self, MomentError> {
        MomentSequence::new(raw.moments)
    }
}

impl From<MomentSequence> for RawMoments {
    fn from(s: MomentSequence) -> Self {
        RawMoments { moments: s.moments }
    }
}

impl MomentSequence {
    pub fn new(moments: Vec<f64>) -> Result<Self, MomentError> {
        if moments.is_empty() {
            return Err(MomentError::Empty);
        }
        if let Some(index) = moments.iter().position(|s| !s.is_finite()) {
            return Err(MomentError::NonFinite { index });
        }
        if moments[0] <= 0.0 {
            return Err(MomentError::NonPositiveMass(moments[0]));
        }
        Ok(MomentSequence { moments })
    }

    /// Moments `s_0..=s_m` of the atomic measure `sum w_i delta_{x_i}`.
    pub fn from_atoms(atoms: &[(f64, f64)], m: usize) -> Result<Self, MomentError> {
        let mut moments = vec![0.0; m + 1];
        for &(x, w) in atoms {
            let mut pow = w;
            for s in moments.iter_mut() {
                *s += pow;
                pow *= x;
            }
        }
        Self::new(moments)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.moments
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.moments.get(k).copied()
    }

    /// Index of the last moment, `m`.
    pub fn last_index(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn mass(&self) -> f64 {
        self.moments[0]
    }

    /// The first `len` moments.
    pub fn truncated(&self, len: usize) -> Result<Self, MomentError> {
        Self::new(self.moments[..len.min(self.moments.len())].to_vec())
    }
}

/// Hankel matrix `H[i][j] = s_{i+j}`, `0 <= i, j <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    matrix: SquareMatrix,
}

impl HankelMatrix {
    /// Number of rows, `N + 1`.
    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix.rows()
    }

    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        self.matrix.quadratic_form(c)
    }
}

impl From<SquareMatrix> for HankelMatrix {
    /// Wraps an arbitrary symmetric matrix so it can go through `psd_check`.
    fn from(matrix: SquareMatrix) -> Self {
        HankelMatrix { matrix }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Unit eigenvector of the smallest eigenvalue; present only on failure,
    /// in which case `c^T H c < 0`.
    pub witness: Option<Vec<f64>>,
}

/// `(N+1) x (N+1)` Hankel matrix of `s`. Needs `2N <= m`.
pub fn build_hankel(s: &MomentSequence, n: usize) -> Result<HankelMatrix, MomentError> {
    let m = s.last_index();
    if 2 * n > m {
        return Err(MomentError::InsufficientMoments {
            order: n + 1,
            needed: 2 * n,
            available: m,
        });
    }
    let v = s.as_slice();
    Ok(HankelMatrix {
        matrix: SquareMatrix::from_fn(n + 1, |i, j| v[i + j]),
    })
}

/// PSD iff `lambda_min >= -tol * max(1, lambda_max)`.
pub fn psd_check(h: &HankelMatrix, tol: f64) -> PsdVerdict {
    let eig = symmetric_eigen(h.matrix());
    let min_eigenvalue = eig.values[0];
    let max_eigenvalue = *eig.values.last().expect("non-empty matrix");
    let is_psd = min_eigenvalue >= -tol * max_eigenvalue.max(1.0);
    let witness = if is_psd {
        None
    } else {
        Some(eig.vectors[0].clone())
    };
    PsdVerdict {
        is_psd,
        min_eigenvalue,
        max_eigenvalue,
        witness,
    }
}

/// Hamburger test on the largest square Hankel matrix the data admits,
/// `N = floor(m / 2)`.
pub fn hamburger_check(s: &MomentSequence, tol: f64) -> PsdVerdict {
    let h = build_hankel(s, s.last_index() / 2).expect("N = floor(m/2) always fits");
    psd_check(&h, tol)
}

/// `L(f) = sum_j c_j s_j`.
pub fn functional_apply(s: &MomentSequence, f: &Polynomial) -> Result<f64, MomentError> {
    let Some(degree) = f.degree() else {
        return Ok(0.0);
    };
    if degree > s.last_index() {
        return Err(MomentError::DegreeTooHigh {
            degree,
            available: s.last_index(),
        });
    }
    Ok(f.coeffs().iter().zip(s.as_slice()).map(|(c, m)| c * m).sum())
}
