//! Atomic representing measures from truncated moment data.
//!
//! A Cholesky factor of the Hankel matrix gives the three-term recurrence of
//! the orthonormal polynomials of `L`; the eigen-decomposition of the
//! resulting Jacobi matrix is the Gauss rule (nodes = eigenvalues, weights =
//! `s_0` times squared first eigenvector components).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::function::{FunctionError, FunctionSpec};
use crate::linalg::{tridiagonal_ql, QlNonConvergence};
use crate::moments::{hamburger_check, MomentSequence, PsdVerdict, DEFAULT_PSD_TOL};

/// Cholesky pivots below `RANK_TOL * largest pivot` count as zero.
pub const RANK_TOL: f64 = 1e-10;
pub const DEFAULT_MOMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("Hankel matrix is numerically rank {0}: the measure has fewer atoms than requested")]
    RankDeficient(usize),
    #[error("not a moment sequence (lambda_min = {min_eigenvalue:e})")]
    NotAMomentSequence { min_eigenvalue: f64, verdict: PsdVerdict },
    #[error("need at least s0 and s1 to build a Jacobi matrix")]
    TooFewMoments,
    #[error(transparent)]
    Eigen(#[from] QlNonConvergence),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error("atom {index}: {reason}")]
    InvalidAtom { index: usize, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub node: f64,
    pub weight: f64,
}

/// Finitely many atoms with positive weights at strictly increasing nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    atoms: Vec<Atom>,
}

impl TryFrom<RawMeasure> for AtomicMeasure {
    type Error = MeasureError;
    fn try_from(raw: RawMeasure) -> Result<Self, MeasureError> {
        AtomicMeasure::new(raw.atoms)
    }
}

impl From<AtomicMeasure> for RawMeasure {
    fn from(m: AtomicMeasure) -> Self {
        RawMeasure { atoms: m.atoms }
    }
}

impl AtomicMeasure {
    /// Sorts atoms by node; rejects non-positive weights and repeated nodes.
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self, MeasureError> {
        for (index, a) in atoms.iter().enumerate() {
            if !a.node.is_finite() || !a.weight.is_finite() {
                return Err(MeasureError::InvalidAtom {
                    index,
                    reason: "non-finite node or weight",
                });
            }
            if a.weight <= 0.0 {
                return Err(MeasureError::InvalidAtom {
                    index,
                    reason: "weight must be positive",
                });
            }
        }
        atoms.sort_by(|a, b| a.node.total_cmp(&b.node));
        if let Some(index) = atoms.windows(2).position(|w| w[0].node == w[1].node) {
            return Err(MeasureError::InvalidAtom {
                index: index + 1,
                reason: "repeated node",
            });
        }
        Ok(AtomicMeasure { atoms })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self, MeasureError> {
        Self::new(
            pairs
                .iter()
                .map(|&(node, weight)| Atom { node, weight })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.node).collect()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// `sum w_i x_i^k`.
    pub fn moment(&self, k: usize) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.node.powi(k as i32))
            .sum()
    }

    /// `sum w |x|^k`.
    pub fn abs_moment(&self, k: usize) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.node.abs().powi(k as i32))
            .sum()
    }

    pub fn moments(&self, m: usize) -> Result<MomentSequence, crate::moments::MomentError> {
        let pairs: Vec<(f64, f64)> = self.atoms.iter().map(|a| (a.node, a.weight)).collect();
        MomentSequence::from_atoms(&pairs, m)
    }
}

/// Symmetric tridiagonal recurrence matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiMatrix {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl JacobiMatrix {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Leading `r x r` block.
    pub fn leading_block(&self, r: usize) -> JacobiMatrix {
        JacobiMatrix {
            diag: self.diag[..r].to_vec(),
            offdiag: self.offdiag[..r.saturating_sub(1)].to_vec(),
        }
    }
}

/// Result of a rank-aware recurrence computation.
#[derive(Debug, Clone, PartialEq)]
struct Recurrence {
    jacobi: JacobiMatrix,
    /// `Some(r)` if the factorization stopped at rank `r` before reaching
    /// the requested size.
    deficient_rank: Option<usize>,
}

/// Factors `H = R^T R` on the `n x (n+1)` rectangular Hankel block
/// `H[i][j] = s_{i+j}` (`i < n`, `j <= n`), which needs `s_0..s_{2n-1}`.
fn recurrence(s: &MomentSequence) -> Result<Recurrence, MeasureError> {
    let v = s.as_slice();
    if v.len() < 2 {
        return Err(MeasureError::TooFewMoments);
    }
    let n = v.len() / 2;
    let cols = n + 1;
    let mut r = vec![vec![0.0; cols]; n];
    let mut max_pivot = 0.0f64;
    let mut rank = n;

    for i in 0..n {
        let mut pivot = v[2 * i];
        for k in 0..i {
            pivot -= r[k][i] * r[k][i];
        }
        max_pivot = max_pivot.max(pivot);
        if pivot <= RANK_TOL * max_pivot {
            rank = i;
            break;
        }
        let rii = pivot.sqrt();
        r[i][i] = rii;
        for j in (i + 1)..cols {
            let mut acc = v[i + j];
            for k in 0..i {
                acc -= r[k][i] * r[k][j];
            }
            r[i][j] = acc / rii;
        }
    }

    let diag = (0..rank)
        .map(|k| {
            let a = r[k][k + 1] / r[k][k];
            if k == 0 {
                a
            } else {
                a - r[k - 1][k] / r[k - 1][k - 1]
            }
        })
        .collect();
    let offdiag = (1..rank).map(|k| r[k][k] / r[k - 1][k - 1]).collect();
    Ok(Recurrence {
        jacobi: JacobiMatrix { diag, offdiag },
        deficient_rank: (rank < n).then_some(rank),
    })
}

/// Jacobi matrix of size `floor((m+1)/2)` from `s_0..s_m`.
pub fn jacobi_from_moments(s: &MomentSequence) -> Result<JacobiMatrix, MeasureError> {
    let rec = recurrence(s)?;
    match rec.deficient_rank {
        Some(r) => Err(MeasureError::RankDeficient(r)),
        None => Ok(rec.jacobi),
    }
}

/// Gauss rule of a Jacobi matrix, scaled to total mass `mass`.
///
/// Eigenvalues from QL are refined by a few guarded Newton steps on the
/// recurrence polynomial; weights then come from the Christoffel function
/// `w_i = 1 / sum_k p_k(x_i)^2` of the orthonormal recurrence.
pub fn gauss_rule(jacobi: &JacobiMatrix, mass: f64) -> Result<AtomicMeasure, MeasureError> {
    let (nodes, first) = tridiagonal_ql(&jacobi.diag, &jacobi.offdiag)?;
    let mut atoms: Vec<Atom> = nodes
        .into_iter()
        .zip(first)
        .map(|(node, z)| Atom {
            node,
            weight: mass * z * z,
        })
        .collect();
    atoms.sort_by(|a, b| a.node.total_cmp(&b.node));
    polish(jacobi, mass, &mut atoms);
    // Coalesce numerically identical nodes; drop atoms whose weight vanished.
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if last.node == a.node => last.weight += a.weight,
            _ => merged.push(a),
        }
    }
    merged.retain(|a| a.weight > 0.0);
    AtomicMeasure::new(merged)
}

/// Orthonormal values `p_0..p_{n-1}` at `x`, and the monic-scaled
/// characteristic value `q_n(x)` with its derivative.
fn recurrence_eval(jacobi: &JacobiMatrix, mass: f64, x: f64) -> (f64, f64, f64) {
    let n = jacobi.size();
    let (mut p_prev, mut p) = (0.0, 1.0 / mass.sqrt());
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut christoffel = p * p;
    for k in 0..n {
        let beta_k = if k == 0 { 0.0 } else { jacobi.offdiag[k - 1] };
        let q = (x - jacobi.diag[k]) * p - beta_k * p_prev;
        let dq = p + (x - jacobi.diag[k]) * d - beta_k * d_prev;
        if k + 1 == n {
            return (christoffel, q, dq);
        }
        let beta_next = jacobi.offdiag[k];
        p_prev = p;
        d_prev = d;
        p = q / beta_next;
        d = dq / beta_next;
        christoffel += p * p;
    }
    (christoffel, 0.0, 1.0)
}

fn polish(jacobi: &JacobiMatrix, mass: f64, atoms: &mut [Atom]) {
    let n = atoms.len();
    let nodes: Vec<f64> = atoms.iter().map(|a| a.node).collect();
    for i in 0..n {
        let gap = [i.checked_sub(1).map(|j| nodes[i] - nodes[j]), nodes.get(i + 1).map(|x| x - nodes[i])]
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min);
        let limit = 1e-6 * gap.min(1.0 + nodes[i].abs());
        let mut x = nodes[i];
        for _ in 0..3 {
            let (_, q, dq) = recurrence_eval(jacobi, mass, x);
            if dq == 0.0 || !q.is_finite() || !dq.is_finite() {
                break;
            }
            let step = q / dq;
            if !(step.abs() <= limit) || (x - step - nodes[i]).abs() > limit {
                break;
            }
            x -= step;
            if step == 0.0 {
                break;
            }
        }
        let (christoffel, _, _) = recurrence_eval(jacobi, mass, x);
        if christoffel.is_finite() && christoffel > 0.0 {
            atoms[i] = Atom {
                node: x,
                weight: 1.0 / christoffel,
            };
        }
    }
}

/// Gauss-quadrature measure reproducing `s`. Rank-deficient data yield the
/// smaller atomic measure of the detected rank.
pub fn recover_measure(s: &MomentSequence) -> Result<AtomicMeasure, MeasureError> {
    recover_measure_with_tol(s, DEFAULT_PSD_TOL)
}

pub fn recover_measure_with_tol(s: &MomentSequence, tol: f64) -> Result<AtomicMeasure, MeasureError> {
    let verdict = hamburger_check(s, tol);
    if !verdict.is_psd {
        return Err(MeasureError::NotAMomentSequence {
            min_eigenvalue: verdict.min_eigenvalue,
            verdict,
        });
    }
    if s.last_index() == 0 {
        // Only the mass is known: a single atom at the origin reproduces it.
        return AtomicMeasure::from_pairs(&[(0.0, s.mass())]);
    }
    let rec = recurrence(s)?;
    gauss_rule(&rec.jacobi, s.mass())
}

/// `sum w_i g(x_i)`.
pub fn integrate(mu: &AtomicMeasure, g: &FunctionSpec) -> Result<f64, MeasureError> {
    let mut acc = 0.0;
    for a in mu.atoms() {
        acc += a.weight * g.eval(a.node)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub k: usize,
    pub expected: f64,
    pub actual: f64,
    pub abs_error: f64,
    /// `max(1, |s_k|, sum w |x|^k)`; the error is judged relative to it.
    pub scale: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub tol: f64,
    pub checks: Vec<MomentCheck>,
    pub all_pass: bool,
}

impl MomentReport {
    pub fn check(&self, k: usize) -> Option<&MomentCheck> {
        self.checks.iter().find(|c| c.k == k)
    }
}

/// Per-moment comparison of `mu` against `s` for `k = 0..=k_max`
/// (clamped to the available moments).
pub fn verify_moments(mu: &AtomicMeasure, s: &MomentSequence, k_max: usize, tol: f64) -> MomentReport {
    let k_max = k_max.min(s.last_index());
    let checks: Vec<MomentCheck> = (0..=k_max)
        .map(|k| {
            let expected = s.as_slice()[k];
            let actual = mu.moment(k);
            let abs_error = (actual - expected).abs();
            let scale = 1f64.max(expected.abs()).max(mu.abs_moment(k));
            MomentCheck {
                k,
                expected,
                actual,
                abs_error,
                scale,
                pass: abs_error <= tol * scale,
            }
        })
        .collect();
    let all_pass = checks.iter().all(|c| c.pass);
    MomentReport {
        tol,
        checks,
        all_pass,
    }
}
