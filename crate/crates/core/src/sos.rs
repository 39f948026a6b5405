//! Two-square certificates for univariate polynomials that are nonnegative
//! on the real line, or a point where the polynomial is negative.
//!
//! The construction factors `f = lead * w * conj(w)` where `w` collects one
//! root from every conjugate pair and half of every (even) real-root cluster.
//! Then `p = sqrt(lead) Re w` and `q = sqrt(lead) Im w` satisfy `f = p^2 + q^2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{mul_linear, PolyError, Polynomial};

pub const DEFAULT_SOS_TOL: f64 = 1e-7;
/// Real roots closer than `CLUSTER_GAP * (1 + |r|)` belong to one cluster.
pub const CLUSTER_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SosError {
    #[error("the zero polynomial has no certificate")]
    ZeroPolynomial,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("no negativity witness found and best certificate residual {residual:e} exceeds {tol:e}")]
    Inconclusive { residual: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosCertificate {
    pub p: Polynomial,
    pub q: Polynomial,
    /// Relative max-norm coefficient error of `p^2 + q^2` against the input.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityWitness {
    pub x0: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SosOutcome {
    Certificate(SosCertificate),
    Witness(NegativityWitness),
}

impl SosOutcome {
    pub fn certificate(&self) -> Option<&SosCertificate> {
        match self {
            SosOutcome::Certificate(c) => Some(c),
            SosOutcome::Witness(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&NegativityWitness> {
        match self {
            SosOutcome::Witness(w) => Some(w),
            SosOutcome::Certificate(_) => None,
        }
    }
}

/// A run of (snapped) real roots that are numerically one root.
#[derive(Debug, Clone)]
struct RealCluster {
    center: f64,
    multiplicity: usize,
}

fn cluster_real_roots(sorted: &[f64]) -> Vec<RealCluster> {
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for &r in sorted {
        match clusters.last_mut() {
            Some(c) if r - c[c.len() - 1] <= CLUSTER_GAP * (1.0 + r.abs()) => c.push(r),
            _ => clusters.push(vec![r]),
        }
    }
    clusters
        .into_iter()
        .map(|c| RealCluster {
            center: c.iter().sum::<f64>() / c.len() as f64,
            multiplicity: c.len(),
        })
        .collect()
}

pub fn sos_decompose(f: &Polynomial) -> Result<SosOutcome, SosError> {
    sos_decompose_with_tol(f, DEFAULT_SOS_TOL)
}

pub fn sos_decompose_with_tol(f: &Polynomial, sos_tol: f64) -> Result<SosOutcome, SosError> {
    let Some(degree) = f.degree() else {
        return Err(SosError::ZeroPolynomial);
    };
    let lead = f.leading();
    if degree == 0 {
        return Ok(if lead > 0.0 {
            certificate_from_half(f, lead, &[])
        } else {
            SosOutcome::Witness(NegativityWitness { x0: 0.0, value: lead })
        });
    }

    let roots = f.roots()?;
    let clusters = cluster_real_roots(&roots.real_roots());
    let odd: Vec<f64> = clusters
        .iter()
        .filter(|c| c.multiplicity % 2 == 1)
        .map(|c| c.center)
        .collect();

    let suspicious = lead < 0.0 || degree % 2 == 1 || !odd.is_empty();
    if suspicious {
        if let Some(w) = find_witness(f, &odd, &clusters) {
            return Ok(SosOutcome::Witness(w));
        }
    }

    // Half of every real cluster goes into w. Clusters of odd size that
    // survived the witness search are numerically even: pair neighbours.
    let mut half: Vec<Complex64> = Vec::with_capacity(degree / 2);
    let mut leftovers = Vec::new();
    for c in &clusters {
        for _ in 0..c.multiplicity / 2 {
            half.push(Complex64::new(c.center, 0.0));
        }
        if c.multiplicity % 2 == 1 {
            leftovers.push(c.center);
        }
    }
    for pair in leftovers.chunks(2) {
        if let [a, b] = pair {
            half.push(Complex64::new(0.5 * (a + b), 0.0));
        }
    }
    // Deterministic choice: the upper-half-plane member of every pair.
    half.extend(roots.upper_roots());

    let outcome = if lead > 0.0 && leftovers.len() % 2 == 0 {
        certificate_from_half(f, lead, &half)
    } else {
        // Odd degree or negative leading term with no witness found.
        return Err(SosError::Inconclusive {
            residual: f64::INFINITY,
            tol: sos_tol,
        });
    };
    match &outcome {
        SosOutcome::Certificate(c) if c.residual > sos_tol => Err(SosError::Inconclusive {
            residual: c.residual,
            tol: sos_tol,
        }),
        _ => Ok(outcome),
    }
}

fn certificate_from_half(f: &Polynomial, lead: f64, half: &[Complex64]) -> SosOutcome {
    let mut w = vec![Complex64::new(1.0, 0.0)];
    for &z in half {
        w = mul_linear(&w, z);
    }
    let scale = lead.sqrt();
    let p = Polynomial::new(w.iter().map(|c| scale * c.re).collect());
    let q = Polynomial::new(w.iter().map(|c| scale * c.im).collect());
    let residual = certificate_residual(f, &p, &q);
    SosOutcome::Certificate(SosCertificate { p, q, residual })
}

fn certificate_residual(f: &Polynomial, p: &Polynomial, q: &Polynomial) -> f64 {
    let sum = &p.square() + &q.square();
    f.relative_distance(&sum)
}

/// Probes near odd-multiplicity real roots with geometrically growing
/// offsets, far out at `+-10^k`, at zero, at cluster centres and at their
/// midpoints. Among the negative probes, returns the one with the most
/// negative value relative to the coefficient scale at that point.
fn find_witness(f: &Polynomial, odd: &[f64], clusters: &[RealCluster]) -> Option<NegativityWitness> {
    let mut probes = vec![0.0];
    for &r in odd {
        let mut eps = 1e-8 * (1.0 + r.abs());
        while eps.is_finite() && eps < 1e300 {
            probes.push(r - eps);
            probes.push(r + eps);
            eps *= 2.0;
        }
    }
    let mut x = 1.0f64;
    while x.is_finite() && x < 1e300 {
        probes.push(-x);
        probes.push(x);
        x *= 10.0;
    }
    probes.extend(clusters.iter().map(|c| c.center));
    probes.extend(clusters.windows(2).map(|p| 0.5 * (p[0].center + p[1].center)));

    let scale = |x: f64| -> f64 {
        let ax = x.abs().max(1.0);
        f.coeffs().iter().rev().fold(0.0, |acc, c| acc * ax + c.abs())
    };
    probes
        .into_iter()
        .filter_map(|x| {
            let value = f.eval(x);
            let rel = value / scale(x);
            (value < 0.0 && rel.is_finite()).then_some((rel, NegativityWitness { x0: x, value }))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, w)| w)
}

/// True iff `p^2 + q^2` matches `f` to relative max-norm `tol`.
pub fn verify_certificate(f: &Polynomial, cert: &SosCertificate, tol: f64) -> bool {
    certificate_residual(f, &cert.p, &cert.q) <= tol
}
