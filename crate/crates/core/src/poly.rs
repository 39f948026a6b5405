//! Dense univariate polynomials over `f64` and simultaneous (Weierstrass /
//! Durand-Kerner) complex root finding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Leading coefficients with `|c_d| <= CANON_REL * max|c_j|` are stripped.
pub const CANON_REL: f64 = 1e-13;
/// Relative backward-error target for every returned root.
pub const ROOT_TOL: f64 = 1e-10;
/// Roots with `|Im z| <= REAL_SNAP_TOL * (1 + |Re z|)` are snapped to the real axis.
pub const REAL_SNAP_TOL: f64 = 1e-7;
pub const MAX_ROOT_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("root iteration did not reach residual {tol:e} within {iterations} iterations (worst residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },
    #[error("root finding needs degree >= 1")]
    ConstantPolynomial,
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
}

/// Real polynomial `c_0 + c_1 x + ... + c_d x^d`, always kept in canonical
/// form (no negligible leading coefficients; the zero polynomial is empty).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPolynomial", into = "RawPolynomial")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPolynomial {
    coeffs: Vec<f64>,
}

impl TryFrom<RawPolynomial> for Polynomial {
    type Error = PolyError;

    fn try_from(raw: RawPolynomial) -> Result<Self, Self::Error> {
        Polynomial::try_new(raw.coeffs)
    }
}

impl From<Polynomial> for RawPolynomial {
    fn from(p: Polynomial) -> Self {
        RawPolynomial { coeffs: p.coeffs }
    }
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients and canonicalizes it.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.canonicalize();
        p
    }

    pub fn try_new(coeffs: Vec<f64>) -> Result<Self, PolyError> {
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite { index });
        }
        Ok(Self::new(coeffs))
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Polynomial { coeffs }
    }

    /// `leading * prod (x - r)` for real roots `r`.
    pub fn from_real_roots(leading: f64, roots: &[f64]) -> Self {
        let mut coeffs = vec![leading];
        for &r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (j, &c) in coeffs.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= r * c;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    fn canonicalize(&mut self) {
        let scale = max_abs(&self.coeffs);
        if scale == 0.0 {
            self.coeffs.clear();
            return;
        }
        while let Some(&last) = self.coeffs.last() {
            if last.abs() <= CANON_REL * scale {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial (degree minus infinity).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Coefficient of `x^j` (zero beyond the degree).
    pub fn coeff(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    /// Max-norm of the coefficient vector.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * lambda).collect())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| j as f64 * c)
                .collect(),
        )
    }

    /// Max-norm coefficient distance relative to this polynomial's max-norm.
    pub fn relative_distance(&self, other: &Polynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let diff = (0..n)
            .map(|j| (self.coeff(j) - other.coeff(j)).abs())
            .fold(0.0, f64::max);
        let scale = self.max_norm();
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    /// All complex roots by Weierstrass (Durand-Kerner) simultaneous iteration.
    pub fn roots(&self) -> Result<ComplexRootSet, PolyError> {
        roots(self)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, c| m.max(c.abs()))
}

fn combine(a: &[f64], b: &[f64], sign: f64) -> Polynomial {
    let n = a.len().max(b.len());
    let coeffs = (0..n)
        .map(|j| a.get(j).copied().unwrap_or(0.0) + sign * b.get(j).copied().unwrap_or(0.0))
        .collect();
    Polynomial::new(coeffs)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        combine(&self.coeffs, &rhs.coeffs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        combine(&self.coeffs, &rhs.coeffs, -1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match j {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}x")?,
                _ => write!(f, "{a}x^{j}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Complex roots of a real polynomial, with conjugate pairs made exact and
/// near-real roots snapped onto the real axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRootSet {
    pub roots: Vec<Complex64>,
    pub leading: f64,
    /// Worst relative backward error `|f(z)| / sum |c_j| max(1,|z|)^j`.
    pub residual: f64,
}

impl ComplexRootSet {
    pub fn real_roots(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self
            .roots
            .iter()
            .filter(|z| z.im == 0.0)
            .map(|z| z.re)
            .collect();
        r.sort_by(f64::total_cmp);
        r
    }

    /// Roots in the open upper half plane.
    pub fn upper_roots(&self) -> Vec<Complex64> {
        self.roots.iter().copied().filter(|z| z.im > 0.0).collect()
    }

    /// Expands `leading * prod (x - z_i)`, discarding imaginary rounding.
    pub fn reconstruct(&self) -> Polynomial {
        let mut coeffs = vec![Complex64::new(self.leading, 0.0)];
        for &z in &self.roots {
            coeffs = mul_linear(&coeffs, z);
        }
        Polynomial::new(coeffs.into_iter().map(|c| c.re).collect())
    }
}

/// Multiplies a complex coefficient vector by `(x - z)`.
pub(crate) fn mul_linear(coeffs: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
    for (j, &c) in coeffs.iter().enumerate() {
        next[j + 1] += c;
        next[j] -= z * c;
    }
    next
}

fn backward_error(p: &Polynomial, z: Complex64) -> f64 {
    let r = z.norm().max(1.0);
    let mut scale = 0.0;
    let mut pow = 1.0;
    for c in p.coeffs() {
        scale += c.abs() * pow;
        pow *= r;
    }
    let v = p.eval_complex(z).norm();
    if scale == 0.0 {
        v
    } else {
        v / scale
    }
}

pub fn roots(p: &Polynomial) -> Result<ComplexRootSet, PolyError> {
    let degree = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(PolyError::ConstantPolynomial),
    };
    let leading = p.leading();
    let monic: Vec<f64> = p.coeffs().iter().map(|c| c / leading).collect();
    let monic_poly = Polynomial { coeffs: monic };

    let radius = 1.0 + monic_poly.coeffs[..degree].iter().fold(0.0, |m: f64, c| m.max(c.abs()));
    // Irrational offset breaks the symmetry of real-coefficient inputs.
    let offset = 0.4 + std::f64::consts::SQRT_2 / 10.0;
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / degree as f64 + offset;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..MAX_ROOT_ITERATIONS {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let zi = z[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                // coincident iterates; nudge apart
                z[i] += Complex64::new(1e-12 * (1.0 + zi.norm()), 1e-12 * (1.0 + zi.norm()));
                max_step = f64::INFINITY;
                continue;
            }
            let step = monic_poly.eval_complex(zi) / denom;
            if step.is_finite() {
                z[i] = zi - step;
                max_step = max_step.max(step.norm() / (1.0 + zi.norm()));
            }
        }
        if max_step <= 1e-15 {
            break;
        }
    }

    let residual = z
        .iter()
        .map(|&zi| backward_error(p, zi))
        .fold(0.0, f64::max);
    if !(residual <= ROOT_TOL) {
        return Err(PolyError::NonConvergence {
            iterations: MAX_ROOT_ITERATIONS,
            residual,
            tol: ROOT_TOL,
        });
    }

    let roots = symmetrize(z);
    let residual = roots
        .iter()
        .map(|&zi| backward_error(p, zi))
        .fold(0.0, f64::max);
    Ok(ComplexRootSet {
        roots,
        leading,
        residual,
    })
}

/// Snaps near-real roots to the axis and forces exact conjugate pairing of
/// the remaining ones by averaging matched partners.
fn symmetrize(z: Vec<Complex64>) -> Vec<Complex64> {
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for zi in z {
        if zi.im.abs() <= REAL_SNAP_TOL * (1.0 + zi.re.abs()) {
            real.push(Complex64::new(zi.re, 0.0));
        } else if zi.im > 0.0 {
            upper.push(zi);
        } else {
            lower.push(zi);
        }
    }
    // An unmatched excess on one side can only be a real root perturbed past
    // the snapping band; move the flattest ones to the axis.
    let by_flatness = |a: &Complex64, b: &Complex64| a.im.abs().total_cmp(&b.im.abs());
    upper.sort_by(by_flatness);
    lower.sort_by(by_flatness);
    while upper.len() > lower.len() {
        let zi = upper.remove(0);
        real.push(Complex64::new(zi.re, 0.0));
    }
    while lower.len() > upper.len() {
        let zi = lower.remove(0);
        real.push(Complex64::new(zi.re, 0.0));
    }

    let mut out = real;
    let mut remaining = lower;
    for u in upper {
        let (best, _) = remaining
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (w.conj() - u).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("pairing sides have equal length");
        let w = remaining.swap_remove(best);
        let re = 0.5 * (u.re + w.re);
        let im = 0.5 * (u.im - w.im);
        out.push(Complex64::new(re, im));
        out.push(Complex64::new(re, -im));
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}
