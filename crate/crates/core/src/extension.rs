//! One-step positive extension of a moment functional `L` to a bounded
//! continuous function `g`.
//!
//! The admissible values for `L(g)` lie between the best polynomial minorant
//! value `sup { L(f1) : f1 <= g }` and the best majorant value
//! `inf { L(f2) : g <= f2 }`. Both are computed as linear programs over the
//! coefficients of degree-bounded polynomials, with the pointwise constraints
//! imposed on a grid of the working interval.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::function::{Builtin, FunctionError, FunctionSpec};
use crate::lp::{lp_solve, LinearProgram, LpError, LpOutcome, Relation, Sense, DEFAULT_LP_TOL};
use crate::measure::{integrate, recover_measure_with_tol, AtomicMeasure, MeasureError};
use crate::moments::{functional_apply, hamburger_check, MomentError, MomentSequence, DEFAULT_PSD_TOL};
use crate::poly::Polynomial;

/// Multiplier in the coefficient box `|c_j| <= COEFF_CAP_FACTOR * (1 + max |g|)`.
pub const COEFF_CAP_FACTOR: f64 = 1e3;
/// Refinement factor of the a-posteriori off-grid validity report.
const FINE_GRID_FACTOR: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtendError {
    #[error("grid of {points} points cannot constrain a degree-{degree} polynomial")]
    GridTooCoarse { points: usize, degree: usize },
    #[error("grid point {0} lies outside the function's domain")]
    GridOutsideDomain(f64),
    #[error("sandwich is empty: lower {lower} exceeds upper {upper} by more than {lp_tol:e}")]
    SandwichEmpty { lower: f64, upper: f64, lp_tol: f64 },
    #[error("not a moment sequence (lambda_min = {0:e})")]
    NotAMomentSequence(f64),
    #[error("representing atom at {node} lies outside the domain [{lo}, {hi}]")]
    AtomOutsideDomain { node: f64, lo: f64, hi: f64 },
    #[error("{side} LP ended {status}")]
    LpStatus { side: Side, status: &'static str },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minorant,
    Majorant,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Minorant => "minorant",
            Side::Majorant => "majorant",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pick {
    #[default]
    Midpoint,
    Lower,
    Upper,
}

impl FromStr for Pick {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "midpoint" => Ok(Pick::Midpoint),
            "lower" => Ok(Pick::Lower),
            "upper" => Ok(Pick::Upper),
            other => Err(format!("unknown pick policy '{other}' (midpoint|lower|upper)")),
        }
    }
}

/// `|g(x)| <= (a(x)^2 + 1) / 2` at `probe_count` uniform points of the
/// domain (endpoints included) and at every sample knot.
pub fn envelope_check(g: &FunctionSpec, a: &Polynomial, probe_count: usize) -> Result<bool, FunctionError> {
    Ok(envelope_slack(g, a, probe_count)? >= 0.0)
}

/// Smallest `(a^2 + 1)/2 - |g|` over the probes.
pub fn envelope_slack(g: &FunctionSpec, a: &Polynomial, probe_count: usize) -> Result<f64, FunctionError> {
    let (lo, hi) = g.domain();
    let mut probes = linspace(lo, hi, probe_count.max(2));
    probes.extend(g.knots());
    let mut slack = f64::INFINITY;
    for x in probes {
        let ax = a.eval(x);
        slack = slack.min(0.5 * (ax * ax + 1.0) - g.eval(x)?.abs());
    }
    Ok(slack)
}

/// `n` uniformly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn coeff_cap(max_abs_g: f64) -> f64 {
    COEFF_CAP_FACTOR * (1.0 + max_abs_g)
}

/// LP over the coefficients `c_0..c_d` with objective `(s_0..s_d)`:
/// maximize for the minorant side (`p(x_i) <= g(x_i)`), minimize for the
/// majorant side (`p(x_i) >= g(x_i)`), inside the coefficient box.
pub fn build_sandwich_lp(
    s: &MomentSequence,
    g: &FunctionSpec,
    degree: usize,
    grid: &[f64],
    side: Side,
) -> Result<LinearProgram, ExtendError> {
    if grid.len() < degree + 1 {
        return Err(ExtendError::GridTooCoarse {
            points: grid.len(),
            degree,
        });
    }
    if degree > s.last_index() {
        return Err(MomentError::DegreeTooHigh {
            degree,
            available: s.last_index(),
        }
        .into());
    }
    let mut values = Vec::with_capacity(grid.len());
    for &x in grid {
        if !g.contains(x) {
            return Err(ExtendError::GridOutsideDomain(x));
        }
        values.push(g.eval(x)?);
    }
    let cap = coeff_cap(values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let sense = match side {
        Side::Minorant => Sense::Maximize,
        Side::Majorant => Sense::Minimize,
    };
    let relation = match side {
        Side::Minorant => Relation::Le,
        Side::Majorant => Relation::Ge,
    };
    let mut lp = LinearProgram::new(sense, s.as_slice()[..=degree].to_vec()).with_box(-cap, cap);
    for (&x, &gx) in grid.iter().zip(&values) {
        let mut row = Vec::with_capacity(degree + 1);
        let mut pow = 1.0;
        for _ in 0..=degree {
            row.push(pow);
            pow *= x;
        }
        lp.add_constraint(row, relation, gx);
    }
    Ok(lp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichConfig {
    pub degree: usize,
    pub grid_size: usize,
    pub pick: Pick,
    pub psd_tol: f64,
    pub lp_tol: f64,
}

impl SandwichConfig {
    pub fn new(degree: usize, grid_size: usize) -> Self {
        SandwichConfig {
            degree,
            grid_size,
            pick: Pick::Midpoint,
            psd_tol: DEFAULT_PSD_TOL,
            lp_tol: DEFAULT_LP_TOL,
        }
    }

    pub fn pick(mut self, pick: Pick) -> Self {
        self.pick = pick;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichResult {
    pub lower: f64,
    pub upper: f64,
    pub e: f64,
    pub pick: Pick,
    pub minorant: Polynomial,
    pub majorant: Polynomial,
    pub degree: usize,
    /// Number of constraint points actually used (uniform grid plus atoms).
    pub grid_size: usize,
    pub grid: Vec<f64>,
    pub coeff_cap: f64,
    /// Atoms of the representing measure; all of them are grid points.
    pub measure: AtomicMeasure,
    /// Worst violation of `minorant <= g <= majorant` on a grid ten times
    /// finer than the uniform constraint grid (zero if none).
    pub fine_grid_violation: f64,
}

impl SandwichResult {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Computes the sandwich interval for `L(g)` and picks the extension value.
pub fn extend(s: &MomentSequence, g: &FunctionSpec, cfg: &SandwichConfig) -> Result<SandwichResult, ExtendError> {
    let verdict = hamburger_check(s, cfg.psd_tol);
    if !verdict.is_psd {
        return Err(ExtendError::NotAMomentSequence(verdict.min_eigenvalue));
    }
    if cfg.degree > s.last_index() {
        return Err(MomentError::DegreeTooHigh {
            degree: cfg.degree,
            available: s.last_index(),
        }
        .into());
    }
    let measure = recover_measure_with_tol(s, cfg.psd_tol)?;
    let (lo, hi) = g.domain();
    if let Some(a) = measure.atoms().iter().find(|a| !g.contains(a.node)) {
        return Err(ExtendError::AtomOutsideDomain { node: a.node, lo, hi });
    }
    let uniform = linspace(lo, hi, cfg.grid_size);
    if uniform.len() < cfg.degree + 1 {
        return Err(ExtendError::GridTooCoarse {
            points: uniform.len(),
            degree: cfg.degree,
        });
    }
    let mut points = uniform;
    points.extend(measure.nodes());
    points.extend(g.knots());
    let grid = sorted_unique(points);

    let minorant_lp = build_sandwich_lp(s, g, cfg.degree, &grid, Side::Minorant)?;
    let majorant_lp = build_sandwich_lp(s, g, cfg.degree, &grid, Side::Majorant)?;
    let cap = minorant_lp.upper[0];
    let (low_out, up_out) = std::thread::scope(|scope| {
        let h = scope.spawn(|| lp_solve(&majorant_lp));
        let low = lp_solve(&minorant_lp);
        (low, h.join().expect("majorant LP thread panicked"))
    });
    let minorant = optimum(low_out?, Side::Minorant)?;
    let majorant = optimum(up_out?, Side::Majorant)?;
    let values = grid.iter().map(|&x| g.eval(x)).collect::<Result<Vec<f64>, _>>()?;
    let minorant = repair(minorant, &grid, &values, Side::Minorant);
    let majorant = repair(majorant, &grid, &values, Side::Majorant);
    let lower = functional_apply(s, &minorant)? - rounding_slack(s, &measure, &minorant);
    let upper = functional_apply(s, &majorant)? + rounding_slack(s, &measure, &majorant);

    if lower > upper + cfg.lp_tol {
        return Err(ExtendError::SandwichEmpty {
            lower,
            upper,
            lp_tol: cfg.lp_tol,
        });
    }
    let e = match cfg.pick {
        Pick::Midpoint => 0.5 * (lower + upper),
        Pick::Lower => lower,
        Pick::Upper => upper,
    }
    .clamp(lower.min(upper), upper.max(lower));

    let mut fine_grid_violation = 0.0f64;
    for x in linspace(lo, hi, FINE_GRID_FACTOR * cfg.grid_size.max(2)) {
        let gx = g.eval(x)?;
        fine_grid_violation = fine_grid_violation
            .max(minorant.eval(x) - gx)
            .max(gx - majorant.eval(x));
    }

    Ok(SandwichResult {
        lower,
        upper,
        e,
        pick: cfg.pick,
        minorant,
        majorant,
        degree: cfg.degree,
        grid_size: grid.len(),
        grid,
        coeff_cap: cap,
        measure,
        fine_grid_violation,
    })
}

fn optimum(out: LpOutcome, side: Side) -> Result<Polynomial, ExtendError> {
    match out {
        LpOutcome::Optimal(sol) => Ok(Polynomial::new(sol.solution)),
        other => Err(ExtendError::LpStatus {
            side,
            status: other.status(),
        }),
    }
}

/// Shifts the constant term so the polynomial sits on the correct side of
/// `g` at every grid point, removing the simplex's feasibility tolerance.
fn repair(p: Polynomial, grid: &[f64], values: &[f64], side: Side) -> Polynomial {
    let sign = match side {
        Side::Minorant => 1.0,
        Side::Majorant => -1.0,
    };
    let violation = grid
        .iter()
        .zip(values)
        .map(|(&x, &gx)| sign * (p.eval(x) - gx))
        .fold(0.0f64, f64::max);
    if violation == 0.0 {
        return p;
    }
    let mut c = p.into_coeffs();
    if c.is_empty() {
        c.push(0.0);
    }
    c[0] -= sign * violation * (1.0 + 4.0 * f64::EPSILON);
    Polynomial::new(c)
}

/// Bound on `|L(p) - integral of p d mu|` from the recovered measure's moment
/// mismatch and from rounding, used to widen `[lower, upper]` outward.
fn rounding_slack(s: &MomentSequence, mu: &AtomicMeasure, p: &Polynomial) -> f64 {
    let c = p.coeffs();
    let rounding = 4.0 * (c.len() as f64 + 1.0) * f64::EPSILON;
    c.iter()
        .enumerate()
        .map(|(j, cj)| {
            let sj = s.as_slice()[j];
            cj.abs() * ((sj - mu.moment(j)).abs() + rounding * (sj.abs() + mu.abs_moment(j)))
        })
        .sum()
}

/// `L(f + d g) = L(f) + d e` on `span(polynomials, g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedFunctional {
    pub moments: MomentSequence,
    pub g: FunctionSpec,
    pub e: f64,
}

impl ExtendedFunctional {
    pub fn new(moments: MomentSequence, g: FunctionSpec, e: f64) -> Self {
        ExtendedFunctional { moments, g, e }
    }

    pub fn from_sandwich(moments: MomentSequence, g: FunctionSpec, result: &SandwichResult) -> Self {
        Self::new(moments, g, result.e)
    }

    pub fn apply(&self, f: &Polynomial, d: f64) -> Result<f64, MomentError> {
        Ok(functional_apply(&self.moments, f)? + d * self.e)
    }
}

/// `integral of g_{n,k} d mu` for each `k`, where `mu` represents `s`. Once
/// every atom lies in `[-k, k]` this equals `integral x^n d mu`.
pub fn trunc_monomial_limit(s: &MomentSequence, n: u32, k_values: &[u32]) -> Result<Vec<f64>, ExtendError> {
    let mu = recover_measure_with_tol(s, DEFAULT_PSD_TOL)?;
    let reach = mu.atoms().iter().fold(0.0f64, |m, a| m.max(a.node.abs()));
    k_values
        .iter()
        .map(|&k| {
            let r = reach.max(k as f64 + 1.0);
            let g = FunctionSpec::builtin(Builtin::TruncMonomial { n, k }, -r, r)?;
            Ok(integrate(&mu, &g)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> MomentSequence {
        MomentSequence::new(v.to_vec()).unwrap()
    }

    fn spec(b: Builtin, lo: f64, hi: f64) -> FunctionSpec {
        FunctionSpec::builtin(b, lo, hi).unwrap()
    }

    #[test]
    fn envelope_examples() {
        let one = Polynomial::constant(1.0);
        assert!(envelope_check(&spec(Builtin::Sine, -10.0, 10.0), &one, 101).unwrap());
        let g = spec(Builtin::TruncMonomial { n: 2, k: 3 }, -4.0, 4.0);
        assert!(envelope_check(&g, &Polynomial::monomial(2), 101).unwrap());
        let g = FunctionSpec::sampled(vec![0.0, 1.0], vec![2.0, 2.0], None).unwrap();
        assert!(!envelope_check(&g, &one, 11).unwrap());
    }

    #[test]
    fn lp_rows_are_pointwise_evaluations() {
        let s = seq(&[1.0, 0.0, 1.0]);
        let lp = build_sandwich_lp(&s, &spec(Builtin::Constant { c: 1.0 }, 0.0, 1.0), 0, &[0.0, 1.0], Side::Minorant)
            .unwrap();
        assert_eq!(lp.sense, Sense::Maximize);
        assert_eq!(lp.objective, vec![1.0]);
        assert_eq!(lp.constraints.len(), 2);
        assert!(lp.constraints.iter().all(|c| c.coeffs == vec![1.0] && c.rhs == 1.0));

        let lp = build_sandwich_lp(&s, &spec(Builtin::Abs, -1.0, 1.0), 1, &[-1.0, 0.0, 1.0], Side::Minorant).unwrap();
        let rows: Vec<(Vec<f64>, f64)> = lp.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs)).collect();
        assert_eq!(
            rows,
            vec![(vec![1.0, -1.0], 1.0), (vec![1.0, 0.0], 0.0), (vec![1.0, 1.0], 1.0)]
        );
        assert!(lp.constraints.iter().all(|c| c.relation == Relation::Le));
        assert_eq!(lp.upper[0], coeff_cap(1.0));

        let err = build_sandwich_lp(&s, &spec(Builtin::Abs, -1.0, 1.0), 2, &[-1.0, 1.0], Side::Majorant);
        assert_eq!(err, Err(ExtendError::GridTooCoarse { points: 2, degree: 2 }));
    }

    #[test]
    fn constant_is_its_own_sandwich() {
        let s = seq(&[1.0, 0.0, 1.0, 0.0, 3.0]);
        for degree in 0..=2 {
            let r = extend(&s, &spec(Builtin::Constant { c: 1.0 }, -3.0, 3.0), &SandwichConfig::new(degree, 21)).unwrap();
            assert!((r.lower - 1.0).abs() < 1e-9);
            assert!((r.upper - 1.0).abs() < 1e-9);
            assert!((r.e - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn point_mass_brackets_point_value() {
        let s = seq(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        let r = extend(&s, &spec(Builtin::GaussianBump, -3.0, 3.0), &SandwichConfig::new(2, 41)).unwrap();
        assert!(r.lower <= 1.0 + 1e-9 && 1.0 <= r.upper + 1e-9);
        assert!((r.lower - 1.0).abs() < 1e-8 && (r.upper - 1.0).abs() < 1e-8);
    }

    #[test]
    fn abs_against_two_point_measure() {
        // The best even quadratic minorant of |x| on [-2,2] is x^2/2 (value
        // 1/2 at +-1); (1 + x^2)/2 is an exact majorant with value 1.
        let s = seq(&[1.0, 0.0, 1.0, 0.0]);
        let r = extend(&s, &spec(Builtin::Abs, -2.0, 2.0), &SandwichConfig::new(2, 81)).unwrap();
        assert!(r.lower <= 1.0 && 1.0 <= r.upper + 1e-9);
        assert!((r.lower - 0.5).abs() < 1e-8, "{}", r.lower);
        assert!((r.upper - 1.0).abs() < 1e-8, "{}", r.upper);
        assert!((r.e - 0.75).abs() < 1e-8);
    }

    #[test]
    fn pick_policies() {
        let s = seq(&[1.0, 0.0, 1.0, 0.0]);
        let g = spec(Builtin::Abs, -2.0, 2.0);
        let lo = extend(&s, &g, &SandwichConfig::new(2, 41).pick(Pick::Lower)).unwrap();
        let up = extend(&s, &g, &SandwichConfig::new(2, 41).pick(Pick::Upper)).unwrap();
        assert_eq!(lo.e, lo.lower);
        assert_eq!(up.e, up.upper);
        assert_eq!("upper".parse::<Pick>(), Ok(Pick::Upper));
        assert!("max".parse::<Pick>().is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = spec(Builtin::Abs, -2.0, 2.0);
        assert!(matches!(
            extend(&seq(&[1.0, 2.0, 1.0]), &g, &SandwichConfig::new(1, 11)),
            Err(ExtendError::NotAMomentSequence(_))
        ));
        assert!(matches!(
            extend(&seq(&[1.0, 0.0, 1.0]), &g, &SandwichConfig::new(3, 11)),
            Err(ExtendError::Moment(MomentError::DegreeTooHigh { .. }))
        ));
        assert!(matches!(
            extend(&seq(&[1.0, 0.0, 1.0, 0.0, 3.0]), &g, &SandwichConfig::new(4, 3)),
            Err(ExtendError::GridTooCoarse { .. })
        ));
        // atoms at +-3 are outside [-2, 2]
        assert!(matches!(
            extend(&seq(&[1.0, 0.0, 9.0, 0.0]), &g, &SandwichConfig::new(2, 11)),
            Err(ExtendError::AtomOutsideDomain { .. })
        ));
    }

    #[test]
    fn limit_examples() {
        assert_eq!(trunc_monomial_limit(&seq(&[1.0, 0.0, 1.0, 0.0]), 2, &[1, 2, 3]).unwrap(), vec![1.0; 3]);
        let v = trunc_monomial_limit(&seq(&[1.0; 5]), 3, &[0, 1, 2]).unwrap();
        assert!(v[0].abs() < 1e-12);
        assert!((v[1] - 1.0).abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12);
        let v = trunc_monomial_limit(&seq(&[2.0, 0.0, 8.0, 0.0]), 0, &[10]).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-4.0, 4.0, 201);
        assert_eq!(v.len(), 201);
        assert_eq!(v[0], -4.0);
        assert_eq!(v[200], 4.0);
        assert_eq!(v[100], 0.0);
    }
}
