//! End-to-end chain: Hamburger test, measure recovery, moment verification,
//! envelope, sandwich extension and the final cross-check.

use serde::Serialize;

use crate::error::Error;
use crate::extension::{envelope_slack, extend, ExtendError, Pick, SandwichConfig, SandwichResult};
use crate::function::FunctionSpec;
use crate::measure::{integrate, recover_measure_with_tol, verify_moments, AtomicMeasure, MomentReport};
use crate::moments::{hamburger_check, MomentSequence, PsdVerdict};
use crate::poly::Polynomial;
use crate::Tolerances;

const ENVELOPE_PROBES: usize = 1001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    HamburgerCheck,
    RecoverMeasure,
    VerifyMoments,
    EnvelopeCheck,
    Extend,
    CrossCheck,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::HamburgerCheck => "hamburger_check",
            Stage::RecoverMeasure => "recover_measure",
            Stage::VerifyMoments => "verify_moments",
            Stage::EnvelopeCheck => "envelope_check",
            Stage::Extend => "extend",
            Stage::CrossCheck => "cross_check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub a: Polynomial,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub lower: f64,
    pub integral: f64,
    pub upper: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub verdict: PsdVerdict,
    pub measure: AtomicMeasure,
    pub moment_report: MomentReport,
    pub envelope: Envelope,
    pub sandwich: SandwichResult,
    pub cross_check: CrossCheckReport,
}

/// Failure of one stage. `verdict` is kept whenever the Hamburger test ran.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineError {
    pub stage: Stage,
    pub error: Error,
    pub verdict: Option<PsdVerdict>,
}

impl PipelineError {
    /// True for the sound negative outcomes (not a moment sequence, empty
    /// sandwich) as opposed to operational failures.
    pub fn is_negative_verdict(&self) -> bool {
        matches!(self.stage, Stage::HamburgerCheck)
            || matches!(self.error, Error::Extend(ExtendError::SandwichEmpty { .. }))
    }
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {}: {}", self.stage.name(), self.error)
    }
}

impl std::error::Error for PipelineError {}

/// Constant `a` with `(a^2 + 1)/2 >= sup |g|`, padded against rounding.
pub fn envelope_polynomial(g: &FunctionSpec) -> Result<Polynomial, Error> {
    let (lo, hi) = g.domain();
    let mut sup = 0.0f64;
    let mut probes = crate::extension::linspace(lo, hi, ENVELOPE_PROBES);
    probes.extend(g.knots());
    for x in probes {
        sup = sup.max(g.eval(x)?.abs());
    }
    Ok(Polynomial::constant((2.0 * sup - 1.0).max(0.0).sqrt() * (1.0 + 1e-12)))
}

pub fn run_pipeline(
    s: &MomentSequence,
    g: &FunctionSpec,
    degree: usize,
    grid_size: usize,
    pick: Pick,
    tol: &Tolerances,
) -> Result<PipelineReport, PipelineError> {
    let fail = |stage: Stage, verdict: Option<&PsdVerdict>| {
        let verdict = verdict.cloned();
        move |error: Error| PipelineError { stage, error, verdict }
    };

    let verdict = hamburger_check(s, tol.tol);
    if !verdict.is_psd {
        return Err(fail(Stage::HamburgerCheck, Some(&verdict))(
            ExtendError::NotAMomentSequence(verdict.min_eigenvalue).into(),
        ));
    }
    let v = Some(&verdict);

    let measure = recover_measure_with_tol(s, tol.tol).map_err(|e| fail(Stage::RecoverMeasure, v)(e.into()))?;

    let k_max = s.last_index().min(2 * measure.len() - 1);
    let moment_report = verify_moments(&measure, s, k_max, tol.moment_tol);
    if let Some(bad) = moment_report.checks.iter().find(|c| !c.pass) {
        return Err(fail(Stage::VerifyMoments, v)(Error::MomentMismatch {
            k: bad.k,
            abs_error: bad.abs_error,
            scale: bad.scale,
        }));
    }

    let a = envelope_polynomial(g).map_err(fail(Stage::EnvelopeCheck, v))?;
    let slack =
        envelope_slack(g, &a, ENVELOPE_PROBES).map_err(|e| fail(Stage::EnvelopeCheck, v)(e.into()))?;
    if slack < 0.0 {
        return Err(fail(Stage::EnvelopeCheck, v)(Error::EnvelopeViolated(-slack)));
    }
    let envelope = Envelope { a, slack, holds: true };

    let cfg = SandwichConfig {
        pick,
        psd_tol: tol.tol,
        lp_tol: tol.lp_tol,
        ..SandwichConfig::new(degree, grid_size)
    };
    let sandwich = extend(s, g, &cfg).map_err(|e| fail(Stage::Extend, v)(e.into()))?;

    let integral = integrate(&measure, g).map_err(|e| fail(Stage::CrossCheck, v)(e.into()))?;
    let pass = sandwich.lower <= integral + tol.lp_tol && integral <= sandwich.upper + tol.lp_tol;
    if !pass {
        return Err(fail(Stage::CrossCheck, v)(Error::CrossCheck {
            lower: sandwich.lower,
            integral,
            upper: sandwich.upper,
        }));
    }
    let cross_check = CrossCheckReport {
        lower: sandwich.lower,
        integral,
        upper: sandwich.upper,
        pass,
    };

    Ok(PipelineReport {
        verdict,
        measure,
        moment_report,
        envelope,
        sandwich,
        cross_check,
    })
}
