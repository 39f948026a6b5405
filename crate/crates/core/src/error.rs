use thiserror::Error;

use crate::extension::ExtendError;
use crate::function::FunctionError;
use crate::lp::LpError;
use crate::measure::MeasureError;
use crate::moments::MomentError;
use crate::poly::PolyError;
use crate::sos::SosError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Sos(#[from] SosError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Extend(#[from] ExtendError),
    #[error("moment {k} off by {abs_error:e} (scale {scale:e})")]
    MomentMismatch { k: usize, abs_error: f64, scale: f64 },
    #[error("integral {integral} of the recovered measure lies outside [{lower}, {upper}]")]
    CrossCheck { lower: f64, integral: f64, upper: f64 },
    #[error("envelope |g| <= (a^2 + 1)/2 violated by {0:e}")]
    EnvelopeViolated(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Short machine-readable name of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Poly(PolyError::NonConvergence { .. }) => "NonConvergence",
            Error::Poly(_) => "InvalidPolynomial",
            Error::Moment(MomentError::InsufficientMoments { .. }) => "InsufficientMoments",
            Error::Moment(MomentError::DegreeTooHigh { .. }) => "DegreeTooHigh",
            Error::Moment(_) => "InvalidMomentSequence",
            Error::Sos(SosError::ZeroPolynomial) => "ZeroPolynomial",
            Error::Sos(SosError::Poly(_)) => "NonConvergence",
            Error::Sos(SosError::Inconclusive { .. }) => "Inconclusive",
            Error::Measure(m) => measure_kind(m),
            Error::Function(FunctionError::OutsideDomain { .. }) => "EvaluationOutsideDomain",
            Error::Function(_) => "InvalidFunctionSpec",
            Error::Lp(_) => "LpFailure",
            Error::Extend(e) => match e {
                ExtendError::GridTooCoarse { .. } => "GridTooCoarse",
                ExtendError::GridOutsideDomain(_) => "EvaluationOutsideDomain",
                ExtendError::SandwichEmpty { .. } => "SandwichEmpty",
                ExtendError::NotAMomentSequence(_) => "NotAMomentSequence",
                ExtendError::AtomOutsideDomain { .. } => "EvaluationOutsideDomain",
                ExtendError::LpStatus { .. } | ExtendError::Lp(_) => "LpFailure",
                ExtendError::Moment(m) => Error::Moment(m.clone()).kind(),
                ExtendError::Measure(m) => measure_kind(m),
                ExtendError::Function(f) => Error::Function(f.clone()).kind(),
            },
            Error::MomentMismatch { .. } => "MomentMismatch",
            Error::CrossCheck { .. } => "CrossCheckFailed",
            Error::EnvelopeViolated(_) => "EnvelopeViolated",
            Error::Config(_) => "Config",
        }
    }
}

fn measure_kind(m: &MeasureError) -> &'static str {
    match m {
        MeasureError::RankDeficient(_) => "RankDeficient",
        MeasureError::NotAMomentSequence { .. } => "NotAMomentSequence",
        MeasureError::Function(FunctionError::OutsideDomain { .. }) => "EvaluationOutsideDomain",
        MeasureError::Function(_) => "InvalidFunctionSpec",
        MeasureError::Eigen(_) => "NonConvergence",
        MeasureError::TooFewMoments => "InsufficientMoments",
        MeasureError::InvalidAtom { .. } => "InvalidMeasure",
    }
}
