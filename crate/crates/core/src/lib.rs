//! Constructive tools for the classical Hamburger moment problem and for
//! positivity-preserving extension of moment functionals.
//!
//! * [`moments`]: Hankel matrices, the PSD test and the functional `L`.
//! * [`sos`]: two-square certificates for nonnegative univariate polynomials.
//! * [`measure`]: Gauss-quadrature (atomic) representing measures.
//! * [`extension`]: minorant/majorant sandwich bounds for `L(g)`.
//! * [`pipeline`]: the end-to-end check, recover, extend chain.

pub mod extension;
pub mod function;
pub mod json;
pub mod linalg;
pub mod lp;
pub mod measure;
pub mod moments;
pub mod pipeline;
pub mod poly;
pub mod selftest;
pub mod sos;

mod error;

pub use error::Error;
pub use extension::{extend, ExtendedFunctional, Pick, SandwichConfig, SandwichResult, Side};
pub use function::{Builtin, FunctionSpec};
pub use lp::{lp_solve, LinearProgram, LpOutcome};
pub use measure::{integrate, recover_measure, verify_moments, AtomicMeasure, JacobiMatrix};
pub use json::to_string_g17;
pub use moments::{build_hankel, functional_apply, hamburger_check, psd_check, MomentSequence, PsdVerdict};
pub use pipeline::{run_pipeline, PipelineError, PipelineReport, Stage};
pub use poly::Polynomial;
pub use selftest::{run_selftest, SelftestReport};
pub use sos::{sos_decompose, verify_certificate, SosCertificate, SosOutcome};

use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by the whole toolchain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative PSD tolerance of the Hankel test.
    pub tol: f64,
    pub lp_tol: f64,
    pub sos_tol: f64,
    pub moment_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol: moments::DEFAULT_PSD_TOL,
            lp_tol: lp::DEFAULT_LP_TOL,
            sos_tol: sos::DEFAULT_SOS_TOL,
            moment_tol: measure::DEFAULT_MOMENT_TOL,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [
            ("tol", self.tol),
            ("lp_tol", self.lp_tol),
            ("sos_tol", self.sos_tol),
            ("moment_tol", self.moment_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}
