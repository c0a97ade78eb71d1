//! End-to-end and per-hop performance metrics in exact closed form and
//! asymptotic form: outage, BER, SER, finite-blocklength BLER, ergodic
//! capacity, energy efficiency.

pub mod ber;
pub mod bler;
pub mod capacity;
pub mod ee;
pub mod outage;
pub mod qam;
pub mod ser;

use thiserror::Error;

use crate::specfun::{BivFoxHError, FoxHError, GammaError};

/// Closed-form evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Asymptotic,
}

/// How a reported metric value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Asymptotic,
    MonteCarlo,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Asymptotic => "asymptotic",
            Method::MonteCarlo => "mc",
        }
    }
}

/// Evaluation diagnostics attached to a metric value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Diagnostics {
    /// Contour abscissa of the dominant special-function evaluation.
    pub contour_abscissa: Option<f64>,
    /// Self-reported relative error of the special-function evaluation.
    pub est_rel_err: Option<f64>,
    /// Monte-Carlo confidence half-width.
    pub mc_half_width: Option<f64>,
}

/// A metric value, the method that produced it, and its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl MetricResult {
    pub fn exact(value: f64) -> Self {
        Self { value, method: Method::Exact, diagnostics: Diagnostics::default() }
    }

    pub fn asymptotic(value: f64) -> Self {
        Self { value, method: Method::Asymptotic, diagnostics: Diagnostics::default() }
    }

    pub fn monte_carlo(value: f64, half_width: f64) -> Self {
        Self {
            value,
            method: Method::MonteCarlo,
            diagnostics: Diagnostics { mc_half_width: Some(half_width), ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("metric argument out of domain: {0}")]
    Domain(String),
    #[error("metric requires a common shape parameter across hops")]
    MixedShapes,
    #[error(transparent)]
    FoxH(#[from] FoxHError),
    #[error(transparent)]
    BivFoxH(#[from] BivFoxHError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Qam(#[from] qam::QamError),
}
