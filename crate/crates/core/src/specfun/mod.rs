//! Numerical special functions.
//!
//! Everything the closed-form metrics are expressed in lives here:
//!
//! - gamma family: [`complex_gamma`], [`ln_gamma_complex`], [`digamma`],
//!   [`upper_incomplete_gamma`], [`erfc`];
//! - [`fox_h`]: single Mellin–Barnes contour integral with adaptive
//!   trapezoid quadrature and self-reported error estimates;
//! - [`bivariate_fox_h`]: double Mellin–Barnes integral (outer vertical
//!   contour, inner contour or residue series, selected automatically);
//! - [`meijer_g`]: Fox H with all linear coefficients equal to one.
//!
//! All functions are pure; there is no memoization and no shared state.

mod bivariate;
mod gamma;
mod foxh;

pub use bivariate::{
    bivariate_fox_h, bivariate_fox_h_eval, BivFoxHError, BivFoxHEval, BivFoxHParams, BivGammaTerm,
    GammaTerm,
};
pub use foxh::{
    erfc_identity_params, exp_identity_params, fox_h, fox_h_eval, log_identity_params, meijer_g,
    FoxHError, FoxHEval, FoxHParams,
};
pub use gamma::{
    complex_gamma, digamma, erfc, gamma, ln_gamma, ln_gamma_complex, upper_incomplete_gamma,
    GammaError, EULER_GAMMA,
};
