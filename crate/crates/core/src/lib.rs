//! Performance analysis toolkit for multihop decode-and-forward relaying
//! over Weibull fading channels.
//!
//! The crate is organised around five building blocks:
//!
//! - [`specfun`]: numerical special functions: complex gamma, digamma,
//!   incomplete gamma, erfc, and Mellin–Barnes evaluators for the Fox H
//!   function (single and two-variable) and the Meijer G function.
//! - [`channel`]: link-budget and fading parameterisation: converts
//!   scenario inputs (frequency, distance, bandwidth, EIRP, losses) into
//!   the per-hop average SNR and the Weibull SNR parameters every metric
//!   consumes.
//! - [`metrics`]: exact and asymptotic end-to-end metrics: outage, BER
//!   (perfect CSI, outdated CSI, beamforming), SER, finite-blocklength
//!   BLER, ergodic capacity and energy efficiency.
//! - [`allocation`]: closed-form BER-optimal and EE-optimal transmit
//!   power splits under a total power budget.
//! - [`simulate`]: an independent Monte-Carlo oracle with deterministic
//!   seeded streams, used to cross-validate every closed form.
//!
//! All computations are pure functions of their inputs; the crate keeps no
//! global state and no caches, so everything is safe to call from any
//! number of threads.

// Parameter guards are written `!(x > 0.0)` so that NaN fails validation
// along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod channel;
pub mod metrics;
pub mod quad;
pub mod simulate;
pub mod specfun;
