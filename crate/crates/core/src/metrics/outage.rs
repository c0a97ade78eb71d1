//! End-to-end outage probability of the decode-and-forward chain.
//!
//! An outage occurs when any hop's SNR falls below the threshold, so
//! with per-hop CDF `1 - exp(-g^alpha/phi)` the end-to-end probability is
//! `1 - exp(-sum_i g_th^{alpha_i} / phi_i)`; the low-threshold asymptote
//! is the exponent itself.

use crate::channel::HopChain;

/// Exact end-to-end outage probability at linear threshold `gamma_th`.
pub fn outage_exact(chain: &HopChain, gamma_th: f64) -> f64 {
    1.0 - (-outage_exponent(chain, gamma_th)).exp()
}

/// Low-threshold asymptote: sum_i gamma_th^{alpha_i} / phi_i.
pub fn outage_asymptotic(chain: &HopChain, gamma_th: f64) -> f64 {
    outage_exponent(chain, gamma_th)
}

fn outage_exponent(chain: &HopChain, gamma_th: f64) -> f64 {
    assert!(gamma_th >= 0.0, "outage threshold must be non-negative");
    chain
        .weibull_params()
        .iter()
        .map(|&(alpha, phi)| gamma_th.powf(alpha) / phi)
        .sum()
}

/// Largest hop count meeting an outage target under the identical-hop
/// asymptote: floor(phi * target / gamma_th^alpha). Zero means the
/// target is infeasible at any hop count.
pub fn min_hops(phi: f64, alpha: f64, gamma_th: f64, target: f64) -> u32 {
    assert!(target > 0.0 && target < 1.0, "outage target must lie in (0, 1)");
    assert!(phi > 0.0 && gamma_th > 0.0 && alpha > 0.0);
    let n = (phi * target / gamma_th.powf(alpha)).floor();
    if n < 0.0 || !n.is_finite() {
        0
    } else {
        n.min(u32::MAX as f64) as u32
    }
}
