//! Bandwidth-normalised ergodic capacity.
//!
//! Per hop, `C = E[log2(1 + g)]`, whose Mellin–Barnes form over the
//! Weibull SNR density is
//!
//! ```text
//! C = (alpha / (phi ln 2)) H^{3,1}_{2,3}[ 1/phi | (-a,a),(1-a,a); (0,1),(-a,a),(-a,a) ]
//! ```
//!
//! with a = alpha. The high-SNR expansion comes from the double pole of
//! the kernel and reads `(psi0(1) + ln phi) / (alpha ln 2)`. Across a
//! regenerative chain the end-to-end capacity is the minimum of the
//! per-hop averages.

use crate::channel::{HopChain, LinkBudget, WeibullHop};
use crate::metrics::{MetricError, Mode};
use crate::specfun::{digamma, fox_h, FoxHParams};

/// Per-hop ergodic capacity in bits/s/Hz.
pub fn capacity_hop_from_params(alpha: f64, phi: f64, mode: Mode) -> Result<f64, MetricError> {
    if !(alpha > 0.0 && phi > 0.0) {
        return Err(MetricError::Domain(format!(
            "capacity needs positive alpha and phi, got {alpha}, {phi}"
        )));
    }
    match mode {
        Mode::Exact => {
            let params = FoxHParams::new(
                3,
                1,
                vec![(-alpha, alpha), (1.0 - alpha, alpha)],
                vec![(0.0, 1.0), (-alpha, alpha), (-alpha, alpha)],
            )?;
            let h = fox_h(&params, 1.0 / phi)?;
            Ok((alpha / (phi * std::f64::consts::LN_2) * h).max(0.0))
        }
        Mode::Asymptotic => {
            Ok((digamma(1.0)? + phi.ln()) / (alpha * std::f64::consts::LN_2))
        }
    }
}

/// Per-hop capacity of a chain hop.
pub fn capacity_hop(
    hop: &WeibullHop,
    budget: &LinkBudget,
    mode: Mode,
) -> Result<f64, MetricError> {
    capacity_hop_from_params(hop.alpha, crate::channel::phi(hop, budget), mode)
}

/// End-to-end capacity: the bottleneck hop's average.
pub fn capacity_e2e(chain: &HopChain, mode: Mode) -> Result<f64, MetricError> {
    let mut best = f64::INFINITY;
    for hop in &chain.hops {
        best = best.min(capacity_hop(hop, &chain.budget, mode)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LinkBudget;
    use crate::quad;

    /// Quadrature oracle via the survival-function identity
    /// E[log2(1+g)] = (1/ln 2) ∫ exp(-(e^u - 1)^alpha / phi) du,
    /// a bounded monotone integrand at every SNR.
    fn capacity_quadrature(alpha: f64, phi: f64) -> f64 {
        let u_max = (1.0 + (700.0 * phi).powf(1.0 / alpha)).ln();
        let (v, _) = quad::integrate(
            |u: f64| (-(u.exp() - 1.0).powf(alpha) / phi).exp(),
            0.0,
            u_max,
            1e-13,
        );
        v / std::f64::consts::LN_2
    }

    #[test]
    fn rayleigh_case_matches_quadrature() {
        // alpha = 1: exact equals e^{1/phi} E1(1/phi) / ln 2.
        for phi in [1.0, 10.0, 1000.0] {
            let got = capacity_hop_from_params(1.0, phi, Mode::Exact).unwrap();
            let want = capacity_quadrature(1.0, phi);
            assert!(
                (got - want).abs() < 1e-6 * want.max(0.1),
                "phi={phi}: got {got:.10e} want {want:.10e}"
            );
        }
    }

    #[test]
    fn general_shapes_match_quadrature() {
        for &(alpha, phi) in &[(0.5, 7.0), (1.5, 300.0), (2.0, 1e4), (3.0, 40.0), (0.75, 0.6)] {
            let got = capacity_hop_from_params(alpha, phi, Mode::Exact).unwrap();
            let want = capacity_quadrature(alpha, phi);
            assert!(
                (got - want).abs() < 1e-5 * want.max(0.1),
                "alpha={alpha} phi={phi}: got {got:.10e} want {want:.10e}"
            );
        }
    }

    #[test]
    fn asymptote_converges_at_high_snr() {
        // Gap below 0.01 bits/s/Hz by 60 dB at alpha = 1, and shrinking.
        let exact = capacity_hop_from_params(1.0, 1e6, Mode::Exact).unwrap();
        let asym = capacity_hop_from_params(1.0, 1e6, Mode::Asymptotic).unwrap();
        assert!((exact - asym).abs() < 0.01, "gap {}", (exact - asym).abs());
        // And for a non-unit shape the corrected asymptote still lands.
        let exact = capacity_hop_from_params(2.0, 1e8, Mode::Exact).unwrap();
        let asym = capacity_hop_from_params(2.0, 1e8, Mode::Asymptotic).unwrap();
        assert!(
            (exact - asym).abs() / exact < 0.01,
            "alpha=2 gap {} vs {}",
            exact,
            asym
        );
    }

    #[test]
    fn e2e_is_bottleneck() {
        let budget = LinkBudget::default();
        let mk = |d: f64| crate::channel::WeibullHop::from_beta(2.0, 1.0, d, 200e6, 30.0).unwrap();
        let chain =
            crate::channel::HopChain::new(vec![mk(50.0), mk(200.0), mk(100.0)], budget).unwrap();
        let e2e = capacity_e2e(&chain, Mode::Exact).unwrap();
        let worst = capacity_hop(&mk(200.0), &budget, Mode::Exact).unwrap();
        assert!((e2e - worst).abs() < 1e-12);
        // Identical hops: e2e equals the per-hop value.
        let same = crate::channel::HopChain::new(vec![mk(100.0); 3], budget).unwrap();
        let hop = capacity_hop(&mk(100.0), &budget, Mode::Exact).unwrap();
        assert!((capacity_e2e(&same, Mode::Exact).unwrap() - hop).abs() < 1e-12);
    }
}
