//! Finite-blocklength block error rate.
//!
//! Per hop, the normal-approximation BLER is
//! `E[Q((C(g) - rate) / sqrt(V(g)/l))]` with `C = log2(1+g)` and channel
//! dispersion `V = (1 - (1+g)^-2) (log2 e)^2`. Linearising the Q term
//! around the rate threshold turns the average into an integral of the
//! SNR CDF between `g_minus` and `g_plus`, which evaluates to a
//! difference of upper incomplete gamma functions. When `g_minus`
//! falls below zero (short blocks at low rate), the lower limit clamps
//! to zero, which equals integrating the linearised kernel on
//! [0, g_plus] directly.
//!
//! End to end, a block survives only if every hop decodes it, so the
//! cumulative BLER follows the recursion `E_k = E_{k-1} + (1 - E_{k-1}) e_k`,
//! equivalently `1 - prod(1 - e_k)`, whose expansion is the alternating
//! inclusion–exclusion sum over hop subsets.

use crate::channel::{HopChain, LinkBudget, WeibullHop};
use crate::metrics::{MetricError, Mode};
use crate::specfun::{erfc, upper_incomplete_gamma};

/// Rate/blocklength parameters of the finite-blocklength model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerParams {
    /// Transmission rate in bits per channel use.
    pub rate: f64,
    /// Block length in channel uses.
    pub block_length: u32,
    /// 1 / (2 pi sqrt(2^{2 rate} - 1)).
    pub lambda: f64,
    /// SNR threshold 2^rate - 1.
    pub gamma_th: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

impl BlerParams {
    pub fn new(rate: f64, block_length: u32) -> Result<Self, MetricError> {
        if !(rate > 0.0) {
            return Err(MetricError::Domain(format!("rate must be positive, got {rate}")));
        }
        if block_length == 0 {
            return Err(MetricError::Domain("block length must be positive".to_string()));
        }
        let gamma_th = 2f64.powf(rate) - 1.0;
        let lambda = 1.0 / (2.0 * std::f64::consts::PI * (4f64.powf(rate) - 1.0).sqrt());
        let half = 1.0 / (2.0 * lambda * (block_length as f64).sqrt());
        Ok(Self {
            rate,
            block_length,
            lambda,
            gamma_th,
            gamma_minus: gamma_th - half,
            gamma_plus: gamma_th + half,
        })
    }

    /// Width weight lambda sqrt(l).
    pub fn lambda_sqrt_l(&self) -> f64 {
        self.lambda * (self.block_length as f64).sqrt()
    }
}

/// Exact Q-argument BLER kernel conditioned on the SNR (no
/// linearisation); used by the Monte-Carlo oracle and the tightness
/// checks.
pub fn bler_conditional_true_q(gamma: f64, params: &BlerParams) -> f64 {
    if gamma <= 0.0 {
        return 1.0;
    }
    let log2e = std::f64::consts::LOG2_E;
    let c = (1.0 + gamma).log2();
    let v = (1.0 - (1.0 + gamma).powi(-2)) * log2e * log2e;
    if v <= 0.0 {
        return if c < params.rate { 1.0 } else { 0.0 };
    }
    let x = (c - params.rate) / (v / params.block_length as f64).sqrt();
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Linearised Q kernel conditioned on the SNR.
pub fn bler_conditional_linearized(gamma: f64, params: &BlerParams) -> f64 {
    if gamma <= params.gamma_minus {
        1.0
    } else if gamma >= params.gamma_plus {
        0.0
    } else {
        0.5 - params.lambda_sqrt_l() * (gamma - params.gamma_th)
    }
}

/// ∫_{lo}^{hi} (1 - exp(-g^alpha/phi)) dg.
///
/// In the variable u = g^alpha/phi this is (phi^{1/alpha}/alpha) times
/// ∫ u^{s-1} (1 - e^{-u}) du with s = 1/alpha. Where u <= 1 the
/// incomplete-gamma form cancels catastrophically at high SNR, so the
/// integrand's alternating series
/// Σ_{k>=1} (-1)^{k+1} (u_hi^{s+k} - u_lo^{s+k}) / (k! (s+k))
/// is summed instead; where u >= 1 the gamma form is well conditioned.
fn cdf_integral(alpha: f64, phi: f64, lo: f64, hi: f64) -> Result<f64, MetricError> {
    if hi <= lo {
        return Ok(0.0);
    }
    let s = 1.0 / alpha;
    let scale = phi.powf(s) * s;
    let u = |g: f64| g.powf(alpha) / phi;
    let split_u = 1.0;
    if u(lo) >= split_u {
        let g_lo = upper_incomplete_gamma(s, u(lo))?;
        let g_hi = upper_incomplete_gamma(s, u(hi))?;
        return Ok((hi - lo) - scale * (g_lo - g_hi));
    }
    if u(hi) > split_u {
        let mid = phi.powf(s); // u(mid) = 1
        return Ok(cdf_integral(alpha, phi, lo, mid)? + cdf_integral(alpha, phi, mid, hi)?);
    }
    let (ul, uh) = (u(lo), u(hi));
    let mut total = 0.0;
    let mut lo_pow = ul.powf(s) * ul;
    let mut hi_pow = uh.powf(s) * uh;
    let mut factorial = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        factorial *= kf;
        let term = (hi_pow - lo_pow) / (factorial * (s + kf));
        total += if k % 2 == 1 { term } else { -term };
        lo_pow *= ul;
        hi_pow *= uh;
        if term.abs() < 1e-18 * total.abs() {
            break;
        }
    }
    Ok(scale * total)
}

/// Average per-hop BLER in closed form (linearised kernel):
/// lambda sqrt(l) ∫_{max(g-,0)}^{g+} F(g) dg via incomplete gamma
/// functions, with a series branch where the gamma form cancels.
pub fn bler_hop_from_params(
    alpha: f64,
    phi: f64,
    params: &BlerParams,
) -> Result<f64, MetricError> {
    if !(alpha > 0.0 && phi > 0.0) {
        return Err(MetricError::Domain(format!(
            "bler needs positive alpha and phi, got {alpha}, {phi}"
        )));
    }
    let lo = params.gamma_minus.max(0.0);
    let hi = params.gamma_plus;
    let weight = params.lambda_sqrt_l();
    let integral = cdf_integral(alpha, phi, lo, hi)?;
    Ok((weight * integral).clamp(0.0, 1.0))
}

/// Average per-hop BLER of a chain hop.
pub fn bler_hop(
    hop: &WeibullHop,
    budget: &LinkBudget,
    params: &BlerParams,
) -> Result<f64, MetricError> {
    bler_hop_from_params(hop.alpha, crate::channel::phi(hop, budget), params)
}

/// End-to-end BLER by the per-node recursion.
pub fn bler_e2e(per_hop: &[f64]) -> Result<f64, MetricError> {
    let mut acc = 0.0;
    for &e in per_hop {
        if !(0.0..=1.0).contains(&e) {
            return Err(MetricError::Domain(format!(
                "per-hop BLER must lie in [0, 1], got {e}"
            )));
        }
        acc = acc + (1.0 - acc) * e;
    }
    Ok(acc)
}

/// End-to-end BLER by the explicit inclusion–exclusion sum over hop
/// subsets; must agree with the recursion exactly.
pub fn bler_e2e_inclusion_exclusion(per_hop: &[f64]) -> Result<f64, MetricError> {
    let n = per_hop.len();
    if n > 24 {
        return Err(MetricError::Domain(
            "inclusion-exclusion form is exponential in hops; use bler_e2e".to_string(),
        ));
    }
    for &e in per_hop {
        if !(0.0..=1.0).contains(&e) {
            return Err(MetricError::Domain(format!(
                "per-hop BLER must lie in [0, 1], got {e}"
            )));
        }
    }
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones();
        let mut prod = 1.0;
        for (i, &e) in per_hop.iter().enumerate() {
            if mask & (1 << i) != 0 {
                prod *= e;
            }
        }
        total += if size % 2 == 1 { prod } else { -prod };
    }
    Ok(total)
}

/// End-to-end BLER of a chain (exact closed form only; the linearised
/// kernel has no separate asymptote, and `Mode::Asymptotic` substitutes
/// the outage-style bound lambda-free `F(gamma_th)` combination).
pub fn bler_chain(
    chain: &HopChain,
    params: &BlerParams,
    mode: Mode,
) -> Result<f64, MetricError> {
    let per_hop: Result<Vec<f64>, _> = chain
        .hops
        .iter()
        .map(|h| match mode {
            Mode::Exact => bler_hop(h, &chain.budget, params),
            Mode::Asymptotic => {
                // Midpoint surrogate: F evaluated at the rate threshold,
                // the leading term of the linearised integral.
                let phi = crate::channel::phi(h, &chain.budget);
                Ok((params.gamma_th.powf(h.alpha) / phi).min(1.0))
            }
        })
        .collect();
    bler_e2e(&per_hop?)
}
