//! Closed-form optimal transmit-power allocation across hops.
//!
//! Both allocators assume a common SNR shape alpha across hops (mixed
//! shapes are rejected) and split a total budget P_max so that the KKT
//! stationarity conditions of the asymptotic objectives hold exactly:
//!
//! - BER-optimal: minimise sum_i c_i P_i^{-alpha} with the per-hop
//!   coefficient c_i = (N0 L_i / (B_i Omega_i^2))^alpha; the solution is
//!   P_i proportional to c_i^{1/(alpha+1)};
//! - EE-optimal: maximise the high-SNR energy efficiency, which under
//!   the binding sum constraint reduces to the same proportional split
//!   with the EE coefficients a_i, P_{k} = P_max / sum_i (a_i/a_k)^{1/(alpha+1)}.
//!
//! Coefficients derive from the link budget: c_i is the inverse of the
//! per-watt SNR scale of hop i, so only ratios matter and common factors
//! cancel in the split.

use thiserror::Error;

use crate::channel::{avg_snr_linear, dbm_to_watt, watt_to_dbm, HopChain};
use crate::metrics::qam::QamCoefficients;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error("allocation requires a common shape parameter across hops")]
    MixedShapes,
    #[error("invalid allocation input: {0}")]
    Invalid(String),
}

/// An optimal split of the power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    /// Per-hop transmit powers in watts; sums to the budget.
    pub powers_w: Vec<f64>,
    /// Lagrange multiplier of the binding sum constraint.
    pub multiplier: f64,
    /// Asymptotic objective at the uniform split (before).
    pub objective_before: f64,
    /// Asymptotic objective at the returned split (after).
    pub objective_after: f64,
}

/// Per-watt inverse SNR coefficient of each hop:
/// a_i = 1 / (snr_linear_per_watt * Omega^2)^alpha, i.e. with hop power
/// normalised out of the link budget.
pub fn hop_coefficients(chain: &HopChain) -> Result<Vec<f64>, AllocationError> {
    let alpha = chain.common_alpha().ok_or(AllocationError::MixedShapes)?;
    Ok(chain
        .hops
        .iter()
        .map(|h| {
            let snr = avg_snr_linear(h, &chain.budget);
            let per_watt = snr / dbm_to_watt(h.tx_power_dbm);
            (per_watt * h.omega * h.omega).powf(alpha).recip()
        })
        .collect())
}

fn proportional_split(
    coefficients: &[f64],
    alpha: f64,
    p_max: f64,
) -> Result<Vec<f64>, AllocationError> {
    if !(p_max > 0.0) {
        return Err(AllocationError::Invalid(format!(
            "power budget must be positive, got {p_max}"
        )));
    }
    let exponent = 1.0 / (alpha + 1.0);
    let weights: Vec<f64> = coefficients.iter().map(|&c| c.powf(exponent)).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.iter().map(|w| p_max * w / total).collect())
}

/// Asymptotic BER objective sum_i c_i P_i^{-alpha} scaled by the common
/// Cho–Yoon weight (which does not affect the argmin).
fn ber_objective(coefficients: &[f64], powers: &[f64], alpha: f64, qam_weight: f64) -> f64 {
    coefficients
        .iter()
        .zip(powers)
        .map(|(&c, &p)| c * p.powf(-alpha))
        .sum::<f64>()
        * qam_weight
}

/// Common Cho–Yoon factor of the asymptotic BER,
/// Gamma(1/2 + alpha)/(sqrt(pi M) log2 sqrt M) * sum phi_{m,n} omega_n^{-alpha}.
pub fn qam_asymptotic_weight(coeffs: &QamCoefficients, alpha: f64) -> f64 {
    let sum: f64 = coeffs.terms().map(|(w, phi)| phi * w.powf(-alpha)).sum();
    crate::specfun::gamma(0.5 + alpha) / std::f64::consts::PI.sqrt() * coeffs.norm() * sum
}

/// BER-minimising split of `p_max` watts across the chain's hops.
pub fn allocate_ber_optimal(
    chain: &HopChain,
    coeffs: &QamCoefficients,
    p_max: f64,
) -> Result<AllocationResult, AllocationError> {
    let alpha = chain.common_alpha().ok_or(AllocationError::MixedShapes)?;
    let cs = hop_coefficients(chain)?;
    let powers = proportional_split(&cs, alpha, p_max)?;
    let qam_weight = qam_asymptotic_weight(coeffs, alpha);
    let uniform = vec![p_max / cs.len() as f64; cs.len()];
    // Stationarity: alpha c_i P_i^{-alpha-1} = lambda for every hop.
    let multiplier = alpha * qam_weight * cs[0] * powers[0].powf(-alpha - 1.0);
    Ok(AllocationResult {
        objective_before: ber_objective(&cs, &uniform, alpha, qam_weight),
        objective_after: ber_objective(&cs, &powers, alpha, qam_weight),
        powers_w: powers,
        multiplier,
    })
}

/// EE-maximising split of `p_max` watts across the chain's hops.
///
/// Reported objectives are the high-SNR EE numerators
/// -ln(sum_i a_i P_i^{-alpha}) (larger is better); the 1/(alpha P_T)
/// scaling is common to both splits.
pub fn allocate_ee_optimal(
    chain: &HopChain,
    p_max: f64,
) -> Result<AllocationResult, AllocationError> {
    let alpha = chain.common_alpha().ok_or(AllocationError::MixedShapes)?;
    let a = hop_coefficients(chain)?;
    let powers = proportional_split(&a, alpha, p_max)?;
    let uniform = vec![p_max / a.len() as f64; a.len()];
    let neg_log = |ps: &[f64]| {
        -(a.iter().zip(ps).map(|(&ai, &p)| ai * p.powf(-alpha)).sum::<f64>()).ln()
    };
    // lambda_ee = E0 / p_max with E0 = 1/P_T at the solution; P_T here
    // is the radiated budget plus whatever circuit power the caller
    // accounts for, so report the budget-normalised multiplier.
    let multiplier = 1.0 / p_max;
    Ok(AllocationResult {
        objective_before: neg_log(&uniform),
        objective_after: neg_log(&powers),
        powers_w: powers,
        multiplier,
    })
}

/// KKT stationarity residual of the BER system at a candidate point:
/// max_i |alpha c_i P_i^{-alpha-1} - lambda| / lambda with lambda fitted
/// from the first hop.
pub fn ber_kkt_residual(chain: &HopChain, powers: &[f64]) -> Result<f64, AllocationError> {
    let alpha = chain.common_alpha().ok_or(AllocationError::MixedShapes)?;
    let cs = hop_coefficients(chain)?;
    if powers.len() != cs.len() {
        return Err(AllocationError::Invalid("power vector length mismatch".to_string()));
    }
    let lambda = alpha * cs[0] * powers[0].powf(-alpha - 1.0);
    let mut worst: f64 = 0.0;
    for (c, p) in cs.iter().zip(powers) {
        let g = alpha * c * p.powf(-alpha - 1.0);
        worst = worst.max((g - lambda).abs() / lambda);
    }
    Ok(worst)
}

/// KKT residual of the EE system
/// a_j P_j^{-alpha-1} / sum_i a_i P_i^{-alpha} = 1/p_max for all j.
pub fn ee_kkt_residual(chain: &HopChain, powers: &[f64]) -> Result<f64, AllocationError> {
    let alpha = chain.common_alpha().ok_or(AllocationError::MixedShapes)?;
    let a = hop_coefficients(chain)?;
    if powers.len() != a.len() {
        return Err(AllocationError::Invalid("power vector length mismatch".to_string()));
    }
    let p_max: f64 = powers.iter().sum();
    let denom: f64 = a.iter().zip(powers).map(|(&ai, &p)| ai * p.powf(-alpha)).sum();
    let target = 1.0 / p_max;
    let mut worst: f64 = 0.0;
    for (ai, p) in a.iter().zip(powers) {
        let lhs = ai * p.powf(-alpha - 1.0) / denom;
        worst = worst.max((lhs - target).abs() / target);
    }
    Ok(worst)
}

/// Rebuild a chain with the allocated powers written back as per-hop
/// EIRPs (for reporting the exact-metric improvement).
pub fn apply_allocation(chain: &HopChain, powers_w: &[f64]) -> HopChain {
    let mut out = chain.clone();
    for (hop, &p) in out.hops.iter_mut().zip(powers_w) {
        hop.tx_power_dbm = watt_to_dbm(p);
    }
    out
}
