//! Average bit error rate: per hop (exact, asymptotic, outdated CSI,
//! beamforming) and end to end across decode-and-forward relays.
//!
//! The exact per-hop kernel is
//!
//! ```text
//! zeta(w) = E[erfc(sqrt(w * gamma))]
//!         = (1/sqrt(pi)) H^{2,1}_{2,2}[ w phi^{1/alpha} | (0,1/alpha),(1,1); (0,1),(1/2,1) ]
//! ```
//!
//! obtained by a Mellin transform of erfc against the Weibull SNR
//! density. Its high-SNR residue is
//! `Gamma(alpha + 1/2) w^{-alpha} / (sqrt(pi) phi)`, which also fixes
//! the per-hop diversity order at alpha.

use log::warn;

use crate::channel::{avg_snr_linear, HopChain, LinkBudget, WeibullHop};
use crate::metrics::qam::QamCoefficients;
use crate::metrics::{MetricError, Mode};
use crate::quad;
use crate::specfun::{
    bivariate_fox_h_eval, erfc, fox_h, gamma, BivFoxHParams, BivGammaTerm, FoxHParams, GammaTerm,
};

/// Exact kernel E[erfc(sqrt(w g))] for Weibull SNR with shape `alpha`
/// and scale `phi`.
pub fn zeta(w: f64, alpha: f64, phi: f64) -> Result<f64, MetricError> {
    if !(w > 0.0 && alpha > 0.0 && phi > 0.0) {
        return Err(MetricError::Domain(format!(
            "zeta needs positive arguments, got w={w}, alpha={alpha}, phi={phi}"
        )));
    }
    let params = FoxHParams::new(
        2,
        1,
        vec![(0.0, 1.0 / alpha), (1.0, 1.0)],
        vec![(0.0, 1.0), (0.5, 1.0)],
    )?;
    let z = w * phi.powf(1.0 / alpha);
    let h = fox_h(&params, z)?;
    Ok((h / std::f64::consts::PI.sqrt()).clamp(0.0, 1.0))
}

/// High-SNR residue of the kernel.
pub fn zeta_asymptotic(w: f64, alpha: f64, phi: f64) -> f64 {
    gamma(alpha + 0.5) * w.powf(-alpha) / (std::f64::consts::PI.sqrt() * phi)
}

/// Average BER of one hop.
pub fn ber_hop(
    hop: &WeibullHop,
    budget: &LinkBudget,
    coeffs: &QamCoefficients,
    mode: Mode,
) -> Result<f64, MetricError> {
    let phi = crate::channel::phi(hop, budget);
    ber_hop_from_params(hop.alpha, phi, coeffs, mode)
}

/// Same, from explicit Weibull parameters.
pub fn ber_hop_from_params(
    alpha: f64,
    phi: f64,
    coeffs: &QamCoefficients,
    mode: Mode,
) -> Result<f64, MetricError> {
    let mut sum = 0.0;
    for (omega, weight) in coeffs.terms() {
        let z = match mode {
            Mode::Exact => zeta(omega, alpha, phi)?,
            Mode::Asymptotic => zeta_asymptotic(omega, alpha, phi),
        };
        sum += weight * z;
    }
    Ok((coeffs.norm() * sum).clamp(0.0, 0.5))
}

/// End-to-end BER of a regenerative chain from per-hop averages:
/// sum_i p_i prod_{j>i} (1 - 2 p_j).
pub fn ber_e2e(per_hop: &[f64]) -> Result<f64, MetricError> {
    for &p in per_hop {
        if !(0.0..=0.5).contains(&p) {
            return Err(MetricError::Domain(format!(
                "per-hop BER must lie in [0, 0.5], got {p}"
            )));
        }
    }
    let mut total = 0.0;
    for (i, &p) in per_hop.iter().enumerate() {
        let tail: f64 = per_hop[i + 1..].iter().map(|&q| 1.0 - 2.0 * q).product();
        total += p * tail;
    }
    Ok(total.clamp(0.0, 0.5))
}

/// Exact end-to-end BER of a chain.
pub fn ber_chain(
    chain: &HopChain,
    coeffs: &QamCoefficients,
    mode: Mode,
) -> Result<f64, MetricError> {
    let per_hop: Result<Vec<f64>, _> = chain
        .hops
        .iter()
        .map(|h| ber_hop(h, &chain.budget, coeffs, mode))
        .collect();
    ber_e2e(&per_hop?)
}

/// Diversity order of the end-to-end system: min over hops of alpha.
pub fn diversity_order(chain: &HopChain) -> f64 {
    chain.hops.iter().map(|h| h.alpha).fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// Outdated CSI
// ---------------------------------------------------------------------------

/// Density of the ratio G = |g|^2 / |g_est|^2 of two Weibull powers with
/// correlation `rho`.
pub fn ratio_pdf(z: f64, alpha: f64, rho: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let za = z.powf(alpha);
    let denom = (za * za + (2.0 - 4.0 * rho) * za + 1.0).powf(1.5);
    alpha * (1.0 - rho) * z.powf(alpha - 1.0) * (za + 1.0) / denom
}

/// CDF of the outdated-CSI SNR at scale `snr_scale` (the value the ratio
/// is multiplied by).
pub fn outdated_snr_cdf(g: f64, snr_scale: f64, alpha: f64, rho: f64) -> f64 {
    if g <= 0.0 {
        return 0.0;
    }
    let ga = g.powf(alpha);
    let sa = snr_scale.powf(alpha);
    let root = (ga * ga + (2.0 - 4.0 * rho) * sa * ga + sa * sa).sqrt();
    0.5 + 0.5 * (ga - sa) / root
}

/// Kernel E[erfc(sqrt(w * snr_scale * G))] under outdated CSI, via the
/// two-variable H representation
///
/// ```text
/// zeta_out = ((1-rho)/sqrt(pi)) H[ w*scale, -1/rho ] with kernel
///            Γ(s)Γ(s+1/2)/Γ(1+s) · Γ(1 + t - s/a) Γ(1 + t + s/a) · Γ(-t)/Γ(1+t)
/// ```
///
/// whose inner residue series is the Gauss series in rho. The rho -> 0
/// limit keeps only the series' first term and reduces to a single
/// contour integral.
pub fn zeta_outdated(w: f64, snr_scale: f64, alpha: f64, rho: f64) -> Result<f64, MetricError> {
    if !(w > 0.0 && snr_scale > 0.0 && alpha > 0.0) {
        return Err(MetricError::Domain(format!(
            "zeta_outdated needs positive arguments, got w={w}, scale={snr_scale}, alpha={alpha}"
        )));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(MetricError::Domain(format!(
            "correlation must lie in [0, 1), got {rho}"
        )));
    }
    let x = w * snr_scale;
    let inv_a = 1.0 / alpha;
    if rho < 1e-12 {
        // Independent estimate: only the k = 0 term of the series,
        // a single-variable H in x.
        let params = FoxHParams::new(
            3,
            1,
            vec![(0.0, inv_a), (1.0, 1.0)],
            vec![(0.0, 1.0), (0.5, 1.0), (1.0, inv_a)],
        )?;
        let h = fox_h(&params, x)?;
        return Ok((h / std::f64::consts::PI.sqrt()).clamp(0.0, 1.0));
    }
    let params = BivFoxHParams::new(
        vec![
            BivGammaTerm::num(1.0, -inv_a, 1.0),
            BivGammaTerm::num(1.0, inv_a, 1.0),
        ],
        vec![
            GammaTerm::num(0.0, 1.0),
            GammaTerm::num(0.5, 1.0),
            GammaTerm::den(1.0, 1.0),
        ],
        vec![GammaTerm::num(0.0, -1.0), GammaTerm::den(1.0, 1.0)],
    )?;
    let h = bivariate_fox_h_eval(&params, x, -1.0 / rho, 1e-8)?;
    let value = (1.0 - rho) / std::f64::consts::PI.sqrt() * h.value;
    Ok(value.clamp(0.0, 1.0))
}

/// Average BER of one hop whose receiver equalises with a stale channel
/// estimate of correlation `rho`.
pub fn ber_hop_outdated_csi(
    hop: &WeibullHop,
    budget: &LinkBudget,
    coeffs: &QamCoefficients,
    rho: f64,
) -> Result<f64, MetricError> {
    let scale = avg_snr_linear(hop, budget) * hop.omega * hop.omega;
    let mut sum = 0.0;
    for (omega, weight) in coeffs.terms() {
        sum += weight * zeta_outdated(omega, scale, hop.alpha, rho)?;
    }
    Ok((coeffs.norm() * sum).clamp(0.0, 0.5))
}

// ---------------------------------------------------------------------------
// Beamforming
// ---------------------------------------------------------------------------

/// Continuous part of the Marchenko–Pastur density at aspect ratio
/// c = r/t and scale `s` (unit SNR normalisation).
pub fn mp_density(x: f64, c: f64, s: f64) -> f64 {
    let a = (1.0 - c.sqrt()).powi(2);
    let b = (1.0 + c.sqrt()).powi(2);
    if x <= a || x >= b {
        return 0.0;
    }
    ((b - x) * (x - a)).sqrt() / (2.0 * std::f64::consts::PI * c * s * s * x)
}

/// Spectral average of erfc(sqrt(w x)) over the Marchenko–Pastur bulk
/// scaled to mean SNR `snr`:
/// J = ∫_{a'}^{b'} sqrt((1 - x/b')(x/a' - 1)) erfc(sqrt(w x)) / x dx,
/// a' = a snr, b' = b snr, via the substitution x = a' + (b'-a') sin^2 θ
/// that removes the endpoint square roots.
pub fn j_integral(a_prime: f64, b_prime: f64, w: f64) -> f64 {
    let width = b_prime - a_prime;
    let scale = 2.0 * width * width / (a_prime * b_prime).sqrt();
    let (v, _err) = quad::integrate(
        |theta: f64| {
            let s2 = theta.sin().powi(2);
            let x = a_prime + width * s2;
            s2 * theta.cos().powi(2) * erfc((w * x).sqrt()) / x
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        1e-12,
    );
    scale * v
}

/// Average BER of one hop using SVD beamforming with `t` transmit and
/// `r < t` receive antennas; the per-stream SNR density follows the
/// Marchenko–Pastur law with aspect ratio c = r/t.
pub fn ber_hop_beamforming(
    hop: &WeibullHop,
    budget: &LinkBudget,
    coeffs: &QamCoefficients,
    t: u32,
    r: u32,
    s: f64,
) -> Result<f64, MetricError> {
    if r >= t || r == 0 {
        return Err(MetricError::Domain(format!(
            "beamforming needs 1 <= r < t, got t={t}, r={r}"
        )));
    }
    if !(s > 0.0) {
        return Err(MetricError::Domain(format!("spectral scale must be positive, got {s}")));
    }
    let c = r as f64 / t as f64;
    let a = (1.0 - c.sqrt()).powi(2);
    let b = (1.0 + c.sqrt()).powi(2);
    // Normalisation self-check of the density actually used.
    let (norm, _) = quad::integrate(|x| mp_density(x, c, s), a, b, 1e-10);
    if (norm - 1.0).abs() > 1e-6 {
        warn!(
            "Marchenko–Pastur density with scale s = {s} integrates to {norm:.6}; \
             the spectral scale factor is ambiguous, results are scaled accordingly"
        );
    }
    let snr = avg_snr_linear(hop, budget) * hop.omega * hop.omega;
    let prefactor = (a * b).sqrt() / (2.0 * std::f64::consts::PI * c * s * s);
    let mut sum = 0.0;
    for (omega, weight) in coeffs.terms() {
        sum += weight * prefactor * j_integral(a * snr, b * snr, omega);
    }
    Ok((coeffs.norm() * sum).clamp(0.0, 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::qam::SnrConvention;

    /// Quadrature oracle for the kernel in the erfc-argument variable
    /// v = sqrt(w g): the domain truncates where erfc vanishes and the
    /// integrand stays resolved at any SNR.
    fn zeta_quadrature(w: f64, alpha: f64, phi: f64) -> f64 {
        let (v, _) = quad::integrate(
            |v: f64| {
                if v <= 0.0 {
                    return 0.0;
                }
                let g = v * v / w;
                let pdf = alpha / phi * g.powf(alpha - 1.0) * (-g.powf(alpha) / phi).exp();
                erfc(v) * pdf * 2.0 * v / w
            },
            0.0,
            28.0,
            1e-14,
        );
        v
    }

    #[test]
    fn zeta_rayleigh_closed_form() {
        // alpha = 1: E[erfc(sqrt(w g))] = 1 - sqrt(w phi / (1 + w phi)).
        let (w, phi) = (1.0f64, 10.0f64);
        let want = 1.0 - (w * phi / (1.0 + w * phi)).sqrt();
        assert!((want - 0.04653741075440775).abs() < 1e-14);
        let got = zeta(w, 1.0, phi).unwrap();
        assert!((got - want).abs() < 1e-9 * want, "got {got:.12e}, want {want:.12e}");
        let q = zeta_quadrature(w, 1.0, phi);
        assert!((got - q).abs() < 1e-9, "quadrature {q:.12e}");
    }

    #[test]
    fn zeta_matches_quadrature_general_shapes() {
        for &(w, alpha, phi) in &[
            (0.4, 0.5, 3.0),
            (1.0, 2.0, 1e4),
            (3.6, 1.5, 50.0),
            (10.0, 3.0, 2.0),
            (0.05, 0.75, 0.2),
        ] {
            let got = zeta(w, alpha, phi).unwrap();
            let want = zeta_quadrature(w, alpha, phi);
            assert!(
                (got - want).abs() <= 1e-6 * want.max(1e-12),
                "w={w}, alpha={alpha}, phi={phi}: got {got:.10e}, want {want:.10e}"
            );
        }
    }

    #[test]
    fn zeta_asymptote_tightens() {
        let (w, alpha) = (0.4, 1.5);
        let mut prev_err = f64::INFINITY;
        for phi in [1e2, 1e3, 1e4, 1e5] {
            let exact = zeta(w, alpha, phi).unwrap();
            let asym = zeta_asymptotic(w, alpha, phi);
            let rel = (asym - exact).abs() / exact;
            assert!(rel < prev_err, "phi={phi}");
            prev_err = rel;
        }
        assert!(prev_err < 1e-3);
    }

    #[test]
    fn ber_e2e_recursion_values() {
        assert_eq!(ber_e2e(&[0.37]).unwrap(), 0.37);
        let v = ber_e2e(&[0.1, 0.1]).unwrap();
        assert!((v - 0.18).abs() < 1e-15);
        assert_eq!(ber_e2e(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(ber_e2e(&[0.6]).is_err());
        assert!(ber_e2e(&[-0.1]).is_err());
    }

    #[test]
    fn ber_e2e_stays_in_range() {
        // Maps [0, 0.5]^N into [0, 0.5].
        let mut state = 88172645463325252u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let n = 1 + (rng() * 6.0) as usize;
            let ps: Vec<f64> = (0..n).map(|_| 0.5 * rng()).collect();
            let v = ber_e2e(&ps).unwrap();
            assert!((0.0..=0.5).contains(&v), "{ps:?} -> {v}");
        }
    }

    #[test]
    fn diversity_order_is_min_shape() {
        let budget = crate::channel::LinkBudget::default();
        let mk = |beta: f64| WeibullHop::from_beta(beta, 1.0, 100.0, 1e6, 20.0).unwrap();
        let chain = HopChain::new(vec![mk(2.0), mk(4.0), mk(6.0)], budget).unwrap();
        assert_eq!(diversity_order(&chain), 1.0);
        let same = HopChain::new(vec![mk(3.0); 4], budget).unwrap();
        assert_eq!(diversity_order(&same), 1.5);
    }

    #[test]
    fn ratio_pdf_normalises_and_matches_cdf() {
        for &(alpha, rho) in &[(1.0, 0.0), (1.0, 0.75), (0.5, 0.95), (2.0, 0.3)] {
            let (norm, _) = quad::integrate_to_inf(|z| ratio_pdf(z, alpha, rho), 0.0, 1e-11);
            assert!((norm - 1.0).abs() < 1e-8, "alpha={alpha}, rho={rho}: norm={norm}");
            // CDF at the median scale: symmetric law, F(scale) = 1/2.
            assert!((outdated_snr_cdf(7.7, 7.7, alpha, rho) - 0.5).abs() < 1e-12);
            // CDF derivative consistency at one point.
            let g = 1.7;
            let h = 1e-5;
            let fd = (outdated_snr_cdf(g + h, 1.0, alpha, rho)
                - outdated_snr_cdf(g - h, 1.0, alpha, rho))
                / (2.0 * h);
            assert!(
                (fd - ratio_pdf(g, alpha, rho)).abs() < 1e-6,
                "alpha={alpha}, rho={rho}"
            );
        }
    }

    /// Quadrature oracle for the outdated kernel over the explicit ratio
    /// density.
    fn zeta_outdated_quadrature(w: f64, scale: f64, alpha: f64, rho: f64) -> f64 {
        let (v, _) = quad::integrate_to_inf(
            |z: f64| erfc((w * scale * z).sqrt()) * ratio_pdf(z, alpha, rho),
            0.0,
            1e-12,
        );
        v
    }

    #[test]
    fn zeta_outdated_matches_quadrature() {
        for &(w, scale, alpha, rho) in &[
            (0.4, 30.0, 1.0, 0.95),
            (1.0, 5.0, 1.0, 0.5),
            (0.4, 100.0, 0.5, 0.9),
            (2.0, 12.0, 2.0, 0.75),
        ] {
            let got = zeta_outdated(w, scale, alpha, rho).unwrap();
            let want = zeta_outdated_quadrature(w, scale, alpha, rho);
            assert!(
                (got - want).abs() <= 1e-5 * want.max(1e-10),
                "w={w} scale={scale} alpha={alpha} rho={rho}: got {got:.8e} want {want:.8e}"
            );
        }
    }

    #[test]
    fn zeta_outdated_low_rho_limit() {
        // The bivariate route at small rho agrees with the independent
        // single-contour limit and with quadrature.
        let (w, scale, alpha) = (0.7, 20.0, 1.0);
        let limit = zeta_outdated(w, scale, alpha, 0.0).unwrap();
        let small = zeta_outdated(w, scale, alpha, 1e-6).unwrap();
        let quad_val = zeta_outdated_quadrature(w, scale, alpha, 1e-6);
        assert!((small - limit).abs() < 1e-4 * limit, "{small:.8e} vs {limit:.8e}");
        assert!((small - quad_val).abs() < 1e-4 * quad_val);
    }

    #[test]
    fn mp_density_normalises() {
        for c in [0.25f64, 0.5, 0.9] {
            let a = (1.0 - c.sqrt()).powi(2);
            let b = (1.0 + c.sqrt()).powi(2);
            let (norm, _) = quad::integrate(|x| mp_density(x, c, 1.0), a, b, 1e-10);
            assert!((norm - 1.0).abs() < 1e-6, "c={c}: {norm}");
        }
    }

    #[test]
    fn j_integral_vanishes_at_high_snr() {
        let j = j_integral(1e6, 4e6, 1.0);
        assert!(j.abs() < 1e-200, "got {j}");
    }

    #[test]
    fn beamformed_ber_limits() {
        let coeffs = QamCoefficients::new(4, SnrConvention::PerBit).unwrap();
        let budget = crate::channel::LinkBudget::default();
        let mk = |eirp: f64| WeibullHop::from_beta(2.0, 1.0, 100.0, 200e6, eirp).unwrap();
        // Very low SNR: every erfc ~ 1, BER ~ awgn_ber(0) = 1/2.
        let low = ber_hop_beamforming(&mk(-80.0), &budget, &coeffs, 16, 8, 1.0).unwrap();
        assert!((low - 0.5).abs() < 1e-3, "got {low}");
        // High SNR: vanishes.
        let high = ber_hop_beamforming(&mk(60.0), &budget, &coeffs, 16, 8, 1.0).unwrap();
        assert!(high < 1e-12, "got {high}");
        // Beamforming beats the single-antenna hop at equal EIRP.
        for eirp in [0.0, 10.0, 20.0, 30.0] {
            let hop = mk(eirp);
            let beam = ber_hop_beamforming(&hop, &budget, &coeffs, 16, 8, 1.0).unwrap();
            let single = ber_hop(&hop, &budget, &coeffs, Mode::Exact).unwrap();
            assert!(beam < single, "EIRP {eirp}: beam {beam:.3e} vs single {single:.3e}");
        }
    }

    #[test]
    fn beamforming_preconditions() {
        let coeffs = QamCoefficients::new(4, SnrConvention::PerBit).unwrap();
        let budget = crate::channel::LinkBudget::default();
        let hop = WeibullHop::from_beta(2.0, 1.0, 100.0, 200e6, 20.0).unwrap();
        assert!(ber_hop_beamforming(&hop, &budget, &coeffs, 8, 8, 1.0).is_err());
        assert!(ber_hop_beamforming(&hop, &budget, &coeffs, 8, 0, 1.0).is_err());
    }
}
