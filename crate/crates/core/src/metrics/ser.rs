//! Average symbol error rate of rectangular M-QAM over Weibull fading.
//!
//! The fading averages reduce to two kernels over the per-hop SNR
//! density p(g):
//!
//! - `I(C)   = ∫ Q(C sqrt(g)) p(g) dg`: a single Q moment, which is
//!   half the erfc kernel of the BER module at weight C^2/2;
//! - `I(A,B) = ∫ Q(A sqrt(g)) Q(B sqrt(g)) p(g) dg`: a double Q moment,
//!   a two-variable H function
//!
//! ```text
//! I(A,B) = (1/4π) H[x, y],  x = (A²/2) phi^{1/alpha},  y = (B²/2) phi^{1/alpha},
//! kernel  Γ(s)Γ(s+1/2)/Γ(1+s) · Γ(t)Γ(t+1/2)/Γ(1+t) · Γ(1 - (s+t)/alpha)
//! ```
//!
//! (A and B cannot both be zero.) The high-SNR residue at s + t = alpha
//! collapses the double integral onto a Meijer G function of B²/A².
//!
//! Square-QAM SER assembles from the kernels with the standard
//! rectangular decomposition: SER = 4q I(C) - 4q² I(C, C) with
//! q = 1 - 1/sqrt(M) and C = sqrt(3/(M-1)) at per-symbol SNR.

use crate::channel::{HopChain, LinkBudget, WeibullHop};
use crate::metrics::ber::{zeta, zeta_asymptotic};
use crate::metrics::{MetricError, Mode};
use crate::specfun::{bivariate_fox_h_eval, meijer_g, BivFoxHParams, BivGammaTerm, GammaTerm};

/// Single-Q kernel I(C) with C = max(A, B) when A·B = 0.
pub fn ser_kernel_single(c: f64, alpha: f64, phi: f64, mode: Mode) -> Result<f64, MetricError> {
    if !(c > 0.0) {
        return Err(MetricError::Domain(
            "SER kernel coefficients cannot both be zero".to_string(),
        ));
    }
    let w = 0.5 * c * c;
    Ok(match mode {
        Mode::Exact => 0.5 * zeta(w, alpha, phi)?,
        Mode::Asymptotic => 0.5 * zeta_asymptotic(w, alpha, phi),
    })
}

/// Double-Q kernel I(A, B), A, B > 0.
pub fn ser_kernel_double(
    a: f64,
    b: f64,
    alpha: f64,
    phi: f64,
    mode: Mode,
) -> Result<f64, MetricError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(MetricError::Domain(
            "double-Q kernel needs A > 0 and B > 0".to_string(),
        ));
    }
    match mode {
        Mode::Exact => {
            let inv_a = 1.0 / alpha;
            let params = BivFoxHParams::new(
                vec![BivGammaTerm::num(1.0, -inv_a, -inv_a)],
                vec![
                    GammaTerm::num(0.0, 1.0),
                    GammaTerm::num(0.5, 1.0),
                    GammaTerm::den(1.0, 1.0),
                ],
                vec![
                    GammaTerm::num(0.0, 1.0),
                    GammaTerm::num(0.5, 1.0),
                    GammaTerm::den(1.0, 1.0),
                ],
            )?;
            let scale = phi.powf(inv_a);
            let x = 0.5 * a * a * scale;
            let y = 0.5 * b * b * scale;
            let h = bivariate_fox_h_eval(&params, x, y, 1e-8)?;
            Ok((h.value / (4.0 * std::f64::consts::PI)).clamp(0.0, 1.0))
        }
        Mode::Asymptotic => {
            // Residue at s + t = alpha:
            // I ~ (alpha / 4π) (2/A²)^alpha phi^{-1} G^{2,2}_{3,3}[B²/A²]
            let w = (b * b) / (a * a);
            let g = meijer_g(
                2,
                2,
                &[1.0 - alpha, 0.5 - alpha, 1.0],
                &[0.0, 0.5, -alpha],
                w,
            )?;
            Ok(alpha / (4.0 * std::f64::consts::PI) * (2.0 / (a * a)).powf(alpha) / phi * g)
        }
    }
}

/// Average SER of one hop carrying square M-QAM at per-symbol SNR.
pub fn ser_hop(
    hop: &WeibullHop,
    budget: &LinkBudget,
    modulation_order: u32,
    mode: Mode,
) -> Result<f64, MetricError> {
    let phi = crate::channel::phi(hop, budget);
    ser_hop_from_params(hop.alpha, phi, modulation_order, mode)
}

/// Same, from explicit Weibull parameters.
pub fn ser_hop_from_params(
    alpha: f64,
    phi: f64,
    modulation_order: u32,
    mode: Mode,
) -> Result<f64, MetricError> {
    let m = modulation_order as f64;
    let sqrt_m = m.sqrt();
    if sqrt_m.fract() != 0.0 || modulation_order < 4 {
        return Err(MetricError::Domain(format!(
            "modulation order must be a perfect square >= 4, got {modulation_order}"
        )));
    }
    let q = 1.0 - 1.0 / sqrt_m;
    let c = (3.0 / (m - 1.0)).sqrt();
    let single = ser_kernel_single(c, alpha, phi, mode)?;
    let double = ser_kernel_double(c, c, alpha, phi, mode)?;
    Ok((4.0 * q * single - 4.0 * q * q * double).clamp(0.0, 1.0))
}

/// End-to-end SER of a regenerative chain: 1 - prod(1 - SER_i).
pub fn ser_e2e(per_hop: &[f64]) -> Result<f64, MetricError> {
    for &p in per_hop {
        if !(0.0..=1.0).contains(&p) {
            return Err(MetricError::Domain(format!(
                "per-hop SER must lie in [0, 1], got {p}"
            )));
        }
    }
    let ok: f64 = per_hop.iter().map(|&p| 1.0 - p).product();
    Ok(1.0 - ok)
}

/// Exact or asymptotic end-to-end SER of a chain.
pub fn ser_chain(
    chain: &HopChain,
    modulation_order: u32,
    mode: Mode,
) -> Result<f64, MetricError> {
    let per_hop: Result<Vec<f64>, _> = chain
        .hops
        .iter()
        .map(|h| ser_hop(h, &chain.budget, modulation_order, mode))
        .collect();
    ser_e2e(&per_hop?)
}

/// Hand value of the high-SNR double-Q constant at alpha = 1, A = B:
/// (1/phi A²)(1/4 - 1/2π); exposed for the oracle tests.
pub fn double_q_asymptote_reference(a: f64, phi: f64) -> f64 {
    (0.25 - 0.5 / std::f64::consts::PI) / (phi * a * a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use crate::specfun::erfc;

    fn q_func(x: f64) -> f64 {
        0.5 * erfc(x / std::f64::consts::SQRT_2)
    }

    /// Quadrature oracle of the defining integral in the Q-argument
    /// variable v = min(A,B) sqrt(g); the domain truncates where the
    /// slower Q factor vanishes, which keeps the integrand resolved at
    /// any SNR.
    fn kernel_quadrature(a: f64, b: f64, alpha: f64, phi: f64) -> f64 {
        let m = a.min(b);
        let (v, _) = quad::integrate(
            |v: f64| {
                if v <= 0.0 {
                    return 0.0;
                }
                let g = (v / m) * (v / m);
                let pdf = alpha / phi * g.powf(alpha - 1.0) * (-g.powf(alpha) / phi).exp();
                q_func(a * g.sqrt()) * q_func(b * g.sqrt()) * pdf * 2.0 * v / (m * m)
            },
            0.0,
            39.0,
            1e-14,
        );
        v
    }

    #[test]
    fn single_q_kernel_rayleigh() {
        // alpha = 1 reduces to the Rayleigh Q moment; compare with
        // quadrature of the defining integral.
        let (c, phi) = (1.3, 25.0);
        let got = ser_kernel_single(c, 1.0, phi, Mode::Exact).unwrap();
        let want = {
            let (v, _) = quad::integrate_to_inf(
                |g: f64| q_func(c * g.sqrt()) * (-g / phi).exp() / phi,
                0.0,
                1e-13,
            );
            v
        };
        assert!((got - want).abs() < 1e-6 * want, "got {got:.10e} want {want:.10e}");
    }

    #[test]
    fn double_q_kernel_matches_quadrature() {
        for &(a, b, alpha, phi) in &[
            (1.0, 1.0, 1.0, 20.0),
            (0.8, 1.7, 1.0, 5.0),
            (1.0, 1.0, 0.5, 9.0),
            (0.6, 0.6, 2.0, 300.0),
            (1.2, 0.4, 1.5, 40.0),
        ] {
            let got = ser_kernel_double(a, b, alpha, phi, Mode::Exact).unwrap();
            let want = kernel_quadrature(a, b, alpha, phi);
            assert!(
                (got - want).abs() <= 2e-5 * want.max(1e-12),
                "A={a} B={b} alpha={alpha} phi={phi}: got {got:.8e} want {want:.8e}"
            );
        }
    }

    #[test]
    fn double_q_asymptote_alpha_one_reference() {
        // At alpha = 1, A = B the residue constant is (1/4 - 1/2π)/(phi A²);
        // the Meijer G route must reproduce it, and quadrature must
        // approach it at high SNR.
        let (a, phi) = (1.0, 1e4);
        let asym = ser_kernel_double(a, a, 1.0, phi, Mode::Asymptotic).unwrap();
        let reference = double_q_asymptote_reference(a, phi);
        assert!(
            (asym - reference).abs() < 1e-8 * reference,
            "Meijer route {asym:.10e} vs hand value {reference:.10e}"
        );
        let exact = kernel_quadrature(a, a, 1.0, phi);
        assert!(
            (asym - exact).abs() < 1e-3 * exact,
            "asymptote {asym:.6e} vs quadrature {exact:.6e}"
        );
    }

    #[test]
    fn double_q_asymptote_general_alpha_vs_quadrature() {
        // High-SNR agreement of the Meijer G asymptote for a non-unit
        // shape and A != B.
        let (a, b, alpha) = (1.0, 0.7, 1.5);
        let phi = 1e5;
        let asym = ser_kernel_double(a, b, alpha, phi, Mode::Asymptotic).unwrap();
        let exact = kernel_quadrature(a, b, alpha, phi);
        assert!(
            (asym - exact).abs() < 1e-3 * exact,
            "asymptote {asym:.6e} vs quadrature {exact:.6e}"
        );
    }

    /// Outcome record for the alternative high-SNR form sometimes
    /// quoted for the double-Q kernel,
    /// (-alpha/(8 phi pi^2)) (2/A)^alpha G^{2,2}_{3,3}[B/A | a, 1/2+a, 1; 0, 1/2, 1+a]:
    /// its pole families admit no separating contour for alpha >= 1/2
    /// (left bound 0, right bound 1/2 - alpha), and its sign is negative
    /// where the kernel is manifestly positive. The residue-derived form
    /// used by this module is the one quadrature confirms.
    #[test]
    fn alternative_asymptote_form_rejected_by_contour() {
        let alpha = 1.0f64;
        let printed = crate::specfun::FoxHParams::new(
            2,
            2,
            vec![(alpha, 1.0), (0.5 + alpha, 1.0), (1.0, 1.0)],
            vec![(0.0, 1.0), (0.5, 1.0), (1.0 + alpha, 1.0)],
        )
        .unwrap();
        match crate::specfun::fox_h(&printed, 1.0) {
            Err(crate::specfun::FoxHError::ContourSeparation { left, right }) => {
                assert!(left >= right, "families overlap: {left} vs {right}");
            }
            other => panic!("expected a contour separation error, got {other:?}"),
        }
        // The derived form evaluates fine at the same shape and matches
        // quadrature (asserted in the asymptote tests above).
        assert!(ser_kernel_double(1.0, 1.0, alpha, 1e4, Mode::Asymptotic).is_ok());
    }

    #[test]
    fn kernels_reject_degenerate_coefficients() {
        assert!(ser_kernel_single(0.0, 1.0, 1.0, Mode::Exact).is_err());
        assert!(ser_kernel_double(0.0, 1.0, 1.0, 1.0, Mode::Exact).is_err());
    }

    #[test]
    fn ser_hop_sane_range_and_order_effect() {
        // SER grows with modulation order at fixed SNR; 4->16 gap is the
        // largest among successive orders.
        let (alpha, phi) = (1.0, 180.0);
        let s4 = ser_hop_from_params(alpha, phi, 4, Mode::Exact).unwrap();
        let s16 = ser_hop_from_params(alpha, phi, 16, Mode::Exact).unwrap();
        let s64 = ser_hop_from_params(alpha, phi, 64, Mode::Exact).unwrap();
        assert!(s4 < s16 && s16 < s64);
        assert!(
            (s16 / s4) > (s64 / s16),
            "gap should shrink with order: {s4:.3e}, {s16:.3e}, {s64:.3e}"
        );
    }

    #[test]
    fn ser_hop_matches_full_quadrature() {
        // Assembled SER against quadrature of the instantaneous
        // rectangular-QAM SER over the fading density.
        for &(m, alpha, phi) in &[(4u32, 1.0, 30.0), (16, 0.75, 400.0)] {
            let got = ser_hop_from_params(alpha, phi, m, Mode::Exact).unwrap();
            let q = 1.0 - 1.0 / (m as f64).sqrt();
            let c = (3.0 / (m as f64 - 1.0)).sqrt();
            let (want, _) = quad::integrate_to_inf(
                |u: f64| {
                    let g = (phi * u).powf(1.0 / alpha);
                    let qq = q_func(c * g.sqrt());
                    (4.0 * q * qq - 4.0 * q * q * qq * qq) * (-u).exp()
                },
                0.0,
                1e-13,
            );
            assert!(
                (got - want).abs() < 2e-5 * want,
                "M={m}: got {got:.8e} want {want:.8e}"
            );
        }
    }

    #[test]
    fn e2e_combining() {
        let v = ser_e2e(&[0.1, 0.2]).unwrap();
        assert!((v - 0.28).abs() < 1e-15);
        assert_eq!(ser_e2e(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(ser_e2e(&[1.2]).is_err());
        // Never exceeds the union bound.
        let hops = [0.05, 0.1, 0.3];
        let v = ser_e2e(&hops).unwrap();
        assert!(v <= hops.iter().sum::<f64>() && v <= 1.0);
    }
}
