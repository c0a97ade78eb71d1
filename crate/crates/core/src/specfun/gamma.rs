//! Gamma-family special functions: complex gamma and log-gamma, digamma,
//! the upper incomplete gamma function, and the complementary error
//! function.
//!
//! The log-gamma implementation is the workhorse of the Mellin–Barnes
//! contour evaluators: every integrand is assembled as `exp(sum of
//! complex log-gammas)`, so branch offsets of individual terms are
//! irrelevant and only pointwise accuracy matters.

use num_complex::Complex64;
use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_TWO_PI_HALF: f64 = 0.918_938_533_204_672_7; // ln(2*pi)/2

/// Stirling-series coefficients B_{2n} / (2n (2n-1)) for n = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Minimum real part for which the Stirling series is applied directly.
const STIRLING_SHIFT: f64 = 9.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GammaError {
    /// Gamma evaluated at a pole (a non-positive integer).
    #[error("gamma pole at z = {0}")]
    Pole(f64),
    /// Argument outside the function's domain.
    #[error("argument out of domain: {0}")]
    Domain(String),
}

/// Complex log-gamma, accurate pointwise to ~1e-14 relative.
///
/// The branch is unspecified (offsets of 2*pi*i may appear); callers that
/// exponentiate the result are unaffected. Poles map to a value with
/// `+inf` real part, so `exp` of a pole in a denominator flushes to zero.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re.is_nan() || z.im.is_nan() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    // Shift the argument right until the Stirling series converges fast.
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < STIRLING_SHIFT {
        if w.norm_sqr() == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        shift += w.ln();
        w += 1.0;
    }
    let mut series = Complex64::new(0.0, 0.0);
    let w2 = w * w;
    let mut power = w;
    for c in STIRLING {
        series += c / power;
        power *= w2;
    }
    (w - 0.5) * w.ln() - w + LN_TWO_PI_HALF + series - shift
}

/// Complex gamma function.
///
/// Relative error is below 1e-12 for |z| <= 50 away from the poles.
/// Non-positive integer arguments are rejected.
pub fn complex_gamma(z: Complex64) -> Result<Complex64, GammaError> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(GammaError::Pole(z.re));
    }
    if z.re < 0.5 {
        // Reflection keeps the Stirling path away from the left half-plane.
        let pi = std::f64::consts::PI;
        let s = (pi * z).sin();
        if s.norm_sqr() == 0.0 {
            return Err(GammaError::Pole(z.re));
        }
        return Ok(pi / (s * complex_gamma(Complex64::new(1.0, 0.0) - z)?));
    }
    Ok(ln_gamma_complex(z).exp())
}

/// Real log-gamma for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    ln_gamma_complex(Complex64::new(x, 0.0)).re
}

/// Real gamma for x > 0.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Digamma function for x > 0, absolute error below 1e-12.
pub fn digamma(x: f64) -> Result<f64, GammaError> {
    if !(x > 0.0) {
        return Err(GammaError::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut w = x;
    let mut acc = 0.0;
    while w < STIRLING_SHIFT {
        acc -= 1.0 / w;
        w += 1.0;
    }
    // psi(w) ~ ln w - 1/(2w) - sum B_{2n} / (2n w^{2n})
    let inv2 = 1.0 / (w * w);
    // B_{2n}/(2n) for n = 1..7
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let mut series = 0.0;
    let mut p = inv2;
    for c in coeffs {
        series += c * p;
        p *= inv2;
    }
    Ok(acc + w.ln() - 0.5 / w - series)
}

/// Upper incomplete gamma function Gamma(s, x) for s > 0, x >= 0.
///
/// Series for the lower function when x < s + 1, Lentz continued fraction
/// otherwise; relative error ~1e-13.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64, GammaError> {
    if !(s > 0.0) {
        return Err(GammaError::Domain(format!(
            "upper_incomplete_gamma requires s > 0, got {s}"
        )));
    }
    if !(x >= 0.0) {
        return Err(GammaError::Domain(format!(
            "upper_incomplete_gamma requires x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(gamma(s));
    }
    let ln_prefix = s * x.ln() - x - ln_gamma(s);
    if x < s + 1.0 {
        // Lower series: gamma(s,x) = x^s e^-x sum x^k / (s (s+1) ... (s+k))
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut k = 1.0;
        while term.abs() > sum.abs() * 1e-17 && k < 10_000.0 {
            term *= x / (s + k);
            sum += term;
            k += 1.0;
        }
        let p = ln_prefix.exp() * sum; // regularized lower incomplete gamma
        Ok((1.0 - p).max(0.0) * gamma(s))
    } else {
        // Continued fraction for the regularized upper function.
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        Ok(ln_prefix.exp() * h * gamma(s))
    }
}

/// Complementary error function.
///
/// Confluent series below the switch point, Lentz continued fraction
/// above it; the switch at x = 3 keeps both branches at ~1e-15 relative.
/// Implemented directly so the Fox-H representation of erfc can be tested
/// against it without circularity.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x == 0.0 {
        return 1.0;
    }
    let sqrt_pi = std::f64::consts::PI.sqrt();
    if x < 3.0 {
        // erf(x) = (2/sqrt(pi)) x e^{-x^2} sum (2x^2)^k / (1*3*...*(2k+1))
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = term;
        let mut k = 1.0;
        while term > sum * 1e-18 && k < 500.0 {
            term *= 2.0 * x2 / (2.0 * k + 1.0);
            sum += term;
            k += 1.0;
        }
        1.0 - (2.0 / sqrt_pi) * x * (-x2).exp() * sum
    } else {
        // erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + 1/2/(x + 2/2/(x + ...)))
        let tiny = 1e-300;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / x;
        let mut h = d;
        // partial numerators k/2, constant partial denominator x
        for i in 1..500 {
            let an = i as f64 / 2.0;
            let b = x;
            d = b + an * d;
            if d.abs() < tiny {
                d = tiny;
            }
            d = 1.0 / d;
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        (-x * x).exp() / sqrt_pi * h
    }
}
