//! Independent Monte-Carlo oracle.
//!
//! Samples Weibull fading (including correlated pairs for outdated CSI),
//! runs per-hop decode-and-forward cascades, and estimates every metric
//! empirically with confidence intervals.
//!
//! Determinism contract: a run is a pure function of (seed, trials,
//! worker count, scenario). Trials are split across `workers` streams,
//! stream `w` seeded with `seed + w`;每 worker accumulates with
//! compensated summation and workers are pooled in index order, so the
//! result does not depend on thread scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::HopChain;
use crate::metrics::bler::{bler_conditional_linearized, bler_conditional_true_q, BlerParams};
use crate::metrics::ee::PowerInventory;
use crate::metrics::qam::{GrayQam, QamCoefficients, SnrConvention};
use crate::metrics::MetricError;
use crate::specfun::erfc;

/// Monte-Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Confidence half-width multiplier (default 3 sigma).
    pub confidence_sigma: f64,
    /// Number of deterministic worker streams.
    pub workers: u32,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { trials: 1_000_000, seed: 1, confidence_sigma: 3.0, workers: 8 }
    }
}

impl McConfig {
    pub fn with_trials(trials: u64, seed: u64) -> Self {
        Self { trials, seed, ..Default::default() }
    }
}

/// An empirical estimate with its confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub half_width: f64,
    pub trials_used: u64,
    /// Set when the half-width is at least as large as the mean, i.e.
    /// the trial budget cannot resolve the metric.
    pub underresolved: bool,
}

/// How the BER/SER cascade is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorRateMode {
    /// Transmit actual Gray-QAM symbols with AWGN and minimum-distance
    /// detection, regenerating at each relay.
    Symbol,
    /// Evaluate the exact AWGN error rate conditioned on each fading
    /// draw and combine across hops analytically (same estimand as the
    /// closed forms, free of mapping noise).
    #[default]
    AnalyticConditional,
}

/// Which conditional kernel the BLER simulation averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlerKernel {
    /// The normal-approximation Q expression.
    #[default]
    TrueQ,
    /// Its linearised surrogate (matches the closed form's estimand).
    Linearized,
}

/// Metric selector for [`mc_metric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricSpec<'a> {
    Outage { gamma_th: f64 },
    Ber { modulation: u32, convention: SnrConvention, mode: ErrorRateMode },
    BerOutdated { modulation: u32, convention: SnrConvention, rho: f64 },
    Ser { modulation: u32, mode: ErrorRateMode },
    Bler { params: &'a BlerParams, kernel: BlerKernel },
    Capacity,
    EnergyEfficiency { inventory: &'a PowerInventory },
}

/// Inverse-transform Weibull SNR draw: g = (phi * (-ln U))^{1/alpha}.
pub fn sample_snr<R: Rng>(alpha: f64, phi: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    (phi * (-u.ln())).powf(1.0 / alpha)
}

/// Correlated pair of Weibull SNRs built from two complex Gaussians
/// whose squared magnitudes have correlation `rho`, power-transformed to
/// the Weibull law; returns (true, estimated).
pub fn sample_correlated_snr_pair<R: Rng>(
    alpha: f64,
    phi: f64,
    rho: f64,
    rng: &mut R,
) -> (f64, f64) {
    let ((w1, _), (w2, _)) = correlated_powers_with_phase(rho, rng);
    (
        (phi * w1).powf(1.0 / alpha),
        (phi * w2).powf(1.0 / alpha),
    )
}

/// Two unit-mean exponential powers with correlation `rho`, along with
/// the phases of the underlying complex Gaussians.
fn correlated_powers_with_phase<R: Rng>(rho: f64, rng: &mut R) -> ((f64, f64), (f64, f64)) {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let h1 = (
        scale * rng.sample::<f64, _>(StandardNormal),
        scale * rng.sample::<f64, _>(StandardNormal),
    );
    let g = (
        scale * rng.sample::<f64, _>(StandardNormal),
        scale * rng.sample::<f64, _>(StandardNormal),
    );
    let sr = rho.sqrt();
    let sq = (1.0 - rho).sqrt();
    let h2 = (sr * h1.0 + sq * g.0, sr * h1.1 + sq * g.1);
    let p1 = h1.0 * h1.0 + h1.1 * h1.1;
    let p2 = h2.0 * h2.0 + h2.1 * h2.1;
    ((p1, h1.1.atan2(h1.0)), (p2, h2.1.atan2(h2.0)))
}

#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    sum: Kahan,
    sum_sq: Kahan,
    count: u64,
}

impl Moments {
    fn add(&mut self, v: f64) {
        self.sum.add(v);
        self.sum_sq.add(v * v);
        self.count += 1;
    }

    fn merge(&mut self, other: &Moments) {
        self.sum.add(other.sum.sum);
        self.sum_sq.add(other.sum_sq.sum);
        self.count += other.count;
    }

    fn estimate(&self, sigma: f64) -> McEstimate {
        let n = self.count as f64;
        let mean = self.sum.sum / n;
        let var = ((self.sum_sq.sum / n) - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        // Rule-of-three style floor: a saturated indicator sample (all
        // zeros or all ones) has zero plug-in variance but its true
        // uncertainty is still ~sigma/n.
        let half_width = (sigma * (var / n).sqrt()).max(sigma / n);
        McEstimate {
            mean,
            half_width,
            trials_used: self.count,
            underresolved: half_width >= mean.abs() && mean != 0.0 || mean == 0.0,
        }
    }
}

/// Estimate a metric over the chain by Monte-Carlo simulation.
pub fn mc_metric(
    chain: &HopChain,
    spec: MetricSpec<'_>,
    cfg: &McConfig,
) -> Result<McEstimate, MetricError> {
    if cfg.trials == 0 {
        return Err(MetricError::Domain("trials must be at least 1".to_string()));
    }
    let workers = cfg.workers.max(1) as u64;
    let params = chain.weibull_params();

    // Capacity needs per-hop means rather than a per-trial scalar.
    if matches!(spec, MetricSpec::Capacity) {
        return mc_capacity(chain, cfg);
    }

    // Pre-build what the trial closures need.
    let trial_ctx = TrialContext::new(chain, &spec)?;

    let worker_moments: Vec<Moments> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(w));
            let n = cfg.trials / workers + u64::from(w < cfg.trials % workers);
            let mut acc = Moments::default();
            let mut snrs = vec![0.0f64; params.len()];
            for _ in 0..n {
                let v = trial_ctx.run_trial(&params, &mut snrs, &mut rng);
                acc.add(v);
            }
            acc
        })
        .collect();

    let mut pooled = Moments::default();
    for m in &worker_moments {
        pooled.merge(m);
    }
    Ok(pooled.estimate(cfg.confidence_sigma))
}

/// Everything one trial needs, pre-validated.
enum TrialContext<'a> {
    Outage { gamma_th: f64 },
    BerSymbol { qam: GrayQam, es_scale: f64 },
    BerAnalytic { coeffs: QamCoefficients },
    BerOutdatedSymbol { qam: GrayQam, es_scale: f64, rho: f64 },
    SerSymbol { qam: GrayQam },
    SerAnalytic { q: f64, c: f64 },
    Bler { params: &'a BlerParams, kernel: BlerKernel },
    Ee { p_total: f64 },
}

impl<'a> TrialContext<'a> {
    fn new(chain: &HopChain, spec: &MetricSpec<'a>) -> Result<Self, MetricError> {
        Ok(match *spec {
            MetricSpec::Outage { gamma_th } => {
                if gamma_th < 0.0 {
                    return Err(MetricError::Domain("outage threshold must be >= 0".to_string()));
                }
                TrialContext::Outage { gamma_th }
            }
            MetricSpec::Ber { modulation, convention, mode } => {
                let coeffs = QamCoefficients::new(modulation, convention)?;
                match mode {
                    ErrorRateMode::Symbol => TrialContext::BerSymbol {
                        qam: GrayQam::new(modulation)?,
                        es_scale: match convention {
                            SnrConvention::PerBit => (modulation as f64).log2(),
                            SnrConvention::PerSymbol => 1.0,
                        },
                    },
                    ErrorRateMode::AnalyticConditional => TrialContext::BerAnalytic { coeffs },
                }
            }
            MetricSpec::BerOutdated { modulation, convention, rho } => {
                if !(0.0..1.0).contains(&rho) {
                    return Err(MetricError::Domain(format!(
                        "correlation must lie in [0, 1), got {rho}"
                    )));
                }
                TrialContext::BerOutdatedSymbol {
                    qam: GrayQam::new(modulation)?,
                    es_scale: match convention {
                        SnrConvention::PerBit => (modulation as f64).log2(),
                        SnrConvention::PerSymbol => 1.0,
                    },
                    rho,
                }
            }
            MetricSpec::Ser { modulation, mode } => match mode {
                ErrorRateMode::Symbol => TrialContext::SerSymbol { qam: GrayQam::new(modulation)? },
                ErrorRateMode::AnalyticConditional => {
                    let m = modulation as f64;
                    if m.sqrt().fract() != 0.0 || modulation < 4 {
                        return Err(MetricError::Domain(format!(
                            "modulation order must be a perfect square >= 4, got {modulation}"
                        )));
                    }
                    TrialContext::SerAnalytic {
                        q: 1.0 - 1.0 / m.sqrt(),
                        c: (3.0 / (m - 1.0)).sqrt(),
                    }
                }
            },
            MetricSpec::Bler { params, kernel } => TrialContext::Bler { params, kernel },
            MetricSpec::EnergyEfficiency { inventory } => {
                inventory.validate()?;
                TrialContext::Ee { p_total: inventory.total_power_w(chain) }
            }
            MetricSpec::Capacity => unreachable!("capacity handled by mc_capacity"),
        })
    }

    fn run_trial(
        &self,
        params: &[(f64, f64)],
        snrs: &mut [f64],
        rng: &mut ChaCha8Rng,
    ) -> f64 {
        match self {
            TrialContext::Outage { gamma_th } => {
                for (slot, &(alpha, phi)) in snrs.iter_mut().zip(params) {
                    *slot = sample_snr(alpha, phi, rng);
                }
                let min = snrs.iter().cloned().fold(f64::INFINITY, f64::min);
                f64::from(min <= *gamma_th)
            }
            TrialContext::BerSymbol { qam, es_scale } => {
                let bits = qam.bits_per_symbol();
                let original = rng.gen_range(0..qam.order);
                let mut label = original;
                for &(alpha, phi) in params {
                    let snr = sample_snr(alpha, phi, rng) * es_scale;
                    label = transmit_symbol(qam, label, snr, rng);
                }
                (original ^ label).count_ones() as f64 / bits as f64
            }
            TrialContext::BerAnalytic { coeffs } => {
                let mut value = 0.0;
                for &(alpha, phi) in params.iter().rev() {
                    let p = coeffs.awgn_ber(sample_snr(alpha, phi, rng));
                    // e2e recursion folded from the last hop inward.
                    value = p + value * (1.0 - 2.0 * p);
                }
                value
            }
            TrialContext::BerOutdatedSymbol { qam, es_scale, rho } => {
                let bits = qam.bits_per_symbol();
                let original = rng.gen_range(0..qam.order);
                let mut label = original;
                for &(alpha, phi) in params {
                    let ((w_true, ph_true), (w_est, ph_est)) =
                        correlated_powers_with_phase(*rho, rng);
                    let snr_true = (phi * w_true).powf(1.0 / alpha) * es_scale;
                    let snr_est = (phi * w_est).powf(1.0 / alpha) * es_scale;
                    label = transmit_symbol_mismatched(
                        qam,
                        label,
                        snr_true,
                        ph_true,
                        snr_est,
                        ph_est,
                        rng,
                    );
                }
                (original ^ label).count_ones() as f64 / bits as f64
            }
            TrialContext::SerSymbol { qam } => {
                let original = rng.gen_range(0..qam.order);
                let mut label = original;
                for &(alpha, phi) in params {
                    let snr = sample_snr(alpha, phi, rng);
                    label = transmit_symbol(qam, label, snr, rng);
                }
                f64::from(label != original)
            }
            TrialContext::SerAnalytic { q, c } => {
                let mut ok = 1.0;
                for &(alpha, phi) in params {
                    let g = sample_snr(alpha, phi, rng);
                    let qq = 0.5 * erfc(c * g.sqrt() / std::f64::consts::SQRT_2);
                    let ser = 4.0 * q * qq - 4.0 * q * q * qq * qq;
                    ok *= 1.0 - ser;
                }
                1.0 - ok
            }
            TrialContext::Bler { params: bp, kernel } => {
                let mut ok = 1.0;
                for &(alpha, phi) in params {
                    let g = sample_snr(alpha, phi, rng);
                    let e = match kernel {
                        BlerKernel::TrueQ => bler_conditional_true_q(g, bp),
                        BlerKernel::Linearized => bler_conditional_linearized(g, bp),
                    };
                    ok *= 1.0 - e;
                }
                1.0 - ok
            }
            TrialContext::Ee { p_total } => {
                let mut min = f64::INFINITY;
                for &(alpha, phi) in params {
                    min = min.min(sample_snr(alpha, phi, rng));
                }
                (1.0 + min).ln() / p_total
            }
        }
    }
}

/// One AWGN symbol transmission with coherent detection at symbol SNR
/// `snr`; returns the detected label.
fn transmit_symbol(qam: &GrayQam, label: u32, snr: f64, rng: &mut ChaCha8Rng) -> u32 {
    let (i, q) = qam.modulate(label);
    let noise_scale = (0.5 / snr).sqrt();
    let ni: f64 = rng.sample(StandardNormal);
    let nq: f64 = rng.sample(StandardNormal);
    qam.demodulate(i + noise_scale * ni, q + noise_scale * nq)
}

/// Symbol transmission where the receiver equalises with a stale channel
/// estimate: y = h x + n, x_hat = y / h_est.
fn transmit_symbol_mismatched(
    qam: &GrayQam,
    label: u32,
    snr_true: f64,
    phase_true: f64,
    snr_est: f64,
    phase_est: f64,
    rng: &mut ChaCha8Rng,
) -> u32 {
    let (i, q) = qam.modulate(label);
    let a = snr_true.sqrt();
    let (c, s) = (phase_true.cos(), phase_true.sin());
    let yi = a * (i * c - q * s) + rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2;
    let yq = a * (i * s + q * c) + rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2;
    // Divide by the stale estimate a_est e^{i phase_est}.
    let a_est = snr_est.sqrt().max(1e-300);
    let (ce, se) = (phase_est.cos(), phase_est.sin());
    let xi = (yi * ce + yq * se) / a_est;
    let xq = (-yi * se + yq * ce) / a_est;
    qam.demodulate(xi, xq)
}

/// Capacity estimate: per-hop empirical means of log2(1 + g), bottleneck
/// hop reported with its own confidence interval.
fn mc_capacity(chain: &HopChain, cfg: &McConfig) -> Result<McEstimate, MetricError> {
    let workers = cfg.workers.max(1) as u64;
    let params = chain.weibull_params();
    let per_worker: Vec<Vec<Moments>> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(w));
            let n = cfg.trials / workers + u64::from(w < cfg.trials % workers);
            let mut acc = vec![Moments::default(); params.len()];
            for _ in 0..n {
                for (slot, &(alpha, phi)) in acc.iter_mut().zip(&params) {
                    slot.add((1.0 + sample_snr(alpha, phi, &mut rng)).log2());
                }
            }
            acc
        })
        .collect();
    let mut pooled = vec![Moments::default(); params.len()];
    for worker in &per_worker {
        for (p, m) in pooled.iter_mut().zip(worker) {
            p.merge(m);
        }
    }
    let est = pooled
        .iter()
        .map(|m| m.estimate(cfg.confidence_sigma))
        .min_by(|a, b| a.mean.total_cmp(&b.mean))
        .expect("chain has hops");
    Ok(est)
}
