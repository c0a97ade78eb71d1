//! Link budget and fading parameterisation.
//!
//! Converts scenario inputs (carrier frequency, per-hop distance,
//! bandwidth, EIRP, losses) into the per-hop average SNR and the Weibull
//! SNR parameters (alpha, phi) that every closed-form metric consumes.
//!
//! SNR-domain conventions:
//! - the amplitude shape is beta, the SNR shape is alpha = beta / 2;
//! - the SNR CDF of a hop is `1 - exp(-gamma^alpha / phi)` with
//!   `phi = (avg_snr_linear * omega^2)^alpha`.
//!
//! The path-loss model is a close-in reference model with a configurable
//! exponent and a 28 GHz-referenced frequency term; the blockage hook is
//! an additional distance-proportional loss, disabled by default.

use thiserror::Error;

/// Thermal noise floor density in dBm/Hz.
pub const NOISE_PSD_DBM_HZ: f64 = -174.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("invalid channel parameter: {0}")]
    Invalid(String),
}

/// One relay hop's fading and link-budget parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullHop {
    /// SNR-domain shape, alpha = beta / 2.
    pub alpha: f64,
    /// Weibull scale of the amplitude, Omega.
    pub omega: f64,
    /// Hop length in metres.
    pub distance_m: f64,
    /// Signal bandwidth in Hz.
    pub bandwidth_hz: f64,
    /// Per-hop EIRP in dBm (radiated, antenna gain included).
    pub tx_power_dbm: f64,
    /// Composite extra gain/loss factor of the hop (linear, default 1).
    pub extra_loss_factor: f64,
}

impl WeibullHop {
    /// Hop with the given amplitude shape beta (alpha = beta/2 is stored),
    /// unit Omega and no extra losses.
    pub fn from_beta(
        beta: f64,
        omega: f64,
        distance_m: f64,
        bandwidth_hz: f64,
        tx_power_dbm: f64,
    ) -> Result<Self, ChannelError> {
        let hop = Self {
            alpha: beta / 2.0,
            omega,
            distance_m,
            bandwidth_hz,
            tx_power_dbm,
            extra_loss_factor: 1.0,
        };
        hop.validate()?;
        Ok(hop)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.alpha > 0.0) {
            return Err(ChannelError::Invalid(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.omega > 0.0) {
            return Err(ChannelError::Invalid(format!("omega must be > 0, got {}", self.omega)));
        }
        if !(self.distance_m > 0.0) {
            return Err(ChannelError::Invalid(format!(
                "distance must be > 0, got {}",
                self.distance_m
            )));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(ChannelError::Invalid(format!(
                "bandwidth must be > 0, got {}",
                self.bandwidth_hz
            )));
        }
        if !(self.extra_loss_factor > 0.0) {
            return Err(ChannelError::Invalid(format!(
                "extra loss factor must be > 0, got {}",
                self.extra_loss_factor
            )));
        }
        Ok(())
    }
}

/// Frequency plan and fixed receiver losses of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub frequency_ghz: f64,
    /// Noise power spectral density in dBm/Hz (default -174).
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub rx_frontend_loss_db: f64,
    pub antenna_element_gain_db: f64,
    pub pathloss_exponent: f64,
    /// Close-in reference loss at 1 m and 28 GHz, in dB.
    pub pathloss_ref_db_at_1m: f64,
    /// Additional distance-proportional loss in dB per metre (blockage
    /// hook; 0 disables it).
    pub blockage_db_per_m: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            frequency_ghz: 28.0,
            noise_psd_dbm_hz: NOISE_PSD_DBM_HZ,
            noise_figure_db: 5.0,
            rx_frontend_loss_db: 4.0,
            antenna_element_gain_db: 5.0,
            pathloss_exponent: 2.0,
            pathloss_ref_db_at_1m: 61.34,
            blockage_db_per_m: 0.0,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.frequency_ghz > 0.0) {
            return Err(ChannelError::Invalid(format!(
                "frequency must be > 0 GHz, got {}",
                self.frequency_ghz
            )));
        }
        if !(self.pathloss_exponent >= 1.0) {
            return Err(ChannelError::Invalid(format!(
                "path loss exponent must be >= 1, got {}",
                self.pathloss_exponent
            )));
        }
        Ok(())
    }
}

/// An ordered source -> relay ... -> destination route.
#[derive(Debug, Clone, PartialEq)]
pub struct HopChain {
    pub hops: Vec<WeibullHop>,
    pub budget: LinkBudget,
}

impl HopChain {
    pub fn new(hops: Vec<WeibullHop>, budget: LinkBudget) -> Result<Self, ChannelError> {
        if hops.is_empty() {
            return Err(ChannelError::Invalid("a chain needs at least one hop".to_string()));
        }
        for h in &hops {
            h.validate()?;
        }
        budget.validate()?;
        Ok(Self { hops, budget })
    }

    /// Uniform chain: `n` identical hops of length `total_distance / n`.
    pub fn uniform(
        n: usize,
        beta: f64,
        omega: f64,
        total_distance_m: f64,
        bandwidth_hz: f64,
        tx_power_dbm: f64,
        budget: LinkBudget,
    ) -> Result<Self, ChannelError> {
        if n == 0 {
            return Err(ChannelError::Invalid("a chain needs at least one hop".to_string()));
        }
        let hop = WeibullHop::from_beta(
            beta,
            omega,
            total_distance_m / n as f64,
            bandwidth_hz,
            tx_power_dbm,
        )?;
        Self::new(vec![hop; n], budget)
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// Per-hop (alpha, phi) pairs.
    pub fn weibull_params(&self) -> Vec<(f64, f64)> {
        self.hops.iter().map(|h| (h.alpha, phi(h, &self.budget))).collect()
    }

    /// Common SNR shape if all hops share one.
    pub fn common_alpha(&self) -> Option<f64> {
        let a0 = self.hops[0].alpha;
        if self.hops.iter().all(|h| (h.alpha - a0).abs() < 1e-12) {
            Some(a0)
        } else {
            None
        }
    }
}

/// Noise power in dBm over a bandwidth, N0 = -174 + 10 log10(Bw) + NF.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    NOISE_PSD_DBM_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

/// Same, honouring a non-default noise density.
pub fn noise_power_dbm_with(budget: &LinkBudget, bandwidth_hz: f64) -> f64 {
    budget.noise_psd_dbm_hz + 10.0 * bandwidth_hz.log10() + budget.noise_figure_db
}

/// Close-in path loss in dB at distance `d` metres:
/// ref + 10 n log10(d) + 20 log10(f / 28 GHz) (+ blockage hook).
pub fn path_loss_db(budget: &LinkBudget, distance_m: f64) -> f64 {
    budget.pathloss_ref_db_at_1m
        + 10.0 * budget.pathloss_exponent * distance_m.log10()
        + 20.0 * (budget.frequency_ghz / 28.0).log10()
        + budget.blockage_db_per_m * distance_m
}

/// Per-hop average SNR in dB:
/// EIRP + rx antenna gain - path loss - front-end loss - noise power.
pub fn avg_snr_db(hop: &WeibullHop, budget: &LinkBudget) -> f64 {
    hop.tx_power_dbm + budget.antenna_element_gain_db
        - path_loss_db(budget, hop.distance_m)
        - budget.rx_frontend_loss_db
        - noise_power_dbm_with(budget, hop.bandwidth_hz)
        + 10.0 * hop.extra_loss_factor.log10()
}

/// Linear per-hop average SNR.
pub fn avg_snr_linear(hop: &WeibullHop, budget: &LinkBudget) -> f64 {
    10f64.powf(avg_snr_db(hop, budget) / 10.0)
}

/// Weibull SNR scale phi = (avg_snr * Omega^2)^alpha.
pub fn phi(hop: &WeibullHop, budget: &LinkBudget) -> f64 {
    (avg_snr_linear(hop, budget) * hop.omega * hop.omega).powf(hop.alpha)
}

/// phi from explicit parts, for callers that already have the linear SNR.
pub fn phi_from(avg_snr_linear: f64, omega: f64, alpha: f64) -> f64 {
    (avg_snr_linear * omega * omega).powf(alpha)
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}

pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * (watt * 1000.0).log10()
}
