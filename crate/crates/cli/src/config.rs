//! Declarative scenario configuration.
//!
//! Scenario files are TOML with unit-suffixed keys parsed strictly
//! (unknown keys are rejected). A scenario pins one chain, one link
//! budget, one sweep axis, a metric list and the evaluation methods;
//! rerunning the same file with the same seed reproduces byte-identical
//! CSVs.

use serde::{Deserialize, Serialize};

use hoplab_core::channel::{HopChain, LinkBudget, WeibullHop};
use hoplab_core::metrics::qam::SnrConvention;
use hoplab_core::simulate::{BlerKernel, ErrorRateMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: ScenarioMeta,
    pub chain: ChainSpec,
    #[serde(default)]
    pub budget: BudgetSpec,
    pub sweep: SweepSpec,
    #[serde(rename = "metric")]
    pub metrics: Vec<MetricSpecConfig>,
    pub methods: Vec<MethodName>,
    #[serde(default)]
    pub mc: McSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMeta {
    pub name: String,
}

/// Chain description: either a uniform chain (`hops` + shared fields) or
/// an explicit per-hop list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    #[serde(default)]
    pub hops: Option<u32>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default)]
    pub total_distance_m: Option<f64>,
    #[serde(default)]
    pub per_hop_distance_m: Option<f64>,
    pub bandwidth_mhz: f64,
    pub eirp_dbm: f64,
    #[serde(default, rename = "hop")]
    pub explicit_hops: Vec<HopSpec>,
}

fn default_omega() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopSpec {
    pub beta: f64,
    #[serde(default = "default_omega")]
    pub omega: f64,
    pub distance_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSpec {
    pub frequency_ghz: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub rx_frontend_loss_db: f64,
    pub antenna_element_gain_db: f64,
    pub pathloss_exponent: f64,
    pub pathloss_ref_db_at_1m: f64,
    pub blockage_db_per_m: f64,
}

impl Default for BudgetSpec {
    fn default() -> Self {
        let b = LinkBudget::default();
        Self {
            frequency_ghz: b.frequency_ghz,
            noise_psd_dbm_hz: b.noise_psd_dbm_hz,
            noise_figure_db: b.noise_figure_db,
            rx_frontend_loss_db: b.rx_frontend_loss_db,
            antenna_element_gain_db: b.antenna_element_gain_db,
            pathloss_exponent: b.pathloss_exponent,
            pathloss_ref_db_at_1m: b.pathloss_ref_db_at_1m,
            blockage_db_per_m: b.blockage_db_per_m,
        }
    }
}

impl BudgetSpec {
    pub fn to_budget(&self) -> LinkBudget {
        LinkBudget {
            frequency_ghz: self.frequency_ghz,
            noise_psd_dbm_hz: self.noise_psd_dbm_hz,
            noise_figure_db: self.noise_figure_db,
            rx_frontend_loss_db: self.rx_frontend_loss_db,
            antenna_element_gain_db: self.antenna_element_gain_db,
            pathloss_exponent: self.pathloss_exponent,
            pathloss_ref_db_at_1m: self.pathloss_ref_db_at_1m,
            blockage_db_per_m: self.blockage_db_per_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    EirpDbm,
    TotalDistanceM,
    Hops,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: u32,
    #[serde(default = "default_scale")]
    pub scale: SweepScale,
}

fn default_scale() -> SweepScale {
    SweepScale::Linear
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points.max(2) as usize;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                match self.scale {
                    SweepScale::Linear => self.start + f * (self.stop - self.start),
                    SweepScale::Log => 10f64.powf(
                        self.start.log10() + f * (self.stop.log10() - self.start.log10()),
                    ),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Exact,
    Asymptotic,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpecConfig {
    Outage {
        gamma_th_db: f64,
    },
    Ber {
        modulation: u32,
        #[serde(default)]
        snr_convention: SnrConventionName,
    },
    BerOutdated {
        modulation: u32,
        rho: f64,
        #[serde(default)]
        snr_convention: SnrConventionName,
    },
    BerBeamforming {
        modulation: u32,
        tx_antennas: u32,
        rx_antennas: u32,
        #[serde(default = "default_mp_scale")]
        spectral_scale: f64,
        #[serde(default)]
        snr_convention: SnrConventionName,
    },
    Ser {
        modulation: u32,
    },
    Bler {
        rate_bits_per_cu: f64,
        block_length_cu: u32,
    },
    Capacity,
    CapacityRatio {
        second_frequency_ghz: f64,
    },
    Ee {
        circuit_power_per_node_w: f64,
        #[serde(default)]
        allocation: AllocationName,
    },
}

fn default_mp_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SnrConventionName {
    #[default]
    PerBit,
    PerSymbol,
}

impl From<SnrConventionName> for SnrConvention {
    fn from(v: SnrConventionName) -> Self {
        match v {
            SnrConventionName::PerBit => SnrConvention::PerBit,
            SnrConventionName::PerSymbol => SnrConvention::PerSymbol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AllocationName {
    #[default]
    Uniform,
    EeOptimal,
    BerOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSpec {
    pub trials: u64,
    pub seed: u64,
    pub confidence_sigma: f64,
    pub workers: u32,
    pub ber_mode: BerModeName,
    pub bler_kernel: BlerKernelName,
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            seed: 1,
            confidence_sigma: 3.0,
            workers: 8,
            ber_mode: BerModeName::Analytic,
            bler_kernel: BlerKernelName::Linearized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BerModeName {
    Analytic,
    Symbol,
}

impl From<BerModeName> for ErrorRateMode {
    fn from(v: BerModeName) -> Self {
        match v {
            BerModeName::Analytic => ErrorRateMode::AnalyticConditional,
            BerModeName::Symbol => ErrorRateMode::Symbol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlerKernelName {
    Linearized,
    TrueQ,
}

impl From<BlerKernelName> for BlerKernel {
    fn from(v: BlerKernelName) -> Self {
        match v {
            BlerKernelName::Linearized => BlerKernel::Linearized,
            BlerKernelName::TrueQ => BlerKernel::TrueQ,
        }
    }
}

/// Validation failure with a human-readable cause (exit code 3).
#[derive(Debug, thiserror::Error)]
#[error("invalid scenario: {0}")]
pub struct ValidationError(pub String);

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.methods.is_empty() {
            return Err(ValidationError("at least one method is required".to_string()));
        }
        if self.metrics.is_empty() {
            return Err(ValidationError("at least one metric is required".to_string()));
        }
        if self.sweep.points < 2 {
            return Err(ValidationError("sweep needs at least 2 points".to_string()));
        }
        if matches!(self.sweep.scale, SweepScale::Log)
            && (self.sweep.start <= 0.0 || self.sweep.stop <= 0.0)
        {
            return Err(ValidationError("log sweep needs positive endpoints".to_string()));
        }
        if matches!(self.sweep.variable, SweepVariable::Hops) {
            if !self.chain.explicit_hops.is_empty() {
                return Err(ValidationError(
                    "hop-count sweeps need a uniform chain".to_string(),
                ));
            }
            if self.chain.total_distance_m.is_none() {
                return Err(ValidationError(
                    "hop-count sweeps need total_distance_m".to_string(),
                ));
            }
        }
        for m in &self.metrics {
            match *m {
                MetricSpecConfig::Ber { modulation, .. }
                | MetricSpecConfig::BerOutdated { modulation, .. }
                | MetricSpecConfig::BerBeamforming { modulation, .. }
                | MetricSpecConfig::Ser { modulation } => {
                    let sqrt = (modulation as f64).sqrt();
                    let bits = sqrt.log2();
                    if sqrt.fract() != 0.0 || bits.fract() != 0.0 || modulation < 4 {
                        return Err(ValidationError(format!(
                            "modulation order {modulation} is not a square power of two (4, 16, 64, ...)"
                        )));
                    }
                }
                _ => {}
            }
            if let MetricSpecConfig::BerOutdated { rho, .. } = *m {
                if !(0.0..1.0).contains(&rho) {
                    return Err(ValidationError(format!(
                        "outdated-CSI correlation must lie in [0, 1), got {rho}"
                    )));
                }
            }
            if let MetricSpecConfig::BerBeamforming { tx_antennas, rx_antennas, .. } = *m {
                if rx_antennas == 0 || rx_antennas >= tx_antennas {
                    return Err(ValidationError(format!(
                        "beamforming needs 1 <= rx < tx, got tx={tx_antennas}, rx={rx_antennas}"
                    )));
                }
            }
            if let MetricSpecConfig::Bler { rate_bits_per_cu, block_length_cu } = *m {
                if rate_bits_per_cu <= 0.0 || block_length_cu == 0 {
                    return Err(ValidationError(
                        "bler needs a positive rate and block length".to_string(),
                    ));
                }
            }
        }
        // Chain structure.
        self.build_chain(None)
            .map(|_| ())
            .map_err(|e| ValidationError(e.to_string()))?;
        if self.mc.trials == 0 && self.methods.contains(&MethodName::Mc) {
            return Err(ValidationError("mc method requires trials >= 1".to_string()));
        }
        Ok(())
    }

    /// Materialise the chain, optionally overriding the swept variable.
    pub fn build_chain(&self, sweep_value: Option<(SweepVariable, f64)>) -> Result<HopChain, ValidationError> {
        let budget = self.budget.to_budget();
        let bw = self.chain.bandwidth_mhz * 1e6;
        let mut eirp = self.chain.eirp_dbm;
        let mut total_d = self.chain.total_distance_m;
        let mut hop_count_override = None;
        if let Some((var, v)) = sweep_value {
            match var {
                SweepVariable::EirpDbm => eirp = v,
                SweepVariable::TotalDistanceM => total_d = Some(v),
                SweepVariable::Hops => hop_count_override = Some(v.round().max(1.0) as u32),
            }
        }
        if !self.chain.explicit_hops.is_empty() {
            if self.chain.hops.is_some() || self.chain.beta.is_some() {
                return Err(ValidationError(
                    "use either the uniform chain fields or [[chain.hop]] entries, not both"
                        .to_string(),
                ));
            }
            let hops: Result<Vec<WeibullHop>, _> = self
                .chain
                .explicit_hops
                .iter()
                .map(|h| WeibullHop::from_beta(h.beta, h.omega, h.distance_m, bw, eirp))
                .collect();
            return HopChain::new(hops.map_err(|e| ValidationError(e.to_string()))?, budget)
                .map_err(|e| ValidationError(e.to_string()));
        }
        let n = hop_count_override
            .or(self.chain.hops)
            .ok_or_else(|| ValidationError("chain needs hops or [[chain.hop]] entries".to_string()))?;
        let beta = self
            .chain
            .beta
            .ok_or_else(|| ValidationError("uniform chain needs beta".to_string()))?;
        let per_hop = match (total_d, self.chain.per_hop_distance_m) {
            (Some(d), None) => d / n as f64,
            (None, Some(d)) => d,
            (Some(_), Some(_)) => {
                return Err(ValidationError(
                    "give either total_distance_m or per_hop_distance_m, not both".to_string(),
                ))
            }
            (None, None) => {
                return Err(ValidationError(
                    "uniform chain needs total_distance_m or per_hop_distance_m".to_string(),
                ))
            }
        };
        let hop = WeibullHop::from_beta(beta, self.chain.omega, per_hop, bw, eirp)
            .map_err(|e| ValidationError(e.to_string()))?;
        HopChain::new(vec![hop; n as usize], budget).map_err(|e| ValidationError(e.to_string()))
    }

    /// Stable identifier of a metric for file naming.
    pub fn metric_id(metric: &MetricSpecConfig) -> String {
        fn db_tag(v: f64) -> String {
            let s = format!("{v:.0}");
            s.replace('-', "m")
        }
        match metric {
            MetricSpecConfig::Outage { gamma_th_db } => {
                format!("outage_th{}db", db_tag(*gamma_th_db))
            }
            MetricSpecConfig::Ber { modulation, .. } => format!("ber_m{modulation}"),
            MetricSpecConfig::BerOutdated { modulation, rho, .. } => {
                format!("ber_outdated_m{}_rho{:03}", modulation, (rho * 100.0).round() as u32)
            }
            MetricSpecConfig::BerBeamforming { modulation, tx_antennas, rx_antennas, .. } => {
                format!("ber_beam_m{modulation}_t{tx_antennas}r{rx_antennas}")
            }
            MetricSpecConfig::Ser { modulation } => format!("ser_m{modulation}"),
            MetricSpecConfig::Bler { rate_bits_per_cu, block_length_cu } => {
                format!("bler_r{rate_bits_per_cu}_l{block_length_cu}")
            }
            MetricSpecConfig::Capacity => "capacity".to_string(),
            MetricSpecConfig::CapacityRatio { .. } => "capacity_ratio".to_string(),
            MetricSpecConfig::Ee { allocation, .. } => match allocation {
                AllocationName::Uniform => "ee_uniform".to_string(),
                AllocationName::EeOptimal => "ee_opt".to_string(),
                AllocationName::BerOptimal => "ee_ber_opt".to_string(),
            },
        }
    }

    pub fn sweep_column(&self) -> &'static str {
        match self.sweep.variable {
            SweepVariable::EirpDbm => "eirp_dbm",
            SweepVariable::TotalDistanceM => "total_distance_m",
            SweepVariable::Hops => "hops",
        }
    }
}
