//! Scenario execution: sweeps a parameter axis, evaluates each metric
//! with the requested methods, and writes one CSV per metric.
//!
//! Sweep points run in parallel; output rows are assembled in sweep
//! order and Monte-Carlo seeds derive deterministically from
//! (base seed, metric index, point index), so a rerun with the same seed
//! is byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use hoplab_core::allocation::{allocate_ber_optimal, allocate_ee_optimal, apply_allocation};
use hoplab_core::channel::HopChain;
use hoplab_core::metrics::bler::BlerParams;
use hoplab_core::metrics::ee::PowerInventory;
use hoplab_core::metrics::qam::QamCoefficients;
use hoplab_core::metrics::{
    ber, bler, capacity, ee, outage, ser, Method, MetricError, MetricResult, Mode,
};
use hoplab_core::simulate::{mc_metric, McConfig, MetricSpec};

use crate::config::{AllocationName, MethodName, MetricSpecConfig, ScenarioFile};

/// Numerical failure naming the offending sweep point (exit code 4).
#[derive(Debug, thiserror::Error)]
#[error("{metric} at {column} = {value}: {source}")]
pub struct PointError {
    pub metric: String,
    pub column: String,
    pub value: f64,
    #[source]
    pub source: MetricError,
}

/// One evaluated sweep row of a metric: the sweep value and the
/// method-tagged results.
#[derive(Debug, Clone)]
pub struct Row {
    pub sweep_value: f64,
    pub exact: Option<MetricResult>,
    pub asymptotic: Option<MetricResult>,
    pub mc: Option<MetricResult>,
}

#[derive(Debug, Clone)]
pub struct MetricTable {
    pub id: String,
    pub sweep_column: String,
    pub has_exact: bool,
    pub has_asymptotic: bool,
    pub has_mc: bool,
    /// Column name of the exact closed form; "exact" unless the closed
    /// form and the simulation answer different questions (outdated CSI,
    /// where the analytic ratio model has no error floor while the
    /// mismatched-equaliser simulation does).
    pub exact_label: &'static str,
    pub rows: Vec<Row>,
}

/// Methods a metric supports (closed forms or simulation paths exist).
fn supported(metric: &MetricSpecConfig, method: MethodName) -> bool {
    use MetricSpecConfig::*;
    match (metric, method) {
        (Outage { .. } | Ber { .. } | Ser { .. } | Bler { .. } | Capacity | Ee { .. }, _) => true,
        (BerOutdated { .. }, MethodName::Exact | MethodName::Mc) => true,
        (BerOutdated { .. }, MethodName::Asymptotic) => false,
        (BerBeamforming { .. }, MethodName::Exact) => true,
        (BerBeamforming { .. }, _) => false,
        (CapacityRatio { .. }, MethodName::Exact) => true,
        (CapacityRatio { .. }, _) => false,
    }
}

fn closed_form(
    scenario: &ScenarioFile,
    metric: &MetricSpecConfig,
    chain: &HopChain,
    mode: Mode,
) -> Result<f64, MetricError> {
    match *metric {
        MetricSpecConfig::Outage { gamma_th_db } => {
            let th = 10f64.powf(gamma_th_db / 10.0);
            Ok(match mode {
                Mode::Exact => outage::outage_exact(chain, th),
                Mode::Asymptotic => outage::outage_asymptotic(chain, th),
            })
        }
        MetricSpecConfig::Ber { modulation, snr_convention } => {
            let coeffs = QamCoefficients::new(modulation, snr_convention.into())?;
            ber::ber_chain(chain, &coeffs, mode)
        }
        MetricSpecConfig::BerOutdated { modulation, rho, snr_convention } => {
            let coeffs = QamCoefficients::new(modulation, snr_convention.into())?;
            let per_hop: Result<Vec<f64>, _> = chain
                .hops
                .iter()
                .map(|h| ber::ber_hop_outdated_csi(h, &chain.budget, &coeffs, rho))
                .collect();
            ber::ber_e2e(&per_hop?)
        }
        MetricSpecConfig::BerBeamforming {
            modulation,
            tx_antennas,
            rx_antennas,
            spectral_scale,
            snr_convention,
        } => {
            let coeffs = QamCoefficients::new(modulation, snr_convention.into())?;
            let per_hop: Result<Vec<f64>, _> = chain
                .hops
                .iter()
                .map(|h| {
                    ber::ber_hop_beamforming(
                        h,
                        &chain.budget,
                        &coeffs,
                        tx_antennas,
                        rx_antennas,
                        spectral_scale,
                    )
                })
                .collect();
            ber::ber_e2e(&per_hop?)
        }
        MetricSpecConfig::Ser { modulation } => ser::ser_chain(chain, modulation, mode),
        MetricSpecConfig::Bler { rate_bits_per_cu, block_length_cu } => {
            let params = BlerParams::new(rate_bits_per_cu, block_length_cu)?;
            bler::bler_chain(chain, &params, mode)
        }
        MetricSpecConfig::Capacity => capacity::capacity_e2e(chain, mode),
        MetricSpecConfig::CapacityRatio { second_frequency_ghz } => {
            let c1 = capacity::capacity_e2e(chain, mode)?;
            let mut other = chain.clone();
            other.budget.frequency_ghz = second_frequency_ghz;
            let c2 = capacity::capacity_e2e(&other, mode)?;
            Ok(c1 / c2)
        }
        MetricSpecConfig::Ee { circuit_power_per_node_w, allocation } => {
            let inventory = PowerInventory::uniform(circuit_power_per_node_w);
            let chain = allocated_chain(scenario, chain, allocation)?;
            ee::ee_e2e(&chain, &inventory, mode)
        }
    }
}

fn allocated_chain(
    scenario: &ScenarioFile,
    chain: &HopChain,
    allocation: AllocationName,
) -> Result<HopChain, MetricError> {
    let p_max: f64 = chain
        .hops
        .iter()
        .map(|h| hoplab_core::channel::dbm_to_watt(h.tx_power_dbm))
        .sum();
    match allocation {
        AllocationName::Uniform => Ok(chain.clone()),
        AllocationName::EeOptimal => {
            let r = allocate_ee_optimal(chain, p_max)
                .map_err(|e| MetricError::Domain(e.to_string()))?;
            Ok(apply_allocation(chain, &r.powers_w))
        }
        AllocationName::BerOptimal => {
            let modulation = scenario
                .metrics
                .iter()
                .find_map(|m| match m {
                    MetricSpecConfig::Ber { modulation, .. } => Some(*modulation),
                    _ => None,
                })
                .unwrap_or(4);
            let coeffs = QamCoefficients::new(modulation, Default::default())?;
            let r = allocate_ber_optimal(chain, &coeffs, p_max)
                .map_err(|e| MetricError::Domain(e.to_string()))?;
            Ok(apply_allocation(chain, &r.powers_w))
        }
    }
}

fn monte_carlo(
    scenario: &ScenarioFile,
    metric: &MetricSpecConfig,
    chain: &HopChain,
    seed: u64,
) -> Result<Option<MetricResult>, MetricError> {
    let cfg = McConfig {
        trials: scenario.mc.trials,
        seed,
        confidence_sigma: scenario.mc.confidence_sigma,
        workers: scenario.mc.workers,
    };
    let est = match *metric {
        MetricSpecConfig::Outage { gamma_th_db } => mc_metric(
            chain,
            MetricSpec::Outage { gamma_th: 10f64.powf(gamma_th_db / 10.0) },
            &cfg,
        )?,
        MetricSpecConfig::Ber { modulation, snr_convention } => mc_metric(
            chain,
            MetricSpec::Ber {
                modulation,
                convention: snr_convention.into(),
                mode: scenario.mc.ber_mode.into(),
            },
            &cfg,
        )?,
        MetricSpecConfig::BerOutdated { modulation, rho, snr_convention } => mc_metric(
            chain,
            MetricSpec::BerOutdated { modulation, convention: snr_convention.into(), rho },
            &cfg,
        )?,
        MetricSpecConfig::Ser { modulation } => mc_metric(
            chain,
            MetricSpec::Ser { modulation, mode: scenario.mc.ber_mode.into() },
            &cfg,
        )?,
        MetricSpecConfig::Bler { rate_bits_per_cu, block_length_cu } => {
            let params = BlerParams::new(rate_bits_per_cu, block_length_cu)?;
            mc_metric(
                chain,
                MetricSpec::Bler { params: &params, kernel: scenario.mc.bler_kernel.into() },
                &cfg,
            )?
        }
        MetricSpecConfig::Capacity => mc_metric(chain, MetricSpec::Capacity, &cfg)?,
        MetricSpecConfig::Ee { circuit_power_per_node_w, allocation } => {
            let inventory = PowerInventory::uniform(circuit_power_per_node_w);
            let chain = allocated_chain(scenario, chain, allocation)?;
            mc_metric(&chain, MetricSpec::EnergyEfficiency { inventory: &inventory }, &cfg)?
        }
        MetricSpecConfig::BerBeamforming { .. } | MetricSpecConfig::CapacityRatio { .. } => {
            return Ok(None)
        }
    };
    Ok(Some(MetricResult::monte_carlo(est.mean, est.half_width)))
}

/// Deterministic per-(metric, point) seed derivation.
fn point_seed(base: u64, metric_index: usize, point_index: usize) -> u64 {
    base.wrapping_add(1_000_003u64.wrapping_mul(metric_index as u64 + 1))
        .wrapping_add(65_536u64.wrapping_mul(point_index as u64))
}

/// Evaluate every metric over the sweep.
pub fn run(scenario: &ScenarioFile) -> Result<Vec<MetricTable>, PointError> {
    let sweep_values = scenario.sweep.values();
    let column = scenario.sweep_column().to_string();
    let want = |m: MethodName| scenario.methods.contains(&m);

    scenario
        .metrics
        .iter()
        .enumerate()
        .map(|(mi, metric)| {
            let id = ScenarioFile::metric_id(metric);
            let has_exact = want(MethodName::Exact) && supported(metric, MethodName::Exact);
            let has_asymptotic =
                want(MethodName::Asymptotic) && supported(metric, MethodName::Asymptotic);
            let has_mc = want(MethodName::Mc) && supported(metric, MethodName::Mc);
            let exact_label = match metric {
                MetricSpecConfig::BerOutdated { .. } => "analytic_ratio_model",
                _ => "exact",
            };
            let rows: Result<Vec<Row>, PointError> = sweep_values
                .par_iter()
                .enumerate()
                .map(|(pi, &v)| {
                    let mk_err = |e: MetricError| PointError {
                        metric: id.clone(),
                        column: column.clone(),
                        value: v,
                        source: e,
                    };
                    let chain = scenario
                        .build_chain(Some((scenario.sweep.variable, v)))
                        .map_err(|e| mk_err(MetricError::Domain(e.to_string())))?;
                    let exact = if has_exact {
                        let v = closed_form(scenario, metric, &chain, Mode::Exact)
                            .map_err(mk_err)?;
                        Some(MetricResult::exact(v))
                    } else {
                        None
                    };
                    let asymptotic = if has_asymptotic {
                        let v = closed_form(scenario, metric, &chain, Mode::Asymptotic)
                            .map_err(mk_err)?;
                        Some(MetricResult::asymptotic(v))
                    } else {
                        None
                    };
                    let mc = if has_mc {
                        monte_carlo(
                            scenario,
                            metric,
                            &chain,
                            point_seed(scenario.mc.seed, mi, pi),
                        )
                        .map_err(mk_err)?
                    } else {
                        None
                    };
                    Ok(Row { sweep_value: v, exact, asymptotic, mc })
                })
                .collect();
            Ok(MetricTable {
                id,
                sweep_column: column.clone(),
                has_exact,
                has_asymptotic,
                has_mc,
                exact_label,
                rows: rows?,
            })
        })
        .collect()
}

/// Format a float with 12 significant digits.
fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

/// Render one metric table as CSV text.
pub fn to_csv(table: &MetricTable) -> String {
    let mut out = String::new();
    let mut header = vec![table.sweep_column.clone()];
    if table.has_exact {
        header.push(table.exact_label.to_string());
    }
    if table.has_asymptotic {
        header.push(Method::Asymptotic.label().to_string());
    }
    if table.has_mc {
        header.push(Method::MonteCarlo.label().to_string());
        header.push("mc_half_width".to_string());
    }
    let _ = writeln!(out, "{}", header.join(","));
    for row in &table.rows {
        let mut cells = vec![fmt(row.sweep_value)];
        if table.has_exact {
            cells.push(fmt(row.exact.map(|r| r.value).unwrap_or(f64::NAN)));
        }
        if table.has_asymptotic {
            cells.push(fmt(row.asymptotic.map(|r| r.value).unwrap_or(f64::NAN)));
        }
        if table.has_mc {
            match &row.mc {
                Some(est) => {
                    cells.push(fmt(est.value));
                    cells.push(fmt(est.diagnostics.mc_half_width.unwrap_or(f64::NAN)));
                }
                None => {
                    cells.push("nan".to_string());
                    cells.push("nan".to_string());
                }
            }
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Write all tables into `dir`, one CSV per metric, named
/// `<scenario>_<metric id>.csv`; returns the paths written.
pub fn write_csvs(
    scenario_name: &str,
    tables: &[MetricTable],
    dir: &Path,
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for t in tables {
        let path = dir.join(format!("{scenario_name}_{}.csv", t.id));
        std::fs::write(&path, to_csv(t))?;
        paths.push(path);
    }
    Ok(paths)
}
