//! End-to-end energy efficiency (consumption-factor style).
//!
//! The instantaneous metric is `ln(1 + min_i g_i) / P_T`, averaged over
//! fading. With a common shape alpha across hops and the harmonic scale
//! `psi = 1 / sum_i (1/phi_i)`, the average reduces to
//!
//! ```text
//! EE = (1/P_T) H^{2,1}_{1,2}[ 1/psi | (0,a); (0,1),(0,a) ]
//! ```
//!
//! in natural-log units. The residue at the kernel's double pole gives
//! the high-SNR form `(psi0(1) + ln psi) / (alpha P_T)`.

use crate::channel::{dbm_to_watt, HopChain};
use crate::metrics::{MetricError, Mode};
use crate::specfun::{digamma, fox_h, FoxHParams};

/// Per-node circuit power budget in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerInventory {
    pub tx_circuit_w: f64,
    pub rx_circuit_w: f64,
    pub modulation_w: f64,
    pub demodulation_w: f64,
    pub idle_w: f64,
}

impl PowerInventory {
    /// All-in-one circuit power per node, split evenly across the four
    /// active components with no idle draw.
    pub fn uniform(per_node_w: f64) -> Self {
        Self {
            tx_circuit_w: per_node_w / 4.0,
            rx_circuit_w: per_node_w / 4.0,
            modulation_w: per_node_w / 4.0,
            demodulation_w: per_node_w / 4.0,
            idle_w: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        for (name, v) in [
            ("tx", self.tx_circuit_w),
            ("rx", self.rx_circuit_w),
            ("mod", self.modulation_w),
            ("demod", self.demodulation_w),
            ("idle", self.idle_w),
        ] {
            if !(v >= 0.0) {
                return Err(MetricError::Domain(format!(
                    "circuit power {name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Total circuit power of an N-hop chain:
    /// N (tx + rx + mod + demod) + (N + 1) idle.
    pub fn circuit_power_w(&self, hops: usize) -> f64 {
        let n = hops as f64;
        n * (self.tx_circuit_w + self.rx_circuit_w + self.modulation_w + self.demodulation_w)
            + (n + 1.0) * self.idle_w
    }

    /// Total consumed power: circuit plus the radiated per-hop powers.
    pub fn total_power_w(&self, chain: &HopChain) -> f64 {
        self.circuit_power_w(chain.len())
            + chain.hops.iter().map(|h| dbm_to_watt(h.tx_power_dbm)).sum::<f64>()
    }
}

/// The fading average E[ln(1 + v)] for CDF 1 - exp(-v^alpha / psi).
pub fn log_kernel(alpha: f64, psi: f64) -> Result<f64, MetricError> {
    let params = FoxHParams::new(2, 1, vec![(0.0, alpha)], vec![(0.0, 1.0), (0.0, alpha)])?;
    Ok(fox_h(&params, 1.0 / psi)?.max(0.0))
}

/// End-to-end energy efficiency in nats per (s·Hz·W). Requires a common
/// shape parameter across hops.
pub fn ee_e2e(
    chain: &HopChain,
    inventory: &PowerInventory,
    mode: Mode,
) -> Result<f64, MetricError> {
    inventory.validate()?;
    let alpha = chain.common_alpha().ok_or(MetricError::MixedShapes)?;
    let p_total = inventory.total_power_w(chain);
    if !(p_total > 0.0) {
        return Err(MetricError::Domain("total power must be positive".to_string()));
    }
    let inv_sum: f64 = chain.weibull_params().iter().map(|&(_, phi)| 1.0 / phi).sum();
    let psi = 1.0 / inv_sum;
    match mode {
        Mode::Exact => Ok(log_kernel(alpha, psi)? / p_total),
        Mode::Asymptotic => Ok((digamma(1.0)? + psi.ln()) / (alpha * p_total)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{HopChain, LinkBudget, WeibullHop};
    use crate::quad;

    fn test_chain(eirp: f64) -> HopChain {
        let hop = WeibullHop::from_beta(2.0, 1.0, 100.0, 200e6, eirp).unwrap();
        HopChain::new(vec![hop; 3], LinkBudget::default()).unwrap()
    }

    /// Quadrature oracle of ∫ exp(-v^alpha/psi)/(1+v) dv via v = e^u - 1,
    /// which flattens the long 1/(1+v) reach at high SNR.
    fn kernel_quadrature(alpha: f64, psi: f64) -> f64 {
        let u_max = (1.0 + (700.0 * psi).powf(1.0 / alpha)).ln();
        let (v, _) = quad::integrate(
            |u: f64| (-(u.exp() - 1.0).powf(alpha) / psi).exp(),
            0.0,
            u_max,
            1e-13,
        );
        v
    }

    #[test]
    fn kernel_matches_quadrature() {
        for &(alpha, psi) in &[(1.0, 4.0), (1.0, 500.0), (0.5, 20.0), (2.0, 1e4), (1.5, 0.8)] {
            let got = log_kernel(alpha, psi).unwrap();
            let want = kernel_quadrature(alpha, psi);
            assert!(
                (got - want).abs() < 1e-6 * want.max(0.01),
                "alpha={alpha} psi={psi}: got {got:.10e} want {want:.10e}"
            );
        }
    }

    #[test]
    fn circuit_power_bookkeeping() {
        let inv = PowerInventory {
            tx_circuit_w: 0.1,
            rx_circuit_w: 0.2,
            modulation_w: 0.05,
            demodulation_w: 0.05,
            idle_w: 0.01,
        };
        // N (t+r+m+d) + (N+1) idle
        let want = 3.0 * 0.4 + 4.0 * 0.01;
        assert!((inv.circuit_power_w(3) - want).abs() < 1e-15);
    }

    #[test]
    fn doubling_total_power_halves_ee() {
        let chain = test_chain(30.0);
        let inv1 = PowerInventory::uniform(0.5);
        let ee1 = ee_e2e(&chain, &inv1, Mode::Exact).unwrap();
        // Double the total power via the circuit share.
        let p1 = inv1.total_power_w(&chain);
        let inv2 = PowerInventory::uniform((2.0 * p1
            - chain.hops.iter().map(|h| dbm_to_watt(h.tx_power_dbm)).sum::<f64>())
            / 3.0);
        let ee2 = ee_e2e(&chain, &inv2, Mode::Exact).unwrap();
        assert!(
            (ee1 / ee2 - 2.0).abs() < 1e-9,
            "ratio {}",
            ee1 / ee2
        );
    }

    #[test]
    fn asymptote_tightens_at_high_snr() {
        let inv = PowerInventory::uniform(0.5);
        let mut prev = f64::INFINITY;
        for eirp in [20.0, 30.0, 40.0, 50.0] {
            let chain = test_chain(eirp);
            let exact = ee_e2e(&chain, &inv, Mode::Exact).unwrap();
            let asym = ee_e2e(&chain, &inv, Mode::Asymptotic).unwrap();
            let rel = (exact - asym).abs() / exact;
            assert!(rel < prev, "EIRP {eirp}: rel {rel}");
            prev = rel;
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn mixed_shapes_rejected() {
        let budget = LinkBudget::default();
        let h1 = WeibullHop::from_beta(2.0, 1.0, 100.0, 200e6, 30.0).unwrap();
        let h2 = WeibullHop::from_beta(1.0, 1.0, 100.0, 200e6, 30.0).unwrap();
        let chain = HopChain::new(vec![h1, h2], budget).unwrap();
        let inv = PowerInventory::uniform(0.5);
        assert!(matches!(
            ee_e2e(&chain, &inv, Mode::Exact),
            Err(MetricError::MixedShapes)
        ));
    }
}
