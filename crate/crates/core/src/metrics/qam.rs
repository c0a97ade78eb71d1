//! Square M-QAM coefficient tables, exact AWGN bit error rate, and the
//! Gray-mapped constellation shared with the symbol-level simulator.

use thiserror::Error;

use crate::specfun::erfc;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QamError {
    #[error("modulation order must be a power of 4 (4, 16, 64, ...), got {0}")]
    InvalidOrder(u32),
}

/// SNR convention of the bit-error expressions.
///
/// `PerBit` keeps the log2(M) factor printed in the weight
/// `omega_n = 3 (2n+1)^2 log2(M) / (2M - 2)` and reads the SNR argument
/// as energy per bit over noise density. `PerSymbol` drops the log2(M)
/// factor and reads the argument as symbol SNR; both describe the same
/// physical link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnrConvention {
    #[default]
    PerBit,
    PerSymbol,
}

/// The nu_m, omega_n and Phi_{m,n} tables of a modulation order M.
#[derive(Debug, Clone, PartialEq)]
pub struct QamCoefficients {
    pub modulation_order: u32,
    pub convention: SnrConvention,
    /// log2(sqrt(M)): the number of bit classes m.
    pub bits_per_axis: u32,
    /// nu_m = (1 - 2^-m) sqrt(M) - 1 for m = 1..bits_per_axis.
    pub nu: Vec<u32>,
    /// omega_n for n = 0..max(nu_m).
    pub omega: Vec<f64>,
    /// phi[m-1][n] = Phi_{m,n}.
    pub phi: Vec<Vec<f64>>,
}

impl QamCoefficients {
    pub fn new(modulation_order: u32, convention: SnrConvention) -> Result<Self, QamError> {
        let m_f = modulation_order as f64;
        let sqrt_m = (m_f.sqrt()).round();
        let bits_per_axis = sqrt_m.log2();
        if sqrt_m * sqrt_m != m_f
            || bits_per_axis.fract() != 0.0
            || modulation_order < 4
        {
            return Err(QamError::InvalidOrder(modulation_order));
        }
        let bits_per_axis = bits_per_axis as u32;
        let log2_m = 2.0 * bits_per_axis as f64;
        let snr_factor = match convention {
            SnrConvention::PerBit => log2_m,
            SnrConvention::PerSymbol => 1.0,
        };
        let mut nu = Vec::new();
        for m in 1..=bits_per_axis {
            let v = (1.0 - 2f64.powi(-(m as i32))) * sqrt_m - 1.0;
            nu.push(v.round() as u32);
        }
        let n_max = *nu.iter().max().unwrap();
        let omega: Vec<f64> = (0..=n_max)
            .map(|n| 3.0 * ((2 * n + 1) as f64).powi(2) * snr_factor / (2.0 * (m_f - 1.0)))
            .collect();
        let mut phi = Vec::new();
        for m in 1..=bits_per_axis {
            let mut row = Vec::new();
            let pow = 2f64.powi(m as i32 - 1);
            for n in 0..=nu[(m - 1) as usize] {
                let ratio = n as f64 * pow / sqrt_m;
                let sign = if (ratio.floor() as i64) % 2 == 0 { 1.0 } else { -1.0 };
                row.push(sign * (pow - (ratio + 0.5).floor()));
            }
            phi.push(row);
        }
        Ok(Self { modulation_order, convention, bits_per_axis, nu, omega, phi })
    }

    /// Normalisation 1 / (sqrt(M) log2 sqrt(M)) of the double sum.
    pub fn norm(&self) -> f64 {
        1.0 / ((self.modulation_order as f64).sqrt() * self.bits_per_axis as f64)
    }

    /// Iterate (omega_n, Phi_{m,n}) over the double sum m = 1.., n = 0..nu_m.
    pub fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.phi.iter().flat_map(move |row| {
            row.iter().enumerate().map(move |(n, &w)| (self.omega[n], w))
        })
    }

    /// Exact instantaneous bit error rate over AWGN at SNR `gamma`
    /// (interpreted per the coefficient convention), clipped to [0, 1].
    pub fn awgn_ber(&self, gamma: f64) -> f64 {
        if gamma < 0.0 {
            return 0.5;
        }
        let mut sum = 0.0;
        for (omega, weight) in self.terms() {
            sum += weight * erfc((omega * gamma).sqrt());
        }
        (self.norm() * sum).clamp(0.0, 1.0)
    }
}

/// Gray-mapped square QAM constellation with unit average symbol energy.
///
/// Symbols are indexed by their bit label; each axis carries
/// `bits_per_axis` Gray-coded bits.
#[derive(Debug, Clone)]
pub struct GrayQam {
    pub order: u32,
    pub bits_per_axis: u32,
    /// Amplitude scale so that E[|x|^2] = 1.
    pub scale: f64,
    /// Gray-code level for each per-axis label.
    levels: Vec<i32>,
    /// Inverse map: level index (0..sqrt M) -> per-axis label.
    label_of_level: Vec<u32>,
}

impl GrayQam {
    pub fn new(order: u32) -> Result<Self, QamError> {
        let coeffs = QamCoefficients::new(order, SnrConvention::PerSymbol)?;
        let bits_per_axis = coeffs.bits_per_axis;
        let levels_per_axis = 1u32 << bits_per_axis;
        // Gray code: label g maps to binary index b, level 2b - (L-1).
        let mut levels = vec![0i32; levels_per_axis as usize];
        let mut label_of_level = vec![0u32; levels_per_axis as usize];
        for label in 0..levels_per_axis {
            let mut bin = label;
            let mut shift = bin >> 1;
            while shift != 0 {
                bin ^= shift;
                shift >>= 1;
            }
            levels[label as usize] = 2 * bin as i32 - (levels_per_axis as i32 - 1);
            label_of_level[bin as usize] = label;
        }
        let scale = (3.0 / (2.0 * (order as f64 - 1.0))).sqrt();
        Ok(Self { order, bits_per_axis, scale, levels, label_of_level })
    }

    pub fn bits_per_symbol(&self) -> u32 {
        2 * self.bits_per_axis
    }

    /// Map a bit label (low bits = I axis, high bits = Q axis) to the
    /// complex point (i, q).
    pub fn modulate(&self, label: u32) -> (f64, f64) {
        let mask = (1u32 << self.bits_per_axis) - 1;
        let i_label = label & mask;
        let q_label = (label >> self.bits_per_axis) & mask;
        (
            self.scale * self.levels[i_label as usize] as f64,
            self.scale * self.levels[q_label as usize] as f64,
        )
    }

    /// Minimum-distance detection of a received point back to a label.
    pub fn demodulate(&self, i: f64, q: f64) -> u32 {
        let detect_axis = |v: f64| -> u32 {
            let levels_per_axis = 1i32 << self.bits_per_axis;
            // nearest odd level index: level = 2b - (L-1)
            let b = ((v / self.scale + (levels_per_axis - 1) as f64) / 2.0).round() as i32;
            let b = b.clamp(0, levels_per_axis - 1);
            self.label_of_level[b as usize]
        };
        detect_axis(i) | (detect_axis(q) << self.bits_per_axis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_validation() {
        assert!(QamCoefficients::new(8, SnrConvention::PerBit).is_err());
        assert!(QamCoefficients::new(9, SnrConvention::PerBit).is_err());
        assert!(QamCoefficients::new(2, SnrConvention::PerBit).is_err());
        assert!(QamCoefficients::new(4, SnrConvention::PerBit).is_ok());
        assert!(QamCoefficients::new(256, SnrConvention::PerBit).is_ok());
    }

    #[test]
    fn qpsk_tables() {
        let c = QamCoefficients::new(4, SnrConvention::PerBit).unwrap();
        assert_eq!(c.nu, vec![0]);
        assert_eq!(c.phi, vec![vec![1.0]]);
        assert!((c.omega[0] - 1.0).abs() < 1e-15); // 3*1*2/6
        // BER(0) = erfc(0)/2 = 1/2
        assert!((c.awgn_ber(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sixteen_qam_matches_known_closed_form() {
        // Classic Gray 16-QAM BER (per-bit SNR):
        // (1/8)[3 erfc(sqrt(0.4 g)) + 2 erfc(3 sqrt(0.4 g)) - erfc(5 sqrt(0.4 g))]
        let c = QamCoefficients::new(16, SnrConvention::PerBit).unwrap();
        for g in [0.0, 1.0, 4.0, 10.0] {
            let got = c.awgn_ber(g);
            let b = (0.4 * g).sqrt();
            let want =
                (3.0 * erfc(b) + 2.0 * erfc(3.0 * b) - erfc(5.0 * b)) / 8.0;
            assert!((got - want).abs() < 1e-14, "g = {g}: {got} vs {want}");
        }
    }

    #[test]
    fn per_symbol_convention_drops_log2m() {
        let per_bit = QamCoefficients::new(16, SnrConvention::PerBit).unwrap();
        let per_symbol = QamCoefficients::new(16, SnrConvention::PerSymbol).unwrap();
        // Same BER when the symbol SNR is log2(M) times the bit SNR.
        let g = 2.3;
        assert!((per_bit.awgn_ber(g) - per_symbol.awgn_ber(4.0 * g)).abs() < 1e-14);
    }

    #[test]
    fn high_snr_ber_vanishes() {
        let c = QamCoefficients::new(16, SnrConvention::PerBit).unwrap();
        assert!(c.awgn_ber(1e4) < 1e-30);
    }

    #[test]
    fn gray_mapping_roundtrip_and_energy() {
        for order in [4u32, 16, 64, 256] {
            let qam = GrayQam::new(order).unwrap();
            let mut energy = 0.0;
            for label in 0..order {
                let (i, q) = qam.modulate(label);
                energy += i * i + q * q;
                assert_eq!(qam.demodulate(i, q), label, "order {order} label {label}");
            }
            energy /= order as f64;
            assert!((energy - 1.0).abs() < 1e-12, "order {order}: energy {energy}");
        }
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        let qam = GrayQam::new(64).unwrap();
        // Walk the I axis at fixed Q: adjacent levels must differ in
        // exactly one bit of the label (Gray property).
        let mut by_level: Vec<u32> = vec![0; 8];
        for label in 0..8u32 {
            let (i, _) = qam.modulate(label);
            let idx = ((i / qam.scale + 7.0) / 2.0).round() as usize;
            by_level[idx] = label;
        }
        for w in by_level.windows(2) {
            assert_eq!((w[0] ^ w[1]).count_ones(), 1, "{w:?}");
        }
    }
}
