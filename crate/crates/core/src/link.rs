//! QPSK OFDM link over the superposed dual-beam transmission.
//!
//! Per assigned subcarrier the single linearly polarized receive antenna sees
//! `Y = sqrt(Es) H_eff s + w`, `w ~ CN(0, N0)`, with
//! `H_eff = p_x (sqrt(a) h_nn + sqrt(b) h_np) + p_y (sqrt(a) h_pn + sqrt(b) h_pp)`.
//! SNR is `Es / N0` at the receiver input, before channel gain, so
//! polarization mismatch shows up directly in the error rate. Detection is
//! zero-forcing followed by a nearest-point QPSK decision.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

use crate::allocation::PowerSplit;
use crate::channel::PolarizedChannel;
use crate::error::{Error, Result};
use crate::polmath::{rx_projection, AngleDeg};
use crate::seeding;

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub snr_db: Vec<f64>,
    pub symbols_per_point: u64,
    pub rx_angle: AngleDeg,
    pub split: PowerSplit,
    pub subcarriers: Vec<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SerCurve {
    pub snr_db: Vec<f64>,
    pub ser: Vec<f64>,
    pub errors: Vec<u64>,
    pub symbols: Vec<u64>,
    /// Assigned subcarriers whose effective channel is exactly zero; their
    /// decisions are uniform guesses.
    pub degenerate_subcarriers: Vec<usize>,
}

impl SerCurve {
    /// Pools counts point by point. Both curves must share the SNR grid.
    pub fn pool(&mut self, other: &SerCurve) -> Result<()> {
        if self.snr_db.is_empty() {
            *self = other.clone();
            return Ok(());
        }
        if self.snr_db != other.snr_db {
            return Err(Error::Config("cannot pool curves on different SNR grids".into()));
        }
        for i in 0..self.snr_db.len() {
            self.errors[i] += other.errors[i];
            self.symbols[i] += other.symbols[i];
            self.ser[i] = self.errors[i] as f64 / self.symbols[i] as f64;
        }
        for &n in &other.degenerate_subcarriers {
            if !self.degenerate_subcarriers.contains(&n) {
                self.degenerate_subcarriers.push(n);
            }
        }
        self.degenerate_subcarriers.sort_unstable();
        Ok(())
    }
}

/// Projected effective channel of every subcarrier.
pub fn effective_channel(
    ch: &PolarizedChannel,
    split: PowerSplit,
    rx_angle: AngleDeg,
) -> Vec<Complex64> {
    let (px, py) = rx_projection(rx_angle);
    let (a, b) = (split.alpha().sqrt(), split.beta().sqrt());
    (0..ch.n_subcarriers())
        .map(|n| {
            let [nn, pn, np, pp] = ch.at(n);
            (nn * a + np * b) * px + (pn * a + pp * b) * py
        })
        .collect()
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Gray-mapped unit-energy QPSK: bit 0 flips the real sign, bit 1 the
/// imaginary sign.
pub fn qpsk_point(symbol: u8) -> Complex64 {
    let re = if symbol & 1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    let im = if symbol & 2 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

/// Nearest QPSK point, i.e. the quadrant of `z`.
pub fn qpsk_decide(z: Complex64) -> u8 {
    u8::from(z.re < 0.0) | (u8::from(z.im < 0.0) << 1)
}

pub fn run_ser_curve(ch: &PolarizedChannel, cfg: &LinkConfig) -> Result<SerCurve> {
    if cfg.symbols_per_point == 0 {
        return Err(Error::Config("symbols_per_point must be positive".into()));
    }
    if cfg.subcarriers.is_empty() {
        return Err(Error::Config("no subcarriers assigned".into()));
    }
    if let Some(&bad) = cfg.subcarriers.iter().find(|&&n| n >= ch.n_subcarriers()) {
        return Err(Error::Config(format!(
            "assigned subcarrier {bad} out of range (channel has {})",
            ch.n_subcarriers()
        )));
    }
    if let Some(bad) = cfg.snr_db.iter().find(|s| !s.is_finite()) {
        return Err(Error::Config(format!("SNR must be finite, got {bad}")));
    }

    let full = effective_channel(ch, cfg.split, cfg.rx_angle);
    let heff: Vec<Complex64> = cfg.subcarriers.iter().map(|&n| full[n]).collect();
    let mut degenerate: Vec<usize> = cfg
        .subcarriers
        .iter()
        .zip(&heff)
        .filter(|(_, h)| h.norm_sqr() == 0.0)
        .map(|(&n, _)| n)
        .collect();
    degenerate.sort_unstable();
    degenerate.dedup();

    let mut curve = SerCurve {
        degenerate_subcarriers: degenerate,
        ..SerCurve::default()
    };
    for (point, &snr) in cfg.snr_db.iter().enumerate() {
        let errors = count_errors(&heff, snr, cfg.symbols_per_point, cfg.seed, point as u64);
        curve.snr_db.push(snr);
        curve.errors.push(errors);
        curve.symbols.push(cfg.symbols_per_point);
        curve.ser.push(errors as f64 / cfg.symbols_per_point as f64);
    }
    Ok(curve)
}

/// Symbol errors at one SNR point, with `Es = 1`. Symbol `k` goes out on
/// `heff[k % len]`; the random stream depends only on `(seed, point)`.
fn count_errors(heff: &[Complex64], snr_db: f64, symbols: u64, seed: u64, point: u64) -> u64 {
    let mut rng = seeding::stream_rng(seed, point);
    let noise_std = (0.5 * 10f64.powf(-snr_db / 10.0)).sqrt();
    let mut errors = 0;
    for k in 0..symbols {
        let h = heff[(k % heff.len() as u64) as usize];
        let sent: u8 = rng.random_range(0..4);
        let w = Complex64::new(
            noise_std * rng.sample::<f64, _>(StandardNormal),
            noise_std * rng.sample::<f64, _>(StandardNormal),
        );
        let decided = if h.norm_sqr() == 0.0 {
            // nothing but noise arrives; its quadrant is a uniform guess
            qpsk_decide(w)
        } else {
            // noise drawn in the phase reference of h: (w e^{j arg h}) / h = w / |h|
            qpsk_decide(qpsk_point(sent) + w / h.norm())
        };
        errors += u64::from(decided != sent);
    }
    errors
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Exact QPSK symbol error rate on AWGN, `2 Q(sqrt(g)) - Q(sqrt(g))^2` with
/// `g = Es / N0`.
pub fn awgn_qpsk_ser(snr_db: f64) -> f64 {
    let q = q_function(10f64.powf(snr_db / 20.0));
    2.0 * q - q * q
}

/// SNR at which the curve crosses `target_ser`, interpolating `log10(SER)`
/// linearly in dB between the first bracketing pair. `None` if the curve
/// never crosses or the bracketing points have zero errors.
pub fn snr_at_ser(snr_db: &[f64], ser: &[f64], target_ser: f64) -> Option<f64> {
    let t = target_ser.log10();
    snr_db
        .windows(2)
        .zip(ser.windows(2))
        .find_map(|(s, p)| {
            if !(p[0] >= target_ser && p[1] <= target_ser) || p[1] <= 0.0 {
                return None;
            }
            let (l0, l1) = (p[0].log10(), p[1].log10());
            if l0 == l1 {
                return Some(s[0]);
            }
            Some(s[0] + (t - l0) * (s[1] - s[0]) / (l1 - l0))
        })
}

pub const SER_CSV_HEADER: &str = "snr_db,ser,errors,symbols,alpha,rx_angle_deg,scenario_id";

/// SER rows for one curve block.
pub fn ser_csv_rows(curve: &SerCurve, alpha: f64, rx_angle: AngleDeg, scenario_id: &str) -> String {
    let mut out = String::new();
    for i in 0..curve.snr_db.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            curve.snr_db[i],
            curve.ser[i],
            curve.errors[i],
            curve.symbols[i],
            alpha,
            rx_angle.0,
            scenario_id
        ));
    }
    out
}
