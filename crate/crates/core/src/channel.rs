//! Dual-polarized frequency-selective OFDM channels.
//!
//! A channel holds four frequency responses indexed by (Rx polarization,
//! Tx polarization), with `n` standing for -45 degrees and `p` for +45 degrees:
//!
//! | field  | Rx pol | Tx pol |
//! |--------|--------|--------|
//! | `h_nn` | -45    | -45    |
//! | `h_pn` | +45    | -45    |
//! | `h_np` | -45    | +45    |
//! | `h_pp` | +45    | +45    |
//!
//! The statistical generator draws an exponential power-delay profile per
//! branch and scales the branch powers so that the ensemble PSI matches a
//! target. It matches PSI only: the tap statistics of any particular
//! measured or ray-traced environment are not reproduced.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ChannelFileError, Error, Result};
use crate::psi::PsiStats;
use crate::seeding;

/// One of the four polarization branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    NN,
    PN,
    NP,
    PP,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::NN, Branch::PN, Branch::NP, Branch::PP];
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedChannel {
    h_nn: Vec<Complex64>,
    h_pn: Vec<Complex64>,
    h_np: Vec<Complex64>,
    h_pp: Vec<Complex64>,
}

impl PolarizedChannel {
    pub fn new(
        h_nn: Vec<Complex64>,
        h_pn: Vec<Complex64>,
        h_np: Vec<Complex64>,
        h_pp: Vec<Complex64>,
    ) -> Result<Self> {
        let n = h_nn.len();
        if n == 0 {
            return Err(Error::Config("channel needs at least one subcarrier".into()));
        }
        if h_pn.len() != n || h_np.len() != n || h_pp.len() != n {
            return Err(Error::Config(format!(
                "branch lengths differ: nn={}, pn={}, np={}, pp={}",
                n,
                h_pn.len(),
                h_np.len(),
                h_pp.len()
            )));
        }
        let all_finite = [&h_nn, &h_pn, &h_np, &h_pp]
            .iter()
            .all(|b| b.iter().all(|h| h.re.is_finite() && h.im.is_finite()));
        if !all_finite {
            return Err(Error::Domain("channel coefficients must be finite".into()));
        }
        Ok(PolarizedChannel {
            h_nn,
            h_pn,
            h_np,
            h_pp,
        })
    }

    /// Frequency-flat channel with the same four coefficients on every bin.
    pub fn flat(
        n_subcarriers: usize,
        nn: Complex64,
        pn: Complex64,
        np: Complex64,
        pp: Complex64,
    ) -> Result<Self> {
        Self::new(
            vec![nn; n_subcarriers],
            vec![pn; n_subcarriers],
            vec![np; n_subcarriers],
            vec![pp; n_subcarriers],
        )
    }

    pub fn n_subcarriers(&self) -> usize {
        self.h_nn.len()
    }

    pub fn h_nn(&self) -> &[Complex64] {
        &self.h_nn
    }

    pub fn h_pn(&self) -> &[Complex64] {
        &self.h_pn
    }

    pub fn h_np(&self) -> &[Complex64] {
        &self.h_np
    }

    pub fn h_pp(&self) -> &[Complex64] {
        &self.h_pp
    }

    pub fn branch(&self, branch: Branch) -> &[Complex64] {
        match branch {
            Branch::NN => &self.h_nn,
            Branch::PN => &self.h_pn,
            Branch::NP => &self.h_np,
            Branch::PP => &self.h_pp,
        }
    }

    /// `[h_nn, h_pn, h_np, h_pp]` at subcarrier `n`.
    pub fn at(&self, n: usize) -> [Complex64; 4] {
        [self.h_nn[n], self.h_pn[n], self.h_np[n], self.h_pp[n]]
    }

    /// Same channel with every branch multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let s = |v: &[Complex64]| v.iter().map(|h| h * c).collect();
        PolarizedChannel {
            h_nn: s(&self.h_nn),
            h_pn: s(&self.h_pn),
            h_np: s(&self.h_np),
            h_pp: s(&self.h_pp),
        }
    }
}

/// Parameters of the statistical channel generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGenConfig {
    pub target_psi: PsiStats,
    pub n_subcarriers: usize,
    pub n_taps: usize,
    pub pdp_decay_db_per_tap: f64,
    pub seed: u64,
}

impl ChannelGenConfig {
    pub const DEFAULT_TAPS: usize = 8;
    pub const DEFAULT_DECAY_DB: f64 = 1.0;

    pub fn new(target_psi: PsiStats, n_subcarriers: usize, seed: u64) -> Self {
        ChannelGenConfig {
            target_psi,
            n_subcarriers,
            n_taps: Self::DEFAULT_TAPS,
            pdp_decay_db_per_tap: Self::DEFAULT_DECAY_DB,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.target_psi.validate_positive()?;
        self.target_psi.check_closure(1e-9)?;
        if self.n_subcarriers == 0 {
            return Err(Error::Config("n_subcarriers must be positive".into()));
        }
        if self.n_taps == 0 || self.n_taps > self.n_subcarriers {
            return Err(Error::Config(format!(
                "n_taps must be in 1..={}, got {}",
                self.n_subcarriers, self.n_taps
            )));
        }
        if !(self.pdp_decay_db_per_tap >= 0.0) || !self.pdp_decay_db_per_tap.is_finite() {
            return Err(Error::Config(format!(
                "pdp decay must be finite and non-negative, got {}",
                self.pdp_decay_db_per_tap
            )));
        }
        Ok(())
    }

    /// Expected branch powers `[E|h_nn|^2, E|h_pn|^2, E|h_np|^2, E|h_pp|^2]`.
    pub fn branch_powers(&self) -> [f64; 4] {
        let psi = &self.target_psi;
        let (xpd_n, xpd_p, xpr_n) = (psi.xpd_n.value(), psi.xpd_p.value(), psi.xpr_n.value());
        [1.0, 1.0 / xpd_n, 1.0 / xpr_n, 1.0 / (xpd_p * xpr_n)]
    }

    /// Normalized exponential power-delay profile (sums to one).
    pub fn power_delay_profile(&self) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.n_taps)
            .map(|l| 10f64.powf(-self.pdp_decay_db_per_tap * l as f64 / 10.0))
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / total).collect()
    }

    /// Same configuration with the seed of the `index`-th realization.
    pub fn realization(&self, index: u64) -> Self {
        ChannelGenConfig {
            seed: seeding::derive_seed(self.seed, seeding::DOMAIN_CHANNEL, index),
            ..self.clone()
        }
    }
}

/// Time-domain taps of all four branches, already scaled to the target
/// branch powers.
pub fn generate_taps(cfg: &ChannelGenConfig) -> Result<[Vec<Complex64>; 4]> {
    cfg.validate()?;
    let pdp = cfg.power_delay_profile();
    let powers = cfg.branch_powers();
    let mut rng = seeding::stream_rng(cfg.seed, 0);
    let mut draw = |power: f64| -> Vec<Complex64> {
        pdp.iter()
            .map(|p| {
                let sigma = (0.5 * p * power).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(sigma * re, sigma * im)
            })
            .collect()
    };
    Ok([
        draw(powers[0]),
        draw(powers[1]),
        draw(powers[2]),
        draw(powers[3]),
    ])
}

/// `H[k] = sum_l h[l] exp(-j 2 pi k l / N)` over `n_bins` bins.
pub fn taps_to_frequency(taps: &[Complex64], n_bins: usize) -> Vec<Complex64> {
    // twiddle table indexed by (k * l) mod N keeps every phase exact
    let twiddle: Vec<Complex64> = (0..n_bins)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n_bins as f64))
        .collect();
    (0..n_bins)
        .map(|k| {
            taps.iter()
                .enumerate()
                .map(|(l, h)| h * twiddle[(k * l) % n_bins])
                .sum()
        })
        .collect()
}

pub fn generate_statistical_channel(cfg: &ChannelGenConfig) -> Result<PolarizedChannel> {
    let [nn, pn, np, pp] = generate_taps(cfg)?;
    let n = cfg.n_subcarriers;
    PolarizedChannel::new(
        taps_to_frequency(&nn, n),
        taps_to_frequency(&pn, n),
        taps_to_frequency(&np, n),
        taps_to_frequency(&pp, n),
    )
}

pub const CHANNEL_CSV_HEADER: &str = "n,re_nn,im_nn,re_pn,im_pn,re_np,im_np,re_pp,im_pp";
const CHANNEL_FIELDS: [&str; 9] = [
    "n", "re_nn", "im_nn", "re_pn", "im_pn", "re_np", "im_np", "re_pp", "im_pp",
];

/// Renders the channel CSV (header plus one row per subcarrier). Floats use
/// 17 significant digits so a load reproduces every coefficient bit for bit.
pub fn channel_to_csv(ch: &PolarizedChannel) -> String {
    let mut out = String::with_capacity(ch.n_subcarriers() * 220);
    out.push_str(CHANNEL_CSV_HEADER);
    out.push('\n');
    for n in 0..ch.n_subcarriers() {
        out.push_str(&n.to_string());
        for h in ch.at(n) {
            out.push_str(&format!(",{:.16e},{:.16e}", h.re, h.im));
        }
        out.push('\n');
    }
    out
}

pub fn save_channel(ch: &PolarizedChannel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |e: io::Error| ChannelFileError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut file = fs::File::create(path).map_err(io_err)?;
    file.write_all(channel_to_csv(ch).as_bytes()).map_err(io_err)?;
    Ok(())
}

pub fn load_channel(path: impl AsRef<Path>) -> Result<PolarizedChannel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            ChannelFileError::Missing(path.to_path_buf())
        } else {
            ChannelFileError::Io {
                path: path.to_path_buf(),
                message: e.to_string(),
            }
        }
    })?;
    Ok(parse_channel_csv(&text)?)
}

/// Parses channel CSV text. Blank lines and `#` comment lines are skipped;
/// reported line numbers are 1-based physical lines.
pub fn parse_channel_csv(text: &str) -> Result<PolarizedChannel, ChannelFileError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, header)) if header.replace(' ', "") == CHANNEL_CSV_HEADER => {}
        Some((line, _)) => {
            return Err(ChannelFileError::BadHeader {
                line,
                expected: CHANNEL_CSV_HEADER,
            })
        }
        None => return Err(ChannelFileError::Empty),
    }

    let mut branches: [Vec<Complex64>; 4] = Default::default();
    for (expected, (line, row)) in lines.enumerate() {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != CHANNEL_FIELDS.len() {
            return Err(ChannelFileError::FieldCount {
                line,
                expected: CHANNEL_FIELDS.len(),
                found: fields.len(),
            });
        }
        if fields[0].parse::<usize>().ok() != Some(expected) {
            return Err(ChannelFileError::IndexMismatch {
                line,
                expected,
                found: fields[0].to_string(),
            });
        }
        let mut values = [0.0; 8];
        for (k, v) in values.iter_mut().enumerate() {
            let raw = fields[k + 1];
            *v = match raw.parse::<f64>() {
                Ok(x) if x.is_finite() => x,
                _ => {
                    return Err(ChannelFileError::BadNumber {
                        line,
                        field: CHANNEL_FIELDS[k + 1],
                        value: raw.to_string(),
                    })
                }
            };
        }
        for (b, branch) in branches.iter_mut().enumerate() {
            branch.push(Complex64::new(values[2 * b], values[2 * b + 1]));
        }
    }
    if branches[0].is_empty() {
        return Err(ChannelFileError::Empty);
    }
    let [nn, pn, np, pp] = branches;
    Ok(PolarizedChannel { h_nn: nn, h_pn: pn, h_np: np, h_pp: pp })
}
