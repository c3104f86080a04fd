//! Polarization state information (PSI): statistical XPD/XPR estimation and
//! the XPD of the superposed two-beam transmission.

use num_complex::Complex64;

use crate::allocation::PowerSplit;
use crate::channel::PolarizedChannel;
use crate::error::{Error, Result};
use crate::polmath::{db_to_linear, Ratio};

/// The four statistical polarization ratios, all linear.
///
/// * `xpd_n = S_nn / S_pn` (Tx at -45, Rx -45 over Rx +45)
/// * `xpd_p = S_np / S_pp` (Tx at +45, Rx -45 over Rx +45)
/// * `xpr_n = S_nn / S_np` (Rx at -45, Tx -45 over Tx +45)
/// * `xpr_p = S_pn / S_pp` (Rx at +45, Tx -45 over Tx +45)
///
/// where `S_xy` is the summed squared magnitude of branch `h_xy`. Only three
/// are free: `xpd_n / xpd_p == xpr_n / xpr_p` for any channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiStats {
    pub xpd_n: Ratio,
    pub xpd_p: Ratio,
    pub xpr_n: Ratio,
    pub xpr_p: Ratio,
}

impl PsiStats {
    /// Builds PSI from three linear values, closing `xpr_p` through
    /// `xpr_p = xpr_n * xpd_p / xpd_n`.
    pub fn from_linear(xpd_n: f64, xpd_p: f64, xpr_n: f64) -> Result<Self> {
        let psi = PsiStats {
            xpd_n: Ratio::new(xpd_n)?,
            xpd_p: Ratio::new(xpd_p)?,
            xpr_n: Ratio::new(xpr_n)?,
            xpr_p: Ratio::new(xpr_n * xpd_p / xpd_n)?,
        };
        psi.validate_positive()?;
        Ok(psi)
    }

    pub fn from_db(xpd_n_db: f64, xpd_p_db: f64, xpr_n_db: f64) -> Result<Self> {
        Self::from_linear(
            db_to_linear(xpd_n_db)?,
            db_to_linear(xpd_p_db)?,
            db_to_linear(xpr_n_db)?,
        )
    }

    pub fn from_branch_powers(p: &BranchPowers) -> Self {
        PsiStats {
            xpd_n: Ratio::from_powers(p.nn, p.pn),
            xpd_p: Ratio::from_powers(p.np, p.pp),
            xpr_n: Ratio::from_powers(p.nn, p.np),
            xpr_p: Ratio::from_powers(p.pn, p.pp),
        }
    }

    pub fn values(&self) -> [Ratio; 4] {
        [self.xpd_n, self.xpd_p, self.xpr_n, self.xpr_p]
    }

    /// True when some branch sum was zero and a ratio fell back to the
    /// infinite sentinel (or to zero).
    pub fn is_degenerate(&self) -> bool {
        !self.values().iter().all(|r| r.is_positive_finite())
    }

    pub fn validate_positive(&self) -> Result<()> {
        if self.is_degenerate() {
            return Err(Error::Config(format!(
                "PSI values must be positive and finite, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Relative mismatch between `xpd_n / xpd_p` and `xpr_n / xpr_p`.
    pub fn lemma_residual(&self) -> f64 {
        let lhs = self.xpd_n.value() / self.xpd_p.value();
        let rhs = self.xpr_n.value() / self.xpr_p.value();
        ((lhs - rhs) / lhs.abs().max(rhs.abs())).abs()
    }

    pub fn check_closure(&self, rel_tol: f64) -> Result<()> {
        let r = self.lemma_residual();
        if r.is_nan() || r > rel_tol {
            return Err(Error::Config(format!(
                "PSI violates xpd_n/xpd_p = xpr_n/xpr_p (relative residual {r:e})"
            )));
        }
        Ok(())
    }

    pub fn to_db(&self) -> Result<[f64; 4]> {
        Ok([
            self.xpd_n.to_db()?,
            self.xpd_p.to_db()?,
            self.xpr_n.to_db()?,
            self.xpr_p.to_db()?,
        ])
    }
}

/// Summed squared magnitude per branch over a set of subcarriers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BranchPowers {
    pub nn: f64,
    pub pn: f64,
    pub np: f64,
    pub pp: f64,
}

impl BranchPowers {
    pub fn accumulate(&mut self, other: &BranchPowers) {
        self.nn += other.nn;
        self.pn += other.pn;
        self.np += other.np;
        self.pp += other.pp;
    }
}

fn check_subset(ch: &PolarizedChannel, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::Domain("subcarrier subset is empty".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= ch.n_subcarriers()) {
        return Err(Error::Domain(format!(
            "subcarrier {bad} out of range (channel has {})",
            ch.n_subcarriers()
        )));
    }
    Ok(())
}

pub fn branch_powers(ch: &PolarizedChannel, subset: Option<&[usize]>) -> Result<BranchPowers> {
    let mut p = BranchPowers::default();
    let mut add = |n: usize| {
        let [nn, pn, np, pp] = ch.at(n);
        p.nn += nn.norm_sqr();
        p.pn += pn.norm_sqr();
        p.np += np.norm_sqr();
        p.pp += pp.norm_sqr();
    };
    match subset {
        Some(idx) => {
            check_subset(ch, idx)?;
            idx.iter().for_each(|&n| add(n));
        }
        None => (0..ch.n_subcarriers()).for_each(&mut add),
    }
    Ok(p)
}

/// Statistical PSI over `subset` (all subcarriers when `None`).
///
/// Zero branch sums map to the `Infinite` sentinel; check
/// [`PsiStats::is_degenerate`] before feeding the result to the allocator.
pub fn estimate_psi(ch: &PolarizedChannel, subset: Option<&[usize]>) -> Result<PsiStats> {
    Ok(PsiStats::from_branch_powers(&branch_powers(ch, subset)?))
}

/// Statistical XPD of the superposed transmission with `alpha` of the power
/// on the -45 degree beam:
///
/// `(a + b / XPR_N) / (a / XPD_N + b / (XPD_P * XPR_N))`, `b = 1 - a`.
///
/// The endpoints return `xpd_n` (alpha = 1) and `xpd_p` (alpha = 0) exactly.
///
/// # Panics
/// If `alpha` is outside `[0, 1]`.
pub fn xpd_mps(psi: &PsiStats, alpha: f64) -> Ratio {
    assert!((0.0..=1.0).contains(&alpha), "alpha {alpha} outside [0, 1]");
    if alpha == 1.0 {
        return psi.xpd_n;
    }
    if alpha == 0.0 {
        return psi.xpd_p;
    }
    let beta = 1.0 - alpha;
    let (xpd_n, xpd_p, xpr_n) = (psi.xpd_n.value(), psi.xpd_p.value(), psi.xpr_n.value());
    let num = alpha + beta / xpr_n;
    let den = alpha / xpd_n + beta / (xpd_p * xpr_n);
    Ratio::from_powers(num, den)
}

/// Instantaneous XPD of subcarrier `n` under `split`:
/// `|sqrt(a) h_nn + sqrt(b) h_np|^2 / |sqrt(a) h_pn + sqrt(b) h_pp|^2`.
pub fn per_subcarrier_xpd(ch: &PolarizedChannel, split: PowerSplit, n: usize) -> Result<Ratio> {
    if n >= ch.n_subcarriers() {
        return Err(Error::Domain(format!(
            "subcarrier {n} out of range (channel has {})",
            ch.n_subcarriers()
        )));
    }
    Ok(subcarrier_xpd_unchecked(ch.at(n), split))
}

pub(crate) fn subcarrier_xpd_unchecked(h: [Complex64; 4], split: PowerSplit) -> Ratio {
    let (a, b) = (split.alpha().sqrt(), split.beta().sqrt());
    let [nn, pn, np, pp] = h;
    let rx_n = nn * a + np * b;
    let rx_p = pn * a + pp * b;
    Ratio::from_powers(rx_n.norm_sqr(), rx_p.norm_sqr())
}
