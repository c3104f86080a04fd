//! XPD/XPR-aware transmit power split between the -45 and +45 degree beams.
//!
//! The closed form solves `xpd_mps(psi, alpha) = target` exactly. Because
//! `xpd_mps` is a Moebius function of `alpha` with its pole outside `[0, 1]`,
//! it is monotone on the interval: an interior solution is unique and, when
//! the target is out of reach, the best achievable split is the endpoint
//! whose XPD is nearer the target.

use std::fmt;

use crate::error::{Error, Result};
use crate::polmath::{log_distance, Ratio};
use crate::psi::{xpd_mps, PsiStats};

/// Power fractions `(alpha, beta)` on the (-45, +45) degree beams. `beta`
/// is always derived as `1 - alpha`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerSplit {
    alpha: f64,
}

impl PowerSplit {
    pub const MINUS_45_ONLY: PowerSplit = PowerSplit { alpha: 1.0 };
    pub const PLUS_45_ONLY: PowerSplit = PowerSplit { alpha: 0.0 };
    pub const EQUAL: PowerSplit = PowerSplit { alpha: 0.5 };

    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(PowerSplit { alpha })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn beta(self) -> f64 {
        1.0 - self.alpha
    }

    /// Transmit polarization angle `atan(sqrt(alpha / beta))` in degrees:
    /// 0 for the +45 beam alone, 90 for the -45 beam alone.
    pub fn tx_angle_deg(self) -> f64 {
        self.alpha.sqrt().atan2(self.beta().sqrt()).to_degrees()
    }

    /// Inverse of [`PowerSplit::tx_angle_deg`]; the angle is clamped to [0, 90].
    pub fn from_tx_angle_deg(deg: f64) -> Self {
        let s = deg.clamp(0.0, 90.0).to_radians().sin();
        PowerSplit {
            alpha: (s * s).clamp(0.0, 1.0),
        }
    }
}

impl fmt::Display for PowerSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha={}, beta={}", self.alpha, self.beta())
    }
}

/// Unclipped closed-form split,
/// `(X - XPD_P) / (XPD_P (XPR_N - 1) + X (1 - XPR_P))` with `X = target`.
///
/// The result may fall outside `[0, 1]`. An infinite target or a vanishing
/// denominator is reported as a domain error; [`allocate`] handles both by
/// endpoint selection.
pub fn alpha_hat(psi: &PsiStats, target_xpd: Ratio) -> Result<f64> {
    psi.validate_positive()?;
    let x = match target_xpd {
        Ratio::Finite(x) => x,
        Ratio::Infinite => {
            return Err(Error::Domain(
                "closed form is undefined for an infinite target XPD".into(),
            ))
        }
    };
    let (xpd_p, xpr_n, xpr_p) = (psi.xpd_p.value(), psi.xpr_n.value(), psi.xpr_p.value());
    let num = x - xpd_p;
    let den = xpd_p * (xpr_n - 1.0) + x * (1.0 - xpr_p);
    let scale = xpd_p * (xpr_n + 1.0) + x * (1.0 + xpr_p);
    if den.abs() <= 1e-14 * scale {
        return Err(Error::Domain(format!(
            "degenerate configuration: zero denominator for target {x}"
        )));
    }
    Ok(num / den)
}

/// The endpoint (alpha 0 or 1) whose XPD is closer to the target. Ties go to
/// alpha = 0.
fn nearest_endpoint(psi: &PsiStats, target: Ratio) -> PowerSplit {
    let f0 = xpd_mps(psi, 0.0).value();
    let f1 = xpd_mps(psi, 1.0).value();
    let t = target.value();
    let pick_one = if t >= f0.max(f1) {
        f1 > f0
    } else if t <= f0.min(f1) {
        f1 < f0
    } else {
        log_distance(Ratio::Finite(f1), target) < log_distance(Ratio::Finite(f0), target)
    };
    if pick_one {
        PowerSplit::MINUS_45_ONLY
    } else {
        PowerSplit::PLUS_45_ONLY
    }
}

/// XPD/XPR-aware power split.
///
/// Inside `[0, 1]` the closed form is returned unchanged. Otherwise the
/// endpoint nearer the target in log-XPD is chosen; this coincides with
/// plain clipping whenever no pole of `xpd_mps` lies between the clipped
/// endpoint and the unclipped solution.
pub fn allocate(psi: &PsiStats, target_xpd: Ratio) -> Result<PowerSplit> {
    psi.validate_positive()?;
    match alpha_hat(psi, target_xpd) {
        Ok(a) if (0.0..=1.0).contains(&a) => PowerSplit::new(a),
        _ => Ok(nearest_endpoint(psi, target_xpd)),
    }
}

/// Grid-search oracle: scans `alpha in {0, step, 2 step, ..., 1}` and keeps
/// the first minimizer of `|ln xpd_mps(alpha) - ln target|`. Zero and
/// infinite targets minimize / maximize `xpd_mps` instead.
pub fn brute_force_alpha(psi: &PsiStats, target_xpd: Ratio, grid_step: f64) -> Result<PowerSplit> {
    psi.validate_positive()?;
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::Domain(format!(
            "grid step must lie in (0, 0.1], got {grid_step}"
        )));
    }
    let cost = |alpha: f64| -> f64 {
        let f = xpd_mps(psi, alpha).ln();
        match target_xpd {
            Ratio::Infinite => -f,
            Ratio::Finite(t) if t == 0.0 => f,
            Ratio::Finite(t) => (f - t.ln()).abs(),
        }
    };
    let steps = (1.0 / grid_step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|k| (k as f64 * grid_step).min(1.0)).collect();
    if *grid.last().unwrap() < 1.0 {
        grid.push(1.0);
    }
    let mut best = (grid[0], cost(grid[0]));
    for &a in &grid[1..] {
        let c = cost(a);
        if c < best.1 {
            best = (a, c);
        }
    }
    PowerSplit::new(best.0)
}
