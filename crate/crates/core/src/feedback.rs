//! Closed-loop fine tuning of the transmit polarization angle from UE PSI
//! reports.
//!
//! The UE reports its mean receive polarization angle `atan(sqrt(XPD_mps))`
//! and the PSI, from which the transmitter knows whether raising `alpha`
//! raises or lowers that angle. The transmitter then steps its polarization
//! angle `atan(sqrt(alpha / beta))` toward the antenna's angle
//! `atan(sqrt(XPD_rx))`, halving the step each time the error changes sign.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::allocation::PowerSplit;
use crate::channel::PolarizedChannel;
use crate::error::{Error, Result};
use crate::polmath::{rx_antenna_xpd, AngleDeg, Ratio};
use crate::psi::{estimate_psi, xpd_mps};
use crate::seeding;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackConfig {
    pub init_alpha: f64,
    pub step0_deg: f64,
    pub tol_deg: f64,
    pub max_iter: usize,
    /// Standard deviation of Gaussian noise on the reported angle (degrees);
    /// zero for genie reports.
    pub report_noise_deg: f64,
    pub seed: u64,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        FeedbackConfig {
            init_alpha: 0.5,
            step0_deg: 5.0,
            tol_deg: 0.1,
            max_iter: 64,
            report_noise_deg: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackStep {
    pub iteration: usize,
    pub alpha: f64,
    pub measured_xpd_mps: Ratio,
    /// Reported minus target receive polarization angle.
    pub error_deg: f64,
    /// Step size that will be used for the next move.
    pub step_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackTrace {
    pub iterations: Vec<FeedbackStep>,
    pub converged: bool,
    pub boundary_hit: bool,
}

impl FeedbackTrace {
    pub fn last(&self) -> &FeedbackStep {
        self.iterations.last().expect("trace always holds the initial report")
    }

    /// Smallest |error| seen up to and including each iteration.
    pub fn running_best_error(&self) -> Vec<f64> {
        self.iterations
            .iter()
            .scan(f64::INFINITY, |best, s| {
                *best = best.min(s.error_deg.abs());
                Some(*best)
            })
            .collect()
    }
}

/// `atan(sqrt(xpd))` in degrees; the infinite sentinel maps to 90.
pub fn mean_polarization_angle_deg(xpd: Ratio) -> f64 {
    match xpd {
        Ratio::Infinite => 90.0,
        Ratio::Finite(x) => x.sqrt().atan().to_degrees(),
    }
}

pub fn run_feedback_loop(
    ch: &PolarizedChannel,
    rx_angle: AngleDeg,
    cfg: &FeedbackConfig,
) -> Result<FeedbackTrace> {
    if !(cfg.tol_deg > 0.0) || !(cfg.step0_deg > 0.0) {
        return Err(Error::Config("tolerance and initial step must be positive".into()));
    }
    if cfg.max_iter == 0 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    if !(cfg.report_noise_deg >= 0.0) {
        return Err(Error::Config("report noise must be non-negative".into()));
    }
    let mut split = PowerSplit::new(cfg.init_alpha)?;
    let psi = estimate_psi(ch, None)?;
    psi.validate_positive()
        .map_err(|e| Error::Domain(format!("cannot run feedback on this channel: {e}")))?;

    let target_deg = mean_polarization_angle_deg(rx_antenna_xpd(rx_angle));
    // +1 when raising alpha raises the XPD of the superposition
    let slope_sign = (psi.xpd_n.value() - psi.xpd_p.value()).signum();
    let mut rng = seeding::stream_rng(cfg.seed, seeding::DOMAIN_FEEDBACK);
    let mut report = |split: PowerSplit| {
        let xpd = xpd_mps(&psi, split.alpha());
        let mut angle = mean_polarization_angle_deg(xpd);
        if cfg.report_noise_deg > 0.0 {
            angle += cfg.report_noise_deg * rng.sample::<f64, _>(StandardNormal);
        }
        (xpd, angle - target_deg)
    };

    let mut step = cfg.step0_deg;
    let (xpd, mut err) = report(split);
    let mut trace = FeedbackTrace {
        iterations: vec![FeedbackStep {
            iteration: 0,
            alpha: split.alpha(),
            measured_xpd_mps: xpd,
            error_deg: err,
            step_deg: step,
        }],
        converged: err.abs() < cfg.tol_deg,
        boundary_hit: false,
    };
    if trace.converged || slope_sign == 0.0 {
        return Ok(trace);
    }

    for iteration in 1..=cfg.max_iter {
        let tx = split.tx_angle_deg();
        let next_tx = (tx - err.signum() * slope_sign * step).clamp(0.0, 90.0);
        if next_tx == tx {
            trace.boundary_hit = true;
            break;
        }
        split = PowerSplit::from_tx_angle_deg(next_tx);
        let (xpd, next_err) = report(split);
        if next_err.signum() != err.signum() {
            step *= 0.5;
        }
        err = next_err;
        trace.iterations.push(FeedbackStep {
            iteration,
            alpha: split.alpha(),
            measured_xpd_mps: xpd,
            error_deg: err,
            step_deg: step,
        });
        if err.abs() < cfg.tol_deg {
            trace.converged = true;
            break;
        }
        if next_tx == 0.0 || next_tx == 90.0 {
            // pinned at an endpoint and the error still asks to go further
            let push = -err.signum() * slope_sign;
            if (next_tx == 90.0 && push > 0.0) || (next_tx == 0.0 && push < 0.0) {
                trace.boundary_hit = true;
                break;
            }
        }
    }
    Ok(trace)
}

pub const TRACE_CSV_HEADER: &str = "iteration,alpha,measured_xpd_mps_db,error_deg,step_deg";

pub fn trace_csv(trace: &FeedbackTrace) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    for s in &trace.iterations {
        let db = s
            .measured_xpd_mps
            .to_db()
            .map(|d| d.to_string())
            .unwrap_or_else(|_| "inf".into());
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.iteration, s.alpha, db, s.error_deg, s.step_deg
        ));
    }
    out
}
