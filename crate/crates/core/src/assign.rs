//! Subcarrier assignment for superposed dual-beam transmission.
//!
//! 1. Drop the `eta` percent of subcarriers with the lowest total gain
//!    `|h_nn|^2 + |h_pn|^2 + |h_np|^2 + |h_pp|^2`.
//! 2. Estimate PSI over the survivors and derive the power split.
//! 3. Evaluate the statistical XPD of the superposition at that split.
//! 4. Keep the `n_select` survivors whose per-subcarrier XPD is closest to
//!    it in log-XPD.
//!
//! Both rankings are full sorts with the subcarrier index as tie-break, so
//! plans are deterministic and the cost is dominated by `O(n log n)`.

use std::cmp::Ordering;
use std::time::Instant;

use crate::allocation::{allocate, PowerSplit};
use crate::channel::{generate_statistical_channel, ChannelGenConfig, PolarizedChannel};
use crate::error::{Error, Result};
use crate::polmath::{log_distance, Ratio};
use crate::psi::{estimate_psi, subcarrier_xpd_unchecked, xpd_mps, PsiStats};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssignConfig {
    /// Percentile of low-gain subcarriers screened out, in [0, 100).
    pub eta_percent: f64,
    /// Number of subcarriers to assign.
    pub n_select: usize,
}

impl Default for AssignConfig {
    /// 35 % screening and one 48-subcarrier resource block.
    fn default() -> Self {
        AssignConfig {
            eta_percent: 35.0,
            n_select: 48,
        }
    }
}

impl AssignConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..100.0).contains(&self.eta_percent) {
            return Err(Error::Config(format!(
                "eta must lie in [0, 100), got {}",
                self.eta_percent
            )));
        }
        if self.n_select == 0 {
            return Err(Error::Config("n_select must be positive".into()));
        }
        Ok(())
    }
}

/// `ceil((1 - eta / 100) * n_total)`, computed so that exact products are not
/// pushed up by rounding noise.
pub fn survivor_count(n_total: usize, eta_percent: f64) -> usize {
    let exact = (100.0 - eta_percent) * n_total as f64 / 100.0;
    let nearest = exact.round();
    let count = if (exact - nearest).abs() < 1e-9 {
        nearest
    } else {
        exact.ceil()
    };
    count as usize
}

/// How the power split is chosen in step 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    /// XPD/XPR-aware allocation toward the receive antenna's XPD.
    XpdXpr { target_xpd: Ratio },
    /// A caller-chosen split; screening and selection still run.
    Fixed(PowerSplit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionPlan {
    pub psi: PsiStats,
    pub split: PowerSplit,
    pub xpd_mps_target: Ratio,
    /// Selected subcarriers, strictly increasing.
    pub subcarriers: Vec<usize>,
    pub survivor_count: usize,
    /// Survivors of the gain screening, strictly increasing.
    pub survivors: Vec<usize>,
}

pub fn screening_gain(h: &[num_complex::Complex64; 4]) -> f64 {
    h.iter().map(|x| x.norm_sqr()).sum()
}

pub fn plan_transmission(
    ch: &PolarizedChannel,
    target_xpd: Ratio,
    cfg: &AssignConfig,
) -> Result<TransmissionPlan> {
    plan_with_mode(ch, AlphaMode::XpdXpr { target_xpd }, cfg)
}

pub fn plan_with_mode(
    ch: &PolarizedChannel,
    mode: AlphaMode,
    cfg: &AssignConfig,
) -> Result<TransmissionPlan> {
    cfg.validate()?;
    let n_total = ch.n_subcarriers();
    let keep = survivor_count(n_total, cfg.eta_percent);
    if cfg.n_select > keep {
        return Err(Error::Config(format!(
            "n_select = {} exceeds the {keep} subcarriers that survive {}% screening of {n_total}",
            cfg.n_select, cfg.eta_percent
        )));
    }

    // step 1: strongest first, lower index on ties
    let gains: Vec<f64> = (0..n_total).map(|n| screening_gain(&ch.at(n))).collect();
    let mut order: Vec<usize> = (0..n_total).collect();
    order.sort_unstable_by(|&a, &b| gains[b].total_cmp(&gains[a]).then(a.cmp(&b)));
    let mut survivors = order;
    survivors.truncate(keep);
    survivors.sort_unstable();

    // step 2
    let psi = estimate_psi(ch, Some(&survivors))?;
    if psi.is_degenerate() {
        return Err(Error::Domain(format!(
            "survivor PSI is degenerate (a branch carries no energy): {psi:?}"
        )));
    }
    let split = match mode {
        AlphaMode::XpdXpr { target_xpd } => allocate(&psi, target_xpd)?,
        AlphaMode::Fixed(split) => split,
    };

    // step 3
    let target = xpd_mps(&psi, split.alpha());

    // step 4
    let mut ranked: Vec<(f64, usize)> = survivors
        .iter()
        .map(|&n| (log_distance(subcarrier_xpd_unchecked(ch.at(n), split), target), n))
        .collect();
    ranked.sort_unstable_by(|a, b| match a.0.total_cmp(&b.0) {
        Ordering::Equal => a.1.cmp(&b.1),
        other => other,
    });
    let mut subcarriers: Vec<usize> = ranked[..cfg.n_select].iter().map(|&(_, n)| n).collect();
    subcarriers.sort_unstable();

    Ok(TransmissionPlan {
        psi,
        split,
        xpd_mps_target: target,
        subcarriers,
        survivor_count: keep,
        survivors,
    })
}

/// One row of the plan report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanReportRow {
    pub index: usize,
    pub gain: f64,
    pub xpd_n_mps: Ratio,
    pub log_distance: f64,
    pub selected: bool,
}

pub const PLAN_CSV_HEADER: &str = "index,gain,xpd_n_mps,log_distance,selected";

pub fn plan_report(ch: &PolarizedChannel, plan: &TransmissionPlan) -> Vec<PlanReportRow> {
    let mut selected = plan.subcarriers.iter().peekable();
    (0..ch.n_subcarriers())
        .map(|n| {
            let h = ch.at(n);
            let xpd = subcarrier_xpd_unchecked(h, plan.split);
            let is_sel = selected.next_if_eq(&&n).is_some();
            PlanReportRow {
                index: n,
                gain: screening_gain(&h),
                xpd_n_mps: xpd,
                log_distance: log_distance(xpd, plan.xpd_mps_target),
                selected: is_sel,
            }
        })
        .collect()
}

pub fn plan_report_csv(rows: &[PlanReportRow]) -> String {
    let mut out = String::from(PLAN_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.index,
            r.gain,
            r.xpd_n_mps,
            r.log_distance,
            u8::from(r.selected)
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingRow {
    pub n_total: usize,
    pub median_secs: f64,
}

/// Median wall time of [`plan_transmission`] on synthetic channels of each
/// size in `n_list`. Channel generation is not timed.
pub fn assignment_complexity_probe(
    n_list: &[usize],
    repetitions: usize,
    psi: PsiStats,
    seed: u64,
) -> Result<Vec<TimingRow>> {
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be positive".into()));
    }
    let cfg = AssignConfig::default();
    n_list
        .iter()
        .map(|&n_total| {
            let ch = generate_statistical_channel(&ChannelGenConfig::new(psi, n_total, seed))?;
            let mut times = Vec::with_capacity(repetitions);
            for _ in 0..repetitions {
                let start = Instant::now();
                let plan = plan_transmission(&ch, Ratio::ONE, &cfg)?;
                times.push(start.elapsed().as_secs_f64());
                std::hint::black_box(plan);
            }
            times.sort_by(f64::total_cmp);
            Ok(TimingRow {
                n_total,
                median_secs: times[times.len() / 2],
            })
        })
        .collect()
}

/// Least-squares slope of `ln(time)` against `ln(n)`.
pub fn loglog_slope(rows: &[TimingRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n_total as f64).ln(), r.median_secs.ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
