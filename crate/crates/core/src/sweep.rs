//! Multi-realization SER sweeps over several power-split choices.
//!
//! Every realization draws one channel and one link seed; all split choices
//! are evaluated on that same channel with that same seed, so differences
//! between curves come from the split alone. Counts are pooled across
//! realizations rather than averaging per-realization error rates.

use rayon::prelude::*;

use crate::allocation::PowerSplit;
use crate::assign::{plan_with_mode, AlphaMode, AssignConfig};
use crate::channel::{generate_statistical_channel, ChannelGenConfig, PolarizedChannel};
use crate::error::{Error, Result};
use crate::link::{run_ser_curve, LinkConfig, SerCurve};
use crate::polmath::{rx_antenna_xpd, AngleDeg};
use crate::seeding;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaChoice {
    XpdXpr,
    Fixed(f64),
}

impl AlphaChoice {
    pub fn label(&self) -> String {
        match self {
            AlphaChoice::XpdXpr => "xpd-xpr".to_string(),
            AlphaChoice::Fixed(a) => format!("alpha={a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSource {
    /// Fresh statistical channel per realization, seeded from the generator
    /// config and the realization index.
    Generated(ChannelGenConfig),
    /// The same channel for every realization (only the noise changes).
    Fixed(PolarizedChannel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub source: ChannelSource,
    pub realizations: usize,
    pub rx_angle: AngleDeg,
    pub alphas: Vec<AlphaChoice>,
    pub snr_db: Vec<f64>,
    pub symbols_per_point: u64,
    pub assign: AssignConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepBlock {
    pub choice: AlphaChoice,
    /// Pooled over realizations.
    pub curve: SerCurve,
    /// Split used in each realization, in realization order.
    pub alphas_used: Vec<f64>,
}

impl SweepBlock {
    pub fn mean_alpha(&self) -> f64 {
        self.alphas_used.iter().sum::<f64>() / self.alphas_used.len() as f64
    }
}

fn realization_channel(source: &ChannelSource, index: usize) -> Result<PolarizedChannel> {
    match source {
        ChannelSource::Generated(cfg) => generate_statistical_channel(&cfg.realization(index as u64)),
        ChannelSource::Fixed(ch) => Ok(ch.clone()),
    }
}

/// Curves of every split choice on realization `index`.
fn run_realization(spec: &SweepSpec, index: usize) -> Result<Vec<(SerCurve, f64)>> {
    let ch = realization_channel(&spec.source, index)?;
    let link_seed = seeding::derive_seed(spec.seed, seeding::DOMAIN_LINK, index as u64);
    let target_xpd = rx_antenna_xpd(spec.rx_angle);
    spec.alphas
        .iter()
        .map(|choice| {
            let mode = match *choice {
                AlphaChoice::XpdXpr => AlphaMode::XpdXpr { target_xpd },
                AlphaChoice::Fixed(a) => AlphaMode::Fixed(PowerSplit::new(a)?),
            };
            let plan = plan_with_mode(&ch, mode, &spec.assign)?;
            let link = LinkConfig {
                snr_db: spec.snr_db.clone(),
                symbols_per_point: spec.symbols_per_point,
                rx_angle: spec.rx_angle,
                split: plan.split,
                subcarriers: plan.subcarriers,
                seed: link_seed,
            };
            Ok((run_ser_curve(&ch, &link)?, plan.split.alpha()))
        })
        .collect()
}

/// Runs the sweep on the current rayon pool. Output does not depend on the
/// number of worker threads.
pub fn run_ser_sweep(spec: &SweepSpec) -> Result<Vec<SweepBlock>> {
    if spec.realizations == 0 {
        return Err(Error::Config("realizations must be positive".into()));
    }
    if spec.alphas.is_empty() {
        return Err(Error::Config("at least one alpha choice is required".into()));
    }
    if spec.snr_db.is_empty() {
        return Err(Error::Config("SNR grid is empty".into()));
    }
    let per_realization: Vec<Vec<(SerCurve, f64)>> = (0..spec.realizations)
        .into_par_iter()
        .map(|r| run_realization(spec, r))
        .collect::<Result<_>>()?;

    let mut blocks: Vec<SweepBlock> = spec
        .alphas
        .iter()
        .map(|&choice| SweepBlock {
            choice,
            curve: SerCurve::default(),
            alphas_used: Vec::with_capacity(spec.realizations),
        })
        .collect();
    for curves in &per_realization {
        for (block, (curve, alpha)) in blocks.iter_mut().zip(curves) {
            block.curve.pool(curve)?;
            block.alphas_used.push(*alpha);
        }
    }
    Ok(blocks)
}
