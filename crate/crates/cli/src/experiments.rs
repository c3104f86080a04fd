use std::fmt::Write as _;

use mpsbeam_core::assign::{plan_report, plan_report_csv, plan_with_mode};
use mpsbeam_core::channel::channel_to_csv;
use mpsbeam_core::ellipse::{ellipse_params, received_power};
use mpsbeam_core::feedback::trace_csv;
use mpsbeam_core::link::{ser_csv_rows, SER_CSV_HEADER};
use mpsbeam_core::polmath::rx_antenna_xpd;
use mpsbeam_core::{
    allocate, estimate_psi, generate_statistical_channel, load_channel, run_feedback_loop, run_ser_sweep,
    AlphaChoice, AlphaMode, AngleDeg, ChannelGenConfig, ChannelSource, EllipseQuery, FeedbackConfig,
    PolarizedChannel, PowerSplit, PsiStats, Ratio, SweepSpec,
};

use crate::config::{ChannelSpec, Experiment, ScenarioConfig};
use crate::error::CliError;

/// Runs the experiment and returns the output body (without the config block).
pub fn run_experiment(cfg: &ScenarioConfig) -> Result<String, CliError> {
    match cfg.experiment {
        Experiment::SerSweep => ser_sweep(cfg),
        Experiment::EllipseTable => ellipse_table(cfg),
        Experiment::PowerCurve => power_curve(cfg),
        Experiment::AssignReport => assign_report(cfg),
        Experiment::FeedbackDemo => feedback_demo(cfg),
        Experiment::ChannelGen => Ok(channel_to_csv(&single_channel(cfg)?)),
    }
}

fn gen_config(cfg: &ScenarioConfig) -> Result<Option<ChannelGenConfig>, CliError> {
    match &cfg.channel {
        ChannelSpec::Generated {
            psi_db,
            n_subcarriers,
            n_taps,
            pdp_decay_db,
        } => Ok(Some(ChannelGenConfig {
            target_psi: PsiStats::from_db(psi_db[0], psi_db[1], psi_db[2])?,
            n_subcarriers: *n_subcarriers,
            n_taps: *n_taps,
            pdp_decay_db_per_tap: *pdp_decay_db,
            seed: cfg.seed,
        })),
        ChannelSpec::File(_) => Ok(None),
    }
}

/// Checks that a file-backed channel can be read.
pub fn check_inputs(cfg: &ScenarioConfig) -> Result<(), CliError> {
    if let ChannelSpec::File(path) = &cfg.channel {
        load_channel(path)?;
    }
    Ok(())
}

fn single_channel(cfg: &ScenarioConfig) -> Result<PolarizedChannel, CliError> {
    match (&cfg.channel, gen_config(cfg)?) {
        (_, Some(g)) => Ok(generate_statistical_channel(&g.realization(cfg.realization_index))?),
        (ChannelSpec::File(path), None) => Ok(load_channel(path)?),
        _ => unreachable!("generated specs always yield a generator config"),
    }
}

fn ser_sweep(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let source = match gen_config(cfg)? {
        Some(g) => ChannelSource::Generated(g),
        None => ChannelSource::Fixed(single_channel(cfg)?),
    };
    let spec = SweepSpec {
        source,
        realizations: cfg.realizations,
        rx_angle: AngleDeg(cfg.rx_angle_deg),
        alphas: cfg.alphas.clone(),
        snr_db: cfg.snr_db.clone(),
        symbols_per_point: cfg.symbols_per_point,
        assign: cfg.assign,
        seed: cfg.seed,
    };
    let blocks = run_ser_sweep(&spec)?;
    let mut out = String::from(SER_CSV_HEADER);
    out.push('\n');
    for b in &blocks {
        let id = format!("{}:{}", cfg.scenario, b.choice.label());
        out.push_str(&ser_csv_rows(&b.curve, b.mean_alpha(), spec.rx_angle, &id));
    }
    Ok(out)
}

fn ellipse_table(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let mut out = String::from("xpd,xpd_db,delta_deg,theta_deg,ecc_sq\n");
    for &delta in &cfg.delta_deg {
        for x in cfg.xpd_grid.values() {
            let xpd = Ratio::new(x)?;
            let p = ellipse_params(&EllipseQuery::new(xpd, AngleDeg(delta)))?;
            let _ = writeln!(out, "{x},{},{delta},{},{}", xpd.to_db()?, p.theta.degrees(), p.ecc_sq);
        }
    }
    Ok(out)
}

fn power_curve(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let mut out = String::from("xpd,xpd_db,delta_deg,rx_angle_deg,power\n");
    for &rx in &cfg.rx_angles_deg {
        for &delta in &cfg.delta_deg {
            for x in cfg.xpd_grid.values() {
                let xpd = Ratio::new(x)?;
                let q = EllipseQuery::new(xpd, AngleDeg(delta)).with_rx_angle(AngleDeg(rx));
                let _ = writeln!(out, "{x},{},{delta},{rx},{}", xpd.to_db()?, received_power(&q)?);
            }
        }
    }
    Ok(out)
}

fn psi_line(psi: &PsiStats) -> Result<String, CliError> {
    let [a, b, c, d] = psi.to_db()?;
    Ok(format!("xpd_n_db={a} xpd_p_db={b} xpr_n_db={c} xpr_p_db={d}"))
}

fn assign_report(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let ch = single_channel(cfg)?;
    let rx = AngleDeg(cfg.rx_angle_deg);
    let mode = match cfg.alphas[0] {
        AlphaChoice::XpdXpr => AlphaMode::XpdXpr {
            target_xpd: rx_antenna_xpd(rx),
        },
        AlphaChoice::Fixed(a) => AlphaMode::Fixed(PowerSplit::new(a)?),
    };
    let plan = plan_with_mode(&ch, mode, &cfg.assign)?;
    let mut out = String::new();
    let _ = writeln!(out, "## psi {}", psi_line(&plan.psi)?);
    let _ = writeln!(out, "## alpha {}", plan.split.alpha());
    let _ = writeln!(out, "## xpd_mps_target {}", plan.xpd_mps_target);
    let _ = writeln!(out, "## survivors {} of {}", plan.survivor_count, ch.n_subcarriers());
    let _ = writeln!(out, "## selected {}", plan.subcarriers.len());
    out.push_str(&plan_report_csv(&plan_report(&ch, &plan)));
    Ok(out)
}

fn feedback_demo(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let ch = single_channel(cfg)?;
    let rx = AngleDeg(cfg.rx_angle_deg);
    let fb = FeedbackConfig { seed: cfg.seed, ..cfg.feedback };
    let trace = run_feedback_loop(&ch, rx, &fb)?;
    let psi = estimate_psi(&ch, None)?;
    let closed = allocate(&psi, rx_antenna_xpd(rx))?;
    let mut out = String::new();
    let _ = writeln!(out, "## psi {}", psi_line(&psi)?);
    let _ = writeln!(out, "## converged {}", trace.converged);
    let _ = writeln!(out, "## boundary_hit {}", trace.boundary_hit);
    let _ = writeln!(out, "## final_alpha {}", trace.last().alpha);
    let _ = writeln!(out, "## closed_form_alpha {}", closed.alpha());
    out.push_str(&trace_csv(&trace));
    Ok(out)
}
