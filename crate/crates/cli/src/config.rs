//! Scenario files: flat `key = value` lines, `#` comments, comma-separated
//! lists. SNR lists also accept inclusive `start:step:stop` ranges.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mpsbeam_core::assign::AssignConfig;
use mpsbeam_core::sweep::AlphaChoice;
use mpsbeam_core::{ChannelGenConfig, FeedbackConfig, PowerSplit, PsiStats};

use crate::error::CliError;

/// First line of the config block embedded in every output file.
pub const EMBED_MARKER: &str = "## mpsbeam resolved config";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    SerSweep,
    EllipseTable,
    PowerCurve,
    AssignReport,
    FeedbackDemo,
    ChannelGen,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::SerSweep,
        Experiment::EllipseTable,
        Experiment::PowerCurve,
        Experiment::AssignReport,
        Experiment::FeedbackDemo,
        Experiment::ChannelGen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SerSweep => "ser-sweep",
            Experiment::EllipseTable => "ellipse-table",
            Experiment::PowerCurve => "power-curve",
            Experiment::AssignReport => "assign-report",
            Experiment::FeedbackDemo => "feedback-demo",
            Experiment::ChannelGen => "channel-gen",
        }
    }

    fn needs_channel(self) -> bool {
        !matches!(self, Experiment::EllipseTable | Experiment::PowerCurve)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Generated {
        /// XPD^N, XPD^P, XPR^N in dB.
        psi_db: [f64; 3],
        n_subcarriers: usize,
        n_taps: usize,
        pdp_decay_db: f64,
    },
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XpdScale {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XpdGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: XpdScale,
}

impl XpdGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let t = k as f64 / last;
                match self.scale {
                    XpdScale::Linear => self.min + t * (self.max - self.min),
                    XpdScale::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub experiment: Experiment,
    pub scenario: String,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub channel: ChannelSpec,
    pub realization_index: u64,
    pub rx_angle_deg: f64,
    pub alphas: Vec<AlphaChoice>,
    pub snr_db: Vec<f64>,
    pub symbols_per_point: u64,
    pub realizations: usize,
    pub assign: AssignConfig,
    pub xpd_grid: XpdGrid,
    pub delta_deg: Vec<f64>,
    pub rx_angles_deg: Vec<f64>,
    pub feedback: FeedbackConfig,
}

const KEYS: &[&str] = &[
    "experiment",
    "scenario",
    "output",
    "seed",
    "channel",
    "psi_db",
    "n_subcarriers",
    "n_taps",
    "pdp_decay_db",
    "channel_file",
    "realization_index",
    "rx_angle_deg",
    "alpha",
    "snr_db",
    "symbols_per_point",
    "realizations",
    "eta_percent",
    "n_select",
    "xpd_min",
    "xpd_max",
    "xpd_points",
    "xpd_scale",
    "delta_deg",
    "rx_angles_deg",
    "init_alpha",
    "step0_deg",
    "tol_deg",
    "max_iter",
    "report_noise_deg",
];

struct Entry {
    line: usize,
    value: String,
}

struct Raw {
    entries: BTreeMap<String, Entry>,
}

impl Raw {
    fn parse(text: &str) -> Result<Raw, CliError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {line_no}: expected `key = value`, found `{body}`"))
            })?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {line_no}: unknown key `{key}`")));
            }
            if let Some(prev) = entries.get(&key) {
                let prev: &Entry = prev;
                return Err(CliError::Config(format!(
                    "line {line_no}: key `{key}` already set on line {}",
                    prev.line
                )));
            }
            entries.insert(
                key,
                Entry {
                    line: line_no,
                    value: value.trim().to_string(),
                },
            );
        }
        Ok(Raw { entries })
    }

    fn err(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        match self.entries.get(key) {
            Some(e) => CliError::Config(format!("line {}: key `{key}`: {msg}", e.line)),
            None => CliError::Config(format!("key `{key}`: {msg}")),
        }
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.str(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| self.err(key, format!("cannot parse `{v}`"))),
        }
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.num(key, default)?;
        if !v.is_finite() {
            return Err(self.err(key, "value must be finite"));
        }
        Ok(v)
    }

    fn list(&self, key: &str) -> Option<Vec<&str>> {
        self.str(key).map(|v| v.split(',').map(str::trim).collect())
    }

    fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let Some(items) = self.list(key) else {
            return Ok(default.to_vec());
        };
        let mut out = Vec::new();
        for item in items {
            if item.contains(':') {
                out.extend(self.range(key, item)?);
                continue;
            }
            let v: f64 = item
                .parse()
                .map_err(|_| self.err(key, format!("cannot parse list item `{item}`")))?;
            if !v.is_finite() {
                return Err(self.err(key, "values must be finite"));
            }
            out.push(v);
        }
        if out.is_empty() {
            return Err(self.err(key, "list is empty"));
        }
        Ok(out)
    }

    fn range(&self, key: &str, item: &str) -> Result<Vec<f64>, CliError> {
        let parts: Vec<f64> = item
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| self.err(key, format!("cannot parse range `{item}`")))?;
        let [start, step, stop] = parts[..] else {
            return Err(self.err(key, format!("range `{item}` must be start:step:stop")));
        };
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(self.err(key, format!("range `{item}` needs step > 0 and stop >= start")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(self.err(key, format!("range `{item}` has too many points")));
        }
        Ok((0..count).map(|k| start + k as f64 * step).collect())
    }
}

fn parse_experiment(raw: &Raw) -> Result<Experiment, CliError> {
    let name = raw
        .str("experiment")
        .ok_or_else(|| CliError::Config("missing required key `experiment`".into()))?;
    Experiment::ALL
        .into_iter()
        .find(|e| e.name() == name)
        .ok_or_else(|| {
            let known: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            raw.err("experiment", format!("unknown experiment `{name}` (expected one of {})", known.join(", ")))
        })
}

fn parse_channel(raw: &Raw) -> Result<ChannelSpec, CliError> {
    match raw.str("channel").unwrap_or("generated") {
        "generated" => {
            let psi_db = match raw.f64_list("psi_db", &[])? {
                v if v.len() == 3 => [v[0], v[1], v[2]],
                v if v.is_empty() => {
                    return Err(CliError::Config(
                        "generated channel needs `psi_db = XPD_N, XPD_P, XPR_N` (dB)".into(),
                    ))
                }
                v => return Err(raw.err("psi_db", format!("expected 3 values, got {}", v.len()))),
            };
            Ok(ChannelSpec::Generated {
                psi_db,
                n_subcarriers: raw.num("n_subcarriers", 2048)?,
                n_taps: raw.num("n_taps", ChannelGenConfig::DEFAULT_TAPS)?,
                pdp_decay_db: raw.f64("pdp_decay_db", ChannelGenConfig::DEFAULT_DECAY_DB)?,
            })
        }
        "file" => {
            let path = raw
                .str("channel_file")
                .ok_or_else(|| raw.err("channel", "`channel = file` needs `channel_file`"))?;
            Ok(ChannelSpec::File(PathBuf::from(path)))
        }
        other => Err(raw.err("channel", format!("expected `generated` or `file`, got `{other}`"))),
    }
}

fn parse_alphas(raw: &Raw) -> Result<Vec<AlphaChoice>, CliError> {
    let Some(items) = raw.list("alpha") else {
        return Ok(vec![AlphaChoice::XpdXpr]);
    };
    items
        .into_iter()
        .map(|item| {
            if item == "xpd-xpr" {
                return Ok(AlphaChoice::XpdXpr);
            }
            let a: f64 = item
                .parse()
                .map_err(|_| raw.err("alpha", format!("expected a number in [0, 1] or `xpd-xpr`, got `{item}`")))?;
            PowerSplit::new(a).map_err(|e| raw.err("alpha", e))?;
            Ok(AlphaChoice::Fixed(a))
        })
        .collect()
}

impl ScenarioConfig {
    /// Parses and validates a scenario. Does not touch the file system.
    pub fn parse(text: &str) -> Result<ScenarioConfig, CliError> {
        let raw = Raw::parse(text)?;
        let experiment = parse_experiment(&raw)?;
        let channel = if experiment.needs_channel() {
            parse_channel(&raw)?
        } else {
            ChannelSpec::Generated {
                psi_db: [0.0; 3],
                n_subcarriers: 0,
                n_taps: 0,
                pdp_decay_db: 0.0,
            }
        };
        let rx_angle_deg = raw.f64("rx_angle_deg", 0.0)?;
        let defaults = FeedbackConfig::default();
        let seed = raw.num("seed", 0u64)?;
        let scale = match raw.str("xpd_scale").unwrap_or("log") {
            "log" => XpdScale::Log,
            "linear" => XpdScale::Linear,
            other => return Err(raw.err("xpd_scale", format!("expected `log` or `linear`, got `{other}`"))),
        };
        let cfg = ScenarioConfig {
            experiment,
            scenario: raw.str("scenario").unwrap_or(experiment.name()).to_string(),
            output: raw.str("output").map(PathBuf::from),
            seed,
            channel,
            realization_index: raw.num("realization_index", 0)?,
            rx_angle_deg,
            alphas: parse_alphas(&raw)?,
            snr_db: raw.f64_list("snr_db", &[0.0, 5.0, 10.0, 15.0, 20.0])?,
            symbols_per_point: raw.num("symbols_per_point", 10_000)?,
            realizations: raw.num("realizations", 1)?,
            assign: AssignConfig {
                eta_percent: raw.f64("eta_percent", 35.0)?,
                n_select: raw.num("n_select", 48)?,
            },
            xpd_grid: XpdGrid {
                min: raw.f64("xpd_min", 0.1)?,
                max: raw.f64("xpd_max", 40.0)?,
                points: raw.num("xpd_points", 201)?,
                scale,
            },
            delta_deg: raw.f64_list("delta_deg", &[0.0])?,
            rx_angles_deg: raw.f64_list("rx_angles_deg", &[rx_angle_deg])?,
            feedback: FeedbackConfig {
                init_alpha: raw.f64("init_alpha", defaults.init_alpha)?,
                step0_deg: raw.f64("step0_deg", defaults.step0_deg)?,
                tol_deg: raw.f64("tol_deg", defaults.tol_deg)?,
                max_iter: raw.num("max_iter", defaults.max_iter)?,
                report_noise_deg: raw.f64("report_noise_deg", defaults.report_noise_deg)?,
                seed,
            },
        };
        cfg.validate(&raw)?;
        Ok(cfg)
    }

    /// Reads a scenario file, or the config embedded in a previous output.
    pub fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        match extract_embedded(&text) {
            Some(embedded) => ScenarioConfig::parse(&embedded),
            None => ScenarioConfig::parse(&text),
        }
    }

    fn validate(&self, raw: &Raw) -> Result<(), CliError> {
        use Experiment::*;
        let e = self.experiment;
        if let ChannelSpec::Generated {
            psi_db,
            n_subcarriers,
            n_taps,
            pdp_decay_db,
        } = self.channel
        {
            if e.needs_channel() {
                let psi = PsiStats::from_db(psi_db[0], psi_db[1], psi_db[2]).map_err(|err| raw.err("psi_db", err))?;
                ChannelGenConfig {
                    target_psi: psi,
                    n_subcarriers,
                    n_taps,
                    pdp_decay_db_per_tap: pdp_decay_db,
                    seed: self.seed,
                }
                .validate()
                .map_err(|err| CliError::Config(format!("channel: {err}")))?;
            }
        }
        if matches!(e, SerSweep | AssignReport) {
            self.assign.validate().map_err(|err| CliError::Config(format!("assign: {err}")))?;
        }
        if e == SerSweep {
            if self.symbols_per_point == 0 {
                return Err(raw.err("symbols_per_point", "must be positive"));
            }
            if self.realizations == 0 {
                return Err(raw.err("realizations", "must be positive"));
            }
        }
        if e == AssignReport && self.alphas.len() != 1 {
            return Err(raw.err("alpha", "assign-report takes a single alpha choice"));
        }
        if matches!(e, EllipseTable | PowerCurve) {
            let g = self.xpd_grid;
            if !(g.min > 0.0) || g.max < g.min {
                return Err(raw.err("xpd_min", "XPD grid needs 0 < xpd_min <= xpd_max"));
            }
            if g.points == 0 {
                return Err(raw.err("xpd_points", "must be positive"));
            }
        }
        if e == FeedbackDemo {
            let f = self.feedback;
            PowerSplit::new(f.init_alpha).map_err(|err| raw.err("init_alpha", err))?;
            if !(f.step0_deg > 0.0) {
                return Err(raw.err("step0_deg", "must be positive"));
            }
            if !(f.tol_deg > 0.0) {
                return Err(raw.err("tol_deg", "must be positive"));
            }
            if f.max_iter == 0 {
                return Err(raw.err("max_iter", "must be at least 1"));
            }
            if f.report_noise_deg < 0.0 {
                return Err(raw.err("report_noise_deg", "must be non-negative"));
            }
        }
        Ok(())
    }

    /// Canonical `key = value` text of every setting the experiment uses,
    /// defaults filled in. Parsing it yields the same scenario (minus the
    /// output path, which is not part of the experiment).
    pub fn resolved(&self) -> String {
        use Experiment::*;
        let mut lines: Vec<(&str, String)> = vec![
            ("experiment", self.experiment.name().to_string()),
            ("scenario", self.scenario.clone()),
            ("seed", self.seed.to_string()),
        ];
        let e = self.experiment;
        if e.needs_channel() {
            match &self.channel {
                ChannelSpec::Generated {
                    psi_db,
                    n_subcarriers,
                    n_taps,
                    pdp_decay_db,
                } => {
                    lines.push(("channel", "generated".into()));
                    lines.push(("psi_db", join(psi_db)));
                    lines.push(("n_subcarriers", n_subcarriers.to_string()));
                    lines.push(("n_taps", n_taps.to_string()));
                    lines.push(("pdp_decay_db", pdp_decay_db.to_string()));
                }
                ChannelSpec::File(path) => {
                    lines.push(("channel", "file".into()));
                    lines.push(("channel_file", path.display().to_string()));
                }
            }
            if e != SerSweep {
                lines.push(("realization_index", self.realization_index.to_string()));
            }
        }
        match e {
            SerSweep => {
                lines.push(("rx_angle_deg", self.rx_angle_deg.to_string()));
                lines.push(("alpha", alpha_list(&self.alphas)));
                lines.push(("snr_db", join(&self.snr_db)));
                lines.push(("symbols_per_point", self.symbols_per_point.to_string()));
                lines.push(("realizations", self.realizations.to_string()));
                lines.push(("eta_percent", self.assign.eta_percent.to_string()));
                lines.push(("n_select", self.assign.n_select.to_string()));
            }
            AssignReport => {
                lines.push(("rx_angle_deg", self.rx_angle_deg.to_string()));
                lines.push(("alpha", alpha_list(&self.alphas)));
                lines.push(("eta_percent", self.assign.eta_percent.to_string()));
                lines.push(("n_select", self.assign.n_select.to_string()));
            }
            EllipseTable | PowerCurve => {
                let g = self.xpd_grid;
                lines.push(("xpd_min", g.min.to_string()));
                lines.push(("xpd_max", g.max.to_string()));
                lines.push(("xpd_points", g.points.to_string()));
                let scale = match g.scale {
                    XpdScale::Log => "log",
                    XpdScale::Linear => "linear",
                };
                lines.push(("xpd_scale", scale.into()));
                lines.push(("delta_deg", join(&self.delta_deg)));
                if e == PowerCurve {
                    lines.push(("rx_angles_deg", join(&self.rx_angles_deg)));
                }
            }
            FeedbackDemo => {
                let f = self.feedback;
                lines.push(("rx_angle_deg", self.rx_angle_deg.to_string()));
                lines.push(("init_alpha", f.init_alpha.to_string()));
                lines.push(("step0_deg", f.step0_deg.to_string()));
                lines.push(("tol_deg", f.tol_deg.to_string()));
                lines.push(("max_iter", f.max_iter.to_string()));
                lines.push(("report_noise_deg", f.report_noise_deg.to_string()));
            }
            ChannelGen => {}
        }
        let mut out = String::new();
        for (k, v) in lines {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// The resolved config as a comment block for output files.
    pub fn header_comment(&self) -> String {
        let mut out = String::from(EMBED_MARKER);
        out.push('\n');
        for line in self.resolved().lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

fn alpha_list(alphas: &[AlphaChoice]) -> String {
    alphas
        .iter()
        .map(|a| match a {
            AlphaChoice::XpdXpr => "xpd-xpr".to_string(),
            AlphaChoice::Fixed(v) => v.to_string(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Config text embedded in an output file, if it carries one.
pub fn extract_embedded(text: &str) -> Option<String> {
    let mut lines = text.lines().skip_while(|l| *l != EMBED_MARKER);
    lines.next()?;
    let mut out = String::new();
    for line in lines {
        match line.strip_prefix("# ") {
            Some(body) => {
                out.push_str(body);
                out.push('\n');
            }
            None => break,
        }
    }
    Some(out)
}
