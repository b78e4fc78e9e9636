//! Flat `key = value` run configuration.
//!
//! Unset window and quench keys take model-specific defaults (Dicke:
//! `τ = 1e7`, `Δτ = 250`, `δλ = 0.1`; small-world: `τ = 1e6`, `Δτ = 2500`,
//! `δW = 0.3`; synthetic: `δ = π/2`).

use std::fmt::Write as _;
use std::str::FromStr;

use diagent_core::dynamics::TimeWindow;
use diagent_core::models::{DickeParams, Model, Parity, SmallWorldParams, SyntheticParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Dicke,
    SmallWorld,
    Synthetic,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Dicke => "dicke",
            ModelKind::SmallWorld => "smallworld",
            ModelKind::Synthetic => "synthetic",
        }
    }
}

impl FromStr for ModelKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "dicke" => Ok(ModelKind::Dicke),
            "smallworld" => Ok(ModelKind::SmallWorld),
            "synthetic" => Ok(ModelKind::Synthetic),
            _ => Err(CliError::Config(format!("unknown model `{s}`"))),
        }
    }
}

/// Parameter varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    None,
    Lambda,
    Width,
    Delta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::None => "none",
            SweepParam::Lambda => "lambda",
            SweepParam::Width => "W",
            SweepParam::Delta => "delta",
        }
    }
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "none" => Ok(SweepParam::None),
            "lambda" => Ok(SweepParam::Lambda),
            "W" | "width" => Ok(SweepParam::Width),
            "delta" => Ok(SweepParam::Delta),
            _ => Err(CliError::Config(format!("unknown sweep parameter `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub model: ModelKind,
    pub seed: u64,
    pub delta: Option<f64>,
    pub n0: Vec<usize>,
    pub tau: Option<f64>,
    pub dtau: Option<f64>,
    pub samples: usize,
    pub s_max: u32,
    /// Unset means the model's default sweep.
    pub sweep: Option<SweepParam>,
    pub values: Option<Vec<f64>>,
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    /// `2j`.
    pub two_j: u32,
    pub n_t: u32,
    pub parity: i32,
    pub sites: usize,
    pub width: f64,
    pub p: f64,
    pub dim: usize,
    pub eps: Vec<f64>,
    /// Path prefix for auxiliary tables (ξ̄ values, disorder realization).
    pub export: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            model: ModelKind::SmallWorld,
            seed: 1,
            delta: None,
            n0: vec![10],
            tau: None,
            dtau: None,
            samples: TimeWindow::DEFAULT_SAMPLES,
            s_max: 6,
            sweep: None,
            values: None,
            omega: 1.0,
            omega0: 1.0,
            lambda: 0.5,
            two_j: 40,
            n_t: 250,
            parity: 1,
            sites: 512,
            width: 2.0,
            p: 0.06,
            dim: 200,
            eps: vec![1e-3, 2e-3, 4e-3],
            export: None,
        }
    }
}

fn config_err(key: &str, value: &str) -> CliError {
    CliError::Config(format!("bad value `{value}` for `{key}`"))
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| config_err(key, value))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse(key, t))
        .collect()
}

pub fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect(),
    }
}

pub fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `a,b,c`, `lin:lo:hi:n` or `geom:lo:hi:n`.
pub fn parse_values(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let value = value.trim();
    let grid = |rest: &str| -> Result<(f64, f64, usize), CliError> {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(config_err(key, value));
        }
        Ok((parse(key, parts[0])?, parse(key, parts[1])?, parse(key, parts[2])?))
    };
    let values = if let Some(rest) = value.strip_prefix("lin:") {
        let (lo, hi, n) = grid(rest)?;
        linear(lo, hi, n)
    } else if let Some(rest) = value.strip_prefix("geom:") {
        let (lo, hi, n) = grid(rest)?;
        if !(lo > 0.0 && hi > 0.0) {
            return Err(config_err(key, value));
        }
        geometric(lo, hi, n)
    } else {
        parse_list(key, value)?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(config_err(key, value));
    }
    Ok(values)
}

fn parse_j(key: &str, value: &str) -> Result<u32, CliError> {
    let j: f64 = parse(key, value)?;
    let two_j = 2.0 * j;
    if !(two_j >= 1.0) || two_j.fract() != 0.0 || two_j > u32::MAX as f64 {
        return Err(config_err(key, value));
    }
    Ok(two_j as u32)
}

fn fmt_list<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl Config {
    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "model" => self.model = value.parse()?,
            "seed" => self.seed = parse(key, value)?,
            "delta" => self.delta = Some(parse(key, value)?),
            "n0" => self.n0 = parse_list(key, value)?,
            "tau" => self.tau = Some(parse(key, value)?),
            "dtau" => self.dtau = Some(parse(key, value)?),
            "samples" => self.samples = parse(key, value)?,
            "s_max" => self.s_max = parse(key, value)?,
            "sweep" => self.sweep = Some(value.parse()?),
            "values" => self.values = Some(parse_values(key, value)?),
            "omega" => self.omega = parse(key, value)?,
            "omega0" => self.omega0 = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "j" => self.two_j = parse_j(key, value)?,
            "n_t" => self.n_t = parse(key, value)?,
            "parity" => self.parity = parse(key, value)?,
            "sites" => self.sites = parse(key, value)?,
            "W" | "width" => self.width = parse(key, value)?,
            "p" => self.p = parse(key, value)?,
            "dim" => self.dim = parse(key, value)?,
            "eps" => self.eps = parse_values(key, value)?,
            "export" => self.export = (!value.is_empty()).then(|| value.to_string()),
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(match self.model {
            ModelKind::Dicke => 0.1,
            ModelKind::SmallWorld => 0.3,
            ModelKind::Synthetic => std::f64::consts::FRAC_PI_2,
        })
    }

    /// Dicke sweeps λ across λ_c, small-world sweeps W, synthetic runs once.
    pub fn sweep(&self) -> SweepParam {
        self.sweep.unwrap_or(match self.model {
            ModelKind::Dicke => SweepParam::Lambda,
            ModelKind::SmallWorld => SweepParam::Width,
            ModelKind::Synthetic => SweepParam::None,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        match &self.values {
            Some(v) => v.clone(),
            None => match self.sweep() {
                SweepParam::Lambda => linear(0.1, 1.0, 13),
                SweepParam::Width => geometric(0.35, 35.0, 12),
                SweepParam::Delta => linear(0.1, 1.5, 8),
                SweepParam::None => Vec::new(),
            },
        }
    }

    pub fn window(&self) -> Result<TimeWindow, CliError> {
        let (tau, dtau) = match self.model {
            ModelKind::Dicke => (1e7, 250.0),
            _ => (1e6, 2500.0),
        };
        Ok(TimeWindow::new(
            self.tau.unwrap_or(tau),
            self.dtau.unwrap_or(dtau),
            self.samples,
        )?)
    }

    /// The model and quench strength at one sweep value.
    pub fn point(&self, value: Option<f64>) -> Result<(Model, f64), CliError> {
        let mut cfg = self.clone();
        if let Some(x) = value {
            match self.sweep() {
                SweepParam::None => {}
                SweepParam::Lambda => cfg.lambda = x,
                SweepParam::Width => cfg.width = x,
                SweepParam::Delta => cfg.delta = Some(x),
            }
        }
        let model = match self.model {
            ModelKind::Dicke => Model::Dicke(DickeParams {
                omega: cfg.omega,
                omega0: cfg.omega0,
                lambda: cfg.lambda,
                two_j: cfg.two_j,
                n_t: cfg.n_t,
                parity: Parity::from_sign(cfg.parity)?,
            }),
            ModelKind::SmallWorld => {
                Model::SmallWorld(SmallWorldParams::new(cfg.sites, cfg.width, cfg.p, cfg.seed)?)
            }
            ModelKind::Synthetic => Model::Synthetic(SyntheticParams {
                dim: cfg.dim,
                seed: cfg.seed,
            }),
        };
        Ok((model, cfg.delta()))
    }

    /// Sweep values, or a single unlabeled point when nothing is swept.
    pub fn sweep_points(&self) -> Vec<Option<f64>> {
        match self.sweep() {
            SweepParam::None => vec![None],
            _ => self.values().into_iter().map(Some).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let mismatch = matches!(
            (self.model, self.sweep()),
            (ModelKind::Dicke, SweepParam::Width)
                | (ModelKind::SmallWorld, SweepParam::Lambda)
                | (ModelKind::Synthetic, SweepParam::Lambda | SweepParam::Width)
        );
        if mismatch {
            return bad(format!(
                "sweep `{}` does not apply to model `{}`",
                self.sweep().name(),
                self.model.name()
            ));
        }
        if self.n0.is_empty() {
            return bad("n0 list is empty".into());
        }
        if self.s_max < 6 {
            return bad(format!("s_max must be at least 6 for O3, got {}", self.s_max));
        }
        if self.eps.iter().any(|&e| !(e > 0.0)) {
            return bad("eps values must be positive".into());
        }
        self.window()?;
        self.point(None)?;
        Ok(())
    }

    /// The resolved configuration, one `key = value` per line.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let window = self.window().ok();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("model", self.model.name().into());
        line("seed", self.seed.to_string());
        line("delta", self.delta().to_string());
        line("n0", fmt_list(&self.n0));
        if let Some(w) = window {
            line("tau", w.tau_start.to_string());
            line("dtau", w.tau_window.to_string());
        }
        line("samples", self.samples.to_string());
        line("s_max", self.s_max.to_string());
        line("sweep", self.sweep().name().into());
        line("values", fmt_list(&self.values()));
        match self.model {
            ModelKind::Dicke => {
                line("omega", self.omega.to_string());
                line("omega0", self.omega0.to_string());
                line("lambda", self.lambda.to_string());
                line("j", (self.two_j as f64 / 2.0).to_string());
                line("n_t", self.n_t.to_string());
                line("parity", self.parity.to_string());
            }
            ModelKind::SmallWorld => {
                line("sites", self.sites.to_string());
                line("W", self.width.to_string());
                line("p", self.p.to_string());
            }
            ModelKind::Synthetic => line("dim", self.dim.to_string()),
        }
        line("eps", fmt_list(&self.eps));
        if let Some(e) = &self.export {
            line("export", e.clone());
        }
        out
    }
}
