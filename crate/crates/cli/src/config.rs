//! Flat `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Lists are comma separated.
//! Numbers may be written as `2^-9`.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `experiment` | solve, pdf_compare, convergence_sweep, mass_trace, kernel_check | solve |
//! | `alpha`, `p` | order and skewness | 0.5, 0.5 |
//! | `h`, `T` | mesh step and horizon | 2^-9, 1 |
//! | `x_min`, `x_max` | domain; defaults depend on the source | |
//! | `variant` | standard, advanced_source | standard |
//! | `source.kind` | wait_first, jump_first, standard_walk, monomial, sampled | wait_first |
//! | `source.mu` | exponent of the monomial source | 1 |
//! | `source.path` | CSV `n,i,value` for sampled sources | |
//! | `initial` | delta, zero; delta for walk sources | |
//! | `delta.K`, `delta.rescale` | cosine delta half width in cells, unit-mass rescale | 2, true |
//! | `output` | CSV path | `<experiment>.csv` |
//! | `times` | stored times for `solve`; empty means `T` | |
//! | `norms` | l1, l2, linf | l1,l2,linf |
//! | `sweep.h`, `sweep.alphas` | convergence sweep mesh sizes and orders | 2^-4..2^-9, `alpha` |
//! | `kernel.t`, `kernel.cutoff`, `kernel.extent`, `kernel.points` | kernel profile | 1, 16, 1.5 t, 301 |

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use fracwalk::{NormKind, SchemeVariant};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Solve,
    PdfCompare,
    ConvergenceSweep,
    MassTrace,
    KernelCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::PdfCompare => "pdf_compare",
            ExperimentKind::ConvergenceSweep => "convergence_sweep",
            ExperimentKind::MassTrace => "mass_trace",
            ExperimentKind::KernelCheck => "kernel_check",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "solve" => ExperimentKind::Solve,
            "pdf_compare" => ExperimentKind::PdfCompare,
            "convergence_sweep" => ExperimentKind::ConvergenceSweep,
            "mass_trace" => ExperimentKind::MassTrace,
            "kernel_check" => ExperimentKind::KernelCheck,
            other => return Err(format!("unknown experiment `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceName {
    WaitFirst,
    JumpFirst,
    StandardWalk,
    Monomial,
    Sampled,
}

impl SourceName {
    pub fn name(self) -> &'static str {
        match self {
            SourceName::WaitFirst => "wait_first",
            SourceName::JumpFirst => "jump_first",
            SourceName::StandardWalk => "standard_walk",
            SourceName::Monomial => "monomial",
            SourceName::Sampled => "sampled",
        }
    }
}

impl FromStr for SourceName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "wait_first" => SourceName::WaitFirst,
            "jump_first" => SourceName::JumpFirst,
            "standard_walk" => SourceName::StandardWalk,
            "monomial" => SourceName::Monomial,
            "sampled" => SourceName::Sampled,
            other => return Err(format!("unknown source kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    Delta,
    Zero,
}

impl FromStr for InitialKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta" => Ok(InitialKind::Delta),
            "zero" => Ok(InitialKind::Zero),
            other => Err(format!("expected `delta` or `zero`, got `{other}`")),
        }
    }
}

impl InitialKind {
    fn name(self) -> &'static str {
        match self {
            InitialKind::Delta => "delta",
            InitialKind::Zero => "zero",
        }
    }
}

/// Mesh size used by `--fine`.
pub const FINE_H: f64 = 1.0 / 2048.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub alpha: f64,
    pub p: f64,
    pub h: f64,
    pub t_final: f64,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub variant: SchemeVariant,
    pub source: SourceName,
    pub mu: f64,
    pub source_path: Option<PathBuf>,
    pub initial: Option<InitialKind>,
    pub delta_k: usize,
    pub delta_rescale: bool,
    pub output: Option<PathBuf>,
    pub times: Vec<f64>,
    pub norms: Vec<NormKind>,
    pub sweep_h: Vec<f64>,
    pub sweep_alphas: Vec<f64>,
    pub kernel_t: f64,
    pub kernel_cutoff: f64,
    pub kernel_extent: Option<f64>,
    pub kernel_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::Solve,
            alpha: 0.5,
            p: 0.5,
            h: 1.0 / 512.0,
            t_final: 1.0,
            x_min: None,
            x_max: None,
            variant: SchemeVariant::Standard,
            source: SourceName::WaitFirst,
            mu: 1.0,
            source_path: None,
            initial: None,
            delta_k: 2,
            delta_rescale: true,
            output: None,
            times: Vec::new(),
            norms: NormKind::ALL.to_vec(),
            sweep_h: (4..=9).map(|k| 0.5f64.powi(k)).collect(),
            sweep_alphas: Vec::new(),
            kernel_t: 1.0,
            kernel_cutoff: 16.0,
            kernel_extent: None,
            kernel_points: 301,
        }
    }
}

fn number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((base, exp)) = s.split_once('^') {
        let b: f64 = base.trim().parse().map_err(|_| format!("bad number `{s}`"))?;
        let e: i32 = exp.trim().parse().map_err(|_| format!("bad exponent in `{s}`"))?;
        return Ok(b.powi(e));
    }
    s.parse().map_err(|_| format!("bad number `{s}`"))
}

fn list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|v| item(v.trim())).collect()
}

fn boolean(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected true or false, got `{other}`")),
    }
}

fn count(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("expected a non-negative integer, got `{s}`"))
}

fn join<T>(v: &[T], f: impl Fn(&T) -> String) -> String {
    v.iter().map(f).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one key; the error names the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        let r: Result<(), String> = (|| {
            match key {
                "experiment" => self.experiment = value.parse()?,
                "alpha" => self.alpha = number(value)?,
                "p" => self.p = number(value)?,
                "h" => self.h = number(value)?,
                "T" => self.t_final = number(value)?,
                "x_min" => self.x_min = Some(number(value)?),
                "x_max" => self.x_max = Some(number(value)?),
                "variant" => self.variant = value.parse().map_err(|e: fracwalk::Error| e.to_string())?,
                "source.kind" => self.source = value.parse()?,
                "source.mu" => self.mu = number(value)?,
                "source.path" => self.source_path = Some(PathBuf::from(value)),
                "initial" => self.initial = Some(value.parse()?),
                "delta.K" => self.delta_k = count(value)?,
                "delta.rescale" => self.delta_rescale = boolean(value)?,
                "output" => self.output = Some(PathBuf::from(value)),
                "times" => self.times = list(value, number)?,
                "norms" => {
                    self.norms = list(value, |v| v.parse::<NormKind>().map_err(|e| e.to_string()))?;
                }
                "sweep.h" => self.sweep_h = list(value, number)?,
                "sweep.alphas" => self.sweep_alphas = list(value, number)?,
                "kernel.t" => self.kernel_t = number(value)?,
                "kernel.cutoff" => self.kernel_cutoff = number(value)?,
                "kernel.extent" => self.kernel_extent = Some(number(value)?),
                "kernel.points" => self.kernel_points = count(value)?,
                _ => return Err("unknown key".into()),
            }
            Ok(())
        })();
        r.map_err(|reason| CliError::Config(format!("config key `{key}`: {reason}")))
    }

    /// Parses a config file body.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`, got `{line}`", k + 1))
            })?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config(format!("line {}: config key `{key}` given twice", k + 1)));
            }
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), CliError> {
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override `{o}` is not of the form key=value")))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    /// Text that [`RunConfig::parse`] maps back to `self`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("experiment", self.experiment.name().into());
        put("alpha", self.alpha.to_string());
        put("p", self.p.to_string());
        put("h", self.h.to_string());
        put("T", self.t_final.to_string());
        if let Some(v) = self.x_min {
            put("x_min", v.to_string());
        }
        if let Some(v) = self.x_max {
            put("x_max", v.to_string());
        }
        put("variant", self.variant.name().into());
        put("source.kind", self.source.name().into());
        put("source.mu", self.mu.to_string());
        if let Some(p) = &self.source_path {
            put("source.path", p.display().to_string());
        }
        if let Some(i) = self.initial {
            put("initial", i.name().into());
        }
        put("delta.K", self.delta_k.to_string());
        put("delta.rescale", self.delta_rescale.to_string());
        if let Some(o) = &self.output {
            put("output", o.display().to_string());
        }
        put("times", join(&self.times, |t| t.to_string()));
        put("norms", join(&self.norms, |n| n.name().to_string()));
        put("sweep.h", join(&self.sweep_h, |h| h.to_string()));
        put("sweep.alphas", join(&self.sweep_alphas, |a| a.to_string()));
        put("kernel.t", self.kernel_t.to_string());
        put("kernel.cutoff", self.kernel_cutoff.to_string());
        if let Some(e) = self.kernel_extent {
            put("kernel.extent", e.to_string());
        }
        put("kernel.points", self.kernel_points.to_string());
        s
    }

    pub fn output_path(&self) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.experiment.name())))
    }
}
