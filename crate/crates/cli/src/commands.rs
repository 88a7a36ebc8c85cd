//! One function per subcommand. Each writes its CSV and returns the lines
//! it reports on stdout.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fracwalk::experiments::{
    convergence_sweep, kernel_check, mass_trace, pdf_compare, walk_config, walk_half_width, SweepProblem, SweepSpec,
};
use fracwalk::io::{write_comparison, write_convergence, write_kernel, write_mass, write_solution};
use fracwalk::{
    delta_initial, solve, DeltaSpec, GridSpec, KernelQuery, ProfileKind, SampledSource, SolveConfig, SolverParams,
    SourceKind, SourceTerm,
};

use crate::config::{InitialKind, RunConfig, SourceName};
use crate::CliError;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| config_err(format!("config key `output`: cannot create {}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| config_err(format!("config key `output`: cannot write {}: {e}", path.display())))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| config_err(format!("config key `output`: cannot write {}: {e}", path.display())))
}

fn params(cfg: &RunConfig) -> Result<SolverParams, CliError> {
    Ok(SolverParams::new(cfg.alpha, cfg.p)?)
}

fn walk_kind(cfg: &RunConfig) -> Option<ProfileKind> {
    match cfg.source {
        SourceName::WaitFirst => Some(ProfileKind::WaitFirst),
        SourceName::JumpFirst => Some(ProfileKind::JumpFirst),
        SourceName::StandardWalk => Some(ProfileKind::StandardWalk),
        _ => None,
    }
}

fn require_walk(cfg: &RunConfig) -> Result<ProfileKind, CliError> {
    walk_kind(cfg).ok_or_else(|| {
        config_err(format!(
            "config key `source.kind`: `{}` needs one of wait_first, jump_first, standard_walk",
            cfg.source.name()
        ))
    })
}

fn delta(cfg: &RunConfig) -> Result<DeltaSpec, CliError> {
    Ok(DeltaSpec::new(cfg.delta_k)?.with_rescale(cfg.delta_rescale))
}

/// Mesh from the config, with source-dependent default bounds.
pub fn grid(cfg: &RunConfig) -> Result<GridSpec, CliError> {
    let (h, t) = (cfg.h, cfg.t_final);
    let default_half = match cfg.source {
        SourceName::Monomial => Some((2.0 * t / h).ceil() * h),
        SourceName::Sampled => None,
        _ => walk_kind(cfg).map(|k| walk_half_width(k, t, h)),
    };
    let (lo, hi) = match (cfg.x_min, cfg.x_max, default_half) {
        (Some(a), Some(b), _) => (a, b),
        (a, b, Some(w)) => (a.unwrap_or(-w), b.unwrap_or(w)),
        _ => return Err(config_err("config keys `x_min` and `x_max` are required for sampled sources")),
    };
    GridSpec::new(h, t, lo, hi).map_err(|e| config_err(format!("mesh (keys `h`, `T`, `x_min`, `x_max`): {e}")))
}

fn solve_config(cfg: &RunConfig) -> Result<SolveConfig, CliError> {
    let params = params(cfg)?;
    let grid = grid(cfg)?;
    let delta = delta(cfg)?;
    let kind = match cfg.source {
        SourceName::WaitFirst => SourceKind::WaitFirst,
        SourceName::JumpFirst => SourceKind::JumpFirst,
        SourceName::StandardWalk => SourceKind::StandardWalk,
        SourceName::Monomial => SourceKind::Monomial { mu: cfg.mu },
        SourceName::Sampled => {
            let path = cfg
                .source_path
                .as_ref()
                .ok_or_else(|| config_err("config key `source.path` is required for sampled sources"))?;
            let s = SampledSource::read_path(path)
                .map_err(|e| config_err(format!("config key `source.path` ({}): {e}", path.display())))?;
            SourceKind::Sampled(s)
        }
    };
    let initial = cfg.initial.unwrap_or(if walk_kind(cfg).is_some() {
        InitialKind::Delta
    } else {
        InitialKind::Zero
    });
    let init = match initial {
        InitialKind::Delta => delta_initial(&grid, delta)?,
        InitialKind::Zero => vec![0.0; grid.n_space()],
    };
    let source = SourceTerm::new(kind, params)?;
    Ok(SolveConfig::new(params, grid, source, init, cfg.variant)?.with_delta(delta)?)
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let sc = solve_config(cfg)?;
    let grid = sc.grid;
    let times = if cfg.times.is_empty() { vec![grid.t_final()] } else { cfg.times.clone() };
    let levels = times
        .iter()
        .map(|&t| {
            grid.time_level(t)
                .ok_or_else(|| config_err(format!("config key `times`: t = {t} is not a time level of the mesh")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let path = cfg.output_path();
    let mut w = create(&path)?;
    let history = solve(&sc)?;
    write_solution(&mut w, &history, &sc.params, sc.variant, &levels)?;
    finish(w, &path)?;
    Ok(vec![format!(
        "wrote {} cells x {} times to {}",
        grid.n_space(),
        levels.len(),
        path.display()
    )])
}

pub fn cmd_pdf_compare(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let kind = require_walk(cfg)?;
    let sc = walk_config(kind, params(cfg)?, grid(cfg)?, cfg.variant, delta(cfg)?)?;
    let path = cfg.output_path();
    let mut w = create(&path)?;
    let c = pdf_compare(&sc, kind)?;
    write_comparison(&mut w, &c.x, &c.numeric, &c.analytic)?;
    finish(w, &path)?;
    let mut out: Vec<String> = c
        .errors
        .iter()
        .map(|e| format!("{} error at T = {}: {:.6e}", e.norm_kind, e.measured_at, e.value))
        .collect();
    out.push(format!("wrote {}", path.display()));
    Ok(out)
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let problem = match cfg.source {
        SourceName::Monomial => SweepProblem::Monomial { mu: cfg.mu },
        SourceName::WaitFirst => SweepProblem::WaitFirst,
        other => {
            return Err(config_err(format!(
                "config key `source.kind`: sweeps support monomial and wait_first, got `{}`",
                other.name()
            )))
        }
    };
    if cfg.norms.is_empty() {
        return Err(config_err("config key `norms`: at least one norm is needed"));
    }
    let alphas = if cfg.sweep_alphas.is_empty() { vec![cfg.alpha] } else { cfg.sweep_alphas.clone() };
    let path = cfg.output_path();
    let mut w = create(&path)?;
    let mut rows = Vec::new();
    let mut out = Vec::new();
    for &alpha in &alphas {
        for &norm in &cfg.norms {
            let spec = SweepSpec {
                problem,
                params: SolverParams::new(alpha, cfg.p)?,
                t_final: cfg.t_final,
                hs: cfg.sweep_h.clone(),
                norm,
                variant: cfg.variant,
                delta: delta(cfg)?,
            };
            let (fit, r) = convergence_sweep(&spec)?;
            out.push(format!(
                "alpha = {alpha} {norm}: slope = {:.4} (r^2 = {:.5})",
                fit.slope, fit.r_squared
            ));
            rows.extend(r);
        }
    }
    write_convergence(&mut w, &rows)?;
    finish(w, &path)?;
    out.push(format!("wrote {}", path.display()));
    Ok(out)
}

pub fn cmd_mass(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let kind = require_walk(cfg)?;
    let params = params(cfg)?;
    let grid = grid(cfg)?;
    let path = cfg.output_path();
    let mut w = create(&path)?;
    let m = mass_trace(kind, params, grid, delta(cfg)?)?;
    write_mass(&mut w,
        &m.t,
        &[
            (fracwalk::SchemeVariant::Standard, m.standard.clone()),
            (fracwalk::SchemeVariant::AdvancedSource, m.advanced.clone()),
        ],
    )?;
    finish(w, &path)?;
    Ok(vec![
        format!("standard mass at T: {:.12}", m.standard.last().copied().unwrap_or(f64::NAN)),
        format!("advanced_source mass at T: {:.12}", m.advanced.last().copied().unwrap_or(f64::NAN)),
        format!("max |rho|: {:.3e}, advanced bound: {:.12}", m.max_rho, m.upper_bound(&params, &grid)),
        format!("wrote {}", path.display()),
    ])
}

pub fn cmd_kernel(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let q = KernelQuery::new(cfg.alpha, cfg.p)?;
    let t = cfg.kernel_t;
    if !(t > 0.0) {
        return Err(config_err(format!("config key `kernel.t`: must be positive, got {t}")));
    }
    if !(cfg.kernel_cutoff > 0.0) {
        return Err(config_err("config key `kernel.cutoff`: must be positive"));
    }
    let extent = cfg.kernel_extent.unwrap_or(1.5 * t);
    let path = cfg.output_path();
    let mut w = create(&path)?;
    let k = kernel_check(&q, t, cfg.kernel_cutoff / t, extent, cfg.kernel_points)?;
    write_kernel(&mut w, &k.x, &k.g)?;
    finish(w, &path)?;
    Ok(vec![
        format!("mass = {:.15}, expected t^(alpha-1)/Gamma(alpha) = {:.15}", k.mass, k.expected),
        format!("relative residual: {:.3e}", k.relative_residual()),
        format!("wrote {}", path.display()),
    ])
}
