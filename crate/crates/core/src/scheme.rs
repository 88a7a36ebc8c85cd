//! Explicit time marching for
//! `p δ_- u + (1-p) δ_+ u = f`:
//!
//! ```text
//! u_i^n = sum_{j<n} d_{n-j} (p u_{i+(n-j)}^j + (1-p) u_{i-(n-j)}^j)
//!         + h^alpha Γ(2-alpha) (p f_{i-1}^m + (1-p) f_{i+1}^m)
//! ```
//!
//! with `m = n` (standard) or `m = n + 1` (advanced source).

use log::warn;
use rayon::prelude::*;

use crate::coeffs::CoefficientTable;
use crate::error::{invalid, Error, Result};
use crate::history::SolutionHistory;
use crate::mesh::GridSpec;
use crate::params::SolverParams;
use crate::sources::{discretize_delta, source_values, DeltaSpec, SourceKind, SourceTerm};

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeVariant {
    Standard,
    AdvancedSource,
}

impl SchemeVariant {
    pub fn name(self) -> &'static str {
        match self {
            SchemeVariant::Standard => "standard",
            SchemeVariant::AdvancedSource => "advanced_source",
        }
    }

    /// Time level at which the source is sampled for row `n`.
    pub fn source_level(self, n: usize) -> usize {
        match self {
            SchemeVariant::Standard => n,
            SchemeVariant::AdvancedSource => n + 1,
        }
    }
}

impl std::str::FromStr for SchemeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(SchemeVariant::Standard),
            "advanced_source" | "advanced" => Ok(SchemeVariant::AdvancedSource),
            other => Err(invalid(
                "variant",
                format!("expected `standard` or `advanced_source`, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub params: SolverParams,
    pub grid: GridSpec,
    pub source: SourceTerm,
    pub delta: DeltaSpec,
    pub initial: Vec<f64>,
    pub variant: SchemeVariant,
    pub store_every: usize,
}

impl SolveConfig {
    pub fn new(
        params: SolverParams,
        grid: GridSpec,
        source: SourceTerm,
        initial: Vec<f64>,
        variant: SchemeVariant,
    ) -> Result<Self> {
        let cfg = Self {
            params,
            grid,
            source,
            delta: DeltaSpec::default(),
            initial,
            variant,
            store_every: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_delta(mut self, delta: DeltaSpec) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_store_every(mut self, store_every: usize) -> Result<Self> {
        self.store_every = store_every;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial.len() != self.grid.n_space() {
            return Err(Error::Mesh(format!(
                "initial condition has {} values, mesh has {} cells",
                self.initial.len(),
                self.grid.n_space()
            )));
        }
        if let Some(o) = self.initial.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                n: 0,
                i: self.grid.i_min() + o as i64,
                value: self.initial[o],
            });
        }
        if self.store_every == 0 {
            return Err(invalid("store_every", "must be at least 1"));
        }
        if self.source.params() != &self.params {
            return Err(invalid("source", "source parameters differ from the solver parameters"));
        }
        let last = self.variant.source_level(self.grid.n_time());
        match self.source.kind() {
            SourceKind::Sampled(s) => s.check_grid(&self.grid)?,
            SourceKind::WaitFirst | SourceKind::StandardWalk => {
                // the delta stencil plus the one-cell source shift must fit
                let reach = match self.source.kind() {
                    SourceKind::WaitFirst => 0.0,
                    _ => self.grid.t(last),
                } + (self.delta.k() + 1) as f64 * self.grid.h();
                let slack = 1e-9 * self.grid.h();
                if -reach < self.grid.x_min() - slack || reach > self.grid.x_max() + slack {
                    return Err(Error::Mesh(format!(
                        "the {} source reaches |x| = {reach} but the domain is [{}, {}]",
                        self.source.kind().name(),
                        self.grid.x_min(),
                        self.grid.x_max()
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `h sum psi = 1` within 1e-9, the hypothesis of the mass bound.
    pub fn check_unit_mass(&self) -> Result<()> {
        let m = self.grid.h() * self.initial.iter().sum::<f64>();
        if (m - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "mass tracking needs a unit-mass initial condition, got h·Σψ = {m}"
            )));
        }
        Ok(())
    }

    /// Time levels written out, every `store_every` steps plus the last one.
    pub fn stored_levels(&self) -> Vec<usize> {
        let n_time = self.grid.n_time();
        let mut v: Vec<usize> = (0..=n_time).step_by(self.store_every).collect();
        if v.last() != Some(&n_time) {
            v.push(n_time);
        }
        v
    }
}

/// Delta initial condition centred at the origin.
pub fn delta_initial(grid: &GridSpec, delta: DeltaSpec) -> Result<Vec<f64>> {
    discretize_delta(0.0, delta, grid)
}

fn source_term_row(cfg: &SolveConfig, n: usize) -> Result<Vec<f64>> {
    let m = cfg.variant.source_level(n);
    let f = source_values(&cfg.source, m, &cfg.grid, cfg.delta)?;
    let w = f.len();
    let scale = cfg.grid.h().powf(cfg.params.alpha()) * cfg.params.gamma_2ma();
    let (p, q) = (cfg.params.p(), cfg.params.q());
    Ok((0..w)
        .map(|o| {
            let left = if o >= 1 { f[o - 1] } else { 0.0 };
            let right = if o + 1 < w { f[o + 1] } else { 0.0 };
            scale * (p * left + q * right)
        })
        .collect())
}

fn check_step(history: &SolutionHistory, n: usize, coeffs: &CoefficientTable) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("row 0 is the initial condition; steps start at n = 1".into()));
    }
    if n > coeffs.n_time() {
        return Err(Error::Domain(format!(
            "time level {n} exceeds the coefficient table ({})",
            coeffs.n_time()
        )));
    }
    if history.len() < n {
        return Err(Error::MissingRow {
            requested: n - 1,
            available: history.len().saturating_sub(1),
        });
    }
    Ok(())
}

/// Row `n` from rows `0..n`, by the reference triple loop.
pub fn step_naive(
    history: &SolutionHistory,
    n: usize,
    cfg: &SolveConfig,
    coeffs: &CoefficientTable,
) -> Result<Vec<f64>> {
    check_step(history, n, coeffs)?;
    let (p, q) = (cfg.params.p(), cfg.params.q());
    let src = source_term_row(cfg, n)?;
    let grid = &cfg.grid;
    let mut out = Vec::with_capacity(grid.n_space());
    for (o, i) in grid.cell_indices().enumerate() {
        let mut acc = 0.0;
        for j in 0..n {
            let k = n - j;
            let ahead = history.value(j, i + k as i64)?;
            let behind = history.value(j, i - k as i64)?;
            acc += coeffs.d(k) * (p * ahead + q * behind);
        }
        out.push(acc + src[o]);
    }
    Ok(out)
}

/// Accumulate `d (p u[o + k] + q u[o - k])` into `acc` for cells
/// `base..base + acc.len()`, over the cells where at least one read is on
/// the mesh. Reads off the mesh are zero, as in [`step_naive`].
fn accumulate(acc: &mut [f64], base: usize, row: &[f64], k: usize, d: f64, p: f64, q: f64) {
    let w = row.len();
    let end = base + acc.len();
    let zero = 0.0;
    // both reads on the mesh: k <= o < w - k
    let both_lo = base.max(k);
    let both_hi = end.min(w.saturating_sub(k));
    // only the `o + k` read: o < k and o < w - k
    let ahead_hi = end.min(k).min(w.saturating_sub(k));
    for o in base..ahead_hi {
        acc[o - base] += d * (p * row[o + k] + q * zero);
    }
    if both_lo < both_hi {
        let ahead = &row[both_lo + k..both_hi + k];
        let behind = &row[both_lo - k..both_hi - k];
        let slot = &mut acc[both_lo - base..both_hi - base];
        for ((a, &u), &v) in slot.iter_mut().zip(ahead).zip(behind) {
            *a += d * (p * u + q * v);
        }
    }
    // only the `o - k` read: o >= k and o >= w - k
    let behind_lo = base.max(k).max(w.saturating_sub(k));
    for o in behind_lo..end {
        acc[o - base] += d * (p * zero + q * row[o - k]);
    }
}

/// Row `n` from rows `0..n`. Same arithmetic as [`step_naive`] in the same
/// order for every cell, so the two agree bit for bit.
pub fn step(history: &SolutionHistory, n: usize, cfg: &SolveConfig, coeffs: &CoefficientTable) -> Result<Vec<f64>> {
    check_step(history, n, coeffs)?;
    let (p, q) = (cfg.params.p(), cfg.params.q());
    let src = source_term_row(cfg, n)?;
    let d = coeffs.d_slice();
    let w = cfg.grid.n_space();
    let mut out = vec![0.0; w];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, slab)| {
        let base = c * CHUNK;
        for j in 0..n {
            let k = n - j;
            accumulate(slab, base, history.row_unchecked(j), k, d[k], p, q);
        }
        for (a, s) in slab.iter_mut().zip(&src[base..]) {
            *a += s;
        }
    });
    Ok(out)
}

fn warn_mesh(cfg: &SolveConfig) {
    let bound = cfg.params.stability_mesh_bound();
    if cfg.grid.h() > bound {
        warn!(
            "h = {} exceeds the stability bound h ≤ (1−α)^{{1/2α}} = {bound} for alpha = {}",
            cfg.grid.h(),
            cfg.params.alpha()
        );
    }
}

fn run<F>(cfg: &SolveConfig, stepper: F) -> Result<SolutionHistory>
where
    F: Fn(&SolutionHistory, usize, &SolveConfig, &CoefficientTable) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    warn_mesh(cfg);
    let coeffs = CoefficientTable::new(&cfg.params, cfg.grid.n_time())?;
    let mut history = SolutionHistory::new(cfg.grid, cfg.initial.clone())?;
    for n in 1..=cfg.grid.n_time() {
        let row = stepper(&history, n, cfg, &coeffs)?;
        history.push_row(row)?;
    }
    Ok(history)
}

/// All rows `0..=n_time`. Deterministic: repeated runs give identical bits.
pub fn solve(cfg: &SolveConfig) -> Result<SolutionHistory> {
    run(cfg, step)
}

/// [`solve`] through the reference triple loop; for small meshes only.
pub fn solve_naive(cfg: &SolveConfig) -> Result<SolutionHistory> {
    run(cfg, step_naive)
}

/// `m_n = h sum_i u_i^n` for every stored row.
pub fn mass_series(history: &SolutionHistory) -> Vec<f64> {
    let h = history.grid().h();
    history.rows().map(|r| h * r.iter().sum::<f64>()).collect()
}
