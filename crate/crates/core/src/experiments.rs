//! Drivers for the standard numerical experiments: PDF comparison,
//! convergence sweeps, mass traces, kernel checks and the stability bound.

use rayon::prelude::*;

use crate::analytic::{monomial_solution, ProfileKind, SimilarityProfile};
use crate::diagnostics::{
    convergence_rows, discrete_norm, error_against_oracle, ConvergenceRow, ErrorReport, NormKind, OrderFit,
    Restriction,
};
use crate::error::{invalid, Result};
use crate::kernel::{kernel_mass, KernelProfile, KernelQuery};
use crate::mesh::GridSpec;
use crate::params::SolverParams;
use crate::scheme::{delta_initial, mass_series, solve, SchemeVariant, SolveConfig};
use crate::sources::{source_values, validate_source_mass, DeltaSpec, SampledSource, SourceKind, SourceTerm};

pub fn walk_source(kind: ProfileKind) -> SourceKind {
    match kind {
        ProfileKind::WaitFirst => SourceKind::WaitFirst,
        ProfileKind::JumpFirst => SourceKind::JumpFirst,
        ProfileKind::StandardWalk => SourceKind::StandardWalk,
    }
}

/// Default half width of the domain for a walk PDF at horizon `t_final`.
///
/// Wait-first and standard-walk densities live in `|x| <= T`; the jump-first
/// density has algebraic tails and gets `3T`.
pub fn walk_half_width(kind: ProfileKind, t_final: f64, h: f64) -> f64 {
    let raw = match kind {
        ProfileKind::JumpFirst => 3.0 * t_final,
        _ => t_final + 0.25 * t_final.max(1.0),
    };
    (raw / h).ceil() * h
}

/// Delta initial condition plus the walk source on a symmetric mesh.
pub fn walk_config(
    kind: ProfileKind,
    params: SolverParams,
    grid: GridSpec,
    variant: SchemeVariant,
    delta: DeltaSpec,
) -> Result<SolveConfig> {
    let source = SourceTerm::new(walk_source(kind), params)?;
    let init = delta_initial(&grid, delta)?;
    SolveConfig::new(params, grid, source, init, variant)?.with_delta(delta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdfComparison {
    pub x: Vec<f64>,
    pub numeric: Vec<f64>,
    pub analytic: Vec<f64>,
    /// L1, L2 and Linf over the full domain, in that order.
    pub errors: Vec<ErrorReport>,
}

/// Numeric solution at `T` against the cell averages of the similarity profile.
pub fn pdf_compare(cfg: &SolveConfig, kind: ProfileKind) -> Result<PdfComparison> {
    let grid = cfg.grid;
    let t = grid.t_final();
    let profile = SimilarityProfile::for_solver(kind, &cfg.params)?;
    let history = solve(cfg)?;
    let analytic = profile.cell_averages(t, &grid)?;
    let restriction = Restriction::full(&grid);
    let errors = NormKind::ALL
        .iter()
        .map(|&k| {
            error_against_oracle(
                &history,
                |i, _| Ok(analytic[grid.offset(i).expect("mesh cell")]),
                t,
                k,
                restriction,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PdfComparison {
        x: grid.cell_centres(),
        numeric: history.row(grid.n_time())?.to_vec(),
        analytic,
        errors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepProblem {
    /// Source `t^mu`, zero data, domain `[-2T, 2T]`, central third.
    Monomial { mu: f64 },
    /// Wait-first PDF, full domain, cell-average oracle.
    WaitFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub problem: SweepProblem,
    pub params: SolverParams,
    pub t_final: f64,
    pub hs: Vec<f64>,
    pub norm: NormKind,
    pub variant: SchemeVariant,
    pub delta: DeltaSpec,
}

fn sweep_error(spec: &SweepSpec, h: f64) -> Result<f64> {
    let t = spec.t_final;
    let params = spec.params;
    match spec.problem {
        SweepProblem::Monomial { mu } => {
            let grid = GridSpec::symmetric(h, t, (2.0 * t / h).ceil() * h)?;
            let source = SourceTerm::new(SourceKind::Monomial { mu }, params)?;
            let cfg = SolveConfig::new(params, grid, source, vec![0.0; grid.n_space()], spec.variant)?;
            let history = solve(&cfg)?;
            let exact = monomial_solution(mu, params.alpha(), t)?;
            let r = error_against_oracle(&history, |_, _| Ok(exact), t, spec.norm, Restriction::central_third(&grid))?;
            Ok(r.value)
        }
        SweepProblem::WaitFirst => {
            let kind = ProfileKind::WaitFirst;
            let grid = GridSpec::symmetric(h, t, walk_half_width(kind, t, h))?;
            let cfg = walk_config(kind, params, grid, spec.variant, spec.delta)?;
            let history = solve(&cfg)?;
            let profile = SimilarityProfile::for_solver(kind, &params)?;
            let exact = profile.cell_averages(t, &grid)?;
            let r = error_against_oracle(
                &history,
                |i, _| Ok(exact[grid.offset(i).expect("mesh cell")]),
                t,
                spec.norm,
                Restriction::full(&grid),
            )?;
            Ok(r.value)
        }
    }
}

/// Runs the sweep members in parallel and fits the order.
pub fn convergence_sweep(spec: &SweepSpec) -> Result<(OrderFit, Vec<ConvergenceRow>)> {
    if spec.hs.len() < 3 {
        return Err(invalid("h", "a sweep needs at least three mesh sizes"));
    }
    let errors = spec
        .hs
        .par_iter()
        .map(|&h| sweep_error(spec, h))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = spec.hs.iter().copied().zip(errors).collect();
    convergence_rows(spec.params.alpha(), spec.norm, &pairs)
}

/// `h = 2^-k` for `k` in `lo..=hi`.
pub fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 0.5f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassTrace {
    pub t: Vec<f64>,
    pub standard: Vec<f64>,
    pub advanced: Vec<f64>,
    /// Largest `|ρ|` over the source levels either variant reads.
    pub max_rho: f64,
}

impl MassTrace {
    /// `1 + T Γ(2-α) h^-α max|ρ|`.
    pub fn upper_bound(&self, params: &SolverParams, grid: &GridSpec) -> f64 {
        1.0 + grid.t_final() * params.gamma_2ma() * grid.h().powf(-params.alpha()) * self.max_rho
    }
}

/// Mass `h Σ u^n` for both variants on the same walk problem.
pub fn mass_trace(kind: ProfileKind, params: SolverParams, grid: GridSpec, delta: DeltaSpec) -> Result<MassTrace> {
    let run = |variant| -> Result<Vec<f64>> {
        let cfg = walk_config(kind, params, grid, variant, delta)?;
        cfg.check_unit_mass()?;
        Ok(mass_series(&solve(&cfg)?))
    };
    let (standard, advanced) = rayon::join(|| run(SchemeVariant::Standard), || run(SchemeVariant::AdvancedSource));
    let source = SourceTerm::new(walk_source(kind), params)?;
    let mut max_rho: f64 = 0.0;
    for n in 1..=grid.n_time() + 1 {
        max_rho = max_rho.max(validate_source_mass(&source, n, &grid, delta)?.abs());
    }
    Ok(MassTrace {
        t: (0..=grid.n_time()).map(|n| grid.t(n)).collect(),
        standard: standard?,
        advanced: advanced?,
        max_rho,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheck {
    pub t: f64,
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub mass: f64,
    pub expected: f64,
}

impl KernelCheck {
    pub fn relative_residual(&self) -> f64 {
        (self.mass - self.expected).abs() / self.expected
    }
}

/// Windowed `G_t` on `points` nodes of `[-extent, extent]` and the mass identity.
pub fn kernel_check(query: &KernelQuery, t: f64, cutoff: f64, extent: f64, points: usize) -> Result<KernelCheck> {
    if points < 2 {
        return Err(invalid("points", "need at least two sample points"));
    }
    let profile = KernelProfile::new(query, t, cutoff, extent)?;
    let x: Vec<f64> = (0..points)
        .map(|k| -extent + 2.0 * extent * k as f64 / (points - 1) as f64)
        .collect();
    let g = x.par_iter().map(|&x| profile.g(x)).collect();
    Ok(KernelCheck {
        t,
        x,
        g,
        mass: kernel_mass(query, t)?,
        expected: query.expected_mass(t),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// `max_n ||u^n||_{2,h}`.
    pub max_solution: f64,
    /// `max_n ||f^n||_{2,h}` over the source levels read.
    pub max_source: f64,
    /// `T^α Γ(1-α) max_n ||f^n||_{2,h}`.
    pub bound: f64,
}

impl StabilityReport {
    pub fn holds(&self) -> bool {
        self.max_solution <= self.bound
    }
}

/// Solves with zero data and a sampled source and evaluates the L2 bound.
pub fn stability_check(
    params: SolverParams,
    grid: GridSpec,
    source: SampledSource,
    variant: SchemeVariant,
) -> Result<StabilityReport> {
    let term = SourceTerm::new(SourceKind::Sampled(source), params)?;
    let cfg = SolveConfig::new(params, grid, term.clone(), vec![0.0; grid.n_space()], variant)?;
    let history = solve(&cfg)?;
    let h = grid.h();
    let max_solution = history.rows().map(|r| discrete_norm(r, h, NormKind::L2)).fold(0.0, f64::max);
    let mut max_source: f64 = 0.0;
    for n in 1..=grid.n_time() {
        let f = source_values(&term, variant.source_level(n), &grid, cfg.delta)?;
        max_source = max_source.max(discrete_norm(&f, h, NormKind::L2));
    }
    let bound = grid.t_final().powf(params.alpha()) * params.gamma_1ma() * max_source;
    Ok(StabilityReport {
        max_solution,
        max_source,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pdf_compare_small() {
        let params = SolverParams::new(0.5, 0.25).unwrap();
        let h = 1.0 / 16.0;
        for kind in [ProfileKind::WaitFirst, ProfileKind::JumpFirst, ProfileKind::StandardWalk] {
            let grid = GridSpec::symmetric(h, 1.0, walk_half_width(kind, 1.0, h)).unwrap();
            let cfg = walk_config(kind, params, grid, SchemeVariant::Standard, DeltaSpec::default()).unwrap();
            let c = pdf_compare(&cfg, kind).unwrap();
            assert_eq!(c.x.len(), grid.n_space());
            assert_eq!(c.errors.len(), 3);
            assert!(c.errors[0].value > 0.0 && c.errors[0].value < 1.0, "{kind:?}");
        }
    }

    #[test]
    fn half_widths_are_mesh_aligned() {
        let h = 0.5f64.powi(7);
        for kind in [ProfileKind::WaitFirst, ProfileKind::JumpFirst] {
            let w = walk_half_width(kind, 1.0, h);
            assert_eq!((w / h).fract(), 0.0);
            assert!(w > 1.0);
        }
    }

    #[test]
    fn monomial_sweep_recovers_order() {
        let spec = SweepSpec {
            problem: SweepProblem::Monomial { mu: 1.0 },
            params: SolverParams::new(0.5, 0.5).unwrap(),
            t_final: 1.0,
            hs: dyadic(3, 6),
            norm: NormKind::Linf,
            variant: SchemeVariant::Standard,
            delta: DeltaSpec::default(),
        };
        let (fit, rows) = convergence_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 4);
        assert!((fit.slope - 1.5).abs() < 0.2, "{}", fit.slope);
        assert!(convergence_sweep(&SweepSpec { hs: dyadic(3, 4), ..spec }).is_err());
    }

    #[test]
    fn mass_trace_both_variants() {
        let params = SolverParams::new(0.5, 0.5).unwrap();
        let h = 1.0 / 32.0;
        let grid = GridSpec::symmetric(h, 1.0, walk_half_width(ProfileKind::WaitFirst, 1.0, h)).unwrap();
        let m = mass_trace(ProfileKind::WaitFirst, params, grid, DeltaSpec::default()).unwrap();
        assert_eq!(m.t.len(), 33);
        assert_eq!(m.standard[0], m.advanced[0]);
        assert!((m.standard[0] - 1.0).abs() < 1e-12);
        assert!(m.max_rho < 1e-12);
    }

    #[test]
    fn zero_source_is_stable() {
        let params = SolverParams::new(0.5, 0.5).unwrap();
        let grid = GridSpec::symmetric(0.125, 1.0, 2.0).unwrap();
        let r = stability_check(params, grid, SampledSource::new(), SchemeVariant::Standard).unwrap();
        assert_eq!(r.max_solution, 0.0);
        assert!(r.holds());
    }
}
