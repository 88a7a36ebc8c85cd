//! Source terms `f_i^n` and the mollified Dirac delta.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::mesh::GridSpec;
use crate::params::SolverParams;

/// Cosine approximation of the Dirac delta with half-width `K h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaSpec {
    k: usize,
    rescale: bool,
}

impl Default for DeltaSpec {
    fn default() -> Self {
        Self { k: 2, rescale: true }
    }
}

impl DeltaSpec {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("delta.K", "must be at least 1"));
        }
        Ok(Self { k, rescale: true })
    }

    /// Keep the raw sampled cosine without forcing unit discrete mass.
    pub fn with_rescale(mut self, rescale: bool) -> Self {
        self.rescale = rescale;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rescale(&self) -> bool {
        self.rescale
    }
}

/// Delta values on the stencil around `center`, clipped to the mesh.
///
/// The rescaling uses the full stencil, so mass lost off the mesh edge
/// stays lost.
fn delta_cells(center: f64, spec: DeltaSpec, grid: &GridSpec) -> Vec<(usize, f64)> {
    let h = grid.h();
    let width = spec.k as f64 * h;
    let lo = ((center - width) / h).ceil() as i64;
    let hi = ((center + width) / h).floor() as i64;
    let mut cells = Vec::with_capacity((hi - lo + 1).max(0) as usize);
    let mut total = 0.0;
    for i in lo..=hi {
        let r = grid.x(i) - center;
        if r.abs() > width {
            continue;
        }
        let v = (1.0 + (PI * r / width).cos()) / (2.0 * width);
        total += v;
        cells.push((i, v));
    }
    let norm = if spec.rescale && total > 0.0 {
        1.0 / (h * total)
    } else {
        1.0
    };
    cells
        .into_iter()
        .filter_map(|(i, v)| grid.offset(i).map(|o| (o, v * norm)))
        .collect()
}

/// Cell values of `(1 + cos(π(x_i - c)/(K h))) / (2 K h)` on `|x_i - c| <= K h`.
pub fn discretize_delta(center: f64, spec: DeltaSpec, grid: &GridSpec) -> Result<Vec<f64>> {
    if !(grid.x_min()..=grid.x_max()).contains(&center) {
        return Err(Error::Domain(format!(
            "delta centre {center} is outside [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let mut out = vec![0.0; grid.n_space()];
    for (o, v) in delta_cells(center, spec, grid) {
        out[o] = v;
    }
    Ok(out)
}

/// Sparse grid-sampled source, `f_i^n` keyed by `(n, i)`; absent entries are 0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampledSource {
    values: BTreeMap<(usize, i64), f64>,
}

impl SampledSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, n: usize, i: i64, value: f64) {
        self.values.insert((n, i), value);
    }

    pub fn get(&self, n: usize, i: i64) -> f64 {
        self.values.get(&(n, i)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        self.values.iter().map(|(&(n, i), &v)| (n, i, v))
    }

    /// Every entry lies on the mesh, at a level the advanced scheme may read.
    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        for (n, i, _) in self.iter() {
            if !grid.contains(i) {
                return Err(Error::Source(format!(
                    "sampled entry (n = {n}, i = {i}) is outside the mesh [{}, {}]",
                    grid.i_min(),
                    grid.i_max()
                )));
            }
            if n > grid.n_time() + 1 {
                return Err(Error::Source(format!(
                    "sampled entry at n = {n} is beyond the horizon (n_time = {})",
                    grid.n_time()
                )));
            }
        }
        Ok(())
    }

    /// Reads `n,i,value` CSV; `#` lines are comments.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Parse { line: 1, reason: e.to_string() })?
            .clone();
        let names: Vec<&str> = headers.iter().collect();
        if names != ["n", "i", "value"] {
            return Err(Error::Parse {
                line: 1,
                reason: format!("expected header `n,i,value`, got `{}`", names.join(",")),
            });
        }
        let mut out = Self::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                reason: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let field = |k: usize| record.get(k).unwrap_or("");
            let bad = |what: &str| Error::Parse {
                line,
                reason: format!("bad {what} `{}`", record.iter().collect::<Vec<_>>().join(",")),
            };
            let n: usize = field(0).parse().map_err(|_| bad("time level"))?;
            let i: i64 = field(1).parse().map_err(|_| bad("cell index"))?;
            let v: f64 = field(2).parse().map_err(|_| bad("value"))?;
            if !v.is_finite() {
                return Err(bad("value"));
            }
            out.insert(n, i, v);
        }
        Ok(out)
    }

    pub fn read_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_csv(file)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    /// `t^-alpha / Γ(1-alpha) δ(x)`.
    WaitFirst,
    /// `alpha/Γ(1-alpha) ∫_t^∞ (p δ(x+u) + (1-p) δ(x-u)) u^(-alpha-1) du`.
    JumpFirst,
    /// `t^-alpha / Γ(1-alpha) [p δ(x+t) + (1-p) δ(x-t)]`.
    StandardWalk,
    /// `t^mu`, constant in space.
    Monomial { mu: f64 },
    Sampled(SampledSource),
}

impl SourceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SourceKind::WaitFirst => "wait_first",
            SourceKind::JumpFirst => "jump_first",
            SourceKind::StandardWalk => "standard_walk",
            SourceKind::Monomial { .. } => "monomial",
            SourceKind::Sampled(_) => "sampled",
        }
    }

    fn singular_at_zero(&self) -> bool {
        matches!(
            self,
            SourceKind::WaitFirst | SourceKind::JumpFirst | SourceKind::StandardWalk
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceTerm {
    kind: SourceKind,
    params: SolverParams,
}

impl SourceTerm {
    pub fn new(kind: SourceKind, params: SolverParams) -> Result<Self> {
        if let SourceKind::Monomial { mu } = kind {
            if !(mu >= 0.0 && mu.is_finite()) {
                return Err(invalid("source.mu", format!("must be finite and >= 0, got {mu}")));
            }
        }
        Ok(Self { kind, params })
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    /// `t^-alpha / Γ(1-alpha)`, the mass a PDF source must carry at time `t`.
    pub fn target_mass(&self, t: f64) -> f64 {
        t.powf(-self.params.alpha()) / self.params.gamma_1ma()
    }
}

/// Jump-first cell averages: exact integrals of
/// `alpha/Γ(1-alpha) |x|^(-alpha-1)` over the part of each cell with `|x| > t`.
fn jump_first_row(params: &SolverParams, t: f64, grid: &GridSpec, out: &mut [f64]) {
    let alpha = params.alpha();
    let h = grid.h();
    let scale = 1.0 / (params.gamma_1ma() * h);
    // ∫_lo^hi alpha x^(-alpha-1) dx = lo^-alpha (1 - (lo/hi)^alpha), 0 < lo < hi
    let tail = |lo: f64, hi: f64| -> f64 {
        if hi <= lo {
            return 0.0;
        }
        -lo.powf(-alpha) * (-alpha * (hi / lo).ln()).exp_m1()
    };
    let (p, q) = (params.p(), params.q());
    for (o, i) in grid.cell_indices().enumerate() {
        let a = grid.x(i) - 0.5 * h;
        let b = grid.x(i) + 0.5 * h;
        let right = tail(a.max(t), b);
        let left = tail((-b).max(t), -a);
        out[o] = scale * (q * right + p * left);
    }
}

/// `f_i^n` on every cell of the mesh.
pub fn source_values(term: &SourceTerm, n: usize, grid: &GridSpec, delta: DeltaSpec) -> Result<Vec<f64>> {
    if n == 0 && term.kind.singular_at_zero() {
        return Err(Error::Domain(format!(
            "the {} source is singular at t = 0 and needs n >= 1",
            term.kind.name()
        )));
    }
    let t = grid.t(n);
    let params = &term.params;
    let mut out = vec![0.0; grid.n_space()];
    match &term.kind {
        SourceKind::WaitFirst => {
            let amp = term.target_mass(t);
            for (o, v) in delta_cells(0.0, delta, grid) {
                out[o] = amp * v;
            }
        }
        SourceKind::StandardWalk => {
            let amp = term.target_mass(t);
            for (o, v) in delta_cells(-t, delta, grid) {
                out[o] += amp * params.p() * v;
            }
            for (o, v) in delta_cells(t, delta, grid) {
                out[o] += amp * params.q() * v;
            }
        }
        SourceKind::JumpFirst => jump_first_row(params, t, grid, &mut out),
        SourceKind::Monomial { mu } => out.fill(t.powf(*mu)),
        SourceKind::Sampled(s) => {
            for (o, i) in grid.cell_indices().enumerate() {
                out[o] = s.get(n, i);
            }
        }
    }
    Ok(out)
}

/// `rho = h sum_i f_i^n - t_n^-alpha / Γ(1-alpha)`.
pub fn validate_source_mass(term: &SourceTerm, n: usize, grid: &GridSpec, delta: DeltaSpec) -> Result<f64> {
    let row = source_values(term, n, grid, delta)?;
    let mass: f64 = grid.h() * row.iter().sum::<f64>();
    Ok(mass - term.target_mass(grid.t(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(h: f64, t: f64, half: f64) -> GridSpec {
        GridSpec::symmetric(h, t, half).unwrap()
    }

    #[test]
    fn delta_on_node_k2() {
        let g = grid(0.125, 1.0, 2.0);
        let raw = discretize_delta(0.0, DeltaSpec::default().with_rescale(false), &g).unwrap();
        let nonzero: Vec<f64> = raw.iter().copied().filter(|v| *v != 0.0).collect();
        // the ±2h samples sit on zeros of 1 + cos
        assert_eq!(nonzero.len(), 3);
        let peak = raw[g.offset(0).unwrap()];
        assert!((peak - 1.0 / (2.0 * g.h())).abs() < 1e-12);
        let mass: f64 = g.h() * raw.iter().sum::<f64>();
        assert!((mass - 1.0).abs() < 1e-14);
    }

    #[test]
    fn delta_rescaled_mass_any_centre() {
        let g = grid(0.125, 1.0, 2.0);
        for c in [0.0, 0.03, -0.51, 1.1] {
            for k in 1..=4 {
                let d = discretize_delta(c, DeltaSpec::new(k).unwrap(), &g).unwrap();
                let mass: f64 = g.h() * d.iter().sum::<f64>();
                assert!((mass - 1.0).abs() < 1e-14, "c = {c}, K = {k}");
            }
        }
    }

    #[test]
    fn delta_k1_single_cell() {
        let g = grid(0.125, 1.0, 2.0);
        let d = discretize_delta(0.25, DeltaSpec::new(1).unwrap(), &g).unwrap();
        let o = g.offset(2).unwrap();
        assert!((d[o] - 8.0).abs() < 1e-12);
        assert_eq!(d.iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn delta_centre_outside_rejected() {
        let g = grid(0.125, 1.0, 2.0);
        assert!(discretize_delta(3.0, DeltaSpec::default(), &g).is_err());
        assert!(DeltaSpec::new(0).is_err());
    }

    #[test]
    fn wait_first_mass() {
        let params = SolverParams::new(0.5, 0.5).unwrap();
        let g = grid(1.0 / 64.0, 1.0, 2.0);
        let term = SourceTerm::new(SourceKind::WaitFirst, params).unwrap();
        let row = source_values(&term, 64, &g, DeltaSpec::default()).unwrap();
        let mass: f64 = g.h() * row.iter().sum::<f64>();
        assert!((mass - 1.0 / PI.sqrt()).abs() < 1e-14);
        let rho = validate_source_mass(&term, 64, &g, DeltaSpec::default()).unwrap();
        assert!(rho.abs() < 1e-14);
        assert!(source_values(&term, 0, &g, DeltaSpec::default()).is_err());
    }

    #[test]
    fn standard_walk_clipped_mass_reported() {
        let params = SolverParams::new(0.5, 0.3).unwrap();
        let term = SourceTerm::new(SourceKind::StandardWalk, params).unwrap();
        let wide = grid(0.125, 1.0, 2.0);
        assert!(validate_source_mass(&term, 8, &wide, DeltaSpec::default()).unwrap().abs() < 1e-14);
        let narrow = GridSpec::unpadded(0.125, 1.0, -1.0, 1.0).unwrap();
        let rho = validate_source_mass(&term, 8, &narrow, DeltaSpec::default()).unwrap();
        assert!(rho < -1e-3, "rho = {rho}");
    }

    #[test]
    fn monomial_values_and_residual() {
        let params = SolverParams::new(0.5, 0.5).unwrap();
        let g = grid(0.25, 1.0, 2.0);
        let term = SourceTerm::new(SourceKind::Monomial { mu: 1.0 }, params).unwrap();
        let row = source_values(&term, 2, &g, DeltaSpec::default()).unwrap();
        assert!(row.iter().all(|v| *v == 0.5));
        let rho = validate_source_mass(&term, 2, &g, DeltaSpec::default()).unwrap();
        let width = g.h() * g.n_space() as f64;
        assert!((rho - (0.5 * width - 0.5f64.powf(-0.5) / PI.sqrt())).abs() < 1e-12);
        assert!(SourceTerm::new(SourceKind::Monomial { mu: -1.0 }, params).is_err());
    }

    #[test]
    fn jump_first_mass_converges_with_domain() {
        let params = SolverParams::new(0.5, 0.5).unwrap();
        let term = SourceTerm::new(SourceKind::JumpFirst, params).unwrap();
        let h = 1.0 / 32.0;
        // mass outside [-L, L] is L^-alpha / Γ(1-alpha)
        for half in [4.0, 16.0, 64.0] {
            let g = grid(h, 1.0, half);
            let rho = validate_source_mass(&term, 32, &g, DeltaSpec::default()).unwrap();
            let lost = (half + 0.5 * h).powf(-0.5) / PI.sqrt();
            assert!((rho + lost).abs() < 1e-12, "half = {half}: {rho} vs {lost}");
        }
    }

    #[test]
    fn jump_first_cells_match_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = SolverParams::new(0.4, 0.3).unwrap();
        let term = SourceTerm::new(SourceKind::JumpFirst, params).unwrap();
        let g = grid(1.0 / 16.0, 1.0, 4.0);
        let n = 10;
        let t = g.t(n);
        let row = source_values(&term, n, &g, DeltaSpec::default()).unwrap();
        let density = |x: f64| {
            let c = params.alpha() / params.gamma_1ma();
            if x > t {
                c * params.q() * x.powf(-params.alpha() - 1.0)
            } else if x < -t {
                c * params.p() * (-x).powf(-params.alpha() - 1.0)
            } else {
                0.0
            }
        };
        let mut picks: Vec<i64> = (0..18).map(|_| rng.gen_range(g.i_min()..=g.i_max())).collect();
        picks.extend([10, -10]); // cells straddling the light cone
        for i in picks {
            let a = g.x(i) - 0.5 * g.h();
            let b = g.x(i) + 0.5 * g.h();
            let mut pieces = vec![a];
            pieces.extend([-t, t].into_iter().filter(|c| *c > a && *c < b));
            pieces.push(b);
            let total: f64 = pieces
                .windows(2)
                .map(|w| integrate(density, w[0], w[1], Tolerance::relative(1e-13)).unwrap().value)
                .sum();
            let avg = total / g.h();
            let got = row[g.offset(i).unwrap()];
            assert!((got - avg).abs() <= 1e-8 * avg.abs().max(1e-3), "cell {i}: {got} vs {avg}");
        }
    }

    #[test]
    fn sampled_csv_round_trip() {
        let text = "n,i,value\n# comment\n1,0,2.5\n3,-2,1e-3\n";
        let s = SampledSource::read_csv(text.as_bytes()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.get(1, 0), 2.5);
        assert_eq!(s.get(2, 0), 0.0);
        let g = grid(0.25, 1.0, 2.0);
        assert!(s.check_grid(&g).is_ok());
        let params = SolverParams::new(0.5, 0.5).unwrap();
        let term = SourceTerm::new(SourceKind::Sampled(s), params).unwrap();
        let row = source_values(&term, 3, &g, DeltaSpec::default()).unwrap();
        assert_eq!(row[g.offset(-2).unwrap()], 1e-3);
    }

    #[test]
    fn sampled_csv_errors() {
        assert!(SampledSource::read_csv("a,b,c\n1,2,3\n".as_bytes()).is_err());
        let err = SampledSource::read_csv("n,i,value\n1,0,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let mut s = SampledSource::new();
        s.insert(0, 100, 1.0);
        assert!(s.check_grid(&grid(0.25, 1.0, 2.0)).is_err());
    }

    #[test]
    fn all_walk_sources_non_negative() {
        let g = grid(1.0 / 32.0, 1.0, 3.0);
        for p in [0.0, 0.2, 1.0] {
            let params = SolverParams::new(0.6, p).unwrap();
            for kind in [SourceKind::WaitFirst, SourceKind::JumpFirst, SourceKind::StandardWalk] {
                let term = SourceTerm::new(kind, params).unwrap();
                for n in [1, 7, 32] {
                    let row = source_values(&term, n, &g, DeltaSpec::default()).unwrap();
                    assert!(row.iter().all(|v| *v >= 0.0));
                }
            }
        }
    }
}
