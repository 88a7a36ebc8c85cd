//! Closed-form self-similar densities `u(x, t) = φ(x/t) / t` of the three
//! Lévy walks, and the solution of the monomial-source problem.
//!
//! The profiles are written in the mirrored convention of the closed forms:
//! the profile with weight `p` corresponds to the solver run with `1 - p`
//! (see [`SimilarityProfile::for_solver`]).

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::mesh::GridSpec;
use crate::params::SolverParams;
use crate::quadrature::{integrate, integrate_graded, integrate_tail, Estimate, Tolerance};
use crate::special::gamma_positive;

const NORMALIZATION_TOL: f64 = 1e-6;
const BREAKPOINTS: [f64; 3] = [-1.0, 0.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    WaitFirst,
    JumpFirst,
    StandardWalk,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::WaitFirst => "wait_first",
            ProfileKind::JumpFirst => "jump_first",
            ProfileKind::StandardWalk => "standard_walk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityProfile {
    kind: ProfileKind,
    alpha: f64,
    p: f64,
    // sin(απ)/π
    amp: f64,
    cos_ap: f64,
}

impl SimilarityProfile {
    /// Profile with the weight `p` exactly as in the closed forms.
    ///
    /// Fails when the profile does not integrate to one within 1e-6, which
    /// happens for the standard walk at `p ∈ {0, 1}` (a travelling point mass).
    pub fn new(kind: ProfileKind, alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha", format!("must satisfy 0 < alpha < 1, got {alpha}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("p", format!("must satisfy 0 <= p <= 1, got {p}")));
        }
        let profile = Self {
            kind,
            alpha,
            p,
            amp: (alpha * PI).sin() / PI,
            cos_ap: (alpha * PI).cos(),
        };
        let mass = profile.total_mass()?;
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Domain(format!(
                "{} profile with alpha = {alpha}, p = {p} has mass {mass}, not a probability density",
                kind.name()
            )));
        }
        Ok(profile)
    }

    /// Profile matching a solve with `params`: the closed forms use `1 - p`.
    pub fn for_solver(kind: ProfileKind, params: &SolverParams) -> Result<Self> {
        Self::new(kind, params.alpha(), params.q())
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `p^2 a^(2α) + (1-p)^2 b^(2α) + 2p(1-p)(ab)^α cos(απ)`, `a = 1-y`, `b = 1+y`.
    fn denom(&self, a: f64, b: f64) -> f64 {
        let (p, q, al) = (self.p, 1.0 - self.p, self.alpha);
        p * p * a.powf(2.0 * al) + q * q * b.powf(2.0 * al) + 2.0 * p * q * (a * b).powf(al) * self.cos_ap
    }

    /// φ at `y` with `a = 1 - y` and `b = 1 + y` supplied separately, so
    /// callers near `y = ±1` keep full precision.
    fn eval(&self, y: f64, a: f64, b: f64) -> f64 {
        let (p, q, al) = (self.p, 1.0 - self.p, self.alpha);
        match self.kind {
            ProfileKind::WaitFirst => {
                if a <= 0.0 || b <= 0.0 {
                    // support is (-1, 1); the endpoints carry the limit
                    if (a == 0.0 && p == 1.0) || (b == 0.0 && p == 0.0) {
                        return f64::INFINITY;
                    }
                    return 0.0;
                }
                if y == 0.0 {
                    return f64::INFINITY;
                }
                let d = self.denom(a, b);
                if y > 0.0 {
                    p * self.amp * a.powf(al) * y.powf(al - 1.0) / d
                } else {
                    q * self.amp * b.powf(al) * (-y).powf(al - 1.0) / d
                }
            }
            ProfileKind::JumpFirst => {
                if a < 0.0 {
                    // y > 1
                    p * self.amp / (y * (p * (-a).powf(al) + q * b.powf(al)))
                } else if b < 0.0 {
                    // y < -1
                    q * self.amp / (-y * (q * (-b).powf(al) + p * a.powf(al)))
                } else {
                    if p * q == 0.0 {
                        return 0.0;
                    }
                    let d = self.denom(a, b);
                    if y == 0.0 {
                        return p * q * self.amp * 2.0 * al / d;
                    }
                    // |b^α - a^α| / |y| without cancellation near y = 0
                    let ratio = if a >= b {
                        a.powf(al) * (-(al * (2.0 * y / a).ln_1p()).exp_m1())
                    } else {
                        b.powf(al) * (-(al * (-2.0 * y / b).ln_1p()).exp_m1())
                    };
                    p * q * self.amp * ratio / (y.abs() * d)
                }
            }
            ProfileKind::StandardWalk => {
                if a < 0.0 || b < 0.0 || p * q == 0.0 {
                    return 0.0;
                }
                if a == 0.0 || b == 0.0 {
                    return f64::INFINITY;
                }
                // (1-y)^(α-1)(1+y)^α + (1+y)^(α-1)(1-y)^α = 2 (ab)^(α-1)
                2.0 * p * q * self.amp * (a * b).powf(al - 1.0) / self.denom(a, b)
            }
        }
    }

    /// φ(y). Singular points return `+inf`, never NaN.
    pub fn phi(&self, y: f64) -> f64 {
        if !y.is_finite() {
            return 0.0;
        }
        self.eval(y, 1.0 - y, 1.0 + y)
    }

    /// φ(anchor + offset) with `1 ∓ y` formed from the anchor exactly.
    fn phi_offset(&self, anchor: f64, offset: f64) -> f64 {
        self.eval(anchor + offset, (1.0 - anchor) - offset, (1.0 + anchor) + offset)
    }

    /// `φ(x/t) / t`.
    pub fn pdf_at(&self, x: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("pdf needs t > 0, got {t}")));
        }
        Ok(self.phi(x / t) / t)
    }

    fn grading(&self) -> f64 {
        self.alpha.min(1.0 - self.alpha)
    }

    /// `∫_lo^hi φ(y) dy` for finite `lo <= hi`, split at `{-1, 0, 1}` with
    /// graded quadrature towards each split point.
    pub fn integral(&self, lo: f64, hi: f64, tol: Tolerance) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::Domain(format!("bad integration range [{lo}, {hi}]")));
        }
        let mut cuts = vec![lo];
        cuts.extend(BREAKPOINTS.iter().copied().filter(|c| *c > lo && *c < hi));
        cuts.push(hi);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            total += self.piece(w[0], w[1], tol)?.value;
        }
        Ok(total)
    }

    fn piece(&self, u: f64, v: f64, tol: Tolerance) -> Result<Estimate> {
        let g = self.grading();
        let left = BREAKPOINTS.contains(&u);
        let right = BREAKPOINTS.contains(&v);
        let from_left = |a: f64, w: f64| integrate_graded(|s| self.phi_offset(a, s), w, g, tol);
        let from_right = |b: f64, w: f64| integrate_graded(|s| self.phi_offset(b, -s), w, g, tol);
        let r = match (left, right) {
            (false, false) => integrate(|y| self.phi(y), u, v, tol)?,
            (true, false) => from_left(u, v - u)?,
            (false, true) => from_right(v, v - u)?,
            (true, true) => {
                let half = 0.5 * (v - u);
                let l = from_left(u, half)?;
                let r = from_right(v, half)?;
                Estimate {
                    value: l.value + r.value,
                    error: l.error + r.error,
                }
            }
        };
        Ok(r)
    }

    /// Total mass of φ over the real line.
    pub fn total_mass(&self) -> Result<f64> {
        let tol = Tolerance::relative(1e-11);
        let core = self.integral(-2.0, 2.0, tol)?;
        if self.kind != ProfileKind::JumpFirst {
            return Ok(core);
        }
        let right = integrate_tail(|y| self.phi(y), 2.0, self.alpha, tol)?.value;
        let left = integrate_tail(|y| self.phi(-y), 2.0, self.alpha, tol)?.value;
        Ok(core + right + left)
    }

    /// `(1/h) ∫_{cell i} φ(x/t)/t dx`.
    pub fn cell_average(&self, i: i64, t: f64, grid: &GridSpec) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("cell average needs t > 0, got {t}")));
        }
        let h = grid.h();
        let lo = (grid.x(i) - 0.5 * h) / t;
        let hi = (grid.x(i) + 0.5 * h) / t;
        let tol = Tolerance {
            abs: 1e-15 * (hi - lo),
            rel: 1e-10,
            max_intervals: 2000,
        };
        let mass = self.integral(lo, hi, tol).map_err(|e| match e {
            Error::Quadrature { estimate, .. } => Error::Quadrature {
                a: grid.x(i) - 0.5 * h,
                b: grid.x(i) + 0.5 * h,
                estimate,
            },
            other => other,
        })?;
        Ok(mass / h)
    }

    /// Cell averages at time `t` on every cell of `grid`.
    pub fn cell_averages(&self, t: f64, grid: &GridSpec) -> Result<Vec<f64>> {
        grid.cell_indices().map(|i| self.cell_average(i, t, grid)).collect()
    }
}

pub fn phi(profile: &SimilarityProfile, y: f64) -> f64 {
    profile.phi(y)
}

pub fn pdf_at(profile: &SimilarityProfile, x: f64, t: f64) -> Result<f64> {
    profile.pdf_at(x, t)
}

pub fn profile_cell_average(profile: &SimilarityProfile, i: i64, t: f64, grid: &GridSpec) -> Result<f64> {
    profile.cell_average(i, t, grid)
}

/// `Γ(μ+1) t^(μ+α) / Γ(μ+α+1)`, the solution for the source `t^μ` with zero data.
pub fn monomial_solution(mu: f64, alpha: f64, t: f64) -> Result<f64> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(invalid("mu", format!("must be finite and >= 0, got {mu}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must satisfy 0 < alpha < 1, got {alpha}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("monomial solution needs t >= 0, got {t}")));
    }
    Ok(gamma_positive(mu + 1.0) * t.powf(mu + alpha) / gamma_positive(mu + alpha + 1.0))
}
