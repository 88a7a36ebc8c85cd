//! Duhamel kernel `G_t` by numerical Fourier–Laplace inversion.
//!
//! `P(ξ, t)` is the inverse Laplace transform of `1/ζ(ξ, s)` with
//! `ζ = p (s - iξ)^α + (1 - p)(s + iξ)^α` (principal branches, cuts running
//! left from `±iξ`). The Bromwich line is folded onto a box: a vertical leg
//! at `Re s = c` between `±i(|ξ| + d)` and two horizontal legs at
//! `Im s = ±(|ξ| + d)` running left to `Re s = -X`, where `e^(st)` is
//! negligible. All zeros of `ζ` lie in `{Re s < 0, |Im s| < |ξ|}`, which
//! the box encloses without touching.
//!
//! `G_t(x) = (1/2π) ∫ e^(iξx) P(ξ, t) dξ` is then evaluated with a smooth
//! Gaussian spectral window `exp(-(ξ/Ξ)^2)`, truncated where it falls
//! below `e^-36`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::quadrature::gauss_legendre;
use crate::special::gamma_positive;

const PANEL_NODES: usize = 16;

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// Geometry and stopping rule of the inversion contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    /// Abscissa of the vertical leg.
    pub c: f64,
    /// Clearance of the horizontal legs above the branch points.
    pub d: f64,
    /// The horizontal legs end at `Re s = -left_decay / t`.
    pub left_decay: f64,
    /// Relative change between refinements accepted as converged.
    pub rel_tol: f64,
    /// Node budget; exceeding it is a convergence failure.
    pub max_nodes: usize,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            c: 1.0,
            d: 1.0,
            left_decay: 40.0,
            rel_tol: 1e-8,
            max_nodes: 1 << 14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuery {
    alpha: f64,
    p: f64,
    contour: ContourSpec,
}

impl KernelQuery {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("alpha", format!("must satisfy 0 < alpha < 1, got {alpha}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("p", format!("must satisfy 0 <= p <= 1, got {p}")));
        }
        Ok(Self {
            alpha,
            p,
            contour: ContourSpec::default(),
        })
    }

    pub fn with_contour(mut self, contour: ContourSpec) -> Result<Self> {
        if !(contour.c > 0.0 && contour.d > 0.0 && contour.left_decay > 0.0) {
            return Err(invalid("contour", "c, d and left_decay must be positive"));
        }
        if contour.max_nodes < PANEL_NODES || !(contour.rel_tol > 0.0) {
            return Err(invalid("contour", "needs at least 16 nodes and a positive tolerance"));
        }
        self.contour = contour;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn contour(&self) -> &ContourSpec {
        &self.contour
    }

    /// `ζ(ξ, s)`.
    pub fn zeta(&self, xi: f64, s: Complex64) -> Complex64 {
        let i_xi = Complex64::new(0.0, xi);
        let mut z = Complex64::new(0.0, 0.0);
        if self.p > 0.0 {
            z += self.p * (s - i_xi).powf(self.alpha);
        }
        if self.p < 1.0 {
            z += (1.0 - self.p) * (s + i_xi).powf(self.alpha);
        }
        z
    }

    /// `t^(α-1) / Γ(α)`, the total mass of `G_t`.
    pub fn expected_mass(&self, t: f64) -> f64 {
        t.powf(self.alpha - 1.0) / gamma_positive(self.alpha)
    }
}

/// A converged value of `P(ξ, t)` with quadrature metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub value: Complex64,
    pub nodes: usize,
    /// Smallest `|ζ|` seen on the contour.
    pub min_abs_zeta: f64,
}

/// Panel edges from `a` to `b` with widths from `size(position)`.
fn panels(a: f64, b: f64, size: impl Fn(f64) -> f64) -> Vec<f64> {
    let dir = if b >= a { 1.0 } else { -1.0 };
    let mut edges = vec![a];
    let mut x = a;
    while dir * (b - x) > 1e-12 {
        let step = size(x).min(dir * (b - x));
        // avoid a sliver at the end
        let step = if dir * (b - x) - step < 0.25 * step { dir * (b - x) } else { step };
        x += dir * step;
        edges.push(x);
    }
    *edges.last_mut().expect("at least one edge") = b;
    edges
}

struct Leg {
    edges: Vec<f64>,
    // s(u) and ds/du
    map: fn(f64, f64) -> (Complex64, Complex64),
    offset: f64,
}

fn vertical(u: f64, c: f64) -> (Complex64, Complex64) {
    (Complex64::new(c, u), Complex64::new(0.0, 1.0))
}

fn top(u: f64, y: f64) -> (Complex64, Complex64) {
    (Complex64::new(u, y), Complex64::new(1.0, 0.0))
}

fn bottom(u: f64, y: f64) -> (Complex64, Complex64) {
    (Complex64::new(u, -y), Complex64::new(1.0, 0.0))
}

fn contour_legs(spec: &ContourSpec, xi: f64, t: f64) -> Vec<Leg> {
    let y_top = xi.abs() + spec.d;
    let x_left = -spec.left_decay / t;
    let phase_cap = 3.0 / t;
    let decay_cap = 4.0 / t;
    let branch = xi.abs();
    let vert_size = move |y: f64| {
        let dist = (y.abs() - branch).abs();
        (0.5 * dist.max(1.0)).min(phase_cap)
    };
    let horiz_size = move |x: f64| (0.5 * x.abs().max(1.0)).min(decay_cap).min(phase_cap.max(decay_cap));
    vec![
        Leg {
            edges: panels(-y_top, y_top, vert_size),
            map: vertical,
            offset: spec.c,
        },
        Leg {
            edges: panels(spec.c, x_left, horiz_size),
            map: top,
            offset: y_top,
        },
        Leg {
            edges: panels(x_left, spec.c, horiz_size),
            map: bottom,
            offset: y_top,
        },
    ]
}

impl KernelQuery {
    fn contour_sum(&self, legs: &[Leg], xi: f64, t: f64, split: usize) -> (Complex64, usize, f64) {
        let (nodes, weights) = gl16();
        let mut total = Complex64::new(0.0, 0.0);
        let mut count = 0;
        let mut min_zeta = f64::INFINITY;
        for leg in legs {
            for w in leg.edges.windows(2) {
                let sub = (w[1] - w[0]) / split as f64;
                for k in 0..split {
                    let a = w[0] + sub * k as f64;
                    let half = 0.5 * sub;
                    let mid = a + half;
                    for (z, wt) in nodes.iter().zip(weights) {
                        let (s, ds) = (leg.map)(mid + half * z, leg.offset);
                        let zeta = self.zeta(xi, s);
                        min_zeta = min_zeta.min(zeta.norm());
                        total += (s * t).exp() / zeta * ds * (wt * half);
                        count += 1;
                    }
                }
            }
        }
        (total / Complex64::new(0.0, 2.0 * PI), count, min_zeta)
    }

    /// `P(ξ, t)` by the box contour, refined until doubling the node count
    /// changes the value by less than `rel_tol`.
    pub fn eval_p_at(&self, xi: f64, t: f64) -> Result<PValue> {
        if !(t > 0.0 && t.is_finite()) || !xi.is_finite() {
            return Err(Error::Domain(format!("P(ξ, t) needs finite ξ and t > 0, got ξ = {xi}, t = {t}")));
        }
        let spec = &self.contour;
        let legs = contour_legs(spec, xi, t);
        let floor = 1e-13 * t.powf(self.alpha - 1.0);
        let (mut prev, _, mut min_zeta) = self.contour_sum(&legs, xi, t, 1);
        let mut split = 1;
        loop {
            if !(min_zeta > 0.0) {
                return Err(Error::KernelConvergence(format!(
                    "ζ vanishes on the contour at ξ = {xi}, t = {t}"
                )));
            }
            split *= 2;
            let planned: usize = legs.iter().map(|l| (l.edges.len() - 1) * split * PANEL_NODES).sum();
            if planned > spec.max_nodes {
                return Err(Error::KernelConvergence(format!(
                    "P(ξ = {xi}, t = {t}) not converged within {} nodes",
                    spec.max_nodes
                )));
            }
            let (next, n, mz) = self.contour_sum(&legs, xi, t, split);
            min_zeta = min_zeta.min(mz);
            if (next - prev).norm() <= spec.rel_tol * next.norm() + floor {
                return Ok(PValue {
                    value: next,
                    nodes: n,
                    min_abs_zeta: min_zeta,
                });
            }
            prev = next;
        }
    }

    /// `P(ξ, 1)`.
    pub fn eval_p(&self, xi: f64) -> Result<PValue> {
        self.eval_p_at(xi, 1.0)
    }
}

const WINDOW_SPAN: f64 = 6.0;

fn window(xi: f64, cutoff: f64) -> f64 {
    (-(xi / cutoff).powi(2)).exp()
}

/// Windowed spectral samples of `P(·, t)` ready for Fourier inversion on
/// `|x| <= x_max`.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    t: f64,
    cutoff: f64,
    xi: Vec<f64>,
    // quadrature weight times window
    weight: Vec<f64>,
    p: Vec<Complex64>,
    min_abs_zeta: f64,
}

impl KernelProfile {
    /// Samples `ξ ∈ [0, 6 Ξ]` with panels short enough to resolve
    /// `e^(iξx)` for `|x| <= x_max`.
    pub fn new(query: &KernelQuery, t: f64, cutoff: f64, x_max: f64) -> Result<Self> {
        if !(cutoff > 0.0 && x_max > 0.0) {
            return Err(invalid("kernel", "cutoff and x_max must be positive"));
        }
        let xi_max = WINDOW_SPAN * cutoff;
        let reach = x_max.max(t);
        let n_panels = ((xi_max * reach / 3.0).ceil() as usize).max(4);
        let width = xi_max / n_panels as f64;
        let (nodes, weights) = gl16();
        let mut xi = Vec::with_capacity(n_panels * PANEL_NODES);
        let mut weight = Vec::with_capacity(n_panels * PANEL_NODES);
        for k in 0..n_panels {
            let mid = (k as f64 + 0.5) * width;
            for (z, w) in nodes.iter().zip(weights) {
                let x = mid + 0.5 * width * z;
                xi.push(x);
                weight.push(0.5 * width * w * window(x, cutoff));
            }
        }
        let values: Vec<PValue> = xi
            .par_iter()
            .map(|&x| query.eval_p_at(x, t))
            .collect::<Result<_>>()?;
        let min_abs_zeta = values.iter().map(|v| v.min_abs_zeta).fold(f64::INFINITY, f64::min);
        Ok(Self {
            t,
            cutoff,
            xi,
            weight,
            p: values.into_iter().map(|v| v.value).collect(),
            min_abs_zeta,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn min_abs_zeta(&self) -> f64 {
        self.min_abs_zeta
    }

    /// Windowed `G_t(x) = (1/π) ∫_0^∞ Re[e^(iξx) P(ξ, t)] w(ξ) dξ`.
    pub fn g(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for ((xi, w), p) in self.xi.iter().zip(&self.weight).zip(&self.p) {
            let (s, c) = (xi * x).sin_cos();
            acc += w * (c * p.re - s * p.im);
        }
        acc / PI
    }

    /// Trapezoid rule for `∫ G_t dx` over `[-extent, extent]`.
    pub fn mass(&self, extent: f64, intervals: usize) -> f64 {
        let dx = 2.0 * extent / intervals as f64;
        let inner: f64 = (1..intervals)
            .into_par_iter()
            .map(|k| self.g(-extent + k as f64 * dx))
            .sum();
        dx * (inner + 0.5 * (self.g(-extent) + self.g(extent)))
    }
}

/// Spectral cutoff used for point values of `G_1`.
pub const G1_CUTOFF: f64 = 32.0;

/// `G_1(x)`, checked by comparing spectral cutoffs `Ξ` and `2Ξ`.
///
/// The windowed values converge algebraically in the cutoff. `G_1` is
/// singular at the light cone `|x| = 1` and, for `α ≠ 1/2`, at `x = 0`;
/// near those points the check fails with the truncation radius in the
/// message.
pub fn eval_g1(query: &KernelQuery, x: f64) -> Result<f64> {
    let reach = x.abs().max(1.0);
    let coarse = KernelProfile::new(query, 1.0, G1_CUTOFF, reach)?.g(x);
    let fine = KernelProfile::new(query, 1.0, 2.0 * G1_CUTOFF, reach)?.g(x);
    let tol = 2e-3 * fine.abs().max(1e-3);
    if (fine - coarse).abs() > tol {
        return Err(Error::KernelConvergence(format!(
            "G_1({x}) changed by {:.3e} between truncation radii Ξ = {} and {}",
            (fine - coarse).abs(),
            WINDOW_SPAN * G1_CUTOFF,
            2.0 * WINDOW_SPAN * G1_CUTOFF
        )));
    }
    Ok(fine)
}

/// Spectral cutoff for the mass computation, in units of `1/t`.
pub const MASS_CUTOFF: f64 = 16.0;

/// `∫ G_t(x) dx`; the identity predicts `t^(α-1)/Γ(α)`.
pub fn kernel_mass(query: &KernelQuery, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("kernel mass needs t > 0, got {t}")));
    }
    let profile = KernelProfile::new(query, t, MASS_CUTOFF / t, 2.0 * t)?;
    Ok(profile.mass(2.0 * t, 512))
}
