//! Adaptive Gauss–Kronrod (7/15) quadrature, Gauss–Legendre rules, and a
//! graded substitution for algebraic endpoint singularities.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Cap on the number of subintervals.
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-13,
            rel: 1e-10,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self {
            rel,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    Estimate {
        value: k * half,
        error: ((k - g) * half).abs(),
    }
}

struct Piece {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive 15-point Gauss–Kronrod quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if b < a {
        let r = integrate(f, b, a, tol)?;
        return Ok(Estimate { value: -r.value, ..r });
    }
    let first = kronrod(&f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, est: first });

    while error > tol.abs.max(tol.rel * value.abs()) {
        if !value.is_finite() {
            return Err(Error::Quadrature { a, b, estimate: error });
        }
        if heap.len() >= tol.max_intervals {
            let worst = heap.peek().expect("heap is never empty");
            return Err(Error::Quadrature {
                a: worst.a,
                b: worst.b,
                estimate: error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            heap.push(Piece {
                est: Estimate { error: 0.0, ..worst.est },
                ..worst
            });
            error -= worst.est.error;
            continue;
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.est.value;
        error += left.error + right.error - worst.est.error;
        heap.push(Piece { a: worst.a, b: mid, est: left });
        heap.push(Piece { a: mid, b: worst.b, est: right });
    }

    // resum to drop the drift of the running totals
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error));
    Ok(Estimate { value, error })
}

/// Integrate `f` over `[0, width]` where `f(s)` behaves like `s^(gamma - 1)`
/// near `s = 0`, `0 < gamma <= 1`.
///
/// Uses `s = width z^(1/gamma)`, which makes the integrand bounded. Callers
/// pass the offset from the singular point so no precision is lost near it.
pub fn integrate_graded<F: Fn(f64) -> f64>(f: F, width: f64, gamma: f64, tol: Tolerance) -> Result<Estimate> {
    debug_assert!(gamma > 0.0 && gamma <= 1.0);
    if width == 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let expo = 1.0 / gamma;
    integrate(
        |z: f64| {
            let zp = z.powf(expo - 1.0);
            let s = width * zp * z;
            if s == 0.0 {
                return 0.0;
            }
            f(s) * width * expo * zp
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integrate `f` over `[a, inf)` where `f` decays like `x^(-1-gamma)`, via
/// `x = a z^(-1/gamma)`. Requires `a > 0`.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, a: f64, gamma: f64, tol: Tolerance) -> Result<Estimate> {
    debug_assert!(a > 0.0 && gamma > 0.0);
    let expo = 1.0 / gamma;
    integrate(
        |z: f64| {
            if z <= 0.0 {
                return 0.0;
            }
            let x = a * z.powf(-expo);
            f(x) * a * expo * z.powf(-expo - 1.0)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for k in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let mf = m as f64;
                let p2 = ((2.0 * mf - 1.0) * x * p1 - (mf - 1.0) * p0) / mf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x + 1.0, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((r.value - 10.0).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits() {
        let r = integrate(f64::exp, 1.0, 0.0, Tolerance::default()).unwrap();
        assert!((r.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory() {
        let r = integrate(|x| (20.0 * x).sin(), 0.0, std::f64::consts::PI, Tolerance::default()).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn graded_endpoint_singularity() {
        // ∫_0^1 x^{-3/4} (1 - x)^{-1/2} dx = B(1/4, 1/2), split at 1/2
        let beta = 5.244_115_108_584_239_6;
        let tol = Tolerance::relative(1e-13);
        let left = integrate_graded(|s| s.powf(-0.75) * (1.0 - s).powf(-0.5), 0.5, 0.25, tol).unwrap();
        let right = integrate_graded(|s| (1.0 - s).powf(-0.75) * s.powf(-0.5), 0.5, 0.5, tol).unwrap();
        let got = left.value + right.value;
        assert!((got - beta).abs() < 1e-11, "{got}");
    }

    #[test]
    fn tail_integral() {
        // ∫_2^∞ x^{-1.3} dx = 2^{-0.3} / 0.3
        let r = integrate_tail(|x| x.powf(-1.3), 2.0, 0.3, Tolerance::relative(1e-12)).unwrap();
        assert!((r.value - 2f64.powf(-0.3) / 0.3).abs() < 1e-11);
    }

    #[test]
    fn non_convergence_reported() {
        let tol = Tolerance {
            max_intervals: 8,
            ..Tolerance::relative(1e-14)
        };
        let err = integrate(|x| x.powf(-0.9), 0.0, 1.0, tol).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // degree 2n - 1 exact
            let deg = 2 * n - 2;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((got - 2.0 / (deg as f64 + 1.0)).abs() < 1e-12, "n = {n}");
        }
    }
}
