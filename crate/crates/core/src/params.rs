use crate::error::{invalid, Result};
use crate::special::gamma_positive;

/// Order `alpha` of the fractional material derivatives and the weight `p`
/// of the `(d/dt - d/dx)^alpha` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    alpha: f64,
    p: f64,
    gamma_2ma: f64,
    gamma_1ma: f64,
}

impl SolverParams {
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
            gamma_2ma: gamma_positive(2.0 - alpha),
            gamma_1ma: gamma_positive(1.0 - alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Weight of the `(d/dt + d/dx)^alpha` branch, `1 - p`.
    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// Γ(2 - α).
    pub fn gamma_2ma(&self) -> f64 {
        self.gamma_2ma
    }

    /// Γ(1 - α).
    pub fn gamma_1ma(&self) -> f64 {
        self.gamma_1ma
    }

    /// Parameters with `p` and `1 - p` exchanged.
    pub fn mirrored(&self) -> Self {
        Self { p: 1.0 - self.p, ..*self }
    }

    /// Largest mesh step for which the explicit scheme's L2 stability
    /// estimate holds: `(1 - alpha)^(1 / (2 alpha))`.
    pub fn stability_mesh_bound(&self) -> f64 {
        stability_mesh_bound(self.alpha)
    }
}

pub fn stability_mesh_bound(alpha: f64) -> f64 {
    (1.0 - alpha).powf(1.0 / (2.0 * alpha))
}
