//! L1 history weights `b_k = k^(1-alpha) - (k-1)^(1-alpha)` and their
//! differences `d_k = b_k - b_{k+1}`.

use crate::error::{invalid, Result};
use crate::params::SolverParams;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    // b[k] for k = 1..=n_time + 1; b[0] is unused and zero
    b: Vec<f64>,
    // d[k] for k = 1..=n_time; d[0] is unused and zero
    d: Vec<f64>,
}

/// `k^(1-alpha) - (k-1)^(1-alpha)` evaluated without cancellation:
/// `k^(1-alpha) * (1 - (1 - 1/k)^(1-alpha))`.
fn weight(k: usize, one_minus_alpha: f64) -> f64 {
    if k == 1 {
        return 1.0;
    }
    let kf = k as f64;
    let tail = -(one_minus_alpha * (-1.0 / kf).ln_1p()).exp_m1();
    kf.powf(one_minus_alpha) * tail
}

impl CoefficientTable {
    pub fn new(params: &SolverParams, n_time: usize) -> Result<Self> {
        if n_time == 0 {
            return Err(invalid("n_time", "must be at least 1"));
        }
        let one_minus_alpha = 1.0 - params.alpha();
        let mut b = vec![0.0; n_time + 2];
        for (k, slot) in b.iter_mut().enumerate().skip(1) {
            *slot = weight(k, one_minus_alpha);
        }
        let mut d = vec![0.0; n_time + 1];
        for k in 1..=n_time {
            d[k] = b[k] - b[k + 1];
        }
        Ok(Self { b, d })
    }

    /// Largest `n` for which `d_n` is available.
    pub fn n_time(&self) -> usize {
        self.d.len() - 1
    }

    /// `b_k`, `1 <= k <= n_time + 1`.
    pub fn b(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        self.b[k]
    }

    /// `d_k = b_k - b_{k+1}`, `1 <= k <= n_time`.
    pub fn d(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        self.d[k]
    }

    pub fn b_slice(&self) -> &[f64] {
        &self.b
    }

    pub fn d_slice(&self) -> &[f64] {
        &self.d
    }
}

pub fn make_coefficients(params: &SolverParams, n_time: usize) -> Result<CoefficientTable> {
    CoefficientTable::new(params, n_time)
}
