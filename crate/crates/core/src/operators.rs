//! Discrete fractional material derivatives.
//!
//! For `sign = Plus` the operator approximates `(d/dt + d/dx)^alpha`, for
//! `Minus` it approximates `(d/dt - d/dx)^alpha`:
//!
//! ```text
//! delta_± u_i^n = h^-alpha / Γ(2-alpha) * [ u_{i∓1}^n
//!                 - sum_{j=0}^{n-1} (b_{n-j} - b_{n-j+1}) u_{i∓(n-j+1)}^j ]
//! ```
//!
//! Reads outside the mesh return zero unless [`ReadMode::Strict`] is used.

use rayon::prelude::*;

use crate::coeffs::CoefficientTable;
use crate::error::{Error, Result};
use crate::history::SolutionHistory;
use crate::params::SolverParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorSign {
    /// `(d/dt + d/dx)^alpha`, stencil reaches to the left (`i - 1`, `i - (n-j+1)`).
    Plus,
    /// `(d/dt - d/dx)^alpha`, stencil reaches to the right.
    Minus,
}

impl OperatorSign {
    /// Index direction of the stencil: `i ∓ k` becomes `i + direction * k`.
    fn direction(self) -> i64 {
        match self {
            OperatorSign::Plus => -1,
            OperatorSign::Minus => 1,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            OperatorSign::Plus => OperatorSign::Minus,
            OperatorSign::Minus => OperatorSign::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadMode {
    /// Out-of-mesh reads are zero (compactly supported data on the whole line).
    #[default]
    ZeroExtend,
    /// Out-of-mesh reads are errors; for debugging index arithmetic.
    Strict,
}

/// The discrete operators for one parameter set, bound to a coefficient table.
#[derive(Debug, Clone)]
pub struct DiscreteOperator<'a> {
    params: SolverParams,
    coeffs: &'a CoefficientTable,
    mode: ReadMode,
}

impl<'a> DiscreteOperator<'a> {
    pub fn new(params: SolverParams, coeffs: &'a CoefficientTable) -> Self {
        Self {
            params,
            coeffs,
            mode: ReadMode::ZeroExtend,
        }
    }

    pub fn with_mode(mut self, mode: ReadMode) -> Self {
        self.mode = mode;
        self
    }

    fn scale(&self, h: f64) -> f64 {
        h.powf(-self.params.alpha()) / self.params.gamma_2ma()
    }

    fn check_level(&self, history: &SolutionHistory, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Domain("the discrete operator needs n >= 1".into()));
        }
        if n > self.coeffs.n_time() {
            return Err(Error::Domain(format!(
                "time level {n} exceeds the coefficient table ({})",
                self.coeffs.n_time()
            )));
        }
        history.row(n).map(|_| ())
    }

    fn read(&self, history: &SolutionHistory, n: usize, i: i64) -> Result<f64> {
        match self.mode {
            ReadMode::ZeroExtend => history.value(n, i),
            ReadMode::Strict => history.value_strict(n, i),
        }
    }

    /// `delta_±^alpha u_i^n` at a single cell.
    pub fn material_derivative(
        &self,
        history: &SolutionHistory,
        n: usize,
        i: i64,
        sign: OperatorSign,
    ) -> Result<f64> {
        self.check_level(history, n)?;
        let dir = sign.direction();
        let mut acc = 0.0;
        for j in 0..n {
            let k = n - j;
            acc += self.coeffs.d(k) * self.read(history, j, i + dir * (k as i64 + 1))?;
        }
        let lead = self.read(history, n, i + dir)?;
        Ok(self.scale(history.grid().h()) * (lead - acc))
    }

    /// `p delta_-^alpha u_i^n + (1 - p) delta_+^alpha u_i^n`.
    pub fn combined(&self, history: &SolutionHistory, n: usize, i: i64) -> Result<f64> {
        let minus = self.material_derivative(history, n, i, OperatorSign::Minus)?;
        let plus = self.material_derivative(history, n, i, OperatorSign::Plus)?;
        Ok(self.params.p() * minus + self.params.q() * plus)
    }

    /// `delta_±^alpha u^n` on every cell of the mesh (zero extension).
    ///
    /// Bitwise identical to calling [`Self::material_derivative`] cell by cell.
    pub fn material_derivative_row(
        &self,
        history: &SolutionHistory,
        n: usize,
        sign: OperatorSign,
    ) -> Result<Vec<f64>> {
        self.check_level(history, n)?;
        let grid = *history.grid();
        let width = grid.n_space() as i64;
        let dir = sign.direction();
        let scale = self.scale(grid.h());
        let d = self.coeffs.d_slice();
        let lead_row = history.row_unchecked(n);

        let mut out = vec![0.0; grid.n_space()];
        out.par_chunks_mut(256).enumerate().for_each(|(chunk, slab)| {
            let base = (chunk * 256) as i64;
            for (local, slot) in slab.iter_mut().enumerate() {
                let o = base + local as i64;
                let mut acc = 0.0;
                for j in 0..n {
                    let k = n - j;
                    let src = o + dir * (k as i64 + 1);
                    let u = if (0..width).contains(&src) {
                        history.row_unchecked(j)[src as usize]
                    } else {
                        0.0
                    };
                    acc += d[k] * u;
                }
                let src = o + dir;
                let lead = if (0..width).contains(&src) {
                    lead_row[src as usize]
                } else {
                    0.0
                };
                *slot = scale * (lead - acc);
            }
        });
        Ok(out)
    }

    /// Combined operator on every cell of the mesh.
    pub fn combined_row(&self, history: &SolutionHistory, n: usize) -> Result<Vec<f64>> {
        let minus = self.material_derivative_row(history, n, OperatorSign::Minus)?;
        let plus = self.material_derivative_row(history, n, OperatorSign::Plus)?;
        let (p, q) = (self.params.p(), self.params.q());
        Ok(minus.iter().zip(&plus).map(|(m, pl)| p * m + q * pl).collect())
    }
}

/// `delta_±^alpha u_i^n` with zero extension.
pub fn discrete_material_derivative(
    history: &SolutionHistory,
    n: usize,
    i: i64,
    sign: OperatorSign,
    params: &SolverParams,
    coeffs: &CoefficientTable,
) -> Result<f64> {
    DiscreteOperator::new(*params, coeffs).material_derivative(history, n, i, sign)
}

/// `p delta_-^alpha u_i^n + (1 - p) delta_+^alpha u_i^n` with zero extension.
pub fn combined_operator(
    history: &SolutionHistory,
    n: usize,
    i: i64,
    params: &SolverParams,
    coeffs: &CoefficientTable,
) -> Result<f64> {
    DiscreteOperator::new(*params, coeffs).combined(history, n, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::make_coefficients;
    use crate::mesh::GridSpec;

    fn setup(alpha: f64, p: f64) -> (SolverParams, GridSpec, CoefficientTable) {
        let params = SolverParams::new(alpha, p).unwrap();
        let grid = GridSpec::new(0.125, 0.5, -1.0, 1.0).unwrap();
        let coeffs = make_coefficients(&params, grid.n_time()).unwrap();
        (params, grid, coeffs)
    }

    fn zero_rows(grid: &GridSpec, levels: usize) -> Vec<Vec<f64>> {
        vec![vec![0.0; grid.n_space()]; levels]
    }

    #[test]
    fn zero_history_gives_zero() {
        let (params, grid, coeffs) = setup(0.5, 0.3);
        let h = SolutionHistory::from_rows(grid, zero_rows(&grid, 3)).unwrap();
        for sign in [OperatorSign::Plus, OperatorSign::Minus] {
            assert_eq!(discrete_material_derivative(&h, 2, 0, sign, &params, &coeffs).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_lead_term() {
        // n = 1, only u_{i∓1}^1 = c nonzero -> c h^-alpha / Γ(2 - alpha)
        let (params, grid, coeffs) = setup(0.5, 0.3);
        let c = 2.5;
        let expected = c * grid.h().powf(-0.5) / params.gamma_2ma();
        for (sign, at) in [(OperatorSign::Plus, -1i64), (OperatorSign::Minus, 1)] {
            let mut rows = zero_rows(&grid, 2);
            rows[1][grid.offset(at).unwrap()] = c;
            let h = SolutionHistory::from_rows(grid, rows).unwrap();
            let got = discrete_material_derivative(&h, 1, 0, sign, &params, &coeffs).unwrap();
            assert!((got - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn single_history_term() {
        // n = 2, only u^0_{i∓3} nonzero -> -d_2 * c * scale
        let (params, grid, coeffs) = setup(0.5, 0.3);
        let mut rows = zero_rows(&grid, 3);
        rows[0][grid.offset(3).unwrap()] = 1.0;
        let h = SolutionHistory::from_rows(grid, rows).unwrap();
        let got = discrete_material_derivative(&h, 2, 0, OperatorSign::Minus, &params, &coeffs).unwrap();
        let expected = -coeffs.d(2) * grid.h().powf(-0.5) / params.gamma_2ma();
        assert!((got - expected).abs() < 1e-14);
        let other = discrete_material_derivative(&h, 2, 0, OperatorSign::Plus, &params, &coeffs).unwrap();
        assert_eq!(other, 0.0);
    }

    #[test]
    fn strict_mode_reports_out_of_mesh() {
        let (params, grid, coeffs) = setup(0.5, 0.3);
        let h = SolutionHistory::from_rows(grid, zero_rows(&grid, 3)).unwrap();
        let op = DiscreteOperator::new(params, &coeffs).with_mode(ReadMode::Strict);
        assert!(op.material_derivative(&h, 2, 0, OperatorSign::Plus).is_ok());
        let edge = grid.i_min();
        assert!(matches!(
            op.material_derivative(&h, 2, edge, OperatorSign::Plus),
            Err(Error::IndexOutOfMesh { .. })
        ));
    }

    #[test]
    fn missing_row_is_an_error() {
        let (params, grid, coeffs) = setup(0.5, 0.3);
        let h = SolutionHistory::from_rows(grid, zero_rows(&grid, 2)).unwrap();
        assert!(matches!(
            discrete_material_derivative(&h, 2, 0, OperatorSign::Plus, &params, &coeffs),
            Err(Error::MissingRow { .. })
        ));
    }

    #[test]
    fn convex_endpoints() {
        let grid = GridSpec::new(0.125, 0.5, -1.0, 1.0).unwrap();
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|n| (0..grid.n_space()).map(|o| ((n * 7 + o * 3) % 5) as f64).collect())
            .collect();
        let h = SolutionHistory::from_rows(grid, rows).unwrap();
        for (p, sign) in [(1.0, OperatorSign::Minus), (0.0, OperatorSign::Plus)] {
            let params = SolverParams::new(0.4, p).unwrap();
            let coeffs = make_coefficients(&params, grid.n_time()).unwrap();
            let a = combined_operator(&h, 3, 0, &params, &coeffs).unwrap();
            let b = discrete_material_derivative(&h, 3, 0, sign, &params, &coeffs).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn symmetric_history_symmetric_combined_value() {
        // brute-force enumeration of the stencil for n <= 3 at p = 1/2
        let params = SolverParams::new(0.6, 0.5).unwrap();
        let grid = GridSpec::new(0.125, 0.5, -1.0, 1.0).unwrap();
        let coeffs = make_coefficients(&params, grid.n_time()).unwrap();
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|n| {
                grid.cell_indices()
                    .map(|i| 1.0 + (n as f64 + 1.0) * ((i * i) as f64).sqrt().sin())
                    .collect()
            })
            .collect();
        let h = SolutionHistory::from_rows(grid, rows).unwrap();
        for n in 1..=3 {
            for i in 0..4 {
                let left = combined_operator(&h, n, -i, &params, &coeffs).unwrap();
                let right = combined_operator(&h, n, i, &params, &coeffs).unwrap();
                assert!((left - right).abs() <= 1e-12 * right.abs().max(1.0));

                // independent expansion of the stencil
                let scale = grid.h().powf(-0.6) / params.gamma_2ma();
                let u = |lvl: usize, idx: i64| h.value(lvl, idx).unwrap();
                let mut brute = 0.5 * u(n, i + 1) + 0.5 * u(n, i - 1);
                for j in 0..n {
                    let k = (n - j) as i64;
                    let w = coeffs.b(n - j) - coeffs.b(n - j + 1);
                    brute -= w * (0.5 * u(j, i + k + 1) + 0.5 * u(j, i - k - 1));
                }
                brute *= scale;
                assert!((brute - right).abs() <= 1e-12 * brute.abs().max(1.0));
            }
        }
    }

    #[test]
    fn row_form_matches_point_form_bitwise() {
        let (params, grid, coeffs) = setup(0.35, 0.2);
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|n| (0..grid.n_space()).map(|o| ((n * 13 + o * 7) % 11) as f64 / 3.0).collect())
            .collect();
        let h = SolutionHistory::from_rows(grid, rows).unwrap();
        let op = DiscreteOperator::new(params, &coeffs);
        for sign in [OperatorSign::Plus, OperatorSign::Minus] {
            let row = op.material_derivative_row(&h, 4, sign).unwrap();
            for (o, i) in grid.cell_indices().enumerate() {
                let point = op.material_derivative(&h, 4, i, sign).unwrap();
                assert_eq!(row[o].to_bits(), point.to_bits());
            }
        }
    }
}
