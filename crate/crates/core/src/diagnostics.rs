//! Discrete norms, errors against oracles, and fitted convergence orders.

use log::info;

use crate::error::{invalid, Error, Result};
use crate::history::SolutionHistory;
use crate::mesh::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::Linf];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::Linf => "linf",
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" => Ok(NormKind::Linf),
            other => Err(invalid("norms", format!("unknown norm `{other}` (l1, l2, linf)"))),
        }
    }
}

/// `(h sum |u_i|^p)^(1/p)`; `Linf` is `max |u_i|`.
pub fn discrete_norm(row: &[f64], h: f64, kind: NormKind) -> f64 {
    match kind {
        NormKind::L1 => h * row.iter().map(|v| v.abs()).sum::<f64>(),
        NormKind::L2 => (h * row.iter().map(|v| v * v).sum::<f64>()).sqrt(),
        NormKind::Linf => row.iter().fold(0.0, |m, v| m.max(v.abs())),
    }
}

/// Closed interval of cell centres used for an error measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Restriction {
    pub x_lo: f64,
    pub x_hi: f64,
}

impl Restriction {
    pub fn full(grid: &GridSpec) -> Self {
        Self {
            x_lo: grid.x_min(),
            x_hi: grid.x_max(),
        }
    }

    /// Middle third of the domain, away from the light-cone boundary layers.
    pub fn central_third(grid: &GridSpec) -> Self {
        let w = grid.x_max() - grid.x_min();
        Self {
            x_lo: grid.x_min() + w / 3.0,
            x_hi: grid.x_max() - w / 3.0,
        }
    }

    pub fn symmetric(radius: f64) -> Self {
        Self {
            x_lo: -radius,
            x_hi: radius,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi
    }

    fn check(&self, grid: &GridSpec) -> Result<()> {
        let slack = 1e-9 * grid.h();
        if self.x_lo > self.x_hi || self.x_lo < grid.x_min() - slack || self.x_hi > grid.x_max() + slack {
            return Err(Error::Domain(format!(
                "restriction [{}, {}] is not inside the domain [{}, {}]",
                self.x_lo,
                self.x_hi,
                grid.x_min(),
                grid.x_max()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub norm_kind: NormKind,
    pub value: f64,
    pub measured_at: f64,
    pub restriction: Restriction,
}

/// Norm of `u^n - oracle` over the cells of `restriction`, where `t = t_n`.
/// The oracle maps `(i, t)` to the reference cell average.
pub fn error_against_oracle<F>(
    history: &SolutionHistory,
    oracle: F,
    t: f64,
    kind: NormKind,
    restriction: Restriction,
) -> Result<ErrorReport>
where
    F: Fn(i64, f64) -> Result<f64>,
{
    let grid = history.grid();
    restriction.check(grid)?;
    let n = grid
        .time_level(t)
        .ok_or_else(|| Error::Domain(format!("t = {t} is not a mesh time level")))?;
    let row = history.row(n)?;
    let mut diff = Vec::new();
    for (o, i) in grid.cell_indices().enumerate() {
        if restriction.contains(grid.x(i)) {
            diff.push(row[o] - oracle(i, t)?);
        }
    }
    Ok(ErrorReport {
        h: grid.h(),
        norm_kind: kind,
        value: discrete_norm(&diff, grid.h(), kind),
        measured_at: t,
        restriction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Pairs dropped because their error was not positive.
    pub excluded: usize,
}

/// Least-squares fit of `log(error) = slope log(h) + intercept`.
pub fn estimate_order(pairs: &[(f64, f64)]) -> Result<OrderFit> {
    if pairs.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(invalid("h", "mesh sizes must be strictly decreasing"));
    }
    let usable: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(h, e)| *h > 0.0 && *e > 0.0 && e.is_finite())
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    let excluded = pairs.len() - usable.len();
    if excluded > 0 {
        info!("estimate_order: excluded {excluded} pair(s) with non-positive error");
    }
    if usable.len() < 3 {
        return Err(invalid(
            "pairs",
            format!("need at least 3 pairs with positive error, got {}", usable.len()),
        ));
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(OrderFit {
        slope,
        intercept,
        r_squared,
        excluded,
    })
}

/// One line of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub alpha: f64,
    pub h: f64,
    pub norm_kind: NormKind,
    pub error: f64,
    pub slope: f64,
}

/// Rows for one sweep, with the fitted slope repeated on each.
pub fn convergence_rows(alpha: f64, kind: NormKind, pairs: &[(f64, f64)]) -> Result<(OrderFit, Vec<ConvergenceRow>)> {
    let fit = estimate_order(pairs)?;
    let rows = pairs
        .iter()
        .map(|&(h, error)| ConvergenceRow {
            alpha,
            h,
            norm_kind: kind,
            error,
            slope: fit.slope,
        })
        .collect();
    Ok((fit, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::SolutionHistory;

    #[test]
    fn norm_examples() {
        assert_eq!(discrete_norm(&[0.0; 4], 0.1, NormKind::L2), 0.0);
        assert!((discrete_norm(&[1.0; 8], 0.25, NormKind::L1) - 2.0).abs() < 1e-15);
        assert_eq!(discrete_norm(&[3.0, 4.0], 1.0, NormKind::L2), 5.0);
        assert_eq!(discrete_norm(&[3.0, -4.0], 0.5, NormKind::Linf), 4.0);
    }

    #[test]
    fn oracle_equal_to_numeric_gives_zero() {
        let g = GridSpec::symmetric(0.25, 1.0, 2.0).unwrap();
        let rows: Vec<Vec<f64>> = (0..5).map(|n| (0..g.n_space()).map(|o| (n + o) as f64).collect()).collect();
        let h = SolutionHistory::from_rows(g, rows).unwrap();
        let r = error_against_oracle(&h, |i, t| h.value(g.time_level(t).unwrap(), i), 0.5, NormKind::L2, Restriction::full(&g))
            .unwrap();
        assert_eq!(r.value, 0.0);
        assert!(error_against_oracle(&h, |_, _| Ok(0.0), 0.3, NormKind::L2, Restriction::full(&g)).is_err());
        assert!(error_against_oracle(&h, |_, _| Ok(0.0), 0.5, NormKind::L2, Restriction::symmetric(9.0)).is_err());
    }

    #[test]
    fn restriction_selects_cells() {
        let g = GridSpec::symmetric(0.25, 1.0, 1.5).unwrap();
        let rows = vec![vec![1.0; g.n_space()]];
        let h = SolutionHistory::from_rows(g, rows).unwrap();
        let r = error_against_oracle(&h, |_, _| Ok(0.0), 0.0, NormKind::L1, Restriction::central_third(&g)).unwrap();
        // centres -0.5..=0.5
        assert!((r.value - 5.0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn exact_power_laws() {
        for (c, s) in [(2.0, 1.0), (0.3, 1.5)] {
            let pairs: Vec<(f64, f64)> = (3..9).map(|k| 0.5f64.powi(k)).map(|h| (h, c * h.powf(s))).collect();
            let fit = estimate_order(&pairs).unwrap();
            assert!((fit.slope - s).abs() < 1e-12);
            assert!((fit.intercept - c.ln()).abs() < 1e-10);
            assert!(fit.r_squared > 1.0 - 1e-12);
        }
    }

    #[test]
    fn order_input_checks() {
        assert!(estimate_order(&[(0.1, 1.0), (0.05, 0.5)]).is_err());
        assert!(estimate_order(&[(0.1, 1.0), (0.2, 0.5), (0.05, 0.1)]).is_err());
        let fit = estimate_order(&[(0.4, 0.4), (0.2, 0.2), (0.1, 0.0), (0.05, 0.05)]).unwrap();
        assert_eq!(fit.excluded, 1);
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_names_round_trip() {
        for k in NormKind::ALL {
            assert_eq!(k.name().parse::<NormKind>().unwrap(), k);
        }
        assert!("l3".parse::<NormKind>().is_err());
    }
}
