use crate::error::{Error, Result};
use crate::mesh::GridSpec;

/// Dense matrix of cell averages `u_i^n`, one row per completed time level.
///
/// The scheme is nonlocal in time so every past row stays live. Rows are
/// appended in order and never modified afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionHistory {
    grid: GridSpec,
    data: Vec<f64>,
    rows: usize,
}

impl SolutionHistory {
    pub fn new(grid: GridSpec, initial: Vec<f64>) -> Result<Self> {
        let n_space = grid.n_space();
        if initial.len() != n_space {
            return Err(Error::Mesh(format!(
                "initial condition has {} values, mesh has {n_space} cells",
                initial.len()
            )));
        }
        check_finite(&initial, 0, &grid)?;
        let mut data = Vec::with_capacity((grid.n_time() + 1) * n_space);
        data.extend_from_slice(&initial);
        Ok(Self { grid, data, rows: 1 })
    }

    /// History with every row supplied up front (operator-level testing).
    pub fn from_rows(grid: GridSpec, rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut it = rows.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::Mesh("history needs at least the initial row".into()))?;
        let mut h = Self::new(grid, first)?;
        for row in it {
            h.push_row(row)?;
        }
        Ok(h)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Number of populated rows (time levels `0..len`).
    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    /// Index of the last populated time level.
    pub fn last_level(&self) -> usize {
        self.rows - 1
    }

    pub fn row(&self, n: usize) -> Result<&[f64]> {
        if n >= self.rows {
            return Err(Error::MissingRow {
                requested: n,
                available: self.rows.saturating_sub(1),
            });
        }
        let w = self.grid.n_space();
        Ok(&self.data[n * w..(n + 1) * w])
    }

    pub(crate) fn row_unchecked(&self, n: usize) -> &[f64] {
        let w = self.grid.n_space();
        &self.data[n * w..(n + 1) * w]
    }

    /// `u_i^n` with zero extension outside the mesh.
    pub fn value(&self, n: usize, i: i64) -> Result<f64> {
        let row = self.row(n)?;
        Ok(self.grid.offset(i).map_or(0.0, |o| row[o]))
    }

    /// `u_i^n`, erroring when `i` is outside the mesh.
    pub fn value_strict(&self, n: usize, i: i64) -> Result<f64> {
        let row = self.row(n)?;
        let o = self.grid.offset(i).ok_or(Error::IndexOutOfMesh {
            index: i,
            min: self.grid.i_min(),
            max: self.grid.i_max(),
        })?;
        Ok(row[o])
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.grid.n_space() {
            return Err(Error::Mesh(format!(
                "row has {} values, mesh has {} cells",
                row.len(),
                self.grid.n_space()
            )));
        }
        check_finite(&row, self.rows, &self.grid)?;
        self.data.extend_from_slice(&row);
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.grid.n_space())
    }

    /// Raw storage, row-major.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

fn check_finite(row: &[f64], n: usize, grid: &GridSpec) -> Result<()> {
    if let Some((o, &v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite {
            n,
            i: grid.i_min() + o as i64,
            value: v,
        });
    }
    Ok(())
}
