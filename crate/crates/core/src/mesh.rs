//! Uniform space-time mesh with a shared step `h`.
//!
//! Cells are `(x_{i-1/2}, x_{i+1/2}]` with centres `x_i = i h`; the mesh
//! covers the integer range `i_min..=i_max`, so `x_min = i_min h` and
//! `x_max = i_max h` are cell centres. Time levels are `t_n = n h` for
//! `n = 0..=n_time`.

use crate::error::{Error, Result};

const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    h: f64,
    t_final: f64,
    n_time: usize,
    i_min: i64,
    i_max: i64,
}

fn aligned(value: f64, h: f64, what: &str) -> Result<i64> {
    let k = (value / h).round();
    if (k * h - value).abs() > h * ALIGN_TOL {
        return Err(Error::Mesh(format!(
            "{what} = {value} is not an integer multiple of h = {h}"
        )));
    }
    Ok(k as i64)
}

impl GridSpec {
    /// Mesh with the light-cone padding rule `x_max - x_min >= 2T + 2h`.
    pub fn new(h: f64, t_final: f64, x_min: f64, x_max: f64) -> Result<Self> {
        let grid = Self::unpadded(h, t_final, x_min, x_max)?;
        if x_max - x_min < 2.0 * t_final + 2.0 * h - h * ALIGN_TOL {
            return Err(Error::Mesh(format!(
                "domain [{x_min}, {x_max}] is narrower than 2T + 2h = {} (light-cone padding)",
                2.0 * t_final + 2.0 * h
            )));
        }
        Ok(grid)
    }

    /// Mesh without the padding rule. Used to study clipped sources.
    pub fn unpadded(h: f64, t_final: f64, x_min: f64, x_max: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Mesh(format!("h must be positive, got {h}")));
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::Mesh(format!("T must be positive, got {t_final}")));
        }
        let n_time = (t_final / h).round();
        if n_time < 1.0 || (n_time * h - t_final).abs() > h * ALIGN_TOL {
            return Err(Error::Mesh(format!(
                "T = {t_final} must be an exact multiple of h = {h} (n_time = round(T/h), |n_time h - T| <= 1e-9 h)"
            )));
        }
        let i_min = aligned(x_min, h, "x_min")?;
        let i_max = aligned(x_max, h, "x_max")?;
        if i_max < i_min {
            return Err(Error::Mesh(format!("x_max = {x_max} is below x_min = {x_min}")));
        }
        Ok(Self {
            h,
            t_final,
            n_time: n_time as usize,
            i_min,
            i_max,
        })
    }

    /// Symmetric mesh `[-half_width, half_width]`.
    pub fn symmetric(h: f64, t_final: f64, half_width: f64) -> Result<Self> {
        Self::new(h, t_final, -half_width, half_width)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn n_space(&self) -> usize {
        (self.i_max - self.i_min + 1) as usize
    }

    pub fn i_min(&self) -> i64 {
        self.i_min
    }

    pub fn i_max(&self) -> i64 {
        self.i_max
    }

    pub fn x_min(&self) -> f64 {
        self.i_min as f64 * self.h
    }

    pub fn x_max(&self) -> f64 {
        self.i_max as f64 * self.h
    }

    pub fn x(&self, i: i64) -> f64 {
        i as f64 * self.h
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.h
    }

    pub fn contains(&self, i: i64) -> bool {
        i >= self.i_min && i <= self.i_max
    }

    /// Storage offset of cell `i`.
    pub fn offset(&self, i: i64) -> Option<usize> {
        self.contains(i).then(|| (i - self.i_min) as usize)
    }

    pub fn cell_indices(&self) -> impl Iterator<Item = i64> + Clone {
        self.i_min..=self.i_max
    }

    pub fn cell_centres(&self) -> Vec<f64> {
        self.cell_indices().map(|i| self.x(i)).collect()
    }

    /// Time level index of `t`, if `t` lies on the mesh within tolerance.
    pub fn time_level(&self, t: f64) -> Option<usize> {
        let n = (t / self.h).round();
        if n < 0.0 || n > self.n_time as f64 || (n * self.h - t).abs() > self.h * ALIGN_TOL {
            return None;
        }
        Some(n as usize)
    }

    /// Cell index whose centre is `x`, if `x` is a mesh node inside the domain.
    pub fn node_index(&self, x: f64) -> Option<i64> {
        let i = (x / self.h).round();
        if (i * self.h - x).abs() > self.h * ALIGN_TOL {
            return None;
        }
        let i = i as i64;
        self.contains(i).then_some(i)
    }

    /// Same mesh with a different horizon.
    pub fn with_horizon(&self, t_final: f64) -> Result<Self> {
        Self::unpadded(self.h, t_final, self.x_min(), self.x_max())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_layout() {
        let g = GridSpec::new(0.25, 1.0, -2.0, 2.0).unwrap();
        assert_eq!(g.n_time(), 4);
        assert_eq!(g.n_space(), 17);
        assert_eq!(g.i_min(), -8);
        assert_eq!(g.offset(-8), Some(0));
        assert_eq!(g.offset(9), None);
        assert_eq!(g.time_level(0.5), Some(2));
        assert_eq!(g.time_level(0.6), None);
        assert_eq!(g.node_index(-1.0), Some(-4));
    }

    #[test]
    fn horizon_must_be_mesh_multiple() {
        let err = GridSpec::new(0.3, 1.0, -3.0, 3.0).unwrap_err();
        assert!(matches!(err, Error::Mesh(_)));
        assert!(err.to_string().contains("multiple of h"));
    }

    #[test]
    fn padding_rule() {
        // 2T + 2h = 2.5 > 2.0
        assert!(GridSpec::new(0.25, 1.0, -1.0, 1.0).is_err());
        assert!(GridSpec::new(0.25, 1.0, -1.25, 1.25).is_ok());
        assert!(GridSpec::unpadded(0.25, 1.0, -1.0, 1.0).is_ok());
    }

    #[test]
    fn unaligned_bounds_rejected() {
        assert!(GridSpec::new(0.25, 1.0, -2.1, 2.0).is_err());
        assert!(GridSpec::new(-0.25, 1.0, -2.0, 2.0).is_err());
    }
}
