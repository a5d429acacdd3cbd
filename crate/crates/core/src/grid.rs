//! Uniform space and time grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1-D grid with `n_nodes` nodes on `[x_min, x_max]`.
///
/// Node positions are always computed as `x_min + k * h`, never by
/// accumulation, so the grid is exactly uniform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n_nodes: usize,
    h: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n_nodes: usize,
}

impl TryFrom<RawGrid> for SpatialGrid {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        SpatialGrid::new(raw.x_min, raw.x_max, raw.n_nodes)
    }
}

impl From<SpatialGrid> for RawGrid {
    fn from(g: SpatialGrid) -> Self {
        RawGrid {
            x_min: g.x_min,
            x_max: g.x_max,
            n_nodes: g.n_nodes,
        }
    }
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_nodes: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_nodes < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes, got {n_nodes}"
            )));
        }
        let h = (x_max - x_min) / (n_nodes - 1) as f64;
        Ok(Self {
            x_min,
            x_max,
            n_nodes,
            h,
        })
    }

    /// Grid with spacing `h`; `(x_max - x_min) / h` must be an integer to
    /// within 1e-9 relative.
    pub fn with_spacing(x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be > 0, got {h}")));
        }
        let cells = (x_max - x_min) / h;
        let n = cells.round();
        if (cells - n).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "length {} is not a multiple of h = {h}",
                x_max - x_min
            )));
        }
        Self::new(x_min, x_max, n as usize + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Number of cells, `N` in the usual notation.
    pub fn n_cells(&self) -> usize {
        self.n_nodes - 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Position of node `k`. The lower half is measured from `x_min` and the
    /// upper half from `x_max`, so a grid with `x_min == -x_max` is exactly
    /// mirror-symmetric.
    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        let n = self.n_nodes - 1;
        if 2 * k <= n {
            self.x_min + k as f64 * self.h
        } else {
            self.x_max - (n - k) as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_nodes).map(move |k| self.x(k))
    }

    /// True when node `k` and node `n-1-k` are mirror images about 0.
    pub fn is_symmetric(&self) -> bool {
        self.x_min == -self.x_max
    }
}

/// `n_steps` uniform steps of size `tau` covering `[0, t_end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTime", into = "RawTime")]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
    tau: f64,
}

#[derive(Serialize, Deserialize)]
struct RawTime {
    t_end: f64,
    n_steps: usize,
}

impl TryFrom<RawTime> for TimeGrid {
    type Error = Error;
    fn try_from(raw: RawTime) -> Result<Self> {
        TimeGrid::new(raw.t_end, raw.n_steps)
    }
}

impl From<TimeGrid> for RawTime {
    fn from(t: TimeGrid) -> Self {
        RawTime {
            t_end: t.t_end,
            n_steps: t.n_steps,
        }
    }
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidGrid(format!("t_end must be > 0, got {t_end}")));
        }
        if n_steps == 0 {
            return Err(Error::InvalidGrid("need at least one time step".into()));
        }
        Ok(Self {
            t_end,
            n_steps,
            tau: t_end / n_steps as f64,
        })
    }

    /// Steps of size `tau` up to (at least) `t_end`; the final time is
    /// `ceil(t_end / tau) * tau` when `t_end` is not a multiple of `tau`.
    pub fn with_step(t_end: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidGrid(format!("tau must be > 0, got {tau}")));
        }
        let steps = t_end / tau;
        let n = if (steps - steps.round()).abs() <= 1e-9 * steps.max(1.0) {
            steps.round()
        } else {
            steps.ceil()
        };
        Self::new(n * tau, n as usize)
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t(&self, m: usize) -> f64 {
        if m == self.n_steps {
            self.t_end
        } else {
            m as f64 * self.tau
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_exact_multiples() {
        let g = SpatialGrid::with_spacing(0.0, 5.0, 0.01).unwrap();
        assert_eq!(g.n_nodes(), 501);
        assert_eq!(g.h(), 0.01);
        assert_eq!(g.x(100), 100.0 * 0.01);
        assert_eq!(g.x(500), 5.0);
        for k in 1..g.n_nodes() - 1 {
            assert!((g.x(k) - (g.x_min() + k as f64 * g.h())).abs() < 1e-14);
        }
        let s = SpatialGrid::with_spacing(-5.0, 5.0, 0.01).unwrap();
        for k in 0..s.n_nodes() {
            assert_eq!(s.x(k), -s.x(s.n_nodes() - 1 - k));
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SpatialGrid::new(0.0, 1.0, 2).is_err());
        assert!(SpatialGrid::new(1.0, 1.0, 10).is_err());
        assert!(SpatialGrid::with_spacing(0.0, 1.0, 0.3).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::new(0.0, 4).is_err());
    }

    #[test]
    fn time_grid_from_step() {
        let t = TimeGrid::with_step(0.3, 0.0005).unwrap();
        assert_eq!(t.n_steps(), 600);
        assert!((t.tau() - 0.0005).abs() < 1e-18);
        assert_eq!(t.t(600), t.t_end());
    }

    #[test]
    fn serde_validates() {
        let bad = r#"{"x_min":0.0,"x_max":1.0,"n_nodes":1}"#;
        assert!(serde_json::from_str::<SpatialGrid>(bad).is_err());
        let good = r#"{"x_min":-1.0,"x_max":1.0,"n_nodes":201}"#;
        let g: SpatialGrid = serde_json::from_str(good).unwrap();
        assert!(g.is_symmetric());
        assert!((g.h() - 0.01).abs() < 1e-15);
    }
}
