//! Solution samples on a grid at a single time, and ordered sequences of them.

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;

/// Values of `u(t, ·)` at every node of `grid`. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    grid: SpatialGrid,
    t: f64,
    u: Vec<f64>,
}

impl Snapshot {
    pub fn new(grid: SpatialGrid, t: f64, u: Vec<f64>) -> Result<Self> {
        if u.len() != grid.n_nodes() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_nodes(),
                got: u.len(),
            });
        }
        if let Some(index) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                index,
                x: grid.x(index),
            });
        }
        Ok(Self { grid, t, u })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn into_values(self) -> Vec<f64> {
        self.u
    }

    pub fn min(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(x_k, u_k)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.grid.x(k), v))
    }

    /// `sup_k |u_k + u_{n-1-k}|`; zero for an exactly odd profile on a
    /// symmetric grid.
    pub fn odd_defect(&self) -> f64 {
        let n = self.u.len();
        (0..n / 2 + 1)
            .map(|k| (self.u[k] + self.u[n - 1 - k]).abs())
            .fold(0.0, f64::max)
    }
}

/// Samples `f` at every node of `grid`.
pub fn build_snapshot<F>(grid: &SpatialGrid, t: f64, f: F) -> Result<Snapshot>
where
    F: Fn(f64) -> f64,
{
    let u = grid.nodes().map(f).collect();
    Snapshot::new(*grid, t, u)
}

/// Stored snapshots of one run, strictly increasing in time, on one grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    config: SimConfig,
    steps: Vec<usize>,
    snapshots: Vec<Snapshot>,
}

impl Trajectory {
    pub fn new(config: SimConfig) -> Self {
        Self {
            config,
            steps: Vec::new(),
            snapshots: Vec::new(),
        }
    }

    pub fn push(&mut self, step: usize, snap: Snapshot) -> Result<()> {
        if snap.grid() != &self.config.grid {
            return Err(Error::InvalidGrid(
                "snapshot grid differs from trajectory grid".into(),
            ));
        }
        if let Some(last) = self.snapshots.last() {
            if snap.t() <= last.t() {
                return Err(Error::Domain(format!(
                    "snapshot times must increase: {} after {}",
                    snap.t(),
                    last.t()
                )));
            }
        }
        self.steps.push(step);
        self.snapshots.push(snap);
        Ok(())
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// Time-step index of each stored snapshot.
    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn first(&self) -> Option<&Snapshot> {
        self.snapshots.first()
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    /// Stored snapshot nearest to time `t`.
    pub fn nearest(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t() - t).abs().total_cmp(&(b.t() - t).abs()))
    }
}

/// Entry of the trajectory directory manifest.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SnapshotEntry {
    pub step: usize,
    pub t: f64,
    pub file: String,
}
