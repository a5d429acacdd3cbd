//! Run configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::FluxSpec;
use crate::grid::{SpatialGrid, TimeGrid};
use crate::initial::InitialConditionSpec;

/// Boundary condition at `x_min`. The right boundary is always Neumann.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeftBoundary {
    /// `u(t, 0) = 0`; requires `x_min == 0` and spatially odd initial data.
    Dirichlet0,
    /// Zero-flux ghost node `u_{-1} = u_1`, used for full-line runs on `[-L, L]`.
    Neumann,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub flux: FluxSpec,
    pub grid: SpatialGrid,
    pub time: TimeGrid,
    pub ic: InitialConditionSpec,
    pub bc_left: LeftBoundary,
    pub snapshot_stride: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snapshot_stride == 0 {
            return Err(Error::param("snapshot_stride", "must be >= 1"));
        }
        if self.bc_left == LeftBoundary::Dirichlet0 {
            if self.grid.x_min() != 0.0 {
                return Err(Error::param(
                    "bc_left",
                    format!("dirichlet0 needs x_min = 0, got {}", self.grid.x_min()),
                ));
            }
            let ic = self.ic.build()?;
            if !ic.is_odd() {
                return Err(Error::param(
                    "bc_left",
                    format!("dirichlet0 needs spatially odd initial data, `{}` is not", self.ic.kind),
                ));
            }
        }
        Ok(())
    }
}
