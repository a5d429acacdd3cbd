//! Experiment manifests: one TOML file per run.
//!
//! ```toml
//! name = "shock-a1"
//!
//! [flux]
//! kind = "regularized-modular"
//! epsilon = 1e-16
//!
//! [grid]
//! x_min = 0.0
//! x_max = 5.0
//! h = 0.01
//!
//! [time]
//! t_end = 0.3
//! tau = 0.0005
//!
//! [initial]
//! kind = "shock-alpha"
//! alpha = 1.0
//!
//! [run]
//! bc_left = "dirichlet0"
//!
//! [fit]
//!
//! [[overlay]]
//! kind = "cole-hopf"
//! times = [0.1]
//! ```

use std::path::{Path, PathBuf};

use coalesce_core::analysis::{FitOptions, T0Grid, WindowPolicy, DEFAULT_CAP_FRACTION};
use coalesce_core::solver::{OscillationPolicy, RunOptions};
use coalesce_core::{
    FluxSpec, InitialConditionSpec, LeftBoundary, Params, SimConfig, SpatialGrid, TimeGrid,
};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub name: String,
    /// Run directory, relative to the output root. Defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub flux: FluxSpec,
    pub grid: GridSection,
    pub time: TimeSection,
    pub initial: InitialConditionSpec,
    #[serde(default)]
    pub run: RunSection,
    /// Present to request a scaling-law fit of the coalescing branch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSection>,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default, rename = "overlay", skip_serializing_if = "Vec::is_empty")]
    pub overlays: Vec<OverlaySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_nodes: Option<usize>,
}

impl GridSection {
    pub fn build(&self) -> CliResult<SpatialGrid> {
        match (self.h, self.n_nodes) {
            (Some(h), None) => Ok(SpatialGrid::with_spacing(self.x_min, self.x_max, h)?),
            (None, Some(n)) => Ok(SpatialGrid::new(self.x_min, self.x_max, n)?),
            _ => Err(CliError::Config(
                "[grid] needs exactly one of `h` and `n_nodes`".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
}

impl TimeSection {
    pub fn build(&self) -> CliResult<TimeGrid> {
        match (self.tau, self.n_steps) {
            (Some(tau), None) => Ok(TimeGrid::with_step(self.t_end, tau)?),
            (None, Some(n)) => Ok(TimeGrid::new(self.t_end, n)?),
            _ => Err(CliError::Config(
                "[time] needs exactly one of `tau` and `n_steps`".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Defaults to `dirichlet0` when `x_min = 0` and `neumann` otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bc_left: Option<LeftBoundary>,
    pub snapshot_stride: usize,
    pub oscillation: OscillationPolicy,
    pub zero_threshold: f64,
    pub blowup_factor: f64,
    /// Largest jump of a zero between steps that still continues a branch.
    /// Defaults to twenty grid spacings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub match_window: Option<f64>,
    /// Also write a gnuplot script.
    pub plot: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            bc_left: None,
            snapshot_stride: 100,
            oscillation: OscillationPolicy::Fail,
            zero_threshold: 0.0,
            blowup_factor: 1e3,
            match_window: None,
            plot: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    /// Smallest `ξ` kept. Defaults to five grid spacings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0_step: Option<f64>,
}

impl FitSection {
    /// Fit options for a branch ending at `t_last`, sampled every `tau`.
    pub fn options(&self, h: f64, t_last: f64, tau: f64) -> CliResult<FitOptions> {
        let window = WindowPolicy {
            floor: self.window_floor.unwrap_or(5.0 * h),
            cap_fraction: self.cap_fraction.unwrap_or(DEFAULT_CAP_FRACTION),
            ..WindowPolicy::default()
        };
        Ok(FitOptions {
            window,
            t0_grid: t0_grid(self.t0_lo, self.t0_hi, self.t0_step, t_last, tau)?,
            no_refine: false,
        })
    }
}

/// Completes a partially specified `t₀` grid from the defaults around `t_last`.
pub fn t0_grid(
    lo: Option<f64>,
    hi: Option<f64>,
    step: Option<f64>,
    t_last: f64,
    tau: f64,
) -> CliResult<Option<T0Grid>> {
    if lo.is_none() && hi.is_none() && step.is_none() {
        return Ok(None);
    }
    let d = T0Grid::around(t_last, tau);
    let grid = T0Grid {
        lo: lo.unwrap_or(d.lo),
        hi: hi.unwrap_or(d.hi),
        step: step.unwrap_or(d.step),
    };
    if !(grid.step > 0.0 && grid.hi >= grid.lo) {
        return Err(CliError::Config(format!(
            "t0 grid needs step > 0 and hi >= lo, got lo = {}, hi = {}, step = {}",
            grid.lo, grid.hi, grid.step
        )));
    }
    Ok(Some(grid))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSection {
    /// Class-I margin. Defaults to `min|φ±|/4`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Gagliardo–Nirenberg constant for class II. Defaults to `2^{2/3}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_gn: Option<f64>,
    /// Asymptotic limits, when the initial condition does not know them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_plus: Option<f64>,
}

/// A reference solution sampled on the run grid alongside the simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlaySpec {
    pub kind: String,
    pub times: Vec<f64>,
    #[serde(flatten)]
    pub params: Params,
}

impl ExperimentManifest {
    pub fn from_toml_str(text: &str) -> CliResult<Self> {
        let m: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read manifest {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifests always serialize")
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.name.trim().is_empty() {
            return Err(CliError::Config("manifest name must be nonempty".into()));
        }
        if self.run.match_window.is_some_and(|w| !(w > 0.0)) {
            return Err(CliError::Config("[run] match_window must be > 0".into()));
        }
        for o in &self.overlays {
            if o.times.iter().any(|t| !(*t >= 0.0)) {
                return Err(CliError::Config(format!(
                    "overlay `{}` has a negative or non-finite time",
                    o.kind
                )));
            }
        }
        self.sim_config()?.validate()?;
        Ok(())
    }

    pub fn bc_left(&self) -> LeftBoundary {
        self.run.bc_left.unwrap_or(if self.grid.x_min == 0.0 {
            LeftBoundary::Dirichlet0
        } else {
            LeftBoundary::Neumann
        })
    }

    pub fn sim_config(&self) -> CliResult<SimConfig> {
        Ok(SimConfig {
            flux: self.flux.clone(),
            grid: self.grid.build()?,
            time: self.time.build()?,
            ic: self.initial.clone(),
            bc_left: self.bc_left(),
            snapshot_stride: self.run.snapshot_stride,
        })
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            zero_threshold: self.run.zero_threshold,
            blowup_factor: self.run.blowup_factor,
            oscillation: self.run.oscillation,
            ..RunOptions::default()
        }
    }

    pub fn match_window(&self, grid: &SpatialGrid) -> f64 {
        self.run.match_window.unwrap_or(20.0 * grid.h())
    }

    pub fn run_dir(&self, root: &Path) -> PathBuf {
        root.join(self.output.clone().unwrap_or_else(|| PathBuf::from(&self.name)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHOCK: &str = r#"
name = "shock"

[flux]
kind = "regularized-modular"
epsilon = 1e-16

[grid]
x_min = 0.0
x_max = 5.0
h = 0.01

[time]
t_end = 0.3
tau = 0.0005

[initial]
kind = "shock-alpha"
alpha = 1.0

[fit]
t0_step = 1e-5

[[overlay]]
kind = "profile"
times = [0.0, 0.5]
phi_minus = -1.0
phi_plus = 1.0
"#;

    #[test]
    fn parses_sections() {
        let m = ExperimentManifest::from_toml_str(SHOCK).unwrap();
        assert_eq!(m.bc_left(), LeftBoundary::Dirichlet0);
        assert_eq!(m.run.oscillation, OscillationPolicy::Fail);
        let cfg = m.sim_config().unwrap();
        assert_eq!(cfg.grid.n_nodes(), 501);
        assert_eq!(cfg.time.n_steps(), 600);
        assert_eq!(m.fit.as_ref().unwrap().t0_step, Some(1e-5));
        assert_eq!(m.overlays[0].params.number("phi_minus").unwrap(), Some(-1.0));
    }

    #[test]
    fn toml_round_trip() {
        let m = ExperimentManifest::from_toml_str(SHOCK).unwrap();
        let back = ExperimentManifest::from_toml_str(&m.to_toml()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn rejects_bad_input() {
        let empty_name = SHOCK.replace("name = \"shock\"", "name = \"  \"");
        assert!(ExperimentManifest::from_toml_str(&empty_name).is_err());
        let both = SHOCK.replace("h = 0.01", "h = 0.01\nn_nodes = 501");
        assert!(ExperimentManifest::from_toml_str(&both).is_err());
        let unknown = SHOCK.replace("[fit]", "[fit]\nfoo = 1");
        assert!(ExperimentManifest::from_toml_str(&unknown).is_err());
        let neumann_free = SHOCK.replace("x_min = 0.0", "x_min = -5.0");
        let m = ExperimentManifest::from_toml_str(&neumann_free).unwrap();
        assert_eq!(m.bc_left(), LeftBoundary::Neumann);
        let wrong_bc = SHOCK.replace("[fit]", "[run]\nbc_left = \"dirichlet0\"\n[fit]").replace("x_min = 0.0", "x_min = -5.0");
        let err = ExperimentManifest::from_toml_str(&wrong_bc).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn partial_t0_grid_is_completed() {
        let g = t0_grid(None, None, Some(1e-6), 0.25, 0.0005).unwrap().unwrap();
        assert_eq!(g.step, 1e-6);
        assert!((g.lo - 0.25005).abs() < 1e-15);
        assert!(t0_grid(None, None, None, 0.25, 0.0005).unwrap().is_none());
        assert!(t0_grid(Some(1.0), Some(0.5), None, 0.25, 0.0005).is_err());
    }
}
