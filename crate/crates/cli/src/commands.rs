//! The subcommands. Each returns a report and writes its files under a
//! per-run directory; `main` only parses arguments and maps errors to exit
//! codes.

use std::fs;
use std::path::{Path, PathBuf};

use coalesce_core::analysis::{
    default_eta, default_gn_constant, extinction_bound_class_i, extinction_bound_class_ii,
    fit_scaling_law, ExtinctionBound, FitOptions, FitResult, ScalingFit, WindowPolicy,
    DEFAULT_CAP_FRACTION,
};
use coalesce_core::interfaces::{count_zeros, match_tracks, select_coalescing_branch, Branch};
use coalesce_core::io::{
    read_track_csv, write_snapshot_csv, write_track_csv, write_trajectory, write_xy_csv,
};
use coalesce_core::oracles::reference_solution;
use coalesce_core::shock::{classify_initial_data, DataClass, ShockData};
use coalesce_core::solver::{run_with, RunOutput};
use coalesce_core::{LeftBoundary, Params, Snapshot, SpatialGrid};
use serde::{Deserialize, Serialize};

use crate::manifest::{t0_grid, ExperimentManifest, FitSection, OverlaySpec};
use crate::plot::{gnuplot_script, PlotInputs};
use crate::{CliError, CliResult};

pub const TRACK_FILE: &str = "track.csv";
pub const FIT_FILE: &str = "fit.csv";
pub const RESIDUAL_FILE: &str = "residual.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const ZERO_COUNT_FILE: &str = "zero_count.csv";
pub const BOUNDS_FILE: &str = "bounds.json";

/// Window floor used by `fit` when the grid spacing is unknown: five
/// spacings of the preset grid.
pub const DEFAULT_WINDOW_FLOOR: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub id: usize,
    pub t_first: f64,
    pub t_last: f64,
    pub end: Option<f64>,
    pub xi_last: f64,
    pub n_samples: usize,
}

impl From<&Branch> for BranchSummary {
    fn from(b: &Branch) -> Self {
        Self {
            id: b.id,
            t_first: b.t[0],
            t_last: b.last_time(),
            end: b.end,
            xi_last: b.last_position(),
            n_samples: b.t.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub name: String,
    pub t_end: f64,
    pub n_steps: usize,
    pub initial_zero_count: usize,
    pub final_zero_count: usize,
    pub branches: Vec<BranchSummary>,
    /// Id of the branch whose termination is the coalescence event.
    pub coalescing_branch: Option<usize>,
    /// Termination time of that branch, if it terminated.
    pub coalescence_time: Option<f64>,
    pub fit: Option<ScalingFit>,
    pub fit_error: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SimulateReport {
    pub dir: PathBuf,
    pub summary: SimulationSummary,
    pub branches: Vec<Branch>,
    pub fit: Option<FitResult>,
    pub output: RunOutput,
}

/// Fits the coalescing branch of `branches`.
pub fn fit_branches(branches: &[Branch], opts: &FitOptions) -> CliResult<(usize, FitResult)> {
    let b = select_coalescing_branch(branches)
        .ok_or_else(|| CliError::Config("track has no interface samples".into()))?;
    let fit = fit_scaling_law(&b.t, &b.xi, opts)?;
    Ok((b.id, fit))
}

pub fn write_fit(dir: &Path, fit: &FitResult) -> CliResult<(PathBuf, PathBuf)> {
    let fit_path = dir.join(FIT_FILE);
    fs::write(
        &fit_path,
        format!("{}\n{}\n", ScalingFit::CSV_HEADER, fit.fit.csv_row()),
    )?;
    let residual_path = dir.join(RESIDUAL_FILE);
    write_xy_csv(&residual_path, ("t0", "residual"), fit.curve.iter().copied())?;
    Ok((fit_path, residual_path))
}

/// Reads the single row of a fit CSV.
pub fn read_fit_csv(path: &Path) -> CliResult<ScalingFit> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(ScalingFit::CSV_HEADER) {
        return Err(CliError::Config(format!("{}: unexpected header", path.display())));
    }
    let row = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: no data row", path.display())))?;
    let f: Vec<&str> = row.split(',').collect();
    let num = |i: usize| -> CliResult<f64> {
        f.get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::Config(format!("{}: bad field {i}", path.display())))
    };
    Ok(ScalingFit {
        t0: num(0)?,
        c1: num(1)?,
        c2: num(2)?,
        residual: num(3)?,
        n_samples: num(4)? as usize,
        window: (num(5)?, num(6)?),
    })
}

fn snapshot_at(kind: &str, params: &Params, grid: &SpatialGrid, t: f64) -> CliResult<Snapshot> {
    let reference = reference_solution(kind, params)?;
    let u = grid
        .nodes()
        .map(|x| reference.value(t, x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Snapshot::new(*grid, t, u)?)
}

fn overlay_file(kind: &str, t: f64) -> String {
    format!("{kind}_t{t}.csv")
}

fn write_overlays(dir: &Path, grid: &SpatialGrid, overlays: &[OverlaySpec]) -> CliResult<Vec<(String, f64)>> {
    let mut written = Vec::new();
    if overlays.is_empty() {
        return Ok(written);
    }
    let sub = dir.join("overlay");
    fs::create_dir_all(&sub)?;
    for o in overlays {
        for &t in &o.times {
            let name = overlay_file(&o.kind, t);
            write_snapshot_csv(&sub.join(&name), &snapshot_at(&o.kind, &o.params, grid, t)?)?;
            written.push((format!("overlay/{name}"), t));
        }
    }
    Ok(written)
}

/// Runs the solver and writes snapshots, the interface track, zero counts,
/// the summary and, when requested, the scaling-law fit and overlays.
pub fn simulate(manifest: &ExperimentManifest, root: &Path) -> CliResult<SimulateReport> {
    manifest.validate()?;
    let config = manifest.sim_config()?;
    let dir = manifest.run_dir(root);
    fs::create_dir_all(&dir).map_err(|e| {
        CliError::Config(format!("output directory {} is not writable: {e}", dir.display()))
    })?;

    let out = run_with(&config, &manifest.run_options())?;

    write_trajectory(&dir.join("snapshots"), &out.trajectory)?;
    let branches = match_tracks(&out.track, manifest.match_window(&config.grid));
    write_track_csv(&dir.join(TRACK_FILE), &branches)?;
    let counts = count_zeros(&out.track);
    write_xy_csv(
        &dir.join(ZERO_COUNT_FILE),
        ("t", "zero_count"),
        counts.iter().map(|&(t, n)| (t, n as f64)),
    )?;

    let selected = select_coalescing_branch(&branches);
    let mut fit = None;
    let mut fit_error = None;
    if let (Some(section), Some(b)) = (&manifest.fit, selected) {
        let opts = section.options(config.grid.h(), b.last_time(), config.time.tau())?;
        match fit_branches(&branches, &opts) {
            Ok((_, r)) => {
                write_fit(&dir, &r)?;
                fit = Some(r);
            }
            Err(e) => fit_error = Some(e.to_string()),
        }
    }

    let overlays = write_overlays(&dir, &config.grid, &manifest.overlays)?;

    let summary = SimulationSummary {
        name: manifest.name.clone(),
        t_end: config.time.t_end(),
        n_steps: config.time.n_steps(),
        initial_zero_count: counts.first().map_or(0, |c| c.1),
        final_zero_count: counts.last().map_or(0, |c| c.1),
        branches: branches.iter().map(BranchSummary::from).collect(),
        coalescing_branch: selected.map(|b| b.id),
        coalescence_time: selected.and_then(|b| b.end),
        fit: fit.as_ref().map(|f| f.fit),
        fit_error,
        warnings: out.warnings.clone(),
    };
    fs::write(dir.join(SUMMARY_FILE), serde_json::to_string_pretty(&summary)?)?;

    if manifest.run.plot {
        let snapshots = out
            .trajectory
            .steps()
            .iter()
            .zip(out.trajectory.snapshots())
            .map(|(&step, s)| (format!("snapshots/{}", coalesce_core::io::snapshot_file_name(step)), s.t()))
            .collect();
        let script = gnuplot_script(&PlotInputs {
            title: &manifest.name,
            snapshots,
            has_fit: fit.is_some(),
            overlays,
        });
        fs::write(dir.join("plot.gp"), script)?;
    }

    Ok(SimulateReport {
        dir,
        summary,
        branches,
        fit,
        output: out,
    })
}

/// Overrides accepted by `fit`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FitOverrides {
    pub t0_lo: Option<f64>,
    pub t0_hi: Option<f64>,
    pub t0_step: Option<f64>,
    pub window_floor: Option<f64>,
    pub cap_fraction: Option<f64>,
}

impl FitOverrides {
    /// Options for a branch ending at `t_last` with median spacing `tau`.
    pub fn options(&self, t_last: f64, tau: f64) -> CliResult<FitOptions> {
        Ok(FitOptions {
            window: WindowPolicy {
                floor: self.window_floor.unwrap_or(DEFAULT_WINDOW_FLOOR),
                cap_fraction: self.cap_fraction.unwrap_or(DEFAULT_CAP_FRACTION),
                ..WindowPolicy::default()
            },
            t0_grid: t0_grid(self.t0_lo, self.t0_hi, self.t0_step, t_last, tau)?,
            no_refine: false,
        })
    }
}

impl From<&FitSection> for FitOverrides {
    fn from(s: &FitSection) -> Self {
        Self {
            t0_lo: s.t0_lo,
            t0_hi: s.t0_hi,
            t0_step: s.t0_step,
            window_floor: s.window_floor,
            cap_fraction: s.cap_fraction,
        }
    }
}

fn median_spacing(t: &[f64]) -> f64 {
    let mut d: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    if d.is_empty() {
        return 0.0;
    }
    d.sort_by(f64::total_cmp);
    d[d.len() / 2]
}

#[derive(Clone, Debug)]
pub struct FitReport {
    pub branch: usize,
    pub result: FitResult,
    pub fit_path: PathBuf,
    pub residual_path: PathBuf,
}

/// Fits a track CSV. Results go next to the track unless `out` is given.
pub fn fit_track(track: &Path, overrides: &FitOverrides, out: Option<&Path>) -> CliResult<FitReport> {
    let branches = read_track_csv(track).map_err(|e| CliError::Config(e.to_string()))?;
    let b = select_coalescing_branch(&branches)
        .ok_or_else(|| CliError::Config(format!("{}: no interface samples", track.display())))?;
    let opts = overrides.options(b.last_time(), median_spacing(&b.t))?;
    let (branch, result) = fit_branches(&branches, &opts)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => track.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    if !dir.as_os_str().is_empty() {
        fs::create_dir_all(&dir)?;
    }
    let (fit_path, residual_path) = write_fit(&dir, &result)?;
    Ok(FitReport {
        branch,
        result,
        fit_path,
        residual_path,
    })
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub files: Vec<PathBuf>,
    /// Coalescence time, for reference solutions that have one.
    pub t0: Option<f64>,
}

/// Default sampling times of `oracle`.
pub fn default_oracle_times(kind: &str) -> Vec<f64> {
    match kind {
        "cole-hopf" => vec![0.0, 0.1, 0.205, 0.5],
        _ => vec![0.0],
    }
}

/// Samples a reference solution on `grid` at each time.
pub fn oracle(kind: &str, params: &Params, times: &[f64], grid: &SpatialGrid, dir: &Path) -> CliResult<OracleReport> {
    let reference = reference_solution(kind, params)?;
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0)) {
        return Err(CliError::Config(format!("sampling time {t} must be >= 0")));
    }
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for &t in times {
        let path = dir.join(overlay_file(kind, t));
        write_snapshot_csv(&path, &snapshot_at(kind, params, grid, t)?)?;
        files.push(path);
    }
    let t0 = reference.coalescence_time().transpose()?;
    if let Some(t0) = t0 {
        let path = dir.join("t0.csv");
        fs::write(&path, format!("t0\n{t0:.16e}\n"))?;
        files.push(path);
    }
    Ok(OracleReport { files, t0 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub class: DataClass,
    /// `(φ₋, φ₊)`.
    pub limits: (f64, f64),
    pub bound: ExtinctionBound,
}

/// Initial data on the whole line: odd half-line runs are mirrored.
pub fn full_line_initial(manifest: &ExperimentManifest) -> CliResult<Snapshot> {
    let grid = manifest.grid.build()?;
    let line = if manifest.bc_left() == LeftBoundary::Dirichlet0 {
        SpatialGrid::new(-grid.x_max(), grid.x_max(), 2 * grid.n_nodes() - 1)?
    } else {
        grid
    };
    let ic = manifest.initial.build()?;
    let u: Vec<f64> = line.nodes().map(|x| ic.value(x)).collect();
    Ok(Snapshot::new(line, 0.0, u)?)
}

/// Explicit upper bound on the time of the last coalescence.
pub fn bounds(manifest: &ExperimentManifest, root: &Path) -> CliResult<BoundsReport> {
    manifest.validate()?;
    let u0 = full_line_initial(manifest)?;
    let ic = manifest.initial.build()?;
    let values = u0.values();
    let (lm, lp) = ic
        .limits()
        .unwrap_or((values[0], values[values.len() - 1]));
    let (pm, pp) = (
        manifest.bounds.phi_minus.unwrap_or(lm),
        manifest.bounds.phi_plus.unwrap_or(lp),
    );
    let flux = manifest.flux.build()?;
    let same_sign = pm != 0.0 && pp != 0.0 && pm.signum() == pp.signum();
    let class = if same_sign {
        DataClass::ClassII
    } else {
        classify_initial_data(flux.as_ref(), &ShockData::new(pm, pp)?)?
    };
    let bound = match class {
        DataClass::ClassI => {
            let shock = ShockData::new(pm, pp)?;
            let eta = manifest.bounds.eta.unwrap_or_else(|| default_eta(&shock));
            extinction_bound_class_i(flux.as_ref(), &shock, &u0, eta)?
        }
        DataClass::ClassII => {
            // Negative data is handled through u -> -u, which leaves the
            // bound unchanged.
            let sign = pm.signum();
            let level = pm.abs().min(pp.abs());
            let flipped = Snapshot::new(*u0.grid(), 0.0, values.iter().map(|v| sign * v).collect())?;
            let c_gn = manifest.bounds.c_gn.unwrap_or_else(default_gn_constant);
            extinction_bound_class_ii(level, &flipped, c_gn)?
        }
        DataClass::ClassIII => {
            return Err(CliError::Config(
                "anti-shock (class III) data has no explicit extinction bound".into(),
            ))
        }
    };
    let report = BoundsReport {
        class,
        limits: (pm, pp),
        bound,
    };
    let dir = manifest.run_dir(root);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join(BOUNDS_FILE), serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}
