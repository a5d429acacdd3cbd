//! CSV and directory formats.
//!
//! * `x,value` sample files (tabulated fluxes, sampled initial data).
//! * Snapshot CSV: header `x,u`, one row per node.
//! * Trajectory directory: `snap_{step:06}.csv` per stored snapshot plus
//!   `trajectory.json` holding the config and the list of entries.
//! * Track CSV: long format `t,branch_id,xi`.
//!
//! Numbers are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::interfaces::Branch;
use crate::snapshot::{Snapshot, SnapshotEntry, Trajectory};

pub const TRAJECTORY_MANIFEST: &str = "trajectory.json";

fn parse_error(path: &Path, line: u64, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path)?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file))
}

/// Reads numeric columns of a CSV with a header row. Errors carry the
/// 1-based file line.
fn read_columns(path: &Path, expected: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = open_csv(path)?;
    let headers = reader
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    if headers.len() != expected.len() {
        return Err(parse_error(
            path,
            1,
            format!("expected header `{}`, got `{}`", expected.join(","), headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut cols = vec![Vec::new(); expected.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != expected.len() {
            return Err(parse_error(path, line, format!("expected {} fields", expected.len())));
        }
        for (i, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_error(path, line, format!("`{field}` is not a number")))?;
            cols[i].push(v);
        }
    }
    Ok(cols)
}

/// Reads an `x,value` sample file.
pub fn read_xy_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut cols = read_columns(path, &["x", "value"])?;
    let value = cols.pop().unwrap_or_default();
    let x = cols.pop().unwrap_or_default();
    if x.is_empty() {
        return Err(parse_error(path, 1, "no samples"));
    }
    Ok((x, value))
}

pub fn write_xy_csv(path: &Path, header: (&str, &str), rows: impl IntoIterator<Item = (f64, f64)>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{},{}", header.0, header.1)?;
    for (a, b) in rows {
        writeln!(w, "{a:.16e},{b:.16e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_snapshot_csv(path: &Path, snap: &Snapshot) -> Result<()> {
    write_xy_csv(path, ("x", "u"), snap.points())
}

/// Reads a snapshot CSV written by [`write_snapshot_csv`]. The grid is
/// recovered from the first and last abscissae and the row count, and every
/// stored abscissa must coincide with the recovered node.
pub fn read_snapshot_csv(path: &Path, t: f64) -> Result<Snapshot> {
    let cols = read_columns(path, &["x", "u"])?;
    let (x, u) = (&cols[0], &cols[1]);
    if x.len() < 3 {
        return Err(parse_error(path, 1, "need at least three nodes"));
    }
    let grid = SpatialGrid::new(x[0], x[x.len() - 1], x.len())
        .map_err(|e| parse_error(path, 2, e.to_string()))?;
    for (k, &xk) in x.iter().enumerate() {
        if xk != grid.x(k) {
            return Err(parse_error(
                path,
                k as u64 + 2,
                format!("x = {xk} is not node {k} of a uniform grid"),
            ));
        }
    }
    Snapshot::new(grid, t, u.clone()).map_err(|e| parse_error(path, 0, e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct TrajectoryManifest {
    config: SimConfig,
    snapshots: Vec<SnapshotEntry>,
}

pub fn snapshot_file_name(step: usize) -> String {
    format!("snap_{step:06}.csv")
}

/// Writes every stored snapshot and the manifest into `dir`.
pub fn write_trajectory(dir: &Path, traj: &Trajectory) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    let mut written = Vec::new();
    for (&step, snap) in traj.steps().iter().zip(traj.snapshots()) {
        let file = snapshot_file_name(step);
        let path = dir.join(&file);
        write_snapshot_csv(&path, snap)?;
        written.push(path);
        entries.push(SnapshotEntry {
            step,
            t: snap.t(),
            file,
        });
    }
    let manifest = TrajectoryManifest {
        config: traj.config().clone(),
        snapshots: entries,
    };
    let path = dir.join(TRAJECTORY_MANIFEST);
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    written.push(path);
    Ok(written)
}

pub fn read_trajectory(dir: &Path) -> Result<Trajectory> {
    let text = fs::read_to_string(dir.join(TRAJECTORY_MANIFEST))?;
    let manifest: TrajectoryManifest = serde_json::from_str(&text)?;
    let mut traj = Trajectory::new(manifest.config);
    for entry in manifest.snapshots {
        let snap = read_snapshot_csv(&dir.join(&entry.file), entry.t)?;
        traj.push(entry.step, snap)?;
    }
    Ok(traj)
}

pub fn write_track_csv(path: &Path, branches: &[Branch]) -> Result<()> {
    let mut rows: Vec<(f64, usize, f64)> = branches
        .iter()
        .flat_map(|b| b.samples().map(move |(t, xi)| (t, b.id, xi)))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,branch_id,xi")?;
    for (t, id, xi) in rows {
        writeln!(w, "{t:.16e},{id},{xi:.16e}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a track CSV back into branches. A branch whose last sample precedes
/// the last time in the file is marked as ended at the midpoint to the next
/// recorded time.
pub fn read_track_csv(path: &Path) -> Result<Vec<Branch>> {
    let cols = read_columns(path, &["t", "branch_id", "xi"])?;
    let mut by_id: BTreeMap<usize, Branch> = BTreeMap::new();
    for (row, ((&t, &id), &xi)) in cols[0].iter().zip(&cols[1]).zip(&cols[2]).enumerate() {
        if id < 0.0 || id.fract() != 0.0 {
            return Err(parse_error(path, row as u64 + 2, format!("bad branch id {id}")));
        }
        let b = by_id.entry(id as usize).or_insert_with(|| Branch {
            id: id as usize,
            t: Vec::new(),
            xi: Vec::new(),
            end: None,
        });
        if b.t.last().is_some_and(|&last| t <= last) {
            return Err(parse_error(path, row as u64 + 2, "branch times must increase"));
        }
        b.t.push(t);
        b.xi.push(xi);
    }
    let mut times = cols[0].clone();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut branches: Vec<Branch> = by_id.into_values().collect();
    for b in &mut branches {
        let last = b.last_time();
        let next = times.partition_point(|&t| t <= last);
        if next < times.len() {
            b.end = Some(0.5 * (last + times[next]));
        }
    }
    Ok(branches)
}
