//! Crank–Nicolson predictor-corrector stepping of `u_t = u_xx + f(u)_x`.
//!
//! With `r = τ/h²` the diffusion is treated by the tridiagonal matrices
//! `A± = tridiag(∓r/2, 1 ± r, ∓r/2)` and the flux term by the vector
//! `b_k(u) = f(u_{k+1}) − f(u_{k−1})`:
//!
//! ```text
//! u*      = A₊⁻¹ (A₋ uᵐ + τ/(2h) · b(uᵐ))
//! uᵐ⁺¹    = A₊⁻¹ (A₋ uᵐ + τ/(4h) · (b(uᵐ) + b(u*)))
//! ```
//!
//! A Neumann boundary uses the ghost value `u_{N+1} = u_{N−1}`, which doubles
//! the off-diagonal entry of the boundary row. With a Dirichlet condition at
//! `x = 0` node 0 is not an unknown.

use std::sync::Arc;

use crate::config::{LeftBoundary, SimConfig};
use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::grid::SpatialGrid;
use crate::initial::InitialProfile;
use crate::interfaces::{zeros_of, InterfaceTrack};
use crate::snapshot::{build_snapshot, Snapshot, Trajectory};

/// Tridiagonal matrix stored by diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for len in [sub.len(), sup.len()] {
            if len != n - 1 {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    got: len,
                });
            }
        }
        Ok(Self { sub, diag, sup })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sub: vec![0.0; n.saturating_sub(1)],
            diag: vec![1.0; n],
            sup: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `|a_ii| > Σ_{j≠i} |a_ij|` on every row.
    pub fn is_strictly_diagonally_dominant(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let mut off = 0.0;
            if i > 0 {
                off += self.sub[i - 1].abs();
            }
            if i + 1 < n {
                off += self.sup[i].abs();
            }
            self.diag[i].abs() > off
        })
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.sup[i] * x[i + 1];
            }
            y[i] = v;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut y = vec![0.0; x.len()];
        self.mul_into(x, &mut y);
        Ok(y)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }

    /// Thomas algorithm without pivoting; `scratch` holds the modified
    /// super-diagonal.
    pub fn solve_into(&self, rhs: &[f64], x: &mut [f64], scratch: &mut [f64]) -> Result<()> {
        let n = self.len();
        let mut w = self.diag[0];
        if w == 0.0 {
            return Err(Error::SingularSystem(0));
        }
        x[0] = rhs[0] / w;
        for i in 1..n {
            scratch[i - 1] = self.sup[i - 1] / w;
            w = self.diag[i] - self.sub[i - 1] * scratch[i - 1];
            if w == 0.0 || !w.is_finite() {
                return Err(Error::SingularSystem(i));
            }
            x[i] = (rhs[i] - self.sub[i - 1] * x[i - 1]) / w;
        }
        for i in (0..n - 1).rev() {
            x[i] -= scratch[i] * x[i + 1];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(rhs.len())?;
        let n = self.len();
        let mut x = vec![0.0; n];
        let mut scratch = vec![0.0; n];
        self.solve_into(rhs, &mut x, &mut scratch)?;
        Ok(x)
    }
}

/// Free-standing alias of [`TridiagonalSystem::solve`].
pub fn thomas_solve(sys: &TridiagonalSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    sys.solve(rhs)
}

/// Number of unknowns and index of the first unknown node.
fn layout(grid: &SpatialGrid, bc: LeftBoundary) -> (usize, usize) {
    match bc {
        LeftBoundary::Dirichlet0 => (grid.n_nodes() - 1, 1),
        LeftBoundary::Neumann => (grid.n_nodes(), 0),
    }
}

/// `(A₊, A₋)` for the unknowns selected by `bc`.
pub fn assemble_matrices(
    grid: &SpatialGrid,
    tau: f64,
    bc: LeftBoundary,
) -> (TridiagonalSystem, TridiagonalSystem) {
    let (n, _) = layout(grid, bc);
    assemble_with_ratio(n, tau / (grid.h() * grid.h()), bc)
}

fn assemble_with_ratio(n: usize, r: f64, bc: LeftBoundary) -> (TridiagonalSystem, TridiagonalSystem) {
    let build = |sign: f64| {
        let mut sub = vec![-sign * r / 2.0; n - 1];
        let mut sup = vec![-sign * r / 2.0; n - 1];
        sub[n - 2] = -sign * r;
        if bc == LeftBoundary::Neumann {
            sup[0] = -sign * r;
        }
        TridiagonalSystem {
            sub,
            diag: vec![1.0 + sign * r; n],
            sup,
        }
    };
    (build(1.0), build(-1.0))
}

/// Flux-difference vector for the unknowns `u` (excluding a Dirichlet node).
/// First entry: `f(u₁) − f(0)` under Dirichlet, 0 under Neumann; last entry 0.
pub fn assemble_b(flux: &dyn Flux, u: &[f64], bc: LeftBoundary) -> Result<Vec<f64>> {
    let fu = u.iter().map(|&v| flux.value(v)).collect::<Result<Vec<_>>>()?;
    let mut b = vec![0.0; u.len()];
    fill_b(&fu, bc, flux.value(0.0)?, &mut b);
    Ok(b)
}

fn fill_b(fu: &[f64], bc: LeftBoundary, f_zero: f64, b: &mut [f64]) {
    let n = fu.len();
    b[0] = match bc {
        LeftBoundary::Dirichlet0 => fu[1] - f_zero,
        LeftBoundary::Neumann => 0.0,
    };
    for k in 1..n - 1 {
        b[k] = fu[k + 1] - fu[k - 1];
    }
    b[n - 1] = 0.0;
}

/// One-run stepping state: matrices and work arrays.
#[derive(Debug)]
pub struct Stepper {
    flux: Arc<dyn Flux>,
    bc: LeftBoundary,
    offset: usize,
    a_plus: TridiagonalSystem,
    a_minus: TridiagonalSystem,
    half: f64,
    quarter: f64,
    f_zero: f64,
    fu: Vec<f64>,
    b_current: Vec<f64>,
    b_predicted: Vec<f64>,
    base: Vec<f64>,
    rhs: Vec<f64>,
    u_star: Vec<f64>,
    scratch: Vec<f64>,
}

impl Stepper {
    pub fn new(flux: Arc<dyn Flux>, grid: &SpatialGrid, tau: f64, bc: LeftBoundary) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::param("tau", "must be > 0"));
        }
        let (n, offset) = layout(grid, bc);
        let (a_plus, a_minus) = assemble_matrices(grid, tau, bc);
        let f_zero = flux.value(0.0)?;
        Ok(Self {
            flux,
            bc,
            offset,
            a_plus,
            a_minus,
            half: tau / (2.0 * grid.h()),
            quarter: tau / (4.0 * grid.h()),
            f_zero,
            fu: vec![0.0; n],
            b_current: vec![0.0; n],
            b_predicted: vec![0.0; n],
            base: vec![0.0; n],
            rhs: vec![0.0; n],
            u_star: vec![0.0; n],
            scratch: vec![0.0; n],
        })
    }

    pub fn matrices(&self) -> (&TridiagonalSystem, &TridiagonalSystem) {
        (&self.a_plus, &self.a_minus)
    }

    fn flux_vector(&mut self, u: &[f64], predicted: bool) -> Result<()> {
        for (f, &v) in self.fu.iter_mut().zip(u) {
            *f = self.flux.value(v)?;
        }
        let b = if predicted {
            &mut self.b_predicted
        } else {
            &mut self.b_current
        };
        fill_b(&self.fu, self.bc, self.f_zero, b);
        Ok(())
    }

    /// Advances the full nodal vector `u` by one step in place.
    pub fn advance(&mut self, u: &mut [f64]) -> Result<()> {
        let off = self.offset;
        let n = self.base.len();
        if u.len() != n + off {
            return Err(Error::DimensionMismatch {
                expected: n + off,
                got: u.len(),
            });
        }
        let unknowns = &mut u[off..];

        self.a_minus.mul_into(unknowns, &mut self.base);
        self.flux_vector(unknowns, false)?;
        for k in 0..n {
            self.rhs[k] = self.base[k] + self.half * self.b_current[k];
        }
        self.a_plus
            .solve_into(&self.rhs, &mut self.u_star, &mut self.scratch)?;

        let u_star = std::mem::take(&mut self.u_star);
        let r = self.flux_vector(&u_star, true);
        self.u_star = u_star;
        r?;
        for k in 0..n {
            self.rhs[k] = self.base[k] + self.quarter * (self.b_current[k] + self.b_predicted[k]);
        }
        self.a_plus.solve_into(&self.rhs, unknowns, &mut self.scratch)?;
        if off == 1 {
            u[0] = 0.0;
        }
        Ok(())
    }

    /// Returns the state one step after `u`.
    pub fn step(&mut self, u: &[f64]) -> Result<Vec<f64>> {
        let mut next = u.to_vec();
        self.advance(&mut next)?;
        Ok(next)
    }
}

/// What to do when the zero count increases between steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OscillationPolicy {
    /// Record a warning and continue.
    #[default]
    Warn,
    /// Abort the run with [`Error::Oscillation`].
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    /// Nodes with `|u| ≤ zero_threshold` count as exact zeros.
    pub zero_threshold: f64,
    /// Abort when `max|u|` exceeds this multiple of `max(1, max|u₀|)`.
    pub blowup_factor: f64,
    pub oscillation: OscillationPolicy,
    /// Warn when a boundary value drifts this far from its initial value.
    pub boundary_tolerance: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            zero_threshold: 0.0,
            blowup_factor: 1e3,
            oscillation: OscillationPolicy::Warn,
            boundary_tolerance: 0.05,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub track: InterfaceTrack,
    /// Final state, also stored as the last snapshot.
    pub last: Snapshot,
    pub warnings: Vec<String>,
}

/// Samples the initial condition of `config`, pinning a Dirichlet node to 0.
pub fn initial_snapshot(config: &SimConfig, ic: &dyn InitialProfile) -> Result<Snapshot> {
    let mut snap = build_snapshot(&config.grid, 0.0, |x| ic.value(x))?;
    if config.bc_left == LeftBoundary::Dirichlet0 {
        let mut u = snap.into_values();
        u[0] = 0.0;
        snap = Snapshot::new(config.grid, 0.0, u)?;
    }
    Ok(snap)
}

pub fn run(config: &SimConfig) -> Result<RunOutput> {
    run_with(config, &RunOptions::default())
}

pub fn run_with(config: &SimConfig, opts: &RunOptions) -> Result<RunOutput> {
    config.validate()?;
    let flux = config.flux.build()?;
    let ic = config.ic.build()?;
    let grid = config.grid;
    let time = config.time;
    let first_node = match config.bc_left {
        LeftBoundary::Dirichlet0 => 1,
        LeftBoundary::Neumann => 0,
    };

    let initial = initial_snapshot(config, ic.as_ref())?;
    let mut u = initial.values().to_vec();
    let n = u.len();
    let scale = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let (left0, right0) = (u[0], u[n - 1]);

    let mut stepper = Stepper::new(flux, &grid, time.tau(), config.bc_left)?;
    let mut trajectory = Trajectory::new(config.clone());
    let mut track = InterfaceTrack::new();
    let mut warnings = Vec::new();
    let mut boundary_warned = false;
    let mut sturm_warned = false;

    trajectory.push(0, initial)?;
    track.push(zeros_of(&grid, &u, 0.0, opts.zero_threshold, first_node))?;
    let mut last_count = track.samples()[0].len();

    for m in 1..=time.n_steps() {
        let t = time.t(m);
        stepper.advance(&mut u).map_err(|e| match e {
            Error::SingularSystem(_) | Error::OutOfRange { .. } => Error::BlowUp {
                step: m,
                t,
                reason: e.to_string(),
            },
            e => e,
        })?;
        if let Some(k) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: m,
                t,
                reason: format!("non-finite value at node {k}"),
            });
        }
        let peak = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if peak > opts.blowup_factor * scale {
            return Err(Error::BlowUp {
                step: m,
                t,
                reason: format!("max |u| = {peak:e} exceeds {} x initial scale", opts.blowup_factor),
            });
        }

        let zeros = zeros_of(&grid, &u, t, opts.zero_threshold, first_node);
        if zeros.len() > last_count {
            let reason = format!(
                "zero count rose from {last_count} to {}; reduce tau",
                zeros.len()
            );
            match opts.oscillation {
                OscillationPolicy::Fail => {
                    return Err(Error::Oscillation { step: m, t, reason });
                }
                OscillationPolicy::Warn if !sturm_warned => {
                    warnings.push(format!("spurious oscillation at step {m} (t = {t}): {reason}"));
                    sturm_warned = true;
                }
                OscillationPolicy::Warn => {}
            }
        }
        last_count = zeros.len();
        track.push(zeros)?;

        if !boundary_warned {
            let drift_right = (u[n - 1] - right0).abs();
            let drift_left = if first_node == 0 { (u[0] - left0).abs() } else { 0.0 };
            if drift_right.max(drift_left) > opts.boundary_tolerance {
                warnings.push(format!(
                    "boundary contamination: boundary value moved by {:.3e} by t = {t}; enlarge the domain",
                    drift_right.max(drift_left)
                ));
                boundary_warned = true;
            }
        }

        if m % config.snapshot_stride == 0 || m == time.n_steps() {
            trajectory.push(m, Snapshot::new(grid, t, u.clone())?)?;
        }
    }

    let last = trajectory
        .last()
        .cloned()
        .expect("the initial snapshot is always stored");
    Ok(RunOutput {
        trajectory,
        track,
        last,
        warnings,
    })
}

/// `∫(u − level)` by the trapezoid rule over the grid.
pub fn discrete_mass(u: &[f64], h: f64, level: f64) -> f64 {
    trapezoid(u.iter().map(|&v| v - level), h)
}

/// `∫(u − level)²` by the trapezoid rule over the grid.
pub fn discrete_energy(u: &[f64], h: f64, level: f64) -> f64 {
    trapezoid(u.iter().map(|&v| (v - level) * (v - level)), h)
}

fn trapezoid(values: impl ExactSizeIterator<Item = f64>, h: f64) -> f64 {
    let n = values.len();
    let mut sum = 0.0;
    for (k, v) in values.enumerate() {
        sum += if k == 0 || k + 1 == n { 0.5 * v } else { v };
    }
    sum * h
}
