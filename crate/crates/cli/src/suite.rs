//! Verification suites. Every check compares against something computed
//! independently here: dense elimination, series and continued-fraction
//! error functions, direct quadrature of the Green's function, exact
//! synthetic bifurcation data.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use coalesce_core::analysis::{
    check_gagliardo, default_gn_constant, fit_scaling_law, predict_bifurcation,
    BifurcationKind, FitOptions, LocalDerivatives, WindowPolicy,
};
use coalesce_core::interfaces::{sturm_check, Sturm};
use coalesce_core::oracles::cole_hopf::ColeHopf;
use coalesce_core::oracles::green::{green_f_limit, GreenReference};
use coalesce_core::quadrature::integrate;
use coalesce_core::solver::{discrete_energy, discrete_mass, run, thomas_solve, TridiagonalSystem};
use coalesce_core::special::erfc;
use coalesce_core::{
    FluxSpec, InitialConditionSpec, LeftBoundary, SimConfig, Snapshot, SpatialGrid, TimeGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::commands::{bounds, fit_track, simulate, FitOverrides, SimulateReport, TRACK_FILE};
use crate::presets::{preset, PRESET_NAMES};
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Invariants,
    PaperRepro,
    Bounds,
    Oracles,
    All,
}

impl Suite {
    fn includes(self, group: Suite) -> bool {
        self == Suite::All || self == group
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub group: Suite,
    pub passed: bool,
    pub detail: String,
    /// Wall time; printed but kept out of the report file.
    #[serde(skip)]
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: Suite,
    pub passed: bool,
    pub results: Vec<CriterionResult>,
}

struct Check {
    passed: bool,
    detail: String,
}

type CheckFn = fn(&mut Context) -> CliResult<Check>;

struct Criterion {
    id: u8,
    name: &'static str,
    group: Suite,
    check: CheckFn,
}

const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, name: "shock alpha=1 scaling fit", group: Suite::PaperRepro, check: shock_a1 },
    Criterion { id: 2, name: "shock alpha=4 scaling fit", group: Suite::PaperRepro, check: shock_a4 },
    Criterion { id: 3, name: "anti-shock alpha=1 scaling fit", group: Suite::PaperRepro, check: anti_a1 },
    Criterion { id: 4, name: "anti-shock alpha=4 scaling fit", group: Suite::PaperRepro, check: anti_a4 },
    Criterion { id: 5, name: "Cole-Hopf coalescence time", group: Suite::PaperRepro, check: cole_hopf_t0 },
    Criterion { id: 6, name: "solver against Cole-Hopf solution", group: Suite::Oracles, check: solver_vs_cole_hopf },
    Criterion { id: 7, name: "pitchfork law on the Cole-Hopf branch", group: Suite::PaperRepro, check: pitchfork_law },
    Criterion { id: 8, name: "fold law recovery", group: Suite::Oracles, check: fold_law },
    Criterion { id: 9, name: "solution invariants", group: Suite::Invariants, check: invariants },
    Criterion { id: 10, name: "class-I bound dominates coalescence", group: Suite::Bounds, check: bound_dominance },
    Criterion { id: 11, name: "numerical kernels against oracles", group: Suite::Oracles, check: kernel_oracles },
    Criterion { id: 12, name: "Gagliardo-Nirenberg inequality", group: Suite::Bounds, check: gagliardo },
];

/// Shared state: preset runs are done once and reused by later criteria.
pub struct Context {
    root: PathBuf,
    runs: BTreeMap<String, (SimulateReport, f64)>,
}

impl Context {
    pub fn new(root: &Path) -> Self {
        Self {
            root: root.to_path_buf(),
            runs: BTreeMap::new(),
        }
    }

    /// Runs a preset (once) and returns the report and its wall time.
    fn preset_run(&mut self, name: &str) -> CliResult<&(SimulateReport, f64)> {
        if !self.runs.contains_key(name) {
            let m = preset(name).ok_or_else(|| CliError::Config(format!("no preset `{name}`")))?;
            let start = Instant::now();
            let report = simulate(&m, &self.root)?;
            self.runs
                .insert(name.to_string(), (report, start.elapsed().as_secs_f64()));
        }
        Ok(&self.runs[name])
    }
}

/// Runs the criteria of `suite` in order, calling `on_result` after each.
pub fn run_suite(suite: Suite, root: &Path, mut on_result: impl FnMut(&CriterionResult)) -> Report {
    let mut ctx = Context::new(root);
    let mut results = Vec::new();
    for c in CRITERIA.iter().filter(|c| suite.includes(c.group)) {
        let start = Instant::now();
        let (passed, detail) = match (c.check)(&mut ctx) {
            Ok(check) => (check.passed, check.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let r = CriterionResult {
            id: c.id,
            name: c.name.to_string(),
            group: c.group,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        };
        on_result(&r);
        results.push(r);
    }
    Report {
        suite,
        passed: results.iter().all(|r| r.passed),
        results,
    }
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo && v <= hi
}

// ---------------------------------------------------------------------------
// Preset scaling fits

fn preset_fit(
    ctx: &mut Context,
    name: &str,
    t0_range: (f64, f64),
    c1_range: (f64, f64),
    max_seconds: Option<f64>,
) -> CliResult<Check> {
    let (report, run_seconds) = ctx.preset_run(name)?;
    let track = report.dir.join(TRACK_FILE);
    let start = Instant::now();
    let fit = fit_track(&track, &FitOverrides::default(), None)?.result.fit;
    let seconds = run_seconds + start.elapsed().as_secs_f64();
    let ok_t0 = within(fit.t0, t0_range.0, t0_range.1);
    let ok_c1 = within(fit.c1, c1_range.0, c1_range.1);
    let ok_time = max_seconds.is_none_or(|m| seconds <= m);
    let mut detail = format!(
        "t0 = {:.6} in [{}, {}], c1 = {:.4} in [{}, {}], {} samples",
        fit.t0, t0_range.0, t0_range.1, fit.c1, c1_range.0, c1_range.1, fit.n_samples
    );
    if let Some(m) = max_seconds {
        let _ = write!(detail, ", runtime limit {m} s{}", if ok_time { "" } else { " exceeded" });
    }
    Ok(Check {
        passed: ok_t0 && ok_c1 && ok_time,
        detail,
    })
}

fn shock_a1(ctx: &mut Context) -> CliResult<Check> {
    preset_fit(ctx, "shock-a1", (0.249, 0.259), (0.46, 0.56), Some(60.0))
}

fn shock_a4(ctx: &mut Context) -> CliResult<Check> {
    preset_fit(ctx, "shock-a4", (1.36, 1.41), (0.46, 0.56), Some(300.0))
}

fn anti_a1(ctx: &mut Context) -> CliResult<Check> {
    preset_fit(ctx, "anti-a1", (0.322, 0.335), (0.43, 0.54), None)
}

fn anti_a4(ctx: &mut Context) -> CliResult<Check> {
    preset_fit(ctx, "anti-a4", (1.42, 1.47), (0.43, 0.54), None)
}

// ---------------------------------------------------------------------------
// Cole–Hopf coalescence time

fn cole_hopf_t0(_: &mut Context) -> CliResult<Check> {
    let start = Instant::now();
    let t0 = ColeHopf::figure().t0()?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(Check {
        passed: (t0 - 0.205).abs() <= 0.002 && seconds <= 10.0,
        detail: format!("t0 = {t0:.10}, target 0.205 +- 0.002, runtime limit 10 s"),
    })
}

// ---------------------------------------------------------------------------
// Solver against the Cole–Hopf solution

const CH_TAU: f64 = 0.0005;
const CH_T: f64 = 0.1;

fn cole_hopf_run(tau: f64) -> CliResult<Snapshot> {
    let time = TimeGrid::with_step(CH_T, tau)?;
    let cfg = SimConfig {
        flux: FluxSpec::quadratic(),
        grid: SpatialGrid::with_spacing(-10.0, 10.0, 0.01)?,
        time,
        ic: InitialConditionSpec::cole_hopf_chi0(),
        bc_left: LeftBoundary::Neumann,
        snapshot_stride: time.n_steps(),
    };
    Ok(run(&cfg)?.last)
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn solver_vs_cole_hopf(_: &mut Context) -> CliResult<Check> {
    let exact = ColeHopf::figure();
    let coarse = cole_hopf_run(CH_TAU)?;
    let half = cole_hopf_run(CH_TAU / 2.0)?;
    let fine = cole_hopf_run(CH_TAU / 64.0)?;
    let reference: Vec<f64> = coarse
        .grid()
        .nodes()
        .map(|x| exact.u(CH_T, x))
        .collect::<Result<_, _>>()?;

    let err = sup_diff(coarse.values(), &reference);
    let err_half = sup_diff(half.values(), &reference);
    // The total error is dominated by the O(h²) spatial part, which does not
    // change with τ. The temporal part is measured against a run on the same
    // grid with a 64× smaller step.
    let temporal = sup_diff(coarse.values(), fine.values());
    let temporal_half = sup_diff(half.values(), fine.values());
    let ratio = temporal / temporal_half;
    Ok(Check {
        passed: err <= 5e-3 && ratio >= 3.5,
        detail: format!(
            "sup error {err:.3e} (limit 5e-3); temporal error {temporal:.3e} -> {temporal_half:.3e} \
             when tau is halved, ratio {ratio:.3} (limit 3.5); error against the exact solution \
             {err:.3e} -> {err_half:.3e}"
        ),
    })
}

// ---------------------------------------------------------------------------
// Pitchfork law

fn pitchfork_law(_: &mut Context) -> CliResult<Check> {
    let ch = ColeHopf::figure();
    let t0 = ch.t0()?;
    let (a, b, n) = (t0 - 0.05, t0 - 0.002, 200);
    let mut t = Vec::with_capacity(n);
    let mut xi = Vec::with_capacity(n);
    for k in 0..n {
        let tk = a + (b - a) * k as f64 / (n - 1) as f64;
        if let Some(z) = ch.positive_zero(tk)? {
            t.push(tk);
            xi.push(z);
        }
    }
    let opts = FitOptions {
        window: WindowPolicy {
            floor: 0.0,
            from_last_maximum: false,
            cap_fraction: 1.0,
            t_min: None,
            t_max: None,
        },
        ..FitOptions::default()
    };
    let fit = fit_scaling_law(&t, &xi, &opts)?.fit;
    let prefactor = fit.c2.exp();
    let rel = prefactor / 6f64.sqrt() - 1.0;
    Ok(Check {
        passed: (fit.c1 - 0.5).abs() <= 0.03 && rel.abs() <= 0.1,
        detail: format!(
            "power {:.4} (0.50 +- 0.03), prefactor {prefactor:.4} vs sqrt 6 = {:.4} ({:+.1}%, limit 10%), fitted t0 {:.6} vs {t0:.6}",
            fit.c1,
            6f64.sqrt(),
            100.0 * rel,
            fit.t0
        ),
    })
}

// ---------------------------------------------------------------------------
// Fold law

fn fold_law(_: &mut Context) -> CliResult<Check> {
    // u(t, x) = (t − t₀) + (x − ξ₀)²/2 solves u_t = u_xx; its zeros are
    // ξ₀ ± √(2(t₀ − t)).
    let (t0, xi0, dt) = (0.3705, 1.0, 0.001);
    let t: Vec<f64> = (0..)
        .map(|k| k as f64 * dt)
        .take_while(|&t| t < t0)
        .collect();
    let right: Vec<f64> = t.iter().map(|&t| xi0 + (2.0 * (t0 - t)).sqrt()).collect();

    let law = predict_bifurcation(BifurcationKind::Fold, t0, xi0, LocalDerivatives::default())?;
    let law_gap = t
        .iter()
        .zip(&right)
        .map(|(&t, &r)| Ok((law.positions(t)?[0] - r).abs()))
        .collect::<CliResult<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);

    let offset: Vec<f64> = right.iter().map(|r| r - xi0).collect();
    let opts = FitOptions {
        window: WindowPolicy {
            cap_fraction: 1.0,
            ..WindowPolicy::default()
        },
        ..FitOptions::default()
    };
    let fit = fit_scaling_law(&t, &offset, &opts)?.fit;
    Ok(Check {
        passed: (fit.c1 - 0.5).abs() <= 0.002 && (fit.t0 - t0).abs() <= dt && law_gap <= 1e-12,
        detail: format!(
            "power {:.5} (0.500 +- 0.002), t0 {:.6} vs {t0} (grid step {dt}), prefactor {:.5} vs sqrt 2, predicted branch off by {law_gap:.1e}",
            fit.c1,
            fit.t0,
            fit.c2.exp()
        ),
    })
}

// ---------------------------------------------------------------------------
// Invariants

const COMPARISON_SLACK: f64 = 1e-8;

fn comparison_excess(snaps: &[Snapshot], lo: f64, hi: f64) -> f64 {
    snaps
        .iter()
        .map(|s| (lo - s.min()).max(s.max() - hi).max(0.0))
        .fold(0.0, f64::max)
}

fn full_line_odd(ic: InitialConditionSpec, t_end: f64) -> CliResult<Vec<Snapshot>> {
    let cfg = SimConfig {
        flux: FluxSpec::regularized_modular(1e-16),
        grid: SpatialGrid::with_spacing(-5.0, 5.0, 0.01)?,
        time: TimeGrid::with_step(t_end, 0.0005)?,
        ic,
        bc_left: LeftBoundary::Neumann,
        snapshot_stride: 10,
    };
    Ok(run(&cfg)?.trajectory.snapshots().to_vec())
}

struct ClassTwo {
    mass_rate: f64,
    energy_rise: f64,
    excess: f64,
}

fn class_two_run(flux: FluxSpec) -> CliResult<ClassTwo> {
    let level = 1.0;
    let cfg = SimConfig {
        flux,
        grid: SpatialGrid::with_spacing(-30.0, 30.0, 0.01)?,
        time: TimeGrid::with_step(2.0, 0.0005)?,
        ic: InitialConditionSpec::dip(level, 1.5, 1.0),
        bc_left: LeftBoundary::Neumann,
        snapshot_stride: 20,
    };
    let out = run(&cfg)?;
    let snaps = out.trajectory.snapshots();
    let h = cfg.grid.h();
    let m0 = discrete_mass(snaps[0].values(), h, level);
    let mut mass_rate = 0.0f64;
    let mut energy_rise = 0.0f64;
    let mut prev = discrete_energy(snaps[0].values(), h, level);
    for s in &snaps[1..] {
        mass_rate = mass_rate.max((discrete_mass(s.values(), h, level) - m0).abs() / s.t());
        let e = discrete_energy(s.values(), h, level);
        energy_rise = energy_rise.max(e - prev);
        prev = e;
    }
    Ok(ClassTwo {
        mass_rate,
        energy_rise,
        excess: comparison_excess(snaps, snaps[0].min() - COMPARISON_SLACK, snaps[0].max() + COMPARISON_SLACK),
    })
}

fn invariants(ctx: &mut Context) -> CliResult<Check> {
    let mut failures = Vec::new();
    let mut detail = String::new();

    for name in PRESET_NAMES {
        let (report, _) = ctx.preset_run(name)?;
        if let Sturm::Violation { t_before, t_after } = sturm_check(&report.output.track) {
            failures.push(format!("{name}: zero count rose between t = {t_before} and {t_after}"));
        }
        let snaps = report.output.trajectory.snapshots();
        let excess = comparison_excess(snaps, snaps[0].min() - COMPARISON_SLACK, snaps[0].max() + COMPARISON_SLACK);
        if excess > 0.0 {
            failures.push(format!("{name}: leaves [min u0, max u0] by {excess:.2e}"));
        }
    }
    let _ = write!(detail, "Sturm and comparison hold on {} presets", PRESET_NAMES.len());

    for (label, ic, t_end) in [
        ("shock", InitialConditionSpec::shock_alpha(1.0), 0.3),
        ("anti-shock", InitialConditionSpec::antishock_alpha(1.0), 0.4),
    ] {
        let snaps = full_line_odd(ic, t_end)?;
        let defect = snaps.iter().map(Snapshot::odd_defect).fold(0.0, f64::max);
        let excess = comparison_excess(&snaps, snaps[0].min() - COMPARISON_SLACK, snaps[0].max() + COMPARISON_SLACK);
        let _ = write!(detail, "; full-line {label} odd defect {defect:.1e}");
        if defect > 1e-10 {
            failures.push(format!("full-line {label}: odd defect {defect:.2e} > 1e-10"));
        }
        if excess > 0.0 {
            failures.push(format!("full-line {label}: leaves [min u0, max u0] by {excess:.2e}"));
        }
    }

    for (label, flux) in [
        ("modular", FluxSpec::regularized_modular(1e-16)),
        ("quadratic", FluxSpec::quadratic()),
    ] {
        let r = class_two_run(flux)?;
        let _ = write!(
            detail,
            "; {label} dip mass drift {:.1e}/unit time, max energy rise {:.1e}",
            r.mass_rate, r.energy_rise
        );
        if r.mass_rate > 1e-8 {
            failures.push(format!("{label} dip: mass drift {:.2e} per unit time", r.mass_rate));
        }
        if r.energy_rise > 0.0 {
            failures.push(format!("{label} dip: energy rose by {:.2e}", r.energy_rise));
        }
        if r.excess > 0.0 {
            failures.push(format!("{label} dip: leaves [min u0, max u0] by {:.2e}", r.excess));
        }
    }

    if !failures.is_empty() {
        detail = failures.join("; ");
    }
    Ok(Check {
        passed: failures.is_empty(),
        detail,
    })
}

// ---------------------------------------------------------------------------
// Bound dominance

fn bound_dominance(ctx: &mut Context) -> CliResult<Check> {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in ["shock-a1", "shock-a4"] {
        let observed = ctx.preset_run(name)?.0.summary.coalescence_time;
        let m = preset(name).expect("known preset");
        let bound = bounds(&m, &ctx.root)?.bound.t;
        match observed {
            Some(t) => {
                passed &= t <= bound;
                parts.push(format!("{name}: coalescence {t:.5} <= bound {bound:.4}"));
            }
            None => {
                passed = false;
                parts.push(format!("{name}: no coalescence observed (bound {bound:.4})"));
            }
        }
    }
    Ok(Check {
        passed,
        detail: parts.join("; "),
    })
}

// ---------------------------------------------------------------------------
// Numerical kernels

/// Gaussian elimination with partial pivoting on the full matrix.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty");
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            let m = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn thomas_against_dense() -> CliResult<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.gen_range(3..60);
        let sub: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sup: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let off = if i > 0 { sub[i - 1].abs() } else { 0.0 }
                    + if i + 1 < n { sup[i].abs() } else { 0.0 };
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                sign * (off + rng.gen_range(0.1..2.0))
            })
            .collect();
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            dense[i][i] = diag[i];
            if i > 0 {
                dense[i][i - 1] = sub[i - 1];
            }
            if i + 1 < n {
                dense[i][i + 1] = sup[i];
            }
        }
        let expected = dense_solve(dense, rhs.clone());
        let got = thomas_solve(&TridiagonalSystem::new(sub, diag, sup)?, &rhs)?;
        let scale = expected.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(sup_diff(&got, &expected) / scale);
    }
    Ok(worst)
}

/// `erfc` from the Maclaurin-type series `erf x = 2x/√π e^{−x²} Σ (2x²)ⁿ/(2n+1)!!`
/// for `|x| ≤ 3` and Laplace's continued fraction beyond.
fn erfc_oracle(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_oracle(-x);
    }
    if x <= 3.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut n = 0.0;
        while term > 1e-18 * sum {
            term *= 2.0 * x * x / (2.0 * n + 3.0);
            sum += term;
            n += 1.0;
        }
        return 1.0 - 2.0 * x / PI.sqrt() * (-x * x).exp() * sum;
    }
    let mut f = x;
    for k in (1..=300).rev() {
        f = x + 0.5 * k as f64 / f;
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

fn green_kernel(t: f64, x: f64, y: f64) -> f64 {
    let a = x - y - t;
    let b = x + y - t;
    ((-a * a / (4.0 * t)).exp() - (-y - b * b / (4.0 * t)).exp()) / (4.0 * PI * t).sqrt()
}

/// `∫₀^∞ G(t, x, y)(e^{−y} − 1) dy` by adaptive Gauss–Legendre on pieces.
fn green_quadrature(t: f64, x: f64) -> f64 {
    let f = |y: f64| green_kernel(t, x, y) * (-y).exp_m1();
    let mut edges = vec![0.0, (x - 2.0).max(0.0), x + t, x + 4.0, 12.0 * t.sqrt() + 2.0 * t + 40.0];
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], 1e-14, 8, 1 << 14).value)
        .sum()
}

fn kernel_oracles(_: &mut Context) -> CliResult<Check> {
    let thomas = thomas_against_dense()?;

    let erfc_err = (0..=2000)
        .map(|k| -10.0 + 0.01 * k as f64)
        .map(|x| (erfc(x) - erfc_oracle(x)).abs())
        .fold(0.0, f64::max);

    let reference = GreenReference::new(1.0, 0.0)?;
    let mut green_err = 0.0f64;
    for t in [0.05, 0.2, 0.5, 1.0, 3.0] {
        for x in [0.1, 0.7, 1.5, 4.0] {
            green_err = green_err.max((reference.u(t, x)? - green_quadrature(t, x)).abs());
        }
    }

    let limit_exact = [-1.0, 0.0, 0.25, 0.5, 1.0, 1.5, 3.0]
        .iter()
        .all(|&x1| green_f_limit(x1) == 1.5 - x1 && reference.f_limit(x1) == 1.5 - x1);

    Ok(Check {
        passed: thomas <= 1e-12 && erfc_err <= 1e-13 && green_err <= 1e-8 && limit_exact,
        detail: format!(
            "Thomas vs dense {thomas:.1e} relative (1e-12); erfc vs series {erfc_err:.1e} (1e-13); \
             Green closed form vs quadrature {green_err:.1e} at 20 points (1e-8); F limit {}",
            if limit_exact { "exact" } else { "inexact" }
        ),
    })
}

// ---------------------------------------------------------------------------
// Gagliardo–Nirenberg

fn gagliardo(_: &mut Context) -> CliResult<Check> {
    let c = default_gn_constant();
    let x: Vec<f64> = (0..=4000).map(|k| -20.0 + 0.01 * k as f64).collect();
    let mut profiles: Vec<(String, Vec<f64>)> = vec![
        ("gaussian".into(), x.iter().map(|v| (-v * v).exp()).collect()),
        ("triangle".into(), x.iter().map(|v| (1.0 - v.abs()).max(0.0)).collect()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..100 {
        let bumps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..5))
            .map(|_| (rng.gen_range(-8.0..8.0), rng.gen_range(0.2..3.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let g = x
            .iter()
            .map(|&v| {
                bumps
                    .iter()
                    .map(|&(c, w, a)| a * (-((v - c) / w).powi(2)).exp())
                    .sum()
            })
            .collect();
        profiles.push((format!("bump {i}"), g));
    }
    let mut failed = Vec::new();
    let mut tightest = f64::INFINITY;
    for (name, g) in &profiles {
        let r = check_gagliardo(&x, g, c)?;
        tightest = tightest.min(r.bound / r.sup);
        if !r.holds {
            failed.push(name.clone());
        }
    }
    Ok(Check {
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!(
                "holds with C = 2^(2/3) on {} profiles, smallest bound/sup {tightest:.3}",
                profiles.len()
            )
        } else {
            format!("fails on {}", failed.join(", "))
        },
    })
}
