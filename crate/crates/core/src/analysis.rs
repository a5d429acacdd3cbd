//! Post-processing of interface tracks: the power-law fit
//! `log ξ = c₁ log(t₀ − t) + c₂` with a grid search over `t₀`, local
//! bifurcation laws near a coalescence point, and explicit upper bounds on
//! the time after which the zero set of `u` is a single point (shocks) or
//! empty (positive data).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::Flux;
use crate::shock::{rankine_hugoniot_speed, ShockData};
use crate::snapshot::Snapshot;

// ---------------------------------------------------------------------------
// Scaling-law fit

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub t0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Sum of squared residuals of `log ξ`.
    pub residual: f64,
    /// `(t_first, t_last)` of the samples used.
    pub window: (f64, f64),
    pub n_samples: usize,
}

impl ScalingFit {
    /// `ξ(t) = e^{c₂}(t₀ − t)^{c₁}`.
    pub fn predict(&self, t: f64) -> f64 {
        self.c2.exp() * (self.t0 - t).powf(self.c1)
    }

    pub const CSV_HEADER: &'static str = "t0,c1,c2,residual,n_samples,window_lo,window_hi";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e}",
            self.t0, self.c1, self.c2, self.residual, self.n_samples, self.window.0, self.window.1
        )
    }
}

pub const DEFAULT_CAP_FRACTION: f64 = 0.3;

/// Which samples of `ξ(t)` enter the regression.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowPolicy {
    /// Samples with `ξ` below this are dropped (spatial-resolution floor).
    pub floor: f64,
    /// Drop everything before the start of the final monotone decrease.
    pub from_last_maximum: bool,
    /// Keep only samples with `ξ ≤ cap_fraction · ξ_max`, where `ξ_max` is
    /// the last local maximum (or the first sample). The power law is an
    /// asymptotic statement as `t → t₀⁻`; samples far from it bias `c₁` low.
    pub cap_fraction: f64,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            floor: 0.0,
            from_last_maximum: true,
            cap_fraction: DEFAULT_CAP_FRACTION,
            t_min: None,
            t_max: None,
        }
    }
}

impl WindowPolicy {
    /// Floor at five grid spacings.
    pub fn for_spacing(h: f64) -> Self {
        Self {
            floor: 5.0 * h,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct T0Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl T0Grid {
    /// `t_last + τ/10 ..= t_last + 200τ` in steps of `τ/10`.
    pub fn around(t_last: f64, tau: f64) -> Self {
        Self {
            lo: t_last + tau / 10.0,
            hi: t_last + 200.0 * tau,
            step: tau / 10.0,
        }
    }

    fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub window: WindowPolicy,
    /// `None` uses [`T0Grid::around`] with the median sample spacing.
    pub t0_grid: Option<T0Grid>,
    /// Skip the second, 10× finer pass around the coarse optimum.
    pub no_refine: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub fit: ScalingFit,
    pub grid: T0Grid,
    /// `(t₀, residual)` for every candidate on the coarse grid.
    pub curve: Vec<(f64, f64)>,
}

/// Indices of the samples kept by `policy`.
pub fn fit_window(t: &[f64], xi: &[f64], policy: &WindowPolicy) -> Vec<usize> {
    let mut start = 0;
    if policy.from_last_maximum && !xi.is_empty() {
        start = xi.len() - 1;
        while start > 0 && xi[start - 1] >= xi[start] {
            start -= 1;
        }
    }
    let cap = xi.get(start).map_or(f64::INFINITY, |&m| policy.cap_fraction * m);
    (start..t.len())
        .filter(|&k| xi[k] >= policy.floor && xi[k] <= cap)
        .filter(|&k| policy.t_min.map_or(true, |lo| t[k] >= lo))
        .filter(|&k| policy.t_max.map_or(true, |hi| t[k] <= hi))
        .collect()
}

struct LogSamples {
    t: Vec<f64>,
    y: Vec<f64>,
}

impl LogSamples {
    /// Least squares of `y` on `log(t₀ − t)`: `(c₁, c₂, residual)`.
    fn regress(&self, t0: f64) -> (f64, f64, f64) {
        let n = self.t.len() as f64;
        let x: Vec<f64> = self.t.iter().map(|&t| (t0 - t).ln()).collect();
        let mx = x.iter().sum::<f64>() / n;
        let my = self.y.iter().sum::<f64>() / n;
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for (xi, yi) in x.iter().zip(&self.y) {
            sxx += (xi - mx) * (xi - mx);
            sxy += (xi - mx) * (yi - my);
        }
        let c1 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let c2 = my - c1 * mx;
        let residual = x
            .iter()
            .zip(&self.y)
            .map(|(xi, yi)| (yi - c1 * xi - c2).powi(2))
            .sum();
        (c1, c2, residual)
    }

    fn scan(&self, grid: &T0Grid) -> Vec<(f64, f64, f64, f64)> {
        grid.points()
            .into_iter()
            .map(|t0| {
                let (c1, c2, r) = self.regress(t0);
                (t0, c1, c2, r)
            })
            .collect()
    }
}

fn best(scan: &[(f64, f64, f64, f64)]) -> (f64, f64, f64, f64) {
    // strict `<` keeps the smaller t₀ on ties
    scan.iter()
        .copied()
        .fold((f64::NAN, 0.0, 0.0, f64::INFINITY), |acc, c| {
            if c.3 < acc.3 {
                c
            } else {
                acc
            }
        })
}

fn median_spacing(t: &[f64]) -> f64 {
    let mut d: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    d.sort_by(f64::total_cmp);
    d[d.len() / 2]
}

/// Fits `log ξ = c₁ log(t₀ − t) + c₂`, choosing `t₀` on a grid by minimal
/// residual.
pub fn fit_scaling_law(t: &[f64], xi: &[f64], opts: &FitOptions) -> Result<FitResult> {
    if t.len() != xi.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            got: xi.len(),
        });
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("t", "sample times must be strictly increasing"));
    }
    let keep = fit_window(t, xi, &opts.window);
    if keep.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} samples in the fit window, need at least 5",
            keep.len()
        )));
    }
    if let Some(&k) = keep.iter().find(|&&k| !(xi[k] > 0.0)) {
        return Err(Error::Domain(format!(
            "log of non-positive interface position {} at t = {}",
            xi[k], t[k]
        )));
    }
    let samples = LogSamples {
        t: keep.iter().map(|&k| t[k]).collect(),
        y: keep.iter().map(|&k| xi[k].ln()).collect(),
    };
    let t_first = samples.t[0];
    let t_last = *samples.t.last().unwrap();
    let grid = match opts.t0_grid {
        Some(g) => g,
        None => T0Grid::around(t_last, median_spacing(&samples.t)),
    };
    if !(grid.lo > t_last) || !(grid.hi >= grid.lo) || !(grid.step > 0.0) {
        return Err(Error::param(
            "t0_grid",
            format!(
                "need t_last = {t_last} < lo <= hi and step > 0, got {:?}",
                grid
            ),
        ));
    }

    let coarse = samples.scan(&grid);
    let mut top = best(&coarse);
    if !opts.no_refine {
        let fine = T0Grid {
            lo: (top.0 - grid.step).max(grid.lo),
            hi: (top.0 + grid.step).min(grid.hi),
            step: grid.step / 10.0,
        };
        let refined = best(&samples.scan(&fine));
        if refined.3 < top.3 {
            top = refined;
        }
    }
    let (t0, c1, c2, residual) = top;
    Ok(FitResult {
        fit: ScalingFit {
            t0,
            c1,
            c2,
            residual,
            window: (t_first, t_last),
            n_samples: samples.t.len(),
        },
        grid,
        curve: coarse.iter().map(|c| (c.0, c.3)).collect(),
    })
}

// ---------------------------------------------------------------------------
// Local bifurcation laws

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BifurcationKind {
    /// Two roots merge and disappear.
    Fold,
    /// Three roots merge into one.
    Pitchfork,
}

/// `ξ − ξ₀ = sign · prefactor · (t₀ − t)^power`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchLaw {
    pub prefactor: f64,
    pub power: f64,
    pub sign: f64,
}

impl BranchLaw {
    pub fn offset(&self, t0: f64, t: f64) -> f64 {
        let s = t0 - t;
        if self.power == 1.0 {
            self.sign * self.prefactor * s
        } else {
            self.sign * self.prefactor * s.abs().powf(self.power)
        }
    }
}

/// Derivatives of `u` at `(t₀, ξ₀)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LocalDerivatives {
    pub u_xx: Option<f64>,
    pub u_xxx: Option<f64>,
    pub u_tt: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPrediction {
    pub kind: BifurcationKind,
    pub t0: f64,
    pub xi0: f64,
    /// Outer branches first; for a pitchfork the third entry is the branch
    /// that continues past `t₀` (prefactor `α_mid`, or 0 when unknown).
    pub branches: Vec<BranchLaw>,
    pub alpha_mid: Option<f64>,
    pub derivatives: LocalDerivatives,
}

pub fn predict_bifurcation(
    kind: BifurcationKind,
    t0: f64,
    xi0: f64,
    derivatives: LocalDerivatives,
) -> Result<BifurcationPrediction> {
    if !(t0.is_finite() && xi0.is_finite()) {
        return Err(Error::param("t0", "coalescence point must be finite"));
    }
    let outer = |c: f64| {
        [1.0, -1.0].map(|sign| BranchLaw {
            prefactor: c,
            power: 0.5,
            sign,
        })
    };
    let (branches, alpha_mid) = match kind {
        BifurcationKind::Fold => (outer(2f64.sqrt()).to_vec(), None),
        BifurcationKind::Pitchfork => {
            let alpha = match (derivatives.u_tt, derivatives.u_xxx) {
                (Some(utt), Some(uxxx)) if uxxx != 0.0 => Some(utt / (2.0 * uxxx)),
                (Some(_), Some(_)) => {
                    return Err(Error::param("u_xxx", "must be nonzero at a pitchfork"))
                }
                _ => None,
            };
            let mut b = outer(6f64.sqrt()).to_vec();
            b.push(BranchLaw {
                prefactor: alpha.unwrap_or(0.0),
                power: 1.0,
                sign: 1.0,
            });
            (b, alpha)
        }
    };
    Ok(BifurcationPrediction {
        kind,
        t0,
        xi0,
        branches,
        alpha_mid,
        derivatives,
    })
}

impl BifurcationPrediction {
    fn before(&self, t: f64) -> Result<()> {
        if t > self.t0 {
            return Err(Error::Domain(format!(
                "outer branches do not exist for t = {t} > t0 = {}",
                self.t0
            )));
        }
        Ok(())
    }

    /// `ξ − ξ₀` on every branch at time `t ≤ t₀`.
    pub fn offsets(&self, t: f64) -> Result<Vec<f64>> {
        self.before(t)?;
        Ok(self.branches.iter().map(|b| b.offset(self.t0, t)).collect())
    }

    /// Positions `ξ` on every branch at time `t ≤ t₀`.
    pub fn positions(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.offsets(t)?.into_iter().map(|d| self.xi0 + d).collect())
    }

    /// `ξ − ξ₀` on the continuing pitchfork branch; defined on both sides
    /// of `t₀`.
    pub fn middle_offset(&self, t: f64) -> Option<f64> {
        self.alpha_mid.map(|a| a * (self.t0 - t))
    }

    /// Leading-order `u_x` along each branch, in the order of `branches`.
    /// Entries are `None` where the needed derivative was not supplied.
    pub fn slopes(&self, t: f64) -> Result<Vec<Option<f64>>> {
        self.before(t)?;
        let s = self.t0 - t;
        let d = &self.derivatives;
        Ok(match self.kind {
            BifurcationKind::Fold => [1.0, -1.0]
                .iter()
                .map(|sign| d.u_xx.map(|v| sign * (2.0 * s).sqrt() * v))
                .collect(),
            BifurcationKind::Pitchfork => {
                let outer = d.u_xxx.map(|v| 2.0 * v * s);
                vec![outer, outer, d.u_xxx.map(|v| -v * s)]
            }
        })
    }

    /// Leading-order `u_xx` along each pitchfork branch; `None` for folds.
    pub fn curvatures(&self, t: f64) -> Result<Option<Vec<Option<f64>>>> {
        self.before(t)?;
        if self.kind == BifurcationKind::Fold {
            return Ok(None);
        }
        let s = self.t0 - t;
        let d = &self.derivatives;
        Ok(Some(vec![
            d.u_xxx.map(|v| v * (6.0 * s).sqrt()),
            d.u_xxx.map(|v| -v * (6.0 * s).sqrt()),
            d.u_tt.map(|v| -0.5 * v * s),
        ]))
    }
}

// ---------------------------------------------------------------------------
// Extinction-time bounds

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    ClassI,
    ClassII,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundInputs {
    ClassI {
        /// Drift `c` added to the flux so that `f(φ₊) = f(φ₋)`.
        drift: f64,
        eta: f64,
        /// Largest root of `u₀ − φ₊ + η`.
        xi_plus: f64,
        /// Smallest root of `u₀ − φ₋ − η`.
        xi_minus: f64,
        /// `∫_{x_min}^{ξ₊} (u₀ − φ₋)`.
        mass_left: f64,
        /// `∫_{ξ₋}^{x_max} (φ₊ − u₀)`.
        mass_right: f64,
        /// `f(φ₊) − f(0)` after the drift shift.
        flux_gap: f64,
        /// Whether `φ_min ≤ u₀ ≤ φ_max` holds at every node.
        within_limits: bool,
    },
    ClassII {
        phi_minus: f64,
        c_gn: f64,
        /// `‖u₁‖₁`.
        l1: f64,
        /// `‖u₁‖₂²`.
        l2_squared: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionBound {
    pub kind: BoundKind,
    #[serde(rename = "T")]
    pub t: f64,
    pub inputs: BoundInputs,
}

/// Default Gagliardo–Nirenberg constant `2^{2/3}`.
pub fn default_gn_constant() -> f64 {
    4f64.cbrt()
}

/// Default margin `η = min|φ±|/4`.
pub fn default_eta(shock: &ShockData) -> f64 {
    0.25 * shock.phi_minus.abs().min(shock.phi_plus.abs())
}

/// Trapezoid rule on nodal values.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Trapezoid integral of the piecewise-linear interpolant over `[a, b]`.
fn trapezoid_between(x: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    let lerp = |k: usize, s: f64| {
        let w = (s - x[k]) / (x[k + 1] - x[k]);
        y[k] + w * (y[k + 1] - y[k])
    };
    let mut total = 0.0;
    for k in 0..x.len() - 1 {
        let lo = x[k].max(a);
        let hi = x[k + 1].min(b);
        if hi > lo {
            total += 0.5 * (hi - lo) * (lerp(k, lo) + lerp(k, hi));
        }
    }
    total
}

fn crossing(x: &[f64], g: &[f64], k: usize) -> f64 {
    if g[k] == 0.0 {
        return x[k];
    }
    x[k] + (x[k + 1] - x[k]) * g[k] / (g[k] - g[k + 1])
}

/// Largest `x` where the interpolant of `g` vanishes.
fn largest_root(x: &[f64], g: &[f64]) -> Option<f64> {
    if g.last() == Some(&0.0) {
        return x.last().copied();
    }
    (0..g.len() - 1)
        .rev()
        .find(|&k| g[k] == 0.0 || (g[k] < 0.0) != (g[k + 1] < 0.0) && g[k + 1] != 0.0)
        .map(|k| crossing(x, g, k))
}

/// Smallest `x` where the interpolant of `g` vanishes.
fn smallest_root(x: &[f64], g: &[f64]) -> Option<f64> {
    (0..g.len() - 1)
        .find(|&k| g[k] == 0.0 || g[k + 1] == 0.0 || (g[k] < 0.0) != (g[k + 1] < 0.0))
        .map(|k| if g[k] == 0.0 { x[k] } else { crossing(x, g, k) })
}

/// Upper bound on the time after which a shock has a single interface.
/// The flux is shifted by the Rankine–Hugoniot drift first, so that the
/// shock is stationary.
pub fn extinction_bound_class_i(
    flux: &dyn Flux,
    shock: &ShockData,
    u0: &Snapshot,
    eta: f64,
) -> Result<ExtinctionBound> {
    let (pm, pp) = (shock.phi_minus, shock.phi_plus);
    if !(pm < 0.0 && pp > 0.0) {
        return Err(Error::NotAShock(format!(
            "need phi_minus < 0 < phi_plus, got {pm} and {pp}"
        )));
    }
    if !(eta > 0.0 && eta < pm.abs().min(pp)) {
        return Err(Error::param(
            "eta",
            format!("must lie in (0, {}), got {eta}", pm.abs().min(pp)),
        ));
    }
    let drift = rankine_hugoniot_speed(flux, shock)?;
    let flux_gap = flux.value(pp)? + drift * pp - flux.value(0.0)?;
    if !(flux_gap > 0.0) {
        return Err(Error::EntropyViolation(format!(
            "f(phi_plus) - f(0) = {flux_gap} after the drift shift"
        )));
    }

    let x: Vec<f64> = u0.grid().nodes().collect();
    let u = u0.values();
    let g_plus: Vec<f64> = u.iter().map(|v| v - pp + eta).collect();
    let g_minus: Vec<f64> = u.iter().map(|v| v - pm - eta).collect();
    let too_small = |what: &str| {
        Error::Domain(format!(
            "{what} not found on [{}, {}]; domain too small",
            u0.grid().x_min(),
            u0.grid().x_max()
        ))
    };
    let xi_plus = largest_root(&x, &g_plus).ok_or_else(|| too_small("root of u0 - phi_plus + eta"))?;
    let xi_minus =
        smallest_root(&x, &g_minus).ok_or_else(|| too_small("root of u0 - phi_minus - eta"))?;

    let above: Vec<f64> = u.iter().map(|v| v - pm).collect();
    let below: Vec<f64> = u.iter().map(|v| pp - v).collect();
    let mass_left = trapezoid_between(&x, &above, x[0], xi_plus);
    let mass_right = trapezoid_between(&x, &below, xi_minus, *x.last().unwrap());
    let within_limits = u
        .iter()
        .all(|&v| v >= shock.phi_min() && v <= shock.phi_max());

    Ok(ExtinctionBound {
        kind: BoundKind::ClassI,
        t: mass_left.max(mass_right) / flux_gap,
        inputs: BoundInputs::ClassI {
            drift,
            eta,
            xi_plus,
            xi_minus,
            mass_left,
            mass_right,
            flux_gap,
            within_limits,
        },
    })
}

/// `u₁ = min(⅔φ₋, u₀) − ⅔φ₋`.
pub fn deficit(phi_minus: f64, u0: &[f64]) -> Vec<f64> {
    let k = 2.0 * phi_minus / 3.0;
    u0.iter().map(|&v| v.min(k) - k).collect()
}

/// Upper bound on the time after which positive data has no zeros:
/// `T = 2φ₋³ / (9C³ ‖u₁‖₂² ‖u₁‖₁)`.
pub fn extinction_bound_class_ii(
    phi_minus: f64,
    u0: &Snapshot,
    c_gn: f64,
) -> Result<ExtinctionBound> {
    if !(phi_minus > 0.0) {
        return Err(Error::param("phi_minus", format!("must be > 0, got {phi_minus}")));
    }
    if !(c_gn > 0.0) {
        return Err(Error::param("c_gn", format!("must be > 0, got {c_gn}")));
    }
    let x: Vec<f64> = u0.grid().nodes().collect();
    let u1 = deficit(phi_minus, u0.values());
    let l1 = trapezoid(&x, &u1.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let l2_squared = trapezoid(&x, &u1.iter().map(|v| v * v).collect::<Vec<_>>());
    if !(l1 > 0.0 && l2_squared > 0.0) {
        return Err(Error::NoDeficit(format!(
            "u0 never drops below 2/3 phi_minus = {}",
            2.0 * phi_minus / 3.0
        )));
    }
    let t = 2.0 * phi_minus.powi(3) / (9.0 * c_gn.powi(3) * l2_squared * l1);
    Ok(ExtinctionBound {
        kind: BoundKind::ClassII,
        t,
        inputs: BoundInputs::ClassII {
            phi_minus,
            c_gn,
            l1,
            l2_squared,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GagliardoCheck {
    /// `‖g‖∞`.
    pub sup: f64,
    /// `C ‖g′‖₂^{2/3} ‖g‖₁^{1/3}`.
    pub bound: f64,
    pub holds: bool,
}

/// Evaluates `‖g‖∞ ≤ C ‖g′‖₂^{2/3} ‖g‖₁^{1/3}` with trapezoid norms and a
/// central-difference derivative.
pub fn check_gagliardo(x: &[f64], g: &[f64], c_gn: f64) -> Result<GagliardoCheck> {
    if x.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: g.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData("need at least 3 samples".into()));
    }
    let dg: Vec<f64> = (0..n)
        .map(|k| {
            let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
            (g[b] - g[a]) / (x[b] - x[a])
        })
        .collect();
    let sup = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let l1 = trapezoid(x, &g.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let d2 = trapezoid(x, &dg.iter().map(|v| v * v).collect::<Vec<_>>());
    let bound = c_gn * d2.cbrt() * l1.cbrt();
    Ok(GagliardoCheck {
        sup,
        bound,
        holds: sup <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{Modular, Tabulated};
    use crate::grid::SpatialGrid;
    use crate::snapshot::build_snapshot;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn whole_branch() -> FitOptions {
        let mut opts = FitOptions::default();
        opts.window.cap_fraction = 1.0;
        opts
    }

    fn sample(t0: f64, a: f64, p: f64, n: usize, t_end: f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
        let xi = t.iter().map(|&t| a * (t0 - t).powf(p)).collect();
        (t, xi)
    }

    #[test]
    fn fits_square_root_law() {
        let (t, xi) = sample(0.5, 2f64.sqrt(), 0.5, 200, 0.49);
        let r = fit_scaling_law(&t, &xi, &FitOptions::default()).unwrap();
        assert!((r.fit.c1 - 0.5).abs() < 2e-3, "{:?}", r.fit);
        assert!((r.fit.t0 - 0.5).abs() < 5e-4, "{:?}", r.fit);
        assert!(r.fit.t0 > r.fit.window.1);
        assert!(r.fit.n_samples >= 5 && r.fit.n_samples < 200);
    }

    #[test]
    fn fits_linear_law() {
        let (t, xi) = sample(0.3, 1.0, 1.0, 200, 0.29);
        let r = fit_scaling_law(&t, &xi, &FitOptions::default()).unwrap();
        assert!((r.fit.c1 - 1.0).abs() < 2e-3, "{:?}", r.fit);
    }

    #[test]
    fn window_starts_at_last_maximum() {
        let t: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let xi = [1.0, 2.0, 3.0, 2.0, 2.5, 2.4, 2.0, 1.5, 0.9, 0.2];
        let all = WindowPolicy {
            cap_fraction: 1.0,
            ..WindowPolicy::default()
        };
        assert_eq!(fit_window(&t, &xi, &all), vec![4, 5, 6, 7, 8, 9]);
        let floored = WindowPolicy { floor: 1.0, ..all };
        assert_eq!(fit_window(&t, &xi, &floored), vec![4, 5, 6, 7]);
        // cap 0.3 · 2.5 = 0.75
        assert_eq!(fit_window(&t, &xi, &WindowPolicy::default()), vec![9]);
    }

    #[test]
    fn too_few_samples() {
        let t = [0.0, 0.1, 0.2, 0.3];
        let xi = [0.4, 0.3, 0.2, 0.1];
        assert!(matches!(
            fit_scaling_law(&t, &xi, &FitOptions::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn non_positive_samples_rejected() {
        let t = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
        let xi = [0.5, 0.4, 0.3, 0.2, 0.1, 0.0];
        let mut opts = FitOptions::default();
        opts.window.cap_fraction = 1.0;
        assert!(matches!(
            fit_scaling_law(&t, &xi, &opts),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn grid_must_start_after_last_sample() {
        let (t, xi) = sample(0.5, 1.0, 0.5, 50, 0.4);
        let opts = FitOptions {
            t0_grid: Some(T0Grid {
                lo: 0.3,
                hi: 0.6,
                step: 0.001,
            }),
            ..FitOptions::default()
        };
        assert!(fit_scaling_law(&t, &xi, &opts).is_err());
    }

    #[test]
    fn ties_pick_smaller_t0() {
        let scan = [(1.0, 0.0, 0.0, 2.0), (2.0, 0.0, 0.0, 1.0), (3.0, 0.0, 0.0, 1.0)];
        assert_eq!(best(&scan).0, 2.0);
    }

    #[test]
    fn csv_row_has_seven_fields() {
        let (t, xi) = sample(0.5, 1.0, 0.5, 50, 0.45);
        let r = fit_scaling_law(&t, &xi, &whole_branch()).unwrap();
        assert_eq!(r.fit.csv_row().split(',').count(), 7);
        assert_eq!(ScalingFit::CSV_HEADER.split(',').count(), 7);
    }

    #[test]
    fn fold_offsets() {
        let p = predict_bifurcation(BifurcationKind::Fold, 1.0, 0.3, LocalDerivatives::default())
            .unwrap();
        let d = p.offsets(0.98).unwrap();
        assert!((d[0] - 0.2).abs() < 1e-12 && (d[1] + 0.2).abs() < 1e-12);
        assert_eq!(p.branches.len(), 2);
        assert!(p.offsets(1.01).is_err());
    }

    #[test]
    fn pitchfork_offsets() {
        let derivs = LocalDerivatives {
            u_xx: None,
            u_xxx: Some(2.0),
            u_tt: Some(3.0),
        };
        let p = predict_bifurcation(BifurcationKind::Pitchfork, 1.0, 0.0, derivs).unwrap();
        let d = p.offsets(1.0 - 1.0 / 6.0).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12 && (d[1] + 1.0).abs() < 1e-12);
        assert_eq!(p.alpha_mid, Some(0.75));
        assert!((d[2] - 0.75 / 6.0).abs() < 1e-12);
        assert!((p.middle_offset(1.1).unwrap() + 0.075).abs() < 1e-12);
        let slopes = p.slopes(0.9).unwrap();
        assert!((slopes[0].unwrap() - 0.4).abs() < 1e-12);
        assert!((slopes[2].unwrap() + 0.2).abs() < 1e-12);
        let curv = p.curvatures(0.9).unwrap().unwrap();
        assert!((curv[0].unwrap() - 2.0 * 0.6f64.sqrt()).abs() < 1e-12);
        assert!((curv[2].unwrap() + 0.15).abs() < 1e-12);
    }

    #[test]
    fn pitchfork_without_derivatives_has_no_alpha() {
        let p = predict_bifurcation(
            BifurcationKind::Pitchfork,
            1.0,
            0.0,
            LocalDerivatives::default(),
        )
        .unwrap();
        assert_eq!(p.alpha_mid, None);
        assert_eq!(p.branches.len(), 3);
        assert_eq!(p.branches[2].power, 1.0);
        assert_eq!(p.slopes(0.5).unwrap(), vec![None, None, None]);
    }

    #[test]
    fn pitchfork_to_fold_ratio() {
        let f = predict_bifurcation(BifurcationKind::Fold, 0.0, 0.0, LocalDerivatives::default())
            .unwrap();
        let p = predict_bifurcation(
            BifurcationKind::Pitchfork,
            0.0,
            0.0,
            LocalDerivatives::default(),
        )
        .unwrap();
        let r = p.offsets(-0.37).unwrap()[0] / f.offsets(-0.37).unwrap()[0];
        assert!((r - 3f64.sqrt()).abs() < 1e-12);
    }

    fn tanh_snapshot(shift: f64) -> Snapshot {
        let grid = SpatialGrid::new(-20.0 + shift, 20.0 + shift, 8001).unwrap();
        build_snapshot(&grid, 0.0, |x| (x - shift).tanh()).unwrap()
    }

    #[test]
    fn class_i_bound_for_tanh() {
        let shock = ShockData::new(-1.0, 1.0).unwrap();
        let b = extinction_bound_class_i(&Modular, &shock, &tanh_snapshot(0.0), 0.5).unwrap();
        let BoundInputs::ClassI {
            drift,
            xi_plus,
            xi_minus,
            mass_left,
            mass_right,
            flux_gap,
            within_limits,
            ..
        } = b.inputs
        else {
            panic!("wrong inputs");
        };
        assert_eq!(drift, 0.0);
        assert_eq!(flux_gap, 1.0);
        assert!(within_limits);
        let root = 0.5f64.atanh();
        assert!((xi_plus - root).abs() < 1e-4);
        assert!((xi_minus + root).abs() < 1e-4);
        // ∫_{−∞}^{ξ} (tanh + 1) = ln(2 cosh ξ) + ξ
        let exact = (2.0 * root.cosh()).ln() + root;
        assert!((exact - 4f64.ln()).abs() < 1e-12);
        assert!((mass_left - exact).abs() < 1e-4, "{mass_left}");
        assert!((mass_left - mass_right).abs() < 1e-9);
        assert!((b.t - exact).abs() < 1e-4);
    }

    #[test]
    fn class_i_bound_flags_overshoot() {
        let shock = ShockData::new(-1.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-20.0, 20.0, 4001).unwrap();
        let u0 = build_snapshot(&grid, 0.0, |x| 1.2 * x.tanh()).unwrap();
        let b = extinction_bound_class_i(&Modular, &shock, &u0, 0.5).unwrap();
        assert!(matches!(
            b.inputs,
            BoundInputs::ClassI {
                within_limits: false,
                ..
            }
        ));
    }

    #[test]
    fn class_i_bound_domain_too_small() {
        let shock = ShockData::new(-1.0, 1.0).unwrap();
        let grid = SpatialGrid::new(-0.2, 0.2, 41).unwrap();
        let u0 = build_snapshot(&grid, 0.0, f64::tanh).unwrap();
        assert!(matches!(
            extinction_bound_class_i(&Modular, &shock, &u0, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn class_i_bound_rejects_bad_eta() {
        let shock = ShockData::new(-1.0, 1.0).unwrap();
        assert!(extinction_bound_class_i(&Modular, &shock, &tanh_snapshot(0.0), 1.0).is_err());
        assert!(extinction_bound_class_i(&Modular, &shock, &tanh_snapshot(0.0), 0.0).is_err());
    }

    #[test]
    fn class_i_entropy_violation() {
        // f = −|u|: c = 0 and f(φ₊) − f(0) = −1
        let flux = Tabulated::new(vec![-2.0, 0.0, 2.0], vec![-2.0, 0.0, -2.0]).unwrap();
        let shock = ShockData::new(-1.0, 1.0).unwrap();
        assert!(matches!(
            extinction_bound_class_i(&flux, &shock, &tanh_snapshot(0.0), 0.5),
            Err(Error::EntropyViolation(_))
        ));
    }

    #[test]
    fn class_ii_triangle_dip() {
        // u₀ = ⅔φ₋|x| on [−1, 1], φ₋ elsewhere: u₁ = ⅔φ₋(|x| − 1) there.
        // ‖u₁‖₁ = a, ‖u₁‖₂² = 2a²/3 with a = ⅔φ₋, so T = 9/(8C³).
        let phi = 1.7;
        let grid = SpatialGrid::new(-5.0, 5.0, 10001).unwrap();
        let u0 = build_snapshot(&grid, 0.0, |x| {
            if x.abs() <= 1.0 {
                2.0 * phi / 3.0 * x.abs()
            } else {
                phi
            }
        })
        .unwrap();
        let c = default_gn_constant();
        let b = extinction_bound_class_ii(phi, &u0, c).unwrap();
        let BoundInputs::ClassII { l1, l2_squared, .. } = b.inputs else {
            panic!()
        };
        let a = 2.0 * phi / 3.0;
        assert!((l1 - a).abs() < 1e-6);
        assert!((l2_squared - 2.0 * a * a / 3.0).abs() < 1e-5);
        assert!((b.t - 9.0 / 32.0).abs() < 1e-5, "{}", b.t);
    }

    #[test]
    fn class_ii_doubling_divides_by_eight() {
        let phi = 3.0;
        let grid = SpatialGrid::new(-5.0, 5.0, 2001).unwrap();
        let dip = |x: f64| -0.5 * (-x * x).exp();
        let k = 2.0;
        let u0 = build_snapshot(&grid, 0.0, |x| k + dip(x)).unwrap();
        let u0b = build_snapshot(&grid, 0.0, |x| k + 2.0 * dip(x)).unwrap();
        let t1 = extinction_bound_class_ii(phi, &u0, 1.5).unwrap().t;
        let t2 = extinction_bound_class_ii(phi, &u0b, 1.5).unwrap().t;
        assert!((t1 / t2 - 8.0).abs() < 1e-9);
    }

    #[test]
    fn class_ii_no_deficit() {
        let grid = SpatialGrid::new(-5.0, 5.0, 101).unwrap();
        let u0 = build_snapshot(&grid, 0.0, |_| 1.0).unwrap();
        assert!(matches!(
            extinction_bound_class_ii(1.0, &u0, 1.5),
            Err(Error::NoDeficit(_))
        ));
    }

    fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn gagliardo_gaussian() {
        let x = nodes(-10.0, 10.0, 20001);
        let g: Vec<f64> = x.iter().map(|x| (-x * x).exp()).collect();
        let c = default_gn_constant();
        let r = check_gagliardo(&x, &g, c).unwrap();
        let pi = std::f64::consts::PI;
        let exact = c * (pi / 2.0).sqrt().cbrt() * pi.sqrt().cbrt();
        assert_eq!(r.sup, 1.0);
        assert!((r.bound - exact).abs() < 1e-6);
        assert!(r.holds);
    }

    #[test]
    fn gagliardo_triangle() {
        let x = nodes(-2.0, 2.0, 4001);
        let g: Vec<f64> = x.iter().map(|x| (1.0 - x.abs()).max(0.0)).collect();
        let r = check_gagliardo(&x, &g, default_gn_constant()).unwrap();
        // ‖g‖₁ = 1, ‖g′‖₂² = 2: bound = 2^{2/3}·2^{1/3} = 2
        assert!((r.bound - 2.0).abs() < 1e-2, "{}", r.bound);
        assert!(r.holds);
    }

    #[test]
    fn gagliardo_random_bumps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = nodes(-12.0, 12.0, 4801);
        for _ in 0..100 {
            let n_bumps = rng.gen_range(1..5);
            let bumps: Vec<(f64, f64, f64)> = (0..n_bumps)
                .map(|_| {
                    (
                        rng.gen_range(-4.0..4.0),
                        rng.gen_range(0.3..2.0),
                        rng.gen_range(-2.0..2.0),
                    )
                })
                .collect();
            let g: Vec<f64> = x
                .iter()
                .map(|&x| {
                    bumps
                        .iter()
                        .map(|&(c, w, a)| {
                            let s = (x - c) / w;
                            if s.abs() < 1.0 {
                                a * (-1.0 / (1.0 - s * s)).exp()
                            } else {
                                0.0
                            }
                        })
                        .sum()
                })
                .collect();
            let r = check_gagliardo(&x, &g, default_gn_constant()).unwrap();
            assert!(r.holds, "{:?} {:?}", bumps, r);
        }
    }

    proptest! {
        #[test]
        fn recovers_power_laws(pi in 0usize..4, a in 0.5f64..3.0, t0 in 0.2f64..1.0) {
            let p = [0.4, 0.5, 0.6, 1.0][pi];
            let (t, xi) = sample(t0, a, p, 200, 0.97 * t0);
            let r = fit_scaling_law(&t, &xi, &whole_branch()).unwrap();
            let t_last = r.fit.window.1;
            let step = r.grid.step;
            prop_assert!((r.fit.t0 - t0).abs() <= step, "{:?}", r.fit);
            prop_assert!((r.fit.c1 - p).abs() <= 2.0 * step / (t0 - t_last), "{:?}", r.fit);
        }

        #[test]
        fn residual_curve_unimodal(pi in 0usize..4, t0 in 0.2f64..1.0) {
            let p = [0.4, 0.5, 0.6, 1.0][pi];
            let (t, xi) = sample(t0, 1.0, p, 200, 0.97 * t0);
            let opts = FitOptions { no_refine: true, ..whole_branch() };
            let r = fit_scaling_law(&t, &xi, &opts).unwrap();
            let k = r.curve.iter().position(|c| c.0 == r.fit.t0).unwrap();
            let lo = k.saturating_sub(20);
            let hi = (k + 20).min(r.curve.len() - 1);
            for j in lo..k {
                prop_assert!(r.curve[j].1 >= r.curve[j + 1].1);
            }
            for j in k..hi {
                prop_assert!(r.curve[j].1 <= r.curve[j + 1].1);
            }
        }

        #[test]
        fn class_i_translation_invariant(shift in -3.0f64..3.0) {
            let shock = ShockData::new(-1.0, 1.0).unwrap();
            let a = extinction_bound_class_i(&Modular, &shock, &tanh_snapshot(0.0), 0.3).unwrap();
            let b = extinction_bound_class_i(&Modular, &shock, &tanh_snapshot(shift), 0.3).unwrap();
            prop_assert!((a.t - b.t).abs() < 1e-9 * a.t.max(1.0));
        }

        #[test]
        fn class_ii_deeper_dip_smaller_bound(d1 in 0.6f64..1.2, extra in 0.01f64..0.5) {
            let phi = 1.5;
            let grid = SpatialGrid::new(-6.0, 6.0, 1201).unwrap();
            let u = |d: f64| build_snapshot(&grid, 0.0, |x| phi - d * (-x * x).exp()).unwrap();
            let t1 = extinction_bound_class_ii(phi, &u(d1), 1.5).unwrap().t;
            let t2 = extinction_bound_class_ii(phi, &u(d1 + extra), 1.5).unwrap().t;
            prop_assert!(t2 < t1);
        }
    }
}
