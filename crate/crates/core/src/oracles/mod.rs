//! Closed-form reference solutions and mass diagnostics.

pub mod cole_hopf;
pub mod green;

pub use cole_hopf::{Chi0, ColeHopf, GaussianChi0, SechChi0};
pub use green::{green_f, green_f_limit, green_reference_u, GreenReference};

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::params::Params;
use crate::registry::Registry;
use crate::shock::{modular_traveling_profile, ModularProfile, ShockData};
use crate::snapshot::Snapshot;

/// An exact solution `u(t, x)` selectable by name.
pub trait ReferenceSolution: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn value(&self, t: f64, x: f64) -> Result<f64>;
    /// Time at which interfaces coalesce, when the solution knows it.
    fn coalescence_time(&self) -> Option<Result<f64>> {
        None
    }
}

impl ReferenceSolution for ColeHopf {
    fn name(&self) -> &str {
        "cole-hopf"
    }

    fn value(&self, t: f64, x: f64) -> Result<f64> {
        self.u(t, x)
    }

    fn coalescence_time(&self) -> Option<Result<f64>> {
        Some(self.t0())
    }
}

impl ReferenceSolution for GreenReference {
    fn name(&self) -> &str {
        "green"
    }

    fn value(&self, t: f64, x: f64) -> Result<f64> {
        self.u(t, x)
    }
}

/// The modular traveling shock `φ(x − ct)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TravelingProfile(pub ModularProfile);

impl ReferenceSolution for TravelingProfile {
    fn name(&self) -> &str {
        "profile"
    }

    fn value(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.0.value(x - self.0.speed * t))
    }
}

/// Built-in reference-solution registry.
pub fn registry() -> &'static Registry<dyn ReferenceSolution> {
    static REGISTRY: OnceLock<Registry<dyn ReferenceSolution>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn ReferenceSolution> = Registry::new("oracle");
        r.register("cole-hopf", |p| {
            let a = p.positive("amplitude", Some(SechChi0::FIGURE_AMPLITUDE))?;
            Ok(Box::new(ColeHopf::new(Arc::new(SechChi0::new(a)?))?))
        });
        r.register("green", |p| {
            Ok(Box::new(GreenReference::new(
                p.number_or("phi_star", 1.0)?,
                p.number_or("shift", 0.0)?,
            )?))
        });
        r.register("profile", |p| {
            let shock = ShockData::new(
                p.number_or("phi_minus", -1.0)?,
                p.number_or("phi_plus", 1.0)?,
            )?;
            Ok(Box::new(TravelingProfile(modular_traveling_profile(&shock)?)))
        });
        r
    })
}

pub fn reference_solution(kind: &str, params: &Params) -> Result<Arc<dyn ReferenceSolution>> {
    Ok(Arc::from(registry().build(kind, params)?))
}

/// Masses on either side of an interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassSplit {
    /// `∫_{x_min}^{ξ} (u − φ₋)`.
    pub left: f64,
    /// `∫_{ξ}^{x_max} (φ₊ − u)`.
    pub right: f64,
    /// False when the profile is more than 1e-6 away from `φ±` at the ends
    /// of the domain, so truncation matters.
    pub decayed: bool,
}

/// Trapezoid masses split at `xi`, with linear interpolation inside the
/// cell containing `xi`.
pub fn numeric_mass(snap: &Snapshot, xi: f64, phi_minus: f64, phi_plus: f64) -> Result<MassSplit> {
    let g = snap.grid();
    let u = snap.values();
    if !(xi >= g.x_min() && xi <= g.x_max()) {
        return Err(Error::Domain(format!(
            "interface {xi} outside [{}, {}]",
            g.x_min(),
            g.x_max()
        )));
    }
    let n = u.len();
    let h = g.h();
    let cell = (((xi - g.x_min()) / h).floor() as usize).min(n - 2);
    let (x0, x1) = (g.x(cell), g.x(cell + 1));
    let w = ((xi - x0) / (x1 - x0)).clamp(0.0, 1.0);
    let u_xi = u[cell] + w * (u[cell + 1] - u[cell]);

    let mut left = 0.0;
    for k in 0..cell {
        left += 0.5 * h * ((u[k] - phi_minus) + (u[k + 1] - phi_minus));
    }
    left += 0.5 * (xi - x0) * ((u[cell] - phi_minus) + (u_xi - phi_minus));

    let mut right = 0.5 * (x1 - xi) * ((phi_plus - u_xi) + (phi_plus - u[cell + 1]));
    for k in cell + 1..n - 1 {
        right += 0.5 * h * ((phi_plus - u[k]) + (phi_plus - u[k + 1]));
    }
    let decayed = (u[0] - phi_minus).abs() <= 1e-6 && (u[n - 1] - phi_plus).abs() <= 1e-6;
    Ok(MassSplit {
        left,
        right,
        decayed,
    })
}
