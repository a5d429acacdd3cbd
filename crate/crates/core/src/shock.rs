//! Shock-theory predicates: Rankine–Hugoniot speed, the Gel'fand–Oleinik
//! entropy condition, classification of initial data and the exact
//! traveling profile of the modular flux.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::Flux;

/// Asymptotic limits of the initial data at `−∞` and `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShockData {
    pub phi_minus: f64,
    pub phi_plus: f64,
}

impl ShockData {
    pub fn new(phi_minus: f64, phi_plus: f64) -> Result<Self> {
        if !(phi_minus.is_finite() && phi_plus.is_finite()) {
            return Err(Error::param("phi", "asymptotic limits must be finite"));
        }
        if phi_minus == phi_plus {
            return Err(Error::DegenerateShock(phi_minus));
        }
        Ok(Self {
            phi_minus,
            phi_plus,
        })
    }

    pub fn phi_min(&self) -> f64 {
        self.phi_minus.min(self.phi_plus)
    }

    pub fn phi_max(&self) -> f64 {
        self.phi_minus.max(self.phi_plus)
    }
}

/// `c = (f(φ₋) − f(φ₊)) / (φ₊ − φ₋)`.
pub fn rankine_hugoniot_speed(flux: &dyn Flux, shock: &ShockData) -> Result<f64> {
    let (lo, hi) = (shock.phi_minus, shock.phi_plus);
    if lo == hi {
        return Err(Error::DegenerateShock(lo));
    }
    Ok((flux.value(lo)? - flux.value(hi)?) / (hi - lo))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Entropy {
    Satisfied,
    Violated { z: f64 },
}

impl Entropy {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Entropy::Satisfied)
    }
}

pub const DEFAULT_ENTROPY_SAMPLES: usize = 10_001;

/// Samples `z` strictly inside `(φ_min, φ_max)` (endpoints excluded by half
/// a sample step) and checks that the profile ODE
/// `φ' = c(φ₋ − z) + f(φ₋) − f(z)` pushes from `φ₋` towards `φ₊` at every
/// sample. For `φ₋ < φ₊` this is exactly
/// `(f(φ_min) − f(z))/(z − φ_min) > c`; for `φ₋ > φ₊` the inequality is
/// reversed. Returns the first violating `z`.
pub fn check_entropy_condition(
    flux: &dyn Flux,
    shock: &ShockData,
    n_samples: usize,
) -> Result<Entropy> {
    if n_samples < 2 {
        return Err(Error::param("n_samples", "must be >= 2"));
    }
    let c = rankine_hugoniot_speed(flux, shock)?;
    let (lo, hi) = (shock.phi_min(), shock.phi_max());
    let orientation = (shock.phi_plus - shock.phi_minus).signum();
    let f_minus = flux.value(shock.phi_minus)?;
    let step = (hi - lo) / n_samples as f64;
    for i in 0..n_samples {
        let z = lo + (i as f64 + 0.5) * step;
        let drive = c * (shock.phi_minus - z) + f_minus - flux.value(z)?;
        if !(orientation * drive > 0.0) {
            return Ok(Entropy::Violated { z });
        }
    }
    Ok(Entropy::Satisfied)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataClass {
    /// Opposite signs, entropy condition holds: shock wave.
    ClassI,
    /// Same sign at both ends.
    ClassII,
    /// Opposite signs, entropy condition fails: anti-shock wave.
    ClassIII,
}

pub fn classify_initial_data(flux: &dyn Flux, shock: &ShockData) -> Result<DataClass> {
    if shock.phi_minus == 0.0 || shock.phi_plus == 0.0 {
        return Err(Error::Unclassifiable);
    }
    if shock.phi_minus.signum() == shock.phi_plus.signum() {
        return Ok(DataClass::ClassII);
    }
    match check_entropy_condition(flux, shock, DEFAULT_ENTROPY_SAMPLES)? {
        Entropy::Satisfied => Ok(DataClass::ClassI),
        Entropy::Violated { .. } => Ok(DataClass::ClassIII),
    }
}

/// Exact traveling shock of `u_t = u_xx + |u|_x` with `φ₋ < 0 < φ₊`,
/// moving at the Rankine–Hugoniot speed `c`:
/// `φ(x) = φ₊(1 − e^{−(1+c)x})` for `x ≥ 0`,
/// `φ(x) = φ₋(1 − e^{(1−c)x})` for `x < 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularProfile {
    pub shock: ShockData,
    pub speed: f64,
}

impl ModularProfile {
    pub fn value(&self, x: f64) -> f64 {
        if x >= 0.0 {
            -self.shock.phi_plus * (-(1.0 + self.speed) * x).exp_m1()
        } else {
            -self.shock.phi_minus * ((1.0 - self.speed) * x).exp_m1()
        }
    }

    /// One-sided second derivatives `(φ''(0⁻), φ''(0⁺))`.
    pub fn second_derivative_at_interface(&self) -> (f64, f64) {
        let left = -self.shock.phi_minus * (1.0 - self.speed).powi(2);
        let right = -self.shock.phi_plus * (1.0 + self.speed).powi(2);
        (left, right)
    }

    pub fn slope_at_interface(&self) -> f64 {
        self.shock.phi_plus * (1.0 + self.speed)
    }
}

pub fn modular_traveling_profile(shock: &ShockData) -> Result<ModularProfile> {
    if !(shock.phi_minus < 0.0 && shock.phi_plus > 0.0) {
        return Err(Error::NotAShock(format!(
            "modular profile needs phi_minus < 0 < phi_plus, got ({}, {})",
            shock.phi_minus, shock.phi_plus
        )));
    }
    let speed = (shock.phi_plus + shock.phi_minus) / (shock.phi_minus - shock.phi_plus);
    Ok(ModularProfile {
        shock: *shock,
        speed,
    })
}
