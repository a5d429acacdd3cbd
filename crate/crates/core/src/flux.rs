//! Flux functions `f` and their derivatives.
//!
//! Every flux is a [`Flux`] trait object built by name from a
//! [`FluxSpec`] through [`registry()`]. Built-in kinds:
//!
//! | kind                  | f(u)              | parameters |
//! |-----------------------|-------------------|------------|
//! | `modular`             | `|u|`             | |
//! | `quadratic`           | `u²`              | |
//! | `regularized-modular` | `√(ε²+u²) − ε`    | `epsilon` (default 1e-16) |
//! | `tabulated`           | piecewise linear  | `path` to an `x,value` CSV |
//!
//! A nonzero `drift` on the spec replaces `f(u)` by `f(u) + drift·u`.

use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::params::Params;
use crate::registry::Registry;

pub trait Flux: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn value(&self, u: f64) -> Result<f64>;

    fn derivative(&self, u: f64) -> Result<f64>;

    /// Points where `f` is not differentiable; `derivative` returns the
    /// midpoint of the subdifferential there.
    fn is_kink(&self, _u: f64) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Modular;

impl Flux for Modular {
    fn name(&self) -> &str {
        "modular"
    }

    fn value(&self, u: f64) -> Result<f64> {
        Ok(u.abs())
    }

    /// `sgn(u)`, and 0 at the kink `u = 0`.
    fn derivative(&self, u: f64) -> Result<f64> {
        Ok(if u > 0.0 {
            1.0
        } else if u < 0.0 {
            -1.0
        } else {
            0.0
        })
    }

    fn is_kink(&self, u: f64) -> bool {
        u == 0.0
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Quadratic;

impl Flux for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn value(&self, u: f64) -> Result<f64> {
        Ok(u * u)
    }

    fn derivative(&self, u: f64) -> Result<f64> {
        Ok(2.0 * u)
    }
}

/// Smooth even approximation `f_ε(u) = √(ε² + u²) − ε` of `|u|`, with
/// `f_ε(0) = 0` and `f_ε'(u) = u / √(ε² + u²)`.
#[derive(Clone, Copy, Debug)]
pub struct RegularizedModular {
    epsilon: f64,
}

impl RegularizedModular {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(Self { epsilon })
        } else {
            Err(Error::param("epsilon", format!("must be > 0, got {epsilon}")))
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Flux for RegularizedModular {
    fn name(&self) -> &str {
        "regularized-modular"
    }

    fn value(&self, u: f64) -> Result<f64> {
        // hypot avoids overflow of u² and keeps ε² from underflowing against u².
        Ok(self.epsilon.hypot(u) - self.epsilon)
    }

    fn derivative(&self, u: f64) -> Result<f64> {
        Ok(u / self.epsilon.hypot(u))
    }
}

/// Piecewise-linear interpolant of tabulated `(u, f(u))` samples.
#[derive(Clone, Debug)]
pub struct Tabulated {
    u: Vec<f64>,
    f: Vec<f64>,
}

impl Tabulated {
    pub fn new(u: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if u.len() != f.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                got: f.len(),
            });
        }
        if u.len() < 2 {
            return Err(Error::param("samples", "need at least two samples"));
        }
        if u.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("samples", "abscissae must be strictly increasing"));
        }
        if u.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::param("samples", "non-finite sample"));
        }
        Ok(Self { u, f })
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let (u, f) = io::read_xy_csv(path)?;
        Self::new(u, f).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })
    }

    fn cell(&self, u: f64) -> Result<usize> {
        let (lo, hi) = (self.u[0], self.u[self.u.len() - 1]);
        if !(u >= lo && u <= hi) {
            return Err(Error::OutOfRange { value: u, lo, hi });
        }
        // partition_point gives the first abscissa > u.
        let i = self.u.partition_point(|&x| x <= u);
        Ok(i.clamp(1, self.u.len() - 1) - 1)
    }
}

impl Flux for Tabulated {
    fn name(&self) -> &str {
        "tabulated"
    }

    fn value(&self, u: f64) -> Result<f64> {
        let i = self.cell(u)?;
        let w = (u - self.u[i]) / (self.u[i + 1] - self.u[i]);
        Ok(self.f[i] + w * (self.f[i + 1] - self.f[i]))
    }

    fn derivative(&self, u: f64) -> Result<f64> {
        let i = self.cell(u)?;
        Ok((self.f[i + 1] - self.f[i]) / (self.u[i + 1] - self.u[i]))
    }

    fn is_kink(&self, u: f64) -> bool {
        self.u[1..self.u.len() - 1].contains(&u)
    }
}

/// `f(u) + c·u`.
#[derive(Debug)]
pub struct Drifted {
    inner: Box<dyn Flux>,
    drift: f64,
}

impl Drifted {
    pub fn new(inner: Box<dyn Flux>, drift: f64) -> Self {
        Self { inner, drift }
    }
}

impl Flux for Drifted {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn value(&self, u: f64) -> Result<f64> {
        Ok(self.inner.value(u)? + self.drift * u)
    }

    fn derivative(&self, u: f64) -> Result<f64> {
        Ok(self.inner.derivative(u)? + self.drift)
    }

    fn is_kink(&self, u: f64) -> bool {
        self.inner.is_kink(u)
    }
}

/// Serializable description of a flux: registry kind, parameters and drift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub drift: f64,
    #[serde(flatten)]
    pub params: Params,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl FluxSpec {
    pub fn new(kind: &str, params: Params) -> Self {
        Self {
            kind: kind.to_string(),
            drift: 0.0,
            params,
        }
    }

    pub fn modular() -> Self {
        Self::new("modular", Params::new())
    }

    pub fn quadratic() -> Self {
        Self::new("quadratic", Params::new())
    }

    pub fn regularized_modular(epsilon: f64) -> Self {
        Self::new("regularized-modular", Params::new().with("epsilon", epsilon))
    }

    pub fn tabulated(path: &Path) -> Self {
        Self::new(
            "tabulated",
            Params::new().with_text("path", &path.to_string_lossy()),
        )
    }

    pub fn with_drift(mut self, drift: f64) -> Self {
        self.drift = drift;
        self
    }

    pub fn build(&self) -> Result<Arc<dyn Flux>> {
        let base = registry().build(&self.kind, &self.params)?;
        if self.drift == 0.0 {
            Ok(Arc::from(base))
        } else if self.drift.is_finite() {
            Ok(Arc::new(Drifted::new(base, self.drift)))
        } else {
            Err(Error::param("drift", "must be finite"))
        }
    }
}

/// Built-in flux registry.
pub fn registry() -> &'static Registry<dyn Flux> {
    static REGISTRY: OnceLock<Registry<dyn Flux>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn Flux> = Registry::new("flux");
        r.register("modular", |_| Ok(Box::new(Modular)));
        r.register("quadratic", |_| Ok(Box::new(Quadratic)));
        r.register("regularized-modular", |p| {
            Ok(Box::new(RegularizedModular::new(
                p.positive("epsilon", Some(1e-16))?,
            )?))
        });
        r.register("tabulated", |p| {
            let path = p
                .text("path")?
                .ok_or_else(|| Error::MissingParameter("path".into()))?;
            Ok(Box::new(Tabulated::from_csv(Path::new(path))?))
        });
        r
    })
}

pub fn eval_flux(spec: &FluxSpec, u: f64) -> Result<f64> {
    spec.build()?.value(u)
}

pub fn eval_flux_derivative(spec: &FluxSpec, u: f64) -> Result<f64> {
    spec.build()?.derivative(u)
}
