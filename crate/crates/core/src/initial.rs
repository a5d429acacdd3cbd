//! Initial-condition families, selected by name.
//!
//! | kind              | u₀(x)                                  | parameters |
//! |-------------------|----------------------------------------|------------|
//! | `shock-alpha`     | `tanh(x)·(1 − e^{α(1−x²)})`            | `alpha` |
//! | `antishock-alpha` | `−tanh(x)·(1 − e^{α(1−x²)})`           | `alpha` |
//! | `tanh-shifted`    | `tanh(x − x0)`                         | `x0` |
//! | `cole-hopf-chi0`  | Cole–Hopf profile of `χ₀ = A·sech`     | `amplitude` (default cosh²1) |
//! | `constant`        | `value`                                | `value` |
//! | `dip`             | `level·(1 − depth·e^{−(x/width)²})`    | `level`, `depth`, `width` |
//! | `sampled`         | piecewise-linear through a CSV         | `path` |

use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::oracles::cole_hopf::{ColeHopf, SechChi0};
use crate::params::Params;
use crate::registry::Registry;

pub trait InitialProfile: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn value(&self, x: f64) -> f64;

    /// True when `u₀(−x) = −u₀(x)` for all `x`.
    fn is_odd(&self) -> bool {
        false
    }

    /// Asymptotic limits `(φ₋, φ₊)` when known analytically.
    fn limits(&self) -> Option<(f64, f64)> {
        None
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ShockAlpha {
    alpha: f64,
    sign: f64,
}

impl ShockAlpha {
    pub fn shock(alpha: f64) -> Result<Self> {
        Self::with_sign(alpha, 1.0)
    }

    pub fn antishock(alpha: f64) -> Result<Self> {
        Self::with_sign(alpha, -1.0)
    }

    fn with_sign(alpha: f64, sign: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Self { alpha, sign })
        } else {
            Err(Error::param("alpha", format!("must be > 0, got {alpha}")))
        }
    }
}

impl InitialProfile for ShockAlpha {
    fn name(&self) -> &str {
        if self.sign > 0.0 {
            "shock-alpha"
        } else {
            "antishock-alpha"
        }
    }

    fn value(&self, x: f64) -> f64 {
        // exp_m1 keeps the factor exactly zero at |x| = 1.
        self.sign * x.tanh() * -(self.alpha * (1.0 - x * x)).exp_m1()
    }

    fn is_odd(&self) -> bool {
        true
    }

    fn limits(&self) -> Option<(f64, f64)> {
        Some((-self.sign, self.sign))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TanhShifted {
    pub x0: f64,
}

impl InitialProfile for TanhShifted {
    fn name(&self) -> &str {
        "tanh-shifted"
    }

    fn value(&self, x: f64) -> f64 {
        (x - self.x0).tanh()
    }

    fn is_odd(&self) -> bool {
        self.x0 == 0.0
    }

    fn limits(&self) -> Option<(f64, f64)> {
        Some((-1.0, 1.0))
    }
}

/// `u₀ = (sinh x + χ₀'(x)) / (cosh x + χ₀(x))` for `χ₀ = A·sech x`.
#[derive(Debug)]
pub struct ColeHopfInitial {
    oracle: ColeHopf,
}

impl ColeHopfInitial {
    pub fn new(amplitude: f64) -> Result<Self> {
        Ok(Self {
            oracle: ColeHopf::new(Arc::new(SechChi0::new(amplitude)?))?,
        })
    }
}

impl InitialProfile for ColeHopfInitial {
    fn name(&self) -> &str {
        "cole-hopf-chi0"
    }

    fn value(&self, x: f64) -> f64 {
        self.oracle.u(0.0, x).unwrap_or(f64::NAN)
    }

    fn is_odd(&self) -> bool {
        true
    }

    fn limits(&self) -> Option<(f64, f64)> {
        Some((-1.0, 1.0))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl InitialProfile for Constant {
    fn name(&self) -> &str {
        "constant"
    }

    fn value(&self, _x: f64) -> f64 {
        self.0
    }

    fn is_odd(&self) -> bool {
        self.0 == 0.0
    }

    fn limits(&self) -> Option<(f64, f64)> {
        Some((self.0, self.0))
    }
}

/// Even Gaussian dip below a constant level: class-II data when
/// `depth > 1`.
#[derive(Clone, Copy, Debug)]
pub struct Dip {
    pub level: f64,
    pub depth: f64,
    pub width: f64,
}

impl InitialProfile for Dip {
    fn name(&self) -> &str {
        "dip"
    }

    fn value(&self, x: f64) -> f64 {
        let s = x / self.width;
        self.level * (1.0 - self.depth * (-s * s).exp())
    }

    fn limits(&self) -> Option<(f64, f64)> {
        Some((self.level, self.level))
    }
}

/// Piecewise-linear interpolation through `(x, u)` samples; NaN outside the
/// sampled range.
#[derive(Clone, Debug)]
pub struct Sampled {
    x: Vec<f64>,
    u: Vec<f64>,
}

impl Sampled {
    pub fn new(x: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if x.len() != u.len() || x.len() < 2 {
            return Err(Error::param("samples", "need at least two (x, u) pairs"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("samples", "x must be strictly increasing"));
        }
        Ok(Self { x, u })
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let (x, u) = io::read_xy_csv(path)?;
        Self::new(x, u).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: e.to_string(),
        })
    }
}

impl InitialProfile for Sampled {
    fn name(&self) -> &str {
        "sampled"
    }

    fn value(&self, x: f64) -> f64 {
        let n = self.x.len();
        if !(x >= self.x[0] && x <= self.x[n - 1]) {
            return f64::NAN;
        }
        let i = self.x.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let w = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        self.u[i] + w * (self.u[i + 1] - self.u[i])
    }

    fn limits(&self) -> Option<(f64, f64)> {
        Some((self.u[0], self.u[self.u.len() - 1]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialConditionSpec {
    pub kind: String,
    #[serde(flatten)]
    pub params: Params,
}

impl InitialConditionSpec {
    pub fn new(kind: &str, params: Params) -> Self {
        Self {
            kind: kind.to_string(),
            params,
        }
    }

    pub fn shock_alpha(alpha: f64) -> Self {
        Self::new("shock-alpha", Params::new().with("alpha", alpha))
    }

    pub fn antishock_alpha(alpha: f64) -> Self {
        Self::new("antishock-alpha", Params::new().with("alpha", alpha))
    }

    pub fn tanh_shifted(x0: f64) -> Self {
        Self::new("tanh-shifted", Params::new().with("x0", x0))
    }

    pub fn cole_hopf_chi0() -> Self {
        Self::new("cole-hopf-chi0", Params::new())
    }

    pub fn constant(value: f64) -> Self {
        Self::new("constant", Params::new().with("value", value))
    }

    pub fn dip(level: f64, depth: f64, width: f64) -> Self {
        Self::new(
            "dip",
            Params::new()
                .with("level", level)
                .with("depth", depth)
                .with("width", width),
        )
    }

    pub fn build(&self) -> Result<Arc<dyn InitialProfile>> {
        Ok(Arc::from(registry().build(&self.kind, &self.params)?))
    }
}

/// Built-in initial-condition registry.
pub fn registry() -> &'static Registry<dyn InitialProfile> {
    static REGISTRY: OnceLock<Registry<dyn InitialProfile>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn InitialProfile> = Registry::new("initial condition");
        r.register("shock-alpha", |p| {
            Ok(Box::new(ShockAlpha::shock(p.require("alpha")?)?))
        });
        r.register("antishock-alpha", |p| {
            Ok(Box::new(ShockAlpha::antishock(p.require("alpha")?)?))
        });
        r.register("tanh-shifted", |p| {
            Ok(Box::new(TanhShifted {
                x0: p.number_or("x0", 0.0)?,
            }))
        });
        r.register("cole-hopf-chi0", |p| {
            let a = p.positive("amplitude", Some(SechChi0::FIGURE_AMPLITUDE))?;
            Ok(Box::new(ColeHopfInitial::new(a)?))
        });
        r.register("constant", |p| Ok(Box::new(Constant(p.require("value")?))));
        r.register("dip", |p| {
            Ok(Box::new(Dip {
                level: p.require("level")?,
                depth: p.require("depth")?,
                width: p.positive("width", Some(1.0))?,
            }))
        });
        r.register("sampled", |p| {
            let path = p
                .text("path")?
                .ok_or_else(|| Error::MissingParameter("path".into()))?;
            Ok(Box::new(Sampled::from_csv(Path::new(path))?))
        });
        r
    })
}

/// Pointwise initial profile described by `ic`.
pub fn initial_condition(ic: &InitialConditionSpec) -> Result<Arc<dyn InitialProfile>> {
    ic.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shock_alpha_zeros() {
        for alpha in [0.5, 1.0, 4.0] {
            let s = ShockAlpha::shock(alpha).unwrap();
            assert_eq!(s.value(0.0), 0.0);
            assert_eq!(s.value(1.0), 0.0);
            assert_eq!(s.value(-1.0), 0.0);
        }
    }

    #[test]
    fn antishock_limits() {
        let a = ShockAlpha::antishock(1.0).unwrap();
        assert!((a.value(30.0) + 1.0).abs() < 1e-15);
        assert!((a.value(-30.0) - 1.0).abs() < 1e-15);
        assert_eq!(a.limits(), Some((1.0, -1.0)));
        assert!(ShockAlpha::shock(0.0).is_err());
    }

    #[test]
    fn odd_flags() {
        assert!(InitialConditionSpec::shock_alpha(1.0).build().unwrap().is_odd());
        assert!(!InitialConditionSpec::tanh_shifted(0.5).build().unwrap().is_odd());
        assert!(!InitialConditionSpec::dip(1.0, 1.5, 1.0).build().unwrap().is_odd());
    }

    #[test]
    fn cole_hopf_initial_vanishes_at_one() {
        let u0 = InitialConditionSpec::cole_hopf_chi0().build().unwrap();
        assert!(u0.value(1.0).abs() < 1e-15);
        assert_eq!(u0.value(0.0), 0.0);
        assert!(u0.value(0.5) < 0.0 && u0.value(2.0) > 0.0);
    }

    #[test]
    fn sampled_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ic.csv");
        std::fs::write(&path, "x,value\n0,0\n1,oops\n").unwrap();
        let err = InitialConditionSpec::new("sampled", Params::new().with_text("path", path.to_str().unwrap()))
            .build()
            .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        std::fs::write(&path, "x,value\n0,0\n1,2\n").unwrap();
        let ic = InitialConditionSpec::new("sampled", Params::new().with_text("path", path.to_str().unwrap()))
            .build()
            .unwrap();
        assert_eq!(ic.value(0.5), 1.0);
        assert!(ic.value(1.5).is_nan());
    }
}
