//! Exact solution of `u_t = u_xx + (u²)_x` through the Cole–Hopf transform
//!
//! ```text
//! u(t, x) = (sinh x + χ_x(t, x)) / (cosh x + χ(t, x)),
//! χ(t, x) = e^{−t}/√(4πt) ∫ χ₀(y) e^{−(x−y)²/4t} dy,
//! ```
//!
//! for an even, positive seed `χ₀`. With `y = x + 2√t·s` the heat kernel
//! becomes `e^{−s²}/√π`, truncated to `|s| ≤ 8`; derivatives in `x` use the
//! differentiated kernels `s/√t` and `(s² − ½)/t`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// Seed profile `χ₀` with its first two derivatives.
pub trait Chi0: Send + Sync + fmt::Debug {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    fn second_derivative(&self, x: f64) -> f64;
}

/// `χ₀(x) = A·sech x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SechChi0 {
    amplitude: f64,
}

impl SechChi0 {
    /// `cosh²(1)`: puts the positive zero of `u₀` at `x = 1`.
    pub const FIGURE_AMPLITUDE: f64 = 2.381_097_845_541_816;

    pub fn new(amplitude: f64) -> Result<Self> {
        if amplitude > 0.0 && amplitude.is_finite() {
            Ok(Self { amplitude })
        } else {
            Err(Error::param("amplitude", format!("must be > 0, got {amplitude}")))
        }
    }

    pub fn figure() -> Self {
        Self {
            amplitude: 1f64.cosh().powi(2),
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

impl Chi0 for SechChi0 {
    fn value(&self, x: f64) -> f64 {
        self.amplitude / x.cosh()
    }

    fn derivative(&self, x: f64) -> f64 {
        -self.amplitude * x.tanh() / x.cosh()
    }

    fn second_derivative(&self, x: f64) -> f64 {
        let sech = 1.0 / x.cosh();
        self.amplitude * sech * (1.0 - 2.0 * sech * sech)
    }
}

/// `χ₀(x) = A·e^{−x²}`; its heat evolution is known in closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianChi0 {
    pub amplitude: f64,
}

impl Chi0 for GaussianChi0 {
    fn value(&self, x: f64) -> f64 {
        self.amplitude * (-x * x).exp()
    }

    fn derivative(&self, x: f64) -> f64 {
        -2.0 * x * self.value(x)
    }

    fn second_derivative(&self, x: f64) -> f64 {
        (4.0 * x * x - 2.0) * self.value(x)
    }
}

/// Half-width of the truncated Gaussian window in the variable `s`.
pub const WINDOW: f64 = 8.0;
const REL_TOL: f64 = 1e-11;

#[derive(Clone, Debug)]
pub struct ColeHopf {
    chi0: Arc<dyn Chi0>,
}

impl ColeHopf {
    /// Checks positivity of `χ₀` and decay of `sech·χ₀` at `x = ±40`.
    pub fn new(chi0: Arc<dyn Chi0>) -> Result<Self> {
        for i in -40..=40 {
            let x = i as f64;
            let v = chi0.value(x);
            if !(v > 0.0) && (x.abs() < 20.0 || v < 0.0) {
                return Err(Error::Domain(format!("chi0({x}) = {v} is not positive")));
            }
        }
        for x in [-40.0f64, 40.0] {
            let tail = (chi0.value(x) / x.cosh()).abs();
            if !(tail <= 1e-12) {
                return Err(Error::Domain(format!(
                    "sech(x)·chi0(x) = {tail:e} at x = {x} does not decay"
                )));
            }
        }
        Ok(Self { chi0 })
    }

    pub fn figure() -> Self {
        Self {
            chi0: Arc::new(SechChi0::figure()),
        }
    }

    pub fn chi0(&self) -> &dyn Chi0 {
        self.chi0.as_ref()
    }

    fn convolve(&self, t: f64, x: f64, kernel: impl Fn(f64) -> f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!(
                "heat-kernel integral needs t > 0, got {t}; use chi0 at t = 0"
            )));
        }
        let spread = 2.0 * t.sqrt();
        let chi0 = &self.chi0;
        let r = integrate(
            |s: f64| chi0.value(x + spread * s) * kernel(s) * (-s * s).exp(),
            -WINDOW,
            WINDOW,
            REL_TOL,
            4,
            1 << 14,
        );
        Ok((-t).exp() / PI.sqrt() * r.value)
    }

    pub fn chi(&self, t: f64, x: f64) -> Result<f64> {
        self.convolve(t, x, |_| 1.0)
    }

    pub fn chi_x(&self, t: f64, x: f64) -> Result<f64> {
        let rt = t.sqrt();
        self.convolve(t, x, |s| s / rt)
    }

    pub fn chi_xx(&self, t: f64, x: f64) -> Result<f64> {
        self.convolve(t, x, |s| (s * s - 0.5) / t)
    }

    /// `(χ, χ_x, χ_xx)` at `(t, x)`, using `χ₀` directly at `t = 0`.
    fn derivatives(&self, t: f64, x: f64, order: usize) -> Result<[f64; 3]> {
        if t == 0.0 {
            return Ok([
                self.chi0.value(x),
                self.chi0.derivative(x),
                if order >= 2 { self.chi0.second_derivative(x) } else { f64::NAN },
            ]);
        }
        let c = self.chi(t, x)?;
        let cx = self.chi_x(t, x)?;
        let cxx = if order >= 2 { self.chi_xx(t, x)? } else { f64::NAN };
        Ok([c, cx, cxx])
    }

    /// `u(t, x) = (sinh x + χ_x)/(cosh x + χ)`.
    pub fn u(&self, t: f64, x: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("t = {t} < 0")));
        }
        let [c, cx, _] = self.derivatives(t, x, 1)?;
        let den = x.cosh() + c;
        if !(den > 0.0) {
            return Err(Error::Domain(format!(
                "cosh(x) + chi = {den} at (t, x) = ({t}, {x}); chi0 is not admissible"
            )));
        }
        Ok((x.sinh() + cx) / den)
    }

    /// `1 + χ_xx(t, 0)`, whose sign change marks the coalescence at 0.
    pub fn curvature_at_origin(&self, t: f64) -> Result<f64> {
        Ok(1.0 + self.derivatives(t, 0.0, 2)?[2])
    }

    /// Coalescence time: root of `t ↦ 1 + χ_xx(t, 0)` found by bisection to
    /// 1e-8.
    pub fn t0(&self) -> Result<f64> {
        let g0 = self.curvature_at_origin(0.0)?;
        if g0 > 0.0 {
            return Err(Error::NoCoalescence(format!(
                "1 + chi0''(0) = {g0} > 0: the zero at the origin is simple"
            )));
        }
        if g0 == 0.0 {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 0.5;
        while self.curvature_at_origin(hi)? <= 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e3 {
                return Err(Error::NoCoalescence(
                    "1 + chi_xx(t, 0) stays negative up to t = 1000".into(),
                ));
            }
        }
        while hi - lo > 1e-8 {
            let mid = 0.5 * (lo + hi);
            if self.curvature_at_origin(mid)? <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Positive zero `ξ(t)` of `u(t, ·)`, or `None` once it has merged into
    /// the origin. Newton on `sinh x + χ_x` with a bisection safeguard.
    pub fn positive_zero(&self, t: f64) -> Result<Option<f64>> {
        let g = |x: f64| -> Result<(f64, f64)> {
            let [_, cx, cxx] = self.derivatives(t, x, 2)?;
            Ok((x.sinh() + cx, x.cosh() + cxx))
        };
        let (mut lo, mut hi) = (1e-6, 10.0);
        let (g_lo, _) = g(lo)?;
        let (g_hi, _) = g(hi)?;
        if !(g_lo < 0.0 && g_hi > 0.0) {
            return Ok(None);
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (v, dv) = g(x)?;
            if v == 0.0 {
                return Ok(Some(x));
            }
            if v < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - v / dv;
            let next = if dv > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 1e-14 * x.max(1e-3) || hi - lo <= 1e-15 {
                return Ok(Some(next));
            }
            x = next;
        }
        Ok(Some(x))
    }
}
