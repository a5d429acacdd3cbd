//! Reference solution of the odd modular anti-shock.
//!
//! For `x > 0` the odd solution of `u_t = u_xx + |u|_x` with
//! `u(0, x) = φ*(e^{−x} − 1)` solves `u_t = u_xx − u_x`, `u(t, 0) = 0`. Its
//! closed form
//!
//! ```text
//! u(t, x) = φ*/2 · [ eˣ erfc((t+x)/2√t) − erfc((t−x)/2√t)
//!                   + e^{2t−x} erfc((3t−x)/2√t) − e^{2t+2x} erfc((3t+x)/2√t) ]
//! ```
//!
//! is evaluated with every exponential–erfc product rewritten as
//! `e^{−(t−x)²/4t}·erfcx(·)`, which stays finite for large `t`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{erfc, exp_erfc};

/// Below this time the closed form is replaced by its `t → 0` limit.
pub const LIMIT_BRANCH_TIME: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenReference {
    phi_star: f64,
    shift: f64,
}

impl GreenReference {
    pub fn new(phi_star: f64, shift: f64) -> Result<Self> {
        if !(phi_star > 0.0 && phi_star.is_finite()) {
            return Err(Error::param("phi_star", format!("must be > 0, got {phi_star}")));
        }
        if !shift.is_finite() {
            return Err(Error::param("shift", "must be finite"));
        }
        Ok(Self { phi_star, shift })
    }

    pub fn phi_star(&self) -> f64 {
        self.phi_star
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Initial profile `φ*(e^{−|x|} − 1)·sgn(x)` about the shift.
    pub fn initial(&self, x: f64) -> f64 {
        let y = x - self.shift;
        sgn(y) * self.phi_star * (-y.abs()).exp_m1()
    }

    /// `u_ref(t, x)`, odd about `shift`.
    pub fn u(&self, t: f64, x: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("t = {t} < 0")));
        }
        let y = x - self.shift;
        if t < LIMIT_BRANCH_TIME {
            return Ok(self.initial(x));
        }
        Ok(sgn(y) * self.phi_star * half_line(t, y.abs()))
    }

    /// `F(t) = ∫_{x₁}^{∞} (u_ref(t, x)/φ* + 1) dx − t` for `x₁ ≥ shift`.
    pub fn f(&self, x1: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("F needs t > 0, got {t}")));
        }
        let x1 = x1 - self.shift;
        if x1 < 0.0 {
            return Err(Error::Domain(format!(
                "F is defined for x1 at or right of the shift, got offset {x1}"
            )));
        }
        let s = 2.0 * t.sqrt();
        let q = (t - x1) / s;
        let gauss = -(q * q);
        let c = (3.0 * t - x1) / s;
        let a = (x1 + t) / s;
        let g = (x1 + 3.0 * t) / s;
        // erf(−q) = 1 − erfc(q) absorbs the linear growth in t exactly.
        let value = 6.0 - 4.0 * x1 - (2.0 * t + 3.0 - 2.0 * x1) * erfc(q)
            + 2.0 * exp_erfc(2.0 * t - x1, c)
            - 2.0 * exp_erfc(x1, a)
            + exp_erfc(2.0 * x1 + 2.0 * t, g)
            + 4.0 * (t / PI).sqrt() * gauss.exp();
        Ok(0.25 * value)
    }

    /// `lim_{t→∞} F(t) = 3/2 − x₁`, with `x₁` measured from the shift.
    pub fn f_limit(&self, x1: f64) -> f64 {
        1.5 - (x1 - self.shift)
    }
}

fn sgn(y: f64) -> f64 {
    if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `u_ref/φ*` for `x ≥ 0`, `t > 0`.
fn half_line(t: f64, x: f64) -> f64 {
    let s = 2.0 * t.sqrt();
    0.5 * (exp_erfc(x, (t + x) / s) - erfc((t - x) / s) + exp_erfc(2.0 * t - x, (3.0 * t - x) / s)
        - exp_erfc(2.0 * t + 2.0 * x, (3.0 * t + x) / s))
}

pub fn green_reference_u(r: &GreenReference, t: f64, x: f64) -> Result<f64> {
    r.u(t, x)
}

pub fn green_f(r: &GreenReference, x1: f64, t: f64) -> Result<f64> {
    r.f(x1, t)
}

pub fn green_f_limit(x1: f64) -> f64 {
    1.5 - x1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn kernel(t: f64, x: f64, y: f64) -> f64 {
        let a = x - y - t;
        let b = x + y - t;
        ((-a * a / (4.0 * t)).exp() - (-y - b * b / (4.0 * t)).exp()) / (4.0 * PI * t).sqrt()
    }

    /// `∫₀^∞ G(t, x, y) φ(y) dy` by composite Gauss–Legendre on pieces.
    fn quadrature_u(t: f64, x: f64) -> f64 {
        let width = 12.0 * t.sqrt() + 2.0 * t + 40.0;
        let f = |y: f64| kernel(t, x, y) * (-y).exp_m1();
        let mut total = 0.0;
        let mut edges = vec![0.0, (x - 2.0).max(0.0), x + t, x + 4.0, width];
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        for w in edges.windows(2) {
            if w[1] > w[0] {
                total += integrate(f, w[0], w[1], 1e-14, 8, 1 << 14).value;
            }
        }
        total
    }

    #[test]
    fn matches_green_quadrature() {
        let r = GreenReference::new(1.0, 0.0).unwrap();
        let probes = [
            (0.5, 1.0),
            (0.1, 0.3),
            (2.0, 5.0),
            (0.05, 2.0),
            (1.0, 0.1),
            (3.0, 1.5),
        ];
        for (t, x) in probes {
            let q = quadrature_u(t, x);
            assert!((r.u(t, x).unwrap() - q).abs() < 1e-8, "({t}, {x})");
        }
    }

    #[test]
    fn odd_and_initial() {
        let r = GreenReference::new(2.0, 0.0).unwrap();
        for &t in &[0.0, 0.3, 10.0, 500.0] {
            assert_eq!(r.u(t, 0.0).unwrap(), 0.0);
            assert_eq!(r.u(t, -1.3).unwrap(), -r.u(t, 1.3).unwrap());
        }
        for &x in &[0.1, 1.0, 4.0] {
            assert!((r.u(0.0, x).unwrap() - 2.0 * ((-x).exp() - 1.0)).abs() < 1e-15);
        }
        assert!(r.u(1e4, 3.0).unwrap().is_finite());
    }

    #[test]
    fn satisfies_advection_diffusion() {
        let r = GreenReference::new(1.0, 0.0).unwrap();
        let (dt, dx) = (1e-4, 1e-3);
        for (t, x) in [(0.5, 1.0), (1.0, 2.0), (0.3, 0.5)] {
            let u = |t: f64, x: f64| r.u(t, x).unwrap();
            let ut = (u(t + dt, x) - u(t - dt, x)) / (2.0 * dt);
            let ux = (u(t, x + dx) - u(t, x - dx)) / (2.0 * dx);
            let uxx = (u(t, x + dx) - 2.0 * u(t, x) + u(t, x - dx)) / (dx * dx);
            assert!((ut - uxx + ux).abs() < 1e-5, "residual at ({t}, {x})");
        }
    }

    #[test]
    fn f_limit_and_large_time() {
        assert_eq!(green_f_limit(0.1), 1.4);
        let r = GreenReference::new(1.0, 0.0).unwrap();
        assert_eq!(r.f_limit(0.1), 1.4);
        assert!((r.f(0.1, 50.0).unwrap() - 1.4).abs() < 1e-4);
        assert!((r.f(0.1, 1e6).unwrap() - 1.4).abs() < 1e-6);
    }

    #[test]
    fn f_matches_quadrature() {
        let r = GreenReference::new(1.0, 0.0).unwrap();
        let (t, x1) = (1.0, 0.1);
        let mut total = 0.0;
        for w in [x1, 2.0, 6.0, 20.0, 60.0].windows(2) {
            total += integrate(|x: f64| r.u(t, x).unwrap() + 1.0, w[0], w[1], 1e-14, 4, 1 << 12).value;
        }
        assert!((r.f(x1, t).unwrap() - (total - t)).abs() < 1e-7);
        assert!((r.f(x1, t).unwrap() - 1.188806618070292).abs() < 1e-12);
    }
}
