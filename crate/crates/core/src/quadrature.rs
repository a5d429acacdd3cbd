//! Composite Gauss–Legendre quadrature with panel doubling.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`,
/// found by Newton iteration on the three-term Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if 2 * i + 1 == n {
            z = 0.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

const ORDER: usize = 20;

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Result of a composite integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// `∫|f|` on the same rule; the scale for relative tolerances.
    pub magnitude: f64,
    pub panels: usize,
    pub converged: bool,
}

/// Fixed composite rule: `panels` equal panels of 20-point Gauss–Legendre.
pub fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> (f64, f64) {
    let (xs, ws) = rule();
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let (mut sum, mut abs) = (0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        for (x, w) in xs.iter().zip(ws) {
            let v = f(mid + half * x) * w;
            sum += v;
            abs += v.abs();
        }
    }
    (sum * half, abs * half.abs())
}

/// Doubles the panel count from `start_panels` until two successive
/// results agree to `rel_tol · ∫|f|`, or `max_panels` is exceeded.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    start_panels: usize,
    max_panels: usize,
) -> Integral {
    let mut panels = start_panels.max(1);
    let (mut prev, _) = composite(&f, a, b, panels);
    loop {
        panels *= 2;
        let (value, magnitude) = composite(&f, a, b, panels);
        let converged = (value - prev).abs() <= rel_tol * magnitude;
        if converged || panels >= max_panels {
            return Integral {
                value,
                magnitude,
                panels,
                converged,
            };
        }
        prev = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1, 2, 5, 20, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n = {n}");
            for i in 0..n {
                assert_eq!(x[i], -x[n - 1 - i]);
            }
        }
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(w.iter().all(|w| (w - 1.0).abs() < 1e-15));
    }

    #[test]
    fn exact_for_polynomials_of_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(5);
        // ∫_{-1}^{1} x^8 = 2/9
        let v: f64 = x.iter().zip(&w).map(|(x, w)| x.powi(8) * w).sum();
        assert!((v - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate(|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-13, 2, 1024);
        assert!(r.converged);
        assert!((r.value - PI.sqrt()).abs() < 1e-14);
    }
}
