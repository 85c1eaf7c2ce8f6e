//! Fourier transform of the symplectic measure on the orbit of T·A.
//!
//! After the φ-integral the transform becomes
//! T ∫₀^∞ J₀(α√(1+x²)) cos(βx) dx with α = 2T√(a²+b²), β = 2T|c|.
//! The head is integrated on the real line; the tail is split into Hankel
//! components whose contours are turned into the upper half plane.

use super::LieVector;
use crate::quad::composite_gl;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre order per panel.
    pub order: usize,
    /// Smallest Bessel argument at which the tail starts.
    pub z_tail: f64,
    /// Agreement required between the two truncation levels.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { order: 16, z_tail: 40.0, tol: 1e-5 }
    }
}

/// J₀ on the real line.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x > 30.0 {
        return hankel1_0(Complex64::new(x, 0.0)).re;
    }
    let m = x.ceil() as usize + 32;
    let h = PI / m as f64;
    (0..m).map(|j| (x * ((j as f64 + 0.5) * h).sin()).cos()).sum::<f64>() / m as f64
}

/// Asymptotic expansion of H₀⁽¹⁾(z) for |z| ≥ 30, |arg z| < π.
pub fn hankel1_0(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..40 {
        let kk = k as f64;
        let odd = 2.0 * kk - 1.0;
        term = term * i * (-odd * odd) / (kk * 8.0 * z);
        let size = term.norm();
        if size > last {
            break;
        }
        sum += term;
        last = size;
        if size < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * z)).sqrt() * (i * (z - PI / 4.0)).exp() * sum
}

fn truncated(alpha: f64, beta: f64, len: f64, order: usize) -> f64 {
    let panels = ((len * (alpha + beta + 1.0)) / PI).ceil().max(1.0) as usize;
    let (x, w) = composite_gl(panels, order, 0.0, len);
    let head: f64 = x
        .iter()
        .zip(&w)
        .map(|(t, wt)| wt * bessel_j0(alpha * (1.0 + t * t).sqrt()) * (beta * t).cos())
        .sum();

    let decay = alpha - beta;
    let ymax = 50.0 / decay;
    let ypanels = ((ymax * (alpha + beta + 1.0)) / PI).ceil().max(1.0) as usize;
    let (y, wy) = composite_gl(ypanels, order, 0.0, ymax);
    let i = Complex64::i();
    let mut tail = Complex64::default();
    for (yy, wt) in y.iter().zip(&wy) {
        let x = Complex64::new(len, *yy);
        let u = (1.0 + x * x).sqrt();
        let h = hankel1_0(alpha * u);
        tail += wt * i * h * ((i * beta * x).exp() + (-i * beta * x).exp());
    }
    head + 0.5 * tail.re
}

/// ∫_{O_{T·A}} e^{⟨ξ,X⟩} ω(ξ) for X with a² + b² > c².
pub fn orbit_fourier(t: f64, x: &LieVector, quad: &QuadratureSpec) -> Result<f64> {
    let alpha = 2.0 * t * (x.a * x.a + x.b * x.b).sqrt();
    let beta = 2.0 * t * x.c.abs();
    if alpha <= beta * (1.0 + 1e-9) || alpha == 0.0 {
        return Err(Error::Precondition("orbit_fourier needs a² + b² > c²".into()));
    }
    if x.frobenius() >= 1.0 {
        return Err(Error::Precondition("X outside the injectivity neighbourhood".into()));
    }
    let len = (quad.z_tail / alpha).max(1.0);
    let v1 = t * truncated(alpha, beta, len, quad.order);
    let v2 = t * truncated(alpha, beta, 2.0 * len, quad.order);
    let diff = (v1 - v2).abs();
    if diff > quad.tol * v2.abs().max(1.0) {
        return Err(Error::NonConvergence(diff));
    }
    Ok(v2)
}

/// cos(2Ts)/(2s) with s² = a² + b² − c² > 0.
pub fn orbit_fourier_closed_form(t: f64, x: &LieVector) -> f64 {
    let s = x.quadratic().sqrt();
    (2.0 * t * s).cos() / (2.0 * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::{coadjoint_act, RealGroupElement, A};

    #[test]
    fn j0_reference_values() {
        // mpmath besselj at 25 digits.
        let cases = [
            (0.0, 1.0),
            (1.0, 0.7651976865579666),
            (5.0, -0.1775967713143383),
            (25.0, 0.09626678327595812),
            (31.0, 0.05120814530454225),
            (100.0, 0.01998585030422312),
        ];
        for (x, want) in cases {
            assert!((bessel_j0(x) - want).abs() < 1e-13, "x = {x}: {}", bessel_j0(x));
        }
    }

    #[test]
    fn closed_form_on_span_of_a() {
        let q = QuadratureSpec::default();
        for t in [5.0, 10.0, 20.0] {
            for s in [0.1, 0.2] {
                let x = s * A;
                let got = orbit_fourier(t, &x, &q).unwrap();
                let want = orbit_fourier_closed_form(t, &x);
                assert!((got - want).abs() <= 1e-4 * want.abs().max(1e-3), "T={t} t={s}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn conjugation_invariance() {
        let q = QuadratureSpec::default();
        let x = 0.15 * A;
        let base = orbit_fourier(10.0, &x, &q).unwrap();
        let g = RealGroupElement::new([[1.05, 0.1], [-0.08, 0.96]]);
        let y = coadjoint_act(&g, &x).unwrap();
        let got = orbit_fourier(10.0, &y, &q).unwrap() / crate::sl2::jacobian_j(&y).sqrt();
        let want = base / crate::sl2::jacobian_j(&x).sqrt();
        assert!((got - want).abs() < 1e-3 * want.abs().max(1.0));
    }

    #[test]
    fn rejects_elliptic_and_large() {
        let q = QuadratureSpec::default();
        assert!(orbit_fourier(5.0, &LieVector::new(0.0, 0.0, 0.2), &q).is_err());
        assert!(orbit_fourier(5.0, &LieVector::new(0.9, 0.0, 0.0), &q).is_err());
    }
}
