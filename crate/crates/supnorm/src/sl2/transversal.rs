//! Transversality of tilted K-circles against the K-band on the orbit.

use super::{coadjoint_act, LieVector, RealGroupElement, A};
use crate::linalg::op_norm;
use crate::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Frobenius distance from ξ to the circle K·(T·A) = {T(cos φ, sin φ, 0)},
/// by a φ-grid search followed by golden-section refinement.
pub fn dist_to_k_circle(xi: &LieVector, t: f64) -> f64 {
    let d = |phi: f64| (*xi - LieVector::new(t * phi.cos(), t * phi.sin(), 0.0)).frobenius();
    let n = 256;
    let (mut best, mut arg) = (f64::INFINITY, 0.0);
    for j in 0..n {
        let phi = 2.0 * PI * j as f64 / n as f64;
        let v = d(phi);
        if v < best {
            best = v;
            arg = phi;
        }
    }
    let h = 2.0 * PI / n as f64;
    let (mut lo, mut hi) = (arg - h, arg + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if d(m1) < d(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best.min(d(0.5 * (lo + hi)))
}

/// Returns (‖y − 1‖·‖Ad(γ) − 1‖, dist(γyτ, Kτ)) for τ = T·A.
pub fn transversality_size_check(gamma: &RealGroupElement, y: &RealGroupElement, t: f64) -> Result<(f64, f64)> {
    let ad = gamma.ad() - nalgebra::Matrix3::identity();
    let adc = DMatrix::from_fn(3, 3, |i, j| Complex64::new(ad[(i, j)], 0.0));
    let lhs = y.dist_to_identity() * op_norm(&adc);
    let xi = coadjoint_act(&gamma.mul(y), &(t * A))?;
    Ok((lhs, dist_to_k_circle(&xi, t)))
}

/// Radii of the thickened stabiliser 𝒰 = (D + O(r′)) ∩ (1 + O(r″)).
#[derive(Clone, Copy, Debug)]
pub struct BandRadii {
    pub orbit: f64,
    pub stabiliser: f64,
}

impl BandRadii {
    pub fn for_t(t: f64) -> Self {
        Self { orbit: t.powf(-0.5), stabiliser: t.powf(-0.1) }
    }
}

/// Measure of {φ ∈ [0, π) : γ k(φ) ∈ K𝒰}, tested on the unit orbit of A.
pub fn k_band_volume(gamma: &RealGroupElement, t: f64, nodes: usize) -> Result<f64> {
    let radii = BandRadii::for_t(t);
    let mut hits = 0usize;
    for j in 0..nodes {
        let phi = PI * (j as f64 + 0.5) / nodes as f64;
        let g = gamma.mul(&RealGroupElement::rotation(phi));
        let xi = coadjoint_act(&g, &A)?;
        let psi = xi.b.atan2(xi.a);
        let u = RealGroupElement::rotation(-0.5 * psi).mul(&g);
        let in_band = dist_to_k_circle(&xi, 1.0) <= radii.orbit;
        let near_one = u.dist_to_identity() <= radii.stabiliser;
        if in_band && near_one {
            hits += 1;
        }
    }
    Ok(PI * hits as f64 / nodes as f64)
}
