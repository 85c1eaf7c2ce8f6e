//! Lie algebra sl2(R) in the basis A = diag(1,-1), B = [[0,1],[1,0]],
//! C = [[0,-1],[1,0]], its coadjoint orbits and the orbit geometry.

mod kirillov;
mod transversal;

pub use kirillov::{bessel_j0, orbit_fourier, orbit_fourier_closed_form, QuadratureSpec};
pub use transversal::{k_band_volume, transversality_size_check, BandRadii};

use crate::{Error, Result};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

pub type Mat2 = [[f64; 2]; 2];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LieVector {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub const A: LieVector = LieVector { a: 1.0, b: 0.0, c: 0.0 };
pub const B: LieVector = LieVector { a: 0.0, b: 1.0, c: 0.0 };
pub const C: LieVector = LieVector { a: 0.0, b: 0.0, c: 1.0 };

impl LieVector {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn matrix(&self) -> Mat2 {
        [[self.a, self.b - self.c], [self.b + self.c, -self.a]]
    }

    /// Reads off the traceless part of `m`.
    pub fn from_matrix(m: &Mat2) -> Self {
        Self {
            a: 0.5 * (m[0][0] - m[1][1]),
            b: 0.5 * (m[0][1] + m[1][0]),
            c: 0.5 * (m[1][0] - m[0][1]),
        }
    }

    /// a² + b² − c², which equals −det.
    pub fn quadratic(&self) -> f64 {
        self.a * self.a + self.b * self.b - self.c * self.c
    }

    pub fn frobenius(&self) -> f64 {
        (2.0 * (self.a * self.a + self.b * self.b + self.c * self.c)).sqrt()
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// Matrix exponential, via the Cayley-Hamilton closed form.
    pub fn exp(&self) -> RealGroupElement {
        let s2 = self.quadratic();
        let (ch, sh) = if s2.abs() < 1e-12 {
            (1.0 + s2 / 2.0, 1.0 + s2 / 6.0)
        } else if s2 > 0.0 {
            let s = s2.sqrt();
            (s.cosh(), s.sinh() / s)
        } else {
            let s = (-s2).sqrt();
            (s.cos(), s.sin() / s)
        };
        let m = self.matrix();
        RealGroupElement::new([
            [ch + sh * m[0][0], sh * m[0][1]],
            [sh * m[1][0], ch + sh * m[1][1]],
        ])
    }
}

impl Add for LieVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c)
    }
}

impl Sub for LieVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c)
    }
}

impl Neg for LieVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c)
    }
}

impl Mul<LieVector> for f64 {
    type Output = LieVector;
    fn mul(self, v: LieVector) -> LieVector {
        LieVector::new(self * v.a, self * v.b, self * v.c)
    }
}

/// tr(XY) = 2(aa′ + bb′ − cc′).
pub fn trace_pairing(x: &LieVector, y: &LieVector) -> f64 {
    2.0 * (x.a * y.a + x.b * y.b - x.c * y.c)
}

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut r = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    r
}

pub fn bracket(x: &LieVector, y: &LieVector) -> LieVector {
    let (mx, my) = (x.matrix(), y.matrix());
    let p = mat_mul(&mx, &my);
    let q = mat_mul(&my, &mx);
    LieVector::from_matrix(&[[p[0][0] - q[0][0], p[0][1] - q[0][1]], [p[1][0] - q[1][0], p[1][1] - q[1][1]]])
}

/// Matrix of ad_X in the basis (A, B, C); column j is [X, e_j].
pub fn ad_matrix(x: &LieVector) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for (j, e) in [A, B, C].iter().enumerate() {
        let v = bracket(x, e).to_array();
        for i in 0..3 {
            m[(i, j)] = v[i];
        }
    }
    m
}

/// j(X) = sinh²(s)/s² with s² = a² + b² − c², continued through s = 0.
pub fn jacobian_j(x: &LieVector) -> f64 {
    let s2 = x.quadratic();
    if s2.abs() < 1e-6 {
        1.0 + s2 / 3.0 + 2.0 * s2 * s2 / 45.0
    } else if s2 > 0.0 {
        let s = s2.sqrt();
        (s.sinh() / s).powi(2)
    } else {
        let s = (-s2).sqrt();
        (s.sin() / s).powi(2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealGroupElement {
    pub m: Mat2,
}

impl RealGroupElement {
    pub fn new(m: Mat2) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::new([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(mat_mul(&self.m, &o.m))
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.abs() < 1e-300 {
            return Err(Error::Singular);
        }
        let m = self.m;
        Ok(Self::new([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    pub fn diag(t: f64) -> Self {
        Self::new([[t.exp(), 0.0], [0.0, (-t).exp()]])
    }

    pub fn rotation(phi: f64) -> Self {
        Self::new([[phi.cos(), -phi.sin()], [phi.sin(), phi.cos()]])
    }

    pub fn g_vphi(v: f64, phi: f64) -> Self {
        let (ch, sh, co, si) = (v.cosh(), v.sinh(), phi.cos(), phi.sin());
        Self::new([[ch * co - sh * si, sh * co - ch * si], [sh * co + ch * si, ch * co + sh * si]])
    }

    /// Projective equality: proportional matrices are equal.
    pub fn proj_eq(&self, o: &Self, tol: f64) -> bool {
        let (x, y) = (self.m, o.m);
        let cross = |i: usize, j: usize, k: usize, l: usize| x[i][j] * y[k][l] - x[k][l] * y[i][j];
        let scale = x.iter().flatten().chain(y.iter().flatten()).map(|v| v.abs()).fold(0.0, f64::max);
        let mut ok = true;
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for (k, l) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                ok &= cross(i, j, k, l).abs() <= tol * scale * scale;
            }
        }
        ok
    }

    /// Iwasawa coordinates g = z·n(x)a(y)k(φ) with a(y) = diag(√y, 1/√y) and
    /// k(φ) the rotation by φ; requires det g > 0.
    pub fn iwasawa(&self) -> Result<(f64, f64, f64)> {
        let d = self.det();
        if d <= 0.0 {
            return Err(Error::Precondition("iwasawa needs det > 0".into()));
        }
        let s = 1.0 / d.sqrt();
        let [[a, b], [c, dd]] = self.m;
        let (a, b, c, dd) = (a * s, b * s, c * s, dd * s);
        let den = c * c + dd * dd;
        let x = (a * c + b * dd) / den;
        let y = 1.0 / den;
        Ok((x, y, c.atan2(dd)))
    }

    pub fn from_iwasawa(x: f64, y: f64, phi: f64) -> Self {
        let n = Self::new([[1.0, x], [0.0, 1.0]]);
        let a = Self::new([[y.sqrt(), 0.0], [0.0, 1.0 / y.sqrt()]]);
        n.mul(&a).mul(&Self::rotation(phi))
    }

    /// Frobenius norm of g − 1 up to the sign ambiguity of PGL(2).
    pub fn dist_to_identity(&self) -> f64 {
        let s = self.det().abs().sqrt();
        let m = self.m;
        let f = |sg: f64| {
            ((m[0][0] / s - sg).powi(2) + (m[0][1] / s).powi(2) + (m[1][0] / s).powi(2) + (m[1][1] / s - sg).powi(2)).sqrt()
        };
        f(1.0).min(f(-1.0))
    }

    /// Ad(g) as a 3×3 matrix in the basis (A, B, C).
    pub fn ad(&self) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for (j, e) in [A, B, C].iter().enumerate() {
            let v = coadjoint_act(self, e).expect("invertible").to_array();
            for i in 0..3 {
                m[(i, j)] = v[i];
            }
        }
        m
    }
}

/// Ad*_g τ = g τ g⁻¹ under the trace-pairing identification.
pub fn coadjoint_act(g: &RealGroupElement, tau: &LieVector) -> Result<LieVector> {
    let gi = g.inverse()?;
    Ok(LieVector::from_matrix(&mat_mul(&mat_mul(&g.m, &tau.matrix()), &gi.m)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OrbitClass {
    OneSheeted(f64),
    TwoSheeted(f64),
    Nilcone,
    Zero,
}

pub fn orbit_classify(tau: &LieVector) -> OrbitClass {
    orbit_classify_tol(tau, 1e-12)
}

pub fn orbit_classify_tol(tau: &LieVector, tol: f64) -> OrbitClass {
    let scale = tau.a * tau.a + tau.b * tau.b + tau.c * tau.c;
    if scale <= tol * tol {
        return OrbitClass::Zero;
    }
    let q = tau.quadratic();
    if q.abs() <= tol * scale.max(1.0) {
        OrbitClass::Nilcone
    } else if q > 0.0 {
        OrbitClass::OneSheeted(q.sqrt())
    } else {
        OrbitClass::TwoSheeted((-q).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub t: f64,
    pub v: f64,
    pub phi: f64,
}

impl OrbitPoint {
    pub fn new(t: f64, v: f64, phi: f64) -> Self {
        Self { t, v, phi: phi.rem_euclid(2.0 * PI) }
    }

    pub fn embed(&self) -> LieVector {
        tau(self.v, self.phi).scaled(self.t)
    }
}

impl LieVector {
    pub fn scaled(self, s: f64) -> Self {
        s * self
    }
}

/// τ_{v,φ} = (cosh v cos φ, cosh v sin φ, sinh v).
pub fn tau(v: f64, phi: f64) -> LieVector {
    LieVector::new(v.cosh() * phi.cos(), v.cosh() * phi.sin(), v.sinh())
}

/// Density of the normalised symplectic measure in (v, φ) coordinates.
pub fn symplectic_density(t: f64, v: f64) -> f64 {
    t * v.cosh() / (4.0 * PI)
}

/// Closed-form symplectic area of {|v| ≤ vmax, |φ| ≤ phimax}.
pub fn symplectic_area(t: f64, vmax: f64, phimax: f64) -> f64 {
    t / PI * phimax * vmax.sinh()
}

/// Level set of the K-projection for K-weight `k` on the orbit of T·A.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RelativeOrbit {
    Circle { height: f64, radius: f64 },
    Empty,
}

impl RelativeOrbit {
    pub fn point(&self, phi: f64) -> Option<LieVector> {
        match *self {
            Self::Circle { height, radius } => Some(LieVector::new(radius * phi.cos(), radius * phi.sin(), height)),
            Self::Empty => None,
        }
    }

    /// Average of `f` over the circle against the pushforward of the
    /// probability measure on K.
    pub fn average<F: Fn(LieVector) -> f64>(&self, f: F, nodes: usize) -> f64 {
        match self {
            Self::Empty => 0.0,
            _ => {
                let s: f64 = (0..nodes)
                    .map(|j| f(self.point(2.0 * PI * j as f64 / nodes as f64).unwrap()))
                    .sum();
                s / nodes as f64
            }
        }
    }
}

/// The orbit of T·A meets height c in a circle of radius √(T² + c²); for
/// a two-sheeted request (T < 0 encodes T·C) heights below |T| are empty.
pub fn relative_orbit(t: f64, k: i64) -> RelativeOrbit {
    let h = k as f64 / 2.0;
    if t > 0.0 {
        RelativeOrbit::Circle { height: h, radius: (t * t + h * h).sqrt() }
    } else {
        let s = -t;
        if h.abs() <= s {
            RelativeOrbit::Empty
        } else {
            RelativeOrbit::Circle { height: h, radius: (h * h - s * s).sqrt() }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: LieVector, y: LieVector, tol: f64) -> bool {
        (x - y).frobenius() < tol
    }

    #[test]
    fn brackets_of_basis() {
        assert!(close(bracket(&B, &C), 2.0 * A, 1e-15));
        assert!(close(bracket(&A, &A), LieVector::default(), 1e-15));
        assert!(close(bracket(&A, &B), -2.0 * C, 1e-15));
        assert!(close(bracket(&A, &C), -2.0 * B, 1e-15));
    }

    #[test]
    fn ad_of_a_matches_display() {
        let m = ad_matrix(&A);
        let want = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 0.0, -2.0, 0.0);
        assert_eq!(m, want);
        assert_eq!(ad_matrix(&LieVector::default()), Matrix3::zeros());
    }

    #[test]
    fn ad_of_nilpotent_has_zero_spectrum() {
        let m = ad_matrix(&(B + C));
        let ev = m.complex_eigenvalues();
        for z in ev.iter() {
            assert!(z.norm() < 1e-6);
        }
        assert!((m * m * m).norm() < 1e-12);
    }

    #[test]
    fn ad_eigenvalues_are_zero_and_pm_two_s() {
        let x = LieVector::new(0.7, -0.3, 0.2);
        let s = x.quadratic().sqrt();
        let mut ev: Vec<f64> = ad_matrix(&x).complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|p, q| p.partial_cmp(q).unwrap());
        assert!((ev[0] + 2.0 * s).abs() < 1e-12 && ev[1].abs() < 1e-12 && (ev[2] - 2.0 * s).abs() < 1e-12);
    }

    #[test]
    fn jacobian_values() {
        assert_eq!(jacobian_j(&LieVector::default()), 1.0);
        let t = 0.8f64;
        assert!((jacobian_j(&(t * A)) - (t.sinh() / t).powi(2)).abs() < 1e-14);
        let p = 1.3f64;
        assert!((jacobian_j(&(p * C)) - (p.sin() / p).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn jacobian_agrees_with_series_determinant() {
        let x = LieVector::new(0.4, 0.1, 0.6);
        let ad = ad_matrix(&x);
        let mut term: Matrix3<f64> = Matrix3::identity();
        let mut sum = Matrix3::identity();
        for k in 1..40 {
            term = -term * ad / (k as f64 + 1.0);
            sum += term;
        }
        assert!((sum.determinant() - jacobian_j(&x)).abs() < 1e-12);
    }

    #[test]
    fn g_vphi_conjugates_a() {
        let (v, phi) = (0.3, 0.7);
        let got = coadjoint_act(&RealGroupElement::g_vphi(v, phi), &A).unwrap();
        assert!(close(got, tau(2.0 * v, 2.0 * phi), 1e-13));
        let g0 = RealGroupElement::g_vphi(v, 0.0);
        assert!(g0.proj_eq(&(v * B).exp(), 1e-13));
    }

    #[test]
    fn tilted_circle() {
        let (t, u) = (0.2f64, 1.1f64);
        let got = coadjoint_act(&RealGroupElement::diag(t), &tau(0.0, u)).unwrap();
        let want = LieVector::new(u.cos(), (2.0 * t).cosh() * u.sin(), -(2.0 * t).sinh() * u.sin());
        assert!(close(got, want, 1e-14));
    }

    #[test]
    fn classification() {
        assert_eq!(orbit_classify(&A), OrbitClass::OneSheeted(1.0));
        assert_eq!(orbit_classify(&LieVector::default()), OrbitClass::Zero);
        assert_eq!(orbit_classify(&(B + C)), OrbitClass::Nilcone);
        assert_eq!(orbit_classify(&(2.0 * C)), OrbitClass::TwoSheeted(2.0));
    }

    #[test]
    fn symplectic_values() {
        assert!((symplectic_density(1.0, 0.0) - 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!((symplectic_density(2.0, 0.0) - 2.0 * symplectic_density(1.0, 0.0)).abs() < 1e-16);
        let (t, bp, cp) = (50.0, 8.0, 3.0);
        let area = symplectic_area(t, 1.0 / bp, 1.0 / cp);
        assert!((area * PI / (t / (bp * cp)) - 1.0).abs() < 0.01);
    }

    #[test]
    fn symplectic_area_matches_quadrature() {
        let (t, vm, pm) = (3.0, 0.9, 0.4);
        let (x, w) = crate::quad::gauss_legendre_on(30, -vm, vm);
        let num: f64 = x.iter().zip(&w).map(|(v, wt)| wt * symplectic_density(t, *v)).sum::<f64>() * 2.0 * pm;
        assert!((num - symplectic_area(t, vm, pm)).abs() < 1e-13);
    }

    #[test]
    fn relative_orbits() {
        assert_eq!(relative_orbit(3.0, 0), RelativeOrbit::Circle { height: 0.0, radius: 3.0 });
        match relative_orbit(5.0, 2) {
            RelativeOrbit::Circle { height, .. } => assert_eq!(height, 1.0),
            _ => panic!(),
        }
        assert_eq!(relative_orbit(-2.0, 2), RelativeOrbit::Empty);
        let c = relative_orbit(5.0, 4);
        let p = c.point(0.3).unwrap();
        assert!((p.quadratic() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn iwasawa_round_trip() {
        let g = RealGroupElement::new([[2.0, 0.3], [-0.7, 1.1]]);
        let (x, y, phi) = g.iwasawa().unwrap();
        assert!(y > 0.0);
        assert!(g.proj_eq(&RealGroupElement::from_iwasawa(x, y, phi), 1e-13));
    }

    #[test]
    fn singular_rejected() {
        let g = RealGroupElement::new([[1.0, 2.0], [2.0, 4.0]]);
        assert_eq!(coadjoint_act(&g, &A), Err(Error::Singular));
    }
}
