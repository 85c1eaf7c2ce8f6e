//! Counting integral matrices γ of determinant m with γz near z, sieved by
//! congruences on g_p⁻¹γg_p, and the lattice-point estimates behind the counts.

use crate::{Error, Result};
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const EPSILON: f64 = 0.1;
pub const MAX_CANDIDATES: u128 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Precondition(format!("{x} + {y}i is not in the upper half plane")));
        }
        Ok(Self { x, y })
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Möbius action of an integral matrix with positive determinant.
    pub fn act(&self, g: &[i64; 4]) -> Self {
        let z = self.z();
        let w = (z * g[0] as f64 + g[1] as f64) / (z * g[2] as f64 + g[3] as f64);
        Self { x: w.re, y: w.im }
    }
}

/// u(z,w) = |z−w|²/(Im z·Im w).
pub fn u_invariant(z: &UpperHalfPoint, w: &UpperHalfPoint) -> f64 {
    (z.z() - w.z()).norm_sqr() / (z.y * w.y)
}

/// cosh d = 1 + u/2.
pub fn hyperbolic_distance(z: &UpperHalfPoint, w: &UpperHalfPoint) -> f64 {
    (1.0 + u_invariant(z, w) / 2.0).acosh()
}

/// u(γz, z)·m·y² = |−cz² + (a−d)z + b|².
pub fn u_numerator(g: &[i64; 4], z: &UpperHalfPoint) -> f64 {
    let zz = z.z();
    (-(g[2] as f64) * zz * zz + (g[0] - g[3]) as f64 * zz + g[1] as f64).norm_sqr()
}

pub fn det(g: &[i64; 4]) -> i64 {
    g[0] * g[3] - g[1] * g[2]
}

pub fn mat_mul(a: &[i64; 4], b: &[i64; 4]) -> [i64; 4] {
    [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
}

/// Inverse of an SL₂(ℤ) matrix.
pub fn sl2_inverse(g: &[i64; 4]) -> [i64; 4] {
    [g[3], -g[1], -g[2], g[0]]
}

/// g⁻¹γg for g ∈ SL₂(ℤ).
pub fn conjugate(gamma: &[i64; 4], g: &[i64; 4]) -> [i64; 4] {
    mat_mul(&sl2_inverse(g), &mat_mul(gamma, g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sieve {
    /// L | off-diagonal entries of g_p⁻¹γg_p.
    OffDiagonal,
    /// L | diagonal entries of g_p⁻¹γg_p.
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountQuery {
    pub z: UpperHalfPoint,
    pub g_p: [i64; 4],
    pub delta: f64,
    pub l_mod: u64,
    pub m: u64,
}

impl CountQuery {
    fn validate(&self) -> Result<()> {
        if det(&self.g_p) != 1 {
            return Err(Error::Precondition("g_p must lie in SL₂(ℤ)".into()));
        }
        if !(self.delta > 0.0) || self.l_mod == 0 || self.m == 0 {
            return Err(Error::Precondition("need δ′ > 0, L ≥ 1, m ≥ 1".into()));
        }
        Ok(())
    }
}

pub fn passes_sieve(gamma: &[i64; 4], g_p: &[i64; 4], l_mod: u64, sieve: Sieve) -> bool {
    let h = conjugate(gamma, g_p);
    let l = l_mod as i64;
    match sieve {
        Sieve::OffDiagonal => h[1] % l == 0 && h[2] % l == 0,
        Sieve::Diagonal => h[0] % l == 0 && h[3] % l == 0,
    }
}

/// Number of (c, a−d, b) triples the search box visits.
pub fn box_size(z: &UpperHalfPoint, delta: f64, m: u64) -> u128 {
    let mf = m as f64;
    let cmax = (mf * (2.0 + delta)).sqrt() / z.y;
    let r = (mf * delta).sqrt();
    let nc = 2 * cmax.floor() as u128 + 1;
    let na = 2 * r.ceil() as u128 + 3;
    let nb = 2 * (r * z.y).ceil() as u128 + 3;
    nc * na * nb
}

/// Every γ ∈ Mat₂(ℤ) with det γ = m and u(γz, z) ≤ δ′.
///
/// The box: ‖g_z⁻¹γg_z‖²_F = m(2 + u) bounds |c|y, the imaginary part of
/// −cz² + (a−d)z + b bounds a−d around 2cx, and its real part bounds b.
pub fn enumerate(z: &UpperHalfPoint, delta: f64, m: u64) -> Result<Vec<[i64; 4]>> {
    let size = box_size(z, delta, m);
    if size > MAX_CANDIDATES {
        return Err(Error::BoxOverflow(size));
    }
    let mf = m as f64;
    let mi = m as i64;
    let bound = mf * delta * z.y * z.y;
    let r = (mf * delta).sqrt();
    let cmax = ((mf * (2.0 + delta)).sqrt() / z.y).floor() as i64;
    let (x, y) = (z.x, z.y);
    let mut out = vec![];
    for c in -cmax..=cmax {
        let cf = c as f64;
        let a_lo = (2.0 * cf * x - r).floor() as i64 - 1;
        let a_hi = (2.0 * cf * x + r).ceil() as i64 + 1;
        for a_minus_d in a_lo..=a_hi {
            let af = a_minus_d as f64;
            let re0 = -cf * (x * x - y * y) + af * x;
            let b_lo = (-re0 - r * y).floor() as i64 - 1;
            let b_hi = (-re0 + r * y).ceil() as i64 + 1;
            for b in b_lo..=b_hi {
                // (a+d)² = (a−d)² + 4(m + bc)
                let disc = a_minus_d * a_minus_d + 4 * (mi + b * c);
                if disc < 0 {
                    continue;
                }
                let s = disc.isqrt();
                if s * s != disc {
                    continue;
                }
                for tr in if s == 0 { vec![0] } else { vec![s, -s] } {
                    if (tr + a_minus_d) % 2 != 0 {
                        continue;
                    }
                    let g = [(tr + a_minus_d) / 2, b, c, (tr - a_minus_d) / 2];
                    if u_numerator(&g, z) <= bound {
                        out.push(g);
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn count_with(q: &CountQuery, sieve: Sieve) -> Result<u64> {
    q.validate()?;
    Ok(enumerate(&q.z, q.delta, q.m)?.iter().filter(|g| passes_sieve(g, &q.g_p, q.l_mod, sieve)).count() as u64)
}

/// M(z, g_p; δ′, L, m).
pub fn count_m(q: &CountQuery) -> Result<u64> {
    count_with(q, Sieve::OffDiagonal)
}

/// M^op(z, g_p; δ′, L, m).
pub fn count_m_op(q: &CountQuery) -> Result<u64> {
    count_with(q, Sieve::Diagonal)
}

/// tr² = 4 det with c ≠ 0.
pub fn is_parabolic_noncentral(g: &[i64; 4]) -> bool {
    let t = g[0] + g[3];
    t * t == 4 * det(g) && g[2] != 0
}

/// ξ ∈ SL₂(ℤ) with ξγξ⁻¹ = ((a, b′), (0, a)); returns (ξ, b′).
pub fn parabolic_normal_form(g: &[i64; 4]) -> Option<([i64; 4], i64)> {
    let t = g[0] + g[3];
    if t * t != 4 * det(g) || t % 2 != 0 {
        return None;
    }
    let a = t / 2;
    // kernel of γ − a: rows (g0−a, g1), (g2, g3−a)
    let (r0, r1) = if g[0] - a != 0 || g[1] != 0 { (g[0] - a, g[1]) } else { (g[2], g[3] - a) };
    if r0 == 0 && r1 == 0 {
        return None;
    }
    let (e1, e2) = (r1, -r0);
    let gd = e1.gcd(&e2);
    let (e1, e2) = (e1 / gd, e2 / gd);
    // ξ⁻¹ = ((e1, f1), (e2, f2)) with e1f2 − f1e2 = 1
    let eg = e1.extended_gcd(&e2);
    let (f2, f1) = (eg.x * eg.gcd.signum(), -eg.y * eg.gcd.signum());
    let xi_inv = [e1, f1, e2, f2];
    let xi = sl2_inverse(&xi_inv);
    let h = mat_mul(&xi, &mat_mul(g, &xi_inv));
    (h[2] == 0 && h[0] == a && h[3] == a).then_some((xi, h[1]))
}

/// Lagrange–Gauss reduced basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub b1: Complex64,
    pub b2: Complex64,
}

fn cross(u: Complex64, v: Complex64) -> f64 {
    (u.conj() * v).im
}

fn dot(u: Complex64, v: Complex64) -> f64 {
    (u.conj() * v).re
}

impl Lattice {
    pub fn new(b1: Complex64, b2: Complex64) -> Result<Self> {
        let (b1, b2) = reduce(b1, b2)?;
        Ok(Self { b1, b2 })
    }

    /// Λ_z = zℤ + ℤ.
    pub fn standard(z: &UpperHalfPoint) -> Self {
        Self::new(z.z(), Complex64::new(1.0, 0.0)).unwrap()
    }

    pub fn lambda1(&self) -> f64 {
        self.b1.norm()
    }

    pub fn covolume(&self) -> f64 {
        cross(self.b1, self.b2).abs()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { b1: self.b1 * s, b2: self.b2 * s }
    }
}

fn reduce(b1: Complex64, b2: Complex64) -> Result<(Complex64, Complex64)> {
    if !(cross(b1, b2).abs() > 1e-12 * b1.norm() * b2.norm()) {
        return Err(Error::Degenerate);
    }
    let (mut u, mut w) = (b1, b2);
    loop {
        if w.norm_sqr() < u.norm_sqr() {
            std::mem::swap(&mut u, &mut w);
        }
        let mu = dot(u, w) / u.norm_sqr();
        if mu.abs() <= 0.5 {
            return Ok((u, w));
        }
        w -= u * mu.round();
    }
}

/// (λ₁, covolume) by Lagrange–Gauss reduction.
pub fn gauss_reduce(b1: Complex64, b2: Complex64) -> Result<(f64, f64)> {
    let (u, w) = reduce(b1, b2)?;
    Ok((u.norm(), cross(u, w).abs()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallCount {
    pub count: u64,
    pub lambda1: f64,
    pub covolume: f64,
    /// 1 + R/λ₁ + R²/V, or 1 + R²/V for primitive points.
    pub bound: f64,
    pub ratio: f64,
}

/// #Λ ∩ B_center(R), or only primitive points.
pub fn ball_count(lattice: &Lattice, center: Complex64, radius: f64, primitive: bool) -> Result<BallCount> {
    let (b1, b2) = (lattice.b1, lattice.b2);
    let l1 = lattice.lambda1();
    if radius > 1e6 * l1 {
        return Err(Error::OutsideWindow(format!("R = {radius} exceeds 10⁶·λ₁")));
    }
    let d = cross(b1, b2);
    let k2c = cross(b1, center) / d;
    let k2r = radius * b1.norm() / d.abs();
    let mu = dot(b1, b2) / b1.norm_sqr();
    let mut count = 0u64;
    for k2 in (k2c - k2r).floor() as i64..=(k2c + k2r).ceil() as i64 {
        let k1c = dot(b1, center) / b1.norm_sqr() - k2 as f64 * mu;
        let k1r = radius / b1.norm();
        for k1 in (k1c - k1r).floor() as i64..=(k1c + k1r).ceil() as i64 {
            let pt = b1 * k1 as f64 + b2 * k2 as f64;
            if (pt - center).norm() > radius {
                continue;
            }
            if primitive && k1.gcd(&k2) != 1 {
                continue;
            }
            count += 1;
        }
    }
    let v = lattice.covolume();
    let bound = if primitive { 1.0 + radius * radius / v } else { 1.0 + radius / l1 + radius * radius / v };
    Ok(BallCount { count, lambda1: l1, covolume: v, bound, ratio: count as f64 / bound })
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
}

/// Distinct m = l₁ⁱl₂ⁱ with l₁, l₂ ∈ 𝒫_X = primes in [X, 2X] other than p.
pub fn amplifier_determinants(x: u64, p: u64) -> Vec<u64> {
    let ps: Vec<u64> = primes_in(x, 2 * x).into_iter().filter(|&l| l != p).collect();
    let mut ms = vec![];
    for (i, &a) in ps.iter().enumerate() {
        for &b in &ps[i..] {
            ms.push(a * b);
            ms.push(a * a * b * b);
        }
    }
    ms.sort();
    ms.dedup();
    ms
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryRow {
    pub z: (f64, f64),
    pub g_p: [i64; 4],
    pub g_p_hash: String,
    pub delta: f64,
    pub x: u64,
    pub p: u64,
    pub l: u32,
    pub m_range: (u64, u64),
    /// Σ m^{−1/2} M(z, g_p; δ′, p^l, m).
    pub sum: f64,
    pub bound: f64,
    pub ratio: f64,
    /// M(z, g_p; δ′, p^l, 1) against 1 + √δ′·y/p^l.
    pub m1_count: u64,
    pub m1_ratio: f64,
    /// max over m of M / (m^ε(1 + m δ′^{1/4} + √(mδ′)y)), with L and g_p dropped.
    pub is_ratio: f64,
    pub parabolic: u64,
    pub parabolic_divisible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub rows: Vec<CorollaryRow>,
    pub max_ratio: f64,
    pub max_m1_ratio: f64,
    pub max_is_ratio: f64,
    pub parabolic_total: u64,
    pub parabolic_all_divisible: bool,
}

pub fn g_p_hash(g: &[i64; 4]) -> String {
    format!("{}_{}_{}_{}", g[0], g[1], g[2], g[3])
}

/// A seeded word in S and Tᵏ, |k| ≤ 3, of length `len`.
pub fn random_sl2z<R: Rng>(rng: &mut R, len: usize) -> [i64; 4] {
    let mut g = [1, 0, 0, 1];
    for _ in 0..len {
        let k = rng.gen_range(-3..=3);
        g = mat_mul(&g, &[1, k, 0, 1]);
        g = mat_mul(&g, &[0, -1, 1, 0]);
    }
    g
}

pub fn corollary_bound(x: u64, delta: f64, y: f64, p: u64, l: u32) -> f64 {
    let (xf, pl) = (x as f64, (p as f64).powi(l as i32));
    xf.powf(1.0 + EPSILON) + xf.powf(2.0 + EPSILON) * delta.sqrt() * y / pl + xf.powf(4.0 + EPSILON) * delta / pl
}

/// Brute-force sums for each z, g_p and l; the candidate sets are shared across g_p and l.
pub fn verify_counting_corollary(zs: &[UpperHalfPoint], g_ps: &[[i64; 4]], x: u64, p: u64, ls: &[u32], delta: f64) -> Result<CorollaryReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition("need 0 < δ′ < 1".into()));
    }
    let ms = amplifier_determinants(x, p);
    let mut rows = vec![];
    for z in zs {
        if z.y < 2.0 {
            return Err(Error::Precondition("the y ≫ 1 regime is fixed as y ≥ 2".into()));
        }
        let cands: Vec<(u64, Vec<[i64; 4]>)> = ms.iter().map(|&m| enumerate(z, delta, m).map(|c| (m, c))).collect::<Result<_>>()?;
        let ones = enumerate(z, delta, 1)?;
        let is_ratio = cands
            .iter()
            .map(|(m, c)| {
                let mf = *m as f64;
                c.len() as f64 / (mf.powf(EPSILON) * (1.0 + mf * delta.powf(0.25) + (mf * delta).sqrt() * z.y))
            })
            .fold(0.0, f64::max);
        for g in g_ps {
            if det(g) != 1 {
                return Err(Error::Precondition("g_p must lie in SL₂(ℤ)".into()));
            }
            for &l in ls {
                let pl = p.pow(l);
                let mut sum = 0.0;
                let mut parabolic = 0;
                let mut divisible = true;
                for (m, c) in &cands {
                    let kept: Vec<&[i64; 4]> = c.iter().filter(|h| passes_sieve(h, g, pl, Sieve::OffDiagonal)).collect();
                    sum += kept.len() as f64 / (*m as f64).sqrt();
                    for h in kept.iter().filter(|h| is_parabolic_noncentral(h)) {
                        parabolic += 1;
                        match parabolic_normal_form(h) {
                            Some((_, b)) if b % pl as i64 == 0 => {}
                            _ => divisible = false,
                        }
                    }
                }
                let m1 = ones.iter().filter(|h| passes_sieve(h, g, pl, Sieve::OffDiagonal)).count() as u64;
                let bound = corollary_bound(x, delta, z.y, p, l);
                rows.push(CorollaryRow {
                    z: (z.x, z.y),
                    g_p: *g,
                    g_p_hash: g_p_hash(g),
                    delta,
                    x,
                    p,
                    l,
                    m_range: (ms[0], *ms.last().unwrap()),
                    sum,
                    bound,
                    ratio: sum / bound,
                    m1_count: m1,
                    m1_ratio: m1 as f64 / (1.0 + delta.sqrt() * z.y / pl as f64),
                    is_ratio,
                    parabolic,
                    parabolic_divisible: divisible,
                });
            }
        }
    }
    let fold = |f: fn(&CorollaryRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(CorollaryReport {
        max_ratio: fold(|r| r.ratio),
        max_m1_ratio: fold(|r| r.m1_ratio),
        max_is_ratio: fold(|r| r.is_ratio),
        parabolic_total: rows.iter().map(|r| r.parabolic).sum(),
        parabolic_all_divisible: rows.iter().all(|r| r.parabolic_divisible),
        rows,
    })
}

/// Fixed corpus: y ∈ {2, 5, 20} with seeded x ∈ [−½, ½], ten seeded g_p, l ∈ {0, 1}, p = 3.
pub fn corpus(seed: u64) -> (Vec<UpperHalfPoint>, Vec<[i64; 4]>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zs = [2.0, 5.0, 20.0].iter().map(|&y| UpperHalfPoint { x: rng.gen_range(-0.5..0.5), y }).collect();
    let gs = (0..10).map(|_| random_sl2z(&mut rng, 3)).collect();
    (zs, gs)
}

pub const CORPUS_DELTA: f64 = 0.05;
pub const CORPUS_SEED: u64 = 2024;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_examples() {
        let i = UpperHalfPoint::new(0.0, 1.0).unwrap();
        let two_i = UpperHalfPoint::new(0.0, 2.0).unwrap();
        assert_eq!(u_invariant(&i, &i), 0.0);
        assert!((u_invariant(&i, &two_i) - 0.5).abs() < 1e-15);
        assert!(UpperHalfPoint::new(0.0, -1.0).is_err());
    }

    #[test]
    fn u_numerator_matches_invariant() {
        let z = UpperHalfPoint::new(0.3, 1.7).unwrap();
        let g = [2, 1, 3, 5];
        let m = det(&g) as f64;
        let lhs = u_invariant(&z.act(&g), &z);
        assert!((lhs - u_numerator(&g, &z) / (m * z.y * z.y)).abs() < 1e-12);
    }

    #[test]
    fn stabilizer_of_i() {
        let q = CountQuery { z: UpperHalfPoint::new(0.0, 1.0).unwrap(), g_p: [1, 0, 0, 1], delta: 0.1, l_mod: 1, m: 1 };
        assert_eq!(count_m(&q).unwrap(), 4);
    }

    #[test]
    fn gauss_examples() {
        let (l, v) = gauss_reduce(Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!((l, v), (1.0, 1.0));
        let (l, v) = gauss_reduce(Complex64::new(0.5, 2.0), Complex64::new(1.0, 0.0)).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (v - 2.0).abs() < 1e-15);
        assert!(gauss_reduce(Complex64::new(1.0, 1.0), Complex64::new(2.0, 2.0)).is_err());
    }

    #[test]
    fn ball_examples() {
        let z2 = Lattice::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!(ball_count(&z2, Complex64::default(), 2.5, false).unwrap().count, 21);
        assert_eq!(ball_count(&z2, Complex64::default(), 2.5, true).unwrap().count, 16);
        assert!(ball_count(&z2, Complex64::default(), 0.5, true).unwrap().count <= 2);
    }

    #[test]
    fn parabolic_form() {
        let g = [3, 1, -1, 1];
        let (xi, b) = parabolic_normal_form(&g).unwrap();
        assert_eq!(det(&xi), 1);
        assert_eq!(b.abs(), 1);
        assert!(parabolic_normal_form(&[2, 0, 0, 3]).is_none());
    }

    #[test]
    fn determinants() {
        assert_eq!(primes_in(5, 10), vec![5, 7]);
        assert_eq!(amplifier_determinants(5, 3), vec![25, 35, 49, 625, 1225, 2401]);
    }
}
