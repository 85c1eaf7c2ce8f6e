//! Formal Hecke algebra on the basis {κ_m}, the amplifier f = f₁∗f₁ + f₂∗f₂, and its spectral lower bound.

use crate::counting::primes_in;
use crate::{Error, Result};
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Finitely supported m ↦ coefficient of κ_m.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HeckeVector {
    pub coeffs: BTreeMap<u64, Complex64>,
}

impl HeckeVector {
    pub fn kappa(m: u64) -> Self {
        Self::default().with(m, Complex64::new(1.0, 0.0))
    }

    fn with(mut self, m: u64, c: Complex64) -> Self {
        self.add_term(m, c);
        self
    }

    pub fn add_term(&mut self, m: u64, c: Complex64) {
        *self.coeffs.entry(m).or_default() += c;
    }

    pub fn add(&mut self, o: &Self) {
        for (&m, &c) in &o.coeffs {
            self.add_term(m, c);
        }
    }

    pub fn get(&self, m: u64) -> Complex64 {
        self.coeffs.get(&m).copied().unwrap_or_default()
    }

    /// Support with zero coefficients removed.
    pub fn support(&self) -> Vec<u64> {
        self.coeffs.iter().filter(|(_, c)| c.norm() > 1e-12).map(|(&m, _)| m).collect()
    }

    /// Bilinear extension of κ_r ∗ κ_s.
    pub fn convolve(&self, o: &Self, p: u64) -> Result<Self> {
        let mut out = Self::default();
        for (&r, &a) in &self.coeffs {
            for (&s, &b) in &o.coeffs {
                for (m, c) in hecke_convolve(r, s, p)?.coeffs {
                    out.add_term(m, a * b * c);
                }
            }
        }
        Ok(out)
    }

    /// Σ a_m λ(m) for a multiplicative λ given on prime powers.
    pub fn eigenvalue(&self, lambda: &dyn Fn(u64) -> f64) -> Complex64 {
        self.coeffs.iter().map(|(&m, &c)| c * lambda(m)).sum()
    }
}

/// κ_r ∗ κ_s = Σ_{t | (r,s)} κ_{rs/t²}.
pub fn hecke_convolve(r: u64, s: u64, p: u64) -> Result<HeckeVector> {
    if (r * s).is_multiple_of(p) {
        return Err(Error::Precondition(format!("({r}·{s}, {p}) ≠ 1")));
    }
    let g = r.gcd(&s);
    let mut out = HeckeVector::default();
    for t in (1..=g).filter(|t| g.is_multiple_of(*t)) {
        out.add_term(r * s / (t * t), Complex64::new(1.0, 0.0));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplifier {
    pub primes: Vec<u64>,
    pub x_l: Vec<Complex64>,
    pub x_l2: Vec<Complex64>,
    pub f1: HeckeVector,
    pub f2: HeckeVector,
    /// f₁∗f₁ + f₂∗f₂ expanded in the κ_m basis.
    pub expansion: HeckeVector,
}

pub fn build_amplifier(primes: &[u64], x_l: &[Complex64], x_l2: &[Complex64], p: u64) -> Result<Amplifier> {
    if x_l.len() != primes.len() || x_l2.len() != primes.len() {
        return Err(Error::Precondition("one sign per prime".into()));
    }
    if x_l.iter().chain(x_l2).any(|x| (x.norm() - 1.0).abs() > 1e-12) {
        return Err(Error::Precondition("signs must have unit modulus".into()));
    }
    let mut f1 = HeckeVector::default();
    let mut f2 = HeckeVector::default();
    for ((&l, &a), &b) in primes.iter().zip(x_l).zip(x_l2) {
        f1.add_term(l, a);
        f2.add_term(l * l, b);
    }
    let mut expansion = f1.convolve(&f1, p)?;
    expansion.add(&f2.convolve(&f2, p)?);
    Ok(Amplifier { primes: primes.to_vec(), x_l: x_l.to_vec(), x_l2: x_l2.to_vec(), f1, f2, expansion })
}

/// The closed form for a_m, summed over ordered pairs (l₁, l₂):
/// x_{l₁²}x_{l₂²} on m = l₁²l₂², x_{l₁}x_{l₂}(1 + δ_{m=□}) on m = l₁l₂, 2·#𝒫 at m = 1.
pub fn closed_form_coefficients(primes: &[u64], x_l: &[f64], x_l2: &[f64]) -> BTreeMap<u64, f64> {
    let mut a = BTreeMap::new();
    a.insert(1, 2.0 * primes.len() as f64);
    for (i, &l1) in primes.iter().enumerate() {
        for (j, &l2) in primes.iter().enumerate() {
            let sq = if l1 == l2 { 2.0 } else { 1.0 };
            *a.entry(l1 * l2).or_insert(0.0) += x_l[i] * x_l[j] * sq;
            *a.entry(l1 * l1 * l2 * l2).or_insert(0.0) += x_l2[i] * x_l2[j];
        }
    }
    a
}

/// λ(l)² = λ(l²) + 1 and λ(l²)² = λ(l⁴) + λ(l²) + 1, extended multiplicatively.
pub fn hecke_eigenvalue(m: u64, lam: &BTreeMap<u64, f64>) -> f64 {
    let mut out = 1.0;
    let mut rest = m;
    for (&l, &t) in lam {
        let mut k = 0;
        while rest.is_multiple_of(l) {
            rest /= l;
            k += 1;
        }
        // Chebyshev recursion λ(l^{k+1}) = λ(l)λ(l^k) − λ(l^{k−1})
        let (mut prev, mut cur) = (1.0, t);
        if k == 0 {
            continue;
        }
        for _ in 1..k {
            let next = t * cur - prev;
            prev = cur;
            cur = next;
        }
        out *= cur;
    }
    if rest != 1 {
        return f64::NAN;
    }
    out
}

/// C_X = (Σ|λ(l)|)² + (Σ|λ(l²)|)².
pub fn c_x(lambdas: &[f64]) -> f64 {
    let s1: f64 = lambdas.iter().map(|t| t.abs()).sum();
    let s2: f64 = lambdas.iter().map(|t| (t * t - 1.0).abs()).sum();
    s1 * s1 + s2 * s2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifierReport {
    pub primes: Vec<u64>,
    pub grid_step: f64,
    pub grid_infimum: f64,
    pub grid_argmin: f64,
    pub draws: usize,
    pub min_cx_ratio: f64,
    pub target: f64,
    pub min_cx: f64,
    pub max_eigen_mismatch: f64,
    pub min_spectral_value: f64,
    pub table_matches: bool,
}

/// inf over a grid of [−3, 3] of |t| + |t² − 1|.
pub fn key_inequality_grid(step: f64) -> (f64, f64) {
    let n = (6.0 / step).round() as i64;
    (0..=n)
        .map(|i| -3.0 + 6.0 * i as f64 / n as f64)
        .map(|t| (t.abs() + (t * t - 1.0).abs(), t))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
}

/// Grid check of the key inequality plus `draws` seeded eigenvalue/sign draws with λ(l) ∈ [−2, 2].
pub fn amplifier_lower_bound(primes: &[u64], p: u64, draws: usize, seed: u64) -> Result<AmplifierReport> {
    let step = 1e-3;
    let (inf, arg) = key_inequality_grid(step);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = primes.len() as f64;
    let target = k * k / 8.0;
    let mut min_ratio = f64::INFINITY;
    let mut min_cx = f64::INFINITY;
    let mut mismatch: f64 = 0.0;
    let mut min_spec = f64::INFINITY;
    let mut table_ok = true;
    for _ in 0..draws {
        let lam: Vec<f64> = primes.iter().map(|_| rng.gen_range(-2.0..=2.0)).collect();
        let sign = |t: f64| if t >= 0.0 { 1.0 } else { -1.0 };
        let x1: Vec<f64> = lam.iter().map(|&t| sign(t)).collect();
        let x2: Vec<f64> = lam.iter().map(|&t| sign(t * t - 1.0)).collect();
        let c = |v: &[f64]| v.iter().map(|&s| Complex64::new(s, 0.0)).collect::<Vec<_>>();
        let amp = build_amplifier(primes, &c(&x1), &c(&x2), p)?;
        let map: BTreeMap<u64, f64> = primes.iter().copied().zip(lam.iter().copied()).collect();
        let spectral = amp.expansion.eigenvalue(&|m| hecke_eigenvalue(m, &map));
        let cx = c_x(&lam);
        mismatch = mismatch.max((spectral.re - cx).abs().max(spectral.im.abs()));
        min_cx = min_cx.min(cx);
        min_ratio = min_ratio.min(cx / target);
        let closed = closed_form_coefficients(primes, &x1, &x2);
        table_ok &= amp.expansion.support().iter().all(|m| closed.contains_key(m))
            && closed.iter().all(|(&m, &a)| (amp.expansion.get(m) - Complex64::new(a, 0.0)).norm() < 1e-12);
        // arbitrary signs: the operator stays positive
        let y1: Vec<f64> = primes.iter().map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let y2: Vec<f64> = primes.iter().map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let amp2 = build_amplifier(primes, &c(&y1), &c(&y2), p)?;
        min_spec = min_spec.min(amp2.expansion.eigenvalue(&|m| hecke_eigenvalue(m, &map)).re);
    }
    Ok(AmplifierReport {
        primes: primes.to_vec(),
        grid_step: step,
        grid_infimum: inf,
        grid_argmin: arg,
        draws,
        min_cx_ratio: min_ratio,
        target,
        min_cx,
        max_eigen_mismatch: mismatch,
        min_spectral_value: min_spec,
        table_matches: table_ok,
    })
}

/// 𝒫_X: primes in [X, 2X] coprime to p.
pub fn prime_set(x: u64, p: u64) -> Vec<u64> {
    primes_in(x, 2 * x).into_iter().filter(|&l| l != p).collect()
}
