//! e^{πT/2}K_{iT}(x) on the window T ≤ 60, x ∈ [10⁻³, 10³], and the second-moment sum of the Fourier bound.

use crate::quad::gauss_legendre;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const T_MAX: f64 = 60.0;
pub const X_MIN: f64 = 1e-3;
pub const X_MAX: f64 = 1e3;

fn check_window(t: f64, x: f64) -> Result<()> {
    if !(0.0..=T_MAX).contains(&t) || !(X_MIN..=X_MAX).contains(&x) {
        return Err(Error::OutsideWindow(format!("T = {t}, x = {x}")));
    }
    Ok(())
}

/// e^{πT/2}K_{iT}(x) from ½∫ e^{−x cosh s − iTs} ds on the line Im s = −(π/2 − η):
///
/// e^{Tη} ∫₀^∞ e^{−x sin η cosh t} cos(x cos η sinh t − Tt) dt,
///
/// with η = min(π/2, 1/T), on panels no longer than half a local oscillation.
pub fn bessel_k_scaled(t: f64, x: f64) -> Result<f64> {
    check_window(t, x)?;
    Ok(scaled_unchecked(t, x))
}

fn scaled_unchecked(t: f64, x: f64) -> f64 {
    let eta = if t > 2.0 / PI { 1.0 / t } else { PI / 2.0 };
    let (se, ce) = eta.sin_cos();
    let decay = x * se;
    let target = 45.0 + t * eta;
    let end = if decay >= target { 1.0 } else { (target / decay).acosh() };
    let (gx, gw) = gauss_legendre(24);
    let f = |s: f64| (-decay * s.cosh()).exp() * (x * ce * s.sinh() - t * s).cos();
    let mut sum = 0.0;
    let mut a = 0.0;
    while a < end {
        let mut h: f64 = 0.5;
        for _ in 0..3 {
            h = (PI / (x * (a + h).cosh() + t + 1.0)).min(0.5);
        }
        let b = (a + h).min(end);
        let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
        sum += gx.iter().zip(&gw).map(|(z, w)| w * f(m + r * z)).sum::<f64>() * r;
        a = b;
    }
    (t * eta).exp() * sum
}

/// Lanczos ln Γ(z) for Re z > 0.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let z = z - 1.0;
    let mut a = Complex64::new(C[0], 0.0);
    for (k, c) in C.iter().enumerate().skip(1) {
        a += c / (z + k as f64);
    }
    let tt = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * tt.ln() - tt + a.ln()
}

/// Power-series oracle, usable for x ≲ 5.
pub fn bessel_k_scaled_series(t: f64, x: f64) -> f64 {
    let q = x * x / 4.0;
    if t == 0.0 {
        // K₀ = −(ln(x/2) + γ)I₀ + Σ q^k H_k/(k!)²
        let euler = 0.577_215_664_901_532_9;
        let (mut term, mut i0, mut rest, mut h) = (1.0, 1.0, 0.0, 0.0);
        for k in 1..200 {
            term *= q / (k * k) as f64;
            h += 1.0 / k as f64;
            i0 += term;
            rest += term * h;
            if term < 1e-18 * i0 {
                break;
            }
        }
        return -((x / 2.0).ln() + euler) * i0 + rest;
    }
    let it = Complex64::new(0.0, t);
    let mut term = (it * (x / 2.0).ln() - ln_gamma(it + 1.0)).exp();
    let mut sum = term;
    for k in 1..400 {
        term *= q / (k as f64 * (it + k as f64));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    // K_{iT} = −π Im I_{iT}/sinh(πT)
    -PI * (PI * t / 2.0).exp() / (PI * t).sinh() * sum.im
}

/// |x²f″ + xf′ − (x² − T²)f| relative to the size of its terms, by central differences.
pub fn ode_residual(t: f64, x: f64) -> Result<f64> {
    let h = 2e-3 * x / (1.0 + t);
    let f = |s| bessel_k_scaled(t, s);
    let (fm, f0, fp) = (f(x - h)?, f(x)?, f(x + h)?);
    let d1 = (fp - fm) / (2.0 * h);
    let d2 = (fp - 2.0 * f0 + fm) / (h * h);
    let res = x * x * d2 + x * d1 - (x * x - t * t) * f0;
    let scale = (x * x * d2).abs() + (x * d1).abs() + ((x * x - t * t) * f0).abs();
    Ok(res.abs() / scale.max(1e-300))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub t: f64,
    pub x: f64,
    pub quad: f64,
    pub series: f64,
    pub rel_err: f64,
}

/// Twenty (T, x) pairs inside the window where the series is well conditioned.
pub fn spot_points() -> Vec<(f64, f64)> {
    let ts = [0.0, 0.5, 2.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0];
    let xs = [0.01, 2.5];
    ts.iter().flat_map(|&t| xs.iter().map(move |&x| (t, x))).collect()
}

pub fn validate_against_series() -> Result<Vec<SpotCheck>> {
    spot_points()
        .into_iter()
        .map(|(t, x)| {
            let quad = bessel_k_scaled(t, x)?;
            let series = bessel_k_scaled_series(t, x);
            Ok(SpotCheck { t, x, quad, series, rel_err: (quad - series).abs() / series.abs() })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub t: f64,
    /// y/N₀
    pub alpha: f64,
    pub r: usize,
    pub sum: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Σ_{1≤m≤R} T e^{πT}|K_{iT}(2πmα)|² against T^{1/3} + R, where α = y/N₀.
pub fn bessel_moment(t: f64, alpha: f64, r: usize) -> Result<MomentRow> {
    if !(0.0..=50.0).contains(&t) || r > 10_000 {
        return Err(Error::OutsideWindow(format!("T = {t}, R = {r}")));
    }
    let mut sum = 0.0;
    for m in 1..=r {
        let f = bessel_k_scaled(t, 2.0 * PI * m as f64 * alpha)?;
        sum += t * f * f;
    }
    let bound = t.cbrt() + r as f64;
    Ok(MomentRow { t, alpha, r, sum, bound, ratio: sum / bound })
}

/// R = (T + T^{1/3})/(2πα), rounded down.
pub fn natural_r(t: f64, alpha: f64) -> usize {
    ((t + t.cbrt()) / (2.0 * PI * alpha)).floor() as usize
}

/// Frozen calibration constant for the second-moment bound.
pub const MOMENT_C: f64 = 5.0;

pub const MOMENT_TS: [f64; 3] = [20.0, 30.0, 40.0];
/// α values giving R ≈ T/4, T/2, T, 2T, 4T at T = 30.
pub const MOMENT_ALPHAS: [f64; 5] = [0.7, 0.35, 0.175, 0.0875, 0.04375];

pub fn moment_corpus() -> Result<Vec<MomentRow>> {
    let mut rows = vec![];
    for &t in &MOMENT_TS {
        for &a in &MOMENT_ALPHAS {
            rows.push(bessel_moment(t, a, natural_r(t, a))?);
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCrossover {
    pub t: f64,
    pub n0: f64,
    pub y: f64,
    pub d_l: f64,
    pub first: f64,
    pub second: f64,
    pub rhs: f64,
    /// T^{1/6}N^{1/12} with N = N₀².
    pub sqrt_y_cross: f64,
}

/// D_l·((N₀T)^{1/6} + (N₀T)^{1/2}/y^{1/2}).
pub fn fourier_crossover(t: f64, n0: f64, y: f64, d_l: f64) -> FourierCrossover {
    let first = d_l * (n0 * t).powf(1.0 / 6.0);
    let second = d_l * (n0 * t).sqrt() / y.sqrt();
    FourierCrossover {
        t,
        n0,
        y,
        d_l,
        first,
        second,
        rhs: first + second,
        sqrt_y_cross: t.powf(1.0 / 6.0) * (n0 * n0).powf(1.0 / 12.0),
    }
}
