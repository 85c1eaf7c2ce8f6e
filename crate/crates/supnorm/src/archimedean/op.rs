use super::WeightModule;
use crate::linalg::{expm_pade13, op_norm, CMat, Tridiag};
use crate::quad::gauss_legendre_on;
use crate::sl2::{relative_orbit, LieVector};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// χ vanishes for ‖X‖_F ≥ CHI_RADIUS and equals 1 below half of it.
pub const CHI_RADIUS: f64 = 0.8;

fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

pub fn chi_cutoff(frobenius: f64) -> f64 {
    1.0 - smoothstep((frobenius / CHI_RADIUS - 0.5) / 0.5)
}

/// Gaussian symbol amp·exp(−Σ (ξᵢ − cᵢ)² / 2wᵢ²) in the (α, β, γ) coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub center: LieVector,
    pub widths: [f64; 3],
    pub amplitude: f64,
}

impl SymbolSpec {
    pub fn new(center: LieVector, widths: [f64; 3], amplitude: f64) -> Result<Self> {
        if widths.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Precondition("symbol widths must be positive".into()));
        }
        Ok(Self { center, widths, amplitude })
    }

    /// Bump at A with width h^δ″ normal to the orbit and h^δ′ along it.
    pub fn coin(h: f64, delta1: f64, delta2: f64) -> Self {
        let (w1, w2) = (h.powf(delta1), h.powf(delta2));
        Self { center: crate::sl2::A, widths: [w2, w1, w1], amplitude: 1.0 }
    }

    pub fn eval(&self, xi: &LieVector) -> f64 {
        let d = (*xi - self.center).to_array();
        let q: f64 = d.iter().zip(&self.widths).map(|(x, w)| x * x / (2.0 * w * w)).sum();
        self.amplitude * (-q).exp()
    }

    pub fn square(&self) -> Self {
        Self {
            center: self.center,
            widths: self.widths.map(|w| w / 2f64.sqrt()),
            amplitude: self.amplitude * self.amplitude,
        }
    }

    /// a^∨(Y) = π⁻³ ∫ a(ξ) e^{⟨ξ,Y⟩} dξ with ⟨ξ,Y⟩ = 2i(αa + βb − γc).
    pub fn fourier(&self, y: &LieVector) -> Complex64 {
        let [wa, wb, wc] = self.widths;
        let k = [y.a, y.b, -y.c];
        let c = self.center.to_array();
        let pref = self.amplitude * (2.0 * PI).powf(1.5) * wa * wb * wc / PI.powi(3);
        let gauss: f64 = k.iter().zip(&self.widths).map(|(k, w)| 2.0 * k * k * w * w).sum();
        let phase: f64 = 2.0 * (k[0] * c[0] + k[1] * c[1] + k[2] * c[2]);
        Complex64::from_polar(pref * (-gauss).exp(), phase)
    }

    /// h⁻³ a^∨(X/h).
    pub fn fourier_scaled(&self, x: &LieVector, h: f64) -> Complex64 {
        self.fourier(&((1.0 / h) * *x)) / h.powi(3)
    }

    /// Standard deviations of |a_h^∨| in each coordinate.
    fn spread(&self, h: f64) -> [f64; 3] {
        self.widths.map(|w| h / (2.0 * w))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpMethod {
    /// Taylor action on the needed columns only.
    Action,
    /// Dense scaling-and-squaring Padé of order 13.
    Pade13,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpQuadrature {
    pub n_rho: usize,
    pub n_c: usize,
    pub n_theta: usize,
    pub exp: ExpMethod,
    /// Column index range [start, end); `None` for all columns.
    pub columns: Option<(usize, usize)>,
    pub refine: bool,
}

impl Default for OpQuadrature {
    fn default() -> Self {
        Self { n_rho: 48, n_c: 48, n_theta: 128, exp: ExpMethod::Action, columns: None, refine: false }
    }
}

#[derive(Clone, Debug)]
pub struct OpResult {
    /// Rows are all weights; columns are `col_start..col_start + ncols`.
    pub matrix: CMat,
    pub col_start: usize,
    pub refinement_delta: Option<f64>,
}

impl OpResult {
    pub fn entry(&self, i: usize, j: usize) -> Option<Complex64> {
        (j >= self.col_start && j < self.col_start + self.matrix.ncols()).then(|| self.matrix[(i, j - self.col_start)])
    }

    pub fn is_full(&self) -> bool {
        self.matrix.nrows() == self.matrix.ncols()
    }
}

fn generator(m: &WeightModule, rho: f64, c: f64) -> Tridiag {
    let d = m.dim();
    let diag = (0..d).map(|i| Complex64::new(0.0, 2.0 * m.weight(i) as f64 * c)).collect();
    let lower = (0..d - 1).map(|i| m.raise_coeff(m.weight(i)) * rho).collect();
    let upper = (0..d - 1).map(|i| m.lower_coeff(m.weight(i + 1)) * rho).collect();
    Tridiag { diag, lower, upper }
}

fn quantize_once(sym: &SymbolSpec, h: f64, m: &WeightModule, q: &OpQuadrature, scale: f64) -> CMat {
    let d = m.dim();
    let (c0, c1) = q.columns.unwrap_or((0, d));
    let ncols = c1 - c0;
    let edge = CHI_RADIUS / 2f64.sqrt();
    let s = sym.spread(h);
    let rho_max = edge.min(9.0 * s[0].max(s[1]));
    let c_max = edge.min(9.0 * s[2]);
    let n_rho = (q.n_rho as f64 * scale).round() as usize;
    let n_c = (q.n_c as f64 * scale).round() as usize;

    // Frequencies in θ: the rows against the chosen columns, plus the
    // symbol's own angular content on the circle of radius rho_max.
    let kmin = -(c1 as i64 - 1);
    let kmax = d as i64 - 1 - c0 as i64;
    let ab = sym.center.a.hypot(sym.center.b) + 3.0 * sym.widths[0].max(sym.widths[1]);
    let freq = (2.0 * rho_max * ab / h).ceil() as usize;
    let base = (q.n_theta as f64 * scale).round() as usize;
    let n_theta = base.max(kmax.max(-kmin) as usize + freq + 32);
    let dtheta = 2.0 * PI / n_theta as f64;
    let thetas: Vec<(f64, f64)> = (0..n_theta).map(|j| (j as f64 * dtheta).sin_cos()).collect();
    let nk = (kmax - kmin + 1) as usize;

    let (rs, rw) = gauss_legendre_on(n_rho, 0.0, rho_max);
    let (cs, cw) = gauss_legendre_on(n_c, -c_max, c_max);
    let mut out = CMat::zeros(d, ncols);
    let mut g = vec![Complex64::default(); nk];
    let mut e0 = CMat::zeros(d, ncols);
    for (&rho, &wr) in rs.iter().zip(&rw) {
        for (&c, &wc) in cs.iter().zip(&cw) {
            g.iter_mut().for_each(|z| *z = Complex64::default());
            let mut any = false;
            for &(sn, cs_) in &thetas {
                // conjugating ρA + cC by π(k_{θ/2}) rotates (a, b) by −θ in this model
                let x = LieVector::new(rho * cs_, -rho * sn, c);
                let chi = chi_cutoff(x.frobenius());
                if chi == 0.0 {
                    continue;
                }
                let f = sym.fourier_scaled(&x, h) * chi * dtheta;
                if f.norm() == 0.0 {
                    continue;
                }
                any = true;
                let z = Complex64::new(cs_, sn);
                let mut zk = z.powi(kmin as i32) * f;
                for gk in g.iter_mut() {
                    *gk += zk;
                    zk *= z;
                }
            }
            if !any {
                continue;
            }
            let gen = generator(m, rho, c);
            match q.exp {
                ExpMethod::Action => {
                    let mut e = vec![Complex64::default(); d];
                    for (jc, j) in (c0..c1).enumerate() {
                        e.iter_mut().for_each(|z| *z = Complex64::default());
                        e[j] = Complex64::new(1.0, 0.0);
                        let col = gen.expm_action(&e);
                        for i in 0..d {
                            e0[(i, jc)] = col[i];
                        }
                    }
                }
                ExpMethod::Pade13 => {
                    let full = expm_pade13(&gen.to_dense());
                    e0.copy_from(&full.columns(c0, ncols));
                }
            }
            let w = wr * wc * rho;
            for (jc, j) in (c0..c1).enumerate() {
                for i in 0..d {
                    let k = (i as i64 - j as i64 - kmin) as usize;
                    out[(i, jc)] += e0[(i, jc)] * g[k] * w;
                }
            }
        }
    }
    out
}

/// Op_h(a) = ∫ χ(X) a_h^∨(X) π(e^X) dX on the truncated module, using
/// cylindrical coordinates X = Ad(k_{θ/2})(ρA + cC).
pub fn op_quantize(sym: &SymbolSpec, h: f64, m: &WeightModule, q: &OpQuadrature) -> Result<OpResult> {
    if !(h > 0.0) {
        return Err(Error::Precondition("h must be positive".into()));
    }
    let d = m.dim();
    let (c0, c1) = q.columns.unwrap_or((0, d));
    if c0 >= c1 || c1 > d {
        return Err(Error::Precondition("column range outside the module".into()));
    }
    let matrix = quantize_once(sym, h, m, q, 1.0);
    let refinement_delta = if q.refine {
        let fine = quantize_once(sym, h, m, q, 1.5);
        let delta = op_norm(&(&fine - &matrix));
        if delta > 1e-3 {
            return Err(Error::GridResolution(delta));
        }
        Some(delta)
    } else {
        None
    };
    Ok(OpResult { matrix, col_start: c0, refinement_delta })
}

/// (lhs, rhs): the diagonal entry of Op at weight k/2 against the K-average
/// of the symbol over the scaled relative orbit.
pub fn relative_character_check(
    op: &OpResult,
    m: &WeightModule,
    sym: &SymbolSpec,
    k: i64,
    h: f64,
) -> Result<(f64, f64)> {
    if k % 2 != 0 {
        return Err(Error::Precondition("k must be even".into()));
    }
    let i = m.index(k / 2).ok_or_else(|| Error::Precondition("weight outside truncation".into()))?;
    let lhs = op
        .entry(i, i)
        .ok_or_else(|| Error::Precondition("column for weight k/2 not computed".into()))?
        .re;
    let rhs = relative_orbit(m.t, k).average(|x| sym.eval(&(h * x)), 4096);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::A;

    #[test]
    fn chi_profile() {
        assert_eq!(chi_cutoff(0.0), 1.0);
        assert_eq!(chi_cutoff(0.4), 1.0);
        assert_eq!(chi_cutoff(0.8), 0.0);
        assert!((chi_cutoff(0.6) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fourier_matches_quadrature() {
        let sym = SymbolSpec::new(LieVector::new(0.3, -0.2, 0.1), [0.5, 0.7, 0.4], 1.3).unwrap();
        let y = LieVector::new(0.4, 0.9, -0.6);
        let (x, w) = gauss_legendre_on(80, -6.0, 6.0);
        let mut s = Complex64::default();
        for (xa, wa) in x.iter().zip(&w) {
            for (xb, wb) in x.iter().zip(&w) {
                for (xc, wc) in x.iter().zip(&w) {
                    let xi = LieVector::new(*xa, *xb, *xc);
                    let ph = 2.0 * (xa * y.a + xb * y.b - xc * y.c);
                    s += Complex64::from_polar(sym.eval(&xi) * wa * wb * wc, ph);
                }
            }
        }
        s /= PI.powi(3);
        assert!((s - sym.fourier(&y)).norm() < 1e-11);
    }

    #[test]
    fn coin_average_scales_like_width() {
        for t in [10.0, 100.0, 1000.0] {
            let h = 1.0 / t;
            let sym = SymbolSpec::coin(h, 0.4, 0.8);
            let avg = relative_orbit(t, 0).average(|x| sym.eval(&(h * x)), 1 << 16);
            // φ = h^δ′·u turns the profile into exp(−u²/2 − u⁴/8) as h → 0
            let (u, w) = gauss_legendre_on(200, -12.0, 12.0);
            let limit: f64 = u.iter().zip(&w).map(|(u, w)| w * (-u * u / 2.0 - u.powi(4) / 8.0).exp()).sum::<f64>() / (2.0 * PI);
            let r = avg / h.powf(0.4);
            assert!((r / limit - 1.0).abs() < 0.05, "{r} {limit}");
        }
    }

    #[test]
    fn rotation_reduction() {
        let m = WeightModule::new(4.0, 8);
        let (rho, c, th): (f64, f64, f64) = (0.35, -0.2, 1.1);
        let x = LieVector::new(rho * th.cos(), -rho * th.sin(), c);
        let mat = m.matrix(super::super::Letter::A).scale(x.a)
            + m.matrix(super::super::Letter::B).scale(x.b)
            + m.matrix(super::super::Letter::C).scale(x.c);
        let direct = expm_pade13(&mat);
        let e0 = expm_pade13(&generator(&m, rho, c).to_dense());
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let ph = Complex64::from_polar(1.0, (i as f64 - j as f64) * th);
                assert!((direct[(i, j)] - e0[(i, j)] * ph).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn action_agrees_with_pade() {
        let m = WeightModule::new(5.0, 10);
        let sym = SymbolSpec::coin(0.2, 0.4, 0.8);
        let q = OpQuadrature { n_rho: 12, n_c: 12, n_theta: 64, ..Default::default() };
        let a = op_quantize(&sym, 0.2, &m, &q).unwrap();
        let b = op_quantize(&sym, 0.2, &m, &OpQuadrature { exp: ExpMethod::Pade13, ..q }).unwrap();
        assert!(op_norm(&(&a.matrix - &b.matrix)) < 1e-9);
    }

    #[test]
    fn self_adjoint_real_symbol() {
        let t = 5.0;
        let m = WeightModule::new(t, 14);
        let q = OpQuadrature { n_rho: 24, n_c: 24, n_theta: 64, ..Default::default() };
        let op = op_quantize(&SymbolSpec::coin(1.0 / t, 0.4, 0.8), 1.0 / t, &m, &q).unwrap();
        assert!(op_norm(&(&op.matrix - op.matrix.adjoint())) < 1e-6);
    }

    #[test]
    fn constant_symbol_gives_identity() {
        let t = 5.0;
        let h = 1.0 / t;
        let m = WeightModule::new(t, 10);
        let sym = SymbolSpec::new(LieVector::default(), [20.0; 3], 1.0).unwrap();
        let q = OpQuadrature { n_rho: 32, n_c: 32, n_theta: 64, ..Default::default() };
        let op = op_quantize(&sym, h, &m, &q).unwrap();
        // interior block, away from the truncation edge
        let inner = op.matrix.view((3, 3), (15, 15)).into_owned() - CMat::identity(15, 15);
        assert!(op_norm(&inner) <= 0.05, "{}", op_norm(&inner));
    }

    #[test]
    fn spherical_entry_matches_oracle() {
        // ⟨π(e^{ρA}) v₀, v₀⟩ is the spherical function at distance 2ρ
        let t = 5.0;
        let m = WeightModule::new(t, 40);
        let rho: f64 = 0.3;
        let col = generator(&m, rho, 0.0).expm_action(&m.basis(0).coeffs);
        let r = 2.0 * rho;
        let n = 20000;
        let mut phi = Complex64::default();
        for j in 0..n {
            let th = PI * (j as f64 + 0.5) / n as f64;
            let base = r.cosh() + r.sinh() * th.cos();
            phi += Complex64::new(base.ln() * -0.5, base.ln() * t).exp();
        }
        phi /= n as f64;
        assert!((col[m.index(0).unwrap()] - phi).norm() < 1e-7);
    }

    #[test]
    fn disjoint_support_is_small() {
        let t = 20.0;
        let h = 1.0 / t;
        let m = WeightModule::new(t, 42);
        let sym = SymbolSpec::new(LieVector::new(1.0, 0.0, 0.6), [h.powf(0.8), h.powf(0.4), 0.05], 1.0).unwrap();
        let i0 = m.index(0).unwrap();
        let q = OpQuadrature { columns: Some((i0, i0 + 1)), ..Default::default() };
        let op = op_quantize(&sym, h, &m, &q).unwrap();
        let (lhs, rhs) = relative_character_check(&op, &m, &sym, 0, h).unwrap();
        assert!(lhs.abs() <= 1e-3 && rhs.abs() <= 1e-3, "{lhs} {rhs}");
    }

    #[test]
    fn relative_character_close_at_t10() {
        let t = 10.0;
        let h = 1.0 / t;
        let m = WeightModule::new(t, 27);
        let sym = SymbolSpec::coin(h, 0.4, 0.8);
        let i0 = m.index(0).unwrap();
        let q = OpQuadrature { columns: Some((i0, i0 + 1)), ..Default::default() };
        let op = op_quantize(&sym, h, &m, &q).unwrap();
        let (lhs, rhs) = relative_character_check(&op, &m, &sym, 0, h).unwrap();
        assert!((lhs - rhs).abs() < 0.035, "{lhs} {rhs}");
        assert!(sym.center == A);
    }

    #[test]
    fn odd_k_rejected() {
        let m = WeightModule::new(5.0, 10);
        let op = OpResult { matrix: CMat::zeros(21, 21), col_start: 0, refinement_delta: None };
        assert!(relative_character_check(&op, &m, &SymbolSpec::coin(0.2, 0.4, 0.8), 1, 0.2).is_err());
    }
}
