//! Truncated weight-basis model of the principal series with spectral
//! parameter T, spanned by v_n for n ∈ [−N, N]; v_n has K-weight 2n.

mod op;

pub use op::{
    chi_cutoff, op_quantize, relative_character_check, ExpMethod, OpQuadrature, OpResult, SymbolSpec,
    CHI_RADIUS,
};

use crate::sl2::{trace_pairing, LieVector};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Mass allowed within one bandwidth of the truncation edge.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightModule {
    pub t: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleVector {
    pub coeffs: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    C,
    R,
    L,
    Casimir,
}

impl Letter {
    fn bandwidth(self) -> usize {
        match self {
            Letter::C => 0,
            Letter::Casimir => 2,
            _ => 1,
        }
    }

    pub fn lie(self) -> Option<LieVector> {
        match self {
            Letter::A => Some(crate::sl2::A),
            Letter::B => Some(crate::sl2::B),
            Letter::C => Some(crate::sl2::C),
            _ => None,
        }
    }
}

impl WeightModule {
    pub fn new(t: f64, n: usize) -> Self {
        Self { t, n }
    }

    /// Default truncation ⌈3√T⌉ + 8.
    pub fn with_default_truncation(t: f64) -> Self {
        Self::new(t, (3.0 * t.sqrt()).ceil() as usize + 8)
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn index(&self, n: i64) -> Option<usize> {
        let i = n + self.n as i64;
        (0..self.dim() as i64).contains(&i).then_some(i as usize)
    }

    pub fn weight(&self, i: usize) -> i64 {
        i as i64 - self.n as i64
    }

    pub fn zero(&self) -> ModuleVector {
        ModuleVector { coeffs: vec![Complex64::default(); self.dim()] }
    }

    pub fn basis(&self, n: i64) -> ModuleVector {
        let mut v = self.zero();
        v.coeffs[self.index(n).expect("weight inside truncation")] = Complex64::new(1.0, 0.0);
        v
    }

    fn s(&self) -> Complex64 {
        Complex64::new(0.5, self.t)
    }

    /// R v_n = (iT + 1/2 + n) v_{n+1}.
    pub fn raise_coeff(&self, n: i64) -> Complex64 {
        self.s() + n as f64
    }

    /// L v_n = (iT + 1/2 − n) v_{n−1}.
    pub fn lower_coeff(&self, n: i64) -> Complex64 {
        self.s() - n as f64
    }

    fn check_boundary(&self, v: &ModuleVector, band: usize) -> Result<()> {
        if band == 0 {
            return Ok(());
        }
        let total = v.norm_sqr().max(1e-300);
        let d = self.dim();
        let edge: f64 = (0..band.min(d))
            .flat_map(|k| [k, d - 1 - k])
            .map(|i| v.coeffs[i].norm_sqr())
            .sum();
        if edge > BOUNDARY_TOL * total {
            return Err(Error::BoundaryLoss(edge / total));
        }
        Ok(())
    }

    fn apply_raw(&self, op: Letter, v: &ModuleVector) -> ModuleVector {
        let d = self.dim();
        let mut out = self.zero();
        let i = Complex64::i();
        for k in 0..d {
            let c = v.coeffs[k];
            if c == Complex64::default() {
                continue;
            }
            let n = self.weight(k);
            let up = self.raise_coeff(n) * c;
            let down = self.lower_coeff(n) * c;
            match op {
                Letter::R => {
                    if k + 1 < d {
                        out.coeffs[k + 1] += up;
                    }
                }
                Letter::L => {
                    if k > 0 {
                        out.coeffs[k - 1] += down;
                    }
                }
                Letter::A => {
                    if k + 1 < d {
                        out.coeffs[k + 1] += up;
                    }
                    if k > 0 {
                        out.coeffs[k - 1] += down;
                    }
                }
                Letter::B => {
                    if k + 1 < d {
                        out.coeffs[k + 1] += -i * up;
                    }
                    if k > 0 {
                        out.coeffs[k - 1] += i * down;
                    }
                }
                Letter::C => out.coeffs[k] += i * (2 * n) as f64 * c,
                Letter::Casimir => {}
            }
        }
        if op == Letter::Casimir {
            // Ω = −(A² + B² − C²)/4
            let a2 = self.apply_raw(Letter::A, &self.apply_raw(Letter::A, v));
            let b2 = self.apply_raw(Letter::B, &self.apply_raw(Letter::B, v));
            let c2 = self.apply_raw(Letter::C, &self.apply_raw(Letter::C, v));
            for k in 0..d {
                out.coeffs[k] = -(a2.coeffs[k] + b2.coeffs[k] - c2.coeffs[k]) / 4.0;
            }
        }
        out
    }

    pub fn apply_operator(&self, op: Letter, v: &ModuleVector) -> Result<ModuleVector> {
        self.check_boundary(v, op.bandwidth())?;
        Ok(self.apply_raw(op, v))
    }

    /// Dense matrix of a letter on the truncated space.
    pub fn matrix(&self, op: Letter) -> crate::linalg::CMat {
        let d = self.dim();
        let mut m = crate::linalg::CMat::zeros(d, d);
        for j in 0..d {
            let mut e = self.zero();
            e.coeffs[j] = Complex64::new(1.0, 0.0);
            let col = self.apply_raw(op, &e);
            for i in 0..d {
                m[(i, j)] = col.coeffs[i];
            }
        }
        m
    }

    /// ψ = Σ_{|n| ≤ √T} v_n.
    pub fn build_sharp_lift(&self) -> Result<ModuleVector> {
        self.build_smooth_lift(Profile::Indicator)
    }

    /// ψ̃ = Σ f(n/√T) v_n.
    pub fn build_smooth_lift(&self, profile: Profile) -> Result<ModuleVector> {
        let need = self.t.sqrt().ceil() as usize + 2;
        if self.n < need {
            return Err(Error::TruncationTooSmall { need, have: self.n });
        }
        let mut v = self.zero();
        let r = self.t.sqrt();
        for k in 0..self.dim() {
            let n = self.weight(k) as f64;
            let x = if profile == Profile::Indicator { n / r.floor().max(1.0) } else { n / r };
            v.coeffs[k] = Complex64::new(profile.eval(x), 0.0);
        }
        Ok(v)
    }

    /// Sharp lift translated to weights near `center`.
    pub fn shifted_sharp_lift(&self, center: i64) -> Result<ModuleVector> {
        let r = self.t.sqrt().floor() as i64;
        let mut v = self.zero();
        for n in center - r..=center + r {
            let k = self.index(n).ok_or(Error::TruncationTooSmall { need: (center.abs() + r + 2) as usize, have: self.n })?;
            v.coeffs[k] = Complex64::new(1.0, 0.0);
        }
        Ok(v)
    }

    /// ‖∏(X_j − ⟨τ, X_j⟩) v‖ / ‖v‖, with ⟨τ, X⟩ = i·tr(τX).
    pub fn localisation_defect(&self, v: &ModuleVector, tau: &LieVector, word: &[Letter]) -> Result<f64> {
        if word.len() > 3 {
            return Err(Error::Precondition("word length at most 3".into()));
        }
        let mut w = v.clone();
        for letter in word.iter().rev() {
            let x = letter.lie().ok_or_else(|| Error::Precondition("letters must be A, B or C".into()))?;
            let lambda = Complex64::new(0.0, trace_pairing(tau, &x));
            let xw = self.apply_operator(*letter, &w)?;
            for k in 0..self.dim() {
                w.coeffs[k] = xw.coeffs[k] - lambda * w.coeffs[k];
            }
        }
        Ok(w.norm() / v.norm())
    }

    /// Returns (|⟨v₁, v₂⟩|, bound) for unit vectors localised at τ₁ and τ₂,
    /// bound = 2·max_X(d₁(X) + d₂(X)) / ‖τ₁ − τ₂‖.
    pub fn orthogonality_check(
        &self,
        v1: &ModuleVector,
        tau1: &LieVector,
        v2: &ModuleVector,
        tau2: &LieVector,
    ) -> Result<(f64, f64)> {
        let (u1, u2) = (v1.normalized(), v2.normalized());
        let mut worst: f64 = 0.0;
        for x in [Letter::A, Letter::B, Letter::C] {
            let d = self.localisation_defect(&u1, tau1, &[x])? + self.localisation_defect(&u2, tau2, &[x])?;
            worst = worst.max(d);
        }
        Ok((u1.inner(&u2).norm(), 2.0 * worst / (*tau1 - *tau2).frobenius()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    Indicator,
    /// (1 − x²)³ on [−1, 1].
    Bump,
}

impl Profile {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Profile::Indicator => {
                if x.abs() <= 1.0 + 1e-12 {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Bump => {
                if x.abs() < 1.0 {
                    (1.0 - x * x).powi(3)
                } else {
                    0.0
                }
            }
        }
    }

    /// sup |f′| on [−1, 1].
    pub fn lipschitz(self) -> f64 {
        match self {
            Profile::Indicator => f64::INFINITY,
            // max of 6x(1 − x²)² at x = 1/√5
            Profile::Bump => 96.0 / (25.0 * 5f64.sqrt()),
        }
    }
}

impl ModuleVector {
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { coeffs: self.coeffs.iter().map(|z| z / n).collect() }
    }

    /// ⟨self, other⟩, linear in the first slot.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.iter().filter(|z| z.norm() > 0.0).count()
    }
}

/// ‖Av‖² + ‖Bv‖² per unit weight vector: −μ + k² when −4Ω acts by μ.
pub fn casimir_weight_identity(mu: f64, k: i64) -> f64 {
    -mu + (k * k) as f64
}
