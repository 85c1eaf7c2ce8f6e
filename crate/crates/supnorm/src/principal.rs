//! Compact induced model I(χ) of GL₂(ℤ/pᵐ), m = 2r, with a(χ) = m.
//! Vectors are stored by their values on representatives of B\G.

use crate::padic::{
    compute_b_chi, gl2_order, inv_mod, make_character, pow_u64, subgroup_member, valuation, CycloSum, CycloValue,
    MultCharacter, PadicMatrix, Subgroup,
};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug)]
pub struct PrincipalModel {
    pub p: u64,
    pub r: u32,
    pub m: u32,
    pub chi: MultCharacter,
    pub b_chi: u64,
    modulus: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InducedVector {
    pub values: Vec<Complex64>,
}

/// Right translation by g as a monomial matrix: (g·f)(repᵢ) = χ(multᵢ)·f(rep_{targetᵢ}).
#[derive(Clone, Debug)]
pub struct Monomial {
    pub target: Vec<usize>,
    pub mult: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cell {
    pub name: String,
    pub rep: PadicMatrix,
    pub cosets: Vec<usize>,
    pub size: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CosetTable {
    pub reps: Vec<PadicMatrix>,
    pub cells: Vec<Cell>,
    pub group_order: u64,
}

impl PrincipalModel {
    /// χ sends the smallest primitive root to exp(2πi/φ(pᵐ)).
    pub fn new(p: u64, r: u32) -> Result<Self> {
        Self::with_image(p, r, 1)
    }

    pub fn with_image(p: u64, r: u32, image: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::Precondition("r ≥ 1".into()));
        }
        let m = 2 * r;
        let chi = make_character(p, m, image, Some(m))?;
        let b_chi = compute_b_chi(&chi, r)?.value;
        Ok(Self { p, r, m, chi, b_chi, modulus: pow_u64(p, m) })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn num_cosets(&self) -> usize {
        (self.modulus + self.modulus / self.p) as usize
    }

    pub fn order(&self) -> u64 {
        self.chi.order()
    }

    pub fn rep(&self, i: usize) -> PadicMatrix {
        let mm = self.modulus as i64;
        if (i as i64) < mm {
            PadicMatrix::new([1, 0, i as i64, 1], self.p, self.m)
        } else {
            PadicMatrix::new([0, -1, 1, (i as i64 - mm) * self.p as i64], self.p, self.m)
        }
    }

    /// g = b·rep: returns (coset index, exponent of χ(t₁/t₂)).
    pub fn decompose(&self, g: &PadicMatrix) -> (usize, u64) {
        let mm = self.modulus;
        let [_, _, c, d] = g.e;
        let det = g.det();
        if d % self.p != 0 {
            let di = inv_mod(d, mm).unwrap();
            let idx = c * di % mm;
            let ratio = det * di % mm * di % mm;
            (idx as usize, self.chi.exponent(ratio).unwrap())
        } else {
            let ci = inv_mod(c, mm).unwrap();
            let idx = mm + (d * ci % mm) / self.p;
            let ratio = det * ci % mm * ci % mm;
            (idx as usize, self.chi.exponent(ratio).unwrap())
        }
    }

    pub fn monomial(&self, g: &PadicMatrix) -> Monomial {
        let n = self.num_cosets();
        let mut target = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n);
        for i in 0..n {
            let (j, e) = self.decompose(&self.rep(i).mul(g));
            target.push(j);
            mult.push(e);
        }
        Monomial { target, mult }
    }

    fn chi_c(&self, e: u64) -> Complex64 {
        CycloValue::new(e, self.order()).eval()
    }

    pub fn eval(&self, f: &InducedVector, g: &PadicMatrix) -> Complex64 {
        let (i, e) = self.decompose(g);
        self.chi_c(e) * f.values[i]
    }

    pub fn group_act(&self, g: &PadicMatrix, f: &InducedVector) -> InducedVector {
        let mono = self.monomial(g);
        self.apply_monomial(&mono, f)
    }

    pub fn apply_monomial(&self, mono: &Monomial, f: &InducedVector) -> InducedVector {
        InducedVector {
            values: mono.target.iter().zip(&mono.mult).map(|(&j, &e)| self.chi_c(e) * f.values[j]).collect(),
        }
    }

    /// ⟨f₁, f₂⟩ = |G|⁻¹ Σ_G f₁ f̄₂, computed on coset representatives.
    pub fn inner(&self, f1: &InducedVector, f2: &InducedVector) -> Complex64 {
        let s: Complex64 = f1.values.iter().zip(&f2.values).map(|(a, b)| a * b.conj()).sum();
        s / self.num_cosets() as f64
    }

    pub fn norm(&self, f: &InducedVector) -> f64 {
        self.inner(f, f).re.sqrt()
    }

    pub fn from_fn<F: Fn(&PadicMatrix) -> Option<u64>>(&self, f: F) -> InducedVector {
        InducedVector {
            values: (0..self.num_cosets())
                .map(|i| f(&self.rep(i)).map_or(Complex64::default(), |e| self.chi_c(e)))
                .collect(),
        }
    }

    /// χ(det k / cd) when c and d are units.
    pub fn new_vector_exp(&self, k: &PadicMatrix) -> Option<u64> {
        let [_, _, c, d] = k.e;
        if c % self.p == 0 || d % self.p == 0 {
            return None;
        }
        let cd = inv_mod(c * d % self.modulus, self.modulus).unwrap();
        self.chi.exponent(k.det() * cd % self.modulus)
    }

    /// χ(det k / d²) on B·K(r), zero elsewhere.
    pub fn ml_vector_exp(&self, k: &PadicMatrix) -> Option<u64> {
        if valuation(k.e[2], self.p, self.m) < self.r {
            return None;
        }
        let di = inv_mod(k.e[3], self.modulus).unwrap();
        self.chi.exponent(k.det() * di % self.modulus * di % self.modulus)
    }

    pub fn new_vector(&self) -> InducedVector {
        self.from_fn(|k| self.new_vector_exp(k))
    }

    pub fn ml_vector(&self) -> InducedVector {
        self.from_fn(|k| self.ml_vector_exp(k))
    }

    /// χ̃ on D̃(r) = D(𝒪)K(r): exponent of χ(a/d).
    pub fn chi_tilde(&self, j: &PadicMatrix) -> Option<u64> {
        if valuation(j.e[1], self.p, self.m) < self.r || valuation(j.e[2], self.p, self.m) < self.r {
            return None;
        }
        let di = inv_mod(j.e[3], self.modulus)?;
        self.chi.exponent(j.e[0] * di % self.modulus)
    }

    pub fn diagonal_group(&self) -> Vec<PadicMatrix> {
        let units: Vec<u64> = (0..self.modulus).filter(|u| u % self.p != 0).collect();
        units.iter().flat_map(|&a| units.iter().map(move |&d| (a, d))).map(|(a, d)| PadicMatrix::diag(a, d, self.p, self.m)).collect()
    }

    /// D̃(r) mod pᵐ: unit diagonal, off-diagonal entries in pʳ.
    pub fn thick_torus(&self) -> Vec<PadicMatrix> {
        let pr = pow_u64(self.p, self.r);
        let off: Vec<u64> = (0..self.modulus).filter(|x| x % pr == 0).collect();
        let mut out = vec![];
        for dg in self.diagonal_group() {
            for &b in &off {
                for &c in &off {
                    out.push(PadicMatrix { e: [dg.e[0], b, c, dg.e[3]], ..dg });
                }
            }
        }
        out
    }

    fn trace_exact(&self, mono: &Monomial, twist: u64, sum: &mut CycloSum) {
        for (i, (&j, &e)) in mono.target.iter().zip(&mono.mult).enumerate() {
            if i == j {
                sum.push(CycloValue::new(e + twist, self.order()));
            }
        }
    }

    /// rank of (1/|H|) Σ_{h∈H} χ̃(h)⁻¹ π(h) as its trace.
    fn projector_rank(&self, group: &[PadicMatrix], character: impl Fn(&PadicMatrix) -> u64) -> Result<usize> {
        let mut s = CycloSum::new(self.order());
        for h in group {
            let twist = self.order() - character(h) % self.order();
            self.trace_exact(&self.monomial(h), twist, &mut s);
        }
        let v = s.eval() / group.len() as f64;
        let rank = v.re.round();
        if (v - Complex64::new(rank, 0.0)).norm() > 1e-9 {
            return Err(Error::Precondition(format!("projector trace {v} is not an integer")));
        }
        Ok(rank as usize)
    }

    /// dim I(χ)^{K_H(m,m)}; mod pᵐ the group K_H(m,m) is the diagonal torus.
    pub fn new_vector_space_dim(&self) -> Result<usize> {
        self.projector_rank(&self.diagonal_group(), |_| 0)
    }

    /// dim of the (χ̃, D̃(r))-eigenspace.
    pub fn ml_eigenspace_dim(&self) -> Result<usize> {
        self.projector_rank(&self.thick_torus(), |j| self.chi_tilde(j).unwrap())
    }

    /// Exhaustive check that every g ∈ D̃(r) acts on f_ML by χ̃(g).
    pub fn ml_is_eigenvector(&self) -> bool {
        let f = self.ml_vector();
        self.thick_torus().iter().all(|j| {
            let gf = self.group_act(j, &f);
            let c = self.chi_c(self.chi_tilde(j).unwrap());
            gf.values.iter().zip(&f.values).all(|(a, b)| (a - c * b).norm() < 1e-9)
        })
    }

    /// f(bk) = χ(t₁/t₂) f(k) for all b ∈ B(𝒪) and all k ∈ G.
    pub fn check_equivariance<F: Fn(&PadicMatrix) -> Option<u64>>(&self, f: F, group: &[PadicMatrix], borel: &[PadicMatrix]) -> bool {
        let order = self.order();
        group.iter().all(|k| {
            borel.iter().all(|b| {
                let lhs = f(&b.mul(k));
                let ratio = b.e[0] * inv_mod(b.e[3], self.modulus).unwrap() % self.modulus;
                let rhs = f(k).map(|e| (e + self.chi.exponent(ratio).unwrap()) % order);
                lhs == rhs
            })
        })
    }

    pub fn borel(&self) -> Vec<PadicMatrix> {
        let mut out = vec![];
        for dg in self.diagonal_group() {
            for x in 0..self.modulus {
                out.push(PadicMatrix { e: [dg.e[0], x, 0, dg.e[3]], ..dg });
            }
        }
        out
    }

    /// Q(v) = average of ⟨δ·v, v⟩ over K_H(m,m).
    pub fn local_period_q(&self, v: &InducedVector) -> f64 {
        let d = self.diagonal_group();
        let s: Complex64 = d.iter().map(|g| self.inner(&self.group_act(g, v), v)).sum();
        s.re / d.len() as f64
    }

    pub fn c_t(&self, t: u64) -> PadicMatrix {
        let mm = self.modulus;
        let b = self.b_chi;
        let ti = inv_mod(t, mm).unwrap();
        let half = inv_mod(2, mm).unwrap();
        let bi = inv_mod(b, mm).unwrap();
        PadicMatrix { e: [b * ti % mm, mm - half, 1, t * half % mm * bi % mm], p: self.p, k: self.m }
    }
}

pub fn double_coset_partition(p: u64, m: u32) -> Result<CosetTable> {
    if p.is_multiple_of(2) || m < 2 || m % 2 == 1 {
        return Err(Error::Precondition("need odd p and even m ≥ 2".into()));
    }
    let model = PrincipalModel::new(p, m / 2)?;
    let n = model.num_cosets();
    let reps: Vec<PadicMatrix> = (0..n).map(|i| model.rep(i)).collect();
    let diag: Vec<Monomial> = model.diagonal_group().iter().map(|d| model.monomial(d)).collect();
    let mut cells = vec![];
    let mut assigned = vec![usize::MAX; n];
    let names = (1..=m)
        .map(|i| (format!("gamma_{i}"), PadicMatrix::new([1, 0, pow_u64(p, i) as i64, 1], p, m)))
        .chain((0..=m).map(|j| (format!("tilde_gamma_{j}"), PadicMatrix::new([0, -1, 1, pow_u64(p, j) as i64], p, m))));
    for (ci, (name, rep)) in names.enumerate() {
        let (start, _) = model.decompose(&rep);
        let mut orbit: Vec<usize> = diag.iter().map(|mono| mono.target[start]).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &o in &orbit {
            if assigned[o] != usize::MAX {
                return Err(Error::PartitionFailure(format!("{name} overlaps an earlier cell")));
            }
            assigned[o] = ci;
        }
        let size = orbit.len() as u64 * (gl2_order(p, m) / n as u64);
        cells.push(Cell { name, rep, cosets: orbit, size });
    }
    if assigned.contains(&usize::MAX) {
        return Err(Error::PartitionFailure("cells do not cover B\\G".into()));
    }
    // valuation rule on every group element
    for g in PadicMatrix::enumerate_gl2(p, m) {
        let (i, _) = model.decompose(&g);
        let want = if g.val(2) >= 1 { (g.val(2) - 1) as usize } else { m as usize + g.val(3) as usize };
        if assigned[i] != want {
            return Err(Error::PartitionFailure(format!("{g:?} breaks the valuation rule")));
        }
    }
    let total: u64 = cells.iter().map(|c| c.size).sum();
    if total != gl2_order(p, m) {
        return Err(Error::PartitionFailure("cell sizes do not sum to |G|".into()));
    }
    Ok(CosetTable { reps, cells, group_order: total })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupportReport {
    pub checked: u64,
    pub nonzero: u64,
    pub exceptional: Vec<PadicMatrix>,
}

/// ⟨g·f_ML, f_ML⟩ ≠ 0 ⇒ g ∈ K(r)D(𝒪)K(r), exactly, for every g.
pub fn matrix_coeff_support_scan(model: &PrincipalModel) -> SupportReport {
    let n = model.num_cosets();
    let f: Vec<Option<u64>> = (0..n).map(|i| model.ml_vector_exp(&model.rep(i))).collect();
    let order = model.order();
    let mut report = SupportReport { checked: 0, nonzero: 0, exceptional: vec![] };
    for g in PadicMatrix::enumerate_gl2(model.p, model.m) {
        report.checked += 1;
        let mut s = CycloSum::new(order);
        for i in 0..n {
            if let Some(fi) = f[i] {
                let (j, e) = model.decompose(&model.rep(i).mul(&g));
                if let Some(fj) = f[j] {
                    s.push(CycloValue::new(e + fj + order - fi, order));
                }
            }
        }
        if !s.is_zero_exact() {
            report.nonzero += 1;
            if model.chi_tilde(&g).is_none() {
                report.exceptional.push(g);
            }
        }
    }
    report
}

/// Membership in K(r)·D(𝒪)·K(r) by explicit products, for cross-checking.
pub fn double_coset_k_d_k(model: &PrincipalModel) -> std::collections::HashSet<PadicMatrix> {
    let pr = pow_u64(model.p, model.r) as i64;
    let mm = model.modulus() as i64 / pr;
    let mut kr = vec![];
    for a in 0..mm {
        for b in 0..mm {
            for c in 0..mm {
                for d in 0..mm {
                    kr.push(PadicMatrix::new([1 + pr * a, pr * b, pr * c, 1 + pr * d], model.p, model.m));
                }
            }
        }
    }
    let mut out = std::collections::HashSet::new();
    for dg in model.diagonal_group() {
        for k in &kr {
            out.insert(dg.mul(k));
        }
    }
    let snapshot: Vec<PadicMatrix> = out.iter().copied().collect();
    for k in &kr {
        for x in &snapshot {
            out.insert(k.mul(x));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NewformRow {
    pub t: u64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NewformTable {
    pub rows: Vec<NewformRow>,
    pub sum_sq: f64,
    pub expected_abs: f64,
    pub max_translate_overlap: f64,
}

pub fn newform_decomposition(model: &PrincipalModel) -> NewformTable {
    let f0 = model.new_vector();
    let n0 = model.norm(&f0);
    let fml = model.ml_vector();
    let nml = model.norm(&fml);
    let pr = pow_u64(model.p, model.r);
    let ts: Vec<u64> = (1..pr).filter(|t| t % model.p != 0).collect();
    let translates: Vec<InducedVector> = ts.iter().map(|&t| model.group_act(&model.c_t(t), &fml)).collect();
    let mut rows = vec![];
    for (t, v) in ts.iter().zip(&translates) {
        let a = model.inner(&f0, v) / (n0 * nml);
        rows.push(NewformRow { t: *t, re: a.re, im: a.im, abs: a.norm() });
    }
    let mut overlap: f64 = 0.0;
    for i in 0..translates.len() {
        for j in 0..i {
            overlap = overlap.max(model.inner(&translates[i], &translates[j]).norm() / (nml * nml));
        }
    }
    let q = model.p as f64;
    NewformTable {
        sum_sq: rows.iter().map(|r| r.abs * r.abs).sum(),
        expected_abs: ((1.0 - 1.0 / q).recip() * q.powi(-(model.r as i32))).sqrt(),
        rows,
        max_translate_overlap: overlap,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KirillovVector {
    New,
    Ml,
    /// π(γ_a) f_ML with γ_a = ((0, −1), (1, a))
    Gamma(u64),
    /// π(γ̃_a) f_ML with γ̃_a = ((1, 0), (a, 1))
    TildeGamma(u64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WhittakerValue {
    pub p: u64,
    /// I(v, y) = sum / p^denominator_exp
    pub sum: CycloSum,
    pub denominator_exp: u32,
    /// W_v(a(y)) = χ(y)⁻¹ |y|^{1/2} I(v, y)
    pub w: (f64, f64),
}

impl WhittakerValue {
    pub fn integral(&self) -> Complex64 {
        self.sum.eval() / (self.p as f64).powi(self.denominator_exp as i32)
    }

    pub fn w(&self) -> Complex64 {
        Complex64::new(self.w.0, self.w.1)
    }

    pub fn is_zero(&self) -> bool {
        self.sum.is_zero_exact()
    }
}

impl PrincipalModel {
    fn kirillov_exp(&self, v: KirillovVector, k: &PadicMatrix) -> Option<u64> {
        let mm = self.modulus as i64;
        match v {
            KirillovVector::New => self.new_vector_exp(k),
            KirillovVector::Ml => self.ml_vector_exp(k),
            KirillovVector::Gamma(a) => self.ml_vector_exp(&k.mul(&PadicMatrix::new([0, -1, 1, a as i64 % mm], self.p, self.m))),
            KirillovVector::TildeGamma(a) => self.ml_vector_exp(&k.mul(&PadicMatrix::new([1, 0, a as i64 % mm, 1], self.p, self.m))),
        }
    }

    /// I(v, y) = I₀ + Σₙ Iₙ with y = p^{yval}·yunit and χ(p) = 1, as an exact
    /// finite character sum.
    pub fn whittaker_value(&self, v: KirillovVector, yval: i32, yunit: u64) -> Result<WhittakerValue> {
        if yunit.is_multiple_of(self.p) {
            return Err(Error::Precondition("y-unit must be a unit".into()));
        }
        let (p, m) = (self.p, self.m as i32);
        let n_max = m.max(m + yval) + 1;
        let top = (0..=n_max).map(|n| m.max(n - yval)).max().unwrap() as u32;
        let order = pow_u64(p, top.max(self.m - 1)) * (p - 1);
        let mut sum = CycloSum::new(order);
        let lift = |e: u64| e * (order / self.order());
        // ψ(−z) for z = u·p^{s}, as an exponent over `order`
        let psi_neg = |num: u64, s: i32| -> u64 {
            if s >= 0 {
                return 0;
            }
            let den = pow_u64(p, (-s) as u32);
            let e = num % den;
            (order - e * (order / den) % order) % order
        };

        // I₀ over x ∈ ℤ/pᵐ; vanishes when v(y) < −m
        if yval >= -m {
            let weight = pow_u64(p, top - self.m) as i64;
            for x in 0..self.modulus {
                let k = PadicMatrix::new([0, 1, -1, -(x as i64)], p, self.m);
                if let Some(e) = self.kirillov_exp(v, &k) {
                    sum.push_n(CycloValue::new(lift(e) + psi_neg(yunit * x, yval), order), weight);
                }
            }
        }
        // Iₙ over units x mod p^L, L = max(m, n − v(y))
        for n in 1..=n_max {
            let l = m.max(n - yval) as u32;
            let ml = pow_u64(p, l);
            let weight = pow_u64(p, top - l) as i64;
            let pn = pow_u64(p, n as u32) % self.modulus;
            for x in (0..ml).filter(|x| x % p != 0) {
                let xm = x % self.modulus;
                let k = PadicMatrix { e: [1, 0, pn * xm % self.modulus, 1], p, k: self.m };
                let Some(e) = self.kirillov_exp(v, &k) else { continue };
                let chi2 = 2 * self.chi.exponent(xm).unwrap();
                let xi = inv_mod(x, ml).unwrap();
                let ps = psi_neg(yunit * xi % ml, yval - n);
                sum.push_n(CycloValue::new(lift(e + chi2) + ps, order), weight);
            }
        }
        let integral = sum.eval() / (p as f64).powi(top as i32);
        let chi_y = CycloValue::new(self.chi.exponent(yunit % self.modulus).unwrap(), self.order()).conj().eval();
        let w = chi_y * (p as f64).powf(-(yval as f64) / 2.0) * integral;
        Ok(WhittakerValue { p, sum, denominator_exp: top, w: (w.re, w.im) })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncatedReport {
    pub dim_v: usize,
    pub expected_dim: f64,
    pub convolution_dev: f64,
    pub projector_dev: f64,
    pub orthogonal_complement_dev: f64,
    pub schur_dev: f64,
}

/// φ_v = dim V·φ_v∗φ_v and π(φ_v)w = ⟨w,v⟩v/(dim V‖v‖²) on G = GL₂(ℤ/pᵐ).
pub fn truncated_coeff_lemmas<R: Rng>(model: &PrincipalModel, v: &InducedVector, rng: &mut R) -> TruncatedReport {
    let (p, k) = (model.p, model.m);
    let mm = model.modulus() as usize;
    let group = PadicMatrix::enumerate_gl2(p, k);
    let enc = |g: &PadicMatrix| ((g.e[0] as usize * mm + g.e[1] as usize) * mm + g.e[2] as usize) * mm + g.e[3] as usize;
    let monos: Vec<Monomial> = group.iter().map(|g| model.monomial(g)).collect();
    let vv = model.inner(v, v).re;

    // V = span of the translates of v
    let n = model.num_cosets();
    let mut gram = DMatrix::<Complex64>::zeros(n, n);
    let translates: Vec<InducedVector> = monos.iter().map(|mono| model.apply_monomial(mono, v)).collect();
    for t in &translates {
        for i in 0..n {
            for j in 0..n {
                gram[(i, j)] += t.values[i] * t.values[j].conj();
            }
        }
    }
    let sv = gram.clone().singular_values();
    let dim_v = sv.iter().filter(|s| **s > 1e-8 * sv[0]).count();

    let mut phi = vec![Complex64::default(); mm.pow(4)];
    for (g, t) in group.iter().zip(&translates) {
        phi[enc(g)] = model.inner(v, t) / vv;
    }
    let inv: Vec<PadicMatrix> = group.iter().map(|g| g.inverse().unwrap()).collect();
    let size = group.len() as f64;
    let mut conv_dev: f64 = 0.0;
    for g in group.iter().step_by((group.len() / 64).max(1)) {
        let s: Complex64 = group.iter().zip(&inv).map(|(h, hi)| phi[enc(h)] * phi[enc(&hi.mul(g))]).sum();
        conv_dev = conv_dev.max((phi[enc(g)] - s * dim_v as f64 / size).norm());
    }

    let apply_phi = |w: &InducedVector| {
        let mut out = vec![Complex64::default(); n];
        for (g, mono) in group.iter().zip(&monos) {
            let gw = model.apply_monomial(mono, w);
            let c = phi[enc(g)] / size;
            for i in 0..n {
                out[i] += c * gw.values[i];
            }
        }
        InducedVector { values: out }
    };
    let mut proj_dev: f64 = 0.0;
    for _ in 0..3 {
        let w = InducedVector { values: (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect() };
        let lhs = apply_phi(&w);
        let c = model.inner(&w, v) / (dim_v as f64 * vv);
        for i in 0..n {
            proj_dev = proj_dev.max((lhs.values[i] - c * v.values[i]).norm());
        }
    }
    // w ⊥ v: Gram–Schmidt a random vector against v
    let w0 = InducedVector { values: (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect() };
    let c = model.inner(&w0, v) / vv;
    let w = InducedVector { values: w0.values.iter().zip(&v.values).map(|(a, b)| a - c * b).collect() };
    let perp = apply_phi(&w);
    let perp_dev = perp.values.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mean_sq: f64 = translates.iter().map(|t| model.inner(t, v).norm_sqr()).sum::<f64>() / size;
    let schur_dev = (mean_sq - vv * vv / dim_v as f64).abs();
    let q = p as f64;
    TruncatedReport {
        dim_v,
        expected_dim: q.powi(k as i32) * (1.0 + 1.0 / q),
        convolution_dev: conv_dev,
        projector_dev: proj_dev,
        orthogonal_complement_dev: perp_dev,
        schur_dev,
    }
}

/// Stabiliser of (D̃(r), χ̃): g with gD̃g⁻¹ = D̃ and χ̃(gjg⁻¹) = χ̃(j).
pub fn type_stabiliser(model: &PrincipalModel) -> Vec<PadicMatrix> {
    let torus = model.thick_torus();
    PadicMatrix::enumerate_gl2(model.p, model.m)
        .into_iter()
        .filter(|g| {
            let gi = g.inverse().unwrap();
            torus.iter().all(|j| {
                let c = g.mul(j).mul(&gi);
                model.chi_tilde(&c).is_some() && model.chi_tilde(&c) == model.chi_tilde(j)
            })
        })
        .collect()
}

pub fn is_in_kh(g: &PadicMatrix, m: u32) -> bool {
    subgroup_member(g, Subgroup::KH(m, m)).unwrap_or(false)
}
