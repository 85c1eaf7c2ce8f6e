//! Torus-thickened volumes V_γ(𝒰) in K₀ = GL₂(ℤ_p), the distance to H(2n) = D(𝒪)K(2n),
//! and the matrix-coefficient exponent table for the new vector.
//! All volumes are relative to vol(H(2n)).

use crate::padic::{gl2_order, non_residue, pow_u64, valuation, PadicMatrix, ResidueInt};
use crate::principal::{InducedVector, PrincipalModel};
use crate::{Error, Result};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorusKind {
    SplitConjugate { b_chi: u64 },
    Nonsplit { d: u64 },
}

/// T = {((a, u₁b), (u₂b, a))} mod pⁿ; 𝒰 = T(𝒪)K(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusSpec {
    pub kind: TorusKind,
    pub p: u64,
    pub n: u32,
}

impl TorusSpec {
    pub fn split_conjugate(p: u64, n: u32, b_chi: u64) -> Result<Self> {
        if b_chi.is_multiple_of(p) {
            return Err(Error::Precondition("b_chi must be a unit".into()));
        }
        Ok(Self { kind: TorusKind::SplitConjugate { b_chi: b_chi % pow_u64(p, n) }, p, n })
    }

    /// The torus around which c₁·f_ML localises, with n = r.
    pub fn from_model(model: &PrincipalModel) -> Result<Self> {
        Self::split_conjugate(model.p, model.r, model.b_chi)
    }

    /// D is the smallest quadratic non-residue.
    pub fn nonsplit(p: u64, n: u32) -> Self {
        Self { kind: TorusKind::Nonsplit { d: non_residue(p) }, p, n }
    }

    pub fn modulus(&self) -> u64 {
        pow_u64(self.p, self.n)
    }

    pub fn units(&self) -> (u64, u64) {
        let q = self.modulus();
        match self.kind {
            TorusKind::SplitConjugate { b_chi } => (b_chi, crate::padic::inv_mod(b_chi, q).unwrap()),
            TorusKind::Nonsplit { d } => (1, d % q),
        }
    }

    pub fn elements(&self) -> Vec<PadicMatrix> {
        let q = self.modulus();
        let (u1, u2) = self.units();
        let mut out = vec![];
        for a in 0..q {
            for b in 0..q {
                let g = PadicMatrix { e: [a, u1 * b % q, u2 * b % q, a], p: self.p, k: self.n };
                if g.is_invertible() {
                    out.push(g);
                }
            }
        }
        out
    }

    /// D(ℤ/pⁿ)·T as a set of entry arrays.
    pub fn dt_set(&self) -> HashSet<[u64; 4]> {
        let q = self.modulus();
        let units: Vec<u64> = (1..q).filter(|u| u % self.p != 0).collect();
        let t = self.elements();
        let mut s = HashSet::new();
        for &x in &units {
            for &y in &units {
                for g in &t {
                    s.insert([x * g.e[0] % q, x * g.e[1] % q, y * g.e[2] % q, y * g.e[3] % q]);
                }
            }
        }
        s
    }
}

/// d_{H(2n)}(γ) = q^{−l}; `l = None` means γ ∈ H(2n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DistanceValue {
    pub l: Option<u32>,
}

impl DistanceValue {
    pub fn value(&self, q: u64) -> f64 {
        self.l.map_or(0.0, |l| (q as f64).powi(-(l as i32)))
    }

    pub fn label(&self) -> String {
        self.l.map_or("inf".to_string(), |l| l.to_string())
    }
}

/// γ ∈ D(𝒪)K(l) iff both off-diagonal entries lie in pˡ.
pub fn distance_dh(gamma: &PadicMatrix, n: u32) -> Result<DistanceValue> {
    if gamma.k < 2 * n {
        return Err(Error::ModulusMismatch(gamma.modulus(), pow_u64(gamma.p, 2 * n)));
    }
    let g = gamma.reduce(2 * n);
    if !g.is_invertible() {
        return Err(Error::Precondition("γ must lie in K₀".into()));
    }
    let l = g.val(1).min(g.val(2));
    Ok(DistanceValue { l: (l < 2 * n).then_some(l) })
}

/// V_γ(𝒰)/vol(H(2n)) = #{α ∈ (ℤ/pⁿ)^× : γ·diag(α,1) ∈ D·T mod pⁿ} / φ(pⁿ).
pub fn volume_count(gamma: &PadicMatrix, torus: &TorusSpec) -> Result<Ratio<u64>> {
    let dt = torus.dt_set();
    volume_count_with(gamma, torus, &dt)
}

pub fn volume_count_with(gamma: &PadicMatrix, torus: &TorusSpec, dt: &HashSet<[u64; 4]>) -> Result<Ratio<u64>> {
    let (hits, units) = alpha_hits(gamma, torus, dt)?;
    Ok(Ratio::new(hits, units))
}

fn alpha_hits(gamma: &PadicMatrix, torus: &TorusSpec, dt: &HashSet<[u64; 4]>) -> Result<(u64, u64)> {
    if gamma.p != torus.p {
        return Err(Error::ModulusMismatch(gamma.p, torus.p));
    }
    if gamma.k < torus.n {
        return Err(Error::ModulusMismatch(gamma.modulus(), torus.modulus()));
    }
    let q = torus.modulus();
    let g = gamma.reduce(torus.n);
    let mut hits = 0;
    let mut units = 0;
    for a in (1..q).filter(|a| a % torus.p != 0) {
        units += 1;
        if dt.contains(&[g.e[0] * a % q, g.e[1], g.e[2] * a % q, g.e[3]]) {
            hits += 1;
        }
    }
    Ok((hits, units))
}

/// #{α = 1+z : z ∈ pℤ/pⁿ, c₂α² ≡ c₀ mod pⁿ}.
pub fn quadratic_count(c2: &ResidueInt, c0: &ResidueInt, n: u32) -> Result<u64> {
    if c2.p != c0.p || c2.k < n || c0.k < n {
        return Err(Error::ModulusMismatch(c2.modulus(), c0.modulus()));
    }
    let l = c2.reduce(n).valuation();
    if l > n {
        return Err(Error::Precondition("need v(c₂) ≤ n".into()));
    }
    let q = pow_u64(c2.p, n);
    let (a, b) = (c2.value % q, c0.value % q);
    Ok((0..q)
        .step_by(c2.p as usize)
        .filter(|z| {
            let al = (1 + z) % q;
            (a * al % q * al % q + q - b).is_multiple_of(q)
        })
        .count() as u64)
}

/// p^⌈(n+l)/2⌉.
pub fn quadratic_bound(p: u64, n: u32, l: u32) -> u64 {
    pow_u64(p, (n + l).div_ceil(2))
}

/// q·max_{γ′∈{γ,wγ}} min(q^{−n/2} d(γ′)^{−1/2}, 1), with d = 0 read as 1 inside the min.
pub fn volume_bound(q: u64, n: u32, d: DistanceValue, dw: DistanceValue) -> f64 {
    let term = |d: DistanceValue| match d.l {
        None => 1.0,
        Some(l) => (q as f64).powf((l as f64 - n as f64) / 2.0).min(1.0),
    };
    q as f64 * term(d).max(term(dw))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeRow {
    pub gamma_class: String,
    pub l: String,
    pub count: u64,
    pub bound: f64,
    pub ratio: f64,
}

/// Index computations mod p^{2n} with vol(K₀) = 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeIndices {
    pub vol_h: f64,
    pub vol_u: f64,
    pub vol_u_cap_h: f64,
    /// vol(𝒰∩H)/(vol(H)·vol(𝒰)).
    pub ratio: f64,
    pub log_q_vol_h: f64,
    pub log_q_vol_u: f64,
    pub log_q_vol_u_cap_h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeBoundReport {
    pub p: u64,
    pub n: u32,
    pub torus: TorusSpec,
    pub exhaustive: bool,
    pub checked: u64,
    pub rows: Vec<VolumeRow>,
    /// max V_γ/(vol H · bound) over all γ.
    pub constant: f64,
    pub w_invariance_failures: u64,
    pub monotone: bool,
    pub indices: VolumeIndices,
    /// max over γ of I_γ(|f|) bound from the volume ratios, divided by qⁿ.
    pub max_i_gamma_over_qn: f64,
}

pub fn volume_indices(torus: &TorusSpec) -> VolumeIndices {
    let (p, n) = (torus.p, torus.n);
    let q = p as f64;
    let g = gl2_order(p, 2 * n) as f64;
    let phi2n = (pow_u64(p, 2 * n) - pow_u64(p, 2 * n - 1)) as f64;
    let t_count = torus.elements().len() as f64;
    let kernel = (pow_u64(p, n) as f64).powi(4);
    let vol_h = phi2n * phi2n / g;
    let vol_u = t_count * kernel / g;
    let vol_u_cap_h = phi2n * pow_u64(p, n) as f64 / g;
    VolumeIndices {
        vol_h,
        vol_u,
        vol_u_cap_h,
        ratio: vol_u_cap_h / (vol_h * vol_u),
        log_q_vol_h: vol_h.ln() / q.ln(),
        log_q_vol_u: vol_u.ln() / q.ln(),
        log_q_vol_u_cap_h: vol_u_cap_h.ln() / q.ln(),
    }
}

/// Exhaustive over GL₂(ℤ/p^{2n}) when n = 1, otherwise `samples` seeded uniform draws.
pub fn verify_volume_bound(torus: &TorusSpec, samples: usize, seed: u64) -> Result<VolumeBoundReport> {
    let (p, n) = (torus.p, torus.n);
    if n == 0 {
        return Err(Error::Precondition("n ≥ 1".into()));
    }
    let k = 2 * n;
    let exhaustive = n == 1;
    let gammas: Vec<PadicMatrix> = if exhaustive {
        PadicMatrix::enumerate_gl2(p, k)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = pow_u64(p, k);
        let mut v = Vec::with_capacity(samples);
        while v.len() < samples {
            let g = PadicMatrix { e: [0; 4].map(|_| rng.gen_range(0..q)), p, k };
            if g.is_invertible() {
                v.push(g);
            }
        }
        v
    };
    let dt = torus.dt_set();
    let w = PadicMatrix::weyl(p, k);
    let indices = volume_indices(torus);
    let mut rows: BTreeMap<(String, DistanceValue), VolumeRow> = BTreeMap::new();
    let mut constant: f64 = 0.0;
    let mut w_fail = 0;
    let mut reduced_by_l: BTreeMap<DistanceValue, (Ratio<u64>, Ratio<u64>)> = BTreeMap::new();
    for g in &gammas {
        let d = distance_dh(g, n)?;
        let wg = w.mul(g);
        let dw = distance_dh(&wg, n)?;
        let (hits, units) = alpha_hits(g, torus, &dt)?;
        let (whits, _) = alpha_hits(&wg, torus, &dt)?;
        if whits != hits {
            w_fail += 1;
        }
        let vol = hits as f64 / units as f64;
        let bound = volume_bound(p, n, d, dw);
        let ratio = vol / bound;
        constant = constant.max(ratio);
        let class = if g.e[3] % p == 0 { "gamma22_nonunit" } else { "gamma22_unit" };
        let row = rows.entry((class.to_string(), d)).or_insert(VolumeRow {
            gamma_class: class.to_string(),
            l: d.label(),
            count: 0,
            bound,
            ratio: 0.0,
        });
        row.count += 1;
        if ratio > row.ratio {
            row.ratio = ratio;
            row.bound = bound;
        }
        if g.e[0] % p != 0 && g.e[3] % p != 0 {
            let v = Ratio::new(hits, units);
            let e = reduced_by_l.entry(d).or_insert((v, v));
            e.0 = e.0.min(v);
            e.1 = e.1.max(v);
        }
    }
    let mut by_l: Vec<(u32, Ratio<u64>)> = reduced_by_l.iter().map(|(d, x)| (d.l.unwrap_or(u32::MAX), x.1)).collect();
    by_l.sort();
    let maxima: Vec<Ratio<u64>> = by_l.into_iter().map(|x| x.1).collect();
    let monotone = maxima.windows(2).all(|w| w[0] <= w[1]);
    let max_vol = gammas.iter().map(|g| alpha_hits(g, torus, &dt).map(|(h, u)| h as f64 / u as f64)).try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    Ok(VolumeBoundReport {
        p,
        n,
        torus: *torus,
        exhaustive,
        checked: gammas.len() as u64,
        rows: rows.into_values().collect(),
        constant,
        w_invariance_failures: w_fail,
        monotone,
        max_i_gamma_over_qn: max_vol * indices.ratio / (p as f64).powi(n as i32),
        indices,
    })
}

/// I_γ(f) for γ ∈ H(2n), computed as dim V_new · Q(v) with v = c₁·f_ML and
/// V_new = I(χ)^{K(m)}, the whole compact model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub p: u64,
    pub n: u32,
    pub dim_new: usize,
    pub q_v: f64,
    pub i_gamma: f64,
    pub q_pow_n: f64,
    pub ratio: f64,
}

pub fn benchmark(p: u64, n: u32) -> Result<BenchmarkReport> {
    let model = PrincipalModel::new(p, n)?;
    let f = model.ml_vector();
    let v = model.group_act(&model.c_t(1), &f);
    let nv = model.norm(&v);
    let v = InducedVector { values: v.values.iter().map(|z| z / nv).collect() };
    let dim_new = model.num_cosets();
    let q_v = model.local_period_q(&v);
    let i_gamma = dim_new as f64 * q_v;
    let q_pow_n = (p as f64).powi(n as i32);
    Ok(BenchmarkReport { p, n, dim_new, q_v, i_gamma, q_pow_n, ratio: i_gamma / q_pow_n })
}

/// Exponent e in |coefficient| ≪ q^e; `None` where the row has no entry.
pub fn a_vol(n: u32, d: DistanceValue, dw: DistanceValue) -> f64 {
    match d.l {
        None => 0.0,
        Some(l) if l >= n => 0.0,
        Some(l) if l > 0 => (l as f64 - n as f64) / 2.0,
        Some(_) => {
            let lp = dw.l.map_or(f64::INFINITY, |x| x.max(1) as f64);
            ((lp - n as f64) / 2.0).min(0.0)
        }
    }
}

/// Comparison exponent from the stationary-phase bound for the same coefficients.
pub fn a_stationary(n: u32, d: DistanceValue) -> Option<f64> {
    match d.l {
        None => Some(0.0),
        Some(0) => None,
        Some(l) => Some(l as f64 / 2.0 - n as f64),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffRow {
    pub l: String,
    pub count: u64,
    pub max_abs: f64,
    pub observed_exp: f64,
    pub a_vol: f64,
    pub a_stationary: Option<f64>,
    /// max over the bin of log_q|coef| − e(γ).
    pub slack_vol: f64,
    pub slack_stationary: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub p: u64,
    pub r: u32,
    pub exhaustive: bool,
    pub rows: Vec<CoeffRow>,
    pub max_slack_vol: f64,
}

/// |⟨v∘, π(γ)v∘⟩| for the K_H(m,m)-invariant vector, binned by l; exhaustive for r = 1.
pub fn coeff_exponent_table(p: u64, r: u32, samples: usize, seed: u64) -> Result<CoeffTable> {
    let model = PrincipalModel::new(p, r)?;
    let (m, n) = (model.m, r);
    let f = model.new_vector();
    let nf = model.norm(&f);
    let v = InducedVector { values: f.values.iter().map(|z| z / nf).collect() };
    let exhaustive = r == 1;
    let gammas: Vec<PadicMatrix> = if exhaustive {
        PadicMatrix::enumerate_gl2(p, m)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = pow_u64(p, m);
        let mut out = vec![];
        // stratified: half uniform, half forced close to H
        while out.len() < samples {
            let l = out.len() as u32 % (2 * n + 1);
            let pl = pow_u64(p, l.min(m));
            let g = PadicMatrix {
                e: [rng.gen_range(0..q), rng.gen_range(0..q) * pl % q, rng.gen_range(0..q) * pl % q, rng.gen_range(0..q)],
                p,
                k: m,
            };
            if g.is_invertible() {
                out.push(g);
            }
        }
        out
    };
    let qf = p as f64;
    let w = PadicMatrix::weyl(p, m);
    let mut bins: BTreeMap<DistanceValue, CoeffRow> = BTreeMap::new();
    for g in &gammas {
        let d = distance_dh(g, n)?;
        let dw = distance_dh(&w.mul(g), n)?;
        let c = model.inner(&v, &model.group_act(g, &v)).norm();
        let lc = if c < 1e-12 { f64::NEG_INFINITY } else { c.ln() / qf.ln() };
        let ev = a_vol(n, d, dw);
        let eh = a_stationary(n, d);
        let row = bins.entry(d).or_insert(CoeffRow {
            l: d.label(),
            count: 0,
            max_abs: 0.0,
            observed_exp: f64::NEG_INFINITY,
            a_vol: ev,
            a_stationary: eh,
            slack_vol: f64::NEG_INFINITY,
            slack_stationary: eh.map(|_| f64::NEG_INFINITY),
        });
        row.count += 1;
        row.max_abs = row.max_abs.max(c);
        row.observed_exp = row.observed_exp.max(lc);
        row.a_vol = row.a_vol.max(ev);
        row.slack_vol = row.slack_vol.max(lc - ev);
        if let (Some(s), Some(e)) = (row.slack_stationary.as_mut(), eh) {
            *s = s.max(lc - e);
        }
    }
    let rows: Vec<CoeffRow> = bins.into_values().collect();
    let max_slack_vol = rows.iter().map(|r| r.slack_vol).fold(f64::NEG_INFINITY, f64::max);
    Ok(CoeffTable { p, r, exhaustive, rows, max_slack_vol })
}

/// True iff every valuation of the off-diagonal entries of t ∈ T agrees with v(b).
pub fn torus_offdiag_valuations_agree(torus: &TorusSpec) -> bool {
    torus.elements().iter().all(|t| valuation(t.e[1], torus.p, torus.n) == valuation(t.e[2], torus.p, torus.n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let d = PadicMatrix::diag(2, 5, 3, 2);
        assert_eq!(distance_dh(&d, 1).unwrap().l, None);
        let g = PadicMatrix::new([1, 3, 3, 1], 3, 2);
        assert_eq!(distance_dh(&g, 1).unwrap().l, Some(1));
        assert_eq!(distance_dh(&PadicMatrix::weyl(3, 2), 1).unwrap().l, Some(0));
        assert!(distance_dh(&PadicMatrix::identity(3, 1), 1).is_err());
    }

    #[test]
    fn identity_and_weyl_have_full_volume() {
        for torus in [TorusSpec::nonsplit(3, 1), TorusSpec::split_conjugate(5, 2, 2).unwrap()] {
            let k = 2 * torus.n;
            assert_eq!(volume_count(&PadicMatrix::identity(torus.p, k), &torus).unwrap(), Ratio::from_integer(1));
            assert_eq!(volume_count(&PadicMatrix::weyl(torus.p, k), &torus).unwrap(), Ratio::from_integer(1));
        }
    }

    #[test]
    fn quadratic_count_examples() {
        let r = |x: i64| ResidueInt::new(x, 5, 3);
        // c₂ = c₀ unit: α² = 1 with α ≡ 1 leaves only α = 1
        assert_eq!(quadratic_count(&r(2), &r(2), 3).unwrap(), 1);
        // c₀ ≡ 2c₂ is not a square times α ≡ 1
        assert_eq!(quadratic_count(&r(1), &r(2), 3).unwrap(), 0);
        assert!(quadratic_count(&r(1), &ResidueInt::new(1, 3, 3), 2).is_err());
        assert_eq!(quadratic_count(&r(0), &r(0), 2).unwrap(), 5);
    }

    #[test]
    fn quadratic_count_worst_case() {
        let (p, n) = (3u64, 4u32);
        for l in 0..=n {
            let c2 = ResidueInt::new(pow_u64(p, l) as i64 * 2, p, n);
            let best = (0..pow_u64(p, n)).map(|c0| quadratic_count(&c2, &ResidueInt::new(c0 as i64, p, n), n).unwrap()).max().unwrap();
            let b = quadratic_bound(p, n, l);
            assert!(best <= b, "l={l}: {best} > {b}");
            // without a linear term the worst case is p^min(l, n−1)
            assert_eq!(best, pow_u64(p, l.min(n - 1)));
            if 2 * l >= n {
                assert!(best * p >= b);
            }
        }
    }

    #[test]
    fn torus_shapes() {
        let t = TorusSpec::nonsplit(3, 1);
        assert_eq!(t.elements().len(), 8);
        assert!(torus_offdiag_valuations_agree(&t));
        let s = TorusSpec::split_conjugate(5, 1, 2).unwrap();
        assert_eq!(s.elements().len(), 16);
        assert!(torus_offdiag_valuations_agree(&s));
    }
}
