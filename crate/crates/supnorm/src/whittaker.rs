//! The invariants (t, l) of g′ = g·a(p^{2n}) in ZN·g_{t,l,v}·K′_H(4n), and s_l.

use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// p-adic valuation of a nonzero integer; `None` for 0.
pub fn val(x: i128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let (mut x, p, mut k) = (x.abs(), p as i128, 0);
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    Some(k)
}

pub fn s_l(l: u32, n: u32) -> u32 {
    if l <= 2 * n {
        4 * n
    } else {
        2 * l
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhittakerProfile {
    pub l: u32,
    pub t: i64,
    pub s_l: u32,
    pub d_l: u32,
}

impl WhittakerProfile {
    /// −2n + t = −s_l.
    pub fn identity_holds(&self, n: u32) -> bool {
        -2 * n as i64 + self.t == -(self.s_l as i64)
    }
}

/// Case formulas for g = [[·, ·], [v, w]] ∈ GL₂(ℤ_p); a zero entry has infinite valuation.
pub fn gtlv_invariants(g: [i128; 4], p: u64, n: u32) -> Result<WhittakerProfile> {
    let [a, b, v, w] = g;
    if val(a * w - b * v, p) != Some(0) {
        return Err(Error::Precondition("g must lie in GL₂(ℤ_p)".into()));
    }
    let vv = val(v, p).unwrap_or(u32::MAX);
    let vw = val(w, p).unwrap_or(u32::MAX);
    let l = if vw == 0 { (2 * n).saturating_add(vv).min(4 * n) } else { (2 * n).saturating_sub(vw) };
    let t = -2 * n as i64 - 2 * (2 * n).min(vv) as i64;
    Ok(WhittakerProfile { l, t, s_l: s_l(l, n), d_l: 1 })
}

/// The four columns of the parameter table, as (condition label, l, t, s_l) for given valuations.
pub fn table_column(vv: u32, vw: u32, n: u32) -> Option<(usize, u32, i64, u32)> {
    let n2 = 2 * n;
    if vv == 0 && vw >= n2 {
        Some((1, 0, -(n2 as i64), 4 * n))
    } else if vv == 0 && vw > 0 {
        Some((2, n2 - vw, -(n2 as i64), 4 * n))
    } else if vv <= n2 && vw == 0 {
        Some((3, n2 + vv, -(n2 as i64) - 2 * vv as i64, 4 * n + 2 * vv))
    } else if vv > n2 && vw == 0 {
        Some((4, 4 * n, -6 * n as i64, 8 * n))
    } else {
        None
    }
}

/// Generic Iwasawa reading for rational g = [[A, B], [C, D]] given as (numerator, denominator)
/// pairs: with m = min(v(C), v(D)), l = min(v(C) − m, 4n) and t = v(det) − 2m − 2l.
pub fn invariants_generic(g: [(i128, i128); 4], p: u64, n: u32) -> Option<(u32, i64)> {
    let v = |(a, b): (i128, i128)| -> Option<i64> { Some(val(a, p)? as i64 - val(b, p)? as i64) };
    let [aa, bb, cc, dd] = g;
    let det_num = aa.0 * dd.0 * bb.1 * cc.1 - bb.0 * cc.0 * aa.1 * dd.1;
    let det = v((det_num, aa.1 * dd.1 * bb.1 * cc.1))?;
    let (vc, vd) = (v(cc), v(dd));
    let m = match (vc, vd) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) => x,
        (None, Some(y)) => y,
        _ => return None,
    };
    let l = vc.map_or(4 * n as i64, |x| (x - m).min(4 * n as i64)) as u32;
    Some((l, det - 2 * m - 2 * l as i64))
}

/// g_{t,l,v} = [[0, p^t], [−1, −v/p^l]], entries as fractions.
pub fn g_tlv(t: i64, l: u32, v: i128, p: u64) -> [(i128, i128); 4] {
    let pp = p as i128;
    let pt = if t >= 0 { (pp.pow(t as u32), 1) } else { (1, pp.pow((-t) as u32)) };
    [(0, 1), pt, (-1, 1), (-v, pp.pow(l))]
}

/// Brute-force orbit partition of primitive bottom rows mod p^{4n} under right K′_H(4n) and unit
/// scalars; each orbit is labelled by the l of the representative (−p^l, −v) it contains.
pub struct RowOrbits {
    pub p: u64,
    pub n: u32,
    pub modulus: u64,
    label: HashMap<(u64, u64), u32>,
    pub orbit_count: usize,
}

impl RowOrbits {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        let modulus = p.pow(4 * n);
        if modulus > 1 << 12 {
            return Err(Error::Precondition("p^{4n} too large for orbit enumeration".into()));
        }
        let idx = |c: u64, d: u64| (c * modulus + d) as usize;
        let size = (modulus * modulus) as usize;
        let mut parent: Vec<usize> = (0..size).collect();
        fn find(pa: &mut [usize], mut x: usize) -> usize {
            while pa[x] != x {
                pa[x] = pa[pa[x]];
                x = pa[x];
            }
            x
        }
        let prim = |c: u64, d: u64| !c.is_multiple_of(p) || !d.is_multiple_of(p);
        let gen = (2..modulus).find(|&g| is_generator(g, p, modulus)).unwrap_or(1);
        for c in 0..modulus {
            for d in 0..modulus {
                if !prim(c, d) {
                    continue;
                }
                let moves = [
                    // right multiplication by diag(g, 1), by [[1, 1], [0, 1]], scalar g
                    (c * gen % modulus, d),
                    (c, (c + d) % modulus),
                    (c * gen % modulus, d * gen % modulus),
                ];
                for (c2, d2) in moves {
                    let (x, y) = (find(&mut parent, idx(c, d)), find(&mut parent, idx(c2, d2)));
                    parent[x] = y;
                }
            }
        }
        let mut label = HashMap::new();
        let mut root_label: HashMap<usize, u32> = HashMap::new();
        for l in 0..=4 * n {
            for v in (1..modulus).filter(|v| v % p != 0) {
                let c = (modulus - p.pow(l) % modulus) % modulus;
                let d = modulus - v;
                let r = find(&mut parent, idx(c, d));
                if let Some(&old) = root_label.get(&r) {
                    if old != l {
                        return Err(Error::PartitionFailure(format!("orbit carries l = {old} and {l}")));
                    }
                }
                root_label.insert(r, l);
            }
        }
        let mut roots = std::collections::HashSet::new();
        for c in 0..modulus {
            for d in 0..modulus {
                if prim(c, d) {
                    let r = find(&mut parent, idx(c, d));
                    roots.insert(r);
                    let l = *root_label.get(&r).ok_or_else(|| Error::PartitionFailure(format!("row ({c}, {d}) unlabelled")))?;
                    label.insert((c, d), l);
                }
            }
        }
        Ok(Self { p, n, modulus, label, orbit_count: roots.len() })
    }

    /// (t, l) of g·a(p^{2n}) for an integral g with unit determinant.
    pub fn invariants(&self, g: [i128; 4]) -> Result<(u32, i64)> {
        let p = self.p;
        let pn = (p as i128).pow(2 * self.n);
        let [a, b, v, w] = g;
        let (cc, dd) = (pn * v, w);
        let det = val((a * pn) * w - b * (pn * v), p).ok_or(Error::Singular)? as i64;
        let m = match (val(cc, p), val(dd, p)) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            _ => return Err(Error::Singular),
        };
        let pm = (p as i128).pow(m);
        let md = self.modulus as i128;
        let (c0, d0) = ((cc / pm).rem_euclid(md) as u64, (dd / pm).rem_euclid(md) as u64);
        let l = *self.label.get(&(c0, d0)).ok_or(Error::PartitionFailure("row not primitive".into()))?;
        Ok((l, det - 2 * m as i64 - 2 * l as i64))
    }
}

fn is_generator(g: u64, p: u64, modulus: u64) -> bool {
    if g.is_multiple_of(p) {
        return false;
    }
    let order = modulus / p * (p - 1);
    let mut x = 1u64;
    for k in 1..=order {
        x = x * g % modulus;
        if x == 1 {
            return k == order;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtlvReport {
    pub p: u64,
    pub n: u32,
    pub modulus: u64,
    pub checked: usize,
    pub formula_vs_orbits: usize,
    pub formula_vs_generic: usize,
    pub table_mismatches: usize,
    pub identity_failures: usize,
    pub orbit_count: usize,
    pub columns_seen: [usize; 4],
}

impl GtlvReport {
    pub fn passed(&self) -> bool {
        self.checked > 0
            && self.formula_vs_orbits == 0
            && self.formula_vs_generic == 0
            && self.table_mismatches == 0
            && self.identity_failures == 0
            && self.columns_seen.iter().all(|&c| c > 0)
    }
}

/// Every g ∈ GL₂(ℤ/p^{2n+1}) with det ≡ 1, lifted to integer representatives in [0, p^{2n+1}).
pub fn exhaustive_gtlv(p: u64, n: u32) -> Result<GtlvReport> {
    let orbits = RowOrbits::new(p, n)?;
    let q = (p as i128).pow(2 * n + 1);
    let mut rep = GtlvReport {
        p,
        n,
        modulus: q as u64,
        checked: 0,
        formula_vs_orbits: 0,
        formula_vs_generic: 0,
        table_mismatches: 0,
        identity_failures: 0,
        orbit_count: orbits.orbit_count,
        columns_seen: [0; 4],
    };
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    if (a * d - b * c).rem_euclid(q) != 1 {
                        continue;
                    }
                    let g = [a, b, c, d];
                    rep.checked += 1;
                    let f = gtlv_invariants(g, p, n)?;
                    if orbits.invariants(g)? != (f.l, f.t) {
                        rep.formula_vs_orbits += 1;
                    }
                    let pn = (p as i128).pow(2 * n);
                    let gen = invariants_generic([(a * pn, 1), (b, 1), (c * pn, 1), (d, 1)], p, n);
                    if gen != Some((f.l, f.t)) {
                        rep.formula_vs_generic += 1;
                    }
                    if !f.identity_holds(n) {
                        rep.identity_failures += 1;
                    }
                    let cap = |x: Option<u32>| x.unwrap_or(u32::MAX);
                    match table_column(cap(val(c, p)), cap(val(d, p)), n) {
                        Some((col, l, t, s)) => {
                            rep.columns_seen[col - 1] += 1;
                            if (l, t, s) != (f.l, f.t, f.s_l) {
                                rep.table_mismatches += 1;
                            }
                        }
                        None => rep.table_mismatches += 1,
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// |p^{−m} Σ_{x ∈ (ℤ/p^m)^×} χ(x)ψ(x/p^m)| for the character χ(g^k) = e(k/φ(p^m)), g a generator.
pub fn normalized_gauss_sum(p: u64, m: u32) -> f64 {
    let q = p.pow(m);
    let phi = q / p * (p - 1);
    let g = (2..q).find(|&g| is_generator(g, p, q)).unwrap_or(1);
    let mut x = 1u64;
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..phi {
        let ang = 2.0 * PI * (k as f64 / phi as f64 + x as f64 / q as f64);
        s += Complex64::from_polar(1.0, ang);
        x = x * g % q;
    }
    s.norm() / q as f64
}
