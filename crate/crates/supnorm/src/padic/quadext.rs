use super::{non_residue, pow_u64, CycloValue, PadicMatrix};
use crate::{Error, Result};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Character θ of (𝒪_E/pᵏ)^×, E = ℚ_p(√D), trivial on 𝒪^×.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaCharacter {
    pub p: u64,
    pub k: u32,
    pub d: u64,
    pub order: u64,
    pub generator: (u64, u64),
    labels: Vec<u32>,
}

impl ThetaCharacter {
    fn modulus(&self) -> u64 {
        pow_u64(self.p, self.k)
    }

    pub fn exponent(&self, x: u64, y: u64) -> Option<u64> {
        let m = self.modulus();
        let l = self.labels[((x % m) * m + y % m) as usize];
        (l != u32::MAX).then_some(l as u64)
    }

    pub fn value(&self, x: u64, y: u64) -> Option<CycloValue> {
        self.exponent(x, y).map(|e| CycloValue::new(e, self.order))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadExtReport {
    pub p: u64,
    pub k: u32,
    pub d: u64,
    pub unit_count: usize,
    pub quotient_order: u64,
    pub trivial_on_scalars: bool,
    pub conductor: u32,
    pub b_theta: (u64, u64),
    pub b_theta_solutions: usize,
    pub well_defined: bool,
    pub theta: ThetaCharacter,
}

fn emul(a: (u64, u64), b: (u64, u64), d: u64, m: u64) -> (u64, u64) {
    ((a.0 * b.0 + d * (a.1 * b.1 % m)) % m, (a.0 * b.1 + a.1 * b.0) % m)
}

fn embed(x: (u64, u64), d: u64, p: u64, k: u32) -> PadicMatrix {
    let m = pow_u64(p, k);
    PadicMatrix { e: [x.0 % m, x.1 % m, x.1 * d % m, x.0 % m], p, k }
}

/// Enumerates (𝒪_E/pᵏ)^× for k = 2r, builds θ of conductor 2r trivial on
/// 𝒪^× and finds b_θ with θ(1 + pʳx) = ψ(Tr(b_θ x)/pʳ).
pub fn quadext_units(p: u64, k: u32, d: Option<u64>) -> Result<QuadExtReport> {
    if p.is_multiple_of(2) || k == 0 || k % 2 == 1 {
        return Err(Error::Precondition("need odd p and even k = 2r".into()));
    }
    let d = d.unwrap_or_else(|| non_residue(p));
    if super::pow_mod(d, (p - 1) / 2, p) != p - 1 {
        return Err(Error::Precondition("D must be a non-residue".into()));
    }
    let (m, r) = (pow_u64(p, k), k / 2);
    let norm = |x: (u64, u64)| (x.0 * x.0 % m + m - d * (x.1 * x.1 % m) % m) % m;
    let units: Vec<(u64, u64)> = (0..m).flat_map(|x| (0..m).map(move |y| (x, y))).filter(|&u| norm(u) % p != 0).collect();
    let scalars: Vec<(u64, u64)> = (0..m).filter(|a| a % p != 0).map(|a| (a, 0)).collect();
    let q = (units.len() / scalars.len()) as u64;

    let order_in_quotient = |g: (u64, u64)| {
        let mut x = g;
        let mut j = 1;
        while x.1 != 0 {
            x = emul(x, g, d, m);
            j += 1;
        }
        j
    };
    let generator = *units.iter().find(|&&g| order_in_quotient(g) == q).ok_or(Error::NoValidTheta)?;

    let mut labels = vec![u32::MAX; (m * m) as usize];
    let mut h = (1, 0);
    for j in 0..q {
        for s in &scalars {
            let u = emul(h, *s, d, m);
            labels[(u.0 * m + u.1) as usize] = j as u32;
        }
        h = emul(h, generator, d, m);
    }
    let theta = ThetaCharacter { p, k, d, order: q, generator, labels };
    let trivial_on_scalars = scalars.iter().all(|s| theta.exponent(s.0, s.1) == Some(0));

    // conductor: least c with θ trivial on 1 + p^c 𝒪_E
    let conductor = (0..=k)
        .find(|&c| {
            let pc = pow_u64(p, c);
            units.iter().filter(|u| c > 0 && (u.0 + m - 1) % pc == 0 && u.1 % pc == 0).all(|u| theta.exponent(u.0, u.1) == Some(0))
                && (c > 0 || theta.order == 1)
        })
        .unwrap_or(k);
    if conductor != k {
        return Err(Error::NoValidTheta);
    }

    let pr = pow_u64(p, r);
    let l = q.lcm(&pr);
    let agrees = |b: (u64, u64)| {
        (0..pr).all(|x1| {
            (0..pr).all(|x2| {
                let e = theta.exponent((1 + pr * x1) % m, pr * x2 % m).unwrap();
                let tr = 2 * (b.0 * x1 + d * (b.1 * x2 % pr)) % pr;
                e * (l / q) % l == tr * (l / pr) % l
            })
        })
    };
    let sols: Vec<(u64, u64)> = (0..pr)
        .flat_map(|a| (0..pr).map(move |b| (a, b)))
        .filter(|&b| !(b.0 * b.0 + pr * pr - d * b.1 * b.1 % pr).is_multiple_of(p))
        .filter(|&b| agrees(b))
        .collect();
    let b_theta = *sols.first().ok_or(Error::NoSolution)?;

    // θ̃(x·k₁) = θ(x)·θ_b(k₁) on ι(𝒪_E^×)·K(r), checked over all factorizations
    let theta_b = |g: &PadicMatrix| {
        let x = [g.e[0] + m - 1, g.e[1], g.e[2], g.e[3] + m - 1].map(|v| v % m / pr);
        let bm = [b_theta.0, b_theta.1, d * b_theta.1 % pr, b_theta.0];
        let tr = (bm[0] * x[0] + bm[1] * x[2] + bm[2] * x[1] + bm[3] * x[3]) % pr;
        tr * (l / pr) % l
    };
    let mut k_r = vec![];
    for a in 0..pr {
        for b in 0..pr {
            for c in 0..pr {
                for e in 0..pr {
                    k_r.push(PadicMatrix::new([(1 + pr * a) as i64, (pr * b) as i64, (pr * c) as i64, (1 + pr * e) as i64], p, k));
                }
            }
        }
    }
    let mut seen: HashMap<PadicMatrix, u64> = HashMap::new();
    let mut well_defined = true;
    for u in &units {
        let xu = embed(*u, d, p, k);
        let tu = theta.exponent(u.0, u.1).unwrap() * (l / q) % l;
        for k1 in &k_r {
            let val = (tu + theta_b(k1)) % l;
            if let Some(prev) = seen.insert(xu.mul(k1), val) {
                well_defined &= prev == val;
            }
        }
    }

    Ok(QuadExtReport {
        p,
        k,
        d,
        unit_count: units.len(),
        quotient_order: q,
        trivial_on_scalars,
        conductor,
        b_theta,
        b_theta_solutions: sols.len(),
        well_defined,
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p3_k2() {
        let r = quadext_units(3, 2, None).unwrap();
        assert_eq!(r.unit_count, 72);
        assert_eq!(r.quotient_order, 12);
        assert!(r.trivial_on_scalars);
        assert_eq!(r.conductor, 2);
        assert_eq!(r.b_theta_solutions, 1);
        assert!(r.well_defined);
    }

    #[test]
    fn theta_is_multiplicative() {
        let r = quadext_units(3, 2, None).unwrap();
        let m = 9;
        let us: Vec<(u64, u64)> = (0..m).flat_map(|x| (0..m).map(move |y| (x, y))).filter(|u| r.theta.exponent(u.0, u.1).is_some()).collect();
        for a in &us {
            for b in us.iter().step_by(5) {
                let c = emul(*a, *b, r.d, m);
                let lhs = r.theta.value(c.0, c.1).unwrap();
                let rhs = r.theta.value(a.0, a.1).unwrap().mul(&r.theta.value(b.0, b.1).unwrap());
                assert_eq!(lhs.lift(rhs.order), rhs);
            }
        }
    }

    #[test]
    fn p5_k2() {
        let r = quadext_units(5, 2, None).unwrap();
        assert_eq!(r.unit_count, 25 * 24);
        assert!(r.well_defined && r.trivial_on_scalars);
    }

    #[test]
    fn rejects_residue() {
        assert!(quadext_units(5, 2, Some(4)).is_err());
        assert!(quadext_units(3, 3, None).is_err());
    }
}
