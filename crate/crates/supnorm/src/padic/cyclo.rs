use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// exp(2πi·exp/order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycloValue {
    pub exp: u64,
    pub order: u64,
}

impl CycloValue {
    pub fn new(exp: u64, order: u64) -> Self {
        Self { exp: exp % order, order }
    }

    pub fn one() -> Self {
        Self { exp: 0, order: 1 }
    }

    pub fn lift(&self, order: u64) -> Self {
        assert_eq!(order % self.order, 0, "target order must be a multiple");
        Self { exp: self.exp * (order / self.order), order }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let l = self.order.lcm(&o.order);
        let (a, b) = (self.lift(l), o.lift(l));
        Self::new(a.exp + b.exp, l)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.order - self.exp, self.order)
    }

    pub fn pow(&self, e: u64) -> Self {
        Self::new(self.exp * (e % self.order), self.order)
    }

    pub fn eval(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.exp as f64 / self.order as f64)
    }
}

/// Integer combination Σ cₑ ζᵉ of powers of a primitive `order`-th root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloSum {
    pub order: u64,
    pub counts: Vec<i64>,
}

impl CycloSum {
    pub fn new(order: u64) -> Self {
        Self { order, counts: vec![0; order as usize] }
    }

    pub fn push(&mut self, v: CycloValue) {
        self.push_n(v, 1);
    }

    pub fn push_n(&mut self, v: CycloValue, n: i64) {
        let v = v.lift(self.order);
        self.counts[v.exp as usize] += n;
    }

    pub fn add(&mut self, o: &Self) {
        for (e, &c) in o.counts.iter().enumerate() {
            if c != 0 {
                self.push_n(CycloValue::new(e as u64, o.order), c);
            }
        }
    }

    pub fn eval(&self) -> Complex64 {
        let mut s = Complex64::default();
        for (e, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                s += CycloValue::new(e as u64, self.order).eval() * c as f64;
            }
        }
        s
    }

    /// Exact test by reduction modulo the cyclotomic polynomial.
    pub fn is_zero_exact(&self) -> bool {
        let phi = cyclotomic_poly(self.order);
        let deg = phi.len() - 1;
        let mut r = self.counts.clone();
        for i in (deg..r.len()).rev() {
            let c = r[i];
            if c != 0 {
                for (j, &pj) in phi.iter().enumerate() {
                    r[i - deg + j] -= c * pj;
                }
            }
        }
        r.iter().all(|&c| c == 0)
    }
}

fn mobius(mut n: u64) -> i32 {
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Φₙ = Π_{d|n} (xᵈ − 1)^{μ(n/d)}, coefficients from the constant term up.
pub fn cyclotomic_poly(n: u64) -> Vec<i64> {
    let divs: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut p = vec![1i64];
    for &d in divs.iter().filter(|&&d| mobius(n / d) == 1) {
        // multiply by xᵈ − 1
        let d = d as usize;
        let mut q = vec![0i64; p.len() + d];
        for (i, &c) in p.iter().enumerate() {
            q[i + d] += c;
            q[i] -= c;
        }
        p = q;
    }
    for &d in divs.iter().filter(|&&d| mobius(n / d) == -1) {
        // exact division by xᵈ − 1: q[i] = q[i−d] − p[i]
        let d = d as usize;
        let len = p.len() - d;
        let mut q = vec![0i64; len];
        for i in 0..len {
            q[i] = -p[i] + if i >= d { q[i - d] } else { 0 };
        }
        p = q;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zero_detection() {
        let mut s = CycloSum::new(6);
        s.push(CycloValue::new(0, 6));
        s.push(CycloValue::new(2, 6));
        s.push(CycloValue::new(4, 6));
        assert!(s.is_zero_exact());
        s.push(CycloValue::new(1, 6));
        assert!(!s.is_zero_exact());
        assert!((s.eval() - CycloValue::new(1, 6).eval()).norm() < 1e-12);
    }

    #[test]
    fn multiplication_is_exponent_addition() {
        let a = CycloValue::new(1, 6);
        let b = CycloValue::new(1, 9);
        let c = a.mul(&b);
        assert_eq!(c.order, 18);
        assert!((c.eval() - a.eval() * b.eval()).norm() < 1e-12);
        assert_eq!(a.mul(&a.conj()).exp, 0);
    }
}
