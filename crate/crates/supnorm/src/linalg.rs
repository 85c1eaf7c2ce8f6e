//! Dense complex matrix helpers and matrix exponentials.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

pub fn norm1(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Scaling and squaring with a degree 13 Padé approximant.
pub fn expm_pade13(a: &CMat) -> CMat {
    let n = a.nrows();
    let nrm = norm1(a);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(0.5f64.powi(s));
    let id = CMat::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let u_inner = &a6 * (a6.map(|z| z * b(13)) + a4.map(|z| z * b(11)) + a2.map(|z| z * b(9)));
    let u = &a
        * (u_inner
            + a6.map(|z| z * b(7))
            + a4.map(|z| z * b(5))
            + a2.map(|z| z * b(3))
            + id.map(|z| z * b(1)));
    let v_inner = &a6 * (a6.map(|z| z * b(12)) + a4.map(|z| z * b(10)) + a2.map(|z| z * b(8)));
    let v = v_inner
        + a6.map(|z| z * b(6))
        + a4.map(|z| z * b(4))
        + a2.map(|z| z * b(2))
        + id.map(|z| z * b(0));
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is invertible");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Tridiagonal matrix stored by diagonals; `lower[i]` is entry (i+1, i),
/// `upper[i]` is entry (i, i+1).
#[derive(Clone, Debug)]
pub struct Tridiag {
    pub diag: Vec<Complex64>,
    pub lower: Vec<Complex64>,
    pub upper: Vec<Complex64>,
}

impl Tridiag {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.lower[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * v[i + 1];
            }
            out[i] = s;
        }
    }

    pub fn norm1(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j].norm();
                if j > 0 {
                    s += self.upper[j - 1].norm();
                }
                if j + 1 < n {
                    s += self.lower[j].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMat {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.lower[i];
                m[(i, i + 1)] = self.upper[i];
            }
        }
        m
    }

    /// exp(self)·v by Taylor steps on a scaled matrix.
    pub fn expm_action(&self, v: &[Complex64]) -> Vec<Complex64> {
        let steps = self.norm1().ceil().max(1.0) as usize;
        let h = 1.0 / steps as f64;
        let n = self.dim();
        let mut cur = v.to_vec();
        let mut term = vec![Complex64::default(); n];
        let mut next = vec![Complex64::default(); n];
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
        for _ in 0..steps {
            term.copy_from_slice(&cur);
            let mut acc = cur.clone();
            for k in 1..60 {
                self.apply(&term, &mut next);
                let f = h / k as f64;
                let mut tn = 0.0;
                for i in 0..n {
                    term[i] = next[i] * f;
                    acc[i] += term[i];
                    tn += term[i].norm_sqr();
                }
                if tn.sqrt() < 1e-17 * vnorm {
                    break;
                }
            }
            cur = acc;
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pade_matches_rotation() {
        let t = 3.7;
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(-t, 0.0), c(t, 0.0), c(0.0, 0.0)]);
        let e = expm_pade13(&m);
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-13);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn pade_matches_diagonal_with_large_norm() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(12.0, 1.0), c(-3.0, 40.0)]));
        let e = expm_pade13(&m);
        let want = c(12.0, 1.0).exp();
        assert!(((e[(0, 0)] - want) / want).norm() < 1e-12);
        assert!((e[(1, 1)] - c(-3.0, 40.0).exp()).norm() < 1e-12);
    }

    #[test]
    fn action_agrees_with_pade() {
        let n = 9;
        let t = Tridiag {
            diag: (0..n).map(|i| c(0.0, 0.3 * i as f64 - 1.0)).collect(),
            lower: (0..n - 1).map(|i| c(0.5 + 0.1 * i as f64, 0.7)).collect(),
            upper: (0..n - 1).map(|i| c(-0.5 - 0.1 * i as f64, 0.7)).collect(),
        };
        let e = expm_pade13(&t.to_dense());
        let mut v = vec![Complex64::default(); n];
        v[3] = c(1.0, 0.0);
        let w = t.expm_action(&v);
        for i in 0..n {
            assert!((w[i] - e[(i, 3)]).norm() < 1e-12);
        }
    }
}
