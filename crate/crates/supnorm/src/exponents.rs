//! Exact rational bookkeeping for max-of-monomial bounds and the choice of amplifier length X.

use crate::{Error, Result};
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// N₀ = p^{2n}, so p^n = N₀^{1/2} and N = N₀². `PL` is p^l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    T,
    N0,
    X,
    Y,
    Delta,
    PL,
}

impl Sym {
    pub fn name(self) -> &'static str {
        match self {
            Sym::T => "T",
            Sym::N0 => "N0",
            Sym::X => "X",
            Sym::Y => "y",
            Sym::Delta => "δ'",
            Sym::PL => "p^l",
        }
    }
}

/// Product of symbol powers; zero exponents are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub BTreeMap<Sym, Q>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from(pairs: &[(Sym, Q)]) -> Self {
        let mut m = Self::one();
        for &(s, e) in pairs {
            m.set(s, m.exp(s) + e);
        }
        m
    }

    pub fn exp(&self, s: Sym) -> Q {
        self.0.get(&s).copied().unwrap_or_else(Q::zero)
    }

    fn set(&mut self, s: Sym, e: Q) {
        if e.is_zero() {
            self.0.remove(&s);
        } else {
            self.0.insert(s, e);
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut m = self.clone();
        for (&s, &e) in &o.0 {
            m.set(s, m.exp(s) + e);
        }
        m
    }

    pub fn pow(&self, k: Q) -> Self {
        Self(self.0.iter().map(|(&s, &e)| (s, e * k)).filter(|(_, e)| !e.is_zero()).collect())
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.pow(q(-1, 1)))
    }

    /// Replace s^e by v^e.
    pub fn substitute(&self, s: Sym, v: &Self) -> Self {
        let e = self.exp(s);
        let mut m = self.clone();
        m.set(s, Q::zero());
        m.mul(&v.pow(e))
    }

    pub fn without(&self, s: Sym) -> Self {
        self.substitute(s, &Self::one())
    }

    pub fn weighted(&self, w: &BTreeMap<Sym, Q>) -> Q {
        self.0.iter().map(|(s, &e)| e * w.get(s).copied().unwrap_or_else(Q::zero)).sum()
    }

    /// Valid for all symbols ≥ 1.
    pub fn dominated_by(&self, o: &Self) -> bool {
        let syms: std::collections::BTreeSet<Sym> = self.0.keys().chain(o.0.keys()).copied().collect();
        syms.into_iter().all(|s| self.exp(s) <= o.exp(s))
    }

    pub fn eval(&self, vals: &BTreeMap<Sym, f64>) -> f64 {
        self.0.iter().map(|(s, e)| vals[s].powf(*e.numer() as f64 / *e.denom() as f64)).product()
    }

    /// Exponents of T and N after N₀ = N^{1/2}.
    pub fn in_t_n(&self) -> (Q, Q) {
        (self.exp(Sym::T), self.exp(Sym::N0) / 2)
    }

    pub fn display_n(&self) -> String {
        let (t, n) = self.in_t_n();
        let mut rest = self.without(Sym::T).without(Sym::N0).to_string();
        if rest == "1" {
            rest.clear();
        }
        let mut parts = vec![];
        if !t.is_zero() {
            parts.push(format!("T^{t}"));
        }
        if !n.is_zero() {
            parts.push(format!("N^{n}"));
        }
        if !rest.is_empty() {
            parts.push(rest);
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("·")
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self
            .0
            .iter()
            .map(|(s, e)| if *e == Q::from(1) { s.name().to_string() } else { format!("{}^{}", s.name(), e) })
            .collect();
        write!(f, "{}", s.join("·"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub mono: Monomial,
    pub tag: String,
}

/// max over terms (equivalently the sum, up to a constant).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonomialBound {
    pub terms: Vec<Term>,
}

impl MonomialBound {
    pub fn new(terms: &[(&str, Monomial)]) -> Self {
        Self { terms: terms.iter().map(|(t, m)| Term { mono: m.clone(), tag: t.to_string() }).collect() }
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms.iter().map(|t| t.mono.clone()).collect()
    }

    pub fn times(&self, m: &Monomial) -> Self {
        let terms = self.terms.iter().map(|t| Term { mono: t.mono.mul(m), tag: t.tag.clone() }).collect();
        Self { terms }
    }

    pub fn substitute(&self, s: Sym, v: &Monomial) -> Self {
        let terms = self.terms.iter().map(|t| Term { mono: t.mono.substitute(s, v), tag: t.tag.clone() }).collect();
        Self { terms }
    }

    /// A dyadic or integer sum of s over [lo, hi] executed trivially: each term is bounded by its
    /// larger endpoint value, the logarithmic length going into ε.
    pub fn sum_over(&self, s: Sym, lo: &Monomial, hi: &Monomial) -> Self {
        let mut terms = vec![];
        for t in &self.terms {
            if t.mono.exp(s).is_zero() {
                terms.push(t.clone());
            } else {
                for (v, end) in [(lo, "lo"), (hi, "hi")] {
                    terms.push(Term { mono: t.mono.substitute(s, v), tag: format!("{}[{}={}]", t.tag, s.name(), end) });
                }
            }
        }
        Self { terms }.pruned()
    }

    /// Drops terms dominated by another term (all symbols ≥ 1) and duplicates.
    pub fn pruned(&self) -> Self {
        let mut keep: Vec<Term> = vec![];
        for (i, t) in self.terms.iter().enumerate() {
            let dominated = self.terms.iter().enumerate().any(|(j, o)| {
                j != i && t.mono.dominated_by(&o.mono) && (t.mono != o.mono || j < i)
            });
            if !dominated {
                keep.push(t.clone());
            }
        }
        Self { terms: keep }
    }

    pub fn eval(&self, vals: &BTreeMap<Sym, f64>) -> f64 {
        self.terms.iter().map(|t| t.mono.eval(vals)).fold(0.0, f64::max)
    }

    pub fn max_weighted(&self, w: &BTreeMap<Sym, Q>) -> Q {
        self.terms.iter().map(|t| t.mono.weighted(w)).max().unwrap_or_else(Q::zero)
    }

    pub fn same_monomials(&self, o: &[Monomial]) -> bool {
        let mut a = self.monomials();
        let mut b = o.to_vec();
        a.sort();
        b.sort();
        a == b
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XChoice {
    pub x: Monomial,
    pub bound: MonomialBound,
    pub value: Q,
    pub candidates: usize,
}

/// Weighted exponent of the bound after X = ξ, only w·ξ matters.
fn value_at(bound: &MonomialBound, w: &BTreeMap<Sym, Q>, wx: Q) -> Q {
    bound.terms.iter().map(|t| t.mono.without(Sym::X).weighted(w) + t.mono.exp(Sym::X) * wx).max().unwrap_or_else(Q::zero)
}

/// Minimax over pairwise balancings X^{a_i}·r_i = X^{a_j}·r_j. A candidate is feasible when it is a
/// monomial in T and N₀ with X ≥ 1 under the weights.
pub fn optimize_x(bound: &MonomialBound, weights: &BTreeMap<Sym, Q>) -> Result<XChoice> {
    let a: Vec<Q> = bound.terms.iter().map(|t| t.mono.exp(Sym::X)).collect();
    if !(a.iter().any(|e| e.is_positive()) && a.iter().any(|e| e.is_negative())) {
        return Err(Error::Unbounded);
    }
    // X = 1 is the boundary of the feasible region
    let mut best: Option<(Q, Monomial)> = Some((value_at(bound, weights, Q::zero()), Monomial::one()));
    let mut count = 1;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] == a[j] {
                continue;
            }
            let ri = bound.terms[i].mono.without(Sym::X);
            let rj = bound.terms[j].mono.without(Sym::X);
            let xi = rj.div(&ri).pow(Q::from(1) / (a[i] - a[j]));
            if xi.0.keys().any(|s| !matches!(s, Sym::T | Sym::N0)) || xi.weighted(weights).is_negative() {
                continue;
            }
            count += 1;
            let v = value_at(bound, weights, xi.weighted(weights));
            let better = match &best {
                None => true,
                Some((bv, bx)) => v < *bv || (v == *bv && xi < *bx),
            };
            if better {
                best = Some((v, xi));
            }
        }
    }
    let (value, x) = best.expect("boundary candidate");
    Ok(XChoice { bound: bound.substitute(Sym::X, &x).pruned(), x, value, candidates: count })
}

/// Rationals in [−1, 1] with denominator ≤ `max_den`.
pub fn rational_grid(max_den: i64) -> Vec<Q> {
    let mut v: Vec<Q> = (1..=max_den).flat_map(|d| (-d..=d).map(move |n| q(n, d))).collect();
    v.sort();
    v.dedup();
    v
}

/// Smallest weighted value over X = T^a N₀^b with a, b on the grid.
pub fn grid_minimum(bound: &MonomialBound, weights: &BTreeMap<Sym, Q>, max_den: i64) -> Q {
    let grid = rational_grid(max_den);
    let wt = weights.get(&Sym::T).copied().unwrap_or_else(Q::zero);
    let wn = weights.get(&Sym::N0).copied().unwrap_or_else(Q::zero);
    let wxs: std::collections::BTreeSet<Q> =
        grid.iter().flat_map(|&s| grid.iter().map(move |&t| s * wt + t * wn)).filter(|wx| !wx.is_negative()).collect();
    let best = wxs.into_iter().map(|wx| value_at(bound, weights, wx)).min();
    best.unwrap_or_else(Q::zero)
}

pub fn default_weights() -> BTreeMap<Sym, Q> {
    [(Sym::T, Q::from(1)), (Sym::N0, Q::from(1))].into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerResult {
    pub name: &'static str,
    pub citation: &'static str,
    pub raw: MonomialBound,
    pub summed: MonomialBound,
    pub summed_expected: Vec<Monomial>,
    pub choice: XChoice,
    pub x_expected: Monomial,
    /// The X-free part of |φ′|² (carrying ε).
    pub main: Monomial,
    pub y_term: Monomial,
    pub crossover_sqrt_y: Option<Monomial>,
    /// Fourier-side bound for |φ′|² at the crossover.
    pub fourier_at_crossover: Option<MonomialBound>,
    pub sup_main: Monomial,
}

impl LedgerResult {
    pub fn summed_ok(&self) -> bool {
        self.summed.same_monomials(&self.summed_expected)
    }

    pub fn x_ok(&self) -> bool {
        self.choice.x == self.x_expected
    }

    pub fn fourier_ok(&self) -> bool {
        self.fourier_at_crossover.as_ref().is_none_or(|f| f.terms.iter().all(|t| t.mono.dominated_by(&self.main)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentReport {
    pub naive: LedgerResult,
    pub amplified: LedgerResult,
    pub improved: LedgerResult,
    /// Exponent of λ and of N in the final sup-norm bound, with λ ≍ T².
    pub lambda_exponent: Q,
    pub n_exponent: Q,
    pub final_exponent: Option<Q>,
    pub grid_optimal: bool,
}

fn m(pairs: &[(Sym, (i64, i64))]) -> Monomial {
    Monomial::from(&pairs.iter().map(|&(s, (a, b))| (s, q(a, b))).collect::<Vec<_>>())
}

use Sym::{Delta, PL, N0, T, X, Y};

/// Counting-side brackets before the δ′- and l-sums, with the volume weights as prefactors.
pub fn naive_ledger() -> (MonomialBound, MonomialBound) {
    let bracket = MonomialBound::new(&[
        ("X·δ'^{-1/2}", m(&[(X, (1, 1)), (Delta, (-1, 2))])),
        ("X^4·δ'^{-1/4}", m(&[(X, (4, 1)), (Delta, (-1, 4))])),
        ("X^2·y", m(&[(X, (2, 1)), (Y, (1, 1))])),
    ]);
    let raw = bracket.times(&m(&[(T, (1, 2)), (N0, (1, 1)), (X, (-2, 1))]));
    let summed = raw.sum_over(Delta, &m(&[(T, (-1, 1))]), &Monomial::one());
    (raw, summed)
}

pub fn hybrid_ledger(l_max: Monomial, vol_weight: Monomial) -> (MonomialBound, MonomialBound) {
    let bracket = MonomialBound::new(&[
        ("X", m(&[(X, (1, 1))])),
        ("X^2·√δ'·y/p^l", m(&[(X, (2, 1)), (Delta, (1, 2)), (Y, (1, 1)), (PL, (-1, 1))])),
        ("X^4·δ'/p^l", m(&[(X, (4, 1)), (Delta, (1, 1)), (PL, (-1, 1))])),
    ]);
    let pre = m(&[(T, (1, 2)), (N0, (1, 2)), (X, (-2, 1)), (Delta, (-1, 2))]).mul(&vol_weight);
    let raw = bracket.times(&pre);
    let summed = raw.sum_over(Delta, &m(&[(T, (-1, 1))]), &Monomial::one()).sum_over(PL, &Monomial::one(), &l_max);
    (raw, summed)
}

/// p^{(n+l)/2} with l ≤ n.
pub fn amplified_ledger() -> (MonomialBound, MonomialBound) {
    hybrid_ledger(m(&[(N0, (1, 2))]), m(&[(N0, (1, 4)), (PL, (1, 2))]))
}

/// p^{l/2} with l ≤ 2n.
pub fn improved_ledger() -> (MonomialBound, MonomialBound) {
    hybrid_ledger(m(&[(N0, (1, 1))]), m(&[(PL, (1, 2))]))
}

/// Squared Fourier-side bound (N₀T)^{1/3} + N₀T/y.
pub fn fourier_bound() -> MonomialBound {
    MonomialBound::new(&[
        ("(N0T)^{1/3}", m(&[(T, (1, 3)), (N0, (1, 3))])),
        ("N0T/y", m(&[(T, (1, 1)), (N0, (1, 1)), (Y, (-1, 1))])),
    ])
}

fn run_ledger(
    name: &'static str,
    citation: &'static str,
    (raw, summed): (MonomialBound, MonomialBound),
    summed_expected: Vec<Monomial>,
    x_expected: Monomial,
    crossover: bool,
) -> Result<LedgerResult> {
    let choice = optimize_x(&summed, &default_weights())?;
    let w = default_weights();
    let main = choice
        .bound
        .terms
        .iter()
        .filter(|t| t.mono.exp(Y).is_zero())
        .map(|t| t.mono.clone())
        .max_by_key(|mo| mo.weighted(&w))
        .ok_or(Error::Degenerate)?;
    let y_term = choice.bound.terms.iter().find(|t| !t.mono.exp(Y).is_zero()).map(|t| t.mono.clone()).ok_or(Error::Degenerate)?;
    let (crossover_sqrt_y, fourier_at_crossover) = if crossover {
        let y_star = main.div(&y_term.without(Y)).pow(Q::from(1) / y_term.exp(Y));
        (Some(y_star.pow(q(1, 2))), Some(fourier_bound().substitute(Y, &y_star).pruned()))
    } else {
        (None, None)
    };
    Ok(LedgerResult {
        name,
        citation,
        raw,
        summed,
        summed_expected,
        x_expected,
        sup_main: main.pow(q(1, 2)),
        main,
        y_term,
        crossover_sqrt_y,
        fourier_at_crossover,
        choice,
    })
}

pub fn derive_theorem_exponents() -> Result<ExponentReport> {
    let naive = run_ledger(
        "naive",
        "trivial p-adic volume bound, dyadic δ' ≥ 1/T",
        naive_ledger(),
        vec![
            m(&[(T, (1, 1)), (N0, (1, 1)), (X, (-1, 1))]),
            m(&[(T, (3, 4)), (N0, (1, 1)), (X, (2, 1))]),
            m(&[(T, (1, 2)), (N0, (1, 1)), (Y, (1, 1))]),
        ],
        m(&[(T, (1, 12))]),
        false,
    )?;
    let amplified = run_ledger(
        "amplified",
        "hybrid volume bound p^{(n+l)/2}, l ≤ n",
        amplified_ledger(),
        vec![
            m(&[(T, (1, 1)), (N0, (1, 1)), (X, (-1, 1))]),
            m(&[(T, (1, 2)), (N0, (3, 4)), (X, (2, 1))]),
            m(&[(T, (1, 2)), (N0, (3, 4)), (Y, (1, 1))]),
        ],
        m(&[(T, (1, 6)), (N0, (1, 12))]),
        true,
    )?;
    let improved = run_ledger(
        "improved",
        "matrix-coefficient volume bound p^{l/2}, l ≤ 2n",
        improved_ledger(),
        vec![
            m(&[(T, (1, 1)), (N0, (1, 1)), (X, (-1, 1))]),
            m(&[(T, (1, 2)), (N0, (1, 2)), (X, (2, 1))]),
            m(&[(T, (1, 2)), (N0, (1, 2)), (Y, (1, 1))]),
        ],
        m(&[(T, (1, 6)), (N0, (1, 6))]),
        true,
    )?;
    let w = default_weights();
    let grid_optimal = [&naive, &amplified, &improved]
        .iter()
        .all(|l| grid_minimum(&l.summed, &w, 24) >= l.choice.value);
    let (t, n) = improved.sup_main.in_t_n();
    let lambda_exponent = t / 2;
    Ok(ExponentReport {
        final_exponent: (lambda_exponent == n).then_some(n),
        lambda_exponent,
        n_exponent: n,
        naive,
        amplified,
        improved,
        grid_optimal,
    })
}

impl ExponentReport {
    pub fn ledgers(&self) -> [&LedgerResult; 3] {
        [&self.naive, &self.amplified, &self.improved]
    }

    /// Every derived quantity against its transcribed target.
    pub fn all_match(&self) -> bool {
        let t = |a, b| m(&[(T, a), (N0, b)]);
        self.ledgers().iter().all(|l| l.summed_ok() && l.x_ok() && l.fourier_ok())
            && self.naive.main == t((11, 12), (1, 1))
            && self.amplified.main == t((5, 6), (11, 12))
            && self.amplified.y_term == m(&[(T, (1, 2)), (N0, (3, 4)), (Y, (1, 1))])
            && self.amplified.sup_main.in_t_n() == (q(1, 2) - q(1, 12), q(1, 4) - q(1, 48))
            && self.amplified.crossover_sqrt_y == Some(t((1, 6), (1, 12)))
            && self.improved.main == t((5, 6), (5, 6))
            && self.improved.crossover_sqrt_y == Some(t((1, 6), (1, 6)))
            && self.final_exponent == Some(q(5, 24))
            && self.grid_optimal
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        for l in self.ledgers() {
            s += &format!("[{}] {}\n", l.name, l.citation);
            s += &format!("  summed   : {}\n", l.summed.monomials().iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" + "));
            s += &format!("  X        : {}\n", l.choice.x);
            s += &format!("  |φ'|^2   : {} + {}  (+ε)\n", l.main.display_n(), l.y_term.display_n());
            if let Some(c) = &l.crossover_sqrt_y {
                s += &format!("  √y cross : {}\n", c.display_n());
            }
            s += &format!("  |φ'|     : {}  (+ε)\n", l.sup_main.display_n());
        }
        s += &format!(
            "final: λ^{} · N^{}  →  (Nλ)^{}  (+ε)\n",
            self.lambda_exponent,
            self.n_exponent,
            self.final_exponent.map(|e| e.to_string()).unwrap_or_else(|| "mismatch".into())
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_example_in_pn_form() {
        // T·p^{2n}/X and T^{1/2}p^{3n/2}X² with p^n = N₀^{1/2}
        let b = MonomialBound::new(&[
            ("a", m(&[(T, (1, 1)), (N0, (1, 1)), (X, (-1, 1))])),
            ("b", m(&[(T, (1, 2)), (N0, (3, 4)), (X, (2, 1))])),
        ]);
        let c = optimize_x(&b, &default_weights()).unwrap();
        assert_eq!(c.x, m(&[(T, (1, 6)), (N0, (1, 12))]));
    }

    #[test]
    fn unbounded_when_one_sided() {
        let b = MonomialBound::new(&[("a", m(&[(X, (1, 1))])), ("b", m(&[(T, (1, 1)), (X, (2, 1))]))]);
        assert!(matches!(optimize_x(&b, &default_weights()), Err(Error::Unbounded)));
    }

    #[test]
    fn display() {
        assert_eq!(m(&[(T, (5, 6)), (N0, (11, 12))]).display_n(), "T^5/6·N^11/24");
    }
}
