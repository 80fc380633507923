//! Multi-indices and sparse commutative polynomials over [`Scalar`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeffield::{forward_owned, Scalar};

/// A vector of nonnegative exponents. Ordered lexicographically for storage;
/// the mathematical partial order is [`MultiIndex::le`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|α| = Σ α_i`.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `≤`.
    pub fn le(&self, o: &MultiIndex) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, o: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, o: &MultiIndex) -> Option<MultiIndex> {
        if o.le(self) {
            Some(MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    /// Pad or cut to `n` entries.
    pub fn resized(&self, n: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v.resize(n, 0);
        MultiIndex(v)
    }

    /// All `κ ≤ self`, in lexicographic order.
    pub fn below(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::new()];
        for &b in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (b as usize + 1));
            for v in &out {
                for k in 0..=b {
                    let mut w: Vec<u32> = v.clone();
                    w.push(k);
                    next.push(w);
                }
            }
            out = next;
        }
        out.into_iter().map(MultiIndex).collect()
    }

    /// `Π C(self_i, κ_i)`.
    pub fn binomial(&self, k: &MultiIndex) -> u64 {
        self.0.iter().zip(&k.0).map(|(&b, &k)| binom(b as u64, k as u64)).product()
    }

    /// `k·α`.
    pub fn scaled(&self, k: u32) -> MultiIndex {
        MultiIndex(self.0.iter().map(|&a| a * k).collect())
    }

    /// `α! = Π α_i!`.
    pub fn factorial(&self) -> u64 {
        self.0.iter().map(|&a| (1..=a as u64).product::<u64>()).product()
    }

    /// `x^α` for a scalar point.
    pub fn eval_monomial(&self, x: &[Scalar]) -> Scalar {
        let mut acc = Scalar::one();
        for (a, xi) in self.0.iter().zip(x) {
            if *a > 0 {
                acc = &acc * &xi.pow(*a);
            }
        }
        acc
    }

    /// Every multi-index of length `n` with `|α| ≤ d`, graded then lexicographic.
    pub fn graded_upto(n: usize, d: u32) -> Vec<MultiIndex> {
        (0..=d).flat_map(|k| Self::of_degree(n, k)).collect()
    }

    /// Every multi-index of length `n` with `|α| = d`, lexicographic ascending.
    pub fn of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        if n == 0 {
            return if d == 0 { vec![MultiIndex(Vec::new())] } else { Vec::new() };
        }
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if i == n - 1 {
                cur[i] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for k in 0..=left {
                cur[i] = k;
                rec(i + 1, left - k, cur, out);
            }
        }
        rec(0, d, &mut cur, &mut out);
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl serde::Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `d! / α!` for `|α| = d`.
pub fn multinomial(d: u32, a: &MultiIndex) -> u64 {
    let mut left = d as u64;
    let mut acc = 1u64;
    for &k in &a.0 {
        acc *= binom(left, k as u64);
        left -= k as u64;
    }
    acc
}

/// Sparse polynomial in `nvars` commuting variables over [`Scalar`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::monomial(nvars, MultiIndex::zeros(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, MultiIndex::unit(nvars, i), Scalar::one())
    }

    pub fn monomial(nvars: usize, a: MultiIndex, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(a, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (MultiIndex, Scalar)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (a, c) in it {
            p.add_term(a, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<MultiIndex, Scalar> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|a| a.is_zero())
    }

    pub fn coeff(&self, a: &MultiIndex) -> Scalar {
        self.terms.get(a).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&MultiIndex::zeros(self.nvars))
    }

    pub fn add_term(&mut self, a: MultiIndex, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&a) {
            Some(v) => {
                let s = &*v + c;
                if s.is_zero() {
                    self.terms.remove(&a);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(a, c.clone());
            }
        }
    }

    pub fn add_assign_ref(&mut self, o: &Poly) {
        for (a, c) in &o.terms {
            self.add_term(a.clone(), c);
        }
    }

    /// Highest total degree; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.total()).max()
    }

    /// Lowest total degree; `None` for zero.
    pub fn low_degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.total()).min()
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, a: &MultiIndex) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(b, v)| (b.add(a), v.clone())).collect() }
    }

    /// Keep terms of total degree `≤ d` (everything is dropped for `d < 0`).
    pub fn truncate(&self, d: i64) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(a, _)| (a.total() as i64) <= d).map(|(a, c)| (a.clone(), c.clone())).collect(),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(a, _)| a.total() == d).map(|(a, c)| (a.clone(), c.clone())).collect(),
        }
    }

    /// Product truncated at total degree `d`.
    pub fn mul_trunc(&self, o: &Poly, d: i64) -> Poly {
        let mut out = Poly::zero(self.nvars);
        if d < 0 {
            return out;
        }
        for (a, c) in &self.terms {
            let ta = a.total() as i64;
            if ta > d {
                continue;
            }
            for (b, e) in &o.terms {
                if ta + b.total() as i64 <= d {
                    out.add_term(a.add(b), &(c * e));
                }
            }
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (a, c) in &self.terms {
            if a.0[i] > 0 {
                let mut b = a.clone();
                b.0[i] -= 1;
                out.add_term(b, &(c * &Scalar::from_int(a.0[i] as i64)));
            }
        }
        out
    }

    /// `∂^β` applied termwise.
    pub fn derivative_multi(&self, beta: &MultiIndex) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (a, c) in &self.terms {
            if let Some(rest) = a.checked_sub(beta) {
                let mut f: i64 = 1;
                for (ai, bi) in a.0.iter().zip(&beta.0) {
                    for k in 0..*bi {
                        f *= (*ai - k) as i64;
                    }
                }
                out.add_term(rest, &(c * &Scalar::from_int(f)));
            }
        }
        out
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        self.terms.iter().map(|(a, c)| c * &a.eval_monomial(x)).sum()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute polynomial `subs[i]` (all in a common ring) for variable `i`.
    pub fn substitute(&self, subs: &[Poly]) -> Poly {
        let target = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Poly::zero(target);
        for (a, c) in &self.terms {
            let mut m = Poly::constant(target, c.clone());
            for (i, &e) in a.0.iter().enumerate() {
                if e > 0 {
                    m = &m * &subs[i].pow(e);
                }
            }
            out.add_assign_ref(&m);
        }
        out
    }

    /// `p(y + a)`.
    pub fn translate(&self, a: &[Scalar]) -> Poly {
        let n = self.nvars;
        let subs: Vec<Poly> = (0..n).map(|i| &Poly::var(n, i) + &Poly::constant(n, a[i].clone())).collect();
        if n == 0 {
            return self.clone();
        }
        self.substitute(&subs)
    }

    /// Reinterpret in `n` variables (extra variables appended or unused ones dropped).
    pub fn with_nvars(&self, n: usize) -> Poly {
        Poly { nvars: n, terms: self.terms.iter().map(|(a, c)| (a.resized(n), c.clone())).collect() }
    }

    /// Apply `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Poly {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(a, c)| (a.clone(), f(c))))
    }

    /// Text form with the given variable names.
    pub fn fmt_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<&MultiIndex> = self.terms.keys().collect();
        keys.sort_by(|a, b| b.total().cmp(&a.total()).then_with(|| b.cmp(a)));
        let mut out = String::new();
        for a in keys {
            let c = &self.terms[a];
            let mono = monomial_string(a, name);
            push_term(&mut out, c, &mono);
        }
        out
    }
}

pub(crate) fn monomial_string(a: &MultiIndex, name: &dyn Fn(usize) -> String) -> String {
    let parts: Vec<String> = a
        .0
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { name(i) } else { format!("{}^{}", name(i), e) })
        .collect();
    parts.join("*")
}

/// Append `c*mono` to a signed sum string.
pub(crate) fn push_term(out: &mut String, c: &Scalar, mono: &str) {
    let neg = c.reads_negative();
    let mag = if neg { -c } else { c.clone() };
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    if mono.is_empty() {
        if mag.is_compound() {
            out.push_str(&format!("({})", mag));
        } else {
            out.push_str(&mag.to_string());
        }
    } else if mag.is_one() {
        out.push_str(mono);
    } else if mag.is_compound() {
        out.push_str(&format!("({})*{}", mag, mono));
    } else {
        out.push_str(&format!("{}*{}", mag, mono));
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&|i| format!("v{}", i + 1)))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign_ref(o);
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (a, c) in &o.terms {
            out.add_term(a.clone(), &-c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect() }
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars.max(o.nvars));
        for (a, c) in &self.terms {
            for (b, e) in &o.terms {
                out.add_term(a.add(b), &(c * e));
            }
        }
        out
    }
}

forward_owned!(Poly, Add, add);
forward_owned!(Poly, Sub, sub);
forward_owned!(Poly, Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_enumeration_counts() {
        assert_eq!(MultiIndex::graded_upto(2, 3).len(), 10);
        assert_eq!(MultiIndex::of_degree(3, 2).len(), 6);
        assert_eq!(MultiIndex::graded_upto(0, 4).len(), 1);
    }

    #[test]
    fn translate_matches_expansion() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x * &x) + &y;
        let q = p.translate(&[Scalar::from_int(1), Scalar::from_int(2)]);
        let expect = &(&(&(&x * &x) + &x.scale(&Scalar::from_int(2))) + &Poly::constant(2, Scalar::from_int(3))) + &y;
        assert_eq!(q, expect);
    }

    #[test]
    fn derivative_multi_matches_iterated() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x.pow(3) * &y.pow(2)) + &x;
        let d = p.derivative_multi(&MultiIndex(vec![2, 1]));
        assert_eq!(d, p.derivative(0).derivative(0).derivative(1));
    }
}
