//! Truncated power series in `t` whose coefficients are truncated
//! polynomials in `x`.
//!
//! A series is known modulo `t`-total-degree `> t_order` and `x`-total-degree
//! `> x_order`. Differentiating in `x` lowers `x_order` by one, so every
//! stored bound is an honest statement of what is known. A negative
//! `x_order` means nothing is known and the series is stored as zero.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeffield::Scalar;
use crate::error::{Error, Result};
use crate::poly::{monomial_string, push_term, MultiIndex, Poly};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    nt: usize,
    nx: usize,
    t_order: u32,
    x_order: i64,
    coeffs: BTreeMap<MultiIndex, Poly>,
}

impl TruncSeries {
    pub fn zero(nt: usize, nx: usize, t_order: u32, x_order: i64) -> Self {
        TruncSeries { nt, nx, t_order, x_order, coeffs: BTreeMap::new() }
    }

    pub fn constant(nt: usize, nx: usize, t_order: u32, x_order: i64, c: Scalar) -> Self {
        Self::t_monomial(nt, nx, t_order, x_order, MultiIndex::zeros(nt), Poly::constant(nx, c))
    }

    pub fn one(nt: usize, nx: usize, t_order: u32, x_order: i64) -> Self {
        Self::constant(nt, nx, t_order, x_order, Scalar::one())
    }

    /// `t^α · p(x)`.
    pub fn t_monomial(nt: usize, nx: usize, t_order: u32, x_order: i64, a: MultiIndex, p: Poly) -> Self {
        let mut s = Self::zero(nt, nx, t_order, x_order);
        s.add_coeff(a, &p);
        s
    }

    pub fn t_var(nt: usize, nx: usize, t_order: u32, x_order: i64, i: usize) -> Self {
        Self::t_monomial(nt, nx, t_order, x_order, MultiIndex::unit(nt, i), Poly::one(nx))
    }

    pub fn x_var(nt: usize, nx: usize, t_order: u32, x_order: i64, j: usize) -> Self {
        Self::t_monomial(nt, nx, t_order, x_order, MultiIndex::zeros(nt), Poly::var(nx, j))
    }

    /// From a polynomial in `nt + nx` variables (`t` first, then `x`).
    pub fn from_tx_poly(p: &Poly, nt: usize, nx: usize, t_order: u32, x_order: i64) -> Self {
        let mut s = Self::zero(nt, nx, t_order, x_order);
        for (a, c) in p.terms() {
            let ta = MultiIndex(a.0[..nt].to_vec());
            let xa = MultiIndex(a.0[nt..nt + nx].to_vec());
            s.add_coeff(ta, &Poly::monomial(nx, xa, c.clone()));
        }
        s
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn t_order(&self) -> u32 {
        self.t_order
    }

    pub fn x_order(&self) -> i64 {
        self.x_order
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, Poly> {
        &self.coeffs
    }

    pub fn coeff(&self, a: &MultiIndex) -> Poly {
        self.coeffs.get(a).cloned().unwrap_or_else(|| Poly::zero(self.nx))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Add `t^a p(x)`, respecting truncation.
    pub fn add_coeff(&mut self, a: MultiIndex, p: &Poly) {
        if a.total() > self.t_order || self.x_order < 0 {
            return;
        }
        let p = p.truncate(self.x_order);
        if p.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&a) {
            Some(v) => {
                v.add_assign_ref(&p);
                if v.is_zero() {
                    self.coeffs.remove(&a);
                }
            }
            None => {
                self.coeffs.insert(a, p);
            }
        }
    }

    /// Restrict to smaller bounds.
    pub fn truncated(&self, t_order: u32, x_order: i64) -> Self {
        let t = t_order.min(self.t_order);
        let x = x_order.min(self.x_order);
        let mut s = Self::zero(self.nt, self.nx, t, x);
        for (a, p) in &self.coeffs {
            s.add_coeff(a.clone(), p);
        }
        s
    }

    fn check_vars(&self, o: &Self) -> Result<()> {
        if self.nt != o.nt || self.nx != o.nx {
            return Err(Error::VarMismatch(format!("({}, {}) vs ({}, {})", self.nt, self.nx, o.nt, o.nx)));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_vars(o)?;
        let mut s = self.truncated(o.t_order, o.x_order);
        for (a, p) in &o.coeffs {
            s.add_coeff(a.clone(), p);
        }
        Ok(s)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_vars(o)?;
        let t = self.t_order.min(o.t_order);
        let x = self.x_order.min(o.x_order);
        let mut s = Self::zero(self.nt, self.nx, t, x);
        for (a, p) in &self.coeffs {
            let ta = a.total();
            if ta > t {
                continue;
            }
            for (b, q) in &o.coeffs {
                if ta + b.total() <= t {
                    s.add_coeff(a.add(b), &p.mul_trunc(q, x));
                }
            }
        }
        Ok(s)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("series variable mismatch")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("series variable mismatch")
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut s = Self::zero(self.nt, self.nx, self.t_order, self.x_order);
        if c.is_zero() {
            return s;
        }
        for (a, p) in &self.coeffs {
            s.coeffs.insert(a.clone(), p.scale(c));
        }
        s
    }

    /// Multiply by `t^μ`.
    pub fn mul_t_monomial(&self, mu: &MultiIndex) -> Self {
        let mut s = Self::zero(self.nt, self.nx, self.t_order, self.x_order);
        for (a, p) in &self.coeffs {
            s.add_coeff(a.add(mu), p);
        }
        s
    }

    /// Multiply every coefficient by the polynomial `q(x)`.
    pub fn mul_x_poly(&self, q: &Poly) -> Self {
        let mut s = Self::zero(self.nt, self.nx, self.t_order, self.x_order);
        for (a, p) in &self.coeffs {
            s.add_coeff(a.clone(), &p.mul_trunc(q, self.x_order));
        }
        s
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nt, self.nx, self.t_order, self.x_order);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `∂/∂x_j`; the result is known to one degree less.
    pub fn x_derivative(&self, j: usize) -> Self {
        self.x_derivative_multi(&MultiIndex::unit(self.nx, j))
    }

    /// `∂_x^β`; lowers `x_order` by `|β|`.
    pub fn x_derivative_multi(&self, beta: &MultiIndex) -> Self {
        let mut s = Self::zero(self.nt, self.nx, self.t_order, self.x_order - beta.total() as i64);
        if beta.is_zero() {
            return self.clone();
        }
        for (a, p) in &self.coeffs {
            s.add_coeff(a.clone(), &p.derivative_multi(beta));
        }
        s
    }

    /// Euler operator `t_i ∂/∂t_i`.
    pub fn t_euler(&self, i: usize) -> Self {
        let mut s = Self::zero(self.nt, self.nx, self.t_order, self.x_order);
        for (a, p) in &self.coeffs {
            if a.0[i] > 0 {
                s.add_coeff(a.clone(), &p.scale(&Scalar::from_int(a.0[i] as i64)));
            }
        }
        s
    }

    /// The `α = 0` coefficient.
    pub fn eval_at_wall(&self) -> Poly {
        self.coeff(&MultiIndex::zeros(self.nt))
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.eval_at_wall().constant_term();
        if c0.is_zero() {
            return Err(Error::NotUnit);
        }
        let inv0 = c0.inv()?;
        let one = Self::one(self.nt, self.nx, self.t_order, self.x_order);
        // self = c0 (1 + r) with r in the maximal ideal
        let r = self.scale(&inv0).sub(&one);
        let steps = self.t_order as i64 + self.x_order.max(0) + 1;
        let mut acc = one.clone();
        let mut term = one;
        let mr = r.neg();
        for _ in 0..steps {
            term = term.mul(&mr);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.scale(&inv0))
    }

    /// Pad variable counts (new variables never appear).
    pub fn with_vars(&self, nt: usize, nx: usize) -> Self {
        let mut s = Self::zero(nt, nx, self.t_order, self.x_order);
        for (a, p) in &self.coeffs {
            s.coeffs.insert(a.resized(nt), p.with_nvars(nx));
        }
        s
    }

    /// Substitute `z = 0` in every coefficient.
    pub fn map_scalars(&self, f: &dyn Fn(&Scalar) -> Result<Scalar>) -> Result<Self> {
        let mut s = Self::zero(self.nt, self.nx, self.t_order, self.x_order);
        for (a, p) in &self.coeffs {
            let mut q = Poly::zero(self.nx);
            for (b, c) in p.terms() {
                q.add_term(b.clone(), &f(c)?);
            }
            s.add_coeff(a.clone(), &q);
        }
        Ok(s)
    }

    /// Equality after truncating both sides to the common bounds.
    pub fn eq_mod(&self, o: &Self) -> bool {
        let t = self.t_order.min(o.t_order);
        let x = self.x_order.min(o.x_order);
        self.truncated(t, x) == o.truncated(t, x)
    }

    /// Terms as `(t-exponent, x-exponent, coefficient)`.
    pub fn flat_terms(&self) -> Vec<(MultiIndex, MultiIndex, Scalar)> {
        let mut out = Vec::new();
        for (a, p) in &self.coeffs {
            for (b, c) in p.terms() {
                out.push((a.clone(), b.clone(), c.clone()));
            }
        }
        out
    }

    /// Text form with `t1.., x1..` names; parseable by the expression grammar.
    pub fn to_expr_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (a, b, c) in self.flat_terms() {
            let mut mono = monomial_string(&a, &|i| format!("t{}", i + 1));
            let xm = monomial_string(&b, &|i| format!("x{}", i + 1));
            if !xm.is_empty() {
                if !mono.is_empty() {
                    mono.push('*');
                }
                mono.push_str(&xm);
            }
            push_term(&mut out, &c, &mono);
        }
        out
    }

    /// Single-term series print as a factor without parentheses.
    pub fn is_single_term(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.values().next().unwrap().terms().len() == 1
    }
}

/// `num/den` as a series; `den` must be a unit at the origin.
pub fn rational_to_series(num: &TruncSeries, den: &TruncSeries, t_order: u32, x_order: i64) -> Result<TruncSeries> {
    let n = num.truncated(t_order, x_order);
    let d = den.truncated(t_order, x_order);
    let inv = d.inverse()?;
    n.try_mul(&inv)
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [T={}, X={}]", self.to_expr_string(), self.t_order, self.x_order)
    }
}

#[derive(serde::Serialize)]
struct XTerm<'a> {
    x_exp: &'a MultiIndex,
    coeff: &'a Scalar,
}

#[derive(serde::Serialize)]
struct TTerm<'a> {
    t_exp: &'a MultiIndex,
    x_poly: Vec<XTerm<'a>>,
}

impl serde::Serialize for TruncSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|(a, p)| TTerm {
            t_exp: a,
            x_poly: p.terms().iter().map(|(b, c)| XTerm { x_exp: b, coeff: c }).collect(),
        }))
    }
}
