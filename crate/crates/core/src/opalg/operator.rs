use std::collections::BTreeMap;
use std::fmt;

use super::terms::{shifted_power, Key, TermMap};
use crate::coeffield::Scalar;
use crate::error::{Error, Result};
use crate::poly::{monomial_string, push_term, MultiIndex, Poly};
use crate::series::TruncSeries;

/// A scalar operator `Σ a_{α,β}(t,x) ϑ^α ∂_x^β`, coefficients on the left.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RegOperator(pub(crate) TermMap);

impl RegOperator {
    pub fn zero(nt: usize, nx: usize, t_order: u32, x_order: i64) -> Self {
        RegOperator(TermMap::zero(nt, nx, t_order, x_order))
    }

    /// Multiplication by a series.
    pub fn from_series(s: &TruncSeries) -> Self {
        let mut op = Self::zero(s.nt(), s.nx(), s.t_order(), s.x_order());
        op.0.add_term((MultiIndex::zeros(s.nt()), MultiIndex::zeros(s.nx())), s);
        op
    }

    pub fn constant(nt: usize, nx: usize, t_order: u32, x_order: i64, c: Scalar) -> Self {
        Self::from_series(&TruncSeries::constant(nt, nx, t_order, x_order, c))
    }

    pub fn one(nt: usize, nx: usize, t_order: u32, x_order: i64) -> Self {
        Self::constant(nt, nx, t_order, x_order, Scalar::one())
    }

    /// `a(t,x) ϑ^α ∂_x^β`.
    pub fn term(s: &TruncSeries, alpha: MultiIndex, beta: MultiIndex) -> Self {
        let mut op = Self::zero(s.nt(), s.nx(), s.t_order(), s.x_order());
        op.0.add_term((alpha, beta), s);
        op
    }

    /// `ϑ_i = t_i ∂/∂t_i`.
    pub fn theta(nt: usize, nx: usize, t_order: u32, x_order: i64, i: usize) -> Self {
        Self::term(&TruncSeries::one(nt, nx, t_order, x_order), MultiIndex::unit(nt, i), MultiIndex::zeros(nx))
    }

    /// `∂/∂x_j`.
    pub fn dx(nt: usize, nx: usize, t_order: u32, x_order: i64, j: usize) -> Self {
        Self::term(&TruncSeries::one(nt, nx, t_order, x_order), MultiIndex::zeros(nt), MultiIndex::unit(nx, j))
    }

    pub fn nt(&self) -> usize {
        self.0.nt
    }

    pub fn nx(&self) -> usize {
        self.0.nx
    }

    pub fn t_order(&self) -> u32 {
        self.0.t_order
    }

    pub fn x_order(&self) -> i64 {
        self.0.x_order
    }

    pub fn terms(&self) -> &BTreeMap<Key, TruncSeries> {
        &self.0.terms
    }

    pub fn coeff(&self, alpha: &MultiIndex, beta: &MultiIndex) -> TruncSeries {
        self.0.terms.get(&(alpha.clone(), beta.clone())).cloned().unwrap_or_else(|| self.0.zero_series())
    }

    pub fn is_zero(&self) -> bool {
        self.0.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        RegOperator(self.0.add(&o.0))
    }

    pub fn sub(&self, o: &Self) -> Self {
        RegOperator(self.0.add(&o.0.neg()))
    }

    pub fn neg(&self) -> Self {
        RegOperator(self.0.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        RegOperator(self.0.scale(c))
    }

    pub fn truncated(&self, t_order: u32, x_order: i64) -> Self {
        RegOperator(self.0.truncated(t_order, x_order))
    }

    pub fn with_vars(&self, nt: usize, nx: usize) -> Self {
        RegOperator(self.0.with_vars(nt, nx))
    }

    /// Equality modulo the common truncation.
    pub fn eq_mod(&self, o: &Self) -> bool {
        self.0.eq_mod(&o.0)
    }

    pub fn map_scalars(&self, f: &dyn Fn(&Scalar) -> Result<Scalar>) -> Result<Self> {
        Ok(RegOperator(self.0.map_scalars(f)?))
    }

    /// Canonical form of the composition `self ∘ o`.
    ///
    /// Uses `ϑ^α t^μ = t^μ (ϑ+μ)^α` and Leibniz for `∂_x^β`. When `self`
    /// differentiates in `x`, the result is known to `x_order − max|β|`.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.0.check_compat(&o.0)?;
        let t_order = self.t_order().min(o.t_order());
        let x_order = self.x_order().min(o.x_order()) - self.0.max_dx() as i64;
        let mut acc = TermMap::zero(self.nt(), self.nx(), t_order, x_order);
        if x_order < 0 && self.nx() > 0 {
            return Ok(RegOperator(acc));
        }
        let mut shift_cache: BTreeMap<(MultiIndex, MultiIndex), Vec<(MultiIndex, Scalar)>> = BTreeMap::new();
        for ((a_th, a_dx), a) in &self.0.terms {
            for ((b_th, b_dx), b) in &o.0.terms {
                for kappa in a_dx.below() {
                    let bin = a_dx.binomial(&kappa);
                    let db = b.x_derivative_multi(&kappa);
                    if db.is_zero() {
                        continue;
                    }
                    let bin = Scalar::from_int(bin as i64);
                    let rest_dx = a_dx.checked_sub(&kappa).unwrap().add(b_dx);
                    let mut groups: BTreeMap<MultiIndex, TruncSeries> = BTreeMap::new();
                    for (mu, c) in db.coeffs() {
                        let expansion = shift_cache.entry((a_th.clone(), mu.clone())).or_insert_with(|| {
                            let cs: Vec<Scalar> = mu.0.iter().map(|&m| Scalar::from_int(m as i64)).collect();
                            shifted_power(a_th, &cs)
                        });
                        for (rho, s) in expansion.iter() {
                            let g = groups
                                .entry(rho.clone())
                                .or_insert_with(|| TruncSeries::zero(db.nt(), db.nx(), db.t_order(), db.x_order()));
                            g.add_coeff(mu.clone(), &c.scale(&(s * &bin)));
                        }
                    }
                    for (rho, g) in groups {
                        let prod = a.mul(&g);
                        acc.add_term((rho.add(b_th), rest_dx.clone()), &prod);
                    }
                }
            }
        }
        Ok(RegOperator(acc))
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("operator variable mismatch")
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nt(), self.nx(), self.t_order(), self.x_order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    /// `ord P`; errors on the zero operator.
    pub fn order(&self) -> Result<u32> {
        self.0.order().ok_or(Error::ZeroOperator)
    }

    /// First term violating `a_{α,β}(0,x) = 0` for `β ≠ 0`.
    pub fn d_star_witness(&self) -> Option<(MultiIndex, MultiIndex)> {
        self.0
            .terms
            .iter()
            .find(|((_, b), s)| !b.is_zero() && !s.eval_at_wall().is_zero())
            .map(|(k, _)| k.clone())
    }

    /// `t^{−λ} P t^{λ}`: substitute `ϑ_i → ϑ_i + λ_i`.
    pub fn conjugate_by_exponent(&self, lambda: &[Scalar]) -> Result<Self> {
        if lambda.len() != self.nt() {
            return Err(Error::SizeMismatch(format!("exponent has {} entries, operator has {} wall variables", lambda.len(), self.nt())));
        }
        let mut acc = TermMap::zero(self.nt(), self.nx(), self.t_order(), self.x_order());
        for ((a, b), s) in &self.0.terms {
            for (rho, c) in shifted_power(a, lambda) {
                acc.add_term((rho, b.clone()), &s.scale(&c));
            }
        }
        Ok(RegOperator(acc))
    }

    /// Apply to `t^λ`-free x-polynomial data at the wall: the `t = 0` part with
    /// `ϑ` replaced by the scalars `xi`, acting on `f(x)`.
    pub fn wall_action(&self, xi: &[Scalar], f: &Poly) -> Poly {
        let mut out = Poly::zero(self.nx());
        for ((a, b), s) in &self.0.terms {
            let c = s.eval_at_wall();
            if c.is_zero() {
                continue;
            }
            let v = a.eval_monomial(xi);
            if v.is_zero() {
                continue;
            }
            out.add_assign_ref(&(&c * &f.derivative_multi(b)).scale(&v));
        }
        out.truncate(self.x_order())
    }

    /// Text form in the expression grammar.
    pub fn to_expr_string(&self) -> String {
        self.fmt_names("th", "Dx")
    }

    pub(crate) fn fmt_names(&self, th: &str, dx: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for ((a, b), s) in &self.0.terms {
            let mut opm = monomial_string(a, &|i| format!("{}{}", th, i + 1));
            let dm = monomial_string(b, &|i| format!("{}{}", dx, i + 1));
            if !dm.is_empty() {
                if !opm.is_empty() {
                    opm.push('*');
                }
                opm.push_str(&dm);
            }
            if s.is_single_term() {
                let (ta, xa, c) = s.flat_terms().pop().unwrap();
                let mut mono = monomial_string(&ta, &|i| format!("t{}", i + 1));
                for part in [monomial_string(&xa, &|i| format!("x{}", i + 1)), opm] {
                    if !part.is_empty() {
                        if !mono.is_empty() {
                            mono.push('*');
                        }
                        mono.push_str(&part);
                    }
                }
                push_term(&mut out, &c, &mono);
            } else if opm.is_empty() {
                let body = s.to_expr_string();
                if out.is_empty() {
                    out.push_str(&body);
                } else {
                    out.push_str(&format!(" + ({})", body));
                }
            } else {
                if !out.is_empty() {
                    out.push_str(" + ");
                }
                out.push_str(&format!("({})*{}", s.to_expr_string(), opm));
            }
        }
        out
    }
}

impl fmt::Display for RegOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

impl fmt::Debug for RegOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [T={}, X={}]", self.to_expr_string(), self.t_order(), self.x_order())
    }
}
