use std::collections::BTreeMap;

use crate::coeffield::Scalar;
use crate::error::{Error, Result};
use crate::poly::MultiIndex;
use crate::series::TruncSeries;

/// Key `(α, β)`: exponent of `ϑ` (or `ξ`) and of `∂_x` (or `τ`).
pub type Key = (MultiIndex, MultiIndex);

/// Shared storage for operators and commutative symbols: a map from
/// `(α, β)` to series coefficients with uniform truncation bounds.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct TermMap {
    pub nt: usize,
    pub nx: usize,
    pub t_order: u32,
    pub x_order: i64,
    pub terms: BTreeMap<Key, TruncSeries>,
}

impl TermMap {
    pub fn zero(nt: usize, nx: usize, t_order: u32, x_order: i64) -> Self {
        TermMap { nt, nx, t_order, x_order, terms: BTreeMap::new() }
    }

    pub fn zero_series(&self) -> TruncSeries {
        TruncSeries::zero(self.nt, self.nx, self.t_order, self.x_order)
    }

    pub fn add_term(&mut self, key: Key, s: &TruncSeries) {
        if s.is_zero() {
            return;
        }
        let s = s.truncated(self.t_order, self.x_order);
        if s.is_zero() {
            return;
        }
        let new = match self.terms.get(&key) {
            Some(v) => v.add(&s).truncated(self.t_order, self.x_order),
            None => s,
        };
        if new.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, new);
        }
    }

    pub fn check_compat(&self, o: &TermMap) -> Result<()> {
        if self.nt != o.nt || self.nx != o.nx {
            return Err(Error::VarMismatch(format!("({}, {}) vs ({}, {})", self.nt, self.nx, o.nt, o.nx)));
        }
        Ok(())
    }

    pub fn add(&self, o: &TermMap) -> TermMap {
        let mut out = self.truncated(o.t_order, o.x_order);
        for (k, s) in &o.terms {
            out.add_term(k.clone(), s);
        }
        out
    }

    pub fn neg(&self) -> TermMap {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> TermMap {
        let mut out = TermMap::zero(self.nt, self.nx, self.t_order, self.x_order);
        if c.is_zero() {
            return out;
        }
        for (k, s) in &self.terms {
            out.terms.insert(k.clone(), s.scale(c));
        }
        out
    }

    pub fn truncated(&self, t_order: u32, x_order: i64) -> TermMap {
        let t = t_order.min(self.t_order);
        let x = x_order.min(self.x_order);
        let mut out = TermMap::zero(self.nt, self.nx, t, x);
        for (k, s) in &self.terms {
            out.add_term(k.clone(), s);
        }
        out
    }

    pub fn eq_mod(&self, o: &TermMap) -> bool {
        let t = self.t_order.min(o.t_order);
        let x = self.x_order.min(o.x_order);
        self.nt == o.nt && self.nx == o.nx && self.truncated(t, x).terms == o.truncated(t, x).terms
    }

    pub fn with_vars(&self, nt: usize, nx: usize) -> TermMap {
        let mut out = TermMap::zero(nt, nx, self.t_order, self.x_order);
        for ((a, b), s) in &self.terms {
            out.terms.insert((a.resized(nt), b.resized(nx)), s.with_vars(nt, nx));
        }
        out
    }

    pub fn map_scalars(&self, f: &dyn Fn(&Scalar) -> Result<Scalar>) -> Result<TermMap> {
        let mut out = TermMap::zero(self.nt, self.nx, self.t_order, self.x_order);
        for (k, s) in &self.terms {
            out.add_term(k.clone(), &s.map_scalars(f)?);
        }
        Ok(out)
    }

    /// Largest `|α| + |β|` over stored terms.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a.total() + b.total()).max()
    }

    pub fn max_dx(&self) -> u32 {
        self.terms.keys().map(|(_, b)| b.total()).max().unwrap_or(0)
    }
}

/// Expansion of `Π (ξ_i + c_i)^{α_i}` as `(ρ, coefficient)` pairs.
pub(crate) fn shifted_power(alpha: &MultiIndex, c: &[Scalar]) -> Vec<(MultiIndex, Scalar)> {
    let mut out: Vec<(Vec<u32>, Scalar)> = vec![(Vec::new(), Scalar::one())];
    for (i, &a) in alpha.0.iter().enumerate() {
        let mut next = Vec::new();
        for (rho, coef) in &out {
            for r in 0..=a {
                let k = a - r;
                let f = if k == 0 {
                    Scalar::one()
                } else if c[i].is_zero() {
                    continue;
                } else {
                    c[i].pow(k)
                };
                let bin = Scalar::from_int(crate::poly::binom(a as u64, r as u64) as i64);
                let mut rr = rho.clone();
                rr.push(r);
                next.push((rr, &(coef * &f) * &bin));
            }
        }
        out = next;
    }
    out.into_iter().map(|(r, c)| (MultiIndex(r), c)).collect()
}
