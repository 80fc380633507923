use std::fmt;

use super::matrix::OpMatrix;
use super::operator::RegOperator;
use super::terms::TermMap;
use crate::coeffield::Scalar;
use crate::poly::MultiIndex;

/// Commutative polynomial in `(ξ, τ)` with series coefficients in `(t, x)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CommPoly(pub(crate) TermMap);

impl CommPoly {
    pub fn zero(nt: usize, nx: usize, t_order: u32, x_order: i64) -> Self {
        CommPoly(TermMap::zero(nt, nx, t_order, x_order))
    }

    /// Read an operator's terms as a commutative polynomial.
    pub fn from_operator(op: &RegOperator) -> Self {
        CommPoly(op.0.clone())
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

    pub fn terms(&self) -> &std::collections::BTreeMap<super::Key, crate::series::TruncSeries> {
        &self.0.terms
    }

    pub fn is_zero(&self) -> bool {
        self.0.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        CommPoly(self.0.add(&o.0))
    }

    pub fn sub(&self, o: &Self) -> Self {
        CommPoly(self.0.add(&o.0.neg()))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        CommPoly(self.0.scale(c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = TermMap::zero(self.nt(), self.nx(), self.t_order().min(o.t_order()), self.x_order().min(o.x_order()));
        for ((a1, b1), s1) in &self.0.terms {
            for ((a2, b2), s2) in &o.0.terms {
                out.add_term((a1.add(a2), b1.add(b2)), &s1.mul(s2));
            }
        }
        CommPoly(out)
    }

    pub fn eq_mod(&self, o: &Self) -> bool {
        self.0.eq_mod(&o.0)
    }

    fn map_keys(&self, x_order: i64, f: impl Fn(&MultiIndex, &MultiIndex, &crate::series::TruncSeries) -> Option<(super::Key, crate::series::TruncSeries)>) -> Self {
        let mut out = TermMap::zero(self.nt(), self.nx(), self.t_order(), x_order);
        for ((a, b), s) in &self.0.terms {
            if let Some((k, v)) = f(a, b, s) {
                out.add_term(k, &v);
            }
        }
        CommPoly(out)
    }

    /// `∂/∂ξ_i`.
    pub fn d_xi(&self, i: usize) -> Self {
        self.map_keys(self.x_order(), |a, b, s| {
            let e = a.0[i];
            if e == 0 {
                return None;
            }
            let mut a2 = a.clone();
            a2.0[i] -= 1;
            Some(((a2, b.clone()), s.scale(&Scalar::from_int(e as i64))))
        })
    }

    /// `∂/∂τ_j`.
    pub fn d_tau(&self, j: usize) -> Self {
        self.map_keys(self.x_order(), |a, b, s| {
            let e = b.0[j];
            if e == 0 {
                return None;
            }
            let mut b2 = b.clone();
            b2.0[j] -= 1;
            Some(((a.clone(), b2), s.scale(&Scalar::from_int(e as i64))))
        })
    }

    /// `t_i ∂/∂t_i` applied to the coefficients.
    pub fn t_euler(&self, i: usize) -> Self {
        self.map_keys(self.x_order(), |a, b, s| Some(((a.clone(), b.clone()), s.t_euler(i))))
    }

    /// `∂/∂x_j` applied to the coefficients.
    pub fn d_x(&self, j: usize) -> Self {
        self.map_keys(self.x_order() - 1, |a, b, s| Some(((a.clone(), b.clone()), s.x_derivative(j))))
    }

    pub fn to_expr_string(&self) -> String {
        RegOperator(self.0.clone()).fmt_names("xi", "tau")
    }
}

/// `m × m` matrix of commutative symbols.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymbolMatrix {
    m: usize,
    entries: Vec<CommPoly>,
}

impl SymbolMatrix {
    pub fn new(m: usize, entries: Vec<CommPoly>) -> Self {
        assert_eq!(entries.len(), m * m);
        SymbolMatrix { m, entries }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &CommPoly {
        &self.entries[i * self.m + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn zip(&self, o: &Self, f: impl Fn(&CommPoly, &CommPoly) -> CommPoly) -> Self {
        assert_eq!(self.m, o.m);
        SymbolMatrix { m: self.m, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn map(&self, f: impl Fn(&CommPoly) -> CommPoly) -> Self {
        SymbolMatrix { m: self.m, entries: self.entries.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.m, o.m);
        let m = self.m;
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = self.entry(i, 0).mul(o.entry(0, j));
                for k in 1..m {
                    acc = acc.add(&self.entry(i, k).mul(o.entry(k, j)));
                }
                entries.push(acc);
            }
        }
        SymbolMatrix { m, entries }
    }

    pub fn eq_mod(&self, o: &Self) -> bool {
        self.m == o.m && self.entries.iter().zip(&o.entries).all(|(a, b)| a.eq_mod(b))
    }

    pub fn is_scalar_matrix(&self) -> bool {
        let d = self.entry(0, 0);
        (0..self.m).all(|i| (0..self.m).all(|j| if i == j { self.entry(i, j).eq_mod(d) } else { self.entry(i, j).is_zero() }))
    }

    pub fn to_expr_string(&self) -> String {
        if self.m == 1 {
            return self.entries[0].to_expr_string();
        }
        let rows: Vec<String> = (0..self.m)
            .map(|i| format!("[{}]", (0..self.m).map(|j| self.entry(i, j).to_expr_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

/// Poisson-type bracket
/// `Σ_i (∂_{ξ_i}p · ϑ_i q − ∂_{ξ_i}q · ϑ_i p) + Σ_j (∂_{τ_j}p · ∂_{x_j}q − ∂_{τ_j}q · ∂_{x_j}p)`
/// where `ϑ_i` acts on coefficients as `t_i ∂/∂t_i`.
pub fn poisson_bracket(p: &SymbolMatrix, q: &SymbolMatrix) -> SymbolMatrix {
    let e = p.entry(0, 0);
    let (nt, nx) = (e.nt(), e.nx());
    let mut acc: Option<SymbolMatrix> = None;
    let mut push = |term: SymbolMatrix| {
        acc = Some(match acc.take() {
            None => term,
            Some(a) => a.add(&term),
        })
    };
    for i in 0..nt {
        let a = p.map(|c| c.d_xi(i)).mul(&q.map(|c| c.t_euler(i)));
        let b = q.map(|c| c.d_xi(i)).mul(&p.map(|c| c.t_euler(i)));
        push(a.sub(&b));
    }
    for j in 0..nx {
        let a = p.map(|c| c.d_tau(j)).mul(&q.map(|c| c.d_x(j)));
        let b = q.map(|c| c.d_tau(j)).mul(&p.map(|c| c.d_x(j)));
        push(a.sub(&b));
    }
    acc.unwrap_or_else(|| p.map(|c| c.scale(&Scalar::zero())))
}

/// Image of `σ_*`: polynomial in `ξ` whose coefficients are operators in
/// `x, ∂_x`. Stored as an operator matrix with `t`-order 0, so products are
/// compositions in `D_N[ξ]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StarSymbol(OpMatrix);

impl StarSymbol {
    pub(crate) fn from_matrix(m: OpMatrix) -> Self {
        StarSymbol(m.truncated(0, i64::MAX))
    }

    pub fn matrix(&self) -> &OpMatrix {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.m()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn mul(&self, o: &Self) -> Self {
        StarSymbol(self.0.mul(&o.0))
    }

    pub fn add(&self, o: &Self) -> Self {
        StarSymbol(self.0.add(&o.0))
    }

    pub fn sub(&self, o: &Self) -> Self {
        StarSymbol(self.0.sub(&o.0))
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn eq_mod(&self, o: &Self) -> bool {
        self.0.eq_mod(&o.0)
    }

    pub fn is_scalar_matrix(&self) -> bool {
        self.0.is_scalar_matrix()
    }

    /// True when some coefficient carries `∂_x`.
    pub fn has_dx(&self) -> bool {
        self.0.entries().iter().any(|e| e.terms().keys().any(|(_, b)| !b.is_zero()))
    }

    /// True when no coefficient depends on `x`.
    pub fn is_x_free(&self) -> bool {
        self.0.entries().iter().all(|e| {
            e.terms().values().all(|s| s.coeffs().values().all(|p| p.terms().keys().all(|k| k.is_zero())))
        })
    }

    /// Terms with `|α| + |β| = d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let entries: Vec<RegOperator> = self
            .0
            .entries()
            .iter()
            .map(|e| {
                let mut tm = TermMap::zero(e.nt(), e.nx(), e.t_order(), e.x_order());
                for ((a, b), s) in e.terms() {
                    if a.total() + b.total() == d {
                        tm.add_term((a.clone(), b.clone()), s);
                    }
                }
                RegOperator(tm)
            })
            .collect();
        StarSymbol(OpMatrix::new(self.m(), entries).unwrap())
    }

    /// Text form with `xi1..` for `ξ` and `Dx1..` for `∂_x`.
    pub fn to_expr_string(&self) -> String {
        let m = self.m();
        let e = |i: usize, j: usize| self.0.entry(i, j).fmt_names("xi", "Dx");
        if m == 1 {
            return e(0, 0);
        }
        let rows: Vec<String> =
            (0..m).map(|i| format!("[{}]", (0..m).map(|j| e(i, j)).collect::<Vec<_>>().join(", "))).collect();
        format!("[{}]", rows.join(", "))
    }
}

/// Either kind of symbol.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SymbolPoly {
    SigmaStar(StarSymbol),
    Principal(SymbolMatrix),
}

impl SymbolPoly {
    pub fn kind(&self) -> &'static str {
        match self {
            SymbolPoly::SigmaStar(_) => "sigma_star",
            SymbolPoly::Principal(_) => "principal",
        }
    }

    pub fn to_expr_string(&self) -> String {
        match self {
            SymbolPoly::SigmaStar(s) => s.to_expr_string(),
            SymbolPoly::Principal(s) => s.to_expr_string(),
        }
    }
}

impl fmt::Display for SymbolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}
