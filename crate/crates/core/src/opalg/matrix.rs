use std::fmt;

use super::operator::RegOperator;
use super::symbol::{CommPoly, StarSymbol, SymbolMatrix};
use super::terms::TermMap;
use crate::coeffield::{GaussRat, Scalar};
use crate::error::{Error, Result};
use crate::poly::MultiIndex;

/// Square matrix of operators with uniform variable counts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OpMatrix {
    m: usize,
    entries: Vec<RegOperator>,
}

/// Outcome of the `D_*` membership test.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DStarCheck {
    pub value: bool,
    /// Offending entry `(row, col)` and key `(α, β)`.
    pub witness: Option<((usize, usize), MultiIndex, MultiIndex)>,
}

impl OpMatrix {
    pub fn new(m: usize, entries: Vec<RegOperator>) -> Result<Self> {
        if m == 0 || entries.len() != m * m {
            return Err(Error::SizeMismatch(format!("expected {}x{} entries, got {}", m, m, entries.len())));
        }
        let (nt, nx) = (entries[0].nt(), entries[0].nx());
        if entries.iter().any(|e| e.nt() != nt || e.nx() != nx) {
            return Err(Error::VarMismatch("matrix entries use different variable counts".into()));
        }
        Ok(OpMatrix { m, entries })
    }

    pub fn scalar(op: RegOperator) -> Self {
        OpMatrix { m: 1, entries: vec![op] }
    }

    pub fn zero(m: usize, nt: usize, nx: usize, t_order: u32, x_order: i64) -> Self {
        OpMatrix { m, entries: vec![RegOperator::zero(nt, nx, t_order, x_order); m * m] }
    }

    pub fn identity(m: usize, nt: usize, nx: usize, t_order: u32, x_order: i64) -> Self {
        Self::diag(&vec![RegOperator::one(nt, nx, t_order, x_order); m])
    }

    pub fn diag(d: &[RegOperator]) -> Self {
        let m = d.len();
        let z = RegOperator::zero(d[0].nt(), d[0].nx(), d[0].t_order(), d[0].x_order());
        let mut entries = vec![z; m * m];
        for (i, e) in d.iter().enumerate() {
            entries[i * m + i] = e.clone();
        }
        OpMatrix { m, entries }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nt(&self) -> usize {
        self.entries[0].nt()
    }

    pub fn nx(&self) -> usize {
        self.entries[0].nx()
    }

    pub fn t_order(&self) -> u32 {
        self.entries.iter().map(|e| e.t_order()).min().unwrap()
    }

    pub fn x_order(&self) -> i64 {
        self.entries.iter().map(|e| e.x_order()).min().unwrap()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RegOperator {
        &self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[RegOperator] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn zip(&self, o: &Self, f: impl Fn(&RegOperator, &RegOperator) -> RegOperator) -> Result<Self> {
        if self.m != o.m {
            return Err(Error::SizeMismatch(format!("{}x{} vs {}x{}", self.m, self.m, o.m, o.m)));
        }
        if self.nt() != o.nt() || self.nx() != o.nx() {
            return Err(Error::VarMismatch(format!("({}, {}) vs ({}, {})", self.nt(), self.nx(), o.nt(), o.nx())));
        }
        Ok(OpMatrix { m: self.m, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("operator matrix mismatch")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("operator matrix mismatch")
    }

    pub fn neg(&self) -> Self {
        self.map(|e| e.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        self.map(|e| e.scale(c))
    }

    fn map(&self, f: impl Fn(&RegOperator) -> RegOperator) -> Self {
        OpMatrix { m: self.m, entries: self.entries.iter().map(f).collect() }
    }

    /// Canonical form of the product (matrix product with operator entries).
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.m != o.m {
            return Err(Error::SizeMismatch(format!("{}x{} vs {}x{}", self.m, self.m, o.m, o.m)));
        }
        if self.nt() != o.nt() || self.nx() != o.nx() {
            return Err(Error::VarMismatch(format!("({}, {}) vs ({}, {})", self.nt(), self.nx(), o.nt(), o.nx())));
        }
        let m = self.m;
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut acc: Option<RegOperator> = None;
                for k in 0..m {
                    let p = self.entry(i, k).try_mul(o.entry(k, j))?;
                    acc = Some(match acc {
                        None => p,
                        Some(a) => a.add(&p),
                    });
                }
                entries.push(acc.unwrap());
            }
        }
        Ok(OpMatrix { m, entries })
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("operator matrix mismatch")
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.m, self.nt(), self.nx(), self.t_order(), self.x_order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `PQ − QP`.
    pub fn commutator(&self, o: &Self) -> Result<Self> {
        Ok(self.try_mul(o)?.sub(&o.try_mul(self)?))
    }

    /// `ord P`: largest `|α|+|β|` over all entries.
    pub fn order(&self) -> Result<u32> {
        self.entries.iter().filter_map(|e| e.0.order()).max().ok_or(Error::ZeroOperator)
    }

    /// Degree-`k` part `Σ_{|α|+|β|=k} a_{α,β} ξ^α τ^β`.
    pub fn sigma_k(&self, k: u32) -> SymbolMatrix {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let mut tm = TermMap::zero(e.nt(), e.nx(), e.t_order(), e.x_order());
                for ((a, b), s) in e.terms() {
                    if a.total() + b.total() == k {
                        tm.add_term((a.clone(), b.clone()), s);
                    }
                }
                CommPoly(tm)
            })
            .collect();
        SymbolMatrix::new(self.m, entries)
    }

    /// Principal symbol `σ(P) = σ_{ord P}(P)`.
    pub fn sigma_principal(&self) -> Result<SymbolMatrix> {
        Ok(self.sigma_k(self.order()?))
    }

    /// `σ_*(P)`: set `t = 0`, keep `∂_x`, read `ϑ` as `ξ`.
    pub fn sigma_star(&self) -> StarSymbol {
        StarSymbol::from_matrix(self.map(|e| {
            let mut tm = TermMap::zero(e.nt(), e.nx(), 0, e.x_order());
            for (k, s) in e.terms() {
                tm.add_term(k.clone(), s);
            }
            RegOperator(tm)
        }))
    }

    /// `σ̄_*(P)`: the part of `σ_*(P)` of degree `ord P`.
    pub fn sigma_bar_star(&self) -> Result<StarSymbol> {
        let ord = self.order()?;
        Ok(self.sigma_star().homogeneous_part(ord))
    }

    pub fn is_d_star(&self) -> DStarCheck {
        for i in 0..self.m {
            for j in 0..self.m {
                if let Some((a, b)) = self.entry(i, j).d_star_witness() {
                    return DStarCheck { value: false, witness: Some(((i, j), a, b)) };
                }
            }
        }
        DStarCheck { value: true, witness: None }
    }

    pub fn conjugate_by_exponent(&self, lambda: &[Scalar]) -> Result<Self> {
        let entries = self.entries.iter().map(|e| e.conjugate_by_exponent(lambda)).collect::<Result<Vec<_>>>()?;
        Ok(OpMatrix { m: self.m, entries })
    }

    /// Off-diagonal entries vanish and diagonal entries coincide.
    pub fn is_scalar_matrix(&self) -> bool {
        let d = self.entry(0, 0);
        (0..self.m).all(|i| (0..self.m).all(|j| if i == j { self.entry(i, j).eq_mod(d) } else { self.entry(i, j).is_zero() }))
    }

    pub fn truncated(&self, t_order: u32, x_order: i64) -> Self {
        self.map(|e| e.truncated(t_order, x_order))
    }

    pub fn with_vars(&self, nt: usize, nx: usize) -> Self {
        self.map(|e| e.with_vars(nt, nx))
    }

    /// Equality modulo the common truncation of both sides.
    pub fn eq_mod(&self, o: &Self) -> bool {
        self.m == o.m && self.entries.iter().zip(&o.entries).all(|(a, b)| a.eq_mod(b))
    }

    pub fn map_scalars(&self, f: &dyn Fn(&Scalar) -> Result<Scalar>) -> Result<Self> {
        let entries = self.entries.iter().map(|e| e.map_scalars(f)).collect::<Result<Vec<_>>>()?;
        Ok(OpMatrix { m: self.m, entries })
    }

    /// Substitute a value for the deformation parameter `z`.
    pub fn specialize_z(&self, z0: &GaussRat) -> Result<Self> {
        self.map_scalars(&|c| c.eval_z(z0).map(Scalar::from_gauss))
    }

    pub fn to_expr_string(&self) -> String {
        if self.m == 1 {
            return self.entries[0].to_expr_string();
        }
        let rows: Vec<String> = (0..self.m)
            .map(|i| {
                let r: Vec<String> = (0..self.m).map(|j| self.entry(i, j).to_expr_string()).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl fmt::Display for OpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

impl fmt::Debug for OpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [T={}, X={}]", self.to_expr_string(), self.t_order(), self.x_order())
    }
}
