//! Convergent series solutions `t^λ Σ φ_α(x) t^α` at a regular singularity,
//! logarithmic solutions through a nilpotent lift, the induced equations of
//! an involutive system, and normalized families in a parameter `z`.

mod family;

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::Serialize;

use crate::coeffield::Scalar;
use crate::error::{Error, Result};
use crate::holonomic::ExpPolySolution;
use crate::indicial::{GammaHit, ResonanceReport};
use crate::linalg::Matrix;
use crate::opalg::{OpMatrix, RegOperator};
use crate::poly::{MultiIndex, Poly};

pub use family::{family_solve_and_normalize, FamilyMember, LaurentCoeffs, SolutionFamily};

/// `u = t^λ Σ_{α,κ} φ_{α,κ}(x) t^α (log t)^κ`, truncated at `|α| ≤ t_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSeriesSolution {
    pub lambda: Vec<Scalar>,
    pub m: usize,
    pub nt: usize,
    pub nx: usize,
    pub log_degree: u32,
    pub t_order: u32,
    /// Nonzero coefficients keyed by `(α, κ)`; each is an `m`-vector.
    pub coeffs: BTreeMap<(MultiIndex, MultiIndex), Vec<Poly>>,
    /// Highest `x`-degree known exactly, per `α`. Missing entries mean nothing is known.
    pub x_precision: BTreeMap<MultiIndex, i64>,
}

impl LogSeriesSolution {
    pub fn coeff(&self, alpha: &MultiIndex, kappa: &MultiIndex) -> Vec<Poly> {
        self.coeffs.get(&(alpha.clone(), kappa.clone())).cloned().unwrap_or_else(|| vec![Poly::zero(self.nx); self.m])
    }

    /// Coefficient of `t^α` with no logarithm.
    pub fn series_coeff(&self, alpha: &MultiIndex) -> Vec<Poly> {
        self.coeff(alpha, &MultiIndex::zeros(self.nt))
    }

    pub fn precision_at(&self, alpha: &MultiIndex) -> i64 {
        self.x_precision.get(alpha).copied().unwrap_or(-1)
    }

    /// The `α = 0` part as a polynomial in `y = log t` per component.
    pub fn boundary_log_part(&self) -> Vec<Poly> {
        let zero = MultiIndex::zeros(self.nt);
        let mut out = vec![Poly::zero(self.nt + self.nx); self.m];
        for ((a, k), v) in &self.coeffs {
            if a != &zero {
                continue;
            }
            for (s, p) in v.iter().enumerate() {
                for (b, c) in p.terms() {
                    let mut e = k.0.clone();
                    e.extend_from_slice(&b.0);
                    out[s].add_term(MultiIndex(e), c);
                }
            }
        }
        out
    }

    fn insert(&mut self, alpha: MultiIndex, kappa: MultiIndex, v: Vec<Poly>) {
        if v.iter().all(|p| p.is_zero()) {
            return;
        }
        self.log_degree = self.log_degree.max(kappa.total());
        self.coeffs.insert((alpha, kappa), v);
    }
}

/// `b.v.(u) = φ_0`: the leading coefficient of a log-free solution.
pub fn boundary_value(u: &LogSeriesSolution) -> Result<Vec<Poly>> {
    if u.log_degree > 0 {
        return Err(Error::Domain("boundary value is defined only for solutions without log terms".into()));
    }
    Ok(u.series_coeff(&MultiIndex::zeros(u.nt)))
}

fn poly_text(p: &Poly) -> String {
    p.fmt_with(&|i| format!("x{}", i + 1))
}

impl Serialize for LogSeriesSolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Terms<'a>(&'a LogSeriesSolution);
        impl Serialize for Terms<'_> {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                use serde::ser::SerializeSeq;
                let mut seq = s.serialize_seq(Some(self.0.coeffs.len()))?;
                for ((a, k), v) in &self.0.coeffs {
                    seq.serialize_element(&TermOut {
                        alpha: a,
                        kappa: k,
                        value: v.iter().map(poly_text).collect(),
                        x_precision: self.0.precision_at(a),
                    })?;
                }
                seq.end()
            }
        }
        let mut st = s.serialize_struct("LogSeriesSolution", 7)?;
        st.serialize_field("lambda", &self.lambda)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("nt", &self.nt)?;
        st.serialize_field("nx", &self.nx)?;
        st.serialize_field("log_degree", &self.log_degree)?;
        st.serialize_field("t_order", &self.t_order)?;
        st.serialize_field("terms", &Terms(self))?;
        st.end()
    }
}

#[derive(Serialize)]
struct TermOut<'a> {
    alpha: &'a MultiIndex,
    kappa: &'a MultiIndex,
    value: Vec<String>,
    x_precision: i64,
}

/// One term of the conjugated operator, grouped by its `t`-exponent `μ`.
#[derive(Clone, Debug)]
struct GTerm {
    r: usize,
    s: usize,
    alpha: MultiIndex,
    beta: MultiIndex,
    c: Poly,
}

/// `t^{−λ} P t^λ = Σ_μ t^μ A_μ(ϑ, x, ∂_x)`.
struct Grouped {
    m: usize,
    nt: usize,
    nx: usize,
    x_order: i64,
    groups: BTreeMap<MultiIndex, Vec<GTerm>>,
    max_dx: BTreeMap<MultiIndex, u32>,
}

impl Grouped {
    fn new(p: &OpMatrix) -> Self {
        let m = p.m();
        let mut groups: BTreeMap<MultiIndex, Vec<GTerm>> = BTreeMap::new();
        for r in 0..m {
            for s in 0..m {
                for ((a, b), ser) in p.entry(r, s).terms() {
                    for (mu, c) in ser.coeffs() {
                        groups.entry(mu.clone()).or_default().push(GTerm {
                            r,
                            s,
                            alpha: a.clone(),
                            beta: b.clone(),
                            c: c.clone(),
                        });
                    }
                }
            }
        }
        let max_dx = groups.iter().map(|(k, v)| (k.clone(), v.iter().map(|t| t.beta.total()).max().unwrap_or(0))).collect();
        Grouped { m, nt: p.nt(), nx: p.nx(), x_order: p.x_order(), groups, max_dx }
    }

    /// `A_μ(γ) f`, truncated at `x`-degree `d`.
    fn apply(&self, mu: &MultiIndex, gamma: &MultiIndex, f: &[Poly], d: i64) -> Vec<Poly> {
        let mut out = vec![Poly::zero(self.nx); self.m];
        let Some(terms) = self.groups.get(mu) else {
            return out;
        };
        let g: Vec<Scalar> = gamma.0.iter().map(|&k| Scalar::from_int(k as i64)).collect();
        for t in terms {
            if f[t.s].is_zero() {
                continue;
            }
            let v = t.alpha.eval_monomial(&g);
            if v.is_zero() {
                continue;
            }
            let df = f[t.s].derivative_multi(&t.beta);
            out[t.r].add_assign_ref(&t.c.mul_trunc(&df, d).scale(&v));
        }
        out
    }

    /// `M(γ)(x) = A_0(γ)`, an `m × m` matrix of polynomials in `x`.
    fn wall_matrix(&self, gamma: &MultiIndex) -> Vec<Poly> {
        let mut out = vec![Poly::zero(self.nx); self.m * self.m];
        let g: Vec<Scalar> = gamma.0.iter().map(|&k| Scalar::from_int(k as i64)).collect();
        if let Some(terms) = self.groups.get(&MultiIndex::zeros(self.nt)) {
            for t in terms {
                debug_assert!(t.beta.is_zero());
                let v = t.alpha.eval_monomial(&g);
                if !v.is_zero() {
                    out[t.r * self.m + t.s].add_assign_ref(&t.c.scale(&v));
                }
            }
        }
        out
    }
}

fn constant_matrix(mx: &[Poly], m: usize) -> Matrix {
    Matrix::from_rows((0..m).map(|i| (0..m).map(|j| mx[i * m + j].constant_term()).collect()).collect())
}

fn mat_apply(inv: &Matrix, v: &[Poly], nx: usize) -> Vec<Poly> {
    let m = v.len();
    (0..m)
        .map(|r| {
            let mut acc = Poly::zero(nx);
            for (s, p) in v.iter().enumerate() {
                let c = inv.get(r, s);
                if !c.is_zero() && !p.is_zero() {
                    acc.add_assign_ref(&p.scale(c));
                }
            }
            acc
        })
        .collect()
}

fn poly_mat_apply(mx: &[Poly], v: &[Poly], d: i64) -> Vec<Poly> {
    let m = v.len();
    let nx = v.first().map_or(0, |p| p.nvars());
    (0..m)
        .map(|r| {
            let mut acc = Poly::zero(nx);
            for (s, p) in v.iter().enumerate() {
                acc.add_assign_ref(&mx[r * m + s].mul_trunc(p, d));
            }
            acc
        })
        .collect()
}

/// Solve `M(x) φ = rhs` through `x`-degree `d`, one homogeneous degree at a time
/// with `M(0)^{-1}`. `None` when `M(0)` is singular.
fn solve_wall(mx: &[Poly], m: usize, nx: usize, rhs: &[Poly], d: i64) -> Option<Vec<Poly>> {
    let inv = constant_matrix(mx, m).inverse()?;
    if d < 0 {
        return Some(vec![Poly::zero(nx); m]);
    }
    if mx.iter().all(|p| p.is_constant() || p.is_zero()) {
        let rhs: Vec<Poly> = rhs.iter().map(|p| p.truncate(d)).collect();
        return Some(mat_apply(&inv, &rhs, nx));
    }
    let upper: Vec<Poly> = mx
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.add_term(MultiIndex::zeros(nx), &-p.constant_term());
            q
        })
        .collect();
    let mut phi = vec![Poly::zero(nx); m];
    for k in 0..=d {
        let k = k as u32;
        let corr = poly_mat_apply(&upper, &phi, k as i64);
        let res: Vec<Poly> = rhs.iter().zip(&corr).map(|(a, b)| (a - b).homogeneous_part(k)).collect();
        if res.iter().all(|p| p.is_zero()) {
            continue;
        }
        let step = mat_apply(&inv, &res, nx);
        for (p, q) in phi.iter_mut().zip(&step) {
            p.add_assign_ref(q);
        }
    }
    Some(phi)
}

fn check_inputs(p: &OpMatrix, lambda: &[Scalar], t_order: u32) -> Result<()> {
    if lambda.len() != p.nt() {
        return Err(Error::SizeMismatch(format!("exponent has {} entries, operator has {} wall variables", lambda.len(), p.nt())));
    }
    let d = p.is_d_star();
    if let Some((_, a, b)) = d.witness {
        return Err(Error::NotDStar { alpha: a.0, beta: b.0 });
    }
    if p.t_order() < t_order {
        return Err(Error::Domain(format!(
            "operator coefficients are known only through t-order {}; order {} was requested",
            p.t_order(),
            t_order
        )));
    }
    Ok(())
}

/// Multi-indices `1 ≤ |γ| ≤ T` (outside `skip`) where `det M(γ)(0)` vanishes
/// as an element of the coefficient field.
fn exact_resonances(g: &Grouped, lambda: &[Scalar], t_order: u32, skip: &BTreeMap<MultiIndex, Vec<Poly>>) -> Result<()> {
    let mut hits = Vec::new();
    for gamma in MultiIndex::graded_upto(g.nt, t_order) {
        if skip.contains_key(&gamma) {
            continue;
        }
        let det = constant_matrix(&g.wall_matrix(&gamma), g.m).det();
        if det.is_zero() {
            hits.push(GammaHit { gamma, z_order: None });
        }
    }
    if hits.is_empty() {
        Ok(())
    } else {
        Err(Error::Resonance(Box::new(ResonanceReport {
            lambda: lambda.to_vec(),
            gamma_hits: hits,
            search_bound: t_order,
            certified_complete: false,
        })))
    }
}

type Coeffs = BTreeMap<MultiIndex, Vec<Poly>>;

/// The recursion `M(α°) φ_α° = h_α° − Σ_{μ≠0} A_μ(α°−μ) φ_{α°−μ}`, in graded order.
fn recurse(g: &Grouped, seeds: &Coeffs, rhs: &Coeffs, x_order: i64, t_order: u32) -> Result<(Coeffs, BTreeMap<MultiIndex, i64>)> {
    let base = x_order.min(g.x_order);
    let mut phi: Coeffs = BTreeMap::new();
    let mut prec: BTreeMap<MultiIndex, i64> = BTreeMap::new();
    let zero = vec![Poly::zero(g.nx); g.m];
    for a in MultiIndex::graded_upto(g.nt, t_order) {
        if let Some(s) = seeds.get(&a) {
            phi.insert(a.clone(), s.iter().map(|p| p.truncate(base)).collect());
            prec.insert(a, base);
            continue;
        }
        let mut d = base;
        for (mu, dx) in &g.max_dx {
            if mu.is_zero() {
                continue;
            }
            if let Some(prev) = a.checked_sub(mu) {
                d = d.min(prec[&prev].saturating_sub(*dx as i64));
            }
        }
        prec.insert(a.clone(), d.max(-1));
        if d < 0 {
            phi.insert(a, zero.clone());
            continue;
        }
        let mut r: Vec<Poly> = rhs.get(&a).map(|v| v.iter().map(|p| p.truncate(d)).collect()).unwrap_or_else(|| zero.clone());
        for mu in g.groups.keys() {
            if mu.is_zero() {
                continue;
            }
            let Some(prev) = a.checked_sub(mu) else { continue };
            let contrib = g.apply(mu, &prev, &phi[&prev], d);
            for (x, y) in r.iter_mut().zip(&contrib) {
                *x = &*x - y;
            }
        }
        let mx = g.wall_matrix(&a);
        let v = solve_wall(&mx, g.m, g.nx, &r, d).ok_or_else(|| {
            Error::Resonance(Box::new(ResonanceReport {
                lambda: Vec::new(),
                gamma_hits: vec![GammaHit { gamma: a.clone(), z_order: None }],
                search_bound: t_order,
                certified_complete: false,
            }))
        })?;
        phi.insert(a, v);
    }
    Ok((phi, prec))
}

fn package(lambda: &[Scalar], g: &Grouped, t_order: u32, phi: Coeffs, prec: BTreeMap<MultiIndex, i64>) -> LogSeriesSolution {
    let mut u = LogSeriesSolution {
        lambda: lambda.to_vec(),
        m: g.m,
        nt: g.nt,
        nx: g.nx,
        log_degree: 0,
        t_order,
        coeffs: BTreeMap::new(),
        x_precision: prec,
    };
    let k0 = MultiIndex::zeros(g.nt);
    for (a, v) in phi {
        u.insert(a, k0.clone(), v);
    }
    u
}

/// The unique series solution `T_φ = t^λ Σ_{|α|≤T} φ_α t^α` of `P u = 0` with
/// `φ_0 = seed`.
///
/// Requires `P ∈ D_*`, `σ_*(P)(x,λ) seed = 0`, and `det σ_*(P)(0, λ+α) ≠ 0`
/// for `1 ≤ |α| ≤ T`. Each `φ_α` is known exactly through `x`-degree
/// `x_precision[α]`, which drops when `x`-derivatives feed the recursion.
pub fn solve_series(p: &OpMatrix, lambda: &[Scalar], seed: &[Poly], t_order: u32, x_order: i64) -> Result<LogSeriesSolution> {
    check_inputs(p, lambda, t_order)?;
    if seed.len() != p.m() || seed.iter().any(|q| q.nvars() != p.nx()) {
        return Err(Error::SizeMismatch(format!("seed must be a {}-vector of polynomials in {} variables", p.m(), p.nx())));
    }
    let pl = p.conjugate_by_exponent(lambda)?;
    let g = Grouped::new(&pl);
    let zero = MultiIndex::zeros(g.nt);
    let d0 = x_order.min(g.x_order);
    let seed: Vec<Poly> = seed.iter().map(|q| q.truncate(d0)).collect();
    let wall = poly_mat_apply(&g.wall_matrix(&zero), &seed, d0);
    if wall.iter().any(|q| !q.is_zero()) {
        return Err(Error::SeedNotInNullspace);
    }
    let seeds: Coeffs = [(zero, seed)].into_iter().collect();
    exact_resonances(&g, lambda, t_order, &seeds)?;
    let (phi, prec) = recurse(&g, &seeds, &BTreeMap::new(), x_order, t_order)?;
    Ok(package(lambda, &g, t_order, phi, prec))
}

/// Solve `P u = t^λ Σ h_α t^α` with `u_α` prescribed on the index set of `seeds`
/// (which must contain every `α` where `det σ_*(P)(0, λ+α)` vanishes).
pub fn solve_inhomogeneous(
    p: &OpMatrix,
    lambda: &[Scalar],
    rhs: &BTreeMap<MultiIndex, Vec<Poly>>,
    seeds: &BTreeMap<MultiIndex, Vec<Poly>>,
    t_order: u32,
    x_order: i64,
) -> Result<LogSeriesSolution> {
    check_inputs(p, lambda, t_order)?;
    let pl = p.conjugate_by_exponent(lambda)?;
    let g = Grouped::new(&pl);
    for v in rhs.values().chain(seeds.values()) {
        if v.len() != g.m || v.iter().any(|q| q.nvars() != g.nx) {
            return Err(Error::SizeMismatch(format!("coefficients must be {}-vectors in {} variables", g.m, g.nx)));
        }
    }
    let mut hits = Vec::new();
    for gamma in MultiIndex::graded_upto(g.nt, t_order) {
        if !seeds.contains_key(&gamma) && constant_matrix(&g.wall_matrix(&gamma), g.m).det().is_zero() {
            hits.push(GammaHit { gamma, z_order: None });
        }
    }
    if !hits.is_empty() {
        return Err(Error::Resonance(Box::new(ResonanceReport {
            lambda: lambda.to_vec(),
            gamma_hits: hits,
            search_bound: t_order,
            certified_complete: false,
        })));
    }
    let (phi, prec) = recurse(&g, seeds, rhs, x_order, t_order)?;
    Ok(package(lambda, &g, t_order, phi, prec))
}

/// One nonzero coefficient of `P u` in `t^λ Σ t^α (log t)^κ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualEntry {
    pub alpha: MultiIndex,
    pub kappa: MultiIndex,
    pub component: usize,
    pub value: Poly,
}

impl Serialize for ResidualEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_map(Some(4))?;
        st.serialize_entry("alpha", &self.alpha)?;
        st.serialize_entry("kappa", &self.kappa)?;
        st.serialize_entry("component", &self.component)?;
        st.serialize_entry("value", &poly_text(&self.value))?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub pass: bool,
    pub checked_to: u32,
    /// Nonzero coefficients with `|α| ≤ T`, read to the known `x`-precision.
    pub residuals: Vec<ResidualEntry>,
    /// Coefficients with `T < |α| ≤ T + ord P`, which truncation leaves undetermined.
    pub boundary: Vec<ResidualEntry>,
}

type LogCoeffs = BTreeMap<(MultiIndex, MultiIndex), Vec<Poly>>;

/// `P u` computed term by term from `ϑ_i (t^{λ+α} L^κ) = (λ_i+α_i) t^{λ+α} L^κ + κ_i t^{λ+α} L^{κ−e_i}`.
fn apply_log(p: &OpMatrix, u: &LogSeriesSolution, max_total: u32) -> LogCoeffs {
    let m = p.m();
    let nx = p.nx();
    let mut out: LogCoeffs = BTreeMap::new();
    for r in 0..m {
        for s in 0..m {
            for ((a, b), ser) in p.entry(r, s).terms() {
                for ((alpha, kappa), phi) in &u.coeffs {
                    let f = &phi[s];
                    if f.is_zero() {
                        continue;
                    }
                    let df = f.derivative_multi(b);
                    if df.is_zero() {
                        continue;
                    }
                    let la: Vec<Scalar> = u.lambda.iter().zip(&alpha.0).map(|(l, &k)| l + &Scalar::from_int(k as i64)).collect();
                    for rho in a.below() {
                        if !rho.le(kappa) {
                            continue;
                        }
                        let rest = a.checked_sub(&rho).unwrap();
                        let falling = (kappa.factorial() / kappa.checked_sub(&rho).unwrap().factorial()) as i64;
                        let coef = &(&rest.eval_monomial(&la) * &Scalar::from_int(a.binomial(&rho) as i64)) * &Scalar::from_int(falling);
                        if coef.is_zero() {
                            continue;
                        }
                        let k2 = kappa.checked_sub(&rho).unwrap();
                        for (mu, c) in ser.coeffs() {
                            let a2 = alpha.add(mu);
                            if a2.total() > max_total {
                                continue;
                            }
                            let term = (c * &df).scale(&coef);
                            let e = out.entry((a2, k2.clone())).or_insert_with(|| vec![Poly::zero(nx); m]);
                            e[r].add_assign_ref(&term);
                        }
                    }
                }
            }
        }
    }
    out
}

fn max_dx(p: &OpMatrix) -> u32 {
    p.entries().iter().flat_map(|e| e.terms().keys().map(|(_, b)| b.total())).max().unwrap_or(0)
}

/// Apply `P` to `u` independently of the solver and report every coefficient
/// of `P u` with `|α| ≤ T` that is nonzero within the known `x`-precision.
pub fn verify_residual(p: &OpMatrix, u: &LogSeriesSolution, t_order: u32) -> Result<ResidualReport> {
    if p.m() != u.m || p.nt() != u.nt || p.nx() != u.nx {
        return Err(Error::SizeMismatch("operator and solution shapes differ".into()));
    }
    let t_order = t_order.min(u.t_order);
    let ord = p.order().unwrap_or(0);
    let raw = apply_log(p, u, t_order + ord);
    let px = p.x_order();
    let dx = max_dx(p) as i64;
    let mut residuals = Vec::new();
    let mut boundary = Vec::new();
    for ((a, k), v) in raw {
        if a.total() <= t_order {
            let mut d = px;
            for b in a.below() {
                d = d.min(u.precision_at(&b).saturating_sub(dx));
            }
            for (c, q) in v.into_iter().enumerate() {
                let q = q.truncate(d);
                if !q.is_zero() {
                    residuals.push(ResidualEntry { alpha: a.clone(), kappa: k.clone(), component: c, value: q });
                }
            }
        } else {
            for (c, q) in v.into_iter().enumerate() {
                if !q.is_zero() {
                    boundary.push(ResidualEntry { alpha: a.clone(), kappa: k.clone(), component: c, value: q });
                }
            }
        }
    }
    Ok(ResidualReport { pass: residuals.is_empty(), checked_to: t_order, residuals, boundary })
}

/// `P` acting on `Σ_{|κ|≤d} u_κ (log t)^κ`, written as a matrix operator on the
/// coefficient vector `(u_κ)`: each `ϑ_i` becomes `ϑ_i I + N_i` where `N_i`
/// lowers `κ_i`. Components are ordered `κ`-major (graded), then by row.
pub fn lift_operator(p: &OpMatrix, d: u32) -> Result<(OpMatrix, Vec<MultiIndex>)> {
    let (m, nt, nx) = (p.m(), p.nt(), p.nx());
    let basis = MultiIndex::graded_upto(nt, d);
    let q = basis.len();
    let pos: BTreeMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let big = m * q;
    let mut entries = vec![RegOperator::zero(nt, nx, p.t_order(), p.x_order()); big * big];
    for r in 0..m {
        for s in 0..m {
            let e = p.entry(r, s);
            for ((a, b), ser) in e.terms() {
                for rho in a.below() {
                    let rest = a.checked_sub(&rho).unwrap();
                    let bin = a.binomial(&rho) as i64;
                    for (ki, kp) in basis.iter().enumerate() {
                        let k = kp.add(&rho);
                        let Some(&kj) = pos.get(&k) else { continue };
                        let falling = (k.factorial() / kp.factorial()) as i64;
                        let c = Scalar::from_int(bin * falling);
                        let term = RegOperator::term(&ser.scale(&c), rest.clone(), b.clone());
                        let idx = (ki * m + r) * big + (kj * m + s);
                        entries[idx] = entries[idx].add(&term);
                    }
                }
            }
        }
    }
    Ok((OpMatrix::new(big, entries)?, basis))
}

/// Result of [`solve_with_logs`].
#[derive(Clone, Debug, Serialize)]
pub struct LogSolveReport {
    /// Index of the operator used to drive the recursion.
    pub driver: usize,
    pub solutions: Vec<LogSeriesSolution>,
}

fn separated(p: &OpMatrix, lambda: &[Scalar], t_order: u32) -> Result<Option<ResonanceReport>> {
    let g = Grouped::new(&p.conjugate_by_exponent(lambda)?);
    match exact_resonances(&g, lambda, t_order, &[(MultiIndex::zeros(p.nt()), Vec::new())].into_iter().collect()) {
        Ok(()) => Ok(None),
        Err(Error::Resonance(r)) => Ok(Some(*r)),
        Err(e) => Err(e),
    }
}

/// Solutions with leading part an indicial solution `t^λ v(log t)`: for each
/// basis element, lift the driving operator over log-monomials up to the
/// element's degree and run the series recursion on the lift.
///
/// The driver is the first operator in `D_*` with `det σ_*(P)(λ+γ) ≠ 0` for
/// `1 ≤ |γ| ≤ T`. Basis polynomials are in `y = log t`.
pub fn solve_with_logs(
    system: &[OpMatrix],
    lambda: &[Scalar],
    basis: &[ExpPolySolution],
    t_order: u32,
    x_order: i64,
) -> Result<LogSolveReport> {
    let first = system.first().ok_or_else(|| Error::Domain("empty system".into()))?;
    let mut report = None;
    let mut driver = None;
    for (i, p) in system.iter().enumerate() {
        if !p.is_d_star().value {
            continue;
        }
        match separated(p, lambda, t_order)? {
            None => {
                driver = Some(i);
                break;
            }
            Some(r) => {
                report.get_or_insert(r);
            }
        }
    }
    let Some(driver) = driver else {
        return Err(match report {
            Some(r) => Error::Resonance(Box::new(r)),
            None => Error::Domain("no operator of the system lies in D_*".into()),
        });
    };
    let p = &system[driver];
    let (m, nt, nx) = (first.m(), first.nt(), first.nx());
    let mut solutions = Vec::new();
    for b in basis {
        if b.lambda != lambda {
            return Err(Error::Domain("indicial basis element has a different exponent".into()));
        }
        if b.poly.len() != m {
            return Err(Error::SizeMismatch(format!("indicial solution has {} components, system has {}", b.poly.len(), m)));
        }
        let d = b.degree();
        let (lifted, kb) = lift_operator(p, d)?;
        let mut seed = Vec::with_capacity(lifted.m());
        for k in &kb {
            for s in 0..m {
                seed.push(Poly::constant(nx, b.poly[s].coeff(k)));
            }
        }
        let w = solve_series(&lifted, lambda, &seed, t_order, x_order)?;
        let mut u = LogSeriesSolution {
            lambda: lambda.to_vec(),
            m,
            nt,
            nx,
            log_degree: 0,
            t_order,
            coeffs: BTreeMap::new(),
            x_precision: w.x_precision.clone(),
        };
        for ((a, _), v) in &w.coeffs {
            for (ki, k) in kb.iter().enumerate() {
                u.insert(a.clone(), k.clone(), v[ki * m..(ki + 1) * m].to_vec());
            }
        }
        solutions.push(u);
    }
    Ok(LogSolveReport { driver, solutions })
}

/// Result of [`check_involutive`].
#[derive(Clone, Debug, Serialize)]
pub struct InvolutiveReport {
    pub pass: bool,
    /// Whether `[P, P_i] = S_i P + Σ_j T_ij P_j` holds exactly, per `i`.
    pub identities: Vec<bool>,
    /// Whether every `σ_*(T_ij)` vanishes.
    pub t_sigma_star_zero: bool,
}

/// Check the involutivity data `[P, P_i] = S_i P + Σ_j T_ij P_j` with `σ_*(T_ij) = 0`.
pub fn check_involutive(p: &OpMatrix, others: &[OpMatrix], s: &[OpMatrix], t: &[Vec<OpMatrix>]) -> Result<InvolutiveReport> {
    let k = others.len();
    if s.len() != k || t.len() != k || t.iter().any(|row| row.len() != k) {
        return Err(Error::SizeMismatch(format!("expected {} S-operators and a {}x{} T-array", k, k, k)));
    }
    let mut identities = Vec::with_capacity(k);
    for i in 0..k {
        let mut rhs = s[i].try_mul(p)?;
        for j in 0..k {
            rhs = rhs.try_add(&t[i][j].try_mul(&others[j])?)?;
        }
        let lhs = p.commutator(&others[i])?;
        identities.push(lhs.try_sub(&rhs)?.is_zero());
    }
    let t_sigma_star_zero = t.iter().flatten().all(|op| op.sigma_star().is_zero());
    Ok(InvolutiveReport { pass: t_sigma_star_zero && identities.iter().all(|&b| b), identities, t_sigma_star_zero })
}

/// Result of [`verify_induced`].
#[derive(Clone, Debug, Serialize)]
pub struct InducedReport {
    pub pass: bool,
    /// Whether the boundary data satisfies `σ_*(P_i)(x, λ, ∂_x) v = 0`, per operator.
    pub boundary_satisfies: Vec<bool>,
    pub residuals: Vec<ResidualReport>,
}

/// Apply every `P_i` to `u`. A solution of the driver solves the whole
/// involutive system exactly when its boundary data solves the induced
/// equations; a violation shows up at `α = 0`.
pub fn verify_induced(system: &[OpMatrix], u: &LogSeriesSolution, t_order: u32) -> Result<InducedReport> {
    let mut boundary_satisfies = Vec::with_capacity(system.len());
    let mut residuals = Vec::with_capacity(system.len());
    let zero = MultiIndex::zeros(u.nt);
    let mut wall = u.clone();
    wall.coeffs.retain(|(a, _), _| a == &zero);
    for p in system {
        let star = p.sigma_star().matrix().clone();
        let at_wall = apply_log(&star, &wall, 0);
        let d = u.precision_at(&zero).min(star.x_order()) - max_dx(p) as i64;
        boundary_satisfies.push(at_wall.values().flatten().all(|q| q.truncate(d).is_zero()));
        residuals.push(verify_residual(p, u, t_order)?);
    }
    let pass = residuals.iter().all(|r| r.pass);
    Ok(InducedReport { pass, boundary_satisfies, residuals })
}

/// `m · Π ord P_i`: the expected dimension of the local solution space for a
/// system whose principal symbols meet only at the origin.
pub fn expected_solution_count(system: &[OpMatrix]) -> Result<u64> {
    let first = system.first().ok_or_else(|| Error::Domain("empty system".into()))?;
    let mut acc = first.m() as u64;
    for p in system {
        acc *= p.order()? as u64;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests;
