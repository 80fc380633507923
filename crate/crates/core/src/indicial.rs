//! Indicial matrices, resonances, and the two spectral hypotheses on the
//! reduced symbol: non-degeneracy of its `ξ`-gradient and non-vanishing of
//! its determinant on the closed positive orthant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffield::roots::integer_roots;
use crate::coeffield::{GaussRat, Scalar, UPoly};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::opalg::{OpMatrix, StarSymbol};
use crate::poly::{MultiIndex, Poly};

/// `σ_*(P)(x, λ)` as a matrix of polynomials in `λ` (and `x` when flagged).
///
/// Entries live in `nt + nx` variables, `λ` first. When `x_dependent` is
/// false the `x` variables do not occur.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicialMatrix {
    pub m: usize,
    pub nt: usize,
    pub nx: usize,
    pub entries: Vec<Poly>,
    pub x_dependent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaHit {
    pub gamma: MultiIndex,
    /// Vanishing order in `z` of `det(λ+γ)`; `None` when it vanishes identically.
    pub z_order: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResonanceReport {
    pub lambda: Vec<Scalar>,
    pub gamma_hits: Vec<GammaHit>,
    pub search_bound: u32,
    pub certified_complete: bool,
}

impl ResonanceReport {
    pub fn lambda_text(&self) -> String {
        let v: Vec<String> = self.lambda.iter().map(|s| s.to_string()).collect();
        format!("({})", v.join(", "))
    }

    pub fn is_empty(&self) -> bool {
        self.gamma_hits.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NondegReport {
    pub verdict: Verdict,
    /// How the verdict was reached: `rank`, `search`, or `cone`.
    pub method: &'static str,
    /// `γ ∈ ℕⁿ∖0` with `Σ γ_ν ∂σ̄/∂ξ_ν ≡ 0` on failure.
    #[serde(serialize_with = "ser_bigints")]
    pub witness: Option<Vec<BigInt>>,
}

fn ser_bigints<S: serde::Serializer>(v: &Option<Vec<BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().map(|w| w.iter().map(|k| k.to_string()).collect::<Vec<_>>()).serialize(s)
}

/// Sign certificate from Bernstein subdivision.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergCertificate {
    pub cells: usize,
    /// Lower bound for `|det σ̄_*|` on the standard simplex.
    pub epsilon: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergReport {
    pub verdict: Verdict,
    pub certificate: Option<ConvergCertificate>,
    /// Exact zero (one point) or a sign-change bracket (two points).
    pub witness: Vec<Vec<Scalar>>,
}

fn star_entry_poly(sym: &StarSymbol, i: usize, j: usize) -> Result<Poly> {
    let e = sym.matrix().entry(i, j);
    let (nt, nx) = (e.nt(), e.nx());
    let mut out = Poly::zero(nt + nx);
    for ((a, b), s) in e.terms() {
        if !b.is_zero() {
            return Err(Error::Domain(
                "sigma_* contains x-derivatives; use the frobenius solver's lexicographic recursion instead".into(),
            ));
        }
        for (xa, c) in s.coeff(&MultiIndex::zeros(nt)).terms() {
            let mut k = a.0.clone();
            k.extend_from_slice(&xa.0);
            out.add_term(MultiIndex(k), c);
        }
    }
    Ok(out)
}

/// `σ_*(P)(x, λ)`, optionally evaluated at `x = x°`.
pub fn indicial_matrix(p: &OpMatrix, x0: Option<&[Scalar]>) -> Result<IndicialMatrix> {
    let sym = p.sigma_star();
    from_star(&sym, x0)
}

pub fn from_star(sym: &StarSymbol, x0: Option<&[Scalar]>) -> Result<IndicialMatrix> {
    let m = sym.m();
    let (nt, nx) = (sym.matrix().nt(), sym.matrix().nx());
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            entries.push(star_entry_poly(sym, i, j)?);
        }
    }
    let x_dependent = entries.iter().any(|p| p.terms().keys().any(|k| k.0[nt..].iter().any(|&e| e > 0)));
    let ind = IndicialMatrix { m, nt, nx, entries, x_dependent };
    match x0 {
        Some(pt) => ind.at_point(pt),
        None => Ok(ind),
    }
}

impl IndicialMatrix {
    /// Evaluate the `x` variables at `x°`.
    pub fn at_point(&self, x0: &[Scalar]) -> Result<IndicialMatrix> {
        if x0.len() != self.nx {
            return Err(Error::SizeMismatch(format!("point has {} coordinates, expected {}", x0.len(), self.nx)));
        }
        let subs: Vec<Poly> = (0..self.nt)
            .map(|i| Poly::var(self.nt + self.nx, i))
            .chain(x0.iter().map(|c| Poly::constant(self.nt + self.nx, c.clone())))
            .collect();
        let entries = self.entries.iter().map(|p| p.substitute(&subs)).collect();
        Ok(IndicialMatrix { m: self.m, nt: self.nt, nx: self.nx, entries, x_dependent: false })
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.m + j]
    }

    /// Entries as polynomials in `λ` only (requires `x`-independence).
    fn lambda_entries(&self) -> Result<Vec<Poly>> {
        if self.x_dependent {
            return Err(Error::Domain("indicial matrix depends on x; evaluate at a point first".into()));
        }
        Ok(self.entries.iter().map(|p| p.with_nvars(self.nt)).collect())
    }

    /// `det σ_*(P)(λ)` as a polynomial in `λ`.
    pub fn det(&self) -> Result<Poly> {
        Ok(poly_det(&self.lambda_entries()?, self.m))
    }

    /// Numeric matrix at `λ = λ°`.
    pub fn eval(&self, lambda: &[Scalar]) -> Result<Matrix> {
        let e = self.lambda_entries()?;
        let rows = (0..self.m).map(|i| (0..self.m).map(|j| e[i * self.m + j].eval(lambda)).collect()).collect();
        Ok(Matrix::from_rows(rows))
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        let (nt, nx) = (self.nt, self.nx);
        let name = move |k: usize| if k < nt { format!("xi{}", k + 1) } else { format!("x{}", k - nt + 1) };
        let _ = nx;
        (0..self.m).map(|i| (0..self.m).map(|j| self.entry(i, j).fmt_with(&name)).collect()).collect()
    }
}

/// Determinant of a square polynomial matrix by cofactor expansion.
pub fn poly_det(entries: &[Poly], m: usize) -> Poly {
    let nv = entries[0].nvars();
    match m {
        0 => Poly::one(nv),
        1 => entries[0].clone(),
        2 => &(&entries[0] * &entries[3]) - &(&entries[1] * &entries[2]),
        _ => {
            let mut acc = Poly::zero(nv);
            for j in 0..m {
                if entries[j].is_zero() {
                    continue;
                }
                let minor: Vec<Poly> = (1..m)
                    .flat_map(|r| (0..m).filter(move |&c| c != j).map(move |c| (r, c)))
                    .map(|(r, c)| entries[r * m + c].clone())
                    .collect();
                let term = &entries[j] * &poly_det(&minor, m - 1);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Multiply by the power of `z` making every coefficient finite and the
/// polynomial nonzero at `z = 0`; returns the value at `z = 0`.
fn z_leading(p: &Poly) -> Poly {
    let Some(v) = p.terms().values().filter_map(|c| c.valuation()).min() else {
        return p.clone();
    };
    p.map_coeffs(|c| c.mul_z_pow(-v).at_zero().unwrap_or_else(|_| Scalar::zero()))
}

fn scalar_to_gauss(c: &Scalar) -> GaussRat {
    c.as_gauss().expect("parameter-free scalar")
}

fn upoly_from_univariate(p: &Poly) -> UPoly {
    let deg = p.total_degree().unwrap_or(0) as usize;
    let mut c = vec![GaussRat::zero(); deg + 1];
    for (a, v) in p.terms() {
        c[a.0[0] as usize] = scalar_to_gauss(v);
    }
    UPoly::from_coeffs(c)
}

/// Zeros of `det ind(λ+γ)` for `γ ∈ ℕⁿ`, `1 ≤ |γ| ≤ G`, read at `z = 0`.
pub fn resonance_set(ind: &IndicialMatrix, lambda: &[Scalar], g: u32) -> Result<ResonanceReport> {
    if lambda.len() != ind.nt {
        return Err(Error::SizeMismatch(format!("exponent has {} entries, expected {}", lambda.len(), ind.nt)));
    }
    let q = ind.det()?.translate(lambda);
    let order_at = |gamma: &MultiIndex| -> Option<i64> {
        let gs: Vec<Scalar> = gamma.0.iter().map(|&k| Scalar::from_int(k as i64)).collect();
        q.eval(&gs).valuation()
    };
    let q0 = z_leading(&q);
    let mut hits = Vec::new();
    let certified;
    if ind.nt == 1 {
        if q.is_zero() || q0.is_zero() {
            for k in 1..=g {
                let gamma = MultiIndex(vec![k]);
                let z_order = order_at(&gamma);
                hits.push(GammaHit { gamma, z_order });
            }
            certified = false;
        } else {
            // resonance at z = 0 means a positive-order zero of q(γ)(z)
            let at0 = q.map_coeffs(|c| c.at_zero().unwrap_or_else(|_| Scalar::zero()));
            let shifted = if at0.is_zero() || q.terms().values().any(|c| c.valuation().unwrap_or(0) < 0) { q0.clone() } else { at0 };
            let roots = integer_roots(&upoly_from_univariate(&shifted))
                .ok_or_else(|| Error::Domain("constant term too large for exact integer-root search".into()))?;
            let positive: Vec<u32> = roots.iter().filter(|(r, _)| r.is_positive()).map(|(r, _)| u32::try_from(r).unwrap_or(u32::MAX)).collect();
            for &k in &positive {
                if k <= g {
                    let gamma = MultiIndex(vec![k]);
                    let z_order = order_at(&gamma);
                    if z_order.is_none_or(|o| o > 0) {
                        hits.push(GammaHit { gamma, z_order });
                    }
                }
            }
            certified = positive.iter().all(|&k| k <= g);
        }
    } else {
        let gammas: Vec<MultiIndex> = (1..=g).flat_map(|d| MultiIndex::of_degree(ind.nt, d)).collect();
        let found: Vec<Option<GammaHit>> = gammas
            .par_iter()
            .map(|gamma| {
                let z_order = order_at(gamma);
                z_order.is_none_or(|o| o > 0).then(|| GammaHit { gamma: gamma.clone(), z_order })
            })
            .collect();
        hits.extend(found.into_iter().flatten());
        certified = growth_bound(&q0).is_some_and(|b| BigRational::from_integer(g.into()) >= b);
    }
    Ok(ResonanceReport { lambda: lambda.to_vec(), gamma_hits: hits, search_bound: g, certified_complete: certified })
}

/// Bound `B` such that the polynomial has no zeros on `ℕⁿ` with `|γ| > B`:
/// top homogeneous part `h` with `|h| ≥ ε|γ|^d` on the orthant, remainder
/// bounded by `(Σ C_k)|γ|^{d−1}`.
fn growth_bound(q: &Poly) -> Option<BigRational> {
    let d = q.total_degree()?;
    let h = q.homogeneous_part(d);
    let rep = converg_poly(&h);
    let cert = rep.certificate?;
    let eps = scalar_to_gauss(&cert.epsilon).re;
    let mut c = BigRational::zero();
    for (a, v) in q.terms() {
        if a.total() < d {
            let g = scalar_to_gauss(v);
            c += g.re.abs() + g.im.abs();
        }
    }
    Some(c / eps)
}

/// Real-linear independence of `∂σ̄/∂ξ_ν`, then search, then an exact cone test.
pub fn check_nondeg(p: &OpMatrix) -> Result<NondegReport> {
    let bar = p.sigma_bar_star()?;
    if !bar.is_scalar_matrix() {
        return Err(Error::Domain("reduced symbol is not a scalar matrix".into()));
    }
    let ind = from_star(&bar, None)?;
    nondeg_poly(ind.entry(0, 0), ind.nt)
}

/// The non-degeneracy test for a polynomial whose first `nt` variables are `ξ`.
pub fn nondeg_poly(s: &Poly, nt: usize) -> Result<NondegReport> {
    let derivs: Vec<Poly> = (0..nt).map(|v| s.derivative(v)).collect();
    let mut monos: Vec<MultiIndex> = derivs.iter().flat_map(|d| d.terms().keys().cloned()).collect();
    monos.sort();
    monos.dedup();
    // real coordinates: Re and Im of each coefficient
    let mut cols: Vec<Vec<Scalar>> = Vec::with_capacity(nt);
    for d in &derivs {
        let mut col = Vec::with_capacity(2 * monos.len());
        for k in &monos {
            let c = d.coeff(k);
            let g = c.as_gauss().ok_or_else(|| Error::Domain("reduced symbol depends on z".into()))?;
            col.push(Scalar::from_gauss(GaussRat::from_rational(g.re.clone())));
            col.push(Scalar::from_gauss(GaussRat::from_rational(g.im.clone())));
        }
        cols.push(col);
    }
    let rows = 2 * monos.len();
    let a = Matrix::from_rows((0..rows).map(|r| (0..nt).map(|c| cols[c][r].clone()).collect()).collect());
    if nt == 0 || a.rank() == nt {
        return Ok(NondegReport { verdict: Verdict::Pass, method: "rank", witness: None });
    }
    let deg = s.total_degree().unwrap_or(0).max(1);
    for total in 1..=2 * deg {
        for gamma in MultiIndex::of_degree(nt, total) {
            let v: Vec<Scalar> = gamma.0.iter().map(|&k| Scalar::from_int(k as i64)).collect();
            if a.mul_vec(&v).iter().all(|x| x.is_zero()) {
                let w = gamma.0.iter().map(|&k| BigInt::from(k)).collect();
                return Ok(NondegReport { verdict: Verdict::Fail, method: "search", witness: Some(w) });
            }
        }
    }
    match nonneg_kernel_vector(&a) {
        Some(w) => Ok(NondegReport { verdict: Verdict::Fail, method: "cone", witness: Some(w) }),
        None => Ok(NondegReport { verdict: Verdict::Pass, method: "cone", witness: None }),
    }
}

/// A nonzero vector `v ≥ 0` with `A v = 0`, scaled to integers, if one exists.
///
/// The set `{v ∈ ker A, v ≥ 0, Σv = 1}` is a polytope; when nonempty it has a
/// vertex, which is the unique solution after forcing enough coordinates to 0.
fn nonneg_kernel_vector(a: &Matrix) -> Option<Vec<BigInt>> {
    let n = a.cols();
    let kdim = a.nullspace().len();
    if kdim == 0 {
        return None;
    }
    let zero_count = kdim - 1;
    let mut subset: Vec<usize> = (0..zero_count).collect();
    loop {
        let mut rows: Vec<Vec<Scalar>> = (0..a.rows()).map(|r| a.row(r).to_vec()).collect();
        let mut rhs = vec![Scalar::zero(); a.rows()];
        for &s in &subset {
            let mut r = vec![Scalar::zero(); n];
            r[s] = Scalar::one();
            rows.push(r);
            rhs.push(Scalar::zero());
        }
        rows.push(vec![Scalar::one(); n]);
        rhs.push(Scalar::one());
        let sys = Matrix::from_rows(rows);
        if sys.rank() == n {
            if let Some(v) = sys.solve(&rhs) {
                let gv: Vec<GaussRat> = v.iter().map(scalar_to_gauss).collect();
                if gv.iter().all(|g| !g.re.is_negative()) {
                    let l = gv.iter().fold(BigInt::one(), |acc, g| num_integer::Integer::lcm(&acc, g.re.denom()));
                    return Some(gv.iter().map(|g| (&g.re * BigRational::from_integer(l.clone())).to_integer()).collect());
                }
            }
        }
        if !next_subset(&mut subset, n) {
            return None;
        }
    }
}

fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        if s[i] < n - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Subdivision budget for the simplex test.
const CELL_BUDGET: usize = 4096;

/// Check `det σ̄_*(P) ≠ 0` on `[0,∞)ⁿ∖0`. `x°` is required when the
/// reduced symbol depends on `x`; the verdict then holds at that point only.
pub fn check_converg(p: &OpMatrix, x0: Option<&[Scalar]>) -> Result<ConvergReport> {
    let bar = p.sigma_bar_star()?;
    let ind = from_star(&bar, x0)?;
    Ok(converg_poly(&ind.det()?))
}

/// The orthant test for a homogeneous polynomial `h` in `ξ`.
pub fn converg_poly(h: &Poly) -> ConvergReport {
    let n = h.nvars();
    let inconclusive = ConvergReport { verdict: Verdict::Inconclusive, certificate: None, witness: vec![] };
    if h.is_zero() {
        let w = vec![vec![Scalar::one(); n.max(1)]];
        return ConvergReport { verdict: Verdict::Fail, certificate: None, witness: w };
    }
    if h.terms().values().any(|c| !c.is_parameter_free()) {
        return inconclusive;
    }
    let d = h.total_degree().unwrap();
    if h.low_degree() != Some(d) {
        // not homogeneous: test the top part
        return converg_poly(&h.homogeneous_part(d));
    }
    let re = h.map_coeffs(|c| Scalar::from_gauss(GaussRat::from_rational(scalar_to_gauss(c).re)));
    let im = h.map_coeffs(|c| Scalar::from_gauss(GaussRat::from_rational(scalar_to_gauss(c).im)));
    let is_real = im.is_zero();
    if n == 0 {
        return ConvergReport { verdict: Verdict::Pass, certificate: Some(ConvergCertificate { cells: 1, epsilon: h.constant_term() }), witness: vec![] };
    }
    let ident: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    let mut stack = vec![ident];
    let mut cells = 0usize;
    let mut eps: Option<BigRational> = None;
    while let Some(cell) = stack.pop() {
        cells += 1;
        if cells > CELL_BUDGET {
            return inconclusive;
        }
        // exact zeros or sign changes at the vertices
        let vals: Vec<(BigRational, BigRational)> = cell.iter().map(|v| (eval_real(&re, v), eval_real(&im, v))).collect();
        for (k, (r, i)) in vals.iter().enumerate() {
            if r.is_zero() && i.is_zero() {
                return ConvergReport { verdict: Verdict::Fail, certificate: None, witness: vec![to_scalars(&cell[k])] };
            }
        }
        if is_real {
            for a in 0..n {
                for b in a + 1..n {
                    if vals[a].0.is_positive() != vals[b].0.is_positive() {
                        return ConvergReport {
                            verdict: Verdict::Fail,
                            certificate: None,
                            witness: vec![to_scalars(&cell[a]), to_scalars(&cell[b])],
                        };
                    }
                }
            }
        }
        let mut bound = None;
        for part in [&re, &im] {
            if part.is_zero() {
                continue;
            }
            let b = bernstein(part, &cell, d);
            if let Some(m) = uniform_sign_min(&b) {
                bound = Some(bound.map_or(m.clone(), |x: BigRational| x.max(m)));
            }
        }
        match bound {
            Some(m) => eps = Some(eps.map_or(m.clone(), |e| e.min(m))),
            None => {
                let (c1, c2) = bisect(&cell);
                stack.push(c2);
                stack.push(c1);
            }
        }
    }
    let eps = Scalar::from_gauss(GaussRat::from_rational(eps.unwrap()));
    ConvergReport { verdict: Verdict::Pass, certificate: Some(ConvergCertificate { cells, epsilon: eps }), witness: vec![] }
}

fn to_scalars(v: &[BigRational]) -> Vec<Scalar> {
    v.iter().map(|r| Scalar::from_gauss(GaussRat::from_rational(r.clone()))).collect()
}

fn eval_real(p: &Poly, v: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (a, c) in p.terms() {
        let mut t = scalar_to_gauss(c).re;
        for (i, &e) in a.0.iter().enumerate() {
            for _ in 0..e {
                t *= &v[i];
            }
        }
        acc += t;
    }
    acc
}

/// Bernstein coefficients of homogeneous `p` of degree `d` on the simplex
/// with the given vertices.
fn bernstein(p: &Poly, verts: &[Vec<BigRational>], d: u32) -> Vec<BigRational> {
    let n = verts.len();
    let subs: Vec<Poly> = (0..n)
        .map(|i| {
            Poly::from_terms(
                n,
                (0..n).map(|k| (MultiIndex::unit(n, k), Scalar::from_gauss(GaussRat::from_rational(verts[k][i].clone())))),
            )
        })
        .collect();
    let q = p.substitute(&subs);
    MultiIndex::of_degree(n, d)
        .into_iter()
        .map(|a| {
            let c = scalar_to_gauss(&q.coeff(&a)).re;
            let multinom = BigInt::from(crate::poly::multinomial(d, &a));
            c / BigRational::from_integer(multinom)
        })
        .collect()
}

/// `min |b|` when all entries are nonzero with a common sign.
fn uniform_sign_min(b: &[BigRational]) -> Option<BigRational> {
    let pos = b.iter().all(|x| x.is_positive());
    let neg = b.iter().all(|x| x.is_negative());
    (pos || neg).then(|| b.iter().map(|x| x.abs()).min().unwrap())
}

/// Split the longest edge at its midpoint.
fn bisect(cell: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<Vec<BigRational>>) {
    let n = cell.len();
    let mut best = (0, 1, BigRational::from_integer((-1).into()));
    for a in 0..n {
        for b in a + 1..n {
            let len: BigRational = cell[a].iter().zip(&cell[b]).map(|(x, y)| (x - y).abs()).sum();
            if len > best.2 {
                best = (a, b, len);
            }
        }
    }
    let (a, b, _) = best;
    let two = BigRational::from_integer(2.into());
    let mid: Vec<BigRational> = cell[a].iter().zip(&cell[b]).map(|(x, y)| (x + y) / &two).collect();
    let mut c1 = cell.to_vec();
    c1[a] = mid.clone();
    let mut c2 = cell.to_vec();
    c2[b] = mid;
    (c1, c2)
}

/// Polynomials `R_i` with `Σ R_i σ_i = Σ ξ_ν^{2L}`, or `None`.
///
/// `R_i` ranges over polynomials of degree `≤ 2L − deg σ_i`; free
/// coefficients are set to zero.
pub fn elliptic_combination(symbols: &[Poly], l: u32) -> Option<Vec<Poly>> {
    let n = symbols.first()?.nvars();
    let top = 2 * l;
    let target = Poly::from_terms(n, (0..n).map(|v| (MultiIndex::unit(n, v).scaled(top), Scalar::one())));
    let mut unknowns: Vec<(usize, MultiIndex)> = Vec::new();
    for (i, s) in symbols.iter().enumerate() {
        let ds = s.total_degree()?;
        if ds > top {
            continue;
        }
        for a in MultiIndex::graded_upto(n, top - ds) {
            unknowns.push((i, a));
        }
    }
    let mut rows: Vec<MultiIndex> = MultiIndex::graded_upto(n, top);
    for (i, a) in &unknowns {
        for k in symbols[*i].mul_monomial(a).terms().keys() {
            rows.push(k.clone());
        }
    }
    rows.sort();
    rows.dedup();
    let mut mat = Matrix::zeros(rows.len(), unknowns.len());
    for (col, (i, a)) in unknowns.iter().enumerate() {
        for (k, c) in symbols[*i].mul_monomial(a).terms() {
            let r = rows.binary_search(k).unwrap();
            mat.set(r, col, c.clone());
        }
    }
    let rhs: Vec<Scalar> = rows.iter().map(|k| target.coeff(k)).collect();
    let sol = mat.solve(&rhs)?;
    let mut out = vec![Poly::zero(n); symbols.len()];
    for ((i, a), c) in unknowns.iter().zip(sol) {
        out[*i].add_term(a.clone(), &c);
    }
    Some(out)
}

/// `σ_*` of a scalar, `x`-free operator as a polynomial in `ξ`.
pub fn xi_polynomial(p: &OpMatrix) -> Result<Poly> {
    let ind = indicial_matrix(p, None)?;
    if ind.m != 1 {
        return Err(Error::Domain("expected a scalar operator".into()));
    }
    Ok(ind.lambda_entries()?.remove(0))
}
