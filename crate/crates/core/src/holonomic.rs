//! Constant-coefficient systems `ℂ[∂]^m / Σ ℂ[∂]·relations` and their
//! exponential-polynomial solutions `p(y) e^{⟨λ,y⟩}`.
//!
//! With `y = log t`, the operator `ϑ_i` becomes `∂/∂y_i` and `t^λ (log t)^κ`
//! becomes `e^{⟨λ,y⟩} y^κ`, so indicial systems are modules over `ℂ[ϑ]`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::coeffield::roots::gaussian_roots;
use crate::coeffield::{GaussRat, Scalar, UPoly};
use crate::error::{Error, Result};
use crate::indicial::poly_det;
use crate::linalg::Matrix;
use crate::opalg::OpMatrix;
use crate::poly::{MultiIndex, Poly};

/// Default ceiling on the polynomial degree bound during stabilization.
pub const MAX_DEGREE_BOUND: u32 = 16;

/// Presentation of `ℂ[∂]^m / Σ ℂ[∂]·r` by row relations `r = (r_1..r_m)`,
/// acting on `u = (u_1..u_m)` as `Σ_j r_j(∂) u_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstCoeffModule {
    pub n: usize,
    pub m: usize,
    pub relations: Vec<Vec<Poly>>,
}

/// `p(y) e^{⟨λ,y⟩}`, vector valued.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolySolution {
    pub lambda: Vec<Scalar>,
    pub poly: Vec<Poly>,
}

impl ExpPolySolution {
    pub fn degree(&self) -> u32 {
        self.poly.iter().filter_map(|p| p.total_degree()).max().unwrap_or(0)
    }

    pub fn poly_strings(&self) -> Vec<String> {
        self.poly.iter().map(|p| p.fmt_with(&|i| format!("y{}", i + 1))).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyReport {
    pub lambda: Vec<Scalar>,
    pub multiplicity: usize,
    pub basis_degrees: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub dimension: usize,
    pub frequencies: Vec<FrequencyReport>,
    pub semisimple: bool,
    /// Degree bound at which all dimensions stabilized.
    pub degree_bound: u32,
}

/// Frequencies found by elimination; `complete` is false when some factor
/// has no root in `ℚ(i)` or elimination degenerates.
#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub candidates: Vec<Vec<Scalar>>,
    pub complete: bool,
    pub unsolved: Vec<String>,
}

impl ConstCoeffModule {
    pub fn new(n: usize, m: usize, relations: Vec<Vec<Poly>>) -> Result<Self> {
        if relations.is_empty() {
            return Err(Error::Domain("module needs at least one relation".into()));
        }
        for r in &relations {
            if r.len() != m || r.iter().any(|p| p.nvars() != n) {
                return Err(Error::SizeMismatch(format!("relation shape must be {} polynomials in {} variables", m, n)));
            }
            if r.iter().all(|p| p.is_zero()) {
                return Err(Error::Domain("zero relation".into()));
            }
        }
        Ok(ConstCoeffModule { n, m, relations })
    }

    /// Scalar module from a list of relations.
    pub fn scalar(n: usize, relations: Vec<Poly>) -> Result<Self> {
        Self::new(n, 1, relations.into_iter().map(|p| vec![p]).collect())
    }

    /// The `ℂ[ϑ]`-module of the indicial system `σ_*(P_i)`: one relation per
    /// matrix row.
    pub fn from_indicial(system: &[OpMatrix]) -> Result<Self> {
        let first = system.first().ok_or_else(|| Error::Domain("empty system".into()))?;
        let (n, m) = (first.nt(), first.m());
        let mut rels = Vec::new();
        for p in system {
            let ind = crate::indicial::indicial_matrix(p, None)?;
            if ind.x_dependent {
                return Err(Error::Domain("indicial system depends on x".into()));
            }
            for i in 0..m {
                let row: Vec<Poly> = (0..m).map(|j| ind.entry(i, j).with_nvars(n)).collect();
                if row.iter().any(|q| !q.is_zero()) {
                    rels.push(row);
                }
            }
        }
        Self::new(n, m, rels)
    }

    /// Apply every relation to `p e^{⟨λ,y⟩}`; returns the polynomial factors.
    pub fn apply(&self, sol: &ExpPolySolution) -> Vec<Poly> {
        self.relations
            .iter()
            .map(|r| {
                let mut acc = Poly::zero(self.n);
                for (rj, pj) in r.iter().zip(&sol.poly) {
                    acc.add_assign_ref(&apply_const(&rj.translate(&sol.lambda), pj));
                }
                acc
            })
            .collect()
    }
}

/// `r(∂) p` for polynomial `p`.
fn apply_const(r: &Poly, p: &Poly) -> Poly {
    let mut acc = Poly::zero(p.nvars());
    for (b, c) in r.terms() {
        let d = p.derivative_multi(b);
        if !d.is_zero() {
            acc.add_assign_ref(&d.scale(c));
        }
    }
    acc
}

/// Basis of `{p : deg p < k, relations annihilate p e^{⟨λ,y⟩}}`.
///
/// Unknown coefficients are ordered by component, then by monomial in
/// ascending lexicographic order within each degree; the basis is the
/// nullspace basis in that order.
pub fn solve_at_exponent(module: &ConstCoeffModule, lambda: &[Scalar], k: u32) -> Result<Vec<ExpPolySolution>> {
    if k == 0 {
        return Err(Error::Domain("degree bound k must be at least 1".into()));
    }
    if lambda.len() != module.n {
        return Err(Error::SizeMismatch(format!("frequency has {} entries, expected {}", lambda.len(), module.n)));
    }
    let n = module.n;
    let monos = MultiIndex::graded_upto(n, k - 1);
    let shifted: Vec<Vec<Poly>> = module.relations.iter().map(|r| r.iter().map(|p| p.translate(lambda)).collect()).collect();
    let cols: Vec<(usize, &MultiIndex)> = (0..module.m).flat_map(|j| monos.iter().map(move |a| (j, a))).collect();
    let mut row_index: BTreeMap<(usize, MultiIndex), usize> = BTreeMap::new();
    let mut entries: Vec<(usize, usize, Scalar)> = Vec::new();
    for (c, (j, a)) in cols.iter().enumerate() {
        let mono = Poly::monomial(n, (*a).clone(), Scalar::one());
        for (ri, r) in shifted.iter().enumerate() {
            for (b, v) in apply_const(&r[*j], &mono).terms() {
                let len = row_index.len();
                let row = *row_index.entry((ri, b.clone())).or_insert(len);
                entries.push((row, c, v.clone()));
            }
        }
    }
    let mut mat = Matrix::zeros(row_index.len(), cols.len());
    for (r, c, v) in entries {
        let cur = mat.get(r, c) + &v;
        mat.set(r, c, cur);
    }
    let basis = if row_index.is_empty() {
        (0..cols.len()).map(|f| (0..cols.len()).map(|i| if i == f { Scalar::one() } else { Scalar::zero() }).collect()).collect()
    } else {
        mat.nullspace()
    };
    Ok(basis
        .into_iter()
        .map(|v| {
            let mut poly = vec![Poly::zero(n); module.m];
            for ((j, a), c) in cols.iter().zip(v) {
                poly[*j].add_term((*a).clone(), &c);
            }
            ExpPolySolution { lambda: lambda.to_vec(), poly }
        })
        .collect())
}

/// Solutions at `λ` with the degree bound raised until the dimension is
/// unchanged by one more step.
pub fn stable_solutions(module: &ConstCoeffModule, lambda: &[Scalar], k0: u32) -> Result<(Vec<ExpPolySolution>, u32)> {
    let mut k = k0.max(1);
    let cap = k + MAX_DEGREE_BOUND;
    let mut prev = solve_at_exponent(module, lambda, k)?;
    while k < cap {
        let next = solve_at_exponent(module, lambda, k + 1)?;
        if next.len() == prev.len() {
            return Ok((prev, k));
        }
        prev = next;
        k += 1;
    }
    Err(Error::Domain("module not visibly finite-dimensional".into()))
}

fn lex_key(v: &[Scalar]) -> Vec<(num_rational::BigRational, num_rational::BigRational)> {
    v.iter()
        .map(|s| match s.as_gauss() {
            Some(g) => (g.re, g.im),
            None => Default::default(),
        })
        .collect()
}

fn lex_cmp(a: &[Scalar], b: &[Scalar]) -> Ordering {
    lex_key(a).cmp(&lex_key(b)).then_with(|| a.iter().map(|s| s.to_string()).cmp(b.iter().map(|s| s.to_string())))
}

/// Solution dimension summed over the candidate frequencies.
pub fn module_dimension(module: &ConstCoeffModule, candidates: &[Vec<Scalar>], k: u32) -> Result<DimensionReport> {
    let mut cands = candidates.to_vec();
    cands.sort_by(|a, b| lex_cmp(a, b));
    cands.dedup();
    let results: Vec<Result<(Vec<ExpPolySolution>, u32)>> =
        cands.par_iter().map(|lam| stable_solutions(module, lam, k)).collect();
    let mut frequencies = Vec::new();
    let mut dimension = 0;
    let mut semisimple = true;
    let mut bound = k.max(1);
    for (lam, res) in cands.into_iter().zip(results) {
        let (sols, kk) = res?;
        bound = bound.max(kk);
        if sols.is_empty() {
            continue;
        }
        dimension += sols.len();
        let basis_degrees: Vec<u32> = sols.iter().map(|s| s.degree()).collect();
        semisimple &= basis_degrees.iter().all(|&d| d == 0);
        frequencies.push(FrequencyReport { lambda: lam, multiplicity: sols.len(), basis_degrees });
    }
    Ok(DimensionReport { dimension, frequencies, semisimple, degree_bound: bound })
}

/// True iff every solution is a pure exponential.
pub fn is_semisimple(module: &ConstCoeffModule, candidates: &[Vec<Scalar>], k: u32) -> Result<bool> {
    Ok(module_dimension(module, candidates, k)?.semisimple)
}

fn to_gauss(c: &Scalar) -> Result<GaussRat> {
    c.as_gauss().ok_or_else(|| Error::Domain("frequency search needs parameter-free relations".into()))
}

/// Univariate polynomial in variable `v` of a polynomial that only uses `v`.
fn univariate(p: &Poly, v: usize) -> Result<UPoly> {
    let mut c = vec![GaussRat::zero(); p.total_degree().unwrap_or(0) as usize + 1];
    for (a, s) in p.terms() {
        c[a.0[v] as usize] = to_gauss(s)?;
    }
    Ok(UPoly::from_coeffs(c))
}

/// Maximal minors of the relation matrix; their common zeros are the
/// frequencies.
fn maximal_minors(module: &ConstCoeffModule) -> Vec<Poly> {
    let (r, m) = (module.relations.len(), module.m);
    if r < m {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..m).collect();
    loop {
        let entries: Vec<Poly> = pick.iter().flat_map(|&i| module.relations[i].iter().cloned()).collect();
        let d = poly_det(&entries, m);
        if !d.is_zero() {
            out.push(d);
        }
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < r - m + i {
                pick[i] += 1;
                for j in i + 1..m {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Frequencies of the module: exact over `ℚ(i)` for `n ≤ 2`.
pub fn find_exponent_candidates(module: &ConstCoeffModule) -> Result<CandidateReport> {
    let polys = maximal_minors(module);
    if polys.is_empty() {
        return Ok(CandidateReport { candidates: vec![], complete: false, unsolved: vec!["relations do not have full rank".into()] });
    }
    match module.n {
        1 => {
            let mut g = UPoly::zero();
            for p in &polys {
                g = UPoly::gcd(&g, &univariate(p, 0)?);
            }
            let split = gaussian_roots(&g);
            let candidates = split.roots.iter().map(|(r, _)| vec![Scalar::from_gauss(r.clone())]).collect();
            let unsolved = if split.complete() { vec![] } else { vec![split.remainder.fmt_var("xi1")] };
            Ok(CandidateReport { candidates, complete: split.complete(), unsolved })
        }
        2 => bivariate_candidates(&polys),
        _ => Err(Error::Domain("built-in frequency search supports n <= 2; supply candidates".into())),
    }
}

fn deg_in(p: &Poly, v: usize) -> u32 {
    p.terms().keys().map(|a| a.0[v]).max().unwrap_or(0)
}

/// Coefficients in `ξ_2` after substituting `ξ_1 = a`.
fn specialize_first(p: &Poly, a: &GaussRat) -> Result<UPoly> {
    let mut c = vec![GaussRat::zero(); deg_in(p, 1) as usize + 1];
    for (k, s) in p.terms() {
        let v = &to_gauss(s)? * &a.pow(k.0[0]);
        c[k.0[1] as usize] = &c[k.0[1] as usize] + &v;
    }
    Ok(UPoly::from_coeffs(c))
}

fn sylvester_resultant(f: &UPoly, g: &UPoly, df: usize, dg: usize) -> GaussRat {
    let size = df + dg;
    let mut mat = Matrix::zeros(size, size);
    for i in 0..dg {
        for k in 0..=df {
            mat.set(i, i + k, Scalar::from_gauss(f.coeff(df - k)));
        }
    }
    for i in 0..df {
        for k in 0..=dg {
            mat.set(dg + i, i + k, Scalar::from_gauss(g.coeff(dg - k)));
        }
    }
    mat.det().as_gauss().unwrap()
}

/// `Res_{ξ_2}(f, g)` as a polynomial in `ξ_1`, by evaluation and interpolation.
fn resultant_in_first(f: &Poly, g: &Poly) -> Result<UPoly> {
    let (df, dg) = (deg_in(f, 1) as usize, deg_in(g, 1) as usize);
    let bound = (f.total_degree().unwrap_or(0) * g.total_degree().unwrap_or(0)) as usize;
    let lc = |p: &Poly, d: usize| -> Poly {
        Poly::from_terms(2, p.terms().iter().filter(|(a, _)| a.0[1] as usize == d).map(|(a, c)| (MultiIndex(vec![a.0[0], 0]), c.clone())))
    };
    let (lf, lg) = (lc(f, df), lc(g, dg));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut s = 0i64;
    while xs.len() <= bound {
        let a = GaussRat::from_int(s);
        let pt = [Scalar::from_gauss(a.clone()), Scalar::zero()];
        if !lf.eval(&pt).is_zero() && !lg.eval(&pt).is_zero() {
            ys.push(sylvester_resultant(&specialize_first(f, &a)?, &specialize_first(g, &a)?, df, dg));
            xs.push(a);
        }
        s = if s >= 0 { -s - 1 } else { -s };
    }
    Ok(interpolate(&xs, &ys))
}

/// Newton interpolation through `(x_k, y_k)`.
fn interpolate(xs: &[GaussRat], ys: &[GaussRat]) -> UPoly {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = &(&dd[i] - &dd[i - 1]) / &(&xs[i] - &xs[i - j]);
        }
    }
    let mut acc = UPoly::constant(dd[n - 1].clone());
    for i in (0..n - 1).rev() {
        let lin = UPoly::from_coeffs(vec![-&xs[i], GaussRat::one()]);
        acc = &(&acc * &lin) + &UPoly::constant(dd[i].clone());
    }
    acc
}

fn bivariate_candidates(polys: &[Poly]) -> Result<CandidateReport> {
    let mut unsolved = Vec::new();
    let mut g1 = UPoly::zero();
    let (free, dep): (Vec<&Poly>, Vec<&Poly>) = polys.iter().partition(|p| deg_in(p, 1) == 0);
    for p in &free {
        g1 = UPoly::gcd(&g1, &univariate(p, 0)?);
    }
    for i in 0..dep.len() {
        for j in i + 1..dep.len() {
            let r = resultant_in_first(dep[i], dep[j])?;
            if !r.is_zero() {
                g1 = UPoly::gcd(&g1, &r);
            }
        }
    }
    if g1.is_zero() {
        return Ok(CandidateReport {
            candidates: vec![],
            complete: false,
            unsolved: vec!["elimination degenerate: relations share a common factor".into()],
        });
    }
    let split = gaussian_roots(&g1);
    if !split.complete() {
        unsolved.push(split.remainder.fmt_var("xi1"));
    }
    let mut cands = Vec::new();
    for (a, _) in &split.roots {
        let mut g2 = UPoly::zero();
        for p in polys {
            g2 = UPoly::gcd(&g2, &specialize_first(p, a)?);
        }
        if g2.is_zero() {
            unsolved.push(format!("xi1 = {}: no condition on xi2", a));
            continue;
        }
        let s2 = gaussian_roots(&g2);
        if !s2.complete() {
            unsolved.push(format!("xi1 = {}: {}", a, s2.remainder.fmt_var("xi2")));
        }
        for (b, _) in s2.roots {
            let pt = [Scalar::from_gauss(a.clone()), Scalar::from_gauss(b)];
            if polys.iter().all(|p| p.eval(&pt).is_zero()) {
                cands.push(pt.to_vec());
            }
        }
    }
    cands.sort_by(|a, b| lex_cmp(a, b));
    Ok(CandidateReport { candidates: cands, complete: unsolved.is_empty(), unsolved })
}

/// Rescale a basis over `ℚ(i)(z)` so that it stays finite and linearly
/// independent at `z = 0`: divide out the lowest power of `z`, then replace
/// members whose values at `z = 0` are dependent by `(Σ c_j w_j)/z`.
pub fn laurent_normalize(basis: &[ExpPolySolution]) -> Result<Vec<ExpPolySolution>> {
    let scale = |s: &ExpPolySolution, k: i64| ExpPolySolution {
        lambda: s.lambda.clone(),
        poly: s.poly.iter().map(|p| p.map_coeffs(|c| c.mul_z_pow(k))).collect(),
    };
    let min_val = |s: &ExpPolySolution| s.poly.iter().flat_map(|p| p.terms().values().filter_map(|c| c.valuation())).min();
    let mut out: Vec<ExpPolySolution> = basis.iter().map(|s| scale(s, -min_val(s).unwrap_or(0))).collect();
    for _ in 0..64 {
        // coordinates at z = 0
        let mut keys: Vec<(usize, MultiIndex)> =
            out.iter().flat_map(|s| s.poly.iter().enumerate().flat_map(|(j, p)| p.terms().keys().map(move |a| (j, a.clone())))).collect();
        keys.sort();
        keys.dedup();
        let at0 = Matrix::from_rows(
            keys.iter().map(|(j, a)| out.iter().map(|s| s.poly[*j].coeff(a).at_zero()).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?,
        );
        let ns = at0.nullspace();
        let Some(c) = ns.first() else {
            return Ok(out);
        };
        let pivot = (0..c.len()).rev().find(|&i| !c[i].is_zero()).unwrap();
        let mut comb = vec![Poly::zero(out[0].poly[0].nvars()); out[0].poly.len()];
        for (ci, s) in c.iter().zip(&out) {
            if ci.is_zero() {
                continue;
            }
            for (acc, p) in comb.iter_mut().zip(&s.poly) {
                acc.add_assign_ref(&p.scale(ci));
            }
        }
        let w = ExpPolySolution { lambda: out[pivot].lambda.clone(), poly: comb };
        let v = min_val(&w).ok_or_else(|| Error::Domain("basis is linearly dependent over Q(i)(z)".into()))?;
        out[pivot] = scale(&w, -v);
    }
    Err(Error::Domain("z-normalization did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_scalar;

    fn d(s: &str, n: usize) -> Poly {
        let e = crate::parse::parse_expression(s, &crate::parse::ParseCtx::new(0, 0).with_vars(n, 0)).unwrap();
        crate::indicial::xi_polynomial(&e).unwrap().with_nvars(n)
    }

    fn sc(v: &[&str]) -> Vec<Scalar> {
        v.iter().map(|s| parse_scalar(s).unwrap()).collect()
    }

    #[test]
    fn harmonic_s2() {
        let m = ConstCoeffModule::scalar(2, vec![d("th1 + th2", 2), d("th1*th2", 2)]).unwrap();
        let b = solve_at_exponent(&m, &sc(&["0", "0"]), 2).unwrap();
        let s: Vec<String> = b.iter().map(|x| x.poly_strings()[0].clone()).collect();
        assert_eq!(s, vec!["1", "y1 - y2"]);
        let rep = module_dimension(&m, &[sc(&["0", "0"])], 1).unwrap();
        assert_eq!(rep.dimension, 2);
        assert!(!rep.semisimple);
        let c = find_exponent_candidates(&m).unwrap();
        assert_eq!(c.candidates, vec![sc(&["0", "0"])]);
    }

    #[test]
    fn shifted_examples() {
        let m = ConstCoeffModule::scalar(2, vec![d("th1 + th2 - 2", 2), d("th1*th2 - 1", 2)]).unwrap();
        let b = solve_at_exponent(&m, &sc(&["1", "1"]), 2).unwrap();
        let s: Vec<String> = b.iter().map(|x| x.poly_strings()[0].clone()).collect();
        assert_eq!(s, vec!["1", "y1 - y2"]);
        for x in &b {
            assert!(m.apply(x).iter().all(|p| p.is_zero()));
        }
        let m = ConstCoeffModule::scalar(2, vec![d("th1 + th2 - 3", 2), d("th1*th2 - 2", 2)]).unwrap();
        let c = find_exponent_candidates(&m).unwrap();
        assert_eq!(c.candidates, vec![sc(&["1", "2"]), sc(&["2", "1"])]);
        assert!(c.complete);
        assert!(is_semisimple(&m, &c.candidates, 1).unwrap());
        let m = ConstCoeffModule::scalar(1, vec![d("th1^2 - 1", 1)]).unwrap();
        assert_eq!(find_exponent_candidates(&m).unwrap().candidates, vec![sc(&["-1"]), sc(&["1"])]);
        let m = ConstCoeffModule::scalar(1, vec![d("th1^2", 1)]).unwrap();
        assert!(!is_semisimple(&m, &[sc(&["0"])], 1).unwrap());
        let m = ConstCoeffModule::scalar(1, vec![d("th1 - 3/2", 1)]).unwrap();
        assert_eq!(module_dimension(&m, &[sc(&["3/2"])], 1).unwrap().dimension, 1);
        let m = ConstCoeffModule::scalar(2, vec![d("th1", 2)]).unwrap();
        assert!(module_dimension(&m, &[sc(&["0", "0"])], 1).is_err());
    }

    #[test]
    fn b2_invariants() {
        let m = ConstCoeffModule::scalar(2, vec![d("th1^2 + th2^2 - 2", 2), d("th1^2*th2^2 - 1", 2)]).unwrap();
        let c = find_exponent_candidates(&m).unwrap();
        assert_eq!(c.candidates.len(), 4);
        let rep = module_dimension(&m, &c.candidates, 1).unwrap();
        assert_eq!(rep.dimension, 8);
        let m = ConstCoeffModule::scalar(2, vec![d("th1^2 + th2^2 - 5", 2), d("th1^2*th2^2 - 4", 2)]).unwrap();
        let c = find_exponent_candidates(&m).unwrap();
        let rep = module_dimension(&m, &c.candidates, 1).unwrap();
        assert_eq!((rep.dimension, rep.semisimple, c.candidates.len()), (8, true, 8));
    }

    #[test]
    fn z_normalization() {
        let z = Scalar::z();
        let n = 1;
        let a = ExpPolySolution { lambda: sc(&["0"]), poly: vec![Poly::constant(n, z.inv().unwrap())] };
        let b = ExpPolySolution {
            lambda: sc(&["0"]),
            poly: vec![&Poly::constant(n, Scalar::one()) + &Poly::monomial(n, MultiIndex(vec![1]), z.clone())],
        };
        let out = laurent_normalize(&[a, b]).unwrap();
        assert_eq!(out[0].poly_strings(), vec!["1"]);
        assert_eq!(out[1].poly_strings(), vec!["y1"]);
    }
}
