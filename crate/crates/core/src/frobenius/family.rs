//! Families `u_j(z)` over `ℚ(i)(z)` and their normalization at `z = 0`.
//!
//! Each member is expanded in the frame `t^{λ_j(0)}` using
//! `t^{λ(z)} = t^{λ(0)} Σ_k ((λ(z)−λ(0)) log t)^k / k!`. Poles in `z` are
//! removed by subtracting `z^{−n}` multiples of already normalized families
//! with higher exponents at `z = 0`; coinciding exponents are separated by
//! dividing dependent combinations by `z`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{solve_series, LogSeriesSolution};
use crate::coeffield::{GaussRat, Scalar};
use crate::error::{Error, Result};
use crate::indicial::{indicial_matrix, resonance_set};
use crate::linalg::Matrix;
use crate::opalg::OpMatrix;
use crate::poly::{MultiIndex, Poly};

/// A family member: exponent `λ(z)` and an `x`-free seed in the indicial kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    pub lambda: Scalar,
    pub seed: Vec<Scalar>,
}

/// Finite Laurent polynomial in `z` with `ℚ(i)` coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentCoeffs(pub BTreeMap<i64, GaussRat>);

impl LaurentCoeffs {
    fn add_scaled(&mut self, o: &LaurentCoeffs, c: &GaussRat, shift: i64) {
        for (k, v) in &o.0 {
            let e = self.0.entry(k + shift).or_insert_with(GaussRat::zero);
            *e = &*e + &(v * c);
        }
        self.0.retain(|_, v| !v.is_zero());
    }

    fn scaled(&self, c: &GaussRat, shift: i64) -> LaurentCoeffs {
        let mut out = LaurentCoeffs::default();
        out.add_scaled(self, c, shift);
        out
    }

    pub fn to_expr_string(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| match k {
                0 => format!("({})", v),
                1 => format!("({})*z", v),
                _ => format!("({})*z^{}", v, k),
            })
            .collect();
        parts.join(" + ")
    }
}

impl Serialize for LaurentCoeffs {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(i64, String)> = self.0.iter().map(|(k, c)| (*k, c.to_string())).collect();
        v.serialize(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionFamily {
    /// Raw members over `ℚ(i)(z)`.
    pub members: Vec<LogSeriesSolution>,
    /// Largest pole order at `z = 0` among each member's coefficients.
    pub pole_profile: Vec<i64>,
    /// Sum of vanishing orders of the indicial determinant over resonant shifts.
    pub predicted_pole_bounds: Vec<i64>,
    /// `w_k = Σ_j R_kj(z) u_j`, as member index to Laurent coefficients.
    pub recipes: Vec<BTreeMap<usize, LaurentCoeffs>>,
    /// `w_k` at `z = 0`.
    pub limits: Vec<LogSeriesSolution>,
    pub z_order: i64,
    /// Highest power of `z` through which each `w_k` is exact.
    pub valid_through: Vec<i64>,
}

type Frame = BTreeMap<(MultiIndex, MultiIndex), Vec<Poly>>;

/// Laurent jet in `z` of a log series, exact through `z^valid`.
#[derive(Clone, Debug)]
struct Jet {
    parts: BTreeMap<i64, Frame>,
    valid: i64,
}

impl Jet {
    fn add_to(&mut self, power: i64, key: (MultiIndex, MultiIndex), comp: usize, m: usize, p: &Poly) {
        let f = self.parts.entry(power).or_default();
        let e = f.entry(key).or_insert_with(|| vec![Poly::zero(p.nvars()); m]);
        e[comp].add_assign_ref(p);
    }

    fn clean(&mut self) {
        let valid = self.valid;
        self.parts.retain(|k, _| *k <= valid);
        for f in self.parts.values_mut() {
            f.retain(|_, v| v.iter().any(|p| !p.is_zero()));
        }
        self.parts.retain(|_, f| !f.is_empty());
    }

    /// `self += c · z^shift · t^d · o`, dropping `α` beyond `t_order`.
    fn add_scaled(&mut self, o: &Jet, c: &GaussRat, shift: i64, d: u32, t_order: u32) {
        let cs = Scalar::from_gauss(c.clone());
        for (k, f) in &o.parts {
            for ((a, kap), v) in f {
                let a2 = MultiIndex(vec![a.0[0] + d]);
                if a2.total() > t_order {
                    continue;
                }
                let tgt = self.parts.entry(k + shift).or_default();
                let e = tgt.entry((a2, kap.clone())).or_insert_with(|| vec![Poly::zero(v[0].nvars()); v.len()]);
                for (x, y) in e.iter_mut().zip(v) {
                    x.add_assign_ref(&y.scale(&cs));
                }
            }
        }
        self.valid = self.valid.min(o.valid + shift);
        self.clean();
    }

    fn lowest(&self) -> Option<i64> {
        self.parts.keys().next().copied()
    }
}

fn to_gauss(s: &Scalar) -> Result<GaussRat> {
    s.as_gauss().ok_or_else(|| Error::Domain(format!("expected a constant, got {}", s)))
}

/// Expand `t^{λ(z)} Σ φ_α t^α` in the frame `t^{λ(0)}` through `z^order`.
fn expand_member(u: &LogSeriesSolution, delta: &Scalar, order: i64) -> Result<Jet> {
    let mut jet = Jet { parts: BTreeMap::new(), valid: order };
    let vd = delta.valuation();
    if vd.is_some_and(|v| v < 1) {
        return Err(Error::Domain("exponent must be holomorphic in z".into()));
    }
    for ((a, k0), v) in &u.coeffs {
        for (s, p) in v.iter().enumerate() {
            for (b, c) in p.terms() {
                let Some(vc) = c.valuation() else { continue };
                let mut term = c.clone();
                let mut kk = 0u32;
                loop {
                    if term.valuation().is_some_and(|v| v > order) || term.is_zero() {
                        break;
                    }
                    let jetc = term.laurent_expand(order);
                    let kap = MultiIndex(vec![k0.0[0] + kk]);
                    for pw in jetc.base_order()..=order {
                        if let Some(g) = jetc.coeff(pw) {
                            if !g.is_zero() {
                                let mono = Poly::monomial(u.nx, b.clone(), Scalar::from_gauss(g));
                                jet.add_to(pw, (a.clone(), kap.clone()), s, u.m, &mono);
                            }
                        }
                    }
                    let Some(v) = vd else { break };
                    if vc + (kk as i64 + 1) * v > order {
                        break;
                    }
                    kk += 1;
                    term = &(&term * delta) / &Scalar::from_int(kk as i64);
                }
            }
        }
    }
    jet.clean();
    Ok(jet)
}

/// Coefficient vector of a frame slice `α`, keyed by `(κ, component, x-exponent)`.
fn slice(f: Option<&Frame>, alpha: u32) -> BTreeMap<(MultiIndex, usize, MultiIndex), Scalar> {
    let mut out = BTreeMap::new();
    if let Some(f) = f {
        for ((a, k), v) in f {
            if a.0[0] != alpha {
                continue;
            }
            for (s, p) in v.iter().enumerate() {
                for (b, c) in p.terms() {
                    out.insert((k.clone(), s, b.clone()), c.clone());
                }
            }
        }
    }
    out
}

/// Solve `target = Σ_j c_j cols_j` exactly.
fn combine(target: &BTreeMap<(MultiIndex, usize, MultiIndex), Scalar>, cols: &[BTreeMap<(MultiIndex, usize, MultiIndex), Scalar>]) -> Option<Vec<Scalar>> {
    let mut keys: Vec<_> = target.keys().cloned().collect();
    for c in cols {
        keys.extend(c.keys().cloned());
    }
    keys.sort();
    keys.dedup();
    let rows: Vec<Vec<Scalar>> = keys.iter().map(|k| cols.iter().map(|c| c.get(k).cloned().unwrap_or_else(Scalar::zero)).collect()).collect();
    if cols.is_empty() {
        return if target.is_empty() { Some(Vec::new()) } else { None };
    }
    let b: Vec<Scalar> = keys.iter().map(|k| target.get(k).cloned().unwrap_or_else(Scalar::zero)).collect();
    Matrix::from_rows(rows).solve(&b)
}

struct State<'a> {
    lam0: &'a [GaussRat],
    jets: Vec<Jet>,
    recipes: Vec<BTreeMap<usize, LaurentCoeffs>>,
    done: Vec<bool>,
    t_order: u32,
}

impl State<'_> {
    fn subtract(&mut self, k: usize, j: usize, c: &GaussRat, shift: i64, d: u32) {
        let neg = -c.clone();
        let src = self.jets[j].clone();
        self.jets[k].add_scaled(&src, &neg, shift, d, self.t_order);
        let rj = self.recipes[j].clone();
        for (idx, lc) in rj {
            let e = self.recipes[k].entry(idx).or_default();
            e.add_scaled(&lc, &neg, shift);
        }
        self.recipes[k].retain(|_, v| !v.0.is_empty());
    }

    /// Remove every negative power of `z` from `w_k`.
    fn remove_poles(&mut self, k: usize) -> Result<()> {
        let cap = 64 * (self.t_order as usize + 2) * (self.jets.len() + 1);
        for _ in 0..cap {
            let Some(n) = self.jets[k].lowest() else { return Ok(()) };
            if n >= 0 {
                return Ok(());
            }
            let phi = &self.jets[k].parts[&n];
            let d = phi.keys().map(|(a, _)| a.0[0]).min().unwrap();
            if d == 0 {
                return Err(Error::Domain(format!("member {} has a pole in its leading coefficient", k)));
            }
            let target_exp = &self.lam0[k] + &GaussRat::from_int(d as i64);
            let cands: Vec<usize> = (0..self.jets.len()).filter(|&j| j != k && self.done[j] && self.lam0[j] == target_exp).collect();
            let tgt = slice(Some(phi), d);
            let cols: Vec<_> = cands.iter().map(|&j| slice(self.jets[j].parts.get(&0), 0)).collect();
            let coeffs = combine(&tgt, &cols).ok_or_else(|| {
                Error::Domain(format!(
                    "principal part z^{} at exponent {} is not a combination of normalized families",
                    n, target_exp
                ))
            })?;
            for (j, c) in cands.iter().zip(&coeffs) {
                if !c.is_zero() {
                    self.subtract(k, *j, &to_gauss(c)?, n, d);
                }
            }
        }
        Err(Error::Domain("pole removal did not terminate".into()))
    }

    /// Make the `z = 0` leading terms of a group with equal `λ(0)` independent.
    fn separate(&mut self, group: &[usize]) -> Result<()> {
        let cap = 8 * (self.jets.len() + 1) * (self.t_order as usize + 2);
        for _ in 0..cap {
            let cols: Vec<_> = group.iter().map(|&j| slice(self.jets[j].parts.get(&0), 0)).collect();
            let mut keys: Vec<_> = cols.iter().flat_map(|c| c.keys().cloned()).collect();
            keys.sort();
            keys.dedup();
            let rows: Vec<Vec<Scalar>> =
                keys.iter().map(|k| cols.iter().map(|c| c.get(k).cloned().unwrap_or_else(Scalar::zero)).collect()).collect();
            let null = if keys.is_empty() {
                vec![vec![Scalar::one(); group.len()]]
            } else {
                Matrix::from_rows(rows).nullspace()
            };
            let Some(c) = null.first() else { return Ok(()) };
            let p = (0..group.len()).rev().find(|&i| !c[i].is_zero()).unwrap();
            let cp = to_gauss(&c[p])?;
            let mut new = Jet { parts: BTreeMap::new(), valid: i64::MAX };
            let mut recipe: BTreeMap<usize, LaurentCoeffs> = BTreeMap::new();
            for (i, &j) in group.iter().enumerate() {
                if c[i].is_zero() {
                    continue;
                }
                let ci = &to_gauss(&c[i])? / &cp;
                new.add_scaled(&self.jets[j].clone(), &ci, -1, 0, self.t_order);
                for (idx, lc) in &self.recipes[j] {
                    recipe.entry(*idx).or_default().add_scaled(lc, &ci, -1);
                }
            }
            recipe.retain(|_, v| !v.0.is_empty());
            if new.parts.is_empty() {
                return Err(Error::Domain("family members are linearly dependent".into()));
            }
            let k = group[p];
            self.jets[k] = new;
            self.recipes[k] = recipe;
            self.remove_poles(k)?;
        }
        Err(Error::Domain("separation of coinciding exponents did not terminate".into()))
    }
}

/// Solve every member over `ℚ(i)(z)`, then build `w_k = Σ_j R_kj(z) u_j`
/// holomorphic at `z = 0` with linearly independent limits. One wall variable.
///
/// `z_order` defaults to twice the largest member pole order (at least 2).
pub fn family_solve_and_normalize(
    p: &OpMatrix,
    members: &[FamilyMember],
    t_order: u32,
    x_order: i64,
    z_order: Option<i64>,
) -> Result<SolutionFamily> {
    if p.nt() != 1 {
        return Err(Error::Domain("parameter families are supported for one wall variable".into()));
    }
    let (m, nx) = (p.m(), p.nx());
    let mut sols = Vec::with_capacity(members.len());
    let mut pole_profile = Vec::with_capacity(members.len());
    let mut predicted = Vec::with_capacity(members.len());
    let ind = indicial_matrix(p, None).ok();
    for mem in members {
        if mem.seed.len() != m {
            return Err(Error::SizeMismatch(format!("seed has {} entries, expected {}", mem.seed.len(), m)));
        }
        let seed: Vec<Poly> = mem.seed.iter().map(|c| Poly::constant(nx, c.clone())).collect();
        let u = solve_series(p, std::slice::from_ref(&mem.lambda), &seed, t_order, x_order)?;
        let pole = u
            .coeffs
            .values()
            .flatten()
            .flat_map(|q| q.terms().values().filter_map(|c| c.valuation()))
            .map(|v| -v)
            .max()
            .unwrap_or(0)
            .max(0);
        pole_profile.push(pole);
        let bound = match &ind {
            Some(ind) => resonance_set(ind, std::slice::from_ref(&mem.lambda), t_order)?
                .gamma_hits
                .iter()
                .filter_map(|h| h.z_order)
                .filter(|o| *o > 0)
                .sum(),
            None => 0,
        };
        predicted.push(bound);
        sols.push(u);
    }
    let z = z_order.unwrap_or_else(|| (2 * pole_profile.iter().copied().max().unwrap_or(0)).max(2));
    let lam0: Vec<GaussRat> = members.iter().map(|mem| mem.lambda.eval_z(&GaussRat::zero())).collect::<Result<_>>()?;
    let mut jets = Vec::with_capacity(members.len());
    for (u, l0) in sols.iter().zip(&lam0) {
        let delta = &u.lambda[0] - &Scalar::from_gauss(l0.clone());
        jets.push(expand_member(u, &delta, z)?);
    }
    let recipes =
        (0..members.len()).map(|k| [(k, LaurentCoeffs([(0, GaussRat::one())].into_iter().collect()))].into_iter().collect()).collect();
    let mut st = State { lam0: &lam0, jets, recipes, done: vec![false; members.len()], t_order };

    // groups of equal λ(0), by descending real part
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| lam0[b].re.cmp(&lam0[a].re).then(lam0[a].im.cmp(&lam0[b].im)).then(a.cmp(&b)));
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && lam0[order[j]] == lam0[order[i]] {
            j += 1;
        }
        let group: Vec<usize> = order[i..j].to_vec();
        for &k in &group {
            st.remove_poles(k)?;
            st.done[k] = true;
        }
        if group.len() > 1 {
            st.separate(&group)?;
        }
        i = j;
    }

    let mut limits = Vec::with_capacity(members.len());
    let mut valid_through = Vec::with_capacity(members.len());
    for (k, jet) in st.jets.iter().enumerate() {
        if jet.valid < 0 {
            return Err(Error::Domain(format!(
                "z-expansion order {} is too small to normalize member {}; increase it",
                z, k
            )));
        }
        valid_through.push(jet.valid);
        let prec = sols.iter().flat_map(|u| u.x_precision.values().copied()).min().unwrap_or(-1);
        let mut w = LogSeriesSolution {
            lambda: vec![Scalar::from_gauss(lam0[k].clone())],
            m,
            nt: 1,
            nx,
            log_degree: 0,
            t_order,
            coeffs: BTreeMap::new(),
            x_precision: (0..=t_order).map(|a| (MultiIndex(vec![a]), prec)).collect(),
        };
        if let Some(f) = jet.parts.get(&0) {
            for (key, v) in f {
                w.insert(key.0.clone(), key.1.clone(), v.clone());
            }
        }
        limits.push(w);
    }
    Ok(SolutionFamily {
        members: sols,
        pole_profile,
        predicted_pole_bounds: predicted,
        recipes: st.recipes,
        limits,
        z_order: z,
        valid_through,
    })
}

impl LaurentCoeffs {
    /// The single-term polynomial `c z^k`.
    pub fn monomial(k: i64, c: GaussRat) -> Self {
        LaurentCoeffs([(k, c)].into_iter().collect()).scaled(&GaussRat::one(), 0)
    }
}
