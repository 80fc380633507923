//! Two-variable splitting test: directions from the rotated symbol, exact
//! membership of a potential in the span of one-variable profiles, and a
//! flat-coordinate Taylor expansion of catalog potentials.

use serde::Serialize;

use crate::coeffield::roots::gaussian_roots;
use crate::coeffield::{GaussRat, Scalar, UPoly};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{MultiIndex, Poly};

use super::catalog::PotentialSpec;

/// Linear factor `aξ − bτ` with its multiplicity; first nonzero of `(a, b)` is 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitDirection {
    pub a: Scalar,
    pub b: Scalar,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionReport {
    pub directions: Vec<SplitDirection>,
    /// Constant `κ` with rotated symbol `= κ ∏ (aξ − bτ)^m`, when fully split.
    pub scale: Option<Scalar>,
    /// Factor in `s = τ/ξ` without roots in `ℚ(i)`.
    pub unsolved: Option<String>,
    pub rotated: Vec<Scalar>,
}

fn gauss(s: &Scalar) -> Result<GaussRat> {
    s.as_gauss().ok_or_else(|| Error::Domain("splitting needs parameter-free coefficients".into()))
}

/// Coefficients `d_j` of `ξ^{m−j}τ^j` in `(ξ∂_τ − τ∂_ξ) Σ c_i ξ^{m−i}τ^i`.
pub fn rotated_symbol(c: &[Scalar]) -> Vec<Scalar> {
    let m = c.len().saturating_sub(1);
    let get = |i: isize| if i >= 0 && (i as usize) <= m { c[i as usize].clone() } else { Scalar::zero() };
    (0..=m)
        .map(|j| {
            let j = j as isize;
            &(&get(j + 1) * &Scalar::from_int(j as i64 + 1)) - &(&get(j - 1) * &Scalar::from_int(m as i64 - j as i64 + 1))
        })
        .collect()
}

pub fn split_directions(c: &[Scalar]) -> Result<DirectionReport> {
    if c.is_empty() {
        return Err(Error::Domain("empty symbol".into()));
    }
    let d = rotated_symbol(c);
    let m = d.len() - 1;
    let nz: Vec<usize> = (0..=m).filter(|&j| !d[j].is_zero()).collect();
    if nz.is_empty() {
        return Err(Error::Domain("Q symbol is rotation-invariant".into()));
    }
    let (lo, hi) = (nz[0], *nz.last().unwrap());
    let mut directions = Vec::new();
    if hi < m {
        directions.push(SplitDirection { a: Scalar::one(), b: Scalar::zero(), multiplicity: (m - hi) as u32 });
    }
    if lo > 0 {
        directions.push(SplitDirection { a: Scalar::zero(), b: Scalar::one(), multiplicity: lo as u32 });
    }
    // g(s) = D(1, s)/s^lo, roots s_r ≠ 0 give ξ − τ/s_r
    let g = UPoly::from_coeffs(d[lo..=hi].iter().map(gauss).collect::<Result<Vec<_>>>()?);
    let split = gaussian_roots(&g);
    for (r, mult) in &split.roots {
        let inv = r.inv().expect("root of g is nonzero");
        directions.push(SplitDirection { a: Scalar::one(), b: Scalar::from_gauss(inv), multiplicity: *mult });
    }
    let complete = split.complete();
    // lowest term of (−s)^lo ∏ (1 − s/s_r)^μ is (−1)^lo s^lo
    let scale = complete.then(|| if lo % 2 == 0 { d[lo].clone() } else { -&d[lo] });
    let unsolved = (!complete).then(|| split.remainder.fmt_var("s"));
    Ok(DirectionReport { directions, scale, unsolved, rotated: d })
}

/// One slot `(b x + a y)^i R_{ν,i}(a x − b y)` of a decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct SplitPiece {
    pub direction: usize,
    pub power: u32,
    /// `R_{ν,i}` as a polynomial in `s`.
    pub profile: String,
}

/// Functional on degree-`d` monomials `x^{d−j} y^j` vanishing on the span but not on `R_d`.
#[derive(Clone, Debug, Serialize)]
pub struct Obstruction {
    pub degree: u32,
    pub functional: Vec<Scalar>,
    pub pairing: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryMembership {
    pub entry: usize,
    pub pass: bool,
    pub pieces: Vec<SplitPiece>,
    pub obstruction: Option<Obstruction>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub pass: bool,
    pub degree: u32,
    pub entries: Vec<EntryMembership>,
}

fn lin(c0: &Scalar, c1: &Scalar) -> Poly {
    Poly::from_terms(2, [(MultiIndex(vec![1, 0]), c0.clone()), (MultiIndex(vec![0, 1]), c1.clone())])
}

fn homogeneous_coords(p: &Poly, d: u32) -> Vec<Scalar> {
    (0..=d).map(|j| p.coeff(&MultiIndex(vec![d - j, j]))).collect()
}

fn entry_membership(entry: usize, r: &Poly, dirs: &[SplitDirection], degree: u32) -> Result<EntryMembership> {
    if r.nvars() != 2 {
        return Err(Error::VarMismatch(format!("splitting needs 2 variables, got {}", r.nvars())));
    }
    let mut profiles: Vec<Vec<Vec<(u32, Scalar)>>> = dirs.iter().map(|d| vec![Vec::new(); d.multiplicity as usize]).collect();
    for deg in 0..=degree {
        let rd = r.homogeneous_part(deg);
        if rd.is_zero() {
            continue;
        }
        let mut slots = Vec::new();
        let mut cols: Vec<Vec<Scalar>> = Vec::new();
        for (nu, dir) in dirs.iter().enumerate() {
            let along = lin(&dir.b, &dir.a);
            let across = lin(&dir.a, &-&dir.b);
            for i in 0..dir.multiplicity.min(deg + 1) {
                let f = &along.pow(i) * &across.pow(deg - i);
                slots.push((nu, i));
                cols.push(homogeneous_coords(&f, deg));
            }
        }
        let rows = (deg + 1) as usize;
        let basis = Matrix::from_rows((0..rows).map(|j| cols.iter().map(|c| c[j].clone()).collect()).collect());
        let target = homogeneous_coords(&rd, deg);
        let solved = if cols.is_empty() { None } else { basis.solve(&target) };
        match solved {
            Some(x) => {
                for ((nu, i), v) in slots.into_iter().zip(x) {
                    if !v.is_zero() {
                        profiles[nu][i as usize].push((deg - i, v));
                    }
                }
            }
            None => {
                let left = if cols.is_empty() { Matrix::identity(rows).nullspace() } else { basis.transpose().nullspace() };
                let (functional, pairing) = left
                    .into_iter()
                    .map(|w| {
                        let p: Scalar = w.iter().zip(&target).map(|(a, b)| a * b).sum();
                        (w, p)
                    })
                    .find(|(_, p)| !p.is_zero())
                    .expect("unsolvable system has a separating functional");
                return Ok(EntryMembership {
                    entry,
                    pass: false,
                    pieces: Vec::new(),
                    obstruction: Some(Obstruction { degree: deg, functional, pairing }),
                });
            }
        }
    }
    let mut pieces = Vec::new();
    for (nu, per) in profiles.into_iter().enumerate() {
        for (i, terms) in per.into_iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            let p = Poly::from_terms(1, terms.into_iter().map(|(k, v)| (MultiIndex(vec![k]), v)));
            pieces.push(SplitPiece { direction: nu, power: i as u32, profile: p.fmt_with(&|_| "s".into()) });
        }
    }
    Ok(EntryMembership { entry, pass: true, pieces, obstruction: None })
}

/// Exact membership of each entry of `R` (polynomials in `x, y` truncated at
/// total degree `degree`) in `Σ_ν Σ_{i<m_ν} (b_ν x + a_ν y)^i g(a_ν x − b_ν y)`.
pub fn splitting_membership(r: &[Poly], dirs: &[SplitDirection], degree: u32) -> Result<MembershipReport> {
    let entries = r.iter().enumerate().map(|(k, p)| entry_membership(k, p, dirs, degree)).collect::<Result<Vec<_>>>()?;
    Ok(MembershipReport { pass: entries.iter().all(|e| e.pass), degree, entries })
}

type Series1 = Vec<Scalar>;

fn s_mul(a: &Series1, b: &Series1) -> Series1 {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|i| &a[i] * &b[k - i]).sum()).collect()
}

fn s_inv(a: &Series1) -> Result<Series1> {
    let a0 = a[0].inv()?;
    let mut out: Series1 = vec![Scalar::zero(); a.len()];
    out[0] = a0.clone();
    for k in 1..a.len() {
        let s: Scalar = (1..=k).map(|i| &a[i] * &out[k - i]).sum();
        out[k] = -&(&s * &a0);
    }
    Ok(out)
}

/// Taylor polynomial to total degree `degree` of a flat-coordinate potential
/// about the point `x°` given by `e^{x°_k} = point[k]`.
pub fn potential_taylor(spec: &PotentialSpec, point: &[Scalar], degree: u32) -> Result<Poly> {
    let terms = spec.potential_terms()?;
    let n = point.len();
    let len = degree as usize + 1;
    let mut out = Poly::zero(n);
    let mut fact = Scalar::one();
    let mut exp_s: Series1 = Vec::with_capacity(len);
    for k in 0..len {
        if k > 0 {
            fact = &fact * &Scalar::from_int(k as i64);
        }
        exp_s.push(fact.inv()?);
    }
    for term in terms {
        if term.form.len() != n {
            return Err(Error::VarMismatch(format!("expansion point has {} coordinates, potential {}", n, term.form.len())));
        }
        let mut e0 = Scalar::one();
        for (v, p) in term.form.iter().zip(point) {
            let f = if *v >= 0 { p.pow(*v as u32) } else { p.pow((-v) as u32).inv()? };
            e0 = &e0 * &f;
        }
        // w(s) = e0 e^s; profile C w or 4C w/(1 − w)²
        let w: Series1 = exp_s.iter().map(|c| c * &e0).collect();
        let f: Series1 = if term.sinh {
            let mut one_minus: Series1 = w.iter().map(|c| -c).collect();
            one_minus[0] = &one_minus[0] + &Scalar::one();
            if one_minus[0].is_zero() {
                return Err(Error::Domain("expansion point lies on a singular wall".into()));
            }
            let den = s_mul(&one_minus, &one_minus);
            s_mul(&w, &s_inv(&den)?).iter().map(|c| &(c * &term.coeff) * &Scalar::from_int(4)).collect()
        } else {
            w.iter().map(|c| c * &term.coeff).collect()
        };
        let l = Poly::from_terms(n, term.form.iter().enumerate().map(|(k, &v)| (MultiIndex::unit(n, k), Scalar::from_int(v))));
        let mut lp = Poly::one(n);
        for fk in f.iter() {
            out.add_assign_ref(&lp.scale(fk));
            lp = lp.mul_trunc(&l, degree as i64);
        }
    }
    Ok(out)
}
