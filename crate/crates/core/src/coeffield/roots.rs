//! Exact root extraction for univariate polynomials over `ℚ(i)`.
//!
//! Integer roots are found by divisor enumeration on the real and imaginary
//! parts (fully exact). Gaussian-rational roots use numerical isolation on the
//! squarefree part followed by exact verification; whatever is not confirmed
//! is returned as an explicit remainder factor.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::gauss::GaussRat;
use super::upoly::UPoly;

/// Largest constant term for which divisor enumeration is attempted.
const DIVISOR_LIMIT: u64 = 1_000_000_000_000;

/// All integer roots with multiplicities, ascending; `None` when the
/// constant term is too large to enumerate.
pub fn integer_roots(f: &UPoly) -> Option<Vec<(BigInt, u32)>> {
    if f.is_zero() {
        return None;
    }
    let re = UPoly::from_coeffs(f.coeffs().iter().map(|a| GaussRat::from_rational(a.re.clone())).collect());
    let im = UPoly::from_coeffs(f.coeffs().iter().map(|a| GaussRat::from_rational(a.im.clone())).collect());
    let h = if im.is_zero() { re.monic() } else { UPoly::gcd(&re, &im) };
    if h.degree() == Some(0) {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    let v = h.valuation().unwrap();
    if v > 0 {
        out.push((BigInt::zero(), multiplicity(f, &GaussRat::zero())));
    }
    let h = h.shift_down(v);
    if h.degree() == Some(0) {
        return Some(out);
    }
    let den = h.coeffs().iter().fold(BigInt::one(), |acc, a| acc.lcm(a.re.denom()));
    let a0 = (&h.coeff(0).re * &num_rational::BigRational::from_integer(den)).to_integer().abs();
    let a0u = a0.to_u64().filter(|&x| x <= DIVISOR_LIMIT)?;
    let mut d = 1u64;
    while d * d <= a0u {
        if a0u % d == 0 {
            for cand in [d, a0u / d] {
                for s in [1i64, -1] {
                    let r = BigInt::from(cand) * s;
                    let g = GaussRat::from_bigint(r.clone());
                    if h.eval(&g).is_zero() && !out.iter().any(|(x, _)| *x == r) {
                        out.push((r, multiplicity(f, &g)));
                    }
                }
            }
        }
        d += 1;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Some(out)
}

/// Multiplicity of `r` as a root of `f`.
pub fn multiplicity(f: &UPoly, r: &GaussRat) -> u32 {
    let lin = UPoly::from_coeffs(vec![-r, GaussRat::one()]);
    let mut g = f.clone();
    let mut k = 0;
    while !g.is_zero() {
        match g.div_exact(&lin) {
            Some(q) => {
                g = q;
                k += 1;
            }
            None => break,
        }
    }
    k
}

/// Roots found in `ℚ(i)` plus the cofactor that carries the rest.
#[derive(Clone, Debug)]
pub struct RootSplit {
    pub roots: Vec<(GaussRat, u32)>,
    pub remainder: UPoly,
}

impl RootSplit {
    pub fn complete(&self) -> bool {
        self.remainder.degree().unwrap_or(0) == 0
    }
}

/// Gaussian-rational roots of `f` (nonzero), sorted by (re, im).
pub fn gaussian_roots(f: &UPoly) -> RootSplit {
    let mut roots: Vec<(GaussRat, u32)> = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return RootSplit { roots, remainder: f.clone() };
    }
    let v = f.valuation().unwrap();
    if v > 0 {
        roots.push((GaussRat::zero(), v as u32));
    }
    let g = f.shift_down(v).squarefree();
    let deg = g.degree().unwrap();
    if deg == 1 {
        roots.push((-g.coeff(0), 1));
    } else if deg > 1 {
        let lead_scale = {
            let den = g.coeffs().iter().fold(BigInt::one(), |acc, a| acc.lcm(&a.denom_lcm()));
            &g.lead() * &GaussRat::from_bigint(den)
        };
        for r in aberth(&g) {
            let y = Complex64::new(
                lead_scale.to_f64_pair().0 * r.re - lead_scale.to_f64_pair().1 * r.im,
                lead_scale.to_f64_pair().0 * r.im + lead_scale.to_f64_pair().1 * r.re,
            );
            let cand = GaussRat::new(round_rat(y.re), round_rat(y.im));
            let x = &cand / &lead_scale;
            if g.eval(&x).is_zero() && !roots.iter().any(|(q, _)| *q == x) {
                roots.push((x, 1));
            }
        }
    }
    let mut rem = f.clone();
    for (r, m) in roots.iter_mut() {
        *m = multiplicity(f, r);
        let lin = UPoly::from_coeffs(vec![-&*r, GaussRat::one()]);
        for _ in 0..*m {
            rem = rem.div_exact(&lin).unwrap();
        }
    }
    roots.sort_by_key(|a| (a.0.re.clone(), a.0.im.clone()));
    RootSplit { roots, remainder: rem }
}

fn round_rat(x: f64) -> num_rational::BigRational {
    let r = x.round();
    num_rational::BigRational::from_integer(BigInt::from(r as i64))
}

/// Simultaneous Newton iteration (Aberth–Ehrlich) on a squarefree polynomial.
fn aberth(g: &UPoly) -> Vec<Complex64> {
    let c: Vec<Complex64> = g
        .coeffs()
        .iter()
        .map(|a| {
            let (re, im) = a.to_f64_pair();
            Complex64::new(re, im)
        })
        .collect();
    let n = c.len() - 1;
    let lead = c[n];
    let bound = 1.0 + c[..n].iter().map(|a| (a / lead).norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(bound * 0.7, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> UPoly {
        UPoly::from_coeffs(v.iter().map(|&k| GaussRat::from_int(k)).collect())
    }

    #[test]
    fn integer_roots_with_multiplicity() {
        // (x-1)^2 (x+3) x
        let f = &(&p(&[-1, 1]).pow(2) * &p(&[3, 1])) * &p(&[0, 1]);
        let r = integer_roots(&f).unwrap();
        let got: Vec<(i64, u32)> = r.iter().map(|(a, m)| (a.to_i64().unwrap(), *m)).collect();
        assert_eq!(got, vec![(-3, 1), (0, 1), (1, 2)]);
        // x^2 + 1 has none
        assert!(integer_roots(&p(&[1, 0, 1])).unwrap().is_empty());
    }

    #[test]
    fn gaussian_roots_of_x2_plus_1_and_rationals() {
        let s = gaussian_roots(&p(&[1, 0, 1]));
        assert!(s.complete());
        assert_eq!(s.roots.len(), 2);
        let f = &p(&[-1, 2]) * &p(&[3, 0, -1]);
        let s = gaussian_roots(&f);
        assert_eq!(s.roots, vec![(GaussRat::from_ratio(1, 2), 1)]);
        assert_eq!(s.remainder.degree(), Some(2));
    }
}
