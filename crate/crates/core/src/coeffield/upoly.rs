//! Dense univariate polynomials over `ℚ(i)`, ascending coefficient order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gauss::{forward_owned, GaussRat};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    c: Vec<GaussRat>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly { c: vec![GaussRat::one()] }
    }

    pub fn constant(a: GaussRat) -> Self {
        Self::from_coeffs(vec![a])
    }

    /// The variable itself.
    pub fn x() -> Self {
        UPoly { c: vec![GaussRat::zero(), GaussRat::one()] }
    }

    pub fn monomial(a: GaussRat, k: usize) -> Self {
        let mut c = vec![GaussRat::zero(); k];
        c.push(a);
        Self::from_coeffs(c)
    }

    pub fn from_coeffs(mut c: Vec<GaussRat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> GaussRat {
        self.c.get(k).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lead(&self) -> GaussRat {
        self.c.last().cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn scale(&self, a: &GaussRat) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        UPoly { c: self.c.iter().map(|x| x * a).collect() }
    }

    /// Divide by `x^k`, dropping the low coefficients (caller checks they vanish).
    pub fn shift_down(&self, k: usize) -> Self {
        Self::from_coeffs(self.c.iter().skip(k).cloned().collect())
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![GaussRat::zero(); k];
        c.extend(self.c.iter().cloned());
        UPoly { c }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.lead().inv().unwrap();
        self.scale(&l)
    }

    pub fn eval(&self, x: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + a;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.c.iter().enumerate().skip(1).map(|(k, a)| a * &GaussRat::from_int(k as i64)).collect(),
        )
    }

    /// `p(x + a)`.
    pub fn translate(&self, a: &GaussRat) -> Self {
        let mut acc = UPoly::zero();
        let lin = UPoly::from_coeffs(vec![a.clone(), GaussRat::one()]);
        for c in self.c.iter().rev() {
            acc = &(&acc * &lin) + &UPoly::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division; panics when `d` is zero.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.c.len() - 1;
        if self.c.len() < d.c.len() {
            return (UPoly::zero(), self.clone());
        }
        let inv_lead = d.lead().inv().unwrap();
        let mut r = self.c.clone();
        let mut q = vec![GaussRat::zero(); self.c.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] * &inv_lead;
            if coef.is_zero() {
                continue;
            }
            for (j, dj) in d.c.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&coef * dj);
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (UPoly::from_coeffs(q), UPoly::from_coeffs(r))
    }

    /// Exact quotient when `d` divides `self`.
    pub fn div_exact(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(a: &UPoly, b: &UPoly) -> UPoly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Squarefree part `p / gcd(p, p')`, monic.
    pub fn squarefree(&self) -> UPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = UPoly::gcd(self, &self.derivative());
        self.div_exact(&g).unwrap().monic()
    }

    pub fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.reads_negative();
            let mag = if neg { -a } else { a.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{}^{}", var, k),
            };
            if k == 0 {
                if mag.is_compound() && !out.is_empty() {
                    out.push_str(&format!("({})", mag));
                } else {
                    out.push_str(&mag.to_string());
                }
            } else if mag.is_one() {
                out.push_str(&mono);
            } else if mag.is_compound() {
                out.push_str(&format!("({})*{}", mag, mono));
            } else {
                out.push_str(&format!("{}*{}", mag, mono));
            }
        }
        out
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_var("z"))
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Add<&UPoly> for &UPoly {
    type Output = UPoly;
    fn add(self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|k| match (self.c.get(k), o.c.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        UPoly::from_coeffs(c)
    }
}

impl Sub<&UPoly> for &UPoly {
    type Output = UPoly;
    fn sub(self, o: &UPoly) -> UPoly {
        self + &(-o)
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly { c: self.c.iter().map(|a| -a).collect() }
    }
}

impl Mul<&UPoly> for &UPoly {
    type Output = UPoly;
    fn mul(self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![GaussRat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        UPoly::from_coeffs(c)
    }
}

forward_owned!(UPoly, Add, add);
forward_owned!(UPoly, Sub, sub);
forward_owned!(UPoly, Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> UPoly {
        UPoly::from_coeffs(v.iter().map(|&k| GaussRat::from_int(k)).collect())
    }

    #[test]
    fn gcd_and_division() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[-1, 1]);
        assert_eq!(UPoly::gcd(&a, &b), b);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn translate_and_squarefree() {
        assert_eq!(p(&[0, 0, 1]).translate(&GaussRat::from_int(1)), p(&[1, 2, 1]));
        let cube = p(&[-1, 1]).pow(3);
        assert_eq!(cube.squarefree(), p(&[-1, 1]));
    }

    #[test]
    fn printing() {
        assert_eq!(p(&[-1, 0, 2]).to_string(), "2*z^2 - 1");
        assert_eq!(p(&[0, -1]).to_string(), "-z");
    }
}
