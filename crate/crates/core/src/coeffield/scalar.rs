use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::gauss::{forward_owned, GaussRat};
use super::laurent::LaurentJet;
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// Whether a scalar depends on the deformation parameter `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    ExactWithParameter,
}

/// Element of `ℚ(i)(z)` in canonical form.
///
/// Invariants:
/// - `den` is monic and nonzero;
/// - `gcd(num, den) = 1`;
/// - zero is stored as `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: UPoly,
    den: UPoly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: UPoly::zero(), den: UPoly::one() }
    }

    pub fn one() -> Self {
        Scalar::from_gauss(GaussRat::one())
    }

    pub fn i() -> Self {
        Scalar::from_gauss(GaussRat::i())
    }

    /// The deformation parameter.
    pub fn z() -> Self {
        Scalar { num: UPoly::x(), den: UPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_gauss(GaussRat::from_int(n))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Scalar::from_gauss(GaussRat::from_ratio(p, q))
    }

    pub fn from_gauss(a: GaussRat) -> Self {
        Scalar { num: UPoly::constant(a), den: UPoly::one() }
    }

    pub fn from_poly(p: UPoly) -> Self {
        Scalar { num: p, den: UPoly::one() }
    }

    /// Canonical form of `num/den`.
    pub fn from_fraction(num: UPoly, den: UPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: UPoly, den: UPoly) -> Self {
        if num.is_zero() {
            return Scalar::zero();
        }
        if den.is_constant() {
            let inv = den.lead().inv().unwrap();
            return Scalar { num: num.scale(&inv), den: UPoly::one() };
        }
        let g = UPoly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let inv = den.lead().inv().unwrap();
        Scalar { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn mode(&self) -> Mode {
        if self.num.is_constant() && self.den.is_constant() {
            Mode::Exact
        } else {
            Mode::ExactWithParameter
        }
    }

    pub fn is_parameter_free(&self) -> bool {
        self.mode() == Mode::Exact
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The `ℚ(i)` value when parameter-free.
    pub fn as_gauss(&self) -> Option<GaussRat> {
        if self.is_parameter_free() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn is_integer(&self) -> bool {
        self.as_gauss().is_some_and(|g| g.is_integer())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_parameter_free() && o.is_parameter_free() {
            return Ok(Scalar::from_gauss(&self.num.coeff(0) / &o.num.coeff(0)));
        }
        Ok(Self::reduce(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn conj(&self) -> Self {
        let c = |p: &UPoly| UPoly::from_coeffs(p.coeffs().iter().map(|a| a.conj()).collect());
        Scalar { num: c(&self.num), den: c(&self.den) }
    }

    /// Order of vanishing at `z = 0` (`None` for zero).
    pub fn valuation(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().unwrap() as i64;
        Some(vn - vd)
    }

    /// Pole order at `z = 0`; negative values are zeros.
    pub fn pole_order(&self) -> Result<i64> {
        self.valuation().map(|v| -v).ok_or(Error::ZeroHasNoOrder)
    }

    /// Laurent jet at `z = 0` through `z^order`.
    pub fn laurent_expand(&self, order: i64) -> LaurentJet {
        let Some(v) = self.valuation() else {
            return LaurentJet::zero(order);
        };
        if order < v {
            return LaurentJet::zero(order);
        }
        let vn = self.num.valuation().unwrap();
        let vd = self.den.valuation().unwrap();
        let n = self.num.shift_down(vn);
        let d = self.den.shift_down(vd);
        let len = (order - v + 1) as usize;
        let d0inv = d.coeff(0).inv().unwrap();
        let mut q: Vec<GaussRat> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = n.coeff(k);
            for j in 1..=k.min(d.coeffs().len().saturating_sub(1)) {
                acc = &acc - &(&d.coeff(j) * &q[k - j]);
            }
            q.push(&acc * &d0inv);
        }
        LaurentJet::new(v, q, order)
    }

    /// Value at `z = z0`; errors at a pole.
    pub fn eval_z(&self, z0: &GaussRat) -> Result<GaussRat> {
        let d = self.den.eval(z0);
        if d.is_zero() {
            return Err(Error::Domain(format!("pole at z = {}", z0)));
        }
        Ok(&self.num.eval(z0) / &d)
    }

    /// Value at `z = 0` as a scalar; errors at a pole.
    pub fn at_zero(&self) -> Result<Scalar> {
        self.eval_z(&GaussRat::zero()).map(Scalar::from_gauss)
    }

    /// Multiply by `z^k` (k may be negative).
    pub fn mul_z_pow(&self, k: i64) -> Scalar {
        if k >= 0 {
            Self::reduce(self.num.shift_up(k as usize), self.den.clone())
        } else {
            Self::reduce(self.num.clone(), self.den.shift_up((-k) as usize))
        }
    }

    /// Text form parseable by the expression grammar.
    pub fn to_expr_string(&self) -> String {
        if self.den.is_one() {
            self.num.fmt_var("z")
        } else {
            format!("({})/({})", self.num.fmt_var("z"), self.den.fmt_var("z"))
        }
    }

    /// Needs parentheses when used as a factor.
    pub fn is_compound(&self) -> bool {
        if !self.den.is_one() {
            return true;
        }
        let nonzero = self.num.coeffs().iter().filter(|a| !a.is_zero()).count();
        nonzero > 1 || self.num.coeffs().iter().any(|a| a.is_compound())
    }

    pub(crate) fn reads_negative(&self) -> bool {
        self.den.is_one()
            && self.num.coeffs().iter().filter(|a| !a.is_zero()).count() == 1
            && self.num.lead().reads_negative()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<GaussRat> for Scalar {
    fn from(a: GaussRat) -> Self {
        Scalar::from_gauss(a)
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if self.den.is_one() && o.den.is_one() {
            return Scalar { num: &self.num + &o.num, den: UPoly::one() };
        }
        if self.den == o.den {
            return Scalar::reduce(&self.num + &o.num, self.den.clone());
        }
        Scalar::reduce(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar { num: &self.num * &o.num, den: UPoly::one() };
        }
        Scalar::reduce(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::checked_div`] for a fallible form.
    fn div(self, o: &Scalar) -> Scalar {
        self.checked_div(o).expect("division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

forward_owned!(Scalar, Add, add);
forward_owned!(Scalar, Sub, sub);
forward_owned!(Scalar, Mul, mul);
forward_owned!(Scalar, Div, div);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + &b)
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coeffs = |p: &UPoly| -> Vec<String> { p.coeffs().iter().map(|a| a.to_string()).collect() };
        let mut st = s.serialize_struct("Scalar", 3)?;
        st.serialize_field("text", &self.to_expr_string())?;
        st.serialize_field("num", &coeffs(&self.num))?;
        st.serialize_field("den", &coeffs(&self.den))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Scalar {
        Scalar::z()
    }

    #[test]
    fn spec_arithmetic_examples() {
        let a = &Scalar::from_ratio(1, 2) + &(&Scalar::i() / &Scalar::from_int(3));
        assert_eq!(&a * &Scalar::from_int(3), &Scalar::from_ratio(3, 2) + &Scalar::i());
        let b = &Scalar::one() / &(&Scalar::one() + &Scalar::i());
        assert_eq!(b, &(&Scalar::one() - &Scalar::i()) / &Scalar::from_int(2));
        let c = &(&(&z() * &z()) - &Scalar::one()) / &(&z() - &Scalar::one());
        assert_eq!(c, &z() + &Scalar::one());
        assert_eq!(c.mode(), Mode::ExactWithParameter);
        assert!(Scalar::one().checked_div(&Scalar::zero()).is_err());
    }

    #[test]
    fn pole_orders() {
        let one = Scalar::one();
        assert_eq!((&one / &(&z() * &z())).pole_order().unwrap(), 2);
        assert_eq!((&z().pow(3) / &(&one + &z())).pole_order().unwrap(), -3);
        assert_eq!(Scalar::from_int(7).pole_order().unwrap(), 0);
        assert!(Scalar::zero().pole_order().is_err());
    }

    #[test]
    fn laurent_examples() {
        let one = Scalar::one();
        let a = &one / &(&z() * &(&one - &z()));
        let j = a.laurent_expand(1);
        assert_eq!(j.base_order(), -1);
        assert_eq!(j.truncation_order(), 1);
        for k in -1..=1 {
            assert_eq!(j.coeff(k), Some(GaussRat::one()));
        }
        let b = &(&z() * &z()) / &(&z() - &z().pow(3));
        let jb = b.laurent_expand(2);
        assert_eq!(jb.base_order(), 1);
        assert_eq!(jb.coeff(1), Some(GaussRat::one()));
        assert_eq!(jb.coeff(2), Some(GaussRat::zero()));
        let c = Scalar::from_int(5).laurent_expand(0);
        assert_eq!(c.base_order(), 0);
        assert_eq!(c.coeff(0), Some(GaussRat::from_int(5)));
    }

    #[test]
    fn canonical_denominator_is_monic() {
        let a = &Scalar::one() / &(&Scalar::from_int(2) * &z());
        assert_eq!(a.den().lead(), GaussRat::one());
        assert_eq!(a.num().coeff(0), GaussRat::from_ratio(1, 2));
    }
}
