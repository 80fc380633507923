use std::fmt;

use super::gauss::GaussRat;
use super::scalar::Scalar;

/// A truncated Laurent expansion `Σ_{k=base}^{trunc} c_k z^k + O(z^{trunc+1})`.
///
/// The leading stored coefficient is nonzero unless the jet is zero, in which
/// case no coefficients are stored and `base_order == truncation_order`.
#[derive(Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct LaurentJet {
    base_order: i64,
    #[serde(serialize_with = "ser_coeffs")]
    coefficients: Vec<GaussRat>,
    truncation_order: i64,
}

fn ser_coeffs<S: serde::Serializer>(c: &[GaussRat], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(c.iter().map(|a| a.to_string()))
}

impl LaurentJet {
    /// Build from coefficients starting at `base`, normalizing leading zeros.
    pub fn new(base: i64, coeffs: Vec<GaussRat>, trunc: i64) -> Self {
        let keep = (trunc - base + 1).max(0) as usize;
        let mut coeffs: Vec<GaussRat> = coeffs.into_iter().take(keep).collect();
        let lead = coeffs.iter().position(|a| !a.is_zero());
        match lead {
            None => Self::zero(trunc),
            Some(p) => {
                coeffs.drain(..p);
                while coeffs.last().is_some_and(|a| a.is_zero()) {
                    coeffs.pop();
                }
                LaurentJet { base_order: base + p as i64, coefficients: coeffs, truncation_order: trunc }
            }
        }
    }

    pub fn zero(trunc: i64) -> Self {
        LaurentJet { base_order: trunc, coefficients: Vec::new(), truncation_order: trunc }
    }

    pub fn base_order(&self) -> i64 {
        self.base_order
    }

    pub fn truncation_order(&self) -> i64 {
        self.truncation_order
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Stored coefficients from `base_order` upward (trailing zeros omitted).
    pub fn coefficients(&self) -> Vec<Scalar> {
        self.coefficients.iter().cloned().map(Scalar::from_gauss).collect()
    }

    /// Coefficient of `z^k`; `None` beyond the truncation order.
    pub fn coeff(&self, k: i64) -> Option<GaussRat> {
        if k > self.truncation_order {
            return None;
        }
        if k < self.base_order || self.is_zero() {
            return Some(GaussRat::zero());
        }
        Some(self.coefficients.get((k - self.base_order) as usize).cloned().unwrap_or_else(GaussRat::zero))
    }

    /// Lowest power with a nonzero coefficient, `None` for zero.
    pub fn leading_power(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.base_order)
        }
    }

    pub fn add(&self, o: &LaurentJet) -> LaurentJet {
        let trunc = self.truncation_order.min(o.truncation_order);
        let base = self.lo().min(o.lo()).min(trunc);
        let c = (base..=trunc).map(|k| &self.coeff(k).unwrap() + &o.coeff(k).unwrap()).collect();
        LaurentJet::new(base, c, trunc)
    }

    pub fn neg(&self) -> LaurentJet {
        LaurentJet {
            base_order: self.base_order,
            coefficients: self.coefficients.iter().map(|a| -a).collect(),
            truncation_order: self.truncation_order,
        }
    }

    pub fn sub(&self, o: &LaurentJet) -> LaurentJet {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &LaurentJet) -> LaurentJet {
        let trunc = (self.truncation_order + o.lo()).min(o.truncation_order + self.lo());
        if self.is_zero() || o.is_zero() {
            return LaurentJet::zero(trunc);
        }
        let base = self.base_order + o.base_order;
        let len = (trunc - base + 1).max(0) as usize;
        let mut c = vec![GaussRat::zero(); len];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in o.coefficients.iter().enumerate() {
                if i + j < len {
                    c[i + j] = &c[i + j] + &(a * b);
                }
            }
        }
        LaurentJet::new(base, c, trunc)
    }

    pub fn scale(&self, a: &GaussRat) -> LaurentJet {
        LaurentJet::new(self.base_order, self.coefficients.iter().map(|c| c * a).collect(), self.truncation_order)
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: i64) -> LaurentJet {
        LaurentJet {
            base_order: self.base_order + k,
            coefficients: self.coefficients.clone(),
            truncation_order: self.truncation_order + k,
        }
    }

    /// Drop terms above `z^trunc`.
    pub fn truncate(&self, trunc: i64) -> LaurentJet {
        if trunc >= self.truncation_order {
            return self.clone();
        }
        LaurentJet::new(self.base_order, self.coefficients.clone(), trunc)
    }

    // Lowest exponent that carries information (the base for nonzero jets).
    fn lo(&self) -> i64 {
        if self.is_zero() {
            self.truncation_order + 1
        } else {
            self.base_order
        }
    }
}

impl fmt::Display for LaurentJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, a) in self.coefficients.iter().enumerate() {
            if !a.is_zero() {
                parts.push(format!("({})*z^{}", a, self.base_order + k as i64));
            }
        }
        parts.push(format!("O(z^{})", self.truncation_order + 1));
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for LaurentJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
