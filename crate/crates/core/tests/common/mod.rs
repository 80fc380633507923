//! Random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use regsing_core::linalg::Matrix;
use regsing_core::opalg::{OpMatrix, RegOperator};
use regsing_core::{MultiIndex, Poly, Scalar, TruncSeries};

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(r: &mut ChaCha8Rng) -> Scalar {
    let p = r.gen_range(-5i64..=5);
    let q = r.gen_range(1i64..=4);
    Scalar::from_ratio(p, q)
}

/// Element of `ℚ(i)`, sometimes zero.
pub fn gauss_scalar(r: &mut ChaCha8Rng) -> Scalar {
    let re = small_rational(r);
    if r.gen_bool(0.3) {
        &re + &(&small_rational(r) * &Scalar::i())
    } else {
        re
    }
}

/// Element of `ℚ(i)(z)` with small numerator and denominator degree.
pub fn z_scalar(r: &mut ChaCha8Rng) -> Scalar {
    let mut num = Scalar::zero();
    let mut zp = Scalar::one();
    for _ in 0..r.gen_range(1..=3) {
        num = &num + &(&gauss_scalar(r) * &zp);
        zp = &zp * &Scalar::z();
    }
    if r.gen_bool(0.5) {
        let den = &Scalar::z() + &small_rational(r);
        if !den.is_zero() {
            return &num / &den;
        }
    }
    num
}

fn random_multi(r: &mut ChaCha8Rng, n: usize, max_total: u32) -> MultiIndex {
    let mut v = vec![0u32; n];
    let total = if n == 0 { 0 } else { r.gen_range(0..=max_total) };
    for _ in 0..total {
        let k = r.gen_range(0..n);
        v[k] += 1;
    }
    MultiIndex(v)
}

/// Series with a few terms of t-degree ≤ 2 and x-degree ≤ 2.
pub fn random_series(r: &mut ChaCha8Rng, nt: usize, nx: usize, t: u32, x: i64, unit: bool) -> TruncSeries {
    let mut s = TruncSeries::zero(nt, nx, t, x);
    for _ in 0..r.gen_range(0..=3) {
        let a = random_multi(r, nt, 2);
        let b = random_multi(r, nx, 2);
        let p = Poly::monomial(nx, b, gauss_scalar(r));
        s = s.add(&TruncSeries::t_monomial(nt, nx, t, x, a, p));
    }
    if unit && s.eval_at_wall().constant_term().is_zero() {
        s = s.add(&TruncSeries::one(nt, nx, t, x));
    }
    s
}

/// Operator `Σ a_{αβ}(t,x) ϑ^α ∂_x^β` of order ≤ `ord`; with `d_star` the
/// coefficients of terms with `β ≠ 0` vanish at `t = 0`.
pub fn random_op(r: &mut ChaCha8Rng, nt: usize, nx: usize, t: u32, x: i64, ord: u32, d_star: bool) -> RegOperator {
    let mut op = RegOperator::zero(nt, nx, t, x);
    for _ in 0..r.gen_range(1..=4) {
        let a = random_multi(r, nt, ord);
        let rest = ord - a.total();
        let b = random_multi(r, nx, rest);
        let mut s = random_series(r, nt, nx, t, x, false);
        if s.is_zero() {
            s = TruncSeries::constant(nt, nx, t, x, Scalar::one());
        }
        if d_star && !b.is_zero() && nt > 0 {
            s = s.mul_t_monomial(&MultiIndex::unit(nt, r.gen_range(0..nt)));
        }
        op = op.add(&RegOperator::term(&s, a, b));
    }
    op
}

pub fn random_matrix(r: &mut ChaCha8Rng, m: usize, nt: usize, nx: usize, t: u32, x: i64, ord: u32) -> OpMatrix {
    let entries = (0..m * m)
        .map(|_| if r.gen_bool(0.3) { RegOperator::zero(nt, nx, t, x) } else { random_op(r, nt, nx, t, x, ord, false) })
        .collect();
    OpMatrix::new(m, entries).unwrap()
}

/// `φ_α` for `P(t^λ Σ φ_α t^α) = 0`, `φ_0 = 1`, from one linear solve.
pub fn stacked_oracle(p: &RegOperator, lam: &[Scalar], t: u32) -> Option<BTreeMap<MultiIndex, Scalar>> {
    let nt = lam.len();
    let unknowns = MultiIndex::graded_upto(nt, t);
    let pos: BTreeMap<&MultiIndex, usize> = unknowns.iter().enumerate().map(|(k, a)| (a, k)).collect();
    let zero_x = MultiIndex::zeros(0);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut first = vec![Scalar::zero(); unknowns.len()];
    first[0] = Scalar::one();
    rows.push(first);
    rhs.push(Scalar::one());
    for gamma in &unknowns {
        if gamma.is_zero() {
            continue;
        }
        let mut row = vec![Scalar::zero(); unknowns.len()];
        for ((theta, _), s) in p.terms() {
            for (mu, c) in s.coeffs() {
                let Some(alpha) = gamma.checked_sub(mu) else { continue };
                let shifted: Vec<Scalar> = lam.iter().zip(&alpha.0).map(|(l, a)| l + &Scalar::from_int(*a as i64)).collect();
                let v = &c.coeff(&zero_x) * &theta.eval_monomial(&shifted);
                let k = pos[&alpha];
                row[k] = &row[k] + &v;
            }
        }
        rows.push(row);
        rhs.push(Scalar::zero());
    }
    let sol = Matrix::from_rows(rows).solve(&rhs)?;
    Some(unknowns.into_iter().zip(sol).collect())
}
