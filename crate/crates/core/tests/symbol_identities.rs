mod common;

use proptest::prelude::*;
use regsing_core::opalg::{poisson_bracket, OpMatrix};

const T: u32 = 6;
const X: i64 = 6;

fn shape(seed: u64) -> (usize, usize, usize) {
    let nt = 1 + (seed % 2) as usize;
    let nx = ((seed / 2) % 3) as usize;
    let m = 1 + ((seed / 6) % 2) as usize;
    (m, nt, nx)
}

fn pair(seed: u64, m: usize, nt: usize, nx: usize) -> (OpMatrix, OpMatrix) {
    let mut r = common::rng(seed);
    let op = common::random_matrix(&mut r, m, nt, nx, T, X, 3);
    let oq = common::random_matrix(&mut r, m, nt, nx, T, X, 3);
    (op, oq)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn principal_symbol_is_multiplicative(seed in any::<u64>()) {
        let (m, nt, nx) = shape(seed);
        let (p, q) = pair(seed, m, nt, nx);
        prop_assume!(!p.is_zero() && !q.is_zero());
        let (kp, kq) = (p.order().unwrap(), q.order().unwrap());
        let lhs = p.mul(&q).sigma_k(kp + kq);
        let rhs = p.sigma_k(kp).mul(&q.sigma_k(kq));
        prop_assert!(lhs.eq_mod(&rhs));
    }

    #[test]
    fn star_symbol_is_multiplicative(seed in any::<u64>()) {
        let (m, nt, nx) = shape(seed);
        let (p, q) = pair(seed, m, nt, nx);
        let lhs = p.mul(&q).sigma_star();
        let rhs = p.sigma_star().mul(&q.sigma_star());
        prop_assert!(lhs.eq_mod(&rhs));
    }

    #[test]
    fn bracket_identity(seed in any::<u64>()) {
        let (_, nt, nx) = shape(seed);
        let (p, q) = pair(seed, 1, nt, nx);
        prop_assume!(!p.is_zero() && !q.is_zero());
        let (kp, kq) = (p.order().unwrap(), q.order().unwrap());
        prop_assume!(kp + kq >= 1);
        let lhs = p.commutator(&q).unwrap().sigma_k(kp + kq - 1);
        let rhs = poisson_bracket(&p.sigma_k(kp), &q.sigma_k(kq));
        prop_assert!(lhs.eq_mod(&rhs));
    }

    #[test]
    fn star_symbol_is_additive(seed in any::<u64>()) {
        let (m, nt, nx) = shape(seed);
        let (p, q) = pair(seed, m, nt, nx);
        prop_assert!(p.add(&q).sigma_star().eq_mod(&p.sigma_star().add(&q.sigma_star())));
    }
}

#[test]
fn operator_product_is_associative() {
    for seed in 0..40u64 {
        let (m, nt, nx) = shape(seed);
        let mut r = common::rng(seed ^ 0x5eed);
        let a = common::random_matrix(&mut r, m, nt, nx, T, X, 2);
        let b = common::random_matrix(&mut r, m, nt, nx, T, X, 2);
        let c = common::random_matrix(&mut r, m, nt, nx, T, X, 2);
        assert!(a.mul(&b).mul(&c).eq_mod(&a.mul(&b.mul(&c))), "seed {}", seed);
    }
}

#[test]
fn jacobi_identity() {
    for seed in 0..30u64 {
        let (_, nt, nx) = shape(seed);
        let mut r = common::rng(seed ^ 0x7ac0b1);
        let a = common::random_matrix(&mut r, 1, nt, nx, T, X, 2);
        let b = common::random_matrix(&mut r, 1, nt, nx, T, X, 2);
        let c = common::random_matrix(&mut r, 1, nt, nx, T, X, 2);
        let br = |u: &OpMatrix, v: &OpMatrix| u.commutator(v).unwrap();
        let s = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        assert!(s.eq_mod(&OpMatrix::zero(1, nt, nx, s.t_order(), s.x_order())), "seed {}", seed);
    }
}
