//! The Frobenius recursion against an independent oracle: all coefficients
//! up to |α| ≤ T solved at once from the stacked linear system.

mod common;

use rand::Rng;
use regsing_core::frobenius::{boundary_value, solve_series, verify_residual};
use regsing_core::integrable::resolve;
use regsing_core::opalg::{OpMatrix, RegOperator};
use regsing_core::parse::{parse_expression, ParseCtx};
use regsing_core::{Error, MultiIndex, Poly, Scalar, TruncSeries};

fn op(src: &str, t: u32, nt: usize) -> OpMatrix {
    parse_expression(src, &ParseCtx::new(t, 0).with_vars(nt, 0).with_catalog(&resolve)).unwrap()
}

fn compare(p: &OpMatrix, lam: &[Scalar], t: u32) -> bool {
    let u = solve_series(p, lam, &[Poly::one(0)], t, 0).unwrap();
    let oracle = common::stacked_oracle(p.entry(0, 0), lam, t).expect("oracle system is consistent");
    assert!(verify_residual(p, &u, t).unwrap().pass);
    oracle.iter().all(|(a, v)| u.series_coeff(a)[0].constant_term() == *v)
}

#[test]
fn catalog_operators_match_oracle_to_order_20() {
    let t = 20;
    let third = Scalar::from_ratio(1, 3);
    let cases: Vec<(OpMatrix, Vec<Scalar>)> = vec![
        (op("catalog:sl2_spherical(k=0, m=0, lambda=1/3)", t, 1), vec![Scalar::from_ratio(4, 3)]),
        (op("catalog:sl2_whittaker(c1=1, m=2, lambda=1/3)", t, 1), vec![Scalar::from_ratio(4, 3)]),
        (op("catalog:toda2() - 34/225", t, 2), vec![third.clone(), Scalar::from_ratio(8, 15)]),
        (op("th*(th - 1/2) - t", t, 1), vec![Scalar::zero()]),
        (op("th*(th - 2/3) - t", t, 1), vec![Scalar::from_ratio(2, 3)]),
    ];
    for (p, lam) in &cases {
        assert!(compare(p, lam, t), "{}", p.to_expr_string());
    }
}

#[test]
fn half_shift_example_values() {
    let p = op("th*(th - 1/2) - t", 4, 1);
    let u = solve_series(&p, &[Scalar::zero()], &[Poly::one(0)], 4, 0).unwrap();
    let c = |k: u32| u.series_coeff(&MultiIndex(vec![k]))[0].constant_term();
    assert_eq!((c(0), c(1), c(2)), (Scalar::one(), Scalar::from_int(2), Scalar::from_ratio(2, 3)));
}

#[test]
fn random_operators_match_oracle() {
    let t = 6;
    let mut checked = 0;
    for seed in 0..60u64 {
        let mut r = common::rng(seed);
        let nt = 1 + (seed % 2) as usize;
        let lam: Vec<Scalar> = (0..nt).map(|_| common::small_rational(&mut r)).collect();
        // principal part Σ ϑ_i² keeps the indicial polynomial non-degenerate
        let mut p = RegOperator::zero(nt, 0, t, 0);
        for i in 0..nt {
            let th = RegOperator::theta(nt, 0, t, 0, i);
            p = p.add(&th.mul(&th));
        }
        let extra = common::random_op(&mut r, nt, 0, t, 0, 1, false);
        let mut tail = TruncSeries::zero(nt, 0, t, 0);
        for _ in 0..r.gen_range(1..=3) {
            let a = MultiIndex((0..nt).map(|_| r.gen_range(0..=1)).collect());
            if !a.is_zero() {
                tail = tail.add(&TruncSeries::t_monomial(nt, 0, t, 0, a, Poly::constant(0, common::gauss_scalar(&mut r))));
            }
        }
        p = p.add(&extra).add(&RegOperator::from_series(&tail));
        // shift by the indicial value so that λ is an exponent
        let wall = p.wall_action(&lam, &Poly::one(0)).constant_term();
        p = p.sub(&RegOperator::constant(nt, 0, t, 0, wall));
        let p = OpMatrix::scalar(p);
        match solve_series(&p, &lam, &[Poly::one(0)], t, 0) {
            Err(Error::Resonance(_)) => continue,
            Err(e) => panic!("seed {}: {}", seed, e),
            Ok(u) => {
                let oracle = common::stacked_oracle(p.entry(0, 0), &lam, t).expect("non-resonant system is solvable");
                for (a, v) in &oracle {
                    assert_eq!(u.series_coeff(a)[0].constant_term(), *v, "seed {} alpha {:?}", seed, a);
                }
                assert_eq!(boundary_value(&u).unwrap(), vec![Poly::one(0)]);
                checked += 1;
            }
        }
    }
    assert!(checked >= 40, "only {} non-resonant cases", checked);
}
