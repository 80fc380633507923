//! Resonance search against brute-force evaluation of the indicial polynomial.

mod common;

use rand::Rng;
use regsing_core::indicial::{indicial_matrix, resonance_set};
use regsing_core::opalg::{OpMatrix, RegOperator};
use regsing_core::{MultiIndex, Poly, Scalar};

fn indicial_value(p: &RegOperator, at: &[Scalar]) -> Scalar {
    p.wall_action(at, &Poly::one(0)).constant_term()
}

#[test]
fn resonances_match_brute_force() {
    let g = 6;
    let (mut exact, mut in_z) = (0, 0);
    for seed in 0..80u64 {
        let mut r = common::rng(seed);
        let nt = 1 + (seed % 2) as usize;
        // product of linear factors with integer gaps, so resonances actually occur
        let mut p = RegOperator::constant(nt, 0, 2, 0, Scalar::one());
        let lam: Vec<Scalar> = (0..nt).map(|_| common::small_rational(&mut r)).collect();
        for _ in 0..r.gen_range(1..=3) {
            let i = r.gen_range(0..nt);
            let gap = Scalar::from_int(r.gen_range(0..=4));
            let mut shift = &lam[i] + &gap;
            if r.gen_bool(0.3) {
                shift = &shift + &Scalar::z();
            }
            let f = RegOperator::theta(nt, 0, 2, 0, i).sub(&RegOperator::constant(nt, 0, 2, 0, shift));
            p = p.mul(&f);
        }
        if nt == 2 && r.gen_bool(0.5) {
            p = p.add(&RegOperator::theta(nt, 0, 2, 0, 0).mul(&RegOperator::theta(nt, 0, 2, 0, 1)).scale(&common::small_rational(&mut r)));
        }
        p = p.add(&RegOperator::from_series(&common::random_series(&mut r, nt, 0, 2, 0, false)).sub(&RegOperator::constant(
            nt,
            0,
            2,
            0,
            common::random_series(&mut r, nt, 0, 2, 0, false).eval_at_wall().constant_term(),
        )));
        let op = OpMatrix::scalar(p.clone());
        let ind = indicial_matrix(&op, None).unwrap();
        let rep = resonance_set(&ind, &lam, g).unwrap();
        let mut brute = Vec::new();
        for gamma in MultiIndex::graded_upto(nt, g) {
            if gamma.is_zero() {
                continue;
            }
            let at: Vec<Scalar> = lam.iter().zip(&gamma.0).map(|(l, k)| l + &Scalar::from_int(*k as i64)).collect();
            let v = indicial_value(&p, &at);
            if v.is_zero() {
                brute.push((gamma, None));
            } else if let Some(k) = v.valuation().filter(|&k| k > 0) {
                brute.push((gamma, Some(k)));
            }
        }
        let got: Vec<(MultiIndex, Option<i64>)> = rep.gamma_hits.iter().map(|h| (h.gamma.clone(), h.z_order)).collect();
        let mut got_sorted = got.clone();
        got_sorted.sort();
        brute.sort();
        exact += brute.iter().filter(|h| h.1.is_none()).count();
        in_z += brute.iter().filter(|h| h.1.is_some()).count();
        assert_eq!(got_sorted, brute, "seed {}: {}", seed, op.to_expr_string());
    }
    assert!(exact > 10 && in_z > 5, "too few resonances exercised: {} exact, {} in z", exact, in_z);
}
