mod common;

use proptest::prelude::*;
use regsing_core::opalg::OpMatrix;
use regsing_core::parse::{parse_expression, ParseCtx};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn printed_operators_parse_back(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let nt = 1 + (seed % 2) as usize;
        let nx = ((seed / 2) % 3) as usize;
        let m = 1 + ((seed / 6) % 2) as usize;
        let mut p = common::random_matrix(&mut r, m, nt, nx, 5, 5, 3);
        if seed % 3 == 0 {
            let c = common::z_scalar(&mut r);
            p = p.scale(&c);
        }
        let text = p.to_expr_string();
        let back: OpMatrix = parse_expression(&text, &ParseCtx::new(5, 5).with_vars(nt, nx)).unwrap();
        prop_assert!(back.eq_mod(&p), "{}", text);
    }
}
