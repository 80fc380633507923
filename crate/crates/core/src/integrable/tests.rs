use super::*;
use crate::indicial::{check_converg, check_nondeg, Verdict};
use crate::parse::{parse_expression, CatalogArg, NamedArg, ParseCtx};
use crate::poly::Poly;

fn op(src: &str, t: u32, x: i64, nt: usize, nx: usize) -> OpMatrix {
    parse_expression(src, &ParseCtx::new(t, x).with_vars(nt, nx).with_catalog(&resolve)).unwrap()
}

fn q(p: i64, r: i64) -> Scalar {
    Scalar::from_ratio(p, r)
}

fn ints(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&k| Scalar::from_int(k)).collect()
}

fn xy(src: &str) -> Poly {
    op(src, 0, 8, 0, 2).entry(0, 0).coeff(&MultiIndex(vec![]), &MultiIndex(vec![0, 0])).coeff(&MultiIndex(vec![]))
}

#[test]
fn toda_from_root_system_and_dictionary() {
    let spec = PotentialSpec::new(Family::RootToda).with_root_type(RootType::A).with("C1", Scalar::from_int(2));
    let built = build_operator(&spec, 6, 0).unwrap();
    assert!(built.operator.eq_mod(&op("th1^2 + (th2 - th1)^2 + 2*t1", 6, 0, 2, 0)));
    assert!(built.operator.eq_mod(&op("catalog:toda2()", 6, 0, 2, 0)));
    assert_eq!(built.dictionary[0], "t1 = exp(x1 - x2)");
    assert_eq!(built.dictionary[2], "d/dx1 = th1");
    assert_eq!(built.dictionary[3], "d/dx2 = -th1 + th2");
}

#[test]
fn toda_pair_commutes() {
    let h = op("catalog:toda2()", 12, 0, 2, 0);
    let i2 = op("catalog:toda2_I2()", 12, 0, 2, 0);
    let rep = integrability_verify(&h, std::slice::from_ref(&i2), 12).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.checked_to, 12);
    let rep = integrability_verify(&h, &[h.mul(&h)], 12).unwrap();
    assert!(rep.pass);
}

#[test]
fn wrong_sign_integral_is_flagged() {
    let h = op("catalog:toda2()", 12, 0, 2, 0);
    let bad = op("th1*(th2 - th1) + t1", 12, 0, 2, 0);
    let rep = integrability_verify(&h, std::slice::from_ref(&bad), 12).unwrap();
    assert!(!rep.pass);
    let expect = op("4*t1*(2*th1 - th2 + 1)", 12, 0, 2, 0);
    assert!(h.commutator(&bad).unwrap().eq_mod(&expect));
    assert_eq!(rep.pairs[0].residuals.len(), 3);
}

#[test]
fn root_trig_bc_matches_listed_potential() {
    let c = [("C1", q(1, 3)), ("C2", q(-2, 5)), ("C3", Scalar::from_int(7))];
    let mut a = PotentialSpec::new(Family::RootTrig).with_root_type(RootType::BC);
    let mut b = PotentialSpec::new(Family::TrigBc);
    for (k, v) in c {
        a = a.with(k, v.clone());
        b = b.with(k, v);
    }
    let a = build_operator(&a, 8, 0).unwrap().operator;
    let b = build_operator(&b, 8, 0).unwrap().operator;
    assert!(a.eq_mod(&b));
    // sh^{-2}(x2/2) contributes 4(t2 + 2 t2^2 + ...) with C3 = 7
    assert_eq!(b.entry(0, 0).coeff(&MultiIndex(vec![0, 0]), &MultiIndex(vec![])).coeff(&MultiIndex(vec![0, 2])).constant_term(), {
        // 2 e^{x2} terms: C3 sh^{-2}(x2/2) → 28·2, C2 sh^{-2}(x2) → 4·(−2/5)
        &Scalar::from_int(56) + &q(-8, 5)
    });
}

#[test]
fn sl2_operators() {
    let args = |k: i64, m: i64| {
        vec![
            NamedArg { name: Some("k".into()), value: CatalogArg::Scalar(Scalar::from_int(k)) },
            NamedArg { name: Some("m".into()), value: CatalogArg::Scalar(Scalar::from_int(m)) },
        ]
    };
    let sph = resolve("sl2_spherical", &args(0, 0), 6, 0).unwrap();
    assert_eq!(sph.sigma_star(), op("-(th - 1/2)^2", 6, 0, 1, 0).sigma_star());
    // k = m = 0: −(ϑ−½)² + 2t²/(1−t²) ϑ
    assert!(sph.eq_mod(&op("-(th - 1/2)^2 + 2*(t^2 + t^4 + t^6)*th", 6, 0, 1, 0)));
    let sph = resolve("sl2_spherical", &args(1, 2), 4, 0).unwrap();
    // ((k²+m²)t² − km t(1+t²))/(1−t²)² = −2t + 5t² − 6t³ + 10t⁴ + ...
    assert!(sph.eq_mod(&op("-(th - 1/2)^2 + 2*(t^2 + t^4)*th - 2*t + 5*t^2 - 6*t^3 + 10*t^4", 4, 0, 1, 0)));
    let w = op("catalog:sl2_whittaker(c1=2, m=3, lambda=1/3)", 4, 0, 1, 0);
    assert!(w.eq_mod(&op("-(th - 1/2)^2 + 4*t^2 - 6*t + (1/3 + 1/2)^2", 4, 0, 1, 0)));
}

#[test]
fn catalog_outputs_are_regular() {
    let srcs = [
        "catalog:trig_bc(n=3)",
        "catalog:trig_a_bry(n=2, C1=2)",
        "catalog:toda_d_bry(n=3)",
        "catalog:toda_bc(n=2)",
        "catalog:root_trig(type=D, n=3)",
        "catalog:root_trig(type=C, n=2)",
        "catalog:root_toda(type=B, n=3)",
        "catalog:toda2()",
    ];
    for s in srcs {
        let n = if s.contains("n=3") { 3 } else { 2 };
        let p = op(s, 4, 0, n, 0);
        assert!(p.is_d_star().value, "{}", s);
        assert_eq!(check_nondeg(&p).unwrap().verdict, Verdict::Pass, "{}", s);
        assert_eq!(check_converg(&p, None).unwrap().verdict, Verdict::Pass, "{}", s);
    }
    for s in ["catalog:sl2_spherical(k=1, m=2)", "catalog:sl2_whittaker(1, 0, 2)"] {
        let p = op(s, 4, 0, 1, 0);
        assert!(p.is_d_star().value);
        assert_eq!(check_nondeg(&p).unwrap().verdict, Verdict::Pass);
        assert_eq!(check_converg(&p, None).unwrap().verdict, Verdict::Pass);
    }
    let p = op("catalog:sl2_laplacian()", 4, 4, 1, 1);
    assert!(p.is_d_star().value);
    for k in [2, 3] {
        let p = op(&format!("catalog:sl3_casimir(k={})", k), 4, 4, 2, 3);
        assert!(p.is_d_star().value);
    }
}

#[test]
fn sl3_casimirs_commute() {
    let d2 = op("catalog:sl3_casimir(k=2)", 6, 6, 2, 3);
    let d3 = op("catalog:sl3_casimir(k=3)", 6, 6, 2, 3);
    let rep = integrability_verify(&d2, &[d3], 6).unwrap();
    assert!(rep.pass, "{}", rep.pairs[0].expression);
}

#[test]
fn bad_catalog_calls() {
    let ctx = ParseCtx::new(4, 0).with_vars(2, 0).with_catalog(&resolve);
    assert!(parse_expression("catalog:nope()", &ctx).is_err());
    assert!(parse_expression("catalog:trig_bc(q=1)", &ctx).is_err());
    assert!(parse_expression("catalog:root_toda(n=2)", &ctx).is_err());
    assert!(parse_expression("catalog:sl3_casimir(k=4)", &ctx).is_err());
}

#[test]
fn directions_of_quartic() {
    let rep = split_directions(&ints(&[1, 0, 0, 0, 1])).unwrap();
    assert_eq!(rep.rotated, ints(&[0, -4, 0, 4, 0]));
    let got: Vec<(Scalar, Scalar, u32)> = rep.directions.iter().map(|d| (d.a.clone(), d.b.clone(), d.multiplicity)).collect();
    let one = Scalar::one;
    assert_eq!(
        got,
        vec![
            (one(), Scalar::zero(), 1),
            (Scalar::zero(), one(), 1),
            (one(), Scalar::from_int(-1), 1),
            (one(), one(), 1)
        ]
    );
    assert_eq!(rep.scale, Some(Scalar::from_int(4)));
    assert!(rep.unsolved.is_none());

    let rep = split_directions(&ints(&[1, 0])).unwrap();
    assert_eq!(rep.directions, vec![SplitDirection { a: Scalar::zero(), b: Scalar::one(), multiplicity: 1 }]);

    // rotated symbol (ξ − τ)³
    let rep = split_directions(&[q(5, 3), Scalar::one(), Scalar::one(), q(5, 3)]).unwrap();
    assert_eq!(rep.rotated, ints(&[1, -3, 3, -1]));
    assert_eq!(rep.directions, vec![SplitDirection { a: Scalar::one(), b: Scalar::one(), multiplicity: 3 }]);

    // ξ² + τ²: rotation invariant
    assert!(split_directions(&ints(&[1, 0, 1])).is_err());
    // ξ²τ rotates to ξ(ξ² − 2τ²): the quadratic has no roots in ℚ(i)
    let rep = split_directions(&ints(&[0, 1, 0, 0])).unwrap();
    assert_eq!(rep.directions, vec![SplitDirection { a: Scalar::one(), b: Scalar::zero(), multiplicity: 1 }]);
    assert!(rep.scale.is_none());
    assert!(rep.unsolved.is_some());
}

#[test]
fn membership_pass_fail_and_certificate() {
    let dirs = split_directions(&ints(&[1, 0, 0, 0, 1])).unwrap().directions;
    let r = xy("(x1 - x2)^2 + (x1 + x2)^3 + x1^4");
    let rep = splitting_membership(&[r], &dirs, 4).unwrap();
    assert!(rep.pass);
    assert!(!rep.entries[0].pieces.is_empty());

    let r = xy("x1^3*x2");
    let rep = splitting_membership(std::slice::from_ref(&r), &dirs, 4).unwrap();
    assert!(!rep.pass);
    let ob = rep.entries[0].obstruction.clone().unwrap();
    assert_eq!(ob.degree, 4);
    // functional kills the span but not x³y
    for f in ["x1^4", "x2^4", "(x1 - x2)^4", "(x1 + x2)^4", "x1^2*x2^2", "x1^3*x2 + x1*x2^3"] {
        let p = xy(f);
        let v: Scalar = (0..=4u32).map(|j| &ob.functional[j as usize] * &p.coeff(&MultiIndex(vec![4 - j, j]))).sum();
        assert!(v.is_zero(), "{}", f);
    }
    assert!(!ob.pairing.is_zero());
}

#[test]
fn trig_bc2_taylor_splits() {
    let spec = PotentialSpec::new(Family::TrigBc).with("C1", q(1, 2)).with("C2", Scalar::from_int(3)).with("C3", q(-1, 7));
    let r = potential_taylor(&spec, &ints(&[2, 3]), 6).unwrap();
    assert!(r.total_degree() == Some(6));
    let dirs = split_directions(&ints(&[1, 0, 0, 0, 1])).unwrap().directions;
    assert!(splitting_membership(std::slice::from_ref(&r), &dirs, 6).unwrap().pass);
    // dropping the x ± y directions breaks it
    assert!(!splitting_membership(&[r], &dirs[..2], 6).unwrap().pass);
    // constant term: C1 (sh^{-2}(log 6 /2) + sh^{-2}(log(2/3)/2)) + ...
    let r = potential_taylor(&PotentialSpec::new(Family::TrigBc).with("C2", Scalar::zero()).with("C3", Scalar::zero()), &ints(&[2, 3]), 0).unwrap();
    // 4w/(1−w)² at w = 6 and w = 2/3
    assert_eq!(r.constant_term(), &q(24, 25) + &q(24, 1));
}

#[test]
fn potential_spec_from_text() {
    let spec = PotentialSpec::parse("catalog:root_trig(type=BC, n=3, C2=-1/2)").unwrap();
    assert_eq!(spec.family, Family::RootTrig);
    assert_eq!(spec.root_type, Some(RootType::BC));
    assert_eq!(spec.params["n"], Scalar::from_int(3));
    assert_eq!(spec.params["C2"], q(-1, 2));
    assert!(PotentialSpec::parse("th1 + 1").is_err());
    let built = catalog_build("toda2_I2", &[], 4, 0).unwrap();
    assert_eq!(built.dictionary[1], "t2 = exp(x2)");
}
