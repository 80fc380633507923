use super::*;
use crate::coeffield::GaussRat;
use crate::holonomic::{stable_solutions, ConstCoeffModule};
use crate::parse::{parse_expression, ParseCtx};

fn op(src: &str, t: u32, x: i64, nt: usize, nx: usize) -> OpMatrix {
    parse_expression(src, &ParseCtx::new(t, x).with_vars(nt, nx)).unwrap()
}

fn q(p: i64, r: i64) -> Scalar {
    Scalar::from_ratio(p, r)
}

fn a1(k: u32) -> MultiIndex {
    MultiIndex(vec![k])
}

fn c0(u: &LogSeriesSolution, a: u32, k: u32) -> Scalar {
    u.coeff(&a1(a), &a1(k))[0].constant_term()
}

#[test]
fn bessel_type_series() {
    let p = op("th^2 - t", 8, 0, 1, 0);
    let u = solve_series(&p, &[Scalar::zero()], &[Poly::one(0)], 8, 0).unwrap();
    let mut f = 1i64;
    for k in 0..=8u32 {
        if k > 0 {
            f *= k as i64;
        }
        assert_eq!(c0(&u, k, 0), q(1, f * f));
    }
    assert!(verify_residual(&p, &u, 8).unwrap().pass);
}

#[test]
fn resonance_and_seed_errors() {
    let p = op("th*(th - 2) - t", 6, 0, 1, 0);
    match solve_series(&p, &[Scalar::zero()], &[Poly::one(0)], 6, 0) {
        Err(Error::Resonance(r)) => assert_eq!(r.gamma_hits[0].gamma, a1(2)),
        other => panic!("expected resonance, got {:?}", other.map(|u| u.coeffs.len())),
    }
    let p = op("th^2 - 1 - t", 6, 0, 1, 0);
    assert!(matches!(solve_series(&p, &[Scalar::zero()], &[Poly::one(0)], 6, 0), Err(Error::SeedNotInNullspace)));
    let p = op("th^2 + Dx", 6, 3, 1, 1);
    assert!(matches!(solve_series(&p, &[Scalar::zero()], &[Poly::one(1)], 6, 3), Err(Error::NotDStar { .. })));
}

#[test]
fn x_derivatives_lower_precision() {
    let p = op("th^2 + t*Dx^2", 4, 12, 1, 1);
    let x = Poly::var(1, 0);
    let seed = x.pow(8);
    let u = solve_series(&p, &[Scalar::zero()], &[seed], 4, 8).unwrap();
    assert_eq!(u.precision_at(&a1(0)), 8);
    assert_eq!(u.precision_at(&a1(1)), 6);
    assert_eq!(u.precision_at(&a1(4)), 0);
    // φ_1 = −∂²x^8 = −56 x^6
    assert_eq!(u.series_coeff(&a1(1))[0], x.pow(6).scale(&Scalar::from_int(-56)));
    assert!(verify_residual(&p, &u, 4).unwrap().pass);
}

#[test]
fn log_lift_matches_block_form() {
    let p = op("th^2 + t^2*Dx1^2", 4, 4, 1, 1);
    let (l, basis) = lift_operator(&p, 1).unwrap();
    assert_eq!(basis, vec![a1(0), a1(1)]);
    let expect = op("[[th^2 + t^2*Dx1^2, 2*th], [0, th^2 + t^2*Dx1^2]]", 4, 4, 1, 1);
    assert!(l.eq_mod(&expect));
}

#[test]
fn logarithmic_solution() {
    let p = op("th^2 - t", 6, 0, 1, 0);
    let module = ConstCoeffModule::from_indicial(std::slice::from_ref(&p)).unwrap();
    let (basis, _) = stable_solutions(&module, &[Scalar::zero()], 2).unwrap();
    assert_eq!(basis.len(), 2);
    let rep = solve_with_logs(std::slice::from_ref(&p), &[Scalar::zero()], &basis, 6, 0).unwrap();
    let logsol = rep.solutions.iter().find(|u| u.log_degree == 1).unwrap();
    assert!(verify_residual(&p, logsol, 6).unwrap().pass);
    // u = Σ t^k/(k!)² log t − Σ 2 H_k t^k/(k!)²
    assert_eq!(c0(logsol, 1, 1), Scalar::one());
    assert_eq!(c0(logsol, 1, 0), Scalar::from_int(-2));
    assert_eq!(c0(logsol, 2, 0), q(-3, 4));
    assert_eq!(c0(logsol, 3, 0), q(-11, 108));
}

#[test]
fn corrupted_coefficient_is_localized() {
    let p = op("th^2 - t", 6, 0, 1, 0);
    let mut u = solve_series(&p, &[Scalar::zero()], &[Poly::one(0)], 6, 0).unwrap();
    u.coeffs.insert((a1(3), a1(0)), vec![Poly::constant(0, Scalar::from_int(7))]);
    let rep = verify_residual(&p, &u, 6).unwrap();
    let alphas: Vec<u32> = rep.residuals.iter().map(|r| r.alpha.0[0]).collect();
    assert_eq!(alphas, vec![3, 4]);
}

#[test]
fn inhomogeneous_with_prescribed_resonant_coefficient() {
    // ϑ(ϑ−1) u = t: the α=1 coefficient is free, the rest is forced
    let p = op("th*(th - 1)", 4, 0, 1, 0);
    let rhs: BTreeMap<MultiIndex, Vec<Poly>> = [(a1(1), vec![Poly::zero(0)]), (a1(2), vec![Poly::one(0)])].into_iter().collect();
    let seeds: BTreeMap<MultiIndex, Vec<Poly>> =
        [(a1(0), vec![Poly::zero(0)]), (a1(1), vec![Poly::constant(0, Scalar::from_int(5))])].into_iter().collect();
    let u = solve_inhomogeneous(&p, &[Scalar::zero()], &rhs, &seeds, 4, 0).unwrap();
    assert_eq!(c0(&u, 2, 0), q(1, 2));
    assert_eq!(c0(&u, 1, 0), Scalar::from_int(5));
}

#[test]
fn family_with_integer_gap() {
    let p = op("th*(th - 1 - z) - t", 6, 0, 1, 0);
    let members = vec![
        FamilyMember { lambda: Scalar::zero(), seed: vec![Scalar::one()] },
        FamilyMember { lambda: parse_lambda("1 + z"), seed: vec![Scalar::one()] },
    ];
    let fam = family_solve_and_normalize(&p, &members, 6, 0, None).unwrap();
    assert_eq!(fam.pole_profile, vec![1, 0]);
    assert_eq!(fam.predicted_pole_bounds[0], 1);
    let w = &fam.limits[0];
    assert_eq!(w.log_degree, 1);
    assert_eq!(c0(w, 0, 0), Scalar::one());
    assert_eq!(c0(w, 1, 1), Scalar::one());
    assert_eq!(c0(w, 2, 0), q(-3, 4));
    assert_eq!(c0(w, 2, 1), q(1, 2));
    assert_eq!(fam.recipes[0][&1].0[&-1], GaussRat::one());
    let p0 = p.specialize_z(&GaussRat::zero()).unwrap();
    for w in &fam.limits {
        assert!(verify_residual(&p0, w, 6).unwrap().pass);
    }
}

#[test]
fn family_with_coinciding_exponents() {
    let p = op("th*(th - z) - t", 5, 0, 1, 0);
    let members = vec![
        FamilyMember { lambda: Scalar::zero(), seed: vec![Scalar::one()] },
        FamilyMember { lambda: Scalar::z(), seed: vec![Scalar::one()] },
    ];
    let fam = family_solve_and_normalize(&p, &members, 5, 0, None).unwrap();
    let p0 = p.specialize_z(&GaussRat::zero()).unwrap();
    assert_eq!(fam.limits[0].log_degree, 0);
    assert_eq!(fam.limits[1].log_degree, 1);
    assert_eq!(c0(&fam.limits[1], 0, 1), Scalar::one());
    for w in &fam.limits {
        assert!(verify_residual(&p0, w, 5).unwrap().pass);
    }
}

#[test]
fn involutive_pair() {
    // commuting pair: the identity holds with S = T = 0
    let p = op("th1^2 + th2^2 - t1", 3, 0, 2, 0);
    let i2 = op("th2", 3, 0, 2, 0);
    let z = OpMatrix::zero(1, 2, 0, 3, 0);
    let rep = check_involutive(&p, std::slice::from_ref(&i2), std::slice::from_ref(&z), &[vec![z.clone()]]).unwrap();
    assert!(rep.pass);
    let bad = op("th2 + t2", 3, 0, 2, 0);
    let rep = check_involutive(&p, std::slice::from_ref(&bad), std::slice::from_ref(&z), &[vec![z.clone()]]).unwrap();
    assert!(!rep.pass);
}

#[test]
fn induced_equations() {
    let p = op("th1^2 + th2^2 - t1", 4, 0, 2, 0);
    let i2 = op("th2 - 1", 4, 0, 2, 0);
    let system = vec![p.clone(), i2];
    let lam = [Scalar::i(), Scalar::one()];
    let good = solve_series(&p, &lam, &[Poly::one(0)], 4, 0).unwrap();
    let rep = verify_induced(&system, &good, 4).unwrap();
    assert!(rep.pass);
    assert!(rep.boundary_satisfies.iter().all(|&b| b));
    let lam = [Scalar::one(), Scalar::i()];
    let bad = solve_series(&p, &lam, &[Poly::one(0)], 4, 0).unwrap();
    let rep = verify_induced(&system, &bad, 4).unwrap();
    assert!(!rep.pass);
    assert!(!rep.boundary_satisfies[1]);
    assert!(rep.residuals[1].residuals.iter().any(|r| r.alpha.is_zero()));
}

fn parse_lambda(s: &str) -> Scalar {
    crate::parse::parse_scalar(s).unwrap()
}

#[test]
fn boundary_value_round_trip() {
    let p = op("th*(th - 1/2) - t", 6, 0, 1, 0);
    let u = solve_series(&p, &[Scalar::zero()], &[Poly::one(0)], 6, 0).unwrap();
    assert_eq!(boundary_value(&u).unwrap(), vec![Poly::one(0)]);
    // 1 + 2t + (2/3)t²
    assert_eq!(c0(&u, 1, 0), Scalar::from_int(2));
    assert_eq!(c0(&u, 2, 0), q(2, 3));
    let p = op("th^2 - t", 4, 0, 1, 0);
    let module = ConstCoeffModule::from_indicial(std::slice::from_ref(&p)).unwrap();
    let (basis, _) = stable_solutions(&module, &[Scalar::zero()], 2).unwrap();
    let rep = solve_with_logs(std::slice::from_ref(&p), &[Scalar::zero()], &basis, 4, 0).unwrap();
    let logsol = rep.solutions.iter().find(|u| u.log_degree == 1).unwrap();
    assert!(boundary_value(logsol).is_err());
}
