//! Acceptance run: one PASS/FAIL line per criterion. All comparisons are exact;
//! the only tolerances are the wall-clock budgets, pinned below.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use regsing_core::frobenius::{
    family_solve_and_normalize, solve_series, solve_with_logs, verify_induced, verify_residual, FamilyMember,
};
use regsing_core::holonomic::{find_exponent_candidates, module_dimension, stable_solutions, ConstCoeffModule, ExpPolySolution};
use regsing_core::indicial::{indicial_matrix, resonance_set};
use regsing_core::integrable::{potential_taylor, resolve, split_directions, splitting_membership, PotentialSpec};
use regsing_core::opalg::{poisson_bracket, OpMatrix};
use regsing_core::parse::{parse_expression, parse_scalar, ParseCtx};
use regsing_core::{GaussRat, MultiIndex, Poly, Scalar};

const SYMBOL_BUDGET: Duration = Duration::from_secs(10);
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const SPLIT_BUDGET: Duration = Duration::from_secs(5);

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn op(src: &str, t: u32, x: i64, nt: usize, nx: usize) -> OpMatrix {
    parse_expression(src, &ParseCtx::new(t, x).with_vars(nt, nx).with_catalog(&resolve))
        .unwrap_or_else(|e| panic!("{}: {}", src, e))
}

fn q(p: i64, r: i64) -> Scalar {
    Scalar::from_ratio(p, r)
}

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, budget: Duration) -> std::result::Result<Duration, String> {
    let el = start.elapsed();
    ensure(el < budget, format!("took {:.2?}, budget {:?}", el, budget))?;
    Ok(el)
}

fn symbol_calculus() -> Check {
    let start = Instant::now();
    let (t, x) = (6, 6);
    let mut pairs = 0;
    for seed in 0..400u64 {
        if pairs == 120 {
            break;
        }
        let mut r = common::rng(seed);
        let nt = 1 + (seed % 2) as usize;
        let nx = ((seed / 2) % 3) as usize;
        let p = common::random_matrix(&mut r, 1, nt, nx, t, x, 3);
        let qq = common::random_matrix(&mut r, 1, nt, nx, t, x, 3);
        if p.is_zero() || qq.is_zero() {
            continue;
        }
        let (kp, kq) = (p.order().unwrap(), qq.order().unwrap());
        let pq = p.mul(&qq);
        ensure(pq.sigma_k(kp + kq).eq_mod(&p.sigma_k(kp).mul(&qq.sigma_k(kq))), format!("σ multiplicativity, seed {}", seed))?;
        ensure(pq.sigma_star().eq_mod(&p.sigma_star().mul(&qq.sigma_star())), format!("σ_* multiplicativity, seed {}", seed))?;
        if kp + kq >= 1 {
            let lhs = p.commutator(&qq).unwrap().sigma_k(kp + kq - 1);
            ensure(lhs.eq_mod(&poisson_bracket(&p.sigma_k(kp), &qq.sigma_k(kq))), format!("bracket identity, seed {}", seed))?;
        }
        pairs += 1;
    }
    ensure(pairs >= 100, format!("only {} pairs", pairs))?;
    let el = within(start, SYMBOL_BUDGET)?;
    Ok(format!("{} pairs, {:.2?}", pairs, el))
}

fn necessity_examples() -> Check {
    let p = op("th + x*Dx", 4, 4, 1, 1);
    let qq = op("t*Dx", 4, 4, 1, 1);
    ensure(p.commutator(&qq).unwrap().is_zero(), "[t∂t + x∂x, t∂x] ≠ 0")?;
    ensure(qq.sigma_star().is_zero(), "σ_*(t∂x) ≠ 0")?;
    ensure(!p.is_d_star().value, "t∂t + x∂x reported in D_*")?;
    let p = op("[[th, 0], [0, th + 1]]", 4, 0, 1, 0);
    let qq = op("[[0, t], [0, 0]]", 4, 0, 1, 0);
    ensure(p.commutator(&qq).unwrap().is_zero(), "matrix pair does not commute")?;
    ensure(!qq.sigma_principal().unwrap().is_scalar_matrix(), "σ(Q) is scalar")?;
    ensure(!p.sigma_k(0).is_scalar_matrix(), "σ_{ord P−1}(P) is scalar")?;
    ensure(p.order().unwrap() == 1, "order of the diagonal example")?;
    Ok("both commute, hypotheses violated".into())
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let t = 20;
    let cases: Vec<(&str, usize, Vec<Scalar>)> = vec![
        ("catalog:sl2_spherical(k=0, m=0, lambda=1/3)", 1, vec![q(4, 3)]),
        ("catalog:sl2_whittaker(c1=1, m=2, lambda=1/3)", 1, vec![q(4, 3)]),
        ("catalog:toda2() - 34/225", 2, vec![q(1, 3), q(8, 15)]),
        ("th*(th - 1/2) - t", 1, vec![Scalar::zero()]),
        ("th*(th - 2/3) - t", 1, vec![q(2, 3)]),
    ];
    let mut coeffs = 0;
    for (src, nt, lam) in &cases {
        let p = op(src, t, 0, *nt, 0);
        let u = solve_series(&p, lam, &[Poly::one(0)], t, 0).map_err(|e| format!("{}: {}", src, e))?;
        let oracle = common::stacked_oracle(p.entry(0, 0), lam, t).ok_or(format!("{}: oracle inconsistent", src))?;
        for (a, v) in &oracle {
            ensure(u.series_coeff(a)[0].constant_term() == *v, format!("{} differs at {:?}", src, a.0))?;
            coeffs += 1;
        }
    }
    let el = within(start, ORACLE_BUDGET)?;
    Ok(format!("{} operators, {} coefficients, {:.2?}", cases.len(), coeffs, el))
}

fn whittaker_exponents() -> Check {
    let lams = [
        "0", "1/2", "1", "3/2", "-1/2", "-1", "-3/2", "2", "-5/2", "5/2", "1/3", "1/4", "-2/5", "2/3", "1/5", "3/7", "-1/3",
        "5/6", "-3/4", "7/3",
    ];
    let mut resonant = 0;
    for l in lams {
        let lam = parse_scalar(l).unwrap();
        let p = op(&format!("catalog:sl2_whittaker(c1=1, m=1, lambda={})", l), 4, 0, 1, 0);
        let ind = indicial_matrix(&p, None).map_err(|e| e.to_string())?;
        let det = ind.det().map_err(|e| e.to_string())?;
        let xi = Poly::var(1, 0);
        let r1 = &lam + &Scalar::one();
        let r2 = -&lam;
        let expect = &(&xi - &Poly::constant(1, r1.clone())) * &(&xi - &Poly::constant(1, r2.clone()));
        ensure(det == expect.scale(&Scalar::from_int(-1)), format!("λ = {}: indicial polynomial {}", l, det.fmt_with(&|_| "l".into())))?;
        let mut hit = false;
        for e in [r1, r2] {
            hit |= !resonance_set(&ind, &[e], 10).map_err(|e| e.to_string())?.is_empty();
        }
        let gap = &(&lam * &Scalar::from_int(2)) + &Scalar::one();
        let predicted = gap.as_gauss().is_some_and(|g| g.is_integer() && !g.is_zero());
        ensure(hit == predicted, format!("λ = {}: resonance {} but 2λ+1 = {}", l, hit, gap.to_expr_string()))?;
        resonant += hit as usize;
    }
    Ok(format!("{} values, {} resonant", lams.len(), resonant))
}

fn holonomic_dimensions() -> Check {
    let s2 = [op("th1 + th2", 2, 0, 2, 0), op("th1*th2", 2, 0, 2, 0)];
    let module = ConstCoeffModule::from_indicial(&s2).map_err(|e| e.to_string())?;
    let (basis, _) = stable_solutions(&module, &[Scalar::zero(), Scalar::zero()], 2).map_err(|e| e.to_string())?;
    let strings: Vec<Vec<String>> = basis.iter().map(|b| b.poly_strings()).collect();
    ensure(strings == vec![vec!["1".to_string()], vec!["y1 - y2".to_string()]], format!("S2 basis {:?}", strings))?;
    let b2 = [op("th1^2 + th2^2 - 5", 2, 0, 2, 0), op("th1^2*th2^2 - 4", 2, 0, 2, 0)];
    let module = ConstCoeffModule::from_indicial(&b2).map_err(|e| e.to_string())?;
    let cands = find_exponent_candidates(&module).map_err(|e| e.to_string())?;
    ensure(cands.complete, "B2 frequencies incomplete")?;
    let rep = module_dimension(&module, &cands.candidates, 2).map_err(|e| e.to_string())?;
    ensure(rep.dimension == 8 && rep.frequencies.len() == 8 && rep.semisimple, format!("B2 dimension {}", rep.dimension))?;
    ensure(rep.frequencies.iter().all(|f| f.multiplicity == 1), "B2 multiplicity above 1")?;
    let mut flips = 0;
    for a in -2..=2i64 {
        for b in -2..=2i64 {
            let rels = [op(&format!("th1 + th2 - ({})", a + b), 2, 0, 2, 0), op(&format!("th1*th2 - ({})", a * b), 2, 0, 2, 0)];
            let module = ConstCoeffModule::from_indicial(&rels).map_err(|e| e.to_string())?;
            let cands = find_exponent_candidates(&module).map_err(|e| e.to_string())?;
            let rep = module_dimension(&module, &cands.candidates, 2).map_err(|e| e.to_string())?;
            ensure(rep.dimension == 2, format!("S2 at ({}, {}) has dimension {}", a, b, rep.dimension))?;
            ensure(rep.semisimple == (a != b), format!("semisimplicity at ({}, {})", a, b))?;
            flips += (a == b) as usize;
        }
    }
    Ok(format!("S2 r=2, B2 r=8, {} non-semisimple points on λ1=λ2", flips))
}

fn log_solutions() -> Check {
    let t = 15;
    let p = op("th^2 - t", t, 0, 1, 0);
    let module = ConstCoeffModule::from_indicial(std::slice::from_ref(&p)).map_err(|e| e.to_string())?;
    let (basis, _) = stable_solutions(&module, &[Scalar::zero()], 2).map_err(|e| e.to_string())?;
    let rep = solve_with_logs(std::slice::from_ref(&p), &[Scalar::zero()], &basis, t, 0).map_err(|e| e.to_string())?;
    ensure(rep.solutions.len() == 2, format!("{} solutions", rep.solutions.len()))?;
    ensure(rep.solutions.iter().any(|u| u.log_degree == 1), "no logarithmic solution")?;
    for u in &rep.solutions {
        let res = verify_residual(&p, u, t).map_err(|e| e.to_string())?;
        ensure(res.pass && res.residuals.is_empty(), format!("residual at log degree {}", u.log_degree))?;
        let lead = ExpPolySolution { lambda: u.lambda.clone(), poly: u.boundary_log_part() };
        ensure(module.apply(&lead).iter().all(|r| r.is_zero()), "leading term misses the indicial equation")?;
    }
    Ok(format!("2 solutions, log degree 1, residual 0 to T={}", t))
}

fn parameter_family() -> Check {
    let t = 15;
    let p = op("th*(th - 1 - z) - t", t, 0, 1, 0);
    let members = vec![
        FamilyMember { lambda: Scalar::zero(), seed: vec![Scalar::one()] },
        FamilyMember { lambda: parse_scalar("1 + z").unwrap(), seed: vec![Scalar::one()] },
    ];
    let fam = family_solve_and_normalize(&p, &members, t, 0, None).map_err(|e| e.to_string())?;
    let a1 = fam.members[0].series_coeff(&MultiIndex(vec![1]))[0].constant_term();
    ensure(a1 == -&Scalar::z().inv().unwrap(), format!("t¹ coefficient {}", a1.to_expr_string()))?;
    ensure(fam.pole_profile[0] == 1 && fam.predicted_pole_bounds[0] == 1, format!("pole orders {:?}", fam.pole_profile))?;
    ensure(fam.valid_through.iter().all(|&v| v >= 0), "normalized combination not holomorphic")?;
    let p0 = p.specialize_z(&GaussRat::zero()).map_err(|e| e.to_string())?;
    ensure(fam.limits[0].log_degree == 1, "limit has no logarithm")?;
    for w in &fam.limits {
        ensure(verify_residual(&p0, w, t).map_err(|e| e.to_string())?.pass, "limit residual nonzero")?;
    }
    Ok(format!("a1 = -1/z, pole order 1, log limit exact to T={}", t))
}

fn induced_equations() -> Check {
    let t = 12;
    let lam = [q(1, 3), q(8, 15)];
    let h = op("catalog:toda2() - 34/225", t, 0, 2, 0);
    let good = [h.clone(), op("catalog:toda2_I2() - 1/15", t, 0, 2, 0)];
    let u = solve_series(&h, &lam, &[Poly::one(0)], t, 0).map_err(|e| e.to_string())?;
    let rep = verify_induced(&good, &u, t).map_err(|e| e.to_string())?;
    ensure(rep.pass && rep.boundary_satisfies.iter().all(|&b| b), "consistent boundary data fails")?;
    let bad = [h, op("catalog:toda2_I2() - 1/5", t, 0, 2, 0)];
    let rep = verify_induced(&bad, &u, t).map_err(|e| e.to_string())?;
    ensure(!rep.pass && !rep.boundary_satisfies[1], "inconsistent boundary data passes")?;
    let lowest = rep.residuals[1].residuals.iter().map(|r| r.alpha.total()).min();
    ensure(lowest == Some(0), format!("leading residual at |α| = {:?}", lowest))?;
    Ok(format!("I2 u = 0 to T={}; violation localized at α = 0", t))
}

fn splitting() -> Check {
    let start = Instant::now();
    let ints = |v: &[i64]| v.iter().map(|&k| Scalar::from_int(k)).collect::<Vec<_>>();
    let rep = split_directions(&ints(&[1, 0, 0, 0, 1])).map_err(|e| e.to_string())?;
    let mut got: Vec<(String, String, u32)> =
        rep.directions.iter().map(|d| (d.a.to_expr_string(), d.b.to_expr_string(), d.multiplicity)).collect();
    got.sort();
    let mut want: Vec<(String, String, u32)> =
        [("1", "0"), ("0", "1"), ("1", "1"), ("1", "-1")].iter().map(|(a, b)| (a.to_string(), b.to_string(), 1)).collect();
    want.sort();
    ensure(got == want, format!("directions {:?}", got))?;
    let spec = PotentialSpec::parse("trig_bc(C1=1/2, C2=3, C3=-1/7)").map_err(|e| e.to_string())?;
    let r = potential_taylor(&spec, &ints(&[2, 3]), 6).map_err(|e| e.to_string())?;
    ensure(splitting_membership(&[r], &rep.directions, 6).map_err(|e| e.to_string())?.pass, "Trig-BC2 fails membership")?;
    let x3y = Poly::monomial(2, MultiIndex(vec![3, 1]), Scalar::one());
    let m = splitting_membership(&[x3y], &rep.directions, 6).map_err(|e| e.to_string())?;
    let ob = m.entries[0].obstruction.as_ref().ok_or("x³y passes")?;
    ensure(!m.pass && ob.degree == 4 && !ob.pairing.is_zero(), format!("x³y obstruction at degree {}", ob.degree))?;
    let el = within(start, SPLIT_BUDGET)?;
    Ok(format!("4 directions, Trig-BC2 in span, x³y blocked at degree 4, {:.2?}", el))
}

fn run_cli(threads: &str, args: &[&str]) -> std::result::Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_regsing"))
        .args(args)
        .env("REGSING_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), format!("{:?} exited with {:?}", args, out.status.code()))?;
    Ok(out.stdout)
}

fn determinism() -> Check {
    let runs: Vec<Vec<&str>> = vec![
        vec!["commute", "catalog:toda2()", "catalog:toda2_I2()", "--trunc-t", "12"],
        vec!["verify", "catalog:toda2() - 34/225", "catalog:toda2_I2() - 1/15", "--lambda", "1/3, 8/15"],
        vec!["solve", "th^2 - t", "--lambda", "0", "--trunc-t", "8"],
        vec!["family", "th*(th - 1 - z) - t", "--lambda", "0", "--lambda", "1 + z", "--trunc-t", "8"],
        vec!["module", "th1^2 + th2^2 - 5", "th1^2*th2^2 - 4"],
        vec!["split", "--symbol", "1, 0, 0, 0, 1", "--spec", "trig_bc(C1=1/2)"],
        vec!["exponents", "catalog:sl2_whittaker(lambda=1)", "--lambda", "2"],
    ];
    for args in &runs {
        let one = run_cli("1", args)?;
        let four = run_cli("4", args)?;
        let again = run_cli("4", args)?;
        ensure(one == four && four == again, format!("{:?} differs between thread counts", args))?;
    }
    Ok(format!("{} commands byte-identical under 1 and 4 threads", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("symbol calculus", symbol_calculus),
        ("necessity examples", necessity_examples),
        ("Frobenius oracle", oracle_equivalence),
        ("Whittaker exponents", whittaker_exponents),
        ("holonomic dimensions", holonomic_dimensions),
        ("log solutions", log_solutions),
        ("parameter family", parameter_family),
        ("induced equations", induced_equations),
        ("splitting", splitting),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(f) {
            Ok(Ok(detail)) => println!("criterion {:>2} PASS {}: {}", k + 1, name, detail),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {:>2} FAIL {}: {}", k + 1, name, why);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {:>2} FAIL {}: panicked", k + 1, name);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
