use serde::Serialize;
use serde_json::{json, Map, Value};

use regsing_core::coeffield::GaussRat;
use regsing_core::frobenius::{
    expected_solution_count, family_solve_and_normalize, solve_series, solve_with_logs, verify_induced, verify_residual,
    FamilyMember, LogSeriesSolution,
};
use regsing_core::holonomic::{find_exponent_candidates, module_dimension, stable_solutions, ConstCoeffModule};
use regsing_core::indicial::{indicial_matrix, resonance_set};
use regsing_core::integrable::{
    catalog_build, catalog_entries, integrability_verify, parse_catalog_call, potential_taylor, split_directions,
    splitting_membership, PotentialSpec,
};
use regsing_core::opalg::OpMatrix;
use regsing_core::parse::{parse_expression, parse_scalar, parse_scalar_list, ParseCtx};
use regsing_core::{Error, MultiIndex, Poly, Scalar};

use crate::{Cli, Cmd, Failure, Logs, Outcome};

type Res<T> = std::result::Result<T, Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn fields(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Parse operators against the catalog and embed them in common variables.
fn parse_ops(cli: &Cli, exprs: &[String]) -> Res<Vec<OpMatrix>> {
    let resolve = regsing_core::integrable::resolve;
    let ctx = ParseCtx::new(cli.trunc_t, cli.trunc_x).with_catalog(&resolve);
    let ops = exprs.iter().map(|e| parse_expression(e, &ctx)).collect::<regsing_core::Result<Vec<_>>>()?;
    let nt = ops.iter().map(|o| o.nt()).max().unwrap_or(0);
    let nx = ops.iter().map(|o| o.nx()).max().unwrap_or(0);
    Ok(ops.into_iter().map(|o| o.with_vars(nt, nx)).collect())
}

/// Split at top-level commas.
fn split_list(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in src.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

/// A polynomial in `x1..x_nx` written in the expression grammar.
fn parse_poly(src: &str, nx: usize, x_order: i64) -> Res<Poly> {
    let e = parse_expression(src, &ParseCtx::new(0, x_order).with_vars(0, nx))?;
    let bad = || Failure::Usage(format!("'{}' is not a polynomial in x1..x{}", src, nx));
    if e.m() != 1 || e.nt() != 0 || e.nx() != nx {
        return Err(bad());
    }
    let op = e.entry(0, 0);
    let key = (MultiIndex::zeros(0), MultiIndex::zeros(nx));
    if op.terms().keys().any(|k| *k != key) {
        return Err(bad());
    }
    Ok(op.coeff(&key.0, &key.1).coeff(&MultiIndex::zeros(0)))
}

fn parse_lambda(src: &str, nt: usize) -> Res<Vec<Scalar>> {
    let v = parse_scalar_list(src)?;
    if v.len() != nt {
        return Err(Failure::Usage(format!("exponent has {} entries, the operators have {} wall variables", v.len(), nt)));
    }
    Ok(v)
}

fn exprs_value(ops: &[OpMatrix]) -> Value {
    json!(ops.iter().map(|o| o.to_expr_string()).collect::<Vec<_>>())
}

pub fn run(cli: &Cli) -> Res<Outcome> {
    match &cli.cmd {
        Cmd::Symbol { expr } => symbol(cli, expr),
        Cmd::Commute { exprs } => commute(cli, exprs),
        Cmd::Exponents { exprs, lambda, bound, x0 } => exponents(cli, exprs, lambda.as_deref(), *bound, x0.as_deref()),
        Cmd::Solve { exprs, lambda, logs, seed } => solve(cli, exprs, lambda, *logs, seed.as_deref(), false),
        Cmd::Verify { exprs, lambda, logs, seed } => solve(cli, exprs, lambda, *logs, seed.as_deref(), true),
        Cmd::Family { expr, lambdas, seeds } => family(cli, expr, lambdas, seeds),
        Cmd::Split { symbol, potential, spec, point, degree } => {
            split(cli, symbol, potential.as_deref(), spec.as_deref(), point, *degree)
        }
        Cmd::Catalog { entry } => catalog(cli, entry.as_deref()),
        Cmd::Module { exprs, lambda, degree } => module(cli, exprs, lambda.as_deref(), *degree),
    }
}

fn symbol(cli: &Cli, expr: &str) -> Res<Outcome> {
    let ops = parse_ops(cli, std::slice::from_ref(&expr.to_string()))?;
    let p = &ops[0];
    let dstar = p.is_d_star();
    let order = p.order()?;
    let principal = p.sigma_principal()?.to_expr_string();
    let bar = p.sigma_bar_star().map(|s| s.to_expr_string()).ok();
    let f = fields(vec![
        ("input", json!(p.to_expr_string())),
        ("m", json!(p.m())),
        ("nt", json!(p.nt())),
        ("nx", json!(p.nx())),
        ("order", json!(order)),
        ("sigma", json!(principal)),
        ("sigma_star", json!(p.sigma_star().to_expr_string())),
        ("sigma_bar_star", json!(bar)),
        (
            "d_star",
            json!({
                "value": dstar.value,
                "witness": dstar.witness.map(|((r, c), a, b)| json!({ "row": r, "col": c, "theta": a, "dx": b })),
            }),
        ),
    ]);
    Ok(Outcome { fields: f, pass: true })
}

fn commute(cli: &Cli, exprs: &[String]) -> Res<Outcome> {
    let ops = parse_ops(cli, exprs)?;
    if ops.iter().any(|o| o.m() != ops[0].m()) {
        return Err(Failure::Usage("operators have different matrix sizes".into()));
    }
    let rep = integrability_verify(&ops[0], &ops[1..], cli.trunc_t)?;
    let mut residuals = Vec::new();
    for pr in &rep.pairs {
        for r in &pr.residuals {
            let mut v = to_value(r);
            v["i"] = json!(pr.i);
            v["j"] = json!(pr.j);
            residuals.push(v);
        }
    }
    let commutators: Vec<Value> = rep.pairs.iter().map(|p| json!({ "i": p.i, "j": p.j, "expression": p.expression })).collect();
    let f = fields(vec![
        ("inputs", exprs_value(&ops)),
        ("checked_to", json!(rep.checked_to)),
        ("residuals", json!(residuals)),
        ("commutators", json!(commutators)),
    ]);
    Ok(Outcome { fields: f, pass: rep.pass })
}

fn exponents(cli: &Cli, exprs: &[String], lambda: Option<&str>, bound: u32, x0: Option<&str>) -> Res<Outcome> {
    let ops = parse_ops(cli, exprs)?;
    let nt = ops[0].nt();
    let x0 = x0.map(parse_scalar_list).transpose()?;
    let lam = lambda.map(|l| parse_lambda(l, nt)).transpose()?;
    let lname = |i: usize| if nt == 1 { "l".to_string() } else { format!("l{}", i + 1) };
    let mut per_op = Vec::new();
    for p in &ops {
        let ind = indicial_matrix(p, x0.as_deref())?;
        let names = |i: usize| if i < nt { lname(i) } else { format!("x{}", i - nt + 1) };
        let mut v = json!({
            "indicial_matrix": ind.to_strings(),
            "det": ind.det()?.fmt_with(&names),
            "x_dependent": ind.x_dependent,
        });
        if let Some(l) = &lam {
            v["resonances"] = to_value(&resonance_set(&ind, l, bound)?);
        }
        per_op.push(v);
    }
    let candidates = ConstCoeffModule::from_indicial(&ops).and_then(|m| find_exponent_candidates(&m));
    let mut f = fields(vec![("inputs", exprs_value(&ops)), ("operators", json!(per_op)), ("bound", json!(bound))]);
    match candidates {
        Ok(c) => {
            f.insert("exponents".into(), to_value(&c));
        }
        Err(e) => {
            f.insert("exponents".into(), Value::Null);
            f.insert("exponents_note".into(), json!(e.to_string()));
        }
    }
    if let Some(l) = &lam {
        f.insert("lambda".into(), to_value(l));
    }
    Ok(Outcome { fields: f, pass: true })
}

fn build_solutions(cli: &Cli, ops: &[OpMatrix], lam: &[Scalar], logs: Logs, seed: Option<&str>) -> Res<(Vec<LogSeriesSolution>, Map<String, Value>)> {
    let (t, x) = (cli.trunc_t, cli.trunc_x);
    let p = &ops[0];
    let mut meta = Map::new();
    if let Some(s) = seed {
        let parts = split_list(s);
        if parts.len() != p.m() {
            return Err(Failure::Usage(format!("seed has {} components, the operator has {}", parts.len(), p.m())));
        }
        let seed = parts.iter().map(|q| parse_poly(q, p.nx(), x)).collect::<Res<Vec<_>>>()?;
        meta.insert("driver".into(), json!(0));
        return Ok((vec![solve_series(p, lam, &seed, t, x)?], meta));
    }
    let module = ConstCoeffModule::from_indicial(ops)?;
    let (mut basis, k) = stable_solutions(&module, lam, 2)?;
    if logs == Logs::Off {
        basis.retain(|b| b.degree() == 0);
    }
    if basis.is_empty() {
        return Err(Failure::Math(Error::Domain("the exponent admits no leading term".into())));
    }
    meta.insert("leading_terms".into(), json!(basis.iter().map(|b| b.poly_strings()).collect::<Vec<_>>()));
    meta.insert("degree_bound".into(), json!(k));
    meta.insert("expected_solution_count".into(), json!(expected_solution_count(ops)?));
    let rep = solve_with_logs(ops, lam, &basis, t, x)?;
    meta.insert("driver".into(), json!(rep.driver));
    Ok((rep.solutions, meta))
}

fn solve(cli: &Cli, exprs: &[String], lambda: &str, logs: Logs, seed: Option<&str>, verify: bool) -> Res<Outcome> {
    let ops = parse_ops(cli, exprs)?;
    let lam = parse_lambda(lambda, ops[0].nt())?;
    let (sols, meta) = build_solutions(cli, &ops, &lam, logs, seed)?;
    let mut f = fields(vec![
        ("inputs", exprs_value(&ops)),
        ("lambda", to_value(&lam)),
        ("logs", json!(if logs == Logs::Auto { "auto" } else { "off" })),
        ("solutions", to_value(&sols)),
    ]);
    f.extend(meta);
    if !verify {
        return Ok(Outcome { fields: f, pass: true });
    }
    let reports = sols.iter().map(|u| verify_induced(&ops, u, cli.trunc_t)).collect::<regsing_core::Result<Vec<_>>>()?;
    let pass = reports.iter().all(|r| r.pass);
    f.insert("verification".into(), to_value(&reports));
    Ok(Outcome { fields: f, pass })
}

fn family(cli: &Cli, expr: &str, lambdas: &[String], seeds: &[String]) -> Res<Outcome> {
    let ops = parse_ops(cli, std::slice::from_ref(&expr.to_string()))?;
    let p = &ops[0];
    if !seeds.is_empty() && seeds.len() != lambdas.len() {
        return Err(Failure::Usage("give one --seed per --lambda, or none".into()));
    }
    let mut members = Vec::new();
    for (k, l) in lambdas.iter().enumerate() {
        let seed = match seeds.get(k) {
            Some(s) => parse_scalar_list(s)?,
            None => vec![Scalar::one(); p.m()],
        };
        members.push(FamilyMember { lambda: parse_scalar(l)?, seed });
    }
    let fam = family_solve_and_normalize(p, &members, cli.trunc_t, cli.trunc_x, Some(cli.z_order))?;
    let p0 = p.specialize_z(&GaussRat::zero())?;
    let checks = fam.limits.iter().map(|w| verify_residual(&p0, w, cli.trunc_t)).collect::<regsing_core::Result<Vec<_>>>()?;
    let pass = checks.iter().all(|c| c.pass);
    let f = fields(vec![
        ("inputs", exprs_value(&ops)),
        ("family", to_value(&fam)),
        ("limit_residuals", to_value(&checks)),
    ]);
    Ok(Outcome { fields: f, pass })
}

fn split(cli: &Cli, symbol: &str, potential: Option<&str>, spec: Option<&str>, point: &str, degree: u32) -> Res<Outcome> {
    let c = parse_scalar_list(symbol)?;
    let dirs = split_directions(&c)?;
    let mut f = fields(vec![("symbol", to_value(&c)), ("directions", to_value(&dirs)), ("degree", json!(degree))]);
    let r = match (potential, spec) {
        (Some(text), _) => Some(parse_poly(text, 2, cli.trunc_x.max(degree as i64))?),
        (None, Some(text)) => {
            let spec = PotentialSpec::parse(text)?;
            let pt = parse_scalar_list(point)?;
            f.insert("point".into(), to_value(&pt));
            Some(potential_taylor(&spec, &pt, degree)?)
        }
        (None, None) => None,
    };
    let Some(r) = r else { return Ok(Outcome { fields: f, pass: dirs.unsolved.is_none() }) };
    if r.nvars() != 2 {
        return Err(Failure::Usage("the splitting test needs a potential in two variables".into()));
    }
    f.insert("potential".into(), json!(r.truncate(degree as i64).fmt_with(&|i| format!("x{}", i + 1))));
    let rep = splitting_membership(&[r], &dirs.directions, degree)?;
    let pass = rep.pass && dirs.unsolved.is_none();
    f.insert("membership".into(), to_value(&rep));
    Ok(Outcome { fields: f, pass })
}

fn catalog(cli: &Cli, entry: Option<&str>) -> Res<Outcome> {
    let Some(text) = entry else {
        return Ok(Outcome { fields: fields(vec![("entries", to_value(&catalog_entries()))]), pass: true });
    };
    let (name, args) = parse_catalog_call(text)?;
    let built = catalog_build(&name, &args, cli.trunc_t, cli.trunc_x)?;
    let op = &built.operator;
    let f = fields(vec![
        ("name", json!(name)),
        ("operator", json!(op.to_expr_string())),
        ("dictionary", json!(built.dictionary)),
        ("nt", json!(op.nt())),
        ("nx", json!(op.nx())),
        ("sigma_star", json!(op.sigma_star().to_expr_string())),
        ("d_star", json!(op.is_d_star().value)),
    ]);
    Ok(Outcome { fields: f, pass: true })
}

fn module(cli: &Cli, exprs: &[String], lambda: Option<&str>, degree: u32) -> Res<Outcome> {
    let ops = parse_ops(cli, exprs)?;
    let module = ConstCoeffModule::from_indicial(&ops)?;
    let cand = find_exponent_candidates(&module)?;
    let mut f = fields(vec![("inputs", exprs_value(&ops)), ("candidates", to_value(&cand))]);
    let mut pass = cand.complete;
    if cand.complete {
        let dim = module_dimension(&module, &cand.candidates, degree)?;
        f.insert("dimension".into(), to_value(&dim));
    }
    if let Some(l) = lambda {
        let lam = parse_lambda(l, module.n)?;
        let (basis, k) = stable_solutions(&module, &lam, degree)?;
        f.insert("lambda".into(), to_value(&lam));
        f.insert("basis".into(), json!(basis.iter().map(|b| b.poly_strings()).collect::<Vec<_>>()));
        f.insert("basis_degree_bound".into(), json!(k));
        pass = true;
    }
    Ok(Outcome { fields: f, pass })
}
