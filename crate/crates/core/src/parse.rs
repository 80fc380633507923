//! Parser for the operator expression language.
//!
//! See `docs/grammar.md` for the grammar. Expressions evaluate directly to
//! canonical [`OpMatrix`] values; a scalar expression is a `1 × 1` matrix.

use crate::coeffield::Scalar;
use crate::error::{Error, Result};
use crate::opalg::{OpMatrix, RegOperator};
use crate::series::TruncSeries;

/// Argument of a `catalog:name(...)` call.
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogArg {
    Scalar(Scalar),
    Ident(String),
}

/// Named or positional catalog argument.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedArg {
    pub name: Option<String>,
    pub value: CatalogArg,
}

pub type CatalogFn<'a> = &'a dyn Fn(&str, &[NamedArg], u32, i64) -> Result<OpMatrix>;

/// Evaluation context.
#[derive(Clone, Copy)]
pub struct ParseCtx<'a> {
    pub t_order: u32,
    pub x_order: i64,
    /// Minimum variable counts; the text may raise them.
    pub nt: usize,
    pub nx: usize,
    pub catalog: Option<CatalogFn<'a>>,
}

impl<'a> ParseCtx<'a> {
    pub fn new(t_order: u32, x_order: i64) -> Self {
        ParseCtx { t_order, x_order, nt: 0, nx: 0, catalog: None }
    }

    pub fn with_catalog(mut self, f: CatalogFn<'a>) -> Self {
        self.catalog = Some(f);
        self
    }

    pub fn with_vars(mut self, nt: usize, nx: usize) -> Self {
        self.nt = nt;
        self.nx = nx;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(num_bigint::BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, ch) = chars[k];
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().map(|c| c.1).collect();
            out.push(Token { tok: Tok::Int(s.parse().unwrap()), pos });
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_ascii_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            let s: String = chars[start..k].iter().map(|c| c.1).collect();
            out.push(Token { tok: Tok::Ident(s), pos });
        } else if "+-*/^()[],=:".contains(ch) {
            out.push(Token { tok: Tok::Sym(ch), pos });
            k += 1;
        } else {
            return Err(err_at(src, pos, format!("unexpected character '{}'", ch)));
        }
    }
    out.push(Token { tok: Tok::End, pos: src.len() });
    Ok(out)
}

fn err_at(src: &str, pos: usize, msg: String) -> Error {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Error::Parse { line, col, msg }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Var {
    T(usize),
    X(usize),
    Theta(usize),
    Dx(usize),
}

fn indexed(s: &str, prefix: &str) -> Option<usize> {
    let rest = s.strip_prefix(prefix)?;
    if rest.is_empty() {
        return Some(0);
    }
    if !rest.chars().all(|c| c.is_ascii_digit()) || rest.starts_with('0') {
        return None;
    }
    rest.parse::<usize>().ok().map(|k| k - 1)
}

/// Classify an identifier as a variable. `xi<k>` is accepted as `th<k>`.
fn classify(s: &str) -> Option<Var> {
    if let Some(k) = indexed(s, "th").or_else(|| indexed(s, "xi")) {
        return Some(Var::Theta(k));
    }
    if let Some(k) = indexed(s, "Dx") {
        return Some(Var::Dx(k));
    }
    if let Some(k) = indexed(s, "t") {
        return Some(Var::T(k));
    }
    indexed(s, "x").map(Var::X)
}

struct Parser<'s, 'c> {
    src: &'s str,
    toks: Vec<Token>,
    k: usize,
    ctx: ParseCtx<'c>,
    nt: usize,
    nx: usize,
}

impl<'s, 'c> Parser<'s, 'c> {
    fn peek(&self) -> &Tok {
        &self.toks[self.k].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.k].pos
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        err_at(self.src, self.pos(), msg.into())
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.k += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c)))
        }
    }

    fn constant(&self, c: Scalar) -> OpMatrix {
        OpMatrix::scalar(RegOperator::constant(self.nt, self.nx, self.ctx.t_order, self.ctx.x_order, c))
    }

    fn unify(&mut self, a: OpMatrix, b: OpMatrix) -> (OpMatrix, OpMatrix) {
        let nt = a.nt().max(b.nt());
        let nx = a.nx().max(b.nx());
        (a.with_vars(nt, nx), b.with_vars(nt, nx))
    }

    fn expr(&mut self) -> Result<OpMatrix> {
        let mut acc = self.term()?;
        loop {
            let pos = self.pos();
            let sign = if self.eat('+') {
                1
            } else if self.eat('-') {
                -1
            } else {
                return Ok(acc);
            };
            let rhs = self.term()?;
            let (a, b) = self.unify(acc, rhs);
            if a.m() != b.m() {
                return Err(err_at(self.src, pos, format!("cannot add {}x{} and {}x{} matrices", a.m(), a.m(), b.m(), b.m())));
            }
            acc = if sign > 0 { a.add(&b) } else { a.sub(&b) };
        }
    }

    fn term(&mut self) -> Result<OpMatrix> {
        let mut acc = self.unary()?;
        loop {
            let pos = self.pos();
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = self.product(acc, rhs).map_err(|e| relocate(e, self.src, pos))?;
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = self.quotient(acc, rhs).map_err(|e| relocate(e, self.src, pos))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self, a: OpMatrix, b: OpMatrix) -> Result<OpMatrix> {
        let (a, b) = self.unify(a, b);
        if a.m() == b.m() {
            return a.try_mul(&b);
        }
        if a.m() == 1 {
            let p = a.entry(0, 0);
            let entries = b.entries().iter().map(|e| p.try_mul(e)).collect::<Result<Vec<_>>>()?;
            return OpMatrix::new(b.m(), entries);
        }
        if b.m() == 1 {
            let q = b.entry(0, 0);
            let entries = a.entries().iter().map(|e| e.try_mul(q)).collect::<Result<Vec<_>>>()?;
            return OpMatrix::new(a.m(), entries);
        }
        Err(Error::SizeMismatch(format!("{}x{} times {}x{}", a.m(), a.m(), b.m(), b.m())))
    }

    fn quotient(&mut self, a: OpMatrix, b: OpMatrix) -> Result<OpMatrix> {
        let (a, b) = self.unify(a, b);
        if b.m() != 1 {
            return Err(Error::Domain("division by a matrix".into()));
        }
        let d = b.entry(0, 0);
        let zero_key = (crate::poly::MultiIndex::zeros(d.nt()), crate::poly::MultiIndex::zeros(d.nx()));
        if d.terms().keys().any(|k| *k != zero_key) {
            return Err(Error::Domain("divisor must not contain th or Dx".into()));
        }
        let s = d.coeff(&zero_key.0, &zero_key.1);
        if s.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let flat = s.flat_terms();
        if flat.len() == 1 && flat[0].0.is_zero() && flat[0].1.is_zero() {
            let inv = flat[0].2.inv()?;
            return Ok(a.scale(&inv));
        }
        let inv = RegOperator::from_series(&s.inverse()?);
        let inv = OpMatrix::scalar(inv);
        self.product(a, inv)
    }

    fn unary(&mut self) -> Result<OpMatrix> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<OpMatrix> {
        let base = self.atom()?;
        if self.eat('^') {
            let Tok::Int(n) = self.peek().clone() else {
                return Err(self.err("exponent must be a non-negative integer"));
            };
            let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
            self.k += 1;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<OpMatrix> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.k += 1;
                Ok(self.constant(Scalar::from_gauss(crate::coeffield::GaussRat::from_bigint(n))))
            }
            Tok::Sym('(') => {
                self.k += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('[') => self.matrix(),
            Tok::Ident(s) => {
                self.k += 1;
                match s.as_str() {
                    "i" => return Ok(self.constant(Scalar::i())),
                    "z" => return Ok(self.constant(Scalar::z())),
                    "catalog" => return self.catalog_call(pos),
                    _ => {}
                }
                if s == "Dt" || s.starts_with("Dt") && classify(&s[1..]).is_some() {
                    return Err(err_at(self.src, pos, format!("'{}' is not available: write t-derivatives with th<k> = t<k>*d/dt<k>", s)));
                }
                let (t, x) = (self.ctx.t_order, self.ctx.x_order);
                let (nt, nx) = (self.nt, self.nx);
                let op = match classify(&s) {
                    Some(Var::T(k)) => RegOperator::from_series(&TruncSeries::t_var(nt, nx, t, x, k)),
                    Some(Var::X(k)) => RegOperator::from_series(&TruncSeries::x_var(nt, nx, t, x, k)),
                    Some(Var::Theta(k)) => RegOperator::theta(nt, nx, t, x, k),
                    Some(Var::Dx(k)) => RegOperator::dx(nt, nx, t, x, k),
                    None => return Err(err_at(self.src, pos, format!("unknown identifier '{}'", s))),
                };
                Ok(OpMatrix::scalar(op))
            }
            Tok::End => Err(self.err("unexpected end of input")),
            Tok::Sym(c) => Err(self.err(format!("unexpected '{}'", c))),
        }
    }

    fn matrix(&mut self) -> Result<OpMatrix> {
        let start = self.pos();
        self.expect('[')?;
        let mut rows: Vec<Vec<OpMatrix>> = Vec::new();
        loop {
            self.expect('[')?;
            let mut row = vec![self.expr()?];
            while self.eat(',') {
                row.push(self.expr()?);
            }
            self.expect(']')?;
            rows.push(row);
            if !self.eat(',') {
                break;
            }
        }
        self.expect(']')?;
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(err_at(self.src, start, "matrix must be square".into()));
        }
        let mut entries = Vec::with_capacity(m * m);
        for e in rows.into_iter().flatten() {
            if e.m() != 1 {
                return Err(err_at(self.src, start, "matrix entries must be scalar operators".into()));
            }
            entries.push(e.entry(0, 0).clone());
        }
        let nt = entries.iter().map(|e| e.nt()).max().unwrap();
        let nx = entries.iter().map(|e| e.nx()).max().unwrap();
        let entries = entries.into_iter().map(|e| e.with_vars(nt, nx)).collect();
        OpMatrix::new(m, entries)
    }

    fn catalog_call(&mut self, pos: usize) -> Result<OpMatrix> {
        self.expect(':')?;
        let Tok::Ident(name) = self.peek().clone() else {
            return Err(self.err("expected catalog entry name"));
        };
        self.k += 1;
        self.expect('(')?;
        let mut args = Vec::new();
        if !self.eat(')') {
            loop {
                let mut name_opt = None;
                if let Tok::Ident(s) = self.peek().clone() {
                    if self.toks[self.k + 1].tok == Tok::Sym('=') {
                        name_opt = Some(s);
                        self.k += 2;
                    }
                }
                let value = match self.peek().clone() {
                    Tok::Ident(s) if classify(&s).is_none() && s != "i" && s != "z" && s != "catalog" => {
                        self.k += 1;
                        CatalogArg::Ident(s)
                    }
                    _ => {
                        let vpos = self.pos();
                        let e = self.expr()?;
                        CatalogArg::Scalar(as_scalar(&e).ok_or_else(|| err_at(self.src, vpos, "catalog arguments must be scalars".into()))?)
                    }
                };
                args.push(NamedArg { name: name_opt, value });
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        let Some(cat) = self.ctx.catalog else {
            return Err(err_at(self.src, pos, "catalog calls are not available in this context".into()));
        };
        cat(&name, &args, self.ctx.t_order, self.ctx.x_order).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => err_at(self.src, pos, format!("catalog:{}: {}", name, other)),
        })
    }
}

fn relocate(e: Error, src: &str, pos: usize) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => err_at(src, pos, other.to_string()),
    }
}

/// The scalar value of a constant `1 × 1` expression.
pub fn as_scalar(e: &OpMatrix) -> Option<Scalar> {
    if e.m() != 1 {
        return None;
    }
    let op = e.entry(0, 0);
    if op.is_zero() {
        return Some(Scalar::zero());
    }
    if op.terms().len() != 1 {
        return None;
    }
    let ((a, b), s) = op.terms().iter().next().unwrap();
    if !a.is_zero() || !b.is_zero() {
        return None;
    }
    let flat = s.flat_terms();
    (flat.len() == 1 && flat[0].0.is_zero() && flat[0].1.is_zero()).then(|| flat[0].2.clone())
}

fn prescan(toks: &[Token]) -> (usize, usize) {
    let (mut nt, mut nx) = (0, 0);
    for t in toks {
        if let Tok::Ident(s) = &t.tok {
            match classify(s) {
                Some(Var::T(k)) | Some(Var::Theta(k)) => nt = nt.max(k + 1),
                Some(Var::X(k)) | Some(Var::Dx(k)) => nx = nx.max(k + 1),
                None => {}
            }
        }
    }
    (nt, nx)
}

/// Parse and evaluate an operator (or operator matrix) expression.
pub fn parse_expression(src: &str, ctx: &ParseCtx) -> Result<OpMatrix> {
    let toks = tokenize(src)?;
    let (nt, nx) = prescan(&toks);
    let mut p = Parser { src, toks, k: 0, ctx: *ctx, nt: nt.max(ctx.nt), nx: nx.max(ctx.nx) };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    let (nt, nx) = (e.nt().max(p.nt), e.nx().max(p.nx));
    Ok(e.with_vars(nt, nx))
}

/// Parse a scalar such as `3/2 - i`, `1 + z`, or `(z^2 - 1)/(z - 1)`.
pub fn parse_scalar(src: &str) -> Result<Scalar> {
    let e = parse_expression(src, &ParseCtx::new(0, 0))?;
    as_scalar(&e).ok_or_else(|| Error::Parse { line: 1, col: 1, msg: format!("'{}' is not a scalar", src) })
}

/// Parse a comma-separated list of scalars (an exponent vector).
pub fn parse_scalar_list(src: &str) -> Result<Vec<Scalar>> {
    let src = src.trim();
    let inner = src.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(src);
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top_level(inner).iter().map(|s| parse_scalar(s)).collect()
}

fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
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
    out.push(cur);
    out
}
