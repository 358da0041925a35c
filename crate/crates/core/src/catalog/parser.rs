use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::algebra::{Algebra, Element, EndoMatrix, Meta};
use crate::morphisms::{Constraint, MorphismFamily};
use crate::scalars::{GaussRational, ParameterRing, Rational, Scalar};

use super::lexer::{tokenize, Tok, Token};
use super::{CatalogDocument, ParseError};

const MAX_DIM: usize = 8;
const MAX_DEPTH: usize = 64;
const MAX_EXPONENT: i64 = 64;

/// Parses a whole `.hnov` document.
pub fn parse_catalog(text: &str) -> Result<CatalogDocument, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, depth: 0 };
    p.file()
}

/// Parses a scalar expression over `ring`.
pub fn parse_scalar(ring: &Arc<ParameterRing>, text: &str) -> Result<Scalar, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, depth: 0 };
    let v = p.scalar(&Ctx { ring: ring.clone(), dim: None })?;
    p.expect_eof()?;
    Ok(v)
}

/// Whether `name` is a basis identifier, returning its 1-based index.
fn basis_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('e')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(digits.parse().unwrap_or(usize::MAX))
}

#[derive(Clone)]
struct Ctx {
    ring: Arc<ParameterRing>,
    /// Basis elements are allowed only when the dimension is known.
    dim: Option<usize>,
}

#[derive(Clone, Debug)]
enum Value {
    S(Scalar),
    V(Element),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

/// Options shared by algebras and morphisms.
struct Opts {
    params: Vec<String>,
    ring: Arc<ParameterRing>,
    require: Vec<Constraint>,
    forbid: Vec<(Scalar, Scalar)>,
    meta: Meta,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(t: &Token, msg: &str, expected: &[&str]) -> ParseError {
        ParseError::new(t.line, t.col, msg, expected)
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        Self::err_at(t, &format!("unexpected {}", t.tok), expected)
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect_sym(&mut self, c: char) -> Result<Token, ParseError> {
        if self.is_sym(c) {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&[&format!("`{c}`")]))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Token, ParseError> {
        if self.is_kw(kw) {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&[&format!("`{kw}`")]))
        }
    }

    fn expect_name(&mut self) -> Result<(String, Token), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.advance()))
            }
            _ => Err(self.unexpected(&["name"])),
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected(&["end of input"])),
        }
    }

    fn optional_eq(&mut self) {
        if self.is_sym('=') {
            self.advance();
        }
    }

    fn file(&mut self) -> Result<CatalogDocument, ParseError> {
        let mut doc = CatalogDocument::default();
        loop {
            if matches!(self.peek().tok, Tok::Eof) {
                return Ok(doc);
            }
            if self.is_kw("algebra") {
                let a = self.algebra(&doc)?;
                doc.algebras.push(a);
            } else if self.is_kw("morphism") {
                let f = self.morphism(&doc)?;
                doc.families.push(f);
            } else {
                return Err(self.unexpected(&["`algebra`", "`morphism`"]));
            }
        }
    }

    fn check_unique(&self, doc: &CatalogDocument, name: &str, at: &Token) -> Result<(), ParseError> {
        if doc.algebras.iter().any(|a| a.name == name) || doc.families.iter().any(|f| f.name == name) {
            return Err(Self::err_at(at, &format!("duplicate name `{name}`"), &[]));
        }
        if basis_index(name).is_some() || name == "i" {
            return Err(Self::err_at(at, &format!("`{name}` is reserved"), &[]));
        }
        Ok(())
    }

    fn string(&mut self) -> Result<String, ParseError> {
        self.optional_eq();
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(&["string"])),
        }
    }

    fn opts(&mut self, base: &Arc<ParameterRing>) -> Result<Opts, ParseError> {
        let mut o = Opts { params: Vec::new(), ring: base.clone(), require: Vec::new(), forbid: Vec::new(), meta: Meta::default() };
        let mut roots: Vec<(String, Scalar)> = Vec::new();
        let mut seen_params = false;
        let mut seen_roots = false;
        let mut used = false;
        loop {
            let Tok::Ident(kw) = &self.peek().tok else { return Ok(o) };
            let kw = kw.clone();
            let at = self.peek().clone();
            match kw.as_str() {
                "params" => {
                    if seen_params || seen_roots || used {
                        return Err(Self::err_at(&at, "`params` must come first and only once", &[]));
                    }
                    self.advance();
                    self.optional_eq();
                    self.expect_sym('(')?;
                    let mut names = Vec::new();
                    if !self.is_sym(')') {
                        loop {
                            let (n, _) = self.expect_name()?;
                            names.push(n);
                            if !self.is_sym(',') {
                                break;
                            }
                            self.advance();
                        }
                    }
                    self.expect_sym(')')?;
                    o.ring = base.extend(&names, &[]).map_err(|e| Self::err_at(&at, &e.to_string(), &[]))?;
                    o.params = names;
                    seen_params = true;
                }
                "roots" => {
                    if seen_roots || used {
                        return Err(Self::err_at(&at, "`roots` must precede constraints and appear once", &[]));
                    }
                    self.advance();
                    self.optional_eq();
                    self.expect_sym('(')?;
                    let target_ctx = Ctx { ring: o.ring.params_ring(), dim: None };
                    loop {
                        let (n, _) = self.expect_name()?;
                        self.expect_sym('^')?;
                        match &self.peek().tok {
                            Tok::Int(k) if *k == BigInt::from(2) => {
                                self.advance();
                            }
                            _ => return Err(self.unexpected(&["`2`"])),
                        }
                        self.expect_sym('=')?;
                        let target = self.scalar(&target_ctx)?;
                        roots.push((n, target));
                        if !self.is_sym(',') {
                            break;
                        }
                        self.advance();
                    }
                    self.expect_sym(')')?;
                    o.ring = base.extend(&o.params, &roots).map_err(|e| Self::err_at(&at, &e.to_string(), &[]))?;
                    seen_roots = true;
                }
                "require" => {
                    self.advance();
                    self.optional_eq();
                    self.expect_sym('(')?;
                    let ctx = Ctx { ring: o.ring.clone(), dim: None };
                    loop {
                        o.require.push(self.constraint(&ctx)?);
                        if !self.is_sym(',') {
                            break;
                        }
                        self.advance();
                    }
                    self.expect_sym(')')?;
                    used = true;
                }
                "forbid" => {
                    self.advance();
                    self.optional_eq();
                    self.expect_sym('(')?;
                    let ctx = Ctx { ring: o.ring.clone(), dim: None };
                    loop {
                        let l = self.scalar(&ctx)?;
                        self.expect_sym('=')?;
                        let r = self.scalar(&ctx)?;
                        o.forbid.push((l, r));
                        if !self.is_sym(',') {
                            break;
                        }
                        self.advance();
                    }
                    self.expect_sym(')')?;
                    used = true;
                }
                "label" => {
                    self.advance();
                    if o.meta.label.is_some() {
                        return Err(Self::err_at(&at, "duplicate `label`", &[]));
                    }
                    o.meta.label = Some(self.string()?);
                }
                "note" => {
                    self.advance();
                    let s = self.string()?;
                    o.meta.notes.push(s);
                }
                "skip" => {
                    self.advance();
                    if o.meta.skip.is_some() {
                        return Err(Self::err_at(&at, "duplicate `skip`", &[]));
                    }
                    o.meta.skip = Some(self.string()?);
                }
                _ => return Ok(o),
            }
        }
    }

    fn constraint(&mut self, ctx: &Ctx) -> Result<Constraint, ParseError> {
        if let (Tok::Ident(name), Tok::Ident(kw)) = (self.peek_at(0).clone(), self.peek_at(1).clone()) {
            if kw == "in" {
                let at = self.advance();
                if ctx.ring.symbol_index(&name).is_none_or(|idx| ctx.ring.is_root_index(idx)) {
                    return Err(Self::err_at(&at, &format!("`{name}` is not a declared parameter"), &[]));
                }
                self.advance();
                self.expect_sym('{')?;
                let mut values = Vec::new();
                loop {
                    values.push(self.scalar(ctx)?);
                    if !self.is_sym(',') {
                        break;
                    }
                    self.advance();
                }
                self.expect_sym('}')?;
                return Ok(Constraint::Membership { symbol: name, values });
            }
        }
        let l = self.scalar(ctx)?;
        self.expect_sym('=')?;
        let r = self.scalar(ctx)?;
        Ok(Constraint::Equation(&l - &r))
    }

    fn dim(&mut self) -> Result<usize, ParseError> {
        self.expect_kw("dim")?;
        self.optional_eq();
        let at = self.peek().clone();
        match &at.tok {
            Tok::Int(n) => {
                let n = n.to_usize().filter(|&d| (1..=MAX_DIM).contains(&d));
                self.advance();
                n.ok_or_else(|| Self::err_at(&at, &format!("dimension must be between 1 and {MAX_DIM}"), &[]))
            }
            _ => Err(self.unexpected(&["dimension"])),
        }
    }

    fn algebra(&mut self, doc: &CatalogDocument) -> Result<Algebra, ParseError> {
        self.expect_kw("algebra")?;
        let (name, at) = self.expect_name()?;
        self.check_unique(doc, &name, &at)?;
        let dim = self.dim()?;
        let o = self.opts(&ParameterRing::empty())?;
        let mut a = Algebra::zero(&name, dim, &o.ring);
        a.requires = o.require;
        a.inequations = o.forbid;
        a.meta = o.meta;
        let ctx = Ctx { ring: o.ring, dim: Some(dim) };
        self.expect_sym('{')?;
        let mut seen = vec![false; dim * dim];
        while !self.is_sym('}') {
            let (i, j, v, at) = self.product(&ctx)?;
            if std::mem::replace(&mut seen[i * dim + j], true) {
                return Err(Self::err_at(&at, &format!("duplicate product e{}*e{}", i + 1, j + 1), &[]));
            }
            a.set_product(i, j, &v).map_err(|e| Self::err_at(&at, &e.to_string(), &[]))?;
        }
        self.expect_sym('}')?;
        Ok(a)
    }

    /// `e_i * e_j = linexpr ;`
    fn product(&mut self, ctx: &Ctx) -> Result<(usize, usize, Element, Token), ParseError> {
        let at = self.peek().clone();
        let i = self.basis(ctx)?;
        self.expect_sym('*')?;
        let j = self.basis(ctx)?;
        self.expect_sym('=')?;
        let v = self.element(ctx)?;
        self.expect_sym(';')?;
        Ok((i, j, v, at))
    }

    /// A basis identifier, returned 0-based.
    fn basis(&mut self, ctx: &Ctx) -> Result<usize, ParseError> {
        let dim = ctx.dim.unwrap_or(0);
        let at = self.peek().clone();
        if let Tok::Ident(s) = &at.tok {
            if let Some(k) = basis_index(s) {
                self.advance();
                if k == 0 || k > dim {
                    return Err(Self::err_at(&at, &format!("basis index {k} exceeds dim {dim}"), &[]));
                }
                return Ok(k - 1);
            }
        }
        Err(self.unexpected(&["basis element"]))
    }

    fn morphism(&mut self, doc: &CatalogDocument) -> Result<MorphismFamily, ParseError> {
        self.expect_kw("morphism")?;
        let (name, at) = self.expect_name()?;
        self.check_unique(doc, &name, &at)?;
        self.expect_kw("on")?;
        let (alg_name, alg_at) = self.expect_name()?;
        let alg = doc
            .algebra(&alg_name)
            .ok_or_else(|| Self::err_at(&alg_at, &format!("unknown algebra `{alg_name}`"), &[]))?;
        let dim = alg.dim();
        let o = self.opts(alg.ring())?;
        let ctx = Ctx { ring: o.ring.clone(), dim: Some(dim) };
        let mut constraints = o.require;
        constraints.extend(o.forbid.into_iter().map(|(lhs, rhs)| Constraint::Inequation { lhs, rhs }));
        let mut matrix = EndoMatrix::zero(&o.ring, dim);
        let mut seen = vec![false; dim];
        self.expect_sym('{')?;
        while !self.is_sym('}') {
            let at = self.expect_kw("alpha")?;
            self.expect_sym('(')?;
            let j = self.basis(&ctx)?;
            self.expect_sym(')')?;
            self.expect_sym('=')?;
            let v = self.element(&ctx)?;
            self.expect_sym(';')?;
            if std::mem::replace(&mut seen[j], true) {
                return Err(Self::err_at(&at, &format!("duplicate alpha(e{})", j + 1), &[]));
            }
            for k in 0..dim {
                matrix.set(k, j, v.coords[k].clone());
            }
        }
        self.expect_sym('}')?;
        let mut expected = None;
        if self.is_kw("expect") {
            self.advance();
            self.expect_sym('{')?;
            let mut table = vec![Element::zero(&o.ring, dim); dim * dim];
            let mut seen = vec![false; dim * dim];
            while !self.is_sym('}') {
                let (i, j, v, at) = self.product(&ctx)?;
                if std::mem::replace(&mut seen[i * dim + j], true) {
                    return Err(Self::err_at(&at, &format!("duplicate product e{}*e{}", i + 1, j + 1), &[]));
                }
                table[i * dim + j] = v;
            }
            self.expect_sym('}')?;
            expected = Some(table);
        }
        Ok(MorphismFamily {
            name,
            algebra: alg_name,
            params: o.params,
            ring: o.ring,
            matrix,
            constraints,
            expected,
            meta: o.meta,
        })
    }

    fn scalar(&mut self, ctx: &Ctx) -> Result<Scalar, ParseError> {
        let at = self.peek().clone();
        match self.expr(ctx)? {
            Value::S(s) => Ok(s),
            Value::V(_) => Err(Self::err_at(&at, "expected a scalar, found a basis term", &[])),
        }
    }

    fn element(&mut self, ctx: &Ctx) -> Result<Element, ParseError> {
        let at = self.peek().clone();
        match self.expr(ctx)? {
            Value::V(v) => Ok(v),
            Value::S(s) if s.is_zero() => Ok(Element::zero(&ctx.ring, ctx.dim.unwrap_or(0))),
            Value::S(_) => Err(Self::err_at(&at, "expected a linear combination of basis elements", &[])),
        }
    }

    fn expr(&mut self, ctx: &Ctx) -> Result<Value, ParseError> {
        let mut acc = self.term(ctx)?;
        loop {
            let at = self.peek().clone();
            let minus = match at.tok {
                Tok::Sym('+') => false,
                Tok::Sym('-') => true,
                _ => return Ok(acc),
            };
            self.advance();
            let rhs = self.term(ctx)?;
            let rhs = if minus { negate(rhs) } else { rhs };
            acc = match (acc, rhs) {
                (Value::S(a), Value::S(b)) => Value::S(&a + &b),
                (Value::V(a), Value::V(b)) => Value::V(a.try_add(&b).map_err(|e| Self::err_at(&at, &e.to_string(), &[]))?),
                (Value::S(a), Value::V(b)) | (Value::V(b), Value::S(a)) if a.is_zero() => Value::V(b),
                _ => return Err(Self::err_at(&at, "cannot add a scalar to a basis term", &[])),
            };
        }
    }

    fn juxtaposed_basis(&self) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if basis_index(s).is_some())
    }

    fn term(&mut self, ctx: &Ctx) -> Result<Value, ParseError> {
        let mut acc = self.unary(ctx)?;
        loop {
            let at = self.peek().clone();
            if self.is_sym('*') || (matches!(acc, Value::S(_)) && self.juxtaposed_basis()) {
                if self.is_sym('*') {
                    self.advance();
                }
                let rhs = self.unary(ctx)?;
                acc = match (acc, rhs) {
                    (Value::S(a), Value::S(b)) => Value::S(&a * &b),
                    (Value::S(a), Value::V(v)) | (Value::V(v), Value::S(a)) => {
                        Value::V(v.scale(&a).map_err(|e| Self::err_at(&at, &e.to_string(), &[]))?)
                    }
                    (Value::V(_), Value::V(_)) => {
                        return Err(Self::err_at(&at, "product of two basis terms is not linear", &[]))
                    }
                };
            } else if self.is_sym('/') {
                self.advance();
                let rhs_at = self.peek().clone();
                let rhs = self.unary(ctx)?;
                let inv = match rhs {
                    Value::S(s) if s.constant_value().is_some_and(|c| !c.is_zero()) => s
                        .inverse()
                        .map_err(|e| Self::err_at(&rhs_at, &e.to_string(), &[]))?,
                    _ => return Err(Self::err_at(&rhs_at, "division is only by a nonzero constant", &[])),
                };
                acc = match acc {
                    Value::S(a) => Value::S(&a * &inv),
                    Value::V(v) => Value::V(v.scale(&inv).map_err(|e| Self::err_at(&at, &e.to_string(), &[]))?),
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let t = self.peek();
            return Err(Self::err_at(t, "expression nested too deeply", &[]));
        }
        Ok(())
    }

    fn unary(&mut self, ctx: &Ctx) -> Result<Value, ParseError> {
        if self.is_sym('-') {
            self.advance();
            self.enter()?;
            let v = self.unary(ctx);
            self.depth -= 1;
            return Ok(negate(v?));
        }
        self.power(ctx)
    }

    fn power(&mut self, ctx: &Ctx) -> Result<Value, ParseError> {
        let base = self.atom(ctx)?;
        if !self.is_sym('^') {
            return Ok(base);
        }
        let caret = self.advance();
        let neg = if self.is_sym('-') {
            self.advance();
            true
        } else {
            false
        };
        let at = self.peek().clone();
        let e = match &at.tok {
            Tok::Int(n) => n.to_i64().filter(|&e| e <= MAX_EXPONENT),
            _ => return Err(self.unexpected(&["integer exponent"])),
        };
        self.advance();
        let e = e.ok_or_else(|| Self::err_at(&at, &format!("exponent exceeds {MAX_EXPONENT}"), &[]))? as i32;
        let e = if neg { -e } else { e };
        match base {
            Value::S(s) => s.pow_i(e).map(Value::S).map_err(|err| Self::err_at(&caret, &err.to_string(), &[])),
            Value::V(_) => Err(Self::err_at(&caret, "cannot raise a basis term to a power", &[])),
        }
    }

    fn atom(&mut self, ctx: &Ctx) -> Result<Value, ParseError> {
        let at = self.peek().clone();
        match &at.tok {
            Tok::Int(n) => {
                let n = n.clone();
                self.advance();
                Ok(Value::S(Scalar::from_rational(&ctx.ring, Rational::from_integer(n))))
            }
            Tok::Ident(s) if s == "i" => {
                self.advance();
                Ok(Value::S(Scalar::from_gauss(&ctx.ring, GaussRational::i())))
            }
            Tok::Ident(s) if basis_index(s).is_some() => {
                if ctx.dim.is_none() {
                    return Err(Self::err_at(&at, "basis element not allowed in a scalar", &[]));
                }
                let k = self.basis(ctx)?;
                Ok(Value::V(Element::basis(&ctx.ring, ctx.dim.unwrap_or(0), k)))
            }
            Tok::Ident(s) => {
                let s = s.clone();
                self.advance();
                Scalar::symbol(&ctx.ring, &s)
                    .map(Value::S)
                    .map_err(|_| Self::err_at(&at, &format!("unknown symbol `{s}`"), &[]))
            }
            Tok::Sym('(') => {
                self.advance();
                self.enter()?;
                let v = self.expr(ctx);
                self.depth -= 1;
                let v = v?;
                self.expect_sym(')')?;
                Ok(v)
            }
            _ => Err(self.unexpected(&["number", "symbol", "`(`"])),
        }
    }
}

fn negate(v: Value) -> Value {
    match v {
        Value::S(s) => Value::S(-s),
        Value::V(e) => Value::V(e.neg()),
    }
}
