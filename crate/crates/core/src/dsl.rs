//! The presentation file format.
//!
//! ```text
//! semigroup qmap_x2;
//! generators { a11 sa, a12 sa, a21 sa, a22 sa; }
//! relations { a11^2 = a11; }
//! closures { partition(a11, a12); partition(a21, a22); }
//! delta { a11 -> a11 (*) a11 + a12 (*) a21; ... }
//! counit { a11 -> 1; a12 -> 0; ... }
//! action points 2 { e1 -> e1 (*) a11 + e2 (*) a21; ... }
//! ```
//!
//! In expressions `*` is the postfix adjoint, products are written by
//! juxtaposition or `.`, `^k` is a power, `i` is the imaginary unit, `1` the
//! unit and `n/d` a rational literal. Tensor legs are separated by `⊗` or
//! `(*)`. A `presentation` file stops after `closures`. `#` and `//` start
//! comments.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, ParseError, Result};
use crate::ncpoly::{Letter, LetterNames, NCPoly, Word};
use crate::presentation::{tensor, Generator, Presentation};
use crate::scalar::Scalar;
use crate::semigroup::{Action, FDCStar, MElem, QuantumSemigroup, SpaceKind};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(BigInt),
    Star,
    Caret,
    Dot,
    Plus,
    Minus,
    LParen,
    RParen,
    Tensor,
    Eq,
    Semi,
    Comma,
    LBrace,
    RBrace,
    Arrow,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Number(n) => format!("'{n}'"),
            Tok::Eof => "end of input".into(),
            other => format!("'{}'", tok_text(other)),
        }
    }
}

fn tok_text(t: &Tok) -> &'static str {
    match t {
        Tok::Star => "*",
        Tok::Caret => "^",
        Tok::Dot => ".",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::Tensor => "(*)",
        Tok::Eq => "=",
        Tok::Semi => ";",
        Tok::Comma => ",",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::Arrow => "->",
        Tok::Slash => "/",
        _ => "?",
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if c == b'#' || bytes[pos..].starts_with(b"//") {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        if src[pos..].starts_with('⊗') {
            out.push((Tok::Tensor, start));
            pos += '⊗'.len_utf8();
            continue;
        }
        if bytes[pos..].starts_with(b"(*)") {
            out.push((Tok::Tensor, start));
            pos += 3;
            continue;
        }
        if bytes[pos..].starts_with(b"->") {
            out.push((Tok::Arrow, start));
            pos += 2;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            out.push((Tok::Ident(src[start..pos].to_string()), start));
            continue;
        }
        if c.is_ascii_digit() {
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let n: BigInt = src[start..pos].parse().expect("digits");
            out.push((Tok::Number(n), start));
            continue;
        }
        let tok = match c {
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'.' => Tok::Dot,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'=' => Tok::Eq,
            b';' => Tok::Semi,
            b',' => Tok::Comma,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b'/' => Tok::Slash,
            _ => {
                let ch = src[pos..].chars().next().unwrap_or('?');
                return Err(ParseError::at_offset(bytes, pos, format!("unexpected character '{ch}'")));
            }
        };
        out.push((tok, start));
        pos += 1;
    }
    out.push((Tok::Eof, bytes.len()));
    Ok(out)
}

/// Resolves a name on a tensor leg to `(generator, self_adjoint)`.
pub type Resolver<'a> = &'a dyn Fn(u8, &str) -> Option<(u16, bool)>;

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const MAX_POWER: u32 = 64;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        Ok(Parser { src, toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, offset: usize, msg: impl Into<String>) -> ParseError {
        ParseError::at_offset(self.src.as_bytes(), offset, msg)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        self.err_at(self.offset(), msg)
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected '{}', found {}", tok_text(&t), self.peek().describe())))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Ident(s) => Ok((s, at)),
            other => {
                self.pos -= usize::from(other != Tok::Eof);
                Err(self.err_at(at, format!("expected a name, found {}", other.describe())))
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => Err(self.err(format!("expected '{kw}', found {}", other.describe()))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    // sum := ['+'|'-'] tensor (('+'|'-') tensor)*
    fn sum(&mut self, resolve: Resolver, legs: u8) -> Result<NCPoly, ParseError> {
        let mut acc = NCPoly::zero();
        let mut sign = Scalar::one();
        match self.peek() {
            Tok::Minus => {
                self.bump();
                sign = -sign;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        loop {
            let t = self.tensor(resolve, legs)?;
            acc.add_scaled(&t, &sign);
            sign = match self.peek() {
                Tok::Plus => Scalar::one(),
                Tok::Minus => -Scalar::one(),
                _ => return Ok(acc),
            };
            self.bump();
        }
    }

    // tensor := product (TENSOR product)*
    fn tensor(&mut self, resolve: Resolver, legs: u8) -> Result<NCPoly, ParseError> {
        let mut acc = self.product(resolve, 0, legs)?;
        let mut leg = 0u8;
        while *self.peek() == Tok::Tensor {
            let at = self.offset();
            self.bump();
            leg += 1;
            if leg >= legs {
                return Err(self.err_at(at, format!("at most {legs} tensor legs allowed here")));
            }
            let next = self.product(resolve, leg, legs)?;
            acc = &acc * &next;
        }
        Ok(acc)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Number(_) | Tok::LParen)
    }

    // product := factor (['.'] factor)*
    fn product(&mut self, resolve: Resolver, leg: u8, legs: u8) -> Result<NCPoly, ParseError> {
        let mut acc = self.factor(resolve, leg, legs)?;
        loop {
            if *self.peek() == Tok::Dot {
                self.bump();
            } else if !self.starts_atom() {
                return Ok(acc);
            }
            let next = self.factor(resolve, leg, legs)?;
            acc = &acc * &next;
        }
    }

    // factor := atom ('*' | '^' INT)*
    fn factor(&mut self, resolve: Resolver, leg: u8, legs: u8) -> Result<NCPoly, ParseError> {
        let mut acc = self.atom(resolve, leg, legs)?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = acc.star();
                }
                Tok::Caret => {
                    self.bump();
                    let at = self.offset();
                    let k = match self.bump() {
                        Tok::Number(n) => u32::try_from(n).ok().filter(|&k| k <= MAX_POWER),
                        _ => None,
                    }
                    .ok_or_else(|| self.err_at(at, format!("expected an exponent between 0 and {MAX_POWER}")))?;
                    let base = acc;
                    acc = NCPoly::one();
                    for _ in 0..k {
                        acc = &acc * &base;
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self, resolve: Resolver, leg: u8, legs: u8) -> Result<NCPoly, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Number(n) => {
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let dat = self.offset();
                    let d = match self.bump() {
                        Tok::Number(d) if d != BigInt::from(0) => d,
                        _ => return Err(self.err_at(dat, "expected a nonzero denominator")),
                    };
                    return Ok(NCPoly::constant(Scalar::from_real(BigRational::new(n, d))));
                }
                Ok(NCPoly::constant(Scalar::from_real(BigRational::from_integer(n))))
            }
            Tok::Ident(name) => {
                if let Some((g, sa)) = resolve(leg, &name) {
                    return Ok(NCPoly::letter(Letter::new(g, false, sa).on_leg(leg)));
                }
                if name == "i" {
                    return Ok(NCPoly::constant(Scalar::i()));
                }
                Err(self.err_at(at, format!("unknown generator '{name}'")))
            }
            Tok::LParen => {
                // a parenthesized sum stays on the current leg
                let shifted = |l: u8, name: &str| resolve(l + leg, name);
                let inner = self.sum(&shifted, legs - leg)?;
                self.expect(Tok::RParen)?;
                Ok(inner.shift_legs(leg))
            }
            other => {
                self.pos -= usize::from(other != Tok::Eof);
                Err(self.err_at(at, format!("expected an expression, found {}", other.describe())))
            }
        }
    }
}

/// Parses a single-leg expression.
pub fn parse_expression(text: &str, resolve: Resolver) -> Result<NCPoly, ParseError> {
    parse_tensor_expression(text, resolve, 1)
}

/// Parses an expression with up to `legs` tensor legs.
pub fn parse_tensor_expression(text: &str, resolve: Resolver, legs: u8) -> Result<NCPoly, ParseError> {
    let mut p = Parser::new(text)?;
    let out = p.sum(resolve, legs)?;
    if *p.peek() != Tok::Eof {
        return Err(p.err(format!("unexpected {}", p.peek().describe())));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum Parsed {
    Presentation(Presentation),
    Semigroup(QuantumSemigroup),
}

impl Parsed {
    pub fn presentation(&self) -> &Presentation {
        match self {
            Parsed::Presentation(p) => p,
            Parsed::Semigroup(s) => &s.algebra,
        }
    }
}

fn resolver_for(p: &Presentation) -> impl Fn(u8, &str) -> Option<(u16, bool)> + '_ {
    move |leg, name| if leg == 0 { p.resolve(0, name) } else { None }
}

/// Parses a presentation or semigroup file.
pub fn parse(text: &str) -> Result<Parsed, ParseError> {
    let mut p = Parser::new(text)?;
    let is_semigroup = match p.peek() {
        Tok::Ident(s) if s == "semigroup" => true,
        Tok::Ident(s) if s == "presentation" => false,
        other => return Err(p.err(format!("expected 'presentation' or 'semigroup', found {}", other.describe()))),
    };
    p.bump();
    let (name, _) = p.ident()?;
    p.expect(Tok::Semi)?;

    // generators
    p.keyword("generators")?;
    p.expect(Tok::LBrace)?;
    let mut gens: Vec<Generator> = Vec::new();
    while !matches!(p.peek(), Tok::RBrace | Tok::Semi) {
        let (g, at) = p.ident()?;
        if g == "i" || g == "sa" {
            return Err(p.err_at(at, format!("'{g}' is reserved")));
        }
        if gens.iter().any(|x| x.name == g) {
            return Err(p.err_at(at, format!("duplicate generator '{g}'")));
        }
        let self_adjoint = p.at_keyword("sa");
        if self_adjoint {
            p.bump();
        }
        gens.push(Generator { name: g, self_adjoint });
        if *p.peek() == Tok::Comma {
            p.bump();
        } else {
            break;
        }
    }
    if *p.peek() == Tok::Semi {
        p.bump();
    }
    p.expect(Tok::RBrace)?;
    let scratch = Presentation::free(name.clone(), gens.clone()).map_err(|e| p.err(e.to_string()))?;

    // relations
    let mut relations = Vec::new();
    if p.at_keyword("relations") {
        p.bump();
        p.expect(Tok::LBrace)?;
        let resolve = resolver_for(&scratch);
        while *p.peek() != Tok::RBrace {
            let lhs = p.sum(&resolve, 1)?;
            let rel = if *p.peek() == Tok::Eq {
                p.bump();
                let rhs = p.sum(&resolve, 1)?;
                &lhs - &rhs
            } else {
                lhs
            };
            p.expect(Tok::Semi)?;
            relations.push(rel);
        }
        p.expect(Tok::RBrace)?;
    }

    // closures
    let mut partitions = Vec::new();
    if p.at_keyword("closures") {
        p.bump();
        p.expect(Tok::LBrace)?;
        while *p.peek() != Tok::RBrace {
            p.keyword("partition")?;
            p.expect(Tok::LParen)?;
            let mut members = Vec::new();
            loop {
                let (m, at) = p.ident()?;
                let k = scratch.generator_index(&m).ok_or_else(|| p.err_at(at, format!("unknown generator '{m}'")))?;
                if members.contains(&k) {
                    return Err(p.err_at(at, format!("'{m}' listed twice")));
                }
                members.push(k);
                if *p.peek() == Tok::Comma {
                    p.bump();
                } else {
                    break;
                }
            }
            p.expect(Tok::RParen)?;
            p.expect(Tok::Semi)?;
            partitions.push(members);
        }
        p.expect(Tok::RBrace)?;
    }

    let header_at = p.offset();
    let pres =
        Presentation::new(name.clone(), gens, relations, partitions).map_err(|e| p.err_at(header_at, e.to_string()))?;
    if !is_semigroup {
        if *p.peek() != Tok::Eof {
            return Err(p.err(format!("unexpected {} after a presentation", p.peek().describe())));
        }
        return Ok(Parsed::Presentation(pres));
    }
    let pres = Arc::new(pres);
    let n = pres.generators().len();

    // delta
    p.keyword("delta")?;
    let delta_at = p.offset();
    p.expect(Tok::LBrace)?;
    let mut delta: Vec<Option<NCPoly>> = vec![None; n];
    let resolve2 = |_leg: u8, name: &str| pres.resolve(0, name);
    while *p.peek() != Tok::RBrace {
        let (g, at) = p.ident()?;
        let k = pres.generator_index(&g).ok_or_else(|| p.err_at(at, format!("unknown generator '{g}'")))?;
        p.expect(Tok::Arrow)?;
        let img = p.sum(&resolve2, 2)?;
        p.expect(Tok::Semi)?;
        if delta[k as usize].replace(img).is_some() {
            return Err(p.err_at(at, format!("second coproduct for '{g}'")));
        }
    }
    p.expect(Tok::RBrace)?;

    // counit
    p.keyword("counit")?;
    let counit_at = p.offset();
    p.expect(Tok::LBrace)?;
    let mut counit: Vec<Option<Scalar>> = vec![None; n];
    let no_names = |_leg: u8, _name: &str| None;
    while *p.peek() != Tok::RBrace {
        let (g, at) = p.ident()?;
        let k = pres.generator_index(&g).ok_or_else(|| p.err_at(at, format!("unknown generator '{g}'")))?;
        p.expect(Tok::Arrow)?;
        let vat = p.offset();
        let v = p.sum(&no_names, 1)?;
        let v = v.as_constant().ok_or_else(|| p.err_at(vat, "counit values must be scalars"))?;
        p.expect(Tok::Semi)?;
        if counit[k as usize].replace(v).is_some() {
            return Err(p.err_at(at, format!("second counit value for '{g}'")));
        }
    }
    p.expect(Tok::RBrace)?;

    // action
    let mut action = None;
    if p.at_keyword("action") {
        p.bump();
        let kat = p.offset();
        let (kind, _) = p.ident()?;
        let space = match kind.as_str() {
            "points" => {
                let nat = p.offset();
                let count = match p.bump() {
                    Tok::Number(c) => usize::try_from(c).ok().filter(|&c| (1..=64).contains(&c)),
                    _ => None,
                }
                .ok_or_else(|| p.err_at(nat, "expected a point count between 1 and 64"))?;
                FDCStar::points(count).map_err(|e| p.err_at(nat, e.to_string()))?
            }
            "m2" => FDCStar::m2(),
            _ => return Err(p.err_at(kat, "expected 'points N' or 'm2'")),
        };
        p.expect(Tok::LBrace)?;
        let m = space.presentation().clone();
        let resolve_action = |leg: u8, name: &str| if leg == 0 { m.resolve(0, name) } else { pres.resolve(0, name) };
        let mcount = m.generators().len();
        let mut images: Vec<Option<MElem>> = vec![None; mcount];
        while *p.peek() != Tok::RBrace {
            let (g, at) = p.ident()?;
            let k = m
                .generator_index(&g)
                .ok_or_else(|| p.err_at(at, format!("'{g}' is not a generator of {}", m.name())))?;
            p.expect(Tok::Arrow)?;
            let img = p.sum(&resolve_action, 2)?;
            p.expect(Tok::Semi)?;
            if images[k as usize].replace(split_action_image(&space, &img)).is_some() {
                return Err(p.err_at(at, format!("second image for '{g}'")));
            }
        }
        let close = p.offset();
        p.expect(Tok::RBrace)?;
        let images = images
            .into_iter()
            .enumerate()
            .map(|(k, x)| x.ok_or_else(|| p.err_at(close, format!("no image for '{}'", m.generators()[k].name))))
            .collect::<Result<Vec<_>, _>>()?;
        action = Some(Action { space, generator_images: images });
    }
    if *p.peek() != Tok::Eof {
        return Err(p.err(format!("unexpected {}", p.peek().describe())));
    }

    let missing =
        |at: usize, what: &str, k: usize| p.err_at(at, format!("no {what} for '{}'", pres.generators()[k].name));
    let delta = delta
        .into_iter()
        .enumerate()
        .map(|(k, d)| d.ok_or_else(|| missing(delta_at, "coproduct", k)))
        .collect::<Result<Vec<_>, _>>()?;
    let counit = counit
        .into_iter()
        .enumerate()
        .map(|(k, c)| c.ok_or_else(|| missing(counit_at, "counit value", k)))
        .collect::<Result<Vec<_>, _>>()?;
    let s = QuantumSemigroup::new(name, pres.clone(), delta, counit, action).map_err(|e| p.err_at(0, e.to_string()))?;
    Ok(Parsed::Semigroup(s))
}

/// Splits `Σ m_k ⊗ a_k` (leg 0 in `M`, leg 1 in `A`) into coordinates.
fn split_action_image(space: &FDCStar, img: &NCPoly) -> MElem {
    let mut out = MElem::zero(space.dim());
    for (w, c) in img.terms() {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for l in w.letters() {
            if l.leg == 0 {
                left.push(*l);
            } else {
                right.push(l.on_leg(0));
            }
        }
        let coords = space.coords(&NCPoly::word(Word::from_letters(left)));
        let a = NCPoly::term(c.clone(), Word::from_letters(right));
        for (k, x) in coords.iter().enumerate() {
            if !x.is_zero() {
                out.0[k] = &out.0[k] + &a.scale(x);
            }
        }
    }
    out
}

/// Parses a file, mapping failures into the crate error type.
pub fn parse_file(path: &std::path::Path) -> Result<Parsed> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse(&text)?)
}

fn dsl_text(p: &NCPoly, names: &dyn LetterNames, legs: u8) -> String {
    p.display_joined(names, legs, " ")
}

fn write_body(out: &mut String, p: &Presentation) {
    let gens: Vec<String> =
        p.generators().iter().map(|g| if g.self_adjoint { format!("{} sa", g.name) } else { g.name.clone() }).collect();
    let _ = writeln!(out, "generators {{ {}; }}", gens.join(", "));
    let rels: Vec<String> = p.explicit_relations().map(|r| dsl_text(&r.poly, p, 1)).collect();
    if !rels.is_empty() {
        out.push_str("relations {\n");
        for r in rels {
            let _ = writeln!(out, "  {r} = 0;");
        }
        out.push_str("}\n");
    }
    let parts: Vec<Vec<u16>> = p.partitions().map(<[u16]>::to_vec).collect();
    if !parts.is_empty() {
        out.push_str("closures {\n");
        for m in parts {
            let names: Vec<&str> = m.iter().map(|&k| p.generators()[k as usize].name.as_str()).collect();
            let _ = writeln!(out, "  partition({});", names.join(", "));
        }
        out.push_str("}\n");
    }
}

fn file_name(name: &str) -> String {
    let cleaned: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    match cleaned.chars().next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => cleaned,
        _ => format!("p_{cleaned}"),
    }
}

pub fn print_presentation(p: &Presentation) -> String {
    let mut out = format!("presentation {};\n", file_name(p.name()));
    write_body(&mut out, p);
    out
}

pub fn print_semigroup(s: &QuantumSemigroup) -> String {
    let a = &s.algebra;
    let mut out = format!("semigroup {};\n", file_name(&s.name));
    write_body(&mut out, a);
    let names2 = tensor(&[a.clone(), a.clone()]);
    out.push_str("delta {\n");
    for (g, d) in a.generators().iter().zip(&s.delta) {
        let _ = writeln!(out, "  {} -> {};", g.name, dsl_text(d, &names2, 2));
    }
    out.push_str("}\ncounit {\n");
    for (g, e) in a.generators().iter().zip(&s.counit) {
        let _ = writeln!(out, "  {} -> {};", g.name, dsl_text(&NCPoly::constant(e.clone()), a.as_ref(), 1));
    }
    out.push_str("}\n");
    if let Some(action) = &s.action {
        let space = &action.space;
        match space.kind() {
            SpaceKind::Points(n) => {
                let _ = writeln!(out, "action points {n} {{");
            }
            SpaceKind::M2 => out.push_str("action m2 {\n"),
        }
        let names = tensor(&[space.presentation().clone(), a.clone()]);
        for (g, img) in space.presentation().generators().iter().zip(&action.generator_images) {
            let mut p = NCPoly::zero();
            for (k, c) in img.0.iter().enumerate() {
                p = &p + &(space.basis_word(k) * &c.shift_legs(1));
            }
            let _ = writeln!(out, "  {} -> {};", g.name, dsl_text(&p, &names, 2));
        }
        out.push_str("}\n");
    }
    out
}

/// Reads a file and reports parse failures as located errors.
pub fn load(text: &str) -> Result<Parsed> {
    parse(text).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2c() -> Presentation {
        let gens = vec![
            Generator { name: "alpha".into(), self_adjoint: false },
            Generator { name: "beta".into(), self_adjoint: true },
            Generator { name: "gamma".into(), self_adjoint: true },
        ];
        Presentation::free("m2c", gens).unwrap()
    }

    #[test]
    fn expression_grammar() {
        let p = m2c();
        let a = p.gen("alpha");
        let b = p.gen("beta");
        let c = p.gen("gamma");
        assert_eq!(p.expr("alpha^2 + beta.gamma").unwrap(), &(&a * &a) + &(&b * &c));
        assert_eq!(p.expr("alpha^2 + beta gamma").unwrap(), p.expr("alpha alpha + beta.gamma").unwrap());
        // postfix adjoint, also on parenthesized groups
        assert_eq!(p.expr("(alpha beta)*").unwrap(), &b * &a.star());
        assert_eq!(p.expr("alpha*beta").unwrap(), &a.star() * &b);
        assert_eq!(p.expr("beta*").unwrap(), b);
        // rationals and i
        let half = Scalar::from_ratio(1, 2);
        assert_eq!(p.expr("1/2 alpha").unwrap(), a.scale(&half));
        assert_eq!(
            p.expr("(1/2 - 3/4 i) 1").unwrap(),
            NCPoly::constant(Scalar::new(
                BigRational::new(1.into(), 2.into()),
                BigRational::new((-3).into(), 4.into())
            ))
        );
        assert_eq!(p.expr("-alpha + alpha").unwrap(), NCPoly::zero());
        assert_eq!(p.expr("alpha^0").unwrap(), NCPoly::one());
    }

    #[test]
    fn tensor_expressions() {
        let p = m2c();
        let r = |leg: u8, name: &str| if leg < 2 { p.resolve(0, name) } else { None };
        let t = parse_tensor_expression("1 ⊗ alpha + alpha (*) beta", &r, 2).unwrap();
        let a = p.gen("alpha");
        let b = p.gen("beta");
        assert_eq!(t, &a.on_leg(1) + &(&a * &b.on_leg(1)));
        let e = parse_tensor_expression("alpha (*) beta (*) gamma", &r, 2).unwrap_err();
        assert!(e.message.contains("tensor legs"));
        // a group on the second leg stays there
        let g = parse_tensor_expression("alpha (*) (beta + gamma)", &r, 2).unwrap();
        assert_eq!(g, &a * &(&b + &p.gen("gamma")).on_leg(1));
    }

    #[test]
    fn errors_are_located() {
        let src = "presentation x;\ngenerators { a, b; }\nrelations { a + ; }\n";
        let e = parse(src).unwrap_err();
        assert_eq!((e.line, e.column), (3, 17));
        let e = parse("presentation x;\ngenerators { a; }\nrelations { a + zz = 0; }").unwrap_err();
        assert_eq!((e.line, e.column), (3, 17));
        assert!(e.message.contains("unknown generator"));
        let e = parse("presentation x; generators { a, a; }").unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = parse("semigroup x; generators { a; } delta { a -> a (*) a; } counit { }").unwrap_err();
        assert!(e.message.contains("no counit value for 'a'"));
        assert!(parse("").is_err());
        assert!(parse("presentation x; generators { a; } relations { a $ b; }").is_err());
    }

    #[test]
    fn presentation_round_trip() {
        let src = "presentation demo;\n\
                   generators { alpha, beta sa, gamma sa; }\n\
                   relations { alpha^2 + beta gamma = 0; alpha beta + beta alpha* = 0; 1/2 alpha - i beta = gamma; }\n\
                   closures { partition(beta, gamma); }\n";
        let p = match parse(src).unwrap() {
            Parsed::Presentation(p) => p,
            _ => panic!("expected a presentation"),
        };
        assert_eq!(p.explicit_relations().count(), 3);
        let printed = print_presentation(&p);
        let again = parse(&printed).unwrap();
        assert_eq!(again.presentation().hash(), p.hash());
        assert_eq!(print_presentation(again.presentation()), printed);
    }

    #[test]
    fn semigroup_round_trip_with_action() {
        let src = "semigroup x2;\n\
                   generators { a11, a12, a21, a22; }\n\
                   closures { partition(a11, a12); partition(a21, a22); }\n\
                   delta { a11 -> a11 (*) a11 + a12 (*) a21; a12 -> a11 (*) a12 + a12 (*) a22;\n\
                           a21 -> a21 (*) a11 + a22 (*) a21; a22 -> a21 (*) a12 + a22 (*) a22; }\n\
                   counit { a11 -> 1; a12 -> 0; a21 -> 0; a22 -> 1; }\n\
                   action points 2 { e1 -> e1 (*) a11 + e2 (*) a21; e2 -> e1 (*) a12 + e2 (*) a22; }\n";
        let s = match parse(src).unwrap() {
            Parsed::Semigroup(s) => s,
            _ => panic!("expected a semigroup"),
        };
        let action = s.action.as_ref().unwrap();
        assert_eq!(action.generator_images[0].0[1], s.algebra.gen("a21"));
        let printed = print_semigroup(&s);
        let again = match parse(&printed).unwrap() {
            Parsed::Semigroup(t) => t,
            _ => panic!(),
        };
        assert_eq!(again.algebra.hash(), s.algebra.hash());
        assert_eq!(again.delta, s.delta);
        assert_eq!(again.counit, s.counit);
        assert_eq!(again.action.unwrap().generator_images, action.generator_images);
    }
}
