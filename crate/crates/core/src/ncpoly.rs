//! Noncommutative *-polynomials with exact coefficients.
//!
//! A [`Word`] is a product of [`Letter`]s. Letters carry a tensor-leg tag so
//! the same types describe elements of `A`, `A ⊗ A` and `A ⊗ A ⊗ A`: letters in
//! different legs commute, and words keep their letters sorted into leg blocks
//! (stable within each block).
//!
//! Words are ordered degree-lexicographically. Within a degree the letter
//! order is `(leg, generator, starred)`, i.e. generators in declaration order,
//! each immediately followed by its adjoint.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::ParseError;
use crate::scalar::{coefficient_body, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub leg: u8,
    pub generator: u16,
    pub starred: bool,
    /// Self-adjoint letters are never starred.
    pub self_adjoint: bool,
}

impl Letter {
    pub fn new(generator: u16, starred: bool, self_adjoint: bool) -> Self {
        Letter { leg: 0, generator, starred: starred && !self_adjoint, self_adjoint }
    }

    pub fn on_leg(mut self, leg: u8) -> Self {
        self.leg = leg;
        self
    }

    pub fn star(self) -> Self {
        if self.self_adjoint {
            self
        } else {
            Letter { starred: !self.starred, ..self }
        }
    }

    fn key(&self) -> (u8, u16, bool) {
        (self.leg, self.generator, self.starred)
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// A monomial; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, moving letters into leg blocks.
    pub fn from_letters(mut letters: Vec<Letter>) -> Self {
        if letters.windows(2).any(|w| w[0].leg > w[1].leg) {
            letters.sort_by_key(|l| l.leg);
        }
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_leg(&self) -> Option<u8> {
        self.0.last().map(|l| l.leg)
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        match (self.max_leg(), other.0.first()) {
            (Some(a), Some(b)) if a > b.leg => {
                // merge leg blocks; each input is already sorted by leg
                let (mut i, mut j) = (0, 0);
                while i < self.0.len() || j < other.0.len() {
                    let take_left = match (self.0.get(i), other.0.get(j)) {
                        (Some(x), Some(y)) => x.leg <= y.leg,
                        (Some(_), None) => true,
                        _ => false,
                    };
                    if take_left {
                        letters.push(self.0[i]);
                        i += 1;
                    } else {
                        letters.push(other.0[j]);
                        j += 1;
                    }
                }
            }
            _ => {
                letters.extend_from_slice(&self.0);
                letters.extend_from_slice(&other.0);
            }
        }
        Word(letters)
    }

    pub fn star(&self) -> Word {
        let mut letters: Vec<Letter> = self.0.iter().rev().map(|l| l.star()).collect();
        // reversal also reverses the leg blocks; restore leg order
        letters.sort_by_key(|l| l.leg);
        Word(letters)
    }

    /// Splits into the blocks of consecutive letters sharing a leg.
    pub fn leg_blocks(&self) -> Vec<(u8, Word)> {
        let mut out: Vec<(u8, Word)> = Vec::new();
        for l in &self.0 {
            match out.last_mut() {
                Some((leg, w)) if *leg == l.leg => w.0.push(*l),
                _ => out.push((l.leg, Word(vec![*l]))),
            }
        }
        out
    }

    pub fn subword(&self, start: usize, len: usize) -> Word {
        Word(self.0[start..start + len].to_vec())
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start..].to_vec())
    }

    /// Positions where `pattern` occurs as a contiguous factor.
    pub fn occurrences(&self, pattern: &Word) -> Vec<usize> {
        let (n, m) = (self.0.len(), pattern.0.len());
        if m > n {
            return Vec::new();
        }
        (0..=n - m).filter(|&i| self.0[i..i + m] == pattern.0[..]).collect()
    }

    pub fn map_letters(&self, f: impl Fn(Letter) -> Letter) -> Word {
        Word::from_letters(self.0.iter().map(|l| f(*l)).collect())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// Degree-lexicographic comparison under an explicit letter ranking.
pub fn deglex_compare(u: &Word, v: &Word, rank: impl Fn(&Letter) -> usize) -> Ordering {
    u.degree().cmp(&v.degree()).then_with(|| {
        for (a, b) in u.0.iter().zip(&v.0) {
            match rank(a).cmp(&rank(b)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    })
}

/// Resolves letter names for printing and parsing.
pub trait LetterNames {
    fn letter_name(&self, leg: u8, generator: u16) -> String;
    /// Looks up a generator by name: `(index, self_adjoint)`.
    fn resolve(&self, leg: u8, name: &str) -> Option<(u16, bool)>;
}

/// A finite linear combination of words with [`Scalar`] coefficients.
///
/// `Ord` is a fixed total order used for sorting and deduplication.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NCPoly {
    terms: BTreeMap<Word, Scalar>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn one() -> Self {
        NCPoly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        NCPoly::term(c, Word::unit())
    }

    pub fn term(c: Scalar, w: Word) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(w, &c);
        p
    }

    pub fn word(w: Word) -> Self {
        NCPoly::term(Scalar::one(), w)
    }

    pub fn letter(l: Letter) -> Self {
        NCPoly::word(Word::letter(l))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut p = NCPoly::zero();
        for (w, c) in terms {
            p.add_term(w, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending deglex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    /// `Some(c)` when the polynomial is a scalar multiple of the unit.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Word::unit()).cloned(),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<(&Word, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Leading word and coefficient under an explicit letter ranking.
    pub fn leading_term_by(&self, rank: impl Fn(&Letter) -> usize + Copy) -> Option<(&Word, &Scalar)> {
        self.terms.iter().max_by(|a, b| deglex_compare(a.0, b.0, rank))
    }

    pub fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub(crate) fn pop_leading(&mut self) -> Option<(Word, Scalar)> {
        self.terms.pop_last()
    }

    pub fn add_scaled(&mut self, other: &NCPoly, c: &Scalar) {
        for (w, d) in &other.terms {
            self.add_term(w.clone(), &(c * d));
        }
    }

    /// `self += c * left * other * right`.
    pub fn add_scaled_sandwich(&mut self, c: &Scalar, left: &Word, other: &NCPoly, right: &Word) {
        for (w, d) in &other.terms {
            self.add_term(left.mul(w).mul(right), &(c * d));
        }
    }

    pub fn scale(&self, c: &Scalar) -> NCPoly {
        if c.is_zero() {
            return NCPoly::zero();
        }
        NCPoly { terms: self.terms.iter().map(|(w, d)| (w.clone(), c * d)).collect() }
    }

    pub fn star(&self) -> NCPoly {
        NCPoly::from_terms(self.terms.iter().map(|(w, c)| (w.star(), c.conj())))
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> NCPoly {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
            None => NCPoly::zero(),
        }
    }

    pub fn map_words(&self, f: impl Fn(&Word) -> Word) -> NCPoly {
        NCPoly::from_terms(self.terms.iter().map(|(w, c)| (f(w), c.clone())))
    }

    /// Moves every letter onto `leg + offset`.
    pub fn shift_legs(&self, offset: u8) -> NCPoly {
        if offset == 0 {
            return self.clone();
        }
        self.map_words(|w| w.map_letters(|l| l.on_leg(l.leg + offset)))
    }

    pub fn on_leg(&self, leg: u8) -> NCPoly {
        self.map_words(|w| w.map_letters(|l| l.on_leg(leg)))
    }

    pub fn max_leg(&self) -> u8 {
        self.terms.keys().filter_map(Word::max_leg).max().unwrap_or(0)
    }

    pub fn letters(&self) -> impl Iterator<Item = &Letter> {
        self.terms.keys().flat_map(|w| w.letters().iter())
    }

    pub fn commutator(a: &NCPoly, b: &NCPoly) -> NCPoly {
        &(a * b) - &(b * a)
    }

    /// Canonical text for a single-leg polynomial.
    pub fn display(&self, names: &dyn LetterNames) -> String {
        self.display_legs(names, 1)
    }

    /// Canonical text: terms in descending deglex order, legs separated by ` (*) `.
    pub fn display_legs(&self, names: &dyn LetterNames, legs: u8) -> String {
        self.display_joined(names, legs, "*")
    }

    /// Like [`NCPoly::display_legs`] with letters separated by `joiner`.
    pub fn display_joined(&self, names: &dyn LetterNames, legs: u8, joiner: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let legs = legs.max(self.max_leg() + 1);
        let mut out = String::new();
        for (k, (w, c)) in self.terms.iter().rev().enumerate() {
            let word = display_word(w, names, legs, joiner);
            let negative_real = c.is_real() && c.re() < &num_rational::BigRational::from_integer(0.into());
            let mag = if negative_real { -c } else { c.clone() };
            match (k, negative_real) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if mag.is_one() {
                out.push_str(&word);
            } else {
                let _ = write!(out, "({}){}", coefficient_body(&mag), word);
            }
        }
        out
    }

    /// Parses the canonical text produced by [`NCPoly::display_legs`].
    pub fn parse_canonical(text: &str, names: &dyn LetterNames) -> Result<NCPoly, ParseError> {
        CanonicalParser { src: text.as_bytes(), pos: 0, names }.poly()
    }
}

pub fn display_word(w: &Word, names: &dyn LetterNames, legs: u8, joiner: &str) -> String {
    let blocks = w.leg_blocks();
    let mut parts = Vec::with_capacity(legs as usize);
    for leg in 0..legs {
        let block = blocks.iter().find(|(l, _)| *l == leg);
        parts.push(match block {
            None => "1".to_string(),
            Some((_, b)) => b
                .letters()
                .iter()
                .map(|l| {
                    let mut s = names.letter_name(l.leg, l.generator);
                    if l.starred {
                        s.push('*');
                    }
                    s
                })
                .collect::<Vec<_>>()
                .join(joiner),
        });
    }
    parts.join(" (*) ")
}

struct CanonicalParser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a dyn LetterNames,
}

impl CanonicalParser<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::at_offset(self.src, self.pos, msg)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek() == Some(b' ') {
            self.pos += 1;
        }
    }

    fn poly(mut self) -> Result<NCPoly, ParseError> {
        self.skip_ws();
        if self.src[self.pos..] == *b"0" {
            return Ok(NCPoly::zero());
        }
        let mut p = NCPoly::zero();
        let mut first = true;
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                if first {
                    return Err(self.err("empty polynomial"));
                }
                break;
            }
            let mut sign = Scalar::one();
            match self.peek() {
                Some(b'-') => {
                    sign = -sign;
                    self.pos += 1;
                }
                Some(b'+') if !first => self.pos += 1,
                _ if first => {}
                _ => return Err(self.err("expected '+' or '-'")),
            }
            self.skip_ws();
            let mut coeff = Scalar::one();
            if self.peek() == Some(b'(') && self.src.get(self.pos + 1) != Some(&b'*') {
                coeff = self.coefficient()?;
            }
            let w = self.word()?;
            p.add_term(w, &(&sign * &coeff));
            first = false;
        }
        Ok(p)
    }

    fn coefficient(&mut self) -> Result<Scalar, ParseError> {
        self.pos += 1;
        let start = self.pos;
        while self.peek().is_some_and(|c| c != b')') {
            self.pos += 1;
        }
        if self.peek() != Some(b')') {
            return Err(self.err("unterminated coefficient"));
        }
        let body = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| self.err("bad utf-8"))?;
        self.pos += 1;
        parse_coefficient_body(body).ok_or_else(|| self.err(format!("bad coefficient '{body}'")))
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        let mut letters = Vec::new();
        let mut leg = 0u8;
        loop {
            self.leg_word(leg, &mut letters)?;
            let save = self.pos;
            self.skip_ws();
            if self.src[self.pos..].starts_with(b"(*)") {
                self.pos += 3;
                self.skip_ws();
                leg += 1;
            } else {
                self.pos = save;
                return Ok(Word::from_letters(letters));
            }
        }
    }

    fn leg_word(&mut self, leg: u8, letters: &mut Vec<Letter>) -> Result<(), ParseError> {
        if self.peek() == Some(b'1') && !self.src.get(self.pos + 1).is_some_and(is_name_char) {
            self.pos += 1;
            return Ok(());
        }
        loop {
            let start = self.pos;
            if !self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == b'_') {
                return Err(self.err("expected a letter"));
            }
            while self.peek().is_some_and(|c| is_name_char(&c)) {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
            let (generator, sa) = self
                .names
                .resolve(leg, name)
                .ok_or_else(|| ParseError::at_offset(self.src, start, format!("unknown generator '{name}'")))?;
            let mut starred = false;
            if self.peek() == Some(b'*') {
                match self.src.get(self.pos + 1) {
                    Some(c) if is_name_char(c) => {}
                    _ => {
                        starred = true;
                        self.pos += 1;
                    }
                }
            }
            if starred && sa {
                return Err(ParseError::at_offset(self.src, start, format!("'{name}' is self-adjoint")));
            }
            letters.push(Letter::new(generator, starred, sa).on_leg(leg));
            if self.peek() == Some(b'*') && self.src.get(self.pos + 1).is_some_and(is_name_char) {
                self.pos += 1;
                continue;
            }
            return Ok(());
        }
    }
}

fn is_name_char(c: &u8) -> bool {
    c.is_ascii_alphanumeric() || *c == b'_'
}

fn parse_coefficient_body(body: &str) -> Option<Scalar> {
    let body = body.trim();
    if let Some(imag) = body.strip_suffix(" i").or_else(|| body.strip_suffix('i')) {
        // split "a+b" / "a-b" at the last sign that is not leading
        let split = imag.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(k, _)| k).last();
        return match split {
            Some(k) => {
                let re = Scalar::parse_rational(&imag[..k])?;
                let im = Scalar::parse_rational(imag[k..].trim_start_matches('+'))?;
                Some(Scalar::new(re, im))
            }
            None => Some(Scalar::new(num_traits::Zero::zero(), Scalar::parse_rational(imag)?)),
        };
    }
    Some(Scalar::from_real(Scalar::parse_rational(body)?))
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl Add for NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: NCPoly) -> NCPoly {
        &self + &rhs
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

impl Sub for NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: NCPoly) -> NCPoly {
        &self - &rhs
    }
}

impl Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                out.add_term(u.mul(v), &(a * b));
            }
        }
        out
    }
}

impl Mul for NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: NCPoly) -> NCPoly {
        &self * &rhs
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scale(&-Scalar::one())
    }
}

impl Neg for NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        -&self
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Generators `g0, g1, ...` on any leg; `s*` names are self-adjoint.
    pub(crate) struct TestNames(pub Vec<(&'static str, bool)>);

    impl LetterNames for TestNames {
        fn letter_name(&self, _leg: u8, generator: u16) -> String {
            self.0[generator as usize].0.to_string()
        }
        fn resolve(&self, _leg: u8, name: &str) -> Option<(u16, bool)> {
            self.0.iter().position(|(n, _)| *n == name).map(|k| (k as u16, self.0[k].1))
        }
    }

    pub(crate) fn l(g: u16) -> Letter {
        Letter::new(g, false, false)
    }

    pub(crate) fn ls(g: u16) -> Letter {
        Letter::new(g, true, false)
    }

    fn w(ls: &[Letter]) -> Word {
        Word::from_letters(ls.to_vec())
    }

    fn names() -> TestNames {
        TestNames(vec![("alpha", false), ("beta", false), ("gamma", false)])
    }

    #[test]
    fn unit_is_neutral() {
        let p = NCPoly::letter(l(0)) + NCPoly::letter(ls(1));
        assert_eq!(&NCPoly::one() * &p, p);
        assert_eq!(&p * &NCPoly::one(), p);
    }

    #[test]
    fn distributes_like_xy_expansion() {
        let (a, b, c) = (NCPoly::letter(l(0)), NCPoly::letter(l(1)), NCPoly::letter(l(2)));
        let x = &a + &a.star();
        let y = &b + &c;
        let expected = NCPoly::from_terms([
            (w(&[l(0), l(1)]), Scalar::one()),
            (w(&[l(0), l(2)]), Scalar::one()),
            (w(&[ls(0), l(1)]), Scalar::one()),
            (w(&[ls(0), l(2)]), Scalar::one()),
        ]);
        assert_eq!(&x * &y, expected);
    }

    #[test]
    fn star_reverses_and_conjugates() {
        let ab = NCPoly::word(w(&[l(0), l(1)]));
        assert_eq!(ab.star(), NCPoly::word(w(&[ls(1), ls(0)])));
        let ip = NCPoly::term(Scalar::i(), w(&[l(0)]));
        assert_eq!(ip.star(), NCPoly::term(-Scalar::i(), w(&[ls(0)])));
    }

    #[test]
    fn deglex_examples() {
        let rank = |x: &Letter| (x.generator as usize) * 2 + x.starred as usize;
        assert_eq!(deglex_compare(&Word::unit(), &w(&[l(0)]), rank), Ordering::Less);
        assert_eq!(deglex_compare(&w(&[l(0), l(1)]), &w(&[l(0), l(0)]), rank), Ordering::Greater);
        // α*α vs ββ* under α<α*<β<β*
        assert_eq!(deglex_compare(&w(&[ls(0), l(0)]), &w(&[l(1), ls(1)]), rank), Ordering::Less);
        // reversed ranking flips the tie-break
        let rev = |x: &Letter| 100 - rank(x);
        assert_eq!(deglex_compare(&w(&[l(0), l(1)]), &w(&[l(0), l(0)]), rev), Ordering::Less);
    }

    #[test]
    fn leading_terms() {
        // α² + βγ with α<β<γ: βγ leads lexicographically
        let p = NCPoly::word(w(&[l(0), l(0)])) + NCPoly::word(w(&[l(1), l(2)]));
        assert_eq!(p.leading_term().unwrap().0, &w(&[l(1), l(2)]));
        // with β, γ ranked below α the square leads
        let rank = |x: &Letter| match x.generator {
            0 => 10,
            g => g as usize,
        };
        assert_eq!(p.leading_term_by(rank).unwrap().0, &w(&[l(0), l(0)]));
        assert_eq!(NCPoly::one().leading_term().unwrap(), (&Word::unit(), &Scalar::one()));
        let q = NCPoly::letter(l(0)) + NCPoly::letter(ls(0)) - NCPoly::one();
        assert_eq!(q.leading_term().unwrap(), (&w(&[ls(0)]), &Scalar::one()));
        assert!(NCPoly::zero().leading_term().is_none());
    }

    #[test]
    fn canonical_text_matches_documented_shape() {
        let names = TestNames(vec![("a11", true), ("a12", true)]);
        let p = NCPoly::word(w(&[Letter::new(0, false, true), Letter::new(1, false, true)]))
            - NCPoly::constant(Scalar::from_ratio(1, 2));
        assert_eq!(p.display(&names), "a11*a12 - (1/2)1");
        assert_eq!(NCPoly::parse_canonical("a11*a12 - (1/2)1", &names).unwrap(), p);
    }

    #[test]
    fn canonical_text_starred_letters_round_trip() {
        let n = names();
        let p = NCPoly::word(w(&[ls(0), l(1)])) + NCPoly::word(w(&[l(0), ls(1), ls(2)]))
            - NCPoly::term(Scalar::i(), w(&[ls(0)]));
        let text = p.display(&n);
        assert_eq!(text, "alpha*beta**gamma* + alpha**beta + (-1 i)alpha*");
        assert_eq!(NCPoly::parse_canonical(&text, &n).unwrap(), p);
    }

    #[test]
    fn tensor_legs_commute_and_print() {
        let n = names();
        let a0 = NCPoly::letter(l(0));
        let b1 = NCPoly::letter(l(1).on_leg(1));
        assert_eq!(&a0 * &b1, &b1 * &a0);
        let t = &(&a0 * &b1) + &b1;
        assert_eq!(t.display_legs(&n, 2), "alpha (*) beta + 1 (*) beta");
        assert_eq!(NCPoly::parse_canonical(&t.display_legs(&n, 2), &n).unwrap(), t);
    }

    #[test]
    fn star_of_tensor_word_keeps_leg_order() {
        let word = w(&[l(0), l(1), l(2).on_leg(1), ls(1).on_leg(1)]);
        let s = word.star();
        assert_eq!(s.letters(), &[ls(1), ls(0), l(1).on_leg(1), ls(2).on_leg(1)]);
    }

    #[test]
    fn parse_errors_are_located() {
        let n = names();
        let e = NCPoly::parse_canonical("alpha + zeta", &n).unwrap_err();
        assert_eq!(e.column, 9);
    }
}
