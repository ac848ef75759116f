//! Free *-algebras on matrix-arranged generators, and their tensor squares.
//!
//! A symbol is `name[row,col]` with an optional adjoint flag. Words multiply by
//! concatenation; the adjoint reverses a word and flips every flag.

use crate::scalar::C;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: Arc<str>,
    pub row: u32,
    pub col: u32,
    pub star: bool,
}

impl Symbol {
    pub fn new(name: &str, row: u32, col: u32) -> Symbol {
        Symbol { name: Arc::from(name), row, col, star: false }
    }
    pub fn adjoint(&self) -> Symbol {
        Symbol { star: !self.star, ..self.clone() }
    }
    pub fn plain(&self) -> Symbol {
        Symbol { star: false, ..self.clone() }
    }
}

fn compact_ok(name: &str, row: u32, col: u32) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphabetic()) && name != "i" && (1..10).contains(&row) && (1..10).contains(&col)
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if compact_ok(&self.name, self.row, self.col) {
            write!(f, "{}{}{}", self.name, self.row, self.col)?;
        } else {
            write!(f, "{}[{},{}]", self.name, self.row, self.col)?;
        }
        if self.star {
            write!(f, "^*")?;
        }
        Ok(())
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Symbol, D::Error> {
        let s = String::deserialize(d)?;
        let e = parse_free(&s).map_err(serde::de::Error::custom)?;
        match e.terms.iter().next() {
            Some((w, c)) if e.terms.len() == 1 && w.len() == 1 && c.is_one() => Ok(w[0].clone()),
            _ => Err(serde::de::Error::custom(format!("not a symbol: {s}"))),
        }
    }
}

pub type Word = Vec<Symbol>;

pub fn word_adjoint(w: &[Symbol]) -> Word {
    w.iter().rev().map(Symbol::adjoint).collect()
}

pub fn word_to_string(w: &[Symbol]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("*")
}

/// Degree-then-lexicographic comparison.
pub fn deglex(a: &[Symbol], b: &[Symbol]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FreeStarElement {
    pub terms: BTreeMap<Word, C>,
}

impl FreeStarElement {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn one() -> Self {
        Self::scalar(C::one())
    }
    pub fn scalar(c: C) -> Self {
        Self::word(vec![], c)
    }
    pub fn word(w: Word, c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }
    pub fn sym(s: Symbol) -> Self {
        Self::word(vec![s], C::one())
    }
    pub fn gen(name: &str, row: u32, col: u32) -> Self {
        Self::sym(Symbol::new(name, row, col))
    }
    pub fn gen_star(name: &str, row: u32, col: u32) -> Self {
        Self::sym(Symbol::new(name, row, col).adjoint())
    }
    pub fn add_term(&mut self, w: Word, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        r
    }
    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), -c.clone());
        }
        r
    }
    pub fn scale(&self, c: &C) -> Self {
        let mut r = Self::zero();
        for (w, d) in &self.terms {
            r.add_term(w.clone(), d * c);
        }
        r
    }
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                let mut w = a.clone();
                w.extend(b.iter().cloned());
                r.add_term(w, c * d);
            }
        }
        r
    }
    pub fn adjoint(&self) -> Self {
        let mut r = Self::zero();
        for (w, c) in &self.terms {
            r.add_term(word_adjoint(w), c.conj());
        }
        r
    }
    /// Terms sorted by decreasing degree-lexicographic order.
    pub fn sorted_terms(&self) -> Vec<(&Word, &C)> {
        let mut v: Vec<(&Word, &C)> = self.terms.iter().collect();
        v.sort_by(|a, b| deglex(b.0, a.0));
        v
    }
    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.terms.keys().flatten()
    }
    /// Replaces every symbol by an element; adjoint symbols get the adjoint image.
    pub fn substitute(&self, f: &dyn Fn(&Symbol) -> FreeStarElement) -> FreeStarElement {
        let mut r = Self::zero();
        for (w, c) in &self.terms {
            let mut acc = Self::scalar(c.clone());
            for s in w {
                let img = if s.star { f(&s.plain()).adjoint() } else { f(s) };
                acc = acc.mul(&img);
                if acc.is_zero() {
                    break;
                }
            }
            r = r.add(&acc);
        }
        r
    }
}

/// Sign-stripped coefficient text and whether the sign was negative.
fn coef_prefix(c: &C) -> (String, bool) {
    let neg_real = c.im.is_zero() && c.re.is_negative();
    let neg_imag = c.re.is_zero() && c.im.is_negative();
    if neg_real || neg_imag {
        (format!("{}", -c.clone()), true)
    } else {
        (format!("{c}"), false)
    }
}

impl fmt::Display for FreeStarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.sorted_terms().into_iter().enumerate() {
            let (txt, neg) = coef_prefix(c);
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let complex = !c.re.is_zero() && !c.im.is_zero();
            let coef = if complex { format!("({txt})") } else { txt };
            if w.is_empty() {
                write!(f, "{coef}")?;
            } else if coef == "1" {
                write!(f, "{}", word_to_string(w))?;
            } else {
                write!(f, "{coef}*{}", word_to_string(w))?;
            }
        }
        Ok(())
    }
}

impl Serialize for FreeStarElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FreeStarElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_free(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {pos}: {msg}")]
pub struct FreeParseError {
    pub pos: usize,
    pub msg: String,
}

/// Parses `q11*q12^* - 1/2*u[1,2]`, `(q11 + q12)^*`, `i*q21`.
pub fn parse_free(text: &str) -> Result<FreeStarElement, FreeParseError> {
    let mut p = Parser { s: text.as_bytes(), i: 0 };
    let e = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, m: &str) -> FreeParseError {
        FreeParseError { pos: self.i, msg: m.into() }
    }
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }
    fn expr(&mut self) -> Result<FreeStarElement, FreeParseError> {
        let mut acc = FreeStarElement::zero();
        let mut sign = C::one();
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                sign = C::int(-1);
            }
            Some(b'+') => self.i += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(&sign));
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    sign = C::one();
                }
                Some(b'-') => {
                    self.i += 1;
                    sign = C::int(-1);
                }
                _ => return Ok(acc),
            }
        }
    }
    fn term(&mut self) -> Result<FreeStarElement, FreeParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => acc = acc.mul(&self.factor()?),
                _ => return Ok(acc),
            }
        }
    }
    fn postfix(&mut self, mut e: FreeStarElement) -> FreeStarElement {
        loop {
            self.ws();
            if self.s[self.i..].starts_with(b"^*") {
                self.i += 2;
                e = e.adjoint();
            } else if self.s.get(self.i) == Some(&b'\'') {
                self.i += 1;
                e = e.adjoint();
            } else {
                return e;
            }
        }
    }
    fn number(&mut self) -> Result<C, FreeParseError> {
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'/') {
            self.i += 1;
        }
        let t = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        t.parse::<C>().map_err(|_| FreeParseError { pos: start, msg: format!("bad number {t}") })
    }
    fn factor(&mut self) -> Result<FreeStarElement, FreeParseError> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected )"));
                }
                self.i += 1;
                Ok(self.postfix(e))
            }
            Some(c) if c.is_ascii_digit() => Ok(FreeStarElement::scalar(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
                    self.i += 1;
                }
                let ident = std::str::from_utf8(&self.s[start..self.i]).unwrap().to_string();
                let sym = if self.s.get(self.i) == Some(&b'[') {
                    self.i += 1;
                    let r = self.index()?;
                    if self.peek() != Some(b',') {
                        return Err(self.err("expected ,"));
                    }
                    self.i += 1;
                    let c = self.index()?;
                    if self.peek() != Some(b']') {
                        return Err(self.err("expected ]"));
                    }
                    self.i += 1;
                    Symbol::new(&ident, r, c)
                } else if ident == "i" {
                    return Ok(self.postfix(FreeStarElement::scalar(C::i())));
                } else {
                    let split = ident.find(|c: char| c.is_ascii_digit()).ok_or_else(|| FreeParseError { pos: start, msg: format!("symbol {ident} lacks indices") })?;
                    let (name, digits) = ident.split_at(split);
                    if digits.len() != 2 || !digits.bytes().all(|b| b.is_ascii_digit()) || name.is_empty() {
                        return Err(FreeParseError { pos: start, msg: format!("ambiguous symbol {ident}; use name[row,col]") });
                    }
                    let d = digits.as_bytes();
                    Symbol::new(name, (d[0] - b'0') as u32, (d[1] - b'0') as u32)
                };
                Ok(self.postfix(FreeStarElement::sym(sym)))
            }
            _ => Err(self.err("expected factor")),
        }
    }
    fn index(&mut self) -> Result<u32, FreeParseError> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().map_err(|_| FreeParseError { pos: start, msg: "bad index".into() })
    }
}

/// Elements of `A ⊗ B` for free algebras, stored in bilinear normal form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorElement {
    pub terms: BTreeMap<(Word, Word), C>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn simple(a: &FreeStarElement, b: &FreeStarElement) -> Self {
        let mut r = Self::zero();
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                r.add_term(wa.clone(), wb.clone(), ca * cb);
            }
        }
        r
    }
    pub fn add_term(&mut self, a: Word, b: Word, c: C) {
        if c.is_zero() {
            return;
        }
        let k = (a, b);
        let v = self.terms.entry(k.clone()).or_insert_with(C::zero);
        *v += &c;
        if v.is_zero() {
            self.terms.remove(&k);
        }
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for ((a, b), c) in &o.terms {
            r.add_term(a.clone(), b.clone(), c.clone());
        }
        r
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&C::int(-1)))
    }
    pub fn scale(&self, c: &C) -> Self {
        let mut r = Self::zero();
        for ((a, b), d) in &self.terms {
            r.add_term(a.clone(), b.clone(), d * c);
        }
        r
    }
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for ((a, b), c) in &self.terms {
            for ((x, y), d) in &o.terms {
                let mut l = a.clone();
                l.extend(x.iter().cloned());
                let mut m = b.clone();
                m.extend(y.iter().cloned());
                r.add_term(l, m, c * d);
            }
        }
        r
    }
    pub fn adjoint(&self) -> Self {
        let mut r = Self::zero();
        for ((a, b), c) in &self.terms {
            r.add_term(word_adjoint(a), word_adjoint(b), c.conj());
        }
        r
    }
    /// Applies linear maps to each leg; each leg map sends a word to an element.
    pub fn map_legs(&self, f: &dyn Fn(&Word) -> FreeStarElement, g: &dyn Fn(&Word) -> FreeStarElement) -> Self {
        let mut r = Self::zero();
        for ((a, b), c) in &self.terms {
            r = r.add(&Self::simple(&f(a), &g(b)).scale(c));
        }
        r
    }
    /// Groups the second legs by first-leg word.
    pub fn by_first_leg(&self) -> BTreeMap<Word, FreeStarElement> {
        let mut out: BTreeMap<Word, FreeStarElement> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            out.entry(a.clone()).or_default().add_term(b.clone(), c.clone());
        }
        out
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|((a, b), c)| format!("({c})*{}⊗{}", word_to_string(a), word_to_string(b))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_forms() {
        let a = parse_free("q11*q12^* - 1/2*u[1,2]").unwrap();
        assert_eq!(a.terms.len(), 2);
        let b = parse_free("(q11 + q12)^*").unwrap();
        assert_eq!(b, parse_free("q11' + q12^*").unwrap());
        let c = parse_free("i*q21 q21").unwrap();
        assert_eq!(c.terms.values().next().unwrap(), &C::i());
        assert!(parse_free("u111").is_err());
        assert_eq!(parse_free("u1[1,2]").unwrap(), FreeStarElement::gen("u1", 1, 2));
        assert_eq!(parse_free("2 - 2").unwrap(), FreeStarElement::zero());
    }

    #[test]
    fn display_examples() {
        assert_eq!(parse_free("q11 q12^* - 1").unwrap().to_string(), "q11*q12^* - 1");
        assert_eq!(parse_free("u1[1,2] + (1+i) t11").unwrap().to_string(), "u1[1,2] + (1+1i)*t11");
    }

    fn sym() -> impl Strategy<Value = Symbol> {
        (prop_oneof![Just("q"), Just("u1"), Just("t")], 1u32..3, 1u32..3, any::<bool>())
            .prop_map(|(n, r, c, s)| Symbol { name: Arc::from(n), row: r, col: c, star: s })
    }

    fn elem() -> impl Strategy<Value = FreeStarElement> {
        proptest::collection::vec((proptest::collection::vec(sym(), 0..4), -3i64..4, -2i64..3, 1i64..4), 0..4).prop_map(|ts| {
            let mut e = FreeStarElement::zero();
            for (w, a, b, d) in ts {
                e.add_term(w, C::new(crate::scalar::Q::new(a, d), crate::scalar::Q::int(b)));
            }
            e
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(e in elem()) {
            prop_assert_eq!(parse_free(&e.to_string()).unwrap(), e);
        }

        #[test]
        fn adjoint_is_involutive_antihomomorphism(a in elem(), b in elem()) {
            prop_assert_eq!(a.adjoint().adjoint(), a.clone());
            prop_assert_eq!(a.mul(&b).adjoint(), b.adjoint().mul(&a.adjoint()));
        }

        #[test]
        fn tensor_mul_is_bilinear(a in elem(), b in elem(), c in elem()) {
            let x = TensorElement::simple(&a, &b);
            let y = TensorElement::simple(&c, &b);
            prop_assert_eq!(x.mul(&y), TensorElement::simple(&a.mul(&c), &b.mul(&b)));
        }
    }
}
