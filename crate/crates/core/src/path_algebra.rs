//! Exact arithmetic in a graph C*-algebra.
//!
//! Elements are finite sums of `S_γ S_μ*` with `r(γ) = r(μ)`. Products use the
//! prefix rule for `S_μ* S_ν`; equality is decided after saturating both sides to a
//! common level with `p_v = Σ_{s(f)=v} S_f S_f*`.

use crate::graph::{Graph, Path};
use crate::linalg::Matrix;
use crate::scalar::C;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("elements live over different graphs")]
    GraphMismatch,
    #[error("graph contains a cycle")]
    Cycle,
    #[error("graph is not a disjoint union of path graphs")]
    NotPathUnion,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Term = (Path, Path);

#[derive(Clone, Debug)]
pub struct AlgebraElement {
    pub graph: Arc<Graph>,
    pub terms: BTreeMap<Term, C>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    EdgeIsometry,
    EdgeCoisometry,
    VertexProjection,
    Unit,
}

impl PartialEq for AlgebraElement {
    /// Literal equality of stored terms; use [`equals`] for equality in the algebra.
    fn eq(&self, o: &AlgebraElement) -> bool {
        self.terms == o.terms
    }
}

impl AlgebraElement {
    pub fn zero(g: &Arc<Graph>) -> AlgebraElement {
        AlgebraElement { graph: g.clone(), terms: BTreeMap::new() }
    }
    pub fn term(g: &Arc<Graph>, gamma: Path, mu: Path, c: C) -> AlgebraElement {
        let mut e = AlgebraElement::zero(g);
        e.add_term(gamma, mu, c);
        e
    }
    pub fn one(g: &Arc<Graph>) -> AlgebraElement {
        let mut e = AlgebraElement::zero(g);
        for v in 0..g.num_vertices() {
            e.add_term(Path::vertex(v), Path::vertex(v), C::one());
        }
        e
    }
    pub fn s(g: &Arc<Graph>, e: usize) -> AlgebraElement {
        AlgebraElement::term(g, Path::edge(g, e), Path::vertex(g.edges[e].dst), C::one())
    }
    pub fn s_star(g: &Arc<Graph>, e: usize) -> AlgebraElement {
        AlgebraElement::term(g, Path::vertex(g.edges[e].dst), Path::edge(g, e), C::one())
    }
    pub fn p(g: &Arc<Graph>, v: usize) -> AlgebraElement {
        AlgebraElement::term(g, Path::vertex(v), Path::vertex(v), C::one())
    }
    /// `S_γ S_μ*` for two paths with a common range.
    pub fn path_term(g: &Arc<Graph>, gamma: &Path, mu: &Path) -> AlgebraElement {
        assert_eq!(gamma.range(g), mu.range(g), "S_γS_μ* needs r(γ) = r(μ)");
        AlgebraElement::term(g, gamma.clone(), mu.clone(), C::one())
    }

    pub fn add_term(&mut self, gamma: Path, mu: Path, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (gamma, mu);
        let entry = self.terms.entry(key.clone()).or_insert_with(C::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn max_length(&self) -> usize {
        self.terms.keys().map(|(g, m)| g.len().max(m.len())).max().unwrap_or(0)
    }

    pub fn add(&self, o: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for ((g, m), c) in &o.terms {
            out.add_term(g.clone(), m.clone(), c.clone());
        }
        out
    }
    pub fn sub(&self, o: &AlgebraElement) -> AlgebraElement {
        self.add(&o.scale(&C::int(-1)))
    }
    pub fn scale(&self, c: &C) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.graph);
        for ((g, m), x) in &self.terms {
            out.add_term(g.clone(), m.clone(), x * c);
        }
        out
    }
    pub fn coefficient(&self, gamma: &Path, mu: &Path) -> C {
        self.terms.get(&(gamma.clone(), mu.clone())).cloned().unwrap_or_else(C::zero)
    }

    pub fn mul(&self, o: &AlgebraElement) -> AlgebraElement {
        multiply(self, o).expect("same graph")
    }
    pub fn adjoint(&self) -> AlgebraElement {
        adjoint(self)
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let g = &self.graph;
        let mut parts = Vec::new();
        for ((gamma, mu), c) in &self.terms {
            let mut word: Vec<String> = gamma.edges.iter().map(|&e| format!("S({})", g.edges[e].id)).collect();
            word.extend(mu.edges.iter().rev().map(|&e| format!("St({})", g.edges[e].id)));
            if word.is_empty() {
                word.push(format!("p({})", g.vertices[gamma.start]));
            }
            let w = word.join("*");
            parts.push(if c.is_one() { w } else { format!("({c})*{w}") });
        }
        parts.join(" + ")
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

pub fn generator(g: &Arc<Graph>, kind: GeneratorKind, id: &str) -> Result<AlgebraElement, AlgebraError> {
    let edge = || g.edge_index(id).ok_or_else(|| AlgebraError::UnknownId(id.to_string()));
    Ok(match kind {
        GeneratorKind::EdgeIsometry => AlgebraElement::s(g, edge()?),
        GeneratorKind::EdgeCoisometry => AlgebraElement::s_star(g, edge()?),
        GeneratorKind::VertexProjection => {
            AlgebraElement::p(g, g.vertex_index(id).ok_or_else(|| AlgebraError::UnknownId(id.to_string()))?)
        }
        GeneratorKind::Unit => AlgebraElement::one(g),
    })
}

/// `(S_γ S_μ*)(S_ν S_λ*)` as a single term or zero.
pub fn multiply_terms(g: &Graph, (gamma, mu): &Term, (nu, lambda): &Term) -> Option<Term> {
    if let Some(rest) = mu.strip_prefix(nu, g) {
        // ν = μ ν'
        return Some((gamma.concat(&rest, g)?, lambda.clone()));
    }
    if let Some(rest) = nu.strip_prefix(mu, g) {
        // μ = ν μ'
        return Some((gamma.clone(), lambda.concat(&rest, g)?));
    }
    None
}

pub fn multiply(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    if !Arc::ptr_eq(&a.graph, &b.graph) && *a.graph != *b.graph {
        return Err(AlgebraError::GraphMismatch);
    }
    let g = &a.graph;
    let mut out = AlgebraElement::zero(g);
    for (t1, c1) in &a.terms {
        for (t2, c2) in &b.terms {
            if let Some((x, y)) = multiply_terms(g, t1, t2) {
                out.add_term(x, y, c1 * c2);
            }
        }
    }
    Ok(out)
}

pub fn adjoint(a: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero(&a.graph);
    for ((g, m), c) in &a.terms {
        out.add_term(m.clone(), g.clone(), c.conj());
    }
    out
}

pub fn raise_to_level(a: &AlgebraElement, k: usize) -> AlgebraElement {
    let g = &a.graph;
    let mut out = AlgebraElement::zero(g);
    let mut stack: Vec<(Term, C)> = a.terms.iter().map(|(t, c)| (t.clone(), c.clone())).collect();
    while let Some(((gamma, mu), c)) = stack.pop() {
        let r = gamma.range(g);
        if gamma.len().min(mu.len()) >= k || g.is_sink(r) {
            out.add_term(gamma, mu, c);
            continue;
        }
        for f in g.out_edges(r) {
            let fp = Path::edge(g, f);
            stack.push(((gamma.concat(&fp, g).unwrap(), mu.concat(&fp, g).unwrap()), c.clone()));
        }
    }
    out
}

pub fn equals(a: &AlgebraElement, b: &AlgebraElement) -> bool {
    let d = a.sub(b);
    raise_to_level(&d, d.max_length()).is_zero()
}

/// Matrix-unit picture of `C*(P_n)`, block diagonal over path components.
pub fn matrix_oracle(a: &AlgebraElement) -> Result<Matrix, AlgebraError> {
    let g = &a.graph;
    let n = g.num_vertices();
    for v in 0..n {
        if g.out_edges(v).len() > 1 || g.in_edges(v).len() > 1 {
            return Err(AlgebraError::NotPathUnion);
        }
    }
    // order vertices along each path; a cycle leaves vertices unvisited
    let mut order = Vec::with_capacity(n);
    for v in 0..n {
        if g.in_edges(v).is_empty() {
            let mut cur = v;
            order.push(cur);
            while let Some(&e) = g.out_edges(cur).first() {
                cur = g.edges[e].dst;
                order.push(cur);
            }
        }
    }
    if order.len() != n {
        return Err(AlgebraError::Cycle);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut m = Matrix::zeros(n, n);
    for ((gamma, mu), c) in &a.terms {
        m.data[pos[gamma.source()]][pos[mu.source()]] += c;
    }
    Ok(m)
}

// ---- literal parser ----

struct Parser<'a> {
    g: &'a Arc<Graph>,
    s: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse { pos: self.pos, msg: msg.to_string() }
    }
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn ident(&mut self) -> String {
        self.skip_ws();
        let st = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_alphanumeric() || "_^.".contains(self.s[self.pos])) {
            self.pos += 1;
        }
        self.s[st..self.pos].iter().collect()
    }
    fn expr(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let mut neg = self.eat('-');
        let mut acc = AlgebraElement::zero(self.g);
        loop {
            let t = self.product()?;
            acc = if neg { acc.sub(&t) } else { acc.add(&t) };
            if self.eat('+') {
                neg = false;
            } else if self.eat('-') {
                neg = true;
            } else {
                return Ok(acc);
            }
        }
    }
    fn product(&mut self) -> Result<AlgebraElement, AlgebraError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if matches!(self.peek(), Some('S' | 'p' | 'o' | '(')) {
                acc = acc.mul(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }
    fn factor(&mut self) -> Result<AlgebraElement, AlgebraError> {
        if self.eat('(') {
            let st = self.pos;
            let mut depth = 1;
            let mut end = st;
            while end < self.s.len() {
                match self.s[end] {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                end += 1;
            }
            let inner: String = self.s[st..end].iter().collect();
            if let Ok(c) = inner.parse::<C>() {
                self.pos = end + 1;
                return Ok(AlgebraElement::one(self.g).scale(&c));
            }
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(e);
        }
        let name = self.ident();
        let g = self.g;
        match name.as_str() {
            "one" => Ok(AlgebraElement::one(g)),
            "S" | "St" | "p" => {
                if !self.eat('(') {
                    return Err(self.err("expected `(`"));
                }
                let id = self.ident();
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                let kind = match name.as_str() {
                    "S" => GeneratorKind::EdgeIsometry,
                    "St" => GeneratorKind::EdgeCoisometry,
                    _ => GeneratorKind::VertexProjection,
                };
                generator(g, kind, &id)
            }
            "" => Err(self.err("expected a factor")),
            other => Err(self.err(&format!("unknown symbol `{other}`"))),
        }
    }
}

/// Parses `S(e1)`, `St(e1)`, `p(v1)`, `one`, `*`, `+`, `-` and scalar prefixes such as `(1/2)`.
pub fn parse_element(g: &Arc<Graph>, text: &str) -> Result<AlgebraElement, AlgebraError> {
    let mut p = Parser { g, s: text.chars().collect(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
