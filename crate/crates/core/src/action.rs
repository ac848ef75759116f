//! Linear actions `α(S_e) = Σ_f S_f ⊗ q_fe` with coefficients in a free *-algebra.

use crate::free_algebra::FreeStarElement;
use crate::graph::{Graph, Path};
use crate::path_algebra::{multiply_terms, raise_to_level, AlgebraElement, Term};
use crate::scalar::C;
use crate::states::{StateError, StateFunctional};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Element of `C*(Γ) ⊗ A` stored as graph terms with free-algebra coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedTensor {
    pub graph: Arc<Graph>,
    pub terms: BTreeMap<Term, FreeStarElement>,
}

impl MixedTensor {
    pub fn zero(g: &Arc<Graph>) -> Self {
        MixedTensor { graph: g.clone(), terms: BTreeMap::new() }
    }
    /// `x ⊗ 1`.
    pub fn from_algebra(x: &AlgebraElement) -> Self {
        let mut t = Self::zero(&x.graph);
        for (k, c) in &x.terms {
            t.add_term(k.clone(), FreeStarElement::scalar(c.clone()));
        }
        t
    }
    pub fn add_term(&mut self, k: Term, c: FreeStarElement) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k.clone()).or_default();
        *e = e.add(&c);
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), c.clone());
        }
        r
    }
    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), c.scale(&C::int(-1)));
        }
        r
    }
    pub fn scale(&self, c: &C) -> Self {
        let mut r = Self::zero(&self.graph);
        for (k, x) in &self.terms {
            r.add_term(k.clone(), x.scale(c));
        }
        r
    }
    pub fn mul(&self, o: &Self) -> Self {
        let g = &self.graph;
        let mut r = Self::zero(g);
        for (t1, c1) in &self.terms {
            for (t2, c2) in &o.terms {
                if let Some(t) = multiply_terms(g, t1, t2) {
                    r.add_term(t, c1.mul(c2));
                }
            }
        }
        r
    }
    pub fn adjoint(&self) -> Self {
        let mut r = Self::zero(&self.graph);
        for ((a, b), c) in &self.terms {
            r.add_term((b.clone(), a.clone()), c.adjoint());
        }
        r
    }
    pub fn max_length(&self) -> usize {
        self.terms.keys().map(|(a, b)| a.len().max(b.len())).max().unwrap_or(0)
    }
    /// First legs saturated to `max(level, longest term)`, so distinct keys are independent.
    pub fn saturate(&self, level: usize) -> Self {
        let g = &self.graph;
        let k = level.max(self.max_length());
        let mut r = Self::zero(g);
        for ((a, b), c) in &self.terms {
            let x = raise_to_level(&AlgebraElement::term(g, a.clone(), b.clone(), C::one()), k);
            for (t, s) in x.terms {
                r.add_term(t, c.scale(&s));
            }
        }
        r
    }
    /// `(φ ⊗ id)` applied to the tensor.
    pub fn apply_state(&self, s: &StateFunctional) -> Result<FreeStarElement, StateError> {
        let mut r = FreeStarElement::zero();
        for ((a, b), c) in &self.terms {
            let v = s.evaluate(&AlgebraElement::term(&self.graph, a.clone(), b.clone(), C::one()))?;
            r = r.add(&c.scale(&v));
        }
        Ok(r)
    }
}

pub fn term_label(g: &Graph, (a, b): &Term) -> String {
    match (a.len(), b.len()) {
        (0, 0) => format!("p_{}", g.vertices[a.start]),
        (_, 0) => format!("S_{}", a.label(g)),
        (0, _) => format!("S_{}*", b.label(g)),
        _ => format!("S_{} S_{}*", a.label(g), b.label(g)),
    }
}

/// `α(S_e) = Σ_f S_f ⊗ q[f][e]`.
#[derive(Debug, Clone)]
pub struct LinearAction {
    pub graph: Arc<Graph>,
    pub q: Vec<Vec<FreeStarElement>>,
}

impl LinearAction {
    pub fn new(graph: Arc<Graph>, q: Vec<Vec<FreeStarElement>>) -> Self {
        LinearAction { graph, q }
    }

    pub fn transpose(&self) -> Self {
        let n = self.q.len();
        LinearAction { graph: self.graph.clone(), q: (0..n).map(|i| (0..n).map(|j| self.q[j][i].clone()).collect()).collect() }
    }

    pub fn s(&self, e: usize) -> MixedTensor {
        let g = &self.graph;
        let mut t = MixedTensor::zero(g);
        for f in 0..g.num_edges() {
            t.add_term((Path::edge(g, f), Path::vertex(g.edges[f].dst)), self.q[f][e].clone());
        }
        t
    }

    pub fn s_star(&self, e: usize) -> MixedTensor {
        self.s(e).adjoint()
    }

    /// Expansion over out-edges, or `α(S_e)*α(S_e)` for the first in-edge of a sink.
    pub fn p(&self, v: usize) -> MixedTensor {
        let g = &self.graph;
        if g.is_sink(v) {
            match g.in_edges(v).first() {
                Some(&e) => self.s_star(e).mul(&self.s(e)),
                None => MixedTensor::zero(g),
            }
        } else {
            g.out_edges(v).into_iter().fold(MixedTensor::zero(g), |acc, e| acc.add(&self.s(e).mul(&self.s_star(e))))
        }
    }

    pub fn one(&self) -> MixedTensor {
        let g = &self.graph;
        (0..g.num_vertices()).fold(MixedTensor::zero(g), |acc, v| acc.add(&self.p(v)))
    }

    pub fn path(&self, p: &Path) -> MixedTensor {
        if p.is_empty() {
            return self.p(p.start);
        }
        let mut t = self.s(p.edges[0]);
        for &e in &p.edges[1..] {
            t = t.mul(&self.s(e));
        }
        t
    }

    /// `α(x)` for a path-algebra element.
    pub fn image(&self, x: &AlgebraElement) -> MixedTensor {
        let g = &self.graph;
        let mut r = MixedTensor::zero(g);
        for ((a, b), c) in &x.terms {
            let t = match (a.is_empty(), b.is_empty()) {
                (true, true) => self.p(a.start),
                (false, true) => self.path(a),
                (true, false) => self.path(b).adjoint(),
                (false, false) => self.path(a).mul(&self.path(b).adjoint()),
            };
            r = r.add(&t.scale(c));
        }
        r
    }

    /// Images of the Cuntz–Krieger relations, the unit, and the degree-2 structural zero
    /// words; each must vanish.
    pub fn relation_images(&self) -> Vec<(String, MixedTensor)> {
        let g = &self.graph;
        let lab = |e: usize| g.edges[e].id.clone();
        let mut out = Vec::new();
        for e in 0..g.num_edges() {
            let lhs = self.s_star(e).mul(&self.s(e));
            out.push((format!("CK S_{0}*S_{0} = p", lab(e)), lhs.sub(&self.p(g.edges[e].dst))));
        }
        out.push(("unit".into(), self.one().sub(&MixedTensor::from_algebra(&AlgebraElement::one(g)))));
        for e in 0..g.num_edges() {
            for f in 0..g.num_edges() {
                let (ee, ff) = (&g.edges[e], &g.edges[f]);
                if ee.dst != ff.src {
                    out.push((format!("zero S_{}S_{}", lab(e), lab(f)), self.s(e).mul(&self.s(f))));
                }
                if ee.dst != ff.dst {
                    out.push((format!("zero S_{}S_{}*", lab(e), lab(f)), self.s(e).mul(&self.s_star(f))));
                }
                if e != f {
                    out.push((format!("zero S_{}*S_{}", lab(e), lab(f)), self.s_star(e).mul(&self.s(f))));
                }
            }
        }
        out
    }

    /// `(φ⊗id)α(x) − φ(x)·1`.
    pub fn preservation_defect(&self, s: &StateFunctional, x: &AlgebraElement) -> Result<FreeStarElement, StateError> {
        let lhs = self.image(x).apply_state(s)?;
        Ok(lhs.sub(&FreeStarElement::scalar(s.evaluate(x)?)))
    }
}

/// Coefficients of a saturated tensor, labelled by relation and first-leg term.
pub fn coefficient_relations(g: &Graph, label: &str, t: &MixedTensor, level: usize) -> Vec<(String, FreeStarElement)> {
    t.saturate(level).terms.into_iter().map(|(k, c)| (format!("{label} @ {}", term_label(g, &k)), c)).collect()
}
