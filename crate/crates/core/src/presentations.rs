//! Presented compact matrix quantum groups and relation extraction from graphs.

use crate::action::{coefficient_relations, LinearAction};
use crate::free_algebra::{FreeStarElement, Symbol, TensorElement, Word};
use crate::graph::Graph;
use crate::path_algebra::AlgebraElement;
use crate::scalar::{C, Q};
use crate::states::{direct_sum_kms, f_gamma_matrix, level_basis, tau, tau_domain_basis, StateError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("relation `{0}` uses undeclared symbol {1}")]
    UndeclaredSymbol(String, String),
    #[error("coproduct missing for {0}")]
    MissingCoproduct(String),
    #[error("F must be diagonal with positive entries")]
    BadF,
    #[error("inner presentation must have exactly one square matrix")]
    BadInner,
    #[error("level must be at least 1")]
    Level,
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenMatrix {
    pub name: String,
    pub rows: u32,
    pub cols: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub label: String,
    #[serde(with = "coef_words")]
    pub element: FreeStarElement,
}

/// `κ(m_ef) = (F_f / F_e) · m_fe*` on one generator matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntipodeRule {
    pub matrix: String,
    pub f: Vec<Q>,
}

impl AntipodeRule {
    /// Image of the plain generator `m[e,f]`.
    pub fn apply(&self, s: &Symbol) -> Option<FreeStarElement> {
        if *s.name != *self.matrix || s.star {
            return None;
        }
        let (e, f) = (s.row as usize - 1, s.col as usize - 1);
        let c = &self.f[f] / &self.f[e];
        Some(FreeStarElement::sym(Symbol::new(&self.matrix, s.col, s.row).adjoint()).scale(&C::real(c)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Presentation {
    pub name: String,
    pub matrices: Vec<GenMatrix>,
    pub relations: Vec<Relation>,
    #[serde(default, with = "coproduct_serde")]
    pub coproduct: Option<BTreeMap<Symbol, TensorElement>>,
    #[serde(default)]
    pub antipode: Vec<AntipodeRule>,
}

impl Presentation {
    pub fn generators(&self) -> Vec<Symbol> {
        self.matrices
            .iter()
            .flat_map(|m| (1..=m.rows).flat_map(move |i| (1..=m.cols).map(move |j| Symbol::new(&m.name, i, j))))
            .collect()
    }
    pub fn matrix(&self, name: &str) -> Option<&GenMatrix> {
        self.matrices.iter().find(|m| m.name == name)
    }
    pub fn declares(&self, s: &Symbol) -> bool {
        self.matrix(&s.name).is_some_and(|m| (1..=m.rows).contains(&s.row) && (1..=m.cols).contains(&s.col))
    }
    pub fn max_relation_degree(&self) -> usize {
        self.relations.iter().map(|r| r.element.degree()).max().unwrap_or(0)
    }
    pub fn validate(&self) -> Result<(), PresentationError> {
        for r in &self.relations {
            if let Some(s) = r.element.symbols().find(|s| !self.declares(s)) {
                return Err(PresentationError::UndeclaredSymbol(r.label.clone(), s.to_string()));
            }
        }
        if let Some(cp) = &self.coproduct {
            for g in self.generators() {
                if !cp.contains_key(&g) {
                    return Err(PresentationError::MissingCoproduct(g.to_string()));
                }
            }
        }
        Ok(())
    }
    pub fn push(&mut self, label: impl Into<String>, element: FreeStarElement) {
        if !element.is_zero() {
            self.relations.push(Relation { label: label.into(), element });
        }
    }
    /// Renames generator matrices by `f`.
    pub fn renamed(&self, f: &dyn Fn(&str) -> String) -> Presentation {
        let sym = |s: &Symbol| Symbol { name: Arc::from(f(&s.name).as_str()), ..s.clone() };
        let word = |w: &Word| w.iter().map(sym).collect::<Word>();
        let elem = |e: &FreeStarElement| {
            let mut r = FreeStarElement::zero();
            for (w, c) in &e.terms {
                r.add_term(word(w), c.clone());
            }
            r
        };
        let tensor = |t: &TensorElement| {
            let mut r = TensorElement::zero();
            for ((a, b), c) in &t.terms {
                r.add_term(word(a), word(b), c.clone());
            }
            r
        };
        Presentation {
            name: self.name.clone(),
            matrices: self.matrices.iter().map(|m| GenMatrix { name: f(&m.name), ..m.clone() }).collect(),
            relations: self.relations.iter().map(|r| Relation { label: r.label.clone(), element: elem(&r.element) }).collect(),
            coproduct: self.coproduct.as_ref().map(|cp| cp.iter().map(|(k, v)| (sym(k), tensor(v))).collect()),
            antipode: self.antipode.iter().map(|a| AntipodeRule { matrix: f(&a.matrix), f: a.f.clone() }).collect(),
        }
    }
    /// Block-diagonal fundamental matrix over all square generator matrices.
    pub fn fundamental(&self) -> Vec<Vec<FreeStarElement>> {
        let n: u32 = self.matrices.iter().filter(|m| m.rows == m.cols).map(|m| m.rows).sum();
        let mut out = vec![vec![FreeStarElement::zero(); n as usize]; n as usize];
        let mut off = 0usize;
        for m in self.matrices.iter().filter(|m| m.rows == m.cols) {
            for i in 1..=m.rows {
                for j in 1..=m.cols {
                    out[off + i as usize - 1][off + j as usize - 1] = FreeStarElement::gen(&m.name, i, j);
                }
            }
            off += m.rows as usize;
        }
        out
    }
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
    pub fn from_json(s: &str) -> Result<Presentation, serde_json::Error> {
        serde_json::from_str(s)
    }
}

fn g(name: &str, i: u32, j: u32) -> FreeStarElement {
    FreeStarElement::gen(name, i, j)
}
fn gs(name: &str, i: u32, j: u32) -> FreeStarElement {
    FreeStarElement::gen_star(name, i, j)
}
fn delta(i: u32, j: u32) -> FreeStarElement {
    if i == j {
        FreeStarElement::one()
    } else {
        FreeStarElement::zero()
    }
}

fn matrix_coproduct(name: &str, n: u32) -> BTreeMap<Symbol, TensorElement> {
    let mut cp = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n {
            let mut t = TensorElement::zero();
            for k in 1..=n {
                t = t.add(&TensorElement::simple(&g(name, i, k), &g(name, k, j)));
            }
            cp.insert(Symbol::new(name, i, j), t);
        }
    }
    cp
}

fn magic_relations(p: &mut Presentation, name: &str, n: u32) {
    for i in 1..=n {
        for j in 1..=n {
            p.push(format!("idempotent {name}{i}{j}"), g(name, i, j).mul(&g(name, i, j)).sub(&g(name, i, j)));
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            p.push(format!("self-adjoint {name}{i}{j}"), gs(name, i, j).sub(&g(name, i, j)));
        }
    }
    for i in 1..=n {
        let row = (1..=n).fold(FreeStarElement::zero(), |a, k| a.add(&g(name, i, k)));
        p.push(format!("row sum {i}"), row.sub(&FreeStarElement::one()));
    }
    for j in 1..=n {
        let col = (1..=n).fold(FreeStarElement::zero(), |a, k| a.add(&g(name, k, j)));
        p.push(format!("column sum {j}"), col.sub(&FreeStarElement::one()));
    }
}

/// Quantum permutation group: magic unitary `u`.
pub fn s_plus(n: u32) -> Presentation {
    let mut p = Presentation {
        name: format!("S_{n}^+"),
        matrices: vec![GenMatrix { name: "u".into(), rows: n, cols: n }],
        relations: vec![],
        coproduct: Some(matrix_coproduct("u", n)),
        antipode: vec![],
    };
    magic_relations(&mut p, "u", n);
    p
}

/// Unitarity of `U` and `U^t` in the twisted form `A_{U^t}(F)` on the matrix `name`.
fn a_ut_relations(p: &mut Presentation, name: &str, f: &[Q]) {
    let n = f.len() as u32;
    let fi = |k: u32| C::real(f[k as usize - 1].clone());
    let sum = |term: &dyn Fn(u32) -> FreeStarElement| (1..=n).fold(FreeStarElement::zero(), |a, k| a.add(&term(k)));
    for i in 1..=n {
        for j in 1..=n {
            let r = sum(&|k| g(name, k, i).mul(&gs(name, k, j)));
            p.push(format!("Ut Ut* [{i},{j}]"), r.sub(&delta(i, j)));
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            let r = sum(&|k| gs(name, i, k).mul(&g(name, j, k)));
            p.push(format!("Ut* Ut [{i},{j}]"), r.sub(&delta(i, j)));
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            let r = sum(&|k| g(name, i, k).mul(&gs(name, j, k)).scale(&(&fi(j) / &fi(k))));
            p.push(format!("U F^-1 U* F [{i},{j}]"), r.sub(&delta(i, j)));
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            let r = sum(&|k| gs(name, k, i).mul(&g(name, k, j)).scale(&(&fi(k) / &fi(i))));
            p.push(format!("F^-1 U* F U [{i},{j}]"), r.sub(&delta(i, j)));
        }
    }
}

pub fn a_ut(f: &[Q]) -> Result<Presentation, PresentationError> {
    if f.is_empty() || f.iter().any(|x| !x.is_positive()) {
        return Err(PresentationError::BadF);
    }
    let n = f.len() as u32;
    let mut p = Presentation {
        name: format!("A_Ut(F), n={n}"),
        matrices: vec![GenMatrix { name: "q".into(), rows: n, cols: n }],
        relations: vec![],
        coproduct: Some(matrix_coproduct("q", n)),
        antipode: vec![AntipodeRule { matrix: "q".into(), f: f.to_vec() }],
    };
    a_ut_relations(&mut p, "q", f);
    Ok(p)
}

pub fn u_plus(n: u32) -> Presentation {
    let mut p = a_ut(&vec![Q::one(); n as usize]).expect("identity F");
    p.name = format!("U_{n}^+");
    p
}

fn bi_unitary(p: &mut Presentation, n: u32) {
    let sum = |term: &dyn Fn(u32) -> FreeStarElement| (1..=n).fold(FreeStarElement::zero(), |a, k| a.add(&term(k)));
    for i in 1..=n {
        for j in 1..=n {
            p.push(format!("u u* [{i},{j}]"), sum(&|k| g("u", i, k).mul(&gs("u", j, k))).sub(&delta(i, j)));
            p.push(format!("u* u [{i},{j}]"), sum(&|k| gs("u", k, i).mul(&g("u", k, j))).sub(&delta(i, j)));
            p.push(format!("ubar ubar* [{i},{j}]"), sum(&|k| gs("u", i, k).mul(&g("u", j, k))).sub(&delta(i, j)));
            p.push(format!("ubar* ubar [{i},{j}]"), sum(&|k| g("u", k, i).mul(&gs("u", k, j))).sub(&delta(i, j)));
        }
    }
}

fn unitary_shell(name: String, n: u32) -> Presentation {
    let mut p = Presentation {
        name,
        matrices: vec![GenMatrix { name: "u".into(), rows: n, cols: n }],
        relations: vec![],
        coproduct: Some(matrix_coproduct("u", n)),
        antipode: vec![],
    };
    bi_unitary(&mut p, n);
    p
}

/// `u` and `ū` unitary with normal partial isometries as entries.
pub fn h_inf(n: u32) -> Presentation {
    let mut p = unitary_shell(format!("H_{n}^inf+"), n);
    for i in 1..=n {
        for j in 1..=n {
            let u = g("u", i, j);
            let us = gs("u", i, j);
            p.push(format!("partial isometry u{i}{j}"), u.mul(&us).mul(&u).sub(&u));
            p.push(format!("normal u{i}{j}"), u.mul(&us).sub(&us.mul(&u)));
        }
    }
    p
}

/// `u` and `ū` unitary with the cross-vanishing form of the partial-isometry condition.
pub fn sh_inf(n: u32) -> Presentation {
    let mut p = unitary_shell(format!("SH_{n}^inf+"), n);
    for k in 1..=n {
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    p.push(format!("cross u{i}{k} u{j}{k}*"), g("u", i, k).mul(&gs("u", j, k)));
                    p.push(format!("cross u{i}{k}* u{j}{k}"), gs("u", i, k).mul(&g("u", j, k)));
                }
            }
        }
    }
    p
}

/// Free product with matrices renamed `{name}{part}`.
pub fn free_product(parts: &[Presentation]) -> Presentation {
    let mut out = Presentation {
        name: parts.iter().map(|p| p.name.clone()).collect::<Vec<_>>().join(" * "),
        matrices: vec![],
        relations: vec![],
        coproduct: Some(BTreeMap::new()),
        antipode: vec![],
    };
    for (k, p) in parts.iter().enumerate() {
        let r = p.renamed(&|n| format!("{n}{}", k + 1));
        out.matrices.extend(r.matrices);
        out.relations.extend(r.relations.into_iter().map(|x| Relation { label: format!("{} #{}", x.label, k + 1), element: x.element }));
        match (&mut out.coproduct, r.coproduct) {
            (Some(cp), Some(rc)) => cp.extend(rc),
            _ => out.coproduct = None,
        }
        out.antipode.extend(r.antipode);
    }
    out
}

/// Free wreath product of `inner` by `S_K^+`; copies are `u1..uK`, the magic unitary is `t`.
pub fn wreath_s_plus(inner: &Presentation, k: u32) -> Result<Presentation, PresentationError> {
    let [m] = inner.matrices.as_slice() else { return Err(PresentationError::BadInner) };
    if m.rows != m.cols {
        return Err(PresentationError::BadInner);
    }
    let n = m.rows;
    let copy = |a: u32| format!("u{a}");
    let mut out = Presentation {
        name: format!("{} wr S_{k}^+", inner.name),
        matrices: vec![],
        relations: vec![],
        coproduct: Some(BTreeMap::new()),
        antipode: vec![],
    };
    for a in 1..=k {
        let r = inner.renamed(&|_| copy(a));
        out.matrices.extend(r.matrices);
        out.relations.extend(r.relations.into_iter().map(|x| Relation { label: format!("{} #{a}", x.label), element: x.element }));
        out.antipode.extend(r.antipode);
    }
    out.matrices.push(GenMatrix { name: "t".into(), rows: k, cols: k });
    let mut magic = Presentation { name: String::new(), matrices: vec![], relations: vec![], coproduct: None, antipode: vec![] };
    magic_relations(&mut magic, "t", k);
    out.relations.extend(magic.relations.into_iter().map(|x| Relation { label: format!("magic {}", x.label), element: x.element }));
    for a in 1..=k {
        for b in 1..=k {
            for i in 1..=n {
                for j in 1..=n {
                    let u = g(&copy(a), i, j);
                    let t = g("t", a, b);
                    out.push(format!("commute u{a}[{i},{j}] t{a}{b}"), u.mul(&t).sub(&t.mul(&u)));
                }
            }
        }
    }
    let cp = out.coproduct.as_mut().unwrap();
    for a in 1..=k {
        for i in 1..=n {
            for j in 1..=n {
                let mut t = TensorElement::zero();
                for c in 1..=k {
                    for kk in 1..=n {
                        t = t.add(&TensorElement::simple(&g(&copy(a), i, kk).mul(&g("t", a, c)), &g(&copy(c), kk, j)));
                    }
                }
                cp.insert(Symbol::new(&copy(a), i, j), t);
            }
        }
    }
    for a in 1..=k {
        for b in 1..=k {
            let t = (1..=k).fold(TensorElement::zero(), |acc, c| acc.add(&TensorElement::simple(&g("t", a, c), &g("t", c, b))));
            cp.insert(Symbol::new("t", a, b), t);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    Tau,
    OplusKms,
}

/// The generic action `α(S_e) = Σ_f S_f ⊗ q[f,e]` with formal coefficients.
pub fn formal_action(g: &Arc<Graph>) -> LinearAction {
    let n = g.num_edges() as u32;
    LinearAction::new(g.clone(), (1..=n).map(|f| (1..=n).map(|e| FreeStarElement::gen("q", f, e)).collect()).collect())
}

/// Defining relations of the linear quantum symmetry group of `g` for the given functional.
pub fn extract_graph_relations(graph: &Arc<Graph>, functional: Functional, level: usize) -> Result<Presentation, PresentationError> {
    if level < 1 {
        return Err(PresentationError::Level);
    }
    let n = graph.num_edges() as u32;
    let f_gamma = f_gamma_matrix(graph)?;
    let alpha = formal_action(graph);
    let mut p = Presentation {
        name: format!("Q_{}^Lin", match functional { Functional::Tau => "tau", Functional::OplusKms => "oplus-kms" }),
        matrices: vec![GenMatrix { name: "q".into(), rows: n, cols: n }],
        relations: vec![],
        coproduct: Some(matrix_coproduct("q", n)),
        antipode: vec![AntipodeRule { matrix: "q".into(), f: f_gamma.clone() }],
    };
    let mut seen = HashSet::new();
    let mut emit = |p: &mut Presentation, label: String, x: FreeStarElement| {
        if x.is_zero() {
            return;
        }
        let lead = x.sorted_terms()[0].1.clone();
        if seen.insert(x.scale(&lead.recip())) {
            p.push(label, x);
        }
    };
    for (label, t) in alpha.relation_images() {
        for (l, x) in coefficient_relations(graph, &label, &t, level) {
            emit(&mut p, l, x);
        }
    }
    let (state, basis): (_, Vec<AlgebraElement>) = match functional {
        Functional::Tau => (tau(graph)?, tau_domain_basis(graph)),
        Functional::OplusKms => {
            let s = direct_sum_kms(graph)?;
            (s, (0..=level).flat_map(|k| level_basis(graph, k)).collect())
        }
    };
    for x in &basis {
        let d = alpha.preservation_defect(&state, x)?;
        emit(&mut p, format!("preserve {}", x.display()), d);
    }
    let mut unit = Presentation { name: String::new(), matrices: vec![], relations: vec![], coproduct: None, antipode: vec![] };
    match functional {
        Functional::Tau => a_ut_relations(&mut unit, "q", &f_gamma),
        Functional::OplusKms => oplus_unitarity(&mut unit, &f_gamma),
    }
    for r in unit.relations {
        emit(&mut p, format!("unitarity {}", r.label), r.element);
    }
    Ok(p)
}

/// `U` unitary, `U^t F^-1 U^t* = F^-1` and `U^t* F U^t = F`.
fn oplus_unitarity(p: &mut Presentation, f: &[Q]) {
    let n = f.len() as u32;
    let fi = |k: u32| C::real(f[k as usize - 1].clone());
    let sum = |term: &dyn Fn(u32) -> FreeStarElement| (1..=n).fold(FreeStarElement::zero(), |a, k| a.add(&term(k)));
    for i in 1..=n {
        for j in 1..=n {
            p.push(format!("U U* [{i},{j}]"), sum(&|k| g("q", i, k).mul(&gs("q", j, k))).sub(&delta(i, j)));
            p.push(format!("U* U [{i},{j}]"), sum(&|k| gs("q", k, i).mul(&g("q", k, j))).sub(&delta(i, j)));
            let r = sum(&|k| g("q", k, i).mul(&gs("q", k, j)).scale(&(&fi(i) / &fi(k))));
            p.push(format!("Ut F^-1 Ut* [{i},{j}]"), r.sub(&delta(i, j)));
            let r = sum(&|k| gs("q", i, k).mul(&g("q", j, k)).scale(&(&fi(k) / &fi(i))));
            p.push(format!("Ut* F Ut [{i},{j}]"), r.sub(&delta(i, j)));
        }
    }
}

mod coef_words {
    use crate::free_algebra::{parse_free, word_to_string, FreeStarElement};
    use crate::scalar::C;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(e: &FreeStarElement, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(String, String)> = e.sorted_terms().into_iter().map(|(w, c)| (c.to_string(), word_to_string(w))).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FreeStarElement, D::Error> {
        let v: Vec<(String, String)> = Vec::deserialize(d)?;
        let mut e = FreeStarElement::zero();
        for (c, w) in v {
            let c: C = c.parse().map_err(serde::de::Error::custom)?;
            let w = parse_free(&w).map_err(serde::de::Error::custom)?;
            e = e.add(&w.scale(&c));
        }
        Ok(e)
    }
}

mod coproduct_serde {
    use crate::free_algebra::{parse_free, word_to_string, Symbol, TensorElement, Word};
    use crate::scalar::C;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    type Wire = BTreeMap<String, Vec<(String, String, String)>>;

    pub fn serialize<S: Serializer>(cp: &Option<BTreeMap<Symbol, TensorElement>>, s: S) -> Result<S::Ok, S::Error> {
        let wire: Option<Wire> = cp.as_ref().map(|m| {
            m.iter()
                .map(|(k, t)| (k.to_string(), t.terms.iter().map(|((a, b), c)| (c.to_string(), word_to_string(a), word_to_string(b))).collect()))
                .collect()
        });
        wire.serialize(s)
    }

    fn word(s: &str) -> Result<Word, String> {
        let e = parse_free(s).map_err(|e| e.to_string())?;
        match e.terms.into_iter().next() {
            Some((w, c)) if c.is_one() => Ok(w),
            _ => Err(format!("not a word: {s}")),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BTreeMap<Symbol, TensorElement>>, D::Error> {
        let wire: Option<Wire> = Option::deserialize(d)?;
        let Some(wire) = wire else { return Ok(None) };
        let mut out = BTreeMap::new();
        for (k, terms) in wire {
            let sym: Symbol = serde_json::from_value(serde_json::Value::String(k)).map_err(serde::de::Error::custom)?;
            let mut t = TensorElement::zero();
            for (c, a, b) in terms {
                let c: C = c.parse().map_err(serde::de::Error::custom)?;
                t.add_term(word(&a).map_err(serde::de::Error::custom)?, word(&b).map_err(serde::de::Error::custom)?, c);
            }
            out.insert(sym, t);
        }
        Ok(Some(out))
    }
}
