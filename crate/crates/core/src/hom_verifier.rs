//! Checks for *-homomorphisms between presentations, linear actions on graph algebras,
//! state and filtration preservation, and coproduct compatibility.
//!
//! Every check is a truncated ideal-membership question. A check that does not reduce to zero
//! is `Unknown` unless a representation is supplied that separates it, in which case it fails
//! with that representation as witness.

use crate::action::{coefficient_relations, term_label, LinearAction, MixedTensor};
use crate::derivation::{DerivationError, Engine};
use crate::free_algebra::{FreeStarElement, Symbol, TensorElement, Word};
use crate::graph::{graph_from_shortcut, parse_graph, Graph};
use crate::linalg::{rref, Matrix};
use crate::path_algebra::{AlgebraElement, Term};
use crate::presentations::Presentation;
use crate::rep_finder::Representation;
use crate::scalar::C;
use crate::states::{level_basis, tau_domain_basis, Filtration, StateError, StateFunctional, StateKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("generator map: {0}")]
    Map(String),
    #[error("{0} has no coproduct")]
    MissingCoproduct(String),
    #[error("action: {0}")]
    Action(String),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Images of the plain generators of a source presentation; starred symbols map to adjoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorMap {
    pub images: BTreeMap<Symbol, FreeStarElement>,
}

impl GeneratorMap {
    pub fn new(source: &Presentation, f: impl Fn(&Symbol) -> FreeStarElement) -> GeneratorMap {
        GeneratorMap { images: source.generators().into_iter().map(|s| (s.clone(), f(&s))).collect() }
    }
    pub fn identity(p: &Presentation) -> GeneratorMap {
        Self::new(p, |s| FreeStarElement::sym(s.clone()))
    }
    pub fn apply(&self, x: &FreeStarElement) -> FreeStarElement {
        x.substitute(&|s: &Symbol| self.images.get(s).cloned().unwrap_or_else(|| FreeStarElement::sym(s.clone())))
    }
    pub fn apply_word(&self, w: &Word) -> FreeStarElement {
        self.apply(&FreeStarElement::word(w.clone(), C::one()))
    }
    /// `other ∘ self`.
    pub fn then(&self, other: &GeneratorMap) -> GeneratorMap {
        GeneratorMap { images: self.images.iter().map(|(k, v)| (k.clone(), other.apply(v))).collect() }
    }
    pub fn validate(&self, source: &Presentation, target: &Presentation) -> Result<(), HomError> {
        for g in source.generators() {
            let img = self.images.get(&g).ok_or_else(|| HomError::Map(format!("no image for {g}")))?;
            if let Some(s) = img.symbols().find(|s| !target.declares(&s.plain())) {
                return Err(HomError::Map(format!("image of {g} uses {s}, not a generator of the target")));
            }
        }
        if let Some(k) = self.images.keys().find(|k| k.star || !source.declares(k)) {
            return Err(HomError::Map(format!("{k} is not a generator of the source")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    fn pass(name: String) -> Check {
        Check { name, status: CheckStatus::Pass, witness: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub overall: CheckStatus,
}

impl VerificationReport {
    pub fn new(checks: Vec<Check>) -> VerificationReport {
        let overall = if checks.iter().any(|c| c.status == CheckStatus::Fail) {
            CheckStatus::Fail
        } else if checks.iter().any(|c| c.status == CheckStatus::Unknown) {
            CheckStatus::Unknown
        } else {
            CheckStatus::Pass
        };
        VerificationReport { checks, overall }
    }
    pub fn passed(&self) -> bool {
        self.overall == CheckStatus::Pass
    }
    pub fn merge(mut self, other: VerificationReport) -> VerificationReport {
        self.checks.extend(other.checks);
        VerificationReport::new(self.checks)
    }
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status != CheckStatus::Pass)
    }
}

fn short(x: &FreeStarElement) -> String {
    let s = x.to_string();
    if s.len() > 200 {
        format!("{}...", &s[..s.char_indices().nth(200).map_or(s.len(), |(i, _)| i)])
    } else {
        s
    }
}

/// Ideal-membership check of `x` in a completed engine, with an optional separating representation.
fn membership(engine: &Engine, name: String, x: &FreeStarElement, refuter: Option<&Representation>) -> Result<Check, HomError> {
    if x.degree() > engine.degree {
        return Ok(Check { name, status: CheckStatus::Unknown, witness: Some(format!("degree {} above the bound {}", x.degree(), engine.degree)) });
    }
    if engine.verdict(x, false)?.derivable() {
        return Ok(Check::pass(name));
    }
    if let Some(r) = refuter {
        if let Ok(m) = r.evaluate(x) {
            if !m.is_zero() {
                return Ok(Check { name, status: CheckStatus::Fail, witness: Some(format!("nonzero in {}: {}", r.name, short(x))) });
            }
        }
    }
    Ok(Check { name, status: CheckStatus::Unknown, witness: Some(format!("not reduced: {}", short(&engine.reduced(x)?))) })
}

fn completed(p: &Presentation, d: usize) -> Result<Engine, HomError> {
    let mut e = Engine::new(p, d)?;
    e.complete()?;
    Ok(e)
}

fn run_checks(engine: &Engine, items: Vec<(String, FreeStarElement)>, refuter: Option<&Representation>) -> Result<Vec<Check>, HomError> {
    items.par_iter().map(|(n, x)| membership(engine, n.clone(), x, refuter)).collect()
}

/// Every relation of `source` maps into the ideal of `target`.
pub fn verify_hom(source: &Presentation, target: &Presentation, map: &GeneratorMap, d: usize) -> Result<VerificationReport, HomError> {
    verify_hom_with(source, target, map, d, None)
}

pub fn verify_hom_with(
    source: &Presentation,
    target: &Presentation,
    map: &GeneratorMap,
    d: usize,
    refuter: Option<&Representation>,
) -> Result<VerificationReport, HomError> {
    map.validate(source, target)?;
    let engine = completed(target, d)?;
    let items = source.relations.iter().map(|r| (format!("relation {}", r.label), map.apply(&r.element))).collect();
    Ok(VerificationReport::new(run_checks(&engine, items, refuter)?))
}

/// `g∘f = id` on the generators of `a` and `f∘g = id` on the generators of `b`.
pub fn verify_mutual_inverse(a: &Presentation, b: &Presentation, f: &GeneratorMap, g: &GeneratorMap, d: usize) -> Result<VerificationReport, HomError> {
    f.validate(a, b)?;
    g.validate(b, a)?;
    let ea = completed(a, d)?;
    let eb = completed(b, d)?;
    let gf = f.then(g);
    let fg = g.then(f);
    let items_a = gf.images.iter().map(|(s, x)| (format!("g(f({s})) = {s}"), x.sub(&FreeStarElement::sym(s.clone())))).collect();
    let items_b = fg.images.iter().map(|(s, x)| (format!("f(g({s})) = {s}"), x.sub(&FreeStarElement::sym(s.clone())))).collect();
    let mut checks = run_checks(&ea, items_a, None)?;
    checks.extend(run_checks(&eb, items_b, None)?);
    Ok(VerificationReport::new(checks))
}

/// Relations in both directions plus mutual inverse: the presentations define the same algebra
/// with the same generators, up to the stated maps.
pub fn verify_two_way(a: &Presentation, b: &Presentation, f: &GeneratorMap, g: &GeneratorMap, d: usize) -> Result<VerificationReport, HomError> {
    let tag = |r: VerificationReport, t: &str| {
        VerificationReport::new(r.checks.into_iter().map(|c| Check { name: format!("{t}: {}", c.name), ..c }).collect())
    };
    let forward = tag(verify_hom(a, b, f, d)?, "forward");
    let backward = tag(verify_hom(b, a, g, d)?, "backward");
    Ok(forward.merge(backward).merge(verify_mutual_inverse(a, b, f, g, d)?))
}

/// `Δ` extended multiplicatively to an element.
pub fn coproduct_of(p: &Presentation, x: &FreeStarElement) -> Result<TensorElement, HomError> {
    let cp = p.coproduct.as_ref().ok_or_else(|| HomError::MissingCoproduct(p.name.clone()))?;
    let one = FreeStarElement::one();
    let mut out = TensorElement::zero();
    for (w, c) in &x.terms {
        let mut t = TensorElement::simple(&one, &one);
        for s in w {
            let d = cp.get(&s.plain()).ok_or_else(|| HomError::MissingCoproduct(s.to_string()))?;
            t = t.mul(&if s.star { d.adjoint() } else { d.clone() });
        }
        out = out.add(&t.scale(c));
    }
    Ok(out)
}

/// `(f⊗f)Δ_src(x) = Δ_tgt(f(x))` modulo `I⊗A + A⊗I` in the target, for each generator `x`.
pub fn verify_coproduct_compat(
    source: &Presentation,
    target: &Presentation,
    map: &GeneratorMap,
    d: usize,
    refuter: Option<&Representation>,
) -> Result<VerificationReport, HomError> {
    map.validate(source, target)?;
    let engine = completed(target, d)?;
    let mut checks = vec![];
    for x in source.generators() {
        let name = format!("coproduct on {x}");
        let lhs = coproduct_of(source, &FreeStarElement::sym(x.clone()))?.map_legs(&|w| map.apply_word(w), &|w| map.apply_word(w));
        let rhs = coproduct_of(target, &map.apply(&FreeStarElement::sym(x.clone())))?;
        let diff = lhs.sub(&rhs);
        if let Some(((a, b), _)) = diff.terms.iter().find(|((a, b), _)| a.len() > d || b.len() > d) {
            checks.push(Check { name, status: CheckStatus::Unknown, witness: Some(format!("leg degree {} above {d}", a.len().max(b.len()))) });
            continue;
        }
        let mut cache: HashMap<Word, FreeStarElement> = HashMap::new();
        let mut nf = |w: &Word| -> Result<FreeStarElement, HomError> {
            if let Some(v) = cache.get(w) {
                return Ok(v.clone());
            }
            let v = engine.reduced(&FreeStarElement::word(w.clone(), C::one()))?;
            cache.insert(w.clone(), v.clone());
            Ok(v)
        };
        let mut reduced = TensorElement::zero();
        for ((a, b), c) in &diff.terms {
            reduced = reduced.add(&TensorElement::simple(&nf(a)?, &nf(b)?).scale(c));
        }
        if reduced.is_zero() {
            checks.push(Check::pass(name));
            continue;
        }
        let separated = refuter.and_then(|r| r.evaluate_tensor(&reduced).ok().filter(|m| !m.is_zero()).map(|_| r.name.clone()));
        let text = reduced.to_string();
        let witness = Some(match &separated {
            Some(n) => format!("nonzero in {n} ⊗ {n}: {}", &text[..text.len().min(200)]),
            None => format!("not reduced: {}", &text[..text.len().min(200)]),
        });
        checks.push(Check { name, status: if separated.is_some() { CheckStatus::Fail } else { CheckStatus::Unknown }, witness });
    }
    Ok(VerificationReport::new(checks))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `α(S_e) = Σ_f S_f ⊗ m[f][e]`.
    #[default]
    Column,
    /// `α(S_e) = Σ_f S_f ⊗ m[e][f]`.
    Row,
}

/// A linear action of a presented algebra on `C*(Γ)`.
#[derive(Debug, Clone)]
pub struct ActionSpec {
    pub graph: Arc<Graph>,
    pub coefficients: Vec<Vec<FreeStarElement>>,
    pub convention: Convention,
    /// Component index per edge when the action is meant to preserve components.
    pub blocks: Option<Vec<usize>>,
}

/// On-disk form of [`ActionSpec`]; `graph` is a shortcut such as `L2+L2` or a graph file body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionFile {
    pub graph: String,
    #[serde(default)]
    pub convention: Convention,
    pub coefficients: Vec<Vec<FreeStarElement>>,
    #[serde(default)]
    pub component_preserving: bool,
}

impl ActionSpec {
    pub fn new(graph: Arc<Graph>, coefficients: Vec<Vec<FreeStarElement>>, convention: Convention) -> Result<ActionSpec, HomError> {
        let n = graph.num_edges();
        if coefficients.len() != n || coefficients.iter().any(|r| r.len() != n) {
            return Err(HomError::Action(format!("coefficient matrix must be {n}x{n}")));
        }
        Ok(ActionSpec { graph, coefficients, convention, blocks: None })
    }
    pub fn from_file(f: &ActionFile) -> Result<ActionSpec, HomError> {
        let g = if f.graph.contains('\n') || f.graph.contains("edge ") { parse_graph(&f.graph) } else { graph_from_shortcut(&f.graph) }
            .map_err(|e| HomError::Action(e.to_string()))?;
        let g = Arc::new(g);
        let mut a = ActionSpec::new(g.clone(), f.coefficients.clone(), f.convention)?;
        if f.component_preserving {
            a.blocks = Some(g.edge_component());
        }
        Ok(a)
    }
    pub fn linear_action(&self) -> LinearAction {
        let q = match self.convention {
            Convention::Column => self.coefficients.clone(),
            Convention::Row => {
                let n = self.coefficients.len();
                (0..n).map(|f| (0..n).map(|e| self.coefficients[e][f].clone()).collect()).collect()
            }
        };
        LinearAction::new(self.graph.clone(), q)
    }
    /// The same action with the matrix transposed and the convention flipped.
    pub fn transposed(&self) -> ActionSpec {
        let n = self.coefficients.len();
        ActionSpec {
            graph: self.graph.clone(),
            coefficients: (0..n).map(|i| (0..n).map(|j| self.coefficients[j][i].clone()).collect()).collect(),
            convention: match self.convention {
                Convention::Column => Convention::Row,
                Convention::Row => Convention::Column,
            },
            blocks: self.blocks.clone(),
        }
    }
}

fn right_multiply(t: &MixedTensor, x: &FreeStarElement) -> MixedTensor {
    let mut r = MixedTensor::zero(&t.graph);
    for (k, c) in &t.terms {
        r.add_term(k.clone(), c.mul(x));
    }
    r
}

/// Cuntz–Krieger relations, the unit and the structural zeros are preserved; Podleś witnesses hold.
pub fn verify_action(spec: &ActionSpec, coefficients: &Presentation, d: usize, level: usize) -> Result<VerificationReport, HomError> {
    if level < 1 {
        return Err(HomError::Action("level must be at least 1".into()));
    }
    let g = &spec.graph;
    let alpha = spec.linear_action();
    let engine = completed(coefficients, d)?;
    let mut items = vec![];
    for (label, t) in alpha.relation_images() {
        items.extend(coefficient_relations(g, &label, &t, level));
    }
    let mut checks = run_checks(&engine, items, None)?;
    let n = g.num_edges();
    let mut podles = vec![];
    for e in 0..n {
        let mut t = MixedTensor::zero(g);
        for f in 0..n {
            t = t.add(&right_multiply(&alpha.s(f), &alpha.q[e][f].adjoint()));
        }
        let t = t.sub(&MixedTensor::from_algebra(&AlgebraElement::s(g, e)));
        podles.extend(coefficient_relations(g, &format!("Podles witness for S_{}", g.edges[e].id), &t, level));
    }
    let mut pc = run_checks(&engine, podles, None)?;
    for c in &mut pc {
        if c.status == CheckStatus::Unknown {
            c.witness = Some(format!("unitary structure not derivable; {}", c.witness.take().unwrap_or_default()));
        }
    }
    checks.extend(pc);
    if let Some(blocks) = &spec.blocks {
        let stray: Vec<String> = (0..n)
            .flat_map(|f| (0..n).map(move |e| (f, e)))
            .filter(|&(f, e)| blocks[f] != blocks[e] && !alpha.q[f][e].is_zero())
            .map(|(f, e)| format!("({},{})", g.edges[f].id, g.edges[e].id))
            .collect();
        checks.push(Check {
            name: "block support".into(),
            status: if stray.is_empty() { CheckStatus::Pass } else { CheckStatus::Fail },
            witness: (!stray.is_empty()).then(|| format!("cross-component entries {}", stray.join(" "))),
        });
    }
    Ok(VerificationReport::new(checks))
}

/// `(φ⊗id)α(x) = φ(x)·1` on the domain of `τ`, or on `F_0, …, F_level` for a state.
pub fn verify_state_preservation(
    spec: &ActionSpec,
    state: &StateFunctional,
    coefficients: &Presentation,
    level: usize,
    d: usize,
) -> Result<VerificationReport, HomError> {
    let g = &spec.graph;
    let alpha = spec.linear_action();
    let basis: Vec<AlgebraElement> = match state.kind {
        StateKind::Tau => tau_domain_basis(g),
        _ => (0..=level).flat_map(|k| level_basis(g, k)).collect(),
    };
    let engine = completed(coefficients, d)?;
    let mut items = vec![];
    for x in &basis {
        items.push((format!("preserve {}", x.display()), alpha.preservation_defect(state, x)?));
    }
    Ok(VerificationReport::new(run_checks(&engine, items, None)?))
}

/// `α(V) ⊂ V ⊗ Q` for each listed subspace, decided after reducing coefficients to normal form.
pub fn verify_subspaces(
    spec: &ActionSpec,
    subspaces: &[(String, Vec<AlgebraElement>)],
    coefficients: &Presentation,
    d: usize,
) -> Result<VerificationReport, HomError> {
    let alpha = spec.linear_action();
    let engine = completed(coefficients, d)?;
    let checks = subspaces
        .par_iter()
        .map(|(label, basis)| subspace_check(&alpha, &engine, label, basis))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VerificationReport::new(checks))
}

/// Every subspace of the filtration is preserved.
pub fn verify_filtration_preservation(spec: &ActionSpec, f: &Filtration, coefficients: &Presentation, d: usize) -> Result<VerificationReport, HomError> {
    let subs: Vec<(String, Vec<AlgebraElement>)> = f.subspaces().into_iter().map(|(l, b)| (l, b.clone())).collect();
    verify_subspaces(spec, &subs, coefficients, d)
}

fn subspace_check(alpha: &LinearAction, engine: &Engine, label: &str, basis: &[AlgebraElement]) -> Result<Check, HomError> {
    let name = format!("preserve {label}");
    if basis.is_empty() {
        return Ok(Check::pass(name));
    }
    let images: Vec<MixedTensor> = basis.iter().map(|x| alpha.image(x)).collect();
    let level = basis.iter().map(AlgebraElement::max_length).chain(images.iter().map(MixedTensor::max_length)).max().unwrap_or(0);
    let raised: Vec<MixedTensor> = basis.iter().map(|x| MixedTensor::from_algebra(x).saturate(level)).collect();
    let images: Vec<MixedTensor> = images.iter().map(|t| t.saturate(level)).collect();
    let mut keys: BTreeSet<Term> = BTreeSet::new();
    for t in raised.iter().chain(&images) {
        keys.extend(t.terms.keys().cloned());
    }
    let keys: Vec<Term> = keys.into_iter().collect();
    let index: HashMap<&Term, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let row_of = |t: &MixedTensor| -> Vec<C> {
        let mut v = vec![C::zero(); keys.len()];
        for (k, c) in &t.terms {
            v[index[k]] = c.terms.get(&Vec::new()).cloned().unwrap_or_else(C::zero);
        }
        v
    };
    let mut rows: Vec<Vec<C>> = raised.iter().map(row_of).collect();
    let base_rank = rref(&Matrix { rows: rows.len(), cols: keys.len(), data: rows.clone() }).1.len();
    let mut by_word: BTreeMap<Word, Vec<C>> = BTreeMap::new();
    for t in &images {
        for (k, c) in &t.terms {
            if c.degree() > engine.degree {
                return Ok(Check { name, status: CheckStatus::Unknown, witness: Some(format!("coefficient degree {} above {}", c.degree(), engine.degree)) });
            }
            let nf = engine.reduced(c)?;
            for (w, a) in &nf.terms {
                let v = by_word.entry(w.clone()).or_insert_with(|| vec![C::zero(); keys.len()]);
                v[index[k]] += a;
            }
        }
        for v in std::mem::take(&mut by_word).into_values() {
            if v.iter().all(C::is_zero) {
                continue;
            }
            rows.push(v);
            let m = Matrix { rows: rows.len(), cols: keys.len(), data: rows.clone() };
            if rref(&m).1.len() > base_rank {
                let bad = rows.pop().expect("pushed");
                let first = bad.iter().position(|c| !c.is_zero()).expect("nonzero");
                return Ok(Check {
                    name,
                    status: CheckStatus::Unknown,
                    witness: Some(format!("image leaves the subspace along {}", term_label(&alpha.graph, &keys[first]))),
                });
            }
            rows.pop();
        }
    }
    Ok(Check::pass(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_algebra::parse_free;
    use crate::graph::graph_from_shortcut;
    use crate::presentations::{free_product, s_plus, u_plus};
    use crate::states::{build_filtration, critical_kms};

    #[test]
    fn identity_maps_pass() {
        for p in [s_plus(3), u_plus(2)] {
            let m = GeneratorMap::identity(&p);
            assert!(verify_hom(&p, &p, &m, p.max_relation_degree()).unwrap().passed());
            assert!(verify_mutual_inverse(&p, &p, &m, &m, 2).unwrap().passed());
        }
        let p = u_plus(2);
        assert!(verify_coproduct_compat(&p, &p, &GeneratorMap::identity(&p), 2, None).unwrap().passed());
    }

    #[test]
    fn bad_maps_are_reported() {
        let p = u_plus(2);
        let m = GeneratorMap::new(&p, |s| if s.row == 1 && s.col == 1 { FreeStarElement::sym(s.clone()) } else { FreeStarElement::zero() });
        let rot = Representation::rotation_u_plus_2();
        let r = verify_coproduct_compat(&p, &p, &m, 2, Some(&rot)).unwrap();
        assert_eq!(r.overall, CheckStatus::Fail);
        let r = verify_hom_with(&p, &p, &m, 2, Some(&rot)).unwrap();
        assert_eq!(r.overall, CheckStatus::Fail);
        let missing = GeneratorMap { images: BTreeMap::new() };
        assert!(verify_hom(&p, &p, &missing, 2).is_err());
    }

    fn block_action(g: &Arc<Graph>) -> ActionSpec {
        // u_plus(2) * u_plus(3) acting blockwise on L2+L3.
        let comp = g.edge_component();
        let offsets = [0usize, 2];
        let n = g.num_edges();
        let q = (0..n)
            .map(|f| {
                (0..n)
                    .map(|e| {
                        if comp[f] != comp[e] {
                            FreeStarElement::zero()
                        } else {
                            let o = offsets[comp[e]];
                            FreeStarElement::gen(&format!("q{}", comp[e] + 1), (f - o + 1) as u32, (e - o + 1) as u32)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut a = ActionSpec::new(g.clone(), q, Convention::Column).unwrap();
        a.blocks = Some(comp);
        a
    }

    #[test]
    fn block_action_on_l2_l3() {
        let g = Arc::new(graph_from_shortcut("L2+L3").unwrap());
        let p = free_product(&[u_plus(2), u_plus(3)]);
        let a = block_action(&g);
        let r = verify_action(&a, &p, 4, 1).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let t = verify_action(&a.transposed(), &p, 4, 1).unwrap();
        assert_eq!(r, t);
        let s = crate::states::direct_sum_kms(&g).unwrap();
        assert!(verify_state_preservation(&a, &s, &p, 1, 4).unwrap().passed());
        let mut broken = a.clone();
        broken.coefficients[0][0] = FreeStarElement::zero();
        assert_ne!(verify_action(&broken, &p, 4, 1).unwrap().overall, CheckStatus::Pass);
    }

    #[test]
    fn scalar_identity_preserves_the_filtration() {
        let g = Arc::new(graph_from_shortcut("L2").unwrap());
        let q = (0..2).map(|f| (0..2).map(|e| FreeStarElement::scalar(if f == e { C::one() } else { C::zero() })).collect()).collect();
        let a = ActionSpec::new(g.clone(), q, Convention::Column).unwrap();
        let f = build_filtration(&critical_kms(&g).unwrap(), 2).unwrap();
        assert!(verify_filtration_preservation(&a, &f, &u_plus(1), 2).unwrap().passed());
        let u = u_plus(2);
        let a = ActionSpec::new(g.clone(), u.fundamental(), Convention::Column).unwrap();
        let r = verify_filtration_preservation(&a, &f, &u, 4).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let x = parse_free("q11").unwrap();
        assert_eq!(GeneratorMap::identity(&u).apply(&x.adjoint()), x.adjoint());
    }
}
