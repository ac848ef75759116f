//! Proof scripts and their replay.
//!
//! A script names the graph and functional whose extracted presentation it runs against,
//! followed by steps. Every step asserts `claim ≡ 0` under one rule and may cite earlier steps.

use super::rules::{antipode_transfer, ideal, positivity_split, star_square_zero, Rule};
use super::{DerivationError, Engine};
use crate::free_algebra::{FreeStarElement, Symbol};
use crate::graph::graph_from_shortcut;
use crate::presentations::{extract_graph_relations, Functional, Presentation, PresentationError, Relation};
use crate::scalar::{C, Q};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("graph: {0}")]
    Graph(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub lambda: Q,
    pub x: FreeStarElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub label: String,
    pub rule: Rule,
    pub claim: FreeStarElement,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<WeightedTerm>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofScript {
    pub name: String,
    /// Graph shortcut such as `L3+L2`.
    pub graph: String,
    pub functional: Functional,
    pub level: usize,
    pub degree: usize,
    pub steps: Vec<Step>,
}

impl ProofScript {
    pub fn presentation(&self) -> Result<Presentation, ScriptError> {
        let g = graph_from_shortcut(&self.graph).map_err(|e| ScriptError::Graph(e.to_string()))?;
        Ok(extract_graph_relations(&Arc::new(g), self.functional, self.level)?)
    }
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
    pub fn from_json(s: &str) -> Result<ProofScript, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepStatus {
    Verified,
    Rejected,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub index: usize,
    pub label: String,
    pub rule: Rule,
    pub status: StepStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conclusions: Vec<FreeStarElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub script: String,
    /// Degree the steps were checked at.
    pub degree: usize,
    /// Largest degree that was allowed.
    #[serde(default)]
    pub bound: usize,
    pub steps: Vec<StepReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_step: Option<usize>,
    /// Relations added by the replay, in order.
    pub facts: Vec<Relation>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.failing_step.is_none()
    }
    /// The replayed presentation: the original relations plus every established fact.
    pub fn extended(&self, p: &Presentation) -> Presentation {
        let mut out = p.clone();
        out.name = format!("{} + {}", p.name, self.script);
        out.relations.extend(self.facts.iter().cloned());
        out
    }
    pub fn concluded(&self, x: &FreeStarElement) -> bool {
        self.steps.iter().any(|s| s.status == StepStatus::Verified && s.conclusions.contains(x))
    }
}

fn run_step(engine: &mut Engine, p: &Presentation, index: usize, step: &Step) -> Result<Vec<FreeStarElement>, DerivationError> {
    if let Some(bad) = step.inputs.iter().find(|&&i| i >= index) {
        return Err(DerivationError::RuleRejected(format!("input {bad} is not an earlier step")));
    }
    let label = format!("{} (step {index})", step.label);
    match step.rule {
        Rule::Ideal => {
            if step.claim.is_zero() {
                return Ok(vec![]);
            }
            ideal(engine, &label, &step.claim)
        }
        Rule::PositivitySplit => {
            let terms: Vec<(Q, FreeStarElement)> = step.terms.iter().map(|t| (t.lambda.clone(), t.x.clone())).collect();
            let sum = terms.iter().fold(FreeStarElement::zero(), |a, (l, x)| a.add(&x.adjoint().mul(x).scale(&C::real(l.clone()))));
            if sum != step.claim {
                return Err(DerivationError::RuleRejected("claim is not the weighted sum of the listed squares".into()));
            }
            positivity_split(engine, &label, &terms)
        }
        Rule::StarSquareZero => star_square_zero(engine, &label, &step.claim),
        Rule::AntipodeTransfer => {
            let target = single_generator(&step.claim)
                .ok_or_else(|| DerivationError::RuleRejected("claim must be a single generator".into()))?;
            antipode_transfer(engine, p, &label, &Symbol::new(&target.name, target.col, target.row))
        }
    }
}

fn single_generator(x: &FreeStarElement) -> Option<Symbol> {
    let [(w, c)] = x.sorted_terms()[..] else { return None };
    match w.as_slice() {
        [s] if !s.star && c.is_one() => Some(s.clone()),
        _ => None,
    }
}

/// Replays `script` against `p` at degree `degree`, stopping at the first failing step.
pub fn replay(script: &ProofScript, p: &Presentation, degree: usize) -> Result<ReplayReport, DerivationError> {
    let mut engine = Engine::new(p, degree)?;
    let mut report = ReplayReport { script: script.name.clone(), degree, bound: degree, steps: vec![], failing_step: None, facts: vec![] };
    for (index, step) in script.steps.iter().enumerate() {
        let before = engine.base.len();
        let (status, message, conclusions) = match run_step(&mut engine, p, index, step) {
            Ok(c) => (StepStatus::Verified, None, c),
            Err(DerivationError::RuleRejected(m)) => (StepStatus::Rejected, Some(m), vec![]),
            Err(DerivationError::Unproved(m)) => (StepStatus::Unknown, Some(m), vec![]),
            Err(e @ DerivationError::DegreeOverflow { .. }) => (StepStatus::Unknown, Some(e.to_string()), vec![]),
            Err(e) => return Err(e),
        };
        for b in &engine.base[before..] {
            report.facts.push(Relation { label: b.label.clone(), element: b.element.clone() });
        }
        report.steps.push(StepReport { index, label: step.label.clone(), rule: step.rule, status, message, conclusions });
        if status != StepStatus::Verified {
            report.failing_step = Some(index);
            break;
        }
    }
    Ok(report)
}

/// Replays at increasing degrees up to `bound`, returning the first run that passes.
///
/// Membership only grows with the degree, so the lowest degree that closes every step is used.
/// A rejected step is final; an unknown step retries one degree higher.
pub fn replay_within(script: &ProofScript, p: &Presentation, bound: usize) -> Result<ReplayReport, DerivationError> {
    let needed = script.steps.iter().map(|s| step_degree(s)).chain([p.max_relation_degree()]).max().unwrap_or(0);
    let mut d = needed.min(bound);
    loop {
        let mut r = replay(script, p, d)?;
        r.bound = bound;
        let rejected = r.failing_step.is_some_and(|i| r.steps[i].status == StepStatus::Rejected);
        if r.passed() || rejected || d >= bound {
            return Ok(r);
        }
        d += 1;
    }
}

fn step_degree(s: &Step) -> usize {
    match s.rule {
        Rule::StarSquareZero => 2 * s.claim.degree(),
        _ => s.claim.degree(),
    }
}

fn q(i: usize, j: usize) -> FreeStarElement {
    FreeStarElement::gen("q", i as u32, j as u32)
}

fn sq(i: usize, j: usize) -> FreeStarElement {
    q(i, j).adjoint().mul(&q(i, j))
}

fn sum(xs: impl IntoIterator<Item = FreeStarElement>) -> FreeStarElement {
    xs.into_iter().fold(FreeStarElement::zero(), |a, x| a.add(&x))
}

fn rat(x: &Q) -> C {
    C::real(x.clone())
}

#[derive(Clone, Copy)]
enum Weighting {
    /// `λ_t = 1/n_t − 1/n_l`, row sums from `U^t` unitary.
    Tau,
    /// `λ_t = (1/n_t² − 1/n_l²)·n_t`, row sums from `U^t* F U^t = F`.
    Kms,
}

fn components(ns: &[u32]) -> Result<Vec<(u32, usize)>, ScriptError> {
    if ns.len() < 2 || ns.contains(&0) {
        return Err(ScriptError::Params("need at least two positive loop counts".into()));
    }
    let mut sorted = ns.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    let mut off = 1usize;
    Ok(sorted
        .into_iter()
        .map(|n| {
            let c = (n, off);
            off += n as usize;
            c
        })
        .collect())
}

fn cross_zero_script(name: &str, ns: &[u32], functional: Functional, w: Weighting) -> Result<ProofScript, ScriptError> {
    let comps = components(ns)?;
    let graph = comps.iter().map(|(n, _)| format!("L{n}")).collect::<Vec<_>>().join("+");
    let edges = |t: usize| comps[t].1..comps[t].1 + comps[t].0 as usize;
    let mut steps: Vec<Step> = vec![];
    let m = comps.len();
    for l in 0..m - 1 {
        let nl = Q::int(comps[l].0 as i64);
        let start = steps.len();
        let avg = sum((l..m).flat_map(|t| {
            let inv = rat(&Q::int(comps[t].0 as i64).recip());
            edges(l).flat_map(|k| edges(t).map(move |j| (k, j))).map(|(k, j)| sq(k, j).scale(&inv)).collect::<Vec<_>>()
        }))
        .sub(&FreeStarElement::one());
        steps.push(Step {
            label: format!("component {}: averaged projection identity", l + 1),
            rule: Rule::Ideal,
            claim: avg,
            terms: vec![],
            inputs: (0..start).collect(),
        });
        for k in edges(l) {
            let (claim, label) = match w {
                Weighting::Tau => (sum((l..m).flat_map(|t| edges(t).map(move |j| sq(k, j)))).sub(&FreeStarElement::one()), "row of Ut* Ut"),
                Weighting::Kms => (
                    sum((l..m).flat_map(|t| {
                        let nt = rat(&Q::int(comps[t].0 as i64));
                        edges(t).map(move |j| sq(k, j).scale(&nt))
                    }))
                    .sub(&FreeStarElement::scalar(rat(&nl))),
                    "row of Ut* F Ut",
                ),
            };
            steps.push(Step { label: format!("{label} at q{k}*"), rule: Rule::Ideal, claim, terms: vec![], inputs: (0..start).collect() });
        }
        let mut terms = vec![];
        for t in l + 1..m {
            let nt = Q::int(comps[t].0 as i64);
            let lambda = match w {
                Weighting::Tau => &nt.recip() - &nl.recip(),
                Weighting::Kms => &(&nt.pow(-2) - &nl.pow(-2)) * &nt,
            };
            for k in edges(l) {
                for j in edges(t) {
                    terms.push(WeightedTerm { lambda: lambda.clone(), x: q(k, j) });
                }
            }
        }
        let claim = terms.iter().fold(FreeStarElement::zero(), |a, t| a.add(&t.x.adjoint().mul(&t.x).scale(&rat(&t.lambda))));
        let split = steps.len();
        steps.push(Step {
            label: format!("component {}: weighted cross squares", l + 1),
            rule: Rule::PositivitySplit,
            claim,
            terms: terms.clone(),
            inputs: (start..split).collect(),
        });
        for t in &terms {
            steps.push(Step { label: format!("{} vanishes", t.x), rule: Rule::StarSquareZero, claim: t.x.clone(), terms: vec![], inputs: vec![split] });
        }
        for (n, t) in terms.iter().enumerate() {
            let s = single_generator(&t.x).expect("generator");
            steps.push(Step {
                label: format!("transpose of {}", t.x),
                rule: Rule::AntipodeTransfer,
                claim: q(s.col as usize, s.row as usize),
                terms: vec![],
                inputs: vec![split + 1 + n],
            });
        }
    }
    Ok(ProofScript { name: format!("{name}({})", ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")), graph, functional, level: 1, degree: 4, steps })
}

/// Cross-component entries of `Q_τ^Lin(⊔ L_{n_i})` vanish when the `n_i` are distinct.
pub fn thm31_script(ns: &[u32]) -> Result<ProofScript, ScriptError> {
    cross_zero_script("thm31", ns, Functional::Tau, Weighting::Tau)
}

/// The same conclusion from the direct-sum KMS relations.
pub fn thm33_script(ns: &[u32]) -> Result<ProofScript, ScriptError> {
    cross_zero_script("thm33", ns, Functional::OplusKms, Weighting::Kms)
}

/// Block relations of `Q_τ^Lin(⊔^K L_N)`; `q^{ab}_{ij}` is `q[(a-1)N+i, (b-1)N+j]`.
pub fn thm41_script(n: u32, k: u32) -> Result<ProofScript, ScriptError> {
    if n == 0 || k < 2 {
        return Err(ScriptError::Params("need N ≥ 1 and K ≥ 2".into()));
    }
    let (n, k) = (n as usize, k as usize);
    let qq = |a: usize, b: usize, i: usize, j: usize| q((a - 1) * n + i, (b - 1) * n + j);
    let c = |a: usize, b: usize| sum((1..=n).map(|i| qq(a, b, i, 1).adjoint().mul(&qq(a, b, i, 1))));
    let mut steps = vec![];
    let mut push = |label: String, claim: FreeStarElement| {
        steps.push(Step { label, rule: Rule::Ideal, claim, terms: vec![], inputs: vec![] });
    };
    let pairs = || (1..=k).flat_map(move |a| (1..=k).map(move |b| (a, b)));
    let quads = || (1..=n).flat_map(move |i| (1..=n).flat_map(move |j| (1..=n).flat_map(move |kk| (1..=n).map(move |l| (i, j, kk, l)))));
    for (a, b) in pairs() {
        for j in 1..=n {
            let col = sum((1..=n).map(|i| qq(a, b, i, j).adjoint().mul(&qq(a, b, i, j))));
            let row = sum((1..=n).map(|l| qq(a, b, j, l).mul(&qq(a, b, j, l).adjoint())));
            if j > 1 {
                push(format!("(qs2) c{a}{b} column {j}"), col.sub(&c(a, b)));
            }
            push(format!("(qs2) c{a}{b} row {j}"), row.sub(&c(a, b)));
        }
        for j in 1..=n {
            for kk in 1..=n {
                let lhs = sum((1..=n).map(|i| qq(b, a, j, i).adjoint().mul(&qq(b, a, j, i))));
                let rhs = sum((1..=n).map(|l| qq(b, a, l, kk).mul(&qq(b, a, l, kk).adjoint())));
                push(format!("(qs2') a={a} b={b} j={j} k={kk}"), lhs.sub(&rhs));
            }
        }
    }
    type Family = (&'static str, fn(FreeStarElement, FreeStarElement) -> FreeStarElement, bool);
    let families: [Family; 6] = [
        ("qs3", |x, y| x.mul(&y), false),
        ("qs3'", |x, y| x.mul(&y), true),
        ("qs4", |x, y| x.adjoint().mul(&y), false),
        ("qs4'", |x, y| x.adjoint().mul(&y), true),
        ("qs5", |x, y| x.mul(&y.adjoint()), false),
        ("qs5'", |x, y| x.mul(&y.adjoint()), true),
    ];
    for (tag, f, transposed) in families {
        for a in 1..=k {
            for b in 1..=k {
                for b2 in (1..=k).filter(|&b2| b2 != b) {
                    for (i, j, kk, l) in quads() {
                        let (x, y) = if transposed { (qq(b, a, j, i), qq(b2, a, l, kk)) } else { (qq(a, b, i, j), qq(a, b2, kk, l)) };
                        push(format!("({tag}) a={a} b={b} b'={b2} [{i}{j}{kk}{l}]"), f(x, y));
                    }
                }
            }
        }
    }
    for b in 1..=k {
        push(format!("column sum of c at {b}"), sum((1..=k).map(|x| c(x, b))).sub(&FreeStarElement::one()));
    }
    for a in 1..=k {
        push(format!("row sum of c at {a}"), sum((1..=k).map(|y| c(a, y))).sub(&FreeStarElement::one()));
    }
    for (a, b) in pairs() {
        for a2 in (1..=k).filter(|&a2| a2 != a) {
            push(format!("(ortho) c{a}{b} c{a2}{b}"), c(a, b).mul(&c(a2, b)));
        }
        for b2 in (1..=k).filter(|&b2| b2 != b) {
            push(format!("(ortho) c{a}{b} c{a}{b2}"), c(a, b).mul(&c(a, b2)));
        }
    }
    for (a, b) in pairs() {
        push(format!("c{a}{b} is a projection"), c(a, b).mul(&c(a, b)).sub(&c(a, b)));
    }
    for (a, b) in pairs() {
        for i in 1..=n {
            for j in 1..=n {
                let x = qq(a, b, i, j);
                push(format!("(proj) q[{a}{b}]{i}{j} c{a}{b}"), x.mul(&c(a, b)).sub(&x));
                push(format!("(proj) c{a}{b} q[{a}{b}]{i}{j}"), c(a, b).mul(&x).sub(&x));
            }
        }
    }
    let graph = vec![format!("L{n}"); k].join("+");
    Ok(ProofScript { name: format!("thm41({n},{k})"), graph, functional: Functional::Tau, level: 1, degree: 6, steps })
}

/// Script files shipped with the crate, keyed by theorem name.
pub const BUNDLED: [(&str, &str); 3] = [
    ("thm31", include_str!("../../scripts/thm31_3_2.json")),
    ("thm33", include_str!("../../scripts/thm33_3_2.json")),
    ("thm41", include_str!("../../scripts/thm41_2_2.json")),
];

pub fn bundled(name: &str) -> Option<ProofScript> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| ProofScript::from_json(text).expect("bundled script parses"))
}

/// Generated script for a theorem name and its parameters.
pub fn generate(name: &str, params: &[u32]) -> Result<ProofScript, ScriptError> {
    match (name, params) {
        ("thm31", ns) => thm31_script(ns),
        ("thm33", ns) => thm33_script(ns),
        ("thm41", [n, k]) => thm41_script(*n, *k),
        ("thm41", _) => Err(ScriptError::Params("thm41 takes N,K".into())),
        _ => Err(ScriptError::Params(format!("unknown theorem {name}"))),
    }
}

/// `c_ab = Σ_i (q^{ab}_{i1})* q^{ab}_{i1}` in the block indexing of `⊔^K L_N`.
pub fn block_c(n: u32, a: u32, b: u32) -> FreeStarElement {
    let n = n as usize;
    sum((1..=n).map(|i| {
        let x = q((a as usize - 1) * n + i, (b as usize - 1) * n + 1);
        x.adjoint().mul(&x)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_shapes() {
        let s = thm31_script(&[2, 3]).unwrap();
        assert_eq!(s.graph, "L3+L2");
        let zeros = s.steps.iter().filter(|x| matches!(x.rule, Rule::StarSquareZero | Rule::AntipodeTransfer)).count();
        assert_eq!(zeros, 12);
        let back = ProofScript::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(thm31_script(&[2]).is_err());
        let t = thm41_script(2, 2).unwrap();
        assert_eq!(t.graph, "L2+L2");
        assert!(t.steps.iter().all(|s| s.rule == Rule::Ideal));
    }

    #[test]
    fn bundled_files_match_the_generators() {
        assert_eq!(bundled("thm31").unwrap(), thm31_script(&[3, 2]).unwrap());
        assert_eq!(bundled("thm33").unwrap(), thm33_script(&[3, 2]).unwrap());
        assert_eq!(bundled("thm41").unwrap(), thm41_script(2, 2).unwrap());
        assert!(bundled("thm99").is_none());
    }

    #[test]
    fn equal_parameters_give_a_zero_weight() {
        let s = thm31_script(&[2, 2]).unwrap();
        let split = s.steps.iter().find(|x| x.rule == Rule::PositivitySplit).unwrap();
        assert!(split.terms.iter().all(|t| t.lambda.is_zero()));
        assert!(split.claim.is_zero());
    }
}
