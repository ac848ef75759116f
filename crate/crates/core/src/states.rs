//! KMS states at critical temperature, their direct sums, the τ functional and the
//! orthogonal filtration built from them.

use crate::graph::{enumerate_paths, perron, Graph, GraphError, Path};
use crate::linalg::{nullspace, rref, Matrix};
use crate::path_algebra::{raise_to_level, AlgebraElement, Term};
use crate::scalar::{C, Q};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has isolated vertices")]
    Isolated,
    #[error("term {0} is outside the domain of τ")]
    OutsideDomain(String),
    #[error("state is not faithful on the filtration spaces")]
    NotFaithful,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    CriticalKms,
    DirectSumKms,
    Tau,
}

#[derive(Debug, Clone)]
pub struct StateFunctional {
    pub kind: StateKind,
    pub graph: Arc<Graph>,
    /// Inverse temperature data per vertex: φ(S_γS_γ*) = rho[r]^{-|γ|} · weight[r].
    pub rho: Vec<Q>,
    pub weight: Vec<Q>,
    pub faithful: bool,
}

impl StateFunctional {
    pub fn evaluate(&self, x: &AlgebraElement) -> Result<C, StateError> {
        let g = &self.graph;
        let mut acc = C::zero();
        for ((gamma, mu), c) in &x.terms {
            let v = match self.kind {
                StateKind::Tau => tau_term(g, gamma, mu)?,
                _ if gamma != mu => Q::zero(),
                _ => {
                    let r = gamma.range(g);
                    &self.rho[r].pow(-(gamma.len() as i32)) * &self.weight[r]
                }
            };
            acc += &c.scale(&v);
        }
        Ok(acc)
    }

    /// `φ(a* b)`.
    pub fn inner(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<C, StateError> {
        self.evaluate(&a.adjoint().mul(b))
    }
}

fn tau_term(g: &Graph, gamma: &Path, mu: &Path) -> Result<Q, StateError> {
    match (gamma.len(), mu.len()) {
        (0, 0) if gamma.start == mu.start => {
            let v = gamma.start;
            Ok(if g.is_sink(v) { Q::one() } else { Q::int(g.out_edges(v).len() as i64) })
        }
        (1, 1) => Ok(if gamma == mu { Q::one() } else { Q::zero() }),
        _ => Err(StateError::OutsideDomain(format!("({}, {})", gamma.label(g), mu.label(g)))),
    }
}

pub fn critical_kms(g: &Arc<Graph>) -> Result<StateFunctional, StateError> {
    let p = perron(g)?;
    Ok(StateFunctional {
        kind: StateKind::CriticalKms,
        graph: g.clone(),
        rho: vec![p.rho.clone(); g.num_vertices()],
        weight: p.eigenvector.clone(),
        faithful: p.strictly_positive,
    })
}

/// `(1/m) Σ_i φ_i` over the components of `g`.
pub fn direct_sum_kms(g: &Arc<Graph>) -> Result<StateFunctional, StateError> {
    let comps = g.components();
    let m = Q::int(comps.len() as i64);
    let mut rho = vec![Q::zero(); g.num_vertices()];
    let mut weight = vec![Q::zero(); g.num_vertices()];
    let mut faithful = true;
    for c in &comps {
        let sub = g.component_graph(c);
        let p = perron(&sub)?;
        faithful &= p.strictly_positive;
        for (i, &v) in c.vertices.iter().enumerate() {
            rho[v] = p.rho.clone();
            weight[v] = &p.eigenvector[i] / &m;
        }
    }
    Ok(StateFunctional { kind: StateKind::DirectSumKms, graph: g.clone(), rho, weight, faithful })
}

pub fn tau(g: &Arc<Graph>) -> Result<StateFunctional, StateError> {
    if !g.no_isolated_vertices() {
        return Err(StateError::Isolated);
    }
    Ok(StateFunctional {
        kind: StateKind::Tau,
        graph: g.clone(),
        rho: vec![],
        weight: vec![],
        faithful: false,
    })
}

/// Non-source vertices, the `p_u` part of the τ domain.
pub fn tau_vertices(g: &Graph) -> Vec<usize> {
    g.sinks()
}

/// Basis of the τ domain: `p_u` for non-source `u`, then `S_eS_f*` with `r(e) = r(f)`.
pub fn tau_domain_basis(g: &Arc<Graph>) -> Vec<AlgebraElement> {
    let mut out: Vec<AlgebraElement> = tau_vertices(g).into_iter().map(|u| AlgebraElement::p(g, u)).collect();
    for e in 0..g.num_edges() {
        for f in 0..g.num_edges() {
            if g.edges[e].dst == g.edges[f].dst {
                out.push(AlgebraElement::path_term(g, &Path::edge(g, e), &Path::edge(g, f)));
            }
        }
    }
    out
}

/// Diagonal of `F^Γ`: entry `e` is `τ(p_{r(e)})`.
pub fn f_gamma_matrix(g: &Arc<Graph>) -> Result<Vec<Q>, StateError> {
    let t = tau(g)?;
    g.edges
        .iter()
        .map(|e| t.evaluate(&AlgebraElement::p(g, e.dst)).map(|c| c.re))
        .collect()
}

pub fn gram_matrix(s: &StateFunctional, basis: &[AlgebraElement]) -> Result<Matrix, StateError> {
    use rayon::prelude::*;
    let n = basis.len();
    let adj: Vec<AlgebraElement> = basis.iter().map(AlgebraElement::adjoint).collect();
    let rows: Vec<Result<Vec<C>, StateError>> =
        (0..n).into_par_iter().map(|i| (0..n).map(|j| s.evaluate(&adj[i].mul(&basis[j]))).collect()).collect();
    let data = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix { rows: n, cols: n, data })
}

/// Spanning terms of `F_k`: `S_γS_μ*` with `|γ| = |μ| = k` and `r(γ) = r(μ)`.
pub fn level_terms(g: &Graph, k: usize) -> Vec<Term> {
    let paths = enumerate_paths(g, k);
    let mut out = Vec::new();
    for a in &paths {
        for b in &paths {
            if a.range(g) == b.range(g) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

pub fn level_basis(g: &Arc<Graph>, k: usize) -> Vec<AlgebraElement> {
    if k == 0 {
        return vec![AlgebraElement::one(g)];
    }
    level_terms(g, k).into_iter().map(|(a, b)| AlgebraElement::term(g, a, b, C::one())).collect()
}

/// Coordinates of `x` over a fixed term list after raising to `level`.
pub fn coordinates(x: &AlgebraElement, terms: &[Term], level: usize) -> Option<Vec<C>> {
    let r = raise_to_level(x, level);
    let index: BTreeMap<&Term, usize> = terms.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut v = vec![C::zero(); terms.len()];
    for (t, c) in &r.terms {
        v[*index.get(t)?] = c.clone();
    }
    Some(v)
}

/// A maximal linearly independent subfamily, in input order.
pub fn independent_subset(xs: &[AlgebraElement]) -> Vec<AlgebraElement> {
    let Some(first) = xs.first() else { return vec![] };
    let level = xs.iter().map(AlgebraElement::max_length).max().unwrap_or(0);
    let raised: Vec<AlgebraElement> = xs.iter().map(|x| raise_to_level(x, level)).collect();
    let mut keys: Vec<Term> = raised.iter().flat_map(|x| x.terms.keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    let _ = first;
    let mut out = Vec::new();
    let mut rows: Vec<Vec<C>> = Vec::new();
    for (x, r) in xs.iter().zip(&raised) {
        let v: Vec<C> = keys.iter().map(|k| r.terms.get(k).cloned().unwrap_or_else(C::zero)).collect();
        rows.push(v);
        let m = Matrix { rows: rows.len(), cols: keys.len(), data: rows.clone() };
        if rref(&m).1.len() == rows.len() {
            out.push(x.clone());
        } else {
            rows.pop();
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Filtration {
    pub graph: Arc<Graph>,
    pub state: StateFunctional,
    pub max_degree: usize,
    pub w: Vec<Vec<AlgebraElement>>,
    pub m1: BTreeMap<(usize, usize), Vec<AlgebraElement>>,
    pub m2: BTreeMap<(usize, usize), Vec<AlgebraElement>>,
}

impl Filtration {
    /// Every subspace with its label, in a fixed order.
    pub fn subspaces(&self) -> Vec<(String, &Vec<AlgebraElement>)> {
        let mut out: Vec<(String, &Vec<AlgebraElement>)> = self.w.iter().enumerate().map(|(k, b)| (format!("W_{k}"), b)).collect();
        for ((k, l), b) in &self.m1 {
            out.push((format!("M1_{k},{l}"), b));
        }
        for ((k, l), b) in &self.m2 {
            out.push((format!("M2_{k},{l}"), b));
        }
        out
    }
}

/// Basis of `F_k ⊖ F_{k-1}` by exact solving against the Gram matrix.
pub fn orthogonal_layer(s: &StateFunctional, k: usize) -> Result<Vec<AlgebraElement>, StateError> {
    let g = &s.graph;
    if k == 0 {
        return Ok(vec![AlgebraElement::one(g)]);
    }
    let terms = level_terms(g, k);
    let basis = level_basis(g, k);
    let gram = gram_matrix(s, &basis)?;
    let prev = level_basis(g, k - 1);
    let ys: Vec<Vec<C>> = prev.iter().map(|y| coordinates(y, &terms, k).expect("F_{k-1} inside F_k")).collect();
    // rows: y* G
    let a = Matrix::from_fn(ys.len(), terms.len(), |i, j| {
        (0..terms.len()).fold(C::zero(), |acc, t| &acc + &(&ys[i][t].conj() * &gram.data[t][j]))
    });
    Ok(nullspace(&a)
        .into_iter()
        .map(|v| {
            let mut x = AlgebraElement::zero(g);
            for (c, (p, q)) in v.into_iter().zip(&terms) {
                x.add_term(p.clone(), q.clone(), c);
            }
            x
        })
        .collect())
}

pub fn build_filtration(s: &StateFunctional, max_degree: usize) -> Result<Filtration, StateError> {
    if !s.faithful || s.kind == StateKind::Tau {
        return Err(StateError::NotFaithful);
    }
    let g = &s.graph;
    let w = (0..=max_degree).map(|k| orthogonal_layer(s, k)).collect::<Result<Vec<_>, _>>()?;
    let mut m1 = BTreeMap::new();
    let mut m2 = BTreeMap::new();
    for k in 0..=max_degree {
        for l in 1..=max_degree - k {
            let paths: Vec<Path> = enumerate_paths(g, l);
            let mut left = Vec::new();
            let mut right = Vec::new();
            for x in &w[k] {
                for mu in &paths {
                    let sm = AlgebraElement::path_term(g, mu, &Path::vertex(mu.range(g)));
                    let a = sm.mul(x);
                    if !a.is_zero() {
                        left.push(a);
                    }
                    let b = x.mul(&sm.adjoint());
                    if !b.is_zero() {
                        right.push(b);
                    }
                }
            }
            m1.insert((k, l), independent_subset(&left));
            m2.insert((k, l), independent_subset(&right));
        }
    }
    Ok(Filtration { graph: g.clone(), state: s.clone(), max_degree, w, m1, m2 })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityFailure {
    pub left: String,
    pub right: String,
    pub a: String,
    pub b: String,
    pub value: C,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationReport {
    pub unit_layer_ok: bool,
    pub subspace_pairs_checked: usize,
    pub failures: Vec<OrthogonalityFailure>,
}

impl FiltrationReport {
    pub fn passed(&self) -> bool {
        self.unit_layer_ok && self.failures.is_empty()
    }
}

/// Checks `W_0 = ℂ1` and `φ(a*b) = 0` across distinct subspaces of degree at most `max_degree`.
pub fn verify_filtration(f: &Filtration, max_degree: usize) -> Result<FiltrationReport, StateError> {
    let g = &f.graph;
    let unit_layer_ok = f.w.first().is_some_and(|w0| w0.len() == 1 && crate::path_algebra::equals(&w0[0], &AlgebraElement::one(g)));
    let within = |name: &str| -> bool {
        let nums: Vec<usize> = name.split(|c: char| !c.is_ascii_digit()).filter(|s| !s.is_empty()).map(|s| s.parse().unwrap()).collect();
        match name.chars().next() {
            Some('W') => nums[0] <= max_degree,
            _ => nums[1] + nums[2] <= max_degree,
        }
    };
    let subs: Vec<(String, &Vec<AlgebraElement>)> = f.subspaces().into_iter().filter(|(n, _)| within(n)).collect();
    let mut failures = Vec::new();
    let mut pairs = 0;
    for i in 0..subs.len() {
        for j in i + 1..subs.len() {
            pairs += 1;
            for a in subs[i].1 {
                for b in subs[j].1 {
                    let v = f.state.inner(a, b)?;
                    if !v.is_zero() {
                        failures.push(OrthogonalityFailure {
                            left: subs[i].0.clone(),
                            right: subs[j].0.clone(),
                            a: a.display(),
                            b: b.display(),
                            value: v,
                        });
                    }
                }
            }
        }
    }
    Ok(FiltrationReport { unit_layer_ok, subspace_pairs_checked: pairs, failures })
}
