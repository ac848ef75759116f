//! Finite-dimensional representations with exact Gaussian-rational entries, and a structured
//! search for representations separating two presentations.

use crate::free_algebra::{FreeStarElement, Symbol, TensorElement};
use crate::hom_verifier::GeneratorMap;
use crate::linalg::Matrix;
use crate::presentations::Presentation;
use crate::scalar::{Q, C};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("no matrix for generator {0}")]
    Missing(String),
    #[error("matrix for {0} is not {1}x{1}")]
    Size(String, usize),
}

/// Matrices for the plain generators; a starred symbol evaluates to the conjugate transpose.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub name: String,
    pub dim: usize,
    pub images: BTreeMap<Symbol, Matrix>,
}

impl Representation {
    pub fn new(name: impl Into<String>, dim: usize, images: BTreeMap<Symbol, Matrix>) -> Result<Representation, RepError> {
        if let Some((s, _)) = images.iter().find(|(_, m)| m.rows != dim || m.cols != dim) {
            return Err(RepError::Size(s.to_string(), dim));
        }
        Ok(Representation { name: name.into(), dim, images })
    }

    pub fn symbol(&self, s: &Symbol) -> Result<Matrix, RepError> {
        let m = self.images.get(&s.plain()).ok_or_else(|| RepError::Missing(s.to_string()))?;
        Ok(if s.star { m.adjoint() } else { m.clone() })
    }

    pub fn evaluate(&self, x: &FreeStarElement) -> Result<Matrix, RepError> {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for (w, c) in &x.terms {
            let mut m = Matrix::identity(self.dim);
            for s in w {
                m = m.mul(&self.symbol(s)?);
            }
            out = out.add(&m.scale(c));
        }
        Ok(out)
    }

    /// `(ρ ⊗ ρ)(t)` as a Kronecker product.
    pub fn evaluate_tensor(&self, t: &TensorElement) -> Result<Matrix, RepError> {
        let n = self.dim * self.dim;
        let mut out = Matrix::zeros(n, n);
        for ((a, b), c) in &t.terms {
            let ma = self.evaluate(&FreeStarElement::word(a.clone(), C::one()))?;
            let mb = self.evaluate(&FreeStarElement::word(b.clone(), C::one()))?;
            out = out.add(&ma.kron(&mb).scale(c));
        }
        Ok(out)
    }

    /// `ρ ∘ map` as a representation of the map's source.
    pub fn pullback(&self, map: &GeneratorMap, name: impl Into<String>) -> Result<Representation, RepError> {
        let images = map.images.iter().map(|(s, x)| Ok((s.clone(), self.evaluate(x)?))).collect::<Result<_, RepError>>()?;
        Ok(Representation { name: name.into(), dim: self.dim, images })
    }

    /// Entries of the square matrix `name` set to the given `n×n` array of matrices.
    pub fn from_blocks(rep_name: &str, name: &str, blocks: &[Vec<Matrix>]) -> Representation {
        let dim = blocks[0][0].rows;
        let mut images = BTreeMap::new();
        for (i, row) in blocks.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                images.insert(Symbol::new(name, i as u32 + 1, j as u32 + 1), m.clone());
            }
        }
        Representation { name: rep_name.into(), dim, images }
    }

    /// `name_ij = scalars[i][j] · factor`.
    pub fn tensor_pattern(rep_name: &str, name: &str, scalars: &Matrix, factor: &Matrix) -> Representation {
        let blocks: Vec<Vec<Matrix>> = (0..scalars.rows).map(|i| (0..scalars.cols).map(|j| factor.scale(scalars.get(i, j))).collect()).collect();
        Representation::from_blocks(rep_name, name, &blocks)
    }

    /// Images of both representations on disjoint generator sets.
    pub fn merge(&self, other: &Representation, name: &str) -> Result<Representation, RepError> {
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|(k, v)| (k.clone(), v.clone())));
        Representation::new(name, self.dim, images)
    }

    /// The rotation `[[3/5, 4/5], [-4/5, 3/5]]` as a one-dimensional representation of `U_2^+`.
    pub fn rotation_u_plus_2() -> Representation {
        let s = |n: i64| Matrix::from_fn(1, 1, |_, _| C::frac(n, 5));
        Representation::from_blocks("rotation", "q", &[vec![s(3), s(4)], vec![s(-4), s(3)]])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub relation: String,
    pub zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepReport {
    pub passed: bool,
    pub residuals: Vec<Residual>,
}

/// Evaluates every relation of `p`; passing means every residual is exactly zero.
pub fn check_representation(p: &Presentation, r: &Representation) -> Result<RepReport, RepError> {
    for g in p.generators() {
        r.symbol(&g)?;
    }
    let residuals = p
        .relations
        .iter()
        .map(|rel| Ok(Residual { relation: rel.label.clone(), zero: r.evaluate(&rel.element)?.is_zero() }))
        .collect::<Result<Vec<_>, RepError>>()?;
    Ok(RepReport { passed: residuals.iter().all(|x| x.zero), residuals })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub representation: Representation,
    pub violated: String,
    pub residual: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_dim: usize,
    pub max_nodes: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_dim: 2, max_nodes: 2_000_000, seed: 0 }
    }
}

fn phases() -> [C; 4] {
    [C::one(), C::int(-1), C::i(), -C::i()]
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Zero, unimodular multiples of matrix units, and monomial unitaries with entries in `{±1, ±i}`.
pub fn pattern_family(d: usize) -> Vec<Matrix> {
    let mut out = vec![Matrix::zeros(d, d)];
    for i in 0..d {
        for j in 0..d {
            for ph in phases() {
                out.push(Matrix::unit(d, i, j).scale(&ph));
            }
        }
    }
    if d > 1 {
        for p in permutations(d) {
            let mut choice = vec![0usize; d];
            loop {
                out.push(Matrix::from_fn(d, d, |i, j| if p[i] == j { phases()[choice[i]].clone() } else { C::zero() }));
                let mut k = 0;
                while k < d && choice[k] == 3 {
                    choice[k] = 0;
                    k += 1;
                }
                if k == d {
                    break;
                }
                choice[k] += 1;
            }
        }
    }
    out
}

/// Searches for a representation of `pa` violating some relation of `pb`, where `map` sends the
/// generators of `pb` into the algebra of `pa`.
pub fn separate(pa: &Presentation, pb: &Presentation, map: &GeneratorMap, budget: SearchBudget) -> Option<Witness> {
    let gens = pa.generators();
    let pos: BTreeMap<Symbol, usize> = gens.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    // Each relation of pa is checked as soon as its last generator is assigned.
    let mut due: Vec<Vec<usize>> = vec![vec![]; gens.len()];
    for (k, r) in pa.relations.iter().enumerate() {
        let last = r.element.symbols().filter_map(|s| pos.get(&s.plain())).max().copied().unwrap_or(0);
        due[last].push(k);
    }
    let mut nodes = 0usize;
    for d in 1..=budget.max_dim {
        let mut family = pattern_family(d);
        family[1..].shuffle(&mut ChaCha8Rng::seed_from_u64(budget.seed));
        let mut assign: Vec<usize> = vec![];
        let mut rep = Representation { name: format!("pattern search, dim {d}"), dim: d, images: BTreeMap::new() };
        loop {
            if nodes > budget.max_nodes {
                return None;
            }
            // assign.len() generators are fixed; try to extend or backtrack.
            let depth = assign.len();
            let ok = depth == 0 || {
                let k = depth - 1;
                rep.images.insert(gens[k].clone(), family[assign[k]].clone());
                due[k].iter().all(|&r| rep.evaluate(&pa.relations[r].element).map(|m| m.is_zero()).unwrap_or(false))
            };
            nodes += 1;
            if ok && depth == gens.len() {
                for rel in &pb.relations {
                    let m = rep.evaluate(&map.apply(&rel.element)).ok()?;
                    if !m.is_zero() {
                        return Some(Witness { representation: rep, violated: rel.label.clone(), residual: m });
                    }
                }
            }
            if ok && depth < gens.len() {
                assign.push(0);
                continue;
            }
            // advance the last position, popping exhausted ones
            loop {
                match assign.last_mut() {
                    None => break,
                    Some(v) if *v + 1 < family.len() => {
                        *v += 1;
                        break;
                    }
                    Some(_) => {
                        assign.pop();
                        rep.images.remove(&gens[assign.len()]);
                    }
                }
            }
            if assign.is_empty() {
                break;
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub representation: String,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every element claimed to be in the ideal must vanish in a representation of the presentation.
pub fn soundness_probe(elements: &[FreeStarElement], r: &Representation) -> Result<ProbeReport, RepError> {
    let mut violations = vec![];
    for x in elements {
        if !r.evaluate(x)?.is_zero() {
            violations.push(x.to_string());
        }
    }
    Ok(ProbeReport { representation: r.name.clone(), checked: elements.len(), violations })
}

/// Rational rotation by the Pythagorean triple `(a, b, c)`.
pub fn rotation(a: i64, b: i64, c: i64) -> Matrix {
    let v = [[Q::new(a, c), Q::new(b, c)], [Q::new(-b, c), Q::new(a, c)]];
    Matrix::from_fn(2, 2, |i, j| C::real(v[i][j].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{h_inf, s_plus, sh_inf, u_plus};

    fn scalar(x: i64) -> Matrix {
        Matrix::from_fn(1, 1, |_, _| C::int(x))
    }

    fn e(i: usize, j: usize) -> Matrix {
        Matrix::unit(2, i, j)
    }

    pub(crate) fn sh2_witness() -> Representation {
        Representation::from_blocks("E12 pattern", "u", &[vec![e(0, 1), e(1, 0)], vec![e(1, 0), e(0, 1)]])
    }

    #[test]
    fn classical_examples() {
        let perm = Representation::from_blocks("identity", "u", &[vec![scalar(1), scalar(0)], vec![scalar(0), scalar(1)]]);
        assert!(check_representation(&s_plus(2), &perm).unwrap().passed);
        assert!(check_representation(&u_plus(2), &Representation::rotation_u_plus_2()).unwrap().passed);
        let bad = Representation::from_blocks("bad", "q", &[vec![scalar(1), scalar(1)], vec![scalar(0), scalar(1)]]);
        assert!(!check_representation(&u_plus(2), &bad).unwrap().passed);
    }

    #[test]
    fn sh2_pattern_is_not_normal() {
        let r = sh2_witness();
        assert!(check_representation(&sh_inf(2), &r).unwrap().passed);
        let h = check_representation(&h_inf(2), &r).unwrap();
        assert!(h.residuals.iter().any(|x| x.relation == "normal u11" && !x.zero));
    }

    #[test]
    fn search_finds_and_misses() {
        let w = separate(&sh_inf(2), &h_inf(2), &GeneratorMap::identity(&h_inf(2)), SearchBudget::default()).unwrap();
        assert!(w.representation.dim <= 2);
        assert!(check_representation(&sh_inf(2), &w.representation).unwrap().passed);
        assert!(!w.residual.is_zero());
        let again = separate(&sh_inf(2), &h_inf(2), &GeneratorMap::identity(&h_inf(2)), SearchBudget::default()).unwrap();
        assert_eq!(w, again);
        let u = u_plus(2);
        assert!(separate(&u, &u, &GeneratorMap::identity(&u), SearchBudget { max_dim: 1, ..Default::default() }).is_none());
    }

    #[test]
    fn probe_flags_non_members() {
        let r = Representation::rotation_u_plus_2();
        let good = u_plus(2).relations.iter().map(|x| x.element.clone()).collect::<Vec<_>>();
        assert!(soundness_probe(&good, &r).unwrap().passed());
        let bad = vec![FreeStarElement::gen("q", 1, 2)];
        assert!(!soundness_probe(&bad, &r).unwrap().passed());
    }

    #[test]
    fn families_have_expected_sizes() {
        assert_eq!(pattern_family(1).len(), 5);
        assert_eq!(pattern_family(2).len(), 1 + 16 + 32);
        assert!(check_representation(&u_plus(2), &Representation::from_blocks("r", "q", &[vec![rotation(3, 4, 5)]]).clone()).is_err());
    }

    #[test]
    fn tensor_patterns_of_unitaries() {
        let x = Matrix::from_fn(2, 2, |i, j| if i != j { C::one() } else { C::zero() });
        let r = Representation::tensor_pattern("R x X", "q", &rotation(3, 4, 5), &x);
        assert!(check_representation(&u_plus(2), &r).unwrap().passed);
        let z = Matrix::from_fn(2, 2, |i, j| if i != j { C::zero() } else { C::int(1 - 2 * i as i64) });
        let other = Representation::tensor_pattern("Z", "p", &Matrix::identity(2), &z);
        assert_eq!(r.merge(&other, "both").unwrap().images.len(), 8);
    }

    #[test]
    fn normal_block_reps_are_not_commutative() {
        let h = h_inf(2);
        let mut commutative = h.clone();
        let syms: Vec<Symbol> = h.generators().into_iter().flat_map(|s| [s.clone(), s.adjoint()]).collect();
        for (i, a) in syms.iter().enumerate() {
            for b in &syms[i + 1..] {
                let (x, y) = (FreeStarElement::sym(a.clone()), FreeStarElement::sym(b.clone()));
                commutative.push(format!("commute {a} {b}"), x.mul(&y).sub(&y.mul(&x)));
            }
        }
        let w = separate(&h, &commutative, &GeneratorMap::identity(&commutative), SearchBudget { max_dim: 4, ..Default::default() }).unwrap();
        assert!(w.representation.dim <= 4);
        assert!(check_representation(&h, &w.representation).unwrap().passed);
        assert!(w.violated.starts_with("commute"));
    }
}
