//! The standard generator maps between graph symmetry presentations and their closed forms.

use crate::derivation::script::block_c;
use crate::free_algebra::{FreeStarElement, Symbol};
use crate::hom_verifier::GeneratorMap;
use std::collections::BTreeMap;

fn square(name: &str, n: u32, f: impl Fn(u32, u32) -> FreeStarElement) -> GeneratorMap {
    let mut images = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n {
            images.insert(Symbol::new(name, i, j), f(i, j));
        }
    }
    GeneratorMap { images }
}

/// `from_ij ↦ to_ij`, or `to_ji` when `transpose` is set.
pub fn rename(from: &str, to: &str, n: u32, transpose: bool) -> GeneratorMap {
    square(from, n, |i, j| if transpose { FreeStarElement::gen(to, j, i) } else { FreeStarElement::gen(to, i, j) })
}

/// `q^{ab}_{ij} ↦ u^a_{ij} t_{ab}` from the `⊔^K L_N` presentation into the free wreath product.
pub fn wreath_phi(n: u32, k: u32) -> GeneratorMap {
    square("q", n * k, |r, c| {
        let (a, i) = ((r - 1) / n + 1, (r - 1) % n + 1);
        let (b, j) = ((c - 1) / n + 1, (c - 1) % n + 1);
        FreeStarElement::gen(&format!("u{a}"), i, j).mul(&FreeStarElement::gen("t", a, b))
    })
}

/// `u^a_{ij} ↦ Σ_b q^{ab}_{ij}` and `t_{ab} ↦ c_{ab}`.
pub fn wreath_psi(n: u32, k: u32) -> GeneratorMap {
    let mut images = BTreeMap::new();
    for a in 1..=k {
        for i in 1..=n {
            for j in 1..=n {
                let x = (1..=k).fold(FreeStarElement::zero(), |acc, b| acc.add(&FreeStarElement::gen("q", (a - 1) * n + i, (b - 1) * n + j)));
                images.insert(Symbol::new(&format!("u{a}"), i, j), x);
            }
        }
        for b in 1..=k {
            images.insert(Symbol::new("t", a, b), block_c(n, a, b));
        }
    }
    GeneratorMap { images }
}

/// Coefficient matrix `w[f][e] = u^a_{ij} t_{ab}` for `f = (a, i)`, `e = (b, j)`.
pub fn wreath_coefficients(n: u32, k: u32) -> Vec<Vec<FreeStarElement>> {
    let phi = wreath_phi(n, k);
    (1..=n * k).map(|f| (1..=n * k).map(|e| phi.images[&Symbol::new("q", f, e)].clone()).collect()).collect()
}

fn offsets(ns: &[u32]) -> Vec<u32> {
    ns.iter().scan(0, |acc, &n| {
        let o = *acc;
        *acc += n;
        Some(o)
    }).collect()
}

/// Diagonal blocks of `q` to the factors `q1, q2, …` of a free product; cross entries to zero.
pub fn block_split(ns: &[u32]) -> GeneratorMap {
    let offs = offsets(ns);
    let total = ns.iter().sum();
    let block = |r: u32| offs.iter().zip(ns).position(|(&o, &n)| r > o && r <= o + n).expect("index in range");
    square("q", total, |r, c| {
        let (a, b) = (block(r), block(c));
        if a == b {
            FreeStarElement::gen(&format!("q{}", a + 1), r - offs[a], c - offs[a])
        } else {
            FreeStarElement::zero()
        }
    })
}

/// Each factor `q_t` of the free product onto its diagonal block of `q`.
pub fn block_join(ns: &[u32]) -> GeneratorMap {
    let mut images = BTreeMap::new();
    for (t, (&n, o)) in ns.iter().zip(offsets(ns)).enumerate() {
        images.extend(square(&format!("q{}", t + 1), n, |i, j| FreeStarElement::gen("q", i + o, j + o)).images);
    }
    GeneratorMap { images }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting_then_joining_is_the_block_projection() {
        let s = block_split(&[3, 2]);
        let j = block_join(&[3, 2]);
        assert_eq!(s.images.len(), 25);
        assert!(s.images[&Symbol::new("q", 1, 4)].is_zero());
        assert_eq!(s.images[&Symbol::new("q", 5, 4)], FreeStarElement::gen("q2", 2, 1));
        let back = j.then(&s);
        assert!(back.images.iter().all(|(k, v)| *v == FreeStarElement::sym(k.clone())));
    }

    #[test]
    fn wreath_maps_compose_on_generators() {
        let phi = wreath_phi(2, 2);
        let expected = FreeStarElement::gen("u2", 1, 2).mul(&FreeStarElement::gen("t", 2, 1));
        assert_eq!(phi.images[&Symbol::new("q", 3, 2)], expected);
        let psi = wreath_psi(2, 2);
        assert_eq!(psi.images.len(), 12);
        assert_eq!(wreath_coefficients(2, 2)[2][1], phi.images[&Symbol::new("q", 3, 2)]);
    }
}
