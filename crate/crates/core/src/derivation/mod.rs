//! Truncated *-ideal membership over presentations, inference rules, and proof-script replay.

pub mod gb;
pub mod rules;
pub mod script;

use crate::free_algebra::{word_to_string, FreeStarElement, Symbol, Word};
use crate::presentations::Presentation;
use crate::scalar::C;
use gb::{Gb, GbError, LWord, Mono, Poly};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

pub const DEFAULT_MAX_MONOMIALS: usize = 20_000_000;

/// Cap on stored monomials, from `CSW_MAX_MONOMIALS` when set.
pub fn monomial_cap() -> usize {
    std::env::var("CSW_MAX_MONOMIALS").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MAX_MONOMIALS)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("degree bound {bound} is below the relation degree {needed}")]
    DegreeTooSmall { bound: usize, needed: usize },
    #[error("element has degree {degree} above the bound {bound}")]
    DegreeOverflow { degree: usize, bound: usize },
    #[error("symbol {0} is not a generator of the presentation")]
    UnknownSymbol(String),
    #[error(transparent)]
    Resource(#[from] GbError),
    #[error("rule input rejected: {0}")]
    RuleRejected(String),
    #[error("rule premise not derivable: {0}")]
    Unproved(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Derivable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateTerm {
    pub coef: C,
    pub left: String,
    pub relation: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationVerdict {
    pub status: Status,
    pub degree: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Vec<CertificateTerm>>,
}

impl DerivationVerdict {
    pub fn derivable(&self) -> bool {
        self.status == Status::Derivable
    }
}

/// Letters in symbol order, so the letter order is (matrix name, row, col, star).
#[derive(Debug, Clone)]
pub struct Alphabet {
    pub symbols: Vec<Symbol>,
    index: HashMap<Symbol, u16>,
}

impl Alphabet {
    pub fn new(p: &Presentation) -> Alphabet {
        let mut symbols: Vec<Symbol> = p.generators().into_iter().flat_map(|s| [s.adjoint(), s]).collect();
        symbols.sort();
        let index = symbols.iter().enumerate().map(|(i, s)| (s.clone(), i as u16)).collect();
        Alphabet { symbols, index }
    }
    pub fn encode_word(&self, w: &Word) -> Result<LWord, DerivationError> {
        w.iter().map(|s| self.index.get(s).copied().ok_or_else(|| DerivationError::UnknownSymbol(s.to_string()))).collect()
    }
    pub fn encode(&self, x: &FreeStarElement) -> Result<Poly, DerivationError> {
        let mut m = BTreeMap::new();
        for (w, c) in &x.terms {
            m.insert(Mono(self.encode_word(w)?), c.clone());
        }
        Ok(gb::poly_from_map(m))
    }
    pub fn decode_word(&self, w: &[u16]) -> Word {
        w.iter().map(|&l| self.symbols[l as usize].clone()).collect()
    }
    pub fn decode(&self, p: &Poly) -> FreeStarElement {
        let mut e = FreeStarElement::zero();
        for (w, c) in p {
            e.add_term(self.decode_word(w), c.clone());
        }
        e
    }
}

/// A generator of the ideal: a relation, the adjoint of one, or an added fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseRelation {
    pub label: String,
    pub element: FreeStarElement,
}

/// Truncated ideal basis of a presentation, grown incrementally as facts are added.
#[derive(Debug, Clone)]
pub struct Engine {
    pub alphabet: Alphabet,
    pub gb: Gb,
    pub base: Vec<BaseRelation>,
    pub degree: usize,
}

impl Engine {
    pub fn new(p: &Presentation, degree: usize) -> Result<Engine, DerivationError> {
        Self::with_cap(p, degree, monomial_cap())
    }

    pub fn with_cap(p: &Presentation, degree: usize, cap: usize) -> Result<Engine, DerivationError> {
        let needed = p.max_relation_degree();
        if degree < needed {
            return Err(DerivationError::DegreeTooSmall { bound: degree, needed });
        }
        let mut e = Engine { alphabet: Alphabet::new(p), gb: Gb::new(degree, cap), base: vec![], degree };
        for r in &p.relations {
            e.push_base(&r.label, &r.element)?;
        }
        Ok(e)
    }

    fn push_base(&mut self, label: &str, x: &FreeStarElement) -> Result<(), DerivationError> {
        let poly = self.alphabet.encode(x)?;
        self.gb.add_base(poly);
        self.base.push(BaseRelation { label: label.to_string(), element: x.clone() });
        let adj = x.adjoint();
        if adj != *x && adj != x.scale(&C::int(-1)) {
            self.gb.add_base(self.alphabet.encode(&adj)?);
            self.base.push(BaseRelation { label: format!("({label})*"), element: adj });
        }
        Ok(())
    }

    /// Adds `x ≡ 0` (and its adjoint) as a new generator of the ideal.
    pub fn add_relation(&mut self, label: &str, x: &FreeStarElement) -> Result<(), DerivationError> {
        self.push_base(label, x)
    }

    pub fn complete(&mut self) -> Result<(), DerivationError> {
        self.gb.complete()?;
        Ok(())
    }

    /// Normal form with respect to the basis at the full degree bound.
    pub fn normal_form(&mut self, x: &FreeStarElement) -> Result<FreeStarElement, DerivationError> {
        self.complete()?;
        self.reduced(x)
    }

    /// Normal form against the basis as it stands; call [`Engine::complete`] first.
    pub fn reduced(&self, x: &FreeStarElement) -> Result<FreeStarElement, DerivationError> {
        let p = self.alphabet.encode(x)?;
        let acc = p.into_iter().map(|(w, c)| (Mono(w), c)).collect();
        let (rem, _) = self.gb.reduce(acc, self.degree);
        Ok(self.alphabet.decode(&rem))
    }

    pub fn check(&mut self, x: &FreeStarElement) -> Result<DerivationVerdict, DerivationError> {
        self.check_with(x, true)
    }

    pub fn check_with(&mut self, x: &FreeStarElement, with_certificate: bool) -> Result<DerivationVerdict, DerivationError> {
        if x.degree() > self.degree {
            return Err(DerivationError::DegreeOverflow { degree: x.degree(), bound: self.degree });
        }
        self.complete()?;
        self.verdict(x, with_certificate)
    }

    /// Membership against the basis as it stands; call [`Engine::complete`] first.
    pub fn verdict(&self, x: &FreeStarElement, with_certificate: bool) -> Result<DerivationVerdict, DerivationError> {
        if x.degree() > self.degree {
            return Err(DerivationError::DegreeOverflow { degree: x.degree(), bound: self.degree });
        }
        let p = self.alphabet.encode(x)?;
        let acc = p.into_iter().map(|(w, c)| (Mono(w), c)).collect();
        let (rem, steps) = self.gb.reduce(acc, self.degree);
        if !rem.is_empty() {
            return Ok(DerivationVerdict { status: Status::Unknown, degree: self.degree, certificate: None });
        }
        let certificate = if with_certificate {
            let cert = self.gb.certificate(&steps);
            debug_assert_eq!(self.alphabet.decode(&self.gb.expand(&cert)), *x);
            Some(
                cert.into_iter()
                    .map(|((u, i, v), c)| CertificateTerm {
                        coef: c,
                        left: word_to_string(&self.alphabet.decode_word(&u)),
                        relation: self.base[i].label.clone(),
                        right: word_to_string(&self.alphabet.decode_word(&v)),
                    })
                    .collect(),
            )
        } else {
            None
        };
        Ok(DerivationVerdict { status: Status::Derivable, degree: self.degree, certificate })
    }

    /// Re-expands a certificate against this engine's base relations.
    pub fn expand_certificate(&self, cert: &[CertificateTerm]) -> Result<FreeStarElement, DerivationError> {
        let by_label: HashMap<&str, &FreeStarElement> = self.base.iter().map(|b| (b.label.as_str(), &b.element)).collect();
        let mut out = FreeStarElement::zero();
        for t in cert {
            let r = by_label.get(t.relation.as_str()).ok_or_else(|| DerivationError::UnknownSymbol(t.relation.clone()))?;
            let u = crate::free_algebra::parse_free(&t.left).map_err(|e| DerivationError::UnknownSymbol(e.to_string()))?;
            let v = crate::free_algebra::parse_free(&t.right).map_err(|e| DerivationError::UnknownSymbol(e.to_string()))?;
            out = out.add(&u.mul(r).mul(&v).scale(&t.coef));
        }
        Ok(out)
    }

    /// Basis elements in the order they were found.
    pub fn basis(&self) -> Vec<FreeStarElement> {
        self.gb.elems.iter().map(|e| self.alphabet.decode(&e.poly)).collect()
    }
}

/// Truncated ideal basis at degree `d`.
pub fn ideal_basis(p: &Presentation, d: usize) -> Result<Engine, DerivationError> {
    let mut e = Engine::new(p, d)?;
    e.complete()?;
    Ok(e)
}

pub fn check_consequence(p: &Presentation, x: &FreeStarElement, d: usize) -> Result<DerivationVerdict, DerivationError> {
    Engine::new(p, d)?.check(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_algebra::parse_free;
    use crate::presentations::{s_plus, u_plus};

    #[test]
    fn spec_examples() {
        let u1 = ideal_basis(&u_plus(1), 2).unwrap();
        assert!(!u1.basis().is_empty());
        let v = check_consequence(&s_plus(2), &parse_free("u11 u12").unwrap(), 2).unwrap();
        assert!(v.derivable());
        assert!(matches!(ideal_basis(&u_plus(2), 1), Err(DerivationError::DegreeTooSmall { .. })));
        let x = parse_free("q11 q11^* + q12 q12^* - 1").unwrap();
        assert!(check_consequence(&u_plus(2), &x, 2).unwrap().derivable());
        let y = parse_free("q11 q12 - q12 q11").unwrap();
        assert_eq!(check_consequence(&u_plus(2), &y, 4).unwrap().status, Status::Unknown);
    }

    #[test]
    fn certificates_expand_to_target() {
        let mut e = Engine::new(&s_plus(3), 4).unwrap();
        for t in ["u11 u12", "u12 u11", "u11 u21", "u11 u22 u11 - u11 u22 u11"] {
            let x = parse_free(t).unwrap();
            let v = e.check(&x).unwrap();
            if v.derivable() {
                assert_eq!(e.expand_certificate(v.certificate.as_ref().unwrap()).unwrap(), x, "{t}");
            }
        }
    }

    #[test]
    fn monotone_in_degree() {
        let x = parse_free("q11 q21^* q21 q11^* - q11 q11^* q21 q21^* + q21 q21^* - q21 q11^* q11 q21^*").unwrap();
        let mut prev = false;
        for d in 2..=5 {
            let now = check_consequence(&u_plus(2), &x, d.max(x.degree())).unwrap().derivable();
            assert!(!prev || now);
            prev = now;
        }
    }
}
