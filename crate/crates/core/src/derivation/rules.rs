//! Inference rules sound in every C*-completion.
//!
//! Each rule checks its premise against the engine and then appends its conclusions as new
//! generators of the ideal.

use super::{DerivationError, Engine};
use crate::free_algebra::{FreeStarElement, Symbol};
use crate::presentations::Presentation;
use crate::scalar::{C, Q};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Ideal,
    PositivitySplit,
    StarSquareZero,
    AntipodeTransfer,
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Rule::Ideal => "ideal",
            Rule::PositivitySplit => "positivity-split",
            Rule::StarSquareZero => "star-square-zero",
            Rule::AntipodeTransfer => "antipode-transfer",
        })
    }
}

fn require(engine: &mut Engine, x: &FreeStarElement, what: &str) -> Result<(), DerivationError> {
    if x.degree() > engine.degree {
        return Err(DerivationError::Unproved(format!("{what} has degree {} above {}", x.degree(), engine.degree)));
    }
    if engine.check_with(x, false)?.derivable() {
        Ok(())
    } else {
        Err(DerivationError::Unproved(format!("{what}: {x}")))
    }
}

/// `x ≡ 0` by ideal membership; `x` is then kept as a lemma.
pub fn ideal(engine: &mut Engine, label: &str, x: &FreeStarElement) -> Result<Vec<FreeStarElement>, DerivationError> {
    require(engine, x, "claim")?;
    engine.add_relation(label, x)?;
    Ok(vec![x.clone()])
}

/// `Σ λ_i x_i* x_i ≡ 0` with every `λ_i > 0` gives `x_i* x_i ≡ 0` for each `i`.
pub fn positivity_split(engine: &mut Engine, label: &str, terms: &[(Q, FreeStarElement)]) -> Result<Vec<FreeStarElement>, DerivationError> {
    if terms.is_empty() {
        return Err(DerivationError::RuleRejected("empty sum".into()));
    }
    for (k, (l, x)) in terms.iter().enumerate() {
        if !l.is_positive() {
            return Err(DerivationError::RuleRejected(format!("coefficient {l} of term {k} is not positive")));
        }
        if x.is_zero() {
            return Err(DerivationError::RuleRejected(format!("term {k} is zero")));
        }
    }
    let squares: Vec<FreeStarElement> = terms.iter().map(|(_, x)| x.adjoint().mul(x)).collect();
    let sum = terms.iter().zip(&squares).fold(FreeStarElement::zero(), |a, ((l, _), sq)| a.add(&sq.scale(&C::real(l.clone()))));
    require(engine, &sum, "weighted sum of squares")?;
    for (k, sq) in squares.iter().enumerate() {
        engine.add_relation(&format!("{label} [{k}]"), sq)?;
    }
    Ok(squares)
}

/// `x* x ≡ 0` gives `x ≡ 0`.
pub fn star_square_zero(engine: &mut Engine, label: &str, x: &FreeStarElement) -> Result<Vec<FreeStarElement>, DerivationError> {
    if x.is_zero() {
        return Err(DerivationError::RuleRejected("zero element".into()));
    }
    require(engine, &x.adjoint().mul(x), "x* x")?;
    engine.add_relation(label, x)?;
    Ok(vec![x.clone()])
}

/// `m[e,f] ≡ 0` gives `κ(m[e,f]) ≡ 0`, hence `m[f,e] ≡ 0`.
pub fn antipode_transfer(engine: &mut Engine, p: &Presentation, label: &str, source: &Symbol) -> Result<Vec<FreeStarElement>, DerivationError> {
    if source.star || !p.declares(source) {
        return Err(DerivationError::RuleRejected(format!("{source} is not a plain generator")));
    }
    let image = p
        .antipode
        .iter()
        .find_map(|r| r.apply(source))
        .ok_or_else(|| DerivationError::RuleRejected(format!("no antipode rule covers {source}")))?;
    require(engine, &FreeStarElement::sym(source.clone()), "generator")?;
    let target = image.adjoint();
    engine.add_relation(label, &target)?;
    let plain = FreeStarElement::sym(Symbol::new(&source.name, source.col, source.row));
    Ok(vec![plain])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_algebra::parse_free;
    use crate::presentations::{a_ut, s_plus, u_plus};

    #[test]
    fn star_square_zero_needs_its_premise() {
        let mut e = Engine::new(&u_plus(2), 4).unwrap();
        let x = parse_free("q11 q12 - q12 q11").unwrap();
        assert!(matches!(star_square_zero(&mut e, "s", &x), Err(DerivationError::Unproved(_))));
        assert!(!e.check(&x).unwrap().derivable());
    }

    #[test]
    fn positivity_rejects_non_positive_weights() {
        let mut e = Engine::new(&u_plus(2), 4).unwrap();
        let x = parse_free("q11").unwrap();
        let r = positivity_split(&mut e, "p", &[(Q::zero(), x.clone())]);
        assert!(matches!(r, Err(DerivationError::RuleRejected(_))));
        let r = positivity_split(&mut e, "p", &[(Q::new(-1, 2), x)]);
        assert!(matches!(r, Err(DerivationError::RuleRejected(_))));
    }

    #[test]
    fn chain_on_an_extended_presentation() {
        let mut p = u_plus(2);
        p.push("extra", parse_free("2 q12^* q12 + q21^* q21").unwrap());
        let mut e = Engine::new(&p, 4).unwrap();
        let out = positivity_split(&mut e, "p", &[(Q::int(2), parse_free("q12").unwrap()), (Q::one(), parse_free("q21").unwrap())]).unwrap();
        assert_eq!(out.len(), 2);
        star_square_zero(&mut e, "z", &parse_free("q12").unwrap()).unwrap();
        assert!(e.check(&parse_free("q12").unwrap()).unwrap().derivable());
    }

    #[test]
    fn antipode_moves_the_zero_across_the_diagonal() {
        let mut p = a_ut(&[Q::int(1), Q::int(3)]).unwrap();
        p.push("zero", parse_free("q12").unwrap());
        let mut e = Engine::new(&p, 2).unwrap();
        let out = antipode_transfer(&mut e, &p, "k", &Symbol::new("q", 1, 2)).unwrap();
        assert_eq!(out, vec![parse_free("q21").unwrap()]);
        assert!(e.check(&parse_free("q21").unwrap()).unwrap().derivable());
        assert!(antipode_transfer(&mut e, &s_plus(2), "k", &Symbol::new("q", 1, 2)).is_err());
    }
}
