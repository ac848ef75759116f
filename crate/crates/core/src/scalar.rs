//! Exact scalars: rationals with a machine-word fast path and Gaussian rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Exact rational. Small values stay in `i64` pairs; anything that overflows
/// is promoted to `BigRational` and demoted again when it fits.
#[derive(Clone, Debug)]
pub enum Q {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Q {
    pub fn zero() -> Q {
        Q::Small(0, 1)
    }
    pub fn one() -> Q {
        Q::Small(1, 1)
    }
    pub fn int(n: i64) -> Q {
        Q::Small(n, 1)
    }
    pub fn new(n: i64, d: i64) -> Q {
        assert!(d != 0, "zero denominator");
        Q::from_i128(n as i128, d as i128)
    }

    fn from_i128(n: i128, d: i128) -> Q {
        let g = gcd_i128(n, d);
        let (mut n, mut d) = if g == 0 { (0, 1) } else { (n / g, d / g) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Q::Small(a, b),
            _ => Q::Big(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: BigRational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(a), Some(b)) => Q::Small(a, b),
            _ => Q::Big(r),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Q::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(n, _) => *n == 0,
            Q::Big(r) => r.is_zero(),
        }
    }
    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small(1, 1))
    }
    pub fn is_positive(&self) -> bool {
        match self {
            Q::Small(n, _) => *n > 0,
            Q::Big(r) => r.is_positive(),
        }
    }
    pub fn is_negative(&self) -> bool {
        match self {
            Q::Small(n, _) => *n < 0,
            Q::Big(r) => r.is_negative(),
        }
    }
    pub fn abs(&self) -> Q {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(_, d) => *d == 1,
            Q::Big(r) => r.is_integer(),
        }
    }
    pub fn recip(&self) -> Q {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Q::Small(n, d) => Q::from_i128(*d as i128, *n as i128),
            Q::Big(r) => Q::from_big(r.recip()),
        }
    }
    pub fn numer(&self) -> BigInt {
        match self {
            Q::Small(n, _) => BigInt::from(*n),
            Q::Big(r) => r.numer().clone(),
        }
    }
    pub fn denom(&self) -> BigInt {
        match self {
            Q::Small(_, d) => BigInt::from(*d),
            Q::Big(r) => r.denom().clone(),
        }
    }
    pub fn pow(&self, e: i32) -> Q {
        if e < 0 {
            return self.recip().pow(-e);
        }
        let mut acc = Q::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
    pub fn to_f64(&self) -> f64 {
        match self {
            Q::Small(n, d) => *n as f64 / *d as f64,
            Q::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl PartialEq for Q {
    fn eq(&self, other: &Q) -> bool {
        match (self, other) {
            (Q::Small(a, b), Q::Small(c, d)) => a == c && b == d,
            _ => self.to_big() == other.to_big(),
        }
    }
}
impl Eq for Q {}

impl Hash for Q {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Small is canonical whenever the value fits, so hashing the pair is consistent.
        match self {
            Q::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Q::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        match (self, other) {
            (Q::Small(a, b), Q::Small(c, d)) => ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128))),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}
impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Q> for &'a Q {
    type Output = Q;
    fn add(self, o: &Q) -> Q {
        if let (Q::Small(a, b), Q::Small(c, d)) = (self, o) {
            if b == d {
                return Q::from_i128(*a as i128 + *c as i128, *b as i128);
            }
            let n = (*a as i128).checked_mul(*d as i128).and_then(|x| x.checked_add((*c as i128) * (*b as i128)));
            if let Some(n) = n {
                return Q::from_i128(n, (*b as i128) * (*d as i128));
            }
        }
        Q::from_big(self.to_big() + o.to_big())
    }
}
impl<'a> Sub<&'a Q> for &'a Q {
    type Output = Q;
    fn sub(self, o: &Q) -> Q {
        self + &(-o.clone())
    }
}
impl<'a> Mul<&'a Q> for &'a Q {
    type Output = Q;
    fn mul(self, o: &Q) -> Q {
        if let (Q::Small(a, b), Q::Small(c, d)) = (self, o) {
            return Q::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        Q::from_big(self.to_big() * o.to_big())
    }
}
impl<'a> Div<&'a Q> for &'a Q {
    type Output = Q;
    fn div(self, o: &Q) -> Q {
        self * &o.recip()
    }
}
impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small(n, d) if n != i64::MIN => Q::Small(-n, d),
            other => Q::from_big(-other.to_big()),
        }
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $f:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $f(self, o: $t) -> $t {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $f(self, o: &$t) -> $t {
                (&self).$f(o)
            }
        }
    };
}
forward_owned!(Q, Add, add);
forward_owned!(Q, Sub, sub);
forward_owned!(Q, Mul, mul);
forward_owned!(Q, Div, div);

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, o: &Q) {
        *self = &*self + o;
    }
}
impl SubAssign<&Q> for Q {
    fn sub_assign(&mut self, o: &Q) {
        *self = &*self - o;
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(n, 1) => write!(f, "{n}"),
            Q::Small(n, d) => write!(f, "{n}/{d}"),
            Q::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Q::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse scalar `{0}`")]
pub struct ScalarParseError(pub String);

impl FromStr for Q {
    type Err = ScalarParseError;
    fn from_str(s: &str) -> Result<Q, ScalarParseError> {
        let err = || ScalarParseError(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n = BigInt::from_str(n).map_err(|_| err())?;
        let d = BigInt::from_str(d).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Q::from_big(BigRational::new(n, d)))
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Q {
        Q::int(n)
    }
}

/// Largest integer `m` with `m*m <= q` for a non-negative rational, on numerator and denominator.
pub fn exact_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &n * &n == q.numer() && &d * &d == q.denom() {
        Some(Q::from_big(BigRational::new(n, d)))
    } else {
        None
    }
}

/// Gaussian rational `re + im*i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct C {
    pub re: Q,
    pub im: Q,
}

impl C {
    pub fn zero() -> C {
        C { re: Q::zero(), im: Q::zero() }
    }
    pub fn one() -> C {
        C { re: Q::one(), im: Q::zero() }
    }
    pub fn i() -> C {
        C { re: Q::zero(), im: Q::one() }
    }
    pub fn real(q: Q) -> C {
        C { re: q, im: Q::zero() }
    }
    pub fn int(n: i64) -> C {
        C::real(Q::int(n))
    }
    pub fn frac(n: i64, d: i64) -> C {
        C::real(Q::new(n, d))
    }
    pub fn new(re: Q, im: Q) -> C {
        C { re, im }
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> C {
        C { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn norm_sqr(&self) -> Q {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }
    pub fn recip(&self) -> C {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "reciprocal of zero");
        C { re: &self.re / &n, im: -(&self.im / &n) }
    }
    pub fn scale(&self, q: &Q) -> C {
        C { re: &self.re * q, im: &self.im * q }
    }
    pub fn pow(&self, e: u32) -> C {
        let mut acc = C::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl<'a> Add<&'a C> for &'a C {
    type Output = C;
    fn add(self, o: &C) -> C {
        C { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}
impl<'a> Sub<&'a C> for &'a C {
    type Output = C;
    fn sub(self, o: &C) -> C {
        C { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}
impl<'a> Mul<&'a C> for &'a C {
    type Output = C;
    fn mul(self, o: &C) -> C {
        if self.im.is_zero() && o.im.is_zero() {
            return C::real(&self.re * &o.re);
        }
        C {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}
impl<'a> Div<&'a C> for &'a C {
    type Output = C;
    fn div(self, o: &C) -> C {
        if self.im.is_zero() && o.im.is_zero() {
            return C::real(&self.re / &o.re);
        }
        self * &o.recip()
    }
}
impl Neg for C {
    type Output = C;
    fn neg(self) -> C {
        C { re: -self.re, im: -self.im }
    }
}
impl<'a> Neg for &'a C {
    type Output = C;
    fn neg(self) -> C {
        -self.clone()
    }
}
forward_owned!(C, Add, add);
forward_owned!(C, Sub, sub);
forward_owned!(C, Mul, mul);
forward_owned!(C, Div, div);

impl AddAssign<&C> for C {
    fn add_assign(&mut self, o: &C) {
        self.re += &o.re;
        self.im += &o.im;
    }
}
impl SubAssign<&C> for C {
    fn sub_assign(&mut self, o: &C) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}
impl MulAssign<&C> for C {
    fn mul_assign(&mut self, o: &C) {
        *self = &*self * o;
    }
}

impl From<Q> for C {
    fn from(q: Q) -> C {
        C::real(q)
    }
}
impl From<i64> for C {
    fn from(n: i64) -> C {
        C::int(n)
    }
}

/// Renders as `p/q`, `p/qi` or `p/q+r/si`; an imaginary part always carries the trailing `i`.
impl fmt::Display for C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, self.im.abs())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl FromStr for C {
    type Err = ScalarParseError;
    fn from_str(s: &str) -> Result<C, ScalarParseError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || ScalarParseError(s.to_string());
        if t.is_empty() {
            return Err(err());
        }
        if let Some(body) = t.strip_suffix('i') {
            // split at the last sign that is not the leading one
            let split = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last();
            let (re, im) = match split {
                Some(i) => (&body[..i], &body[i..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => "1".to_string(),
                "-" => "-1".to_string(),
                x => x.trim_start_matches('+').to_string(),
            };
            return Ok(C { re: re.parse()?, im: im.parse()? });
        }
        Ok(C::real(t.parse()?))
    }
}

impl serde::Serialize for C {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
impl<'de> serde::Deserialize<'de> for C {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<C, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
impl serde::Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
impl<'de> serde::Deserialize<'de> for Q {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Q::new(i64::MAX, 1);
        let sq = &big * &big;
        assert!(matches!(sq, Q::Big(_)));
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back, Q::Small(..)));
    }

    #[test]
    fn display_and_parse() {
        for s in ["0", "1/2", "-3/4", "5i", "1/2+3/4i", "-1-2i"] {
            let c: C = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert_eq!("i".parse::<C>().unwrap(), C::i());
        assert_eq!("-i".parse::<C>().unwrap(), -C::i());
        assert_eq!("2/4".parse::<Q>().unwrap(), Q::new(1, 2));
    }

    #[test]
    fn sqrt_exact() {
        assert_eq!(exact_sqrt(&Q::new(9, 4)), Some(Q::new(3, 2)));
        assert_eq!(exact_sqrt(&Q::int(2)), None);
    }

    fn small_c() -> impl Strategy<Value = C> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(a, b, c, d)| C::new(Q::new(a, b), Q::new(c, d)))
    }

    proptest! {
        #[test]
        fn field_axioms(a in small_c(), b in small_c(), c in small_c()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
            let rt: C = a.to_string().parse().unwrap();
            prop_assert_eq!(rt, a);
        }
    }
}
