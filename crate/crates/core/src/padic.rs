//! p-adic valuations and norms on exact rationals, and the exact entropy value type.
//!
//! Every scalar in this crate is a rational number viewed inside `Q_p`. The
//! quantities of interest (entropy, scale, lattice indices) only depend on
//! valuations, which are exact on rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational scalar, read as an element of `Q_p`.
pub type Q = BigRational;

/// A rational prime, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if is_prime(value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^e` as a rational; `e` may be negative.
    pub fn pow(self, e: i64) -> Q {
        let base = BigInt::from(self.0).pow(e.unsigned_abs());
        if e >= 0 {
            Q::from_integer(base)
        } else {
            Q::new(BigInt::one(), base)
        }
    }

    pub fn pow_uint(self, e: u64) -> BigUint {
        BigUint::from(self.0).pow(e)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u64::deserialize(d)?;
        Prime::new(v).map_err(de::Error::custom)
    }
}

impl FromStr for Prime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: u64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("not a prime key: {s:?}")))?;
        Prime::new(v)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A valuation in `Z ∪ {+∞}`; `+∞` only occurs as the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedValuation {
    Finite(i64),
    Infinite,
}

impl ExtendedValuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtendedValuation::Finite(v) => Some(v),
            ExtendedValuation::Infinite => None,
        }
    }
}

impl Add for ExtendedValuation {
    type Output = ExtendedValuation;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedValuation::Finite(a), ExtendedValuation::Finite(b)) => {
                ExtendedValuation::Finite(a + b)
            }
            _ => ExtendedValuation::Infinite,
        }
    }
}

impl fmt::Display for ExtendedValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValuation::Finite(v) => write!(f, "{v}"),
            ExtendedValuation::Infinite => write!(f, "+inf"),
        }
    }
}

impl Serialize for ExtendedValuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedValuation::Finite(v) => s.serialize_i64(*v),
            ExtendedValuation::Infinite => s.serialize_str("+inf"),
        }
    }
}

/// Multiplicity of `p` in a nonzero integer.
pub fn vp_int(n: &BigInt, p: Prime) -> u64 {
    assert!(!n.is_zero(), "valuation of zero integer");
    let p = p.to_bigint();
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p(x)`, with `v_p(0) = +∞`.
pub fn vp(x: &Q, p: Prime) -> ExtendedValuation {
    if x.is_zero() {
        return ExtendedValuation::Infinite;
    }
    let num = vp_int(x.numer(), p) as i64;
    let den = vp_int(x.denom(), p) as i64;
    ExtendedValuation::Finite(num - den)
}

/// Finite valuation of a nonzero rational.
pub(crate) fn vp_finite(x: &Q, p: Prime) -> i64 {
    vp(x, p).finite().expect("valuation of zero")
}

/// `|x|_p = p^(-v_p(x))`, and `|0|_p = 0`.
pub fn pnorm(x: &Q, p: Prime) -> Q {
    match vp(x, p) {
        ExtendedValuation::Infinite => Q::zero(),
        ExtendedValuation::Finite(v) => p.pow(-v),
    }
}

/// True iff `x` lies in the localization `Z_(p)`.
pub fn is_p_integral(x: &Q, p: Prime) -> bool {
    !x.denom().is_multiple_of(&p.to_bigint())
}

/// Canonical representative of `x` modulo `p^e·Z_(p)`: the unique element of
/// `Z[1/p] ∩ [0, p^e)` congruent to `x`.
pub fn reduce_mod_p_power(x: &Q, p: Prime, e: i64) -> Q {
    let v = match vp(x, p) {
        ExtendedValuation::Infinite => return Q::zero(),
        ExtendedValuation::Finite(v) => v,
    };
    if v >= e {
        return Q::zero();
    }
    // shift so that x·p^m is p-integral and the modulus p^(m+e) is integral
    let m = 0i64.max(-v).max(-e);
    let modulus = p.to_bigint().pow((m + e) as u32);
    let shifted = x * p.pow(m);
    let a = residue_of_integral(&shifted, &modulus);
    Q::new(a, p.to_bigint().pow(m as u32))
}

/// Image of a p-integral rational in `Z / modulus`, where `modulus` is a power of `p`.
pub(crate) fn residue_of_integral(x: &Q, modulus: &BigInt) -> BigInt {
    if modulus.is_one() {
        return BigInt::zero();
    }
    let den_inv = mod_inverse(&x.denom().mod_floor(modulus), modulus)
        .expect("denominator must be a unit modulo a power of p");
    (x.numer() * den_inv).mod_floor(modulus)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Residue of a p-integral rational modulo `p^k`, in `[0, p^k)`.
pub fn residue_mod(x: &Q, p: Prime, k: u32) -> Result<BigInt> {
    if !is_p_integral(x, p) {
        return Err(Error::Invalid(format!("{x} is not {p}-integral")));
    }
    Ok(residue_of_integral(x, &p.to_bigint().pow(k)))
}

/// Parses `"a/b"` or `"a"` into a canonical rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Canonical `"num/den"` rendering.
pub fn format_rational(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Serde adapter: rationals as `"num/den"` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let raw = RationalInput::deserialize(d)?;
        raw.into_rational().map_err(de::Error::custom)
    }
}

/// Accepts either a string rational or a JSON integer.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum RationalInput {
    Int(i64),
    Str(String),
}

impl RationalInput {
    pub(crate) fn into_rational(self) -> Result<Q> {
        match self {
            RationalInput::Int(v) => Ok(Q::from_integer(BigInt::from(v))),
            RationalInput::Str(s) => parse_rational(&s),
        }
    }
}

/// Exact entropy `Σ_p m_p·log p` with non-negative integer exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntropyValue {
    terms: BTreeMap<Prime, u64>,
}

impl EntropyValue {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `m·log p`; a zero exponent yields the empty value.
    pub fn log_p(p: Prime, m: u64) -> Self {
        let mut terms = BTreeMap::new();
        if m > 0 {
            terms.insert(p, m);
        }
        EntropyValue { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn exponent(&self, p: Prime) -> u64 {
        self.terms.get(&p).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Prime, u64)> + '_ {
        self.terms.iter().map(|(p, m)| (*p, *m))
    }

    /// Decimal value in nats. Display only; never used for comparisons.
    pub fn approx_nats(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, m)| *m as f64 * (p.get() as f64).ln())
            .sum()
    }

    /// Pointwise sum of exponent maps.
    pub fn sum(&self, other: &EntropyValue) -> EntropyValue {
        let mut out = self.clone();
        out += other;
        out
    }

    /// `self ≤ other` exponent-wise; this is the order that matters for
    /// comparing entropies supported on the same primes.
    pub fn dominated_by(&self, other: &EntropyValue) -> bool {
        self.terms.iter().all(|(p, m)| *m <= other.exponent(*p))
    }
}

impl AddAssign<&EntropyValue> for EntropyValue {
    fn add_assign(&mut self, rhs: &EntropyValue) {
        for (p, m) in &rhs.terms {
            if *m > 0 {
                *self.terms.entry(*p).or_insert(0) += m;
            }
        }
    }
}

impl Add for EntropyValue {
    type Output = EntropyValue;

    fn add(mut self, rhs: EntropyValue) -> EntropyValue {
        self += &rhs;
        self
    }
}

impl std::iter::Sum for EntropyValue {
    fn sum<I: Iterator<Item = EntropyValue>>(iter: I) -> Self {
        iter.fold(EntropyValue::zero(), |a, b| a + b)
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, m)| {
                if *m == 1 {
                    format!("log {p}")
                } else {
                    format!("{m}·log {p}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for EntropyValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.terms.len() + 1))?;
        for (p, m) in &self.terms {
            map.serialize_entry(&p.to_string(), m)?;
        }
        map.serialize_entry("approx_nats", &self.approx_nats())?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for EntropyValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct EntropyVisitor;

        impl<'de> Visitor<'de> for EntropyVisitor {
            type Value = EntropyValue;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from prime to exponent")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<EntropyValue, A::Error> {
                let mut out = EntropyValue::zero();
                while let Some(key) = access.next_key::<String>()? {
                    if key == "approx_nats" {
                        access.next_value::<de::IgnoredAny>()?;
                        continue;
                    }
                    let p: Prime = key.parse().map_err(de::Error::custom)?;
                    let m: u64 = access.next_value()?;
                    out += &EntropyValue::log_p(p, m);
                }
                Ok(out)
            }
        }

        d.deserialize_map(EntropyVisitor)
    }
}

/// Converts an exponent known to be a non-negative integer.
pub(crate) fn rational_to_exponent(x: &Q) -> Option<u64> {
    if x.is_integer() && !x.is_negative() {
        x.to_integer().to_u64()
    } else {
        None
    }
}
