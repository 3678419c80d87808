//! Reduced nonnegative rationals and prime machinery.
//!
//! Monoid elements live in `Q_{>=0}`, so [`Rational`] enforces nonnegativity
//! at every boundary; subtraction is checked. Internally values are
//! arbitrary-precision and always in lowest terms with positive denominator,
//! so `n(q)` and `d(q)` (numerator and denominator of the reduced form) are
//! well defined, as is the p-adic valuation
//! `v_p(q) = v_p(n(q)) - v_p(d(q))` for q != 0.

use crate::{Error, Result};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// A nonnegative rational in lowest terms.
///
/// The inner value is kept reduced with a positive denominator by
/// construction. Use [`Rational::checked_sub`] for subtraction; it returns
/// `None` instead of ever exposing a negative value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Reduce `num/den` to lowest terms. Errors on a zero denominator or a
    /// negative value.
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let r = BigRational::new(num, den);
        if r.is_negative() {
            return Err(Error::NegativeValue(r.to_string()));
        }
        Ok(Rational(r))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: u64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n(q)`: numerator of the reduced form.
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// `d(q)`: denominator of the reduced form, always >= 1.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn add(&self, other: &Rational) -> Rational {
        Rational(&self.0 + &other.0)
    }

    /// `self - other`, or `None` if the result would be negative.
    pub fn checked_sub(&self, other: &Rational) -> Option<Rational> {
        let d = &self.0 - &other.0;
        if d.is_negative() {
            None
        } else {
            Some(Rational(d))
        }
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        Rational(&self.0 * &other.0)
    }

    pub fn mul_int(&self, k: &BigInt) -> Result<Rational> {
        if k.sign() == Sign::Minus {
            return Err(Error::NegativeValue(k.to_string()));
        }
        Ok(Rational(&self.0 * k))
    }

    pub fn mul_u64(&self, k: u64) -> Rational {
        Rational(&self.0 * BigInt::from(k))
    }

    /// Integer quotient `floor(self / other)` for a nonzero divisor.
    pub fn div_floor(&self, other: &Rational) -> Result<BigInt> {
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok((&self.0 / &other.0).floor().to_integer())
    }

    /// `v_p(q)` for a prime `p` and `q != 0`.
    pub fn padic_valuation(&self, p: u64) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ValuationOfZero);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p = BigInt::from(p);
        Ok(int_valuation(self.numer(), &p) - int_valuation(self.denom(), &p))
    }

    /// Parse `"p/q"` or `"p"`. Whitespace around tokens is tolerated.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "rational",
            text: s.to_string(),
        };
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num = BigInt::from_str(num).map_err(|_| bad())?;
        let den = BigInt::from_str(den).map_err(|_| bad())?;
        Rational::new(num, den)
    }
}

/// Exponent of `p` in a nonzero integer (0 for units).
fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Rational::parse(s)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Field-level serde for `BigInt` as a decimal string, for use with
/// `#[serde(with = "...")]`.
pub mod bigint_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Field-level serde for index-keyed maps with explicit string keys. JSON
/// object keys are strings, and serde's internally buffered paths (tagged
/// enums, flatten) do not coerce them back to integers, so maps keyed by
/// `usize` must cross the boundary as string-keyed maps.
pub mod index_map_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<usize, u64>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        m.iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect::<BTreeMap<String, u64>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<usize, u64>, D::Error> {
        let raw = BTreeMap::<String, u64>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.parse::<usize>()
                    .map(|k| (k, v))
                    .map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

/// Deterministic Miller-Rabin, exact for all u64 inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // These witnesses decide primality for every n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// The n-th odd prime, 1-indexed: 3, 5, 7, 11, ...
pub fn nth_odd_prime(n: usize) -> u64 {
    debug_assert!(n >= 1);
    let mut seen = 0;
    let mut candidate = 1u64;
    loop {
        candidate += 2;
        if is_prime(candidate) {
            seen += 1;
            if seen == n {
                return candidate;
            }
        }
    }
}

/// A source of pairwise-distinct primes indexed from 1.
///
/// Either the ascending odd primes, or an explicit finite list (validated for
/// primality and distinctness at construction). Lookups recompute; there is no
/// shared mutable cache.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeSequence {
    OddPrimes,
    Explicit(Vec<u64>),
}

impl PrimeSequence {
    pub fn explicit(list: Vec<u64>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for &p in &list {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if !seen.insert(p) {
                return Err(Error::RepeatedPrime(p));
            }
        }
        Ok(PrimeSequence::Explicit(list))
    }

    /// The n-th prime of the sequence, 1-indexed.
    pub fn nth(&self, n: usize) -> Result<u64> {
        if n == 0 {
            return Err(Error::PrimeIndexOutOfRange(0, self.len_hint()));
        }
        match self {
            PrimeSequence::OddPrimes => Ok(nth_odd_prime(n)),
            PrimeSequence::Explicit(v) => v
                .get(n - 1)
                .copied()
                .ok_or(Error::PrimeIndexOutOfRange(n, v.len())),
        }
    }

    /// Reverse lookup: the 1-based index at which `p` occurs, if any.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        match self {
            PrimeSequence::OddPrimes => {
                if p < 3 || !is_prime(p) {
                    return None;
                }
                let mut idx = 0;
                let mut c = 1u64;
                while c < p {
                    c += 2;
                    if is_prime(c) {
                        idx += 1;
                    }
                }
                Some(idx)
            }
            PrimeSequence::Explicit(v) => v.iter().position(|&q| q == p).map(|i| i + 1),
        }
    }

    /// Number of indices available; `usize::MAX` for the unbounded sequence.
    pub fn len_hint(&self) -> usize {
        match self {
            PrimeSequence::OddPrimes => usize::MAX,
            PrimeSequence::Explicit(v) => v.len(),
        }
    }
}
