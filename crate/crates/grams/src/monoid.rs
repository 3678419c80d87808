//! Puiseux monoid generator families and the searches over them.
//!
//! A family describes a countable generating set inside `Q_{>=0}`:
//!
//! * `explicit([q1, ..., qk])` — a finite list;
//! * `grams` — `1/(2^n p_n)` with `p_n` the n-th odd prime, indices from 1;
//! * `atomization(base, primes)` — `q_n / p_n` over a base family, indices
//!   from 1, subject to the coprimality conditions checked at access time;
//! * `cyclic(a, b)` — `(a/b)^n` for `0 <= n`, indices from 0;
//! * `valuation(d)` — `1/d^n`, indices from 1.
//!
//! Membership in the generated monoid is decided exactly for all five kinds
//! (residue extraction against the family's prime structure, digit extraction
//! for cyclic families, denominator support for valuation families, complete
//! bounded search for explicit lists). Factorization enumeration is complete
//! over a certified finite index window; the `exhaustive` flag means exactly
//! that the search covered every candidate coefficient vector over the window
//! and that emptiness therefore proves non-membership. For elements with a
//! nonzero greatest divisor in the ambient valuation part, the full
//! factorization set of the monoid is genuinely infinite (mass can be re-folded
//! onto any high index), so no finite enumeration could list it; windows are
//! the honest device, and certificates record them.

use crate::arith::{PrimeSequence, Rational};
use crate::{Decision, Error, Fuel, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Extra indices appended above the digit bound when enumerating cyclic
/// factorizations, so that one round of carry-equivalent factorizations
/// (`a` copies of `q^n` = `b` copies of `q^(n+1)`) is visible.
pub const CYCLIC_WINDOW_SLACK: usize = 1;

/// A countable generating set for a Puiseux monoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorFamily {
    Explicit(Vec<Rational>),
    Grams { primes: PrimeSequence },
    Atomization {
        base: Box<GeneratorFamily>,
        primes: PrimeSequence,
    },
    Cyclic { a: u64, b: u64 },
    Valuation { d: u64 },
}

/// One factorization: generator index -> multiplicity (entries are nonzero).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct Factorization {
    #[serde(with = "crate::arith::index_map_serde")]
    pub entries: BTreeMap<usize, u64>,
}

impl Factorization {
    pub fn empty() -> Self {
        Factorization::default()
    }

    pub fn single(index: usize, count: u64) -> Self {
        let mut entries = BTreeMap::new();
        if count > 0 {
            entries.insert(index, count);
        }
        Factorization { entries }
    }

    pub fn add_copies(&mut self, index: usize, count: u64) {
        if count > 0 {
            *self.entries.entry(index).or_insert(0) += count;
        }
    }

    /// Number of atoms counted with multiplicity.
    pub fn length(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn multiplicity(&self, index: usize) -> u64 {
        self.entries.get(&index).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Re-sum the factorization against its family.
    pub fn value(&self, family: &GeneratorFamily) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (&n, &c) in &self.entries {
            let g = family.generator(n)?;
            acc = acc.add(&g.mul_int(&BigInt::from(c))?);
        }
        Ok(acc)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "(empty)");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(n, c)| format!("g{n} x{c}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// All factorizations found over the search window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationSet {
    pub items: Vec<Factorization>,
    /// True when the search provably covered every coefficient vector over the
    /// window; an empty exhaustive set is a proof of non-membership.
    pub exhaustive: bool,
    /// The generator indices the search ranged over.
    pub window: BTreeSet<usize>,
}

/// The set of factorization lengths observed over the window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthSet {
    pub lengths: BTreeSet<u64>,
    pub exhaustive: bool,
}

/// The index window that decides membership for an element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevantIndices {
    pub indices: BTreeSet<usize>,
    /// True when enumeration over `indices` decides membership.
    pub exact: bool,
}

/// Membership answer with a certificate on the positive side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(Factorization),
    NotMember { reason: String },
    Unknown,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

/// Answer to an atom query; the witness split lives on the negative side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AtomDecision {
    Atom,
    /// Two nonzero members summing to the queried element.
    NotAtom(Rational, Rational),
    Unknown,
}

impl AtomDecision {
    pub fn is_atom(&self) -> bool {
        matches!(self, AtomDecision::Atom)
    }
    pub fn is_unknown(&self) -> bool {
        matches!(self, AtomDecision::Unknown)
    }
}

/// A strictly ascending chain of principal ideals, presented as its strictly
/// decreasing sequence of generators: `terms[i+1]` divides `terms[i]`, with
/// the difference certified as a monoid element, and no two terms equal. Such
/// a chain of any requested finite length witnesses the failure of the ACCP
/// when produced by a closed-form rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainWitness<E, C> {
    pub terms: Vec<E>,
    pub steps: Vec<ChainStep<E, C>>,
    /// Human-readable closed form for the n-th term and difference.
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep<E, C> {
    pub difference: E,
    pub certificate: C,
}

pub type RationalChain = ChainWitness<Rational, Factorization>;

impl GeneratorFamily {
    pub fn grams() -> Self {
        GeneratorFamily::Grams {
            primes: PrimeSequence::OddPrimes,
        }
    }

    pub fn explicit(gens: Vec<Rational>) -> Result<Self> {
        for g in &gens {
            if g.is_zero() {
                return Err(Error::Precondition(
                    "explicit generators must be strictly positive".into(),
                ));
            }
        }
        Ok(GeneratorFamily::Explicit(gens))
    }

    pub fn cyclic(a: u64, b: u64) -> Result<Self> {
        if !(2 <= a && a < b && BigInt::from(a).gcd(&BigInt::from(b)).is_one()) {
            return Err(Error::Precondition(format!(
                "cyclic family needs 2 <= a < b with gcd(a, b) = 1, got a = {a}, b = {b}"
            )));
        }
        Ok(GeneratorFamily::Cyclic { a, b })
    }

    pub fn valuation(d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Precondition(format!(
                "valuation family needs d >= 2, got {d}"
            )));
        }
        Ok(GeneratorFamily::Valuation { d })
    }

    pub fn atomization(base: GeneratorFamily, primes: PrimeSequence) -> Self {
        GeneratorFamily::Atomization {
            base: Box::new(base),
            primes,
        }
    }

    /// Smallest generator index of the family (cyclic starts at 0).
    pub fn first_index(&self) -> usize {
        match self {
            GeneratorFamily::Cyclic { .. } => 0,
            GeneratorFamily::Explicit(_) => 1,
            _ => 1,
        }
    }

    /// Grams families are atomizations of the dyadic valuation monoid; expose
    /// that view so one code path serves both.
    pub(crate) fn atomization_parts(&self) -> Option<(GeneratorFamily, &PrimeSequence)> {
        match self {
            GeneratorFamily::Grams { primes } => {
                Some((GeneratorFamily::Valuation { d: 2 }, primes))
            }
            GeneratorFamily::Atomization { base, primes } => Some(((**base).clone(), primes)),
            _ => None,
        }
    }

    /// The n-th generator. For atomizations this checks the coprimality
    /// conditions involving index n alone; the pairwise conditions are
    /// checked by [`GeneratorFamily::generators_up_to`].
    pub fn generator(&self, n: usize) -> Result<Rational> {
        match self {
            GeneratorFamily::Explicit(gens) => {
                if n == 0 || n > gens.len() {
                    return Err(Error::GeneratorIndexOutOfRange(n));
                }
                Ok(gens[n - 1].clone())
            }
            GeneratorFamily::Cyclic { a, b } => {
                let num = BigInt::from(*a).pow(n as u32);
                let den = BigInt::from(*b).pow(n as u32);
                Rational::new(num, den)
            }
            GeneratorFamily::Valuation { d } => {
                if n == 0 {
                    return Err(Error::GeneratorIndexOutOfRange(0));
                }
                Rational::new(BigInt::one(), BigInt::from(*d).pow(n as u32))
            }
            GeneratorFamily::Grams { .. } | GeneratorFamily::Atomization { .. } => {
                let (base, primes) = self.atomization_parts().unwrap();
                let q = base.generator(n)?;
                let p = primes.nth(n)?;
                let pb = BigInt::from(p);
                if q.numer().gcd(&pb) != BigInt::one() {
                    return Err(Error::GcdViolation {
                        i: n,
                        j: n,
                        detail: format!("gcd(p_{n} = {p}, numerator of base generator {q}) != 1"),
                    });
                }
                if q.denom().gcd(&pb) != BigInt::one() {
                    return Err(Error::GcdViolation {
                        i: n,
                        j: n,
                        detail: format!("gcd(p_{n} = {p}, denominator of base generator {q}) != 1"),
                    });
                }
                Rational::new(q.numer().clone(), q.denom() * pb)
            }
        }
    }

    /// The first k generators (from the family's first index). For
    /// atomizations, validates all pairwise coprimality conditions among the
    /// accessed indices and names the offending pair on failure.
    pub fn generators_up_to(&self, k: usize) -> Result<Vec<Rational>> {
        let first = self.first_index();
        if let Some((base, primes)) = self.atomization_parts() {
            // gcd(p_i, d(q_j)) = 1 for all accessed i, j (i = j re-checked by
            // generator(); the cross conditions are only visible here).
            for i in first..first + k {
                let p = BigInt::from(primes.nth(i)?);
                for j in first..first + k {
                    let qj = base.generator(j)?;
                    if qj.denom().gcd(&p) != BigInt::one() {
                        return Err(Error::GcdViolation {
                            i,
                            j,
                            detail: format!(
                                "gcd(p_{i} = {p}, denominator of base generator q_{j} = {qj}) != 1"
                            ),
                        });
                    }
                }
            }
        }
        (first..first + k).map(|n| self.generator(n)).collect()
    }

    /// Decide membership of `b` in the generated monoid, with a factorization
    /// certificate on success. Decision is exact for the structured families;
    /// explicit families run a complete value-bounded search under `fuel`.
    pub fn membership(&self, b: &Rational, fuel: &mut Fuel) -> Membership {
        if b.is_zero() {
            return Membership::Member(Factorization::empty());
        }
        match self {
            GeneratorFamily::Explicit(_) => {
                let window = self.relevant_indices(b).indices;
                let mut found = None;
                let exhaustive = self.search_window(b, &window, fuel, &mut |f| {
                    found = Some(f.clone());
                    false // stop at the first hit
                });
                match found {
                    Some(f) => Membership::Member(f),
                    None if exhaustive => Membership::NotMember {
                        reason: "complete search over the finite generator list found nothing"
                            .into(),
                    },
                    None => Membership::Unknown,
                }
            }
            GeneratorFamily::Valuation { d } => match valuation_certificate(*d, b) {
                Some(f) => Membership::Member(f),
                None => Membership::NotMember {
                    reason: format!("denominator of {b} is not supported on the primes of {d}"),
                },
            },
            GeneratorFamily::Cyclic { a, b: bb } => match cyclic_digits(*a, *bb, b) {
                Ok(digits) => Membership::Member(digits.certificate()),
                Err(reason) => Membership::NotMember { reason },
            },
            GeneratorFamily::Grams { .. } | GeneratorFamily::Atomization { .. } => {
                let (base, primes) = self.atomization_parts().unwrap();
                let split = match self.residue_split(b) {
                    Ok(split) => split,
                    Err(reason) => return Membership::NotMember { reason },
                };
                match base.membership(&split.remainder, fuel) {
                    Membership::Member(base_cert) => {
                        // Lift the base certificate: one base generator equals
                        // p_n copies of the atomized generator at index n.
                        let mut cert = split.residue_certificate;
                        for (&n, &c) in &base_cert.entries {
                            let p = match primes.nth(n) {
                                Ok(p) => p,
                                Err(_) => {
                                    return Membership::NotMember {
                                        reason: format!(
                                            "base part needs generator index {n} beyond the prime sequence"
                                        ),
                                    }
                                }
                            };
                            cert.add_copies(n, c * p);
                        }
                        Membership::Member(cert)
                    }
                    Membership::NotMember { reason } => Membership::NotMember {
                        reason: format!(
                            "residue-free part {} is outside the base monoid: {reason}",
                            split.remainder
                        ),
                    },
                    Membership::Unknown => Membership::Unknown,
                }
            }
        }
    }

    /// The finite index window whose complete enumeration decides membership
    /// of `b`. `exact` is true for all five family kinds except when prime
    /// factorization of the denominator is infeasible (never at desk scale).
    pub fn relevant_indices(&self, b: &Rational) -> RelevantIndices {
        match self {
            GeneratorFamily::Explicit(gens) => RelevantIndices {
                indices: (1..=gens.len()).collect(),
                exact: true,
            },
            GeneratorFamily::Valuation { d } => {
                let k = min_power_dividing(b.denom(), *d);
                let indices = match k {
                    Some(k) => (1..=k.max(1)).collect(),
                    None => BTreeSet::new(), // not a member; nothing to search
                };
                RelevantIndices {
                    indices,
                    exact: true,
                }
            }
            GeneratorFamily::Cyclic { b: bb, .. } => {
                let t = min_power_dividing(b.denom(), *bb);
                let indices = match t {
                    Some(t) => (0..=t).collect(),
                    None => BTreeSet::new(),
                };
                RelevantIndices {
                    indices,
                    exact: true,
                }
            }
            GeneratorFamily::Grams { .. } | GeneratorFamily::Atomization { .. } => {
                match self.residue_split(b) {
                    Ok(split) => {
                        let (base, _) = self.atomization_parts().unwrap();
                        let mut indices = split.residue_indices.clone();
                        indices.extend(base.relevant_indices(&split.remainder).indices);
                        RelevantIndices {
                            indices,
                            exact: true,
                        }
                    }
                    Err(_) => RelevantIndices {
                        indices: BTreeSet::new(),
                        exact: true, // provably not a member
                    },
                }
            }
        }
    }

    /// Enumerate every factorization of `b` supported on the certified window
    /// (plus the carry slack for cyclic families). Complete within the window
    /// unless fuel runs out, and then says so.
    pub fn factorizations(&self, b: &Rational, fuel: &mut Fuel) -> Result<FactorizationSet> {
        self.factorizations_capped(b, usize::MAX, fuel)
    }

    /// Like [`GeneratorFamily::factorizations`] but stops after `cap` items,
    /// clearing `exhaustive` when the cap cut the search short. An empty
    /// result is still conclusive: the cap was never reached, so the
    /// exhaustive flag reflects the search alone. Elements with a positive
    /// base part factor through every index, so callers that only need a
    /// sample must cap or the search degenerates.
    pub fn factorizations_capped(
        &self,
        b: &Rational,
        cap: usize,
        fuel: &mut Fuel,
    ) -> Result<FactorizationSet> {
        let rel = self.relevant_indices(b);
        let mut window = rel.indices;
        if let GeneratorFamily::Cyclic { .. } = self {
            if let Some(&top) = window.iter().max() {
                for extra in 1..=CYCLIC_WINDOW_SLACK {
                    window.insert(top + extra);
                }
            }
        }
        if cap == 0 {
            return Ok(FactorizationSet {
                items: Vec::new(),
                exhaustive: false,
                window,
            });
        }
        let mut items = Vec::new();
        let complete = self.search_window(b, &window, fuel, &mut |f| {
            items.push(f.clone());
            items.len() < cap
        });
        items.sort();
        Ok(FactorizationSet {
            items,
            exhaustive: complete && rel.exact,
            window,
        })
    }

    /// Lengths of the factorizations over the window.
    pub fn length_set(&self, b: &Rational, fuel: &mut Fuel) -> Result<LengthSet> {
        let set = self.factorizations(b, fuel)?;
        Ok(LengthSet {
            lengths: set.items.iter().map(|f| f.length()).collect(),
            exhaustive: set.exhaustive,
        })
    }

    /// Does `a` divide `b` in the monoid, i.e. is `b - a` a member? The yes
    /// branch certifies the difference.
    pub fn divides(&self, a: &Rational, b: &Rational, fuel: &mut Fuel) -> Decision<Factorization> {
        let diff = match b.checked_sub(a) {
            Some(d) => d,
            None => return Decision::No,
        };
        match self.membership(&diff, fuel) {
            Membership::Member(cert) => Decision::Yes(cert),
            Membership::NotMember { .. } => Decision::No,
            Membership::Unknown => Decision::Unknown,
        }
    }

    /// Is `q` an atom of the monoid? A negative answer carries a witness
    /// split of `q` into two nonzero members. Errors when `q` is zero or not
    /// a member.
    pub fn is_atom(&self, q: &Rational, fuel: &mut Fuel) -> Result<AtomDecision> {
        if q.is_zero() {
            return Err(Error::Precondition("is_atom requires q > 0".into()));
        }
        match self {
            GeneratorFamily::Explicit(_) => {
                // Complete enumeration over the finite family.
                let set = self.factorizations(q, fuel)?;
                if set.items.is_empty() {
                    if set.exhaustive {
                        return Err(Error::NotAMember {
                            element: q.to_string(),
                            reason: "no factorization exists".into(),
                        });
                    }
                    return Ok(AtomDecision::Unknown);
                }
                if let Some(f) = set.items.iter().find(|f| f.length() >= 2) {
                    let (u, v) = self.split_from(f, q)?;
                    return Ok(AtomDecision::NotAtom(u, v));
                }
                if set.exhaustive {
                    Ok(AtomDecision::Atom)
                } else {
                    Ok(AtomDecision::Unknown)
                }
            }
            GeneratorFamily::Valuation { d } => {
                match self.membership(q, fuel) {
                    Membership::Member(cert) => {
                        // Valuation monoids are antimatter: every element splits.
                        let (&n, &c) = cert.entries.iter().next().ok_or_else(|| {
                            Error::Internal("nonzero member with empty certificate".into())
                        })?;
                        if c >= 2 {
                            let g = self.generator(n)?;
                            let rest = q.checked_sub(&g).unwrap();
                            Ok(AtomDecision::NotAtom(g, rest))
                        } else {
                            // q = 1/d^n = 1/d^(n+1) + (d-1)/d^(n+1).
                            let g = self.generator(n + 1)?;
                            let rest = g.mul_u64(*d - 1);
                            Ok(AtomDecision::NotAtom(g, rest))
                        }
                    }
                    Membership::NotMember { reason } => Err(Error::NotAMember {
                        element: q.to_string(),
                        reason,
                    }),
                    Membership::Unknown => Ok(AtomDecision::Unknown),
                }
            }
            _ => {
                // Atomization-style and cyclic families: the canonical
                // certificate has minimal length, and a length-1 canonical
                // certificate forces the factorization to be unique.
                match self.membership(q, fuel) {
                    Membership::Member(cert) => {
                        if cert.length() >= 2 {
                            let (u, v) = self.split_from(&cert, q)?;
                            Ok(AtomDecision::NotAtom(u, v))
                        } else {
                            Ok(AtomDecision::Atom)
                        }
                    }
                    Membership::NotMember { reason } => Err(Error::NotAMember {
                        element: q.to_string(),
                        reason,
                    }),
                    Membership::Unknown => Ok(AtomDecision::Unknown),
                }
            }
        }
    }

    /// Split a length->=2 factorization into (first atom, the rest).
    fn split_from(&self, f: &Factorization, q: &Rational) -> Result<(Rational, Rational)> {
        let (&n, _) = f
            .entries
            .iter()
            .next()
            .ok_or_else(|| Error::Internal("splitting an empty factorization".into()))?;
        let g = self.generator(n)?;
        let rest = q
            .checked_sub(&g)
            .ok_or_else(|| Error::Internal("factorization exceeds its value".into()))?;
        Ok((g, rest))
    }

    /// A strictly decreasing divisibility chain of length `k` whose existence
    /// for every `k` shows the monoid fails the ACCP. Supported for the
    /// non-finitely-generated families with a closed-form chain.
    pub fn accp_witness(&self, k: usize, fuel: &mut Fuel) -> Result<RationalChain> {
        if k < 2 {
            return Err(Error::Precondition("chains need at least two terms".into()));
        }
        let (terms, rule): (Vec<Rational>, String) = match self {
            GeneratorFamily::Explicit(_) => {
                return Err(Error::UnsupportedFamily {
                    required: "a non-finitely-generated family (finitely generated monoids satisfy the ACCP)",
                    found: "explicit".into(),
                })
            }
            GeneratorFamily::Grams { .. } => (
                (1..=k)
                    .map(|n| Rational::new(BigInt::one(), BigInt::from(2).pow(n as u32)))
                    .collect::<Result<_>>()?,
                "term(n) = 1/2^n; term(n) - term(n+1) = 1/2^(n+1) = p_(n+1) copies of generator n+1".into(),
            ),
            GeneratorFamily::Atomization { base, .. } => match &**base {
                &GeneratorFamily::Valuation { d } => (
                    (1..=k)
                        .map(|n| Rational::new(BigInt::one(), BigInt::from(d).pow(n as u32)))
                        .collect::<Result<_>>()?,
                    format!("term(n) = 1/{d}^n; term(n) - term(n+1) = ({d}-1)/{d}^(n+1) = ({d}-1)*p_(n+1) copies of generator n+1"),
                ),
                _ => {
                    return Err(Error::UnsupportedFamily {
                        required: "an atomization of a valuation base",
                        found: "atomization of another base".into(),
                    })
                }
            },
            GeneratorFamily::Valuation { d } => (
                (1..=k)
                    .map(|n| Rational::new(BigInt::one(), BigInt::from(*d).pow(n as u32)))
                    .collect::<Result<_>>()?,
                format!("term(n) = 1/{d}^n; term(n) - term(n+1) = ({d}-1) copies of generator n+1"),
            ),
            GeneratorFamily::Cyclic { a, b } => (
                (0..k)
                    .map(|n| {
                        Rational::new(
                            BigInt::from(*b) * BigInt::from(*a).pow(n as u32),
                            BigInt::from(*b).pow(n as u32),
                        )
                    })
                    .collect::<Result<_>>()?,
                format!("term(n) = {b}*({a}/{b})^n; term(n) - term(n+1) = ({b}-{a})*({a}/{b})^n"),
            ),
        };
        let mut steps = Vec::with_capacity(k - 1);
        for i in 0..k - 1 {
            let diff = terms[i]
                .checked_sub(&terms[i + 1])
                .ok_or_else(|| Error::Internal("chain terms are not decreasing".into()))?;
            if diff.is_zero() {
                return Err(Error::Internal("chain terms are not strictly decreasing".into()));
            }
            let certificate = match self.membership(&diff, fuel) {
                Membership::Member(c) => c,
                _ => {
                    return Err(Error::Internal(format!(
                        "chain difference {diff} is not certified in the monoid"
                    )))
                }
            };
            steps.push(ChainStep {
                difference: diff,
                certificate,
            });
        }
        Ok(ChainWitness { terms, steps, rule })
    }

    /// Residue extraction for atomization-style families: the coefficients
    /// forced modulo each sequence prime dividing the denominator of `b`.
    pub(crate) fn residue_split(&self, b: &Rational) -> std::result::Result<ResidueSplit, String> {
        let (_base, primes) = self
            .atomization_parts()
            .expect("residue_split called on a non-atomization family");
        let mut residue_certificate = Factorization::empty();
        let mut residue_indices = BTreeSet::new();
        let mut remainder = b.clone();
        for (p, _) in factor_supported(b.denom()).map_err(|e| e.to_string())? {
            let Some(n) = primes.index_of(p) else {
                continue; // not a sequence prime; must be absorbed by the base
            };
            let v = b.padic_valuation(p).map_err(|e| e.to_string())?;
            if v <= -2 {
                return Err(format!(
                    "valuation of {b} at the sequence prime {p} is {v} < -1, impossible for a member"
                ));
            }
            if v == -1 {
                let gen = self.generator(n).map_err(|e| e.to_string())?;
                let mut hit = None;
                for c in 1..p {
                    let candidate = gen.mul_u64(c);
                    if let Some(rest) = remainder.checked_sub(&candidate) {
                        if rest.is_zero() || rest.padic_valuation(p).map_err(|e| e.to_string())? >= 0
                        {
                            hit = Some((c, rest));
                            break;
                        }
                    }
                }
                match hit {
                    Some((c, rest)) => {
                        residue_certificate.add_copies(n, c);
                        residue_indices.insert(n);
                        remainder = rest;
                    }
                    None => {
                        return Err(format!(
                            "no residue coefficient at index {n} clears the {p}-adic pole of {b} without going negative"
                        ))
                    }
                }
            }
        }
        Ok(ResidueSplit {
            residue_certificate,
            residue_indices,
            remainder,
        })
    }

    /// Depth-first complete search for coefficient vectors over `window`
    /// summing to `b`. Coefficients for the largest index are chosen first, so
    /// the smallest index varies fastest. `emit` returns false to stop early.
    /// Returns true when the walk covered the whole space.
    fn search_window(
        &self,
        b: &Rational,
        window: &BTreeSet<usize>,
        fuel: &mut Fuel,
        emit: &mut dyn FnMut(&Factorization) -> bool,
    ) -> bool {
        let mut indices: Vec<usize> = window.iter().copied().collect();
        indices.sort_unstable_by(|x, y| y.cmp(x)); // descending
        let mut partial = Factorization::empty();
        self.dfs(b, &indices, 0, &mut partial, fuel, emit)
    }

    fn dfs(
        &self,
        residual: &Rational,
        indices: &[usize],
        at: usize,
        partial: &mut Factorization,
        fuel: &mut Fuel,
        emit: &mut dyn FnMut(&Factorization) -> bool,
    ) -> bool {
        if !fuel.tick() {
            return false;
        }
        if at == indices.len() {
            if residual.is_zero() {
                return emit(partial);
            }
            return true;
        }
        let n = indices[at];
        let gen = match self.generator(n) {
            Ok(g) => g,
            Err(_) => return true,
        };
        let bound = match residual.div_floor(&gen) {
            Ok(b) => b,
            Err(_) => return true,
        };
        let candidates = self.coefficient_candidates(n, residual, &bound);
        for c in candidates {
            let used = gen.mul_int(&c).expect("nonnegative coefficient");
            let Some(rest) = residual.checked_sub(&used) else {
                continue;
            };
            let c_u64 = match c.to_u64() {
                Some(v) => v,
                None => continue, // astronomically large coefficient: outside desk scale
            };
            if c_u64 > 0 {
                partial.add_copies(n, c_u64);
            }
            let go_on = self.dfs(&rest, indices, at + 1, partial, fuel, emit);
            if c_u64 > 0 {
                let e = partial.entries.get_mut(&n).unwrap();
                *e -= c_u64;
                if *e == 0 {
                    partial.entries.remove(&n);
                }
            }
            if !go_on {
                return false;
            }
        }
        true
    }

    /// The coefficients worth trying at index `n` against `residual`,
    /// ascending, filtered by the congruence the family forces.
    fn coefficient_candidates(&self, n: usize, residual: &Rational, bound: &BigInt) -> Vec<BigInt> {
        if bound.is_negative() {
            return Vec::new();
        }
        let all = || {
            let mut v = Vec::new();
            let mut c = BigInt::zero();
            while &c <= bound {
                v.push(c.clone());
                c += 1;
            }
            v
        };
        match self {
            GeneratorFamily::Explicit(_) => all(),
            GeneratorFamily::Grams { .. } | GeneratorFamily::Atomization { .. } => {
                // c_n is forced modulo p_n by the p_n-adic valuation.
                let (_, primes) = self.atomization_parts().unwrap();
                let Ok(p) = primes.nth(n) else { return all() };
                let Ok(gen) = self.generator(n) else {
                    return Vec::new();
                };
                let mut start = None;
                for r in 0..p {
                    let candidate = gen.mul_u64(r);
                    match residual.checked_sub(&candidate) {
                        Some(rest)
                            if rest.is_zero()
                                || rest.padic_valuation(p).map(|v| v >= 0).unwrap_or(false) =>
                        {
                            start = Some(r);
                            break;
                        }
                        _ => {}
                    }
                }
                let Some(r) = start else { return Vec::new() };
                step_range(BigInt::from(r), BigInt::from(p), bound)
            }
            GeneratorFamily::Cyclic { a, b } => {
                // b^n * residual must be integral, and then c_n is forced mod b.
                let bn = BigInt::from(*b).pow(n as u32);
                let scaled_num = residual.numer() * &bn;
                if !(&scaled_num % residual.denom()).is_zero() {
                    return Vec::new();
                }
                let scaled = scaled_num / residual.denom();
                let modulus = BigInt::from(*b);
                let an = BigInt::from(*a).modpow(&BigInt::from(n as u64), &modulus);
                let Some(inv) = mod_inverse(&an, &modulus) else {
                    return Vec::new();
                };
                let r = ((&scaled % &modulus + &modulus) % &modulus * inv) % &modulus;
                step_range(r, modulus, bound)
            }
            GeneratorFamily::Valuation { d } => {
                let dn = BigInt::from(*d).pow(n as u32);
                let scaled_num = residual.numer() * &dn;
                if !(&scaled_num % residual.denom()).is_zero() {
                    return Vec::new();
                }
                let scaled = scaled_num / residual.denom();
                let modulus = BigInt::from(*d);
                let r = (&scaled % &modulus + &modulus) % &modulus;
                step_range(r, modulus, bound)
            }
        }
    }
}

/// `{r, r + m, r + 2m, ...}` up to `bound`.
fn step_range(r: BigInt, m: BigInt, bound: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut c = r;
    while &c <= bound {
        out.push(c.clone());
        c += &m;
    }
    out
}

pub(crate) struct ResidueSplit {
    pub(crate) residue_certificate: Factorization,
    pub(crate) residue_indices: BTreeSet<usize>,
    pub(crate) remainder: Rational,
}

/// Minimal k with `den | d^k`, or None when `den` has a prime outside `d`.
fn min_power_dividing(den: &BigInt, d: u64) -> Option<usize> {
    let d = BigInt::from(d);
    let mut e = den.clone();
    let mut k = 0;
    while !e.is_one() {
        let g = e.gcd(&d);
        if g.is_one() {
            return None;
        }
        // Divide out one "layer" of d: e needs one more factor of d for each
        // step in which it still shares content with d.
        e /= g;
        k += 1;
    }
    Some(k)
}

/// Prime factorization of a denominator: trial division up to one million,
/// then a primality check on the cofactor. Errors on cofactors that are
/// neither prime nor u64, which desk-scale denominators never produce.
pub(crate) fn factor_supported(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    let mut rem = n.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p < 1_000_000 && BigInt::from(p) * BigInt::from(p) <= rem {
        let pb = BigInt::from(p);
        let mut e = 0u32;
        while (&rem % &pb).is_zero() {
            rem /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if !rem.is_one() {
        match rem.to_u64() {
            Some(q) if crate::arith::is_prime(q) => out.push((q, 1)),
            _ => {
                return Err(Error::Precondition(format!(
                    "cannot factor the denominator cofactor {rem}; it exceeds the supported range"
                )))
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(((e.x % m) + m) % m)
}

/// Certificate for a valuation-monoid member: fold s/d^k onto index max(k, 1).
/// None means the denominator is not supported on the primes of d.
fn valuation_certificate(d: u64, b: &Rational) -> Option<Factorization> {
    let k = min_power_dividing(b.denom(), d)?;
    let s = if k == 0 {
        // Integer: s*d copies of 1/d.
        b.numer() * BigInt::from(d)
    } else {
        // b = s/d^k exactly (the denominator divides d^k): s copies of 1/d^k.
        b.numer() * (BigInt::from(d).pow(k as u32) / b.denom())
    };
    let s = s.to_u64().expect("certificate multiplicity fits u64 at desk scale");
    Some(Factorization::single(k.max(1), s))
}

/// Digits of the base-(a/b) expansion: x = nu + sum c_n (a/b)^n, 0 <= c_n < b.
pub(crate) struct CyclicDigits {
    pub nu: BigInt,
    /// index (>= 1) -> digit in [1, b-1]; zero digits are absent.
    pub digits: BTreeMap<usize, u64>,
}

impl CyclicDigits {
    /// nu copies of index 0 plus the digits: the canonical factorization.
    pub fn certificate(&self) -> Factorization {
        let mut f = Factorization::empty();
        let nu = self
            .nu
            .to_u64()
            .expect("integer part of a digit expansion fits u64 at desk scale");
        f.add_copies(0, nu);
        for (&n, &c) in &self.digits {
            f.add_copies(n, c);
        }
        f
    }
}

/// Top-down digit extraction. Sound and complete for any coprime 2 <= a < b:
/// the top digit index of any representation equals the minimal T with
/// denominator(x) | b^T, and each digit is forced modulo b.
pub(crate) fn cyclic_digits(a: u64, b: u64, x: &Rational) -> std::result::Result<CyclicDigits, String> {
    let Some(t) = min_power_dividing(x.denom(), b) else {
        return Err(format!(
            "denominator of {x} is not supported on the primes of {b}"
        ));
    };
    let mut digits = BTreeMap::new();
    let modulus = BigInt::from(b);
    // Work on y = x - (digits so far); t decreases strictly each round.
    let mut y = x.clone();
    for level in (1..=t).rev() {
        // c = (b^level * y) * a^(-level) mod b, defined because b^level * y is
        // integral at this point in the descent.
        let blevel = BigInt::from(b).pow(level as u32);
        let scaled_num = y.numer() * &blevel;
        if !(&scaled_num % y.denom()).is_zero() {
            return Err(format!("internal descent failure at level {level} for {x}"));
        }
        let scaled = scaled_num / y.denom();
        let alevel = BigInt::from(a).modpow(&BigInt::from(level as u64), &modulus);
        let inv = mod_inverse(&alevel, &modulus)
            .expect("a is invertible modulo b by the family precondition");
        let c = ((&scaled % &modulus + &modulus) % &modulus * inv) % &modulus;
        let c_u64 = c.to_u64().unwrap();
        if c_u64 > 0 {
            digits.insert(level, c_u64);
            let gen_val = Rational::new(
                BigInt::from(a).pow(level as u32) * c_u64,
                BigInt::from(b).pow(level as u32),
            )
            .expect("positive digit value");
            y = match y.checked_sub(&gen_val) {
                Some(rest) => rest,
                None => {
                    return Err(format!(
                        "forced digit {c_u64} at level {level} overshoots {x}: not a member"
                    ))
                }
            };
        }
    }
    if !y.is_integer() {
        return Err(format!("descent of {x} left a non-integer remainder {y}"));
    }
    Ok(CyclicDigits {
        nu: y.numer().clone(),
        digits,
    })
}
