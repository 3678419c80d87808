//! Exact computation in Puiseux monoids and their monoid algebras.
//!
//! A Puiseux monoid is an additive submonoid of the nonnegative rationals. This
//! crate builds the classical examples whose atomic structure is interesting
//! (the Grams monoid, atomizations of valuation monoids, rational cyclic
//! monoids), decides membership and divisibility in them, decomposes elements
//! into a greatest divisor from a designated submonoid plus a bounded atomic
//! part, and produces machine-checkable certificates for the two phenomena the
//! examples exhibit:
//!
//! * **atomicity** — factorizations of concrete elements into atoms, and
//! * **failure of the ACCP** — strictly ascending chains of principal ideals,
//!   witnessed term by term with exact divisibility certificates.
//!
//! The same toolkit is provided for a monoid on a formal basis `1, a1, a2, ...`
//! whose atoms come in two families (`formal`), and for the monoid algebras of
//! both kinds of monoid (`algebra`, `formal_algebra`), where monomials with
//! atom exponents are irreducible and bounded searches split non-monomials.
//!
//! Everything is exact: arbitrary-precision rationals, no floating point, and
//! all searches are budgeted by [`Fuel`] so that every answer is `yes`, `no`,
//! or an honest `unknown`.
//!
//! # Quick start
//!
//! ```
//! use grams::monoid::GeneratorFamily;
//! use grams::arith::Rational;
//! use grams::Fuel;
//!
//! // The Grams monoid is generated by 1/(2^n p_n), p_n the n-th odd prime.
//! let m = GeneratorFamily::grams();
//! let gens = m.generators_up_to(4).unwrap();
//! assert_eq!(gens[0], Rational::parse("1/6").unwrap());
//! assert_eq!(gens[1], Rational::parse("1/20").unwrap());
//!
//! // 1/2 lies in the monoid; within its certified index window it factors
//! // exactly one way, as three copies of the first generator.
//! let mut fuel = Fuel::default();
//! let half = Rational::parse("1/2").unwrap();
//! let set = m.factorizations(&half, &mut fuel).unwrap();
//! assert!(set.exhaustive);
//! assert_eq!(set.items.len(), 1);
//! assert_eq!(set.items[0].multiplicity(1), 3);
//! ```
//!
//! # Module map
//!
//! | module | contents |
//! |--------|----------|
//! | [`arith`] | reduced nonnegative rationals, p-adic valuations, prime sequences |
//! | [`monoid`] | generator families, membership, factorizations, divisibility, ACCP witnesses |
//! | [`atomization`] | atomized families, canonical decompositions, greatest divisors |
//! | [`algebra`] | generalized polynomials over a Puiseux monoid, localization, factorization |
//! | [`formal`] | the monoid on a formal basis with doubled-index and telescope atoms |
//! | [`formal_algebra`] | its monoid algebra: embedding, length bounds, monomial extraction |
//! | [`oracle`] | independent brute-force enumeration used to cross-check everything |
//! | [`cert`] | serializable certificates and their standalone re-validation |
//! | [`literal`] | text syntax for families, elements, and polynomials |
//! | [`corpus`] | seeded random corpora used by the verification suites |

pub mod arith;
pub mod monoid;
pub mod atomization;
pub mod algebra;
pub mod formal;
pub mod formal_algebra;
pub mod oracle;
pub mod cert;
pub mod literal;
pub mod corpus;

use serde::{Deserialize, Serialize};

/// Version stamped into every JSON certificate this crate emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Everything that can go wrong across the crate.
///
/// Mathematical negatives (an element is *not* a member, *not* an atom) are
/// ordinary answers, not errors; errors are reserved for violated
/// preconditions, malformed input, and internal inconsistencies that indicate
/// a bug rather than a fact about the monoid.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("value is negative: {0}")]
    NegativeValue(String),
    #[error("cannot parse {what}: {text:?}")]
    Parse { what: &'static str, text: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime sequence entries must be pairwise distinct: {0} repeats")]
    RepeatedPrime(u64),
    #[error("prime sequence index {0} out of range (sequence has {1} entries)")]
    PrimeIndexOutOfRange(usize, usize),
    #[error("p-adic valuation of zero is undefined")]
    ValuationOfZero,
    #[error("generator index {0} out of range for this family")]
    GeneratorIndexOutOfRange(usize),
    #[error("atomization precondition fails at ({i}, {j}): {detail}")]
    GcdViolation { i: usize, j: usize, detail: String },
    #[error("{element} is not a member: {reason}")]
    NotAMember { element: String, reason: String },
    #[error("operation requires {required}, family is {found}")]
    UnsupportedFamily {
        required: &'static str,
        found: String,
    },
    #[error("input must be nonzero and a nonunit for this operation")]
    UnitOrZeroInput,
    #[error("mixed coefficient fields: {0} vs {1}")]
    MixedFields(String, String),
    #[error("mixed ambient families in one polynomial operation")]
    MixedFamilies,
    #[error("search budget exhausted")]
    FuelExhausted,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("certificate invalid: {0}")]
    BadCertificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Budget for bounded searches, counted in candidate states examined.
///
/// Each coefficient vector, candidate multiset, or candidate divisor polynomial
/// examined costs one unit. When the budget runs out, searches return with
/// their `exhaustive` flag cleared (or the answer `unknown`) instead of lying.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fuel {
    remaining: u64,
    start: u64,
}

impl Fuel {
    pub const DEFAULT_BUDGET: u64 = 1_000_000;

    pub fn new(budget: u64) -> Self {
        Fuel {
            remaining: budget,
            start: budget,
        }
    }

    /// Spend one unit. Returns false (and stays at zero) once exhausted.
    pub fn tick(&mut self) -> bool {
        if self.remaining == 0 {
            return false;
        }
        self.remaining -= 1;
        true
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining == 0
    }

    pub fn used(&self) -> u64 {
        self.start - self.remaining
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::new(Fuel::DEFAULT_BUDGET)
    }
}

/// A three-valued answer with a certificate on the positive branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision<C> {
    /// Holds, with evidence.
    Yes(C),
    /// Provably fails.
    No,
    /// The budgeted search ended without deciding.
    Unknown,
}

impl<C> Decision<C> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes(_))
    }
    pub fn is_no(&self) -> bool {
        matches!(self, Decision::No)
    }
    pub fn is_unknown(&self) -> bool {
        matches!(self, Decision::Unknown)
    }
}
