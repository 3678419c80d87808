//! Canonical decompositions, greatest divisors, and the submonoid conditions
//! behind constructive factorization in localized monoid algebras.
//!
//! Atomizing a base monoid N along a sequence of fresh primes attaches, to
//! each base generator `q_n`, the atom `q_n / p_n`. Every member of the
//! resulting monoid M splits uniquely as
//!
//! ```text
//!     b = nu + sum over n of r_n * (q_n / p_n),    0 <= r_n < p_n,  nu in N,
//! ```
//!
//! because each residue `r_n` is forced by the `p_n`-adic valuation of `b`.
//! The base part `nu` is the greatest divisor of `b` lying in N, and the
//! atomic part has exactly one factorization into atoms of M. Those two facts
//! are the engine for factoring elements of the monoid algebra localized away
//! from the atomic part: they do not hold for cyclic families (the atomic part
//! there has factorizations of many lengths), and the condition checker below
//! reports exactly that.

use crate::arith::{PrimeSequence, Rational};
use crate::monoid::{Factorization, GeneratorFamily, Membership};
use crate::{Error, Fuel, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A base family together with its atomization along a prime sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomizationPair {
    pub base: GeneratorFamily,
    pub atomized: GeneratorFamily,
    pub primes: PrimeSequence,
}

/// Build the atomization of `base` along `primes`, validating the pairwise
/// coprimality conditions over the first `validate_up_to` indices.
pub fn atomize(
    base: GeneratorFamily,
    primes: PrimeSequence,
    validate_up_to: usize,
) -> Result<AtomizationPair> {
    let atomized = GeneratorFamily::atomization(base.clone(), primes.clone());
    atomized.generators_up_to(validate_up_to)?;
    Ok(AtomizationPair {
        base,
        atomized,
        primes,
    })
}

impl AtomizationPair {
    /// The classical example: the dyadic valuation monoid atomized along the
    /// odd primes, with generators `1/(2^n p_n)`.
    pub fn grams() -> AtomizationPair {
        AtomizationPair {
            base: GeneratorFamily::Valuation { d: 2 },
            atomized: GeneratorFamily::grams(),
            primes: PrimeSequence::OddPrimes,
        }
    }

    /// View an atomization-style family as a pair. Errors for the other
    /// family kinds.
    pub fn from_family(family: &GeneratorFamily) -> Result<AtomizationPair> {
        match family.atomization_parts() {
            Some((base, primes)) => Ok(AtomizationPair {
                base,
                atomized: family.clone(),
                primes: primes.clone(),
            }),
            None => Err(Error::UnsupportedFamily {
                required: "an atomization-style family",
                found: format!("{family:?}"),
            }),
        }
    }
}

/// The unique split of a member into its base part and forced residues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalDecomposition {
    /// The base part: the greatest divisor of the element inside the base.
    pub nu: Rational,
    /// index -> residue in [1, p_n - 1]; absent indices have residue 0.
    #[serde(with = "crate::arith::index_map_serde")]
    pub residues: BTreeMap<usize, u64>,
    /// A factorization of `nu` in the base family.
    pub nu_certificate: Factorization,
}

impl CanonicalDecomposition {
    /// The residues as a factorization in the atomized family. Each entry
    /// uses an atom with multiplicity below its prime, so this is also the
    /// unique atomic factorization of `b - nu`.
    pub fn residue_factorization(&self) -> Factorization {
        Factorization {
            entries: self.residues.iter().map(|(&n, &r)| (n, r)).collect(),
        }
    }

    /// Re-assemble the decomposed element.
    pub fn value(&self, pair: &AtomizationPair) -> Result<Rational> {
        let mut acc = self.nu.clone();
        for (&n, &r) in &self.residues {
            let gen = pair.atomized.generator(n)?;
            acc = acc.add(&gen.mul_u64(r));
        }
        Ok(acc)
    }
}

/// Compute the canonical decomposition of `b` in the atomized monoid.
/// Errors with [`Error::NotAMember`] when `b` is outside it.
pub fn canonical_decomposition(
    pair: &AtomizationPair,
    b: &Rational,
    fuel: &mut Fuel,
) -> Result<CanonicalDecomposition> {
    let split = pair
        .atomized
        .residue_split(b)
        .map_err(|reason| Error::NotAMember {
            element: b.to_string(),
            reason,
        })?;
    let nu_certificate = match pair.base.membership(&split.remainder, fuel) {
        Membership::Member(cert) => cert,
        Membership::NotMember { reason } => {
            return Err(Error::NotAMember {
                element: b.to_string(),
                reason: format!(
                    "residue-free part {} is outside the base monoid: {reason}",
                    split.remainder
                ),
            })
        }
        Membership::Unknown => return Err(Error::FuelExhausted),
    };
    Ok(CanonicalDecomposition {
        nu: split.remainder,
        residues: split.residue_certificate.entries,
        nu_certificate,
    })
}

/// Digit expansion of a cyclic-monoid member: the integer part plus forced
/// base-(a/b) digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicDecomposition {
    /// The integer part.
    #[serde(with = "crate::arith::bigint_serde")]
    pub nu: BigInt,
    /// index (>= 1) -> digit in [1, b - 1].
    #[serde(with = "crate::arith::index_map_serde")]
    pub digits: BTreeMap<usize, u64>,
}

impl CyclicDecomposition {
    pub fn digit_factorization(&self) -> Factorization {
        Factorization {
            entries: self.digits.iter().map(|(&n, &c)| (n, c)).collect(),
        }
    }
}

/// Extract the digit expansion of `x` in the cyclic monoid generated by the
/// powers of `a/b`. Errors when `x` is not a member.
pub fn cyclic_decomposition(a: u64, b: u64, x: &Rational) -> Result<CyclicDecomposition> {
    GeneratorFamily::cyclic(a, b)?;
    let digits = crate::monoid::cyclic_digits(a, b, x).map_err(|reason| Error::NotAMember {
        element: x.to_string(),
        reason,
    })?;
    Ok(CyclicDecomposition {
        nu: digits.nu,
        digits: digits.digits,
    })
}

/// Greatest divisor of `b` lying in the distinguished submonoid, with the
/// certified factorization of the leftover atomic part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreatestDivisorResult {
    /// The divisor itself: the base part of the decomposition.
    pub value: Rational,
    /// `b - value`.
    pub atomic_part: Rational,
    /// The unique (for atomizations) factorization of the atomic part into
    /// atoms of the ambient monoid.
    pub atomic_certificate: Factorization,
}

/// Greatest divisor of `b` inside the distinguished submonoid: the base for
/// atomization-style families, the integer copy of the naturals for cyclic
/// ones. Errors for families without a distinguished submonoid and for
/// non-members.
pub fn greatest_divisor(
    family: &GeneratorFamily,
    b: &Rational,
    fuel: &mut Fuel,
) -> Result<GreatestDivisorResult> {
    match family {
        GeneratorFamily::Grams { .. } | GeneratorFamily::Atomization { .. } => {
            let pair = AtomizationPair::from_family(family)?;
            let dec = canonical_decomposition(&pair, b, fuel)?;
            let atomic_part = b
                .checked_sub(&dec.nu)
                .ok_or_else(|| Error::Internal("base part exceeds the element".into()))?;
            Ok(GreatestDivisorResult {
                value: dec.nu.clone(),
                atomic_part,
                atomic_certificate: dec.residue_factorization(),
            })
        }
        GeneratorFamily::Cyclic { a, b: bb } => {
            let dec = cyclic_decomposition(*a, *bb, b)?;
            let value = Rational::new(dec.nu.clone(), BigInt::from(1))?;
            let atomic_part = b
                .checked_sub(&value)
                .ok_or_else(|| Error::Internal("integer part exceeds the element".into()))?;
            Ok(GreatestDivisorResult {
                value,
                atomic_part,
                atomic_certificate: dec.digit_factorization(),
            })
        }
        other => Err(Error::UnsupportedFamily {
            required: "an atomization-style or cyclic family",
            found: format!("{other:?}"),
        }),
    }
}

/// Outcome of probing the two submonoid conditions used by the localization
/// route to constructive factorization:
///
/// 1. every probed element splits as (greatest base divisor) + (atomic part
///    with a certified factorization into atoms), and
/// 2. the atomic part has exactly one factorization.
///
/// For atomization pairs, condition 2 holds with proof (the residues are
/// forced), so `unique` is certified. For cyclic families the checker looks
/// for distinct factorization lengths over the search window; finding two
/// disproves uniqueness outright.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub checks: Vec<ElementConditionCheck>,
    /// All probes decomposed.
    pub decomposition_holds: bool,
    /// All probed atomic parts had a single factorization, with the
    /// certification note per element in `checks`.
    pub unique_atomic_factorization: bool,
    /// The greatest divisors of the probes are pairwise comparable under
    /// divisibility, as they must be when the submonoid is a valuation
    /// monoid.
    pub divisors_pairwise_comparable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementConditionCheck {
    pub element: Rational,
    pub greatest_divisor: Rational,
    pub atomic_part: Rational,
    /// Factorization lengths of the atomic part found over the window.
    pub atomic_lengths: BTreeSet<u64>,
    /// True when uniqueness of the atomic factorization is established, not
    /// merely unrefuted: forced residues for atomizations, or an exhaustive
    /// single-item window otherwise.
    pub unique_certified: bool,
}

/// Probe the two localization conditions on a list of elements.
pub fn check_localization_conditions(
    family: &GeneratorFamily,
    probes: &[Rational],
    fuel: &mut Fuel,
) -> Result<ConditionReport> {
    let mut checks = Vec::with_capacity(probes.len());
    let mut decomposition_holds = true;
    let mut unique_all = true;
    let forced_residues = matches!(
        family,
        GeneratorFamily::Grams { .. } | GeneratorFamily::Atomization { .. }
    );
    for b in probes {
        let gd = match greatest_divisor(family, b, fuel) {
            Ok(gd) => gd,
            Err(Error::NotAMember { .. }) => {
                decomposition_holds = false;
                checks.push(ElementConditionCheck {
                    element: b.clone(),
                    greatest_divisor: Rational::zero(),
                    atomic_part: Rational::zero(),
                    atomic_lengths: BTreeSet::new(),
                    unique_certified: false,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let set = family.factorizations(&gd.atomic_part, fuel)?;
        let atomic_lengths: BTreeSet<u64> = set.items.iter().map(|f| f.length()).collect();
        let unique_certified = if gd.atomic_part.is_zero() {
            true
        } else if forced_residues {
            // The residues are forced modulo their primes and the base part
            // of the atomic part is zero, so its factorization is unique.
            true
        } else {
            set.exhaustive && set.items.len() == 1
        };
        if set.items.len() != 1 && !gd.atomic_part.is_zero() {
            unique_all = false;
        }
        if !unique_certified {
            unique_all = false;
        }
        checks.push(ElementConditionCheck {
            element: b.clone(),
            greatest_divisor: gd.value,
            atomic_part: gd.atomic_part,
            atomic_lengths,
            unique_certified,
        });
    }
    // The distinguished submonoid must be a valuation monoid: any two of the
    // computed divisors are comparable under divisibility inside it. For
    // cyclic families the submonoid is the copy of the naturals, where
    // comparability is just the ordering of integers.
    let comparator = family
        .atomization_parts()
        .map(|(base, _)| base)
        .unwrap_or_else(|| GeneratorFamily::Explicit(vec![Rational::one()]));
    let divisor_values: Vec<&Rational> = checks.iter().map(|c| &c.greatest_divisor).collect();
    let mut comparable = true;
    for (i, x) in divisor_values.iter().enumerate() {
        for y in divisor_values.iter().skip(i + 1) {
            let forward = comparator.divides(x, y, fuel).is_yes();
            let backward = comparator.divides(y, x, fuel).is_yes();
            if !forward && !backward {
                comparable = false;
            }
        }
    }
    Ok(ConditionReport {
        checks,
        decomposition_holds,
        unique_atomic_factorization: unique_all,
        divisors_pairwise_comparable: comparable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    fn fuel() -> Fuel {
        Fuel::default()
    }

    #[test]
    fn canonical_decomposition_of_grams_members() {
        let pair = AtomizationPair::grams();

        let dec = canonical_decomposition(&pair, &q("13/60"), &mut fuel()).unwrap();
        assert_eq!(dec.nu, q("0"));
        assert_eq!(dec.residues, [(1, 1), (2, 1)].into_iter().collect());
        assert!(dec.nu_certificate.is_empty());
        assert_eq!(dec.value(&pair).unwrap(), q("13/60"));

        let dec = canonical_decomposition(&pair, &q("11/20"), &mut fuel()).unwrap();
        assert_eq!(dec.nu, q("1/2"));
        assert_eq!(dec.residues, [(2, 1)].into_iter().collect());
        assert_eq!(dec.nu_certificate, Factorization::single(1, 1));
        assert_eq!(dec.value(&pair).unwrap(), q("11/20"));

        // Pure base elements have no residues.
        let dec = canonical_decomposition(&pair, &q("7/4"), &mut fuel()).unwrap();
        assert_eq!(dec.nu, q("7/4"));
        assert!(dec.residues.is_empty());

        assert!(matches!(
            canonical_decomposition(&pair, &q("1/9"), &mut fuel()),
            Err(Error::NotAMember { .. })
        ));
    }

    #[test]
    fn greatest_divisor_matches_decomposition() {
        let m = GeneratorFamily::grams();
        let gd = greatest_divisor(&m, &q("11/20"), &mut fuel()).unwrap();
        assert_eq!(gd.value, q("1/2"));
        assert_eq!(gd.atomic_part, q("1/20"));
        assert_eq!(gd.atomic_certificate, Factorization::single(2, 1));

        let gd = greatest_divisor(&m, &q("13/60"), &mut fuel()).unwrap();
        assert_eq!(gd.value, q("0"));
        assert_eq!(gd.atomic_part, q("13/60"));

        let e = GeneratorFamily::explicit(vec![q("1/2")]).unwrap();
        assert!(greatest_divisor(&e, &q("1/2"), &mut fuel()).is_err());
    }

    #[test]
    fn cyclic_decomposition_examples() {
        let dec = cyclic_decomposition(2, 3, &q("2")).unwrap();
        assert_eq!(dec.nu, BigInt::from(2));
        assert!(dec.digits.is_empty());

        let dec = cyclic_decomposition(2, 3, &q("22/9")).unwrap();
        // 22/9 = 2/3 + 4/9 + 1? 2/3 + 4/9 = 10/9, plus 12/9... check: 1 + 2/3 + 2*(4/9)
        // digits are forced: 22/9 = nu + c1*(2/3) + c2*(4/9).
        assert_eq!(dec.digit_factorization().value(&GeneratorFamily::cyclic(2, 3).unwrap()).unwrap()
            .add(&Rational::new(dec.nu.clone(), BigInt::from(1)).unwrap()), q("22/9"));

        assert!(cyclic_decomposition(2, 3, &q("1/3")).is_err());
    }

    #[test]
    fn greatest_divisor_cyclic_integer_part() {
        let c = GeneratorFamily::cyclic(2, 3).unwrap();
        let gd = greatest_divisor(&c, &q("2"), &mut fuel()).unwrap();
        assert_eq!(gd.value, q("2"));
        assert!(gd.atomic_part.is_zero());

        let gd = greatest_divisor(&c, &q("4/3"), &mut fuel()).unwrap();
        assert_eq!(gd.value, q("0"));
        assert_eq!(gd.atomic_part, q("4/3"));
        assert_eq!(gd.atomic_certificate, Factorization::single(1, 2));
    }

    #[test]
    fn localization_conditions_hold_for_atomizations() {
        let m = GeneratorFamily::grams();
        let probes = vec![q("1/2"), q("13/60"), q("11/20"), q("7/4"), q("1/7")];
        let report = check_localization_conditions(&m, &probes, &mut fuel()).unwrap();
        assert!(report.decomposition_holds);
        assert!(report.unique_atomic_factorization);
        assert!(report.divisors_pairwise_comparable);
        for check in &report.checks {
            assert!(check.unique_certified);
        }
    }

    #[test]
    fn localization_uniqueness_fails_for_cyclic() {
        let c = GeneratorFamily::cyclic(2, 3).unwrap();
        let probes = vec![q("4/3")];
        let report = check_localization_conditions(&c, &probes, &mut fuel()).unwrap();
        assert!(report.decomposition_holds);
        assert!(!report.unique_atomic_factorization);
        assert!(report.divisors_pairwise_comparable);
        // The window exhibits two lengths for 4/3: two atoms or three.
        assert_eq!(report.checks[0].atomic_lengths, [2, 3].into_iter().collect());
    }

    #[test]
    fn atomize_validates_and_builds() {
        let pair = atomize(
            GeneratorFamily::valuation(3).unwrap(),
            PrimeSequence::explicit(vec![2, 5]).unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(
            pair.atomized.generators_up_to(2).unwrap(),
            vec![q("1/6"), q("1/45")]
        );

        assert!(atomize(
            GeneratorFamily::valuation(3).unwrap(),
            PrimeSequence::explicit(vec![3, 5]).unwrap(),
            2,
        )
        .is_err());
    }

    #[test]
    fn greatest_divisor_agrees_with_oracle() {
        use crate::oracle;
        use num_traits::ToPrimitive;

        // Mixed universe over grams atoms 1..=4 plus the base elements 1/2,
        // 1/4: the oracle maximizes divisors lying in the base sub-universe.
        let m = GeneratorFamily::grams();
        let mut gens: Vec<Rational> = m.generators_up_to(4).unwrap();
        gens.push(q("1/2"));
        gens.push(q("1/4"));
        let fracs: Vec<oracle::Frac> = gens
            .iter()
            .map(|g| oracle::Frac::new(g.numer().to_i128().unwrap(), g.denom().to_i128().unwrap()))
            .collect();
        let universe = oracle::enumerate(fracs, 5).unwrap();
        let base_indices: BTreeSet<usize> = [4, 5].into_iter().collect();
        let mut compared = 0;
        for v in universe.values() {
            let b = Rational::new(BigInt::from(v.numer()), BigInt::from(v.denom())).unwrap();
            let Ok(gd) = greatest_divisor(&m, &b, &mut fuel()) else {
                continue;
            };
            match oracle::greatest_divisor(&universe, &base_indices, v) {
                oracle::GreatestDivisorOutcome::Maximum(d) => {
                    let oracle_value =
                        Rational::new(BigInt::from(d.numer()), BigInt::from(d.denom())).unwrap();
                    // The oracle maximum can undershoot when the true base
                    // part needs elements outside the truncated universe, and
                    // it can never overshoot the true greatest divisor.
                    if oracle_value == gd.value {
                        compared += 1;
                    } else {
                        let diff = gd.value.checked_sub(&oracle_value);
                        assert!(
                            diff.is_some(),
                            "oracle divisor {oracle_value} exceeds the decomposition value {} for {b}",
                            gd.value
                        );
                    }
                }
                oracle::GreatestDivisorOutcome::NoMaximum(x, y) => {
                    panic!("incomparable base divisors {x:?}, {y:?} for {b}: the base part should dominate");
                }
                oracle::GreatestDivisorOutcome::TargetOutsideUniverse => {}
            }
        }
        assert!(compared >= 20, "too few comparable elements: {compared}");
    }
}
