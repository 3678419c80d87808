//! Property tests for the structural invariants: parse round trips,
//! membership soundness, divisibility order laws, decomposition round trips,
//! greatest divisor idempotence, psi growth, and agreement of the closed-form
//! span decision with the exhaustive search.

use num_bigint::BigInt;
use proptest::prelude::*;

use grams::arith::Rational;
use grams::atomization::{canonical_decomposition, cyclic_decomposition, greatest_divisor, AtomizationPair};
use grams::formal::{
    accp_witness, psi, span_a_enumerate, span_a_witness, AtomA, FormalReal,
};
use grams::monoid::GeneratorFamily;
use grams::Fuel;

fn fuel() -> Fuel {
    Fuel::default()
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d)).expect("test rational")
}

/// A random Grams member: a natural part plus small atom multiples.
fn grams_member() -> impl Strategy<Value = Rational> {
    (0u64..4, proptest::collection::vec((1usize..6, 1u64..5), 0..4)).prop_map(|(nat, atoms)| {
        let family = GeneratorFamily::grams();
        let mut b = Rational::from_integer(nat);
        for (n, k) in atoms {
            b = b.add(&family.generator(n).expect("small index").mul_u64(k));
        }
        b
    })
}

/// A random formal vector with small support and coordinates.
fn formal_vector(min_coord: i64) -> impl Strategy<Value = FormalReal> {
    (
        -1i64..3,
        proptest::collection::vec(min_coord..5i64, 0..5),
    )
        .prop_map(|(c0, coords)| {
            FormalReal::new(c0, coords.into_iter().enumerate().map(|(i, c)| (i as u32 + 1, c)))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_parse_display_round_trip(n in 0i64..100_000, d in 1i64..100_000) {
        let r = rat(n, d);
        let back = Rational::parse(&r.to_string()).expect("display output parses");
        prop_assert_eq!(back, r);
    }

    #[test]
    fn padic_valuation_tracks_multiplication(n in 1i64..10_000, d in 1i64..10_000, k in 0u32..6) {
        let p = 3u64;
        let r = rat(n, d);
        let v = r.padic_valuation(p).expect("nonzero");
        let shifted = r.mul(&rat(3i64.pow(k), 1));
        prop_assert_eq!(shifted.padic_valuation(p).expect("nonzero"), v + i64::from(k));
    }

    #[test]
    fn membership_certificates_resum(b in grams_member()) {
        let family = GeneratorFamily::grams();
        match family.membership(&b, &mut fuel()) {
            grams::monoid::Membership::Member(cert) => {
                prop_assert_eq!(cert.value(&family).expect("certificate"), b);
            }
            other => prop_assert!(false, "constructed member rejected: {:?}", other),
        }
    }

    #[test]
    fn squared_primes_are_rejected(n in 1u64..50) {
        // Every atom denominator carries its odd prime to the first power
        // and the forced residue absorbs exactly that power, so a reduced
        // denominator divisible by 9 can never be reached.
        prop_assume!(n % 3 != 0);
        let family = GeneratorFamily::grams();
        let b = rat(n as i64, 9);
        prop_assert!(!family.membership(&b, &mut fuel()).is_member());
    }

    #[test]
    fn divisibility_is_transitive_on_certificates(
        a in grams_member(),
        step1 in grams_member(),
        step2 in grams_member(),
    ) {
        let family = GeneratorFamily::grams();
        let b = a.add(&step1);
        let c = b.add(&step2);
        prop_assert!(family.divides(&a, &b, &mut fuel()).is_yes());
        prop_assert!(family.divides(&b, &c, &mut fuel()).is_yes());
        prop_assert!(family.divides(&a, &c, &mut fuel()).is_yes());
        // Reflexivity at every point.
        prop_assert!(family.divides(&a, &a, &mut fuel()).is_yes());
    }

    #[test]
    fn canonical_decomposition_round_trips(b in grams_member()) {
        let pair = AtomizationPair::grams();
        let d = canonical_decomposition(&pair, &b, &mut fuel()).expect("member");
        prop_assert_eq!(d.value(&pair).expect("re-assembly"), b);
        let again = canonical_decomposition(&pair, &d.nu, &mut fuel()).expect("base part");
        prop_assert_eq!(again.nu, d.nu);
        prop_assert!(again.residues.is_empty());
    }

    #[test]
    fn greatest_divisor_is_idempotent(b in grams_member()) {
        let family = GeneratorFamily::grams();
        let gd = greatest_divisor(&family, &b, &mut fuel()).expect("member");
        prop_assert_eq!(gd.value.add(&gd.atomic_part), b);
        let again = greatest_divisor(&family, &gd.value, &mut fuel()).expect("base part");
        prop_assert_eq!(again.value, gd.value);
        prop_assert!(again.atomic_part.is_zero());
    }

    #[test]
    fn cyclic_decomposition_round_trips(nat in 0u64..4, digits in proptest::collection::vec(0u64..5, 0..5)) {
        // Build a member of the cyclic monoid over q = 2/3 from digit data,
        // then check the decomposition recovers an equal value.
        let family = GeneratorFamily::cyclic(2, 3).expect("cyclic(2,3)");
        let mut b = Rational::from_integer(nat);
        for (i, &k) in digits.iter().enumerate() {
            b = b.add(&family.generator(i).expect("power").mul_u64(k));
        }
        let d = cyclic_decomposition(2, 3, &b).expect("member");
        let total = Rational::new(d.nu.clone(), BigInt::from(1))
            .expect("integer part")
            .add(&d.digit_factorization().value(&family).expect("certificate"));
        prop_assert_eq!(total, b);
    }

    #[test]
    fn psi_grows_along_atoms(x in formal_vector(-1), indices in proptest::collection::btree_set(1u32..6, 1..4), doubled_pick in 0usize..4) {
        let indices: Vec<u32> = indices.into_iter().collect();
        let doubled = doubled_pick % indices.len() + 1;
        let a = AtomA::new(indices, doubled).expect("sorted distinct");
        prop_assert!(psi(&x.add(&a.value())) >= psi(&x) + 1);
    }

    #[test]
    fn span_witness_matches_exhaustive_search(x in formal_vector(0)) {
        let witness = span_a_witness(&x).expect("closed form");
        let search = span_a_enumerate(&x, &mut fuel()).expect("search");
        prop_assert!(search.exhaustive, "grid-scale search must complete");
        match witness {
            Some(atoms) => {
                let mut sum = FormalReal::zero();
                for a in &atoms {
                    sum = sum.add(&a.value());
                }
                prop_assert_eq!(sum, x.clone());
                prop_assert!(!search.solutions.is_empty());
            }
            None => prop_assert!(search.solutions.is_empty()),
        }
    }

    #[test]
    fn formal_parse_display_round_trip(x in formal_vector(-4)) {
        let back = FormalReal::parse(&x.to_string()).expect("display output parses");
        prop_assert_eq!(back, x);
    }

    #[test]
    fn chain_steps_stay_certified(k in 2usize..10) {
        let chain = accp_witness(k).expect("witness");
        prop_assert_eq!(chain.terms.len(), k);
        prop_assert_eq!(chain.steps.len(), k - 1);
        for (i, step) in chain.steps.iter().enumerate() {
            prop_assert!(!step.difference.is_zero());
            prop_assert_eq!(step.certificate.value(), step.difference.clone());
            prop_assert_eq!(chain.terms[i + 1].add(&step.difference), chain.terms[i].clone());
        }
    }
}
