//! Deterministic test corpora: seeded random elements and polynomials at
//! desk scale, shared by the acceptance suite and the replication command.
//!
//! Every generator takes an explicit seed and uses a counter-based stream
//! cipher RNG, so corpora are identical across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{FieldElement, FieldKind, GenPolynomial};
use crate::arith::Rational;
use crate::formal::{AtomA, AtomB, FormalReal};
use crate::formal_algebra::FormalPolynomial;
use crate::monoid::GeneratorFamily;
use crate::{Fuel, Result};

/// Seed for the decomposition corpus and everything derived from it.
pub const CORPUS_SEED: u64 = 0x67d2_a2b1;

/// Random members of the Grams monoid: sums of at most `max_atoms` atoms
/// with generator indices up to `max_index`, plus a natural part up to 3.
pub fn grams_elements(count: usize, max_atoms: usize, max_index: usize, seed: u64) -> Vec<Rational> {
    let family = GeneratorFamily::grams();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(0..=max_atoms);
        let mut b = Rational::from_integer(rng.gen_range(0..=3));
        for _ in 0..k {
            let n = rng.gen_range(1..=max_index);
            let gen = family.generator(n).expect("index within the family");
            b = b.add(&gen);
        }
        out.push(b);
    }
    out
}

/// Random nonzero polynomials over F2 and the Grams family, with up to
/// `max_terms` distinct exponents drawn from the given member pool.
pub fn grams_polynomials_f2(
    pool: &[Rational],
    count: usize,
    max_terms: usize,
    seed: u64,
    fuel: &mut Fuel,
) -> Result<Vec<GenPolynomial>> {
    let family = GeneratorFamily::grams();
    let field = FieldKind::Fp(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(1..=max_terms);
        let mut exponents = std::collections::BTreeSet::new();
        for _ in 0..k {
            exponents.insert(pool[rng.gen_range(0..pool.len())].clone());
        }
        let terms: Vec<(Rational, FieldElement)> = exponents
            .into_iter()
            .map(|e| (e, FieldElement::one(field)))
            .collect();
        let p = GenPolynomial::new(family.clone(), field, terms, fuel)?;
        // Local units (nonzero constant term) are outside the scope of the
        // factoring routines, so the corpus never produces them.
        if !p.is_zero() && !p.is_local_unit() {
            out.push(p);
        }
    }
    Ok(out)
}

/// The full grid of span candidates: `c0 = 0` and alpha coordinates over
/// indices `1..=max_index`, each ranging over `0..=max_coord`.
pub fn formal_grid(max_index: u32, max_coord: i64) -> Vec<FormalReal> {
    let mut out = Vec::new();
    let mut coords = vec![0i64; max_index as usize];
    loop {
        out.push(FormalReal::new(
            0,
            coords.iter().enumerate().map(|(i, &c)| (i as u32 + 1, c)),
        ));
        let mut pos = 0;
        loop {
            if pos == coords.len() {
                return out;
            }
            coords[pos] += 1;
            if coords[pos] <= max_coord {
                break;
            }
            coords[pos] = 0;
            pos += 1;
        }
    }
}

/// The constructive-span hypothesis: zero free coordinate, nonnegative
/// coordinates, and at least two of them at least 2.
pub fn span_hypothesis(x: &FormalReal) -> bool {
    x.c0 == 0
        && x.alphas_nonnegative()
        && x.alpha.values().filter(|&&c| c >= 2).count() >= 2
}

/// A random doubled atom with indices up to `max_index`.
fn random_a_atom(rng: &mut ChaCha8Rng, max_index: u32) -> AtomA {
    let size = rng.gen_range(1..=max_index.min(3)) as usize;
    let mut indices = std::collections::BTreeSet::new();
    while indices.len() < size {
        indices.insert(rng.gen_range(1..=max_index));
    }
    let indices: Vec<u32> = indices.into_iter().collect();
    let doubled = rng.gen_range(1..=indices.len());
    AtomA::new(indices, doubled).expect("sorted distinct indices")
}

/// Random members of the formal monoid built directly as atom sums:
/// `b_count` controls the free coordinate, so also the polynomial order.
fn random_formal_member(rng: &mut ChaCha8Rng, max_index: u32, b_count: usize) -> FormalReal {
    let mut x = FormalReal::zero();
    for _ in 0..b_count {
        x = x.add(&AtomB::new(rng.gen_range(0..=max_index)).value());
    }
    for _ in 0..rng.gen_range(0..=2) {
        x = x.add(&random_a_atom(rng, max_index).value());
    }
    x
}

/// Random nonzero nonunit polynomials over F2 and the formal basis, with up
/// to `max_terms` distinct member exponents, support indices up to
/// `max_index`, and order at most `max_order`.
pub fn formal_polynomials_f2(
    count: usize,
    max_terms: usize,
    max_index: u32,
    max_order: usize,
    seed: u64,
    fuel: &mut Fuel,
) -> Result<Vec<FormalPolynomial>> {
    let field = FieldKind::Fp(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(1..=max_terms);
        let mut exponents = std::collections::BTreeSet::new();
        for _ in 0..k {
            let b_count = rng.gen_range(0..=max_order);
            exponents.insert(random_formal_member(&mut rng, max_index, b_count));
        }
        let terms: Vec<(FormalReal, FieldElement)> = exponents
            .into_iter()
            .map(|e| (e, FieldElement::one(field)))
            .collect();
        let p = FormalPolynomial::new(field, terms, fuel)?;
        if !p.is_zero() && !p.is_unit() {
            out.push(p);
        }
    }
    Ok(out)
}

/// Random pairs for the weight inequality: `x` a telescope atom plus a few
/// doubled atoms (so a member with free coordinate one), `a` a doubled atom.
pub fn psi_pairs(count: usize, max_index: u32, seed: u64) -> Vec<(FormalReal, AtomA)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let x = random_formal_member(&mut rng, max_index, 1);
        let a = random_a_atom(&mut rng, max_index);
        out.push((x, a));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::Membership;

    #[test]
    fn corpora_are_deterministic() {
        let a = grams_elements(20, 6, 6, CORPUS_SEED);
        let b = grams_elements(20, 6, 6, CORPUS_SEED);
        assert_eq!(a, b);
        let c = grams_elements(20, 6, 6, CORPUS_SEED + 1);
        assert_ne!(a, c);

        let p1 = psi_pairs(10, 4, CORPUS_SEED);
        let p2 = psi_pairs(10, 4, CORPUS_SEED);
        assert_eq!(p1, p2);
    }

    #[test]
    fn grams_elements_are_members() {
        let family = GeneratorFamily::grams();
        let mut fuel = Fuel::default();
        for b in grams_elements(25, 6, 6, CORPUS_SEED) {
            assert!(matches!(
                family.membership(&b, &mut fuel),
                Membership::Member(_)
            ));
        }
    }

    #[test]
    fn grid_size_and_hypothesis_count() {
        let grid = formal_grid(4, 4);
        assert_eq!(grid.len(), 625);
        let hypothesis = grid.iter().filter(|x| span_hypothesis(x)).count();
        assert_eq!(hypothesis, 513);
    }

    #[test]
    fn polynomial_corpora_meet_their_contracts() {
        let mut fuel = Fuel::new(10_000_000);
        let pool = grams_elements(40, 6, 6, CORPUS_SEED);
        let polys = grams_polynomials_f2(&pool, 10, 3, CORPUS_SEED + 7, &mut fuel).unwrap();
        assert_eq!(polys.len(), 10);
        assert!(polys.iter().all(|p| p.num_terms() <= 3 && !p.is_zero()));

        let formal = formal_polynomials_f2(10, 3, 4, 4, CORPUS_SEED + 11, &mut fuel).unwrap();
        assert_eq!(formal.len(), 10);
        for p in &formal {
            assert!(p.num_terms() <= 3);
            assert!(!p.is_zero() && !p.is_unit());
            assert!(p.ord_x().unwrap() <= 4);
            assert!(p.deg_x().unwrap() <= 4);
            assert!(p
                .support()
                .iter()
                .all(|e| e.support_max().unwrap_or(0) <= 4));
        }
    }
}
