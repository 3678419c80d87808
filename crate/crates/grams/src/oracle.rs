//! Independent brute-force enumeration, used to cross-check the constructive
//! modules.
//!
//! Everything here is deliberately self-contained: its fraction type is a bare
//! `i128` pair with its own Euclidean gcd, its membership test is a finite
//! multiset enumeration, and its span decision is a memoized recursion. None
//! of the search logic from [`crate::monoid`] or [`crate::formal`] is reused,
//! so agreement between the two paths is evidence rather than tautology.
//! Desk-scale inputs only: at most 12 generators and 8 atoms per sum.

use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Hard caps for universe construction. Brute force must stay brute force.
pub const MAX_GENERATORS: usize = 12;
pub const MAX_ATOMS: usize = 8;

/// Elements the oracle can enumerate: they add, optionally subtract, and have
/// a total order so sets are deterministic.
pub trait OracleElem: Ord + Clone + fmt::Debug {
    fn zero() -> Self;
    fn plus(&self, other: &Self) -> Self;
    /// `self - other` where defined inside the ambient structure
    /// (`None` when a fraction would go negative).
    fn minus(&self, other: &Self) -> Option<Self>;
}

/// A fraction with its own arithmetic, kept apart from the crate's
/// [`crate::arith::Rational`] on purpose. `i128` is ample at oracle scale and
/// overflow panics loudly instead of wrapping.
#[derive(Clone, PartialEq, Eq)]
pub struct Frac {
    num: i128,
    den: i128, // > 0, gcd(num, den) = 1
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Cross multiplication; denominators are positive by construction.
        let left = self.num.checked_mul(other.den).expect("oracle fraction overflow");
        let right = other.num.checked_mul(self.den).expect("oracle fraction overflow");
        left.cmp(&right)
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Frac {
    pub fn new(num: i128, den: i128) -> Frac {
        assert!(den != 0, "oracle fraction with zero denominator");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_i128(num.abs(), den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        Frac { num, den }
    }

    pub fn from_u64(num: u64, den: u64) -> Frac {
        Frac::new(num as i128, den as i128)
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }
}

impl fmt::Debug for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a.max(1)
}

impl OracleElem for Frac {
    fn zero() -> Self {
        Frac { num: 0, den: 1 }
    }

    fn plus(&self, other: &Self) -> Self {
        let num = self
            .num
            .checked_mul(other.den)
            .and_then(|x| other.num.checked_mul(self.den).and_then(|y| x.checked_add(y)))
            .expect("oracle fraction overflow");
        let den = self.den.checked_mul(other.den).expect("oracle fraction overflow");
        Frac::new(num, den)
    }

    fn minus(&self, other: &Self) -> Option<Self> {
        let num = self
            .num
            .checked_mul(other.den)
            .and_then(|x| other.num.checked_mul(self.den).and_then(|y| x.checked_sub(y)))
            .expect("oracle fraction overflow");
        let den = self.den.checked_mul(other.den).expect("oracle fraction overflow");
        let d = Frac::new(num, den);
        if d.is_negative() {
            None
        } else {
            Some(d)
        }
    }
}

/// An integer coordinate vector `(c0; c1, c2, ...)` for formal-basis elements,
/// dense and trimmed. Subtraction is total: coordinates may be negative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Coords(pub Vec<i64>);

impl Coords {
    /// `coords[0]` is the basis-1 coordinate; `coords[i]` multiplies `a_i`.
    pub fn new(mut coords: Vec<i64>) -> Coords {
        while coords.len() > 1 && *coords.last().unwrap() == 0 {
            coords.pop();
        }
        if coords.is_empty() {
            coords.push(0);
        }
        Coords(coords)
    }
}

impl OracleElem for Coords {
    fn zero() -> Self {
        Coords(vec![0])
    }

    fn plus(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![0i64; n];
        for (i, s) in v.iter_mut().enumerate() {
            *s = self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0);
        }
        Coords::new(v)
    }

    fn minus(&self, other: &Self) -> Option<Self> {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![0i64; n];
        for (i, s) in v.iter_mut().enumerate() {
            *s = self.0.get(i).copied().unwrap_or(0) - other.0.get(i).copied().unwrap_or(0);
        }
        Some(Coords::new(v))
    }
}

/// How many times each generator index is used in one representation.
pub type Rep = BTreeMap<usize, u32>;

/// Every element reachable as a sum of at most `max_atoms` generators,
/// together with every representation that produces it.
#[derive(Debug, Clone)]
pub struct EnumerationUniverse<T: OracleElem> {
    generators: Vec<T>,
    max_atoms: usize,
    elements: BTreeMap<T, BTreeSet<Rep>>,
}

/// Build the universe by depth-first multiset enumeration over nondecreasing
/// generator indices. Errors when the desk-scale caps are exceeded.
pub fn enumerate<T: OracleElem>(generators: Vec<T>, max_atoms: usize) -> Result<EnumerationUniverse<T>> {
    if generators.len() > MAX_GENERATORS {
        return Err(Error::Precondition(format!(
            "oracle universes allow at most {MAX_GENERATORS} generators, got {}",
            generators.len()
        )));
    }
    if max_atoms > MAX_ATOMS {
        return Err(Error::Precondition(format!(
            "oracle universes allow at most {MAX_ATOMS} atoms per sum, got {max_atoms}"
        )));
    }
    let mut elements: BTreeMap<T, BTreeSet<Rep>> = BTreeMap::new();
    let mut rep: Rep = BTreeMap::new();
    let zero = T::zero();
    walk(&generators, max_atoms, 0, &zero, &mut rep, &mut elements);
    Ok(EnumerationUniverse {
        generators,
        max_atoms,
        elements,
    })
}

fn walk<T: OracleElem>(
    gens: &[T],
    budget: usize,
    start: usize,
    value: &T,
    rep: &mut Rep,
    out: &mut BTreeMap<T, BTreeSet<Rep>>,
) {
    out.entry(value.clone()).or_default().insert(rep.clone());
    if budget == 0 {
        return;
    }
    for i in start..gens.len() {
        let next = value.plus(&gens[i]);
        *rep.entry(i).or_insert(0) += 1;
        walk(gens, budget - 1, i, &next, rep, out);
        let c = rep.get_mut(&i).unwrap();
        *c -= 1;
        if *c == 0 {
            rep.remove(&i);
        }
    }
}

impl<T: OracleElem> EnumerationUniverse<T> {
    pub fn generators(&self) -> &[T] {
        &self.generators
    }

    pub fn max_atoms(&self) -> usize {
        self.max_atoms
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, v: &T) -> bool {
        self.elements.contains_key(v)
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.elements.keys()
    }

    pub fn reps(&self, v: &T) -> Option<&BTreeSet<Rep>> {
        self.elements.get(v)
    }

    /// Generator indices whose value is never a sum of two or more generators.
    pub fn atoms(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (i, g) in self.generators.iter().enumerate() {
            let splittable = self
                .reps(g)
                .map(|rs| rs.iter().any(|r| r.values().sum::<u32>() >= 2))
                .unwrap_or(false);
            if !splittable {
                out.insert(i);
            }
        }
        out
    }

    /// Values representable using only the given generator indices.
    pub fn sub_universe_values(&self, indices: &BTreeSet<usize>) -> BTreeSet<T> {
        let mut out = BTreeSet::new();
        for (v, reps) in &self.elements {
            if reps.iter().any(|r| r.keys().all(|i| indices.contains(i))) {
                out.insert(v.clone());
            }
        }
        out
    }
}

/// Outcome of the brute-force greatest-divisor computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreatestDivisorOutcome<T> {
    /// The divisor set had a maximum under divisibility-within-the-universe.
    Maximum(T),
    /// Two divisors neither of which divides the other; the set has no
    /// maximum as far as the universe can see.
    NoMaximum(T, T),
    /// `b` itself is outside the universe, so the question is ill-posed here.
    TargetOutsideUniverse,
}

/// Over the sub-universe spanned by `n_indices`, find the divisors of `b`
/// (those `d` with `b - d` back in the universe) and check that they have a
/// maximum under the same divisibility.
pub fn greatest_divisor<T: OracleElem>(
    universe: &EnumerationUniverse<T>,
    n_indices: &BTreeSet<usize>,
    b: &T,
) -> GreatestDivisorOutcome<T> {
    if !universe.contains(b) {
        return GreatestDivisorOutcome::TargetOutsideUniverse;
    }
    let n_values = universe.sub_universe_values(n_indices);
    let mut divisors: Vec<T> = Vec::new();
    for d in &n_values {
        if let Some(rest) = b.minus(d) {
            if universe.contains(&rest) {
                divisors.push(d.clone());
            }
        }
    }
    // A maximum must divide-over every other divisor.
    'cand: for cand in &divisors {
        for d in &divisors {
            match cand.minus(d) {
                Some(diff) if universe.contains(&diff) => {}
                _ => continue 'cand,
            }
        }
        return GreatestDivisorOutcome::Maximum(cand.clone());
    }
    // No candidate dominated all others: exhibit one incomparable pair.
    for a in &divisors {
        for d in &divisors {
            let a_over_d = a.minus(d).map(|x| universe.contains(&x)).unwrap_or(false);
            let d_over_a = d.minus(a).map(|x| universe.contains(&x)).unwrap_or(false);
            if !a_over_d && !d_over_a {
                return GreatestDivisorOutcome::NoMaximum(a.clone(), d.clone());
            }
        }
    }
    GreatestDivisorOutcome::TargetOutsideUniverse
}

/// Independent membership decision for the span of doubled-index atoms: is
/// `target` a sum of vectors that are 1 on a set of alpha indices and 2 on one
/// of them (basis-1 coordinate zero)?
///
/// Memoized recursion over residuals; complete because any atom in a sum must
/// be supported inside the target's support with nonnegative slack.
pub fn a_span_member(target: &Coords) -> bool {
    if target.0[0] != 0 || target.0.iter().any(|&c| c < 0) {
        return false;
    }
    let support: Vec<usize> = (1..target.0.len()).filter(|&i| target.0[i] > 0).collect();
    let atoms = a_atoms_over(&support);
    let mut memo: BTreeMap<Coords, bool> = BTreeMap::new();
    decide(target, &atoms, &mut memo)
}

fn decide(residual: &Coords, atoms: &[Coords], memo: &mut BTreeMap<Coords, bool>) -> bool {
    if residual.0.iter().all(|&c| c == 0) {
        return true;
    }
    if residual.0.iter().any(|&c| c < 0) {
        return false;
    }
    if let Some(&hit) = memo.get(residual) {
        return hit;
    }
    let mut ok = false;
    for a in atoms {
        if let Some(next) = residual.minus(a) {
            if next.0.iter().all(|&c| c >= 0) && decide(&next, atoms, memo) {
                ok = true;
                break;
            }
        }
    }
    memo.insert(residual.clone(), ok);
    ok
}

/// All doubled-index atoms supported inside the given alpha indices.
fn a_atoms_over(support: &[usize]) -> Vec<Coords> {
    let mut out = Vec::new();
    let n = support.len();
    for mask in 1u32..(1 << n) {
        let chosen: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| support[i]).collect();
        for &doubled in &chosen {
            let dim = chosen.iter().max().unwrap() + 1;
            let mut v = vec![0i64; dim];
            for &i in &chosen {
                v[i] = 1;
            }
            v[doubled] = 2;
            out.push(Coords::new(v));
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(s: &str) -> Frac {
        match s.split_once('/') {
            Some((n, d)) => Frac::new(n.parse().unwrap(), d.parse().unwrap()),
            None => Frac::new(s.parse().unwrap(), 1),
        }
    }

    #[test]
    fn single_generator_universe() {
        let u = enumerate(vec![frac("1/6")], 3).unwrap();
        let values: Vec<Frac> = u.values().cloned().collect();
        assert_eq!(values, vec![frac("0"), frac("1/6"), frac("1/3"), frac("1/2")]);
    }

    #[test]
    fn two_generator_universe_counts() {
        // Sums of at most two of {1/6, 1/20}: six distinct values.
        let u = enumerate(vec![frac("1/6"), frac("1/20")], 2).unwrap();
        assert_eq!(u.len(), 6);
        assert!(u.contains(&frac("13/60")));
        assert!(u.contains(&frac("1/10")));
        assert!(u.contains(&frac("1/3")));
    }

    #[test]
    fn caps_are_enforced() {
        let gens: Vec<Frac> = (1..=13).map(|i| Frac::new(1, i)).collect();
        assert!(enumerate(gens, 2).is_err());
        assert!(enumerate(vec![frac("1")], 9).is_err());
    }

    #[test]
    fn grams_truncation_atoms() {
        // 1/(2^n p_n) for n = 1..5; every generator should remain an atom.
        let gens = vec![
            Frac::new(1, 6),
            Frac::new(1, 20),
            Frac::new(1, 56),
            Frac::new(1, 176),
            Frac::new(1, 416),
        ];
        let u = enumerate(gens, 6).unwrap();
        assert_eq!(u.atoms(), (0..5).collect::<BTreeSet<_>>());
    }

    #[test]
    fn valuation_generators_are_not_atoms() {
        // 1/2 = 1/4 + 1/4 inside the universe, so index 0 is not an atom.
        let u = enumerate(vec![frac("1/2"), frac("1/4"), frac("1/8")], 4).unwrap();
        let atoms = u.atoms();
        assert!(!atoms.contains(&0));
        assert!(!atoms.contains(&1)); // 1/4 = 1/8 + 1/8
        assert!(atoms.contains(&2)); // 1/16 is not a generator here
    }

    #[test]
    fn greatest_divisor_in_mixed_universe() {
        // Grams atoms 1..3 plus dyadic generators 1/2 and 1/4.
        let gens = vec![
            Frac::new(1, 6),
            Frac::new(1, 20),
            Frac::new(1, 56),
            Frac::new(1, 2),
            Frac::new(1, 4),
        ];
        let u = enumerate(gens, 6).unwrap();
        let n: BTreeSet<usize> = [3, 4].into_iter().collect();
        assert_eq!(
            greatest_divisor(&u, &n, &frac("11/20")),
            GreatestDivisorOutcome::Maximum(frac("1/2"))
        );
        // A pure atomic element has greatest dyadic divisor zero.
        assert_eq!(
            greatest_divisor(&u, &n, &frac("13/60")),
            GreatestDivisorOutcome::Maximum(frac("0"))
        );
    }

    #[test]
    fn formal_universe() {
        // Two formal generators: 2a1 (doubled first index) and b1 = 1 - a1.
        let two_a1 = Coords::new(vec![0, 2]);
        let b1 = Coords::new(vec![1, -1]);
        let u = enumerate(vec![two_a1.clone(), b1.clone()], 2).unwrap();
        assert_eq!(u.len(), 6);
        assert!(u.contains(&Coords::new(vec![0, 0]))); // zero
        assert!(u.contains(&Coords::new(vec![0, 4]))); // 4a1
        assert!(u.contains(&Coords::new(vec![1, 1]))); // 2a1 + b1
        assert!(u.contains(&Coords::new(vec![2, -2]))); // 2b1
    }

    #[test]
    fn a_span_membership_examples() {
        // 2a1 + a2 + a3 is a single atom; a1 alone is not in the span.
        assert!(a_span_member(&Coords::new(vec![0, 2, 1, 1])));
        assert!(!a_span_member(&Coords::new(vec![0, 1])));
        // 2a1 + 2a2 = (2a1) + (2a2).
        assert!(a_span_member(&Coords::new(vec![0, 2, 2])));
        // A vector with basis-1 coordinate cannot be in the alpha span.
        assert!(!a_span_member(&Coords::new(vec![1, 2, 2])));
        // All-ones over three indices: every atom has a doubled coordinate,
        // and stripping one atom forces a negative somewhere.
        assert!(!a_span_member(&Coords::new(vec![0, 1, 1, 1])));
    }
}
