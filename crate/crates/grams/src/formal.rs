//! The monoid on a formal basis `1, a1, a2, ...` with doubled-index atoms and
//! telescope atoms.
//!
//! Elements are integer coordinate vectors over a basis that is linearly
//! independent by fiat; nothing is ever evaluated numerically. The monoid is
//! generated by two families of atoms:
//!
//! * `A`: finite sums of distinct basis terms `a_i` in which exactly one term
//!   appears twice (`2a1 + a3`), and
//! * `B`: the telescopes `b_l = 1 - (a_1 + ... + a_l)`, with `b0 = 1`.
//!
//! The monoid is atomic with exactly these atoms, yet the chain of principal
//! ideals generated by `2*b_n` ascends forever: `2b_n = 2b_{n+1} + 2a_{n+1}`.
//! This module provides the coordinate arithmetic, the weight functions
//! `omega` and `psi`, the constructive span-membership recursion, exhaustive
//! windowed factorization into atoms, and the chain witness.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::monoid::{ChainStep, ChainWitness};
use crate::{Decision, Error, Fuel, Result};

/// Extra telescope indices searched beyond the support of the target when
/// enumerating factorizations; recorded in every result.
pub const B_INDEX_SLACK: u32 = 4;

/// Largest alpha support size accepted by the span search before it gives up
/// with a non-exhaustive answer (the candidate atom list grows as `s * 2^s`).
const SPAN_SUPPORT_CAP: usize = 16;

/// An element of the group generated by the formal basis: an integer multiple
/// of `1` plus finitely many integer multiples of the `a_i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct FormalReal {
    pub c0: i64,
    /// Finite-support alpha coordinates, no zeros stored.
    pub alpha: BTreeMap<u32, i64>,
}

impl Serialize for FormalReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FormalReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FormalReal::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl FormalReal {
    pub fn new(c0: i64, alpha_coords: impl IntoIterator<Item = (u32, i64)>) -> FormalReal {
        let mut alpha = BTreeMap::new();
        for (i, c) in alpha_coords {
            if c != 0 {
                let entry = alpha.entry(i).or_insert(0);
                *entry += c;
                if *entry == 0 {
                    alpha.remove(&i);
                }
            }
        }
        FormalReal { c0, alpha }
    }

    pub fn zero() -> FormalReal {
        FormalReal::default()
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.alpha.is_empty()
    }

    pub fn coeff(&self, i: u32) -> i64 {
        self.alpha.get(&i).copied().unwrap_or(0)
    }

    pub fn support_max(&self) -> Option<u32> {
        self.alpha.keys().next_back().copied()
    }

    pub fn add(&self, other: &FormalReal) -> FormalReal {
        let mut out = self.clone();
        out.c0 += other.c0;
        for (&i, &c) in &other.alpha {
            let entry = out.alpha.entry(i).or_insert(0);
            *entry += c;
            if *entry == 0 {
                out.alpha.remove(&i);
            }
        }
        out
    }

    pub fn sub(&self, other: &FormalReal) -> FormalReal {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> FormalReal {
        if k == 0 {
            return FormalReal::zero();
        }
        FormalReal {
            c0: self.c0 * k,
            alpha: self.alpha.iter().map(|(&i, &c)| (i, c * k)).collect(),
        }
    }

    /// All alpha coordinates nonnegative (the candidate region for `<A>`).
    pub fn alphas_nonnegative(&self) -> bool {
        self.alpha.values().all(|&c| c >= 0)
    }

    /// Parse the literal `[c0; c1,c2,...]`; the alpha list may be empty and
    /// whitespace is ignored.
    pub fn parse(text: &str) -> Result<FormalReal> {
        let bad = || Error::Parse {
            what: "formal element",
            text: text.into(),
        };
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(bad)?;
        let (head, tail) = inner.split_once(';').ok_or_else(bad)?;
        let c0: i64 = head.trim().parse().map_err(|_| bad())?;
        let mut coords = Vec::new();
        let tail = tail.trim();
        if !tail.is_empty() {
            for (k, piece) in tail.split(',').enumerate() {
                let c: i64 = piece.trim().parse().map_err(|_| bad())?;
                coords.push((k as u32 + 1, c));
            }
        }
        Ok(FormalReal::new(c0, coords))
    }
}

impl fmt::Display for FormalReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};", self.c0)?;
        if let Some(max) = self.support_max() {
            for i in 1..=max {
                if i > 1 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.coeff(i))?;
            }
        }
        write!(f, "]")
    }
}

/// A doubled-index atom: distinct indices `j1 < ... < jl` summed once, with
/// the term at one position counted twice.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomA {
    indices: Vec<u32>,
    /// 1-based position of the doubled term inside `indices`.
    doubled: usize,
}

impl AtomA {
    pub fn new(indices: Vec<u32>, doubled: usize) -> Result<AtomA> {
        if indices.is_empty() {
            return Err(Error::Precondition("doubled atom needs an index".into()));
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Precondition(
                "doubled atom indices must be strictly increasing".into(),
            ));
        }
        if doubled == 0 || doubled > indices.len() {
            return Err(Error::Precondition(format!(
                "doubled position {doubled} out of range 1..={}",
                indices.len()
            )));
        }
        Ok(AtomA { indices, doubled })
    }

    /// The atom `2a_j` on a single index.
    pub fn doubled_only(j: u32) -> AtomA {
        AtomA {
            indices: vec![j],
            doubled: 1,
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// True when the stored data satisfies the constructor invariants.
    /// Deserialized atoms bypass [`AtomA::new`], so certificate validation
    /// must check this before calling [`AtomA::value`].
    pub fn is_well_formed(&self) -> bool {
        !self.indices.is_empty()
            && self.indices.windows(2).all(|w| w[0] < w[1])
            && self.doubled >= 1
            && self.doubled <= self.indices.len()
    }

    /// The index value of the doubled term.
    pub fn doubled_index(&self) -> u32 {
        self.indices[self.doubled - 1]
    }

    pub fn value(&self) -> FormalReal {
        let doubled = self.doubled_index();
        FormalReal::new(
            0,
            self.indices
                .iter()
                .map(|&i| (i, if i == doubled { 2 } else { 1 })),
        )
    }
}

impl fmt::Display for AtomA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let doubled = self.doubled_index();
        let parts: Vec<String> = self
            .indices
            .iter()
            .map(|&i| {
                if i == doubled {
                    format!("2a{i}")
                } else {
                    format!("a{i}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// A telescope atom `b_l = 1 - (a_1 + ... + a_l)`; `b0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AtomB {
    pub ell: u32,
}

impl AtomB {
    pub fn new(ell: u32) -> AtomB {
        AtomB { ell }
    }

    pub fn value(&self) -> FormalReal {
        FormalReal::new(1, (1..=self.ell).map(|i| (i, -1)))
    }
}

impl fmt::Display for AtomB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.ell)
    }
}

/// Either kind of atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormalAtom {
    A(AtomA),
    B(AtomB),
}

impl FormalAtom {
    pub fn value(&self) -> FormalReal {
        match self {
            FormalAtom::A(a) => a.value(),
            FormalAtom::B(b) => b.value(),
        }
    }
}

impl fmt::Display for FormalAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormalAtom::A(a) => write!(f, "{a}"),
            FormalAtom::B(b) => write!(f, "{b}"),
        }
    }
}

/// Recognize an atom by its coordinate pattern: `B` atoms are `c0 = 1` with a
/// contiguous run of `-1`s from index one; `A` atoms are `c0 = 0` with exactly
/// one coordinate `2` and the rest in `{0, 1}`.
pub fn recognize_atom(x: &FormalReal) -> Option<FormalAtom> {
    if x.c0 == 1 {
        let ell = x.support_max().unwrap_or(0);
        for i in 1..=ell {
            if x.coeff(i) != -1 {
                return None;
            }
        }
        return Some(FormalAtom::B(AtomB::new(ell)));
    }
    if x.c0 == 0 && !x.alpha.is_empty() {
        let mut indices = Vec::with_capacity(x.alpha.len());
        let mut doubled_pos = None;
        for (pos, (&i, &c)) in x.alpha.iter().enumerate() {
            match c {
                1 => {}
                2 => {
                    if doubled_pos.is_some() {
                        return None;
                    }
                    doubled_pos = Some(pos + 1);
                }
                _ => return None,
            }
            indices.push(i);
        }
        let doubled = doubled_pos?;
        return Some(FormalAtom::A(AtomA { indices, doubled }));
    }
    None
}

/// The induction weight: the sum of `max(c_i - 1, 0)` over alpha coordinates.
/// Defined only on candidate span elements (`c0 = 0`, all coordinates
/// nonnegative).
pub fn omega(x: &FormalReal) -> Result<u64> {
    if x.c0 != 0 || !x.alphas_nonnegative() {
        return Err(Error::Precondition(
            "omega needs c0 = 0 and nonnegative coordinates".into(),
        ));
    }
    Ok(x.alpha.values().map(|&c| (c - 1).max(0) as u64).sum())
}

/// The weight `psi`: the sum of `max(c_i, 0)` over alpha coordinates, the
/// free-term coordinate ignored. Defined on the whole group.
pub fn psi(x: &FormalReal) -> u64 {
    x.alpha.values().map(|&c| c.max(0) as u64).sum()
}

/// A multiset of atoms summing to a target, the telescope and doubled parts
/// kept separate. The telescope count always equals the target's `c0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormalFactorization {
    pub b_atoms: Vec<AtomB>,
    pub a_atoms: Vec<AtomA>,
}

impl FormalFactorization {
    pub fn new(mut b_atoms: Vec<AtomB>, mut a_atoms: Vec<AtomA>) -> FormalFactorization {
        b_atoms.sort();
        a_atoms.sort();
        FormalFactorization { b_atoms, a_atoms }
    }

    pub fn length(&self) -> usize {
        self.b_atoms.len() + self.a_atoms.len()
    }

    pub fn value(&self) -> FormalReal {
        let mut acc = FormalReal::zero();
        for b in &self.b_atoms {
            acc = acc.add(&b.value());
        }
        for a in &self.a_atoms {
            acc = acc.add(&a.value());
        }
        acc
    }
}

impl fmt::Display for FormalFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.length() == 0 {
            return write!(f, "(empty)");
        }
        let parts: Vec<String> = self
            .b_atoms
            .iter()
            .map(AtomB::to_string)
            .chain(self.a_atoms.iter().map(AtomA::to_string))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Constructive span membership under the two-doubled-coordinates hypothesis.
///
/// Requires `c0 = 0`, all coordinates nonnegative, and at least two distinct
/// coordinates `>= 2`; under that hypothesis the recursion below always
/// produces a multiset of doubled atoms summing exactly to `x`:
///
/// * weight 2: exactly two coordinates equal 2; strip `2a_j` at the smaller,
///   the rest is a single atom;
/// * weight 3 with three 2s: strip `2a_j` and `2a_k` at the two smallest, the
///   rest is a single atom;
/// * weight 3 with a 2 at `j` and a 3 at `k`: split off `2a_j + a_k`, the rest
///   is a single atom (any coordinates equal to 1 ride along in it);
/// * weight >= 4 with three or more coordinates `>= 2`: strip `2a_j` at the
///   smallest and recurse;
/// * weight >= 4 with exactly two, both 3: split into `2a_j + a_k` plus the
///   remainder atom;
/// * weight >= 4 otherwise: one of the two is `>= 4`; strip `2a` there and
///   recurse.
///
/// Ties always break toward the smallest index, so the output is
/// deterministic.
pub fn construct_span_a(x: &FormalReal) -> Result<Vec<AtomA>> {
    let hypothesis =
        x.c0 == 0 && x.alphas_nonnegative() && x.alpha.values().filter(|&&c| c >= 2).count() >= 2;
    if !hypothesis {
        return Err(Error::Precondition(
            "construction needs c0 = 0, nonnegative coordinates, and two coordinates >= 2"
                .into(),
        ));
    }
    let mut rest = x.clone();
    let mut atoms: Vec<AtomA> = Vec::new();
    loop {
        let w = omega(&rest)?;
        let big: Vec<u32> = rest
            .alpha
            .iter()
            .filter(|(_, &c)| c >= 2)
            .map(|(&i, _)| i)
            .collect();
        match w {
            2 => {
                // Exactly two coordinates equal 2.
                let j = big[0];
                rest = rest.sub(&AtomA::doubled_only(j).value());
                atoms.push(AtomA::doubled_only(j));
                atoms.push(single_atom(&rest)?);
                break;
            }
            3 if big.len() == 3 => {
                for &j in &big[..2] {
                    rest = rest.sub(&AtomA::doubled_only(j).value());
                    atoms.push(AtomA::doubled_only(j));
                }
                atoms.push(single_atom(&rest)?);
                break;
            }
            3 => {
                // One coordinate 2 (at j) and one 3 (at k).
                let (j, k) = if rest.coeff(big[0]) == 2 {
                    (big[0], big[1])
                } else {
                    (big[1], big[0])
                };
                let head = pair_atom(j, k)?;
                rest = rest.sub(&head.value());
                atoms.push(head);
                atoms.push(single_atom(&rest)?);
                break;
            }
            _ => {
                if big.len() >= 3 {
                    let j = big[0];
                    rest = rest.sub(&AtomA::doubled_only(j).value());
                    atoms.push(AtomA::doubled_only(j));
                } else {
                    let (j, k) = (big[0], big[1]);
                    if rest.coeff(j) == 3 && rest.coeff(k) == 3 {
                        let head = pair_atom(j, k)?;
                        rest = rest.sub(&head.value());
                        atoms.push(head);
                        atoms.push(single_atom(&rest)?);
                        break;
                    }
                    let m = if rest.coeff(j) >= 4 { j } else { k };
                    rest = rest.sub(&AtomA::doubled_only(m).value());
                    atoms.push(AtomA::doubled_only(m));
                }
            }
        }
    }
    atoms.sort();
    Ok(atoms)
}

/// The atom `2a_j + a_k` (order of `j`, `k` as values is arbitrary; the
/// doubled index is always `j`).
fn pair_atom(j: u32, k: u32) -> Result<AtomA> {
    let (indices, doubled) = if j < k {
        (vec![j, k], 1)
    } else {
        (vec![k, j], 2)
    };
    AtomA::new(indices, doubled)
}

/// Read a remainder that must match a single-atom pattern; failure indicates
/// a bug in the recursion, not a property of the input.
fn single_atom(rest: &FormalReal) -> Result<AtomA> {
    match recognize_atom(rest) {
        Some(FormalAtom::A(a)) => Ok(a),
        _ => Err(Error::Internal(format!(
            "recursion remainder {rest} is not a doubled atom"
        ))),
    }
}

/// Result of the exhaustive span search: every multiset of doubled atoms
/// summing to the target, found in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanSearch {
    pub solutions: Vec<Vec<AtomA>>,
    pub exhaustive: bool,
}

/// Closed-form span membership with a witness, `None` being a certified no.
///
/// Every doubled atom places two units at its doubled index, so an index can
/// host a double only when the target gives it weight at least two. Writing
/// `heavy` for the indices of weight two or more:
///
/// * no heavy index: only the zero vector is coverable;
/// * one heavy index `k`: every atom must double at `k`, contributing two
///   there, so the weight of `k` must be even; the weight-one indices ride
///   along inside one of those atoms;
/// * two or more heavy indices: the constructive cover applies.
pub fn span_a_witness(x: &FormalReal) -> Result<Option<Vec<AtomA>>> {
    if x.c0 != 0 || !x.alphas_nonnegative() {
        return Ok(None);
    }
    if x.is_zero() {
        return Ok(Some(Vec::new()));
    }
    let heavy: Vec<u32> = x
        .alpha
        .iter()
        .filter(|(_, &c)| c >= 2)
        .map(|(&i, _)| i)
        .collect();
    let singles: Vec<u32> = x
        .alpha
        .iter()
        .filter(|(_, &c)| c == 1)
        .map(|(&i, _)| i)
        .collect();
    match heavy.len() {
        0 => Ok(None),
        1 => {
            let k = heavy[0];
            let c = x.coeff(k);
            if c % 2 != 0 {
                return Ok(None);
            }
            let mut indices = singles;
            indices.push(k);
            indices.sort_unstable();
            let pos = indices.iter().position(|&i| i == k).expect("k included") + 1;
            let mut atoms = vec![AtomA::new(indices, pos)?];
            for _ in 1..(c / 2) {
                atoms.push(AtomA::new(vec![k], 1)?);
            }
            Ok(Some(atoms))
        }
        _ => construct_span_a(x).map(Some),
    }
}

/// Enumerate all multisets of doubled atoms summing to `x`. The search is
/// finite: every atom must be supported inside the support of `x`, and atom
/// counts are bounded by half the coordinate sum.
pub fn span_a_enumerate(x: &FormalReal, fuel: &mut Fuel) -> Result<SpanSearch> {
    span_a_enumerate_capped(x, usize::MAX, fuel)
}

/// As [`span_a_enumerate`], but stop after `cap` solutions. A capped stop
/// clears the exhaustive flag; an empty result is still conclusive.
pub fn span_a_enumerate_capped(x: &FormalReal, cap: usize, fuel: &mut Fuel) -> Result<SpanSearch> {
    if x.c0 != 0 || !x.alphas_nonnegative() {
        return Ok(SpanSearch {
            solutions: Vec::new(),
            exhaustive: true,
        });
    }
    if x.is_zero() {
        return Ok(SpanSearch {
            solutions: vec![Vec::new()],
            exhaustive: true,
        });
    }
    if cap == 1 {
        // One solution or a certified no: the closed form answers without
        // searching, which keeps membership rejection cheap everywhere.
        return Ok(match span_a_witness(x)? {
            Some(atoms) => SpanSearch {
                solutions: vec![atoms],
                exhaustive: false,
            },
            None => SpanSearch {
                solutions: Vec::new(),
                exhaustive: true,
            },
        });
    }
    if x.alpha.len() > SPAN_SUPPORT_CAP || cap == 0 {
        return Ok(SpanSearch {
            solutions: Vec::new(),
            exhaustive: false,
        });
    }
    let mut search = SpanSearch {
        solutions: Vec::new(),
        exhaustive: true,
    };
    let mut current = Vec::new();
    span_dfs(x.clone(), None, cap, &mut current, &mut search, fuel);
    Ok(search)
}

/// Decide span membership: the first certificate found, a certified `no`
/// after a complete search, or `unknown` on fuel exhaustion.
pub fn span_a_decide(x: &FormalReal, fuel: &mut Fuel) -> Result<Decision<FormalFactorization>> {
    let search = span_a_enumerate_capped(x, 1, fuel)?;
    Ok(match search.solutions.into_iter().next() {
        Some(atoms) => Decision::Yes(FormalFactorization::new(Vec::new(), atoms)),
        None if search.exhaustive => Decision::No,
        None => Decision::Unknown,
    })
}

/// All doubled atoms that cover the given index and fit pointwise under
/// `rest`, canonically ordered: a candidate takes its doubled coordinate
/// where `rest` has at least two and its single coordinates where `rest` has
/// at least one.
fn covering_atoms(rest: &FormalReal, covered: u32) -> Vec<AtomA> {
    let singles: Vec<u32> = rest
        .alpha
        .iter()
        .filter(|(&i, &c)| i != covered && c >= 1)
        .map(|(&i, _)| i)
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << singles.len().min(63)) {
        let mut indices: Vec<u32> = (0..singles.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| singles[i])
            .collect();
        indices.push(covered);
        indices.sort();
        for pos in 1..=indices.len() {
            if rest.coeff(indices[pos - 1]) >= 2 {
                out.push(AtomA {
                    indices: indices.clone(),
                    doubled: pos,
                });
            }
        }
    }
    out.sort();
    out
}

/// Depth-first enumeration driven by the smallest index still open: every
/// atom of a solution that covers it must be applied before it closes, and
/// forcing those applications into nondecreasing canonical order makes the
/// construction of each multiset unique. Returns false once the search must
/// stop (fuel spent or solution cap reached); both stops clear the
/// exhaustive flag.
fn span_dfs(
    rest: FormalReal,
    phase: Option<(u32, AtomA)>,
    cap: usize,
    current: &mut Vec<AtomA>,
    search: &mut SpanSearch,
    fuel: &mut Fuel,
) -> bool {
    if rest.is_zero() {
        search.solutions.push(current.clone());
        if search.solutions.len() >= cap {
            search.exhaustive = false;
            return false;
        }
        return true;
    }
    let open = rest
        .alpha
        .iter()
        .find(|(_, &c)| c > 0)
        .map(|(&i, _)| i)
        .expect("nonzero nonnegative element has an open index");
    for atom in covering_atoms(&rest, open) {
        if let Some((index, last)) = &phase {
            if *index == open && atom < *last {
                continue;
            }
        }
        if !fuel.tick() {
            search.exhaustive = false;
            return false;
        }
        let next = rest.sub(&atom.value());
        debug_assert!(next.alphas_nonnegative());
        current.push(atom.clone());
        let keep_going = span_dfs(next, Some((open, atom)), cap, current, search, fuel);
        current.pop();
        if !keep_going {
            return false;
        }
    }
    true
}

/// All factorizations of `x` into atoms found over the telescope window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalFactorizationSet {
    pub items: Vec<FormalFactorization>,
    /// True when every telescope multiset over the window and every span
    /// search completed; an empty exhaustive set certifies that `x` has no
    /// factorization within the window.
    pub exhaustive: bool,
    /// Largest telescope index the enumeration ranged over.
    pub max_b_index: u32,
}

/// Enumerate factorizations of `x` into atoms. The telescope multiset has
/// size exactly `x.c0` (each telescope atom contributes one to the free
/// coordinate, doubled atoms none), with indices bounded by the support of
/// `x` plus [`B_INDEX_SLACK`]; the residual is decided by the exhaustive span
/// search. Factorizations using telescopes beyond the window are not
/// reported, so `exhaustive` certifies completeness over the window only.
pub fn factor_in_monoid(x: &FormalReal, fuel: &mut Fuel) -> Result<FormalFactorizationSet> {
    factor_in_monoid_capped(x, usize::MAX, fuel)
}

/// As [`factor_in_monoid`], but stop after `cap` factorizations. A capped
/// stop clears the exhaustive flag; an empty result is still conclusive.
pub fn factor_in_monoid_capped(
    x: &FormalReal,
    cap: usize,
    fuel: &mut Fuel,
) -> Result<FormalFactorizationSet> {
    let max_b_index = x.support_max().unwrap_or(0) + B_INDEX_SLACK;
    let mut set = FormalFactorizationSet {
        items: Vec::new(),
        exhaustive: true,
        max_b_index,
    };
    if cap == 0 {
        set.exhaustive = false;
        return Ok(set);
    }
    if x.c0 < 0 {
        return Ok(set);
    }
    let mut chosen: Vec<AtomB> = Vec::new();
    b_multiset_dfs(x, x.c0 as usize, 0, max_b_index, cap, &mut chosen, &mut set, fuel)?;
    set.items.sort();
    Ok(set)
}

fn b_multiset_dfs(
    x: &FormalReal,
    remaining: usize,
    min_ell: u32,
    max_ell: u32,
    cap: usize,
    chosen: &mut Vec<AtomB>,
    set: &mut FormalFactorizationSet,
    fuel: &mut Fuel,
) -> Result<bool> {
    if remaining == 0 {
        if !fuel.tick() {
            set.exhaustive = false;
            return Ok(false);
        }
        let mut residual = x.clone();
        for b in chosen.iter() {
            residual = residual.sub(&b.value());
        }
        if !residual.alphas_nonnegative() {
            return Ok(true);
        }
        let span = span_a_enumerate_capped(&residual, cap - set.items.len(), fuel)?;
        if !span.exhaustive {
            set.exhaustive = false;
        }
        for a_atoms in span.solutions {
            set.items
                .push(FormalFactorization::new(chosen.clone(), a_atoms));
        }
        return Ok(set.items.len() < cap && !fuel.is_exhausted());
    }
    for ell in min_ell..=max_ell {
        chosen.push(AtomB::new(ell));
        let keep_going =
            b_multiset_dfs(x, remaining - 1, ell, max_ell, cap, chosen, set, fuel)?;
        chosen.pop();
        if !keep_going {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A chain witness over the formal monoid.
pub type FormalChain = ChainWitness<FormalReal, FormalFactorization>;

/// The ACCP-failure witness: terms `2b_n` for `n = 1..=k`, each difference
/// `2b_n - 2b_{n+1} = 2a_{n+1}` certified as a single doubled atom.
pub fn accp_witness(k: usize) -> Result<FormalChain> {
    if k < 1 {
        return Err(Error::Precondition(
            "chain length must be at least one".into(),
        ));
    }
    let term = |n: u32| AtomB::new(n).value().scale(2);
    let terms: Vec<FormalReal> = (1..=k as u32).map(term).collect();
    let mut steps = Vec::with_capacity(k - 1);
    for n in 1..k as u32 {
        let difference = term(n).sub(&term(n + 1));
        let atom = AtomA::doubled_only(n + 1);
        debug_assert_eq!(difference, atom.value().scale(1));
        steps.push(ChainStep {
            difference,
            certificate: FormalFactorization::new(Vec::new(), vec![atom]),
        });
    }
    Ok(ChainWitness {
        terms,
        steps,
        rule: "term n is 2*b_n; term n minus term n+1 is the atom 2*a_{n+1}".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{a_span_member, Coords};

    fn fuel() -> Fuel {
        Fuel::default()
    }

    fn fr(text: &str) -> FormalReal {
        FormalReal::parse(text).unwrap()
    }

    #[test]
    fn coordinate_arithmetic() {
        let sum = AtomB::new(1).value().add(&AtomA::doubled_only(1).value());
        assert_eq!(sum, fr("[1;1]"));
        assert!(sum.sub(&sum).is_zero());
        assert_eq!(AtomB::new(2).value().scale(2), fr("[2;-2,-2]"));
        assert_eq!(fr("[1;-1,0,2]").coeff(3), 2);
        assert_eq!(fr("[1;-1,0,2]").coeff(2), 0);
        assert_eq!(fr("[2;]"), FormalReal::new(2, []));
    }

    #[test]
    fn display_and_parse_round_trip() {
        for text in ["[0;]", "[1;-1,0,2]", "[2;-2,-2]", "[0;2,1,1]"] {
            assert_eq!(fr(text).to_string(), text);
        }
        assert_eq!(fr("[ 1 ; -1 , 0 , 2 ]"), fr("[1;-1,0,2]"));
        assert!(FormalReal::parse("1;2").is_err());
        assert_eq!(AtomA::new(vec![1, 3], 1).unwrap().to_string(), "2a1+a3");
        assert_eq!(AtomB::new(2).to_string(), "b2");
    }

    #[test]
    fn weights() {
        assert_eq!(omega(&fr("[0;2,2]")).unwrap(), 2);
        assert_eq!(omega(&fr("[0;2,3]")).unwrap(), 3);
        assert_eq!(omega(&fr("[0;1,1]")).unwrap(), 0);
        assert!(omega(&fr("[1;1]")).is_err());
        assert!(omega(&fr("[0;-1]")).is_err());

        assert_eq!(psi(&fr("[1;-1,0,2]")), 2);
        assert_eq!(psi(&FormalReal::zero()), 0);
        assert_eq!(psi(&fr("[0;2,1]")), 3);
    }

    #[test]
    fn construction_base_cases() {
        let atoms = construct_span_a(&fr("[0;2,2]")).unwrap();
        assert_eq!(
            atoms,
            vec![AtomA::doubled_only(1), AtomA::doubled_only(2)]
        );

        let atoms = construct_span_a(&fr("[0;2,3]")).unwrap();
        assert_eq!(
            atoms,
            vec![
                AtomA::new(vec![1, 2], 1).unwrap(),
                AtomA::doubled_only(2)
            ]
        );

        let atoms = construct_span_a(&fr("[0;3,3]")).unwrap();
        assert_eq!(
            atoms,
            vec![
                AtomA::new(vec![1, 2], 1).unwrap(),
                AtomA::new(vec![1, 2], 2).unwrap()
            ]
        );

        assert!(construct_span_a(&fr("[0;2,1]")).is_err());
        assert!(construct_span_a(&fr("[1;2,2]")).is_err());
    }

    #[test]
    fn construction_covers_a_grid() {
        // Everything with two coordinates >= 2 must construct and re-sum.
        for c1 in 0..=4i64 {
            for c2 in 0..=4i64 {
                for c3 in 0..=4i64 {
                    let x = FormalReal::new(0, [(1, c1), (2, c2), (3, c3)]);
                    let hypothesis =
                        [c1, c2, c3].iter().filter(|&&c| c >= 2).count() >= 2;
                    let out = construct_span_a(&x);
                    assert_eq!(out.is_ok(), hypothesis, "at {x}");
                    if let Ok(atoms) = out {
                        let sum = atoms
                            .iter()
                            .fold(FormalReal::zero(), |acc, a| acc.add(&a.value()));
                        assert_eq!(sum, x, "re-sum at {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn span_decisions() {
        assert!(span_a_decide(&fr("[0;1]"), &mut fuel()).unwrap().is_no());
        let yes = span_a_decide(&fr("[0;2]"), &mut fuel()).unwrap();
        match yes {
            Decision::Yes(cert) => {
                assert_eq!(cert.a_atoms, vec![AtomA::doubled_only(1)]);
                assert!(cert.b_atoms.is_empty());
            }
            _ => panic!("2a1 lies in the span"),
        }
        // One doubled coordinate plus two singles: a single atom, found by
        // the exhaustive search even though the construction hypothesis
        // fails.
        let yes = span_a_decide(&fr("[0;2,1,1]"), &mut fuel()).unwrap();
        match yes {
            Decision::Yes(cert) => {
                assert_eq!(cert.a_atoms, vec![AtomA::new(vec![1, 2, 3], 1).unwrap()]);
            }
            _ => panic!("2a1+a2+a3 is an atom"),
        }
        assert!(span_a_decide(&fr("[0;-1]"), &mut fuel()).unwrap().is_no());
        assert!(span_a_decide(&FormalReal::zero(), &mut fuel())
            .unwrap()
            .is_yes());
    }

    #[test]
    fn span_agrees_with_oracle() {
        for c1 in 0..=3i64 {
            for c2 in 0..=3i64 {
                for c3 in 0..=3i64 {
                    let x = FormalReal::new(0, [(1, c1), (2, c2), (3, c3)]);
                    let ours = span_a_decide(&x, &mut fuel()).unwrap();
                    let oracle = a_span_member(&Coords::new(vec![0, c1, c2, c3]));
                    assert_eq!(ours.is_yes(), oracle, "at {x}");
                    assert!(!ours.is_unknown());
                }
            }
        }
    }

    #[test]
    fn factoring_members_and_non_members() {
        // One telescope forced, residual 2a2.
        let set = factor_in_monoid(&fr("[1;-1,2]"), &mut fuel()).unwrap();
        assert!(set.exhaustive);
        assert_eq!(
            set.items,
            vec![FormalFactorization::new(
                vec![AtomB::new(1)],
                vec![AtomA::doubled_only(2)]
            )]
        );

        // 1 + a1 factors once per telescope index in the window.
        let set = factor_in_monoid(&fr("[1;1]"), &mut fuel()).unwrap();
        assert!(set.exhaustive);
        assert_eq!(set.max_b_index, 1 + B_INDEX_SLACK);
        assert_eq!(set.items.len(), B_INDEX_SLACK as usize + 1);
        let expected = FormalFactorization::new(
            vec![AtomB::new(1)],
            vec![AtomA::doubled_only(1)],
        );
        assert!(set.items.contains(&expected));
        for item in &set.items {
            assert_eq!(item.value(), fr("[1;1]"));
            assert_eq!(item.b_atoms.len() as i64, 1);
        }

        let set = factor_in_monoid(&fr("[0;-1]"), &mut fuel()).unwrap();
        assert!(set.exhaustive);
        assert!(set.items.is_empty());

        let set = factor_in_monoid(&fr("[-1;]"), &mut fuel()).unwrap();
        assert!(set.exhaustive);
        assert!(set.items.is_empty());
    }

    #[test]
    fn atom_recognition_patterns() {
        assert_eq!(
            recognize_atom(&fr("[1;]")),
            Some(FormalAtom::B(AtomB::new(0)))
        );
        assert_eq!(
            recognize_atom(&fr("[1;-1,-1]")),
            Some(FormalAtom::B(AtomB::new(2)))
        );
        assert_eq!(
            recognize_atom(&fr("[0;2,1]")),
            Some(FormalAtom::A(AtomA::new(vec![1, 2], 1).unwrap()))
        );
        assert_eq!(
            recognize_atom(&fr("[0;1,2]")),
            Some(FormalAtom::A(AtomA::new(vec![1, 2], 2).unwrap()))
        );
        for non_atom in ["[0;1,1]", "[1;-1,1]", "[0;3]", "[2;-2]", "[1;0,-1]", "[0;]"] {
            assert_eq!(recognize_atom(&fr(non_atom)), None, "at {non_atom}");
        }
    }

    #[test]
    fn atom_recognition_matches_brute_force() {
        // Over a small grid: recognized atoms are exactly the members all of
        // whose windowed factorizations are the atom itself.
        for c0 in 0..=1i64 {
            for c1 in -2..=2i64 {
                for c2 in -2..=2i64 {
                    let x = FormalReal::new(c0, [(1, c1), (2, c2)]);
                    if x.is_zero() {
                        continue;
                    }
                    let set = factor_in_monoid(&x, &mut fuel()).unwrap();
                    assert!(set.exhaustive);
                    let brute_atom =
                        !set.items.is_empty() && set.items.iter().all(|f| f.length() == 1);
                    assert_eq!(
                        recognize_atom(&x).is_some(),
                        brute_atom,
                        "at {x}: {:?}",
                        set.items
                    );
                }
            }
        }
    }

    #[test]
    fn psi_grows_along_span_atoms() {
        // x in B + <A>, a in A implies psi(x + a) >= psi(x) + 1.
        let xs = [fr("[1;-1]"), fr("[1;-1,-1]"), fr("[1;1]"), fr("[1;-1,2]")];
        let atoms = [
            AtomA::doubled_only(1),
            AtomA::doubled_only(3),
            AtomA::new(vec![1, 2], 2).unwrap(),
            AtomA::new(vec![1, 2, 3], 1).unwrap(),
        ];
        for x in &xs {
            for a in &atoms {
                assert!(
                    psi(&x.add(&a.value())) >= psi(x) + 1,
                    "at {x} + {a}"
                );
            }
        }
    }

    #[test]
    fn chain_witness() {
        let chain = accp_witness(2).unwrap();
        assert_eq!(chain.terms, vec![fr("[2;-2]"), fr("[2;-2,-2]")]);
        assert_eq!(chain.steps.len(), 1);
        assert_eq!(chain.steps[0].difference, fr("[0;0,2]"));
        assert_eq!(
            chain.steps[0].certificate.a_atoms,
            vec![AtomA::doubled_only(2)]
        );

        let chain = accp_witness(1).unwrap();
        assert_eq!(chain.terms.len(), 1);
        assert!(chain.steps.is_empty());

        let chain = accp_witness(4).unwrap();
        assert_eq!(chain.terms.len(), 4);
        for (n, step) in chain.steps.iter().enumerate() {
            assert_eq!(
                step.certificate.a_atoms,
                vec![AtomA::doubled_only(n as u32 + 2)]
            );
            // Differences re-sum and each certificate passes the atom
            // pattern check.
            assert_eq!(step.certificate.value(), step.difference);
            assert!(recognize_atom(&step.difference).is_some());
            assert_eq!(
                chain.terms[n + 1].add(&step.difference),
                chain.terms[n]
            );
        }

        assert!(accp_witness(0).is_err());
    }
}
