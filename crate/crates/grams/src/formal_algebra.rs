//! The monoid algebra of the formal monoid: polynomials whose exponents are
//! certified members, an embedding into a polynomial layer decomposition,
//! certified factorization-length bounds at orders zero and one, the
//! telescope-square extraction that drives the order induction, and the
//! lifted ascending chain showing the algebra is atomic without the ACCP.
//!
//! Writing `x` for the image of the basis element `1` and `X_n` for the image
//! of `a_n`, every element decomposes by `x`-degree into layers of Laurent
//! monomials in the `X_n`. Units are exactly the nonzero constants. A
//! polynomial of `x`-order at least two is divisible by the monomial
//! `Y^{2b_{m+2}}`, where `m` is the largest telescope index appearing in the
//! exponent certificates; dividing it out lowers the order by two, and the
//! orders zero and one that remain admit certified length bounds, so bounded
//! search settles them.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::algebra::{coefficient_probes, FactorStatus, FieldElement, FieldKind};
use crate::formal::{
    accp_witness, construct_span_a, factor_in_monoid_capped, psi, recognize_atom, AtomB,
    FormalChain, FormalFactorization, FormalReal,
};
use crate::{Error, Fuel, Result};

const POOL_CAP: usize = 16;
const ITEM_CAP: usize = 8;
const SUBSET_CAP: usize = 64;
/// Steps allowed in one trial division before the candidate is declared
/// unresolved (lexicographic descent is not well-founded on the group).
const DIVISION_STEP_CAP: usize = 128;

/// One term of a polynomial: a coefficient and the membership certificate of
/// its exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CertifiedTerm {
    coefficient: FieldElement,
    certificate: FormalFactorization,
}

/// An element of the monoid algebra: a finite sum of `c * Y^e` with every
/// exponent `e` a certified member of the formal monoid.
///
/// Equality ignores which certificate each exponent carries; two polynomials
/// are equal when they have the same terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormalPolynomial {
    field: FieldKind,
    coeffs: BTreeMap<FormalReal, CertifiedTerm>,
}

impl PartialEq for FormalPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .all(|((e1, t1), (e2, t2))| e1 == e2 && t1.coefficient == t2.coefficient)
    }
}

impl Eq for FormalPolynomial {}

impl FormalPolynomial {
    pub fn zero(field: FieldKind) -> FormalPolynomial {
        FormalPolynomial {
            field,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(field: FieldKind) -> FormalPolynomial {
        FormalPolynomial::constant(field, FieldElement::one(field))
    }

    /// A constant polynomial; the zero exponent is certified by the empty
    /// factorization.
    pub fn constant(field: FieldKind, c: FieldElement) -> FormalPolynomial {
        let mut out = FormalPolynomial::zero(field);
        if !c.is_zero() {
            out.insert_certified(
                FormalReal::zero(),
                c,
                FormalFactorization::new(Vec::new(), Vec::new()),
            );
        }
        out
    }

    /// Build a polynomial, combining duplicate exponents, dropping zero
    /// coefficients, and certifying every exponent by the windowed
    /// factorization search.
    pub fn new(
        field: FieldKind,
        terms: impl IntoIterator<Item = (FormalReal, FieldElement)>,
        fuel: &mut Fuel,
    ) -> Result<FormalPolynomial> {
        let mut out = FormalPolynomial::zero(field);
        for (exponent, coefficient) in terms {
            if coefficient.is_zero() {
                continue;
            }
            if coefficient.kind() != field {
                return Err(Error::MixedFields(
                    field.to_string(),
                    coefficient.kind().to_string(),
                ));
            }
            let certificate = certify_exponent(&exponent, fuel)?;
            out.insert_certified(exponent, coefficient, certificate);
        }
        Ok(out)
    }

    pub fn monomial(
        field: FieldKind,
        coefficient: FieldElement,
        exponent: FormalReal,
        fuel: &mut Fuel,
    ) -> Result<FormalPolynomial> {
        FormalPolynomial::new(field, [(exponent, coefficient)], fuel)
    }

    /// Insert a term whose exponent is already certified; existing
    /// coefficients at the same exponent are combined and zeros removed.
    fn insert_certified(
        &mut self,
        exponent: FormalReal,
        coefficient: FieldElement,
        certificate: FormalFactorization,
    ) {
        debug_assert_eq!(certificate.value(), exponent);
        match self.coeffs.get_mut(&exponent) {
            Some(term) => {
                let sum = term
                    .coefficient
                    .add(&coefficient)
                    .expect("same field by construction");
                if sum.is_zero() {
                    self.coeffs.remove(&exponent);
                } else {
                    term.coefficient = sum;
                }
            }
            None => {
                self.coeffs.insert(
                    exponent,
                    CertifiedTerm {
                        coefficient,
                        certificate,
                    },
                );
            }
        }
    }

    pub fn field(&self) -> FieldKind {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormalReal, &FieldElement)> {
        self.coeffs.iter().map(|(e, t)| (e, &t.coefficient))
    }

    pub fn support(&self) -> Vec<FormalReal> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn coefficient(&self, exponent: &FormalReal) -> FieldElement {
        self.coeffs
            .get(exponent)
            .map(|t| t.coefficient.clone())
            .unwrap_or_else(|| FieldElement::zero(self.field))
    }

    /// The membership certificate carried by an exponent of this polynomial.
    pub fn certificate(&self, exponent: &FormalReal) -> Option<&FormalFactorization> {
        self.coeffs.get(exponent).map(|t| &t.certificate)
    }

    /// A unit of the algebra: a nonzero constant (the monoid is reduced, so
    /// no other monomial is invertible).
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.keys().next().unwrap().is_zero()
    }

    /// Minimum `x`-degree (the free coordinate) over the support.
    pub fn ord_x(&self) -> Result<i64> {
        self.coeffs
            .keys()
            .next()
            .map(|e| e.c0)
            .ok_or_else(|| Error::Precondition("the zero polynomial has no order".into()))
    }

    /// Maximum `x`-degree over the support.
    pub fn deg_x(&self) -> Result<i64> {
        self.coeffs
            .keys()
            .next_back()
            .map(|e| e.c0)
            .ok_or_else(|| Error::Precondition("the zero polynomial has no degree".into()))
    }

    pub fn check_compatible(&self, other: &FormalPolynomial) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedFields(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &FormalPolynomial) -> Result<FormalPolynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, t) in &other.coeffs {
            out.insert_certified(e.clone(), t.coefficient.clone(), t.certificate.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FormalPolynomial) -> Result<FormalPolynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, t) in &other.coeffs {
            out.insert_certified(e.clone(), t.coefficient.neg(), t.certificate.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &FieldElement) -> Result<FormalPolynomial> {
        if c.kind() != self.field {
            return Err(Error::MixedFields(self.field.to_string(), c.kind().to_string()));
        }
        let mut out = FormalPolynomial::zero(self.field);
        if c.is_zero() {
            return Ok(out);
        }
        for (e, t) in &self.coeffs {
            out.insert_certified(e.clone(), t.coefficient.mul(c)?, t.certificate.clone());
        }
        Ok(out)
    }

    /// Convolution product; the certificate of a product exponent is the
    /// union of the factor certificates, so no new membership search runs.
    pub fn mul(&self, other: &FormalPolynomial) -> Result<FormalPolynomial> {
        self.check_compatible(other)?;
        let mut out = FormalPolynomial::zero(self.field);
        for (e1, t1) in &self.coeffs {
            for (e2, t2) in &other.coeffs {
                let exponent = e1.add(e2);
                let coefficient = t1.coefficient.mul(&t2.coefficient)?;
                let certificate = FormalFactorization::new(
                    [
                        t1.certificate.b_atoms.clone(),
                        t2.certificate.b_atoms.clone(),
                    ]
                    .concat(),
                    [
                        t1.certificate.a_atoms.clone(),
                        t2.certificate.a_atoms.clone(),
                    ]
                    .concat(),
                );
                out.insert_certified(exponent, coefficient, certificate);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for FormalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, t) in self.coeffs.iter().rev() {
            let c = &t.coefficient;
            let (sep, shown) = match c {
                FieldElement::Q(r) if r.is_negative() && !first => {
                    (" - ", FieldElement::Q(-r.clone()))
                }
                _ if first => ("", c.clone()),
                _ => (" + ", c.clone()),
            };
            write!(f, "{sep}")?;
            if e.is_zero() {
                write!(f, "{shown}")?;
            } else if shown.is_one() {
                write!(f, "Y^{e}")?;
            } else {
                write!(f, "{shown}*Y^{e}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Certify an exponent by the windowed factorization search: the first
/// factorization in search order, an error when the exhaustive window
/// finds none.
fn certify_exponent(exponent: &FormalReal, fuel: &mut Fuel) -> Result<FormalFactorization> {
    let set = factor_in_monoid_capped(exponent, 1, fuel)?;
    match set.items.into_iter().next() {
        Some(cert) => Ok(cert),
        None if set.exhaustive => Err(Error::NotAMember {
            element: exponent.to_string(),
            reason: format!(
                "no factorization into doubled and telescope atoms with telescope index at most {}",
                set.max_b_index
            ),
        }),
        None => Err(Error::FuelExhausted),
    }
}

/// The polynomial-layer view: exponents grouped by their free coordinate,
/// each layer a Laurent polynomial in the alpha coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedForm {
    pub field: FieldKind,
    pub by_x_degree: BTreeMap<i64, BTreeMap<BTreeMap<u32, i64>, FieldElement>>,
}

/// Split a polynomial into `x`-degree layers. Lossless: [`unembed`] inverts
/// it exactly.
pub fn embed(f: &FormalPolynomial) -> EmbeddedForm {
    let mut by_x_degree: BTreeMap<i64, BTreeMap<BTreeMap<u32, i64>, FieldElement>> =
        BTreeMap::new();
    for (e, c) in f.terms() {
        by_x_degree
            .entry(e.c0)
            .or_default()
            .insert(e.alpha.clone(), c.clone());
    }
    EmbeddedForm {
        field: f.field(),
        by_x_degree,
    }
}

/// Reassemble a polynomial from its layers, re-certifying every exponent.
pub fn unembed(e: &EmbeddedForm, fuel: &mut Fuel) -> Result<FormalPolynomial> {
    let mut terms = Vec::new();
    for (&c0, layer) in &e.by_x_degree {
        for (alpha, c) in layer {
            terms.push((
                FormalReal::new(c0, alpha.iter().map(|(&i, &v)| (i, v))),
                c.clone(),
            ));
        }
    }
    FormalPolynomial::new(e.field, terms, fuel)
}

/// Certified bound on the number of nonunit factors of an order-zero
/// nonconstant polynomial: `deg_x f + (max total alpha-degree over the
/// zero layer) + 1`. Sound because total alpha-degree is additive on the
/// zero layer and every nonunit factor contributes at least one to one of
/// the two summands.
pub fn order_zero_length_bound(f: &FormalPolynomial) -> Result<u64> {
    if f.is_zero() || f.is_unit() {
        return Err(Error::UnitOrZeroInput);
    }
    if f.ord_x()? != 0 {
        return Err(Error::Precondition(
            "the order-zero bound needs a polynomial of order zero".into(),
        ));
    }
    let deg = f.deg_x()? as u64;
    let alpha_total = f
        .coeffs
        .keys()
        .filter(|e| e.c0 == 0)
        .map(psi)
        .max()
        .ok_or_else(|| Error::Internal("order zero with an empty zero layer".into()))?;
    Ok(deg + alpha_total + 1)
}

/// Certified bound on the number of nonunit factors of an order-one
/// polynomial: `max psi(e) over the x^1 layer + deg_x f + 1`. The weight of
/// the surviving layer-one exponent of any product grows by at least one per
/// order-zero factor, and factors of positive order contribute to `deg_x`.
pub fn order_one_length_bound(f: &FormalPolynomial) -> Result<u64> {
    if f.is_zero() {
        return Err(Error::UnitOrZeroInput);
    }
    if f.ord_x()? != 1 {
        return Err(Error::Precondition(
            "the order-one bound needs a polynomial of order one".into(),
        ));
    }
    let deg = f.deg_x()? as u64;
    let layer_weight = f
        .coeffs
        .keys()
        .filter(|e| e.c0 == 1)
        .map(psi)
        .max()
        .ok_or_else(|| Error::Internal("order one with an empty first layer".into()))?;
    Ok(layer_weight + deg + 1)
}

/// One telescope-square extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionStep {
    /// The extracted monomial exponent, twice the telescope atom below.
    pub extracted: FormalReal,
    /// Index `m + 2` of the extracted telescope atom, `m` the largest
    /// telescope index across the input's exponent certificates.
    pub b_index: u32,
    pub quotient: FormalPolynomial,
}

/// Divide a polynomial of order at least two by the monomial `Y^{2b_{m+2}}`.
///
/// Every exponent `e` with `n = e.c0` telescope atoms in its certificate
/// rewrites as `2b_{m+2} + (n-2)b_m + a'` where the residue `a'` picks up
/// `+2` at coordinates `m+1` and `m+2`, so the span construction applies and
/// the quotient exponent `e - 2b_{m+2}` gets an explicit new certificate. A
/// construction failure is an internal inconsistency, never a property of
/// the input.
pub fn extract_monomial_step(f: &FormalPolynomial) -> Result<ExtractionStep> {
    if f.is_zero() || f.ord_x()? < 2 {
        return Err(Error::Precondition(
            "extraction needs a polynomial of order at least two".into(),
        ));
    }
    let m = f
        .coeffs
        .values()
        .flat_map(|t| t.certificate.b_atoms.iter().map(|b| b.ell))
        .max()
        .ok_or_else(|| {
            Error::Internal("positive order but no telescope atoms in any certificate".into())
        })?;
    let shift = AtomB::new(m + 2).value().scale(2);
    let mut quotient = FormalPolynomial::zero(f.field);
    for (theta, term) in &f.coeffs {
        let n = term.certificate.b_atoms.len() as i64;
        debug_assert_eq!(n, theta.c0);
        let residue = theta
            .sub(&shift)
            .sub(&AtomB::new(m).value().scale(n - 2));
        let atoms = construct_span_a(&residue).map_err(|e| {
            Error::Internal(format!(
                "extraction residue {residue} escaped the span construction: {e}"
            ))
        })?;
        let certificate =
            FormalFactorization::new(vec![AtomB::new(m); (n - 2) as usize], atoms);
        quotient.insert_certified(theta.sub(&shift), term.coefficient.clone(), certificate);
    }
    Ok(ExtractionStep {
        extracted: shift,
        b_index: m + 2,
        quotient,
    })
}

/// One irreducible (or irreducible-so-far) factor of the monoid algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalAlgebraFactor {
    pub element: FormalPolynomial,
    pub status: FactorStatus,
}

impl fmt::Display for FormalAlgebraFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.element, self.status)
    }
}

/// A factorization `f = unit * prod(factors)` in the monoid algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalAlgebraFactorization {
    pub factors: Vec<FormalAlgebraFactor>,
    /// A unit: a nonzero constant of the field.
    pub unit: FieldElement,
    /// Claimed upper bound for the factorization length: the exact count of
    /// telescope factors extracted while the order exceeded one, plus a
    /// bound holding for every factorization of the remaining order-zero or
    /// order-one piece. When the input itself has order at most one this
    /// bounds every factorization of the input; at higher orders no finite
    /// bound exists (telescope squares refine without limit), so the bound
    /// covers the returned extraction scheme only.
    pub length_bound: u64,
    /// True when `length_bound` is provably correct in the above sense (the
    /// order bounds are theorems; only fuel exhaustion before they apply
    /// leaves it false).
    pub bound_certified: bool,
    pub fuel_used: u64,
}

impl FormalAlgebraFactorization {
    pub fn length(&self) -> usize {
        self.factors.len()
    }

    pub fn all_certified(&self) -> bool {
        self.factors
            .iter()
            .all(|f| f.status != FactorStatus::BoundedOnly)
    }

    /// Re-multiply everything and compare with the input exactly; also insist
    /// that the unit is nonzero and every factor a nonzero nonunit.
    pub fn verify(&self, original: &FormalPolynomial) -> Result<bool> {
        if self.unit.is_zero() || self.unit.kind() != original.field() {
            return Ok(false);
        }
        let mut acc = FormalPolynomial::constant(original.field(), self.unit.clone());
        for factor in &self.factors {
            if factor.element.is_zero() || factor.element.is_unit() {
                return Ok(false);
            }
            acc = acc.mul(&factor.element)?;
        }
        Ok(acc == *original)
    }
}

/// Pointwise lexicographic comparison on the free coordinate, then the alpha
/// coordinates in index order. Translation invariant, so leading terms are
/// additive and trial division in the ambient group algebra is sound.
fn lex_cmp(a: &FormalReal, b: &FormalReal) -> Ordering {
    a.c0.cmp(&b.c0).then_with(|| {
        let top = a.support_max().max(b.support_max()).unwrap_or(0);
        for i in 1..=top {
            let o = a.coeff(i).cmp(&b.coeff(i));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

fn lex_max<'a>(f: &'a FormalPolynomial) -> &'a FormalReal {
    f.coeffs
        .keys()
        .max_by(|a, b| lex_cmp(a, b))
        .expect("nonzero polynomial")
}

fn lex_min<'a>(f: &'a FormalPolynomial) -> &'a FormalReal {
    f.coeffs
        .keys()
        .min_by(|a, b| lex_cmp(a, b))
        .expect("nonzero polynomial")
}

enum DivisionOutcome {
    Quotient(FormalPolynomial),
    NotDivisible,
    /// The step cap was hit before the division resolved either way.
    Unresolved,
}

/// Trial division in the ambient group algebra under the lexicographic
/// order, with a membership post-check on the quotient exponents. Quotients
/// are unique in the ambient domain, so a quotient with a non-member
/// exponent conclusively rules out divisibility in the monoid algebra. The
/// quotient's leading terms descend strictly, and any true quotient term is
/// at least `lexmin(f) - lexmin(d)`, which gives a decisive abort; the step
/// cap guards the rare non-crossing descents.
fn exact_divide(
    f: &FormalPolynomial,
    d: &FormalPolynomial,
    fuel: &mut Fuel,
) -> Result<DivisionOutcome> {
    debug_assert!(!f.is_zero() && !d.is_zero());
    let lead_d = lex_max(d).clone();
    let lead_d_coeff = d.coefficient(&lead_d);
    let quotient_floor = lex_min(f).sub(lex_min(d));
    let mut remainder: BTreeMap<FormalReal, FieldElement> = f
        .terms()
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let mut quotient_terms: Vec<(FormalReal, FieldElement)> = Vec::new();
    let mut steps = 0usize;
    while !remainder.is_empty() {
        if !fuel.tick() {
            return Err(Error::FuelExhausted);
        }
        steps += 1;
        if steps > DIVISION_STEP_CAP {
            return Ok(DivisionOutcome::Unresolved);
        }
        let lead_r = remainder
            .keys()
            .max_by(|a, b| lex_cmp(a, b))
            .expect("nonempty remainder")
            .clone();
        let t = lead_r.sub(&lead_d);
        if lex_cmp(&t, &quotient_floor) == Ordering::Less {
            return Ok(DivisionOutcome::NotDivisible);
        }
        let c = remainder[&lead_r].mul(&lead_d_coeff.inverse()?)?;
        for (e_d, c_d) in d.terms() {
            let e = t.add(e_d);
            let delta = c.mul(c_d)?.neg();
            let entry = remainder
                .entry(e.clone())
                .or_insert_with(|| FieldElement::zero(f.field()));
            *entry = entry.add(&delta)?;
            if entry.is_zero() {
                remainder.remove(&e);
            }
        }
        quotient_terms.push((t, c));
    }
    match FormalPolynomial::new(f.field(), quotient_terms, fuel) {
        Ok(h) => Ok(DivisionOutcome::Quotient(h)),
        Err(Error::NotAMember { .. }) => Ok(DivisionOutcome::NotDivisible),
        Err(e) => Err(e),
    }
}

/// Candidate divisor exponents with their certificates: nonzero partial sums
/// of the windowed factorizations of the exponents of `g`, capped for
/// tractability. The flag reports whether any cap or incomplete window
/// truncated the pool.
fn divisor_pool(
    g: &FormalPolynomial,
    fuel: &mut Fuel,
) -> Result<(Vec<(FormalReal, FormalFactorization)>, bool)> {
    let mut complete = true;
    let mut pool: BTreeMap<FormalReal, FormalFactorization> = BTreeMap::new();
    for theta in g.coeffs.keys() {
        let set = factor_in_monoid_capped(theta, ITEM_CAP + 1, fuel)?;
        if !set.exhaustive || set.items.len() > ITEM_CAP {
            complete = false;
        }
        for item in set.items.iter().take(ITEM_CAP) {
            let atoms: Vec<FormalFactorization> = item
                .b_atoms
                .iter()
                .map(|b| FormalFactorization::new(vec![*b], Vec::new()))
                .chain(
                    item.a_atoms
                        .iter()
                        .map(|a| FormalFactorization::new(Vec::new(), vec![a.clone()])),
                )
                .collect();
            let mut sums = vec![FormalFactorization::new(Vec::new(), Vec::new())];
            'outer: for atom in &atoms {
                let mut next = Vec::with_capacity(sums.len() * 2);
                for s in &sums {
                    next.push(s.clone());
                    next.push(FormalFactorization::new(
                        [s.b_atoms.clone(), atom.b_atoms.clone()].concat(),
                        [s.a_atoms.clone(), atom.a_atoms.clone()].concat(),
                    ));
                    if next.len() >= SUBSET_CAP {
                        complete = false;
                        break 'outer;
                    }
                }
                sums = next;
            }
            for s in sums {
                let value = s.value();
                if !value.is_zero() {
                    pool.entry(value).or_insert(s);
                }
            }
        }
    }
    if pool.len() > POOL_CAP {
        complete = false;
    }
    Ok((pool.into_iter().take(POOL_CAP).collect(), complete))
}

fn consume_budget(budget: &mut u64, n: u64, certified: bool) -> Result<()> {
    if *budget >= n {
        *budget -= n;
        Ok(())
    } else if certified {
        Err(Error::Internal(
            "certified length bound exceeded during splitting".into(),
        ))
    } else {
        *budget = 0;
        Ok(())
    }
}

/// Expand an exponent certificate into atom monomial factors; every atom
/// value matches an atom pattern by construction.
fn push_atom_monomials(
    field: FieldKind,
    cert: &FormalFactorization,
    factors: &mut Vec<FormalAlgebraFactor>,
) {
    let atom_values = cert
        .b_atoms
        .iter()
        .map(|b| {
            let v = b.value();
            (v.clone(), FormalFactorization::new(vec![*b], Vec::new()))
        })
        .chain(cert.a_atoms.iter().map(|a| {
            let v = a.value();
            (v, FormalFactorization::new(Vec::new(), vec![a.clone()]))
        }));
    for (value, certificate) in atom_values {
        debug_assert!(recognize_atom(&value).is_some());
        let mut element = FormalPolynomial::zero(field);
        element.insert_certified(value, FieldElement::one(field), certificate);
        factors.push(FormalAlgebraFactor {
            element,
            status: FactorStatus::CertifiedAtom,
        });
    }
}

/// Recursively split a nonzero nonunit of order at most one, absorbing unit
/// quotients into `unit` and consuming the leaf budget. Leaves that exhaust
/// a complete candidate lattice with forced coefficients are
/// search-certified; truncated searches only claim bounded-only.
fn split_nonunit(
    g: FormalPolynomial,
    factors: &mut Vec<FormalAlgebraFactor>,
    unit: &mut FieldElement,
    budget: &mut u64,
    certified: bool,
    fuel: &mut Fuel,
) -> Result<()> {
    if !fuel.tick() {
        consume_budget(budget, 1, certified)?;
        factors.push(FormalAlgebraFactor {
            element: g,
            status: FactorStatus::BoundedOnly,
        });
        return Ok(());
    }
    let field = g.field();

    // Monomials factor through the exponent's certificate directly.
    if g.num_terms() == 1 {
        let (exponent, term) = g.coeffs.iter().next().expect("single term");
        debug_assert!(!exponent.is_zero(), "units are rejected before splitting");
        consume_budget(budget, term.certificate.length() as u64, certified)?;
        *unit = unit.mul(&term.coefficient)?;
        push_atom_monomials(field, &term.certificate, factors);
        return Ok(());
    }

    let (pool, pool_complete) = divisor_pool(&g, fuel)?;
    let mut decisive = pool_complete;

    // Monomial divisors first: a hit strips a common exponent from every
    // term, and the quotient keeps the term count.
    for (e, cert) in &pool {
        if !fuel.tick() {
            decisive = false;
            break;
        }
        let mut d = FormalPolynomial::zero(field);
        d.insert_certified(e.clone(), FieldElement::one(field), cert.clone());
        match exact_divide(&g, &d, fuel)? {
            DivisionOutcome::Quotient(h) => {
                split_nonunit(d, factors, unit, budget, certified, fuel)?;
                if h.is_unit() {
                    *unit = unit.mul(&h.coefficient(&FormalReal::zero()))?;
                } else {
                    split_nonunit(h, factors, unit, budget, certified, fuel)?;
                }
                return Ok(());
            }
            DivisionOutcome::NotDivisible => {}
            DivisionOutcome::Unresolved => decisive = false,
        }
    }

    // Polynomial divisors: supports drawn from the pool plus the zero
    // exponent (a divisor of a polynomial with a constant term must have one
    // itself, since minimal exponents are additive and the monoid is
    // reduced). Over F2 the coefficients are forced, so an exhausted search
    // is complete relative to the lattice.
    let zero_cert = FormalFactorization::new(Vec::new(), Vec::new());
    let mut entries: Vec<(FormalReal, FormalFactorization)> =
        vec![(FormalReal::zero(), zero_cert)];
    entries.extend(pool.iter().cloned());
    let masks = 1u32
        .checked_shl(entries.len() as u32)
        .map(|m| m - 1)
        .unwrap_or(u32::MAX);
    let probes_forced = field == FieldKind::Fp(2);
    // Each probe pays a full bounded division, so the stage stops after
    // SUBSET_CAP attempts and the truncation downgrades the claim.
    let mut attempts = 0usize;
    'subsets: for mask in 1..=masks {
        if mask.count_ones() < 2 {
            continue;
        }
        let support: Vec<&(FormalReal, FormalFactorization)> = entries
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        let probes = coefficient_probes(field, support.len());
        if probes.is_empty() {
            decisive = false;
        }
        for coeffs in probes {
            if !fuel.tick() {
                consume_budget(budget, 1, certified)?;
                factors.push(FormalAlgebraFactor {
                    element: g,
                    status: FactorStatus::BoundedOnly,
                });
                return Ok(());
            }
            attempts += 1;
            if attempts > SUBSET_CAP {
                decisive = false;
                break 'subsets;
            }
            let mut d = FormalPolynomial::zero(field);
            for ((e, cert), c) in support.iter().zip(coeffs) {
                d.insert_certified(e.clone(), c, cert.clone());
            }
            if d.num_terms() < 2 {
                continue;
            }
            match exact_divide(&g, &d, fuel)? {
                DivisionOutcome::Quotient(h) => {
                    if h.is_unit() {
                        // An associate: only accept when the divisor is
                        // simpler, otherwise the recursion would not make
                        // progress.
                        if d.num_terms() >= g.num_terms() {
                            continue;
                        }
                        *unit = unit.mul(&h.coefficient(&FormalReal::zero()))?;
                        split_nonunit(d, factors, unit, budget, certified, fuel)?;
                    } else {
                        split_nonunit(d, factors, unit, budget, certified, fuel)?;
                        split_nonunit(h, factors, unit, budget, certified, fuel)?;
                    }
                    return Ok(());
                }
                DivisionOutcome::NotDivisible => {}
                DivisionOutcome::Unresolved => decisive = false,
            }
        }
    }

    // No split found over the candidate lattice.
    consume_budget(budget, 1, certified)?;
    factors.push(FormalAlgebraFactor {
        element: g,
        status: if decisive && probes_forced {
            FactorStatus::SearchCertified
        } else {
            FactorStatus::BoundedOnly
        },
    });
    Ok(())
}

/// Factor a nonzero nonunit of the monoid algebra.
///
/// While the order is at least two, the telescope-square extraction divides
/// out `Y^{2b_{m+2}}`, contributing two certified telescope atoms and
/// lowering the order by two. The remaining order-zero or order-one piece is
/// either a monomial, which expands through its exponent certificate, or a
/// polynomial split by bounded divisor search under the certified order
/// bounds.
pub fn factor_in_monoid_algebra(
    f: &FormalPolynomial,
    fuel: &mut Fuel,
) -> Result<FormalAlgebraFactorization> {
    if f.is_zero() || f.is_unit() {
        return Err(Error::UnitOrZeroInput);
    }
    let start = fuel.used();
    let mut factors: Vec<FormalAlgebraFactor> = Vec::new();
    let mut unit = FieldElement::one(f.field());
    let mut g = f.clone();
    let mut extracted = 0u64;
    while g.ord_x()? >= 2 {
        if !fuel.tick() {
            factors.push(FormalAlgebraFactor {
                element: g,
                status: FactorStatus::BoundedOnly,
            });
            return Ok(FormalAlgebraFactorization {
                length_bound: factors.len() as u64,
                bound_certified: false,
                fuel_used: fuel.used() - start,
                factors,
                unit,
            });
        }
        let step = extract_monomial_step(&g)?;
        let beta = AtomB::new(step.b_index);
        let mut element = FormalPolynomial::zero(f.field());
        element.insert_certified(
            beta.value(),
            FieldElement::one(f.field()),
            FormalFactorization::new(vec![beta], Vec::new()),
        );
        for _ in 0..2 {
            factors.push(FormalAlgebraFactor {
                element: element.clone(),
                status: FactorStatus::CertifiedAtom,
            });
        }
        extracted += 2;
        g = step.quotient;
    }

    let (bound, bound_certified) = if g.ord_x()? == 0 {
        (order_zero_length_bound(&g)?, true)
    } else {
        (order_one_length_bound(&g)?, true)
    };
    let mut budget = bound;
    split_nonunit(g, &mut factors, &mut unit, &mut budget, bound_certified, fuel)?;
    Ok(FormalAlgebraFactorization {
        factors,
        unit,
        length_bound: extracted + bound,
        bound_certified,
        fuel_used: fuel.used() - start,
    })
}

/// An ascending chain of principal ideals of the monoid algebra, lifted from
/// the formal monoid chain: the ideal of `Y^{2b_{n+1}}` strictly contains
/// that of `Y^{2b_n}`, with each quotient `Y^{2a_{n+1}}` a certified nonunit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalAlgebraChain {
    pub field: FieldKind,
    pub base: FormalChain,
    pub terms: Vec<FormalPolynomial>,
    pub quotients: Vec<FormalPolynomial>,
}

/// Lift the ACCP-failure witness into the monoid algebra. Each step is
/// validated: the certificate re-sums to the difference, and the difference
/// is nonzero, so the quotient monomial is a nonunit.
pub fn algebra_chain(field: FieldKind, k: usize, fuel: &mut Fuel) -> Result<FormalAlgebraChain> {
    let base = accp_witness(k)?;
    let mut terms = Vec::with_capacity(base.terms.len());
    for value in &base.terms {
        terms.push(FormalPolynomial::monomial(
            field,
            FieldElement::one(field),
            value.clone(),
            fuel,
        )?);
    }
    let mut quotients = Vec::with_capacity(base.steps.len());
    for step in &base.steps {
        if step.certificate.value() != step.difference {
            return Err(Error::BadCertificate(format!(
                "chain certificate {} does not re-sum to the difference {}",
                step.certificate, step.difference
            )));
        }
        if step.difference.is_zero() {
            return Err(Error::BadCertificate(
                "chain difference is zero, so the quotient would be a unit".into(),
            ));
        }
        let mut q = FormalPolynomial::zero(field);
        q.insert_certified(
            step.difference.clone(),
            FieldElement::one(field),
            step.certificate.clone(),
        );
        quotients.push(q);
    }
    Ok(FormalAlgebraChain {
        field,
        base,
        terms,
        quotients,
    })
}
