//! Generalized polynomial algebras over a Puiseux monoid and their
//! localizations.
//!
//! For a field `F` and a Puiseux monoid `M` the monoid algebra `F[M]` consists
//! of finite sums `sum c_m X^m` with exponents `m` drawn from `M`. Inverting
//! every element with nonzero constant term localizes the algebra at the
//! maximal ideal spanned by the monomials of positive exponent; in that local
//! ring the units are exactly the elements `g` with `g(0) != 0`, and the
//! irreducible elements track the atoms of `M`: when the greatest-divisor
//! decomposition of `M` is available, has unique atomic factorizations, and
//! produces pairwise comparable divisors, a monomial `X^a` is irreducible
//! precisely when `a` is an atom.
//!
//! [`factor_in_localization`] turns that structure into concrete
//! factorizations: it strips the common greatest divisor `q` off the support,
//! expands `X^q` into certified atom monomials, and splits the remaining
//! nonunit by a bounded divisor search whose length budget comes from the
//! factorization lengths of the order of the element. Every produced
//! factorization verifies by exact multiplication, and every factor carries an
//! honest [`FactorStatus`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{is_prime, Rational};
use crate::atomization::{check_localization_conditions, greatest_divisor};
use crate::monoid::{
    mod_inverse, AtomDecision, Factorization, GeneratorFamily, Membership, RationalChain,
};
use crate::{Error, Fuel, Result};

/// Coefficient field: the rationals or a prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Q,
    Fp(u64),
}

impl FieldKind {
    /// Parse `q`/`Q` or `f<p>`/`F<p>`/`<p>` with `p` prime.
    pub fn parse(text: &str) -> Result<FieldKind> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(FieldKind::Q);
        }
        let digits = t.strip_prefix(['f', 'F']).unwrap_or(t);
        let p: u64 = digits.parse().map_err(|_| Error::Parse {
            what: "field",
            text: text.into(),
        })?;
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldKind::Fp(p))
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Q => write!(f, "Q"),
            FieldKind::Fp(p) => write!(f, "F{p}"),
        }
    }
}

impl Serialize for FieldKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        FieldKind::parse(&text).map_err(D::Error::custom)
    }
}

/// An element of the coefficient field, tagged with which field it lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldElement {
    Q(BigRational),
    Fp { p: u64, value: u64 },
}

impl FieldElement {
    pub fn kind(&self) -> FieldKind {
        match self {
            FieldElement::Q(_) => FieldKind::Q,
            FieldElement::Fp { p, .. } => FieldKind::Fp(*p),
        }
    }

    pub fn zero(kind: FieldKind) -> FieldElement {
        FieldElement::from_integer(kind, 0)
    }

    pub fn one(kind: FieldKind) -> FieldElement {
        FieldElement::from_integer(kind, 1)
    }

    pub fn from_integer(kind: FieldKind, n: i64) -> FieldElement {
        match kind {
            FieldKind::Q => FieldElement::Q(BigRational::from_integer(BigInt::from(n))),
            FieldKind::Fp(p) => FieldElement::Fp {
                p,
                value: n.rem_euclid(p as i64) as u64,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Q(r) => r.is_zero(),
            FieldElement::Fp { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Q(r) => r.is_one(),
            FieldElement::Fp { value, .. } => *value == 1,
        }
    }

    fn check_same(&self, other: &FieldElement) -> Result<()> {
        if self.kind() == other.kind() {
            Ok(())
        } else {
            Err(Error::MixedFields(
                self.kind().to_string(),
                other.kind().to_string(),
            ))
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (FieldElement::Q(a), FieldElement::Q(b)) => FieldElement::Q(a + b),
            (FieldElement::Fp { p, value: a }, FieldElement::Fp { value: b, .. }) => {
                FieldElement::Fp {
                    p: *p,
                    value: (a + b) % p,
                }
            }
            _ => unreachable!("kinds checked"),
        })
    }

    pub fn neg(&self) -> FieldElement {
        match self {
            FieldElement::Q(r) => FieldElement::Q(-r),
            FieldElement::Fp { p, value } => FieldElement::Fp {
                p: *p,
                value: (p - value) % p,
            },
        }
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (FieldElement::Q(a), FieldElement::Q(b)) => FieldElement::Q(a * b),
            (FieldElement::Fp { p, value: a }, FieldElement::Fp { value: b, .. }) => {
                FieldElement::Fp {
                    p: *p,
                    value: ((*a as u128 * *b as u128) % *p as u128) as u64,
                }
            }
            _ => unreachable!("kinds checked"),
        })
    }

    pub fn inverse(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::Precondition(
                "division by zero in the coefficient field".into(),
            ));
        }
        Ok(match self {
            FieldElement::Q(r) => FieldElement::Q(r.recip()),
            FieldElement::Fp { p, value } => {
                let inv = mod_inverse(&BigInt::from(*value), &BigInt::from(*p))
                    .ok_or_else(|| Error::Internal("noninvertible prime field element".into()))?;
                FieldElement::Fp {
                    p: *p,
                    value: u64::try_from(inv)
                        .map_err(|_| Error::Internal("modular inverse out of range".into()))?,
                }
            }
        })
    }

    /// Parse a coefficient: `-3/4` over `Q`, any integer (reduced mod `p`)
    /// over a prime field.
    pub fn parse(kind: FieldKind, text: &str) -> Result<FieldElement> {
        let t = text.trim();
        let bad = || Error::Parse {
            what: "field element",
            text: text.into(),
        };
        match kind {
            FieldKind::Q => {
                let (ns, ds) = match t.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (t, "1"),
                };
                let n: BigInt = ns.trim().parse().map_err(|_| bad())?;
                let d: BigInt = ds.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::ZeroDenominator);
                }
                Ok(FieldElement::Q(BigRational::new(n, d)))
            }
            FieldKind::Fp(p) => {
                let n: i128 = t.parse().map_err(|_| bad())?;
                Ok(FieldElement::Fp {
                    p,
                    value: n.rem_euclid(p as i128) as u64,
                })
            }
        }
    }
}

/// Short rendering used inside polynomials: `3/4`, `-2`, or the residue.
impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Q(r) => write!(f, "{r}"),
            FieldElement::Fp { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FieldElement::Q(r) => s.collect_str(r),
            FieldElement::Fp { p, value } => s.collect_str(&format_args!("{value} mod {p}")),
        }
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let parsed = match text.split_once(" mod ") {
            Some((v, p)) => {
                let p: u64 = p.trim().parse().map_err(D::Error::custom)?;
                FieldElement::parse(FieldKind::Fp(p), v)
            }
            None => FieldElement::parse(FieldKind::Q, &text),
        };
        parsed.map_err(D::Error::custom)
    }
}

/// A generalized polynomial: finitely many terms `c * X^e` with exponents in
/// the monoid of a [`GeneratorFamily`] and coefficients in one field.
///
/// Construction validates every exponent's membership; sums and products never
/// need re-validation because the monoid is closed under addition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenPolynomial {
    family: GeneratorFamily,
    field: FieldKind,
    coeffs: BTreeMap<Rational, FieldElement>,
}

impl GenPolynomial {
    pub fn zero(family: GeneratorFamily, field: FieldKind) -> GenPolynomial {
        GenPolynomial {
            family,
            field,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(family: GeneratorFamily, field: FieldKind) -> GenPolynomial {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(Rational::zero(), FieldElement::one(field));
        GenPolynomial {
            family,
            field,
            coeffs,
        }
    }

    /// Build from terms, combining repeated exponents and dropping zero
    /// coefficients, then certify that every surviving exponent is a member.
    pub fn new(
        family: GeneratorFamily,
        field: FieldKind,
        terms: Vec<(Rational, FieldElement)>,
        fuel: &mut Fuel,
    ) -> Result<GenPolynomial> {
        let mut coeffs: BTreeMap<Rational, FieldElement> = BTreeMap::new();
        for (e, c) in terms {
            if c.kind() != field {
                return Err(Error::MixedFields(field.to_string(), c.kind().to_string()));
            }
            let entry = match coeffs.remove(&e) {
                Some(prev) => prev.add(&c)?,
                None => c,
            };
            if !entry.is_zero() {
                coeffs.insert(e, entry);
            }
        }
        for e in coeffs.keys() {
            match family.membership(e, fuel) {
                Membership::Member(_) => {}
                Membership::NotMember { reason } => {
                    return Err(Error::NotAMember {
                        element: e.to_string(),
                        reason,
                    })
                }
                Membership::Unknown => return Err(Error::FuelExhausted),
            }
        }
        Ok(GenPolynomial {
            family,
            field,
            coeffs,
        })
    }

    pub fn monomial(
        family: GeneratorFamily,
        field: FieldKind,
        exponent: Rational,
        coeff: FieldElement,
        fuel: &mut Fuel,
    ) -> Result<GenPolynomial> {
        GenPolynomial::new(family, field, vec![(exponent, coeff)], fuel)
    }

    /// Internal constructor for maps whose exponents are already known to be
    /// members (sums of validated exponents, partial sums of certificates).
    fn from_checked(
        family: GeneratorFamily,
        field: FieldKind,
        coeffs: BTreeMap<Rational, FieldElement>,
    ) -> GenPolynomial {
        GenPolynomial {
            family,
            field,
            coeffs,
        }
    }

    pub fn family(&self) -> &GeneratorFamily {
        &self.family
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

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &FieldElement)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> Vec<Rational> {
        self.coeffs.keys().cloned().collect()
    }

    pub fn coefficient(&self, e: &Rational) -> FieldElement {
        self.coeffs
            .get(e)
            .cloned()
            .unwrap_or_else(|| FieldElement::zero(self.field))
    }

    /// Value at `X = 0`: the coefficient of the exponent-zero term.
    pub fn eval_at_zero(&self) -> FieldElement {
        self.coefficient(&Rational::zero())
    }

    /// A unit of the localization: nonzero constant term.
    pub fn is_local_unit(&self) -> bool {
        !self.eval_at_zero().is_zero()
    }

    /// Smallest exponent, `None` for the zero polynomial.
    pub fn ord(&self) -> Option<&Rational> {
        self.coeffs.keys().next()
    }

    /// Largest exponent, `None` for the zero polynomial.
    pub fn deg(&self) -> Option<&Rational> {
        self.coeffs.keys().next_back()
    }

    fn check_compatible(&self, other: &GenPolynomial) -> Result<()> {
        if self.family != other.family {
            return Err(Error::MixedFamilies);
        }
        if self.field != other.field {
            return Err(Error::MixedFields(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &GenPolynomial) -> Result<GenPolynomial> {
        self.check_compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &other.coeffs {
            let entry = match coeffs.remove(e) {
                Some(prev) => prev.add(c)?,
                None => c.clone(),
            };
            if !entry.is_zero() {
                coeffs.insert(e.clone(), entry);
            }
        }
        Ok(GenPolynomial::from_checked(
            self.family.clone(),
            self.field,
            coeffs,
        ))
    }

    pub fn sub(&self, other: &GenPolynomial) -> Result<GenPolynomial> {
        self.add(&other.scale(&FieldElement::from_integer(other.field, -1))?)
    }

    pub fn scale(&self, c: &FieldElement) -> Result<GenPolynomial> {
        if c.kind() != self.field {
            return Err(Error::MixedFields(
                self.field.to_string(),
                c.kind().to_string(),
            ));
        }
        if c.is_zero() {
            return Ok(GenPolynomial::zero(self.family.clone(), self.field));
        }
        let mut coeffs = BTreeMap::new();
        for (e, v) in &self.coeffs {
            coeffs.insert(e.clone(), v.mul(c)?);
        }
        Ok(GenPolynomial::from_checked(
            self.family.clone(),
            self.field,
            coeffs,
        ))
    }

    /// Product by convolution. Exponent sums stay in the monoid, so no
    /// membership re-validation is needed.
    pub fn mul(&self, other: &GenPolynomial) -> Result<GenPolynomial> {
        self.check_compatible(other)?;
        let mut coeffs: BTreeMap<Rational, FieldElement> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let e = e1.add(e2);
                let term = c1.mul(c2)?;
                let entry = match coeffs.remove(&e) {
                    Some(prev) => prev.add(&term)?,
                    None => term,
                };
                if !entry.is_zero() {
                    coeffs.insert(e, entry);
                }
            }
        }
        Ok(GenPolynomial::from_checked(
            self.family.clone(),
            self.field,
            coeffs,
        ))
    }

    /// Subtract `q` from every exponent and re-certify membership of the
    /// shifted support. Fails with [`Error::NotAMember`] when some shifted
    /// exponent leaves the monoid, or [`Error::NegativeValue`] when `q`
    /// exceeds an exponent.
    pub fn shift_down(&self, q: &Rational, fuel: &mut Fuel) -> Result<GenPolynomial> {
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (e, c) in &self.coeffs {
            let shifted = e
                .checked_sub(q)
                .ok_or_else(|| Error::NegativeValue(format!("{e} - {q}")))?;
            terms.push((shifted, c.clone()));
        }
        GenPolynomial::new(self.family.clone(), self.field, terms, fuel)
    }
}

impl fmt::Display for GenPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
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
                write!(f, "X^({e})")?;
            } else {
                write!(f, "{shown}*X^({e})")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// A fraction `num / den` in the localization: the denominator must be a unit
/// (nonzero constant term).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedElement {
    num: GenPolynomial,
    den: GenPolynomial,
}

impl LocalizedElement {
    pub fn new(num: GenPolynomial, den: GenPolynomial) -> Result<LocalizedElement> {
        num.check_compatible(&den)?;
        if !den.is_local_unit() {
            return Err(Error::Precondition(
                "denominator must have nonzero constant term".into(),
            ));
        }
        Ok(LocalizedElement { num, den })
    }

    pub fn from_polynomial(num: GenPolynomial) -> LocalizedElement {
        let den = GenPolynomial::one(num.family.clone(), num.field);
        LocalizedElement { num, den }
    }

    pub fn num(&self) -> &GenPolynomial {
        &self.num
    }

    pub fn den(&self) -> &GenPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Units of the localization are the fractions with invertible numerator.
    pub fn is_unit(&self) -> bool {
        self.num.is_local_unit()
    }

    pub fn mul(&self, other: &LocalizedElement) -> Result<LocalizedElement> {
        LocalizedElement::new(self.num.mul(&other.num)?, self.den.mul(&other.den)?)
    }

    /// Equality of fractions by cross multiplication.
    pub fn equivalent(&self, other: &LocalizedElement) -> Result<bool> {
        Ok(self.num.mul(&other.den)? == other.num.mul(&self.den)?)
    }
}

impl fmt::Display for LocalizedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.num_terms() == 1 && self.den.eval_at_zero().is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Exact division in the ambient algebra of all rational exponents, followed
/// by a membership check on the quotient. Returns `Ok(None)` when `d` does not
/// divide `f` (including the case where the unique ambient quotient has
/// exponents outside the monoid, so no quotient exists inside it either).
pub fn exact_divide(
    f: &GenPolynomial,
    d: &GenPolynomial,
    fuel: &mut Fuel,
) -> Result<Option<GenPolynomial>> {
    divide_with_cap(f, d, usize::MAX, fuel)
}

/// [`exact_divide`] with a step budget. Rational exponents admit strictly
/// descending remainder chains of any length, so the bounded divisor search
/// gives up on a candidate after `max_steps` elimination steps; a capped
/// stop reports `None`, meaning only that no quotient was found within the
/// budget.
fn divide_with_cap(
    f: &GenPolynomial,
    d: &GenPolynomial,
    max_steps: usize,
    fuel: &mut Fuel,
) -> Result<Option<GenPolynomial>> {
    f.check_compatible(d)?;
    if d.is_zero() {
        return Err(Error::Precondition("division by the zero polynomial".into()));
    }
    let (lead_d, coef_d) = d.coeffs.iter().next_back().expect("nonzero divisor");
    let inv_d = coef_d.inverse()?;
    let mut rem = f.coeffs.clone();
    let mut quotient: Vec<(Rational, FieldElement)> = Vec::new();
    let mut steps = 0usize;
    while let Some((lead_r, coef_r)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))
    {
        if !fuel.tick() {
            return Err(Error::FuelExhausted);
        }
        steps += 1;
        if steps > max_steps {
            return Ok(None);
        }
        let t_exp = match lead_r.checked_sub(lead_d) {
            Some(e) => e,
            None => return Ok(None),
        };
        let t_coef = coef_r.mul(&inv_d)?;
        for (e, c) in &d.coeffs {
            let key = t_exp.add(e);
            let delta = t_coef.mul(c)?;
            let entry = match rem.remove(&key) {
                Some(prev) => prev.sub(&delta)?,
                None => delta.neg(),
            };
            if !entry.is_zero() {
                rem.insert(key, entry);
            }
        }
        quotient.push((t_exp, t_coef));
    }
    match GenPolynomial::new(f.family.clone(), f.field, quotient, fuel) {
        Ok(q) => Ok(Some(q)),
        Err(Error::NotAMember { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// How a factor's irreducibility claim is backed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorStatus {
    /// A monomial whose exponent is a certified atom of the monoid.
    CertifiedAtom,
    /// Irreducibility established by a provably complete search at this
    /// scale: either a certified length bound of one, or an exhausted
    /// candidate lattice with forced coefficients.
    SearchCertified,
    /// The bounded divisor search found no split, but the search space was
    /// not provably complete.
    BoundedOnly,
}

impl fmt::Display for FactorStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FactorStatus::CertifiedAtom => "certified-atom",
            FactorStatus::SearchCertified => "search-certified",
            FactorStatus::BoundedOnly => "bounded-only",
        };
        write!(f, "{s}")
    }
}

/// One irreducible (or irreducible-so-far) factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFactor {
    pub element: GenPolynomial,
    pub status: FactorStatus,
}

impl fmt::Display for AlgebraFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.element, self.status)
    }
}

/// A factorization `f = unit * prod(factors)` in the localized algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFactorization {
    /// Nonunit factors, with repetition.
    pub factors: Vec<AlgebraFactor>,
    /// A unit of the localization (nonzero constant term).
    pub unit: GenPolynomial,
    /// Claimed upper bound for the number of nonunit factors in any
    /// factorization of the input.
    pub length_bound: u64,
    /// True when `length_bound` is provably correct (complete windows and a
    /// zero greatest divisor at the binding order).
    pub bound_certified: bool,
    pub fuel_used: u64,
}

impl AlgebraFactorization {
    pub fn length(&self) -> usize {
        self.factors.len()
    }

    pub fn all_certified(&self) -> bool {
        self.factors
            .iter()
            .all(|f| f.status != FactorStatus::BoundedOnly)
    }

    /// Re-multiply everything and compare with the input exactly; also insist
    /// that the unit is a unit and every factor a nonzero nonunit.
    pub fn verify(&self, original: &GenPolynomial) -> Result<bool> {
        if !self.unit.is_local_unit() {
            return Ok(false);
        }
        let mut acc = self.unit.clone();
        for factor in &self.factors {
            if factor.element.is_zero() || factor.element.is_local_unit() {
                return Ok(false);
            }
            acc = acc.mul(&factor.element)?;
        }
        Ok(acc == *original)
    }
}

const POOL_CAP: usize = 16;
const ITEM_CAP: usize = 12;
/// Elimination steps allowed per candidate division in the bounded search.
const DIVISION_STEP_CAP: usize = 128;
const SUBSET_CAP: usize = 64;
/// Largest support size probed for non-monomial divisors over fields other
/// than F2, where coefficients must be guessed.
const SIGNED_SUPPORT_CAP: usize = 4;

/// Factor a nonzero nonunit of the localized algebra `F[M]_S`,
/// `S = {g : g(0) != 0}`.
///
/// Requires the family's greatest-divisor decomposition to exist on the
/// support with unique atomic factorizations and pairwise comparable divisors
/// (checked up front). The element is written `X^q * g` with `q` the common
/// greatest divisor of the support; `X^q` expands into certified atom
/// monomials and `g` is split recursively by a bounded divisor search.
pub fn factor_in_localization(
    f: &GenPolynomial,
    fuel: &mut Fuel,
) -> Result<AlgebraFactorization> {
    if f.is_zero() || f.is_local_unit() {
        return Err(Error::UnitOrZeroInput);
    }
    let family = f.family.clone();
    let report = check_localization_conditions(&family, &f.support(), fuel)?;
    if !(report.decomposition_holds
        && report.unique_atomic_factorization
        && report.divisors_pairwise_comparable)
    {
        return Err(Error::UnsupportedFamily {
            required: "a family whose localization conditions hold on the support",
            found: format!("{family:?}"),
        });
    }

    let mut q: Option<Rational> = None;
    for m in f.support() {
        let nu = greatest_divisor(&family, &m, fuel)?.value;
        q = Some(match q {
            Some(cur) if cur <= nu => cur,
            _ => nu,
        });
    }
    let q = q.expect("nonzero polynomial has support");

    let mut factors: Vec<AlgebraFactor> = Vec::new();
    let mut unit = GenPolynomial::one(family.clone(), f.field);
    if !q.is_zero() {
        let cert = match family.membership(&q, fuel) {
            Membership::Member(cert) => cert,
            Membership::NotMember { reason } => {
                return Err(Error::Internal(format!(
                    "greatest divisor {q} failed membership: {reason}"
                )))
            }
            Membership::Unknown => return Err(Error::FuelExhausted),
        };
        push_atom_monomials(&family, f.field, &cert, &mut factors, fuel)?;
    }
    let shift_count = factors.len() as u64;

    let g = f.shift_down(&q, fuel)?;
    if g.is_local_unit() {
        unit = unit.mul(&g)?;
        return Ok(AlgebraFactorization {
            factors,
            unit,
            length_bound: shift_count,
            bound_certified: true,
            fuel_used: fuel.used(),
        });
    }

    let (bound_elem, bound_certified) = order_length_bound(&g, fuel)?;
    let mut budget = bound_elem;
    split_nonunit(g, &mut factors, &mut unit, &mut budget, bound_certified, fuel)?;
    Ok(AlgebraFactorization {
        factors,
        unit,
        length_bound: shift_count + bound_elem,
        bound_certified,
        fuel_used: fuel.used(),
    })
}

/// Upper bound for the number of nonunit factors of `g`, read off the
/// factorization lengths of `ord(g)`: orders are additive and every nonunit
/// has nonzero order in the monoid. Certified when the window was complete
/// and the order carries no greatest divisor.
fn order_length_bound(g: &GenPolynomial, fuel: &mut Fuel) -> Result<(u64, bool)> {
    let mu = g
        .ord()
        .ok_or_else(|| Error::Internal("zero polynomial has no order".into()))?
        .clone();
    let gd = greatest_divisor(&g.family, &mu, fuel)?;
    if gd.value.is_zero() {
        let lengths = g.family.length_set(&mu, fuel)?;
        let max_len = lengths.lengths.iter().next_back().copied().unwrap_or(1);
        let certified = lengths.exhaustive && !lengths.lengths.is_empty();
        return Ok((max_len.max(1), certified));
    }
    // A positive greatest divisor factors through every index, so no finite
    // length bound exists for the order. Report the longest length seen in a
    // capped scan, advisory only.
    let set = g.family.factorizations_capped(&mu, ITEM_CAP, fuel)?;
    let max_len = set.items.iter().map(|f| f.length()).max().unwrap_or(1);
    Ok((max_len.max(1), false))
}

/// Expand a membership certificate into atom monomial factors, certifying
/// each generator's atom status honestly.
fn push_atom_monomials(
    family: &GeneratorFamily,
    field: FieldKind,
    cert: &Factorization,
    factors: &mut Vec<AlgebraFactor>,
    fuel: &mut Fuel,
) -> Result<()> {
    for (&idx, &count) in &cert.entries {
        let gen = family.generator(idx)?;
        let status = match family.is_atom(&gen, fuel)? {
            AtomDecision::Atom => FactorStatus::CertifiedAtom,
            AtomDecision::Unknown => FactorStatus::BoundedOnly,
            AtomDecision::NotAtom(_, _) => {
                return Err(Error::Internal(format!(
                    "generator {gen} of a decomposition family is not an atom"
                )))
            }
        };
        let mut coeffs = BTreeMap::new();
        coeffs.insert(gen, FieldElement::one(field));
        let element = GenPolynomial::from_checked(family.clone(), field, coeffs);
        for _ in 0..count {
            factors.push(AlgebraFactor {
                element: element.clone(),
                status,
            });
        }
    }
    Ok(())
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

/// Recursively split a nonzero nonunit into factors, absorbing unit quotients
/// into `unit` and consuming the leaf budget.
fn split_nonunit(
    g: GenPolynomial,
    factors: &mut Vec<AlgebraFactor>,
    unit: &mut GenPolynomial,
    budget: &mut u64,
    certified: bool,
    fuel: &mut Fuel,
) -> Result<()> {
    if !fuel.tick() {
        return Err(Error::FuelExhausted);
    }
    let family = g.family.clone();
    let field = g.field;

    // Monomials factor through the exponent's certificate directly.
    if g.num_terms() == 1 {
        let (e, c) = g.coeffs.iter().next().expect("single term");
        let cert = match family.membership(e, fuel) {
            Membership::Member(cert) => cert,
            Membership::NotMember { reason } => {
                return Err(Error::Internal(format!(
                    "validated exponent {e} failed membership: {reason}"
                )))
            }
            Membership::Unknown => return Err(Error::FuelExhausted),
        };
        consume_budget(budget, cert.length(), certified)?;
        let constant = GenPolynomial::from_checked(
            family.clone(),
            field,
            [(Rational::zero(), c.clone())].into_iter().collect(),
        );
        *unit = unit.mul(&constant)?;
        push_atom_monomials(&family, field, &cert, factors, fuel)?;
        return Ok(());
    }

    // A certified bound of one proves irreducibility: a split into two
    // nonunits would decompose ord(g) into two nonzero members and force a
    // factorization of length at least two.
    let (local_bound, local_certified) = order_length_bound(&g, fuel)?;
    if local_bound == 1 && local_certified {
        consume_budget(budget, 1, certified)?;
        factors.push(AlgebraFactor {
            element: g,
            status: FactorStatus::SearchCertified,
        });
        return Ok(());
    }

    let pool = divisor_pool(&g, fuel)?;
    let ord_g = g.ord().expect("nonunit is nonzero").clone();

    // Monomial divisors first: smallest exponents make the most progress.
    for e in &pool {
        if *e > ord_g {
            break;
        }
        if !fuel.tick() {
            return Err(Error::FuelExhausted);
        }
        let mut coeffs = BTreeMap::new();
        coeffs.insert(e.clone(), FieldElement::one(field));
        let d = GenPolynomial::from_checked(family.clone(), field, coeffs);
        if let Some(h) = divide_with_cap(&g, &d, DIVISION_STEP_CAP, fuel)? {
            split_nonunit(d, factors, unit, budget, certified, fuel)?;
            if h.is_local_unit() {
                *unit = unit.mul(&h)?;
            } else {
                split_nonunit(h, factors, unit, budget, certified, fuel)?;
            }
            return Ok(());
        }
    }

    // Polynomial divisors with supports drawn from the pool. Over F2 the
    // coefficients are forced; elsewhere only unit coefficients are probed.
    // Each probe pays a full bounded division, so the stage stops after
    // SUBSET_CAP attempts; the terminal claim below is bounded-only anyway.
    let masks = 1u32
        .checked_shl(pool.len() as u32)
        .map(|m| m - 1)
        .unwrap_or(u32::MAX);
    let mut probes = 0usize;
    'subsets: for mask in 1..=masks {
        if mask.count_ones() < 2 {
            continue;
        }
        let support: Vec<&Rational> = pool
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        if *support[0] > ord_g {
            continue;
        }
        for coeffs in coefficient_probes(field, support.len()) {
            if !fuel.tick() {
                return Err(Error::FuelExhausted);
            }
            probes += 1;
            if probes > SUBSET_CAP {
                break 'subsets;
            }
            let map: BTreeMap<Rational, FieldElement> = support
                .iter()
                .map(|e| (*e).clone())
                .zip(coeffs.iter().cloned())
                .collect();
            let d = GenPolynomial::from_checked(family.clone(), field, map);
            if let Some(h) = divide_with_cap(&g, &d, DIVISION_STEP_CAP, fuel)? {
                if h.is_local_unit() {
                    // An associate: only accept when the divisor is simpler,
                    // otherwise the recursion would not make progress.
                    if d.num_terms() >= g.num_terms() {
                        continue;
                    }
                    *unit = unit.mul(&h)?;
                    split_nonunit(d, factors, unit, budget, certified, fuel)?;
                } else {
                    split_nonunit(d, factors, unit, budget, certified, fuel)?;
                    split_nonunit(h, factors, unit, budget, certified, fuel)?;
                }
                return Ok(());
            }
        }
    }

    // No split found; the search was bounded, so the claim stays modest.
    consume_budget(budget, 1, certified)?;
    factors.push(AlgebraFactor {
        element: g,
        status: FactorStatus::BoundedOnly,
    });
    Ok(())
}

/// Candidate divisor exponents: nonzero partial sums of the windowed
/// factorizations of the exponents of `g`, capped for tractability. Every
/// candidate is a sum of generators, hence a member.
fn divisor_pool(g: &GenPolynomial, fuel: &mut Fuel) -> Result<Vec<Rational>> {
    let deg = g.deg().expect("nonzero").clone();
    let mut pool: BTreeSet<Rational> = BTreeSet::new();
    for m in g.support() {
        let set = g.family.factorizations_capped(&m, ITEM_CAP, fuel)?;
        for item in set.items.iter().take(ITEM_CAP) {
            let mut sums = vec![Rational::zero()];
            for (&idx, &mult) in &item.entries {
                let gen = g.family.generator(idx)?;
                let mut next = Vec::new();
                'outer: for s in &sums {
                    let mut acc = s.clone();
                    for k in 0..=mult {
                        if k > 0 {
                            acc = acc.add(&gen);
                        }
                        next.push(acc.clone());
                        if next.len() >= SUBSET_CAP {
                            break 'outer;
                        }
                    }
                }
                sums = next;
            }
            for s in sums {
                if !s.is_zero() && s <= deg {
                    pool.insert(s);
                }
            }
        }
    }
    Ok(pool.into_iter().take(POOL_CAP).collect())
}

/// Coefficient vectors to try for a polynomial divisor of the given support
/// size: all-ones over F2 (coefficients are forced there), otherwise sign
/// patterns with the first coefficient normalized to one.
pub(crate) fn coefficient_probes(field: FieldKind, len: usize) -> Vec<Vec<FieldElement>> {
    let one = FieldElement::one(field);
    if field == FieldKind::Fp(2) {
        return vec![vec![one; len]];
    }
    if len > SIGNED_SUPPORT_CAP {
        return Vec::new();
    }
    let mut out = Vec::new();
    for signs in 0u32..1 << (len - 1) {
        let mut v = Vec::with_capacity(len);
        v.push(one.clone());
        for i in 0..len - 1 {
            if signs >> i & 1 == 1 {
                v.push(one.neg());
            } else {
                v.push(one.clone());
            }
        }
        out.push(v);
    }
    out
}

/// An ascending chain of principal ideals of the localized algebra, lifted
/// from a monoid chain: the ideal of `X^{terms[i+1]}` strictly contains that
/// of `X^{terms[i]}`, with the quotient monomial `X^{difference}` a certified
/// nonunit at every step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraChain {
    pub field: FieldKind,
    pub base: RationalChain,
    pub terms: Vec<GenPolynomial>,
    pub quotients: Vec<GenPolynomial>,
}

/// Lift an ACCP-failure witness of the monoid into the algebra. Validates
/// each step: the certificate re-sums to the difference, and the difference
/// is nonzero, so each quotient monomial vanishes at zero and is a nonunit.
pub fn algebra_chain(
    family: &GeneratorFamily,
    field: FieldKind,
    k: usize,
    fuel: &mut Fuel,
) -> Result<AlgebraChain> {
    let base = family.accp_witness(k, fuel)?;
    let mut terms = Vec::with_capacity(base.terms.len());
    for t in &base.terms {
        terms.push(GenPolynomial::monomial(
            family.clone(),
            field,
            t.clone(),
            FieldElement::one(field),
            fuel,
        )?);
    }
    let mut quotients = Vec::with_capacity(base.steps.len());
    for step in &base.steps {
        if step.difference.is_zero() {
            return Err(Error::BadCertificate(
                "chain step difference is zero; the ideal would not grow".into(),
            ));
        }
        if step.certificate.value(family)? != step.difference {
            return Err(Error::BadCertificate(
                "chain step certificate does not re-sum to the difference".into(),
            ));
        }
        quotients.push(GenPolynomial::monomial(
            family.clone(),
            field,
            step.difference.clone(),
            FieldElement::one(field),
            fuel,
        )?);
    }
    Ok(AlgebraChain {
        field,
        base,
        terms,
        quotients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fuel() -> Fuel {
        Fuel::default()
    }

    fn q(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    fn poly_q(terms: &[(&str, &str)]) -> GenPolynomial {
        let parsed = terms
            .iter()
            .map(|(e, c)| (q(e), FieldElement::parse(FieldKind::Q, c).unwrap()))
            .collect();
        GenPolynomial::new(GeneratorFamily::grams(), FieldKind::Q, parsed, &mut fuel()).unwrap()
    }

    fn poly_f2(terms: &[&str]) -> GenPolynomial {
        let parsed = terms
            .iter()
            .map(|e| (q(e), FieldElement::one(FieldKind::Fp(2))))
            .collect();
        GenPolynomial::new(
            GeneratorFamily::grams(),
            FieldKind::Fp(2),
            parsed,
            &mut fuel(),
        )
        .unwrap()
    }

    #[test]
    fn field_arithmetic() {
        let k = FieldKind::Q;
        let a = FieldElement::parse(k, "3/4").unwrap();
        let b = FieldElement::parse(k, "1/4").unwrap();
        assert!(a.add(&b).unwrap().is_one());
        let c = FieldElement::parse(k, "-2/3").unwrap();
        assert_eq!(
            c.inverse().unwrap(),
            FieldElement::parse(k, "-3/2").unwrap()
        );

        let f5 = FieldKind::parse("F5").unwrap();
        assert_eq!(f5, FieldKind::Fp(5));
        let x = FieldElement::parse(f5, "3").unwrap();
        let y = FieldElement::parse(f5, "4").unwrap();
        assert_eq!(x.add(&y).unwrap(), FieldElement::parse(f5, "2").unwrap());
        assert_eq!(x.mul(&y).unwrap(), FieldElement::parse(f5, "2").unwrap());
        assert_eq!(x.inverse().unwrap(), FieldElement::parse(f5, "2").unwrap());
        assert_eq!(
            FieldElement::parse(f5, "7").unwrap(),
            FieldElement::parse(f5, "2").unwrap()
        );
        assert_eq!(
            FieldElement::parse(f5, "-1").unwrap(),
            FieldElement::parse(f5, "4").unwrap()
        );

        assert!(FieldElement::zero(k).inverse().is_err());
        assert!(matches!(
            a.add(&x),
            Err(Error::MixedFields(_, _))
        ));
        assert!(FieldKind::parse("F4").is_err());
    }

    #[test]
    fn polynomial_construction_validates_membership() {
        let err = GenPolynomial::new(
            GeneratorFamily::grams(),
            FieldKind::Q,
            vec![(q("1/25"), FieldElement::one(FieldKind::Q))],
            &mut fuel(),
        );
        assert!(matches!(err, Err(Error::NotAMember { .. })));

        // 1/4 is dyadic, hence a member through the base.
        let ok = GenPolynomial::new(
            GeneratorFamily::grams(),
            FieldKind::Q,
            vec![(q("1/4"), FieldElement::one(FieldKind::Q))],
            &mut fuel(),
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn polynomial_ring_identities() {
        let a = poly_q(&[("1/6", "1"), ("0", "1")]);
        let b = poly_q(&[("1/6", "1"), ("0", "-1")]);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod, poly_q(&[("1/3", "1"), ("0", "-1")]));

        let m1 = poly_q(&[("1/6", "1")]);
        let m2 = poly_q(&[("1/20", "1")]);
        assert_eq!(m1.mul(&m2).unwrap(), poly_q(&[("13/60", "1")]));

        assert_eq!(prod.ord(), Some(&q("0")));
        assert_eq!(prod.deg(), Some(&q("1/3")));
        assert!(prod.is_local_unit());
        assert_eq!(prod.to_string(), "X^(1/3) - 1");
        assert_eq!(poly_q(&[]).to_string(), "0");
        assert_eq!(
            poly_q(&[("1/6", "3"), ("0", "1")]).to_string(),
            "3*X^(1/6) + 1"
        );

        let sum = a.add(&b).unwrap();
        assert_eq!(sum, poly_q(&[("1/6", "2")]));
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn exact_division_in_and_out_of_the_monoid() {
        let f = poly_q(&[("1/3", "1"), ("0", "-1")]);
        let d = poly_q(&[("1/6", "1"), ("0", "1")]);
        let quo = exact_divide(&f, &d, &mut fuel()).unwrap().unwrap();
        assert_eq!(quo, poly_q(&[("1/6", "1"), ("0", "-1")]));

        // Not a divisor at all.
        let nd = poly_q(&[("1/20", "1"), ("0", "1")]);
        assert!(exact_divide(&f, &nd, &mut fuel()).unwrap().is_none());

        // The ambient quotient X^(1/30) exists but 1/30 is not a member, so
        // division fails inside the algebra.
        let f5 = poly_q(&[("1/5", "1")]);
        let d6 = poly_q(&[("1/6", "1")]);
        assert!(exact_divide(&f5, &d6, &mut fuel()).unwrap().is_none());
    }

    #[test]
    fn localized_elements() {
        let num = poly_q(&[("1/3", "1"), ("0", "-1")]);
        let den = poly_q(&[("1/6", "1"), ("0", "1")]);
        let frac = LocalizedElement::new(num, den).unwrap();
        assert!(frac.is_unit());
        let reduced =
            LocalizedElement::from_polynomial(poly_q(&[("1/6", "1"), ("0", "-1")]));
        assert!(frac.equivalent(&reduced).unwrap());

        let bad_den = poly_q(&[("1/6", "1")]);
        assert!(LocalizedElement::new(poly_q(&[("0", "1")]), bad_den).is_err());

        let x = LocalizedElement::from_polynomial(poly_q(&[("1/6", "1")]));
        assert!(!x.is_unit());
        assert!(!x.is_zero());
    }

    #[test]
    fn factor_monomial_with_base_exponent() {
        // X^(1/2) = (X^(1/6))^3 exactly, unit 1.
        let f = poly_f2(&["1/2"]);
        let out = factor_in_localization(&f, &mut fuel()).unwrap();
        assert_eq!(out.factors.len(), 3);
        for fac in &out.factors {
            assert_eq!(fac.element, poly_f2(&["1/6"]));
            assert_eq!(fac.status, FactorStatus::CertifiedAtom);
        }
        assert!(out.unit.is_local_unit());
        assert_eq!(out.length_bound, 3);
        assert!(out.bound_certified);
        assert!(out.verify(&f).unwrap());
    }

    #[test]
    fn factor_monomial_with_atomic_exponent() {
        // 1/3 = 2 * (1/6) has zero greatest divisor; the split happens in the
        // atomic part.
        let f = poly_f2(&["1/3"]);
        let out = factor_in_localization(&f, &mut fuel()).unwrap();
        assert_eq!(out.factors.len(), 2);
        for fac in &out.factors {
            assert_eq!(fac.element, poly_f2(&["1/6"]));
            assert_eq!(fac.status, FactorStatus::CertifiedAtom);
        }
        assert_eq!(out.length_bound, 2);
        assert!(out.bound_certified);
        assert!(out.verify(&f).unwrap());
    }

    #[test]
    fn factor_strips_unit_part() {
        // X^(11/20) + X^(1/2) = X^(1/2) (X^(1/20) + 1): three atom monomials
        // and a unit.
        let f = poly_f2(&["11/20", "1/2"]);
        let out = factor_in_localization(&f, &mut fuel()).unwrap();
        assert_eq!(out.factors.len(), 3);
        for fac in &out.factors {
            assert_eq!(fac.element, poly_f2(&["1/6"]));
            assert_eq!(fac.status, FactorStatus::CertifiedAtom);
        }
        assert_eq!(out.unit, poly_f2(&["1/20", "0"]));
        assert!(out.bound_certified);
        assert_eq!(out.length_bound, 3);
        assert!(out.verify(&f).unwrap());
    }

    #[test]
    fn factor_rejects_units_zero_and_unsupported_families() {
        let unit = poly_f2(&["1/6", "0"]);
        assert!(matches!(
            factor_in_localization(&unit, &mut fuel()),
            Err(Error::UnitOrZeroInput)
        ));
        let zero = GenPolynomial::zero(GeneratorFamily::grams(), FieldKind::Fp(2));
        assert!(matches!(
            factor_in_localization(&zero, &mut fuel()),
            Err(Error::UnitOrZeroInput)
        ));

        // Cyclic monoids fail the uniqueness condition.
        let cyc = GeneratorFamily::cyclic(2, 3).unwrap();
        let f = GenPolynomial::new(
            cyc,
            FieldKind::Fp(2),
            vec![(q("4/3"), FieldElement::one(FieldKind::Fp(2)))],
            &mut fuel(),
        )
        .unwrap();
        assert!(matches!(
            factor_in_localization(&f, &mut fuel()),
            Err(Error::UnsupportedFamily { .. })
        ));
    }

    #[test]
    fn irreducible_binomial_is_search_certified() {
        // ord = 1/20 is an atom over a complete window, so the length bound
        // is one and irreducibility is proved.
        let f = poly_f2(&["1/6", "1/20"]);
        let out = factor_in_localization(&f, &mut fuel()).unwrap();
        assert_eq!(out.factors.len(), 1);
        assert_eq!(out.factors[0].element, f);
        assert_eq!(out.factors[0].status, FactorStatus::SearchCertified);
        assert_eq!(out.length_bound, 1);
        assert!(out.bound_certified);
        assert!(out.verify(&f).unwrap());
    }

    #[test]
    fn factor_splits_a_frobenius_square() {
        // Over F2, (X^(1/6) + X^(1/20))^2 = X^(1/3) + X^(1/10); the divisor
        // search must recover the square.
        let root = poly_f2(&["1/6", "1/20"]);
        let f = root.mul(&root).unwrap();
        assert_eq!(f, poly_f2(&["1/3", "1/10"]));
        let out = factor_in_localization(&f, &mut fuel()).unwrap();
        assert_eq!(out.factors.len(), 2);
        for fac in &out.factors {
            assert_eq!(fac.element, root);
            assert_eq!(fac.status, FactorStatus::SearchCertified);
        }
        assert_eq!(out.length_bound, 2);
        assert!(out.bound_certified);
        assert!(out.verify(&f).unwrap());
        assert!(out.all_certified());
    }

    #[test]
    fn algebra_chain_lifts_the_monoid_witness() {
        let chain = algebra_chain(
            &GeneratorFamily::grams(),
            FieldKind::Fp(2),
            4,
            &mut fuel(),
        )
        .unwrap();
        assert_eq!(chain.terms.len(), 4);
        assert_eq!(chain.quotients.len(), 3);
        for quotient in &chain.quotients {
            assert!(!quotient.is_local_unit());
            assert!(!quotient.is_zero());
        }
        // Each term is the next term times the quotient monomial.
        for i in 0..chain.quotients.len() {
            let rebuilt = chain.terms[i + 1].mul(&chain.quotients[i]).unwrap();
            assert_eq!(rebuilt, chain.terms[i]);
        }
    }

    #[test]
    fn factorization_serde_roundtrip() {
        let f = poly_f2(&["1/3", "1/10"]);
        let out = factor_in_localization(&f, &mut fuel()).unwrap();
        let json = serde_json::to_string(&out).unwrap();
        let back: AlgebraFactorization = serde_json::from_str(&json).unwrap();
        assert_eq!(out, back);
    }
}
