//! Self-contained certificates and their re-validation.
//!
//! Every certificate-producing operation in the crate can wrap its output in
//! a [`Certificate`]: a JSON-serializable value carrying the claim together
//! with all data needed to re-check it from scratch. [`validate`] re-derives
//! each claim with exact arithmetic and answers with a one-line summary, or
//! fails with [`Error::BadCertificate`] naming the first mismatch.
//!
//! Nothing in a deserialized certificate is trusted. Atoms are checked for
//! well-formedness before their values are read, factorizations are
//! re-summed, products re-multiplied, and claims that rest on a search
//! (canonicality, greatest divisors, atom status) re-run the search under the
//! caller's fuel budget. Fuel exhaustion during re-validation surfaces as
//! [`Error::FuelExhausted`], never as a pass or a fail.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraChain, AlgebraFactorization, FactorStatus, GenPolynomial};
use crate::arith::Rational;
use crate::atomization::{
    canonical_decomposition, cyclic_decomposition, greatest_divisor, AtomizationPair,
    CanonicalDecomposition, CyclicDecomposition, GreatestDivisorResult,
};
use crate::formal::{recognize_atom, FormalChain, FormalFactorization, FormalReal};
use crate::formal_algebra::{FormalAlgebraChain, FormalAlgebraFactorization, FormalPolynomial};
use crate::monoid::{Factorization, GeneratorFamily, Membership, RationalChain};
use crate::{Error, Fuel, Result, SCHEMA_VERSION};

/// A machine-checkable claim. Each variant carries the full inputs, so a
/// certificate file is meaningful on its own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// `factorization` re-sums to `element`, so `element` is a member of the
    /// monoid generated by `family`.
    MonoidMembership {
        family: GeneratorFamily,
        element: Rational,
        factorization: Factorization,
    },
    /// `element` splits as the base part plus forced residues, and no other
    /// split exists.
    CanonicalDecomposition {
        family: GeneratorFamily,
        element: Rational,
        decomposition: CanonicalDecomposition,
    },
    /// `element` expands as an integer part plus forced base-(a/b) digits.
    CyclicDecomposition {
        a: u64,
        b: u64,
        element: Rational,
        decomposition: CyclicDecomposition,
    },
    /// `result.value` is the greatest divisor of `element` inside the
    /// distinguished submonoid, with the leftover atomic part certified.
    GreatestDivisor {
        family: GeneratorFamily,
        element: Rational,
        result: GreatestDivisorResult,
    },
    /// A strictly ascending chain of principal ideals of the monoid: each
    /// step's difference is nonzero and certified as a member.
    MonoidChain {
        family: GeneratorFamily,
        chain: RationalChain,
    },
    /// `factorization` re-sums to `element` in the formal monoid.
    FormalMembership {
        element: FormalReal,
        factorization: FormalFactorization,
    },
    /// A strictly ascending chain of principal ideals of the formal monoid.
    FormalChain { chain: FormalChain },
    /// A monoid chain lifted to monomial ideals of the localized algebra,
    /// with every quotient a certified nonunit.
    AlgebraChain { chain: AlgebraChain },
    /// A formal chain lifted to monomial ideals of the monoid algebra.
    FormalAlgebraChain { chain: FormalAlgebraChain },
    /// `input` equals the unit times the product of the factors in the
    /// localized algebra, within the claimed length bound.
    LocalizationFactorization {
        input: GenPolynomial,
        factorization: AlgebraFactorization,
    },
    /// `input` equals the unit times the product of the factors in the
    /// formal monoid algebra, within the claimed length bound.
    FormalAlgebraFactorization {
        input: FormalPolynomial,
        factorization: FormalAlgebraFactorization,
    },
}

/// The on-disk form: a schema version stamped around the claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub certificate: Certificate,
}

impl CertificateFile {
    pub fn new(certificate: Certificate) -> CertificateFile {
        CertificateFile {
            schema_version: SCHEMA_VERSION,
            certificate,
        }
    }
}

/// Parse certificate JSON. Accepts either a bare [`CertificateFile`] or any
/// JSON object with a `certificate` field holding one, so a whole CLI report
/// can be piped back for verification.
pub fn parse_certificate(text: &str) -> Result<CertificateFile> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        what: "certificate JSON",
        text: e.to_string(),
    })?;
    let node = if value.get("kind").is_none() && value.get("certificate").is_some() {
        &value["certificate"]
    } else {
        &value
    };
    // Integer map keys (factorization indices) deserialize from text but not
    // through `from_value`, so round-trip the selected node as text.
    let file: CertificateFile =
        serde_json::from_str(&node.to_string()).map_err(|e| Error::Parse {
            what: "certificate",
            text: e.to_string(),
        })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse {
            what: "certificate schema version",
            text: format!(
                "version {} (this build reads version {})",
                file.schema_version, SCHEMA_VERSION
            ),
        });
    }
    Ok(file)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadCertificate(msg.into())
}

/// Re-check a certificate from scratch. Returns a one-line summary of what
/// was verified; any mismatch is [`Error::BadCertificate`].
pub fn validate(certificate: &Certificate, fuel: &mut Fuel) -> Result<String> {
    match certificate {
        Certificate::MonoidMembership {
            family,
            element,
            factorization,
        } => {
            let resum = factorization
                .value(family)
                .map_err(|e| bad(format!("certificate does not evaluate: {e}")))?;
            if resum != *element {
                return Err(bad(format!(
                    "certificate re-sums to {resum}, claimed element is {element}"
                )));
            }
            Ok(format!(
                "membership of {element}: {} atom copies re-sum exactly",
                factorization.length()
            ))
        }
        Certificate::CanonicalDecomposition {
            family,
            element,
            decomposition,
        } => {
            check_canonical_decomposition(family, element, decomposition, fuel)?;
            Ok(format!(
                "canonical decomposition of {element}: re-assembles, residues forced, base part certified"
            ))
        }
        Certificate::CyclicDecomposition {
            a,
            b,
            element,
            decomposition,
        } => {
            check_cyclic_decomposition(*a, *b, element, decomposition)?;
            Ok(format!(
                "digit expansion of {element} over powers of {a}/{b}: re-assembles and is forced"
            ))
        }
        Certificate::GreatestDivisor {
            family,
            element,
            result,
        } => {
            check_greatest_divisor(family, element, result, fuel)?;
            Ok(format!(
                "greatest divisor {} of {element}: splits exactly and maximality re-derives",
                result.value
            ))
        }
        Certificate::MonoidChain { family, chain } => {
            check_rational_chain(family, chain)?;
            Ok(format!(
                "{}-term chain: every step strictly ascends with a certified difference",
                chain.terms.len()
            ))
        }
        Certificate::FormalMembership {
            element,
            factorization,
        } => {
            check_formal_factorization(factorization)?;
            let resum = factorization.value();
            if resum != *element {
                return Err(bad(format!(
                    "certificate re-sums to {resum}, claimed element is {element}"
                )));
            }
            Ok(format!(
                "formal membership of {element}: {} atoms re-sum exactly",
                factorization.length()
            ))
        }
        Certificate::FormalChain { chain } => {
            check_formal_chain(chain)?;
            Ok(format!(
                "{}-term formal chain: every step strictly ascends with a certified difference",
                chain.terms.len()
            ))
        }
        Certificate::AlgebraChain { chain } => {
            check_algebra_chain(chain)?;
            Ok(format!(
                "{}-term algebra chain: monomial ideals strictly ascend with nonunit quotients",
                chain.terms.len()
            ))
        }
        Certificate::FormalAlgebraChain { chain } => {
            check_formal_algebra_chain(chain)?;
            Ok(format!(
                "{}-term formal algebra chain: monomial ideals strictly ascend with nonunit quotients",
                chain.terms.len()
            ))
        }
        Certificate::LocalizationFactorization {
            input,
            factorization,
        } => {
            check_localization_factorization(input, factorization, fuel)?;
            Ok(format!(
                "factorization into {} nonunits: product identity and statuses re-check",
                factorization.factors.len()
            ))
        }
        Certificate::FormalAlgebraFactorization {
            input,
            factorization,
        } => {
            check_formal_algebra_factorization(input, factorization)?;
            Ok(format!(
                "factorization into {} nonunits: product identity and statuses re-check",
                factorization.factors.len()
            ))
        }
    }
}

fn check_canonical_decomposition(
    family: &GeneratorFamily,
    element: &Rational,
    decomposition: &CanonicalDecomposition,
    fuel: &mut Fuel,
) -> Result<()> {
    let pair = AtomizationPair::from_family(family).map_err(|e| bad(e.to_string()))?;
    let assembled = decomposition
        .value(&pair)
        .map_err(|e| bad(format!("decomposition does not evaluate: {e}")))?;
    if assembled != *element {
        return Err(bad(format!(
            "decomposition re-assembles to {assembled}, claimed element is {element}"
        )));
    }
    for (&n, &r) in &decomposition.residues {
        let p = pair
            .primes
            .nth(n)
            .map_err(|e| bad(format!("residue index {n}: {e}")))?;
        if r == 0 || r >= p {
            return Err(bad(format!(
                "residue {r} at index {n} is outside 1..={}",
                p - 1
            )));
        }
    }
    let nu_value = decomposition
        .nu_certificate
        .value(&pair.base)
        .map_err(|e| bad(format!("base certificate does not evaluate: {e}")))?;
    if nu_value != decomposition.nu {
        return Err(bad(format!(
            "base certificate re-sums to {nu_value}, base part is {}",
            decomposition.nu
        )));
    }
    let recomputed = match canonical_decomposition(&pair, element, fuel) {
        Ok(d) => d,
        Err(Error::NotAMember { element, reason }) => {
            return Err(bad(format!(
                "{element} has no canonical decomposition: {reason}"
            )))
        }
        Err(e) => return Err(e),
    };
    if recomputed.nu != decomposition.nu || recomputed.residues != decomposition.residues {
        return Err(bad(
            "decomposition re-assembles but is not the forced canonical split",
        ));
    }
    Ok(())
}

fn check_cyclic_decomposition(
    a: u64,
    b: u64,
    element: &Rational,
    decomposition: &CyclicDecomposition,
) -> Result<()> {
    let family = GeneratorFamily::cyclic(a, b).map_err(|e| bad(e.to_string()))?;
    for (&n, &d) in &decomposition.digits {
        if n == 0 || d == 0 || d >= b {
            return Err(bad(format!(
                "digit {d} at index {n} is outside 1..={} at a positive index",
                b - 1
            )));
        }
    }
    let nu = Rational::new(decomposition.nu.clone(), BigInt::one())
        .map_err(|e| bad(format!("integer part: {e}")))?;
    let digit_value = decomposition
        .digit_factorization()
        .value(&family)
        .map_err(|e| bad(format!("digits do not evaluate: {e}")))?;
    let assembled = nu.add(&digit_value);
    if assembled != *element {
        return Err(bad(format!(
            "expansion re-assembles to {assembled}, claimed element is {element}"
        )));
    }
    let recomputed = match cyclic_decomposition(a, b, element) {
        Ok(d) => d,
        Err(Error::NotAMember { element, reason }) => {
            return Err(bad(format!("{element} has no digit expansion: {reason}")))
        }
        Err(e) => return Err(e),
    };
    if recomputed != *decomposition {
        return Err(bad(
            "expansion re-assembles but is not the forced digit expansion",
        ));
    }
    Ok(())
}

fn check_greatest_divisor(
    family: &GeneratorFamily,
    element: &Rational,
    result: &GreatestDivisorResult,
    fuel: &mut Fuel,
) -> Result<()> {
    if result.value.add(&result.atomic_part) != *element {
        return Err(bad(format!(
            "divisor {} plus atomic part {} does not equal {element}",
            result.value, result.atomic_part
        )));
    }
    let resum = result
        .atomic_certificate
        .value(family)
        .map_err(|e| bad(format!("atomic certificate does not evaluate: {e}")))?;
    if resum != result.atomic_part {
        return Err(bad(format!(
            "atomic certificate re-sums to {resum}, atomic part is {}",
            result.atomic_part
        )));
    }
    let recomputed = match greatest_divisor(family, element, fuel) {
        Ok(r) => r,
        Err(Error::NotAMember { element, reason }) => {
            return Err(bad(format!("{element} has no greatest divisor: {reason}")))
        }
        Err(e) => return Err(e),
    };
    if recomputed.value != result.value {
        return Err(bad(format!(
            "claimed divisor {} differs from the re-derived greatest divisor {}",
            result.value, recomputed.value
        )));
    }
    Ok(())
}

fn check_rational_chain(family: &GeneratorFamily, chain: &RationalChain) -> Result<()> {
    if chain.terms.is_empty() {
        return Err(bad("chain has no terms".to_string()));
    }
    if chain.steps.len() + 1 != chain.terms.len() {
        return Err(bad(format!(
            "{} terms require {} steps, certificate has {}",
            chain.terms.len(),
            chain.terms.len() - 1,
            chain.steps.len()
        )));
    }
    for (i, step) in chain.steps.iter().enumerate() {
        if step.difference.is_zero() {
            return Err(bad(format!(
                "step {i}: zero difference, the ideal would not grow"
            )));
        }
        let resum = step
            .certificate
            .value(family)
            .map_err(|e| bad(format!("step {i}: certificate does not evaluate: {e}")))?;
        if resum != step.difference {
            return Err(bad(format!(
                "step {i}: certificate re-sums to {resum}, difference is {}",
                step.difference
            )));
        }
        if chain.terms[i + 1].add(&step.difference) != chain.terms[i] {
            return Err(bad(format!(
                "step {i}: term {} plus the difference is not term {i}",
                i + 1
            )));
        }
    }
    Ok(())
}

fn check_formal_factorization(factorization: &FormalFactorization) -> Result<()> {
    for atom in &factorization.a_atoms {
        if !atom.is_well_formed() {
            return Err(bad(format!("malformed doubled atom {atom:?}")));
        }
    }
    Ok(())
}

fn check_formal_chain(chain: &FormalChain) -> Result<()> {
    if chain.terms.is_empty() {
        return Err(bad("chain has no terms".to_string()));
    }
    if chain.steps.len() + 1 != chain.terms.len() {
        return Err(bad(format!(
            "{} terms require {} steps, certificate has {}",
            chain.terms.len(),
            chain.terms.len() - 1,
            chain.steps.len()
        )));
    }
    for (i, step) in chain.steps.iter().enumerate() {
        if step.difference.is_zero() {
            return Err(bad(format!(
                "step {i}: zero difference, the ideal would not grow"
            )));
        }
        check_formal_factorization(&step.certificate)?;
        let resum = step.certificate.value();
        if resum != step.difference {
            return Err(bad(format!(
                "step {i}: certificate re-sums to {resum}, difference is {}",
                step.difference
            )));
        }
        if chain.terms[i + 1].add(&step.difference) != chain.terms[i] {
            return Err(bad(format!(
                "step {i}: term {} plus the difference is not term {i}",
                i + 1
            )));
        }
    }
    Ok(())
}

fn check_algebra_chain(chain: &AlgebraChain) -> Result<()> {
    let family = match chain.terms.first() {
        Some(t) => t.family().clone(),
        None => return Err(bad("algebra chain has no terms".to_string())),
    };
    check_rational_chain(&family, &chain.base)?;
    if chain.terms.len() != chain.base.terms.len()
        || chain.quotients.len() != chain.base.steps.len()
    {
        return Err(bad(
            "algebra chain shape does not match its base chain".to_string(),
        ));
    }
    for (i, term) in chain.terms.iter().enumerate() {
        let e = &chain.base.terms[i];
        if term.support() != vec![e.clone()] || !term.coefficient(e).is_one() {
            return Err(bad(format!(
                "term {i} is not the monomial of base term {e}"
            )));
        }
    }
    for (i, quotient) in chain.quotients.iter().enumerate() {
        let e = &chain.base.steps[i].difference;
        if quotient.support() != vec![e.clone()] || !quotient.coefficient(e).is_one() {
            return Err(bad(format!(
                "quotient {i} is not the monomial of the step difference {e}"
            )));
        }
        if quotient.is_zero() || quotient.is_local_unit() {
            return Err(bad(format!("quotient {i} is not a nonzero nonunit")));
        }
        let product = chain.terms[i + 1]
            .mul(quotient)
            .map_err(|e| bad(format!("quotient {i} does not multiply: {e}")))?;
        if product != chain.terms[i] {
            return Err(bad(format!(
                "term {} times quotient {i} is not term {i}",
                i + 1
            )));
        }
    }
    Ok(())
}

fn check_formal_polynomial(f: &FormalPolynomial, what: &str) -> Result<()> {
    for (e, _) in f.terms() {
        let cert = f
            .certificate(e)
            .ok_or_else(|| bad(format!("{what}: exponent {e} has no certificate")))?;
        check_formal_factorization(cert)?;
        let resum = cert.value();
        if resum != *e {
            return Err(bad(format!(
                "{what}: exponent {e} carries a certificate for {resum}"
            )));
        }
    }
    Ok(())
}

fn check_formal_algebra_chain(chain: &FormalAlgebraChain) -> Result<()> {
    check_formal_chain(&chain.base)?;
    if chain.terms.len() != chain.base.terms.len()
        || chain.quotients.len() != chain.base.steps.len()
    {
        return Err(bad(
            "algebra chain shape does not match its base chain".to_string(),
        ));
    }
    for (i, term) in chain.terms.iter().enumerate() {
        check_formal_polynomial(term, &format!("term {i}"))?;
        let e = &chain.base.terms[i];
        if term.support() != vec![e.clone()] || !term.coefficient(e).is_one() {
            return Err(bad(format!(
                "term {i} is not the monomial of base term {e}"
            )));
        }
    }
    for (i, quotient) in chain.quotients.iter().enumerate() {
        check_formal_polynomial(quotient, &format!("quotient {i}"))?;
        let e = &chain.base.steps[i].difference;
        if quotient.support() != vec![e.clone()] || !quotient.coefficient(e).is_one() {
            return Err(bad(format!(
                "quotient {i} is not the monomial of the step difference {e}"
            )));
        }
        if quotient.is_zero() || quotient.is_unit() {
            return Err(bad(format!("quotient {i} is not a nonzero nonunit")));
        }
        let product = chain.terms[i + 1]
            .mul(quotient)
            .map_err(|e| bad(format!("quotient {i} does not multiply: {e}")))?;
        if product != chain.terms[i] {
            return Err(bad(format!(
                "term {} times quotient {i} is not term {i}",
                i + 1
            )));
        }
    }
    Ok(())
}

fn check_localization_factorization(
    input: &GenPolynomial,
    factorization: &AlgebraFactorization,
    fuel: &mut Fuel,
) -> Result<()> {
    let family = input.family().clone();
    let check_exponents = |p: &GenPolynomial, what: &str, fuel: &mut Fuel| -> Result<()> {
        for e in p.support() {
            match family.membership(&e, fuel) {
                Membership::Member(_) => {}
                Membership::NotMember { reason } => {
                    return Err(bad(format!(
                        "{what}: exponent {e} is outside the monoid: {reason}"
                    )))
                }
                Membership::Unknown => return Err(Error::FuelExhausted),
            }
        }
        Ok(())
    };
    check_exponents(input, "input", fuel)?;
    check_exponents(&factorization.unit, "unit", fuel)?;
    for (i, factor) in factorization.factors.iter().enumerate() {
        check_exponents(&factor.element, &format!("factor {i}"), fuel)?;
    }
    let product_matches = factorization
        .verify(input)
        .map_err(|e| bad(format!("re-multiplication failed: {e}")))?;
    if !product_matches {
        return Err(bad(
            "unit times factors does not re-multiply to the input".to_string(),
        ));
    }
    if factorization.bound_certified
        && factorization.factors.len() as u64 > factorization.length_bound
    {
        return Err(bad(format!(
            "{} factors exceed the certified length bound {}",
            factorization.factors.len(),
            factorization.length_bound
        )));
    }
    for (i, factor) in factorization.factors.iter().enumerate() {
        if factor.status != FactorStatus::CertifiedAtom {
            continue;
        }
        let support = factor.element.support();
        if support.len() != 1 {
            return Err(bad(format!(
                "factor {i} claims atom status but is not a monomial"
            )));
        }
        match family.is_atom(&support[0], fuel)? {
            crate::monoid::AtomDecision::Atom => {}
            crate::monoid::AtomDecision::NotAtom(x, y) => {
                return Err(bad(format!(
                    "factor {i} claims atom status but its exponent splits as {x} + {y}"
                )))
            }
            crate::monoid::AtomDecision::Unknown => return Err(Error::FuelExhausted),
        }
    }
    Ok(())
}

fn check_formal_algebra_factorization(
    input: &FormalPolynomial,
    factorization: &FormalAlgebraFactorization,
) -> Result<()> {
    check_formal_polynomial(input, "input")?;
    for (i, factor) in factorization.factors.iter().enumerate() {
        check_formal_polynomial(&factor.element, &format!("factor {i}"))?;
    }
    let product_matches = factorization
        .verify(input)
        .map_err(|e| bad(format!("re-multiplication failed: {e}")))?;
    if !product_matches {
        return Err(bad(
            "unit times factors does not re-multiply to the input".to_string(),
        ));
    }
    if factorization.bound_certified
        && factorization.factors.len() as u64 > factorization.length_bound
    {
        return Err(bad(format!(
            "{} factors exceed the certified length bound {}",
            factorization.factors.len(),
            factorization.length_bound
        )));
    }
    for (i, factor) in factorization.factors.iter().enumerate() {
        if factor.status != FactorStatus::CertifiedAtom {
            continue;
        }
        let support = factor.element.support();
        if support.len() != 1 {
            return Err(bad(format!(
                "factor {i} claims atom status but is not a monomial"
            )));
        }
        if recognize_atom(&support[0]).is_none() {
            return Err(bad(format!(
                "factor {i} claims atom status but its exponent {} is not an atom",
                support[0]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{algebra_chain, factor_in_localization, FieldKind};
    use crate::formal::accp_witness;
    use crate::formal_algebra::{algebra_chain as formal_algebra_chain, factor_in_monoid_algebra};
    use crate::literal::{parse_formal_polynomial, parse_polynomial};

    fn fuel() -> Fuel {
        Fuel::default()
    }

    fn rat(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    fn grams_membership(s: &str) -> Certificate {
        let family = GeneratorFamily::grams();
        let element = rat(s);
        let factorization = match family.membership(&element, &mut fuel()) {
            Membership::Member(f) => f,
            other => panic!("expected membership, got {other:?}"),
        };
        Certificate::MonoidMembership {
            family,
            element,
            factorization,
        }
    }

    #[test]
    fn membership_certificates_round_trip_and_validate() {
        let cert = grams_membership("31/30");
        let summary = validate(&cert, &mut fuel()).unwrap();
        assert!(summary.contains("31/30"));

        let text = serde_json::to_string(&CertificateFile::new(cert.clone())).unwrap();
        let parsed = parse_certificate(&text).unwrap();
        assert_eq!(parsed.certificate, cert);
        assert_eq!(parsed.schema_version, SCHEMA_VERSION);

        // The same file embedded in a larger report is still found.
        let report = format!("{{\"status\":\"pass\",\"certificate\":{text}}}");
        assert_eq!(parse_certificate(&report).unwrap().certificate, cert);
    }

    #[test]
    fn tampered_membership_fails() {
        let cert = grams_membership("1/6");
        let tampered = match cert {
            Certificate::MonoidMembership {
                family,
                factorization,
                ..
            } => Certificate::MonoidMembership {
                family,
                element: rat("1/5"),
                factorization,
            },
            _ => unreachable!(),
        };
        assert!(matches!(
            validate(&tampered, &mut fuel()),
            Err(Error::BadCertificate(_))
        ));
    }

    #[test]
    fn schema_version_is_enforced() {
        let cert = grams_membership("1/6");
        let mut value =
            serde_json::to_value(CertificateFile::new(cert)).unwrap();
        value["schema_version"] = serde_json::json!(999);
        let err = parse_certificate(&value.to_string()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn decomposition_and_divisor_certificates_validate() {
        let family = GeneratorFamily::grams();
        let pair = AtomizationPair::grams();
        let element = rat("31/30");
        let decomposition = canonical_decomposition(&pair, &element, &mut fuel()).unwrap();
        let cert = Certificate::CanonicalDecomposition {
            family: family.clone(),
            element: element.clone(),
            decomposition: decomposition.clone(),
        };
        validate(&cert, &mut fuel()).unwrap();

        let mut wrong = decomposition.clone();
        assert_eq!(wrong.nu, rat("1/2"));
        wrong.nu = rat("1");
        let cert = Certificate::CanonicalDecomposition {
            family: family.clone(),
            element: element.clone(),
            decomposition: wrong,
        };
        assert!(matches!(
            validate(&cert, &mut fuel()),
            Err(Error::BadCertificate(_))
        ));

        let result = greatest_divisor(&family, &element, &mut fuel()).unwrap();
        let cert = Certificate::GreatestDivisor {
            family,
            element,
            result,
        };
        validate(&cert, &mut fuel()).unwrap();
    }

    #[test]
    fn cyclic_decomposition_certificates_validate() {
        let element = rat("31/9");
        let decomposition = cyclic_decomposition(2, 3, &element).unwrap();
        let cert = Certificate::CyclicDecomposition {
            a: 2,
            b: 3,
            element,
            decomposition: decomposition.clone(),
        };
        validate(&cert, &mut fuel()).unwrap();

        let cert = Certificate::CyclicDecomposition {
            a: 2,
            b: 3,
            element: rat("2/3"),
            decomposition,
        };
        assert!(matches!(
            validate(&cert, &mut fuel()),
            Err(Error::BadCertificate(_))
        ));
    }

    #[test]
    fn chain_certificates_validate_and_reject_tampering() {
        let family = GeneratorFamily::grams();
        let chain = family.accp_witness(5, &mut fuel()).unwrap();
        let cert = Certificate::MonoidChain {
            family: family.clone(),
            chain: chain.clone(),
        };
        validate(&cert, &mut fuel()).unwrap();

        let mut broken = chain;
        broken.terms.swap(0, 1);
        let cert = Certificate::MonoidChain {
            family,
            chain: broken,
        };
        assert!(matches!(
            validate(&cert, &mut fuel()),
            Err(Error::BadCertificate(_))
        ));

        let chain = accp_witness(5).unwrap();
        validate(&Certificate::FormalChain { chain }, &mut fuel()).unwrap();
    }

    #[test]
    fn lifted_chain_certificates_validate() {
        let family = GeneratorFamily::cyclic(2, 3).unwrap();
        let chain = algebra_chain(&family, FieldKind::Q, 4, &mut fuel()).unwrap();
        validate(&Certificate::AlgebraChain { chain }, &mut fuel()).unwrap();

        let chain = formal_algebra_chain(FieldKind::Q, 4, &mut fuel()).unwrap();
        validate(&Certificate::FormalAlgebraChain { chain }, &mut fuel()).unwrap();
    }

    #[test]
    fn factorization_certificates_validate_and_reject_tampering() {
        let family = GeneratorFamily::grams();
        let input = parse_polynomial(&family, FieldKind::Fp(2), "X^(1/2)", &mut fuel()).unwrap();
        let factorization = factor_in_localization(&input, &mut fuel()).unwrap();
        let cert = Certificate::LocalizationFactorization {
            input: input.clone(),
            factorization: factorization.clone(),
        };
        validate(&cert, &mut fuel()).unwrap();

        let mut broken = factorization;
        broken.factors.pop();
        let cert = Certificate::LocalizationFactorization {
            input,
            factorization: broken,
        };
        assert!(matches!(
            validate(&cert, &mut fuel()),
            Err(Error::BadCertificate(_))
        ));

        let input = parse_formal_polynomial(FieldKind::Q, "Y^[2;-2]", &mut fuel()).unwrap();
        let factorization = factor_in_monoid_algebra(&input, &mut fuel()).unwrap();
        let cert = Certificate::FormalAlgebraFactorization {
            input,
            factorization,
        };
        validate(&cert, &mut fuel()).unwrap();
    }

    #[test]
    fn malformed_atoms_are_rejected_not_trusted() {
        // A doubled atom with no indices and doubled position zero would
        // panic if its value were read; validation must reject it first.
        let text = format!(
            "{{\"schema_version\":{SCHEMA_VERSION},\"kind\":\"formal-membership\",\
             \"element\":\"[0;2]\",\"factorization\":{{\"b_atoms\":[],\
             \"a_atoms\":[{{\"indices\":[],\"doubled\":0}}]}}}}"
        );
        let file = parse_certificate(&text).unwrap();
        assert!(matches!(
            validate(&file.certificate, &mut fuel()),
            Err(Error::BadCertificate(_))
        ));
    }
}
