//! Text literals for families, elements, and polynomials, as accepted on the
//! command line and emitted in reports.
//!
//! Family literals:
//!
//! * `grams`: the generators `1/(2^n p_n)` over the odd primes,
//! * `valuation:<d>`: the generators `1/d^n`,
//! * `cyclic:<a>/<b>`: the generators `(a/b)^n`,
//! * `explicit:[r1,r2,...]`: a finite list of positive rationals,
//! * `atomization:<base literal>:<p1,p2,... or odd>`: divide the base
//!   generators by fresh primes.
//!
//! Elements are plain rationals (`11/20`) or formal coordinates
//! (`[1;-1,0,2]`). Polynomials are sums of terms `c*X^(e)` over a Puiseux
//! family or `c*Y^[e]` over the formal basis; the coefficient or the
//! monomial may be omitted where unambiguous, and `-` between terms
//! subtracts.

use crate::algebra::{FieldElement, FieldKind, GenPolynomial};
use crate::arith::{PrimeSequence, Rational};
use crate::formal::FormalReal;
use crate::formal_algebra::FormalPolynomial;
use crate::monoid::GeneratorFamily;
use crate::{Error, Fuel, Result};

fn family_error(text: &str) -> Error {
    Error::Parse {
        what: "family literal",
        text: text.into(),
    }
}

/// Parse a family literal.
pub fn parse_family(text: &str) -> Result<GeneratorFamily> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("grams") {
        return Ok(GeneratorFamily::grams());
    }
    if let Some(rest) = strip_keyword(t, "valuation") {
        let d: u64 = rest.trim().parse().map_err(|_| family_error(text))?;
        return GeneratorFamily::valuation(d);
    }
    if let Some(rest) = strip_keyword(t, "cyclic") {
        let (a, b) = rest.split_once('/').ok_or_else(|| family_error(text))?;
        let a: u64 = a.trim().parse().map_err(|_| family_error(text))?;
        let b: u64 = b.trim().parse().map_err(|_| family_error(text))?;
        return GeneratorFamily::cyclic(a, b);
    }
    if let Some(rest) = strip_keyword(t, "explicit") {
        return GeneratorFamily::explicit(parse_rational_list(rest, text)?);
    }
    if let Some(rest) = strip_keyword(t, "atomization") {
        // The prime list follows the last colon so the base literal may
        // itself contain colons.
        let (base, primes) = rest.rsplit_once(':').ok_or_else(|| family_error(text))?;
        let base = parse_family(base)?;
        let primes = parse_primes(primes, text)?;
        return Ok(GeneratorFamily::atomization(base, primes));
    }
    Err(family_error(text))
}

fn strip_keyword<'a>(text: &'a str, keyword: &str) -> Option<&'a str> {
    let rest = text.strip_prefix(keyword)?;
    rest.strip_prefix(':')
}

fn parse_rational_list(text: &str, whole: &str) -> Result<Vec<Rational>> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| family_error(whole))?;
    let mut out = Vec::new();
    for piece in inner.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        out.push(Rational::parse(piece)?);
    }
    if out.is_empty() {
        return Err(family_error(whole));
    }
    Ok(out)
}

fn parse_primes(text: &str, whole: &str) -> Result<PrimeSequence> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("odd") {
        return Ok(PrimeSequence::OddPrimes);
    }
    let mut list = Vec::new();
    for piece in t.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        list.push(piece.parse::<u64>().map_err(|_| family_error(whole))?);
    }
    if list.is_empty() {
        return Err(family_error(whole));
    }
    PrimeSequence::explicit(list)
}

/// The canonical literal for a family; [`parse_family`] inverts it.
pub fn render_family(family: &GeneratorFamily) -> String {
    match family {
        GeneratorFamily::Grams {
            primes: PrimeSequence::OddPrimes,
        } => "grams".into(),
        GeneratorFamily::Grams {
            primes: PrimeSequence::Explicit(list),
        } => format!("atomization:valuation:2:{}", render_u64_list(list)),
        GeneratorFamily::Valuation { d } => format!("valuation:{d}"),
        GeneratorFamily::Cyclic { a, b } => format!("cyclic:{a}/{b}"),
        GeneratorFamily::Explicit(gens) => {
            let parts: Vec<String> = gens.iter().map(Rational::to_string).collect();
            format!("explicit:[{}]", parts.join(","))
        }
        GeneratorFamily::Atomization { base, primes } => {
            let primes = match primes {
                PrimeSequence::OddPrimes => "odd".into(),
                PrimeSequence::Explicit(list) => render_u64_list(list),
            };
            format!("atomization:{}:{}", render_family(base), primes)
        }
    }
}

fn render_u64_list(list: &[u64]) -> String {
    let parts: Vec<String> = list.iter().map(u64::to_string).collect();
    parts.join(",")
}

/// Split a polynomial literal into signed top-level terms; `+` and `-` only
/// separate terms outside brackets and parentheses.
fn signed_terms(text: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut negative = false;
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                current.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                current.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if current.trim().is_empty() {
                    if ch == '-' {
                        negative = !negative;
                    }
                } else {
                    out.push((negative, std::mem::take(&mut current)));
                    negative = ch == '-';
                }
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        out.push((negative, current));
    }
    if depth != 0 || out.is_empty() {
        return Err(Error::Parse {
            what: "polynomial literal",
            text: text.into(),
        });
    }
    Ok(out)
}

/// Split one term into its coefficient text and exponent text, given the
/// variable letter and the exponent delimiters.
fn split_term<'a>(
    term: &'a str,
    variable: char,
    open: char,
    close: char,
) -> Result<(Option<&'a str>, Option<&'a str>)> {
    let bad = || Error::Parse {
        what: "polynomial term",
        text: term.into(),
    };
    let t = term.trim();
    match t.find(variable) {
        None => Ok((Some(t), None)),
        Some(pos) => {
            let coeff = t[..pos].trim();
            let coeff = coeff.strip_suffix('*').unwrap_or(coeff).trim();
            let rest = &t[pos + variable.len_utf8()..];
            let rest = rest.trim().strip_prefix('^').ok_or_else(bad)?;
            let rest = rest.trim();
            if !(rest.starts_with(open) && rest.ends_with(close)) {
                return Err(bad());
            }
            let coeff = if coeff.is_empty() { None } else { Some(coeff) };
            Ok((coeff, Some(rest)))
        }
    }
}

/// Parse a polynomial over a Puiseux family: terms `c*X^(e)` with rational
/// exponents, e.g. `3*X^(1/6) + 1`. Exponents are membership-checked.
pub fn parse_polynomial(
    family: &GeneratorFamily,
    field: FieldKind,
    text: &str,
    fuel: &mut Fuel,
) -> Result<GenPolynomial> {
    let mut terms = Vec::new();
    for (negative, term) in signed_terms(text)? {
        let (coeff, exponent) = split_term(&term, 'X', '(', ')')?;
        let mut c = match coeff {
            Some(t) => FieldElement::parse(field, t)?,
            None => FieldElement::one(field),
        };
        if negative {
            c = c.neg();
        }
        let e = match exponent {
            Some(t) => Rational::parse(&t[1..t.len() - 1])?,
            None => Rational::zero(),
        };
        terms.push((e, c));
    }
    GenPolynomial::new(family.clone(), field, terms, fuel)
}

/// Parse a polynomial over the formal basis: terms `c*Y^[e]` with formal
/// coordinate exponents, e.g. `2*Y^[2;-1,0]+Y^[1;]`.
pub fn parse_formal_polynomial(
    field: FieldKind,
    text: &str,
    fuel: &mut Fuel,
) -> Result<FormalPolynomial> {
    let mut terms = Vec::new();
    for (negative, term) in signed_terms(text)? {
        let (coeff, exponent) = split_term(&term, 'Y', '[', ']')?;
        let mut c = match coeff {
            Some(t) => FieldElement::parse(field, t)?,
            None => FieldElement::one(field),
        };
        if negative {
            c = c.neg();
        }
        let e = match exponent {
            Some(t) => FormalReal::parse(t)?,
            None => FormalReal::zero(),
        };
        terms.push((e, c));
    }
    FormalPolynomial::new(field, terms, fuel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fuel() -> Fuel {
        Fuel::default()
    }

    #[test]
    fn family_literals_round_trip() {
        let literals = [
            "grams",
            "valuation:2",
            "cyclic:2/3",
            "explicit:[1/6,1/20]",
            "atomization:valuation:2:3,5,7",
            "atomization:explicit:[1/2,1/4]:5,7",
        ];
        for text in literals {
            let family = parse_family(text).unwrap();
            assert_eq!(render_family(&family), text, "at {text}");
        }
        assert_eq!(
            parse_family(" GRAMS ").unwrap(),
            GeneratorFamily::grams()
        );
    }

    #[test]
    fn family_literal_errors() {
        for text in [
            "",
            "grams:3",
            "valuation:x",
            "valuation:1",
            "cyclic:3/2",
            "cyclic:4",
            "explicit:[]",
            "explicit:1/2",
            "atomization:grams",
            "atomization:grams:4",
            "unknown:1",
        ] {
            assert!(parse_family(text).is_err(), "at {text:?}");
        }
    }

    #[test]
    fn puiseux_polynomial_literals() {
        let family = GeneratorFamily::grams();
        let p = parse_polynomial(&family, FieldKind::Q, "3*X^(1/6) + 1", &mut fuel()).unwrap();
        assert_eq!(p.to_string(), "3*X^(1/6) + 1");
        let p = parse_polynomial(&family, FieldKind::Q, "X^(1/3)-1", &mut fuel()).unwrap();
        assert_eq!(p.to_string(), "X^(1/3) - 1");
        let p = parse_polynomial(&family, FieldKind::Q, "-1/2", &mut fuel()).unwrap();
        assert_eq!(p.to_string(), "-1/2");
        let p = parse_polynomial(
            &family,
            FieldKind::Fp(2),
            "X^(11/20) + X^(1/2)",
            &mut fuel(),
        )
        .unwrap();
        assert_eq!(p.num_terms(), 2);

        // Exponents outside the monoid are rejected at parse time.
        assert!(matches!(
            parse_polynomial(&family, FieldKind::Q, "X^(1/25)", &mut fuel()),
            Err(Error::NotAMember { .. })
        ));
        for text in ["", "X^1/6", "X^(1/6", "3**X^(1/6)", "+"] {
            assert!(
                parse_polynomial(&family, FieldKind::Q, text, &mut fuel()).is_err(),
                "at {text:?}"
            );
        }
    }

    #[test]
    fn formal_polynomial_literals() {
        let p = parse_formal_polynomial(FieldKind::Q, "2*Y^[2;-1,0]+Y^[1;]", &mut fuel()).unwrap();
        assert_eq!(p.to_string(), "2*Y^[2;-1] + Y^[1;]");
        let p = parse_formal_polynomial(FieldKind::Q, "Y^[2;-2]", &mut fuel()).unwrap();
        assert_eq!(p.num_terms(), 1);
        let p = parse_formal_polynomial(FieldKind::Q, "Y^[0;2] - 3", &mut fuel()).unwrap();
        assert_eq!(p.to_string(), "Y^[0;2] - 3");
        // The signs inside coordinate brackets do not split terms.
        let p = parse_formal_polynomial(FieldKind::Q, "Y^[1;-1,-1] + 1", &mut fuel()).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert!(parse_formal_polynomial(FieldKind::Q, "Y^[0;1]", &mut fuel()).is_err());
        assert!(parse_formal_polynomial(FieldKind::Q, "Y^(1/2)", &mut fuel()).is_err());
    }
}
