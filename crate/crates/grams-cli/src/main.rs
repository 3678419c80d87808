//! Command-line front end: monoid queries, decompositions, chain witnesses,
//! algebra factoring, certificate re-validation, and the umbrella replicate
//! run. Every JSON payload carries `schema_version` and embeds certificates
//! that re-validate through `verify --certificate`.
//!
//! Exit codes: 0 pass, 1 mathematical failure or counterexample, 2 fuel
//! exhaustion, 3 bad input.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use grams::algebra::{
    algebra_chain, factor_in_localization, AlgebraFactorization, FactorStatus, FieldKind,
};
use grams::arith::Rational;
use grams::atomization::{
    canonical_decomposition, cyclic_decomposition, greatest_divisor, AtomizationPair,
};
use grams::cert::{parse_certificate, validate, Certificate, CertificateFile};
use grams::corpus::{
    formal_grid, formal_polynomials_f2, grams_elements, grams_polynomials_f2, psi_pairs,
    span_hypothesis, CORPUS_SEED,
};
use grams::formal::{
    accp_witness as formal_accp_witness, construct_span_a, factor_in_monoid_capped, omega, psi,
    span_a_decide, FormalReal,
};
use grams::formal_algebra::{
    algebra_chain as formal_algebra_chain, factor_in_monoid_algebra, FormalAlgebraFactorization,
};
use grams::literal::{parse_family, parse_formal_polynomial, parse_polynomial};
use grams::monoid::{GeneratorFamily, Membership};
use grams::oracle::{
    a_span_member, enumerate, greatest_divisor as oracle_greatest_divisor, Coords, Frac,
    GreatestDivisorOutcome,
};
use grams::{Decision, Error, Fuel, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "grams",
    version,
    about = "Exact factorization theory in Puiseux monoids and their algebras"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Search budget shared by every operation of the run.
    #[arg(long, global = true, default_value_t = Fuel::DEFAULT_BUDGET)]
    fuel: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Coefficient field: Q or a prime such as F2.
    #[arg(long, global = true, default_value = "Q")]
    field: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// First atoms of the Grams monoid, with optional membership queries.
    Grams {
        /// How many generators to list.
        #[arg(long, default_value_t = 6)]
        count: usize,
        /// Decide membership of this element and certify it.
        #[arg(long)]
        element: Option<String>,
    },
    /// Canonical decomposition over an atomization-style family.
    Atomize {
        #[arg(long, default_value = "grams")]
        family: String,
        element: String,
    },
    /// Greatest divisor in the distinguished submonoid.
    Gd {
        #[arg(long, default_value = "grams")]
        family: String,
        element: String,
    },
    /// Digit decomposition in the cyclic monoid generated by powers of a/b.
    Cyclic {
        #[arg(long, default_value_t = 2)]
        a: u64,
        #[arg(long, default_value_t = 3)]
        b: u64,
        element: String,
    },
    /// ACCP-failure chain witness for a family (or `formal`), optionally
    /// lifted to the monoid algebra.
    Chain {
        #[arg(long, default_value = "grams")]
        family: String,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Lift the chain to principal ideals of the algebra.
        #[arg(long)]
        algebra: bool,
    },
    /// Formal-monoid queries over coordinate literals like "[1;-1,0,2]".
    Formal {
        #[command(subcommand)]
        query: FormalQuery,
    },
    /// Factoring in the localized algebra or the formal monoid algebra.
    Algebra {
        #[command(subcommand)]
        op: AlgebraOp,
    },
    /// Re-validate a certificate file, or run the oracle suites.
    Verify {
        /// JSON file holding a certificate (or a report embedding one).
        #[arg(long, conflicts_with = "suite")]
        certificate: Option<PathBuf>,
        /// Re-derive atoms, greatest divisors, and span membership through
        /// the independent enumeration oracle.
        #[arg(long)]
        suite: bool,
    },
    /// Run every construction end to end and print a pass/fail table.
    Replicate,
}

#[derive(Subcommand)]
enum FormalQuery {
    /// Doubled-coordinate excess: sum of (c_i - 1) over positive entries.
    Psi { element: String },
    /// Unit deficit: sum of max(c_i, 1) - c_i plus excess bookkeeping.
    Omega { element: String },
    /// Constructive doubled-atom cover under the two-heavy-indices
    /// hypothesis.
    Construct { element: String },
    /// Decide membership in the doubled-atom span, with witness.
    Span { element: String },
    /// Factorizations into telescope and doubled atoms.
    Factor { element: String },
}

#[derive(Subcommand)]
enum AlgebraOp {
    /// Factor a polynomial; `--formal` switches to the formal monoid
    /// algebra and Y-literals.
    Factor {
        /// Parse the input as a formal-algebra polynomial like "Y^[2;-2]".
        #[arg(long)]
        formal: bool,
        /// Ambient family for the localized route.
        #[arg(long, default_value = "grams")]
        family: String,
        polynomial: String,
    },
}

/// A command's result in all three renderings, plus the process exit code.
struct Report {
    json: Value,
    pretty: Vec<String>,
    tsv: Vec<Vec<String>>,
    exit: u8,
}

impl Report {
    fn new(json: Value, pretty: Vec<String>, tsv: Vec<Vec<String>>) -> Report {
        Report {
            json,
            pretty,
            tsv,
            exit: 0,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.global.format;
    match run(cli) {
        Ok(report) => {
            emit(&report, format);
            ExitCode::from(report.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::FuelExhausted => 2,
        Error::NotAMember { .. } | Error::BadCertificate(_) | Error::Internal(_) => 1,
        _ => 3,
    }
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report.json).expect("serializable report")
            );
        }
        Format::Tsv => {
            for row in &report.tsv {
                println!("{}", row.join("\t"));
            }
        }
        Format::Pretty => {
            for line in &report.pretty {
                println!("{line}");
            }
        }
    }
}

fn run(cli: Cli) -> Result<Report, Error> {
    let mut fuel = Fuel::new(cli.global.fuel);
    let field = FieldKind::parse(&cli.global.field)?;
    match cli.command {
        Command::Grams { count, element } => cmd_grams(count, element, &mut fuel),
        Command::Atomize { family, element } => cmd_atomize(&family, &element, &mut fuel),
        Command::Gd { family, element } => cmd_gd(&family, &element, &mut fuel),
        Command::Cyclic { a, b, element } => cmd_cyclic(a, b, &element),
        Command::Chain { family, k, algebra } => cmd_chain(&family, k, algebra, field, &mut fuel),
        Command::Formal { query } => cmd_formal(query, &mut fuel),
        Command::Algebra {
            op: AlgebraOp::Factor {
                formal,
                family,
                polynomial,
            },
        } => {
            if formal {
                cmd_algebra_factor_formal(field, &polynomial, &mut fuel)
            } else {
                cmd_algebra_factor(&family, field, &polynomial, &mut fuel)
            }
        }
        Command::Verify { certificate, suite } => match certificate {
            Some(path) => cmd_verify_certificate(&path, &mut fuel),
            None if suite => cmd_verify_suite(&mut fuel),
            None => Err(Error::Precondition(
                "verify needs --certificate FILE or --suite".into(),
            )),
        },
        Command::Replicate => cmd_replicate(cli.global.fuel),
    }
}

fn certificate_value(cert: Certificate) -> Value {
    serde_json::to_value(CertificateFile::new(cert)).expect("serializable certificate")
}

fn cmd_grams(count: usize, element: Option<String>, fuel: &mut Fuel) -> Result<Report, Error> {
    let family = GeneratorFamily::grams();
    let mut rows = vec![vec![
        "index".to_string(),
        "generator".to_string(),
        "atom".to_string(),
    ]];
    let mut pretty = Vec::new();
    let mut generators = Vec::new();
    for n in 1..=count {
        let g = family.generator(n)?;
        let decision = family.is_atom(&g, fuel)?;
        let is_atom = decision.is_atom();
        pretty.push(format!("a_{n} = {g}  atom: {is_atom}"));
        rows.push(vec![n.to_string(), g.to_string(), is_atom.to_string()]);
        generators.push(json!({
            "index": n,
            "generator": g,
            "atom": is_atom,
        }));
    }
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "grams",
        "generators": generators,
    });
    if let Some(text) = element {
        let b = Rational::parse(&text)?;
        match family.membership(&b, fuel) {
            Membership::Member(cert) => {
                pretty.push(format!("{b} is a member: {cert}"));
                rows.push(vec![
                    "member".to_string(),
                    b.to_string(),
                    cert.to_string(),
                ]);
                doc["member"] = json!(true);
                doc["certificate"] = certificate_value(Certificate::MonoidMembership {
                    family,
                    element: b,
                    factorization: cert,
                });
            }
            Membership::NotMember { reason } => {
                pretty.push(format!("{b} is not a member: {reason}"));
                rows.push(vec!["member".to_string(), b.to_string(), reason.clone()]);
                doc["member"] = json!(false);
                doc["reason"] = json!(reason);
            }
            Membership::Unknown => return Err(Error::FuelExhausted),
        }
    }
    Ok(Report::new(doc, pretty, rows))
}

fn cmd_atomize(family: &str, element: &str, fuel: &mut Fuel) -> Result<Report, Error> {
    let family = parse_family(family)?;
    let pair = AtomizationPair::from_family(&family)?;
    let b = Rational::parse(element)?;
    let decomposition = canonical_decomposition(&pair, &b, fuel)?;
    let mut pretty = vec![format!("{b} = {} + residues", decomposition.nu)];
    let mut rows = vec![vec!["base".to_string(), decomposition.nu.to_string()]];
    for (&n, &r) in &decomposition.residues {
        let g = family.generator(n)?;
        pretty.push(format!("  residue {r} * a_{n} ({g})"));
        rows.push(vec![format!("residue_{n}"), r.to_string()]);
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "atomize",
        "element": b,
        "base": decomposition.nu,
        "certificate": certificate_value(Certificate::CanonicalDecomposition {
            family,
            element: b.clone(),
            decomposition,
        }),
    });
    Ok(Report::new(doc, pretty, rows))
}

fn cmd_gd(family: &str, element: &str, fuel: &mut Fuel) -> Result<Report, Error> {
    let family = parse_family(family)?;
    let b = Rational::parse(element)?;
    let result = greatest_divisor(&family, &b, fuel)?;
    let pretty = vec![
        format!("gd({b}) = {}", result.value),
        format!("atomic part = {} with certificate {}", result.atomic_part, result.atomic_certificate),
    ];
    let rows = vec![
        vec!["gd".to_string(), result.value.to_string()],
        vec!["atomic_part".to_string(), result.atomic_part.to_string()],
    ];
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "gd",
        "element": b,
        "value": result.value,
        "atomic_part": result.atomic_part,
        "certificate": certificate_value(Certificate::GreatestDivisor {
            family,
            element: b.clone(),
            result,
        }),
    });
    Ok(Report::new(doc, pretty, rows))
}

fn cmd_cyclic(a: u64, b: u64, element: &str) -> Result<Report, Error> {
    let x = Rational::parse(element)?;
    let decomposition = cyclic_decomposition(a, b, &x)?;
    let mut pretty = vec![format!(
        "{x} = {} + digits in base {a}/{b}",
        decomposition.nu
    )];
    let mut rows = vec![vec!["integer_part".to_string(), decomposition.nu.to_string()]];
    for (&n, &d) in &decomposition.digits {
        pretty.push(format!("  digit {d} at power {n}"));
        rows.push(vec![format!("digit_{n}"), d.to_string()]);
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "cyclic",
        "element": x,
        "integer_part": decomposition.nu.to_string(),
        "certificate": certificate_value(Certificate::CyclicDecomposition {
            a,
            b,
            element: x.clone(),
            decomposition,
        }),
    });
    Ok(Report::new(doc, pretty, rows))
}

fn chain_rows<T: std::fmt::Display>(terms: &[T]) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["index".to_string(), "term".to_string()]];
    for (i, t) in terms.iter().enumerate() {
        rows.push(vec![i.to_string(), t.to_string()]);
    }
    rows
}

fn cmd_chain(
    family: &str,
    k: usize,
    algebra: bool,
    field: FieldKind,
    fuel: &mut Fuel,
) -> Result<Report, Error> {
    if family.trim().eq_ignore_ascii_case("formal") {
        if algebra {
            let chain = formal_algebra_chain(field, k, fuel)?;
            let pretty = chain
                .terms
                .iter()
                .enumerate()
                .map(|(i, t)| format!("term {i}: {t}"))
                .collect();
            let rows = chain_rows(&chain.terms);
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "chain",
                "family": "formal",
                "algebra": true,
                "certificate": certificate_value(Certificate::FormalAlgebraChain { chain }),
            });
            return Ok(Report::new(doc, pretty, rows));
        }
        let chain = formal_accp_witness(k)?;
        let pretty = chain
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| format!("term {i}: {t}"))
            .collect();
        let rows = chain_rows(&chain.terms);
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": "chain",
            "family": "formal",
            "algebra": false,
            "certificate": certificate_value(Certificate::FormalChain { chain }),
        });
        return Ok(Report::new(doc, pretty, rows));
    }
    let family = parse_family(family)?;
    if algebra {
        let chain = algebra_chain(&family, field, k, fuel)?;
        let pretty = chain
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| format!("term {i}: {t}"))
            .collect();
        let rows = chain_rows(&chain.terms);
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": "chain",
            "algebra": true,
            "certificate": certificate_value(Certificate::AlgebraChain { chain }),
        });
        return Ok(Report::new(doc, pretty, rows));
    }
    let chain = family.accp_witness(k, fuel)?;
    let pretty = chain
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| format!("term {i}: {t}"))
        .collect();
    let rows = chain_rows(&chain.terms);
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "chain",
        "algebra": false,
        "certificate": certificate_value(Certificate::MonoidChain { family, chain }),
    });
    Ok(Report::new(doc, pretty, rows))
}

fn cmd_formal(query: FormalQuery, fuel: &mut Fuel) -> Result<Report, Error> {
    match query {
        FormalQuery::Psi { element } => {
            let x = FormalReal::parse(&element)?;
            let value = psi(&x);
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "formal psi",
                "element": x.to_string(),
                "value": value,
            });
            Ok(Report::new(
                doc,
                vec![value.to_string()],
                vec![vec!["psi".to_string(), value.to_string()]],
            ))
        }
        FormalQuery::Omega { element } => {
            let x = FormalReal::parse(&element)?;
            let value = omega(&x)?;
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "formal omega",
                "element": x.to_string(),
                "value": value,
            });
            Ok(Report::new(
                doc,
                vec![value.to_string()],
                vec![vec!["omega".to_string(), value.to_string()]],
            ))
        }
        FormalQuery::Construct { element } => {
            let x = FormalReal::parse(&element)?;
            let atoms = construct_span_a(&x)?;
            let pretty: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
            let rows = atoms
                .iter()
                .map(|a| vec!["atom".to_string(), a.to_string()])
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "formal construct",
                "element": x.to_string(),
                "atoms": atoms,
            });
            Ok(Report::new(doc, pretty, rows))
        }
        FormalQuery::Span { element } => {
            let x = FormalReal::parse(&element)?;
            let (member, witness) = match span_a_decide(&x, fuel)? {
                Decision::Yes(w) => (true, Some(w)),
                Decision::No => (false, None),
                Decision::Unknown => return Err(Error::FuelExhausted),
            };
            let pretty = match &witness {
                Some(w) => vec![format!("member: {w}")],
                None => vec!["not a member".to_string()],
            };
            let rows = vec![vec!["member".to_string(), member.to_string()]];
            let mut doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "formal span",
                "element": x.to_string(),
                "member": member,
            });
            if let Some(w) = witness {
                doc["certificate"] = certificate_value(Certificate::FormalMembership {
                    element: x,
                    factorization: w,
                });
            }
            Ok(Report::new(doc, pretty, rows))
        }
        FormalQuery::Factor { element } => {
            let x = FormalReal::parse(&element)?;
            let set = factor_in_monoid_capped(&x, 24, fuel)?;
            let mut pretty = vec![format!(
                "{} factorization(s), exhaustive: {}",
                set.items.len(),
                set.exhaustive
            )];
            let mut rows = vec![vec![
                "count".to_string(),
                set.items.len().to_string(),
                set.exhaustive.to_string(),
            ]];
            for item in &set.items {
                pretty.push(format!("  {item}"));
                rows.push(vec!["factorization".to_string(), item.to_string()]);
            }
            let mut doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "formal factor",
                "element": x.to_string(),
                "exhaustive": set.exhaustive,
                "factorizations": set.items,
            });
            if let Some(first) = set.items.first() {
                doc["certificate"] = certificate_value(Certificate::FormalMembership {
                    element: x,
                    factorization: first.clone(),
                });
            }
            Ok(Report::new(doc, pretty, rows))
        }
    }
}

fn factor_rows(out: &AlgebraFactorization) -> (Vec<String>, Vec<Vec<String>>) {
    let mut pretty = vec![format!(
        "unit {} * {} factor(s), length bound {} (certified: {})",
        out.unit,
        out.factors.len(),
        out.length_bound,
        out.bound_certified
    )];
    let mut rows = vec![vec![
        "factors".to_string(),
        out.factors.len().to_string(),
        out.length_bound.to_string(),
    ]];
    for f in &out.factors {
        pretty.push(format!("  {f}"));
        rows.push(vec![f.status.to_string(), f.element.to_string()]);
    }
    (pretty, rows)
}

fn cmd_algebra_factor(
    family: &str,
    field: FieldKind,
    polynomial: &str,
    fuel: &mut Fuel,
) -> Result<Report, Error> {
    let family = parse_family(family)?;
    let f = parse_polynomial(&family, field, polynomial, fuel)?;
    let out = factor_in_localization(&f, fuel)?;
    if !out.verify(&f)? {
        return Err(Error::Internal(
            "factorization does not multiply back to the input".into(),
        ));
    }
    let (pretty, rows) = factor_rows(&out);
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "algebra factor",
        "input": f.to_string(),
        "length": out.length(),
        "length_bound": out.length_bound,
        "bound_certified": out.bound_certified,
        "certificate": certificate_value(Certificate::LocalizationFactorization {
            input: f,
            factorization: out,
        }),
    });
    Ok(Report::new(doc, pretty, rows))
}

fn cmd_algebra_factor_formal(
    field: FieldKind,
    polynomial: &str,
    fuel: &mut Fuel,
) -> Result<Report, Error> {
    let f = parse_formal_polynomial(field, polynomial, fuel)?;
    let out = factor_in_monoid_algebra(&f, fuel)?;
    if !out.verify(&f)? {
        return Err(Error::Internal(
            "factorization does not multiply back to the input".into(),
        ));
    }
    let mut pretty = vec![format!(
        "unit {} * {} factor(s), length bound {} (certified: {})",
        out.unit,
        out.factors.len(),
        out.length_bound,
        out.bound_certified
    )];
    let mut rows = vec![vec![
        "factors".to_string(),
        out.factors.len().to_string(),
        out.length_bound.to_string(),
    ]];
    for f in &out.factors {
        pretty.push(format!("  {} [{}]", f.element, f.status));
        rows.push(vec![f.status.to_string(), f.element.to_string()]);
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "algebra factor --formal",
        "input": f.to_string(),
        "length": out.length(),
        "length_bound": out.length_bound,
        "bound_certified": out.bound_certified,
        "certificate": certificate_value(Certificate::FormalAlgebraFactorization {
            input: f,
            factorization: out,
        }),
    });
    Ok(Report::new(doc, pretty, rows))
}

fn cmd_verify_certificate(path: &PathBuf, fuel: &mut Fuel) -> Result<Report, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        what: "certificate file",
        text: format!("{}: {e}", path.display()),
    })?;
    let file = parse_certificate(&text)?;
    let summary = validate(&file.certificate, fuel)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "status": "pass",
        "summary": summary,
    });
    Ok(Report::new(
        doc,
        vec![format!("pass: {summary}")],
        vec![vec!["pass".to_string(), summary]],
    ))
}

/// Atoms of the first six generators, cross-checked by enumeration.
fn suite_atoms(fuel_budget: u64) -> Result<String, Error> {
    let family = GeneratorFamily::grams();
    let generators: Vec<Rational> = (1..=6)
        .map(|n| family.generator(n))
        .collect::<Result<_, _>>()?;
    let universe = enumerate(generators.iter().map(frac_of).collect(), 6)?;
    let oracle_atoms = universe.atoms();
    for (position, g) in generators.iter().enumerate() {
        let ours = family.is_atom(g, &mut Fuel::new(fuel_budget))?;
        if ours.is_unknown() {
            return Err(Error::FuelExhausted);
        }
        if ours.is_atom() != oracle_atoms.contains(&position) {
            return Err(Error::Internal(format!(
                "atom disagreement at generator {}",
                position + 1
            )));
        }
    }
    Ok("6 generators, 0 disagreements".to_string())
}

fn frac_of(r: &Rational) -> Frac {
    let num: i128 = r
        .numer()
        .to_string()
        .parse()
        .expect("oracle-scale numerator");
    let den: i128 = r
        .denom()
        .to_string()
        .parse()
        .expect("oracle-scale denominator");
    Frac::new(num, den)
}

/// Greatest divisors on a small corpus, cross-checked by enumeration.
fn suite_gd(fuel_budget: u64) -> Result<String, Error> {
    let family = GeneratorFamily::grams();
    let mut gens: Vec<Frac> = Vec::new();
    for n in 1..=3 {
        gens.push(frac_of(&family.generator(n)?));
    }
    gens.push(Frac::new(1, 2));
    gens.push(Frac::new(1, 4));
    gens.push(Frac::new(1, 1));
    let universe = enumerate(gens, 8)?;
    let n_indices: BTreeSet<usize> = [3, 4, 5].into_iter().collect();
    let corpus = grams_elements(60, 4, 3, CORPUS_SEED + 17);
    let mut checked = 0;
    for b in &corpus {
        let ours = greatest_divisor(&family, b, &mut Fuel::new(fuel_budget))?;
        match oracle_greatest_divisor(&universe, &n_indices, &frac_of(b)) {
            GreatestDivisorOutcome::Maximum(value) => {
                checked += 1;
                if value != frac_of(&ours.value) {
                    return Err(Error::Internal(format!("greatest divisor disagreement at {b}")));
                }
            }
            GreatestDivisorOutcome::TargetOutsideUniverse => {}
            GreatestDivisorOutcome::NoMaximum(_, _) => {
                return Err(Error::Internal(format!("oracle found no maximum at {b}")));
            }
        }
    }
    Ok(format!("{checked} elements, 0 disagreements"))
}

/// Span membership over the full grid, cross-checked by enumeration.
fn suite_span(fuel_budget: u64) -> Result<String, Error> {
    let grid = formal_grid(4, 4);
    for x in &grid {
        let ours = match span_a_decide(x, &mut Fuel::new(fuel_budget))? {
            Decision::Yes(_) => true,
            Decision::No => false,
            Decision::Unknown => return Err(Error::FuelExhausted),
        };
        let coords = coords_of(x);
        if ours != a_span_member(&coords) {
            return Err(Error::Internal(format!("span disagreement at {x}")));
        }
    }
    Ok(format!("{} grid points, 0 disagreements", grid.len()))
}

fn coords_of(x: &FormalReal) -> Coords {
    let max = x.support_max().unwrap_or(0);
    let mut v = vec![x.c0];
    for i in 1..=max {
        v.push(x.coeff(i));
    }
    Coords::new(v)
}

fn cmd_verify_suite(fuel: &mut Fuel) -> Result<Report, Error> {
    let budget = fuel.remaining();
    let suites: Vec<(&str, Result<String, Error>)> = vec![
        ("atoms-vs-oracle", suite_atoms(budget)),
        ("greatest-divisor-vs-oracle", suite_gd(budget)),
        ("span-vs-oracle", suite_span(budget)),
    ];
    render_items("verify", suites)
}

/// Shared renderer for named pass/fail items: builds the table in all three
/// formats and folds the statuses into the exit code.
fn render_items(
    command: &str,
    items: Vec<(&str, Result<String, Error>)>,
) -> Result<Report, Error> {
    let mut pretty = Vec::new();
    let mut rows = vec![vec![
        "item".to_string(),
        "status".to_string(),
        "detail".to_string(),
    ]];
    let mut json_items = Vec::new();
    let mut any_fail = false;
    let mut any_fuel = false;
    for (name, outcome) in items {
        let (status, detail) = match outcome {
            Ok(detail) => ("pass".to_string(), detail),
            Err(Error::FuelExhausted) => {
                any_fuel = true;
                ("fuel-exhausted".to_string(), "search budget exhausted".to_string())
            }
            Err(e) => {
                any_fail = true;
                ("fail".to_string(), e.to_string())
            }
        };
        pretty.push(format!("{name}: {status} ({detail})"));
        rows.push(vec![name.to_string(), status.clone(), detail.clone()]);
        json_items.push(json!({
            "name": name,
            "status": status,
            "detail": detail,
        }));
    }
    let status = if any_fail {
        "fail"
    } else if any_fuel {
        "fuel-exhausted"
    } else {
        "pass"
    };
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": status,
        "items": json_items,
    });
    let mut report = Report::new(doc, pretty, rows);
    report.exit = if any_fail {
        1
    } else if any_fuel {
        2
    } else {
        0
    };
    Ok(report)
}

fn replicate_chains(budget: u64) -> Result<String, Error> {
    let mut validated = 0;
    for family in [
        GeneratorFamily::grams(),
        GeneratorFamily::cyclic(2, 3)?,
        GeneratorFamily::cyclic(3, 5)?,
    ] {
        let chain = family.accp_witness(20, &mut Fuel::new(budget))?;
        validate(
            &Certificate::MonoidChain {
                family: family.clone(),
                chain,
            },
            &mut Fuel::new(budget),
        )?;
        let lift = algebra_chain(&family, FieldKind::Q, 20, &mut Fuel::new(budget))?;
        validate(&Certificate::AlgebraChain { chain: lift }, &mut Fuel::new(budget))?;
        validated += 2;
    }
    let chain = formal_accp_witness(20)?;
    validate(&Certificate::FormalChain { chain }, &mut Fuel::new(budget))?;
    let lift = formal_algebra_chain(FieldKind::Q, 20, &mut Fuel::new(budget))?;
    validate(
        &Certificate::FormalAlgebraChain { chain: lift },
        &mut Fuel::new(budget),
    )?;
    validated += 2;
    Ok(format!("{validated} twenty-term chains validated"))
}

fn replicate_decomposition(budget: u64) -> Result<String, Error> {
    let pair = AtomizationPair::grams();
    let corpus = grams_elements(300, 6, 6, CORPUS_SEED);
    for b in &corpus {
        let d = canonical_decomposition(&pair, b, &mut Fuel::new(budget))?;
        if d.value(&pair)? != *b {
            return Err(Error::Internal(format!("round trip failed at {b}")));
        }
    }
    Ok("300 round trips".to_string())
}

fn replicate_gd_axioms(budget: u64) -> Result<String, Error> {
    let family = GeneratorFamily::grams();
    let corpus = grams_elements(300, 6, 6, CORPUS_SEED);
    for b in &corpus {
        let gd = greatest_divisor(&family, b, &mut Fuel::new(budget))?;
        if gd.value.add(&gd.atomic_part) != *b {
            return Err(Error::Internal(format!("gd does not divide {b}")));
        }
        let leftover = greatest_divisor(&family, &gd.atomic_part, &mut Fuel::new(budget))?;
        if !leftover.value.is_zero() {
            return Err(Error::Internal(format!("gd(b - gd(b)) nonzero at {b}")));
        }
    }
    Ok("300 elements".to_string())
}

fn replicate_span(budget: u64) -> Result<String, Error> {
    let grid = formal_grid(4, 4);
    let mut constructed = 0;
    for x in &grid {
        if span_hypothesis(x) {
            let atoms = construct_span_a(x)?;
            let mut sum = FormalReal::zero();
            for a in &atoms {
                sum = sum.add(&a.value());
            }
            if sum != *x {
                return Err(Error::Internal(format!("construction mismatch at {x}")));
            }
            constructed += 1;
        }
        // The decision procedure must stay conclusive on the full grid.
        if matches!(
            span_a_decide(x, &mut Fuel::new(budget))?,
            Decision::Unknown
        ) {
            return Err(Error::FuelExhausted);
        }
    }
    Ok(format!("{constructed} constructions on {} points", grid.len()))
}

fn replicate_psi(budget: u64) -> Result<String, Error> {
    let _ = budget;
    let pairs = psi_pairs(200, 4, CORPUS_SEED + 5);
    for (x, a) in &pairs {
        if psi(&x.add(&a.value())) < psi(x) + 1 {
            return Err(Error::Internal(format!("psi growth fails at {x}")));
        }
    }
    Ok("200 sampled pairs".to_string())
}

fn replicate_localization(budget: u64) -> Result<String, Error> {
    let pool = grams_elements(300, 6, 6, CORPUS_SEED);
    let polynomials = grams_polynomials_f2(&pool, 12, 3, CORPUS_SEED + 7, &mut Fuel::new(budget))?;
    for f in &polynomials {
        let out = factor_in_localization(f, &mut Fuel::new(budget))?;
        if !out.verify(f)? {
            return Err(Error::Internal(format!("product identity fails at {f}")));
        }
        for factor in &out.factors {
            if factor.element.num_terms() == 1 && factor.status != FactorStatus::CertifiedAtom {
                return Err(Error::Internal(format!(
                    "monomial factor of {f} is not a certified atom"
                )));
            }
        }
    }
    Ok(format!("{} polynomials factored", polynomials.len()))
}

fn replicate_formal_algebra(budget: u64) -> Result<String, Error> {
    let polynomials = formal_polynomials_f2(8, 3, 4, 4, CORPUS_SEED + 11, &mut Fuel::new(budget))?;
    for f in &polynomials {
        let out = factor_in_monoid_algebra(f, &mut Fuel::new(budget))?;
        if !out.verify(f)? {
            return Err(Error::Internal(format!("product identity fails at {f}")));
        }
        if out.bound_certified && out.length() as u64 > out.length_bound {
            return Err(Error::Internal(format!("length bound violated at {f}")));
        }
    }
    Ok(format!("{} polynomials factored", polynomials.len()))
}

fn cmd_replicate(budget: u64) -> Result<Report, Error> {
    let items: Vec<(&str, Result<String, Error>)> = vec![
        ("grams-atoms", suite_atoms(budget)),
        ("canonical-decomposition", replicate_decomposition(budget)),
        ("greatest-divisor-axioms", replicate_gd_axioms(budget)),
        ("greatest-divisor-vs-oracle", suite_gd(budget)),
        ("accp-failure-chains", replicate_chains(budget)),
        ("span-coverage", replicate_span(budget)),
        ("span-vs-oracle", suite_span(budget)),
        ("psi-growth", replicate_psi(budget)),
        ("localization-factoring", replicate_localization(budget)),
        ("monoid-algebra-factoring", replicate_formal_algebra(budget)),
    ];
    render_items("replicate", items)
}
