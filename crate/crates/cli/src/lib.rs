//! Front end for `crystal-core`: argument types, subcommand handlers and the
//! verification suites. Every command produces one JSON document.

pub mod verify;

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use crystal_core::charsub::{construct_model, validate, StructureModel};
use crystal_core::fmcount::{formula_report_from_pattern, PartnerCountOptions};
use crystal_core::orthogroup::{m_invariant, ortho_group_order};
use crystal_core::semilinear::decode_vector;
use crystal_core::{
    count_fm_partners, extend_by_bfield, isotropic_count_formula, make_extension, ogus_basis, ortho_group_elements,
    power_twist, restrict, BFieldClass, Budget, CharDatum, DescentOptions, ExtendedDatum, FieldElement,
    GaloisField, QuadraticSpace,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::verify::{run_verify, Suite, VerifyOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] crystal_core::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "crystal-count", version, about = "Characteristic subspaces, their orthogonal groups and partner counts over finite fields")]
pub struct Cli {
    /// Enumeration budget (candidate vectors or subspaces); the group budget is min(10^6, this)
    #[arg(long, global = true, env = "CRYSTAL_COUNT_BUDGET", default_value_t = 100_000_000)]
    pub budget: u64,
    /// Compact single-line JSON (the default)
    #[arg(long, global = true, conflicts_with = "pretty")]
    pub json: bool,
    /// Indented JSON
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Odd prime
    #[arg(long)]
    pub p: u64,
    /// Artin invariant σ0 of the twisted surface, 1..=11 (dim V = 2σ0)
    #[arg(long)]
    pub sigma0: usize,
    /// Structure constants a_1..a_(σ0−1) as a JSON list of coefficient arrays, e.g. "[[0,1],[2]]"
    #[arg(long, default_value = "[]")]
    pub a: String,
    /// Degree of the field holding the constants (default: longest coefficient array)
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The standard non-neutral quadratic space of dimension 2σ0
    Space {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        sigma0: usize,
        /// Also enumerate isotropic vectors
        #[arg(long)]
        brute_force: bool,
    },
    /// Build (K, V) from structure constants and report its normalized basis
    Datum(ModelArgs),
    /// Orthogonal group of (K, V)
    Ortho(ModelArgs),
    /// Count twisted Fourier–Mukai partners
    Fm {
        #[command(flatten)]
        model: ModelArgs,
        /// Also count orbits by enumeration (requires building the datum)
        #[arg(long)]
        brute_force: bool,
    },
    /// B-field extension, restriction and twisting
    Bfield {
        #[command(subcommand)]
        action: BfieldAction,
    },
    /// Run verification suites; exit status 1 on any failure
    Verify {
        /// isotropic, ortho, fm, bfield, roundtrip or all
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        sigma0: Option<usize>,
        /// Dev fixture: perturb one Gram entry so that checks must fail
        #[arg(long, hide = true)]
        corrupt_gram: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum BfieldAction {
    /// Extend (K, V) by a B-field to (K~, V ⊕ U)
    Extend {
        /// CharDatum JSON file ("-" for stdin); otherwise built from --p/--sigma0/--a
        #[arg(long)]
        datum: Option<PathBuf>,
        #[arg(long, requires = "sigma0")]
        p: Option<u64>,
        #[arg(long, requires = "p")]
        sigma0: Option<usize>,
        #[arg(long, default_value = "[]")]
        a: String,
        #[arg(long)]
        n: Option<usize>,
        /// B as a JSON list of coefficient arrays in the datum's field
        #[arg(long)]
        b: String,
    },
    /// Recover the B-field class from an extended datum
    Restrict {
        /// ExtendedDatum JSON file ("-" for stdin)
        #[arg(long)]
        input: PathBuf,
    },
    /// Apply the isometry v ↦ λv, w ↦ λ⁻¹w
    Twist {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lambda: u64,
    },
}

/// Outcome of a command: the JSON document and whether it reports success.
pub struct Output {
    pub value: Value,
    pub success: bool,
}

impl Output {
    fn ok(value: impl Serialize) -> CliResult<Self> {
        Ok(Output { value: serde_json::to_value(value)?, success: true })
    }
}

pub fn budget_from(limit: u64) -> Budget {
    Budget { enumeration: limit, group: limit.min(Budget::default().group) }
}

/// Parses a JSON list whose items are integers or coefficient arrays.
pub fn parse_coefficients(raw: &str) -> CliResult<Vec<Vec<u64>>> {
    let v: Value = serde_json::from_str(raw)?;
    let items = v.as_array().ok_or_else(|| CliError::Usage("expected a JSON list".into()))?;
    items
        .iter()
        .map(|item| match item {
            Value::Number(n) => n.as_u64().map(|x| vec![x]).ok_or_else(|| CliError::Usage(format!("bad coefficient {n}"))),
            Value::Array(cs) => cs
                .iter()
                .map(|c| c.as_u64().ok_or_else(|| CliError::Usage(format!("bad coefficient {c}"))))
                .collect(),
            other => Err(CliError::Usage(format!("expected integer or coefficient array, got {other}"))),
        })
        .collect()
}

/// The constants and the field `GF(p^n)` they live in.
fn constants(m: &ModelArgs) -> CliResult<(GaloisField, Vec<FieldElement>)> {
    let raw = parse_coefficients(&m.a)?;
    let n = m.n.unwrap_or_else(|| raw.iter().map(Vec::len).max().unwrap_or(1).max(1));
    let field = make_extension(m.p, n)?;
    let a = raw
        .iter()
        .map(|cs| {
            if cs.len() > n {
                return Err(CliError::Usage(format!("coefficient array {cs:?} longer than field degree {n}")));
            }
            Ok(field.from_coeffs(cs)?)
        })
        .collect::<CliResult<_>>()?;
    Ok((field, a))
}

fn build_model(m: &ModelArgs) -> CliResult<StructureModel> {
    let (base, a) = constants(m)?;
    Ok(construct_model(m.sigma0, &a, &base, &DescentOptions::default())?)
}

fn read_json(path: &PathBuf) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

pub fn run(cli: &Cli) -> CliResult<Output> {
    let budget = budget_from(cli.budget);
    match &cli.command {
        Command::Space { p, sigma0, brute_force } => {
            let v = QuadraticSpace::standard(*p, *sigma0)?;
            let enumerated = if *brute_force {
                Some(v.enumerate_isotropic(&budget)?.len().to_string())
            } else {
                None
            };
            Output::ok(json!({
                "space": v,
                "non_neutral": v.is_non_neutral(),
                "isotropic_count": isotropic_count_formula(*p, *sigma0).to_string(),
                "isotropic_enumerated": enumerated,
            }))
        }
        Command::Datum(m) => {
            let model = build_model(m)?;
            let d = &model.datum;
            Output::ok(json!({
                "datum": d,
                "validation": validate(d.k(), d.space())?,
                "descent_degree": model.descent_degree,
                "constants": model.a,
                "lambda": model.lambda,
                "mu": model.mu,
                "normalized": ogus_basis(d)?,
            }))
        }
        Command::Ortho(m) => {
            let d = build_model(m)?.datum;
            let ob = ogus_basis(&d)?;
            let els = ortho_group_elements(&d, &budget)?;
            Output::ok(json!({
                "m": m_invariant(&ob.a, d.sigma0()),
                "order": ortho_group_order(&d)?.to_string(),
                "elements": els,
            }))
        }
        Command::Fm { model, brute_force } => {
            if *brute_force {
                let d = build_model(model)?.datum;
                Output::ok(count_fm_partners(&d, &PartnerCountOptions { brute_force: true, budget })?)
            } else {
                let pattern: Vec<bool> = constants(model)?.1.iter().map(|x| !x.is_zero()).collect();
                Output::ok(formula_report_from_pattern(model.p, model.sigma0, &pattern)?)
            }
        }
        Command::Bfield { action } => match action {
            BfieldAction::Extend { datum, p, sigma0, a, n, b } => {
                let d = match (datum, p, sigma0) {
                    (Some(path), _, _) => serde_json::from_str::<CharDatum>(&read_json(path)?)?,
                    (None, Some(p), Some(sigma0)) => {
                        build_model(&ModelArgs { p: *p, sigma0: *sigma0, a: a.clone(), n: *n })?.datum
                    }
                    _ => return Err(CliError::Usage("give --datum or --p and --sigma0".into())),
                };
                let bv = decode_vector(d.field(), &parse_coefficients(b)?)?;
                Output::ok(extend_by_bfield(&BFieldClass::new(d, bv)?)?)
            }
            BfieldAction::Restrict { input } => {
                let ed: ExtendedDatum = serde_json::from_str(&read_json(input)?)?;
                Output::ok(restrict(&ed)?)
            }
            BfieldAction::Twist { input, lambda } => {
                let ed: ExtendedDatum = serde_json::from_str(&read_json(input)?)?;
                Output::ok(power_twist(&ed, *lambda)?)
            }
        },
        Command::Verify { suite, p, sigma0, corrupt_gram } => {
            let suite = Suite::parse(suite).ok_or_else(|| CliError::Usage(format!("unknown suite {suite}")))?;
            let report = run_verify(suite, &VerifyOptions { budget, p: *p, sigma0: *sigma0, corrupt_gram: *corrupt_gram });
            let success = report.success();
            Ok(Output { value: serde_json::to_value(report)?, success })
        }
    }
}

/// Serializes a command result; keys are emitted in sorted order.
pub fn render(value: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("JSON values serialize")
    } else {
        serde_json::to_string(value).expect("JSON values serialize")
    }
}
