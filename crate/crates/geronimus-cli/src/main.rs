//! Command-line front end: run Geronimus transformations, emit coefficient
//! tables and factor matrices, and run the verification suite for one
//! configured instance.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 regularity failure (the failing level is reported).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use geronimus::double::{sobolev_mass_matrix, transform_double, verify_sobolev_vs_gram_2};
use geronimus::error::Error;
use geronimus::export::{
    double_transform_csv, matrix_to_csv, polynomials_to_latex, single_transform_csv, BandedRecord,
    DoubleTransformRecord, SingleTransformRecord,
};
use geronimus::jacobi::{
    cholesky_check_double, cholesky_check_single, factorize_double, factorize_single,
    psi_similarity_check, verify_darboux_double, verify_darboux_single, DoubleFactorization,
    SingleFactorization,
};
use geronimus::moments::{laguerre_divided_head, DividedMeasure, MomentFunctional};
use geronimus::ops::{build_chain, build_gram, regularity_check};
use geronimus::oracle::{check_orthogonality, heine_polynomial};
use geronimus::scalar::{
    decimal_string, parse_rational, Rational, DEFAULT_PRECISION, MIN_PRECISION,
};
use geronimus::single::{transform_single, verify_mass_vs_gram_1};

#[derive(Parser)]
#[command(
    name = "geronimus",
    about = "Exact Geronimus transformations of moment functionals and their Jacobi-matrix factorizations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a transformation; write connection coefficients, regularity
    /// certificates, norm chains, and polynomial coefficients.
    Transform(RunArgs),
    /// Build the Darboux factors and the associated monic matrices; write
    /// them as banded JSON plus dense CSV with a verification block.
    Factorize(RunArgs),
    /// Run every invariant of the configured instance; exit 0 only if all
    /// of them hold.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Measure {
    Laguerre,
    Custom,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Latex,
}

#[derive(Args)]
struct RunArgs {
    /// Which base measure to use.
    #[arg(long, value_enum)]
    measure: Measure,

    /// Laguerre parameter, an exact rational like `2` or `1/2` (> -1).
    #[arg(long)]
    alpha: Option<String>,

    /// JSON file with the moment sequence as an array of "p/q" strings
    /// (custom measure).
    #[arg(long)]
    file: Option<PathBuf>,

    /// Apply the single transformation.
    #[arg(long, conflicts_with = "double")]
    single: bool,

    /// Apply the double transformation.
    #[arg(long)]
    double: bool,

    /// Free parameter s_0* of the single transformation.
    #[arg(long = "s0star")]
    s0_star: Option<String>,

    /// Free corner of the double transformation: `s0,s1,s2`.
    #[arg(long)]
    corner: Option<String>,

    /// Truncation level N (>= 1; factorization and verify need >= 3).
    #[arg(long, short)]
    n: usize,

    /// Output format of the coefficient table.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Big-float precision in bits (>= 64). Defaults to the
    /// GERONIMUS_PRECISION environment variable, or 256.
    #[arg(long)]
    precision: Option<u32>,

    /// Render matrix CSV entries as decimals with this many significant
    /// digits instead of exact "p/q".
    #[arg(long)]
    decimal: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    run: RunArgs,

    /// Inject a fault into a connection coefficient before the matrix
    /// verification, e.g. `a:3`, `b:2`, `c:4`. The run must then fail.
    #[arg(long)]
    corrupt: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = match cli.command {
        Command::Transform(args) => cmd_transform(&args),
        Command::Factorize(args) => cmd_factorize(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", error_tag(&e));
            ExitCode::from(exit_class(&e))
        }
    }
}

/// Short tag naming the error variant and its level, e.g.
/// `DegenerateDenominator(1)`.
fn error_tag(e: &Error) -> String {
    match e {
        Error::Domain(_) => "ConfigError".into(),
        Error::ParseRational(_) => "ConfigError".into(),
        Error::DimensionMismatch(_) => "ConfigError".into(),
        Error::IndexOutOfRange { index, .. } => format!("IndexOutOfRange({index})"),
        Error::SingularMatrix { column } => format!("SingularMatrix({column})"),
        Error::NotRegular(k) => format!("NotRegular({k})"),
        Error::DegenerateDenominator(n) => format!("DegenerateDenominator({n})"),
        Error::DegenerateDeterminant(n) => format!("DegenerateDeterminant({n})"),
        Error::ExpansionResidual { level, .. } => format!("ExpansionResidual({level})"),
        Error::ZeroE(n) => format!("ZeroE({n})"),
        Error::MismatchAt { i, j, .. } => format!("MismatchAt({i},{j})"),
        Error::ToleranceExceeded { .. } => "ToleranceExceeded".into(),
        Error::RouteDisagreement { level, .. } => format!("RouteDisagreement({level})"),
    }
}

fn exit_class(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::ParseRational(_) | Error::DimensionMismatch(_) => 2,
        Error::IndexOutOfRange { .. }
        | Error::SingularMatrix { .. }
        | Error::NotRegular(_)
        | Error::DegenerateDenominator(_)
        | Error::DegenerateDeterminant(_) => 3,
        _ => 1,
    }
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn base_measure(args: &RunArgs) -> Result<(MomentFunctional, Option<Rational>), Error> {
    match args.measure {
        Measure::Laguerre => {
            let text = args
                .alpha
                .as_ref()
                .ok_or_else(|| config_error("--measure laguerre requires --alpha"))?;
            let alpha = parse_rational(text)?;
            Ok((MomentFunctional::laguerre(alpha.clone())?, Some(alpha)))
        }
        Measure::Custom => {
            let path = args
                .file
                .as_ref()
                .ok_or_else(|| config_error("--measure custom requires --file"))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            Ok((MomentFunctional::custom_from_json(&text)?, None))
        }
    }
}

enum Step {
    Single(Rational),
    Double(Rational, Rational, Rational),
}

fn step(args: &RunArgs) -> Result<Step, Error> {
    match (args.single, args.double) {
        (true, false) => {
            let text = args
                .s0_star
                .as_ref()
                .ok_or_else(|| config_error("--single requires --s0star"))?;
            Ok(Step::Single(parse_rational(text)?))
        }
        (false, true) => {
            let text = args
                .corner
                .as_ref()
                .ok_or_else(|| config_error("--double requires --corner s0,s1,s2"))?;
            let parts: Vec<&str> = text.split(',').collect();
            if parts.len() != 3 {
                return Err(config_error(format!(
                    "--corner needs exactly three rationals, got {text:?}"
                )));
            }
            Ok(Step::Double(
                parse_rational(parts[0])?,
                parse_rational(parts[1])?,
                parse_rational(parts[2])?,
            ))
        }
        _ => Err(config_error("choose exactly one of --single / --double")),
    }
}

fn precision(args: &RunArgs) -> Result<u32, Error> {
    let p = match args.precision {
        Some(p) => p,
        None => match std::env::var("GERONIMUS_PRECISION") {
            Ok(text) => text
                .parse::<u32>()
                .map_err(|_| config_error(format!("GERONIMUS_PRECISION={text} is not a number")))?,
            Err(_) => DEFAULT_PRECISION,
        },
    };
    if p < MIN_PRECISION {
        return Err(config_error(format!(
            "precision must be at least {MIN_PRECISION} bits, got {p}"
        )));
    }
    Ok(p)
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)
        .map_err(|e| config_error(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable record");
    text.push('\n');
    text
}

/// The divided-measure head moments when the base is Laguerre with alpha
/// off the poles; custom measures have no canonical divided measure.
fn known_head(alpha: Option<&Rational>, order: usize) -> Option<Vec<Rational>> {
    alpha.and_then(|a| laguerre_divided_head(a, order).ok())
}

fn cmd_transform(args: &RunArgs) -> Result<(), Error> {
    if args.n < 1 {
        return Err(config_error("--n must be at least 1"));
    }
    let (base, alpha) = base_measure(args)?;
    match step(args)? {
        Step::Single(s0_star) => {
            let (_, ops, sk) = build_chain(&base, args.n)?;
            let st = transform_single(&base, &ops, &sk, &s0_star, args.n)?;
            let record = SingleTransformRecord::new(&st);
            let json = write_out(&args.out, "transform_single.json", &to_pretty_json(&record))?;
            println!("wrote {}", json.display());
            match args.format {
                Format::Csv => {
                    let path = write_out(
                        &args.out,
                        "transform_single.csv",
                        &single_transform_csv(&st),
                    )?;
                    println!("wrote {}", path.display());
                }
                Format::Latex => {
                    let tex = polynomials_to_latex("P^*", st.p_star_all());
                    let path = write_out(&args.out, "transform_single.tex", &tex)?;
                    println!("wrote {}", path.display());
                }
                Format::Json => {}
            }
            println!("single transformation regular to level {}", st.n_max());
        }
        Step::Double(s0, s1, s2) => {
            if args.n < 2 {
                return Err(config_error("--double needs --n >= 2"));
            }
            let (_, ops, sk) = build_chain(&base, args.n)?;
            let dt = transform_double(&base, &ops, &sk, &s0, &s1, &s2, args.n)?;
            let mass = known_head(alpha.as_ref(), 2)
                .map(|head| DividedMeasure::new(base.clone(), 2, head).unwrap())
                .map(|div| sobolev_mass_matrix(&div, &s0, &s1, &s2))
                .transpose()?;
            let record = DoubleTransformRecord::new(&dt, mass.as_ref());
            let json = write_out(&args.out, "transform_double.json", &to_pretty_json(&record))?;
            println!("wrote {}", json.display());
            match args.format {
                Format::Csv => {
                    let path = write_out(
                        &args.out,
                        "transform_double.csv",
                        &double_transform_csv(&dt),
                    )?;
                    println!("wrote {}", path.display());
                }
                Format::Latex => {
                    let tex = polynomials_to_latex("P^{**}", dt.p_ss_all());
                    let path = write_out(&args.out, "transform_double.tex", &tex)?;
                    println!("wrote {}", path.display());
                }
                Format::Json => {}
            }
            println!("double transformation regular to level {}", dt.n_max());
        }
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct VerificationBlock {
    identities: Vec<String>,
    max_residual: String,
    exact: bool,
}

#[derive(serde::Serialize)]
struct FactorizeRecord {
    kind: &'static str,
    n: usize,
    j_mon: BandedRecord,
    target: BandedRecord,
    l_mon: BandedRecord,
    u_mon: BandedRecord,
    verification: VerificationBlock,
}

fn cmd_factorize(args: &RunArgs) -> Result<(), Error> {
    let (base, _) = base_measure(args)?;
    let decimal = args.decimal;
    match step(args)? {
        Step::Single(s0_star) => {
            let fac: SingleFactorization = factorize_single(&base, &s0_star, args.n)?;
            let record = FactorizeRecord {
                kind: "single",
                n: args.n,
                j_mon: BandedRecord::new(&fac.j_mon.matrix()),
                target: BandedRecord::new(&fac.j_star_mon.matrix()),
                l_mon: BandedRecord::new(&fac.factors.l_mon),
                u_mon: BandedRecord::new(&fac.factors.u_mon),
                verification: VerificationBlock {
                    identities: fac.report.identities.clone(),
                    max_residual: "0".into(),
                    exact: true,
                },
            };
            let json = write_out(&args.out, "factorize_single.json", &to_pretty_json(&record))?;
            println!("wrote {}", json.display());
            for (name, m) in [
                ("j_mon.csv", fac.j_mon.matrix()),
                ("j_star_mon.csv", fac.j_star_mon.matrix()),
                ("l_mon.csv", fac.factors.l_mon.clone()),
                ("u_mon.csv", fac.factors.u_mon.clone()),
            ] {
                let path = write_out(&args.out, name, &matrix_to_csv(&m, decimal))?;
                println!("wrote {}", path.display());
            }
            for line in &fac.report.identities {
                println!("verified: exact: {line}");
            }
        }
        Step::Double(s0, s1, s2) => {
            let fac: DoubleFactorization = factorize_double(&base, (&s0, &s1, &s2), args.n)?;
            let record = FactorizeRecord {
                kind: "double",
                n: args.n,
                j_mon: BandedRecord::new(&fac.j_mon.matrix()),
                target: BandedRecord::new(&fac.jss_mon),
                l_mon: BandedRecord::new(&fac.factors.l_mon),
                u_mon: BandedRecord::new(&fac.factors.u_mon),
                verification: VerificationBlock {
                    identities: fac.report.identities.clone(),
                    max_residual: "0".into(),
                    exact: true,
                },
            };
            let json = write_out(&args.out, "factorize_double.json", &to_pretty_json(&record))?;
            println!("wrote {}", json.display());
            for (name, m) in [
                ("j_mon.csv", fac.j_mon.matrix()),
                ("jss_mon.csv", fac.jss_mon.clone()),
                ("l_mon.csv", fac.factors.l_mon.clone()),
                ("u_mon.csv", fac.factors.u_mon.clone()),
            ] {
                let path = write_out(&args.out, name, &matrix_to_csv(&m, decimal))?;
                println!("wrote {}", path.display());
            }
            for line in &fac.report.identities {
                println!("verified: exact: {line}");
            }
        }
    }
    Ok(())
}

/// Parse `a:3` / `b:2` / `c:4` into (coefficient kind, level).
fn parse_corrupt(text: &str) -> Result<(char, usize), Error> {
    let (kind, level) = text
        .split_once(':')
        .ok_or_else(|| config_error("--corrupt expects kind:level, e.g. a:3"))?;
    let kind = match kind {
        "a" | "b" | "c" => kind.chars().next().unwrap(),
        _ => return Err(config_error("--corrupt kind must be a, b, or c")),
    };
    let level: usize = level
        .parse()
        .map_err(|_| config_error(format!("--corrupt level {level:?} is not an integer")))?;
    Ok((kind, level))
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Error> {
    let run = &args.run;
    if run.n < 3 {
        return Err(config_error("verify needs --n >= 3"));
    }
    let (base, _) = base_measure(run)?;
    let prec = precision(run)?;
    let n = run.n;

    // Regularity of the base form, with the failing minor named.
    let base_gram = build_gram(&base, n)?;
    let reg = regularity_check(&base_gram);
    if let Some(k) = reg.first_singular {
        return Err(Error::NotRegular(k));
    }
    println!(
        "base regularity: regular to order {}, positive definite: {}",
        n + 1,
        reg.is_positive_definite()
    );

    // Orthogonality oracle and Heine cross-check on the base family.
    let (_, ops, _) = build_chain(&base, n)?;
    let report = check_orthogonality(&base_gram, ops.polys());
    if let Some(f) = report.failure {
        return Err(Error::MismatchAt {
            i: f.i,
            j: f.j,
            context: f.identity,
            left: f.left,
            right: f.right,
        });
    }
    println!(
        "base orthogonality oracle: {} pairings checked",
        report.checks
    );
    for k in 0..=n.min(8) {
        if &heine_polynomial(&base_gram, k)? != ops.poly(k) {
            return Err(Error::RouteDisagreement {
                level: k,
                detail: "Heine determinant route vs linear solve".into(),
            });
        }
    }
    println!(
        "heine determinant construction: matches to degree {}",
        n.min(8)
    );

    match step(run)? {
        Step::Single(s0_star) => {
            let fac = factorize_single(&base, &s0_star, n)?;
            for line in &fac.report.identities {
                println!("darboux: {line}");
            }

            for head0 in [
                Rational::from_integer(0.into()),
                Rational::from_integer(1.into()),
            ] {
                let div = DividedMeasure::new(base.clone(), 1, vec![head0])?;
                verify_mass_vs_gram_1(&div, &s0_star, n)?;
            }
            println!("mass-point representation: equals Gram for i, j <= {n}, two heads");

            let depth = n + 2;
            let (gram_d, ops_d, sk_d) = build_chain(&base, depth)?;
            let st = transform_single(&base, &ops_d, &sk_d, &s0_star, depth)?;
            let transformed_pd = st
                .h_star_sq_all()
                .iter()
                .all(|h| h > &Rational::from_integer(0.into()));
            if reg.is_positive_definite() && transformed_pd {
                let chol = cholesky_check_single(&gram_d, &ops_d, &st, n, prec)?;
                println!(
                    "cholesky J* = LL^T: residual {} <= 2^-{} ({} exact identities)",
                    decimal_string(&chol.max_residual.to_rational(), 3),
                    prec / 2,
                    chol.rational_identities
                );
                let asym = psi_similarity_check(&fac.j_star_mon, prec)?;
                println!(
                    "psi similarity: max asymmetry {}",
                    decimal_string(&asym.to_rational(), 3)
                );
            } else {
                println!("cholesky check skipped: instance not positive definite");
            }

            if let Some(text) = &args.corrupt {
                let (kind, level) = parse_corrupt(text)?;
                if kind != 'a' {
                    return Err(config_error("single factors only have a-coefficients"));
                }
                if level == 0 || level >= n {
                    return Err(config_error(format!(
                        "corrupt level must be in 1..{n} for this truncation"
                    )));
                }
                let mut bad = fac;
                let old = bad.factors.l_mon.get(level, level - 1);
                bad.factors
                    .l_mon
                    .set(level, level - 1, old + Rational::from_integer(1.into()));
                verify_darboux_single(&bad.j_mon, &bad.factors, &bad.j_star_mon)?;
                return Err(Error::RouteDisagreement {
                    level,
                    detail: "injected fault was not detected".into(),
                });
            }
        }
        Step::Double(s0, s1, s2) => {
            let fac = factorize_double(&base, (&s0, &s1, &s2), n)?;
            for line in &fac.report.identities {
                println!("darboux: {line}");
            }

            let zero = Rational::from_integer(0.into());
            let one = Rational::from_integer(1.into());
            for head in [
                vec![zero.clone(), zero.clone()],
                vec![one.clone(), one.clone()],
            ] {
                let div = DividedMeasure::new(base.clone(), 2, head)?;
                verify_sobolev_vs_gram_2(&div, &s0, &s1, &s2, n)?;
            }
            println!("sobolev representation: equals Gram for i, j <= {n}, two heads");

            let depth = n + 4;
            let (gram_d, ops_d, sk_d) = build_chain(&base, depth)?;
            let dt = transform_double(&base, &ops_d, &sk_d, &s0, &s1, &s2, depth)?;
            let transformed_pd = dt.h_ss_sq_all().iter().all(|h| h > &zero);
            if reg.is_positive_definite() && transformed_pd {
                let chol = cholesky_check_double(&gram_d, &ops_d, &dt, n, prec)?;
                println!(
                    "cholesky J** = LL^T: residual {} <= 2^-{} ({} exact identities)",
                    decimal_string(&chol.max_residual.to_rational(), 3),
                    prec / 2,
                    chol.rational_identities
                );
            } else {
                println!("cholesky check skipped: instance not positive definite");
            }

            if let Some(text) = &args.corrupt {
                let (kind, level) = parse_corrupt(text)?;
                let (row, col) = match kind {
                    'b' => (level, level.wrapping_sub(1)),
                    'c' => (level, level.wrapping_sub(2)),
                    _ => return Err(config_error("double factors have b/c coefficients")),
                };
                if level < 2 || row >= n {
                    return Err(config_error(format!(
                        "corrupt level must be in 2..{n} for this truncation"
                    )));
                }
                let mut bad = fac;
                let old = bad.factors.l_mon.get(row, col);
                bad.factors
                    .l_mon
                    .set(row, col, old + Rational::from_integer(1.into()));
                verify_darboux_double(&bad.j_mon, &bad.factors, &bad.jss_mon)?;
                return Err(Error::RouteDisagreement {
                    level,
                    detail: "injected fault was not detected".into(),
                });
            }
        }
    }

    println!("all invariants hold for this instance");
    Ok(())
}
