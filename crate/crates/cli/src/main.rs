//! Batch front end: configure a tame datum, run per-configuration analyses or
//! the full identity suite, and emit text or JSON reports.
//!
//! Exit codes: 0 all checks pass, 1 usage/config error, 2 identity violation,
//! 3 internal assertion.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use whittaker_scatter::report::{AnalysisConfig, ElemSpec, PairPolicy, ReportDocument, ThetaSelector};
use whittaker_scatter::tate::AdditiveCharData;
use whittaker_scatter::verify::{self, Fault, VerifyOptions};
use whittaker_scatter::whittaker::{scattering_report, CheckOutcome, ScatteringReport};
use whittaker_scatter::{ClassModN, CycloNum, Error, TameLocalDatum};

const DEFAULT_SEED: u64 = 0x5ca7_7e12;

#[derive(Parser)]
#[command(name = "whittaker-scatter", version, about = "Exact scattering-matrix computations for tame covering-group principal series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scattering matrix, trace, dimensions and per-configuration checks
    Analyze(RunArgs),
    /// The full exact identity suite; nonzero exit names the failing identity
    Verify(RunArgs),
    /// Gram table of the Hilbert pairing, maximal isotropics and valid pairs
    Pairing(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ThetaArg {
    Unramified,
    RamifiedPlus,
    RamifiedMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args)]
struct RunArgs {
    /// Residue characteristic (odd prime)
    #[arg(long)]
    p: Option<u64>,
    /// Residue degree: q = p^f
    #[arg(long)]
    f: Option<usize>,
    /// Cover degree (odd, n | q - 1)
    #[arg(long)]
    n: Option<u64>,
    /// Monic modulus of F_q over F_p, comma-separated coefficients (low first)
    #[arg(long, value_delimiter = ',')]
    modulus_poly: Option<Vec<u64>>,
    /// Which quadratic character θ to analyze
    #[arg(long, value_enum)]
    theta: Option<ThetaArg>,
    /// Conductor e(ψ): smallest k with ψ trivial on 𝔭^k
    #[arg(long)]
    psi_conductor: Option<i64>,
    /// Extra unit twist of ψ (residue of a unit)
    #[arg(long)]
    psi_twist: Option<i64>,
    /// Twisting element, "valuation:unit-residue"; repeatable
    #[arg(long = "c", value_name = "V:UNIT")]
    c: Vec<String>,
    /// Isotropic pairs to use: standard, all, or an index
    #[arg(long)]
    pairs: Option<String>,
    /// JSON config file; explicit flags override its fields
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for the randomized Fourier-inversion sample
    #[arg(long, hide = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Deliberately corrupt an internal quantity (testing the failure path)
    #[arg(long, hide = true, value_name = "KIND")]
    inject_fault: Option<String>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidConfig(_) | Error::Parse(_) => 1,
            Error::IdentityViolation { .. } => 2,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let benign = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let outcome = match cli.command {
        Command::Analyze(args) => run(args, cmd_analyze),
        Command::Verify(args) => run(args, cmd_verify),
        Command::Pairing(args) => run(args, cmd_pairing),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Resolve the config, run a subcommand body, deliver its rendered output.
fn run(
    args: RunArgs,
    body: fn(&AnalysisConfig, &RunArgs) -> Result<(String, u8), Failure>,
) -> Result<u8, Failure> {
    let config = resolve_config(&args)?;
    let (text, code) = body(&config, &args)?;
    match &args.output {
        Some(path) => fs::write(path, text.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(code)
}

/// Config file first, explicit flags override, then validate.
fn resolve_config(args: &RunArgs) -> Result<AnalysisConfig, Failure> {
    let mut config = match &args.config {
        Some(path) => {
            let raw = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<AnalysisConfig>(&raw)
                .map_err(|e| Failure::usage(format!("bad config {}: {e}", path.display())))?
        }
        None => {
            let (Some(p), Some(n)) = (args.p, args.n) else {
                return Err(Failure::usage("--p and --n are required (or pass --config)"));
            };
            AnalysisConfig {
                p,
                f: 1,
                n,
                modulus_poly: None,
                theta: ThetaSelector::Unramified,
                psi_conductor: 0,
                psi_twist: None,
                c_list: vec![ElemSpec { valuation: 0, unit: 1 }],
                pair_policy: PairPolicy::Standard,
            }
        }
    };
    if let Some(p) = args.p {
        config.p = p;
    }
    if let Some(f) = args.f {
        config.f = f;
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(m) = &args.modulus_poly {
        config.modulus_poly = Some(m.clone());
    }
    if let Some(t) = args.theta {
        config.theta = match t {
            ThetaArg::Unramified => ThetaSelector::Unramified,
            ThetaArg::RamifiedPlus => ThetaSelector::RamifiedPlus,
            ThetaArg::RamifiedMinus => ThetaSelector::RamifiedMinus,
        };
    }
    if let Some(e) = args.psi_conductor {
        config.psi_conductor = e;
    }
    if let Some(t) = args.psi_twist {
        config.psi_twist = Some(t);
    }
    if !args.c.is_empty() {
        config.c_list = args.c.iter().map(|s| parse_elem(s)).collect::<Result<_, _>>()?;
    }
    if let Some(p) = &args.pairs {
        config.pair_policy = match p.as_str() {
            "standard" => PairPolicy::Standard,
            "all" => PairPolicy::All,
            k => PairPolicy::Index(
                k.parse::<usize>()
                    .map_err(|_| Failure::usage(format!("--pairs expects standard, all or an index, got {k:?}")))?,
            ),
        };
    }
    for spec in &config.c_list {
        if spec.unit.rem_euclid(config.p as i64) == 0 {
            return Err(Failure::usage(format!("c unit {} is not a unit mod {}", spec.unit, config.p)));
        }
    }
    if let Some(t) = config.psi_twist {
        if t.rem_euclid(config.p as i64) == 0 {
            return Err(Failure::usage(format!("psi twist {t} is not a unit mod {}", config.p)));
        }
    }
    Ok(config)
}

fn parse_elem(s: &str) -> Result<ElemSpec, Failure> {
    let (v, u) = s
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("--c expects \"valuation:unit\", got {s:?}")))?;
    let valuation =
        v.trim().parse::<i64>().map_err(|_| Failure::usage(format!("bad valuation in --c {s:?}")))?;
    let unit =
        u.trim().parse::<i64>().map_err(|_| Failure::usage(format!("bad unit in --c {s:?}")))?;
    Ok(ElemSpec { valuation, unit })
}

fn parse_fault(args: &RunArgs) -> Result<Option<Fault>, Failure> {
    match args.inject_fault.as_deref() {
        None => Ok(None),
        Some("corrupt-gauss") => Ok(Some(Fault::CorruptGauss)),
        Some(other) => Err(Failure::usage(format!("unknown fault {other:?}"))),
    }
}

fn psi_for(datum: &Arc<TameLocalDatum>, config: &AnalysisConfig) -> AdditiveCharData {
    let mut psi = AdditiveCharData::with_conductor(datum, config.psi_conductor);
    if let Some(t) = config.psi_twist {
        let unit = whittaker_scatter::FStarElem::new(0, datum.field.from_residue(t));
        psi = psi.twist_by(&unit);
    }
    psi
}

fn approx(z: &CycloNum) -> String {
    let c = z.complex_embed();
    format!("{:+.6}{:+.6}i", c.re, c.im)
}

fn class_str(c: &ClassModN) -> String {
    format!("({},{})", c.a, c.b)
}

fn subset_str(classes: &[ClassModN]) -> String {
    let parts: Vec<String> = classes.iter().map(class_str).collect();
    format!("{{{}}}", parts.join(" "))
}

fn render_checks(out: &mut String, checks: &[CheckOutcome]) {
    for check in checks {
        if check.pass {
            out.push_str(&format!("PASS {}\n", check.name));
        } else {
            out.push_str(&format!("FAIL {} ({})\n", check.name, check.witness));
        }
    }
}

fn render_report(out: &mut String, report: &ScatteringReport) {
    out.push_str(&format!(
        "pair J = {} K = {}\n",
        subset_str(&report.pair.j_elements),
        subset_str(&report.pair.k_elements)
    ));
    out.push_str(&format!(
        "c = pi^{} * g^{}, e(psi) = {}\n",
        report.c_valuation, report.c_unit_dlog, report.psi_conductor
    ));
    out.push_str(&format!(
        "gamma(1,theta,psi) = {} ~ {}\n",
        report.gamma_1.coeff_string(),
        approx(&report.gamma_1)
    ));
    out.push_str(&format!("trace = {} ~ {}\n", report.trace.coeff_string(), approx(&report.trace)));
    for (i, row) in report.matrix.iter().enumerate() {
        let rendered: Vec<String> = row.iter().map(approx).collect();
        out.push_str(&format!("M[{i}] = [{}]\n", rendered.join(", ")));
    }
    out.push_str(&format!("dims (+,-) = ({}, {})\n", report.dim_plus, report.dim_minus));
    render_checks(out, &report.checks);
}

fn cmd_analyze(config: &AnalysisConfig, args: &RunArgs) -> Result<(String, u8), Failure> {
    let datum = verify::build_datum(config)?;
    let theta = verify::select_theta(&datum, config.theta);
    let pairs = verify::select_pairs(&datum, config.pair_policy)?;
    let psi = psi_for(&datum, config);

    let mut reports = Vec::new();
    for spec in &config.c_list {
        let c = datum.elem(spec.valuation, spec.unit);
        for pair in &pairs {
            reports.push(scattering_report(&datum, &theta, &psi, &c, pair)?);
        }
    }
    let all_passed = reports.iter().all(|r| r.checks.iter().all(|c| c.pass));
    let doc = ReportDocument { config: config.clone(), reports, suite: Vec::new(), all_passed };

    let text = match args.format {
        Format::Machine => machine(&doc)?,
        Format::Text => {
            let mut out = header(config);
            for report in &doc.reports {
                render_report(&mut out, report);
                out.push('\n');
            }
            out.push_str(verdict(all_passed));
            out
        }
    };
    Ok((text, if all_passed { 0 } else { 2 }))
}

fn cmd_verify(config: &AnalysisConfig, args: &RunArgs) -> Result<(String, u8), Failure> {
    let options = VerifyOptions { fault: parse_fault(args)?, seed: args.seed };
    let suite = verify::run_suite(config, &options)?;
    let all_passed = suite.iter().all(|c| c.pass);
    let doc = ReportDocument { config: config.clone(), reports: Vec::new(), suite, all_passed };

    let text = match args.format {
        Format::Machine => machine(&doc)?,
        Format::Text => {
            let mut out = header(config);
            render_checks(&mut out, &doc.suite);
            out.push_str(verdict(all_passed));
            out
        }
    };
    Ok((text, if all_passed { 0 } else { 2 }))
}

fn cmd_pairing(config: &AnalysisConfig, args: &RunArgs) -> Result<(String, u8), Failure> {
    let datum = verify::build_datum(config)?;
    let n = datum.n;
    let classes: Vec<ClassModN> =
        (0..n).flat_map(|a| (0..n).map(move |b| ClassModN { a, b })).collect();
    // Gram entries as exponents of ζ_n
    let gram: Vec<Vec<u64>> = classes
        .iter()
        .map(|x| classes.iter().map(|y| zeta_exponent(&datum, x, y)).collect())
        .collect();
    let isotropics = datum.enumerate_maximal_isotropics().clone();
    let pairs = datum.isotropic_pairs().clone();
    let standard = datum.standard_pair();
    let standard_index = pairs.iter().position(|p| *p == standard);

    let text = match args.format {
        Format::Machine => {
            let doc = serde_json::json!({
                "config": config,
                "classes": classes,
                "gram_zeta_exponents": gram,
                "maximal_isotropics": isotropics,
                "pairs": pairs,
                "standard_pair_index": standard_index,
            });
            serde_json::to_string_pretty(&doc).map_err(|e| Failure { code: 3, message: e.to_string() })? + "\n"
        }
        Format::Text => {
            let mut out = header(config);
            out.push_str("Gram table of the pairing, entries are exponents of zeta_n:\n");
            out.push_str("      ");
            for y in &classes {
                out.push_str(&format!("{:>6}", class_str(y)));
            }
            out.push('\n');
            for (x, row) in classes.iter().zip(&gram) {
                out.push_str(&format!("{:>6}", class_str(x)));
                for e in row {
                    out.push_str(&format!("{e:>6}"));
                }
                out.push('\n');
            }
            out.push_str(&format!("\nmaximal isotropics ({}):\n", isotropics.len()));
            for iso in &isotropics {
                out.push_str(&format!("  {}\n", subset_str(iso)));
            }
            out.push_str(&format!("valid ordered pairs (J,K): {}\n", pairs.len()));
            for (i, pair) in pairs.iter().enumerate() {
                let mark = if Some(i) == standard_index { "  (standard)" } else { "" };
                out.push_str(&format!(
                    "  [{i}] J = {} K = {}{mark}\n",
                    subset_str(&pair.j_elements),
                    subset_str(&pair.k_elements)
                ));
            }
            out
        }
    };
    Ok((text, 0))
}

fn zeta_exponent(datum: &Arc<TameLocalDatum>, x: &ClassModN, y: &ClassModN) -> u64 {
    let value = datum.class_pairing(x, y);
    (0..datum.n)
        .find(|&e| CycloNum::root_of_order(&datum.cyclo, datum.n, e as i64) == value)
        .expect("pairing lands in mu_n")
}

fn header(config: &AnalysisConfig) -> String {
    format!(
        "p = {}, f = {}, n = {}, theta = {:?}, e(psi) = {}\n",
        config.p, config.f, config.n, config.theta, config.psi_conductor
    )
}

fn verdict(all_passed: bool) -> &'static str {
    if all_passed {
        "all checks passed\n"
    } else {
        "CHECKS FAILED\n"
    }
}

fn machine(doc: &ReportDocument) -> Result<String, Failure> {
    serde_json::to_string_pretty(doc)
        .map(|s| s + "\n")
        .map_err(|e| Failure { code: 3, message: e.to_string() })
}
