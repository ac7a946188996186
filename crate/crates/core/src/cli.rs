//! Command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cellcx::json::complex_from_value;
use crate::cellcx::CellComplex;
use crate::disent::{self, DisentError};
use crate::equivar::json::equivariant_from_value;
use crate::equivar::{alternating_homology, EquivarError, EquivariantComplex};
use crate::icss::{self, IcssError};
use crate::intlin::{format_graded, trim_graded, AbelianGroup};
use crate::multipt::json::{germ_from_value, germ_to_value};
use crate::multipt::{
    epsilon_is_equivariant, image_complex, mpp_family, mpp_family_capped, unfolding_family, GermModel, MppFamily, MultiptError,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Parse the input and check its structural invariants
    Validate,
    /// Integer homology of a complex, or of the image of a germ model
    Homology,
    /// Alternating homology of an equivariant complex or of every multiple point level
    AltHomology,
    /// Multiple point spaces of a germ model
    Mpp,
    /// Image-computing spectral sequence of a germ model
    Icss,
    /// Full disentanglement report
    Analyze,
    /// Augment a germ by arcs at a top multiple point and audit the result
    Fplus,
    /// Compare the ICSS abutment with direct homology of the image
    OracleCompare,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: PathBuf,
    pub output: OutputFormat,
    pub max_k: Option<usize>,
    pub unfold: bool,
}

#[derive(Parser, Debug)]
#[command(name = "icsskit", version, about = "Image homology of combinatorial multi-germ models")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(clap::Args, Debug)]
struct CommonArgs {
    /// JSON input file
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
    /// Highest multiple point level to build
    #[arg(long)]
    max_k: Option<usize>,
    /// Work with the cone model of a stable unfolding instead (mpp and icss only)
    #[arg(long)]
    unfold: bool,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    Validate(CommonArgs),
    Homology(CommonArgs),
    AltHomology(CommonArgs),
    Mpp(CommonArgs),
    Icss(CommonArgs),
    Analyze(CommonArgs),
    Fplus(CommonArgs),
    OracleCompare(CommonArgs),
}

impl RunConfig {
    /// Parses command-line arguments, exiting through clap on bad usage.
    pub fn from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let (command, a) = match cli.command {
            CliCommand::Validate(a) => (Command::Validate, a),
            CliCommand::Homology(a) => (Command::Homology, a),
            CliCommand::AltHomology(a) => (Command::AltHomology, a),
            CliCommand::Mpp(a) => (Command::Mpp, a),
            CliCommand::Icss(a) => (Command::Icss, a),
            CliCommand::Analyze(a) => (Command::Analyze, a),
            CliCommand::Fplus(a) => (Command::Fplus, a),
            CliCommand::OracleCompare(a) => (Command::OracleCompare, a),
        };
        Ok(RunConfig {
            command,
            input_path: a.input,
            output: a.output,
            max_k: a.max_k,
            unfold: a.unfold,
        })
    }
}

/// Exit status and the text destined for stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
    exit: i32,
}

impl Failure {
    fn malformed(code: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            exit: EXIT_MALFORMED,
        }
    }
}

impl From<MultiptError> for Failure {
    fn from(e: MultiptError) -> Self {
        Failure::malformed(e.code(), e.to_string())
    }
}

impl From<EquivarError> for Failure {
    fn from(e: EquivarError) -> Self {
        Failure::malformed(e.code(), e.to_string())
    }
}

impl From<IcssError> for Failure {
    fn from(e: IcssError) -> Self {
        let exit = match e {
            IcssError::Equivar(_) | IcssError::Intlin(_) | IcssError::LevelMismatch => EXIT_MALFORMED,
            _ => EXIT_CHECK_FAILED,
        };
        Failure {
            code: e.code(),
            message: e.to_string(),
            exit,
        }
    }
}

impl From<DisentError> for Failure {
    fn from(e: DisentError) -> Self {
        match e {
            DisentError::Multipt(e) => e.into(),
            DisentError::Equivar(e) => e.into(),
            DisentError::Icss(e) => e.into(),
            DisentError::Disconnected(_) => Failure::malformed(e.code(), e.to_string()),
            DisentError::NoWitness { .. } | DisentError::OracleMismatch { .. } => Failure {
                code: e.code(),
                message: e.to_string(),
                exit: EXIT_CHECK_FAILED,
            },
        }
    }
}

enum Input {
    Complex(CellComplex),
    Equivariant(EquivariantComplex),
    Germ(GermModel),
}

impl Input {
    fn kind(&self) -> &'static str {
        match self {
            Input::Complex(_) => "cell complex",
            Input::Equivariant(_) => "equivariant complex",
            Input::Germ(_) => "germ model",
        }
    }
}

fn load(path: &PathBuf) -> Result<Input, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::malformed("InputUnreadable", format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::malformed("MalformedInput", e.to_string()))?;
    if v.get("branches").is_some() {
        Ok(Input::Germ(germ_from_value(&v)?))
    } else if v.get("action").is_some() {
        let e = equivariant_from_value(&v)?;
        e.validate()?;
        e.check_relations()?;
        Ok(Input::Equivariant(e))
    } else {
        Ok(Input::Complex(complex_from_value(&v).map_err(MultiptError::from)?))
    }
}

fn need_germ(input: Input, command: &str) -> Result<GermModel, Failure> {
    match input {
        Input::Germ(g) => Ok(g),
        other => Err(Failure::malformed(
            "MalformedInput",
            format!("{command} needs a germ model, got a {}", other.kind()),
        )),
    }
}

struct Report {
    text: String,
    json: Value,
    passed: bool,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, passed: true }
    }
}

fn graded(h: &[AbelianGroup]) -> Value {
    icss::graded_to_value(&trim_graded(h))
}

fn counts_text(c: &CellComplex) -> String {
    format!("{:?}", c.cell_counts())
}

fn family(g: &GermModel, cfg: &RunConfig) -> Result<MppFamily, Failure> {
    let fam = match cfg.command {
        Command::Mpp | Command::AltHomology if !cfg.unfold => mpp_family_capped(g, cfg.max_k)?,
        _ => mpp_family(g, cfg.max_k)?,
    };
    if cfg.unfold {
        Ok(unfolding_family(&fam)?.0)
    } else {
        Ok(fam)
    }
}

fn validate(input: &Input, cfg: &RunConfig) -> Result<Report, Failure> {
    let (text, json) = match input {
        Input::Complex(c) => (
            format!("valid cell complex: cells per dimension {}\n", counts_text(c)),
            json!({"kind": "cell complex", "cells": c.cell_counts()}),
        ),
        Input::Equivariant(e) => (
            format!(
                "valid equivariant complex: S_{} acting on cells {}\n",
                e.k(),
                counts_text(e.complex())
            ),
            json!({"kind": "equivariant complex", "k": e.k(), "cells": e.complex().cell_counts()}),
        ),
        Input::Germ(g) => {
            let fam = mpp_family(g, cfg.max_k)?;
            for level in &fam.levels {
                level.validate()?;
                level.check_relations()?;
            }
            for k in 1..fam.levels.len() {
                if !epsilon_is_equivariant(&fam, k) {
                    return Err(Failure::malformed(
                        "NotChainMap",
                        format!("ε from level {} is not equivariant", k + 1),
                    ));
                }
            }
            (
                format!(
                    "valid germ model: s = {}, d = {}, n = {}, p = {}\n",
                    g.s(),
                    fam.d_of_f(),
                    g.n(),
                    g.p()
                ),
                json!({"kind": "germ model", "s": g.s(), "d": fam.d_of_f(), "n": g.n(), "p": g.p()}),
            )
        }
    };
    Ok(Report::ok(text, json))
}

fn homology(input: &Input) -> Report {
    let (what, c) = match input {
        Input::Complex(c) => ("complex", c.clone()),
        Input::Equivariant(e) => ("complex", e.complex().clone()),
        Input::Germ(g) => ("image", image_complex(g)),
    };
    let h = trim_graded(&c.homology());
    Report::ok(
        format!("homology of the {what}: {}\n", format_graded(&h)),
        json!({"homology": graded(&h), "text": format_graded(&h)}),
    )
}

fn level_rows(fam: &MppFamily) -> Result<Vec<(usize, &EquivariantComplex, Vec<AbelianGroup>)>, Failure> {
    fam.levels
        .iter()
        .enumerate()
        .map(|(i, l)| Ok((i + 1, l, trim_graded(&alternating_homology(l)?))))
        .collect()
}

fn alt_homology(input: Input, cfg: &RunConfig) -> Result<Report, Failure> {
    match input {
        Input::Equivariant(e) => {
            let h = trim_graded(&alternating_homology(&e)?);
            Ok(Report::ok(
                format!("alternating homology: {}\n", format_graded(&h)),
                json!({"alternating_homology": graded(&h), "text": format_graded(&h)}),
            ))
        }
        other => {
            let g = need_germ(other, "alt-homology")?;
            let fam = family(&g, cfg)?;
            let mut text = String::new();
            let mut levels = Vec::new();
            for (k, _, h) in level_rows(&fam)? {
                let _ = writeln!(text, "H^alt(D^{k}) = {}", format_graded(&h));
                levels.push(json!({"k": k, "alternating_homology": graded(&h), "text": format_graded(&h)}));
            }
            Ok(Report::ok(text, json!({"levels": levels})))
        }
    }
}

fn mpp(g: &GermModel, cfg: &RunConfig) -> Result<Report, Failure> {
    let fam = family(g, cfg)?;
    let capped = cfg.max_k.is_some_and(|cap| fam.levels.len() >= cap);
    let mut text = if capped {
        format!("s = {}, levels 1..={} (capped by --max-k)\n", g.s(), fam.levels.len())
    } else {
        format!("s = {}, d = {}\n", g.s(), fam.d_of_f())
    };
    let mut levels = Vec::new();
    for (k, l, h) in level_rows(&fam)? {
        let _ = writeln!(
            text,
            "D^{k}: cells {}, H^alt = {}",
            counts_text(l.complex()),
            format_graded(&h)
        );
        levels.push(json!({
            "k": k,
            "cells": l.complex().cell_counts(),
            "alternating_homology": graded(&h),
        }));
    }
    Ok(Report::ok(
        text,
        json!({
            "s": g.s(),
            "d": if capped { Value::Null } else { json!(fam.d_of_f()) },
            "capped": capped,
            "unfolded": cfg.unfold,
            "levels": levels,
        }),
    ))
}

fn icss_report(g: &GermModel, cfg: &RunConfig) -> Result<Report, Failure> {
    let fam = family(g, cfg)?;
    let run = icss::run(&fam)?;
    let mut text = format!("{}{}collapse at E_{}:\n", run.e1, run.e2, run.certificate.page);
    for t in &run.certificate.transcript {
        let _ = writeln!(text, "  {t}");
    }
    let _ = writeln!(text, "abutment: {}", format_graded(&run.abutment));
    Ok(Report::ok(text, icss::run_to_value(&run)))
}

fn analyze(g: &GermModel, cfg: &RunConfig) -> Result<Report, Failure> {
    let r = disent::analyze(g, cfg.max_k)?;
    Ok(Report {
        text: disent::report_text(&r),
        json: disent::report_to_value(&r),
        passed: r.passed(),
    })
}

fn fplus(g: &GermModel, cfg: &RunConfig) -> Result<Report, Failure> {
    let fam = mpp_family(g, cfg.max_k)?;
    let f = disent::fplus(g, &fam)?;
    Ok(Report {
        text: disent::audit_text(&f.audit),
        json: json!({"audit": disent::audit_to_value(&f.audit), "model": germ_to_value(&f.model)}),
        passed: f.audit.passed(),
    })
}

fn oracle_compare(g: &GermModel, cfg: &RunConfig) -> Result<Report, Failure> {
    let fam = mpp_family(g, cfg.max_k)?;
    let (h, _) = disent::oracle_compare(g, &fam)?;
    Ok(Report::ok(
        format!("ICSS == oracle: {}\n", format_graded(&h)),
        json!({"equal": true, "homology": graded(&h), "text": format_graded(&h)}),
    ))
}

fn execute(cfg: &RunConfig) -> Result<Report, Failure> {
    let input = load(&cfg.input_path)?;
    if cfg.unfold && !matches!(cfg.command, Command::Mpp | Command::Icss | Command::AltHomology) {
        return Err(Failure::malformed(
            "MalformedInput",
            "--unfold applies to mpp, icss and alt-homology",
        ));
    }
    match cfg.command {
        Command::Validate => validate(&input, cfg),
        Command::Homology => Ok(homology(&input)),
        Command::AltHomology => alt_homology(input, cfg),
        Command::Mpp => mpp(&need_germ(input, "mpp")?, cfg),
        Command::Icss => icss_report(&need_germ(input, "icss")?, cfg),
        Command::Analyze => analyze(&need_germ(input, "analyze")?, cfg),
        Command::Fplus => fplus(&need_germ(input, "fplus")?, cfg),
        Command::OracleCompare => oracle_compare(&need_germ(input, "oracle-compare")?, cfg),
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match execute(cfg) {
        Ok(report) => {
            let stdout = match cfg.output {
                OutputFormat::Text => report.text,
                OutputFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&report.json).expect("report serializes");
                    s.push('\n');
                    s
                }
            };
            let (code, stderr) = if report.passed {
                (EXIT_OK, String::new())
            } else {
                (EXIT_CHECK_FAILED, "check failed: see report\n".to_string())
            };
            Outcome { code, stdout, stderr }
        }
        Err(f) => Outcome {
            code: f.exit,
            stdout: String::new(),
            stderr: format!("ERROR {}: {}\n", f.code, f.message.replace('\n', " ")),
        },
    }
}
