//! Command-line front end.
//!
//! `run` parses arguments, writes records to `out` and a single-line
//! diagnostic to `err`, and returns the process exit code: 0 on success,
//! 1 when a verification or oracle comparison fails, 2 on invalid input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hermite_mult_core::coeffs::{evaluate_expansion, expand_general, CoeffVariant};
use hermite_mult_core::hermite::hermite_multi;
use hermite_mult_core::polyoracle::oracle_compare;
use hermite_mult_core::{BigRational, HermiteFamily, MultiIndex, SpdMatrix};
use serde_json::{json, Value};

use crate::formats::{
    expansion_from_json, expansion_to_csv, expansion_to_json, mpoly_to_json, multi_index_to_json, parse_list,
    spec_is_rational, to_json_string, JsonScalar, ProblemSpec,
};
use crate::verify::{run_suite, Suite, TrialConfig};

#[derive(Debug, Parser)]
#[command(name = "hermite-mult", version, about = "Multiplication theorem for multivariate Hermite polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expansion coefficients T_{k,q} for one problem file.
    Expand(ExpandArgs),
    /// Evaluate a Hermite family, or an expansion file against its left-hand side.
    Eval(EvalArgs),
    /// Run seeded verification suites and print one JSON report per suite.
    Verify(VerifyArgs),
    /// Compare both sides of the theorem exactly as polynomials.
    OracleCompare(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Symmetrized,
    PaperLiteral,
}

impl From<VariantArg> for CoeffVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Symmetrized => CoeffVariant::Symmetrized,
            VariantArg::PaperLiteral => CoeffVariant::SingleSelector,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Main,
    Gf,
    Kron,
    Selector,
    Univariate,
    Inner,
    Recurrence,
    Oracle,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        let one = match self {
            SuiteArg::All => return Suite::ALL.to_vec(),
            SuiteArg::Main => Suite::Main,
            SuiteArg::Gf => Suite::Gf,
            SuiteArg::Kron => Suite::Kron,
            SuiteArg::Selector => Suite::Selector,
            SuiteArg::Univariate => Suite::Univariate,
            SuiteArg::Inner => Suite::Inner,
            SuiteArg::Recurrence => Suite::Recurrence,
            SuiteArg::Oracle => Suite::Oracle,
        };
        vec![one]
    }
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value = "symmetrized")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// `he`, `h`, `scaled:<variance>` or `general` (covariance from --spec).
    #[arg(long, conflicts_with = "expansion")]
    pub family: Option<String>,
    /// Multi-index such as `2,1`; defaults to the one in --spec.
    #[arg(long, conflicts_with = "expansion")]
    pub k: Option<String>,
    /// Evaluation point `x1,x2,...`; repeat for several points.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub at: Vec<String>,
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Expansion written by `expand`; requires --spec.
    #[arg(long, requires = "spec")]
    pub expansion: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "symmetrized")]
    pub variant: VariantArg,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub k_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value = "symmetrized")]
    pub variant: VariantArg,
}

/// Parses `argv` (including the program name) and executes the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let line = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let _ = writeln!(err, "{}", line.trim());
            return 2;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let msg = format!("{e:#}").replace(['\n', '\r'], " ");
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn execute(cmd: &Command, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cmd {
        Command::Expand(a) => expand(a, out),
        Command::Eval(a) => eval(a, out),
        Command::Verify(a) => verify(a, out),
        Command::OracleCompare(a) => oracle(a, out),
    }
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}

fn emit(out: &mut dyn Write, v: &Value) -> anyhow::Result<()> {
    writeln!(out, "{}", to_json_string(v))?;
    Ok(())
}

fn expand(a: &ExpandArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let doc = read_json(&a.spec)?;
    if spec_is_rational(&doc)? {
        expand_typed::<BigRational>(&doc, a, out)
    } else {
        expand_typed::<f64>(&doc, a, out)
    }
}

fn factorize<S: JsonScalar>(m: &hermite_mult_core::DenseMatrix<S>, what: &str) -> anyhow::Result<SpdMatrix<S>> {
    SpdMatrix::factorize(m.clone()).with_context(|| format!("{what} is not a valid covariance"))
}

fn expand_typed<S: JsonScalar>(doc: &Value, a: &ExpandArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let spec = ProblemSpec::<S>::from_json(doc)?;
    let sigma = factorize(&spec.sigma, "Sigma")?;
    let upsilon = factorize(&spec.upsilon, "Upsilon")?;
    let variant = a.variant.into();
    let terms = expand_general(&spec.k, &spec.lambda, &sigma, &upsilon, variant)?;
    match a.format {
        FormatArg::Json => emit(out, &expansion_to_json(&spec.k, variant, &terms))?,
        FormatArg::Csv => write!(out, "{}", expansion_to_csv(spec.lambda.rows(), &terms))?,
    }
    Ok(0)
}

fn parse_point<S: JsonScalar>(s: &str) -> anyhow::Result<Vec<S>> {
    let parts: Vec<String> = parse_list(s).ok_or_else(|| anyhow!("--at: cannot parse `{s}`"))?;
    parts
        .iter()
        .map(|p| S::from_json(&Value::String(p.clone()), "--at").map_err(Into::into))
        .collect()
}

fn check_len(x: &[impl Sized], expected: usize) -> anyhow::Result<()> {
    if x.len() != expected {
        bail!("--at: expected {expected} coordinates, found {}", x.len());
    }
    Ok(())
}

fn eval(a: &EvalArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let spec = a.spec.as_deref().map(read_json).transpose()?;
    let rational = match &spec {
        Some(doc) => spec_is_rational(doc)?,
        None => false,
    };
    if rational {
        eval_typed::<BigRational>(a, spec.as_ref(), out)
    } else {
        eval_typed::<f64>(a, spec.as_ref(), out)
    }
}

fn eval_typed<S: JsonScalar>(a: &EvalArgs, doc: Option<&Value>, out: &mut dyn Write) -> anyhow::Result<i32> {
    let spec = doc.map(ProblemSpec::<S>::from_json).transpose()?;
    if let Some(path) = &a.expansion {
        let spec = spec.expect("clap enforces --spec with --expansion");
        let (k, terms) = expansion_from_json::<S>(&read_json(path)?)?;
        if k != spec.k {
            bail!("expansion is for k = {k} but the problem file has k = {}", spec.k);
        }
        let m = spec.lambda.rows();
        if let Some(t) = terms.iter().find(|t| t.q.arity() != m) {
            bail!("expansion term q = {} does not have arity {m}", t.q);
        }
        let sigma = factorize(&spec.sigma, "Sigma")?;
        let upsilon = HermiteFamily::General(factorize(&spec.upsilon, "Upsilon")?);
        for at in &a.at {
            let x = parse_point::<S>(at)?;
            check_len(&x, m)?;
            let y = spec.lambda.transpose().matvec(&x)?;
            let lhs = hermite_multi(&k, &y, &sigma)?;
            let (rhs, _) = evaluate_expansion(&terms, &x, &upsilon)?;
            emit(
                out,
                &json!({
                    "k": multi_index_to_json(&k),
                    "x": x.iter().map(S::to_json).collect::<Vec<_>>(),
                    "lhs": lhs.to_json(),
                    "rhs": rhs.to_json(),
                }),
            )?;
        }
        return Ok(0);
    }

    let family_name = a.family.as_deref().unwrap_or("he");
    let k = match (&a.k, &spec) {
        (Some(s), _) => {
            MultiIndex::new(parse_list(s).ok_or_else(|| anyhow!("--k: cannot parse `{s}`"))?)
                .context("--k must be nonempty")?
        }
        (None, Some(spec)) => spec.k.clone(),
        (None, None) => bail!("--k is required without --spec"),
    };
    let family: HermiteFamily<S> = match family_name {
        "he" => HermiteFamily::Probabilists,
        "h" => HermiteFamily::Physicists,
        "general" => {
            let spec = spec.as_ref().ok_or_else(|| anyhow!("--family general needs --spec"))?;
            HermiteFamily::General(factorize(&spec.sigma, "Sigma")?)
        }
        other => match other.strip_prefix("scaled:") {
            Some(v) => HermiteFamily::Scaled(S::from_json(&Value::String(v.into()), "--family")?),
            None => bail!("--family: expected he, h, scaled:<variance> or general, found `{other}`"),
        },
    };
    for at in &a.at {
        let x = parse_point::<S>(at)?;
        check_len(&x, k.arity())?;
        let value = family.eval(&k, &x)?;
        emit(
            out,
            &json!({
                "family": family_name,
                "k": multi_index_to_json(&k),
                "x": x.iter().map(S::to_json).collect::<Vec<_>>(),
                "value": value.to_json(),
            }),
        )?;
    }
    Ok(0)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let mut code = 0;
    for suite in a.suite.suites() {
        let defaults = TrialConfig::for_suite(suite);
        let cfg = TrialConfig {
            seed: a.seed,
            trials: a.trials.unwrap_or(defaults.trials),
            n_max: a.n_max.unwrap_or(defaults.n_max),
            m_max: a.m_max.unwrap_or(defaults.m_max),
            k_max: a.k_max.unwrap_or(defaults.k_max),
            tol_rel: a.tol.unwrap_or(defaults.tol_rel),
            entry_range: defaults.entry_range,
        };
        cfg.validate().map_err(|e| anyhow!("{suite}: {e}"))?;
        let report = run_suite(suite, &cfg, a.variant.into());
        if !report.passed() {
            code = 1;
        }
        emit(out, &report.to_json())?;
    }
    Ok(code)
}

fn oracle(a: &OracleArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let spec = ProblemSpec::<BigRational>::from_json(&read_json(&a.spec)?)?;
    factorize(&spec.sigma, "Sigma")?;
    factorize(&spec.upsilon, "Upsilon")?;
    let cmp = oracle_compare(&spec.k, &spec.lambda, &spec.sigma, &spec.upsilon, a.variant.into())?;
    emit(
        out,
        &json!({
            "equal": cmp.equal,
            "lhs": mpoly_to_json(&cmp.lhs),
            "rhs": mpoly_to_json(&cmp.rhs),
            "diff": mpoly_to_json(&cmp.diff),
        }),
    )?;
    Ok(if cmp.equal { 0 } else { 1 })
}
