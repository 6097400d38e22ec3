//! Batch front end for the `lqt` binary. [`run`] executes one command and
//! returns the report and exit code; the binary only parses arguments, sizes
//! the thread pool and prints.

use crate::algebra::{exp_generator, TransformMatrix};
use crate::classify::{classify_generator_with, haar_crosscheck, ClassifyOptions, Verdict};
use crate::constraints::{
    basis_residual, first_order_check, first_order_nullspace, range_check, second_order_check, subspace_decompose,
    SamplingPlan,
};
use crate::demos::{negative_probability_demo, transpose_twin_closure_check};
use crate::io::{read_document, write_document, Document, DocumentKind};
use crate::tensor::{bloch_from_hermitian, check_no_signalling, hermitian_from_bloch};
use crate::{Error, Result};
use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

pub const TOOL: &str = "lqt";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
/// `--n` disagrees with the input file, or an input has the wrong dimensions.
pub const EXIT_DIMENSION: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Hermitian operator <-> Bloch tensor.
    Convert,
    /// No-signalling check of a state (hermitian or bloch input).
    CheckNosig,
    /// First/second-order constraint suites plus classification of a generator.
    CheckGenerator,
    /// Range check of a transform, or of exp(t X) for a generator and --t.
    CheckRange,
    /// Nullspace of the first-order constraint system.
    Nullspace,
    /// Classification of a generator.
    Classify,
    /// Negative-probability certificate and transpose-twin closure.
    DemoNegativity,
    /// Monte-Carlo projectors against the exact ones.
    HaarCrosscheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Convert => "convert",
            Command::CheckNosig => "check-nosig",
            Command::CheckGenerator => "check-generator",
            Command::CheckRange => "check-range",
            Command::Nullspace => "nullspace",
            Command::Classify => "classify",
            Command::DemoNegativity => "demo-negativity",
            Command::HaarCrosscheck => "haar-crosscheck",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "lqt",
    version,
    about = "Locally quantum theories of qubits: constraints, classification and demos"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Qubit count (nullspace; checked against --input elsewhere).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random samples (trials for demo-negativity); default depends on the command.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Tolerance; default depends on the command and is echoed in the report.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads for sampling commands; reports do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Input document (JSON matrix/tensor format).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Report destination; for convert, the converted document.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print a short human-readable summary instead of the JSON report.
    #[arg(long)]
    pub summary: bool,
    /// Time for check-range with a generator input.
    #[arg(long)]
    pub t: Option<f64>,
    /// Randomized row plan for nullspace.
    #[arg(long)]
    pub randomized: bool,
}

/// Everything a command depends on. Defaults are resolved per command and
/// echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: Option<usize>,
    pub seed: u64,
    pub samples: Option<u64>,
    pub tolerance: Option<f64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub t: Option<f64>,
    pub randomized: bool,
    pub summary: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            n: None,
            seed: 0,
            samples: None,
            tolerance: None,
            input: None,
            output: None,
            t: None,
            randomized: false,
            summary: false,
        }
    }
}

impl From<&Args> for RunConfig {
    fn from(a: &Args) -> Self {
        RunConfig {
            command: a.command,
            n: a.n,
            seed: a.seed,
            samples: a.samples,
            tolerance: a.tol,
            input: a.input.clone(),
            output: a.output.clone(),
            t: a.t,
            randomized: a.randomized,
            summary: a.summary,
        }
    }
}

/// Result of one command: exit code, text for stdout and stderr.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Value>,
}

struct Outcome {
    result: Value,
    verified: bool,
    summary: String,
    /// Resolved parameters echoed under `config`.
    params: Value,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::DimensionMismatch { .. } => EXIT_DIMENSION,
        _ => EXIT_IO,
    }
}

fn require_input(cfg: &RunConfig) -> Result<Document> {
    let path = cfg
        .input
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument(format!("{} needs --input", cfg.command.name())))?;
    let doc = read_document(path)?;
    if let Some(n) = cfg.n {
        if n != doc.n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: doc.n,
            });
        }
    }
    Ok(doc)
}

fn positive(tol: f64) -> Result<f64> {
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn convert(cfg: &RunConfig) -> Result<Outcome> {
    let doc = require_input(cfg)?;
    let (converted, error) = match doc.kind {
        DocumentKind::Hermitian => {
            let op = doc.to_hermitian()?;
            let r = bloch_from_hermitian(&op);
            let back = hermitian_from_bloch(&r);
            let err = (back.matrix() - op.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            (Document::from_bloch(&r), err)
        }
        DocumentKind::Bloch => {
            let r = doc.to_bloch()?;
            let op = hermitian_from_bloch(&r);
            let back = bloch_from_hermitian(&op);
            let err = (back.coeffs() - r.coeffs()).amax();
            (Document::from_hermitian(&op), err)
        }
        other => {
            return Err(Error::Parse(format!(
                "convert takes hermitian or bloch input, found {other:?}"
            )))
        }
    };
    let tol = positive(cfg.tolerance.unwrap_or(1e-12))?;
    if let Some(path) = &cfg.output {
        write_document(path, &converted)?;
    }
    let verified = error <= tol;
    Ok(Outcome {
        summary: format!(
            "converted {:?} -> {:?}, round-trip error {error:e}",
            doc.kind, converted.kind
        ),
        result: json!({
            "from": doc.kind,
            "to": converted.kind,
            "round_trip_error": error,
            "document": converted,
        }),
        verified,
        params: json!({ "n": doc.n, "tolerance": tol }),
    })
}

fn check_nosig(cfg: &RunConfig) -> Result<Outcome> {
    let doc = require_input(cfg)?;
    let r = match doc.kind {
        DocumentKind::Hermitian => bloch_from_hermitian(&doc.to_hermitian()?),
        DocumentKind::Bloch => doc.to_bloch()?,
        other => {
            return Err(Error::Parse(format!(
                "check-nosig takes hermitian or bloch input, found {other:?}"
            )))
        }
    };
    let tol = positive(cfg.tolerance.unwrap_or(1e-12))?;
    let report = check_no_signalling(&r, tol);
    Ok(Outcome {
        summary: format!(
            "no-signalling: max deviation {:e} (tol {tol:e}) -> {}",
            report.max_deviation,
            pass(report.passed)
        ),
        verified: report.passed,
        result: to_value(&report)?,
        params: json!({ "n": doc.n, "tolerance": tol }),
    })
}

fn classify_options(cfg: &RunConfig) -> Result<ClassifyOptions> {
    Ok(ClassifyOptions {
        tol: positive(cfg.tolerance.unwrap_or(1e-9))?,
        seed: cfg.seed,
        samples: cfg.samples.unwrap_or(1000),
    })
}

fn classify(cfg: &RunConfig) -> Result<Outcome> {
    let x = require_input(cfg)?.to_generator()?;
    let opts = classify_options(cfg)?;
    let r = classify_generator_with(&x, &opts)?;
    Ok(Outcome {
        summary: classification_summary(r.verdict, r.pair, &r.violations),
        verified: r.verdict != Verdict::Inadmissible,
        result: to_value(&r)?,
        params: json!({ "n": x.n(), "seed": opts.seed, "samples": opts.samples, "tolerance": opts.tol }),
    })
}

fn classification_summary(verdict: Verdict, pair: Option<[usize; 2]>, violations: &[String]) -> String {
    let mut s = format!("verdict: {}", verdict.as_str());
    if let Some([p, q]) = pair {
        s.push_str(&format!(" on qubits ({p}, {q})"));
    }
    if !violations.is_empty() {
        s.push_str(&format!("; violated: {}", violations.join(", ")));
    }
    s
}

fn check_generator(cfg: &RunConfig) -> Result<Outcome> {
    let x = require_input(cfg)?.to_generator()?;
    let samples = cfg.samples.unwrap_or(10_000);
    let tol = positive(cfg.tolerance.unwrap_or(1e-9))?;
    let scale = x.frobenius_norm().max(1.0);
    let first = first_order_check(&x, samples, cfg.seed, tol * scale);
    let second = second_order_check(&x, samples, cfg.seed, tol * scale * scale);
    let subspace_residual = subspace_decompose(&x).residual();
    let opts = ClassifyOptions {
        tol,
        seed: cfg.seed,
        samples: samples.min(1000),
    };
    let class = if x.n() <= crate::classify::MAX_CLASSIFY_QUBITS {
        Some(classify_generator_with(&x, &opts)?)
    } else {
        None
    };
    let in_subspace = subspace_residual <= tol * scale;
    let verified = first.passed
        && second.passed
        && in_subspace
        && class.as_ref().is_none_or(|c| c.verdict != Verdict::Inadmissible);
    let verdict = class.as_ref().map(|c| c.verdict);
    let summary = format!(
        "first order: max {:e} -> {}; second order: max {:e} -> {}; subspace residual {:e}; {}",
        first.max_violation,
        pass(first.passed),
        second.max_violation,
        pass(second.passed),
        subspace_residual,
        match &class {
            Some(c) => classification_summary(c.verdict, c.pair, &c.violations),
            None => "classification skipped (n too large)".into(),
        }
    );
    Ok(Outcome {
        summary,
        verified,
        result: json!({
            "first_order": first,
            "second_order": second,
            "subspace_residual": subspace_residual,
            "verdict": verdict,
            "classification": class,
        }),
        params: json!({ "n": x.n(), "seed": cfg.seed, "samples": samples, "tolerance": tol }),
    })
}

fn check_range(cfg: &RunConfig) -> Result<Outcome> {
    let doc = require_input(cfg)?;
    let h: TransformMatrix = match doc.kind {
        DocumentKind::Transform => doc.to_transform()?,
        DocumentKind::Generator => {
            let t = cfg
                .t
                .ok_or_else(|| Error::InvalidArgument("generator input needs --t".into()))?;
            exp_generator(&doc.to_generator()?, t)
        }
        other => {
            return Err(Error::Parse(format!(
                "check-range takes transform or generator input, found {other:?}"
            )))
        }
    };
    let samples = cfg.samples.unwrap_or(10_000);
    let tol = positive(cfg.tolerance.unwrap_or(1e-9))?;
    let report = range_check(&h, samples, cfg.seed, tol);
    Ok(Outcome {
        summary: format!(
            "range: values in [{}, {}], max violation {:e} -> {}",
            report.min_value,
            report.max_value,
            report.max_violation,
            pass(report.passed)
        ),
        verified: report.passed,
        result: to_value(&report)?,
        params: json!({ "n": h.n(), "seed": cfg.seed, "samples": samples, "tolerance": tol, "t": cfg.t }),
    })
}

fn nullspace(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.n.unwrap_or(2);
    let plan = if cfg.randomized {
        SamplingPlan::Randomized {
            rows_per_qubit: None,
            seed: cfg.seed,
        }
    } else {
        SamplingPlan::Paper
    };
    let samples = cfg.samples.unwrap_or(1000);
    let tol = positive(cfg.tolerance.unwrap_or(1e-10))?;
    let result = first_order_nullspace(n, plan)?;
    let (residual, witness) = basis_residual(&result, samples, cfg.seed);
    let verified = result.dimension == result.expected_dimension && !result.ambiguous && residual <= tol;
    let mut value = to_value(&result)?;
    value["fresh_sample_residual"] = json!(residual);
    value["residual_witness"] = json!(witness);
    Ok(Outcome {
        summary: format!(
            "nullspace n={n}: dimension {} (expected {}), gap {:e}, residual {residual:e} -> {}",
            result.dimension,
            result.expected_dimension,
            result.spectral_gap,
            pass(verified)
        ),
        verified,
        result: value,
        params: json!({ "n": n, "seed": cfg.seed, "samples": samples, "tolerance": tol, "randomized": cfg.randomized }),
    })
}

fn demo_negativity(cfg: &RunConfig) -> Result<Outcome> {
    let cert = negative_probability_demo()?;
    let trials = cfg.samples.unwrap_or(100);
    let twin = transpose_twin_closure_check(trials, cfg.seed)?;
    let verified = cert.valid && twin.passed;
    Ok(Outcome {
        summary: format!(
            "min eigenvalue {}, P(+1,+1|σ3,σ3) = {}, outcome sum {}; twin closure defect {:e} -> {}",
            cert.state.min_eigenvalue,
            cert.probability_00,
            cert.computational_sum,
            twin.max_orthogonality_defect.max(twin.max_determinant_defect),
            pass(verified)
        ),
        verified,
        result: json!({ "certificate": cert, "twin_closure": twin }),
        params: json!({ "seed": cfg.seed, "samples": trials, "tolerance": twin.tolerance }),
    })
}

fn haar(cfg: &RunConfig) -> Result<Outcome> {
    let samples = cfg.samples.unwrap_or(10_000);
    let report = haar_crosscheck(20, samples, cfg.seed);
    Ok(Outcome {
        summary: format!(
            "haar cross-check: {} matrices, max distance/SE {:.3} (limit {}) -> {}",
            report.matrices,
            report.max_ratio,
            report.sigma_limit,
            pass(report.passed)
        ),
        verified: report.passed,
        result: to_value(&report)?,
        params: json!({
            "seed": cfg.seed,
            "samples": samples,
            "matrices": 20,
            "tolerance": report.sigma_limit,
            "tolerance_unit": "standard errors",
        }),
    })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Convert => convert(cfg),
        Command::CheckNosig => check_nosig(cfg),
        Command::CheckGenerator => check_generator(cfg),
        Command::CheckRange => check_range(cfg),
        Command::Nullspace => nullspace(cfg),
        Command::Classify => classify(cfg),
        Command::DemoNegativity => demo_negativity(cfg),
        Command::HaarCrosscheck => haar(cfg),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

/// Runs one command. The JSON report goes to `--output` (for `convert`, the
/// converted document does) and to stdout unless `--summary` is set.
pub fn run(cfg: &RunConfig) -> RunOutput {
    let outcome = match dispatch(cfg) {
        Ok(o) => o,
        Err(e) => {
            return RunOutput {
                code: exit_code_for(&e),
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
                report: None,
            }
        }
    };
    let mut config = json!({
        "command": cfg.command.name(),
        "input": cfg.input,
        "output": cfg.output,
    });
    if let (Value::Object(c), Value::Object(p)) = (&mut config, outcome.params) {
        c.extend(p);
    }
    let report = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": cfg.command.name(),
        "config": config,
        "verified": outcome.verified,
        "result": outcome.result,
    });
    let text = match serde_json::to_string_pretty(&report) {
        Ok(t) => t + "\n",
        Err(e) => {
            return RunOutput {
                code: EXIT_IO,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
                report: None,
            }
        }
    };
    if cfg.command != Command::Convert {
        if let Some(path) = &cfg.output {
            if let Err(e) = write_text(path, &text) {
                return RunOutput {
                    code: EXIT_IO,
                    stdout: String::new(),
                    stderr: format!("error: {e}\n"),
                    report: None,
                };
            }
        }
    }
    let code = if outcome.verified { EXIT_OK } else { EXIT_VIOLATION };
    let stdout = if cfg.summary { outcome.summary + "\n" } else { text };
    RunOutput {
        code,
        stdout,
        stderr: String::new(),
        report: Some(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quantum_generator;

    fn parse(args: &[&str]) -> std::result::Result<Args, clap::Error> {
        Args::try_parse_from(std::iter::once("lqt").chain(args.iter().copied()))
    }

    #[test]
    fn parses_commands_and_flags() {
        let a = parse(&["nullspace", "--n", "2", "--seed", "5", "--threads", "2"]).unwrap();
        assert_eq!(a.command, Command::Nullspace);
        assert_eq!((a.n, a.seed, a.threads), (Some(2), 5, Some(2)));
        assert!(parse(&["frobnicate"]).is_err());
        assert!(parse(&["classify", "--tol", "abc"]).is_err());
    }

    #[test]
    fn nullspace_two_qubits() {
        let mut cfg = RunConfig::new(Command::Nullspace);
        cfg.n = Some(2);
        let out = run(&cfg);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        let report = out.report.unwrap();
        assert_eq!(report["result"]["dimension"], 49);
        assert_eq!(report["config"]["seed"], 0);
        assert_eq!(report["config"]["tolerance"], 1e-10);
        assert_eq!(report["version"], VERSION);
    }

    #[test]
    fn demo_report() {
        let out = run(&RunConfig::new(Command::DemoNegativity));
        assert_eq!(out.code, EXIT_OK);
        let r = out.report.unwrap();
        let cert = &r["result"]["certificate"];
        assert!((cert["min_eigenvalue"].as_f64().unwrap() + 0.5).abs() < 1e-10);
        assert!((cert["probability_00"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    }

    #[test]
    fn check_generator_on_the_quantum_generator() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("xq.json");
        write_document(&path, &Document::from_generator(&quantum_generator(&[1, 1]).unwrap())).unwrap();
        let mut cfg = RunConfig::new(Command::CheckGenerator);
        cfg.input = Some(path);
        cfg.n = Some(2);
        cfg.seed = 7;
        let out = run(&cfg);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        assert_eq!(out.report.unwrap()["result"]["verdict"], "quantum_entangler_plus");
    }

    #[test]
    fn error_codes() {
        let mut cfg = RunConfig::new(Command::Classify);
        assert_eq!(run(&cfg).code, EXIT_USAGE);
        cfg.input = Some(PathBuf::from("/nonexistent/x.json"));
        assert_eq!(run(&cfg).code, EXIT_IO);
        let mut cfg = RunConfig::new(Command::Nullspace);
        cfg.n = Some(7);
        assert_eq!(run(&cfg).code, EXIT_USAGE);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        write_document(&path, &Document::from_generator(&quantum_generator(&[1, 1]).unwrap())).unwrap();
        let mut cfg = RunConfig::new(Command::Classify);
        cfg.input = Some(path.clone());
        cfg.n = Some(3);
        assert_eq!(run(&cfg).code, EXIT_DIMENSION);
        std::fs::write(&path, "{\"kind\":").unwrap();
        cfg.n = None;
        assert_eq!(run(&cfg).code, EXIT_IO);
    }
}
