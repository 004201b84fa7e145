mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use sdd1_core::classify::{classify, find_s_sdd1_witness, is_b1, is_sdd, is_sdd1};
use sdd1_core::det_bounds::{huang_bracket_reordered, new_bracket_reordered};
use sdd1_core::generate::{generate_b1, generate_sdd, generate_sdd1};
use sdd1_core::io::{format_matrix_market, parse_matrix_market};
use sdd1_core::lcp::{lcp_b1_bound, run_experiment, write_records};
use sdd1_core::norm_bounds::{s_sdd1_schur_bound, sdd1_epsilon_bound, sdd1_schur_bound, sdd_pairwise_bound};
use sdd1_core::oracle::{determinant, inverse_inf_norm};
use sdd1_core::schur::schur_complement;
use sdd1_core::{BoundCertificate, DenseMatrix, Error, IndexSet};

use report::{ExperimentSummary, Report, SchurSummary};

#[derive(Parser)]
#[command(name = "sdd1", version, about = "Dominance classes, Schur complements and certified bounds for dense matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Matrix Market file (array or coordinate, real, general).
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Class membership, partition and dominance degrees.
    Classify(Common),
    /// Schur complement with certified dominance bounds.
    Schur {
        #[command(flatten)]
        common: Common,
        /// Comma-separated 1-based indices.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<usize>,
    },
    /// Upper bounds on the infinity norm of the inverse.
    NormBound {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = NormFormula::All)]
        formula: NormFormula,
        /// Fixed epsilon for the epsilon bound; searched when absent.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Comma-separated 1-based witness set for the S-SDD1 bound.
        #[arg(long, value_delimiter = ',')]
        s_set: Option<Vec<usize>>,
    },
    /// Determinant brackets in D1 ordering.
    DetBound {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = DetFormula::All)]
        formula: DetFormula,
    },
    /// LCP error bound for a B1 matrix, optionally checked by sampling.
    LcpBound {
        #[command(flatten)]
        common: Common,
        /// Number of sampled diagonal matrices D (0 skips the experiment).
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-sample records in line format.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Every applicable certificate, checked against the oracles.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Run every bound family (the default).
        #[arg(long)]
        all: bool,
        /// Allowed negative slack.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Samples for the LCP check when the input is B1.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a seeded random matrix in Matrix Market format.
    Generate {
        #[arg(long, value_enum, default_value_t = Kind::Sdd1)]
        kind: Kind,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        n1_fraction: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormFormula {
    SddPairwise,
    Sdd1Epsilon,
    Sdd1Schur,
    SSdd1Schur,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetFormula {
    Huang,
    New,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Sdd,
    Sdd1,
    B1,
}

/// Failure reading input or writing output.
struct IoFailure(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for IoFailure {
    fn from(e: E) -> Self {
        IoFailure(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(IoFailure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(common: &Common, command: &str) -> Result<(Report, DenseMatrix), IoFailure> {
    let bytes = fs::read(&common.input).with_context(|| format!("reading {}", common.input.display()))?;
    let text = String::from_utf8(bytes.clone()).context("input is not UTF-8")?;
    let a = parse_matrix_market(&text).with_context(|| format!("parsing {}", common.input.display()))?;
    let mut report = Report::new(command);
    report.input = Some(common.input.display().to_string());
    report.input_digest = Some(hex::encode(Sha256::digest(&bytes)));
    report.order = Some(a.order());
    let start = std::time::Instant::now();
    report.classification = Some(classify(&a));
    report.timing.insert("classify".into(), start.elapsed().as_secs_f64());
    Ok((report, a))
}

fn emit(report: &Report, output: Option<&Path>) -> Result<ExitCode, IoFailure> {
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    write_out(output, json.as_bytes())?;
    Ok(if report.errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn write_out(output: Option<&Path>, bytes: &[u8]) -> Result<(), IoFailure> {
    match output {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn index_set(labels: &[usize], n: usize) -> Result<IndexSet, Error> {
    IndexSet::from_one_based(labels, n)
}

fn run(command: Command) -> Result<ExitCode, IoFailure> {
    match command {
        Command::Classify(common) => {
            let (report, _) = load(&common, "classify")?;
            emit(&report, common.output.as_deref())
        }
        Command::Schur { common, alpha } => {
            let (mut report, a) = load(&common, "schur")?;
            let result = report.run("schur", || {
                let alpha = index_set(&alpha, a.order())?;
                schur_complement(&a, &alpha)
            });
            if let Some(result) = result {
                report.schur_summaries.push(SchurSummary {
                    exact_dominance: result.certified.as_ref().map(|c| result.exact_dominance(c.regime)),
                    complement_is_sdd: is_sdd(&result.complement),
                    complement_is_sdd1: is_sdd1(&result.complement),
                    result,
                });
            }
            emit(&report, common.output.as_deref())
        }
        Command::NormBound {
            common,
            formula,
            epsilon,
            s_set,
        } => {
            let (mut report, a) = load(&common, "norm-bound")?;
            let exact = inverse_inf_norm(&a).ok();
            for c in norm_certificates(&mut report, &a, formula, epsilon, s_set.as_deref(), false) {
                push_with_exact(&mut report, c, exact);
            }
            emit(&report, common.output.as_deref())
        }
        Command::DetBound { common, formula } => {
            let (mut report, a) = load(&common, "det-bound")?;
            det_certificates(&mut report, &a, formula, false);
            emit(&report, common.output.as_deref())
        }
        Command::LcpBound {
            common,
            samples,
            seed,
            records,
        } => {
            let (mut report, a) = load(&common, "lcp-bound")?;
            lcp_certificate(&mut report, &a, samples, seed, records.as_deref(), false)?;
            emit(&report, common.output.as_deref())
        }
        Command::Verify {
            common,
            all: _,
            tolerance,
            samples,
            seed,
        } => {
            let (mut report, a) = load(&common, "verify")?;
            let exact = report.run("inverse-norm", || inverse_inf_norm(&a));
            for c in norm_certificates(&mut report, &a, NormFormula::All, None, None, true) {
                push_with_exact(&mut report, c, exact);
            }
            det_certificates(&mut report, &a, DetFormula::All, true);
            if is_b1(&a) {
                lcp_certificate(&mut report, &a, samples.max(1), seed, None, true)?;
            }
            let mut ok = true;
            for c in &report.certificates {
                if !c.is_sound(tolerance) {
                    ok = false;
                }
            }
            for b in &report.brackets {
                if !b.contains(determinant(&a), tolerance) {
                    ok = false;
                }
            }
            if !ok {
                report.errors.push(report::ReportError {
                    operation: "verify".into(),
                    kind: "violation",
                    message: format!("a certificate misses its oracle value by more than {tolerance}"),
                });
            }
            report.verified = Some(ok);
            emit(&report, common.output.as_deref())
        }
        Command::Generate {
            kind,
            order,
            seed,
            n1_fraction,
            output,
        } => {
            let generated = match kind {
                Kind::Sdd => generate_sdd(order, seed),
                Kind::Sdd1 => generate_sdd1(order, seed, n1_fraction),
                Kind::B1 => generate_b1(order, seed, n1_fraction),
            };
            match generated {
                Ok(a) => {
                    write_out(output.as_deref(), format_matrix_market(&a).as_bytes())?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    let mut report = Report::new("generate");
                    report.error("generate", &e);
                    emit(&report, None)
                }
            }
        }
    }
}

fn push_with_exact(report: &mut Report, mut c: BoundCertificate, exact: Option<f64>) {
    if let Some(exact) = exact {
        c.attach_exact(exact);
    }
    report.certificates.push(c);
}

/// Records an inapplicable formula as skipped in `lenient` mode and as an
/// error otherwise.
fn attempt<T>(
    report: &mut Report,
    operation: &str,
    lenient: bool,
    f: impl FnOnce() -> Result<T, Error>,
) -> Option<T> {
    if !lenient {
        return report.run(operation, f);
    }
    let start = std::time::Instant::now();
    let out = f();
    report.timing.insert(operation.to_string(), start.elapsed().as_secs_f64());
    match out {
        Ok(v) => Some(v),
        Err(e) => {
            report.skip(operation, &e);
            None
        }
    }
}

fn norm_certificates(
    report: &mut Report,
    a: &DenseMatrix,
    formula: NormFormula,
    epsilon: Option<f64>,
    s_set: Option<&[usize]>,
    lenient: bool,
) -> Vec<BoundCertificate> {
    let all = formula == NormFormula::All;
    // Under `all`, only formulas whose class hypothesis holds are attempted.
    let sdd = is_sdd(a);
    let mut out = Vec::new();
    if formula == NormFormula::SddPairwise || (all && sdd) {
        out.extend(attempt(report, "sdd-pairwise", lenient, || sdd_pairwise_bound(a)));
    }
    if formula == NormFormula::Sdd1Epsilon || (all && !sdd) {
        out.extend(attempt(report, "sdd1-epsilon", lenient, || sdd1_epsilon_bound(a, epsilon)));
    }
    if formula == NormFormula::Sdd1Schur || (all && !sdd) {
        out.extend(attempt(report, "sdd1-schur", lenient, || sdd1_schur_bound(a)));
    }
    if formula == NormFormula::SSdd1Schur || (all && !sdd) {
        out.extend(attempt(report, "s-sdd1-schur", lenient, || {
            let s = match s_set {
                Some(labels) => index_set(labels, a.order())?,
                None => find_s_sdd1_witness(a)?
                    .ok_or_else(|| Error::InvalidWitness("no S makes A S-SDD1".into()))?,
            };
            s_sdd1_schur_bound(a, &s)
        }));
    }
    out
}

fn det_certificates(report: &mut Report, a: &DenseMatrix, formula: DetFormula, lenient: bool) {
    let det = determinant(a).abs();
    let mut run = |name: &str, f: fn(&DenseMatrix) -> Result<sdd1_core::DetBracket, Error>| {
        if let Some(b) = attempt(report, name, lenient, || f(a)) {
            report.certificates.push(b.to_certificate().with_exact(det));
            report.brackets.push(b);
        }
    };
    if matches!(formula, DetFormula::Huang | DetFormula::All) {
        run("det-huang", huang_bracket_reordered);
    }
    if matches!(formula, DetFormula::New | DetFormula::All) {
        run("det-new", new_bracket_reordered);
    }
}

fn lcp_certificate(
    report: &mut Report,
    a: &DenseMatrix,
    samples: usize,
    seed: u64,
    records: Option<&Path>,
    lenient: bool,
) -> Result<(), IoFailure> {
    let Some(mut c) = attempt(report, "lcp-b1", lenient, || lcp_b1_bound(a)) else {
        return Ok(());
    };
    if samples > 0 {
        if let Some(exp) = report.run("lcp-experiment", || run_experiment(a, samples, seed)) {
            let max_corner = exp.corners.as_ref().map_or(f64::NEG_INFINITY, |p| p.max_norm);
            c.attach_exact(exp.max_norm().max(max_corner));
            if let Some(path) = records {
                let mut buf = Vec::new();
                write_records(&exp, &mut buf)?;
                fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
            }
            report.experiment = Some(ExperimentSummary {
                generator: exp.generator.clone(),
                seed: exp.seed,
                samples: exp.sample_count,
                violations: exp.violations,
                failures: exp.failures,
                max_norm: exp.max_norm(),
                corners: exp.corners.clone(),
            });
            if exp.violations > 0 {
                report.errors.push(report::ReportError {
                    operation: "lcp-experiment".into(),
                    kind: "violation",
                    message: format!("{} sampled norms exceed the bound", exp.violations),
                });
            }
        }
    }
    report.certificates.push(c);
    Ok(())
}
