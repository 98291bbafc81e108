//! Command definitions and their execution.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use sassenfeld_core::equivalence::gdd_certificate;
use sassenfeld_core::hmatrix::HOptions;
use sassenfeld_core::sassenfeld::{
    condition_bound_from_index, default_start_vector, iterative_index_estimate, IndexClass,
    IterationOptions, IterationStatus, SassenfeldReport, CONTRACTION_MARGIN, START_VECTOR_SLACK,
};
use sassenfeld_core::splitting::{solve, SolveMode, SolveOptions, SolveStatus};
use sassenfeld_core::{
    certify_h, fdm_matrix, ComplexMatrix, Error as CoreError, HCertificate, HVerdict,
    Preconditioner, PreconditionerKind,
};

use crate::input::{real_parts, MatrixSource, PrecondSpec, StartVector, VectorSource};
use crate::mmio;
use crate::report::{
    AnalysisReport, CertificateReport, HReport, IndexReport, Outcome, PreconditionerInfo,
    SolveReport, Tolerances, ToolInfo, SCHEMA_VERSION,
};

/// Exit status for a certified or converged result.
pub const EXIT_CERTIFIED: i32 = 0;
/// Exit status for a negative verdict.
pub const EXIT_NEGATIVE: i32 = 1;
/// Exit status for an inconclusive or marginal result.
pub const EXIT_INCONCLUSIVE: i32 = 2;
/// Exit status for usage, input and internal errors.
pub const EXIT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sassenfeld",
    version,
    about = "H-matrix certificates and Sassenfeld index analysis"
)]
pub struct Cli {
    /// Write the analysis report as JSON to this path (`-` for standard output).
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Suppress the human-readable summary.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a matrix is an H-matrix and print the witness.
    CheckH {
        /// Matrix Market file, `-` for standard input, or `fdm:<m>`.
        matrix: MatrixSource,
        /// Write the witness vector to this Matrix Market file.
        #[arg(long, value_name = "PATH")]
        witness: Option<PathBuf>,
    },
    /// Compute the Sassenfeld vector and index.
    Index(IndexArgs),
    /// Build a generalized diagonal dominance certificate.
    Certify {
        #[command(flatten)]
        index: IndexArgs,
        /// Write the scaling vector `t` to this Matrix Market file.
        #[arg(long, value_name = "PATH")]
        witness: Option<PathBuf>,
    },
    /// Run the splitting iteration `P x_(n+1) = (P - A) x_n + b`.
    Solve(SolveArgs),
    /// Write a generated matrix in Matrix Market format.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Matrix Market file, `-` for standard input, or `fdm:<m>`.
    pub matrix: MatrixSource,
    /// `jacobi`, `gauss-seidel` or `file:<matrix>`.
    #[arg(long, default_value = "gauss-seidel")]
    pub precond: PrecondSpec,
    /// Use the monotone iteration instead of a direct solve.
    #[arg(long)]
    pub iterative: bool,
    /// Start vector for `--iterative`: `auto`, `ones` or a vector file.
    #[arg(long, default_value = "auto")]
    pub s0: StartVector,
    /// Stop when the iterate changes by at most this much.
    #[arg(long, default_value = "1e-15")]
    pub tol: f64,
    /// Iteration budget for `--iterative` (default `100 m`).
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Matrix Market file, `-` for standard input, or `fdm:<m>`.
    pub matrix: MatrixSource,
    /// Right-hand side: a vector file or `ones`.
    pub rhs: VectorSource,
    /// `jacobi`, `gauss-seidel` or `file:<matrix>`.
    #[arg(long, default_value = "gauss-seidel")]
    pub precond: PrecondSpec,
    /// Initial guess: a vector file, `zeros` or `ones`.
    #[arg(long, default_value = "zeros")]
    pub x0: VectorSource,
    /// Run even when the index is not below 1; no error bound is reported.
    #[arg(long)]
    pub best_effort: bool,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Absolute residual tolerance (default: relative to `||A|| ||x|| + ||b||`).
    #[arg(long)]
    pub residual_tol: Option<f64>,
    /// Write the final iterate to this Matrix Market file.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// The tridiagonal `(-1, 2, -1)` matrix of order `m`.
    Fdm {
        m: usize,
        /// Output path; prints the path afterwards. Writes to standard output when absent.
        #[arg(long, short, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

/// Runs a parsed command. Human output goes to `out`; the returned value is
/// the process exit status.
pub fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let json_to_stdout = cli.json.as_deref() == Some(Path::new("-"));
    let mut sink = Sink {
        out,
        quiet: cli.quiet || json_to_stdout,
    };
    let report = match &cli.command {
        Command::Gen(GenCommand::Fdm { m, output }) => {
            generate_fdm(*m, output.as_deref(), &mut sink)?;
            return Ok(EXIT_CERTIFIED);
        }
        Command::CheckH { matrix, witness } => check_h(matrix, witness.as_deref(), &mut sink)?,
        Command::Index(args) => index(args, "index", &mut sink)?.0,
        Command::Certify {
            index: args,
            witness,
        } => certify(args, witness.as_deref(), &mut sink)?,
        Command::Solve(args) => run_solve(args, &mut sink)?,
    };
    if let Some(path) = &cli.json {
        let text = report.to_json();
        if json_to_stdout {
            writeln!(sink.out, "{text}")?;
        } else {
            std::fs::write(path, text + "\n")
                .with_context(|| format!("writing report '{}'", path.display()))?;
        }
    }
    Ok(report.outcome.exit_code)
}

struct Sink<'a> {
    out: &'a mut dyn Write,
    quiet: bool,
}

impl Sink<'_> {
    fn line(&mut self, text: impl AsRef<str>) -> anyhow::Result<()> {
        if !self.quiet {
            writeln!(self.out, "{}", text.as_ref())?;
        }
        Ok(())
    }
}

/// Plain decimals for moderate magnitudes, scientific notation otherwise.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn generate_fdm(m: usize, output: Option<&Path>, sink: &mut Sink) -> anyhow::Result<()> {
    let a = fdm_matrix(m)?;
    match output {
        Some(path) => {
            mmio::write_to_path(path, |w| mmio::write_matrix(w, &a))
                .with_context(|| format!("writing '{}'", path.display()))?;
            writeln!(sink.out, "{}", path.display())?;
        }
        None => mmio::write_matrix(sink.out, &a)?,
    }
    Ok(())
}

fn base_report(command: &str, source: &MatrixSource, order: usize) -> AnalysisReport {
    let h = HOptions::default();
    AnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::default(),
        command: command.to_string(),
        input: source.descriptor(order),
        preconditioner: None,
        tolerances: Tolerances {
            h_positivity: h.positivity_tol,
            spectral_tol: h.spectral.tol,
            spectral_band: h.spectral.band,
            contraction_margin: CONTRACTION_MARGIN,
            start_vector_slack: START_VECTOR_SLACK,
            iteration_tol: None,
            max_iter: None,
            residual_tol: None,
        },
        h_matrix: None,
        h_preconditioner: None,
        sassenfeld: None,
        certificate: None,
        condition_bound: None,
        solve: None,
        outcome: outcome(EXIT_ERROR, ""),
    }
}

fn outcome(code: i32, message: impl Into<String>) -> Outcome {
    let verdict = match code {
        EXIT_CERTIFIED => "certified",
        EXIT_NEGATIVE => "negative",
        EXIT_INCONCLUSIVE => "inconclusive",
        _ => "error",
    };
    Outcome {
        verdict: verdict.to_string(),
        exit_code: code,
        message: message.into(),
    }
}

fn verdict_code(v: HVerdict) -> i32 {
    match v {
        HVerdict::IsH => EXIT_CERTIFIED,
        HVerdict::NotH => EXIT_NEGATIVE,
        HVerdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn describe_h(label: &str, cert: &HCertificate, sink: &mut Sink) -> anyhow::Result<()> {
    sink.line(format!("{label}: {}", cert.verdict.as_str()))?;
    if let Some(reason) = &cert.reason {
        sink.line(format!("reason: {reason}"))?;
    }
    if let Some(rho) = &cert.jacobi_radius {
        sink.line(format!(
            "jacobi spectral radius: {} in [{}, {}]",
            num(rho.value),
            num(rho.lower),
            num(rho.upper)
        ))?;
    }
    Ok(())
}

fn check_h(
    source: &MatrixSource,
    witness: Option<&Path>,
    sink: &mut Sink,
) -> anyhow::Result<AnalysisReport> {
    let a = source.load()?;
    let cert = certify_h(&a);
    let code = verdict_code(cert.verdict);
    sink.line(format!("matrix: {source} (order {})", a.order()))?;
    describe_h("verdict", &cert, sink)?;
    if let Some(u) = cert.witness() {
        match witness {
            Some(path) => mmio::write_to_path(path, |w| mmio::write_real_vector(w, u))
                .with_context(|| format!("writing witness '{}'", path.display()))?,
            None if !sink.quiet => mmio::write_real_vector(sink.out, u)?,
            None => {}
        }
    }
    let mut report = base_report("check-h", source, a.order());
    let message = cert
        .reason
        .clone()
        .unwrap_or_else(|| format!("matrix is {}", cert.verdict.as_str()));
    report.h_matrix = Some(HReport::from(&cert));
    report.outcome = outcome(code, message);
    Ok(report)
}

/// The preconditioner matrix and its certificate, or the negative outcome
/// when it is not an H-matrix.
struct Resolved {
    kind: PreconditionerKind,
    precond: Option<Preconditioner>,
    matrix: ComplexMatrix,
    certificate: HCertificate,
    info: PreconditionerInfo,
}

fn resolve_preconditioner(a: &ComplexMatrix, spec: &PrecondSpec) -> anyhow::Result<Resolved> {
    let (kind, matrix, source) = match spec {
        PrecondSpec::Kind(PreconditionerKind::Jacobi) => {
            (PreconditionerKind::Jacobi, a.split().diag, None)
        }
        PrecondSpec::Kind(PreconditionerKind::GaussSeidel) => (
            PreconditionerKind::GaussSeidel,
            a.lower_with_diagonal(),
            None,
        ),
        PrecondSpec::Kind(PreconditionerKind::Custom) => {
            (PreconditionerKind::Custom, a.clone(), None)
        }
        PrecondSpec::Custom(src) => {
            let p = src.load().context("loading preconditioner")?;
            if p.order() != a.order() {
                bail!(
                    "preconditioner has order {} but the matrix has order {}",
                    p.order(),
                    a.order()
                );
            }
            let desc = src.descriptor(p.order());
            (PreconditionerKind::Custom, p, Some(desc))
        }
    };
    let certificate = certify_h(&matrix);
    let precond = if certificate.is_h() {
        let p = match kind {
            PreconditionerKind::Custom => Preconditioner::custom(matrix.clone())?,
            k => Preconditioner::new(a, k)?,
        };
        Some(p)
    } else {
        None
    };
    let info = PreconditionerInfo {
        kind: kind.as_str().to_string(),
        source,
        strategy: precond
            .as_ref()
            .map_or("none", |p| p.strategy())
            .to_string(),
    };
    Ok(Resolved {
        kind,
        precond,
        matrix,
        certificate,
        info,
    })
}

/// Matrix, resolved preconditioner and index of a certified run.
type IndexData = (ComplexMatrix, Resolved, SassenfeldReport);

/// Shared by `index` and `certify`. Returns the report, plus the index data
/// when the preconditioner was certified.
fn index(
    args: &IndexArgs,
    command: &str,
    sink: &mut Sink,
) -> anyhow::Result<(AnalysisReport, Option<IndexData>)> {
    let a = args.matrix.load()?;
    let mut report = base_report(command, &args.matrix, a.order());
    let resolved = resolve_preconditioner(&a, &args.precond)?;
    let cert_a = certify_h(&a);
    report.h_matrix = Some(HReport::from(&cert_a));
    report.h_preconditioner = Some(HReport::from(&resolved.certificate));
    report.preconditioner = Some(resolved.info.clone());

    sink.line(format!("matrix: {} (order {})", args.matrix, a.order()))?;
    sink.line(format!(
        "preconditioner: {} ({})",
        resolved.info.kind, resolved.info.strategy
    ))?;
    describe_h("matrix H-verdict", &cert_a, sink)?;

    if !resolved.certificate.is_h() {
        describe_h("preconditioner H-verdict", &resolved.certificate, sink)?;
        let code = match resolved.certificate.verdict {
            HVerdict::Inconclusive => EXIT_INCONCLUSIVE,
            _ => EXIT_NEGATIVE,
        };
        report.outcome = outcome(code, "preconditioner is not a certified H-matrix");
        return Ok((report, None));
    }

    let p = &resolved.matrix;
    let cert_p = &resolved.certificate;
    let (mut sr, start) = if args.iterative {
        let s0 = match &args.s0 {
            StartVector::Auto => default_start_vector(&a, p, cert_p)?.to_vec(),
            StartVector::Ones => vec![1.0; a.order()],
            StartVector::File(path) => {
                let v = mmio::read_vector(path)
                    .with_context(|| format!("reading start vector '{}'", path.display()))?;
                real_parts(&v, "start vector")?
            }
        };
        if s0.len() != a.order() {
            bail!(
                "start vector has length {} but the matrix has order {}",
                s0.len(),
                a.order()
            );
        }
        let opts = IterationOptions {
            tol: args.tol,
            max_iter: args.max_iter,
        };
        report.tolerances.iteration_tol = Some(opts.tol);
        report.tolerances.max_iter = Some(opts.max_iter.unwrap_or(100 * a.order()));
        let sr = iterative_index_estimate(&a, p, cert_p, &s0, &opts).map_err(|e| match e {
            CoreError::InvalidStartVector { .. } => anyhow::anyhow!(
                "{e}; the start vector must satisfy |A - P| e <= M(P) s0 (try --s0 auto)"
            ),
            e => e.into(),
        })?;
        (sr, Some(args.s0.to_string()))
    } else {
        (sassenfeld_core::sassenfeld_vector(&a, p, cert_p)?, None)
    };
    sr.preconditioner = resolved.kind;

    let class = sr.class();
    sink.line(format!("mu: {} ({})", num(sr.mu), class.as_str()))?;
    if args.iterative {
        sink.line(format!(
            "iterations: {} ({}), settled at {}",
            sr.iterations,
            match sr.status {
                IterationStatus::Converged => "converged",
                IterationStatus::MaxIterations => "max-iterations",
            },
            sr.index_settled_at
                .map_or_else(|| "-".to_string(), |k| k.to_string())
        ))?;
    }
    report.condition_bound = condition_bound_from_index(sr.mu).ok();
    if let Some(bound) = report.condition_bound {
        sink.line(format!("condition bound: {}", num(bound)))?;
    }
    report.sassenfeld = Some(IndexReport::new(&sr, start));

    let unfinished = args.iterative && sr.status == IterationStatus::MaxIterations;
    report.outcome = match class {
        _ if unfinished => outcome(
            EXIT_INCONCLUSIVE,
            "iteration budget exhausted; mu is an upper bound only",
        ),
        IndexClass::Contractive => outcome(EXIT_CERTIFIED, "index below 1"),
        IndexClass::Marginal => outcome(EXIT_INCONCLUSIVE, "index equals 1 within tolerance"),
        IndexClass::NonContractive => outcome(EXIT_NEGATIVE, "index exceeds 1"),
    };
    Ok((report, Some((a, resolved, sr))))
}

fn certify(
    args: &IndexArgs,
    witness: Option<&Path>,
    sink: &mut Sink,
) -> anyhow::Result<AnalysisReport> {
    let (mut report, data) = index(args, "certify", sink)?;
    let Some((a, resolved, sr)) = data else {
        return Ok(report);
    };
    if report.outcome.exit_code != EXIT_CERTIFIED {
        return Ok(report);
    }
    match gdd_certificate(&a, &resolved.matrix, &sr, &resolved.certificate) {
        Ok(c) => {
            sink.line(format!("alpha: {}", num(c.alpha)))?;
            sink.line(format!("min margin: {}", num(c.min_margin())))?;
            if let Some(path) = witness {
                mmio::write_to_path(path, |w| mmio::write_real_vector(w, &c.witness))
                    .with_context(|| format!("writing certificate '{}'", path.display()))?;
            } else if !sink.quiet {
                mmio::write_real_vector(sink.out, &c.witness)?;
            }
            report.outcome = if c.degenerate {
                outcome(
                    EXIT_INCONCLUSIVE,
                    "some row margin is positive only within round-off",
                )
            } else {
                outcome(
                    EXIT_CERTIFIED,
                    "strictly diagonally dominant under the scaling t",
                )
            };
            report.certificate = Some(CertificateReport::from(&c));
        }
        Err(e @ CoreError::CertificateDegenerate { .. }) => {
            report.outcome = outcome(EXIT_INCONCLUSIVE, e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    sink.line(format!("certificate: {}", report.outcome.verdict))?;
    Ok(report)
}

fn run_solve(args: &SolveArgs, sink: &mut Sink) -> anyhow::Result<AnalysisReport> {
    let a = args.matrix.load()?;
    let m = a.order();
    let b = args.rhs.load(m).context("loading right-hand side")?;
    let x0 = args.x0.load(m).context("loading initial guess")?;
    let mut report = base_report("solve", &args.matrix, m);
    report.tolerances.max_iter = Some(args.max_iter);
    report.tolerances.residual_tol = args.residual_tol;
    let resolved = resolve_preconditioner(&a, &args.precond)?;
    report.h_preconditioner = Some(HReport::from(&resolved.certificate));
    report.preconditioner = Some(resolved.info.clone());
    sink.line(format!("matrix: {} (order {m})", args.matrix))?;
    sink.line(format!(
        "preconditioner: {} ({})",
        resolved.info.kind, resolved.info.strategy
    ))?;

    let Some(precond) = &resolved.precond else {
        describe_h("preconditioner H-verdict", &resolved.certificate, sink)?;
        report.outcome = outcome(EXIT_NEGATIVE, "preconditioner is not a certified H-matrix");
        return Ok(report);
    };
    let sr = precond.sassenfeld(&a)?;
    report.sassenfeld = Some(IndexReport::new(&sr, None));
    report.condition_bound = condition_bound_from_index(sr.mu).ok();

    let mode = if args.best_effort {
        SolveMode::BestEffort
    } else {
        SolveMode::Certified
    };
    let opts = SolveOptions {
        max_iter: args.max_iter,
        residual_tol: args.residual_tol,
        mode,
    };
    let trace = match solve(&a, &b, precond, &x0, &opts, None) {
        Ok(t) => t,
        Err(CoreError::NotContractive { mu }) => {
            sink.line(format!(
                "mu: {} is not below 1; rerun with --best-effort",
                num(mu)
            ))?;
            report.outcome = outcome(EXIT_NEGATIVE, format!("index {mu} is not below 1"));
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    let mode_name = if args.best_effort {
        "best-effort"
    } else {
        "certified"
    };
    sink.line(format!("mu: {}", num(trace.mu)))?;
    sink.line(format!(
        "iterations: {}, final residual: {}",
        trace.iterations,
        num(trace.residuals.last().copied().unwrap_or(f64::NAN))
    ))?;
    if let Some(bound) = trace.bounds.as_ref().and_then(|b| b.last()) {
        sink.line(format!("a priori error bound: {}", num(*bound)))?;
    }
    if let Some(path) = &args.output {
        mmio::write_to_path(path, |w| mmio::write_complex_vector(w, &trace.x))
            .with_context(|| format!("writing solution '{}'", path.display()))?;
    }
    report.outcome = match trace.status {
        SolveStatus::Converged => outcome(EXIT_CERTIFIED, "residual tolerance reached"),
        SolveStatus::MaxIterations => outcome(EXIT_INCONCLUSIVE, "iteration budget exhausted"),
    };
    report.solve = Some(SolveReport::new(&trace, mode_name));
    Ok(report)
}
