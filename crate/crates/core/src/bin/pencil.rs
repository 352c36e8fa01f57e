use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pencil_core::io::{
    parse_pencil_str, parse_quadruple_str, structure_report, to_json, MatrixData, PencilFile, QuadrupleFile,
};
use pencil_core::linalg::{c, fro_norm, rank};
use pencil_core::mcmillan::{degree_sum_check, rational_structure, MinimalityPolicy};
use pencil_core::minreal::{is_strongly_irreducible, is_strongly_minimal, strongly_minimal_reduce, ReductionOrder};
use pencil_core::pencil::{system_pencil, transfer_eval, SystemQuadruple};
use pencil_core::scaling::{
    apply_scaling, default_max_iter, post_normalize, quantize_pow2, scale_approach1, scale_approach2, ScalingResult,
    DEFAULT_SCALING_TOL,
};
use pencil_core::Error;

#[derive(Parser)]
#[command(name = "pencil", version, about = "Strongly minimal reduction, scaling and McMillan structure of system pencils")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Quadruple file (JSON, schema 1).
    input: PathBuf,
    /// Relative rank tolerance.
    #[arg(long, env = "PENCIL_TOL", default_value_t = 1e-12)]
    tol: f64,
    /// Seed for sample points and randomized choices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Co,
    Oc,
}

#[derive(Subcommand)]
enum Command {
    /// Pole, zero and minimal-index structure of the transfer function.
    Structure {
        #[command(flatten)]
        common: Common,
        /// Take the input as strongly minimal.
        #[arg(long)]
        no_reduce: bool,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Strongly minimal reduction; writes the reduced quadruple with W_left, W_right.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Order::Co)]
        order: Order,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Diagonal scaling of the system pencil.
    Scale {
        /// Quadruple or pencil file (JSON, schema 1).
        input: PathBuf,
        /// 1: alternating balancing under determinant constraints; 2: bordered Sinkhorn-Knopp.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        approach: u8,
        /// Border weight (approach 2); larger values keep the scalings closer to the identity.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// det Dℓ² (approach 1).
        #[arg(long, default_value_t = 1.0)]
        c_left: f64,
        /// det Dr² (approach 1).
        #[arg(long, default_value_t = 1.0)]
        c_right: f64,
        /// det Dℓ²·det Dr² (approach 2).
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Round the scalings to powers of two.
        #[arg(long)]
        pow2: bool,
        /// Rescale so the largest row or column norm of the scaled pencil is 1.
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = DEFAULT_SCALING_TOL)]
        tol: f64,
        /// Defaults to 10·(m+n)·⌈−log10 tol⌉ for approach 1 and 10000 for approach 2.
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Runs the invariant checks; exit 0 iff all pass.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Sample points for the transfer-function check.
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StructuralInconsistency(_) | Error::InconsistentDeflation(_) => 2,
            Error::DivergingScalings => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn read_input(path: &Path) -> Result<(Vec<u8>, SystemQuadruple), Failure> {
    let bytes = std::fs::read(path).map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| fail(1, format!("{}: not UTF-8", path.display())))?;
    let q = parse_quadruple_str(text).map_err(|e| fail(1, format!("{}: {e}", path.display())))?;
    Ok((bytes, q))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| fail(1, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_structure(
    common: &Common,
    no_reduce: bool,
    report_path: Option<&Path>,
    format: Format,
    timing: bool,
) -> Result<(), Failure> {
    let (bytes, q) = read_input(&common.input)?;
    let start = Instant::now();
    let mut report = structure_report(&q, &bytes, common.tol, common.seed, !no_reduce)?;
    if timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    match format {
        Format::Json => emit(report_path, &to_json(&report))?,
        Format::Text => {
            if let Some(p) = report_path {
                emit(Some(p), &to_json(&report))?;
            }
            print!("{}", report.to_text());
        }
    }
    if !report.degree_sum.holds {
        let d = &report.degree_sum;
        return Err(fail(
            2,
            format!(
                "degree-sum identity violated: polar degree {} != zero degree {} + minimal indices {}",
                d.polar, d.zero, d.minimal_indices
            ),
        ));
    }
    Ok(())
}

fn cmd_reduce(common: &Common, order: Order, output: Option<&Path>) -> Result<(), Failure> {
    let (_, q) = read_input(&common.input)?;
    let order = match order {
        Order::Co => ReductionOrder::ControllableFirst,
        Order::Oc => ReductionOrder::ObservableFirst,
    };
    let red = strongly_minimal_reduce(&q, common.tol, common.seed, order)?;
    if !is_strongly_minimal(&red.system, common.tol, common.seed)?.strongly_minimal() {
        return Err(fail(2, "reduced quadruple is not strongly minimal"));
    }
    let mut file = QuadrupleFile::from_quadruple(&red.system);
    file.w_left = Some(MatrixData::from_matrix(&red.w_left));
    file.w_right = Some(MatrixData::from_matrix(&red.w_right));
    emit(output, &to_json(&file))?;
    eprintln!("order {} -> {} ({} deflated in {} steps)", q.order(), red.system.order(), red.total_deflated(), red.records.len());
    Ok(())
}

#[derive(Serialize)]
struct ScaleOutput {
    pencil: PencilFile,
    scaling: ScalingResult,
}

fn norm_range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, 0.0), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

#[allow(clippy::too_many_arguments)]
fn cmd_scale(
    input: &Path,
    approach: u8,
    alpha: f64,
    c_left: f64,
    c_right: f64,
    c_total: f64,
    pow2: bool,
    normalize: bool,
    tol: f64,
    max_iter: Option<usize>,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let text = std::fs::read_to_string(input).map_err(|e| fail(1, format!("{}: {e}", input.display())))?;
    let s = parse_pencil_str(&text).map_err(|e| fail(1, format!("{}: {e}", input.display())))?;
    let (m, n) = s.shape();
    let result = if approach == 1 {
        let it = max_iter.unwrap_or_else(|| default_max_iter(m, n, tol));
        scale_approach1(&s.l0, &s.l1, c_left, c_right, tol, it).map_err(|e| match e {
            Error::DivergingScalings => fail(3, format!("{e} (the sparsity pattern of M may lack total support)")),
            other => other.into(),
        })?
    } else {
        scale_approach2(&s.l0, &s.l1, alpha, c_total, tol, max_iter.unwrap_or(10_000))?
    };
    if !result.converged {
        eprintln!("warning: not converged after {} iterations (residual {:.3e})", result.iterations, result.residual);
    }
    let mut result = result;
    if normalize {
        result = post_normalize(&result);
    }
    if pow2 {
        result = quantize_pow2(&result);
    }
    let scaled = apply_scaling(&s, &result)?;
    let row = |i: usize| (scaled.l0.row(i).norm_squared() + scaled.l1.row(i).norm_squared()).sqrt();
    let col = |j: usize| (scaled.l0.column(j).norm_squared() + scaled.l1.column(j).norm_squared()).sqrt();
    let (rlo, rhi) = norm_range((0..m).map(row));
    let (clo, chi) = norm_range((0..n).map(col));
    eprintln!(
        "approach {approach}: {} iterations, residual {:.3e}, γ_left {:.6e}, γ_right {:.6e}",
        result.iterations, result.residual, result.gamma_left, result.gamma_right
    );
    eprintln!("row norms [{rlo:.4e}, {rhi:.4e}], column norms [{clo:.4e}, {chi:.4e}]");
    emit(output, &to_json(&ScaleOutput { pencil: PencilFile::from_pencil(&scaled), scaling: result }))
}

fn cmd_verify(common: &Common, samples: usize) -> Result<(), Failure> {
    let (_, q) = read_input(&common.input)?;
    let (tol, seed) = (common.tol, common.seed);
    q.check_regular(tol, seed)?;
    let mut checks: Vec<(&str, bool, String)> = Vec::new();

    let red = strongly_minimal_reduce(&q, tol, seed, ReductionOrder::ControllableFirst)?;
    let minimal = is_strongly_minimal(&red.system, tol, seed)?.strongly_minimal();
    checks.push((
        "reduction",
        minimal,
        format!("order {} -> {}, output strongly minimal: {minimal}", q.order(), red.system.order()),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < samples {
        let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (Ok(r), Ok(rm)) = (transfer_eval(&q, z, tol), transfer_eval(&red.system, z, tol)) else {
            continue;
        };
        let err = fro_norm(&(rm - &red.w_left * &r * &red.w_right)) / fro_norm(&r).max(f64::MIN_POSITIVE);
        worst = worst.max(err);
        used += 1;
    }
    checks.push(("transfer", worst <= 1e-8, format!("max relative error {worst:.2e} at {samples} points")));

    let irreducible = !minimal || is_strongly_irreducible(&red.system, tol, seed)?;
    checks.push(("irreducible", irreducible, format!("strongly minimal output strongly irreducible: {irreducible}")));

    let structure = rational_structure(&red.system, tol, seed, MinimalityPolicy::Assume)?;
    let holds = degree_sum_check(&structure);
    checks.push((
        "degree-sum",
        holds,
        format!(
            "polar {} = zero {} + minimal indices {}",
            structure.polar_degree(),
            structure.zero_degree(),
            structure.minimal_index_sum()
        ),
    ));

    let s = system_pencil(&red.system);
    let rk = if s.l1.is_empty() { 0 } else { rank(&s.l1, tol * s.norm().max(1.0)) };
    let delta = structure.polar_degree();
    checks.push(("rank-l1", rk == delta, format!("rank L1 {rk}, McMillan degree {delta}")));

    let mut ok = true;
    for (name, pass, detail) in &checks {
        ok &= pass;
        println!("{} {name}: {detail}", if *pass { "PASS" } else { "FAIL" });
    }
    if ok {
        Ok(())
    } else {
        Err(fail(2, "some checks failed"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Structure { common, no_reduce, report, format, timing } => {
            cmd_structure(common, *no_reduce, report.as_deref(), *format, *timing)
        }
        Command::Reduce { common, order, output } => cmd_reduce(common, *order, output.as_deref()),
        Command::Scale { input, approach, alpha, c_left, c_right, c, pow2, normalize, tol, max_iter, output } => {
            cmd_scale(input, *approach, *alpha, *c_left, *c_right, *c, *pow2, *normalize, *tol, *max_iter, output.as_deref())
        }
        Command::Verify { common, samples } => cmd_verify(common, *samples),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
