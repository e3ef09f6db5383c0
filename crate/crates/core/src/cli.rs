use std::ops::Range;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use lpsens::forms::to_standard;
use lpsens::interval::{value_range, InflatedIntervalLp, DEFAULT_MAX_M};
use lpsens::io::json::parse_pattern;
use lpsens::io::mps::{self, EqualityHandling};
use lpsens::io::report::{ReportDocument, ReportMeta};
use lpsens::linalg::Matrix;
use lpsens::lp::{solve, LpProblem, LpSolution, Sense, DEFAULT_BASIS_CAP};
use lpsens::oracle::SweepConfig;
use lpsens::pattern::{Coefficient, PerturbationPattern};
use lpsens::scalar::{Rational, Scalar};
use lpsens::sensitivity::{analyze, AnalyzeOptions, Method};
use lpsens::{Error, Result};

/// Worst-case sensitivity of linear programs under interval perturbations.
#[derive(Parser, Debug)]
#[command(name = "lpsens", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the problem and print the optimum.
    Solve {
        #[command(flatten)]
        input: Input,
    },
    /// Best and worst optimal value of the problem inflated by `alpha`.
    Range {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = DEFAULT_MAX_M)]
        max_m: usize,
    },
    /// Compute d_w and d_r.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Comma-separated decreasing alphas for the oracle.
        #[arg(long, value_delimiter = ',')]
        alpha_grid: Option<Vec<f64>>,
        /// Attach an oracle estimate to non-exact results.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_BASIS_CAP)]
        cap: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_M)]
        max_m: usize,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Problem file: `.mps` or JSON.
    file: PathBuf,
    /// relative | absolute | entry:i,j | obj:j | rhs:i | json:<path> (1-based indices).
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long, value_enum, default_value_t = Backend::Float)]
    backend: Backend,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Multiply every nonzero datum by `1 + u`, `u` uniform in `[-P, P]`.
    #[arg(long, value_name = "P")]
    seed_perturb: Option<f64>,
    /// Seed for `--seed-perturb`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Split MPS equality rows into two inequalities instead of keeping them.
    #[arg(long)]
    paired: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Backend {
    Float,
    Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Nondeg,
    Basis,
    Tractable,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Nondeg => Method::Nondeg,
            MethodArg::Basis => Method::Basis,
            MethodArg::Tractable => Method::Tractable,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

struct Loaded<S> {
    name: String,
    problem: LpProblem<S>,
    embedded: Option<PerturbationPattern<S>>,
    fixed: Range<usize>,
    vars: usize,
    constr: usize,
}

fn load<S: Scalar>(input: &Input) -> Result<Loaded<S>> {
    let text = std::fs::read_to_string(&input.file)?;
    let stem = input
        .file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let is_mps = input
        .file
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mps"));
    let mut loaded = if is_mps {
        let doc = mps::parse(&text)?;
        let handling = if input.paired {
            EqualityHandling::Paired
        } else {
            EqualityHandling::Direct
        };
        let model = mps::to_problem::<S>(&doc, handling)?;
        Loaded {
            name: if doc.name.is_empty() { stem } else { doc.name },
            vars: model.n_vars,
            constr: model.n_constraints,
            fixed: model.fixed_columns,
            problem: model.problem,
            embedded: None,
        }
    } else {
        let file = lpsens::io::json::parse_problem::<S>(&text)?;
        Loaded {
            name: file.name.unwrap_or(stem),
            vars: file.problem.n(),
            constr: file.problem.m(),
            fixed: 0..0,
            problem: file.problem,
            embedded: file.pattern,
        }
    };
    if let Some(p) = input.seed_perturb {
        loaded.problem = perturb(&loaded.problem, p, input.seed, &loaded.fixed)?;
    }
    Ok(loaded)
}

/// Seeded relative perturbation of every nonzero entry outside `fixed` columns.
pub fn perturb<S: Scalar>(problem: &LpProblem<S>, magnitude: f64, seed: u64, fixed: &Range<usize>) -> Result<LpProblem<S>> {
    if !(magnitude.is_finite() && magnitude >= 0.0) {
        return Err(Error::InvalidPattern("perturbation magnitude must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = |v: &S| {
        if v.is_zero() || magnitude == 0.0 {
            v.clone()
        } else {
            let u: f64 = rng.random_range(-magnitude..=magnitude);
            v.clone() * S::from_f64(1.0 + u)
        }
    };
    let (m, n) = (problem.m(), problem.n());
    let mut a = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let v = &problem.a()[(i, j)];
            a[(i, j)] = if fixed.contains(&j) { v.clone() } else { jitter(v) };
        }
    }
    let b = problem.b().iter().map(&mut jitter).collect();
    let c = problem.c().iter().map(&mut jitter).collect();
    LpProblem::new(a, b, c, problem.form(), problem.sense())
}

fn one_based(s: &str, what: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k - 1),
        _ => Err(Error::InvalidPattern(format!("bad {what} index {s:?} (indices are 1-based)"))),
    }
}

fn build_pattern<S: Scalar>(spec: Option<&str>, loaded: &Loaded<S>) -> Result<(PerturbationPattern<S>, String)> {
    let p = &loaded.problem;
    let (m, n) = (p.m(), p.n());
    let fix = |pat: PerturbationPattern<S>| {
        if loaded.fixed.is_empty() {
            pat
        } else {
            pat.with_fixed_columns(loaded.fixed.clone())
        }
    };
    let spec = match (spec, &loaded.embedded) {
        (None, Some(e)) => return Ok((e.clone(), "embedded".into())),
        (None, None) => "relative",
        (Some(s), _) => s,
    };
    let pattern = match spec.split_once(':') {
        None if spec == "relative" => fix(PerturbationPattern::relative(p)),
        None if spec == "absolute" => fix(PerturbationPattern::absolute(p)),
        Some(("entry", ij)) => {
            let (i, j) = ij
                .split_once(',')
                .ok_or_else(|| Error::InvalidPattern("expected entry:i,j".into()))?;
            PerturbationPattern::single(m, n, Coefficient::MatEntry(one_based(i, "row")?, one_based(j, "column")?))?
        }
        Some(("obj", j)) => PerturbationPattern::single(m, n, Coefficient::Obj(one_based(j, "column")?))?,
        Some(("rhs", i)) => PerturbationPattern::single(m, n, Coefficient::Rhs(one_based(i, "row")?))?,
        Some(("json", path)) => parse_pattern(&std::fs::read_to_string(Path::new(path))?, m, n)?,
        _ => return Err(Error::InvalidPattern(format!("unknown pattern {spec:?}"))),
    };
    Ok((pattern, spec.to_string()))
}

fn print(format: Format, text: String, value: serde_json::Value) {
    match format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("valid json")),
    }
}

fn render<S: Scalar>(v: &S) -> serde_json::Value {
    if S::EXACT {
        json!(v.to_string())
    } else {
        json!(v.as_f64())
    }
}

fn run_solve<S: Scalar>(input: &Input) -> Result<()> {
    let loaded = load::<S>(input)?;
    let t = to_standard(&loaded.problem, &PerturbationPattern::zero(loaded.problem.m(), loaded.problem.n()))?;
    let opt = match solve(&t.problem.to_min())? {
        LpSolution::Optimal(o) => o,
        LpSolution::Infeasible => return Err(Error::Infeasible),
        LpSolution::Unbounded => return Err(Error::Unbounded),
    };
    let f = opt.min_objective(Sense::Min);
    let f = if loaded.problem.sense() == Sense::Max { -f } else { f };
    let x = t.back_map.original_x(&opt.x);
    let mut text = format!("status    optimal\nf(A,b,c)  {f}\nbasis     {}\n", opt.basis);
    if opt.primal_degenerate || opt.dual_degenerate {
        text.push_str(&format!(
            "degenerate primal={} dual={}\n",
            opt.primal_degenerate, opt.dual_degenerate
        ));
    }
    if x.len() <= 20 {
        let xs: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        text.push_str(&format!("x         ({})\n", xs.join(", ")));
    }
    let value = json!({
        "problem": loaded.name,
        "status": "optimal",
        "objective": render(&f),
        "basis": opt.basis.indices().iter().map(|j| j + 1).collect::<Vec<_>>(),
        "x": x.iter().map(render).collect::<Vec<_>>(),
        "y": opt.y.iter().map(render).collect::<Vec<_>>(),
        "primal_degenerate": opt.primal_degenerate,
        "dual_degenerate": opt.dual_degenerate,
    });
    print(input.format, text, value);
    Ok(())
}

fn run_range<S: Scalar>(input: &Input, alpha: &str, max_m: usize) -> Result<()> {
    let loaded = load::<S>(input)?;
    let alpha = S::parse_literal(alpha)
        .filter(|a| *a >= S::zero())
        .ok_or_else(|| Error::InvalidPattern(format!("bad alpha {alpha:?}")))?;
    let (pattern, descriptor) = build_pattern(input.pattern.as_deref(), &loaded)?;
    let t = to_standard(&loaded.problem, &pattern)?;
    let ilp = InflatedIntervalLp::new(&t.problem, &t.pattern, alpha)?;
    let r = value_range(&ilp, max_m)?;
    let mut text = format!("range     [{}, {}]\nsign      {}\n", r.f_low, r.f_high, r.argmax_sign);
    if loaded.problem.sense() == Sense::Max {
        text.push_str("note      values are for the minimization form\n");
    }
    if let Some(w) = &r.warning {
        text.push_str(&format!("warning   {w}\n"));
    }
    let ext = |v: &lpsens::interval::ExtValue<S>| match v.finite() {
        Some(f) => render(f),
        None => json!(v.to_string()),
    };
    let value = json!({
        "problem": loaded.name,
        "pattern": descriptor,
        "f_low": ext(&r.f_low),
        "f_high": ext(&r.f_high),
        "argmax_sign": r.argmax_sign.signs(),
        "argmax_basis": r.argmax_basis.map(|b| b.indices().iter().map(|j| j + 1).collect::<Vec<_>>()),
        "warning": r.warning.map(|w| w.to_string()),
    });
    print(input.format, text, value);
    Ok(())
}

fn run_analyze<S: Scalar>(
    input: &Input,
    method: Method,
    alpha_grid: Option<Vec<f64>>,
    oracle: bool,
    cap: usize,
    max_m: usize,
) -> Result<()> {
    let start = Instant::now();
    let loaded = load::<S>(input)?;
    let (pattern, descriptor) = build_pattern(input.pattern.as_deref(), &loaded)?;
    let sweep = match alpha_grid {
        Some(a) => SweepConfig {
            max_m,
            ..SweepConfig::with_alphas(a)?
        },
        None => SweepConfig {
            max_m,
            ..Default::default()
        },
    };
    let options = AnalyzeOptions {
        method,
        cap,
        oracle: (oracle || method == Method::Oracle).then_some(sweep),
    };
    let report = analyze(&loaded.problem, &pattern, &options)?;
    let doc = ReportDocument::new(
        &report,
        ReportMeta {
            problem: loaded.name,
            form: loaded.problem.form().to_string(),
            vars: loaded.vars,
            constr: loaded.constr,
            pattern: descriptor,
            seconds: start.elapsed().as_secs_f64(),
        },
    );
    match input.format {
        Format::Text => print!("{}", doc.to_text()),
        Format::Json => println!("{}", doc.to_json()),
    }
    Ok(())
}

fn dispatch<S: Scalar>(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Solve { input } => run_solve::<S>(input),
        Command::Range { input, alpha, max_m } => run_range::<S>(input, alpha, *max_m),
        Command::Analyze {
            input,
            method,
            alpha_grid,
            oracle,
            cap,
            max_m,
        } => run_analyze::<S>(input, (*method).into(), alpha_grid.clone(), *oracle, *cap, *max_m),
    }
}

fn backend(cli: &Cli) -> Backend {
    match &cli.command {
        Command::Solve { input } | Command::Range { input, .. } | Command::Analyze { input, .. } => input.backend,
    }
}

/// Exit code: 0 on success, 2 for infeasible or unbounded problems, 1 otherwise.
pub fn run(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = std::env::var("LPSENS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match backend(&cli) {
        Backend::Float => dispatch::<f64>(&cli),
        Backend::Rational => dispatch::<Rational>(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e @ (Error::Infeasible | Error::Unbounded)) => {
            eprintln!("lpsens: {e}");
            2
        }
        Err(e) => {
            eprintln!("lpsens: {e}");
            1
        }
    }
}
