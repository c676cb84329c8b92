//! `genlag`: batch front end to genlag-core.
//!
//! Exit status: 0 on success, 1 when a verification row fails, 2 on invalid
//! input, 3 on numerical non-convergence.

mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evalexpr::{ContextWithMutableVariables, HashMapContext, Node, Value};

use genlag_core::exact;
use genlag_core::gtransform::GTransform;
use genlag_core::jordan::{self, FamilyParams};
use genlag_core::lambda::LambdaTable;
use genlag_core::params::ParamPair;
use genlag_core::quad::QuadSpec;
use genlag_core::scalar_fn;
use genlag_core::suites::{self, CheckRow, Suite, SuiteOptions};
use genlag_core::Error;

use table::{Format, Table};

#[derive(Parser, Debug)]
#[command(
    name = "genlag",
    version,
    about = "Generalized Laguerre functions: evaluation, verification, transforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Λ_{i,j}^{μ,ν} at the given points.
    #[command(allow_negative_numbers = true)]
    Eval {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        family: u8,
        #[arg(long)]
        j: i64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long, value_delimiter = ',', required_unless_present = "dump_combo")]
        x: Vec<f64>,
        /// Print the coefficient combo instead of values.
        #[arg(long)]
        dump_combo: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Λ_{i,j} for j up to a bound on an x-grid.
    #[command(allow_negative_numbers = true)]
    Tabulate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        family: u8,
        #[arg(long)]
        jmax: i64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        nu: f64,
        /// Explicit grid; overrides the range flags.
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        x_min: f64,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Space the grid geometrically.
        #[arg(long)]
        log: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a verification suite.
    #[command(allow_negative_numbers = true)]
    Verify {
        /// Suite name, or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long, requires = "nu")]
        mu: Option<f64>,
        #[arg(long, requires = "mu")]
        nu: Option<f64>,
        #[arg(long)]
        jmax: Option<u32>,
        #[arg(long, default_value_t = SuiteOptions::default().seed)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tf(x) for an input profile.
    #[command(allow_negative_numbers = true)]
    Transform {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        nu: f64,
        /// `lambda2:J`, `k-bessel` or `expr`.
        #[arg(long)]
        input_profile: String,
        /// Expression in `y` for the `expr` profile, e.g. `y * math::exp(-y)`.
        #[arg(long)]
        expr: Option<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Exponential decay rate of the input at infinity.
        #[arg(long, default_value_t = 1.0)]
        decay: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Structure constants of the simple real Jordan algebras.
    Registry {
        /// List rows (the default action).
        #[arg(long)]
        list: bool,
        #[arg(long, value_parser = ["I", "II", "III", "IV"])]
        family: Option<String>,
        /// Size assignments `n=4`, `p=2`, `q=4`.
        #[arg(long, value_parser = parse_assignment)]
        param: Vec<(String, u32)>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Rank-2 cone checks.
    Rank2 {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, value_enum)]
        check: Rank2Check,
        #[arg(long, default_value_t = SuiteOptions::default().seed)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Rank2Check {
    Kaction,
    Casimir,
    Intertwiner,
}

fn parse_assignment(s: &str) -> Result<(String, u32), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got {s}"))?;
    if !["n", "p", "q"].contains(&k) {
        return Err(format!("unknown size key {k}"));
    }
    let v = v.parse::<u32>().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.to_string(), v))
}

enum Failure {
    Core(Error),
    Input(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Outcome of a successful run: whether every check passed.
type Outcome = Result<bool, Failure>;

fn emit(t: &Table, out: &OutputArgs) -> Result<(), Failure> {
    match &out.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            t.write(out.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            t.write(out.format, &mut lock)?;
        }
    }
    Ok(())
}

fn params(mu: f64, nu: f64) -> Result<ParamPair, Failure> {
    Ok(ParamPair::new(mu, nu)?)
}

fn check_table(rows: &[CheckRow]) -> Table {
    let mut t = Table::new(&["check_id", "params", "residual", "tol", "pass"]);
    for r in rows {
        t.push(vec![
            r.id.clone().into(),
            r.params.clone().into(),
            r.residual.into(),
            r.tol.into(),
            r.pass.into(),
        ]);
    }
    t
}

fn run_eval(
    family: u8,
    j: i64,
    mu: f64,
    nu: f64,
    xs: &[f64],
    dump: bool,
    out: &OutputArgs,
) -> Outcome {
    let p = params(mu, nu)?;
    if !p.admits_family(family) {
        return Err(Failure::Input(format!(
            "family {family} is not defined at ({mu}, {nu})"
        )));
    }
    let table = LambdaTable::build(family, &p, j.max(0))?;
    if dump {
        let mut t = Table::new(&["i", "j", "mu", "nu", "combo"]);
        t.push(vec![
            (family as i64).into(),
            j.into(),
            mu.into(),
            nu.into(),
            table.get(j)?.dump().into(),
        ]);
        emit(&t, out)?;
        return Ok(true);
    }
    let mut t = Table::new(&["i", "j", "mu", "nu", "x", "value"]);
    for &x in xs {
        if !(x > 0.0) {
            return Err(Failure::Input(format!("x must be positive, got {x}")));
        }
        t.push(vec![
            (family as i64).into(),
            j.into(),
            mu.into(),
            nu.into(),
            x.into(),
            table.eval(j, x)?.into(),
        ]);
    }
    emit(&t, out)?;
    Ok(true)
}

fn grid(xs: &[f64], lo: f64, hi: f64, n: usize, log: bool) -> Result<Vec<f64>, Failure> {
    if !xs.is_empty() {
        return Ok(xs.to_vec());
    }
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Failure::Input(format!(
            "grid needs 0 < x-min < x-max and at least two points, got [{lo}, {hi}] with {n}"
        )));
    }
    Ok((0..n)
        .map(|k| {
            let s = k as f64 / (n - 1) as f64;
            if log {
                lo * (hi / lo).powf(s)
            } else {
                lo + (hi - lo) * s
            }
        })
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn run_tabulate(
    family: u8,
    jmax: i64,
    mu: f64,
    nu: f64,
    xs: &[f64],
    lo: f64,
    hi: f64,
    n: usize,
    log: bool,
    out: &OutputArgs,
) -> Outcome {
    let p = params(mu, nu)?;
    if !p.admits_family(family) {
        return Err(Failure::Input(format!(
            "family {family} is not defined at ({mu}, {nu})"
        )));
    }
    let xs = grid(xs, lo, hi, n, log)?;
    let table = LambdaTable::build(family, &p, jmax)?;
    let mut t = Table::new(&["i", "j", "mu", "nu", "x", "value"]);
    for j in table.valuation().max(0)..=jmax {
        for &x in &xs {
            t.push(vec![
                (family as i64).into(),
                j.into(),
                mu.into(),
                nu.into(),
                x.into(),
                table.eval(j, x)?.into(),
            ]);
        }
    }
    emit(&t, out)?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    suite: &str,
    mu: Option<f64>,
    nu: Option<f64>,
    jmax: Option<u32>,
    seed: u64,
    workers: Option<usize>,
    out: &OutputArgs,
) -> Outcome {
    let list: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse::<Suite>()?]
    };
    let pair = match (mu, nu) {
        (Some(m), Some(n)) => Some(params(m, n)?),
        _ => None,
    };
    if pair.is_some() && suite != "all" && !list[0].takes_params() {
        return Err(Failure::Input(format!(
            "suite {suite} uses a fixed parameter sample; drop --mu/--nu"
        )));
    }
    let opts = SuiteOptions {
        params: pair,
        j_max: jmax,
        seed,
    };
    let workers =
        workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut rows = Vec::new();
    for (s, r) in suites::run_many(&list, &opts, workers) {
        match r {
            Ok(r) => rows.extend(r),
            Err(e) => {
                eprintln!("suite {s}: {e}");
                return Err(e.into());
            }
        }
    }
    emit(&check_table(&rows), out)?;
    Ok(rows.iter().all(|r| r.pass))
}

enum Profile {
    Lambda2(i64),
    KBessel,
    Expr(Node),
}

fn parse_profile(name: &str, expr: Option<&str>) -> Result<Profile, Failure> {
    if let Some(j) = name.strip_prefix("lambda2:") {
        let j = j
            .parse::<i64>()
            .map_err(|e| Failure::Input(format!("lambda2 index: {e}")))?;
        if j < 0 {
            return Err(Failure::Input(format!(
                "lambda2 index must be non-negative, got {j}"
            )));
        }
        return Ok(Profile::Lambda2(j));
    }
    match name {
        "k-bessel" => Ok(Profile::KBessel),
        "expr" => {
            let text =
                expr.ok_or_else(|| Failure::Input("the expr profile needs --expr".into()))?;
            let node = evalexpr::build_operator_tree(text)
                .map_err(|e| Failure::Input(format!("expression: {e}")))?;
            Ok(Profile::Expr(node))
        }
        other => Err(Failure::Input(format!("unknown input profile {other}"))),
    }
}

fn eval_expr(node: &Node, y: f64) -> f64 {
    let mut ctx = HashMapContext::new();
    if ctx.set_value("y".into(), Value::Float(y)).is_err() {
        return f64::NAN;
    }
    match node.eval_with_context(&ctx) {
        Ok(Value::Float(v)) => v,
        Ok(Value::Int(v)) => v as f64,
        _ => f64::NAN,
    }
}

#[allow(clippy::too_many_arguments)]
fn run_transform(
    mu: f64,
    nu: f64,
    profile: &str,
    expr: Option<&str>,
    xs: &[f64],
    tol: f64,
    decay: f64,
    out: &OutputArgs,
) -> Outcome {
    let p = params(mu, nu)?;
    let profile = parse_profile(profile, expr)?;
    let spec = QuadSpec {
        tol,
        tail_bound_rate: decay,
        ..QuadSpec::default()
    };
    let tr = GTransform::new(&p)?;
    let combo = match &profile {
        Profile::Lambda2(j) => Some(LambdaTable::build(2, &p, *j)?.get(*j)?),
        _ => None,
    };
    let f = |y: f64| match &profile {
        Profile::Lambda2(_) => combo
            .as_ref()
            .map_or(f64::NAN, |c| c.eval(y).unwrap_or(f64::NAN)),
        Profile::KBessel => scalar_fn::bessel_k_tilde(nu / 2.0, y).unwrap_or(f64::NAN),
        Profile::Expr(node) => eval_expr(node, y),
    };
    let mut t = Table::new(&["x", "value", "err_est"]);
    for &x in xs {
        if !(x > 0.0) {
            return Err(Failure::Input(format!("x must be positive, got {x}")));
        }
        let r = tr.apply(f, x, &spec)?;
        t.push(vec![x.into(), r.value.into(), r.err_est.into()]);
    }
    emit(&t, out)?;
    Ok(true)
}

fn rational(q: &exact::Q) -> String {
    q.to_string()
}

fn run_registry(family: Option<&str>, assignments: &[(String, u32)], out: &OutputArgs) -> Outcome {
    let mut n = 4;
    let (mut p, mut q) = (2, 4);
    for (k, v) in assignments {
        match k.as_str() {
            "n" => n = *v,
            "p" => p = *v,
            _ => q = *v,
        }
    }
    let entries = jordan::list(family, n, (p, q))?;
    let mut t = Table::new(&[
        "label",
        "algebra",
        "size",
        "n",
        "r",
        "d",
        "e",
        "n0",
        "r0",
        "d0",
        "mu",
        "nu",
        "xi_member",
        "xi_branch",
        "wallach_discrete",
        "wallach_continuous",
        "cover_k",
        "excluded_minrep",
    ]);
    for e in entries {
        let (mu, nu) = jordan::mu_nu_exact(&e);
        let xi = jordan::xi_contains(exact::to_f64(&mu), exact::to_f64(&nu));
        let (disc, cont) = match jordan::wallach_and_weights(&e) {
            Ok(w) => (
                w.discrete
                    .iter()
                    .map(rational)
                    .collect::<Vec<_>>()
                    .join(";"),
                rational(&w.continuous_threshold),
            ),
            Err(_) => (String::new(), String::new()),
        };
        let size = match e.family_params {
            Some(FamilyParams::Size(0)) | None => String::new(),
            Some(fp) => fp.to_string(),
        };
        t.push(vec![
            e.label.into(),
            e.name.clone().into(),
            size.into(),
            (e.n as i64).into(),
            (e.r as i64).into(),
            (e.d as i64).into(),
            (e.e as i64).into(),
            (e.n0 as i64).into(),
            (e.r0 as i64).into(),
            (e.d0 as i64).into(),
            rational(&mu).into(),
            rational(&nu).into(),
            xi.member.into(),
            xi.branch.label().into(),
            disc.into(),
            cont.into(),
            (jordan::cover_integer(&e) as i64).into(),
            e.excluded_minrep.into(),
        ]);
    }
    emit(&t, out)?;
    Ok(true)
}

fn run_rank2(p: usize, q: usize, check: Rank2Check, seed: u64, out: &OutputArgs) -> Outcome {
    if !(2..=6).contains(&p) || !(2..=6).contains(&q) {
        return Err(Failure::Input(format!(
            "rank-2 checks take 2 <= p, q <= 6, got ({p}, {q})"
        )));
    }
    let rows = match check {
        Rank2Check::Kaction => suites::rank2_kaction_for(p, q, seed)?,
        Rank2Check::Casimir => suites::rank2_casimir_for(p, q, seed)?,
        Rank2Check::Intertwiner => suites::rank2_intertwiner_for(p, q)?,
    };
    emit(&check_table(&rows), out)?;
    Ok(rows.iter().all(|r| r.pass))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Eval {
            family,
            j,
            mu,
            nu,
            x,
            dump_combo,
            out,
        } => run_eval(family, j, mu, nu, &x, dump_combo, &out),
        Command::Tabulate {
            family,
            jmax,
            mu,
            nu,
            x,
            x_min,
            x_max,
            points,
            log,
            out,
        } => run_tabulate(family, jmax, mu, nu, &x, x_min, x_max, points, log, &out),
        Command::Verify {
            suite,
            mu,
            nu,
            jmax,
            seed,
            workers,
            out,
        } => run_verify(&suite, mu, nu, jmax, seed, workers, &out),
        Command::Transform {
            mu,
            nu,
            input_profile,
            expr,
            x,
            tol,
            decay,
            out,
        } => run_transform(
            mu,
            nu,
            &input_profile,
            expr.as_deref(),
            &x,
            tol,
            decay,
            &out,
        ),
        Command::Registry {
            list: _,
            family,
            param,
            out,
        } => run_registry(family.as_deref(), &param, &out),
        Command::Rank2 {
            p,
            q,
            check,
            seed,
            out,
        } => run_rank2(p, q, check, seed, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
