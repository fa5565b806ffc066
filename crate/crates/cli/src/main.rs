use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coposolve::copositive::{build_sip, estimate_L, slack_matrix, solve_subproblem, CoppOracleConfig};
use coposolve::cptest::{test_cp, CpTestConfig, Verdict};
use coposolve::generate::{gen_copp_instance, gen_cp_instance, gen_stqp_instance, CpKind};
use coposolve::sip::{iteration_bound, run, SipConfig};
use coposolve::stqp::{export_milp, stqp_exact, DEFAULT_EXACT_CAP};
use coposolve::tables::{reproduce_table, write_csv, TableKind, TableOptions};
use coposolve::{CoppInstance, FeasibleSet, RngStream, RunReport, StqpMethod, SymMatrix};

#[derive(Parser)]
#[command(name = "coposolve", version, about = "Copositive programming by inexact projected subgradients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random instance and write it to a file or stdout.
    GenInstance(GenArgs),
    /// Minimize δᵀQδ over the standard simplex.
    SolveStqp(StqpArgs),
    /// Run the subgradient method on a copositive program.
    SolveCopp(CoppArgs),
    /// Look for a certificate that a matrix is not completely positive.
    TestCp(CpArgs),
    /// Rerun an experiment grid and write one row per cell.
    ReproduceTable(TableArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceKind {
    /// Symmetric matrix with uniform [−1, 1] entries.
    Stqp,
    /// Five-variable copositive program with optimal value 0.
    Copp,
    /// BBᵀ with |N(0, 1)| entries.
    CpProduct,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Stqp,
    Copp,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: InstanceKind,
    #[arg(long)]
    n: usize,
    /// Columns of B for cp-product; defaults to n.
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct OracleArgs {
    #[arg(long, default_value = "exact", value_parser = parse_method)]
    method: StqpMethod,
    /// Failure probability per sampling call.
    #[arg(long, default_value_t = 0.05)]
    phi: f64,
    /// Largest fraction of the grid that grid sampling may draw.
    #[arg(long, default_value_t = 1.0)]
    fraction: f64,
    /// Cap on draws per sampling call.
    #[arg(long, default_value_t = 1_000_000)]
    m_cap: u64,
    /// Largest dimension the exact solver accepts.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: usize,
    /// Required by the sampling methods.
    #[arg(long)]
    seed: Option<u64>,
}

impl OracleArgs {
    fn config(&self, alpha: f64) -> CoppOracleConfig {
        let mut cfg = CoppOracleConfig::new(self.method, alpha).with_exact_cap(self.exact_cap);
        cfg.phi = self.phi;
        cfg.sample_fraction = self.fraction;
        cfg.m_cap = self.m_cap;
        cfg
    }

    fn rng(&self) -> Result<RngStream> {
        match (self.seed, self.method.is_sampling()) {
            (Some(seed), _) => Ok(RngStream::new(seed)),
            (None, true) => bail!("--seed is required with --method {}", self.method.name()),
            (None, false) => Ok(RngStream::new(0)),
        }
    }
}

#[derive(Args)]
struct StqpArgs {
    /// Matrix file: n on the first line, then n rows.
    input: PathBuf,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Additive accuracy for the inexact methods.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Also write the MILP formulation in LP format.
    #[arg(long)]
    export_lp: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoppArgs {
    /// Instance JSON file.
    input: PathBuf,
    #[command(flatten)]
    oracle: OracleArgs,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Starting point, comma separated; defaults to all ones.
    #[arg(long, value_delimiter = ',')]
    x1: Option<Vec<f64>>,
    /// Iteration count; may be omitted when S is a ball.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_cap: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CpArgs {
    /// Matrix file: n on the first line, then n rows.
    input: PathBuf,
    #[command(flatten)]
    oracle: OracleArgs,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Schedule constant; defaults to 55 for n ≤ 6 and 15 otherwise.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    time_cap: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    table: Table,
    /// First instance seed.
    #[arg(long)]
    seed: u64,
    /// Instances per cell.
    #[arg(long, default_value_t = 10)]
    runs: u64,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Option<Vec<StqpMethod>>,
    /// Accuracies; for the copp table these are ε(1+α).
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long)]
    m_cap: Option<u64>,
    #[arg(long)]
    exact_cap: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Run sizes beyond the exact cap, without deviation columns.
    #[arg(long)]
    allow_large: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<StqpMethod, String> {
    s.parse()
}

fn seconds(s: Option<f64>) -> Result<Option<Duration>> {
    s.map(|v| Duration::try_from_secs_f64(v).with_context(|| format!("invalid time cap {v}"))).transpose()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn load_matrix(path: &Path) -> Result<SymMatrix> {
    SymMatrix::load(path).with_context(|| format!("reading matrix {}", path.display()))
}

fn gen_instance(args: GenArgs) -> Result<()> {
    let mut rng = RngStream::new(args.seed);
    let text = match args.kind {
        InstanceKind::Stqp => gen_stqp_instance(args.n, &mut rng)?.to_text(),
        InstanceKind::CpProduct => {
            let kind = CpKind::CpProduct { rows: args.n, cols: args.cols.unwrap_or(args.n) };
            gen_cp_instance(&kind, &mut rng)?.to_text()
        }
        InstanceKind::Copp => {
            let inst = gen_copp_instance(args.n, &mut rng)?;
            let a0 = slack_matrix(&inst, &vec![0.0; inst.m()])?;
            if inst.n() <= DEFAULT_EXACT_CAP {
                let gamma = stqp_exact(&a0, DEFAULT_EXACT_CAP)?.value;
                if gamma < -1e-12 {
                    bail!("generated instance has x = 0 infeasible (min over simplex {gamma})");
                }
            } else if a0.as_slice().iter().any(|&v| v < 0.0) {
                bail!("generated instance has a negative entry in A_0");
            }
            serde_json::to_string_pretty(&inst)? + "\n"
        }
    };
    emit(args.out.as_deref(), &text)
}

fn solve_stqp(args: StqpArgs) -> Result<()> {
    let q = load_matrix(&args.input)?;
    if let Some(path) = &args.export_lp {
        export_milp(&q, path).with_context(|| format!("writing {}", path.display()))?;
    }
    let alpha = if args.oracle.method == StqpMethod::Exact { 0.0 } else { 1.0 };
    let cfg = args.oracle.config(alpha);
    let mut rng = args.oracle.rng()?;
    let res = solve_subproblem(&q, &cfg, args.epsilon, &mut rng)?;
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&res)? + "\n"))
}

fn iterations_csv(report: &RunReport) -> String {
    let mut out = String::from("k,branch,g,f,subproblem_evals,elapsed_s\n");
    for r in &report.iterations {
        let branch = serde_json::to_value(r.branch).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        out += &format!("{},{},{:e},{:e},{},{:e}\n", r.k, branch, r.g_value, r.f_value, r.subproblem_evals, r.elapsed);
    }
    out
}

fn solve_copp(args: CoppArgs) -> Result<()> {
    let inst = CoppInstance::load(&args.input).with_context(|| format!("reading instance {}", args.input.display()))?;
    let x1 = args.x1.clone().unwrap_or_else(|| vec![1.0; inst.m()]);
    if x1.len() != inst.m() {
        bail!("--x1 has {} entries but the instance has {} variables", x1.len(), inst.m());
    }
    let max_iter = match (args.max_iter, inst.feasible_set()) {
        (Some(n), _) => n,
        (None, FeasibleSet::Ball { radius, .. }) => {
            let bound = iteration_bound(estimate_L(&inst), 2.0 * radius, args.epsilon);
            usize::try_from(bound).unwrap_or(usize::MAX)
        }
        (None, _) => bail!("--max-iter is required unless the feasible set is a ball"),
    };
    let rng = args.oracle.rng()?;
    let mut sip = build_sip(&inst, args.oracle.config(args.alpha), args.epsilon, rng)?;
    let mut cfg = SipConfig::new(args.epsilon, args.alpha, max_iter);
    if let Some(cap) = seconds(args.time_cap)? {
        cfg = cfg.with_time_cap(cap);
    }
    let report = run(&mut sip, &x1, cfg)?;
    let text = match args.format {
        Format::Json => report.to_json()? + "\n",
        Format::Csv => iterations_csv(&report),
    };
    emit(args.out.as_deref(), &text)
}

fn test_cp_cmd(args: CpArgs) -> Result<ExitCode> {
    let c = load_matrix(&args.input)?;
    let mut cfg = CpTestConfig::new(args.oracle.config(args.alpha));
    cfg.t = args.t;
    cfg.max_iterations = args.max_iter;
    cfg.time_cap = seconds(args.time_cap)?;
    let verdict = test_cp(&c, &cfg, args.oracle.rng()?)?;
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&verdict)? + "\n"))?;
    Ok(match verdict.verdict {
        Verdict::NotCompletelyPositive => ExitCode::from(2),
        Verdict::Inconclusive => ExitCode::SUCCESS,
    })
}

fn reproduce(args: TableArgs) -> Result<()> {
    let kind = match args.table {
        Table::Stqp => TableKind::Stqp,
        Table::Copp => TableKind::Copp,
    };
    let mut opts = TableOptions::defaults(kind);
    opts.seeds = (args.seed..args.seed.saturating_add(args.runs)).collect();
    if let Some(v) = args.sizes {
        opts.sizes = v;
    }
    if let Some(v) = args.methods {
        opts.methods = v;
    }
    if let Some(v) = args.epsilons {
        opts.epsilons = v;
    }
    if let Some(v) = args.alpha {
        opts.alpha = v;
    }
    if let Some(v) = args.phi {
        opts.phi = v;
    }
    if let Some(v) = args.fraction {
        opts.sample_fraction = v;
    }
    if let Some(v) = args.m_cap {
        opts.m_cap = v;
    }
    if let Some(v) = args.exact_cap {
        opts.exact_cap = v;
    }
    opts.max_iterations = args.max_iter;
    opts.allow_large = args.allow_large;
    let rows = reproduce_table(kind, &opts);
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            String::from_utf8(buf)?
        }
    };
    emit(args.out.as_deref(), &text)
}

fn main() -> ExitCode {
    // Usage errors exit with 1; 2 is reserved for a certificate.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::GenInstance(a) => gen_instance(a).map(|_| ExitCode::SUCCESS),
        Command::SolveStqp(a) => solve_stqp(a).map(|_| ExitCode::SUCCESS),
        Command::SolveCopp(a) => solve_copp(a).map(|_| ExitCode::SUCCESS),
        Command::TestCp(a) => test_cp_cmd(a),
        Command::ReproduceTable(a) => reproduce(a).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
