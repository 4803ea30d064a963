use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use localbound::bounds::{self, GuaranteeParams, GuaranteeResult, Theorem};
use localbound::experiment::{self, table::format_real, ExperimentConfig, ExperimentOutput};
use localbound::matrix::{self, MatrixKind, SensingMatrix};
use localbound::solver::{self, RecoveryProblem, Tolerances};
use localbound::Error;

/// Environment variable that overrides the output directory.
const OUT_DIR_ENV: &str = "LOCALBOUND_OUT_DIR";

const EXIT_CONFIG: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser)]
#[command(name = "localbound", version, about = "Weighted l1 recovery with prior support: bounds, solver and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key (repeatable), e.g. --set k=4
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a sensing matrix (keys: matrix, m, n, seed)
    GenMatrix {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output file; stdout if omitted
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Coherence and, within the exhaustive budget, RIC/ROC of a matrix
    Analyze {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Matrix file as written by gen-matrix
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Solve one weighted l1 problem from a problem file
    Solve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Evaluate recovery guarantees at one parameter point
    Bounds(BoundsArgs),
    /// Local C0, C1 against w
    Fig1(ConfigArgs),
    /// Error multiplier e and C1*e against w
    Fig2(ConfigArgs),
    /// k-ratios against the standard and weighted sparsity conditions
    Fig3(ConfigArgs),
    /// Local versus global coefficients with T equal to the top support
    Fig4(ConfigArgs),
    /// Monte-Carlo check of the local error bound
    Verify(ConfigArgs),
    /// All figures and the verification run
    All(ConfigArgs),
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    w: f64,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// Friedlander: delta_{ak}
    #[arg(long)]
    delta_ak: Option<f64>,
    /// Friedlander: delta_{(a+1)k}
    #[arg(long)]
    delta_a1k: Option<f64>,
    /// Chen: delta_a
    #[arg(long)]
    delta_a: Option<f64>,
    /// Chen: theta_{a,b}
    #[arg(long)]
    theta_ab: Option<f64>,
    /// Ge: delta_{tk}
    #[arg(long)]
    delta_tk: Option<f64>,
    #[arg(long, default_value = "all")]
    theorem: String,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidConfig(_) | Error::InvalidInput(_) | Error::Parse(_) => EXIT_CONFIG,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn load_config(args: &ConfigArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: EXIT_CONFIG,
                message: format!("cannot read config {}: {e}", path.display()),
            })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    for o in &args.overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => cfg.out_dir(),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: 1,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn gen_matrix(cfg: &ExperimentConfig, output: Option<&Path>) -> CliResult<()> {
    let kind = cfg.matrix.clone().unwrap_or(MatrixKind::GaussianNormalized);
    let m = cfg.m.unwrap_or(64);
    let n = cfg.n.unwrap_or(128);
    let a = matrix::generate_matrix(&kind, m, n, cfg.seed_or(experiment::DEFAULT_SEED))?;
    let text = matrix::format_matrix(a.entries());
    match output {
        Some(path) => std::fs::write(path, text).map_err(Error::from)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn analyze(cfg: &ExperimentConfig, path: &Path) -> CliResult<()> {
    let a = SensingMatrix::new(matrix::parse_matrix(&read(path)?)?)?;
    let mut out = format!("rows={}\ncols={}\ncoherence={:?}\n", a.rows(), a.cols(), a.coherence()?);
    let ks: Vec<usize> = match cfg.k {
        Some(k) => vec![k],
        None => (1..=matrix::ORACLE_MAX_SPARSITY.min(a.cols() / 2)).collect(),
    };
    for k in ks {
        let r = matrix::isometry_report(&a, k)?;
        let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:?}"));
        let _ = writeln!(
            out,
            "k={k} delta_exact={} delta_coherence_bound={:?} theta_exact={}",
            show(r.delta_exact),
            r.delta_coherence_bound,
            show(r.theta_exact)
        );
    }
    print!("{out}");
    Ok(())
}

fn solve(path: &Path, max_iter: Option<usize>) -> CliResult<()> {
    let p = RecoveryProblem::parse(&read(path)?)?;
    let mut tol = Tolerances::default();
    if let Some(it) = max_iter {
        tol.max_iter = it;
    }
    let report = solver::solve_weighted_l1(&p, &tol)?;
    print!("{}", report.to_text());
    Ok(())
}

fn bounds_rows(args: &BoundsArgs) -> CliResult<Vec<GuaranteeResult>> {
    let mut p = GuaranteeParams::new(args.mu, args.k, args.rho, args.alpha, args.w);
    p.a = args.a;
    p.b = args.b;
    p.t = args.t;
    let theorems: Vec<Theorem> = if args.theorem == "all" {
        Theorem::ALL.to_vec()
    } else {
        vec![Theorem::parse(&args.theorem)?]
    };
    let mut rows = Vec::new();
    for th in theorems {
        let r = match (th, args.delta_ak, args.delta_a1k, args.delta_a, args.theta_ab, args.delta_tk) {
            (Theorem::Friedlander, Some(d1), Some(d2), ..) => bounds::friedlander_bound(&p, d1, d2)?,
            (Theorem::Chen, _, _, Some(d), Some(th), _) => bounds::chen_bound(&p, d, th)?,
            (Theorem::Ge, .., Some(d)) => bounds::ge_bound(&p, d)?,
            _ => bounds::evaluate(th, &p)?,
        };
        rows.push(r);
    }
    Ok(rows)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn print_bounds(args: &BoundsArgs) -> CliResult<()> {
    let mut out = String::from("theorem,c0,c1,k_max,valid,reason\n");
    for r in bounds_rows(args)? {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.theorem,
            format_real(r.c0),
            format_real(r.c1),
            format_real(r.k_max),
            r.valid,
            csv_field(&r.reason)
        );
    }
    print!("{out}");
    Ok(())
}

type Runner = fn(&ExperimentConfig) -> localbound::Result<ExperimentOutput>;

/// Runs experiments, writes their artifacts, prints the checks. Returns
/// whether every check passed.
fn run_experiments(cfg: &ExperimentConfig, runners: &[Runner]) -> CliResult<bool> {
    let dir = out_dir(cfg);
    let mut all_passed = true;
    for run in runners {
        let output = run(cfg)?;
        for path in output.write(&dir)? {
            println!("wrote {}", path.display());
        }
        for check in &output.checks {
            println!(
                "[{}] {}: {} ({})",
                if check.passed { "PASS" } else { "FAIL" },
                output.name,
                check.name,
                check.detail
            );
        }
        all_passed &= output.all_passed();
    }
    Ok(all_passed)
}

fn run(cli: Cli) -> CliResult<()> {
    let figures: Vec<Runner> = vec![
        experiment::run_fig1,
        experiment::run_fig2,
        experiment::run_fig3,
        experiment::run_fig4,
        experiment::run_verify_local,
    ];
    let (cfg_args, runners): (ConfigArgs, Vec<Runner>) = match cli.command {
        Command::GenMatrix { cfg, output } => return gen_matrix(&load_config(&cfg)?, output.as_deref()),
        Command::Analyze { cfg, matrix } => return analyze(&load_config(&cfg)?, &matrix),
        Command::Solve { cfg, problem, max_iter } => {
            load_config(&cfg)?;
            return solve(&problem, max_iter);
        }
        Command::Bounds(args) => {
            load_config(&args.cfg)?;
            return print_bounds(&args);
        }
        Command::Fig1(c) => (c, vec![figures[0]]),
        Command::Fig2(c) => (c, vec![figures[1]]),
        Command::Fig3(c) => (c, vec![figures[2]]),
        Command::Fig4(c) => (c, vec![figures[3]]),
        Command::Verify(c) => (c, vec![figures[4]]),
        Command::All(c) => (c, figures),
    };
    let cfg = load_config(&cfg_args)?;
    if run_experiments(&cfg, &runners)? {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_CHECK,
            message: "one or more checks failed".into(),
        })
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
