//! The `bai` command-line tool.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when the
//! property suite reports a failure.

mod format;

use std::io::Write;
use std::path::{Path, PathBuf};

use bai::bounds::{compute_bounds, BoundReport, BoundValue};
use bai::dist::Distribution;
use bai::info::{chernoff_d, linf, pair_rate, Side};
use bai::problem::{BanditProblem, ProblemSpec};
use bai::sim::{flip_prob_experiment, run_experiment, ExperimentConfig, FlipReport, ProblemSource, SimReport};
use bai::strategy::StrategyKind;
use bai::verify::{verify, VerifyReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use format::{opt7, sig7, Table};

#[derive(Debug, Parser)]
#[command(name = "bai", version, about = "Fixed-budget best-arm identification toolkit")]
struct Cli {
    #[command(flatten)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Args)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Progress messages on stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Means, gaps, L_inf values and pairwise rates against the best arm.
    Quantities {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Every applicable upper and lower bound.
    Bounds {
        #[arg(long)]
        problem: PathBuf,
        /// Budgets; the largest is used for the budget-dependent bound.
        #[arg(long, value_delimiter = ',')]
        budgets: Vec<u64>,
    },
    /// Monte Carlo misidentification rates and bound verdicts.
    Simulate(SimulateArgs),
    /// Flip probability of two sample means against the pairwise rate.
    Flip {
        #[arg(long)]
        problem: PathBuf,
        /// Zero-based indices of the worse and better arm (default: the
        /// second-best and the best arm).
        #[arg(long, value_delimiter = ',', num_args = 1)]
        pair: Option<Vec<usize>>,
        /// Sample sizes N.
        #[arg(long, value_delimiter = ',', required = true)]
        budgets: Vec<u64>,
        #[arg(long, default_value_t = 10_000)]
        replications: u64,
        #[arg(long, env = "BAI_SEED", default_value_t = 0)]
        seed: u64,
        /// Worker threads.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Runs the seeded property suite of all modules.
    Verify {
        #[arg(long, env = "BAI_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Experiment configuration; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<u64>>,
    #[arg(long)]
    replications: Option<u64>,
    #[arg(long, env = "BAI_SEED")]
    seed: Option<u64>,
    /// Skip bound evaluation.
    #[arg(long)]
    no_bounds: bool,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
}

enum Failure {
    Usage(String),
    Properties(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(format!("error: {e}"))
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, &cli.output, stdout, stderr) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            1
        }
        Err(Failure::Properties(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            2
        }
    }
}

fn load(path: &Path) -> Result<BanditProblem, Failure> {
    Ok(ProblemSpec::from_path(path)?.build()?)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn emit(output: &Output, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(command: Command, output: &Output, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Quantities { problem } => {
            let p = load(&problem)?;
            let q = quantities(&p)?;
            let text = match output.format {
                Format::Json => json(&q),
                Format::Table => quantities_table(&q).render(),
                Format::Csv => quantities_table(&q).to_csv(),
            };
            emit(output, &text, stdout)
        }
        Command::Bounds {
            problem,
            budgets,
        } => {
            let p = load(&problem)?;
            let report = compute_bounds(&p, budgets.iter().copied().max());
            let text = match output.format {
                Format::Json => json(&report),
                Format::Table => bounds_table(&report).render() + &skipped_lines(&report),
                Format::Csv => bounds_table(&report).to_csv(),
            };
            emit(output, &text, stdout)
        }
        Command::Simulate(args) => simulate(args, output, stdout, stderr),
        Command::Flip {
            problem,
            pair,
            budgets,
            replications,
            seed,
            workers,
        } => {
            let p = load(&problem)?;
            let (w, b) = match pair.as_deref() {
                None => (p.ranked(2), p.best_arm()),
                Some([w, b]) if *w < p.k() && *b < p.k() => (*w, *b),
                Some(other) => {
                    return Err(Failure::Usage(format!(
                        "error: --pair needs two arm indices below {}, got {other:?}",
                        p.k()
                    )))
                }
            };
            if output.verbose > 0 {
                let _ = writeln!(stderr, "flip: arms {w} vs {b}, {replications} replications");
            }
            let run = || flip_prob_experiment(p.arm(w), p.arm(b), &budgets, replications, seed);
            let report = with_workers(workers, run)??;
            let text = match output.format {
                Format::Json => json(&report),
                Format::Table => flip_table(&report).render() + &flip_summary(&report),
                Format::Csv => flip_table(&report).to_csv(),
            };
            emit(output, &text, stdout)
        }
        Command::Verify { seed } => {
            let report = verify(seed);
            let text = match output.format {
                Format::Json => json(&report),
                Format::Table => verify_lines(&report),
                Format::Csv => verify_table(&report).to_csv(),
            };
            emit(output, &text, stdout)?;
            if report.all_passed() {
                Ok(())
            } else {
                let failed = report.properties.iter().filter(|p| !p.passed).count();
                Err(Failure::Properties(format!("{failed} propert(ies) failed")))
            }
        }
    }
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Failure::Usage("error: --workers must be at least 1".into())),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(f)),
    }
}

fn simulate(args: SimulateArgs, output: &Output, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(path) => Some(ExperimentConfig::from_path(path)?),
        None => None,
    };
    let cfg = match cfg.take() {
        Some(mut c) => {
            if let Some(p) = &args.problem {
                c.problem = ProblemSource::Path(p.clone());
            }
            if let Some(s) = &args.strategy {
                c.strategy = s.parse()?;
            }
            if let Some(b) = &args.budgets {
                c.budgets = b.clone();
            }
            if let Some(r) = args.replications {
                c.replications = r;
            }
            if let Some(s) = args.seed {
                c.seed = s;
            }
            if args.no_bounds {
                c.bounds = false;
            }
            c
        }
        None => {
            let missing = |flag: &str| Failure::Usage(format!("error: simulate needs --config or {flag}"));
            ExperimentConfig {
                problem: ProblemSource::Path(args.problem.clone().ok_or_else(|| missing("--problem"))?),
                strategy: args
                    .strategy
                    .as_deref()
                    .map_or(Ok(StrategyKind::SuccessiveRejects), str::parse)?,
                budgets: args.budgets.clone().ok_or_else(|| missing("--budgets"))?,
                replications: args.replications.unwrap_or(10_000),
                seed: args.seed.unwrap_or(0),
                bounds: !args.no_bounds,
            }
        }
    };
    cfg.validate()?;
    if output.verbose > 0 {
        let _ = writeln!(
            stderr,
            "simulate: {} on {} budgets, {} replications, seed {}",
            cfg.strategy.name(),
            cfg.budgets.len(),
            cfg.replications,
            cfg.seed
        );
    }
    let report = run_experiment(&cfg, args.workers)?;
    let text = match output.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            String::from_utf8(buf)?
        }
        Format::Table => sim_text(&report),
    };
    emit(output, &text, stdout)
}

/// Per-arm quantities against the best arm.
#[derive(Debug, Serialize)]
pub struct ArmQuantities {
    pub arm: usize,
    pub rank: usize,
    pub mean: f64,
    pub gap: f64,
    /// `L_inf^≤(μ_a, ν*)`.
    #[serde(with = "bai::rate_json")]
    pub linf_weak_below_best: f64,
    /// `L_inf^<(μ_a, ν*)`.
    #[serde(with = "bai::rate_json")]
    pub linf_strict_below_best: f64,
    /// `L_inf^≥(μ*, ν_a)`.
    #[serde(with = "bai::rate_json")]
    pub linf_weak_above: f64,
    /// `Φ(ν_a, ν*)`, absent for arms tied with the best.
    #[serde(with = "bai::rate_json::opt")]
    pub pair_rate: Option<f64>,
    pub pair_rate_x: Option<f64>,
    /// Chernoff information against the best arm (exponential families).
    #[serde(with = "bai::rate_json::opt")]
    pub chernoff_d: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct QuantitiesReport {
    pub problem_digest: String,
    pub model: String,
    pub generic: bool,
    pub best_arm: usize,
    pub arms: Vec<ArmQuantities>,
}

fn quantities(p: &BanditProblem) -> bai::Result<QuantitiesReport> {
    let best = p.best_arm();
    let star: &Distribution = p.arm(best);
    let mu_star = p.best_mean();
    let mut rank = vec![0; p.k()];
    for (i, &a) in p.order().iter().enumerate() {
        rank[a] = i + 1;
    }
    let arms = (0..p.k())
        .map(|a| {
            let d = p.arm(a);
            let mu = p.means()[a];
            let (pr, prx, cd) = if mu < mu_star {
                let r = pair_rate(d, star)?;
                let cd = match d {
                    Distribution::Exp(_) => Some(chernoff_d(d, star)?.value),
                    Distribution::Finite(_) => None,
                };
                (Some(r.value), r.attained_at, cd)
            } else {
                (None, None, None)
            };
            Ok(ArmQuantities {
                arm: a,
                rank: rank[a],
                mean: mu,
                gap: p.gaps()[a],
                linf_weak_below_best: linf(star, mu, Side::Below, false).value,
                linf_strict_below_best: linf(star, mu, Side::Below, true).value,
                linf_weak_above: linf(d, mu_star, Side::Above, false).value,
                pair_rate: pr,
                pair_rate_x: prx,
                chernoff_d: cd,
            })
        })
        .collect::<bai::Result<Vec<_>>>()?;
    Ok(QuantitiesReport {
        problem_digest: p.digest(),
        model: p.model_name().to_string(),
        generic: p.is_generic(),
        best_arm: best,
        arms,
    })
}

fn quantities_table(q: &QuantitiesReport) -> Table {
    let mut t = Table::new([
        "arm",
        "rank",
        "mean",
        "gap",
        "Linf<=(mu_a,best)",
        "Linf<(mu_a,best)",
        "Linf>=(mu*,arm)",
        "pair_rate",
        "at_x",
        "chernoff_d",
    ]);
    for a in &q.arms {
        t.row([
            a.arm.to_string(),
            a.rank.to_string(),
            sig7(a.mean),
            sig7(a.gap),
            sig7(a.linf_weak_below_best),
            sig7(a.linf_strict_below_best),
            sig7(a.linf_weak_above),
            opt7(a.pair_rate),
            opt7(a.pair_rate_x),
            opt7(a.chernoff_d),
        ]);
    }
    t
}

fn bounds_table(r: &BoundReport) -> Table {
    let mut t = Table::new(["bound", "kind", "value", "variant", "k", "j", "x", "note"]);
    let mut add = |name: &str, kind: &str, b: &Option<BoundValue>| {
        if let Some(b) = b {
            let a = b.argmin;
            let note = match (&b.caveat, b.constant) {
                (Some(c), _) => c.clone(),
                (None, Some(c)) => format!("constant {}", sig7(c)),
                _ => String::new(),
            };
            t.row([
                name.to_string(),
                kind.to_string(),
                sig7(b.value),
                serde_json::to_value(b.variant)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                a.and_then(|a| a.k).map_or("-".into(), |k| k.to_string()),
                a.and_then(|a| a.j).map_or("-".into(), |j| j.to_string()),
                opt7(a.and_then(|a| a.x)),
                note,
            ]);
        }
    };
    add("cor3_phi", "upper", &r.upper.cor3_phi);
    add("cor3_gap", "upper", &r.upper.cor3_gap);
    add("thm7", "lower", &r.lower.thm7);
    add("thm12", "lower", &r.lower.thm12);
    add("thm13", "lower", &r.lower.thm13);
    add("gap_lb_abm10", "lower", &r.lower.gap_lb_abm10);
    add("two_arm", "lower", &r.lower.two_arm);
    add("bh_value", "lower", &r.lower.bh_value);
    add("cl16_value", "lower", &r.lower.cl16_value);
    t
}

fn skipped_lines(r: &BoundReport) -> String {
    let mut s = String::new();
    for k in &r.skipped {
        s += &format!("skipped {}: {}\n", k.bound, k.reason);
    }
    if !r.atom_boundary_arms.is_empty() {
        s += &format!(
            "atom boundary arms (weak and strict variants differ): {:?}\n",
            r.atom_boundary_arms
        );
    }
    s
}

fn sim_text(r: &SimReport) -> String {
    let mut t = Table::new(["T", "errors", "R", "p_hat", "stderr"]);
    for c in &r.cells {
        t.row([
            c.budget.to_string(),
            c.errors.to_string(),
            c.replications.to_string(),
            sig7(c.p_hat),
            sig7(c.stderr),
        ]);
    }
    let mut s = t.render();
    s += &format!("status: {}\n", r.status);
    if let Some(d) = &r.detail {
        s += &format!("detail: {d}\n");
    }
    if let Some(f) = &r.fit {
        s += &format!(
            "slope: {} +/- {} ({} cells, {} dropped)\n",
            sig7(f.slope),
            sig7(f.half_width),
            f.cells_used,
            f.cells_dropped
        );
    }
    s += &format!("resolution limit: {}\n", sig7(r.resolution_limit));
    if !r.verdicts.is_empty() {
        let mut v = Table::new(["bound", "value", "slope", "tolerance", "verdict"]);
        for x in &r.verdicts {
            v.row([
                x.bound.clone(),
                sig7(x.bound_value),
                sig7(x.slope),
                sig7(x.tolerance),
                x.label.clone(),
            ]);
        }
        s += &v.render();
    }
    if let Some(f) = &r.frequencies {
        s += &format!(
            "rejection frequencies at T = {} ({} runs): {}\n",
            f.budget,
            f.replications,
            if f.all_hold() { "balanced and monotonous" } else { "check failed" }
        );
    }
    for n in &r.notes {
        s += &format!("note: {n}\n");
    }
    s
}

fn flip_table(r: &FlipReport) -> Table {
    let mut t = Table::new(["N", "flips", "R", "p_hat", "stderr", "ln_p_over_N"]);
    for c in &r.cells {
        t.row([
            c.n.to_string(),
            c.flips.to_string(),
            c.replications.to_string(),
            sig7(c.p_hat),
            sig7(c.stderr),
            sig7(c.log_rate),
        ]);
    }
    t
}

fn flip_summary(r: &FlipReport) -> String {
    let mut s = format!("pair rate: {}\nstatus: {}\n", sig7(r.pair_rate), r.status);
    if let Some(f) = &r.fit {
        s += &format!("slope: {} +/- {}\n", sig7(f.slope), sig7(f.half_width));
    }
    if let Some(d) = &r.detail {
        s += &format!("detail: {d}\n");
    }
    s
}

fn verify_lines(r: &VerifyReport) -> String {
    let mut s = String::new();
    for p in &r.properties {
        s += &format!(
            "{} {}::{} ({} cases) {}\n",
            if p.passed { "PASS" } else { "FAIL" },
            p.module,
            p.name,
            p.cases,
            p.detail
        );
    }
    s
}

fn verify_table(r: &VerifyReport) -> Table {
    let mut t = Table::new(["module", "property", "passed", "cases", "detail"]);
    for p in &r.properties {
        t.row([
            p.module.to_string(),
            p.name.to_string(),
            p.passed.to_string(),
            p.cases.to_string(),
            p.detail.clone(),
        ]);
    }
    t
}
