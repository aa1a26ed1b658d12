//! Command-line front end. [`run_cli`] parses arguments, runs one
//! subcommand and returns the process exit code: 0 on success, 1 on a bound
//! violation or an infeasible run, 2 on a usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::adversaries::{adversary_by_name, play, AdversaryError};
use crate::algorithms::policy_by_name;
use crate::batch::{run_batch, BatchError, SuiteParams};
use crate::engine::{simulate, Scenario, SimError};
use crate::instance::{decode, encode, generate_random, GenParams, Instance, SpaceParams, Variant};
use crate::metric::SpaceKind;
use crate::numfmt::g17;
use crate::oracle::opt_makespan;
use crate::report::{ratio, ReportFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "oltsp", version, about = "Online TSP with known locations: simulate, evaluate and stress policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Semiline,
    Line,
    Ring,
    Star,
    General,
}

impl From<KindArg> for SpaceKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Semiline => SpaceKind::SemiLine,
            KindArg::Line => SpaceKind::Line,
            KindArg::Ring => SpaceKind::Ring,
            KindArg::Star => SpaceKind::Star,
            KindArg::General => SpaceKind::General,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Open,
    Closed,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Open => Variant::Open,
            VariantArg::Closed => Variant::Closed,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a policy on an instance file and compare with the optimum.
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        policy: String,
        /// Print the full trajectory as JSON.
        #[arg(long)]
        trace: bool,
    },
    /// Offline optimum of an instance file.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, value_enum, default_value = "closed")]
        variant: VariantArg,
        /// Star ray count.
        #[arg(long, default_value_t = 3)]
        rays: usize,
        /// Asymmetric distances (general spaces).
        #[arg(long)]
        asymmetric: bool,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ratio experiment over a seeded instance stream.
    Batch {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        policy: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fail (exit 1) if some ratio exceeds this.
        #[arg(long)]
        bound: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Sizes are drawn from 1..=max-n.
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        /// Star ray counts are drawn from 1..=max-rays.
        #[arg(long, default_value_t = 8)]
        max_rays: usize,
        /// Fixed release horizon (default: random, up to 3 diameters).
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        asymmetric: bool,
        /// Skip ring instances with an empty arc over half the ring.
        #[arg(long)]
        non_line_like: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play an adaptive adversary against a policy.
    Adversary {
        #[arg(long)]
        name: String,
        #[arg(long)]
        policy: String,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        trace: bool,
    },
}

/// Failure of a subcommand, mapped to an exit code.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn sim_failure(e: SimError) -> Failure {
    match e {
        SimError::Incompatible(_) => Failure::Usage(e.to_string()),
        _ => Failure::Run(e.to_string()),
    }
}

fn load(path: &PathBuf) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let inst = decode(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let bad = inst.validate();
    if let Some(v) = bad.first() {
        return Err(Failure::Usage(format!("{}: invalid instance: {v}", path.display())));
    }
    Ok(inst)
}

fn write_to(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Run(format!("cannot write {}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// Runs the command line `args` (program name first).
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Run(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FAIL
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Simulate { instance, policy, trace } => {
            let inst = load(&instance)?;
            let mut p = policy_by_name(&policy).map_err(|e| Failure::Usage(e.to_string()))?;
            let outcome = simulate(Scenario::Fixed(&inst), p.as_mut()).map_err(sim_failure)?;
            writeln!(out, "policy     {}", p.name())?;
            writeln!(out, "completion {}", g17(outcome.completion))?;
            match opt_makespan(&inst) {
                Ok(o) => {
                    writeln!(out, "opt        {}", g17(o.makespan))?;
                    writeln!(out, "ratio      {}", g17(ratio(outcome.completion, o.makespan)))?;
                }
                Err(e) => writeln!(out, "opt        n/a ({e})")?,
            }
            if trace {
                out.write_all(outcome.to_json().as_bytes())?;
            }
            Ok(EXIT_OK)
        }
        Command::Oracle { instance } => {
            let inst = load(&instance)?;
            let o = opt_makespan(&inst).map_err(|e| Failure::Run(e.to_string()))?;
            writeln!(out, "makespan {}", g17(o.makespan))?;
            let order: Vec<String> = o.order.iter().map(|id| id.to_string()).collect();
            writeln!(out, "order    {}", order.join(" "))?;
            Ok(EXIT_OK)
        }
        Command::Gen { kind, n, seed, horizon, variant, rays, asymmetric, out: path } => {
            let kind = SpaceKind::from(kind);
            let space = match kind {
                SpaceKind::Star => SpaceParams::Star { rays },
                SpaceKind::General => SpaceParams::General { asymmetric },
                k => SpaceParams::default_for(k),
            };
            let params = GenParams { n, seed, horizon, variant: variant.into(), space };
            let inst = generate_random(&params).map_err(|e| Failure::Usage(e.to_string()))?;
            write_to(&path, &encode(&inst), out)?;
            Ok(EXIT_OK)
        }
        Command::Batch {
            kind,
            variant,
            policy,
            count,
            seed,
            bound,
            format,
            max_n,
            max_rays,
            horizon,
            asymmetric,
            non_line_like,
            out: path,
        } => {
            if max_n == 0 || max_rays == 0 {
                return Err(Failure::Usage("--max-n and --max-rays must be at least 1".into()));
            }
            let mut suite = SuiteParams::new(kind.into(), variant.into(), seed, count);
            suite.max_n = max_n;
            suite.max_rays = max_rays;
            suite.horizon = horizon;
            suite.asymmetric = asymmetric;
            suite.non_line_like = non_line_like;
            let report = run_batch(&suite, &policy, bound).map_err(|e| match e {
                BatchError::Policy(_) | BatchError::Generate { .. } => Failure::Usage(e.to_string()),
                BatchError::Simulate { source: SimError::Incompatible(_), .. } => Failure::Usage(e.to_string()),
                _ => Failure::Run(e.to_string()),
            })?;
            let format = match format {
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Json => ReportFormat::Json,
            };
            write_to(&path, &report.render(format), out)?;
            let bad = report.violations();
            for r in &bad {
                writeln!(
                    err,
                    "bound violated: seed {} alg {} opt {} ratio {}",
                    r.id,
                    g17(r.alg),
                    g17(r.opt),
                    g17(r.ratio)
                )?;
            }
            Ok(if bad.is_empty() { EXIT_OK } else { EXIT_FAIL })
        }
        Command::Adversary { name, policy, epsilon, trace } => {
            let mut adv = adversary_by_name(&name, epsilon).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut p = policy_by_name(&policy).map_err(|e| Failure::Usage(e.to_string()))?;
            let r = play(adv.as_mut(), p.as_mut()).map_err(|e| match e {
                AdversaryError::Sim(s) => sim_failure(s),
                AdversaryError::Oracle(o) => Failure::Run(o.to_string()),
            })?;
            writeln!(out, "adversary        {}", adv.name())?;
            writeln!(out, "policy           {}", p.name())?;
            writeln!(out, "forcedCompletion {}", g17(r.forced_completion))?;
            writeln!(out, "optCompletion    {}", g17(r.opt_completion))?;
            writeln!(out, "forcedRatio      {}", g17(r.forced_ratio))?;
            if trace {
                out.write_all(encode(&r.materialized).as_bytes())?;
                out.write_all(r.outcome.to_json().as_bytes())?;
            }
            Ok(EXIT_OK)
        }
    }
}
