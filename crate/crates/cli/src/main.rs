use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

mod commands;
mod config;
mod output;

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "mixsum", version, about = "Experiments on mixed character sums Σ χ(n) e(nθ) w(n/x)")]
struct Cli {
    /// Worker threads (default: all cores). Reductions are order-fixed either way.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file. Without it, output goes to $MIXSUM_OUTPUT_DIR/<command>.<ext> or stdout.
    #[arg(long, short = 'o', global = true)]
    out: Option<PathBuf>,
    /// Working precision for θ in bits.
    #[arg(long, global = true, default_value_t = 256)]
    bits: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Family sums and moment ratios over a grid of primes.
    Moments(MomentsArgs),
    /// Poisson residuals, the resonant tail and the dyadic fourth-moment assembly.
    Poisson(PoissonArgs),
    /// Exact congruence and Diophantine counts.
    #[command(subcommand)]
    Count(CountCommand),
    /// Continued fraction, the exp(-q^{1/4}) condition and the set 𝓛.
    Dioph(DiophArgs),
    /// The off-diagonal sum over m₁m₂ = n₁n₂ and its case split.
    Shortsum(ShortsumArgs),
    /// Distribution of S/√𝔼|S|² against a complex Gaussian.
    Dist(DistArgs),
    /// Exact identities at one (θ, r, x), or the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
struct MomentsArgs {
    #[arg(long, default_value = "quad:-1,2,1")]
    theta: String,
    /// Comma-separated primes or primes-up-to:N.
    #[arg(long, default_value = "101")]
    r_grid: String,
    /// N, r, frac:c (x = ⌈cr⌉) or pow:p (x = ⌈r^p⌉).
    #[arg(long, default_value = "r")]
    x_rule: String,
    #[arg(long, default_value = "bump")]
    weight: String,
}

#[derive(Debug, Args, Serialize)]
struct PoissonArgs {
    #[arg(long, default_value = "quad:-1,2,1")]
    theta: String,
    #[arg(long, default_value_t = 101)]
    r: u64,
    #[arg(long, default_value_t = 60.0)]
    x: f64,
    #[arg(long, default_value = "bump")]
    weight: String,
    /// Dual range; defaults to ⌈100(2 + r/x)⌉.
    #[arg(long)]
    m_max: Option<i64>,
    /// Number of characters, evenly spaced in j.
    #[arg(long, default_value_t = 20)]
    characters: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long = "A", default_value_t = 2.0)]
    a: f64,
    #[arg(long, default_value_t = 6)]
    j_max: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum CountCommand {
    /// N(d, q) for every d mod q and every q up to --q-max.
    N {
        #[arg(long, default_value_t = 60)]
        q_max: u64,
    },
    /// N_{S,P}(T).
    Nsp {
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
        #[arg(long, allow_negative_numbers = true)]
        p: i64,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 1.0)]
        box_constant: f64,
    },
    /// 𝒩₄ over the interval [lo, hi] with k = ⌊rθ⌋.
    N4 {
        #[arg(long, default_value = "quad:-1,2,1")]
        theta: String,
        #[arg(long)]
        r: u64,
        #[arg(long, allow_negative_numbers = true)]
        lo: i64,
        #[arg(long, allow_negative_numbers = true)]
        hi: i64,
    },
    /// #{(S, P) ∈ [1, N] × [-M, M] : kS ≡ P mod r}.
    Pigeonhole {
        #[arg(long, default_value = "quad:-1,2,1")]
        theta: String,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        c: f64,
    },
    /// Σ N_{S,P}(T) over kS ≡ P mod r against T² + T⁴/r.
    Clean {
        #[arg(long, default_value = "quad:-1,2,1")]
        theta: String,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 1.0)]
        box_constant: f64,
    },
    /// Exhaustive injection check over quadruples in [-bound, bound]⁴.
    Injection {
        #[arg(long, default_value_t = 12)]
        bound: i64,
    },
    /// 𝒟(s) for s in [s_min, s_max].
    Dyadic {
        #[arg(long, default_value_t = -5, allow_negative_numbers = true)]
        s_min: i64,
        #[arg(long, default_value_t = 50, allow_negative_numbers = true)]
        s_max: i64,
        #[arg(long, default_value_t = 10_000)]
        terms: i64,
    },
}

#[derive(Debug, Args, Serialize)]
struct DiophArgs {
    #[arg(long, default_value = "quad:-1,2,1")]
    theta: String,
    #[arg(long, default_value_t = 30)]
    depth: usize,
    /// Constant C in ‖qθ‖ ⩾ C exp(-q^{1/4}).
    #[arg(long, default_value_t = 0.05)]
    constant: f64,
    #[arg(long, default_value_t = 10_000)]
    q_max: u64,
    /// x for the set 𝓛; skipped when absent.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
}

#[derive(Debug, Args, Serialize)]
struct ShortsumArgs {
    #[arg(long, default_value = "quad:-1,2,1")]
    theta: String,
    /// Comma-separated x values.
    #[arg(long, default_value = "16,64,256")]
    x: String,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
}

#[derive(Debug, Args, Serialize)]
struct DistArgs {
    #[arg(long, default_value = "quad:-1,2,1")]
    theta: String,
    #[arg(long, default_value_t = 10007)]
    r: u64,
    #[arg(long, default_value = "r")]
    x_rule: String,
    #[arg(long, default_value = "bump")]
    weight: String,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    /// With --r and --x: run the exact-identity suite there.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, default_value = "bump")]
    weight: String,
    /// Acceptance criteria to run (default: all).
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Moments(_) => "moments",
        Command::Poisson(_) => "poisson",
        Command::Count(_) => "count",
        Command::Dioph(_) => "dioph",
        Command::Shortsum(_) => "shortsum",
        Command::Dist(_) => "dist",
        Command::Verify(_) => "verify",
    }
}

fn dispatch(cli: &Cli) -> Result<output::Report> {
    let bits = cli.bits;
    match &cli.command {
        Command::Moments(a) => commands::moments(a, bits),
        Command::Poisson(a) => commands::poisson(a, bits),
        Command::Count(c) => commands::count(c, bits),
        Command::Dioph(a) => commands::dioph(a, bits),
        Command::Shortsum(a) => commands::shortsum(a, bits),
        Command::Dist(a) => commands::dist(a, bits),
        Command::Verify(a) => commands::verify(a, bits),
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads: must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    if !(64..=4096).contains(&cli.bits) {
        bail!("--bits: must lie in [64, 4096], got {}", cli.bits);
    }
    let report = dispatch(cli)?;
    let cmd = name(&cli.command);
    let config = json!({
        "command": serde_json::to_value(&cli.command)?,
        "bits": cli.bits,
    });
    let config = match config {
        Value::Object(mut m) => {
            // the subcommand's own fields, without the enum wrapper
            if let Some(Value::Object(inner)) = m.remove("command") {
                for (_, v) in inner {
                    m.insert("args".into(), v);
                }
            }
            Value::Object(m)
        }
        v => v,
    };
    let dest = output::destination(cli.out.as_deref(), cmd, cli.format);
    output::emit(&report, cmd, &config, cli.format, dest.as_deref())?;
    for f in &report.failures {
        eprintln!("assertion failed: {f}");
    }
    Ok(report.failures.is_empty())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
