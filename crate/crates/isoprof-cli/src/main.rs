//! Command line front end: reproducible experiments over the library,
//! with key=value config files, cached ball indices, and atomically
//! written artifacts.

mod artifact;
mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::Common;
use config::ExperimentConfig;
use isoprof::Error;

#[derive(Parser)]
#[command(
    name = "isoprof",
    version,
    about = "Word metrics, isoperimetric profiles, Folner pairs and random walks on finitely generated groups"
)]
struct Cli {
    /// key=value configuration file; explicit flags win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Ball index cache directory (or the ISOPROF_CACHE variable)
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Memory budget in bytes for ball construction
    #[arg(long, global = true)]
    budget_bytes: Option<u64>,

    /// Seed for randomized trials
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the artifact to this file atomically instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the ball index for a group, using and filling the cache
    Ball(BallArgs),
    /// Sphere counts V(0..r) as CSV
    Growth(GrowthArgs),
    /// Profile curve in balls by the chosen method
    Profile(ProfileArgs),
    /// Folner pair construction and verification report
    Folner(FolnerArgs),
    /// Quotient push-down and subgroup compression
    Transfer(TransferArgs),
    /// Return probabilities, decay fits, and the profile diagnostic
    Walk(WalkArgs),
    /// Join prior artifacts into one summary
    Report(ReportArgs),
}

#[derive(Args)]
struct BallArgs {
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    radius: Option<String>,
}

#[derive(Args)]
struct GrowthArgs {
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    /// Output format (csv)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    group: Option<String>,
    /// Exponent: 1, 2, 3 or inf
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
    /// spectral | inradius | candidates | folner
    #[arg(long)]
    method: Option<String>,
    /// Output format (csv or json)
    #[arg(long)]
    out: Option<String>,
    /// Optional envelope to fit: log, linear, power(a), const
    #[arg(long)]
    phi: Option<String>,
}

#[derive(Args)]
struct FolnerArgs {
    #[arg(long)]
    group: Option<String>,
    /// zd_cubes | lamplighter_windows | bs_windows | heisenberg_boxes
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// left | right
    #[arg(long)]
    side: Option<String>,
    /// Report format (json)
    #[arg(long)]
    report: Option<String>,
}

#[derive(Args)]
struct TransferArgs {
    #[command(subcommand)]
    sub: TransferSub,
}

#[derive(Subcommand)]
enum TransferSub {
    /// Push random functions down a quotient map and certify the
    /// isometry and contraction identities
    Psi(PsiArgs),
    /// Distortion curve of an embedded copy of Z
    Compression(CompressionArgs),
}

#[derive(Args)]
struct PsiArgs {
    /// Ambient group
    #[arg(long)]
    from: Option<String>,
    /// Quotient group
    #[arg(long)]
    to: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Ambient ball radius (quotient uses radius + 1)
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    side: Option<String>,
}

#[derive(Args)]
struct CompressionArgs {
    /// Embedded subgroup: heis-center, bs-x, lamplighter-cursor,
    /// axis<i>, <k>z
    #[arg(long)]
    sub: Option<String>,
    /// Ambient group
    #[arg(long)]
    amb: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
    /// Output format (csv)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct WalkArgs {
    #[command(subcommand)]
    sub: Option<WalkSub>,
    #[arg(long)]
    group: Option<String>,
    /// Laziness as a rational, e.g. 1/2
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    /// Output format (csv or json)
    #[arg(long)]
    out: Option<String>,
    /// Cap on the convolution support size
    #[arg(long)]
    support_budget: Option<String>,
}

#[derive(Subcommand)]
enum WalkSub {
    /// Fit a decay model to a walk artifact
    Fit(WalkFitArgs),
    /// Pair a profile artifact with a walk artifact
    Diagnostic(WalkDiagnosticArgs),
}

#[derive(Args)]
struct WalkFitArgs {
    /// poly | stretched
    #[arg(long)]
    model: Option<String>,
    /// A walk CSV artifact
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    n_min: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
}

#[derive(Args)]
struct WalkDiagnosticArgs {
    /// A profile CSV artifact
    #[arg(long)]
    profile: Option<String>,
    /// A walk CSV artifact
    #[arg(long)]
    input: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding prior artifacts
    #[arg(long)]
    dir: Option<String>,
    /// md | json
    #[arg(long)]
    out: Option<String>,
}

fn dispatch(cli: Cli) -> isoprof::Result<()> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref())?;
    cfg.set_flag(
        "budget-bytes",
        cli.budget_bytes.map(|b| b.to_string()),
    );
    cfg.set_flag("seed", cli.seed.map(|s| s.to_string()));

    let cache_dir = cli
        .cache_dir
        .or_else(|| cfg.get("cache-dir").map(PathBuf::from))
        .or_else(|| std::env::var_os("ISOPROF_CACHE").map(PathBuf::from));
    let budget_bytes: u64 = cfg.parsed_or("budget-bytes", isoprof::ball::DEFAULT_BUDGET_BYTES)?;
    let seed: u64 = cfg.parsed_or("seed", 0x5eed)?;
    let common = Common {
        cache_dir,
        budget_bytes,
        seed,
        output: cli.output,
    };

    match cli.command {
        Command::Ball(a) => {
            cfg.set_flag("group", a.group);
            cfg.set_flag("radius", a.radius);
            commands::ball(cfg, &common)
        }
        Command::Growth(a) => {
            cfg.set_flag("group", a.group);
            cfg.set_flag("radius", a.radius);
            cfg.set_flag("out", a.out);
            commands::growth(cfg, &common)
        }
        Command::Profile(a) => {
            cfg.set_flag("group", a.group);
            cfg.set_flag("p", a.p);
            cfg.set_flag("rmax", a.rmax);
            cfg.set_flag("method", a.method);
            cfg.set_flag("out", a.out);
            cfg.set_flag("phi", a.phi);
            commands::profile(cfg, &common)
        }
        Command::Folner(a) => {
            cfg.set_flag("group", a.group);
            cfg.set_flag("family", a.family);
            cfg.set_flag("n", a.n);
            cfg.set_flag("side", a.side);
            cfg.set_flag("report", a.report);
            commands::folner_cmd(cfg, &common)
        }
        Command::Transfer(t) => match t.sub {
            TransferSub::Psi(a) => {
                cfg.set_flag("from", a.from);
                cfg.set_flag("to", a.to);
                cfg.set_flag("p", a.p);
                cfg.set_flag("trials", a.trials);
                cfg.set_flag("radius", a.radius);
                cfg.set_flag("side", a.side);
                commands::transfer_psi(cfg, &common)
            }
            TransferSub::Compression(a) => {
                cfg.set_flag("sub", a.sub);
                cfg.set_flag("amb", a.amb);
                cfg.set_flag("rmax", a.rmax);
                cfg.set_flag("out", a.out);
                commands::transfer_compression(cfg, &common)
            }
        },
        Command::Walk(a) => match a.sub {
            Some(WalkSub::Fit(f)) => {
                cfg.set_flag("model", f.model);
                cfg.set_flag("input", f.input);
                cfg.set_flag("n-min", f.n_min);
                cfg.set_flag("n-max", f.n_max);
                commands::walk_fit(cfg, &common)
            }
            Some(WalkSub::Diagnostic(d)) => {
                cfg.set_flag("profile", d.profile);
                cfg.set_flag("input", d.input);
                commands::walk_diagnostic(cfg, &common)
            }
            None => {
                cfg.set_flag("group", a.group);
                cfg.set_flag("theta", a.theta);
                cfg.set_flag("nmax", a.nmax);
                cfg.set_flag("out", a.out);
                cfg.set_flag("support-budget", a.support_budget);
                commands::walk(cfg, &common)
            }
        },
        Command::Report(a) => {
            cfg.set_flag("dir", a.dir);
            cfg.set_flag("out", a.out);
            commands::report(cfg, &common)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("isoprof: {e}");
        let code = match e {
            Error::Usage(_) => 2,
            Error::Resource { .. } => 3,
            Error::Numerical(_) => 4,
        };
        std::process::exit(code);
    }
}
