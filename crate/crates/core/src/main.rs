use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use metric_embed::ambient::Exponent;
use metric_embed::fixtures::{Fixture, DEFAULT_POINT_CAP};
use metric_embed::harness::{run_report, MapKind, Mode, RunConfig};
use metric_embed::io::{to_json_string, write_atomic, Format};
use metric_embed::lp::ThetaMode;
use metric_embed::proper::DEFAULT_K_MAX_SLACK;

/// Build and certify low-distortion embeddings of finite metric spaces.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on
/// invalid input or configuration.
#[derive(Parser)]
#[command(name = "metric-embed", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that the input is a metric space.
    Validate(Common),
    /// Greedy maximal net of a ball around the basepoint.
    Net {
        #[command(flatten)]
        common: Common,
        /// Net radius.
        #[arg(long)]
        radius: f64,
        /// Host ball radius (whole space when omitted).
        #[arg(long)]
        ball_radius: Option<f64>,
    },
    /// Dyadic Fréchet embedding of a pointed space, certified against gamma(d) and 9 C d.
    EmbedProper {
        #[command(flatten)]
        common: Common,
        /// Outer block norm exponent (default: sup).
        #[arg(long)]
        outer_norm: Option<String>,
    },
    /// Bi-Lipschitz embedding of an lp point cloud.
    EmbedLp(Common),
    /// Net rounding composed with the lp embedding.
    Coarse(Common),
    /// Compression/expansion moduli and distortion of one of the maps.
    Moduli {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "proper")]
        map: MapArg,
        /// Comma-separated thresholds (default: 32 log-spaced values).
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
    },
    /// Generate a fixture space file.
    Gen(GenArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    basepoint: Option<usize>,
    /// Exponent for point clouds ("inf" allowed); overrides the file.
    #[arg(long)]
    p: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    lambda_sim: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, value_enum, default_value = "exact")]
    theta: ThetaArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_K_MAX_SLACK)]
    k_max_slack: u32,
    #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
    point_cap: usize,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long, default_value_t = 10.0)]
    side: f64,
    #[arg(long, default_value_t = 0.2)]
    edge_prob: f64,
    #[arg(long, default_value_t = 4)]
    max_weight: u32,
    /// Grid scale for `grid-net`.
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
    point_cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaArg {
    Exact,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    Proper,
    Lp,
    Coarse,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    RandomGraphMetric,
    RandomLpCloud,
    GridNet,
    Path,
    Star,
}

fn exponent(s: &str) -> Result<Exponent, String> {
    s.parse::<Exponent>().map_err(|e| e.to_string())
}

fn config_from(mode: Mode, c: Common) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::new(mode);
    cfg.input = c.input;
    cfg.format = c.format.map(|f| match f {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    });
    cfg.basepoint = c.basepoint;
    cfg.p = c.p.as_deref().map(exponent).transpose()?;
    cfg.lambda_sim = c.lambda_sim;
    cfg.delta = c.delta;
    cfg.theta = match c.theta {
        ThetaArg::Exact => ThetaMode::Exact,
        ThetaArg::Random => ThetaMode::Random,
    };
    cfg.seed = c.seed;
    cfg.epsilon = c.epsilon;
    cfg.k_max_slack = c.k_max_slack;
    cfg.point_cap = c.point_cap;
    cfg.out = c.out;
    Ok(cfg)
}

fn build_config(cli: Cli) -> Result<RunConfig, String> {
    Ok(match cli.command {
        Command::Validate(c) => config_from(Mode::Validate, c)?,
        Command::Net {
            common,
            radius,
            ball_radius,
        } => {
            let mut cfg = config_from(Mode::Net, common)?;
            cfg.radius = Some(radius);
            cfg.ball_radius = ball_radius;
            cfg
        }
        Command::EmbedProper { common, outer_norm } => {
            let mut cfg = config_from(Mode::EmbedProper, common)?;
            cfg.outer_norm = outer_norm.as_deref().map(exponent).transpose()?;
            cfg
        }
        Command::EmbedLp(c) => config_from(Mode::EmbedLp, c)?,
        Command::Coarse(c) => {
            let mut cfg = config_from(Mode::Coarse, c)?;
            cfg.epsilon.get_or_insert(1.0);
            cfg
        }
        Command::Moduli {
            common,
            map,
            thresholds,
        } => {
            let mut cfg = config_from(Mode::Moduli, common)?;
            cfg.map = match map {
                MapArg::Proper => MapKind::Proper,
                MapArg::Lp => MapKind::Lp,
                MapArg::Coarse => MapKind::Coarse,
            };
            cfg.thresholds = thresholds;
            cfg
        }
        Command::Gen(g) => {
            let mut cfg = RunConfig::new(Mode::Gen);
            let p = exponent(&g.p)?.value();
            cfg.fixture = Some(match g.kind {
                KindArg::RandomGraphMetric => Fixture::RandomGraphMetric {
                    n: g.n,
                    edge_prob: g.edge_prob,
                    max_weight: g.max_weight,
                    seed: g.seed,
                },
                KindArg::RandomLpCloud => Fixture::RandomLpCloud {
                    n: g.n,
                    dim: g.dim,
                    p,
                    side: g.side,
                    seed: g.seed,
                },
                KindArg::GridNet => Fixture::GridNet { n_dim: g.dim, k: g.k },
                KindArg::Path => Fixture::Path { n: g.n },
                KindArg::Star => Fixture::Star { leaves: g.n },
            });
            cfg.seed = g.seed;
            cfg.point_cap = g.point_cap;
            cfg.out = g.out;
            cfg
        }
    })
}

fn main() -> ExitCode {
    let config = match build_config(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match run_report(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = to_json_string(&outcome.document);
    match &config.out {
        Some(path) => {
            if let Err(e) = write_atomic(path, text.as_bytes()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
