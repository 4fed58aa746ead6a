//! End-to-end runs behind the CLI: parse, construct, verify, report.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use crate::ambient::{distance, BlockIsoModel, BlockVector, Exponent, NormSpec};
use crate::coarse::{coarse_embed, max_rounding_defect, verify_coarse};
use crate::error::{Error, Result};
use crate::fixtures::{gen_fixture, Fixture, SpaceData, DEFAULT_POINT_CAP};
use crate::io::{parse_space, space_to_json, Format, ParsedSpace};
use crate::lp::{verify_lp, LpEmbedding, LpParams, LpPointSet, ThetaMode};
use crate::metric::{FiniteMetricSpace, PointedSpace};
use crate::net::{greedy_maximal_net, Ball};
use crate::proper::{series_constant, verify_proper, ProperEmbedding, ProperParams, DEFAULT_K_MAX_SLACK};
use crate::verify::{default_thresholds, moduli_profile, BoundsReport};

pub const REPORT_SCHEMA: &str = "metric-embed.report/v1";

/// Failing pairs listed in a report beyond this count are only counted.
pub const MAX_LISTED_FAILURES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Validate,
    Net,
    EmbedProper,
    EmbedLp,
    Coarse,
    Moduli,
    Gen,
}

/// Which map the `moduli` mode profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Proper,
    Lp,
    Coarse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub input: Option<PathBuf>,
    pub format: Option<Format>,
    pub basepoint: Option<usize>,
    pub p: Option<Exponent>,
    pub lambda_sim: f64,
    pub delta: f64,
    pub theta: ThetaMode,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub radius: Option<f64>,
    pub ball_radius: Option<f64>,
    pub k_max_slack: u32,
    pub outer_norm: Option<Exponent>,
    pub map: MapKind,
    pub thresholds: Option<Vec<f64>>,
    pub point_cap: usize,
    pub fixture: Option<Fixture>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            input: None,
            format: None,
            basepoint: None,
            p: None,
            lambda_sim: 1.0,
            delta: 0.01,
            theta: ThetaMode::Exact,
            seed: 0,
            epsilon: None,
            radius: None,
            ball_radius: None,
            k_max_slack: DEFAULT_K_MAX_SLACK,
            outer_norm: None,
            map: MapKind::Proper,
            thresholds: None,
            point_cap: DEFAULT_POINT_CAP,
            fixture: None,
            out: None,
        }
    }
}

/// Result of a run: the document to emit and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub document: Value,
    pub passed: bool,
}

fn missing(name: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        reason: "required for this mode".into(),
    }
}

fn load(config: &RunConfig) -> Result<ParsedSpace> {
    let path = config.input.as_ref().ok_or(missing("input"))?;
    let parsed = parse_space(path, config.format)?;
    if parsed.data.len() > config.point_cap {
        return Err(Error::SizeCapExceeded {
            requested: parsed.data.len() as u128,
            cap: config.point_cap as u128,
        });
    }
    Ok(parsed)
}

fn basepoint(config: &RunConfig, parsed: &ParsedSpace) -> usize {
    config.basepoint.or(parsed.basepoint).unwrap_or(0)
}

fn cloud(config: &RunConfig, parsed: &ParsedSpace) -> Result<LpPointSet> {
    match &parsed.data {
        SpaceData::Cloud(c) => LpPointSet::new(config.p.unwrap_or(c.p), c.points.clone(), basepoint(config, parsed)),
        SpaceData::Matrix(_) => Err(Error::InvalidParameter {
            name: "input",
            reason: "this mode needs a point cloud ({\"p\": .., \"points\": ..})".into(),
        }),
    }
}

fn proper_iso(config: &RunConfig) -> Result<BlockIsoModel> {
    match config.theta {
        ThetaMode::Exact => Ok(BlockIsoModel::exact()),
        ThetaMode::Random => BlockIsoModel::seeded(config.seed, 0.5, 1.0),
    }
}

fn lp_params(config: &RunConfig) -> Result<LpParams> {
    LpParams::new(config.delta, config.lambda_sim, config.theta, config.seed)
}

fn header(config: &RunConfig, passed: bool) -> Value {
    json!({
        "schema": REPORT_SCHEMA,
        "mode": config.mode,
        "passed": passed,
        "config": config,
        "provenance": {
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "seed": config.seed,
            "input": config.input.as_ref().map(|p| p.display().to_string()),
        },
    })
}

fn summary(report: &BoundsReport) -> Value {
    json!({
        "pairs": report.pair_count(),
        "passed_pairs": report.pair_count() - report.failed_count(),
        "failed_pairs": report.failed_count(),
        "worst_lower_slack": report.worst_lower_slack,
        "worst_upper_slack": report.worst_upper_slack,
        "distortion": report.distortion,
        "tolerance": report.tolerance,
    })
}

fn failures(report: &BoundsReport) -> Value {
    json!(report.failures().take(MAX_LISTED_FAILURES).collect::<Vec<_>>())
}

fn moduli_json(config: &RunConfig, domain: &FiniteMetricSpace, images: &[BlockVector], norm: NormSpec) -> Result<Value> {
    let thresholds = config
        .thresholds
        .clone()
        .unwrap_or_else(|| default_thresholds(domain));
    let profile = moduli_profile(domain, images, |a, b| distance(a, b, norm), &thresholds)?;
    let monotone = profile.is_monotone();
    Ok(json!({
        "thresholds": profile.thresholds,
        "rho": profile.rho,
        "omega": profile.omega,
        "monotone": monotone,
    }))
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn build_proper(config: &RunConfig, parsed: &ParsedSpace) -> Result<ProperEmbedding> {
    let domain = PointedSpace::new(parsed.data.metric()?, basepoint(config, parsed))?;
    let mut params = ProperParams::for_space(&domain, proper_iso(config)?, config.k_max_slack)?;
    if let Some(outer) = config.outer_norm {
        params.norm.outer = outer;
    }
    ProperEmbedding::build(domain, params)
}

/// Executes the configured pipeline. Errors are input or configuration
/// problems; failed checks are reported through [`RunOutcome::passed`].
pub fn run_report(config: &RunConfig) -> Result<RunOutcome> {
    match config.mode {
        Mode::Validate => run_validate(config),
        Mode::Net => run_net(config),
        Mode::EmbedProper => run_embed_proper(config),
        Mode::EmbedLp => run_embed_lp(config),
        Mode::Coarse => run_coarse(config),
        Mode::Moduli => run_moduli(config),
        Mode::Gen => run_gen(config),
    }
}

fn run_validate(config: &RunConfig) -> Result<RunOutcome> {
    let path = config.input.as_ref().ok_or(missing("input"))?;
    let outcome = parse_space(path, config.format);
    let (passed, detail) = match &outcome {
        Ok(p) => (
            true,
            json!({
                "points": p.data.len(),
                "kind": match p.data { SpaceData::Matrix(_) => "matrix", SpaceData::Cloud(_) => "cloud" },
                "error": Value::Null,
            }),
        ),
        Err(e @ (Error::Io(_) | Error::Parse { .. } | Error::UnknownFormat(_))) => return Err(e.clone()),
        Err(e) => (false, json!({ "points": Value::Null, "error": e.to_string() })),
    };
    Ok(RunOutcome {
        document: merge(header(config, passed), json!({ "validation": detail })),
        passed,
    })
}

fn run_net(config: &RunConfig) -> Result<RunOutcome> {
    let parsed = load(config)?;
    let space = parsed.data.metric()?;
    let seed = basepoint(config, &parsed);
    let radius = config.radius.ok_or(missing("radius"))?;
    let ball = Ball::new(seed, config.ball_radius.unwrap_or(f64::INFINITY));
    let net = greedy_maximal_net(&space, ball, radius, seed)?;
    let host = ball.points(&space);
    let separated = net.members().iter().enumerate().all(|(i, &a)| {
        net.members()[i + 1..]
            .iter()
            .all(|&b| space.dist(a, b) >= radius)
    });
    let maximal = host
        .iter()
        .all(|&t| net.members().iter().any(|&s| space.dist(s, t) < radius));
    let passed = separated && maximal;
    let labels: Vec<&str> = net.members().iter().map(|&i| space.labels()[i].as_str()).collect();
    Ok(RunOutcome {
        document: merge(
            header(config, passed),
            json!({
                "net": {
                    "members": net.members(),
                    "labels": labels,
                    "radius": radius,
                    "ball": { "center": ball.center, "radius": if ball.radius.is_finite() { json!(ball.radius) } else { json!("unbounded") } },
                    "host_points": host.len(),
                    "separated": separated,
                    "maximal": maximal,
                }
            }),
        ),
        passed,
    })
}

fn run_embed_proper(config: &RunConfig) -> Result<RunOutcome> {
    let parsed = load(config)?;
    let emb = build_proper(config, &parsed)?;
    let report = verify_proper(&emb)?;
    let c_trunc = emb.params().c_trunc();
    let c = series_constant();
    let moduli = moduli_json(config, emb.domain().space(), emb.images(), emb.params().norm)?;
    let passed = report.passed() && c_trunc <= c;
    let body = json!({
        "constants": {
            "c_trunc": c_trunc,
            "c_series": c,
            "c_trunc_le_c": c_trunc <= c,
            "upper_factor": 9.0 * c_trunc,
            "gamma": { "denominator": 24.0, "shift": 128.0, "log_base": 2.0 },
        },
        "construction": {
            "n_min": emb.params().n_min,
            "n_max": emb.params().n_max,
            "k_max": emb.params().k_max,
            "iso": emb.params().iso,
            "norm": emb.params().norm,
            "basepoint": emb.domain().basepoint(),
        },
        "summary": summary(&report),
        "failures": failures(&report),
        "moduli": moduli,
    });
    Ok(RunOutcome {
        document: merge(header(config, passed), body),
        passed,
    })
}

fn lp_body(emb: &LpEmbedding, report: &BoundsReport, moduli: Value) -> Value {
    json!({
        "constants": {
            "lower_factor": emb.params().lower_factor(),
            "upper_factor": 9.0,
            "lambda_sim": emb.params().lambda_sim,
            "delta": emb.params().delta,
        },
        "construction": {
            "p": emb.set().p,
            "dim": emb.set().dim,
            "normalization": emb.normalization(),
            "diagonal": emb.diagonal(),
            "iso": emb.params().iso,
            "norm": emb.norm(),
        },
        "summary": summary(report),
        "failures": failures(report),
        "moduli": moduli,
    })
}

fn run_embed_lp(config: &RunConfig) -> Result<RunOutcome> {
    let parsed = load(config)?;
    let set = cloud(config, &parsed)?;
    let emb = LpEmbedding::build(&set, lp_params(config)?)?;
    let report = verify_lp(&emb)?;
    let moduli = moduli_json(config, &set.metric()?, &emb.images_original_units(), emb.norm())?;
    let passed = report.passed();
    Ok(RunOutcome {
        document: merge(header(config, passed), lp_body(&emb, &report, moduli)),
        passed,
    })
}

fn run_coarse(config: &RunConfig) -> Result<RunOutcome> {
    let parsed = load(config)?;
    let set = cloud(config, &parsed)?;
    let epsilon = config.epsilon.ok_or(missing("epsilon"))?;
    let emb = coarse_embed(&set, epsilon, lp_params(config)?)?;
    let report = verify_coarse(&set, &emb)?;
    let defect = max_rounding_defect(&set, &emb.rounding);
    let rounding_ok = defect <= epsilon + 1e-12;
    let metric = set.metric()?;
    let moduli = moduli_json(config, &metric, &emb.images, emb.norm)?;
    let passed = report.passed() && rounding_ok;
    let body = json!({
        "constants": {
            "c_d": emb.constants.c_d,
            "c_a": emb.constants.c_a,
            "epsilon": epsilon,
            "lower_factor": emb.net_embedding.params().lower_factor(),
        },
        "rounding": {
            "net": emb.rounding.net,
            "beta": emb.rounding.beta,
            "max_defect": defect,
            "within_epsilon": rounding_ok,
        },
        "summary": summary(&report),
        "failures": failures(&report),
        "moduli": moduli,
    });
    Ok(RunOutcome {
        document: merge(header(config, passed), body),
        passed,
    })
}

fn run_moduli(config: &RunConfig) -> Result<RunOutcome> {
    let parsed = load(config)?;
    let (domain, images, norm) = match config.map {
        MapKind::Proper => {
            let emb = build_proper(config, &parsed)?;
            (emb.domain().space().clone(), emb.images().to_vec(), emb.params().norm)
        }
        MapKind::Lp => {
            let set = cloud(config, &parsed)?;
            let emb = LpEmbedding::build(&set, lp_params(config)?)?;
            (set.metric()?, emb.images_original_units(), emb.norm())
        }
        MapKind::Coarse => {
            let set = cloud(config, &parsed)?;
            let epsilon = config.epsilon.ok_or(missing("epsilon"))?;
            let emb = coarse_embed(&set, epsilon, lp_params(config)?)?;
            (set.metric()?, emb.images, emb.norm)
        }
    };
    let moduli = moduli_json(config, &domain, &images, norm)?;
    let dist = crate::verify::distortion(&domain, &images, |a, b| distance(a, b, norm))?;
    let passed = moduli["monotone"].as_bool().unwrap_or(false);
    Ok(RunOutcome {
        document: merge(
            header(config, passed),
            json!({ "map": config.map, "distortion": dist, "moduli": moduli }),
        ),
        passed,
    })
}

fn run_gen(config: &RunConfig) -> Result<RunOutcome> {
    let fixture = config.fixture.as_ref().ok_or(missing("fixture"))?;
    let data = gen_fixture(fixture, config.point_cap)?;
    let basepoint = match &data {
        SpaceData::Cloud(c) => Some(c.basepoint),
        SpaceData::Matrix(_) => None,
    };
    Ok(RunOutcome {
        document: space_to_json(&data, basepoint),
        passed: true,
    })
}
