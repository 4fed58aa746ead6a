//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p metric-embed --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use common::*;
use metric_embed::ambient::BlockIsoModel;
use metric_embed::coarse::{coarse_embed, max_rounding_defect, verify_coarse};
use metric_embed::harness::{run_report, MapKind, Mode, RunConfig};
use metric_embed::io::{space_to_json, to_json_string, write_atomic};
use metric_embed::fixtures::SpaceData;
use metric_embed::proper::{weight, Annulus};
use metric_embed::verify::Extent;
use metric_embed::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Graphs plus l2 clouds, 64 points at most.
fn proper_domains() -> Vec<PointedSpace> {
    let mut out: Vec<PointedSpace> = graph_family(60)
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let b = i % g.len();
            PointedSpace::new(g, b).unwrap()
        })
        .collect();
    for c in cloud_family(60, Exponent::TWO, 64, 6, 1) {
        let b = c.basepoint;
        out.push(PointedSpace::new(c.metric().unwrap(), b).unwrap());
    }
    out
}

fn proper_bounds() -> Outcome {
    let start = Instant::now();
    let domains = proper_domains();
    let (mut runs, mut pairs, mut bad) = (0usize, 0usize, 0usize);
    let mut worst = f64::INFINITY;
    for (i, d) in domains.iter().enumerate() {
        for iso in [BlockIsoModel::exact(), BlockIsoModel::seeded(i as u64, 0.5, 1.0).unwrap()] {
            let emb = ProperEmbedding::with_defaults(d.clone(), iso).unwrap();
            let c = emb.params().c_trunc();
            runs += 1;
            for a in 0..d.len() {
                for b in (a + 1)..d.len() {
                    let dist = d.dist(a, b);
                    let e = sup_sum_distance(emb.image(a), emb.image(b));
                    let lo = gamma(dist);
                    let hi = 9.0 * c * dist;
                    pairs += 1;
                    worst = worst.min((e - lo) / lo).min((hi - e) / hi);
                    if !(lo - 1e-9 <= e && e <= hi + 1e-9) {
                        bad += 1;
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad == 0 && runs >= 100 && secs <= 60.0,
        format!("{runs} embeddings, {pairs} pairs, {bad} violations, min relative slack {worst:.3e}, {secs:.1}s"),
    )
}

fn lp_bounds() -> Outcome {
    let start = Instant::now();
    let (mut runs, mut pairs, mut bad) = (0usize, 0usize, 0usize);
    for (pi, p) in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY].into_iter().enumerate() {
        let clouds = cloud_family(50, p, 128, 8, 10 + pi as u64);
        for lambda in [1.0, 2.0] {
            for delta in [0.0, 0.01] {
                for (i, set) in clouds.iter().enumerate() {
                    let theta = if i % 2 == 0 { ThetaMode::Exact } else { ThetaMode::Random };
                    let params = LpParams::new(delta, lambda, theta, i as u64).unwrap();
                    let emb = LpEmbedding::build(set, params).unwrap();
                    let norm = emb.set();
                    let lower = 1.0 / (20.0 * lambda * lambda * (1.0 + delta) * (1.0 + delta));
                    runs += 1;
                    for a in 0..norm.len() {
                        for b in (a + 1)..norm.len() {
                            let d = lp_norm(p.value(), norm.points[a].iter().zip(&norm.points[b]).map(|(x, y)| x - y));
                            let e = lp_sum_distance(p.value(), &emb.images()[a], &emb.images()[b]);
                            pairs += 1;
                            let lo = lower * d;
                            let hi = 9.0 * d;
                            if !(lo * (1.0 - 1e-9) <= e && e <= hi * (1.0 + 1e-9)) {
                                bad += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad == 0 && runs >= 50 * 12 && secs <= 60.0,
        format!("{runs} embeddings, {pairs} pairs, {bad} violations, {secs:.1}s"),
    )
}

fn coarse_bounds() -> Outcome {
    let (mut runs, mut pairs, mut bad, mut bad_round) = (0usize, 0usize, 0usize, 0usize);
    for (pi, p) in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY].into_iter().enumerate() {
        for (i, set) in cloud_family(20, p, 96, 4, 40 + pi as u64).iter().enumerate() {
            for eps in [0.1, 1.0] {
                let lambda = [1.0, 2.0][i % 2];
                let delta = [0.0, 0.01][(i / 2) % 2];
                let params = LpParams::new(delta, lambda, ThetaMode::Random, i as u64).unwrap();
                let emb = coarse_embed(set, eps, params).unwrap();
                let c_d = 9f64.max(20.0 * lambda * lambda * (1.0 + delta) * (1.0 + delta));
                let c_a = 9.0 * eps;
                runs += 1;
                for a in 0..set.len() {
                    for b in (a + 1)..set.len() {
                        let d = set.dist(a, b);
                        let e = lp_sum_distance(p.value(), &emb.images[a], &emb.images[b]);
                        let (lo, hi) = (d / c_d - c_a, c_d * d + c_a);
                        pairs += 1;
                        if !(lo - 1e-9 * lo.abs() <= e && e <= hi * (1.0 + 1e-9)) {
                            bad += 1;
                        }
                        let (ba, bb) = (emb.rounding.beta[a], emb.rounding.beta[b]);
                        if (set.dist(ba, bb) - d).abs() > eps {
                            bad_round += 1;
                        }
                    }
                }
                if !verify_coarse(set, &emb).unwrap().passed() || max_rounding_defect(set, &emb.rounding) > eps {
                    bad += 1;
                }
            }
        }
    }
    outcome(
        bad == 0 && bad_round == 0,
        format!("{runs} embeddings, {pairs} pairs, {bad} envelope violations, {bad_round} rounding violations"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut checks = 0usize;
    let mut mismatches = Vec::new();
    let mut spaces: Vec<FiniteMetricSpace> = graph_family(30);
    spaces.extend(cloud_family(30, Exponent::TWO, 64, 4, 70).iter().map(|c| c.metric().unwrap()));
    for (i, s) in spaces.iter().enumerate() {
        checks += 1;
        if !is_metric(&s.to_matrix()) {
            mismatches.push(format!("fixture {i}: metric check"));
        }
        let d = PointedSpace::new(s.clone(), 0).unwrap();
        let emb = ProperEmbedding::with_defaults(d, BlockIsoModel::exact()).unwrap();
        let n = s.len();
        let table: Vec<f64> = (0..n * n)
            .map(|x| sup_sum_distance(emb.image(x / n), emb.image(x % n)))
            .collect();
        let img = |a: usize, b: usize| table[a * n + b];

        let diam = s.diameter();
        let thresholds: Vec<f64> = (0..=20).map(|j| diam * j as f64 / 16.0).collect();
        let profile = moduli_profile(s, emb.images(), sup_sum_distance, &thresholds).unwrap();
        for (j, &t) in profile.thresholds.iter().enumerate() {
            checks += 1;
            let r_ok = match (profile.rho[j], brute_rho(s, &img, t)) {
                (Extent::Unbounded, None) => true,
                (Extent::Finite(x), Some(y)) => close(x, y, 1e-12),
                _ => false,
            };
            if !r_ok || !close(profile.omega[j], brute_omega(s, &img, t), 1e-12) {
                mismatches.push(format!("fixture {i}: moduli at {t}"));
            }
        }

        checks += 1;
        let dist_ok = match (distortion(s, emb.images(), sup_sum_distance).unwrap(), brute_distortion(s, &img)) {
            (Distortion::Finite(x), Some(y)) => close(x, y, 1e-12),
            (Distortion::Infinite, None) => true,
            _ => false,
        };
        if !dist_ok {
            mismatches.push(format!("fixture {i}: distortion"));
        }

        for radius in [diam / 8.0, diam / 3.0, diam / 2.0, 1.0] {
            for ball_radius in [diam / 2.0, f64::INFINITY] {
                checks += 1;
                let center = i % s.len();
                let net = greedy_maximal_net(s, Ball::new(center, ball_radius), radius, center).unwrap();
                if !net_is_separated_and_maximal(s, center, ball_radius, radius, net.members()) {
                    mismatches.push(format!("fixture {i}: net r={radius}"));
                }
            }
        }

        checks += 1;
        let report = verify_proper(&emb).unwrap();
        let c = emb.params().c_trunc();
        let (mut lo_min, mut hi_min) = (f64::INFINITY, f64::INFINITY);
        for a in 0..s.len() {
            for b in (a + 1)..s.len() {
                let e = img(a, b);
                lo_min = lo_min.min(e - gamma(s.dist(a, b)));
                hi_min = hi_min.min(9.0 * c * s.dist(a, b) - e);
            }
        }
        let lw = report.worst_lower_slack.unwrap().value;
        let uw = report.worst_upper_slack.unwrap().value;
        let rd = report.distortion.finite().unwrap_or(f64::INFINITY);
        let od = brute_distortion(s, &img).unwrap_or(f64::INFINITY);
        if !(close(lw, lo_min, 1e-12) && close(uw, hi_min, 1e-12) && close(rd, od, 1e-12)) {
            mismatches.push(format!("fixture {i}: report extremes"));
        }
    }
    let detail = if mismatches.is_empty() {
        format!("{} fixtures, {checks} comparisons agree", spaces.len())
    } else {
        format!("{} mismatches, first: {}", mismatches.len(), mismatches[0])
    };
    outcome(mismatches.is_empty(), detail)
}

fn structural_invariants() -> Outcome {
    let mut failures = Vec::new();
    let mut domains = proper_domains();
    domains.truncate(40);
    let mut boundary_points = 0usize;
    for (i, d) in domains.iter().enumerate() {
        let emb = ProperEmbedding::with_defaults(d.clone(), BlockIsoModel::seeded(i as u64, 0.5, 1.0).unwrap()).unwrap();
        let t0 = d.basepoint();
        if !emb.image(t0).is_empty() {
            failures.push(format!("domain {i}: f(t0) nonzero"));
        }
        for tier in &emb.hierarchy().tiers {
            for net in &tier.nets {
                let phi0 = frechet_coords(t0, net, d).unwrap();
                if phi0.iter().any(|&x| x != 0.0) {
                    failures.push(format!("domain {i}: phi(t0) nonzero"));
                }
                let host = tier.ball.points(d.space());
                let coords: Vec<Vec<f64>> = host.iter().map(|&t| frechet_coords(t, net, d).unwrap()).collect();
                for (x, &a) in host.iter().enumerate() {
                    for (y, &b) in host.iter().enumerate().skip(x + 1) {
                        let e = lp_norm(f64::INFINITY, coords[x].iter().zip(&coords[y]).map(|(u, v)| u - v));
                        if e > d.dist(a, b) * (1.0 + 1e-12) {
                            failures.push(format!("domain {i}: phi not 1-Lipschitz"));
                        }
                    }
                }
            }
        }
        for t in 0..d.len() {
            let r = d.norm(t);
            let Annulus::Shell { n, lambda } = annulus_index(r).unwrap() else { continue };
            if r == 2f64.powi(n) && n > emb.params().n_min {
                boundary_points += 1;
                let below = emb.embed_point_in_annulus(t, n - 1).unwrap();
                if below != *emb.image(t) {
                    failures.push(format!("domain {i}: dyadic boundary at {t}"));
                }
            }
            for (tier_n, coefficient) in [(n, lambda), (n + 1, 1.0 - lambda)] {
                let tier = emb.hierarchy().tier(tier_n).unwrap();
                for (k0, net) in tier.nets.iter().enumerate() {
                    let k = k0 as u32 + 1;
                    let id = ProperEmbedding::block_id(tier_n, k);
                    let block = project_block(emb.image(t), id);
                    let want: Vec<f64> = frechet_coords(t, net, d)
                        .unwrap()
                        .iter()
                        .map(|c| c * coefficient * weight(tier_n, k) * emb.params().iso.factor(id))
                        .collect();
                    let got = block.get(id).map(|b| b.to_vec()).unwrap_or_else(|| vec![0.0; want.len()]);
                    if got.len() != want.len() || got.iter().zip(&want).any(|(g, w)| (g - w).abs() > 1e-12 * (1.0 + w.abs())) {
                        failures.push(format!("domain {i}: block ({tier_n},{k}) of {t}"));
                    }
                }
            }
        }
    }
    let mut pair_ok = true;
    let mut seen = std::collections::HashSet::new();
    for n in -64i64..=64 {
        for k in 1i64..=64 {
            let id = pair_index(n, k).unwrap();
            pair_ok &= seen.insert(id) && unpair(id) == (n, k);
        }
    }
    if !pair_ok {
        failures.push("pairing not bijective".into());
    }
    let detail = if failures.is_empty() {
        format!("{} domains, {boundary_points} dyadic-boundary points, {} pair indices", domains.len(), seen.len())
    } else {
        format!("{} failures, first: {}", failures.len(), failures[0])
    };
    outcome(failures.is_empty(), detail)
}

fn constants() -> Outcome {
    let c = series_constant();
    let expected = PI / PI.tanh();
    let g = gamma_bound(128.0).unwrap();
    let mut worst_ratio = 0.0f64;
    for d in proper_domains().iter().take(40) {
        let params = ProperParams::for_space(d, BlockIsoModel::exact(), 4).unwrap();
        worst_ratio = worst_ratio.max(params.c_trunc() / c);
        let direct: f64 = (params.n_min..=params.n_max)
            .flat_map(|n| (1..=params.k_max_at(n).unwrap()).map(move |k| n as i64 - k as i64))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|m| weight(m as i32, 0))
            .sum();
        if !close(direct, params.c_trunc(), 1e-12) {
            worst_ratio = f64::INFINITY;
        }
    }
    let ok = (c - expected).abs() <= 1e-9 && (g - 128.0 / 1200.0).abs() <= 1e-12 && worst_ratio <= 1.0;
    outcome(
        ok,
        format!("C = {c:.12}, pi coth pi = {expected:.12}, gamma(128) = {g:.15}, max C_trunc/C = {worst_ratio:.6}"),
    )
}

fn write_input(dir: &Path, name: &str, data: &SpaceData) -> std::path::PathBuf {
    let path = dir.join(name);
    write_atomic(&path, to_json_string(&space_to_json(data, None)).as_bytes()).unwrap();
    path
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_input(dir.path(), "graph.json", &SpaceData::Matrix(graph_family(3).pop().unwrap()));
    let cloud = write_input(
        dir.path(),
        "cloud.json",
        &SpaceData::Cloud(cloud_family(8, Exponent::TWO, 64, 3, 99).pop().unwrap()),
    );
    let mut configs = Vec::new();
    for (mode, input) in [
        (Mode::EmbedProper, &graph),
        (Mode::EmbedProper, &cloud),
        (Mode::EmbedLp, &cloud),
        (Mode::Coarse, &cloud),
        (Mode::Moduli, &graph),
    ] {
        let mut cfg = RunConfig::new(mode);
        cfg.input = Some(input.clone());
        cfg.theta = ThetaMode::Random;
        cfg.seed = 17;
        cfg.epsilon = Some(0.5);
        cfg.map = MapKind::Proper;
        configs.push(cfg);
    }
    let render = |cfg: &RunConfig, threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| to_json_string(&run_report(cfg).unwrap().document))
    };
    let max_threads = std::thread::available_parallelism().map_or(16, |n| n.get()).max(16);
    let mut identical = 0usize;
    for cfg in &configs {
        let reference = render(cfg, 1);
        let runs = [render(cfg, 1), render(cfg, max_threads), render(cfg, max_threads)];
        identical += runs.iter().filter(|r| **r == reference).count();
    }
    let total = configs.len() * 3;
    outcome(
        identical == total,
        format!("{identical}/{total} reruns byte-identical (1 vs {max_threads} threads)"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 proper embedding envelope", proper_bounds),
        ("2 lp embedding envelope", lp_bounds),
        ("3 coarse composition envelope", coarse_bounds),
        ("4 oracle equivalence", oracle_equivalence),
        ("5 structural invariants", structural_invariants),
        ("6 constants", constants),
        ("7 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!("[{}] criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
