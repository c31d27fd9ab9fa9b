//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with `cargo test --test acceptance`. A few criteria ask for hulls of
//! radius 8 to 40, whose size grows like `m^{-r}` (for `h = 1/8`, up to 10⁶
//! darts at `r = 6`, 5·10⁶ at `r = 7`, and mostly beyond the 10⁷ cap at
//! `r = 8`). Those parts run at reduced
//! radius by default; the full-parameter versions run with
//! `cargo test --test acceptance -- --include-ignored` (or `--ignored`) and are
//! expected to stop at the sampler's size cap.

use std::collections::HashSet;
use std::time::Instant;

use hypermap::experiments::{self, majority_pass, StatReport};
use hypermap::model::{count_triangulations, ModelParams, LAMBDA_C};
use hypermap::planarmap::{brute_force_count, PlanarMap};
use hypermap::samplers::{enumerate_disks, Rng, Sampler, SamplerError};
use hypermap::skeleton::{self, Mode, ReverseForest, SkeletonDecomposition};
use num_bigint::BigUint;

const SEEDS: [u64; 3] = [11, 22, 33];

/// Result of one criterion.
struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn h8() -> ModelParams {
    ModelParams::from_h(0.125).unwrap()
}

/// Run an experiment on the three seeds and require a 2/3 majority.
fn seeded<F>(f: F) -> Outcome
where
    F: Fn(u64) -> Result<StatReport, SamplerError>,
{
    let mut reports = Vec::new();
    for seed in SEEDS {
        match f(seed) {
            Ok(r) => reports.push(r),
            Err(e) => return Outcome::new(false, format!("seed {seed}: {e}")),
        }
    }
    let detail = reports.iter().map(StatReport::summary).collect::<Vec<_>>().join(" | ");
    Outcome::new(majority_pass(&reports), detail)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ------------------------------------------------------------ criterion 1

fn analytic_identities() -> Outcome {
    let mut failures = Vec::new();
    let grid = [0.01, 0.05, 0.125, 0.2, 0.24, 0.249, 0.25];
    for &h in &grid {
        let p = ModelParams::from_h(h).unwrap();
        if !close(p.g(1.0), 1.0, 1e-14) {
            failures.push(format!("g(1) at h={h}"));
        }
        if !close(p.theta(0), 1.0 - p.h, 1e-15) || !close(p.theta(1), p.h * (1.0 - 2.0 * p.h), 1e-15) {
            failures.push(format!("θ(0), θ(1) at h={h}"));
        }
        for &x in &[0.0, 0.3, 0.7, 0.95] {
            let mut y = x;
            for r in 1..=50u64 {
                y = p.g(y);
                if !close(p.g_iter(r, x), y, 1e-10) {
                    failures.push(format!("g_iter({r}, {x}) at h={h}"));
                    break;
                }
            }
        }
        if !p.is_critical {
            if !close(p.b, -0.5 * p.m.ln(), 1e-12) {
                failures.push(format!("b at h={h}"));
            }
            let closed = (1.0 - (1.0 - 4.0 * p.h).sqrt()) / (2.0 * p.h);
            if !close(p.pi_at_theta0(), closed, 1e-12) {
                failures.push(format!("Π(θ(0)) at h={h}"));
            }
        }
        let mut s = Sampler::new(p);
        for q in 1..=30 {
            let total: f64 = s.peel_probabilities(q).iter().sum();
            if !close(total, 1.0, 1e-10) {
                failures.push(format!("peeling sum p={q} at h={h}"));
            }
        }
        let lhs = p.block_identity_lhs(30);
        let rhs = p.block_identity_series(31);
        for (k, &l) in lhs.iter().enumerate() {
            if !close(l, rhs.coeff(k), 1e-10 * l.abs().max(1.0)) {
                failures.push(format!("block identity coefficient {k} at h={h}"));
                break;
            }
        }
    }
    let critical = ModelParams::critical();
    if !close(critical.pi_at_theta0(), 2.0, 1e-12) {
        failures.push("Π(θ(0)) at λ_c".into());
    }
    if !close(LAMBDA_C, 1.0 / (12.0 * 3f64.sqrt()), 1e-17) {
        failures.push("λ_c".into());
    }
    let pass = failures.is_empty();
    Outcome::new(
        pass,
        if pass {
            format!("{} parameter values", grid.len())
        } else {
            failures.join(", ")
        },
    )
}

// ------------------------------------------------------------ criterion 2

fn enumeration_oracle() -> Outcome {
    let mut rows = Vec::new();
    let mut pass = true;
    for n in 0..=2u64 {
        for p in 1..=3u64 {
            let exact = count_triangulations(n, p);
            let brute = BigUint::from(brute_force_count(n, p));
            pass &= exact == brute;
            rows.push(format!("T({n},{p})={exact}"));
        }
    }
    pass &= count_triangulations(0, 2) == BigUint::from(1u32)
        && count_triangulations(1, 1) == BigUint::from(1u32)
        && count_triangulations(2, 1) == BigUint::from(4u32);
    Outcome::new(pass, rows.join(" "))
}

// ------------------------------------------------------------ criterion 3

/// Compositions of `total` into `parts` nonnegative parts.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every height-1 cylinder skeleton with `p + q ≤ 6` whose fillings have at
/// most `max_inner` inner vertices in total.
fn height_one_skeletons(max_inner: usize) -> Vec<SkeletonDecomposition> {
    let mut out = Vec::new();
    for q in 1..=5usize {
        for p in 1..=(6 - q) {
            for counts in compositions(p as u32, q) {
                for d in 0..p {
                    let Ok(forest) = ReverseForest::new(vec![vec![0; p], counts.clone()], d) else {
                        continue;
                    };
                    if !forest.is_admissible() {
                        continue;
                    }
                    let mut partial: Vec<(Vec<PlanarMap>, usize)> = vec![(Vec::new(), 0)];
                    for &c in &counts {
                        let mut next = Vec::new();
                        for (row, used) in &partial {
                            for n in 0..=max_inner - used {
                                for disk in enumerate_disks(c as usize + 2, n) {
                                    let mut row = row.clone();
                                    row.push(disk);
                                    next.push((row, used + n));
                                }
                            }
                        }
                        partial = next;
                    }
                    for (row, _) in partial {
                        out.push(SkeletonDecomposition {
                            forest: forest.clone(),
                            mode: Mode::Cylinder,
                            fillings: vec![Vec::new(), row],
                        });
                    }
                }
            }
        }
    }
    out
}

fn exhaustive_codec() -> Result<String, String> {
    let skeletons = height_one_skeletons(2);
    let mut seen = HashSet::new();
    for sk in &skeletons {
        sk.check().map_err(|e| e.to_string())?;
        let map = skeleton::decode(sk).map_err(|e| e.to_string())?;
        if !map.validate().passed() {
            return Err(format!("invalid map from {:?}", sk.forest));
        }
        let back = skeleton::encode(&map).map_err(|e| e.to_string())?;
        if &back != sk {
            return Err(format!("encode∘decode differs on {:?}", sk.forest));
        }
        let again = skeleton::decode(&back).map_err(|e| e.to_string())?;
        if again != map {
            return Err(format!("decode∘encode differs on {:?}", sk.forest));
        }
        if !seen.insert(map.canonicalize()) {
            return Err(format!("two skeletons decode to the same cylinder ({:?})", sk.forest));
        }
    }
    Ok(format!(
        "{} height-1 cylinders (p+q ≤ 6, ≤ 2 inner filling vertices)",
        skeletons.len()
    ))
}

fn sampled_codec(count: usize, r_max: u32) -> Result<String, String> {
    let mut sampler = Sampler::new(h8());
    let mut rng = Rng::new(2024);
    let mut darts = 0usize;
    for i in 0..count {
        let r = 1 + (i as u32 % r_max);
        let hull = sampler.sample_hull(&mut rng, r).map_err(|e| format!("r={r}: {e}"))?;
        let cyl = hull.map.root_transform_inverse().map_err(|e| e.to_string())?;
        let sk = skeleton::encode(&cyl).map_err(|e| e.to_string())?;
        if sk.forest != hull.skeleton.forest {
            return Err(format!("hull {i} (r={r}): encoded forest differs from the sampled one"));
        }
        let decoded = skeleton::decode(&sk).map_err(|e| e.to_string())?;
        if decoded.canonicalize() != cyl.canonicalize() {
            return Err(format!("hull {i} (r={r}): decode∘encode is not the identity"));
        }
        if skeleton::encode(&decoded).map_err(|e| e.to_string())? != sk {
            return Err(format!("hull {i} (r={r}): encode∘decode is not the identity"));
        }
        darts += cyl.num_darts();
    }
    Ok(format!("{count} hulls, r cycling 1..={r_max}, {darts} darts in total"))
}

fn codec_bijection(full: bool) -> Outcome {
    let a = exhaustive_codec();
    let r_max = if full { 8 } else { 5 };
    let b = sampled_codec(1000, r_max);
    let tag = if full { "" } else { " [reduced radius]" };
    match (a, b) {
        (Ok(a), Ok(b)) => Outcome::new(true, format!("(a) {a}; (b) {b}{tag}")),
        (a, b) => Outcome::new(
            false,
            format!("(a) {}; (b) {}{tag}", a.unwrap_or_else(|e| e), b.unwrap_or_else(|e| e)),
        ),
    }
}

// ------------------------------------------------------------ criterion 4

fn geodesic_correspondence(r: u32) -> Outcome {
    let mut sampler = Sampler::new(h8());
    let mut rng = Rng::new(404);
    let mut matched = 0;
    for i in 0..200 {
        let hull = match sampler.sample_hull(&mut rng, r) {
            Ok(h) => h,
            Err(e) => return Outcome::new(false, format!("hull {i}: {e}")),
        };
        match hull.geodesic_tree() {
            Ok(t) if t == hull.skeleton.u => matched += 1,
            Ok(_) => {}
            Err(e) => return Outcome::new(false, format!("hull {i}: {e}")),
        }
    }
    Outcome::new(matched == 200, format!("r={r}: {matched}/200 geodesic trees equal U"))
}

// ------------------------------------------------------------ criteria 5-10

fn disk_size_law() -> Outcome {
    let params = ModelParams::from_lambda(LAMBDA_C / 2.0).unwrap();
    seeded(|seed| experiments::verify_disk_size_law(&params, 2, 100_000, seed))
}

fn offspring_law(r: u32, samples: usize) -> Outcome {
    seeded(|seed| experiments::verify_offspring(&h8(), r, samples, seed))
}

fn reverse_marginals() -> Outcome {
    let hyperbolic = seeded(|seed| experiments::verify_reverse_marginals(&h8(), 4, 100_000, seed));
    let critical = ModelParams::critical();
    let exact = close(critical.prob_y0_one(), 0.375, 1e-12);
    let at_critical = seeded(|seed| experiments::verify_reverse_marginals(&critical, 1, 100_000, seed));
    Outcome::new(
        hyperbolic.pass && at_critical.pass && exact,
        format!(
            "h=1/8: {} || λ_c (P(Y(0)=1) = {}): {}",
            hyperbolic.detail,
            critical.prob_y0_one(),
            at_critical.detail
        ),
    )
}

fn perimeter_growth() -> Outcome {
    // Ratios E[P_{r+1}]/E[P_r] for r ∈ [15, 30].
    seeded(|seed| experiments::verify_perimeter_growth(&h8(), 31, 500, seed))
}

fn yule_scaling() -> Outcome {
    seeded(|seed| experiments::verify_yule_scaling(16, 5000, seed))
}

fn hyperbolicity(srw_radius: u32) -> Outcome {
    let srw = seeded(|seed| experiments::simulate_srw(&h8(), srw_radius, 500, 200, seed, false));
    let strip = seeded(|seed| experiments::strip_width_profile(&h8(), 40, 300, seed));
    Outcome::new(
        srw.pass && strip.pass,
        format!("srw r={srw_radius}: {} || strips r=40: {}", srw.detail, strip.detail),
    )
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let full = args.iter().any(|a| a == "--include-ignored" || a == "--ignored");
    // `cargo test` passes `--list` when enumerating tests; there is nothing to list.
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("analytic identities", Box::new(analytic_identities)),
        ("enumeration oracle", Box::new(enumeration_oracle)),
        ("codec bijection", Box::new(move || codec_bijection(full))),
        (
            "geodesic correspondence",
            Box::new(move || geodesic_correspondence(if full { 10 } else { 5 })),
        ),
        ("Boltzmann disk size law", Box::new(disk_size_law)),
        (
            "offspring law of the geodesic tree",
            Box::new(move || {
                if full {
                    offspring_law(12, 2000)
                } else {
                    offspring_law(5, 500)
                }
            }),
        ),
        ("reverse-process marginals", Box::new(reverse_marginals)),
        ("perimeter growth", Box::new(perimeter_growth)),
        ("Yule scaling", Box::new(yule_scaling)),
        (
            "qualitative hyperbolicity",
            Box::new(move || hyperbolicity(if full { 40 } else { 5 })),
        ),
    ];
    let reduced = [3, 4, 6, 10];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        let start = Instant::now();
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        let scale = if !full && reduced.contains(&number) {
            " (reduced parameters)"
        } else {
            ""
        };
        println!(
            "criterion {number:2} {status} {name}{scale} [{:.1}s]: {}",
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
