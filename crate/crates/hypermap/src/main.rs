//! `hypermap`: samplers, codecs and verification experiments for planar
//! stochastic hyperbolic triangulations.
//!
//! Every command prints its resolved configuration (as JSON, on stderr) before
//! doing any work, so that runs can be audited and reproduced. Data goes to
//! stdout or to `--out`. Exit codes: 0 on success, 1 when a verification
//! fails, 2 on usage or input errors.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use hypermap::experiments::{self, majority_pass, StatReport, DEFAULT_ALPHA};
use hypermap::model::{ModelParams, LAMBDA_C};
use hypermap::planarmap::{PlanarMap, Source};
use hypermap::samplers::{HeightCondition, ReverseVariant, Rng, Sampler, StripVariant};
use hypermap::skeleton::{self, SkeletonDecomposition, StripMap};

/// Default model when no parameterization is given: `h = 1/8`.
const DEFAULT_H: f64 = 0.125;

#[derive(Parser, Debug)]
#[command(
    name = "hypermap",
    version,
    about = "Planar stochastic hyperbolic triangulations: samplers, skeleton codec and experiments"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Model parameter λ ∈ (0, λ_c].
    #[arg(long, global = true, conflicts_with_all = ["h", "m"])]
    lambda: Option<f64>,
    /// Model parameter h ∈ (0, 1/4].
    #[arg(long, global = true, conflicts_with = "m")]
    h: Option<f64>,
    /// Model parameter m ∈ (0, 1] (mean of θ_λ).
    #[arg(long, global = true)]
    m: Option<f64>,
    /// Random seed (falls back to the config file, then `HYPERMAP_SEED`, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Radius or height.
    #[arg(long, global = true)]
    radius: Option<u32>,
    /// Number of Monte Carlo samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Worker threads for Monte Carlo replicas.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (or directory, for `encode`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Significance level for verification experiments.
    #[arg(long, global = true)]
    alpha: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the analytic tables w, c, θ, π and μ as CSV.
    Tables {
        #[arg(long, default_value_t = 20)]
        pmax: u64,
    },
    /// Sample a Boltzmann triangulation of the p-gon.
    SampleDisk {
        #[arg(long, default_value_t = 2)]
        perimeter: usize,
    },
    /// Explore the half-plane model with a number of peeling steps.
    SampleHalfplane {
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Sample the hull of radius `--radius`, in plane form.
    SampleHull {
        /// Write the cylinder form (root loop as bottom hole), as read by `encode`.
        #[arg(long)]
        cylinder: bool,
    },
    /// Sample the hull of height `--radius` of a strip.
    SampleStrip {
        #[arg(long, value_enum, default_value_t = StripKind::S1)]
        variant: StripKind,
    },
    /// Sample a tree or forest.
    SampleTree {
        #[arg(long, value_enum, default_value_t = TreeKind::Tau0)]
        kind: TreeKind,
    },
    /// Encode a cylinder (or strip) map file into a skeleton directory.
    Encode {
        /// Map file, or `-` for stdin.
        input: String,
        /// Encode as a strip of this height instead of a cylinder.
        #[arg(long)]
        strip_height: Option<usize>,
    },
    /// Decode a skeleton forest and its fillings into a map.
    Decode {
        /// Forest file, or a directory holding `skeleton.forest`.
        forest: PathBuf,
        /// Directory holding the fillings (defaults to the forest's directory).
        fills: Option<PathBuf>,
    },
    /// Leftmost-geodesic tree of a hull. With a map file, the geodesics start
    /// at every vertex of its first hole; otherwise a hull is sampled and the
    /// extracted tree is compared with its skeleton tree U.
    GeodesicTree { input: Option<String> },
    /// Run a verification experiment and print its JSON report.
    Verify {
        #[arg(value_enum)]
        experiment: Experiment,
        /// Number of seeds (`seed`, `seed + 1`, ...); passes on a 2/3 majority.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        /// Boundary perimeter for `disk`.
        #[arg(long, default_value_t = 2)]
        perimeter: usize,
        /// Scale parameter for `yule`.
        #[arg(long, default_value_t = 16)]
        n: u32,
        /// Walk length for `srw`.
        #[arg(long, default_value_t = 500)]
        steps: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StripKind {
    S0,
    S1,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TreeKind {
    /// Ball of radius r of the reverse tree τ⁰.
    Tau0,
    /// Ball of radius r of τ¹.
    Tau1,
    /// τ^{1,*} up to radius r.
    Tau1Star,
    /// The rotated skeleton ball B'_r(F_λ).
    Skeleton,
    /// The geodesic tree U up to height r.
    U,
    /// GW(θ) tree of height at most r.
    GwAtMost,
    /// GW(θ) tree of height exactly r.
    GwExact,
    /// GW(θ) tree of height exactly r, built along its spine.
    Spine,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Experiment {
    Disk,
    Offspring,
    Perimeter,
    Reverse,
    Yule,
    Srw,
    Strip,
}

/// Values read from `--config`.
#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    lambda: Option<f64>,
    h: Option<f64>,
    m: Option<f64>,
    seed: Option<u64>,
    radius: Option<u32>,
    samples: Option<usize>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    alpha: Option<f64>,
}

/// The fully resolved configuration of a run.
#[derive(Serialize, Debug)]
struct RunConfig {
    command: String,
    lambda: f64,
    h: f64,
    m: f64,
    radius: Option<u32>,
    samples: Option<usize>,
    seed: u64,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    alpha: f64,
    #[serde(skip)]
    params: ModelParams,
}

impl RunConfig {
    fn resolve(command: &str, args: &CommonArgs) -> Result<Self> {
        let file: ConfigFile = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ConfigFile::default(),
        };
        let given_flags = [args.lambda, args.h, args.m].iter().filter(|x| x.is_some()).count();
        let (lambda, h, m) = if given_flags > 0 {
            (args.lambda, args.h, args.m)
        } else {
            (file.lambda, file.h, file.m)
        };
        let params = match (lambda, h, m) {
            (Some(l), None, None) => ModelParams::from_lambda(l)?,
            (None, Some(h), None) => ModelParams::from_h(h)?,
            (None, None, Some(m)) => ModelParams::from_m(m)?,
            (None, None, None) => ModelParams::from_h(DEFAULT_H)?,
            _ => bail!("give exactly one of --lambda, --h, --m"),
        };
        let seed = match args.seed.or(file.seed) {
            Some(s) => s,
            None => match std::env::var("HYPERMAP_SEED") {
                Ok(v) => v
                    .trim()
                    .parse()
                    .with_context(|| format!("HYPERMAP_SEED=`{v}` is not an integer"))?,
                Err(_) => 0,
            },
        };
        let alpha = args.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA);
        if !(alpha > 0.0 && alpha < 1.0) {
            bail!("--alpha must lie in (0, 1)");
        }
        Ok(RunConfig {
            command: command.into(),
            lambda: params.lambda,
            h: params.h,
            m: params.m,
            radius: args.radius.or(file.radius),
            samples: args.samples.or(file.samples),
            seed,
            jobs: args.jobs.or(file.jobs),
            out: args.out.clone().or(file.out),
            alpha,
            params,
        })
    }

    fn radius(&self, default: u32) -> u32 {
        self.radius.unwrap_or(default)
    }

    fn samples(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Outcome of a successful command.
enum Outcome {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Tables { .. } => "tables",
        Command::SampleDisk { .. } => "sample-disk",
        Command::SampleHalfplane { .. } => "sample-halfplane",
        Command::SampleHull { .. } => "sample-hull",
        Command::SampleStrip { .. } => "sample-strip",
        Command::SampleTree { .. } => "sample-tree",
        Command::Encode { .. } => "encode",
        Command::Decode { .. } => "decode",
        Command::GeodesicTree { .. } => "geodesic-tree",
        Command::Verify { .. } => "verify",
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let cfg = RunConfig::resolve(command_name(&cli.command), &cli.common)?;
    eprintln!("{}", serde_json::to_string(&cfg)?);
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()?;
    }
    let mut sampler = Sampler::new(cfg.params);
    let mut rng = Rng::new(cfg.seed);
    match cli.command {
        Command::Tables { pmax } => cfg.emit(&tables(&cfg.params, pmax))?,
        Command::SampleDisk { perimeter } => {
            if perimeter < 1 {
                bail!("--perimeter must be at least 1");
            }
            cfg.emit(&sampler.sample_boltzmann_disk(&mut rng, perimeter)?.to_text())?
        }
        Command::SampleHalfplane { steps } => {
            cfg.emit(&sampler.sample_halfplane_ball(&mut rng, steps)?.map.to_text())?
        }
        Command::SampleHull { cylinder } => {
            let map = if cylinder {
                sampler.sample_hull_cylinder(&mut rng, cfg.radius(3))?
            } else {
                sampler.sample_hull(&mut rng, cfg.radius(3))?.map
            };
            cfg.emit(&map.to_text())?
        }
        Command::SampleStrip { variant } => {
            let variant = match variant {
                StripKind::S0 => StripVariant::S0,
                StripKind::S1 => StripVariant::S1,
            };
            let strip = sampler.sample_strip(&mut rng, variant, cfg.radius(3))?;
            cfg.emit(&format!("# strip height {}\n{}", strip.height, strip.map.to_text()))?
        }
        Command::SampleTree { kind } => cfg.emit(&sample_tree(&mut sampler, &mut rng, kind, cfg.radius(3))?)?,
        Command::Encode { input, strip_height } => {
            let map = PlanarMap::from_text(&strip_comments(&read_input(&input)?))?;
            let sk = match strip_height {
                Some(height) => skeleton::encode_strip(&StripMap { map, height })?,
                None => skeleton::encode(&map)?,
            };
            match &cfg.out {
                Some(dir) => sk.write_dir(dir)?,
                None => print!("{}", sk.forest.to_text()),
            }
        }
        Command::Decode { forest, fills } => {
            let sk = if forest.is_dir() {
                SkeletonDecomposition::read_dir(&forest)?
            } else {
                let dir = fills.unwrap_or_else(|| forest.parent().map(Path::to_path_buf).unwrap_or_default());
                SkeletonDecomposition::read_parts(&forest, &dir)?
            };
            let text = match sk.mode {
                skeleton::Mode::Cylinder => skeleton::decode(&sk)?.to_text(),
                skeleton::Mode::Strip => {
                    let strip = skeleton::decode_strip(&sk, usize::MAX)?;
                    format!("# strip height {}\n{}", strip.height, strip.map.to_text())
                }
            };
            cfg.emit(&text)?
        }
        Command::GeodesicTree { input } => return geodesic_tree(&cfg, &mut sampler, &mut rng, input.as_deref()),
        Command::Verify {
            experiment,
            seeds,
            perimeter,
            n,
            steps,
        } => {
            return verify(&cfg, experiment, seeds, perimeter, n, steps);
        }
    }
    Ok(Outcome::Ok)
}

fn read_input(input: &str) -> Result<String> {
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(input).with_context(|| format!("reading {input}"))
    }
}

/// Drop `#` comment lines (used for strip headers).
fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn tables(params: &ModelParams, pmax: u64) -> String {
    let mut out = format!(
        "# lambda={:.17e} h={:.17e} m={:.17e} b={:.17e} lambda_c={:.17e}\nindex,w,c,theta,pi,mu\n",
        params.lambda, params.h, params.m, params.b, LAMBDA_C
    );
    let pi = params.big_pi_series(pmax as usize + 1);
    for p in 0..=pmax {
        let (w, c, pi_p, mu) = if p == 0 {
            (String::new(), String::new(), String::new(), String::new())
        } else {
            (
                format!("{:.17e}", params.disk_weight(p)),
                format!("{:.17e}", params.cone_weight(p)),
                format!("{:.17e}", pi.coeff(p as usize)),
                format!("{:.17e}", params.mu(p)),
            )
        };
        out += &format!("{p},{w},{c},{:.17e},{pi_p},{mu}\n", params.theta(p));
    }
    out
}

fn sample_tree(sampler: &mut Sampler, rng: &mut Rng, kind: TreeKind, r: u32) -> Result<String> {
    Ok(match kind {
        TreeKind::Tau0 => sampler.sample_reverse_tree(rng, r, ReverseVariant::Tau0)?.to_text(),
        TreeKind::Tau1 => sampler.sample_reverse_tree(rng, r, ReverseVariant::Tau1)?.to_text(),
        TreeKind::Tau1Star => sampler.sample_tau1_star(rng, r)?.to_text(),
        TreeKind::Skeleton => sampler.sample_skeleton_f(rng, r)?.forest.to_text(),
        TreeKind::U => sampler.sample_skeleton_f(rng, r)?.u.to_text(),
        TreeKind::GwAtMost => {
            sampler
                .sample_gw_height_conditioned(rng, r, HeightCondition::AtMost)?
                .to_parens()
                + "\n"
        }
        TreeKind::GwExact => {
            sampler
                .sample_gw_height_conditioned(rng, r, HeightCondition::Exactly)?
                .to_parens()
                + "\n"
        }
        TreeKind::Spine => sampler.sample_spine_tree(rng, r)?.to_parens() + "\n",
    })
}

fn geodesic_tree(cfg: &RunConfig, sampler: &mut Sampler, rng: &mut Rng, input: Option<&str>) -> Result<Outcome> {
    match input {
        Some(path) => {
            let map = PlanarMap::from_text(&strip_comments(&read_input(path)?))?;
            let top = *map.holes().first().ok_or_else(|| anyhow!("the map has no hole"))?;
            let dist = map.distances(Source::Root)?;
            let sources = hypermap::geodesics::top_references(&map, top);
            let tree = hypermap::geodesics::geodesic_tree(&map, &dist, &sources)?;
            cfg.emit(&tree.to_text())?;
            Ok(Outcome::Ok)
        }
        None => {
            let hull = sampler.sample_hull(rng, cfg.radius(3))?;
            let extracted = hull.geodesic_tree()?;
            let same = extracted == hull.skeleton.u;
            cfg.emit(&format!(
                "u {}\nextracted {}\nisomorphic {same}\n",
                hull.skeleton.u.to_parens(),
                extracted.to_parens()
            ))?;
            Ok(if same { Outcome::Ok } else { Outcome::VerificationFailed })
        }
    }
}

fn verify(
    cfg: &RunConfig,
    experiment: Experiment,
    seeds: u64,
    perimeter: usize,
    n: u32,
    steps: usize,
) -> Result<Outcome> {
    if seeds == 0 {
        bail!("--seeds must be positive");
    }
    let params = &cfg.params;
    let mut reports: Vec<StatReport> = Vec::new();
    for k in 0..seeds {
        let seed = cfg.seed + k;
        let mut report = match experiment {
            Experiment::Disk => experiments::verify_disk_size_law(params, perimeter, cfg.samples(100_000), seed)?,
            Experiment::Offspring => experiments::verify_offspring(params, cfg.radius(5), cfg.samples(200), seed)?,
            Experiment::Perimeter => {
                experiments::verify_perimeter_growth(params, cfg.radius(30), cfg.samples(500), seed)?
            }
            Experiment::Reverse => {
                experiments::verify_reverse_marginals(params, cfg.radius(4), cfg.samples(100_000), seed)?
            }
            Experiment::Yule => experiments::verify_yule_scaling(n, cfg.samples(5000), seed)?,
            Experiment::Srw => experiments::simulate_srw(params, cfg.radius(5), steps, cfg.samples(200), seed, false)?,
            Experiment::Strip => experiments::strip_width_profile(params, cfg.radius(40), cfg.samples(300), seed)?,
        };
        report.threshold = cfg.alpha;
        for check in report.checks.iter_mut() {
            if let Some(p) = check.pvalue {
                check.pass = p > cfg.alpha;
            }
        }
        report.pass = !report.checks.is_empty() && report.checks.iter().all(|c| c.pass);
        eprintln!("{}", report.summary());
        reports.push(report);
    }
    let pass = majority_pass(&reports);
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])?
    } else {
        serde_json::to_string_pretty(&serde_json::json!({ "pass": pass, "reports": reports }))?
    };
    cfg.emit(&(json + "\n"))?;
    Ok(if pass { Outcome::Ok } else { Outcome::VerificationFailed })
}
