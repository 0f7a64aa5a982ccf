//! Command-line front end: point queries on a single instance plus the
//! batch verification suites with CSV/SVG reports.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use orlizono::body::{build_sandwich, santalo_point};
use orlizono::harness::instances::{
    gl_obtuse_batch, gl_perp_batch, parse_phi, perp_plus_reversed, random_batch, InstanceFile,
    InstanceKind, LabeledInstance,
};
use orlizono::harness::report::fmt_float;
use orlizono::harness::{
    pick_pivot, run, volume_product, volume_ratio, ExperimentConfig, RunSummary, SuiteRequest,
};
use orlizono::multisets::VectorMultiset;
use orlizono::norm::orlicz_norm;
use orlizono::phi::OrliczFunction;
use orlizono::shadow::orthogonalize;
use orlizono::zonotope::{l1_volume, OrliczZonotope};
use std::path::{Path, PathBuf};

/// Exit code for hard errors, outside the 0..=125 failure-count range.
const ERROR_EXIT: i32 = 126;
const FAILURE_CAP: usize = 125;

#[derive(Parser)]
#[command(
    name = "orlizono",
    version,
    about = "Asymmetric Orlicz zonotopes: volumes, polars, Santalo points, and inequality suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BodyOp {
    /// Sandwich bounds on the body volume.
    Volume,
    /// Bounds on the polar volume taken about the Santalo point.
    PolarVolume,
    /// The Santalo point itself, with the polar volume bounds.
    Santalo,
}

#[derive(Subcommand)]
enum Command {
    /// Orlicz norm of a nonnegative value list.
    Norm {
        #[arg(long)]
        phi: String,
        /// Comma-separated nonnegative values, for example 3,4.
        #[arg(long)]
        values: String,
    },
    /// Support function of the instance zonotope in one direction.
    Support {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated direction coordinates, for example 1,1.
        #[arg(long)]
        direction: String,
        #[arg(long, default_value = "id")]
        phi: String,
    },
    /// Zonotope volume: the exact determinant sum for phi = id, sandwich
    /// bounds otherwise.
    Volume {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "id")]
        phi: String,
        #[arg(long, default_value_t = 1024)]
        budget: usize,
    },
    /// Sandwich computations on the instance body.
    Body {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "id")]
        phi: String,
        #[arg(long, default_value_t = 1024)]
        budget: usize,
        #[arg(long, value_enum)]
        op: BodyOp,
    },
    /// Volume product P: polar volume about the Santalo point times the
    /// exact zonotope volume.
    Product {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "id")]
        phi: String,
        #[arg(long, default_value_t = 1024)]
        budget: usize,
    },
    /// Volume ratio R of the Orlicz body over the phi = id body.
    Ratio {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "id")]
        phi: String,
        #[arg(long, default_value_t = 1024)]
        budget: usize,
    },
    /// Deform the generators toward an orthogonal pivot and tabulate the
    /// exact volume along the way.
    Orthogonalize {
        #[arg(long)]
        instance: PathBuf,
        /// Generator index to move; defaults to the lowest workable one.
        #[arg(long)]
        pivot: Option<usize>,
        #[arg(long, default_value_t = 9)]
        grid: usize,
    },
    /// Volume-product lower-bound suite against the canonical basis.
    VerifyVp(SuiteArgs),
    /// Volume-ratio upper-bound suite against the canonical basis.
    VerifyVr(SuiteArgs),
    /// Parallel-generator merging monotonicity suite.
    VerifyMerge(SuiteArgs),
    /// Dissection of an obtuse zonotope into spanning n-subset pieces.
    VerifyDissection {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "power:2")]
        phi: String,
        #[arg(long, default_value_t = 1024)]
        budget: usize,
        /// Membership sample points.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value = "orlizono-out")]
        out: PathBuf,
    },
    /// Shadow-system suite: volume constancy, curve convexity, projection
    /// invariance, and the Lipschitz bound.
    VerifyShadow {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "power:2")]
        phi: String,
        #[arg(long, default_value_t = 1024)]
        budget: usize,
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long)]
        pivot: Option<usize>,
        /// Sample count for the projection and Lipschitz checks.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value = "orlizono-out")]
        out: PathBuf,
    },
    /// The default verification bundle: product, ratio, and merge batches
    /// plus one dissection and one shadow run.
    Report {
        #[arg(long, default_value = "power:2")]
        phi: String,
        #[arg(long, default_value_t = 1024)]
        budget: usize,
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random instances per batch.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value = "orlizono-out")]
        out: PathBuf,
    },
}

/// Shared flags for the batch suites that accept either an instance file or
/// a seeded random family.
#[derive(clap::Args)]
struct SuiteArgs {
    /// Instance file; mutually exclusive with --random.
    #[arg(long, conflicts_with = "random")]
    instance: Option<PathBuf>,
    /// Seeded family spec dim,generators,count,seed, for example 2,4,20,1.
    #[arg(long)]
    random: Option<String>,
    #[arg(long, default_value = "power:2")]
    phi: String,
    #[arg(long, default_value_t = 1024)]
    budget: usize,
    #[arg(long, default_value_t = 9)]
    grid: usize,
    #[arg(long, default_value = "orlizono-out")]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let code = match configure_threads().and_then(|()| dispatch(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ERROR_EXIT
        }
    };
    std::process::exit(code);
}

fn configure_threads() -> Result<()> {
    if let Ok(spec) = std::env::var("ORLIZONO_THREADS") {
        let threads: usize = spec
            .trim()
            .parse()
            .context("ORLIZONO_THREADS must be a positive integer")?;
        if threads == 0 {
            bail!("ORLIZONO_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .with_context(|| format!("unreadable number {c:?}"))
        })
        .collect()
}

fn load_instance(path: &Path) -> Result<LabeledInstance> {
    let multiset = InstanceFile::load(path)
        .and_then(|f| f.to_multiset())
        .with_context(|| format!("loading instance {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".to_owned());
    Ok(LabeledInstance::custom(&name, multiset))
}

fn parse_random_spec(spec: &str) -> Result<(usize, usize, usize, u64)> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!("--random wants dim,generators,count,seed and got {spec:?}");
    }
    Ok((
        parts[0].parse().context("unreadable dimension")?,
        parts[1].parse().context("unreadable generator count")?,
        parts[2].parse().context("unreadable instance count")?,
        parts[3].parse().context("unreadable seed")?,
    ))
}

/// Resolves the suite's instance source and the dimension it implies.
fn gather_instances(args: &SuiteArgs) -> Result<(Vec<LabeledInstance>, usize)> {
    match (&args.instance, &args.random) {
        (Some(path), None) => {
            let inst = load_instance(path)?;
            let dim = inst.multiset.dim();
            Ok((vec![inst], dim))
        }
        (None, Some(spec)) => {
            let (dim, generators, count, seed) = parse_random_spec(spec)?;
            let batch: Result<Vec<LabeledInstance>> = (0..count)
                .map(|i| {
                    let s = seed.wrapping_add(i as u64);
                    Ok(LabeledInstance {
                        name: format!("rand-d{dim}-m{generators}-s{s}"),
                        multiset: VectorMultiset::random(dim, generators, s)
                            .context("drawing a random spanning multiset")?,
                        kind: InstanceKind::Random,
                    })
                })
                .collect();
            Ok((batch?, dim))
        }
        _ => bail!("exactly one of --instance and --random is required"),
    }
}

/// Plain decimal with the requested significant digits where readable,
/// scientific notation for extreme magnitudes.
fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return fmt_float(x);
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..12).contains(&magnitude) {
        let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

fn print_bounds_row(lower: f64, upper: f64) {
    println!("lower,upper,mid,halfwidth");
    println!(
        "{},{},{},{}",
        fmt_float(lower),
        fmt_float(upper),
        fmt_float(0.5 * (lower + upper)),
        fmt_float(0.5 * (upper - lower))
    );
}

fn print_summary(summary: &RunSummary) {
    for v in &summary.verdicts {
        println!(
            "{} {} {} value {} margin {} ({})",
            v.status,
            v.claim,
            v.name,
            fmt_float(v.value),
            fmt_float(v.margin),
            v.note
        );
    }
    println!(
        "{} verdicts; {} failures; report at {}",
        summary.verdicts.len(),
        summary.failures,
        summary.csv_path.display()
    );
}

fn exit_code(summary: &RunSummary) -> i32 {
    summary.failures.min(FAILURE_CAP) as i32
}

fn run_suite(
    args: &SuiteArgs,
    build: impl FnOnce(Vec<LabeledInstance>, OrliczFunction) -> SuiteRequest,
) -> Result<i32> {
    let phi = parse_phi(&args.phi)?;
    let (instances, dimension) = gather_instances(args)?;
    let cfg = ExperimentConfig {
        dimension,
        budget: args.budget,
        grid: args.grid,
    };
    let summary = run(&cfg, &[build(instances, phi)], &args.out)?;
    print_summary(&summary);
    Ok(exit_code(&summary))
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Norm { phi, values } => {
            let phi = parse_phi(&phi)?;
            let values = parse_values(&values)?;
            let lambda = orlicz_norm(&values, &phi)?;
            println!("{}", format_sig(lambda, 12));
            Ok(0)
        }
        Command::Support {
            instance,
            direction,
            phi,
        } => {
            let inst = load_instance(&instance)?;
            let phi = parse_phi(&phi)?;
            let coords = parse_values(&direction)?;
            if coords.len() != inst.multiset.dim() {
                bail!(
                    "direction has {} coordinates but the instance lives in dimension {}",
                    coords.len(),
                    inst.multiset.dim()
                );
            }
            let u = DVector::from_row_slice(&coords);
            let zonotope = OrliczZonotope::new(inst.multiset, phi);
            println!("{}", format_sig(zonotope.support(&u), 12));
            Ok(0)
        }
        Command::Volume {
            instance,
            phi,
            budget,
        } => {
            let inst = load_instance(&instance)?;
            let phi = parse_phi(&phi)?;
            if phi.is_identity() {
                let l1 = l1_volume(&inst.multiset);
                let spread = if l1.exact { 0.0 } else { 0.01 * l1.value };
                print_bounds_row(l1.value - spread, l1.value + spread);
            } else {
                let zonotope = OrliczZonotope::new(inst.multiset, phi);
                let bounds = build_sandwich(&zonotope, budget)?.volume_bounds();
                print_bounds_row(bounds.lower, bounds.upper);
            }
            Ok(0)
        }
        Command::Body {
            instance,
            phi,
            budget,
            op,
        } => {
            let inst = load_instance(&instance)?;
            let phi = parse_phi(&phi)?;
            let dim = inst.multiset.dim();
            let zonotope = OrliczZonotope::new(inst.multiset, phi);
            match op {
                BodyOp::Volume => {
                    let bounds = build_sandwich(&zonotope, budget)?.volume_bounds();
                    print_bounds_row(bounds.lower, bounds.upper);
                }
                BodyOp::PolarVolume | BodyOp::Santalo => {
                    let result = santalo_point(&zonotope, budget)?;
                    let bounds = result.polar.volume_bounds();
                    let heads: Vec<String> = (1..=dim).map(|k| format!("s{k}")).collect();
                    let coords: Vec<String> =
                        result.point.iter().map(|c| fmt_float(*c)).collect();
                    println!("lower,upper,mid,halfwidth,{}", heads.join(","));
                    println!(
                        "{},{},{},{},{}",
                        fmt_float(bounds.lower),
                        fmt_float(bounds.upper),
                        fmt_float(bounds.mid()),
                        fmt_float(bounds.halfwidth()),
                        coords.join(",")
                    );
                }
            }
            Ok(0)
        }
        Command::Product {
            instance,
            phi,
            budget,
        } => {
            let inst = load_instance(&instance)?;
            let phi = parse_phi(&phi)?;
            let cfg = ExperimentConfig {
                dimension: inst.multiset.dim(),
                budget,
                ..Default::default()
            };
            let bounds = volume_product(&inst.multiset, &phi, &cfg)?;
            print_bounds_row(bounds.lower, bounds.upper);
            Ok(0)
        }
        Command::Ratio {
            instance,
            phi,
            budget,
        } => {
            let inst = load_instance(&instance)?;
            let phi = parse_phi(&phi)?;
            let cfg = ExperimentConfig {
                dimension: inst.multiset.dim(),
                budget,
                ..Default::default()
            };
            let bounds = volume_ratio(&inst.multiset, &phi, &cfg)?;
            print_bounds_row(bounds.lower, bounds.upper);
            Ok(0)
        }
        Command::Orthogonalize {
            instance,
            pivot,
            grid,
        } => {
            let inst = load_instance(&instance)?;
            let pivot = match pivot {
                Some(p) => p,
                None => pick_pivot(&inst.multiset)?,
            };
            let system = orthogonalize(&inst.multiset, pivot)?;
            println!("t,vectors,volume");
            for t in system.grid(grid) {
                let deformed = system.at(t)?;
                let vectors: Vec<String> = deformed
                    .expanded()
                    .iter()
                    .map(|v| {
                        v.iter()
                            .map(|c| fmt_float(*c))
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                println!(
                    "{},{},{}",
                    fmt_float(t),
                    vectors.join(";"),
                    fmt_float(l1_volume(&deformed).value)
                );
            }
            Ok(0)
        }
        Command::VerifyVp(args) => run_suite(&args, |instances, phi| SuiteRequest::VolumeProduct {
            instances,
            phi,
        }),
        Command::VerifyVr(args) => run_suite(&args, |instances, phi| SuiteRequest::VolumeRatio {
            instances,
            phi,
        }),
        Command::VerifyMerge(args) => {
            run_suite(&args, |instances, phi| SuiteRequest::Merge { instances, phi })
        }
        Command::VerifyDissection {
            instance,
            phi,
            budget,
            samples,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let phi = parse_phi(&phi)?;
            let cfg = ExperimentConfig {
                dimension: inst.multiset.dim(),
                budget,
                ..Default::default()
            };
            let request = SuiteRequest::Dissection {
                instances: vec![inst],
                phi,
                samples,
            };
            let summary = run(&cfg, &[request], &out)?;
            print_summary(&summary);
            Ok(exit_code(&summary))
        }
        Command::VerifyShadow {
            instance,
            phi,
            budget,
            grid,
            pivot,
            samples,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let phi = parse_phi(&phi)?;
            let cfg = ExperimentConfig {
                dimension: inst.multiset.dim(),
                budget,
                grid,
            };
            let request = SuiteRequest::Shadow {
                instances: vec![inst],
                phi,
                pivot,
                samples,
            };
            let summary = run(&cfg, &[request], &out)?;
            print_summary(&summary);
            Ok(exit_code(&summary))
        }
        Command::Report {
            phi,
            budget,
            grid,
            seed,
            count,
            out,
        } => {
            let phi = parse_phi(&phi)?;
            let cfg = ExperimentConfig {
                dimension: 2,
                budget,
                grid,
            };
            let mut product_batch = random_batch(2, count, seed);
            product_batch.extend(gl_perp_batch(2, 3, seed));
            product_batch.push(perp_plus_reversed(2, 0.7));
            let mut ratio_batch = random_batch(2, count, seed.wrapping_add(1000));
            ratio_batch.extend(gl_obtuse_batch(2, 3, seed));
            let merge_batch = vec![
                LabeledInstance::custom(
                    "doubled-axis",
                    VectorMultiset::from_rows(
                        2,
                        &[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
                    )
                    .expect("static rows are valid"),
                ),
                random_batch(2, 1, seed.wrapping_add(2000)).remove(0),
            ];
            let obtuse_l = LabeledInstance::custom(
                "obtuse-l",
                VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]])
                    .expect("static rows are valid"),
            );
            let skew_triple = LabeledInstance::custom(
                "skew-triple",
                VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]])
                    .expect("static rows are valid"),
            );
            let requests = vec![
                SuiteRequest::VolumeProduct {
                    instances: product_batch,
                    phi: phi.clone(),
                },
                SuiteRequest::VolumeRatio {
                    instances: ratio_batch,
                    phi: phi.clone(),
                },
                SuiteRequest::Merge {
                    instances: merge_batch,
                    phi: phi.clone(),
                },
                SuiteRequest::Dissection {
                    instances: vec![obtuse_l],
                    phi: phi.clone(),
                    samples: 10_000,
                },
                SuiteRequest::Shadow {
                    instances: vec![skew_triple],
                    phi,
                    pivot: None,
                    samples: 1000,
                },
            ];
            let summary = run(&cfg, &requests, &out)?;
            print_summary(&summary);
            Ok(exit_code(&summary))
        }
    }
}
