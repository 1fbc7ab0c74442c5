//! `run` and `sweep`: execute algorithm trials against a dataset, one JSON
//! report line per trial, in trial-index order regardless of worker
//! scheduling.

use std::io::Write;
use std::path::PathBuf;
use std::sync::mpsc;

use anyhow::{bail, Context, Result};
use clap::Args;
use stable_meb::io::{read_mebd_file, CachedReference, Sidecar};
use stable_meb::stability::outlier_count;
use stable_meb::{
    alg1_meb, alg2_meb, brute_meb_outliers, coreset_trial, exact_meb_small, meb_outliers_sublinear,
    quick_meb, reference_meb, AlgoConfig, OutlierConfig, PointSet, RngStream, REFERENCE_EPSILON,
};

use crate::{thread_cap, CfgArgs};

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Dataset file; alternatively give an inline instance via --family.
    #[arg(long, conflicts_with = "family")]
    pub dataset: Option<PathBuf>,
    /// Inline instance family (uniform-ball | gaussian | regular-simplex |
    /// planted-outliers), generated in memory instead of reading a file.
    #[arg(long, requires = "d")]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Outlier planting distance for an inline planted-outliers instance.
    #[arg(long, default_value_t = 10.0)]
    pub spread: f64,
    /// Generator seed for an inline instance.
    #[arg(long, default_value_t = 0)]
    pub instance_seed: u64,
    /// coreset | alg1 | quick | alg2 | outlier
    #[arg(long)]
    pub algorithm: String,
    #[command(flatten)]
    pub cfg: CfgArgs,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Base seed; trial i runs on stream id base-seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// none | coreset-highprec | ground-truth | brute-force
    #[arg(long, default_value = "none")]
    pub reference: String,
    /// Report destination; defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub base: RunArgs,
    /// Comma-separated epsilon values overriding --epsilon.
    #[arg(long)]
    pub epsilons: Option<String>,
    /// Comma-separated beta values overriding --beta.
    #[arg(long)]
    pub betas: Option<String>,
    /// Comma-separated gamma values overriding --gamma.
    #[arg(long)]
    pub gammas: Option<String>,
}

fn parse_list(text: &Option<String>, fallback: f64) -> Result<Vec<f64>> {
    match text {
        None => Ok(vec![fallback]),
        Some(t) => t
            .split(',')
            .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad list entry {x:?}")))
            .collect(),
    }
}

fn algo_config(cfg: &CfgArgs) -> AlgoConfig {
    AlgoConfig {
        epsilon: cfg.epsilon,
        beta: cfg.beta,
        eta: cfg.eta,
        eta0: cfg.eta0,
        s: cfg.s,
        c_net: cfg.c_net,
        c_hit: cfg.c_hit,
    }
}

fn outlier_config(cfg: &CfgArgs) -> OutlierConfig {
    OutlierConfig {
        gamma: cfg.gamma,
        beta: cfg.beta,
        epsilon: cfg.epsilon,
        eta: cfg.eta,
        c_out: cfg.c_out,
    }
}

struct LoadedDataset {
    ps: PointSet,
    sidecar: Option<Sidecar>,
    /// Present when the sidecar lives on disk and cache updates persist.
    path: Option<PathBuf>,
}

fn load_dataset(args: &RunArgs) -> Result<LoadedDataset> {
    if let Some(path) = &args.dataset {
        let ps = read_mebd_file(path).with_context(|| format!("reading {}", path.display()))?;
        let sc_path = crate::gen::sidecar_path(path);
        let sidecar = match std::fs::read_to_string(&sc_path) {
            Ok(text) => Some(
                Sidecar::from_json(&text)
                    .with_context(|| format!("parsing sidecar {}", sc_path.display()))?,
            ),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => return Err(e).context(format!("reading sidecar {}", sc_path.display())),
        };
        return Ok(LoadedDataset { ps, sidecar, path: Some(path.clone()) });
    }
    let Some(name) = &args.family else {
        bail!("either --dataset or an inline instance (--family --n --d) is required");
    };
    let Some(family) = stable_meb::Family::parse(name) else {
        bail!("unknown family {name:?}");
    };
    let n = match (args.n, family) {
        (Some(n), _) => n,
        (None, stable_meb::Family::RegularSimplex) => args.d.unwrap() + 1,
        (None, _) => bail!("--n is required for family {name:?}"),
    };
    let spec = stable_meb::InstanceSpec {
        family,
        n,
        d: args.d.unwrap(),
        gamma: if family == stable_meb::Family::PlantedOutliers { args.cfg.gamma } else { 0.0 },
        spread: args.spread,
        seed: args.instance_seed,
    };
    let (ps, ground_truth) = stable_meb::generate(&spec)?;
    let sidecar = Sidecar {
        spec,
        ground_truth_inliers: ground_truth,
        reference: None,
        inlier_reference: None,
    };
    Ok(LoadedDataset { ps, sidecar: Some(sidecar), path: None })
}

fn persist_sidecar(data: &LoadedDataset) -> Result<()> {
    let (Some(path), Some(sidecar)) = (&data.path, &data.sidecar) else {
        return Ok(()); // in-memory instance: nothing to persist
    };
    let sc_path = crate::gen::sidecar_path(path);
    std::fs::write(&sc_path, sidecar.to_json())
        .with_context(|| format!("updating sidecar {}", sc_path.display()))
}

/// Resolves the reference radius for ratio reporting, caching expensive
/// references in the sidecar so sweeps do not recompute them.
fn resolve_reference(args: &RunArgs, data: &mut LoadedDataset) -> Result<Option<f64>> {
    match args.reference.as_str() {
        "none" => Ok(None),
        "coreset-highprec" => {
            if let Some(sc) = data.sidecar.as_ref() {
                if let Some(cached) = &sc.reference {
                    return Ok(Some(cached.radius));
                }
            }
            let ball = reference_meb(&data.ps, REFERENCE_EPSILON);
            if let Some(sc) = data.sidecar.as_mut() {
                sc.reference = Some(CachedReference {
                    radius: ball.radius,
                    center: ball.center.clone(),
                    epsilon: REFERENCE_EPSILON,
                });
            }
            persist_sidecar(data)?;
            Ok(Some(ball.radius))
        }
        "ground-truth" => {
            let Some(sc) = data.sidecar.as_mut() else {
                bail!("ground-truth reference needs the dataset sidecar");
            };
            if let Some(cached) = &sc.inlier_reference {
                return Ok(Some(cached.radius));
            }
            let Some(inliers) = sc.ground_truth_inliers.clone() else {
                bail!("sidecar has no ground-truth inlier set");
            };
            let ball = reference_meb(&data.ps.subset(&inliers), REFERENCE_EPSILON);
            sc.inlier_reference = Some(CachedReference {
                radius: ball.radius,
                center: ball.center.clone(),
                epsilon: REFERENCE_EPSILON,
            });
            persist_sidecar(data)?;
            Ok(Some(ball.radius))
        }
        "brute-force" => {
            if data.ps.n() > 16 || data.ps.d() > 8 {
                bail!(
                    "brute-force reference is limited to n <= 16, d <= 8 (dataset is {} x {})",
                    data.ps.n(),
                    data.ps.d()
                );
            }
            let radius = if args.algorithm == "outlier" {
                let k = outlier_count(args.cfg.gamma, data.ps.n())?;
                brute_meb_outliers(&data.ps, k).0.radius
            } else {
                exact_meb_small(&data.ps).radius
            };
            Ok(Some(radius))
        }
        other => bail!("unknown reference mode {other:?}"),
    }
}

/// One trial; returns the finished JSON line.
fn run_trial(
    ps: &PointSet,
    algorithm: &str,
    cfg: &CfgArgs,
    stream: RngStream,
    reference: Option<f64>,
) -> Result<String> {
    let report = match algorithm {
        "coreset" => coreset_trial(ps, &algo_config(cfg), stream)?.1,
        "alg1" => alg1_meb(ps, &algo_config(cfg), stream)?.1,
        "quick" => quick_meb(ps, &algo_config(cfg), stream)?.1,
        "alg2" => alg2_meb(ps, &algo_config(cfg), stream)?.1,
        "outlier" => meb_outliers_sublinear(ps, &outlier_config(cfg), stream)?.1,
        other => bail!("unknown algorithm {other:?}"),
    };
    let report = match reference {
        Some(r) => report.with_reference(r),
        None => report,
    };
    Ok(report.to_json_line())
}

/// Executes trials on a worker pool, collecting lines in trial-index order.
fn run_trials(
    ps: &PointSet,
    algorithm: &str,
    cfg: &CfgArgs,
    base_seed: u64,
    first_stream: u64,
    trials: usize,
    reference: Option<f64>,
) -> Result<Vec<String>> {
    let threads = thread_cap(trials);
    let mut lines: Vec<Option<Result<String>>> = Vec::new();
    lines.resize_with(trials, || None);
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel();
        for worker in 0..threads {
            let tx = tx.clone();
            scope.spawn(move || {
                let mut i = worker;
                while i < trials {
                    let stream = RngStream::new(base_seed, first_stream.wrapping_add(i as u64));
                    let line = run_trial(ps, algorithm, cfg, stream, reference);
                    if tx.send((i, line)).is_err() {
                        return;
                    }
                    i += threads;
                }
            });
        }
        drop(tx);
        for (i, line) in rx {
            lines[i] = Some(line);
        }
    });
    lines.into_iter().map(|slot| slot.expect("worker filled every slot")).collect()
}

fn emit(lines: &[String], out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            for line in lines {
                writeln!(file, "{line}")?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for line in lines {
                if let Err(e) = writeln!(lock, "{line}") {
                    if e.kind() == std::io::ErrorKind::BrokenPipe {
                        return Ok(());
                    }
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

pub fn run_main(args: RunArgs) -> Result<()> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let mut data = load_dataset(&args)?;
    let reference = resolve_reference(&args, &mut data)?;
    let lines = run_trials(
        &data.ps,
        &args.algorithm,
        &args.cfg,
        args.seed,
        args.seed,
        args.trials,
        reference,
    )?;
    emit(&lines, &args.out)
}

pub fn sweep_main(args: SweepArgs) -> Result<()> {
    if args.base.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let epsilons = parse_list(&args.epsilons, args.base.cfg.epsilon)?;
    let betas = parse_list(&args.betas, args.base.cfg.beta)?;
    let gammas = parse_list(&args.gammas, args.base.cfg.gamma)?;
    let mut data = load_dataset(&args.base)?;
    let reference = resolve_reference(&args.base, &mut data)?;
    let mut all = Vec::new();
    let mut stream = args.base.seed;
    for &epsilon in &epsilons {
        for &beta in &betas {
            for &gamma in &gammas {
                let cfg = CfgArgs { epsilon, beta, gamma, ..args.base.cfg.clone() };
                let lines = run_trials(
                    &data.ps,
                    &args.base.algorithm,
                    &cfg,
                    args.base.seed,
                    stream,
                    args.base.trials,
                    reference,
                )?;
                stream = stream.wrapping_add(args.base.trials as u64);
                all.extend(lines);
            }
        }
    }
    emit(&all, &args.base.out)
}
