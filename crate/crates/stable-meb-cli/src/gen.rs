//! `gen`: write a dataset in the binary format plus its JSON sidecar.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use stable_meb::io::{write_mebd_file, Sidecar};
use stable_meb::{generate, Family, InstanceSpec};

#[derive(Args, Debug)]
pub struct GenArgs {
    /// uniform-ball | gaussian | regular-simplex | planted-outliers
    #[arg(long)]
    pub family: String,
    /// Point count; defaults to d + 1 for the simplex family.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: usize,
    /// Outlier fraction for planted-outliers; gamma * n must be an integer.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Outlier planting distance in units of the inlier radius.
    #[arg(long, default_value_t = 10.0)]
    pub spread: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output dataset path; the sidecar lands at <out>.json.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn sidecar_path(dataset: &Path) -> PathBuf {
    let mut name = dataset.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn main(args: GenArgs) -> Result<()> {
    let Some(family) = Family::parse(&args.family) else {
        bail!("unknown family {:?}; expected uniform-ball, gaussian, regular-simplex or planted-outliers", args.family);
    };
    let n = match (args.n, family) {
        (Some(n), _) => n,
        (None, Family::RegularSimplex) => args.d + 1,
        (None, _) => bail!("--n is required for family {:?}", args.family),
    };
    let spec = InstanceSpec {
        family,
        n,
        d: args.d,
        gamma: args.gamma,
        spread: args.spread,
        seed: args.seed,
    };
    let (ps, ground_truth) = generate(&spec)?;
    write_mebd_file(&ps, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    let sidecar = Sidecar {
        spec,
        ground_truth_inliers: ground_truth,
        reference: None,
        inlier_reference: None,
    };
    let sc_path = sidecar_path(&args.out);
    std::fs::write(&sc_path, sidecar.to_json())
        .with_context(|| format!("writing {}", sc_path.display()))?;
    println!(
        "wrote {} ({} x {}) and sidecar {}",
        args.out.display(),
        ps.n(),
        ps.d(),
        sc_path.display()
    );
    Ok(())
}
