use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use hpppt_core::generate::{default_extent, generate_random, DEFAULT_MIN_SEPARATION, DEFAULT_P_MAX};
use hpppt_core::io::save_instance;
use hpppt_core::{Instance, Seed};

use crate::lists::parse_sizes;
use crate::GlobalArgs;

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Sizes to generate, e.g. `10..40:10` or `12,20`.
    #[arg(long)]
    pub sizes: String,
    /// Instances per size.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Upper bound of the sampled probabilities.
    #[arg(long, default_value_t = DEFAULT_P_MAX)]
    pub p_max: f64,
}

/// Seed of the `index`-th instance of size `n` under a base seed. Distinct
/// `(n, index)` pairs get independent streams.
pub fn sweep_seed(base: u64, n: usize, index: usize) -> Seed {
    Seed(base).derive(((n as u64) << 32) | index as u64)
}

pub fn sweep_name(n: usize, index: usize) -> String {
    format!("rand_n{n:03}_{index:02}")
}

/// One instance of a size sweep: uniform points in the default square for
/// its size, probabilities uniform below `p_max`.
pub fn sweep_instance(base: u64, n: usize, index: usize, p_max: f64) -> Result<Instance> {
    let inst = generate_random(
        n,
        default_extent(n),
        DEFAULT_MIN_SEPARATION,
        p_max,
        sweep_seed(base, n, index),
    )?;
    Ok(inst.with_name(sweep_name(n, index)))
}

pub fn run(g: &GlobalArgs, a: &GenArgs) -> Result<bool> {
    let sizes = parse_sizes(&a.sizes)?;
    if a.count == 0 {
        bail!("--count must be at least 1");
    }
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut stdout = std::io::stdout().lock();
    for &n in &sizes {
        for i in 0..a.count {
            let inst = sweep_instance(g.seed, n, i, a.p_max)?;
            let path = dir.join(format!("{}.hpt", sweep_name(n, i)));
            save_instance(&path, &inst)?;
            writeln!(stdout, "{}", path.display())?;
        }
    }
    Ok(true)
}
