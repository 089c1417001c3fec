use std::path::PathBuf;

use clap::Args;
use formbench::data::{save_csv, TaskKind};
use formbench::synth::{generate, SynthConfig, GENERATOR_VERSION};
use formbench::Result;

use super::{ensure_dir, parse_task, task_name, write_json};

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Dosage form to mimic: ofdf or srmt
    #[arg(long, value_parser = parse_task)]
    pub task: TaskKind,
    /// Total record count (default: corpus-sized for the task)
    #[arg(long)]
    pub records: Option<usize>,
    /// Number of API groups (default: corpus-sized for the task)
    #[arg(long)]
    pub groups: Option<usize>,
    /// Explicit comma-separated group sizes, overriding --records/--groups
    #[arg(long, value_delimiter = ',')]
    pub group_sizes: Option<Vec<usize>>,
    /// Target noise (seconds for ofdf, percentage points for srmt)
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long, env = "FORMBENCH_OUT_DIR")]
    pub out: PathBuf,
    /// Write a manifest with the generating parameters (the default)
    #[arg(long, overrides_with = "no_manifest")]
    pub manifest: bool,
    /// Skip the manifest
    #[arg(long)]
    pub no_manifest: bool,
}

pub fn config_from(
    task: TaskKind,
    records: Option<usize>,
    groups: Option<usize>,
    group_sizes: Option<Vec<usize>>,
    noise_sd: Option<f64>,
    seed: u64,
) -> Result<SynthConfig> {
    let default_noise = match task {
        TaskKind::Ofdf => 3.0,
        TaskKind::Srmt => 2.0,
    };
    let noise = noise_sd.unwrap_or(default_noise);
    if let Some(sizes) = group_sizes {
        return SynthConfig::new(sizes, noise, seed);
    }
    let (def_records, def_groups) = match task {
        TaskKind::Ofdf => (131, 13),
        TaskKind::Srmt => (145, 29),
    };
    SynthConfig::imbalanced(
        records.unwrap_or(def_records),
        groups.unwrap_or(def_groups),
        noise,
        seed,
    )
}

pub fn run(args: SynthArgs) -> Result<()> {
    let cfg = config_from(
        args.task,
        args.records,
        args.groups,
        args.group_sizes,
        args.noise_sd,
        args.seed,
    )?;
    let ds = generate(args.task, &cfg)?;
    ensure_dir(&args.out)?;

    let stem = task_name(args.task);
    let csv_path = args.out.join(format!("{stem}.csv"));
    let schema_path = args.out.join(format!("{stem}.schema.json"));
    save_csv(&ds, &csv_path)?;
    ds.schema().save(&schema_path)?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", schema_path.display());

    if !args.no_manifest {
        let manifest_path = args.out.join(format!("{stem}.manifest.json"));
        write_json(
            &manifest_path,
            &serde_json::json!({
                "generator_version": GENERATOR_VERSION,
                "task": stem,
                "config": cfg,
            }),
        )?;
        println!("wrote {}", manifest_path.display());
    }
    Ok(())
}
