use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use formbench::data::{load_csv, save_csv, Dataset, DatasetSchema, EncodingMode, TaskKind};
use formbench::split::{mdfis_three_way_sized, random_split, MdfisConfig};
use formbench::synth::generate;
use formbench::{derive_seed, Error, Result};
use serde::{Deserialize, Serialize};

use super::evaluate::{evaluate_artifact, write_model_outputs};
use super::split::max_dissim_split;
use super::train::{fit_all, write_fitted, ModelRequest, TrainingContext};
use super::{ensure_dir, parse_task, read_json, task_name, write_json, write_text};
use crate::manifest::RunManifest;
use crate::table;

#[derive(Args, Debug)]
pub struct PipelineArgs {
    /// Full run configuration as JSON; flags below override nothing when
    /// this is given
    #[arg(long, conflicts_with_all = ["task", "records", "groups", "noise_sd", "strategy", "models", "seed"])]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_task)]
    pub task: Option<TaskKind>,
    #[arg(long)]
    pub records: Option<usize>,
    #[arg(long)]
    pub groups: Option<usize>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    /// mdfis or maxdissim (three-way strategies only)
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub val: usize,
    #[arg(long, default_value_t = 20)]
    pub test: usize,
    /// Comma-separated model list
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub plots: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, env = "FORMBENCH_OUT_DIR")]
    pub out: PathBuf,
}

/// Synthesis parameters inside a run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSection {
    pub records: usize,
    pub groups: usize,
    pub noise_sd: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitSection {
    /// mdfis, maxdissim, random or manual
    pub strategy: String,
    #[serde(default = "default_twenty")]
    pub validation: usize,
    #[serde(default = "default_twenty")]
    pub test: usize,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub min_group: Option<usize>,
    #[serde(default)]
    pub initial_candidates: Option<usize>,
    #[serde(default)]
    pub initial_size: Option<usize>,
    /// Held-out fraction for the random strategy (two-way split).
    #[serde(default)]
    pub fraction: Option<f64>,
    /// Record-id file for the manual strategy.
    #[serde(default)]
    pub ids: Option<PathBuf>,
}

fn default_twenty() -> usize {
    20
}

/// One reproducible experiment: where the data comes from, how it is split,
/// and which models to fit. A single seed determines every output byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: TaskKind,
    /// Generate the dataset (exclusive with `dataset`/`schema`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<PathBuf>,
    pub split: SplitSection,
    pub models: Vec<ModelRequest>,
    pub seed: u64,
    #[serde(default)]
    pub plots: bool,
    #[serde(default)]
    pub one_hot: bool,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        match (&self.synth, &self.dataset, &self.schema) {
            (Some(_), None, None) => {}
            (None, Some(data), Some(schema)) => {
                for p in [data, schema] {
                    if !p.exists() {
                        return Err(Error::Argument(format!(
                            "referenced file {} does not exist",
                            p.display()
                        )));
                    }
                }
            }
            _ => {
                return Err(Error::Argument(
                    "config needs either a synth section or dataset+schema paths".into(),
                ))
            }
        }
        if self.split.strategy == "manual" {
            match &self.split.ids {
                Some(ids) if ids.exists() => {}
                Some(ids) => {
                    return Err(Error::Argument(format!(
                        "referenced file {} does not exist",
                        ids.display()
                    )))
                }
                None => {
                    return Err(Error::Argument(
                        "the manual strategy needs a split ids file".into(),
                    ))
                }
            }
        }
        if self.models.is_empty() {
            return Err(Error::Argument("config lists no models".into()));
        }
        Ok(())
    }
}

fn config_from_flags(args: &PipelineArgs) -> Result<RunConfig> {
    let task = args
        .task
        .ok_or_else(|| Error::Argument("--task is required without --config".into()))?;
    let (def_records, def_groups, def_noise) = match task {
        TaskKind::Ofdf => (131, 13, 3.0),
        TaskKind::Srmt => (145, 29, 2.0),
    };
    let models = args
        .models
        .clone()
        .unwrap_or_else(|| vec!["dnn".to_string()]);
    Ok(RunConfig {
        task,
        synth: Some(SynthSection {
            records: args.records.unwrap_or(def_records),
            groups: args.groups.unwrap_or(def_groups),
            noise_sd: args.noise_sd.unwrap_or(def_noise),
        }),
        dataset: None,
        schema: None,
        split: SplitSection {
            strategy: args.strategy.clone().unwrap_or_else(|| "mdfis".to_string()),
            validation: args.val,
            test: args.test,
            alpha: None,
            min_group: None,
            initial_candidates: None,
            initial_size: None,
            fraction: None,
            ids: None,
        },
        models: models.iter().map(|n| ModelRequest::named(n)).collect(),
        seed: args.seed.unwrap_or(0),
        plots: args.plots,
        one_hot: false,
    })
}

/// Seed streams: 0 = synthesis, 1 = splitting, 2+i = model i.
///
/// The manifest lands in the output directory on success and on failure.
pub fn execute(config: &RunConfig, out_dir: &Path, jobs: usize) -> Result<()> {
    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new(config)?;
    let result = config
        .validate()
        .and_then(|()| execute_inner(config, out_dir, jobs, &mut manifest));
    match &result {
        Ok(()) => manifest.finish_ok(),
        Err(e) => manifest.finish_err(&e.to_string()),
    }
    write_json(&out_dir.join("run_manifest.json"), &manifest)?;
    result
}

fn execute_inner(
    config: &RunConfig,
    out_dir: &Path,
    jobs: usize,
    manifest: &mut RunManifest,
) -> Result<()> {
    // data
    let t = Instant::now();
    let ds: Dataset = match (&config.synth, &config.dataset, &config.schema) {
        (Some(synth), _, _) => {
            let cfg = super::synth::config_from(
                config.task,
                Some(synth.records),
                Some(synth.groups),
                None,
                Some(synth.noise_sd),
                derive_seed(config.seed, 0),
            )?;
            let ds = generate(config.task, &cfg)?;
            let stem = task_name(config.task);
            let csv_path = out_dir.join(format!("{stem}.csv"));
            let schema_path = out_dir.join(format!("{stem}.schema.json"));
            save_csv(&ds, &csv_path)?;
            ds.schema().save(&schema_path)?;
            manifest.add_artifact(out_dir, &csv_path)?;
            manifest.add_artifact(out_dir, &schema_path)?;
            ds
        }
        (None, Some(data), Some(schema)) => {
            let schema = DatasetSchema::load(schema)?;
            load_csv(data, &schema)?
        }
        _ => unreachable!("validated"),
    };
    manifest.add_timing("data", t.elapsed());

    // split
    let t = Instant::now();
    let split_seed = derive_seed(config.seed, 1);
    let s = &config.split;
    let split = match s.strategy.as_str() {
        "mdfis" => {
            let cfg = MdfisConfig {
                selection_size: s.validation,
                alpha: s.alpha.unwrap_or(0.5),
                min_group_size: s.min_group.unwrap_or(4),
                n_initial_candidates: s.initial_candidates.unwrap_or(10_000),
                initial_set_size: s.initial_size.unwrap_or(5),
                seed: split_seed,
            };
            mdfis_three_way_sized(&ds, &cfg, s.validation, s.test, split_seed)?
        }
        "maxdissim" => max_dissim_split(
            &ds,
            s.validation,
            s.test,
            s.initial_size.unwrap_or(5),
            split_seed,
        )?,
        "random" => {
            let fraction = s.fraction.unwrap_or(0.3);
            random_split(&ds, fraction, 1, split_seed)?.remove(0)
        }
        "manual" => {
            let ids = s.ids.as_ref().expect("validated");
            let file: formbench::split::SplitFile = read_json(ids)?;
            file.resolve(&ds)?
        }
        other => {
            return Err(Error::Argument(format!(
                "unknown strategy {other:?} (expected mdfis, maxdissim, random or manual)"
            )))
        }
    };
    let split_path = out_dir.join("split.json");
    write_json(&split_path, &split.to_file(&ds))?;
    manifest.add_artifact(out_dir, &split_path)?;
    manifest.add_timing("split", t.elapsed());

    // train
    let t = Instant::now();
    let mode = if config.one_hot {
        EncodingMode::OneHot
    } else {
        EncodingMode::IntegerCodes
    };
    let ctx = TrainingContext::prepare(ds, &split, mode)?;
    let fitted = fit_all(&ctx, &config.models, config.seed, jobs)?;
    for path in write_fitted(out_dir, &fitted)? {
        manifest.add_artifact(out_dir, &path)?;
    }
    manifest.add_timing("train", t.elapsed());

    // evaluate
    let t = Instant::now();
    let mut table_rows = Vec::new();
    for f in &fitted {
        let report = evaluate_artifact(&ctx.dataset, &split, &f.artifact)?;
        for path in
            write_model_outputs(out_dir, &ctx.dataset, &f.artifact.name, &report, config.plots)?
        {
            manifest.add_artifact(out_dir, &path)?;
        }
        table_rows.push((f.artifact.name.clone(), report));
    }
    let table_path = out_dir.join("report.txt");
    write_text(&table_path, &table::render(&table_rows))?;
    manifest.add_artifact(out_dir, &table_path)?;
    manifest.add_timing("evaluate", t.elapsed());
    Ok(())
}

pub fn run(args: PipelineArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => read_json::<RunConfig>(path)?,
        None => config_from_flags(&args)?,
    };
    execute(&config, &args.out, args.jobs)?;
    println!("run complete: {}", args.out.display());
    Ok(())
}
