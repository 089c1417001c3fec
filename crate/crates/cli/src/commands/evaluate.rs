use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use formbench::artifact::ModelArtifact;
use formbench::data::{load_csv, Dataset, DatasetSchema, TaskKind};
use formbench::metrics::{evaluate, EvaluationReport, SplitReport};
use formbench::split::SplitAssignment;
use formbench::{Error, Result};

use super::{ensure_dir, load_split, write_text};
use crate::svg;
use crate::table;

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub split: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub split_index: usize,
    /// Trained model artifact (repeatable)
    #[arg(long = "model", required = true)]
    pub models: Vec<PathBuf>,
    /// Also render predicted-vs-experimental SVG scatter plots
    #[arg(long)]
    pub plots: bool,
    #[arg(long, env = "FORMBENCH_OUT_DIR")]
    pub out: PathBuf,
}

/// Scores one artifact against every subset of the split.
pub fn evaluate_artifact(
    ds: &Dataset,
    split: &SplitAssignment,
    artifact: &ModelArtifact,
) -> Result<EvaluationReport> {
    if artifact.schema != *ds.schema() {
        return Err(Error::Schema(format!(
            "model {:?} was trained against a different schema",
            artifact.name
        )));
    }
    let predictions: BTreeMap<usize, Vec<f64>> = ds
        .records()
        .iter()
        .enumerate()
        .map(|(i, rec)| Ok((i, artifact.predict_record_scaled(rec)?)))
        .collect::<Result<_>>()?;
    evaluate(ds, split, &predictions, &artifact.scaling)
}

/// `record_id,target,experimental,predicted` rows for one subset.
pub fn scatter_csv(report: &SplitReport, targets: &[String]) -> String {
    let mut out = String::from("record_id,target,experimental,predicted\n");
    for rec in &report.records {
        for (t, name) in targets.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                rec.record_id, name, rec.experimental[t], rec.predicted[t]
            ));
        }
    }
    out
}

pub fn write_model_outputs(
    out_dir: &Path,
    ds: &Dataset,
    name: &str,
    report: &EvaluationReport,
    plots: bool,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let report_path = out_dir.join(format!("report_{name}.json"));
    report.save(&report_path)?;
    written.push(report_path);

    let targets = &ds.schema().targets;
    let subsets: Vec<(&str, &SplitReport)> = {
        let mut v = vec![("train", &report.train), ("validation", &report.validation)];
        if let Some(test) = &report.test {
            v.push(("test", test));
        }
        v
    };
    for (subset, part) in &subsets {
        let csv_path = out_dir.join(format!("scatter_{name}_{subset}.csv"));
        write_text(&csv_path, &scatter_csv(part, targets))?;
        written.push(csv_path);
    }
    if plots {
        // the ±10 s acceptance band only applies to disintegration time
        let band = match ds.schema().task_kind {
            TaskKind::Ofdf => Some(10.0),
            TaskKind::Srmt => None,
        };
        for (subset, part) in &subsets {
            for (t, target) in targets.iter().enumerate() {
                let points: Vec<(f64, f64)> = part
                    .records
                    .iter()
                    .map(|r| (r.experimental[t], r.predicted[t]))
                    .collect();
                let plot = svg::ScatterPlot {
                    title: format!("{name} · {subset} · {target}"),
                    x_label: format!("experimental {target}"),
                    y_label: format!("predicted {target}"),
                    points,
                    band,
                };
                let svg_path = out_dir.join(format!("scatter_{name}_{subset}_{target}.svg"));
                write_text(&svg_path, &plot.render())?;
                written.push(svg_path);
            }
        }
    }
    Ok(written)
}

pub fn run(args: EvaluateArgs) -> Result<()> {
    let schema = DatasetSchema::load(&args.schema)?;
    let ds = load_csv(&args.data, &schema)?;
    let split = load_split(&args.split, args.split_index, &ds)?;
    ensure_dir(&args.out)?;

    let mut table_rows: Vec<(String, EvaluationReport)> = Vec::new();
    for model_path in &args.models {
        let artifact = ModelArtifact::load(model_path)?;
        let report = evaluate_artifact(&ds, &split, &artifact)?;
        for path in write_model_outputs(&args.out, &ds, &artifact.name, &report, args.plots)? {
            println!("wrote {}", path.display());
        }
        table_rows.push((artifact.name.clone(), report));
    }

    let table_path = args.out.join("report.txt");
    write_text(&table_path, &table::render(&table_rows))?;
    println!("wrote {}", table_path.display());
    Ok(())
}
