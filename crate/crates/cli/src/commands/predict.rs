use std::path::PathBuf;

use clap::Args;
use formbench::artifact::ModelArtifact;
use formbench::data::load_feature_csv;
use formbench::{Error, Result};

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Trained model artifact
    #[arg(long)]
    pub model: PathBuf,
    /// Input CSV; needs the model's id, group and feature columns, targets
    /// optional
    #[arg(long)]
    pub input: PathBuf,
    /// Output predictions CSV
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: PredictArgs) -> Result<()> {
    let artifact = ModelArtifact::load(&args.model)?;
    let records = load_feature_csv(&args.input, &artifact.schema)?;

    let mut writer = csv::Writer::from_path(&args.out)
        .map_err(|e| Error::io(&args.out, std::io::Error::other(e)))?;
    let mut header = vec![artifact.schema.id.clone()];
    header.extend(artifact.schema.targets.iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| Error::io(&args.out, std::io::Error::other(e)))?;

    for rec in &records {
        let predicted = artifact.predict_record(rec)?;
        let mut row = vec![rec.record_id.clone()];
        row.extend(predicted.iter().map(|v| v.to_string()));
        writer
            .write_record(&row)
            .map_err(|e| Error::io(&args.out, std::io::Error::other(e)))?;
    }
    writer.flush().map_err(|e| Error::io(&args.out, e))?;
    println!("wrote {}", args.out.display());
    Ok(())
}
