use std::path::PathBuf;

use clap::Args;
use formbench::data::{load_csv, Dataset, DatasetSchema};
use formbench::split::{
    max_dissim_select, mdfis_three_way_sized, random_split, DistanceTable, MdfisConfig,
    SplitAssignment, SplitFile,
};
use formbench::{derive_seed, Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{read_json, write_json};

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub schema: PathBuf,
    /// mdfis, maxdissim, random or manual
    #[arg(long)]
    pub strategy: String,
    /// Validation set size (mdfis, maxdissim)
    #[arg(long, default_value_t = 20)]
    pub val: usize,
    /// Test set size (mdfis, maxdissim); 0 for a two-way split
    #[arg(long, default_value_t = 20)]
    pub test: usize,
    /// Weight of the within-group mean distance in the MD-FIS cost
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Groups below this size never enter validation/test (mdfis)
    #[arg(long, default_value_t = 4)]
    pub min_group: usize,
    /// Random initial sets scored by the representative search (mdfis)
    #[arg(long, default_value_t = 10_000)]
    pub initial_candidates: usize,
    /// Initial set size (mdfis, maxdissim)
    #[arg(long, default_value_t = 5)]
    pub initial_size: usize,
    /// Held-out fraction (random)
    #[arg(long, default_value_t = 0.3)]
    pub fraction: f64,
    /// Number of repeated draws (random); >1 writes a JSON array
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// JSON file with `{"validation": [ids], "test": [ids]}` (manual)
    #[arg(long)]
    pub ids: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output split JSON path
    #[arg(long)]
    pub out: PathBuf,
}

/// Plain maximum dissimilarity with a randomly drawn initial set, applied
/// once for validation and once more over the remainder for the test set.
pub fn max_dissim_split(
    ds: &Dataset,
    val: usize,
    test: usize,
    initial_size: usize,
    seed: u64,
) -> Result<SplitAssignment> {
    let prepared = ds.encoded_scaled_for_distance()?;
    let dt = DistanceTable::from_dataset(&prepared)?;
    let n = ds.n_records();

    let select = |available: &[usize], k: usize, seed: u64| -> Result<Vec<usize>> {
        if available.len() < k + initial_size {
            return Err(Error::InsufficientData(format!(
                "{} rows available, need {} plus an initial set of {}",
                available.len(),
                k,
                initial_size
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut shuffled = available.to_vec();
        shuffled.shuffle(&mut rng);
        let initial = &shuffled[..initial_size];
        let pool: Vec<usize> = shuffled[initial_size..].to_vec();
        max_dissim_select(&dt, initial, &pool, k)
    };

    let all: Vec<usize> = (0..n).collect();
    let validation = select(&all, val, derive_seed(seed, 0))?;
    let test_rows = if test == 0 {
        Vec::new()
    } else {
        let remainder: Vec<usize> = (0..n).filter(|i| !validation.contains(i)).collect();
        select(&remainder, test, derive_seed(seed, 1))?
    };
    SplitAssignment::from_holdouts(n, &validation, &test_rows)
}

pub fn run(args: SplitArgs) -> Result<()> {
    let schema = DatasetSchema::load(&args.schema)?;
    let ds = load_csv(&args.data, &schema)?;

    match args.strategy.as_str() {
        "mdfis" => {
            let cfg = MdfisConfig {
                selection_size: args.val,
                alpha: args.alpha,
                min_group_size: args.min_group,
                n_initial_candidates: args.initial_candidates,
                initial_set_size: args.initial_size,
                seed: args.seed,
            };
            let split = mdfis_three_way_sized(&ds, &cfg, args.val, args.test, args.seed)?;
            write_json(&args.out, &split.to_file(&ds))?;
        }
        "maxdissim" => {
            let split =
                max_dissim_split(&ds, args.val, args.test, args.initial_size, args.seed)?;
            write_json(&args.out, &split.to_file(&ds))?;
        }
        "random" => {
            let splits = random_split(&ds, args.fraction, args.repeats, args.seed)?;
            if args.repeats == 1 {
                write_json(&args.out, &splits[0].to_file(&ds))?;
            } else {
                let files: Vec<SplitFile> = splits.iter().map(|s| s.to_file(&ds)).collect();
                write_json(&args.out, &files)?;
            }
        }
        "manual" => {
            let ids_path = args.ids.ok_or_else(|| {
                Error::Argument("--ids is required for the manual strategy".into())
            })?;
            let file: SplitFile = read_json(&ids_path)?;
            let split = file.resolve(&ds)?;
            write_json(&args.out, &split.to_file(&ds))?;
        }
        other => {
            return Err(Error::Argument(format!(
                "unknown strategy {other:?} (expected mdfis, maxdissim, random or manual)"
            )))
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
