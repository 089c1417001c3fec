use std::path::{Path, PathBuf};

use clap::Args;
use formbench::artifact::{ModelArtifact, ModelPayload};
use formbench::baselines::{fit_multi, RegressorSpec, RfConfig};
use formbench::data::{
    apply_scaling, encode_categoricals_with, fit_scaling, load_csv, Dataset, DatasetSchema,
    EncodingMode, ScalingParams, TaskKind,
};
use formbench::deepnet::{self, PresetName, TrainConfig};
use formbench::split::SplitAssignment;
use formbench::{derive_seed, Error, Matrix, Result};
use serde::{Deserialize, Serialize};

use super::{ensure_dir, load_split, write_text};

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub split: PathBuf,
    /// Index into the split file when it holds an array of assignments
    #[arg(long, default_value_t = 0)]
    pub split_index: usize,
    /// Model to train: mlr, plsr, knn, rf, ann1, dnn, dnn-ofdf, dnn-srmt
    /// (repeatable)
    #[arg(long = "model", required = true)]
    pub models: Vec<String>,
    /// PLSR component count (default: 8 ofdf / 10 srmt)
    #[arg(long)]
    pub components: Option<usize>,
    /// k-NN neighbor count (default: 5 ofdf / 3 srmt)
    #[arg(long)]
    pub k: Option<usize>,
    /// Random forest size
    #[arg(long)]
    pub trees: Option<usize>,
    /// Random forest depth cap (default: 3 ofdf / 5 srmt)
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Fraction of features considered per split (random forest)
    #[arg(long)]
    pub feature_fraction: Option<f64>,
    /// Hidden width of the single-hidden-layer network
    /// (default: 80 ofdf / 60 srmt)
    #[arg(long)]
    pub hidden: Option<usize>,
    /// Training epochs for networks (default: task preset)
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    /// Encode categoricals as indicator columns instead of integer codes
    #[arg(long)]
    pub one_hot: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fit models concurrently; outputs are identical to sequential runs
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, env = "FORMBENCH_OUT_DIR")]
    pub out: PathBuf,
}

/// One model request: a name plus optional hyperparameter overrides.
/// Anything unset falls back to the task's reference value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelRequest {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trees: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
}

impl ModelRequest {
    pub fn named(name: &str) -> Self {
        ModelRequest {
            name: name.to_string(),
            ..ModelRequest::default()
        }
    }
}

/// Reference hyperparameters per task.
fn task_defaults(task: TaskKind) -> (usize, usize, usize, usize, PresetName) {
    match task {
        // (plsr components, knn k, rf depth, ann1 hidden, dnn preset)
        TaskKind::Ofdf => (8, 5, 3, 80, PresetName::OfdfDnn),
        TaskKind::Srmt => (10, 3, 5, 60, PresetName::SrmtDnn),
    }
}

enum ResolvedModel {
    Baseline(RegressorSpec),
    Network(PresetName, TrainConfig),
}

fn resolve_model(req: &ModelRequest, task: TaskKind, seed: u64) -> Result<ResolvedModel> {
    let (plsr_a, knn_k, rf_depth, ann_hidden, dnn_preset) = task_defaults(task);
    let network_budget = |preset: PresetName| -> Result<TrainConfig> {
        let (_, base) = deepnet::preset(preset, 1, 1);
        TrainConfig::new(
            req.lr.unwrap_or(base.learning_rate),
            req.momentum.unwrap_or(base.momentum),
            req.epochs.unwrap_or(base.epochs),
        )
    };
    match req.name.as_str() {
        "mlr" => Ok(ResolvedModel::Baseline(RegressorSpec::Mlr)),
        "plsr" => Ok(ResolvedModel::Baseline(RegressorSpec::Plsr {
            n_components: req.components.unwrap_or(plsr_a),
        })),
        "knn" => Ok(ResolvedModel::Baseline(RegressorSpec::Knn {
            k: req.k.unwrap_or(knn_k),
        })),
        "rf" => {
            let mut cfg = RfConfig::new(
                req.trees.unwrap_or(100),
                req.max_depth.unwrap_or(rf_depth),
                seed,
            )?;
            if let Some(f) = req.feature_fraction {
                cfg.feature_fraction = f;
                cfg.validate()?;
            }
            Ok(ResolvedModel::Baseline(RegressorSpec::Rf(cfg)))
        }
        "ann1" => Ok(ResolvedModel::Baseline(RegressorSpec::Ann1 {
            hidden_width: req.hidden.unwrap_or(ann_hidden),
            train: network_budget(dnn_preset)?,
            seed,
        })),
        "dnn" => Ok(ResolvedModel::Network(dnn_preset, network_budget(dnn_preset)?)),
        name => {
            let preset: PresetName = name.parse()?;
            Ok(ResolvedModel::Network(preset, network_budget(preset)?))
        }
    }
}

/// Everything a fit needs, shared across models of one run.
pub struct TrainingContext {
    pub dataset: Dataset,
    pub encoded: Dataset,
    pub scaling: ScalingParams,
    pub x_train: Matrix,
    pub y_train: Matrix,
}

impl TrainingContext {
    pub fn prepare(ds: Dataset, split: &SplitAssignment, mode: EncodingMode) -> Result<Self> {
        split.assert_partition(ds.n_records())?;
        let encoded = encode_categoricals_with(&ds, mode)?;
        let scaling = fit_scaling(&encoded, &split.train)?;
        let scaled = apply_scaling(&encoded, &scaling)?;
        let x_train = scaled.matrix()?.select_rows(&split.train);
        let y_rows: Vec<Vec<f64>> = split
            .train
            .iter()
            .map(|&i| scaling.scale_targets(&ds.record(i).targets))
            .collect::<Result<_>>()?;
        let y_train = Matrix::from_rows(&y_rows);
        Ok(TrainingContext {
            dataset: ds,
            encoded: scaled,
            scaling,
            x_train,
            y_train,
        })
    }
}

pub struct FittedModel {
    pub artifact: ModelArtifact,
    /// Per-epoch loss trace for network models.
    pub loss_trace: Option<Vec<f64>>,
}

/// Fits one requested model on the training subset. `seed` must already be
/// model-specific (derived from the run seed and the model's position).
pub fn fit_model(ctx: &TrainingContext, req: &ModelRequest, seed: u64) -> Result<FittedModel> {
    let task = ctx.dataset.schema().task_kind;
    let (payload, trace) = match resolve_model(req, task, seed)? {
        ResolvedModel::Baseline(spec) => {
            let wrapper = fit_multi(&spec, &ctx.x_train, &ctx.y_train)?;
            (ModelPayload::MultiTarget { wrapper }, None)
        }
        ResolvedModel::Network(preset, train_cfg) => {
            let (spec, _) = deepnet::preset(preset, ctx.x_train.cols(), ctx.y_train.cols());
            let spec = spec.with_seed(seed);
            let outcome = deepnet::train(&spec, &train_cfg, &ctx.x_train, &ctx.y_train)?;
            (
                ModelPayload::Network {
                    spec,
                    train: train_cfg,
                    params: outcome.params,
                },
                Some(outcome.loss_trace),
            )
        }
    };
    let artifact = ModelArtifact::new(
        req.name.clone(),
        ctx.dataset.schema().clone(),
        ctx.encoded
            .codebook()
            .expect("context datasets are encoded")
            .clone(),
        ctx.scaling.clone(),
        payload,
    );
    Ok(FittedModel {
        artifact,
        loss_trace: trace,
    })
}

/// Fits all requested models, optionally across threads. Per-model seeds
/// come from the model's list position, so results never depend on
/// scheduling and match a sequential run byte for byte.
pub fn fit_all(
    ctx: &TrainingContext,
    requests: &[ModelRequest],
    run_seed: u64,
    jobs: usize,
) -> Result<Vec<FittedModel>> {
    if jobs <= 1 || requests.len() <= 1 {
        return requests
            .iter()
            .enumerate()
            .map(|(i, req)| fit_model(ctx, req, derive_seed(run_seed, 2 + i as u64)))
            .collect();
    }
    let slots: std::sync::Mutex<Vec<Option<Result<FittedModel>>>> =
        std::sync::Mutex::new((0..requests.len()).map(|_| None).collect());
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(requests.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= requests.len() {
                    break;
                }
                let out = fit_model(ctx, &requests[i], derive_seed(run_seed, 2 + i as u64));
                slots.lock().expect("no poisoned fits")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("no poisoned fits")
        .into_iter()
        .map(|r| r.expect("every index was claimed by a worker"))
        .collect()
}

pub fn loss_trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("epoch,loss\n");
    for (epoch, loss) in trace.iter().enumerate() {
        out.push_str(&format!("{epoch},{loss}\n"));
    }
    out
}

pub fn write_fitted(out_dir: &Path, fitted: &[FittedModel]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for f in fitted {
        let model_path = out_dir.join(format!("model_{}.json", f.artifact.name));
        f.artifact.save(&model_path)?;
        written.push(model_path);
        if let Some(trace) = &f.loss_trace {
            let loss_path = out_dir.join(format!("loss_{}.csv", f.artifact.name));
            write_text(&loss_path, &loss_trace_csv(trace))?;
            written.push(loss_path);
        }
    }
    Ok(written)
}

pub fn run(args: TrainArgs) -> Result<()> {
    let schema = DatasetSchema::load(&args.schema)?;
    let ds = load_csv(&args.data, &schema)?;
    let split = load_split(&args.split, args.split_index, &ds)?;
    let mode = if args.one_hot {
        EncodingMode::OneHot
    } else {
        EncodingMode::IntegerCodes
    };
    let ctx = TrainingContext::prepare(ds, &split, mode)?;

    let requests: Vec<ModelRequest> = args
        .models
        .iter()
        .map(|name| ModelRequest {
            name: name.clone(),
            components: args.components,
            k: args.k,
            trees: args.trees,
            max_depth: args.max_depth,
            feature_fraction: args.feature_fraction,
            hidden: args.hidden,
            epochs: args.epochs,
            lr: args.lr,
            momentum: args.momentum,
        })
        .collect();

    if requests.len()
        != requests
            .iter()
            .map(|r| r.name.as_str())
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    {
        return Err(Error::Argument("duplicate --model names".into()));
    }

    let fitted = fit_all(&ctx, &requests, args.seed, args.jobs)?;
    ensure_dir(&args.out)?;
    for path in write_fitted(&args.out, &fitted)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
