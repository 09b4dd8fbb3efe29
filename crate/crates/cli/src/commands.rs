use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use rbfn::baselines::{LogisticConfig, MlpConfig};
use rbfn::dataset::{encode, encode_features, parse_csv, protocol_warnings, write_csv, CsvSchema, Dataset, PatientRecord};
use rbfn::eval::report::{csv_table, metric_cells, metric_header, text_table};
use rbfn::eval::{compare_models, compute_metrics, kfold_cv, speed_claim, train_test_split, CompareConfig, SpeedVerdict};
use rbfn::persist::{self, SavedModel};
use rbfn::rbfnet::{argmax, select_hidden_size, train, train_detailed, HiddenSizeScore, RbfConfig};
use rbfn::synth::{generate_patients, SyntheticSpec};

use crate::{CliError, CompareArgs, CvArgs, DataArgs, EvaluateArgs, GenDataArgs, PredictArgs, Result, TrainArgs};

pub const MANIFEST_VERSION: u64 = 1;

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Write {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn in_file(path: &Path) -> impl FnOnce(rbfn::Error) -> CliError + '_ {
    move |source| CliError::InFile {
        path: path.to_path_buf(),
        source,
    }
}

fn load_records(path: &Path) -> Result<Vec<PatientRecord>> {
    let text = read_text(path)?;
    let records = parse_csv(text.as_bytes(), &CsvSchema::default()).map_err(in_file(path))?;
    for w in protocol_warnings(&records) {
        log::warn!("{}: {w}", path.display());
    }
    Ok(records)
}

fn load_dataset(args: &DataArgs) -> Result<Dataset> {
    let records = load_records(&args.data)?;
    if records.is_empty() {
        return Err(CliError::Usage(format!("`{}` has no data rows", args.data.display())));
    }
    let features: Vec<&str> = args.features.iter().map(String::as_str).collect();
    let (x, y) = encode(&records, args.target, &features).map_err(in_file(&args.data))?;
    Ok(Dataset::new(x, y)?)
}

fn default_n_train(n: usize, given: Option<usize>) -> usize {
    given.unwrap_or_else(|| ((n as f64 * 0.6).round() as usize).clamp(1, n.saturating_sub(1).max(1)))
}

#[derive(Serialize)]
struct Manifest<C, M> {
    config: C,
    seed: u64,
    metrics: M,
    format_version: u64,
}

#[derive(Serialize)]
struct TrainConfig<'a> {
    command: &'static str,
    data: &'a Path,
    target: rbfn::dataset::Target,
    features: &'a [String],
    model: &'a Path,
    rbf: &'a RbfConfig,
    hidden_grid: Option<&'a [usize]>,
    folds: Option<usize>,
}

#[derive(Serialize)]
struct TrainMetrics {
    training_accuracy: f64,
    n: usize,
    hidden: usize,
    kmeans_iterations: usize,
    hidden_size_cv: Option<Vec<HiddenSizeScore>>,
}

pub fn cmd_train(args: &TrainArgs, stdout: &mut dyn Write) -> Result<()> {
    let data = load_dataset(&args.data)?;
    let mut cfg = args.rbf.config(RbfConfig::default().hidden);

    let mut table = None;
    if let Some(grid) = &args.hidden_grid {
        let sel = select_hidden_size(&data.features, &data.labels, grid, args.folds, cfg.seed, &cfg)?;
        cfg.hidden = sel.chosen;
        table = Some(sel.table);
    }

    let (model, iterations) = train_detailed(&data.features, &data.labels, &cfg)?;
    let predicted = model.predict_matrix(&data.features)?;
    let accuracy = compute_metrics(data.labels.indices(), &predicted, data.labels.n_classes())?.accuracy;

    write_text(&args.model, &persist::save_rbf(&model)?)?;
    let manifest_path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.manifest.json", args.model.display())));
    let manifest = Manifest {
        config: TrainConfig {
            command: "train",
            data: &args.data.data,
            target: args.data.target,
            features: &args.data.features,
            model: &args.model,
            rbf: &cfg,
            hidden_grid: args.hidden_grid.as_deref(),
            folds: args.hidden_grid.as_ref().map(|_| args.folds),
        },
        seed: cfg.seed,
        metrics: TrainMetrics {
            training_accuracy: accuracy,
            n: data.len(),
            hidden: cfg.hidden,
            kmeans_iterations: iterations,
            hidden_size_cv: table,
        },
        format_version: MANIFEST_VERSION,
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(rbfn::Error::from)?;
    text.push('\n');
    write_text(&manifest_path, &text)?;

    emit(
        None,
        &format!("trained J={} on {} rows, training accuracy {accuracy:.4}\n", cfg.hidden, data.len()),
        stdout,
    )
}

pub fn cmd_predict(args: &PredictArgs, stdout: &mut dyn Write) -> Result<()> {
    let model: SavedModel = persist::load(&read_text(&args.model)?).map_err(in_file(&args.model))?;
    let records = load_records(&args.data)?;

    let mut header = vec!["id".to_string(), "predicted_class".to_string()];
    header.extend(model.class_names().iter().map(|c| format!("p_{c}")));
    let mut rows = Vec::with_capacity(records.len());
    if !records.is_empty() {
        let x = encode_features(&records, model.feature_names()).map_err(in_file(&args.data))?;
        for (r, values) in records.iter().zip(x.values().row_iter()) {
            let p = model.predict_proba(values)?;
            let mut row = vec![r.id.clone(), model.class_names()[argmax(&p)].clone()];
            row.extend(p.iter().map(|v| v.to_string()));
            rows.push(row);
        }
    }
    emit(args.out.as_deref(), &csv_table(&header, &rows), stdout)
}

pub fn cmd_evaluate(args: &EvaluateArgs, stdout: &mut dyn Write) -> Result<()> {
    let data = load_dataset(&args.data)?;
    let cfg = args.rbf.config(RbfConfig::default().hidden);
    let n_train = default_n_train(data.len(), args.n_train);
    let split = train_test_split(&data.labels, n_train, cfg.seed, true)?;
    let (train_set, test_set) = split.apply(&data)?;
    let model = train(&train_set.features, &train_set.labels, &cfg)?;

    let l = data.labels.n_classes();
    let mut header = vec!["split".to_string(), "n".to_string()];
    header.extend(metric_header(data.labels.class_names()));
    let mut rows = Vec::new();
    for (name, part) in [("train", &train_set), ("test", &test_set)] {
        let m = compute_metrics(part.labels.indices(), &model.predict_matrix(&part.features)?, l)?;
        let mut row = vec![name.to_string(), m.n.to_string()];
        row.extend(metric_cells(&m));
        rows.push(row);
    }
    if let Some(path) = &args.out {
        write_text(path, &csv_table(&header, &rows))?;
    }
    emit(None, &text_table(&header, &rows), stdout)
}

pub fn cmd_cv(args: &CvArgs, stdout: &mut dyn Write) -> Result<()> {
    let data = load_dataset(&args.data)?;
    let cfg = args.rbf.config(RbfConfig::default().hidden);
    let cv = kfold_cv(&data, args.folds, cfg.seed, |fold, train_set, test| {
        let fold_cfg = RbfConfig {
            seed: cfg.seed.wrapping_add(fold as u64),
            ..cfg.clone()
        };
        train(&train_set.features, &train_set.labels, &fold_cfg)?.predict_matrix(test)
    })?;

    let mut header = vec!["fold".to_string(), "n_test".to_string()];
    header.extend(metric_header(data.labels.class_names()));
    let rows: Vec<Vec<String>> = cv
        .folds
        .iter()
        .map(|f| {
            let mut row = vec![f.fold.to_string(), f.metrics.n.to_string()];
            row.extend(metric_cells(&f.metrics));
            row
        })
        .collect();
    if let Some(path) = &args.out {
        write_text(path, &csv_table(&header, &rows))?;
    }
    let mut text = text_table(&header, &rows);
    text.push_str(&format!(
        "mean accuracy {:.4} (sd {:.4}) over {} folds\n",
        cv.mean_accuracy,
        cv.std_accuracy,
        cv.folds.len()
    ));
    emit(None, &text, stdout)
}

pub fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<()> {
    let data = load_dataset(&args.data)?;
    let cfg = CompareConfig {
        n_train: default_n_train(data.len(), args.n_train),
        rbf: args.rbf.config(CompareConfig::default().rbf.hidden),
        mlp: MlpConfig {
            hidden: args.mlp_hidden,
            lr: args.mlp_lr,
            epochs: args.mlp_epochs,
            seed: args.rbf.seed,
        },
        logistic: LogisticConfig {
            lr: args.logistic_lr,
            epochs: args.logistic_epochs,
            seed: args.rbf.seed,
        },
    };
    let comparison = compare_models(&data, &cfg, args.rbf.seed)?;
    if let Some(path) = &args.out {
        write_text(path, &comparison.to_csv())?;
    }
    match speed_claim(&comparison) {
        SpeedVerdict::Violated { rbf_seconds, mlp_seconds } => log::warn!(
            "RBF network trained slower than the MLP ({rbf_seconds:.4}s vs {mlp_seconds:.4}s)"
        ),
        SpeedVerdict::Holds { rbf_seconds, mlp_seconds } => {
            log::info!("RBF network trained in {rbf_seconds:.4}s, MLP in {mlp_seconds:.4}s")
        }
        SpeedVerdict::NotApplicable => {
            log::info!("speed check skipped: a model stayed below 0.95 training accuracy")
        }
    }
    emit(None, &comparison.to_text(), stdout)
}

pub fn cmd_gen_data(args: &GenDataArgs, stdout: &mut dyn Write) -> Result<()> {
    let spec = SyntheticSpec {
        n: args.n,
        seed: args.seed,
        cd4_low_threshold: args.cd4_low,
        cd4_high_threshold: args.cd4_high,
        label_noise: args.noise,
    };
    let records = generate_patients(&spec)?;
    emit(args.out.as_deref(), &write_csv(&records)?, stdout)
}
