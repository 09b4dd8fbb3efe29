//! One PASS/FAIL line per acceptance criterion.
//!
//! Failures are reported, not fatal; set `RBFN_ACCEPTANCE_STRICT=1` to make
//! any FAIL line exit non-zero.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rbfn::baselines::{logistic_loss_grad, mlp_loss_grad, LogisticModel, MlpModel};
use rbfn::dataset::{encode, encode_features, parse_csv, quantile_sorted, CsvSchema, FeatureMatrix, LabelVector, Scaler, Target, NUMERIC_FEATURES};
use rbfn::eval::{compare_models, CompareConfig, Comparison, ModelKind};
use rbfn::kmeans::{kmeans, kmeans_best_of};
use rbfn::linalg::Matrix;
use rbfn::persist;
use rbfn::rbfnet::{fit_output_weights, train, RbfConfig};
use rbfn::synth::ring_dataset;
use rbfn_cli::{run, Cli};
use rbfn_oracles as oracle;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli(dir: &Path, args: &[&str]) -> Result<String, String> {
    let mut argv = vec!["rbfn".to_string()];
    for a in args {
        // file arguments are relative to the scratch directory
        argv.push(if a.ends_with(".csv") || a.ends_with(".json") { dir.join(a).display().to_string() } else { a.to_string() });
    }
    let parsed = Cli::try_parse_from(&argv).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    run(&parsed, &mut out).map_err(|e| format!("{args:?}: {e}"))?;
    Ok(String::from_utf8(out).unwrap())
}

fn rows(rng: &mut ChaCha8Rng, n: usize, d: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(lo..hi)).collect()).collect()
}

fn fixture_reproduction() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    fs::write(dir.path().join("fixture.csv"), rbfn::FIXTURE_PATIENTS10).unwrap();
    let start = Instant::now();
    cli(dir.path(), &["train", "--data", "fixture.csv", "--hidden", "10", "--centers", "kmeans", "--lambda", "1e-8", "--model", "m.json"])?;
    cli(dir.path(), &["predict", "--model", "m.json", "--data", "fixture.csv", "--out", "p.csv"])?;
    let elapsed = start.elapsed().as_secs_f64();

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("m.json.manifest.json")).unwrap()).unwrap();
    let accuracy = manifest["metrics"]["training_accuracy"].as_f64().unwrap_or(-1.0);
    let predicted: Vec<String> = fs::read_to_string(dir.path().join("p.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            format!("{}:{}", c[0], c[1])
        })
        .collect();
    let want: Vec<String> = "A:>75% B:>75% C:<50% D:<50% E:>75% F:<50% G:>75% H:<50% I:<50% J:>75%"
        .split(' ')
        .map(String::from)
        .collect();
    check(
        accuracy == 1.0 && predicted == want && elapsed < 1.0,
        format!("training accuracy {accuracy}, labels {}, {elapsed:.3}s", if predicted == want { "match" } else { "differ" }),
    )
}

fn exact_interpolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut misses = Vec::new();
    let mut by_dim = [0usize; 7];
    for case in 0..20 {
        let (n, d, l) = (rng.gen_range(3..=30), rng.gen_range(1..=6), rng.gen_range(2..=3));
        by_dim[d] += 1;
        let x = rows(&mut rng, n, d, -10.0, 10.0);
        let mut labels: Vec<usize> = (0..n).map(|i| i % l).collect();
        for i in (1..n).rev() {
            labels.swap(i, rng.gen_range(0..=i));
        }
        let m = FeatureMatrix::from_rows(&x).unwrap();
        let y = LabelVector::new(labels.clone(), (0..l).map(|c| c.to_string()).collect()).unwrap();
        let cfg = RbfConfig {
            hidden: n,
            seed: case,
            ..RbfConfig::default()
        };
        let predicted = train(&m, &y, &cfg).map_err(|e| e.to_string())?.predict_matrix(&m).unwrap();
        let wrong = predicted.iter().zip(&labels).filter(|(a, b)| a != b).count();
        if wrong > 0 {
            misses.push(format!("N={n} d={d} L={l}: {wrong} wrong"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let dims: Vec<String> = (1..=6).map(|d| format!("d={d}:{}", by_dim[d])).collect();
    check(
        misses.is_empty() && elapsed < 10.0,
        format!(
            "{} of 20 datasets misclassify [{}] (datasets per dim {}), {elapsed:.3}s",
            misses.len(),
            misses.join("; "),
            dims.join(" ")
        ),
    )
}

fn least_squares_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (n, j, l) = (rng.gen_range(1..=8), rng.gen_range(1..=5), rng.gen_range(1..=3));
        let lambda = 10f64.powf(rng.gen_range(-4.0..0.0));
        let mut phi = rows(&mut rng, n, j + 1, 0.0, 1.0);
        for r in &mut phi {
            r[0] = 1.0;
        }
        let t = rows(&mut rng, n, l, 0.0, 1.0);
        let got = fit_output_weights(&Matrix::from_rows(&phi).unwrap(), &Matrix::from_rows(&t).unwrap(), lambda)
            .map_err(|e| e.to_string())?;
        let want = oracle::ridge_pseudo_inverse(&phi, &t, lambda).ok_or("oracle singular")?;
        for (i, row) in want.iter().enumerate() {
            for (c, w) in row.iter().enumerate() {
                worst = worst.max((got[(i, c)] - w).abs());
            }
        }
    }
    check(worst <= 1e-8, format!("50 instances, max abs error {worst:.2e}"))
}

fn kmeans_criteria() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut rises = 0;
    for case in 0..100 {
        let (n, d) = (rng.gen_range(2..=60), rng.gen_range(1..=4));
        let k = rng.gen_range(1..=n.min(8));
        let m = FeatureMatrix::from_rows(&rows(&mut rng, n, d, -5.0, 5.0)).unwrap();
        let c = kmeans(&m, k, case, 100, 1e-9).map_err(|e| e.to_string())?;
        if c.inertia_history.windows(2).any(|w| w[1] > w[0]) {
            rises += 1;
        }
    }
    let mut off = 0;
    let small = 1000;
    for case in 0..small {
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=n.min(3));
        let d = rng.gen_range(1..=3);
        let x = rows(&mut rng, n, d, -5.0, 5.0);
        let best = kmeans_best_of(&FeatureMatrix::from_rows(&x).unwrap(), k, case * 10, 10, 100, 1e-9)
            .map_err(|e| e.to_string())?;
        if (best.inertia - oracle::brute_force_kmeans(&x, k)).abs() > 1e-9 {
            off += 1;
        }
    }
    check(
        rises == 0 && off == 0,
        format!("inertia rose in {rises}/100 runs; best-of-10 missed the brute-force optimum on {off}/{small} small instances"),
    )
}

fn scaler_criteria() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut med_err, mut iqr_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let (n, d) = (rng.gen_range(2..=40), rng.gen_range(1..=6));
        let m = FeatureMatrix::from_rows(&rows(&mut rng, n, d, -1e3, 1e3)).unwrap();
        let s = Scaler::fit(&m);
        let z = s.transform(&m).unwrap();
        for j in 0..d {
            let mut col: Vec<f64> = z.values().column(j).collect();
            col.sort_by(f64::total_cmp);
            med_err = med_err.max(quantile_sorted(&col, 0.5).abs());
            if s.iqrs[j] > 0.0 {
                iqr_err = iqr_err.max((quantile_sorted(&col, 0.75) - quantile_sorted(&col, 0.25) - 1.0).abs());
            }
        }
    }
    let recs = parse_csv(rbfn::FIXTURE_PATIENTS10.as_bytes(), &CsvSchema::default()).unwrap();
    let (x, _) = encode(&recs, Target::Prolong, &NUMERIC_FEATURES).unwrap();
    let s = Scaler::fit(&x);
    check(
        med_err <= 1e-12 && iqr_err <= 1e-12 && s.medians[0] == 36.0 && s.iqrs[0] == 6.25,
        format!(
            "max |median| {med_err:.1e}, max |IQR-1| {iqr_err:.1e}; fixture age median {}, IQR {}",
            s.medians[0], s.iqrs[0]
        ),
    )
}

fn gradient_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_logistic, mut worst_mlp): (f64, f64) = (0.0, 0.0);
    for batch in 0..10 {
        let (n, d, l) = (rng.gen_range(2..=8), rng.gen_range(1..=4), rng.gen_range(2..=3));
        let x = Matrix::from_rows(&rows(&mut rng, n, d, -2.0, 2.0)).unwrap();
        let classes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..l)).collect();

        let mut lm = LogisticModel::zeros(d, l);
        let tasks = lm.biases.len();
        let t = Matrix::from_rows(
            &classes
                .iter()
                .map(|&c| (0..tasks).map(|k| f64::from(u8::from(if tasks == 1 { c == 1 } else { c == k }))).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let p: Vec<f64> = lm.params().iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        lm.set_params(&p);
        let (_, g) = logistic_loss_grad(&lm, &x, &t);
        let numeric = oracle::central_difference(
            |q| {
                let mut m = lm.clone();
                m.set_params(q);
                logistic_loss_grad(&m, &x, &t).0
            },
            &p,
            1e-5,
        );
        for (a, b) in g.params().iter().zip(&numeric) {
            worst_logistic = worst_logistic.max(oracle::relative_error(*a, *b, 1e-4));
        }

        let h = rng.gen_range(1..=6);
        let mm = MlpModel::random(d, h, l, batch);
        let t = Matrix::from_rows(
            &classes
                .iter()
                .map(|&c| (0..l).map(|k| f64::from(u8::from(k == c))).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let p = mm.params();
        let (_, g) = mlp_loss_grad(&mm, &x, &t);
        let numeric = oracle::central_difference(
            |q| {
                let mut m = mm.clone();
                m.set_params(q);
                mlp_loss_grad(&m, &x, &t).0
            },
            &p,
            1e-5,
        );
        for (a, b) in g.params().iter().zip(&numeric) {
            worst_mlp = worst_mlp.max(oracle::relative_error(*a, *b, 1e-4));
        }
    }
    check(
        worst_logistic <= 1e-5 && worst_mlp <= 1e-5,
        format!("10 batches each, max relative error logistic {worst_logistic:.1e}, mlp {worst_mlp:.1e}"),
    )
}

fn class_report(c: &Comparison, kind: ModelKind) -> String {
    let row = c.rows.iter().find(|r| r.kind == kind).unwrap();
    let per: Vec<String> = c
        .class_names
        .iter()
        .zip(&row.metrics.per_class)
        .map(|(name, m)| format!("{name} sens {:.3} spec {:.3}", m.sensitivity, m.specificity))
        .collect();
    format!("{kind} acc {:.3} ({})", row.metrics.accuracy, per.join(", "))
}

fn ring_accuracy() -> Outcome {
    let start = Instant::now();
    let data = ring_dataset(500, 7).map_err(|e| e.to_string())?;
    let c = compare_models(&data, &CompareConfig::default(), 7).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let acc = |k| c.rows.iter().find(|r| r.kind == k).unwrap().metrics.accuracy;
    let gap = acc(ModelKind::Rbf) - acc(ModelKind::Logistic);
    check(
        gap >= 0.10 && elapsed < 30.0 && c.split.train.len() == 300,
        format!(
            "300/200 split, gap {gap:.3}; {}; {}; {elapsed:.2}s",
            class_report(&c, ModelKind::Rbf),
            class_report(&c, ModelKind::Logistic)
        ),
    )
}

fn speed_report() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    cli(dir.path(), &["gen-data", "--n", "500", "--seed", "0", "--out", "syn.csv"])?;
    cli(dir.path(), &["compare", "--data", "syn.csv", "--out", "cmp.csv"])?;
    let csv = fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap_or("").split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (Some(ti), Some(ta)) = (col("train_seconds"), col("train_accuracy")) else {
        return Err("timing columns missing".into());
    };
    let mut seen = Vec::new();
    for line in csv.lines().skip(1) {
        let c: Vec<&str> = line.split(',').collect();
        seen.push((c[0].to_string(), c[ta].parse::<f64>().unwrap(), c[ti].parse::<f64>().unwrap()));
    }
    let find = |k: &str| seen.iter().find(|s| s.0 == k).cloned();
    let (Some(rbf), Some(mlp)) = (find("rbf"), find("mlp")) else {
        return Err("comparison rows missing".into());
    };
    let verdict = if rbf.1 < 0.95 || mlp.1 < 0.95 {
        "not applicable (a model stayed below 0.95 training accuracy)"
    } else if rbf.2 < mlp.2 {
        "holds"
    } else {
        "WARNING: violated"
    };
    Ok(format!(
        "soft: rbf {:.4}s (train acc {:.3}) vs mlp {:.4}s (train acc {:.3}); {verdict}",
        rbf.2, rbf.1, mlp.2, mlp.1
    ))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    fs::write(d.join("fixture.csv"), rbfn::FIXTURE_PATIENTS10).unwrap();
    let read = |name: &str| fs::read_to_string(d.join(name)).unwrap();
    let strip_seconds = |s: String| s.lines().map(|l| l.rsplit_once(',').map_or(l, |p| p.0).to_string()).collect::<Vec<_>>();

    let mut artifacts = Vec::new();
    for tag in ["a", "b"] {
        let f = |stem: &str, ext: &str| format!("{stem}_{tag}.{ext}");
        cli(d, &["gen-data", "--n", "200", "--seed", "11", "--noise", "0.05", "--out", &f("g", "csv")])?;
        cli(d, &["train", "--data", "fixture.csv", "--hidden-grid", "2,4", "--seed", "3", "--model", &f("m", "json"), "--out", &f("run", "json")])?;
        cli(d, &["predict", "--model", &f("m", "json"), "--data", &f("g", "csv"), "--out", &f("p", "csv")])?;
        cli(d, &["evaluate", "--data", &f("g", "csv"), "--hidden", "8", "--seed", "3", "--out", &f("e", "csv")])?;
        cli(d, &["cv", "--data", &f("g", "csv"), "--hidden", "8", "--seed", "3", "--out", &f("c", "csv")])?;
        cli(d, &["compare", "--data", &f("g", "csv"), "--hidden", "8", "--mlp-epochs", "200", "--seed", "3", "--out", &f("k", "csv")])?;
        let mut run = vec![
            read(&f("g", "csv")),
            read(&f("m", "json")),
            read(&f("run", "json")).replace(&f("m", "json"), "").replace(&f("run", "json"), ""),
            read(&f("p", "csv")),
            read(&f("e", "csv")),
            read(&f("c", "csv")),
        ];
        run.extend(strip_seconds(read(&f("k", "csv"))));
        artifacts.push(run);
    }
    let identical = artifacts[0] == artifacts[1];

    let model = persist::load(&read("m_a.json")).map_err(|e| e.to_string())?;
    let reloaded = persist::load(&persist::save(&model).unwrap()).map_err(|e| e.to_string())?;
    let recs = parse_csv(read("g_a.csv").as_bytes(), &CsvSchema::default()).unwrap();
    let x = encode_features(&recs, model.feature_names()).unwrap();
    let mut worst: f64 = 0.0;
    for r in x.values().row_iter() {
        for (p, q) in model.predict_proba(r).unwrap().iter().zip(reloaded.predict_proba(r).unwrap()) {
            worst = worst.max((p - q).abs());
        }
    }
    check(
        identical && worst <= 1e-12,
        format!(
            "six subcommands run twice: artifacts {}; reload max probability change {worst:.1e}",
            if identical { "byte-identical" } else { "DIFFER" }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("fixture reproduction", fixture_reproduction),
        ("exact interpolation", exact_interpolation),
        ("least-squares oracle", least_squares_oracle),
        ("k-means", kmeans_criteria),
        ("scaler", scaler_criteria),
        ("baseline gradient checks", gradient_checks),
        ("ring accuracy: rbf vs logistic", ring_accuracy),
        ("training speed: rbf vs mlp", speed_report),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 || std::env::var_os("RBFN_ACCEPTANCE_STRICT").is_none() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
