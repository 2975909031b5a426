//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.
//!
//! Criterion 9 runs on real data when `EPM_WAVY_RANS` and `EPM_WAVY_HIFI`
//! point at co-located RANS and high-fidelity CSV files (optionally
//! `EPM_WAVY_SCHEMA` for a schema TOML and `EPM_WAVY_EPOCHS` for the
//! training budget); otherwise only the synthetic surrogate is checked.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use eigenperturb::dataset::{
    build_samples, check_colocated, hifi_anisotropy, load_flow_csv, load_stress_csv,
    rans_anisotropy, read_features_csv, read_targets_csv, split, split_counts, target_records,
    write_features_csv, write_targets_csv, FeatureTable, Schema, Split, TrainingSample,
};
use eigenperturb::features::{
    compute_feature_field, compute_gradients, features_from_state, FeatureVector, FEATURE_COUNT,
};
use eigenperturb::nn::{
    load_model, predict_field, save_model, train, xavier_init, Activation, MlpModel, Mode,
    RegressionMetrics, TrainConfig,
};
use eigenperturb::perturb::lower_band_mean;
use eigenperturb::synthetic::{reference_delta_b, synthetic_case, SYNTHETIC_CONSTANTS};
use eigenperturb::tensor::{
    barycentric_from_eigs, eig_sym3, eigs_from_barycentric, perturb_eigenvalues,
    realizability_check, Corner, SymTensor3,
};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(1);
    let (mut recon, mut bary, mut inverse) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let p = common::random_triangle_point(&mut rng);
        let lambda = eigs_from_barycentric(&p).unwrap();
        let q = common::random_rotation(&mut rng);
        let b = SymTensor3::diag(lambda[0], lambda[1], lambda[2]).rotate(&q);
        let e = eig_sym3(&b).unwrap();
        recon = recon.max((e.reconstruct() - b).frobenius());
        let back = barycentric_from_eigs(e.values).unwrap();
        bary = bary.max(back.distance(&p));
        let l2 = eigs_from_barycentric(&back).unwrap();
        let forward = barycentric_from_eigs(l2).unwrap();
        inverse = inverse.max(forward.distance(&back));
    }
    let corners_exact = Corner::ALL.iter().all(|c| {
        let p = barycentric_from_eigs(c.eigenvalues()).unwrap();
        (p.x, p.y) == c.planar()
    });
    let t = start.elapsed();
    outcome(
        recon < 1e-10 && bary < 1e-12 && inverse < 1e-12 && corners_exact && t < Duration::from_secs(5),
        format!(
            "reconstruction {recon:.2e}, barycentric roundtrip {:.2e}, corners exact {corners_exact}, {:.2}s",
            bary.max(inverse),
            secs(t)
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(2);
    let n = 100_000;
    let mut passed = 0usize;
    let mut identity = true;
    let mut absorbed = true;
    for _ in 0..n {
        let p = common::random_triangle_point(&mut rng);
        let corner = Corner::ALL[rng.random_range(0..3)];
        let delta: f64 = rng.random_range(0.0..=1.0);
        let moved = perturb_eigenvalues(&p, delta, corner).unwrap();
        if realizability_check(eigs_from_barycentric(&moved).unwrap()).passed() {
            passed += 1;
        }
        identity &= perturb_eigenvalues(&p, 0.0, corner).unwrap() == p;
        let at = perturb_eigenvalues(&p, 1.0, corner).unwrap();
        absorbed &= (at.x, at.y) == corner.planar();
    }
    let t = start.elapsed();
    outcome(
        passed == n && identity && absorbed && t < Duration::from_secs(10),
        format!(
            "{passed}/{n} realizable, identity {identity}, corner absorption {absorbed}, {:.2}s",
            secs(t)
        ),
    )
}

fn sample_loss(model: &MlpModel, x: &[f64], t: f64) -> f64 {
    let y = model.predict(x).unwrap();
    (y - t) * (y - t)
}

/// Fourth-order central difference of the loss with respect to one parameter.
fn numeric_derivative(
    model: &MlpModel,
    x: &[f64],
    t: f64,
    layer: usize,
    weight: Option<usize>,
    bias: Option<usize>,
) -> f64 {
    let h = 1e-3;
    let at = |offset: f64| {
        let mut m = model.clone();
        match (weight, bias) {
            (Some(w), _) => m.layers[layer].weights[w] += offset,
            (_, Some(b)) => m.layers[layer].biases[b] += offset,
            _ => unreachable!(),
        }
        sample_loss(&m, x, t)
    };
    (8.0 * (at(h / 2.0) - at(-h / 2.0)) - (at(h) - at(-h))) / (6.0 * h)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(3);
    let mut worst = 0.0f64;
    let nets = 24;
    let mut checked = 0usize;
    for net in 0..nets {
        let depth = rng.random_range(1..=3);
        let mut sizes = vec![rng.random_range(2..=9)];
        for _ in 0..depth {
            sizes.push(rng.random_range(2..=8));
        }
        sizes.push(1);
        let mut model = xavier_init(&sizes, Activation::Tanh, 0.0, 100 + net).unwrap();
        for l in &mut model.layers {
            l.biases
                .iter_mut()
                .for_each(|b| *b = rng.random_range(-0.5..0.5));
        }
        let x: Vec<f64> = (0..sizes[0]).map(|_| rng.random_range(-1.5..1.5)).collect();
        let t: f64 = rng.random_range(-1.0..1.0);
        let (_, cache) = model.forward(&x, Mode::Infer, &mut rng).unwrap();
        let grads = model.backward(&cache, t).unwrap();
        for (li, layer) in model.layers.iter().enumerate() {
            for w in 0..layer.weights.len() {
                let a = grads.weights[li][w];
                let n = numeric_derivative(&model, &x, t, li, Some(w), None);
                worst = worst.max((a - n).abs() / a.abs().max(n.abs()).max(1e-6));
                checked += 1;
            }
            for b in 0..layer.biases.len() {
                let a = grads.biases[li][b];
                let n = numeric_derivative(&model, &x, t, li, None, Some(b));
                worst = worst.max((a - n).abs() / a.abs().max(n.abs()).max(1e-6));
                checked += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-6 && t < Duration::from_secs(30),
        format!(
            "{nets} tanh networks, {checked} parameters, max relative error {worst:.2e}, {:.2}s",
            secs(t)
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = common::rng(4);
    let c = SYNTHETIC_CONSTANTS;
    let mut worst = 0.0f64;
    let mut out_of_range = 0usize;
    for _ in 0..1000 {
        let s = common::random_local_state(&mut rng);
        let f = features_from_state(&s, &c);
        out_of_range += usize::from(!f.range_violations().is_empty());
        let q = common::random_rotation(&mut rng);
        let g = features_from_state(&s.rotated(&q), &c);
        for j in 0..FEATURE_COUNT {
            worst = worst.max((f.0[j] - g.0[j]).abs());
        }
    }
    let mut s = common::random_local_state(&mut rng);
    s.k = 100.0;
    s.wall_distance = 10.0;
    let clamp_hit = features_from_state(&s, &c).0[2] == 2.0;
    outcome(
        worst < 1e-10 && out_of_range == 0 && clamp_hit,
        format!("1000 states, max rotation change {worst:.2e}, {out_of_range} out of range, q3 clamp at 2: {clamp_hit}"),
    )
}

fn synthetic_training_config() -> TrainConfig {
    TrainConfig {
        learning_rate: 2.5e-4,
        batch_size: 32,
        max_epochs: 400,
        patience: 40,
        dropout: 0.0,
        seed: 5,
        ..TrainConfig::default()
    }
}

/// Predicted Δ_B and point heights over the synthetic field.
type PredictedField = (Vec<f64>, Vec<f64>);

/// Returns the outcome and the trained model's predicted field (for 9).
fn criterion_5() -> (Outcome, Option<PredictedField>) {
    let start = Instant::now();
    let case = synthetic_case(64, 64, reference_delta_b).unwrap();
    let gradients = compute_gradients(&case.rans).unwrap();
    let features = compute_feature_field(&case.rans, &gradients).unwrap();
    let (rans, _) = rans_anisotropy(&case.rans, &gradients).unwrap();
    let (hifi, _) = hifi_anisotropy(&case.hifi_stresses).unwrap();
    let records = target_records(&case.rans.x, &case.rans.y, &rans, &hifi).unwrap();
    let targets: Vec<f64> = records.iter().map(|r| r.delta_b).collect();
    let samples = build_samples(&features, &targets, "synthetic").unwrap();
    let cfg = synthetic_training_config();
    let set = split(samples, &[0.7, 0.15, 0.15], cfg.seed).unwrap();
    let trained = match train(&set, &cfg) {
        Ok(t) => t,
        Err(e) => return (outcome(false, format!("training failed: {e}")), None),
    };
    let test: Vec<&TrainingSample> = set.subset(Split::Test);
    let test_features: Vec<FeatureVector> = test.iter().map(|s| s.features).collect();
    let test_truth: Vec<f64> = test.iter().map(|s| s.target).collect();
    let pred = predict_field(&trained.model, &test_features).unwrap();
    let m = RegressionMetrics::compute(&pred.values, &test_truth).unwrap();
    let field = predict_field(&trained.model, &features).unwrap();
    let t = start.elapsed();
    (
        outcome(
            m.r2 > 0.9 && m.mse < 5e-3 && t < Duration::from_secs(600),
            format!(
                "64x64 field, {} held-out points, R2 {:.4}, MSE {:.2e}, {} epochs, {:.1}s",
                m.count,
                m.r2,
                m.mse,
                trained.history.len(),
                secs(t)
            ),
        ),
        Some((field.values, case.rans.y.clone())),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let case = synthetic_case(32, 32, reference_delta_b).unwrap();
    let mut rng = common::rng(6);
    let picks: Vec<usize> = (0..100)
        .map(|_| rng.random_range(0..case.features.len()))
        .collect();
    let feats: Vec<FeatureVector> = picks.iter().map(|&i| case.features[i]).collect();
    let targets: Vec<f64> = picks.iter().map(|&i| case.true_delta_b[i]).collect();
    let samples = build_samples(&feats, &targets, "overfit").unwrap();
    let mut set = split(samples, &[0.8, 0.2], 6).unwrap();
    // every sample trains; validation mirrors the training set
    set.assignment.iter_mut().for_each(|a| *a = Split::Train);
    let mut mirror = set.samples.clone();
    set.samples.append(&mut mirror);
    set.assignment
        .extend(std::iter::repeat_n(Split::Validation, 100));
    let cfg = TrainConfig {
        learning_rate: 2.5e-4,
        batch_size: 10,
        max_epochs: 3000,
        patience: 3000,
        dropout: 0.0,
        seed: 6,
        ..TrainConfig::default()
    };
    match train(&set, &cfg) {
        Ok(out) => {
            let mse = out.best().train_loss;
            outcome(
                mse < 1e-3,
                format!(
                    "100 samples, 9-[15x8]-1, train MSE {mse:.2e} after {} epochs, {:.1}s",
                    out.history.len(),
                    secs(start.elapsed())
                ),
            )
        }
        Err(e) => outcome(false, format!("training failed: {e}")),
    }
}

fn criterion_7() -> Outcome {
    let n = 16384;
    let samples: Vec<TrainingSample> = (0..n)
        .map(|i| TrainingSample {
            features: FeatureVector([i as f64; FEATURE_COUNT]),
            target: 0.5,
            index: i,
            tag: "grid".into(),
        })
        .collect();
    let counts = split_counts(n, &[0.8, 0.2]).unwrap();
    let a = split(samples.clone(), &[0.8, 0.2], 7).unwrap();
    let b = split(samples.clone(), &[0.8, 0.2], 7).unwrap();
    let c = split(samples, &[0.8, 0.2], 8).unwrap();
    let (train_n, val_n) = (a.count(Split::Train), a.count(Split::Validation));
    let deterministic = a.assignment == b.assignment;
    let seed_sensitive = a.assignment != c.assignment;
    outcome(
        counts == [13107, 3277] && train_n == 13107 && val_n == 3277 && deterministic && seed_sensitive,
        format!("{n} points -> {train_n}/{val_n}, same seed identical {deterministic}, other seed differs {seed_sensitive}"),
    )
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut model = xavier_init(
        &eigenperturb::nn::default_layer_sizes(),
        Activation::Relu,
        0.1,
        8,
    )
    .unwrap();
    model.standardization = Some(eigenperturb::nn::Standardizer {
        mean: (0..9).map(|i| 0.1 / (i + 3) as f64).collect(),
        scale: (0..9).map(|i| 1.0 + 1.0 / (i + 7) as f64).collect(),
    });
    let model_path = dir.path().join("model.json");
    save_model(&model, &model_path, &Default::default()).unwrap();
    let (loaded, _) = load_model(&model_path).unwrap();
    let mut rng = common::rng(8);
    let inputs: Vec<FeatureVector> = (0..500)
        .map(|_| FeatureVector(std::array::from_fn(|_| rng.random_range(-1.0..2.0))))
        .collect();
    let a = predict_field(&model, &inputs).unwrap();
    let b = predict_field(&loaded, &inputs).unwrap();
    let model_ok = a
        .raw
        .iter()
        .zip(&b.raw)
        .all(|(x, y)| x.to_bits() == y.to_bits());

    let case = synthetic_case(12, 10, reference_delta_b).unwrap();
    let table = FeatureTable {
        index: (0..case.features.len()).collect(),
        x: case.rans.x.clone(),
        y: case.rans.y.clone(),
        features: case.features.clone(),
        dims: case.rans.dims,
    };
    let fpath = dir.path().join("features.csv");
    write_features_csv(&table, &fpath, &["seed: 8".into()]).unwrap();
    let features_ok = read_features_csv(&fpath).unwrap() == table;

    let g = compute_gradients(&case.rans).unwrap();
    let (rans, _) = rans_anisotropy(&case.rans, &g).unwrap();
    let (hifi, _) = hifi_anisotropy(&case.hifi_stresses).unwrap();
    let records = target_records(&case.rans.x, &case.rans.y, &rans, &hifi).unwrap();
    let tpath = dir.path().join("targets.csv");
    write_targets_csv(&records, case.rans.dims, &tpath, &[]).unwrap();
    let targets_ok = read_targets_csv(&tpath).unwrap() == records;
    outcome(
        model_ok && features_ok && targets_ok,
        format!("model predictions bit-identical {model_ok}, features CSV exact {features_ok}, targets CSV exact {targets_ok}"),
    )
}

fn real_data_check(rans_path: &Path, hifi_path: &Path) -> eigenperturb::Result<(f64, f64)> {
    let schema = match std::env::var_os("EPM_WAVY_SCHEMA") {
        Some(p) => Schema::from_file(Path::new(&p))?,
        None => Schema::default(),
    };
    let snapshot = load_flow_csv(rans_path, &schema)?;
    let hifi_field = load_stress_csv(hifi_path, &schema)?;
    check_colocated(&snapshot.x, &snapshot.y, &hifi_field.x, &hifi_field.y, 1e-9)?;
    let g = compute_gradients(&snapshot)?;
    let features = compute_feature_field(&snapshot, &g)?;
    let (rans, _) = rans_anisotropy(&snapshot, &g)?;
    let (hifi, _) = hifi_anisotropy(&hifi_field.stresses)?;
    let targets: Vec<f64> = rans
        .iter()
        .zip(&hifi)
        .map(|(a, b)| a.barycentric.distance(&b.barycentric))
        .collect();
    let samples = build_samples(&features, &targets, &schema.tag)?;
    let set = split(samples, &[0.8, 0.2], 9)?;
    let epochs = std::env::var("EPM_WAVY_EPOCHS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(300);
    let cfg = TrainConfig {
        max_epochs: epochs,
        seed: 9,
        ..TrainConfig::default()
    };
    let model = train(&set, &cfg)?.model;
    let pred = predict_field(&model, &features)?;
    lower_band_mean(&pred.values, &snapshot.y, 0.2)
}

fn criterion_9(synthetic: Option<PredictedField>) -> Outcome {
    let surrogate = synthetic.map(|(pred, y)| lower_band_mean(&pred, &y, 0.2).unwrap());
    let surrogate_pass = surrogate.is_some_and(|(band, all)| band > all);
    let surrogate_text = match surrogate {
        Some((band, all)) => {
            format!("synthetic wavy wall: lowest-20% mean {band:.4} vs domain mean {all:.4}")
        }
        None => "synthetic wavy wall: no prediction available".into(),
    };
    match (std::env::var_os("EPM_WAVY_RANS"), std::env::var_os("EPM_WAVY_HIFI")) {
        (Some(r), Some(h)) => match real_data_check(Path::new(&r), Path::new(&h)) {
            Ok((band, all)) => outcome(
                band > all && surrogate_pass,
                format!("user data: lowest-20% mean {band:.4} vs domain mean {all:.4}; {surrogate_text}"),
            ),
            Err(e) => outcome(false, format!("user data failed: {e}; {surrogate_text}")),
        },
        _ => outcome(
            surrogate_pass,
            format!("user data not supplied (set EPM_WAVY_RANS/EPM_WAVY_HIFI), real-data check skipped; {surrogate_text}"),
        ),
    }
}

fn main() {
    let mut results = Vec::new();
    let run = |n: usize, name: &str, o: Outcome, results: &mut Vec<bool>| {
        println!(
            "criterion {n} [{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push(o.pass);
    };
    run(1, "eigen/barycentric suite", criterion_1(), &mut results);
    run(2, "perturbation realizability", criterion_2(), &mut results);
    run(3, "gradient oracle", criterion_3(), &mut results);
    run(4, "feature invariance", criterion_4(), &mut results);
    let (c5, field) = criterion_5();
    run(5, "synthetic end-to-end", c5, &mut results);
    run(6, "overfit sanity", criterion_6(), &mut results);
    run(7, "dataset arithmetic", criterion_7(), &mut results);
    run(8, "serialization", criterion_8(), &mut results);
    run(
        9,
        "qualitative wall concentration",
        criterion_9(field),
        &mut results,
    );
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
