use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use eigenperturb::dataset::{
    build_samples, check_colocated, hifi_anisotropy, load_flow_csv, load_stress_csv, rans_states,
    read_features_csv, read_table, read_targets_csv, resample_nearest, split, target_records,
    write_features_csv, write_flow_csv, write_table, write_targets_csv, FeatureTable,
    FlowFieldSnapshot, GridDims,
};
use eigenperturb::features::{
    compute_feature_field, compute_gradients, feature_extrema, GradientField, FEATURE_NAMES,
    FEATURE_RANGES,
};
use eigenperturb::nn::{
    load_model, predict_field, save_model, train, write_history_csv, RegressionMetrics,
};
use eigenperturb::perturb::{apply_perturbation, export_field_csv, export_perturbed_stresses};
use eigenperturb::tensor::AnisotropyState;
use eigenperturb::{Error, Result};

use crate::config::PipelineConfig;
use crate::{Command, Paths};

pub fn run(command: Command, cfg: &PipelineConfig, paths: &Paths) -> Result<()> {
    match command {
        Command::Gradients => gradients(cfg),
        Command::Features => features(cfg),
        Command::Targets => targets(cfg, paths),
        Command::Train => train_model(cfg, paths),
        Command::Predict => predict(cfg, paths),
        Command::Perturb => perturb(cfg, paths),
        Command::Evaluate => evaluate(cfg, paths),
        Command::ExportPlot => export_plot(cfg, paths),
    }
}

fn input(
    explicit: &Option<PathBuf>,
    cfg: &PipelineConfig,
    default_name: &str,
    what: &str,
) -> Result<PathBuf> {
    let path = explicit.clone().unwrap_or_else(|| cfg.output(default_name));
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::Config(format!(
            "{what} file '{}' does not exist",
            path.display()
        )))
    }
}

fn load_rans(cfg: &PipelineConfig) -> Result<(FlowFieldSnapshot, GradientField)> {
    let path = cfg.require_file(&cfg.rans_file, "rans_file")?;
    let snapshot = load_flow_csv(&path, &cfg.schema()?)?;
    let gradients = compute_gradients(&snapshot)?;
    Ok((snapshot, gradients))
}

fn load_rans_states(cfg: &PipelineConfig) -> Result<(FlowFieldSnapshot, Vec<AnisotropyState>)> {
    let (snapshot, gradients) = load_rans(cfg)?;
    let (states, diag) = rans_states(&snapshot, &gradients)?;
    if diag.floored + diag.clipped > 0 {
        println!(
            "rans anisotropy: {} points at k floor, {} clipped to realizable",
            diag.floored, diag.clipped
        );
    }
    Ok((snapshot, states))
}

fn gradients(cfg: &PipelineConfig) -> Result<()> {
    let (mut snapshot, g) = load_rans(cfg)?;
    snapshot.gradients = Some(g);
    snapshot.file_grad_k = true;
    let out = cfg.output("gradients.csv");
    write_flow_csv(&snapshot, &out, &cfg.metadata())?;
    println!(
        "gradients: wrote {} ({} points)",
        out.display(),
        snapshot.len()
    );
    Ok(())
}

fn features(cfg: &PipelineConfig) -> Result<()> {
    let (snapshot, g) = load_rans(cfg)?;
    let feats = compute_feature_field(&snapshot, &g)?;
    let table = FeatureTable {
        index: (0..feats.len()).collect(),
        x: snapshot.x.clone(),
        y: snapshot.y.clone(),
        features: feats,
        dims: snapshot.dims,
    };
    let out = cfg.output("features.csv");
    write_features_csv(&table, &out, &cfg.metadata())?;
    println!(
        "features: wrote {} ({} rows)",
        out.display(),
        table.features.len()
    );
    println!("{:<4} {:>14} {:>14}  status", "name", "min", "max");
    let mut all_ok = true;
    for (j, (lo, hi)) in feature_extrema(&table.features).into_iter().enumerate() {
        let (rlo, rhi) = FEATURE_RANGES[j];
        let ok = lo >= rlo && hi <= rhi;
        all_ok &= ok;
        println!(
            "{:<4} {:>14.6e} {:>14.6e}  {}",
            FEATURE_NAMES[j],
            lo,
            hi,
            if ok { "OK" } else { "OUT OF RANGE" }
        );
    }
    println!(
        "feature ranges: {}",
        if all_ok { "OK" } else { "OUT OF RANGE" }
    );
    Ok(())
}

fn colocation_tolerance(x: &[f64], y: &[f64]) -> f64 {
    let extent = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (hi - lo).abs()
    };
    1e-9 * extent(x).max(extent(y)).max(1.0)
}

fn targets(cfg: &PipelineConfig, paths: &Paths) -> Result<()> {
    let (snapshot, rans) = load_rans_states(cfg)?;
    let hifi_path = cfg.require_file(&cfg.hifi_file, "hifi_file")?;
    let hifi = load_stress_csv(&hifi_path, &cfg.hifi_schema()?)?;
    let tol = colocation_tolerance(&snapshot.x, &snapshot.y);
    let stresses = match check_colocated(&snapshot.x, &snapshot.y, &hifi.x, &hifi.y, tol) {
        Ok(()) => hifi.stresses,
        Err(e) if paths.resample => {
            let (s, worst) =
                resample_nearest(&hifi.x, &hifi.y, &hifi.stresses, &snapshot.x, &snapshot.y)?;
            println!("targets: files not co-located ({e}); nearest-neighbour resampling, worst distance {worst:e}");
            s
        }
        Err(e) => return Err(e),
    };
    let (hifi_states, diag) = hifi_anisotropy(&stresses)?;
    if diag.floored + diag.clipped > 0 {
        println!(
            "high-fidelity anisotropy: {} points at k floor, {} clipped to realizable",
            diag.floored, diag.clipped
        );
    }
    let records = target_records(&snapshot.x, &snapshot.y, &rans, &hifi_states)?;
    let out = cfg.output("targets.csv");
    write_targets_csv(&records, snapshot.dims, &out, &cfg.metadata())?;
    let max = records.iter().map(|r| r.delta_b).fold(0.0, f64::max);
    let mean = records.iter().map(|r| r.delta_b).sum::<f64>() / records.len().max(1) as f64;
    println!(
        "targets: wrote {} ({} rows, mean delta_b {mean:.6}, max {max:.6})",
        out.display(),
        records.len()
    );
    Ok(())
}

fn train_model(cfg: &PipelineConfig, paths: &Paths) -> Result<()> {
    let features = read_features_csv(&input(&paths.features, cfg, "features.csv", "features")?)?;
    let targets = read_targets_csv(&input(&paths.targets, cfg, "targets.csv", "targets")?)?;
    if features.index.len() != targets.len()
        || features
            .index
            .iter()
            .zip(&targets)
            .any(|(i, t)| *i != t.index)
    {
        return Err(Error::Pairing(format!(
            "features ({} rows) and targets ({} rows) are not co-indexed",
            features.index.len(),
            targets.len()
        )));
    }
    let tc = cfg.train_config();
    let delta: Vec<f64> = targets.iter().map(|t| t.delta_b).collect();
    let tag = cfg
        .schema()
        .map(|s| s.tag)
        .unwrap_or_else(|_| "dataset".into());
    let samples = build_samples(&features.features, &delta, &tag)?;
    let set = split(
        samples,
        &[1.0 - tc.validation_fraction, tc.validation_fraction],
        tc.seed,
    )?;
    let outcome = train(&set, &tc)?;

    let mut meta = cfg.metadata();
    meta.push(format!("learning_rate: {:?}", tc.learning_rate));
    meta.push(format!("best_epoch: {}", outcome.best_epoch));
    let history_path = cfg.output("history.csv");
    write_history_csv(&outcome.history, &history_path, &meta)?;

    let model_meta: BTreeMap<String, String> = meta
        .iter()
        .filter_map(|c| c.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let model_path = paths
        .model
        .clone()
        .unwrap_or_else(|| cfg.output("model.json"));
    save_model(&outcome.model, &model_path, &model_meta)?;

    let best = outcome.best();
    let last = outcome.history.last().expect("at least one epoch");
    println!(
        "train: {} epochs, learning rate {:?}",
        outcome.history.len(),
        tc.learning_rate
    );
    println!(
        "train: final train_loss {:.6e} val_loss {:.6e}",
        last.train_loss, last.val_loss
    );
    println!(
        "train: best epoch {} train_loss {:.6e} val_loss {:.6e}{}",
        best.epoch,
        best.train_loss,
        best.val_loss,
        if outcome.stopped_early {
            " (early stop)"
        } else {
            ""
        }
    );
    println!(
        "train: wrote {} and {}",
        model_path.display(),
        history_path.display()
    );
    Ok(())
}

fn predict(cfg: &PipelineConfig, paths: &Paths) -> Result<()> {
    let (model, _) = load_model(&input(&paths.model, cfg, "model.json", "model")?)?;
    let features = read_features_csv(&input(&paths.features, cfg, "features.csv", "features")?)?;
    let pred = predict_field(&model, &features.features)?;
    let out = paths
        .predictions
        .clone()
        .unwrap_or_else(|| cfg.output("delta_b.csv"));
    let index: Vec<f64> = features.index.iter().map(|&i| i as f64).collect();
    export_field_csv(
        &out,
        &features.x,
        &features.y,
        &[
            ("index", &index),
            ("delta_b", &pred.values),
            ("raw", &pred.raw),
        ],
        features.dims,
        &cfg.metadata(),
    )?;
    println!(
        "predict: wrote {} ({} points)",
        out.display(),
        pred.values.len()
    );
    println!(
        "predict: clamped {} of {} raw outputs to [0, 1]",
        pred.clamped,
        pred.values.len()
    );
    Ok(())
}

struct PredictionFile {
    x: Vec<f64>,
    y: Vec<f64>,
    delta_b: Vec<f64>,
    dims: Option<GridDims>,
}

fn read_predictions(path: &Path) -> Result<PredictionFile> {
    let t = read_table(path)?;
    Ok(PredictionFile {
        x: t.require("x", "x coordinate")?.to_vec(),
        y: t.require("y", "y coordinate")?.to_vec(),
        delta_b: t.require("delta_b", "predicted delta_b")?.to_vec(),
        dims: t.dims_comment(),
    })
}

fn perturb(cfg: &PipelineConfig, paths: &Paths) -> Result<()> {
    let (snapshot, states) = load_rans_states(cfg)?;
    let pred = read_predictions(&input(
        &paths.predictions,
        cfg,
        "delta_b.csv",
        "predictions",
    )?)?;
    if pred.delta_b.len() != states.len() {
        return Err(Error::Pairing(format!(
            "{} predicted values for {} RANS points",
            pred.delta_b.len(),
            states.len()
        )));
    }
    let field = apply_perturbation(&states, &snapshot.k, &pred.delta_b)?;
    let written = export_perturbed_stresses(
        &cfg.output("perturbed.csv"),
        &field,
        &snapshot.x,
        &snapshot.y,
        snapshot.dims,
        &cfg.metadata(),
    )?;
    for p in &written {
        println!("perturb: wrote {}", p.display());
    }
    Ok(())
}

fn evaluate(cfg: &PipelineConfig, paths: &Paths) -> Result<()> {
    let pred = read_predictions(&input(
        &paths.predictions,
        cfg,
        "delta_b.csv",
        "predictions",
    )?)?;
    let targets = read_targets_csv(&input(&paths.targets, cfg, "targets.csv", "targets")?)?;
    let truth: Vec<f64> = targets.iter().map(|t| t.delta_b).collect();
    let m = RegressionMetrics::compute(&pred.delta_b, &truth)?;
    let out = cfg.output("metrics.csv");
    write_table(
        &out,
        &cfg.metadata(),
        &["count", "mse", "mae", "r2"],
        &[&[m.count as f64], &[m.mse], &[m.mae], &[m.r2]],
    )?;
    println!(
        "evaluate: n {} mse {:.6e} mae {:.6e} r2 {:.6}",
        m.count, m.mse, m.mae, m.r2
    );
    println!("evaluate: wrote {}", out.display());
    Ok(())
}

fn export_plot(cfg: &PipelineConfig, paths: &Paths) -> Result<()> {
    let targets_path = paths
        .targets
        .clone()
        .unwrap_or_else(|| cfg.output("targets.csv"));
    let pred_path = paths
        .predictions
        .clone()
        .unwrap_or_else(|| cfg.output("delta_b.csv"));
    let targets = if targets_path.is_file() {
        Some(read_targets_csv(&targets_path)?)
    } else {
        None
    };
    let pred = if pred_path.is_file() {
        Some(read_predictions(&pred_path)?)
    } else {
        None
    };
    let (x, y, dims) = match (&targets, &pred) {
        (Some(t), _) => (
            t.iter().map(|r| r.x).collect::<Vec<_>>(),
            t.iter().map(|r| r.y).collect::<Vec<_>>(),
            read_table(&targets_path)?.dims_comment(),
        ),
        (None, Some(p)) => (p.x.clone(), p.y.clone(), p.dims),
        (None, None) => {
            return Err(Error::Config(format!(
                "nothing to plot: neither '{}' nor '{}' exists",
                targets_path.display(),
                pred_path.display()
            )))
        }
    };
    let mut columns: Vec<(&str, Vec<f64>)> = Vec::new();
    if let Some(t) = &targets {
        columns.push(("x_bary_rans", t.iter().map(|r| r.x_bary_rans).collect()));
        columns.push(("y_bary_rans", t.iter().map(|r| r.y_bary_rans).collect()));
        columns.push(("x_bary_hifi", t.iter().map(|r| r.x_bary_hifi).collect()));
        columns.push(("y_bary_hifi", t.iter().map(|r| r.y_bary_hifi).collect()));
        columns.push(("delta_b_true", t.iter().map(|r| r.delta_b).collect()));
    }
    if let Some(p) = &pred {
        if p.delta_b.len() != x.len() {
            return Err(Error::Pairing(format!(
                "{} predictions for {} target points",
                p.delta_b.len(),
                x.len()
            )));
        }
        columns.push(("delta_b_pred", p.delta_b.clone()));
    }
    let refs: Vec<(&str, &[f64])> = columns.iter().map(|(h, v)| (*h, v.as_slice())).collect();
    let out = cfg.output("plot.csv");
    export_field_csv(&out, &x, &y, &refs, dims, &cfg.metadata())?;
    println!(
        "export-plot: wrote {} ({} points, {} fields)",
        out.display(),
        x.len(),
        refs.len()
    );
    Ok(())
}
