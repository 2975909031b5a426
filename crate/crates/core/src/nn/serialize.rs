//! Versioned JSON model files.
//!
//! ```json
//! {
//!   "format": "eigenperturb-mlp",
//!   "version": 1,
//!   "layer_sizes": [9, 15, ..., 1],
//!   "activation": "relu",
//!   "dropout": 0.1,
//!   "standardization": { "mean": [...], "scale": [...] },
//!   "layers": [ { "weights": [...], "biases": [...] }, ... ],
//!   "metadata": { "seed": "42", ... }
//! }
//! ```
//!
//! Weights are row-major `outputs × inputs`. Floats are written in shortest
//! round-trip form, so loading reproduces every parameter bit for bit.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Activation, Layer, MlpModel, Standardizer};
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "eigenperturb-mlp";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct LayerFile {
    weights: Vec<f64>,
    biases: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    layer_sizes: Vec<usize>,
    activation: Activation,
    dropout: f64,
    standardization: Option<Standardizer>,
    layers: Vec<LayerFile>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

pub fn model_to_string(model: &MlpModel, metadata: &BTreeMap<String, String>) -> Result<String> {
    let file = ModelFile {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        layer_sizes: model.layer_sizes.clone(),
        activation: model.activation,
        dropout: model.dropout,
        standardization: model.standardization.clone(),
        layers: model
            .layers
            .iter()
            .map(|l| LayerFile {
                weights: l.weights.clone(),
                biases: l.biases.clone(),
            })
            .collect(),
        metadata: metadata.clone(),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Internal(format!("model encode: {e}")))
}

fn load_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::ModelLoad {
        location: location.into(),
        message: message.into(),
    }
}

/// Parses and validates a model; returns it with its metadata block.
pub fn model_from_str(text: &str) -> Result<(MlpModel, BTreeMap<String, String>)> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| {
        load_err(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    if file.format != MODEL_FORMAT {
        return Err(load_err(
            "format",
            format!("unexpected format '{}'", file.format),
        ));
    }
    if file.version != MODEL_VERSION {
        return Err(load_err(
            "version",
            format!(
                "unsupported version {} (expected {MODEL_VERSION})",
                file.version
            ),
        ));
    }
    let sizes = &file.layer_sizes;
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(load_err(
            "layer_sizes",
            format!("invalid layer sizes {sizes:?}"),
        ));
    }
    if file.layers.len() != sizes.len() - 1 {
        return Err(load_err(
            "layers",
            format!(
                "{} layers declared by sizes, {} present",
                sizes.len() - 1,
                file.layers.len()
            ),
        ));
    }
    if !(0.0..1.0).contains(&file.dropout) {
        return Err(load_err(
            "dropout",
            format!("rate {} outside [0, 1)", file.dropout),
        ));
    }
    let mut layers = Vec::with_capacity(file.layers.len());
    for (i, (lf, w)) in file.layers.into_iter().zip(sizes.windows(2)).enumerate() {
        let (inputs, outputs) = (w[0], w[1]);
        if lf.weights.len() != inputs * outputs {
            return Err(load_err(
                format!("layers[{i}].weights"),
                format!(
                    "shape mismatch: declared {outputs}x{inputs} = {} weights, found {}",
                    inputs * outputs,
                    lf.weights.len()
                ),
            ));
        }
        if lf.biases.len() != outputs {
            return Err(load_err(
                format!("layers[{i}].biases"),
                format!(
                    "shape mismatch: expected {outputs} biases, found {}",
                    lf.biases.len()
                ),
            ));
        }
        layers.push(Layer {
            inputs,
            outputs,
            weights: lf.weights,
            biases: lf.biases,
        });
    }
    if let Some(s) = &file.standardization {
        if s.mean.len() != sizes[0] || s.scale.len() != sizes[0] {
            return Err(load_err(
                "standardization",
                format!("expected {} entries per vector", sizes[0]),
            ));
        }
    }
    let model = MlpModel {
        layer_sizes: file.layer_sizes,
        activation: file.activation,
        dropout: file.dropout,
        standardization: file.standardization,
        layers,
    };
    model
        .validate()
        .map_err(|e| load_err("parameters", e.to_string()))?;
    Ok((model, file.metadata))
}

pub fn save_model(
    model: &MlpModel,
    path: &Path,
    metadata: &BTreeMap<String, String>,
) -> Result<()> {
    let text = model_to_string(model, metadata)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<(MlpModel, BTreeMap<String, String>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text).map_err(|e| match e {
        Error::ModelLoad { location, message } => Error::ModelLoad {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}
