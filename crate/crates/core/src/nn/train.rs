use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    xavier_init, Activation, AdamState, ForwardCache, Gradients, MlpModel, Mode, NoRng,
    Standardizer,
};
use crate::dataset::{write_table, SampleSet, Split, TrainingSample};
use crate::error::{Error, Result};
use crate::features::FEATURE_COUNT;

pub const DEFAULT_LEARNING_RATE: f64 = 2.5e-4;
pub const DEFAULT_BATCH_SIZE: usize = 256;
pub const DEFAULT_MAX_EPOCHS: usize = 2000;
pub const DEFAULT_PATIENCE: usize = 50;
pub const DEFAULT_DROPOUT: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub dropout: f64,
    pub seed: u64,
    pub validation_fraction: f64,
    pub activation: Activation,
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub standardize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: DEFAULT_LEARNING_RATE,
            batch_size: DEFAULT_BATCH_SIZE,
            max_epochs: DEFAULT_MAX_EPOCHS,
            patience: DEFAULT_PATIENCE,
            dropout: DEFAULT_DROPOUT,
            seed: 0,
            validation_fraction: 0.2,
            activation: Activation::Relu,
            hidden_layers: 8,
            hidden_width: 15,
            standardize: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.patience == 0 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("max epochs must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout must be in [0, 1), got {}",
                self.dropout
            )));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::Config(format!(
                "validation fraction must be in (0, 1), got {}",
                self.validation_fraction
            )));
        }
        if self.hidden_width == 0 {
            return Err(Error::Config("hidden width must be at least 1".into()));
        }
        Ok(())
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![FEATURE_COUNT];
        sizes.extend(std::iter::repeat_n(self.hidden_width, self.hidden_layers));
        sizes.push(1);
        sizes
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean squared error over the training subset, inference mode.
    pub train_loss: f64,
    pub val_loss: f64,
    pub learning_rate: f64,
    /// Seconds since training started.
    pub wall_time: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the lowest validation loss.
    pub model: MlpModel,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub stopped_early: bool,
}

impl TrainOutcome {
    pub fn best(&self) -> &EpochRecord {
        &self.history[self.best_epoch - 1]
    }
}

fn mean_squared_error(
    model: &MlpModel,
    set: &[&TrainingSample],
    cache: &mut ForwardCache,
) -> Result<f64> {
    let mut sum = 0.0;
    for s in set {
        let y = model.forward_into(&s.features.0, Mode::Infer, &mut NoRng, cache)?;
        sum += (y - s.target) * (y - s.target);
    }
    Ok(sum / set.len() as f64)
}

/// Mini-batch Adam on the summed squared error, keeping the parameters with
/// the best validation loss and stopping after `patience` epochs without
/// improvement.
pub fn train(samples: &SampleSet, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let train_set = samples.subset(Split::Train);
    let val_set = samples.subset(Split::Validation);
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::Config(format!(
            "training needs non-empty train and validation subsets (got {} and {})",
            train_set.len(),
            val_set.len()
        )));
    }

    let mut model = xavier_init(
        &config.layer_sizes(),
        config.activation,
        config.dropout,
        config.seed,
    )?;
    if config.standardize {
        model.standardization = Some(Standardizer::fit(
            train_set.iter().map(|s| s.features.0.as_slice()),
            FEATURE_COUNT,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut adam = AdamState::new(&model, config.learning_rate);
    let mut grads = Gradients::zeros_like(&model);
    let mut cache = ForwardCache::default();
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    let start = Instant::now();
    let mut history = Vec::new();
    let mut best = (f64::INFINITY, 0usize, model.clone());
    let mut stopped_early = false;

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        for (batch, chunk) in order.chunks(config.batch_size).enumerate() {
            grads.fill(0.0);
            for &i in chunk {
                let s = train_set[i];
                let y = model.forward_into(&s.features.0, Mode::Train, &mut rng, &mut cache)?;
                if !y.is_finite() {
                    return Err(Error::Divergence {
                        epoch,
                        batch: batch + 1,
                        message: format!("non-finite prediction for sample {}", s.index),
                    });
                }
                model.backward_into(&cache, s.target, &mut grads)?;
            }
            if !grads.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    batch: batch + 1,
                    message: "non-finite gradient".into(),
                });
            }
            adam.step(&mut model, &grads);
        }

        let train_loss = mean_squared_error(&model, &train_set, &mut cache)?;
        let val_loss = mean_squared_error(&model, &val_set, &mut cache)?;
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(Error::Divergence {
                epoch,
                batch: order.len().div_ceil(config.batch_size),
                message: format!("non-finite loss (train {train_loss}, validation {val_loss})"),
            });
        }
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            learning_rate: config.learning_rate,
            wall_time: start.elapsed().as_secs_f64(),
        });
        if val_loss < best.0 {
            best = (val_loss, epoch, model.clone());
        } else if epoch - best.1 >= config.patience {
            stopped_early = epoch < config.max_epochs;
            break;
        }
    }

    Ok(TrainOutcome {
        model: best.2,
        history,
        best_epoch: best.1,
        stopped_early,
    })
}

/// Writes `epoch,train_loss,val_loss,learning_rate,wall_time`.
pub fn write_history_csv(history: &[EpochRecord], path: &Path, comments: &[String]) -> Result<()> {
    let cols: [Vec<f64>; 5] = [
        history.iter().map(|r| r.epoch as f64).collect(),
        history.iter().map(|r| r.train_loss).collect(),
        history.iter().map(|r| r.val_loss).collect(),
        history.iter().map(|r| r.learning_rate).collect(),
        history.iter().map(|r| r.wall_time).collect(),
    ];
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    write_table(
        path,
        comments,
        &[
            "epoch",
            "train_loss",
            "val_loss",
            "learning_rate",
            "wall_time",
        ],
        &refs,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::split;
    use crate::features::FeatureVector;

    fn constant_set(n: usize) -> SampleSet {
        let samples = (0..n)
            .map(|i| TrainingSample {
                features: FeatureVector(std::array::from_fn(|j| ((i * 7 + j) % 11) as f64 / 11.0)),
                target: 0.3,
                index: i,
                tag: "const".into(),
            })
            .collect();
        split(samples, &[0.8, 0.2], 1).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            patience: 0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn default_architecture() {
        let c = TrainConfig::default();
        assert_eq!(c.learning_rate, 2.5e-4);
        assert_eq!(c.layer_sizes(), crate::nn::default_layer_sizes());
    }

    #[test]
    fn early_stop_on_constant_target() {
        let cfg = TrainConfig {
            learning_rate: 1e-2,
            batch_size: 8,
            max_epochs: 400,
            patience: 1,
            hidden_layers: 2,
            hidden_width: 4,
            ..TrainConfig::default()
        };
        let out = train(&constant_set(40), &cfg).unwrap();
        assert!(out.stopped_early);
        assert!(out.history.len() < cfg.max_epochs);
    }

    #[test]
    fn empty_validation_is_config_error() {
        let mut set = constant_set(10);
        set.assignment.iter_mut().for_each(|s| *s = Split::Train);
        assert!(matches!(
            train(&set, &TrainConfig::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn divergence_is_reported() {
        let cfg = TrainConfig {
            learning_rate: 1e300,
            batch_size: 4,
            max_epochs: 50,
            hidden_layers: 2,
            hidden_width: 4,
            dropout: 0.0,
            ..TrainConfig::default()
        };
        let mut set = constant_set(20);
        set.samples.iter_mut().for_each(|s| s.target = 1e200);
        match train(&set, &cfg) {
            Err(Error::Divergence { epoch, batch, .. }) => assert!(epoch >= 1 && batch >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn same_seed_same_history() {
        let cfg = TrainConfig {
            batch_size: 8,
            max_epochs: 5,
            hidden_layers: 2,
            hidden_width: 5,
            seed: 4,
            ..TrainConfig::default()
        };
        let a = train(&constant_set(30), &cfg).unwrap();
        let b = train(&constant_set(30), &cfg).unwrap();
        let strip = |h: &[EpochRecord]| -> Vec<(f64, f64)> {
            h.iter().map(|r| (r.train_loss, r.val_loss)).collect()
        };
        assert_eq!(strip(&a.history), strip(&b.history));
        assert_eq!(a.model, b.model);
    }
}
