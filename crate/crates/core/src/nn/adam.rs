use super::{Gradients, MlpModel};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// Moment estimates for Adam with bias correction.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub first: Gradients,
    pub second: Gradients,
    pub step: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(model: &MlpModel, learning_rate: f64) -> Self {
        AdamState {
            first: Gradients::zeros_like(model),
            second: Gradients::zeros_like(model),
            step: 0,
            learning_rate,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            epsilon: ADAM_EPSILON,
        }
    }

    /// Applies one update to `model` in place.
    pub fn step(&mut self, model: &mut MlpModel, grads: &Gradients) {
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, eps, lr) = (self.beta1, self.beta2, self.epsilon, self.learning_rate);
        let update = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        };
        for (li, layer) in model.layers.iter_mut().enumerate() {
            update(
                &mut layer.weights,
                &grads.weights[li],
                &mut self.first.weights[li],
                &mut self.second.weights[li],
            );
            update(
                &mut layer.biases,
                &grads.biases[li],
                &mut self.first.biases[li],
                &mut self.second.biases[li],
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;

    fn one_weight(w: f64) -> MlpModel {
        let mut m = MlpModel::zeros(&[1, 1], Activation::Tanh).unwrap();
        m.layers[0].weights[0] = w;
        m
    }

    fn grad(gw: f64, gb: f64) -> Gradients {
        Gradients {
            weights: vec![vec![gw]],
            biases: vec![vec![gb]],
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut m = one_weight(0.3);
        let mut s = AdamState::new(&m, 2.5e-4);
        s.step(&mut m, &grad(0.0, 0.0));
        assert_eq!(m.layers[0].weights[0], 0.3);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let lr = 2.5e-4;
        let mut m = one_weight(0.3);
        let mut s = AdamState::new(&m, lr);
        s.step(&mut m, &grad(4.0, -0.01));
        // m̂ = g, v̂ = g², step = lr g / (|g| + ε)
        let dw = 0.3 - m.layers[0].weights[0];
        assert!((dw - lr * 4.0 / (4.0 + 1e-8)).abs() < 1e-15);
        let db = m.layers[0].biases[0];
        assert!((db - lr * 0.01 / (0.01 + 1e-8)).abs() < 1e-15);
    }

    #[test]
    fn two_step_trace() {
        // hand recurrences with g1 = 1, g2 = 0.5
        let lr = 0.1;
        let mut m = one_weight(0.0);
        let mut s = AdamState::new(&m, lr);
        s.step(&mut m, &grad(1.0, 0.0));
        s.step(&mut m, &grad(0.5, 0.0));
        let m1 = 0.1;
        let v1 = 0.001;
        let step1 = lr * (m1 / 0.1) / ((v1 / 0.001f64).sqrt() + 1e-8);
        let m2 = 0.9 * m1 + 0.1 * 0.5;
        let v2 = 0.999 * v1 + 0.001 * 0.25;
        let c1 = 1.0 - 0.81;
        let c2 = 1.0 - 0.999f64 * 0.999;
        let step2 = lr * (m2 / c1) / ((v2 / c2).sqrt() + 1e-8);
        let expected = -(step1 + step2);
        assert!((m.layers[0].weights[0] - expected).abs() < 1e-15);
        assert_eq!(s.step, 2);
    }
}
