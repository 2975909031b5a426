//! Rotation-invariant, non-dimensional flow features.
//!
//! | # | name | formula |
//! |---|------|---------|
//! | q1 | Q criterion | `(‖Ω‖² − ‖S‖²) / (‖Ω‖² + ‖S‖²)` |
//! | q2 | turbulence intensity | `k / (½ U·U + k)` |
//! | q3 | wall-distance Reynolds number | `min(√k d / 50ν, 2)` |
//! | q4 | streamwise pressure gradient | `U·∇P / (√(|∇P|² |U|²) + |U·∇P|)` |
//! | q5 | pressure vs. normal stresses | `|∇P| / |(|∇P| + ½ρ ‖∇(U·U)‖)|` |
//! | q6 | viscosity ratio | `ν_t / (100ν + ν_t)` |
//! | q7 | Reynolds stress ratio | `‖τ‖ / (k + ‖τ‖)`, `τ = −2ν_t S` |
//! | q8 | Mach number | `‖U‖ / C₀` |
//! | q9 | time-scale ratio | `‖S‖k / (‖S‖k + ε)` |
//!
//! `Ω` is the rotation-rate tensor; every denominator carries `+1e-30`.

mod gradients;

pub use gradients::{compute_gradients, CurvilinearGrid, GradientField};

use serde::{Deserialize, Serialize};

use crate::dataset::{Constants, FlowFieldSnapshot};
use crate::error::{Error, Result};
use crate::tensor::{Mat3, SymTensor3};

pub const FEATURE_COUNT: usize = 9;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] =
    ["q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q9"];

/// Declared `[min, max]` per feature (q8 is unbounded above).
pub const FEATURE_RANGES: [(f64, f64); FEATURE_COUNT] = [
    (-1.0, 1.0),
    (0.0, 1.0),
    (0.0, 2.0),
    (-1.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, f64::INFINITY),
    (0.0, 1.0),
];

/// Additive guard on every feature denominator.
pub const DENOMINATOR_GUARD: f64 = 1e-30;

/// Ceiling on the wall-distance Reynolds number feature.
pub const WALL_REYNOLDS_CAP: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    /// Indices (0-based) of features outside their declared range.
    pub fn range_violations(&self) -> Vec<usize> {
        self.0
            .iter()
            .zip(FEATURE_RANGES)
            .enumerate()
            .filter(|(_, (v, (lo, hi)))| !(**v >= *lo && **v <= *hi))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Symmetric and antisymmetric parts of a velocity gradient.
pub fn strain_and_rotation(grad_u: &Mat3) -> (SymTensor3, Mat3) {
    (grad_u.symmetric_part(), grad_u.antisymmetric_part())
}

/// Raw local quantities entering the features at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalFlowState {
    pub velocity: [f64; 3],
    pub grad_u: Mat3,
    pub grad_p: [f64; 3],
    pub k: f64,
    pub epsilon: f64,
    pub nu_t: f64,
    pub wall_distance: f64,
}

impl LocalFlowState {
    /// The same state seen from a frame rotated by `q`.
    pub fn rotated(&self, q: &Mat3) -> Self {
        LocalFlowState {
            velocity: q.mul_vec(self.velocity),
            grad_u: *q * self.grad_u * q.transpose(),
            grad_p: q.mul_vec(self.grad_p),
            ..*self
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Evaluates q1..q9 for one local state.
pub fn features_from_state(s: &LocalFlowState, c: &Constants) -> FeatureVector {
    const EPS: f64 = DENOMINATOR_GUARD;
    let (strain, rotation) = strain_and_rotation(&s.grad_u);
    let s_norm = strain.frobenius();
    let s2 = s_norm * s_norm;
    let w_norm = rotation.frobenius();
    let w2 = w_norm * w_norm;
    let uu = dot(s.velocity, s.velocity);
    let u_mag = uu.sqrt();
    let k = s.k.max(0.0);
    let gp2 = dot(s.grad_p, s.grad_p);
    let gp = gp2.sqrt();
    let u_dot_gp = dot(s.velocity, s.grad_p);

    let q1 = (w2 - s2) / (w2 + s2 + EPS);
    let q2 = k / (0.5 * uu + k + EPS);
    let q3 = (k.sqrt() * s.wall_distance / (50.0 * c.nu + EPS)).min(WALL_REYNOLDS_CAP);
    let q4 = u_dot_gp / ((gp2 * uu).sqrt() + u_dot_gp.abs() + EPS);
    // ½ ∇(U·U) = (∇U)ᵀ U
    let half_grad_uu = s.grad_u.transpose().mul_vec(s.velocity);
    let normal_stress = c.rho * dot(half_grad_uu, half_grad_uu).sqrt();
    let q5 = gp / ((gp + normal_stress).abs() + EPS);
    let q6 = s.nu_t / (100.0 * c.nu + s.nu_t + EPS);
    let tau = 2.0 * s.nu_t * s_norm;
    let q7 = tau / (k + tau + EPS);
    let q8 = u_mag / (c.c0 + EPS);
    let q9 = s_norm * k / (s_norm * k + s.epsilon + EPS);
    FeatureVector([q1, q2, q3, q4, q5, q6, q7, q8, q9])
}

impl FlowFieldSnapshot {
    pub fn local_state(&self, point: usize, gradients: &GradientField) -> LocalFlowState {
        LocalFlowState {
            velocity: [
                self.u[point],
                self.v[point],
                self.w.as_ref().map_or(0.0, |w| w[point]),
            ],
            grad_u: gradients.grad_u[point],
            grad_p: gradients.grad_p[point],
            k: self.k[point],
            epsilon: self.epsilon[point],
            nu_t: self.nu_t[point],
            wall_distance: self.d[point],
        }
    }
}

/// Features at a single grid point.
pub fn compute_features(
    point: usize,
    snapshot: &FlowFieldSnapshot,
    gradients: &GradientField,
) -> Result<FeatureVector> {
    let c = &snapshot.constants;
    if !(c.nu > 0.0) {
        return Err(Error::Domain(format!(
            "point {point}: molecular viscosity must be positive, got {}",
            c.nu
        )));
    }
    if !(c.rho > 0.0) {
        return Err(Error::Domain(format!(
            "point {point}: density must be positive, got {}",
            c.rho
        )));
    }
    if point >= snapshot.len() || point >= gradients.len() {
        return Err(Error::Domain(format!(
            "point {point} out of range ({} points)",
            snapshot.len()
        )));
    }
    let f = features_from_state(&snapshot.local_state(point, gradients), c);
    if !f.0.iter().all(|v| v.is_finite()) {
        return Err(Error::Domain(format!(
            "point {point}: non-finite feature {:?}",
            f.0
        )));
    }
    Ok(f)
}

/// Features at every point of the snapshot.
pub fn compute_feature_field(
    snapshot: &FlowFieldSnapshot,
    gradients: &GradientField,
) -> Result<Vec<FeatureVector>> {
    if gradients.len() != snapshot.len() {
        return Err(Error::Pairing(format!(
            "{} gradient entries for {} points",
            gradients.len(),
            snapshot.len()
        )));
    }
    (0..snapshot.len())
        .map(|p| compute_features(p, snapshot, gradients))
        .collect()
}

/// Per-feature minimum and maximum over a field.
pub fn feature_extrema(features: &[FeatureVector]) -> [(f64, f64); FEATURE_COUNT] {
    let mut out = [(f64::INFINITY, f64::NEG_INFINITY); FEATURE_COUNT];
    for f in features {
        for (o, v) in out.iter_mut().zip(f.0) {
            o.0 = o.0.min(v);
            o.1 = o.1.max(v);
        }
    }
    out
}
