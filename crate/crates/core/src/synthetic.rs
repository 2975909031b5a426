//! Analytic flow fixtures with a known `Δ_B`.
//!
//! The RANS snapshot is a smooth boundary layer over a sinusoidal lower wall
//! on a structured `nx × ny` grid. The matching high-fidelity stresses are
//! built so that each point's true `Δ_B` equals a chosen function of its
//! nine features: the RANS barycentric point is moved that planar distance
//! toward its farthest triangle corner, and the stress is reassembled with
//! the RANS eigenvectors and `k`.

use std::f64::consts::PI;

use crate::dataset::{rans_anisotropy, Constants, FlowFieldSnapshot, GridDims};
use crate::error::{Error, Result};
use crate::features::{compute_feature_field, compute_gradients, FeatureVector};
use crate::tensor::{
    eigs_from_barycentric, reconstruct_reynolds, BarycentricPoint, Corner, SymTensor3,
};

/// Amplitude of the lower-wall undulation relative to the domain height.
pub const WALL_AMPLITUDE: f64 = 0.05;

pub const SYNTHETIC_CONSTANTS: Constants = Constants {
    rho: 1.0,
    nu: 1e-3,
    c0: 340.0,
};

/// Boundary layer over `y = A sin(πx)` on `x ∈ [0, 2]`, `y ∈ [h(x), 1]`.
pub fn wavy_wall_snapshot(nx: usize, ny: usize) -> FlowFieldSnapshot {
    let n = nx * ny;
    let mut s = FlowFieldSnapshot {
        tag: "synthetic-wavy-wall".into(),
        dims: Some(GridDims { nx, ny }),
        x: Vec::with_capacity(n),
        y: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        w: None,
        p: Vec::with_capacity(n),
        k: Vec::with_capacity(n),
        epsilon: Vec::with_capacity(n),
        nu_t: Vec::with_capacity(n),
        d: Vec::with_capacity(n),
        constants: SYNTHETIC_CONSTANTS,
        gradients: None,
        file_grad_k: false,
        stresses: None,
    };
    for j in 0..ny {
        let eta = j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let xi = i as f64 / (nx - 1) as f64;
            let x = 2.0 * xi;
            let h = WALL_AMPLITUDE * (PI * x).sin();
            let y = h + (1.0 - h) * eta;
            let phase = (2.0 * PI * xi).sin();
            let k = 0.004 + 0.03 * eta * (-4.0 * eta).exp() * (1.0 + 0.3 * phase);
            let eps = 0.002 + 0.03 * (-6.0 * eta).exp() * (1.0 + 0.2 * (PI * x).cos());
            s.x.push(x);
            s.y.push(y);
            s.u.push((5.0 * eta).tanh() * (1.0 + 0.15 * phase));
            s.v.push(0.08 * eta * (1.0 - eta) * (2.0 * PI * xi).cos());
            s.p.push(0.05 * (PI * x).cos() * (1.0 - eta) + 0.02 * eta);
            s.k.push(k);
            s.epsilon.push(eps);
            s.nu_t.push(0.09 * k * k / eps);
            s.d.push(y - h);
        }
    }
    s
}

/// The reference mapping used by the end-to-end fixture; values lie in
/// `[0.05, 0.5]`.
pub fn reference_delta_b(q: &FeatureVector) -> f64 {
    let [q1, q2, q3, _, _, q6, q7, _, q9] = q.0;
    let wall = 1.0 - 0.5 * q3.clamp(0.0, 2.0);
    let shape = 0.5 * (1.0 - q1.clamp(-1.0, 1.0)) * 0.5;
    let turb = (q2 + q6 + q7 + q9) / 4.0;
    0.05 + 0.45 * (0.5 * wall + 0.25 * shape + 0.25 * turb).clamp(0.0, 1.0)
}

/// Moves `p` a planar distance `distance` toward its farthest corner.
pub fn displace_toward_farthest(p: &BarycentricPoint, distance: f64) -> Result<BarycentricPoint> {
    let corner = Corner::ALL
        .into_iter()
        .max_by(|a, b| {
            let da = p.distance(&BarycentricPoint::corner(*a));
            let db = p.distance(&BarycentricPoint::corner(*b));
            da.total_cmp(&db)
        })
        .expect("three corners");
    let c = BarycentricPoint::corner(corner);
    let reach = p.distance(&c);
    if !(distance >= 0.0 && distance <= reach) {
        return Err(Error::Domain(format!(
            "displacement {distance} exceeds distance {reach} to the farthest corner"
        )));
    }
    let t = distance / reach;
    Ok(BarycentricPoint::from_planar(
        p.x + t * (c.x - p.x),
        p.y + t * (c.y - p.y),
    ))
}

/// A snapshot with features, paired high-fidelity stresses and the exact
/// `Δ_B` per point.
#[derive(Clone, Debug)]
pub struct SyntheticCase {
    pub rans: FlowFieldSnapshot,
    pub features: Vec<FeatureVector>,
    pub hifi_stresses: Vec<SymTensor3>,
    pub true_delta_b: Vec<f64>,
}

pub fn synthetic_case(
    nx: usize,
    ny: usize,
    rule: impl Fn(&FeatureVector) -> f64,
) -> Result<SyntheticCase> {
    let rans = wavy_wall_snapshot(nx, ny);
    let gradients = compute_gradients(&rans)?;
    let features = compute_feature_field(&rans, &gradients)?;
    let (states, _) = rans_anisotropy(&rans, &gradients)?;
    let mut hifi_stresses = Vec::with_capacity(states.len());
    let mut true_delta_b = Vec::with_capacity(states.len());
    for ((state, q), &k) in states.iter().zip(&features).zip(&rans.k) {
        let g = rule(q);
        let moved = displace_toward_farthest(&state.barycentric, g)?;
        let lambda = eigs_from_barycentric(&moved)?;
        hifi_stresses.push(reconstruct_reynolds(k, &state.eigen.vectors, lambda)?);
        true_delta_b.push(g);
    }
    Ok(SyntheticCase {
        rans,
        features,
        hifi_stresses,
        true_delta_b,
    })
}
