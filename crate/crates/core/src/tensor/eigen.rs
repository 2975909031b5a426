use std::f64::consts::PI;

use super::{Mat3, SymTensor3};
use crate::error::{Error, Result};

/// Below this value of `1 - r²` the trigonometric roots are treated as
/// (nearly) repeated and the Jacobi path is taken.
const DISCRIMINANT_TOL: f64 = 1e-12;

/// Residual accepted from the closed-form path, relative to the input scale.
const CLOSED_FORM_RESIDUAL: f64 = 1e-13;

const JACOBI_MAX_SWEEPS: usize = 64;

/// Components below this magnitude are skipped when fixing eigenvector signs.
const SIGN_THRESHOLD: f64 = 1e-12;

/// Eigenvalues sorted descending, with eigenvectors stored as matching columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenState {
    pub values: [f64; 3],
    pub vectors: Mat3,
}

impl EigenState {
    pub fn reconstruct(&self) -> SymTensor3 {
        SymTensor3::from_eigen(&self.vectors, self.values)
    }
}

/// Eigendecomposition of a symmetric 3×3 tensor.
///
/// Uses the trigonometric solution of the characteristic cubic with
/// cross-product eigenvectors, falling back to cyclic Jacobi rotations when
/// roots are close to repeated or the closed-form residual is too large.
/// Eigenvalues come back sorted descending; each eigenvector is signed so its
/// first non-negligible component is positive.
pub fn eig_sym3(t: &SymTensor3) -> Result<EigenState> {
    if !t.is_finite() {
        return Err(Error::Domain(
            "eigendecomposition of non-finite tensor".into(),
        ));
    }
    let scale = t.components().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(EigenState {
            values: [0.0; 3],
            vectors: Mat3::IDENTITY,
        });
    }
    if t.xy == 0.0 && t.xz == 0.0 && t.yz == 0.0 {
        return Ok(sorted_and_signed([t.xx, t.yy, t.zz], Mat3::IDENTITY));
    }
    let a = t.scale(1.0 / scale);

    let (values, vectors) = match closed_form(&a) {
        Some(pair) => pair,
        None => jacobi(&a),
    };
    Ok(sorted_and_signed(values.map(|v| v * scale), vectors))
}

fn closed_form(a: &SymTensor3) -> Option<([f64; 3], Mat3)> {
    let q = a.trace() / 3.0;
    let off = a.xy * a.xy + a.xz * a.xz + a.yz * a.yz;
    let (dx, dy, dz) = (a.xx - q, a.yy - q, a.zz - q);
    let p2 = dx * dx + dy * dy + dz * dz + 2.0 * off;
    if p2 == 0.0 {
        // multiple of the identity
        return Some(([q; 3], Mat3::IDENTITY));
    }
    let p = (p2 / 6.0).sqrt();
    let b = SymTensor3::new(dx / p, dy / p, dz / p, a.xy / p, a.xz / p, a.yz / p);
    let r = (0.5 * det(&b)).clamp(-1.0, 1.0);
    if 1.0 - r * r < DISCRIMINANT_TOL {
        return None;
    }
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let l2 = 3.0 * q - l1 - l3;

    let v1 = null_vector(a, l1)?;
    let v3 = null_vector(a, l3)?;
    let v3 = normalize(sub(v3, scale3(v1, dot(v3, v1))))?;
    let v2 = normalize(cross(v3, v1))?;
    let vectors = Mat3::from_cols(v1, v2, v3);
    let values = [l1, l2, l3];

    let residual = (SymTensor3::from_eigen(&vectors, values) - *a).frobenius();
    if residual > CLOSED_FORM_RESIDUAL || vectors.orthonormality_error() > CLOSED_FORM_RESIDUAL {
        return None;
    }
    Some((values, vectors))
}

/// Unit vector spanning the null space of `A - λI`, from the largest cross
/// product of its rows.
fn null_vector(a: &SymTensor3, lambda: f64) -> Option<[f64; 3]> {
    let m = a.to_mat3();
    let rows = [
        [m.0[0][0] - lambda, m.0[0][1], m.0[0][2]],
        [m.0[1][0], m.0[1][1] - lambda, m.0[1][2]],
        [m.0[2][0], m.0[2][1], m.0[2][2] - lambda],
    ];
    let candidates = [
        cross(rows[0], rows[1]),
        cross(rows[0], rows[2]),
        cross(rows[1], rows[2]),
    ];
    let best = candidates
        .into_iter()
        .max_by(|x, y| dot(*x, *x).total_cmp(&dot(*y, *y)))?;
    normalize(best)
}

/// Cyclic Jacobi rotations on the full matrix.
fn jacobi(a: &SymTensor3) -> ([f64; 3], Mat3) {
    let mut m = a.to_mat3().0;
    let mut v = Mat3::IDENTITY.0;
    let total: f64 = m.iter().flatten().map(|x| x * x).sum();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = 2.0 * (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]);
        if off <= f64::EPSILON * f64::EPSILON * total * 1e-4 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if m[p][q] == 0.0 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // m <- Jᵀ m J
            for row in m.iter_mut() {
                let (mp, mq) = (row[p], row[q]);
                row[p] = c * mp - s * mq;
                row[q] = s * mp + c * mq;
            }
            #[allow(clippy::needless_range_loop)]
            for k in 0..3 {
                let (mp, mq) = (m[p][k], m[q][k]);
                m[p][k] = c * mp - s * mq;
                m[q][k] = s * mp + c * mq;
            }
            m[p][q] = 0.0;
            m[q][p] = 0.0;
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    ([m[0][0], m[1][1], m[2][2]], Mat3(v))
}

fn sorted_and_signed(values: [f64; 3], vectors: Mat3) -> EigenState {
    let mut order = [0usize, 1, 2];
    // stable: ties keep their solver order
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let cols = order.map(|j| {
        let mut c = vectors.col(j);
        if let Some(first) = c.iter().copied().find(|x| x.abs() > SIGN_THRESHOLD) {
            if first < 0.0 {
                c = c.map(|x| -x);
            }
        }
        c
    });
    EigenState {
        values: order.map(|j| values[j]),
        vectors: Mat3::from_cols(cols[0], cols[1], cols[2]),
    }
}

fn det(t: &SymTensor3) -> f64 {
    t.xx * (t.yy * t.zz - t.yz * t.yz) - t.xy * (t.xy * t.zz - t.yz * t.xz)
        + t.xz * (t.xy * t.yz - t.yy * t.xz)
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    a.map(|x| x * s)
}

fn normalize(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(a, a).sqrt();
    (n > 0.0 && n.is_finite()).then(|| scale3(a, 1.0 / n))
}
