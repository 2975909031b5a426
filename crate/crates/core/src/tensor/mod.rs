//! Reynolds stress and anisotropy tensor algebra.
//!
//! Stresses are stored as [`SymTensor3`] (six independent components). The
//! normalized anisotropy `b = (R - 2/3 k I) / 2k` is traceless, and its sorted
//! eigenvalues locate the state on the barycentric realizability triangle.

mod barycentric;
mod eigen;

pub use barycentric::{
    barycentric_from_eigs, eigs_from_barycentric, perturb_eigenvalues, realizability_check,
    BarycentricPoint, Corner, RealizabilityReport, Violation, HALF_SQRT3,
};
pub use eigen::{eig_sym3, EigenState};

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `VᵀV = I` accepted by [`reconstruct_reynolds`].
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Dense 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Self = Mat3([[0.0; 3]; 3]);
    pub const IDENTITY: Self = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn from_cols(c0: [f64; 3], c1: [f64; 3], c2: [f64; 3]) -> Self {
        Mat3([
            [c0[0], c1[0], c2[0]],
            [c0[1], c1[1], c2[1]],
            [c0[2], c1[2], c2[2]],
        ])
    }

    pub fn col(&self, j: usize) -> [f64; 3] {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    /// Largest entry of `|MᵀM - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.transpose() * *self;
        let mut err: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((g.0[i][j] - target).abs());
            }
        }
        err
    }

    /// `(M + Mᵀ) / 2`.
    pub fn symmetric_part(&self) -> SymTensor3 {
        let m = &self.0;
        SymTensor3 {
            xx: m[0][0],
            yy: m[1][1],
            zz: m[2][2],
            xy: 0.5 * (m[0][1] + m[1][0]),
            xz: 0.5 * (m[0][2] + m[2][0]),
            yz: 0.5 * (m[1][2] + m[2][1]),
        }
    }

    /// `(M - Mᵀ) / 2`.
    pub fn antisymmetric_part(&self) -> Mat3 {
        let m = &self.0;
        let mut w = [[0.0; 3]; 3];
        for (i, row) in w.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = 0.5 * (m[i][j] - m[j][i]);
            }
        }
        Mat3(w)
    }
}

impl Mul for Mat3 {
    type Output = Mat3;

    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Mat3(out)
    }
}

impl Add for Mat3 {
    type Output = Mat3;

    fn add(self, rhs: Mat3) -> Mat3 {
        let mut out = self.0;
        for (row, rrow) in out.iter_mut().zip(rhs.0.iter()) {
            for (v, r) in row.iter_mut().zip(rrow.iter()) {
                *v += r;
            }
        }
        Mat3(out)
    }
}

/// Symmetric second-order tensor in three dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub xz: f64,
    pub yz: f64,
}

impl SymTensor3 {
    pub const ZERO: Self = SymTensor3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Self = SymTensor3::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0);

    pub const fn new(xx: f64, yy: f64, zz: f64, xy: f64, xz: f64, yz: f64) -> Self {
        SymTensor3 {
            xx,
            yy,
            zz,
            xy,
            xz,
            yz,
        }
    }

    pub const fn diag(xx: f64, yy: f64, zz: f64) -> Self {
        SymTensor3::new(xx, yy, zz, 0.0, 0.0, 0.0)
    }

    /// Components in `(xx, yy, zz, xy, xz, yz)` order.
    pub fn components(&self) -> [f64; 6] {
        [self.xx, self.yy, self.zz, self.xy, self.xz, self.yz]
    }

    pub fn from_components(c: [f64; 6]) -> Self {
        SymTensor3::new(c[0], c[1], c[2], c[3], c[4], c[5])
    }

    pub fn to_mat3(&self) -> Mat3 {
        Mat3([
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    /// Frobenius norm, counting each off-diagonal entry twice.
    pub fn frobenius(&self) -> f64 {
        (self.xx * self.xx
            + self.yy * self.yy
            + self.zz * self.zz
            + 2.0 * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz))
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, s: f64) -> Self {
        SymTensor3::from_components(self.components().map(|v| v * s))
    }

    /// `Q T Qᵀ`.
    pub fn rotate(&self, q: &Mat3) -> Self {
        (*q * self.to_mat3() * q.transpose()).symmetric_part()
    }

    /// `V diag(λ) Vᵀ`.
    pub fn from_eigen(vectors: &Mat3, values: [f64; 3]) -> Self {
        let v = &vectors.0;
        let entry =
            |i: usize, j: usize| -> f64 { (0..3).map(|m| v[i][m] * values[m] * v[j][m]).sum() };
        SymTensor3::new(
            entry(0, 0),
            entry(1, 1),
            entry(2, 2),
            entry(0, 1),
            entry(0, 2),
            entry(1, 2),
        )
    }
}

impl Add for SymTensor3 {
    type Output = SymTensor3;

    fn add(self, rhs: SymTensor3) -> SymTensor3 {
        let (a, b) = (self.components(), rhs.components());
        SymTensor3::from_components(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl Sub for SymTensor3 {
    type Output = SymTensor3;

    fn sub(self, rhs: SymTensor3) -> SymTensor3 {
        let (a, b) = (self.components(), rhs.components());
        SymTensor3::from_components(std::array::from_fn(|i| a[i] - b[i]))
    }
}

/// Half the trace of the Reynolds stress.
pub fn turbulent_kinetic_energy(reynolds: &SymTensor3) -> f64 {
    0.5 * reynolds.trace()
}

/// Normalized anisotropy `b = (R - 2/3 k I) / 2k`.
pub fn anisotropy_from_reynolds(reynolds: &SymTensor3, k: f64) -> Result<SymTensor3> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!(
            "turbulent kinetic energy must be positive, got {k}"
        )));
    }
    if !reynolds.is_finite() {
        return Err(Error::Domain(
            "Reynolds stress has non-finite components".into(),
        ));
    }
    let iso = 2.0 / 3.0 * k;
    let inv = 1.0 / (2.0 * k);
    Ok(SymTensor3::new(
        (reynolds.xx - iso) * inv,
        (reynolds.yy - iso) * inv,
        (reynolds.zz - iso) * inv,
        reynolds.xy * inv,
        reynolds.xz * inv,
        reynolds.yz * inv,
    ))
}

/// Linear eddy-viscosity stress `R = 2/3 k I - 2 ν_t S`.
pub fn boussinesq_reynolds(strain: &SymTensor3, k: f64, nu_t: f64) -> SymTensor3 {
    SymTensor3::IDENTITY.scale(2.0 / 3.0 * k) - strain.scale(2.0 * nu_t)
}

/// Rebuilds `R* = 2k (V Λ* Vᵀ + I/3)` from fixed eigenvectors and `k`.
pub fn reconstruct_reynolds(k: f64, vectors: &Mat3, eigenvalues: [f64; 3]) -> Result<SymTensor3> {
    let err = vectors.orthonormality_error();
    if !(err <= ORTHONORMAL_TOL) {
        return Err(Error::Domain(format!(
            "eigenvector matrix is not orthonormal (max |VᵀV - I| = {err:e})"
        )));
    }
    let b = SymTensor3::from_eigen(vectors, eigenvalues);
    let third = 1.0 / 3.0;
    let two_k = 2.0 * k;
    Ok(SymTensor3::new(
        two_k * (b.xx + third),
        two_k * (b.yy + third),
        two_k * (b.zz + third),
        two_k * b.xy,
        two_k * b.xz,
        two_k * b.yz,
    ))
}

/// Normalized anisotropy together with its eigenstate and barycentric location.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnisotropyState {
    pub anisotropy: SymTensor3,
    pub eigen: EigenState,
    pub barycentric: BarycentricPoint,
}

impl AnisotropyState {
    pub fn from_anisotropy(b: &SymTensor3) -> Result<Self> {
        let eigen = eig_sym3(b)?;
        let barycentric = barycentric_from_eigs(eigen.values)?;
        Ok(AnisotropyState {
            anisotropy: *b,
            eigen,
            barycentric,
        })
    }

    /// The isotropic state `b = 0` (3C corner).
    pub fn isotropic() -> Self {
        AnisotropyState {
            anisotropy: SymTensor3::ZERO,
            eigen: EigenState {
                values: [0.0; 3],
                vectors: Mat3::IDENTITY,
            },
            barycentric: BarycentricPoint::corner(Corner::ThreeComponent),
        }
    }
}
