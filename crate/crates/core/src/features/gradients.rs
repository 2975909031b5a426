use crate::dataset::{FlowFieldSnapshot, GridDims};
use crate::error::{Error, Result};
use crate::tensor::Mat3;

/// Per-point gradients of the mean flow.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    /// `grad_u[p].0[i][j] = ∂U_i/∂x_j`, 1/s.
    pub grad_u: Vec<Mat3>,
    /// ∂P/∂x_i, Pa/m.
    pub grad_p: Vec<[f64; 3]>,
    /// ∂k/∂x_i, m/s². Zero when a file supplies mean-flow gradients without k.
    pub grad_k: Vec<[f64; 3]>,
}

impl GradientField {
    pub fn len(&self) -> usize {
        self.grad_u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grad_u.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.grad_u.iter().all(Mat3::is_finite)
            && self.grad_p.iter().flatten().all(|v| v.is_finite())
            && self.grad_k.iter().flatten().all(|v| v.is_finite())
    }
}

/// Returns gradients supplied by the file, or differentiates the snapshot on
/// its structured grid.
pub fn compute_gradients(snapshot: &FlowFieldSnapshot) -> Result<GradientField> {
    if let Some(g) = &snapshot.gradients {
        return Ok(g.clone());
    }
    let dims = snapshot.dims.ok_or_else(|| {
        Error::Config(format!(
            "{}: no gradient columns and no grid dimensions to compute them",
            snapshot.tag
        ))
    })?;
    let grid = CurvilinearGrid::new(dims, &snapshot.x, &snapshot.y)?;

    let du = grid.gradient(&snapshot.u);
    let dv = grid.gradient(&snapshot.v);
    let dw = snapshot.w.as_ref().map(|w| grid.gradient(w));
    let dp = grid.gradient(&snapshot.p);
    let dk = grid.gradient(&snapshot.k);

    let n = dims.len();
    let grad_u = (0..n)
        .map(|i| {
            let w = dw.as_ref().map_or([0.0; 2], |g| g[i]);
            Mat3([
                [du[i][0], du[i][1], 0.0],
                [dv[i][0], dv[i][1], 0.0],
                [w[0], w[1], 0.0],
            ])
        })
        .collect();
    Ok(GradientField {
        grad_u,
        grad_p: dp.iter().map(|g| [g[0], g[1], 0.0]).collect(),
        grad_k: dk.iter().map(|g| [g[0], g[1], 0.0]).collect(),
    })
}

/// Index-space differencing on a structured 2D grid, mapped to physical
/// derivatives through the inverse Jacobian of `(ξ, η) → (x, y)`.
pub struct CurvilinearGrid {
    dims: GridDims,
    /// `(y_η, -y_ξ, -x_η, x_ξ) / J` per point.
    inverse_metric: Vec<[f64; 4]>,
}

impl CurvilinearGrid {
    pub fn new(dims: GridDims, x: &[f64], y: &[f64]) -> Result<Self> {
        if dims.nx < 2 || dims.ny < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 points per direction, got {}x{}",
                dims.nx, dims.ny
            )));
        }
        if dims.len() != x.len() || dims.len() != y.len() {
            return Err(Error::Config(format!(
                "grid dims {}x{} do not match {} points",
                dims.nx,
                dims.ny,
                x.len()
            )));
        }
        let dx = index_derivatives(dims, x);
        let dy = index_derivatives(dims, y);
        let mut sign = 0.0;
        let mut inverse_metric = Vec::with_capacity(dims.len());
        for (p, (gx, gy)) in dx.iter().zip(&dy).enumerate() {
            let (x_xi, x_eta) = (gx[0], gx[1]);
            let (y_xi, y_eta) = (gy[0], gy[1]);
            let jac = x_xi * y_eta - x_eta * y_xi;
            if sign == 0.0 {
                sign = jac.signum();
            }
            if !jac.is_finite() || jac == 0.0 || jac.signum() != sign {
                let (i, j) = (p % dims.nx, p / dims.nx);
                return Err(Error::Data(format!(
                    "non-monotone coordinate lines at grid point ({i}, {j}): Jacobian {jac:e}"
                )));
            }
            inverse_metric.push([y_eta / jac, -y_xi / jac, -x_eta / jac, x_xi / jac]);
        }
        Ok(CurvilinearGrid {
            dims,
            inverse_metric,
        })
    }

    /// `(∂f/∂x, ∂f/∂y)` per point.
    pub fn gradient(&self, f: &[f64]) -> Vec<[f64; 2]> {
        index_derivatives(self.dims, f)
            .iter()
            .zip(&self.inverse_metric)
            .map(|(d, m)| {
                let (f_xi, f_eta) = (d[0], d[1]);
                [m[0] * f_xi + m[1] * f_eta, m[2] * f_xi + m[3] * f_eta]
            })
            .collect()
    }
}

/// `(∂f/∂ξ, ∂f/∂η)` with unit index spacing: central in the interior,
/// one-sided at the boundaries.
fn index_derivatives(dims: GridDims, f: &[f64]) -> Vec<[f64; 2]> {
    let GridDims { nx, ny } = dims;
    let diff = |at: &dyn Fn(usize) -> f64, i: usize, n: usize| -> f64 {
        if i == 0 {
            at(1) - at(0)
        } else if i == n - 1 {
            at(n - 1) - at(n - 2)
        } else {
            0.5 * (at(i + 1) - at(i - 1))
        }
    };
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let along_i = |ii: usize| f[dims.index(ii, j)];
            let along_j = |jj: usize| f[dims.index(i, jj)];
            out.push([diff(&along_i, i, nx), diff(&along_j, j, ny)]);
        }
    }
    out
}
