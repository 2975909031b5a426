//! Field-wide eigenvalue perturbation toward the three limiting states.
//!
//! Eigenvectors and `k` are held fixed; only the eigenvalues move. Every
//! point yields one perturbed stress per corner, and the union of the three
//! is the uncertainty envelope handed to downstream CFD.

use std::path::{Path, PathBuf};

use crate::dataset::{make_targets, write_table, GridDims};
use crate::error::{Error, Result};
use crate::tensor::{
    eigs_from_barycentric, perturb_eigenvalues, realizability_check, reconstruct_reynolds,
    AnisotropyState, BarycentricPoint, Corner, SymTensor3,
};

/// One perturbed realization at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbedState {
    pub corner: Corner,
    pub barycentric: BarycentricPoint,
    pub eigenvalues: [f64; 3],
    pub anisotropy: SymTensor3,
    pub reynolds: SymTensor3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointUncertainty {
    pub rans: BarycentricPoint,
    pub delta_b: f64,
    /// Indexed by `Corner::index`.
    pub perturbed: [PerturbedState; 3],
}

impl PointUncertainty {
    pub fn state(&self, corner: Corner) -> &PerturbedState {
        &self.perturbed[corner.index()]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UncertaintyField {
    pub points: Vec<PointUncertainty>,
}

impl UncertaintyField {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn delta_b(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.delta_b).collect()
    }

    pub fn reynolds(&self, corner: Corner) -> Vec<SymTensor3> {
        self.points
            .iter()
            .map(|p| p.state(corner).reynolds)
            .collect()
    }
}

fn perturb_point(
    state: &AnisotropyState,
    k: f64,
    delta_b: f64,
    corner: Corner,
) -> Result<PerturbedState> {
    let barycentric = perturb_eigenvalues(&state.barycentric, delta_b, corner)?;
    let eigenvalues = if delta_b == 0.0 {
        state.eigen.values
    } else {
        eigs_from_barycentric(&barycentric)?
    };
    let report = realizability_check(eigenvalues);
    if !report.passed() {
        return Err(Error::Internal(format!(
            "perturbation toward {corner} left the realizable set: {report}"
        )));
    }
    let anisotropy = SymTensor3::from_eigen(&state.eigen.vectors, eigenvalues);
    let reynolds = reconstruct_reynolds(k, &state.eigen.vectors, eigenvalues)?;
    Ok(PerturbedState {
        corner,
        barycentric,
        eigenvalues,
        anisotropy,
        reynolds,
    })
}

/// Moves every point's eigenvalues a fraction `delta_b[p]` toward each
/// corner and rebuilds `R* = 2k (V Λ* Vᵀ + I/3)`.
pub fn apply_perturbation(
    states: &[AnisotropyState],
    k: &[f64],
    delta_b: &[f64],
) -> Result<UncertaintyField> {
    if states.len() != k.len() || states.len() != delta_b.len() {
        return Err(Error::Pairing(format!(
            "{} states, {} k values and {} perturbation magnitudes",
            states.len(),
            k.len(),
            delta_b.len()
        )));
    }
    let mut points = Vec::with_capacity(states.len());
    for (p, ((s, &kp), &d)) in states.iter().zip(k).zip(delta_b).enumerate() {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::Domain(format!(
                "perturbation magnitude {d} at point {p} is outside [0, 1]"
            )));
        }
        let perturbed = [
            perturb_point(s, kp, d, Corner::OneComponent)?,
            perturb_point(s, kp, d, Corner::TwoComponent)?,
            perturb_point(s, kp, d, Corner::ThreeComponent)?,
        ];
        points.push(PointUncertainty {
            rans: s.barycentric,
            delta_b: d,
            perturbed,
        });
    }
    Ok(UncertaintyField { points })
}

/// Planar barycentric distance per point; same metric as the training targets.
pub fn discrepancy_map(a: &[AnisotropyState], b: &[AnisotropyState]) -> Result<Vec<f64>> {
    make_targets(a, b)
}

/// Writes `x,y,<names...>` with an optional `# dims nx ny` comment.
pub fn export_field_csv(
    path: &Path,
    x: &[f64],
    y: &[f64],
    columns: &[(&str, &[f64])],
    dims: Option<GridDims>,
    comments: &[String],
) -> Result<()> {
    let n = x.len();
    if y.len() != n || columns.iter().any(|(_, c)| c.len() != n) {
        return Err(Error::Pairing(format!(
            "field export with {} x, {} y and column lengths {:?}",
            n,
            y.len(),
            columns.iter().map(|(_, c)| c.len()).collect::<Vec<_>>()
        )));
    }
    if let Some(d) = dims {
        if d.len() != n {
            return Err(Error::Pairing(format!(
                "grid {}x{} does not match {} points",
                d.nx, d.ny, n
            )));
        }
    }
    let mut comments = comments.to_vec();
    if let Some(d) = dims {
        comments.push(format!("dims {} {}", d.nx, d.ny));
    }
    let mut headers = vec!["x", "y"];
    headers.extend(columns.iter().map(|(h, _)| *h));
    let mut cols: Vec<&[f64]> = vec![x, y];
    cols.extend(columns.iter().map(|(_, c)| *c));
    write_table(path, &comments, &headers, &cols)
}

/// `<dir>/<stem>_1c.csv` and friends.
pub fn corner_path(base: &Path, corner: Corner) -> PathBuf {
    let stem = base
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("perturbed");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}_{}.{ext}", corner.tag()))
}

/// Writes one stress file per corner with the six components of `R*` plus
/// the perturbed barycentric coordinates; returns the paths written.
pub fn export_perturbed_stresses(
    base: &Path,
    field: &UncertaintyField,
    x: &[f64],
    y: &[f64],
    dims: Option<GridDims>,
    comments: &[String],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::with_capacity(3);
    let delta = field.delta_b();
    for corner in Corner::ALL {
        let states: Vec<&PerturbedState> = field.points.iter().map(|p| p.state(corner)).collect();
        let comp = |f: fn(&SymTensor3) -> f64| -> Vec<f64> {
            states.iter().map(|s| f(&s.reynolds)).collect()
        };
        let uu = comp(|r| r.xx);
        let vv = comp(|r| r.yy);
        let ww = comp(|r| r.zz);
        let uv = comp(|r| r.xy);
        let uw = comp(|r| r.xz);
        let vw = comp(|r| r.yz);
        let bx: Vec<f64> = states.iter().map(|s| s.barycentric.x).collect();
        let by: Vec<f64> = states.iter().map(|s| s.barycentric.y).collect();
        let path = corner_path(base, corner);
        let mut c = comments.to_vec();
        c.push(format!("corner {corner}"));
        export_field_csv(
            &path,
            x,
            y,
            &[
                ("delta_b", &delta),
                ("uu", &uu),
                ("vv", &vv),
                ("ww", &ww),
                ("uv", &uv),
                ("uw", &uw),
                ("vw", &vw),
                ("x_bary", &bx),
                ("y_bary", &by),
            ],
            dims,
            &c,
        )?;
        written.push(path);
    }
    Ok(written)
}

/// Mean of `values` over points whose `y` lies in the lowest `fraction` of
/// the height range, and the mean over all points.
pub fn lower_band_mean(values: &[f64], y: &[f64], fraction: f64) -> Result<(f64, f64)> {
    if values.len() != y.len() || values.is_empty() {
        return Err(Error::Pairing(format!(
            "{} values for {} heights",
            values.len(),
            y.len()
        )));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "band fraction {fraction} outside (0, 1]"
        )));
    }
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = lo + fraction * (hi - lo);
    let (mut band, mut n) = (0.0, 0usize);
    for (v, &h) in values.iter().zip(y) {
        if h <= cut {
            band += v;
            n += 1;
        }
    }
    let all = values.iter().sum::<f64>() / values.len() as f64;
    Ok((band / n as f64, all))
}
