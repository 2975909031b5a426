//! Flow snapshots, anisotropy states, `Δ_B` targets and seeded splits.

mod io;
mod schema;

pub use io::{
    load_flow_csv, load_stress_csv, push_float, read_features_csv, read_table, read_targets_csv,
    write_features_csv, write_flow_csv, write_table, write_targets_csv, FeatureTable, Table,
    TargetRecord,
};
pub use schema::{Constants, GridDims, Role, Schema, DEFAULT_SPEED_OF_SOUND};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, GradientField};
use crate::tensor::{anisotropy_from_reynolds, AnisotropyState, SymTensor3};

/// Below this turbulent kinetic energy the anisotropy is undefined and the
/// point is treated as isotropic.
pub const K_FLOOR: f64 = 1e-12;

/// Mean-flow and turbulence fields on one set of points.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowFieldSnapshot {
    pub tag: String,
    pub dims: Option<GridDims>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Option<Vec<f64>>,
    pub p: Vec<f64>,
    pub k: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub nu_t: Vec<f64>,
    pub d: Vec<f64>,
    pub constants: Constants,
    /// Gradients read from file columns.
    pub gradients: Option<GradientField>,
    /// Whether the file carried `k` gradient columns.
    pub file_grad_k: bool,
    pub stresses: Option<Vec<SymTensor3>>,
}

impl FlowFieldSnapshot {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let mut columns: Vec<(&str, &[f64])> = vec![
            ("x", &self.x),
            ("y", &self.y),
            ("U", &self.u),
            ("V", &self.v),
            ("P", &self.p),
            ("k", &self.k),
            ("epsilon", &self.epsilon),
            ("nu_t", &self.nu_t),
            ("d", &self.d),
        ];
        if let Some(w) = &self.w {
            columns.push(("W", w));
        }
        for (name, col) in &columns {
            if col.len() != n {
                return Err(Error::Data(format!(
                    "{}: column {name} has {} values, expected {n}",
                    self.tag,
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!(
                    "{}: non-finite {name} at point {i}",
                    self.tag
                )));
            }
        }
        for (name, col) in [
            ("k", &self.k),
            ("epsilon", &self.epsilon),
            ("nu_t", &self.nu_t),
            ("d", &self.d),
        ] {
            if let Some(i) = col.iter().position(|v| *v < 0.0) {
                return Err(Error::Data(format!(
                    "{}: negative {name} = {} at point {i}",
                    self.tag, col[i]
                )));
            }
        }
        let c = &self.constants;
        if !(c.rho > 0.0) || !(c.nu > 0.0) || !(c.c0 > 0.0) {
            return Err(Error::Data(format!(
                "{}: constants must be positive (rho = {}, nu = {}, c0 = {})",
                self.tag, c.rho, c.nu, c.c0
            )));
        }
        if let Some(dims) = self.dims {
            if dims.len() != n {
                return Err(Error::Data(format!(
                    "{}: grid {}x{} = {} does not match {n} points",
                    self.tag,
                    dims.nx,
                    dims.ny,
                    dims.len()
                )));
            }
        }
        if let Some(g) = &self.gradients {
            if g.len() != n || !g.is_finite() {
                return Err(Error::Data(format!(
                    "{}: gradient columns malformed or non-finite",
                    self.tag
                )));
            }
        }
        if let Some(s) = &self.stresses {
            if let Some(i) = s.iter().position(|t| !t.is_finite()) {
                return Err(Error::Data(format!(
                    "{}: non-finite Reynolds stress at point {i}",
                    self.tag
                )));
            }
        }
        Ok(())
    }
}

/// Coordinates plus Reynolds stresses from a high-fidelity source.
#[derive(Clone, Debug, PartialEq)]
pub struct StressField {
    pub tag: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub stresses: Vec<SymTensor3>,
}

impl StressField {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.stresses.iter().position(|t| !t.is_finite()) {
            return Err(Error::Data(format!(
                "{}: non-finite Reynolds stress at point {i}",
                self.tag
            )));
        }
        if let Some(i) = self.stresses.iter().position(|t| t.trace() < 0.0) {
            return Err(Error::Data(format!(
                "{}: Reynolds stress with negative trace at point {i}",
                self.tag
            )));
        }
        Ok(())
    }
}

/// Counts of points that needed special handling while building states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnisotropyDiagnostics {
    /// `k <= K_FLOOR`, mapped to the isotropic state.
    pub floored: usize,
    /// Outside the realizability triangle, scaled back onto its edge.
    pub clipped: usize,
}

/// Scales a traceless `b` toward zero until its smallest eigenvalue is no
/// lower than −1/3, which puts the state on the triangle boundary.
fn realizable_state(b: &SymTensor3, diag: &mut AnisotropyDiagnostics) -> Result<AnisotropyState> {
    let state = AnisotropyState::from_anisotropy(b)?;
    let l3 = state.eigen.values[2];
    if l3 >= -1.0 / 3.0 {
        return Ok(state);
    }
    diag.clipped += 1;
    let s = -1.0 / (3.0 * l3);
    let mut clipped = state;
    clipped.anisotropy = b.scale(s);
    clipped.eigen.values = state.eigen.values.map(|l| l * s);
    clipped.eigen.values[2] = -1.0 / 3.0;
    clipped.barycentric = crate::tensor::barycentric_from_eigs(clipped.eigen.values)?;
    Ok(clipped)
}

/// Linear eddy-viscosity anisotropy `b = −(ν_t/k) S*` per point, with `S*`
/// the deviatoric strain.
pub fn rans_anisotropy(
    snapshot: &FlowFieldSnapshot,
    gradients: &GradientField,
) -> Result<(Vec<AnisotropyState>, AnisotropyDiagnostics)> {
    if gradients.len() != snapshot.len() {
        return Err(Error::Pairing(format!(
            "{} gradient entries for {} points",
            gradients.len(),
            snapshot.len()
        )));
    }
    let mut diag = AnisotropyDiagnostics::default();
    let mut states = Vec::with_capacity(snapshot.len());
    for p in 0..snapshot.len() {
        let k = snapshot.k[p];
        if k <= K_FLOOR {
            diag.floored += 1;
            states.push(AnisotropyState::isotropic());
            continue;
        }
        let strain = gradients.grad_u[p].symmetric_part();
        let deviatoric = strain - SymTensor3::IDENTITY.scale(strain.trace() / 3.0);
        let b = deviatoric.scale(-snapshot.nu_t[p] / k);
        states.push(realizable_state(&b, &mut diag)?);
    }
    Ok((states, diag))
}

/// RANS states from the snapshot's own Reynolds stress columns when it has
/// them, otherwise from the eddy-viscosity closure.
pub fn rans_states(
    snapshot: &FlowFieldSnapshot,
    gradients: &GradientField,
) -> Result<(Vec<AnisotropyState>, AnisotropyDiagnostics)> {
    match &snapshot.stresses {
        Some(s) => hifi_anisotropy(s),
        None => rans_anisotropy(snapshot, gradients),
    }
}

/// Anisotropy states from measured or simulated Reynolds stresses.
pub fn hifi_anisotropy(
    stresses: &[SymTensor3],
) -> Result<(Vec<AnisotropyState>, AnisotropyDiagnostics)> {
    let mut diag = AnisotropyDiagnostics::default();
    let mut states = Vec::with_capacity(stresses.len());
    for r in stresses {
        let k = crate::tensor::turbulent_kinetic_energy(r);
        if k <= K_FLOOR {
            diag.floored += 1;
            states.push(AnisotropyState::isotropic());
            continue;
        }
        let b = anisotropy_from_reynolds(r, k)?;
        states.push(realizable_state(&b, &mut diag)?);
    }
    Ok((states, diag))
}

/// Planar barycentric distance between co-indexed states.
pub fn make_targets(rans: &[AnisotropyState], hifi: &[AnisotropyState]) -> Result<Vec<f64>> {
    if rans.len() != hifi.len() {
        return Err(Error::Pairing(format!(
            "{} RANS states vs {} high-fidelity states",
            rans.len(),
            hifi.len()
        )));
    }
    Ok(rans
        .iter()
        .zip(hifi)
        .map(|(a, b)| a.barycentric.distance(&b.barycentric))
        .collect())
}

/// Builds the rows of the targets file.
pub fn target_records(
    x: &[f64],
    y: &[f64],
    rans: &[AnisotropyState],
    hifi: &[AnisotropyState],
) -> Result<Vec<TargetRecord>> {
    let delta = make_targets(rans, hifi)?;
    if x.len() != delta.len() || y.len() != delta.len() {
        return Err(Error::Pairing(format!(
            "{} coordinates for {} states",
            x.len(),
            delta.len()
        )));
    }
    Ok((0..delta.len())
        .map(|i| TargetRecord {
            index: i,
            x: x[i],
            y: y[i],
            x_bary_rans: rans[i].barycentric.x,
            y_bary_rans: rans[i].barycentric.y,
            x_bary_hifi: hifi[i].barycentric.x,
            y_bary_hifi: hifi[i].barycentric.y,
            delta_b: delta[i],
        })
        .collect())
}

/// Requires the high-fidelity points to sit on the RANS points.
pub fn check_colocated(
    rans_x: &[f64],
    rans_y: &[f64],
    hifi_x: &[f64],
    hifi_y: &[f64],
    tol: f64,
) -> Result<()> {
    if rans_x.len() != hifi_x.len() {
        return Err(Error::Pairing(format!(
            "RANS has {} points, high-fidelity has {}",
            rans_x.len(),
            hifi_x.len()
        )));
    }
    for i in 0..rans_x.len() {
        let d = (rans_x[i] - hifi_x[i]).hypot(rans_y[i] - hifi_y[i]);
        if !(d <= tol) {
            return Err(Error::Pairing(format!(
                "point {i} not co-located: RANS ({}, {}) vs high-fidelity ({}, {})",
                rans_x[i], rans_y[i], hifi_x[i], hifi_y[i]
            )));
        }
    }
    Ok(())
}

/// Approximate transfer of values to new points by nearest neighbour.
///
/// Returns the resampled values and the largest source-to-target distance.
/// Brute force; intended for occasional preprocessing of mismatched grids.
pub fn resample_nearest<T: Clone>(
    src_x: &[f64],
    src_y: &[f64],
    values: &[T],
    dst_x: &[f64],
    dst_y: &[f64],
) -> Result<(Vec<T>, f64)> {
    if src_x.is_empty() || src_x.len() != values.len() || src_y.len() != values.len() {
        return Err(Error::Pairing("resample source is empty or ragged".into()));
    }
    let mut worst: f64 = 0.0;
    let out = dst_x
        .iter()
        .zip(dst_y)
        .map(|(&x, &y)| {
            let (best, d2) = src_x
                .iter()
                .zip(src_y)
                .map(|(sx, sy)| (sx - x) * (sx - x) + (sy - y) * (sy - y))
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, d2)| if d2 < acc.1 { (i, d2) } else { acc },
                );
            worst = worst.max(d2.sqrt());
            values[best].clone()
        })
        .collect();
    Ok((out, worst))
}

/// One supervised example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub features: FeatureVector,
    pub target: f64,
    pub index: usize,
    pub tag: String,
}

/// Pairs features with targets; all rows must be finite and `Δ_B ∈ [0, 1]`.
pub fn build_samples(
    features: &[FeatureVector],
    targets: &[f64],
    tag: &str,
) -> Result<Vec<TrainingSample>> {
    if features.len() != targets.len() {
        return Err(Error::Pairing(format!(
            "{} feature rows vs {} targets",
            features.len(),
            targets.len()
        )));
    }
    features
        .iter()
        .zip(targets)
        .enumerate()
        .map(|(i, (f, &t))| {
            if !f.0.iter().all(|v| v.is_finite()) {
                return Err(Error::Data(format!(
                    "{tag}: non-finite features at point {i}"
                )));
            }
            if !(0.0..=1.0 + 1e-12).contains(&t) {
                return Err(Error::Data(format!(
                    "{tag}: target {t} at point {i} outside [0, 1]"
                )));
            }
            Ok(TrainingSample {
                features: *f,
                target: t.min(1.0),
                index: i,
                tag: tag.to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    const ORDER: [Split; 3] = [Split::Train, Split::Validation, Split::Test];
}

/// Samples with a train/validation/test assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<TrainingSample>,
    pub assignment: Vec<Split>,
    pub seed: u64,
}

impl SampleSet {
    /// Every sample in `split`, in original order.
    pub fn subset(&self, split: Split) -> Vec<&TrainingSample> {
        self.samples
            .iter()
            .zip(&self.assignment)
            .filter(|(_, s)| **s == split)
            .map(|(t, _)| t)
            .collect()
    }

    pub fn count(&self, split: Split) -> usize {
        self.assignment.iter().filter(|s| **s == split).count()
    }
}

fn validate_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() || fractions.len() > 3 {
        return Err(Error::Size(format!(
            "expected 1 to 3 split fractions, got {}",
            fractions.len()
        )));
    }
    if fractions.iter().any(|f| !(*f > 0.0)) {
        return Err(Error::Size(format!(
            "split fractions must be positive: {fractions:?}"
        )));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Size(format!(
            "split fractions must sum to 1, got {sum} from {fractions:?}"
        )));
    }
    Ok(())
}

/// Group sizes by the floor rule; the last group takes the remainder.
pub fn split_counts(n: usize, fractions: &[f64]) -> Result<Vec<usize>> {
    validate_fractions(fractions)?;
    if n < fractions.len() {
        return Err(Error::Size(format!(
            "{n} samples cannot fill {} split groups",
            fractions.len()
        )));
    }
    let mut counts: Vec<usize> = fractions[..fractions.len() - 1]
        .iter()
        .map(|f| (f * n as f64 + 1e-9).floor() as usize)
        .collect();
    let used: usize = counts.iter().sum();
    counts.push(n - used);
    Ok(counts)
}

/// Seeded random split over points: permute, then assign contiguous runs
/// to train, validation and test in that order.
pub fn split(samples: Vec<TrainingSample>, fractions: &[f64], seed: u64) -> Result<SampleSet> {
    let n = samples.len();
    let counts = split_counts(n, fractions)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = vec![Split::Train; n];
    let mut pos = 0;
    for (group, count) in Split::ORDER.iter().zip(counts) {
        for &i in &order[pos..pos + count] {
            assignment[i] = *group;
        }
        pos += count;
    }
    Ok(SampleSet {
        samples,
        assignment,
        seed,
    })
}

/// Like [`split`], but keeps every group of samples together. Groups are
/// permuted and assigned until each subset's quota is reached, so realized
/// fractions are only approximate.
pub fn split_grouped(
    samples: Vec<TrainingSample>,
    groups: &[usize],
    fractions: &[f64],
    seed: u64,
) -> Result<SampleSet> {
    let n = samples.len();
    if groups.len() != n {
        return Err(Error::Pairing(format!(
            "{} group ids for {n} samples",
            groups.len()
        )));
    }
    let counts = split_counts(n, fractions)?;
    let mut ids: Vec<usize> = groups.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < fractions.len() {
        return Err(Error::Size(format!(
            "{} groups cannot fill {} split groups",
            ids.len(),
            fractions.len()
        )));
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut members: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    for (i, g) in groups.iter().enumerate() {
        members.entry(*g).or_default().push(i);
    }
    let mut assignment = vec![Split::Train; n];
    let last = fractions.len() - 1;
    let mut slot = 0;
    let mut filled = 0;
    for (gi, id) in ids.iter().enumerate() {
        for &i in &members[id] {
            assignment[i] = Split::ORDER[slot];
        }
        filled += members[id].len();
        // leave at least one group for every later subset
        let groups_left = ids.len() - gi - 1;
        if slot < last && (filled >= counts[slot] || groups_left == last - slot) {
            slot += 1;
            filled = 0;
        }
    }
    Ok(SampleSet {
        samples,
        assignment,
        seed,
    })
}
