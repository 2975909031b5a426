use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Height of the unit-side triangle, `√3 / 2`.
pub const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

/// Tolerance on `Σλ = 0` and on the barycentric weights.
const REALIZABILITY_TOL: f64 = 1e-8;

const ORDER_TOL: f64 = 1e-10;

/// Weights must sum to one within this tolerance to be inverted.
const WEIGHT_SUM_TOL: f64 = 1e-8;

/// Limiting states of turbulence anisotropy, the vertices of the triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    OneComponent,
    TwoComponent,
    ThreeComponent,
}

impl Corner {
    pub const ALL: [Corner; 3] = [
        Corner::OneComponent,
        Corner::TwoComponent,
        Corner::ThreeComponent,
    ];

    pub fn index(self) -> usize {
        match self {
            Corner::OneComponent => 0,
            Corner::TwoComponent => 1,
            Corner::ThreeComponent => 2,
        }
    }

    /// Lower-case tag used in filenames (`1c`, `2c`, `3c`).
    pub fn tag(self) -> &'static str {
        match self {
            Corner::OneComponent => "1c",
            Corner::TwoComponent => "2c",
            Corner::ThreeComponent => "3c",
        }
    }

    pub fn planar(self) -> (f64, f64) {
        match self {
            Corner::OneComponent => (1.0, 0.0),
            Corner::TwoComponent => (0.0, 0.0),
            Corner::ThreeComponent => (0.5, HALF_SQRT3),
        }
    }

    /// Anisotropy eigenvalues of the limiting state.
    pub fn eigenvalues(self) -> [f64; 3] {
        match self {
            Corner::OneComponent => [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0],
            Corner::TwoComponent => [1.0 / 6.0, 1.0 / 6.0, -1.0 / 3.0],
            Corner::ThreeComponent => [0.0; 3],
        }
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Corner::OneComponent => "1C",
            Corner::TwoComponent => "2C",
            Corner::ThreeComponent => "3C",
        };
        f.write_str(s)
    }
}

/// Location on the realizability triangle with vertices 1C = (1, 0),
/// 2C = (0, 0) and 3C = (1/2, √3/2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarycentricPoint {
    /// `(C1c, C2c, C3c)`.
    pub weights: [f64; 3],
    pub x: f64,
    pub y: f64,
}

impl BarycentricPoint {
    pub fn from_weights(weights: [f64; 3]) -> Self {
        BarycentricPoint {
            weights,
            x: weights[0] + 0.5 * weights[2],
            y: HALF_SQRT3 * weights[2],
        }
    }

    pub fn from_planar(x: f64, y: f64) -> Self {
        let c3 = y / HALF_SQRT3;
        let c1 = x - 0.5 * c3;
        BarycentricPoint {
            weights: [c1, 1.0 - c1 - c3, c3],
            x,
            y,
        }
    }

    pub fn corner(corner: Corner) -> Self {
        let mut w = [0.0; 3];
        w[corner.index()] = 1.0;
        Self::from_weights(w)
    }

    /// Euclidean distance in the plane of the triangle.
    pub fn distance(&self, other: &BarycentricPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_realizable(&self) -> bool {
        self.weights.iter().all(|w| *w >= -REALIZABILITY_TOL)
            && (self.weights.iter().sum::<f64>() - 1.0).abs() <= REALIZABILITY_TOL
    }
}

/// Barycentric weights `C1c = λ1 - λ2`, `C2c = 2(λ2 - λ3)`, `C3c = 3λ3 + 1`.
pub fn barycentric_from_eigs(lambda: [f64; 3]) -> Result<BarycentricPoint> {
    let [l1, l2, l3] = lambda;
    if !lambda.iter().all(|l| l.is_finite()) {
        return Err(Error::Domain(format!("non-finite eigenvalues {lambda:?}")));
    }
    if l1 < l2 - ORDER_TOL || l2 < l3 - ORDER_TOL {
        return Err(Error::Domain(format!(
            "eigenvalues not sorted descending: {lambda:?}"
        )));
    }
    let sum = l1 + l2 + l3;
    if sum.abs() > REALIZABILITY_TOL {
        return Err(Error::Domain(format!(
            "anisotropy eigenvalues must sum to zero, got {sum:e}"
        )));
    }
    Ok(BarycentricPoint::from_weights([
        l1 - l2,
        2.0 * (l2 - l3),
        3.0 * l3 + 1.0,
    ]))
}

/// Inverse of [`barycentric_from_eigs`].
pub fn eigs_from_barycentric(p: &BarycentricPoint) -> Result<[f64; 3]> {
    let [c1, c2, c3] = p.weights;
    let sum = c1 + c2 + c3;
    if !((sum - 1.0).abs() <= WEIGHT_SUM_TOL) {
        return Err(Error::Domain(format!(
            "barycentric weights must sum to 1, got {sum}"
        )));
    }
    let l3 = (c3 - 1.0) / 3.0;
    let l2 = l3 + 0.5 * c2;
    let l1 = l2 + c1;
    Ok([l1, l2, l3])
}

/// Moves `p` a fraction `delta_b` of the way toward `corner`.
///
/// The interpolation is done on the weights, `C* = (1 - Δ) C + Δ e_corner`,
/// which is the same straight line in the plane and hits the vertex exactly
/// at `Δ = 1`.
pub fn perturb_eigenvalues(
    p: &BarycentricPoint,
    delta_b: f64,
    corner: Corner,
) -> Result<BarycentricPoint> {
    if !(0.0..=1.0).contains(&delta_b) {
        return Err(Error::Domain(format!(
            "perturbation magnitude must lie in [0, 1], got {delta_b}"
        )));
    }
    if delta_b == 0.0 {
        return Ok(*p);
    }
    let keep = 1.0 - delta_b;
    let target = corner.index();
    let weights = std::array::from_fn(|i| {
        let e = if i == target { delta_b } else { 0.0 };
        keep * p.weights[i] + e
    });
    Ok(BarycentricPoint::from_weights(weights))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `|λ1 + λ2 + λ3|` exceeds the tolerance.
    NonZeroTrace(f64),
    /// A barycentric weight is negative: the point is outside the triangle.
    NegativeWeight {
        corner: Corner,
        weight: f64,
    },
    NonFinite,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonZeroTrace(s) => write!(f, "eigenvalue sum {s:e} is not zero"),
            Violation::NegativeWeight { corner, weight } => {
                write!(
                    f,
                    "weight C{corner} = {weight:e} is negative (outside triangle)"
                )
            }
            Violation::NonFinite => f.write_str("non-finite eigenvalue"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizabilityReport {
    pub eigenvalue_sum: f64,
    pub weights: [f64; 3],
    pub violations: Vec<Violation>,
}

impl RealizabilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for RealizabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return f.write_str("realizable");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "not realizable: {}", parts.join("; "))
    }
}

/// Checks an eigenvalue triple of `b` against the realizability triangle.
/// Input order does not matter.
pub fn realizability_check(lambda: [f64; 3]) -> RealizabilityReport {
    let mut sorted = lambda;
    sorted.sort_by(|a, b| b.total_cmp(a));
    let [l1, l2, l3] = sorted;
    let sum = l1 + l2 + l3;
    let weights = [l1 - l2, 2.0 * (l2 - l3), 3.0 * l3 + 1.0];
    let mut violations = Vec::new();
    if !lambda.iter().all(|l| l.is_finite()) {
        violations.push(Violation::NonFinite);
    } else {
        if sum.abs() > REALIZABILITY_TOL {
            violations.push(Violation::NonZeroTrace(sum));
        }
        for corner in Corner::ALL {
            let w = weights[corner.index()];
            if w < -REALIZABILITY_TOL {
                violations.push(Violation::NegativeWeight { corner, weight: w });
            }
        }
    }
    RealizabilityReport {
        eigenvalue_sum: sum,
        weights,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_mapping() {
        let p = barycentric_from_eigs([0.0; 3]).unwrap();
        assert_eq!(p.weights, [0.0, 0.0, 1.0]);
        assert_eq!((p.x, p.y), (0.5, HALF_SQRT3));

        let p = barycentric_from_eigs([2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]).unwrap();
        assert_eq!(p.weights, [1.0, 0.0, 0.0]);
        assert_eq!((p.x, p.y), (1.0, 0.0));

        let p = barycentric_from_eigs([1.0 / 6.0, 1.0 / 6.0, -1.0 / 3.0]).unwrap();
        assert_eq!(p.weights, [0.0, 1.0, 0.0]);
        assert_eq!((p.x, p.y), (0.0, 0.0));
    }

    #[test]
    fn corners_roundtrip() {
        for c in Corner::ALL {
            let p = BarycentricPoint::corner(c);
            assert_eq!((p.x, p.y), c.planar());
            let l = eigs_from_barycentric(&p).unwrap();
            for (a, b) in l.iter().zip(c.eigenvalues()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unsorted_or_traced_input_rejected() {
        assert!(barycentric_from_eigs([-0.1, 0.0, 0.1]).is_err());
        assert!(barycentric_from_eigs([0.3, 0.2, 0.1]).is_err());
    }

    #[test]
    fn inverse_rejects_bad_weights() {
        let p = BarycentricPoint::from_weights([0.5, 0.5, 0.5]);
        assert!(matches!(eigs_from_barycentric(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn planar_and_weights_agree() {
        let p = BarycentricPoint::from_weights([0.2, 0.3, 0.5]);
        let q = BarycentricPoint::from_planar(p.x, p.y);
        for i in 0..3 {
            assert!((p.weights[i] - q.weights[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn perturbation_examples() {
        let p = BarycentricPoint::from_weights([0.2, 0.3, 0.5]);
        assert_eq!(
            perturb_eigenvalues(&p, 0.0, Corner::TwoComponent).unwrap(),
            p
        );
        let q = perturb_eigenvalues(&p, 1.0, Corner::OneComponent).unwrap();
        assert_eq!((q.x, q.y), (1.0, 0.0));

        let iso = BarycentricPoint::corner(Corner::ThreeComponent);
        let mid = perturb_eigenvalues(&iso, 0.5, Corner::TwoComponent).unwrap();
        assert!((mid.x - 0.25).abs() < 1e-15);
        assert!((mid.y - 3f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn perturbation_rejects_out_of_range() {
        let p = BarycentricPoint::corner(Corner::ThreeComponent);
        assert!(perturb_eigenvalues(&p, -0.01, Corner::OneComponent).is_err());
        assert!(perturb_eigenvalues(&p, 1.01, Corner::OneComponent).is_err());
        assert!(perturb_eigenvalues(&p, f64::NAN, Corner::OneComponent).is_err());
    }

    #[test]
    fn realizability_examples() {
        assert!(realizability_check([0.0; 3]).passed());
        assert!(realizability_check([2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]).passed());
        let r = realizability_check([0.8, -0.4, -0.4]);
        assert!(!r.passed());
        // C3c = 3(-0.4) + 1 = -0.2
        assert_eq!(
            r.violations,
            vec![Violation::NegativeWeight {
                corner: Corner::ThreeComponent,
                weight: 3.0 * -0.4 + 1.0
            }]
        );
        assert!(r.to_string().contains("C3C"));

        let r = realizability_check([0.2, 0.1, 0.0]);
        assert!(matches!(r.violations[0], Violation::NonZeroTrace(_)));
    }
}
