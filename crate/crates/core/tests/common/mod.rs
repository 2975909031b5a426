#![allow(dead_code)]

use eigenperturb::features::LocalFlowState;
use eigenperturb::tensor::{BarycentricPoint, Mat3, HALF_SQRT3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform rotation from a random unit quaternion.
pub fn random_rotation(rng: &mut impl Rng) -> Mat3 {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let tau = std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
        b * (tau * u3).cos(),
    );
    Mat3([
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
        ],
        [
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
        ],
        [
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ])
}

/// Uniform point in the barycentric triangle.
pub fn random_triangle_point(rng: &mut impl Rng) -> BarycentricPoint {
    let (mut r1, mut r2): (f64, f64) = (rng.random(), rng.random());
    if r1 + r2 > 1.0 {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
    }
    // vertices 2C (0,0), 1C (1,0), 3C (1/2, √3/2)
    BarycentricPoint::from_planar(r1 + 0.5 * r2, HALF_SQRT3 * r2)
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Plausible local state: velocity O(1–100 m/s), gradients spanning
/// several decades, positive k, ε, ν_t and wall distance.
pub fn random_local_state(rng: &mut impl Rng) -> LocalFlowState {
    let speed = log_uniform(rng, 0.1, 100.0);
    let g = log_uniform(rng, 1e-2, 1e3);
    LocalFlowState {
        velocity: std::array::from_fn(|_| speed * rng.random_range(-1.0..1.0)),
        grad_u: Mat3(std::array::from_fn(|_| {
            std::array::from_fn(|_| g * rng.random_range(-1.0..1.0))
        })),
        grad_p: std::array::from_fn(|_| log_uniform(rng, 1e-2, 1e3) * rng.random_range(-1.0..1.0)),
        k: log_uniform(rng, 1e-6, 10.0),
        epsilon: log_uniform(rng, 1e-6, 1e3),
        nu_t: log_uniform(rng, 1e-7, 1e-1),
        wall_distance: log_uniform(rng, 1e-6, 1.0),
    }
}
