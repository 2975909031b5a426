mod common;

use eigenperturb::tensor::{
    barycentric_from_eigs, eig_sym3, eigs_from_barycentric, perturb_eigenvalues,
    realizability_check, reconstruct_reynolds, BarycentricPoint, Corner, SymTensor3, HALF_SQRT3,
};
use proptest::prelude::*;

fn triangle_point() -> impl Strategy<Value = BarycentricPoint> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(mut r1, mut r2)| {
        if r1 + r2 > 1.0 {
            r1 = 1.0 - r1;
            r2 = 1.0 - r2;
        }
        BarycentricPoint::from_planar(r1 + 0.5 * r2, HALF_SQRT3 * r2)
    })
}

fn corner() -> impl Strategy<Value = Corner> {
    prop_oneof![
        Just(Corner::OneComponent),
        Just(Corner::TwoComponent),
        Just(Corner::ThreeComponent)
    ]
}

fn symmetric() -> impl Strategy<Value = SymTensor3> {
    (prop::array::uniform6(-1.0..1.0f64), -6.0..3.0f64)
        .prop_map(|(c, e)| SymTensor3::from_components(c).scale(10f64.powf(e)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn eigendecomposition_reconstructs(t in symmetric()) {
        let e = eig_sym3(&t).unwrap();
        let err = (e.reconstruct() - t).frobenius();
        prop_assert!(err <= 1e-12 * t.frobenius().max(1e-300), "err {err:e}");
        prop_assert!(e.vectors.orthonormality_error() < 1e-12);
        prop_assert!(e.values[0] >= e.values[1] && e.values[1] >= e.values[2]);
    }

    #[test]
    fn barycentric_roundtrip(p in triangle_point()) {
        let l = eigs_from_barycentric(&p).unwrap();
        let q = barycentric_from_eigs(l).unwrap();
        prop_assert!(q.distance(&p) < 1e-12);
        prop_assert!(realizability_check(l).passed());
    }

    #[test]
    fn perturbation_stays_realizable(p in triangle_point(), d in 0.0..=1.0f64, c in corner()) {
        let out = perturb_eigenvalues(&p, d, c).unwrap();
        prop_assert!(realizability_check(eigs_from_barycentric(&out).unwrap()).passed());
    }

    #[test]
    fn perturbation_contracts_toward_corner(p in triangle_point(), d in 0.0..=1.0f64, c in corner()) {
        let target = BarycentricPoint::corner(c);
        let out = perturb_eigenvalues(&p, d, c).unwrap();
        let expected = (1.0 - d) * p.distance(&target);
        prop_assert!((out.distance(&target) - expected).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_preserves_trace(
        p in triangle_point(),
        d in 0.0..=1.0f64,
        c in corner(),
        k in 1e-6..1e3f64,
        seed in any::<u64>(),
    ) {
        let v = common::random_rotation(&mut common::rng(seed));
        let l = eigs_from_barycentric(&perturb_eigenvalues(&p, d, c).unwrap()).unwrap();
        let r = reconstruct_reynolds(k, &v, l).unwrap();
        prop_assert!((r.trace() - 2.0 * k).abs() <= 1e-10 * k.max(1.0));
    }
}

#[test]
fn rotated_spectrum_is_recovered() {
    let mut rng = common::rng(11);
    for _ in 0..200 {
        let q = common::random_rotation(&mut rng);
        let t = SymTensor3::diag(0.3, 0.3 - 1e-9, -0.6).rotate(&q);
        let e = eig_sym3(&t).unwrap();
        assert!((e.values[0] - 0.3).abs() < 1e-12);
        assert!((e.values[1] - (0.3 - 1e-9)).abs() < 1e-12);
        assert!((e.values[2] + 0.6).abs() < 1e-12);
        assert!((e.reconstruct() - t).frobenius() < 1e-12);
    }
}
