use nalgebra::Matrix4;
use num_complex::Complex64;
use proptest::prelude::*;
use tetrad_core::clifford::{
    euler_decompose, lift_factors, single_plane_spinor_lift, spinor_lift, CMat4, GammaRep, LorentzMatrix, Plane,
    SpinHalfTransform, ETA,
};
use tetrad_core::Error;

fn max_norm(m: &CMat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn clifford_relation_is_exact() {
    let rep = GammaRep::standard();
    for (a, eta_a) in ETA.iter().enumerate() {
        for b in 0..4 {
            let eta = if a == b { *eta_a } else { 0.0 };
            let anti = rep.gamma(a) * rep.gamma(b) + rep.gamma(b) * rep.gamma(a);
            assert_eq!(anti, CMat4::identity() * Complex64::new(2.0 * eta, 0.0), "({a}, {b})");
        }
    }
}

#[test]
fn hermiticity_pattern() {
    let rep = GammaRep::standard();
    assert_eq!(rep.gamma(0).adjoint(), -rep.gamma(0));
    for j in 1..4 {
        assert_eq!(rep.gamma(j).adjoint(), *rep.gamma(j));
    }
    for a in 0..4 {
        assert_eq!(rep.gamma(a).adjoint() * rep.gamma(0), -(rep.gamma(0) * rep.gamma(a)));
    }
}

#[test]
fn time_gamma_is_diagonal() {
    let g0 = GammaRep::standard().gamma(0);
    let i = Complex64::i();
    assert_eq!(g0.diagonal(), nalgebra::Vector4::new(i, i, -i, -i));
}

#[test]
fn index_checks() {
    let rep = GammaRep::standard();
    assert!(matches!(rep.spin_generator(0, 4), Err(Error::IndexOutOfRange(4))));
    assert!(matches!(Plane::new(2, 1), Err(Error::PlaneOrder { r: 2, s: 1 })));
    assert!(matches!(Plane::new(1, 1), Err(Error::PlaneOrder { .. })));
}

#[test]
fn non_lorentz_matrices_are_rejected() {
    let mut m = Matrix4::identity();
    m[(1, 1)] = 2.0;
    assert!(matches!(LorentzMatrix::new(m), Err(Error::NotLorentz { .. })));
    let parity = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, 1.0, 1.0));
    assert!(matches!(
        LorentzMatrix::new(parity),
        Err(Error::NotProperOrthochronous { .. })
    ));
    let time_reversal = Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, -1.0, 1.0, 1.0));
    assert!(matches!(
        LorentzMatrix::new(time_reversal),
        Err(Error::NotProperOrthochronous { .. })
    ));
}

#[test]
fn spatial_rotation_by_two_pi_flips_spinor_sign() {
    let rep = GammaRep::standard();
    let lift = single_plane_spinor_lift(rep, 1, 2, 2.0 * std::f64::consts::PI).unwrap();
    assert!(max_norm(&(lift.half + CMat4::identity())) < 1e-15);
}

#[test]
fn boost_lift_hand_value() {
    // exp(k/2 gamma^0 gamma^1) = cosh(k/2) + sinh(k/2) gamma^0 gamma^1
    let rep = GammaRep::standard();
    let k = 0.8;
    let lift = single_plane_spinor_lift(rep, 0, 1, k).unwrap();
    let expected = CMat4::identity() * Complex64::new((k / 2.0).cosh(), 0.0)
        + rep.gamma(0) * rep.gamma(1) * Complex64::new((k / 2.0).sinh(), 0.0);
    assert!(max_norm(&(lift.half - expected)) < 1e-15);
    let lam = LorentzMatrix::single_plane(0, 1, k).unwrap();
    assert!(lift.intertwining_defect(rep, &lam) < 1e-14);
}

fn random_transformation() -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((0..6usize, -1.0..1.0f64), 1..8)
}

fn compose(factors: &[(usize, f64)]) -> LorentzMatrix {
    factors.iter().fold(LorentzMatrix::identity(), |acc, &(p, k)| {
        let plane = Plane::CANONICAL[p];
        LorentzMatrix::single_plane(plane.r(), plane.s(), k)
            .unwrap()
            .compose(&acc)
    })
}

proptest! {
    #[test]
    fn euler_factorization_recomposes(factors in random_transformation()) {
        let lam = compose(&factors);
        let euler = euler_decompose(&lam).unwrap();
        prop_assert_eq!(euler.factors.len(), 6);
        let diff = (euler.recompose().matrix() - lam.matrix()).amax();
        prop_assert!(diff < 1e-10 * lam.matrix().amax().max(1.0), "{}", diff);
    }

    #[test]
    fn spinor_lift_intertwines(factors in random_transformation()) {
        let rep = GammaRep::standard();
        let lam = compose(&factors);
        let lift = spinor_lift(rep, &lam).unwrap();
        prop_assert!(lift.intertwining_defect(rep, &lam) < 1e-9);
        prop_assert!(lift.conjugation_defect(rep) < 1e-10);
        prop_assert!(max_norm(&(lift.half * lift.inverse - CMat4::identity())) < 1e-10);
    }

    #[test]
    fn lift_is_a_homomorphism_up_to_sign(a in random_transformation(), b in random_transformation()) {
        let rep = GammaRep::standard();
        let (la, lb) = (compose(&a), compose(&b));
        let product = spinor_lift(rep, &la).unwrap().compose(&spinor_lift(rep, &lb).unwrap());
        let direct = spinor_lift(rep, &la.compose(&lb)).unwrap();
        let plus = max_norm(&(product.half - direct.half));
        let minus = max_norm(&(product.half + direct.half));
        prop_assert!(plus.min(minus) < 1e-8 * max_norm(&direct.half).max(1.0));
    }

    #[test]
    fn lifting_the_factors_matches_the_lift(factors in random_transformation()) {
        let rep = GammaRep::standard();
        let lam = compose(&factors);
        let via_factors = lift_factors(rep, &euler_decompose(&lam).unwrap());
        let identity_check = via_factors.compose(&SpinHalfTransform::identity());
        prop_assert!(identity_check.intertwining_defect(rep, &lam) < 1e-9);
    }
}
