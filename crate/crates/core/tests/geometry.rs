use proptest::prelude::*;
use tetrad_core::catalog::{load_spacetime, SpacetimeKind, SpacetimeSpec};
use tetrad_core::geometry::{
    christoffel, coframe_exterior_derivative, metric_from_coframe, spin_connection, star_d_star_theta,
    torsion_residual, LocalGeometry, SpacetimePoint,
};
use tetrad_core::Error;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn schwarzschild(mass: f64) -> tetrad_core::catalog::Spacetime {
    let mut spec = SpacetimeSpec::new(SpacetimeKind::Schwarzschild);
    spec.mass = mass;
    load_spacetime(&spec).unwrap()
}

#[test]
fn schwarzschild_lapse_derivative_in_the_frame() {
    let (m, r) = (1.5, 7.0);
    let st = schwarzschild(m);
    let x = SpacetimePoint::new([0.2, r, 1.1, 0.4]);
    let f = 1.0 - 2.0 * m / r;
    let dtheta = coframe_exterior_derivative(&st, &x).unwrap();
    // d(sqrt f dt) = (M / r^2 sqrt f) dr ^ dt, evaluated on (v_0, v_1)
    assert!(close(dtheta[0].get(&[0, 1]), -(m / (r * r)) / f.sqrt(), 1e-13));
    // d(r dtheta) = dr ^ dtheta on (v_1, v_2)
    assert!(close(dtheta[2].get(&[1, 2]), f.sqrt() / r, 1e-13));
}

#[test]
fn schwarzschild_christoffel_symbols() {
    let (m, r, th) = (1.0, 5.0, 0.9);
    let st = schwarzschild(m);
    let g = christoffel(&st, &SpacetimePoint::new([0.0, r, th, 2.0])).unwrap();
    let f = 1.0 - 2.0 * m / r;
    let (t, rr, theta, phi) = (0, 1, 2, 3);
    assert!(close(g.raised[rr][t][t], m / (r * r) * f, 1e-13));
    assert!(close(g.raised[t][t][rr], m / (r * r * f), 1e-13));
    assert!(close(g.raised[rr][rr][rr], -m / (r * r * f), 1e-13));
    assert!(close(g.raised[theta][rr][theta], 1.0 / r, 1e-13));
    assert!(close(g.raised[rr][theta][theta], -r * f, 1e-13));
    assert!(close(g.raised[phi][theta][phi], th.cos() / th.sin(), 1e-13));
    assert!(close(g.raised[theta][phi][phi], -th.sin() * th.cos(), 1e-13));
    assert_eq!(g.raised[t][theta][phi], 0.0);
}

#[test]
fn schwarzschild_connection_components() {
    let (m, r) = (1.0, 4.0);
    let st = schwarzschild(m);
    let omega = spin_connection(&st, &SpacetimePoint::new([0.0, r, 1.3, 0.0])).unwrap();
    let f = 1.0 - 2.0 * m / r;
    assert!(close(omega.get(0, 0, 1), m / (r * r * f.sqrt()), 1e-13));
    assert!(close(omega.get(2, 1, 2), f.sqrt() / r, 1e-13));
    assert!(close(omega.get(3, 1, 3), f.sqrt() / r, 1e-13));
    assert!(close(omega.get(3, 2, 3), 1.3f64.cos() / (1.3f64.sin() * r), 1e-13));
}

#[test]
fn frame_divergences() {
    let (m, r) = (1.0, 6.0);
    let st = schwarzschild(m);
    let x = SpacetimePoint::new([0.0, r, 1.0, 0.0]);
    let f = 1.0 - 2.0 * m / r;
    assert!(star_d_star_theta(&st, &x, 0).unwrap().abs() < 1e-14);
    let radial = 2.0 * f.sqrt() / r + m / (r * r * f.sqrt());
    assert!(close(star_d_star_theta(&st, &x, 1).unwrap(), -radial, 1e-13));

    let mut spec = SpacetimeSpec::new(SpacetimeKind::Flrw);
    spec.hubble = 0.7;
    let flrw = load_spacetime(&spec).unwrap();
    let y = SpacetimePoint::new([0.3, 0.1, 0.2, 0.3]);
    assert!(close(star_d_star_theta(&flrw, &y, 0).unwrap(), -3.0 * 0.7, 1e-13));
}

#[test]
fn flrw_hand_values() {
    let mut spec = SpacetimeSpec::new(SpacetimeKind::Flrw);
    spec.a0 = 2.0;
    spec.hubble = 0.25;
    let st = load_spacetime(&spec).unwrap();
    let t: f64 = 0.8;
    let a = 2.0 * (0.25 * t).exp();
    let x = SpacetimePoint::new([t, 0.0, 0.0, 0.0]);
    let g = metric_from_coframe(&st, &x).unwrap();
    assert!(close(g[(1, 1)], a * a, 1e-14));
    let dtheta = coframe_exterior_derivative(&st, &x).unwrap();
    assert!(close(dtheta[1].get(&[0, 1]), 0.25, 1e-14));
    let gamma = christoffel(&st, &x).unwrap();
    assert!(close(gamma.raised[0][1][1], a * a * 0.25, 1e-13));
    assert!(close(gamma.raised[2][0][2], 0.25, 1e-13));
}

#[test]
fn rindler_metric() {
    let st = load_spacetime(&SpacetimeSpec::new(SpacetimeKind::Rindler)).unwrap();
    let g = metric_from_coframe(&st, &SpacetimePoint::new([0.3, 1.7, 0.0, 0.0])).unwrap();
    assert_eq!(g[(0, 0)], -1.7 * 1.7);
    assert_eq!(g[(1, 1)], 1.0);
    assert_eq!(g[(0, 1)], 0.0);
}

#[test]
fn points_outside_the_chart_are_rejected() {
    let st = schwarzschild(1.0);
    let inside = SpacetimePoint::new([0.0, 1.0, 1.0, 0.0]);
    assert!(matches!(LocalGeometry::at(&st, &inside), Err(Error::OutsideDomain(_))));
    let pole = SpacetimePoint::new([0.0, 5.0, 0.0, 0.0]);
    assert!(matches!(LocalGeometry::at(&st, &pole), Err(Error::OutsideDomain(_))));
    let rindler = load_spacetime(&SpacetimeSpec::new(SpacetimeKind::Rindler)).unwrap();
    let wall = SpacetimePoint::new([0.0, -0.5, 0.0, 0.0]);
    assert!(matches!(
        LocalGeometry::at(&rindler, &wall),
        Err(Error::OutsideDomain(_))
    ));
}

#[test]
fn coarse_differences_break_torsion_freedom() {
    let st = schwarzschild(1.0);
    let coarse = st.finite_difference(0.1);
    let x = SpacetimePoint::new([0.0, 3.5, 1.0, 0.5]);
    let reference = LocalGeometry::at(&st, &x).unwrap();
    let omega = LocalGeometry::at(&coarse, &x).unwrap().spin_connection();
    let worst = torsion_residual(&reference.dtheta, &omega)
        .iter()
        .map(|f| f.max_abs())
        .fold(0.0, f64::max);
    assert!(worst > 1e-6, "{worst}");
}

fn kind_strategy() -> impl Strategy<Value = SpacetimeKind> {
    prop_oneof![
        Just(SpacetimeKind::Flat),
        Just(SpacetimeKind::Rindler),
        Just(SpacetimeKind::Schwarzschild),
        Just(SpacetimeKind::Flrw),
    ]
}

proptest! {
    #[test]
    fn frame_identities_hold_everywhere(kind in kind_strategy(), u in prop::array::uniform4(0.0..1.0f64), fd in any::<bool>()) {
        let mut spec = SpacetimeSpec::new(kind);
        if fd {
            spec = spec.with_fd(1e-5);
        }
        let st = load_spacetime(&spec).unwrap();
        let x = st.point_from_unit(u);
        let geo = LocalGeometry::at(&st, &x).unwrap();
        prop_assert!(geo.frame.duality_residual(&geo.theta) < 1e-12);
        let omega = geo.spin_connection();
        prop_assert_eq!(omega.antisymmetry_defect(), 0.0);
        let equivalence = omega.max_abs_diff(&geo.spin_connection_via_christoffel());
        let equivalence_tol = if fd { 1e-5 } else { 1e-9 };
        prop_assert!(equivalence < equivalence_tol);
        let reference = LocalGeometry::at(&*st.analytic(), &x).unwrap();
        let torsion = torsion_residual(&reference.dtheta, &omega).iter().map(|f| f.max_abs()).fold(0.0, f64::max);
        let torsion_tol = if fd { 1e-6 } else { 1e-10 };
        prop_assert!(torsion < torsion_tol);
        for form in geo.exterior_derivative_forms() {
            prop_assert_eq!(form.antisymmetry_defect(), 0.0);
        }
    }

    #[test]
    fn lorentzian_signature(kind in kind_strategy(), u in prop::array::uniform4(0.0..1.0f64)) {
        let st = load_spacetime(&SpacetimeSpec::new(kind)).unwrap();
        let g = metric_from_coframe(&st, &st.point_from_unit(u)).unwrap();
        prop_assert_eq!(tetrad_core::geometry::negative_eigenvalues(&g), 1);
    }
}
