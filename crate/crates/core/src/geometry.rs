//! Coframe-driven geometry at a single point.
//!
//! Index layout used throughout:
//! - `theta[(a, mu)] = theta^a_mu`
//! - `frame[(a, mu)] = v_a^mu`, with `theta^a_mu v_b^mu = delta^a_b`
//! - `d_theta[nu][(a, mu)] = d_nu theta^a_mu`
//! - `SpinConnection::omega[a][b][c] = omega_{bc}(v_a)`

use std::sync::Arc;

use nalgebra::{Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::clifford::ETA;
use crate::error::{Error, Result};
use crate::forms::IndexedForm;

/// Condition number above which a coframe is treated as degenerate.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub coords: [f64; 4],
}

impl SpacetimePoint {
    pub fn new(coords: [f64; 4]) -> Self {
        SpacetimePoint { coords }
    }

    pub fn shifted(&self, mu: usize, h: f64) -> Self {
        let mut coords = self.coords;
        coords[mu] += h;
        SpacetimePoint { coords }
    }
}

impl From<[f64; 4]> for SpacetimePoint {
    fn from(coords: [f64; 4]) -> Self {
        SpacetimePoint { coords }
    }
}

/// `d_nu theta^a_mu`, outer index `nu`.
pub type CoframeGradient = [Matrix4<f64>; 4];

/// A coframe `theta^a_mu(x)` on a single chart together with its first
/// derivatives.
pub trait CoframeField: Send + Sync {
    fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64>;

    fn d_theta(&self, x: &SpacetimePoint) -> CoframeGradient;

    fn contains(&self, _x: &SpacetimePoint) -> bool {
        true
    }
}

impl<T: CoframeField + ?Sized> CoframeField for &T {
    fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64> {
        (**self).theta(x)
    }
    fn d_theta(&self, x: &SpacetimePoint) -> CoframeGradient {
        (**self).d_theta(x)
    }
    fn contains(&self, x: &SpacetimePoint) -> bool {
        (**self).contains(x)
    }
}

impl<T: CoframeField + ?Sized> CoframeField for Box<T> {
    fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64> {
        (**self).theta(x)
    }
    fn d_theta(&self, x: &SpacetimePoint) -> CoframeGradient {
        (**self).d_theta(x)
    }
    fn contains(&self, x: &SpacetimePoint) -> bool {
        (**self).contains(x)
    }
}

impl<T: CoframeField + ?Sized> CoframeField for Arc<T> {
    fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64> {
        (**self).theta(x)
    }
    fn d_theta(&self, x: &SpacetimePoint) -> CoframeGradient {
        (**self).d_theta(x)
    }
    fn contains(&self, x: &SpacetimePoint) -> bool {
        (**self).contains(x)
    }
}

/// Central-difference derivative provider wrapped around any coframe.
///
/// The step along coordinate `mu` is `step * max(1, |x^mu|)`. With
/// `richardson` set, two step sizes are combined to cancel the `h^2` term.
#[derive(Clone, Debug)]
pub struct FiniteDifference<C> {
    inner: C,
    step: f64,
    richardson: bool,
}

impl<C: CoframeField> FiniteDifference<C> {
    pub fn new(inner: C, step: f64) -> Self {
        FiniteDifference {
            inner,
            step,
            richardson: false,
        }
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    fn central(&self, x: &SpacetimePoint, mu: usize, h: f64) -> Matrix4<f64> {
        (self.inner.theta(&x.shifted(mu, h)) - self.inner.theta(&x.shifted(mu, -h))) / (2.0 * h)
    }
}

impl<C: CoframeField> CoframeField for FiniteDifference<C> {
    fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64> {
        self.inner.theta(x)
    }

    fn d_theta(&self, x: &SpacetimePoint) -> CoframeGradient {
        std::array::from_fn(|mu| {
            let h = self.step * x.coords[mu].abs().max(1.0);
            let coarse = self.central(x, mu, h);
            if self.richardson {
                let fine = self.central(x, mu, h / 2.0);
                (fine * 4.0 - coarse) / 3.0
            } else {
                coarse
            }
        })
    }

    fn contains(&self, x: &SpacetimePoint) -> bool {
        self.inner.contains(x)
    }
}

/// Dual frame `v_a^mu` stored as rows indexed by `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameField(pub Matrix4<f64>);

impl FrameField {
    /// `max |theta^a_mu v_b^mu - delta^a_b|`.
    pub fn duality_residual(&self, theta: &Matrix4<f64>) -> f64 {
        (theta * self.0.transpose() - Matrix4::identity()).amax()
    }
}

/// `omega[a][b][c] = omega_{bc}(v_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinConnection {
    pub omega: [[[f64; 4]; 4]; 4],
}

impl SpinConnection {
    pub fn zero() -> Self {
        SpinConnection {
            omega: [[[0.0; 4]; 4]; 4],
        }
    }

    /// `omega_{bc}(v_a)`.
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.omega[a][b][c]
    }

    /// `omega^b_c(v_a) = eta^{bb} omega_{bc}(v_a)`.
    pub fn mixed(&self, a: usize, b: usize, c: usize) -> f64 {
        ETA[b] * self.omega[a][b][c]
    }

    pub fn max_abs_diff(&self, other: &SpinConnection) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    worst = worst.max((self.omega[a][b][c] - other.omega[a][b][c]).abs());
                }
            }
        }
        worst
    }

    /// `max |omega_{bc}(v_a) + omega_{cb}(v_a)|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    worst = worst.max((self.omega[a][b][c] + self.omega[a][c][b]).abs());
                }
            }
        }
        worst
    }
}

/// `lower[rho][nu][mu] = Gamma_{rho nu mu}`, `raised[rho][nu][mu] = Gamma^rho_{nu mu}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChristoffelSymbols {
    pub lower: [[[f64; 4]; 4]; 4],
    pub raised: [[[f64; 4]; 4]; 4],
}

/// `dtheta[a][b][c] = d theta^a(v_b, v_c)`, antisymmetric in `(b, c)`.
pub type FrameExteriorDerivative = [[[f64; 4]; 4]; 4];

/// Everything first-order about a coframe at one point.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub point: SpacetimePoint,
    pub theta: Matrix4<f64>,
    pub frame: FrameField,
    pub d_theta: CoframeGradient,
    pub dtheta: FrameExteriorDerivative,
}

fn condition_number(theta: &Matrix4<f64>) -> f64 {
    let sv = theta.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 || !min.is_finite() || !max.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

fn checked_frame(theta: &Matrix4<f64>) -> Result<FrameField> {
    let cond = condition_number(theta);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::DegenerateCoframe(cond));
    }
    let inv = theta.try_inverse().ok_or(Error::DegenerateCoframe(f64::INFINITY))?;
    Ok(FrameField(inv.transpose()))
}

fn checked_point(cf: &dyn CoframeField, x: &SpacetimePoint) -> Result<()> {
    if cf.contains(x) {
        Ok(())
    } else {
        Err(Error::OutsideDomain(x.coords))
    }
}

/// `d theta^a(v_b, v_c) = (d_nu theta^a_mu - d_mu theta^a_nu) v_b^nu v_c^mu`,
/// filled for `b < c` and mirrored.
pub fn frame_exterior_derivative(frame: &FrameField, d_theta: &CoframeGradient) -> FrameExteriorDerivative {
    let v = &frame.0;
    let mut out = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in (b + 1)..4 {
                let mut sum = 0.0;
                for nu in 0..4 {
                    for mu in 0..4 {
                        let curl = d_theta[nu][(a, mu)] - d_theta[mu][(a, nu)];
                        sum += curl * v[(b, nu)] * v[(c, mu)];
                    }
                }
                out[a][b][c] = sum;
                out[a][c][b] = -sum;
            }
        }
    }
    out
}

impl LocalGeometry {
    pub fn at(cf: &dyn CoframeField, x: &SpacetimePoint) -> Result<Self> {
        checked_point(cf, x)?;
        let theta = cf.theta(x);
        let frame = checked_frame(&theta)?;
        let d_theta = cf.d_theta(x);
        let dtheta = frame_exterior_derivative(&frame, &d_theta);
        Ok(LocalGeometry {
            point: *x,
            theta,
            frame,
            d_theta,
            dtheta,
        })
    }

    /// `g_{mu nu} = eta_{ab} theta^a_mu theta^b_nu`.
    pub fn metric(&self) -> Matrix4<f64> {
        metric_of(&self.theta)
    }

    /// `g^{mu nu} = eta^{ab} v_a^mu v_b^nu`.
    pub fn inverse_metric(&self) -> Matrix4<f64> {
        let v = &self.frame.0;
        v.transpose() * eta_matrix() * v
    }

    /// `d theta_a(v_b, v_c)` with the first index lowered.
    pub fn dtheta_lower(&self, a: usize, b: usize, c: usize) -> f64 {
        ETA[a] * self.dtheta[a][b][c]
    }

    pub fn exterior_derivative_forms(&self) -> [IndexedForm; 4] {
        std::array::from_fn(|a| IndexedForm::from_fn(2, |idx| self.dtheta[a][idx[0]][idx[1]]).expect("degree 2"))
    }

    /// `omega_{bc}(v_a) = 1/2 (d theta_a(v_b, v_c) + d theta_b(v_a, v_c) - d theta_c(v_a, v_b))`.
    pub fn spin_connection(&self) -> SpinConnection {
        spin_connection_from(&self.dtheta)
    }

    pub fn christoffel(&self) -> ChristoffelSymbols {
        let mut dg = [Matrix4::zeros(); 4];
        for (sigma, slot) in dg.iter_mut().enumerate() {
            let dt = &self.d_theta[sigma];
            *slot = dt.transpose() * eta_matrix() * self.theta + self.theta.transpose() * eta_matrix() * dt;
        }
        let mut lower = [[[0.0; 4]; 4]; 4];
        for rho in 0..4 {
            for nu in 0..4 {
                for mu in 0..4 {
                    lower[rho][nu][mu] = 0.5 * (dg[mu][(rho, nu)] + dg[nu][(rho, mu)] - dg[rho][(nu, mu)]);
                }
            }
        }
        let ginv = self.inverse_metric();
        let mut raised = [[[0.0; 4]; 4]; 4];
        for rho in 0..4 {
            for nu in 0..4 {
                for mu in 0..4 {
                    raised[rho][nu][mu] = (0..4).map(|s| ginv[(rho, s)] * lower[s][nu][mu]).sum();
                }
            }
        }
        ChristoffelSymbols { lower, raised }
    }

    /// `omega_{bc}(v_a) = v_a^mu v_b^nu theta_{c rho} Gamma^rho_{nu mu} - v_a^mu v_b^nu d_mu theta_{c nu}`.
    ///
    /// No antisymmetrization is applied.
    pub fn spin_connection_via_christoffel(&self) -> SpinConnection {
        let gamma = self.christoffel();
        let v = &self.frame.0;
        let mut omega = [[[0.0; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let mut sum = 0.0;
                    for mu in 0..4 {
                        for nu in 0..4 {
                            let vv = v[(a, mu)] * v[(b, nu)];
                            if vv == 0.0 {
                                continue;
                            }
                            let conn: f64 = (0..4).map(|rho| self.theta[(c, rho)] * gamma.raised[rho][nu][mu]).sum();
                            sum += vv * ETA[c] * (conn - self.d_theta[mu][(c, nu)]);
                        }
                    }
                    omega[a][b][c] = sum;
                }
            }
        }
        SpinConnection { omega }
    }

    /// `* d * theta_a = - d theta^b(v_a, v_b)`.
    pub fn star_d_star_theta(&self, a: usize) -> f64 {
        -(0..4).map(|b| self.dtheta[b][a][b]).sum::<f64>()
    }
}

pub(crate) fn eta_matrix() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::from(ETA))
}

fn metric_of(theta: &Matrix4<f64>) -> Matrix4<f64> {
    theta.transpose() * eta_matrix() * theta
}

pub fn spin_connection_from(dtheta: &FrameExteriorDerivative) -> SpinConnection {
    let low = |a: usize, b: usize, c: usize| ETA[a] * dtheta[a][b][c];
    let mut omega = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in (b + 1)..4 {
                let w = 0.5 * (low(a, b, c) + low(b, a, c) - low(c, a, b));
                omega[a][b][c] = w;
                omega[a][c][b] = -w;
            }
        }
    }
    SpinConnection { omega }
}

/// `(d theta^a - omega^a_b ^ theta^b)(v_c, v_d)
///   = d theta^a(v_c, v_d) - omega^a_d(v_c) + omega^a_c(v_d)`.
pub fn torsion_residual(dtheta: &FrameExteriorDerivative, omega: &SpinConnection) -> [IndexedForm; 4] {
    std::array::from_fn(|a| {
        IndexedForm::from_fn(2, |idx| {
            let (c, d) = (idx[0], idx[1]);
            dtheta[a][c][d] - omega.mixed(c, a, d) + omega.mixed(d, a, c)
        })
        .expect("degree 2")
    })
}

/// Number of negative eigenvalues of a symmetric matrix.
pub fn negative_eigenvalues(g: &Matrix4<f64>) -> usize {
    SymmetricEigen::new(*g).eigenvalues.iter().filter(|&&l| l < 0.0).count()
}

pub fn metric_from_coframe(cf: &dyn CoframeField, x: &SpacetimePoint) -> Result<Matrix4<f64>> {
    checked_point(cf, x)?;
    Ok(metric_of(&cf.theta(x)))
}

pub fn frame_from_coframe(cf: &dyn CoframeField, x: &SpacetimePoint) -> Result<FrameField> {
    checked_point(cf, x)?;
    checked_frame(&cf.theta(x))
}

/// `d theta^a` as 2-forms on the orthonormal basis, one per `a`.
pub fn coframe_exterior_derivative(cf: &dyn CoframeField, x: &SpacetimePoint) -> Result<[IndexedForm; 4]> {
    Ok(LocalGeometry::at(cf, x)?.exterior_derivative_forms())
}

pub fn spin_connection(cf: &dyn CoframeField, x: &SpacetimePoint) -> Result<SpinConnection> {
    Ok(LocalGeometry::at(cf, x)?.spin_connection())
}

pub fn christoffel(cf: &dyn CoframeField, x: &SpacetimePoint) -> Result<ChristoffelSymbols> {
    Ok(LocalGeometry::at(cf, x)?.christoffel())
}

pub fn spin_connection_via_christoffel(cf: &dyn CoframeField, x: &SpacetimePoint) -> Result<SpinConnection> {
    Ok(LocalGeometry::at(cf, x)?.spin_connection_via_christoffel())
}

pub fn torsion(cf: &dyn CoframeField, x: &SpacetimePoint) -> Result<[IndexedForm; 4]> {
    let geo = LocalGeometry::at(cf, x)?;
    Ok(torsion_residual(&geo.dtheta, &geo.spin_connection()))
}

pub fn hodge_dual(form: &IndexedForm) -> Result<IndexedForm> {
    form.hodge_dual()
}

pub fn star_d_star_theta(cf: &dyn CoframeField, x: &SpacetimePoint, a: usize) -> Result<f64> {
    crate::clifford::check_index(a)?;
    Ok(LocalGeometry::at(cf, x)?.star_d_star_theta(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant(Matrix4<f64>);

    impl CoframeField for Constant {
        fn theta(&self, _x: &SpacetimePoint) -> Matrix4<f64> {
            self.0
        }
        fn d_theta(&self, _x: &SpacetimePoint) -> CoframeGradient {
            [Matrix4::zeros(); 4]
        }
    }

    /// theta^0 = x dt, theta^i = dx^i, written out by hand.
    struct HandRindler;

    impl CoframeField for HandRindler {
        fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64> {
            let mut t = Matrix4::identity();
            t[(0, 0)] = x.coords[1];
            t
        }
        fn d_theta(&self, _x: &SpacetimePoint) -> CoframeGradient {
            let mut d = [Matrix4::zeros(); 4];
            d[1][(0, 0)] = 1.0;
            d
        }
        fn contains(&self, x: &SpacetimePoint) -> bool {
            x.coords[1] > 0.0
        }
    }

    fn rindler_point() -> SpacetimePoint {
        SpacetimePoint::new([0.3, 2.0, -0.4, 1.1])
    }

    #[test]
    fn flat_is_trivial() {
        let flat = Constant(Matrix4::identity());
        let x = SpacetimePoint::new([0.1, 0.2, 0.3, 0.4]);
        assert_eq!(metric_from_coframe(&flat, &x).unwrap(), eta_matrix());
        assert_eq!(frame_from_coframe(&flat, &x).unwrap().0, Matrix4::identity());
        assert_eq!(spin_connection(&flat, &x).unwrap(), SpinConnection::zero());
        assert_eq!(
            spin_connection_via_christoffel(&flat, &x).unwrap(),
            SpinConnection::zero()
        );
        for form in torsion(&flat, &x).unwrap() {
            assert_eq!(form.max_abs(), 0.0);
        }
        for form in coframe_exterior_derivative(&flat, &x).unwrap() {
            assert_eq!(form.max_abs(), 0.0);
        }
        let gamma = christoffel(&flat, &x).unwrap();
        assert!(gamma.lower.iter().flatten().flatten().all(|&g| g == 0.0));
        for a in 0..4 {
            assert_eq!(star_d_star_theta(&flat, &x, a).unwrap(), 0.0);
        }
    }

    #[test]
    fn rindler_hand_values() {
        let cf = HandRindler;
        let x = rindler_point();
        let g = metric_from_coframe(&cf, &x).unwrap();
        assert_eq!(g[(0, 0)], -4.0);
        assert_eq!(g[(1, 1)], 1.0);
        let v = frame_from_coframe(&cf, &x).unwrap();
        assert_eq!(v.0[(0, 0)], 0.5);

        let dtheta = coframe_exterior_derivative(&cf, &x).unwrap();
        assert!((dtheta[0].get(&[0, 1]) + 0.5).abs() < 1e-15);
        assert!((dtheta[0].get(&[1, 0]) - 0.5).abs() < 1e-15);

        let omega = spin_connection(&cf, &x).unwrap();
        assert!((omega.get(0, 0, 1) - 0.5).abs() < 1e-15);
        assert_eq!(omega.antisymmetry_defect(), 0.0);

        let gamma = christoffel(&cf, &x).unwrap();
        // Gamma_{x t t} = -1/2 d_x g_tt = x
        assert!((gamma.lower[1][0][0] - 2.0).abs() < 1e-15);

        let alt = spin_connection_via_christoffel(&cf, &x).unwrap();
        assert!(omega.max_abs_diff(&alt) < 1e-15);

        for form in torsion(&cf, &x).unwrap() {
            assert!(form.max_abs() < 1e-15);
        }
        assert!((star_d_star_theta(&cf, &x, 1).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_outside() {
        let mut t = Matrix4::identity();
        t[(2, 2)] = 0.0;
        let cf = Constant(t);
        let x = SpacetimePoint::new([0.0; 4]);
        assert!(matches!(frame_from_coframe(&cf, &x), Err(Error::DegenerateCoframe(_))));
        assert!(matches!(
            metric_from_coframe(&HandRindler, &SpacetimePoint::new([0.0, -1.0, 0.0, 0.0])),
            Err(Error::OutsideDomain(_))
        ));
        assert!(matches!(
            star_d_star_theta(&HandRindler, &rindler_point(), 4),
            Err(Error::IndexOutOfRange(4))
        ));
    }

    #[test]
    fn finite_difference_recovers_linear_coframe() {
        let cf = FiniteDifference::new(HandRindler, 1e-5);
        let x = rindler_point();
        let fd = cf.d_theta(&x);
        let exact = HandRindler.d_theta(&x);
        for nu in 0..4 {
            assert!((fd[nu] - exact[nu]).amax() < 1e-10);
        }
    }

    #[test]
    fn signature_counts() {
        assert_eq!(negative_eigenvalues(&eta_matrix()), 1);
        assert_eq!(negative_eigenvalues(&Matrix4::identity()), 0);
    }
}
