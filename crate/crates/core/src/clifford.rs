//! Gamma matrices, spin generators and the SO(3,1) -> spinor lift.
//!
//! The representation is fixed:
//!
//! ```text
//! gamma^0 = [[ i, 0], [0, -i]]      gamma^j = [[0, sigma^j], [sigma^j, 0]]
//! ```
//!
//! with metric `eta = diag(-1, 1, 1, 1)`, so that
//! `gamma^a gamma^b + gamma^b gamma^a = 2 eta^{ab}`. Every entry of every gamma
//! matrix is one of `0, +-1, +-i`, which keeps products of up to three of them
//! exact in floating point.

use std::sync::OnceLock;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat4 = Matrix4<Complex64>;
pub type Spinor = nalgebra::Vector4<Complex64>;

/// Diagonal of the Minkowski metric, `eta_{aa} = eta^{aa}`.
pub const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Tolerance for `L^T eta L = eta`, relative to the squared entry scale.
pub const LORENTZ_TOL: f64 = 1e-12;

pub(crate) fn check_index(a: usize) -> Result<usize> {
    if a < 4 {
        Ok(a)
    } else {
        Err(Error::IndexOutOfRange(a))
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cmat(rows: [[Complex64; 4]; 4]) -> CMat4 {
    CMat4::from_fn(|i, j| rows[i][j])
}

/// The four gamma matrices together with their pairwise and triple products.
#[derive(Clone, Debug)]
pub struct GammaRep {
    gamma: [CMat4; 4],
    eta: Matrix4<f64>,
    pair: [[CMat4; 4]; 4],
    triple: Box<[[[CMat4; 4]; 4]; 4]>,
}

impl Default for GammaRep {
    fn default() -> Self {
        Self::new()
    }
}

impl GammaRep {
    pub fn new() -> Self {
        let o = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let g0 = cmat([[i, o, o, o], [o, i, o, o], [o, o, -i, o], [o, o, o, -i]]);
        let g1 = cmat([[o, o, o, one], [o, o, one, o], [o, one, o, o], [one, o, o, o]]);
        let g2 = cmat([[o, o, o, -i], [o, o, i, o], [o, -i, o, o], [i, o, o, o]]);
        let g3 = cmat([[o, o, one, o], [o, o, o, -one], [one, o, o, o], [o, -one, o, o]]);
        let gamma = [g0, g1, g2, g3];
        let pair: [[CMat4; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|b| gamma[a] * gamma[b]));
        let triple = Box::new(std::array::from_fn(|a| {
            std::array::from_fn(|b| std::array::from_fn(|c| pair[a][b] * gamma[c]))
        }));
        GammaRep {
            gamma,
            eta: Matrix4::from_diagonal(&nalgebra::Vector4::from(ETA)),
            pair,
            triple,
        }
    }

    /// Shared instance; the representation is immutable.
    pub fn standard() -> &'static GammaRep {
        static REP: OnceLock<GammaRep> = OnceLock::new();
        REP.get_or_init(GammaRep::new)
    }

    /// `gamma^a`. Panics if `a > 3`.
    pub fn gamma(&self, a: usize) -> &CMat4 {
        &self.gamma[a]
    }

    pub fn eta(&self) -> &Matrix4<f64> {
        &self.eta
    }

    /// `gamma^a gamma^b`.
    pub fn pair(&self, a: usize, b: usize) -> &CMat4 {
        &self.pair[a][b]
    }

    /// `gamma^a gamma^b gamma^c`.
    pub fn triple(&self, a: usize, b: usize, c: usize) -> &CMat4 {
        &self.triple[a][b][c]
    }

    /// `S^{ab} = 1/4 [gamma^a, gamma^b]`.
    pub fn spin_generator(&self, a: usize, b: usize) -> Result<CMat4> {
        check_index(a)?;
        check_index(b)?;
        Ok((self.pair[a][b] - self.pair[b][a]) * c(0.25, 0.0))
    }

    /// Signed sum over the six orderings of `gamma^m gamma^n gamma^a`.
    ///
    /// Equals `6 gamma^m gamma^n gamma^a` for distinct indices and vanishes
    /// whenever two indices coincide.
    pub fn antisym_triple(&self, m: usize, n: usize, a: usize) -> Result<CMat4> {
        check_index(m)?;
        check_index(n)?;
        check_index(a)?;
        let t = |x: usize, y: usize, z: usize| self.triple[x][y][z];
        Ok(t(m, n, a) + t(n, a, m) + t(a, m, n) - t(n, m, a) - t(m, a, n) - t(a, n, m))
    }

    /// `Psi-bar = Psi^dagger gamma^0`, returned as the row entries.
    pub fn dirac_adjoint(&self, psi: &Spinor) -> nalgebra::RowVector4<Complex64> {
        psi.adjoint() * self.gamma[0]
    }

    /// `Psi-bar M Psi`.
    pub fn bilinear(&self, psi: &Spinor, m: &CMat4) -> Complex64 {
        (self.dirac_adjoint(psi) * m * psi)[(0, 0)]
    }
}

/// An ordered coordinate plane `(r, s)` with `r < s`.
///
/// Planes with `r = 0` generate boosts, the others spatial rotations.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Plane {
    r: usize,
    s: usize,
}

impl Plane {
    /// Factor order used by [`euler_decompose`]: listed from the rightmost
    /// factor of the product to the leftmost.
    pub const CANONICAL: [Plane; 6] = [
        Plane { r: 0, s: 3 },
        Plane { r: 0, s: 2 },
        Plane { r: 0, s: 1 },
        Plane { r: 1, s: 2 },
        Plane { r: 1, s: 3 },
        Plane { r: 2, s: 3 },
    ];

    pub fn new(r: usize, s: usize) -> Result<Self> {
        check_index(r)?;
        check_index(s)?;
        if r >= s {
            return Err(Error::PlaneOrder { r, s });
        }
        Ok(Plane { r, s })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn is_boost(&self) -> bool {
        self.r == 0
    }

    /// Vector-representation generator `G` with `exp(angle G)` the single-plane
    /// Lorentz matrix: `G^a_b = eta^{aa} (delta_{ar} delta_{bs} - delta_{as} delta_{br})`.
    pub fn generator(&self) -> Matrix4<f64> {
        let mut g = Matrix4::zeros();
        g[(self.r, self.s)] = ETA[self.r];
        g[(self.s, self.r)] = -ETA[self.s];
        g
    }

    /// Spinor generator `1/2 gamma^r gamma^s`.
    pub fn spinor_generator(&self, rep: &GammaRep) -> CMat4 {
        rep.pair(self.r, self.s) * c(0.5, 0.0)
    }
}

/// A proper orthochronous Lorentz matrix `L^a_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzMatrix(Matrix4<f64>);

fn lorentz_defect(m: &Matrix4<f64>) -> f64 {
    let eta = Matrix4::from_diagonal(&nalgebra::Vector4::from(ETA));
    (m.transpose() * eta * m - eta).amax()
}

impl LorentzMatrix {
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let scale = m.amax().max(1.0);
        let residual = lorentz_defect(&m);
        if !residual.is_finite() || residual > LORENTZ_TOL * scale * scale {
            return Err(Error::NotLorentz { residual });
        }
        let det = m.determinant();
        let l00 = m[(0, 0)];
        if det < 0.0 || l00 < 1.0 - LORENTZ_TOL * scale {
            return Err(Error::NotProperOrthochronous { det, l00 });
        }
        Ok(LorentzMatrix(m))
    }

    pub fn identity() -> Self {
        LorentzMatrix(Matrix4::identity())
    }

    /// `exp(angle G_{rs})` in closed form: cos/sin for rotations,
    /// cosh/sinh for boosts.
    pub fn single_plane(r: usize, s: usize, angle: f64) -> Result<Self> {
        let plane = Plane::new(r, s)?;
        if !angle.is_finite() {
            return Err(Error::Unphysical(format!("non-finite angle {angle}")));
        }
        Ok(Self::from_plane(plane, angle))
    }

    pub(crate) fn from_plane(plane: Plane, angle: f64) -> Self {
        let (r, s) = (plane.r, plane.s);
        let mut m = Matrix4::identity();
        if plane.is_boost() {
            let (ch, sh) = (angle.cosh(), angle.sinh());
            m[(r, r)] = ch;
            m[(s, s)] = ch;
            m[(r, s)] = -sh;
            m[(s, r)] = -sh;
        } else {
            let (cs, sn) = (angle.cos(), angle.sin());
            m[(r, r)] = cs;
            m[(s, s)] = cs;
            m[(r, s)] = sn;
            m[(s, r)] = -sn;
        }
        LorentzMatrix(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// `eta L^T eta`.
    pub fn inverse(&self) -> LorentzMatrix {
        let eta = Matrix4::from_diagonal(&nalgebra::Vector4::from(ETA));
        LorentzMatrix(eta * self.0.transpose() * eta)
    }

    /// Matrix product `self * rhs`; the group is closed so no revalidation.
    pub fn compose(&self, rhs: &LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix(self.0 * rhs.0)
    }

    pub fn defect(&self) -> f64 {
        lorentz_defect(&self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EulerFactor {
    pub plane: Plane,
    pub angle: f64,
}

/// Single-plane factors `L_1, ..., L_n`, stored so that the represented
/// matrix is `L_n ... L_2 L_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerFactorization {
    pub factors: Vec<EulerFactor>,
}

impl EulerFactorization {
    pub fn recompose(&self) -> LorentzMatrix {
        self.factors.iter().fold(LorentzMatrix::identity(), |acc, f| {
            LorentzMatrix::from_plane(f.plane, f.angle).compose(&acc)
        })
    }
}

/// Factor `lam` as `R23 R13 R12 Bx By Bz`.
///
/// The boost angles are read off the first row (a rotation does not touch it),
/// then the remaining spatial rotation is reduced Givens-style. Rotation angles
/// land in `(-pi, pi]`.
pub fn euler_decompose(lam: &LorentzMatrix) -> Result<EulerFactorization> {
    let m = LorentzMatrix::new(lam.0)?.0;

    let bx = (-m[(0, 1)]).asinh();
    let by = (-m[(0, 2)] / bx.cosh()).asinh();
    let bz = (-m[(0, 3)] / (bx.cosh() * by.cosh())).asinh();

    let boost_inv = LorentzMatrix::from_plane(Plane::CANONICAL[0], -bz).0
        * LorentzMatrix::from_plane(Plane::CANONICAL[1], -by).0
        * LorentzMatrix::from_plane(Plane::CANONICAL[2], -bx).0;
    let rot = m * boost_inv;

    let r23 = rot[(2, 3)].atan2(rot[(3, 3)]);
    let rest = LorentzMatrix::from_plane(Plane::CANONICAL[5], -r23).0 * rot;
    let r13 = rest[(1, 3)].atan2(rest[(3, 3)]);
    let r12 = (-rest[(2, 1)]).atan2(rest[(2, 2)]);

    let angles = [bz, by, bx, r12, r13, r23];
    Ok(EulerFactorization {
        factors: Plane::CANONICAL
            .iter()
            .zip(angles)
            .map(|(&plane, angle)| EulerFactor { plane, angle })
            .collect(),
    })
}

/// A spinor-space image `L_half` of a Lorentz matrix, with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinHalfTransform {
    pub half: CMat4,
    pub inverse: CMat4,
}

impl SpinHalfTransform {
    pub fn identity() -> Self {
        SpinHalfTransform {
            half: CMat4::identity(),
            inverse: CMat4::identity(),
        }
    }

    /// `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &SpinHalfTransform) -> SpinHalfTransform {
        SpinHalfTransform {
            half: self.half * rhs.half,
            inverse: rhs.inverse * self.inverse,
        }
    }

    /// `max_a |L_half^{-1} gamma^a L_half - L^a_b gamma^b|`.
    pub fn intertwining_defect(&self, rep: &GammaRep, lam: &LorentzMatrix) -> f64 {
        (0..4)
            .map(|a| {
                let lhs = self.inverse * rep.gamma(a) * self.half;
                let rhs = (0..4).fold(CMat4::zeros(), |acc, b| acc + rep.gamma(b) * c(lam.0[(a, b)], 0.0));
                (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `|L_half^dagger gamma^0 - gamma^0 L_half^{-1}|`.
    pub fn conjugation_defect(&self, rep: &GammaRep) -> f64 {
        let d = self.half.adjoint() * rep.gamma(0) - rep.gamma(0) * self.inverse;
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn plane_exp(rep: &GammaRep, plane: Plane, angle: f64) -> CMat4 {
    let (a, b) = if plane.is_boost() {
        ((angle / 2.0).cosh(), (angle / 2.0).sinh())
    } else {
        ((angle / 2.0).cos(), (angle / 2.0).sin())
    };
    CMat4::identity() * c(a, 0.0) + rep.pair(plane.r, plane.s) * c(b, 0.0)
}

pub(crate) fn plane_lift(rep: &GammaRep, plane: Plane, angle: f64) -> SpinHalfTransform {
    SpinHalfTransform {
        half: plane_exp(rep, plane, angle),
        inverse: plane_exp(rep, plane, -angle),
    }
}

/// `exp(angle/2 gamma^r gamma^s)` in closed form.
pub fn single_plane_spinor_lift(rep: &GammaRep, r: usize, s: usize, angle: f64) -> Result<SpinHalfTransform> {
    let plane = Plane::new(r, s)?;
    Ok(plane_lift(rep, plane, angle))
}

/// Lift via the Euler factorization; the overall sign is whatever the
/// factorization produces.
pub fn spinor_lift(rep: &GammaRep, lam: &LorentzMatrix) -> Result<SpinHalfTransform> {
    let factors = euler_decompose(lam)?;
    Ok(lift_factors(rep, &factors))
}

pub fn lift_factors(rep: &GammaRep, factors: &EulerFactorization) -> SpinHalfTransform {
    factors.factors.iter().fold(SpinHalfTransform::identity(), |acc, f| {
        plane_lift(rep, f.plane, f.angle).compose(&acc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_abs(m: &CMat4) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn naive_product(a: &CMat4, b: &CMat4) -> CMat4 {
        let mut out = CMat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    out[(i, j)] += a[(i, k)] * b[(k, j)];
                }
            }
        }
        out
    }

    fn expm_series(g: &Matrix4<f64>, angle: f64) -> Matrix4<f64> {
        let mut term = Matrix4::identity();
        let mut sum = Matrix4::identity();
        for n in 1..60 {
            term = term * g * (angle / n as f64);
            sum += term;
        }
        sum
    }

    fn cexpm_series(g: &CMat4, scale: f64) -> CMat4 {
        let mut term = CMat4::identity();
        let mut sum = CMat4::identity();
        for n in 1..60 {
            term = term * g * c(scale / n as f64, 0.0);
            sum += term;
        }
        sum
    }

    #[test]
    fn gamma0_squares_to_minus_identity() {
        let rep = GammaRep::new();
        assert_eq!(rep.pair(0, 0), &(-CMat4::identity()));
        assert_eq!(rep.pair(1, 2) + rep.pair(2, 1), CMat4::zeros());
    }

    #[test]
    fn gamma12_is_i_sigma3_blocks() {
        let rep = GammaRep::new();
        let prod = naive_product(rep.gamma(1), rep.gamma(2));
        let i = c(0.0, 1.0);
        let expected = CMat4::from_diagonal(&nalgebra::Vector4::new(i, -i, i, -i));
        assert_eq!(prod, expected);
    }

    #[test]
    fn clifford_relation_exact() {
        let rep = GammaRep::new();
        for a in 0..4 {
            for b in 0..4 {
                let anti = rep.pair(a, b) + rep.pair(b, a);
                let expected = if a == b {
                    CMat4::identity() * c(2.0 * ETA[a], 0.0)
                } else {
                    CMat4::zeros()
                };
                assert_eq!(anti, expected, "a={a} b={b}");
            }
            let dag = rep.gamma(a).adjoint();
            let sign = if a == 0 { -1.0 } else { 1.0 };
            assert_eq!(dag, rep.gamma(a) * c(sign, 0.0));
            assert_eq!(dag * rep.gamma(0), -(rep.gamma(0) * rep.gamma(a)));
        }
    }

    #[test]
    fn spin_generator_examples() {
        let rep = GammaRep::new();
        assert_eq!(rep.spin_generator(1, 1).unwrap(), CMat4::zeros());
        let i = c(0.0, 1.0);
        let half_i_sigma3 = CMat4::from_diagonal(&nalgebra::Vector4::new(i, -i, i, -i)) * c(0.5, 0.0);
        assert_eq!(rep.spin_generator(1, 2).unwrap(), half_i_sigma3);
        let s01 = rep.spin_generator(0, 1).unwrap();
        assert_eq!(s01, rep.pair(0, 1) * c(0.5, 0.0));
        assert_eq!(s01, -rep.spin_generator(1, 0).unwrap());
        assert_eq!(rep.spin_generator(4, 0), Err(Error::IndexOutOfRange(4)));
    }

    #[test]
    fn antisym_triple_examples() {
        let rep = GammaRep::new();
        assert_eq!(rep.antisym_triple(1, 1, 2).unwrap(), CMat4::zeros());
        // Six-permutation oracle written out term by term.
        for (m, n, a) in [(1, 2, 3), (0, 1, 2)] {
            let g = |k: usize| rep.gamma(k);
            let perms = [
                (g(m) * g(n) * g(a), 1.0),
                (g(n) * g(a) * g(m), 1.0),
                (g(a) * g(m) * g(n), 1.0),
                (g(n) * g(m) * g(a), -1.0),
                (g(m) * g(a) * g(n), -1.0),
                (g(a) * g(n) * g(m), -1.0),
            ];
            let oracle = perms.iter().fold(CMat4::zeros(), |acc, (p, s)| acc + p * c(*s, 0.0));
            assert_eq!(rep.antisym_triple(m, n, a).unwrap(), oracle);
            assert_eq!(oracle, rep.triple(m, n, a) * c(6.0, 0.0));
        }
    }

    #[test]
    fn single_plane_lorentz_matches_series() {
        assert_eq!(
            LorentzMatrix::single_plane(1, 2, 0.0).unwrap(),
            LorentzMatrix::identity()
        );
        let rot = LorentzMatrix::single_plane(1, 2, PI / 2.0).unwrap();
        let series = expm_series(&Plane::new(1, 2).unwrap().generator(), PI / 2.0);
        assert!((rot.matrix() - series).amax() < 1e-14);
        assert!((rot.matrix()[(1, 2)] - 1.0).abs() < 1e-15);
        assert!((rot.matrix()[(2, 1)] + 1.0).abs() < 1e-15);
        assert!(rot.matrix()[(1, 1)].abs() < 1e-15);

        let chi = 0.83;
        let boost = LorentzMatrix::single_plane(0, 1, chi).unwrap();
        let series = expm_series(&Plane::new(0, 1).unwrap().generator(), chi);
        assert!((boost.matrix() - series).amax() < 1e-14);
        assert!((boost.matrix()[(0, 0)] - chi.cosh()).abs() < 1e-15);
        assert!(boost.defect() < 1e-14);

        assert_eq!(
            LorentzMatrix::single_plane(2, 1, 0.1),
            Err(Error::PlaneOrder { r: 2, s: 1 })
        );
    }

    #[test]
    fn single_plane_lift_examples() {
        let rep = GammaRep::new();
        let id = single_plane_spinor_lift(&rep, 1, 2, 0.0).unwrap();
        assert_eq!(id.half, CMat4::identity());

        let full = single_plane_spinor_lift(&rep, 1, 2, 2.0 * PI).unwrap();
        assert!(max_abs(&(full.half + CMat4::identity())) < 1e-15);
        let vec_full = LorentzMatrix::single_plane(1, 2, 2.0 * PI).unwrap();
        assert!((vec_full.matrix() - Matrix4::identity()).amax() < 1e-15);

        let b01 = rep.pair(0, 1);
        assert_eq!(b01 * b01, CMat4::identity());
        let chi = 0.6;
        let lift = single_plane_spinor_lift(&rep, 0, 1, chi).unwrap();
        let series = cexpm_series(&(b01 * c(0.5, 0.0)), chi);
        assert!(max_abs(&(lift.half - series)) < 1e-14);
        let closed = CMat4::identity() * c((chi / 2.0).cosh(), 0.0) + b01 * c((chi / 2.0).sinh(), 0.0);
        assert!(max_abs(&(lift.half - closed)) < 1e-15);
        assert!(max_abs(&(lift.half * lift.inverse - CMat4::identity())) < 1e-14);
    }

    #[test]
    fn each_plane_lift_intertwines() {
        let rep = GammaRep::new();
        for plane in Plane::CANONICAL {
            for angle in [-1.3, 0.4, 2.9] {
                let lam = LorentzMatrix::from_plane(plane, angle);
                let lift = plane_lift(&rep, plane, angle);
                assert!(lift.intertwining_defect(&rep, &lam) < 1e-13, "{plane:?}");
                assert!(lift.conjugation_defect(&rep) < 1e-13, "{plane:?}");
            }
        }
    }

    #[test]
    fn euler_identity_and_single_factor() {
        let f = euler_decompose(&LorentzMatrix::identity()).unwrap();
        assert!(f.factors.iter().all(|x| x.angle == 0.0));
        assert_eq!(f.factors.len(), 6);

        let lam = LorentzMatrix::single_plane(1, 2, 0.7).unwrap();
        let f = euler_decompose(&lam).unwrap();
        for factor in &f.factors {
            if factor.plane == Plane::new(1, 2).unwrap() {
                assert!((factor.angle - 0.7).abs() < 1e-15);
            } else {
                assert!(factor.angle.abs() < 1e-15, "{factor:?}");
            }
        }
    }

    #[test]
    fn euler_rejects_improper_and_non_lorentz() {
        let mut parity = Matrix4::identity();
        parity[(1, 1)] = -1.0;
        assert!(matches!(
            LorentzMatrix::new(parity),
            Err(Error::NotProperOrthochronous { .. })
        ));
        let mut time_rev = Matrix4::identity();
        time_rev[(0, 0)] = -1.0;
        time_rev[(1, 1)] = -1.0;
        assert!(matches!(
            LorentzMatrix::new(time_rev),
            Err(Error::NotProperOrthochronous { .. })
        ));
        let mut skew = Matrix4::identity();
        skew[(1, 2)] = 0.1;
        assert!(matches!(LorentzMatrix::new(skew), Err(Error::NotLorentz { .. })));
    }

    #[test]
    fn spinor_lift_of_single_rotation() {
        let rep = GammaRep::new();
        let phi = 1.1;
        let lam = LorentzMatrix::single_plane(1, 2, phi).unwrap();
        let lift = spinor_lift(&rep, &lam).unwrap();
        let expected = CMat4::identity() * c((phi / 2.0).cos(), 0.0) + rep.pair(1, 2) * c((phi / 2.0).sin(), 0.0);
        assert!(max_abs(&(lift.half - expected)) < 1e-14);
        assert_eq!(
            spinor_lift(&rep, &LorentzMatrix::identity()).unwrap().half,
            CMat4::identity()
        );
    }
}
