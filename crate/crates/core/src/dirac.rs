//! Dirac operator on a coframe background, its current and Lagrangean, and
//! the local Lorentz transformation of a (coframe, spinor) pair.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{CMat4, GammaRep, Spinor};
use crate::error::{Error, Result};
use crate::fields::{LocalLorentzField, PotentialField, SpinorField};
use crate::forms::IndexedForm;
use crate::geometry::{CoframeField, CoframeGradient, LocalGeometry, SpacetimePoint, SpinConnection};

/// Imaginary parts of `Psibar gamma^a Psi` above this (relative to `|Psi|^2`)
/// are reported as errors.
pub const BILINEAR_REALITY_TOL: f64 = 1e-10;

/// Step of the central difference used for `v_a(j^a)`.
pub const DEFAULT_DIVERGENCE_STEP: f64 = 1e-5;

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracParameters {
    pub mass: f64,
    pub charge: f64,
}

impl DiracParameters {
    pub fn new(mass: f64, charge: f64) -> Self {
        DiracParameters { mass, charge }
    }
}

/// Everything the Dirac operator needs at one point, expressed on the
/// orthonormal frame.
#[derive(Clone, Debug)]
pub struct DiracPoint {
    pub geometry: LocalGeometry,
    pub psi: Spinor,
    /// `dPsi(v_a)`.
    pub dpsi: [Spinor; 4],
    /// `A(v_a)`.
    pub potential: [f64; 4],
    /// `dA(v_a, v_b)`.
    pub field_strength: [[f64; 4]; 4],
}

impl DiracPoint {
    pub fn at(
        psi: &dyn SpinorField,
        cf: &dyn CoframeField,
        pot: &dyn PotentialField,
        x: &SpacetimePoint,
    ) -> Result<Self> {
        let geometry = LocalGeometry::at(cf, x)?;
        let v = &geometry.frame.0;
        let d = psi.d_psi(x);
        let dpsi =
            std::array::from_fn(|a| (0..4).fold(Spinor::zeros(), |acc, mu| acc + d[mu] * Complex64::from(v[(a, mu)])));
        let a_coord = pot.a(x);
        let potential = std::array::from_fn(|a| (0..4).map(|mu| a_coord[mu] * v[(a, mu)]).sum());
        let da = pot.da(x);
        let mut field_strength = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in (a + 1)..4 {
                let mut sum = 0.0;
                for mu in 0..4 {
                    for nu in 0..4 {
                        sum += (da[mu][nu] - da[nu][mu]) * v[(a, mu)] * v[(b, nu)];
                    }
                }
                field_strength[a][b] = sum;
                field_strength[b][a] = -sum;
            }
        }
        Ok(DiracPoint {
            psi: psi.psi(x),
            geometry,
            dpsi,
            potential,
            field_strength,
        })
    }

    /// `-1/4 gamma^a gamma^b gamma^c omega_{bc}(v_a)`.
    fn connection_term(&self, rep: &GammaRep, omega: &SpinConnection) -> CMat4 {
        let mut m = CMat4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let w = omega.get(a, b, c);
                    if w != 0.0 {
                        m += rep.triple(a, b, c) * Complex64::from(w);
                    }
                }
            }
        }
        m * Complex64::from(-0.25)
    }

    /// `-1/2 gamma^a S^{bc} omega_{bc}(v_a)`.
    fn generator_connection_term(&self, rep: &GammaRep, omega: &SpinConnection) -> CMat4 {
        let mut m = CMat4::zeros();
        for a in 0..4 {
            let mut inner = CMat4::zeros();
            for b in 0..4 {
                for c in 0..4 {
                    let w = omega.get(a, b, c);
                    if w != 0.0 {
                        inner += rep.spin_generator(b, c).expect("in range") * Complex64::from(w);
                    }
                }
            }
            m += rep.gamma(a) * inner;
        }
        m * Complex64::from(-0.5)
    }

    fn flat_part(&self, rep: &GammaRep, params: &DiracParameters) -> Spinor {
        let i = Complex64::i();
        let mut out = self.psi * Complex64::from(params.mass);
        for a in 0..4 {
            let gauge = self.psi * (i * params.charge * self.potential[a]);
            out += rep.gamma(a) * (self.dpsi[a] + gauge);
        }
        out
    }

    /// `(gamma^a v_a + i e gamma^a A(v_a) - 1/4 gamma^a gamma^b gamma^c omega_{bc}(v_a) + m) Psi`.
    pub fn residual(&self, params: &DiracParameters) -> Spinor {
        let rep = GammaRep::standard();
        let omega = self.geometry.spin_connection();
        self.flat_part(rep, params) + self.connection_term(rep, &omega) * self.psi
    }

    /// Same operator with the connection from Christoffel symbols acting
    /// through the spin generators.
    pub fn residual_alt(&self, params: &DiracParameters) -> Spinor {
        let rep = GammaRep::standard();
        let omega = self.geometry.spin_connection_via_christoffel();
        self.flat_part(rep, params) + self.generator_connection_term(rep, &omega) * self.psi
    }

    /// `F^{ab} F_{ab}` on the orthonormal frame.
    pub fn field_invariant(&self) -> f64 {
        let mut sum = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                sum += ETA2[a][b] * self.field_strength[a][b].powi(2);
            }
        }
        sum
    }

    /// `-1/2 dA ^ *dA` as a multiple of `*1`.
    pub fn maxwell_density(&self) -> f64 {
        let f = IndexedForm::from_fn(2, |idx| self.field_strength[idx[0]][idx[1]]).expect("degree 2");
        let dual = f.hodge_dual().expect("degree 2");
        -0.5 * f.wedge(&dual).expect("degree 4").top_coefficient()
    }
}

const ETA2: [[f64; 4]; 4] = {
    let mut out = [[1.0; 4]; 4];
    let mut k = 1;
    while k < 4 {
        out[0][k] = -1.0;
        out[k][0] = -1.0;
        k += 1;
    }
    out
};

pub fn dirac_residual(
    psi: &dyn SpinorField,
    cf: &dyn CoframeField,
    pot: &dyn PotentialField,
    params: &DiracParameters,
    x: &SpacetimePoint,
) -> Result<Spinor> {
    Ok(DiracPoint::at(psi, cf, pot, x)?.residual(params))
}

pub fn dirac_residual_alt(
    psi: &dyn SpinorField,
    cf: &dyn CoframeField,
    pot: &dyn PotentialField,
    params: &DiracParameters,
    x: &SpacetimePoint,
) -> Result<Spinor> {
    Ok(DiracPoint::at(psi, cf, pot, x)?.residual_alt(params))
}

/// Lagrangean density as multiples of `*1`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct LagrangeanDensity {
    /// `-1/2 dA ^ *dA`.
    pub maxwell: f64,
    /// `i Psibar (Dirac operator) Psi`.
    pub dirac: Complex64,
}

impl LagrangeanDensity {
    pub fn total(&self) -> Complex64 {
        self.dirac + self.maxwell
    }

    /// The variant with only the real part of the Dirac term.
    pub fn real_variant(&self) -> f64 {
        self.maxwell + self.dirac.re
    }
}

pub fn lagrangean_density(
    psi: &dyn SpinorField,
    pot: &dyn PotentialField,
    cf: &dyn CoframeField,
    params: &DiracParameters,
    x: &SpacetimePoint,
) -> Result<LagrangeanDensity> {
    let point = DiracPoint::at(psi, cf, pot, x)?;
    let rep = GammaRep::standard();
    let dirac = Complex64::i() * (rep.dirac_adjoint(&point.psi) * point.residual(params))[0];
    Ok(LagrangeanDensity {
        maxwell: point.maxwell_density(),
        dirac,
    })
}

/// `Psibar gamma^a Psi`, checked to be real.
pub fn vector_bilinear(psi: &Spinor) -> Result<[f64; 4]> {
    let rep = GammaRep::standard();
    let scale = psi.norm_squared().max(1.0);
    let mut out = [0.0; 4];
    for (a, slot) in out.iter_mut().enumerate() {
        let z = rep.bilinear(psi, rep.gamma(a));
        if z.im.abs() > BILINEAR_REALITY_TOL * scale {
            return Err(Error::NonRealBilinear(z.im));
        }
        *slot = z.re;
    }
    Ok(out)
}

/// `j = j^a *theta_a` with `j^a = -e Psibar gamma^a Psi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Current {
    pub vector: [f64; 4],
    pub form: IndexedForm,
}

impl Current {
    /// `j^mu = j^a v_a^mu`.
    pub fn coordinate(&self, frame: &Matrix4<f64>) -> [f64; 4] {
        std::array::from_fn(|mu| (0..4).map(|a| self.vector[a] * frame[(a, mu)]).sum())
    }
}

fn frame_current(psi: &Spinor, charge: f64) -> Result<[f64; 4]> {
    Ok(vector_bilinear(psi)?.map(|b| -charge * b))
}

pub fn current(psi: &dyn SpinorField, cf: &dyn CoframeField, charge: f64, x: &SpacetimePoint) -> Result<Current> {
    if !cf.contains(x) {
        return Err(Error::OutsideDomain(x.coords));
    }
    let vector = frame_current(&psi.psi(x), charge)?;
    let mut form = IndexedForm::zero(3)?;
    for (a, j) in vector.iter().enumerate() {
        form.add_scaled(&IndexedForm::lowered_basis(a).hodge_dual()?, *j);
    }
    Ok(Current { vector, form })
}

/// Coordinate components `j^mu` of the current vector.
pub fn coordinate_current(
    psi: &dyn SpinorField,
    cf: &dyn CoframeField,
    charge: f64,
    x: &SpacetimePoint,
) -> Result<[f64; 4]> {
    let geo = LocalGeometry::at(cf, x)?;
    Ok(current(psi, cf, charge, x)?.coordinate(&geo.frame.0))
}

/// `*dj = -v_a(j^a) + j^a (*d*theta_a)`, with `v_a(j^a)` from central
/// differences of `j^a` at coordinate step `step`.
pub fn current_divergence(
    psi: &dyn SpinorField,
    cf: &dyn CoframeField,
    charge: f64,
    x: &SpacetimePoint,
    step: f64,
) -> Result<f64> {
    let geo = LocalGeometry::at(cf, x)?;
    let j = frame_current(&psi.psi(x), charge)?;
    let mut dj = [[0.0; 4]; 4];
    for (mu, row) in dj.iter_mut().enumerate() {
        let plus = x.shifted(mu, step);
        let minus = x.shifted(mu, -step);
        if !cf.contains(&plus) || !cf.contains(&minus) {
            return Err(Error::OutsideDomain(plus.coords));
        }
        let jp = frame_current(&psi.psi(&plus), charge)?;
        let jm = frame_current(&psi.psi(&minus), charge)?;
        for a in 0..4 {
            row[a] = (jp[a] - jm[a]) / (2.0 * step);
        }
    }
    let v = &geo.frame.0;
    let mut out = 0.0;
    for a in 0..4 {
        let along: f64 = (0..4).map(|mu| v[(a, mu)] * dj[mu][a]).sum();
        out += -along + j[a] * geo.star_d_star_theta(a);
    }
    Ok(out)
}

/// `theta_2 = Lambda(x) theta_1`.
#[derive(Clone)]
pub struct RotatedCoframe<C> {
    inner: C,
    field: LocalLorentzField,
}

impl<C: CoframeField> CoframeField for RotatedCoframe<C> {
    fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64> {
        self.field.jet(x).lorentz * self.inner.theta(x)
    }

    fn d_theta(&self, x: &SpacetimePoint) -> CoframeGradient {
        let jet = self.field.jet(x);
        let theta = self.inner.theta(x);
        let d = self.inner.d_theta(x);
        std::array::from_fn(|nu| jet.d_lorentz[nu] * theta + jet.lorentz * d[nu])
    }

    fn contains(&self, x: &SpacetimePoint) -> bool {
        self.inner.contains(x)
    }
}

/// `Psi_2 = Lambda_half(x) Psi_1`.
#[derive(Clone)]
pub struct RotatedSpinor<S> {
    inner: S,
    field: LocalLorentzField,
}

impl<S: SpinorField> SpinorField for RotatedSpinor<S> {
    fn psi(&self, x: &SpacetimePoint) -> Spinor {
        self.field.jet(x).lift.half * self.inner.psi(x)
    }

    fn d_psi(&self, x: &SpacetimePoint) -> [Spinor; 4] {
        let jet = self.field.jet(x);
        let psi = self.inner.psi(x);
        let d = self.inner.d_psi(x);
        std::array::from_fn(|mu| jet.d_lift[mu] * psi + jet.lift.half * d[mu])
    }
}

/// Apply a position-dependent Lorentz transformation to a coframe and the
/// matching spin-1/2 transformation to a spinor field. The field is checked
/// at every point of `domain` first.
pub fn rotate_coframe_and_spinor<C: CoframeField, S: SpinorField>(
    cf: C,
    psi: S,
    field: LocalLorentzField,
    domain: &[SpacetimePoint],
) -> Result<(RotatedCoframe<C>, RotatedSpinor<S>)> {
    for x in domain {
        field.validate_at(x)?;
    }
    Ok((
        RotatedCoframe {
            inner: cf,
            field: field.clone(),
        },
        RotatedSpinor { inner: psi, field },
    ))
}
