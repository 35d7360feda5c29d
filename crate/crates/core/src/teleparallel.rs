//! Stress-energy 3-forms from the coframe variation of the Lagrangean, the
//! tensor they define, and its flat-space closed form.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::catalog::FlatCoframe;
use crate::clifford::{GammaRep, ETA};
use crate::dirac::{DiracParameters, DiracPoint};
use crate::error::{Error, Result};
use crate::fields::{PotentialField, SpinorField};
use crate::forms::{levi_civita, IndexedForm};
use crate::geometry::{CoframeField, SpacetimePoint};

/// Imaginary parts of tensor entries above this (relative to the largest
/// real entry, floored at 1) are reported as errors.
pub const TENSOR_REALITY_TOL: f64 = 1e-9;

/// Dirac residual above which the flat closed form refuses to evaluate.
pub const ON_SHELL_TOL: f64 = 1e-6;

/// `T^m` split into real and imaginary parts of its orthonormal components.
#[derive(Clone, Debug, PartialEq)]
pub struct StressEnergyForms {
    pub real: [IndexedForm; 4],
    pub imag: [IndexedForm; 4],
}

/// `T^{mn}` with `components[(m, n)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StressEnergyTensor {
    pub components: Matrix4<f64>,
    /// Largest imaginary part discarded when the tensor was formed.
    pub imaginary_defect: f64,
}

impl StressEnergyTensor {
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.components[(m, n)]
    }
}

fn zero3() -> IndexedForm {
    IndexedForm::zero(3).expect("degree 3")
}

/// Coefficients `X^{mn}` of `*theta_n` in `T^m`.
fn star_theta_coefficients(point: &DiracPoint, params: &DiracParameters) -> [[Complex64; 4]; 4] {
    let rep = GammaRep::standard();
    let i = Complex64::i();
    let psi = &point.psi;
    let bar = rep.dirac_adjoint(psi);
    let f = &point.field_strength;
    let f2 = point.field_invariant();
    let vector: [Complex64; 4] = std::array::from_fn(|a| rep.bilinear(psi, rep.gamma(a)));
    let a_dot_b: Complex64 = (0..4).map(|a| vector[a] * point.potential[a]).sum();
    let slash_d: Complex64 = (0..4).map(|a| (bar * rep.gamma(a) * point.dpsi[a])[0]).sum();
    let scalar = (bar * psi)[0];

    let mut x = [[Complex64::new(0.0, 0.0); 4]; 4];
    for m in 0..4 {
        for n in 0..4 {
            let eta_mn = if m == n { ETA[m] } else { 0.0 };
            let maxwell: f64 = (0..4)
                .map(|a| ETA[m] * ETA[n] * ETA[a] * f[m][a] * f[n][a])
                .sum::<f64>()
                - 0.25 * eta_mn * f2;
            let interaction = -params.charge * (a_dot_b * eta_mn - vector[n] * (ETA[m] * point.potential[m]));
            let kinetic = i * eta_mn * slash_d - i * (bar * rep.gamma(n) * point.dpsi[m])[0] * ETA[m];
            let twist: Complex64 = (0..4)
                .map(|fi| {
                    let g = rep.triple(fi, m, n) - rep.triple(n, m, fi);
                    (bar * g * point.dpsi[fi])[0]
                })
                .sum::<Complex64>()
                * (i * 0.25);
            let mass = i * params.mass * eta_mn * scalar;
            x[m][n] =
                Complex64::from(maxwell) + interaction + Complex64::from(kinetic.re) + Complex64::from(twist.re) + mass;
        }
    }
    x
}

/// `d*(theta_b ^ theta_c)` for every pair, from the orthonormal-basis
/// derivatives `d theta^a`.
fn d_star_pairs(dtheta: &[IndexedForm; 4]) -> Result<Vec<Vec<IndexedForm>>> {
    let mut out = vec![vec![zero3(); 4]; 4];
    for b in 0..4 {
        for c in (b + 1)..4 {
            let pair = IndexedForm::lowered_basis(b).wedge(&IndexedForm::lowered_basis(c))?;
            let d = pair.hodge_dual()?.d_constant(dtheta)?;
            out[c][b] = d.scaled(-1.0);
            out[b][c] = d;
        }
    }
    Ok(out)
}

pub fn stress_energy_forms(
    psi: &dyn SpinorField,
    pot: &dyn PotentialField,
    cf: &dyn CoframeField,
    params: &DiracParameters,
    x: &SpacetimePoint,
) -> Result<StressEnergyForms> {
    let point = DiracPoint::at(psi, cf, pot, x)?;
    forms_from_point(&point, params)
}

fn forms_from_point(point: &DiracPoint, params: &DiracParameters) -> Result<StressEnergyForms> {
    let rep = GammaRep::standard();
    let psi = &point.psi;
    let coeff = star_theta_coefficients(point, params);
    let star_theta: Vec<IndexedForm> = (0..4)
        .map(|n| IndexedForm::lowered_basis(n).hodge_dual())
        .collect::<Result<_>>()?;
    let dtheta_upper = point.geometry.exterior_derivative_forms();
    let dtheta_lower: Vec<IndexedForm> = (0..4).map(|a| dtheta_upper[a].scaled(ETA[a])).collect();
    let geometric = dtheta_upper.iter().any(|f| f.max_abs() != 0.0);
    let d_star = if geometric {
        Some(d_star_pairs(&dtheta_upper)?)
    } else {
        None
    };
    // (i/8) Psibar gamma^x gamma^y gamma^z Psi
    let triple = |x: usize, y: usize, z: usize| rep.bilinear(psi, rep.triple(x, y, z)) * Complex64::new(0.0, 0.125);

    let mut real: [IndexedForm; 4] = std::array::from_fn(|_| zero3());
    let mut imag: [IndexedForm; 4] = std::array::from_fn(|_| zero3());
    for m in 0..4 {
        for n in 0..4 {
            real[m].add_scaled(&star_theta[n], coeff[m][n].re);
            imag[m].add_scaled(&star_theta[n], coeff[m][n].im);
        }
        let Some(d_star) = &d_star else { continue };
        for b in 0..4 {
            for c in 0..4 {
                if b == c {
                    continue;
                }
                let w = triple(c, m, b);
                real[m].add_scaled(&d_star[b][c], w.re);
                imag[m].add_scaled(&d_star[b][c], w.im);

                // dtheta_a ^ epsilon_{bcme} eta^{mm} theta^e
                let tail = IndexedForm::from_fn(1, |e| ETA[m] * levi_civita(&[b, c, m, e[0]]))?;
                if tail.max_abs() == 0.0 {
                    continue;
                }
                let mut head_re = IndexedForm::zero(2)?;
                let mut head_im = IndexedForm::zero(2)?;
                for (a, d) in dtheta_lower.iter().enumerate() {
                    let w = triple(c, a, b);
                    head_re.add_scaled(d, w.re);
                    head_im.add_scaled(d, w.im);
                }
                real[m].add_scaled(&head_re.wedge(&tail)?, 1.0);
                imag[m].add_scaled(&head_im.wedge(&tail)?, 1.0);
            }
        }
    }
    Ok(StressEnergyForms { real, imag })
}

/// `T^{mn} = -*(theta^n ^ T^m)`.
pub fn stress_energy_tensor(forms: &StressEnergyForms) -> Result<StressEnergyTensor> {
    let contract = |form: &IndexedForm, n: usize| -> Result<f64> {
        let top = IndexedForm::basis(n).wedge(form)?;
        Ok(-top.hodge_dual()?.get(&[]))
    };
    let mut components = Matrix4::zeros();
    let mut imaginary_defect: f64 = 0.0;
    for m in 0..4 {
        for n in 0..4 {
            components[(m, n)] = contract(&forms.real[m], n)?;
            imaginary_defect = imaginary_defect.max(contract(&forms.imag[m], n)?.abs());
        }
    }
    let scale = components.amax().max(1.0);
    if imaginary_defect > TENSOR_REALITY_TOL * scale {
        return Err(Error::NonRealBilinear(imaginary_defect));
    }
    Ok(StressEnergyTensor {
        components,
        imaginary_defect,
    })
}

/// The general tensor evaluated at one point.
pub fn general_stress_energy(
    psi: &dyn SpinorField,
    pot: &dyn PotentialField,
    cf: &dyn CoframeField,
    params: &DiracParameters,
    x: &SpacetimePoint,
) -> Result<StressEnergyTensor> {
    stress_energy_tensor(&stress_energy_forms(psi, pot, cf, params, x)?)
}

/// Closed form on the flat coframe, valid for solutions of the Dirac
/// equation:
///
/// `T^{mn} = F^{ma} F^n_a - 1/4 eta^{mn} F^2 - 1/2 (j^m A^n + j^n A^m)
///   + Re(-i/2 Psibar (gamma^m d^n + gamma^n d^m) Psi)
///   + Re(Psibar (e/12 [gamma^m, gamma^n, gamma^a] A_a - i m/4 [gamma^m, gamma^n]) Psi)`.
pub fn flat_stress_energy(
    psi: &dyn SpinorField,
    pot: &dyn PotentialField,
    params: &DiracParameters,
    x: &SpacetimePoint,
) -> Result<StressEnergyTensor> {
    let point = DiracPoint::at(psi, &FlatCoframe, pot, x)?;
    let residual = point.residual(params).norm();
    if !(residual <= ON_SHELL_TOL) {
        return Err(Error::OffShell(residual));
    }
    let rep = GammaRep::standard();
    let i = Complex64::i();
    let bar = rep.dirac_adjoint(&point.psi);
    let f = &point.field_strength;
    let f2 = point.field_invariant();
    let a_low = point.potential;
    let a_up: [f64; 4] = std::array::from_fn(|a| ETA[a] * a_low[a]);
    let j: [f64; 4] = std::array::from_fn(|a| -params.charge * rep.bilinear(&point.psi, rep.gamma(a)).re);
    let mut components = Matrix4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            let eta_mn = if m == n { ETA[m] } else { 0.0 };
            let maxwell: f64 = (0..4)
                .map(|a| ETA[m] * ETA[n] * ETA[a] * f[m][a] * f[n][a])
                .sum::<f64>()
                - 0.25 * eta_mn * f2;
            let interaction = -0.5 * (j[m] * a_up[n] + j[n] * a_up[m]);
            let kinetic = (bar
                * (rep.gamma(m) * point.dpsi[n] * Complex64::from(ETA[n])
                    + rep.gamma(n) * point.dpsi[m] * Complex64::from(ETA[m])))[0]
                * (-0.5 * i);
            let mut remainder = rep.spin_generator(m, n)? * Complex64::new(0.0, -params.mass);
            for (a, &al) in a_low.iter().enumerate() {
                remainder += rep.antisym_triple(m, n, a)? * Complex64::from(params.charge / 12.0 * al);
            }
            let rem = rep.bilinear(&point.psi, &remainder);
            components[(m, n)] = maxwell + interaction + kinetic.re + rem.re;
        }
    }
    Ok(StressEnergyTensor {
        components,
        imaginary_defect: 0.0,
    })
}

/// `1/2 (T^{mn} - T^{nm})`.
pub fn antisymmetric_part(t: &StressEnergyTensor) -> Matrix4<f64> {
    (t.components - t.components.transpose()) * 0.5
}
