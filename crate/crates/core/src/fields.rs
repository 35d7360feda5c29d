//! Spinor, potential and local-Lorentz fields with first derivatives.

use std::sync::Arc;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::{plane_lift, CMat4, GammaRep, LorentzMatrix, Plane, SpinHalfTransform, Spinor, ETA};
use crate::error::{Error, Result};
use crate::geometry::SpacetimePoint;

/// `x -> Psi(x)` with coordinate derivatives `d_mu Psi`.
pub trait SpinorField: Send + Sync {
    fn psi(&self, x: &SpacetimePoint) -> Spinor;

    fn d_psi(&self, x: &SpacetimePoint) -> [Spinor; 4];
}

impl<T: SpinorField + ?Sized> SpinorField for &T {
    fn psi(&self, x: &SpacetimePoint) -> Spinor {
        (**self).psi(x)
    }
    fn d_psi(&self, x: &SpacetimePoint) -> [Spinor; 4] {
        (**self).d_psi(x)
    }
}

impl<T: SpinorField + ?Sized> SpinorField for Box<T> {
    fn psi(&self, x: &SpacetimePoint) -> Spinor {
        (**self).psi(x)
    }
    fn d_psi(&self, x: &SpacetimePoint) -> [Spinor; 4] {
        (**self).d_psi(x)
    }
}

impl<T: SpinorField + ?Sized> SpinorField for Arc<T> {
    fn psi(&self, x: &SpacetimePoint) -> Spinor {
        (**self).psi(x)
    }
    fn d_psi(&self, x: &SpacetimePoint) -> [Spinor; 4] {
        (**self).d_psi(x)
    }
}

#[derive(Copy, Clone, Debug, Default)]
pub struct ZeroSpinor;

impl SpinorField for ZeroSpinor {
    fn psi(&self, _x: &SpacetimePoint) -> Spinor {
        Spinor::zeros()
    }
    fn d_psi(&self, _x: &SpacetimePoint) -> [Spinor; 4] {
        [Spinor::zeros(); 4]
    }
}

#[derive(Copy, Clone, Debug)]
pub struct ConstantSpinor(pub Spinor);

impl SpinorField for ConstantSpinor {
    fn psi(&self, _x: &SpacetimePoint) -> Spinor {
        self.0
    }
    fn d_psi(&self, _x: &SpacetimePoint) -> [Spinor; 4] {
        [Spinor::zeros(); 4]
    }
}

/// `Psi(x) = u exp(-i k_mu x^mu)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PlaneWave {
    pub amplitude: Spinor,
    /// Covariant wave covector `k_mu`.
    pub covector: [f64; 4],
}

impl PlaneWave {
    /// Shift the phase so the wave solves the equation in the constant
    /// potential `A_mu = potential[mu]` for charge `charge`.
    pub fn in_constant_potential(mut self, charge: f64, potential: [f64; 4]) -> Self {
        for (k, a) in self.covector.iter_mut().zip(potential) {
            *k += charge * a;
        }
        self
    }

    fn phase(&self, x: &SpacetimePoint) -> Complex64 {
        let arg: f64 = self.covector.iter().zip(x.coords).map(|(k, x)| k * x).sum();
        Complex64::from_polar(1.0, -arg)
    }
}

impl SpinorField for PlaneWave {
    fn psi(&self, x: &SpacetimePoint) -> Spinor {
        self.amplitude * self.phase(x)
    }

    fn d_psi(&self, x: &SpacetimePoint) -> [Spinor; 4] {
        let psi = self.psi(x);
        std::array::from_fn(|mu| psi * Complex64::new(0.0, -self.covector[mu]))
    }
}

/// Flat-space plane-wave solution for contravariant momentum `p^mu`.
///
/// The spinor amplitude is the `branch`-th orthonormal vector of the null
/// space of `-i gamma^a p_a + m`, found by Gram-Schmidt over the columns of
/// `i gamma^a p_a + m`, which span that null space on shell.
pub fn flat_plane_wave(mass: f64, momentum: [f64; 4], branch: usize) -> Result<PlaneWave> {
    let rep = GammaRep::standard();
    let lower: [f64; 4] = std::array::from_fn(|a| ETA[a] * momentum[a]);
    let shell = -momentum[0] * momentum[0] + momentum[1..].iter().map(|p| p * p).sum::<f64>() + mass * mass;
    let scale = momentum.iter().map(|p| p * p).sum::<f64>().max(mass * mass).max(1.0);
    if !(shell.abs() <= 1e-10 * scale) || !(momentum[0] > 0.0) {
        return Err(Error::OffShellMomentum(shell));
    }
    let i = Complex64::i();
    let mut projector = CMat4::identity() * Complex64::from(mass);
    for (a, p) in lower.iter().enumerate() {
        projector += rep.gamma(a) * (i * *p);
    }
    let tol = 1e-8
        * projector
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
    let mut basis: Vec<Spinor> = Vec::with_capacity(2);
    for col in 0..4 {
        let mut v: Spinor = projector.column(col).into_owned();
        for b in &basis {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v / Complex64::from(norm));
        }
    }
    let amplitude = *basis.get(branch).ok_or(Error::EmptyNullSpace {
        branch,
        dimension: basis.len(),
    })?;
    Ok(PlaneWave {
        amplitude,
        covector: lower,
    })
}

/// Linear combination of spinor fields.
#[derive(Clone, Default)]
pub struct Superposition {
    pub terms: Vec<(Complex64, Arc<dyn SpinorField>)>,
}

impl Superposition {
    pub fn new() -> Self {
        Superposition { terms: Vec::new() }
    }

    pub fn with(mut self, weight: Complex64, field: impl SpinorField + 'static) -> Self {
        self.terms.push((weight, Arc::new(field)));
        self
    }
}

impl SpinorField for Superposition {
    fn psi(&self, x: &SpacetimePoint) -> Spinor {
        self.terms
            .iter()
            .fold(Spinor::zeros(), |acc, (w, f)| acc + f.psi(x) * *w)
    }

    fn d_psi(&self, x: &SpacetimePoint) -> [Spinor; 4] {
        let mut out = [Spinor::zeros(); 4];
        for (w, f) in &self.terms {
            for (slot, d) in out.iter_mut().zip(f.d_psi(x)) {
                *slot += d * *w;
            }
        }
        out
    }
}

/// Exponents of every monomial of total degree at most 3 in four variables.
fn cubic_monomials() -> Vec<[u32; 4]> {
    let mut out = Vec::with_capacity(35);
    for total in 0..=3u32 {
        for a in 0..=total {
            for b in 0..=total - a {
                for c in 0..=total - a - b {
                    out.push([a, b, c, total - a - b - c]);
                }
            }
        }
    }
    out
}

/// Cubic polynomial in `xi = (x - center) / scale` per spinor component, with
/// complex coefficients drawn uniformly from `[-1, 1] + i[-1, 1]`.
#[derive(Clone, Debug)]
pub struct PolynomialSpinor {
    center: [f64; 4],
    scale: [f64; 4],
    monomials: Vec<[u32; 4]>,
    coefficients: Vec<Spinor>,
}

impl PolynomialSpinor {
    pub fn random(seed: u64, center: [f64; 4], scale: [f64; 4]) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let monomials = cubic_monomials();
        let coefficients = monomials
            .iter()
            .map(|_| Spinor::from_fn(|_, _| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))))
            .collect();
        PolynomialSpinor {
            center,
            scale,
            monomials,
            coefficients,
        }
    }

    /// Random polynomial centred in a coordinate box, scaled to its half-widths.
    pub fn random_in_box(seed: u64, bounds: [(f64, f64); 4]) -> Self {
        let center = bounds.map(|(lo, hi)| 0.5 * (lo + hi));
        let scale = bounds.map(|(lo, hi)| (0.5 * (hi - lo)).max(f64::MIN_POSITIVE));
        Self::random(seed, center, scale)
    }

    fn local(&self, x: &SpacetimePoint) -> [f64; 4] {
        std::array::from_fn(|mu| (x.coords[mu] - self.center[mu]) / self.scale[mu])
    }
}

fn powers(xi: f64) -> [f64; 4] {
    [1.0, xi, xi * xi, xi * xi * xi]
}

impl SpinorField for PolynomialSpinor {
    fn psi(&self, x: &SpacetimePoint) -> Spinor {
        let pw = self.local(x).map(powers);
        self.monomials
            .iter()
            .zip(&self.coefficients)
            .fold(Spinor::zeros(), |acc, (e, c)| {
                let m: f64 = (0..4).map(|mu| pw[mu][e[mu] as usize]).product();
                acc + c * Complex64::from(m)
            })
    }

    fn d_psi(&self, x: &SpacetimePoint) -> [Spinor; 4] {
        let pw = self.local(x).map(powers);
        std::array::from_fn(|nu| {
            self.monomials
                .iter()
                .zip(&self.coefficients)
                .fold(Spinor::zeros(), |acc, (e, c)| {
                    if e[nu] == 0 {
                        return acc;
                    }
                    let m: f64 = (0..4)
                        .map(|mu| {
                            if mu == nu {
                                e[mu] as f64 * pw[mu][e[mu] as usize - 1]
                            } else {
                                pw[mu][e[mu] as usize]
                            }
                        })
                        .product();
                    acc + c * Complex64::from(m / self.scale[nu])
                })
        })
    }
}

/// Electromagnetic potential `A = A_mu dx^mu`.
pub trait PotentialField: Send + Sync {
    fn a(&self, x: &SpacetimePoint) -> [f64; 4];

    /// `da[nu][mu] = d_nu A_mu`.
    fn da(&self, x: &SpacetimePoint) -> [[f64; 4]; 4];
}

impl<T: PotentialField + ?Sized> PotentialField for &T {
    fn a(&self, x: &SpacetimePoint) -> [f64; 4] {
        (**self).a(x)
    }
    fn da(&self, x: &SpacetimePoint) -> [[f64; 4]; 4] {
        (**self).da(x)
    }
}

impl<T: PotentialField + ?Sized> PotentialField for Arc<T> {
    fn a(&self, x: &SpacetimePoint) -> [f64; 4] {
        (**self).a(x)
    }
    fn da(&self, x: &SpacetimePoint) -> [[f64; 4]; 4] {
        (**self).da(x)
    }
}

#[derive(Copy, Clone, Debug, Default)]
pub struct ZeroPotential;

impl PotentialField for ZeroPotential {
    fn a(&self, _x: &SpacetimePoint) -> [f64; 4] {
        [0.0; 4]
    }
    fn da(&self, _x: &SpacetimePoint) -> [[f64; 4]; 4] {
        [[0.0; 4]; 4]
    }
}

/// `A_mu = offset_mu + gradient[nu][mu] x^nu`.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct LinearPotential {
    pub offset: [f64; 4],
    pub gradient: [[f64; 4]; 4],
}

impl LinearPotential {
    pub fn constant(offset: [f64; 4]) -> Self {
        LinearPotential {
            offset,
            gradient: [[0.0; 4]; 4],
        }
    }

    /// Potential whose field strength `d_mu A_nu - d_nu A_mu` equals `field`
    /// (antisymmetric, coordinate components).
    pub fn uniform_field(field: [[f64; 4]; 4]) -> Self {
        let mut gradient = [[0.0; 4]; 4];
        for (nu, row) in gradient.iter_mut().enumerate() {
            for (mu, g) in row.iter_mut().enumerate() {
                *g = 0.5 * field[nu][mu];
            }
        }
        LinearPotential {
            offset: [0.0; 4],
            gradient,
        }
    }
}

impl PotentialField for LinearPotential {
    fn a(&self, x: &SpacetimePoint) -> [f64; 4] {
        std::array::from_fn(|mu| self.offset[mu] + (0..4).map(|nu| self.gradient[nu][mu] * x.coords[nu]).sum::<f64>())
    }
    fn da(&self, _x: &SpacetimePoint) -> [[f64; 4]; 4] {
        self.gradient
    }
}

/// `A_mu = amplitude_mu sin(k . x + phase)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SinusoidPotential {
    pub amplitude: [f64; 4],
    pub wave: [f64; 4],
    pub phase: f64,
}

impl SinusoidPotential {
    fn arg(&self, x: &SpacetimePoint) -> f64 {
        self.phase + self.wave.iter().zip(x.coords).map(|(k, x)| k * x).sum::<f64>()
    }
}

impl PotentialField for SinusoidPotential {
    fn a(&self, x: &SpacetimePoint) -> [f64; 4] {
        let s = self.arg(x).sin();
        self.amplitude.map(|a| a * s)
    }
    fn da(&self, x: &SpacetimePoint) -> [[f64; 4]; 4] {
        let c = self.arg(x).cos();
        std::array::from_fn(|nu| std::array::from_fn(|mu| self.wave[nu] * self.amplitude[mu] * c))
    }
}

/// A real scalar angle field `k(x)` with its gradient.
pub trait AngleField: Send + Sync {
    fn value(&self, x: &SpacetimePoint) -> f64;

    fn gradient(&self, x: &SpacetimePoint) -> [f64; 4];
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ConstantAngle(pub f64);

impl AngleField for ConstantAngle {
    fn value(&self, _x: &SpacetimePoint) -> f64 {
        self.0
    }
    fn gradient(&self, _x: &SpacetimePoint) -> [f64; 4] {
        [0.0; 4]
    }
}

/// `k(x) = offset + amplitude sin(wave . x + phase)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SinusoidAngle {
    pub offset: f64,
    pub amplitude: f64,
    pub wave: [f64; 4],
    pub phase: f64,
}

impl SinusoidAngle {
    /// `amplitude sin(x^axis)`.
    pub fn along(axis: usize, amplitude: f64) -> Self {
        let mut wave = [0.0; 4];
        wave[axis] = 1.0;
        SinusoidAngle {
            offset: 0.0,
            amplitude,
            wave,
            phase: 0.0,
        }
    }

    fn arg(&self, x: &SpacetimePoint) -> f64 {
        self.phase + self.wave.iter().zip(x.coords).map(|(k, x)| k * x).sum::<f64>()
    }
}

impl AngleField for SinusoidAngle {
    fn value(&self, x: &SpacetimePoint) -> f64 {
        self.offset + self.amplitude * self.arg(x).sin()
    }
    fn gradient(&self, x: &SpacetimePoint) -> [f64; 4] {
        let c = self.amplitude * self.arg(x).cos();
        self.wave.map(|k| k * c)
    }
}

/// `Lambda(x) = L_n(x) ... L_1(x)`, each factor a single-plane transformation
/// `exp(k_i(x) G_i)`. `factors[0]` is applied first.
#[derive(Clone, Default)]
pub struct LocalLorentzField {
    pub factors: Vec<(Plane, Arc<dyn AngleField>)>,
}

/// Values and coordinate derivatives of `Lambda(x)` and its spinor lift.
#[derive(Clone, Debug)]
pub struct LocalLorentzJet {
    pub lorentz: Matrix4<f64>,
    pub d_lorentz: [Matrix4<f64>; 4],
    pub lift: SpinHalfTransform,
    pub d_lift: [CMat4; 4],
}

impl LocalLorentzField {
    pub fn new() -> Self {
        LocalLorentzField { factors: Vec::new() }
    }

    pub fn then(mut self, plane: Plane, angle: impl AngleField + 'static) -> Self {
        self.factors.push((plane, Arc::new(angle)));
        self
    }

    /// Check that every angle and gradient is finite at `x` and that the
    /// composed matrix is a proper orthochronous Lorentz transformation.
    pub fn validate_at(&self, x: &SpacetimePoint) -> Result<LorentzMatrix> {
        for (plane, k) in &self.factors {
            let value = k.value(x);
            let grad = k.gradient(x);
            if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonSmoothField {
                    point: x.coords,
                    reason: format!("angle in plane ({}, {}) is not finite", plane.r(), plane.s()),
                });
            }
        }
        LorentzMatrix::new(self.jet(x).lorentz)
    }

    pub fn jet(&self, x: &SpacetimePoint) -> LocalLorentzJet {
        let rep = GammaRep::standard();
        let mut lorentz = Matrix4::identity();
        let mut d_lorentz = [Matrix4::zeros(); 4];
        let mut half = CMat4::identity();
        let mut inverse = CMat4::identity();
        let mut d_lift = [CMat4::zeros(); 4];
        for (plane, k) in &self.factors {
            let angle = k.value(x);
            let grad = k.gradient(x);
            let factor = LorentzMatrix::from_plane(*plane, angle);
            let lift = plane_lift(rep, *plane, angle);
            let l = *factor.matrix();
            let lg = l * plane.generator();
            let sg = lift.half * plane.spinor_generator(rep);
            for mu in 0..4 {
                d_lorentz[mu] = l * d_lorentz[mu] + lg * lorentz * grad[mu];
                d_lift[mu] = lift.half * d_lift[mu] + sg * half * Complex64::from(grad[mu]);
            }
            lorentz = l * lorentz;
            half = lift.half * half;
            inverse *= lift.inverse;
        }
        LocalLorentzJet {
            lorentz,
            d_lorentz,
            lift: SpinHalfTransform { half, inverse },
            d_lift,
        }
    }
}
