//! Seeded test fields shared by the suite runner and the test targets.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::Plane;
use crate::error::Result;
use crate::fields::{flat_plane_wave, LocalLorentzField, PlaneWave, SinusoidAngle, SinusoidPotential, Superposition};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// On-shell momentum with spatial part uniform in `[-spread, spread]^3`.
pub fn random_momentum(rng: &mut impl Rng, mass: f64, spread: f64) -> [f64; 4] {
    let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-spread..=spread));
    let energy = (mass * mass + p.iter().map(|q| q * q).sum::<f64>()).sqrt();
    [energy, p[0], p[1], p[2]]
}

pub fn random_weight(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// Flat plane waves of one mass, optionally in a constant potential.
#[derive(Clone, Debug)]
pub struct WaveSet {
    pub mass: f64,
    pub waves: Vec<(Complex64, PlaneWave)>,
}

impl WaveSet {
    pub fn field(&self) -> Superposition {
        self.waves
            .iter()
            .fold(Superposition::new(), |acc, (w, wave)| acc.with(*w, *wave))
    }
}

/// Between one and `max_waves` plane waves with random momenta, branches and
/// complex weights.
pub fn random_wave_set(seed: u64, max_waves: usize, mass: f64) -> Result<WaveSet> {
    let mut rng = rng(seed);
    let count = rng.gen_range(1..=max_waves.max(1));
    let mut waves = Vec::with_capacity(count);
    for _ in 0..count {
        let momentum = random_momentum(&mut rng, mass, 1.0);
        let branch = rng.gen_range(0..2);
        let weight = random_weight(&mut rng);
        waves.push((weight, flat_plane_wave(mass, momentum, branch)?));
    }
    Ok(WaveSet { mass, waves })
}

/// A rest-frame wave plus a boosted wave, both shifted to solve the equation
/// in the constant potential `potential` with charge `charge`.
pub fn two_wave_state(seed: u64, mass: f64, charge: f64, potential: [f64; 4]) -> Result<WaveSet> {
    let mut rng = rng(seed);
    let rest = flat_plane_wave(mass, [mass, 0.0, 0.0, 0.0], rng.gen_range(0..2))?;
    let moving = flat_plane_wave(mass, random_momentum(&mut rng, mass, 1.5), rng.gen_range(0..2))?;
    let weight = random_weight(&mut rng);
    Ok(WaveSet {
        mass,
        waves: vec![
            (Complex64::new(1.0, 0.0), rest.in_constant_potential(charge, potential)),
            (weight, moving.in_constant_potential(charge, potential)),
        ],
    })
}

pub fn random_angle(rng: &mut impl Rng) -> SinusoidAngle {
    SinusoidAngle {
        offset: rng.gen_range(-0.5..=0.5),
        amplitude: rng.gen_range(0.1..=0.5),
        wave: std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)),
        phase: rng.gen_range(0.0..2.0 * PI),
    }
}

/// One to three single-plane factors with sinusoidal angle fields. With
/// `boosts` false only spatial planes are used; with `boosts` true the first
/// factor is always a boost.
pub fn random_lorentz_field(seed: u64, boosts: bool) -> LocalLorentzField {
    let mut rng = rng(seed);
    let count = rng.gen_range(1..=3);
    let mut field = LocalLorentzField::new();
    for i in 0..count {
        let plane = if boosts && i == 0 {
            Plane::CANONICAL[rng.gen_range(0..3)]
        } else if boosts {
            Plane::CANONICAL[rng.gen_range(0..6)]
        } else {
            Plane::CANONICAL[rng.gen_range(3..6)]
        };
        field = field.then(plane, random_angle(&mut rng));
    }
    field
}

pub fn random_potential(seed: u64) -> SinusoidPotential {
    let mut rng = rng(seed);
    SinusoidPotential {
        amplitude: std::array::from_fn(|_| rng.gen_range(-0.5..=0.5)),
        wave: std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)),
        phase: rng.gen_range(0.0..2.0 * PI),
    }
}

/// Deterministic low-discrepancy point in the unit hypercube (bases 2, 3, 5, 7).
pub fn halton(index: u64) -> [f64; 4] {
    const BASES: [u64; 4] = [2, 3, 5, 7];
    BASES.map(|base| {
        let (mut f, mut r, mut i) = (1.0, 0.0, index);
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    })
}
