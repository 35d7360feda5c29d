//! Runs every identity check over a seeded sample of one spacetime and
//! collects the results into a versioned report.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{load_spacetime, load_spacetime_with_step, DerivativeMode, FlatCoframe, SpacetimeSpec};
use crate::dirac::{
    coordinate_current, current_divergence, dirac_residual, dirac_residual_alt, lagrangean_density,
    rotate_coframe_and_spinor, vector_bilinear, DiracParameters, DiracPoint, RotatedCoframe, RotatedSpinor,
    DEFAULT_DIVERGENCE_STEP,
};
use crate::error::{Error, Result};
use crate::fields::{flat_plane_wave, PolynomialSpinor, PotentialField, SpinorField, ZeroPotential, ZeroSpinor};
use crate::fixtures::{halton, random_lorentz_field, random_potential, random_wave_set, rng, two_wave_state};
use crate::forms::{levi_civita, IndexedForm};
use crate::geometry::{
    negative_eigenvalues, torsion_residual, CoframeField, FiniteDifference, LocalGeometry, SpacetimePoint,
};
use crate::teleparallel::{antisymmetric_part, flat_stress_energy, general_stress_energy};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_POINTS: usize = 100;
pub const DEFAULT_SEED: u64 = 1;

/// Steps of the order-of-convergence check (the second is half the first).
pub const CONVERGENCE_STEPS: [f64; 2] = [1e-2, 5e-3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub points: usize,
    /// Overrides the spec's finite-difference step (and switches to finite
    /// differences). Unlike the spec value it is not capped.
    pub fd_step: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            points: DEFAULT_POINTS,
            fd_step: None,
        }
    }
}

/// Whether a check passes below (`upper`) or above (`lower`) its tolerance.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub bound: Bound,
    /// Largest value observed; `null` in JSON when no value could be computed.
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub points: usize,
    /// Evaluations that raised an error or produced a non-finite value.
    pub failures: usize,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub check: String,
    pub index: usize,
    pub coords: [f64; 4],
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub spacetime: SpacetimeSpec,
    pub seed: u64,
    pub points: usize,
    pub checks: Vec<CheckRecord>,
    pub overall_pass: bool,
    #[serde(skip)]
    pub residuals: Vec<ResidualRow>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with every timing field zeroed, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        for c in &mut copy.checks {
            c.wall_time_ms = 0.0;
        }
        copy.to_json()
    }

    /// `check,index,x0,x1,x2,x3,residual` rows for every pointwise check.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "check,index,x0,x1,x2,x3,residual")?;
        for r in &self.residuals {
            let [a, b, c, d] = r.coords;
            writeln!(out, "{},{},{a:e},{b:e},{c:e},{d:e},{:e}", r.check, r.index, r.residual)?;
        }
        Ok(())
    }
}

struct Runner {
    checks: Vec<CheckRecord>,
    residuals: Vec<ResidualRow>,
}

fn summarize(values: &[Result<f64>]) -> (f64, usize, Option<String>) {
    let mut max = f64::NEG_INFINITY;
    let mut failures = 0;
    let mut note = None;
    for v in values {
        match v {
            Ok(x) if x.is_finite() => max = max.max(*x),
            Ok(x) => {
                failures += 1;
                note.get_or_insert_with(|| format!("non-finite value {x}"));
            }
            Err(e) => {
                failures += 1;
                note.get_or_insert_with(|| e.to_string());
            }
        }
    }
    if max == f64::NEG_INFINITY {
        max = f64::NAN;
    }
    (max, failures, note)
}

impl Runner {
    fn record(&mut self, name: &str, bound: Bound, tolerance: f64, values: &[Result<f64>], started: Instant) {
        let (max, failures, note) = summarize(values);
        let passed = failures == 0
            && match bound {
                Bound::Upper => max <= tolerance,
                Bound::Lower => max > tolerance,
            };
        self.checks.push(CheckRecord {
            name: name.to_string(),
            bound,
            max_residual: max,
            tolerance,
            passed,
            points: values.len(),
            failures,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            note,
        });
    }

    fn pointwise<F>(&mut self, name: &str, bound: Bound, tolerance: f64, points: &[SpacetimePoint], f: F)
    where
        F: Fn(&SpacetimePoint) -> Result<f64> + Sync,
    {
        self.indexed(name, bound, tolerance, points, |_, x| f(x));
    }

    fn indexed<F>(&mut self, name: &str, bound: Bound, tolerance: f64, points: &[SpacetimePoint], f: F)
    where
        F: Fn(usize, &SpacetimePoint) -> Result<f64> + Sync,
    {
        let started = Instant::now();
        let values: Vec<Result<f64>> = points.par_iter().enumerate().map(|(i, x)| f(i, x)).collect();
        for (index, (x, v)) in points.iter().zip(&values).enumerate() {
            self.residuals.push(ResidualRow {
                check: name.to_string(),
                index,
                coords: x.coords,
                residual: *v.as_ref().unwrap_or(&f64::NAN),
            });
        }
        self.record(name, bound, tolerance, &values, started);
    }

    fn aggregate<F>(&mut self, name: &str, bound: Bound, tolerance: f64, f: F)
    where
        F: FnOnce() -> Result<(f64, usize, Option<String>)>,
    {
        let started = Instant::now();
        match f() {
            Ok((value, points, note)) => {
                let values: Vec<Result<f64>> = vec![Ok(value)];
                self.record(name, bound, tolerance, &values, started);
                let last = self.checks.last_mut().expect("just pushed");
                last.points = points;
                last.note = note;
            }
            Err(e) => self.record(name, bound, tolerance, &[Err(e)], started),
        }
    }
}

fn sub_seed(seed: u64, tag: u64, index: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (tag << 40) ^ index
}

fn max_abs_spinor_diff(a: &crate::clifford::Spinor, b: &crate::clifford::Spinor) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn matrix_gap(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).amax()
}

fn flat_box_point(u: [f64; 4]) -> SpacetimePoint {
    SpacetimePoint::new(u.map(|v| 2.0 * v - 1.0))
}

/// `5^4` grid on `[-1, 1]^4` with spacing `1/2`.
pub fn flat_grid() -> Vec<SpacetimePoint> {
    let ticks = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut out = Vec::with_capacity(625);
    for &t in &ticks {
        for &x in &ticks {
            for &y in &ticks {
                for &z in &ticks {
                    out.push(SpacetimePoint::new([t, x, y, z]));
                }
            }
        }
    }
    out
}

/// `* d * theta_a` from central differences of the coordinate components
/// of the 3-form `*theta_a`, evaluated independently of the frame formula.
pub fn star_d_star_theta_from_three_form(
    cf: &dyn CoframeField,
    x: &SpacetimePoint,
    a: usize,
    step: f64,
) -> Result<f64> {
    let geo = LocalGeometry::at(cf, x)?;
    let three_form = |p: &SpacetimePoint| -> [[[f64; 4]; 4]; 4] {
        let th = cf.theta(p);
        let mut c = [[[0.0; 4]; 4]; 4];
        for (mu, plane) in c.iter_mut().enumerate() {
            for (nu, row) in plane.iter_mut().enumerate() {
                for (rho, slot) in row.iter_mut().enumerate() {
                    let mut sum = 0.0;
                    for j in 0..4 {
                        for k in 0..4 {
                            for l in 0..4 {
                                let eps = levi_civita(&[a, j, k, l]);
                                if eps != 0.0 {
                                    sum += eps * th[(j, mu)] * th[(k, nu)] * th[(l, rho)];
                                }
                            }
                        }
                    }
                    *slot = sum;
                }
            }
        }
        c
    };
    let mut grad = [[[[0.0; 4]; 4]; 4]; 4];
    for (sigma, g) in grad.iter_mut().enumerate() {
        let (plus, minus) = (x.shifted(sigma, step), x.shifted(sigma, -step));
        if !cf.contains(&plus) || !cf.contains(&minus) {
            return Err(Error::OutsideDomain(plus.coords));
        }
        let (cp, cm) = (three_form(&plus), three_form(&minus));
        for mu in 0..4 {
            for nu in 0..4 {
                for rho in 0..4 {
                    g[mu][nu][rho] = (cp[mu][nu][rho] - cm[mu][nu][rho]) / (2.0 * step);
                }
            }
        }
    }
    // (dC)_{s m n r} = d_s C_{mnr} - d_m C_{snr} + d_n C_{smr} - d_r C_{smn}
    let dc = |s: usize, m: usize, n: usize, r: usize| {
        grad[s][m][n][r] - grad[m][s][n][r] + grad[n][s][m][r] - grad[r][s][m][n]
    };
    let v = &geo.frame.0;
    let mut top = 0.0;
    for s in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                for r in 0..4 {
                    let w = v[(0, s)] * v[(1, m)] * v[(2, n)] * v[(3, r)];
                    if w != 0.0 {
                        top += w * dc(s, m, n, r);
                    }
                }
            }
        }
    }
    // d*theta_a = top *1 and **1 = -1
    Ok(-top)
}

/// Residuals of the two basis-level statements about the Hodge dual.
pub fn hodge_convention_residual() -> Result<f64> {
    let star_star_one = IndexedForm::scalar(1.0).hodge_dual()?.hodge_dual()?;
    let mut worst = (star_star_one.get(&[]) + 1.0).abs();
    let star_theta0 = IndexedForm::lowered_basis(0).hodge_dual()?;
    let expected = IndexedForm::basis(1)
        .wedge(&IndexedForm::basis(2))?
        .wedge(&IndexedForm::basis(3))?;
    let mut diff = star_theta0;
    diff.add_scaled(&expected, -1.0);
    worst = worst.max(diff.max_abs());
    Ok(worst)
}

/// Transformed copies of a background and spinor under one local Lorentz field.
struct Transformed {
    original_cf: Arc<dyn CoframeField>,
    original_psi: Arc<dyn SpinorField>,
    cf: RotatedCoframe<Arc<dyn CoframeField>>,
    psi: RotatedSpinor<Arc<dyn SpinorField>>,
    potential: Arc<dyn PotentialField>,
    params: DiracParameters,
    points: Arc<Vec<SpacetimePoint>>,
}

fn worst_over(
    setups: &[Transformed],
    index: usize,
    f: impl Fn(&Transformed, &SpacetimePoint) -> Result<f64>,
) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for t in setups {
        worst = worst.max(f(t, &t.points[index])?);
    }
    Ok(worst)
}

pub fn run_suite(spec: &SpacetimeSpec, config: &SuiteConfig) -> Result<SuiteReport> {
    let spacetime = match config.fd_step {
        Some(step) => {
            let mut spec = spec.clone();
            spec.derivative = DerivativeMode::Fd;
            load_spacetime_with_step(&spec, step)?
        }
        None => load_spacetime(spec)?,
    };
    let fd_mode = spacetime.spec.derivative == DerivativeMode::Fd;
    let tol = |analytic: f64, fd: f64| if fd_mode { fd } else { analytic };
    let cf = spacetime.coframe();
    let analytic = spacetime.analytic();
    let seed = config.seed;
    let count = config.points.max(1);
    let offset = 1 + (seed % 1_000_003) * 4099;
    let points: Vec<SpacetimePoint> = (0..count as u64)
        .map(|i| spacetime.point_from_unit(halton(offset + i)))
        .collect();
    let flat_points: Vec<SpacetimePoint> = (0..count as u64).map(|i| flat_box_point(halton(offset + i))).collect();
    let sample_box = spacetime.sample_box();
    let polys: Vec<PolynomialSpinor> = (0..10)
        .map(|i| PolynomialSpinor::random_in_box(sub_seed(seed, 1, i), sample_box))
        .collect();
    let potential = random_potential(sub_seed(seed, 2, 0));
    let params = DiracParameters::new(0.9, 0.6);

    let mut run = Runner {
        checks: Vec::new(),
        residuals: Vec::new(),
    };

    run.pointwise("duality", Bound::Upper, 1e-12, &points, |x| {
        let geo = LocalGeometry::at(&*cf, x)?;
        Ok(geo.frame.duality_residual(&geo.theta))
    });
    run.pointwise("metric_signature", Bound::Upper, 0.0, &points, |x| {
        let geo = LocalGeometry::at(&*cf, x)?;
        Ok((negative_eigenvalues(&geo.metric()) as f64 - 1.0).abs())
    });
    run.pointwise("omega_antisymmetry", Bound::Upper, 0.0, &points, |x| {
        Ok(LocalGeometry::at(&*cf, x)?.spin_connection().antisymmetry_defect())
    });
    run.pointwise("connection_equivalence", Bound::Upper, tol(1e-9, 1e-5), &points, |x| {
        let geo = LocalGeometry::at(&*cf, x)?;
        Ok(geo
            .spin_connection()
            .max_abs_diff(&geo.spin_connection_via_christoffel()))
    });
    run.pointwise("torsion_free", Bound::Upper, tol(1e-10, 1e-6), &points, |x| {
        let omega = LocalGeometry::at(&*cf, x)?.spin_connection();
        let reference = LocalGeometry::at(&*analytic, x)?;
        let residual = torsion_residual(&reference.dtheta, &omega);
        Ok(residual.iter().map(|f| f.max_abs()).fold(0.0, f64::max))
    });
    run.aggregate("hodge_convention", Bound::Upper, 0.0, || {
        Ok((hodge_convention_residual()?, 1, None))
    });
    run.aggregate("fd_convergence_order", Bound::Upper, 0.5, || {
        let discrepancy = |step: f64| -> Result<f64> {
            let fd = FiniteDifference::new(analytic.clone(), step);
            let worst = points
                .par_iter()
                .map(|x| {
                    let (a, b) = (analytic.d_theta(x), fd.d_theta(x));
                    (0..4).map(|nu| (a[nu] - b[nu]).amax()).fold(0.0, f64::max)
                })
                .reduce(|| 0.0, f64::max);
            Ok(worst)
        };
        let coarse = discrepancy(CONVERGENCE_STEPS[0])?;
        let fine = discrepancy(CONVERGENCE_STEPS[1])?;
        if coarse <= 1e-11 {
            return Ok((
                0.0,
                points.len(),
                Some(format!("differences exact to rounding ({coarse:e})")),
            ));
        }
        let ratio = coarse / fine;
        Ok((
            (ratio - 4.0).abs(),
            points.len(),
            Some(format!("error ratio {ratio:.4}")),
        ))
    });
    run.pointwise("star_d_star_two_path", Bound::Upper, 1e-6, &points, |x| {
        let geo = LocalGeometry::at(&*cf, x)?;
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            let oracle = star_d_star_theta_from_three_form(&*analytic, x, a, 1e-4)?;
            worst = worst.max((geo.star_d_star_theta(a) - oracle).abs());
        }
        Ok(worst)
    });
    run.pointwise("formulation_equivalence", Bound::Upper, tol(1e-9, 1e-5), &points, |x| {
        let mut worst: f64 = 0.0;
        for psi in &polys {
            let r1 = dirac_residual(psi, &*cf, &potential, &params, x)?;
            let r2 = dirac_residual_alt(psi, &*cf, &potential, &params, x)?;
            worst = worst.max(max_abs_spinor_diff(&r1, &r2));
        }
        Ok(worst)
    });
    run.pointwise("current_reality", Bound::Upper, 1e-12, &points, |x| {
        let rep = crate::clifford::GammaRep::standard();
        let mut worst: f64 = 0.0;
        for psi in &polys {
            let value = psi.psi(x);
            let scale = value.norm_squared().max(1.0);
            vector_bilinear(&value)?;
            for a in 0..4 {
                worst = worst.max(rep.bilinear(&value, rep.gamma(a)).im.abs() / scale);
            }
        }
        Ok(worst)
    });

    // Conservation on flat plane-wave superpositions.
    let grid = flat_grid();
    let wave_sets = (0..10)
        .map(|i| random_wave_set(sub_seed(seed, 3, i), 4, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let wave_fields: Vec<_> = wave_sets.iter().map(|w| w.field()).collect();
    run.pointwise("current_conservation", Bound::Upper, 1e-8, &grid, |x| {
        let mut worst: f64 = 0.0;
        for psi in &wave_fields {
            worst = worst.max(current_divergence(psi, &FlatCoframe, 1.0, x, DEFAULT_DIVERGENCE_STEP)?.abs());
        }
        Ok(worst)
    });
    let non_solution = PolynomialSpinor::random_in_box(sub_seed(seed, 4, 0), [(-1.0, 1.0); 4]);
    run.pointwise("conservation_negative_control", Bound::Lower, 1e-3, &grid, |x| {
        Ok(current_divergence(&non_solution, &FlatCoframe, 1.0, x, DEFAULT_DIVERGENCE_STEP)?.abs())
    });

    // Local Lorentz transformations on flat space and on this background.
    let flat_psi: Arc<dyn SpinorField> = Arc::new(wave_fields[0].clone());
    let flat_cf: Arc<dyn CoframeField> = Arc::new(FlatCoframe);
    let flat_points = Arc::new(flat_points);
    let curved_points = Arc::new(points.clone());
    let mut transformed = Vec::new();
    for (i, boosts) in [false, false, true, true].into_iter().enumerate() {
        let field = random_lorentz_field(sub_seed(seed, 5, i as u64), boosts);
        let (tcf, tpsi) = rotate_coframe_and_spinor(flat_cf.clone(), flat_psi.clone(), field.clone(), &flat_points)?;
        transformed.push(Transformed {
            original_cf: flat_cf.clone(),
            original_psi: flat_psi.clone(),
            cf: tcf,
            psi: tpsi,
            potential: Arc::new(ZeroPotential),
            params: DiracParameters::new(wave_sets[0].mass, 0.0),
            points: flat_points.clone(),
        });
        let curved_psi: Arc<dyn SpinorField> = Arc::new(polys[i].clone());
        let (tcf, tpsi) = rotate_coframe_and_spinor(cf.clone(), curved_psi.clone(), field, &curved_points)?;
        transformed.push(Transformed {
            original_cf: cf.clone(),
            original_psi: curved_psi,
            cf: tcf,
            psi: tpsi,
            potential: Arc::new(potential),
            params,
            points: curved_points.clone(),
        });
    }
    let lagrangean_gap = |t: &Transformed, x: &SpacetimePoint| -> Result<f64> {
        let l1 = lagrangean_density(&*t.original_psi, &*t.potential, &*t.original_cf, &t.params, x)?;
        let l2 = lagrangean_density(&t.psi, &*t.potential, &t.cf, &t.params, x)?;
        Ok((l1.total() - l2.total()).norm())
    };
    run.indexed("lorentz_invariance", Bound::Upper, 1e-9, &points, |i, _| {
        worst_over(&transformed, i, lagrangean_gap)
    });
    let current_gap = |t: &Transformed, x: &SpacetimePoint| -> Result<f64> {
        let j1 = coordinate_current(&*t.original_psi, &*t.original_cf, 1.0, x)?;
        let j2 = coordinate_current(&t.psi, &t.cf, 1.0, x)?;
        Ok((0..4).map(|mu| (j1[mu] - j2[mu]).abs()).fold(0.0, f64::max))
    };
    run.indexed("current_invariance", Bound::Upper, 1e-10, &points, |i, _| {
        worst_over(&transformed, i, current_gap)
    });
    let transport_gap = |t: &Transformed, x: &SpacetimePoint| -> Result<f64> {
        let r1 = dirac_residual(&*t.original_psi, &*t.original_cf, &*t.potential, &t.params, x)?.norm();
        let r2 = dirac_residual(&t.psi, &t.cf, &*t.potential, &t.params, x)?.norm();
        Ok(r2 - 10.0 * r1)
    };
    run.indexed("on_shell_transport", Bound::Upper, 1e-9, &points, |i, _| {
        worst_over(&transformed, i, transport_gap)
    });

    // Stress-energy.
    run.pointwise("em_symmetry", Bound::Upper, 1e-10, &points, |x| {
        let t = general_stress_energy(&ZeroSpinor, &potential, &*cf, &params, x)?;
        Ok(antisymmetric_part(&t).amax())
    });
    let mut r = rng(sub_seed(seed, 6, 0));
    let two_wave = (0..10)
        .map(|i| {
            use rand::Rng;
            let c: [f64; 4] = std::array::from_fn(|_| r.gen_range(-0.5..=0.5));
            two_wave_state(sub_seed(seed, 7, i), 1.0, 0.7, c).map(|w| (w.field(), c))
        })
        .collect::<Result<Vec<_>>>()?;
    let charged = DiracParameters::new(1.0, 0.7);
    run.pointwise("stress_energy_equivalence", Bound::Upper, 1e-8, &flat_points, |x| {
        let mut worst: f64 = 0.0;
        for (psi, c) in &two_wave {
            let pot = crate::fields::LinearPotential::constant(*c);
            let general = general_stress_energy(psi, &pot, &FlatCoframe, &charged, x)?;
            let closed = flat_stress_energy(psi, &pot, &charged, x)?;
            worst = worst.max(matrix_gap(&general.components, &closed.components));
        }
        Ok(worst)
    });
    let rest_mass = 1.3;
    let rest = flat_plane_wave(rest_mass, [rest_mass, 0.0, 0.0, 0.0], 0)?;
    run.pointwise("rest_energy_density", Bound::Upper, 1e-10, &flat_points, |x| {
        let t = general_stress_energy(
            &rest,
            &ZeroPotential,
            &FlatCoframe,
            &DiracParameters::new(rest_mass, 0.0),
            x,
        )?;
        let mut expected = Matrix4::zeros();
        expected[(0, 0)] = rest_mass;
        Ok(matrix_gap(&t.components, &expected))
    });
    run.pointwise("asymmetry_witness", Bound::Lower, 1e-3, &flat_points, |x| {
        let mut best: f64 = 0.0;
        for (psi, c) in &two_wave {
            let pot = crate::fields::LinearPotential::constant(*c);
            let t = general_stress_energy(psi, &pot, &FlatCoframe, &charged, x)?;
            if DiracPoint::at(psi, &FlatCoframe, &pot, x)?.residual(&charged).norm() > 1e-10 {
                return Err(Error::OffShell(0.0));
            }
            best = best.max(antisymmetric_part(&t).amax());
        }
        Ok(best)
    });

    let overall_pass = run.checks.iter().all(|c| c.passed);
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        spacetime: spacetime.spec.clone(),
        seed,
        points: count,
        checks: run.checks,
        overall_pass,
        residuals: run.residuals,
    })
}
