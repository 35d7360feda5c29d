//! Built-in spacetimes and the key/value spec format that selects them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CoframeField, CoframeGradient, FiniteDifference, SpacetimePoint};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const MAX_FD_STEP: f64 = 1e-2;
pub const DEFAULT_MARGIN: f64 = 1e-3;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacetimeKind {
    Flat,
    Rindler,
    Schwarzschild,
    Flrw,
}

impl FromStr for SpacetimeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(SpacetimeKind::Flat),
            "rindler" => Ok(SpacetimeKind::Rindler),
            "schwarzschild" => Ok(SpacetimeKind::Schwarzschild),
            "flrw" => Ok(SpacetimeKind::Flrw),
            other => Err(Error::Spec(format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for SpacetimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpacetimeKind::Flat => "flat",
            SpacetimeKind::Rindler => "rindler",
            SpacetimeKind::Schwarzschild => "schwarzschild",
            SpacetimeKind::Flrw => "flrw",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeMode {
    Analytic,
    Fd,
}

impl FromStr for DerivativeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(DerivativeMode::Analytic),
            "fd" => Ok(DerivativeMode::Fd),
            other => Err(Error::Spec(format!("unknown derivative mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeSpec {
    pub kind: SpacetimeKind,
    /// Schwarzschild mass.
    pub mass: f64,
    /// FLRW scale factor at `t = 0`.
    pub a0: f64,
    /// FLRW expansion rate in `a(t) = a0 exp(H t)`.
    pub hubble: f64,
    pub derivative: DerivativeMode,
    pub fd_step: f64,
    pub richardson: bool,
    /// Relative distance kept from the Schwarzschild horizon.
    pub margin: f64,
}

impl SpacetimeSpec {
    pub fn new(kind: SpacetimeKind) -> Self {
        SpacetimeSpec {
            kind,
            mass: 1.0,
            a0: 1.0,
            hubble: 0.5,
            derivative: DerivativeMode::Analytic,
            fd_step: DEFAULT_FD_STEP,
            richardson: false,
            margin: DEFAULT_MARGIN,
        }
    }

    pub fn with_fd(mut self, step: f64) -> Self {
        self.derivative = DerivativeMode::Fd;
        self.fd_step = step;
        self
    }

    /// Parse `key = value` lines. `#` starts a comment; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Spec(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().to_string();
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Spec(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        let kind: SpacetimeKind = entries
            .remove("kind")
            .ok_or_else(|| Error::Spec("missing `kind`".into()))?
            .parse()?;
        let mut spec = SpacetimeSpec::new(kind);
        for (key, value) in entries {
            let real = || {
                value
                    .parse::<f64>()
                    .map_err(|_| Error::Spec(format!("`{key}` expects a number, got `{value}`")))
            };
            match key.as_str() {
                "M" => spec.mass = real()?,
                "a0" => spec.a0 = real()?,
                "H" => spec.hubble = real()?,
                "fd_step" => spec.fd_step = real()?,
                "margin" => spec.margin = real()?,
                "derivative" => spec.derivative = value.parse()?,
                "richardson" => {
                    spec.richardson = value
                        .parse()
                        .map_err(|_| Error::Spec(format!("`richardson` expects true|false, got `{value}`")))?
                }
                other => return Err(Error::Spec(format!("unknown key `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fd_step > 0.0 && self.fd_step <= MAX_FD_STEP) {
            return Err(Error::Unphysical(format!(
                "fd_step = {} must lie in (0, {MAX_FD_STEP}]",
                self.fd_step
            )));
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::Unphysical(format!("margin = {} must be positive", self.margin)));
        }
        match self.kind {
            SpacetimeKind::Schwarzschild if !(self.mass > 0.0 && self.mass.is_finite()) => {
                Err(Error::Unphysical(format!("M = {} must be positive", self.mass)))
            }
            SpacetimeKind::Flrw if !(self.a0 > 0.0 && self.a0.is_finite() && self.hubble.is_finite()) => {
                Err(Error::Unphysical(format!(
                    "a0 = {} must be positive and H = {} finite",
                    self.a0, self.hubble
                )))
            }
            _ => Ok(()),
        }
    }

    /// Same spec with a different step, bypassing the upper bound on
    /// `fd_step`. Used for deliberately coarse negative controls.
    pub fn with_unchecked_step(&self, step: f64) -> Self {
        let mut out = self.clone();
        out.fd_step = step;
        out
    }
}

impl fmt::Display for SpacetimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind = {}", self.kind)?;
        match self.kind {
            SpacetimeKind::Schwarzschild => {
                writeln!(f, "M = {}", self.mass)?;
                writeln!(f, "margin = {}", self.margin)?;
            }
            SpacetimeKind::Flrw => {
                writeln!(f, "a0 = {}", self.a0)?;
                writeln!(f, "H = {}", self.hubble)?;
            }
            _ => {}
        }
        match self.derivative {
            DerivativeMode::Analytic => writeln!(f, "derivative = analytic"),
            DerivativeMode::Fd => {
                writeln!(f, "derivative = fd")?;
                writeln!(f, "fd_step = {}", self.fd_step)?;
                writeln!(f, "richardson = {}", self.richardson)
            }
        }
    }
}

/// `theta^a_mu = delta^a_mu`.
#[derive(Copy, Clone, Debug, Default)]
pub struct FlatCoframe;

impl CoframeField for FlatCoframe {
    fn theta(&self, _x: &SpacetimePoint) -> Matrix4<f64> {
        Matrix4::identity()
    }
    fn d_theta(&self, _x: &SpacetimePoint) -> CoframeGradient {
        [Matrix4::zeros(); 4]
    }
}

/// `theta^0 = x dt`, `theta^i = dx^i`; chart `x > 0`.
#[derive(Copy, Clone, Debug, Default)]
pub struct RindlerCoframe;

impl CoframeField for RindlerCoframe {
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

/// Diagonal coframe in Schwarzschild coordinates `(t, r, theta, phi)`:
/// `sqrt(f) dt, dr / sqrt(f), r dtheta, r sin(theta) dphi` with `f = 1 - 2M/r`.
#[derive(Copy, Clone, Debug)]
pub struct SchwarzschildCoframe {
    pub mass: f64,
    pub margin: f64,
}

impl SchwarzschildCoframe {
    pub fn lapse(&self, r: f64) -> f64 {
        (1.0 - 2.0 * self.mass / r).sqrt()
    }
}

impl CoframeField for SchwarzschildCoframe {
    fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64> {
        let [_, r, th, _] = x.coords;
        let s = self.lapse(r);
        Matrix4::from_diagonal(&nalgebra::Vector4::new(s, 1.0 / s, r, r * th.sin()))
    }

    fn d_theta(&self, x: &SpacetimePoint) -> CoframeGradient {
        let [_, r, th, _] = x.coords;
        let s = self.lapse(r);
        let ds = self.mass / (r * r * s);
        let mut d = [Matrix4::zeros(); 4];
        d[1][(0, 0)] = ds;
        d[1][(1, 1)] = -ds / (s * s);
        d[1][(2, 2)] = 1.0;
        d[1][(3, 3)] = th.sin();
        d[2][(3, 3)] = r * th.cos();
        d
    }

    fn contains(&self, x: &SpacetimePoint) -> bool {
        let [_, r, th, _] = x.coords;
        r > 2.0 * self.mass * (1.0 + self.margin) && th > 0.0 && th < PI
    }
}

/// `theta^0 = dt`, `theta^i = a(t) dx^i` with `a(t) = a0 exp(H t)`.
#[derive(Copy, Clone, Debug)]
pub struct FlrwCoframe {
    pub a0: f64,
    pub hubble: f64,
}

impl FlrwCoframe {
    pub fn scale_factor(&self, t: f64) -> f64 {
        self.a0 * (self.hubble * t).exp()
    }
}

impl CoframeField for FlrwCoframe {
    fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64> {
        let a = self.scale_factor(x.coords[0]);
        Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, a, a, a))
    }

    fn d_theta(&self, x: &SpacetimePoint) -> CoframeGradient {
        let da = self.hubble * self.scale_factor(x.coords[0]);
        let mut d = [Matrix4::zeros(); 4];
        for i in 1..4 {
            d[0][(i, i)] = da;
        }
        d
    }
}

/// A loaded spacetime: the configured coframe (analytic or finite-difference
/// derivatives), the analytic reference, and the coordinate box to sample.
#[derive(Clone)]
pub struct Spacetime {
    pub spec: SpacetimeSpec,
    coframe: Arc<dyn CoframeField>,
    analytic: Arc<dyn CoframeField>,
    sample_box: [(f64, f64); 4],
}

impl fmt::Debug for Spacetime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spacetime")
            .field("spec", &self.spec)
            .field("sample_box", &self.sample_box)
            .finish()
    }
}

impl Spacetime {
    pub fn coframe(&self) -> Arc<dyn CoframeField> {
        self.coframe.clone()
    }

    /// Same chart with closed-form derivatives, regardless of the configured mode.
    pub fn analytic(&self) -> Arc<dyn CoframeField> {
        self.analytic.clone()
    }

    /// Closed interval per coordinate from which interior points are drawn.
    pub fn sample_box(&self) -> [(f64, f64); 4] {
        self.sample_box
    }

    /// Map a point of the unit hypercube into the sample box.
    pub fn point_from_unit(&self, u: [f64; 4]) -> SpacetimePoint {
        SpacetimePoint::new(std::array::from_fn(|mu| {
            let (lo, hi) = self.sample_box[mu];
            lo + (hi - lo) * u[mu]
        }))
    }

    /// Coframe built from the same chart with finite-difference derivatives at `step`.
    pub fn finite_difference(&self, step: f64) -> FiniteDifference<Arc<dyn CoframeField>> {
        FiniteDifference::new(self.analytic.clone(), step).with_richardson(self.spec.richardson)
    }
}

impl CoframeField for Spacetime {
    fn theta(&self, x: &SpacetimePoint) -> Matrix4<f64> {
        self.coframe.theta(x)
    }
    fn d_theta(&self, x: &SpacetimePoint) -> CoframeGradient {
        self.coframe.d_theta(x)
    }
    fn contains(&self, x: &SpacetimePoint) -> bool {
        self.coframe.contains(x)
    }
}

pub fn load_spacetime(spec: &SpacetimeSpec) -> Result<Spacetime> {
    spec.validate()?;
    load_unchecked(spec)
}

/// Like [`load_spacetime`] but accepts any positive finite `fd_step`.
pub fn load_spacetime_with_step(spec: &SpacetimeSpec, step: f64) -> Result<Spacetime> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Unphysical(format!("fd_step = {step} must be positive")));
    }
    let mut probe = spec.clone();
    probe.fd_step = DEFAULT_FD_STEP;
    probe.validate()?;
    load_unchecked(&spec.with_unchecked_step(step))
}

fn load_unchecked(spec: &SpacetimeSpec) -> Result<Spacetime> {
    let unit = (-1.0, 1.0);
    let (analytic, sample_box): (Arc<dyn CoframeField>, _) = match spec.kind {
        SpacetimeKind::Flat => (Arc::new(FlatCoframe), [unit; 4]),
        SpacetimeKind::Rindler => (Arc::new(RindlerCoframe), [unit, (0.5, 3.0), unit, unit]),
        SpacetimeKind::Schwarzschild => {
            let m = spec.mass;
            (
                Arc::new(SchwarzschildCoframe {
                    mass: m,
                    margin: spec.margin,
                }),
                [unit, (3.0 * m, 20.0 * m), (0.3, PI - 0.3), (0.0, 2.0 * PI)],
            )
        }
        SpacetimeKind::Flrw => (
            Arc::new(FlrwCoframe {
                a0: spec.a0,
                hubble: spec.hubble,
            }),
            [unit; 4],
        ),
    };
    let coframe: Arc<dyn CoframeField> = match spec.derivative {
        DerivativeMode::Analytic => analytic.clone(),
        DerivativeMode::Fd => {
            Arc::new(FiniteDifference::new(analytic.clone(), spec.fd_step).with_richardson(spec.richardson))
        }
    };
    Ok(Spacetime {
        spec: spec.clone(),
        coframe,
        analytic,
        sample_box,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric_from_coframe;

    #[test]
    fn parse_full_spec() {
        let text = "# horizon test\nkind = schwarzschild\nM = 2.5\nderivative = fd  # coarse\nfd_step = 1e-4\nrichardson = true\n";
        let spec = SpacetimeSpec::parse(text).unwrap();
        assert_eq!(spec.kind, SpacetimeKind::Schwarzschild);
        assert_eq!(spec.mass, 2.5);
        assert_eq!(spec.derivative, DerivativeMode::Fd);
        assert_eq!(spec.fd_step, 1e-4);
        assert!(spec.richardson);
        assert_eq!(SpacetimeSpec::parse(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(SpacetimeSpec::parse("M = 1"), Err(Error::Spec(_))));
        assert!(matches!(SpacetimeSpec::parse("kind = kerr"), Err(Error::Spec(_))));
        assert!(matches!(
            SpacetimeSpec::parse("kind = flat\nfoo = 1"),
            Err(Error::Spec(_))
        ));
        assert!(matches!(
            SpacetimeSpec::parse("kind = flat\nkind = flat"),
            Err(Error::Spec(_))
        ));
        assert!(matches!(
            SpacetimeSpec::parse("kind = flat\nfd_step = 0.5"),
            Err(Error::Unphysical(_))
        ));
        assert!(matches!(
            SpacetimeSpec::parse("kind = schwarzschild\nM = 0"),
            Err(Error::Unphysical(_))
        ));
        assert!(matches!(
            SpacetimeSpec::parse("kind = schwarzschild\nM = -1"),
            Err(Error::Unphysical(_))
        ));
    }

    #[test]
    fn schwarzschild_metric_at_ten_m() {
        let st = load_spacetime(&SpacetimeSpec::new(SpacetimeKind::Schwarzschild)).unwrap();
        let g = metric_from_coframe(&st, &SpacetimePoint::new([0.0, 10.0, 1.0, 0.5])).unwrap();
        assert!((g[(0, 0)] + 0.8).abs() < 1e-15);
        assert!((g[(1, 1)] - 1.25).abs() < 1e-14);
        assert!(!st.contains(&SpacetimePoint::new([0.0, 2.001, 1.0, 0.0])));
        assert!(st.contains(&SpacetimePoint::new([0.0, 2.0021, 1.0, 0.0])));
    }

    #[test]
    fn flrw_scale_factor() {
        let st = load_spacetime(&SpacetimeSpec::new(SpacetimeKind::Flrw)).unwrap();
        let g = metric_from_coframe(&st, &SpacetimePoint::new([2.0, 0.0, 0.0, 0.0])).unwrap();
        assert!((g[(1, 1)] - 2f64.exp()).abs() < 1e-14);
    }
}
