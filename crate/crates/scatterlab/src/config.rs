//! Run configuration: the TOML schema, validation, and conversion into
//! core objects.

use std::collections::BTreeSet;
use std::path::Path;

use scatterlab_core::domain::{
    geodesic_disk_chart_radius, BoundaryCurve, CurveSpec, Domain, FourierCurve,
};
use scatterlab_core::geometry::{Metric, Profile, Tolerances as GeodesicTolerances};
use scatterlab_core::highdim::{HDDomain, HDOptions, HDShape, ModelSpace};
use scatterlab_core::sobolev::{SobolevOptions, TestFamily, TestFunction};
use scatterlab_core::Vec2;
use serde::{Deserialize, Serialize};

use crate::error::AppError;

pub const MIN_BOUNDARY_NODES: usize = 64;
pub const MIN_THETA_NODES: usize = 16;
pub const MIN_RADIAL: usize = 4;
pub const MIN_ANGULAR: usize = 8;
pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Energy,
    Identity,
    Bol,
    Convex,
    Sobolev,
    Symmetry,
    Highdim,
    Converge,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Energy => "energy",
            Task::Identity => "identity",
            Task::Bol => "bol",
            Task::Convex => "convex",
            Task::Sobolev => "sobolev",
            Task::Symmetry => "symmetry",
            Task::Highdim => "highdim",
            Task::Converge => "converge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    Sine,
    Sinh,
    Linear,
    Cubic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    Plane,
    Sphere,
    Hyperbolic,
    ConformalBump {
        amplitude: f64,
        width: f64,
    },
    Revolution {
        profile: ProfileName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coefficient: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disk {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// Chart curve `Σ (a_k cos ku + b_k sin ku)` per coordinate.
    Fourier {
        x_cos: Vec<f64>,
        #[serde(default)]
        x_sin: Vec<f64>,
        #[serde(default)]
        y_cos: Vec<f64>,
        y_sin: Vec<f64>,
    },
    /// Geodesic disk of polar radius `theta0` about the pole of a sphere.
    Cap { theta0: f64 },
    /// Geodesic disk of radius `radius` in the hyperbolic plane.
    HyperbolicDisk { radius: f64 },
    /// Counter-clockwise chart points joined by a periodic cubic spline.
    Samples { points: Vec<[f64; 2]> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resolution {
    pub n_boundary: usize,
    pub n_theta: usize,
    /// Fan rule: nodes per ray for the domain area and per interior pair ray.
    pub radial: usize,
    pub interior_angular: usize,
    pub mixed_radial: usize,
    pub mixed_angular: usize,
    pub symmetry_samples: usize,
    /// Boundary nodes whose full chord fields go to `chords.csv`.
    pub chord_table_nodes: usize,
    /// Levels of the convergence study run by the `converge` task.
    pub levels: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            n_boundary: 256,
            n_theta: scatterlab_core::chords::DEFAULT_THETA_NODES,
            radial: 16,
            interior_angular: 64,
            mixed_radial: 24,
            mixed_angular: 48,
            symmetry_samples: 64,
            chord_table_nodes: 16,
            levels: 3,
        }
    }
}

/// Solver tolerances and the gates each task is judged against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ode_tol: f64,
    pub bvp_tol: f64,
    pub diag_cutoff: f64,
    /// Relative gap allowed between the energy and its identities.
    pub identity: f64,
    pub santalo: f64,
    /// Relative gap between the chord decomposition and the direct energy.
    pub chords: f64,
    pub sobolev_chain: f64,
    pub highdim: f64,
    /// Smallest acceptable estimated order in the convergence study.
    pub min_order: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let g = GeodesicTolerances::default();
        Tolerances {
            ode_tol: g.ode,
            bvp_tol: g.bvp,
            diag_cutoff: g.diag_cutoff,
            identity: 1e-2,
            santalo: 1e-3,
            chords: 1e-2,
            sobolev_chain: 1e-3,
            highdim: 1e-2,
            min_order: 2.0,
        }
    }
}

/// An extra gate on any reported scalar, addressed as `task.field`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    /// With `rel_tol`: `|value − target| ≤ rel_tol·|target|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionName {
    Cone,
    Gaussian,
    TensorBump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SobolevSpec {
    pub function: FunctionName,
    pub center: [f64; 2],
    pub radius: f64,
    pub height: f64,
    pub sigma: f64,
    pub half_widths: [f64; 2],
    /// Mollifier radius; zero leaves kinks in place.
    pub mollifier: f64,
    pub radial: usize,
    pub angular: usize,
    /// Also compute the cross term and check the chain ordering.
    pub chain: bool,
}

impl Default for SobolevSpec {
    fn default() -> Self {
        let o = SobolevOptions::default();
        SobolevSpec {
            function: FunctionName::Cone,
            center: [0.0, 0.0],
            radius: 1.0,
            height: 1.0,
            sigma: 0.4,
            half_widths: [1.0, 1.0],
            mollifier: scatterlab_core::sobolev::DEFAULT_MOLLIFIER,
            radial: o.radial,
            angular: o.angular,
            chain: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Euclidean,
    Sphere,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeName {
    Ball,
    Ellipsoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HighdimSpec {
    pub model: ModelName,
    pub dim: usize,
    pub shape: ShapeName,
    /// Normal coordinates of the center at the model origin.
    pub center: Vec<f64>,
    pub radius: f64,
    pub semi_axes: Vec<f64>,
    pub p: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub chunk: usize,
    pub polar: usize,
    pub azimuth: usize,
    pub radial: usize,
}

impl Default for HighdimSpec {
    fn default() -> Self {
        let o = HDOptions::default();
        HighdimSpec {
            model: ModelName::Euclidean,
            dim: 3,
            shape: ShapeName::Ball,
            center: vec![0.0; 3],
            radius: 1.0,
            semi_axes: Vec::new(),
            p: vec![0.0],
            samples: o.samples,
            seed: o.seed,
            chunk: o.chunk,
            polar: o.polar,
            azimuth: o.azimuth,
            radial: o.radial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory, relative to the working directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub tasks: Vec<Task>,
    #[serde(default = "plane")]
    pub metric: MetricSpec,
    pub domain: DomainSpec,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sobolev: Option<SobolevSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub highdim: Option<HighdimSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn plane() -> MetricSpec {
    MetricSpec::Plane
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> AppError {
    AppError::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, v: f64) -> Result<(), AppError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be a positive number, got {v}"),
        ))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<(), AppError> {
    if v >= min {
        Ok(())
    } else {
        Err(invalid(field, format!("must be at least {min}, got {v}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, AppError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::parse(&text).map_err(|e| match e {
            AppError::Config(m) => AppError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), AppError> {
        if self.tasks.is_empty() {
            return Err(invalid("tasks", "at least one task is required"));
        }
        let mut seen = BTreeSet::new();
        for t in &self.tasks {
            if !seen.insert(*t) {
                return Err(invalid("tasks", format!("{} is listed twice", t.name())));
            }
        }
        let r = &self.resolution;
        at_least("resolution.n_boundary", r.n_boundary, MIN_BOUNDARY_NODES)?;
        at_least("resolution.n_theta", r.n_theta, MIN_THETA_NODES)?;
        at_least("resolution.radial", r.radial, MIN_RADIAL)?;
        at_least(
            "resolution.interior_angular",
            r.interior_angular,
            MIN_ANGULAR,
        )?;
        at_least("resolution.mixed_radial", r.mixed_radial, MIN_RADIAL)?;
        at_least("resolution.mixed_angular", r.mixed_angular, MIN_ANGULAR)?;
        at_least(
            "resolution.symmetry_samples",
            r.symmetry_samples,
            MIN_ANGULAR,
        )?;
        at_least("resolution.levels", r.levels, 2)?;
        let t = &self.tolerances;
        for (field, v) in [
            ("tolerances.ode_tol", t.ode_tol),
            ("tolerances.bvp_tol", t.bvp_tol),
            ("tolerances.diag_cutoff", t.diag_cutoff),
            ("tolerances.identity", t.identity),
            ("tolerances.santalo", t.santalo),
            ("tolerances.chords", t.chords),
            ("tolerances.sobolev_chain", t.sobolev_chain),
            ("tolerances.highdim", t.highdim),
        ] {
            positive(field, v)?;
        }
        if !t.min_order.is_finite() {
            return Err(invalid("tolerances.min_order", "must be finite"));
        }
        self.validate_metric()?;
        self.validate_domain()?;
        if self.tasks.contains(&Task::Sobolev) && self.sobolev.is_none() {
            return Err(invalid(
                "sobolev",
                "the sobolev task needs a [sobolev] table",
            ));
        }
        if let Some(s) = &self.sobolev {
            s.validate()?;
        }
        if self.tasks.contains(&Task::Highdim) && self.highdim.is_none() {
            return Err(invalid(
                "highdim",
                "the highdim task needs a [highdim] table",
            ));
        }
        if let Some(h) = &self.highdim {
            h.validate(t.diag_cutoff)?;
        }
        for (i, c) in self.checks.iter().enumerate() {
            let field = format!("checks[{i}]");
            if c.min.is_none() && c.max.is_none() && c.target.is_none() {
                return Err(invalid(&field, "needs min, max or target"));
            }
            if c.target.is_some() != c.rel_tol.is_some() {
                return Err(invalid(&field, "target and rel_tol go together"));
            }
            if !c.value.contains('.') {
                return Err(invalid(&field, "value must be written task.field"));
            }
        }
        Ok(())
    }

    fn validate_metric(&self) -> Result<(), AppError> {
        match &self.metric {
            MetricSpec::ConformalBump { amplitude, width } => {
                if !amplitude.is_finite() {
                    return Err(invalid("metric.amplitude", "must be finite"));
                }
                positive("metric.width", *width)
            }
            MetricSpec::Revolution {
                profile,
                coefficient,
            } => match (profile, coefficient) {
                (ProfileName::Cubic, None) => Err(invalid(
                    "metric.coefficient",
                    "the cubic profile needs a coefficient",
                )),
                (ProfileName::Cubic, Some(c)) if !c.is_finite() => {
                    Err(invalid("metric.coefficient", "must be finite"))
                }
                (ProfileName::Cubic, _) | (_, None) => Ok(()),
                (_, Some(_)) => Err(invalid(
                    "metric.coefficient",
                    "only the cubic profile takes a coefficient",
                )),
            },
            _ => Ok(()),
        }
    }

    fn validate_domain(&self) -> Result<(), AppError> {
        match &self.domain {
            DomainSpec::Disk { radius, .. } => positive("domain.radius", *radius),
            DomainSpec::Ellipse { a, b, .. } => {
                positive("domain.a", *a)?;
                positive("domain.b", *b)
            }
            DomainSpec::Fourier {
                x_cos,
                x_sin,
                y_cos,
                y_sin,
            } => {
                if x_cos.len() < 2 && x_sin.len() < 2 {
                    return Err(invalid(
                        "domain.x_cos",
                        "needs at least one nonconstant term",
                    ));
                }
                if [x_cos, x_sin, y_cos, y_sin]
                    .iter()
                    .any(|v| v.iter().any(|c| !c.is_finite()))
                {
                    return Err(invalid("domain", "Fourier coefficients must be finite"));
                }
                Ok(())
            }
            DomainSpec::Cap { theta0 } => {
                positive("domain.theta0", *theta0)?;
                if *theta0 >= std::f64::consts::FRAC_PI_2 {
                    return Err(invalid(
                        "domain.theta0",
                        "caps must be smaller than a hemisphere",
                    ));
                }
                match self.metric {
                    MetricSpec::Sphere
                    | MetricSpec::Revolution {
                        profile: ProfileName::Sine,
                        ..
                    } => Ok(()),
                    _ => Err(invalid(
                        "domain.kind",
                        "cap needs metric sphere or revolution with profile sine",
                    )),
                }
            }
            DomainSpec::HyperbolicDisk { radius } => {
                positive("domain.radius", *radius)?;
                match self.metric {
                    MetricSpec::Hyperbolic
                    | MetricSpec::Revolution {
                        profile: ProfileName::Sinh,
                        ..
                    } => Ok(()),
                    _ => Err(invalid(
                        "domain.kind",
                        "hyperbolic_disk needs metric hyperbolic or revolution with profile sinh",
                    )),
                }
            }
            DomainSpec::Samples { points } => {
                if points.len() < 8 {
                    return Err(invalid("domain.points", "needs at least 8 points"));
                }
                if points.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(invalid("domain.points", "coordinates must be finite"));
                }
                Ok(())
            }
        }
    }

    pub fn geodesic_tolerances(&self) -> GeodesicTolerances {
        GeodesicTolerances {
            ode: self.tolerances.ode_tol,
            bvp: self.tolerances.bvp_tol,
            diag_cutoff: self.tolerances.diag_cutoff,
            ..GeodesicTolerances::default()
        }
    }

    pub fn metric(&self) -> Metric {
        let m = match &self.metric {
            MetricSpec::Plane => Metric::plane(),
            MetricSpec::Sphere => Metric::sphere(),
            MetricSpec::Hyperbolic => Metric::hyperbolic(),
            MetricSpec::ConformalBump { amplitude, width } => {
                Metric::conformal_bump(*amplitude, *width)
            }
            MetricSpec::Revolution {
                profile,
                coefficient,
            } => Metric::revolution(match profile {
                ProfileName::Sine => Profile::Sine,
                ProfileName::Sinh => Profile::Sinh,
                ProfileName::Linear => Profile::Linear,
                ProfileName::Cubic => Profile::Cubic {
                    coefficient: coefficient.unwrap_or(0.0),
                },
            }),
        };
        m.with_tolerances(self.geodesic_tolerances())
    }

    /// The domain with `n_boundary` nodes scaled by `2^level`.
    pub fn domain(&self, level: u32) -> Result<Domain, scatterlab_core::Error> {
        let metric = self.metric();
        let spec = match &self.domain {
            DomainSpec::Disk { radius, center } => CurveSpec::Fourier(FourierCurve::circle(
                Vec2::new(center[0], center[1]),
                *radius,
            )),
            DomainSpec::Ellipse { a, b, center } => CurveSpec::Fourier(FourierCurve::ellipse(
                Vec2::new(center[0], center[1]),
                *a,
                *b,
            )),
            DomainSpec::Fourier {
                x_cos,
                x_sin,
                y_cos,
                y_sin,
            } => CurveSpec::Fourier(FourierCurve {
                x_cos: x_cos.clone(),
                x_sin: x_sin.clone(),
                y_cos: y_cos.clone(),
                y_sin: y_sin.clone(),
            }),
            DomainSpec::Cap { theta0: r } | DomainSpec::HyperbolicDisk { radius: r } => {
                let chart = geodesic_disk_chart_radius(&metric, *r)?;
                CurveSpec::Fourier(FourierCurve::circle(Vec2::ZERO, chart))
            }
            DomainSpec::Samples { points } => {
                CurveSpec::Samples(points.iter().map(|p| Vec2::new(p[0], p[1])).collect())
            }
        };
        let n_b = self.resolution.n_boundary << level;
        Domain::new(
            BoundaryCurve::new(&metric, &spec, n_b)?,
            self.resolution.radial,
        )
    }
}

impl SobolevSpec {
    fn validate(&self) -> Result<(), AppError> {
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("sobolev.center", "must be finite"));
        }
        positive("sobolev.height", self.height)?;
        match self.function {
            FunctionName::Cone => positive("sobolev.radius", self.radius)?,
            FunctionName::Gaussian => {
                positive("sobolev.radius", self.radius)?;
                positive("sobolev.sigma", self.sigma)?;
            }
            FunctionName::TensorBump => {
                positive("sobolev.half_widths[0]", self.half_widths[0])?;
                positive("sobolev.half_widths[1]", self.half_widths[1])?;
            }
        }
        if !(self.mollifier >= 0.0) {
            return Err(invalid("sobolev.mollifier", "must be zero or positive"));
        }
        if self.function != FunctionName::TensorBump && self.mollifier >= 0.5 * self.radius {
            return Err(invalid(
                "sobolev.mollifier",
                "must be below half the support radius",
            ));
        }
        at_least("sobolev.radial", self.radial, MIN_RADIAL)?;
        at_least("sobolev.angular", self.angular, MIN_ANGULAR)
    }

    pub fn function(&self) -> Result<TestFunction, scatterlab_core::Error> {
        let center = Vec2::new(self.center[0], self.center[1]);
        let family = match self.function {
            FunctionName::Cone => TestFamily::Cone {
                center,
                radius: self.radius,
                height: self.height,
            },
            FunctionName::Gaussian => TestFamily::Gaussian {
                center,
                sigma: self.sigma,
                radius: self.radius,
                height: self.height,
            },
            FunctionName::TensorBump => TestFamily::TensorBump {
                center,
                half_widths: Vec2::new(self.half_widths[0], self.half_widths[1]),
                height: self.height,
            },
        };
        TestFunction::new(family, (self.mollifier > 0.0).then_some(self.mollifier))
    }

    pub fn options(&self) -> SobolevOptions {
        SobolevOptions {
            radial: self.radial,
            angular: self.angular,
            ..SobolevOptions::default()
        }
    }
}

impl HighdimSpec {
    fn validate(&self, diag_cutoff: f64) -> Result<(), AppError> {
        at_least("highdim.dim", self.dim, 2)?;
        if self.center.len() != self.dim {
            return Err(invalid(
                "highdim.center",
                format!("needs {} coordinates", self.dim),
            ));
        }
        match self.shape {
            ShapeName::Ball => positive("highdim.radius", self.radius)?,
            ShapeName::Ellipsoid => {
                if self.model != ModelName::Euclidean {
                    return Err(invalid(
                        "highdim.shape",
                        "ellipsoids need the euclidean model",
                    ));
                }
                if self.semi_axes.len() != self.dim {
                    return Err(invalid(
                        "highdim.semi_axes",
                        format!("needs {} values", self.dim),
                    ));
                }
                for a in &self.semi_axes {
                    positive("highdim.semi_axes", *a)?;
                }
            }
        }
        if self.p.is_empty() {
            return Err(invalid("highdim.p", "needs at least one exponent"));
        }
        let floor = 2.0 - self.dim as f64;
        if let Some(p) = self.p.iter().find(|p| !(**p >= floor - 1e-12)) {
            return Err(invalid(
                "highdim.p",
                format!("{p} is below 2 − n = {floor}"),
            ));
        }
        at_least("highdim.samples", self.samples, MIN_SAMPLES)?;
        at_least("highdim.chunk", self.chunk, 1)?;
        at_least("highdim.polar", self.polar, MIN_RADIAL)?;
        at_least("highdim.azimuth", self.azimuth, MIN_ANGULAR)?;
        at_least("highdim.radial", self.radial, MIN_RADIAL)?;
        positive("tolerances.diag_cutoff", diag_cutoff)
    }

    pub fn domain(&self) -> Result<HDDomain, scatterlab_core::Error> {
        let model = ModelSpace::new(
            self.dim,
            match self.model {
                ModelName::Euclidean => 0.0,
                ModelName::Sphere => 1.0,
                ModelName::Hyperbolic => -1.0,
            },
        )?;
        let shape = match self.shape {
            ShapeName::Ball => HDShape::Ball {
                center: self.center.clone(),
                radius: self.radius,
            },
            ShapeName::Ellipsoid => HDShape::Ellipsoid {
                center: self.center.clone(),
                semi_axes: self.semi_axes.clone(),
            },
        };
        HDDomain::new(model, shape)
    }

    pub fn options(&self, diag_cutoff: f64) -> HDOptions {
        HDOptions {
            polar: self.polar,
            azimuth: self.azimuth,
            radial: self.radial,
            samples: self.samples,
            seed: self.seed,
            chunk: self.chunk,
            diag_cutoff,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ELLIPSE: &str = r#"
tasks = ["energy", "identity"]

[metric]
kind = "plane"

[domain]
kind = "ellipse"
a = 2.0
b = 1.0
"#;

    #[test]
    fn parses_defaults() {
        let c = RunConfig::parse(ELLIPSE).unwrap();
        assert_eq!(c.tasks, vec![Task::Energy, Task::Identity]);
        assert_eq!(c.resolution, Resolution::default());
        assert_eq!(
            c.domain,
            DomainSpec::Ellipse {
                a: 2.0,
                b: 1.0,
                center: [0.0, 0.0]
            }
        );
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = RunConfig::parse(ELLIPSE).unwrap();
        c.metric = MetricSpec::Revolution {
            profile: ProfileName::Cubic,
            coefficient: Some(0.1),
        };
        c.sobolev = Some(SobolevSpec::default());
        c.highdim = Some(HighdimSpec {
            p: vec![-1.0, 0.5],
            ..HighdimSpec::default()
        });
        c.checks.push(Check {
            value: "energy.e_direct".into(),
            min: None,
            max: Some(20.0),
            target: None,
            rel_tol: None,
        });
        let text = c.to_toml();
        assert_eq!(RunConfig::parse(&text).unwrap(), c, "{text}");
    }

    #[test]
    fn small_boundary_resolution_names_the_field() {
        let text = format!("{ELLIPSE}\n[resolution]\nn_boundary = 8\n");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(
            err.contains("resolution.n_boundary") && err.contains("64"),
            "{err}"
        );
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let err = RunConfig::parse("tasks = [\"energy\"]\n[domain\nkind = 1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = RunConfig::parse(
            "tasks = [\"energy\"]\n[domain]\nkind = \"disk\"\nradius = 1.0\nwidth = 2\n",
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("width"), "{err}");
    }

    #[test]
    fn rejects_mismatched_cap_metric() {
        let text = "tasks = [\"energy\"]\n[domain]\nkind = \"cap\"\ntheta0 = 0.6\n";
        let err = RunConfig::parse(text).unwrap_err().to_string();
        assert!(err.contains("domain.kind"), "{err}");
    }
}
