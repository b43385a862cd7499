//! Curve-spec documents and SVG figures.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve_model::{
    build_oval, curve_from_plane_points, Geometry, SampledCurve, SupportOval, Vec3,
};
use crate::hyperbolic::{build_rounded_semicircle, HyperbolicCurve, RoundedSemicircleSpec};
use crate::numerics::interp_periodic;
use crate::sphere::SphereCurve;
use crate::surface::{Perturbation, SurfaceFront};
use crate::wavefront::Front;
use crate::GeomError;

pub const DEFAULT_SAMPLES: usize = 1024;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot parse curve spec: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("curve spec does not match the schema: {0}")]
    Schema(String),
}

/// A curve-spec document. The representation is selected by the
/// `representation` field and its payload sits alongside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub geometry: Geometry,
    #[serde(flatten)]
    pub representation: Representation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "representation", rename_all = "snake_case")]
pub enum Representation {
    /// Support function `Σ aₙ cos nα + bₙ sin nα` as `[n, aₙ, bₙ]` triples.
    SupportFourier {
        coeffs: Vec<(usize, f64, f64)>,
    },
    /// Ellipse with semi-axes `a`, `b`.
    SupportEllipse {
        a: f64,
        b: f64,
    },
    /// Closed point list, uniformly spaced in some periodic parameter.
    /// Plane points have two coordinates, sphere and hyperboloid points three.
    Samples {
        points: Vec<Vec<f64>>,
    },
    SphereSamples {
        points: Vec<[f64; 3]>,
    },
    HyperboloidSamples {
        points: Vec<[f64; 3]>,
    },
    /// Circle of radius `rho` about the model's base point with radial
    /// harmonic perturbations.
    PerturbedCircle {
        rho: f64,
        #[serde(default)]
        perturbations: Vec<Perturbation>,
    },
    HyperbolicCircle {
        rho: f64,
        #[serde(default)]
        perturbations: Vec<Perturbation>,
    },
    /// Tennis-ball seam with lobe parameter `b` in `(0, 1/2)`; bisects the sphere.
    TennisBall {
        b: f64,
    },
    RoundedSemicircle(RoundedSemicircleSpec),
}

#[derive(Debug, Clone)]
pub enum BuiltCurve {
    Plane(SampledCurve),
    Sphere(SphereCurve),
    Hyperbolic(HyperbolicCurve),
}

impl BuiltCurve {
    pub fn sampled(&self) -> &SampledCurve {
        match self {
            BuiltCurve::Plane(c) => c,
            BuiltCurve::Sphere(c) => &c.curve,
            BuiltCurve::Hyperbolic(c) => &c.curve,
        }
    }

    pub fn to_csv(&self) -> crate::Result<String> {
        Ok(match self {
            BuiltCurve::Plane(c) => plane_csv(c),
            BuiltCurve::Sphere(c) => c.to_csv()?,
            BuiltCurve::Hyperbolic(c) => c.to_csv(),
        })
    }
}

/// `s,x,y,k` rows of a plane curve.
pub fn plane_csv(c: &SampledCurve) -> String {
    let mut out = String::from("s,x,y,k\n");
    for i in 0..c.len() {
        let p = c.points[i];
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e}\n",
            c.s[i], p.x, p.y, c.k[i]
        ));
    }
    out
}

fn schema(msg: impl Into<String>) -> SpecError {
    SpecError::Schema(msg.into())
}

fn to_vec3(points: &[[f64; 3]]) -> Vec<Vec3> {
    points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: CurveSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Geometry and payload consistency, independent of any sampling.
    pub fn validate(&self) -> Result<(), SpecError> {
        use Geometry::*;
        use Representation as R;
        let ok = matches!(
            (self.geometry, &self.representation),
            (
                Euclidean,
                R::SupportFourier { .. } | R::SupportEllipse { .. }
            ) | (_, R::Samples { .. })
                | (
                    Spherical,
                    R::SphereSamples { .. } | R::PerturbedCircle { .. } | R::TennisBall { .. }
                )
                | (Hyperbolic, R::HyperboloidSamples { .. })
                | (
                    Hyperbolic,
                    R::HyperbolicCircle { .. } | R::PerturbedCircle { .. }
                )
                | (Hyperbolic, R::RoundedSemicircle(_))
        );
        if !ok {
            return Err(schema(format!(
                "representation {} is not available in {} geometry",
                self.representation_name(),
                self.geometry
            )));
        }
        match &self.representation {
            R::SupportFourier { coeffs } if coeffs.is_empty() => Err(schema("coeffs is empty")),
            R::Samples { points } => {
                let dim = if self.geometry == Euclidean { 2 } else { 3 };
                match points.iter().position(|p| p.len() != dim) {
                    Some(i) => Err(schema(format!("point {i} does not have {dim} coordinates"))),
                    None if points.len() < 8 => Err(schema("need at least 8 points")),
                    None => Ok(()),
                }
            }
            R::SphereSamples { points } | R::HyperboloidSamples { points } if points.len() < 8 => {
                Err(schema("need at least 8 points"))
            }
            _ => Ok(()),
        }
    }

    pub fn representation_name(&self) -> &'static str {
        match self.representation {
            Representation::SupportFourier { .. } => "support_fourier",
            Representation::SupportEllipse { .. } => "support_ellipse",
            Representation::Samples { .. } => "samples",
            Representation::SphereSamples { .. } => "sphere_samples",
            Representation::HyperboloidSamples { .. } => "hyperboloid_samples",
            Representation::PerturbedCircle { .. } => "perturbed_circle",
            Representation::HyperbolicCircle { .. } => "hyperbolic_circle",
            Representation::TennisBall { .. } => "tennis_ball",
            Representation::RoundedSemicircle(_) => "rounded_semicircle",
        }
    }

    /// Sample the curve with `n` points, or the document's own `n_samples`.
    pub fn build(&self, n: Option<usize>) -> crate::Result<BuiltCurve> {
        self.build_with(n, true)
    }

    /// As [`CurveSpec::build`]; with `require_convex` off, plane samples may
    /// describe any smooth closed curve.
    pub fn build_with(&self, n: Option<usize>, require_convex: bool) -> crate::Result<BuiltCurve> {
        use Representation as R;
        let n = n.or(self.n_samples).unwrap_or(DEFAULT_SAMPLES);
        let g = self.geometry;
        Ok(match &self.representation {
            R::SupportFourier { coeffs } => {
                BuiltCurve::Plane(build_oval(&SupportOval::from_harmonics(coeffs, n))?)
            }
            R::SupportEllipse { a, b } => {
                BuiltCurve::Plane(build_oval(&SupportOval::ellipse(*a, *b, n))?)
            }
            R::Samples { points } if g == Geometry::Euclidean => {
                let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
                BuiltCurve::Plane(curve_from_plane_points(&pts, n, require_convex)?)
            }
            R::Samples { points } => {
                let pts: Vec<Vec3> = points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
                surface_from_samples(g, &pts, n)?
            }
            R::SphereSamples { points } | R::HyperboloidSamples { points } => {
                surface_from_samples(g, &to_vec3(points), n)?
            }
            R::PerturbedCircle { rho, perturbations } if g == Geometry::Spherical => {
                BuiltCurve::Sphere(SphereCurve::perturbed_circle(*rho, perturbations, n)?)
            }
            R::PerturbedCircle { rho, perturbations }
            | R::HyperbolicCircle { rho, perturbations } => {
                BuiltCurve::Hyperbolic(HyperbolicCurve::perturbed_circle(*rho, perturbations, n)?)
            }
            R::TennisBall { b } => BuiltCurve::Sphere(SphereCurve::tennis_ball(*b, n)?),
            R::RoundedSemicircle(spec) => {
                BuiltCurve::Hyperbolic(build_rounded_semicircle(spec, n)?)
            }
        })
    }
}

fn surface_from_samples(g: Geometry, pts: &[Vec3], n: usize) -> crate::Result<BuiltCurve> {
    match g {
        Geometry::Spherical => Ok(BuiltCurve::Sphere(SphereCurve::from_samples(pts, n)?)),
        Geometry::Hyperbolic => Ok(BuiltCurve::Hyperbolic(HyperbolicCurve::from_samples(
            pts, n,
        )?)),
        Geometry::Euclidean => Err(GeomError::InvalidSpec(
            "plane samples need two coordinates".into(),
        )),
    }
}

/// Beltrami-Cayley-Klein projection of a hyperboloid point.
pub fn klein(p: &Vec3) -> [f64; 2] {
    [p.y / p.x, p.z / p.x]
}

/// Orthographic view of a sphere point seen from `view`.
pub fn orthographic(p: &Vec3, view: &Vec3) -> [f64; 2] {
    let v = view.normalize();
    let helper = if v.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let e1 = helper.cross(&v).normalize();
    let e2 = v.cross(&e1);
    [p.dot(&e1), p.dot(&e2)]
}

/// Positions of a plane front's cusps, interpolated along the front.
pub fn plane_cusp_points(front: &Front<'_>) -> Vec<[f64; 2]> {
    front
        .cusps
        .iter()
        .map(|&c| {
            let p = interp_periodic(&front.points, front.base.index_of(c));
            [p.x, p.y]
        })
        .collect()
}

/// Positions of a surface front's cusps, in 3D.
pub fn surface_cusp_points(front: &SurfaceFront<'_>) -> Vec<Vec3> {
    let h = front.base.step();
    front
        .cusps
        .iter()
        .map(|&s| interp_periodic(&front.points, s / h))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub stroke: String,
    pub closed: bool,
}

/// A batch figure: polylines, cusp markers and optionally the unit circle
/// (Klein disc or sphere outline).
#[derive(Debug, Clone, Default)]
pub struct Figure {
    pub polylines: Vec<Polyline>,
    pub markers: Vec<[f64; 2]>,
    pub unit_disc: bool,
}

const PALETTE: [&str; 6] = [
    "#1f4e79", "#c55a11", "#548235", "#7030a0", "#bf9000", "#2f5597",
];

impl Figure {
    pub fn add(&mut self, points: Vec<[f64; 2]>) {
        let stroke = PALETTE[self.polylines.len() % PALETTE.len()].to_string();
        self.polylines.push(Polyline {
            points,
            stroke,
            closed: true,
        });
    }

    pub fn to_svg(&self, size: f64) -> String {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let all = self
            .polylines
            .iter()
            .flat_map(|l| l.points.iter())
            .chain(&self.markers);
        for p in all.filter(|p| p[0].is_finite() && p[1].is_finite()) {
            for j in 0..2 {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }
        if self.unit_disc || !lo[0].is_finite() {
            lo = [lo[0].min(-1.0), lo[1].min(-1.0)];
            hi = [hi[0].max(1.0), hi[1].max(1.0)];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12) * 1.1;
        let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        let scale = size / span;
        // y axis points up in the figure
        let map = |p: &[f64; 2]| {
            (
                (p[0] - c[0]) * scale + size / 2.0,
                size / 2.0 - (p[1] - c[1]) * scale,
            )
        };
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
        );
        out.push_str(&format!(
            "<rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
        ));
        if self.unit_disc {
            let (x, y) = map(&[0.0, 0.0]);
            out.push_str(&format!(
                "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"#999999\"/>\n",
                scale
            ));
        }
        for line in &self.polylines {
            let tag = if line.closed { "polygon" } else { "polyline" };
            let pts: Vec<String> = line
                .points
                .iter()
                .filter(|p| p[0].is_finite() && p[1].is_finite())
                .map(|p| {
                    let (x, y) = map(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            out.push_str(&format!(
                "<{tag} points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"/>\n",
                pts.join(" "),
                line.stroke
            ));
        }
        for m in &self.markers {
            let (x, y) = map(m);
            out.push_str(&format!(
                "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"#c00000\"/>\n"
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_representation() {
        let docs = [
            r#"{"geometry":"euclidean","representation":"support_fourier","coeffs":[[0,1,0],[2,0.05,0]],"n_samples":256}"#,
            r#"{"geometry":"euclidean","representation":"support_ellipse","a":2,"b":1}"#,
            r#"{"geometry":"spherical","representation":"perturbed_circle","rho":0.8,"perturbations":[{"n":3,"amp":0.01}]}"#,
            r#"{"geometry":"spherical","representation":"tennis_ball","b":0.3}"#,
            r#"{"geometry":"hyperbolic","representation":"hyperbolic_circle","rho":1.0}"#,
            r#"{"geometry":"hyperbolic","representation":"rounded_semicircle","r":2,"corner_scale":0.05}"#,
        ];
        for d in docs {
            let spec = CurveSpec::from_json(d).unwrap();
            let built = spec.build(Some(2048)).unwrap();
            assert_eq!(built.sampled().geometry, spec.geometry);
            let back = serde_json::to_string(&spec).unwrap();
            assert_eq!(CurveSpec::from_json(&back).unwrap(), spec);
        }
    }

    #[test]
    fn sample_documents_round_trip_through_curves() {
        let c = SphereCurve::perturbed_circle(
            0.7,
            &[Perturbation {
                n: 2,
                amp: 0.02,
                phase: 0.0,
            }],
            256,
        )
        .unwrap();
        let pts: Vec<[f64; 3]> = c.curve.points.iter().map(|p| [p.x, p.y, p.z]).collect();
        let spec = CurveSpec {
            geometry: Geometry::Spherical,
            representation: Representation::SphereSamples { points: pts },
            n_samples: None,
        };
        let back = spec.build(Some(256)).unwrap();
        assert!((back.sampled().length - c.length()).abs() < 1e-6);
    }

    #[test]
    fn schema_violations() {
        let bad = [
            r#"{"geometry":"spherical","representation":"support_ellipse","a":2,"b":1}"#,
            r#"{"geometry":"euclidean","representation":"samples","points":[[0,0,1]]}"#,
            r#"{"geometry":"euclidean","representation":"support_fourier","coeffs":[]}"#,
        ];
        for d in bad {
            assert!(
                matches!(CurveSpec::from_json(d), Err(SpecError::Schema(_))),
                "{d}"
            );
        }
        assert!(matches!(
            CurveSpec::from_json("{not json"),
            Err(SpecError::Parse(_))
        ));
        assert!(matches!(
            CurveSpec::from_json(r#"{"geometry":"euclidean","representation":"spiral"}"#),
            Err(SpecError::Parse(_))
        ));
    }

    #[test]
    fn svg_is_deterministic_and_closed() {
        let mut fig = Figure {
            unit_disc: true,
            ..Figure::default()
        };
        fig.add(vec![[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]]);
        fig.markers.push([0.5, 0.0]);
        let a = fig.to_svg(400.0);
        assert_eq!(a, fig.to_svg(400.0));
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<circle").count(), 2);
    }
}
