//! Plane ovals built from support functions, and the sampled closed-curve
//! representation shared by the Euclidean, spherical and hyperbolic code.
//!
//! A support function `h(α)` gives the oval
//! `γ(α) = h(α)·(cos α, sin α) + h'(α)·(−sin α, cos α)`, whose radius of
//! curvature at outward normal direction `α` is `R(α) = h + h''`. Convexity
//! is then a pointwise condition on `R`, and closure is automatic.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::numerics::{self, bisect, bracket_roots, cumulative_integral, diff1, diff2};
use crate::sturm_hurwitz::scan_sign_changes;

pub type Vec3 = Vector3<f64>;

/// Smallest sampling density accepted by [`build_oval`].
pub const MIN_SAMPLES: usize = 16;
/// Default hysteresis for mean-curvature crossings, relative to the mean.
pub const CROSSING_TOL_REL: f64 = 1e-7;
/// Parameter accuracy of bisection-refined roots.
pub const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Euclidean,
    Spherical,
    Hyperbolic,
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Geometry::Euclidean => "euclidean",
            Geometry::Spherical => "spherical",
            Geometry::Hyperbolic => "hyperbolic",
        })
    }
}

/// A support function with closed-form derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum SupportFunction {
    /// `h(α) = Σ_n a_n cos nα + b_n sin nα`, entry `n` holding `(a_n, b_n)`.
    Fourier(Vec<(f64, f64)>),
    /// Ellipse with semi-axes `a` (along x) and `b`.
    Ellipse { a: f64, b: f64 },
}

impl SupportFunction {
    /// `(h, h')` at `alpha`.
    pub fn eval(&self, alpha: f64) -> (f64, f64) {
        match self {
            SupportFunction::Fourier(c) => {
                let mut h = 0.0;
                let mut d = 0.0;
                for (n, &(a, b)) in c.iter().enumerate() {
                    let nf = n as f64;
                    let (s, co) = (nf * alpha).sin_cos();
                    h += a * co + b * s;
                    d += nf * (b * co - a * s);
                }
                (h, d)
            }
            SupportFunction::Ellipse { a, b } => {
                let (s, c) = alpha.sin_cos();
                let h = (a * a * c * c + b * b * s * s).sqrt();
                (h, (b * b - a * a) * s * c / h)
            }
        }
    }

    /// Radius of curvature `R = h + h''` at outward normal direction `alpha`.
    pub fn radius(&self, alpha: f64) -> f64 {
        match self {
            SupportFunction::Fourier(c) => c
                .iter()
                .enumerate()
                .map(|(n, &(a, b))| {
                    let nf = n as f64;
                    let (s, co) = (nf * alpha).sin_cos();
                    (1.0 - nf * nf) * (a * co + b * s)
                })
                .sum(),
            SupportFunction::Ellipse { a, b } => {
                let (h, _) = self.eval(alpha);
                a * a * b * b / (h * h * h)
            }
        }
    }

    /// Arc length `∫_0^α R`, when it has a closed form.
    fn arc_length(&self, alpha: f64) -> Option<f64> {
        match self {
            SupportFunction::Fourier(c) => Some(
                c.iter()
                    .enumerate()
                    .map(|(n, &(a, b))| {
                        if n == 0 {
                            return a * alpha;
                        }
                        let nf = n as f64;
                        let (s, co) = (nf * alpha).sin_cos();
                        (1.0 - nf * nf) * (a * s + b * (1.0 - co)) / nf
                    })
                    .sum(),
            ),
            SupportFunction::Ellipse { .. } => None,
        }
    }
}

/// A plane oval given by its support function and a sampling density.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportOval {
    pub support: SupportFunction,
    pub n_samples: usize,
}

impl SupportOval {
    /// Dense coefficients, entry `n` holding `(cos_amp, sin_amp)`.
    pub fn fourier(coeffs: Vec<(f64, f64)>, n_samples: usize) -> Self {
        SupportOval {
            support: SupportFunction::Fourier(coeffs),
            n_samples,
        }
    }

    /// Sparse `(n, cos_amp, sin_amp)` triples; repeated indices add up.
    pub fn from_harmonics(terms: &[(usize, f64, f64)], n_samples: usize) -> Self {
        let n_max = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut coeffs = vec![(0.0, 0.0); n_max + 1];
        for &(n, a, b) in terms {
            coeffs[n].0 += a;
            coeffs[n].1 += b;
        }
        Self::fourier(coeffs, n_samples)
    }

    pub fn ellipse(a: f64, b: f64, n_samples: usize) -> Self {
        SupportOval {
            support: SupportFunction::Ellipse { a, b },
            n_samples,
        }
    }

    pub fn circle(radius: f64, n_samples: usize) -> Self {
        Self::fourier(vec![(radius, 0.0)], n_samples)
    }
}

/// A closed curve sampled on a uniform parameter grid, tagged with the
/// geometry it lives in. Plane curves are stored in the `z = 0` plane;
/// spherical curves as unit vectors; hyperbolic curves on the upper sheet
/// of the hyperboloid `⟨x, x⟩ = -1` with signature `(-, +, +)`.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub geometry: Geometry,
    /// Uniform parameter grid on `[0, period)`.
    pub param: Vec<f64>,
    pub period: f64,
    pub points: Vec<Vec3>,
    /// Unit tangents in the direction of travel.
    pub tangents: Vec<Vec3>,
    /// Arc length at each sample; `s[0] = 0`.
    pub s: Vec<f64>,
    /// Quadrature weights: `Σ f_i w_i ≈ ∮ f ds`.
    pub weights: Vec<f64>,
    /// Signed (geodesic) curvature, positive when turning left.
    pub k: Vec<f64>,
    pub length: f64,
    pub area: f64,
    pub closed: bool,
    pub(crate) support: Option<SupportFunction>,
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.period / self.len() as f64
    }

    /// Fractional sample index of a parameter value.
    pub fn index_of(&self, param: f64) -> f64 {
        (param - self.param[0]) / self.step()
    }

    pub fn param_at(&self, index: f64) -> f64 {
        (self.param[0] + index * self.step()).rem_euclid(self.period)
    }

    /// Curvature at an arbitrary parameter: exact for support-function ovals,
    /// four-point interpolation otherwise.
    pub fn curvature_at(&self, param: f64) -> f64 {
        match &self.support {
            Some(sf) => 1.0 / sf.radius(param),
            None => numerics::interp_periodic(&self.k, self.index_of(param)),
        }
    }

    /// Outward unit normal of a plane curve: the tangent turned clockwise.
    pub fn outward_normal(&self, i: usize) -> Vec3 {
        let t = self.tangents[i];
        Vec3::new(t.y, -t.x, 0.0)
    }

    pub fn support_function(&self) -> Option<&SupportFunction> {
        self.support.as_ref()
    }

    /// Check the structural invariants of the representation.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n < 4
            || [
                self.param.len(),
                self.tangents.len(),
                self.s.len(),
                self.k.len(),
                self.weights.len(),
            ]
            .iter()
            .any(|&m| m != n)
        {
            return Err(GeomError::BadCurve("inconsistent sample arrays".into()));
        }
        if self.s[0] != 0.0 {
            return Err(GeomError::BadCurve("arc length must start at 0".into()));
        }
        if self.s.windows(2).any(|w| w[1] <= w[0]) || self.s[n - 1] >= self.length {
            return Err(GeomError::BadCurve("arc length must increase".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            let residual = match self.geometry {
                Geometry::Euclidean => p.z.abs(),
                Geometry::Spherical => (p.norm() - 1.0).abs(),
                Geometry::Hyperbolic => (crate::surface::minkowski(p, p) + 1.0).abs(),
            };
            if residual > 1e-10 {
                return Err(GeomError::OffManifold { index: i, residual });
            }
        }
        if self.geometry == Geometry::Euclidean {
            let turning: f64 = self.k.iter().zip(&self.weights).map(|(k, w)| k * w).sum();
            if ((turning / TAU) - 1.0).abs() > 1e-6 {
                return Err(GeomError::BadCurve(format!(
                    "total turning {turning:.9} is not 2*pi"
                )));
            }
        }
        Ok(())
    }
}

/// Sample a support-function oval on the uniform α-grid.
pub fn build_oval(spec: &SupportOval) -> Result<SampledCurve> {
    let n = spec.n_samples;
    if n < MIN_SAMPLES {
        return Err(GeomError::DegenerateSampling {
            got: n,
            min: MIN_SAMPLES,
        });
    }
    let sf = &spec.support;
    if let SupportFunction::Ellipse { a, b } = sf {
        if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
            return Err(GeomError::InvalidSpec(format!(
                "ellipse semi-axes {a}, {b}"
            )));
        }
    }
    let step = TAU / n as f64;
    let param: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    let radius: Vec<f64> = param.iter().map(|&a| sf.radius(a)).collect();
    if let Some((i, &r)) = radius
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .filter(|(_, r)| **r <= 0.0 || !r.is_finite())
    {
        return Err(GeomError::NonConvex {
            param: param[i],
            radius: r,
        });
    }
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut area = 0.0;
    for (&a, &r) in param.iter().zip(&radius) {
        let (h, dh) = sf.eval(a);
        let (s, c) = a.sin_cos();
        let normal = Vec3::new(c, s, 0.0);
        let tangent = Vec3::new(-s, c, 0.0);
        points.push(normal * h + tangent * dh);
        tangents.push(tangent);
        area += 0.5 * h * r * step;
    }
    let weights: Vec<f64> = radius.iter().map(|r| r * step).collect();
    let length: f64 = weights.iter().sum();
    let s = match sf.arc_length(0.0) {
        Some(_) => param.iter().map(|&a| sf.arc_length(a).unwrap()).collect(),
        None => cumulative_integral(&radius, TAU),
    };
    Ok(SampledCurve {
        geometry: Geometry::Euclidean,
        param,
        period: TAU,
        points,
        tangents,
        s,
        weights,
        k: radius.iter().map(|r| 1.0 / r).collect(),
        length,
        area,
        closed: true,
        support: Some(sf.clone()),
    })
}

/// Build a plane curve from an arbitrary closed point list. The points are
/// taken as uniform samples of a periodic parameter, resampled
/// trigonometrically onto `n_samples` points, differentiated with
/// fourth-order periodic stencils and reoriented counterclockwise. With
/// `require_convex`, any sample of nonpositive curvature is rejected.
pub fn curve_from_plane_points(
    points: &[[f64; 2]],
    n_samples: usize,
    require_convex: bool,
) -> Result<SampledCurve> {
    if n_samples < MIN_SAMPLES || points.len() < 8 {
        return Err(GeomError::DegenerateSampling {
            got: n_samples.min(points.len()),
            min: MIN_SAMPLES,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
    let xs = numerics::resample_trig(&xs, n_samples);
    let ys = numerics::resample_trig(&ys, n_samples);
    let mut pts: Vec<Vec3> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| Vec3::new(x, y, 0.0))
        .collect();
    let step = TAU / n_samples as f64;
    let signed_area = |p: &[Vec3]| {
        let d = diff1(p, step);
        0.5 * p
            .iter()
            .zip(&d)
            .map(|(a, b)| a.x * b.y - a.y * b.x)
            .sum::<f64>()
            * step
    };
    if signed_area(&pts) < 0.0 {
        pts[1..].reverse();
    }
    let d1 = diff1(&pts, step);
    let d2 = diff2(&pts, step);
    let mut tangents = Vec::with_capacity(n_samples);
    let mut k = Vec::with_capacity(n_samples);
    let mut speed = Vec::with_capacity(n_samples);
    for (a, b) in d1.iter().zip(&d2) {
        let v = a.norm();
        if v < 1e-12 {
            return Err(GeomError::BadParametrization(1.0));
        }
        speed.push(v);
        tangents.push(a / v);
        k.push((a.x * b.y - a.y * b.x) / (v * v * v));
    }
    let param: Vec<f64> = (0..n_samples).map(|i| i as f64 * step).collect();
    if require_convex {
        if let Some(i) = (0..n_samples).find(|&i| k[i] <= 0.0) {
            return Err(GeomError::NonConvex {
                param: param[i],
                radius: 1.0 / k[i],
            });
        }
    }
    let weights: Vec<f64> = speed.iter().map(|v| v * step).collect();
    let length = weights.iter().sum();
    let area = signed_area(&pts);
    let curve = SampledCurve {
        geometry: Geometry::Euclidean,
        param,
        period: TAU,
        s: cumulative_integral(&speed, TAU),
        points: pts,
        tangents,
        weights,
        k,
        length,
        area,
        closed: true,
        support: None,
    };
    if require_convex {
        curve.validate()?;
    }
    Ok(curve)
}

/// Average curvature from Gauss-Bonnet: `2π/L`, `(2π − A)/L` or `(2π + A)/L`.
pub fn average_curvature(curve: &SampledCurve) -> f64 {
    mean_curvature_of(curve.geometry, curve.length, curve.area)
}

pub fn mean_curvature_of(geometry: Geometry, length: f64, area: f64) -> f64 {
    match geometry {
        Geometry::Euclidean => TAU / length,
        Geometry::Spherical => (TAU - area) / length,
        Geometry::Hyperbolic => (TAU + area) / length,
    }
}

/// A periodic sample sequence with its mean, e.g. `k(s)` against `k̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    pub params: Vec<f64>,
    pub values: Vec<f64>,
    pub mean: f64,
    pub period: f64,
}

impl CurvatureProfile {
    /// Curvature samples of `curve` against its Gauss-Bonnet average.
    pub fn of_curvature(curve: &SampledCurve) -> Self {
        CurvatureProfile {
            params: curve.param.clone(),
            values: curve.k.clone(),
            mean: average_curvature(curve),
            period: curve.period,
        }
    }

    /// Radius of curvature `R(α)` of a support oval against `R̄ = L/2π`.
    pub fn of_radius(curve: &SampledCurve) -> Self {
        CurvatureProfile {
            params: curve.param.clone(),
            values: curve.k.iter().map(|k| 1.0 / k).collect(),
            mean: curve.length / TAU,
            period: curve.period,
        }
    }

    pub fn default_tol(&self) -> f64 {
        CROSSING_TOL_REL * self.mean.abs().max(f64::MIN_POSITIVE)
    }

    pub fn deviations(&self) -> Vec<f64> {
        self.values.iter().map(|v| v - self.mean).collect()
    }

    fn param_at(&self, index: f64) -> f64 {
        let n = self.params.len();
        let i = index.floor() as usize % n;
        let frac = index - index.floor();
        let next = if i + 1 == n {
            self.params[0] + self.period
        } else {
            self.params[i + 1]
        };
        (self.params[i] + frac * (next - self.params[i])).rem_euclid(self.period)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,k,mean,deviation\n");
        for (p, v) in self.params.iter().zip(&self.values) {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e}\n",
                p,
                v,
                self.mean,
                v - self.mean
            ));
        }
        out
    }
}

/// Where a profile attains its mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanAttainment {
    /// Parameters of transversal crossings.
    pub crossings: Vec<f64>,
    /// Parameters of tangential touches (attained without a crossing).
    pub touches: Vec<f64>,
}

impl MeanAttainment {
    pub fn count(&self) -> usize {
        self.crossings.len()
    }

    /// All attainment points, touches included.
    pub fn attainment_count(&self) -> usize {
        self.crossings.len() + self.touches.len()
    }
}

/// Count transversal crossings of `values − mean`, with a `±tol` hysteresis
/// band; a profile that never leaves the band is degenerate (the mean is
/// attained everywhere, as on a circle).
pub fn count_mean_crossings(profile: &CurvatureProfile, tol: f64) -> Result<MeanAttainment> {
    let scan = scan_sign_changes(&profile.deviations(), tol).map_err(|e| match e {
        GeomError::AllBelowTolerance => GeomError::DegenerateProfile,
        other => other,
    })?;
    Ok(MeanAttainment {
        crossings: scan.changes.iter().map(|&x| profile.param_at(x)).collect(),
        touches: scan.touches.iter().map(|&x| profile.param_at(x)).collect(),
    })
}

/// `∮ N ds` of a plane curve, which for a support oval is the closure
/// integral `∫ R(α)(cos α, sin α) dα`; zero for an exactly closed curve.
pub fn closure_residual(curve: &SampledCurve) -> [f64; 2] {
    let mut acc = [0.0, 0.0];
    for i in 0..curve.len() {
        let nrm = curve.outward_normal(i);
        acc[0] += nrm.x * curve.weights[i];
        acc[1] += nrm.y * curve.weights[i];
    }
    acc
}

/// Parameters where `f(k(param))` vanishes: sign changes of `f(k_i)` on the
/// grid, refined by bisection on [`SampledCurve::curvature_at`].
pub fn curvature_level_roots<F: Fn(f64) -> f64>(curve: &SampledCurve, f: F) -> Result<Vec<f64>> {
    let values: Vec<f64> = curve.k.iter().map(|&k| f(k)).collect();
    let step = curve.step();
    let mut roots = Vec::new();
    for i in bracket_roots(&values) {
        let a = curve.param[i];
        let b = a + step;
        let g = |p: f64| f(curve.curvature_at(p.rem_euclid(curve.period)));
        let root = bisect(g, a, b, ROOT_TOL)?;
        roots.push(root.rem_euclid(curve.period));
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Smallest cyclic distance between two parameter values.
pub fn cyclic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ellipse_profile_bruteforce(a: f64, b: f64, n: usize) -> usize {
        // independent scan: dense evaluation of k(α) − k̄ using a
        // high-resolution trapezoid estimate of L
        let m = 1 << 16;
        let r = |t: f64| {
            let q = a * a * t.cos().powi(2) + b * b * t.sin().powi(2);
            a * a * b * b / q.powf(1.5)
        };
        let len: f64 = (0..m).map(|i| r(TAU * i as f64 / m as f64)).sum::<f64>() * TAU / m as f64;
        let kbar = TAU / len;
        let vals: Vec<f64> = (0..n)
            .map(|i| 1.0 / r(TAU * i as f64 / n as f64) - kbar)
            .collect();
        (0..n)
            .filter(|&i| vals[i].signum() != vals[(i + 1) % n].signum())
            .count()
    }

    #[test]
    fn unit_circle() {
        let c = build_oval(&SupportOval::circle(1.0, 256)).unwrap();
        assert!((c.length - TAU).abs() < 1e-12);
        assert!((c.area - PI).abs() < 1e-12);
        assert!(c.k.iter().all(|k| (k - 1.0).abs() < 1e-12));
        assert!((average_curvature(&c) - 1.0).abs() < 1e-12);
        c.validate().unwrap();
    }

    #[test]
    fn third_harmonic_wobble_is_not_convex() {
        // R = 1 − 1.6 cos 3α has min −0.6
        let r = SupportFunction::Fourier(vec![(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.2, 0.0)]);
        assert!((r.radius(0.0) + 0.6).abs() < 1e-12);
        let err = build_oval(&SupportOval::from_harmonics(
            &[(0, 1.0, 0.0), (3, 0.2, 0.0)],
            256,
        ));
        assert!(matches!(err, Err(GeomError::NonConvex { .. })));
    }

    #[test]
    fn second_harmonic_oval() {
        let c = build_oval(&SupportOval::from_harmonics(
            &[(0, 1.0, 0.0), (2, 0.05, 0.0)],
            256,
        ))
        .unwrap();
        assert!((c.length - TAU).abs() < 1e-12);
        let min_r = c.k.iter().map(|k| 1.0 / k).fold(f64::INFINITY, f64::min);
        assert!((min_r - 0.85).abs() < 1e-12);
        c.validate().unwrap();
    }

    #[test]
    fn degenerate_sampling() {
        assert!(matches!(
            build_oval(&SupportOval::circle(1.0, 8)),
            Err(GeomError::DegenerateSampling { got: 8, .. })
        ));
    }

    #[test]
    fn arc_length_and_curvature_are_consistent() {
        let c = build_oval(&SupportOval::from_harmonics(
            &[(0, 1.0, 0.0), (2, 0.04, 0.01), (3, -0.01, 0.02)],
            512,
        ))
        .unwrap();
        let numeric = cumulative_integral(&c.k.iter().map(|k| 1.0 / k).collect::<Vec<_>>(), TAU);
        for (a, b) in c.s.iter().zip(&numeric) {
            assert!((a - b).abs() < 1e-12);
        }
        // k·R = 1 sample-wise
        for (i, k) in c.k.iter().enumerate() {
            let r = c.support_function().unwrap().radius(c.param[i]);
            assert!((k * r - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn point_positions_follow_tangent() {
        // γ'(α) = R(α) T(α): check with finite differences of the samples
        let c = build_oval(&SupportOval::ellipse(2.0, 1.0, 1024)).unwrap();
        let d = diff1(&c.points, c.step());
        for i in 0..c.len() {
            let expect = c.tangents[i] / c.k[i];
            assert!((d[i] - expect).norm() < 1e-6);
        }
    }

    #[test]
    fn ellipse_has_four_crossings() {
        let c = build_oval(&SupportOval::ellipse(2.0, 1.0, 1024)).unwrap();
        let prof = CurvatureProfile::of_curvature(&c);
        let att = count_mean_crossings(&prof, prof.default_tol()).unwrap();
        assert_eq!(att.count(), ellipse_profile_bruteforce(2.0, 1.0, 1024));
        assert_eq!(att.count(), 4);
        assert!(att.touches.is_empty());
    }

    #[test]
    fn circle_profile_is_degenerate() {
        let c = build_oval(&SupportOval::circle(1.0, 128)).unwrap();
        let prof = CurvatureProfile::of_curvature(&c);
        assert_eq!(
            count_mean_crossings(&prof, prof.default_tol()),
            Err(GeomError::DegenerateProfile)
        );
    }

    #[test]
    fn mixed_harmonics_have_at_least_four_crossings() {
        let c = build_oval(&SupportOval::from_harmonics(
            &[(0, 1.0, 0.0), (2, 0.05, 0.0), (3, 0.01, 0.0)],
            1024,
        ))
        .unwrap();
        let prof = CurvatureProfile::of_curvature(&c);
        let att = count_mean_crossings(&prof, prof.default_tol()).unwrap();
        // brute force on the analytic radius
        let sf = c.support_function().unwrap();
        let rbar = c.length / TAU;
        let m = 100_000;
        let brute = (0..m)
            .filter(|&i| {
                let a = sf.radius(TAU * i as f64 / m as f64) - rbar;
                let b = sf.radius(TAU * (i + 1) as f64 / m as f64) - rbar;
                a.signum() != b.signum()
            })
            .count();
        assert_eq!(att.count(), brute);
        assert!(att.count() >= 4);
    }

    #[test]
    fn closure_residual_examples() {
        let c = build_oval(&SupportOval::circle(1.0, 1024)).unwrap();
        let r = closure_residual(&c);
        assert!(r[0].hypot(r[1]) < 1e-12);
        let c = build_oval(&SupportOval::ellipse(2.0, 1.0, 4096)).unwrap();
        let r = closure_residual(&c);
        assert!(r[0].hypot(r[1]) < 1e-8);
        let c = build_oval(&SupportOval::from_harmonics(
            &[
                (0, 1.0, 0.0),
                (1, 0.3, -0.2),
                (2, 0.02, 0.05),
                (4, 0.001, 0.0),
            ],
            64,
        ))
        .unwrap();
        let r = closure_residual(&c);
        assert!(r[0].hypot(r[1]) < 1e-13);
    }

    #[test]
    fn closure_residual_converges_quadratically_or_better() {
        // centrally symmetric ovals close exactly on even grids, so use one
        // with geometrically decaying harmonics of every order
        let terms: Vec<(usize, f64, f64)> = std::iter::once((0, 1.0, 0.0))
            .chain((2..90).map(|n| {
                (
                    n,
                    0.01 * 0.7f64.powi(n as i32),
                    0.005 * 0.7f64.powi(n as i32),
                )
            }))
            .collect();
        let res = |n| {
            let c = build_oval(&SupportOval::from_harmonics(&terms, n)).unwrap();
            let r = closure_residual(&c);
            r[0].hypot(r[1])
        };
        let (r16, r32, r64) = (res(16), res(32), res(64));
        assert!(r64 > 1e-12, "still above roundoff: {r64:e}");
        assert!(
            r16 / r32 >= 4.0 && r32 / r64 >= 4.0,
            "{r16:e} {r32:e} {r64:e}"
        );
    }

    #[test]
    fn isoperimetric_inequality_holds() {
        let c = build_oval(&SupportOval::ellipse(3.0, 1.0, 2048)).unwrap();
        assert!(c.length * c.length - 4.0 * PI * c.area > 0.0);
        // ellipse area is πab
        assert!((c.area - 3.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn plane_points_resample_path() {
        // clockwise ellipse samples get reoriented and match the support oval
        let n = 200;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let t = -TAU * i as f64 / n as f64;
                [2.0 * t.cos(), t.sin()]
            })
            .collect();
        let c = curve_from_plane_points(&pts, 1024, true).unwrap();
        let reference = build_oval(&SupportOval::ellipse(2.0, 1.0, 1024)).unwrap();
        assert!((c.length - reference.length).abs() < 1e-9);
        assert!((c.area - TAU).abs() < 1e-9);
        c.validate().unwrap();
        // a non-convex figure is rejected unless explicitly allowed
        let bean: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                let r = 1.0 + 0.4 * (2.0 * t).cos();
                [r * t.cos(), 0.6 * r * t.sin()]
            })
            .collect();
        assert!(matches!(
            curve_from_plane_points(&bean, 512, true),
            Err(GeomError::NonConvex { .. })
        ));
        assert!(curve_from_plane_points(&bean, 512, false).is_ok());
    }

    #[test]
    fn level_roots_are_refined() {
        let c = build_oval(&SupportOval::ellipse(2.0, 1.0, 256)).unwrap();
        let kbar = average_curvature(&c);
        let roots = curvature_level_roots(&c, |k| k - kbar).unwrap();
        assert_eq!(roots.len(), 4);
        let sf = c.support_function().unwrap();
        for r in roots {
            assert!((1.0 / sf.radius(r) - kbar).abs() < 1e-8);
        }
    }
}
