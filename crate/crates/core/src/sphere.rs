//! Closed curves on the unit sphere.
//!
//! The equidistant at distance `t` of a curve with geodesic curvature
//! `k = cot R` has curvature `cot(R + t)`. Its length and area are
//! `L_t = L cos t + (2π − A) sin t` and `A_t = 2π + L sin t − (2π − A) cos t`,
//! so at `tan t = (2π − A)/L` the front bisects the sphere and its average
//! curvature vanishes.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::curve_model::{Geometry, SampledCurve, Vec3};
use crate::error::{GeomError, Result};
use crate::numerics::{diff1, diff2, diff3};
use crate::surface::{
    assemble, check_areas, fan_area, fd_curvature, front_formula_check, interpolated_jet,
    outward_normals, polar_jet, propagate_surface, resample_by_arc_length, surface_lemma_check,
    ArcSamples, FrontFormulaReport, Jet, Perturbation, SignChanges, SurfaceFront,
};
use crate::wavefront::LemmaReport;

/// Values of geodesic curvature below this are treated as zero when
/// counting inflections.
pub const INFLECTION_FLOOR: f64 = 1e-8;
/// Smallest admissible `|γ' × γ''|` in the Frenet frame.
pub const FRENET_FLOOR: f64 = 1e-8;
/// Tolerance for an area-bisecting curve.
pub const BISECTION_TOL: f64 = 1e-6;

pub type SphereFront<'a> = SurfaceFront<'a>;

/// A closed curve on the unit sphere sampled at equal arc length.
#[derive(Debug, Clone)]
pub struct SphereCurve {
    /// Samples, tangents, geodesic curvature; `area` is from Gauss-Bonnet.
    pub curve: SampledCurve,
    /// Outward unit normals, tangent to the sphere.
    pub nu: Vec<Vec3>,
    /// Area from the triangle fan, reduced to agree with Gauss-Bonnet
    /// modulo 4π.
    pub area_fan: f64,
    /// A pole whose open hemisphere contains the curve, if one was found.
    pub hemisphere_center: Option<Vec3>,
    /// Spherical diameter; a lower bound limited by the sampling.
    pub diameter: f64,
    reference: Vec3,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < PI {
        Ok(())
    } else {
        Err(GeomError::InvalidSpec(format!(
            "spherical radius {rho} outside (0, pi)"
        )))
    }
}

/// Pole of an open hemisphere containing every point, by the perceptron
/// update `w ← w + x` on the worst point.
pub(crate) fn hemisphere_center(points: &[Vec3]) -> Option<Vec3> {
    let mut w: Vec3 = points.iter().sum();
    if w.norm() < 1e-12 {
        w = points[0];
    }
    for _ in 0..20_000 {
        let wn = w.normalize();
        let (i, m) = points
            .iter()
            .enumerate()
            .map(|(i, x)| (i, wn.dot(x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if m > 1e-9 {
            return Some(wn);
        }
        w += points[i];
    }
    None
}

/// A fan apex well away from the curve for curves that wrap the sphere.
fn far_point(points: &[Vec3]) -> Vec3 {
    let mut candidates = vec![];
    for axis in [Vec3::x(), Vec3::y(), Vec3::z()] {
        candidates.push(axis);
        candidates.push(-axis);
    }
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                candidates.push(Vec3::new(sx, sy, sz).normalize());
            }
        }
    }
    candidates
        .into_iter()
        .max_by(|a, b| {
            let da = points
                .iter()
                .map(|x| (x - a).norm())
                .fold(f64::INFINITY, f64::min);
            let db = points
                .iter()
                .map(|x| (x - b).norm())
                .fold(f64::INFINITY, f64::min);
            da.total_cmp(&db)
        })
        .unwrap()
}

fn angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Largest distance between samples: a coarse all-pairs search followed by
/// hill climbing on the full grid.
pub(crate) fn spherical_diameter(points: &[Vec3]) -> f64 {
    let n = points.len();
    let stride = (n / 512).max(1);
    let mut best = (0, 0, 0.0);
    for i in (0..n).step_by(stride) {
        for j in (i..n).step_by(stride) {
            let d = angle(&points[i], &points[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let (mut i, mut j, mut d) = best;
    loop {
        let mut improved = false;
        for (di, dj) in [(1, 0), (n - 1, 0), (0, 1), (0, n - 1)] {
            let (a, b) = ((i + di) % n, (j + dj) % n);
            let e = angle(&points[a], &points[b]);
            if e > d {
                (i, j, d) = (a, b, e);
                improved = true;
            }
        }
        if !improved {
            return d;
        }
    }
}

impl SphereCurve {
    fn from_arc_samples(samples: ArcSamples) -> Result<Self> {
        let curve = assemble(Geometry::Spherical, samples);
        let nu = outward_normals(&curve);
        let hemisphere_center = hemisphere_center(&curve.points);
        let reference = hemisphere_center.unwrap_or_else(|| far_point(&curve.points));
        let fan = fan_area(Geometry::Spherical, &curve.points, &reference, curve.step());
        // a curve around a pole can sit in the opposite hemisphere, where the
        // fan measures the complementary region; compare modulo 4π
        check_areas(curve.area, fan, true)?;
        let area_fan = curve.area - crate::surface::wrap_4pi(curve.area - fan);
        let diameter = spherical_diameter(&curve.points);
        Ok(SphereCurve {
            curve,
            nu,
            area_fan,
            hemisphere_center,
            diameter,
            reference,
        })
    }

    pub(crate) fn from_jet<F: Fn(f64) -> Jet>(f: F, n: usize) -> Result<Self> {
        Self::from_arc_samples(resample_by_arc_length(Geometry::Spherical, f, n)?)
    }

    /// Circle of spherical radius `rho` about the north pole.
    pub fn circle(rho: f64, n: usize) -> Result<Self> {
        Self::perturbed_circle(rho, &[], n)
    }

    /// `r(θ) = ρ + Σ ε cos(nθ + φ)` in geodesic polar coordinates about the
    /// north pole.
    pub fn perturbed_circle(rho: f64, terms: &[Perturbation], n: usize) -> Result<Self> {
        check_rho(rho)?;
        let spread: f64 = terms.iter().map(|p| p.amp.abs()).sum();
        check_rho(rho - spread)?;
        check_rho(rho + spread)?;
        Self::from_jet(|t| polar_jet(Geometry::Spherical, rho, terms, t), n)
    }

    /// Tennis-ball seam `(a cos θ + b cos 3θ, a sin θ − b sin 3θ, 2√(ab) sin 2θ)`
    /// with `a = 1 − b`. A rotation by π/2 about the z-axis composed with
    /// the reflection `z ↦ −z` swaps its two sides, so it bisects the area.
    pub fn tennis_ball(b: f64, n: usize) -> Result<Self> {
        if !(b > 0.0 && b < 0.5) {
            return Err(GeomError::InvalidSpec(format!(
                "seam parameter {b} outside (0, 1/2)"
            )));
        }
        let a = 1.0 - b;
        let c = 2.0 * (a * b).sqrt();
        Self::from_jet(
            |t| {
                let (s1, c1) = t.sin_cos();
                let (s2, c2) = (2.0 * t).sin_cos();
                let (s3, c3) = (3.0 * t).sin_cos();
                Jet {
                    x: Vec3::new(a * c1 + b * c3, a * s1 - b * s3, c * s2),
                    d1: Vec3::new(-a * s1 - 3.0 * b * s3, a * c1 - 3.0 * b * c3, 2.0 * c * c2),
                    d2: Vec3::new(
                        -a * c1 - 9.0 * b * c3,
                        -a * s1 + 9.0 * b * s3,
                        -4.0 * c * s2,
                    ),
                }
            },
            n,
        )
    }

    /// Closed curve through arbitrary samples on the sphere, interpolated
    /// trigonometrically and resampled at `n` points of equal arc length.
    pub fn from_samples(points: &[Vec3], n: usize) -> Result<Self> {
        if points.len() < 8 {
            return Err(GeomError::DegenerateSampling {
                got: points.len(),
                min: 8,
            });
        }
        for (i, p) in points.iter().enumerate() {
            let residual = (p.norm() - 1.0).abs();
            if residual > 1e-6 {
                return Err(GeomError::OffManifold { index: i, residual });
            }
        }
        Self::from_jet(interpolated_jet(Geometry::Spherical, points), n)
    }

    pub fn len(&self) -> usize {
        self.curve.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curve.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.curve.length
    }

    pub fn area(&self) -> f64 {
        self.curve.area
    }

    pub fn ds(&self) -> f64 {
        self.curve.step()
    }

    /// Gauss-Bonnet area against the triangle fan.
    pub fn area_residual(&self) -> f64 {
        (self.curve.area - self.area_fan).abs()
    }

    pub fn is_convex(&self) -> bool {
        self.curve.k.iter().all(|&k| k > 0.0)
    }

    pub fn to_csv(&self) -> Result<String> {
        let tau = torsion(self)?;
        let mut out = String::from("s,x,y,z,k_g,tau\n");
        for i in 0..self.len() {
            let p = &self.curve.points[i];
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.curve.s[i], p.x, p.y, p.z, self.curve.k[i], tau[i]
            ));
        }
        Ok(out)
    }
}

/// Geodesic curvature `⟨γ'', γ × γ'⟩` of arc-length samples spaced `ds`
/// apart, by fourth-order differences.
pub fn geodesic_curvature(points: &[Vec3], ds: f64) -> Result<Vec<f64>> {
    fd_curvature(Geometry::Spherical, points, ds)
}

/// Equidistant at spherical distance `t` along the outward normals.
pub fn propagate_sphere(curve: &SphereCurve, t: f64) -> Result<SphereFront<'_>> {
    propagate_surface(&curve.curve, &curve.nu, curve.reference, t)
}

/// Compare measured fronts with the closed forms over a grid of times.
pub fn sphere_front_check(curve: &SphereCurve, t_grid: &[f64]) -> Result<FrontFormulaReport> {
    front_formula_check(&curve.curve, &curve.nu, curve.reference, t_grid)
}

/// Front curvature at the points where `k_g = k̄`, against `(2π − A_t)/L_t`.
pub fn sphere_lemma_check(curve: &SphereCurve, t_grid: &[f64]) -> Result<LemmaReport> {
    surface_lemma_check(&curve.curve, &curve.nu, curve.reference, t_grid)
}

#[derive(Debug, Clone)]
pub struct EquatorialFront<'a> {
    pub front: SphereFront<'a>,
    /// `t = atan((2π − A)/L)`.
    pub t: f64,
    /// `|A_t − 2π|` with `A_t` measured on the front.
    pub area_error: f64,
    /// Sign changes of the front's geodesic curvature.
    pub inflections: SignChanges,
}

/// Propagate to the time at which the front bisects the sphere and count
/// its inflections.
pub fn equatorial_front(curve: &SphereCurve) -> Result<EquatorialFront<'_>> {
    let t = ((TAU - curve.area()) / curve.length()).atan();
    let front = propagate_sphere(curve, t)?;
    let area_error = (front.area - TAU).abs();
    let inflections = SignChanges::scan(&front.curvature_formula(), curve.ds(), INFLECTION_FLOOR)?;
    Ok(EquatorialFront {
        front,
        t,
        area_error,
        inflections,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub t: f64,
    /// `min_s (cot t + k_g(s))`; positive means no cusp.
    pub cusp_margin: f64,
    pub regular: bool,
    pub diameter: f64,
    /// `t₁ = π − d/2`, the first time two points of the front can meet.
    pub self_tangency_time: f64,
    pub embed_margin: f64,
    pub embedded: bool,
}

/// Regularity and embeddedness of the front at time `t ∈ (0, π/2)`.
pub fn check_regular_embedded(curve: &SphereCurve, t: f64) -> Result<EmbeddingReport> {
    if !(t > 0.0 && t < FRAC_PI_2) {
        return Err(GeomError::InvalidSpec(format!(
            "time {t} outside (0, pi/2)"
        )));
    }
    if curve.hemisphere_center.is_none() {
        return Err(GeomError::NotInHemisphere);
    }
    let cot = 1.0 / t.tan();
    let cusp_margin = curve
        .curve
        .k
        .iter()
        .map(|k| cot + k)
        .fold(f64::INFINITY, f64::min);
    let self_tangency_time = PI - curve.diameter / 2.0;
    let embed_margin = self_tangency_time - t;
    Ok(EmbeddingReport {
        t,
        cusp_margin,
        regular: cusp_margin > 0.0,
        diameter: curve.diameter,
        self_tangency_time,
        embed_margin,
        embedded: curve.diameter < PI && embed_margin > 0.0,
    })
}

/// Inflections of an area-bisecting curve.
pub fn tennis_ball_check(curve: &SphereCurve) -> Result<SignChanges> {
    if (curve.area() - TAU).abs() > BISECTION_TOL {
        return Err(GeomError::NotBisecting(curve.area()));
    }
    SignChanges::scan(&curve.curve.k, curve.ds(), INFLECTION_FLOOR)
}

/// Torsion `det(γ', γ'', γ''')/|γ' × γ''|²` of the curve as a space curve,
/// right-handed Frenet convention.
pub fn torsion(curve: &SphereCurve) -> Result<Vec<f64>> {
    let h = curve.ds();
    let pts = &curve.curve.points;
    let (d1, d2, d3) = (diff1(pts, h), diff2(pts, h), diff3(pts, h));
    let mut out = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        let b = d1[i].cross(&d2[i]);
        let m = b.norm();
        if !(m > FRENET_FLOOR) {
            return Err(GeomError::FrenetBreakdown(m));
        }
        out.push(b.dot(&d3[i]) / (m * m));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorsionReport {
    pub integral: f64,
    pub max_abs: f64,
    pub sign_changes: SignChanges,
}

/// Roundoff in a third difference grows like `ε/h³`; stay well above it.
fn torsion_floor(h: f64) -> f64 {
    1e-6_f64.max(100.0 * f64::EPSILON / (h * h * h))
}

/// Total torsion and torsion sign changes.
pub fn total_torsion(curve: &SphereCurve) -> Result<TorsionReport> {
    let tau = torsion(curve)?;
    let h = curve.ds();
    Ok(TorsionReport {
        integral: tau.iter().sum::<f64>() * h,
        max_abs: tau.iter().fold(0.0, |m, v| m.max(v.abs())),
        sign_changes: SignChanges::scan(&tau, h, torsion_floor(h))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn wobble(n: usize) -> SphereCurve {
        SphereCurve::perturbed_circle(
            FRAC_PI_4,
            &[Perturbation {
                n: 3,
                amp: 0.02,
                phase: 0.4,
            }],
            n,
        )
        .unwrap()
    }

    #[test]
    fn circle_curvature_examples() {
        let c = SphereCurve::circle(FRAC_PI_2, 256).unwrap();
        assert!(c.curve.k.iter().all(|k| k.abs() < 1e-12));
        let c = SphereCurve::circle(FRAC_PI_4, 256).unwrap();
        assert!(c.curve.k.iter().all(|k| (k - 1.0).abs() < 1e-12));
        let c = SphereCurve::circle(PI / 3.0, 1024).unwrap();
        assert!(c
            .curve
            .k
            .iter()
            .all(|k| (k - 0.577_350_269_189_625_8).abs() < 1e-12));
        let fd = geodesic_curvature(&c.curve.points, c.ds()).unwrap();
        assert!(fd.iter().all(|k| (k - 1.0 / (PI / 3.0).tan()).abs() < 1e-8));
        // area of a cap of radius ρ is 2π(1 − cos ρ)
        assert!((c.area() - PI).abs() < 1e-12);
        assert!(c.area_residual() < 1e-9);
        assert!((c.diameter - 2.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn non_unit_speed_is_rejected() {
        let c = SphereCurve::circle(1.0, 256).unwrap();
        assert!(matches!(
            geodesic_curvature(&c.curve.points, 1.01 * c.ds()),
            Err(GeomError::BadParametrization(_))
        ));
    }

    #[test]
    fn circle_fronts() {
        let c = SphereCurve::circle(FRAC_PI_4, 512).unwrap();
        let f = propagate_sphere(&c, FRAC_PI_4).unwrap();
        assert!((f.signed_length - TAU).abs() < 1e-12);
        assert!(f.curvature_formula().iter().all(|k| k.abs() < 1e-12));
        assert!(f.points.iter().all(|p| p.z.abs() < 1e-12));
        let c = SphereCurve::circle(PI / 6.0, 512).unwrap();
        let f = propagate_sphere(&c, -PI / 6.0).unwrap();
        assert!(f.signed_length.abs() < 1e-12);
        assert!(f.points.iter().all(|p| (p - Vec3::z()).norm() < 1e-12));
    }

    #[test]
    fn generic_front_formulas_and_defect() {
        let c = wobble(2048);
        let grid: Vec<f64> = (0..11).map(|i| -0.3 + 0.1 * i as f64).collect();
        let r = sphere_front_check(&c, &grid).unwrap();
        assert!(r.max_length_rel_dev < 1e-9, "{}", r.max_length_rel_dev);
        assert!(r.max_area_rel_dev < 1e-6, "{}", r.max_area_rel_dev);
        assert!(r.defect_rel_spread < 1e-6, "{}", r.defect_rel_spread);
        let fine: Vec<f64> = (0..5).map(|i| 0.3 + 1e-3 * i as f64).collect();
        let r = sphere_front_check(&c, &fine).unwrap();
        assert!(r.max_rate_dev < 1e-5, "{}", r.max_rate_dev);
    }

    #[test]
    fn measured_front_curvature_matches_cot() {
        let c = wobble(2048);
        let f = propagate_sphere(&c, 0.3).unwrap();
        let m = f.measured_curvature();
        let e = f.curvature_formula();
        for i in (0..c.len()).step_by(37) {
            assert!((m[i] - e[i]).abs() < 1e-7);
        }
    }

    #[test]
    fn semigroup() {
        let c = wobble(1024);
        let once = propagate_sphere(&c, 0.5).unwrap();
        let twice = propagate_sphere(&c, 0.2).unwrap().propagate(0.3).unwrap();
        assert!(once.max_distance(&twice) < 1e-8);
        assert!((once.area - twice.area).abs() < 1e-10);
    }

    #[test]
    fn lemma_analog() {
        let c = wobble(2048);
        let r = sphere_lemma_check(&c, &[-0.3, -0.1, 0.2, 0.5, 0.7]).unwrap();
        assert_eq!(r.attainment_params.len(), 6);
        assert!(r.max_deviation < 1e-6, "{}", r.max_deviation);
    }

    #[test]
    fn equatorial_examples() {
        let rho = 0.6;
        let c = SphereCurve::circle(rho, 512).unwrap();
        let e = equatorial_front(&c).unwrap();
        assert!((e.t - (FRAC_PI_2 - rho)).abs() < 1e-12);
        assert_eq!(e.inflections, SignChanges::Degenerate);
        let c = wobble(2048);
        let e = equatorial_front(&c).unwrap();
        assert!(e.area_error < 1e-6);
        assert!(e.inflections.count().unwrap() >= 4);
        let r = check_regular_embedded(&c, e.t).unwrap();
        assert!(r.regular && r.embedded);
    }

    #[test]
    fn embedding_examples() {
        let c = SphereCurve::circle(FRAC_PI_4, 512).unwrap();
        let r = check_regular_embedded(&c, FRAC_PI_4).unwrap();
        assert!(r.regular && r.embedded);
        assert!((r.diameter - FRAC_PI_2).abs() < 1e-9);
        assert!((r.self_tangency_time - (PI - FRAC_PI_4)).abs() < 1e-9);
        let t = SphereCurve::tennis_ball(0.3, 512).unwrap();
        assert!(t.hemisphere_center.is_none());
        assert_eq!(
            check_regular_embedded(&t, 0.5),
            Err(GeomError::NotInHemisphere)
        );
    }

    #[test]
    fn tennis_ball() {
        let c = SphereCurve::tennis_ball(0.3, 2048).unwrap();
        assert!((c.area() - TAU).abs() < 1e-9);
        assert!(c.area_residual() < 1e-8);
        let inf = tennis_ball_check(&c).unwrap();
        // independent oracle: sign of det(γ, γ', γ'') on a dense θ grid
        let (a, b) = (0.7f64, 0.3);
        let cc = 2.0 * (a * b).sqrt();
        let m = 100_000;
        let sign = |t: f64| {
            let x = Vec3::new(
                a * t.cos() + b * (3.0 * t).cos(),
                a * t.sin() - b * (3.0 * t).sin(),
                cc * (2.0 * t).sin(),
            );
            let d1 = Vec3::new(
                -a * t.sin() - 3.0 * b * (3.0 * t).sin(),
                a * t.cos() - 3.0 * b * (3.0 * t).cos(),
                2.0 * cc * (2.0 * t).cos(),
            );
            let d2 = Vec3::new(
                -a * t.cos() - 9.0 * b * (3.0 * t).cos(),
                -a * t.sin() + 9.0 * b * (3.0 * t).sin(),
                -4.0 * cc * (2.0 * t).sin(),
            );
            x.dot(&d1.cross(&d2)).signum()
        };
        let brute = (0..m)
            .filter(|&i| sign(TAU * i as f64 / m as f64) != sign(TAU * (i + 1) as f64 / m as f64))
            .count();
        assert_eq!(inf.count(), Some(brute));
        assert_eq!(brute, 4);
        let g = SphereCurve::circle(FRAC_PI_2, 256).unwrap();
        assert_eq!(tennis_ball_check(&g).unwrap(), SignChanges::Degenerate);
        let cap = SphereCurve::circle(0.5, 256).unwrap();
        assert!(matches!(
            tennis_ball_check(&cap),
            Err(GeomError::NotBisecting(_))
        ));
    }

    #[test]
    fn torsion_matches_spherical_identity() {
        // on the unit sphere τ = k_g'/(1 + k_g²)
        let c = wobble(2048);
        let tau = torsion(&c).unwrap();
        let dk = diff1(&c.curve.k, c.ds());
        for i in (0..c.len()).step_by(41) {
            let k = c.curve.k[i];
            assert!(
                (tau[i] - dk[i] / (1.0 + k * k)).abs() < 1e-6,
                "{} {}",
                tau[i],
                dk[i]
            );
        }
        let r = total_torsion(&c).unwrap();
        assert!(r.integral.abs() < 1e-6);
        assert_eq!(r.sign_changes.count(), Some(6));
        let circle = SphereCurve::circle(0.8, 1024).unwrap();
        let r = total_torsion(&circle).unwrap();
        assert!(r.integral.abs() < 1e-9);
        assert_eq!(r.sign_changes, SignChanges::Degenerate);
    }

    #[test]
    fn samples_path_matches_analytic_circle() {
        let pts: Vec<Vec3> = (0..40)
            .map(|i| {
                let t = TAU * i as f64 / 40.0;
                Vec3::new(
                    0.6_f64.sin() * t.cos(),
                    0.6_f64.sin() * t.sin(),
                    0.6_f64.cos(),
                )
            })
            .collect();
        let c = SphereCurve::from_samples(&pts, 256).unwrap();
        assert!(c
            .curve
            .k
            .iter()
            .all(|k| (k - 1.0 / 0.6_f64.tan()).abs() < 1e-10));
        c.curve.validate().unwrap();
    }
}
