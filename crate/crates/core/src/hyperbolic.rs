//! Closed curves in the hyperbolic plane, modelled on the upper sheet of
//! `⟨x, x⟩ = −1` in Minkowski space with signature `(−, +, +)`.
//!
//! A curve with curvature `k = coth R` has equidistants with curvature
//! `coth(R + t)`, length `L cosh t + (2π + A) sinh t` and area
//! `−2π + L sinh t + (2π + A) cosh t`. The signed length vanishes at
//! `t = −coth⁻¹((2π + A)/L)`, which needs `(2π + A)/L > 1`. That is
//! guaranteed when `k > 1` everywhere (horocyclic convexity), and the four
//! point conclusion can fail without it.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::curve_model::{
    count_mean_crossings, CurvatureProfile, Geometry, MeanAttainment, SampledCurve, Vec3,
};
use crate::error::{GeomError, Result};
use crate::numerics::bisect;
use crate::surface::{
    assemble, check_areas, fan_area, fd_curvature, front_formula_check, interpolated_jet,
    outward_normals, polar_jet, project, propagate_surface, resample_by_arc_length,
    surface_lemma_check, ArcSamples, FrontFormulaReport, Jet, Perturbation, SurfaceFront,
};
use crate::wavefront::LemmaReport;

pub use crate::surface::minkowski;

/// `|k − 1|` below this counts as horocycle-like.
pub const HOROCYCLE_TOL: f64 = 1e-9;

pub type HyperbolicFront<'a> = SurfaceFront<'a>;

/// Local type of a curve by comparison of its curvature with 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureClass {
    /// `k > 1`: osculating curve is a circle.
    CircleLike,
    /// `k = 1`: osculating curve is a horocycle.
    HorocycleLike,
    /// `k < 1`: osculating curve is an equidistant of a geodesic.
    EquidistantLike,
}

impl CurvatureClass {
    pub fn of(k: f64) -> Self {
        if (k - 1.0).abs() <= HOROCYCLE_TOL {
            CurvatureClass::HorocycleLike
        } else if k > 1.0 {
            CurvatureClass::CircleLike
        } else {
            CurvatureClass::EquidistantLike
        }
    }
}

#[derive(Debug, Clone)]
pub struct HyperbolicCurve {
    /// Samples on the hyperboloid; `area` is from Gauss-Bonnet.
    pub curve: SampledCurve,
    /// Outward unit normals.
    pub nu: Vec<Vec3>,
    pub area_fan: f64,
    pub horocyclic_convex: bool,
    pub curvature_class: Vec<CurvatureClass>,
    reference: Vec3,
}

impl HyperbolicCurve {
    fn from_arc_samples(samples: ArcSamples) -> Result<Self> {
        let curve = assemble(Geometry::Hyperbolic, samples);
        let nu = outward_normals(&curve);
        let reference = project(Geometry::Hyperbolic, &curve.points.iter().sum::<Vec3>());
        let area_fan = fan_area(
            Geometry::Hyperbolic,
            &curve.points,
            &reference,
            curve.step(),
        );
        check_areas(curve.area, area_fan, false)?;
        let curvature_class: Vec<CurvatureClass> =
            curve.k.iter().map(|&k| CurvatureClass::of(k)).collect();
        let horocyclic_convex = curve.k.iter().all(|&k| k > 1.0 + HOROCYCLE_TOL);
        Ok(HyperbolicCurve {
            curve,
            nu,
            area_fan,
            horocyclic_convex,
            curvature_class,
            reference,
        })
    }

    fn from_jet<F: Fn(f64) -> Jet>(f: F, n: usize) -> Result<Self> {
        Self::from_arc_samples(resample_by_arc_length(Geometry::Hyperbolic, f, n)?)
    }

    /// Circle of radius `rho` about the vertex `(1, 0, 0)`.
    pub fn circle(rho: f64, n: usize) -> Result<Self> {
        Self::perturbed_circle(rho, &[], n)
    }

    /// `r(θ) = ρ + Σ ε cos(nθ + φ)` in geodesic polar coordinates.
    pub fn perturbed_circle(rho: f64, terms: &[Perturbation], n: usize) -> Result<Self> {
        let spread: f64 = terms.iter().map(|p| p.amp.abs()).sum();
        if !(rho.is_finite() && rho - spread > 0.0) {
            return Err(GeomError::InvalidSpec(format!(
                "radius {rho} with perturbation {spread} is not positive"
            )));
        }
        Self::from_jet(|t| polar_jet(Geometry::Hyperbolic, rho, terms, t), n)
    }

    /// Closed curve through arbitrary hyperboloid samples, interpolated and
    /// resampled at `n` points of equal arc length.
    pub fn from_samples(points: &[Vec3], n: usize) -> Result<Self> {
        if points.len() < 8 {
            return Err(GeomError::DegenerateSampling {
                got: points.len(),
                min: 8,
            });
        }
        for (i, p) in points.iter().enumerate() {
            let residual = (minkowski(p, p) + 1.0).abs();
            if residual > 1e-6 || p.x <= 0.0 {
                return Err(GeomError::OffManifold { index: i, residual });
            }
        }
        Self::from_jet(interpolated_jet(Geometry::Hyperbolic, points), n)
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

    pub fn area_residual(&self) -> f64 {
        (self.curve.area - self.area_fan).abs()
    }

    pub fn min_curvature(&self) -> (f64, f64) {
        let (i, k) = self
            .curve
            .k
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, k)| (i, *k))
            .unwrap();
        (k, self.curve.s[i])
    }

    /// Beltrami-Klein coordinates `(x₁/x₀, x₂/x₀)`.
    pub fn klein(&self) -> Vec<[f64; 2]> {
        self.curve
            .points
            .iter()
            .map(|p| [p.y / p.x, p.z / p.x])
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,x0,x1,x2,k\n");
        for i in 0..self.len() {
            let p = &self.curve.points[i];
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.curve.s[i], p.x, p.y, p.z, self.curve.k[i]
            ));
        }
        out
    }
}

/// Geodesic curvature of hyperboloid samples with unit Minkowski speed,
/// spaced `ds` apart, by fourth-order differences.
pub fn geodesic_curvature_h(points: &[Vec3], ds: f64) -> Result<Vec<f64>> {
    fd_curvature(Geometry::Hyperbolic, points, ds)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorocyclicReport {
    pub horocyclic_convex: bool,
    pub min_k: f64,
    /// Arc length at which the minimum is attained.
    pub min_k_at: f64,
}

pub fn check_horocyclic_convexity(curve: &HyperbolicCurve) -> HorocyclicReport {
    let (min_k, min_k_at) = curve.min_curvature();
    HorocyclicReport {
        horocyclic_convex: min_k > 1.0 + HOROCYCLE_TOL,
        min_k,
        min_k_at,
    }
}

/// Equidistant at distance `t`. Inward propagation of a curve that is not
/// horocyclically convex is refused once the front would develop cusps.
pub fn propagate_hyperbolic(curve: &HyperbolicCurve, t: f64) -> Result<HyperbolicFront<'_>> {
    if !curve.horocyclic_convex && t < 0.0 {
        let (c, s) = (t.cosh(), t.sinh());
        if curve.curve.k.iter().any(|k| c + k * s <= 0.0) {
            return Err(GeomError::NotHorocyclicallyConvex {
                min_k: curve.min_curvature().0,
            });
        }
    }
    propagate_surface(&curve.curve, &curve.nu, curve.reference, t)
}

pub fn hyperbolic_front_check(
    curve: &HyperbolicCurve,
    t_grid: &[f64],
) -> Result<FrontFormulaReport> {
    front_formula_check(&curve.curve, &curve.nu, curve.reference, t_grid)
}

/// Front curvature at the points where `k = k̄`, against `(2π + A_t)/L_t`.
pub fn hyperbolic_lemma_check(curve: &HyperbolicCurve, t_grid: &[f64]) -> Result<LemmaReport> {
    surface_lemma_check(&curve.curve, &curve.nu, curve.reference, t_grid)
}

#[derive(Debug, Clone)]
pub struct CollapseFront<'a> {
    pub front: HyperbolicFront<'a>,
    /// `t = −coth⁻¹(k̄)`.
    pub t: f64,
    pub mean_curvature: f64,
    /// Mean-curvature attainment on the base; `None` for a constant profile.
    pub attainment: Option<MeanAttainment>,
    /// False when the input was not horocyclically convex and was forced
    /// through; such results say nothing about the theorem.
    pub theorem_applies: bool,
}

impl CollapseFront<'_> {
    /// Cusp count, `None` when the front collapses to a point.
    pub fn cusp_count(&self) -> Option<usize> {
        self.attainment.as_ref().map(|_| self.front.cusps.len())
    }
}

/// Propagate inward until the signed length vanishes.
pub fn collapse_front(curve: &HyperbolicCurve, force: bool) -> Result<CollapseFront<'_>> {
    if !curve.horocyclic_convex && !force {
        return Err(GeomError::NotHorocyclicallyConvex {
            min_k: curve.min_curvature().0,
        });
    }
    let kbar = (TAU + curve.area()) / curve.length();
    if !(kbar > 1.0) {
        return Err(GeomError::CothDomain(kbar));
    }
    let t = -(1.0 / kbar).atanh();
    let mut front = propagate_surface(&curve.curve, &curve.nu, curve.reference, t)?;
    let profile = CurvatureProfile::of_curvature(&curve.curve);
    let attainment = match count_mean_crossings(&profile, profile.default_tol()) {
        Ok(a) => Some(a),
        Err(GeomError::DegenerateProfile) => {
            // every sample sits on a cusp; the sign pattern is roundoff
            front.cusps.clear();
            None
        }
        Err(e) => return Err(e),
    };
    Ok(CollapseFront {
        front,
        t,
        mean_curvature: kbar,
        attainment,
        theorem_applies: curve.horocyclic_convex,
    })
}

fn default_flat_deviation() -> f64 {
    0.05
}

/// A half-disc of radius `r` with its corners rounded by curvature ramps
/// and its diameter bent slightly outward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundedSemicircleSpec {
    pub r: f64,
    pub corner_scale: f64,
    #[serde(default = "default_flat_deviation")]
    pub flat_deviation: f64,
}

impl RoundedSemicircleSpec {
    pub fn new(r: f64, corner_scale: f64) -> Self {
        RoundedSemicircleSpec {
            r,
            corner_scale,
            flat_deviation: default_flat_deviation(),
        }
    }
}

/// Piecewise-linear curvature profile of half the curve, from the middle of
/// the arc to the middle of the flattened diameter.
#[derive(Debug, Clone)]
struct HalfProfile {
    /// `(start, length, k_start, k_end)` per piece.
    pieces: Vec<(f64, f64, f64, f64)>,
}

impl HalfProfile {
    fn new(arc: f64, flat: f64, spec: &RoundedSemicircleSpec, corner_k: f64) -> Self {
        let w = spec.corner_scale;
        let coth = 1.0 / spec.r.tanh();
        let d = spec.flat_deviation;
        let raw = [
            (arc, coth, coth),
            (w, coth, corner_k),
            (w, corner_k, corner_k),
            (w, corner_k, d),
            (flat, d, d),
        ];
        let mut start = 0.0;
        let pieces = raw
            .iter()
            .map(|&(len, a, b)| {
                let p = (start, len, a, b);
                start += len;
                p
            })
            .collect();
        HalfProfile { pieces }
    }

    fn length(&self) -> f64 {
        let last = self.pieces.last().unwrap();
        last.0 + last.1
    }

    fn k(&self, u: f64) -> f64 {
        for &(start, len, a, b) in &self.pieces {
            if u <= start + len {
                let f = ((u - start) / len).clamp(0.0, 1.0);
                return a + (b - a) * f;
            }
        }
        self.pieces.last().unwrap().3
    }

    fn total_curvature(&self) -> f64 {
        self.pieces.iter().map(|p| p.1 * (p.2 + p.3) / 2.0).sum()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.0).skip(1).collect()
    }
}

/// Frenet state `(x, T, ν)` in Minkowski space.
type Frame = [Vec3; 3];

fn frenet_rhs(f: &Frame, k: f64) -> Frame {
    [f[1], f[0] + f[2] * k, -f[1] * k]
}

fn axpy(f: &Frame, d: &Frame, h: f64) -> Frame {
    [f[0] + d[0] * h, f[1] + d[1] * h, f[2] + d[2] * h]
}

/// Classical RK4 on `[u0, u1]`, split at profile kinks and with steps small
/// against the local curvature.
fn advance(profile: &HalfProfile, mut f: Frame, u0: f64, u1: f64, kmax: f64) -> Frame {
    let mut cuts = vec![u0];
    cuts.extend(
        profile
            .breakpoints()
            .into_iter()
            .filter(|&b| b > u0 && b < u1),
    );
    cuts.push(u1);
    for w in cuts.windows(2) {
        let span = w[1] - w[0];
        let steps = ((span * kmax.max(1.0)) / 2e-3).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for j in 0..steps {
            let u = w[0] + j as f64 * h;
            let (ka, km, kb) = (profile.k(u), profile.k(u + 0.5 * h), profile.k(u + h));
            let k1 = frenet_rhs(&f, ka);
            let k2 = frenet_rhs(&axpy(&f, &k1, 0.5 * h), km);
            let k3 = frenet_rhs(&axpy(&f, &k2, 0.5 * h), km);
            let k4 = frenet_rhs(&axpy(&f, &k3, h), kb);
            for c in 0..3 {
                f[c] += (k1[c] + k2[c] * 2.0 + k3[c] * 2.0 + k4[c]) * (h / 6.0);
            }
        }
    }
    f
}

fn start_frame(r: f64) -> Frame {
    let x = Vec3::new(r.cosh(), r.sinh(), 0.0);
    let t = Vec3::new(0.0, 0.0, 1.0);
    // inward normal J(x × T)
    let c = x.cross(&t);
    [x, t, Vec3::new(-c.x, c.y, c.z)]
}

/// Build the half-curve and close it by reflection in the plane `x₂ = 0`,
/// which requires the end point to lie on that plane with tangent `±e₂`.
pub fn build_rounded_semicircle(spec: &RoundedSemicircleSpec, n: usize) -> Result<HyperbolicCurve> {
    let RoundedSemicircleSpec {
        r,
        corner_scale: w,
        flat_deviation: d,
    } = *spec;
    if !(r > 0.0 && w > 0.0 && d > 0.0 && r.is_finite() && w.is_finite() && d.is_finite()) {
        return Err(GeomError::InvalidSpec(format!(
            "rounded semicircle {spec:?}"
        )));
    }
    if n < 16 || !n.is_multiple_of(2) {
        return Err(GeomError::InvalidSpec(format!(
            "sample count {n} must be even and >= 16"
        )));
    }
    let coth = 1.0 / r.tanh();
    // the arc keeps the half-disc's quarter turn minus half a corner; the
    // corner curvature and the flat length are solved for
    let arc = PI * r.sinh() / 2.0 - 1.5 * w;
    if arc <= 0.0 {
        return Err(GeomError::InvalidSpec(format!(
            "corner_scale {w} too large for radius {r}"
        )));
    }
    let residual = |corner_k: f64, flat: f64| {
        let p = HalfProfile::new(arc, flat, spec, corner_k);
        let f = advance(&p, start_frame(r), 0.0, p.length(), corner_k);
        [f[0].z, f[1].y]
    };
    // three corner pieces turning by a right angle
    let mut u = [(FRAC_PI_2 - w * (coth + d) / 2.0) / (2.0 * w), r - 1.5 * w];
    if u[0] <= coth.max(d) || u[1] <= 0.0 {
        return Err(GeomError::InvalidSpec(format!(
            "corner_scale {w} too large for radius {r}"
        )));
    }
    let mut converged = false;
    for _ in 0..50 {
        let f0 = residual(u[0], u[1]);
        if f0[0].hypot(f0[1]) < 1e-12 {
            converged = true;
            break;
        }
        let eps = 1e-7 * u[0].max(1.0);
        let fa = residual(u[0] + eps, u[1]);
        let fb = residual(u[0], u[1] + 1e-7);
        let j = [
            [(fa[0] - f0[0]) / eps, (fb[0] - f0[0]) / 1e-7],
            [(fa[1] - f0[1]) / eps, (fb[1] - f0[1]) / 1e-7],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let da = (f0[0] * j[1][1] - f0[1] * j[0][1]) / det;
        let db = (j[0][0] * f0[1] - j[1][0] * f0[0]) / det;
        // damp steps that would flatten the corner or remove the flat arc
        let mut lambda = 1.0;
        while lambda > 1e-3 && (u[0] - lambda * da <= coth.max(d) || u[1] - lambda * db <= 0.0) {
            lambda *= 0.5;
        }
        u = [u[0] - lambda * da, u[1] - lambda * db];
    }
    if !converged {
        return Err(GeomError::NoConvergence(format!(
            "rounded semicircle closure for {spec:?}"
        )));
    }
    let kmax = u[0];
    let profile = HalfProfile::new(arc, u[1], spec, kmax);
    let half = profile.length();
    let length = 2.0 * half;
    let ds = length / n as f64;
    let mut upper = Vec::with_capacity(n / 2 + 1);
    let mut f = start_frame(r);
    upper.push((f, profile.k(0.0)));
    for j in 1..=n / 2 {
        let u1 = if j == n / 2 { half } else { j as f64 * ds };
        f = advance(&profile, f, (j - 1) as f64 * ds, u1, kmax);
        upper.push((f, profile.k(u1)));
    }
    let reflect = |v: &Vec3| Vec3::new(v.x, v.y, -v.z);
    let mut samples = ArcSamples {
        points: Vec::with_capacity(n),
        tangents: Vec::with_capacity(n),
        k: Vec::with_capacity(n),
        length,
        // the trapezoid rule loses accuracy at the kinks of the profile
        total_curvature: Some(2.0 * profile.total_curvature()),
    };
    for j in 0..n {
        let (pt, tg, k) = if j <= n / 2 {
            let (f, k) = &upper[j];
            (f[0], f[1], *k)
        } else {
            let (f, k) = &upper[n - j];
            (reflect(&f[0]), -reflect(&f[1]), *k)
        };
        samples.points.push(project(Geometry::Hyperbolic, &pt));
        samples.tangents.push(tg);
        samples.k.push(k);
    }
    HyperbolicCurve::from_arc_samples(samples)
}

/// `k̄ = π(1 + cosh r)/(2r + π sinh r)` of the exact half-disc.
pub fn semicircle_mean_curvature(r: f64) -> f64 {
    PI * (1.0 + r.cosh()) / (2.0 * r + PI * r.sinh())
}

/// `coth r − k̄(r)`: negative while the half-disc's average curvature
/// exceeds the curvature of its arc.
pub fn threshold_gap(r: f64) -> f64 {
    1.0 / r.tanh() - semicircle_mean_curvature(r)
}

/// Radius above which the half-disc's average curvature falls below
/// `coth r`, by bisection of [`threshold_gap`] on `[0.5, 5]`.
pub fn threshold_radius(tol: f64) -> Result<f64> {
    bisect(threshold_gap, 0.5, 5.0, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub spec: RoundedSemicircleSpec,
    pub length: f64,
    pub area: f64,
    pub mean_curvature: f64,
    pub semicircle_mean_curvature: f64,
    pub coth_r: f64,
    pub mean_below_coth: bool,
    pub min_k: f64,
    pub max_k: f64,
    pub convex: bool,
    pub horocyclic_convex: bool,
    pub crossings: Vec<f64>,
    pub touches: Vec<f64>,
    pub attainment_count: usize,
    /// Convex, yet the average curvature is attained fewer than four times.
    pub counterexample: bool,
}

pub fn counterexample_verdict(
    spec: &RoundedSemicircleSpec,
    n: usize,
) -> Result<CounterexampleReport> {
    let c = build_rounded_semicircle(spec, n)?;
    let profile = CurvatureProfile::of_curvature(&c.curve);
    let att = count_mean_crossings(&profile, profile.default_tol())?;
    let (min_k, _) = c.min_curvature();
    let max_k = c.curve.k.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let coth_r = 1.0 / spec.r.tanh();
    let convex = min_k > 0.0;
    let attainment_count = att.attainment_count();
    Ok(CounterexampleReport {
        spec: *spec,
        length: c.length(),
        area: c.area(),
        mean_curvature: profile.mean,
        semicircle_mean_curvature: semicircle_mean_curvature(spec.r),
        coth_r,
        mean_below_coth: profile.mean < coth_r,
        min_k,
        max_k,
        convex,
        horocyclic_convex: c.horocyclic_convex,
        crossings: att.crossings,
        touches: att.touches,
        attainment_count,
        counterexample: convex && attainment_count < 4,
    })
}
