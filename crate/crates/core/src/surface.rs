//! Machinery shared by curves on the unit sphere and on the hyperboloid.
//!
//! Both surfaces are quadrics in R³ whose geodesics are cut out by planes
//! through the origin, so tangents, geodesic curvature and the equidistant
//! construction have the same algebraic shape. The only differences are the
//! ambient inner product and whether the front moves along `cos/sin` or
//! `cosh/sinh`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::curve_model::{curvature_level_roots, Geometry, SampledCurve, Vec3, MIN_SAMPLES};
use crate::error::{GeomError, Result};
use crate::numerics::{diff1, diff2, gauss_legendre, interp_periodic, TrigInterpolant};
use crate::sturm_hurwitz::scan_sign_changes;
use crate::wavefront::{attainment_params, LemmaReport, LemmaRow};

/// Speed tolerance for samples that claim to be arc-length parametrized.
pub const SPEED_TOL: f64 = 1e-6;
/// Largest allowed gap between the Gauss-Bonnet and triangle-fan areas.
pub const AREA_TOL: f64 = 1e-5;

/// Lorentzian product with signature `(-, +, +)`.
pub fn minkowski(a: &Vec3, b: &Vec3) -> f64 {
    -a.x * b.x + a.y * b.y + a.z * b.z
}

pub(crate) fn inner(g: Geometry, a: &Vec3, b: &Vec3) -> f64 {
    match g {
        Geometry::Hyperbolic => minkowski(a, b),
        _ => a.dot(b),
    }
}

pub(crate) fn norm(g: Geometry, v: &Vec3) -> f64 {
    inner(g, v, v).max(0.0).sqrt()
}

pub(crate) fn det(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    a.dot(&b.cross(c))
}

/// Put a point back on the model surface.
pub(crate) fn project(g: Geometry, x: &Vec3) -> Vec3 {
    match g {
        Geometry::Hyperbolic => x / (-minkowski(x, x)).sqrt(),
        _ => x.normalize(),
    }
}

/// Radial perturbation `ε·cos(nθ + φ)` of a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub n: usize,
    pub amp: f64,
    #[serde(default)]
    pub phase: f64,
}

/// `(r, r', r'')` of `ρ + Σ ε cos(nθ + φ)`.
pub(crate) fn polar_radius(rho: f64, terms: &[Perturbation], theta: f64) -> (f64, f64, f64) {
    let mut r = (rho, 0.0, 0.0);
    for p in terms {
        let m = p.n as f64;
        let (s, c) = (m * theta + p.phase).sin_cos();
        r.0 += p.amp * c;
        r.1 -= p.amp * m * s;
        r.2 -= p.amp * m * m * c;
    }
    r
}

/// Position with first and second parameter derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jet {
    pub x: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
}

/// Polar curve around the model's base point: the sphere's north pole or
/// the hyperboloid's vertex.
pub(crate) fn polar_jet(g: Geometry, rho: f64, terms: &[Perturbation], theta: f64) -> Jet {
    let (r, r1, r2) = polar_radius(rho, terms, theta);
    let (st, ct) = theta.sin_cos();
    // radial profile a(r) and axial profile b(r): sin/cos or sinh/cosh
    let (a, da, b, db, sign) = match g {
        Geometry::Hyperbolic => (r.sinh(), r.cosh(), r.cosh(), r.sinh(), 1.0),
        _ => (r.sin(), r.cos(), r.cos(), -r.sin(), -1.0),
    };
    // a'' = sign·a and b'' = sign·b
    let pack = |axial: f64, u: f64, v: f64| match g {
        Geometry::Hyperbolic => Vec3::new(axial, u, v),
        _ => Vec3::new(u, v, axial),
    };
    let f = pack(b, a * ct, a * st);
    let f_r = pack(db, da * ct, da * st);
    let f_t = pack(0.0, -a * st, a * ct);
    let f_rr = f * sign;
    let f_rt = pack(0.0, -da * st, da * ct);
    let f_tt = pack(0.0, -a * ct, -a * st);
    Jet {
        x: f,
        d1: f_r * r1 + f_t,
        d2: f_rr * (r1 * r1) + f_rt * (2.0 * r1) + f_r * r2 + f_tt,
    }
}

/// Closed curve through given points, interpolated trigonometrically in the
/// sample index and pushed back onto the model surface.
pub(crate) fn interpolated_jet(g: Geometry, points: &[Vec3]) -> impl Fn(f64) -> Jet {
    let coords: Vec<TrigInterpolant> = (0..3)
        .map(|c| TrigInterpolant::new(&points.iter().map(|p| p[c]).collect::<Vec<_>>()))
        .collect();
    let q_sign = if g == Geometry::Hyperbolic { -1.0 } else { 1.0 };
    move |theta| {
        let e: Vec<(f64, f64, f64)> = coords.iter().map(|c| c.eval2(theta)).collect();
        let y = Vec3::new(e[0].0, e[1].0, e[2].0);
        let y1 = Vec3::new(e[0].1, e[1].1, e[2].1);
        let y2 = Vec3::new(e[0].2, e[1].2, e[2].2);
        let q = |a: &Vec3, b: &Vec3| q_sign * inner(g, a, b);
        let qq = q(&y, &y);
        let q1 = 2.0 * q(&y, &y1);
        let q2 = 2.0 * q(&y1, &y1) + 2.0 * q(&y, &y2);
        let g0 = qq.powf(-0.5);
        let g1 = -0.5 * qq.powf(-1.5) * q1;
        let g2 = 0.75 * qq.powf(-2.5) * q1 * q1 - 0.5 * qq.powf(-1.5) * q2;
        Jet {
            x: y * g0,
            d1: y * g1 + y1 * g0,
            d2: y * g2 + y1 * (2.0 * g1) + y2 * g0,
        }
    }
}

/// Samples at equal arc length with exact tangents and curvature.
#[derive(Debug, Clone)]
pub(crate) struct ArcSamples {
    pub points: Vec<Vec3>,
    pub tangents: Vec<Vec3>,
    pub k: Vec<f64>,
    pub length: f64,
    /// `∫ k ds` when known in closed form; otherwise the trapezoid sum.
    pub total_curvature: Option<f64>,
}

/// Resample a closed curve `θ ↦ x(θ)`, `θ ∈ [0, 2π)`, at `n` points equally
/// spaced in arc length. The arc-length function is tabulated with
/// eight-point Gauss-Legendre panels and inverted by safeguarded Newton.
pub(crate) fn resample_by_arc_length<F: Fn(f64) -> Jet>(
    g: Geometry,
    f: F,
    n: usize,
) -> Result<ArcSamples> {
    if n < MIN_SAMPLES {
        return Err(GeomError::DegenerateSampling {
            got: n,
            min: MIN_SAMPLES,
        });
    }
    let speed = |th: f64| norm(g, &f(th).d1);
    let m = 4 * n;
    let dth = TAU / m as f64;
    let mut cum = vec![0.0; m + 1];
    for j in 0..m {
        cum[j + 1] = cum[j] + gauss_legendre(speed, j as f64 * dth, (j + 1) as f64 * dth);
    }
    let length = cum[m];
    if !(length.is_finite() && length > 0.0) {
        return Err(GeomError::BadCurve(format!("length {length}")));
    }
    let ds = length / n as f64;
    let mut out = ArcSamples {
        points: Vec::with_capacity(n),
        tangents: Vec::with_capacity(n),
        k: Vec::with_capacity(n),
        length,
        total_curvature: None,
    };
    let mut j = 0;
    for i in 0..n {
        let target = i as f64 * ds;
        while j + 1 < m && cum[j + 1] < target {
            j += 1;
        }
        let (a, b) = (j as f64 * dth, (j + 1) as f64 * dth);
        let span = cum[j + 1] - cum[j];
        let mut th = a + (target - cum[j]) / span * dth;
        for _ in 0..60 {
            let v = speed(th);
            if !(v > 0.0) {
                return Err(GeomError::BadCurve("curve stalls: zero speed".into()));
            }
            let err = cum[j] + gauss_legendre(speed, a, th) - target;
            let next = (th - err / v).clamp(a, b);
            let done = (next - th).abs() <= 1e-15 * (1.0 + th.abs());
            th = next;
            if done {
                break;
            }
        }
        let jet = f(th);
        let v = norm(g, &jet.d1);
        out.points.push(jet.x);
        out.tangents.push(jet.d1 / v);
        out.k.push(det(&jet.x, &jet.d1, &jet.d2) / (v * v * v));
    }
    Ok(out)
}

/// Geodesic curvature `det(x, x', x'')` of arc-length samples from
/// fourth-order differences; the samples must have unit speed to within
/// [`SPEED_TOL`].
pub(crate) fn fd_curvature(g: Geometry, points: &[Vec3], ds: f64) -> Result<Vec<f64>> {
    let d1 = diff1(points, ds);
    let d2 = diff2(points, ds);
    let worst = d1
        .iter()
        .map(|v| (norm(g, v) - 1.0).abs())
        .fold(0.0, f64::max);
    if !(worst <= SPEED_TOL) {
        return Err(GeomError::BadParametrization(worst));
    }
    Ok(points
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(x, (a, b))| det(x, a, b) / norm(g, a).powi(3))
        .collect())
}

/// Package arc-length samples as a [`SampledCurve`] whose area comes from
/// Gauss-Bonnet.
pub(crate) fn assemble(g: Geometry, samples: ArcSamples) -> SampledCurve {
    let n = samples.points.len();
    let ds = samples.length / n as f64;
    let s: Vec<f64> = (0..n).map(|i| i as f64 * ds).collect();
    let total_k = samples
        .total_curvature
        .unwrap_or_else(|| samples.k.iter().sum::<f64>() * ds);
    let area = match g {
        Geometry::Hyperbolic => total_k - TAU,
        _ => TAU - total_k,
    };
    SampledCurve {
        geometry: g,
        param: s.clone(),
        period: samples.length,
        points: samples.points,
        tangents: samples.tangents,
        s,
        weights: vec![ds; n],
        k: samples.k,
        length: samples.length,
        area,
        closed: true,
        support: None,
    }
}

/// Outward unit normals: `T × x` on the sphere, `−J(x × T)` on the
/// hyperboloid with `J = diag(−1, 1, 1)`.
pub(crate) fn outward_normals(curve: &SampledCurve) -> Vec<Vec3> {
    curve
        .points
        .iter()
        .zip(&curve.tangents)
        .map(|(x, t)| match curve.geometry {
            Geometry::Hyperbolic => {
                let c = x.cross(t);
                Vec3::new(c.x, -c.y, -c.z)
            }
            _ => t.cross(x),
        })
        .collect()
}

/// Signed area enclosed by a sampled closed curve, from a fan of geodesic
/// triangles with apex `p`, plus the leading `k ℓ³/12` term of the slivers
/// between each chord and the smooth arc. `h` is the parameter step of the
/// samples. On the sphere the value is defined modulo 4π.
pub fn fan_area(g: Geometry, points: &[Vec3], p: &Vec3, h: f64) -> f64 {
    let n = points.len();
    let mut area = 0.0;
    for i in 0..n {
        let a = &points[i];
        let b = &points[(i + 1) % n];
        let num = det(p, a, b);
        let den = match g {
            Geometry::Hyperbolic => 1.0 - minkowski(p, a) - minkowski(a, b) - minkowski(b, p),
            _ => 1.0 + p.dot(a) + a.dot(b) + b.dot(p),
        };
        area += 2.0 * num.atan2(den);
    }
    let d1 = diff1(points, h);
    let d2 = diff2(points, h);
    let sliver: f64 = (0..n).map(|i| det(&points[i], &d1[i], &d2[i])).sum();
    area + h * h * h / 12.0 * sliver
}

/// Reduce an angle-like quantity to `(−2π, 2π]`.
pub(crate) fn wrap_4pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * TAU);
    if r > TAU {
        r - 2.0 * TAU
    } else {
        r
    }
}

pub(crate) fn check_areas(gauss_bonnet: f64, shoelace: f64, modular: bool) -> Result<()> {
    let gap = if modular {
        wrap_4pi(gauss_bonnet - shoelace)
    } else {
        gauss_bonnet - shoelace
    };
    if gap.abs() > AREA_TOL {
        return Err(GeomError::AreaMismatch {
            gauss_bonnet,
            shoelace,
        });
    }
    Ok(())
}

/// Outcome of a sign-change scan where an identically vanishing profile is a
/// separate answer rather than a count of zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SignChanges {
    Degenerate,
    Counted {
        /// Arc-length positions of transversal sign changes.
        changes: Vec<f64>,
        /// Positions where the profile touches zero without crossing.
        touches: Vec<f64>,
    },
}

impl SignChanges {
    pub fn count(&self) -> Option<usize> {
        match self {
            SignChanges::Degenerate => None,
            SignChanges::Counted { changes, .. } => Some(changes.len()),
        }
    }

    /// `None` when degenerate, otherwise whether there are at least four.
    pub fn at_least_four(&self) -> Option<bool> {
        self.count().map(|c| c >= 4)
    }

    /// Scan uniformly spaced samples (step `ds`), treating `|v| ≤ floor` as
    /// zero in addition to a relative band.
    pub(crate) fn scan(values: &[f64], ds: f64, floor: f64) -> Result<Self> {
        let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tol = (1e-9 * peak).max(floor);
        match scan_sign_changes(values, tol) {
            Err(GeomError::AllBelowTolerance) => Ok(SignChanges::Degenerate),
            Err(e) => Err(e),
            Ok(scan) => Ok(SignChanges::Counted {
                changes: scan.changes.iter().map(|x| x * ds).collect(),
                touches: scan.touches.iter().map(|x| x * ds).collect(),
            }),
        }
    }
}

/// Front of a curve on the sphere or hyperboloid. Positions follow
/// `c(t)·x + s(t)·N` with `(c, s) = (cos, sin)` or `(cosh, sinh)`.
#[derive(Debug, Clone)]
pub struct SurfaceFront<'a> {
    pub base: &'a SampledCurve,
    pub t: f64,
    pub points: Vec<Vec3>,
    /// Transported outward normals.
    pub normals: Vec<Vec3>,
    /// Speed factor `c(t) + k s(t)`; negative on reversed arcs.
    pub regularity: Vec<f64>,
    /// Base arc-length positions of cusps.
    pub cusps: Vec<f64>,
    pub signed_length: f64,
    /// Measured by the triangle fan; on the sphere the multiple of 4π is
    /// chosen to continue the base curve's area.
    pub area: f64,
    reference: Vec3,
}

fn trig(g: Geometry, t: f64) -> (f64, f64) {
    match g {
        Geometry::Hyperbolic => (t.cosh(), t.sinh()),
        _ => (t.cos(), t.sin()),
    }
}

/// Move `(x, N)` by `t` along the normal geodesics.
fn shift(g: Geometry, t: f64, x: &Vec3, nrm: &Vec3) -> (Vec3, Vec3) {
    let (c, s) = trig(g, t);
    let sigma = if g == Geometry::Hyperbolic { 1.0 } else { -1.0 };
    (x * c + nrm * s, nrm * c + x * (sigma * s))
}

pub(crate) fn propagate_surface<'a>(
    base: &'a SampledCurve,
    normals: &[Vec3],
    reference: Vec3,
    t: f64,
) -> Result<SurfaceFront<'a>> {
    let (points, normals): (Vec<Vec3>, Vec<Vec3>) = base
        .points
        .iter()
        .zip(normals)
        .map(|(x, nrm)| shift(base.geometry, t, x, nrm))
        .unzip();
    SurfaceFront::finish(base, t, points, normals, reference)
}

impl<'a> SurfaceFront<'a> {
    fn finish(
        base: &'a SampledCurve,
        t: f64,
        points: Vec<Vec3>,
        normals: Vec<Vec3>,
        reference: Vec3,
    ) -> Result<Self> {
        let g = base.geometry;
        let (c, s) = trig(g, t);
        let regularity: Vec<f64> = base.k.iter().map(|k| c + k * s).collect();
        let signed_length = regularity
            .iter()
            .zip(&base.weights)
            .map(|(r, w)| r * w)
            .sum();
        let cusps = if t == 0.0 {
            Vec::new()
        } else {
            curvature_level_roots(base, |k| c + k * s)?
        };
        let mut area = fan_area(g, &points, &reference, base.step());
        if g == Geometry::Spherical {
            // the fan only fixes a spherical area modulo 4π; take the branch
            // that continues the base curve's area
            let (_, expected) = front_formulas(g, base.length, base.area, t);
            area = expected + wrap_4pi(area - expected);
        }
        Ok(SurfaceFront {
            base,
            t,
            points,
            normals,
            regularity,
            cusps,
            signed_length,
            area,
            reference,
        })
    }

    /// Propagate this front a further `dt`, starting from its own samples.
    pub fn propagate(&self, dt: f64) -> Result<SurfaceFront<'a>> {
        let g = self.base.geometry;
        let (points, normals) = self
            .points
            .iter()
            .zip(&self.normals)
            .map(|(x, nrm)| shift(g, dt, x, nrm))
            .unzip();
        Self::finish(self.base, self.t + dt, points, normals, self.reference)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Closed-form front curvature `(k c − σ s)/(c + k s)` per sample, with
    /// `σ = +1` on the sphere and `−1` on the hyperboloid.
    pub fn curvature_formula(&self) -> Vec<f64> {
        let g = self.base.geometry;
        let (c, s) = trig(g, self.t);
        let sigma = if g == Geometry::Hyperbolic { -1.0 } else { 1.0 };
        self.base
            .k
            .iter()
            .map(|k| (k * c - sigma * s) / (c + k * s))
            .collect()
    }

    /// Curvature measured from the front samples alone.
    pub fn measured_curvature(&self) -> Vec<f64> {
        let g = self.base.geometry;
        let h = self.base.step();
        let d1 = diff1(&self.points, h);
        let d2 = diff2(&self.points, h);
        (0..self.len())
            .map(|i| {
                let v = norm(g, &d1[i]);
                self.regularity[i].signum() * det(&self.points[i], &d1[i], &d2[i]) / (v * v * v)
            })
            .collect()
    }

    /// Average curvature `(2π ∓ A_t)/L_t` from the measured length and area.
    pub fn mean_curvature(&self) -> f64 {
        crate::curve_model::mean_curvature_of(self.base.geometry, self.signed_length, self.area)
    }

    /// `L_t² − A_t(4π ∓ A_t)`.
    pub fn isoperimetric_defect(&self) -> f64 {
        defect(self.base.geometry, self.signed_length, self.area)
    }

    /// Largest pointwise distance to another front of the same base.
    pub fn max_distance(&self, other: &SurfaceFront<'_>) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn defect(g: Geometry, length: f64, area: f64) -> f64 {
    match g {
        Geometry::Hyperbolic => length * length - area * (2.0 * TAU + area),
        Geometry::Spherical => length * length - area * (2.0 * TAU - area),
        Geometry::Euclidean => length * length - 4.0 * PI * area,
    }
}

/// Closed-form length and area of the front at time `t`.
pub(crate) fn front_formulas(g: Geometry, length: f64, area: f64, t: f64) -> (f64, f64) {
    let (c, s) = trig(g, t);
    match g {
        Geometry::Hyperbolic => (
            length * c + (TAU + area) * s,
            -TAU + length * s + (TAU + area) * c,
        ),
        _ => (
            length * c + (TAU - area) * s,
            TAU + length * s - (TAU - area) * c,
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontRow {
    pub t: f64,
    pub signed_length: f64,
    pub length_formula: f64,
    pub area: f64,
    pub area_formula: f64,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontFormulaReport {
    pub rows: Vec<FrontRow>,
    pub max_length_rel_dev: f64,
    pub max_area_rel_dev: f64,
    /// Spread of the isoperimetric defect relative to its base value.
    pub defect_rel_spread: f64,
    /// Largest mismatch between a finite-difference `dL_t/dt` and
    /// `2π ∓ A_t` at interior grid points.
    pub max_rate_dev: f64,
}

fn rel(measured: f64, exact: f64, scale: f64) -> f64 {
    (measured - exact).abs() / exact.abs().max(1e-3 * scale).max(f64::MIN_POSITIVE)
}

pub(crate) fn front_formula_check(
    base: &SampledCurve,
    normals: &[Vec3],
    reference: Vec3,
    t_grid: &[f64],
) -> Result<FrontFormulaReport> {
    let g = base.geometry;
    let (l, a) = (base.length, base.area);
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let f = propagate_surface(base, normals, reference, t)?;
        let (lf, af) = front_formulas(g, l, a, t);
        rows.push(FrontRow {
            t,
            signed_length: f.signed_length,
            length_formula: lf,
            area: f.area,
            area_formula: af,
            defect: f.isoperimetric_defect(),
        });
    }
    let max_length_rel_dev = rows
        .iter()
        .map(|r| rel(r.signed_length, r.length_formula, l))
        .fold(0.0, f64::max);
    let max_area_rel_dev = rows
        .iter()
        .map(|r| rel(r.area, r.area_formula, a.abs().max(1.0)))
        .fold(0.0, f64::max);
    let d0 = defect(g, l, a);
    let defect_rel_spread = rows
        .iter()
        .map(|r| (r.defect - d0).abs() / d0.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let mut max_rate_dev = 0.0_f64;
    for w in rows.windows(3) {
        let (h1, h2) = (w[1].t - w[0].t, w[2].t - w[1].t);
        if h1 <= 0.0 || h2 <= 0.0 {
            continue;
        }
        let rate = -h2 / (h1 * (h1 + h2)) * w[0].signed_length
            + (h2 - h1) / (h1 * h2) * w[1].signed_length
            + h1 / (h2 * (h1 + h2)) * w[2].signed_length;
        let expected = match g {
            Geometry::Hyperbolic => TAU + w[1].area,
            _ => TAU - w[1].area,
        };
        max_rate_dev = max_rate_dev.max((rate - expected).abs());
    }
    Ok(FrontFormulaReport {
        rows,
        max_length_rel_dev,
        max_area_rel_dev,
        defect_rel_spread,
        max_rate_dev,
    })
}

/// At each base parameter with `k = k̄`, compare the measured front
/// curvature with the front's own average curvature.
pub(crate) fn surface_lemma_check(
    base: &SampledCurve,
    normals: &[Vec3],
    reference: Vec3,
    t_grid: &[f64],
) -> Result<LemmaReport> {
    let kbar = crate::curve_model::average_curvature(base);
    let params = attainment_params(base, kbar)?;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let f = propagate_surface(base, normals, reference, t)?;
        let measured = f.measured_curvature();
        let mean = f.mean_curvature();
        let max_deviation = params
            .iter()
            .map(|&p| (interp_periodic(&measured, base.index_of(p)) - mean).abs())
            .fold(0.0, f64::max);
        rows.push(LemmaRow {
            t,
            mean_curvature: mean,
            max_deviation,
        });
    }
    let max_deviation = rows.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    Ok(LemmaReport {
        attainment_params: params,
        rows,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_jets_match_finite_differences() {
        let terms = [
            Perturbation {
                n: 3,
                amp: 0.05,
                phase: 0.3,
            },
            Perturbation {
                n: 5,
                amp: 0.01,
                phase: -1.0,
            },
        ];
        for g in [Geometry::Spherical, Geometry::Hyperbolic] {
            let f = |t: f64| polar_jet(g, 0.8, &terms, t);
            let (t, h) = (1.234, 1e-4);
            let fd1 = (f(t + h).x - f(t - h).x) / (2.0 * h);
            let fd2 = (f(t + h).x - f(t).x * 2.0 + f(t - h).x) / (h * h);
            assert!((fd1 - f(t).d1).norm() < 1e-7);
            assert!((fd2 - f(t).d2).norm() < 1e-5);
            let x = f(t).x;
            let on = if g == Geometry::Hyperbolic {
                minkowski(&x, &x) + 1.0
            } else {
                x.norm() - 1.0
            };
            assert!(on.abs() < 1e-14);
        }
    }

    #[test]
    fn interpolated_jet_reproduces_circle() {
        // a latitude circle is a trig polynomial of degree 1 before projection
        let n = 64;
        let rho: f64 = 0.7;
        let pts: Vec<Vec3> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                Vec3::new(rho.sin() * t.cos(), rho.sin() * t.sin(), rho.cos())
            })
            .collect();
        let f = interpolated_jet(Geometry::Spherical, &pts);
        let j = f(0.37);
        let exact = polar_jet(Geometry::Spherical, rho, &[], 0.37);
        assert!((j.x - exact.x).norm() < 1e-13);
        assert!((j.d1 - exact.d1).norm() < 1e-12);
        assert!((j.d2 - exact.d2).norm() < 1e-11);
    }

    #[test]
    fn fan_triangle_areas() {
        // octant triangle on the sphere has area π/2
        let tri = [Vec3::x(), Vec3::y(), Vec3::z()];
        let p = Vec3::new(1.0, 1.0, 1.0).normalize();
        let area: f64 = (0..3)
            .map(|i| {
                let (a, b) = (&tri[i], &tri[(i + 1) % 3]);
                2.0 * det(&p, a, b).atan2(1.0 + p.dot(a) + a.dot(b) + b.dot(&p))
            })
            .sum();
        assert!((area - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn resampled_circle_has_exact_curvature() {
        for (g, rho, k) in [
            (Geometry::Spherical, PI / 3.0, 1.0 / (PI / 3.0).tan()),
            (Geometry::Hyperbolic, 1.0, 1.0 / 1.0_f64.tanh()),
        ] {
            let s = resample_by_arc_length(g, |t| polar_jet(g, rho, &[], t), 64).unwrap();
            assert!(s.k.iter().all(|v| (v - k).abs() < 1e-12));
            let c = assemble(g, s);
            let ds = c.step();
            let fd = fd_curvature(g, &c.points, ds);
            // 64 samples cannot certify unit speed to 1e-6 with fourth-order stencils
            assert!(fd.is_err() || fd.unwrap().iter().all(|v| (v - k).abs() < 1e-4));
        }
    }

    #[test]
    fn arc_length_samples_are_equally_spaced() {
        let terms = [Perturbation {
            n: 2,
            amp: 0.2,
            phase: 0.0,
        }];
        let g = Geometry::Hyperbolic;
        let s = resample_by_arc_length(g, |t| polar_jet(g, 1.0, &terms, t), 512).unwrap();
        let c = assemble(g, s);
        let k = fd_curvature(g, &c.points, c.step()).unwrap();
        for (a, b) in k.iter().zip(&c.k) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
