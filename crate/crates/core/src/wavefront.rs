//! Equidistant fronts of plane ovals.
//!
//! The front at time `t` moves every point of the base curve a distance `t`
//! along the outward normal: `γ_t(s) = γ(s) + t·Jγ'(s)` with `J` the clockwise
//! quarter turn. Its speed relative to the base is the regularity factor
//! `1 + t·k(s)`, which vanishes exactly at cusps.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::curve_model::{
    average_curvature, count_mean_crossings, curvature_level_roots, cyclic_distance,
    CurvatureProfile, Geometry, MeanAttainment, SampledCurve, Vec3,
};
use crate::error::{GeomError, Result};
use crate::numerics::{diff1, diff2, interp_periodic};

/// Parameter half-width around a cusp inside which front curvature is never
/// evaluated.
pub const CUSP_GUARD: f64 = 1e-6;

/// A cooriented equidistant of a plane curve.
#[derive(Debug, Clone)]
pub struct Front<'a> {
    pub base: &'a SampledCurve,
    /// Offset time; positive is outward.
    pub t: f64,
    pub points: Vec<Vec3>,
    /// `1 + t·k` per sample; its sign is the local orientation of the front.
    pub regularity: Vec<f64>,
    /// Base parameters where `1 + t·k = 0`.
    pub cusps: Vec<f64>,
    /// `∫ (1 + t k) ds`: arc length counted with sign flips at cusps.
    pub signed_length: f64,
    /// Algebraic area `½∮ (x dy − y dx)`.
    pub area: f64,
}

fn cross2(a: &Vec3, b: &Vec3) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Propagate a plane curve to time `t`.
pub fn propagate(curve: &SampledCurve, t: f64) -> Result<Front<'_>> {
    if curve.geometry != Geometry::Euclidean {
        return Err(GeomError::InvalidSpec(format!(
            "plane propagation of a {} curve",
            curve.geometry
        )));
    }
    let n = curve.len();
    let mut points = Vec::with_capacity(n);
    let mut regularity = Vec::with_capacity(n);
    let mut signed_length = 0.0;
    let mut area = 0.0;
    for i in 0..n {
        let factor = 1.0 + t * curve.k[i];
        let p = curve.points[i] + curve.outward_normal(i) * t;
        signed_length += factor * curve.weights[i];
        area += 0.5 * cross2(&p, &(curve.tangents[i] * factor)) * curve.weights[i];
        points.push(p);
        regularity.push(factor);
    }
    let cusps = if t == 0.0 {
        Vec::new()
    } else {
        curvature_level_roots(curve, |k| 1.0 + t * k)?
    };
    Ok(Front {
        base: curve,
        t,
        points,
        regularity,
        cusps,
        signed_length,
        area,
    })
}

/// Curvature `k/(1 + t k)` of the offset of a point with curvature `k`.
pub fn offset_curvature(k: f64, t: f64) -> Option<f64> {
    let factor = 1.0 + t * k;
    if factor.abs() <= 1e-12 * (1.0 + (t * k).abs()) {
        None
    } else {
        Some(k / factor)
    }
}

/// Front curvature at sample `i`, refusing samples inside the cusp guard band.
pub fn front_curvature(front: &Front<'_>, i: usize) -> Result<f64> {
    let base = front.base;
    let factor = front.regularity[i];
    let near_cusp = front
        .cusps
        .iter()
        .any(|&c| cyclic_distance(c, base.param[i], base.period) < CUSP_GUARD);
    match offset_curvature(base.k[i], front.t) {
        Some(k) if !near_cusp => Ok(k),
        _ => Err(GeomError::AtCusp { index: i, factor }),
    }
}

impl Front<'_> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Per-sample sign of the regularity factor (`0` exactly at a cusp).
    pub fn regularity_sign(&self, i: usize) -> i8 {
        let r = self.regularity[i];
        if r > 0.0 {
            1
        } else if r < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Curvature measured from the front samples alone (fourth-order
    /// differences in the base parameter), signed with respect to the
    /// transported coorientation.
    pub fn measured_curvature(&self) -> Vec<f64> {
        let h = self.base.step();
        let d1 = diff1(&self.points, h);
        let d2 = diff2(&self.points, h);
        d1.iter()
            .zip(&d2)
            .zip(&self.regularity)
            .map(|((a, b), r)| {
                let v = a.norm();
                r.signum() * cross2(a, b) / (v * v * v)
            })
            .collect()
    }

    /// Turns of the tangent line along the front, measured from sample
    /// differences with directions taken modulo π so that the reversal at a
    /// cusp does not count.
    pub fn tangent_winding(&self) -> i64 {
        let d1 = diff1(&self.points, self.base.step());
        let angles: Vec<f64> = d1.iter().map(|v| v.y.atan2(v.x)).collect();
        let n = angles.len();
        let mut total = 0.0;
        for i in 0..n {
            let mut d = angles[(i + 1) % n] - angles[i];
            d = (d + PI / 2.0).rem_euclid(PI) - PI / 2.0;
            total += d;
        }
        (total / TAU).round() as i64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,x,y,regularity\n");
        for i in 0..self.len() {
            let p = &self.points[i];
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{}\n",
                self.base.s[i],
                p.x,
                p.y,
                self.regularity_sign(i)
            ));
        }
        out
    }
}

/// Relative deviation with a floor so that zero targets stay meaningful.
fn rel_dev(measured: f64, exact: f64, scale: f64) -> f64 {
    (measured - exact).abs() / exact.abs().max(1e-3 * scale).max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinerRow {
    pub t: f64,
    pub signed_length: f64,
    pub length_formula: f64,
    pub area: f64,
    pub area_formula: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinerReport {
    pub rows: Vec<SteinerRow>,
    pub max_length_rel_dev: f64,
    pub max_area_rel_dev: f64,
    /// Largest relative mismatch between a finite-difference `dA_t/dt` and
    /// `L_t` at interior grid points.
    pub max_area_rate_rel_dev: f64,
}

/// Compare measured front length and area against `L + 2πt` and
/// `A + L t + π t²` over a grid of times.
pub fn steiner_check(curve: &SampledCurve, t_grid: &[f64]) -> Result<SteinerReport> {
    let (l, a) = (curve.length, curve.area);
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let f = propagate(curve, t)?;
        rows.push(SteinerRow {
            t,
            signed_length: f.signed_length,
            length_formula: l + TAU * t,
            area: f.area,
            area_formula: a + l * t + PI * t * t,
        });
    }
    let max_length_rel_dev = rows
        .iter()
        .map(|r| rel_dev(r.signed_length, r.length_formula, l))
        .fold(0.0, f64::max);
    let max_area_rel_dev = rows
        .iter()
        .map(|r| rel_dev(r.area, r.area_formula, a))
        .fold(0.0, f64::max);
    let mut max_area_rate_rel_dev = 0.0_f64;
    for w in rows.windows(3) {
        let (h1, h2) = (w[1].t - w[0].t, w[2].t - w[1].t);
        if h1 <= 0.0 || h2 <= 0.0 {
            continue;
        }
        let rate = -h2 / (h1 * (h1 + h2)) * w[0].area
            + (h2 - h1) / (h1 * h2) * w[1].area
            + h1 / (h2 * (h1 + h2)) * w[2].area;
        max_area_rate_rel_dev = max_area_rate_rel_dev.max(rel_dev(rate, w[1].signed_length, l));
    }
    Ok(SteinerReport {
        rows,
        max_length_rel_dev,
        max_area_rel_dev,
        max_area_rate_rel_dev,
    })
}

/// `L_t² − 4π A_t` from the measured front.
pub fn isoperimetric_defect(curve: &SampledCurve, t: f64) -> Result<f64> {
    let f = propagate(curve, t)?;
    Ok(f.signed_length * f.signed_length - 4.0 * PI * f.area)
}

#[derive(Debug, Clone)]
pub struct CriticalFront<'a> {
    pub front: Front<'a>,
    /// `t* = −L/2π`.
    pub t_star: f64,
    /// Mean-curvature attainment on the base curve.
    pub attainment: MeanAttainment,
    /// Largest parameter distance between a cusp and the nearest crossing.
    pub max_param_mismatch: f64,
}

impl CriticalFront<'_> {
    pub fn cusp_count(&self) -> usize {
        self.front.cusps.len()
    }
}

/// Propagate to `t* = −1/k̄`, where cusps mark exactly the points of the base
/// curve whose curvature equals the average.
pub fn critical_front(curve: &SampledCurve) -> Result<CriticalFront<'_>> {
    let profile = CurvatureProfile::of_curvature(curve);
    let attainment = count_mean_crossings(&profile, profile.default_tol())?;
    let t_star = -curve.length / TAU;
    let front = propagate(curve, t_star)?;
    let max_param_mismatch = front
        .cusps
        .iter()
        .map(|&c| {
            attainment
                .crossings
                .iter()
                .chain(&attainment.touches)
                .map(|&x| cyclic_distance(c, x, curve.period))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(CriticalFront {
        front,
        t_star,
        attainment,
        max_param_mismatch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    pub t: f64,
    pub mean_curvature: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub attainment_params: Vec<f64>,
    pub rows: Vec<LemmaRow>,
    pub max_deviation: f64,
}

/// Base parameters where `k = k̄`; every sample for a constant profile.
pub(crate) fn attainment_params(curve: &SampledCurve, kbar: f64) -> Result<Vec<f64>> {
    let profile = CurvatureProfile::of_curvature(curve);
    let profile = CurvatureProfile {
        mean: kbar,
        ..profile
    };
    match count_mean_crossings(&profile, profile.default_tol()) {
        Err(GeomError::DegenerateProfile) => Ok(curve.param.clone()),
        Err(e) => Err(e),
        Ok(att) => {
            let mut params = curvature_level_roots(curve, |k| k - kbar)?;
            for &t in &att.touches {
                params.push(t);
            }
            Ok(params)
        }
    }
}

/// At each point where `k = k̄`, compare the measured front curvature with
/// the front's own average `2π/L_t`.
pub fn propagation_lemma_check(curve: &SampledCurve, t_grid: &[f64]) -> Result<LemmaReport> {
    let params = attainment_params(curve, average_curvature(curve))?;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let front = propagate(curve, t)?;
        let measured = front.measured_curvature();
        let mean = TAU / front.signed_length;
        let max_deviation = params
            .iter()
            .map(|&p| (interp_periodic(&measured, curve.index_of(p)) - mean).abs())
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

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnclosureReport {
    pub inner_length: f64,
    pub outer_length: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Even-odd point-in-polygon test; points on an edge count as outside.
fn inside_polygon(p: &Vec3, poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let [xa, ya] = poly[i];
        let [xb, yb] = poly[(i + 1) % n];
        // on-edge check
        let cross = (xb - xa) * (p.y - ya) - (yb - ya) * (p.x - xa);
        let within = (p.x - xa) * (p.x - xb) <= 0.0 && (p.y - ya) * (p.y - yb) <= 0.0;
        if cross.abs() <= 1e-14 * (1.0 + xa.abs() + ya.abs()) && within {
            return false;
        }
        if (ya > p.y) != (yb > p.y) {
            let x = xa + (p.y - ya) * (xb - xa) / (yb - ya);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// A convex curve strictly inside a closed loop is shorter than the loop.
pub fn enclosure_inequality_check(
    inner: &SampledCurve,
    outer: &[[f64; 2]],
) -> Result<EnclosureReport> {
    if outer.len() < 3 {
        return Err(GeomError::InvalidSpec("outer loop needs 3 points".into()));
    }
    if let Some(i) = (0..inner.len()).find(|&i| !inside_polygon(&inner.points[i], outer)) {
        return Err(GeomError::NotContained(i));
    }
    let outer_length: f64 = (0..outer.len())
        .map(|i| {
            let [xa, ya] = outer[i];
            let [xb, yb] = outer[(i + 1) % outer.len()];
            (xb - xa).hypot(yb - ya)
        })
        .sum();
    let margin = outer_length - inner.length;
    Ok(EnclosureReport {
        inner_length: inner.length,
        outer_length,
        margin,
        pass: margin > 0.0,
    })
}
