use std::f64::consts::{PI, TAU};
use std::fs;

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use fourpoint::curve_model::{
    average_curvature, count_mean_crossings, curvature_level_roots, CurvatureProfile, Geometry,
    SampledCurve, Vec3,
};
use fourpoint::hyperbolic::{
    check_horocyclic_convexity, collapse_front, counterexample_verdict, hyperbolic_front_check,
    hyperbolic_lemma_check, propagate_hyperbolic, semicircle_mean_curvature, threshold_radius,
    CounterexampleReport, HyperbolicCurve, RoundedSemicircleSpec,
};
use fourpoint::io::{self, BuiltCurve, CurveSpec, Figure, Representation};
use fourpoint::numerics::{interp_periodic, is_power_of_two};
use fourpoint::population;
use fourpoint::sphere::{
    check_regular_embedded, equatorial_front, propagate_sphere, sphere_front_check,
    sphere_lemma_check, tennis_ball_check, total_torsion, SphereCurve, BISECTION_TOL,
};
use fourpoint::sturm_hurwitz::{spectrum, verify_sturm_hurwitz};
use fourpoint::surface::{SignChanges, SurfaceFront};
use fourpoint::wavefront::{
    critical_front, isoperimetric_defect, propagate, propagation_lemma_check, steiner_check,
};
use fourpoint::GeomError;

use crate::report::{Artifacts, Check, SCHEMA_VERSION};
use crate::{Command, Opts};

const DEFAULT_SAMPLES: usize = 1024;
/// The rounded corners need a fine grid.
const COUNTEREXAMPLE_SAMPLES: usize = 4096;
/// Finite-difference front curvature and the fan area need a fine grid to
/// resolve `1e-6` relative deviations.
const VERIFY_SAMPLES: usize = 4096;
const CORNER_SCALE: f64 = 0.02;
const DEFAULT_T: &str = "-0.5:0.5:0.25";
const MAX_GRID: usize = 10_000;
const FIGURE_SIZE: f64 = 600.0;
const POPULATION_OVALS: usize = 200;
const POPULATION_SURFACE: usize = 50;

pub enum Status {
    Pass,
    CheckFailed,
}

impl Status {
    fn from_checks(checks: &[Check]) -> Self {
        if checks.iter().any(Check::failed) {
            Status::CheckFailed
        } else {
            Status::Pass
        }
    }
}

pub fn run(command: Command, opts: &Opts) -> Result<Status> {
    if let Some(n) = opts.samples {
        check_samples(n)?;
    }
    ensure!(
        opts.tol > 0.0 && opts.tol.is_finite(),
        "--tol must be positive, got {}",
        opts.tol
    );
    let out = Artifacts::new(&opts.out, &opts.format)?;
    match command {
        Command::Analyze => analyze(opts, &out),
        Command::Propagate => propagate_fronts(opts, &out),
        Command::Verify if opts.input.is_none() => verify_population(opts, &out),
        Command::Verify => verify(opts, &out),
        Command::Counterexample => counterexample(opts, &out),
        Command::Export => export(opts, &out),
    }
}

fn check_samples(n: usize) -> Result<()> {
    ensure!(
        n >= 64 && is_power_of_two(n),
        "sample count must be a power of two and at least 64, got {n}"
    );
    Ok(())
}

/// Parse a single value or an inclusive `start:stop:step` grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("cannot parse grid {text:?}"))?;
    ensure!(
        parts.iter().all(|v| v.is_finite()),
        "grid {text:?} is not finite"
    );
    match parts[..] {
        [v] => Ok(vec![v]),
        [start, stop, step] => {
            ensure!(step > 0.0, "grid step must be positive in {text:?}");
            ensure!(stop >= start, "grid stop below start in {text:?}");
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            ensure!(
                count <= MAX_GRID,
                "grid {text:?} has more than {MAX_GRID} points"
            );
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => bail!("grid {text:?} must be a value or start:stop:step"),
    }
}

fn load(opts: &Opts, default_samples: usize) -> Result<(CurveSpec, BuiltCurve, usize)> {
    let Some(path) = &opts.input else {
        bail!("--input is required for this command");
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = CurveSpec::from_json(&text).with_context(|| format!("in {}", path.display()))?;
    if let Some(n) = spec.n_samples {
        check_samples(n).context("n_samples in the curve spec")?;
    }
    let n = opts.samples.or(spec.n_samples).unwrap_or(default_samples);
    // plane samples may be non-convex only when forced through
    let built = spec
        .build_with(Some(n), !opts.force)
        .with_context(|| format!("building the curve from {}", path.display()))?;
    Ok((spec, built, n))
}

type Projector = Box<dyn Fn(&Vec3) -> [f64; 2] + Sync>;

/// Map a model point to figure coordinates, and whether to draw the unit disc.
fn projector(built: &BuiltCurve) -> (Projector, bool) {
    match built {
        BuiltCurve::Plane(_) => (Box::new(|p: &Vec3| [p.x, p.y]), false),
        BuiltCurve::Sphere(s) => {
            let view = s.hemisphere_center.unwrap_or_else(Vec3::z);
            (Box::new(move |p: &Vec3| io::orthographic(p, &view)), true)
        }
        BuiltCurve::Hyperbolic(_) => (Box::new(io::klein), true),
    }
}

fn point_at(curve: &SampledCurve, param: f64) -> Vec3 {
    interp_periodic(&curve.points, curve.index_of(param))
}

fn isoperimetric(g: Geometry, length: f64, area: f64) -> f64 {
    match g {
        Geometry::Euclidean => length * length - 4.0 * PI * area,
        Geometry::Spherical => length * length - area * (4.0 * PI - area),
        Geometry::Hyperbolic => length * length - area * (4.0 * PI + area),
    }
}

/// Where the average curvature is attained; `None` for a constant profile.
fn attainment(curve: &SampledCurve) -> Result<Option<fourpoint::MeanAttainment>> {
    let profile = CurvatureProfile::of_curvature(curve);
    match count_mean_crossings(&profile, profile.default_tol()) {
        Ok(a) => Ok(Some(a)),
        Err(GeomError::DegenerateProfile) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn theorem_applies(built: &BuiltCurve) -> bool {
    match built {
        BuiltCurve::Plane(c) => c.k.iter().all(|&k| k > 0.0),
        BuiltCurve::Sphere(s) => s.is_convex() && s.hemisphere_center.is_some(),
        BuiltCurve::Hyperbolic(h) => h.horocyclic_convex,
    }
}

fn hypothesis(g: Geometry) -> &'static str {
    match g {
        Geometry::Euclidean => "convex",
        Geometry::Spherical => "convex and inside an open hemisphere",
        Geometry::Hyperbolic => "horocyclically convex",
    }
}

#[derive(Serialize)]
struct AnalysisReport<'a> {
    schema_version: u32,
    geometry: Geometry,
    representation: &'a str,
    n_samples: usize,
    length: f64,
    area: f64,
    mean_curvature: f64,
    min_curvature: f64,
    max_curvature: f64,
    degenerate: bool,
    crossings: Vec<f64>,
    touches: Vec<f64>,
    crossing_count: usize,
    attainment_count: usize,
    theorem_applies: bool,
    at_least_four: bool,
}

fn analyze(opts: &Opts, out: &Artifacts) -> Result<Status> {
    let (spec, built, n) = load(opts, DEFAULT_SAMPLES)?;
    let c = built.sampled();
    let profile = CurvatureProfile::of_curvature(c);
    let att = attainment(c)?;
    let degenerate = att.is_none();
    let (mut crossings, touches) = att.map_or((vec![], vec![]), |a| (a.crossings, a.touches));
    // grid crossings are linearly interpolated; refine them when the
    // refinement sees the same number of roots
    let refined = curvature_level_roots(c, |k| k - profile.mean)?;
    if refined.len() == crossings.len() {
        crossings = refined;
    }
    let applies = theorem_applies(&built);
    let at_least_four = degenerate || crossings.len() >= 4;
    out.csv("profile.csv", &profile.to_csv())?;
    if c.support_function().is_some() {
        let radius = CurvatureProfile::of_radius(c);
        out.csv("spectrum.csv", &spectrum(&radius.deviations())?.to_csv())?;
    }
    let (project, disc) = projector(&built);
    let mut fig = Figure {
        unit_disc: disc,
        ..Figure::default()
    };
    fig.add(c.points.iter().map(&project).collect());
    fig.markers = crossings
        .iter()
        .chain(&touches)
        .map(|&s| project(&point_at(c, s)))
        .collect();
    out.svg("curve.svg", &fig.to_svg(FIGURE_SIZE))?;
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        geometry: c.geometry,
        representation: spec.representation_name(),
        n_samples: n,
        length: c.length,
        area: c.area,
        mean_curvature: average_curvature(c),
        min_curvature: c.k.iter().cloned().fold(f64::INFINITY, f64::min),
        max_curvature: c.k.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        degenerate,
        crossing_count: crossings.len(),
        attainment_count: crossings.len() + touches.len(),
        crossings,
        touches,
        theorem_applies: applies,
        at_least_four,
    };
    out.json("analysis.json", &report)?;
    Ok(if applies && !at_least_four {
        Status::CheckFailed
    } else {
        Status::Pass
    })
}

#[derive(Serialize)]
struct FrontRow {
    t: f64,
    signed_length: f64,
    area: f64,
    isoperimetric_defect: f64,
    cusp_count: usize,
    cusps: Vec<f64>,
}

#[derive(Serialize)]
struct FrontsReport {
    schema_version: u32,
    geometry: Geometry,
    n_samples: usize,
    fronts: Vec<FrontRow>,
}

fn surface_front_csv(front: &SurfaceFront<'_>, names: [&str; 3]) -> String {
    let mut out = format!("s,{},{},{},regularity\n", names[0], names[1], names[2]);
    for (i, p) in front.points.iter().enumerate() {
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            front.base.s[i], p.x, p.y, p.z, front.regularity[i]
        ));
    }
    out
}

fn surface_rows(fronts: &[SurfaceFront<'_>]) -> Vec<FrontRow> {
    fronts
        .iter()
        .map(|f| FrontRow {
            t: f.t,
            signed_length: f.signed_length,
            area: f.area,
            isoperimetric_defect: f.isoperimetric_defect(),
            cusp_count: f.cusps.len(),
            cusps: f.cusps.clone(),
        })
        .collect()
}

fn propagate_fronts(opts: &Opts, out: &Artifacts) -> Result<Status> {
    let (_, built, n) = load(opts, DEFAULT_SAMPLES)?;
    let grid = parse_grid(opts.t.as_deref().unwrap_or(DEFAULT_T))?;
    let (project, disc) = projector(&built);
    let mut fig = Figure {
        unit_disc: disc,
        ..Figure::default()
    };
    let base = built.sampled();
    fig.add(base.points.iter().map(&project).collect());
    let rows = match &built {
        BuiltCurve::Plane(c) => {
            let fronts = grid
                .par_iter()
                .map(|&t| propagate(c, t))
                .collect::<Result<Vec<_>, _>>()?;
            for (i, f) in fronts.iter().enumerate() {
                out.csv(&format!("front_{i:03}.csv"), &f.to_csv())?;
                fig.add(f.points.iter().map(&project).collect());
                fig.markers.extend(io::plane_cusp_points(f));
            }
            fronts
                .iter()
                .map(|f| FrontRow {
                    t: f.t,
                    signed_length: f.signed_length,
                    area: f.area,
                    isoperimetric_defect: isoperimetric(
                        Geometry::Euclidean,
                        f.signed_length,
                        f.area,
                    ),
                    cusp_count: f.cusps.len(),
                    cusps: f.cusps.clone(),
                })
                .collect()
        }
        BuiltCurve::Sphere(s) => {
            let fronts = grid
                .par_iter()
                .map(|&t| propagate_sphere(s, t))
                .collect::<Result<Vec<_>, _>>()?;
            surface_figure(&fronts, ["x", "y", "z"], out, &mut fig, &*project)?;
            surface_rows(&fronts)
        }
        BuiltCurve::Hyperbolic(h) => {
            let fronts = grid
                .par_iter()
                .map(|&t| propagate_hyperbolic(h, t))
                .collect::<Result<Vec<_>, _>>()?;
            surface_figure(&fronts, ["x0", "x1", "x2"], out, &mut fig, &*project)?;
            surface_rows(&fronts)
        }
    };
    out.svg("fronts.svg", &fig.to_svg(FIGURE_SIZE))?;
    out.json(
        "fronts.json",
        &FrontsReport {
            schema_version: SCHEMA_VERSION,
            geometry: base.geometry,
            n_samples: n,
            fronts: rows,
        },
    )?;
    Ok(Status::Pass)
}

fn surface_figure(
    fronts: &[SurfaceFront<'_>],
    names: [&str; 3],
    out: &Artifacts,
    fig: &mut Figure,
    project: &(dyn Fn(&Vec3) -> [f64; 2] + Sync),
) -> Result<()> {
    for (i, f) in fronts.iter().enumerate() {
        out.csv(&format!("front_{i:03}.csv"), &surface_front_csv(f, names))?;
        fig.add(f.points.iter().map(project).collect());
        fig.markers
            .extend(io::surface_cusp_points(f).iter().map(project));
    }
    Ok(())
}

fn verify_grid(opts: &Opts) -> Result<Vec<f64>> {
    match &opts.t {
        Some(t) => parse_grid(t),
        None => Ok((0..11).map(|i| -0.3 + 0.1 * i as f64).collect()),
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    schema_version: u32,
    geometry: Geometry,
    representation: &'a str,
    n_samples: usize,
    tol: f64,
    t_grid: Vec<f64>,
    pass: bool,
    checks: Vec<Check>,
}

fn verify(opts: &Opts, out: &Artifacts) -> Result<Status> {
    let (spec, built, n) = load(opts, VERIFY_SAMPLES)?;
    let grid = verify_grid(opts)?;
    let mut checks = vec![four_point_check(&built)?];
    match &built {
        BuiltCurve::Plane(c) => plane_checks(c, &grid, opts.tol, &mut checks)?,
        BuiltCurve::Sphere(s) => sphere_checks(s, &grid, opts.tol, &mut checks)?,
        BuiltCurve::Hyperbolic(h)
            if matches!(spec.representation, Representation::RoundedSemicircle(_)) =>
        {
            // ramps make the curvature only piecewise smooth, below what the
            // finite-difference front checks assume
            let reason = "curvature is only piecewise smooth; use the counterexample command";
            for name in ["front_formulas", "defect_invariance", "propagation_lemma"] {
                checks.push(Check::skipped(name, reason));
            }
            checks.push(Check {
                name: "horocyclic_convexity",
                applies: false,
                pass: h.horocyclic_convex,
                max_deviation: None,
                detail: serde_json::to_value(check_horocyclic_convexity(h))?,
            });
        }
        BuiltCurve::Hyperbolic(h) => hyperbolic_checks(h, &grid, opts, &mut checks)?,
    }
    let status = Status::from_checks(&checks);
    out.json(
        "verify.json",
        &VerifyReport {
            schema_version: SCHEMA_VERSION,
            geometry: built.sampled().geometry,
            representation: spec.representation_name(),
            n_samples: n,
            tol: opts.tol,
            t_grid: grid,
            pass: matches!(status, Status::Pass),
            checks,
        },
    )?;
    Ok(status)
}

fn four_point_check(built: &BuiltCurve) -> Result<Check> {
    let c = built.sampled();
    if !theorem_applies(built) {
        return Ok(Check::skipped(
            "four_point",
            &format!("the curve is not {}", hypothesis(c.geometry)),
        ));
    }
    Ok(match attainment(c)? {
        None => Check::new("four_point", true, None, json!({ "degenerate": true })),
        Some(a) => Check::new(
            "four_point",
            a.count() >= 4,
            None,
            json!({ "crossings": a.count(), "touches": a.touches.len(), "params": a.crossings }),
        ),
    })
}

/// Spread of the isoperimetric defect over the grid, relative to its base
/// value; near-circles, whose defect is almost zero, are measured against
/// `10⁻³ L²` instead.
fn defect_check(g: Geometry, length: f64, area: f64, defects: &[f64], tol: f64) -> Check {
    let d0 = isoperimetric(g, length, area);
    let scale = d0.abs().max(1e-3 * length * length);
    let spread = defects.iter().map(|d| (d - d0).abs()).fold(0.0, f64::max) / scale;
    Check::new(
        "defect_invariance",
        spread < tol,
        Some(spread),
        json!({ "base_defect": d0, "defects": defects }),
    )
}

fn plane_checks(c: &SampledCurve, grid: &[f64], tol: f64, checks: &mut Vec<Check>) -> Result<()> {
    if c.support_function().is_some() {
        let radius = CurvatureProfile::of_radius(c);
        let sp = spectrum(&radius.deviations())?;
        let max = sp.max_amplitude();
        let low = if max > 0.0 {
            sp.harmonics[0].magnitude().max(sp.harmonics[1].magnitude()) / max
        } else {
            0.0
        };
        let rep = verify_sturm_hurwitz(&radius.values)?;
        let constant = rep.first_harmonic.is_none();
        let pass = low < 1e-8 && (constant || (rep.pass && rep.first_harmonic >= Some(2)));
        checks.push(Check::new(
            "sturm_hurwitz",
            pass,
            Some(low),
            json!({ "first_harmonic": rep.first_harmonic, "sign_changes": rep.sign_changes, "constant": constant }),
        ));
    } else {
        checks.push(Check::skipped(
            "sturm_hurwitz",
            "needs a support-function curve sampled uniformly in the normal angle",
        ));
    }
    let st = steiner_check(c, grid)?;
    let dev = st.max_length_rel_dev.max(st.max_area_rel_dev);
    checks.push(Check::new(
        "steiner",
        dev < tol,
        Some(dev),
        serde_json::to_value(&st)?,
    ));
    let defects = grid
        .iter()
        .map(|&t| isoperimetric_defect(c, t))
        .collect::<Result<Vec<_>, _>>()?;
    checks.push(defect_check(
        Geometry::Euclidean,
        c.length,
        c.area,
        &defects,
        tol,
    ));
    let lemma = propagation_lemma_check(c, grid)?;
    checks.push(Check::new(
        "propagation_lemma",
        lemma.max_deviation < tol,
        Some(lemma.max_deviation),
        serde_json::to_value(&lemma)?,
    ));
    checks.push(match critical_front(c) {
        Err(GeomError::DegenerateProfile) => Check::new("critical_front", true, None, json!({ "degenerate": true })),
        Err(e) => return Err(e.into()),
        Ok(cf) => {
            let len = cf.front.signed_length.abs();
            Check::new(
                "critical_front",
                len < tol && cf.cusp_count() >= 4,
                Some(len),
                json!({ "t": cf.t_star, "cusps": cf.front.cusps, "max_param_mismatch": cf.max_param_mismatch }),
            )
        }
    });
    Ok(())
}

fn formula_checks(
    g: Geometry,
    base: &SampledCurve,
    rep: fourpoint::surface::FrontFormulaReport,
    tol: f64,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let dev = rep.max_length_rel_dev.max(rep.max_area_rel_dev);
    let defects: Vec<f64> = rep.rows.iter().map(|r| r.defect).collect();
    checks.push(Check::new(
        "front_formulas",
        dev < tol,
        Some(dev),
        serde_json::to_value(&rep.rows)?,
    ));
    checks.push(defect_check(g, base.length, base.area, &defects, tol));
    Ok(())
}

fn sign_change_json(s: &SignChanges) -> serde_json::Value {
    serde_json::to_value(s).unwrap_or(serde_json::Value::Null)
}

fn sphere_checks(s: &SphereCurve, grid: &[f64], tol: f64, checks: &mut Vec<Check>) -> Result<()> {
    formula_checks(
        Geometry::Spherical,
        &s.curve,
        sphere_front_check(s, grid)?,
        tol,
        checks,
    )?;
    let lemma = sphere_lemma_check(s, grid)?;
    checks.push(Check::new(
        "propagation_lemma",
        lemma.max_deviation < tol,
        Some(lemma.max_deviation),
        serde_json::to_value(&lemma)?,
    ));
    if s.is_convex() && s.hemisphere_center.is_some() {
        let ef = equatorial_front(s)?;
        let emb = check_regular_embedded(s, ef.t)?;
        let four = ef.inflections.at_least_four().unwrap_or(true);
        checks.push(Check::new(
            "equatorial_front",
            ef.area_error < tol && emb.regular && emb.embedded && four,
            Some(ef.area_error),
            json!({ "t": ef.t, "inflections": sign_change_json(&ef.inflections), "embedding": emb }),
        ));
    } else {
        checks.push(Check::skipped(
            "equatorial_front",
            "the curve is not convex inside an open hemisphere",
        ));
    }
    if (s.area() - TAU).abs() <= BISECTION_TOL {
        let infl = tennis_ball_check(s)?;
        checks.push(Check::new(
            "tennis_ball",
            infl.at_least_four().unwrap_or(true),
            None,
            sign_change_json(&infl),
        ));
    } else {
        checks.push(Check::skipped(
            "tennis_ball",
            "the curve does not bisect the sphere",
        ));
    }
    let tor = total_torsion(s)?;
    checks.push(Check::new(
        "total_torsion",
        tor.integral.abs() < tol && tor.sign_changes.at_least_four().unwrap_or(true),
        Some(tor.integral.abs()),
        serde_json::to_value(&tor)?,
    ));
    Ok(())
}

fn hyperbolic_checks(
    h: &HyperbolicCurve,
    grid: &[f64],
    opts: &Opts,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let tol = opts.tol;
    let horo = check_horocyclic_convexity(h);
    // inward fronts of a curve that is not horocyclically convex are refused
    let grid: Vec<f64> = if h.horocyclic_convex {
        grid.to_vec()
    } else {
        grid.iter().cloned().filter(|&t| t >= 0.0).collect()
    };
    formula_checks(
        Geometry::Hyperbolic,
        &h.curve,
        hyperbolic_front_check(h, &grid)?,
        tol,
        checks,
    )?;
    let lemma = hyperbolic_lemma_check(h, &grid)?;
    checks.push(Check::new(
        "propagation_lemma",
        lemma.max_deviation < tol,
        Some(lemma.max_deviation),
        serde_json::to_value(&lemma)?,
    ));
    if h.horocyclic_convex || opts.force {
        let cf = collapse_front(h, opts.force)?;
        let len = cf.front.signed_length.abs();
        let pass = len < tol && cf.cusp_count().is_none_or(|n| n >= 4);
        let detail = json!({
            "t": cf.t,
            "mean_curvature": cf.mean_curvature,
            "cusps": cf.front.cusps,
            "theorem_applies": cf.theorem_applies,
        });
        let mut check = Check::new("collapse_front", pass, Some(len), detail);
        check.applies = cf.theorem_applies;
        checks.push(check);
    } else {
        checks.push(Check::skipped(
            "collapse_front",
            "the curve is not horocyclically convex",
        ));
    }
    checks.push(Check {
        name: "horocyclic_convexity",
        applies: false,
        pass: horo.horocyclic_convex,
        max_deviation: None,
        detail: serde_json::to_value(&horo)?,
    });
    Ok(())
}

#[derive(Serialize)]
struct PopulationCheck {
    name: &'static str,
    curves: usize,
    failures: Vec<usize>,
    pass: bool,
    /// What `worst` measures.
    metric: &'static str,
    worst: f64,
}

#[derive(Serialize)]
struct PopulationReport {
    schema_version: u32,
    seed: u64,
    n_samples: usize,
    tol: f64,
    pass: bool,
    checks: Vec<PopulationCheck>,
}

/// Summarise per-curve outcomes; `worst` is the smallest metric for
/// counts and margins and the largest for deviations.
fn population_check(
    name: &'static str,
    metric: &'static str,
    smallest: bool,
    results: &[(bool, f64)],
) -> PopulationCheck {
    let failures: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|r| !r.1 .0)
        .map(|r| r.0)
        .collect();
    let values = results.iter().map(|r| r.1);
    PopulationCheck {
        name,
        curves: results.len(),
        pass: failures.is_empty(),
        failures,
        metric,
        worst: if smallest {
            values.fold(f64::INFINITY, f64::min)
        } else {
            values.fold(0.0, f64::max)
        },
    }
}

/// Seeded random suite: plane ovals, convex sphere curves and horocyclically
/// convex hyperbolic curves.
fn verify_population(opts: &Opts, out: &Artifacts) -> Result<Status> {
    let n = opts.samples.unwrap_or(DEFAULT_SAMPLES);
    let tol = opts.tol;
    let ovals = population::support_oval_population(opts.seed, POPULATION_OVALS, n);
    let plane = ovals
        .par_iter()
        .map(|o| -> Result<[(bool, f64); 3]> {
            let c = fourpoint::build_oval(o)?;
            let att = attainment(&c)?.map_or(0, |a| a.count());
            let radius = CurvatureProfile::of_radius(&c);
            let sh = verify_sturm_hurwitz(&radius.values)?;
            let cf = critical_front(&c)?;
            let len = cf.front.signed_length.abs();
            Ok([
                (att >= 4, att as f64),
                (
                    sh.pass && sh.first_harmonic >= Some(2),
                    sh.sign_changes as f64 - 2.0 * sh.first_harmonic.unwrap_or(0) as f64,
                ),
                (len < tol && cf.cusp_count() >= 4, len),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let spheres = population::sphere_oval_population(opts.seed, POPULATION_SURFACE, n)?;
    let sphere = spheres
        .par_iter()
        .map(|(_, s)| -> Result<(bool, f64)> {
            let ef = equatorial_front(s)?;
            let emb = check_regular_embedded(s, ef.t)?;
            let ok = ef.area_error < tol
                && emb.regular
                && emb.embedded
                && ef.inflections.at_least_four() == Some(true);
            Ok((ok, ef.area_error))
        })
        .collect::<Result<Vec<_>>>()?;
    let horos = population::horocyclic_population(opts.seed, POPULATION_SURFACE, n)?;
    let hyperbolic = horos
        .par_iter()
        .map(|(_, h)| -> Result<(bool, f64)> {
            let cf = collapse_front(h, false)?;
            let len = cf.front.signed_length.abs();
            Ok((len < tol && cf.cusp_count().is_some_and(|c| c >= 4), len))
        })
        .collect::<Result<Vec<_>>>()?;
    let column = |j: usize| plane.iter().map(|r| r[j]).collect::<Vec<_>>();
    let checks = vec![
        population_check("four_point", "crossings", true, &column(0)),
        population_check("sturm_hurwitz", "sign changes minus 2m", true, &column(1)),
        population_check("critical_front", "|signed length|", false, &column(2)),
        population_check("equatorial_front", "|A_t - 2pi|", false, &sphere),
        population_check("collapse_front", "|signed length|", false, &hyperbolic),
    ];
    let pass = checks.iter().all(|c| c.pass);
    let specs: Vec<CurveSpec> = ovals
        .iter()
        .map(|o| CurveSpec {
            geometry: Geometry::Euclidean,
            representation: Representation::SupportFourier {
                coeffs: match &o.support {
                    fourpoint::SupportFunction::Fourier(c) => {
                        c.iter().enumerate().map(|(k, &(a, b))| (k, a, b)).collect()
                    }
                    fourpoint::SupportFunction::Ellipse { .. } => {
                        unreachable!("random ovals are Fourier")
                    }
                },
            },
            n_samples: Some(n),
        })
        .chain(spheres.iter().map(|(p, _)| CurveSpec {
            geometry: Geometry::Spherical,
            representation: Representation::PerturbedCircle {
                rho: p.rho,
                perturbations: p.perturbations.clone(),
            },
            n_samples: Some(n),
        }))
        .chain(horos.iter().map(|(p, _)| CurveSpec {
            geometry: Geometry::Hyperbolic,
            representation: Representation::HyperbolicCircle {
                rho: p.rho,
                perturbations: p.perturbations.clone(),
            },
            n_samples: Some(n),
        }))
        .collect();
    out.json("population.json", &specs)?;
    out.json(
        "population_report.json",
        &PopulationReport {
            schema_version: SCHEMA_VERSION,
            seed: opts.seed,
            n_samples: n,
            tol,
            pass,
            checks,
        },
    )?;
    Ok(if pass {
        Status::Pass
    } else {
        Status::CheckFailed
    })
}

#[derive(Serialize)]
struct CounterexampleRow {
    #[serde(flatten)]
    verdict: CounterexampleReport,
    /// Whether `r` lies above the half-disc threshold.
    above_threshold: bool,
    /// The verdict agrees with the mechanism: convex and `k̄ < coth r`
    /// exactly when fewer than four attainment points appear.
    consistent: bool,
}

#[derive(Serialize)]
struct CounterexampleSummary {
    schema_version: u32,
    threshold_r: f64,
    threshold_mean_curvature: f64,
    n_samples: usize,
    corner_scale: f64,
    results: Vec<CounterexampleRow>,
}

fn counterexample(opts: &Opts, out: &Artifacts) -> Result<Status> {
    let radii = parse_grid(opts.r.as_deref().unwrap_or("2"))?;
    ensure!(radii.iter().all(|&r| r > 0.0), "--r must be positive");
    let n = opts.samples.unwrap_or(COUNTEREXAMPLE_SAMPLES);
    let threshold = threshold_radius(1e-12)?;
    let built = radii
        .par_iter()
        .map(|&r| -> Result<(CounterexampleReport, HyperbolicCurve)> {
            let spec = RoundedSemicircleSpec::new(r, CORNER_SCALE);
            let verdict = counterexample_verdict(&spec, n).with_context(|| format!("r = {r}"))?;
            let curve = fourpoint::hyperbolic::build_rounded_semicircle(&spec, n)?;
            Ok((verdict, curve))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(built.len());
    for (verdict, curve) in built {
        let tag = format!("{:.3}", verdict.spec.r);
        out.csv(&format!("semicircle_r{tag}.csv"), &curve.to_csv())?;
        let mut fig = Figure {
            unit_disc: true,
            ..Figure::default()
        };
        fig.add(curve.klein());
        fig.markers = verdict
            .crossings
            .iter()
            .chain(&verdict.touches)
            .map(|&s| io::klein(&point_at(&curve.curve, s)))
            .collect();
        out.svg(&format!("semicircle_r{tag}.svg"), &fig.to_svg(FIGURE_SIZE))?;
        let consistent = verdict.counterexample == (verdict.convex && verdict.mean_below_coth);
        rows.push(CounterexampleRow {
            above_threshold: verdict.spec.r > threshold,
            consistent,
            verdict,
        });
    }
    let status = if rows.iter().all(|r| r.consistent) {
        Status::Pass
    } else {
        Status::CheckFailed
    };
    out.json(
        "counterexample.json",
        &CounterexampleSummary {
            schema_version: SCHEMA_VERSION,
            threshold_r: threshold,
            threshold_mean_curvature: semicircle_mean_curvature(threshold),
            n_samples: n,
            corner_scale: CORNER_SCALE,
            results: rows,
        },
    )?;
    Ok(status)
}

fn export(opts: &Opts, out: &Artifacts) -> Result<Status> {
    let (_, built, n) = load(opts, DEFAULT_SAMPLES)?;
    let c = built.sampled();
    out.csv("curve.csv", &built.to_csv()?)?;
    let (project, disc) = projector(&built);
    let mut fig = Figure {
        unit_disc: disc,
        ..Figure::default()
    };
    fig.add(c.points.iter().map(project).collect());
    out.svg("curve.svg", &fig.to_svg(FIGURE_SIZE))?;
    let representation = match c.geometry {
        Geometry::Euclidean => Representation::Samples {
            points: c.points.iter().map(|p| vec![p.x, p.y]).collect(),
        },
        Geometry::Spherical => Representation::SphereSamples {
            points: c.points.iter().map(|p| [p.x, p.y, p.z]).collect(),
        },
        Geometry::Hyperbolic => Representation::HyperboloidSamples {
            points: c.points.iter().map(|p| [p.x, p.y, p.z]).collect(),
        },
    };
    let spec = CurveSpec {
        geometry: c.geometry,
        representation,
        n_samples: Some(n),
    };
    out.json("curve.json", &spec)?;
    Ok(Status::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5").unwrap(), vec![0.5]);
        let g = parse_grid("-0.6:1.0:0.2").unwrap();
        assert_eq!(g.len(), 9);
        assert!((g[8] - 1.0).abs() < 1e-12);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("abc").is_err());
    }
}
