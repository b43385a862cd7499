//! Seeded random curve populations. Every generator draws from a ChaCha
//! stream, so a seed pins the whole population on every platform.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve_model::{SupportFunction, SupportOval};
use crate::error::Result;
use crate::hyperbolic::HyperbolicCurve;
use crate::sphere::SphereCurve;
use crate::surface::Perturbation;

/// Harmonics perturbing the random support ovals.
pub const OVAL_HARMONICS: std::ops::RangeInclusive<usize> = 2..=8;
/// Smallest radius of curvature accepted for a random oval.
const MIN_RADIUS: f64 = 0.05;
const CONVEXITY_GRID: usize = 4096;
const MAX_TRIES: usize = 10_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit circle plus random harmonics 2..=8 and a random translation,
/// redrawn until `R = h + h''` stays above a small positive floor.
pub fn random_support_oval<R: Rng>(rng: &mut R, n_samples: usize) -> SupportOval {
    loop {
        let mut terms = vec![
            (0, 1.0, 0.0),
            (1, rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
        ];
        for n in OVAL_HARMONICS {
            // (n² − 1) is the gain from h to R
            let amp = 0.15 / (n * n - 1) as f64;
            terms.push((n, rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)));
        }
        let oval = SupportOval::from_harmonics(&terms, n_samples);
        if min_radius(&oval.support) > MIN_RADIUS {
            return oval;
        }
    }
}

fn min_radius(h: &SupportFunction) -> f64 {
    (0..CONVEXITY_GRID)
        .map(|i| h.radius(TAU * i as f64 / CONVEXITY_GRID as f64))
        .fold(f64::INFINITY, f64::min)
}

pub fn support_oval_population(seed: u64, count: usize, n_samples: usize) -> Vec<SupportOval> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| random_support_oval(&mut rng, n_samples))
        .collect()
}

/// `Σ aₙ cos nθ + bₙ sin nθ` over a sparse set of harmonics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    pub terms: Vec<(usize, f64, f64)>,
}

impl TrigPolynomial {
    pub fn eval(&self, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(n, a, b)| {
                let (s, c) = (n as f64 * theta).sin_cos();
                a * c + b * s
            })
            .sum()
    }

    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| self.eval(TAU * i as f64 / n as f64))
            .collect()
    }

    pub fn lowest_harmonic(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter(|t| t.1 != 0.0 || t.2 != 0.0)
            .map(|t| t.0)
            .min()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }
}

/// Harmonics `m..=m+extra` with Gaussian-ish coefficients; the leading
/// harmonic gets a magnitude of at least 0.1 so that `m` is unambiguous.
pub fn random_trig_polynomial<R: Rng>(rng: &mut R, m: usize, extra: usize) -> TrigPolynomial {
    let angle = rng.gen_range(0.0..TAU);
    let mag = rng.gen_range(0.1..1.0);
    let mut terms = vec![(m, mag * angle.cos(), mag * angle.sin())];
    for n in m + 1..=m + extra {
        terms.push((n, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    TrigPolynomial { terms }
}

/// `count` polynomials with lowest harmonic drawn from `1..=6` and up to
/// eight further harmonics.
pub fn trig_polynomial_population(seed: u64, count: usize) -> Vec<TrigPolynomial> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let m = rng.gen_range(1..=6);
            let extra = rng.gen_range(0..=8);
            random_trig_polynomial(&mut rng, m, extra)
        })
        .collect()
}

/// Radius and harmonic perturbations of a polar curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarSpec {
    pub rho: f64,
    pub perturbations: Vec<Perturbation>,
}

fn random_polar<R: Rng>(
    rng: &mut R,
    rho: (f64, f64),
    amp: f64,
    harmonics: (usize, usize),
) -> PolarSpec {
    let rho = rng.gen_range(rho.0..rho.1);
    let perturbations = (harmonics.0..=harmonics.1)
        .map(|n| Perturbation {
            n,
            amp: rng.gen_range(-amp..amp) / (n * n) as f64,
            phase: rng.gen_range(0.0..TAU),
        })
        .collect();
    PolarSpec { rho, perturbations }
}

fn draw<R: Rng, C>(rng: &mut R, mut make: impl FnMut(&mut R) -> Result<Option<C>>) -> Result<C> {
    for _ in 0..MAX_TRIES {
        if let Some(c) = make(rng)? {
            return Ok(c);
        }
    }
    Err(crate::GeomError::NoConvergence(format!(
        "no acceptable curve in {MAX_TRIES} draws"
    )))
}

/// Convex perturbed circles on the sphere lying in an open hemisphere.
pub fn sphere_oval_population(
    seed: u64,
    count: usize,
    n: usize,
) -> Result<Vec<(PolarSpec, SphereCurve)>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            draw(&mut rng, |r| {
                let spec = random_polar(r, (0.4, 1.2), 0.3, (2, 5));
                let c = SphereCurve::perturbed_circle(spec.rho, &spec.perturbations, n)?;
                Ok((c.is_convex() && c.hemisphere_center.is_some()).then_some((spec, c)))
            })
        })
        .collect()
}

/// Horocyclically convex perturbed circles in the hyperbolic plane.
pub fn horocyclic_population(
    seed: u64,
    count: usize,
    n: usize,
) -> Result<Vec<(PolarSpec, HyperbolicCurve)>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            draw(&mut rng, |r| {
                let spec = random_polar(r, (0.4, 1.2), 0.3, (2, 5));
                let c = HyperbolicCurve::perturbed_circle(spec.rho, &spec.perturbations, n)?;
                Ok(c.horocyclic_convex.then_some((spec, c)))
            })
        })
        .collect()
}

/// Simple spherical curves with generic geodesic curvature, convex or not.
/// Simplicity holds because the polar radius stays inside `(0, π)`.
pub fn torsion_test_population(
    seed: u64,
    count: usize,
    n: usize,
) -> Result<Vec<(PolarSpec, SphereCurve)>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            draw(&mut rng, |r| {
                let spec = random_polar(r, (0.3, 2.0), 0.5, (2, 6));
                let bound: f64 = spec.perturbations.iter().map(|p| p.amp.abs()).sum();
                if spec.rho - bound < 0.1 || spec.rho + bound > std::f64::consts::PI - 0.1 {
                    return Ok(None);
                }
                let c = SphereCurve::perturbed_circle(spec.rho, &spec.perturbations, n)?;
                Ok(Some((spec, c)))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_oval;

    #[test]
    fn same_seed_same_population() {
        let a = support_oval_population(7, 5, 256);
        let b = support_oval_population(7, 5, 256);
        assert_eq!(a, b);
        assert_ne!(a, support_oval_population(8, 5, 256));
        assert_eq!(
            trig_polynomial_population(3, 20),
            trig_polynomial_population(3, 20)
        );
    }

    #[test]
    fn random_ovals_are_convex() {
        for oval in support_oval_population(1, 30, 512) {
            let c = build_oval(&oval).unwrap();
            assert!(c.k.iter().all(|&k| k > 0.0));
        }
    }

    #[test]
    fn trig_polynomials_have_requested_lowest_harmonic() {
        let mut r = rng(11);
        for m in 1..=6 {
            let p = random_trig_polynomial(&mut r, m, 3);
            assert_eq!(p.lowest_harmonic(), Some(m));
            assert_eq!(p.degree(), m + 3);
        }
    }

    #[test]
    fn surface_populations_satisfy_their_filters() {
        for (_, c) in sphere_oval_population(2, 4, 256).unwrap() {
            assert!(c.is_convex() && c.hemisphere_center.is_some());
        }
        for (_, c) in horocyclic_population(2, 4, 256).unwrap() {
            assert!(c.horocyclic_convex);
        }
        assert_eq!(torsion_test_population(2, 4, 1024).unwrap().len(), 4);
    }
}
