//! Periodic-grid numerics shared by every geometry: fourth-order finite
//! differences, local interpolation, spectral cumulative integration,
//! Gauss-Legendre panels and bracketing root finders.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{GeomError, Result};

/// Anything the periodic stencils can act on (scalars and vectors).
pub trait Sample: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<T> Sample for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

#[inline]
fn at<V: Copy>(f: &[V], i: usize, off: isize) -> V {
    let n = f.len() as isize;
    f[((i as isize + off).rem_euclid(n)) as usize]
}

/// First derivative, central, fourth order, periodic.
pub fn diff1<V: Sample>(f: &[V], h: f64) -> Vec<V> {
    let c = 1.0 / (12.0 * h);
    (0..f.len())
        .map(|i| ((at(f, i, -2) - at(f, i, 2)) + (at(f, i, 1) - at(f, i, -1)) * 8.0) * c)
        .collect()
}

/// Second derivative, central, fourth order, periodic.
pub fn diff2<V: Sample>(f: &[V], h: f64) -> Vec<V> {
    let c = 1.0 / (12.0 * h * h);
    (0..f.len())
        .map(|i| {
            let outer = at(f, i, -2) + at(f, i, 2);
            let inner = at(f, i, -1) + at(f, i, 1);
            (inner * 16.0 - outer - f[i] * 30.0) * c
        })
        .collect()
}

/// Third derivative, central, fourth order, periodic.
pub fn diff3<V: Sample>(f: &[V], h: f64) -> Vec<V> {
    let c = 1.0 / (8.0 * h * h * h);
    (0..f.len())
        .map(|i| {
            let a = at(f, i, -3) - at(f, i, 3);
            let b = at(f, i, 2) - at(f, i, -2);
            let d = at(f, i, -1) - at(f, i, 1);
            (a + b * 8.0 + d * 13.0) * c
        })
        .collect()
}

/// Four-point Lagrange interpolation of a periodic sequence at a fractional
/// index `x` (in sample units).
pub fn interp_periodic<V: Sample>(f: &[V], x: f64) -> V {
    let n = f.len() as f64;
    let x = x.rem_euclid(n);
    let i = x.floor();
    let u = x - i;
    let i = i as usize;
    let (p0, p1, p2, p3) = (at(f, i, -1), at(f, i, 0), at(f, i, 1), at(f, i, 2));
    let w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    let w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    let w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    let w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
    p0 * w0 + p1 * w1 + p2 * w2 + p3 * w3
}

/// Cumulative integral `F(x_j) = ∫_0^{x_j} f` of uniformly sampled periodic
/// data, computed spectrally. `period` is the length of the parameter circle.
pub fn cumulative_integral(f: &[f64], period: f64) -> Vec<f64> {
    let n = f.len();
    let mut buf: Vec<Complex<f64>> = f.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let mean = buf[0].re / n as f64;
    let omega = 2.0 * PI / period;
    for (k, c) in buf.iter_mut().enumerate() {
        let kk = if k <= n / 2 {
            k as isize
        } else {
            k as isize - n as isize
        };
        if kk == 0 || (n.is_multiple_of(2) && k == n / 2) {
            *c = Complex::new(0.0, 0.0);
        } else {
            *c /= Complex::new(0.0, kk as f64 * omega);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let g0 = buf[0].re / n as f64;
    let h = period / n as f64;
    buf.iter()
        .enumerate()
        .map(|(j, c)| mean * h * j as f64 + c.re / n as f64 - g0)
        .collect()
}

/// Band-limited (trigonometric) resampling of periodic data onto `m` points.
pub fn resample_trig(f: &[f64], m: usize) -> Vec<f64> {
    let n = f.len();
    if m == n {
        return f.to_vec();
    }
    let mut buf: Vec<Complex<f64>> = f.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let mut out = vec![Complex::new(0.0, 0.0); m];
    let keep = n.min(m);
    let half = (keep - 1) / 2;
    out[0] = buf[0];
    for k in 1..=half {
        out[k] = buf[k];
        out[m - k] = buf[n - k];
    }
    if keep.is_multiple_of(2) {
        // split the shared Nyquist term evenly so the result stays real
        if m > keep {
            let nyq = buf[keep / 2] * 0.5;
            out[keep / 2] += nyq;
            out[m - keep / 2] += nyq.conj();
        } else {
            out[m / 2] = buf[m / 2] + buf[n - m / 2];
        }
    }
    planner.plan_fft_inverse(m).process(&mut out);
    out.iter().map(|c| c.re / n as f64).collect()
}

/// Trigonometric interpolant of uniformly sampled periodic data on
/// `[0, 2π)`, evaluable (with derivative) at arbitrary parameters.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    mean: f64,
    /// (n, a_n, b_n) with f = mean + Σ a_n cos nθ + b_n sin nθ
    terms: Vec<(f64, f64, f64)>,
}

impl TrigInterpolant {
    pub fn new(f: &[f64]) -> Self {
        let n = f.len();
        let mut buf: Vec<Complex<f64>> = f.iter().map(|&v| Complex::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = 2.0 / n as f64;
        let mut terms = Vec::with_capacity(n / 2);
        for (k, c) in buf.iter().enumerate().take(n / 2 + 1).skip(1) {
            let w = if n.is_multiple_of(2) && k == n / 2 { 0.5 } else { 1.0 };
            terms.push((k as f64, c.re * scale * w, -c.im * scale * w));
        }
        TrigInterpolant {
            mean: buf[0].re / n as f64,
            terms,
        }
    }

    pub fn eval(&self, theta: f64) -> (f64, f64) {
        let mut v = self.mean;
        let mut d = 0.0;
        for &(k, a, b) in &self.terms {
            let (s, c) = (k * theta).sin_cos();
            v += a * c + b * s;
            d += k * (b * c - a * s);
        }
        (v, d)
    }

    /// Value with first and second derivatives.
    pub fn eval2(&self, theta: f64) -> (f64, f64, f64) {
        let mut v = self.mean;
        let mut d = 0.0;
        let mut dd = 0.0;
        for &(k, a, b) in &self.terms {
            let (s, c) = (k * theta).sin_cos();
            let f = a * c + b * s;
            v += f;
            d += k * (b * c - a * s);
            dd -= k * k * f;
        }
        (v, d, dd)
    }
}

const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL8_NODES
        .iter()
        .zip(GL8_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Bisection on a sign-changing bracket until the bracket is below `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(GeomError::NoConvergence(format!(
            "no sign change on [{a}, {b}]"
        )));
    }
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Indices `i` where a sampled periodic function changes sign between
/// sample `i` and sample `i + 1` (cyclically).
pub fn bracket_roots(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let a = values[i];
            let b = values[(i + 1) % n];
            (a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)
        })
        .collect()
}

/// Linear zero location between samples `i` and `i+1` as a fractional index.
pub fn linear_zero(values: &[f64], i: usize) -> f64 {
    let n = values.len();
    let a = values[i];
    let b = values[(i + 1) % n];
    if a == b {
        i as f64
    } else {
        i as f64 + a / (a - b)
    }
}

/// Trapezoid rule for periodic samples with uniform step `h`.
pub fn periodic_trapezoid(f: &[f64], h: f64) -> f64 {
    f.iter().sum::<f64>() * h
}

pub fn is_power_of_two(n: usize) -> bool {
    n > 0 && n & (n - 1) == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> (Vec<f64>, f64) {
        let h = 2.0 * PI / n as f64;
        ((0..n).map(|i| i as f64 * h).collect(), h)
    }

    #[test]
    fn stencils_match_trig_derivatives() {
        let (x, h) = grid(256);
        let f: Vec<f64> = x.iter().map(|t| (3.0 * t).sin()).collect();
        let d1 = diff1(&f, h);
        let d2 = diff2(&f, h);
        let d3 = diff3(&f, h);
        for (i, t) in x.iter().enumerate() {
            assert!((d1[i] - 3.0 * (3.0 * t).cos()).abs() < 1e-5);
            assert!((d2[i] + 9.0 * (3.0 * t).sin()).abs() < 1e-4);
            assert!((d3[i] + 27.0 * (3.0 * t).cos()).abs() < 1e-3);
        }
    }

    #[test]
    fn stencils_are_fourth_order() {
        let err = |n: usize| {
            let (x, h) = grid(n);
            let f: Vec<f64> = x.iter().map(|t| (2.0 * t).cos().exp()).collect();
            let d3 = diff3(&f, h);
            // exact third derivative of exp(cos 2t) via finite sum of exact terms
            x.iter()
                .zip(d3.iter())
                .map(|(t, d)| {
                    let c = (2.0 * t).cos();
                    let s = (2.0 * t).sin();
                    let e = c.exp();
                    let exact = e * (-8.0 * s * s * s + 24.0 * s * c + 8.0 * s);
                    (d - exact).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(128) / err(256);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn interpolation_is_accurate_between_samples() {
        let (x, _) = grid(512);
        let f: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let v = interp_periodic(&f, 10.37);
        let t = 10.37 * 2.0 * PI / 512.0;
        assert!((v - t.sin()).abs() < 1e-10);
        // wraps around the end of the period
        let v = interp_periodic(&f, 511.5);
        let t = 511.5 * 2.0 * PI / 512.0;
        assert!((v - t.sin()).abs() < 1e-10);
    }

    #[test]
    fn cumulative_integral_of_trig_polynomial() {
        let (x, _) = grid(64);
        let f: Vec<f64> = x
            .iter()
            .map(|t| 2.0 + (3.0 * t).cos() - 0.5 * t.sin())
            .collect();
        let g = cumulative_integral(&f, 2.0 * PI);
        for (t, v) in x.iter().zip(g.iter()) {
            let exact = 2.0 * t + (3.0 * t).sin() / 3.0 + 0.5 * (t.cos() - 1.0);
            assert!((v - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn trig_resampling_and_interpolant_agree() {
        let (x, _) = grid(32);
        let f: Vec<f64> = x
            .iter()
            .map(|t| 1.0 + (2.0 * t).sin() + 0.3 * (5.0 * t).cos())
            .collect();
        let up = resample_trig(&f, 128);
        let ti = TrigInterpolant::new(&f);
        for (j, v) in up.iter().enumerate() {
            let t = j as f64 * 2.0 * PI / 128.0;
            let exact = 1.0 + (2.0 * t).sin() + 0.3 * (5.0 * t).cos();
            assert!((v - exact).abs() < 1e-12);
            let (e, d) = ti.eval(t);
            assert!((e - exact).abs() < 1e-12);
            let dexact = 2.0 * (2.0 * t).cos() - 1.5 * (5.0 * t).sin();
            assert!((d - dexact).abs() < 1e-11);
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let v = gauss_legendre(|x| x.powi(15) + 3.0 * x * x, 0.0, 2.0);
        let exact = 2f64.powi(16) / 16.0 + 8.0;
        assert!((v - exact).abs() < 1e-9);
    }

    #[test]
    fn bisection_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-13).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        assert!(bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-9).is_err());
    }
}
