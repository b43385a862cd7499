//! Fourier side of the four-point argument: spectra of periodic samples,
//! the first nontrivial harmonic, hysteresis sign-change counting and the
//! Sturm-Hurwitz bound `sign changes >= 2 * (first nontrivial harmonic)`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::numerics::linear_zero;

/// Relative amplitude threshold for deciding that a harmonic is present.
pub const AMP_TOL_REL: f64 = 1e-9;
/// Relative hysteresis half-width used when counting sign changes.
pub const SIGN_TOL_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Harmonic {
    pub n: usize,
    pub cos_amp: f64,
    pub sin_amp: f64,
}

impl Harmonic {
    pub fn magnitude(&self) -> f64 {
        self.cos_amp.hypot(self.sin_amp)
    }
}

/// Real Fourier coefficients `a_n, b_n` for `n = 0..=n_max` of a uniformly
/// sampled periodic sequence; `harmonics[0].cos_amp` is the mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub harmonics: Vec<Harmonic>,
    pub n_max: usize,
    pub source_mean: f64,
    /// Mean square of the centered source sequence.
    pub source_variance: f64,
}

impl Spectrum {
    /// Largest amplitude over all harmonics, the constant term included.
    pub fn max_amplitude(&self) -> f64 {
        self.harmonics
            .iter()
            .map(|h| {
                if h.n == 0 {
                    h.cos_amp.abs()
                } else {
                    h.magnitude()
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest amplitude among the nonconstant harmonics.
    pub fn max_oscillating_amplitude(&self) -> f64 {
        self.harmonics
            .iter()
            .skip(1)
            .map(Harmonic::magnitude)
            .fold(0.0, f64::max)
    }

    /// `½ Σ_{n≥1} (a_n² + b_n²)`, which equals the centered mean square when
    /// the source is resolved by `n_max` harmonics.
    pub fn centered_power(&self) -> f64 {
        0.5 * self
            .harmonics
            .iter()
            .skip(1)
            .map(|h| h.cos_amp * h.cos_amp + h.sin_amp * h.sin_amp)
            .sum::<f64>()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,cos_amp,sin_amp,magnitude\n");
        for h in &self.harmonics {
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e}\n",
                h.n,
                h.cos_amp,
                h.sin_amp,
                h.magnitude()
            ));
        }
        out
    }
}

/// Spectrum of uniformly spaced periodic samples, resolving harmonics up to
/// `len / 4`.
pub fn spectrum(values: &[f64]) -> Result<Spectrum> {
    spectrum_to(values, values.len() / 4)
}

/// Spectrum up to an explicit `n_max`; needs at least `4 * n_max` samples.
pub fn spectrum_to(values: &[f64], n_max: usize) -> Result<Spectrum> {
    let len = values.len();
    if len == 0 || len < 4 * n_max {
        return Err(GeomError::TooFewSamples {
            n_max,
            need: 4 * n_max,
            got: len,
        });
    }
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let scale = 2.0 / len as f64;
    let mean = buf[0].re / len as f64;
    let mut harmonics = Vec::with_capacity(n_max + 1);
    harmonics.push(Harmonic {
        n: 0,
        cos_amp: mean,
        sin_amp: 0.0,
    });
    for (n, c) in buf.iter().enumerate().take(n_max + 1).skip(1) {
        harmonics.push(Harmonic {
            n,
            cos_amp: c.re * scale,
            sin_amp: -c.im * scale,
        });
    }
    let source_variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len as f64;
    Ok(Spectrum {
        harmonics,
        n_max,
        source_mean: mean,
        source_variance,
    })
}

/// Spectrum of samples given together with their parameters; rejects grids
/// whose spacing deviates from uniform by more than `1e-9` of the step.
pub fn spectrum_on_grid(params: &[f64], values: &[f64], period: f64) -> Result<Spectrum> {
    check_uniform(params, period)?;
    spectrum(values)
}

pub(crate) fn check_uniform(params: &[f64], period: f64) -> Result<()> {
    let n = params.len();
    if n < 2 {
        return Ok(());
    }
    let step = period / n as f64;
    let mut worst = 0.0_f64;
    for i in 0..n {
        let next = if i + 1 == n {
            params[0] + period
        } else {
            params[i + 1]
        };
        worst = worst.max(((next - params[i]) - step).abs());
    }
    if worst > 1e-9 * step {
        return Err(GeomError::NonUniformGrid(worst));
    }
    Ok(())
}

/// Smallest `n >= 1` whose amplitude exceeds `amp_tol`, or `None` when the
/// centered sequence has no resolvable harmonic.
pub fn first_nontrivial_harmonic(sp: &Spectrum, amp_tol: f64) -> Option<usize> {
    sp.harmonics
        .iter()
        .skip(1)
        .find(|h| h.magnitude() > amp_tol)
        .map(|h| h.n)
}

/// The default amplitude threshold for [`first_nontrivial_harmonic`].
pub fn default_amp_tol(sp: &Spectrum) -> f64 {
    AMP_TOL_REL * sp.max_oscillating_amplitude()
}

/// Result of a hysteresis sign scan around one period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignScan {
    /// Zero crossings as fractional sample indices in `[0, len)`.
    pub changes: Vec<f64>,
    /// Excursions into the `±tol` band that return to the same side,
    /// located at the sample of smallest magnitude.
    pub touches: Vec<f64>,
}

/// Scan a periodic sequence for sign changes. A change is a transition
/// between `value > tol` and `value < -tol`; entering the band and leaving
/// on the same side is a touch, not a change.
pub fn scan_sign_changes(values: &[f64], tol: f64) -> Result<SignScan> {
    let n = values.len();
    let state = |v: f64| -> i8 {
        if v > tol {
            1
        } else if v < -tol {
            -1
        } else {
            0
        }
    };
    let start = (0..n)
        .find(|&i| state(values[i]) != 0)
        .ok_or(GeomError::AllBelowTolerance)?;
    let mut cur = state(values[start]);
    let mut last_out = start;
    let mut changes = Vec::new();
    let mut touches = Vec::new();
    for step in 1..=n {
        let j = start + step;
        let s = state(values[j % n]);
        if s == 0 {
            continue;
        }
        if s == cur {
            if j - last_out > 1 {
                let best = (last_out + 1..j)
                    .min_by(|&a, &b| values[a % n].abs().total_cmp(&values[b % n].abs()))
                    .unwrap();
                touches.push((best % n) as f64);
            }
        } else {
            // last raw sign flip inside the transition window
            let k = (last_out..j)
                .rev()
                .find(|&k| {
                    let a = values[k % n];
                    let b = values[(k + 1) % n];
                    a.signum() != b.signum() || a == 0.0
                })
                .unwrap_or(last_out);
            let z = linear_zero(values, k % n);
            changes.push(z.rem_euclid(n as f64));
            cur = s;
        }
        last_out = j;
    }
    changes.sort_by(f64::total_cmp);
    touches.sort_by(f64::total_cmp);
    Ok(SignScan { changes, touches })
}

/// Number of sign changes around one period (always even).
pub fn count_sign_changes(values: &[f64], tol: f64) -> Result<usize> {
    scan_sign_changes(values, tol).map(|s| s.changes.len())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SturmHurwitzReport {
    /// First nontrivial harmonic of the centered sequence.
    pub first_harmonic: Option<usize>,
    /// Sign changes of the centered sequence.
    pub sign_changes: usize,
    /// Amplitudes of the constant and first harmonic relative to the largest.
    pub constant_ratio: f64,
    pub first_ratio: f64,
    pub pass: bool,
}

/// Centre the sequence, find its first nontrivial harmonic `m` and its sign
/// changes `z`, and check `z >= 2m`.
pub fn verify_sturm_hurwitz(values: &[f64]) -> Result<SturmHurwitzReport> {
    let raw = spectrum(values)?;
    let centered: Vec<f64> = values.iter().map(|v| v - raw.source_mean).collect();
    let sp = spectrum(&centered)?;
    let max_amp = sp.max_oscillating_amplitude();
    let m = first_nontrivial_harmonic(&sp, default_amp_tol(&sp));
    let scale = centered.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let z = count_sign_changes(&centered, SIGN_TOL_REL * scale)?;
    let ratio = |x: f64| if max_amp > 0.0 { x / max_amp } else { 0.0 };
    Ok(SturmHurwitzReport {
        first_harmonic: m,
        sign_changes: z,
        constant_ratio: ratio(sp.harmonics[0].cos_amp.abs()),
        first_ratio: ratio(sp.harmonics.get(1).map_or(0.0, Harmonic::magnitude)),
        pass: m.is_some_and(|m| z >= 2 * m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample<F: Fn(f64) -> f64>(n: usize, f: F) -> Vec<f64> {
        (0..n).map(|i| f(2.0 * PI * i as f64 / n as f64)).collect()
    }

    #[test]
    fn pure_cos2_spectrum() {
        let sp = spectrum(&sample(256, |a| (2.0 * a).cos())).unwrap();
        for h in &sp.harmonics {
            if h.n == 2 {
                assert!((h.cos_amp - 1.0).abs() < 1e-12);
                assert!(h.sin_amp.abs() < 1e-12);
            } else {
                assert!(h.magnitude() < 1e-12, "n={} {:?}", h.n, h);
            }
        }
    }

    #[test]
    fn mixed_trig_polynomial_spectrum() {
        let sp = spectrum(&sample(128, |a| {
            0.3 * (3.0 * a).sin() + 0.1 * (5.0 * a).cos()
        }))
        .unwrap();
        assert!((sp.harmonics[3].sin_amp - 0.3).abs() < 1e-12);
        assert!((sp.harmonics[5].cos_amp - 0.1).abs() < 1e-12);
        assert!(sp.harmonics[3].cos_amp.abs() < 1e-12);
        assert!((sp.centered_power() - sp.source_variance).abs() < 1e-12);
    }

    #[test]
    fn constant_sequence_has_only_mean() {
        let sp = spectrum(&[1.0; 64]).unwrap();
        assert!((sp.source_mean - 1.0).abs() < 1e-15);
        assert!(sp.max_oscillating_amplitude() < 1e-14);
        assert_eq!(first_nontrivial_harmonic(&sp, 1e-12), None);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            spectrum_to(&[0.0; 10], 3),
            Err(GeomError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn nonuniform_grid_rejected() {
        let params = vec![0.0, 1.0, 2.5, 4.0];
        assert!(matches!(
            spectrum_on_grid(&params, &[1.0, 2.0, 3.0, 4.0], 2.0 * PI),
            Err(GeomError::NonUniformGrid(_))
        ));
        let params: Vec<f64> = (0..16).map(|i| i as f64 * PI / 8.0).collect();
        assert!(spectrum_on_grid(&params, &[1.0; 16], 2.0 * PI).is_ok());
    }

    #[test]
    fn first_harmonic_examples() {
        let sp = spectrum(&sample(256, |a| (7.0 * a).cos())).unwrap();
        assert_eq!(
            first_nontrivial_harmonic(&sp, default_amp_tol(&sp)),
            Some(7)
        );
        let sp = spectrum(&[0.0; 64]).unwrap();
        assert_eq!(first_nontrivial_harmonic(&sp, default_amp_tol(&sp)), None);
    }

    #[test]
    fn sign_change_examples() {
        assert_eq!(
            count_sign_changes(&sample(512, |a| (2.0 * a).sin()), 1e-9).unwrap(),
            4
        );
        assert_eq!(
            count_sign_changes(&sample(512, |a| a.sin() + 0.1 * (3.0 * a).sin()), 1e-9).unwrap(),
            2
        );
        assert_eq!(count_sign_changes(&[1.0; 32], 1e-9).unwrap(), 0);
        assert_eq!(
            count_sign_changes(&[0.0; 32], 1e-9),
            Err(GeomError::AllBelowTolerance)
        );
    }

    #[test]
    fn hysteresis_ignores_in_band_chatter() {
        // dips to zero and returns: a touch, no change
        let v = sample(400, |a| 1.0 - a.cos());
        let scan = scan_sign_changes(&v, 1e-3).unwrap();
        assert!(scan.changes.is_empty());
        assert_eq!(scan.touches.len(), 1);
        // small noise around zero between two genuine crossings
        let mut v = sample(400, |a| a.sin());
        v[100] = 1e-6;
        v[101] = -1e-6;
        assert_eq!(count_sign_changes(&v, 1e-4).unwrap(), 2);
    }

    #[test]
    fn crossing_locations_are_interpolated() {
        let n = 1000;
        let scan = scan_sign_changes(&sample(n, |a| (a - 1.0).sin()), 1e-9).unwrap();
        assert_eq!(scan.changes.len(), 2);
        let to_param = |x: f64| 2.0 * PI * x / n as f64;
        assert!((to_param(scan.changes[0]) - 1.0).abs() < 1e-4);
        assert!((to_param(scan.changes[1]) - (1.0 + PI)).abs() < 1e-4);
    }

    #[test]
    fn sturm_hurwitz_examples() {
        let r = verify_sturm_hurwitz(&sample(1024, |a| (3.0 * a).cos() + 0.2 * (4.0 * a).cos()))
            .unwrap();
        assert_eq!(r.first_harmonic, Some(3));
        assert!(r.sign_changes >= 6);
        assert!(r.pass);
        let r = verify_sturm_hurwitz(&sample(1024, f64::cos)).unwrap();
        assert_eq!(r.first_harmonic, Some(1));
        assert_eq!(r.sign_changes, 2);
        assert!(r.pass);
    }
}
