//! Instantaneous orbit features per (mode, section): forward/backward
//! amplitudes, ellipse semi-axes, unwrapped phases, inclination, and the
//! shape-and-directivity index, plus the classical stationary full spectrum
//! for cross-checking.
//!
//! Undefined samples (near-zero branch magnitude, degenerate denominators)
//! are encoded as NaN throughout.

use num_complex::Complex64;

use crate::analytic::{analytic_of_slice, fft_forward};
use crate::error::{Error, Result};
use crate::pipeline::{reconstruct_component, ComplexImfPair, McvmdResult};
use crate::series::{ComplexSeries, RealSeries};

/// Degeneracy threshold relative to the record's peak magnitude: branches
/// below it have no usable phase.
pub const DEGENERACY_EPS_REL: f64 = 1e-6;

/// Orbit rotation sense relative to shaft rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecessionDirection {
    /// Whirl in the rotation direction (positive-frequency content wins).
    Forward,
    /// Whirl against the rotation direction.
    Backward,
    /// Equal forward and backward amplitudes; no defined direction.
    CircularDegenerate,
}

/// Per-sample orbit features of one mode of one section, on the common time
/// base of the record. NaN marks undefined samples.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitFeatureSeries {
    pub r_plus: Vec<f64>,
    pub r_minus: Vec<f64>,
    pub r_a: Vec<f64>,
    pub r_b: Vec<f64>,
    pub phi_f: Vec<f64>,
    pub phi_b: Vec<f64>,
    pub theta: Vec<f64>,
    pub sdi: Vec<f64>,
    sample_rate: f64,
}

impl OrbitFeatureSeries {
    /// Assemble every feature for one complex IMF pair; `component` is the
    /// single-mode orbit signal zf + zb.
    pub fn compute(pair: &ComplexImfPair, component: &ComplexSeries) -> Self {
        let (r_plus, r_minus) = instantaneous_amplitudes(pair);
        let (r_a, r_b) = semi_axes(&r_plus, &r_minus);
        let (phi_f, phi_b) = instantaneous_phases(pair);
        let theta = inclination(&phi_f, &phi_b);
        let sdi = sdi(component, &r_plus, &r_minus);
        Self {
            r_plus,
            r_minus,
            r_a,
            r_b,
            phi_f,
            phi_b,
            theta,
            sdi,
            sample_rate: pair.zf.sample_rate(),
        }
    }

    /// Features of mode `n`, section `i` of a decomposition result.
    pub fn for_mode(result: &McvmdResult, n: usize, i: usize) -> Result<Self> {
        let pair = result.pair(n, i)?;
        let component = reconstruct_component(result, n, i)?;
        Ok(Self::compute(pair, &component))
    }

    pub fn len(&self) -> usize {
        self.r_plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_plus.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }
}

/// Instantaneous forward/backward amplitudes |zf|, |zb| per sample.
pub fn instantaneous_amplitudes(pair: &ComplexImfPair) -> (Vec<f64>, Vec<f64>) {
    let r_plus = pair.zf.samples().iter().map(|v| v.norm()).collect();
    let r_minus = pair.zb.samples().iter().map(|v| v.norm()).collect();
    (r_plus, r_minus)
}

/// Semi-major and semi-minor axes: r_a = r+ + r-, r_b = |r+ - r-|.
pub fn semi_axes(r_plus: &[f64], r_minus: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let r_a = r_plus.iter().zip(r_minus).map(|(p, m)| p + m).collect();
    let r_b = r_plus
        .iter()
        .zip(r_minus)
        .map(|(p, m)| (p - m).abs())
        .collect();
    (r_a, r_b)
}

fn branch_eps(pair: &ComplexImfPair) -> f64 {
    let peak = pair
        .zf
        .samples()
        .iter()
        .chain(pair.zb.samples())
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    DEGENERACY_EPS_REL * peak
}

/// Four-quadrant phase of defined samples, unwrapped by the +-pi jump rule.
/// Samples below `eps` in magnitude stay NaN; unwrapping continues across
/// gaps from the last defined sample.
fn unwrap_phases(samples: &[Complex64], eps: f64) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let mut out = vec![f64::NAN; samples.len()];
    let mut prev: Option<f64> = None;
    let mut offset = 0.0;
    for (i, v) in samples.iter().enumerate() {
        if v.norm() <= eps {
            continue;
        }
        let raw = v.im.atan2(v.re);
        if let Some(p) = prev {
            let mut d = raw - p;
            while d > PI {
                d -= TAU;
                offset -= TAU;
            }
            while d < -PI {
                d += TAU;
                offset += TAU;
            }
        }
        out[i] = raw + offset;
        prev = Some(raw);
    }
    out
}

/// Unwrapped instantaneous phases of the forward and backward IMFs.
/// A branch whose whole series sits below the degeneracy threshold comes
/// back fully undefined.
pub fn instantaneous_phases(pair: &ComplexImfPair) -> (Vec<f64>, Vec<f64>) {
    let eps = branch_eps(pair);
    (
        unwrap_phases(pair.zf.samples(), eps),
        unwrap_phases(pair.zb.samples(), eps),
    )
}

/// Instantaneous inclination of the ellipse major axis:
/// theta = (phi_f + phi_b) / 2, reduced into [0, pi). Undefined wherever
/// either phase is.
pub fn inclination(phi_f: &[f64], phi_b: &[f64]) -> Vec<f64> {
    use std::f64::consts::PI;
    phi_f
        .iter()
        .zip(phi_b)
        .map(|(f, b)| {
            if f.is_nan() || b.is_nan() {
                f64::NAN
            } else {
                ((f + b) / 2.0).rem_euclid(PI)
            }
        })
        .collect()
}

/// Shape and directivity index per sample:
/// (r+^2 - r-^2) / (|xa| |ya|) with xa, ya the analytic signals of the real
/// and imaginary orbit channels. Clamped into [-1, 1]; excess beyond 1e-6
/// is logged. Degenerate denominators yield NaN.
pub fn sdi(component: &ComplexSeries, r_plus: &[f64], r_minus: &[f64]) -> Vec<f64> {
    let xa = analytic_of_slice(&component.re());
    let ya = analytic_of_slice(&component.im());
    let peak = xa.iter().chain(&ya).map(|v| v.norm()).fold(0.0, f64::max);
    let eps_sq = (DEGENERACY_EPS_REL * peak).powi(2);
    let mut max_excess = 0.0_f64;
    let out = r_plus
        .iter()
        .zip(r_minus)
        .zip(xa.iter().zip(&ya))
        .map(|((rp, rm), (x, y))| {
            let denom = x.norm() * y.norm();
            if denom <= eps_sq {
                return f64::NAN;
            }
            let raw = (rp * rp - rm * rm) / denom;
            max_excess = max_excess.max(raw.abs() - 1.0);
            raw.clamp(-1.0, 1.0)
        })
        .collect();
    if max_excess > 1e-6 {
        log::warn!("SDI exceeded [-1, 1] by {max_excess:.3e} before clamping");
    }
    out
}

/// Per-sample precession classification plus interpolated zero-crossing
/// timestamps of an SDI series.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecessionSummary {
    /// None where the SDI is undefined.
    pub per_sample: Vec<Option<PrecessionDirection>>,
    /// Zero-crossing instants in seconds, linearly interpolated.
    pub zero_crossings_s: Vec<f64>,
}

pub fn precession_direction(sdi: &[f64], sample_rate: f64) -> PrecessionSummary {
    let per_sample = sdi
        .iter()
        .map(|&v| {
            if v.is_nan() {
                None
            } else if v > 0.0 {
                Some(PrecessionDirection::Forward)
            } else if v < 0.0 {
                Some(PrecessionDirection::Backward)
            } else {
                Some(PrecessionDirection::CircularDegenerate)
            }
        })
        .collect();
    let mut zero_crossings_s = Vec::new();
    for i in 0..sdi.len().saturating_sub(1) {
        let (a, b) = (sdi[i], sdi[i + 1]);
        if a.is_nan() || b.is_nan() {
            continue;
        }
        if a == 0.0 {
            zero_crossings_s.push(i as f64 / sample_rate);
        } else if a * b < 0.0 {
            let frac = a / (a - b);
            zero_crossings_s.push((i as f64 + frac) / sample_rate);
        }
    }
    if let Some(&last) = sdi.last() {
        if last == 0.0 {
            zero_crossings_s.push((sdi.len() - 1) as f64 / sample_rate);
        }
    }
    PrecessionSummary {
        per_sample,
        zero_crossings_s,
    }
}

/// One line of the stationary full spectrum, in rotating-vector amplitude
/// convention (a unit forward circle reports r_fwd = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct FullSpectrumLine {
    pub frequency_hz: f64,
    pub r_fwd: f64,
    pub r_bwd: f64,
    pub inclination_rad: f64,
    pub precession: PrecessionDirection,
}

/// Classical full spectrum of a stationary two-probe record: per FFT bin,
/// the forward and backward rotating amplitudes, the major-axis inclination,
/// and the precession direction.
pub fn full_spectrum(x: &RealSeries, y: &RealSeries) -> Result<Vec<FullSpectrumLine>> {
    use std::f64::consts::PI;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.sample_rate() != y.sample_rate() {
        return Err(Error::SampleRateMismatch {
            left: x.sample_rate(),
            right: y.sample_rate(),
        });
    }
    let len = x.len();
    let fs = x.sample_rate();
    let mut spectrum: Vec<Complex64> = x
        .samples()
        .iter()
        .zip(y.samples())
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect();
    fft_forward(&mut spectrum);
    let scale = 1.0 / len as f64;

    let mut lines = Vec::with_capacity(len / 2 + 1);
    for k in 0..=len / 2 {
        // forward amplitude from bin +k, backward from bin -k
        let (fwd_coef, bwd_coef) = if k == 0 {
            (spectrum[0] / 2.0, spectrum[0] / 2.0)
        } else if 2 * k == len {
            // Nyquist is a non-positive frequency: backward only
            (Complex64::new(0.0, 0.0), spectrum[k])
        } else {
            (spectrum[k], spectrum[len - k])
        };
        let r_fwd = fwd_coef.norm() * scale;
        let r_bwd = bwd_coef.norm() * scale;
        let inclination_rad = if r_fwd == 0.0 {
            bwd_coef.arg().rem_euclid(PI)
        } else if r_bwd == 0.0 {
            fwd_coef.arg().rem_euclid(PI)
        } else {
            ((fwd_coef.arg() + bwd_coef.arg()) / 2.0).rem_euclid(PI)
        };
        let precession = if r_fwd > r_bwd {
            PrecessionDirection::Forward
        } else if r_fwd < r_bwd {
            PrecessionDirection::Backward
        } else {
            PrecessionDirection::CircularDegenerate
        };
        lines.push(FullSpectrumLine {
            frequency_hz: k as f64 * fs / len as f64,
            r_fwd,
            r_bwd,
            inclination_rad,
            precession,
        });
    }
    Ok(lines)
}
