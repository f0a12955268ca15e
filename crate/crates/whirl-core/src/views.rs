//! Signed-frequency time-energy grids and 3D instantaneous orbit map
//! geometry: per-instant ellipse stacks along the shaft axis with posture
//! lines connecting equal-phase anchor points.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::features::{instantaneous_phases, OrbitFeatureSeries, PrecessionDirection};
use crate::pipeline::McvmdResult;

/// Joint instantaneous frequency of mode `n` in Hz, per sample: the average
/// of the per-branch estimates d phi_f/dt and -d phi_b/dt over every branch
/// defined at that sample (2K branches when all are usable). NaN where no
/// branch contributes.
pub fn mode_if(result: &McvmdResult, n: usize) -> Result<Vec<f64>> {
    if n >= result.n_modes() {
        return Err(Error::IndexOutOfRange {
            what: "mode",
            index: n,
            count: result.n_modes(),
        });
    }
    let len = result.len();
    let fs = result.sample_rate();
    let mut sum = vec![0.0_f64; len];
    let mut contributors = vec![0_usize; len];
    for i in 0..result.n_sections() {
        let (phi_f, phi_b) = instantaneous_phases(result.pair(n, i)?);
        for (deriv, sign) in [
            (phase_derivative(&phi_f, fs), 1.0),
            (phase_derivative(&phi_b, fs), -1.0),
        ] {
            for (t, &d) in deriv.iter().enumerate() {
                if d.is_finite() {
                    sum[t] += sign * d;
                    contributors[t] += 1;
                }
            }
        }
    }
    Ok((0..len)
        .map(|t| {
            if contributors[t] > 0 {
                sum[t] / contributors[t] as f64 / TAU
            } else {
                f64::NAN
            }
        })
        .collect())
}

/// Centered finite differences, one-sided at the series ends; rad/s.
/// Undefined where a needed neighbor is undefined.
fn phase_derivative(phase: &[f64], fs: f64) -> Vec<f64> {
    let n = phase.len();
    (0..n)
        .map(|t| {
            if t == 0 {
                (phase[1] - phase[0]) * fs
            } else if t == n - 1 {
                (phase[n - 1] - phase[n - 2]) * fs
            } else {
                (phase[t + 1] - phase[t - 1]) * fs / 2.0
            }
        })
        .collect()
}

/// Discretized time-frequency energy with a signed frequency axis. One
/// energy plane per section, indexed `[time][frequency bin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFsGrid {
    pub times_s: Vec<f64>,
    /// Strictly increasing bin centers, symmetric about 0 Hz.
    pub freqs_hz: Vec<f64>,
    pub energy: Vec<Vec<Vec<f64>>>,
}

impl TimeFsGrid {
    pub fn n_sections(&self) -> usize {
        self.energy.len()
    }

    fn bin_of(&self, freq_hz: f64, resolution: f64) -> usize {
        let half = (self.freqs_hz.len() - 1) / 2;
        let idx = (freq_hz / resolution).round() as isize + half as isize;
        idx.clamp(0, self.freqs_hz.len() as isize - 1) as usize
    }
}

/// Deposit, per mode and section, the forward amplitude at the bin holding
/// +IF(t) and the backward amplitude at the bin holding -IF(t); modes
/// superpose additively. Samples with undefined IF deposit nothing.
pub fn time_fs(result: &McvmdResult, freq_resolution_hz: f64) -> Result<TimeFsGrid> {
    if !(freq_resolution_hz.is_finite() && freq_resolution_hz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "frequency resolution must be positive, got {freq_resolution_hz}"
        )));
    }
    let fs = result.sample_rate();
    let len = result.len();
    let half_bins = ((fs / 2.0) / freq_resolution_hz).ceil() as usize;
    let freqs_hz: Vec<f64> = (-(half_bins as isize)..=half_bins as isize)
        .map(|m| m as f64 * freq_resolution_hz)
        .collect();
    let times_s: Vec<f64> = (0..len).map(|t| t as f64 / fs).collect();
    let mut grid = TimeFsGrid {
        times_s,
        freqs_hz,
        energy: vec![vec![vec![0.0; 2 * half_bins + 1]; len]; result.n_sections()],
    };
    for n in 0..result.n_modes() {
        let iff = mode_if(result, n)?;
        for i in 0..result.n_sections() {
            let pair = result.pair(n, i)?;
            for (t, &f) in iff.iter().enumerate() {
                if !f.is_finite() {
                    continue;
                }
                let plus = grid.bin_of(f, freq_resolution_hz);
                let minus = grid.bin_of(-f, freq_resolution_hz);
                grid.energy[i][t][plus] += pair.zf.samples()[t].norm();
                grid.energy[i][t][minus] += pair.zb.samples()[t].norm();
            }
        }
    }
    Ok(grid)
}

/// Instantaneous ellipse of one section inside an [`IomFrame`].
#[derive(Debug, Clone, PartialEq)]
pub struct SectionEllipse {
    pub axial_position: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub theta_rad: f64,
    /// Set when the orbit is circular and the major axis is undefined;
    /// `theta_rad` is then reported as 0.
    pub degenerate_theta: bool,
    /// None when the SDI is undefined at the frame sample.
    pub precession: Option<PrecessionDirection>,
    /// Orbit position zf + zb at the frame sample.
    pub orbit_point: (f64, f64),
    /// Equal-phase anchor points on the instantaneous ellipse; anchor 0 is
    /// the initial phase point (forward-branch phase at a multiple of 2 pi).
    pub anchors: Vec<(f64, f64)>,
}

/// One instant of the 3D orbit map: per-section ellipses stacked along the
/// shaft axis and posture lines connecting matching anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct IomFrame {
    pub time_s: f64,
    pub sample_index: usize,
    /// Phase spacing between consecutive anchors, 2 pi / n_anchors.
    pub posture_anchor_phase_rad: f64,
    pub sections: Vec<SectionEllipse>,
    /// Posture line j connects anchor j of every section, ordered by axial
    /// position; points are (axial, x, y).
    pub posture_lines: Vec<Vec<(f64, f64, f64)>>,
}

/// Build the orbit-map frame of mode `n` at `time_s` (snapped to the nearest
/// sample). `features` holds one [`OrbitFeatureSeries`] per section for this
/// mode. Axial positions default to 0, 1, ..., K-1.
///
/// Anchors advance with the rotation phase, so each section's anchor
/// sequence turns in its own precession direction.
pub fn build_iom_frame(
    result: &McvmdResult,
    n: usize,
    time_s: f64,
    features: &[OrbitFeatureSeries],
    n_anchors: usize,
    axial_positions: Option<&[f64]>,
) -> Result<IomFrame> {
    if n >= result.n_modes() {
        return Err(Error::IndexOutOfRange {
            what: "mode",
            index: n,
            count: result.n_modes(),
        });
    }
    let k = result.n_sections();
    if features.len() != k {
        return Err(Error::LengthMismatch {
            left: features.len(),
            right: k,
        });
    }
    if n_anchors == 0 {
        return Err(Error::InvalidArgument("n_anchors must be >= 1".into()));
    }
    let fs = result.sample_rate();
    let len = result.len();
    let duration = (len - 1) as f64 / fs;
    if !(0.0..=duration).contains(&time_s) {
        return Err(Error::InvalidArgument(format!(
            "time {time_s} s outside record [0, {duration}]"
        )));
    }
    let axial: Vec<f64> = match axial_positions {
        Some(a) => {
            if a.len() != k {
                return Err(Error::LengthMismatch {
                    left: a.len(),
                    right: k,
                });
            }
            a.to_vec()
        }
        None => (0..k).map(|i| i as f64).collect(),
    };
    let idx = ((time_s * fs).round() as usize).min(len - 1);
    let increment = TAU / n_anchors as f64;

    let mut sections = Vec::with_capacity(k);
    for (i, f) in features.iter().enumerate() {
        let pair = result.pair(n, i)?;
        let r_plus = f.r_plus[idx];
        let r_minus = f.r_minus[idx];
        let theta = f.theta[idx];
        let degenerate_theta = theta.is_nan();
        let sdi = f.sdi[idx];
        let precession = if sdi.is_nan() {
            None
        } else if sdi > 0.0 {
            Some(PrecessionDirection::Forward)
        } else if sdi < 0.0 {
            Some(PrecessionDirection::Backward)
        } else {
            Some(PrecessionDirection::CircularDegenerate)
        };
        let point = pair.zf.samples()[idx] + pair.zb.samples()[idx];

        // frozen-ellipse parameterization: advancing the rotation phase by
        // delta moves the forward vector +delta and the backward vector
        // -delta, so their phase sum (twice the inclination) is invariant
        let two_theta = if !f.phi_f[idx].is_nan() && !f.phi_b[idx].is_nan() {
            f.phi_f[idx] + f.phi_b[idx]
        } else if !degenerate_theta {
            2.0 * theta
        } else {
            0.0
        };
        let anchors = (0..n_anchors)
            .map(|j| {
                let psi = j as f64 * increment;
                let p = r_plus * Complex64::new(0.0, psi).exp()
                    + r_minus * Complex64::new(0.0, two_theta - psi).exp();
                (p.re, p.im)
            })
            .collect();

        sections.push(SectionEllipse {
            axial_position: axial[i],
            r_a: f.r_a[idx],
            r_b: f.r_b[idx],
            theta_rad: if degenerate_theta { 0.0 } else { theta },
            degenerate_theta,
            precession,
            orbit_point: (point.re, point.im),
            anchors,
        });
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| axial[a].total_cmp(&axial[b]));
    let posture_lines = (0..n_anchors)
        .map(|j| {
            order
                .iter()
                .map(|&i| {
                    let (x, y) = sections[i].anchors[j];
                    (sections[i].axial_position, x, y)
                })
                .collect()
        })
        .collect();

    Ok(IomFrame {
        time_s,
        sample_index: idx,
        posture_anchor_phase_rad: increment,
        sections,
        posture_lines,
    })
}

/// Parametric polyline of an ellipse with semi-axes (r_a, r_b) rotated by
/// `theta`; `s` uniform on [0, 2 pi). Expects r_a >= r_b >= 0.
pub fn sample_ellipse(r_a: f64, r_b: f64, theta: f64, n_points: usize) -> Vec<(f64, f64)> {
    let (sin_t, cos_t) = theta.sin_cos();
    (0..n_points)
        .map(|m| {
            let s = TAU * m as f64 / n_points as f64;
            let x = r_a * s.cos();
            let y = r_b * s.sin();
            (x * cos_t - y * sin_t, x * sin_t + y * cos_t)
        })
        .collect()
}
