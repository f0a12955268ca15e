//! Synthetic multi-section test signals: a two-section amplitude-modulated
//! record with opposing precession patterns, and a single-tone record whose
//! precession direction flips mid-record.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::series::{add_noise, MultiSectionRecord, NoiseSpec, RealSeries};

/// Tone frequency of the bistable record (Hz).
pub const BISTABLE_TONE_HZ: f64 = 96.0;

fn check_duration(duration_s: f64, sample_rate: f64) -> Result<usize> {
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::InvalidSampleRate(sample_rate));
    }
    let len = (duration_s * sample_rate).round() as usize;
    if len < 2 {
        return Err(Error::TooShort { len });
    }
    Ok(len)
}

/// Apply Gaussian noise to every probe series of a record, one independent
/// sub-seeded stream per series. The no-noise sentinel returns a copy.
pub fn apply_noise(record: &MultiSectionRecord, spec: &NoiseSpec) -> Result<MultiSectionRecord> {
    if spec.is_noiseless() {
        return Ok(record.clone());
    }
    let mut sections = Vec::with_capacity(record.section_count());
    for (i, (x, y)) in record.sections().iter().enumerate() {
        let sx = NoiseSpec::new(spec.snr_db(), spec.channel_seed(2 * i as u64))?;
        let sy = NoiseSpec::new(spec.snr_db(), spec.channel_seed(2 * i as u64 + 1))?;
        sections.push((add_noise(x, &sx)?, add_noise(y, &sy)?));
    }
    MultiSectionRecord::new(sections, record.labels().to_vec())
}

/// Two bearing sections, each carrying amplitude-modulated 16 Hz and 32 Hz
/// components. Section 1 whirls forward at 16 Hz and backward at 32 Hz;
/// section 2 is the opposite.
pub fn simulate_two_section(
    duration_s: f64,
    sample_rate: f64,
    noise: &NoiseSpec,
) -> Result<MultiSectionRecord> {
    let len = check_duration(duration_s, sample_rate)?;
    let x1 = RealSeries::from_fn(len, sample_rate, |t| {
        (2.0 + 0.5 * (2.5 * PI * t).cos()) * (TAU * 16.0 * t).cos()
            + (1.2 + 0.3 * (8.0 * PI * t).cos()) * (TAU * 32.0 * t).cos()
    })?;
    let y1 = RealSeries::from_fn(len, sample_rate, |t| {
        (2.0 + 0.8 * (5.0 * PI * t).cos()) * (TAU * 16.0 * t + 5.0 * PI / 3.0).cos()
            + (1.4 + 0.53 * (6.0 * PI * t).cos()) * (TAU * 32.0 * t + 2.0 * PI / 7.0).cos()
    })?;
    let x2 = RealSeries::from_fn(len, sample_rate, |t| {
        (2.6 + 0.7 * (5.0 * PI * t).cos()) * (TAU * 16.0 * t).cos()
            + (1.5 + 0.5 * (15.0 * PI * t).cos()) * (TAU * 32.0 * t).cos()
    })?;
    let y2 = RealSeries::from_fn(len, sample_rate, |t| {
        (2.8 + 0.6 * (10.0 * PI * t).cos()) * (TAU * 16.0 * t + 3.0 * PI / 8.0).cos()
            + (1.7 + 0.33 * (10.0 * PI * t).cos()) * (TAU * 32.0 * t + 12.0 * PI / 7.0).cos()
    })?;
    let record = MultiSectionRecord::with_default_labels(vec![(x1, y1), (x2, y2)])?;
    apply_noise(&record, noise)
}

/// Two sections tracing a single-frequency elliptical orbit whose
/// forward/backward amplitude ratio inverts at `jump_time_s` (precession
/// reversal) while the tone frequency stays fixed.
pub fn simulate_bistable(
    duration_s: f64,
    sample_rate: f64,
    jump_time_s: f64,
) -> Result<MultiSectionRecord> {
    let len = check_duration(duration_s, sample_rate)?;
    if !(jump_time_s > 0.0 && jump_time_s < duration_s) {
        return Err(Error::InvalidArgument(format!(
            "jump time {jump_time_s} s must lie inside (0, {duration_s})"
        )));
    }
    // (forward radius, backward radius, phase) per section; radii swap at the jump
    let params = [(1.5, 0.5, 0.0), (1.2, 0.4, 0.7)];
    let mut sections = Vec::with_capacity(params.len());
    for &(fwd, bwd, phase) in &params {
        let point = move |t: f64| {
            let (rf, rb) = if t < jump_time_s {
                (fwd, bwd)
            } else {
                (bwd, fwd)
            };
            let w = TAU * BISTABLE_TONE_HZ * t + phase;
            (rf * w.cos() + rb * w.cos(), rf * w.sin() - rb * w.sin())
        };
        let x = RealSeries::from_fn(len, sample_rate, |t| point(t).0)?;
        let y = RealSeries::from_fn(len, sample_rate, |t| point(t).1)?;
        sections.push((x, y));
    }
    MultiSectionRecord::with_default_labels(sections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::fft_forward;
    use num_complex::Complex64;

    #[test]
    fn two_section_values_at_t0() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        let (x1, y1) = &rec.sections()[0];
        assert!((x1.samples()[0] - 4.0).abs() < 1e-12);
        let expected_y1 = 2.8 * (5.0 * PI / 3.0).cos() + 1.93 * (2.0 * PI / 7.0).cos();
        assert!((y1.samples()[0] - expected_y1).abs() < 1e-12);
    }

    #[test]
    fn two_section_dimensions() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        assert_eq!(rec.section_count(), 2);
        assert_eq!(rec.len(), 1024);
        assert_eq!(rec.sample_rate(), 1024.0);
    }

    #[test]
    fn two_section_tones_land_on_integer_bins() {
        // 16 and 32 full cycles in the 1 s window: FFT peaks exactly at bins 16 and 32
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        for (x, _) in rec.sections() {
            let mut buf: Vec<Complex64> = x
                .samples()
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            fft_forward(&mut buf);
            let mags: Vec<f64> = buf.iter().take(512).map(|v| v.norm()).collect();
            let mut order: Vec<usize> = (0..512).collect();
            order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]));
            let mut top: Vec<usize> = order[..2].to_vec();
            top.sort_unstable();
            assert_eq!(top, vec![16, 32]);
            // energy concentrates around the carriers; the widest AM sideband
            // sits 7.5 Hz out, beyond that only leakage from the
            // non-integer-cycle envelopes remains
            let stray: f64 = (0..512_usize)
                .filter(|&k| k.abs_diff(16) > 8 && k.abs_diff(32) > 8)
                .map(|k| mags[k] * mags[k])
                .sum();
            let total: f64 = mags.iter().map(|m| m * m).sum();
            assert!(stray / total < 5e-3, "stray fraction {}", stray / total);
        }
    }

    #[test]
    fn two_section_noise_determinism() {
        let spec = NoiseSpec::new(8.78, 7).unwrap();
        let a = simulate_two_section(1.0, 1024.0, &spec).unwrap();
        let b = simulate_two_section(1.0, 1024.0, &spec).unwrap();
        assert_eq!(a, b);
        // distinct probe series get distinct noise streams
        let (x1, y1) = &a.sections()[0];
        let clean = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        let (cx1, cy1) = &clean.sections()[0];
        let nx: Vec<f64> = x1
            .samples()
            .iter()
            .zip(cx1.samples())
            .map(|(a, b)| a - b)
            .collect();
        let ny: Vec<f64> = y1
            .samples()
            .iter()
            .zip(cy1.samples())
            .map(|(a, b)| a - b)
            .collect();
        assert!(nx.iter().zip(&ny).any(|(a, b)| (a - b).abs() > 1e-6));
    }

    #[test]
    fn bistable_radii_swap_at_jump() {
        let fs = 2000.0;
        let rec = simulate_bistable(1.0, fs, 0.2).unwrap();
        let (x, y) = &rec.sections()[0];
        let p = crate::series::make_complex(x, y).unwrap();
        let (fwd, bwd) = crate::analytic::split_forward_backward(&p);
        // mid-segment envelopes, away from the jump transient
        let probe =
            |s: &crate::series::ComplexSeries, t: f64| s.samples()[(t * fs) as usize].norm();
        assert!(probe(&fwd, 0.1) > probe(&bwd, 0.1)); // forward precession first
        assert!(probe(&fwd, 0.6) < probe(&bwd, 0.6)); // backward after the jump
        assert!((probe(&fwd, 0.1) - 1.5).abs() < 0.05);
        assert!((probe(&bwd, 0.1) - 0.5).abs() < 0.05);
    }

    #[test]
    fn bistable_frequency_constant_across_jump() {
        let fs = 2000.0;
        let rec = simulate_bistable(1.0, fs, 0.5).unwrap();
        let (x, _) = &rec.sections()[0];
        // dominant FFT bin of each half matches the tone
        for half in [&x.samples()[..1000], &x.samples()[1000..]] {
            let mut buf: Vec<Complex64> = half.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft_forward(&mut buf);
            let peak = (0..500)
                .max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm()))
                .unwrap();
            let freq = peak as f64 * fs / half.len() as f64;
            assert!((freq - BISTABLE_TONE_HZ).abs() < 2.0 * fs / half.len() as f64);
        }
    }

    #[test]
    fn bistable_rejects_jump_outside_record() {
        assert!(simulate_bistable(1.0, 1000.0, 0.0).is_err());
        assert!(simulate_bistable(1.0, 1000.0, 1.0).is_err());
        assert!(simulate_bistable(1.0, 1000.0, 0.5).is_ok());
    }
}
