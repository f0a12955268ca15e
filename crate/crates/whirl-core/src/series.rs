//! Core series types: real and complex sample vectors with a sample rate,
//! multi-section probe records, and reproducible noise injection.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

fn check_rate(sample_rate: f64) -> Result<()> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::InvalidSampleRate(sample_rate));
    }
    Ok(())
}

/// A uniformly sampled real-valued signal (probe displacement, arbitrary
/// amplitude units). At least two samples, all finite, positive sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSeries {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl RealSeries {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        check_rate(sample_rate)?;
        if samples.len() < 2 {
            return Err(Error::TooShort { len: samples.len() });
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "real series samples",
            });
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    /// Evaluate `f(t)` at t = n / sample_rate for n = 0..len.
    pub fn from_fn(len: usize, sample_rate: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..len).map(|n| f(n as f64 / sample_rate)).collect();
        Self::new(samples, sample_rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of squared samples.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }
}

/// A uniformly sampled complex-valued signal, e.g. an orbit signal
/// x(t) + j y(t) or an analytic signal.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    samples: Vec<Complex64>,
    sample_rate: f64,
}

impl ComplexSeries {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        check_rate(sample_rate)?;
        if samples.len() < 2 {
            return Err(Error::TooShort { len: samples.len() });
        }
        if !samples.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "complex series samples",
            });
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn re(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.im).collect()
    }
}

/// Combine two perpendicular probe series into the complex orbit signal
/// p\[n\] = x\[n\] + j y\[n\].
pub fn make_complex(x: &RealSeries, y: &RealSeries) -> Result<ComplexSeries> {
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
    let samples = x
        .samples()
        .iter()
        .zip(y.samples())
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect();
    ComplexSeries::new(samples, x.sample_rate())
}

/// One bearing section: a pair of perpendicular probe series sharing a
/// common time base, plus a group of such sections along the shaft.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSectionRecord {
    sections: Vec<(RealSeries, RealSeries)>,
    labels: Vec<String>,
}

impl MultiSectionRecord {
    /// All series must share one sample rate and one length; K >= 1.
    pub fn new(sections: Vec<(RealSeries, RealSeries)>, labels: Vec<String>) -> Result<Self> {
        if sections.is_empty() {
            return Err(Error::EmptyRecord);
        }
        if labels.len() != sections.len() {
            return Err(Error::LabelCountMismatch {
                labels: labels.len(),
                sections: sections.len(),
            });
        }
        let len = sections[0].0.len();
        let rate = sections[0].0.sample_rate();
        for (x, y) in &sections {
            for s in [x, y] {
                if s.len() != len {
                    return Err(Error::LengthMismatch {
                        left: len,
                        right: s.len(),
                    });
                }
                if s.sample_rate() != rate {
                    return Err(Error::SampleRateMismatch {
                        left: rate,
                        right: s.sample_rate(),
                    });
                }
            }
        }
        Ok(Self { sections, labels })
    }

    /// Labels each section `section1`, `section2`, ...
    pub fn with_default_labels(sections: Vec<(RealSeries, RealSeries)>) -> Result<Self> {
        let labels = (1..=sections.len())
            .map(|i| format!("section{i}"))
            .collect();
        Self::new(sections, labels)
    }

    pub fn sections(&self) -> &[(RealSeries, RealSeries)] {
        &self.sections
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of bearing sections K.
    pub fn section_count(&self) -> usize {
        self.sections.len()
    }

    pub fn len(&self) -> usize {
        self.sections[0].0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample_rate(&self) -> f64 {
        self.sections[0].0.sample_rate()
    }
}

/// Additive Gaussian noise level and a reproducibility seed. An infinite
/// `snr_db` is the no-noise sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    snr_db: f64,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(snr_db: f64, seed: u64) -> Result<Self> {
        if snr_db.is_nan() {
            return Err(Error::NonFinite {
                context: "noise SNR",
            });
        }
        Ok(Self { snr_db, seed })
    }

    /// No-noise sentinel.
    pub fn none() -> Self {
        Self {
            snr_db: f64::INFINITY,
            seed: 0,
        }
    }

    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_noiseless(&self) -> bool {
        self.snr_db == f64::INFINITY
    }

    /// Derive an independent sub-seed for channel `index` so that one record
    /// seed yields distinct, reproducible noise per probe series.
    pub fn channel_seed(&self, index: u64) -> u64 {
        self.seed
            .wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// Add zero-mean Gaussian noise scaled so the empirical signal-to-noise
/// ratio equals `spec.snr_db()` exactly. Deterministic under a fixed seed.
pub fn add_noise(x: &RealSeries, spec: &NoiseSpec) -> Result<RealSeries> {
    if spec.is_noiseless() {
        return Ok(x.clone());
    }
    let signal_power = x.power();
    if signal_power == 0.0 {
        return Err(Error::ZeroEnergy {
            context: "add_noise input",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
    let noise: Vec<f64> = (0..x.len()).map(|_| rng.sample(StandardNormal)).collect();
    let raw_power = noise.iter().map(|v| v * v).sum::<f64>() / noise.len() as f64;
    let target_power = signal_power / 10f64.powf(spec.snr_db() / 10.0);
    let scale = (target_power / raw_power).sqrt();
    let samples = x
        .samples()
        .iter()
        .zip(&noise)
        .map(|(&s, &n)| s + n * scale)
        .collect();
    RealSeries::new(samples, x.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, len: usize, fs: f64) -> RealSeries {
        RealSeries::from_fn(len, fs, |t| (std::f64::consts::TAU * freq * t).cos()).unwrap()
    }

    #[test]
    fn make_complex_componentwise() {
        let x = RealSeries::new(vec![1.0, 0.0], 10.0).unwrap();
        let y = RealSeries::new(vec![0.0, 1.0], 10.0).unwrap();
        let p = make_complex(&x, &y).unwrap();
        assert_eq!(p.samples()[0], Complex64::new(1.0, 0.0));
        assert_eq!(p.samples()[1], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn make_complex_zero_imaginary() {
        let x = tone(3.0, 64, 64.0);
        let y = RealSeries::new(vec![0.0; 64], 64.0).unwrap();
        let p = make_complex(&x, &y).unwrap();
        for (ps, &xs) in p.samples().iter().zip(x.samples()) {
            assert_eq!(ps.re, xs);
            assert_eq!(ps.im, 0.0);
        }
    }

    #[test]
    fn make_complex_unit_circle() {
        let fs = 1024.0;
        let x =
            RealSeries::from_fn(1024, fs, |t| (std::f64::consts::TAU * 16.0 * t).cos()).unwrap();
        let y =
            RealSeries::from_fn(1024, fs, |t| (std::f64::consts::TAU * 16.0 * t).sin()).unwrap();
        let p = make_complex(&x, &y).unwrap();
        for s in p.samples() {
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn make_complex_rejects_mismatch_with_both_values() {
        let x = RealSeries::new(vec![0.0; 8], 10.0).unwrap();
        let y = RealSeries::new(vec![0.0; 9], 10.0).unwrap();
        match make_complex(&x, &y) {
            Err(Error::LengthMismatch { left: 8, right: 9 }) => {}
            other => panic!("expected length mismatch, got {other:?}"),
        }
        let y = RealSeries::new(vec![0.0; 8], 20.0).unwrap();
        match make_complex(&x, &y) {
            Err(Error::SampleRateMismatch { left, right }) => {
                assert_eq!((left, right), (10.0, 20.0));
            }
            other => panic!("expected rate mismatch, got {other:?}"),
        }
    }

    #[test]
    fn series_invariants_enforced() {
        assert!(matches!(
            RealSeries::new(vec![1.0], 10.0),
            Err(Error::TooShort { len: 1 })
        ));
        assert!(matches!(
            RealSeries::new(vec![1.0, f64::NAN], 10.0),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            RealSeries::new(vec![1.0, 2.0], 0.0),
            Err(Error::InvalidSampleRate(_))
        ));
    }

    #[test]
    fn noiseless_sentinel_is_identity() {
        let x = tone(5.0, 128, 128.0);
        let out = add_noise(&x, &NoiseSpec::none()).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn zero_db_noise_power_matches_signal_power() {
        let x = RealSeries::from_fn(4096, 1024.0, |t| {
            std::f64::consts::SQRT_2 * (std::f64::consts::TAU * 16.0 * t).cos()
        })
        .unwrap();
        let spec = NoiseSpec::new(0.0, 42).unwrap();
        let noisy = add_noise(&x, &spec).unwrap();
        let noise_power = noisy
            .samples()
            .iter()
            .zip(x.samples())
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>()
            / x.len() as f64;
        let signal_power = x.power();
        assert!((noise_power / signal_power - 1.0).abs() < 0.01);
    }

    #[test]
    fn stated_snr_gives_expected_noise_power() {
        // unit-power sine at 8.78 dB: noise power 10^(-0.878) within 1%
        let x = RealSeries::from_fn(4096, 1024.0, |t| {
            std::f64::consts::SQRT_2 * (std::f64::consts::TAU * 16.0 * t).cos()
        })
        .unwrap();
        let spec = NoiseSpec::new(8.78, 7).unwrap();
        let noisy = add_noise(&x, &spec).unwrap();
        let noise_power = noisy
            .samples()
            .iter()
            .zip(x.samples())
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>()
            / x.len() as f64;
        let expected = 10f64.powf(-0.878);
        assert!((noise_power / expected - 1.0).abs() < 0.01);
        // empirical SNR matches the request to within 0.01 dB
        let snr = 10.0 * (x.power() / noise_power).log10();
        assert!((snr - 8.78).abs() < 0.01);
    }

    #[test]
    fn noise_is_deterministic_bitwise() {
        let x = tone(9.0, 512, 512.0);
        let spec = NoiseSpec::new(12.0, 99).unwrap();
        let a = add_noise(&x, &spec).unwrap();
        let b = add_noise(&x, &spec).unwrap();
        assert_eq!(a, b);
        let other = add_noise(&x, &NoiseSpec::new(12.0, 100).unwrap()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn zero_energy_input_rejected() {
        let x = RealSeries::new(vec![0.0; 16], 16.0).unwrap();
        assert!(matches!(
            add_noise(&x, &NoiseSpec::new(10.0, 1).unwrap()),
            Err(Error::ZeroEnergy { .. })
        ));
    }

    #[test]
    fn record_requires_consistent_sections() {
        let a = tone(2.0, 64, 64.0);
        let b = tone(3.0, 64, 64.0);
        let short = tone(3.0, 32, 64.0);
        assert!(MultiSectionRecord::with_default_labels(vec![]).is_err());
        assert!(MultiSectionRecord::with_default_labels(vec![
            (a.clone(), b.clone()),
            (a.clone(), short),
        ])
        .is_err());
        let rec =
            MultiSectionRecord::with_default_labels(vec![(a.clone(), b.clone()), (b, a)]).unwrap();
        assert_eq!(rec.section_count(), 2);
        assert_eq!(rec.labels(), ["section1", "section2"]);
    }
}
