//! The joint decomposition pipeline for multi-section complex orbit
//! signals: build p_i = x_i + j y_i per section, split each into forward
//! and backward real projections, decompose all 2K projections in a single
//! joint solver call, and rebuild per-mode forward/backward complex IMFs.
//!
//! Decomposing the forward and backward channels jointly (not in two
//! separate calls) is what ties each mode's forward and backward branches
//! to one shared center frequency.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::{analytic_of_slice, real_projections};
use crate::error::{Error, Result};
use crate::series::{make_complex, ComplexSeries, MultiSectionRecord};
use crate::solver::{decompose, SolverConfig};

/// One mode of one section: the forward complex IMF (one-sided positive
/// spectrum) and the backward complex IMF (one-sided negative spectrum,
/// stored conjugated).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexImfPair {
    pub zf: ComplexSeries,
    pub zb: ComplexSeries,
}

/// Joint decomposition result: N modes x K sections of complex IMF pairs
/// with the shared ascending center frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct McvmdResult {
    pairs: Vec<Vec<ComplexImfPair>>,
    center_freqs_hz: Vec<f64>,
    section_labels: Vec<String>,
    config_used: SolverConfig,
    iterations_used: usize,
    final_residual: f64,
}

impl McvmdResult {
    /// Assemble a result from parts, enforcing the shape invariants
    /// (used when loading a stored decomposition).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        pairs: Vec<Vec<ComplexImfPair>>,
        center_freqs_hz: Vec<f64>,
        section_labels: Vec<String>,
        config_used: SolverConfig,
        iterations_used: usize,
        final_residual: f64,
    ) -> Result<Self> {
        if pairs.is_empty() || pairs[0].is_empty() {
            return Err(Error::EmptyRecord);
        }
        let k = pairs[0].len();
        if pairs.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidArgument(
                "ragged mode/section array".to_string(),
            ));
        }
        if center_freqs_hz.len() != pairs.len() {
            return Err(Error::LengthMismatch {
                left: center_freqs_hz.len(),
                right: pairs.len(),
            });
        }
        if center_freqs_hz.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(
                "center frequencies must be ascending".to_string(),
            ));
        }
        if section_labels.len() != k {
            return Err(Error::LabelCountMismatch {
                labels: section_labels.len(),
                sections: k,
            });
        }
        Ok(Self {
            pairs,
            center_freqs_hz,
            section_labels,
            config_used,
            iterations_used,
            final_residual,
        })
    }

    /// Number of modes N.
    pub fn n_modes(&self) -> usize {
        self.pairs.len()
    }

    /// Number of bearing sections K.
    pub fn n_sections(&self) -> usize {
        self.pairs[0].len()
    }

    pub fn pair(&self, n: usize, i: usize) -> Result<&ComplexImfPair> {
        self.pairs
            .get(n)
            .ok_or(Error::IndexOutOfRange {
                what: "mode",
                index: n,
                count: self.n_modes(),
            })?
            .get(i)
            .ok_or(Error::IndexOutOfRange {
                what: "section",
                index: i,
                count: self.n_sections(),
            })
    }

    pub fn pairs(&self) -> &[Vec<ComplexImfPair>] {
        &self.pairs
    }

    pub fn center_freqs_hz(&self) -> &[f64] {
        &self.center_freqs_hz
    }

    pub fn section_labels(&self) -> &[String] {
        &self.section_labels
    }

    pub fn config_used(&self) -> &SolverConfig {
        &self.config_used
    }

    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    pub fn final_residual(&self) -> f64 {
        self.final_residual
    }

    pub fn sample_rate(&self) -> f64 {
        self.pairs[0][0].zf.sample_rate()
    }

    pub fn len(&self) -> usize {
        self.pairs[0][0].zf.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Run the full joint decomposition of a multi-section record.
///
/// Channel order into the solver is fixed: `[p1+, p1-, p2+, p2-, ...]`.
/// The forward IMF of mode n, section i is the analytic signal of the
/// `pi+` channel of that mode; the backward IMF is the conjugated analytic
/// signal of the `pi-` channel.
pub fn mcvmd(record: &MultiSectionRecord, config: &SolverConfig) -> Result<McvmdResult> {
    let mut channels = Vec::with_capacity(2 * record.section_count());
    for (x, y) in record.sections() {
        let p = make_complex(x, y)?;
        let (plus, minus) = real_projections(&p);
        channels.push(plus);
        channels.push(minus);
    }
    let bank = decompose(&channels, config)?;

    let n_modes = bank.n_modes();
    let k_sections = record.section_count();
    let rate = record.sample_rate();
    let mut flat: Vec<(usize, usize)> = Vec::with_capacity(n_modes * k_sections);
    for n in 0..n_modes {
        for i in 0..k_sections {
            flat.push((n, i));
        }
    }
    // per-(mode, section) reconstruction is independent; results do not
    // depend on the degree of parallelism
    let built: Vec<ComplexImfPair> = flat
        .par_iter()
        .map(|&(n, i)| {
            let zf = analytic_of_slice(bank.mode(n, 2 * i).samples());
            let zb: Vec<Complex64> = analytic_of_slice(bank.mode(n, 2 * i + 1).samples())
                .into_iter()
                .map(|v| v.conj())
                .collect();
            ComplexImfPair {
                zf: ComplexSeries::new(zf, rate).expect("forward IMF of a valid mode is valid"),
                zb: ComplexSeries::new(zb, rate).expect("backward IMF of a valid mode is valid"),
            }
        })
        .collect();

    let mut iter = built.into_iter();
    let pairs: Vec<Vec<ComplexImfPair>> = (0..n_modes)
        .map(|_| {
            (0..k_sections)
                .map(|_| iter.next().expect("shape"))
                .collect()
        })
        .collect();

    McvmdResult::from_parts(
        pairs,
        bank.center_freqs_hz().to_vec(),
        record.labels().to_vec(),
        config.clone(),
        bank.iterations_used(),
        bank.final_residual(),
    )
}

/// Reconstructed complex orbit signal of section `i`: the sum of all
/// forward and backward IMFs.
pub fn reconstruct_section(result: &McvmdResult, i: usize) -> Result<ComplexSeries> {
    if i >= result.n_sections() {
        return Err(Error::IndexOutOfRange {
            what: "section",
            index: i,
            count: result.n_sections(),
        });
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); result.len()];
    for n in 0..result.n_modes() {
        let pair = result.pair(n, i)?;
        for (a, (f, b)) in acc
            .iter_mut()
            .zip(pair.zf.samples().iter().zip(pair.zb.samples()))
        {
            *a += f + b;
        }
    }
    ComplexSeries::new(acc, result.sample_rate())
}

/// Single-mode orbit signal of mode `n`, section `i`: zf + zb.
pub fn reconstruct_component(result: &McvmdResult, n: usize, i: usize) -> Result<ComplexSeries> {
    let pair = result.pair(n, i)?;
    let samples = pair
        .zf
        .samples()
        .iter()
        .zip(pair.zb.samples())
        .map(|(f, b)| f + b)
        .collect();
    ComplexSeries::new(samples, result.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{fft_forward, split_forward_backward};
    use crate::series::{MultiSectionRecord, NoiseSpec, RealSeries};
    use crate::synth::simulate_two_section;
    use std::f64::consts::TAU;

    fn circle_record(freq: f64, len: usize, fs: f64) -> MultiSectionRecord {
        let x = RealSeries::from_fn(len, fs, |t| (TAU * freq * t).cos()).unwrap();
        let y = RealSeries::from_fn(len, fs, |t| (TAU * freq * t).sin()).unwrap();
        MultiSectionRecord::with_default_labels(vec![(x, y)]).unwrap()
    }

    fn interior(len: usize) -> std::ops::Range<usize> {
        len / 20..len - len / 20
    }

    #[test]
    fn pure_forward_circle_single_mode() {
        let rec = circle_record(16.0, 1024, 1024.0);
        let result = mcvmd(&rec, &SolverConfig::new(1)).unwrap();
        assert_eq!((result.n_modes(), result.n_sections()), (1, 1));
        let pair = result.pair(0, 0).unwrap();
        let zb_energy: f64 = pair.zb.samples().iter().map(|v| v.norm_sqr()).sum();
        let zf_energy: f64 = pair.zf.samples().iter().map(|v| v.norm_sqr()).sum();
        assert!(zb_energy / zf_energy < 1e-4);
        for (n, v) in pair.zf.samples().iter().enumerate().take(970).skip(50) {
            let t = n as f64 / 1024.0;
            let want = Complex64::new(0.0, TAU * 16.0 * t).exp();
            assert!((v - want).norm() < 0.05);
        }
    }

    #[test]
    fn two_section_center_frequencies() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        let result = mcvmd(&rec, &SolverConfig::new(2)).unwrap();
        assert_eq!((result.n_modes(), result.n_sections()), (2, 2));
        assert!((result.center_freqs_hz()[0] - 16.0).abs() < 0.5);
        assert!((result.center_freqs_hz()[1] - 32.0).abs() < 0.5);
    }

    #[test]
    fn forward_envelope_tracks_isolated_tone() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        let result = mcvmd(&rec, &SolverConfig::new(2)).unwrap();
        let pair = result.pair(0, 0).unwrap();

        // ground truth: exact split of the noiseless isolated 16 Hz term
        let fs = 1024.0;
        let x16 = RealSeries::from_fn(1024, fs, |t| {
            (2.0 + 0.5 * (2.5 * std::f64::consts::PI * t).cos()) * (TAU * 16.0 * t).cos()
        })
        .unwrap();
        let y16 = RealSeries::from_fn(1024, fs, |t| {
            (2.0 + 0.8 * (5.0 * std::f64::consts::PI * t).cos())
                * (TAU * 16.0 * t + 5.0 * std::f64::consts::PI / 3.0).cos()
        })
        .unwrap();
        let p16 = make_complex(&x16, &y16).unwrap();
        let (truth, _) = split_forward_backward(&p16);

        let span = interior(1024);
        let mut err = 0.0;
        let mut mean = 0.0;
        for n in span.clone() {
            let e = pair.zf.samples()[n].norm() - truth.samples()[n].norm();
            err += e * e;
            mean += truth.samples()[n].norm();
        }
        let count = span.len() as f64;
        let rms = (err / count).sqrt() / (mean / count);
        assert!(rms < 0.05, "interior envelope RMS error {rms}");
    }

    #[test]
    fn section_reconstruction_against_clean_signal() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        let result = mcvmd(&rec, &SolverConfig::new(2)).unwrap();
        for i in 0..2 {
            let recon = reconstruct_section(&result, i).unwrap();
            let (x, y) = &rec.sections()[i];
            let span = interior(1024);
            let mut num = 0.0;
            let mut den = 0.0;
            for n in span {
                let truth = Complex64::new(x.samples()[n], y.samples()[n]);
                num += (recon.samples()[n] - truth).norm_sqr();
                den += truth.norm_sqr();
            }
            assert!(
                (num / den).sqrt() < 0.05,
                "section {i} reconstruction error {}",
                (num / den).sqrt()
            );
        }
    }

    #[test]
    fn noisy_reconstruction_denoises() {
        let clean = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        let noisy = simulate_two_section(1.0, 1024.0, &NoiseSpec::new(8.78, 7).unwrap()).unwrap();
        let result = mcvmd(&noisy, &SolverConfig::new(2)).unwrap();
        let recon = reconstruct_section(&result, 0).unwrap();
        let (cx, cy) = &clean.sections()[0];
        let (nx, ny) = &noisy.sections()[0];
        let span = interior(1024);
        let mut recon_err = 0.0;
        let mut raw_err = 0.0;
        for n in span {
            let truth = Complex64::new(cx.samples()[n], cy.samples()[n]);
            let raw = Complex64::new(nx.samples()[n], ny.samples()[n]);
            recon_err += (recon.samples()[n] - truth).norm_sqr();
            raw_err += (raw - truth).norm_sqr();
        }
        assert!(
            recon_err < raw_err,
            "reconstruction ({recon_err}) should beat the raw noisy signal ({raw_err})"
        );
    }

    #[test]
    fn components_sum_to_section_reconstruction() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::new(8.78, 5).unwrap()).unwrap();
        let result = mcvmd(&rec, &SolverConfig::new(2)).unwrap();
        for i in 0..2 {
            let total = reconstruct_section(&result, i).unwrap();
            let c0 = reconstruct_component(&result, 0, i).unwrap();
            let c1 = reconstruct_component(&result, 1, i).unwrap();
            for ((t, a), b) in total.samples().iter().zip(c0.samples()).zip(c1.samples()) {
                assert_eq!(*t, a + b);
            }
        }
    }

    #[test]
    fn component_spectrum_is_band_paired() {
        // mode n energy concentrates in [w_n - 4, w_n + 4] on both signs
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        let result = mcvmd(&rec, &SolverConfig::new(2)).unwrap();
        for n in 0..2 {
            let w = result.center_freqs_hz()[n];
            for i in 0..2 {
                let comp = reconstruct_component(&result, n, i).unwrap();
                let mut buf: Vec<Complex64> = comp.samples().to_vec();
                fft_forward(&mut buf);
                let len = buf.len() as f64;
                let fs = 1024.0;
                let mut inside = 0.0;
                let mut total = 0.0;
                for (idx, v) in buf.iter().enumerate() {
                    let f = if idx as f64 <= len / 2.0 {
                        idx as f64 * fs / len
                    } else {
                        (idx as f64 - len) * fs / len
                    };
                    let e = v.norm_sqr();
                    total += e;
                    if (f.abs() - w).abs() <= 4.0 {
                        inside += e;
                    }
                }
                assert!(
                    inside / total >= 0.95,
                    "mode {n} section {i}: {:.3} of energy in band",
                    inside / total
                );
            }
        }
    }

    #[test]
    fn backward_branch_conjugation() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
        // reproduce the solver channels to compare against the stored IMFs
        let mut channels = Vec::new();
        for (x, y) in rec.sections() {
            let p = make_complex(x, y).unwrap();
            let (plus, minus) = real_projections(&p);
            channels.push(plus);
            channels.push(minus);
        }
        let config = SolverConfig::new(2);
        let bank = decompose(&channels, &config).unwrap();
        let result = mcvmd(&rec, &config).unwrap();
        for n in 0..2 {
            for i in 0..2 {
                let pair = result.pair(n, i).unwrap();
                let backward_mode = bank.mode(n, 2 * i + 1).samples();
                // Re(zb) equals the solver's backward-channel mode
                for (v, &m) in pair.zb.samples().iter().zip(backward_mode) {
                    assert_eq!(v.re, m);
                }
                // Im(zb) equals minus its Hilbert transform
                let analytic = analytic_of_slice(backward_mode);
                for (v, a) in pair.zb.samples().iter().zip(&analytic) {
                    assert_eq!(v.im, -a.im);
                }
            }
        }
    }

    #[test]
    fn section_permutation_equivariance() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::new(10.0, 2).unwrap()).unwrap();
        let swapped = MultiSectionRecord::new(
            vec![rec.sections()[1].clone(), rec.sections()[0].clone()],
            vec![rec.labels()[1].clone(), rec.labels()[0].clone()],
        )
        .unwrap();
        let config = SolverConfig::new(2);
        let a = mcvmd(&rec, &config).unwrap();
        let b = mcvmd(&swapped, &config).unwrap();
        assert_eq!(a.center_freqs_hz(), b.center_freqs_hz());
        for n in 0..2 {
            assert_eq!(a.pair(n, 0).unwrap(), b.pair(n, 1).unwrap());
            assert_eq!(a.pair(n, 1).unwrap(), b.pair(n, 0).unwrap());
        }
    }

    #[test]
    fn imf_spectra_are_one_sided() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::new(8.78, 1).unwrap()).unwrap();
        let result = mcvmd(&rec, &SolverConfig::new(2)).unwrap();
        for n in 0..2 {
            for i in 0..2 {
                let pair = result.pair(n, i).unwrap();
                for (series, forward) in [(&pair.zf, true), (&pair.zb, false)] {
                    let mut buf: Vec<Complex64> = series.samples().to_vec();
                    fft_forward(&mut buf);
                    let len = buf.len();
                    let first_negative = len.div_ceil(2);
                    let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
                    // strictly-signed bins only: DC and Nyquist sit on the
                    // boundary between the halves
                    let wrong: f64 = (1..len)
                        .filter(|&k| !(len.is_multiple_of(2) && k == len / 2))
                        .filter(|&k| (k < first_negative) != forward)
                        .map(|k| buf[k].norm_sqr())
                        .sum();
                    assert!(wrong / total < 1e-8, "leakage {} too large", wrong / total);
                }
            }
        }
    }

    #[test]
    fn index_errors() {
        let rec = circle_record(8.0, 256, 256.0);
        let result = mcvmd(&rec, &SolverConfig::new(1)).unwrap();
        assert!(matches!(
            reconstruct_section(&result, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            reconstruct_component(&result, 1, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            reconstruct_component(&result, 0, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn from_parts_enforces_invariants() {
        let rec = circle_record(8.0, 256, 256.0);
        let result = mcvmd(&rec, &SolverConfig::new(1)).unwrap();
        let pair = result.pair(0, 0).unwrap().clone();
        // descending center frequencies rejected
        assert!(McvmdResult::from_parts(
            vec![vec![pair.clone()], vec![pair.clone()]],
            vec![2.0, 1.0],
            vec!["s".into()],
            SolverConfig::new(2),
            1,
            0.0,
        )
        .is_err());
        // ragged shape rejected
        assert!(McvmdResult::from_parts(
            vec![vec![pair.clone(), pair.clone()], vec![pair]],
            vec![1.0, 2.0],
            vec!["a".into(), "b".into()],
            SolverConfig::new(2),
            1,
            0.0,
        )
        .is_err());
    }

    #[test]
    fn results_identical_across_thread_counts() {
        let rec = simulate_two_section(1.0, 1024.0, &NoiseSpec::new(8.78, 9).unwrap()).unwrap();
        let config = SolverConfig::new(2);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| mcvmd(&rec, &config).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| mcvmd(&rec, &config).unwrap());
        assert_eq!(single, multi);
    }
}
