//! Analytic-signal machinery: FFT-based Hilbert transform and the
//! forward/backward split of complex orbit signals.
//!
//! The split keeps positive-frequency bins in the forward part and
//! negative-frequency bins in the backward part; the zero-frequency bin is
//! halved into each. The Nyquist bin of even-length records goes to the
//! backward part (it is a non-positive frequency).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::series::{ComplexSeries, RealSeries};

pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

pub(crate) fn fft_inverse_normalized(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Analytic signal of a real slice: DC and Nyquist bins kept, positive bins
/// doubled, negative bins zeroed.
pub(crate) fn analytic_of_slice(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    let first_negative = n.div_ceil(2);
    for (k, v) in buf.iter_mut().enumerate() {
        if k == 0 {
            // DC kept
        } else if n.is_multiple_of(2) && k == n / 2 {
            // Nyquist kept
        } else if k < first_negative {
            *v *= 2.0;
        } else {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    fft_inverse_normalized(&mut buf);
    // the real part of the analytic signal is the input itself; pin it
    // exactly and keep only the Hilbert transform from the round trip
    for (v, &orig) in buf.iter_mut().zip(x) {
        v.re = orig;
    }
    buf
}

/// Analytic signal x + jH(x) of a real series. The real part of the output
/// equals the input exactly.
pub fn hilbert_analytic(x: &RealSeries) -> ComplexSeries {
    ComplexSeries::new(analytic_of_slice(x.samples()), x.sample_rate())
        .expect("analytic signal of a valid series is valid")
}

/// Split a complex signal into its forward (counter-clockwise, positive
/// frequency) and backward (clockwise, negative frequency) rotating parts.
/// The parts sum back to the input to machine precision.
pub fn split_forward_backward(p: &ComplexSeries) -> (ComplexSeries, ComplexSeries) {
    let n = p.len();
    let mut spectrum: Vec<Complex64> = p.samples().to_vec();
    fft_forward(&mut spectrum);

    let mut fwd = vec![Complex64::new(0.0, 0.0); n];
    let mut bwd = vec![Complex64::new(0.0, 0.0); n];
    let first_negative = n.div_ceil(2);
    for (k, &v) in spectrum.iter().enumerate() {
        if k == 0 {
            fwd[0] = v / 2.0;
            bwd[0] = v / 2.0;
        } else if k < first_negative {
            fwd[k] = v;
        } else {
            bwd[k] = v;
        }
    }
    fft_inverse_normalized(&mut fwd);
    fft_inverse_normalized(&mut bwd);
    let rate = p.sample_rate();
    (
        ComplexSeries::new(fwd, rate).expect("forward part of a valid series is valid"),
        ComplexSeries::new(bwd, rate).expect("backward part of a valid series is valid"),
    )
}

/// Real parts of the forward/backward split: the real channels handed to the
/// joint decomposition.
pub fn real_projections(p: &ComplexSeries) -> (RealSeries, RealSeries) {
    let (fwd, bwd) = split_forward_backward(p);
    let rate = p.sample_rate();
    (
        RealSeries::new(fwd.re(), rate).expect("projection of a valid series is valid"),
        RealSeries::new(bwd.re(), rate).expect("projection of a valid series is valid"),
    )
}
