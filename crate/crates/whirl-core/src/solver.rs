//! Multivariate variational mode decomposition: joint extraction of N
//! band-limited modes from C real channels, every mode sharing one center
//! frequency across all channels.
//!
//! The solver works on half-spectra (non-negative frequency bins) of the
//! mirror-extended channels and alternates three updates until the relative
//! spectral change falls below tolerance: a Wiener-style mode update per
//! (mode, channel), an energy-centroid update of each center frequency, and
//! a dual-ascent update of the per-channel multipliers.
//!
//! Inside the loop frequencies are normalized to cycles/sample, the
//! convention under which the default bandwidth penalty is calibrated.

use std::str::FromStr;

use num_complex::Complex64;

use crate::analytic::{fft_forward, fft_inverse_normalized};
use crate::error::{Error, Result};
use crate::series::RealSeries;

/// Center-frequency initialization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitScheme {
    /// omega_k = (k - 0.5) * (fs/2) / N
    UniformSpread,
    /// all zero
    Zero,
    /// omega_k = (fs/2) * 2^-(N-k+1)
    Octave,
}

impl FromStr for InitScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-spread" => Ok(Self::UniformSpread),
            "zero" => Ok(Self::Zero),
            "octave" => Ok(Self::Octave),
            other => Err(Error::UnknownInitScheme(other.to_string())),
        }
    }
}

impl InitScheme {
    pub fn name(&self) -> &'static str {
        match self {
            Self::UniformSpread => "uniform-spread",
            Self::Zero => "zero",
            Self::Octave => "octave",
        }
    }
}

/// Initial center frequencies in Hz for `n_modes` modes at sample rate `fs`.
pub fn init_center_freqs(scheme: InitScheme, n_modes: usize, fs: f64) -> Vec<f64> {
    let n = n_modes as f64;
    (1..=n_modes)
        .map(|k| match scheme {
            InitScheme::UniformSpread => (k as f64 - 0.5) * (fs / 2.0) / n,
            InitScheme::Zero => 0.0,
            InitScheme::Octave => (fs / 2.0) * 2f64.powi(-((n_modes - k + 1) as i32)),
        })
        .collect()
}

/// Solver parameters. `alpha` is the bandwidth penalty, `tau` the dual
/// ascent step (0 leaves reconstruction pressure off, the right choice for
/// noisy data), `tol` the relative convergence threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub n_modes: usize,
    pub alpha: f64,
    pub tau: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub init_scheme: InitScheme,
}

impl SolverConfig {
    pub fn new(n_modes: usize) -> Self {
        Self {
            n_modes,
            alpha: 8000.0,
            tau: 0.0,
            tol: 1e-7,
            max_iters: 500,
            init_scheme: InitScheme::Zero,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_init_scheme(mut self, init_scheme: InitScheme) -> Self {
        self.init_scheme = init_scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes < 1 {
            return Err(Error::InvalidConfig {
                reason: "n_modes must be >= 1".into(),
            });
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidConfig {
                reason: format!("alpha must be positive, got {}", self.alpha),
            });
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::InvalidConfig {
                reason: format!("tau must be non-negative, got {}", self.tau),
            });
        }
        if !(self.tol.is_finite() && self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidConfig {
                reason: format!("tol must lie in (0, 1), got {}", self.tol),
            });
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig {
                reason: "max_iters must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// Decomposition output: N modes of C real channels, one shared center
/// frequency per mode (ascending), plus convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBank {
    modes: Vec<Vec<RealSeries>>,
    center_freqs_hz: Vec<f64>,
    iterations_used: usize,
    final_residual: f64,
}

impl ModeBank {
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn n_channels(&self) -> usize {
        self.modes[0].len()
    }

    /// Channel `c` of mode `k`.
    pub fn mode(&self, k: usize, c: usize) -> &RealSeries {
        &self.modes[k][c]
    }

    pub fn modes(&self) -> &[Vec<RealSeries>] {
        &self.modes
    }

    /// One center frequency per mode, shared by all channels, ascending.
    pub fn center_freqs_hz(&self) -> &[f64] {
        &self.center_freqs_hz
    }

    pub fn iterations_used(&self) -> usize {
        self.iterations_used
    }

    /// Relative spectral change at the stopping iteration; above `tol` means
    /// the iteration cap was hit before convergence.
    pub fn final_residual(&self) -> f64 {
        self.final_residual
    }
}

/// Working state of the alternating updates: half-spectra of the modes, the
/// multipliers, and the inputs on a shared non-negative frequency grid.
/// The grid carries whatever frequency unit the caller chose; the update
/// formulas are unit-agnostic.
#[derive(Debug, Clone)]
pub struct SolverState {
    grid: Vec<f64>,
    input_spectra: Vec<Vec<Complex64>>,
    mode_spectra: Vec<Vec<Vec<Complex64>>>,
    multipliers: Vec<Vec<Complex64>>,
}

impl SolverState {
    /// Zero-initialized modes and multipliers for the given input
    /// half-spectra on `grid` (one value per non-negative frequency bin).
    pub fn new(input_spectra: Vec<Vec<Complex64>>, grid: Vec<f64>, n_modes: usize) -> Result<Self> {
        if input_spectra.is_empty() {
            return Err(Error::NoChannels);
        }
        let bins = grid.len();
        for s in &input_spectra {
            if s.len() != bins {
                return Err(Error::LengthMismatch {
                    left: bins,
                    right: s.len(),
                });
            }
        }
        let channels = input_spectra.len();
        Ok(Self {
            grid,
            input_spectra,
            mode_spectra: vec![vec![vec![Complex64::new(0.0, 0.0); bins]; channels]; n_modes],
            multipliers: vec![vec![Complex64::new(0.0, 0.0); bins]; channels],
        })
    }

    pub fn n_modes(&self) -> usize {
        self.mode_spectra.len()
    }

    pub fn n_channels(&self) -> usize {
        self.input_spectra.len()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn mode_spectrum(&self, k: usize, c: usize) -> &[Complex64] {
        &self.mode_spectra[k][c]
    }

    pub fn multiplier(&self, c: usize) -> &[Complex64] {
        &self.multipliers[c]
    }

    /// Wiener-style mode update for mode `k`, channel `c`:
    /// u_hat = (x_hat - sum of the other modes + lambda_hat/2)
    ///         / (1 + 2 alpha (omega - omega_k)^2), per bin.
    pub fn update_mode(&mut self, k: usize, c: usize, omega_k: f64, alpha: f64) {
        let bins = self.grid.len();
        for i in 0..bins {
            let mut others = Complex64::new(0.0, 0.0);
            for (j, mode) in self.mode_spectra.iter().enumerate() {
                if j != k {
                    others += mode[c][i];
                }
            }
            let numer = self.input_spectra[c][i] - others + self.multipliers[c][i] / 2.0;
            let delta = self.grid[i] - omega_k;
            self.mode_spectra[k][c][i] = numer / (1.0 + 2.0 * alpha * delta * delta);
        }
    }

    /// Energy centroid of mode `k` over all channels, in grid units.
    /// `None` when the mode holds no energy (caller keeps the previous
    /// value). Channel contributions are summed in value order so the
    /// result is independent of channel ordering.
    pub fn update_center_freq(&self, k: usize) -> Option<f64> {
        let mut nums = Vec::with_capacity(self.n_channels());
        let mut dens = Vec::with_capacity(self.n_channels());
        for c in 0..self.n_channels() {
            let mut num = 0.0;
            let mut den = 0.0;
            for (i, v) in self.mode_spectra[k][c].iter().enumerate() {
                let p = v.norm_sqr();
                num += self.grid[i] * p;
                den += p;
            }
            nums.push(num);
            dens.push(den);
        }
        let num = sum_sorted(&mut nums);
        let den = sum_sorted(&mut dens);
        (den > 0.0).then(|| num / den)
    }

    /// Dual ascent: lambda_hat += tau * (x_hat - sum of all modes), per bin.
    pub fn update_multiplier(&mut self, tau: f64) {
        let bins = self.grid.len();
        for c in 0..self.n_channels() {
            for i in 0..bins {
                let mut total = Complex64::new(0.0, 0.0);
                for mode in &self.mode_spectra {
                    total += mode[c][i];
                }
                self.multipliers[c][i] += tau * (self.input_spectra[c][i] - total);
            }
        }
    }

    /// max over modes of (sum over channels of ||u - u_prev||^2) /
    /// (sum over channels of ||u_prev||^2).
    fn relative_change(&self, prev: &[Vec<Vec<Complex64>>]) -> f64 {
        let mut worst = 0.0_f64;
        for (k, prev_mode) in prev.iter().enumerate() {
            let mut nums = Vec::with_capacity(prev_mode.len());
            let mut dens = Vec::with_capacity(prev_mode.len());
            for (c, prev_chan) in prev_mode.iter().enumerate() {
                let mut num = 0.0;
                let mut den = 0.0;
                for (cur, old) in self.mode_spectra[k][c].iter().zip(prev_chan) {
                    num += (cur - old).norm_sqr();
                    den += old.norm_sqr();
                }
                nums.push(num);
                dens.push(den);
            }
            let num = sum_sorted(&mut nums);
            let den = sum_sorted(&mut dens);
            let ratio = if den > 0.0 {
                num / den
            } else if num == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            worst = worst.max(ratio);
        }
        worst
    }
}

/// Sum in ascending value order: permutation-invariant to the input order.
fn sum_sorted(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    values.iter().sum()
}

fn mirror_extend(x: &[f64]) -> Vec<f64> {
    let mid = x.len().div_ceil(2);
    let mut out = Vec::with_capacity(2 * x.len());
    out.extend(x[..mid].iter().rev());
    out.extend_from_slice(x);
    out.extend(x[mid..].iter().rev());
    out
}

/// Inverse transform a half-spectrum with conjugate-symmetric completion and
/// crop the mirror extension back to the original window.
fn invert_half_spectrum(half: &[Complex64], ext_len: usize, orig_len: usize) -> Vec<f64> {
    let mut full = vec![Complex64::new(0.0, 0.0); ext_len];
    full[..half.len()].copy_from_slice(half);
    for k in 1..ext_len - half.len() + 1 {
        full[ext_len - k] = half[k].conj();
    }
    fft_inverse_normalized(&mut full);
    debug_assert!(
        {
            let peak_re = full.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
            let peak_im = full.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
            peak_im <= 1e-10 * peak_re.max(f64::MIN_POSITIVE)
        },
        "imaginary residue after conjugate-symmetric inversion"
    );
    let mid = orig_len.div_ceil(2);
    full[mid..mid + orig_len].iter().map(|v| v.re).collect()
}

/// Decompose C equal-length channels into `config.n_modes` joint modes.
/// Non-convergence at `max_iters` is not an error; the returned bank carries
/// the final residual for inspection.
pub fn decompose(channels: &[RealSeries], config: &SolverConfig) -> Result<ModeBank> {
    config.validate()?;
    if channels.is_empty() {
        return Err(Error::NoChannels);
    }
    let len = channels[0].len();
    let fs = channels[0].sample_rate();
    for c in channels {
        if c.len() != len {
            return Err(Error::LengthMismatch {
                left: len,
                right: c.len(),
            });
        }
        if c.sample_rate() != fs {
            return Err(Error::SampleRateMismatch {
                left: fs,
                right: c.sample_rate(),
            });
        }
    }

    let ext_len = 2 * len;
    let bins = ext_len / 2 + 1;
    let mut input_spectra = Vec::with_capacity(channels.len());
    for c in channels {
        let ext = mirror_extend(c.samples());
        let mut buf: Vec<Complex64> = ext.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_forward(&mut buf);
        buf.truncate(bins);
        input_spectra.push(buf);
    }
    // normalized frequency grid, cycles/sample in [0, 0.5]
    let grid: Vec<f64> = (0..bins).map(|k| k as f64 / ext_len as f64).collect();
    let mut state = SolverState::new(input_spectra, grid, config.n_modes)?;

    let mut omegas: Vec<f64> = init_center_freqs(config.init_scheme, config.n_modes, fs)
        .into_iter()
        .map(|hz| hz / fs)
        .collect();

    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < config.max_iters {
        let prev = state.mode_spectra.clone();
        for (k, &omega) in omegas.iter().enumerate() {
            for c in 0..state.n_channels() {
                state.update_mode(k, c, omega, config.alpha);
            }
        }
        for (k, omega) in omegas.iter_mut().enumerate() {
            match state.update_center_freq(k) {
                Some(next) => *omega = next,
                None => log::debug!("mode {k} has zero energy; keeping center frequency"),
            }
        }
        if config.tau != 0.0 {
            state.update_multiplier(config.tau);
        }
        residual = state.relative_change(&prev);
        iterations += 1;
        if residual < config.tol {
            break;
        }
    }

    let mut order: Vec<usize> = (0..config.n_modes).collect();
    order.sort_by(|&a, &b| omegas[a].total_cmp(&omegas[b]));

    let mut modes = Vec::with_capacity(config.n_modes);
    for &k in &order {
        let mut per_channel = Vec::with_capacity(state.n_channels());
        for c in 0..state.n_channels() {
            let samples = invert_half_spectrum(&state.mode_spectra[k][c], ext_len, len);
            per_channel.push(
                RealSeries::new(samples, fs).expect("inverse transform of solver output is valid"),
            );
        }
        modes.push(per_channel);
    }
    Ok(ModeBank {
        modes,
        center_freqs_hz: order.iter().map(|&k| omegas[k] * fs).collect(),
        iterations_used: iterations,
        final_residual: residual,
    })
}
