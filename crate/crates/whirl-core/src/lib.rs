//! Decomposition and analysis of multi-section rotor vibration orbits.
//!
//! A rotor's shaft motion at one bearing section, measured by two
//! perpendicular proximity probes, forms a complex orbit signal
//! p(t) = x(t) + j y(t). This crate splits such signals into forward
//! (counter-clockwise) and backward (clockwise) rotating parts, decomposes
//! all sections jointly into band-limited modes that share center
//! frequencies, and derives instantaneous orbit features from the resulting
//! complex IMF pairs: amplitudes, ellipse axes, phases, inclination, the
//! shape-and-directivity index, a signed-frequency time-energy grid, and 3D
//! orbit-map geometry.
//!
//! The typical flow:
//!
//! ```
//! use whirl_core::{mcvmd, simulate_two_section, NoiseSpec, OrbitFeatureSeries, SolverConfig};
//!
//! let record = simulate_two_section(1.0, 1024.0, &NoiseSpec::none()).unwrap();
//! let result = mcvmd(&record, &SolverConfig::new(2)).unwrap();
//! assert!((result.center_freqs_hz()[0] - 16.0).abs() < 0.5);
//! let features = OrbitFeatureSeries::for_mode(&result, 0, 0).unwrap();
//! assert!(features.sdi[512] > 0.0); // forward whirl at 16 Hz in section 1
//! ```

mod analytic;
mod error;
mod features;
mod pipeline;
mod series;
mod solver;
mod synth;
mod views;

pub use num_complex::Complex64;

pub use analytic::{hilbert_analytic, real_projections, split_forward_backward};
pub use error::{Error, Result};
pub use features::{
    full_spectrum, inclination, instantaneous_amplitudes, instantaneous_phases,
    precession_direction, sdi, semi_axes, FullSpectrumLine, OrbitFeatureSeries,
    PrecessionDirection, PrecessionSummary, DEGENERACY_EPS_REL,
};
pub use pipeline::{
    mcvmd, reconstruct_component, reconstruct_section, ComplexImfPair, McvmdResult,
};
pub use series::{
    add_noise, make_complex, ComplexSeries, MultiSectionRecord, NoiseSpec, RealSeries,
};
pub use solver::{decompose, init_center_freqs, InitScheme, ModeBank, SolverConfig, SolverState};
pub use synth::{apply_noise, simulate_bistable, simulate_two_section, BISTABLE_TONE_HZ};
pub use views::{
    build_iom_frame, mode_if, sample_ellipse, time_fs, IomFrame, SectionEllipse, TimeFsGrid,
};
