//! The decomposition result bundle: a self-describing JSON document plus
//! per-mode CSV series, written by `decompose` and consumed by the
//! downstream commands.

use std::path::Path;

use serde::{Deserialize, Serialize};
use whirl_core::{Complex64, ComplexImfPair, ComplexSeries, InitScheme, McvmdResult, SolverConfig};

use crate::error::{CliError, Result};
use crate::io::write_atomic;

pub const BUNDLE_FILE: &str = "decomposition.json";

#[derive(Serialize, Deserialize)]
pub struct BundleDoc {
    pub meta: Meta,
    pub center_freqs_hz: Vec<f64>,
    pub modes: Vec<ModeDoc>,
}

#[derive(Serialize, Deserialize)]
pub struct Meta {
    pub sample_rate_hz: f64,
    pub samples: usize,
    pub section_labels: Vec<String>,
    pub config: ConfigDoc,
    pub iterations_used: usize,
    pub final_residual: f64,
}

#[derive(Serialize, Deserialize)]
pub struct ConfigDoc {
    pub n_modes: usize,
    pub alpha: f64,
    pub tau: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub init_scheme: String,
}

#[derive(Serialize, Deserialize)]
pub struct ModeDoc {
    pub sections: Vec<SectionDoc>,
}

#[derive(Serialize, Deserialize)]
pub struct SectionDoc {
    pub zf_re: Vec<f64>,
    pub zf_im: Vec<f64>,
    pub zb_re: Vec<f64>,
    pub zb_im: Vec<f64>,
}

impl BundleDoc {
    pub fn from_result(result: &McvmdResult) -> Self {
        let modes = result
            .pairs()
            .iter()
            .map(|row| ModeDoc {
                sections: row
                    .iter()
                    .map(|pair| SectionDoc {
                        zf_re: pair.zf.re(),
                        zf_im: pair.zf.im(),
                        zb_re: pair.zb.re(),
                        zb_im: pair.zb.im(),
                    })
                    .collect(),
            })
            .collect();
        let config = result.config_used();
        BundleDoc {
            meta: Meta {
                sample_rate_hz: result.sample_rate(),
                samples: result.len(),
                section_labels: result.section_labels().to_vec(),
                config: ConfigDoc {
                    n_modes: config.n_modes,
                    alpha: config.alpha,
                    tau: config.tau,
                    tol: config.tol,
                    max_iters: config.max_iters,
                    init_scheme: config.init_scheme.name().to_string(),
                },
                iterations_used: result.iterations_used(),
                final_residual: result.final_residual(),
            },
            center_freqs_hz: result.center_freqs_hz().to_vec(),
            modes,
        }
    }

    pub fn into_result(self) -> Result<McvmdResult> {
        let rate = self.meta.sample_rate_hz;
        let init_scheme: InitScheme = self
            .meta
            .config
            .init_scheme
            .parse()
            .map_err(|e: whirl_core::Error| CliError::input(e.to_string()))?;
        let config = SolverConfig::new(self.meta.config.n_modes)
            .with_alpha(self.meta.config.alpha)
            .with_tau(self.meta.config.tau)
            .with_tol(self.meta.config.tol)
            .with_max_iters(self.meta.config.max_iters)
            .with_init_scheme(init_scheme);
        let mut pairs = Vec::with_capacity(self.modes.len());
        for mode in self.modes {
            let mut row = Vec::with_capacity(mode.sections.len());
            for s in mode.sections {
                let zf: Vec<_> = s
                    .zf_re
                    .iter()
                    .zip(&s.zf_im)
                    .map(|(&re, &im)| Complex64::new(re, im))
                    .collect();
                let zb: Vec<_> = s
                    .zb_re
                    .iter()
                    .zip(&s.zb_im)
                    .map(|(&re, &im)| Complex64::new(re, im))
                    .collect();
                row.push(ComplexImfPair {
                    zf: ComplexSeries::new(zf, rate)
                        .map_err(|e| CliError::input(format!("bundle forward IMF: {e}")))?,
                    zb: ComplexSeries::new(zb, rate)
                        .map_err(|e| CliError::input(format!("bundle backward IMF: {e}")))?,
                });
            }
            pairs.push(row);
        }
        McvmdResult::from_parts(
            pairs,
            self.center_freqs_hz,
            self.meta.section_labels,
            config,
            self.meta.iterations_used,
            self.meta.final_residual,
        )
        .map_err(|e| CliError::input(format!("inconsistent bundle: {e}")))
    }
}

pub fn write_bundle(dir: &Path, doc: &BundleDoc) -> Result<()> {
    let json = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Numerical(format!("serializing bundle: {e}")))?;
    write_atomic(&dir.join(BUNDLE_FILE), json.as_bytes())
}

pub fn load_bundle(dir: &Path) -> Result<McvmdResult> {
    let path = dir.join(BUNDLE_FILE);
    let raw = std::fs::read_to_string(&path).map_err(|_| {
        CliError::input(format!(
            "no decomposition bundle at {}; run `whirl decompose --out-dir {}` first",
            path.display(),
            dir.display()
        ))
    })?;
    let doc: BundleDoc = serde_json::from_str(&raw)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    doc.into_result()
}
