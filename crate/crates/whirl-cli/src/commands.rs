//! Subcommand implementations.

use std::path::{Path, PathBuf};

use serde::Serialize;
use whirl_core::{
    apply_noise, build_iom_frame, mcvmd, reconstruct_section, simulate_bistable,
    simulate_two_section, time_fs, InitScheme, McvmdResult, MultiSectionRecord, NoiseSpec,
    OrbitFeatureSeries, PrecessionDirection, SolverConfig,
};

use crate::args::{
    DecomposeArgs, FeaturesArgs, GeneratorArgs, InputSource, IomArgs, PlotArgs, Scenario,
    SimulateArgs, TimefsArgs,
};
use crate::bundle::{load_bundle, write_bundle, BundleDoc};
use crate::error::{CliError, Result};
use crate::io::{csv_document, ensure_dir, read_record_csv, record_to_csv, write_atomic};
use crate::svg;

fn noise_spec(gen: &GeneratorArgs) -> Result<NoiseSpec> {
    match (gen.no_noise, gen.snr_db) {
        (true, _) | (false, None) => Ok(NoiseSpec::none()),
        (false, Some(db)) => {
            NoiseSpec::new(db, gen.seed).map_err(|e| CliError::input(e.to_string()))
        }
    }
}

fn generate(
    scenario: Scenario,
    sample_rate: f64,
    gen: &GeneratorArgs,
) -> Result<MultiSectionRecord> {
    let record = match scenario {
        Scenario::TwoSection => simulate_two_section(gen.duration, sample_rate, &noise_spec(gen)?)?,
        Scenario::Bistable => {
            let clean = simulate_bistable(gen.duration, sample_rate, gen.jump_time)?;
            apply_noise(&clean, &noise_spec(gen)?)?
        }
    };
    Ok(record)
}

fn default_rate(scenario: Scenario) -> f64 {
    match scenario {
        Scenario::TwoSection => 1024.0,
        Scenario::Bistable => 2000.0,
    }
}

fn resolve_record(
    source: &InputSource,
    sample_rate: Option<f64>,
    columns: &[String],
    gen: &GeneratorArgs,
) -> Result<MultiSectionRecord> {
    match (&source.input, source.scenario) {
        (Some(path), None) => read_record_csv(path, columns, sample_rate),
        (None, Some(scenario)) => {
            generate(scenario, sample_rate.unwrap_or(default_rate(scenario)), gen)
        }
        _ => unreachable!("clap enforces exactly one source"),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let rate = args.sample_rate.unwrap_or(default_rate(args.scenario));
    let record = generate(args.scenario, rate, &args.generator)?;
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            ensure_dir(dir)?;
        }
    }
    write_atomic(&args.out, record_to_csv(&record).as_bytes())?;
    println!(
        "wrote {} ({} sections x {} samples at {} Hz)",
        args.out.display(),
        record.section_count(),
        record.len(),
        record.sample_rate()
    );
    Ok(())
}

pub fn cmd_decompose(args: &DecomposeArgs) -> Result<()> {
    let record = resolve_record(
        &args.source,
        args.sample_rate,
        &args.columns,
        &args.generator,
    )?;
    let init_scheme: InitScheme = args
        .init
        .parse()
        .map_err(|e: whirl_core::Error| CliError::input(e.to_string()))?;
    let config = SolverConfig::new(args.modes)
        .with_alpha(args.alpha)
        .with_tau(args.tau)
        .with_tol(args.tol)
        .with_max_iters(args.max_iters)
        .with_init_scheme(init_scheme);
    let result = mcvmd(&record, &config)?;

    ensure_dir(&args.out_dir)?;
    write_bundle(&args.out_dir, &BundleDoc::from_result(&result))?;
    write_mode_series(&args.out_dir, &result)?;
    write_reconstruction(&args.out_dir, &result)?;
    let freqs: Vec<String> = result
        .center_freqs_hz()
        .iter()
        .map(|f| format!("{f:.3}"))
        .collect();
    println!(
        "decomposed {} sections into {} modes at [{}] Hz ({} iterations, residual {:.3e})",
        result.n_sections(),
        result.n_modes(),
        freqs.join(", "),
        result.iterations_used(),
        result.final_residual()
    );
    Ok(())
}

fn write_mode_series(dir: &Path, result: &McvmdResult) -> Result<()> {
    let mut header = vec!["t".to_string()];
    for n in 1..=result.n_modes() {
        for i in 1..=result.n_sections() {
            for field in ["zf_re", "zf_im", "zb_re", "zb_im"] {
                header.push(format!("m{n}_s{i}_{field}"));
            }
        }
    }
    let fs = result.sample_rate();
    let rows = (0..result.len()).map(|t| {
        let mut row = Vec::with_capacity(header.len());
        row.push(t as f64 / fs);
        for n in 0..result.n_modes() {
            for i in 0..result.n_sections() {
                let pair = result.pair(n, i).expect("in-range");
                let f = pair.zf.samples()[t];
                let b = pair.zb.samples()[t];
                row.extend([f.re, f.im, b.re, b.im]);
            }
        }
        row
    });
    write_atomic(
        &dir.join("modes.csv"),
        csv_document(&header, rows).as_bytes(),
    )
}

fn write_reconstruction(dir: &Path, result: &McvmdResult) -> Result<()> {
    let mut header = vec!["t".to_string()];
    for i in 1..=result.n_sections() {
        header.push(format!("s{i}_re"));
        header.push(format!("s{i}_im"));
    }
    let recons: Vec<_> = (0..result.n_sections())
        .map(|i| reconstruct_section(result, i))
        .collect::<std::result::Result<_, _>>()?;
    let fs = result.sample_rate();
    let rows = (0..result.len()).map(|t| {
        let mut row = Vec::with_capacity(header.len());
        row.push(t as f64 / fs);
        for recon in &recons {
            let v = recon.samples()[t];
            row.extend([v.re, v.im]);
        }
        row
    });
    write_atomic(
        &dir.join("reconstruction.csv"),
        csv_document(&header, rows).as_bytes(),
    )
}

pub fn cmd_features(args: &FeaturesArgs) -> Result<()> {
    let result = load_bundle(&args.bundle)?;
    let out_dir = args.out_dir.clone().unwrap_or_else(|| args.bundle.clone());
    ensure_dir(&out_dir)?;
    let fs = result.sample_rate();
    let header: Vec<String> = [
        "t", "r_plus", "r_minus", "r_a", "r_b", "phi_f", "phi_b", "theta", "sdi",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for n in 0..result.n_modes() {
        for i in 0..result.n_sections() {
            let f = OrbitFeatureSeries::for_mode(&result, n, i)?;
            let rows = (0..f.len()).map(|t| {
                vec![
                    t as f64 / fs,
                    f.r_plus[t],
                    f.r_minus[t],
                    f.r_a[t],
                    f.r_b[t],
                    f.phi_f[t],
                    f.phi_b[t],
                    f.theta[t],
                    f.sdi[t],
                ]
            });
            let path = out_dir.join(format!("features_m{}_s{}.csv", n + 1, i + 1));
            write_atomic(&path, csv_document(&header, rows).as_bytes())?;
        }
    }
    println!(
        "wrote {} feature files to {}",
        result.n_modes() * result.n_sections(),
        out_dir.display()
    );
    Ok(())
}

pub fn cmd_timefs(args: &TimefsArgs) -> Result<()> {
    let result = load_bundle(&args.bundle)?;
    let out_dir = args.out_dir.clone().unwrap_or_else(|| args.bundle.clone());
    ensure_dir(&out_dir)?;
    let resolution = args
        .resolution
        .unwrap_or(result.sample_rate() / result.len() as f64);
    let grid = time_fs(&result, resolution)?;
    for i in 0..grid.n_sections() {
        let mut header = vec!["t".to_string()];
        header.extend(grid.freqs_hz.iter().map(|f| crate::io::fmt_f64(*f)));
        let plane = &grid.energy[i];
        let rows = (0..grid.times_s.len()).map(|t| {
            let mut row = Vec::with_capacity(header.len());
            row.push(grid.times_s[t]);
            row.extend(plane[t].iter().copied());
            row
        });
        write_atomic(
            &out_dir.join(format!("timefs_s{}.csv", i + 1)),
            csv_document(&header, rows).as_bytes(),
        )?;
        if args.svg {
            let label = &result.section_labels()[i];
            write_atomic(
                &out_dir.join(format!("timefs_s{}.svg", i + 1)),
                svg::timefs_heat(&grid, i, label).as_bytes(),
            )?;
        }
    }
    println!(
        "wrote time-frequency grids ({} x {} bins per section) to {}",
        grid.times_s.len(),
        grid.freqs_hz.len(),
        out_dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct IomFrameDoc {
    time_s: f64,
    sample_index: usize,
    posture_anchor_phase_rad: f64,
    sections: Vec<IomSectionDoc>,
    posture_lines: Vec<Vec<(f64, f64, f64)>>,
}

#[derive(Serialize)]
struct IomSectionDoc {
    label: String,
    axial_position: f64,
    r_a: f64,
    r_b: f64,
    theta_rad: f64,
    degenerate_theta: bool,
    precession: Option<&'static str>,
    orbit_point: (f64, f64),
    anchors: Vec<(f64, f64)>,
}

fn precession_name(p: Option<PrecessionDirection>) -> Option<&'static str> {
    p.map(|p| match p {
        PrecessionDirection::Forward => "forward",
        PrecessionDirection::Backward => "backward",
        PrecessionDirection::CircularDegenerate => "circular-degenerate",
    })
}

pub fn cmd_iom(args: &IomArgs) -> Result<()> {
    let result = load_bundle(&args.bundle)?;
    let out_dir = args.out_dir.clone().unwrap_or_else(|| args.bundle.clone());
    ensure_dir(&out_dir)?;
    let features: Vec<OrbitFeatureSeries> = (0..result.n_sections())
        .map(|i| OrbitFeatureSeries::for_mode(&result, args.mode, i))
        .collect::<std::result::Result<_, _>>()?;
    let axial = if args.axial.is_empty() {
        None
    } else {
        Some(args.axial.as_slice())
    };
    let mut frames = Vec::with_capacity(args.times.len());
    for &t in &args.times {
        frames.push(build_iom_frame(
            &result,
            args.mode,
            t,
            &features,
            args.anchors,
            axial,
        )?);
    }
    let docs: Vec<IomFrameDoc> = frames
        .iter()
        .map(|f| IomFrameDoc {
            time_s: f.time_s,
            sample_index: f.sample_index,
            posture_anchor_phase_rad: f.posture_anchor_phase_rad,
            sections: f
                .sections
                .iter()
                .enumerate()
                .map(|(i, s)| IomSectionDoc {
                    label: result.section_labels()[i].clone(),
                    axial_position: s.axial_position,
                    r_a: s.r_a,
                    r_b: s.r_b,
                    theta_rad: s.theta_rad,
                    degenerate_theta: s.degenerate_theta,
                    precession: precession_name(s.precession),
                    orbit_point: s.orbit_point,
                    anchors: s.anchors.clone(),
                })
                .collect(),
            posture_lines: f.posture_lines.clone(),
        })
        .collect();
    let json = serde_json::to_string_pretty(&docs)
        .map_err(|e| CliError::Numerical(format!("serializing frames: {e}")))?;
    write_atomic(&out_dir.join("iom.json"), json.as_bytes())?;
    if args.svg {
        write_atomic(
            &out_dir.join("iom.svg"),
            svg::iom_axonometric(&frames).as_bytes(),
        )?;
    }
    println!(
        "wrote {} orbit-map frames to {}",
        frames.len(),
        out_dir.display()
    );
    Ok(())
}

pub fn cmd_plot(args: &PlotArgs) -> Result<()> {
    let record = resolve_record(
        &args.source,
        args.sample_rate,
        &args.columns,
        &args.generator,
    )?;
    ensure_dir(&args.out_dir)?;
    let both = !args.waveforms && !args.orbits;
    let mut written: Vec<PathBuf> = Vec::new();
    if args.waveforms || both {
        let path = args.out_dir.join("waveforms.svg");
        write_atomic(&path, svg::waveforms(&record).as_bytes())?;
        written.push(path);
    }
    if args.orbits || both {
        let path = args.out_dir.join("orbits.svg");
        write_atomic(&path, svg::orbits(&record).as_bytes())?;
        written.push(path);
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(())
}
