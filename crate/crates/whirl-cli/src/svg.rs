//! Static, headless SVG rendering: waveforms, orbits, the signed-frequency
//! heat plot, and the axonometric orbit-map projection. No timestamps or
//! other run-varying content, so rerenders are byte-identical.

use std::fmt::Write as _;

use whirl_core::{IomFrame, MultiSectionRecord, TimeFsGrid};

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        if points.len() < 2 {
            return;
        }
        let pts: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
            pts.join(" ")
        );
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, opacity: f64) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}" fill-opacity="{opacity:.3}"/>"#
        );
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}"/>"#
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, content: &str) {
        let _ = writeln!(
            self.body,
            r##"<text x="{x:.2}" y="{y:.2}" font-size="{size}" font-family="sans-serif" fill="#333">{content}</text>"##
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

fn finite_extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || lo == hi {
        (lo.min(0.0), lo.min(0.0) + 1.0)
    } else {
        (lo, hi)
    }
}

/// Stacked per-probe waveform panels (x and y of each section).
pub fn waveforms(record: &MultiSectionRecord) -> String {
    let panel_h = 120.0;
    let width = 860.0;
    let margin = 50.0;
    let n_series = 2 * record.section_count();
    let mut svg = Svg::new(width, panel_h * n_series as f64 + 40.0);
    let fs = record.sample_rate();
    let t_max = (record.len() - 1) as f64 / fs;
    let mut panel = 0;
    for (i, (x, y)) in record.sections().iter().enumerate() {
        for (series, axis) in [(x, "x"), (y, "y")] {
            let top = 20.0 + panel as f64 * panel_h;
            let (lo, hi) = finite_extent(series.samples().iter().copied());
            let to_px = |n: usize, v: f64| {
                (
                    margin + (n as f64 / fs) / t_max * (width - margin - 20.0),
                    top + (hi - v) / (hi - lo) * (panel_h - 30.0),
                )
            };
            let pts: Vec<(f64, f64)> = series
                .samples()
                .iter()
                .enumerate()
                .map(|(n, &v)| to_px(n, v))
                .collect();
            svg.line(
                margin,
                top + panel_h - 30.0,
                width - 20.0,
                top + panel_h - 30.0,
                "#999",
                0.5,
            );
            svg.polyline(&pts, PALETTE[i % PALETTE.len()], 0.8);
            svg.text(4.0, top + 10.0, 11.0, &format!("{}{}", axis, i + 1));
            panel += 1;
        }
    }
    svg.text(margin, panel_h * n_series as f64 + 32.0, 11.0, "time (s)");
    svg.finish()
}

/// Side-by-side orbit panels (y vs x per section).
pub fn orbits(record: &MultiSectionRecord) -> String {
    let panel = 260.0;
    let k = record.section_count();
    let mut svg = Svg::new(panel * k as f64, panel + 30.0);
    for (i, (x, y)) in record.sections().iter().enumerate() {
        let cx = panel * i as f64 + panel / 2.0;
        let cy = panel / 2.0 + 20.0;
        let extent = finite_extent(x.samples().iter().chain(y.samples()).map(|v| v.abs())).1;
        let scale = (panel / 2.0 - 25.0) / extent;
        let pts: Vec<(f64, f64)> = x
            .samples()
            .iter()
            .zip(y.samples())
            .map(|(&px, &py)| (cx + px * scale, cy - py * scale))
            .collect();
        svg.line(
            cx - panel / 2.0 + 10.0,
            cy,
            cx + panel / 2.0 - 10.0,
            cy,
            "#ccc",
            0.5,
        );
        svg.line(
            cx,
            cy - panel / 2.0 + 10.0,
            cx,
            cy + panel / 2.0 - 10.0,
            "#ccc",
            0.5,
        );
        svg.polyline(&pts, PALETTE[i % PALETTE.len()], 0.8);
        svg.text(panel * i as f64 + 8.0, 14.0, 11.0, &record.labels()[i]);
    }
    svg.finish()
}

/// Heat plot of one section's signed-frequency energy plane. The vertical
/// axis spans the full signed band [-fs/2, +fs/2].
pub fn timefs_heat(grid: &TimeFsGrid, section: usize, label: &str) -> String {
    let width = 860.0;
    let height = 460.0;
    let margin = 60.0;
    let mut svg = Svg::new(width, height);
    let plane = &grid.energy[section];
    let n_t = grid.times_s.len();
    let n_f = grid.freqs_hz.len();
    let f_lo = grid.freqs_hz[0];
    let f_hi = grid.freqs_hz[n_f - 1];
    let t_hi = *grid.times_s.last().unwrap();
    let peak = plane
        .iter()
        .flatten()
        .copied()
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let plot_w = width - margin - 20.0;
    let plot_h = height - margin - 20.0;
    let cell_w = (plot_w / n_t as f64).max(0.75);
    let cell_h = (plot_h / n_f as f64).max(0.75);
    for (ti, row) in plane.iter().enumerate() {
        for (fi, &e) in row.iter().enumerate() {
            if e <= 0.0 {
                continue;
            }
            let x = margin + grid.times_s[ti] / t_hi * plot_w;
            let y = 20.0 + (f_hi - grid.freqs_hz[fi]) / (f_hi - f_lo) * plot_h;
            svg.rect(
                x,
                y - cell_h / 2.0,
                cell_w,
                cell_h,
                "#d62728",
                (e / peak).clamp(0.05, 1.0),
            );
        }
    }
    // axes: zero-frequency line, frame, labels
    let y0 = 20.0 + f_hi / (f_hi - f_lo) * plot_h;
    svg.line(margin, y0, width - 20.0, y0, "#999", 0.7);
    svg.line(margin, 20.0, margin, height - margin, "#333", 1.0);
    svg.line(
        margin,
        height - margin,
        width - 20.0,
        height - margin,
        "#333",
        1.0,
    );
    for (f, anchor_y) in [(f_hi, 25.0), (0.0, y0), (f_lo, height - margin)] {
        svg.text(6.0, anchor_y + 4.0, 10.0, &format!("{f:+.0} Hz"));
    }
    svg.text(width / 2.0, height - 8.0, 11.0, "time (s)");
    svg.text(margin, 12.0, 11.0, label);
    svg.finish()
}

/// Axonometric projection of orbit-map frames: one panel per frame,
/// sections stacked along the shaft axis, posture lines joining anchors.
pub fn iom_axonometric(frames: &[IomFrame]) -> String {
    let panel_w = 420.0;
    let height = 420.0;
    let mut svg = Svg::new(panel_w * frames.len() as f64, height);
    // oblique axis direction in screen space per unit axial position
    for (fi, frame) in frames.iter().enumerate() {
        let extent = frame
            .sections
            .iter()
            .map(|s| s.r_a)
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let axial_span = frame
            .sections
            .iter()
            .map(|s| s.axial_position)
            .fold(0.0_f64, f64::max)
            .max(1.0);
        let scale = 90.0 / extent;
        let (ax_dx, ax_dy) = (220.0 / axial_span, -120.0 / axial_span);
        let origin = (panel_w * fi as f64 + 90.0, height - 140.0);
        let project = |axial: f64, x: f64, y: f64| {
            (
                origin.0 + axial * ax_dx + x * scale,
                origin.1 + axial * ax_dy - y * scale,
            )
        };
        // shaft axis
        let a_max = frame
            .sections
            .iter()
            .map(|s| s.axial_position)
            .fold(f64::NEG_INFINITY, f64::max);
        let a_min = frame
            .sections
            .iter()
            .map(|s| s.axial_position)
            .fold(f64::INFINITY, f64::min);
        let p0 = project(a_min - 0.2 * axial_span, 0.0, 0.0);
        let p1 = project(a_max + 0.2 * axial_span, 0.0, 0.0);
        svg.line(p0.0, p0.1, p1.0, p1.1, "#999", 0.8);
        for (si, sec) in frame.sections.iter().enumerate() {
            let outline: Vec<(f64, f64)> =
                whirl_core::sample_ellipse(sec.r_a, sec.r_b, sec.theta_rad, 128)
                    .into_iter()
                    .map(|(x, y)| project(sec.axial_position, x, y))
                    .collect();
            let mut closed = outline.clone();
            if let Some(&first) = outline.first() {
                closed.push(first);
            }
            svg.polyline(&closed, PALETTE[si % PALETTE.len()], 1.2);
            let op = project(sec.axial_position, sec.orbit_point.0, sec.orbit_point.1);
            svg.circle(op.0, op.1, 3.0, "#000");
        }
        for (li, line) in frame.posture_lines.iter().enumerate() {
            let pts: Vec<(f64, f64)> = line
                .iter()
                .map(|&(axial, x, y)| project(axial, x, y))
                .collect();
            let color = if li == 0 { "#000" } else { "#bbb" };
            svg.polyline(&pts, color, if li == 0 { 1.2 } else { 0.7 });
        }
        svg.text(
            panel_w * fi as f64 + 10.0,
            16.0,
            11.0,
            &format!("t = {:.4} s", frame.time_s),
        );
    }
    svg.finish()
}
