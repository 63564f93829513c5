//! Two-panel SVG snapshots of the ring curve: an orthographic 3-D view and
//! the top (xy) view. Output depends only on the grid contents.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use ringlab_core::Vec3;

use crate::grid::{Grid, GridRow};
use crate::manifest::{create_dir, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Svg,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Grid CSV written by `simulate`.
    #[arg(long)]
    grid: PathBuf,
    /// Comma-separated snapshot times: initial, terminal, or a time value
    /// (the nearest grid time is used).
    #[arg(long, default_value = "initial,terminal")]
    times: String,
    #[arg(long, value_enum, default_value = "svg")]
    format: Format,
    #[arg(long)]
    out: PathBuf,
}

const PANEL: f64 = 480.0;
const MARGIN: f64 = 48.0;
const AZIMUTH: f64 = -0.6;
const ELEVATION: f64 = 0.45;

/// Grid time and file stem for one `--times` entry.
fn select_time(spec: &str, times: &[f64]) -> anyhow::Result<(f64, String)> {
    match spec.trim() {
        "initial" => Ok((times[0], "initial".into())),
        "terminal" => Ok((*times.last().expect("grid has rows"), "terminal".into())),
        other => {
            let t: f64 = other
                .parse()
                .map_err(|_| ringlab_core::Error::InvalidConfig(format!("snapshot time '{other}' is not initial, terminal or a number")))?;
            let (i, &nearest) = times
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .expect("grid has rows");
            Ok((nearest, format!("t{i}")))
        }
    }
}

fn oblique(p: Vec3) -> (f64, f64) {
    let (sa, ca) = AZIMUTH.sin_cos();
    let (se, ce) = ELEVATION.sin_cos();
    let right = Vec3::new(-sa, ca, 0.0);
    let up = Vec3::new(-se * ca, -se * sa, ce);
    (p.dot(right), p.dot(up))
}

fn top(p: Vec3) -> (f64, f64) {
    (p.x, p.y)
}

struct Panel<'a> {
    out: &'a mut String,
    x0: f64,
    scale: f64,
}

impl Panel<'_> {
    fn map(&self, (u, v): (f64, f64)) -> (f64, f64) {
        (self.x0 + PANEL / 2.0 + u * self.scale, PANEL / 2.0 + 16.0 - v * self.scale)
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), style: &str) {
        let (a, b) = (self.map(a), self.map(b));
        writeln!(self.out, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#, a.0, a.1, b.0, b.1).unwrap();
    }

    fn label(&mut self, at: (f64, f64), text: &str) {
        let p = self.map(at);
        writeln!(self.out, r#"<text x="{:.2}" y="{:.2}" font-size="13">{text}</text>"#, p.0 + 3.0, p.1 - 3.0).unwrap();
    }

    fn curve(&mut self, points: &[(f64, f64)], feasible: &[bool]) {
        let mut path = String::new();
        for (i, &p) in points.iter().enumerate() {
            let (x, y) = self.map(p);
            write!(path, "{}{x:.2},{y:.2}", if i == 0 { "M" } else { " L" }).unwrap();
        }
        path.push_str(" Z");
        writeln!(self.out, r##"<path d="{path}" fill="none" stroke="#1f4e9c" stroke-width="1.6"/>"##).unwrap();
        for (&p, &ok) in points.iter().zip(feasible) {
            let (x, y) = self.map(p);
            let fill = if ok { "#2a9d47" } else { "#b0b0b0" };
            writeln!(self.out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.2" fill="{fill}"/>"#).unwrap();
        }
    }
}

/// Radial extent range and z-extent of a snapshot.
pub fn snapshot_extents(rows: &[&GridRow]) -> (f64, f64, f64) {
    let r = rows.iter().map(|r| r.position.x.hypot(r.position.y));
    let (r_min, r_max) = r.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let z = rows.iter().map(|r| r.position.z);
    let (z_min, z_max) = z.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (r_min, r_max, z_max - z_min)
}

pub fn render_svg(rows: &[&GridRow], t: f64) -> String {
    let positions: Vec<Vec3> = rows.iter().map(|r| r.position).collect();
    let feasible: Vec<bool> = rows.iter().map(|r| r.feasible).collect();
    let reach = positions.iter().map(|p| p.max_abs()).fold(0.0, f64::max).max(1e-9);
    let scale = (PANEL / 2.0 - MARGIN) / (1.15 * reach);
    let (r_min, r_max, z_extent) = snapshot_extents(rows);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
        w = 2.0 * PANEL,
        h = PANEL + 40.0
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="12" y="22" font-size="15">t = {t:.6}   radius {r_min:.4} to {r_max:.4}   z-extent = {z_extent:.4e}</text>"#
    )
    .unwrap();

    let axis = r##"stroke="#666" stroke-width="0.8""##;
    let len = 1.1 * reach;
    {
        let mut panel = Panel { out: &mut out, x0: 0.0, scale };
        panel.label((-len, len), "orthographic");
        for (dir, name) in [(Vec3::X, "x"), (Vec3::Y, "y"), (Vec3::Z, "z")] {
            let tip = oblique(dir * len);
            panel.line((0.0, 0.0), tip, axis);
            panel.label(tip, name);
        }
        let pts: Vec<(f64, f64)> = positions.iter().map(|&p| oblique(p)).collect();
        panel.curve(&pts, &feasible);
    }
    {
        let mut panel = Panel { out: &mut out, x0: PANEL, scale };
        panel.label((-len, len), "top view (xy)");
        panel.line((-len, 0.0), (len, 0.0), axis);
        panel.line((0.0, -len), (0.0, len), axis);
        panel.label((len, 0.0), "x");
        panel.label((0.0, len), "y");
        panel.label((reach, -0.08 * reach), &format!("{reach:.3}"));
        let pts: Vec<(f64, f64)> = positions.iter().map(|&p| top(p)).collect();
        panel.curve(&pts, &feasible);
    }
    out.push_str("</svg>\n");
    out
}

pub fn run(args: &RenderArgs) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.grid).map_err(|e| ringlab_core::Error::Io {
        path: args.grid.clone(),
        source: e,
    })?;
    let grid = Grid::parse(&text).map_err(|reason| ringlab_core::Error::Parse {
        path: args.grid.clone(),
        reason,
    })?;
    let times = grid.times();
    let specs: Vec<&str> = args.times.split(',').filter(|s| !s.trim().is_empty()).collect();
    if specs.is_empty() {
        bail!(ringlab_core::Error::InvalidConfig("no snapshot time requested".into()));
    }

    create_dir(&args.out)?;
    let mut manifest = RunManifest::new(None, None);
    manifest.add_input(&args.grid)?;
    for spec in specs {
        let (t, stem) = select_time(spec, &times)?;
        let rows = grid.snapshot(t);
        let name = format!("ring_{stem}.{}", match args.format {
            Format::Svg => "svg",
        });
        manifest
            .write_output(&args.out, &name, render_svg(&rows, t).as_bytes())
            .with_context(|| format!("rendering t = {t}"))?;
        let (r_min, r_max, z_extent) = snapshot_extents(&rows);
        println!("{name}: t = {t:.6}, radius {r_min:.4} to {r_max:.4}, z-extent {z_extent:.4e}");
    }
    manifest.finish(&args.out)?;
    Ok(ExitCode::SUCCESS)
}
