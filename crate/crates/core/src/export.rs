//! CSV tables and SVG drawings.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;

use crate::bloch::{SimResult, SlopeReport};
use crate::catalog::AlphaScanRow;
use crate::geom::Vec3;
use crate::walk::{Segment, Walk};

/// Samples per step when writing a walk curve.
pub const WALK_SAMPLES: usize = 32;

/// Shortest round-trip text; exponent form for magnitudes below 1e−4.
fn num(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// `t,px,py,pz,step_index` rows along the walk (scaled units, 1-based step).
pub fn walk_csv(walk: &Walk, per_step: usize) -> String {
    let mut out = String::from("t,px,py,pz,step_index\n");
    for (t, p, step) in walk.samples(per_step) {
        let _ = writeln!(out, "{},{},{},{},{}", num(t), num(p.x), num(p.y), num(p.z), step + 1);
    }
    out
}

pub fn trajectory_csv(sim: &SimResult) -> String {
    let mut out = String::from("t,rx,ry,rz\n");
    if let Some(traj) = &sim.trajectory {
        for (t, r) in traj {
            let _ = writeln!(out, "{},{},{},{}", num(*t), num(r.x), num(r.y), num(r.z));
        }
    }
    out
}

pub fn slope_csv(rep: &SlopeReport) -> String {
    let mut out = String::from("error,deviation\n");
    for (e, d) in rep.error_values.iter().zip(&rep.deviations) {
        let _ = writeln!(out, "{},{}", num(*e), num(*d));
    }
    out
}

pub fn alpha_scan_csv(rows: &[AlphaScanRow]) -> String {
    let mut out = String::from("alpha,residual,area_z\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", num(r.alpha), num(r.residual), num(r.area_z));
    }
    out
}

const ODD_STROKE: &str = "#1f4e99";
const EVEN_STROKE: &str = "#8fb3e8";

/// Top view (x′y′ projection) of a walk. Odd steps are drawn dark, even steps
/// lighter. Arcs get their chord dashed and a `+`/`−` mark for threading
/// above or below the chord plane.
pub fn walk_svg(walk: &Walk, title: &str) -> String {
    let samples = walk.samples(WALK_SAMPLES);
    let (mut lo, mut hi) = (Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 0.0));
    for (_, p, _) in &samples {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let size = 480.0;
    let margin = 40.0;
    let scale = (size - 2.0 * margin) / span;
    let map = |p: Vec3| (margin + (p.x - lo.x) * scale, size - margin - (p.y - lo.y) * scale);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(svg, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    for (i, seg) in walk.curve().iter().enumerate() {
        let stroke = if i % 2 == 0 { ODD_STROKE } else { EVEN_STROKE };
        let pts: Vec<String> = (0..=WALK_SAMPLES)
            .map(|k| {
                let (x, y) = map(seg.point_at(k as f64 / WALK_SAMPLES as f64));
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="step step-{}" points="{}" fill="none" stroke="{stroke}" stroke-width="2"/>"#,
            i + 1,
            pts.join(" ")
        );
        if let Segment::Arc { .. } = seg {
            let (x1, y1) = map(seg.start());
            let (x2, y2) = map(seg.end());
            let _ = writeln!(
                svg,
                r#"<line class="chord" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-dasharray="4 3"/>"#
            );
            let mid = (seg.start() + seg.end()) * 0.5;
            let (mx, my) = map(mid);
            let mark = if seg.bulge().z >= 0.0 { "+" } else { "−" };
            let _ = writeln!(
                svg,
                r#"<text class="lune" x="{mx:.3}" y="{my:.3}" font-size="14" text-anchor="middle">{mark}</text>"#
            );
        }
    }
    let (ox, oy) = map(Vec3::ZERO);
    let _ = writeln!(
        svg,
        r##"<circle class="origin" cx="{ox:.3}" cy="{oy:.3}" r="3" fill="#2a7"/>"##
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
