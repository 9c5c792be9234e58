//! Minimal deterministic SVG output: tensor glyphs with track overlays, and
//! line plots.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geodesic::GeodesicTrack;
use crate::tensor_core::{anisotropy_scalar, sym_eigen, AnisotropyMeasure, Mat3};
use crate::tensor_field::TensorField;

const PX: f64 = 16.0;
const COLORS: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A labelled set of tracks drawn in one colour.
pub struct TrackLayer<'a> {
    pub label: &'a str,
    pub tracks: &'a [GeodesicTrack],
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

/// One ellipse per voxel of the in-plane 2×2 block (middle slice for 3D
/// fields), shaded by FA, with tracks drawn on top as polylines.
pub fn field_svg(field: &TensorField, layers: &[TrackLayer]) -> String {
    let g = field.grid();
    let (nx, ny) = (g.dims[0], g.dims[1]);
    let (w, h) = (nx as f64 * PX, ny as f64 * PX);
    let kz = if g.dim == 3 { g.dims[2] / 2 } else { 0 };
    let lmax = field.data().iter().map(|d| d.eig().max()).fold(0.0, f64::max);
    let to_px = |x: f64, y: f64| {
        let i = (x - g.origin[0]) / g.spacing[0];
        let j = (y - g.origin[1]) / g.spacing[1];
        ((i + 0.5) * PX, h - (j + 0.5) * PX)
    };

    let mut out = String::new();
    header(&mut out, w, h);
    out.push_str("<g id=\"glyphs\" stroke=\"none\">\n");
    for j in 0..ny {
        for i in 0..nx {
            let d = field.at([i, j, kz]);
            let mut m = Mat3::zeros();
            m.fixed_view_mut::<2, 2>(0, 0).copy_from(&d.matrix().fixed_view::<2, 2>(0, 0));
            let e = sym_eigen(2, &m);
            let v = e.vector(0);
            let angle = -v.y.atan2(v.x).to_degrees();
            let r = |l: f64| 0.48 * PX * (l / lmax).max(0.0).sqrt();
            let fa = anisotropy_scalar(d, AnisotropyMeasure::Fa);
            let shade = (230.0 - 180.0 * fa).round() as u8;
            let (cx, cy) = ((i as f64 + 0.5) * PX, h - (j as f64 + 0.5) * PX);
            let _ = writeln!(
                out,
                r#"<ellipse cx="{cx:.2}" cy="{cy:.2}" rx="{:.3}" ry="{:.3}" transform="rotate({angle:.3} {cx:.2} {cy:.2})" fill="rgb({shade},{shade},{shade})"/>"#,
                r(e.values[0]),
                r(e.values[1]),
            );
        }
    }
    out.push_str("</g>\n");
    for (k, layer) in layers.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<g id="tracks-{k}" fill="none" stroke="{color}" stroke-width="1.5" stroke-opacity="0.8"><title>{}</title>"#,
            escape(layer.label)
        );
        for t in layer.tracks {
            if t.vertices.len() < 2 {
                continue;
            }
            out.push_str("<polyline points=\"");
            for (n, p) in t.vertices.iter().enumerate() {
                let (x, y) = to_px(p.x, p.y);
                let sep = if n == 0 { "" } else { " " };
                let _ = write!(out, "{sep}{x:.2},{y:.2}");
            }
            out.push_str("\"/>\n");
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A named series of `(x, y)` points.
pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// Line plot with axes, min/max tick labels and a legend. `log_y` plots
/// `log10(y)` and requires positive values.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool) -> Result<String> {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (70.0, 150.0, 40.0, 50.0);
    let fy = |y: f64| if log_y { y.log10() } else { y };
    let pts: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    if pts.is_empty() {
        return Err(Error::InvalidParameter("nothing to plot".into()));
    }
    if pts.iter().any(|(x, y)| !x.is_finite() || !fy(*y).is_finite()) {
        return Err(Error::NonFinite("plot data"));
    }
    let span = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(x), b.max(x)));
        if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) }
    };
    let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = span(&mut pts.iter().map(|p| fy(p.1)));
    let (pw, ph) = (w - left - right, h - top - bottom);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (fy(y) - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    header(&mut out, w, h);
    let _ = writeln!(
        out,
        r#"<g font-family="sans-serif" font-size="12"><text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let fmt_y = |v: f64| if log_y { format!("1e{v:.2}") } else { format!("{v:.4}") };
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, top + ph, fmt_y(y0));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, top + 10.0, fmt_y(y1));
    let _ = writeln!(out, r#"<text x="{left}" y="{}" text-anchor="middle">{x0:.3}</text>"#, top + ph + 16.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{x1:.3}</text>"#, left + pw, top + ph + 16.0);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    );
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        out.push_str(&format!(r#"<polyline fill="none" stroke="{color}" stroke-width="2" points=""#));
        for (n, (x, y)) in s.points.iter().enumerate() {
            let sep = if n == 0 { "" } else { " " };
            let _ = write!(out, "{sep}{:.2},{:.2}", sx(*x), sy(*y));
        }
        out.push_str("\"/>\n");
        let ly = top + 16.0 * (k as f64 + 1.0);
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            w - right + 10.0,
            w - right + 30.0,
            w - right + 36.0,
            ly + 4.0,
            escape(s.name)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
