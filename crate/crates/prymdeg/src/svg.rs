//! SVG pictures of decompositions of rank at most two and of family fans.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cells::enumerate::to_f64;
use crate::cells::PeriodicDecomposition;
use crate::fans::DegenerationFan;
use crate::linalg::{Int, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SvgError {
    #[error("cannot draw a decomposition of rank {0}")]
    DimensionUnsupported(usize),
}

const UNIT: f64 = 60.0;

struct Canvas {
    half: f64,
    body: String,
}

impl Canvas {
    fn new(half_units: Int) -> Self {
        Canvas { half: half_units as f64 * UNIT + 20.0, body: String::new() }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (self.half + x * UNIT, self.half - y * UNIT)
    }

    fn finish(self, title: &str) -> String {
        let size = 2.0 * self.half;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.0} {size:.0}">"#
        );
        let _ = writeln!(s, "<title>{title}</title>");
        let _ = writeln!(s, r#"<defs><clipPath id="view"><rect x="0" y="0" width="{size:.0}" height="{size:.0}"/></clipPath></defs>"#);
        let _ = writeln!(s, r##"<rect x="0" y="0" width="{size:.0}" height="{size:.0}" fill="#ffffff"/>"##);
        let _ = writeln!(s, r#"<g clip-path="url(#view)">"#);
        s.push_str(&self.body);
        s.push_str("</g>\n</svg>\n");
        s
    }

    fn axes(&mut self) {
        let (x0, y0) = self.px(0.0, 0.0);
        let e = 2.0 * self.half;
        let _ = writeln!(self.body, r##"<line x1="0" y1="{y0:.2}" x2="{e:.2}" y2="{y0:.2}" stroke="#bbbbbb" stroke-width="1"/>"##);
        let _ = writeln!(self.body, r##"<line x1="{x0:.2}" y1="0" x2="{x0:.2}" y2="{e:.2}" stroke="#bbbbbb" stroke-width="1"/>"##);
    }

    fn polygon(&mut self, pts: &[(f64, f64)], fill: &str, stroke: &str) {
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            let (px, py) = self.px(*x, *y);
            let _ = write!(d, "{}{px:.2},{py:.2}", if i == 0 { "" } else { " " });
        }
        let _ = writeln!(self.body, r#"<polygon points="{d}" fill="{fill}" stroke="{stroke}" stroke-width="1.5"/>"#);
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        let (x1, y1) = self.px(a.0, a.1);
        let (x2, y2) = self.px(b.0, b.1);
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    fn dot(&mut self, p: (f64, f64)) {
        let (x, y) = self.px(p.0, p.1);
        let _ = writeln!(self.body, r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#000000"/>"##);
    }

    fn label(&mut self, p: (f64, f64), text: &str) {
        let (x, y) = self.px(p.0, p.1);
        let _ = writeln!(self.body, r#"<text x="{x:.2}" y="{y:.2}" font-size="11" font-family="sans-serif">{text}</text>"#);
    }
}

fn convex_order(vs: &[Vec<Int>]) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = vs.iter().map(|v| (v[0] as f64, v[1] as f64)).collect();
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut keyed: Vec<(f64, (f64, f64))> = pts.into_iter().map(|p| ((p.1 - cy).atan2(p.0 - cx), p)).collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.into_iter().map(|(_, p)| p).collect()
}

/// Cells of a decomposition of rank at most 2 in lattice coordinates, with
/// lattice points, the fundamental domain of the period shaded and an
/// optional line through the origin (a sublattice direction).
pub fn render_decomposition(
    d: &PeriodicDecomposition,
    overlay: Option<&[Rat]>,
    half_units: Int,
    title: &str,
) -> Result<String, SvgError> {
    if d.rank > 2 {
        return Err(SvgError::DimensionUnsupported(d.rank));
    }
    let mut cv = Canvas::new(half_units);
    cv.axes();
    let min_period = d.period.iter().enumerate().map(|(i, r)| r[i].abs()).min().unwrap_or(1).max(1);
    let radius = half_units / min_period + 2;
    match d.rank {
        2 => {
            let (a, b) = (&d.period[0], &d.period[1]);
            let dom = [(0, 0), (a[0], a[1]), (a[0] + b[0], a[1] + b[1]), (b[0], b[1])];
            let dom: Vec<(f64, f64)> = dom.iter().map(|(x, y)| (*x as f64, *y as f64)).collect();
            cv.polygon(&dom, "#fde9c8", "none");
            for cell in d.translates(radius) {
                if cell.len() >= 3 {
                    cv.polygon(&convex_order(&cell), "none", "#1f4e9c");
                }
            }
            for x in -half_units..=half_units {
                for y in -half_units..=half_units {
                    cv.dot((x as f64, y as f64));
                }
            }
        }
        1 => {
            let p = d.period[0][0] as f64;
            cv.line((0.0, 0.0), (p, 0.0), "#f3b04a", 8.0);
            for cell in d.translates(radius) {
                let xs: Vec<f64> = cell.iter().map(|v| v[0] as f64).collect();
                let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                cv.line((lo, 0.0), (hi, 0.0), "#1f4e9c", 2.0);
                cv.line((lo, -0.15), (lo, 0.15), "#1f4e9c", 2.0);
                cv.line((hi, -0.15), (hi, 0.15), "#1f4e9c", 2.0);
            }
            for x in -half_units..=half_units {
                cv.dot((x as f64, 0.0));
            }
        }
        _ => {
            if !d.cells.is_empty() {
                cv.dot((0.0, 0.0));
            }
        }
    }
    if let Some(dir) = overlay {
        if dir.len() == 2 {
            let (dx, dy) = (to_f64(dir[0]), to_f64(dir[1]));
            let n = (dx * dx + dy * dy).sqrt();
            if n > 0.0 {
                let t = 2.0 * half_units as f64 / n;
                cv.line((-dx * t, -dy * t), (dx * t, dy * t), "#c0392b", 2.0);
            }
        }
    }
    Ok(cv.finish(title))
}

/// Rays of a family fan drawn through their positions `a / b` on the line
/// `t = 1`, which is placed near the top of the picture (the vertical axis
/// is stretched). Hull vertices label the cones.
pub fn render_fan(f: &DegenerationFan, title: &str) -> String {
    let pos: Vec<f64> = f.positions().into_iter().map(to_f64).collect();
    let span = pos.iter().fold(1.0f64, |m, x| m.max(x.abs())).ceil() as Int + 1;
    let mut cv = Canvas::new(span);
    let top = 0.8 * span as f64;
    let bottom = -0.8 * span as f64;
    cv.line((-(span as f64), top), (span as f64, top), "#bbbbbb", 1.0);
    for (i, x) in pos.iter().enumerate() {
        cv.line((0.0, bottom), (*x, top), "#1f4e9c", 1.5);
        let (a, b) = f.rays[i];
        cv.label((*x, top + 0.1), &format!("{a}/{b}"));
    }
    for (i, m) in f.cones.iter().enumerate() {
        let mid = (pos[i] + pos[i + 1]) / 2.0;
        cv.label((mid, top - 0.4), &format!("m={m}"));
    }
    cv.finish(title)
}
