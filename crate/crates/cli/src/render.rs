//! Deterministic SVG pictures of a prefractal and an orbit.

use std::fmt::Write;

use snowflake_core::boundary::Prefractal;
use snowflake_core::dynamics::{Orbit, OrbitStatus};
use snowflake_core::lattice::LatticePoint;

#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    pub width: f64,
    pub cells: bool,
    pub ghosts: bool,
    pub footprint: bool,
}

impl Default for Style {
    fn default() -> Self {
        Self { width: 800.0, cells: true, ghosts: true, footprint: true }
    }
}

/// Formats with 12 significant digits and no trailing zeros.
pub fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.truncate(s.trim_end_matches('0').trim_end_matches('.').len());
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    margin: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn new(p: &Prefractal, width: f64) -> Self {
        let pts: Vec<(f64, f64)> = p.vertex_points().iter().map(LatticePoint::to_cartesian).collect();
        let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64)) -> f64| {
            pts.iter().map(pick).fold(init, f)
        };
        let min_x = fold(f64::min, f64::INFINITY, |q| q.0);
        let max_x = fold(f64::max, f64::NEG_INFINITY, |q| q.0);
        let min_y = fold(f64::min, f64::INFINITY, |q| q.1);
        let max_y = fold(f64::max, f64::NEG_INFINITY, |q| q.1);
        let margin = width * 0.04;
        let scale = (width - 2.0 * margin) / (max_x - min_x);
        let height = (max_y - min_y) * scale + 2.0 * margin;
        Frame { min_x, max_y, scale, margin, width, height }
    }

    fn map(&self, p: &LatticePoint) -> (String, String) {
        let (x, y) = p.to_cartesian();
        (
            num((x - self.min_x) * self.scale + self.margin),
            num((self.max_y - y) * self.scale + self.margin),
        )
    }

    fn points(&self, pts: &[LatticePoint]) -> String {
        pts.iter()
            .map(|q| {
                let (x, y) = self.map(q);
                format!("{x},{y}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Breakpoints of the orbit in drawing order and whether the path closes.
fn orbit_path(p: &Prefractal, o: &Orbit) -> (Vec<LatticePoint>, bool) {
    let mut pts: Vec<LatticePoint> = o.states.iter().map(|s| s.point(p)).collect();
    match &o.status {
        OrbitStatus::Periodic { .. } => (pts, true),
        OrbitStatus::Singular { point, step, .. } => {
            if *step > 0 {
                pts.push(point.clone());
            }
            (pts, false)
        }
        OrbitStatus::BudgetExceeded { .. } => (pts, false),
    }
}

pub fn render_svg(p: &Prefractal, orbit: Option<&Orbit>, style: &Style) -> String {
    let f = Frame::new(p, style.width);
    let stroke = num(f.width / 400.0);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = num(f.width),
        h = num(f.height)
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    if style.cells && p.level() > 0 {
        let _ = writeln!(s, r##"<g id="cells" fill="#e4edf7" stroke="none">"##);
        for c in p.cells() {
            let _ = writeln!(s, r#"<polygon points="{}"/>"#, f.points(&c.triangle));
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(
        s,
        r##"<polygon id="boundary" fill="none" stroke="#1d2b3a" stroke-width="{stroke}" stroke-linejoin="round" points="{}"/>"##,
        f.points(&p.vertex_points())
    );
    if style.ghosts && p.level() > 0 {
        let _ = writeln!(
            s,
            r##"<g id="ghosts" stroke="#6f7f90" stroke-width="{stroke}" stroke-dasharray="{d}">"##,
            d = num(f.width / 160.0)
        );
        for c in p.cells() {
            let (x1, y1) = f.map(&c.ghost.segment.start);
            let (x2, y2) = f.map(&c.ghost.segment.end);
            let _ = writeln!(s, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    if let Some(o) = orbit {
        let (pts, closed) = orbit_path(p, o);
        let mut d = String::new();
        for (i, q) in pts.iter().enumerate() {
            let (x, y) = f.map(q);
            let _ = write!(d, "{}{x},{y}", if i == 0 { "M" } else { " L" });
        }
        if closed {
            d.push_str(" Z");
        }
        let _ = writeln!(
            s,
            r##"<path id="orbit" fill="none" stroke="#b83227" stroke-width="{stroke}" stroke-linejoin="round" d="{d}"/>"##
        );
        if style.footprint {
            let _ = writeln!(s, r##"<g id="footprint" fill="#b83227">"##);
            for st in &o.states {
                let (x, y) = f.map(&st.point(p));
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="{}"/>"#, num(f.width / 200.0));
            }
            let _ = writeln!(s, "</g>");
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use snowflake_core::boundary::build_prefractal;

    #[test]
    fn number_format() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(-2.0), "-2");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(123456.789), "123456.789");
        assert_eq!(num(-2.5e-5), "-0.000025");
    }

    #[test]
    fn triangle_outline() {
        let p = build_prefractal(0).unwrap();
        let svg = render_svg(&p, None, &Style::default());
        let boundary = svg.lines().find(|l| l.contains(r#"id="boundary""#)).unwrap();
        let pts = boundary.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        assert_eq!(pts.split(' ').count(), 3);
        assert!(!svg.contains("ghosts"));
        assert!(!svg.contains("orbit"));
    }
}
