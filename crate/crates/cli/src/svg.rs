//! SVG rendering of the stable-norm unit ball.
//!
//! Sphere points of sector directions are computed once, then copied around
//! by the twelve linear symmetries. Corner slopes are drawn as short tangent
//! stubs at every corner, in every image.

use std::fmt::Write as _;

use markov_core::fock::{mu_minus, mu_plus};
use markov_core::norm::{sphere_point, Symmetry};
use markov_core::verify::sector_directions;
use markov_core::Result;

const SIZE: f64 = 800.0;
const SCALE: f64 = 600.0;
const STUB: f64 = 0.04;

/// A point on the sector arc together with its corner slopes.
pub struct Corner {
    pub point: (f64, f64),
    pub slopes: Vec<f64>,
}

pub fn corners(bound: u64, precision_bits: u32) -> Result<Vec<Corner>> {
    sector_directions(bound)
        .into_iter()
        .map(|c| {
            let s = sphere_point(c, precision_bits)?;
            let slopes = [mu_minus(c, precision_bits)?, mu_plus(c, precision_bits)?]
                .into_iter()
                .flatten()
                .map(|e| e.to_f64())
                .collect();
            Ok(Corner {
                point: (s.x.to_f64(), s.y.to_f64()),
                slopes,
            })
        })
        .collect()
}

/// The linear action of `g` on a real vector, matching [`Symmetry::apply`].
fn act(g: Symmetry, (mut x, mut y): (f64, f64)) -> (f64, f64) {
    for _ in 0..g.rotation {
        (x, y) = (-y, x + y);
    }
    if g.swap {
        (x, y) = (y, x);
    }
    (x, y)
}

fn to_screen((x, y): (f64, f64)) -> (f64, f64) {
    (SIZE / 2.0 + SCALE * x, SIZE / 2.0 - SCALE * y)
}

pub fn render(corners: &[Corner]) -> String {
    let mut boundary: Vec<(f64, f64)> = Symmetry::all()
        .flat_map(|g| corners.iter().map(move |c| act(g, c.point)))
        .collect();
    boundary.sort_by(|a, b| a.1.atan2(a.0).total_cmp(&b.1.atan2(b.0)));
    boundary.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    let (cx, cy) = to_screen((0.0, 0.0));
    let _ = writeln!(
        svg,
        r##"<path d="M 0 {cy} H {SIZE} M {cx} 0 V {SIZE}" stroke="#bbbbbb" stroke-width="1"/>"##
    );
    let mut d = String::new();
    for (i, &p) in boundary.iter().enumerate() {
        let (x, y) = to_screen(p);
        let _ = write!(d, "{}{x:.3} {y:.3} ", if i == 0 { "M " } else { "L " });
    }
    d.push('Z');
    let _ = writeln!(
        svg,
        r##"<path d="{d}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>"##
    );
    for g in Symmetry::all() {
        for c in corners {
            for &m in &c.slopes {
                let len = (1.0 + m * m).sqrt();
                let dir = (STUB / len, STUB * m / len);
                let a = act(g, (c.point.0 - dir.0, c.point.1 - dir.1));
                let b = act(g, (c.point.0 + dir.0, c.point.1 + dir.1));
                let (a, b) = (to_screen(a), to_screen(b));
                let _ = writeln!(
                    svg,
                    r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#c0392b" stroke-width="0.8"/>"##,
                    a.0, a.1, b.0, b.1
                );
            }
            let (x, y) = to_screen(act(g, c.point));
            let _ = writeln!(
                svg,
                r##"<circle cx="{x:.3}" cy="{y:.3}" r="1.6" fill="#1f4e9c"/>"##
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
