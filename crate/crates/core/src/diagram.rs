//! SVG pictures of rank-2 Stiefel diagrams.
//!
//! Root hyperplanes are drawn with stroke width 2, the other diagram lines
//! with width 1; points of `Γ` are small dots and points of `Γ_0` larger
//! ones. The line `α = k` is drawn when it meets the disc inscribed in the
//! window, i.e. when `k² ≤ w² |α|²`. Output is a pure function of the input.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::catalog::SpaceSpec;
use crate::error::{Error, Result};
use crate::exact::{int, Rational, RationalVector};
use crate::lattice::{fundamental_lattice, LatticeBasis};

const HALF_SIZE: f64 = 200.0;
const MARGIN: f64 = 20.0;

struct Frame {
    w: Rational,
    scale: f64,
}

impl Frame {
    fn px(&self, x: &Rational) -> f64 {
        MARGIN + (x + &self.w).to_f64().unwrap_or(0.0) * self.scale
    }

    fn py(&self, y: &Rational) -> f64 {
        MARGIN + (&self.w - y).to_f64().unwrap_or(0.0) * self.scale
    }
}

/// Endpoints of `{ a x + b y = k }` inside `[-w, w]²`, if the intersection is
/// a proper segment.
fn clip(a: &Rational, b: &Rational, k: &Rational, w: &Rational) -> Option<([Rational; 2], [Rational; 2])> {
    let mut points: Vec<[Rational; 2]> = Vec::new();
    let inside = |t: &Rational| t >= &-w.clone() && t <= w;
    for edge in [-w.clone(), w.clone()] {
        if !b.is_zero() {
            let y = (k - a * &edge) / b;
            if inside(&y) {
                points.push([edge.clone(), y]);
            }
        }
        if !a.is_zero() {
            let x = (k - b * &edge) / a;
            if inside(&x) {
                points.push([x, edge.clone()]);
            }
        }
    }
    points.sort();
    points.dedup();
    if points.len() < 2 {
        return None;
    }
    let last = points.pop().expect("two points");
    Some((points.swap_remove(0), last))
}

/// Largest integer `k` with `k² ≤ bound`.
fn floor_sqrt(bound: &Rational) -> BigInt {
    if bound.is_negative() {
        return BigInt::zero();
    }
    let mut k = bound.floor().to_integer().sqrt();
    while Rational::from_integer(&k * &k + 2 * &k + 1) <= *bound {
        k += 1;
    }
    k
}

fn window_points(lattice: &LatticeBasis, w: &Rational) -> Result<Vec<RationalVector>> {
    if lattice.rank() == 0 {
        return Ok(vec![RationalVector::zeros(2)]);
    }
    if !lattice.is_full_rank() {
        return Err(Error::NotSupported("diagram of a rank-deficient lattice".into()));
    }
    // Euclidean coordinates are plotted, so bound by the Euclidean disc.
    let euclid = LatticeBasis::new(lattice.basis().clone(), crate::exact::RationalMatrix::identity(2))?;
    let radius_squared = int(2) * w * w;
    let mut pts: Vec<RationalVector> = euclid
        .translates_in_ball(&RationalVector::zeros(2), &radius_squared, false)?
        .into_iter()
        .filter(|p| p.coords().iter().all(|c| c.abs() <= *w))
        .collect();
    pts.sort();
    Ok(pts)
}

/// Renders the diagram of a rank-2 space over `[-window, window]²`, with a
/// cross at each mark.
pub fn emit_svg(space: &SpaceSpec, window: &Rational, marks: &[RationalVector]) -> Result<String> {
    let datum = &space.datum;
    if datum.rank() != 2 {
        return Err(Error::NotSupported(format!("diagrams need rank 2, this space has rank {}", datum.rank())));
    }
    if !window.is_positive() {
        return Err(Error::InvalidInput("window must be positive".into()));
    }
    if let Some(m) = marks.iter().find(|m| m.len() != 2) {
        return Err(Error::InvalidInput(format!("mark {m} is not a point of the plane")));
    }
    let frame = Frame { w: window.clone(), scale: HALF_SIZE / window.to_f64().unwrap_or(1.0) };
    let size = 2.0 * (HALF_SIZE + MARGIN);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.0} {size:.0}">"#
    );
    let _ = writeln!(svg, "<title>{} window {}</title>", escape(&space.name), window);
    let _ = writeln!(
        svg,
        r#"<rect x="{m:.3}" y="{m:.3}" width="{s:.3}" height="{s:.3}" fill="none" stroke="gray" stroke-width="0.5"/>"#,
        m = MARGIN,
        s = 2.0 * HALF_SIZE
    );

    let gram = datum.gram();
    let mut root_lines = String::new();
    let mut other_lines = String::new();
    for i in datum.positive_indices() {
        let normal = gram.mul_vec(&datum.root(i).covector);
        let top = floor_sqrt(&(window * window * datum.norm_squared(&datum.root(i).covector)));
        let mut k = -top.clone();
        while k <= top {
            let level = Rational::from_integer(k.clone());
            if let Some((p, q)) = clip(&normal[0], &normal[1], &level, window) {
                let (target, class, width) =
                    if k.is_zero() { (&mut root_lines, "root", 2) } else { (&mut other_lines, "wall", 1) };
                let _ = writeln!(
                    target,
                    r#"<line class="{class}" data-root="{i}" data-level="{k}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="{width}"/>"#,
                    frame.px(&p[0]),
                    frame.py(&p[1]),
                    frame.px(&q[0]),
                    frame.py(&q[1]),
                );
            }
            k += 1;
        }
    }
    svg.push_str(&other_lines);
    svg.push_str(&root_lines);

    let gamma0 = fundamental_lattice(datum);
    if gamma0.rank() > 0 {
        for pt in window_points(&gamma0, window)? {
            let _ = writeln!(
                svg,
                r#"<circle class="fundamental" cx="{:.3}" cy="{:.3}" r="4" fill="steelblue"/>"#,
                frame.px(&pt[0]),
                frame.py(&pt[1])
            );
        }
    }
    for pt in window_points(&space.gamma, window)? {
        let _ = writeln!(
            svg,
            r#"<circle class="lattice" cx="{:.3}" cy="{:.3}" r="2" fill="black"/>"#,
            frame.px(&pt[0]),
            frame.py(&pt[1])
        );
    }
    for m in marks {
        let (x, y) = (frame.px(&m[0]), frame.py(&m[1]));
        let d = 5.0;
        let _ = writeln!(
            svg,
            r#"<path class="mark" d="M {:.3} {:.3} L {:.3} {:.3} M {:.3} {:.3} L {:.3} {:.3}" stroke="crimson" stroke-width="1.5"/>"#,
            x - d,
            y - d,
            x + d,
            y + d,
            x - d,
            y + d,
            x + d,
            y - d
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
