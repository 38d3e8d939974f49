//! Static SVG of a cup-length diagram and function in the half-plane above
//! the diagonal. The horizontal axis is the left end of an interval and the
//! vertical axis its right end; infinite right ends sit on a dashed line
//! labelled `∞` above the finite range.

use std::fmt::Write as _;

use cuplength::{CupDiagram, CupFunction};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#08519c"];

struct Frame {
    lo: f64,
    hi: f64,
    top: f64,
}

impl Frame {
    fn new(diagram: &CupDiagram, function: &CupFunction) -> Self {
        let mut ends: Vec<f64> = function.endpoints();
        for (i, _) in diagram.iter() {
            ends.push(i.left());
            if !i.is_right_infinite() {
                ends.push(i.right());
            }
        }
        let lo = ends.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ends.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo.is_finite() { (lo.min(0.0), hi) } else { (0.0, 1.0) };
        let hi = if hi > lo { hi } else { lo + 1.0 };
        Frame {
            lo,
            hi,
            top: hi + 0.15 * (hi - lo),
        }
    }

    fn clamp(&self, y: f64) -> f64 {
        if y.is_finite() {
            y
        } else {
            self.top
        }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.lo) / (self.top - self.lo) * (SIZE - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        SIZE - MARGIN - (self.clamp(v) - self.lo) / (self.top - self.lo) * (SIZE - 2.0 * MARGIN)
    }
}

fn colour(value: u32) -> &'static str {
    PALETTE[(value as usize).saturating_sub(1).min(PALETTE.len() - 1)]
}

fn ticks(frame: &Frame) -> Vec<f64> {
    let span = frame.hi - frame.lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(raw);
    let first = (frame.lo / step).ceil() as i64;
    let last = (frame.hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Renders the function's generators as shaded triangles, darker for larger
/// values, and the diagram's points as labelled dots.
pub fn render_svg(diagram: &CupDiagram, function: &CupFunction, title: &str) -> String {
    let frame = Frame::new(diagram, function);
    let mut out = String::new();
    let w = |out: &mut String, s: std::fmt::Arguments| {
        out.write_fmt(s).unwrap();
        out.push('\n');
    };
    w(
        &mut out,
        format_args!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
        ),
    );
    w(&mut out, format_args!(r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#));
    w(
        &mut out,
        format_args!(r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, SIZE / 2.0, escape(title)),
    );

    let mut gens: Vec<_> = function.generators().to_vec();
    gens.sort_by_key(|&(_, v)| v);
    for (i, v) in gens {
        let (l, r) = (i.left(), frame.clamp(i.right()));
        w(
            &mut out,
            format_args!(
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{}" fill-opacity="0.8" stroke="none"><title>{} ↦ {}</title></polygon>"#,
                frame.x(l),
                frame.y(l),
                frame.x(l),
                frame.y(r),
                frame.x(r),
                frame.y(r),
                colour(v),
                escape(&i.to_string()),
                v
            ),
        );
    }

    let (x0, y0) = (frame.x(frame.lo), frame.y(frame.lo));
    let (x1, y1) = (frame.x(frame.top), frame.y(frame.top));
    w(&mut out, format_args!(r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#));
    w(&mut out, format_args!(r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#));
    w(&mut out, format_args!(r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="gray"/>"#));
    w(
        &mut out,
        format_args!(r#"<line x1="{x0:.2}" y1="{y1:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="gray" stroke-dasharray="4 3"/>"#),
    );
    w(
        &mut out,
        format_args!(r#"<text x="{:.2}" y="{:.2}" text-anchor="end">∞</text>"#, x0 - 6.0, y1 + 4.0),
    );
    for t in ticks(&frame) {
        let (x, y) = (frame.x(t), frame.y(t));
        w(
            &mut out,
            format_args!(r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 16.0, label(t)),
        );
        w(
            &mut out,
            format_args!(r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, y + 4.0, label(t)),
        );
    }
    w(
        &mut out,
        format_args!(r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">left end</text>"#, SIZE / 2.0, SIZE - 16.0),
    );
    w(
        &mut out,
        format_args!(
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">right end</text>"#,
            SIZE / 2.0,
            SIZE / 2.0
        ),
    );

    for (i, v) in diagram.iter() {
        let (x, y) = (frame.x(i.left()), frame.y(i.right()));
        w(
            &mut out,
            format_args!(
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="black"><title>{} ↦ {}</title></circle>"#,
                escape(&i.to_string()),
                v
            ),
        );
        w(&mut out, format_args!(r#"<text x="{:.2}" y="{:.2}">{v}</text>"#, x + 6.0, y - 6.0));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use cuplength::{reconstruct, Interval};

    fn klein() -> CupDiagram {
        CupDiagram::from_points([
            (Interval::closed_open(1.0, 3.0), 1),
            (Interval::closed_open(2.0, 3.0), 2),
            (Interval::closed_open(2.0, f64::INFINITY), 2),
        ])
    }

    #[test]
    fn draws_every_point_and_generator() {
        let d = klein();
        let svg = render_svg(&d, &reconstruct(&d), "klein");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 3);
        assert!(svg.contains(">∞</text>"));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn infinite_points_sit_on_the_infinity_line() {
        let d = klein();
        let frame = Frame::new(&d, &reconstruct(&d));
        assert_eq!(frame.y(f64::INFINITY), frame.y(frame.top));
        assert!(frame.y(3.0) > frame.y(f64::INFINITY));
    }

    #[test]
    fn empty_input_still_renders() {
        let svg = render_svg(&CupDiagram::new(), &CupFunction::zero(), "a < b");
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<circle").count(), 0);
    }

    #[test]
    fn output_is_deterministic() {
        let d = klein();
        assert_eq!(render_svg(&d, &reconstruct(&d), "k"), render_svg(&d, &reconstruct(&d), "k"));
    }
}
