//! Deterministic SVG box plots of per-corpus metric distributions.

use std::fmt::Write;

use crate::corpus::FiveNumber;

pub const PLOT_TOP: f64 = 40.0;
pub const PLOT_BOTTOM: f64 = 360.0;
pub const PLOT_LEFT: f64 = 70.0;
pub const SLOT_WIDTH: f64 = 100.0;
pub const BOX_WIDTH: f64 = 50.0;
pub const HEIGHT: f64 = 420.0;
const TICKS: usize = 5;

/// Linear map from data values onto the vertical pixel range, `lo` at the
/// bottom and `hi` at the top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YAxis {
    pub lo: f64,
    pub hi: f64,
}

impl YAxis {
    /// Span of every summary; a constant span is widened by 0.5 either way.
    pub fn fit(series: &[(String, FiveNumber)]) -> Self {
        let lo = series.iter().map(|(_, f)| f.min).fold(f64::INFINITY, f64::min);
        let hi = series.iter().map(|(_, f)| f.max).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() {
            return YAxis { lo: 0.0, hi: 1.0 };
        }
        if lo == hi {
            YAxis { lo: lo - 0.5, hi: hi + 0.5 }
        } else {
            YAxis { lo, hi }
        }
    }

    pub fn y(&self, value: f64) -> f64 {
        PLOT_BOTTOM - (value - self.lo) / (self.hi - self.lo) * (PLOT_BOTTOM - PLOT_TOP)
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// One labeled box per series, left to right in the given order.
pub fn render_box_plot(title: &str, y_label: &str, series: &[(String, FiveNumber)]) -> String {
    let axis = YAxis::fit(series);
    let width = PLOT_LEFT + SLOT_WIDTH * series.len().max(1) as f64 + 20.0;
    let right = width - 20.0;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{HEIGHT:.0}" viewBox="0 0 {width:.0} {HEIGHT:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{width:.0}" height="{HEIGHT:.0}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );

    let _ = writeln!(svg, r#"<g class="axis">"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{PLOT_LEFT:.2}" y1="{PLOT_TOP:.2}" x2="{PLOT_LEFT:.2}" y2="{PLOT_BOTTOM:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{PLOT_LEFT:.2}" y1="{PLOT_BOTTOM:.2}" x2="{right:.2}" y2="{PLOT_BOTTOM:.2}" stroke="black"/>"#
    );
    for k in 0..TICKS {
        let value = axis.lo + (axis.hi - axis.lo) * k as f64 / (TICKS - 1) as f64;
        let y = axis.y(value);
        let _ = writeln!(
            svg,
            r#"<line class="tick" x1="{:.2}" y1="{y:.2}" x2="{PLOT_LEFT:.2}" y2="{y:.2}" stroke="black"/>"#,
            PLOT_LEFT - 5.0
        );
        let _ =
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{value:.3}</text>"#, PLOT_LEFT - 8.0, y + 4.0);
    }
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">{}</text>"#,
        (PLOT_TOP + PLOT_BOTTOM) / 2.0,
        (PLOT_TOP + PLOT_BOTTOM) / 2.0,
        escape(y_label)
    );
    let _ = writeln!(svg, "</g>");

    for (i, (label, f)) in series.iter().enumerate() {
        let cx = PLOT_LEFT + SLOT_WIDTH * (i as f64 + 0.5);
        let (x0, x1) = (cx - BOX_WIDTH / 2.0, cx + BOX_WIDTH / 2.0);
        let (y_min, y_q1, y_med, y_q3, y_max) =
            (axis.y(f.min), axis.y(f.q1), axis.y(f.median), axis.y(f.q3), axis.y(f.max));
        let label = escape(label);
        let _ = writeln!(svg, r#"<g class="box" data-label="{label}">"#);
        let _ = writeln!(
            svg,
            r#"<line class="whisker" x1="{cx:.2}" y1="{y_max:.2}" x2="{cx:.2}" y2="{y_min:.2}" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<rect x="{x0:.2}" y="{y_q3:.2}" width="{BOX_WIDTH:.2}" height="{:.2}" fill="lightsteelblue" stroke="black"/>"#,
            y_q1 - y_q3
        );
        for (class, y) in [("min", y_min), ("median", y_med), ("max", y_max)] {
            let _ = writeln!(
                svg,
                r#"<line class="{class}" x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="black"/>"#
            );
        }
        let _ = writeln!(svg, r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, PLOT_BOTTOM + 20.0);
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    svg
}
