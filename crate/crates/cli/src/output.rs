//! CSV and SVG writers. Numbers use C's `%.17g` layout so every `f64`
//! round-trips exactly and output is byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use crate::run::Row;

pub const CSV_HEADER: &str = "eta,value,term_coupling,term_psi,term_v,residual_constraint,verdict";

/// Formats like C's `printf("%.17g", x)`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_g17).unwrap_or_default()
}

pub fn csv_string(rows: &[Row]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        debug_assert!(!r.verdict.contains([',', '"', '\n']));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            opt(r.eta),
            fmt_g17(r.value),
            opt(r.term_coupling),
            opt(r.term_psi),
            opt(r.term_v),
            opt(r.residual_constraint),
            r.verdict
        );
    }
    out
}

/// `(η, |value|)` pairs read back from a CSV written by [`csv_string`],
/// keeping only points that can be drawn on log axes.
pub fn read_series(csv: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .skip(1)
        .filter_map(|line| {
            let mut cols = line.split(',');
            let eta: f64 = cols.next()?.parse().ok()?;
            let value: f64 = cols.next()?.parse().ok()?;
            (eta > 0.0 && value != 0.0 && value.is_finite()).then_some((eta, value.abs()))
        })
        .collect()
}

/// Log-log plot of `|value|` against `η` from a CSV file.
pub fn svg_from_csv(csv_path: &Path, title: &str) -> std::io::Result<Option<String>> {
    let csv = std::fs::read_to_string(csv_path)?;
    Ok(svg_plot(&read_series(&csv), title))
}

pub fn svg_plot(series: &[(f64, f64)], title: &str) -> Option<String> {
    if series.is_empty() {
        return None;
    }
    let (w, h, margin) = (640.0, 420.0, 60.0);
    let lx: Vec<f64> = series.iter().map(|p| p.0.log10()).collect();
    let ly: Vec<f64> = series.iter().map(|p| p.1.log10()).collect();
    let span = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min).floor();
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil();
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        }
    };
    let (x0, x1) = span(&lx);
    let (y0, y1) = span(&ly);
    let px = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let py = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let (bx0, bx1, by0, by1) = (px(x0), px(x1), py(y0), py(y1));
    let _ = writeln!(s, r#"<rect x="{bx0}" y="{by1}" width="{}" height="{}" fill="none" stroke="black"/>"#, bx1 - bx0, by0 - by1);
    let mut d = x0;
    while d <= x1 + 0.5 {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">1e{}</text>"#, px(d), by0 + 18.0, d as i64);
        d += 1.0;
    }
    let mut d = y0;
    while d <= y1 + 0.5 {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">1e{}</text>"#, bx0 - 6.0, py(d) + 4.0, d as i64);
        d += 1.0;
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">η</text>"#, w / 2.0, h - 14.0);
    let _ = writeln!(s, r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">|value|</text>"#, h / 2.0, h / 2.0);
    let points: Vec<String> = lx.iter().zip(&ly).map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y))).collect();
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#, points.join(" "));
    for (x, y) in lx.iter().zip(&ly) {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, px(*x), py(*y));
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases: [(f64, &str); 10] = [
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (1e-4, "0.0001"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (1e16, "10000000000000000"),
            (6.02214076e23, "6.0221407599999999e+23"),
            (1.0 / 3.0, "0.33333333333333331"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x:e}");
        }
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(f64::NAN), "nan");
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, 1e-300, 5e-324, f64::MAX, -7.123456789012345e-9] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_round_trips_series() {
        let rows: Vec<Row> = [1e-1, 1e-2]
            .iter()
            .map(|&eta| Row {
                eta: Some(eta),
                value: -eta.sqrt(),
                term_coupling: None,
                term_psi: Some(1.0),
                term_v: None,
                residual_constraint: Some(0.0),
                verdict: "x".into(),
            })
            .collect();
        let csv = csv_string(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().nth(1).unwrap(), "0.10000000000000001,-0.31622776601683794,,1,,0,x");
        let series = read_series(&csv);
        assert_eq!(series, vec![(1e-1, 1e-1f64.sqrt()), (1e-2, 0.1)]);
        let svg = svg_plot(&series, "a<b").unwrap();
        assert!(svg.contains("<polyline") && svg.contains("a&lt;b"));
        assert!(svg_plot(&[], "empty").is_none());
    }
}
