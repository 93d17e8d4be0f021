//! CSV, JSON and SVG emission for a [`DiagnosticsReport`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diagnostics::DiagnosticsReport;
use crate::error::{Error, Result};

/// JSON schema of `<id>.report.json`.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

/// 17 significant digits; `inf`, `-inf` and `NaN` spelled so that
/// `str::parse::<f64>` reads them back.
pub fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// `n,value` CSV text of one series.
pub fn series_csv(values: &[(usize, f64)]) -> String {
    let mut s = String::from("n,value\n");
    for (n, v) in values {
        let _ = writeln!(s, "{n},{}", format_value(*v));
    }
    s
}

/// Parses text written by [`series_csv`].
pub fn parse_series_csv(text: &str) -> Result<Vec<(usize, f64)>> {
    let mut lines = text.lines();
    if lines.next() != Some("n,value") {
        return Err(Error::Io("missing `n,value` header".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::Io(format!("bad CSV row {}: {line:?}", i + 2));
            let (n, v) = line.split_once(',').ok_or_else(bad)?;
            Ok((n.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?))
        })
        .collect()
}

/// Report JSON. Non-finite values become `null`.
pub fn report_json(report: &DiagnosticsReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))
}

/// Line plot of one series; log-scale y when every value is positive.
pub fn series_svg(title: &str, values: &[(usize, f64)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 56.0;
    let pts: Vec<(f64, f64)> = values
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(n, v)| (*n as f64, *v))
        .collect();
    let log = !pts.is_empty() && pts.iter().all(|(_, v)| *v > 0.0);
    let ty = |v: f64| if log { v.log10() } else { v };
    let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (x, _)| (a.min(*x), b.max(*x)));
    let (mut y0, mut y1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, y)| (a.min(ty(*y)), b.max(ty(*y))));
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let xs = if x1 > x0 { x1 - x0 } else { 1.0 };
    let px = |x: f64| PAD + (x - x0) / xs * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (ty(y) - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let label = |v: f64| if log { format!("1e{v:.1}") } else { format!("{v:.3e}") };
    for (y, anchor) in [(y0, H - PAD), (y1, PAD)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{anchor}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            PAD - 4.0,
            label(y)
        );
    }
    if pts.len() > 1 {
        let _ = writeln!(
            s,
            r#"<text x="{PAD}" y="{}" font-family="sans-serif" font-size="11">n = {x0}</text>"#,
            H - PAD + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">n = {x1}</text>"#,
            W - PAD,
            H - PAD + 16.0
        );
    }
    if !pts.is_empty() {
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.2} {:.2}", if i == 0 { "M" } else { " L" }, px(*x), py(*y));
        }
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#);
        for (x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="steelblue"/>"#, px(*x), py(*y));
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes every series CSV, the report JSON and (optionally) the SVG plots.
/// Returns the paths written, in order.
pub fn emit_outputs(report: &DiagnosticsReport, dir: &Path, plots: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        written.push(p);
        Ok(())
    };
    for (kind, values) in &report.series {
        put(format!("{}.{kind}.csv", report.scenario), series_csv(values))?;
        if plots {
            put(
                format!("{}.{kind}.svg", report.scenario),
                series_svg(&format!("{} / {kind}", report.scenario), values),
            )?;
        }
    }
    put(format!("{}.report.json", report.scenario), report_json(report)?)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_formatting_round_trips() {
        for v in [0.0, -0.0, 1.0 / 3.0, 1e-300, 5e-324, f64::MAX, f64::INFINITY, -2.5e17] {
            let s = format_value(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
        assert!(format_value(f64::NAN).parse::<f64>().unwrap().is_nan());
        assert_eq!(format_value(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn csv_round_trip() {
        let v = vec![(0, 0.25), (1, f64::INFINITY), (2, 1e-20 / 3.0)];
        let text = series_csv(&v);
        assert!(text.starts_with("n,value\n0,2.5"));
        assert_eq!(parse_series_csv(&text).unwrap(), v);
        assert!(parse_series_csv("x,y\n").is_err());
    }

    #[test]
    fn svg_scale_choice() {
        let pos = series_svg("p", &[(0, 1.0), (1, 0.1), (2, 0.01)]);
        assert!(pos.contains("1e-2.0"));
        let mixed = series_svg("m", &[(0, 1.0), (1, -1.0)]);
        assert!(!mixed.contains("1e"));
        assert!(series_svg("e", &[]).ends_with("</svg>\n"));
    }

    #[test]
    fn schema_is_json() {
        let v: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        assert_eq!(v["type"], "object");
    }
}
