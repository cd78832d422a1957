use std::fmt::Write;
use std::fs;
use std::path::Path;

use xitaylor::Error;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub markers: bool,
}

impl Series {
    /// Reads the (re, im) or (x, y) columns of a CSV file.
    pub fn from_csv(path: &Path, markers: bool) -> Result<Self, Error> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
        let col = |names: [&str; 2]| header.iter().position(|h| names.contains(h));
        let (Some(xi), Some(yi)) = (col(["re", "x"]), col(["im", "y"])) else {
            return Err(Error::Invalid(format!(
                "{} has no re/im or x/y columns",
                path.display()
            )));
        };
        let mut points = Vec::new();
        for (k, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            let parse = |i: usize| -> Result<f64, Error> {
                f.get(i)
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::Invalid(format!("{} line {}: bad number", path.display(), k + 2)))
            };
            points.push((parse(xi)?, parse(yi)?));
        }
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Self {
            label,
            points,
            markers,
        })
    }
}

pub fn render(series: &[Series], width: u32) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-12);
    let (x0, x1, y0, y1) = (x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    let w = width as f64;
    let h = (w * (y1 - y0) / (x1 - x0)).clamp(0.25 * w, 2.0 * w).round();
    let px = |x: f64| (x - x0) / (x1 - x0) * w;
    let py = |y: f64| (y1 - y) / (y1 - y0) * h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white" stroke="black"/>"#);
    if x0 < 0.0 && x1 > 0.0 {
        let _ = writeln!(s, r##"<line x1="{0:.3}" y1="0" x2="{0:.3}" y2="{h:.0}" stroke="#bbbbbb"/>"##, px(0.0));
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(s, r##"<line x1="0" y1="{0:.3}" x2="{w:.0}" y2="{0:.3}" stroke="#bbbbbb"/>"##, py(0.0));
    }
    for (i, ser) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let _ = writeln!(s, r#"<g id="{}">"#, xml_escape(&ser.label));
        if ser.markers {
            for &(x, y) in &ser.points {
                let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="2.5" fill="{c}"/>"#, px(x), py(y));
            }
        } else {
            let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(
            s,
            r#"<text x="8" y="{}" font-family="sans-serif" font-size="12" fill="{c}">{}</text>"#,
            16 + 14 * i,
            xml_escape(&ser.label)
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
