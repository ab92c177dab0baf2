use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Sends `bytes` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

pub fn json_bytes(doc: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values serialise");
    s.push('\n');
    s.into_bytes()
}

const COLOURS: [&str; 3] = ["#1f4e9c", "#c0392b", "#2e8b57"];

/// Line plot of one or more series sharing `xs`, as a standalone SVG.
pub fn svg_plot(xs: &[f64], series: &[(&str, &[f64])], x_label: &str) -> String {
    let (w, h, m) = (640.0, 400.0, 56.0);
    let finite = |v: &&f64| v.is_finite();
    let (x_lo, x_hi) =
        xs.iter().filter(finite).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (mut y_lo, mut y_hi) = series
        .iter()
        .flat_map(|(_, ys)| ys.iter().filter(finite))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    y_lo = y_lo.min(0.0);
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    let x_span = if x_hi > x_lo { x_hi - x_lo } else { 1.0 };
    let px = |x: f64| m + (x - x_lo) / x_span * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y_lo) / (y_hi - y_lo) * (h - 2.0 * m);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let text = |svg: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="12" text-anchor="{anchor}">{s}</text>"#
        );
    };
    text(&mut svg, m, h - m + 18.0, "middle", &format!("{x_lo:.4}"));
    text(&mut svg, w - m, h - m + 18.0, "middle", &format!("{x_hi:.4}"));
    text(&mut svg, w / 2.0, h - 12.0, "middle", x_label);
    text(&mut svg, m - 6.0, h - m, "end", &format!("{y_lo:.3e}"));
    text(&mut svg, m - 6.0, m + 4.0, "end", &format!("{y_hi:.3e}"));
    for (k, (name, ys)) in series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys.iter())
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        text(&mut svg, w - m - 4.0, m + 16.0 + 16.0 * k as f64, "end", name);
    }
    svg.push_str("</svg>\n");
    svg
}
