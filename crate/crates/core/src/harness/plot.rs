use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{estimate_slope, Algorithm, SlopeMode, TrialRow};
use crate::error::HarnessError;
use crate::solvers::SolverStatus;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 70.0;
const COLORS: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];

fn color(a: Algorithm) -> &'static str {
    match a {
        Algorithm::Gd => COLORS[0],
        Algorithm::RandomSearch => COLORS[1],
        Algorithm::ZerothOrder => COLORS[2],
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

/// Log-log scatter of `queries` against `1/ε` (both base 2) for the
/// stationary rows, one series per algorithm with its fitted line where a
/// log-log fit is available.
pub fn render_svg(rows: &[TrialRow]) -> Result<String, HarnessError> {
    let mut series: BTreeMap<Algorithm, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        if r.status == SolverStatus::Stationary && r.queries > 0 {
            series
                .entry(r.algorithm)
                .or_default()
                .push(((1.0 / r.epsilon).log2(), (r.queries as f64).log2()));
        }
    }
    if series.is_empty() {
        return Err(HarnessError::InsufficientData(
            "no stationary rows with positive query counts to plot".into(),
        ));
    }
    let all = series.values().flatten();
    let (xmin, xmax) = all.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let (ymin, ymax) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    let (x0, x1) = padded(xmin, xmax);
    let (y0, y1) = padded(ymin.min(0.0), ymax);
    let fr = Frame { x0, x1, y0, y1 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600">"#
    );
    let _ = writeln!(s, r#"<rect width="800" height="600" fill="white"/>"#);
    let (left, right) = (MARGIN_L, WIDTH - MARGIN_R);
    let (top, bottom) = (MARGIN_T, HEIGHT - MARGIN_B);
    let _ = writeln!(
        s,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for k in (x0.ceil() as i64)..=(x1.floor() as i64) {
        let x = fr.px(k as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">2^{k}</text>"##,
            bottom + 5.0,
            bottom + 20.0
        );
    }
    let ystep = ((y1 - y0) / 10.0).ceil().max(1.0) as i64;
    let mut k = y0.ceil() as i64;
    while (k as f64) <= y1 {
        let y = fr.py(k as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">2^{k}</text>"##,
            left - 5.0,
            left - 8.0,
            y + 4.0
        );
        k += ystep;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">1/epsilon</text>"#,
        0.5 * (left + right),
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.2})">queries</text>"#,
        0.5 * (top + bottom),
        0.5 * (top + bottom)
    );

    for (i, (alg, pts)) in series.iter().enumerate() {
        let c = color(*alg);
        let _ = writeln!(s, r#"<g class="series" data-algorithm="{}">"#, alg.as_str());
        for &(x, y) in pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}" fill-opacity="0.6"/>"#,
                fr.px(x),
                fr.py(y)
            );
        }
        let mut label = alg.as_str().to_string();
        if let Ok(est) = estimate_slope(rows, *alg) {
            if est.mode == SlopeMode::LogLog {
                let ya = est.slope * xmin + est.intercept;
                let yb = est.slope * xmax + est.intercept;
                let _ = writeln!(
                    s,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{c}" stroke-width="2"/>"#,
                    fr.px(xmin),
                    fr.py(ya),
                    fr.px(xmax),
                    fr.py(yb)
                );
                let _ = write!(label, " (slope {:.2})", est.slope);
            }
        }
        let _ = writeln!(s, "</g>");
        let ly = top + 20.0 + 24.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<g class="legend"><rect x="{:.2}" y="{:.2}" width="12" height="12" fill="{c}"/><text x="{:.2}" y="{:.2}" font-size="12">{label}</text></g>"#,
            right + 15.0,
            ly - 10.0,
            right + 32.0,
            ly
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Renders first, so nothing is written when there is nothing to plot.
pub fn emit_plot(rows: &[TrialRow], path: &Path) -> Result<(), HarnessError> {
    let svg = render_svg(rows)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<TrialRow> {
        let mut v = Vec::new();
        for k in 2..=6 {
            for (alg, q) in [(Algorithm::Gd, 4u64.pow(k)), (Algorithm::RandomSearch, 3 * 2u64.pow(k))] {
                v.push(TrialRow {
                    algorithm: alg,
                    epsilon: 0.5f64.powi(k as i32),
                    seed: 0,
                    j: Some(1),
                    queries: q,
                    output_x: Some(0.0),
                    grad_abs: Some(0.0),
                    status: SolverStatus::Stationary,
                });
            }
        }
        v
    }

    #[test]
    fn two_series_and_a_legend() {
        let svg = render_svg(&rows()).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
        assert_eq!(svg.matches(r#"class="series""#).count(), 2);
        assert_eq!(svg.matches(r#"class="legend""#).count(), 2);
        assert_eq!(svg.matches("<circle").count(), 10);
        assert!(svg.contains("gd (slope 2.00)"));
        assert!(svg.contains("random_search (slope 1.00)"));
    }

    #[test]
    fn rendering_is_deterministic() {
        assert_eq!(render_svg(&rows()).unwrap(), render_svg(&rows()).unwrap());
    }

    #[test]
    fn empty_input_writes_nothing() {
        let dir = std::env::temp_dir().join(format!("statlab-plot-{}", std::process::id()));
        let mut r = rows();
        for row in &mut r {
            row.status = SolverStatus::BudgetExhausted;
        }
        assert!(emit_plot(&r, &dir).is_err());
        assert!(!dir.exists());
    }
}
