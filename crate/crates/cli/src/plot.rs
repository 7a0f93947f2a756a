//! SVG line charts of the CSV tables written by the other commands.
//!
//! The layout is chosen from the header row. Output depends only on the
//! table contents: fixed viewport, fixed number formatting, no timestamps.

use std::fmt::Write as _;

use kpp_halfline::io::Table;

use crate::CliError;

const WIDTH: f64 = 720.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 32.0;
const MARGIN_B: f64 = 44.0;
const TICKS: usize = 5;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Series sharing one pair of axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub x: String,
    pub ys: Vec<String>,
    pub log_y: bool,
}

/// Panels for a known table header.
pub fn layout(columns: &[String]) -> Result<Vec<Panel>, CliError> {
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let p = |x: &str, ys: &[&str], log_y: bool| Panel {
        x: x.into(),
        ys: ys.iter().map(|s| s.to_string()).collect(),
        log_y,
    };
    Ok(match cols.as_slice() {
        ["z", "phi"] => vec![p("z", &["phi"], false)],
        ["x", "V"] => vec![p("x", &["V"], false)],
        ["x", "u"] => vec![p("x", &["u"], false)],
        ["t", "d_wave", "rho", "d_V"] => vec![p("t", &["d_wave", "rho"], true)],
        ["s", "xi", "xi_prime", "identity_residual"] => {
            vec![p("s", &["xi"], false), p("s", &["xi_prime"], false)]
        }
        ["t", "beta", "kappa"] => vec![p("t", &["beta"], false), p("t", &["kappa"], false)],
        ["n", "t_n", "eta_at_tn", "beta00"] => {
            vec![p("n", &["t_n"], false), p("n", &["eta_at_tn"], false)]
        }
        _ => return Err(CliError::Schema(format!("no chart layout for columns {cols:?}"))),
    })
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.to_string() }
    } else {
        format!("{v:.2e}")
    }
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return None;
    }
    if hi - lo > 1e-12 * lo.abs().max(hi.abs()).max(1e-300) {
        Some((lo, hi))
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        Some((lo - pad, hi + pad))
    }
}

fn draw_panel(out: &mut String, table: &Table, panel: &Panel, top: f64) -> Result<(), CliError> {
    let col = |name: &str| {
        table.column(name).ok_or_else(|| CliError::Schema(format!("missing column {name}")))
    };
    let xs = col(&panel.x)?;
    let tf = |v: f64| if panel.log_y { if v > 0.0 { v.log10() } else { f64::NAN } } else { v };
    let series: Vec<Vec<f64>> = panel
        .ys
        .iter()
        .map(|y| col(y).map(|v| v.into_iter().map(tf).collect()))
        .collect::<Result<_, _>>()?;

    let finite = |i: usize, s: &Vec<f64>| xs[i].is_finite() && s[i].is_finite();
    let xr = range(series.iter().flat_map(|s| (0..xs.len()).filter(move |&i| finite(i, s)).map(|i| xs[i])));
    let yr = range(series.iter().flat_map(|s| (0..xs.len()).filter(move |&i| finite(i, s)).map(move |i| s[i])));
    let (Some((x0, x1)), Some((y0, y1))) = (xr, yr) else {
        return Err(CliError::Schema(format!("no finite points for {:?}", panel.ys)));
    };
    let (pl, pr) = (MARGIN_L, WIDTH - MARGIN_R);
    let (pt, pb) = (top + MARGIN_T, top + PANEL_H - MARGIN_B);
    let sx = |x: f64| pl + (x - x0) / (x1 - x0) * (pr - pl);
    let sy = |y: f64| pb - (y - y0) / (y1 - y0) * (pb - pt);

    let _ = writeln!(
        out,
        r##"<rect x="{pl:.2}" y="{pt:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##,
        pr - pl,
        pb - pt
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let ylab = if panel.log_y { format!("1e{}", label(yv)) } else { label(yv) };
        let _ = writeln!(
            out,
            r##"<line x1="{px:.2}" y1="{pb:.2}" x2="{px:.2}" y2="{:.2}" stroke="#333"/><text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"##,
            pb + 5.0,
            pb + 18.0,
            label(xv)
        );
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{pl:.2}" y2="{py:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{ylab}</text>"##,
            pl - 5.0,
            pl - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        0.5 * (pl + pr),
        pb + 36.0,
        panel.x
    );
    for (j, (name, s)) in panel.ys.iter().zip(&series).enumerate() {
        let color = COLORS[j % COLORS.len()];
        let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for i in 0..xs.len() {
            if finite(i, s) {
                runs.last_mut().unwrap().push((sx(xs[i]), sy(s[i])));
            } else if !runs.last().unwrap().is_empty() {
                runs.push(Vec::new());
            }
        }
        for run in runs.iter().filter(|r| !r.is_empty()) {
            let pts: Vec<String> = run.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let legend = if panel.log_y { format!("log10 {name}") } else { name.clone() };
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="{color}" text-anchor="end">{legend}</text>"#,
            pr - 6.0,
            pt + 16.0 + 15.0 * j as f64
        );
    }
    Ok(())
}

/// Renders `table` with the layout its header selects.
pub fn render(table: &Table) -> Result<String, CliError> {
    let panels = layout(&table.columns)?;
    let height = PANEL_H * panels.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, p) in panels.iter().enumerate() {
        draw_panel(&mut out, table, p, k as f64 * PANEL_H)?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(label(0.5), "0.5");
        assert_eq!(label(0.0), "0");
        assert_eq!(label(-2.0), "-2");
        assert_eq!(label(1.5e-6), "1.50e-6");
    }

    #[test]
    fn type1_is_log_overlay_and_skips_nonpositive() {
        let mut t = Table::new(&["t", "d_wave", "rho", "d_V"]);
        t.push(vec![-1.0, 0.0, 0.1, 0.5]);
        t.push(vec![0.0, 0.05, 1.0, 0.4]);
        t.push(vec![1.0, 0.2, 10.0, 0.3]);
        let svg = render(&t).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("log10 rho"));
        assert_eq!(render(&t).unwrap(), svg);
    }

    #[test]
    fn unknown_header_is_rejected() {
        let t = Table::new(&["a", "b"]);
        assert!(matches!(render(&t), Err(CliError::Schema(_))));
    }
}
