//! Minimal SVG log-log plot for rate reports.

use crate::harness::RateReport;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Axes {
    fn px(&self, lx: f64) -> f64 {
        PAD + (lx - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }
    fn py(&self, ly: f64) -> f64 {
        H - PAD - (ly - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn line(out: &mut String, ax: &Axes, a: (f64, f64), b: (f64, f64), color: &str, dash: bool) {
    let dash = if dash { r#" stroke-dasharray="6,4""# } else { "" };
    out.push_str(&format!(
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
        ax.px(a.0),
        ax.py(a.1),
        ax.px(b.0),
        ax.py(b.1)
    ));
    out.push('\n');
}

pub(crate) fn rate_plot(report: &RateReport) -> String {
    let pts: Vec<(f64, f64)> = report
        .per_m
        .iter()
        .filter(|c| c.median_error > 0.0)
        .map(|c| ((c.m as f64).log10(), c.median_error.log10()))
        .collect();
    let mut out = format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    out.push('\n');
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    if pts.len() < 2 {
        out.push_str(
            r#"<text x="20" y="40" font-family="sans-serif" font-size="14">no positive errors to plot</text>"#,
        );
        out.push_str("\n</svg>\n");
        return out;
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let ypad = ((y1 - y0) * 0.15).max(0.05);
    let ax = Axes { x0: x0 - 0.05, x1: x1 + 0.05, y0: y0 - ypad, y1: y1 + ypad };

    line(&mut out, &ax, (ax.x0, ax.y0), (ax.x1, ax.y0), "black", false);
    line(&mut out, &ax, (ax.x0, ax.y0), (ax.x0, ax.y1), "black", false);
    for k in (ax.x0.ceil() as i32)..=(ax.x1.floor() as i32) {
        out.push_str(&format!(
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{k}</text>"#,
            ax.px(k as f64),
            H - PAD + 18.0
        ));
        out.push('\n');
    }
    for k in (ax.y0.ceil() as i32)..=(ax.y1.floor() as i32) {
        out.push_str(&format!(
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">1e{k}</text>"#,
            PAD - 6.0,
            ax.py(k as f64) + 4.0
        ));
        out.push('\n');
    }
    out.push_str(&format!(
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">m</text>"#,
        W / 2.0,
        H - 15.0
    ));
    out.push('\n');

    let poly: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", ax.px(x), ax.py(y))).collect();
    out.push_str(&format!(
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
        poly.join(" ")
    ));
    out.push('\n');
    for &(x, y) in &pts {
        out.push_str(&format!(r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, ax.px(x), ax.py(y)));
        out.push('\n');
    }

    // slope lines through the centroid of the data in log10 space
    let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let through = |slope: f64| ((x0, cy + slope * (x0 - cx)), (x1, cy + slope * (x1 - cx)));
    let mut legend = vec![("steelblue", "median error".to_string())];
    if let Some(s) = report.fitted_exponent {
        let (a, b) = through(s);
        line(&mut out, &ax, a, b, "darkorange", false);
        legend.push(("darkorange", format!("fitted slope {s:.4}")));
    }
    if let Some(s) = report.theoretical_exponent {
        let (a, b) = through(s);
        line(&mut out, &ax, a, b, "seagreen", true);
        legend.push(("seagreen", format!("theoretical slope {s:.4}")));
    }
    for (i, (color, label)) in legend.iter().enumerate() {
        let y = 20.0 + 16.0 * i as f64;
        out.push_str(&format!(
            r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="12" fill="{color}">{label}</text>"#,
            W - 220.0
        ));
        out.push('\n');
    }
    out.push_str("</svg>\n");
    out
}
