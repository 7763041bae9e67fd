//! Minimal self-contained SVG plots: polyline charts and rect heatmaps.

use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

// viridis, sampled at five stops
const CMAP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-300 {
            let pad = lo.abs().max(1.0) * 0.5;
            return Self {
                lo: lo - pad,
                hi: hi + pad,
            };
        }
        Self { lo, hi }
    }

    fn frac(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step + 1e-9).floor() as i64;
        (first..=last).map(|k| k as f64 * step).collect()
    }
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn frame(out: &mut String, title: &str, xl: &str, yl: &str, x: &Axis, y: &Axis) {
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>
<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>
"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    for t in x.ticks() {
        let px = LEFT + x.frac(t) * pw;
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 19.0,
            label(t)
        );
    }
    for t in y.ticks() {
        let py = TOP + (1.0 - y.frac(t)) * ph;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>
<text transform="translate(20 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 15.0,
        escape(xl),
        TOP + ph / 2.0,
        escape(yl)
    );
}

/// Line chart of several series; non-finite points break the line.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let x = Axis::fit(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let y = Axis::fit(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let mut out = String::new();
    frame(&mut out, title, x_label, y_label, &x, &y);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for run in s.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
            if run.is_empty() {
                continue;
            }
            let pts: Vec<String> = run
                .iter()
                .map(|&(a, b)| {
                    format!(
                        "{:.2},{:.2}",
                        LEFT + x.frac(a) * pw,
                        TOP + (1.0 - y.frac(b)) * ph
                    )
                })
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            W - RIGHT + 10.0,
            W - RIGHT + 30.0,
            W - RIGHT + 35.0,
            ly + 4.0,
            escape(s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn color(t: f64) -> String {
    if !t.is_finite() {
        return "#bbbbbb".into();
    }
    let u = t.clamp(0.0, 1.0) * (CMAP.len() - 1) as f64;
    let i = (u.floor() as usize).min(CMAP.len() - 2);
    let f = u - i as f64;
    let (a, b) = (CMAP[i], CMAP[i + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

/// Heatmap with `z[i][j]` at (`xs[j]`, `ys[i]`); NaN cells are grey.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    z_label: &str,
    xs: &[f64],
    ys: &[f64],
    z: &[Vec<f64>],
) -> String {
    let edges = |v: &[f64]| -> Vec<f64> {
        if v.len() == 1 {
            return vec![v[0] - 0.5, v[0] + 0.5];
        }
        let mut e = vec![v[0] - 0.5 * (v[1] - v[0])];
        e.extend(v.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        e.push(v[v.len() - 1] + 0.5 * (v[v.len() - 1] - v[v.len() - 2]));
        e
    };
    let (xe, ye) = (edges(xs), edges(ys));
    let x = Axis {
        lo: xe[0],
        hi: xe[xe.len() - 1],
    };
    let y = Axis {
        lo: ye[0],
        hi: ye[ye.len() - 1],
    };
    let zr = Axis::fit(z.iter().flatten().copied());
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let mut out = String::new();
    frame(&mut out, title, x_label, y_label, &x, &y);
    for (i, row) in z.iter().enumerate() {
        let (y0, y1) = (
            TOP + (1.0 - y.frac(ye[i + 1])) * ph,
            TOP + (1.0 - y.frac(ye[i])) * ph,
        );
        for (j, v) in row.iter().enumerate() {
            let (x0, x1) = (LEFT + x.frac(xe[j]) * pw, LEFT + x.frac(xe[j + 1]) * pw);
            let _ = writeln!(
                out,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x1 - x0 + 0.3,
                y1 - y0 + 0.3,
                color(zr.frac(*v))
            );
        }
    }
    // colour bar
    let bx = W - RIGHT + 20.0;
    let steps = 50;
    for k in 0..steps {
        let t = k as f64 / (steps - 1) as f64;
        let by = TOP + (1.0 - t) * (ph - ph / steps as f64);
        let _ = writeln!(
            out,
            r#"<rect x="{bx}" y="{by:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            ph / steps as f64 + 0.3,
            color(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text><text x="{}" y="{}">{}</text><text x="{bx}" y="{}">{}</text>"#,
        bx + 24.0,
        TOP + 10.0,
        label(zr.hi),
        bx + 24.0,
        TOP + ph,
        label(zr.lo),
        TOP - 8.0,
        escape(z_label)
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        let a = Axis { lo: 1.0, hi: 10.0 };
        assert_eq!(a.ticks(), vec![2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn colormap_endpoints() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(f64::NAN), "#bbbbbb");
    }

    #[test]
    fn plots_are_well_formed() {
        let s = line_plot(
            "a < b",
            "x",
            "y",
            &[Series {
                name: "s",
                points: vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)],
            }],
        );
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt; b"));
        let h = heatmap(
            "h",
            "x",
            "y",
            "z",
            &[0.0, 1.0],
            &[0.0],
            &[vec![0.0, f64::NAN]],
        );
        assert_eq!(h.matches("#bbbbbb").count(), 1);
    }
}
