//! Minimal built-in SVG line plotter: polyline axes, linear or log-10 x
//! axis, no external plotting dependency, no timestamps — output depends
//! only on the data.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    series: Vec<(String, Vec<(f64, f64)>)>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str, log_x: bool) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            log_x,
            series: Vec::new(),
        }
    }

    pub fn series(&mut self, name: &str, points: Vec<(f64, f64)>) {
        self.series.push((name.to_string(), points));
    }

    fn x_value(&self, x: f64) -> f64 {
        if self.log_x {
            x.log10()
        } else {
            x
        }
    }

    pub fn render(&self) -> String {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for (_, pts) in &self.series {
            for &(x, y) in pts {
                if self.log_x && x <= 0.0 {
                    continue;
                }
                xs.push(self.x_value(x));
                ys.push(y);
            }
        }
        let (x0, x1) = span(&xs);
        let (y0, y1) = pad(span(&ys));

        let px = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = |y: f64| HEIGHT - MARGIN_B - (y - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B);

        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"22\" font-family=\"monospace\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            escape(&self.title)
        );

        // Frame.
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\"/>",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        );

        // X ticks: decades when log, 6 linear ticks otherwise.
        let x_ticks: Vec<(f64, String)> = if self.log_x {
            let lo = x0.ceil() as i64;
            let hi = x1.floor() as i64;
            (lo..=hi).map(|d| (d as f64, format!("1e{d}"))).collect()
        } else {
            (0..=5)
                .map(|k| {
                    let x = x0 + (x1 - x0) * k as f64 / 5.0;
                    (x, format!("{x:.3e}"))
                })
                .collect()
        };
        for (x, label) in &x_ticks {
            let sx = px(*x);
            let _ = writeln!(
                out,
                "<line x1=\"{sx:.2}\" y1=\"{:.2}\" x2=\"{sx:.2}\" y2=\"{:.2}\" stroke=\"#cccccc\"/>",
                MARGIN_T,
                HEIGHT - MARGIN_B
            );
            let _ = writeln!(
                out,
                "<text x=\"{sx:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">{label}</text>",
                HEIGHT - MARGIN_B + 18.0
            );
        }
        // Y ticks.
        for k in 0..=5 {
            let y = y0 + (y1 - y0) * k as f64 / 5.0;
            let sy = py(y);
            let _ = writeln!(
                out,
                "<line x1=\"{MARGIN_L}\" y1=\"{sy:.2}\" x2=\"{:.2}\" y2=\"{sy:.2}\" stroke=\"#cccccc\"/>",
                WIDTH - MARGIN_R
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{y:.3}</text>",
                MARGIN_L - 6.0,
                sy + 4.0
            );
        }
        // Axis labels.
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"16\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>",
            MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0,
            MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0,
            escape(&self.y_label)
        );

        // Series.
        for (idx, (name, pts)) in self.series.iter().enumerate() {
            let color = COLORS[idx % COLORS.len()];
            let mut path = String::new();
            for &(x, y) in pts {
                if self.log_x && x <= 0.0 {
                    continue;
                }
                let _ = write!(path, "{:.2},{:.2} ", px(self.x_value(x)), py(y));
            }
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                path.trim_end()
            );
            let ly = MARGIN_T + 16.0 + 16.0 * idx as f64;
            let _ = writeln!(
                out,
                "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
                MARGIN_L + 8.0,
                MARGIN_L + 30.0
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\">{}</text>",
                MARGIN_L + 36.0,
                ly + 4.0,
                escape(name)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn span(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn pad((lo, hi): (f64, f64)) -> (f64, f64) {
    let margin = (hi - lo) * 0.05;
    (lo - margin, hi + margin)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
