//! Standalone SVG line plots. Output depends only on the input numbers and is
//! byte-identical across runs: coordinates are printed with two decimals and
//! no timestamps or random ids are emitted.

use std::fmt::Write as _;

use thiserror::Error;

use super::table::ResultTable;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlotError {
    #[error("column `{0}` not found")]
    ColumnMissing(String),
    #[error("nothing to plot: {0}")]
    EmptyInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AxisScale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub ys: Vec<String>,
    pub x_scale: AxisScale,
    pub y_scale: AxisScale,
    pub x_label: String,
    pub y_label: String,
    /// Multiplies y values before plotting (e.g. `1e18` for W to aW).
    pub y_factor: f64,
    pub width: f64,
    pub height: f64,
}

impl PlotSpec {
    pub fn new(title: &str, x: &str, ys: &[&str]) -> Self {
        Self {
            title: title.to_string(),
            x: x.to_string(),
            ys: ys.iter().map(|s| s.to_string()).collect(),
            x_scale: AxisScale::Linear,
            y_scale: AxisScale::Linear,
            x_label: x.to_string(),
            y_label: String::new(),
            y_factor: 1.0,
            width: 720.0,
            height: 480.0,
        }
    }

    pub fn log_x(mut self) -> Self {
        self.x_scale = AxisScale::Log;
        self
    }

    pub fn labels(mut self, x: &str, y: &str) -> Self {
        self.x_label = x.to_string();
        self.y_label = y.to_string();
        self
    }

    pub fn scale_y(mut self, factor: f64) -> Self {
        self.y_factor = factor;
        self
    }
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;

struct Axis {
    lo: f64,
    hi: f64,
    scale: AxisScale,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, scale: AxisScale) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (scale == AxisScale::Linear || *v > 0.0)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        match scale {
            AxisScale::Log => {
                let (a, b) = (lo.log10().floor(), hi.log10().ceil());
                Some(Axis { lo: a, hi: if b > a { b } else { a + 1.0 }, scale })
            }
            AxisScale::Linear => {
                if hi == lo {
                    let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
                    lo -= pad;
                    hi += pad;
                }
                let step = nice_step((hi - lo) / 5.0);
                Some(Axis { lo: (lo / step).floor() * step, hi: (hi / step).ceil() * step, scale })
            }
        }
    }

    fn map(&self, v: f64) -> Option<f64> {
        let u = match self.scale {
            AxisScale::Linear => v,
            AxisScale::Log if v > 0.0 => v.log10(),
            AxisScale::Log => return None,
        };
        v.is_finite().then(|| (u - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        match self.scale {
            AxisScale::Log => {
                let stride = ((self.hi - self.lo) / 8.0).ceil().max(1.0);
                let mut out = Vec::new();
                let mut e = self.lo;
                while e <= self.hi + 1e-9 {
                    out.push(((e - self.lo) / (self.hi - self.lo), format!("1e{}", e as i64)));
                    e += stride;
                }
                out
            }
            AxisScale::Linear => {
                let step = nice_step((self.hi - self.lo) / 5.0);
                let n = ((self.hi - self.lo) / step).round() as i64;
                (0..=n)
                    .map(|k| {
                        let v = self.lo + k as f64 * step;
                        ((v - self.lo) / (self.hi - self.lo), tick_label(v, step))
                    })
                    .collect()
            }
        }
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r <= 1.0 {
        1.0
    } else if r <= 2.0 {
        2.0
    } else if r <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn tick_label(v: f64, step: f64) -> String {
    let v = if v.abs() < step * 1e-9 { 0.0 } else { v };
    if step >= 1e-3 && v.abs() < 1e5 {
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the `ys` columns of `table` against `x`. Non-finite points (and
/// non-positive ones on log axes) break the line instead of being drawn.
pub fn render_line_plot(table: &ResultTable, spec: &PlotSpec) -> Result<String, PlotError> {
    let xs = table.column(&spec.x).map_err(|_| PlotError::ColumnMissing(spec.x.clone()))?;
    if spec.ys.is_empty() {
        return Err(PlotError::EmptyInput("no y columns requested".into()));
    }
    let mut series = Vec::new();
    for name in &spec.ys {
        let ys = table.column(name).map_err(|_| PlotError::ColumnMissing(name.clone()))?;
        series.push((name.as_str(), ys.into_iter().map(|v| v * spec.y_factor).collect::<Vec<f64>>()));
    }
    let xa = Axis::fit(xs.iter().copied(), spec.x_scale).ok_or_else(|| PlotError::EmptyInput("no finite x values".into()))?;
    // A sweep whose points all failed still gets a frame, with a placeholder y range.
    let ya = Axis::fit(series.iter().flat_map(|(_, v)| v.iter().copied()), spec.y_scale)
        .or_else(|| Axis::fit([1.0, 10.0].into_iter(), spec.y_scale))
        .ok_or_else(|| PlotError::EmptyInput("no finite y values".into()))?;

    let (w, h) = (spec.width, spec.height);
    let pw = w - MARGIN_L - MARGIN_R;
    let ph = h - MARGIN_T - MARGIN_B;
    let px = |u: f64| MARGIN_L + u * pw;
    let py = |u: f64| MARGIN_T + (1.0 - u) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        MARGIN_L + pw / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L:.2}" y="{MARGIN_T:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    for (u, label) in xa.ticks() {
        let x = px(u);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            MARGIN_T,
            MARGIN_T + ph
        );
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, MARGIN_T + ph + 18.0, escape(&label));
    }
    for (u, label) in ya.ticks() {
        let y = py(u);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            MARGIN_L,
            MARGIN_L + pw
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_L - 6.0, y + 4.0, escape(&label));
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        h - 16.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0,
        escape(&spec.y_label)
    );

    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for (&x, &y) in xs.iter().zip(ys) {
            match (xa.map(x), ya.map(y)) {
                (Some(u), Some(v)) => segments.last_mut().unwrap().push((px(u), py(v))),
                _ => {
                    if !segments.last().unwrap().is_empty() {
                        segments.push(Vec::new());
                    }
                }
            }
        }
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = MARGIN_T + 14.0 + 18.0 * k as f64;
        let lx = MARGIN_L + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
