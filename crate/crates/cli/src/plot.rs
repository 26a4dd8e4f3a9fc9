//! Self-contained SVG rendering: line charts and heatmaps. No external
//! renderer; output depends only on the data, so plots are reproducible
//! byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliResult;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

/// Viridis-like stops for heatmaps.
const COLORMAP: [(f64, f64, f64); 9] = [
    (0.267, 0.005, 0.329),
    (0.275, 0.194, 0.496),
    (0.213, 0.359, 0.552),
    (0.153, 0.497, 0.557),
    (0.122, 0.632, 0.531),
    (0.288, 0.758, 0.428),
    (0.626, 0.854, 0.223),
    (0.905, 0.882, 0.117),
    (0.993, 0.906, 0.144),
];

fn colormap(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (COLORMAP.len() - 1) as f64;
    let i = (t.floor() as usize).min(COLORMAP.len() - 2);
    let f = t - i as f64;
    let (r0, g0, b0) = COLORMAP[i];
    let (r1, g1, b1) = COLORMAP[i + 1];
    let ch = |a: f64, b: f64| ((a + (b - a) * f) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(r0, r1), ch(g0, g1), ch(b0, b1))
}

/// Tick positions covering [lo, hi] at a 1/2/5 step.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 7.0)
        .unwrap_or(mag * 10.0);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(t);
        t += step;
    }
    out
}

fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut d = lo.log10().floor() as i32;
    while 10f64.powi(d) <= hi * 1.0001 {
        let v = 10f64.powi(d);
        if v >= lo * 0.9999 {
            out.push(v);
        }
        d += 1;
    }
    out
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.0e}")
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

impl LineChart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        LineChart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            log_y: false,
            series: Vec::new(),
        }
    }

    pub fn log_x(mut self) -> Self {
        self.log_x = true;
        self
    }

    pub fn add(&mut self, label: String, points: Vec<(f64, f64)>) {
        self.series.push(Series { label, points });
    }

    pub fn render(&self) -> String {
        let (w, h) = (880.0, 560.0);
        let (ml, mr, mt, mb) = (80.0, 210.0, 50.0, 60.0);
        let (pw, ph) = (w - ml - mr, h - mt - mb);

        let finite = |v: f64| v.is_finite() && (!self.log_y || v > 0.0);
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for s in &self.series {
            for &(x, y) in &s.points {
                if (!self.log_x || x > 0.0) && x.is_finite() {
                    x_min = x_min.min(x);
                    x_max = x_max.max(x);
                }
                if finite(y) {
                    y_min = y_min.min(y);
                    y_max = y_max.max(y);
                }
            }
        }
        if !x_min.is_finite() || !y_min.is_finite() {
            x_min = 0.0;
            x_max = 1.0;
            y_min = 0.0;
            y_max = 1.0;
        }
        if x_max == x_min {
            x_max = x_min + 1.0;
        }
        if y_max == y_min {
            y_max = y_min + 1.0;
        }
        if !self.log_y {
            let pad = 0.05 * (y_max - y_min);
            y_min -= pad;
            y_max += pad;
        }

        let fx = |x: f64| -> f64 {
            let t = if self.log_x {
                (x.ln() - x_min.ln()) / (x_max.ln() - x_min.ln())
            } else {
                (x - x_min) / (x_max - x_min)
            };
            ml + t * pw
        };
        let fy = |y: f64| -> f64 {
            let t = if self.log_y {
                (y.ln() - y_min.ln()) / (y_max.ln() - y_min.ln())
            } else {
                (y - y_min) / (y_max - y_min)
            };
            mt + (1.0 - t) * ph
        };

        let mut svg = String::new();
        let _ = write!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n\
             <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
             <text x=\"{:.1}\" y=\"28\" text-anchor=\"middle\" font-size=\"17\">{}</text>\n",
            ml + pw / 2.0,
            xml_escape(&self.title)
        );
        // axes box
        let _ = write!(
            svg,
            "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"#444\"/>\n"
        );
        // ticks
        let xt = if self.log_x {
            log_ticks(x_min, x_max)
        } else {
            ticks(x_min, x_max)
        };
        for t in &xt {
            let x = fx(*t);
            let _ = write!(
                svg,
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#ccc\"/>\n\
                 <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
                mt,
                mt + ph,
                mt + ph + 18.0,
                tick_label(*t)
            );
        }
        let yt = if self.log_y {
            log_ticks(y_min, y_max)
        } else {
            ticks(y_min, y_max)
        };
        for t in &yt {
            let y = fy(*t);
            let _ = write!(
                svg,
                "<line x1=\"{ml}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ccc\"/>\n\
                 <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"12\">{}</text>\n",
                ml + pw,
                ml - 8.0,
                y + 4.0,
                tick_label(*t)
            );
        }
        // axis labels
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n\
             <text x=\"20\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\" \
             transform=\"rotate(-90 20 {:.1})\">{}</text>\n",
            ml + pw / 2.0,
            h - 16.0,
            xml_escape(&self.x_label),
            mt + ph / 2.0,
            mt + ph / 2.0,
            xml_escape(&self.y_label)
        );
        // series
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let mut path = String::new();
            let mut pen_down = false;
            for &(x, y) in &s.points {
                let ok = x.is_finite()
                    && finite(y)
                    && (!self.log_x || x > 0.0)
                    && y >= y_min
                    && y <= y_max;
                if ok {
                    let cmd = if pen_down { 'L' } else { 'M' };
                    let _ = write!(path, "{cmd}{:.2} {:.2} ", fx(x), fy(y));
                    pen_down = true;
                } else {
                    pen_down = false;
                }
            }
            let _ = write!(
                svg,
                "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
                path.trim_end()
            );
            let ly = mt + 18.0 + i as f64 * 18.0;
            let _ = write!(
                svg,
                "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
                 <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{}</text>\n",
                ml + pw + 12.0,
                ml + pw + 36.0,
                ml + pw + 42.0,
                ly + 4.0,
                xml_escape(&s.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

#[derive(Debug, Clone)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// row-major, row 0 at y_range.0
    pub values: Vec<f64>,
}

impl Heatmap {
    pub fn render(&self) -> String {
        let cell = (620.0 / self.nx.max(self.ny) as f64).min(24.0);
        let (pw, ph) = (cell * self.nx as f64, cell * self.ny as f64);
        let (ml, mt) = (80.0, 50.0);
        let (w, h) = (ml + pw + 120.0, mt + ph + 70.0);
        let lo = self
            .values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };

        let mut svg = String::new();
        let _ = write!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
             viewBox=\"0 0 {w:.0} {h:.0}\" font-family=\"sans-serif\">\n\
             <rect width=\"{w:.0}\" height=\"{h:.0}\" fill=\"white\"/>\n\
             <text x=\"{:.1}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
            ml + pw / 2.0,
            xml_escape(&self.title)
        );
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let v = self.values[iy * self.nx + ix];
                let t = if v.is_finite() { (v - lo) / span } else { 0.0 };
                let x = ml + ix as f64 * cell;
                let y = mt + (self.ny - 1 - iy) as f64 * cell;
                let _ = write!(
                    svg,
                    "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>\n",
                    cell + 0.5,
                    cell + 0.5,
                    colormap(t)
                );
            }
        }
        // frame + extent labels
        let _ = write!(
            svg,
            "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw:.1}\" height=\"{ph:.1}\" fill=\"none\" stroke=\"#444\"/>\n\
             <text x=\"{ml}\" y=\"{:.1}\" font-size=\"12\">{}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"12\">{}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n\
             <text x=\"24\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 24 {:.1})\">{}</text>\n",
            mt + ph + 18.0,
            tick_label(self.x_range.0),
            ml + pw,
            mt + ph + 18.0,
            tick_label(self.x_range.1),
            ml + pw / 2.0,
            mt + ph + 44.0,
            xml_escape(&self.x_label),
            mt + ph / 2.0,
            mt + ph / 2.0,
            xml_escape(&self.y_label)
        );
        // colorbar
        let cbx = ml + pw + 24.0;
        let steps = 64;
        for i in 0..steps {
            let t = i as f64 / (steps - 1) as f64;
            let y = mt + ph * (1.0 - t);
            let _ = write!(
                svg,
                "<rect x=\"{cbx:.1}\" y=\"{:.2}\" width=\"18\" height=\"{:.2}\" fill=\"{}\"/>\n",
                y - ph / steps as f64,
                ph / steps as f64 + 0.5,
                colormap(t)
            );
        }
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>\n",
            cbx + 24.0,
            mt + ph,
            tick_label(lo),
            cbx + 24.0,
            mt + 10.0,
            tick_label(hi)
        );
        svg.push_str("</svg>\n");
        svg
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes an SVG next to the tables; returns the path.
pub fn write_svg(dir: &Path, name: &str, svg: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.svg"));
    std::fs::write(&path, svg)?;
    log::info!("wrote {}", path.display());
    Ok(path)
}
