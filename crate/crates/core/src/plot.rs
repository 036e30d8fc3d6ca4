//! Self-contained SVG charts for results and gap-trace TSV files.
//!
//! Output is a pure function of the input text: fixed canvas, fixed palette,
//! coordinates printed with two decimals.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub scale: Scale,
    pub series: Vec<Series>,
}

/// Builds a chart from either TSV kind, chosen by its header.
pub fn chart_from_tsv(text: &str) -> Result<Chart> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Plot("empty input".into()))?
        .split('\t')
        .collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let rows: Vec<(usize, Vec<&str>)> = lines
        .enumerate()
        .map(|(i, l)| (i + 2, l.split('\t').collect()))
        .collect();
    if rows.is_empty() {
        return Err(Error::Plot("no data rows".into()));
    }
    for (line, fields) in &rows {
        if fields.len() != header.len() {
            return Err(Error::Parse {
                line: *line,
                msg: format!("expected {} fields, found {}", header.len(), fields.len()),
            });
        }
    }

    if let (Some(k), Some(method), Some(mean)) = (col("k"), col("method"), col("mean_computations"))
    {
        let mut series: Vec<Series> = Vec::new();
        for (line, f) in &rows {
            let x = number(f[k], *line)?;
            let y = mean_value(f[mean], *line)?;
            match series.iter_mut().find(|s| s.name == f[method]) {
                Some(s) => s.points.push((x, y)),
                None => series.push(Series {
                    name: f[method].to_string(),
                    points: vec![(x, y)],
                }),
            }
        }
        Ok(Chart {
            title: "Distance computations".into(),
            x_label: "k".into(),
            y_label: "mean computations".into(),
            scale: Scale::Linear,
            series,
        })
    } else if let (Some(secs), Some(gap)) = (col("secs"), col("gap_percent")) {
        let mut points = Vec::new();
        for (line, f) in &rows {
            let (x, y) = (number(f[secs], *line)?, number(f[gap], *line)?);
            // log axes cannot show zero
            if x > 0.0 && y > 0.0 {
                points.push((x, y));
            }
        }
        let title = if points.is_empty() {
            // solved before any positive gap was recorded: empty axes
            let closed = number(rows[rows.len() - 1].1[secs], rows[rows.len() - 1].0)?;
            format!("Optimality gap (closed at {closed:.6} s)")
        } else {
            "Optimality gap".into()
        };
        Ok(Chart {
            title,
            x_label: "seconds".into(),
            y_label: "gap (%)".into(),
            scale: Scale::Log,
            series: vec![Series {
                name: "gap".into(),
                points,
            }],
        })
    } else {
        Err(Error::Plot(format!(
            "unrecognised header: {}",
            header.join(" ")
        )))
    }
}

fn number(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("not a number: `{s}`"),
        })
}

/// Plain means, or the upper end of a bracketed `[lower,upper]` interval.
fn mean_value(s: &str, line: usize) -> Result<f64> {
    match s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        Some(inner) => {
            let (_, hi) = inner.split_once(',').ok_or_else(|| Error::Parse {
                line,
                msg: format!("bad interval `{s}`"),
            })?;
            number(hi, line)
        }
        None => number(s, line),
    }
}

pub fn render_tsv(text: &str) -> Result<String> {
    Ok(render(&chart_from_tsv(text)?))
}

struct Axis {
    lo: f64,
    hi: f64,
    ticks: Vec<f64>,
    scale: Scale,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64> + Clone, scale: Scale) -> Self {
        let lo = values.clone().fold(f64::INFINITY, f64::min);
        let hi = values.fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = match (lo.is_finite(), scale) {
            (true, _) => (lo, hi),
            (false, Scale::Linear) => (0.0, 1.0),
            (false, Scale::Log) => (1.0, 10.0),
        };
        match scale {
            Scale::Linear => {
                let (lo, hi) = if lo == hi {
                    (lo - 1.0, hi + 1.0)
                } else {
                    (lo, hi)
                };
                let step = nice_step((hi - lo) / 5.0);
                let lo = (lo / step).floor() * step;
                let hi = (hi / step).ceil() * step;
                let count = ((hi - lo) / step).round() as usize;
                let ticks = (0..=count).map(|i| lo + i as f64 * step).collect();
                Self {
                    lo,
                    hi,
                    ticks,
                    scale,
                }
            }
            Scale::Log => {
                let lo = lo.log10().floor();
                let hi = hi.log10().ceil().max(lo + 1.0);
                let ticks = (lo as i32..=hi as i32).map(|e| e as f64).collect();
                Self {
                    lo,
                    hi,
                    ticks,
                    scale,
                }
            }
        }
    }

    /// Position in `[0, 1]`.
    fn frac(&self, v: f64) -> f64 {
        let v = match self.scale {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn label(&self, t: f64) -> String {
        match self.scale {
            Scale::Linear => trim_number(t),
            Scale::Log => format!("1e{}", t as i32),
        }
    }

    fn tick_value(&self, t: f64) -> f64 {
        match self.scale {
            Scale::Linear => t,
            Scale::Log => 10f64.powf(t),
        }
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let m = raw / mag;
    let f = if m <= 1.0 {
        1.0
    } else if m <= 2.0 {
        2.0
    } else if m <= 5.0 {
        5.0
    } else {
        10.0
    };
    f * mag
}

fn trim_number(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render(chart: &Chart) -> String {
    let all = chart.series.iter().flat_map(|s| s.points.iter().copied());
    let xa = Axis::new(all.clone().map(|p| p.0), chart.scale);
    let ya = Axis::new(all.map(|p| p.1), chart.scale);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + xa.frac(v) * pw;
    let py = |v: f64| TOP + (1.0 - ya.frac(v)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&chart.title)
    );
    for &t in &xa.ticks {
        let x = px(xa.tick_value(t));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##,
            TOP,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            xa.label(t)
        );
    }
    for &t in &ya.ticks {
        let y = py(ya.tick_value(t));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            ya.label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&chart.y_label)
    );

    for (i, series) in chart.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if pts.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            );
        }
        for &(x, y) in &series.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let ly = TOP + 10.0 + i as f64 * 18.0;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&series.name)
        );
    }
    s.push_str("</svg>\n");
    s
}
