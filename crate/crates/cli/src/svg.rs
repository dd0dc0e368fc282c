//! Self-contained SVG line plots for the CSV outputs.
//!
//! Every renderer takes parsed CSV content (metadata plus rows) and nothing
//! else, so a plot can always be regenerated from its CSV file alone. The
//! generated documents embed no external assets, scripts, or fonts.

use crate::csvio::Metadata;
use crate::run::{CompareRow, SweepPoint};

/// One plotted curve.
struct Series {
    label: String,
    color: &'static str,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

/// One chart: axes, optional log-scale ordinate, optional reference line at
/// `y = 1`, and a set of curves.
struct Panel {
    title: String,
    caption: String,
    x_label: String,
    y_label: String,
    log_y: bool,
    unity_line: bool,
    series: Vec<Series>,
}

const PANEL_W: f64 = 760.0;
const PANEL_H: f64 = 340.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 44.0;
const MARGIN_B: f64 = 52.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_tick(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let a = x.abs();
    if !(1e-3..1e4).contains(&a) {
        format!("{x:e}")
    } else {
        let s = format!("{x:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    }
}

/// Round-valued tick positions covering `[lo, hi]` at a 1-2-5 pitch.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !span.is_finite() || span <= 0.0 {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = mag
        * if norm <= 1.0 {
            1.0
        } else if norm <= 2.0 {
            2.0
        } else if norm <= 5.0 {
            5.0
        } else {
            10.0
        };
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// Tick positions for a log10-transformed axis: whole decades when the range
/// spans at least two of them, otherwise 1-2-5 ticks in log space.
fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let first = lo.ceil() as i64;
    let last = hi.floor() as i64;
    if last - first >= 1 {
        (first..=last).map(|k| k as f64).collect()
    } else {
        nice_ticks(lo, hi, 4)
    }
}

struct Frame {
    x0: f64,
    y0: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.x0 + MARGIN_L + (v - lo) / (hi - lo) * (PANEL_W - MARGIN_L - MARGIN_R)
    }
    fn y(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.y0 + PANEL_H - MARGIN_B - (v - lo) / (hi - lo) * (PANEL_H - MARGIN_T - MARGIN_B)
    }
}

fn render_panel(out: &mut String, panel: &Panel, y0: f64) {
    use std::fmt::Write;

    // Transform to plot space, dropping non-finite points and (on log axes)
    // non-positive ordinates; gaps split the polyline.
    let transformed: Vec<Vec<Option<(f64, f64)>>> = panel
        .series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .map(|&(x, y)| {
                    if !x.is_finite() || !y.is_finite() {
                        return None;
                    }
                    if panel.log_y {
                        if y > 0.0 {
                            Some((x, y.log10()))
                        } else {
                            None
                        }
                    } else {
                        Some((x, y))
                    }
                })
                .collect()
        })
        .collect();

    let finite: Vec<(f64, f64)> =
        transformed.iter().flatten().filter_map(|p| *p).collect();

    let _ = write!(
        out,
        r##"<text x="{tx}" y="{ty}" font-size="15" font-weight="bold" fill="#222">{title}</text>"##,
        tx = MARGIN_L,
        ty = y0 + 20.0,
        title = esc(&panel.title)
    );
    if !panel.caption.is_empty() {
        let _ = write!(
            out,
            r##"<text x="{tx}" y="{ty}" font-size="11" fill="#555" text-anchor="end">{cap}</text>"##,
            tx = PANEL_W - MARGIN_R,
            ty = y0 + 20.0,
            cap = esc(&panel.caption)
        );
    }

    if finite.is_empty() {
        let _ = write!(
            out,
            r##"<text x="{tx}" y="{ty}" font-size="13" fill="#a00">no finite data to plot</text>"##,
            tx = MARGIN_L,
            ty = y0 + PANEL_H / 2.0
        );
        return;
    }

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &finite {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if panel.unity_line {
        let unity = if panel.log_y { 0.0 } else { 1.0 };
        y_lo = y_lo.min(unity);
        y_hi = y_hi.max(unity);
    }
    if x_hi - x_lo <= 0.0 {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if y_hi - y_lo <= 0.0 {
        let pad = y_lo.abs().max(1.0) * 0.1;
        y_lo -= pad;
        y_hi += pad;
    } else {
        let pad = (y_hi - y_lo) * 0.06;
        y_lo -= pad;
        y_hi += pad;
    }

    let frame = Frame { x0: 0.0, y0, x_range: (x_lo, x_hi), y_range: (y_lo, y_hi) };
    let (px0, px1) = (frame.x(x_lo), frame.x(x_hi));
    let (py0, py1) = (frame.y(y_lo), frame.y(y_hi));

    // Grid and ticks.
    let x_ticks = nice_ticks(x_lo, x_hi, 7);
    let y_ticks = if panel.log_y { log_ticks(y_lo, y_hi) } else { nice_ticks(y_lo, y_hi, 5) };
    for &t in &x_ticks {
        let x = frame.x(t);
        let _ = write!(
            out,
            r##"<line x1="{x:.2}" y1="{py0:.2}" x2="{x:.2}" y2="{py1:.2}" stroke="#e4e4e4" stroke-width="1"/>"##
        );
        let _ = write!(
            out,
            r##"<text x="{x:.2}" y="{ly:.2}" font-size="11" fill="#333" text-anchor="middle">{label}</text>"##,
            ly = py0 + 16.0,
            label = esc(&fmt_tick(t))
        );
    }
    for &t in &y_ticks {
        let y = frame.y(t);
        let label = if panel.log_y { fmt_tick(10f64.powf(t)) } else { fmt_tick(t) };
        let _ = write!(
            out,
            r##"<line x1="{px0:.2}" y1="{y:.2}" x2="{px1:.2}" y2="{y:.2}" stroke="#e4e4e4" stroke-width="1"/>"##
        );
        let _ = write!(
            out,
            r##"<text x="{lx:.2}" y="{ly:.2}" font-size="11" fill="#333" text-anchor="end">{label}</text>"##,
            lx = px0 - 6.0,
            ly = y + 4.0,
            label = esc(&label)
        );
    }

    if panel.unity_line {
        let v = if panel.log_y { 0.0 } else { 1.0 };
        if v >= y_lo && v <= y_hi {
            let y = frame.y(v);
            let _ = write!(
                out,
                r##"<line x1="{px0:.2}" y1="{y:.2}" x2="{px1:.2}" y2="{y:.2}" stroke="#888" stroke-width="1" stroke-dasharray="6 3"/>"##
            );
        }
    }

    // Frame border.
    let _ = write!(
        out,
        r##"<rect x="{px0:.2}" y="{py1:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#444" stroke-width="1"/>"##,
        w = px1 - px0,
        h = py0 - py1
    );

    // Curves.
    for (s, pts) in panel.series.iter().zip(&transformed) {
        let dash = if s.dashed { r##" stroke-dasharray="7 4""## } else { "" };
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, out: &mut String| {
            if seg.len() >= 2 {
                let _ = write!(
                    out,
                    r##"<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{pts}"/>"##,
                    color = s.color,
                    pts = seg.join(" ")
                );
            } else if seg.len() == 1 {
                // An isolated point still deserves ink.
                let (x, y) = seg[0].split_once(',').map(|(a, b)| (a.to_owned(), b.to_owned())).unwrap();
                let _ = write!(
                    out,
                    r##"<circle cx="{x}" cy="{y}" r="2" fill="{color}"/>"##,
                    color = s.color
                );
            }
            seg.clear();
        };
        for p in pts {
            match p {
                Some((x, y)) => {
                    segment.push(format!("{:.2},{:.2}", frame.x(*x), frame.y(*y)));
                }
                None => flush(&mut segment, out),
            }
        }
        flush(&mut segment, out);
    }

    // Legend.
    let labeled: Vec<&Series> = panel.series.iter().filter(|s| !s.label.is_empty()).collect();
    if labeled.len() > 1 {
        let mut ly = py1 + 14.0;
        for s in labeled {
            let lx = px1 - 170.0;
            let dash = if s.dashed { r##" stroke-dasharray="7 4""## } else { "" };
            let _ = write!(
                out,
                r##"<line x1="{lx:.2}" y1="{ly:.2}" x2="{lx2:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.6"{dash}/>"##,
                lx2 = lx + 26.0,
                color = s.color
            );
            let _ = write!(
                out,
                r##"<text x="{tx:.2}" y="{ty:.2}" font-size="11" fill="#333">{label}</text>"##,
                tx = lx + 32.0,
                ty = ly + 4.0,
                label = esc(&s.label)
            );
            ly += 16.0;
        }
    }

    // Axis titles.
    let _ = write!(
        out,
        r##"<text x="{tx:.2}" y="{ty:.2}" font-size="12" fill="#222" text-anchor="middle">{label}</text>"##,
        tx = (px0 + px1) / 2.0,
        ty = y0 + PANEL_H - 14.0,
        label = esc(&panel.x_label)
    );
    let _ = write!(
        out,
        r##"<text x="{tx:.2}" y="{ty:.2}" font-size="12" fill="#222" text-anchor="middle" transform="rotate(-90 {tx:.2} {ty:.2})">{label}</text>"##,
        tx = 18.0,
        ty = (py0 + py1) / 2.0,
        label = esc(&panel.y_label)
    );
}

fn render_document(panels: &[Panel]) -> String {
    let height = PANEL_H * panels.len() as f64;
    let mut out = String::new();
    out.push_str(&format!(
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{height}" viewBox="0 0 {PANEL_W} {height}" font-family="sans-serif">"##
    ));
    out.push_str(&format!(
        r##"<rect x="0" y="0" width="{PANEL_W}" height="{height}" fill="#ffffff"/>"##
    ));
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, PANEL_H * i as f64);
    }
    out.push_str("</svg>\n");
    out
}

fn meta_or(meta: &Metadata, key: &str, fallback: &str) -> String {
    meta.get(key).cloned().unwrap_or_else(|| fallback.to_owned())
}

/// Short human-readable float from a metadata cell that holds a full
/// 17-digit value.
fn meta_num(meta: &Metadata, key: &str) -> Option<String> {
    meta.get(key)?.parse::<f64>().ok().map(|v| format!("{v:.4}"))
}

/// Plot of a `g²(0)` sweep: correlation panel (numeric and perturbative
/// curves) plus a stationary-moment panel (`⟨n(n-1)⟩` against `⟨n⟩²`).
pub fn sweep_svg(meta: &Metadata, rows: &[SweepPoint]) -> String {
    let model = meta_or(meta, "model", "?");
    let cutoff = meta_or(meta, "cutoff", "?");
    let caption = match meta_num(meta, "delta_c0") {
        Some(v) => format!("delta_c0 = {v} gamma_e (photon-number maximum)"),
        None => String::new(),
    };
    let xs: Vec<f64> = rows.iter().map(|r| r.theta).collect();
    let pick = |f: &dyn Fn(&SweepPoint) -> f64| -> Vec<(f64, f64)> {
        xs.iter().copied().zip(rows.iter().map(f)).collect()
    };
    let panels = [
        Panel {
            title: format!("g2(0) vs reduced detuning [{model} model, cutoff {cutoff}]"),
            caption: caption.clone(),
            x_label: "theta = (delta_c - delta_c0) / gamma_e".into(),
            y_label: "g2(0)".into(),
            log_y: true,
            unity_line: true,
            series: vec![
                Series {
                    label: "numeric".into(),
                    color: PALETTE[0],
                    dashed: false,
                    points: pick(&|r| r.g2_numeric),
                },
                Series {
                    label: "perturbative".into(),
                    color: PALETTE[1],
                    dashed: true,
                    points: pick(&|r| r.g2_perturbative),
                },
            ],
        },
        Panel {
            title: "stationary moments".into(),
            caption,
            x_label: "theta = (delta_c - delta_c0) / gamma_e".into(),
            y_label: "moment".into(),
            log_y: true,
            unity_line: false,
            series: vec![
                Series {
                    label: "pairs <n(n-1)>".into(),
                    color: PALETTE[2],
                    dashed: false,
                    points: pick(&|r| r.pairs_ss),
                },
                Series {
                    label: "<n>^2".into(),
                    color: PALETTE[3],
                    dashed: true,
                    points: pick(&|r| r.n_ss * r.n_ss),
                },
            ],
        },
    ];
    render_document(&panels)
}

/// Plot of a delayed-correlation trace, annotated with the analytic
/// oscillation period when the metadata carries one.
pub fn tau_svg(meta: &Metadata, taus: &[f64], values: &[f64]) -> String {
    let model = meta_or(meta, "model", "?");
    let cutoff = meta_or(meta, "cutoff", "?");
    let theta = meta_num(meta, "theta").unwrap_or_else(|| "?".into());
    let caption = match meta_num(meta, "predicted_oscillation_period") {
        Some(v) => format!("predicted oscillation period = {v} / gamma_e"),
        None => String::new(),
    };
    let panels = [Panel {
        title: format!("g2(tau) at theta = {theta} [{model} model, cutoff {cutoff}]"),
        caption,
        x_label: "tau [1 / gamma_e]".into(),
        y_label: "g2(tau)".into(),
        log_y: false,
        unity_line: true,
        series: vec![Series {
            label: String::new(),
            color: PALETTE[0],
            dashed: false,
            points: taus.iter().copied().zip(values.iter().copied()).collect(),
        }],
    }];
    render_document(&panels)
}

/// Overlay plot of the spin-bubble and two-boson `g²(0)` curves.
pub fn compare_svg(meta: &Metadata, rows: &[CompareRow]) -> String {
    let cutoff = meta_or(meta, "cutoff", "?");
    let caption = match meta_num(meta, "delta_c0") {
        Some(v) => format!("delta_c0 = {v} gamma_e (photon-number maximum)"),
        None => String::new(),
    };
    let xs: Vec<f64> = rows.iter().map(|r| r.theta).collect();
    let pick = |f: &dyn Fn(&CompareRow) -> f64| -> Vec<(f64, f64)> {
        xs.iter().copied().zip(rows.iter().map(f)).collect()
    };
    let panels = [Panel {
        title: format!("model comparison: g2(0) vs reduced detuning [cutoff {cutoff}]"),
        caption,
        x_label: "theta = (delta_c - delta_c0) / gamma_e".into(),
        y_label: "g2(0)".into(),
        log_y: true,
        unity_line: true,
        series: vec![
            Series {
                label: "spin".into(),
                color: PALETTE[0],
                dashed: false,
                points: pick(&|r| r.g2_spin),
            },
            Series {
                label: "boson-kbar".into(),
                color: PALETTE[1],
                dashed: false,
                points: pick(&|r| r.g2_boson_kbar),
            },
            Series {
                label: "boson-kbarprime".into(),
                color: PALETTE[2],
                dashed: false,
                points: pick(&|r| r.g2_boson_kbarprime),
            },
        ],
    }];
    render_document(&panels)
}
