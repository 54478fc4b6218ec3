//! Presentation layer: observed-vs-predicted scatter data, descriptor
//! contribution charts, and the statistics table, each emitted as CSV plus a
//! self-contained deterministic SVG (no timestamps, no external resources).
//! All numbers are printed with round-half-even at 4 decimals.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::pipeline::{PredictionRow, SetLabel};
use crate::regression::{ContributionBreakdown, FittedModel};
use crate::validation::{RandomizationResult, ValidationReport};

/// Formats with banker's rounding (round half to even) at `decimals` places,
/// applied to the decimal expansion of the value.
pub fn format_fixed(x: f64, decimals: usize) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    // Render with guard digits, then round the decimal string.
    let guard = decimals + 8;
    let raw = format!("{x:.guard$}");
    let (sign, body) = match raw.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", raw.as_str()),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let kept: Vec<u8> = frac_part.bytes().take(decimals).collect();
    let rest = &frac_part[decimals.min(frac_part.len())..];

    let round_up = {
        let rest_digits: u64 = rest.parse().unwrap_or(0);
        let half = 5 * 10u64.pow(rest.len().saturating_sub(1) as u32);
        if rest.is_empty() || rest_digits < half {
            false
        } else if rest_digits > half {
            true
        } else {
            // Exact tie: round to even on the last kept digit.
            let last = kept
                .last()
                .copied()
                .unwrap_or_else(|| int_part.bytes().last().unwrap_or(b'0'));
            (last - b'0') % 2 == 1
        }
    };

    let mut digits: Vec<u8> = int_part.bytes().chain(kept.iter().copied()).collect();
    if round_up {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, b'1');
                break;
            }
            i -= 1;
            if digits[i] == b'9' {
                digits[i] = b'0';
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let split = digits.len() - decimals;
    let int_str = String::from_utf8_lossy(&digits[..split]).to_string();
    let frac_str = String::from_utf8_lossy(&digits[split..]).to_string();
    let mut out = if decimals == 0 {
        int_str
    } else {
        format!("{int_str}.{frac_str}")
    };
    // Never print a signed zero.
    if sign == "-" && out.bytes().any(|b| b.is_ascii_digit() && b != b'0') {
        out.insert(0, '-');
    }
    out
}

/// Labeled train/test point sets plus the identity-line bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSeries {
    pub train: Vec<(f64, f64)>,
    pub test: Vec<(f64, f64)>,
    pub line_lo: f64,
    pub line_hi: f64,
}

impl ScatterSeries {
    pub fn from_predictions(rows: &[PredictionRow]) -> ScatterSeries {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for r in rows {
            let point = (r.observed, r.predicted);
            match r.set {
                SetLabel::Train => train.push(point),
                SetLabel::Test => test.push(point),
            }
        }
        let (lo, hi) = padded_bounds(train.iter().chain(&test));
        ScatterSeries {
            train,
            test,
            line_lo: lo,
            line_hi: hi,
        }
    }
}

/// Min/max over observed and predicted together, padded by 5%.
fn padded_bounds<'a>(points: impl Iterator<Item = &'a (f64, f64)>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (o, p) in points {
        lo = lo.min(*o).min(*p);
        hi = hi.max(*o).max(*p);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    let span = (hi - lo).max(1e-12);
    (lo - 0.05 * span, hi + 0.05 * span)
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 32.0;
const MARGIN_B: f64 = 48.0;

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x_lo) / (self.x_hi - self.x_lo) * (SVG_W - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        SVG_H - MARGIN_B - (v - self.y_lo) / (self.y_hi - self.y_lo) * (SVG_H - MARGIN_T - MARGIN_B)
    }
}

fn px(v: f64) -> String {
    format_fixed(v, 2)
}

fn svg_header(out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\" font-family=\"monospace\" font-size=\"12\">\n"
    ));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>\n"
    ));
}

fn svg_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = px(MARGIN_L);
    let x1 = px(SVG_W - MARGIN_R);
    let y0 = px(SVG_H - MARGIN_B);
    let y1 = px(MARGIN_T);
    out.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=4 {
        let fx = frame.x_lo + (frame.x_hi - frame.x_lo) * i as f64 / 4.0;
        let fy = frame.y_lo + (frame.y_hi - frame.y_lo) * i as f64 / 4.0;
        let tx = px(frame.x(fx));
        let ty = px(frame.y(fy));
        out.push_str(&format!(
            "  <line x1=\"{tx}\" y1=\"{y0}\" x2=\"{tx}\" y2=\"{}\" stroke=\"black\"/>\n",
            px(SVG_H - MARGIN_B + 4.0)
        ));
        out.push_str(&format!(
            "  <text x=\"{tx}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            px(SVG_H - MARGIN_B + 18.0),
            format_fixed(fx, 4)
        ));
        out.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{ty}\" x2=\"{x0}\" y2=\"{ty}\" stroke=\"black\"/>\n",
            px(MARGIN_L - 4.0)
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            px(MARGIN_L - 8.0),
            px(frame.y(fy) + 4.0),
            format_fixed(fy, 4)
        ));
    }
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>\n",
        px((MARGIN_L + SVG_W - MARGIN_R) / 2.0),
        px(SVG_H - 8.0)
    ));
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{y_label}</text>\n",
        px(14.0),
        px((MARGIN_T + SVG_H - MARGIN_B) / 2.0),
        px((MARGIN_T + SVG_H - MARGIN_B) / 2.0)
    ));
}

/// Renders the scatter SVG from (id, set, observed, predicted) rows; the SVG
/// is a pure function of these rows so re-rendering parsed CSV data is
/// byte-identical.
pub fn render_scatter_svg(rows: &[(String, String, f64, f64)]) -> String {
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.2, r.3)).collect();
    let (lo, hi) = padded_bounds(points.iter());
    let frame = Frame {
        x_lo: lo,
        x_hi: hi,
        y_lo: lo,
        y_hi: hi,
    };
    let mut out = String::new();
    svg_header(&mut out);
    svg_axes(&mut out, &frame, "observed", "predicted");
    // Identity reference line.
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n",
        px(frame.x(lo)),
        px(frame.y(lo)),
        px(frame.x(hi)),
        px(frame.y(hi))
    ));
    for (_, set, obs, pred) in rows {
        let cx = frame.x(*obs);
        let cy = frame.y(*pred);
        if set == "train" {
            out.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#d62728\"/>\n",
                px(cx),
                px(cy)
            ));
        } else {
            out.push_str(&format!(
                "  <rect x=\"{}\" y=\"{}\" width=\"7\" height=\"7\" fill=\"#1f77b4\"/>\n",
                px(cx - 3.5),
                px(cy - 3.5)
            ));
        }
    }
    out.push_str(&format!(
        "  <circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#d62728\"/>\n",
        px(SVG_W - 150.0),
        px(MARGIN_T + 6.0)
    ));
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\">train</text>\n",
        px(SVG_W - 140.0),
        px(MARGIN_T + 10.0)
    ));
    out.push_str(&format!(
        "  <rect x=\"{}\" y=\"{}\" width=\"7\" height=\"7\" fill=\"#1f77b4\"/>\n",
        px(SVG_W - 153.5),
        px(MARGIN_T + 20.5)
    ));
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\">test</text>\n",
        px(SVG_W - 140.0),
        px(MARGIN_T + 28.0)
    ));
    out.push_str("</svg>\n");
    out
}

/// Scatter CSV rows at report precision, ready for rendering.
pub fn scatter_rows(predictions: &[PredictionRow]) -> Vec<(String, String, f64, f64)> {
    predictions
        .iter()
        .map(|r| {
            let obs: f64 = format_fixed(r.observed, 4).parse().unwrap();
            let pred: f64 = format_fixed(r.predicted, 4).parse().unwrap();
            (r.id.clone(), r.set.to_string(), obs, pred)
        })
        .collect()
}

/// Writes `scatter.csv` and `scatter.svg` under `dir`.
pub fn emit_scatter(predictions: &[PredictionRow], dir: &Path) -> io::Result<Vec<PathBuf>> {
    let rows = scatter_rows(predictions);
    let mut csv = String::from("id,set,observed,predicted\n");
    for (id, set, obs, pred) in &rows {
        csv.push_str(&format!(
            "{id},{set},{},{}\n",
            format_fixed(*obs, 4),
            format_fixed(*pred, 4)
        ));
    }
    let csv_path = dir.join("scatter.csv");
    fs::write(&csv_path, csv)?;
    let svg_path = dir.join("scatter.svg");
    fs::write(&svg_path, render_scatter_svg(&rows))?;
    Ok(vec![csv_path, svg_path])
}

/// Parses a scatter CSV back into render rows.
pub fn parse_scatter_csv(text: &str) -> Option<Vec<(String, String, f64, f64)>> {
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        let mut parts = line.split(',');
        let id = parts.next()?.to_string();
        let set = parts.next()?.to_string();
        let obs: f64 = parts.next()?.parse().ok()?;
        let pred: f64 = parts.next()?.parse().ok()?;
        rows.push((id, set, obs, pred));
    }
    Some(rows)
}

/// Contribution entries sorted by |percentage| descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionChart {
    pub entries: Vec<(String, f64)>,
}

impl ContributionChart {
    pub fn from_breakdown(breakdown: &ContributionBreakdown) -> ContributionChart {
        let mut entries: Vec<(String, f64)> = breakdown
            .entries
            .iter()
            .map(|e| (e.descriptor.clone(), e.percentage))
            .collect();
        entries.sort_by(|a, b| {
            b.1.abs()
                .partial_cmp(&a.1.abs())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        ContributionChart { entries }
    }
}

/// Renders the horizontal bar chart; negative bars extend left of the axis.
pub fn render_contribution_svg(entries: &[(String, f64)]) -> String {
    let max_abs = entries
        .iter()
        .map(|(_, v)| v.abs())
        .fold(1e-12_f64, f64::max);
    let n = entries.len().max(1);
    let bar_h = ((SVG_H - MARGIN_T - MARGIN_B) / n as f64).min(36.0);
    let zero_x = (MARGIN_L + SVG_W - MARGIN_R) / 2.0;
    let half_span = (SVG_W - MARGIN_L - MARGIN_R) / 2.0 - 60.0;

    let mut out = String::new();
    svg_header(&mut out);
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        px(zero_x),
        px(MARGIN_T),
        px(zero_x),
        px(SVG_H - MARGIN_B)
    ));
    for (i, (name, value)) in entries.iter().enumerate() {
        let y = MARGIN_T + i as f64 * bar_h + 4.0;
        let w = value.abs() / max_abs * half_span;
        let (x, fill) = if *value >= 0.0 {
            (zero_x, "#2ca02c")
        } else {
            (zero_x - w, "#d62728")
        };
        out.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>\n",
            px(x),
            px(y),
            px(w),
            px(bar_h - 8.0)
        ));
        let (tx, anchor) = if *value >= 0.0 {
            (zero_x + w + 6.0, "start")
        } else {
            (zero_x - w - 6.0, "end")
        };
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\">{name} {}%</text>\n",
            px(tx),
            px(y + bar_h / 2.0),
            format_fixed(*value, 4)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `contributions.csv` and `contributions.svg` under `dir`. The SVG
/// is rendered from the same 4-decimal values the CSV carries.
pub fn emit_contribution_chart(model: &FittedModel, dir: &Path) -> io::Result<Vec<PathBuf>> {
    let breakdown = model
        .contributions()
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    let chart = ContributionChart::from_breakdown(&breakdown);
    let rounded: Vec<(String, f64)> = chart
        .entries
        .iter()
        .map(|(name, value)| (name.clone(), format_fixed(*value, 4).parse().unwrap()))
        .collect();
    let mut csv = String::from("descriptor,percentage\n");
    for (name, value) in &rounded {
        csv.push_str(&format!("{name},{}\n", format_fixed(*value, 4)));
    }
    let csv_path = dir.join("contributions.csv");
    fs::write(&csv_path, csv)?;
    let svg_path = dir.join("contributions.svg");
    fs::write(&svg_path, render_contribution_svg(&rounded))?;
    Ok(vec![csv_path, svg_path])
}

/// Parses a contributions CSV back into render entries.
pub fn parse_contributions_csv(text: &str) -> Option<Vec<(String, f64)>> {
    let mut entries = Vec::new();
    for line in text.lines().skip(1) {
        let (name, value) = line.split_once(',')?;
        entries.push((name.to_string(), value.parse().ok()?));
    }
    Some(entries)
}

/// One column of the statistics table.
#[derive(Debug, Clone)]
pub struct StatsColumn {
    pub label: String,
    pub report: ValidationReport,
    pub randomization: Option<RandomizationResult>,
}

fn opt_fixed(v: Option<f64>) -> String {
    match v {
        Some(x) => format_fixed(x, 4),
        None => "-".to_string(),
    }
}

fn alpha_cell(randomization: Option<&RandomizationResult>, r2_side: bool) -> String {
    match randomization {
        None => "-".to_string(),
        Some(r) => {
            let alpha = if r2_side { r.alpha_r2 } else { r.alpha_q2 };
            match alpha {
                Some(level) => format_fixed(level, 4),
                None => "n.s.".to_string(),
            }
        }
    }
}

/// Row labels in presentation order. The sample-count row is split into
/// n_train and n_test so no ambiguous single N is ever printed.
pub const STATS_ROWS: [&str; 16] = [
    "n_train",
    "n_test",
    "df",
    "r2",
    "q2",
    "f_test",
    "best_ran_r2",
    "best_ran_q2",
    "z_score_ran_r2",
    "z_score_ran_q2",
    "alpha_ran_r2",
    "alpha_ran_q2",
    "r2_se",
    "q2_se",
    "pred_r2",
    "pred_r2_se",
];

fn stats_cell(row: &str, col: &StatsColumn) -> String {
    let ran = col.randomization.as_ref();
    match row {
        "n_train" => col.report.n_train.to_string(),
        "n_test" => col.report.n_test.to_string(),
        "df" => col.report.df.to_string(),
        "r2" => format_fixed(col.report.r2, 4),
        "q2" => format_fixed(col.report.q2, 4),
        "f_test" => format_fixed(col.report.f_test, 4),
        "best_ran_r2" => opt_fixed(ran.map(|r| r.best_ran_r2)),
        "best_ran_q2" => opt_fixed(ran.map(|r| r.best_ran_q2)),
        "z_score_ran_r2" => opt_fixed(ran.map(|r| r.z_score_r2)),
        "z_score_ran_q2" => opt_fixed(ran.map(|r| r.z_score_q2)),
        "alpha_ran_r2" => alpha_cell(ran, true),
        "alpha_ran_q2" => alpha_cell(ran, false),
        "r2_se" => format_fixed(col.report.r2_se, 4),
        "q2_se" => format_fixed(col.report.q2_se, 4),
        "pred_r2" => opt_fixed(col.report.pred_r2),
        "pred_r2_se" => opt_fixed(col.report.pred_r2_se),
        _ => unreachable!("unknown stats row"),
    }
}

pub fn render_stats_csv(columns: &[StatsColumn]) -> String {
    let mut out = String::from("parameter");
    for col in columns {
        out.push(',');
        out.push_str(&col.label);
    }
    out.push('\n');
    for row in STATS_ROWS {
        out.push_str(row);
        for col in columns {
            out.push(',');
            out.push_str(&stats_cell(row, col));
        }
        out.push('\n');
    }
    out
}

pub fn render_stats_text(columns: &[StatsColumn]) -> String {
    let label_width = STATS_ROWS
        .iter()
        .map(|r| r.len())
        .max()
        .unwrap_or(0)
        .max("parameter".len());
    let mut widths: Vec<usize> = columns.iter().map(|c| c.label.len()).collect();
    for row in STATS_ROWS {
        for (i, col) in columns.iter().enumerate() {
            widths[i] = widths[i].max(stats_cell(row, col).len());
        }
    }
    let mut out = format!("{:label_width$}", "parameter");
    for (col, w) in columns.iter().zip(&widths) {
        out.push_str(&format!("  {:>w$}", col.label, w = w));
    }
    out.push('\n');
    out.push_str(&"-".repeat(label_width + widths.iter().map(|w| w + 2).sum::<usize>()));
    out.push('\n');
    for row in STATS_ROWS {
        out.push_str(&format!("{row:label_width$}"));
        for (col, w) in columns.iter().zip(&widths) {
            out.push_str(&format!("  {:>w$}", stats_cell(row, col), w = w));
        }
        out.push('\n');
    }
    out
}

/// Writes `stats_table.txt` and `stats_table.csv` under `dir`.
pub fn emit_table(columns: &[StatsColumn], dir: &Path) -> io::Result<Vec<PathBuf>> {
    assert!(!columns.is_empty(), "need at least one report column");
    let txt_path = dir.join("stats_table.txt");
    fs::write(&txt_path, render_stats_text(columns))?;
    let csv_path = dir.join("stats_table.csv");
    fs::write(&csv_path, render_stats_csv(columns))?;
    Ok(vec![txt_path, csv_path])
}
