//! Figure emission: a grouped histogram of the involved/informational
//! ratio by author gender, and a coefficient dot plot. SVG is built by
//! hand (no rendering dependencies) and every figure gets a CSV twin so
//! the numbers stay testable.

use crate::error::CliError;
use invinf::corpus::Gender;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub female_count: usize,
    pub male_count: usize,
    pub female_pct: f64,
    pub male_pct: f64,
}

#[derive(Debug, Clone)]
pub struct HistogramBins {
    pub width: f64,
    pub bins: Vec<Bin>,
    pub total_female: usize,
    pub total_male: usize,
}

/// Bins defined ratios into right-open intervals of `width`, anchored at
/// zero. Heights are percentages within each gender group.
pub fn bin_ratios(values: &[(f64, Gender)], width: f64) -> Result<HistogramBins, CliError> {
    if width <= 0.0 || width.is_nan() {
        return Err(CliError::spec("bin width must be positive"));
    }
    let usable: Vec<(f64, Gender)> = values
        .iter()
        .filter(|(r, g)| r.is_finite() && *g != Gender::Unknown)
        .copied()
        .collect();
    if usable.is_empty() {
        return Err(CliError::spec("nothing to plot: no defined ratios"));
    }
    let min = usable.iter().map(|(r, _)| *r).fold(f64::INFINITY, f64::min);
    let max = usable.iter().map(|(r, _)| *r).fold(f64::NEG_INFINITY, f64::max);
    let start = (min / width).floor() * width;
    let n_bins = (((max - start) / width).floor() as usize) + 1;
    let mut bins: Vec<Bin> = (0..n_bins)
        .map(|i| Bin {
            lo: start + i as f64 * width,
            hi: start + (i + 1) as f64 * width,
            female_count: 0,
            male_count: 0,
            female_pct: 0.0,
            male_pct: 0.0,
        })
        .collect();
    let mut total_female = 0usize;
    let mut total_male = 0usize;
    for (r, g) in &usable {
        let idx = (((r - start) / width).floor() as usize).min(n_bins - 1);
        match g {
            Gender::Female => {
                bins[idx].female_count += 1;
                total_female += 1;
            }
            Gender::Male => {
                bins[idx].male_count += 1;
                total_male += 1;
            }
            Gender::Unknown => unreachable!("filtered above"),
        }
    }
    for bin in &mut bins {
        if total_female > 0 {
            bin.female_pct = 100.0 * bin.female_count as f64 / total_female as f64;
        }
        if total_male > 0 {
            bin.male_pct = 100.0 * bin.male_count as f64 / total_male as f64;
        }
    }
    Ok(HistogramBins {
        width,
        bins,
        total_female,
        total_male,
    })
}

pub fn bins_csv(hist: &HistogramBins) -> String {
    let mut out = String::from("bin_lo,bin_hi,female_count,male_count,female_pct,male_pct\n");
    for b in &hist.bins {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            b.lo, b.hi, b.female_count, b.male_count, b.female_pct, b.male_pct
        );
    }
    out
}

const W: f64 = 840.0;
const H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 50.0;
const MARGIN_B: f64 = 70.0;
const FEMALE_COLOR: &str = "#e0a43c";
const MALE_COLOR: &str = "#3c78b4";

/// Grouped-bar histogram: share of each gender's documents per ratio bin.
pub fn histogram_svg(hist: &HistogramBins, title: &str) -> String {
    let plot_w = W - MARGIN_L - MARGIN_R;
    let plot_h = H - MARGIN_T - MARGIN_B;
    let max_pct = hist
        .bins
        .iter()
        .map(|b| b.female_pct.max(b.male_pct))
        .fold(0.0_f64, f64::max)
        .max(1.0);
    let y_of = |pct: f64| MARGIN_T + plot_h * (1.0 - pct / max_pct);
    let n = hist.bins.len() as f64;
    let slot_w = plot_w / n;
    let bar_w = (slot_w * 0.4).max(1.0);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        xml_escape(title)
    );
    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        H - MARGIN_B,
        W - MARGIN_R,
        H - MARGIN_B
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>",
        H - MARGIN_B
    );
    // y gridline labels
    for step in 0..=4 {
        let pct = max_pct * step as f64 / 4.0;
        let y = y_of(pct);
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.1}%</text>",
            MARGIN_L - 6.0,
            y + 4.0,
            pct
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{MARGIN_L}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#dddddd\"/>",
            W - MARGIN_R
        );
    }
    // bars
    for (i, b) in hist.bins.iter().enumerate() {
        let x0 = MARGIN_L + i as f64 * slot_w;
        let fx = x0 + slot_w / 2.0 - bar_w;
        let mx = x0 + slot_w / 2.0;
        let fy = y_of(b.female_pct);
        let my = y_of(b.male_pct);
        let _ = writeln!(
            svg,
            "<rect x=\"{fx:.2}\" y=\"{fy:.2}\" width=\"{bar_w:.2}\" height=\"{:.2}\" fill=\"{FEMALE_COLOR}\"/>",
            H - MARGIN_B - fy
        );
        let _ = writeln!(
            svg,
            "<rect x=\"{mx:.2}\" y=\"{my:.2}\" width=\"{bar_w:.2}\" height=\"{:.2}\" fill=\"{MALE_COLOR}\"/>",
            H - MARGIN_B - my
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{:.2}</text>",
            x0 + slot_w / 2.0,
            H - MARGIN_B + 16.0,
            b.lo
        );
    }
    // axis titles and legend
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">Involved-Informational Ratio (bin lower edge)</text>",
        MARGIN_L + plot_w / 2.0,
        H - 20.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">Share of documents</text>",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{}\" y=\"{MARGIN_T}\" width=\"12\" height=\"12\" fill=\"{FEMALE_COLOR}\"/><text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">female (n={})</text>",
        W - 190.0,
        W - 173.0,
        MARGIN_T + 10.0,
        hist.total_female
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{MALE_COLOR}\"/><text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">male (n={})</text>",
        W - 190.0,
        MARGIN_T + 18.0,
        W - 173.0,
        MARGIN_T + 28.0,
        hist.total_male
    );
    svg.push_str("</svg>\n");
    svg
}

/// One coefficient with its confidence whisker.
#[derive(Debug, Clone)]
pub struct CoefPoint {
    pub name: String,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn coef_csv(points: &[CoefPoint]) -> String {
    let mut out = String::from("term,estimate,ci_lo,ci_hi\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{}", p.name, p.estimate, p.lo, p.hi);
    }
    out
}

/// Horizontal dot plot with CI whiskers and a zero line.
pub fn coef_plot_svg(points: &[CoefPoint], title: &str) -> String {
    let plot_w = W - MARGIN_L - MARGIN_R - 120.0;
    let row_h = 34.0;
    let height = MARGIN_T + points.len() as f64 * row_h + MARGIN_B;
    let lo = points.iter().map(|p| p.lo).fold(0.0_f64, f64::min);
    let hi = points.iter().map(|p| p.hi).fold(0.0_f64, f64::max);
    let span = (hi - lo).max(1e-12);
    let x_of = |v: f64| MARGIN_L + 120.0 + (v - lo) / span * plot_w;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{height}\" viewBox=\"0 0 {W} {height}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{height}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        xml_escape(title)
    );
    let zero_x = x_of(0.0);
    let _ = writeln!(
        svg,
        "<line x1=\"{zero_x:.2}\" y1=\"{MARGIN_T}\" x2=\"{zero_x:.2}\" y2=\"{:.2}\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>",
        height - MARGIN_B
    );
    for (i, p) in points.iter().enumerate() {
        let y = MARGIN_T + (i as f64 + 0.5) * row_h;
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            MARGIN_L + 104.0,
            y + 4.0,
            xml_escape(&p.name)
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"black\"/>",
            x_of(p.lo),
            x_of(p.hi)
        );
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{MALE_COLOR}\"/>",
            x_of(p.estimate)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
