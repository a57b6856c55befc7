use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::format::format_sig6;
use super::sweep::{SweepReport, SweepRow};
use crate::metrics::ObjectiveKind;
use crate::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 620.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 520.0;
const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// One plotted quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    PercentOvershoot,
    SettlingTime,
    RiseTime,
    PeakTime,
    StabilityMargin,
    Index(ObjectiveKind),
}

impl PlotMetric {
    pub const ALL: [PlotMetric; 10] = [
        PlotMetric::PercentOvershoot,
        PlotMetric::SettlingTime,
        PlotMetric::RiseTime,
        PlotMetric::PeakTime,
        PlotMetric::StabilityMargin,
        PlotMetric::Index(ObjectiveKind::Mse),
        PlotMetric::Index(ObjectiveKind::Iae),
        PlotMetric::Index(ObjectiveKind::Ise),
        PlotMetric::Index(ObjectiveKind::Itae),
        PlotMetric::Index(ObjectiveKind::Itse),
    ];

    /// Column name in a reference CSV.
    pub fn key(self) -> &'static str {
        match self {
            PlotMetric::PercentOvershoot => "po",
            PlotMetric::SettlingTime => "st",
            PlotMetric::RiseTime => "rt",
            PlotMetric::PeakTime => "pt",
            PlotMetric::StabilityMargin => "sm",
            PlotMetric::Index(k) => k.name(),
        }
    }

    pub fn file_name(self) -> String {
        let prefix = match self {
            PlotMetric::PercentOvershoot => "fig3a",
            PlotMetric::SettlingTime => "fig3b",
            PlotMetric::RiseTime => "fig3c",
            PlotMetric::PeakTime => "fig3d",
            PlotMetric::StabilityMargin => "fig3e",
            PlotMetric::Index(ObjectiveKind::Mse) => "fig4a",
            PlotMetric::Index(ObjectiveKind::Iae) => "fig4b",
            PlotMetric::Index(ObjectiveKind::Ise) => "fig4c",
            PlotMetric::Index(ObjectiveKind::Itae) => "fig4d",
            PlotMetric::Index(ObjectiveKind::Itse) => "fig4e",
        };
        format!("{prefix}_{}.svg", self.key())
    }

    pub fn title(self) -> String {
        match self {
            PlotMetric::PercentOvershoot => "Percent overshoot (%)".to_string(),
            PlotMetric::SettlingTime => "Settling time, 5% (s)".to_string(),
            PlotMetric::RiseTime => "Rise time, 0-95% (s)".to_string(),
            PlotMetric::PeakTime => "Peak time (s)".to_string(),
            PlotMetric::StabilityMargin => "Stability margin".to_string(),
            PlotMetric::Index(k) => k.name().to_ascii_uppercase(),
        }
    }

    pub fn log_y(self) -> bool {
        self == PlotMetric::RiseTime
    }

    pub fn value(self, row: &SweepRow) -> Option<f64> {
        let m = row.measures;
        let v = match self {
            PlotMetric::PercentOvershoot => m?.percent_overshoot,
            PlotMetric::SettlingTime => m?.settling_time_5pct,
            PlotMetric::RiseTime => m?.rise_time_0_95,
            PlotMetric::PeakTime => m?.peak_time,
            PlotMetric::StabilityMargin => row.stability_margin()?,
            PlotMetric::Index(k) => row.indices.get(k),
        };
        Some(v)
    }
}

/// A delay and the reference values recorded for it, keyed by metric.
pub type ReferencePoint = (f64, BTreeMap<String, f64>);

/// External per-delay values drawn as dashed overlay lines.
///
/// CSV with columns `method`, `delay` and any of the metric keys
/// (`po, st, rt, pt, sm, mse, iae, ise, itae, itse`); blank cells are skipped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReferenceData {
    /// Methods in order of first appearance, each with `(delay, key → value)`.
    pub series: Vec<(String, Vec<ReferencePoint>)>,
}

impl ReferenceData {
    pub fn from_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (Some(method_col), Some(delay_col)) = (col("method"), col("delay")) else {
            return Err(Error::InvalidConfig("reference CSV needs 'method' and 'delay' columns".into()));
        };
        let bad = |what: &str| Error::InvalidConfig(format!("reference CSV: invalid {what}"));
        let mut data = ReferenceData::default();
        for record in rdr.records() {
            let record = record?;
            let method = record.get(method_col).unwrap_or("").to_string();
            let delay: f64 = record.get(delay_col).unwrap_or("").parse().map_err(|_| bad("delay"))?;
            let mut values = BTreeMap::new();
            for (i, field) in record.iter().enumerate() {
                if i == method_col || i == delay_col || field.is_empty() {
                    continue;
                }
                let key = headers.get(i).cloned().unwrap_or_default();
                values.insert(key.clone(), field.parse().map_err(|_| bad(&key))?);
            }
            match data.series.iter_mut().find(|(m, _)| *m == method) {
                Some((_, points)) => points.push((delay, values)),
                None => data.series.push((method, vec![(delay, values)])),
            }
        }
        Ok(data)
    }

    fn points(&self, metric: PlotMetric) -> Vec<(&str, Vec<(f64, f64)>)> {
        self.series
            .iter()
            .map(|(m, pts)| {
                let mut p: Vec<(f64, f64)> =
                    pts.iter().filter_map(|(d, v)| v.get(metric.key()).map(|&y| (*d, y))).collect();
                p.sort_by(|a, b| a.0.total_cmp(&b.0));
                (m.as_str(), p)
            })
            .filter(|(_, p)| !p.is_empty())
            .collect()
    }
}

/// Writes the ten metric-versus-delay charts into `dir`.
pub fn emit_plots(report: &SweepReport, dir: &Path, reference: Option<&ReferenceData>) -> Result<Vec<PathBuf>> {
    if report.delays.len() < 2 {
        return Err(Error::InvalidConfig("plots need at least two delays".into()));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    PlotMetric::ALL
        .iter()
        .map(|&metric| {
            let path = dir.join(metric.file_name());
            std::fs::write(&path, render(report, metric, reference)).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

struct Series<'a> {
    label: String,
    points: Vec<(f64, f64)>,
    color: &'a str,
    reference: bool,
}

/// SVG document for one metric.
pub fn render(report: &SweepReport, metric: PlotMetric, reference: Option<&ReferenceData>) -> String {
    let log_y = metric.log_y();
    let usable = |y: f64| y.is_finite() && (!log_y || y > 0.0);
    let mut series: Vec<Series> = report
        .methods
        .iter()
        .enumerate()
        .map(|(i, &method)| Series {
            label: method.label(),
            points: report
                .rows_for(method)
                .filter_map(|r| metric.value(r).filter(|&y| usable(y)).map(|y| (r.delay, y)))
                .collect(),
            color: PALETTE[i % PALETTE.len()],
            reference: false,
        })
        .collect();
    if let Some(reference) = reference {
        let offset = series.len();
        for (j, (method, points)) in reference.points(metric).into_iter().enumerate() {
            series.push(Series {
                label: format!("{method} (ref)"),
                points: points.into_iter().filter(|&(d, y)| d > 0.0 && usable(y)).collect(),
                color: PALETTE[(offset + j) % PALETTE.len()],
                reference: true,
            });
        }
    }

    let xs = &report.delays;
    let (x_lo, x_hi) = padded(xs[0].log10(), xs[xs.len() - 1].log10());
    let x_of = |d: f64| LEFT + (d.log10() - x_lo) / (x_hi - x_lo) * (RIGHT - LEFT);
    let ys: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
    let (y_lo, y_hi, y_ticks) = y_axis(&ys, log_y);
    let y_map = |y: f64| if log_y { y.log10() } else { y };
    let y_of = |y: f64| BOTTOM - (y_map(y) - y_lo) / (y_hi - y_lo) * (BOTTOM - TOP);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" data-metric="{}" data-x-scale="log" data-y-scale="{}">"#,
        metric.key(),
        if log_y { "log" } else { "linear" }
    );
    let _ = writeln!(svg, "<title>{} vs time delay</title>", escape(&metric.title()));
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="30" font-family="sans-serif" font-size="18" text-anchor="middle">{} vs time delay</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(&metric.title())
    );

    let _ =
        writeln!(svg, r#"<g class="axes" stroke="black" stroke-width="1" font-family="sans-serif" font-size="11">"#);
    let _ =
        writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none"/>"#, RIGHT - LEFT, BOTTOM - TOP);
    for &d in xs {
        let x = x_of(d);
        let _ = writeln!(svg, r#"<line class="tick" x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{:.2}"/>"#, BOTTOM + 5.0);
        let _ = writeln!(
            svg,
            r#"<text class="tick-label" x="{x:.2}" y="{:.2}" stroke="none" text-anchor="end" transform="rotate(-45 {x:.2} {:.2})">{}</text>"#,
            BOTTOM + 16.0,
            BOTTOM + 16.0,
            tick_label(d)
        );
    }
    for &t in &y_ticks {
        let y = BOTTOM - (t - y_lo) / (y_hi - y_lo) * (BOTTOM - TOP);
        let value = if log_y { 10f64.powf(t) } else { t };
        let _ = writeln!(svg, r#"<line class="tick" x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}"/>"#, LEFT - 5.0);
        let _ = writeln!(
            svg,
            r#"<text class="tick-label" x="{:.2}" y="{:.2}" stroke="none" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            tick_label(value)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" stroke="none" font-size="13" text-anchor="middle">Time delay (s)</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 60.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="22" y="{:.1}" stroke="none" font-size="13" text-anchor="middle" transform="rotate(-90 22 {:.1})">{}</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0,
        escape(&metric.title())
    );
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="data" fill="none" stroke-width="2">"#);
    for s in &series {
        let pts: Vec<String> = s.points.iter().map(|&(d, y)| format!("{:.2},{:.2}", x_of(d), y_of(y))).collect();
        let (class, dash) = if s.reference { ("reference", r#" stroke-dasharray="6 4""#) } else { ("series", "") };
        let _ = writeln!(
            svg,
            r#"<polyline class="{class}" data-method="{}" stroke="{}"{dash} points="{}"/>"#,
            escape(&s.label),
            s.color,
            pts.join(" ")
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="legend" font-family="sans-serif" font-size="12">"#);
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 10.0 + 22.0 * i as f64;
        let dash = if s.reference { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="2"{dash}/>"#,
            RIGHT + 20.0,
            RIGHT + 50.0,
            s.color
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, RIGHT + 58.0, y + 4.0, escape(&s.label));
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Axis range (in plotted units, i.e. log10 for a log axis) and tick positions.
fn y_axis(values: &[f64], log_y: bool) -> (f64, f64, Vec<f64>) {
    let mapped: Vec<f64> = values.iter().map(|&v| if log_y { v.log10() } else { v }).collect();
    let (mut lo, mut hi) = mapped.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if log_y {
        let (lo, hi) = (lo.floor(), hi.ceil().max(lo.floor() + 1.0));
        let ticks = (lo as i32..=hi as i32).map(f64::from).collect();
        return (lo, hi, ticks);
    }
    let (lo, hi) = padded(lo, hi);
    let ticks = (0..=5).map(|i| lo + (hi - lo) * f64::from(i) / 5.0).collect();
    (lo, hi, ticks)
}

fn tick_label(v: f64) -> String {
    let s = format_sig6(v);
    if s.contains('e') || !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names_cover_both_figures() {
        let names: Vec<String> = PlotMetric::ALL.iter().map(|m| m.file_name()).collect();
        assert_eq!(names[0], "fig3a_po.svg");
        assert_eq!(names[2], "fig3c_rt.svg");
        assert_eq!(names[9], "fig4e_itse.svg");
        assert_eq!(PlotMetric::ALL.iter().filter(|m| m.log_y()).count(), 1);
    }

    #[test]
    fn reference_csv_parsing() {
        let text = "method,delay,po,mse\nIterative,0.1,12.5,\nIterative,0.01,10,0.02\nOther,0.1,,0.5\n";
        let data = ReferenceData::from_reader(text.as_bytes()).unwrap();
        assert_eq!(data.series.len(), 2);
        let po = data.points(PlotMetric::PercentOvershoot);
        assert_eq!(po, vec![("Iterative", vec![(0.01, 10.0), (0.1, 12.5)])]);
        assert_eq!(data.points(PlotMetric::Index(ObjectiveKind::Mse)).len(), 2);
        assert!(ReferenceData::from_reader("delay,po\n0.1,1\n".as_bytes()).is_err());
        assert!(ReferenceData::from_reader("method,delay,po\nA,x,1\n".as_bytes()).is_err());
    }

    #[test]
    fn tick_labels_are_short() {
        assert_eq!(tick_label(0.25), "0.25");
        assert_eq!(tick_label(1.0), "1");
        assert_eq!(tick_label(0.075), "0.075");
        assert_eq!(tick_label(1e-5), "1.00000e-5");
    }

    #[test]
    fn too_few_delays_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_plots(&SweepReport::empty(), dir.path(), None).is_err());
    }
}
