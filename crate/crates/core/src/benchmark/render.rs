use std::fmt;
use std::str::FromStr;

use super::metrics::MetricsReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TextTable,
    Csv,
    Structured,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "table" | "text_table" => Ok(ReportFormat::TextTable),
            "csv" => Ok(ReportFormat::Csv),
            "json" | "structured" => Ok(ReportFormat::Structured),
            other => Err(format!("unknown report format `{other}` (expected text, csv or json)")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::TextTable => "text",
            ReportFormat::Csv => "csv",
            ReportFormat::Structured => "json",
        })
    }
}

/// `4.75 (±0.43)`.
pub fn mean_std_cell(mean: f64, std: f64) -> String {
    format!("{mean:.2} (±{std:.2})")
}

fn percent(x: f64) -> String {
    format!("{:.1}%", x * 100.0)
}

/// `1:20;2:3`.
pub fn histogram_cell(report: &MetricsReport) -> String {
    report.attempts_histogram.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(";")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const CSV_HEADER: &str = "schema,normal_form,anomaly_count,trials_run,trials_excluded,accuracy_mean,accuracy_std,detection_rate,elimination_rate,attempts_histogram,mean_tokens";

fn csv(reports: &[MetricsReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let row = [
            csv_field(&r.schema),
            r.normal_form.to_string(),
            r.anomaly_count.to_string(),
            r.trials_run.to_string(),
            r.trials_excluded.to_string(),
            format!("{:.4}", r.accuracy_mean),
            format!("{:.4}", r.accuracy_std),
            format!("{:.4}", r.detection_rate),
            format!("{:.4}", r.elimination_rate),
            histogram_cell(r),
            format!("{:.1}", r.mean_tokens),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn text_table(reports: &[MetricsReport]) -> String {
    let header = ["Schema", "NF", "Trials", "Excluded", "Accuracy", "Detection", "Elimination", "Attempts", "Tokens"];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.schema.clone(),
                r.normal_form.to_string(),
                r.trials_run.to_string(),
                r.trials_excluded.to_string(),
                mean_std_cell(r.accuracy_mean, r.accuracy_std),
                percent(r.detection_rate),
                percent(r.elimination_rate),
                histogram_cell(r),
                format!("{:.0}", r.mean_tokens),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].chars().count()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<String>| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(header.iter().map(|h| h.to_string()).collect());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect()));
    for row in rows {
        out.push_str(&line(row));
    }
    out
}

pub fn render_reports(reports: &[MetricsReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::TextTable => text_table(reports),
        ReportFormat::Csv => csv(reports),
        ReportFormat::Structured => {
            let json = if let [single] = reports {
                serde_json::to_string_pretty(single)
            } else {
                serde_json::to_string_pretty(reports)
            };
            json.expect("report serializes") + "\n"
        }
    }
}

pub fn render_report(report: &MetricsReport, format: ReportFormat) -> String {
    render_reports(std::slice::from_ref(report), format)
}
