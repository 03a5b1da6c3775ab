//! Rendering of command results as JSON, CSV or an aligned text table.
//!
//! CSV uses a comma separator, a header row and `.` as decimal point. Exact
//! big integers are written as decimal strings in every format.

use serde::Serialize;

use rfib_core::counting::CountingContext;
use rfib_core::{ChainSample, EntropyReport, Error, WordSet};

use crate::config::Format;
use crate::verify::SuiteReport;

/// A row that can be written as CSV or as a text table.
pub trait TableRow: Serialize {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

pub fn render_table<R: TableRow>(rows: &[R], format: Format) -> anyhow::Result<String> {
    match format {
        Format::Json => json(&rows),
        Format::Csv => csv_table(R::header(), rows.iter().map(R::cells)),
        Format::Text => Ok(text_table(R::header(), rows.iter().map(R::cells))),
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_table<I: Iterator<Item = Vec<String>>>(header: &[&str], rows: I) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn text_table<I: Iterator<Item = Vec<String>>>(header: &[&str], rows: I) -> String {
    let rows: Vec<Vec<String>> = rows.collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in &rows {
        out += &line(r.iter().map(String::as_str).collect());
    }
    out
}

/// Header written before an enumerated set.
#[derive(Debug, Clone, Serialize)]
pub struct EnumerationHeader {
    pub m: u32,
    pub n: usize,
    pub l_n: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorHeader {
    pub m: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub length: usize,
    pub count: usize,
}

/// `text`: the header as one JSON line followed by the words, one per line.
/// `json`: the header object with a `words` array. `csv`: a `word` column.
pub fn render_set<H: Serialize>(header: &H, set: &WordSet, format: Format) -> anyhow::Result<String> {
    let words = set.iter().map(|w| format!("{w:#}"));
    match format {
        Format::Text => {
            let mut out = serde_json::to_string(header)?;
            out.push('\n');
            for w in words {
                out += &w;
                out.push('\n');
            }
            Ok(out)
        }
        Format::Json => {
            let mut value = serde_json::to_value(header)?;
            value["words"] = words.collect::<Vec<_>>().into();
            json(&value)
        }
        Format::Csv => csv_table(&["word"], words.map(|w| vec![w])),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountRow {
    pub n: usize,
    pub l_n: String,
    pub d_n: String,
    /// Empty when the exact value is above the digit cap.
    pub count_a: String,
    pub log10_count_a: f64,
}

impl TableRow for CountRow {
    fn header() -> &'static [&'static str] {
        &["n", "l_n", "d_n", "count_a", "log10_count_a"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.l_n.clone(),
            self.d_n.clone(),
            self.count_a.clone(),
            self.log10_count_a.to_string(),
        ]
    }
}

/// Rows `1..=n_max` of the counting sequences.
pub fn count_rows(ctx: &mut CountingContext, n_max: usize) -> anyhow::Result<Vec<CountRow>> {
    (1..=n_max)
        .map(|n| {
            let count_a = match ctx.count_a_closed(n) {
                Ok(c) => c.to_string(),
                Err(Error::DigitCapExceeded { .. }) => String::new(),
                Err(e) => return Err(e.into()),
            };
            Ok(CountRow {
                n,
                l_n: ctx.length(n).to_string(),
                d_n: ctx.d(n).to_string(),
                count_a,
                log10_count_a: ctx.log_count_a(n) / std::f64::consts::LN_10,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyTableRow {
    pub n: usize,
    pub l_n: String,
    pub h_a: f64,
    pub h_f: Option<f64>,
    pub gap_bound: f64,
}

impl TableRow for EntropyTableRow {
    fn header() -> &'static [&'static str] {
        &["n", "l_n", "h_a", "h_f", "gap_bound"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.l_n.clone(),
            self.h_a.to_string(),
            self.h_f.map(|h| h.to_string()).unwrap_or_default(),
            self.gap_bound.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
struct EntropyDocument<'a> {
    m: u32,
    tol: f64,
    n_cap: usize,
    estimate: f64,
    estimate_log2: f64,
    n_reached: usize,
    converged: bool,
    monotone: bool,
    rows: &'a [EntropyTableRow],
}

/// Entropies are natural logarithms; the text summary adds the base-2 estimate.
pub fn render_entropy(report: &EntropyReport, format: Format) -> anyhow::Result<String> {
    let rows: Vec<EntropyTableRow> = report
        .rows
        .iter()
        .map(|r| EntropyTableRow {
            n: r.n,
            l_n: r.l_n.to_string(),
            h_a: r.h_a,
            h_f: r.h_f,
            gap_bound: r.gap_bound,
        })
        .collect();
    match format {
        Format::Json => json(&EntropyDocument {
            m: report.m,
            tol: report.tol,
            n_cap: report.n_cap,
            estimate: report.estimate,
            estimate_log2: report.estimate_log2(),
            n_reached: report.n_reached,
            converged: report.converged,
            monotone: report.monotone,
            rows: &rows,
        }),
        Format::Csv => render_table(&rows, Format::Csv),
        Format::Text => {
            let mut out = format!(
                "m = {}  estimate = {} nats ({} bits)  n = {}  converged = {}  monotone = {}\n",
                report.m,
                report.estimate,
                report.estimate_log2(),
                report.n_reached,
                report.converged,
                report.monotone
            );
            out += &render_table(&rows, Format::Text)?;
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRow {
    pub trial: u64,
    pub word: String,
    pub choice_log: Vec<u32>,
}

impl From<&ChainSample> for SampleRow {
    fn from(s: &ChainSample) -> Self {
        SampleRow {
            trial: s.stream,
            word: s.word.to_string(),
            choice_log: s.choice_log.clone(),
        }
    }
}

impl TableRow for SampleRow {
    fn header() -> &'static [&'static str] {
        &["trial", "word", "choice_log"]
    }

    fn cells(&self) -> Vec<String> {
        let log: Vec<String> = self.choice_log.iter().map(u32::to_string).collect();
        vec![self.trial.to_string(), self.word.clone(), log.join(" ")]
    }
}

/// `text` writes just the words, one per line.
pub fn render_samples(rows: &[SampleRow], format: Format) -> anyhow::Result<String> {
    match format {
        Format::Text => Ok(rows.iter().map(|r| r.word.clone() + "\n").collect()),
        _ => render_table(rows, format),
    }
}

fn suite_rows(report: &SuiteReport) -> Vec<Vec<String>> {
    report
        .points()
        .map(|(check, p)| {
            let values: Vec<String> = p.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let witnesses: Vec<String> = p.witnesses.iter().map(|w| format!("{}:{}", w.side, w.word)).collect();
            let mut row = vec![
                check.id.to_string(),
                check.spec.check.name().to_string(),
                p.point.m.to_string(),
                p.point.n.to_string(),
                p.point.k.map(|k| k.to_string()).unwrap_or_default(),
                p.outcome.as_str().to_string(),
                values.join(";"),
                witnesses.join(";"),
                p.note.clone().unwrap_or_default(),
            ];
            if let Some(ms) = p.elapsed_ms {
                row.push(format!("{ms:.3}"));
            }
            row
        })
        .collect()
}

pub fn render_suite(report: &SuiteReport, format: Format) -> anyhow::Result<String> {
    let timed = report.points().any(|(_, p)| p.elapsed_ms.is_some());
    let mut header = vec!["id", "check", "m", "n", "k", "outcome", "values", "witnesses", "note"];
    if timed {
        header.push("elapsed_ms");
    }
    match format {
        Format::Json => json(report),
        Format::Csv => csv_table(&header, suite_rows(report).into_iter()),
        Format::Text => {
            let mut out = text_table(&header, suite_rows(report).into_iter());
            let s = &report.summary;
            out += &format!(
                "\n{} pass, {} fail, {} expected exception, {} skipped over budget: {}\n",
                s.pass,
                s.fail,
                s.expected_exception,
                s.skipped_over_budget,
                if report.success { "ok" } else { "FAILED" }
            );
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_rows_and_csv() {
        let mut ctx = CountingContext::new(1);
        let rows = count_rows(&mut ctx, 9).unwrap();
        let counts: Vec<&str> = rows.iter().map(|r| r.count_a.as_str()).collect();
        assert_eq!(counts, ["1", "1", "2", "3", "8", "30", "288", "10080", "3317760"]);
        let csv = render_table(&rows, Format::Csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,l_n,d_n,count_a,log10_count_a"));
        assert!(lines.next().unwrap().starts_with("1,1,1,1,0"));
    }

    #[test]
    fn blank_count_above_digit_cap() {
        let mut ctx = CountingContext::new(1).with_digit_cap(5);
        let rows = count_rows(&mut ctx, 12).unwrap();
        assert_eq!(rows[8].count_a, "");
        assert!(rows[8].log10_count_a > 6.0);
    }

    #[test]
    fn set_formats() {
        let set = WordSet::parse("011\n101\n110", Some(3)).unwrap();
        let header = EnumerationHeader { m: 1, n: 4, l_n: 3, count: 3 };
        let text = render_set(&header, &set, Format::Text).unwrap();
        assert_eq!(text, "{\"m\":1,\"n\":4,\"l_n\":3,\"count\":3}\n011\n101\n110\n");
        let json: serde_json::Value = serde_json::from_str(&render_set(&header, &set, Format::Json).unwrap()).unwrap();
        assert_eq!(json["count"], 3);
        assert_eq!(json["words"][2], "110");
        assert_eq!(render_set(&header, &set, Format::Csv).unwrap(), "word\n011\n101\n110\n");
    }

    #[test]
    fn text_table_alignment() {
        let t = text_table(&["a", "bb"], vec![vec!["123".into(), "x".into()]].into_iter());
        assert_eq!(t, "a    bb\n123  x\n");
    }
}
