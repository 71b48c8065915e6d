//! Plain-text tables in CSV or markdown.

use num_rational::Ratio;

use crate::diffcrypt::{DifferenceDistributionTable, DifferentialCharacteristic, KeyCount};
use crate::evolve::GaRun;
use crate::ga_attack::GaAttackResult;
use crate::nn_attack::KeyErrorTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Table {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// `"12/5000 (0.0024)"`.
pub fn render_ratio(r: &Ratio<u64>) -> String {
    render_fraction(*r.numer(), *r.denom())
}

/// Like [`render_ratio`] but keeps the fraction unreduced.
pub fn render_fraction(numer: u64, denom: u64) -> String {
    let value = if denom == 0 { 0.0 } else { numer as f64 / denom as f64 };
    format!("{numer}/{denom} ({})", trim_float(value))
}

fn trim_float(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_string()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit_report(table: &Table, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            for row in std::iter::once(&table.headers).chain(&table.rows) {
                let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
                out.push_str(&fields.join(","));
                out.push('\n');
            }
        }
        ReportFormat::Markdown => {
            let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
            out.push_str(&line(&table.headers));
            out.push_str(&line(&vec!["---".to_string(); table.headers.len()]));
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|c| c.replace('|', "\\|")).collect();
                out.push_str(&line(&cells));
            }
        }
    }
    out
}

pub fn ga_attack_table(result: &GaAttackResult, hex_digits: usize) -> Table {
    let mut t = Table::new(["generation", "best_solution", "fitness", "percent_of_PD"]);
    for row in &result.rows {
        t.push(vec![
            row.generation.to_string(),
            format!("{:0width$X}", row.best_solution, width = hex_digits),
            render_fraction(row.fitness.right_pairs as u64, row.fitness.pair_total as u64),
            format!("{:.2}", row.fitness.percent_of_pd),
        ]);
    }
    t
}

pub fn ddt_table(ddt: &DifferenceDistributionTable) -> Table {
    let mut headers = vec!["dx".to_string()];
    headers.extend((0..16).map(|dy| format!("{dy:X}")));
    let mut t = Table { headers, rows: Vec::new() };
    for dx in 0..16 {
        let mut row = vec![format!("{dx:X}")];
        row.extend(ddt.counts[dx].iter().map(|c| c.to_string()));
        t.push(row);
    }
    t
}

pub fn characteristic_table(ch: &DifferentialCharacteristic, hex_digits: usize) -> Table {
    let mut t = Table::new(["round", "sbox", "in_diff", "out_diff", "probability"]);
    for a in &ch.active_sboxes {
        t.push(vec![
            a.round.to_string(),
            a.sbox.to_string(),
            format!("{:X}", a.in_diff),
            format!("{:X}", a.out_diff),
            render_ratio(&a.probability),
        ]);
    }
    t.push(vec![
        "total".into(),
        String::new(),
        format!("{:0w$X}", ch.input_difference, w = hex_digits),
        format!("{:0w$X}", ch.target_difference(), w = hex_digits),
        render_ratio(&ch.probability),
    ]);
    t
}

pub fn key_count_table(counts: &[KeyCount], hex_digits: usize, limit: usize) -> Table {
    let mut t = Table::new(["rank", "key", "count"]);
    for (i, kc) in counts.iter().take(limit).enumerate() {
        t.push(vec![(i + 1).to_string(), format!("{:0w$X}", kc.key, w = hex_digits), kc.count.to_string()]);
    }
    t
}

pub fn ga_run_table(run: &GaRun) -> Table {
    let mut t = Table::new(["generation", "best", "best_ever", "mean"]);
    for r in &run.trace {
        t.push(vec![
            r.generation.to_string(),
            format!("{:.4}", r.best.fitness),
            format!("{:.4}", r.best_ever.fitness),
            format!("{:.4}", r.mean_fitness),
        ]);
    }
    t
}

pub fn key_error_table(table: &KeyErrorTable) -> Table {
    let mut t = Table::new(["key", "sse", "training_sse", "bit_accuracy"]);
    for k in 0..table.scores.len() {
        t.push(vec![
            k.to_string(),
            format!("{:.6}", table.scores[k]),
            format!("{:.6}", table.training_sse[k]),
            format!("{:.4}", table.bit_accuracy[k]),
        ]);
    }
    t
}
