//! Plain tables with CSV and Markdown output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::solver::PreconditionerKind;

use super::studies::{ConditionRow, DeltaRow, IterationCount, LevelRow};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn sci(x: f64) -> String {
    format!("{x:.4e}")
}

fn fixed(x: f64) -> String {
    format!("{x:.2}")
}

fn opt(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_else(|| "-".to_string())
}

fn kinds_of(counts: &[&[IterationCount]]) -> Vec<PreconditionerKind> {
    let mut kinds = Vec::new();
    for c in counts.iter().flat_map(|c| c.iter()) {
        if !kinds.contains(&c.preconditioner) {
            kinds.push(c.preconditioner);
        }
    }
    kinds
}

fn iteration_cells(counts: &[IterationCount], kinds: &[PreconditionerKind]) -> Vec<String> {
    kinds
        .iter()
        .map(|k| {
            counts
                .iter()
                .find(|c| c.preconditioner == *k)
                .map_or_else(|| "-".to_string(), |c| c.iterations.to_string())
        })
        .collect()
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn from_levels(rows: &[LevelRow]) -> Self {
        let counts: Vec<&[IterationCount]> = rows.iter().map(|r| r.iterations.as_slice()).collect();
        let kinds = kinds_of(&counts);
        let mut headers: Vec<String> = [
            "level", "n0", "n1", "L2", "L2 order", "H1", "H1 order", "H1 semi", "kappa",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        headers.extend(kinds.iter().map(|k| k.label().to_string()));
        let mut t = Table {
            headers,
            rows: Vec::new(),
        };
        for r in rows {
            let mut cells = vec![
                r.level.to_string(),
                r.n0.to_string(),
                r.n1.to_string(),
                opt(r.errors.map(|e| e.l2), sci),
                opt(r.l2_order, fixed),
                opt(r.errors.map(|e| e.h1), sci),
                opt(r.h1_order, fixed),
                opt(r.errors.map(|e| e.h1_seminorm), sci),
                opt(r.kappa, sci),
            ];
            cells.extend(iteration_cells(&r.iterations, &kinds));
            t.push(cells);
        }
        t
    }

    pub fn from_deltas(rows: &[DeltaRow]) -> Self {
        let counts: Vec<&[IterationCount]> = rows.iter().map(|r| r.iterations.as_slice()).collect();
        let kinds = kinds_of(&counts);
        let mut headers: Vec<String> = ["delta", "n0", "n1", "kappa"]
            .into_iter()
            .map(String::from)
            .collect();
        headers.extend(kinds.iter().map(|k| k.label().to_string()));
        let mut t = Table {
            headers,
            rows: Vec::new(),
        };
        for r in rows {
            let mut cells = vec![
                format!("{}", r.delta),
                r.n0.to_string(),
                r.n1.to_string(),
                opt(r.kappa, sci),
            ];
            cells.extend(iteration_cells(&r.iterations, &kinds));
            t.push(cells);
        }
        t
    }

    pub fn from_conditions(rows: &[ConditionRow]) -> Self {
        let mut t = Table::new([
            "level",
            "delta",
            "n0",
            "n1",
            "kappa(A_hat)",
            "kappa(D_A^-1 A_hat)",
            "kappa(D1^-1/2 A1 D1^-1/2)",
            "converged",
        ]);
        for r in rows {
            t.push(vec![
                r.level.to_string(),
                r.delta.map_or_else(|| "-".to_string(), |d| d.to_string()),
                r.n0.to_string(),
                r.n1.to_string(),
                sci(r.kappa_a),
                fixed(r.kappa_block),
                fixed(r.kappa_a1_scaled),
                r.converged.to_string(),
            ]);
        }
        t
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_markdown(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len().max(3)).collect();
        for row in &self.rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: &[String]| {
            let inner: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!(" {c:>w$} "))
                .collect();
            format!("|{}|\n", inner.join("|"))
        };
        let mut out = line(&self.headers);
        let rule: Vec<String> = widths
            .iter()
            .map(|w| format!(" {}: ", "-".repeat(w - 1)))
            .collect();
        out.push_str(&format!("|{}|\n", rule.join("|")));
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }
}

pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    std::fs::write(path, table.to_csv()?)?;
    Ok(())
}

pub fn write_markdown(table: &Table, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(table.to_markdown().as_bytes())?;
    w.flush()?;
    Ok(())
}
