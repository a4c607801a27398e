//! Output rendering: aligned text tables, machine-readable JSON-line
//! records, and the cell-diff bookkeeping shared by the table and verify
//! commands.

use std::fmt::Write as _;

/// Output style selected by `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Records,
}

/// A simple column-aligned table.
pub struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        TextTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: Into<String>>(&mut self, cells: Vec<S>) {
        let cells: Vec<String> = cells.into_iter().map(Into::into).collect();
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut width = vec![0usize; cols];
        for row in std::iter::once(&self.header).chain(&self.rows) {
            for (i, cell) in row.iter().enumerate() {
                width[i] = width[i].max(cell.len());
            }
        }
        let mut out = String::new();
        let emit = |row: &[String], out: &mut String| {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                let _ = write!(out, "{cell:>w$}", w = width[i]);
            }
            out.push('\n');
        };
        emit(&self.header, &mut out);
        let rule: usize = width.iter().sum::<usize>() + 2 * (cols - 1);
        let _ = writeln!(out, "{}", "-".repeat(rule));
        for row in &self.rows {
            emit(row, &mut out);
        }
        out
    }
}

/// Collects pass/fail outcomes of individual checks or table cells.
#[derive(Default)]
pub struct DiffLog {
    pub mismatches: Vec<String>,
    pub checks: usize,
}

impl DiffLog {
    pub fn new() -> Self {
        DiffLog::default()
    }

    /// Registers one comparison; records a mismatch message when unequal.
    pub fn compare<T: PartialEq + std::fmt::Display>(&mut self, what: &str, got: T, want: T) {
        self.checks += 1;
        if got != want {
            self.mismatches
                .push(format!("{what}: computed {got}, reference {want}"));
        }
    }

    pub fn check(&mut self, what: &str, ok: bool) {
        self.checks += 1;
        if !ok {
            self.mismatches.push(what.to_string());
        }
    }

    pub fn all_ok(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn summary(&self, subject: &str) -> String {
        if self.all_ok() {
            format!("{subject}: {} checks, all match", self.checks)
        } else {
            let mut out = String::new();
            for m in &self.mismatches {
                let _ = writeln!(out, "MISMATCH {m}");
            }
            let _ = write!(
                out,
                "{subject}: {} of {} checks failed",
                self.mismatches.len(),
                self.checks
            );
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_alignment() {
        let mut t = TextTable::new(vec!["a", "bbb"]);
        t.row(vec!["10", "2"]);
        t.row(vec!["3", "4000"]);
        let s = t.render();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], " a   bbb");
        assert_eq!(lines[2], "10     2");
        assert_eq!(lines[3], " 3  4000");
    }

    #[test]
    fn diff_log_counts() {
        let mut log = DiffLog::new();
        log.compare("x", 1, 1);
        log.compare("y", 2, 3);
        log.check("z", true);
        assert!(!log.all_ok());
        assert_eq!(log.checks, 3);
        assert!(log.summary("t").contains("1 of 3"));
    }
}
