//! Aligned-text and tab-separated report rendering.

use super::{output_error, PipelineError};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
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

    /// Columns padded to their widest cell, separated by two spaces.
    pub fn render_aligned(&self) -> String {
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|j| {
                std::iter::once(&self.headers[j])
                    .chain(self.rows.iter().map(|r| &r[j]))
                    .map(|c| c.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (j, c) in cells.iter().enumerate() {
                if j > 0 {
                    s.push_str("  ");
                }
                s.push_str(c);
                s.extend(std::iter::repeat_n(' ', widths[j] - c.chars().count()));
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.headers);
        let rule: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
        out.push_str(&"-".repeat(rule));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }

    pub fn render_tsv(&self) -> String {
        let clean = |c: &String| c.replace(['\t', '\n'], " ");
        let mut out = self.headers.iter().map(clean).collect::<Vec<_>>().join("\t") + "\n";
        for r in &self.rows {
            out.push_str(&(r.iter().map(clean).collect::<Vec<_>>().join("\t") + "\n"));
        }
        out
    }
}

/// A named report: header facts, a main table and free-text sections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    /// File stem under `reports/`.
    pub name: String,
    pub title: String,
    /// `key: value` lines; always includes the config hash.
    pub meta: Vec<(String, String)>,
    pub table: Table,
    /// Machine-readable table; the main table when `None`.
    pub tsv: Option<Table>,
    pub sections: Vec<(String, Vec<String>)>,
}

impl Report {
    pub fn new(name: &str, title: &str, config_hash: &str) -> Self {
        Self {
            name: name.to_string(),
            title: title.to_string(),
            meta: vec![("config_hash".into(), config_hash.to_string())],
            ..Default::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{}\n", self.title);
        for (k, v) in &self.meta {
            out.push_str(&format!("{k}: {v}\n"));
        }
        out.push('\n');
        out.push_str(&self.table.render_aligned());
        for (heading, lines) in &self.sections {
            out.push_str(&format!("\n{heading}\n"));
            for l in lines {
                out.push_str(&format!("  {l}\n"));
            }
        }
        out
    }

    pub fn render_tsv(&self) -> String {
        let mut out = format!("# {}\n", self.title);
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}\t{v}\n"));
        }
        out.push_str(&self.tsv.as_ref().unwrap_or(&self.table).render_tsv());
        out
    }

    /// Write `<name>.txt` and `<name>.tsv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf), PipelineError> {
        std::fs::create_dir_all(dir).map_err(output_error(dir))?;
        let txt = dir.join(format!("{}.txt", self.name));
        let tsv = dir.join(format!("{}.tsv", self.name));
        std::fs::write(&txt, self.render_text()).map_err(output_error(&txt))?;
        std::fs::write(&tsv, self.render_tsv()).map_err(output_error(&tsv))?;
        Ok((txt, tsv))
    }
}

/// Percentage with two decimals.
pub(crate) fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

pub(crate) fn opt(x: Option<f64>, f: impl Fn(f64) -> String) -> String {
    x.map_or_else(|| "-".to_string(), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_columns() {
        let mut t = Table::new(["Vowels", "TSS"]);
        t.push(vec!["all (s, l, ll, ls)".into(), "1.98".into()]);
        t.push(vec!["a (s)".into(), "1.90".into()]);
        let text = t.render_aligned();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "Vowels              TSS");
        assert_eq!(lines[3], "a (s)               1.90");
        assert!(lines[1].chars().all(|c| c == '-'));
    }

    #[test]
    fn tsv_escapes_separators() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["x\ty".into(), "z".into()]);
        assert_eq!(t.render_tsv(), "a\tb\nx y\tz\n");
    }

    #[test]
    fn report_carries_hash() {
        let r = Report::new("classify", "Classification", "abc").meta("seed", 7);
        assert!(r.render_text().contains("config_hash: abc\nseed: 7\n"));
        assert!(r.render_tsv().starts_with("# Classification\n# config_hash\tabc\n# seed\t7\n"));
    }
}
