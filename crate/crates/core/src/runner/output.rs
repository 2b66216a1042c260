//! Result rows, plot-data files and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const RESULTS_HEADER: &str = "experiment_id,kind,quantity,value,stderr,aux1,aux2,seed";

/// Fixed 17-significant-digit rendering so reruns are byte-identical.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub quantity: String,
    pub value: f64,
    pub stderr: f64,
    pub aux1: String,
    pub aux2: String,
}

impl ResultRow {
    pub fn new(quantity: impl Into<String>, value: f64, stderr: f64) -> Self {
        Self { quantity: quantity.into(), value, stderr, aux1: String::new(), aux2: String::new() }
    }

    pub fn aux(mut self, aux1: impl Into<String>, aux2: impl Into<String>) -> Self {
        self.aux1 = aux1.into();
        self.aux2 = aux2.into();
        self
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_results(id: &str, kind: &str, seed: u64, rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(id),
            kind,
            csv_field(&r.quantity),
            fmt17(r.value),
            fmt17(r.stderr),
            csv_field(&r.aux1),
            csv_field(&r.aux2),
            seed
        );
    }
    out
}

/// Named columns for a plot-data file.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl PlotSeries {
    pub fn new(columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows }
    }
}

/// Whitespace-separated columns under a `#` header line.
pub fn emit_plotdata(series: &PlotSeries, path: impl AsRef<Path>) -> Result<()> {
    if series.rows.is_empty() || series.columns.is_empty() {
        return Err(Error::Argument("plot series is empty".into()));
    }
    if series.rows.iter().any(|r| r.len() != series.columns.len()) {
        return Err(Error::Argument("plot rows and header differ in width".into()));
    }
    let mut text = format!("# {}\n", series.columns.join(" "));
    for row in &series.rows {
        let cells: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
        text.push_str(&cells.join(" "));
        text.push('\n');
    }
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Everything needed to reproduce a run and judge its numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_hash: String,
    pub version: String,
    pub experiment_id: String,
    pub kind: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub tolerances: Vec<(String, String)>,
    /// `(quantity, method and fit window)`.
    pub provenance: Vec<(String, String)>,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "config_hash = {}", self.config_hash);
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "experiment_id = {}", self.experiment_id);
        let _ = writeln!(s, "kind = {}", self.kind);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "wall_time_s = {:.3}", self.wall_time_s);
        s.push_str("\n[tolerances]\n");
        for (k, v) in &self.tolerances {
            let _ = writeln!(s, "{k} = {v}");
        }
        s.push_str("\n[provenance]\n");
        for (k, v) in &self.provenance {
            let _ = writeln!(s, "{k} = {v}");
        }
        s.push_str("\n[files]\n");
        for f in &self.files {
            let _ = writeln!(s, "{f}");
        }
        s
    }
}

/// Files written so far; removed again unless the run is committed.
#[derive(Debug)]
pub(crate) struct Staging {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
    committed: bool,
}

impl Staging {
    pub fn open(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), created_dir, files: vec![], committed: false })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }

    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(f64::NAN), "NaN");
        let v = 1.0 / 3.0;
        assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn plotdata_rules() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("hits.dat");
        let s = PlotSeries::new(&["r", "freq", "lo", "hi"], vec![vec![0.5, 0.2, 0.1, 0.3], vec![0.25, 0.1, 0.05, 0.2]]);
        emit_plotdata(&s, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# r freq lo hi\n"));
        assert_eq!(text.lines().nth(1).unwrap().split_whitespace().count(), 4);
        let empty = PlotSeries::new(&["r", "N"], vec![]);
        assert!(matches!(emit_plotdata(&empty, dir.path().join("e.dat")), Err(Error::Argument(_))));
        assert!(emit_plotdata(&s, dir.path().join("missing/x.dat")).is_err());
    }

    #[test]
    fn csv_quoting() {
        let rows = [ResultRow::new("q", 1.0, 0.0).aux("a,b", "")];
        let t = render_results("id", "simulate", 3, &rows);
        assert!(t.lines().nth(1).unwrap().contains("\"a,b\""));
    }
}
