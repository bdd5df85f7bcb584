//! Plain CSV: header row, comma separated, LF line endings, every float
//! printed with 17 significant digits so that re-reading is bit-exact.

use std::io::{self, BufRead, Write};

use crate::run::OrderRun;

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn header(state_labels: &[&str], run: &OrderRun) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(state_labels.iter().map(|s| s.to_string()));
    h.extend(run.functionals.iter().map(|f| f.label.clone()));
    h.extend(run.functionals.iter().map(|f| format!("dcaputo_{}", f.label)));
    h
}

/// Node indices kept when a file is limited to `max_rows` data rows; the
/// first and last node are always present.
pub fn thin_indices(n_nodes: usize, max_rows: Option<usize>) -> Vec<usize> {
    match max_rows {
        Some(m) if m < n_nodes => {
            let last = n_nodes - 1;
            let mut idx: Vec<usize> = (0..m).map(|r| r * last / (m - 1)).collect();
            idx.dedup();
            idx
        }
        _ => (0..n_nodes).collect(),
    }
}

pub fn write_run<W: Write>(mut w: W, state_labels: &[&str], run: &OrderRun, max_rows: Option<usize>) -> io::Result<()> {
    writeln!(w, "{}", header(state_labels, run).join(","))?;
    let traj = &run.trajectory;
    let mut line = String::new();
    for k in thin_indices(traj.len(), max_rows) {
        line.clear();
        line.push_str(&format_value(traj.grid.time(k)));
        let cols = traj
            .state(k)
            .iter()
            .chain(run.functionals.iter().map(|f| &f.values.values[k]))
            .chain(run.functionals.iter().map(|f| &f.caputo.values[k]));
        for v in cols {
            line.push(',');
            line.push_str(&format_value(*v));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

pub fn read_table<R: BufRead>(r: R) -> Result<Table, String> {
    let mut lines = r.lines();
    let header: Vec<String> = match lines.next() {
        Some(l) => l.map_err(|e| e.to_string())?.split(',').map(str::to_string).collect(),
        None => return Err("empty file".into()),
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| format!("line {}: {e}", i + 2)))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != header.len() {
            return Err(format!(
                "line {}: expected {} fields, got {}",
                i + 2,
                header.len(),
                row.len()
            ));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}
