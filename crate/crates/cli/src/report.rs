//! Agreement report: checks exact-vs-Monte-Carlo concordance across the
//! CSVs of a run directory.
//!
//! A sweep point agrees when |exact - mc| <= mc_half_width. A healthy
//! run at 3 sigma should pass at least 99% of points.

use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Malformed(String),
}

#[derive(Debug, Clone)]
pub struct FileReport {
    pub name: String,
    pub points: usize,
    pub flagged: Vec<(f64, f64, f64, f64)>, // (sweep, exact, mc, half_width)
    /// Points whose half-width could not resolve the metric.
    pub underresolved: usize,
}

impl FileReport {
    pub fn pass_rate(&self) -> f64 {
        if self.points == 0 {
            return 0.0;
        }
        1.0 - self.flagged.len() as f64 / self.points as f64
    }
}

/// Parse one CSV and compare its exact and mc columns.
pub fn check_csv(path: &Path) -> Result<Option<FileReport>, ReportError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| ReportError::Malformed(format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.split(',').collect();
    let find = |name: &str| cols.iter().position(|c| *c == name);
    let (Some(exact_i), Some(mc_i), Some(hw_i)) =
        (find("exact"), find("mc"), find("mc_half_width"))
    else {
        // Not an exact-vs-mc table; nothing to check.
        return Ok(None);
    };
    let mut report = FileReport {
        name: path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        points: 0,
        flagged: Vec::new(),
        underresolved: 0,
    };
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> Result<f64, ReportError> {
            cells
                .get(i)
                .ok_or_else(|| {
                    ReportError::Malformed(format!(
                        "{}: line {} lacks column {}",
                        path.display(),
                        ln + 2,
                        i
                    ))
                })?
                .parse::<f64>()
                .map_err(|e| {
                    ReportError::Malformed(format!("{}: line {}: {e}", path.display(), ln + 2))
                })
        };
        let sweep = get(0)?;
        let exact = get(exact_i)?;
        let mc = get(mc_i)?;
        let hw = get(hw_i)?;
        if !exact.is_finite() || !mc.is_finite() || !hw.is_finite() {
            continue;
        }
        report.points += 1;
        if hw >= mc.abs() && mc != 0.0 || (mc == 0.0 && exact > 0.0 && hw == 0.0) {
            report.underresolved += 1;
        }
        // Representation-noise floor keeps saturated points (both
        // columns pinned at the same value) from being flagged.
        let tol = hw + 1e-12 * exact.abs().max(mc.abs()).max(1.0);
        if (exact - mc).abs() > tol {
            report.flagged.push((sweep, exact, mc, hw));
        }
    }
    if report.points == 0 {
        return Err(ReportError::Malformed(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(Some(report))
}

/// Check every CSV in a directory; returns the per-file reports.
pub fn check_dir(dir: &Path) -> Result<Vec<FileReport>, ReportError> {
    let mut reports = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|e| e == "csv").unwrap_or(false))
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(ReportError::Malformed(format!(
            "{}: no CSV files found",
            dir.display()
        )));
    }
    for path in entries {
        if let Some(r) = check_csv(&path)? {
            reports.push(r);
        }
    }
    Ok(reports)
}

/// Render the textual summary; returns (text, overall pass rate).
pub fn summarize(reports: &[FileReport]) -> (String, f64) {
    use std::fmt::Write;
    let mut out = String::new();
    let mut total = 0usize;
    let mut flagged = 0usize;
    for r in reports {
        total += r.points;
        flagged += r.flagged.len();
        let _ = writeln!(
            out,
            "{}: {}/{} points agree ({:.1}%){}",
            r.name,
            r.points - r.flagged.len(),
            r.points,
            100.0 * r.pass_rate(),
            if r.underresolved > 0 {
                format!(", {} under-resolved", r.underresolved)
            } else {
                String::new()
            }
        );
        for (sweep, exact, mc, hw) in &r.flagged {
            let _ = writeln!(
                out,
                "  flagged: sweep={sweep:.6} exact={exact:.6e} mc={mc:.6e} half_width={hw:.2e}"
            );
        }
    }
    let rate = if total == 0 { 0.0 } else { 1.0 - flagged as f64 / total as f64 };
    let _ = writeln!(
        out,
        "overall: {}/{} points agree ({:.2}%)",
        total - flagged,
        total,
        100.0 * rate
    );
    (out, rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("hoplab_report_tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn healthy_csv_passes() {
        let p = write_temp(
            "healthy.csv",
            "eirp_dbm,exact,mc,mc_half_width\n0,1.0e-1,1.001e-1,5e-3\n10,2e-2,1.96e-2,5e-4\n",
        );
        let r = check_csv(&p).unwrap().unwrap();
        assert_eq!(r.points, 2);
        assert!(r.flagged.is_empty());
        assert_eq!(r.pass_rate(), 1.0);
    }

    #[test]
    fn corrupted_exact_flagged() {
        let p = write_temp(
            "corrupt.csv",
            "eirp_dbm,exact,mc,mc_half_width\n0,9.0e-1,1.0e-1,5e-3\n",
        );
        let r = check_csv(&p).unwrap().unwrap();
        assert_eq!(r.flagged.len(), 1);
    }

    #[test]
    fn empty_csv_rejected() {
        let p = write_temp("empty.csv", "eirp_dbm,exact,mc,mc_half_width\n");
        assert!(check_csv(&p).is_err());
        let p = write_temp("really_empty.csv", "");
        assert!(check_csv(&p).is_err());
    }

    #[test]
    fn non_mc_tables_skipped() {
        let p = write_temp("exact_only.csv", "eirp_dbm,exact\n0,1.0\n");
        assert!(check_csv(&p).unwrap().is_none());
    }
}
