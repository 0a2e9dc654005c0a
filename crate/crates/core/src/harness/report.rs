use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::SweepConfig;
use super::sweep::{CellStatus, ErrorReport, Row, Selection};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 13] = [
    "model", "method", "eps", "rho", "dt", "zeta", "eta", "eta_C", "K_s", "K_r", "error", "wall_ms", "status",
];

pub const CSV_FILE: &str = "results.csv";
pub const JSON_FILE: &str = "results.json";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn record(row: &Row) -> [String; 13] {
    [
        row.model.label().to_string(),
        row.method.label().to_string(),
        row.eps.to_string(),
        opt(row.rho),
        row.dt.to_string(),
        row.zeta.to_string(),
        row.eta.to_string(),
        opt(row.eta_c),
        row.k_s.to_string(),
        row.k_r.to_string(),
        row.error.to_string(),
        row.wall_ms.to_string(),
        match row.status {
            CellStatus::Ok => "ok",
            CellStatus::Failed => "failed",
        }
        .to_string(),
    ]
}

/// Rows as CSV text with the fixed header, in the order given.
pub fn to_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::Config(format!("csv encoding failed: {e}"));
    w.write_record(CSV_HEADER).map_err(wrap)?;
    for row in rows {
        w.write_record(record(row)).map_err(wrap)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("csv encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

#[derive(Serialize)]
struct Sidecar<'a> {
    configs: &'a [SweepConfig],
    selections: &'a [Selection],
}

/// Resolved configs and window selections as pretty JSON.
pub fn to_json(configs: &[SweepConfig], report: &ErrorReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Sidecar {
        configs,
        selections: &report.selections,
    })?)
}

/// Writes the CSV and its JSON sidecar into `dir`, creating it if needed.
pub fn write_report(dir: &Path, configs: &[SweepConfig], report: &ErrorReport) -> Result<(PathBuf, PathBuf)> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join(CSV_FILE);
    let json_path = dir.join(JSON_FILE);
    fs::write(&csv_path, to_csv(&report.rows)?).map_err(io(&csv_path))?;
    fs::write(&json_path, to_json(configs, report)? + "\n").map_err(io(&json_path))?;
    Ok((csv_path, json_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{Method, ModelId};

    fn row(error: f64, status: CellStatus) -> Row {
        Row {
            model: ModelId::Rswe,
            method: Method::MeanCorrectedLocal,
            eps: 0.05,
            rho: None,
            dt: 0.2,
            zeta: 0.35,
            eta: 0.07,
            eta_c: Some(0.15),
            k_s: 8,
            k_r: 12,
            error,
            wall_ms: 3,
            status,
        }
    }

    #[test]
    fn header_is_exact() {
        let text = to_csv(&[]).unwrap();
        assert_eq!(text, "model,method,eps,rho,dt,zeta,eta,eta_C,K_s,K_r,error,wall_ms,status\n");
    }

    #[test]
    fn rows_render_plainly() {
        let text = to_csv(&[row(0.0125, CellStatus::Ok), row(f64::INFINITY, CellStatus::Failed)]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "rswe,mc-local,0.05,,0.2,0.35,0.07,0.15,8,12,0.0125,3,ok");
        assert_eq!(lines[2], "rswe,mc-local,0.05,,0.2,0.35,0.07,0.15,8,12,inf,3,failed");
    }

    #[test]
    fn writes_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested");
        let report = ErrorReport {
            rows: vec![row(1.0, CellStatus::Ok)],
            selections: vec![],
        };
        let cfg = SweepConfig::defaults(ModelId::Rswe, Method::MeanCorrectedLocal);
        let (c, j) = write_report(&out, std::slice::from_ref(&cfg), &report).unwrap();
        assert_eq!(fs::read_to_string(c).unwrap().lines().count(), 2);
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(j).unwrap()).unwrap();
        assert_eq!(v["configs"][0]["model"], "rswe");
        assert_eq!(SweepConfig::from_json_value(&v["configs"][0]).unwrap(), cfg);
    }
}
