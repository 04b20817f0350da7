//! CSV outputs. Every file has a fixed header row.

use std::path::Path;

use inr_core::{Matrix, RunReport};

pub type CsvResult<T> = Result<T, csv::Error>;

/// `epoch,lr,loss,seconds`
pub fn write_loss_history(path: &Path, report: &RunReport) -> CsvResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["epoch", "lr", "loss", "seconds"])?;
    for r in &report.history {
        w.write_record([
            r.epoch.to_string(),
            r.lr.to_string(),
            r.loss.to_string(),
            r.seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `metric,value`
pub fn write_metrics(path: &Path, metrics: &[(&str, f64)]) -> CsvResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["metric", "value"])?;
    for (name, value) in metrics {
        w.write_record([name.to_string(), value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Header `n0..n{K-1}`, then one row per covariance row.
pub fn write_matrix(path: &Path, m: &Matrix) -> CsvResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record((0..m.cols()).map(|c| format!("n{c}")))?;
    for r in 0..m.rows() {
        w.write_record(m.row(r).iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub final_loss: f64,
    pub mse: f64,
    /// PSNR for image tasks, IoU for shapes, absent for audio.
    pub quality: Option<f64>,
    pub seconds: f64,
    pub param_count: usize,
}

/// `value,final_loss,mse,quality,seconds,param_count`
pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> CsvResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["value", "final_loss", "mse", "quality", "seconds", "param_count"])?;
    for r in rows {
        w.write_record([
            r.value.to_string(),
            r.final_loss.to_string(),
            r.mse.to_string(),
            r.quality.map(|q| q.to_string()).unwrap_or_default(),
            r.seconds.to_string(),
            r.param_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
