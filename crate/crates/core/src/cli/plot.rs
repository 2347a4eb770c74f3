//! CSV plot data written next to each run.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pca::{write_variance_csv, PcaModel};
use crate::selector::{GridSearchResult, SelectionReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    Sweep,
    Grid,
    Variance,
    Timing,
}

/// Records behind one plot.
#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    /// `d,metric,score,selected` in ascending `d`, preceded by a
    /// `# lambda=.. task=.. upper_bound=.. seed=..` comment.
    Sweep(&'a SelectionReport),
    /// `dim,metric,train_s,eval_s`.
    Grid(&'a GridSearchResult),
    /// Same bytes as `pca-report`.
    Variance(&'a PcaModel),
    /// `phase,seconds`.
    Timing(&'a BTreeMap<String, f64>),
}

impl PlotData<'_> {
    pub fn kind(&self) -> PlotKind {
        match self {
            PlotData::Sweep(_) => PlotKind::Sweep,
            PlotData::Grid(_) => PlotKind::Grid,
            PlotData::Variance(_) => PlotKind::Variance,
            PlotData::Timing(_) => PlotKind::Timing,
        }
    }
}

fn empty(what: &str) -> Error {
    Error::InvalidArgument(format!("no {what} records to write"))
}

pub fn write_plot_data<W: Write>(data: PlotData<'_>, mut w: W) -> Result<()> {
    let io = |e| Error::io("<plot data>", e);
    match data {
        PlotData::Sweep(report) => {
            if report.records.is_empty() {
                return Err(empty("sweep"));
            }
            writeln!(
                w,
                "# lambda={} task={} upper_bound={} seed={}",
                report.lambda, report.task, report.upper_bound, report.seed
            )
            .map_err(io)?;
            writeln!(w, "d,metric,score,selected").map_err(io)?;
            let mut rows: Vec<_> = report.records.iter().collect();
            rows.sort_by_key(|r| r.d);
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{}",
                    r.d,
                    r.metric,
                    r.score,
                    r.d == report.selected_d
                )
                .map_err(io)?;
            }
        }
        PlotData::Grid(grid) => {
            if grid.entries.is_empty() {
                return Err(empty("grid"));
            }
            writeln!(w, "dim,metric,train_s,eval_s").map_err(io)?;
            for e in &grid.entries {
                writeln!(w, "{},{},{},{}", e.dim, e.metric, e.train_s, e.eval_s).map_err(io)?;
            }
        }
        PlotData::Variance(model) => return write_variance_csv(model, w),
        PlotData::Timing(timings) => {
            if timings.is_empty() {
                return Err(empty("timing"));
            }
            writeln!(w, "phase,seconds").map_err(io)?;
            for (phase, secs) in timings {
                writeln!(w, "{phase},{secs}").map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

pub fn emit_plot_data(data: PlotData<'_>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_plot_data(data, BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selector::{score_records, MetricSource, ScoreParams};

    fn report(points: &[(usize, f64)], selected_d: usize) -> SelectionReport {
        SelectionReport {
            selected_d,
            upper_bound: points.len() + 1,
            vocab_size: 10,
            embedding_params: 10 * selected_d,
            lambda: 0.5,
            task: "similarity:toy".into(),
            seed: 3,
            selected_metric: 0.0,
            full_metric: 0.0,
            retrained_metric: None,
            metric_source: MetricSource::Truncated,
            records: score_records(points, ScoreParams::new(0.5).unwrap(), "similarity:toy"),
            timings: BTreeMap::new(),
            baseline: None,
        }
    }

    #[test]
    fn sweep_rows_and_single_selection() {
        let points: Vec<(usize, f64)> = (1..=7).rev().map(|d| (d, d as f64)).collect();
        let mut buf = Vec::new();
        write_plot_data(PlotData::Sweep(&report(&points, 4)), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "# lambda=0.5 task=similarity:toy upper_bound=8 seed=3"
        );
        assert_eq!(lines[1], "d,metric,score,selected");
        assert_eq!(lines.len(), 2 + 7);
        assert_eq!(lines.iter().filter(|l| l.ends_with(",true")).count(), 1);
        assert_eq!(lines[5], "4,4,2,true");
    }

    #[test]
    fn empty_records_rejected() {
        let r = report(&[], 1);
        assert!(write_plot_data(PlotData::Sweep(&r), Vec::new()).is_err());
        assert!(write_plot_data(PlotData::Timing(&BTreeMap::new()), Vec::new()).is_err());
    }
}
