//! CSV tables. Numbers use the shortest round-trip decimal form and `+∞`
//! is written as `inf`.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use ncqbv_core::{SimStats, SweepRow};

use crate::error::CliError;

pub const SWEEP_HEADER: [&str; 7] = [
    "p",
    "queue",
    "bound",
    "reliability",
    "stable",
    "agg_rate",
    "agg_burst",
];
pub const SIM_HEADER: [&str; 7] = [
    "queue",
    "delivered",
    "dropped",
    "max_delay",
    "mean_delay",
    "q999",
    "violation_freq",
];
pub const CURVE_HEADER: [&str; 2] = ["t", "value"];

pub fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x}")
    }
}

/// Opens `path` for writing; an existing file is only replaced with `force`.
pub fn create(path: &Path, force: bool) -> Result<File, CliError> {
    let mut opts = OpenOptions::new();
    opts.write(true);
    if force {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    opts.open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::AlreadyExists {
            CliError::Io(format!(
                "{} exists; pass --force to overwrite",
                path.display()
            ))
        } else {
            CliError::Io(format!("{}: {e}", path.display()))
        }
    })
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            num(r.p),
            r.queue.clone(),
            num(r.bound),
            num(r.reliability),
            r.stable.to_string(),
            num(r.agg_rate),
            num(r.agg_burst),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per queue; `bounds[i]` is the bound that queue `i`'s violation
/// frequency is measured against.
pub fn write_sim_stats<W: Write>(out: W, stats: &SimStats, bounds: &[f64]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIM_HEADER)?;
    for (q, &bound) in stats.queues.iter().zip(bounds) {
        w.write_record([
            q.name.clone(),
            q.delivered.to_string(),
            q.dropped.to_string(),
            num(q.max_delay()),
            num(q.mean_delay()),
            num(q.quantile(0.999)),
            num(q.violation_frequency(bound)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve<W: Write>(
    out: W,
    points: impl IntoIterator<Item = (f64, f64)>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for (t, v) in points {
        w.write_record([num(t), num(v)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_render_plainly() {
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(0.0004), "0.0004");
        assert_eq!(num(0.01), "0.01");
        assert_eq!(num(3.0), "3");
    }

    #[test]
    fn sweep_table_layout() {
        let rows = vec![SweepRow {
            p: 0.5,
            queue: "a,b".to_string(),
            bound: f64::INFINITY,
            reliability: 1.0,
            stable: false,
            agg_rate: 0.2,
            agg_burst: f64::INFINITY,
        }];
        let mut buf = Vec::new();
        write_sweep(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "p,queue,bound,reliability,stable,agg_rate,agg_burst\n0.5,\"a,b\",inf,1,false,0.2,inf\n"
        );
    }

    #[test]
    fn refuses_to_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        create(&path, false).unwrap();
        assert!(create(&path, false).is_err());
        assert!(create(&path, true).is_ok());
    }
}
