//! CSV files exchanged with the command line and the plotting scripts.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), so every
//! emitted value parses back to the same `f64` and re-emits byte-for-byte.

use std::fmt::Write as _;
use std::io;

use crate::ddesim::Trajectory;
use crate::error::{Error, Result};
use crate::hopf::{Branch, HopfPoint, Method};
use crate::systems::{SystemKind, SystemSpec};

pub const CURVE_HEADER: &str = "system,method,branch,epsilon,alpha,gamma,k,T,omega";
pub const TRAJECTORY_HEADER: &str = "t,x,v";
pub const COMPARISON_HEADER: &str = "system,method,branch,max_abs_T_error,mean_abs_T_error,n_points";

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub system: SystemKind,
    pub method: Method,
    pub branch: Branch,
    pub epsilon: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub k: f64,
    pub delay: f64,
    pub omega: f64,
}

impl CurveRow {
    pub fn from_point(spec: &SystemSpec, p: &HopfPoint) -> Self {
        CurveRow {
            system: spec.kind,
            method: p.method,
            branch: p.branch,
            epsilon: spec.epsilon,
            alpha: spec.alpha,
            gamma: spec.gamma,
            k: p.k,
            delay: p.delay,
            omega: p.omega,
        }
    }

    pub fn spec(&self) -> SystemSpec {
        SystemSpec {
            kind: self.system,
            epsilon: self.epsilon,
            alpha: self.alpha,
            gamma: self.gamma,
            k: self.k,
        }
    }
}

/// Hopf curve rows, kept sorted by `(method, branch, k)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveTable {
    rows: Vec<CurveRow>,
}

impl CurveTable {
    pub fn new(mut rows: Vec<CurveRow>) -> Self {
        rows.sort_by(|a, b| {
            (a.method, a.branch)
                .cmp(&(b.method, b.branch))
                .then(a.k.total_cmp(&b.k))
        });
        CurveTable { rows }
    }

    pub fn rows(&self) -> &[CurveRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn series(&self, method: Method, branch: Branch) -> impl Iterator<Item = &CurveRow> {
        self.rows
            .iter()
            .filter(move |r| r.method == method && r.branch == branch)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CURVE_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.system,
                r.method,
                r.branch,
                format_f64(r.epsilon),
                format_f64(r.alpha),
                format_f64(r.gamma),
                format_f64(r.k),
                format_f64(r.delay),
                format_f64(r.omega)
            );
        }
        out
    }

    pub fn write_to<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &str) -> Result<()> {
    let header = rdr.headers()?;
    let got: Vec<&str> = header.iter().collect();
    let want: Vec<&str> = expected.split(',').collect();
    if got != want {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header '{expected}', got '{}'", got.join(",")),
        });
    }
    Ok(())
}

fn record_line(rec: &csv::StringRecord) -> usize {
    rec.position().map(|p| p.line() as usize).unwrap_or_default()
}

fn field<'a>(rec: &'a csv::StringRecord, i: usize) -> Result<&'a str> {
    rec.get(i).ok_or_else(|| Error::Parse {
        line: record_line(rec),
        message: format!("missing field {i}"),
    })
}

fn number(rec: &csv::StringRecord, i: usize, name: &str) -> Result<f64> {
    let raw = field(rec, i)?;
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line: record_line(rec),
            message: format!("{name}: '{raw}' is not a finite number"),
        }),
    }
}

fn wrap<T>(rec: &csv::StringRecord, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Error::Parse { .. } => e,
        other => Error::Parse {
            line: record_line(rec),
            message: other.to_string(),
        },
    })
}

fn require_width(rec: &csv::StringRecord, n: usize) -> Result<()> {
    if rec.len() != n {
        return Err(Error::Parse {
            line: record_line(rec),
            message: format!("expected {n} fields, got {}", rec.len()),
        });
    }
    Ok(())
}

/// Parses a curve table. Rows are re-sorted into table order.
pub fn parse_curve_table(text: &str) -> Result<CurveTable> {
    let mut rdr = reader(text);
    check_header(&mut rdr, CURVE_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        require_width(&rec, 9)?;
        rows.push(CurveRow {
            system: wrap(&rec, field(&rec, 0)?.parse())?,
            method: wrap(&rec, field(&rec, 1)?.parse())?,
            branch: wrap(&rec, field(&rec, 2)?.parse())?,
            epsilon: number(&rec, 3, "epsilon")?,
            alpha: number(&rec, 4, "alpha")?,
            gamma: number(&rec, 5, "gamma")?,
            k: number(&rec, 6, "k")?,
            delay: number(&rec, 7, "T")?,
            omega: number(&rec, 8, "omega")?,
        });
    }
    Ok(CurveTable::new(rows))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub v: f64,
}

pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(72 * (traj.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for i in 0..traj.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_f64(traj.t[i]),
            format_f64(traj.x[i]),
            format_f64(traj.v[i])
        );
    }
    out
}

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut rdr = reader(text);
    check_header(&mut rdr, TRAJECTORY_HEADER)?;
    let mut rows: Vec<TrajectoryRow> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        require_width(&rec, 3)?;
        let row = TrajectoryRow {
            t: number(&rec, 0, "t")?,
            x: number(&rec, 1, "x")?,
            v: number(&rec, 2, "v")?,
        };
        if let Some(prev) = rows.last() {
            if !(row.t > prev.t) {
                return Err(Error::Parse {
                    line: record_line(&rec),
                    message: "times must be strictly increasing".into(),
                });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub system: SystemKind,
    pub method: Method,
    pub branch: Branch,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
    pub n_points: usize,
}

pub fn comparison_to_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::new();
    out.push_str(COMPARISON_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.system,
            r.method,
            r.branch,
            format_f64(r.max_abs_error),
            format_f64(r.mean_abs_error),
            r.n_points
        );
    }
    out
}

pub fn parse_comparison_csv(text: &str) -> Result<Vec<ComparisonRow>> {
    let mut rdr = reader(text);
    check_header(&mut rdr, COMPARISON_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        require_width(&rec, 6)?;
        let raw_n = field(&rec, 5)?;
        let n_points = raw_n.parse::<usize>().map_err(|_| Error::Parse {
            line: record_line(&rec),
            message: format!("n_points: '{raw_n}' is not a count"),
        })?;
        rows.push(ComparisonRow {
            system: wrap(&rec, field(&rec, 0)?.parse())?,
            method: wrap(&rec, field(&rec, 1)?.parse())?,
            branch: wrap(&rec, field(&rec, 2)?.parse())?,
            max_abs_error: number(&rec, 3, "max_abs_T_error")?,
            mean_abs_error: number(&rec, 4, "mean_abs_T_error")?,
            n_points,
        });
    }
    Ok(rows)
}
