//! Trajectory files and verification reports.
//!
//! CSV files carry the header `s,x,y,z,vx,vy,vz,cos_theta,speed`, one row per
//! sample, with `vx, vy, vz` the coordinate velocity. Numbers use the shortest
//! representation that parses back to the same `f64`, so parsing a file and
//! writing it again reproduces it byte for byte.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectories::TrajectorySample;

pub const CSV_HEADER: &str = "s,x,y,z,vx,vy,vz,cos_theta,speed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub cos_theta: f64,
    pub speed: f64,
}

impl TrajectoryRow {
    pub fn from_sample(sample: &TrajectorySample) -> Self {
        let v = sample.coord_velocity();
        Self {
            s: sample.s,
            x: sample.point.x,
            y: sample.point.y,
            z: sample.point.z,
            vx: v.dx,
            vy: v.dy,
            vz: v.dz,
            cos_theta: sample.cos_theta,
            speed: sample.speed,
        }
    }

    fn fields(&self) -> [f64; 9] {
        [
            self.s,
            self.x,
            self.y,
            self.z,
            self.vx,
            self.vy,
            self.vz,
            self.cos_theta,
            self.speed,
        ]
    }

    fn from_fields(f: [f64; 9]) -> Self {
        Self {
            s: f[0],
            x: f[1],
            y: f[2],
            z: f[3],
            vx: f[4],
            vy: f[5],
            vz: f[6],
            cos_theta: f[7],
            speed: f[8],
        }
    }
}

/// Shortest round-trip decimal form of `x`.
pub fn format_number(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::with_capacity(32 + rows.len() * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.fields().iter().map(|&x| format_number(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header `{CSV_HEADER}`, found {other:?}"
            )))
        }
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let values: Vec<f64> = line
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: `{v}`: {e}", i + 2)))
                })
                .collect::<Result<_>>()?;
            let fields: [f64; 9] = values.try_into().map_err(|v: Vec<f64>| {
                Error::Parse(format!(
                    "line {}: expected 9 fields, got {}",
                    i + 2,
                    v.len()
                ))
            })?;
            Ok(TrajectoryRow::from_fields(fields))
        })
        .collect()
}

pub fn write_json(rows: &[TrajectoryRow]) -> String {
    let mut out = serde_json::to_string_pretty(rows).expect("rows serialize");
    out.push('\n');
    out
}

pub fn parse_json(text: &str) -> Result<Vec<TrajectoryRow>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Outcome of one verification check: the measured error against its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    /// Passes when `max_error <= tolerance` (a NaN error fails).
    pub fn new(name: impl Into<String>, max_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_error,
            tolerance,
            pass: max_error <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerifyReport {
    /// Sorts the checks by name; the report passes iff every check passes.
    pub fn new(mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let pass = checks.iter().all(|c| c.pass);
        Self { checks, pass }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}
