use std::f64::consts::PI;

use super::Trajectory;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LongRunClass {
    DecayToOrigin,
    LimitCycle { amplitude: f64 },
    Growth,
}

impl LongRunClass {
    /// Whether the run says the origin is (locally) attracting.
    pub fn origin_stable(&self) -> bool {
        matches!(self, LongRunClass::DecayToOrigin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyTolerances {
    /// Relative spread `(max - min) / mean` of tail peaks counted as a plateau.
    pub plateau_spread: f64,
    /// Peaks below this are treated as rest at the origin.
    pub decay_floor: f64,
    /// Extrema the tail must contain for a peak-based decision.
    pub min_extrema: usize,
}

impl Default for ClassifyTolerances {
    fn default() -> Self {
        ClassifyTolerances {
            plateau_spread: 0.02,
            decay_floor: 1e-6,
            min_extrema: 10,
        }
    }
}

struct Extremum {
    t: f64,
    value: f64,
    is_max: bool,
}

/// Local extrema of `x` in `[start, end)`, refined by a parabola through
/// the three samples around each.
fn extrema(traj: &Trajectory, start: usize) -> Vec<Extremum> {
    let x = &traj.x;
    let t = &traj.t;
    let mut out = Vec::new();
    for i in start.max(1)..x.len().saturating_sub(1) {
        let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
        let is_max = b > a && b >= c;
        let is_min = b < a && b <= c;
        if !(is_max || is_min) {
            continue;
        }
        let denom = a - 2.0 * b + c;
        let (shift, value) = if denom != 0.0 {
            let s = 0.5 * (a - c) / denom;
            (s, b - 0.25 * (a - c) * s)
        } else {
            (0.0, b)
        };
        let h = t[i + 1] - t[i];
        out.push(Extremum {
            t: t[i] + shift * h,
            value,
            is_max,
        });
    }
    out
}

fn tail_start(traj: &Trajectory, settle_fraction: f64) -> usize {
    let t_last = *traj.t.last().unwrap_or(&0.0);
    let cut = t_last * (1.0 - settle_fraction);
    traj.t.partition_point(|&t| t < cut)
}

/// Decides the long-run behaviour from the trailing `settle_fraction` of a run.
///
/// Tail peaks of `|x|` on a plateau give a limit cycle; shrinking peaks give
/// decay; growing peaks or an overflowed run give growth. A tail without
/// enough oscillation is classified by its envelope when it escapes or has
/// come to rest, and is otherwise an error.
pub fn classify_long_run(traj: &Trajectory, settle_fraction: f64, tol: &ClassifyTolerances) -> Result<LongRunClass> {
    if !(settle_fraction > 0.0 && settle_fraction <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "settle fraction must be in (0, 1], got {settle_fraction}"
        )));
    }
    if traj.overflow {
        return Ok(LongRunClass::Growth);
    }
    let start = tail_start(traj, settle_fraction);
    let tail = &traj.x[start.min(traj.x.len())..];
    if tail.len() < 3 {
        return Err(Error::InsufficientData(format!("tail has {} samples", tail.len())));
    }
    let ext = extrema(traj, start);
    let max_abs = tail.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    if ext.len() < tol.min_extrema {
        if max_abs <= tol.decay_floor {
            return Ok(LongRunClass::DecayToOrigin);
        }
        let first = tail[0].abs();
        let last = tail[tail.len() - 1].abs();
        if last >= max_abs && last > first * (1.0 + tol.plateau_spread) {
            // non-oscillatory escape from the origin
            return Ok(LongRunClass::Growth);
        }
        return Err(Error::InsufficientData(format!(
            "{} extrema in the tail, need {}",
            ext.len(),
            tol.min_extrema
        )));
    }

    let peaks: Vec<f64> = ext.iter().map(|e| e.value.abs()).collect();
    let (lo, hi) = peaks
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    if hi <= tol.decay_floor {
        return Ok(LongRunClass::DecayToOrigin);
    }
    let mean = peaks.iter().sum::<f64>() / peaks.len() as f64;
    if (hi - lo) / mean < tol.plateau_spread {
        return Ok(LongRunClass::LimitCycle { amplitude: mean });
    }
    // a max and a min at each end cancel any offset
    let n = peaks.len();
    let early = 0.5 * (peaks[0] + peaks[1]);
    let late = 0.5 * (peaks[n - 2] + peaks[n - 1]);
    if late < early {
        Ok(LongRunClass::DecayToOrigin)
    } else {
        Ok(LongRunClass::Growth)
    }
}

/// Angular frequency from the spacing of maxima in the tail, if at least
/// two maxima exist.
pub fn tail_frequency(traj: &Trajectory, settle_fraction: f64) -> Option<f64> {
    let start = tail_start(traj, settle_fraction);
    let maxima: Vec<f64> = extrema(traj, start)
        .into_iter()
        .filter(|e| e.is_max)
        .map(|e| e.t)
        .collect();
    if maxima.len() < 2 {
        return None;
    }
    let span = maxima[maxima.len() - 1] - maxima[0];
    Some(2.0 * PI * (maxima.len() - 1) as f64 / span)
}
