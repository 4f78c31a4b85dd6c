//! Method-of-steps integration of the delayed oscillators and their slow flows.
//!
//! Classic fourth-order Runge-Kutta with delayed values read from a
//! [`HistoryBuffer`] by cubic Hermite interpolation. The step is capped at a
//! quarter of the delay so every delayed stage time lies in the completed
//! part of the solution.

mod classify;
mod detect;
mod history;

pub use classify::{classify_long_run, tail_frequency, ClassifyTolerances, LongRunClass};
pub use detect::{detect_hopf_bisection, DetectOptions};
pub use history::{History, HistoryBuffer, Sample};

use crate::error::{Error, Result};
use crate::slowflow::{self, PlaneState};
use crate::systems::{self, FullState, SystemSpec};

/// States beyond this magnitude count as overflow.
pub const OVERFLOW_BOUND: f64 = 1e100;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub spec: SystemSpec,
    pub delay: f64,
    pub dt: f64,
    pub history: String,
}

/// Uniformly sampled solution `(t, x, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub meta: TrajectoryMeta,
    /// Set when the run stopped at a non-finite or overflowing state.
    pub overflow: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlowFlowMode {
    /// Delayed amplitudes at `eta - eps T` (approach II dynamics).
    Delayed,
    /// Delayed amplitudes replaced by current ones (approach I dynamics).
    Undelayed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlowFlowTrajectory {
    pub eta: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub overflow: bool,
}

struct Run {
    t: Vec<f64>,
    y: Vec<[f64; 2]>,
    overflow: bool,
}

/// Fixed-step RK4 for `y' = f(t, y, y(t - delay))`, `y = history(t)` for `t < 0`.
fn method_of_steps<F, H>(rhs: F, history: H, y0: [f64; 2], delay: f64, stride: f64, t_end: f64) -> Result<Run>
where
    F: Fn(f64, &[f64; 2], &[f64; 2]) -> [f64; 2],
    H: Fn(f64) -> [f64; 2],
{
    if !(stride > 0.0 && stride.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {stride}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("end time must be positive, got {t_end}")));
    }
    if !(delay >= 0.0 && delay.is_finite()) {
        return Err(Error::InvalidInput(format!("delay must be >= 0, got {delay}")));
    }
    if !(y0[0].is_finite() && y0[1].is_finite()) {
        return Err(Error::InvalidInput("initial state must be finite".into()));
    }
    let h_max = if delay > 0.0 { stride.min(delay / 4.0) } else { stride };
    let substeps = (stride / h_max - 1e-9).ceil().max(1.0) as usize;
    let h = stride / substeps as f64;
    let n_out = (t_end / stride + 1e-9).floor() as usize;

    let mut buffer = HistoryBuffer::new();
    let delayed = |buffer: &HistoryBuffer, t: f64, current: &[f64; 2]| -> [f64; 2] {
        if delay == 0.0 {
            return *current;
        }
        let tq = t - delay;
        if tq < 0.0 {
            history(tq)
        } else {
            buffer.value_at(tq).expect("delayed time inside stored window")
        }
    };

    let mut y = y0;
    let d0 = rhs(0.0, &y, &delayed(&buffer, 0.0, &y));
    buffer.push(Sample { t: 0.0, y, dy: d0 })?;
    let mut k1 = d0;

    let mut run = Run {
        t: Vec::with_capacity(n_out + 1),
        y: Vec::with_capacity(n_out + 1),
        overflow: false,
    };
    run.t.push(0.0);
    run.y.push(y);

    let total = n_out * substeps;
    for i in 0..total {
        let t = i as f64 * h;
        let mid = t + 0.5 * h;
        let t_next = (i + 1) as f64 * h;

        let y2 = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
        let k2 = rhs(mid, &y2, &delayed(&buffer, mid, &y2));
        let y3 = [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]];
        let k3 = rhs(mid, &y3, &delayed(&buffer, mid, &y3));
        let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
        let k4 = rhs(t_next, &y4, &delayed(&buffer, t_next, &y4));
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if !next.iter().all(|c| c.is_finite() && c.abs() < OVERFLOW_BOUND) {
            run.overflow = true;
            break;
        }
        y = next;
        k1 = rhs(t_next, &y, &delayed(&buffer, t_next, &y));
        if delay > 0.0 {
            buffer.push(Sample { t: t_next, y, dy: k1 })?;
            buffer.discard_before(t_next - delay);
        }
        if (i + 1) % substeps == 0 {
            run.t.push(((i + 1) / substeps) as f64 * stride);
            run.y.push(y);
        }
    }
    Ok(run)
}

/// Integrates the full DDE from `x(0) = history(0)`, `x'(0) = 0`.
pub fn integrate(spec: &SystemSpec, delay: f64, history: &History, dt: f64, t_end: f64) -> Result<Trajectory> {
    integrate_from(spec, delay, history, (history.value(0.0), 0.0), dt, t_end)
}

/// Integrates the full DDE from an explicit initial state.
///
/// Output is sampled every `dt`; the internal step is `dt` or less.
pub fn integrate_from(
    spec: &SystemSpec,
    delay: f64,
    history: &History,
    initial: (f64, f64),
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    spec.validate()?;
    let rhs = |t: f64, y: &[f64; 2], yd: &[f64; 2]| {
        let (dx, dv) = systems::full_rhs(spec, &FullState { x: y[0], v: y[1], t }, yd[0]);
        [dx, dv]
    };
    let run = method_of_steps(rhs, |t| [history.value(t), 0.0], [initial.0, initial.1], delay, dt, t_end)?;
    Ok(Trajectory {
        x: run.y.iter().map(|y| y[0]).collect(),
        v: run.y.iter().map(|y| y[1]).collect(),
        t: run.t,
        meta: TrajectoryMeta {
            spec: *spec,
            delay,
            dt,
            history: history.describe(),
        },
        overflow: run.overflow,
    })
}

/// Integrates the slow flow in slow time; the slow-time delay is `eps T`
/// and the history is the constant initial state.
pub fn integrate_slowflow(
    spec: &SystemSpec,
    delay: f64,
    initial: PlaneState,
    dt_eta: f64,
    eta_end: f64,
    mode: SlowFlowMode,
) -> Result<SlowFlowTrajectory> {
    spec.validate()?;
    let slow_delay = match mode {
        SlowFlowMode::Delayed => spec.epsilon * delay,
        SlowFlowMode::Undelayed => 0.0,
    };
    let y0 = [initial.a, initial.b];
    let rhs = |eta: f64, y: &[f64; 2], yd: &[f64; 2]| {
        let now = PlaneState { a: y[0], b: y[1], eta };
        let past = PlaneState { a: yd[0], b: yd[1], eta: eta - slow_delay };
        let (da, db) = slowflow::cartesian_rhs(spec, delay, &now, &past);
        [da, db]
    };
    let run = method_of_steps(rhs, |_| y0, y0, slow_delay, dt_eta, eta_end)?;
    Ok(SlowFlowTrajectory {
        a: run.y.iter().map(|y| y[0]).collect(),
        b: run.y.iter().map(|y| y[1]).collect(),
        eta: run.t.into_iter().map(|t| t + initial.eta).collect(),
        overflow: run.overflow,
    })
}
