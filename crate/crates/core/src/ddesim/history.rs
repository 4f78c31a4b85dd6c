use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Initial function for `t <= 0`. Only the displacement enters the delayed
/// term, so the history is scalar.
#[derive(Clone)]
pub enum History {
    Constant(f64),
    Function {
        description: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl History {
    pub fn function(description: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        History::Function {
            description: description.into(),
            f: Arc::new(f),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            History::Constant(c) => *c,
            History::Function { f, .. } => f(t),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            History::Constant(c) => format!("const:{c}"),
            History::Function { description, .. } => description.clone(),
        }
    }
}

impl fmt::Debug for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl PartialEq for History {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (History::Constant(a), History::Constant(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl FromStr for History {
    type Err = Error;

    /// Parses `const:<value>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("history '{s}' is not of the form const:<value>")))?;
        match kind.trim() {
            "const" => {
                let v: f64 = arg.trim().parse().map_err(|_| {
                    Error::InvalidInput(format!("history value '{arg}' is not a number"))
                })?;
                if !v.is_finite() {
                    return Err(Error::InvalidInput("history value must be finite".into()));
                }
                Ok(History::Constant(v))
            }
            other => Err(Error::InvalidInput(format!("unknown history kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub y: [f64; 2],
    pub dy: [f64; 2],
}

/// Past states with derivatives, interpolated by cubic Hermite polynomials.
#[derive(Debug, Clone, Default)]
pub struct HistoryBuffer {
    samples: VecDeque<Sample>,
}

impl HistoryBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn latest(&self) -> Option<&Sample> {
        self.samples.back()
    }

    /// Time span `[first, last]` currently held.
    pub fn window(&self) -> Option<(f64, f64)> {
        Some((self.samples.front()?.t, self.samples.back()?.t))
    }

    /// Appends a sample; times must be strictly increasing.
    pub fn push(&mut self, sample: Sample) -> Result<()> {
        if let Some(last) = self.samples.back() {
            if !(sample.t > last.t) {
                return Err(Error::InvalidInput(format!(
                    "history sample at t = {} does not follow t = {}",
                    sample.t, last.t
                )));
            }
        }
        self.samples.push_back(sample);
        Ok(())
    }

    /// Drops samples no longer needed for queries at or after `t_min`,
    /// keeping one sample at or before `t_min` to bracket it.
    pub fn discard_before(&mut self, t_min: f64) {
        while self.samples.len() > 2 && self.samples[1].t <= t_min {
            self.samples.pop_front();
        }
    }

    /// Interpolated state at `t`, or `None` outside the held window.
    pub fn value_at(&self, t: f64) -> Option<[f64; 2]> {
        let (first, last) = self.window()?;
        if !(t >= first && t <= last) {
            return None;
        }
        let idx = self.samples.partition_point(|s| s.t <= t);
        let left = &self.samples[idx - 1];
        if left.t == t {
            return Some(left.y);
        }
        let right = &self.samples[idx];
        Some(hermite(left, right, t))
    }
}

fn hermite(left: &Sample, right: &Sample, t: f64) -> [f64; 2] {
    let h = right.t - left.t;
    let s = (t - left.t) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = [0.0; 2];
    for i in 0..2 {
        out[i] = h00 * left.y[i] + h10 * h * left.dy[i] + h01 * right.y[i] + h11 * h * right.dy[i];
    }
    out
}
