//! Closed-form Hopf conditions of the slow flow.
//!
//! Approach I replaces the delayed slow-flow amplitudes by the current ones;
//! the Hopf condition is then `k sin T = -alpha` (Duffing) or `k sin T = 1`
//! (van der Pol, Erneux-Grasman). Approach II keeps the slow-time delay
//! `eps T`; its critical delays are the summed perturbation series
//! `T0 / (1 -/+ eps omega)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::systems::{SystemKind, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Lower,
    Upper,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Lower, Branch::Upper];

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Lower => "lower",
            Branch::Upper => "upper",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lower" => Ok(Branch::Lower),
            "upper" => Ok(Branch::Upper),
            other => Err(Error::InvalidInput(format!("unknown branch '{other}'"))),
        }
    }
}

/// How a Hopf point was obtained. Ordering is the row order of curve tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    ApproachI,
    ApproachII,
    ExactChar,
    Simulated,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::ApproachI,
        Method::ApproachII,
        Method::ExactChar,
        Method::Simulated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ApproachI => "approach1",
            Method::ApproachII => "approach2",
            Method::ExactChar => "exact",
            Method::Simulated => "simulated",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "approach1" => Ok(Method::ApproachI),
            "approach2" => Ok(Method::ApproachII),
            "exact" => Ok(Method::ExactChar),
            "simulated" => Ok(Method::Simulated),
            other => Err(Error::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

/// Parses a comma-separated method list such as `approach1,exact`.
///
/// Duplicates are dropped; the result is in table order.
pub fn parse_method_list(s: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let m: Method = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out.sort();
    Ok(out)
}

/// A critical `(k, T)` pair.
///
/// `omega` is the slow-flow frequency for the analytic methods and the
/// physical oscillation frequency for the exact and simulated ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfPoint {
    pub k: f64,
    pub delay: f64,
    pub omega: f64,
    pub branch: Branch,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalFrequency {
    Single(f64),
    /// Erneux-Grasman: `(omega_cr1, omega_cr2)`.
    Pair(f64, f64),
}

/// Which `(omega, T)` association to use for the Erneux-Grasman closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErneuxPairing {
    /// `omega_cr1` with `pi - asin(1/k)` and `omega_cr2` with `asin(1/k)`.
    Printed,
    /// `omega_cr1` with `asin(1/k)` and `omega_cr2` with `pi - asin(1/k)`,
    /// the association that makes the derived slow-flow determinant vanish.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Smallest feedback magnitude admitting a Hopf point (exclusive).
pub fn feedback_threshold(spec: &SystemSpec) -> f64 {
    match spec.kind {
        SystemKind::Duffing => spec.alpha,
        SystemKind::VanDerPol | SystemKind::ErneuxGrasman => 1.0,
    }
}

fn require_above_threshold(spec: &SystemSpec) -> Result<()> {
    spec.validate()?;
    let th = feedback_threshold(spec);
    if spec.k > th {
        Ok(())
    } else {
        Err(Error::NoHopf(format!(
            "{} needs k > {th}, got k = {}",
            spec.kind, spec.k
        )))
    }
}

/// Principal approach I delays `(lower, upper)`.
pub fn approach1_delays(spec: &SystemSpec) -> Result<(f64, f64)> {
    approach1_delays_indexed(spec, 0)
}

/// Approach I delays shifted by `2 pi n`.
pub fn approach1_delays_indexed(spec: &SystemSpec, n: u32) -> Result<(f64, f64)> {
    require_above_threshold(spec)?;
    let shift = 2.0 * PI * f64::from(n);
    let (lo, hi) = match spec.kind {
        SystemKind::Duffing => {
            let a = (-spec.alpha / spec.k).asin();
            (PI - a, 2.0 * PI + a)
        }
        SystemKind::VanDerPol | SystemKind::ErneuxGrasman => {
            let a = (1.0 / spec.k).asin();
            (a, PI - a)
        }
    };
    Ok((lo + shift, hi + shift))
}

/// Approach I Hopf point with its slow-flow frequency.
pub fn approach1_point(spec: &SystemSpec, branch: Branch, n: u32) -> Result<HopfPoint> {
    let (lo, hi) = approach1_delays_indexed(spec, n)?;
    let delay = match branch {
        Branch::Lower => lo,
        Branch::Upper => hi,
    };
    let omega = match approach2_omega(spec)? {
        CriticalFrequency::Single(w) => w,
        CriticalFrequency::Pair(w1, w2) => match branch {
            Branch::Lower => w1,
            Branch::Upper => w2,
        },
    };
    Ok(HopfPoint {
        k: spec.k,
        delay,
        omega,
        branch,
        method: Method::ApproachI,
    })
}

/// Trace and determinant of the undelayed linearised slow flow at delay `T`.
pub fn approach1_trace_det(spec: &SystemSpec, delay: f64) -> (f64, f64) {
    let half_k = 0.5 * spec.k;
    let (s, c) = delay.sin_cos();
    let (diag, rot) = match spec.kind {
        SystemKind::Duffing => (-0.5 * spec.alpha - half_k * s, 0.0),
        SystemKind::VanDerPol => (0.5 - half_k * s, 0.0),
        SystemKind::ErneuxGrasman => (0.5 - half_k * s, half_k),
    };
    let off = half_k * c - rot;
    (2.0 * diag, diag * diag + off * off)
}

/// Critical slow-flow frequency of approach II.
pub fn approach2_omega(spec: &SystemSpec) -> Result<CriticalFrequency> {
    require_above_threshold(spec)?;
    let k = spec.k;
    Ok(match spec.kind {
        SystemKind::Duffing => {
            CriticalFrequency::Single((k * k - spec.alpha * spec.alpha).sqrt() / 2.0)
        }
        SystemKind::VanDerPol => CriticalFrequency::Single((k * k - 1.0).sqrt() / 2.0),
        SystemKind::ErneuxGrasman => {
            let base = k * k / 2.0 - 0.25;
            let root = 0.5 * k * (k * k - 1.0).sqrt();
            CriticalFrequency::Pair((base - root).max(0.0).sqrt(), (base + root).sqrt())
        }
    })
}

/// Approach II critical delay of one formula family.
///
/// `Lower` names the family that forms the lower Hopf curve when `eps omega`
/// is small: `(pi - asin(-alpha/k)) / (1 + eps omega)` for Duffing and
/// `asin(1/k) / (1 - eps omega)` for van der Pol. Erneux-Grasman uses the
/// printed pairing; see [`erneux_approach2_branch`] for the alternative.
pub fn approach2_branch(spec: &SystemSpec, branch: Branch, n: u32) -> Result<HopfPoint> {
    if spec.kind == SystemKind::ErneuxGrasman {
        return erneux_approach2_branch(spec, branch, ErneuxPairing::Printed, n);
    }
    let (t0_lo, t0_hi) = approach1_delays_indexed(spec, n)?;
    let omega = match approach2_omega(spec)? {
        CriticalFrequency::Single(w) => w,
        CriticalFrequency::Pair(..) => unreachable!("pair only for Erneux"),
    };
    let q = spec.epsilon * omega;
    // Which family carries the 1/(1 - eps omega) geometric sum.
    let (t0, geometric) = match (spec.kind, branch) {
        (SystemKind::Duffing, Branch::Lower) => (t0_lo, false),
        (SystemKind::Duffing, Branch::Upper) => (t0_hi, true),
        (_, Branch::Lower) => (t0_lo, true),
        (_, Branch::Upper) => (t0_hi, false),
    };
    let delay = if geometric {
        if q.abs() >= 1.0 {
            return Err(Error::SeriesDivergence { branch, eps_omega: q });
        }
        t0 / (1.0 - q)
    } else {
        t0 / (1.0 + q)
    };
    Ok(HopfPoint {
        k: spec.k,
        delay,
        omega,
        branch,
        method: Method::ApproachII,
    })
}

/// Erneux-Grasman approach II point under a chosen frequency pairing.
///
/// Both families have denominator `1 + eps omega`. `Lower` is the
/// `asin(1/k)` family.
pub fn erneux_approach2_branch(
    spec: &SystemSpec,
    branch: Branch,
    pairing: ErneuxPairing,
    n: u32,
) -> Result<HopfPoint> {
    if spec.kind != SystemKind::ErneuxGrasman {
        return Err(Error::InvalidInput(format!(
            "Erneux closed forms requested for {}",
            spec.kind
        )));
    }
    let (t0_lo, t0_hi) = approach1_delays_indexed(spec, n)?;
    let (w1, w2) = match approach2_omega(spec)? {
        CriticalFrequency::Pair(a, b) => (a, b),
        CriticalFrequency::Single(_) => unreachable!(),
    };
    let (t0, omega) = match (pairing, branch) {
        (ErneuxPairing::Printed, Branch::Lower) => (t0_lo, w2),
        (ErneuxPairing::Printed, Branch::Upper) => (t0_hi, w1),
        (ErneuxPairing::Derived, Branch::Lower) => (t0_lo, w1),
        (ErneuxPairing::Derived, Branch::Upper) => (t0_hi, w2),
    };
    Ok(HopfPoint {
        k: spec.k,
        delay: t0 / (1.0 + spec.epsilon * omega),
        omega,
        branch,
        method: Method::ApproachII,
    })
}

/// Both principal approach II points, labelled so that `lower.delay < upper.delay`.
pub fn approach2_delays(spec: &SystemSpec) -> Result<(HopfPoint, HopfPoint)> {
    let mut a = approach2_branch(spec, Branch::Lower, 0)?;
    let mut b = approach2_branch(spec, Branch::Upper, 0)?;
    if a.delay > b.delay {
        std::mem::swap(&mut a, &mut b);
    }
    a.branch = Branch::Lower;
    b.branch = Branch::Upper;
    Ok((a, b))
}

/// `T0 * sum_{n=0}^{N} (+/- q)^n`.
pub fn series_partial_sum(t0: f64, eps_omega: f64, sign: Sign, terms: u32) -> f64 {
    let ratio = match sign {
        Sign::Plus => eps_omega,
        Sign::Minus => -eps_omega,
    };
    let mut power = 1.0;
    let mut sum = 0.0;
    for _ in 0..=terms {
        sum += power;
        power *= ratio;
    }
    t0 * sum
}

/// Bound on `|T - series_partial_sum(T0, q, _, N)|`: `T0 |q|^(N+1) / (1 - |q|)`.
pub fn series_truncation_bound(t0: f64, eps_omega: f64, terms: u32) -> f64 {
    let q = eps_omega.abs();
    if q >= 1.0 {
        return f64::INFINITY;
    }
    t0.abs() * q.powi(terms as i32 + 1) / (1.0 - q)
}
