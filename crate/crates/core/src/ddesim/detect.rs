use super::{classify_long_run, integrate_from, tail_frequency, ClassifyTolerances, History};
use crate::error::{Error, Result};
use crate::hopf::{Branch, HopfPoint, Method};
use crate::systems::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    pub dt: f64,
    /// Defaults to `400 / eps`.
    pub t_end: Option<f64>,
    pub x0: f64,
    pub v0: f64,
    pub settle_fraction: f64,
    pub tolerances: ClassifyTolerances,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            dt: 0.05,
            t_end: None,
            x0: 0.1,
            v0: 0.0,
            settle_fraction: 0.25,
            tolerances: ClassifyTolerances::default(),
        }
    }
}

struct Probe {
    stable: bool,
    omega: Option<f64>,
}

fn probe(spec: &SystemSpec, delay: f64, opts: &DetectOptions) -> Result<Probe> {
    let t_end = opts.t_end.unwrap_or(400.0 / spec.epsilon);
    let traj = integrate_from(
        spec,
        delay,
        &History::Constant(opts.x0),
        (opts.x0, opts.v0),
        opts.dt,
        t_end,
    )?;
    let class = classify_long_run(&traj, opts.settle_fraction, &opts.tolerances).map_err(|e| {
        Error::AmbiguousClassification {
            delay,
            reason: e.to_string(),
        }
    })?;
    Ok(Probe {
        stable: class.origin_stable(),
        omega: tail_frequency(&traj, opts.settle_fraction),
    })
}

/// Locates the delay at which the origin changes stability between `t_lo`
/// and `t_hi` by bisection on simulated long-run behaviour.
///
/// The frequency is taken from the tail oscillation on the unstable side
/// (zero if that side never oscillates).
/// The branch is `Lower` when the stability just below the crossing matches
/// that at small delays, `Upper` otherwise.
pub fn detect_hopf_bisection(
    spec: &SystemSpec,
    k: f64,
    t_lo: f64,
    t_hi: f64,
    tol_delay: f64,
    opts: &DetectOptions,
) -> Result<HopfPoint> {
    if !(t_lo >= 0.0 && t_lo < t_hi && t_hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bracket must satisfy 0 <= t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    if !(tol_delay > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol_delay}")));
    }
    let spec = spec.with_k(k);
    spec.validate()?;

    let lo = probe(&spec, t_lo, opts)?;
    let hi = probe(&spec, t_hi, opts)?;
    if lo.stable == hi.stable {
        return Err(Error::NoCrossing { t_lo, t_hi });
    }
    let stable_below = lo.stable;
    let mut omega = if lo.stable { hi.omega } else { lo.omega };
    let (mut a, mut b) = (t_lo, t_hi);
    while b - a > tol_delay {
        let mid = 0.5 * (a + b);
        let p = probe(&spec, mid, opts)?;
        if !p.stable && p.omega.is_some() {
            omega = p.omega;
        }
        if p.stable == stable_below {
            a = mid;
        } else {
            b = mid;
        }
    }
    let branch = if stable_below == spec.kind.origin_stable_at_small_delay() {
        Branch::Lower
    } else {
        Branch::Upper
    };
    Ok(HopfPoint {
        k,
        delay: 0.5 * (a + b),
        omega: omega.unwrap_or(0.0),
        branch,
        method: Method::Simulated,
    })
}
