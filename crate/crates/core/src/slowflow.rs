//! First-order slow flows of the three oscillators.
//!
//! With `x ~ A(eta) cos t + B(eta) sin t` and `eta = eps t`, the delayed
//! amplitudes `A_d, B_d` are the amplitudes at `eta - eps T`. Passing the
//! current state as the delayed one gives the undelayed (approach I) flow.
//!
//! Duffing:
//!
//! ```text
//! A' = -alpha A/2 + 3 gamma B (A^2 + B^2)/8 - (k/2)(A_d sin T + B_d cos T)
//! B' = -alpha B/2 - 3 gamma A (A^2 + B^2)/8 - (k/2)(B_d sin T - A_d cos T)
//! ```
//!
//! van der Pol replaces the Duffing terms by `(A/2)(1 - R^2/4)` and
//! `(B/2)(1 - R^2/4)`. Erneux-Grasman adds the phase drift of `-eps k x`,
//! i.e. `+(k/2) B` in `A'` and `-(k/2) A` in `B'`.

use crate::error::{Error, Result};
use crate::systems::{SystemKind, SystemSpec};

/// Radii at or below this are rejected by [`polar_rhs`].
pub const POLAR_RADIUS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneState {
    pub a: f64,
    pub b: f64,
    pub eta: f64,
}

impl PlaneState {
    pub fn new(a: f64, b: f64) -> Self {
        PlaneState { a, b, eta: 0.0 }
    }

    pub fn radius(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn to_polar(&self) -> PolarState {
        PolarState {
            r: self.radius(),
            theta: self.b.atan2(self.a),
            eta: self.eta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    pub r: f64,
    pub theta: f64,
    pub eta: f64,
}

impl PolarState {
    pub fn to_plane(&self) -> PlaneState {
        let (s, c) = self.theta.sin_cos();
        PlaneState {
            a: self.r * c,
            b: self.r * s,
            eta: self.eta,
        }
    }
}

/// Feedback and rotation part of the slow flow; linear in the states.
fn linear_terms(spec: &SystemSpec, delay: f64, now: &PlaneState, delayed: &PlaneState) -> (f64, f64) {
    let half_k = 0.5 * spec.k;
    let (s, c) = delay.sin_cos();
    let mut da = -half_k * delayed.a * s - half_k * delayed.b * c;
    let mut db = -half_k * delayed.b * s + half_k * delayed.a * c;
    match spec.kind {
        SystemKind::Duffing => {
            da -= 0.5 * spec.alpha * now.a;
            db -= 0.5 * spec.alpha * now.b;
        }
        SystemKind::VanDerPol => {
            da += 0.5 * now.a;
            db += 0.5 * now.b;
        }
        SystemKind::ErneuxGrasman => {
            da += 0.5 * now.a + half_k * now.b;
            db += 0.5 * now.b - half_k * now.a;
        }
    }
    (da, db)
}

/// Slow-flow derivatives `(dA/d eta, dB/d eta)`.
pub fn cartesian_rhs(spec: &SystemSpec, delay: f64, now: &PlaneState, delayed: &PlaneState) -> (f64, f64) {
    let (mut da, mut db) = linear_terms(spec, delay, now, delayed);
    let (a, b) = (now.a, now.b);
    let r2 = a * a + b * b;
    match spec.kind {
        SystemKind::Duffing => {
            let g = 3.0 * spec.gamma / 8.0;
            da += g * b * r2;
            db -= g * a * r2;
        }
        SystemKind::VanDerPol | SystemKind::ErneuxGrasman => {
            da -= a * r2 / 8.0;
            db -= b * r2 / 8.0;
        }
    }
    (da, db)
}

/// Slow flow linearised about the origin (cubic terms dropped).
pub fn linearized_cartesian_rhs(
    spec: &SystemSpec,
    delay: f64,
    now: &PlaneState,
    delayed: &PlaneState,
) -> (f64, f64) {
    linear_terms(spec, delay, now, delayed)
}

/// Slow-flow derivatives `(dR/d eta, d theta/d eta)` with `A = R cos theta`,
/// `B = R sin theta`.
pub fn polar_rhs(spec: &SystemSpec, delay: f64, now: &PolarState, delayed: &PolarState) -> Result<(f64, f64)> {
    if !(now.r > POLAR_RADIUS_TOLERANCE) {
        return Err(Error::PolarSingularity { radius: now.r });
    }
    match spec.kind {
        SystemKind::Duffing => {
            let half_k = 0.5 * spec.k;
            let phase = delayed.theta - now.theta + delay;
            let (s, c) = phase.sin_cos();
            let dr = -0.5 * spec.alpha * now.r - half_k * delayed.r * s;
            let dtheta =
                -3.0 * spec.gamma * now.r * now.r / 8.0 + half_k * (delayed.r / now.r) * c;
            Ok((dr, dtheta))
        }
        SystemKind::VanDerPol | SystemKind::ErneuxGrasman => {
            let p = now.to_plane();
            let (da, db) = cartesian_rhs(spec, delay, &p, &delayed.to_plane());
            let dr = (p.a * da + p.b * db) / now.r;
            let dtheta = (p.a * db - p.b * da) / (now.r * now.r);
            Ok((dr, dtheta))
        }
    }
}
