//! Characteristic systems in `(omega, T)` and their numerical roots.
//!
//! Two systems are solved here. The slow-flow system is the determinant of
//! the linearised delayed slow flow at `lambda = i omega`:
//!
//! ```text
//! det = (b - (k/2) E sin T)^2 + ((k/2) E cos T - r)^2,   E = exp(-i omega eps T)
//! ```
//!
//! with `b = -alpha/2 - i omega` (Duffing) or `1/2 - i omega` (van der Pol,
//! Erneux-Grasman) and `r = k/2` for Erneux-Grasman, zero otherwise. The
//! Duffing residual is scaled by 16 so its real and imaginary parts are the
//! integer-coefficient trigonometric polynomials
//!
//! ```text
//! 4k^2 cos 2eωT + 16kω sinT sin eωT + 8αk sinT cos eωT - 16ω^2 + 4α^2
//! -4k^2 sin 2eωT - 8αk sinT sin eωT + 16kω sinT cos eωT + 16αω
//! ```
//!
//! The exact system is [`crate::systems::exact_char_residual`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hopf::{self, Branch, HopfPoint, Method};
use crate::systems::{self, SystemKind, SystemSpec};

/// Newton convergence tolerance on the residual norm.
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 50;
/// Maximum number of step halvings per Newton iteration.
pub const NEWTON_MAX_HALVINGS: u32 = 8;
/// Jacobians with smaller determinant are treated as singular.
pub const SINGULAR_DET: f64 = 1e-14;
/// Roots with a smaller frequency end a continuation.
pub const MIN_OMEGA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPair {
    pub re: f64,
    pub im: f64,
}

impl ResidualPair {
    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl From<Complex64> for ResidualPair {
    fn from(z: Complex64) -> Self {
        ResidualPair { re: z.re, im: z.im }
    }
}

/// Row-major 2x2 Jacobian `[[dre/domega, dre/dT], [dim/domega, dim/dT]]`.
pub type Jacobian = [[f64; 2]; 2];

/// A pair of real equations in `(omega, T)`.
pub trait CharacteristicSystem {
    fn residual(&self, omega: f64, delay: f64) -> ResidualPair;
    fn jacobian(&self, omega: f64, delay: f64) -> Jacobian;
}

fn jacobian_from_partials(d_omega: Complex64, d_delay: Complex64) -> Jacobian {
    [[d_omega.re, d_delay.re], [d_omega.im, d_delay.im]]
}

/// Determinant of the linearised delayed slow flow.
#[derive(Debug, Clone, Copy)]
pub struct SlowFlowChar {
    pub spec: SystemSpec,
}

impl SlowFlowChar {
    pub fn new(spec: SystemSpec) -> Self {
        SlowFlowChar { spec }
    }

    fn scale(&self) -> f64 {
        match self.spec.kind {
            SystemKind::Duffing => 16.0,
            _ => 1.0,
        }
    }

    fn parts(&self) -> (f64, f64) {
        let half_k = 0.5 * self.spec.k;
        match self.spec.kind {
            SystemKind::Duffing => (-0.5 * self.spec.alpha, 0.0),
            SystemKind::VanDerPol => (0.5, 0.0),
            SystemKind::ErneuxGrasman => (0.5, half_k),
        }
    }

    /// Scaled determinant and its partials in `omega` and `T`.
    fn evaluate(&self, omega: f64, delay: f64) -> (Complex64, Complex64, Complex64) {
        let i = Complex64::i();
        let eps = self.spec.epsilon;
        let half_k = 0.5 * self.spec.k;
        let (diag, rot) = self.parts();
        let (s, c) = delay.sin_cos();
        let e = (-i * omega * eps * delay).exp();
        let e_w = -i * eps * delay * e;
        let e_t = -i * eps * omega * e;

        let p = diag - i * omega - half_k * e * s;
        let q = half_k * e * c - rot;
        let det = p * p + q * q;

        let p_w = -i - half_k * e_w * s;
        let q_w = half_k * e_w * c;
        let p_t = -half_k * (e_t * s + e * c);
        let q_t = half_k * (e_t * c - e * s);
        let d_w = 2.0 * (p * p_w + q * q_w);
        let d_t = 2.0 * (p * p_t + q * q_t);

        let scale = self.scale();
        (scale * det, scale * d_w, scale * d_t)
    }
}

impl CharacteristicSystem for SlowFlowChar {
    fn residual(&self, omega: f64, delay: f64) -> ResidualPair {
        ResidualPair::from(self.evaluate(omega, delay).0)
    }

    fn jacobian(&self, omega: f64, delay: f64) -> Jacobian {
        let (_, d_w, d_t) = self.evaluate(omega, delay);
        jacobian_from_partials(d_w, d_t)
    }
}

/// Characteristic function of the origin of the unaveraged DDE.
#[derive(Debug, Clone, Copy)]
pub struct ExactChar {
    pub spec: SystemSpec,
}

impl ExactChar {
    pub fn new(spec: SystemSpec) -> Self {
        ExactChar { spec }
    }
}

impl CharacteristicSystem for ExactChar {
    fn residual(&self, omega: f64, delay: f64) -> ResidualPair {
        systems::exact_char_residual(&self.spec, omega, delay)
    }

    fn jacobian(&self, omega: f64, delay: f64) -> Jacobian {
        let (d_w, d_t) = systems::exact_char_partials(&self.spec, omega, delay);
        jacobian_from_partials(d_w, d_t)
    }
}

/// Slow-flow characteristic residual of approach II.
pub fn slowflow_char_residual(spec: &SystemSpec, omega: f64, delay: f64) -> ResidualPair {
    SlowFlowChar::new(*spec).residual(omega, delay)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOutcome {
    pub omega: f64,
    pub delay: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Damped Newton iteration on a 2x2 characteristic system.
///
/// Each step is halved up to [`NEWTON_MAX_HALVINGS`] times until the residual
/// norm decreases. Converged iff the norm drops below `tol`.
pub fn newton_solve<S: CharacteristicSystem + ?Sized>(
    system: &S,
    initial: (f64, f64),
    max_iter: usize,
    tol: f64,
) -> Result<NewtonOutcome> {
    let (mut omega, mut delay) = initial;
    if !(omega.is_finite() && delay.is_finite()) {
        return Err(Error::InvalidInput("non-finite Newton seed".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let mut r = system.residual(omega, delay);
    let mut norm = r.norm();
    let mut iterations = 0;
    while norm >= tol {
        if iterations == max_iter || !norm.is_finite() {
            return Err(Error::Divergence {
                omega,
                delay,
                residual_norm: norm,
                iterations,
            });
        }
        let (dw, dt) = newton_step(system, omega, delay, &r)?;
        let mut lambda = 1.0;
        let mut trial = (omega - dw, delay - dt);
        let mut trial_r = system.residual(trial.0, trial.1);
        for _ in 0..NEWTON_MAX_HALVINGS {
            if trial_r.norm() < norm {
                break;
            }
            lambda *= 0.5;
            trial = (omega - lambda * dw, delay - lambda * dt);
            trial_r = system.residual(trial.0, trial.1);
        }
        (omega, delay) = trial;
        r = trial_r;
        norm = r.norm();
        iterations += 1;
    }
    // one polishing step, kept only if it helps
    if let Ok((dw, dt)) = newton_step(system, omega, delay, &r) {
        let pr = system.residual(omega - dw, delay - dt);
        if pr.norm() < norm {
            omega -= dw;
            delay -= dt;
            norm = pr.norm();
        }
    }
    Ok(NewtonOutcome {
        omega,
        delay,
        residual_norm: norm,
        iterations,
    })
}

fn newton_step<S: CharacteristicSystem + ?Sized>(
    system: &S,
    omega: f64,
    delay: f64,
    r: &ResidualPair,
) -> Result<(f64, f64)> {
    let j = system.jacobian(omega, delay);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det.abs() >= SINGULAR_DET) {
        return Err(Error::SingularJacobian { omega, delay, det });
    }
    let dw = (j[1][1] * r.re - j[0][1] * r.im) / det;
    let dt = (-j[1][0] * r.re + j[0][0] * r.im) / det;
    Ok((dw, dt))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    K,
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    /// Number of grid points, endpoints included.
    pub steps: usize,
}

impl Sweep {
    pub fn over_k(from: f64, to: f64, steps: usize) -> Self {
        Sweep { parameter: SweepParameter::K, from, to, steps }
    }

    pub fn over_epsilon(from: f64, to: f64, steps: usize) -> Self {
        Sweep { parameter: SweepParameter::Epsilon, from, to, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.from, self.to, self.steps)
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    SlowFlow,
    ExactChar,
}

impl Target {
    pub fn method(self) -> Method {
        match self {
            Target::SlowFlow => Method::ApproachII,
            Target::ExactChar => Method::ExactChar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub sweep_value: f64,
    pub point: HopfPoint,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Why a continuation stopped before the end of its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub at: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub truncated: Option<Truncation>,
}

/// Ratio bound between an accepted increment in `T` and the secant prediction.
const JUMP_FACTOR: f64 = 5.0;
/// Relative size below which an increment in `T` is never called a jump.
const JUMP_FLOOR: f64 = 1e-2;

/// Starting `(omega, T)` for a root on `branch`.
///
/// The slow-flow target starts from the approach I delay and the slow
/// frequency. The exact target starts from the approach II delay `T` with
/// physical frequency `T0 / T`, where `T0` is the approach I delay; this is
/// `1 +/- eps omega` to first order. Erneux-Grasman uses the frequency
/// pairing that solves the slow flow. Where the approach II series diverges
/// the exact target falls back to `(1, T0)`.
pub fn initial_guess(spec: &SystemSpec, branch: Branch, target: Target) -> Result<(f64, f64)> {
    let first = hopf::approach1_point(spec, branch, 0)?;
    if target == Target::SlowFlow {
        return Ok((first.omega, first.delay));
    }
    let second = match spec.kind {
        SystemKind::ErneuxGrasman => hopf::erneux_approach2_branch(spec, branch, hopf::ErneuxPairing::Derived, 0),
        _ => hopf::approach2_branch(spec, branch, 0),
    };
    Ok(match second {
        Ok(p) if p.delay > 0.0 => (first.delay / p.delay, p.delay),
        _ => (1.0, first.delay),
    })
}

/// Natural-parameter continuation of one Hopf branch.
///
/// The first solve is seeded by [`initial_guess`] at the first grid value;
/// later solves are seeded by secant extrapolation of the previous roots.
/// Branch identity is carried by seed continuity only.
pub fn continuation_sweep(
    template: &SystemSpec,
    sweep: &Sweep,
    branch: Branch,
    target: Target,
) -> Result<Curve> {
    continuation_on_grid(template, sweep.parameter, &sweep.values(), branch, target)
}

/// [`continuation_sweep`] over an explicit, monotone list of parameter values.
pub fn continuation_on_grid(
    template: &SystemSpec,
    parameter: SweepParameter,
    values: &[f64],
    branch: Branch,
    target: Target,
) -> Result<Curve> {
    let Some(&first) = values.first() else {
        return Err(Error::InvalidInput("empty sweep".into()));
    };
    let apply = |value: f64| match parameter {
        SweepParameter::K => template.with_k(value),
        SweepParameter::Epsilon => template.with_epsilon(value),
    };
    let first_spec = apply(first);
    let seed = initial_guess(&first_spec, branch, target).map_err(|e| Error::SeedFailure(Box::new(e)))?;

    let mut points: Vec<CurvePoint> = Vec::with_capacity(values.len());
    let mut truncated = None;
    for (idx, &value) in values.iter().enumerate() {
        let spec = apply(value);
        let guess = match points.as_slice() {
            [] => seed,
            [prev] => (prev.point.omega, prev.point.delay),
            [.., a, b] => {
                let f = (value - b.sweep_value) / (b.sweep_value - a.sweep_value);
                (
                    b.point.omega + f * (b.point.omega - a.point.omega),
                    b.point.delay + f * (b.point.delay - a.point.delay),
                )
            }
        };
        let solved = match target {
            Target::SlowFlow => newton_solve(&SlowFlowChar::new(spec), guess, NEWTON_MAX_ITER, NEWTON_TOL),
            Target::ExactChar => newton_solve(&ExactChar::new(spec), guess, NEWTON_MAX_ITER, NEWTON_TOL),
        };
        let out = match solved {
            Ok(out) => out,
            Err(e) if idx == 0 => return Err(Error::SeedFailure(Box::new(e))),
            Err(e) => {
                truncated = Some(Truncation { at: value, reason: e.to_string() });
                break;
            }
        };
        if let Err(reason) = accept(&points, guess, &out) {
            if idx == 0 {
                return Err(Error::SeedFailure(Box::new(Error::InvalidInput(reason))));
            }
            truncated = Some(Truncation { at: value, reason });
            break;
        }
        points.push(CurvePoint {
            sweep_value: value,
            point: HopfPoint {
                k: spec.k,
                delay: out.delay,
                omega: out.omega,
                branch,
                method: target.method(),
            },
            residual_norm: out.residual_norm,
            iterations: out.iterations,
        });
    }
    Ok(Curve { points, truncated })
}

fn accept(points: &[CurvePoint], guess: (f64, f64), out: &NewtonOutcome) -> std::result::Result<(), String> {
    if !(out.omega > MIN_OMEGA) {
        return Err(format!("frequency collapsed to {:e}", out.omega));
    }
    if !(out.delay >= 0.0) {
        return Err(format!("negative delay {}", out.delay));
    }
    if points.len() >= 2 {
        let prev = points[points.len() - 1].point.delay;
        let predicted = (guess.1 - prev).abs();
        let jump = (out.delay - prev).abs();
        // genuine branch jumps move T by O(1), so small absolute moves pass
        let floor = JUMP_FLOOR * (1.0 + prev.abs());
        if jump > JUMP_FACTOR * predicted.max(floor) {
            return Err(format!(
                "branch jump: |dT| = {jump:e} vs predicted {predicted:e}"
            ));
        }
    }
    Ok(())
}
