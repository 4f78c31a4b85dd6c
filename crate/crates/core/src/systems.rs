//! The three benchmark oscillators with delayed self-feedback,
//!
//! ```text
//! x'' + x = eps * f(x, x', x(t - T))
//! ```
//!
//! with `f` one of
//!
//! * Duffing: `-alpha x' - gamma x^3 + k x_d`
//! * van der Pol: `x' (1 - x^2) + k x_d`
//! * Erneux-Grasman: `x' (1 - x^2) + k x_d - k x`
//!
//! and the characteristic function of the origin of each unaveraged DDE.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::charsolve::ResidualPair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemKind {
    Duffing,
    VanDerPol,
    ErneuxGrasman,
}

impl SystemKind {
    pub const ALL: [SystemKind; 3] = [
        SystemKind::Duffing,
        SystemKind::VanDerPol,
        SystemKind::ErneuxGrasman,
    ];

    /// Name used on the command line and in CSV files.
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Duffing => "duffing",
            SystemKind::VanDerPol => "vdp",
            SystemKind::ErneuxGrasman => "erneux",
        }
    }

    /// Whether the origin is linearly stable for small positive delays.
    ///
    /// Duffing is damped at the origin; the two self-excited systems are not.
    pub fn origin_stable_at_small_delay(self) -> bool {
        matches!(self, SystemKind::Duffing)
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "duffing" => Ok(SystemKind::Duffing),
            "vdp" | "vanderpol" | "van-der-pol" => Ok(SystemKind::VanDerPol),
            "erneux" | "erneux-grasman" => Ok(SystemKind::ErneuxGrasman),
            other => Err(Error::InvalidInput(format!("unknown system '{other}'"))),
        }
    }
}

/// Oscillator kind plus parameters.
///
/// `alpha` and `gamma` only enter the Duffing equations; they are carried
/// for every kind so one parameter set drives all commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub epsilon: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub k: f64,
}

impl SystemSpec {
    pub fn duffing(epsilon: f64, alpha: f64, gamma: f64, k: f64) -> Self {
        SystemSpec {
            kind: SystemKind::Duffing,
            epsilon,
            alpha,
            gamma,
            k,
        }
    }

    pub fn van_der_pol(epsilon: f64, k: f64) -> Self {
        SystemSpec {
            kind: SystemKind::VanDerPol,
            epsilon,
            alpha: 0.0,
            gamma: 0.0,
            k,
        }
    }

    pub fn erneux(epsilon: f64, k: f64) -> Self {
        SystemSpec {
            kind: SystemKind::ErneuxGrasman,
            epsilon,
            alpha: 0.0,
            gamma: 0.0,
            k,
        }
    }

    pub fn with_k(self, k: f64) -> Self {
        SystemSpec { k, ..self }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        SystemSpec { epsilon, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidInput(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        if !self.k.is_finite() || !self.gamma.is_finite() || !self.alpha.is_finite() {
            return Err(Error::InvalidInput("non-finite parameter".into()));
        }
        if self.kind == SystemKind::Duffing && self.alpha < 0.0 {
            return Err(Error::InvalidInput(format!(
                "Duffing damping alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullState {
    pub x: f64,
    pub v: f64,
    pub t: f64,
}

/// Right-hand side of the first-order system `(x' = v, v' = -x + eps f)`.
pub fn full_rhs(spec: &SystemSpec, state: &FullState, x_delayed: f64) -> (f64, f64) {
    let FullState { x, v, .. } = *state;
    let k = spec.k;
    let forcing = match spec.kind {
        SystemKind::Duffing => -spec.alpha * v - spec.gamma * x * x * x + k * x_delayed,
        SystemKind::VanDerPol => v * (1.0 - x * x) + k * x_delayed,
        SystemKind::ErneuxGrasman => v * (1.0 - x * x) + k * x_delayed - k * x,
    };
    (v, -x + spec.epsilon * forcing)
}

/// Coefficients of `lambda^2 + c1 lambda + c0 - eps k exp(-lambda T)`.
fn char_coefficients(spec: &SystemSpec) -> (f64, f64) {
    let eps = spec.epsilon;
    match spec.kind {
        SystemKind::Duffing => (eps * spec.alpha, 1.0),
        SystemKind::VanDerPol => (-eps, 1.0),
        // -k x moves into the stiffness
        SystemKind::ErneuxGrasman => (-eps, 1.0 + eps * spec.k),
    }
}

/// Characteristic function of the linearised DDE at `lambda = i omega`.
pub fn exact_char_value(spec: &SystemSpec, omega: f64, delay: f64) -> Complex64 {
    let (c1, c0) = char_coefficients(spec);
    let lambda = Complex64::new(0.0, omega);
    lambda * lambda + c1 * lambda + c0 - spec.epsilon * spec.k * (-lambda * delay).exp()
}

/// Real and imaginary parts of the exact characteristic function.
///
/// A zero is a Hopf point of the origin of the original (unaveraged) DDE.
pub fn exact_char_residual(spec: &SystemSpec, omega: f64, delay: f64) -> ResidualPair {
    ResidualPair::from(exact_char_value(spec, omega, delay))
}

/// Partial derivatives `(d/d omega, d/d T)` of the characteristic function.
pub(crate) fn exact_char_partials(spec: &SystemSpec, omega: f64, delay: f64) -> (Complex64, Complex64) {
    let (c1, _) = char_coefficients(spec);
    let i = Complex64::i();
    let lambda = i * omega;
    let ek = spec.epsilon * spec.k * (-lambda * delay).exp();
    let d_lambda = 2.0 * lambda + c1 + ek * delay;
    (i * d_lambda, ek * lambda)
}
