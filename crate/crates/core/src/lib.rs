//! Hopf bifurcations of weakly nonlinear oscillators with delayed self-feedback
//!
//! ```text
//! x'' + x = eps * f(x, x', x(t - T))
//! ```
//!
//! for Duffing, van der Pol and Erneux-Grasman nonlinearities. Critical
//! delays are obtained three ways: closed forms of the averaged slow flow
//! with and without the delayed amplitudes ([`hopf`]), numerical roots of
//! characteristic equations ([`charsolve`]), and direct simulation of the
//! delay equation ([`ddesim`]).

pub mod charsolve;
pub mod curves;
pub mod ddesim;
pub mod error;
pub mod hopf;
pub mod slowflow;
pub mod systems;
pub mod table;

pub use error::{Error, Result};
pub use hopf::{Branch, HopfPoint, Method};
pub use systems::{SystemKind, SystemSpec};
