//! Linearized optomechanics in traveling-wave (whispering-gallery) microresonators.
//!
//! Three devices are modelled from their linearized Hamiltonians:
//!
//! * [`pairgen`]: CW/CCW photon-pair generation from a red/blue pumped
//!   breathing mode, characterised by a moment-ratio nonclassicality witness.
//! * [`nonreciprocity`]: phase-controlled CW↔CCW conversion through two
//!   mechanical modes, via the input-output scattering matrix.
//! * [`phonon_pt`]: parity-time symmetry of backscattering-coupled acoustic
//!   modes with optically induced gain and loss.
//!
//! Every device result can be computed along two independent routes:
//! the exact Gaussian engine in [`gaussian`] and the truncated Fock-space
//! master-equation engine in [`hilbert`] (or closed forms vs. direct solves).
//!
//! Units: every frequency, rate and coupling in the public API is a
//! `ν = ω/2π` value in MHz. Conversion to angular units happens inside the
//! solvers that need it (see [`units`]).

pub mod error;
pub mod fock_model;
pub mod gaussian;
pub mod hilbert;
pub mod linalg;
pub mod modes;
pub mod nonreciprocity;
pub mod pairgen;
pub mod peaks;
pub mod phonon_pt;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub mod units {
    /// Multiplies a `ν` value in MHz to get an angular rate in rad/μs.
    pub const TWO_PI: f64 = std::f64::consts::TAU;

    /// Banner printed by front ends so nobody mixes ω and ν.
    pub const CONVENTION: &str = "all rates are ν = ω/2π in MHz";

    #[inline]
    pub fn to_angular(nu_mhz: f64) -> f64 {
        TWO_PI * nu_mhz
    }
}
