//! Numerical toolkit for an electron in a plane electromagnetic wave.
//!
//! The crate evaluates the exact Volkov solution of the Dirac equation in a
//! linearly polarized monochromatic wave and quantifies its electron/positron
//! (positive/negative frequency) content by three independent routes:
//!
//! * an analytic expansion into the discrete ladder of plane-wave modes
//!   (Fourier quadrature and generalized Bessel functions, [`modes`]),
//! * momentum-space energy projection of a grid snapshot plus time-of-flight
//!   free evolution ([`grid`], [`separation`]),
//! * a Born-series solution of the Feynman integral equation for compactly
//!   supported fields, decomposed into the four scattering channels
//!   ([`scattering`]).
//!
//! Position and velocity expectation values ([`observables`]) expose the
//! zitterbewegung of mixed-frequency states, and [`barrier`] provides the
//! one-dimensional potential-barrier analog in which the same four-process
//! structure appears in elementary form.
//!
//! Units are natural throughout: hbar = c = 1, energies and momenta in units
//! of the electron mass m (m itself is a runtime parameter, default 1), so
//! lengths and times are in 1/m. The metric signature is (+,-,-,-) and the
//! gamma matrices are in the Dirac (standard) representation.

// Negated comparisons like `!(h > 0.0)` are deliberate: they reject NaN
// along with the out-of-range values. Indexed loops are kept where several
// arrays are walked in lockstep.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod barrier;
pub mod bessel;
pub mod grid;
pub mod modes;
pub mod observables;
pub mod reference;
pub mod runner;
pub mod scattering;
pub mod separation;
pub mod util;
pub mod volkov;

/// Crate-wide error type. The CLI maps the variants to exit codes
/// (validation -> 2, numerical -> 3).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("validation: {0}")]
    Validation(String),
    #[error("numerical: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the batch driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) => 2,
            Error::Numerical(_) => 3,
            Error::Io(_) => 1,
        }
    }
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
