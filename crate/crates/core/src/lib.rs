//! Fractional open-system dynamics: Mittag-Leffler propagators, Caputo
//! fractional master equations, subordinated semigroups, and the exactly
//! solvable pure-dephasing spin-boson model used to benchmark them.

pub mod cli;
pub mod error;
pub mod fitting;
pub mod fracsolve;
pub mod kernels;
pub mod lindblad;
pub mod quad;
pub mod specfun;
pub mod spinboson;
pub mod subordination;

pub use error::{Error, Result};
pub use specfun::FractionalOrder;
