//! Experimental-mathematics workbench.
//!
//! * [`numkernel`]: multiprecision reals, elementary and special functions
//! * [`quadrature`]: tanh-sinh and exp-sinh double-exponential quadrature
//! * [`ising`]: Bessel-moment integrals `C_n` and their limit `2e^(−2γ)`
//! * [`sinclab`]: the sinc sum-versus-integral identity and its breakdown
//! * [`agmpi`]: quadratic and cubic AGM, Gauss–Legendre π
//! * [`bbopt`]: Barzilai–Borwein gradient method
//! * [`recognize`]: integer relations (PSLQ) and constant recognition
//! * [`walks`]: digit streams and planar digit walks
//! * [`cli`]: the `expmath` command-line front end

pub mod agmpi;
pub mod bbopt;
pub mod cli;
pub mod error;
pub mod numkernel;
pub mod ising;
pub mod quadrature;
pub mod recognize;
pub mod sinclab;
pub mod walks;

pub use error::{Error, Result};
pub use numkernel::{BigReal, PrecisionContext};
