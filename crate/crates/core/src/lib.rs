//! Quasi-Monte Carlo toolkit built on exact arithmetic.
//!
//! The crate constructs digital nets over GF(2) (including digitally
//! interlaced higher order nets), classical planar point sets (Fibonacci
//! lattice, Halton, Zaremba, random digital shifts), applies the tent
//! transform, certifies the quality parameter `t` of a net and evaluates the
//! worst-case integration error in the Sobolev space of dominating mixed
//! smoothness 2 for three equivalent reproducing kernels.
//!
//! Every quantity up to the final square root is an exact rational number.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`exact`] | rationals, GF(2) bit matrices and rank, square-root digits |
//! | [`net`] | generator matrices, net points, interlacing, `t` certification |
//! | [`pointsets`] | Fibonacci, Halton, Zaremba, digital shifts |
//! | [`tent`] | tent transform on points and on Faber coefficients |
//! | [`kernels`] | Bernoulli polynomials, kernels, worst-case errors |
//! | [`faber`] | Faber-Schauder analysis, reconstruction, dyadic norms |
//! | [`quadrature`] | test functions, QMC estimates, exact integrals |
//! | [`experiment`] | configuration files, sweeps, CSV and slope fitting |

pub mod error;
pub mod exact;
pub mod experiment;
pub mod faber;
pub mod kernels;
pub mod net;
pub mod pointsets;
pub mod quadrature;
pub mod tent;

pub use error::{Error, Result};
pub use exact::Rational;
pub use net::{GeneratorMatrixSet, PointSet};
