//! Levin-type quadrature for highly oscillatory integrals on `[-1, 1]`,
//! collocated on Clenshaw-Curtis points and solved in `O(nu log nu)` time.

pub mod amplitude;
pub mod banded;
pub mod bessel;
pub mod cheb;
pub mod condest;
pub mod dct;
pub mod dense;
pub mod error;
pub mod hockney;
pub mod levin;
pub mod operators;
pub mod oscillator;
pub mod poly;
pub mod reference;

pub use amplitude::{amplitude_from_name, manufactured, AmplitudeSpec, EndpointDerivatives};
pub use banded::{banded_lu_factor, banded_solve, BandedLU, BandedMatrix};
pub use bessel::bessel_eval;
pub use cheb::{cheb_endpoint_derivative, cheb_eval, clenshaw_curtis_points, ChebCoeffVector, ClenshawCurtisGrid};
pub use error::{Error, Result};
pub use levin::{quadrature, FastLevin, LevinProblem, QuadratureResult, SolverPath};
pub use oscillator::{make_bessel, make_bessel_auto, make_exponential, OscillatorConfig, OscillatorSystem};
pub use poly::Polynomial;
pub use reference::{cc_oracle, dense_levin_solve, oracle_integral};
