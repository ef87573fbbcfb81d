//! Rigorous arbitrary-precision evaluation of the Hurwitz zeta function and
//! its derivatives, certified refinement of Riemann zeta zeros, and batch
//! computation of Keiper-Li coefficients and generalized Stieltjes constants.
//!
//! Every numerical result is an enclosure: a midpoint together with a radius
//! that is guaranteed to contain the mathematically exact value. Errors from
//! rounding, series truncation, and tail estimation are all accounted for.

pub mod ball;
pub mod bernoulli;
pub mod bigfloat;
pub mod complex;
pub mod constants;
pub mod elem;
pub mod error;
pub mod fmt;
pub mod gamma;
pub mod selftest;
pub mod series;
pub mod zero;
pub mod zeta;

pub use ball::RealBall;
pub use bigfloat::{BigFloat, Rounding};
pub use complex::ComplexBall;
pub use error::{Error, Result};
pub use series::{BallSeries, RealSeries};
