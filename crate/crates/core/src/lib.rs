//! Padé-type approximants to Lauricella-type Laurent series attached to a
//! first-order differential operator `L = −a(z) d/dz + b(z)` over ℚ, with
//! exact certificates for the approximants and determinants and rigorous
//! Archimedean and p-adic evaluation of the resulting linear forms.

pub mod determinant;
pub mod error;
pub mod evaluate;
pub mod height;
pub mod hypotheses;
pub mod interval;
pub mod instance;
pub mod linalg;
pub mod operator;
pub mod padic;
pub mod pade;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod series;
pub mod solutions;

pub use error::{Error, Result};
pub use instance::Instance;
pub use poly::Poly;
pub use rational::Rational;
pub use series::{LaurentSeries, Order};
