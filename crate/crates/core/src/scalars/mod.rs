//! Exact scalars (cyclotomic numbers) and rational functions in `X = q^{-s}`.

mod cyclo;
mod exact;
mod ratfunc;

pub use cyclo::{RootSum, Scalar};
pub use exact::{ExactRatFunc, ExactScalar};
pub use ratfunc::{Poly, RatFunc};
