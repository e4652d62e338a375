//! Lossless serialized forms of scalars and rational functions.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{Poly, RatFunc, Scalar};
use crate::error::{Error, Result};

/// `Σ (num/den) ζ_k^e`, stored as `{n, coeffs: [[k, e, num, den], …]}` with `k = n` for every term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactScalar {
    pub n: u64,
    pub coeffs: Vec<(u64, u64, String, String)>,
    /// Floating rendering `[re, im]`.
    pub float: [f64; 2],
}

impl From<&Scalar> for ExactScalar {
    fn from(s: &Scalar) -> Self {
        let (n, terms) = s.coeff_list();
        let z = s.embed_float();
        ExactScalar {
            n,
            coeffs: terms.into_iter().map(|(e, a, b)| (n, e, a.to_string(), b.to_string())).collect(),
            float: [z.re, z.im],
        }
    }
}

impl ExactScalar {
    pub fn to_scalar(&self) -> Result<Scalar> {
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (k, e, a, b) in &self.coeffs {
            if *k != self.n {
                return Err(Error::Invalid(format!("term order {k} differs from field order {}", self.n)));
            }
            let a: BigInt = a.parse().map_err(|_| Error::Invalid(format!("bad numerator {a}")))?;
            let b: BigInt = b.parse().map_err(|_| Error::Invalid(format!("bad denominator {b}")))?;
            if b == BigInt::from(0) {
                return Err(Error::DivisionByZero);
            }
            terms.push((*e, BigRational::new(a, b)));
        }
        Ok(Scalar::from_terms(self.n, terms))
    }
}

/// `X^shift · num(X) / den(X)` with exact coefficient lists, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactRatFunc {
    pub shift: i64,
    pub num: Vec<ExactScalar>,
    pub den: Vec<ExactScalar>,
}

fn coeffs(p: &Poly) -> Vec<ExactScalar> {
    p.coeffs().iter().map(ExactScalar::from).collect()
}

impl From<&RatFunc> for ExactRatFunc {
    fn from(f: &RatFunc) -> Self {
        ExactRatFunc { shift: f.shift(), num: coeffs(f.numerator()), den: coeffs(f.denominator()) }
    }
}

impl ExactRatFunc {
    pub fn to_ratfunc(&self) -> Result<RatFunc> {
        let num = self.num.iter().map(ExactScalar::to_scalar).collect::<Result<Vec<_>>>()?;
        let den = self.den.iter().map(ExactScalar::to_scalar).collect::<Result<Vec<_>>>()?;
        RatFunc::from_parts(self.shift, num, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = &Scalar::sqrt_prime(5) + &Scalar::from_ratio(-3, 7);
        let e = ExactScalar::from(&s);
        let j = serde_json::to_string(&e).unwrap();
        let back: ExactScalar = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_scalar().unwrap(), s);
        let f = RatFunc::geometric(Scalar::root_of_unity(3, 1), 2).mul(&RatFunc::monomial(s, -1));
        let g = ExactRatFunc::from(&f);
        assert_eq!(g.to_ratfunc().unwrap(), f);
    }
}
