//! Rational functions in `X = q^{-s}` with cyclotomic coefficients.

use std::fmt;

use super::cyclo::Scalar;
use crate::error::{Error, Result};

/// Dense polynomial in `X`, lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly(Vec<Scalar>);

impl Poly {
    pub fn new(mut c: Vec<Scalar>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Scalar> {
        self.0.last()
    }

    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let z = Scalar::zero();
        Poly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect())
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Poly::new(out)
    }

    fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.0.iter().map(|x| x * c).collect())
    }

    /// Multiplies by `X^k`.
    fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Scalar::zero(); k];
        v.extend(self.0.iter().cloned());
        Poly(v)
    }

    fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dl = d.degree().ok_or(Error::DivisionByZero)?;
        let inv = d.lead().unwrap().inv()?;
        let mut r = self.0.clone();
        if r.len() <= dl {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut q = vec![Scalar::zero(); r.len() - dl];
        for i in (0..q.len()).rev() {
            let c = &r[i + dl] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                r[i + j] = &r[i + j] - &(&c * dj);
            }
            q[i] = c;
        }
        r.truncate(dl);
        Ok((Poly::new(q), Poly::new(r)))
    }

    fn monic(&self) -> Result<Poly> {
        let inv = self.lead().ok_or(Error::DivisionByZero)?.inv()?;
        Ok(self.scale(&inv))
    }

    fn gcd(a: &Poly, b: &Poly) -> Result<Poly> {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.divrem(&y)?;
            x = y;
            y = if r.is_zero() { r } else { r.monic()? };
        }
        x.monic()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Number of leading zero coefficients (the order at `X = 0`).
    fn low_order(&self) -> usize {
        self.0.iter().take_while(|c| c.is_zero()).count()
    }

    fn drop_low(&self, k: usize) -> Poly {
        Poly::new(self.0[k..].to_vec())
    }

    /// Order of vanishing at `x0` and the quotient by `(X - x0)^order`.
    fn order_at(&self, x0: &Scalar) -> (usize, Poly) {
        let mut p = self.clone();
        let mut k = 0;
        loop {
            if p.is_zero() {
                return (k, p);
            }
            // synthetic division by (X - x0)
            let n = p.0.len();
            let mut q = vec![Scalar::zero(); n.saturating_sub(1)];
            let mut carry = Scalar::zero();
            for i in (0..n).rev() {
                let v = &p.0[i] + &(&carry * x0);
                if i == 0 {
                    if !v.is_zero() {
                        return (k, p);
                    }
                } else {
                    q[i - 1] = v.clone();
                }
                carry = v;
            }
            p = Poly::new(q);
            k += 1;
        }
    }
}

/// `X^shift · num / den` in canonical form: `num(0) ≠ 0`, `den(0) ≠ 0`, `den` monic,
/// `gcd(num, den) = 1`. The zero function has empty `num`, `shift = 0`, `den = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    shift: i64,
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { shift: 0, num: Poly::zero(), den: Poly::constant(Scalar::one()) }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(c, 0)
    }

    /// `c · X^k`.
    pub fn monomial(c: Scalar, k: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { shift: k, num: Poly::constant(c), den: Poly::constant(Scalar::one()) }
    }

    pub fn x() -> Self {
        Self::monomial(Scalar::one(), 1)
    }

    /// `Σ c_k X^k` over integer exponents.
    pub fn laurent(terms: &[(i64, Scalar)]) -> Self {
        let Some(lo) = terms.iter().filter(|(_, c)| !c.is_zero()).map(|(k, _)| *k).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|(k, _)| *k).max().unwrap();
        let mut v = vec![Scalar::zero(); (hi - lo + 1) as usize];
        for (k, c) in terms {
            let i = (k - lo) as usize;
            v[i] = &v[i] + c;
        }
        Self::build(lo, Poly::new(v), Poly::constant(Scalar::one())).expect("denominator is one")
    }

    /// `1 / (1 - c X^k)` for `k ≥ 1`.
    pub fn geometric(c: Scalar, k: usize) -> Self {
        let mut d = vec![Scalar::zero(); k + 1];
        d[0] = Scalar::one();
        d[k] = -c;
        Self::build(0, Poly::constant(Scalar::one()), Poly::new(d)).expect("nonzero denominator")
    }

    pub fn from_parts(shift: i64, num: Vec<Scalar>, den: Vec<Scalar>) -> Result<Self> {
        Self::build(shift, Poly::new(num), Poly::new(den))
    }

    fn build(mut shift: i64, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (ln, ld) = (num.low_order(), den.low_order());
        shift += ln as i64 - ld as i64;
        let (mut num, mut den) = (num.drop_low(ln), den.drop_low(ld));
        if den.degree() != Some(0) && num.degree() != Some(0) {
            let g = Poly::gcd(&num, &den)?;
            if g.degree() != Some(0) {
                num = num.divrem(&g)?.0;
                den = den.divrem(&g)?.0;
            }
        }
        let inv = den.lead().unwrap().inv()?;
        if !inv.is_one() {
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RatFunc { shift, num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// `Some((c, k))` when the function is the monomial `c X^k`.
    pub fn as_monomial(&self) -> Option<(Scalar, i64)> {
        if self.is_zero() {
            return Some((Scalar::zero(), 0));
        }
        if self.num.degree() == Some(0) && self.den.degree() == Some(0) {
            Some((self.num.0[0].clone(), self.shift))
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.as_monomial() {
            Some((c, 0)) => Some(c),
            Some((c, _)) if c.is_zero() => Some(c),
            _ => None,
        }
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(o.shift);
        let a = self.num.mul(&o.den).shift_up((self.shift - s) as usize);
        let b = o.num.mul(&self.den).shift_up((o.shift - s) as usize);
        let den = if self.den == o.den { self.den.clone() } else { self.den.mul(&o.den) };
        let num = if self.den == o.den {
            self.num.shift_up((self.shift - s) as usize).add(&o.num.shift_up((o.shift - s) as usize))
        } else {
            a.add(&b)
        };
        Self::build(s, num, den).expect("nonzero denominators")
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { shift: self.shift, num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::build(self.shift + o.shift, self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn scale(&self, c: &Scalar) -> RatFunc {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc { shift: self.shift, num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::build(-self.shift, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut r = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            r = r.mul(&base);
        }
        Ok(r)
    }

    /// Order of zero (positive) or pole (negative) at a nonzero point `x0`.
    pub fn order_at(&self, x0: &Scalar) -> Result<i64> {
        if x0.is_zero() {
            return Err(Error::Invalid("order_at requires a nonzero point".into()));
        }
        if self.is_zero() {
            return Err(Error::Invalid("order of the zero function".into()));
        }
        Ok(self.num.order_at(x0).0 as i64 - self.den.order_at(x0).0 as i64)
    }

    /// Leading Laurent coefficient at `x0` in powers of `(X - x0)`.
    pub fn leading_coefficient_at(&self, x0: &Scalar) -> Result<Scalar> {
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        let (_, nq) = self.num.order_at(x0);
        let (_, dq) = self.den.order_at(x0);
        let xs = x0.pow(self.shift)?;
        Ok(&(&xs * &nq.eval(x0)) * &dq.eval(x0).inv()?)
    }

    /// Value at `x0` (error at a pole).
    pub fn eval(&self, x0: &Scalar) -> Result<Scalar> {
        let d = self.den.eval(x0);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if x0.is_zero() && self.shift < 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(&(&x0.pow(self.shift)? * &self.num.eval(x0)) * &d.inv()?)
    }

    /// The substitution `s ↦ a·s + b2/2`, i.e. `X ↦ q^{-b2/2} X^a`, with `sqrt_q = √q`.
    pub fn substitute(&self, sqrt_q: &Scalar, a: i64, b2: i64) -> Result<RatFunc> {
        let unit = sqrt_q.pow(-b2)?;
        let sub = |p: &Poly| -> Result<RatFunc> {
            let mut terms = Vec::new();
            for (k, c) in p.0.iter().enumerate() {
                if !c.is_zero() {
                    terms.push((a * k as i64, c * &unit.pow(k as i64)?));
                }
            }
            Ok(RatFunc::laurent(&terms))
        };
        let head = RatFunc::monomial(unit.pow(self.shift)?, a * self.shift);
        head.mul(&sub(&self.num)?).div(&sub(&self.den)?)
    }

    /// Complex evaluation at `X = x` for reporting.
    pub fn eval_float(&self, x: num_complex::Complex64) -> num_complex::Complex64 {
        let ev =
            |p: &Poly| p.0.iter().rev().fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| acc * x + c.embed_float());
        x.powi(self.shift as i32) * ev(&self.num) / ev(&self.den)
    }
}

fn fmt_poly(p: &Poly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (k, c) in p.0.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        match k {
            0 => write!(f, "({c})")?,
            1 => write!(f, "({c})*X")?,
            _ => write!(f, "({c})*X^{k}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.shift != 0 {
            write!(f, "X^{} * ", self.shift)?;
        }
        write!(f, "[")?;
        fmt_poly(&self.num, f)?;
        write!(f, "]")?;
        if self.den.degree() != Some(0) {
            write!(f, " / [")?;
            fmt_poly(&self.den, f)?;
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(k: i64) -> Scalar {
        Scalar::from_int(k)
    }

    #[test]
    fn pole_of_l_factor() {
        // L(2s-1, 1) = 1/(1 - qX^2) has its pole at X = q^{-1/2}; L(2-2s, 1) at X = q^{-1}.
        let f = RatFunc::geometric(s(3), 2);
        let x0 = Scalar::sqrt_prime(3).inv().unwrap();
        assert_eq!(f.order_at(&x0).unwrap(), -1);
        assert_eq!(f.order_at(&Scalar::from_ratio(1, 3)).unwrap(), 0);
        let g = RatFunc::geometric(Scalar::from_ratio(1, 9), 2).substitute(&Scalar::sqrt_prime(3), -1, 0).unwrap();
        assert_eq!(g.order_at(&Scalar::from_ratio(1, 3)).unwrap(), -1);
        assert_eq!(RatFunc::constant(s(5)).order_at(&s(2)).unwrap(), 0);
    }

    #[test]
    fn substitution_two_s_minus_one() {
        let q = 5;
        let sq = Scalar::sqrt_prime(q);
        let t = Scalar::root_of_unity(3, 1);
        let f = RatFunc::geometric(t.clone(), 1);
        let g = f.substitute(&sq, 2, -2).unwrap();
        let expect = RatFunc::geometric(&t * &s(q as i64), 2);
        assert_eq!(g, expect);
    }

    #[test]
    fn cancellation_is_canonical() {
        let one = RatFunc::one();
        let x = RatFunc::x();
        let a = one.sub(&x.scale(&s(2)));
        let f = a.mul(&x).div(&a.mul(&a)).unwrap();
        let g = x.div(&a).unwrap();
        assert_eq!(f, g);
        assert_eq!(f.add(&f.neg()), RatFunc::zero());
        assert_eq!(f.div(&f).unwrap(), RatFunc::one());
    }

    #[test]
    fn leading_coefficient() {
        let f = RatFunc::geometric(s(2), 1);
        // 1/(1-2X) = -1/(2(X - 1/2)); leading coefficient -1/2
        assert_eq!(f.leading_coefficient_at(&Scalar::from_ratio(1, 2)).unwrap(), Scalar::from_ratio(-1, 2));
    }
}
