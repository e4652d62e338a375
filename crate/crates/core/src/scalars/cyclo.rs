//! Exact elements of cyclotomic fields ℚ(ζ_n), n a multiple of 8, in canonical power-basis form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub(crate) fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn lcm(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

/// Reduction data for `Φ_n(x) = Φ_r(x^{n/r})`, `r = rad(n)`.
struct CycloData {
    n: u64,
    phi: u64,
    step: u64,
    /// Nonzero coefficients of `Φ_r` below the leading term, as `(j, c_j)`.
    low: Vec<(u64, i64)>,
    primes: Vec<(u64, u32)>,
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dl = den.len();
    let mut q = vec![0i64; num.len() + 1 - dl];
    for i in (0..q.len()).rev() {
        let c = r[i + dl - 1] / den[dl - 1];
        q[i] = c;
        for j in 0..dl {
            r[i + j] -= c * den[j];
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

fn cyclotomic_poly(r: u64, memo: &mut HashMap<u64, Vec<i64>>) -> Vec<i64> {
    if let Some(v) = memo.get(&r) {
        return v.clone();
    }
    let mut num = vec![0i64; r as usize + 1];
    num[0] = -1;
    num[r as usize] = 1;
    for d in 1..r {
        if r.is_multiple_of(d) {
            let pd = cyclotomic_poly(d, memo);
            num = poly_div_exact(&num, &pd);
        }
    }
    memo.insert(r, num.clone());
    num
}

static CYCLO: LazyLock<Mutex<HashMap<u64, Arc<CycloData>>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

fn cyclo_data(n: u64) -> Arc<CycloData> {
    if let Some(d) = CYCLO.lock().unwrap().get(&n) {
        return d.clone();
    }
    let primes = factor(n);
    let r: u64 = primes.iter().map(|&(p, _)| p).product();
    let mut memo = HashMap::new();
    let phi_r = cyclotomic_poly(r, &mut memo);
    let deg = (phi_r.len() - 1) as u64;
    let step = n / r;
    let low = phi_r[..deg as usize].iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (j as u64, c)).collect();
    let d = Arc::new(CycloData { n, phi: deg * step, step, low, primes });
    CYCLO.lock().unwrap().insert(n, d.clone());
    d
}

/// Reduces a sparse polynomial (exponents already `< n`) modulo `Φ_n`.
fn reduce_sparse(mut map: BTreeMap<u64, BigRational>, cd: &CycloData) -> Vec<(u64, BigRational)> {
    while let Some((&e, _)) = map.last_key_value() {
        if e < cd.phi {
            break;
        }
        let a = map.remove(&e).unwrap();
        if a.is_zero() {
            continue;
        }
        let d = e - cd.phi;
        for &(j, c) in &cd.low {
            let k = d + j * cd.step;
            let ent = map.entry(k).or_insert_with(BigRational::zero);
            *ent -= &a * BigRational::from_integer(BigInt::from(c));
        }
    }
    map.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Reduces a dense integer vector of length `n` modulo `Φ_n`, returning the first `φ(n)` entries.
fn reduce_dense(mut v: Vec<i128>, cd: &CycloData) -> Vec<i128> {
    for e in (cd.phi..cd.n).rev() {
        let a = v[e as usize];
        if a == 0 {
            continue;
        }
        v[e as usize] = 0;
        let d = e - cd.phi;
        for &(j, c) in &cd.low {
            v[(d + j * cd.step) as usize] -= a * c as i128;
        }
    }
    v.truncate(cd.phi as usize);
    v
}

/// An element `Σ c_k ζ_n^k` of ℚ(ζ_n), stored in the power basis of the smallest
/// admissible `n` (a multiple of 8) containing it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    n: u64,
    terms: Vec<(u64, BigRational)>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { n: 8, terms: vec![] }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        if r.is_zero() {
            Self::zero()
        } else {
            Scalar { n: 8, terms: vec![(0, r)] }
        }
    }

    /// `ζ_m^k` for any `m ≥ 1`.
    pub fn root_of_unity(m: u64, k: i64) -> Self {
        let n = lcm(8, m);
        let e = (k.rem_euclid(m as i64) as u64) * (n / m);
        Self::from_terms(n, [(e, BigRational::one())])
    }

    /// The positive real square root of the prime `p`, as a cyclotomic integer.
    pub fn sqrt_prime(p: u64) -> Self {
        static MEMO: LazyLock<Mutex<HashMap<u64, Scalar>>> = LazyLock::new(|| Mutex::new(HashMap::new()));
        if let Some(s) = MEMO.lock().unwrap().get(&p) {
            return s.clone();
        }
        let s = if p == 2 {
            Self::root_of_unity(8, 1) + Self::root_of_unity(8, -1)
        } else {
            let n = lcm(8, p);
            let mut terms = BTreeMap::new();
            for x in 1..p {
                let c = crate::padic::legendre(x, p) as i64;
                terms.insert(x * (n / p), BigRational::from_integer(BigInt::from(c)));
            }
            let g = Self::from_terms(n, terms);
            if p % 4 == 1 {
                g
            } else {
                Self::root_of_unity(4, -1) * g
            }
        };
        MEMO.lock().unwrap().insert(p, s.clone());
        s
    }

    /// Builds and canonicalizes `Σ c ζ_n^e` (exponents taken mod `n`).
    pub fn from_terms(n: u64, terms: impl IntoIterator<Item = (u64, BigRational)>) -> Self {
        assert!(n.is_multiple_of(8), "cyclotomic order must be a multiple of 8");
        let mut map: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            *map.entry(e % n).or_insert_with(BigRational::zero) += c;
        }
        let cd = cyclo_data(n);
        let terms = reduce_sparse(map, &cd);
        Scalar { n, terms }.descend()
    }

    /// Builds from integer counts of `ζ_n^e` (index = exponent).
    pub fn from_counts(n: u64, counts: Vec<i128>) -> Self {
        assert!(n.is_multiple_of(8) && counts.len() == n as usize);
        let cd = cyclo_data(n);
        let red = reduce_dense(counts, &cd);
        let terms = red
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(e, c)| (e as u64, BigRational::from_integer(BigInt::from(c))))
            .collect();
        Scalar { n, terms }.descend()
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn terms(&self) -> &[(u64, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    /// Moves to the smallest admissible cyclotomic order.
    fn descend(mut self) -> Self {
        if self.terms.is_empty() {
            self.n = 8;
            return self;
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            self.n = 8;
            return self;
        }
        loop {
            let cd = cyclo_data(self.n);
            let mut changed = false;
            for &(r, e) in &cd.primes {
                if (r == 2 && e >= 4) || (r != 2 && e >= 2) {
                    if self.terms.iter().all(|(k, _)| k % r == 0) {
                        self.terms.iter_mut().for_each(|(k, _)| *k /= r);
                        self.n /= r;
                        changed = true;
                        break;
                    }
                } else if r != 2 && e == 1 {
                    if let Some(y) = self.try_drop_prime(r) {
                        self = y;
                        changed = true;
                        break;
                    }
                }
            }
            if !changed {
                return self;
            }
        }
    }

    /// If `self ∈ ℚ(ζ_{n/r})` for a prime `r ∥ n`, returns it written over `n/r`.
    fn try_drop_prime(&self, r: u64) -> Option<Self> {
        let n = self.n;
        let m = n / r;
        // 1 = s·r + t·m, so ζ_n = ζ_m^s ζ_r^t.
        let g = (r as i64).extended_gcd(&(m as i64));
        let (s, t) = (g.x.rem_euclid(m as i64) as u64, g.y.rem_euclid(r as i64) as u64);
        let inv = BigRational::new(BigInt::from(-1), BigInt::from(r - 1));
        let mut map: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (e, c) in &self.terms {
            let a = (s * e) % m;
            let b = (t * e) % r;
            let w = if b == 0 { c.clone() } else { c * &inv };
            *map.entry(a).or_insert_with(BigRational::zero) += w;
        }
        let cand_terms = reduce_sparse(map, &cyclo_data(m));
        let cand = Scalar { n: m, terms: cand_terms };
        if cand.promote(n).terms == self.terms {
            Some(cand)
        } else {
            None
        }
    }

    /// Rewrites over a multiple `n` of the current order (not canonical).
    fn promote(&self, n: u64) -> Self {
        if n == self.n {
            return self.clone();
        }
        debug_assert!(n.is_multiple_of(self.n));
        let f = n / self.n;
        let map = self.terms.iter().map(|(e, c)| (e * f, c.clone())).collect();
        Scalar { n, terms: reduce_sparse(map, &cyclo_data(n)) }
    }

    pub fn conj(&self) -> Self {
        let n = self.n;
        Self::from_terms(n, self.terms.iter().map(|(e, c)| ((n - e) % n, c.clone())))
    }

    /// Image under `ζ ↦ ζ^k` for `k` coprime to the order.
    pub fn galois(&self, k: u64) -> Self {
        let n = self.n;
        Self::from_terms(n, self.terms.iter().map(|(e, c)| ((e * k) % n, c.clone())))
    }

    /// `z · conj(z)`.
    pub fn abs2(&self) -> Self {
        self * &self.conj()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Scalar { n: self.n, terms: self.terms.iter().map(|(e, c)| (*e, c * r)).collect() }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(r.recip()));
        }
        let cj = self.conj();
        let nn = self * &cj;
        if let Some(r) = nn.as_rational() {
            return Ok(cj.scale(&r.recip()));
        }
        // Product of the remaining Galois conjugates over the norm.
        let n = self.n;
        if n > 2000 {
            return Err(Error::Budget(format!("inverse in Q(zeta_{n})")));
        }
        let mut prod = Scalar::one();
        for k in 2..n {
            if k.gcd(&n) == 1 {
                prod = &prod * &self.galois(k);
            }
        }
        let norm = (&prod * self).as_rational().ok_or_else(|| Error::Verification("norm not rational".into()))?;
        Ok(prod.scale(&norm.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut r = Scalar::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                r = &r * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Ok(r)
    }

    pub fn embed_float(&self) -> Complex64 {
        let n = self.n as f64;
        self.terms
            .iter()
            .map(|(e, c)| {
                let th = 2.0 * std::f64::consts::PI * (*e as f64) / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), th)
            })
            .sum()
    }

    /// If `self = ζ_m^k` for some root of unity, returns `(m, k)` with `m` its exact order.
    pub fn as_root_of_unity(&self) -> Option<(u64, u64)> {
        let n = self.n;
        let z = self.embed_float();
        if (z.norm() - 1.0).abs() > 1e-6 {
            return None;
        }
        let ang = z.arg().rem_euclid(2.0 * std::f64::consts::PI);
        let k = ((ang * n as f64 / (2.0 * std::f64::consts::PI)).round() as u64) % n;
        if Self::root_of_unity(n, k as i64) == *self {
            let g = k.gcd(&n);
            Some((n / g, k / g))
        } else {
            None
        }
    }

    /// Serializable exact form: `(n, [(k, num, den)])`.
    pub fn coeff_list(&self) -> (u64, Vec<(u64, BigInt, BigInt)>) {
        (self.n, self.terms.iter().map(|(e, c)| (*e, c.numer().clone(), c.denom().clone())).collect())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            if *e == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "z{}^{e}", self.n)?;
            } else {
                write!(f, "{a}*z{}^{e}", self.n)?;
            }
        }
        Ok(())
    }
}

fn binary(a: &Scalar, b: &Scalar, f: impl Fn(&Scalar, &Scalar, u64) -> Scalar) -> Scalar {
    let n = lcm(a.n, b.n);
    f(&a.promote(n), &b.promote(n), n)
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        binary(self, o, |a, b, n| {
            let mut map: BTreeMap<u64, BigRational> = a.terms.iter().cloned().collect();
            for (e, c) in &b.terms {
                *map.entry(*e).or_insert_with(BigRational::zero) += c;
            }
            let terms = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            Scalar { n, terms }.descend()
        })
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if let Some(r) = self.as_rational() {
            return o.scale(&r);
        }
        if let Some(r) = o.as_rational() {
            return self.scale(&r);
        }
        binary(self, o, |a, b, n| {
            let mut map: BTreeMap<u64, BigRational> = BTreeMap::new();
            for (e1, c1) in &a.terms {
                for (e2, c2) in &b.terms {
                    *map.entry((e1 + e2) % n).or_insert_with(BigRational::zero) += c1 * c2;
                }
            }
            Scalar { n, terms: reduce_sparse(map, &cyclo_data(n)) }.descend()
        })
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { n: self.n, terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Mul, mul);
forward_owned!(Sub, sub);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |a, b| a * b)
    }
}

/// Integer-count accumulator for sums of roots of unity `Σ m_e ζ_n^e`.
#[derive(Clone, Debug)]
pub struct RootSum {
    n: u64,
    counts: Vec<i128>,
}

impl RootSum {
    pub fn new(n: u64) -> Self {
        let n = lcm(8, n);
        RootSum { n, counts: vec![0; n as usize] }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    /// Adds `k · ζ_m^e` (`m` must divide the order).
    pub fn add(&mut self, m: u64, e: u64, k: i128) {
        debug_assert!(self.n.is_multiple_of(m));
        let idx = ((e % m) * (self.n / m)) as usize;
        self.counts[idx] += k;
    }

    pub fn add_exp(&mut self, e: u64, k: i128) {
        let idx = (e % self.n) as usize;
        self.counts[idx] += k;
    }

    pub fn merge(&mut self, other: &RootSum) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn to_scalar(&self) -> Scalar {
        Scalar::from_counts(self.n, self.counts.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u64, k: i64) -> Scalar {
        Scalar::root_of_unity(m, k)
    }

    #[test]
    fn exponent_arithmetic() {
        assert_eq!(z(8, 2), z(4, 1));
        assert_eq!(&z(8, 1) * &z(8, 1), z(4, 1));
        assert_eq!(z(8, 4), Scalar::from_int(-1));
        assert_eq!(z(3, 1).conj(), z(3, -1));
    }

    #[test]
    fn complete_root_sums_vanish() {
        for p in [3u64, 5, 7, 11] {
            let s: Scalar = (0..p as i64).map(|k| z(p, k)).sum();
            assert!(s.is_zero(), "p={p}");
        }
        let s: Scalar = (0..16).map(|k| z(16, k)).sum();
        assert!(s.is_zero());
    }

    #[test]
    fn sqrt_primes_square_to_p() {
        for p in [2u64, 3, 5, 7, 11, 13, 97] {
            let s = Scalar::sqrt_prime(p);
            assert_eq!(&s * &s, Scalar::from_int(p as i64));
            assert!((s.embed_float().re - (p as f64).sqrt()).abs() < 1e-9);
            assert!(s.embed_float().im.abs() < 1e-9);
        }
    }

    #[test]
    fn canonical_descent_is_minimal() {
        // ζ_5 + ζ_5^4 lives in Q(√5) ⊂ Q(ζ_40), canonical order 40.
        let a = &z(5, 1) + &z(5, 4);
        assert_eq!(a.order(), 40);
        let b = &z(15, 3) * &z(3, 1);
        let c = &z(5, 1) * &z(3, 1);
        assert_eq!(b, c);
        // ζ_3 ζ_3^{-1} = 1 lands in the rational case.
        assert_eq!((&z(3, 1) * &z(3, 2)).order(), 8);
        // i expressed through ζ_20.
        assert_eq!(z(20, 5), z(4, 1));
        assert_eq!(z(20, 5).order(), 8);
    }

    #[test]
    fn inverse_general_element() {
        let a = &Scalar::from_int(2) + &z(3, 1);
        let ai = a.inv().unwrap();
        assert!((&a * &ai).is_one());
        let b = &(&Scalar::from_int(1) + &z(5, 1)) + &z(7, 2).scale_int(3);
        let bi = b.inv().unwrap();
        assert!((&b * &bi).is_one());
    }

    #[test]
    fn root_sum_accumulator() {
        let mut acc = RootSum::new(24);
        for k in 0..3 {
            acc.add(3, k, 2);
        }
        assert!(acc.to_scalar().is_zero());
        acc.add(8, 1, 1);
        assert_eq!(acc.to_scalar(), z(8, 1));
    }

    #[test]
    fn as_root_of_unity_detects() {
        assert_eq!(z(12, 5).as_root_of_unity(), Some((12, 5)));
        assert_eq!(Scalar::from_int(2).as_root_of_unity(), None);
        assert_eq!(Scalar::from_int(-1).as_root_of_unity(), Some((2, 1)));
    }
}
