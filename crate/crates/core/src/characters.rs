//! Level-one additive characters, tame multiplicative characters, Gauss sums and Weil indices.

use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{pow_u64, primitive_root, PAdic, DEFAULT_PRECISION};
use crate::scalars::{RootSum, Scalar};

/// Largest root-of-unity order an evaluation may touch.
pub const ROOT_ORDER_BUDGET: u64 = 1 << 24;

/// `ψ(x) = exp(2πi {t·x/p}_p)` for a unit twist `t`; level one (trivial on 𝔭, not on 𝔬).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdditiveCharacter {
    p: u64,
    twist: PAdic,
}

impl AdditiveCharacter {
    /// The standard character (`ψ(1) = ζ_p`; for p = 2, `ψ(x) = e^{πix}`).
    pub fn standard(p: u64) -> Self {
        Self { p, twist: PAdic::one(p, DEFAULT_PRECISION) }
    }

    /// For p = 2: `ψ(x) = e^{±πix}`.
    pub fn with_sign(p: u64, sign: i64) -> Self {
        Self { p, twist: PAdic::from_i64(p, DEFAULT_PRECISION, sign.signum()) }
    }

    /// `ψ_a(x) = ψ(a x)`; `a` must be a unit.
    pub fn twisted(&self, a: &PAdic) -> Result<Self> {
        if !a.is_unit() {
            return Err(Error::Unsupported("only unit twists keep level one".into()));
        }
        Ok(Self { p: self.p, twist: self.twist * *a })
    }

    pub fn inverse(&self) -> Self {
        Self { p: self.p, twist: -self.twist }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn twist(&self) -> &PAdic {
        &self.twist
    }

    /// `ψ(x)` as `(k, num)` meaning `ζ_{p^k}^{num}`; `None` when the value is 1.
    pub fn eval_exp(&self, x: &PAdic) -> Result<Option<(u32, u64)>> {
        let y = (self.twist * *x).shift(-1);
        let fr = y.frac_part()?;
        if let Some((k, _)) = fr {
            if pow_u64(self.p, k) > ROOT_ORDER_BUDGET {
                return Err(Error::Budget(format!("character depth {k}")));
            }
        }
        Ok(fr)
    }

    pub fn eval(&self, x: &PAdic) -> Result<Scalar> {
        Ok(match self.eval_exp(x)? {
            None => Scalar::one(),
            Some((k, num)) => Scalar::root_of_unity(pow_u64(self.p, k), num as i64),
        })
    }
}

static DLOG: LazyLock<Mutex<HashMap<u64, Vec<u64>>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

/// Discrete logarithm of a nonzero residue to the least primitive root.
pub fn dlog(p: u64, r: u64) -> u64 {
    let mut map = DLOG.lock().unwrap();
    let tab = map.entry(p).or_insert_with(|| {
        let g = primitive_root(p);
        let mut t = vec![0u64; p as usize];
        let mut x = 1u64;
        for j in 0..p.saturating_sub(1) {
            t[x as usize] = j;
            x = x * g % p;
        }
        t
    });
    tab[(r % p) as usize]
}

/// Tamely ramified quasi-character: `τ(ϖ^k u) = τ(ϖ)^k · ζ_{q-1}^{e·log_g(u mod p)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TameCharacter {
    p: u64,
    uniformizer: PAdic,
    value_on_uniformizer: Scalar,
    residue_exponent: u64,
}

impl TameCharacter {
    pub fn new(p: u64, uniformizer: PAdic, value_on_uniformizer: Scalar, residue_exponent: i64) -> Result<Self> {
        if value_on_uniformizer.is_zero() {
            return Err(Error::Invalid("τ(ϖ) must be nonzero".into()));
        }
        if uniformizer.valuation() != Some(1) {
            return Err(Error::Invalid("uniformizer must have valuation 1".into()));
        }
        let m = (p - 1) as i64;
        Ok(Self {
            p,
            uniformizer,
            value_on_uniformizer,
            residue_exponent: residue_exponent.rem_euclid(m.max(1)) as u64,
        })
    }

    pub fn trivial(p: u64) -> Self {
        Self::unramified(p, Scalar::one())
    }

    pub fn unramified(p: u64, value: Scalar) -> Self {
        Self::new(p, PAdic::uniformizer(p, DEFAULT_PRECISION), value, 0).expect("valid")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn uniformizer(&self) -> &PAdic {
        &self.uniformizer
    }

    pub fn value_on_uniformizer(&self) -> &Scalar {
        &self.value_on_uniformizer
    }

    pub fn residue_exponent(&self) -> u64 {
        self.residue_exponent
    }

    pub fn is_unramified(&self) -> bool {
        self.residue_exponent == 0
    }

    pub fn is_quadratic(&self) -> bool {
        let v2 = &self.value_on_uniformizer * &self.value_on_uniformizer;
        v2.is_one() && (2 * self.residue_exponent).is_multiple_of((self.p - 1).max(1))
    }

    /// Value on a unit given by its residue.
    pub fn on_residue(&self, r: u64) -> Scalar {
        if self.residue_exponent == 0 {
            return Scalar::one();
        }
        let m = self.p - 1;
        let j = dlog(self.p, r);
        Scalar::root_of_unity(m, ((self.residue_exponent * j) % m) as i64)
    }

    pub fn eval(&self, x: &PAdic) -> Result<Scalar> {
        let v = x.valuation().ok_or(Error::ZeroInput)?;
        let u = x.checked_div(&self.uniformizer.pow(v)?)?;
        let r = u.residue()?;
        Ok(&self.value_on_uniformizer.pow(v)? * &self.on_residue(r))
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.p, self.uniformizer, self.value_on_uniformizer.inv()?, -(self.residue_exponent as i64))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.uniformizer != o.uniformizer {
            // re-express o relative to our uniformizer: o(ϖ') = o(ϖ) o(ϖ'/ϖ)
            let val = o.eval(&self.uniformizer)?;
            let o2 = Self::new(o.p, self.uniformizer, val, o.residue_exponent as i64)?;
            return self.mul(&o2);
        }
        Self::new(
            self.p,
            self.uniformizer,
            &self.value_on_uniformizer * &o.value_on_uniformizer,
            (self.residue_exponent + o.residue_exponent) as i64,
        )
    }

    pub fn square(&self) -> Result<Self> {
        self.mul(self)
    }

    /// The four tame quadratic characters for odd p (τ(ϖ) = ±1, residue part trivial or Legendre).
    pub fn quadratic_characters(p: u64, uniformizer: PAdic) -> Result<Vec<Self>> {
        if p == 2 {
            return Err(Error::Unsupported("tame quadratic characters over Q_2 are unramified".into()));
        }
        let mut out = Vec::new();
        for e in [0, (p - 1) / 2] {
            for s in [1, -1] {
                out.push(Self::new(p, uniformizer, Scalar::from_int(s), e as i64)?);
            }
        }
        Ok(out)
    }
}

/// Serializable description of a tame character: `τ(ϖ) = ζ_m^k` and the residue exponent.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TameSpec {
    pub root_order: u64,
    pub root_exponent: i64,
    pub residue_exponent: i64,
}

impl TameSpec {
    pub fn build(&self, p: u64, uniformizer: PAdic) -> Result<TameCharacter> {
        TameCharacter::new(
            p,
            uniformizer,
            Scalar::root_of_unity(self.root_order, self.root_exponent),
            self.residue_exponent,
        )
    }
}

/// `Σ_{x∈κ^×} ψ(x) η(x)` with `η = ζ_{q-1}^{e·log_g}`.
pub fn gauss_sum(psi: &AdditiveCharacter, eta_exponent: u64) -> Result<Scalar> {
    let p = psi.p();
    let m = p - 1;
    let n = num_integer::lcm(p, m.max(1));
    let mut acc = RootSum::new(n);
    for x in 1..p {
        let xv = PAdic::from_i64(p, DEFAULT_PRECISION, x as i64);
        let e_psi = match psi.eval_exp(&xv)? {
            None => 0,
            Some((k, num)) => {
                debug_assert_eq!(k, 1);
                num
            }
        };
        let j = if m > 0 { (eta_exponent % m) * dlog(p, x) % m } else { 0 };
        let e = (e_psi * (acc.order() / p) + j * (acc.order() / m.max(1))) % acc.order();
        acc.add_exp(e, 1);
    }
    Ok(acc.to_scalar())
}

/// `G(ψ) = Σ_{x∈κ^×} ψ(x)(ϖ, x)`, the quadratic Gauss sum (odd p).
pub fn quadratic_gauss_sum(psi: &AdditiveCharacter) -> Result<Scalar> {
    if psi.p() == 2 {
        return Err(Error::Unsupported("quadratic Gauss sum needs odd p".into()));
    }
    gauss_sum(psi, (psi.p() - 1) / 2)
}

/// `√q^k`.
pub fn sqrt_q_pow(p: u64, k: i64) -> Scalar {
    Scalar::sqrt_prime(p).pow(k).expect("√q is invertible")
}

static WEIL_CACHE: LazyLock<Mutex<HashMap<(u64, i64, u64), Scalar>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

/// Weil index `γ(ψ_a)` of `x ↦ ψ(a x²)`, by exact shell-by-shell summation of
/// `|2a|^{1/2} ∫ ψ(a x²) dx` over growing balls (self-dual measure, `vol(𝔬) = q^{1/2}`),
/// stopped once the partial sums agree on two successive enlargements.
pub fn weil_index(psi: &AdditiveCharacter, a: &PAdic) -> Result<Scalar> {
    let p = psi.p();
    let b = *psi.twist() * *a;
    let v = b.valuation().ok_or(Error::ZeroInput)?;
    let digits = b.prec().min(if p == 2 { 10 } else { 6 });
    let ub = b.unit_mod(digits)?;
    let key = (p, v, ub);
    if let Some(s) = WEIL_CACHE.lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let v2: i64 = if p == 2 { 1 } else { 0 };
    // smallest T with v + 2T ≥ 1: the integrand is 1 on 𝔭^T
    let t_in = (1 - v).div_euclid(2) + if (1 - v).rem_euclid(2) != 0 { 1 } else { 0 };
    // total = Σ √q^{j} · R over terms
    let mut total = sqrt_q_pow(p, 1 - 2 * t_in);
    let mut zeros = 0;
    let mut e = t_in - 1;
    loop {
        let k = 1 - v - 2 * e;
        debug_assert!(k >= 1);
        let d = (k - v2).max((k + 1) / 2).max(1);
        if k as u32 > digits {
            return Err(Error::NonStabilization(format!("Weil index needs {k} digits of the argument")));
        }
        let pd = pow_u64(p, d as u32);
        let pk = pow_u64(p, k as u32);
        if pd > ROOT_ORDER_BUDGET || pk > ROOT_ORDER_BUDGET {
            return Err(Error::NonStabilization(format!("Weil index shell depth {k}")));
        }
        let c = ub % pk;
        let mut acc = RootSum::new(pk);
        for u in 0..pd {
            if u % p == 0 {
                continue;
            }
            let uu = (u as u128 * u as u128 % pk as u128) as u64;
            let ex = (c as u128 * uu as u128 % pk as u128) as u64;
            acc.add(pk, ex, 1);
        }
        let r = acc.to_scalar();
        if r.is_zero() {
            zeros += 1;
            if zeros >= 2 {
                break;
            }
        } else {
            zeros = 0;
            total = &total + &(&r * &sqrt_q_pow(p, 1 - 2 * e - 2 * d));
        }
        e -= 1;
    }
    let gamma = &total * &sqrt_q_pow(p, -(v2 + v));
    let g8 = gamma.pow(8)?;
    if !g8.is_one() {
        return Err(Error::Verification(format!("Weil index {gamma} is not an 8th root of unity")));
    }
    WEIL_CACHE.lock().unwrap().insert(key, gamma.clone());
    Ok(gamma)
}

/// `γ(ψ)`.
pub fn weil_index_base(psi: &AdditiveCharacter) -> Result<Scalar> {
    weil_index(psi, &PAdic::one(psi.p(), DEFAULT_PRECISION))
}

/// Weil factor `γ_ψ(a) = γ(ψ_a) / γ(ψ)`.
pub fn weil_factor(psi: &AdditiveCharacter, a: &PAdic) -> Result<Scalar> {
    let ga = weil_index(psi, a)?;
    let g = weil_index_base(psi)?;
    Ok(&ga * &g.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::hilbert;

    fn pa(p: u64, x: i64) -> PAdic {
        PAdic::from_i64(p, 12, x)
    }

    #[test]
    fn level_one() {
        for p in [2u64, 3, 5, 7] {
            let psi = AdditiveCharacter::standard(p);
            assert!(psi.eval(&pa(p, p as i64)).unwrap().is_one());
            assert!(!psi.eval(&pa(p, 1)).unwrap().is_one());
        }
        let psi = AdditiveCharacter::standard(5);
        assert_eq!(psi.eval(&pa(5, 1)).unwrap(), Scalar::root_of_unity(5, 1));
        let half = PAdic::from_ratio(2, 12, 1, 2).unwrap();
        assert_eq!(AdditiveCharacter::standard(2).eval(&half).unwrap(), Scalar::root_of_unity(4, 1));
    }

    #[test]
    fn tame_values() {
        let p = 7;
        let tau = TameCharacter::new(p, PAdic::uniformizer(p, 12), Scalar::from_int(-1), 3).unwrap();
        assert!(tau.is_quadratic());
        assert!(tau.eval(&pa(p, 8)).unwrap().is_one());
        assert_eq!(tau.eval(&pa(p, 3)).unwrap(), Scalar::from_int(-1));
        assert_eq!(tau.eval(&pa(p, 49)).unwrap(), Scalar::one());
    }

    #[test]
    fn gauss_sum_identities() {
        for p in [3u64, 5, 7, 11] {
            let psi = AdditiveCharacter::standard(p);
            let g = quadratic_gauss_sum(&psi.inverse()).unwrap();
            let m1 = hilbert(&pa(p, -1), &pa(p, p as i64)).unwrap() as i64;
            assert_eq!(&g * &g, Scalar::from_int(m1 * p as i64));
            assert_eq!(gauss_sum(&psi, 0).unwrap(), Scalar::from_int(-1));
        }
    }

    #[test]
    fn weil_index_anchors() {
        // γ(ψ)^2 = (−1/p)-type sign for odd p; γ(ψ_{ϖ}) = 1 (level-zero character).
        for p in [3u64, 5, 7] {
            let psi = AdditiveCharacter::standard(p);
            let g = weil_index_base(&psi).unwrap();
            assert_eq!(g.pow(8).unwrap(), Scalar::one());
            assert!(weil_index(&psi, &pa(p, p as i64)).unwrap().is_one());
        }
        for sign in [1, -1] {
            let psi = AdditiveCharacter::with_sign(2, sign);
            assert!(weil_factor(&psi, &pa(2, 2)).unwrap().is_one());
            let mhalf = PAdic::from_ratio(2, 12, -1, 2).unwrap();
            assert_eq!(weil_factor(&psi, &pa(2, -1)).unwrap(), psi.eval(&mhalf).unwrap());
        }
    }
}
