//! Langlands-parameter data: `τ_α`, the uniformizer `ϖ_{α,l}`, the extension `E = F(ζ)` with
//! `ζ^{2l} = ϖ_{α,l}`, and the character `ξ` of `E^×`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::characters::{
    quadratic_gauss_sum, sqrt_q_pow, weil_factor, weil_index_base, AdditiveCharacter, TameCharacter,
};
use crate::error::{Error, Result};
use crate::padic::{hilbert, max_precision, pow_u64, primitive_root, PAdic};
use crate::scalars::{ExactScalar, Scalar};
use crate::shimura::{gamma_assemble, SSParams};
use crate::tate::tate_gamma;

/// Symbol standing for `λ_{E/F}(ψ_α)^{-1}`, never evaluated.
pub const LAMBDA_TOKEN: &str = "lambda_{E/F}(psi_alpha)^{-1}";

/// `τ(ϖ) = γ_{ψ_α}(ϖ)^{-1} |G(ψ_α^{-1})| / G(ψ_α^{-1})`, `τ|𝔬^× = γ_{ψ_α}|𝔬^×`.
pub fn tau_alpha(p: u64, uniformizer: &PAdic, alpha: u64, psi: &AdditiveCharacter) -> Result<TameCharacter> {
    if p == 2 {
        return Err(Error::Unsupported("the parameter construction needs odd p".into()));
    }
    let prec = max_precision(p);
    let psi_a = psi.twisted(&PAdic::from_i64(p, prec, alpha as i64))?;
    let g = PAdic::from_i64(p, prec, primitive_root(p) as i64);
    let on_gen = weil_factor(&psi_a, &g)?;
    if on_gen != Scalar::from_int(-1) {
        return Err(Error::Verification("γ_ψ on units is not the quadratic residue character".into()));
    }
    let gauss = quadratic_gauss_sum(&psi_a.inverse())?;
    let value = &weil_factor(&psi_a, uniformizer)?.conj() * &sqrt_q_pow(p, 1).div(&gauss)?;
    TameCharacter::new(p, *uniformizer, value, ((p - 1) / 2) as i64)
}

/// `ϖ_{α,l} = ϖ / ((-1)^{l+1} 4α)`.
pub fn pi1_uniformizer(l: u32, alpha: u64, uniformizer: &PAdic) -> Result<PAdic> {
    let p = uniformizer.p();
    if p == 2 {
        return Err(Error::Unsupported("4α is not a unit for p = 2".into()));
    }
    let s: i64 = if l % 2 == 1 { 4 } else { -4 };
    let k = PAdic::from_i64(p, max_precision(p), s * alpha as i64);
    uniformizer.checked_div(&k)
}

/// `E = F[ζ]/(ζ^{2l} - ϖ_{α,l})`, elements stored as coefficients of `1, ζ, …, ζ^{2l-1}`.
#[derive(Clone, Debug)]
pub struct RamifiedExt {
    p: u64,
    l: u32,
    pi1: PAdic,
    prec: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtElement {
    pub coeffs: Vec<PAdic>,
}

impl RamifiedExt {
    pub fn new(l: u32, pi1: PAdic, prec: u32) -> Result<Self> {
        if pi1.valuation() != Some(1) {
            return Err(Error::Invalid("ϖ_{α,l} must have valuation 1".into()));
        }
        if l == 0 {
            return Err(Error::Invalid("degree must be positive".into()));
        }
        Ok(RamifiedExt { p: pi1.p(), l, pi1: pi1.with_prec(prec), prec: prec.min(max_precision(pi1.p())) })
    }

    pub fn degree(&self) -> usize {
        2 * self.l as usize
    }

    pub fn pi1(&self) -> &PAdic {
        &self.pi1
    }

    pub fn element(&self, coeffs: Vec<PAdic>) -> Result<ExtElement> {
        if coeffs.len() != self.degree() {
            return Err(Error::Invalid(format!("expected {} coefficients", self.degree())));
        }
        Ok(ExtElement { coeffs })
    }

    pub fn one(&self) -> ExtElement {
        let mut c = vec![PAdic::zero(self.p); self.degree()];
        c[0] = PAdic::one(self.p, self.prec);
        ExtElement { coeffs: c }
    }

    /// `ζ^k` for `0 ≤ k < 2l`.
    pub fn zeta_pow(&self, k: usize) -> ExtElement {
        let mut c = vec![PAdic::zero(self.p); self.degree()];
        c[k % self.degree()] = PAdic::one(self.p, self.prec);
        ExtElement { coeffs: c }
    }

    pub fn mul(&self, x: &ExtElement, y: &ExtElement) -> ExtElement {
        let n = self.degree();
        let mut c = vec![PAdic::zero(self.p); n];
        for (i, a) in x.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = *a * *b;
                if i + j < n {
                    c[i + j] = c[i + j] + t;
                } else {
                    c[i + j - n] = c[i + j - n] + t * self.pi1;
                }
            }
        }
        ExtElement { coeffs: c }
    }

    /// `v_E(x) = min_k (2l·v_F(x_k) + k)`; `None` for zero.
    pub fn valuation(&self, x: &ExtElement) -> Option<i64> {
        let n = self.degree() as i64;
        x.coeffs.iter().enumerate().filter_map(|(k, c)| c.valuation().map(|v| n * v + k as i64)).min()
    }

    /// Matrix of multiplication by `x` in the basis `ζ^{2l-1}, ζ^{2l-2}, …, ζ, 1` (columns are images).
    pub fn regular_matrix(&self, x: &ExtElement) -> Vec<Vec<PAdic>> {
        let n = self.degree();
        let mut m = vec![vec![PAdic::zero(self.p); n]; n];
        for j in 0..n {
            let img = self.mul(x, &self.zeta_pow(n - 1 - j));
            for (t, c) in img.coeffs.iter().enumerate() {
                m[n - 1 - t][j] = *c;
            }
        }
        m
    }

    pub fn norm(&self, x: &ExtElement) -> Result<PAdic> {
        determinant(self.regular_matrix(x))
    }

    /// A random element of `1 + 𝔭_E^m`.
    pub fn random_principal_unit<R: Rng>(&self, m: usize, rng: &mut R) -> ExtElement {
        let n = self.degree();
        let mut x = self.one();
        let modulus = pow_u64(self.p, self.prec);
        for k in 0..n {
            // ζ^k · ϖ^e lies in 𝔭_E^m once n·e + k ≥ m
            let e = (m as i64 - k as i64).max(0).div_euclid(n as i64)
                + i64::from((m as i64 - k as i64).max(0) % n as i64 != 0);
            let r = PAdic::from_i64(self.p, self.prec, rng.gen_range(0..modulus) as i64).shift(e);
            x.coeffs[k] = x.coeffs[k] + r;
        }
        x
    }
}

/// Determinant by elimination with minimal-valuation pivots.
pub fn determinant(mut m: Vec<Vec<PAdic>>) -> Result<PAdic> {
    let n = m.len();
    if n == 0 {
        return Err(Error::Invalid("empty matrix".into()));
    }
    let p = m[0][0].p();
    let mut det = PAdic::one(p, max_precision(p));
    for col in 0..n {
        let piv = (col..n).filter(|&r| !m[r][col].is_zero()).min_by_key(|&r| m[r][col].val());
        let Some(piv) = piv else {
            return Ok(PAdic::zero(p));
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let inv = m[col][col].checked_inv()?;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col] * inv;
            for c in col..n {
                let t = f * m[col][c];
                m[r][c] = m[r][c] - t;
            }
        }
        det = det * m[col][col];
    }
    Ok(det)
}

/// Discriminant of `ζ^{2l} - ϖ_{α,l}`: `(-1)^{n(n-1)/2} Res(f, f')` from the Sylvester matrix.
pub fn discriminant(ext: &RamifiedExt) -> Result<PAdic> {
    let n = ext.degree();
    let p = ext.p;
    let zero = PAdic::zero(p);
    let mut f = vec![zero; n + 1];
    f[0] = PAdic::one(p, ext.prec);
    f[n] = -ext.pi1;
    let mut df = vec![zero; n];
    df[0] = PAdic::from_i64(p, ext.prec, n as i64);
    let size = 2 * n - 1;
    let mut syl = vec![vec![zero; size]; size];
    for r in 0..n - 1 {
        for (k, c) in f.iter().enumerate() {
            syl[r][r + k] = *c;
        }
    }
    for r in 0..n {
        for (k, c) in df.iter().enumerate() {
            syl[n - 1 + r][r + k] = *c;
        }
    }
    let res = determinant(syl)?;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -res } else { res })
}

/// `det(Ind_{W_E}^{W_F} 1_E)` as the quadratic character `b ↦ (disc, b)`.
pub fn det_ind_character(ext: &RamifiedExt, b: &PAdic) -> Result<i8> {
    hilbert(&discriminant(ext)?, b)
}

/// `ξ(x) = ψ(Σ_i ι(x)_{i,i+1} + ϖ_{α,l}^{-1} ι(x)_{2l,1})` for `x ∈ 1+𝔭_E`.
pub fn xi_principal_units(ext: &RamifiedExt, x: &ExtElement, psi: &AdditiveCharacter) -> Result<Scalar> {
    let mut d = x.clone();
    d.coeffs[0] = d.coeffs[0] - PAdic::one(ext.p, ext.prec);
    if ext.valuation(&d).is_some_and(|v| v < 1) {
        return Err(Error::Invalid("not a principal unit".into()));
    }
    let m = ext.regular_matrix(x);
    let n = ext.degree();
    let mut s = PAdic::zero(ext.p);
    for i in 0..n - 1 {
        s = s + m[i][i + 1];
    }
    s = s + m[n - 1][0] * ext.pi1.checked_inv()?;
    psi.eval(&s)
}

/// The value of `ξ(ζ)`: a computable scalar times the unevaluated token `λ_{E/F}(ψ_α)^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaValue {
    /// Reading `γ(s, τ_α, ψ_α)^{-1}` as the full monomial: `δ` extracted from the gamma quotient.
    pub monomial_reading: Scalar,
    /// Reading it as its `s`-independent coefficient.
    pub coefficient_reading: Scalar,
    pub tokens: Vec<String>,
}

/// Residue exponent of `ξ|κ^×` (in `ℤ/(q-1)`), `ξ(ζ)`, and whether `p ∤ l`.
pub fn xi_residue_and_zeta(params: &SSParams, psi: &AdditiveCharacter) -> Result<(u64, ZetaValue, bool)> {
    let p = params.p;
    let tau_a = tau_alpha(p, &params.uniformizer, params.alpha, psi)?;
    let psi_a = params.psi_alpha(psi)?;
    let ext = RamifiedExt::new(params.l, pi1_uniformizer(params.l, params.alpha, &params.uniformizer)?, 12)?;
    let g = PAdic::from_i64(p, max_precision(p), primitive_root(p) as i64);
    let half = (p - 1) / 2;
    let e_disc = if det_ind_character(&ext, &g)? == -1 { half } else { 0 };
    let residue = (tau_a.residue_exponent() + (p - 1) - e_disc) % (p - 1);

    let gamma1 = gamma_assemble(params, &TameCharacter::trivial(p), psi)?;
    let tg = tate_gamma(&tau_a, &psi_a)?;
    let (c, k) = gamma1
        .div(&tg)?
        .as_monomial()
        .ok_or_else(|| Error::Verification("γ(s, π, ψ_α)/γ(s, τ_α, ψ_α) is not a monomial".into()))?;
    if k != 1 {
        return Err(Error::Verification(format!("quotient has X-degree {k}, expected 1")));
    }
    let delta = &c * &sqrt_q_pow(p, -1);
    let (tc, _) = tg.as_monomial().ok_or_else(|| Error::Verification("γ(s, τ_α, ψ_α) is not a monomial".into()))?;
    let head = &weil_index_base(&psi_a)?.inv()? * &weil_factor(&psi_a, &params.uniformizer)?.conj();
    let coef = head.scale_int(params.omega_sign).div(&tc)?;
    let zeta = ZetaValue { monomial_reading: delta, coefficient_reading: coef, tokens: vec![LAMBDA_TOKEN.to_string()] };
    Ok((residue, zeta, !(params.l as u64).is_multiple_of(p)))
}

/// Serializable p-adic number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactPAdic {
    pub p: u64,
    pub val: Option<i64>,
    pub unit: u64,
    pub prec: u32,
}

impl From<&PAdic> for ExactPAdic {
    fn from(x: &PAdic) -> Self {
        ExactPAdic { p: x.p(), val: x.valuation(), unit: x.unit(), prec: x.prec() }
    }
}

impl ExactPAdic {
    pub fn to_padic(&self) -> PAdic {
        match self.val {
            None => PAdic::zero(self.p),
            Some(v) => PAdic::new(self.p, self.prec, v, self.unit),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactZeta {
    pub monomial_reading: ExactScalar,
    pub coefficient_reading: ExactScalar,
    pub tokens: Vec<String>,
}

/// Rule for `ξ` on `1 + 𝔭_E`; rebuilt into an evaluator by [`ParamRecord::xi_principal`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalUnitsRule {
    pub degree: usize,
    pub basis: String,
    pub functional: String,
    /// `ξ` is trivial on `1 + 𝔭_E^level`.
    pub level: usize,
    pub psi_twist: ExactPAdic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRecord {
    pub p: u64,
    pub l: u32,
    pub alpha: u64,
    pub omega_sign: i64,
    pub uniformizer: ExactPAdic,
    pub tau_alpha_uniformizer_value: ExactScalar,
    pub tau_alpha_residue_exponent: u64,
    pub pi1_uniformizer: ExactPAdic,
    pub discriminant: ExactPAdic,
    pub xi_on_zeta: ExactZeta,
    pub xi_residue_exponent: u64,
    pub xi_principal_units: PrincipalUnitsRule,
    pub lambda_token: String,
    /// `p ∤ l`, so the induced-parameter reading applies.
    pub tame_induction: bool,
}

impl ParamRecord {
    pub fn build(params: &SSParams, psi: &AdditiveCharacter) -> Result<Self> {
        let p = params.p;
        let tau_a = tau_alpha(p, &params.uniformizer, params.alpha, psi)?;
        let pi1 = pi1_uniformizer(params.l, params.alpha, &params.uniformizer)?;
        let ext = RamifiedExt::new(params.l, pi1, 12)?;
        let (residue, zeta, tame) = xi_residue_and_zeta(params, psi)?;
        Ok(ParamRecord {
            p,
            l: params.l,
            alpha: params.alpha,
            omega_sign: params.omega_sign,
            uniformizer: (&params.uniformizer).into(),
            tau_alpha_uniformizer_value: tau_a.value_on_uniformizer().into(),
            tau_alpha_residue_exponent: tau_a.residue_exponent(),
            pi1_uniformizer: (&pi1).into(),
            discriminant: (&discriminant(&ext)?).into(),
            xi_on_zeta: ExactZeta {
                monomial_reading: (&zeta.monomial_reading).into(),
                coefficient_reading: (&zeta.coefficient_reading).into(),
                tokens: zeta.tokens,
            },
            xi_residue_exponent: residue,
            xi_principal_units: PrincipalUnitsRule {
                degree: ext.degree(),
                basis: "zeta^{2l-1}, ..., zeta, 1".into(),
                functional: "psi(sum_i k_{i,i+1} + pi1^{-1} k_{2l,1})".into(),
                level: 2,
                psi_twist: psi.twist().into(),
            },
            lambda_token: LAMBDA_TOKEN.into(),
            tame_induction: tame,
        })
    }

    pub fn extension(&self) -> Result<RamifiedExt> {
        RamifiedExt::new(self.l, self.pi1_uniformizer.to_padic(), 12)
    }

    /// `ξ(x)` for `x ∈ 1+𝔭_E`, from the stored data.
    pub fn xi_principal(&self, x: &ExtElement) -> Result<Scalar> {
        let psi = AdditiveCharacter::standard(self.p).twisted(&self.xi_principal_units.psi_twist.to_padic())?;
        xi_principal_units(&self.extension()?, x, &psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::least_nonresidue;

    #[test]
    fn pi1_signs() {
        let w = PAdic::uniformizer(5, 12);
        let four = PAdic::from_i64(5, 12, 4);
        assert_eq!(pi1_uniformizer(2, 1, &w).unwrap() * four, -w);
        assert_eq!(pi1_uniformizer(3, 1, &w).unwrap() * four, w);
        assert_eq!(pi1_uniformizer(4, 1, &w).unwrap() * four, -w);
    }

    #[test]
    fn discriminant_matches_formula() {
        // disc(X^n - c) = (-1)^{n(n-1)/2} n^n (-c)^{n-1}
        for (p, l) in [(3u64, 2u32), (5, 2), (7, 3)] {
            let w = PAdic::uniformizer(p, 12);
            let pi1 = pi1_uniformizer(l, 1, &w).unwrap();
            let ext = RamifiedExt::new(l, pi1, 12).unwrap();
            let n = 2 * l as i64;
            let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
            let expect = PAdic::from_i64(p, 12, sign * n.pow(n as u32)) * (-pi1).pow(n - 1).unwrap();
            let d = discriminant(&ext).unwrap();
            assert_eq!(d.valuation(), expect.valuation());
            assert_eq!(d.unit_mod(6).unwrap(), expect.unit_mod(6).unwrap());
        }
    }

    #[test]
    fn quadratic_discriminant_character() {
        let mut rng = crate::rng(5);
        for p in [3u64, 5, 7] {
            let w = PAdic::uniformizer(p, 12);
            let ext = RamifiedExt::new(1, w, 12).unwrap();
            for k in [-2i64, 1, 2, 3, 5] {
                let b = PAdic::from_i64(p, 12, k).shift(k.rem_euclid(2));
                assert_eq!(det_ind_character(&ext, &b).unwrap(), hilbert(&w, &b).unwrap());
            }
            for _ in 0..10 {
                let x = ext.random_principal_unit(1, &mut rng);
                let y = ext.mul(&x, &ext.zeta_pow(1));
                for z in [x, y] {
                    let n = ext.norm(&z).unwrap();
                    assert_eq!(det_ind_character(&ext, &n).unwrap(), 1);
                }
            }
        }
    }

    #[test]
    fn norm_valuation() {
        let mut rng = crate::rng(3);
        let w = PAdic::uniformizer(5, 12);
        let ext = RamifiedExt::new(2, pi1_uniformizer(2, 1, &w).unwrap(), 12).unwrap();
        for m in 0..6 {
            let mut x = ext.random_principal_unit(1, &mut rng);
            x.coeffs[0] = PAdic::zero(5);
            let x = ext.mul(&x, &ext.zeta_pow(m % 4));
            if let Some(v) = ext.valuation(&x) {
                assert_eq!(ext.norm(&x).unwrap().valuation(), Some(v));
            }
        }
    }

    #[test]
    fn xi_is_a_character() {
        let mut rng = crate::rng(11);
        for (p, l) in [(3u64, 2u32), (5, 3), (7, 2)] {
            let psi = AdditiveCharacter::standard(p);
            let ext = RamifiedExt::new(l, pi1_uniformizer(l, 1, &PAdic::uniformizer(p, 12)).unwrap(), 12).unwrap();
            assert!(xi_principal_units(&ext, &ext.one(), &psi).unwrap().is_one());
            for _ in 0..20 {
                let x = ext.random_principal_unit(1, &mut rng);
                let y = ext.random_principal_unit(1, &mut rng);
                let z = ext.random_principal_unit(2, &mut rng);
                let fx = xi_principal_units(&ext, &x, &psi).unwrap();
                let fy = xi_principal_units(&ext, &y, &psi).unwrap();
                assert_eq!(xi_principal_units(&ext, &ext.mul(&x, &y), &psi).unwrap(), &fx * &fy);
                assert_eq!(xi_principal_units(&ext, &ext.mul(&x, &z), &psi).unwrap(), fx);
            }
        }
    }

    #[test]
    fn record_round_trip_and_zeta() {
        for p in [3u64, 5, 7] {
            let psi = AdditiveCharacter::standard(p);
            for alpha in [1, least_nonresidue(p)] {
                let a = ParamRecord::build(&SSParams::new(p, 2, alpha, 1).unwrap(), &psi).unwrap();
                let b = ParamRecord::build(&SSParams::new(p, 2, alpha, -1).unwrap(), &psi).unwrap();
                let za = a.xi_on_zeta.monomial_reading.to_scalar().unwrap();
                let zb = b.xi_on_zeta.monomial_reading.to_scalar().unwrap();
                assert!(za.abs2().is_one());
                assert_eq!(zb, -za.clone());
                assert_eq!(a.xi_on_zeta.coefficient_reading.to_scalar().unwrap(), za);
                assert_eq!(a.tau_alpha_residue_exponent, b.tau_alpha_residue_exponent);
                let j = serde_json::to_string(&a).unwrap();
                let back: ParamRecord = serde_json::from_str(&j).unwrap();
                assert_eq!(back, a);
            }
        }
    }

    #[test]
    fn tau_alpha_matches_pole_scan() {
        for p in [3u64, 5, 7] {
            let psi = AdditiveCharacter::standard(p);
            for alpha in [1, least_nonresidue(p)] {
                let params = SSParams::new(p, 2, alpha, 1).unwrap();
                let t = tau_alpha(p, &params.uniformizer, alpha, &psi).unwrap();
                assert!(t.value_on_uniformizer().pow(2).unwrap().is_one());
                let scan = crate::shimura::pole_scan(&params, &psi).unwrap();
                let row = scan.pole().unwrap();
                let sign = if t.value_on_uniformizer().is_one() { 1 } else { -1 };
                assert_eq!((row.tau_uniformizer_sign, row.tau_residue_exponent), (sign, t.residue_exponent()));
            }
        }
    }
}
