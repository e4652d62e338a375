//! Rankin–Selberg zeta integrals of a simple supercuspidal of `Sp_2l` against a genuine principal
//! series of `Mp_2`: closed forms, brute-force evaluation and the assembled gamma factor.

use serde::{Deserialize, Serialize};

use crate::characters::{
    quadratic_gauss_sum, sqrt_q_pow, weil_factor, weil_index_base, AdditiveCharacter, TameCharacter,
};
use crate::error::{Error, Result};
use crate::metaplectic::{mp_mul, Mat2, MpElement};
use crate::padic::{hilbert, least_nonresidue, max_precision, pow_u64, primitive_root, PAdic, DEFAULT_PRECISION};
use crate::scalars::{RatFunc, Scalar};
use crate::tate::{gamma_2s_minus_1_psi2, l_factor};
use crate::weilrep::{SchwartzFn, WeilRep};

/// A simple supercuspidal `π_{α,l}^ω` of `Sp_2l(F)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SSParams {
    pub p: u64,
    pub l: u32,
    /// Square-class representative: 1, or the least non-residue.
    pub alpha: u64,
    pub omega_sign: i64,
    pub uniformizer: PAdic,
}

impl SSParams {
    pub fn new(p: u64, l: u32, alpha: u64, omega_sign: i64) -> Result<Self> {
        if !crate::padic::is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if l < 2 {
            return Err(Error::Invalid("rank must be at least 2".into()));
        }
        if omega_sign != 1 && omega_sign != -1 {
            return Err(Error::Invalid("central sign must be ±1".into()));
        }
        let ok_alpha = if p == 2 { alpha == 1 } else { alpha == 1 || alpha == least_nonresidue(p) };
        if !ok_alpha {
            return Err(Error::Invalid(format!("α = {alpha} is not a square-class representative for p = {p}")));
        }
        Ok(SSParams { p, l, alpha, omega_sign, uniformizer: PAdic::uniformizer(p, DEFAULT_PRECISION) })
    }

    pub fn alpha_padic(&self) -> PAdic {
        PAdic::from_i64(self.p, max_precision(self.p), self.alpha as i64)
    }

    /// `ψ_α(x) = ψ(αx)`.
    pub fn psi_alpha(&self, psi: &AdditiveCharacter) -> Result<AdditiveCharacter> {
        psi.twisted(&self.alpha_padic())
    }
}

/// The section data: `τ` and the additive character used throughout (already twisted by α).
#[derive(Clone, Debug)]
pub struct SectionData {
    pub tau: TameCharacter,
    pub psi: AdditiveCharacter,
    weil: WeilRep,
}

impl SectionData {
    pub fn new(tau: TameCharacter, psi: AdditiveCharacter) -> Result<Self> {
        Self::with_beta_sign(tau, psi, 1)
    }

    /// Same, with `β_ψ` replaced by `sign·β_ψ`.
    pub fn with_beta_sign(tau: TameCharacter, psi: AdditiveCharacter, sign: i64) -> Result<Self> {
        if tau.p() != psi.p() {
            return Err(Error::Mismatch("τ and ψ over different fields".into()));
        }
        let weil = WeilRep::with_beta_sign(psi, sign)?;
        Ok(SectionData { tau, psi, weil })
    }

    pub fn p(&self) -> u64 {
        self.psi.p()
    }

    pub fn weil(&self) -> &WeilRep {
        &self.weil
    }

    fn uniformizer(&self) -> PAdic {
        *self.tau.uniformizer()
    }

    /// Support exponent of the section: `𝔭²` (odd p) or `𝔭³` (p = 2).
    fn k0(&self) -> i64 {
        if self.p() == 2 {
            3
        } else {
            2
        }
    }

    fn gamma_inv(&self, x: &PAdic) -> Result<Scalar> {
        Ok(weil_factor(&self.psi, x)?.conj())
    }
}

fn padic(p: u64, x: i64) -> PAdic {
    PAdic::from_i64(p, max_precision(p), x)
}

/// `vol(𝔭^k) = q^{1/2-k}`.
fn vol(p: u64, k: i64) -> Scalar {
    sqrt_q_pow(p, 1 - 2 * k)
}

/// `vol^×(1+𝔭^k) = 1/((q-1)q^{k-1})` for `k ≥ 1`.
fn vol_units(p: u64, k: u32) -> Scalar {
    Scalar::from_ratio(1, ((p - 1) * pow_u64(p, k - 1)) as i64)
}

/// `vol(𝔬^×) = (q-1) q^{-1/2}`.
fn vol_o_units(p: u64) -> Scalar {
    sqrt_q_pow(p, -1).scale_int(p as i64 - 1)
}

fn one_plus_p(a: &PAdic) -> bool {
    (*a - PAdic::one(a.p(), a.prec())).in_ideal(1)
}

/// `L(2s-1, τ²)`.
fn l_2s_minus_1(tau: &TameCharacter) -> Result<RatFunc> {
    l_factor(&tau.square()?).substitute(&Scalar::sqrt_prime(tau.p()), 2, -2)
}

/// `W(r x b)` for `b = (a, 0; a^{-1}c, a^{-1})`: `ψ^{-1}(a^{-1}c/ϖ)` on `a ∈ 1+𝔭`, `c, x, r ∈ 𝔭`.
pub fn whittaker_eval(
    params: &SSParams,
    psi: &AdditiveCharacter,
    a: &PAdic,
    c: &PAdic,
    x: &PAdic,
    r: &[PAdic],
) -> Result<Scalar> {
    if r.len() + 2 != params.l as usize {
        return Err(Error::Invalid(format!("expected {} unipotent coordinates", params.l - 2)));
    }
    if a.is_zero() || !one_plus_p(a) || !c.in_ideal(1) || !x.in_ideal(1) || r.iter().any(|t| !t.in_ideal(1)) {
        return Ok(Scalar::zero());
    }
    let arg = *c * a.checked_inv()? * params.uniformizer.checked_inv()?;
    psi.inverse().eval(&arg)
}

/// `f_s(⟨g, ε⟩, 1)`: supported on `B̃₁𝒩`, equal to `ε |b|^{s+1/2} γ_ψ(b) τ(b)` on
/// `⟨(b, u; 0, b^{-1}), ε⟩⟨v, 1⟩`.
pub fn section_eval(data: &SectionData, g: &MpElement) -> Result<RatFunc> {
    let m = &g.g;
    if m.d.is_zero() {
        return Ok(RatFunc::zero());
    }
    let z = m.c.checked_div(&m.d)?;
    if !z.in_ideal(data.k0()) {
        return Ok(RatFunc::zero());
    }
    let b = m.d.checked_inv()?;
    let prec = m.a.prec().max(m.d.prec());
    let upper = MpElement::lift(Mat2::new(b, m.b, PAdic::zero(b.p()), m.d));
    let sigma = mp_mul(&upper, &MpElement::lift(Mat2::lower(z, prec)))?.eps;
    let v = b.abs_exponent()?;
    let c = &(&weil_factor(&data.psi, &b)? * &data.tau.eval(&b)?) * &sqrt_q_pow(data.p(), -v);
    Ok(RatFunc::monomial(c.scale_int((sigma * g.eps) as i64), v))
}

/// `b = (a, 0; a^{-1}c, a^{-1})`.
fn lower_element(a: &PAdic, c: &PAdic) -> Result<Mat2> {
    let p = a.p();
    let ai = a.checked_inv()?;
    Ok(Mat2::new(*a, PAdic::zero(p), *c * ai, ai))
}

fn check_section_point(a: &PAdic, c: &PAdic) -> Result<()> {
    if a.is_zero() || !one_plus_p(a) {
        return Err(Error::Unsupported("a must lie in 1+𝔭".into()));
    }
    if !c.in_ideal(1) {
        return Err(Error::Unsupported("c must lie in 𝔭".into()));
    }
    Ok(())
}

/// How `τ` restricts to `𝔬^×` relative to `γ_ψ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitCase {
    /// `τ|𝔬^× = (ϖ, ·) γ_ψ`.
    HilbertTwist,
    /// `τ|𝔬^× = γ_ψ`.
    WeilFactor,
    /// Neither (p odd only).
    Other,
}

pub fn unit_case(data: &SectionData) -> Result<UnitCase> {
    let p = data.p();
    if p == 2 {
        // τ unramified; ψ-dependence sits in the p = 2 closed forms
        return Ok(UnitCase::Other);
    }
    let g = padic(p, primitive_root(p) as i64);
    let t = data.tau.eval(&g)?;
    let gp = weil_factor(&data.psi, &g)?;
    let h = hilbert(&data.uniformizer(), &g)?;
    if t == gp.scale_int(h as i64) {
        Ok(UnitCase::HilbertTwist)
    } else if t == gp {
        Ok(UnitCase::WeilFactor)
    } else {
        Ok(UnitCase::Other)
    }
}

/// `A(τ, ψ, s)` in the odd residual case split; `None` when `τ|𝔬^×` is in neither case.
fn a_factor_odd(data: &SectionData) -> Result<Option<RatFunc>> {
    let p = data.p();
    let w = data.uniformizer();
    Ok(match unit_case(data)? {
        UnitCase::HilbertTwist => {
            let c = &data.gamma_inv(&w)? * &data.tau.eval(&w)?;
            Some(RatFunc::monomial(c, 1))
        }
        UnitCase::WeilFactor => Some(RatFunc::constant(sqrt_q_pow(p, -1))),
        UnitCase::Other => None,
    })
}

/// `A(τ, ψ, s) = 2^{-s} τ(2) vol^×(1+𝔭³)` for `F = ℚ₂`.
fn a_factor_two(data: &SectionData) -> Result<RatFunc> {
    let t2 = data.tau.eval(&padic(2, 2))?;
    Ok(RatFunc::monomial(&t2 * &vol_units(2, 3), 1))
}

/// `[M(τ, s) f_s](b, 1)` for `b = (a, 0; a^{-1}c, a^{-1})`, `a ∈ 1+𝔭`, `c ∈ 𝔭`, by the closed form.
pub fn intertwine_closed(data: &SectionData, c: &PAdic, a: &PAdic) -> Result<RatFunc> {
    check_section_point(a, c)?;
    let p = data.p();
    let tau = &data.tau;
    let m1 = padic(p, -1);
    if p != 2 {
        if c.in_ideal(2) {
            let Some(a_f) = a_factor_odd(data)? else {
                return Ok(RatFunc::zero());
            };
            let k = tau.eval(&m1)?.scale_int(p as i64 - 1);
            return Ok(a_f.scale(&k).mul(&l_2s_minus_1(tau)?.sub(&RatFunc::one())));
        }
        let k = &tau.eval(c)? * &data.gamma_inv(&(-*c))?;
        return Ok(RatFunc::monomial(k, 1));
    }
    let a2 = a_factor_two(data)?.scale(&Scalar::from_int(2));
    match c.val() {
        1 => Ok(a2.scale(&data.gamma_inv(&(-(*c * *a)))?)),
        2 => Ok(RatFunc::zero()),
        _ => {
            let sign = if c.is_zero() { hilbert(&m1, a)? } else { hilbert(&(-*c), a)? };
            let half = PAdic::from_ratio(2, max_precision(2), 1, 2)?;
            let one_psi = &Scalar::one() + &data.psi.eval(&half)?;
            let k = &(&data.gamma_inv(&padic(2, 2))? * &data.gamma_inv(a)?) * &one_psi;
            Ok(a2.scale(&k.scale_int(sign as i64)).mul(&l_2s_minus_1(tau)?.sub(&RatFunc::one())))
        }
    }
}

/// Shells summed explicitly before the geometric tail takes over.
const EXPLICIT_SHELLS: i64 = 4;

/// `[M(τ, s) f_s](b, 1)` by summing the intertwining integral over the shells `v(u^{-1}) = ℓ`:
/// `vol(𝔬^×) ∫ (-uc, a) τ(u^{-1}) |u|^{1/2-s} γ_ψ^{-1}(u^{-1}a) f_s(⟨(1, 0; a²u^{-1}+c, 1), 1⟩, -1) d^×u`,
/// with `(au, a)` in place of `(-uc, a)` when `c = 0`. Far shells are summed as a geometric series
/// once their period-two pattern is checked.
pub fn intertwine_shell_sum(data: &SectionData, c: &PAdic, a: &PAdic) -> Result<RatFunc> {
    check_section_point(a, c)?;
    let p = data.p();
    let k0 = data.k0();
    let prec = max_precision(p);
    let w0 = data.uniformizer();
    let tau_m1 = data.tau.eval(&padic(p, -1))?;
    let e0: i64 = if p == 2 { 3 } else { 1 };
    let a2 = *a * *a;
    let shell = |l: i64| -> Result<Scalar> {
        let e = (k0 - l).max(e0) as u32;
        let mut acc = Scalar::zero();
        for v in 1..pow_u64(p, e) {
            if v % p == 0 {
                continue;
            }
            let w = w0.pow(l)? * padic(p, v as i64);
            let z = a2 * w + *c;
            let f = section_eval(data, &MpElement::lift(Mat2::lower(z, prec)))?;
            let f = f.as_constant().ok_or_else(|| Error::Verification("section not constant on 𝒩".into()))?;
            if f.is_zero() {
                continue;
            }
            let sign = if c.is_zero() { hilbert(&(*a * w), a)? } else { hilbert(&(-(*c * w)), a)? };
            let t = &(&data.tau.eval(&w)? * &data.gamma_inv(&(w * *a))?) * &f;
            acc = &acc + &t.scale_int(sign as i64);
        }
        Ok(&(&acc * &vol_units(p, e)) * &tau_m1)
    };
    let term = |l: i64, s: &Scalar| RatFunc::monomial(s * &sqrt_q_pow(p, l), l);
    let lo = c.valuation().map_or(1, |v| v.min(1));
    let hi = c.valuation().map_or(k0, |v| v.max(k0)) + EXPLICIT_SHELLS;
    let mut total = RatFunc::zero();
    for l in lo..=hi {
        let s = shell(l)?;
        if !s.is_zero() {
            total = total.add(&term(l, &s));
        }
    }
    let t2 = data.tau.value_on_uniformizer().pow(2)?;
    let mut tail = RatFunc::zero();
    for l in [hi + 1, hi + 2] {
        let s = shell(l)?;
        if shell(l + 2)? != &t2 * &s {
            return Err(Error::Verification(format!("shell {l} is not period-two")));
        }
        if !s.is_zero() {
            tail = tail.add(&term(l, &s));
        }
    }
    let q = Scalar::from_int(p as i64);
    let tail = tail.mul(&RatFunc::geometric(&t2 * &q, 2));
    Ok(total.add(&tail).scale(&vol_o_units(p)))
}

/// `Ψ(W, φ, f_s)` for the plain section.
pub fn psi_plain_closed(params: &SSParams, data: &SectionData) -> Result<Scalar> {
    let p = data.p();
    let l = params.l as i64;
    let beta_m2 = data.weil.beta().pow(-2)?;
    let g_m1 = weil_factor(&data.psi, &padic(p, -1))?;
    let vu = vol_units(p, 1);
    if p != 2 {
        let v = [g_m1.conj(), vol(p, 1).pow(l)?, vol(p, 0), vu, vol(p, 2)];
        return Ok(v.iter().fold(beta_m2, |acc, x| &acc * x));
    }
    let v = [Scalar::from_ratio(1, 2), g_m1, vol(2, 0).pow(2)?, vu, vol(2, 3), vol(2, 1).pow(l - 1)?];
    Ok(v.iter().fold(beta_m2, |acc, x| &acc * x))
}

/// `Ψ(W, φ, f_s)` (plain) or `Ψ(W, φ, M(τ, s) f_s)` (intertwined), in closed form.
pub fn psi_closed(params: &SSParams, data: &SectionData, intertwined: bool) -> Result<RatFunc> {
    let plain = psi_plain_closed(params, data)?;
    if !intertwined {
        return Ok(RatFunc::constant(plain));
    }
    Ok(intertwined_ratio(data)?.scale(&plain))
}

/// `Ψ(M f_s) / Ψ(f_s)`.
fn intertwined_ratio(data: &SectionData) -> Result<RatFunc> {
    let p = data.p();
    let tau = &data.tau;
    let l_minus_1 = l_2s_minus_1(tau)?.sub(&RatFunc::one());
    if p == 2 {
        let half = PAdic::from_ratio(2, max_precision(2), 1, 2)?;
        let one_psi = &Scalar::one() + &data.psi.eval(&half)?;
        let k = &data.gamma_inv(&padic(2, 2))? * &one_psi.scale_int(2);
        let t2 = tau.eval(&padic(2, 2))?.pow(2)?;
        // (-1 + τ²(2) 2^{2-2s}) / (1 - τ²(2) 2^{1-2s})
        let num = RatFunc::laurent(&[(0, Scalar::from_int(-1)), (2, t2.scale_int(4))]);
        let den = RatFunc::laurent(&[(0, Scalar::one()), (2, -&t2.scale_int(2))]);
        return a_factor_two(data)?.scale(&k).mul(&num).div(&den);
    }
    let w = data.uniformizer();
    let tau_m1 = tau.eval(&padic(p, -1))?;
    let q1 = p as i64 - 1;
    match unit_case(data)? {
        UnitCase::HilbertTwist => {
            let a_f = a_factor_odd(data)?.expect("case has A");
            let lam = RatFunc::constant(Scalar::from_ratio(1, q1));
            Ok(a_f.scale(&tau_m1.scale_int(q1)).mul(&l_minus_1.sub(&lam)))
        }
        UnitCase::WeilFactor => {
            let a_f = a_factor_odd(data)?.expect("case has A");
            let g = quadratic_gauss_sum(&data.psi.inverse())?;
            let lam_c = -&(&(&tau.eval(&w)? * &weil_factor(&data.psi, &w)?) * &(&sqrt_q_pow(p, 1) * &g));
            let lam = RatFunc::monomial(&lam_c * &Scalar::from_ratio(1, q1), 1);
            Ok(a_f.scale(&tau_m1.scale_int(q1)).mul(&l_minus_1.sub(&lam)))
        }
        UnitCase::Other => {
            // only the unit shell c ∈ ϖ𝔬^× survives
            let mut acc = Scalar::zero();
            for c0 in 1..p {
                let c = padic(p, c0 as i64) * w;
                let t = &(&data.psi.inverse().eval(&padic(p, c0 as i64))? * &tau.eval(&c)?) * &data.gamma_inv(&(-c))?;
                acc = &acc + &t;
            }
            Ok(RatFunc::monomial(acc, 1))
        }
    }
}

/// `Ψ` by direct summation over `B̄₁`, the unipotent coordinates and `x`, on cells of depth `depth`.
///
/// `ω_ψ(b)φ` comes from the Weil representation on grids; the section comes from `section_eval`
/// (plain) or the shell-sum path of the intertwining operator.
pub fn psi_bruteforce(params: &SSParams, data: &SectionData, depth: u32, intertwined: bool) -> Result<RatFunc> {
    let p = data.p();
    if p != params.p {
        return Err(Error::Mismatch("section data and parameters over different fields".into()));
    }
    if depth < data.k0() as u32 {
        return Err(Error::Invalid("depth must reach the section support".into()));
    }
    let prec = max_precision(p);
    let w = data.uniformizer().with_prec(prec);
    let phi = if p == 2 { SchwartzFn::indicator(p, 0) } else { SchwartzFn::indicator(p, 1) };
    let cells = pow_u64(p, depth - 1);
    let n_r = params.l as usize - 2;
    let r_cells = pow_u64(p, (depth - 1) * n_r as u32);
    let r_grid: Vec<Vec<PAdic>> = (0..r_cells)
        .map(|mut idx| {
            (0..n_r)
                .map(|_| {
                    let j = idx % cells;
                    idx /= cells;
                    padic(p, j as i64) * w
                })
                .collect()
        })
        .collect();
    let vol_r = vol(p, depth as i64).pow(n_r as i64)?;
    let weight = &(&vol_units(p, depth) * &vol(p, depth as i64)) * &vol_r;
    let mut groups: Vec<(RatFunc, Scalar)> = Vec::new();
    for ja in 0..cells {
        let a = PAdic::one(p, prec) + padic(p, ja as i64) * w;
        for jc in 0..cells {
            let c = if jc == 0 { w.pow(depth as i64)? } else { padic(p, jc as i64) * w };
            let b = MpElement::lift(lower_element(&a, &c)?);
            let f = if intertwined { intertwine_shell_sum(data, &c, &a)? } else { section_eval(data, &b)? };
            if f.is_zero() {
                continue;
            }
            let wphi = data.weil.act(&b, &phi)?;
            let inner = wphi.integrate_weighted(1, |x| {
                let mut s = Scalar::zero();
                for r in &r_grid {
                    s = &s + &whittaker_eval(params, &data.psi, &a, &c, x, r)?;
                }
                Ok(s)
            })?;
            if inner.is_zero() {
                continue;
            }
            match groups.iter_mut().find(|(g, _)| *g == f) {
                Some((_, s)) => *s = &*s + &inner,
                None => groups.push((f, inner)),
            }
        }
    }
    let mut total = RatFunc::zero();
    for (f, s) in groups {
        total = total.add(&f.scale(&s));
    }
    Ok(total.scale(&weight))
}

/// `γ(s, π_{α,l}^ω × τ, ψ_α)` as a function of `X = q^{-s}`.
pub fn gamma_assemble(params: &SSParams, tau: &TameCharacter, psi: &AdditiveCharacter) -> Result<RatFunc> {
    gamma_assemble_with(params, &SectionData::new(tau.clone(), params.psi_alpha(psi)?)?)
}

/// Same, from prepared section data (its character already twisted by α).
pub fn gamma_assemble_with(params: &SSParams, data: &SectionData) -> Result<RatFunc> {
    let p = data.p();
    if p != params.p {
        return Err(Error::Mismatch("τ and π over different fields".into()));
    }
    let tau = &data.tau;
    let psi = &data.psi;
    let ratio = psi_closed(params, data, true)?.div(&psi_closed(params, data, false)?)?;
    let m1 = padic(p, -1);
    let v2 = if p == 2 { 1 } else { 0 };
    // c(s, l, τ) = τ(2)^{-2} |2|^{-2(s-1/2)}
    let c = RatFunc::monomial(&tau.eval(&padic(p, 2))?.pow(-2)? * &sqrt_q_pow(p, -2 * v2), -2 * v2);
    let k = [
        Scalar::from_int(params.omega_sign),
        tau.eval(&m1)?.pow(params.l as i64)?,
        weil_factor(psi, &m1)?,
        weil_index_base(psi)?,
    ]
    .iter()
    .fold(Scalar::one(), |acc, x| &acc * x);
    Ok(c.scale(&k).mul(&gamma_2s_minus_1_psi2(tau, psi)?).mul(&ratio))
}

/// One row of a pole scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleRow {
    pub tau_uniformizer_sign: i64,
    pub tau_residue_exponent: u64,
    /// Order of `γ` at `s = 1`; negative for a pole.
    pub order_at_one: i64,
    pub unit_condition: bool,
    pub uniformizer_condition: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleScan {
    pub rows: Vec<PoleRow>,
}

impl PoleScan {
    /// Exactly one simple pole, at the row satisfying both conditions.
    pub fn passed(&self) -> bool {
        let poles: Vec<&PoleRow> = self.rows.iter().filter(|r| r.order_at_one < 0).collect();
        let both: Vec<&PoleRow> = self.rows.iter().filter(|r| r.unit_condition && r.uniformizer_condition).collect();
        poles.len() == 1 && poles[0].order_at_one == -1 && both.len() == 1 && poles[0] == both[0]
    }

    pub fn pole(&self) -> Option<&PoleRow> {
        self.rows.iter().find(|r| r.order_at_one < 0)
    }
}

/// Orders at `s = 1` of `γ(s, π × τ, ψ_α)` over the four tame quadratic `τ`, with the predicted
/// conditions `τ|𝔬^× = γ_{ψ_α}|𝔬^×` and `τ(ϖ) = γ_{ψ_α}^{-1}(ϖ) |G(ψ_α^{-1})| / G(ψ_α^{-1})`.
pub fn pole_scan(params: &SSParams, psi: &AdditiveCharacter) -> Result<PoleScan> {
    let p = params.p;
    if p == 2 {
        return Err(Error::Unsupported("pole scan needs odd p".into()));
    }
    let psi_a = params.psi_alpha(psi)?;
    let x0 = Scalar::from_ratio(1, p as i64);
    let g = quadratic_gauss_sum(&psi_a.inverse())?;
    let w = params.uniformizer;
    let target = &weil_factor(&psi_a, &w)?.conj() * &sqrt_q_pow(p, 1).div(&g)?;
    let gen = padic(p, primitive_root(p) as i64);
    let mut rows = Vec::new();
    for tau in TameCharacter::quadratic_characters(p, w)? {
        let gamma = gamma_assemble(params, &tau, psi)?;
        let order = gamma.order_at(&x0)?;
        rows.push(PoleRow {
            tau_uniformizer_sign: if tau.value_on_uniformizer().is_one() { 1 } else { -1 },
            tau_residue_exponent: tau.residue_exponent(),
            order_at_one: order,
            unit_condition: tau.eval(&gen)? == weil_factor(&psi_a, &gen)?,
            uniformizer_condition: *tau.value_on_uniformizer() == target,
        });
    }
    Ok(PoleScan { rows })
}

/// `ω(-I) γ(ψ_α)^{-1} γ_{ψ_α}^{-1}(ϖ) q^{1/2-s}`, the expected value at `τ = 1` for odd p.
pub fn trivial_tau_expected(params: &SSParams, psi: &AdditiveCharacter) -> Result<RatFunc> {
    let p = params.p;
    let psi_a = params.psi_alpha(psi)?;
    let k = &(&weil_index_base(&psi_a)?.inv()? * &weil_factor(&psi_a, &params.uniformizer)?.conj()) * &sqrt_q_pow(p, 1);
    Ok(RatFunc::monomial(k.scale_int(params.omega_sign), 1))
}

/// `τ(2) 2^{1/2-s}`, the expected value over `ℚ₂` for unramified `τ`.
pub fn q2_expected(tau: &TameCharacter) -> Result<RatFunc> {
    Ok(RatFunc::monomial(&tau.eval(&padic(2, 2))? * &sqrt_q_pow(2, 1), 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odd_taus(p: u64) -> Vec<TameCharacter> {
        let w = PAdic::uniformizer(p, DEFAULT_PRECISION);
        let mut out = TameCharacter::quadratic_characters(p, w).unwrap();
        out.push(TameCharacter::new(p, w, Scalar::root_of_unity(3, 1), 0).unwrap());
        if p > 3 {
            out.push(TameCharacter::new(p, w, Scalar::one(), 1).unwrap());
        }
        out
    }

    #[test]
    fn shell_sum_matches_closed_form_odd() {
        for p in [3u64, 5] {
            let psi = AdditiveCharacter::standard(p);
            for tau in odd_taus(p) {
                let data = SectionData::new(tau.clone(), psi).unwrap();
                for a in [1i64, 1 + p as i64] {
                    let a = padic(p, a);
                    for c in [0i64, p as i64, 2 * p as i64, (p * p) as i64, (p * p * p) as i64] {
                        let c = padic(p, c);
                        let s = intertwine_shell_sum(&data, &c, &a).unwrap();
                        let k = intertwine_closed(&data, &c, &a).unwrap();
                        assert_eq!(s, k, "p={p} tau={tau:?} c={c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn shell_sum_matches_closed_form_two() {
        for sign in [1, -1] {
            let psi = AdditiveCharacter::with_sign(2, sign);
            for t in [Scalar::one(), Scalar::from_int(-1), Scalar::root_of_unity(3, 1)] {
                let data = SectionData::new(TameCharacter::unramified(2, t), psi).unwrap();
                for a in [1i64, 3, 5, 7] {
                    let a = padic(2, a);
                    for c in [0i64, 2, 6, 4, 12, 8, 24, 16, 48] {
                        let c = padic(2, c);
                        let s = intertwine_shell_sum(&data, &c, &a).unwrap();
                        let k = intertwine_closed(&data, &c, &a).unwrap();
                        assert_eq!(s, k, "sign={sign} a={a:?} c={c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn theorem_trivial_tau() {
        for p in [3u64, 5, 7] {
            let psi = AdditiveCharacter::standard(p);
            for alpha in [1, least_nonresidue(p)] {
                for om in [1, -1] {
                    let params = SSParams::new(p, 2, alpha, om).unwrap();
                    let g = gamma_assemble(&params, &TameCharacter::trivial(p), &psi).unwrap();
                    assert_eq!(g, trivial_tau_expected(&params, &psi).unwrap(), "p={p} α={alpha} ω={om}");
                }
            }
        }
    }

    #[test]
    fn q2_closed_form() {
        for sign in [1, -1] {
            let psi = AdditiveCharacter::with_sign(2, sign);
            for t in [Scalar::one(), Scalar::from_int(-1), Scalar::root_of_unity(3, 1), Scalar::from_int(3)] {
                let tau = TameCharacter::unramified(2, t);
                let params = SSParams::new(2, 2, 1, 1).unwrap();
                let g = gamma_assemble(&params, &tau, &psi).unwrap();
                assert_eq!(g, q2_expected(&tau).unwrap(), "sign={sign}");
            }
        }
    }

    #[test]
    fn beta_sign_does_not_move_gamma() {
        let p = 5;
        let psi = AdditiveCharacter::standard(p);
        let params = SSParams::new(p, 3, 1, 1).unwrap();
        for tau in odd_taus(p) {
            let a = gamma_assemble_with(&params, &SectionData::with_beta_sign(tau.clone(), psi, 1).unwrap()).unwrap();
            let b = gamma_assemble_with(&params, &SectionData::with_beta_sign(tau, psi, -1).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn pole_scan_small() {
        let psi = AdditiveCharacter::standard(3);
        for om in [1, -1] {
            let scan = pole_scan(&SSParams::new(3, 2, 1, om).unwrap(), &psi).unwrap();
            assert!(scan.passed(), "{scan:?}");
        }
    }

    #[test]
    fn bruteforce_small() {
        let w3 = PAdic::uniformizer(3, DEFAULT_PRECISION);
        let w5 = PAdic::uniformizer(5, DEFAULT_PRECISION);
        let cases = [
            (3, 2, TameCharacter::trivial(3)),
            (3, 3, TameCharacter::new(3, w3, Scalar::from_int(-1), 1).unwrap()),
            (5, 2, TameCharacter::new(5, w5, Scalar::root_of_unity(3, 1), 1).unwrap()),
        ];
        for (p, l, tau) in cases {
            let params = SSParams::new(p, l, 1, 1).unwrap();
            let data = SectionData::new(tau, AdditiveCharacter::standard(p)).unwrap();
            if p == 5 {
                assert_eq!(unit_case(&data).unwrap(), UnitCase::Other);
            }
            for m in [false, true] {
                let b = psi_bruteforce(&params, &data, 3, m).unwrap();
                let c = psi_closed(&params, &data, m).unwrap();
                assert_eq!(b, c, "p={p} l={l} intertwined={m}");
            }
        }
    }
}
