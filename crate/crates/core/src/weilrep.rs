//! The Weil representation of the rank-one metaplectic group on Schwartz–Bruhat functions of one
//! variable, realized on finite coset grids.

use std::collections::{BTreeMap, HashMap};

use crate::characters::{sqrt_q_pow, weil_factor, weil_index_base, AdditiveCharacter};
use crate::error::{Error, Result};
use crate::metaplectic::{mp_mul, Mat2, MpElement};
use crate::padic::{hilbert, pow_u64, PAdic, DEFAULT_PRECISION};
use crate::scalars::{RootSum, Scalar};

/// Largest grid handled by a single transform.
pub const GRID_BUDGET: u64 = 1 << 16;

/// A sparse integer combination `Σ c_e ζ^e` of `order`-th roots of unity.
type Cell = Vec<(u32, i64)>;

fn normalize(cell: &mut Cell, order: u64) {
    // ζ^{e + order/2} = -ζ^e
    let half = (order / 2) as u32;
    let mut map: BTreeMap<u32, i64> = BTreeMap::new();
    for &(e, c) in cell.iter() {
        let (e, c) = if e >= half { (e - half, -c) } else { (e, c) };
        *map.entry(e).or_insert(0) += c;
    }
    cell.clear();
    cell.extend(map.into_iter().filter(|&(_, c)| c != 0));
}

fn v2(p: u64) -> i64 {
    if p == 2 {
        1
    } else {
        0
    }
}

/// A function on `F` supported in `𝔭^{-m}` and constant on `𝔭^n`-cosets.
///
/// Cell `j ∈ [0, p^{m+n})` is the coset of `j·ϖ^{-m}`; its value is `factor · Σ c_e ζ_order^e`.
#[derive(Clone, Debug)]
pub struct SchwartzFn {
    p: u64,
    m: i64,
    n: i64,
    order: u64,
    factor: Scalar,
    values: Vec<Cell>,
}

impl SchwartzFn {
    pub fn from_ints(p: u64, m: i64, n: i64, vals: &[i64]) -> Result<Self> {
        if m + n < 0 {
            return Err(Error::Invalid("support must contain the constancy lattice".into()));
        }
        let size = pow_u64(p, (m + n) as u32);
        if vals.len() as u64 != size {
            return Err(Error::Invalid(format!("expected {size} values, got {}", vals.len())));
        }
        let values = vals.iter().map(|&c| if c == 0 { vec![] } else { vec![(0, c)] }).collect();
        Ok(SchwartzFn { p, m, n, order: 8, factor: Scalar::one(), values })
    }

    /// Characteristic function of `𝔭^k`.
    pub fn indicator(p: u64, k: i64) -> Self {
        SchwartzFn { p, m: -k, n: k, order: 8, factor: Scalar::one(), values: vec![vec![(0, 1)]] }
    }

    pub fn random<R: rand::Rng>(p: u64, m: i64, n: i64, rng: &mut R) -> Result<Self> {
        let size = pow_u64(p, (m + n).max(0) as u32);
        let vals: Vec<i64> = (0..size).map(|_| rng.gen_range(-3..=3)).collect();
        Self::from_ints(p, m, n, &vals)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `(M, N)`: supported in `𝔭^{-M}`, constant on `𝔭^N`-cosets.
    pub fn exponents(&self) -> (i64, i64) {
        (self.m, self.n)
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    fn size_of(p: u64, m: i64, n: i64) -> Result<u64> {
        let k = (m + n).max(0) as u32;
        let mut s: u64 = 1;
        for _ in 0..k {
            s = s.saturating_mul(p);
        }
        if s > GRID_BUDGET {
            return Err(Error::Budget(format!("grid of {s} cells")));
        }
        Ok(s)
    }

    /// Representative `j·ϖ^{-m}` of cell `j`.
    pub fn representative(&self, j: usize, prec: u32) -> PAdic {
        PAdic::from_i64(self.p, prec, j as i64).shift(-self.m)
    }

    fn index_of(&self, x: &PAdic) -> Result<Option<usize>> {
        if x.is_zero() {
            return Ok(Some(0));
        }
        if x.val() < -self.m {
            return Ok(None);
        }
        if x.val() >= self.n {
            return Ok(Some(0));
        }
        Ok(Some(x.shift(self.m).to_int_mod((self.m + self.n) as u32)? as usize))
    }

    fn cell_scalar(&self, cell: &Cell) -> Scalar {
        let mut acc = RootSum::new(self.order);
        for &(e, c) in cell {
            acc.add_exp(e as u64, c as i128);
        }
        acc.to_scalar()
    }

    pub fn eval(&self, x: &PAdic) -> Result<Scalar> {
        Ok(match self.index_of(x)? {
            None => Scalar::zero(),
            Some(j) => &self.factor * &self.cell_scalar(&self.values[j]),
        })
    }

    /// All cell values, in cell order.
    pub fn cell_values(&self) -> Vec<Scalar> {
        self.values.iter().map(|c| &self.factor * &self.cell_scalar(c)).collect()
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        SchwartzFn { factor: &self.factor * s, ..self.clone() }
    }

    fn with_order(&self, order: u64) -> Self {
        let order = num_integer::lcm(order, self.order);
        if order == self.order {
            return self.clone();
        }
        let r = order / self.order;
        let values = self.values.iter().map(|c| c.iter().map(|&(e, k)| ((e as u64 * r) as u32, k)).collect()).collect();
        SchwartzFn { order, values, ..self.clone() }
    }

    /// The same function on a grid with larger exponents.
    pub fn refine(&self, m2: i64, n2: i64) -> Result<Self> {
        if m2 < self.m || n2 < self.n {
            return Err(Error::Invalid("refinement cannot shrink the grid".into()));
        }
        let size = Self::size_of(self.p, m2, n2)?;
        let stride = pow_u64(self.p, (m2 - self.m) as u32);
        let old = pow_u64(self.p, (self.m + self.n) as u32);
        let values = (0..size)
            .map(|i| if i % stride == 0 { self.values[((i / stride) % old) as usize].clone() } else { vec![] })
            .collect();
        Ok(SchwartzFn { m: m2, n: n2, values, ..self.clone() })
    }

    /// Exact equality of the represented functions.
    pub fn same_as(&self, other: &Self) -> Result<bool> {
        if self.p != other.p {
            return Ok(false);
        }
        let (m, n) = (self.m.max(other.m), self.n.max(other.n));
        let order = num_integer::lcm(self.order, other.order);
        let a = self.refine(m, n)?.with_order(order);
        let b = other.refine(m, n)?.with_order(order);
        if a.factor.is_zero() || b.factor.is_zero() {
            let za = a.factor.is_zero() || a.values.iter().all(|c| a.cell_scalar(c).is_zero());
            let zb = b.factor.is_zero() || b.values.iter().all(|c| b.cell_scalar(c).is_zero());
            return Ok(za && zb);
        }
        let r = a.factor.div(&b.factor)?;
        if let Some((rm, rk)) = r.as_root_of_unity() {
            // compare a·r - b cellwise in one root sum
            let order = num_integer::lcm(order, rm);
            let (a, b) = (a.with_order(order), b.with_order(order));
            let shift = rk * (order / rm);
            for (ca, cb) in a.values.iter().zip(&b.values) {
                let mut acc = RootSum::new(order);
                for &(e, c) in ca {
                    acc.add_exp(e as u64 + shift, c as i128);
                }
                for &(e, c) in cb {
                    acc.add_exp(e as u64, -(c as i128));
                }
                if !acc.to_scalar().is_zero() {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        for (ca, cb) in a.values.iter().zip(&b.values) {
            if &a.cell_scalar(ca) * &r != b.cell_scalar(cb) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `∫_{𝔭^k} w(x) φ(x) dx` for the ψ-self-dual measure, `w` evaluated at cell representatives.
    pub fn integrate_weighted<W>(&self, k: i64, mut w: W) -> Result<Scalar>
    where
        W: FnMut(&PAdic) -> Result<Scalar>,
    {
        let g = if self.n < k { self.refine(self.m, k)? } else { self.clone() };
        let stride = if k + g.m > 0 { pow_u64(g.p, (k + g.m) as u32) as usize } else { 1 };
        let prec = crate::padic::max_precision(g.p);
        let mut groups: HashMap<Scalar, RootSum> = HashMap::new();
        for j in (0..g.values.len()).step_by(stride) {
            let cell = &g.values[j];
            if cell.is_empty() {
                continue;
            }
            let x = if j == 0 { PAdic::zero(g.p) } else { g.representative(j, prec) };
            let wx = w(&x)?;
            if wx.is_zero() {
                continue;
            }
            let acc = groups.entry(wx).or_insert_with(|| RootSum::new(g.order));
            for &(e, c) in cell {
                acc.add_exp(e as u64, c as i128);
            }
        }
        let mut total = Scalar::zero();
        for (wx, acc) in groups {
            total = &total + &(&wx * &acc.to_scalar());
        }
        Ok(&(&total * &g.factor) * &sqrt_q_pow(g.p, 1 - 2 * g.n))
    }

    /// `ξ ↦ φ(-ξ)`.
    pub fn reflect(&self) -> Self {
        let size = self.values.len();
        let values = (0..size).map(|j| self.values[(size - j) % size].clone()).collect();
        SchwartzFn { values, ..self.clone() }
    }

    /// `ξ ↦ φ(aξ)`, no Weil factors.
    pub fn dilate_raw(&self, a: &PAdic) -> Result<Self> {
        let v = a.valuation().ok_or(Error::ZeroInput)?;
        let (m2, n2) = (self.m + v, self.n - v);
        let size = self.values.len() as u64;
        let u = if size > 1 { a.unit_mod((self.m + self.n) as u32)? } else { 1 };
        let values =
            (0..size).map(|i| self.values[((i as u128 * u as u128) % size as u128) as usize].clone()).collect();
        Ok(SchwartzFn { m: m2, n: n2, values, ..self.clone() })
    }

    /// `ξ ↦ ψ(tξ²) φ(ξ)`.
    pub fn modulate(&self, psi: &AdditiveCharacter, t: &PAdic) -> Result<Self> {
        if t.is_zero() {
            return Ok(self.clone());
        }
        let p = self.p;
        let v = t.val();
        let need = (1 + self.m - v - v2(p)).max((1 - v + 1).div_euclid(2));
        let n2 = self.n.max(need);
        let base = self.refine(self.m, n2)?;
        let prec = (2 * (self.m + n2) + 4).max(DEFAULT_PRECISION as i64) as u32;
        let prec = prec.min(crate::padic::max_precision(p));
        let t = t.with_prec(prec);
        let mut exps = Vec::with_capacity(base.values.len());
        let mut kmax = 0u32;
        for (j, cell) in base.values.iter().enumerate() {
            if cell.is_empty() {
                exps.push(None);
                continue;
            }
            let x = base.representative(j, prec);
            let e = psi.eval_exp(&(t * x * x))?;
            if let Some((k, _)) = e {
                kmax = kmax.max(k);
            }
            exps.push(e);
        }
        let mut out = base.with_order(pow_u64(p, kmax));
        let order = out.order;
        for (cell, e) in out.values.iter_mut().zip(exps) {
            if let Some((k, num)) = e {
                let sh = num * (order / pow_u64(p, k));
                for (ex, _) in cell.iter_mut() {
                    *ex = ((*ex as u64 + sh) % order) as u32;
                }
                normalize(cell, order);
            }
        }
        Ok(out)
    }

    /// `φ̂(y) = ∫ φ(x) ψ(2xy) dx` with the measure self-dual for `ψ₂`.
    pub fn fourier(&self, psi: &AdditiveCharacter) -> Result<Self> {
        let p = self.p;
        let (m, n) = (self.m, self.n);
        let (m2, n2) = (n + v2(p) - 1, m + 1 - v2(p));
        let size = Self::size_of(p, m2, n2)?;
        // ψ(2 x_j y_i) = e(2t·ij / p^k)
        let k = (m + m2 + 1).max(0) as u32;
        let pk = pow_u64(p, k);
        let tw = psi.twist().to_int_mod(k)?;
        let src = self.with_order(pk);
        let order = src.order;
        let mult = order / pk;
        let mut acc = vec![0i64; order as usize];
        let mut touched: Vec<usize> = Vec::new();
        let mut values = Vec::with_capacity(size as usize);
        for i in 0..size {
            let step = ((2 * tw as u128 * i as u128) % pk as u128) as u64;
            let mut ex = 0u64;
            for cell in &src.values {
                let sh = ex * mult;
                for &(e, c) in cell {
                    let idx = ((e as u64 + sh) % order) as usize;
                    if acc[idx] == 0 {
                        touched.push(idx);
                    }
                    acc[idx] += c;
                }
                ex = (ex + step) % pk.max(1);
            }
            let mut cell: Cell = Vec::new();
            for &idx in &touched {
                if acc[idx] != 0 {
                    cell.push((idx as u32, acc[idx]));
                    acc[idx] = 0;
                }
            }
            touched.clear();
            normalize(&mut cell, order);
            values.push(cell);
        }
        let vol = sqrt_q_pow(p, 1 - 2 * n - v2(p));
        Ok(SchwartzFn { p, m: m2, n: n2, order, factor: &src.factor * &vol, values })
    }

    /// `φ̂(y)` at a single point.
    pub fn fourier_at(&self, psi: &AdditiveCharacter, y: &PAdic) -> Result<Scalar> {
        let p = self.p;
        if y.is_zero() {
            let total: Scalar = self.values.iter().map(|c| self.cell_scalar(c)).sum();
            return Ok(&(&total * &self.factor) * &sqrt_q_pow(p, 1 - 2 * self.n - v2(p)));
        }
        if y.val() < 1 - self.n - v2(p) {
            return Ok(Scalar::zero());
        }
        let prec = crate::padic::max_precision(p).min(y.prec());
        let two_y = PAdic::from_i64(p, prec, 2) * *y;
        let mut terms = Vec::with_capacity(self.values.len());
        let mut kmax = 0u32;
        for (j, cell) in self.values.iter().enumerate() {
            if cell.is_empty() {
                continue;
            }
            let e = psi.eval_exp(&(self.representative(j, prec) * two_y))?;
            if let Some((k, _)) = e {
                kmax = kmax.max(k);
            }
            terms.push((cell, e));
        }
        let order = num_integer::lcm(self.order, 8 * pow_u64(p, kmax));
        let mut acc = RootSum::new(order);
        let r = order / self.order;
        for (cell, e) in terms {
            let sh = e.map_or(0, |(k, num)| num * (order / pow_u64(p, k)));
            for &(ex, c) in cell {
                acc.add_exp(ex as u64 * r + sh, c as i128);
            }
        }
        Ok(&(&acc.to_scalar() * &self.factor) * &sqrt_q_pow(p, 1 - 2 * self.n - v2(p)))
    }
}

/// The Weil representation `ω_ψ` with a fixed choice of `β_ψ`.
#[derive(Clone, Debug)]
pub struct WeilRep {
    psi: AdditiveCharacter,
    beta: Scalar,
}

impl WeilRep {
    /// `β_ψ = γ(ψ)^{-1}`; checks `β_ψ² = γ_ψ(-1)`.
    pub fn new(psi: AdditiveCharacter) -> Result<Self> {
        Self::with_beta_sign(psi, 1)
    }

    pub fn with_beta_sign(psi: AdditiveCharacter, sign: i64) -> Result<Self> {
        let beta = weil_index_base(&psi)?.inv()?.scale_int(sign.signum());
        let m1 = PAdic::from_i64(psi.p(), DEFAULT_PRECISION, -1);
        if &beta * &beta != weil_factor(&psi, &m1)? {
            return Err(Error::Verification("β² ≠ γ_ψ(-1)".into()));
        }
        Ok(WeilRep { psi, beta })
    }

    pub fn psi(&self) -> &AdditiveCharacter {
        &self.psi
    }

    pub fn beta(&self) -> &Scalar {
        &self.beta
    }

    /// `ω(⟨diag(a, a^{-1}), 1⟩)φ(ξ) = γ_ψ^{-1}(a) |a|^{1/2} φ(ξa)`.
    pub fn diag(&self, a: &PAdic, phi: &SchwartzFn) -> Result<SchwartzFn> {
        let c = &weil_factor(&self.psi, a)?.conj() * &sqrt_q_pow(a.p(), -a.valuation().ok_or(Error::ZeroInput)?);
        Ok(phi.dilate_raw(a)?.scale(&c))
    }

    /// `ω(⟨(1, u; 0, 1), 1⟩)φ(ξ) = ψ(uξ²) φ(ξ)`.
    pub fn upper(&self, u: &PAdic, phi: &SchwartzFn) -> Result<SchwartzFn> {
        phi.modulate(&self.psi, u)
    }

    /// `ω(⟨w₁, 1⟩)φ = β_ψ^{-1} φ̂`.
    pub fn w1(&self, phi: &SchwartzFn) -> Result<SchwartzFn> {
        Ok(phi.fourier(&self.psi)?.scale(&self.beta.inv()?))
    }

    /// `ω(⟨g, ε⟩)φ` through the Bruhat decomposition, with the sign of the decomposition computed by
    /// the cocycle.
    pub fn act(&self, g: &MpElement, phi: &SchwartzFn) -> Result<SchwartzFn> {
        let m = &g.g;
        let p = m.p();
        let prec = m.a.prec().max(m.c.prec()).max(DEFAULT_PRECISION);
        if m.c.is_zero() {
            // g = diag(a, a^{-1}) · (1, b/a; 0, 1)
            let t = m.b.checked_div(&m.a)?;
            let parts = [MpElement::lift(Mat2::diag(m.a)?), MpElement::lift(Mat2::upper(t, prec))];
            let s = mp_mul(&parts[0], &parts[1])?.eps;
            let f = self.diag(&m.a, &self.upper(&t, phi)?)?;
            return Ok(f.scale(&Scalar::from_int((s * g.eps) as i64)));
        }
        // g = (1, a/c; 0, 1) · diag(-1/c, -c) · w₁ · (1, d/c; 0, 1)
        let u1 = m.a.checked_div(&m.c)?;
        let u2 = m.d.checked_div(&m.c)?;
        let x = -m.c.checked_inv()?;
        let parts = [
            MpElement::lift(Mat2::upper(u1, prec)),
            MpElement::lift(Mat2::diag(x)?),
            MpElement::lift(Mat2::w1(p, prec)),
            MpElement::lift(Mat2::upper(u2, prec)),
        ];
        let mut prod = parts[0];
        for q in &parts[1..] {
            prod = mp_mul(&prod, q)?;
        }
        let f = self.upper(&u2, phi)?;
        let f = self.w1(&f)?;
        let f = self.diag(&x, &f)?;
        let f = self.upper(&u1, &f)?;
        Ok(f.scale(&Scalar::from_int((prod.eps * g.eps) as i64)))
    }

    /// Right side of the closed form for `ω(⟨(a, 0; a^{-1}c, a^{-1}), 1⟩)φ(x)`:
    /// `(a^{-1}, c) β^{-2} γ_ψ^{-1}(a) γ_ψ(-1) ∬ ψ(2axy) ψ(-cy²) φ(z) ψ(-2yz) dz dy`.
    pub fn lower_closed_form(&self, a: &PAdic, c: &PAdic, phi: &SchwartzFn) -> Result<SchwartzFn> {
        let p = a.p();
        // inner integral is φ̂(-y)
        let g = phi.fourier(&self.psi)?.reflect().modulate(&self.psi, &(-*c))?;
        let h = g.fourier(&self.psi)?.dilate_raw(a)?;
        let m1 = PAdic::from_i64(p, DEFAULT_PRECISION, -1);
        let sign = if c.is_zero() { 1 } else { hilbert(&a.checked_inv()?, c)? };
        let k = &(&self.beta.pow(-2)? * &weil_factor(&self.psi, a)?.conj()) * &weil_factor(&self.psi, &m1)?;
        Ok(h.scale(&k.scale_int(sign as i64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_of_indicator() {
        // odd p: the dual of 𝔬 under ψ(2xy) is 𝔭, and vol(𝔬) = q^{1/2}
        let psi = AdditiveCharacter::standard(3);
        let f = SchwartzFn::indicator(3, 0).fourier(&psi).unwrap();
        let g = SchwartzFn::indicator(3, 1).scale(&Scalar::sqrt_prime(3));
        assert!(f.same_as(&g).unwrap());
    }

    #[test]
    fn fourier_inversion() {
        let mut rng = crate::rng(5);
        for p in [2u64, 3, 5] {
            let psi = AdditiveCharacter::standard(p);
            for (m, n) in [(1, 1), (0, 2), (2, 0), (-1, 2)] {
                let f = SchwartzFn::random(p, m, n, &mut rng).unwrap();
                let ff = f.fourier(&psi).unwrap().fourier(&psi).unwrap();
                assert!(ff.same_as(&f.reflect()).unwrap(), "p={p} m={m} n={n}");
            }
        }
    }

    #[test]
    fn fourier_at_matches_grid() {
        let mut rng = crate::rng(6);
        let psi = AdditiveCharacter::standard(3);
        let f = SchwartzFn::random(3, 1, 1, &mut rng).unwrap();
        let g = f.fourier(&psi).unwrap();
        for j in 0..g.cell_count() {
            let y = g.representative(j, 12);
            assert_eq!(f.fourier_at(&psi, &y).unwrap(), g.eval(&y).unwrap());
        }
    }

    #[test]
    fn minus_identity() {
        for p in [2u64, 3] {
            let psi = AdditiveCharacter::standard(p);
            let w = WeilRep::new(psi).unwrap();
            let f = SchwartzFn::random(p, 1, 1, &mut crate::rng(1)).unwrap();
            let m1 = PAdic::from_i64(p, 12, -1);
            let g = MpElement::lift(Mat2::diag(m1).unwrap());
            let expect = f.reflect().scale(&weil_factor(&psi, &m1).unwrap().conj());
            assert!(w.act(&g, &f).unwrap().same_as(&expect).unwrap());
        }
    }

    fn small_sl2<R: rand::Rng>(p: u64, rng: &mut R) -> Mat2 {
        loop {
            let g = crate::metaplectic::random_sl2_integral(p, 12, rng);
            if g.c.is_zero() || g.c.val() <= 2 {
                return g;
            }
        }
    }

    #[test]
    fn genuineness_sample() {
        let mut rng = crate::rng(11);
        for p in [2u64, 3] {
            let w = WeilRep::new(AdditiveCharacter::standard(p)).unwrap();
            let f = SchwartzFn::random(p, 1, 1, &mut rng).unwrap();
            let mut checked = 0;
            while checked < 40 {
                let (g, h) = (small_sl2(p, &mut rng), small_sl2(p, &mut rng));
                let gh = g * h;
                if !gh.c.is_zero() && gh.c.val() > 2 {
                    continue;
                }
                let s = crate::metaplectic::cocycle(&g, &h).unwrap();
                let lhs = w.act(&MpElement::lift(g), &w.act(&MpElement::lift(h), &f).unwrap()).unwrap();
                let rhs = w.act(&MpElement::new(gh, s), &f).unwrap();
                assert!(lhs.same_as(&rhs).unwrap(), "p={p} g={g} h={h}");
                checked += 1;
            }
        }
    }

    #[test]
    fn lower_closed_form_matches_action() {
        let mut rng = crate::rng(12);
        for p in [2u64, 3, 5] {
            let w = WeilRep::new(AdditiveCharacter::standard(p)).unwrap();
            let f = SchwartzFn::random(p, 1, 1, &mut rng).unwrap();
            for (au, cv, cu) in
                [(1i64, 1i64, 1i64), (1 + p as i64, 2, 2), (2 * p as i64 + 1, 1, -1), (1, 0, 1), (-1, 3, 1)]
            {
                if p == 5 && cv > 2 {
                    continue;
                }
                let a = PAdic::from_i64(p, 12, au);
                let c = PAdic::from_i64(p, 12, cu).shift(cv);
                let g = Mat2::new(a, PAdic::zero(p), c.checked_div(&a).unwrap(), a.checked_inv().unwrap());
                let direct = w.act(&MpElement::lift(g), &f).unwrap();
                let closed = w.lower_closed_form(&a, &c, &f).unwrap();
                assert!(direct.same_as(&closed).unwrap(), "p={p} a={a} c={c}");
            }
        }
    }

    #[test]
    fn opposite_beta_is_not_genuine() {
        let p = 3;
        let w = WeilRep::with_beta_sign(AdditiveCharacter::standard(p), -1).unwrap();
        let f = SchwartzFn::random(p, 1, 1, &mut crate::rng(2)).unwrap();
        let one = PAdic::one(p, 12);
        let g = Mat2::lower(one, 12);
        let lhs = w.act(&MpElement::lift(g), &w.act(&MpElement::lift(g), &f).unwrap()).unwrap();
        let s = crate::metaplectic::cocycle(&g, &g).unwrap();
        let rhs = w.act(&MpElement::new(g * g, s), &f).unwrap();
        assert!(!lhs.same_as(&rhs).unwrap());
    }
}
