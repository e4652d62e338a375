//! The metaplectic double cover of Sp₂ = SL₂ with the Kubota cocycle.

use std::fmt;
use std::ops::Mul;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{hilbert, legendre, pow_u64, random_padic, square_classes, PAdic};

/// A 2×2 matrix over ℚ_p.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: PAdic,
    pub b: PAdic,
    pub c: PAdic,
    pub d: PAdic,
}

impl Mat2 {
    pub fn new(a: PAdic, b: PAdic, c: PAdic, d: PAdic) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity(p: u64, prec: u32) -> Self {
        let (o, z) = (PAdic::one(p, prec), PAdic::zero(p));
        Mat2::new(o, z, z, o)
    }

    /// `w₁ = (0, 1; -1, 0)`.
    pub fn w1(p: u64, prec: u32) -> Self {
        let (o, z) = (PAdic::one(p, prec), PAdic::zero(p));
        Mat2::new(z, o, -o, z)
    }

    pub fn diag(a: PAdic) -> Result<Self> {
        let z = PAdic::zero(a.p());
        Ok(Mat2::new(a, z, z, a.checked_inv()?))
    }

    /// `(1, u; 0, 1)`.
    pub fn upper(u: PAdic, prec: u32) -> Self {
        let p = u.p();
        Mat2::new(PAdic::one(p, prec), u, PAdic::zero(p), PAdic::one(p, prec))
    }

    /// `(1, 0; c, 1)`.
    pub fn lower(c: PAdic, prec: u32) -> Self {
        let p = c.p();
        Mat2::new(PAdic::one(p, prec), PAdic::zero(p), c, PAdic::one(p, prec))
    }

    pub fn p(&self) -> u64 {
        self.a.p()
    }

    pub fn det(&self) -> PAdic {
        self.a * self.d - self.b * self.c
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv_sl2(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn is_integral(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|x| x.in_ideal(0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// `x(g) = c` if `c ≠ 0`, else `d`.
pub fn kubota_x(g: &Mat2) -> PAdic {
    if g.c.is_zero() {
        g.d
    } else {
        g.c
    }
}

/// `σ(g, h) = (x(gh)/x(g), x(gh)/x(h))`.
pub fn cocycle(g: &Mat2, h: &Mat2) -> Result<i8> {
    let xgh = kubota_x(&(*g * *h));
    let (xg, xh) = (kubota_x(g), kubota_x(h));
    hilbert(&xgh.checked_div(&xg)?, &xgh.checked_div(&xh)?)
}

/// `⟨g, ε⟩` in the metaplectic cover.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpElement {
    pub g: Mat2,
    pub eps: i8,
}

impl MpElement {
    pub fn new(g: Mat2, eps: i8) -> Self {
        MpElement { g, eps }
    }

    pub fn lift(g: Mat2) -> Self {
        MpElement { g, eps: 1 }
    }
}

pub fn mp_mul(x: &MpElement, y: &MpElement) -> Result<MpElement> {
    Ok(MpElement { g: x.g * y.g, eps: x.eps * y.eps * cocycle(&x.g, &y.g)? })
}

/// The section `ϑ`: 1 if `c = 0` or `|c| = 1`, and `(c, d)` otherwise.
pub fn theta(g: &Mat2) -> Result<i8> {
    if g.c.is_zero() || g.c.valuation() == Some(0) {
        Ok(1)
    } else {
        hilbert(&g.c, &g.d)
    }
}

/// Outcome of the splitting verification.
#[derive(Clone, Debug, Serialize)]
pub struct SplittingReport {
    pub p: u64,
    pub depth: u32,
    pub pairs_checked: u64,
    pub first_violation: Option<String>,
    pub theta_pairs_checked: u64,
    pub theta_violation: Option<String>,
}

impl SplittingReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none() && self.theta_violation.is_none()
    }
}

/// Valuation exponents of the subgroup 𝒩: `(a-1, b, c, d-1)` lie in `𝔭^{k}` for the returned `k`s.
pub fn n_profile(p: u64) -> (u32, u32, u32, u32) {
    if p == 2 {
        (3, 2, 3, 3)
    } else {
        (1, 1, 2, 1)
    }
}

/// Square-class code of a positive integer: index into `square_classes(p)`.
fn class_code(mut x: u64, p: u64) -> usize {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    let units = if p == 2 { 4 } else { 2 };
    let ui = if p == 2 {
        ((x % 8) / 2) as usize
    } else if legendre(x % p, p) == 1 {
        0
    } else {
        1
    };
    (v % 2) * units + ui
}

/// Verifies that the trivial section is a homomorphism on 𝒩 by sweeping all pairs of coset
/// representatives mod `𝔭^depth`; for odd p also checks the `ϑ`-section on sampled pairs of Sp₂(𝔬).
///
/// For `v = (a, b; c, d)` and `v' = (a', b'; c', d')`, `σ(v, v')` depends only on `(c, d)` and
/// `(a', c')`, so the sweep runs over those coordinates with integer representatives.
pub fn splitting_check(p: u64, depth: u32, theta_samples: u64, seed: u64) -> Result<SplittingReport> {
    if depth < 4 {
        return Err(Error::Invalid("splitting check needs depth >= 4".into()));
    }
    let (ka, _kb, kc, kd) = n_profile(p);
    let m = pow_u64(p, depth);
    // Hilbert symbols and products between class codes.
    let cls = square_classes(p);
    let k = cls.len();
    let reps: Vec<PAdic> = cls.iter().map(|c| c.representative(12)).collect();
    let mut hil = vec![0i8; k * k];
    let mut prod = vec![0usize; k * k];
    for i in 0..k {
        for j in 0..k {
            hil[i * k + j] = hilbert(&reps[i], &reps[j])?;
            let pr = crate::padic::square_class(&(reps[i] * reps[j]))?;
            prod[i * k + j] = cls.iter().position(|c| *c == pr).unwrap();
        }
    }
    // c = p^kc · c̃ with c̃ ranging mod p^{depth-kc}; 0 when c̃ = 0.
    let ct: Vec<u64> = (0..pow_u64(p, depth - kc)).collect();
    let units_d: Vec<u64> = (0..pow_u64(p, depth - kd)).map(|j| 1 + pow_u64(p, kd) * j).collect();
    let units_a: Vec<u64> = (0..pow_u64(p, depth - ka)).map(|j| 1 + pow_u64(p, ka) * j).collect();
    let pc = pow_u64(p, kc);
    let code_pc = class_code(pc, p);
    // Y = c̃ a' + d c̃' is bounded by 2 m²/p^kc.
    let ymax = 2 * (m / pc) * m + 1;
    if ymax > 1 << 28 {
        return Err(Error::Budget(format!("splitting table of size {ymax}")));
    }
    let table: Vec<u8> =
        (0..ymax).map(|y| if y == 0 { 255 } else { prod[code_pc * k + class_code(y, p)] as u8 }).collect();
    // ok[(cx, cv, cw)]: whether (x(vv')x(v), x(vv')x(v')) = 1
    let mut ok = vec![false; k * k * k];
    for cx in 0..k {
        for cv in 0..k {
            for cw in 0..k {
                ok[(cx * k + cv) * k + cw] = hil[prod[cx * k + cv] * k + prod[cx * k + cw]] == 1;
            }
        }
    }
    let code_a: Vec<usize> = units_a.iter().map(|&a| class_code(a, p)).collect();
    let step_a = pow_u64(p, ka);
    let mut pairs = 0u64;
    let mut violation = None;
    'outer: for &c1 in &ct {
        for &d in &units_d {
            let cd = class_code(d, p);
            // x(v) and its class
            let cv = if c1 == 0 { cd } else { prod[code_pc * k + class_code(c1, p)] };
            for &c2 in &ct {
                let cw_c = if c2 == 0 { usize::MAX } else { prod[code_pc * k + class_code(c2, p)] };
                let mut y = c1 + d * c2;
                for (ia, &ca) in code_a.iter().enumerate() {
                    // d' = 1/a' has the class of a'.
                    let cw = if c2 == 0 { ca } else { cw_c };
                    let cx = if y == 0 {
                        // c = c' = 0: x(vv') = d d'
                        prod[cd * k + ca]
                    } else {
                        table[y as usize] as usize
                    };
                    if !ok[(cx * k + cv) * k + cw] {
                        violation = Some(format!("c={} d={d} c'={} a'={}", c1 * pc, c2 * pc, units_a[ia]));
                        break 'outer;
                    }
                    y += c1 * step_a;
                }
                pairs += code_a.len() as u64;
            }
        }
    }
    let mut report = SplittingReport {
        p,
        depth,
        pairs_checked: pairs,
        first_violation: violation,
        theta_pairs_checked: 0,
        theta_violation: None,
    };
    if p != 2 && theta_samples > 0 {
        let mut rng = crate::rng(seed);
        for _ in 0..theta_samples {
            let g = random_sl2_integral(p, 12, &mut rng);
            let h = random_sl2_integral(p, 12, &mut rng);
            let lhs = theta(&g)? * theta(&h)? * cocycle(&g, &h)?;
            let rhs = theta(&(g * h))?;
            report.theta_pairs_checked += 1;
            if lhs != rhs {
                report.theta_violation = Some(format!("g={g} h={h}"));
                break;
            }
        }
    }
    Ok(report)
}

/// Random element of SL₂(𝔬): a primitive first column completed to determinant one.
pub fn random_sl2_integral<R: Rng>(p: u64, prec: u32, rng: &mut R) -> Mat2 {
    loop {
        let a_unit = rng.gen_bool(0.5);
        let zero_c = rng.gen_ratio(1, 10);
        let c = if zero_c { PAdic::zero(p) } else { random_padic(p, prec, 0, 4, rng) };
        let a = if a_unit || c.valuation() != Some(0) {
            random_padic(p, prec, 0, 0, rng)
        } else {
            random_padic(p, prec, 0, 3, rng)
        };
        if a.is_unit() {
            let b = if rng.gen_ratio(1, 8) { PAdic::zero(p) } else { random_padic(p, prec, 0, 3, rng) };
            let Ok(d) = (PAdic::one(p, prec) + b * c).checked_div(&a) else { continue };
            return Mat2::new(a, b, c, d);
        } else if c.is_unit() {
            let d = random_padic(p, prec, 0, 3, rng);
            let Ok(b) = (a * d - PAdic::one(p, prec)).checked_div(&c) else { continue };
            return Mat2::new(a, b, c, d);
        }
    }
}

/// Random element of SL₂(F) with entries of valuation in `[-r, r]`.
pub fn random_sl2<R: Rng>(p: u64, prec: u32, r: i64, rng: &mut R) -> Mat2 {
    loop {
        let a = random_padic(p, prec, -r, r, rng);
        let c = if rng.gen_ratio(1, 10) { PAdic::zero(p) } else { random_padic(p, prec, -r, r, rng) };
        if rng.gen_bool(0.5) || c.is_zero() {
            let b = random_padic(p, prec, -r, r, rng);
            let Ok(d) = (PAdic::one(p, prec) + b * c).checked_div(&a) else { continue };
            if d.is_zero() && !c.is_zero() {
                continue;
            }
            return Mat2::new(a, b, c, d);
        } else {
            let d = if rng.gen_ratio(1, 10) { PAdic::zero(p) } else { random_padic(p, prec, -r, r, rng) };
            let Ok(b) = (a * d - PAdic::one(p, prec)).checked_div(&c) else { continue };
            return Mat2::new(a, b, c, d);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pa(p: u64, x: i64) -> PAdic {
        PAdic::from_i64(p, 12, x)
    }

    #[test]
    fn kubota_x_examples() {
        let p = 5;
        assert_eq!(kubota_x(&Mat2::identity(p, 12)), pa(p, 1));
        assert_eq!(kubota_x(&Mat2::w1(p, 12)), pa(p, -1));
        assert_eq!(kubota_x(&Mat2::lower(pa(p, 10), 12)), pa(p, 10));
    }

    #[test]
    fn w1_squared() {
        for p in [2u64, 3, 5] {
            let w = Mat2::w1(p, 12);
            assert_eq!(cocycle(&w, &w).unwrap(), 1);
            let w2 = mp_mul(&MpElement::lift(w), &MpElement::lift(w)).unwrap();
            assert_eq!(w2, MpElement::lift(Mat2::identity(p, 12).neg()));
        }
    }

    #[test]
    fn decomposition_sign_of_b() {
        let mut rng = crate::rng(3);
        for p in [2u64, 3, 5] {
            for _ in 0..200 {
                let a = random_padic(p, 12, -2, 2, &mut rng);
                let c = random_padic(p, 12, -2, 2, &mut rng);
                let b = Mat2::new(a, PAdic::zero(p), c.checked_div(&a).unwrap(), a.checked_inv().unwrap());
                let prod =
                    mp_mul(&MpElement::lift(Mat2::diag(a).unwrap()), &MpElement::lift(Mat2::lower(c, 12))).unwrap();
                let s = hilbert(&a.checked_inv().unwrap(), &c).unwrap();
                assert_eq!(prod.g, b);
                assert_eq!(prod.eps, s, "⟨b,1⟩ = (a^-1,c)⟨diag⟩⟨lower⟩");
            }
        }
    }

    #[test]
    fn minus_identity_w1_sign() {
        for p in [2u64, 3, 5, 7] {
            let mi = Mat2::identity(p, 12).neg();
            let w = Mat2::w1(p, 12);
            let s = cocycle(&mi, &w).unwrap();
            assert_eq!(s, hilbert(&pa(p, -1), &pa(p, -1)).unwrap());
        }
    }

    #[test]
    fn splitting_small() {
        let r = splitting_check(2, 5, 0, 1).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = splitting_check(3, 4, 200, 1).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
