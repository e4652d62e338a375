//! Tate local factors of tame characters, the twisting rule and the metaplectic local coefficient.

use crate::characters::{sqrt_q_pow, weil_factor, weil_index_base, AdditiveCharacter, TameCharacter};
use crate::error::Result;
use crate::padic::{PAdic, DEFAULT_PRECISION};
use crate::scalars::{RatFunc, RootSum, Scalar};

fn sqrt_q(p: u64) -> Scalar {
    Scalar::sqrt_prime(p)
}

/// `L(s, τ)`.
pub fn l_factor(tau: &TameCharacter) -> RatFunc {
    if tau.is_unramified() {
        RatFunc::geometric(tau.value_on_uniformizer().clone(), 1)
    } else {
        RatFunc::one()
    }
}

/// `ε(s, τ, ψ)` for level-one ψ.
///
/// Unramified: `τ(ϖ)^{-1} q^{s-1/2}`. Ramified tame: `q^{-1/2} Σ_{u∈κ^×} τ^{-1}(u) ψ(u)`.
pub fn epsilon(tau: &TameCharacter, psi: &AdditiveCharacter) -> Result<RatFunc> {
    let p = tau.p();
    if tau.is_unramified() {
        let c = &tau.value_on_uniformizer().inv()? * &sqrt_q_pow(p, -1);
        return Ok(RatFunc::monomial(c, -1));
    }
    let inv = tau.inverse()?;
    let m = p - 1;
    let mut acc = RootSum::new(num_integer::lcm(p, m));
    let n = acc.order();
    for u in 1..p {
        let x = PAdic::from_i64(p, DEFAULT_PRECISION, u as i64);
        let ep = psi.eval_exp(&x)?.map_or(0, |(_, e)| e);
        let j = inv.residue_exponent() * crate::characters::dlog(p, u) % m;
        acc.add_exp(ep * (n / p) + j * (n / m), 1);
    }
    Ok(RatFunc::constant(&acc.to_scalar() * &sqrt_q_pow(p, -1)))
}

/// `γ(s, τ, ψ) = ε(s, τ, ψ) L(1-s, τ^{-1}) / L(s, τ)`.
pub fn tate_gamma(tau: &TameCharacter, psi: &AdditiveCharacter) -> Result<RatFunc> {
    let p = tau.p();
    let eps = epsilon(tau, psi)?;
    let l_dual = l_factor(&tau.inverse()?).substitute(&sqrt_q(p), -1, 2)?;
    eps.mul(&l_dual).div(&l_factor(tau))
}

/// `γ(s, σ, ψ_a) = σ(a) |a|^{s-1/2} γ(s, σ, ψ)`.
pub fn twist_gamma(f: &RatFunc, sigma: &TameCharacter, a: &PAdic) -> Result<RatFunc> {
    let v = a.abs_exponent()?;
    let c = &sigma.eval(a)? * &sqrt_q_pow(sigma.p(), v);
    Ok(f.mul(&RatFunc::monomial(c, v)))
}

/// `γ(2s-1, τ², ψ₂)` as a function of `X = q^{-s}`.
pub fn gamma_2s_minus_1_psi2(tau: &TameCharacter, psi: &AdditiveCharacter) -> Result<RatFunc> {
    let p = tau.p();
    let t2 = tau.square()?;
    let g = tate_gamma(&t2, psi)?;
    let two = PAdic::from_i64(p, DEFAULT_PRECISION, 2);
    let g2 = twist_gamma(&g, &t2, &two)?;
    g2.substitute(&sqrt_q(p), 2, -2)
}

/// `C(s, τ, ψ) = γ_ψ(-1) γ(ψ) γ(2s-1, τ², ψ₂) / γ(s, τ, ψ)`.
pub fn local_coefficient(tau: &TameCharacter, psi: &AdditiveCharacter) -> Result<RatFunc> {
    let p = tau.p();
    let m1 = PAdic::from_i64(p, DEFAULT_PRECISION, -1);
    let c = &weil_factor(psi, &m1)? * &weil_index_base(psi)?;
    let g2 = gamma_2s_minus_1_psi2(tau, psi)?;
    g2.scale(&c).div(&tate_gamma(tau, psi)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taus(p: u64) -> Vec<TameCharacter> {
        let w = PAdic::uniformizer(p, 12);
        let mut out = Vec::new();
        for e in 0..(p - 1).max(1) {
            for v in [Scalar::one(), Scalar::from_int(-1), Scalar::root_of_unity(3, 1), Scalar::from_int(2)] {
                out.push(TameCharacter::new(p, w, v, e as i64).unwrap());
            }
        }
        out
    }

    #[test]
    fn functional_equation() {
        for p in [2u64, 3, 5] {
            let psi = AdditiveCharacter::standard(p);
            for tau in taus(p) {
                let g = tate_gamma(&tau, &psi).unwrap();
                let h = tate_gamma(&tau.inverse().unwrap(), &psi.inverse()).unwrap();
                let h1 = h.substitute(&Scalar::sqrt_prime(p), -1, 2).unwrap();
                assert!(g.mul(&h1).as_constant().is_some_and(|c| c.is_one()), "p={p} tau={tau:?}");
            }
        }
    }

    #[test]
    fn trivial_character_anchor() {
        // ε(2s-1, 1, ψ) = q^{2s-3/2}
        let p = 5;
        let e = epsilon(&TameCharacter::trivial(p), &AdditiveCharacter::standard(p)).unwrap();
        let e2 = e.substitute(&Scalar::sqrt_prime(p), 2, -2).unwrap();
        assert_eq!(e2, RatFunc::monomial(sqrt_q_pow(p, -3), -2));
    }

    #[test]
    fn pole_structure_of_local_coefficient() {
        let p = 3;
        let psi = AdditiveCharacter::standard(p);
        let x0 = Scalar::from_ratio(1, 3);
        for tau in TameCharacter::quadratic_characters(p, PAdic::uniformizer(p, 12)).unwrap() {
            let g = gamma_2s_minus_1_psi2(&tau, &psi).unwrap();
            assert_eq!(g.order_at(&x0).unwrap(), -1);
        }
        let tau = TameCharacter::unramified(p, Scalar::root_of_unity(3, 1));
        let c = local_coefficient(&tau, &psi).unwrap();
        assert_eq!(c.order_at(&x0).unwrap(), 0);
    }
}
