//! Verification suites, one per acceptance criterion.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::characters::{quadratic_gauss_sum, weil_factor, weil_index_base, AdditiveCharacter, TameCharacter};
use crate::error::{Error, Result};
use crate::langlands::{pi1_uniformizer, xi_principal_units, ParamRecord, RamifiedExt};
use crate::metaplectic::{cocycle, random_sl2, random_sl2_integral, splitting_check, Mat2, MpElement};
use crate::padic::{
    hilbert, hilbert_oracle, is_prime, least_nonresidue, max_precision, random_padic, square_classes, PAdic,
};
use crate::scalars::{RatFunc, Scalar};
use crate::shimura::{
    gamma_assemble, intertwine_closed, intertwine_shell_sum, pole_scan, psi_bruteforce, psi_closed, q2_expected,
    trivial_tau_expected, SSParams, SectionData,
};
use crate::tate::{epsilon, tate_gamma};
use crate::weilrep::{SchwartzFn, WeilRep};

pub const DEFAULT_SEED: u64 = 20240611;

/// Suite identifiers and names, in criterion order.
pub const SUITES: [(u32, &str); 13] = [
    (1, "hilbert"),
    (2, "gauss"),
    (3, "weil-factor"),
    (4, "metaplectic"),
    (5, "weil-rep"),
    (6, "bruteforce"),
    (7, "shell-sum"),
    (8, "pole-scan"),
    (9, "trivial-tau"),
    (10, "q2"),
    (11, "tate"),
    (12, "twisting"),
    (13, "parameter"),
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    pub seconds: f64,
    pub detail: String,
    pub first_counterexample: Option<String>,
}

#[derive(Default)]
struct Tally {
    checks: u64,
    first: Option<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, ctx: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.first.is_none() {
            self.first = Some(ctx());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn pa(p: u64, x: i64) -> PAdic {
    PAdic::from_i64(p, max_precision(p), x)
}

/// Runs a suite by name or numeric id.
pub fn run_suite(key: &str, seed: u64) -> Result<SuiteResult> {
    let (id, name) = SUITES
        .iter()
        .copied()
        .find(|(i, n)| *n == key || i.to_string() == key)
        .ok_or_else(|| Error::Invalid(format!("unknown suite {key}")))?;
    let start = Instant::now();
    let mut t = Tally::default();
    let outcome = match id {
        1 => hilbert_suite(&mut t),
        2 => gauss_suite(&mut t),
        3 => weil_factor_suite(&mut t, seed),
        4 => metaplectic_suite(&mut t, seed),
        5 => weil_rep_suite(&mut t, seed),
        6 => bruteforce_suite(&mut t),
        7 => shell_sum_suite(&mut t),
        8 => pole_scan_suite(&mut t),
        9 => trivial_tau_suite(&mut t),
        10 => q2_suite(&mut t),
        11 => tate_suite(&mut t),
        12 => twisting_suite(&mut t),
        _ => parameter_suite(&mut t, seed),
    };
    let seconds = start.elapsed().as_secs_f64();
    let mut detail = t.notes.join("; ");
    let mut passed = t.first.is_none() && t.checks > 0;
    if let Err(e) = outcome {
        passed = false;
        detail = format!("error: {e}; {detail}");
    }
    let limit = match id {
        1 => Some(30.0),
        2 | 8 => Some(60.0),
        _ => None,
    };
    if let Some(l) = limit {
        if seconds > l {
            passed = false;
            detail = format!("{detail}; exceeded {l} s");
        }
    }
    Ok(SuiteResult {
        id,
        name: name.to_string(),
        passed,
        checks: t.checks,
        seconds,
        detail,
        first_counterexample: t.first,
    })
}

pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    SUITES.iter().map(|(i, _)| run_suite(&i.to_string(), seed).expect("known suite")).collect()
}

fn hilbert_suite(t: &mut Tally) -> Result<()> {
    for p in [2u64, 3, 5, 7, 13] {
        let mut elems = Vec::new();
        for c in square_classes(p) {
            for k in -2..=2 {
                elems.push(c.representative(max_precision(p)).shift(k));
            }
        }
        for a in &elems {
            for b in &elems {
                let (h, o) = (hilbert(a, b)?, hilbert_oracle(a, b)?);
                t.check(h == o, || format!("p={p} a={a} b={b}: closed {h}, oracle {o}"));
            }
        }
    }
    Ok(())
}

fn gauss_suite(t: &mut Tally) -> Result<()> {
    for p in (3u64..100).filter(|&p| is_prime(p)) {
        let psi = AdditiveCharacter::standard(p);
        let g = quadratic_gauss_sum(&psi.inverse())?;
        let sign = hilbert(&pa(p, -1), &PAdic::uniformizer(p, max_precision(p)))? as i64;
        t.check(&g * &g == Scalar::from_int(sign * p as i64), || format!("p={p}: G² = {}", &g * &g));
    }
    t.note("odd p < 100".into());
    Ok(())
}

fn weil_factor_suite(t: &mut Tally, seed: u64) -> Result<()> {
    let mut rng = crate::rng(seed);
    for p in [2u64, 3, 5, 7] {
        let psi = AdditiveCharacter::standard(p);
        let prec = max_precision(p);
        let m1 = pa(p, -1);
        for _ in 0..500 {
            let a = random_padic(p, prec, -3, 3, &mut rng);
            let b = random_padic(p, prec, -3, 3, &mut rng);
            let (ga, gb) = (weil_factor(&psi, &a)?, weil_factor(&psi, &b)?);
            let sq = Scalar::from_int(hilbert(&m1, &a)? as i64);
            t.check(&ga * &ga == sq, || format!("p={p} a={a}: γ² ≠ (-1, a)"));
            let gab = weil_factor(&psi, &(a * b))?;
            let rhs = (&ga * &gb).scale_int(hilbert(&a, &b)? as i64);
            t.check(gab == rhs, || format!("p={p} a={a} b={b}: γ(ab) ≠ γ(a)γ(b)(a,b)"));
        }
    }
    let half = PAdic::from_ratio(2, max_precision(2), 1, 2)?;
    for sign in [1, -1] {
        let psi = AdditiveCharacter::with_sign(2, sign);
        t.check(weil_factor(&psi, &pa(2, 2))?.is_one(), || format!("sign={sign}: γ_ψ(2) ≠ 1"));
        let pm = psi.eval(&(-half))?;
        t.check(weil_factor(&psi, &pa(2, -1))? == pm, || format!("sign={sign}: γ_ψ(-1) ≠ ψ(-1/2)"));
        let chain = &(&pm * &weil_index_base(&psi)?) * &(&Scalar::one() + &psi.eval(&half)?);
        t.check(chain == Scalar::sqrt_prime(2), || format!("sign={sign}: ψ(-1/2)γ(ψ)(1+ψ(1/2)) = {chain}"));
    }
    Ok(())
}

fn metaplectic_suite(t: &mut Tally, seed: u64) -> Result<()> {
    let mut rng = crate::rng(seed);
    for p in [2u64, 3, 5, 7] {
        let prec = max_precision(p);
        for _ in 0..10_000 {
            let g = random_sl2(p, prec, 3, &mut rng);
            let h = random_sl2(p, prec, 3, &mut rng);
            let k = random_sl2(p, prec, 3, &mut rng);
            let lhs = cocycle(&g, &h)? * cocycle(&(g * h), &k)?;
            let rhs = cocycle(&g, &(h * k))? * cocycle(&h, &k)?;
            t.check(lhs == rhs, || format!("p={p} g={g} h={h} k={k}"));
        }
    }
    for p in [2u64, 3, 5] {
        let samples = if p == 2 { 0 } else { 1000 };
        let r = splitting_check(p, 5, samples, seed)?;
        t.check(r.passed(), || format!("p={p}: {:?} {:?}", r.first_violation, r.theta_violation));
        t.note(format!("p={p}: {} pairs mod 𝔭^5, {} ϑ pairs", r.pairs_checked, r.theta_pairs_checked));
    }
    Ok(())
}

/// Integral element with `c = 0` or `v(c) ≤ 2`, keeping the grids of the Weil action small.
fn small_sl2<R: Rng>(p: u64, rng: &mut R) -> Mat2 {
    loop {
        let g = random_sl2_integral(p, 12, rng);
        if g.c.is_zero() || g.c.val() <= 2 {
            return g;
        }
    }
}

fn weil_rep_suite(t: &mut Tally, seed: u64) -> Result<()> {
    let mut rng = crate::rng(seed);
    for p in [2u64, 3] {
        let w = WeilRep::new(AdditiveCharacter::standard(p))?;
        let f = SchwartzFn::random(p, 1, 1, &mut rng)?;
        let mut done = 0;
        while done < 1000 {
            let (g, h) = (small_sl2(p, &mut rng), small_sl2(p, &mut rng));
            let gh = g * h;
            if !gh.c.is_zero() && gh.c.val() > 2 {
                continue;
            }
            let s = cocycle(&g, &h)?;
            let lhs = w.act(&MpElement::lift(g), &w.act(&MpElement::lift(h), &f)?)?;
            let rhs = w.act(&MpElement::new(gh, s), &f)?;
            t.check(lhs.same_as(&rhs)?, || format!("p={p} g={g} h={h}"));
            done += 1;
        }
    }
    for p in [2u64, 3, 5] {
        let psi = AdditiveCharacter::standard(p);
        for (m, n) in [(1, 1), (0, 2), (2, 0), (-1, 2), (2, 1)] {
            let f = SchwartzFn::random(p, m, n, &mut rng)?;
            let ff = f.fourier(&psi)?.fourier(&psi)?;
            t.check(ff.same_as(&f.reflect())?, || format!("Fourier inversion p={p} grid ({m},{n})"));
        }
    }
    for p in [2u64, 3, 5] {
        let w = WeilRep::new(AdditiveCharacter::standard(p))?;
        let f = SchwartzFn::random(p, 1, 1, &mut rng)?;
        let pi = p as i64;
        for (au, cv, cu) in [(1i64, 1i64, 1i64), (1 + pi, 2, 2), (2 * pi + 1, 1, -1), (1, 0, 1), (-1, 2, 1), (3, 1, 2)]
        {
            if au % pi == 0 {
                continue;
            }
            let a = pa(p, au);
            let c = pa(p, cu).shift(cv);
            let g = Mat2::new(a, PAdic::zero(p), c.checked_div(&a)?, a.checked_inv()?);
            let direct = w.act(&MpElement::lift(g), &f)?;
            let closed = w.lower_closed_form(&a, &c, &f)?;
            t.check(direct.same_as(&closed)?, || format!("lower closed form p={p} a={a} c={c}"));
        }
    }
    t.note("pairs drawn from SL₂(𝔬) with v(c) ≤ 2".into());
    Ok(())
}

fn bruteforce_suite(t: &mut Tally) -> Result<()> {
    for (p, l, depth) in [(3u64, 2u32, 4u32), (5, 2, 4), (2, 2, 5)] {
        let psi = AdditiveCharacter::standard(p);
        let params = SSParams::new(p, l, 1, 1)?;
        let taus = if p == 2 {
            vec![TameCharacter::trivial(2), TameCharacter::unramified(2, Scalar::root_of_unity(3, 1))]
        } else {
            let w = params.uniformizer;
            vec![TameCharacter::trivial(p), TameCharacter::new(p, w, Scalar::from_int(-1), ((p - 1) / 2) as i64)?]
        };
        for tau in taus {
            let data = SectionData::new(tau.clone(), psi)?;
            for intertwined in [false, true] {
                let start = Instant::now();
                let b = psi_bruteforce(&params, &data, depth, intertwined)?;
                let secs = start.elapsed().as_secs_f64();
                let c = psi_closed(&params, &data, intertwined)?;
                t.check(b == c && secs < 300.0, || {
                    format!("p={p} l={l} depth={depth} τ={tau:?} intertwined={intertwined}: {b} vs {c} ({secs:.1} s)")
                });
            }
        }
        t.note(format!("(p,l,depth)=({p},{l},{depth})"));
    }
    Ok(())
}

fn odd_taus(p: u64) -> Result<Vec<TameCharacter>> {
    let w = PAdic::uniformizer(p, max_precision(p));
    let mut out = Vec::new();
    for e in 0..p - 1 {
        for v in [Scalar::one(), Scalar::from_int(-1), Scalar::root_of_unity(3, 1)] {
            out.push(TameCharacter::new(p, w, v, e as i64)?);
        }
    }
    Ok(out)
}

fn shell_sum_suite(t: &mut Tally) -> Result<()> {
    for p in [3u64, 5, 7] {
        let psi = AdditiveCharacter::standard(p);
        let pi = p as i64;
        for tau in odd_taus(p)? {
            let data = SectionData::new(tau.clone(), psi)?;
            for a in [1, 1 + pi, 1 - 2 * pi] {
                let a = pa(p, a);
                let mut cs: Vec<PAdic> = (1..pi).map(|c0| pa(p, c0 * pi + pi * pi)).collect();
                cs.extend([PAdic::zero(p), pa(p, pi * pi), pa(p, 2 * pi * pi * pi)]);
                for c in cs {
                    let s = intertwine_shell_sum(&data, &c, &a)?;
                    let k = intertwine_closed(&data, &c, &a)?;
                    t.check(s == k, || format!("p={p} τ={tau:?} a={a} c={c}: {s} vs {k}"));
                }
            }
        }
    }
    for sign in [1, -1] {
        let psi = AdditiveCharacter::with_sign(2, sign);
        for v in [Scalar::one(), Scalar::from_int(-1), Scalar::root_of_unity(3, 1), Scalar::from_int(3)] {
            let data = SectionData::new(TameCharacter::unramified(2, v), psi)?;
            for a in [1i64, 3, 5, 7, 11] {
                let a = pa(2, a);
                let mut cs = vec![PAdic::zero(2)];
                for c0 in 0..2 {
                    for c1 in 0..2 {
                        for rest in [0i64, 8, 24] {
                            let c = 2 * c0 + 4 * c1 + rest;
                            if c != 0 {
                                cs.push(pa(2, c));
                            }
                        }
                    }
                }
                for c in cs {
                    let s = intertwine_shell_sum(&data, &c, &a)?;
                    let k = intertwine_closed(&data, &c, &a)?;
                    t.check(s == k, || format!("p=2 sign={sign} a={a} c={c}: {s} vs {k}"));
                }
            }
        }
    }
    Ok(())
}

fn pole_scan_suite(t: &mut Tally) -> Result<()> {
    for p in [3u64, 5, 7] {
        let psi = AdditiveCharacter::standard(p);
        for alpha in [1, least_nonresidue(p)] {
            let mut poles = Vec::new();
            for om in [1, -1] {
                let scan = pole_scan(&SSParams::new(p, 2, alpha, om)?, &psi)?;
                t.check(scan.passed(), || format!("p={p} α={alpha} ω={om}: {scan:?}"));
                poles.push(scan.pole().cloned());
            }
            t.check(poles[0] == poles[1], || format!("p={p} α={alpha}: pole depends on ω"));
            if let Some(Some(r)) = poles.first() {
                t.note(format!(
                    "p={p} α={alpha}: τ(ϖ)={}, residue exponent {}",
                    r.tau_uniformizer_sign, r.tau_residue_exponent
                ));
            }
        }
    }
    Ok(())
}

fn trivial_tau_suite(t: &mut Tally) -> Result<()> {
    for p in [3u64, 5, 7] {
        let psi = AdditiveCharacter::standard(p);
        for alpha in [1, least_nonresidue(p)] {
            for om in [1, -1] {
                for l in [2u32, 3] {
                    let params = SSParams::new(p, l, alpha, om)?;
                    let g = gamma_assemble(&params, &TameCharacter::trivial(p), &psi)?;
                    let e = trivial_tau_expected(&params, &psi)?;
                    t.check(g == e, || format!("p={p} l={l} α={alpha} ω={om}: {g} vs {e}"));
                }
            }
        }
        // a unit-twisted ψ gives the same formula with the twisted data
        let psi2 = psi.twisted(&pa(p, 2))?;
        let params = SSParams::new(p, 2, 1, 1)?;
        let g = gamma_assemble(&params, &TameCharacter::trivial(p), &psi2)?;
        t.check(g == trivial_tau_expected(&params, &psi2)?, || format!("p={p}: twisted ψ"));
    }
    Ok(())
}

fn q2_suite(t: &mut Tally) -> Result<()> {
    let values = [
        Scalar::one(),
        Scalar::from_int(-1),
        Scalar::root_of_unity(3, 1),
        Scalar::root_of_unity(8, 3),
        Scalar::from_int(3),
        Scalar::from_ratio(2, 5),
    ];
    for sign in [1, -1] {
        let psi = AdditiveCharacter::with_sign(2, sign);
        for v in &values {
            let tau = TameCharacter::unramified(2, v.clone());
            for l in [2u32, 3] {
                let g = gamma_assemble(&SSParams::new(2, l, 1, 1)?, &tau, &psi)?;
                let e = q2_expected(&tau)?;
                t.check(g == e, || format!("sign={sign} τ(2)={v} l={l}: {g} vs {e}"));
            }
            // ε(2s-1,τ²,ψ)·(1-τ²(2)2^{1-2s})/(1-τ^{-2}(2)2^{2s-2})·(-1+τ²(2)2^{2-2s})/(1-τ²(2)2^{1-2s}) = 2^{1/2}
            let t2 = v.pow(2)?;
            let eps = epsilon(&tau.square()?, &psi)?.substitute(&Scalar::sqrt_prime(2), 2, -2)?;
            let a = RatFunc::laurent(&[(0, Scalar::one()), (2, -&t2.scale_int(2))]);
            let b = RatFunc::laurent(&[
                (0, Scalar::one()),
                (-2, -&t2.inv()?.scale(&num_rational::BigRational::new(1.into(), 4.into()))),
            ]);
            let c = RatFunc::laurent(&[(0, Scalar::from_int(-1)), (2, t2.scale_int(4))]);
            let chain = eps.mul(&a).div(&b)?.mul(&c).div(&a)?;
            t.check(chain == RatFunc::constant(Scalar::sqrt_prime(2)), || {
                format!("sign={sign} τ(2)={v}: chain {chain}")
            });
        }
    }
    t.note("τ(2) includes the non-roots of unity 3 and 2/5".into());
    Ok(())
}

fn tate_suite(t: &mut Tally) -> Result<()> {
    for p in [2u64, 3, 5] {
        let w = PAdic::uniformizer(p, max_precision(p));
        let psis = if p == 2 {
            vec![AdditiveCharacter::with_sign(2, 1), AdditiveCharacter::with_sign(2, -1)]
        } else {
            vec![AdditiveCharacter::standard(p), AdditiveCharacter::standard(p).twisted(&pa(p, 2))?]
        };
        for psi in psis {
            for e in 0..(p - 1).max(1) {
                for v in [Scalar::one(), Scalar::from_int(-1), Scalar::root_of_unity(3, 1), Scalar::from_int(2)] {
                    let tau = TameCharacter::new(p, w, v, e as i64)?;
                    let g = tate_gamma(&tau, &psi)?;
                    let h = tate_gamma(&tau.inverse()?, &psi.inverse())?.substitute(&Scalar::sqrt_prime(p), -1, 2)?;
                    let prod = g.mul(&h);
                    t.check(prod == RatFunc::one(), || format!("p={p} τ={tau:?}: {prod}"));
                }
            }
        }
    }
    Ok(())
}

fn twisting_suite(t: &mut Tally) -> Result<()> {
    for p in [3u64, 5] {
        let psi = AdditiveCharacter::standard(p);
        let pi = p as i64;
        for r in [2i64, 1 + pi, 2 + 3 * pi] {
            let a = pa(p, r * r);
            let psi_a = psi.twisted(&a)?;
            for tau in odd_taus(p)? {
                for l in [2u32, 3] {
                    let params = SSParams::new(p, l, 1, 1)?;
                    let lhs = gamma_assemble(&params, &tau, &psi_a)?;
                    let k = tau.eval(&a)?.pow(2 * l as i64 + 1)?;
                    let rhs = gamma_assemble(&params, &tau, &psi)?.scale(&k);
                    t.check(lhs == rhs, || format!("p={p} a={a} l={l} τ={tau:?}: {lhs} vs {rhs}"));
                }
            }
        }
    }
    Ok(())
}

fn parameter_suite(t: &mut Tally, seed: u64) -> Result<()> {
    let mut rng = crate::rng(seed);
    for p in [3u64, 5, 7] {
        let w = PAdic::uniformizer(p, max_precision(p));
        let four = pa(p, 4);
        for l in [2u32, 3, 4] {
            for alpha in [1, least_nonresidue(p)] {
                let pi1 = pi1_uniformizer(l, alpha, &w)?;
                let sign = if l % 2 == 1 { 1 } else { -1 };
                let expect = w.checked_div(&pa(p, alpha as i64))?;
                let got = pi1 * four * pa(p, sign);
                t.check(got == expect && pi1.valuation() == Some(1), || {
                    format!("p={p} l={l} α={alpha}: ϖ_(α,l) = {pi1}")
                });
            }
        }
        let psi = AdditiveCharacter::standard(p);
        for l in [2u32, 3] {
            let ext = RamifiedExt::new(l, pi1_uniformizer(l, 1, &w)?, 12)?;
            for _ in 0..50 {
                let x = ext.random_principal_unit(1, &mut rng);
                let y = ext.random_principal_unit(1, &mut rng);
                let z = ext.random_principal_unit(2, &mut rng);
                let fx = xi_principal_units(&ext, &x, &psi)?;
                let fy = xi_principal_units(&ext, &y, &psi)?;
                let fxy = xi_principal_units(&ext, &ext.mul(&x, &y), &psi)?;
                t.check(fxy == &fx * &fy, || format!("p={p} l={l}: ξ not multiplicative"));
                let fxz = xi_principal_units(&ext, &ext.mul(&x, &z), &psi)?;
                t.check(fxz == fx, || format!("p={p} l={l}: ξ not trivial on 1+𝔭_E²"));
            }
        }
        for alpha in [1, least_nonresidue(p)] {
            for l in [2u32, 3] {
                let a = ParamRecord::build(&SSParams::new(p, l, alpha, 1)?, &psi)?;
                let b = ParamRecord::build(&SSParams::new(p, l, alpha, -1)?, &psi)?;
                let za = a.xi_on_zeta.monomial_reading.to_scalar()?;
                let zb = b.xi_on_zeta.monomial_reading.to_scalar()?;
                t.check(za.abs2().is_one(), || format!("p={p} l={l} α={alpha}: |ξ(ζ)| ≠ 1"));
                t.check(zb == -za.clone(), || format!("p={p} l={l} α={alpha}: ξ(ζ) does not flip with ω"));
                let json = serde_json::to_string(&a).map_err(|e| Error::Invalid(e.to_string()))?;
                let back: ParamRecord = serde_json::from_str(&json).map_err(|e| Error::Invalid(e.to_string()))?;
                t.check(back == a, || format!("p={p} l={l} α={alpha}: record does not round-trip"));
            }
        }
    }
    Ok(())
}
