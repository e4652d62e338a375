use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use spgamma::characters::{AdditiveCharacter, TameCharacter, TameSpec};
use spgamma::langlands::ParamRecord;
use spgamma::padic::{is_prime, PAdic, DEFAULT_PRECISION};
use spgamma::scalars::{ExactRatFunc, RatFunc};
use spgamma::shimura::{
    gamma_assemble, pole_scan, psi_bruteforce, psi_closed, q2_expected, trivial_tau_expected, SSParams, SectionData,
};
use spgamma::suites::{run_suite, SuiteResult, DEFAULT_SEED, SUITES};

const SCHEMA_VERSION: u32 = 1;
const OUT_DIR_VAR: &str = "SPGAMMA_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "spgamma", version, about = "Rankin–Selberg gamma factors of simple supercuspidals of Sp_2l")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include wall-clock timings (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Reading {
    Monomial,
    Coefficient,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// γ(s, π × τ, ψ) as a rational function of X = q^{-s}.
    Gamma(GammaArgs),
    /// Orders at s = 1 over the four tame quadratic τ.
    PoleScan(RepArgs),
    /// Langlands-parameter data.
    Parameter {
        #[command(flatten)]
        rep: RepArgs,
        /// Which reading of ξ(ζ) the text report shows.
        #[arg(long, value_enum, default_value_t = Reading::Monomial)]
        reading: Reading,
    },
    /// γ over ℚ₂ for an unramified τ, against τ(2) 2^{1/2-s}.
    Q2 {
        #[arg(long, default_value_t = 2)]
        l: u32,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        omega: i64,
        /// ψ(x) = e^{±πix}.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        psi_sign: i64,
        #[command(flatten)]
        tau: TauArgs,
    },
    /// Run an acceptance suite by name or number, or `all`.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Brute-force integrals against closed forms.
    Oracle {
        #[command(flatten)]
        gamma: GammaArgs,
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
struct RepArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    l: u32,
    /// 1 or the least quadratic non-residue mod p.
    #[arg(long, default_value_t = 1)]
    alpha: u64,
    /// ω(-I).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    omega: i64,
    /// ϖ = p·u.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    uniformizer_unit: i64,
    /// ψ(x) = ψ₀(t x) for the standard level-one ψ₀.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    psi_twist: i64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct TauArgs {
    /// τ(ϖ) = ζ_m^k: the order m.
    #[arg(long, default_value_t = 1)]
    tau_root_order: u64,
    /// τ(ϖ) = ζ_m^k: the exponent k.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    tau_root_exp: i64,
    /// τ on units is η^e for the generator-based character η of κ^×.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    tau_residue_exp: i64,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GammaArgs {
    #[command(flatten)]
    rep: RepArgs,
    #[command(flatten)]
    tau: TauArgs,
}

impl RepArgs {
    fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            bail!("p = {} is not prime", self.p);
        }
        if self.p == 2 && self.alpha != 1 {
            bail!("p = 2 needs α = 1");
        }
        for (name, u) in [("uniformizer unit", self.uniformizer_unit), ("ψ twist", self.psi_twist)] {
            if u.rem_euclid(self.p as i64) == 0 {
                bail!("{name} {u} is not a unit mod {}", self.p);
            }
        }
        Ok(())
    }

    fn uniformizer(&self) -> PAdic {
        PAdic::from_i64(self.p, DEFAULT_PRECISION, self.p as i64 * self.uniformizer_unit)
    }

    fn params(&self) -> Result<SSParams> {
        self.validate()?;
        let mut params = SSParams::new(self.p, self.l, self.alpha, self.omega)?;
        params.uniformizer = self.uniformizer();
        Ok(params)
    }

    fn psi(&self) -> Result<AdditiveCharacter> {
        let t = PAdic::from_i64(self.p, DEFAULT_PRECISION, self.psi_twist);
        Ok(AdditiveCharacter::standard(self.p).twisted(&t)?)
    }
}

impl TauArgs {
    fn spec(&self) -> TameSpec {
        TameSpec {
            root_order: self.tau_root_order,
            root_exponent: self.tau_root_exp,
            residue_exponent: self.tau_residue_exp,
        }
    }

    fn build(&self, p: u64, uniformizer: PAdic) -> Result<TameCharacter> {
        if self.tau_root_order == 0 {
            bail!("τ root order must be positive");
        }
        Ok(self.spec().build(p, uniformizer)?)
    }
}

/// One command's outcome, in the shape written as JSON.
#[derive(Serialize)]
struct Report {
    schema_version: u32,
    command: &'static str,
    inputs: Value,
    exact: Value,
    float: Value,
    tokens: Vec<String>,
    timing: Option<Value>,
    suite_results: Option<Vec<SuiteResult>>,
    matched: Option<bool>,
    first_counterexample: Option<String>,
    #[serde(skip)]
    text: String,
}

impl Report {
    fn new(command: &'static str, inputs: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            inputs,
            exact: Value::Null,
            float: Value::Null,
            tokens: Vec::new(),
            timing: None,
            suite_results: None,
            matched: None,
            first_counterexample: None,
            text: String::new(),
        }
    }

    fn ok(&self) -> bool {
        self.matched != Some(false)
    }
}

fn float_of(f: &RatFunc) -> Value {
    let e = ExactRatFunc::from(f);
    json!({
        "shift": e.shift,
        "num": e.num.iter().map(|c| c.float).collect::<Vec<_>>(),
        "den": e.den.iter().map(|c| c.float).collect::<Vec<_>>(),
    })
}

fn render(f: &RatFunc) -> String {
    match f.as_monomial() {
        Some((c, k)) => {
            let z = c.embed_float();
            format!("{f}   ≈ ({:.10} {:+.10}i)·X^{k}", z.re + 0.0, z.im + 0.0)
        }
        None => f.to_string(),
    }
}

fn gamma_cmd(args: &GammaArgs, timing: bool) -> Result<Report> {
    let params = args.rep.params()?;
    let psi = args.rep.psi()?;
    let tau = args.tau.build(params.p, params.uniformizer)?;
    let mut report = Report::new("gamma", json!({ "rep": args.rep, "tau": args.tau }));
    let start = Instant::now();
    let g = gamma_assemble(&params, &tau, &psi)?;
    let secs = start.elapsed().as_secs_f64();
    report.exact = json!({ "gamma": ExactRatFunc::from(&g) });
    report.float = json!({ "gamma": float_of(&g) });
    report.text = format!("γ(s, π × τ, ψ) = {}\n  (X = {}^(-s))", render(&g), params.p);
    let expected = if params.p == 2 {
        Some(("τ(2) 2^{1/2-s}", q2_expected(&tau)?))
    } else if tau.is_unramified() && tau.value_on_uniformizer().is_one() {
        Some(("trivial-τ closed form", trivial_tau_expected(&params, &psi)?))
    } else {
        None
    };
    if let Some((name, e)) = expected {
        let m = e == g;
        report.matched = Some(m);
        report.exact["expected"] = json!(ExactRatFunc::from(&e));
        report.text += &format!("\n{name}: {}", if m { "match" } else { "MISMATCH" });
        if !m {
            report.first_counterexample = Some(format!("gamma {g} vs {name} {e}"));
        }
    }
    if timing {
        report.timing = Some(json!({ "gamma_seconds": secs }));
    }
    Ok(report)
}

fn pole_scan_cmd(rep: &RepArgs, timing: bool) -> Result<Report> {
    if rep.p == 2 {
        bail!("pole-scan needs odd p");
    }
    let params = rep.params()?;
    let start = Instant::now();
    let scan = pole_scan(&params, &rep.psi()?)?;
    let mut report = Report::new("pole-scan", json!({ "rep": rep }));
    report.exact = serde_json::to_value(&scan)?;
    report.matched = Some(scan.passed());
    let mut text = String::from("τ(ϖ)  e   order  unit-cond  ϖ-cond\n");
    for r in &scan.rows {
        text += &format!(
            "{:>4}  {:<3} {:>5}  {:<9}  {}\n",
            r.tau_uniformizer_sign, r.tau_residue_exponent, r.order_at_one, r.unit_condition, r.uniformizer_condition
        );
    }
    text +=
        if scan.passed() { "exactly one simple pole, at the predicted τ" } else { "MISMATCH with the predicted pole" };
    report.text = text;
    if !scan.passed() {
        report.first_counterexample = Some(format!("{:?}", scan.rows));
    }
    if timing {
        report.timing = Some(json!({ "seconds": start.elapsed().as_secs_f64() }));
    }
    Ok(report)
}

fn parameter_cmd(rep: &RepArgs, reading: Reading) -> Result<Report> {
    if rep.p == 2 {
        bail!("parameter needs odd p");
    }
    let params = rep.params()?;
    let record = ParamRecord::build(&params, &rep.psi()?)?;
    let mut report = Report::new("parameter", json!({ "rep": rep, "reading": reading }));
    let zeta = match reading {
        Reading::Monomial => &record.xi_on_zeta.monomial_reading,
        Reading::Coefficient => &record.xi_on_zeta.coefficient_reading,
    };
    report.float = json!({
        "xi_on_zeta": zeta.float,
        "tau_alpha_uniformizer_value": record.tau_alpha_uniformizer_value.float,
    });
    report.tokens = record.xi_on_zeta.tokens.clone();
    report.text = format!(
        "τ_α(ϖ) = {}, τ_α on units: η^{}\nϖ_(α,l) = {}\nξ(ζ) = {} · {}   ({:?} reading)\nξ on residue field: η^{}\ntame induction: {}",
        record.tau_alpha_uniformizer_value.to_scalar()?,
        record.tau_alpha_residue_exponent,
        record.pi1_uniformizer.to_padic(),
        zeta.to_scalar()?,
        record.xi_on_zeta.tokens.join(" · "),
        reading,
        record.xi_residue_exponent,
        record.tame_induction,
    );
    report.exact = serde_json::to_value(&record)?;
    Ok(report)
}

fn q2_cmd(l: u32, omega: i64, psi_sign: i64, tau_args: &TauArgs, timing: bool) -> Result<Report> {
    if psi_sign != 1 && psi_sign != -1 {
        bail!("ψ sign must be ±1");
    }
    let params = SSParams::new(2, l, 1, omega)?;
    let psi = AdditiveCharacter::with_sign(2, psi_sign);
    let tau = tau_args.build(2, params.uniformizer)?;
    let start = Instant::now();
    let g = gamma_assemble(&params, &tau, &psi)?;
    let e = q2_expected(&tau)?;
    let mut report = Report::new("q2", json!({ "l": l, "omega": omega, "psi_sign": psi_sign, "tau": tau_args }));
    report.exact = json!({ "gamma": ExactRatFunc::from(&g), "expected": ExactRatFunc::from(&e) });
    report.float = json!({ "gamma": float_of(&g) });
    report.matched = Some(g == e);
    report.text = format!(
        "γ(s, π × τ, ψ) = {}\nτ(2) 2^(1/2-s) = {}\n{}",
        render(&g),
        e,
        if g == e { "match" } else { "MISMATCH" }
    );
    if g != e {
        report.first_counterexample = Some(format!("{g} vs {e}"));
    }
    if timing {
        report.timing = Some(json!({ "seconds": start.elapsed().as_secs_f64() }));
    }
    Ok(report)
}

fn verify_cmd(suite: &str, seed: u64, timing: bool) -> Result<Report> {
    let keys: Vec<String> =
        if suite == "all" { SUITES.iter().map(|(_, n)| n.to_string()).collect() } else { vec![suite.to_string()] };
    let mut results = Vec::new();
    for k in &keys {
        let mut r = run_suite(k, seed)?;
        if !timing {
            r.seconds = 0.0;
        }
        results.push(r);
    }
    let mut report = Report::new("verify", json!({ "suite": suite, "seed": seed }));
    report.matched = Some(results.iter().all(|r| r.passed));
    report.first_counterexample = results.iter().find_map(|r| r.first_counterexample.clone());
    report.text = results
        .iter()
        .map(|r| {
            let mut line = format!(
                "criterion {}: {} ({}, {} checks",
                r.id,
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.checks
            );
            if timing {
                line += &format!(", {:.2} s", r.seconds);
            }
            line += ")";
            if let Some(c) = &r.first_counterexample {
                line += &format!("\n  first counterexample: {c}");
            }
            if !r.passed && !r.detail.is_empty() {
                line += &format!("\n  {}", r.detail);
            }
            line
        })
        .collect::<Vec<_>>()
        .join("\n");
    report.suite_results = Some(results);
    Ok(report)
}

fn oracle_cmd(args: &GammaArgs, depth: u32, timing: bool) -> Result<Report> {
    if args.rep.l > 3 {
        bail!("oracle grids are capped at l ≤ 3");
    }
    if !(2..=6).contains(&depth) {
        bail!("depth must lie in 2..=6");
    }
    let params = args.rep.params()?;
    let psi = params.psi_alpha(&args.rep.psi()?)?;
    let tau = args.tau.build(params.p, params.uniformizer)?;
    let data = SectionData::new(tau, psi)?;
    let mut report = Report::new("oracle", json!({ "rep": args.rep, "tau": args.tau, "depth": depth }));
    let mut exact = serde_json::Map::new();
    let mut float = serde_json::Map::new();
    let mut times = serde_json::Map::new();
    let mut text = Vec::new();
    let mut all = true;
    for (name, intertwined) in [("plain", false), ("intertwined", true)] {
        let t0 = Instant::now();
        let closed = psi_closed(&params, &data, intertwined)?;
        let t1 = Instant::now();
        let brute = psi_bruteforce(&params, &data, depth, intertwined)?;
        let t2 = Instant::now();
        let m = brute == closed;
        all &= m;
        if !m && report.first_counterexample.is_none() {
            report.first_counterexample = Some(format!("{name}: brute force {brute} vs closed {closed}"));
        }
        exact.insert(
            name.into(),
            json!({ "closed": ExactRatFunc::from(&closed), "bruteforce": ExactRatFunc::from(&brute), "match": m }),
        );
        float.insert(name.into(), json!({ "closed": float_of(&closed), "bruteforce": float_of(&brute) }));
        times.insert(
            name.into(),
            json!({ "closed_seconds": (t1 - t0).as_secs_f64(), "bruteforce_seconds": (t2 - t1).as_secs_f64() }),
        );
        let mut line = format!("{name}: closed = {closed}\n  brute force: {}", if m { "match" } else { "MISMATCH" });
        if timing {
            line +=
                &format!(" (closed {:.3} s, brute force {:.3} s)", (t1 - t0).as_secs_f64(), (t2 - t1).as_secs_f64());
        }
        text.push(line);
    }
    report.exact = Value::Object(exact);
    report.float = Value::Object(float);
    report.matched = Some(all);
    report.text = text.join("\n");
    if timing {
        report.timing = Some(Value::Object(times));
    }
    Ok(report)
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Gamma(a) => gamma_cmd(a, cli.timing),
        Command::PoleScan(r) => pole_scan_cmd(r, cli.timing),
        Command::Parameter { rep, reading } => parameter_cmd(rep, *reading),
        Command::Q2 { l, omega, psi_sign, tau } => q2_cmd(*l, *omega, *psi_sign, tau, cli.timing),
        Command::Verify { suite } => verify_cmd(suite, cli.seed, cli.timing),
        Command::Oracle { gamma, depth } => oracle_cmd(gamma, *depth, cli.timing),
    }
}

fn write_out(report: &Report, body: &str) -> Result<()> {
    if let Some(dir) = std::env::var_os(OUT_DIR_VAR) {
        let dir = PathBuf::from(dir);
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{}.json", report.command));
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let body = match serde_json::to_string_pretty(&report) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match cli.format {
        Format::Json => println!("{body}"),
        Format::Text => println!("{}", report.text),
    }
    if let Err(e) = write_out(&report, &body) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if let (false, Some(c)) = (report.ok(), &report.first_counterexample) {
        eprintln!("first counterexample: {c}");
    }
    if report.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }
}
