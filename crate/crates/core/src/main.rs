use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::{One, Zero};
use serde_json::{json, Value};

use lineability::cantor_mes::{Lineable, MesFunction, RationalInterval, DEFAULT_SCAN_BUDGET};
use lineability::expalg::{ExpSum, PolynomialNC};
use lineability::measure_lab::{
    in_measure_report, independence_check_td, nonconvergence_witness, rho, typewriter,
    typewriter_nonconvergence, StepFunction, TDCombo, TypewriterIndex,
};
use lineability::numkernel::{compare, parse_rat, pow2, rat_to_string, Ordering3, Rat};
use lineability::pompeiu::{DerivativeCertificate, PompeiuBuilder, PompeiuPoint};
use lineability::report::criteria::{self, Config};
use lineability::report::{plots, CheckRecord, Report, Status};
use lineability::sepcont::{
    diagonal_blowup_witness, dominance_verdict, expand_poly, Dominance, SepFunction,
};
use lineability::series_lab::{
    block_divergence_witness, build_blocks, comparison_bound_holds, density_perturbation,
    partial_sums, ratio_certificate, ratio_stats, root_stats, DCombo, LinearCombo, SeqFamily,
    WeightedSpace,
};
use lineability::{Error, Result};

#[derive(Parser)]
#[command(name = "lineability", version, about = "Certified witnesses for classical real-analysis counterexamples")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Working precision in bits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Search budget in steps.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample count for randomized sweeps.
    #[arg(long, global = true)]
    count: Option<usize>,
    /// Output path for CSV data.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Single-line JSON.
    #[arg(long, global = true)]
    json_compact: bool,
    /// Include per-check wall-clock times (makes reports non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Everywhere-surjective function: preimage witnesses.
    Mes(MesArgs),
    /// Pompeiu function: values, derivative certificates, nonconstancy.
    Pompeiu(PompeiuArgs),
    /// Separately continuous function and diagonal blow-up.
    Sepcont(SepArgs),
    /// Ratio and root test failures.
    Series(SeriesArgs),
    /// Weighted block partitions and divergence witnesses.
    Blocks(BlocksArgs),
    /// Typewriter sequences and convergence in measure.
    Typewriter(TypewriterArgs),
    /// Runs every acceptance criterion.
    VerifyAll,
    /// Writes CSV plot data.
    Plot(PlotArgs),
}

#[derive(Args)]
struct MesArgs {
    /// Open interval `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    interval: String,
    #[arg(long, allow_hyphen_values = true)]
    target: String,
    /// Compose with `Σ c·φ_α`, given as `c:α,…`.
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
}

#[derive(Args)]
struct PompeiuArgs {
    /// Encloses `f(x)`.
    #[arg(long, allow_hyphen_values = true)]
    eval: Option<String>,
    /// Derivative certificate at the `n`-th dense zero.
    #[arg(long)]
    dense_zero: Option<u64>,
    /// Nonconstancy witness for `φ ∘ f` on `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    nonconstancy: Option<String>,
    /// `exp` or `c:α,…` for `Σ c·φ_α`.
    #[arg(long, default_value = "exp", allow_hyphen_values = true)]
    phi: String,
    /// Certifies `f(x) < f(y)` for `x,y` with `x < y`.
    #[arg(long, allow_hyphen_values = true)]
    monotone: Option<String>,
}

#[derive(Args)]
struct SepArgs {
    /// Number of variables.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Evaluates at `x1,…,xn`.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Polynomial in `t1 … tk`, e.g. `t1^2 - t1*t2`.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Generator exponents `c1,…,ck` for `φ_c`.
    #[arg(long, default_value = "1")]
    gens: String,
    #[arg(long, default_value = "1000000")]
    threshold: String,
}

#[derive(Args)]
struct SeriesArgs {
    /// geometric-skewed, ratio-fail-conv, ratio-fail-div, root-fail-conv, root-fail-div.
    #[arg(long)]
    family: String,
    /// Family parameter `s`.
    #[arg(long)]
    s: Option<String>,
    /// Linear combination `α:s,…` within the family.
    #[arg(long, allow_hyphen_values = true)]
    combo: Option<String>,
    #[arg(long, default_value_t = 100)]
    n: u64,
    #[arg(long)]
    ratio_stats: bool,
    #[arg(long)]
    root_stats: bool,
    #[arg(long)]
    partial_sum: bool,
    /// Ratio certificate with threshold `--m`.
    #[arg(long)]
    certificate: bool,
    /// Comparison bound `term ≤ n⁻²` for `3 ≤ n ≤ N`.
    #[arg(long)]
    comparison: bool,
    #[arg(long, default_value = "1000000")]
    m: String,
}

#[derive(Args)]
struct BlocksArgs {
    /// harmonic, constant, or `table:c1,c2,…`.
    #[arg(long, default_value = "harmonic")]
    weights: String,
    /// Number of blocks.
    #[arg(long, default_value_t = 10)]
    k: u64,
    /// Divergence witness for `Σ λ·d_t`, given as `λ:t,…`.
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long, default_value = "1000")]
    m: String,
    /// Density perturbation of `Φ = c1,…`; pass an empty string for `Φ = 0`.
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<String>,
    #[arg(long, default_value = "1/10")]
    epsilon: String,
    #[arg(long, default_value_t = 0)]
    n_min: u64,
}

#[derive(Args)]
struct TypewriterArgs {
    /// `ρ(Tₙ, 0)` or `ρ(Fₙ, 0)`.
    #[arg(long)]
    rho: bool,
    #[arg(long, default_value_t = 16)]
    n: u64,
    /// `c:t,…` for `Σ c·T_{n,t}`.
    #[arg(long, allow_hyphen_values = true)]
    combo: Option<String>,
    /// Nonconvergence witness at `x0` over `--n` generations.
    #[arg(long)]
    x0: Option<String>,
    /// In-measure report up to `--n` at level `--alpha`.
    #[arg(long)]
    measure: bool,
    #[arg(long, default_value = "1/2")]
    alpha: String,
    /// Independence check for shifts `t1,…`.
    #[arg(long)]
    independence: Option<String>,
}

#[derive(Args)]
struct PlotArgs {
    /// pompeiu-graph, diagonal-blowup, ratio-trace, rho-decay, block-sums, oscillation.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 256)]
    n: u64,
    #[arg(long, default_value = "-3", allow_hyphen_values = true)]
    lo: String,
    #[arg(long, default_value = "3", allow_hyphen_values = true)]
    hi: String,
    #[arg(long, default_value_t = 512)]
    samples: usize,
    #[arg(long, default_value = "geometric-skewed")]
    family: String,
    #[arg(long)]
    s: Option<String>,
    #[arg(long, default_value = "harmonic")]
    weights: String,
    #[arg(long, allow_hyphen_values = true)]
    combo: Option<String>,
    #[arg(long, default_value = "1/2")]
    x0: String,
    #[arg(long, default_value = "t1")]
    poly: String,
    #[arg(long, default_value = "1")]
    gens: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

fn rats(s: &str) -> Result<Vec<Rat>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_rat).collect()
}

fn pairs(s: &str) -> Result<Vec<(Rat, Rat)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|item| {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("expected `a:b`, got `{item}`")))?;
            Ok((parse_rat(a)?, parse_rat(b)?))
        })
        .collect()
}

fn phi_arg(s: &str) -> Result<ExpSum> {
    if s == "exp" {
        Ok(ExpSum::monomial(Rat::one(), Rat::one()))
    } else {
        ExpSum::parse_phi_combo(s)
    }
}

fn family(name: &str, s: Option<Rat>) -> Result<SeqFamily> {
    let need = || s.clone().ok_or_else(|| Error::invalid(format!("family `{name}` needs --s")));
    let f = match name {
        "geometric-skewed" => SeqFamily::GeometricSkewed,
        "ratio-fail-conv" => SeqFamily::RatioFailConv(need()?),
        "ratio-fail-div" => SeqFamily::RatioFailDiv(need()?),
        "root-fail-conv" => SeqFamily::RootFailConv(need()?),
        "root-fail-div" => SeqFamily::RootFailDiv(need()?),
        _ => return Err(Error::invalid(format!("unknown family `{name}`"))),
    };
    f.validate()?;
    Ok(f)
}

fn weights(s: &str) -> Result<WeightedSpace> {
    match s {
        "harmonic" => Ok(WeightedSpace::harmonic()),
        "constant" => Ok(WeightedSpace::constant()),
        _ => match s.strip_prefix("table:") {
            Some(vals) => WeightedSpace::table(rats(vals)?),
            None => Err(Error::invalid(format!("unknown weights `{s}`"))),
        },
    }
}

fn r(q: &Rat) -> String {
    rat_to_string(q)
}

fn check(name: &str, f: impl FnOnce() -> Result<(bool, Value)>) -> CheckRecord {
    CheckRecord::from_result(name, f())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("witness serializes")
}

fn mes(a: &MesArgs, c: &Common) -> Result<(Value, Vec<CheckRecord>)> {
    let iv = RationalInterval::parse(&a.interval)?;
    let y = parse_rat(&a.target)?;
    let g = a.g.as_deref().map(ExpSum::parse_phi_combo).transpose()?;
    let prec = c.precision.unwrap_or(128);
    let budget = c.budget.unwrap_or(DEFAULT_SCAN_BUDGET);
    let params = json!({ "interval": iv, "target": r(&y), "g": g.as_ref().map(|g| g.to_string()) });
    let mut f = MesFunction::new(0);
    let tol = pow2(-40);
    let rec = match g {
        None => check("surjectivity_witness", || {
            let w = f.surjectivity_witness(&iv, &y, prec, budget)?;
            Ok((iv.contains_point(&w.point) && w.within(-40), to_value(&w)))
        }),
        Some(g) => check("composed_witness", || {
            let w = Lineable::new(g).witness(&mut f, &iv, &y, prec, budget)?;
            let err = lineability::numkernel::rat_abs(&(w.composed.mid_rat() - &y)) + w.composed.rad_rat();
            Ok((iv.contains_point(&w.inner.point) && err <= tol, to_value(&w)))
        }),
    };
    Ok((params, vec![rec]))
}

fn pompeiu(a: &PompeiuArgs, c: &Common) -> Result<(Value, Vec<CheckRecord>)> {
    let prec = c.precision.unwrap_or(128);
    let p = PompeiuBuilder::default();
    let mut checks = Vec::new();
    if let Some(x) = &a.eval {
        let x = parse_rat(x)?;
        checks.push(check("eval_f", || {
            let v = p.eval_f(&x, prec)?;
            Ok((true, json!({ "x": r(&x), "f": v })))
        }));
    }
    if let Some(n) = a.dense_zero {
        checks.push(check("dense_zero_derivative", || {
            let x = p.dense_zero_point(n, prec)?;
            let cert = p.derivative_certificate(&PompeiuPoint::dense_zero(n), prec);
            let ok = matches!(cert, DerivativeCertificate::ExactZero);
            Ok((ok, json!({ "n": n, "x": x, "certificate": cert })))
        }));
    }
    if let Some(iv) = &a.nonconstancy {
        let j = RationalInterval::parse(iv)?;
        let phi = phi_arg(&a.phi)?;
        let budget = c.budget.unwrap_or(4096);
        checks.push(check("nonconstancy_witness", || {
            let w = p.nonconstancy_witness(&j, &phi, prec, budget)?;
            Ok((w.ordering != Ordering3::Overlap, to_value(&w)))
        }));
    }
    if let Some(xy) = &a.monotone {
        let v = rats(xy)?;
        let [x, y] = <[Rat; 2]>::try_from(v).map_err(|_| Error::invalid("--monotone takes `x,y`"))?;
        if x >= y {
            return Err(Error::invalid("--monotone needs x < y"));
        }
        checks.push(check("strict_monotonicity", || {
            let (fx, fy) = (p.eval_f(&x, prec)?, p.eval_f(&y, prec)?);
            match compare(&fx, &fy) {
                Ordering3::Overlap => Err(Error::precision("f(x) and f(y) overlap")),
                o => Ok((o == Ordering3::CertainlyLess, json!({ "f_x": fx, "f_y": fy }))),
            }
        }));
    }
    if checks.is_empty() {
        return Err(Error::invalid("pompeiu needs --eval, --dense-zero, --nonconstancy or --monotone"));
    }
    Ok((json!({ "precision": prec, "phi": a.phi }), checks))
}

fn sepcont(a: &SepArgs, c: &Common) -> Result<(Value, Vec<CheckRecord>)> {
    let f = SepFunction::new(a.dim)?;
    let mut checks = Vec::new();
    if let Some(pt) = &a.point {
        let x = rats(pt)?;
        let v = lineability::sepcont::eval_sep(&f, &x)?;
        checks.push(CheckRecord::new(
            "eval",
            Status::Pass,
            json!({ "point": x.iter().map(r).collect::<Vec<_>>(), "value": r(&v) }),
        ));
    }
    if let Some(p) = &a.poly {
        let poly = PolynomialNC::parse(p, None)?;
        let cs = rats(&a.gens)?;
        let t = parse_rat(&a.threshold)?;
        let prec = c.precision.unwrap_or(96);
        let max_j = c.budget.unwrap_or(64).min(u32::MAX as u64) as u32;
        checks.push(check("diagonal_blowup", || {
            let form = expand_poly(&poly, &cs)?;
            let verdict = dominance_verdict(&form);
            if verdict != Dominance::BlowsUp {
                return Ok((false, json!({ "form": form.to_string(), "verdict": verdict })));
            }
            let w = diagonal_blowup_witness(&f, &form, &t, prec, max_j)?;
            Ok((true, json!({ "form": form.to_string(), "verdict": verdict, "witness": w })))
        }));
    }
    if checks.is_empty() {
        return Err(Error::invalid("sepcont needs --point or --poly"));
    }
    Ok((json!({ "dim": a.dim, "gens": a.gens, "poly": a.poly }), checks))
}

fn series(a: &SeriesArgs, c: &Common) -> Result<(Value, Vec<CheckRecord>)> {
    let s = a.s.as_deref().map(parse_rat).transpose()?;
    let combo = match &a.combo {
        Some(text) => {
            let parts = pairs(text)?
                .into_iter()
                .map(|(al, sv)| Ok((al, family(&a.family, Some(sv))?)))
                .collect::<Result<Vec<_>>>()?;
            LinearCombo::new(parts)?
        }
        None => LinearCombo::single(family(&a.family, s)?)?,
    };
    let n = a.n;
    if n == 0 {
        return Err(Error::invalid("--n must be positive"));
    }
    let any = a.ratio_stats || a.root_stats || a.partial_sum || a.certificate || a.comparison;
    let mut checks = Vec::new();
    if a.ratio_stats || !any {
        checks.push(check("ratio_stats", || {
            let st = ratio_stats(&combo, n)?;
            Ok((true, json!({ "max": r(&st.max), "argmax": st.argmax, "min": r(&st.min), "argmin": st.argmin })))
        }));
    }
    if a.root_stats {
        let prec = c.precision.unwrap_or(64);
        checks.push(check("root_stats", || Ok((true, to_value(&root_stats(&combo, n, prec)?)))));
    }
    if a.partial_sum {
        let sum = partial_sums(&combo, n);
        checks.push(CheckRecord::new(
            "partial_sum",
            Status::Pass,
            json!({ "n": n, "sum": r(&sum), "decimal": plots::decimal(&sum) }),
        ));
    }
    if a.certificate {
        let m = parse_rat(&a.m)?;
        let max_n = c.budget.unwrap_or(10_000);
        checks.push(check("ratio_certificate", || Ok((true, to_value(&ratio_certificate(&combo, &m, max_n)?)))));
    }
    if a.comparison {
        let [(_, SeqFamily::RatioFailConv(sv))] = combo.parts() else {
            return Err(Error::invalid("--comparison needs a single ratio-fail-conv family"));
        };
        checks.push(check("comparison_bound", || {
            for k in 3..=n {
                if !comparison_bound_holds(sv, k)? {
                    return Ok((false, json!({ "s": r(sv), "violated_at": k })));
                }
            }
            Ok((true, json!({ "s": r(sv), "n_range": [3, n] })))
        }));
    }
    Ok((json!({ "family": a.family, "combo": combo.to_string(), "n": n }), checks))
}

fn blocks(a: &BlocksArgs, c: &Common) -> Result<(Value, Vec<CheckRecord>)> {
    let space = weights(&a.weights)?;
    let prec = c.precision.unwrap_or(64);
    let m = parse_rat(&a.m)?;
    let mut checks = Vec::new();
    let part = build_blocks(&space, a.k);
    checks.push(check("block_invariant", || {
        let checks = part.as_ref().map_err(Clone::clone)?.verify(prec)?;
        let ok = checks.iter().all(|b| b.exceeds && b.minimal);
        let shown: Vec<&_> = checks.iter().take(20).collect();
        Ok((ok, json!({ "blocks": checks.len(), "first": shown })))
    }));
    if let Some(d) = &a.d {
        let combo = DCombo::new(pairs(d)?)?;
        checks.push(check("block_divergence_witness", || {
            let w = block_divergence_witness(&combo, part.as_ref().map_err(Clone::clone)?, &m, prec)?;
            Ok((w.abs_lower >= m, to_value(&w)))
        }));
    }
    if let Some(phi) = &a.perturb {
        let phi = rats(phi)?;
        let eps = parse_rat(&a.epsilon)?;
        checks.push(check("density_perturbation", || {
            let p = density_perturbation(&phi, &eps, &m, a.n_min, &space, prec)?;
            let half = &eps / Rat::from_integer(2.into());
            let ok = p.distance == half && p.window_sum.exceeds(&m) == Some(true);
            Ok((ok, to_value(&p)))
        }));
    }
    Ok((json!({ "weights": space.name(), "k": a.k, "m": r(&m) }), checks))
}

fn typewriter_cmd(a: &TypewriterArgs) -> Result<(Value, Vec<CheckRecord>)> {
    let combo = a.combo.as_deref().map(|s| pairs(s).and_then(TDCombo::new)).transpose()?;
    let n = a.n;
    let mut checks = Vec::new();
    let zero = StepFunction::zero();
    if a.rho {
        let idx = TypewriterIndex::new(n)?;
        checks.push(check("rho", || {
            let (f, expect) = match &combo {
                Some(c) => (c.at(n)?, None),
                None => (typewriter(n)?, Some(pow2(-(idx.k as i64) - 1))),
            };
            let v = rho(&f, &zero);
            let support: Rat = f.cells().filter(|c| !c.2.is_zero()).map(|c| c.1 - c.0).sum();
            let ok = expect.as_ref().is_none_or(|e| *e == v);
            Ok((ok, json!({ "n": n, "k": idx.k, "j": idx.j, "support": r(&support), "rho": r(&v) })))
        }));
    }
    if let Some(x0) = &a.x0 {
        let x0 = parse_rat(x0)?;
        let horizon = u32::try_from(n.min(62)).expect("small horizon");
        checks.push(check("nonconvergence_witness", || {
            let w = match &combo {
                Some(c) => nonconvergence_witness(c, &x0, horizon)?,
                None => typewriter_nonconvergence(&x0, horizon)?,
            };
            Ok((!w.gap.is_zero(), to_value(&w)))
        }));
    }
    if a.measure {
        let c = combo.clone().ok_or_else(|| Error::invalid("--measure needs --combo"))?;
        let alpha = parse_rat(&a.alpha)?;
        checks.push(check("in_measure", || {
            let rows = in_measure_report(&c, n, std::slice::from_ref(&alpha))?;
            let worst = rows.iter().find(|row| row.measure > row.bound);
            let last = rows.last().map(to_value);
            Ok((worst.is_none(), json!({ "rows": rows.len(), "violation": worst.map(to_value), "last": last })))
        }));
    }
    if let Some(ts) = &a.independence {
        let shifts = rats(ts)?;
        checks.push(check("independence", || {
            let v = independence_check_td(&shifts)?;
            Ok((!v.determinant.is_zero(), to_value(&v)))
        }));
    }
    if checks.is_empty() {
        return Err(Error::invalid("typewriter needs --rho, --x0, --measure or --independence"));
    }
    Ok((json!({ "n": n, "combo": combo.map(|c| c.to_string()) }), checks))
}

fn plot(a: &PlotArgs, c: &Common) -> Result<String> {
    match a.kind.as_str() {
        "pompeiu-graph" => {
            plots::pompeiu_graph(&parse_rat(&a.lo)?, &parse_rat(&a.hi)?, a.samples, c.precision.unwrap_or(96))
        }
        "diagonal-blowup" => {
            let form = expand_poly(&PolynomialNC::parse(&a.poly, None)?, &rats(&a.gens)?)?;
            let js = 0..=u32::try_from(a.n.min(64)).expect("small");
            plots::diagonal_blowup(&SepFunction::new(a.dim)?, &form, js, c.precision.unwrap_or(96))
        }
        "ratio-trace" => {
            let s = a.s.as_deref().map(parse_rat).transpose()?;
            plots::ratio_trace(&family(&a.family, s)?, a.n)
        }
        "rho-decay" => {
            let combo = a.combo.as_deref().map(|s| pairs(s).and_then(TDCombo::new)).transpose()?;
            plots::rho_decay(combo.as_ref(), a.n)
        }
        "block-sums" => {
            let b = build_blocks(&weights(&a.weights)?, a.n)?;
            plots::block_sums(&b, c.precision.unwrap_or(64))
        }
        "oscillation" => {
            let text = a.combo.as_deref().unwrap_or("1:1/4");
            let combo = TDCombo::new(pairs(text)?)?;
            plots::oscillation(&combo, &parse_rat(&a.x0)?, a.n)
        }
        k => Err(Error::invalid(format!("unknown plot kind `{k}`; expected one of {}", plots::KINDS.join(", ")))),
    }
}

fn emit(report: &Report, c: &Common) -> ExitCode {
    println!("{}", report.to_json(c.json_compact));
    ExitCode::from(report.overall.exit_code() as u8)
}

fn usage_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let c = &cli.common;
    let (name, result) = match &cli.command {
        Command::VerifyAll => {
            let cfg = Config {
                seed: c.seed,
                precision: c.precision,
                budget: c.budget,
                count: c.count,
                timings: c.timings,
            };
            return emit(&criteria::verify_all(&cfg), c);
        }
        Command::Plot(a) => {
            let csv = match plot(a, c) {
                Ok(csv) => csv,
                Err(e @ Error::InvalidArgument(_)) => return usage_error(&e),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(Status::from_error(&e).exit_code() as u8);
                }
            };
            let rows = csv.lines().count().saturating_sub(1);
            let Some(path) = &c.out else {
                print!("{csv}");
                return ExitCode::SUCCESS;
            };
            let rec = match std::fs::write(path, &csv) {
                Ok(()) => CheckRecord::new("write_csv", Status::Pass, json!({ "path": path, "rows": rows })),
                Err(e) => CheckRecord::new(
                    "write_csv",
                    Status::Fail,
                    json!({ "path": path, "error": e.to_string() }),
                ),
            };
            let params = json!({ "kind": a.kind, "n": a.n });
            return emit(&Report::new("plot", params, vec![rec]), c);
        }
        Command::Mes(a) => ("mes", mes(a, c)),
        Command::Pompeiu(a) => ("pompeiu", pompeiu(a, c)),
        Command::Sepcont(a) => ("sepcont", sepcont(a, c)),
        Command::Series(a) => ("series", series(a, c)),
        Command::Blocks(a) => ("blocks", blocks(a, c)),
        Command::Typewriter(a) => ("typewriter", typewriter_cmd(a)),
    };
    match result {
        Ok((params, checks)) => emit(&Report::new(name, params, checks), c),
        Err(e) => usage_error(&e),
    }
}
