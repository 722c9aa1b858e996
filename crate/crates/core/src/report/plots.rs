//! CSV traces: a header row, then one row per sample.
//!
//! Numeric columns hold enclosure midpoints as fixed-point decimals
//! truncated to `DIGITS` places; `radius` is the enclosure radius
//! (`0` for exact values).

use std::fmt::Write;

use crate::error::Result;
use crate::measure_lab::{rho, typewriter, StepFunction, TDCombo};
use crate::numkernel::{rat_to_decimal, Enclosure, Rat};
use crate::pompeiu::PompeiuBuilder;
use crate::sepcont::{diagonal_trace, PowerExpForm, SepFunction};
use crate::series_lab::{ratio_trace as ratios, BlockPartition, Series};

pub const DIGITS: usize = 20;

pub const KINDS: [&str; 6] = [
    "pompeiu-graph",
    "diagonal-blowup",
    "ratio-trace",
    "rho-decay",
    "block-sums",
    "oscillation",
];

/// Decimal without trailing zeros.
pub fn decimal(q: &Rat) -> String {
    let s = rat_to_decimal(q, DIGITS);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "" | "-" | "-0" => "0".to_string(),
        _ => s.to_string(),
    }
}

fn enclosure_cols(e: &Enclosure) -> String {
    format!("{},{}", decimal(&e.mid_rat()), radius(e))
}

fn radius(e: &Enclosure) -> String {
    if e.is_exact() {
        "0".to_string()
    } else {
        format!("{:.3e}", e.rad_f64())
    }
}

struct Csv(String);

impl Csv {
    fn new(header: &str) -> Self {
        Csv(format!("{header}\n"))
    }

    fn row(&mut self, fields: std::fmt::Arguments<'_>) {
        self.0.write_fmt(fields).expect("writing to a String");
        self.0.push('\n');
    }
}

/// `count` samples of the Pompeiu function on `[lo, hi]`.
pub fn pompeiu_graph(lo: &Rat, hi: &Rat, count: usize, prec: u32) -> Result<String> {
    let mut out = Csv::new("x,f,radius");
    for s in PompeiuBuilder::default().graph(lo, hi, count, prec)? {
        out.row(format_args!("{},{}", decimal(&s.x), enclosure_cols(&s.y)));
    }
    Ok(out.0)
}

/// `|form(f(t, …, t))|` along `t = 2^{−j}`.
pub fn diagonal_blowup(
    f: &SepFunction,
    form: &PowerExpForm,
    js: impl IntoIterator<Item = u32>,
    prec: u32,
) -> Result<String> {
    let js: Vec<u32> = js.into_iter().collect();
    let mut out = Csv::new("j,t,abs_value,radius");
    for (j, (t, v)) in js.iter().zip(diagonal_trace(f, form, js.iter().copied(), prec)?) {
        out.row(format_args!("{j},{},{}", decimal(&t), enclosure_cols(&v)));
    }
    Ok(out.0)
}

/// `|x_{n+1}/xₙ|` for `1 ≤ n ≤ N`, exact.
pub fn ratio_trace<S: Series + ?Sized>(x: &S, n_max: u64) -> Result<String> {
    let mut out = Csv::new("n,ratio,radius");
    for (n, r) in ratios(x, n_max)? {
        out.row(format_args!("{n},{},0", decimal(&r)));
    }
    Ok(out.0)
}

/// `ρ(Fₙ, 0)` for `1 ≤ n ≤ N`; plain typewriter when `combo` is `None`.
pub fn rho_decay(combo: Option<&TDCombo>, n_max: u64) -> Result<String> {
    let zero = StepFunction::zero();
    let mut out = Csv::new("n,k,rho,radius");
    for n in 1..=n_max {
        let f = match combo {
            Some(c) => c.at(n)?,
            None => typewriter(n)?,
        };
        out.row(format_args!("{n},{},{},0", n.ilog2(), decimal(&rho(&f, &zero))));
    }
    Ok(out.0)
}

/// Block bounds and weight sums of every materialized block.
pub fn block_sums(b: &BlockPartition, prec: u32) -> Result<String> {
    let mut out = Csv::new("k,start,end,sum,radius");
    for k in 1..=b.len() as u64 {
        let (lo, hi) = b.bounds(k).expect("materialized block");
        let e = b.block_sum(k, prec)?.enclosure(prec);
        out.row(format_args!("{k},{lo},{hi},{}", enclosure_cols(&e)));
    }
    Ok(out.0)
}

/// `Fₙ(x₀)` for `1 ≤ n ≤ N`.
pub fn oscillation(c: &TDCombo, x0: &Rat, n_max: u64) -> Result<String> {
    let mut out = Csv::new("n,k,value,radius");
    for n in 1..=n_max {
        out.row(format_args!("{n},{},{},0", n.ilog2(), decimal(&c.eval(n, x0)?)));
    }
    Ok(out.0)
}
