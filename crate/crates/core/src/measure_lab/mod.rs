//! Step-function calculus on `[0,1]`, the metric `ρ` of convergence in
//! measure, and the typewriter sequence with its translated-dilated copies.
//!
//! Typewriter cells are half-open, `[j2⁻ᵏ, (j+1)2⁻ᵏ)`, with the last cell
//! of each generation closed at 1, so each generation partitions `[0,1]`.

mod step;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use step::{measure_exceed, rho, StepFunction};

use crate::error::{Error, Result};
use crate::numkernel::linalg::determinant;
use crate::numkernel::{pow2, rat_abs, rat_to_string, serde_rat, Rat};

/// `n = 2ᵏ + j` with `0 ≤ j < 2ᵏ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TypewriterIndex {
    pub n: u64,
    pub k: u32,
    pub j: u64,
}

impl TypewriterIndex {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("typewriter indices start at 1"));
        }
        let k = n.ilog2();
        Ok(TypewriterIndex { n, k, j: n - (1u64 << k) })
    }

    pub fn from_parts(k: u32, j: u64) -> Result<Self> {
        if k >= 63 || j >= 1u64 << k {
            return Err(Error::invalid(format!("need 0 ≤ j < 2^k, got k = {k}, j = {j}")));
        }
        Ok(TypewriterIndex { n: (1u64 << k) + j, k, j })
    }

    /// `[j2⁻ᵏ, (j+1)2⁻ᵏ)`.
    pub fn cell(&self) -> (Rat, Rat) {
        let w = pow2(-(self.k as i64));
        let a = &w * Rat::from_integer((self.j as i64).into());
        let b = &a + &w;
        (a, b)
    }
}

fn half_open_contains(a: &Rat, b: &Rat, y: &Rat) -> bool {
    a <= y && (y < b || (b.is_one() && y.is_one()))
}

/// `Tₙ`.
pub fn typewriter(n: u64) -> Result<StepFunction> {
    let (a, b) = TypewriterIndex::new(n)?.cell();
    Ok(StepFunction::indicator(&a, &b, Rat::one()))
}

/// `Tₙ(y)` for real `y`, zero outside `[0,1]`.
pub fn typewriter_at(n: u64, y: &Rat) -> Result<Rat> {
    let (a, b) = TypewriterIndex::new(n)?.cell();
    Ok(if half_open_contains(&a, &b, y) { Rat::one() } else { Rat::zero() })
}

fn check_shift(t: &Rat) -> Result<()> {
    if t.is_positive() && *t < Rat::new(1.into(), 2.into()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("shift must lie in (0,1/2), got {}", rat_to_string(t))))
    }
}

/// `T_{n,t}(x) = Tₙ(2(x−t))` on `[0,1]`.
pub fn translate_dilate(n: u64, t: &Rat) -> Result<StepFunction> {
    check_shift(t)?;
    let (a, b) = TypewriterIndex::new(n)?.cell();
    let half = Rat::new(1.into(), 2.into());
    Ok(StepFunction::indicator(&(t + &a * &half), &(t + &b * &half), Rat::one()))
}

/// `T_{n,t}(x)` pointwise, with the last typewriter cell closed.
pub fn translate_dilate_at(n: u64, t: &Rat, x: &Rat) -> Result<Rat> {
    check_shift(t)?;
    typewriter_at(n, &(Rat::from_integer(2.into()) * (x - t)))
}

/// `Σ c_ν T_{n,t_ν}` with shifts strictly increasing in `(0,1/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TDCombo {
    terms: Vec<(Rat, Rat)>,
}

impl TDCombo {
    pub fn new(terms: Vec<(Rat, Rat)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("empty combination"));
        }
        for (c, t) in &terms {
            check_shift(t)?;
            if c.is_zero() {
                return Err(Error::invalid("coefficients must be nonzero"));
            }
        }
        if terms.windows(2).any(|w| w[0].1 >= w[1].1) {
            return Err(Error::invalid("shifts must be strictly increasing"));
        }
        Ok(TDCombo { terms })
    }

    pub fn terms(&self) -> &[(Rat, Rat)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Fₙ`.
    pub fn at(&self, n: u64) -> Result<StepFunction> {
        let mut acc = StepFunction::zero();
        for (c, t) in &self.terms {
            acc = acc.add(&translate_dilate(n, t)?.scale(c));
        }
        Ok(acc)
    }

    /// `Fₙ(x)` pointwise.
    pub fn eval(&self, n: u64, x: &Rat) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (c, t) in &self.terms {
            acc += c * translate_dilate_at(n, t, x)?;
        }
        Ok(acc)
    }

    /// `(max{t_s, t_{s−1}+1/2}, t_s + 1/2]`, where `Fₙ(x) = c_s·Tₙ(2(x−t_s))`.
    pub fn window(&self) -> (Rat, Rat) {
        let half = Rat::new(1.into(), 2.into());
        let (_, ts) = self.terms.last().expect("nonempty");
        let lo = match self.terms.len() {
            1 => ts.clone(),
            s => ts.clone().max(&self.terms[s - 2].1 + &half),
        };
        (lo, ts + &half)
    }

    pub fn coefficient_sum(&self) -> Rat {
        self.terms.iter().map(|(c, _)| rat_abs(c)).sum()
    }
}

impl std::fmt::Display for TDCombo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, t)| format!("{}·T(n,{})", rat_to_string(c), rat_to_string(t)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureRow {
    pub n: u64,
    pub k: u32,
    #[serde(with = "serde_rat")]
    pub alpha: Rat,
    #[serde(with = "serde_rat")]
    pub measure: Rat,
    /// `s·2⁻ᵏ`.
    #[serde(with = "serde_rat")]
    pub bound: Rat,
    #[serde(with = "serde_rat")]
    pub rho: Rat,
}

/// Exact `m{|Fₙ| > α}` and `ρ(Fₙ, 0)` for `1 ≤ n ≤ N` and each `α`.
pub fn in_measure_report(c: &TDCombo, n_max: u64, alphas: &[Rat]) -> Result<Vec<MeasureRow>> {
    let mut rows = Vec::with_capacity(n_max as usize * alphas.len());
    let zero = StepFunction::zero();
    let s = Rat::from_integer((c.len() as i64).into());
    for n in 1..=n_max {
        let f = c.at(n)?;
        let idx = TypewriterIndex::new(n)?;
        let r = rho(&f, &zero);
        for a in alphas {
            rows.push(MeasureRow {
                n,
                k: idx.k,
                alpha: a.clone(),
                measure: measure_exceed(&f, a)?,
                bound: &s * pow2(-(idx.k as i64)),
                rho: r.clone(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationPair {
    pub k: u32,
    /// `Fₙ(x₀) = c_s`.
    pub n_hit: u64,
    /// `Fₙ(x₀) = 0`.
    pub n_miss: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonconvergenceWitness {
    #[serde(with = "serde_rat")]
    pub x0: Rat,
    pub generations: Vec<GenerationPair>,
    #[serde(with = "serde_rat")]
    pub gap: Rat,
}

/// For `y ∈ [0,1]` and each generation `k = 1..K`, the index whose cell
/// holds `y` and a neighbouring index whose cell does not.
fn generation_pairs(y: &Rat, horizon: u32) -> Result<Vec<GenerationPair>> {
    if horizon == 0 || horizon >= 63 {
        return Err(Error::invalid("horizon must lie in 1..=62"));
    }
    let mut out = Vec::with_capacity(horizon as usize);
    for k in 1..=horizon {
        let scaled = y * Rat::from_integer((1i64 << k).into());
        let j = scaled.floor().to_integer().try_into().unwrap_or(0u64).min((1u64 << k) - 1);
        let hit = TypewriterIndex::from_parts(k, j)?;
        let miss = TypewriterIndex::from_parts(k, if j == 0 { 1 } else { 0 })?;
        out.push(GenerationPair { k, n_hit: hit.n, n_miss: miss.n });
    }
    Ok(out)
}

/// `Tₙ(x₀)` takes both values 1 and 0 in every generation.
pub fn typewriter_nonconvergence(x0: &Rat, horizon: u32) -> Result<NonconvergenceWitness> {
    if x0.is_negative() || *x0 > Rat::one() {
        return Err(Error::WindowViolation { lower: "0".into(), upper: "1".into() });
    }
    let generations = generation_pairs(x0, horizon)?;
    for g in &generations {
        debug_assert!(typewriter_at(g.n_hit, x0)?.is_one());
        debug_assert!(typewriter_at(g.n_miss, x0)?.is_zero());
    }
    Ok(NonconvergenceWitness { x0: x0.clone(), generations, gap: Rat::one() })
}

/// Index pairs with `|F_{n₁}(x₀) − F_{n₂}(x₀)| = |c_s|` in every
/// generation, each value recomputed from all terms of the combination.
pub fn nonconvergence_witness(c: &TDCombo, x0: &Rat, horizon: u32) -> Result<NonconvergenceWitness> {
    let (lo, hi) = c.window();
    if *x0 <= lo || *x0 > hi || *x0 > Rat::one() {
        return Err(Error::WindowViolation {
            lower: rat_to_string(&lo),
            upper: rat_to_string(&hi),
        });
    }
    let (cs, ts) = c.terms.last().expect("nonempty");
    let y = Rat::from_integer(2.into()) * (x0 - ts);
    let generations = generation_pairs(&y, horizon)?;
    for g in &generations {
        let hit = c.eval(g.n_hit, x0)?;
        let miss = c.eval(g.n_miss, x0)?;
        if hit != *cs || !miss.is_zero() {
            return Err(Error::invalid(format!(
                "window identity failed at generation {}: F({}) = {}, F({}) = {}",
                g.k,
                g.n_hit,
                rat_to_string(&hit),
                g.n_miss,
                rat_to_string(&miss)
            )));
        }
    }
    Ok(NonconvergenceWitness { x0: x0.clone(), generations, gap: rat_abs(cs) })
}

#[derive(Debug, Clone, Serialize)]
pub struct TdIndependence {
    #[serde(with = "crate::numkernel::serde_rat_vec")]
    pub shifts: Vec<Rat>,
    /// `(max{t_{s−1}+1/2, t_s}, t_s+1/2]` when `s ≥ 2`.
    #[serde(with = "crate::numkernel::serde_rat_vec")]
    pub separating_interval: Vec<Rat>,
    #[serde(with = "crate::numkernel::serde_rat_vec")]
    pub sample_points: Vec<Rat>,
    #[serde(with = "serde_rat")]
    pub determinant: Rat,
}

/// Nonsingular evaluation matrix `[T_{1,t_ν}(xᵢ)]` with
/// `xᵢ = tᵢ + 1/2 − δ`: columns with smaller shift vanish at `xᵢ`.
pub fn independence_check_td(shifts: &[Rat]) -> Result<TdIndependence> {
    if shifts.is_empty() {
        return Err(Error::invalid("need at least one shift"));
    }
    for t in shifts {
        check_shift(t)?;
    }
    let mut sorted = shifts.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("shifts must be distinct"));
    }
    let half = Rat::new(1.into(), 2.into());
    let delta = sorted
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .fold(Rat::new(1.into(), 4.into()), |a, b| a.min(b))
        / Rat::from_integer(2.into());
    let points: Vec<Rat> = sorted.iter().map(|t| t + &half - &delta).collect();
    let m: Vec<Vec<Rat>> = points
        .iter()
        .map(|x| {
            sorted
                .iter()
                .map(|t| translate_dilate_at(1, t, x))
                .collect::<Result<Vec<Rat>>>()
        })
        .collect::<Result<_>>()?;
    let det = determinant(&m);
    if det.is_zero() {
        return Err(Error::SingularSample);
    }
    let separating_interval = match sorted.len() {
        1 => vec![],
        s => {
            let lo = (&sorted[s - 2] + &half).max(sorted[s - 1].clone());
            let hi = &sorted[s - 1] + &half;
            debug_assert!(lo < hi);
            vec![lo, hi]
        }
    };
    Ok(TdIndependence { shifts: sorted, separating_interval, sample_points: points, determinant: det })
}
