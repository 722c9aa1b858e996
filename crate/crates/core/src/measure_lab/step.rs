//! Exact step functions on `[0,1]`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numkernel::{rat_abs, rat_to_string, Rat};

/// A function on `[0,1]` constant on cells `[bᵢ, bᵢ₊₁)`, the last cell
/// closed at 1.
///
/// Canonical form: breakpoints strictly increasing from `b₀ = 0`, all
/// below 1, and neighbouring cells carry different values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepFunction {
    breaks: Vec<Rat>,
    values: Vec<Rat>,
}

impl StepFunction {
    pub fn constant(c: Rat) -> Self {
        StepFunction {
            breaks: vec![Rat::zero()],
            values: vec![c],
        }
    }

    pub fn zero() -> Self {
        Self::constant(Rat::zero())
    }

    /// `c·χ_{[a,b)}` with `[a,b)` clipped to `[0,1]`.
    pub fn indicator(a: &Rat, b: &Rat, c: Rat) -> Self {
        let zero = Rat::zero();
        let one = Rat::one();
        let lo = a.clone().max(zero.clone());
        let hi = b.clone().min(one.clone());
        if lo >= hi || c.is_zero() {
            return Self::zero();
        }
        let mut cells = Vec::with_capacity(3);
        if lo > zero {
            cells.push((zero, Rat::zero()));
        }
        cells.push((lo, c));
        if hi < one {
            cells.push((hi, Rat::zero()));
        }
        Self::from_cells(cells).expect("well-formed indicator")
    }

    /// Builds from `(left endpoint, value)` pairs sorted by endpoint, the
    /// first at 0. Equal neighbours are merged.
    pub fn from_cells(cells: Vec<(Rat, Rat)>) -> Result<Self> {
        let Some(first) = cells.first() else {
            return Err(Error::invalid("a step function needs at least one cell"));
        };
        if !first.0.is_zero() {
            return Err(Error::invalid("the first cell must start at 0"));
        }
        let mut breaks: Vec<Rat> = Vec::with_capacity(cells.len());
        let mut values: Vec<Rat> = Vec::with_capacity(cells.len());
        for (a, v) in cells {
            if a >= Rat::one() {
                return Err(Error::invalid(format!("cell start {} is not below 1", rat_to_string(&a))));
            }
            if let Some(last) = breaks.last() {
                if a <= *last {
                    return Err(Error::invalid("cell starts must increase strictly"));
                }
            }
            if values.last() == Some(&v) {
                continue;
            }
            breaks.push(a);
            values.push(v);
        }
        Ok(StepFunction { breaks, values })
    }

    /// `(start, end, value)` per cell.
    pub fn cells(&self) -> impl Iterator<Item = (&Rat, Rat, &Rat)> + '_ {
        self.breaks.iter().enumerate().map(move |(i, a)| {
            let b = self.breaks.get(i + 1).cloned().unwrap_or_else(Rat::one);
            (a, b, &self.values[i])
        })
    }

    pub fn cell_count(&self) -> usize {
        self.breaks.len()
    }

    /// Value at `x ∈ [0,1]`.
    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        if x.is_negative() || *x > Rat::one() {
            return Err(Error::invalid(format!("{} is outside [0,1]", rat_to_string(x))));
        }
        let i = self.breaks.partition_point(|b| b <= x) - 1;
        Ok(self.values[i].clone())
    }

    /// Pointwise combination on the common refinement.
    pub fn combine(&self, other: &StepFunction, op: impl Fn(&Rat, &Rat) -> Rat) -> StepFunction {
        let mut cells = Vec::with_capacity(self.breaks.len() + other.breaks.len());
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let a = std::cmp::max(&self.breaks[i], &other.breaks[j]).clone();
            cells.push((a, op(&self.values[i], &other.values[j])));
            let ni = self.breaks.get(i + 1);
            let nj = other.breaks.get(j + 1);
            match (ni, nj) {
                (None, None) => break,
                (Some(_), None) => i += 1,
                (None, Some(_)) => j += 1,
                (Some(x), Some(y)) => {
                    if x < y {
                        i += 1;
                    } else if y < x {
                        j += 1;
                    } else {
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        StepFunction::from_cells(cells).expect("refinement is ordered")
    }

    pub fn map(&self, op: impl Fn(&Rat) -> Rat) -> StepFunction {
        let cells = self.breaks.iter().cloned().zip(self.values.iter().map(op)).collect();
        StepFunction::from_cells(cells).expect("same breakpoints")
    }

    pub fn add(&self, o: &StepFunction) -> StepFunction {
        self.combine(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &StepFunction) -> StepFunction {
        self.combine(o, |a, b| a - b)
    }

    pub fn mul(&self, o: &StepFunction) -> StepFunction {
        self.combine(o, |a, b| a * b)
    }

    pub fn scale(&self, c: &Rat) -> StepFunction {
        self.map(|v| v * c)
    }

    pub fn abs(&self) -> StepFunction {
        self.map(rat_abs)
    }

    /// `∫₀¹ f`.
    pub fn integral(&self) -> Rat {
        self.cells().map(|(a, b, v)| (b - a) * v).sum()
    }

    pub fn max_abs(&self) -> Rat {
        self.values.iter().map(rat_abs).max().expect("at least one cell")
    }
}

/// `ρ(f,g) = ∫₀¹ |f−g| / (1+|f−g|)`.
pub fn rho(f: &StepFunction, g: &StepFunction) -> Rat {
    f.sub(g)
        .cells()
        .map(|(a, b, v)| {
            let d = rat_abs(v);
            (b - a) * &d / (Rat::one() + &d)
        })
        .sum()
}

/// Lebesgue measure of `{x ∈ [0,1] : |f(x)| > α}`.
pub fn measure_exceed(f: &StepFunction, alpha: &Rat) -> Result<Rat> {
    if !alpha.is_positive() {
        return Err(Error::invalid("α must be positive"));
    }
    Ok(f.cells()
        .filter(|(_, _, v)| rat_abs(v) > *alpha)
        .map(|(a, b, _)| b - a)
        .sum())
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .cells()
            .map(|(a, b, v)| {
                let close = if b.is_one() { "]" } else { ")" };
                format!("[{}, {}{}: {}", rat_to_string(a), rat_to_string(&b), close, rat_to_string(v))
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl Serialize for StepFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.breaks.len()))?;
        for (a, b, v) in self.cells() {
            seq.serialize_element(&[rat_to_string(a), rat_to_string(&b), rat_to_string(v)])?;
        }
        seq.end()
    }
}
