//! A measurable function that is surjective on every open interval.
//!
//! The open rational intervals are enumerated as `I₁, I₂, …`. Inside each
//! `Iₙ` a middle-thirds Cantor set `Cₙ` is carved, disjoint from all
//! earlier ones. Points of `Cₙ` are named by binary addresses, and a fixed
//! bijection from addresses onto ℝ defines `f` on `Cₙ`; `f` is zero
//! elsewhere. Since `Cₙ` has measure zero, so does the support of `f`.
//!
//! Membership in the union of all `Cₙ` is not decidable from finitely many
//! sets, so evaluation reports a [`Certainty`] relative to the carved
//! horizon.

mod address;
mod carver;
mod enumerate;

use serde::Serialize;

pub use address::{
    address_of_value, phi_inverse, phi_map, reindexed_value, CantorAddress,
};
pub use carver::{closed_disjoint, standard_cover, CantorSet, Carver};
pub use enumerate::{
    calkin_wilf, calkin_wilf_index, enumerate_interval, interval_index, interval_indices,
    rational_by_index, rational_index, RationalInterval,
};

use crate::error::{Error, Result};
use crate::expalg::ExpSum;
use crate::numkernel::{rat_abs, rat_to_string, pow2, Enclosure, Rat};

/// Default number of interval indices scanned by witness searches.
pub const DEFAULT_SCAN_BUDGET: u64 = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    /// `x` lies in a carved set; the value is `f(x)`.
    Exact,
    /// `x` avoids every carved set; `f(x) = 0` unless a later set contains it.
    ZeroUpToHorizon,
}

#[derive(Debug, Clone)]
pub struct MesValue {
    /// `None` means the value is exactly zero.
    pub value: Option<Enclosure>,
    pub certainty: Certainty,
    pub address: Option<CantorAddress>,
}

impl MesValue {
    pub fn enclosure(&self, prec: u32) -> Enclosure {
        self.value.clone().unwrap_or_else(|| Enclosure::zero(prec))
    }
}

/// `f` materialized up to a horizon of carved sets.
#[derive(Clone, Debug, Default)]
pub struct MesFunction {
    carver: Carver,
}

impl MesFunction {
    pub fn new(horizon: u64) -> Self {
        let mut carver = Carver::new();
        carver.extend_to(horizon);
        MesFunction { carver }
    }

    pub fn horizon(&self) -> u64 {
        self.carver.horizon()
    }

    pub fn carver(&self) -> &Carver {
        &self.carver
    }

    pub fn extend_to(&mut self, n: u64) {
        self.carver.extend_to(n);
    }

    pub fn set(&self, n: u64) -> Option<&CantorSet> {
        self.carver.set(n)
    }

    /// The point of `C_set` named by the address.
    pub fn address_point(&self, a: &CantorAddress) -> Result<Rat> {
        if !a.is_canonical() {
            return Err(Error::invalid("address is not in canonical form"));
        }
        let s = self.carver.set(a.set()).ok_or(Error::ExtendFirst {
            index: a.set(),
            materialized: self.horizon() as usize,
        })?;
        let (u, _) = s.base();
        Ok(u + s.base_length() * a.ternary_value())
    }

    pub fn address_to_point(&self, a: &CantorAddress, prec: u32) -> Result<Enclosure> {
        Ok(Enclosure::from_rat(&self.address_point(a)?, prec))
    }

    pub fn eval(&self, x: &Rat, prec: u32) -> Result<MesValue> {
        match self.carver.locate(x) {
            Some((_, a)) => Ok(MesValue {
                value: Some(phi_map(&a, prec)?),
                certainty: Certainty::Exact,
                address: Some(a),
            }),
            None => Ok(MesValue {
                value: None,
                certainty: Certainty::ZeroUpToHorizon,
                address: None,
            }),
        }
    }

    /// Finds a point of `iv` where `f` takes the value `y` (to `2^-prec`).
    ///
    /// Scans the enumeration for the first `I_k ⊆ iv`, carving as needed,
    /// and pulls `y` back through the bijection on `C_k`.
    pub fn surjectivity_witness(
        &mut self,
        iv: &RationalInterval,
        y: &Rat,
        prec: u32,
        budget: u64,
    ) -> Result<Witness> {
        let k = self.first_inside(iv, budget)?;
        self.extend_to(k);
        let a = phi_inverse(k, y, prec)?;
        let point = self.address_point(&a)?;
        let got = self.eval(&point, prec)?;
        if got.certainty != Certainty::Exact || got.address.as_ref().map(|b| b.set()) != Some(k) {
            return Err(Error::invalid("witness point failed to evaluate in its own set"));
        }
        let value = got.enclosure(prec);
        Ok(Witness::new(iv, y, k, &a, point, value))
    }

    fn first_inside(&mut self, iv: &RationalInterval, budget: u64) -> Result<u64> {
        if let Some(k) = self.carver.first_carved_inside(iv, 1) {
            return Ok(k);
        }
        let mut k = self.horizon() + 1;
        while k <= budget {
            if enumerate_interval(k)?.is_subset_of(iv) {
                return Ok(k);
            }
            k += 1;
        }
        Err(Error::budget(
            budget,
            format!("no enumerated interval inside {iv} among the first {budget}"),
        ))
    }
}

/// Serializable record of a surjectivity witness.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub interval: RationalInterval,
    #[serde(with = "crate::numkernel::serde_rat")]
    pub target: Rat,
    pub set_index: u64,
    pub address_prefix: String,
    #[serde(with = "crate::numkernel::serde_rat")]
    pub point: Rat,
    pub verified_value: String,
    pub radius: String,
    #[serde(skip)]
    pub address: CantorAddress,
    #[serde(skip)]
    pub value: Enclosure,
}

impl Witness {
    fn new(
        iv: &RationalInterval,
        y: &Rat,
        k: u64,
        a: &CantorAddress,
        point: Rat,
        value: Enclosure,
    ) -> Self {
        let shown: String = a.code_string().chars().take(48).collect();
        Witness {
            interval: iv.clone(),
            target: y.clone(),
            set_index: k,
            address_prefix: shown,
            point,
            verified_value: value.mid_decimal(20),
            radius: format!("{:.3e}", value.rad_f64()),
            address: a.clone(),
            value,
        }
    }

    /// `|value − target|` bounded above using the enclosure.
    pub fn error_bound(&self) -> Rat {
        let lo = rat_abs(&(self.value.lower_rat() - &self.target));
        let hi = rat_abs(&(self.value.upper_rat() - &self.target));
        if lo > hi {
            lo
        } else {
            hi
        }
    }

    pub fn within(&self, log2_tol: i64) -> bool {
        self.error_bound() <= pow2(log2_tol)
    }
}

/// `g ∘ f` for an exponential sum `g`.
#[derive(Debug, Clone)]
pub struct Lineable {
    pub g: ExpSum,
}

#[derive(Debug, Clone, Serialize)]
pub struct LineableWitness {
    pub inner: Witness,
    pub composed_value: String,
    pub composed_radius: String,
    #[serde(skip)]
    pub composed: Enclosure,
}

impl Lineable {
    pub fn new(g: ExpSum) -> Self {
        Lineable { g }
    }

    pub fn eval(&self, f: &MesFunction, x: &Rat, prec: u32) -> Result<Enclosure> {
        let v = f.eval(x, prec)?;
        match v.value {
            None => self.g.eval(&Rat::from_integer(0.into()), prec),
            Some(e) => self.g.eval_enclosure(&e, prec),
        }
    }

    /// A point of `iv` where `g ∘ f` takes the value `y`.
    pub fn witness(
        &self,
        f: &mut MesFunction,
        iv: &RationalInterval,
        y: &Rat,
        prec: u32,
        budget: u64,
    ) -> Result<LineableWitness> {
        if self.g.is_zero() {
            return Err(Error::invalid("the zero function is not surjective"));
        }
        let z = self.g.solve_value(y, prec + 32)?;
        let inner = f.surjectivity_witness(iv, &z.mid_rat(), prec + 32, budget)?;
        let composed = self.eval(f, &inner.point, prec)?;
        Ok(LineableWitness {
            composed_value: composed.mid_decimal(20),
            composed_radius: format!("{:.3e}", composed.rad_f64()),
            inner,
            composed,
        })
    }
}

/// The sequence member `h/n`, where `h` is `f` or `g ∘ f`.
#[derive(Debug, Clone)]
pub struct SequenceMember {
    pub g: Option<ExpSum>,
    pub n: u64,
}

impl SequenceMember {
    pub fn new(g: Option<ExpSum>, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("sequence index starts at 1"));
        }
        Ok(SequenceMember { g, n })
    }

    fn base_eval(&self, f: &MesFunction, x: &Rat, prec: u32) -> Result<Enclosure> {
        match &self.g {
            None => Ok(f.eval(x, prec)?.enclosure(prec)),
            Some(g) => Lineable::new(g.clone()).eval(f, x, prec),
        }
    }

    pub fn eval(&self, f: &MesFunction, x: &Rat, prec: u32) -> Result<Enclosure> {
        let v = self.base_eval(f, x, prec)?;
        Ok(v.div_i64(self.n as i64))
    }

    /// A point of `iv` where this member takes the value `y`.
    pub fn witness(
        &self,
        f: &mut MesFunction,
        iv: &RationalInterval,
        y: &Rat,
        prec: u32,
        budget: u64,
    ) -> Result<(Rat, Enclosure)> {
        let scaled = y * Rat::from_integer(self.n.into());
        let point = match &self.g {
            None => f.surjectivity_witness(iv, &scaled, prec + 16, budget)?.point,
            Some(g) => {
                Lineable::new(g.clone())
                    .witness(f, iv, &scaled, prec + 16, budget)?
                    .inner
                    .point
            }
        };
        let v = self.eval(f, &point, prec)?;
        Ok((point, v))
    }
}

/// Human-readable summary of a carved set, for reports.
pub fn describe_set(s: &CantorSet) -> String {
    let (u, v) = s.base();
    format!("C{} = Cantor([{}, {}])", s.index(), rat_to_string(u), rat_to_string(v))
}
