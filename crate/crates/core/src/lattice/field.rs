use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::domain::{LatticeDomain, SiteSet};
use crate::circle::{Clock, Direction, PhaseIndex};
use crate::error::{Error, Result};

/// An admissible spin field `u : Ω ∩ εℤ^d → S_N`.
#[derive(Debug, Clone)]
pub struct SpinField {
    domain: Arc<LatticeDomain>,
    clock: Clock,
    values: Vec<PhaseIndex>,
    frozen: SiteSet,
}

impl SpinField {
    pub fn constant(domain: Arc<LatticeDomain>, n: u32, k: PhaseIndex) -> Result<Self> {
        let clock = Clock::new(n)?;
        PhaseIndex::new(k.0, n)?;
        let len = domain.num_sites();
        Ok(SpinField {
            domain,
            clock,
            values: vec![k; len],
            frozen: SiteSet::empty(len),
        })
    }

    pub fn from_values(
        domain: Arc<LatticeDomain>,
        n: u32,
        values: Vec<PhaseIndex>,
    ) -> Result<Self> {
        let clock = Clock::new(n)?;
        if values.len() != domain.num_sites() {
            return Err(Error::InvalidInput(format!(
                "{} values for {} sites",
                values.len(),
                domain.num_sites()
            )));
        }
        if let Some(bad) = values.iter().find(|k| !clock.contains(**k)) {
            return Err(Error::param(
                "k",
                format!("phase index {} out of range for N = {n}", bad.0),
            ));
        }
        let len = values.len();
        Ok(SpinField {
            domain,
            clock,
            values,
            frozen: SiteSet::empty(len),
        })
    }

    /// Builds a field from a function of the integer site coordinates.
    pub fn from_fn(
        domain: Arc<LatticeDomain>,
        n: u32,
        mut f: impl FnMut(&[i64]) -> PhaseIndex,
    ) -> Result<Self> {
        let values = (0..domain.num_sites())
            .map(|s| f(domain.coords(s)))
            .collect();
        SpinField::from_values(domain, n, values)
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn domain_arc(&self) -> &Arc<LatticeDomain> {
        &self.domain
    }

    pub fn clock(&self) -> &Clock {
        &self.clock
    }

    pub fn n(&self) -> u32 {
        self.clock.n()
    }

    pub fn values(&self) -> &[PhaseIndex] {
        &self.values
    }

    #[inline]
    pub fn get(&self, site: usize) -> PhaseIndex {
        self.values[site]
    }

    /// Overwrites a value; frozen sites are not protected here, solvers skip them.
    #[inline]
    pub fn set(&mut self, site: usize, k: PhaseIndex) {
        debug_assert!(self.clock.contains(k));
        self.values[site] = k;
    }

    pub fn frozen(&self) -> &SiteSet {
        &self.frozen
    }

    pub fn is_frozen(&self, site: usize) -> bool {
        self.frozen.contains(site)
    }

    pub fn set_frozen(&mut self, frozen: SiteSet) -> Result<()> {
        if frozen.universe() != self.values.len() {
            return Err(Error::InvalidInput(
                "frozen set belongs to another domain".into(),
            ));
        }
        self.frozen = frozen;
        Ok(())
    }

    pub fn free_sites(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&s| !self.frozen.contains(s))
            .collect()
    }

    /// Number of sites per phase index.
    pub fn phase_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.clock.n() as usize];
        for k in &self.values {
            counts[k.0 as usize] += 1;
        }
        counts
    }

    /// Histogram of bonds by index distance `k = 0..=N/2`.
    pub fn bond_histogram(&self, region: Option<&SiteSet>) -> Vec<u64> {
        let mut hist = vec![0u64; self.clock.max_steps() as usize + 1];
        for &(a, b) in self.domain.bonds() {
            let (a, b) = (a as usize, b as usize);
            if let Some(r) = region {
                if !(r.contains(a) && r.contains(b)) {
                    continue;
                }
            }
            hist[self.clock.index_distance(self.values[a], self.values[b]) as usize] += 1;
        }
        hist
    }

    pub fn energy(&self, region: Option<&SiteSet>) -> EnergyReport {
        discrete_energy(self, region)
    }
}

/// Where an energy was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "sites")]
pub enum RegionDescriptor {
    Whole,
    Subset(usize),
}

/// Raw energy `E_ε^N(u, A)` and its scaling `N/(2πε) E_ε^N(u, A)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub raw: f64,
    pub scaled: f64,
    pub bond_count: usize,
    pub region: RegionDescriptor,
}

/// Converts a bond histogram into the raw energy `ε^d Σ_k count_k · 4 sin²(kθ/2)`.
pub(crate) fn raw_from_histogram(clock: &Clock, eps: f64, d: usize, hist: &[u64]) -> f64 {
    let per_bond: f64 = hist
        .iter()
        .enumerate()
        .map(|(k, &c)| c as f64 * clock.bond_cost(k as u32))
        .sum();
    eps.powi(d as i32) * per_bond
}

/// Scale factor `N/(2πε)`.
pub fn energy_scale(n: u32, eps: f64) -> f64 {
    n as f64 / (TAU * eps)
}

/// `E_ε^N(u, A)` summed once per unordered bond inside `region`.
pub fn discrete_energy(field: &SpinField, region: Option<&SiteSet>) -> EnergyReport {
    let dom = field.domain();
    let hist = field.bond_histogram(region);
    let raw = raw_from_histogram(field.clock(), dom.eps(), dom.dim(), &hist);
    EnergyReport {
        raw,
        scaled: energy_scale(field.n(), dom.eps()) * raw,
        bond_count: hist.iter().sum::<u64>() as usize,
        region: match region {
            None => RegionDescriptor::Whole,
            Some(r) => RegionDescriptor::Subset(r.count()),
        },
    }
}

/// Value of the jump datum `u_ν^{s,r}` at integer site `i`: `s` if `εi·ν > 0`, else `r`.
pub fn jump_datum_value(i: &[i64], s: PhaseIndex, r: PhaseIndex, nu: &Direction) -> PhaseIndex {
    match nu.sign_int(i) {
        Ordering::Greater => s,
        _ => r,
    }
}

/// Writes the jump datum on `layer` and freezes those sites.
pub fn apply_jump_datum(
    field: &SpinField,
    s: PhaseIndex,
    r: PhaseIndex,
    nu: &Direction,
    layer: &SiteSet,
) -> Result<SpinField> {
    let n = field.n();
    PhaseIndex::new(s.0, n)?;
    PhaseIndex::new(r.0, n)?;
    if nu.dim() != field.domain().dim() {
        return Err(Error::param("direction", "dimension mismatch"));
    }
    if layer.universe() != field.values.len() {
        return Err(Error::InvalidInput(
            "layer belongs to another domain".into(),
        ));
    }
    let mut out = field.clone();
    for site in layer.iter() {
        let i = field.domain().coords(site);
        out.values[site] = jump_datum_value(i, s, r, nu);
    }
    out.frozen = out.frozen.union(layer);
    Ok(out)
}
