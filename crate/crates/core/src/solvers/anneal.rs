use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::BondState;
use crate::circle::PhaseIndex;
use crate::error::{Error, Result};
use crate::lattice::SpinField;
use crate::rng::sweep_stream;

/// Geometric cooling schedule for Metropolis annealing.
///
/// Temperatures are in units of the dimensionless bond energy `|Δu|²`.
/// The temperature is lowered by `ratio` in equal blocks of sweeps so that
/// the whole range `t_initial → t_final` is covered within `sweeps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnealSchedule {
    pub t_initial: f64,
    pub t_final: f64,
    pub sweeps: usize,
    pub ratio: f64,
    pub seed: u64,
    pub chains: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            t_initial: 2.0,
            t_final: 0.01,
            sweeps: 256,
            ratio: 0.95,
            seed: 0,
            chains: 32,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_initial > 0.0 && self.t_initial.is_finite()) {
            return Err(Error::param("t_initial", "must be > 0"));
        }
        if !(self.t_final > 0.0 && self.t_final <= self.t_initial) {
            return Err(Error::param("t_final", "must be in (0, t_initial]"));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::param("ratio", "must be in (0, 1)"));
        }
        if self.sweeps == 0 {
            return Err(Error::param("sweeps", "must be >= 1"));
        }
        if self.chains == 0 {
            return Err(Error::param("chains", "must be >= 1"));
        }
        Ok(())
    }

    /// Number of distinct temperature levels.
    pub fn levels(&self) -> usize {
        let steps = ((self.t_final / self.t_initial).ln() / self.ratio.ln()).ceil();
        steps.max(0.0) as usize + 1
    }

    /// Temperature during sweep `s`.
    pub fn temperature(&self, sweep: usize) -> f64 {
        let per_level = (self.sweeps / self.levels()).max(1);
        let level = (sweep / per_level) as i32;
        (self.t_initial * self.ratio.powi(level)).max(self.t_final)
    }
}

/// Best configuration over all chains.
#[derive(Debug, Clone)]
pub struct Annealed {
    /// Best scaled energy found.
    pub energy: f64,
    pub field: SpinField,
    /// Chain that found it (lowest index on ties).
    pub chain: usize,
    /// Best energy of every chain.
    pub chain_energies: Vec<f64>,
    pub accepted: u64,
    pub proposed: u64,
}

struct ChainOutcome {
    best: f64,
    values: Vec<u32>,
    accepted: u64,
    proposed: u64,
}

#[inline]
fn metropolis(delta: f64, t: f64, u: f64) -> bool {
    delta <= 0.0 || u < (-delta / t).exp()
}

fn merge(field: &SpinField, outcomes: Vec<ChainOutcome>) -> Annealed {
    let chain_energies: Vec<f64> = outcomes.iter().map(|o| o.best).collect();
    let mut chain = 0;
    for (c, &e) in chain_energies.iter().enumerate() {
        if e < chain_energies[chain] {
            chain = c;
        }
    }
    let mut out = field.clone();
    for (site, &v) in outcomes[chain].values.iter().enumerate() {
        out.set(site, PhaseIndex(v));
    }
    Annealed {
        energy: chain_energies[chain],
        field: out,
        chain,
        chain_energies,
        accepted: outcomes.iter().map(|o| o.accepted).sum(),
        proposed: outcomes.iter().map(|o| o.proposed).sum(),
    }
}

/// Single-spin Metropolis annealing. Each move picks a uniform free site and
/// proposes, with equal probability, one step up, one step down, or a uniform
/// phase. Chains run independently; the best configuration seen at the end
/// of any sweep (or the initial field) is returned.
pub fn anneal_glauber(field: &SpinField, schedule: &AnnealSchedule) -> Result<Annealed> {
    schedule.validate()?;
    let free = field.free_sites();
    let base = BondState::new(field);
    let clock = field.clock();
    let n = field.n();
    let outcomes: Vec<ChainOutcome> = (0..schedule.chains)
        .into_par_iter()
        .map(|chain| {
            let mut st = base.clone();
            let mut best = st.scaled(clock);
            let mut best_values = st.values.clone();
            let (mut accepted, mut proposed) = (0u64, 0u64);
            if free.is_empty() {
                return ChainOutcome {
                    best,
                    values: best_values,
                    accepted,
                    proposed,
                };
            }
            for sweep in 0..schedule.sweeps {
                let t = schedule.temperature(sweep);
                let mut rng = sweep_stream(schedule.seed, chain as u64, sweep as u64);
                for _ in 0..free.len() {
                    let site = free[rng.random_range(0..free.len())];
                    let old = st.values[site];
                    let new = match rng.random_range(0..3u8) {
                        0 => (old + 1) % n,
                        1 => (old + n - 1) % n,
                        _ => rng.random_range(0..n),
                    };
                    let u: f64 = rng.random();
                    proposed += 1;
                    if new == old {
                        continue;
                    }
                    if metropolis(st.delta(site, new), t, u) {
                        st.set(site, new);
                        accepted += 1;
                    }
                }
                let e = st.scaled(clock);
                if e < best {
                    best = e;
                    best_values.copy_from_slice(&st.values);
                }
            }
            ChainOutcome {
                best,
                values: best_values,
                accepted,
                proposed,
            }
        })
        .collect();
    Ok(merge(field, outcomes))
}

/// Checks that `counts` is a feasible phase-count target for `field`.
pub(crate) fn check_counts(field: &SpinField, counts: &[usize], require_match: bool) -> Result<()> {
    let n = field.n() as usize;
    if counts.len() != n {
        return Err(Error::param(
            "counts",
            format!("expected {n} entries, got {}", counts.len()),
        ));
    }
    let total: usize = counts.iter().sum();
    if total != field.domain().num_sites() {
        return Err(Error::param(
            "counts",
            format!(
                "counts sum to {total} but the domain has {} sites",
                field.domain().num_sites()
            ),
        ));
    }
    let mut frozen = vec![0usize; n];
    for s in field.frozen().iter() {
        frozen[field.get(s).0 as usize] += 1;
    }
    if let Some(k) = (0..n).find(|&k| frozen[k] > counts[k]) {
        return Err(Error::param(
            "counts",
            format!(
                "{} frozen sites already hold phase {k}, target is {}",
                frozen[k], counts[k]
            ),
        ));
    }
    if require_match && field.phase_counts() != counts {
        return Err(Error::param(
            "counts",
            "initial field does not satisfy the phase counts",
        ));
    }
    Ok(())
}

/// Rounds volume fractions `V_k` to site counts summing to `sites`
/// (largest remainders, lowest phase first on ties).
pub fn counts_from_fractions(fractions: &[f64], sites: usize) -> Result<Vec<usize>> {
    if fractions.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::param("volume", "fractions must be >= 0"));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::param(
            "volume",
            format!("fractions sum to {total}, not 1"),
        ));
    }
    let exact: Vec<f64> = fractions.iter().map(|v| v * sites as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let mut missing = sites - counts.iter().sum::<usize>();
    for k in order {
        if missing == 0 {
            break;
        }
        counts[k] += 1;
        missing -= 1;
    }
    Ok(counts)
}

/// Copy of `field` whose free sites receive uniform random phases.
pub fn randomize_free(field: &SpinField, seed: u64) -> SpinField {
    let mut rng = sweep_stream(seed, u64::MAX, 0);
    let mut out = field.clone();
    for site in field.free_sites() {
        out.set(site, PhaseIndex(rng.random_range(0..field.n())));
    }
    out
}

/// Copy of `field` whose free sites are a random arrangement meeting `counts`.
pub fn random_with_counts(field: &SpinField, counts: &[usize], seed: u64) -> Result<SpinField> {
    check_counts(field, counts, false)?;
    let mut remaining = counts.to_vec();
    for s in field.frozen().iter() {
        remaining[field.get(s).0 as usize] -= 1;
    }
    let mut pool: Vec<u32> = remaining
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| std::iter::repeat_n(k as u32, c))
        .collect();
    let mut rng = sweep_stream(seed, u64::MAX, 1);
    // Fisher-Yates
    for i in (1..pool.len()).rev() {
        let j = rng.random_range(0..=i);
        pool.swap(i, j);
    }
    let mut out = field.clone();
    for (site, v) in field.free_sites().into_iter().zip(pool) {
        out.set(site, PhaseIndex(v));
    }
    Ok(out)
}

/// Count-preserving Metropolis annealing: each move swaps the phases of two
/// uniformly chosen free sites with different phases (any distance apart).
pub fn anneal_kawasaki(
    field: &SpinField,
    counts: &[usize],
    schedule: &AnnealSchedule,
) -> Result<Annealed> {
    schedule.validate()?;
    check_counts(field, counts, true)?;
    let free = field.free_sites();
    let base = BondState::new(field);
    let clock = field.clock();
    let movable = {
        let first = free.first().map(|&s| field.get(s));
        free.iter().any(|&s| Some(field.get(s)) != first)
    };
    let outcomes: Vec<ChainOutcome> = (0..schedule.chains)
        .into_par_iter()
        .map(|chain| {
            let mut st = base.clone();
            let mut best = st.scaled(clock);
            let mut best_values = st.values.clone();
            let (mut accepted, mut proposed) = (0u64, 0u64);
            if !movable {
                return ChainOutcome {
                    best,
                    values: best_values,
                    accepted,
                    proposed,
                };
            }
            for sweep in 0..schedule.sweeps {
                let t = schedule.temperature(sweep);
                let mut rng = sweep_stream(schedule.seed, chain as u64, sweep as u64);
                for _ in 0..free.len() {
                    let a = free[rng.random_range(0..free.len())];
                    let b = free[rng.random_range(0..free.len())];
                    let u: f64 = rng.random();
                    proposed += 1;
                    let (va, vb) = (st.values[a], st.values[b]);
                    if va == vb {
                        continue;
                    }
                    // sequential deltas stay exact when a and b are neighbours
                    let da = st.delta(a, vb);
                    st.set(a, vb);
                    let db = st.delta(b, va);
                    if metropolis(da + db, t, u) {
                        st.set(b, va);
                        accepted += 1;
                    } else {
                        st.set(a, va);
                    }
                }
                debug_assert_eq!(
                    {
                        let mut c = vec![0usize; counts.len()];
                        for &v in &st.values {
                            c[v as usize] += 1;
                        }
                        c
                    },
                    counts
                );
                let e = st.scaled(clock);
                if e < best {
                    best = e;
                    best_values.copy_from_slice(&st.values);
                }
            }
            ChainOutcome {
                best,
                values: best_values,
                accepted,
                proposed,
            }
        })
        .collect();
    Ok(merge(field, outcomes))
}
