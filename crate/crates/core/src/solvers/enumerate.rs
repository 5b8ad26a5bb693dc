use rayon::prelude::*;

use super::state::BondState;
use crate::circle::PhaseIndex;
use crate::error::{Error, Result};
use crate::lattice::SpinField;

/// Largest search space, in bits, that exhaustive enumeration accepts.
pub const MAX_SEARCH_BITS: u32 = 26;

#[derive(Debug, Clone)]
pub struct Enumerated {
    /// Minimal scaled energy `N/(2πε) E_ε^N`.
    pub energy: f64,
    pub argmin: SpinField,
    /// Configurations visited.
    pub configurations: u64,
    /// Configurations satisfying the phase-count constraint (all when unconstrained).
    pub feasible: u64,
}

fn check_size(field: &SpinField, free: usize) -> Result<u32> {
    let n = field.n();
    let bits = free as f64 * (n as f64).log2();
    if bits > MAX_SEARCH_BITS as f64 + 1e-9 {
        return Err(Error::SearchTooLarge {
            free_sites: free,
            states: n,
            bits,
            limit: MAX_SEARCH_BITS,
        });
    }
    Ok(bits.round() as u32)
}

/// Exact minimum of the scaled energy over all values of the free sites.
pub fn enumerate_min(field: &SpinField) -> Result<Enumerated> {
    enumerate_inner(field, None)
}

/// Exact minimum over configurations with `#{u = k}` equal to `counts[k]`
/// for every phase (counted over all sites, frozen ones included).
pub fn enumerate_min_with_counts(field: &SpinField, counts: &[usize]) -> Result<Enumerated> {
    super::check_counts(field, counts, false)?;
    enumerate_inner(field, Some(counts))
}

fn enumerate_inner(field: &SpinField, counts: Option<&[usize]>) -> Result<Enumerated> {
    let free = field.free_sites();
    check_size(field, free.len())?;
    let n = field.n() as usize;

    // leading free sites are fixed per task; the rest run through an odometer
    let mut prefix_len = 0;
    while prefix_len < free.len() && n.pow(prefix_len as u32) < 256 {
        prefix_len += 1;
    }
    let (prefix, suffix) = free.split_at(prefix_len);
    let tasks = n.pow(prefix_len as u32);

    let base = BondState::new(field);
    let clock = field.clock();
    let partial: Vec<(f64, Vec<u32>, u64, u64)> = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let mut st = base.clone();
            let mut c = task;
            for &site in prefix {
                st.set(site, (c % n) as u32);
                c /= n;
            }
            for &site in suffix {
                st.set(site, 0);
            }
            let mut tally = counts.map(|_| {
                let mut t = vec![0usize; n];
                for &v in &st.values {
                    t[v as usize] += 1;
                }
                t
            });
            let mut best = f64::INFINITY;
            let mut best_values = Vec::new();
            let (mut visited, mut feasible) = (0u64, 0u64);
            loop {
                visited += 1;
                let ok = match (counts, &tally) {
                    (Some(target), Some(t)) => t.as_slice() == target,
                    _ => true,
                };
                if ok {
                    feasible += 1;
                    let e = st.scaled(clock);
                    if e < best {
                        best = e;
                        best_values = st.values.clone();
                    }
                }
                let mut j = 0;
                loop {
                    if j == suffix.len() {
                        return (best, best_values, visited, feasible);
                    }
                    let site = suffix[j];
                    let old = st.values[site];
                    let new = if old as usize + 1 == n { 0 } else { old + 1 };
                    st.set(site, new);
                    if let Some(t) = tally.as_mut() {
                        t[old as usize] -= 1;
                        t[new as usize] += 1;
                    }
                    if new != 0 {
                        break;
                    }
                    j += 1;
                }
            }
        })
        .collect();

    let mut best: Option<(f64, Vec<u32>)> = None;
    let (mut visited, mut feasible) = (0, 0);
    for (e, values, v, f) in partial {
        visited += v;
        feasible += f;
        if !values.is_empty() && best.as_ref().is_none_or(|b| e < b.0) {
            best = Some((e, values));
        }
    }
    let (energy, values) =
        best.ok_or_else(|| Error::param("counts", "no configuration meets the phase counts"))?;
    let mut argmin = field.clone();
    for (site, v) in values.into_iter().enumerate() {
        argmin.set(site, PhaseIndex(v));
    }
    Ok(Enumerated {
        energy,
        argmin,
        configurations: visited,
        feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::Direction;
    use crate::lattice::{apply_jump_datum, discrete_energy, LatticeDomain, SiteSet};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn frozen_only_field() {
        let dom = Arc::new(LatticeDomain::grid(0.5, &[0, 0], &[2, 2], &[]).unwrap());
        let mut f = SpinField::from_fn(dom, 3, |i| PhaseIndex(i[0] as u32)).unwrap();
        f.set_frozen(SiteSet::full(4)).unwrap();
        let r = enumerate_min(&f).unwrap();
        assert_eq!(r.energy, discrete_energy(&f, None).scaled);
        assert_eq!(r.configurations, 1);
    }

    #[test]
    fn cell_problem_n2() {
        let eps = 0.125;
        let nu = Direction::axis(2, 1).unwrap();
        let dom = Arc::new(LatticeDomain::unit_cube(eps, &nu).unwrap());
        let layer = dom.boundary_layer(2.0 * eps);
        let f = SpinField::constant(dom, 2, PhaseIndex(0)).unwrap();
        let f = apply_jump_datum(&f, PhaseIndex(1), PhaseIndex(0), &nu, &layer).unwrap();
        let r = enumerate_min(&f).unwrap();
        assert_eq!(r.configurations, 512);
        // seven cut bonds of the straight interface between rows 0 and 1
        assert!((r.energy - 3.5 / PI).abs() < 1e-12);
        assert_eq!(discrete_energy(&r.argmin, None).scaled, r.energy);

        let same = apply_jump_datum(&f, PhaseIndex(1), PhaseIndex(1), &nu, &layer).unwrap();
        let r = enumerate_min(&same).unwrap();
        assert_eq!(r.energy, 0.0);
        assert!(r.argmin.values().iter().all(|&k| k == PhaseIndex(1)));
    }

    #[test]
    fn refuses_large_searches() {
        let dom = Arc::new(LatticeDomain::grid(0.1, &[0, 0], &[6, 5], &[]).unwrap());
        let f = SpinField::constant(dom, 2, PhaseIndex(0)).unwrap();
        match enumerate_min(&f) {
            Err(Error::SearchTooLarge { free_sites, .. }) => assert_eq!(free_sites, 30),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn volume_constrained_4x4() {
        let dom = Arc::new(LatticeDomain::grid(0.25, &[0, 0], &[4, 4], &[]).unwrap());
        let f = SpinField::from_fn(dom, 2, |i| PhaseIndex((i[0] >= 2) as u32)).unwrap();
        let r = enumerate_min_with_counts(&f, &[8, 8]).unwrap();
        assert_eq!(r.feasible, 12870);
        assert!((r.energy - 4.0 / PI).abs() < 1e-12);
        assert_eq!(r.argmin.phase_counts(), vec![8, 8]);
    }
}
