use crate::lattice::{raw_from_histogram, LatticeDomain, SpinField};

/// Mutable copy of a field's values with an integer bond histogram kept in
/// step with every change, so energies of equal configurations are bitwise equal.
#[derive(Debug, Clone)]
pub(crate) struct BondState<'a> {
    pub domain: &'a LatticeDomain,
    pub n: u32,
    pub values: Vec<u32>,
    pub hist: Vec<i64>,
    pub costs: Vec<f64>,
}

impl<'a> BondState<'a> {
    pub fn new(field: &'a SpinField) -> Self {
        let n = field.n();
        let clock = field.clock();
        let costs = (0..=clock.max_steps())
            .map(|k| clock.bond_cost(k))
            .collect();
        let hist = field
            .bond_histogram(None)
            .into_iter()
            .map(|c| c as i64)
            .collect();
        BondState {
            domain: field.domain(),
            n,
            values: field.values().iter().map(|k| k.0).collect(),
            hist,
            costs,
        }
    }

    #[inline]
    pub fn dist(&self, a: u32, b: u32) -> usize {
        let d = a.abs_diff(b);
        d.min(self.n - d) as usize
    }

    /// Change of `Σ |Δu|²` if `site` took value `new`.
    #[inline]
    pub fn delta(&self, site: usize, new: u32) -> f64 {
        let old = self.values[site];
        let mut e = 0.0;
        for &nb in self.domain.neighbors(site) {
            let v = self.values[nb as usize];
            e += self.costs[self.dist(new, v)] - self.costs[self.dist(old, v)];
        }
        e
    }

    #[inline]
    pub fn set(&mut self, site: usize, new: u32) {
        let old = self.values[site];
        if old == new {
            return;
        }
        for &nb in self.domain.neighbors(site) {
            let v = self.values[nb as usize];
            let (a, b) = (self.dist(old, v), self.dist(new, v));
            self.hist[a] -= 1;
            self.hist[b] += 1;
        }
        self.values[site] = new;
    }

    /// `N/(2πε) E_ε^N` of the current configuration.
    pub fn scaled(&self, clock: &crate::circle::Clock) -> f64 {
        let hist: Vec<u64> = self.hist.iter().map(|&c| c as u64).collect();
        let raw = raw_from_histogram(clock, self.domain.eps(), self.domain.dim(), &hist);
        crate::lattice::energy_scale(self.n, self.domain.eps()) * raw
    }
}
