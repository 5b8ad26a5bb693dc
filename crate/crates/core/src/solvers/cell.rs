use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::anneal::{anneal_glauber, randomize_free, AnnealSchedule};
use super::enumerate::enumerate_min;
use crate::circle::{Clock, Direction, PhaseIndex};
use crate::constructions::{staircase_energy, StaircaseSpec};
use crate::error::{Error, Result};
use crate::lattice::{apply_jump_datum, discrete_energy, LatticeDomain, SiteSet, SpinField};
use crate::rng::derive_seed;

/// `Σ_bonds prefactor(N) · d_{S¹}(u_i, u_j) · ε^{d−1}`: the scaled per-bond
/// lower bound that follows from `sin²(kθ/2) ≥ k sin²(θ/2)`.
pub fn bond_lower_bound_energy(field: &SpinField, region: Option<&SiteSet>) -> f64 {
    let clock = field.clock();
    let dom = field.domain();
    let hist = field.bond_histogram(region);
    let steps: u64 = hist.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
    clock.prefactor() * clock.theta() * steps as f64 * dom.eps().powi(dom.dim() as i32 - 1)
}

/// How the cell problem is minimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum CellMethod {
    Enumerate,
    Anneal(AnnealSchedule),
    /// Exact minimum over configurations with one phase per lattice
    /// hyperplane orthogonal to an axis-aligned `ν`; an upper bound.
    DpReduction,
}

impl CellMethod {
    pub fn name(&self) -> &'static str {
        match self {
            CellMethod::Enumerate => "enumerate",
            CellMethod::Anneal(_) => "anneal",
            CellMethod::DpReduction => "dp-reduction",
        }
    }
}

/// Data of the cell problem on `Q_ν` with the jump datum `u_ν^{s,r}` frozen
/// on the `2ε` boundary layer.
#[derive(Debug, Clone)]
pub struct CellProblemSpec {
    pub s: PhaseIndex,
    pub r: PhaseIndex,
    pub nu: Direction,
    pub eps: f64,
    pub n: u32,
    pub method: CellMethod,
}

impl CellProblemSpec {
    pub fn validate(&self) -> Result<Clock> {
        let clock = Clock::new(self.n)?;
        PhaseIndex::new(self.s.0, self.n)
            .map_err(|_| Error::param("s", format!("must be < N = {}", self.n)))?;
        PhaseIndex::new(self.r.0, self.n)
            .map_err(|_| Error::param("r", format!("must be < N = {}", self.n)))?;
        if !(self.eps > 0.0 && self.eps < 0.25) {
            return Err(Error::param(
                "eps",
                format!("cell problems need 0 < ε < 1/4, got {}", self.eps),
            ));
        }
        if let CellMethod::Anneal(s) = &self.method {
            s.validate()?;
        }
        if self.method == CellMethod::DpReduction && self.nu.axis_index().is_none() {
            return Err(Error::param(
                "method",
                "dp-reduction needs an axis-aligned direction",
            ));
        }
        Ok(clock)
    }

    /// `Q_ν ∩ εℤ^d` with the jump datum frozen on the `2ε` layer; free sites hold `r`.
    pub fn constrained_field(&self) -> Result<SpinField> {
        self.validate()?;
        let dom = Arc::new(LatticeDomain::unit_cube(self.eps, &self.nu)?);
        let layer = dom.boundary_layer(2.0 * self.eps);
        let base = SpinField::constant(dom, self.n, self.r)?;
        apply_jump_datum(&base, self.s, self.r, &self.nu, &layer)
    }
}

/// `φ̂_ε(s, r, ν)` with the sandwich diagnostics.
#[derive(Debug, Clone)]
pub struct CellEstimate {
    pub method: &'static str,
    /// Minimal scaled energy found by the method.
    pub estimate: f64,
    /// Bond lower bound of the returned minimizer.
    pub lower: f64,
    /// Scaled energy of the staircase recovery on the same cube.
    pub upper: f64,
    /// `prefactor(N) · d_{S¹}(s, r) · |ν|₁`.
    pub analytic: f64,
    pub field: SpinField,
    pub free_sites: usize,
    /// Set when the estimate is itself only an upper bound.
    pub layered: bool,
}

pub fn cell_formula_estimate(spec: &CellProblemSpec) -> Result<CellEstimate> {
    let clock = spec.validate()?;
    let field = spec.constrained_field()?;
    let free_sites = field.free_sites().len();
    let (estimate, argmin) = match &spec.method {
        CellMethod::Enumerate => {
            let r = enumerate_min(&field)?;
            (r.energy, r.argmin)
        }
        CellMethod::Anneal(schedule) => {
            let start = randomize_free(&field, derive_seed(schedule.seed, "cell-start"));
            let r = anneal_glauber(&start, schedule)?;
            (r.energy, r.field)
        }
        CellMethod::DpReduction => {
            let f = layered_minimum(&field, spec.nu.axis_index().expect("validated"))?;
            (discrete_energy(&f, None).scaled, f)
        }
    };
    let staircase = StaircaseSpec::new(
        field.domain_arc().clone(),
        spec.n,
        spec.s,
        spec.r,
        spec.nu.clone(),
    )?;
    let upper = staircase_energy(&staircase)?.total.scaled;
    Ok(CellEstimate {
        method: spec.method.name(),
        estimate,
        lower: bond_lower_bound_energy(&argmin, None),
        upper,
        analytic: clock.prefactor() * clock.geodesic_distance(spec.s, spec.r) * spec.nu.norm_1(),
        field: argmin,
        free_sites,
        layered: spec.method == CellMethod::DpReduction,
    })
}

/// Exact minimum over fields whose free sites take one phase per hyperplane
/// `i_axis = const`, by dynamic programming across the hyperplanes.
pub fn layered_minimum(field: &SpinField, axis: usize) -> Result<SpinField> {
    let dom = field.domain();
    if axis >= dom.dim() {
        return Err(Error::param("axis", "out of range"));
    }
    let clock = field.clock();
    let n = field.n() as usize;
    let lo = dom.origin()[axis];
    let layers = dom.extent()[axis];
    let layer_of = |site: usize| (dom.coords(site)[axis] - lo) as usize;
    let cost = |a: u32, b: u32| clock.bond_cost(clock.index_distance(PhaseIndex(a), PhaseIndex(b)));

    // unary[t][p]: bonds from free sites of layer t to frozen sites
    // pair[t]: free-free bonds between layers t and t+1
    let mut unary = vec![vec![0.0; n]; layers];
    let mut pair = vec![0usize; layers];
    let mut has_free = vec![false; layers];
    for site in field.free_sites() {
        has_free[layer_of(site)] = true;
    }
    for &(a, b) in dom.bonds() {
        let (a, b) = (a as usize, b as usize);
        match (field.is_frozen(a), field.is_frozen(b)) {
            (true, true) => {}
            (false, false) => {
                let (ta, tb) = (layer_of(a), layer_of(b));
                if ta.abs_diff(tb) == 1 {
                    pair[ta.min(tb)] += 1;
                } else if ta != tb {
                    return Err(Error::InvalidInput(
                        "periodic wrap along the layering axis".into(),
                    ));
                }
            }
            (false, true) | (true, false) => {
                let (free, frozen) = if field.is_frozen(a) { (b, a) } else { (a, b) };
                let t = layer_of(free);
                let v = field.get(frozen).0;
                for p in 0..n {
                    unary[t][p] += cost(p as u32, v);
                }
            }
        }
    }
    let active: Vec<usize> = (0..layers).filter(|&t| has_free[t]).collect();
    if active.is_empty() {
        return Ok(field.clone());
    }
    let mut best = unary[active[0]].clone();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(active.len());
    back.push(vec![0; n]);
    for w in active.windows(2) {
        let (prev_t, t) = (w[0], w[1]);
        let coupling = if t == prev_t + 1 { pair[prev_t] } else { 0 };
        let mut next = vec![f64::INFINITY; n];
        let mut arg = vec![0usize; n];
        for q in 0..n {
            for p in 0..n {
                let e = best[p] + coupling as f64 * cost(p as u32, q as u32);
                if e < next[q] {
                    next[q] = e;
                    arg[q] = p;
                }
            }
            next[q] += unary[t][q];
        }
        best = next;
        back.push(arg);
    }
    let mut choice = vec![0usize; active.len()];
    let mut cur = (0..n).fold(0, |m, p| if best[p] < best[m] { p } else { m });
    for j in (0..active.len()).rev() {
        choice[j] = cur;
        cur = back[j][cur];
    }
    let mut phase_of_layer = vec![0usize; layers];
    for (j, &t) in active.iter().enumerate() {
        phase_of_layer[t] = choice[j];
    }
    let mut out = field.clone();
    for site in field.free_sites() {
        out.set(site, PhaseIndex(phase_of_layer[layer_of(site)] as u32));
    }
    Ok(out)
}
