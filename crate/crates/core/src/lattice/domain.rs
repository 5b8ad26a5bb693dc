use std::fmt;
use std::sync::Arc;

use crate::circle::Direction;
use crate::error::{Error, Result};

/// Relative inset (in units of ε) applied to open-set membership tests.
pub const MEMBERSHIP_INSET: f64 = 1e-9;
/// Relative slack (in units of ε) for inclusive distance comparisons.
const DISTANCE_SLACK: f64 = 1e-10;

/// A bounded open set `Ω ⊂ ℝ^d` that lattice sites are drawn from.
pub trait Region: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64], inset: f64) -> bool;
    /// Euclidean distance from an interior point to `∂Ω`.
    fn boundary_distance(&self, x: &[f64]) -> f64;
    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>);
}

/// Shape of a lattice domain.
#[derive(Debug, Clone)]
pub enum Shape {
    /// Open axis-aligned box `∏ (lower_ℓ, upper_ℓ)`.
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// Unit cube `Q_ν` centered at the origin with two faces orthogonal to `ν`.
    Cube(Direction),
    Custom(Arc<dyn Region>),
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Box { lower, .. } => lower.len(),
            Shape::Cube(nu) => nu.dim(),
            Shape::Custom(r) => r.dim(),
        }
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Shape::Box { lower, upper } => (lower.clone(), upper.clone()),
            Shape::Cube(nu) => {
                let h = 0.5 * (nu.dim() as f64).sqrt();
                (vec![-h; nu.dim()], vec![h; nu.dim()])
            }
            Shape::Custom(r) => r.bounding_box(),
        }
    }
}

/// The site set `Ω ∩ εℤ^d` with nearest-neighbour bonds.
///
/// Sites are enumerated lexicographically in their integer coordinates
/// (first axis slowest). Periodic axes are only available on boxes; along
/// such an axis the last site bonds to the first and the axis carries no
/// boundary.
#[derive(Debug, Clone)]
pub struct LatticeDomain {
    d: usize,
    eps: f64,
    shape: Shape,
    frame: Option<Vec<Vec<f64>>>,
    periodic: Vec<bool>,
    lo: Vec<i64>,
    extent: Vec<usize>,
    grid_to_site: Vec<u32>,
    coords: Vec<i64>,
    bonds: Vec<(u32, u32)>,
    adjacency_offsets: Vec<u32>,
    adjacency: Vec<u32>,
}

const NO_SITE: u32 = u32::MAX;

impl LatticeDomain {
    pub fn new(eps: f64, shape: Shape, periodic: Vec<bool>) -> Result<Self> {
        let d = shape.dim();
        if d < 2 {
            return Err(Error::param(
                "d",
                format!("dimension must be >= 2, got {d}"),
            ));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::param(
                "eps",
                format!("lattice spacing must be > 0, got {eps}"),
            ));
        }
        let periodic = if periodic.is_empty() {
            vec![false; d]
        } else {
            periodic
        };
        if periodic.len() != d {
            return Err(Error::param("periodic", "one flag per axis expected"));
        }
        if periodic.iter().any(|&p| p) && !matches!(shape, Shape::Box { .. }) {
            return Err(Error::param(
                "periodic",
                "periodic axes require a box shape",
            ));
        }
        if let Shape::Box { lower, upper } = &shape {
            if upper.len() != d || lower.iter().zip(upper).any(|(a, b)| !(a < b)) {
                return Err(Error::param(
                    "shape",
                    "box needs lower < upper on every axis",
                ));
            }
        }
        let frame = match &shape {
            Shape::Cube(nu) => Some(nu.orthonormal_frame()),
            _ => None,
        };

        let (lower, upper) = shape.bounding_box();
        let cand_lo: Vec<i64> = lower.iter().map(|a| (a / eps).floor() as i64 - 1).collect();
        let cand_hi: Vec<i64> = upper.iter().map(|b| (b / eps).ceil() as i64 + 1).collect();

        let mut probe = LatticeDomain {
            d,
            eps,
            shape,
            frame,
            periodic,
            lo: Vec::new(),
            extent: Vec::new(),
            grid_to_site: Vec::new(),
            coords: Vec::new(),
            bonds: Vec::new(),
            adjacency_offsets: Vec::new(),
            adjacency: Vec::new(),
        };

        let mut members: Vec<i64> = Vec::new();
        let mut i = cand_lo.clone();
        let mut x = vec![0.0; d];
        'outer: loop {
            for l in 0..d {
                x[l] = eps * i[l] as f64;
            }
            if probe.contains_point(&x) {
                members.extend_from_slice(&i);
            }
            for l in (0..d).rev() {
                i[l] += 1;
                if i[l] <= cand_hi[l] {
                    continue 'outer;
                }
                i[l] = cand_lo[l];
            }
            break;
        }
        if members.is_empty() {
            return Err(Error::InvalidInput(
                "domain contains no lattice sites".into(),
            ));
        }
        let n_sites = members.len() / d;
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for s in 0..n_sites {
            for l in 0..d {
                lo[l] = lo[l].min(members[s * d + l]);
                hi[l] = hi[l].max(members[s * d + l]);
            }
        }
        probe.extent = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| (b - a + 1) as usize)
            .collect();
        probe.lo = lo;
        probe.coords = members;
        probe.index_sites()?;
        Ok(probe)
    }

    /// Full rectangular block of sites `lo_ℓ ≤ i_ℓ < lo_ℓ + extent_ℓ`.
    pub fn grid(eps: f64, lo: &[i64], extent: &[usize], periodic: &[bool]) -> Result<Self> {
        if lo.len() != extent.len() || extent.contains(&0) {
            return Err(Error::param(
                "extent",
                "one positive extent per axis expected",
            ));
        }
        let lower = lo.iter().map(|&a| eps * (a as f64 - 0.5)).collect();
        let upper = lo
            .iter()
            .zip(extent)
            .map(|(&a, &e)| eps * (a as f64 + e as f64 - 0.5))
            .collect();
        LatticeDomain::new(eps, Shape::Box { lower, upper }, periodic.to_vec())
    }

    /// `Q_ν ∩ εℤ^d`.
    pub fn unit_cube(eps: f64, nu: &Direction) -> Result<Self> {
        LatticeDomain::new(eps, Shape::Cube(nu.clone()), Vec::new())
    }

    /// Lattice sites inside an arbitrary region.
    pub fn from_region(eps: f64, region: Arc<dyn Region>) -> Result<Self> {
        LatticeDomain::new(eps, Shape::Custom(region), Vec::new())
    }

    fn index_sites(&mut self) -> Result<()> {
        let d = self.d;
        let n_sites = self.coords.len() / d;
        let grid_len: usize = self.extent.iter().product();
        if n_sites >= NO_SITE as usize || grid_len > (1 << 31) {
            return Err(Error::InvalidInput("lattice too large".into()));
        }
        self.grid_to_site = vec![NO_SITE; grid_len];
        for s in 0..n_sites {
            let g = self
                .grid_index(&self.coords[s * d..(s + 1) * d])
                .expect("site inside grid");
            self.grid_to_site[g] = s as u32;
        }

        let mut bonds = Vec::new();
        let mut nb = vec![0i64; d];
        for s in 0..n_sites {
            for l in 0..d {
                nb.copy_from_slice(&self.coords[s * d..(s + 1) * d]);
                nb[l] += 1;
                let mut t = self.site_at(&nb);
                if t.is_none() && self.periodic[l] {
                    nb[l] = self.lo[l];
                    t = self.site_at(&nb);
                }
                if let Some(t) = t {
                    if t != s {
                        bonds.push((s as u32, t as u32));
                    }
                }
            }
        }
        let mut degree = vec![0u32; n_sites + 1];
        for &(a, b) in &bonds {
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
        }
        for s in 0..n_sites {
            degree[s + 1] += degree[s];
        }
        let mut fill = degree.clone();
        let mut adjacency = vec![0u32; bonds.len() * 2];
        for &(a, b) in &bonds {
            adjacency[fill[a as usize] as usize] = b;
            fill[a as usize] += 1;
            adjacency[fill[b as usize] as usize] = a;
            fill[b as usize] += 1;
        }
        self.bonds = bonds;
        self.adjacency_offsets = degree;
        self.adjacency = adjacency;
        Ok(())
    }

    fn grid_index(&self, i: &[i64]) -> Option<usize> {
        let mut g = 0usize;
        for l in 0..self.d {
            let off = i[l] - self.lo[l];
            if off < 0 || off as usize >= self.extent[l] {
                return None;
            }
            g = g * self.extent[l] + off as usize;
        }
        Some(g)
    }

    fn contains_point(&self, x: &[f64]) -> bool {
        let inset = MEMBERSHIP_INSET * self.eps;
        match &self.shape {
            Shape::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&xi, (&a, &b))| a + inset < xi && xi < b - inset),
            Shape::Cube(_) => {
                let frame = self.frame.as_ref().expect("cube frame");
                frame.iter().all(|b| {
                    let p: f64 = b.iter().zip(x).map(|(u, v)| u * v).sum();
                    p.abs() < 0.5 - inset
                })
            }
            Shape::Custom(r) => r.contains(x, inset),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    /// Smallest integer coordinate per axis.
    pub fn origin(&self) -> &[i64] {
        &self.lo
    }

    /// Number of integer positions per axis in the bounding block.
    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn num_sites(&self) -> usize {
        self.coords.len() / self.d
    }

    /// Whether every position of the bounding block is a site.
    pub fn is_full_grid(&self) -> bool {
        self.num_sites() == self.grid_to_site.len()
    }

    pub fn coords(&self, site: usize) -> &[i64] {
        &self.coords[site * self.d..(site + 1) * self.d]
    }

    pub fn position(&self, site: usize) -> Vec<f64> {
        self.coords(site)
            .iter()
            .map(|&i| self.eps * i as f64)
            .collect()
    }

    /// Site index at integer coordinates `i`, if it belongs to the domain.
    pub fn site_at(&self, i: &[i64]) -> Option<usize> {
        self.grid_index(i)
            .map(|g| self.grid_to_site[g])
            .filter(|&s| s != NO_SITE)
            .map(|s| s as usize)
    }

    /// Index into the bounding block, row-major.
    pub fn grid_position(&self, site: usize) -> usize {
        self.grid_index(self.coords(site))
            .expect("site inside grid")
    }

    pub fn grid_len(&self) -> usize {
        self.grid_to_site.len()
    }

    /// All unordered nearest-neighbour pairs, each exactly once.
    pub fn bonds(&self) -> &[(u32, u32)] {
        &self.bonds
    }

    /// Neighbours of a site (with multiplicity on two-site periodic axes).
    #[inline]
    pub fn neighbors(&self, site: usize) -> &[u32] {
        let a = self.adjacency_offsets[site] as usize;
        let b = self.adjacency_offsets[site + 1] as usize;
        &self.adjacency[a..b]
    }

    /// Euclidean distance from site position to `∂Ω`; periodic axes carry no boundary.
    pub fn boundary_distance(&self, site: usize) -> f64 {
        let x = self.position(site);
        match &self.shape {
            Shape::Box { lower, upper } => (0..self.d)
                .filter(|&l| !self.periodic[l])
                .map(|l| (x[l] - lower[l]).min(upper[l] - x[l]))
                .fold(f64::INFINITY, f64::min),
            Shape::Cube(_) => {
                let frame = self.frame.as_ref().expect("cube frame");
                let m = frame
                    .iter()
                    .map(|b| b.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>().abs())
                    .fold(0.0, f64::max);
                0.5 - m
            }
            Shape::Custom(r) => r.boundary_distance(&x),
        }
    }

    /// Sites within `width` of the boundary (inclusive).
    pub fn boundary_layer(&self, width: f64) -> SiteSet {
        let slack = DISTANCE_SLACK * self.eps;
        let mut set = SiteSet::empty(self.num_sites());
        for s in 0..self.num_sites() {
            if self.boundary_distance(s) <= width + slack {
                set.insert(s);
            }
        }
        set
    }

    /// Bonds with both endpoints in `region` (all bonds when `None`).
    pub fn enumerate_bonds(&self, region: Option<&SiteSet>) -> Vec<(usize, usize)> {
        self.bonds
            .iter()
            .map(|&(a, b)| (a as usize, b as usize))
            .filter(|&(a, b)| region.is_none_or(|r| r.contains(a) && r.contains(b)))
            .collect()
    }
}

/// Free-standing form of [`LatticeDomain::boundary_layer`].
pub fn boundary_layer(domain: &LatticeDomain, width: f64) -> Result<SiteSet> {
    if !(width >= 0.0) {
        return Err(Error::param("width", "must be >= 0"));
    }
    Ok(domain.boundary_layer(width))
}

/// Free-standing form of [`LatticeDomain::enumerate_bonds`].
pub fn enumerate_bonds(domain: &LatticeDomain, region: Option<&SiteSet>) -> Vec<(usize, usize)> {
    domain.enumerate_bonds(region)
}

/// A subset of the sites of one domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteSet {
    members: Vec<bool>,
}

impl SiteSet {
    pub fn empty(n: usize) -> Self {
        SiteSet {
            members: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        SiteSet {
            members: vec![true; n],
        }
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = SiteSet::empty(n);
        for i in indices {
            if i >= n {
                return Err(Error::InvalidInput(format!(
                    "site index {i} out of range ({n} sites)"
                )));
            }
            set.insert(i);
        }
        Ok(set)
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn insert(&mut self, i: usize) {
        self.members[i] = true;
    }

    pub fn remove(&mut self, i: usize) {
        self.members[i] = false;
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn is_subset(&self, other: &SiteSet) -> bool {
        self.members.len() == other.members.len()
            && self
                .members
                .iter()
                .zip(&other.members)
                .all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &SiteSet) -> SiteSet {
        SiteSet {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| a || b)
                .collect(),
        }
    }

    pub fn complement(&self) -> SiteSet {
        SiteSet {
            members: self.members.iter().map(|&m| !m).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bond_counts() {
        let d = LatticeDomain::grid(1.0, &[0, 0], &[2, 2], &[]).unwrap();
        assert_eq!(d.num_sites(), 4);
        assert_eq!(enumerate_bonds(&d, None).len(), 4);

        let d = LatticeDomain::grid(1.0, &[0, 0], &[3, 3], &[]).unwrap();
        assert_eq!(d.bonds().len(), 12);

        let d = LatticeDomain::grid(1.0, &[0, 0], &[2, 2], &[true, true]).unwrap();
        assert_eq!(d.bonds().len(), 8);
        for s in 0..4 {
            assert_eq!(d.neighbors(s).len(), 4);
        }
    }

    #[test]
    fn sites_are_lexicographic() {
        let d = LatticeDomain::grid(0.5, &[-1, 2], &[2, 3], &[]).unwrap();
        let all: Vec<Vec<i64>> = (0..d.num_sites()).map(|s| d.coords(s).to_vec()).collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(d.site_at(&[0, 3]), Some(4));
        assert_eq!(d.site_at(&[1, 3]), None);
    }

    #[test]
    fn unit_cube_sites() {
        let nu = Direction::axis(2, 1).unwrap();
        let d = LatticeDomain::unit_cube(0.125, &nu).unwrap();
        assert_eq!(d.num_sites(), 49);
        assert_eq!(d.origin(), &[-3, -3]);

        let oblique = Direction::rational(&[1, 1]).unwrap();
        let q = LatticeDomain::unit_cube(0.125, &oblique).unwrap();
        for s in 0..q.num_sites() {
            let x = q.position(s);
            assert!(((x[0] + x[1]) / 2f64.sqrt()).abs() < 0.5);
            assert!(((x[0] - x[1]) / 2f64.sqrt()).abs() < 0.5);
        }
        // a rotated unit square holds about 1/ε² sites
        assert!((q.num_sites() as f64 - 64.0).abs() < 16.0);
    }

    #[test]
    fn boundary_layer_examples() {
        let nu = Direction::axis(2, 1).unwrap();
        let eps = 0.125;
        let d = LatticeDomain::unit_cube(eps, &nu).unwrap();
        let layer = boundary_layer(&d, 2.0 * eps).unwrap();
        let free: Vec<Vec<i64>> = layer
            .complement()
            .iter()
            .map(|s| d.coords(s).to_vec())
            .collect();
        assert_eq!(free.len(), 9);
        assert!(free.iter().all(|i| i.iter().all(|x| x.abs() <= 1)));

        assert!(boundary_layer(&d, 0.0).unwrap().is_empty());

        let coarse = LatticeDomain::unit_cube(1.0 / 3.0, &nu).unwrap();
        let layer = coarse.boundary_layer(2.0 / 3.0);
        assert_eq!(layer.count(), coarse.num_sites());
        assert!(boundary_layer(&d, -1.0).is_err());
    }

    #[test]
    fn periodic_axes_have_no_boundary() {
        let d = LatticeDomain::grid(0.25, &[0, 0], &[4, 8], &[true, false]).unwrap();
        let s = d.site_at(&[0, 4]).unwrap();
        // nearest boundary is along axis 1 only
        assert!((d.boundary_distance(s) - 0.25 * 3.5).abs() < 1e-12);
    }

    #[test]
    fn localized_bonds() {
        let d = LatticeDomain::grid(1.0, &[0, 0], &[3, 3], &[]).unwrap();
        let region = SiteSet::from_indices(9, [0, 1, 3, 4]).unwrap();
        assert_eq!(d.enumerate_bonds(Some(&region)).len(), 4);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(LatticeDomain::grid(0.0, &[0, 0], &[2, 2], &[]).is_err());
        assert!(LatticeDomain::grid(1.0, &[0], &[2], &[]).is_err());
        let nu = Direction::axis(2, 0).unwrap();
        assert!(LatticeDomain::new(0.1, Shape::Cube(nu), vec![true, false]).is_err());
    }
}
