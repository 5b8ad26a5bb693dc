//! Circle arithmetic for clock spins.
//!
//! States of the `N`-clock model are the `N` equispaced points
//! `exp(ι k θ_N)` with `θ_N = 2π/N`. They are stored as integer indices so
//! that geodesic distances are exact integer multiples of `θ_N`. General
//! `S¹` values carry a canonical angle in `[0, 2π)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used by every real comparison unless overridden.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Index `k` of the clock state `exp(ι k θ_N)`. `N` is carried by context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseIndex(pub u32);

impl PhaseIndex {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if k >= n {
            return Err(Error::param(
                "k",
                format!("phase index {k} must be < N = {n}"),
            ));
        }
        Ok(PhaseIndex(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// A point of `S¹`, stored by its angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct CircleValue {
    angle: f64,
}

impl CircleValue {
    /// Canonicalizes `angle` into `[0, 2π)`; values that round to `2π` map to `0`.
    pub fn new(angle: f64) -> Self {
        let mut a = angle.rem_euclid(TAU);
        if a >= TAU {
            a = 0.0;
        }
        CircleValue { angle: a }
    }

    /// The base point `e₁ = (1, 0)`.
    pub fn e1() -> Self {
        CircleValue { angle: 0.0 }
    }

    pub fn angle(self) -> f64 {
        self.angle
    }

    /// Plane vector `(cos φ, sin φ)`.
    pub fn to_vector(self) -> [f64; 2] {
        [self.angle.cos(), self.angle.sin()]
    }

    /// Geodesic (arc-length) distance on `S¹`, in `[0, π]`.
    pub fn geodesic_distance(self, other: CircleValue) -> f64 {
        let delta = (self.angle - other.angle).abs();
        delta.min(TAU - delta)
    }
}

impl From<f64> for CircleValue {
    fn from(angle: f64) -> Self {
        CircleValue::new(angle)
    }
}

impl From<CircleValue> for f64 {
    fn from(v: CircleValue) -> f64 {
        v.angle
    }
}

/// The state set `S_N` together with precomputed bond costs.
#[derive(Debug, Clone, PartialEq)]
pub struct Clock {
    n: u32,
    theta: f64,
    // 4 sin²(k θ_N / 2) for k = 0..=N/2
    bond_costs: Vec<f64>,
}

impl Clock {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("N", format!("N must be >= 2, got {n}")));
        }
        let theta = TAU / n as f64;
        let bond_costs = (0..=n / 2)
            .map(|k| {
                let s = (k as f64 * theta / 2.0).sin();
                4.0 * s * s
            })
            .collect();
        Ok(Clock {
            n,
            theta,
            bond_costs,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Minimal angle `θ_N = 2π/N` between distinct states.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn contains(&self, k: PhaseIndex) -> bool {
        k.0 < self.n
    }

    /// Number of `θ_N` steps on the shorter arc between two states.
    #[inline]
    pub fn index_distance(&self, a: PhaseIndex, b: PhaseIndex) -> u32 {
        let diff = a.0.abs_diff(b.0);
        diff.min(self.n - diff)
    }

    /// Geodesic distance `θ_N · min(|a−b|, N−|a−b|)`.
    pub fn geodesic_distance(&self, a: PhaseIndex, b: PhaseIndex) -> f64 {
        self.index_distance(a, b) as f64 * self.theta
    }

    /// Squared Euclidean distance `|u(a) − u(b)|² = 4 sin²(d/2)`.
    #[inline]
    pub fn bond_energy_sq(&self, a: PhaseIndex, b: PhaseIndex) -> f64 {
        self.bond_costs[self.index_distance(a, b) as usize]
    }

    /// `4 sin²(k θ_N / 2)` for a bond spanning `k` steps, `k <= N/2`.
    #[inline]
    pub fn bond_cost(&self, steps: u32) -> f64 {
        self.bond_costs[steps as usize]
    }

    /// Largest possible index distance, `⌊N/2⌋`.
    pub fn max_steps(&self) -> u32 {
        self.n / 2
    }

    pub fn angle(&self, k: PhaseIndex) -> f64 {
        k.0 as f64 * self.theta
    }

    pub fn value(&self, k: PhaseIndex) -> CircleValue {
        CircleValue::new(self.angle(k))
    }

    /// Index of `value` when it lies in `S_N` within `tol` radians.
    pub fn index_of(&self, value: CircleValue, tol: f64) -> Option<PhaseIndex> {
        let q = value.angle() / self.theta;
        let k = q.round();
        if (q - k).abs() * self.theta <= tol {
            Some(PhaseIndex((k as u32) % self.n))
        } else {
            None
        }
    }

    /// `(a + steps) mod N`, with `steps` possibly negative.
    pub fn rotate(&self, a: PhaseIndex, steps: i64) -> PhaseIndex {
        PhaseIndex((a.0 as i64 + steps).rem_euclid(self.n as i64) as u32)
    }

    pub fn prefactor(&self) -> f64 {
        prefactor_unchecked(self.n)
    }
}

/// Geodesic distance between two `S_N` states.
pub fn geodesic_distance_sn(a: PhaseIndex, b: PhaseIndex, n: u32) -> Result<f64> {
    let clock = Clock::new(n)?;
    check_index(&clock, a)?;
    check_index(&clock, b)?;
    Ok(clock.geodesic_distance(a, b))
}

/// Geodesic distance between two points of `S¹`.
pub fn geodesic_distance_s1(a: CircleValue, b: CircleValue) -> f64 {
    a.geodesic_distance(b)
}

/// `|u(a) − u(b)|²` for `S_N` states.
pub fn bond_energy_sq(a: PhaseIndex, b: PhaseIndex, n: u32) -> Result<f64> {
    let clock = Clock::new(n)?;
    check_index(&clock, a)?;
    check_index(&clock, b)?;
    Ok(clock.bond_energy_sq(a, b))
}

fn check_index(clock: &Clock, k: PhaseIndex) -> Result<()> {
    if clock.contains(k) {
        Ok(())
    } else {
        Err(Error::param(
            "k",
            format!("phase index {} out of range for N = {}", k.0, clock.n()),
        ))
    }
}

/// Density coefficient `4 sin²(θ_N/2) / θ_N²`.
pub fn prefactor(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("N", format!("N must be >= 2, got {n}")));
    }
    Ok(prefactor_unchecked(n))
}

fn prefactor_unchecked(n: u32) -> f64 {
    // (sin x / x)² with x = θ_N / 2 = π/N
    let x = PI / n as f64;
    let s = x.sin() / x;
    s * s
}

/// A unit normal `ν ∈ S^{d-1}`, optionally remembering an integer
/// representative so that signs and floors of `i·ν` can be taken exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    components: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lattice: Option<Vec<i64>>,
}

impl Direction {
    /// Normalizes an arbitrary nonzero vector.
    pub fn new(v: &[f64]) -> Result<Self> {
        check_dim(v.len())?;
        let norm = norm_2(v);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::param("direction", "must be finite and nonzero"));
        }
        Ok(Direction {
            components: v.iter().map(|x| x / norm).collect(),
            lattice: None,
        })
    }

    /// Accepts a vector that must already have unit length within `tol`.
    pub fn from_unit(v: &[f64], tol: f64) -> Result<Self> {
        check_dim(v.len())?;
        let norm = norm_2(v);
        if (norm - 1.0).abs() > tol {
            return Err(Error::param(
                "direction",
                format!("|ν|₂ = {norm} is not 1 within {tol}"),
            ));
        }
        Ok(Direction {
            components: v.to_vec(),
            lattice: None,
        })
    }

    /// Direction of an integer vector, e.g. `(1, 1)` for `(1, 1)/√2`.
    pub fn rational(m: &[i64]) -> Result<Self> {
        if m.iter().all(|&x| x == 0) {
            return Err(Error::param(
                "direction",
                "integer direction must be nonzero",
            ));
        }
        let v: Vec<f64> = m.iter().map(|&x| x as f64).collect();
        let mut dir = Direction::new(&v)?;
        dir.lattice = Some(m.to_vec());
        Ok(dir)
    }

    /// Coordinate direction `e_axis`.
    pub fn axis(d: usize, axis: usize) -> Result<Self> {
        if axis >= d {
            return Err(Error::param(
                "axis",
                format!("axis {axis} out of range for d = {d}"),
            ));
        }
        let mut m = vec![0i64; d];
        m[axis] = 1;
        Direction::rational(&m)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn lattice(&self) -> Option<&[i64]> {
        self.lattice.as_deref()
    }

    pub fn norm_1(&self) -> f64 {
        norm_1(&self.components)
    }

    /// Coordinate axis when `ν = ±e_ℓ`.
    pub fn axis_index(&self) -> Option<usize> {
        let nonzero: Vec<usize> = (0..self.dim())
            .filter(|&l| self.components[l] != 0.0)
            .collect();
        match nonzero.as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.components.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `i·ν` for an integer point `i`.
    pub fn dot_int(&self, i: &[i64]) -> f64 {
        self.components
            .iter()
            .zip(i)
            .map(|(a, &b)| a * b as f64)
            .sum()
    }

    /// Sign of `i·ν`, exact when an integer representative is known.
    pub fn sign_int(&self, i: &[i64]) -> std::cmp::Ordering {
        match &self.lattice {
            Some(m) => int_dot(m, i).cmp(&0),
            None => self
                .dot_int(i)
                .partial_cmp(&0.0)
                .unwrap_or(std::cmp::Ordering::Equal),
        }
    }

    /// `⌊i·ν⌋`, exact when an integer representative is known.
    pub fn floor_int(&self, i: &[i64]) -> i64 {
        match &self.lattice {
            Some(m) => {
                let p = int_dot(m, i);
                let q: i128 = m.iter().map(|&x| (x as i128) * (x as i128)).sum();
                floor_div_sqrt(p, q)
            }
            None => self.dot_int(i).floor() as i64,
        }
    }

    /// Orthonormal basis `(ν, ν₂, …, ν_d)` completed by Gram–Schmidt against
    /// the coordinate axes, so that `ν = ±e_ℓ` yields coordinate vectors.
    pub fn orthonormal_frame(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut frame = vec![self.components.clone()];
        for axis in 0..d {
            if frame.len() == d {
                break;
            }
            let mut v = vec![0.0; d];
            v[axis] = 1.0;
            for b in &frame {
                let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
            let n = norm_2(&v);
            if n > 1e-8 {
                for x in &mut v {
                    *x /= n;
                }
                frame.push(v);
            }
        }
        frame
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::param(
            "d",
            format!("dimension must be >= 2, got {d}"),
        ));
    }
    Ok(())
}

fn int_dot(m: &[i64], i: &[i64]) -> i128 {
    m.iter().zip(i).map(|(&a, &b)| a as i128 * b as i128).sum()
}

/// `⌊p / √q⌋` for integers `p` and `q > 0`.
fn floor_div_sqrt(p: i128, q: i128) -> i64 {
    let guess = (p as f64 / (q as f64).sqrt()).floor() as i128;
    // k√q <= p  <=>  (k <= 0 and p >= 0) or comparisons of squares by sign
    let le = |k: i128| -> bool {
        match (k >= 0, p >= 0) {
            (true, true) => k * k * q <= p * p,
            (true, false) => k == 0 && p == 0,
            (false, true) => true,
            (false, false) => k * k * q >= p * p,
        }
    };
    let mut k = guess;
    while !le(k) {
        k -= 1;
    }
    while le(k + 1) {
        k += 1;
    }
    k as i64
}

/// Euclidean norm.
pub fn norm_2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `|v|₁ = Σ |v_i|`.
pub fn norm_1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// `|A|_{2,1}`: sum of the Euclidean norms of the columns of `A`.
pub fn norm_21<C: AsRef<[f64]>>(columns: &[C]) -> f64 {
    columns.iter().map(|c| norm_2(c.as_ref())).sum()
}

/// Columns of the tensor product `g ⊗ ν` (entries `g_i ν_j`).
pub fn outer(g: &[f64], nu: &[f64]) -> Vec<Vec<f64>> {
    nu.iter()
        .map(|&nj| g.iter().map(|&gi| gi * nj).collect())
        .collect()
}

/// `sin²(kθ/2) − k sin²(θ/2)`, nonnegative on `θ ∈ [0, π/k]`.
pub fn sin_lemma_gap(k: u32, theta: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("k", "k must be >= 1"));
    }
    let upper = PI / k as f64;
    if !(0.0..=upper).contains(&theta) {
        return Err(Error::param(
            "theta",
            format!("θ = {theta} outside [0, π/{k}]"),
        ));
    }
    let big = (k as f64 * theta / 2.0).sin();
    let small = (theta / 2.0).sin();
    Ok(big * big - k as f64 * small * small)
}
