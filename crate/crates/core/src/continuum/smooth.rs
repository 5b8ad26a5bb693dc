use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::partition::{jump_energy_direct, GridPartitionField};
use crate::circle::norm_1;
use crate::error::{Error, Result};
use crate::sum::Neumaier;

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A piece of the singular set `Σ`: a point (`d = 2`) or a segment (`d = 3`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingularPiece {
    Point { at: Vec<f64> },
    Segment { from: Vec<f64>, to: Vec<f64> },
}

impl SingularPiece {
    fn dim(&self) -> usize {
        match self {
            SingularPiece::Point { at } => at.len(),
            SingularPiece::Segment { from, .. } => from.len(),
        }
    }

    /// Euclidean distance from `x` to the piece.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            SingularPiece::Point { at } => dist(x, at),
            SingularPiece::Segment { from, to } => {
                let dir: Vec<f64> = to.iter().zip(from).map(|(b, a)| b - a).collect();
                let len2: f64 = dir.iter().map(|v| v * v).sum();
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    let p: f64 = x
                        .iter()
                        .zip(from)
                        .zip(&dir)
                        .map(|((xi, a), v)| (xi - a) * v)
                        .sum();
                    (p / len2).clamp(0.0, 1.0)
                };
                let q: Vec<f64> = from.iter().zip(&dir).map(|(a, v)| a + t * v).collect();
                dist(x, &q)
            }
        }
    }

    /// Whether the piece meets the closed box `[lower, upper]`.
    pub fn meets_box(&self, lower: &[f64], upper: &[f64]) -> bool {
        match self {
            SingularPiece::Point { at } => at
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&p, (&a, &b))| a <= p && p <= b),
            SingularPiece::Segment { from, to } => {
                // parametric clipping against each slab
                let (mut t0, mut t1) = (0.0f64, 1.0f64);
                for l in 0..from.len() {
                    let v = to[l] - from[l];
                    if v == 0.0 {
                        if from[l] < lower[l] || from[l] > upper[l] {
                            return false;
                        }
                        continue;
                    }
                    let (mut ta, mut tb) = ((lower[l] - from[l]) / v, (upper[l] - from[l]) / v);
                    if ta > tb {
                        std::mem::swap(&mut ta, &mut tb);
                    }
                    t0 = t0.max(ta);
                    t1 = t1.min(tb);
                    if t0 > t1 {
                        return false;
                    }
                }
                true
            }
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// An `S¹`-valued field `u = exp(ιφ)` given by its angle and angle gradient,
/// smooth outside a finite singular set `Σ` that is fenced off by a guard radius.
#[derive(Clone)]
pub struct SmoothFieldSpec {
    d: usize,
    angle: ScalarFn,
    gradient: VectorFn,
    singular: Vec<SingularPiece>,
    guard: f64,
    label: String,
}

impl fmt::Debug for SmoothFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFieldSpec")
            .field("d", &self.d)
            .field("label", &self.label)
            .field("singular", &self.singular)
            .field("guard", &self.guard)
            .finish()
    }
}

impl SmoothFieldSpec {
    pub fn new(
        d: usize,
        angle: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::param("d", "dimension must be >= 2"));
        }
        Ok(SmoothFieldSpec {
            d,
            angle: Arc::new(angle),
            gradient: Arc::new(gradient),
            singular: Vec::new(),
            guard: 0.0,
            label: "custom".into(),
        })
    }

    pub fn with_singular_set(mut self, pieces: Vec<SingularPiece>, guard: f64) -> Result<Self> {
        if !(guard >= 0.0) {
            return Err(Error::param("guard", "must be >= 0"));
        }
        if pieces.iter().any(|p| p.dim() != self.d) {
            return Err(Error::param("singular", "dimension mismatch"));
        }
        self.singular = pieces;
        self.guard = guard;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `φ ≡ c`.
    pub fn constant(d: usize, c: f64) -> Result<Self> {
        Ok(SmoothFieldSpec::new(d, move |_| c, move |_| vec![0.0; d])?.with_label("constant"))
    }

    /// `φ(x) = c + α·x`.
    pub fn affine(alpha: Vec<f64>, c: f64) -> Result<Self> {
        let d = alpha.len();
        let a = alpha.clone();
        Ok(SmoothFieldSpec::new(
            d,
            move |x| c + a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>(),
            move |_| alpha.clone(),
        )?
        .with_label("affine"))
    }

    /// Planar vortex `φ(x) = arg(x − x₀)` with `Σ = {x₀}`.
    pub fn vortex(center: [f64; 2], guard: f64) -> Result<Self> {
        let [cx, cy] = center;
        SmoothFieldSpec::new(
            2,
            move |x| (x[1] - cy).atan2(x[0] - cx),
            move |x| {
                let (dx, dy) = (x[0] - cx, x[1] - cy);
                let r2 = dx * dx + dy * dy;
                vec![-dy / r2, dx / r2]
            },
        )?
        .with_singular_set(
            vec![SingularPiece::Point {
                at: center.to_vec(),
            }],
            guard,
        )
        .map(|s| s.with_label("vortex"))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn singular_set(&self) -> &[SingularPiece] {
        &self.singular
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn angle(&self, x: &[f64]) -> f64 {
        (self.angle)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }

    /// `|∇u|_{2,1}` at `x`; each column of `∇u` is `∂_ℓφ · (−sin φ, cos φ)`.
    pub fn gradient_norm_21(&self, x: &[f64]) -> f64 {
        norm_1(&self.gradient(x))
    }

    pub fn distance_to_singular(&self, x: &[f64]) -> f64 {
        self.singular
            .iter()
            .map(|p| p.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn in_guard(&self, x: &[f64]) -> bool {
        !self.singular.is_empty() && self.distance_to_singular(x) < self.guard
    }

    /// Whether the closed box meets `Σ`.
    pub fn meets_singular(&self, lower: &[f64], upper: &[f64]) -> bool {
        self.singular.iter().any(|p| p.meets_box(lower, upper))
    }
}

/// Midpoint-rule value of `∫ |∇u|_{2,1} dx` and the nodes left out near `Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientEnergy {
    pub value: f64,
    pub nodes: usize,
    pub skipped_nodes: usize,
    pub skipped_measure: f64,
}

/// Midpoint rule on an `M^d` grid over the box `[lower, upper]`. Nodes within
/// the guard radius of `Σ` are skipped and their total measure reported.
pub fn gradient_energy(
    spec: &SmoothFieldSpec,
    lower: &[f64],
    upper: &[f64],
    m: usize,
) -> Result<GradientEnergy> {
    let d = spec.dim();
    if lower.len() != d || upper.len() != d || lower.iter().zip(upper).any(|(a, b)| !(a < b)) {
        return Err(Error::param("box", "need lower < upper on every axis"));
    }
    if m == 0 {
        return Err(Error::param(
            "m",
            "need at least one quadrature cell per axis",
        ));
    }
    let h: Vec<f64> = lower
        .iter()
        .zip(upper)
        .map(|(a, b)| (b - a) / m as f64)
        .collect();
    let cell: f64 = h.iter().product();
    let slab = m.pow(d as u32 - 1);
    // one partial sum per index of the first axis, merged in order
    let parts: Vec<(f64, usize)> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut acc = Neumaier::new();
            let mut skipped = 0usize;
            let mut x = vec![0.0; d];
            x[0] = lower[0] + (first as f64 + 0.5) * h[0];
            for rest in 0..slab {
                let mut r = rest;
                for l in (1..d).rev() {
                    x[l] = lower[l] + ((r % m) as f64 + 0.5) * h[l];
                    r /= m;
                }
                if spec.in_guard(&x) {
                    skipped += 1;
                } else {
                    acc.add(spec.gradient_norm_21(&x));
                }
            }
            (acc.value(), skipped)
        })
        .collect();
    let mut total = Neumaier::new();
    let mut skipped = 0;
    for (v, s) in parts {
        total.add(v);
        skipped += s;
    }
    Ok(GradientEnergy {
        value: cell * total.value(),
        nodes: m.pow(d as u32),
        skipped_nodes: skipped,
        skipped_measure: skipped as f64 * cell,
    })
}

/// Absolutely continuous part of a limit-functional input.
#[derive(Debug, Clone)]
pub struct SmoothPart<'a> {
    pub spec: &'a SmoothFieldSpec,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub quadrature: usize,
}

/// Input to [`limit_energy_e`]. Cantor parts are not representable.
#[derive(Debug, Clone)]
pub enum LimitInput<'a> {
    Smooth(SmoothPart<'a>),
    Partition(&'a GridPartitionField),
    Both(SmoothPart<'a>, &'a GridPartitionField),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEnergy {
    pub gradient: Option<GradientEnergy>,
    pub jump: f64,
    pub total: f64,
}

/// `E(u) = ∫|∇u|_{2,1} + ∫_{J_u} d_{S¹}(u⁻,u⁺)|ν_u|₁` for fields with no Cantor part.
pub fn limit_energy_e(input: &LimitInput<'_>) -> Result<LimitEnergy> {
    let (smooth, partition) = match input {
        LimitInput::Smooth(s) => (Some(s), None),
        LimitInput::Partition(p) => (None, Some(*p)),
        LimitInput::Both(s, p) => (Some(s), Some(*p)),
    };
    let gradient = smooth
        .map(|s| gradient_energy(s.spec, &s.lower, &s.upper, s.quadrature))
        .transpose()?;
    let jump = partition.map_or(0.0, jump_energy_direct);
    Ok(LimitEnergy {
        gradient,
        jump,
        total: gradient.map_or(0.0, |g| g.value) + jump,
    })
}
