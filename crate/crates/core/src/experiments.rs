//! Study drivers producing convergence tables.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{prefactor, sin_lemma_gap, CircleValue, Direction, PhaseIndex};
use crate::continuum::{jump_energy_direct, GridPartitionField};
use crate::error::{Error, Result};
use crate::solvers::{cell_formula_estimate, CellMethod, CellProblemSpec};

/// Fixed CSV header of every table.
pub const CSV_HEADER: &str = "parameter,lower,estimate,upper,analytic,gap,seconds";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub parameter: f64,
    pub lower: f64,
    pub estimate: f64,
    pub upper: f64,
    pub analytic: f64,
    /// `estimate − analytic`.
    pub gap: f64,
    pub seconds: f64,
}

/// Least-squares fit of `log|gap|` against `log(parameter)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// `None` when fewer than three rows are usable.
    pub exponent: Option<f64>,
    pub intercept: Option<f64>,
    /// Root-mean-square residual of the log-log fit.
    pub residual: Option<f64>,
    pub used_rows: usize,
    /// Rows dropped because `gap` was zero or not finite.
    pub excluded_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub name: String,
    pub rows: Vec<TableRow>,
    pub rate: RateFit,
}

impl ConvergenceTable {
    /// Sorts rows by parameter and fits the rate.
    pub fn new(name: impl Into<String>, mut rows: Vec<TableRow>) -> Self {
        rows.sort_by(|a, b| a.parameter.total_cmp(&b.parameter));
        let rate = fit_rate(&rows);
        ConvergenceTable {
            name: name.into(),
            rows,
            rate,
        }
    }

    /// Indices of rows violating `lower ≤ estimate ≤ upper` by more than `tol`.
    pub fn sandwich_violations(&self, tol: f64) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.lower > r.estimate + tol || r.estimate > r.upper + tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// Whether the analytic column is the same in every row.
    pub fn analytic_is_constant(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].analytic == w[1].analytic)
    }

    /// CSV text: optional `# key: value` comment lines, the fixed header, one line per row.
    /// With `timing` off the seconds column is written as 0.
    pub fn to_csv(&self, comments: &[(&str, &str)], timing: bool) -> String {
        let mut out = String::new();
        for (k, v) in comments {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let seconds = if timing { r.seconds } else { 0.0 };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.parameter, r.lower, r.estimate, r.upper, r.analytic, r.gap, seconds
            );
        }
        out
    }
}

/// Slope of `log|gap|` versus `log(parameter)`; rows with zero or non-finite
/// gaps are excluded and listed.
pub fn fit_rate(rows: &[TableRow]) -> RateFit {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded_rows = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let g = r.gap.abs();
        if g > 0.0 && g.is_finite() && r.parameter > 0.0 {
            xs.push(r.parameter.ln());
            ys.push(g.ln());
        } else {
            excluded_rows.push(i);
        }
    }
    let used_rows = xs.len();
    if used_rows < 3 {
        return RateFit {
            exponent: None,
            intercept: None,
            residual: None,
            used_rows,
            excluded_rows,
        };
    }
    let m = used_rows as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    RateFit {
        exponent: Some(slope),
        intercept: Some(intercept),
        residual: Some((rss / m).sqrt()),
        used_rows,
        excluded_rows,
    }
}

/// Outcome of sweeping `sin²(kθ/2) − k sin²(θ/2)` over `θ ∈ [0, π/k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub k_max: u32,
    pub grid_points: usize,
    pub min_gap: f64,
    pub min_k: u32,
    pub min_theta: f64,
    /// Nodes with `k ≥ 2`, `θ > 0` and `|gap| ≤ tol`.
    pub equality_nodes: Vec<(u32, f64, f64)>,
    pub tol: f64,
}

impl LemmaReport {
    /// Whether an equality node sits at `(k = 2, θ = π/2)` within `tol`.
    pub fn has_k2_equality(&self) -> bool {
        self.equality_nodes
            .iter()
            .any(|&(k, th, _)| k == 2 && (th - PI / 2.0).abs() <= self.tol)
    }
}

/// Evaluates the gap on `grid` equispaced nodes of `[0, π/k]` for every `k ≤ k_max`.
pub fn run_lemma_sweep(k_max: u32, grid: usize) -> Result<LemmaReport> {
    if k_max == 0 {
        return Err(Error::param("k_max", "must be >= 1"));
    }
    if grid < 2 {
        return Err(Error::param("grid", "need at least two nodes"));
    }
    let tol = 1e-12;
    let per_k: Vec<(f64, u32, f64, Vec<(u32, f64, f64)>)> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let upper = PI / k as f64;
            let mut min = (f64::INFINITY, 0.0);
            let mut eq = Vec::new();
            for j in 0..grid {
                let theta = if j + 1 == grid {
                    upper
                } else {
                    upper * j as f64 / (grid - 1) as f64
                };
                let g = sin_lemma_gap(k, theta).expect("theta inside range");
                if g < min.0 {
                    min = (g, theta);
                }
                if k >= 2 && j > 0 && g.abs() <= tol {
                    eq.push((k, theta, g));
                }
            }
            (min.0, k, min.1, eq)
        })
        .collect();
    let mut report = LemmaReport {
        k_max,
        grid_points: grid,
        min_gap: f64::INFINITY,
        min_k: 0,
        min_theta: 0.0,
        equality_nodes: Vec::new(),
        tol,
    };
    for (g, k, th, eq) in per_k {
        if g < report.min_gap {
            report.min_gap = g;
            report.min_k = k;
            report.min_theta = th;
        }
        report.equality_nodes.extend(eq);
    }
    Ok(report)
}

/// Bond lower bound, solver estimate, staircase upper bound and analytic
/// density of the cell problem along a ladder of `ε`.
pub fn run_gamma_sandwich(
    s: PhaseIndex,
    r: PhaseIndex,
    nu: &Direction,
    n: u32,
    ladder: &[f64],
    methods: &[CellMethod],
) -> Result<ConvergenceTable> {
    if ladder.is_empty() || methods.len() != ladder.len() {
        return Err(Error::param(
            "ladder",
            "one method per ladder entry expected",
        ));
    }
    let rows: Vec<Result<TableRow>> = ladder
        .par_iter()
        .zip(methods.par_iter())
        .map(|(&eps, method)| {
            let start = Instant::now();
            let est = cell_formula_estimate(&CellProblemSpec {
                s,
                r,
                nu: nu.clone(),
                eps,
                n,
                method: method.clone(),
            })?;
            Ok(TableRow {
                parameter: eps,
                lower: est.lower,
                estimate: est.estimate,
                upper: est.upper,
                analytic: est.analytic,
                gap: est.estimate - est.analytic,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::new("gamma-sandwich", rows))
}

/// Prefactor table with the Taylor envelope `1 − (π/N)²/3` as lower column and 1 as upper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefactorStudy {
    pub table: ConvergenceTable,
    /// Strictly increasing along the ladder.
    pub monotone: bool,
}

pub fn run_prefactor_limit(ladder: &[u32]) -> Result<PrefactorStudy> {
    let mut rows = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let start = Instant::now();
        let p = prefactor(n)?;
        let x = PI / n as f64;
        rows.push(TableRow {
            parameter: n as f64,
            lower: 1.0 - x * x / 3.0,
            estimate: p,
            upper: 1.0,
            analytic: 1.0,
            gap: p - 1.0,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    let table = ConvergenceTable::new("prefactor-limit", rows);
    let monotone = table.rows.windows(2).all(|w| w[0].estimate < w[1].estimate);
    Ok(PrefactorStudy { table, monotone })
}

/// Length of the chord `{x ∈ [0,1]² : (x − c)·ν = 0}` with `c` the centre.
fn chord_length(nu: &[f64]) -> f64 {
    // parametrize x = c + t·τ with τ ⟂ ν and clip to the square
    let tau = [-nu[1], nu[0]];
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for l in 0..2 {
        if tau[l].abs() > 1e-15 {
            let (a, b) = ((0.0 - 0.5) / tau[l], (1.0 - 0.5) / tau[l]);
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t1 - t0).max(0.0)
}

/// Rasterization of the unit square split through its centre by the line
/// with normal `ν`: cells whose centre has `(x − c)·ν > 0` take `s`, the
/// others `r`. Returns the field and the chord length.
pub fn raster_interface(
    nu: &Direction,
    s: CircleValue,
    r: CircleValue,
    lambda: f64,
) -> Result<(GridPartitionField, f64)> {
    if nu.dim() != 2 {
        return Err(Error::param(
            "direction",
            "oblique rasterization is planar (d = 2)",
        ));
    }
    let m = (1.0 / lambda).round();
    if m < 1.0 || (m * lambda - 1.0).abs() > 1e-12 {
        return Err(Error::param("lambda", "1/λ must be a positive integer"));
    }
    let m = m as usize;
    let c = nu.components().to_vec();
    let field = GridPartitionField::from_fn(lambda, &[m, m], |x| {
        let p = (x[0] - 0.5) * c[0] + (x[1] - 0.5) * c[1];
        if p > 0.0 {
            s
        } else {
            r
        }
    })?;
    Ok((field, chord_length(&c)))
}

/// Jump energy per unit interface length of rasterized planar interfaces,
/// against `d_{S¹}(s, r)·|ν|₁`.
pub fn run_oblique_raster(
    nu: &Direction,
    s: CircleValue,
    r: CircleValue,
    lambdas: &[f64],
) -> Result<ConvergenceTable> {
    let analytic = s.geodesic_distance(r) * nu.norm_1();
    let rows: Vec<Result<TableRow>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let start = Instant::now();
            let (field, length) = raster_interface(nu, s, r, lambda)?;
            let estimate = jump_energy_direct(&field) / length;
            Ok(TableRow {
                parameter: lambda,
                lower: estimate,
                estimate,
                upper: estimate,
                analytic,
                gap: estimate - analytic,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::new("oblique-raster", rows))
}
