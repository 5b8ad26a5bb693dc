use serde::{Deserialize, Serialize};

use crate::circle::{CircleValue, Clock, PhaseIndex, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::sum::Neumaier;

/// Cell values of a grid partition.
#[derive(Debug, Clone, PartialEq)]
pub enum CellValues {
    S1(Vec<CircleValue>),
    SN {
        clock: Clock,
        values: Vec<PhaseIndex>,
    },
}

/// A piecewise-constant `S¹`-valued field on the half-open cells
/// `λz + λ[0,1)^d`, `z ∈ origin + [0, extent)`, stored row-major with the
/// first axis slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPartitionField {
    lambda: f64,
    origin: Vec<i64>,
    extent: Vec<usize>,
    values: CellValues,
}

impl GridPartitionField {
    fn check_geometry(lambda: f64, origin: &[i64], extent: &[usize], len: usize) -> Result<()> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param(
                "lambda",
                format!("cell size must be > 0, got {lambda}"),
            ));
        }
        if extent.len() < 2 {
            return Err(Error::param("d", "dimension must be >= 2"));
        }
        if origin.len() != extent.len() {
            return Err(Error::param("origin", "one entry per axis expected"));
        }
        if extent.contains(&0) {
            return Err(Error::param("extent", "every axis needs at least one cell"));
        }
        let cells: usize = extent.iter().product();
        if cells != len {
            return Err(Error::InvalidInput(format!(
                "{len} values for {cells} cells"
            )));
        }
        Ok(())
    }

    pub fn from_angles(
        lambda: f64,
        origin: Vec<i64>,
        extent: Vec<usize>,
        values: Vec<CircleValue>,
    ) -> Result<Self> {
        Self::check_geometry(lambda, &origin, &extent, values.len())?;
        Ok(GridPartitionField {
            lambda,
            origin,
            extent,
            values: CellValues::S1(values),
        })
    }

    pub fn from_phases(
        lambda: f64,
        origin: Vec<i64>,
        extent: Vec<usize>,
        n: u32,
        values: Vec<PhaseIndex>,
    ) -> Result<Self> {
        Self::check_geometry(lambda, &origin, &extent, values.len())?;
        let clock = Clock::new(n)?;
        if let Some(bad) = values.iter().find(|k| !clock.contains(**k)) {
            return Err(Error::param(
                "k",
                format!("phase index {} out of range for N = {n}", bad.0),
            ));
        }
        Ok(GridPartitionField {
            lambda,
            origin,
            extent,
            values: CellValues::SN { clock, values },
        })
    }

    /// `S¹` field on cells starting at the origin, valued by a function of the cell center.
    pub fn from_fn(
        lambda: f64,
        extent: &[usize],
        mut f: impl FnMut(&[f64]) -> CircleValue,
    ) -> Result<Self> {
        let origin = vec![0; extent.len()];
        let cells: usize = extent.iter().product();
        let mut values = Vec::with_capacity(cells);
        let mut probe = GridPartitionField {
            lambda,
            origin,
            extent: extent.to_vec(),
            values: CellValues::S1(Vec::new()),
        };
        Self::check_geometry(lambda, &probe.origin, extent, cells)?;
        for c in 0..cells {
            values.push(f(&probe.cell_center(c)));
        }
        probe.values = CellValues::S1(values);
        Ok(probe)
    }

    pub fn constant(lambda: f64, extent: &[usize], value: CircleValue) -> Result<Self> {
        GridPartitionField::from_fn(lambda, extent, |_| value)
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn num_cells(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn values(&self) -> &CellValues {
        &self.values
    }

    /// `N` when the field is tagged `S_N`-valued.
    pub fn clock(&self) -> Option<&Clock> {
        match &self.values {
            CellValues::S1(_) => None,
            CellValues::SN { clock, .. } => Some(clock),
        }
    }

    pub fn phases(&self) -> Option<&[PhaseIndex]> {
        match &self.values {
            CellValues::S1(_) => None,
            CellValues::SN { values, .. } => Some(values),
        }
    }

    pub fn value(&self, cell: usize) -> CircleValue {
        match &self.values {
            CellValues::S1(v) => v[cell],
            CellValues::SN { clock, values } => clock.value(values[cell]),
        }
    }

    /// Integer index `z` of a cell.
    pub fn cell_index(&self, cell: usize) -> Vec<i64> {
        let d = self.dim();
        let mut z = vec![0i64; d];
        let mut rem = cell;
        for l in (0..d).rev() {
            z[l] = self.origin[l] + (rem % self.extent[l]) as i64;
            rem /= self.extent[l];
        }
        z
    }

    /// Cell containing integer index `z`, if inside the block.
    pub fn cell_at(&self, z: &[i64]) -> Option<usize> {
        let mut g = 0usize;
        for l in 0..self.dim() {
            let off = z[l] - self.origin[l];
            if off < 0 || off as usize >= self.extent[l] {
                return None;
            }
            g = g * self.extent[l] + off as usize;
        }
        Some(g)
    }

    pub fn cell_lower(&self, cell: usize) -> Vec<f64> {
        self.cell_index(cell)
            .iter()
            .map(|&z| self.lambda * z as f64)
            .collect()
    }

    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        self.cell_index(cell)
            .iter()
            .map(|&z| self.lambda * (z as f64 + 0.5))
            .collect()
    }

    /// Cell containing the point `x` under the half-open convention.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let z: Vec<i64> = x.iter().map(|v| (v / self.lambda).floor() as i64).collect();
        self.cell_at(&z)
    }

    /// Stride of axis `l` in the row-major cell order.
    fn stride(&self, l: usize) -> usize {
        self.extent[l + 1..].iter().product()
    }

    /// Geodesic distance between two cell values; exact multiples of `θ_N` for `S_N` fields.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        match &self.values {
            CellValues::S1(v) => v[a].geodesic_distance(v[b]),
            CellValues::SN { clock, values } => clock.geodesic_distance(values[a], values[b]),
        }
    }

    fn differs(&self, a: usize, b: usize) -> bool {
        match &self.values {
            CellValues::S1(v) => v[a] != v[b],
            CellValues::SN { values, .. } => values[a] != values[b],
        }
    }

    /// Visits every interior face as `(cell, neighbour along +e_ℓ, ℓ)`.
    fn for_each_face(&self, mut f: impl FnMut(usize, usize, usize)) {
        let d = self.dim();
        for cell in 0..self.num_cells() {
            let mut rem = cell;
            for l in (0..d).rev() {
                let zl = rem % self.extent[l];
                rem /= self.extent[l];
                if zl + 1 < self.extent[l] {
                    f(cell, cell + self.stride(l), l);
                }
            }
        }
    }

    /// `H^{d-1}` measure of the interior faces separating unequal values.
    pub fn interface_area(&self) -> f64 {
        let face = self.lambda.powi(self.dim() as i32 - 1);
        let mut count = 0usize;
        self.for_each_face(|a, b, _| {
            if self.differs(a, b) {
                count += 1;
            }
        });
        count as f64 * face
    }

    /// Whether every value lies on `S_N` (exactly when tagged, within `tol` otherwise).
    pub fn is_sn_valued(&self, n: u32, tol: f64) -> bool {
        match &self.values {
            CellValues::SN { clock, .. } => clock.n() == n,
            CellValues::S1(v) => match Clock::new(n) {
                Ok(clock) => v.iter().all(|&a| clock.index_of(a, tol).is_some()),
                Err(_) => false,
            },
        }
    }

    /// Re-tags an `S¹` field whose values all lie on `S_N`.
    pub fn to_sn(&self, n: u32) -> Result<GridPartitionField> {
        let clock = Clock::new(n)?;
        let mut values = Vec::with_capacity(self.num_cells());
        for c in 0..self.num_cells() {
            let v = self.value(c);
            match clock.index_of(v, DEFAULT_TOL) {
                Some(k) => values.push(k),
                None => {
                    return Err(Error::InvalidInput(format!(
                        "cell {c} has angle {} which is not in S_{n}",
                        v.angle()
                    )))
                }
            }
        }
        GridPartitionField::from_phases(
            self.lambda,
            self.origin.clone(),
            self.extent.clone(),
            n,
            values,
        )
    }
}

/// `∫_{Ω∩J_u} d_{S¹}(u⁻,u⁺)|ν_u|₁ dH^{d-1}` as a sum over interior faces.
pub fn jump_energy_direct(field: &GridPartitionField) -> f64 {
    let face = field.lambda.powi(field.dim() as i32 - 1);
    let mut acc = Neumaier::new();
    field.for_each_face(|a, b, _| {
        if field.differs(a, b) {
            acc.add(field.distance(a, b));
        }
    });
    face * acc.value()
}

/// Jump energy by slicing: for each axis `ℓ`, integrate the one-dimensional
/// variation along every line parallel to `e_ℓ` over the cross-section.
pub fn jump_energy_sliced(field: &GridPartitionField) -> f64 {
    let d = field.dim();
    let face = field.lambda.powi(d as i32 - 1);
    let mut total = Neumaier::new();
    for l in 0..d {
        let stride = field.stride(l);
        let len = field.extent[l];
        let outer: usize = field.extent[..l].iter().product();
        for o in 0..outer {
            for inner in 0..stride {
                let start = o * len * stride + inner;
                let mut line = Neumaier::new();
                for t in 0..len.saturating_sub(1) {
                    let a = start + t * stride;
                    let b = a + stride;
                    if field.differs(a, b) {
                        line.add(field.distance(a, b));
                    }
                }
                total.add(face * line.value());
            }
        }
    }
    total.value()
}

/// `E_N(u) = 4 sin²(θ_N/2)/θ_N² ∫_{Ω∩J_u} d_{S¹}(u⁻,u⁺)|ν_u|₁ dH^{d-1}`.
pub fn limit_energy_en(field: &GridPartitionField, n: u32) -> Result<f64> {
    let clock = Clock::new(n)?;
    if !field.is_sn_valued(n, DEFAULT_TOL) {
        return Err(Error::InvalidInput(format!(
            "field takes values outside S_{n}"
        )));
    }
    Ok(clock.prefactor() * jump_energy_direct(field))
}

/// Serialized grid partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionRecord {
    pub d: usize,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Vec<i64>>,
    pub extent: Vec<usize>,
    pub values: Vec<f64>,
    pub value_mode: ValueMode,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueMode {
    S1,
    SN,
}

impl PartitionRecord {
    pub fn from_field(field: &GridPartitionField) -> Self {
        let (values, value_mode, n) = match &field.values {
            CellValues::S1(v) => (v.iter().map(|a| a.angle()).collect(), ValueMode::S1, None),
            CellValues::SN { clock, values } => (
                values.iter().map(|k| k.0 as f64).collect(),
                ValueMode::SN,
                Some(clock.n()),
            ),
        };
        PartitionRecord {
            d: field.dim(),
            lambda: field.lambda,
            origin: field
                .origin
                .iter()
                .any(|&o| o != 0)
                .then(|| field.origin.clone()),
            extent: field.extent.clone(),
            values,
            value_mode,
            n,
        }
    }

    pub fn into_field(self) -> Result<GridPartitionField> {
        if self.extent.len() != self.d {
            return Err(Error::param("extent", "one entry per axis expected"));
        }
        let origin = self.origin.unwrap_or_else(|| vec![0; self.d]);
        match self.value_mode {
            ValueMode::S1 => {
                if self.n.is_some() {
                    return Err(Error::param("N", "only allowed with value_mode SN"));
                }
                if let Some(bad) = self.values.iter().find(|a| !a.is_finite()) {
                    return Err(Error::InvalidInput(format!("non-finite angle {bad}")));
                }
                let values = self.values.into_iter().map(CircleValue::new).collect();
                GridPartitionField::from_angles(self.lambda, origin, self.extent, values)
            }
            ValueMode::SN => {
                let n = self
                    .n
                    .ok_or_else(|| Error::param("N", "required with value_mode SN"))?;
                let mut values = Vec::with_capacity(self.values.len());
                for v in self.values {
                    if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                        return Err(Error::param("values", format!("{v} is not a phase index")));
                    }
                    values.push(PhaseIndex(v as u32));
                }
                GridPartitionField::from_phases(self.lambda, origin, self.extent, n, values)
            }
        }
    }
}

pub fn partition_to_json(field: &GridPartitionField) -> Result<String> {
    Ok(serde_json::to_string(&PartitionRecord::from_field(field))?)
}

pub fn partition_from_json(s: &str) -> Result<GridPartitionField> {
    serde_json::from_str::<PartitionRecord>(s)?.into_field()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn direct_and_sliced_examples() {
        let c = GridPartitionField::constant(0.25, &[4, 4], CircleValue::new(1.0)).unwrap();
        assert_eq!(jump_energy_direct(&c), 0.0);
        assert_eq!(jump_energy_sliced(&c), 0.0);

        let cols = GridPartitionField::from_fn(0.5, &[2, 2], |x| {
            CircleValue::new(if x[0] < 0.5 { 0.0 } else { FRAC_PI_2 })
        })
        .unwrap();
        assert!(close(jump_energy_direct(&cols), FRAC_PI_2));
        assert!(close(jump_energy_sliced(&cols), FRAC_PI_2));

        let split = GridPartitionField::from_fn(0.125, &[8, 8], |x| {
            CircleValue::new(if x[1] < 0.5 { 0.0 } else { PI })
        })
        .unwrap();
        assert!(close(jump_energy_direct(&split), PI));
        assert!(close(jump_energy_sliced(&split), PI));
        assert!(close(split.interface_area(), 1.0));

        let checker = GridPartitionField::from_phases(
            0.5,
            vec![0, 0],
            vec![2, 2],
            4,
            vec![PhaseIndex(0), PhaseIndex(1), PhaseIndex(1), PhaseIndex(0)],
        )
        .unwrap();
        assert!(close(jump_energy_direct(&checker), PI));
        assert!(close(jump_energy_sliced(&checker), PI));

        let single = GridPartitionField::constant(1.0, &[1, 1], CircleValue::new(2.0)).unwrap();
        assert_eq!(jump_energy_sliced(&single), 0.0);
    }

    #[test]
    fn limit_energy_examples() {
        let half = GridPartitionField::from_phases(
            0.5,
            vec![0, 0],
            vec![2, 2],
            4,
            vec![PhaseIndex(0), PhaseIndex(0), PhaseIndex(1), PhaseIndex(1)],
        )
        .unwrap();
        assert!(close(limit_energy_en(&half, 4).unwrap(), 4.0 / PI));
        let s1 = GridPartitionField::from_fn(0.5, &[2, 2], |x| {
            CircleValue::new(if x[0] < 0.5 { 0.0 } else { FRAC_PI_2 })
        })
        .unwrap();
        assert!(close(limit_energy_en(&s1, 4).unwrap(), 4.0 / PI));
        assert!(limit_energy_en(&s1, 3).is_err());
        let c = GridPartitionField::constant(0.5, &[2, 2], CircleValue::e1()).unwrap();
        assert_eq!(limit_energy_en(&c, 7).unwrap(), 0.0);
    }

    #[test]
    fn en_approaches_jump_energy() {
        let base = GridPartitionField::from_fn(0.25, &[4, 4], |x| {
            CircleValue::new(if x[1] < 0.5 { 0.0 } else { PI })
        })
        .unwrap();
        let jump = jump_energy_direct(&base);
        let mut prev = 0.0;
        for n in [2u32, 4, 8, 64, 1024, 1 << 16] {
            let e = limit_energy_en(&base, n).unwrap();
            assert!(e > prev && e <= jump);
            prev = e;
        }
        assert!((jump - prev).abs() < 1e-8);
    }

    #[test]
    fn cell_geometry() {
        let f = GridPartitionField::from_angles(
            0.5,
            vec![-1, 2, 0],
            vec![2, 3, 1],
            vec![CircleValue::e1(); 6],
        )
        .unwrap();
        assert_eq!(f.cell_index(0), vec![-1, 2, 0]);
        assert_eq!(f.cell_index(5), vec![0, 4, 0]);
        assert_eq!(f.cell_at(&[0, 4, 0]), Some(5));
        assert_eq!(f.locate(&[-0.5, 1.0, 0.2]), Some(0));
        // half-open: the upper face belongs to the next cell
        assert_eq!(f.locate(&[0.0, 1.0, 0.0]), Some(3));
        assert_eq!(f.locate(&[0.5, 1.0, 0.0]), None);
    }

    #[test]
    fn json_round_trip() {
        let f = GridPartitionField::from_phases(
            0.25,
            vec![0, 0],
            vec![2, 1],
            6,
            vec![PhaseIndex(5), PhaseIndex(2)],
        )
        .unwrap();
        let g = partition_from_json(&partition_to_json(&f).unwrap()).unwrap();
        assert_eq!(f, g);
        let s = GridPartitionField::from_fn(0.5, &[2, 2], |x| CircleValue::new(x[0] + 3.0 * x[1]))
            .unwrap();
        let t = partition_from_json(&partition_to_json(&s).unwrap()).unwrap();
        assert_eq!(s, t);
        assert!(partition_from_json(
            r#"{"d":2,"lambda":1,"extent":[1,1],"values":[0.5],"value_mode":"SN","N":3}"#
        )
        .is_err());
        assert!(partition_from_json(
            r#"{"d":2,"lambda":1,"extent":[1,1],"values":[1],"value_mode":"SN"}"#
        )
        .is_err());
    }
}
