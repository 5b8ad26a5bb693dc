//! JSON form of spin fields.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::domain::{LatticeDomain, Region, Shape, SiteSet};
use super::field::SpinField;
use crate::circle::{Direction, PhaseIndex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeRecord {
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Cube {
        nu: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lattice: Option<Vec<i64>>,
    },
    /// Sites are exactly the non-null entries of `phases`.
    Mask,
}

/// Serialized spin field. `phases` is row-major over the bounding block
/// `origin + [0, extent)`, with `null` at positions outside the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinFieldRecord {
    pub d: usize,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub shape: ShapeRecord,
    pub origin: Vec<i64>,
    pub extent: Vec<usize>,
    pub periodic: Vec<bool>,
    pub phases: Vec<Option<u32>>,
    pub frozen: Vec<usize>,
    /// Hash of the configuration that produced the file, when written by the CLI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_sha256: Option<String>,
}

impl SpinFieldRecord {
    pub fn from_field(field: &SpinField) -> Self {
        let dom = field.domain();
        let shape = match dom.shape() {
            Shape::Box { lower, upper } => ShapeRecord::Box {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            Shape::Cube(nu) => ShapeRecord::Cube {
                nu: nu.components().to_vec(),
                lattice: nu.lattice().map(<[i64]>::to_vec),
            },
            Shape::Custom(_) => ShapeRecord::Mask,
        };
        let mut phases = vec![None; dom.grid_len()];
        for s in 0..dom.num_sites() {
            phases[dom.grid_position(s)] = Some(field.get(s).0);
        }
        SpinFieldRecord {
            d: dom.dim(),
            eps: dom.eps(),
            n: field.n(),
            shape,
            origin: dom.origin().to_vec(),
            extent: dom.extent().to_vec(),
            periodic: dom.periodic().to_vec(),
            phases,
            frozen: field.frozen().iter().collect(),
            config_sha256: None,
        }
    }

    pub fn into_field(self) -> Result<SpinField> {
        let d = self.d;
        if self.origin.len() != d || self.extent.len() != d || self.periodic.len() != d {
            return Err(Error::InvalidInput(
                "origin, extent and periodic need one entry per axis".into(),
            ));
        }
        let grid_len: usize = self.extent.iter().product();
        if self.phases.len() != grid_len {
            return Err(Error::InvalidInput(format!(
                "{} phases for a block of {grid_len} positions",
                self.phases.len()
            )));
        }
        let shape = match self.shape {
            ShapeRecord::Box { lower, upper } => Shape::Box { lower, upper },
            ShapeRecord::Cube { nu, lattice } => Shape::Cube(match lattice {
                Some(m) => Direction::rational(&m)?,
                None => Direction::from_unit(&nu, 1e-9)?,
            }),
            ShapeRecord::Mask => Shape::Custom(Arc::new(MaskRegion::new(
                self.eps,
                self.origin.clone(),
                self.extent.clone(),
                self.phases.iter().map(Option::is_some).collect(),
            ))),
        };
        let domain = LatticeDomain::new(self.eps, shape, self.periodic)?;
        if domain.origin() != self.origin.as_slice() || domain.extent() != self.extent.as_slice() {
            return Err(Error::InvalidInput(
                "site block does not match the stated shape".into(),
            ));
        }
        let mut values = Vec::with_capacity(domain.num_sites());
        for s in 0..domain.num_sites() {
            match self.phases[domain.grid_position(s)] {
                Some(k) => values.push(PhaseIndex(k)),
                None => {
                    return Err(Error::InvalidInput(format!(
                        "missing phase at site {:?}",
                        domain.coords(s)
                    )))
                }
            }
        }
        if values.len() != self.phases.iter().flatten().count() {
            return Err(Error::InvalidInput(
                "phase given at a position outside the domain".into(),
            ));
        }
        let n_sites = values.len();
        let mut field = SpinField::from_values(Arc::new(domain), self.n, values)?;
        field.set_frozen(SiteSet::from_indices(n_sites, self.frozen)?)?;
        Ok(field)
    }
}

pub fn field_to_json(field: &SpinField) -> Result<String> {
    Ok(serde_json::to_string(&SpinFieldRecord::from_field(field))?)
}

pub fn field_from_json(s: &str) -> Result<SpinField> {
    serde_json::from_str::<SpinFieldRecord>(s)?.into_field()
}

pub fn write_field(path: &Path, field: &SpinField) -> Result<()> {
    std::fs::write(path, field_to_json(field)?)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<SpinField> {
    field_from_json(&std::fs::read_to_string(path)?)
}

/// Union of the closed cells `ε(i + [-½, ½]^d)` over a set of integer points.
#[derive(Debug, Clone)]
pub struct MaskRegion {
    eps: f64,
    origin: Vec<i64>,
    extent: Vec<usize>,
    mask: Vec<bool>,
}

impl MaskRegion {
    pub fn new(eps: f64, origin: Vec<i64>, extent: Vec<usize>, mask: Vec<bool>) -> Self {
        MaskRegion {
            eps,
            origin,
            extent,
            mask,
        }
    }

    fn member(&self, i: &[i64]) -> bool {
        let mut g = 0usize;
        for l in 0..self.origin.len() {
            let off = i[l] - self.origin[l];
            if off < 0 || off as usize >= self.extent[l] {
                return false;
            }
            g = g * self.extent[l] + off as usize;
        }
        self.mask[g]
    }
}

impl Region for MaskRegion {
    fn dim(&self) -> usize {
        self.origin.len()
    }

    fn contains(&self, x: &[f64], _inset: f64) -> bool {
        let i: Vec<i64> = x.iter().map(|v| (v / self.eps).round() as i64).collect();
        self.member(&i)
    }

    fn boundary_distance(&self, x: &[f64]) -> f64 {
        // distance to the nearest cell outside the mask, including the ring around the block
        let d = self.origin.len();
        let lo: Vec<i64> = self.origin.iter().map(|a| a - 1).collect();
        let hi: Vec<i64> = self
            .origin
            .iter()
            .zip(&self.extent)
            .map(|(a, &e)| a + e as i64)
            .collect();
        let mut best = f64::INFINITY;
        let mut i = lo.clone();
        'outer: loop {
            if !self.member(&i) {
                let mut dist2 = 0.0;
                for l in 0..d {
                    let c = self.eps * i[l] as f64;
                    let gap = ((x[l] - c).abs() - 0.5 * self.eps).max(0.0);
                    dist2 += gap * gap;
                }
                best = best.min(dist2.sqrt());
            }
            for l in (0..d).rev() {
                i[l] += 1;
                if i[l] <= hi[l] {
                    continue 'outer;
                }
                i[l] = lo[l];
            }
            break;
        }
        best
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let lower = self
            .origin
            .iter()
            .map(|&a| self.eps * (a as f64 - 0.5))
            .collect();
        let upper = self
            .origin
            .iter()
            .zip(&self.extent)
            .map(|(&a, &e)| self.eps * (a as f64 + e as f64 - 0.5))
            .collect();
        (lower, upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_field_round_trip() {
        let dom = Arc::new(LatticeDomain::grid(0.25, &[0, 0], &[4, 4], &[true, false]).unwrap());
        let mut f =
            SpinField::from_fn(dom, 5, |i| PhaseIndex(((i[0] + 2 * i[1]) % 5) as u32)).unwrap();
        f.set_frozen(SiteSet::from_indices(16, [0, 3, 15]).unwrap())
            .unwrap();
        let json = field_to_json(&f).unwrap();
        let g = field_from_json(&json).unwrap();
        assert_eq!(g.values(), f.values());
        assert_eq!(g.frozen(), f.frozen());
        assert_eq!(g.domain().periodic(), f.domain().periodic());
        assert_eq!(g.energy(None), f.energy(None));
    }

    #[test]
    fn cube_field_round_trip() {
        let nu = Direction::rational(&[1, 2]).unwrap();
        let dom = Arc::new(LatticeDomain::unit_cube(0.125, &nu).unwrap());
        let f = SpinField::from_fn(dom, 3, |i| PhaseIndex((i[0].rem_euclid(3)) as u32)).unwrap();
        let g = field_from_json(&field_to_json(&f).unwrap()).unwrap();
        assert_eq!(g.values(), f.values());
        assert_eq!(g.domain().num_sites(), f.domain().num_sites());
    }

    #[test]
    fn mask_field_round_trip() {
        let json = r#"{"d":2,"eps":1.0,"N":4,"shape":{"kind":"mask"},"origin":[0,0],"extent":[3,3],
            "periodic":[false,false],"phases":[0,1,null,2,3,null,0,0,0],"frozen":[0]}"#;
        let f = field_from_json(json).unwrap();
        assert_eq!(f.domain().num_sites(), 7);
        assert_eq!(f.domain().bonds().len(), 8);
        let site = f.domain().site_at(&[1, 1]).unwrap();
        assert!((f.domain().boundary_distance(site) - 0.5).abs() < 1e-12);
        let back = SpinFieldRecord::from_field(&f);
        assert_eq!(back.phases[2], None);
        assert_eq!(back.phases[4], Some(3));
    }

    #[test]
    fn rejects_malformed_records() {
        let bad_len = r#"{"d":2,"eps":1.0,"N":4,"shape":{"kind":"mask"},"origin":[0,0],"extent":[2,2],
            "periodic":[false,false],"phases":[0,1,2],"frozen":[]}"#;
        assert!(field_from_json(bad_len).is_err());
        let unknown = r#"{"d":2,"eps":1.0,"N":4,"shape":{"kind":"mask"},"origin":[0,0],"extent":[1,1],
            "periodic":[false,false],"phases":[0],"frozen":[],"extra":1}"#;
        assert!(field_from_json(unknown).is_err());
        let bad_phase = r#"{"d":2,"eps":1.0,"N":2,"shape":{"kind":"mask"},"origin":[0,0],"extent":[1,2],
            "periodic":[false,false],"phases":[0,2],"frozen":[]}"#;
        assert!(field_from_json(bad_phase).is_err());
    }
}
