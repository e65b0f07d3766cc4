use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CartogramError, GridSpec};
use crate::geometry::{quad_area, Point};
use crate::io::RegionSet;

/// Final positions of the `(nx + 1) x (ny + 1)` cell corners, row-major
/// `[j * (nx + 1) + i]`, in map coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementField {
    pub spec: GridSpec,
    pub nodes: Vec<Point>,
    pub steps: usize,
    pub residual: f64,
}

impl DisplacementField {
    pub fn new(spec: GridSpec, nodes: Vec<Point>, steps: usize, residual: f64) -> Self {
        assert_eq!(nodes.len(), (spec.nx + 1) * (spec.ny + 1));
        DisplacementField { spec, nodes, steps, residual }
    }

    pub fn identity(spec: GridSpec) -> Self {
        let (hx, hy) = (spec.cell_width(), spec.cell_height());
        let nodes = (0..=spec.ny)
            .flat_map(|j| {
                (0..=spec.nx)
                    .map(move |i| Point::new(spec.bbox.xmin + i as f64 * hx, spec.bbox.ymin + j as f64 * hy))
            })
            .collect();
        DisplacementField::new(spec, nodes, 0, 0.0)
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        self.nodes[j * (self.spec.nx + 1) + i]
    }

    pub fn is_identity(&self) -> bool {
        *self == DisplacementField { steps: self.steps, residual: self.residual, ..Self::identity(self.spec) }
    }

    /// Signed area of each displaced cell, row-major.
    pub fn cell_areas(&self) -> Vec<f64> {
        let nx = self.spec.nx;
        (0..self.spec.ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| quad_area(self.node(i, j), self.node(i + 1, j), self.node(i + 1, j + 1), self.node(i, j + 1)))
            .collect()
    }

    pub fn total_area(&self) -> f64 {
        self.cell_areas().iter().sum()
    }

    pub fn min_cell_area(&self) -> f64 {
        self.cell_areas().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Cells turned inside out by the map.
    pub fn fold_count(&self) -> usize {
        self.cell_areas().into_iter().filter(|&a| a < 0.0).count()
    }

    /// Bilinear image of `p` inside its original cell.
    pub fn apply(&self, p: Point) -> Result<Point, CartogramError> {
        let s = &self.spec;
        let fx = (p.x - s.bbox.xmin) / s.cell_width();
        let fy = (p.y - s.bbox.ymin) / s.cell_height();
        let (nx, ny) = (s.nx as f64, s.ny as f64);
        if !(fx >= 0.0 && fx <= nx && fy >= 0.0 && fy <= ny) {
            return Err(CartogramError::VertexOutsideDomain { x: p.x, y: p.y });
        }
        let i = (fx.floor() as usize).min(s.nx - 1);
        let j = (fy.floor() as usize).min(s.ny - 1);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let (a, b) = (self.node(i, j), self.node(i + 1, j));
        let (c, d) = (self.node(i, j + 1), self.node(i + 1, j + 1));
        let lerp = |u: f64, v: f64, w: f64| u + (v - u) * w;
        Ok(Point::new(
            lerp(lerp(a.x, b.x, tx), lerp(c.x, d.x, tx), ty),
            lerp(lerp(a.y, b.y, tx), lerp(c.y, d.y, tx), ty),
        ))
    }
}

/// Pushes every vertex through the field. Region ids, order and statistics are kept.
pub fn transform_regions(regions: &RegionSet, field: &DisplacementField) -> Result<RegionSet, CartogramError> {
    let mut out = regions.regions().to_vec();
    out.par_iter_mut().try_for_each(|r| {
        for poly in &mut r.polygons {
            for ring in poly.rings_mut() {
                for p in ring.iter_mut() {
                    *p = field.apply(*p)?;
                }
            }
        }
        Ok(())
    })?;
    Ok(RegionSet::from_parts_unchecked(out))
}
