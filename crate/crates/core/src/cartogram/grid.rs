use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CartogramError;
use crate::geometry::{scanline_crossings, BBox};
use crate::io::RegionSet;

/// Samples per cell along each axis when estimating region coverage.
pub const SUPERSAMPLE: usize = 4;

/// Zero-statistic regions get this fraction of the mean land density.
pub const ZERO_STATISTIC_FRACTION: f64 = 1e-4;

pub const MIN_CELLS: usize = 64;

/// Discretization of the padded map domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// The padded domain.
    pub bbox: BBox,
    pub pad_factor: f64,
}

impl GridSpec {
    pub const DEFAULT_PAD: f64 = 1.5;

    pub fn new(nx: usize, ny: usize, bbox: BBox, pad_factor: f64) -> Result<Self, CartogramError> {
        for (axis, n) in [("nx", nx), ("ny", ny)] {
            if !n.is_power_of_two() || n < MIN_CELLS {
                return Err(CartogramError::InvalidGrid(format!(
                    "{axis} = {n} must be a power of two >= {MIN_CELLS}"
                )));
            }
        }
        if bbox.is_degenerate() {
            return Err(CartogramError::InvalidGrid("degenerate bounding box".into()));
        }
        if !(pad_factor >= 1.0 && pad_factor.is_finite()) {
            return Err(CartogramError::InvalidGrid(format!("pad factor {pad_factor} < 1")));
        }
        Ok(GridSpec { nx, ny, bbox, pad_factor })
    }

    /// Square cells over `content` grown by `pad_factor` about its center. The
    /// longer side gets `cells` cells; the shorter gets the smallest power of two
    /// (at least 64) that covers it, and the domain is widened to match.
    pub fn fit(content: BBox, cells: usize, pad_factor: f64) -> Result<Self, CartogramError> {
        if content.is_degenerate() {
            return Err(CartogramError::InvalidGrid("content has a degenerate bounding box".into()));
        }
        if !(pad_factor >= 1.0 && pad_factor.is_finite()) {
            return Err(CartogramError::InvalidGrid(format!("pad factor {pad_factor} < 1")));
        }
        if !cells.is_power_of_two() || cells < MIN_CELLS {
            return Err(CartogramError::InvalidGrid(format!(
                "grid size {cells} must be a power of two >= {MIN_CELLS}"
            )));
        }
        let (w, h) = (content.width() * pad_factor, content.height() * pad_factor);
        let cell = w.max(h) / cells as f64;
        let fit_axis = |len: f64| ((len / cell).ceil() as usize).next_power_of_two().clamp(MIN_CELLS, cells);
        let (nx, ny) = if w >= h { (cells, fit_axis(h)) } else { (fit_axis(w), cells) };
        let cx = 0.5 * (content.xmin + content.xmax);
        let cy = 0.5 * (content.ymin + content.ymax);
        let (hw, hh) = (0.5 * nx as f64 * cell, 0.5 * ny as f64 * cell);
        let bbox = BBox { xmin: cx - hw, ymin: cy - hh, xmax: cx + hw, ymax: cy + hh };
        GridSpec::new(nx, ny, bbox, pad_factor)
    }

    pub fn cell_width(&self) -> f64 {
        self.bbox.width() / self.nx as f64
    }

    pub fn cell_height(&self) -> f64 {
        self.bbox.height() / self.ny as f64
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }
}

/// Cell densities, row-major with `rho[iy * nx + ix]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub spec: GridSpec,
    pub rho: Vec<f64>,
    pub mean_rho: f64,
}

impl DensityGrid {
    pub fn new(spec: GridSpec, rho: Vec<f64>) -> Result<Self, CartogramError> {
        if rho.len() != spec.cell_count() {
            return Err(CartogramError::InvalidDensity(format!(
                "{} cells for a {}x{} grid",
                rho.len(),
                spec.nx,
                spec.ny
            )));
        }
        if rho.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return Err(CartogramError::InvalidDensity("densities must be finite and >= 0".into()));
        }
        let mean_rho = rho.iter().sum::<f64>() / rho.len() as f64;
        if mean_rho <= 0.0 {
            return Err(CartogramError::InvalidDensity("all cells are zero".into()));
        }
        Ok(DensityGrid { spec, rho, mean_rho })
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.rho[iy * self.spec.nx + ix]
    }
}

/// Cell density = coverage-weighted mix of region densities (statistic / area)
/// and the sea density, which is the statistic-weighted mean land density.
pub fn rasterize_density(regions: &RegionSet, spec: &GridSpec) -> Result<DensityGrid, CartogramError> {
    for r in regions.regions() {
        let b = r.bbox();
        let inside = spec.bbox.contains(crate::geometry::Point::new(b.xmin, b.ymin))
            && spec.bbox.contains(crate::geometry::Point::new(b.xmax, b.ymax));
        if !inside {
            return Err(CartogramError::RegionOutsideDomain(r.id.clone()));
        }
    }

    let mut land_density = Vec::with_capacity(regions.len());
    for r in regions.regions() {
        let area = r.area();
        if area <= 0.0 {
            if r.statistic > 0.0 {
                return Err(CartogramError::ZeroAreaRegion(r.id.clone()));
            }
            land_density.push(0.0);
        } else {
            land_density.push(r.statistic / area);
        }
    }
    let total_stat = regions.total_statistic();
    let sea: f64 = regions
        .regions()
        .iter()
        .zip(&land_density)
        .map(|(r, d)| r.statistic * d)
        .sum::<f64>()
        / total_stat;
    for d in &mut land_density {
        if *d == 0.0 {
            *d = ZERO_STATISTIC_FRACTION * sea;
        }
    }

    let (nx, ny) = (spec.nx, spec.ny);
    let sx = nx * SUPERSAMPLE;
    let dxs = spec.cell_width() / SUPERSAMPLE as f64;
    let dys = spec.cell_height() / SUPERSAMPLE as f64;
    let bounds: Vec<BBox> = regions.regions().iter().map(|r| r.bbox()).collect();

    let rows: Vec<Result<Vec<f64>, CartogramError>> = (0..ny)
        .into_par_iter()
        .map(|iy| {
            let mut sums = vec![0.0; nx];
            let mut owner = vec![usize::MAX; sx];
            let mut xs = Vec::new();
            for s in 0..SUPERSAMPLE {
                owner.fill(usize::MAX);
                let y = spec.bbox.ymin + ((iy * SUPERSAMPLE + s) as f64 + 0.5) * dys;
                for (ri, region) in regions.regions().iter().enumerate() {
                    if y < bounds[ri].ymin || y > bounds[ri].ymax {
                        continue;
                    }
                    xs.clear();
                    for ring in region.rings() {
                        scanline_crossings(ring, y, &mut xs);
                    }
                    xs.sort_by(f64::total_cmp);
                    for span in xs.chunks_exact(2) {
                        // sample j sits at xmin + (j + 0.5) dxs; take x0 <= x < x1
                        let j0 = (((span[0] - spec.bbox.xmin) / dxs - 0.5).ceil().max(0.0)) as usize;
                        let j1 = (((span[1] - spec.bbox.xmin) / dxs - 0.5).ceil().max(0.0) as usize).min(sx);
                        for slot in &mut owner[j0.min(sx)..j1] {
                            if *slot != usize::MAX && *slot != ri {
                                return Err(CartogramError::Overlap(
                                    regions.regions()[*slot].id.clone(),
                                    region.id.clone(),
                                ));
                            }
                            *slot = ri;
                        }
                    }
                }
                for (j, &o) in owner.iter().enumerate() {
                    sums[j / SUPERSAMPLE] += if o == usize::MAX { sea } else { land_density[o] };
                }
            }
            let norm = (SUPERSAMPLE * SUPERSAMPLE) as f64;
            Ok(sums.into_iter().map(|v| v / norm).collect())
        })
        .collect();

    let mut rho = Vec::with_capacity(nx * ny);
    for row in rows {
        rho.extend(row?);
    }
    DensityGrid::new(*spec, rho)
}
