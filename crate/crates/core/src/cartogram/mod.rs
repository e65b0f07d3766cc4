//! Density-equalizing cartograms by linear diffusion.
//!
//! Region statistics are rasterized into a density grid over a padded domain,
//! the density is relaxed to uniformity under the heat equation with zero-flux
//! walls, and tracers riding the flux velocity `-grad(rho) / rho` record where
//! each point of the domain ends up. Region vertices are then pushed through
//! that displacement field. The map preserves total domain area, and a region's
//! final area is proportional to its statistic.

mod field;
mod grid;
mod solve;
mod spectral;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::densify;
use crate::io::RegionSet;

pub use field::{transform_regions, DisplacementField};
pub use grid::{rasterize_density, DensityGrid, GridSpec, MIN_CELLS, SUPERSAMPLE, ZERO_STATISTIC_FRACTION};
pub use solve::{solve_displacement, MAX_CELLS_PER_STEP, MAX_STEPS};
pub use spectral::DENSITY_FLOOR;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CartogramError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid density grid: {0}")]
    InvalidDensity(String),
    #[error("tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    #[error("region `{0}` lies outside the padded domain")]
    RegionOutsideDomain(String),
    #[error("regions `{0}` and `{1}` overlap")]
    Overlap(String, String),
    #[error("region `{0}` has zero area but a positive statistic")]
    ZeroAreaRegion(String),
    #[error("diffusion did not converge within {steps} steps (residual {residual:.3e})")]
    NonConvergence { steps: usize, residual: f64 },
    #[error("vertex ({x}, {y}) lies outside the displacement domain")]
    VertexOutsideDomain { x: f64, y: f64 },
    #[error("region ids differ: `{0}`")]
    IdMismatch(String),
}

/// Relative area error per region against its statistic share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaErrorReport {
    pub max_err: f64,
    pub mean_err: f64,
    pub per_region: BTreeMap<String, f64>,
}

/// `|area share - statistic share| / statistic share` for each region. Regions
/// with a zero statistic have no relative error; their absolute area share is
/// reported instead.
pub fn area_error(before: &RegionSet, after: &RegionSet) -> Result<AreaErrorReport, CartogramError> {
    if before.len() != after.len() {
        return Err(CartogramError::IdMismatch(format!(
            "{} regions before, {} after",
            before.len(),
            after.len()
        )));
    }
    let total_stat = before.total_statistic();
    let total_area: f64 = after.regions().iter().map(|r| r.area()).sum();
    let mut per_region = BTreeMap::new();
    for r in before.regions() {
        let a = after.get(&r.id).ok_or_else(|| CartogramError::IdMismatch(r.id.clone()))?;
        let stat_share = r.statistic / total_stat;
        let area_share = a.area() / total_area;
        let err = if stat_share > 0.0 {
            (area_share - stat_share).abs() / stat_share
        } else {
            area_share
        };
        per_region.insert(r.id.clone(), err);
    }
    let max_err = per_region.values().copied().fold(0.0, f64::max);
    let mean_err = per_region.values().sum::<f64>() / per_region.len() as f64;
    Ok(AreaErrorReport { max_err, mean_err, per_region })
}

/// Everything the cartogram pipeline produces.
#[derive(Debug, Clone)]
pub struct Cartogram {
    pub grid: DensityGrid,
    pub field: DisplacementField,
    pub regions: RegionSet,
    pub report: AreaErrorReport,
}

/// Rasterize, diffuse and transform in one call. Region boundaries are
/// resampled to at most half a cell per segment first so edges bend with the map.
pub fn make_cartogram(
    regions: &RegionSet,
    spec: GridSpec,
    tolerance: f64,
) -> Result<Cartogram, CartogramError> {
    let grid = rasterize_density(regions, &spec)?;
    let field = solve_displacement(&grid, tolerance)?;
    let fine = densify_regions(regions, 0.5 * spec.cell_width().min(spec.cell_height()));
    let transformed = transform_regions(&fine, &field)?;
    let report = area_error(regions, &transformed)?;
    Ok(Cartogram { grid, field, regions: transformed, report })
}

pub fn densify_regions(regions: &RegionSet, max_segment: f64) -> RegionSet {
    let mut out = regions.regions().to_vec();
    for r in &mut out {
        for p in &mut r.polygons {
            for ring in p.rings_mut() {
                *ring = densify(ring, max_segment);
            }
        }
    }
    RegionSet::from_parts_unchecked(out)
}
