//! Heat-equation solution on a rectangle with zero-flux walls, in the cosine
//! basis. Lengths are in cell units and densities are divided by their mean.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustdct::{DctPlanner, TransformType2And3};

use super::DensityGrid;

/// Lower bound on the normalized density in the velocity denominator.
pub const DENSITY_FLOOR: f64 = 1e-4;

/// Density and diffusive flux `-grad(rho)` at cell centers, row-major
/// `[iy * nx + ix]`.
#[derive(Debug, Clone)]
pub struct Fields {
    pub nx: usize,
    pub ny: usize,
    pub rho: Vec<f64>,
    pub qx: Vec<f64>,
    pub qy: Vec<f64>,
}

impl Fields {
    /// Largest `|rho - 1|`.
    pub fn residual(&self) -> f64 {
        self.rho.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Largest cell-center speed.
    pub fn max_speed(&self) -> f64 {
        (0..self.rho.len())
            .map(|k| self.qx[k].hypot(self.qy[k]) / self.rho[k].max(DENSITY_FLOOR))
            .fold(0.0, f64::max)
    }

    /// Velocity `q / rho` at `(x, y)` in cell units, with flux and density
    /// interpolated bilinearly and divided afterwards. Outside the cell-center
    /// lattice the fields are mirrored across the walls: the normal flux flips
    /// sign, so the normal velocity vanishes on the boundary.
    pub fn velocity(&self, x: f64, y: f64) -> (f64, f64) {
        let fx = (x - 0.5).clamp(-0.5, self.nx as f64 - 0.5);
        let fy = (y - 0.5).clamp(-0.5, self.ny as f64 - 0.5);
        let i0 = fx.floor() as isize;
        let j0 = fy.floor() as isize;
        let (tx, ty) = (fx - i0 as f64, fy - j0 as f64);
        let (mut qx, mut qy, mut rho) = (0.0, 0.0, 0.0);
        for (dj, wy) in [(0, 1.0 - ty), (1, ty)] {
            for (di, wx) in [(0, 1.0 - tx), (1, tx)] {
                let w = wx * wy;
                if w == 0.0 {
                    continue;
                }
                let (a, b, r) = self.sample(i0 + di, j0 + dj);
                qx += w * a;
                qy += w * b;
                rho += w * r;
            }
        }
        let d = rho.max(DENSITY_FLOOR);
        (qx / d, qy / d)
    }

    fn sample(&self, i: isize, j: isize) -> (f64, f64, f64) {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        let (ci, sx) = mirror(i, nx);
        let (cj, sy) = mirror(j, ny);
        let k = (cj * nx + ci) as usize;
        (sx * self.qx[k], sy * self.qy[k], self.rho[k])
    }
}

/// Index of the ghost cell's mirror image and the sign of the normal component.
fn mirror(i: isize, n: isize) -> (isize, f64) {
    if i < 0 {
        (0, -1.0)
    } else if i >= n {
        (n - 1, -1.0)
    } else {
        (i, 1.0)
    }
}

pub struct DiffusionSolver {
    nx: usize,
    ny: usize,
    /// DCT-II coefficients of the normalized density, row-major `[ky * nx + kx]`.
    coeffs: Vec<f64>,
    plan_x: Arc<dyn TransformType2And3<f64>>,
    plan_y: Arc<dyn TransformType2And3<f64>>,
}

impl DiffusionSolver {
    pub fn new(grid: &DensityGrid) -> Self {
        let (nx, ny) = (grid.spec.nx, grid.spec.ny);
        let mut planner = DctPlanner::new();
        let plan_x = planner.plan_dct2(nx);
        let plan_y = planner.plan_dct2(ny);
        let mut coeffs: Vec<f64> = grid.rho.iter().map(|r| r / grid.mean_rho).collect();
        rows(&mut coeffs, nx, |r| plan_x.process_dct2(r));
        columns(&mut coeffs, nx, ny, |c| plan_y.process_dct2(c));
        DiffusionSolver { nx, ny, coeffs, plan_x, plan_y }
    }

    pub fn fields(&self, t: f64) -> Fields {
        let (nx, ny) = (self.nx, self.ny);
        let kx: Vec<f64> = (0..nx).map(|i| PI * i as f64 / nx as f64).collect();
        let ky: Vec<f64> = (0..ny).map(|j| PI * j as f64 / ny as f64).collect();
        let decay_x: Vec<f64> = kx.iter().map(|k| (-k * k * t).exp()).collect();
        let decay_y: Vec<f64> = ky.iter().map(|k| (-k * k * t).exp()).collect();

        let mut c = self.coeffs.clone();
        for (j, row) in c.chunks_exact_mut(nx).enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                *v *= decay_x[i] * decay_y[j];
            }
        }

        // x derivative of cos(k x) is -k sin(k x); DST-III indexes sine modes from 1
        let mut dx = c.clone();
        rows(&mut dx, nx, |r| {
            shift_down(r, &kx);
            self.plan_x.process_dst3(r)
        });
        rows(&mut c, nx, |r| self.plan_x.process_dct3(r));

        let mut dy = c.clone();
        columns(&mut dy, nx, ny, |col| {
            shift_down(col, &ky);
            self.plan_y.process_dst3(col)
        });
        columns(&mut c, nx, ny, |col| self.plan_y.process_dct3(col));
        columns(&mut dx, nx, ny, |col| self.plan_y.process_dct3(col));

        let norm = 4.0 / (nx * ny) as f64;
        let rho: Vec<f64> = c.iter().map(|v| v * norm).collect();
        let qx = dx.iter().map(|g| -g * norm).collect();
        let qy = dy.iter().map(|g| -g * norm).collect();
        Fields { nx, ny, rho, qx, qy }
    }
}

/// `out[k - 1] = -wavenumber[k] * in[k]`, last slot zero.
fn shift_down(buf: &mut [f64], wavenumber: &[f64]) {
    let n = buf.len();
    for k in 1..n {
        buf[k - 1] = -wavenumber[k] * buf[k];
    }
    buf[n - 1] = 0.0;
}

fn rows(data: &mut [f64], width: usize, f: impl Fn(&mut [f64]) + Sync + Send) {
    data.par_chunks_exact_mut(width).for_each(f);
}

fn columns(data: &mut [f64], nx: usize, ny: usize, f: impl Fn(&mut [f64]) + Sync + Send) {
    let mut t = transpose(data, nx, ny);
    rows(&mut t, ny, f);
    data.copy_from_slice(&transpose(&t, ny, nx));
}

/// `data` has `h` rows of width `w`; the result has `w` rows of width `h`.
fn transpose(data: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for j in 0..h {
        for i in 0..w {
            out[i * h + j] = data[j * w + i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartogram::GridSpec;
    use crate::geometry::BBox;

    fn grid_from(nx: usize, ny: usize, f: impl Fn(usize, usize) -> f64) -> DensityGrid {
        let bbox = BBox { xmin: 0.0, ymin: 0.0, xmax: nx as f64, ymax: ny as f64 };
        let spec = GridSpec::new(nx, ny, bbox, 1.0).unwrap();
        let rho = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).map(|(i, j)| f(i, j)).collect();
        DensityGrid::new(spec, rho).unwrap()
    }

    #[test]
    fn time_zero_reproduces_density() {
        let g = grid_from(64, 128, |i, j| 1.0 + ((i * 7 + j * 3) % 11) as f64);
        let f = DiffusionSolver::new(&g).fields(0.0);
        for (a, b) in f.rho.iter().zip(&g.rho) {
            assert!((a - b / g.mean_rho).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_decays_with_exact_gradient() {
        // rho = 1 + 0.5 cos(pi x / 32) on a 64-cell axis; x at cell centers
        let (nx, ny) = (64, 64);
        let k = PI / 32.0;
        let g = grid_from(nx, ny, |i, _| 1.0 + 0.5 * (k * (i as f64 + 0.5)).cos());
        let t = 7.5;
        let f = DiffusionSolver::new(&g).fields(t);
        let amp = 0.5 * (-k * k * t).exp();
        for i in 0..nx {
            let x = i as f64 + 0.5;
            let rho = 1.0 + amp * (k * x).cos();
            let grad = -amp * k * (k * x).sin();
            let at = 5 * nx + i;
            assert!((f.rho[at] - rho).abs() < 1e-12);
            assert!((f.qx[at] + grad).abs() < 1e-12);
            assert!(f.qy[at].abs() < 1e-12);
            let (vx, vy) = f.velocity(x, 5.5);
            assert!((vx + grad / rho).abs() < 1e-12);
            assert!(vy.abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_density_is_still() {
        let g = grid_from(64, 64, |_, _| 3.0);
        let f = DiffusionSolver::new(&g).fields(0.0);
        assert!(f.residual() < 1e-12);
        assert!(f.max_speed() < 1e-12);
    }

    #[test]
    fn wall_normal_velocity_vanishes() {
        let g = grid_from(64, 64, |i, j| 1.0 + (i * j) as f64 / 100.0);
        let f = DiffusionSolver::new(&g).fields(4.0);
        for s in [0.0, 10.3, 63.9, 64.0] {
            assert_eq!(f.velocity(0.0, s).0, 0.0);
            assert_eq!(f.velocity(64.0, s).0, 0.0);
            assert_eq!(f.velocity(s, 0.0).1, 0.0);
            assert_eq!(f.velocity(s, 64.0).1, 0.0);
        }
    }
}
