use rayon::prelude::*;

use super::spectral::{DiffusionSolver, Fields};
use super::{CartogramError, DensityGrid, DisplacementField};
use crate::geometry::Point;

/// Integration steps allowed before giving up.
pub const MAX_STEPS: usize = 64;

/// No tracer may move further than this many cells in one step.
pub const MAX_CELLS_PER_STEP: f64 = 2.0;

/// First time step, in squared cell units.
const T0: f64 = 1.0;

/// Advects the cell corners with the diffusion flux until the density is
/// uniform to within `tolerance` (largest `|rho / mean - 1|`).
///
/// The first step is one squared cell; after that the step equals the elapsed
/// time (so time doubles) unless that would move the fastest tracer more than
/// [`MAX_CELLS_PER_STEP`] cells. Each step uses classical RK4. Near-empty
/// regions drive large speeds and therefore many short steps.
pub fn solve_displacement(grid: &DensityGrid, tolerance: f64) -> Result<DisplacementField, CartogramError> {
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(CartogramError::InvalidTolerance(tolerance));
    }
    let spec = grid.spec;
    let (nx, ny) = (spec.nx, spec.ny);
    let solver = DiffusionSolver::new(grid);

    let mut nodes: Vec<(f64, f64)> =
        (0..=ny).flat_map(|j| (0..=nx).map(move |i| (i as f64, j as f64))).collect();
    let mut t: f64 = 0.0;
    let mut now = solver.fields(0.0);
    let mut residual = now.residual();
    let mut steps = 0;

    while residual >= tolerance {
        if steps == MAX_STEPS {
            return Err(CartogramError::NonConvergence { steps, residual });
        }
        // the t = 0 field is a raw step whose gradient is all ringing, so the
        // first step is not speed limited
        let speed = now.max_speed();
        let dt = if t == 0.0 {
            T0
        } else if speed > 0.0 {
            t.min(MAX_CELLS_PER_STEP / speed)
        } else {
            t
        };
        let mid = solver.fields(t + 0.5 * dt);
        let end = solver.fields(t + dt);
        let (xmax, ymax) = (nx as f64, ny as f64);
        nodes.par_iter_mut().for_each(|p| {
            let (x, y) = rk4(*p, dt, &now, &mid, &end);
            *p = (x.clamp(0.0, xmax), y.clamp(0.0, ymax));
        });
        t += dt;
        now = end;
        residual = now.residual();
        steps += 1;
    }

    let (hx, hy) = (spec.cell_width(), spec.cell_height());
    let nodes = nodes
        .into_iter()
        .map(|(x, y)| Point::new(spec.bbox.xmin + x * hx, spec.bbox.ymin + y * hy))
        .collect();
    Ok(DisplacementField::new(spec, nodes, steps, residual))
}

fn rk4(p: (f64, f64), dt: f64, now: &Fields, mid: &Fields, end: &Fields) -> (f64, f64) {
    let k1 = now.velocity(p.0, p.1);
    let k2 = mid.velocity(p.0 + 0.5 * dt * k1.0, p.1 + 0.5 * dt * k1.1);
    let k3 = mid.velocity(p.0 + 0.5 * dt * k2.0, p.1 + 0.5 * dt * k2.1);
    let k4 = end.velocity(p.0 + dt * k3.0, p.1 + dt * k3.1);
    (
        p.0 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        p.1 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}
