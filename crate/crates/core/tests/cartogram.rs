mod common;

use common::*;
use datacrunch::cartogram::{
    area_error, make_cartogram, rasterize_density, solve_displacement, transform_regions, DensityGrid,
    DisplacementField, GridSpec, DENSITY_FLOOR,
};
use datacrunch::geometry::{BBox, Point};
use proptest::prelude::*;

fn unit_bbox() -> BBox {
    BBox { xmin: 0.0, ymin: 0.0, xmax: 1.0, ymax: 1.0 }
}

/// Density constant in y with a step at `split` (fraction of the width).
fn step_grid(n: usize, split: f64, left: f64, right: f64) -> DensityGrid {
    let spec = GridSpec::new(n, n, unit_bbox(), 1.0).unwrap();
    let rho = (0..n)
        .flat_map(|_| (0..n).map(move |i| if (i as f64 + 0.5) / (n as f64) < split { left } else { right }))
        .collect();
    DensityGrid::new(spec, rho).unwrap()
}

#[test]
fn reference_integration_agrees_with_mass_conservation() {
    for (left, right) in [(3.0, 1.0), (1.0, 4.0), (2.0, 0.0)] {
        let x = reference_interface_1d(1024, 0.5, left, right, DENSITY_FLOOR);
        let want = mass_share(0.5, left, right);
        assert!((x - want).abs() < 2e-3, "{left}:{right} reference {x}, share {want}");
    }
}

#[test]
fn step_profile_matches_fine_reference() {
    for (left, right) in [(3.0, 1.0), (1.0, 4.0), (2.0, 0.0)] {
        let reference = reference_interface_1d(1024, 0.5, left, right, DENSITY_FLOOR);
        let field = solve_displacement(&step_grid(64, 0.5, left, right), 1e-3).unwrap();
        for j in [0, 17, 32, 64] {
            let x = field.node(32, j).x;
            assert!((x - reference).abs() < 0.01, "{left}:{right} row {j}: {x} vs {reference}");
        }
    }
}

#[test]
fn empty_half_is_squeezed_toward_the_wall() {
    // left half at twice the mean, right half empty
    let field = solve_displacement(&step_grid(64, 0.5, 2.0, 0.0), 1e-3).unwrap();
    let x = field.node(32, 32).x;
    assert!(x > 0.5, "interface must move into the empty side");
    assert!(x > 0.99, "left image holds {x} of the width");
}

#[test]
fn uniform_density_leaves_vertices_in_place() {
    let set = regions(&four_squares([1.0, 1.0, 1.0, 1.0]));
    let spec = GridSpec::fit(set.bbox(), 128, 1.5).unwrap();
    let field = solve_displacement(&rasterize_density(&set, &spec).unwrap(), 1e-3).unwrap();
    let out = transform_regions(&set, &field).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in set.regions().iter().zip(out.regions()) {
        for (ra, rb) in a.rings().zip(b.rings()) {
            for (p, q) in ra.iter().zip(rb) {
                worst = worst.max((p.x - q.x).hypot(p.y - q.y));
            }
        }
    }
    assert!(worst < 1e-6, "moved {worst}");
}

#[test]
fn constant_field_translates() {
    let spec = GridSpec::new(64, 64, BBox { xmin: 0.0, ymin: 0.0, xmax: 4.0, ymax: 4.0 }, 1.0).unwrap();
    let id = DisplacementField::identity(spec);
    let d = 0.125;
    let shifted: Vec<Point> = id.nodes.iter().map(|p| Point::new(p.x + d, p.y)).collect();
    let field = DisplacementField::new(spec, shifted, 0, 0.0);
    let set = regions(&two_squares(1.0, 2.0));
    let moved = transform_regions(&set, &field).unwrap();
    for (a, b) in set.regions().iter().zip(moved.regions()) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.statistic, b.statistic);
        for (ra, rb) in a.rings().zip(b.rings()) {
            assert_eq!(ra.len(), rb.len());
            assert_eq!(rb.first(), rb.last(), "ring stays closed");
            for (p, q) in ra.iter().zip(rb) {
                assert!((q.x - p.x - d).abs() < 1e-12 && (q.y - p.y).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn area_error_arithmetic() {
    let before = regions(&two_squares(1.0, 3.0));
    let after = regions(&two_squares(1.0, 3.0));
    let r = area_error(&before, &after).unwrap();
    // a: half the area, a quarter of the statistic
    assert!((r.per_region["a"] - 1.0).abs() < 1e-12);
    assert!((r.per_region["b"] - 1.0 / 3.0).abs() < 1e-12);

    let proportional = regions(&collection(&[square("a", 0.0, 0.0, 1.0, 1.0), square("b", 1.0, 0.0, 3f64.sqrt(), 3.0)]));
    let r = area_error(&proportional, &proportional).unwrap();
    assert!(r.max_err < 1e-12);
}

#[test]
fn rasterized_densities_follow_statistic_over_area() {
    let set = regions(&two_squares(1.0, 3.0));
    let spec = GridSpec::fit(set.bbox(), 64, 1.5).unwrap();
    let g = rasterize_density(&set, &spec).unwrap();
    let cell = |x: f64, y: f64| {
        let i = ((x - spec.bbox.xmin) / spec.cell_width()) as usize;
        let j = ((y - spec.bbox.ymin) / spec.cell_height()) as usize;
        g.at(i, j)
    };
    let (a, b) = (cell(0.5, 0.5), cell(1.5, 0.5));
    assert!((b / a - 3.0).abs() < 0.06, "{a} {b}");
    // sea carries the statistic-weighted land density: (1 * 1 + 3 * 3) / 4
    let sea = cell(spec.bbox.xmin + 0.01, 0.5);
    assert!((sea - 2.5).abs() < 1e-12, "{sea} in {spec:?}");
}

#[test]
fn error_shrinks_as_tolerance_tightens() {
    for fixture in [two_squares(1.0, 3.0), four_squares([1.0, 2.0, 3.0, 4.0]), mixed_shapes()] {
        let set = regions(&fixture);
        let spec = GridSpec::fit(set.bbox(), 128, 1.5).unwrap();
        let errs: Vec<f64> =
            [1e-1, 1e-2, 1e-3].iter().map(|&tol| make_cartogram(&set, spec, tol).unwrap().report.max_err).collect();
        assert!(errs[0] >= errs[1] && errs[1] >= errs[2], "{errs:?}");
    }
}

#[test]
fn fixtures_do_not_fold() {
    for fixture in [two_squares(1.0, 3.0), two_squares(1.0, 10.0), four_squares([1.0, 2.0, 3.0, 4.0]), mixed_shapes()] {
        let set = regions(&fixture);
        let spec = GridSpec::fit(set.bbox(), 128, 1.5).unwrap();
        for tol in [1e-2, 1e-3] {
            let field = make_cartogram(&set, spec, tol).unwrap().field;
            assert_eq!(field.fold_count(), 0);
            assert!(field.min_cell_area() > 0.0);
        }
    }
}

#[test]
fn two_squares_reach_one_to_three() {
    let set = regions(&two_squares(1.0, 3.0));
    let spec = GridSpec::fit(set.bbox(), 256, 1.5).unwrap();
    let out = make_cartogram(&set, spec, 1e-3).unwrap();
    let a = areas(&out.regions);
    let ratio = a["b"] / a["a"];
    assert!((ratio / 3.0 - 1.0).abs() < 0.04, "ratio {ratio}");
    assert!(out.report.max_err < 0.02, "{:?}", out.report);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn total_area_is_conserved(stats in prop::array::uniform4(0.2f64..8.0)) {
        let set = regions(&four_squares(stats));
        let spec = GridSpec::fit(set.bbox(), 64, 1.5).unwrap();
        let out = make_cartogram(&set, spec, 1e-3).unwrap();
        let domain = spec.bbox.area();
        prop_assert!((out.field.total_area() - domain).abs() / domain < 0.005);
        // the image of the land is still inside the domain
        for r in out.regions.regions() {
            for ring in r.rings() {
                for p in ring {
                    prop_assert!(spec.bbox.contains(*p));
                }
            }
        }
    }

    #[test]
    fn scaling_statistics_changes_nothing(stats in prop::array::uniform4(0.2f64..8.0), scale in 0.01f64..100.0) {
        let set = regions(&four_squares(stats));
        let scaled = regions(&four_squares(stats.map(|s| s * scale)));
        let spec = GridSpec::fit(set.bbox(), 64, 1.5).unwrap();
        let f = solve_displacement(&rasterize_density(&set, &spec).unwrap(), 1e-3).unwrap();
        let g = solve_displacement(&rasterize_density(&scaled, &spec).unwrap(), 1e-3).unwrap();
        prop_assert_eq!(f.steps, g.steps);
        for (p, q) in f.nodes.iter().zip(&g.nodes) {
            prop_assert!((p.x - q.x).abs() < 1e-9 && (p.y - q.y).abs() < 1e-9);
        }
    }
}
