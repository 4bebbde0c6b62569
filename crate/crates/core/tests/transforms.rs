use indepmaps_core::qmc::r2_points;
use indepmaps_core::transforms::{
    apply, f1_partials, f3_domain_map_check, finite_difference_jacobian, involution_defect_relative,
    jacobian_det, jacobian_matrix, linear_form, region_of, Location, Region,
};
use indepmaps_core::{Error, PlanePoint, TransformSpec};
use proptest::prelude::*;

fn pt(x: f64, y: f64) -> PlanePoint {
    PlanePoint::new(x, y)
}

/// F2 written region by region, as printed.
fn f2_piecewise(x: f64, y: f64) -> (f64, f64) {
    if x > 0.0 && y > 0.0 {
        (-y, -x - y)
    } else if x < 0.0 && y > 0.0 {
        (x - y, -y)
    } else if x < 0.0 && y < 0.0 && x < y {
        (x - y, -y)
    } else if x < 0.0 && y < 0.0 {
        (x - y, -x)
    } else {
        (-y, -x)
    }
}

/// F3 written region by region, as printed.
fn f3_piecewise(x: f64, y: f64) -> (f64, f64) {
    if x > -y {
        (-x, y + 2.0 * x)
    } else {
        (y, x)
    }
}

fn f2_region(x: f64, y: f64) -> Region {
    region_of(&TransformSpec::F2, pt(x, y)).region().unwrap()
}

fn det(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn off_f2_lines(x: f64, y: f64) -> bool {
    let tol = 1e-6 * (1.0 + x.abs().max(y.abs()));
    x.abs() > tol && y.abs() > tol && (x - y).abs() > tol
}

prop_compose! {
    fn f1_spec()(alpha in 0.0f64..6.0, beta in 0.0f64..6.0) -> TransformSpec {
        let beta = if (alpha - beta).abs() < 1e-3 { beta + 0.5 } else { beta };
        TransformSpec::f1(alpha, beta).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn f1_is_an_involution(spec in f1_spec(), lx in -8.0f64..8.0, ly in -8.0f64..8.0) {
        let p = pt(lx.exp(), ly.exp());
        let back = apply(&spec, apply(&spec, p).unwrap()).unwrap();
        prop_assert!(((back.x - p.x) / p.x).abs() <= 1e-12);
        prop_assert!(((back.y - p.y) / p.y).abs() <= 1e-12);
    }

    #[test]
    fn f1_conserves_the_product(spec in f1_spec(), lx in -8.0f64..8.0, ly in -8.0f64..8.0) {
        let p = pt(lx.exp(), ly.exp());
        let q = apply(&spec, p).unwrap();
        prop_assert!(q.x > 0.0 && q.y > 0.0);
        prop_assert!(((q.x * q.y - p.x * p.y) / (p.x * p.y)).abs() <= 1e-14);
    }

    #[test]
    fn f1_jacobian(spec in f1_spec(), lx in -4.0f64..4.0, ly in -4.0f64..4.0) {
        let p = pt(lx.exp(), ly.exp());
        prop_assert!((jacobian_det(&spec, p).unwrap() + 1.0).abs() <= 1e-12);
        let fd = finite_difference_jacobian(&spec, p, 1e-6).unwrap();
        prop_assert!((det(fd) + 1.0).abs() <= 1e-6);
        let an = jacobian_matrix(&spec, p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((fd[i][j] - an[i][j]).abs() <= 1e-6 * (1.0 + an[i][j].abs()));
            }
        }
    }

    #[test]
    fn f1_partials_agree_in_both_variables(spec in f1_spec(), lx in -4.0f64..4.0, ly in -4.0f64..4.0) {
        let d = f1_partials(&spec, pt(lx.exp(), ly.exp())).unwrap();
        for (a, b) in d.xy_form.as_array().into_iter().zip(d.uv_form.as_array()) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{:?}", d);
        }
    }

    #[test]
    fn f2_matches_piecewise_definition(x in -50.0f64..50.0, y in -50.0f64..50.0) {
        prop_assume!(off_f2_lines(x, y));
        let q = apply(&TransformSpec::F2, pt(x, y)).unwrap();
        prop_assert_eq!((q.x, q.y), f2_piecewise(x, y));
        let back = apply(&TransformSpec::F2, q).unwrap();
        prop_assert!((back.x - x).abs().max((back.y - y).abs()) <= 1e-12 * x.abs().max(y.abs()));
    }

    #[test]
    fn f2_region_pairing(x in -50.0f64..50.0, y in -50.0f64..50.0) {
        prop_assume!(off_f2_lines(x, y));
        let q = apply(&TransformSpec::F2, pt(x, y)).unwrap();
        prop_assume!(off_f2_lines(q.x, q.y));
        let expected = match f2_region(x, y) {
            Region::R1 => Region::R4,
            Region::R4 => Region::R1,
            Region::R2 => Region::R3,
            Region::R3 => Region::R2,
            Region::R5 => Region::R5,
            Region::PositiveQuadrant => unreachable!(),
        };
        prop_assert_eq!(f2_region(q.x, q.y), expected);
    }

    #[test]
    fn f2_jacobian(x in -50.0f64..50.0, y in -50.0f64..50.0) {
        prop_assume!(off_f2_lines(x, y));
        let p = pt(x, y);
        prop_assert_eq!(jacobian_det(&TransformSpec::F2, p).unwrap(), -1.0);
        let fd = finite_difference_jacobian(&TransformSpec::F2, p, 1e-8).unwrap();
        prop_assert!((det(fd) + 1.0).abs() <= 1e-6);
    }

    #[test]
    fn f3_matches_piecewise_definition(c1 in 0.1f64..10.0, c2 in 0.1f64..10.0, x in -20.0f64..20.0, y in -20.0f64..20.0) {
        prop_assume!((x + y).abs() > 1e-6);
        let spec = TransformSpec::f3(c1, c2).unwrap();
        let q = apply(&spec, pt(x, y)).unwrap();
        prop_assert_eq!((q.x, q.y), f3_piecewise(x, y));
        let back = apply(&spec, q).unwrap();
        prop_assert!((back.x - x).abs().max((back.y - y).abs()) <= 1e-12 * x.abs().max(y.abs()));
        prop_assert_eq!(jacobian_det(&spec, pt(x, y)).unwrap(), -1.0);
        let fd = finite_difference_jacobian(&spec, pt(x, y), 1e-8).unwrap();
        prop_assert!((det(fd) + 1.0).abs() <= 1e-6);
    }

    #[test]
    fn f3_keeps_the_rectangle(c1 in 0.05f64..20.0, c2 in 0.05f64..20.0, a in 0.0f64..=1.0, t in 0.0f64..200.0) {
        let p = pt(-c1 + (c1 + c2) * a, -c2 + t);
        prop_assert!(f3_domain_map_check(c1, c2, p).unwrap());
    }
}

#[test]
fn f1_partials_at_reference_point() {
    let spec = TransformSpec::f1(2.0, 1.0).unwrap();
    let p = pt(0.7, 1.3);
    let d = f1_partials(&spec, p).unwrap().xy_form;
    let fd = finite_difference_jacobian(&spec, p, 1e-6).unwrap();
    assert!((d.du_dx - fd[0][0]).abs() < 1e-8);
    assert!((d.du_dy - fd[0][1]).abs() < 1e-8);
    assert!((d.dv_dx - fd[1][0]).abs() < 1e-8);
    assert!((d.dv_dy - fd[1][1]).abs() < 1e-8);
    // mixed partials by differencing the first partials in y
    let h = 1e-5;
    let up = f1_partials(&spec, pt(0.7, 1.3 + h)).unwrap().xy_form;
    let dn = f1_partials(&spec, pt(0.7, 1.3 - h)).unwrap().xy_form;
    assert!((d.d2u_dydx - (up.du_dx - dn.du_dx) / (2.0 * h)).abs() < 1e-8);
    assert!((d.d2v_dydx - (up.dv_dx - dn.dv_dx) / (2.0 * h)).abs() < 1e-8);
}

#[test]
fn printed_region_matrices_have_unit_determinant() {
    // the matrices printed for regions 1 and 4 are not the Jacobians of the
    // stated forms, but share their determinant
    let printed_r1 = [[0.0, -1.0], [-1.0, 1.0]];
    let printed_r4 = [[0.0, -1.0], [-1.0, -1.0]];
    assert_eq!(det(printed_r1), -1.0);
    assert_eq!(det(printed_r4), -1.0);
    for r in [Region::R1, Region::R2, Region::R3, Region::R4, Region::R5] {
        assert_eq!(det(linear_form(&TransformSpec::F2, r).unwrap()), -1.0);
    }
}

#[test]
fn f2_boundaries() {
    for p in [pt(0.0, 1.0), pt(2.0, 0.0), pt(-3.0, -3.0), pt(0.0, 0.0)] {
        assert_eq!(region_of(&TransformSpec::F2, p), Location::Boundary);
        assert!(matches!(jacobian_det(&TransformSpec::F2, p), Err(Error::Boundary { .. })));
    }
    // the map itself is continuous across the lines
    let q = apply(&TransformSpec::F2, pt(-3.0, -3.0)).unwrap();
    assert_eq!((q.x, q.y), (0.0, 3.0));
}

#[test]
fn f1_rejects_points_off_the_quadrant() {
    let spec = TransformSpec::f1(1.0, 0.5).unwrap();
    assert!(matches!(apply(&spec, pt(0.0, 1.0)), Err(Error::Domain(_))));
    assert!(matches!(apply(&spec, pt(-1.0, 1.0)), Err(Error::Domain(_))));
    assert!(TransformSpec::f1(1.0, 1.0).is_err());
    assert!(TransformSpec::f3(0.0, 1.0).is_err());
}

#[test]
fn f3_check_rejects_points_outside_its_domain() {
    assert!(matches!(f3_domain_map_check(1.0, 2.0, pt(1.5, -3.0)), Err(Error::Precondition(_))));
    assert!(matches!(f3_domain_map_check(1.0, 2.0, pt(-1.5, 0.0)), Err(Error::Precondition(_))));
}

#[test]
fn relative_defect_on_quasi_random_grid() {
    let spec = TransformSpec::F2;
    for (a, b) in r2_points(10_000) {
        let p = pt(1e4 * (a - 0.5), 1e-3 * (b - 0.5));
        if off_f2_lines(p.x, p.y) {
            assert!(involution_defect_relative(&spec, p).unwrap() <= 1e-12);
        }
    }
}
