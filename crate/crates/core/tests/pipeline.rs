use num_complex::Complex64;
use pllab_core::equidist::{rate_experiment, ClosedFormMeasure, TestFunction};
use pllab_core::extremal::Sandwich;
use pllab_core::fekete::{solve_fekete, FeketeConfig, WeightSpec};
use pllab_core::poly_basis::BasisSpec;
use pllab_core::regularity::{geometric_grid, modulus_fit, Engine};
use pllab_core::relative::{relative_extremal_1c, CellKind};
use pllab_core::{sample, Point, SetSpec};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn config_survives_json() {
    let cloud = sample(&SetSpec::disc(c(0.2, -0.1), 0.8), 700, 3).unwrap();
    let cfg = solve_fekete(&cloud, &BasisSpec::new(1, 6).unwrap(), &WeightSpec::FubiniStudy, 2, 1e-10).unwrap();
    let text = serde_json::to_string(&cfg).unwrap();
    let back: FeketeConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
    assert_eq!(back.provenance.cloud_id, cloud.id);
    // same inputs, same answer
    let again = solve_fekete(&cloud, &BasisSpec::new(1, 6).unwrap(), &WeightSpec::FubiniStudy, 2, 1e-10).unwrap();
    assert_eq!(serde_json::to_string(&again).unwrap(), text);
}

#[test]
fn sandwich_brackets_the_disc_closed_form() {
    let disc = SetSpec::disc(c(0.0, 0.0), 1.0);
    let cloud = sample(&disc, 3000, 0).unwrap();
    let s = Sandwich::new(
        &solve_fekete(&cloud, &BasisSpec::new(1, 12).unwrap(), &WeightSpec::Zero, 2, 1e-10).unwrap(),
        &cloud,
    )
    .unwrap();
    for z in [c(2.0, 0.0), c(0.0, -1.5), c(3.0, 3.0)] {
        let e = s.estimate(&Point::c1(z)).unwrap();
        let exact = z.norm().ln();
        assert!(e.lower <= exact + 1e-9 && exact <= e.upper + 1e-9, "{e:?} vs {exact}");
    }
}

#[test]
fn exact_engine_exponents_at_both_endpoints() {
    let grid = geometric_grid(1e-3, 1e-1, 9);
    for a in [-1.0, 1.0] {
        let mu = modulus_fit(&SetSpec::interval(-1.0, 1.0), &Point::c1(c(a, 0.0)), &grid, &Engine::Exact)
            .unwrap()
            .mu()
            .unwrap();
        assert!((mu - 0.5).abs() < 0.05, "a={a}: {mu}");
    }
    let mu = modulus_fit(&SetSpec::disc(c(0.0, 0.0), 1.0), &Point::c1(c(0.0, 1.0)), &grid, &Engine::Exact)
        .unwrap()
        .mu()
        .unwrap();
    assert!((mu - 1.0).abs() < 0.05, "{mu}");
}

#[test]
fn circle_cancellation_for_degrees_matching_the_cloud() {
    // Re z integrates to zero against both measures; equispaced Fekete nodes
    // cancel exactly only when the cloud's ring structure allows them.
    let disc = SetSpec::disc(c(0.0, 0.0), 1.0);
    let m = ClosedFormMeasure::UniformCircle {
        center: c(0.0, 0.0),
        radius: 1.0,
    };
    let v = TestFunction::real_polynomial(&[0.0, 1.0]).unwrap();
    let fit = rate_experiment(&disc, &v, &[3, 4, 5, 6, 8], &m).unwrap();
    for (d, e) in fit.degrees.iter().zip(&fit.errors) {
        let tol = if *d == 6 { 1e-5 } else { 1e-10 };
        assert!(*e <= tol, "d={d}: {e}");
    }
}

#[test]
fn interval_rate_matches_lobatto_nodes() {
    let v = TestFunction::real_polynomial(&[0.0, 0.0, 1.0]).unwrap();
    let fit = rate_experiment(
        &SetSpec::interval(-1.0, 1.0),
        &v,
        &[2, 3, 4, 6],
        &ClosedFormMeasure::Arcsine { a: -1.0, b: 1.0 },
    )
    .unwrap();
    // Gauss–Lobatto nodes for d = 3: ±1, ±1/√5
    let e3 = ((2.0 + 2.0 / 5.0) / 4.0 - 0.5f64).abs();
    assert!((fit.errors[1] - e3).abs() < 1e-6, "{:?}", fit.errors);
    assert!(fit.strictly_decreasing());
    assert!(fit.slope < 0.0);
}

#[test]
fn relative_field_of_a_segment() {
    let b = SetSpec::disc(c(0.0, 0.0), 1.0);
    let f = relative_extremal_1c(&SetSpec::interval(-0.5, 0.5), &b, 129, 1e-9).unwrap();
    assert!(f.residual < 1e-6);
    let mut set_cells = 0;
    for j in 0..f.grid_n {
        for i in 0..f.grid_n {
            let v = f.value(i, j);
            assert!((0.0..=1.0).contains(&v));
            if f.kind(i, j) == CellKind::Set {
                set_cells += 1;
                assert_eq!(v, 0.0);
            }
        }
    }
    assert!(set_cells > 0);
    // odd grid: the segment runs through cell centers, so the field keeps
    // the symmetries z -> -z and z -> conj z
    let n = f.grid_n;
    for (i, j) in [(10, 50), (70, 30), (64, 100)] {
        assert!((f.value(i, j) - f.value(n - 1 - i, n - 1 - j)).abs() < 1e-6);
        assert!((f.value(i, j) - f.value(i, n - 1 - j)).abs() < 1e-6);
    }
    assert!(f.contour_svg(&[0.25, 0.5, 0.75]).contains("<svg"));
}
