//! Quick invariant suite behind `pllab verify`.

use num_complex::Complex64;
use pllab_core::equidist::{equilibrium_pairing, holder_norm, ClosedFormMeasure, TestFunction};
use pllab_core::extremal::Sandwich;
use pllab_core::fekete::{fekete_measure, solve_fekete, WeightSpec};
use pllab_core::io::content_hash;
use pllab_core::poly_basis::BasisSpec;
use pllab_core::relative::relative_extremal_1c;
use pllab_core::set_geometry::{exact_extremal, halfdisc_harmonic_measure};
use pllab_core::{sample, Point, SetSpec};

use crate::commands::Artifacts;

type Check = (&'static str, fn() -> pllab_core::Result<(bool, String)>);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn near(got: f64, want: f64, tol: f64) -> (bool, String) {
    ((got - want).abs() <= tol, format!("got {got:.15}, want {want:.15}"))
}

fn ball_closed_form() -> pllab_core::Result<(bool, String)> {
    let v = exact_extremal(&SetSpec::disc(c(0.0, 0.0), 1.0), &Point::c1(c(2.0, 0.0)))?;
    Ok(near(v, 2f64.ln(), 1e-12))
}

fn interval_closed_form() -> pllab_core::Result<(bool, String)> {
    let v = exact_extremal(&SetSpec::interval(-1.0, 1.0), &Point::c1(c(2.0, 0.0)))?;
    Ok(near(v, (2.0 + 3f64.sqrt()).ln(), 1e-12))
}

fn harmonic_measure() -> pllab_core::Result<(bool, String)> {
    Ok(near(halfdisc_harmonic_measure(c(0.0, 1.0))?, 1.0, 1e-12))
}

fn fekete_three_points() -> pllab_core::Result<(bool, String)> {
    let cloud = sample(&SetSpec::interval(-1.0, 1.0), 201, 0)?;
    let cfg = solve_fekete(&cloud, &BasisSpec::new(1, 2)?, &WeightSpec::Zero, 3, 1e-10)?;
    let mut xs: Vec<f64> = cfg.nodes.iter().map(|p| p.coords()[0].re).collect();
    xs.sort_by(f64::total_cmp);
    let err = xs.iter().zip([-1.0, 0.0, 1.0]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok((err < 1e-12 && cfg.gamma <= 1.01, format!("nodes {xs:?}, gamma {}", cfg.gamma)))
}

fn fekete_mass() -> pllab_core::Result<(bool, String)> {
    let cloud = sample(&SetSpec::disc(c(0.0, 0.0), 1.0), 600, 0)?;
    let cfg = solve_fekete(&cloud, &BasisSpec::new(1, 5)?, &WeightSpec::Zero, 1, 1e-10)?;
    let mass = fekete_measure(&cfg).total_mass();
    Ok(near(mass, 1.0, 1e-14))
}

fn sandwich_lower_bound() -> pllab_core::Result<(bool, String)> {
    let spec = SetSpec::interval(-1.0, 1.0);
    let cloud = sample(&spec, 2001, 0)?;
    let cfg = solve_fekete(&cloud, &BasisSpec::new(1, 10)?, &WeightSpec::Zero, 3, 1e-10)?;
    let z = Point::c1(c(2.0, 0.0));
    let e = Sandwich::new(&cfg, &cloud)?.estimate(&z)?;
    let exact = exact_extremal(&spec, &z)?;
    let gap_ok = (e.gap - (11.0 * cfg.gamma).ln() / 10.0).abs() < 1e-9;
    Ok((
        e.lower <= exact + 1e-12 && e.lower <= e.upper && gap_ok,
        format!("lower {:.6} exact {:.6} upper {:.6}", e.lower, exact, e.upper),
    ))
}

fn arcsine_pairing() -> pllab_core::Result<(bool, String)> {
    let v = TestFunction::real_polynomial(&[0.0, 0.0, 1.0])?;
    Ok(near(equilibrium_pairing(&ClosedFormMeasure::Arcsine { a: -1.0, b: 1.0 }, &v)?, 0.5, 1e-14))
}

fn lipschitz_norm() -> pllab_core::Result<(bool, String)> {
    let v = TestFunction::real_polynomial(&[0.0, 1.0])?;
    Ok(near(holder_norm(&v, 1.0, &[[-1.0, 1.0]], 128)?.value, 2.0, 1e-12))
}

fn hash_stability() -> pllab_core::Result<(bool, String)> {
    let spec = SetSpec::disc(c(0.1, -0.2), 0.7);
    let back = SetSpec::from_json(&spec.to_json())?;
    let (a, b) = (content_hash(&spec)?, content_hash(&back)?);
    Ok((a == b, a[..16].to_string()))
}

fn pullback_closed_form() -> pllab_core::Result<(bool, String)> {
    let unit = SetSpec::interval(0.0, 1.0);
    let sym = SetSpec::interval(-1.0, 1.0);
    let mut worst = f64::NEG_INFINITY;
    for w in [1.1, 1.2, 1.5] {
        let lhs = exact_extremal(&unit, &Point::c1(c(w * w, 0.0)))?;
        let rhs = 2.0 * exact_extremal(&sym, &Point::c1(c(w, 0.0)))?;
        worst = worst.max(lhs - rhs);
    }
    Ok((worst <= 1e-10, format!("max L(w²) − 2L(w) = {worst:.3e}")))
}

fn annulus_field() -> pllab_core::Result<(bool, String)> {
    let (r, big) = (0.3, 1.0);
    let field = relative_extremal_1c(&SetSpec::disc(c(0.0, 0.0), r), &SetSpec::disc(c(0.0, 0.0), big), 128, 1e-8)?;
    let mut err: f64 = 0.0;
    for j in 0..field.grid_n {
        for i in 0..field.grid_n {
            let z = field.cell_center(i, j);
            let m = z.norm();
            if m > r && m < big {
                err = err.max((field.value(i, j) - (m / r).ln() / (big / r).ln()).abs());
            }
        }
    }
    Ok((err <= 0.05, format!("max error {err:.4}")))
}

const CHECKS: &[Check] = &[
    ("closed form: ball at 2", ball_closed_form),
    ("closed form: interval at 2", interval_closed_form),
    ("half-disc harmonic measure at i", harmonic_measure),
    ("Fekete points of [-1,1], d=2", fekete_three_points),
    ("Fekete measure has mass 1", fekete_mass),
    ("sandwich lower bound, interval d=10", sandwich_lower_bound),
    ("arcsine pairing of x^2", arcsine_pairing),
    ("Lipschitz norm of x on [-1,1]", lipschitz_norm),
    ("content hash survives JSON round trip", hash_stability),
    ("pullback inequality, closed form", pullback_closed_form),
    ("relative field of nested discs", annulus_field),
];

/// Runs every check, prints a table and returns it as `verify.csv` with the
/// failure count.
pub fn verify() -> (Artifacts, usize) {
    let mut csv = String::from("check,status,detail\n");
    let mut failures = 0;
    let width = CHECKS.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    for (name, f) in CHECKS {
        let (ok, detail) = f().unwrap_or_else(|e| (false, e.to_string()));
        let status = if ok { "PASS" } else { "FAIL" };
        if !ok {
            failures += 1;
        }
        println!("{name:<width$}  {status}  {detail}");
        csv.push_str(&format!("\"{name}\",{status},\"{}\"\n", detail.replace('"', "'")));
    }
    println!("{} of {} checks passed", CHECKS.len() - failures, CHECKS.len());
    (vec![("verify.csv".into(), csv)], failures)
}
