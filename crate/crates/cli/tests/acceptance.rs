//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` print `FAIL (known)` and do not fail
//! the run; if one of them starts passing it prints `XPASS`. Any other
//! failure makes the process exit nonzero.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use pllab_core::equidist::{rate_experiment, ClosedFormMeasure, TestFunction};
use pllab_core::extremal::{composition_gap, PolyMap, Sandwich};
use pllab_core::fekete::{solve_fekete, transfinite_sequence, FeketeConfig, TabulatedWeight, WeightSpec};
use pllab_core::poly_basis::BasisSpec;
use pllab_core::regularity::{geometric_grid, hcp_scan, localization_experiment, modulus_fit, Engine};
use pllab_core::relative::{relative_extremal_1c, two_sided_bound};
use pllab_core::set_geometry::{exact_extremal, halfdisc_harmonic_measure, halton, Cusp};
use pllab_core::{sample, Point, SetSpec};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

const KNOWN_FAILURES: &[usize] = &[3, 7];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn interval() -> SetSpec {
    SetSpec::interval(-1.0, 1.0)
}

fn unit_disc() -> SetSpec {
    SetSpec::disc(c(0.0, 0.0), 1.0)
}

fn fekete(cloud: &pllab_core::SampleCloud, d: usize, w: &WeightSpec) -> pllab_core::Result<FeketeConfig> {
    solve_fekete(cloud, &BasisSpec::new(1, d)?, w, 3, 1e-10)
}

fn closed_forms() -> Outcome {
    let ball = exact_extremal(&unit_disc(), &Point::c1(c(2.0, 0.0)))?;
    let seg = exact_extremal(&interval(), &Point::c1(c(2.0, 0.0)))?;
    let hm = halfdisc_harmonic_measure(c(0.0, 1.0))?;
    let errs = [
        (ball - 2f64.ln()).abs(),
        (seg - (2.0 + 3f64.sqrt()).ln()).abs(),
        (hm - 1.0).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    Ok((worst <= 1e-12, format!("max error {worst:.2e}")))
}

/// Largest `∏|x_i − x_j|` over `k` interior cloud points plus the two
/// extreme ones. Sliding an extreme node outward lengthens every factor it
/// touches, so an optimum always uses both extremes.
fn exhaustive_optimum(xs: &[f64], k: usize) -> Vec<f64> {
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let inner = &xs[1..xs.len() - 1];
    let score = |pts: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..pts.len() {
            for j in 0..i {
                s += (pts[i] - pts[j]).abs().ln();
            }
        }
        s
    };
    let mut best = (f64::NEG_INFINITY, Vec::new());
    match k {
        1 => {
            for &x in inner {
                let s = score(&[lo, x, hi]);
                if s > best.0 {
                    best = (s, vec![lo, x, hi]);
                }
            }
        }
        2 => {
            for (i, &x) in inner.iter().enumerate() {
                for &y in &inner[i + 1..] {
                    let s = score(&[lo, x, y, hi]);
                    if s > best.0 {
                        best = (s, vec![lo, x, y, hi]);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    best.1
}

fn fekete_recovery() -> Outcome {
    let cloud = sample(&interval(), 2001, 0)?;
    let mut xs: Vec<f64> = cloud.points.iter().map(|p| p.coords()[0].re).collect();
    xs.sort_by(f64::total_cmp);
    let mut ok = true;
    let mut detail = Vec::new();
    for d in [2usize, 3] {
        let cfg = fekete(&cloud, d, &WeightSpec::Zero)?;
        let mut got: Vec<f64> = cfg.nodes.iter().map(|p| p.coords()[0].re).collect();
        got.sort_by(f64::total_cmp);
        let best = exhaustive_optimum(&xs, d - 1);
        let err = got.iter().zip(&best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ok &= err <= 2e-3 && cfg.gamma <= 1.01;
        detail.push(format!("d={d} err {err:.1e} gamma {:.4}", cfg.gamma));
    }
    Ok((ok, detail.join("; ")))
}

fn sandwich_brackets() -> Outcome {
    let z = Point::c1(c(2.0, 0.0));
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, spec, count, d, target) in [
        ("interval", interval(), 2001, 20usize, 1.316958),
        ("disc", unit_disc(), 4000, 10, 2f64.ln()),
    ] {
        let cloud = sample(&spec, count, 0)?;
        let cfg = fekete(&cloud, d, &WeightSpec::Zero)?;
        let e = Sandwich::new(&cfg, &cloud)?.estimate(&z)?;
        let gap_bound = ((d + 1) as f64 * cfg.gamma).ln() / d as f64 + 1e-9;
        let pass = e.lower <= target && target <= e.upper && e.gap <= gap_bound;
        ok &= pass;
        detail.push(format!(
            "{name} [{:.4}, {:.4}] vs {target:.6}{}",
            e.lower,
            e.upper,
            if pass { "" } else { " (outside)" }
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn transfinite() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, spec, base, want) in [("interval", interval(), 2001usize, 0.5), ("circle", unit_disc(), 4000, 1.0)] {
        let configs = [18usize, 22, 26, 30]
            .iter()
            .map(|&d| fekete(&sample(&spec, base.max(20 * (d + 1)), 0)?, d, &WeightSpec::Zero))
            .collect::<pllab_core::Result<Vec<_>>>()?;
        let est = transfinite_sequence(&configs)?.estimate;
        ok &= (est - want).abs() <= 0.05 * want;
        detail.push(format!("{name} {est:.4}"));
    }
    Ok((ok, detail.join("; ")))
}

fn holder_exact() -> Outcome {
    let a = Point::c1(c(1.0, 0.0));
    let grid = geometric_grid(1e-3, 1e-1, 13);
    let mu_i = modulus_fit(&interval(), &a, &grid, &Engine::Exact)?.mu();
    let mu_d = modulus_fit(&unit_disc(), &a, &grid, &Engine::Exact)?.mu();
    let ok = matches!(mu_i, Some(m) if (0.45..=0.55).contains(&m)) && matches!(mu_d, Some(m) if (0.95..=1.05).contains(&m));
    Ok((ok, format!("interval {mu_i:?}, disc {mu_d:?}")))
}

fn cusp_exponent() -> Outcome {
    let cusp = SetSpec::Cusp(Cusp::new(vec![vec![0.0, 1.0], vec![0.0]], 0.5, 2)?);
    let a = Point::real(&[0.0, 0.0]);
    let rep = hcp_scan(&cusp, &a, &[0.5, 0.25], &geometric_grid(0.02, 1.0, 11), 20)?;
    let mus = rep.mu_hats();
    let ok = mus.len() == 2 && mus.iter().all(|m| matches!(m, Some(m) if (0.15..=0.6).contains(m)));
    Ok((ok, format!("mu_hat(0.5, 0.25) = {mus:?}, dropped {:?}", rep.dropped)))
}

fn localization() -> Outcome {
    let rep = localization_experiment(&unit_disc(), &Point::c1(c(1.0, 0.0)), 0.3, 120, &geometric_grid(0.2, 1.2, 6))?;
    let ok = matches!(rep.difference, Some(d) if d <= 0.15);
    Ok((
        ok,
        format!("whole {:?}, local {:?}, difference {:?}", rep.whole.mu(), rep.local.mu(), rep.difference),
    ))
}

fn weighted_comparison() -> Outcome {
    let d = 10;
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, spec, count) in [("interval", interval(), 2001), ("disc", unit_disc(), 4000)] {
        let cloud = sample(&spec, count, 0)?;
        let w = if name == "interval" {
            WeightSpec::FubiniStudy
        } else {
            WeightSpec::Tabulated(TabulatedWeight::from_fn(&cloud, |p| p.coords()[0].re / 4.0, 1.0, 0.25)?)
        };
        let phis = w.values_on(&cloud.points);
        let inf = phis.iter().cloned().fold(f64::INFINITY, f64::min);
        let sup = phis.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let su = Sandwich::new(&fekete(&cloud, d, &WeightSpec::Zero)?, &cloud)?;
        let sw = Sandwich::new(&fekete(&cloud, d, &w)?, &cloud)?;
        let mut margin = f64::INFINITY;
        for k in 1..=50u64 {
            let z = Point::c1(c(-3.0 + 6.0 * halton(k, 2), -3.0 + 6.0 * halton(k, 3)));
            let (eu, ew) = (su.estimate(&z)?, sw.estimate(&z)?);
            let slack = eu.gap + ew.gap;
            margin = margin
                .min(ew.upper - (eu.lower + inf) + slack)
                .min((eu.upper + sup) - ew.lower + slack);
        }
        ok &= margin >= 0.0;
        detail.push(format!("{name} margin {margin:.3}"));
    }
    Ok((ok, detail.join("; ")))
}

fn pullback() -> Outcome {
    let (e, he) = (interval(), SetSpec::interval(0.0, 1.0));
    let (ce, ch) = (sample(&e, 2001, 0)?, sample(&he, 2001, 0)?);
    let se = Sandwich::new(&fekete(&ce, 20, &WeightSpec::Zero)?, &ce)?;
    let sh = Sandwich::new(&fekete(&ch, 20, &WeightSpec::Zero)?, &ch)?;
    let h = PolyMap::univariate(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let mut ok = true;
    let mut worst_slack = f64::INFINITY;
    let mut worst_closed = f64::NEG_INFINITY;
    for w in [1.1, 1.2, 1.5] {
        let g = composition_gap(&h, &se, &sh, &Point::c1(c(w, 0.0)))?;
        ok &= g.slack >= -g.tolerance();
        worst_slack = worst_slack.min(g.slack + g.tolerance());
        let lhs = exact_extremal(&he, &Point::c1(c(w * w, 0.0)))?;
        let rhs = 2.0 * exact_extremal(&e, &Point::c1(c(w, 0.0)))?;
        worst_closed = worst_closed.max(lhs - rhs);
    }
    ok &= worst_closed <= 1e-10;
    Ok((ok, format!("min slack+tol {worst_slack:.3}, closed form excess {worst_closed:.1e}")))
}

fn relative_field() -> Outcome {
    let (r, big) = (0.5, 1.0);
    let inner = SetSpec::disc(c(0.0, 0.0), r);
    let field = relative_extremal_1c(&inner, &SetSpec::disc(c(0.0, 0.0), big), 512, 1e-8)?;
    let mut err: f64 = 0.0;
    for j in 0..field.grid_n {
        for i in 0..field.grid_n {
            let m = field.cell_center(i, j).norm();
            if m < big {
                let oracle = ((m / r).ln() / (big / r).ln()).clamp(0.0, 1.0);
                err = err.max((field.value(i, j) - oracle).abs());
            }
        }
    }
    let cloud = sample(&inner, 4000, 0)?;
    let s = Sandwich::new(&fekete(&cloud, 40, &WeightSpec::Zero)?, &cloud)?;
    let tb = two_sided_bound(&field, &s, 0.05, 8)?;
    Ok((err <= 0.01 && tb.ratio <= 10.0, format!("max error {err:.4}, M/m {:.3}", tb.ratio)))
}

/// Uniform-measure error of `x²` on the Gauss–Lobatto nodes.
fn lobatto_error(nodes: &[f64]) -> f64 {
    (nodes.iter().map(|x| x * x).sum::<f64>() / nodes.len() as f64 - 0.5).abs()
}

fn equidistribution() -> Outcome {
    let v = TestFunction::real_polynomial(&[0.0, 0.0, 1.0])?;
    let fit = rate_experiment(&interval(), &v, &[2, 4, 8, 16], &ClosedFormMeasure::Arcsine { a: -1.0, b: 1.0 })?;
    let s = (3.0f64 / 7.0).sqrt();
    let e2 = lobatto_error(&[-1.0, 0.0, 1.0]);
    let e4 = lobatto_error(&[-1.0, -s, 0.0, s, 1.0]);
    let e = &fit.errors;
    let ok = (e[0] - e2).abs() <= 1e-6
        && (e[1] - e4).abs() <= 1e-6
        && fit.strictly_decreasing()
        && fit.slope <= -0.8
        && e[3] <= 0.05;
    Ok((ok, format!("errors {:?}, slope {:.3}", e.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>(), fit.slope)))
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| e.expect("entry").path())
        .filter(|p| matches!(p.extension().and_then(|s| s.to_str()), Some("csv" | "json")))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir()?;
    let manifests = [
        ("fekete", r#"{"command":"fekete","set":{"kind":"Interval","a":-1,"b":1},"degrees":[6,9],"seeds":[0,1]}"#),
        (
            "equidist",
            r#"{"command":"equidist","set":{"kind":"Interval","a":-1,"b":1},"degrees":[2,4,8,16],
                "params":{"test_function":{"kind":"Polynomial","coefficients":[[0,0],[0,0],[1,0]],"alpha":1},
                          "measure":{"kind":"Arcsine","a":-1,"b":1}}}"#,
        ),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, body) in manifests {
        let path = tmp.path().join(format!("{name}.json"));
        std::fs::write(&path, body)?;
        let cache = tmp.path().join("cache");
        let mut runs = Vec::new();
        for (k, cached) in [true, true, false].into_iter().enumerate() {
            let out = tmp.path().join(format!("{name}-{k}"));
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_pllab"));
            cmd.arg("--manifest").arg(&path).arg("--out").arg(&out).arg("--cache").arg(&cache);
            cmd.env_remove("PLLAB_CACHE").env("RUST_LOG", "warn");
            if !cached {
                cmd.arg("--no-cache");
            }
            let status = cmd.status()?;
            if !status.success() {
                return Ok((false, format!("{name}: run {k} exited with {status}")));
            }
            runs.push(artifacts(&out));
        }
        let same = runs.windows(2).all(|w| w[0] == w[1]) && !runs[0].is_empty();
        ok &= same;
        detail.push(format!("{name}: {} files {}", runs[0].len(), if same { "identical" } else { "differ" }));
    }
    Ok((ok, detail.join("; ")))
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 12] = [
        (1, "closed-form oracles", closed_forms),
        (2, "Fekete recovery", fekete_recovery),
        (3, "sandwich brackets", sandwich_brackets),
        (4, "transfinite diameter", transfinite),
        (5, "Hölder fits, exact engine", holder_exact),
        (6, "cusp exponent", cusp_exponent),
        (7, "localization", localization),
        (8, "weighted comparison", weighted_comparison),
        (9, "pullback inequality", pullback),
        (10, "relative extremal field", relative_field),
        (11, "equidistribution rate", equidistribution),
        (12, "determinism", determinism),
    ];
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut unexpected = 0;
    for (id, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        let known = KNOWN_FAILURES.contains(&id);
        let status = match (ok, known) {
            (true, false) => "PASS",
            (true, true) => "XPASS",
            (false, true) => "FAIL (known)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {id}: {status} {name}: {detail} [{:.1}s]", t.elapsed().as_secs_f64());
    }
    if unexpected > 0 {
        eprintln!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
