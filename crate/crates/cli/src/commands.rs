//! Subcommand bodies. Each returns the artifact files it produced.

use pllab_core::equidist::{rate_experiment_with, ClosedFormMeasure, RateFit, RateOptions, TestFunction};
use pllab_core::extremal::{ExtremalEstimate, Sandwich};
use pllab_core::fekete::{refine_locally, solve_fekete, transfinite_sequence, FeketeConfig};
use pllab_core::io::{canonical_json, content_hash, fmt_f64};
use pllab_core::poly_basis::BasisSpec;
use pllab_core::regularity::{
    geometric_grid, hcp_scan_with, localization_experiment_with, modulus_fit_with, Engine, ScanOptions,
};
use pllab_core::relative::{relative_extremal_1c, two_sided_bound};
use pllab_core::{sample, Point, SampleCloud, SetSpec};
use serde::{Deserialize, Serialize};

use crate::cache::Cache;
use crate::manifest::{CommandId, RunManifest};
use crate::CliError;

pub type Artifacts = Vec<(String, String)>;

/// Artifacts plus the number of failed checks (nonzero only for `verify`).
pub fn dispatch(m: &RunManifest, cache: &Cache) -> Result<(Artifacts, usize), CliError> {
    let files = match m.command {
        CommandId::Fekete => fekete(m, cache)?,
        CommandId::Extremal => extremal(m, cache)?,
        CommandId::Relative => relative(m, cache)?,
        CommandId::ScanRegularity => scan_regularity(m)?,
        CommandId::Localize => localize(m)?,
        CommandId::Capacity => capacity(m, cache)?,
        CommandId::Equidist => equidist(m)?,
        CommandId::Verify => return Ok(crate::verify::verify()),
    };
    Ok((files, 0))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = canonical_json(v).expect("artifact serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CacheKey<'a> {
    set: &'a SetSpec,
    basis: &'a BasisSpec,
    weight: &'a str,
    seed: u64,
    cloud_id: &'a str,
    cloud_size: usize,
    density_parameter: f64,
    tol: f64,
    restarts: usize,
}

fn cloud_size(m: &RunManifest, basis: &BasisSpec) -> usize {
    m.cloud_size.unwrap_or((20 * basis.size()).max(4000))
}

/// Sample and solve, going through the cache.
fn solve(m: &RunManifest, cache: &Cache, spec: &SetSpec, degree: usize, seed: u64) -> Result<(FeketeConfig, SampleCloud), CliError> {
    let basis = BasisSpec::new(spec.dim(), degree)?;
    let count = cloud_size(m, &basis);
    let cloud = sample(spec, count, seed)?;
    let weight = m.weight.spec();
    let key = content_hash(&CacheKey {
        set: spec,
        basis: &basis,
        weight: weight.tag(),
        seed,
        cloud_id: &cloud.id,
        cloud_size: count,
        density_parameter: cloud.density_parameter,
        tol: m.tolerances.fekete,
        restarts: m.restarts,
    })
    .expect("key serializes");
    if let Some(cfg) = cache.load(&key, &cloud.id) {
        return Ok((cfg, cloud));
    }
    let cfg = solve_fekete(&cloud, &basis, &weight, m.restarts, m.tolerances.fekete)?;
    cache.store(&key, &cfg);
    Ok((cfg, cloud))
}

fn point_header(dim: usize) -> String {
    if dim == 1 {
        "re_z,im_z".into()
    } else {
        (1..=dim).map(|k| format!("re_z{k},im_z{k}")).collect::<Vec<_>>().join(",")
    }
}

fn point_fields(p: &Point) -> String {
    p.coords()
        .iter()
        .map(|c| format!("{},{}", fmt_f64(c.re), fmt_f64(c.im)))
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FeketeParams {
    #[serde(default)]
    refine_levels: usize,
    #[serde(default = "default_points_per_node")]
    points_per_node: usize,
}

fn default_points_per_node() -> usize {
    64
}

fn fekete(m: &RunManifest, cache: &Cache) -> Result<Artifacts, CliError> {
    let p: FeketeParams = m.params()?;
    let spec = m.set();
    let mut out = Vec::new();
    let mut summary = String::from("degree,seed,nodes,objective,gamma,swaps,restart,refinement_levels\n");
    for &d in &m.degrees {
        for &seed in &m.seeds {
            let (mut cfg, cloud) = solve(m, cache, spec, d, seed)?;
            if p.refine_levels > 0 {
                cfg = refine_locally(&cfg, spec, &cloud, p.refine_levels, p.points_per_node, m.tolerances.fekete)?.0;
            }
            let stem = format!("fekete_d{d}_s{seed}");
            let mut nodes = format!("index,{}\n", point_header(spec.dim()));
            for (k, node) in cfg.nodes.iter().enumerate() {
                nodes.push_str(&format!("{k},{}\n", point_fields(node)));
            }
            summary.push_str(&format!(
                "{d},{seed},{},{},{},{},{},{}\n",
                cfg.nodes.len(),
                fmt_f64(cfg.objective),
                fmt_f64(cfg.gamma),
                cfg.provenance.swaps,
                cfg.provenance.restart,
                cfg.provenance.refinement_levels
            ));
            out.push((format!("{stem}.json"), json(&cfg)));
            out.push((format!("{stem}_nodes.csv"), nodes));
        }
    }
    out.push(("fekete.csv".into(), summary));
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtremalParams {
    points: Vec<Point>,
    /// Report `V = L_ρ − ρ` instead of the raw estimate.
    #[serde(default)]
    projective: bool,
}

fn estimate_csv(dim: usize, rows: &[ExtremalEstimate]) -> String {
    let mut out = format!("{},lower,upper,gap,degree,mode\n", point_header(dim));
    for e in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            point_fields(&e.z),
            fmt_f64(e.lower),
            fmt_f64(e.upper),
            fmt_f64(e.gap),
            e.degree,
            e.mode.as_str()
        ));
    }
    out
}

fn extremal(m: &RunManifest, cache: &Cache) -> Result<Artifacts, CliError> {
    let p: ExtremalParams = m.params()?;
    let spec = m.set();
    for (i, z) in p.points.iter().enumerate() {
        if z.dim() != spec.dim() {
            return Err(CliError::Schema(format!(
                "params.points[{i}]: expected {} coordinate(s), got {}",
                spec.dim(),
                z.dim()
            )));
        }
    }
    let mut rows = Vec::new();
    for &d in &m.degrees {
        let (cfg, cloud) = solve(m, cache, spec, d, m.seed())?;
        let s = Sandwich::new(&cfg, &cloud)?;
        for z in &p.points {
            rows.push(if p.projective { s.projective(z)? } else { s.estimate(z)? });
        }
    }
    Ok(vec![
        ("extremal.csv".into(), estimate_csv(spec.dim(), &rows)),
        ("extremal.json".into(), json(&rows)),
    ])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoSidedParams {
    degree: usize,
    #[serde(default = "default_threshold")]
    threshold: f64,
    #[serde(default = "default_stride")]
    stride: usize,
}

fn default_threshold() -> f64 {
    0.05
}

fn default_stride() -> usize {
    8
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelativeParams {
    /// The disc `B`; the manifest set is `E`.
    outer: SetSpec,
    #[serde(default = "default_grid")]
    grid_n: usize,
    #[serde(default = "default_levels")]
    levels: Vec<f64>,
    #[serde(default)]
    two_sided: Option<TwoSidedParams>,
}

fn default_grid() -> usize {
    256
}

fn default_levels() -> Vec<f64> {
    vec![0.25, 0.5, 0.75]
}

#[derive(Serialize)]
struct RelativeSummary {
    grid_n: usize,
    sweeps: usize,
    residual: f64,
    tol: f64,
    two_sided: Option<pllab_core::relative::TwoSidedBound>,
}

fn relative(m: &RunManifest, cache: &Cache) -> Result<Artifacts, CliError> {
    let mut p: RelativeParams = m.params()?;
    p.outer.normalize().map_err(|e| CliError::Schema(format!("params.outer: {e}")))?;
    let field = relative_extremal_1c(m.set(), &p.outer, p.grid_n, m.tolerances.solver)?;
    let two_sided = match &p.two_sided {
        Some(t) => {
            let (cfg, cloud) = solve(m, cache, m.set(), t.degree, m.seed())?;
            let s = Sandwich::new(&cfg, &cloud)?;
            Some(two_sided_bound(&field, &s, t.threshold, t.stride)?)
        }
        None => None,
    };
    let summary = RelativeSummary {
        grid_n: field.grid_n,
        sweeps: field.sweeps,
        residual: field.residual,
        tol: field.tol,
        two_sided,
    };
    Ok(vec![
        ("relative.csv".into(), field.to_csv()),
        ("relative.svg".into(), field.contour_svg(&p.levels)),
        ("relative.json".into(), json(&summary)),
    ])
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DeltaGrid {
    Explicit(Vec<f64>),
    Geometric { lo: f64, hi: f64, count: usize },
}

impl DeltaGrid {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        match self {
            DeltaGrid::Explicit(v) => Ok(v.clone()),
            DeltaGrid::Geometric { lo, hi, count } => {
                if !(*lo > 0.0 && lo < hi) || *count < 2 {
                    return Err(CliError::Schema("params.deltas: need 0 < lo < hi and count ≥ 2".into()));
                }
                Ok(geometric_grid(*lo, *hi, *count))
            }
        }
    }
}

fn default_directions() -> usize {
    pllab_core::regularity::DIRECTIONS
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanParams {
    anchor: Point,
    deltas: DeltaGrid,
    #[serde(default = "default_engine")]
    engine: Engine,
    #[serde(default = "default_directions")]
    directions: usize,
    /// Decreasing radii for an HCP scan around the anchor.
    #[serde(default)]
    radii: Option<Vec<f64>>,
}

fn default_engine() -> Engine {
    Engine::Exact
}

fn scan_options(m: &RunManifest, directions: usize) -> ScanOptions {
    ScanOptions {
        directions,
        cloud_size: m.cloud_size,
        seed: m.seed(),
        restarts: m.restarts,
        tol: m.tolerances.fekete,
    }
}

fn scan_regularity(m: &RunManifest) -> Result<Artifacts, CliError> {
    let p: ScanParams = m.params()?;
    let deltas = p.deltas.values()?;
    let opts = scan_options(m, p.directions);
    match &p.radii {
        Some(radii) => {
            let degree = *m
                .degrees
                .first()
                .ok_or_else(|| CliError::Schema("degrees: an HCP scan needs a degree".into()))?;
            let report = hcp_scan_with(m.set(), &p.anchor, radii, &deltas, degree, &opts)?;
            Ok(vec![("hcp.csv".into(), report.to_csv()), ("hcp.json".into(), json(&report))])
        }
        None => {
            let report = modulus_fit_with(m.set(), &p.anchor, &deltas, &p.engine, &opts)?;
            Ok(vec![
                ("modulus.csv".into(), report.to_csv()),
                ("modulus.json".into(), json(&report)),
            ])
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LocalizeParams {
    anchor: Point,
    radius: f64,
    deltas: DeltaGrid,
    #[serde(default = "default_directions")]
    directions: usize,
}

fn localize(m: &RunManifest) -> Result<Artifacts, CliError> {
    let p: LocalizeParams = m.params()?;
    let deltas = p.deltas.values()?;
    let report = localization_experiment_with(
        m.set(),
        &p.anchor,
        p.radius,
        m.degrees[0],
        &deltas,
        &scan_options(m, p.directions),
    )?;
    Ok(vec![
        ("localization.json".into(), json(&report)),
        ("modulus_whole.csv".into(), report.whole.to_csv()),
        ("modulus_local.csv".into(), report.local.to_csv()),
    ])
}

fn capacity(m: &RunManifest, cache: &Cache) -> Result<Artifacts, CliError> {
    let configs = m
        .degrees
        .iter()
        .map(|&d| solve(m, cache, m.set(), d, m.seed()).map(|r| r.0))
        .collect::<Result<Vec<_>, _>>()?;
    let est = transfinite_sequence(&configs)?;
    let mut csv = String::from("degree,delta_d\n");
    for (d, v) in est.degrees.iter().zip(&est.deltas) {
        csv.push_str(&format!("{d},{}\n", fmt_f64(*v)));
    }
    Ok(vec![("capacity.csv".into(), csv), ("capacity.json".into(), json(&est))])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EquidistParams {
    test_function: TestFunction,
    measure: ClosedFormMeasure,
    #[serde(default = "default_refine")]
    refinement_levels: usize,
    #[serde(default = "default_points_per_node")]
    points_per_node: usize,
    #[serde(default = "default_alpha_prime")]
    alpha_prime: f64,
    #[serde(default)]
    reference: Option<f64>,
}

fn default_refine() -> usize {
    RateOptions::default().refinement_levels
}

fn default_alpha_prime() -> f64 {
    RateOptions::default().alpha_prime
}

fn equidist(m: &RunManifest) -> Result<Artifacts, CliError> {
    let p: EquidistParams = m.params()?;
    let opts = RateOptions {
        cloud_size: m.cloud_size,
        seed: m.seed(),
        restarts: m.restarts,
        tol: m.tolerances.fekete,
        refinement_levels: p.refinement_levels,
        points_per_node: p.points_per_node,
        alpha_prime: p.alpha_prime,
        reference: p.reference,
    };
    let fit = rate_experiment_with(m.set(), &p.test_function, &m.degrees, &p.measure, &opts)?;
    Ok(vec![
        ("rate.csv".into(), fit.to_csv()),
        ("rate.json".into(), json(&fit)),
        ("rate.svg".into(), rate_svg(&fit)),
    ])
}

/// Log-log plot of the errors and the calibrated line.
fn rate_svg(fit: &RateFit) -> String {
    let (w, h, pad) = (480.0, 360.0, 40.0);
    let xs: Vec<f64> = fit.degrees.iter().map(|d| (*d as f64).ln()).collect();
    let floor = f64::MIN_POSITIVE;
    let ys: Vec<f64> = fit.errors.iter().chain(&fit.bound_line).map(|e| e.max(floor).ln()).collect();
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let (y0, y1) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, y| (a.0.min(*y), a.1.max(*y)));
    let sx = |x: f64| pad + (x - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0).max(1e-12) * (h - 2.0 * pad);
    let polyline = |vals: &[f64], color: &str| {
        let pts: Vec<String> = xs
            .iter()
            .zip(vals)
            .map(|(x, v)| format!("{:.3},{:.3}", sx(*x), sy(v.max(floor).ln())))
            .collect();
        format!("<polyline fill=\"none\" stroke=\"{color}\" points=\"{}\"/>\n", pts.join(" "))
    };
    let mut svg = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n");
    svg.push_str(&polyline(&fit.errors, "black"));
    svg.push_str(&polyline(&fit.bound_line, "gray"));
    svg.push_str("</svg>\n");
    svg
}
