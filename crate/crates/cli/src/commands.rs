use std::path::Path;

use serde_json::json;

use qcompress::decomposition::{irreducible_components, overlap_graph};
use qcompress::ensemble::Ensemble;
use qcompress::iepsilon::{check_lemma_properties, IsometrySearchConfig};
use qcompress::rates::{entropy_profile, RateReport, SCHEMA_VERSION};
use qcompress::region::{boundary_polyline, polyline_csv, CeRegion, EqRegion, RegionSpec};
use qcompress::schumacher::{curve_csv, fidelity_curve};

use crate::io::{emit, load_ensemble, load_matrix, parse_spec, write_atomic, CliError, CliResult};
use crate::{Format, RegionKind, Settings};

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

pub fn validate(input: &Path) -> CliResult<()> {
    let spec = parse_spec(input)?;
    let violations = spec.validate();
    if violations.is_empty() {
        println!("ok: {} states, dimA = {}", spec.states.len(), spec.dim_a);
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    Err(CliError::Domain(format!("{} problem(s) in {}", violations.len(), input.display())))
}

pub fn decompose(input: &Path, out: Option<&Path>, s: &Settings) -> CliResult<()> {
    let e = load_ensemble(input)?;
    let graph = overlap_graph(&e, s.tol);
    let d = irreducible_components(&e, s.tol);
    let edges: Vec<[&str; 2]> = graph.labeled_edges().into_iter().map(|(a, b)| [a, b]).collect();
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "tolerance": s.tol,
        "components": d.components,
        "irreducible": d.support_size() == 1,
        "overlap_edges": edges,
    });
    emit(out, &pretty(&v))
}

pub fn rates(input: &Path, apply_cnot: bool, pre_unitary: Option<&Path>, out: Option<&Path>, s: &Settings) -> CliResult<()> {
    let mut e = load_ensemble(input)?;
    if apply_cnot {
        e = e.apply_cnot(s.tol)?;
    } else if let Some(path) = pre_unitary {
        let u = load_matrix(path)?;
        e = e.apply_side_unitary(&u, s.tol)?;
    }
    let report = RateReport::compute(&e, s.tol)?;
    let mut text = report.to_json();
    text.push('\n');
    emit(out, &text)
}

pub struct RegionArgs {
    pub kind: RegionKind,
    pub x: (Option<f64>, Option<f64>),
    pub y: (Option<f64>, Option<f64>),
    pub samples: usize,
    pub allow_negative_e: bool,
}

fn region_spec(e: &Ensemble, args: &RegionArgs, s: &Settings) -> CliResult<RegionSpec> {
    let p = entropy_profile(e, s.tol)?;
    match args.kind {
        RegionKind::Eq => {
            let mut r = EqRegion::from_profile(&p)?;
            r.allow_negative_e = args.allow_negative_e;
            Ok(RegionSpec::Eq(r))
        }
        RegionKind::Ce => {
            if args.allow_negative_e {
                return Err(CliError::Domain("--allow-negative-e applies to the EQ region only".into()));
            }
            if !e.is_blind(s.tol) {
                return Err(CliError::Domain(
                    "the (C,E) region is only available for blind sources (all side states equal)".into(),
                ));
            }
            Ok(RegionSpec::Ce(CeRegion::from_profile(&p)))
        }
    }
}

pub fn region(input: &Path, args: RegionArgs, out_dir: Option<&Path>, s: &Settings) -> CliResult<()> {
    let e = load_ensemble(input)?;
    let spec = region_spec(&e, &args, s)?;
    // default window: one unit past the corner in each direction
    let (cx, cy) = match &spec {
        RegionSpec::Eq(r) => r.corner(),
        RegionSpec::Ce(r) => r.corner(),
    };
    let x_lo_default = if args.allow_negative_e { -1.0 } else { 0.0 };
    let x_range = (args.x.0.unwrap_or(x_lo_default), args.x.1.unwrap_or(cx.max(0.0) + 1.0));
    let y_top = match &spec {
        RegionSpec::Eq(r) => r.sum_min.max(cy) + 1.0,
        RegionSpec::Ce(_) => cy.max(0.0) + 1.0,
    };
    let y_range = (args.y.0.unwrap_or(0.0), args.y.1.unwrap_or(y_top));
    let points = boundary_polyline(&spec, x_range, y_range, args.samples)?;
    let csv = polyline_csv(&spec, &points);
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|err| CliError::Io(format!("{}: {err}", dir.display())))?;
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "region": serde_json::to_value(spec).expect("region serializes"),
                "x_range": [x_range.0, x_range.1],
                "y_range": [y_range.0, y_range.1],
                "samples": args.samples,
                "points": points.len(),
            });
            write_atomic(&dir.join("region.csv"), &csv)?;
            write_atomic(&dir.join("region.json"), &pretty(&v))
        }
        None => emit(None, &csv),
    }
}

pub fn simulate(
    input: &Path,
    ns: &[usize],
    rate: Option<f64>,
    rate_offset: Option<f64>,
    format: Format,
    out: Option<&Path>,
    s: &Settings,
) -> CliResult<()> {
    let e = load_ensemble(input)?;
    if !e.is_blind(s.tol) {
        return Err(CliError::Domain("the simulator handles blind sources only".into()));
    }
    let s_a = entropy_profile(&e, s.tol)?.s_a;
    let q = match (rate, rate_offset) {
        (Some(q), _) => q,
        (None, Some(d)) => s_a + d,
        (None, None) => return Err(CliError::Domain("give --rate or --rate-offset".into())),
    };
    let curve = fidelity_curve(&e, ns, q, &s.caps);
    if let Some(bad) = curve.iter().find(|p| p.error.is_some()) {
        return Err(CliError::Domain(format!(
            "n = {}: {}",
            bad.n,
            bad.error.as_deref().unwrap_or_default()
        )));
    }
    let text = match format {
        Format::Csv => curve_csv(&curve),
        Format::Json => pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "s_a": s_a,
            "rate": q,
            "caps": s.caps,
            "points": curve,
        })),
    };
    emit(out, &text)
}

pub fn iepsilon(
    input: &Path,
    eps: &[f64],
    cfg: &IsometrySearchConfig,
    product_check: bool,
    out: Option<&Path>,
) -> CliResult<()> {
    let e = load_ensemble(input)?;
    let report = check_lemma_properties(&e, eps, cfg, product_check)?;
    if !report.above_zero_ceiling.is_empty() {
        eprintln!(
            "note: {} estimate(s) at ε > 0 exceed S(CY); that bound only applies at ε = 0",
            report.above_zero_ceiling.len()
        );
    }
    if !report.monotonicity_violations.is_empty() {
        eprintln!("warning: estimates drop along the ε grid (optimizer did not converge)");
    }
    let mut text = report.to_json();
    text.push('\n');
    emit(out, &text)
}
