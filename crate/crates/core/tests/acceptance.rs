//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p qcompress --test acceptance -- --nocapture`.

mod common;

use std::time::{Duration, Instant};

use qcompress::decomposition::{is_irreducible, DEFAULT_ORTHO_TOL};
use qcompress::ensemble::Ensemble;
use qcompress::iepsilon::{estimate_grid, i_zero_bounds, IsometrySearchConfig};
use qcompress::qstate::{binary_entropy, Layout, PureState};
use qcompress::rates::{
    classical_entanglement_corner, entropy_profile, optimal_q, qubit_cbit_point, resource_convert, Conversion,
    RateReport,
};
use qcompress::region::{eq_contains, EqRegion};
use qcompress::schumacher::{fidelity_curve, spearman, SimCaps};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::*;

const TOL: f64 = DEFAULT_ORTHO_TOL;

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn report(o: &Outcome) {
    println!(
        "[{}] criterion {}: {} ({:.2?}) {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.id,
        o.title,
        o.elapsed,
        o.detail
    );
}

fn run(id: u32, title: &'static str, limit: Duration, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, mut detail) = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    if !in_time {
        detail.push_str(&format!(" [over time limit {limit:?}]"));
    }
    let o = Outcome {
        id,
        title,
        pass: ok && in_time,
        detail,
        elapsed,
    };
    report(&o);
    o
}

fn oracle() -> Value {
    let text = std::fs::read_to_string(fixture_dir().join("discussion_oracle.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn discussion(t: f64) -> Ensemble {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |v: &[f64]| v.iter().map(|&x| x.into()).collect::<Vec<_>>();
    Ensemble::from_amplitudes(
        2,
        2,
        [
            ("0".to_string(), 0.5 - t, c(&[1.0, 0.0]), c(&[1.0, 0.0])),
            ("1".to_string(), 0.5 - t, c(&[0.0, 1.0]), c(&[1.0, 0.0])),
            ("2".to_string(), 2.0 * t, c(&[h, h]), c(&[h, h])),
        ],
    )
    .unwrap()
}

fn criterion_1() -> (bool, String) {
    let oracle = oracle();
    let mut ok = true;
    let mut plain = Vec::new();
    let mut cnot = Vec::new();
    for row in oracle["discussion"].as_array().unwrap() {
        let t = row["t"].as_f64().unwrap();
        let e = discussion(t);
        let q0 = RateReport::compute(&e, TOL).unwrap().point("optimal").unwrap().qubits();
        let q1 = RateReport::compute(&e.apply_cnot(TOL).unwrap(), TOL)
            .unwrap()
            .point("optimal")
            .unwrap()
            .qubits();
        let w0 = row["plain"]["q_opt"].as_f64().unwrap();
        let w1 = row["cnot"]["q_opt"].as_f64().unwrap();
        ok &= (q0 - w0).abs() < 1e-9 && (q1 - w1).abs() < 1e-9;
        if t <= 0.01 {
            plain.push(q0);
            cnot.push(q1);
        }
    }
    // grid runs t = 0.01, 0.005, 0.001
    ok &= plain.windows(2).all(|w| w[1] > w[0]) && cnot.windows(2).all(|w| w[1] < w[0]);
    let (p_last, c_last) = (*plain.last().unwrap(), *cnot.last().unwrap());
    ok &= (p_last - 1.0).abs() <= 0.05 && (c_last - 0.5).abs() <= 0.05;
    (ok, format!("Q_opt(t→0) = {plain:.6?}; after CNOT {cnot:.6?}"))
}

fn criterion_2() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut found = 0;
    let mut rejected = 0;
    while found < 20 {
        let dim_a = 2 + found % 2;
        let k = 2 + found % 4;
        let e = random_blind(&mut rng, dim_a, k);
        if !is_irreducible(&e, TOL) {
            rejected += 1;
            continue;
        }
        found += 1;
        let p = entropy_profile(&e, TOL).unwrap();
        worst = worst.max((optimal_q(&p).qubits() - p.s_a).abs());
    }
    (worst <= 1e-9, format!("max |Q_opt − S_A| = {worst:.2e} over 20 ({rejected} rejected)"))
}

fn criterion_3() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let e = random_visible(&mut rng, 2 + i % 2, 2 + i % 5);
        let p = entropy_profile(&e, TOL).unwrap();
        let r = optimal_q(&p);
        worst = worst
            .max((r.qubits() - 0.5 * p.s_a).abs())
            .max((r.ebits() - 0.5 * p.s_a).abs());
    }
    (worst <= 1e-9, format!("max deviation from S_A/2 = {worst:.2e}"))
}

fn criterion_4() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_line = 0.0f64;
    let mut all_inside = true;
    for _ in 0..30 {
        let e = random_general(&mut rng);
        let p = entropy_profile(&e, TOL).unwrap();
        let r = optimal_q(&p);
        let region = EqRegion::from_profile(&p).unwrap();
        let pt = (r.ebits(), r.qubits());
        all_inside &= eq_contains(&region, pt, 1e-9);
        worst_line = worst_line
            .max((pt.1 - region.q_min).abs())
            .max((pt.0 + pt.1 - region.sum_min).abs());
    }
    let mut worst_corner = 0.0f64;
    for i in 0..20 {
        let e = if i % 2 == 0 {
            random_blind(&mut rng, 2 + i % 3, 2 + i % 4)
        } else {
            // reducible blind source, so S(Y) > 0
            let (e, _) = planted(&mut rng);
            let items = e
                .items()
                .iter()
                .map(|it| (it.label.clone(), it.prob, it.psi.amplitudes().iter().copied().collect(), vec![1.0.into()]))
                .collect::<Vec<_>>();
            Ensemble::from_amplitudes(e.dim_a(), 1, items).unwrap()
        };
        let p = entropy_profile(&e, TOL).unwrap();
        let start = qubit_cbit_point(&p);
        let moved = resource_convert(&start, Conversion::Teleport, start.qubits()).unwrap();
        let corner = classical_entanglement_corner(&e, TOL).unwrap();
        worst_corner = worst_corner
            .max((moved.cbits() - corner.cbits()).abs())
            .max((moved.ebits() - corner.ebits()).abs())
            .max(moved.qubits().abs());
    }
    (
        all_inside && worst_line <= 1e-9 && worst_corner <= 1e-12,
        format!("inside: {all_inside}, line gap {worst_line:.2e}, teleported corner gap {worst_corner:.2e}"),
    )
}

fn criterion_5() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut reducible = 0;
    for _ in 0..50 {
        let e = random_general(&mut rng);
        let p = entropy_profile(&e, TOL).unwrap();
        if p.components > 1 {
            reducible += 1;
        }
        worst = worst.max(p.dual_path_gap);
    }
    (worst <= 1e-8, format!("max |direct − block| S(ACY) = {worst:.2e} ({reducible}/50 reducible)"))
}

fn criterion_6() -> (bool, String) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |v: &[f64]| PureState::from_real(Layout::single("A", 2).unwrap(), v).unwrap();
    let e = qcompress::ensemble::make_blind(&[ket(&[1.0, 0.0]), ket(&[h, h])], &[0.5, 0.5]).unwrap();
    let s_a = entropy_profile(&e, TOL).unwrap().s_a;
    let oracle_s_a = oracle()["zero_plus_s_a"].as_f64().unwrap();
    let h2 = binary_entropy((2.0 + 2f64.sqrt()) / 4.0);
    let ns = [2, 4, 6, 8, 10];
    let nsf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let caps = SimCaps::default();
    let curve = |q: f64| -> Vec<f64> {
        fidelity_curve(&e, &ns, q, &caps)
            .into_iter()
            .map(|p| p.fidelity.expect("within caps"))
            .collect()
    };
    let above = curve(s_a + 0.1);
    let below = curve(s_a - 0.15);
    let full = curve(1.0);
    let (rho_up, rho_down) = (spearman(&nsf, &above), spearman(&nsf, &below));
    let ok = (s_a - oracle_s_a).abs() < 1e-12
        && (s_a - h2).abs() < 1e-12
        && rho_up > 0.0
        && rho_down < 0.0
        && full.iter().all(|&f| f == 1.0);
    (
        ok,
        format!(
            "S_A = {s_a:.5}; above {above:.4?} (ρ = {rho_up:.2}); below {below:.4?} (ρ = {rho_down:.2}); Q=1 all exactly 1: {}",
            full.iter().all(|&f| f == 1.0)
        ),
    )
}

/// Criterion 7 is split so the provable parts stay build-failing while the
/// literal ceiling for ε > 0 is reported as stated.
struct IepsChecks {
    floor: bool,
    ceiling_at_zero: bool,
    blind_irreducible_small: bool,
    monotone: bool,
    deterministic: bool,
    ceiling_all_eps: bool,
    exceed: Vec<String>,
}

fn criterion_7_checks() -> IepsChecks {
    let grid = [0.0, 0.05, 0.1, 0.2];
    let cfg = IsometrySearchConfig::default();
    let mut c = IepsChecks {
        floor: true,
        ceiling_at_zero: true,
        blind_irreducible_small: true,
        monotone: true,
        deterministic: true,
        ceiling_all_eps: true,
        exceed: Vec::new(),
    };
    for (name, e) in all_fixtures() {
        let (lower, upper) = i_zero_bounds(&e, TOL).unwrap();
        let ests = estimate_grid(&e, &grid, &cfg).unwrap();
        for est in &ests {
            c.floor &= est.value >= lower - 1e-9;
            if est.value > upper + 1e-6 {
                c.ceiling_all_eps = false;
                if est.epsilon == 0.0 {
                    c.ceiling_at_zero = false;
                }
                c.exceed.push(format!("{name} ε={}: {:.4} > S(CY)={upper:.4}", est.epsilon, est.value));
            }
        }
        if e.is_blind(TOL) && is_irreducible(&e, TOL) {
            c.blind_irreducible_small &= ests[0].value <= 1e-3;
        }
        c.monotone &= ests.windows(2).all(|w| w[1].value >= w[0].value - 1e-3);
        let again = estimate_grid(&e, &grid, &cfg).unwrap();
        c.deterministic &= ests.iter().zip(&again).all(|(a, b)| a.value.to_bits() == b.value.to_bits());
    }
    c
}

fn criterion_7(checks: &IepsChecks) -> (bool, String) {
    let provable = checks.floor
        && checks.ceiling_at_zero
        && checks.blind_irreducible_small
        && checks.monotone
        && checks.deterministic;
    let mut detail = format!(
        "floor {}, ceiling@ε=0 {}, blind-irreducible@ε=0 ≤1e-3 {}, monotone {}, deterministic {}, ceiling@all ε {}",
        checks.floor,
        checks.ceiling_at_zero,
        checks.blind_irreducible_small,
        checks.monotone,
        checks.deterministic,
        checks.ceiling_all_eps
    );
    if !checks.ceiling_all_eps {
        detail.push_str(&format!(
            "\n    ANALYSIS: the S(CY) ceiling is a theorem about I_0 only. For ε > 0 the fidelity constraint is relaxed and \
             a correct estimator can exceed it; e.g. |a⟩ ↦ |a⟩|a⟩_W on blind {{|0⟩,|+⟩}} has F̄ ≈ 0.854 and \
             I = h₂(1/4) − 1/2 ≈ 0.311 > 0 = S(CY). Capping estimates would make them no longer exact objectives of stored isometries.\
             \n    exceedances: {}",
            checks.exceed.join("; ")
        ));
    }
    (provable && checks.ceiling_all_eps, detail)
}

fn criterion_8() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut recovered, mut perm_ok, mut pert_ok) = (0, 0, 0);
    for _ in 0..50 {
        let (e, planted_parts) = planted(&mut rng);
        let found = partition_of(&e, TOL);
        recovered += usize::from(found == planted_parts);
        perm_ok += usize::from(partition_of(&shuffled(&mut rng, &e), TOL) == found);
        pert_ok += usize::from(partition_of(&perturbed(&mut rng, &e, 1e-11), TOL) == found);
    }
    (
        recovered == 50 && perm_ok == 50 && pert_ok == 50,
        format!("planted recovered {recovered}/50, permutation {perm_ok}/50, perturbation {pert_ok}/50"),
    )
}

#[test]
fn acceptance() {
    let mut outcomes = vec![
        run(1, "discussion example limits", Duration::from_secs(1), criterion_1),
        run(2, "blind irreducible: no entanglement advantage", Duration::from_secs(5), criterion_2),
        run(3, "visible rates", Duration::from_secs(60), criterion_3),
        run(4, "corner consistency", Duration::from_secs(60), criterion_4),
        run(5, "dual-path entropy self-check", Duration::from_secs(60), criterion_5),
        run(6, "Schumacher threshold behavior", Duration::from_secs(30), criterion_6),
    ];
    let mut checks = None;
    outcomes.push(run(7, "I_ε estimator bounds", Duration::from_secs(120), || {
        let c = criterion_7_checks();
        let r = criterion_7(&c);
        checks = Some(c);
        r
    }));
    outcomes.push(run(8, "decomposition correctness", Duration::from_secs(60), criterion_8));

    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());

    // Criterion 7's literal ceiling for ε > 0 is not attainable by a correct
    // estimator (see ANALYSIS above). Everything else must pass.
    let c7 = checks.expect("criterion 7 ran");
    for o in &outcomes {
        if o.id == 7 {
            assert!(
                c7.floor && c7.ceiling_at_zero && c7.blind_irreducible_small && c7.monotone && c7.deterministic,
                "criterion 7 provable parts failed: {}",
                o.detail
            );
            assert!(o.elapsed <= Duration::from_secs(120), "criterion 7 over time");
        } else {
            assert!(o.pass, "criterion {} failed: {}", o.id, o.detail);
        }
    }
}
