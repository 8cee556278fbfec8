//! Lower bounds on `I_ε(ω)`, the classical information about `X` that an
//! isometry `V: AC → ÂĈW` can move into `ĈW` while keeping the average
//! fidelity of `ÂĈ` with the source at least `1 − ε`.
//!
//! The search is derivative-free: random Hermitian directions `G` on the
//! output space, steps `V ← exp(iδG) V` with geometric decay of `δ`, and a
//! quadratic penalty on the fidelity constraint. Only iterates that satisfy
//! the constraint are ever reported, so every value is the exact objective of
//! a stored isometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::DEFAULT_ORTHO_TOL;
use crate::ensemble::{Ensemble, Part};
use crate::error::{Error, Result};
use crate::qstate::linalg::{compensated_sum, entropy_of_spectrum, hermitian_eig, orthonormalize_columns};
use crate::qstate::{Caps, CMatrix, CVector, Isometry, Layout};
use crate::rates::{entropy_profile, SCHEMA_VERSION};

/// Slack for a constraint to count as met.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Slack before a drop along the ε grid is flagged.
pub const MONOTONE_SLACK: f64 = 1e-3;
/// Slack on the `S(CY)` ceiling at `ε = 0`.
pub const CEILING_SLACK: f64 = 1e-6;
/// Slack for the descriptive concavity check.
pub const CONCAVITY_SLACK: f64 = 5e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometrySearchConfig {
    /// Environment dimension `|W|`. `None` means `min(|A|²|C|², env_cap)`.
    pub env_dim: Option<usize>,
    pub env_cap: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Penalty weight `μ` on `max(0, 1 − ε − F)²`.
    pub penalty: f64,
    pub seed: u64,
    /// The search stops once the step size drops below this.
    pub tolerance: f64,
    pub initial_step: f64,
    pub step_decay: f64,
}

impl Default for IsometrySearchConfig {
    fn default() -> Self {
        IsometrySearchConfig {
            env_dim: None,
            env_cap: 4,
            restarts: 4,
            max_iters: 200,
            penalty: 100.0,
            seed: 0,
            tolerance: 1e-6,
            initial_step: 0.3,
            step_decay: 0.8,
        }
    }
}

impl IsometrySearchConfig {
    /// `|W|` for a source with the given dimensions; errors on `|W| = 0`.
    pub fn resolve_env_dim(&self, dim_a: usize, dim_c: usize) -> Result<usize> {
        let bound = (dim_a * dim_c).pow(2);
        let w = self.env_dim.unwrap_or(bound.min(self.env_cap));
        if w == 0 {
            return Err(Error::Usage("environment dimension |W| must be at least 1".into()));
        }
        if w > bound {
            return Err(Error::Usage(format!("|W| = {w} exceeds |A|²|C|² = {bound}")));
        }
        Ok(w)
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Usage("restarts must be at least 1".into()));
        }
        if !(self.penalty >= 0.0 && self.initial_step > 0.0 && self.step_decay > 0.0 && self.step_decay < 1.0) {
            return Err(Error::Usage("penalty ≥ 0, step > 0 and 0 < decay < 1 required".into()));
        }
        Ok(())
    }
}

/// Output layout `Â ⊗ Ĉ ⊗ W`.
pub fn output_layout(dim_a: usize, dim_c: usize, dim_w: usize) -> Result<Layout> {
    Layout::new([("Ahat", dim_a), ("Chat", dim_c), ("W", dim_w)])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObjectiveValue {
    /// `I(X:ĈW)` in bits.
    pub information: f64,
    /// `Σ p(x) F(ψ_x⊗σ_x, ξ_x^{ÂĈ})`.
    pub fidelity: f64,
}

impl ObjectiveValue {
    fn feasible(&self, eps: f64) -> bool {
        self.fidelity >= 1.0 - eps - FEASIBILITY_TOL
    }

    fn score(&self, eps: f64, mu: f64) -> f64 {
        let gap = (1.0 - eps - self.fidelity).max(0.0);
        self.information - mu * gap * gap
    }
}

/// Source states `ψ_x ⊗ σ_x` flattened for repeated evaluation.
struct Prepared {
    probs: Vec<f64>,
    inputs: Vec<CVector>,
    da: usize,
    dc: usize,
    dw: usize,
}

impl Prepared {
    fn new(e: &Ensemble, dw: usize) -> Self {
        let support: Vec<_> = e.support().collect();
        Prepared {
            probs: support.iter().map(|it| it.prob).collect(),
            inputs: support.iter().map(|it| it.product().amplitudes().clone()).collect(),
            da: e.dim_a(),
            dc: e.dim_c(),
            dw,
        }
    }

    fn eval(&self, v: &CMatrix) -> ObjectiveValue {
        let (da, dc, dw) = (self.da, self.dc, self.dw);
        let dcw = dc * dw;
        let mut avg_cw = CMatrix::zeros(dcw, dcw);
        let mut cond = Vec::with_capacity(self.inputs.len());
        let mut fids = Vec::with_capacity(self.inputs.len());
        for (p, phi) in self.probs.iter().zip(&self.inputs) {
            let xi = v * phi;
            // rows: Â, columns: ĈW
            let m = CMatrix::from_fn(da, dcw, |a, r| xi[a * dcw + r]);
            avg_cw += (m.adjoint() * &m).scale(*p);
            cond.push(p * entropy_of(&(&m * m.adjoint())));
            // rows: ÂĈ, columns: W
            let n = CMatrix::from_fn(da * dc, dw, |ac, w| xi[ac * dw + w]);
            let overlaps = n.transpose() * phi.conjugate();
            fids.push(p * overlaps.norm_squared().clamp(0.0, 1.0).sqrt());
        }
        ObjectiveValue {
            information: (entropy_of(&avg_cw) - compensated_sum(cond)).max(0.0),
            fidelity: compensated_sum(fids).clamp(0.0, 1.0),
        }
    }
}

fn entropy_of(m: &CMatrix) -> f64 {
    let s = hermitian_eig(m);
    let vals: Vec<f64> = s.values.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    entropy_of_spectrum(&vals)
}

/// `(I(X:ĈW), F̄)` for an isometry with output layout `Â ⊗ Ĉ ⊗ W`.
pub fn objective(e: &Ensemble, v: &Isometry) -> Result<ObjectiveValue> {
    let dims = v.output().dims();
    if v.input_dim() != e.dim_a() * e.dim_c() || dims.len() != 3 || dims[0] != e.dim_a() || dims[1] != e.dim_c() {
        return Err(Error::LayoutMismatch(format!(
            "isometry {}→{:?} does not map A⊗C ({}×{}) to Â⊗Ĉ⊗W",
            v.input_dim(),
            dims,
            e.dim_a(),
            e.dim_c()
        )));
    }
    Ok(Prepared::new(e, dims[2]).eval(v.matrix()))
}

/// `(I(X:C), S(CY))`: the identity isometry is feasible at every ε, and
/// `S(CY)` bounds `I_0`.
pub fn i_zero_bounds(e: &Ensemble, tol: f64) -> Result<(f64, f64)> {
    let lower = e.reduced(Part::C).entropy()?;
    let upper = entropy_profile(e, tol)?.s_cy;
    Ok((lower, upper))
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchTrace {
    /// Best feasible value per restart (`None` if a restart found none).
    pub restart_best: Vec<Option<f64>>,
    pub iterations: usize,
    pub accepted: usize,
    /// Value of the starting isometry (identity or the previous ε's best).
    pub baseline: f64,
    /// No search iterate beat the starting isometry.
    pub baseline_only: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IEpsilonEstimate {
    pub epsilon: f64,
    /// Certified lower bound on `I_ε` in bits.
    pub value: f64,
    pub fidelity: f64,
    pub env_dim: usize,
    #[serde(skip)]
    pub isometry: Isometry,
    pub trace: SearchTrace,
}

struct RestartResult {
    best: Option<(ObjectiveValue, CMatrix)>,
    iterations: usize,
    accepted: usize,
}

fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        nalgebra::Complex::new(re, im)
    });
    let h = (&z + z.adjoint()).scale(0.5);
    let norm = h.norm();
    if norm > 0.0 {
        h.unscale(norm)
    } else {
        h
    }
}

/// `exp(iδG)` for Hermitian `G`.
fn unitary_step(g: &CMatrix, delta: f64) -> CMatrix {
    let s = hermitian_eig(g);
    let mut scaled = s.vectors.clone();
    for (j, &l) in s.values.iter().enumerate() {
        let ph = nalgebra::Complex::from_polar(1.0, delta * l);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= ph;
        }
    }
    scaled * s.vectors.adjoint()
}

fn rng_for(seed: u64, eps_index: usize, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((eps_index as u64) << 32) | restart as u64);
    rng
}

fn run_restart(prep: &Prepared, start: &CMatrix, eps: f64, cfg: &IsometrySearchConfig, mut rng: ChaCha8Rng, restart: usize) -> RestartResult {
    let d_out = start.nrows();
    let mut v = start.clone();
    if restart > 0 {
        // later restarts begin from a random rotation of the start
        let g = random_hermitian(d_out, &mut rng);
        v = unitary_step(&g, 1.0) * v;
    }
    let mut cur = prep.eval(&v);
    let mut best = cur.feasible(eps).then(|| (cur, v.clone()));
    let mut step = cfg.initial_step;
    let mut accepted = 0;
    let mut iterations = 0;
    while iterations < cfg.max_iters && step >= cfg.tolerance {
        iterations += 1;
        let g = random_hermitian(d_out, &mut rng);
        let mut moved = false;
        for sign in [1.0, -1.0] {
            let cand = unitary_step(&g, sign * step) * &v;
            let val = prep.eval(&cand);
            if val.score(eps, cfg.penalty) > cur.score(eps, cfg.penalty) {
                v = cand;
                cur = val;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= cfg.step_decay;
            continue;
        }
        accepted += 1;
        step = (step * 1.25).min(1.0);
        if accepted % 32 == 0 {
            v = orthonormalize_columns(&v);
            cur = prep.eval(&v);
        }
        if cur.feasible(eps) && best.as_ref().is_none_or(|(b, _)| cur.information > b.information) {
            best = Some((cur, v.clone()));
        }
    }
    RestartResult {
        best,
        iterations,
        accepted,
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::Usage(format!("ε = {eps} must be a finite non-negative number")));
    }
    Ok(())
}

fn search_one(
    prep: &Prepared,
    layout: &Layout,
    start: &CMatrix,
    eps: f64,
    eps_index: usize,
    cfg: &IsometrySearchConfig,
) -> Result<IEpsilonEstimate> {
    let base = prep.eval(start);
    let runs: Vec<RestartResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(prep, start, eps, cfg, rng_for(cfg.seed, eps_index, r), r))
        .collect();
    let mut value = base;
    let mut matrix = start.clone();
    let mut baseline_only = true;
    // pure max; ties keep the earlier candidate so the merge is order-free
    for run in &runs {
        if let Some((val, m)) = &run.best {
            if val.information > value.information {
                value = *val;
                matrix = m.clone();
                baseline_only = false;
            }
        }
    }
    Ok(IEpsilonEstimate {
        epsilon: eps,
        value: value.information,
        fidelity: value.fidelity,
        env_dim: prep.dw,
        isometry: Isometry::new(matrix, layout.clone())?,
        trace: SearchTrace {
            restart_best: runs.iter().map(|r| r.best.as_ref().map(|b| b.0.information)).collect(),
            iterations: runs.iter().map(|r| r.iterations).sum(),
            accepted: runs.iter().map(|r| r.accepted).sum(),
            baseline: base.information,
            baseline_only,
        },
    })
}

/// Estimates along an ascending ε grid. Each ε starts from the best
/// isometry found for the previous one (feasible for larger ε), so the
/// estimates are non-decreasing by construction.
pub fn estimate_grid(e: &Ensemble, eps_grid: &[f64], cfg: &IsometrySearchConfig) -> Result<Vec<IEpsilonEstimate>> {
    cfg.validate()?;
    for &eps in eps_grid {
        check_eps(eps)?;
    }
    if eps_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Usage("ε grid must be sorted ascending".into()));
    }
    let dw = cfg.resolve_env_dim(e.dim_a(), e.dim_c())?;
    let layout = output_layout(e.dim_a(), e.dim_c(), dw)?;
    Caps::default().check_matrix(layout.total_dim() as u128)?;
    let prep = Prepared::new(e, dw);
    let mut start = Isometry::append_zero(e.dim_a() * e.dim_c(), layout.clone())?.matrix().clone();
    let mut out = Vec::with_capacity(eps_grid.len());
    for (i, &eps) in eps_grid.iter().enumerate() {
        let est = search_one(&prep, &layout, &start, eps, i, cfg)?;
        start = est.isometry.matrix().clone();
        out.push(est);
    }
    Ok(out)
}

/// Single-ε estimate, starting from the identity embedding.
pub fn estimate_i_epsilon(e: &Ensemble, eps: f64, cfg: &IsometrySearchConfig) -> Result<IEpsilonEstimate> {
    Ok(estimate_grid(e, &[eps], cfg)?.remove(0))
}

#[derive(Clone, Debug, Serialize)]
pub struct GridFlag {
    pub index: usize,
    pub epsilon: f64,
    pub amount: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubadditivityCheck {
    pub epsilon: f64,
    pub product_estimate: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Diagnostics for the estimated curve `ε ↦ I_ε`.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub schema_version: u32,
    pub config: IsometrySearchConfig,
    pub env_dim: usize,
    /// `|W|` is below `|A|²|C|²`, which narrows the search.
    pub env_capped: bool,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub estimates: Vec<IEpsilonEstimate>,
    /// Drops larger than the slack between consecutive grid points. These
    /// point at the optimizer, not the theory.
    pub monotonicity_violations: Vec<GridFlag>,
    /// Estimates at `ε = 0` above `S(CY)`. These are bugs.
    pub ceiling_violations: Vec<GridFlag>,
    /// Estimates at `ε > 0` above `S(CY)`. Allowed: the ceiling is only
    /// proved at `ε = 0`.
    pub above_zero_ceiling: Vec<GridFlag>,
    /// Interior points below the secant of their neighbours.
    pub concavity_notes: Vec<GridFlag>,
    pub subadditivity: Option<SubadditivityCheck>,
}

impl LemmaReport {
    /// No build-failing flags (ceiling at ε=0, subadditivity bound).
    pub fn consistent(&self) -> bool {
        self.ceiling_violations.is_empty() && self.subadditivity.as_ref().is_none_or(|s| s.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the estimator on the grid and checks the properties that lower
/// bounds can witness. With `product_check`, also estimates the two-fold
/// product at `ε = 0` with a reduced budget.
pub fn check_lemma_properties(
    e: &Ensemble,
    eps_grid: &[f64],
    cfg: &IsometrySearchConfig,
    product_check: bool,
) -> Result<LemmaReport> {
    let estimates = estimate_grid(e, eps_grid, cfg)?;
    let (lower, upper) = i_zero_bounds(e, DEFAULT_ORTHO_TOL)?;
    let env_dim = estimates.first().map(|x| x.env_dim).unwrap_or(cfg.resolve_env_dim(e.dim_a(), e.dim_c())?);
    let flag = |i: usize, amount: f64| GridFlag {
        index: i,
        epsilon: estimates[i].epsilon,
        amount,
    };
    let mut monotonicity_violations = Vec::new();
    let mut ceiling_violations = Vec::new();
    let mut above_zero_ceiling = Vec::new();
    let mut concavity_notes = Vec::new();
    for i in 0..estimates.len() {
        let v = estimates[i].value;
        if i > 0 && estimates[i - 1].value - v > MONOTONE_SLACK {
            monotonicity_violations.push(flag(i, estimates[i - 1].value - v));
        }
        if v > upper + CEILING_SLACK {
            if estimates[i].epsilon == 0.0 {
                ceiling_violations.push(flag(i, v - upper));
            } else {
                above_zero_ceiling.push(flag(i, v - upper));
            }
        }
        if i > 0 && i + 1 < estimates.len() {
            let (a, b) = (&estimates[i - 1], &estimates[i + 1]);
            if b.epsilon > a.epsilon {
                let t = (estimates[i].epsilon - a.epsilon) / (b.epsilon - a.epsilon);
                let secant = a.value + t * (b.value - a.value);
                if secant - v > CONCAVITY_SLACK {
                    concavity_notes.push(flag(i, secant - v));
                }
            }
        }
    }
    let subadditivity = if product_check {
        let pair = e.tensor_power(2, &Caps::default())?;
        let small = IsometrySearchConfig {
            restarts: 1,
            max_iters: (cfg.max_iters / 4).max(1),
            ..cfg.clone()
        };
        let est = estimate_i_epsilon(&pair, 0.0, &small)?;
        let bound = 2.0 * upper + MONOTONE_SLACK;
        Some(SubadditivityCheck {
            epsilon: 0.0,
            product_estimate: est.value,
            bound,
            holds: est.value <= bound,
        })
    } else {
        None
    };
    Ok(LemmaReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        env_dim,
        env_capped: env_dim < (e.dim_a() * e.dim_c()).pow(2),
        lower_bound: lower,
        upper_bound: upper,
        estimates,
        monotonicity_violations,
        ceiling_violations,
        above_zero_ceiling,
        concavity_notes,
        subadditivity,
    })
}
