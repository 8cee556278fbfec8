//! Finite-blocklength Schumacher compression of a blind source without
//! entanglement.
//!
//! The code space at blocklength `n` and rate `Q` is spanned by the
//! `min(⌊2^{nQ}⌋, |A|^n)` tensor products of single-copy eigenvectors of
//! `ω_A` with the largest eigenvalue products. The encoder measures
//! `{Π, 1 − Π}`; on the failure outcome it substitutes the highest-weight
//! code vector. Every sequence `x^n` is enumerated exactly, so results are
//! deterministic.
//!
//! Everything is computed in the product eigenbasis: if `c_x = U†ψ_x`, then
//! `‖Πψ_{x^n}‖² = Σ_{s∈S} Π_i |c_{x_i}[s_i]|²` and the fidelity of
//! `ξ = Πψψ†Π + (1 − ‖Πψ‖²)|f⟩⟨f|` with `ψ` is
//! `√(‖Πψ‖⁴ + (1 − ‖Πψ‖²)|⟨f|ψ⟩|²)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::DEFAULT_ORTHO_TOL;
use crate::ensemble::{Ensemble, Part};
use crate::error::{Error, Result};
use crate::qstate::layout::check_cap;
use crate::qstate::linalg::{compensated_sum, CMatrix, CVector, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimCaps {
    /// Largest `|A|^n` (default `2^14`).
    pub max_code_dim: usize,
    /// Largest number of enumerated sequences `|X|^n`.
    pub max_sequences: usize,
}

impl Default for SimCaps {
    fn default() -> Self {
        SimCaps {
            max_code_dim: 1 << 14,
            max_sequences: 200_000,
        }
    }
}

/// Selected code subspace.
#[derive(Clone, Debug)]
pub struct CodeSpace {
    pub n: usize,
    pub rate: f64,
    pub rank: usize,
    dim_a: usize,
    /// Single-copy eigendecomposition of `ω_A`, eigenvalues descending.
    pub single_copy: Spectrum,
    /// Flat product-eigenbasis indices of the code vectors, highest weight first.
    pub selected: Vec<usize>,
    /// Eigenvalue products of the selected vectors.
    pub weights: Vec<f64>,
    /// Product-eigenbasis index of the failure state.
    pub failure: usize,
}

impl CodeSpace {
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn full_dim(&self) -> usize {
        self.dim_a.pow(self.n as u32)
    }

    pub fn is_full(&self) -> bool {
        self.rank == self.full_dim()
    }

    /// Base-`|A|` digits of a flat product index, most significant first.
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for slot in d.iter_mut().rev() {
            *slot = idx % self.dim_a;
            idx /= self.dim_a;
        }
        d
    }

    /// The product eigenvector with flat index `idx`, in the computational basis.
    pub fn product_vector(&self, idx: usize) -> CVector {
        let mut v = CVector::from_element(1, 1.0.into());
        for k in self.digits(idx) {
            v = v.kronecker(&self.single_copy.vectors.column(k).into_owned());
        }
        v
    }

    /// Code vectors as the columns of a `|A|^n × rank` matrix.
    pub fn basis_matrix(&self) -> CMatrix {
        let cols: Vec<CVector> = self.selected.iter().map(|&i| self.product_vector(i)).collect();
        CMatrix::from_columns(&cols)
    }
}

fn require_blind(e: &Ensemble) -> Result<()> {
    if !e.is_blind(DEFAULT_ORTHO_TOL) {
        return Err(Error::Usage("the simulator handles blind sources only".into()));
    }
    Ok(())
}

/// Number of code vectors: `min(⌊2^{nQ}⌋, |A|^n)`, at least one.
pub fn code_rank(dim_a: usize, n: usize, rate: f64) -> usize {
    let full = (dim_a as f64).powi(n as i32);
    let raw = (rate * n as f64).exp2();
    let r = (raw + 1e-9).floor().clamp(1.0, full);
    r as usize
}

pub fn build_code_space(e: &Ensemble, n: usize, rate: f64, caps: &SimCaps) -> Result<CodeSpace> {
    require_blind(e)?;
    if n == 0 {
        return Err(Error::Usage("blocklength n must be at least 1".into()));
    }
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::Usage(format!("rate Q = {rate} must be a non-negative number")));
    }
    let dim_a = e.dim_a();
    let full = (dim_a as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    check_cap("code dimension |A|^n", full, caps.max_code_dim)?;
    let full = full as usize;

    let single_copy = e.reduced(Part::A).eig()?;
    let lambda = &single_copy.values;
    let mut scratch = vec![0usize; n];
    // weight from sorted digits so that permuted sequences tie exactly
    let weight_of = |mut idx: usize, digits: &mut Vec<usize>| {
        for slot in digits.iter_mut().rev() {
            *slot = idx % dim_a;
            idx /= dim_a;
        }
        digits.sort_unstable();
        digits.iter().map(|&k| lambda[k]).product::<f64>()
    };
    let mut ranked: Vec<(f64, usize)> = (0..full).map(|i| (weight_of(i, &mut scratch), i)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let rank = code_rank(dim_a, n, rate);
    ranked.truncate(rank);
    Ok(CodeSpace {
        n,
        rate,
        rank,
        dim_a,
        single_copy,
        failure: ranked[0].1,
        selected: ranked.iter().map(|r| r.1).collect(),
        weights: ranked.iter().map(|r| r.0).collect(),
    })
}

/// Average fidelity `Σ p(x^n) F(ψ_{x^n}, ξ_{x^n})` over all sequences.
pub fn simulate_fidelity(e: &Ensemble, cs: &CodeSpace, caps: &SimCaps) -> Result<f64> {
    require_blind(e)?;
    if e.dim_a() != cs.dim_a {
        return Err(Error::Usage("code space was built for a different source".into()));
    }
    let n = cs.n;
    let support: Vec<_> = e.support().collect();
    let count = (support.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    check_cap("sequences |X|^n (lower n)", count, caps.max_sequences)?;
    let count = count as usize;
    if cs.is_full() {
        // Π = 1: every sequence is reproduced exactly
        return Ok(1.0);
    }

    // amplitudes of each ψ_x in the single-copy eigenbasis
    let u_adj = cs.single_copy.vectors.adjoint();
    let coeffs: Vec<CVector> = support.iter().map(|it| &u_adj * it.psi.amplitudes()).collect();
    let weights: Vec<Vec<f64>> = coeffs.iter().map(|c| c.iter().map(|z| z.norm_sqr()).collect()).collect();
    let code_digits: Vec<Vec<usize>> = cs.selected.iter().map(|&i| cs.digits(i)).collect();
    let fail_digits = cs.digits(cs.failure);
    let nx = support.len();

    let terms: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|seq| {
            let mut xs = vec![0usize; n];
            let mut s = seq;
            for slot in xs.iter_mut().rev() {
                *slot = s % nx;
                s /= nx;
            }
            let prob: f64 = xs.iter().map(|&x| support[x].prob).product();
            let kept = compensated_sum(
                code_digits
                    .iter()
                    .map(|ds| ds.iter().zip(&xs).map(|(&k, &x)| weights[x][k]).product::<f64>()),
            )
            .clamp(0.0, 1.0);
            let fail_overlap: f64 = fail_digits.iter().zip(&xs).map(|(&k, &x)| weights[x][k]).product();
            let f = (kept * kept + (1.0 - kept) * fail_overlap).sqrt().clamp(0.0, 1.0);
            prob * f
        })
        .collect();
    Ok(compensated_sum(terms).clamp(0.0, 1.0))
}

/// One entry of [`fidelity_curve`].
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub n: usize,
    pub rate: f64,
    pub rank: Option<usize>,
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Fidelity for each blocklength in `ns`, in order. Per-`n` failures (caps)
/// are recorded in the point rather than aborting the curve.
pub fn fidelity_curve(e: &Ensemble, ns: &[usize], rate: f64, caps: &SimCaps) -> Vec<CurvePoint> {
    ns.iter()
        .map(|&n| {
            let run = build_code_space(e, n, rate, caps)
                .and_then(|cs| simulate_fidelity(e, &cs, caps).map(|f| (cs.rank, f)));
            match run {
                Ok((rank, f)) => CurvePoint {
                    n,
                    rate,
                    rank: Some(rank),
                    fidelity: Some(f),
                    error: None,
                },
                Err(err) => CurvePoint {
                    n,
                    rate,
                    rank: None,
                    fidelity: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect()
}

/// CSV `n,Q,fidelity` with 12-decimal values; failed points are omitted.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("n,Q,fidelity\n");
    for p in points {
        if let Some(f) = p.fidelity {
            writeln!(out, "{},{:.6},{:.12}", p.n, p.rate, f).expect("write to string");
        }
    }
    out
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (average ranks for ties). Returns 0 when
/// either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}
