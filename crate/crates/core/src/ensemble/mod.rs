//! Sources `{p(x), ψ_x^A ⊗ σ_x^C}` and the states built from them.
//!
//! The label register `X` stays classical: rate computations work from the
//! probability list and the conditional pure states, and the full cqq state
//! `Σ_x p(x)|x⟩⟨x| ⊗ ψ_x ⊗ σ_x` is materialized only on request
//! ([`Ensemble::source_state`]).

mod spec;

pub use spec::{EnsembleSpec, StateSpec, Violation, NORM_TOL, PROB_SUM_TOL};

use std::collections::HashSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::linalg::{max_abs, CMatrix, CVector};
use crate::qstate::{Caps, DensityMatrix, Layout, PureState};

/// One member `(x, p(x), ψ_x, σ_x)` of an ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct Item {
    pub label: String,
    pub prob: f64,
    pub psi: PureState,
    pub sigma: PureState,
}

impl Item {
    /// `|ψ_x⟩ ⊗ |σ_x⟩` on layout `[A, C]`.
    pub fn product(&self) -> PureState {
        self.psi.tensor(&self.sigma).expect("A and C labels are distinct")
    }
}

/// Which quantum registers to keep in [`Ensemble::reduced`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    A,
    C,
    AC,
}

/// A validated finite ensemble of product pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    dim_a: usize,
    dim_c: usize,
    items: Vec<Item>,
}

/// The cqq state `ω^{XAC}` as a dense matrix on `[X, A, C]`.
#[derive(Clone, Debug)]
pub struct SourceState {
    pub rho: DensityMatrix,
    /// `X` is diagonal in its basis by construction.
    pub classical_x: bool,
}

impl SourceState {
    /// Diagonal block `x` of the `X` register, as a `|AC| × |AC|` matrix.
    pub fn block(&self, x: usize) -> CMatrix {
        let d = self.rho.dim() / self.rho.layout().dim_of("X").unwrap_or(1);
        self.rho.matrix().view((x * d, x * d), (d, d)).into_owned()
    }
}

impl Ensemble {
    /// Checks probabilities, label uniqueness and that every `ψ_x` (resp.
    /// `σ_x`) lives on the same single-factor layout `A` (resp. `C`).
    pub fn new(items: Vec<Item>) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::InvalidEnsemble("ensemble has no states".into()))?;
        let la = first.psi.layout().clone();
        let lc = first.sigma.layout().clone();
        if la.systems().len() != 1 || la.systems()[0].label != "A" {
            return Err(Error::InvalidEnsemble("source states must live on a single register `A`".into()));
        }
        if lc.systems().len() != 1 || lc.systems()[0].label != "C" {
            return Err(Error::InvalidEnsemble("side states must live on a single register `C`".into()));
        }
        let mut labels = HashSet::new();
        let mut sum = 0.0;
        for (i, it) in items.iter().enumerate() {
            if it.psi.layout() != &la || it.sigma.layout() != &lc {
                return Err(Error::InvalidEnsemble(format!("state {i}: inconsistent dimensions")));
            }
            if !labels.insert(it.label.as_str()) {
                return Err(Error::InvalidEnsemble(format!("duplicate label `{}`", it.label)));
            }
            if !it.prob.is_finite() || it.prob < 0.0 {
                return Err(Error::InvalidEnsemble(format!("state {i}: bad probability {}", it.prob)));
            }
            for (name, s) in [("psi", &it.psi), ("sigma", &it.sigma)] {
                let n = s.amplitudes().norm();
                if (n - 1.0).abs() > NORM_TOL {
                    return Err(Error::InvalidEnsemble(format!("state {i}: {name} has norm {n}")));
                }
            }
            sum += it.prob;
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {sum}")));
        }
        Ok(Ensemble {
            dim_a: la.total_dim(),
            dim_c: lc.total_dim(),
            items,
        })
    }

    /// Convenience constructor from `(label, p, ψ amplitudes, σ amplitudes)`.
    /// Amplitude vectors are normalized.
    pub fn from_amplitudes(
        dim_a: usize,
        dim_c: usize,
        items: impl IntoIterator<Item = (String, f64, Vec<Complex64>, Vec<Complex64>)>,
    ) -> Result<Self> {
        let la = Layout::single("A", dim_a)?;
        let lc = Layout::single("C", dim_c)?;
        let items = items
            .into_iter()
            .map(|(label, prob, psi, sigma)| {
                Ok(Item {
                    label,
                    prob,
                    psi: PureState::normalized(la.clone(), psi)?,
                    sigma: PureState::normalized(lc.clone(), sigma)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(items)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_c(&self) -> usize {
        self.dim_c
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.items.iter().map(|it| it.prob).collect()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|it| it.label.as_str())
    }

    /// Items with `p(x) > 0`; zero-probability items never affect rates.
    pub fn support(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|it| it.prob > 0.0)
    }

    /// `Σ_x p(x)|x⟩⟨x| ⊗ ψ_x ⊗ σ_x`, exactly block diagonal in `X`.
    pub fn source_state(&self, caps: &Caps) -> Result<SourceState> {
        let nx = self.items.len();
        let dac = self.dim_a * self.dim_c;
        let side = (nx as u128) * (dac as u128);
        caps.check_matrix(side)?;
        let layout = Layout::new([("X", nx), ("A", self.dim_a), ("C", self.dim_c)])?;
        let mut m = CMatrix::zeros(nx * dac, nx * dac);
        for (x, it) in self.items.iter().enumerate() {
            let v = it.product();
            let block = v.projector().scale(it.prob);
            m.view_mut((x * dac, x * dac), (dac, dac)).copy_from(&block);
        }
        Ok(SourceState {
            rho: DensityMatrix::new(layout, m)?,
            classical_x: true,
        })
    }

    /// Reduced state on the kept registers, summed directly over the
    /// ensemble without building the `X` register.
    pub fn reduced(&self, keep: Part) -> DensityMatrix {
        let vecs: Vec<(f64, CVector, Layout)> = self
            .support()
            .map(|it| match keep {
                Part::A => (it.prob, it.psi.amplitudes().clone(), it.psi.layout().clone()),
                Part::C => (it.prob, it.sigma.amplitudes().clone(), it.sigma.layout().clone()),
                Part::AC => {
                    let p = it.product();
                    (it.prob, p.amplitudes().clone(), p.layout().clone())
                }
            })
            .collect();
        let layout = vecs[0].2.clone();
        let d = layout.total_dim();
        let mut m = CMatrix::zeros(d, d);
        for (p, v, _) in &vecs {
            m.gerc(Complex64::new(*p, 0.0), v, v, Complex64::new(1.0, 0.0));
        }
        DensityMatrix::new(layout, m).expect("mixture of normalized states is a state")
    }

    /// `e^{⊗n}`: items indexed by `x^n` (labels joined by `,`), with
    /// `p(x^n) = Π p(x_i)` and product states on `A^n`, `C^n`.
    pub fn tensor_power(&self, n: usize, caps: &Caps) -> Result<Ensemble> {
        if n == 0 {
            return Err(Error::Input("tensor power needs n ≥ 1".into()));
        }
        let count = (self.items.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        caps.check_items(count)?;
        let da = (self.dim_a as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let dc = (self.dim_c as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        caps.check_vector(da.saturating_mul(dc))?;
        let mut current = self.items.clone();
        for _ in 1..n {
            let mut next = Vec::with_capacity(current.len() * self.items.len());
            for a in &current {
                for b in &self.items {
                    next.push(Item {
                        label: format!("{},{}", a.label, b.label),
                        prob: a.prob * b.prob,
                        psi: kron_on(&a.psi, &b.psi, "A")?,
                        sigma: kron_on(&a.sigma, &b.sigma, "C")?,
                    });
                }
            }
            current = next;
        }
        Ensemble::new(current)
    }

    /// `|ψ_x ⊗ σ_x⟩ ↦ U |ψ_x ⊗ σ_x⟩` for a unitary `U` on `A ⊗ C`. Every image
    /// must again be a product state (to `tol` in max-norm); it is split back
    /// into `ψ'_x ⊗ σ'_x`.
    pub fn apply_side_unitary(&self, u: &CMatrix, tol: f64) -> Result<Ensemble> {
        let d = self.dim_a * self.dim_c;
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::Input(format!("unitary must be {d}x{d}, got {}x{}", u.nrows(), u.ncols())));
        }
        let defect = max_abs(&(u.adjoint() * u - CMatrix::identity(d, d)));
        if defect > crate::qstate::ISOMETRY_TOL {
            return Err(Error::NotAnIsometry(format!("pre-unitary is not unitary (‖U†U − 1‖ = {defect:e})")));
        }
        let la = Layout::single("A", self.dim_a)?;
        let lc = Layout::single("C", self.dim_c)?;
        let items = self
            .items
            .iter()
            .map(|it| {
                let v = u * it.product().amplitudes();
                let (psi, sigma) = split_product(&v, self.dim_a, self.dim_c, tol).ok_or_else(|| {
                    Error::Usage(format!("state `{}` is entangled between A and C after the unitary", it.label))
                })?;
                Ok(Item {
                    label: it.label.clone(),
                    prob: it.prob,
                    psi: PureState::normalized(la.clone(), psi)?,
                    sigma: PureState::normalized(lc.clone(), sigma)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(items)
    }

    /// Generalized CNOT with `A` as control and `C` as target:
    /// `|a⟩|c⟩ ↦ |a⟩|c + a mod |C|⟩`.
    pub fn apply_cnot(&self, tol: f64) -> Result<Ensemble> {
        self.apply_side_unitary(&cnot_matrix(self.dim_a, self.dim_c), tol)
    }

    /// True if `C` is trivial or every `σ_x` in the support equals the first
    /// up to phase, to `tol` in `1 − |⟨σ_x|σ_x'⟩|`.
    pub fn is_blind(&self, tol: f64) -> bool {
        if self.dim_c == 1 {
            return true;
        }
        let mut support = self.support();
        let Some(first) = support.next() else { return true };
        support.all(|it| {
            let ov = first.sigma.amplitudes().dotc(it.sigma.amplitudes()).norm();
            1.0 - ov <= tol
        })
    }

    /// True if the side states of the support are pairwise orthogonal to `tol`.
    pub fn is_visible(&self, tol: f64) -> bool {
        let s: Vec<&Item> = self.support().collect();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                if s[i].sigma.amplitudes().dotc(s[j].sigma.amplitudes()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

fn kron_on(a: &PureState, b: &PureState, label: &str) -> Result<PureState> {
    let layout = Layout::single(label, a.dim() * b.dim())?;
    PureState::new(layout, a.amplitudes().kronecker(b.amplitudes()).iter().copied().collect())
}

/// Rank-one split of a vector on `A ⊗ C` (row-major `a * dC + c`).
fn split_product(v: &CVector, da: usize, dc: usize, tol: f64) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
    let m = CMatrix::from_fn(da, dc, |a, c| v[a * dc + c]);
    let (mut ia, mut ic, mut best) = (0, 0, -1.0);
    for a in 0..da {
        for c in 0..dc {
            if m[(a, c)].norm() > best {
                best = m[(a, c)].norm();
                ia = a;
                ic = c;
            }
        }
    }
    if best <= 0.0 {
        return None;
    }
    // m = col(ic) ⊗ row(ia) / m[ia, ic] when m is rank one
    let pivot = m[(ia, ic)];
    let psi: Vec<Complex64> = (0..da).map(|a| m[(a, ic)]).collect();
    let sigma: Vec<Complex64> = (0..dc).map(|c| m[(ia, c)] / pivot).collect();
    for a in 0..da {
        for c in 0..dc {
            if (m[(a, c)] - psi[a] * sigma[c]).norm() > tol {
                return None;
            }
        }
    }
    Some((psi, sigma))
}

/// `|a⟩|c⟩ ↦ |a⟩|c + a mod dc⟩` as a permutation matrix.
pub fn cnot_matrix(da: usize, dc: usize) -> CMatrix {
    let d = da * dc;
    let mut u = CMatrix::zeros(d, d);
    for a in 0..da {
        for c in 0..dc {
            u[(a * dc + (c + a) % dc, a * dc + c)] = Complex64::new(1.0, 0.0);
        }
    }
    u
}

/// Blind ensemble: trivial side information.
pub fn make_blind(states: &[PureState], probs: &[f64]) -> Result<Ensemble> {
    build_with_sides(states, probs, 1, |_| 0)
}

/// Visible ensemble: `σ_x = |x⟩` on a `|X|`-dimensional side system.
pub fn make_visible(states: &[PureState], probs: &[f64]) -> Result<Ensemble> {
    build_with_sides(states, probs, states.len(), |x| x)
}

fn build_with_sides(states: &[PureState], probs: &[f64], dim_c: usize, side: impl Fn(usize) -> usize) -> Result<Ensemble> {
    if states.len() != probs.len() {
        return Err(Error::InvalidEnsemble(format!(
            "{} states but {} probabilities",
            states.len(),
            probs.len()
        )));
    }
    if states.is_empty() {
        return Err(Error::InvalidEnsemble("ensemble has no states".into()));
    }
    let la = Layout::single("A", states[0].dim())?;
    let lc = Layout::single("C", dim_c)?;
    let items = states
        .iter()
        .zip(probs)
        .enumerate()
        .map(|(x, (s, &p))| {
            Ok(Item {
                label: x.to_string(),
                prob: p,
                psi: s.with_layout(la.clone())?,
                sigma: PureState::basis(lc.clone(), side(x))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::linalg::real;
    use crate::qstate::shannon_entropy;

    fn ket(amps: &[f64]) -> PureState {
        PureState::from_real(Layout::single("A", amps.len()).unwrap(), amps).unwrap()
    }

    /// Discussion example: |0⟩|0⟩, |1⟩|0⟩, |+⟩|+⟩ with probs ½−t, ½−t, 2t.
    fn three_state(t: f64) -> Ensemble {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |v: &[f64]| v.iter().map(|&x| real(x)).collect::<Vec<_>>();
        Ensemble::from_amplitudes(
            2,
            2,
            [
                ("1".to_string(), 0.5 - t, r(&[1.0, 0.0]), r(&[1.0, 0.0])),
                ("2".to_string(), 0.5 - t, r(&[0.0, 1.0]), r(&[1.0, 0.0])),
                ("3".to_string(), 2.0 * t, r(&[h, h]), r(&[h, h])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn source_state_single() {
        let e = make_blind(&[ket(&[1.0, 0.0])], &[1.0]).unwrap();
        let s = e.source_state(&Caps::default()).unwrap();
        assert_eq!(s.rho.dim(), 2);
        assert_eq!(s.rho.matrix()[(0, 0)], real(1.0));
        assert_eq!(s.rho.matrix()[(1, 1)], real(0.0));
    }

    #[test]
    fn source_state_blind_uniform_pair() {
        let e = make_blind(&[ket(&[1.0, 0.0]), ket(&[0.0, 1.0])], &[0.5, 0.5]).unwrap();
        let s = e.source_state(&Caps::default()).unwrap();
        // ½ Σ_x |x⟩⟨x| ⊗ |x⟩⟨x|: diagonal (½, 0, 0, ½)
        let diag: Vec<f64> = (0..4).map(|i| s.rho.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn source_state_three_state_blocks() {
        let e = three_state(0.05);
        let s = e.source_state(&Caps::default()).unwrap();
        assert_eq!(s.rho.dim(), 12);
        let traces: Vec<f64> = (0..3)
            .map(|x| {
                let b = s.block(x);
                (0..4).map(|i| b[(i, i)].re).sum()
            })
            .collect();
        for (got, want) in traces.iter().zip([0.45, 0.45, 0.1]) {
            assert!((got - want).abs() < 1e-12);
        }
        // off-diagonal X blocks vanish exactly
        for i in 0..4 {
            for j in 4..12 {
                assert_eq!(s.rho.matrix()[(i, j)], real(0.0));
            }
        }
    }

    #[test]
    fn source_state_cap() {
        let caps = Caps {
            max_matrix_side: 8,
            ..Caps::default()
        };
        assert!(matches!(three_state(0.1).source_state(&caps), Err(Error::DimensionLimit { .. })));
    }

    #[test]
    fn reduced_examples() {
        let e = make_blind(&[ket(&[1.0, 0.0]), ket(&[0.0, 1.0])], &[0.5, 0.5]).unwrap();
        let ra = e.reduced(Part::A);
        assert!(ra.max_deviation(&DensityMatrix::maximally_mixed(ra.layout().clone())) < 1e-15);

        let e = make_visible(&[ket(&[1.0, 0.0]), ket(&[1.0, 1.0])], &[0.5, 0.5]).unwrap();
        let ra = e.reduced(Part::A);
        let want = CMatrix::from_row_slice(2, 2, &[real(0.75), real(0.25), real(0.25), real(0.25)]);
        assert!(max_abs(&(ra.matrix() - want)) < 1e-15);

        // hand sum: (0.45)|0⟩⟨0| + (0.45)|1⟩⟨1| + 0.1|+⟩⟨+|
        let ra = three_state(0.05).reduced(Part::A);
        let want = CMatrix::from_row_slice(2, 2, &[real(0.5), real(0.05), real(0.05), real(0.5)]);
        assert!(max_abs(&(ra.matrix() - want)) < 1e-12);
    }

    #[test]
    fn source_state_marginals() {
        let e = three_state(0.2);
        let s = e.source_state(&Caps::default()).unwrap();
        let a = s.rho.partial_trace(&["A"]).unwrap();
        assert!(a.max_deviation(&e.reduced(Part::A)) < 1e-10);
        let x = s.rho.partial_trace(&["X"]).unwrap();
        assert!((x.entropy().unwrap() - shannon_entropy(&e.probs())).abs() < 1e-9);
    }

    #[test]
    fn tensor_power_examples() {
        let e = make_blind(&[ket(&[1.0, 0.0]), ket(&[1.0, 1.0])], &[0.5, 0.5]).unwrap();
        assert_eq!(e.tensor_power(1, &Caps::default()).unwrap(), e);
        let e2 = e.tensor_power(2, &Caps::default()).unwrap();
        assert_eq!(e2.len(), 4);
        assert!(e2.probs().iter().all(|&p| (p - 0.25).abs() < 1e-15));
        let e3 = e.tensor_power(3, &Caps::default()).unwrap();
        let s1 = e.reduced(Part::A).entropy().unwrap();
        let s3 = e3.reduced(Part::A).entropy().unwrap();
        assert!((s3 - 3.0 * s1).abs() < 1e-8);

        let caps = Caps {
            max_items: 8,
            ..Caps::default()
        };
        assert!(e.tensor_power(4, &caps).is_err());
    }

    #[test]
    fn blind_and_visible_constructors() {
        let states = [ket(&[1.0, 0.0]), ket(&[1.0, 1.0])];
        let b = make_blind(&states, &[0.5, 0.5]).unwrap();
        assert_eq!(b.dim_c(), 1);
        assert!(b.is_blind(1e-10));
        let v = make_visible(&states, &[0.5, 0.5]).unwrap();
        assert_eq!(v.dim_c(), 2);
        assert!(v.is_visible(1e-10));
        assert!(!v.is_blind(1e-10));
        for (i, a) in v.items().iter().enumerate() {
            for (j, b) in v.items().iter().enumerate() {
                let ov = a.product().inner(&b.product()).unwrap().norm();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ov - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cnot_on_three_state_ensemble() {
        let e = three_state(0.1).apply_cnot(1e-12).unwrap();
        // |1⟩|0⟩ ↦ |1⟩|1⟩, the others are fixed
        let s = &e.items()[1].sigma;
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
        assert!(e.reduced(Part::A).max_deviation(&three_state(0.1).reduced(Part::A)) < 1e-12);
    }

    #[test]
    fn entangling_unitary_rejected() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let e = make_visible(&[ket(&[h, h])], &[1.0]).unwrap();
        // dimC = 1 here, so the generalized CNOT is the identity
        assert!(e.apply_cnot(1e-12).is_ok());
        let r = |v: &[f64]| v.iter().map(|&x| real(x)).collect::<Vec<_>>();
        let e = Ensemble::from_amplitudes(2, 2, [("p".to_string(), 1.0, r(&[h, h]), r(&[1.0, 0.0]))]).unwrap();
        assert!(matches!(e.apply_cnot(1e-12), Err(Error::Usage(_))));
    }
}
