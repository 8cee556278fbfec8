//! JSON ensemble format and its diagnostics.
//!
//! ```json
//! { "dimA": 2, "dimC": 2,
//!   "states": [ { "label": "0", "prob": 0.5, "psi": [[1,0],[0,0]], "sigma": [[1,0],[0,0]] } ] }
//! ```
//!
//! `sigma` omitted means blind (the side system is `|0⟩`, `dimC` defaults to
//! 1); `"visible": true` generates `σ_x = |x⟩` with `dimC = |X|`.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Ensemble, Item};
use crate::error::{Error, Result};
use crate::qstate::{Layout, PureState};

/// Tolerance on `Σ p(x) = 1`.
pub const PROB_SUM_TOL: f64 = 1e-9;
/// Tolerance on the norm of every `ψ_x`, `σ_x`.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub label: String,
    pub prob: f64,
    pub psi: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimC", default, skip_serializing_if = "Option::is_none")]
    pub dim_c: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub visible: bool,
    pub states: Vec<StateSpec>,
}

/// One problem found by [`EnsembleSpec::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Empty,
    ZeroDimension { system: &'static str },
    VisibleDimension { dim_c: usize, states: usize },
    VisibleWithSigma { index: usize },
    DuplicateLabel { index: usize, label: String },
    BadProbability { index: usize, prob: f64 },
    ProbabilitySum { sum: f64 },
    Dimension { index: usize, system: &'static str, len: usize, expected: usize },
    NonFinite { index: usize, system: &'static str },
    Norm { index: usize, system: &'static str, norm: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "ensemble has no states"),
            Violation::ZeroDimension { system } => write!(f, "dimension of {system} must be positive"),
            Violation::VisibleDimension { dim_c, states } => {
                write!(f, "visible ensemble with {states} states needs dimC = {states}, got {dim_c}")
            }
            Violation::VisibleWithSigma { index } => {
                write!(f, "state {index}: sigma must be omitted for a visible ensemble")
            }
            Violation::DuplicateLabel { index, label } => write!(f, "state {index}: duplicate label `{label}`"),
            Violation::BadProbability { index, prob } => {
                write!(f, "state {index}: probability {prob} is not a finite non-negative number")
            }
            Violation::ProbabilitySum { sum } => write!(f, "probabilities sum to {sum}, not 1"),
            Violation::Dimension { index, system, len, expected } => {
                write!(f, "state {index}: {system} has {len} amplitudes, expected {expected}")
            }
            Violation::NonFinite { index, system } => write!(f, "state {index}: {system} has a non-finite amplitude"),
            Violation::Norm { index, system, norm } => write!(f, "state {index}: {system} has norm {norm}, not 1"),
        }
    }
}

fn to_complex(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn norm(v: &[[f64; 2]]) -> f64 {
    v.iter().map(|[re, im]| re * re + im * im).sum::<f64>().sqrt()
}

impl EnsembleSpec {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ensemble spec serializes")
    }

    fn effective_dim_c(&self) -> usize {
        if self.visible {
            self.dim_c.unwrap_or(self.states.len())
        } else {
            self.dim_c.unwrap_or(1)
        }
    }

    /// All violations, in input order. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.states.is_empty() {
            out.push(Violation::Empty);
        }
        let dim_c = self.effective_dim_c();
        if self.dim_a == 0 {
            out.push(Violation::ZeroDimension { system: "A" });
        }
        if dim_c == 0 {
            out.push(Violation::ZeroDimension { system: "C" });
        }
        if self.visible && dim_c != self.states.len() && !self.states.is_empty() {
            out.push(Violation::VisibleDimension {
                dim_c,
                states: self.states.len(),
            });
        }
        let mut seen = HashSet::new();
        let mut sum = 0.0;
        let mut probs_ok = true;
        for (i, s) in self.states.iter().enumerate() {
            if !seen.insert(s.label.as_str()) {
                out.push(Violation::DuplicateLabel {
                    index: i,
                    label: s.label.clone(),
                });
            }
            if !s.prob.is_finite() || s.prob < 0.0 {
                out.push(Violation::BadProbability { index: i, prob: s.prob });
                probs_ok = false;
            } else {
                sum += s.prob;
            }
            check_vector(&mut out, i, "psi", &s.psi, self.dim_a);
            match (&s.sigma, self.visible) {
                (Some(_), true) => out.push(Violation::VisibleWithSigma { index: i }),
                (Some(sigma), false) => check_vector(&mut out, i, "sigma", sigma, dim_c),
                (None, _) => {}
            }
        }
        if probs_ok && !self.states.is_empty() && (sum - 1.0).abs() > PROB_SUM_TOL {
            out.push(Violation::ProbabilitySum { sum });
        }
        out
    }

    /// Rescales probabilities to sum to one and every vector to unit norm.
    pub fn renormalized(&self) -> Self {
        let mut spec = self.clone();
        let sum: f64 = spec.states.iter().map(|s| s.prob).sum();
        for s in spec.states.iter_mut() {
            if sum > 0.0 {
                s.prob /= sum;
            }
            rescale(&mut s.psi);
            if let Some(sigma) = s.sigma.as_mut() {
                rescale(sigma);
            }
        }
        spec
    }

    /// Builds the ensemble, or fails listing every violation.
    pub fn build(&self) -> Result<Ensemble> {
        let violations = self.validate();
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::InvalidEnsemble(msg.join("; ")));
        }
        let dim_c = self.effective_dim_c();
        let la = Layout::single("A", self.dim_a)?;
        let lc = Layout::single("C", dim_c)?;
        let items = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let psi = PureState::normalized(la.clone(), to_complex(&s.psi))?;
                let sigma = match (&s.sigma, self.visible) {
                    (_, true) => PureState::basis(lc.clone(), i)?,
                    (Some(sigma), false) => PureState::normalized(lc.clone(), to_complex(sigma))?,
                    (None, false) => PureState::basis(lc.clone(), 0)?,
                };
                Ok(Item {
                    label: s.label.clone(),
                    prob: s.prob,
                    psi,
                    sigma,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(items)
    }

    /// Spec form of an ensemble (sigma always written out).
    pub fn from_ensemble(e: &Ensemble) -> Self {
        let enc = |s: &PureState| s.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        EnsembleSpec {
            dim_a: e.dim_a(),
            dim_c: Some(e.dim_c()),
            visible: false,
            states: e
                .items()
                .iter()
                .map(|it| StateSpec {
                    label: it.label.clone(),
                    prob: it.prob,
                    psi: enc(&it.psi),
                    sigma: Some(enc(&it.sigma)),
                })
                .collect(),
        }
    }
}

fn check_vector(out: &mut Vec<Violation>, index: usize, system: &'static str, v: &[[f64; 2]], expected: usize) {
    if v.len() != expected {
        out.push(Violation::Dimension {
            index,
            system,
            len: v.len(),
            expected,
        });
        return;
    }
    if v.iter().flatten().any(|x| !x.is_finite()) {
        out.push(Violation::NonFinite { index, system });
        return;
    }
    let n = norm(v);
    if (n - 1.0).abs() > NORM_TOL {
        out.push(Violation::Norm { index, system, norm: n });
    }
}

fn rescale(v: &mut [[f64; 2]]) {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            z[0] /= n;
            z[1] /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn two_state() -> EnsembleSpec {
        EnsembleSpec {
            dim_a: 2,
            dim_c: None,
            visible: false,
            states: vec![
                StateSpec {
                    label: "0".into(),
                    prob: 0.5,
                    psi: vec![[1.0, 0.0], [0.0, 0.0]],
                    sigma: None,
                },
                StateSpec {
                    label: "+".into(),
                    prob: 0.5,
                    psi: vec![[H, 0.0], [H, 0.0]],
                    sigma: None,
                },
            ],
        }
    }

    #[test]
    fn valid_two_state() {
        assert!(two_state().validate().is_empty());
        let e = two_state().build().unwrap();
        assert_eq!(e.dim_c(), 1);
    }

    #[test]
    fn probability_sum_violation() {
        let mut s = two_state();
        s.states[1].prob = 0.6;
        assert_eq!(s.validate(), vec![Violation::ProbabilitySum { sum: 1.1 }]);
        assert!(s.build().is_err());
        assert!(s.renormalized().validate().is_empty());
    }

    #[test]
    fn norm_violation_reports_index() {
        let mut s = two_state();
        s.states[1].psi = vec![[1.0, 0.0], [1.0, 0.0]];
        let v = s.validate();
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::Norm { index: 1, system: "psi", .. }));
    }

    #[test]
    fn dimension_and_label_violations() {
        let mut s = two_state();
        s.states[1].label = "0".into();
        s.states[0].psi.push([0.0, 0.0]);
        let v = s.validate();
        assert!(v.iter().any(|x| matches!(x, Violation::DuplicateLabel { index: 1, .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::Dimension { index: 0, .. })));
    }

    #[test]
    fn visible_flag_generates_basis_sigma() {
        let mut s = two_state();
        s.visible = true;
        let e = s.build().unwrap();
        assert_eq!(e.dim_c(), 2);
        assert_eq!(e.items()[1].sigma.amplitudes()[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let text = two_state().to_json();
        assert_eq!(EnsembleSpec::from_json(&text).unwrap(), two_state());
        let bad = r#"{"dimA": 1, "states": [], "bogus": 1}"#;
        assert!(EnsembleSpec::from_json(bad).is_err());
    }
}
