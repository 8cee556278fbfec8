//! Closed-form rates from the entropies of the Y-extended source.
//!
//! With unlimited entanglement the optimal quantum rate is
//! `Q = ½(S(A) + S(A|CY))`, achieved while consuming `E = ½ I(A:CY)` ebits.
//! Blind and visible sources specialize this to `S(A) − ½S(Y)` and `½S(A)`.
//! For blind sources, trading qubits for cbits gives the `(C, E)` corner
//! `(2S(A) − S(Y), S(A) − S(Y))`.

use serde::Serialize;

use crate::decomposition::{extend_with_y, irreducible_components, Decomposition};
use crate::ensemble::{Ensemble, Part};
use crate::error::{Error, Result};
use crate::qstate::shannon_entropy;

pub const SCHEMA_VERSION: u32 = 1;

/// Gap between the two `S(ACY)` evaluations that is reported as a bug.
pub const DUAL_PATH_ERROR: f64 = 1e-6;

/// Agreement required between a specialized formula and the general one.
pub const FORMULA_TOL: f64 = 1e-9;

/// Values below this are shown as zero in reports.
pub const REPORT_ZERO: f64 = 1e-12;

/// Entropic quantities of the Y-extended source, in bits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyProfile {
    pub s_a: f64,
    pub s_cy: f64,
    pub s_acy: f64,
    pub s_a_given_cy: f64,
    pub i_a_cy: f64,
    pub s_y: f64,
    pub h_x: f64,
    /// `|S(ACY)_direct − S(ACY)_block|`.
    pub dual_path_gap: f64,
    /// Number of irreducible components `|Y|`.
    pub components: usize,
    /// The Y extension was applied inside [`entropy_profile`].
    pub extended_internally: bool,
}

impl EntropyProfile {
    fn check(&self) -> Result<()> {
        let neg = [self.s_a, self.s_cy, self.s_acy, self.s_y, self.h_x]
            .iter()
            .any(|&v| v < -1e-9);
        if neg || self.s_a < self.s_a_given_cy - 1e-9 {
            return Err(Error::Consistency(format!("entropy profile violates basic inequalities: {self:?}")));
        }
        Ok(())
    }
}

/// Entropy profile together with the decomposition it was computed from.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub profile: EntropyProfile,
    pub decomposition: Decomposition,
    pub extended: Ensemble,
}

/// Decomposes `e`, appends the component label `Y`, and evaluates the
/// entropies. `S(ACY)` is computed twice (directly, and as
/// `H(q) + Σ_y q(y) S(ρ_{AC|y})`); a gap above [`DUAL_PATH_ERROR`] is an
/// error and the block-form value is returned.
pub fn analyze(e: &Ensemble, tol: f64) -> Result<Analysis> {
    let decomposition = irreducible_components(e, tol);
    let extended = extend_with_y(e, &decomposition)?;

    let s_a = e.reduced(Part::A).entropy()?;
    let s_cy = extended.reduced(Part::C).entropy()?;
    let direct = extended.reduced(Part::AC).entropy()?;

    let q = decomposition.weights();
    let s_y = shannon_entropy(&q);
    let mut block = s_y;
    for comp in decomposition.components.iter().filter(|c| c.weight > 0.0) {
        let sub = decomposition.sub_ensemble(e, comp.y)?;
        block += comp.weight * sub.reduced(Part::AC).entropy()?;
    }
    let gap = (direct - block).abs();
    if gap > DUAL_PATH_ERROR {
        return Err(Error::Consistency(format!(
            "S(ACY) direct {direct} vs block form {block} differ by {gap:e}"
        )));
    }
    let s_acy = block;
    let s_a_given_cy = s_acy - s_cy;
    let profile = EntropyProfile {
        s_a,
        s_cy,
        s_acy,
        s_a_given_cy,
        i_a_cy: s_a - s_a_given_cy,
        s_y,
        h_x: shannon_entropy(&e.probs()),
        dual_path_gap: gap,
        components: decomposition.len(),
        extended_internally: true,
    };
    profile.check()?;
    Ok(Analysis {
        profile,
        decomposition,
        extended,
    })
}

pub fn entropy_profile(e: &Ensemble, tol: f64) -> Result<EntropyProfile> {
    Ok(analyze(e, tol)?.profile)
}

/// Named resource rates per source copy. Unset coordinates are absent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    /// Qubits per copy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Ebits per copy (consumed).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
    /// Cbits per copy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    pub provenance: String,
}

impl RatePoint {
    pub fn new(q: Option<f64>, e: Option<f64>, c: Option<f64>, provenance: impl Into<String>) -> Self {
        RatePoint {
            q,
            e,
            c,
            provenance: provenance.into(),
        }
    }

    pub fn qubits(&self) -> f64 {
        self.q.unwrap_or(0.0)
    }

    pub fn ebits(&self) -> f64 {
        self.e.unwrap_or(0.0)
    }

    pub fn cbits(&self) -> f64 {
        self.c.unwrap_or(0.0)
    }

    /// Copy with `|v| < 1e-12` shown as exactly zero.
    pub fn for_report(&self) -> Self {
        let z = |v: Option<f64>| v.map(|x| if x.abs() < REPORT_ZERO { 0.0 } else { x });
        RatePoint {
            q: z(self.q),
            e: z(self.e),
            c: z(self.c),
            provenance: self.provenance.clone(),
        }
    }
}

/// Optimal entanglement-assisted quantum rate and the entanglement the
/// achieving protocol consumes.
pub fn optimal_q(p: &EntropyProfile) -> RatePoint {
    RatePoint::new(
        Some(0.5 * (p.s_a + p.s_a_given_cy)),
        Some(0.5 * (p.s_a - p.s_a_given_cy)),
        None,
        "optimal entanglement-assisted rate: Q = (S(A) + S(A|CY))/2, E = I(A:CY)/2",
    )
}

fn agree(name: &str, got: &RatePoint, general: &RatePoint) -> Result<()> {
    let dq = (got.qubits() - general.qubits()).abs();
    let de = (got.ebits() - general.ebits()).abs();
    if dq > FORMULA_TOL || de > FORMULA_TOL {
        return Err(Error::Consistency(format!(
            "{name} rates ({}, {}) disagree with the general formula ({}, {})",
            got.qubits(),
            got.ebits(),
            general.qubits(),
            general.ebits()
        )));
    }
    Ok(())
}

/// Blind source: `Q = S(A) − ½S(Y)`, `E = ½S(Y)`.
pub fn blind_rates(e: &Ensemble, tol: f64) -> Result<RatePoint> {
    if !e.is_blind(tol) {
        return Err(Error::Usage("blind rates need identical side states".into()));
    }
    let p = entropy_profile(e, tol)?;
    let point = RatePoint::new(
        Some(p.s_a - 0.5 * p.s_y),
        Some(0.5 * p.s_y),
        None,
        "blind source: Q = S(A) - S(Y)/2, E = S(Y)/2",
    );
    agree("blind", &point, &optimal_q(&p))?;
    Ok(point)
}

/// Visible source: `Q = E = ½S(A)`.
pub fn visible_rates(e: &Ensemble, tol: f64) -> Result<RatePoint> {
    if !e.is_visible(tol) {
        return Err(Error::Usage("visible rates need pairwise orthogonal side states".into()));
    }
    let p = entropy_profile(e, tol)?;
    let point = RatePoint::new(
        Some(0.5 * p.s_a),
        Some(0.5 * p.s_a),
        None,
        "visible source: Q = E = S(A)/2",
    );
    agree("visible", &point, &optimal_q(&p))?;
    Ok(point)
}

/// Corner `(C, E) = (2S(A) − S(Y), S(A) − S(Y))` of the classical
/// communication / entanglement region of a blind source.
pub fn classical_entanglement_corner(e: &Ensemble, tol: f64) -> Result<RatePoint> {
    if !e.is_blind(tol) {
        return Err(Error::Usage("the (C, E) region is only available for blind sources".into()));
    }
    let p = entropy_profile(e, tol)?;
    Ok(ce_corner(&p))
}

pub(crate) fn ce_corner(p: &EntropyProfile) -> RatePoint {
    RatePoint::new(
        None,
        Some(p.s_a - p.s_y),
        Some(2.0 * p.s_a - p.s_y),
        "blind (C,E) corner: C = 2S(A) - S(Y), E = S(A) - S(Y)",
    )
}

/// Quantum rate `S(A) − S(Y)` with `S(Y)` cbits of free classical
/// communication (blind source, no entanglement).
pub fn qubit_cbit_point(p: &EntropyProfile) -> RatePoint {
    // S(A) ≥ S(Y); only rounding can make the difference negative
    RatePoint::new(
        Some((p.s_a - p.s_y).max(0.0)),
        Some(0.0),
        Some(p.s_y),
        "classically assisted blind compression: Q = S(A) - S(Y), C = S(Y)",
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conversion {
    /// Each qubit becomes 2 cbits plus 1 ebit.
    Teleport,
    /// Each cbit becomes ½ qubit plus ½ ebit.
    DenseCode,
}

/// Rewrites `amount` units of communication.
///
/// Teleport: `Q −= a, C += 2a, E += a`. Dense coding: `C −= a, Q += a/2,
/// E += a/2`. A negative resulting `Q` or `C` is infeasible.
pub fn resource_convert(p: &RatePoint, mode: Conversion, amount: f64) -> Result<RatePoint> {
    if !(amount >= 0.0) || !amount.is_finite() {
        return Err(Error::InfeasibleConversion(format!("amount {amount} must be non-negative")));
    }
    let (q, e, c) = (p.qubits(), p.ebits(), p.cbits());
    let (q, e, c, what) = match mode {
        Conversion::Teleport => (q - amount, e + amount, c + 2.0 * amount, "teleported"),
        Conversion::DenseCode => (q + 0.5 * amount, e + 0.5 * amount, c - amount, "dense-coded"),
    };
    let slack = 1e-12 * (1.0 + amount);
    if q < -slack || c < -slack {
        return Err(Error::InfeasibleConversion(format!(
            "converting {amount} leaves Q = {q}, C = {c}"
        )));
    }
    Ok(RatePoint::new(
        Some(q.max(0.0)),
        Some(e),
        Some(c.max(0.0)),
        format!("{} ({what} {amount})", p.provenance),
    ))
}

/// A rate point with a short name, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct NamedPoint {
    pub name: String,
    #[serde(flatten)]
    pub point: RatePoint,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSummary {
    pub components: usize,
    pub weights: Vec<f64>,
    pub labels: Vec<Vec<String>>,
    pub tolerance: f64,
}

/// Machine-readable summary of every applicable rate.
#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub schema_version: u32,
    pub profile: EntropyProfile,
    pub decomposition: DecompositionSummary,
    pub blind: bool,
    pub visible: bool,
    pub points: Vec<NamedPoint>,
}

impl RateReport {
    pub fn compute(e: &Ensemble, tol: f64) -> Result<RateReport> {
        let a = analyze(e, tol)?;
        let p = &a.profile;
        let blind = e.is_blind(tol);
        let visible = e.is_visible(tol);
        let mut points = vec![NamedPoint {
            name: "optimal".into(),
            point: optimal_q(p),
        }];
        if blind {
            points.push(NamedPoint {
                name: "blind".into(),
                point: blind_rates(e, tol)?,
            });
            points.push(NamedPoint {
                name: "qubit_cbit".into(),
                point: qubit_cbit_point(p),
            });
            points.push(NamedPoint {
                name: "ce_corner".into(),
                point: ce_corner(p),
            });
        }
        if visible {
            points.push(NamedPoint {
                name: "visible".into(),
                point: visible_rates(e, tol)?,
            });
        }
        points.push(NamedPoint {
            name: "unassisted".into(),
            point: RatePoint::new(Some(p.s_a), Some(0.0), None, "no entanglement: Q = S(A)"),
        });
        for np in points.iter_mut() {
            np.point = np.point.for_report();
        }
        let d = &a.decomposition;
        Ok(RateReport {
            schema_version: SCHEMA_VERSION,
            profile: p.clone(),
            decomposition: DecompositionSummary {
                components: d.len(),
                weights: d.weights(),
                labels: d.components.iter().map(|c| c.labels.clone()).collect(),
                tolerance: d.tolerance,
            },
            blind,
            visible,
            points,
        })
    }

    pub fn point(&self, name: &str) -> Option<&RatePoint> {
        self.points.iter().find(|p| p.name == name).map(|p| &p.point)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
