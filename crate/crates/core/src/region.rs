//! The two achievable rate regions and their boundaries.
//!
//! * `(E, Q)`: `Q ≥ ½(S(A) + S(A|CY))` and `Q + E ≥ S(A)`.
//! * `(C, E)` for blind sources: `C ≥ 2S(A) − S(Y)` and `E ≥ S(A) − S(Y)`.
//!
//! The `(E, Q)` inequalities by themselves admit negative `E` once
//! `Q > S(A)`. [`EqRegion::allow_negative_e`] switches between that reading
//! and the default, which additionally requires `E ≥ 0`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::EntropyProfile;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqRegion {
    /// `½(S(A) + S(A|CY))`.
    pub q_min: f64,
    /// `S(A)`.
    pub sum_min: f64,
    #[serde(default)]
    pub allow_negative_e: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CeRegion {
    /// `2S(A) − S(Y)`.
    pub c_min: f64,
    /// `S(A) − S(Y)`.
    pub e_min: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RegionSpec {
    #[serde(rename = "EQ")]
    Eq(EqRegion),
    #[serde(rename = "CE")]
    Ce(CeRegion),
}

impl EqRegion {
    pub fn from_profile(p: &EntropyProfile) -> Result<Self> {
        let r = EqRegion {
            q_min: 0.5 * (p.s_a + p.s_a_given_cy),
            sum_min: p.s_a,
            allow_negative_e: false,
        };
        if r.q_min > r.sum_min + 1e-9 {
            return Err(Error::Consistency(format!(
                "q_min {} exceeds S(A) {}",
                r.q_min, r.sum_min
            )));
        }
        Ok(r)
    }

    /// The point `(E, Q) = (S(A) − q_min, q_min)` where both constraints bind.
    pub fn corner(&self) -> (f64, f64) {
        (self.sum_min - self.q_min, self.q_min)
    }

    /// Boundary `Q` at entanglement rate `e`.
    pub fn boundary_q(&self, e: f64) -> f64 {
        self.q_min.max(self.sum_min - e)
    }
}

impl CeRegion {
    pub fn from_profile(p: &EntropyProfile) -> Self {
        CeRegion {
            c_min: 2.0 * p.s_a - p.s_y,
            e_min: p.s_a - p.s_y,
        }
    }

    pub fn corner(&self) -> (f64, f64) {
        (self.c_min, self.e_min)
    }
}

/// `(E, Q)` membership with slack `tol` on each inequality.
pub fn eq_contains(spec: &EqRegion, (e, q): (f64, f64), tol: f64) -> bool {
    if q < -tol || (!spec.allow_negative_e && e < -tol) {
        return false;
    }
    q >= spec.q_min - tol && q + e >= spec.sum_min - tol
}

/// `(C, E)` membership with slack `tol` on each inequality.
pub fn ce_contains(spec: &CeRegion, (c, e): (f64, f64), tol: f64) -> bool {
    c >= -tol && c >= spec.c_min - tol && e >= spec.e_min - tol
}

impl RegionSpec {
    pub fn contains(&self, point: (f64, f64), tol: f64) -> bool {
        match self {
            RegionSpec::Eq(r) => eq_contains(r, point, tol),
            RegionSpec::Ce(r) => ce_contains(r, point, tol),
        }
    }

    /// CSV column names, in point order.
    pub fn axes(&self) -> (&'static str, &'static str) {
        match self {
            RegionSpec::Eq(_) => ("E", "Q"),
            RegionSpec::Ce(_) => ("C", "E"),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("region spec serializes")
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    })
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo - 1e-12 && x <= hi + 1e-12
}

/// Boundary points in the order of the CSV columns (see
/// [`RegionSpec::axes`]), restricted to `x_range × y_range`.
///
/// EQ: `Q = max(q_min, S(A) − E)` sampled at `samples` values of `E` across
/// `x_range` (clamped to `E ≥ 0` unless negative `E` is allowed), plus the
/// corner. CE: the horizontal ray `E = e_min` walked from large `C` toward
/// the corner, then the vertical ray `C = c_min` upward, so `E` never
/// decreases along the list.
pub fn boundary_polyline(
    spec: &RegionSpec,
    x_range: (f64, f64),
    y_range: (f64, f64),
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(Error::Usage("boundary needs at least 2 samples".into()));
    }
    if !(x_range.0 <= x_range.1) || !(y_range.0 <= y_range.1) {
        return Err(Error::Usage("ranges must satisfy lo ≤ hi".into()));
    }
    let mut pts = Vec::new();
    match spec {
        RegionSpec::Eq(r) => {
            let lo = if r.allow_negative_e { x_range.0 } else { x_range.0.max(0.0) };
            let hi = x_range.1;
            if lo > hi {
                return Ok(pts);
            }
            let mut es: Vec<f64> = linspace(lo, hi, samples).collect();
            let (ec, _) = r.corner();
            if within(ec, (lo, hi)) {
                es.push(ec);
            }
            es.sort_by(f64::total_cmp);
            es.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            for e in es {
                let q = r.boundary_q(e);
                if within(q, y_range) {
                    pts.push((e, q));
                }
            }
        }
        RegionSpec::Ce(r) => {
            let (c0, e0) = r.corner();
            // horizontal ray, C decreasing toward the corner
            if within(e0, y_range) {
                let c_hi = x_range.1;
                if c_hi > c0 {
                    let mut cs: Vec<f64> = linspace(c0.max(x_range.0), c_hi, samples).collect();
                    cs.reverse();
                    for c in cs {
                        if c > c0 + 1e-12 {
                            pts.push((c, e0));
                        }
                    }
                }
            }
            // corner and vertical ray, E increasing
            if within(c0, x_range) {
                let e_lo = e0.max(y_range.0);
                let e_hi = y_range.1;
                if e_lo <= e_hi {
                    if within(e0, y_range) {
                        pts.push((c0, e0));
                    }
                    for e in linspace(e_lo, e_hi, samples) {
                        if e > e0 + 1e-12 {
                            pts.push((c0, e));
                        }
                    }
                }
            }
        }
    }
    Ok(pts)
}

/// Rounds up to 6 decimals. Both region types are closed upward in each
/// coordinate, so rounding up keeps boundary points inside.
fn ceil6(x: f64) -> f64 {
    let mut r = (x * 1e6).round();
    if r / 1e6 < x - 1e-12 {
        r += 1.0;
    }
    let v = r / 1e6;
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// CSV with header `E,Q` or `C,E` and 6-decimal fixed-point values.
pub fn polyline_csv(spec: &RegionSpec, points: &[(f64, f64)]) -> String {
    let (x, y) = spec.axes();
    let mut out = format!("{x},{y}\n");
    for &(a, b) in points {
        writeln!(out, "{:.6},{:.6}", ceil6(a), ceil6(b)).expect("write to string");
    }
    out
}

/// Parses a polyline CSV written by [`polyline_csv`].
pub fn parse_polyline_csv(text: &str) -> Result<(String, Vec<(f64, f64)>)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Input("empty CSV".into()))?.to_string();
    let mut pts = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut it = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64> {
            s.and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Input(format!("bad CSV row {}: `{line}`", i + 2)))
        };
        let a = parse(it.next())?;
        let b = parse(it.next())?;
        pts.push((a, b));
    }
    Ok((header, pts))
}
