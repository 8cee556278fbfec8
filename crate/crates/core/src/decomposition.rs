//! Splitting an ensemble into irreducible components.
//!
//! Two items are adjacent when their product vectors `ψ_x ⊗ σ_x` overlap by
//! more than the tolerance. Connected components of that graph give the
//! finest partition whose parts are pairwise orthogonal, so their spans `F_y`
//! are mutually orthogonal and each part is irreducible.

use std::collections::VecDeque;

use serde::Serialize;

use crate::ensemble::{Ensemble, Item};
use crate::error::{Error, Result};
use crate::qstate::{Layout, PureState};

/// Default threshold on `|⟨ψ_x⊗σ_x|ψ_x'⊗σ_x'⟩|` below which two items count
/// as orthogonal.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-10;

/// Symmetric non-orthogonality relation over the items of an ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapGraph {
    pub labels: Vec<String>,
    adjacency: Vec<Vec<bool>>,
}

impl OverlapGraph {
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    /// Edges `(i, j)` with `i < j`, as item indices.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.labels.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.adjacency[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Edges as label pairs.
    pub fn labeled_edges(&self) -> Vec<(&str, &str)> {
        self.edges()
            .into_iter()
            .map(|(i, j)| (self.labels[i].as_str(), self.labels[j].as_str()))
            .collect()
    }
}

/// Edge `(x, x')` iff both have positive probability and their product
/// vectors overlap by more than `tol` in absolute value. No self-loops.
pub fn overlap_graph(e: &Ensemble, tol: f64) -> OverlapGraph {
    let products: Vec<PureState> = e.items().iter().map(Item::product).collect();
    let n = products.len();
    let mut adjacency = vec![vec![false; n]; n];
    for i in 0..n {
        if e.items()[i].prob <= 0.0 {
            continue;
        }
        for j in i + 1..n {
            if e.items()[j].prob <= 0.0 {
                continue;
            }
            let ov = products[i].amplitudes().dotc(products[j].amplitudes()).norm();
            if ov > tol {
                adjacency[i][j] = true;
                adjacency[j][i] = true;
            }
        }
    }
    OverlapGraph {
        labels: e.labels().map(str::to_string).collect(),
        adjacency,
    }
}

/// One irreducible part `𝒳_y` with weight `q(y)`.
#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub y: usize,
    pub labels: Vec<String>,
    pub weight: f64,
    /// `p(x|y)` aligned with `labels`.
    pub conditional: Vec<f64>,
    #[serde(skip)]
    pub members: Vec<usize>,
}

/// The partition of an ensemble into irreducible components.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub components: Vec<Component>,
    pub tolerance: f64,
    #[serde(skip)]
    assignment: Vec<usize>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    /// Number of components carrying positive weight.
    pub fn support_size(&self) -> usize {
        self.components.iter().filter(|c| c.weight > 0.0).count()
    }

    /// `y(x)` for item index `x`.
    pub fn y_of(&self, item: usize) -> usize {
        self.assignment[item]
    }

    /// Sub-ensemble `{p(x|y), ψ_x ⊗ σ_x}` of a positive-weight component.
    pub fn sub_ensemble(&self, e: &Ensemble, y: usize) -> Result<Ensemble> {
        let comp = &self.components[y];
        if comp.weight <= 0.0 {
            return Err(Error::Usage(format!("component {y} has zero weight")));
        }
        let items = comp
            .members
            .iter()
            .zip(&comp.conditional)
            .map(|(&i, &p)| Item {
                prob: p,
                ..e.items()[i].clone()
            })
            .collect();
        Ensemble::new(items)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }
}

/// Connected components of [`overlap_graph`], ordered by smallest member
/// label. Zero-probability items are excluded from the graph and end up as
/// zero-weight singletons.
pub fn irreducible_components(e: &Ensemble, tol: f64) -> Decomposition {
    let graph = overlap_graph(e, tol);
    let n = e.len();
    let mut comp_of = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut members = vec![];
        let mut queue = VecDeque::from([start]);
        comp_of[start] = id;
        while let Some(i) = queue.pop_front() {
            members.push(i);
            for j in 0..n {
                if graph.adjacent(i, j) && comp_of[j] == usize::MAX {
                    comp_of[j] = id;
                    queue.push_back(j);
                }
            }
        }
        members.sort_by(|&a, &b| e.items()[a].label.cmp(&e.items()[b].label));
        groups.push(members);
    }
    groups.sort_by(|a, b| e.items()[a[0]].label.cmp(&e.items()[b[0]].label));

    let mut assignment = vec![0; n];
    let components = groups
        .into_iter()
        .enumerate()
        .map(|(y, members)| {
            let weight: f64 = members.iter().map(|&i| e.items()[i].prob).sum();
            let conditional = members
                .iter()
                .map(|&i| {
                    if weight > 0.0 {
                        e.items()[i].prob / weight
                    } else {
                        1.0 / members.len() as f64
                    }
                })
                .collect();
            for &i in &members {
                assignment[i] = y;
            }
            Component {
                y,
                labels: members.iter().map(|&i| e.items()[i].label.clone()).collect(),
                weight,
                conditional,
                members,
            }
        })
        .collect();
    Decomposition {
        components,
        tolerance: tol,
        assignment,
    }
}

/// True iff the positive-probability part of the ensemble forms a single
/// component.
pub fn is_irreducible(e: &Ensemble, tol: f64) -> bool {
    irreducible_components(e, tol).support_size() == 1
}

/// The modified source with side system `C ⊗ Y`: `σ'_x = σ_x ⊗ |y(x)⟩`,
/// flattened into a single side register of dimension `|C|·|Y|`.
pub fn extend_with_y(e: &Ensemble, d: &Decomposition) -> Result<Ensemble> {
    if d.assignment.len() != e.len() {
        return Err(Error::Usage("decomposition was computed from a different ensemble".into()));
    }
    let ny = d.len();
    let ly = Layout::single("Y", ny)?;
    let lc = Layout::single("C", e.dim_c() * ny)?;
    let items = e
        .items()
        .iter()
        .enumerate()
        .map(|(i, it)| {
            let y = PureState::basis(ly.clone(), d.y_of(i))?;
            let sigma = PureState::new(
                lc.clone(),
                it.sigma.amplitudes().kronecker(y.amplitudes()).iter().copied().collect(),
            )?;
            Ok(Item {
                sigma,
                ..it.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(items)
}
