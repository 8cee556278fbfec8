use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits for dense vectors and matrices.
///
/// Every constructor that can grow a dimension multiplicatively (tensor
/// products, n-fold powers, materialized source states) checks against one of
/// these before allocating.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Maximum number of amplitudes in a pure state vector.
    pub max_vector_len: usize,
    /// Maximum side length of a dense density matrix.
    pub max_matrix_side: usize,
    /// Maximum number of ensemble items (e.g. `|X|^n` for an n-fold power).
    pub max_items: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_vector_len: 1 << 16,
            max_matrix_side: 1 << 13,
            max_items: 200_000,
        }
    }
}

impl Caps {
    pub(crate) fn check_vector(&self, len: u128) -> Result<()> {
        check_cap("vector length", len, self.max_vector_len)
    }

    pub(crate) fn check_matrix(&self, side: u128) -> Result<()> {
        check_cap("matrix side", side, self.max_matrix_side)
    }

    pub(crate) fn check_items(&self, count: u128) -> Result<()> {
        check_cap("ensemble items", count, self.max_items)
    }
}

pub(crate) fn check_cap(what: &'static str, value: u128, cap: usize) -> Result<()> {
    if value > cap as u128 {
        return Err(Error::DimensionLimit {
            what,
            value,
            cap: cap as u128,
        });
    }
    Ok(())
}

/// One tensor factor of a [`Layout`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labeled tensor factors.
///
/// Index convention is the usual Kronecker one: the first factor is the most
/// significant digit, so `|a⟩ ⊗ |b⟩` sits at index `a * dim(b) + b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Subsystem>", into = "Vec<Subsystem>")]
pub struct Layout {
    systems: Vec<Subsystem>,
}

impl TryFrom<Vec<Subsystem>> for Layout {
    type Error = Error;

    fn try_from(systems: Vec<Subsystem>) -> Result<Self> {
        Layout::from_subsystems(systems)
    }
}

impl From<Layout> for Vec<Subsystem> {
    fn from(layout: Layout) -> Self {
        layout.systems
    }
}

impl Layout {
    /// Builds a layout from `(label, dim)` pairs, checking it against the
    /// default vector cap.
    pub fn new<S: Into<String>>(systems: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        Self::from_subsystems(
            systems
                .into_iter()
                .map(|(label, dim)| Subsystem {
                    label: label.into(),
                    dim,
                })
                .collect(),
        )
    }

    /// A layout with a single factor.
    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    fn from_subsystems(systems: Vec<Subsystem>) -> Result<Self> {
        Self::from_subsystems_capped(systems, &Caps::default())
    }

    fn from_subsystems_capped(systems: Vec<Subsystem>, caps: &Caps) -> Result<Self> {
        if systems.is_empty() {
            return Err(Error::Layout("layout needs at least one subsystem".into()));
        }
        for (i, s) in systems.iter().enumerate() {
            if s.dim == 0 {
                return Err(Error::Layout(format!("subsystem `{}` has dimension 0", s.label)));
            }
            if systems[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::Layout(format!("duplicate label `{}`", s.label)));
            }
        }
        let layout = Layout { systems };
        caps.check_vector(layout.total_dim_wide())?;
        Ok(layout)
    }

    pub fn systems(&self) -> &[Subsystem] {
        &self.systems
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.systems.iter().map(|s| s.label.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.systems.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.systems.iter().map(|s| s.dim).product()
    }

    fn total_dim_wide(&self) -> u128 {
        self.systems
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.dim as u128))
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.systems.iter().position(|s| s.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|i| self.systems[i].dim)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Concatenation `self ⊗ other`. Labels must stay unique.
    pub fn concat(&self, other: &Layout, caps: &Caps) -> Result<Layout> {
        let systems = self
            .systems
            .iter()
            .chain(other.systems.iter())
            .cloned()
            .collect();
        Self::from_subsystems_capped(systems, caps)
    }

    /// Sub-layout of the kept labels, in the original order.
    pub fn restrict(&self, keep: &[&str]) -> Result<Layout> {
        if keep.is_empty() {
            return Err(Error::Layout("must keep at least one subsystem".into()));
        }
        for label in keep {
            if self.position(label).is_none() {
                return Err(Error::UnknownLabel(label.to_string()));
            }
        }
        let systems = self
            .systems
            .iter()
            .filter(|s| keep.contains(&s.label.as_str()))
            .cloned()
            .collect();
        Ok(Layout { systems })
    }

    /// For every flat index, the pair `(kept index, traced index)`.
    pub(crate) fn split_indices(&self, keep: &[&str]) -> Result<(Vec<(usize, usize)>, usize, usize)> {
        let kept = self.restrict(keep)?;
        let keep_mask: Vec<bool> = self
            .systems
            .iter()
            .map(|s| keep.contains(&s.label.as_str()))
            .collect();
        let dims = self.dims();
        let keep_dim = kept.total_dim();
        let trace_dim = self.total_dim() / keep_dim;
        let mut out = Vec::with_capacity(self.total_dim());
        let mut digits = vec![0usize; dims.len()];
        for _ in 0..self.total_dim() {
            let mut k = 0;
            let mut t = 0;
            for (i, &d) in digits.iter().enumerate() {
                if keep_mask[i] {
                    k = k * dims[i] + d;
                } else {
                    t = t * dims[i] + d;
                }
            }
            out.push((k, t));
            for i in (0..dims.len()).rev() {
                digits[i] += 1;
                if digits[i] < dims[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        Ok((out, keep_dim, trace_dim))
    }
}
