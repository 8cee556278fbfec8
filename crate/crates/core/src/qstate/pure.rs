use num_complex::Complex64;

use super::density::DensityMatrix;
use super::layout::{Caps, Layout};
use super::linalg::{real, CMatrix, CVector, STATE_TOL};
use crate::error::{Error, Result};

/// Normalized state vector over a labeled tensor layout.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    layout: Layout,
    amps: CVector,
}

impl PureState {
    /// Checks length and that the Euclidean norm is within `1e-9` of 1.
    pub fn new(layout: Layout, amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_parts(layout, CVector::from_vec(amps))?;
        let norm = s.amps.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotAState(format!("vector norm {norm} is not 1")));
        }
        Ok(s)
    }

    /// Like [`PureState::new`] but rescales the input to unit norm.
    pub fn normalized(layout: Layout, amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_parts(layout, CVector::from_vec(amps))?;
        let norm = s.amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotAState("cannot normalize a zero vector".into()));
        }
        Ok(PureState {
            amps: s.amps.unscale(norm),
            layout: s.layout,
        })
    }

    /// Real amplitudes, normalized on construction.
    pub fn from_real(layout: Layout, amps: &[f64]) -> Result<Self> {
        Self::normalized(layout, amps.iter().map(|&a| real(a)).collect())
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(layout: Layout, index: usize) -> Result<Self> {
        let d = layout.total_dim();
        if index >= d {
            return Err(Error::Input(format!("basis index {index} out of range for dimension {d}")));
        }
        let mut amps = CVector::zeros(d);
        amps[index] = real(1.0);
        Ok(PureState { layout, amps })
    }

    fn from_parts(layout: Layout, amps: CVector) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::LayoutMismatch(format!(
                "{} amplitudes for a layout of dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotAState("non-finite amplitude".into()));
        }
        Ok(PureState { layout, amps })
    }

    pub(crate) fn from_vector_unchecked(layout: Layout, amps: CVector) -> Self {
        debug_assert_eq!(layout.total_dim(), amps.len());
        PureState { layout, amps }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Same amplitudes under a different layout of equal total dimension.
    pub fn with_layout(&self, layout: Layout) -> Result<Self> {
        Self::from_parts(layout, self.amps.clone())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::LayoutMismatch(format!(
                "inner product of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        self.tensor_capped(other, &Caps::default())
    }

    pub fn tensor_capped(&self, other: &PureState, caps: &Caps) -> Result<PureState> {
        let layout = self.layout.concat(&other.layout, caps)?;
        Ok(PureState {
            layout,
            amps: self.amps.kronecker(&other.amps),
        })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_parts_unchecked(self.layout.clone(), self.projector())
    }

    pub(crate) fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    /// Reduced state on `keep`, computed as `M M†` with `M` the
    /// (kept × traced) reshaping of the amplitudes.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let (split, kd, td) = self.layout.split_indices(keep)?;
        let mut m = CMatrix::zeros(kd, td);
        for (flat, &(k, t)) in split.iter().enumerate() {
            m[(k, t)] = self.amps[flat];
        }
        let layout = self.layout.restrict(keep)?;
        Ok(DensityMatrix::from_parts_unchecked(layout, &m * m.adjoint()))
    }
}
