use super::density::DensityMatrix;
use super::layout::Layout;
use super::linalg::{max_abs, CMatrix};
use super::pure::PureState;
use crate::error::{Error, Result};

/// Tolerance on `‖V†V − 1‖_max`.
pub const ISOMETRY_TOL: f64 = 1e-8;

/// A `d_out × d_in` matrix with orthonormal columns, tagged with the layout
/// of its output space.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    matrix: CMatrix,
    output: Layout,
}

impl Isometry {
    pub fn new(matrix: CMatrix, output: Layout) -> Result<Self> {
        if matrix.nrows() != output.total_dim() {
            return Err(Error::LayoutMismatch(format!(
                "isometry has {} rows but output layout has dimension {}",
                matrix.nrows(),
                output.total_dim()
            )));
        }
        if matrix.ncols() > matrix.nrows() {
            return Err(Error::NotAnIsometry(format!(
                "{}x{} matrix cannot have orthonormal columns",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = max_abs(&(matrix.adjoint() * &matrix - CMatrix::identity(matrix.ncols(), matrix.ncols())));
        if defect > ISOMETRY_TOL {
            return Err(Error::NotAnIsometry(format!("‖V†V − 1‖ = {defect:e}")));
        }
        Ok(Isometry { matrix, output })
    }

    /// Identity on a layout.
    pub fn identity(layout: Layout) -> Self {
        let d = layout.total_dim();
        Isometry {
            matrix: CMatrix::identity(d, d),
            output: layout,
        }
    }

    /// `|ψ⟩ ↦ |ψ⟩ ⊗ |0⟩` into `output = input ⊗ extra`.
    pub fn append_zero(input_dim: usize, output: Layout) -> Result<Self> {
        let d = output.total_dim();
        if input_dim == 0 || d % input_dim != 0 {
            return Err(Error::LayoutMismatch("output dimension must be a multiple of input".into()));
        }
        let extra = d / input_dim;
        let mut m = CMatrix::zeros(d, input_dim);
        for i in 0..input_dim {
            m[(i * extra, i)] = 1.0.into();
        }
        Isometry::new(m, output)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn output(&self) -> &Layout {
        &self.output
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.ncols()
    }

    fn check_input(&self, d: usize) -> Result<()> {
        if d != self.input_dim() {
            return Err(Error::LayoutMismatch(format!(
                "isometry expects input dimension {}, got {d}",
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// `V|ψ⟩`.
    pub fn apply_pure(&self, input: &PureState) -> Result<PureState> {
        self.check_input(input.dim())?;
        Ok(PureState::from_vector_unchecked(
            self.output.clone(),
            &self.matrix * input.amplitudes(),
        ))
    }

    /// `VρV†`.
    pub fn apply_density(&self, input: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_input(input.dim())?;
        let out = &self.matrix * input.matrix() * self.matrix.adjoint();
        Ok(DensityMatrix::from_parts_unchecked(self.output.clone(), out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::linalg::real;

    #[test]
    fn identity_on_plus() {
        let l = Layout::single("A", 2).unwrap();
        let plus = PureState::from_real(l.clone(), &[1.0, 1.0]).unwrap();
        let out = Isometry::identity(l).apply_pure(&plus).unwrap();
        assert_eq!(out, plus);
    }

    #[test]
    fn embedding_appends_zero() {
        let out = Layout::new([("A", 2), ("E", 2)]).unwrap();
        let v = Isometry::append_zero(2, out.clone()).unwrap();
        let one = PureState::basis(Layout::single("A", 2).unwrap(), 1).unwrap();
        let r = v.apply_pure(&one).unwrap();
        assert_eq!(r, PureState::basis(out, 2).unwrap());
    }

    #[test]
    fn rejects_non_isometry() {
        let l = Layout::single("A", 2).unwrap();
        let m = CMatrix::from_row_slice(2, 2, &[real(1.0), real(1.0), real(0.0), real(1.0)]);
        assert!(matches!(Isometry::new(m, l.clone()), Err(Error::NotAnIsometry(_))));
        let v = Isometry::identity(l);
        let three = PureState::basis(Layout::single("B", 3).unwrap(), 0).unwrap();
        assert!(v.apply_pure(&three).is_err());
    }

    #[test]
    fn density_trace_preserved() {
        let out = Layout::new([("A", 2), ("E", 3)]).unwrap();
        let v = Isometry::append_zero(2, out).unwrap();
        let rho = DensityMatrix::maximally_mixed(Layout::single("A", 2).unwrap());
        let r = v.apply_density(&rho).unwrap();
        let tr: f64 = (0..r.dim()).map(|i| r.matrix()[(i, i)].re).sum();
        assert!((tr - 1.0).abs() < 1e-12);
    }
}
