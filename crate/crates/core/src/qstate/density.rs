use super::layout::{Caps, Layout};
use super::linalg::{
    entropy_of_spectrum, hermitian_eig, hermiticity_defect, max_abs, real, spectral_map, trace,
    CMatrix, Spectrum, SQRT_FLOOR, STATE_TOL,
};
use super::pure::PureState;
use crate::error::{Error, Result};

/// Positive semidefinite, unit-trace Hermitian matrix over a labeled layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    layout: Layout,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian, unit trace and PSD, each to `1e-9`.
    pub fn new(layout: Layout, mat: CMatrix) -> Result<Self> {
        Caps::default().check_matrix(layout.total_dim() as u128)?;
        let d = layout.total_dim();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::LayoutMismatch(format!(
                "{}x{} matrix for a layout of dimension {d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotAState("non-finite matrix entry".into()));
        }
        let herm = hermiticity_defect(&mat);
        if herm > STATE_TOL {
            return Err(Error::NotAState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::NotAState(format!("trace {tr} is not 1")));
        }
        let rho = DensityMatrix { layout, mat };
        rho.eig()?;
        Ok(rho)
    }

    pub(crate) fn from_parts_unchecked(layout: Layout, mat: CMatrix) -> Self {
        debug_assert_eq!(layout.total_dim(), mat.nrows());
        DensityMatrix { layout, mat }
    }

    pub fn maximally_mixed(layout: Layout) -> Self {
        let d = layout.total_dim();
        let mat = CMatrix::identity(d, d).scale(1.0 / d as f64);
        DensityMatrix { layout, mat }
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`; all states must share the layout of the first.
    pub fn mixture<'a>(terms: impl IntoIterator<Item = (f64, &'a PureState)>) -> Result<Self> {
        let mut iter = terms.into_iter().peekable();
        let layout = match iter.peek() {
            Some((_, s)) => s.layout().clone(),
            None => return Err(Error::Input("empty mixture".into())),
        };
        let d = layout.total_dim();
        Caps::default().check_matrix(d as u128)?;
        let mut mat = CMatrix::zeros(d, d);
        for (p, s) in iter {
            if s.layout() != &layout {
                return Err(Error::LayoutMismatch("mixture terms have different layouts".into()));
            }
            if p == 0.0 {
                continue;
            }
            let a = s.amplitudes();
            mat.gerc(real(p), a, a, real(1.0));
        }
        DensityMatrix::new(layout, mat)
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn with_layout(&self, layout: Layout) -> Result<Self> {
        if layout.total_dim() != self.dim() {
            return Err(Error::LayoutMismatch("relabel must keep the total dimension".into()));
        }
        Ok(DensityMatrix {
            layout,
            mat: self.mat.clone(),
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        self.tensor_capped(other, &Caps::default())
    }

    pub fn tensor_capped(&self, other: &DensityMatrix, caps: &Caps) -> Result<DensityMatrix> {
        let layout = self.layout.concat(&other.layout, caps)?;
        caps.check_matrix(layout.total_dim() as u128)?;
        Ok(DensityMatrix {
            layout,
            mat: self.mat.kronecker(&other.mat),
        })
    }

    /// Traces out every subsystem not listed in `keep`.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let (split, kd, td) = self.layout.split_indices(keep)?;
        let layout = self.layout.restrict(keep)?;
        // flat index of (k, t)
        let mut flat = vec![0usize; kd * td];
        for (i, &(k, t)) in split.iter().enumerate() {
            flat[k * td + t] = i;
        }
        let mut out = CMatrix::zeros(kd, kd);
        for k1 in 0..kd {
            for k2 in 0..kd {
                let mut acc = real(0.0);
                for t in 0..td {
                    acc += self.mat[(flat[k1 * td + t], flat[k2 * td + t])];
                }
                out[(k1, k2)] = acc;
            }
        }
        Ok(DensityMatrix { layout, mat: out })
    }

    /// Descending eigenvalues, clamped into `[0, 1]`. Values below `-1e-9`
    /// are rejected.
    pub fn eig(&self) -> Result<Spectrum> {
        let mut s = hermitian_eig(&self.mat);
        for v in s.values.iter_mut() {
            if *v < -STATE_TOL {
                return Err(Error::NotAState(format!("negative eigenvalue {v:e}")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(s)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        Ok(entropy_of_spectrum(&self.eig()?.values))
    }

    /// `F(ρ, σ) = ‖√ρ √σ‖₁`. Layouts must agree in dimensions; labels may
    /// differ (e.g. a system and its reconstruction).
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.layout.dims() != other.layout.dims() {
            return Err(Error::LayoutMismatch(format!(
                "fidelity between dims {:?} and {:?}",
                self.layout.dims(),
                other.layout.dims()
            )));
        }
        let s1 = self.eig()?;
        if let Some(f) = pure_fidelity(&s1, &other.mat) {
            return Ok(f);
        }
        let s2 = other.eig()?;
        if let Some(f) = pure_fidelity(&s2, &self.mat) {
            return Ok(f);
        }
        let root = spectral_map(&s1, |l| if l > SQRT_FLOOR { l.sqrt() } else { 0.0 });
        let m = &root * &other.mat * &root;
        let f: f64 = hermitian_eig(&m)
            .values
            .iter()
            .filter(|&&l| l > SQRT_FLOOR)
            .map(|l| l.sqrt())
            .sum();
        Ok(f.clamp(0.0, 1.0))
    }

    /// Largest absolute elementwise difference.
    pub fn max_deviation(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.mat - &other.mat))
    }
}

const PURE_TOL: f64 = 1e-12;

/// `√(λ₀⟨v|σ|v⟩)` when the spectrum is rank one to within `PURE_TOL`.
fn pure_fidelity(s: &Spectrum, sigma: &CMatrix) -> Option<f64> {
    if s.values[0] < 1.0 - PURE_TOL {
        return None;
    }
    let v = s.vectors.column(0);
    let expect = (v.adjoint() * sigma * v)[(0, 0)].re.max(0.0);
    Some((s.values[0] * expect).sqrt().clamp(0.0, 1.0))
}
