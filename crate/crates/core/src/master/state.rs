use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Density matrix truncated at two excitations, stored by manifold block.
///
/// With `|ee_μ⟩` the pair states of the codec,
/// `a0 = ⟨g|ρ|g⟩`, `v_j = ⟨e_j|ρ|g⟩`, `w_μ = ⟨ee_μ|ρ|g⟩`, `rho1_ij = ⟨e_i|ρ|e_j⟩`,
/// `s_jμ = ⟨ee_μ|ρ|e_j⟩` (N × M) and `rho2_μν = ⟨ee_μ|ρ|ee_ν⟩`.
/// The remaining blocks follow from hermiticity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub a0: f64,
    pub v: DVector<Complex64>,
    pub w: DVector<Complex64>,
    pub rho1: DMatrix<Complex64>,
    pub s: DMatrix<Complex64>,
    pub rho2: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(atoms: usize) -> Self {
        let m = atoms * atoms.saturating_sub(1) / 2;
        Self {
            a0: 0.0,
            v: DVector::zeros(atoms),
            w: DVector::zeros(m),
            rho1: DMatrix::zeros(atoms, atoms),
            s: DMatrix::zeros(atoms, m),
            rho2: DMatrix::zeros(m, m),
        }
    }

    /// All atoms in the ground state.
    pub fn ground(atoms: usize) -> Self {
        Self { a0: 1.0, ..Self::zeros(atoms) }
    }

    pub fn atoms(&self) -> usize {
        self.v.len()
    }

    pub fn pairs(&self) -> usize {
        self.w.len()
    }

    pub fn trace(&self) -> f64 {
        self.a0 + self.rho1.trace().re + self.rho2.trace().re
    }

    pub fn single_population(&self) -> f64 {
        self.rho1.trace().re
    }

    pub fn double_population(&self) -> f64 {
        self.rho2.trace().re
    }

    /// Largest deviation from hermiticity over the diagonal blocks.
    pub fn hermiticity_error(&self) -> f64 {
        let e1 = (&self.rho1 - self.rho1.adjoint()).camax();
        let e2 = if self.pairs() > 0 { (&self.rho2 - self.rho2.adjoint()).camax() } else { 0.0 };
        e1.max(e2)
    }

    pub fn is_finite(&self) -> bool {
        self.a0.is_finite()
            && self.v.iter().chain(self.w.iter()).chain(self.rho1.iter()).chain(self.s.iter()).chain(self.rho2.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn check_shape(&self, atoms: usize) -> Result<()> {
        let m = atoms * atoms.saturating_sub(1) / 2;
        let ok = self.v.len() == atoms
            && self.w.len() == m
            && self.rho1.shape() == (atoms, atoms)
            && self.s.shape() == (atoms, m)
            && self.rho2.shape() == (m, m);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("density matrix blocks do not match {atoms} atoms")))
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        let a = Complex64::new(alpha, 0.0);
        self.a0 += alpha * other.a0;
        self.v.axpy(a, &other.v, Complex64::new(1.0, 0.0));
        self.w.axpy(a, &other.w, Complex64::new(1.0, 0.0));
        self.rho1.zip_apply(&other.rho1, |x, y| *x += a * y);
        self.s.zip_apply(&other.s, |x, y| *x += a * y);
        self.rho2.zip_apply(&other.rho2, |x, y| *x += a * y);
    }

    pub fn scale(&mut self, alpha: f64) {
        self.a0 *= alpha;
        self.v *= Complex64::new(alpha, 0.0);
        self.w *= Complex64::new(alpha, 0.0);
        self.rho1 *= Complex64::new(alpha, 0.0);
        self.s *= Complex64::new(alpha, 0.0);
        self.rho2 *= Complex64::new(alpha, 0.0);
    }

    /// Frobenius norms of the blocks `[a0, v, w, rho1, s, rho2]`.
    pub fn block_norms(&self) -> [f64; 6] {
        [self.a0.abs(), self.v.norm(), self.w.norm(), self.rho1.norm(), self.s.norm(), self.rho2.norm()]
    }

    /// Full `(1+N+M)²` matrix in the basis `[g, e_0.., ee_0..]`.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let (n, m) = (self.atoms(), self.pairs());
        let dim = 1 + n + m;
        let mut d = DMatrix::zeros(dim, dim);
        d[(0, 0)] = Complex64::new(self.a0, 0.0);
        for j in 0..n {
            d[(1 + j, 0)] = self.v[j];
            d[(0, 1 + j)] = self.v[j].conj();
            for i in 0..n {
                d[(1 + i, 1 + j)] = self.rho1[(i, j)];
            }
        }
        for mu in 0..m {
            d[(1 + n + mu, 0)] = self.w[mu];
            d[(0, 1 + n + mu)] = self.w[mu].conj();
            for j in 0..n {
                d[(1 + n + mu, 1 + j)] = self.s[(j, mu)];
                d[(1 + j, 1 + n + mu)] = self.s[(j, mu)].conj();
            }
            for nu in 0..m {
                d[(1 + n + mu, 1 + n + nu)] = self.rho2[(mu, nu)];
            }
        }
        d
    }

    /// Inverse of [`to_dense`](Self::to_dense); reads the lower blocks only.
    pub fn from_dense(d: &DMatrix<Complex64>, atoms: usize) -> Result<Self> {
        let m = atoms * atoms.saturating_sub(1) / 2;
        if d.shape() != (1 + atoms + m, 1 + atoms + m) {
            return Err(Error::InvalidArgument("dense matrix has the wrong dimension".into()));
        }
        let n = atoms;
        Ok(Self {
            a0: d[(0, 0)].re,
            v: DVector::from_fn(n, |j, _| d[(1 + j, 0)]),
            w: DVector::from_fn(m, |mu, _| d[(1 + n + mu, 0)]),
            rho1: DMatrix::from_fn(n, n, |i, j| d[(1 + i, 1 + j)]),
            s: DMatrix::from_fn(n, m, |j, mu| d[(1 + n + mu, 1 + j)]),
            rho2: DMatrix::from_fn(m, m, |mu, nu| d[(1 + n + mu, 1 + n + nu)]),
        })
    }
}
