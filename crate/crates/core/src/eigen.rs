//! Eigenmodes of the complex symmetric coupling matrices.
//!
//! `G` and `G̃` are symmetric but not Hermitian, so their eigenvectors are
//! orthogonal under the unconjugated bilinear form `Σ_i v_i w_i`. A general
//! complex eigensolver (faer) supplies the vectors; this module rescales them
//! to `vᵀv = 1`, re-orthogonalizes numerically degenerate clusters, and
//! orders modes by ascending decay rate so index 0 is the most subradiant.

use faer::Mat;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greens::GreensMatrices;

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Eigenvalues closer than `cluster_tol * ||M||_F` are treated as degenerate.
    pub cluster_tol: f64,
    /// Unit-norm vectors with `|vᵀv|` below this are quasi-isotropic.
    pub isotropy_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { cluster_tol: 1e-10, isotropy_tol: 1e-12 }
    }
}

#[derive(Debug, Clone)]
pub struct BilinearEigen {
    /// Column `k` is the mode belonging to `eigenvalues[k]`.
    pub modes: DMatrix<Complex64>,
    pub eigenvalues: Vec<Complex64>,
}

pub fn diagonalize_bilinear(m: &DMatrix<Complex64>) -> Result<BilinearEigen> {
    diagonalize_bilinear_with(m, EigenOptions::default())
}

pub fn diagonalize_bilinear_with(m: &DMatrix<Complex64>, opts: EigenOptions) -> Result<BilinearEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidArgument(format!("matrix is {}x{}, not square", n, m.ncols())));
    }
    if n == 0 {
        return Ok(BilinearEigen { modes: DMatrix::zeros(0, 0), eigenvalues: Vec::new() });
    }
    let scale = m.norm();
    let asym = (m - m.transpose()).camax();
    if asym > 1e-10 * scale.max(1.0) {
        return Err(Error::InvalidArgument(format!("matrix is not complex symmetric (|M - M^T| = {asym:e})")));
    }

    let fm = Mat::<Complex64>::from_fn(n, n, |i, j| m[(i, j)]);
    let eig = fm.eigen().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let values = eig.S().column_vector();
    let vectors = eig.U();

    let mut eigenvalues: Vec<Complex64> = (0..n).map(|k| values[k]).collect();
    let mut modes = DMatrix::from_fn(n, n, |i, j| vectors[(i, j)]);

    for k in 0..n {
        let mut col = modes.column_mut(k);
        let norm = col.norm();
        col /= Complex64::new(norm, 0.0);
        let b = bilinear(&col.clone_owned(), &col.clone_owned());
        if b.norm() < opts.isotropy_tol {
            return Err(Error::DefectiveMode { index: k, norm: b.norm() });
        }
    }

    for cluster in clusters(&eigenvalues, opts.cluster_tol * scale) {
        orthonormalize_cluster(&mut modes, &cluster, opts.isotropy_tol)?;
    }
    for k in 0..n {
        let col = modes.column(k).clone_owned();
        let b = bilinear(&col, &col);
        let mut scaled = col / b.sqrt();
        fix_sign(&mut scaled);
        modes.set_column(k, &scaled);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (eigenvalues[a], eigenvalues[b]);
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    let sorted = DMatrix::from_fn(n, n, |i, j| modes[(i, order[j])]);
    modes = sorted;
    eigenvalues = order.iter().map(|&k| eigenvalues[k]).collect();

    Ok(BilinearEigen { modes, eigenvalues })
}

/// Unconjugated inner product `Σ a_i b_i`.
pub fn bilinear(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn clusters(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..i {
            if (values[i] - values[j]).norm() < tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = root(&mut parent, i);
        groups[r].push(i);
    }
    groups.into_iter().filter(|g| g.len() > 1).collect()
}

/// Bilinear Gram-Schmidt over the columns listed in `cluster`.
fn orthonormalize_cluster(modes: &mut DMatrix<Complex64>, cluster: &[usize], isotropy_tol: f64) -> Result<()> {
    let mut done: Vec<DVector<Complex64>> = Vec::with_capacity(cluster.len());
    for &k in cluster {
        let mut v = modes.column(k).clone_owned();
        for u in &done {
            let proj = bilinear(u, &v);
            v -= u * proj;
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::DefectiveMode { index: k, norm: 0.0 });
        }
        v /= Complex64::new(norm, 0.0);
        let b = bilinear(&v, &v);
        if b.norm() < isotropy_tol {
            return Err(Error::DefectiveMode { index: k, norm: b.norm() });
        }
        v /= b.sqrt();
        modes.set_column(k, &v);
        done.push(v);
    }
    Ok(())
}

/// Bilinear normalization fixes a mode up to sign; make the largest entry point right.
fn fix_sign(v: &mut DVector<Complex64>) {
    let big = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
    let flip = if big.re.abs() > 1e-14 * big.norm() { big.re < 0.0 } else { big.im < 0.0 };
    if flip {
        v.neg_mut();
    }
}

/// Single-excitation eigenmodes `G V_α = (γ_α/2 + iΔ_α) V_α`.
#[derive(Debug, Clone)]
pub struct SingleModeSet {
    pub modes: DMatrix<Complex64>,
    pub eigenvalues: Vec<Complex64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
}

impl SingleModeSet {
    pub fn new(greens: &GreensMatrices) -> Result<Self> {
        Self::with_options(greens, EigenOptions::default())
    }

    pub fn with_options(greens: &GreensMatrices, opts: EigenOptions) -> Result<Self> {
        let BilinearEigen { modes, eigenvalues } = diagonalize_bilinear_with(&greens.g, opts)?;
        let gamma = eigenvalues.iter().map(|l| 2.0 * l.re).collect();
        let delta = eigenvalues.iter().map(|l| l.im).collect();
        Ok(Self { modes, eigenvalues, gamma, delta })
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn mode(&self, alpha: usize) -> DVector<Complex64> {
        self.modes.column(alpha).clone_owned()
    }

    pub fn most_subradiant(&self) -> usize {
        0
    }

    pub fn most_superradiant(&self) -> usize {
        self.len() - 1
    }

    pub fn check_index(&self, alpha: usize) -> Result<()> {
        if alpha >= self.len() {
            return Err(Error::InvalidArgument(format!("single mode {alpha} out of range 0..{}", self.len())));
        }
        Ok(())
    }
}

/// Double-excitation eigenmodes `G̃ W_β = (γ_β/2 + iΔ_β) W_β` and second-photon rates.
#[derive(Debug, Clone)]
pub struct DoubleModeSet {
    pub modes: DMatrix<Complex64>,
    pub eigenvalues: Vec<Complex64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl DoubleModeSet {
    pub fn new(greens: &GreensMatrices) -> Result<Self> {
        Self::with_options(greens, EigenOptions::default())
    }

    pub fn with_options(greens: &GreensMatrices, opts: EigenOptions) -> Result<Self> {
        let BilinearEigen { modes, eigenvalues } = diagonalize_bilinear_with(&greens.gtilde, opts)?;
        let gamma: Vec<f64> = eigenvalues.iter().map(|l| 2.0 * l.re).collect();
        let delta = eigenvalues.iter().map(|l| l.im).collect();
        let mut set = Self { modes, eigenvalues, gamma, delta, zeta: Vec::new() };
        let kernel = greens.decay_kernel();
        set.zeta = (0..set.len())
            .into_par_iter()
            .map(|beta| zeta_from_parts(&set, beta, &kernel, greens))
            .collect::<Result<Vec<_>>>()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn mode(&self, beta: usize) -> DVector<Complex64> {
        self.modes.column(beta).clone_owned()
    }
}

/// Average emission rate of the second photon from double mode `β`, after the first.
///
/// With `ρ_β` the normalized pure state built from `W_β`, this is
/// `(1/γ_β) Σ D_ij D_i'j' Tr[σ⁻_i' σ⁻_i ρ_β σ⁺_j σ⁺_j']` with `D = 2 Re G`.
pub fn second_photon_rate(beta: usize, doubles: &DoubleModeSet, greens: &GreensMatrices) -> Result<f64> {
    if beta >= doubles.len() {
        return Err(Error::InvalidArgument(format!("double mode {beta} out of range 0..{}", doubles.len())));
    }
    zeta_from_parts(doubles, beta, &greens.decay_kernel(), greens)
}

fn zeta_from_parts(doubles: &DoubleModeSet, beta: usize, kernel: &DMatrix<f64>, greens: &GreensMatrices) -> Result<f64> {
    let gamma = doubles.gamma[beta];
    if !(gamma > 0.0) {
        return Err(Error::DegenerateMode { index: beta, gamma });
    }
    let n = greens.atoms();
    // Pair amplitudes as a symmetric N×N matrix with empty diagonal.
    let mut psi = DMatrix::<Complex64>::zeros(n, n);
    let mut norm = 0.0;
    for (mu, &(a, b)) in greens.codec.pairs().iter().enumerate() {
        let w = doubles.modes[(mu, beta)];
        psi[(a, b)] = w;
        psi[(b, a)] = w;
        norm += w.norm_sqr();
    }
    let d = kernel.map(|x| Complex64::new(x, 0.0));
    let left = &psi * &d;
    let right = &d * psi.map(|z| z.conj());
    let two_jump: Complex64 = left.iter().zip(right.iter()).map(|(x, y)| x * y).sum();
    Ok(two_jump.re / (norm * gamma))
}
