//! Free-space dyadic Green's kernel and the single/double manifold coupling matrices.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{AtomArray, PairIndex, GAMMA0, WAVENUMBER};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Outgoing spherical Hankel function `h0(x) = -i e^{ix}/x`.
pub fn hankel0(x: f64) -> Complex64 {
    -I * Complex64::cis(x) / x
}

/// Outgoing spherical Hankel function `h2(x) = (i/x - 3/x^2 - 3i/x^3) e^{ix}`.
pub fn hankel2(x: f64) -> Complex64 {
    let x2 = x * x;
    Complex64::new(-3.0 / x2, 1.0 / x - 3.0 / (x2 * x)) * Complex64::cis(x)
}

/// Coupling `g(r)` between two dipoles separated by `r` (in wavelengths), in units of Γ.
pub fn greens_kernel(r: [f64; 3], dipole: &[Complex64; 3]) -> Result<Complex64> {
    let dist = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if !(dist > 0.0) {
        return Err(Error::Domain("greens kernel is undefined at zero separation".into()));
    }
    let rhat = r.map(|c| c / dist);
    let proj: Complex64 = rhat.iter().zip(dipole).map(|(a, q)| q * a).sum();
    let angular = (3.0 * proj.norm_sqr() - 1.0) / 2.0;
    let x = WAVENUMBER * dist;
    Ok(0.5 * GAMMA0 * (hankel0(x) + angular * hankel2(x)))
}

/// Interaction matrices of one array: `G` on the single and `G̃` on the double manifold.
#[derive(Debug, Clone)]
pub struct GreensMatrices {
    pub g: DMatrix<Complex64>,
    /// Empty (0×0) for a single atom.
    pub gtilde: DMatrix<Complex64>,
    pub codec: PairIndex,
}

impl GreensMatrices {
    pub fn new(array: &AtomArray) -> Self {
        let g = build_g(array);
        let codec = array.codec();
        let gtilde = if array.len() >= 2 {
            gtilde_from_g(&g, &codec)
        } else {
            DMatrix::zeros(0, 0)
        };
        Self { g, gtilde, codec }
    }

    pub fn atoms(&self) -> usize {
        self.g.nrows()
    }

    /// Emission kernel `D = 2 Re G` of the jump term.
    pub fn decay_kernel(&self) -> DMatrix<f64> {
        self.g.map(|z| 2.0 * z.re)
    }

    pub fn write_csv<W: Write>(matrix: &DMatrix<Complex64>, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row", "col", "re", "im"])?;
        for i in 0..matrix.nrows() {
            for j in 0..matrix.ncols() {
                let z = matrix[(i, j)];
                w.write_record([i.to_string(), j.to_string(), format!("{:e}", z.re), format!("{:e}", z.im)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Single-manifold matrix `G_ij = g(r_i - r_j)` with the diagonal fixed at `Γ/2`.
pub fn build_g(array: &AtomArray) -> DMatrix<Complex64> {
    let n = array.len();
    let mut g = DMatrix::from_element(n, n, Complex64::new(0.5 * GAMMA0, 0.0));
    for i in 0..n {
        for j in 0..i {
            // Construction guarantees distinct positions.
            let z = greens_kernel(array.separation(i, j), array.dipole()).expect("distinct atoms");
            g[(i, j)] = z;
            g[(j, i)] = z;
        }
    }
    g
}

/// Double-manifold matrix: two pairs sharing exactly one atom couple through `g` between
/// their unshared atoms; the diagonal is `Γ`.
pub fn build_gtilde(array: &AtomArray) -> Result<DMatrix<Complex64>> {
    if array.len() < 2 {
        return Err(Error::InvalidArgument("the double manifold needs at least two atoms".into()));
    }
    Ok(gtilde_from_g(&build_g(array), &array.codec()))
}

pub(crate) fn gtilde_from_g(g: &DMatrix<Complex64>, codec: &PairIndex) -> DMatrix<Complex64> {
    let n = codec.atoms();
    let m = codec.len();
    let mut gt = DMatrix::zeros(m, m);
    for (mu, &(a, b)) in codec.pairs().iter().enumerate() {
        gt[(mu, mu)] = Complex64::new(GAMMA0, 0.0);
        // Move one excitation off `a` (keeping `b`) or off `b` (keeping `a`).
        for (moved, kept) in [(a, b), (b, a)] {
            for target in (0..n).filter(|&t| t != a && t != b) {
                let nu = codec.index_unordered(target, kept);
                gt[(nu, mu)] = g[(target, moved)];
            }
        }
    }
    gt
}
