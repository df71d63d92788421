//! Right-hand side of the truncated master equation.
//!
//! The master equation is written as `dρ/dt = Kρ + ρK† + J(ρ)` with the
//! non-Hermitian generator
//!
//! ```text
//! K = -Σ_ij G_ij σ⁺_i σ⁻_j + iδ Σ_j σ⁺_j σ⁻_j - (i/2) Σ_j (Ω_j σ⁺_j + Ω*_j σ⁻_j)
//! ```
//!
//! (the exchange term `Im G` and the anticommutator `Re G` combine into `G`)
//! and the jump term `J(ρ) = Σ_ij D_ij σ⁻_i ρ σ⁺_j`, `D = 2 Re G`. On the
//! double manifold `-Σ G σ⁺σ⁻` acts as `-G̃`. The drive from two to three
//! excitations is dropped; this is the truncation boundary.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::drive::DriveConfig;
use super::state::DensityMatrix;
use crate::error::{Error, Result};
use crate::greens::GreensMatrices;

const HALF_I: Complex64 = Complex64::new(0.0, 0.5);

#[derive(Debug, Clone)]
pub struct Liouvillian {
    n: usize,
    m: usize,
    /// `G - iδ`
    a1: DMatrix<Complex64>,
    a1_conj: DMatrix<Complex64>,
    /// Sparse rows of `G̃ - 2iδ` (symmetric).
    a2_rows: Vec<Vec<(usize, Complex64)>>,
    kernel: DMatrix<f64>,
    kernel_c: DMatrix<Complex64>,
    omega: DVector<Complex64>,
    omega_conj: DVector<Complex64>,
    detuning: f64,
    pairs: Vec<(usize, usize)>,
    /// For atom `k`: every pair `μ ∋ k` together with the other atom of `μ`.
    incident: Vec<Vec<(usize, usize)>>,
    slowest_gamma: f64,
    rate_bound: f64,
}

impl Liouvillian {
    pub fn new(greens: &GreensMatrices, drive: &DriveConfig) -> Result<Self> {
        let n = greens.atoms();
        if drive.atoms() != n {
            return Err(Error::InvalidArgument(format!("drive has {} amplitudes for {n} atoms", drive.atoms())));
        }
        let codec = &greens.codec;
        let m = codec.len();
        let delta = drive.detuning;
        let a1 = DMatrix::from_fn(n, n, |i, j| greens.g[(i, j)] - if i == j { Complex64::new(0.0, delta) } else { Complex64::new(0.0, 0.0) });
        let mut a2_rows = Vec::with_capacity(m);
        let mut incident = vec![Vec::new(); n];
        for (mu, &(a, b)) in codec.pairs().iter().enumerate() {
            let mut row = vec![(mu, greens.gtilde[(mu, mu)] - Complex64::new(0.0, 2.0 * delta))];
            for kept in [a, b] {
                for target in (0..n).filter(|&t| t != a && t != b) {
                    let nu = codec.index_unordered(target, kept);
                    row.push((nu, greens.gtilde[(mu, nu)]));
                }
            }
            row.sort_by_key(|e| e.0);
            a2_rows.push(row);
            incident[a].push((mu, b));
            incident[b].push((mu, a));
        }
        let kernel = greens.decay_kernel();
        let kernel_c = kernel.map(|x| Complex64::new(x, 0.0));

        let row_bound = |rows: &mut dyn Iterator<Item = f64>| rows.fold(0.0f64, f64::max);
        let r1 = row_bound(&mut (0..n).map(|i| a1.row(i).iter().map(|z| z.norm()).sum::<f64>()));
        let r2 = row_bound(&mut a2_rows.iter().map(|r| r.iter().map(|e| e.1.norm()).sum::<f64>()));
        let rd = row_bound(&mut (0..n).map(|i| kernel.row(i).iter().map(|x| x.abs()).sum::<f64>()));
        let rate_bound = 2.0 * r1.max(r2) + rd + 2.0 * drive.max_rabi() * (n as f64).sqrt();

        let eig = faer::Mat::<Complex64>::from_fn(n, n, |i, j| greens.g[(i, j)])
            .eigenvalues()
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let slowest_gamma = eig.iter().map(|l| 2.0 * l.re).fold(f64::INFINITY, f64::min);

        Ok(Self {
            n,
            m,
            a1_conj: a1.map(|z| z.conj()),
            a1,
            a2_rows,
            kernel,
            kernel_c,
            omega_conj: drive.amplitudes.map(|z| z.conj()),
            omega: drive.amplitudes.clone(),
            detuning: delta,
            pairs: codec.pairs().to_vec(),
            incident,
            slowest_gamma,
            rate_bound,
        })
    }

    pub fn atoms(&self) -> usize {
        self.n
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    /// Smallest single-mode decay rate; sets the equilibration time.
    pub fn slowest_gamma(&self) -> f64 {
        self.slowest_gamma
    }

    /// Upper bound on the magnitude of any Liouvillian eigenvalue.
    pub fn rate_bound(&self) -> f64 {
        self.rate_bound
    }

    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn drive_amplitudes(&self) -> &DVector<Complex64> {
        &self.omega
    }

    /// `out -= A2 x` for an `M × k` matrix `x`.
    fn sub_a2_left(&self, x: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        for c in 0..x.ncols() {
            let col = x.column(c);
            let mut dst = out.column_mut(c);
            for (mu, row) in self.a2_rows.iter().enumerate() {
                let acc: Complex64 = row.iter().map(|&(nu, a)| a * col[nu]).sum();
                dst[mu] -= acc;
            }
        }
    }

    /// `out -= x A2` for a `k × M` matrix `x`.
    fn sub_a2_right(&self, x: &DMatrix<Complex64>, out: &mut DMatrix<Complex64>) {
        for (mu, row) in self.a2_rows.iter().enumerate() {
            for &(nu, a) in row {
                let src = x.column(nu);
                let mut dst = out.column_mut(mu);
                dst.zip_apply(&src, |d, s| *d -= a * s);
            }
        }
    }

    /// Time derivative `dρ/dt`.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let (n, m) = (self.n, self.m);
        let omega = &self.omega;
        let omega_c = &self.omega_conj;
        let d = &self.kernel;
        let mut out = DensityMatrix::zeros(n);

        // Ground population.
        let omega_dag_v: Complex64 = omega_c.dot(&rho.v);
        let jump_gg: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| d[(i, j)] * rho.rho1[(i, j)].re).sum();
        out.a0 = omega_dag_v.im + jump_gg;

        // Single-ground coherences.
        let mut dv = -(&self.a1 * &rho.v);
        dv.axpy(-HALF_I * rho.a0, omega, Complex64::new(1.0, 0.0));
        dv += (&rho.rho1 * omega) * HALF_I;
        let t = &self.kernel_c * &rho.s; // N × M
        for k in 0..n {
            for &(mu, p) in &self.incident[k] {
                dv[k] += -HALF_I * omega_c[p] * rho.w[mu] + t[(p, mu)];
            }
        }
        out.v = dv;

        if m > 0 {
            // Double-ground coherences.
            let mut dw = DMatrix::zeros(m, 1);
            self.sub_a2_left(&DMatrix::from_column_slice(m, 1, rho.w.as_slice()), &mut dw);
            let s_omega = rho.s.tr_mul(omega); // Σ_j s_{jμ} Ω_j
            for (mu, &(a, b)) in self.pairs.iter().enumerate() {
                dw[(mu, 0)] += -HALF_I * (omega[a] * rho.v[b] + omega[b] * rho.v[a]) + HALF_I * s_omega[mu];
            }
            out.w = DVector::from_column_slice(dw.as_slice());
        }

        // Single-single block.
        let mut x = -(&self.a1 * &rho.rho1);
        x -= (omega * rho.v.adjoint()) * HALF_I;
        for k in 0..n {
            for &(mu, p) in &self.incident[k] {
                let f = -HALF_I * omega_c[p];
                for l in 0..n {
                    x[(k, l)] += f * rho.s[(l, mu)];
                }
            }
        }
        let mut drho1 = &x + x.adjoint();
        if m > 0 {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(mu, i) in &self.incident[k] {
                        for &(nu, j) in &self.incident[l] {
                            acc += d[(i, j)] * rho.rho2[(mu, nu)];
                        }
                    }
                    drho1[(k, l)] += acc;
                }
            }
        }
        out.rho1 = drho1;

        if m == 0 {
            return out;
        }

        // Double-single block, stored as s_{lμ}.
        let mut ds = -(&self.a1_conj * &rho.s);
        self.sub_a2_right(&rho.s, &mut ds);
        for (mu, &(a, b)) in self.pairs.iter().enumerate() {
            for l in 0..n {
                ds[(l, mu)] += -HALF_I * (omega[a] * rho.rho1[(b, l)] + omega[b] * rho.rho1[(a, l)]) + HALF_I * rho.w[mu] * omega_c[l];
            }
        }
        for l in 0..n {
            for &(nu, p) in &self.incident[l] {
                let f = HALF_I * omega[p];
                for mu in 0..m {
                    ds[(l, mu)] += f * rho.rho2[(mu, nu)];
                }
            }
        }
        out.s = ds;

        // Double-double block.
        let mut y = DMatrix::zeros(m, m);
        self.sub_a2_left(&rho.rho2, &mut y);
        let s_conj = rho.s.map(|z| z.conj());
        for nu in 0..m {
            for (mu, &(a, b)) in self.pairs.iter().enumerate() {
                y[(mu, nu)] += -HALF_I * (omega[a] * s_conj[(b, nu)] + omega[b] * s_conj[(a, nu)]);
            }
        }
        out.rho2 = &y + y.adjoint();
        out
    }
}

/// One-shot convenience wrapper around [`Liouvillian::apply`].
pub fn liouvillian_rhs(rho: &DensityMatrix, drive: &DriveConfig, greens: &GreensMatrices) -> Result<DensityMatrix> {
    rho.check_shape(greens.atoms())?;
    Ok(Liouvillian::new(greens, drive)?.apply(rho))
}
