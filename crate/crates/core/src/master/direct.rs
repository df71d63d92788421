//! Steady state by solving `dρ/dt = 0` directly.
//!
//! Evolution to a steady state takes a time of order `1/γ_min`, which is
//! prohibitive for strongly subradiant modes. Here the stationarity condition is
//! solved with restarted GMRES, left-preconditioned by the exact inverse of the
//! block-diagonal part of the generator. That part is a set of Sylvester
//! equations (`A1 ρ1 + ρ1 A1† = R` and friends) which are diagonal in the
//! single and double eigenbases. What remains is the drive and the jump
//! recycling, which only moves population down the ladder.
//!
//! Block magnitudes span many orders (`ρ2 ~ Ω⁴`), so the Krylov inner product
//! weights every block by the inverse square of its expected norm; the solver
//! then controls the relative error of each block.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::{DoubleModeSet, SingleModeSet};
use crate::error::{Error, Result};
use crate::linalg::{conj, mul};

use super::liouvillian::Liouvillian;
use super::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectOptions {
    /// Target for the weighted relative residual.
    pub tol: f64,
    /// Krylov dimension before restart.
    pub restart: usize,
    pub max_restarts: usize,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self { tol: 1e-12, restart: 40, max_restarts: 50 }
    }
}

struct Basis {
    modes: DMatrix<Complex64>,
    modes_t: DMatrix<Complex64>,
    modes_conj: DMatrix<Complex64>,
    modes_adj: DMatrix<Complex64>,
    /// Eigenvalues of `A1` or `A2`.
    values: Vec<Complex64>,
}

impl Basis {
    fn new(modes: &DMatrix<Complex64>, eigenvalues: &[Complex64], shift: f64) -> Self {
        Self {
            modes: modes.clone(),
            modes_t: modes.transpose(),
            modes_conj: conj(modes),
            modes_adj: modes.adjoint(),
            values: eigenvalues.iter().map(|l| l - Complex64::new(0.0, shift)).collect(),
        }
    }

    /// Solves `A x = r`.
    fn solve_vec(&self, r: &nalgebra::DVector<Complex64>) -> nalgebra::DVector<Complex64> {
        let mut y = &self.modes_t * r;
        for (yi, l) in y.iter_mut().zip(&self.values) {
            *yi /= l;
        }
        &self.modes * y
    }
}

/// Solves `A_left X + X A_right† = R`.
fn solve_sylvester(left: &Basis, right: &Basis, r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut y = mul(&mul(&left.modes_t, r), &right.modes_conj);
    for j in 0..y.ncols() {
        let lr = right.values[j].conj();
        for i in 0..y.nrows() {
            y[(i, j)] /= left.values[i] + lr;
        }
    }
    mul(&mul(&left.modes, &y), &right.modes_adj)
}

struct Preconditioned<'a> {
    liou: &'a Liouvillian,
    single: Basis,
    double: Basis,
}

impl Preconditioned<'_> {
    /// `A x`: the generator, with the ground-population row replaced by the trace.
    fn apply_a(&self, x: &DensityMatrix) -> DensityMatrix {
        let mut out = self.liou.apply(x);
        out.a0 = x.trace();
        out
    }

    /// `P⁻¹ r`, the inverse of the block-diagonal part of `A`.
    fn precondition(&self, r: &DensityMatrix) -> DensityMatrix {
        let n = r.atoms();
        let mut out = DensityMatrix::zeros(n);
        out.a0 = r.a0;
        out.v = -self.single.solve_vec(&r.v);
        out.rho1 = -solve_sylvester(&self.single, &self.single, &r.rho1);
        if r.pairs() > 0 {
            out.w = -self.double.solve_vec(&r.w);
            out.s = -solve_sylvester(&self.double, &self.single, &r.s.transpose()).transpose();
            out.rho2 = -solve_sylvester(&self.double, &self.double, &r.rho2);
        }
        out
    }

    fn apply(&self, x: &DensityMatrix) -> DensityMatrix {
        self.precondition(&self.apply_a(x))
    }
}

fn re_dot(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn re_dot_vec(a: &nalgebra::DVector<Complex64>, b: &nalgebra::DVector<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn weighted_dot(x: &DensityMatrix, y: &DensityMatrix, w: &[f64; 6]) -> f64 {
    w[0] * x.a0 * y.a0
        + w[1] * re_dot_vec(&x.v, &y.v)
        + w[2] * re_dot_vec(&x.w, &y.w)
        + w[3] * re_dot(&x.rho1, &y.rho1)
        + w[4] * re_dot(&x.s, &y.s)
        + w[5] * re_dot(&x.rho2, &y.rho2)
}

/// Real restarted GMRES for `op(x) = c` under the inner product `weighted_dot`.
fn gmres(
    op: impl Fn(&DensityMatrix) -> DensityMatrix,
    c: &DensityMatrix,
    mut x: DensityMatrix,
    weights: &[f64; 6],
    opts: DirectOptions,
) -> (DensityMatrix, f64) {
    let norm = |v: &DensityMatrix| weighted_dot(v, v, weights).max(0.0).sqrt();
    let target = opts.tol * norm(c);
    let m = opts.restart.max(1);
    let mut resid = f64::INFINITY;
    for _ in 0..opts.max_restarts {
        let mut r = c.clone();
        r.axpy(-1.0, &op(&x));
        let beta = norm(&r);
        resid = beta;
        if beta <= target || beta == 0.0 {
            break;
        }
        r.scale(1.0 / beta);
        let mut basis = vec![r];
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        for j in 0..m {
            let mut wv = op(&basis[j]);
            // Modified Gram-Schmidt, applied twice for stability.
            for _ in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let hij = weighted_dot(&wv, b, weights);
                    h[i][j] += hij;
                    wv.axpy(-hij, b);
                }
            }
            let hn = norm(&wv);
            h[j + 1][j] = hn;
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let rho = h[j][j].hypot(h[j + 1][j]);
            cs[j] = h[j][j] / rho;
            sn[j] = h[j + 1][j] / rho;
            h[j][j] = rho;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            k = j + 1;
            resid = g[j + 1].abs();
            if resid <= target || hn == 0.0 {
                break;
            }
            wv.scale(1.0 / hn);
            basis.push(wv);
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|l| h[i][l] * y[l]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (yi, b) in y.iter().zip(&basis) {
            x.axpy(*yi, b);
        }
        if resid <= target {
            break;
        }
    }
    (x, resid / norm(c).max(1e-300))
}

/// Steady state of `liou` without time evolution.
///
/// `initial` only sets the starting point and the block scales; when absent a
/// few preconditioned Jacobi sweeps from the ground state provide both.
pub fn steady_state_direct(
    liou: &Liouvillian,
    singles: &SingleModeSet,
    doubles: &DoubleModeSet,
    initial: Option<&DensityMatrix>,
    opts: DirectOptions,
) -> Result<DensityMatrix> {
    let n = liou.atoms();
    if singles.len() != n || doubles.len() != n * n.saturating_sub(1) / 2 {
        return Err(Error::InvalidArgument("mode sets do not match the generator".into()));
    }
    if liou.drive_amplitudes().iter().all(|z| z.norm() == 0.0) {
        return Ok(DensityMatrix::ground(n));
    }
    let delta = liou.detuning();
    let pre = Preconditioned {
        liou,
        single: Basis::new(&singles.modes, &singles.eigenvalues, delta),
        double: Basis::new(&doubles.modes, &doubles.eigenvalues, 2.0 * delta),
    };
    for values in [&pre.single.values, &pre.double.values] {
        if let Some((mode, l)) = values.iter().enumerate().find(|(_, l)| l.norm() < 1e-300) {
            return Err(Error::ResonanceSingularity { mode, denominator: l.norm() });
        }
    }
    let mut c = DensityMatrix::zeros(n);
    c.a0 = 1.0;

    let x0 = match initial {
        Some(r) => {
            r.check_shape(n)?;
            r.clone()
        }
        None => {
            let mut x = DensityMatrix::ground(n);
            for _ in 0..6 {
                let mut r = c.clone();
                r.axpy(-1.0, &pre.apply(&x));
                x.axpy(1.0, &r);
            }
            x
        }
    };
    let scales = x0.block_norms();
    let weights = scales.map(|s| if s > 0.0 && s.is_finite() { 1.0 / (s * s) } else { 1.0 });
    let (x, resid) = gmres(|v| pre.apply(v), &c, x0, &weights, opts);
    log::debug!("direct steady state: weighted residual {resid:.3e}");
    if !(resid <= opts.tol) || !x.is_finite() {
        return Err(Error::Convergence { time: f64::NAN, residual: resid, slowest_gamma: liou.slowest_gamma() });
    }
    Ok(x)
}
