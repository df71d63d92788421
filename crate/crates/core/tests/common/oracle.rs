//! Brute-force reference: the full `2^N`-dimensional Lindblad master equation.
//!
//! Everything here is built from scratch (Hankel functions from spherical
//! Bessel recurrences, operators as dense matrices over bit-string states) so
//! that it shares no code with the library beyond the input positions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Outgoing spherical Hankel functions `h_0` and `h_2` from `j_l + i y_l`.
pub fn hankel_0_2(x: f64) -> (C, C) {
    let (s, co) = x.sin_cos();
    let j0 = s / x;
    let y0 = -co / x;
    let j1 = s / (x * x) - co / x;
    let y1 = -co / (x * x) - s / x;
    let j2 = 3.0 / x * j1 - j0;
    let y2 = 3.0 / x * y1 - y0;
    (c(j0, y0), c(j2, y2))
}

/// Coupling between atoms at `ri`, `rj` with dipoles along z, `Γ = 1`, `λ = 1`.
pub fn coupling(ri: [f64; 3], rj: [f64; 3]) -> C {
    let d = [ri[0] - rj[0], ri[1] - rj[1], ri[2] - rj[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if r == 0.0 {
        return c(0.5, 0.0);
    }
    let cos2 = (d[2] / r).powi(2);
    let (h0, h2) = hankel_0_2(2.0 * std::f64::consts::PI * r);
    0.5 * (h0 + (3.0 * cos2 - 1.0) / 2.0 * h2)
}

pub struct FullSystem {
    pub n: usize,
    pub dim: usize,
    pub lower: Vec<DMatrix<C>>,
    pub h: DMatrix<C>,
    pub d: DMatrix<f64>,
}

impl FullSystem {
    pub fn new(positions: &[[f64; 3]], omega: &[C], delta: f64) -> Self {
        let n = positions.len();
        let dim = 1 << n;
        let lower: Vec<DMatrix<C>> = (0..n)
            .map(|j| {
                let mut m = DMatrix::zeros(dim, dim);
                for s in 0..dim {
                    if s & (1 << j) != 0 {
                        m[(s ^ (1 << j), s)] = c(1.0, 0.0);
                    }
                }
                m
            })
            .collect();
        let g = DMatrix::from_fn(n, n, |i, j| coupling(positions[i], positions[j]));
        let mut h = DMatrix::zeros(dim, dim);
        for j in 0..n {
            let up = lower[j].adjoint();
            h += &up * &lower[j] * c(-delta, 0.0);
            h += &up * (omega[j] / 2.0);
            h += &lower[j] * (omega[j].conj() / 2.0);
            for i in (0..n).filter(|&i| i != j) {
                h += lower[i].adjoint() * &lower[j] * c(g[(i, j)].im, 0.0);
            }
        }
        let d = g.map(|z| 2.0 * z.re);
        Self { n, dim, lower, h, d }
    }

    pub fn jump(&self, rho: &DMatrix<C>) -> DMatrix<C> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.n {
            let left = &self.lower[i] * rho;
            for j in 0..self.n {
                if self.d[(i, j)] != 0.0 {
                    out += &left * self.lower[j].adjoint() * c(self.d[(i, j)], 0.0);
                }
            }
        }
        out
    }

    pub fn rhs(&self, rho: &DMatrix<C>) -> DMatrix<C> {
        let mut out = (&self.h * rho - rho * &self.h) * c(0.0, -1.0);
        out += self.jump(rho);
        for i in 0..self.n {
            for j in 0..self.n {
                let k = lower_product(&self.lower[i], &self.lower[j]) * c(0.5 * self.d[(i, j)], 0.0);
                out -= &k * rho + rho * &k;
            }
        }
        out
    }

    /// Column-stacked superoperator.
    pub fn superoperator(&self) -> DMatrix<C> {
        let d2 = self.dim * self.dim;
        let mut l = DMatrix::zeros(d2, d2);
        for col in 0..d2 {
            let mut e = DMatrix::zeros(self.dim, self.dim);
            e[(col % self.dim, col / self.dim)] = c(1.0, 0.0);
            let r = self.rhs(&e);
            l.set_column(col, &DVector::from_column_slice(r.as_slice()));
        }
        l
    }

    pub fn steady_state(&self) -> DMatrix<C> {
        let mut l = self.superoperator();
        let mut b = DVector::zeros(self.dim * self.dim);
        // Replace the ground-population equation with the trace condition.
        for col in 0..self.dim * self.dim {
            l[(0, col)] = if col % self.dim == col / self.dim { c(1.0, 0.0) } else { c(0.0, 0.0) };
        }
        b[0] = c(1.0, 0.0);
        let x = l.lu().solve(&b).expect("singular Liouvillian");
        let rho = DMatrix::from_column_slice(self.dim, self.dim, x.as_slice());
        (&rho + rho.adjoint()) * c(0.5, 0.0)
    }

    /// `exp(L τ) ρ`.
    pub fn propagate(&self, rho: &DMatrix<C>, tau: f64) -> DMatrix<C> {
        let l = self.superoperator() * c(tau, 0.0);
        let x = l.exp() * DVector::from_column_slice(rho.as_slice());
        DMatrix::from_column_slice(self.dim, self.dim, x.as_slice())
    }

    pub fn collective(&self, coeffs: &[C]) -> DMatrix<C> {
        let mut s = DMatrix::zeros(self.dim, self.dim);
        for (j, cj) in coeffs.iter().enumerate() {
            s += &self.lower[j] * *cj;
        }
        s
    }

    pub fn intensity(&self, rho: &DMatrix<C>, lower: &DMatrix<C>) -> f64 {
        (lower * rho * lower.adjoint()).trace().re
    }

    pub fn g2_zero(&self, rho: &DMatrix<C>, first: &DMatrix<C>, second: &DMatrix<C>) -> f64 {
        let num = (second * first * rho * first.adjoint() * second.adjoint()).trace().re;
        num / (self.intensity(rho, first) * self.intensity(rho, second))
    }

    pub fn g2_zero_freespace(&self, rho: &DMatrix<C>) -> f64 {
        let once = self.jump(rho);
        let twice = self.jump(&once);
        twice.trace().re / once.trace().re.powi(2)
    }

    pub fn g2_tau(&self, rho: &DMatrix<C>, first: &DMatrix<C>, second: &DMatrix<C>, tau: f64) -> f64 {
        let rate = self.intensity(rho, first);
        let projected = first * rho * first.adjoint() / c(rate, 0.0);
        let later = self.propagate(&projected, tau);
        self.intensity(&later, second) / self.intensity(rho, second)
    }

    /// Index of each truncated basis state `[g, e_0.., ee_(0,1), ee_(0,2)..]` in the bit basis.
    pub fn truncated_states(&self) -> Vec<usize> {
        let mut states = vec![0];
        states.extend((0..self.n).map(|j| 1 << j));
        for a in 0..self.n {
            for b in a + 1..self.n {
                states.push((1 << a) | (1 << b));
            }
        }
        states
    }

    pub fn truncate(&self, rho: &DMatrix<C>) -> DMatrix<C> {
        let s = self.truncated_states();
        DMatrix::from_fn(s.len(), s.len(), |i, j| rho[(s[i], s[j])])
    }

    pub fn embed(&self, block: &DMatrix<C>) -> DMatrix<C> {
        let s = self.truncated_states();
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for i in 0..s.len() {
            for j in 0..s.len() {
                out[(s[i], s[j])] = block[(i, j)];
            }
        }
        out
    }
}

fn lower_product(li: &DMatrix<C>, lj: &DMatrix<C>) -> DMatrix<C> {
    li.adjoint() * lj
}
