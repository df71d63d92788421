#![allow(dead_code)]

pub mod oracle;

use arrayg2_core::{AtomArray, DensityMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(r: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(r.random_range(-scale..scale), r.random_range(-scale..scale))
}

/// `n` atoms in a plane with nearest-neighbour distance at least `d_min`.
pub fn random_positions(r: &mut impl Rng, n: usize, d_min: f64, d_max: f64) -> Vec<[f64; 3]> {
    let mut out: Vec<[f64; 3]> = Vec::with_capacity(n);
    while out.len() < n {
        let p = if out.is_empty() {
            [0.0, 0.0, 0.0]
        } else {
            let base = out[r.random_range(0..out.len())];
            let dist = r.random_range(d_min..d_max);
            let theta: f64 = r.random_range(0.0..std::f64::consts::TAU);
            [base[0] + dist * theta.cos(), 0.0, base[2] + dist * theta.sin()]
        };
        let ok = out.iter().all(|q| ((p[0] - q[0]).powi(2) + (p[2] - q[2]).powi(2)).sqrt() >= d_min);
        if ok {
            out.push(p);
        }
    }
    out
}

pub fn random_array(r: &mut impl Rng, n: usize, d_min: f64, d_max: f64) -> AtomArray {
    AtomArray::from_positions(random_positions(r, n, d_min, d_max)).unwrap()
}

/// Random Hermitian block state (not necessarily positive), trace one.
pub fn random_state(r: &mut impl Rng, atoms: usize) -> DensityMatrix {
    let m = atoms * (atoms - 1) / 2;
    let dim = 1 + atoms + m;
    let a = DMatrix::from_fn(dim, dim, |_, _| random_complex(r, 1.0));
    let mut h = &a + a.adjoint();
    let tr = h.trace();
    h /= tr;
    DensityMatrix::from_dense(&h, atoms).unwrap()
}

/// Random positive semidefinite block state, trace one.
pub fn random_density(r: &mut impl Rng, atoms: usize) -> DensityMatrix {
    let dim = 1 + atoms + atoms * (atoms - 1) / 2;
    let a = DMatrix::from_fn(dim, dim, |_, _| random_complex(r, 1.0));
    let mut h = &a * a.adjoint();
    let tr = h.trace();
    h /= tr;
    DensityMatrix::from_dense(&h, atoms).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
