//! Bilinear overlaps between double modes and products of single modes.
//!
//! `L_{α₁α₂β} = Σ_μ (V_{m1α₁} V_{m2α₂} + V_{m1α₂} V_{m2α₁}) W_{μβ}` measures how
//! strongly double mode `β` emits one photon into `α₁` and one into `α₂`;
//! `X_{αβ} = L_{ααβ}`. No complex conjugation appears anywhere.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eigen::{DoubleModeSet, SingleModeSet};
use crate::error::{Error, Result};
use crate::geometry::PairIndex;

/// Pair-space vector `V_{m1α₁} V_{m2α₂} + V_{m1α₂} V_{m2α₁}` for every pair `μ`.
pub fn pair_product(singles: &SingleModeSet, a1: usize, a2: usize, codec: &PairIndex) -> DVector<Complex64> {
    let v = &singles.modes;
    DVector::from_iterator(
        codec.len(),
        codec.pairs().iter().map(|&(m1, m2)| v[(m1, a1)] * v[(m2, a2)] + v[(m1, a2)] * v[(m2, a1)]),
    )
}

fn check(singles: &SingleModeSet, doubles: &DoubleModeSet, alphas: &[usize], beta: Option<usize>) -> Result<()> {
    if doubles.is_empty() {
        return Err(Error::InvalidArgument("no double-excitation manifold for a single atom".into()));
    }
    for &a in alphas {
        singles.check_index(a)?;
    }
    if let Some(b) = beta {
        if b >= doubles.len() {
            return Err(Error::InvalidArgument(format!("double mode {b} out of range 0..{}", doubles.len())));
        }
    }
    Ok(())
}

pub fn overlap_l(
    a1: usize,
    a2: usize,
    beta: usize,
    singles: &SingleModeSet,
    doubles: &DoubleModeSet,
    codec: &PairIndex,
) -> Result<Complex64> {
    check(singles, doubles, &[a1, a2], Some(beta))?;
    let p = pair_product(singles, a1, a2, codec);
    Ok(p.iter().zip(doubles.modes.column(beta).iter()).map(|(x, w)| x * w).sum())
}

pub fn overlap_x(
    alpha: usize,
    beta: usize,
    singles: &SingleModeSet,
    doubles: &DoubleModeSet,
    codec: &PairIndex,
) -> Result<Complex64> {
    overlap_l(alpha, alpha, beta, singles, doubles, codec)
}

/// `L_{α₁α₂β}` for every `β` at once.
pub fn overlap_l_row(
    a1: usize,
    a2: usize,
    singles: &SingleModeSet,
    doubles: &DoubleModeSet,
    codec: &PairIndex,
) -> Result<DVector<Complex64>> {
    check(singles, doubles, &[a1, a2], None)?;
    let p = pair_product(singles, a1, a2, codec);
    Ok(doubles.modes.tr_mul(&p))
}

/// Eagerly computed `X` table (N × M). `L` rows are computed on demand.
#[derive(Debug, Clone)]
pub struct OverlapTables {
    pub x: DMatrix<Complex64>,
}

impl OverlapTables {
    pub fn new(singles: &SingleModeSet, doubles: &DoubleModeSet, codec: &PairIndex) -> Result<Self> {
        check(singles, doubles, &[], None)?;
        let n = singles.len();
        let mut products = DMatrix::<Complex64>::zeros(n, codec.len());
        for alpha in 0..n {
            products.set_row(alpha, &pair_product(singles, alpha, alpha, codec).transpose());
        }
        Ok(Self { x: products * &doubles.modes })
    }

    pub fn x(&self, alpha: usize, beta: usize) -> Complex64 {
        self.x[(alpha, beta)]
    }

    pub fn x_row(&self, alpha: usize) -> DVector<Complex64> {
        self.x.row(alpha).transpose()
    }
}
