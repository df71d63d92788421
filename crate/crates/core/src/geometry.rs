//! Atom arrays and the pair-index codec for the double-excitation manifold.
//!
//! Lengths are in units of the resonant wavelength and rates in units of the
//! single-atom decay rate, so `k = 2π` and `Γ = 1` throughout the crate.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resonant wavenumber `2π/λ` with `λ = 1`.
pub const WAVENUMBER: f64 = 2.0 * PI;
/// Single-atom decay rate.
pub const GAMMA0: f64 = 1.0;
/// Atoms closer than this are rejected; the Green's kernel diverges at `r = 0`.
pub const MIN_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Line,
    Square,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    /// Nearest-neighbour spacing, zero for custom geometries.
    pub spacing: f64,
    /// Atoms per side (square), atom count (line) or total count (custom).
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomArray {
    positions: Vec<[f64; 3]>,
    dipole: [Complex64; 3],
    lattice: LatticeSpec,
}

fn z_dipole() -> [Complex64; 3] {
    [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
}

impl AtomArray {
    /// Builds an array from explicit positions, validating the invariants.
    pub fn new(positions: Vec<[f64; 3]>, dipole: [Complex64; 3], lattice: LatticeSpec) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidArgument("an array needs at least one atom".into()));
        }
        if positions.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite atom position".into()));
        }
        let norm: f64 = dipole.iter().map(|q| q.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("dipole orientation is not a unit vector (|q|^2 = {norm})")));
        }
        for i in 0..positions.len() {
            for j in 0..i {
                let r = distance(&positions[i], &positions[j]);
                if r < MIN_SEPARATION {
                    return Err(Error::InvalidArgument(format!("atoms {j} and {i} coincide (separation {r:e})")));
                }
            }
        }
        Ok(Self { positions, dipole, lattice })
    }

    /// Custom geometry with the dipole along z.
    pub fn from_positions(positions: Vec<[f64; 3]>) -> Result<Self> {
        let count = positions.len();
        Self::new(positions, z_dipole(), LatticeSpec { kind: LatticeKind::Custom, spacing: 0.0, count })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn dipole(&self) -> &[Complex64; 3] {
        &self.dipole
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    /// Number of doubly excited site pairs, `N(N-1)/2`.
    pub fn pair_count(&self) -> usize {
        let n = self.len();
        n * (n - 1) / 2
    }

    pub fn codec(&self) -> PairIndex {
        PairIndex::new(self.len())
    }

    pub fn separation(&self, i: usize, j: usize) -> [f64; 3] {
        let (a, b) = (&self.positions[i], &self.positions[j]);
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    pub fn min_distance(&self) -> f64 {
        self.pair_distances().fold(f64::INFINITY, f64::min)
    }

    pub fn max_distance(&self) -> f64 {
        self.pair_distances().fold(0.0, f64::max)
    }

    fn pair_distances(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (0..i).map(move |j| distance(&self.positions[i], &self.positions[j])))
    }

    /// Loads an array file: `{"positions": [[x,y,z],...], "dipole": [qx_re, qx_im, qy_re, qy_im, qz_re, qz_im]}`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: ArrayFile = serde_json::from_str(&text)?;
        file.into_array()
    }

    pub fn to_file(&self) -> ArrayFile {
        ArrayFile {
            positions: self.positions.clone(),
            dipole: Some(self.dipole.iter().flat_map(|q| [q.re, q.im]).collect()),
        }
    }
}

/// On-disk representation of a custom array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayFile {
    pub positions: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole: Option<Vec<f64>>,
}

impl ArrayFile {
    pub fn into_array(self) -> Result<AtomArray> {
        let dipole = match self.dipole {
            None => z_dipole(),
            Some(q) if q.len() == 6 => {
                let raw = [
                    Complex64::new(q[0], q[1]),
                    Complex64::new(q[2], q[3]),
                    Complex64::new(q[4], q[5]),
                ];
                // Files written by hand rarely carry 12 significant digits.
                let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-6 {
                    return Err(Error::InvalidArgument(format!("dipole in array file has norm {norm}")));
                }
                raw.map(|c| c / norm)
            }
            Some(q) => {
                return Err(Error::InvalidArgument(format!("dipole needs 6 numbers, got {}", q.len())));
            }
        };
        let count = self.positions.len();
        AtomArray::new(self.positions, dipole, LatticeSpec { kind: LatticeKind::Custom, spacing: 0.0, count })
    }
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn check_spacing(d: f64) -> Result<()> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidArgument(format!("lattice spacing must be positive, got {d}")));
    }
    Ok(())
}

/// `n_side × n_side` grid in the XZ plane at `(i d, 0, j d)`, dipoles along z.
pub fn build_square_array(n_side: usize, d: f64) -> Result<AtomArray> {
    if n_side == 0 {
        return Err(Error::InvalidArgument("n_side must be at least 1".into()));
    }
    check_spacing(d)?;
    let positions = (0..n_side)
        .flat_map(|i| (0..n_side).map(move |j| [i as f64 * d, 0.0, j as f64 * d]))
        .collect();
    AtomArray::new(positions, z_dipole(), LatticeSpec { kind: LatticeKind::Square, spacing: d, count: n_side })
}

/// Chain of `count` atoms along x with spacing `d`, dipoles along z.
pub fn build_line_array(count: usize, d: f64) -> Result<AtomArray> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    check_spacing(d)?;
    let positions = (0..count).map(|i| [i as f64 * d, 0.0, 0.0]).collect();
    AtomArray::new(positions, z_dipole(), LatticeSpec { kind: LatticeKind::Line, spacing: d, count })
}

/// Lexicographic bijection between atom pairs `m1 < m2` and `0..N(N-1)/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairIndex {
    atoms: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairIndex {
    pub fn new(atoms: usize) -> Self {
        let pairs = (0..atoms).flat_map(|a| (a + 1..atoms).map(move |b| (a, b))).collect();
        Self { atoms, pairs }
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    /// Number of pairs `M`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn index(&self, m1: usize, m2: usize) -> Result<usize> {
        if m1 >= m2 || m2 >= self.atoms {
            return Err(Error::InvalidArgument(format!("pair ({m1}, {m2}) invalid for {} atoms", self.atoms)));
        }
        Ok(self.index_unchecked(m1, m2))
    }

    /// Pair index of two distinct atoms given in either order.
    #[inline]
    pub fn index_unordered(&self, a: usize, b: usize) -> usize {
        debug_assert_ne!(a, b);
        if a < b {
            self.index_unchecked(a, b)
        } else {
            self.index_unchecked(b, a)
        }
    }

    #[inline]
    fn index_unchecked(&self, m1: usize, m2: usize) -> usize {
        m1 * (2 * self.atoms - m1 - 1) / 2 + (m2 - m1 - 1)
    }

    pub fn pair(&self, mu: usize) -> Result<(usize, usize)> {
        self.pairs
            .get(mu)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("pair index {mu} out of range 0..{}", self.len())))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}
