//! Weak-drive closed forms.
//!
//! To lowest order in the drive, the steady state is fixed by the coherences
//! `v` (order Ω) and `w` (order Ω²). Every other block follows from the
//! factorization `ρ1 = v v†/a0`, `s = w v†/a0`, `ρ2 = w w†/a0`.
//!
//! Sign convention: with the drive Hamiltonian `+(Ω_j σ⁺_j + h.c.)/2` the
//! stationary coherence is `ṽ_α = -(i/2) a0 (VᵀΩ)_α / (𝒢_α - iδ)`, matching the
//! two-level result `ρ_eg = -iΩ/Γ` at resonance. For an eigenmode drive at
//! `δ = Δ_α` this is `ṽ_α = -i a0 Ω0/γ_α`. g²(0) is a normalized ratio and
//! does not depend on this phase.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::eigen::{DoubleModeSet, SingleModeSet};
use crate::error::{Error, Result};
use crate::geometry::PairIndex;
use crate::master::{DensityMatrix, DriveConfig};
use crate::overlap::{overlap_l_row, OverlapTables};

const NEG_HALF_I: Complex64 = Complex64::new(0.0, -0.5);
/// Denominators below this magnitude are treated as an exact resonance.
const RESONANCE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct AnalyticSteadyState {
    /// Single-mode coherences `ṽ_α = Σ_j v_j V_{jα}`.
    pub v_tilde: DVector<Complex64>,
    /// Double-mode coherences `w̃_β = Σ_μ w_μ W_{μβ}`.
    pub w_tilde: DVector<Complex64>,
    pub v: DVector<Complex64>,
    pub w: DVector<Complex64>,
    pub a0: f64,
    pub drive_ref: DriveConfig,
}

impl AnalyticSteadyState {
    /// Full block density matrix from the factorization closure.
    pub fn density_matrix(&self) -> DensityMatrix {
        let inv = Complex64::new(1.0 / self.a0, 0.0);
        DensityMatrix {
            a0: self.a0,
            v: self.v.clone(),
            w: self.w.clone(),
            rho1: &self.v * self.v.adjoint() * inv,
            s: (&self.w * self.v.adjoint()).transpose() * inv,
            rho2: &self.w * self.w.adjoint() * inv,
        }
    }

    /// `|ṽ_α|² / a0`, the weight of each single mode in the single manifold.
    pub fn mode_populations(&self) -> Vec<f64> {
        self.v_tilde.iter().map(|z| z.norm_sqr() / self.a0).collect()
    }

    pub fn single_population(&self) -> f64 {
        self.v.norm_squared() / self.a0
    }

    pub fn double_population(&self) -> f64 {
        self.w.norm_squared() / self.a0
    }
}

fn divide_checked(x: &mut DVector<Complex64>, den: impl Iterator<Item = Complex64>) -> Result<()> {
    for (mode, (xi, d)) in x.iter_mut().zip(den).enumerate() {
        if d.norm() < RESONANCE_FLOOR {
            return Err(Error::ResonanceSingularity { mode, denominator: d.norm() });
        }
        *xi = *xi * NEG_HALF_I / d;
    }
    Ok(())
}

/// Lowest-order steady state for `drive`.
pub fn analytic_steady_state(
    drive: &DriveConfig,
    singles: &SingleModeSet,
    doubles: &DoubleModeSet,
    codec: &PairIndex,
) -> Result<AnalyticSteadyState> {
    let n = singles.len();
    if drive.atoms() != n || codec.atoms() != n || doubles.len() != codec.len() {
        return Err(Error::InvalidArgument("drive, mode sets and pair index disagree on the atom number".into()));
    }
    let omega = &drive.amplitudes;
    let delta = drive.detuning;

    // Per unit ground population.
    let mut u_tilde = singles.modes.tr_mul(omega);
    divide_checked(&mut u_tilde, singles.eigenvalues.iter().map(|l| l - Complex64::new(0.0, delta)))?;
    let u = &singles.modes * &u_tilde;

    let p = DVector::from_iterator(codec.len(), codec.pairs().iter().map(|&(a, b)| omega[a] * u[b] + omega[b] * u[a]));
    let mut om_tilde = doubles.modes.tr_mul(&p);
    divide_checked(&mut om_tilde, doubles.eigenvalues.iter().map(|l| l - Complex64::new(0.0, 2.0 * delta)))?;
    let om = &doubles.modes * &om_tilde;

    let a0 = 1.0 / (1.0 + u.norm_squared() + om.norm_squared());
    let s = Complex64::new(a0, 0.0);
    Ok(AnalyticSteadyState {
        v_tilde: u_tilde * s,
        w_tilde: om_tilde * s,
        v: u * s,
        w: om * s,
        a0,
        drive_ref: drive.clone(),
    })
}

/// `γ_β⁽²⁾ + 2i(Δ_β⁽²⁾ - 2Δ_α)` for every double mode.
fn pair_denominators(alpha: usize, singles: &SingleModeSet, doubles: &DoubleModeSet) -> Vec<Complex64> {
    let d = singles.delta[alpha];
    doubles.gamma.iter().zip(&doubles.delta).map(|(g, dd)| Complex64::new(*g, 2.0 * (dd - 2.0 * d))).collect()
}

fn weighted_sum(a: &DVector<Complex64>, b: &DVector<Complex64>, den: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).zip(den).map(|((x, y), d)| x * y / d).sum()
}

/// g²(0) under two-mode drive, with the sums over double modes done once.
///
/// For fixed `A` this is `γ_α² |c0 + c1 e^{iφ} + c2 e^{2iφ}|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeG2 {
    pub gamma: f64,
    pub eta: Complex64,
    /// `Σ_β X_{αβ}² / den_β`
    pub s_xx: Complex64,
    /// `Σ_β X_{αβ} X_{α̃β} / den_β`
    pub s_xx_partner: Complex64,
    /// `Σ_β X_{αβ} L_{αα̃β} / den_β`
    pub s_xl: Complex64,
}

fn check_doubles(doubles: &DoubleModeSet) -> Result<()> {
    if doubles.is_empty() {
        return Err(Error::InvalidArgument("no double-excitation manifold for a single atom".into()));
    }
    Ok(())
}

impl TwoModeG2 {
    pub fn new(
        alpha: usize,
        partner: usize,
        singles: &SingleModeSet,
        doubles: &DoubleModeSet,
        tables: &OverlapTables,
        codec: &PairIndex,
    ) -> Result<Self> {
        check_doubles(doubles)?;
        singles.check_index(alpha)?;
        singles.check_index(partner)?;
        if alpha == partner {
            return Err(Error::InvalidArgument("two-mode drive needs distinct modes".into()));
        }
        let den = pair_denominators(alpha, singles, doubles);
        let xa = tables.x_row(alpha);
        let xp = tables.x_row(partner);
        let l = overlap_l_row(alpha, partner, singles, doubles, codec)?;
        let eta = singles.gamma[alpha]
            / Complex64::new(singles.gamma[partner], 2.0 * (singles.delta[partner] - singles.delta[alpha]));
        Ok(Self {
            gamma: singles.gamma[alpha],
            eta,
            s_xx: weighted_sum(&xa, &xa, &den),
            s_xx_partner: weighted_sum(&xa, &xp, &den),
            s_xl: weighted_sum(&xa, &l, &den),
        })
    }

    /// Fourier coefficients `[c0, c1, c2]` of the amplitude in `e^{iφ}`.
    pub fn harmonics(&self, amplitude: f64) -> [Complex64; 3] {
        [self.s_xx, (1.0 + self.eta) * amplitude * self.s_xl, self.eta * amplitude * amplitude * self.s_xx_partner]
    }

    pub fn eval(&self, amplitude: f64, phase: f64) -> f64 {
        let sum = self.s_xx
            + Complex64::cis(2.0 * phase) * self.eta * (amplitude * amplitude) * self.s_xx_partner
            + Complex64::cis(phase) * (1.0 + self.eta) * amplitude * self.s_xl;
        single_mode_value(self.gamma, sum)
    }

    /// Minimum and maximum over φ, refined past the grid by golden-section search.
    pub fn phi_extrema(&self, amplitude: f64, grid: usize) -> (f64, f64) {
        let grid = grid.max(4);
        let h = std::f64::consts::TAU / grid as f64;
        let values: Vec<f64> = (0..grid).map(|k| self.eval(amplitude, k as f64 * h)).collect();
        let refine = |sign: f64| {
            let best = (0..grid).min_by(|&a, &b| (sign * values[a]).total_cmp(&(sign * values[b]))).unwrap_or(0);
            let centre = best as f64 * h;
            let x = golden_section(|p| sign * self.eval(amplitude, p), centre - h, centre + h);
            (sign * values[best]).min(sign * self.eval(amplitude, x)) * sign
        };
        (refine(1.0), refine(-1.0))
    }

    /// `(A, min_φ g², max_φ g²)` for every amplitude.
    pub fn envelope(&self, amplitudes: &[f64], phi_grid: usize) -> Vec<(f64, f64, f64)> {
        amplitudes
            .iter()
            .map(|&a| {
                let (lo, hi) = self.phi_extrema(a, phi_grid);
                (a, lo, hi)
            })
            .collect()
    }

    /// Global minimum and maximum over the amplitude grid and all phases.
    ///
    /// The best grid amplitude is refined within its neighbouring grid cells.
    pub fn extrema(&self, amplitudes: &[f64], phi_grid: usize) -> (f64, f64) {
        if amplitudes.is_empty() {
            return (f64::NAN, f64::NAN);
        }
        let env = self.envelope(amplitudes, phi_grid);
        let lo_a = amplitudes.first().copied().unwrap_or(0.0);
        let hi_a = amplitudes.last().copied().unwrap_or(0.0);
        let pick = |sign: f64, select: fn(&(f64, f64, f64)) -> f64| {
            let k = (0..env.len()).min_by(|&a, &b| (sign * select(&env[a])).total_cmp(&(sign * select(&env[b])))).unwrap_or(0);
            let left = if k > 0 { amplitudes[k - 1] } else { amplitudes[k] };
            let right = if k + 1 < amplitudes.len() { amplitudes[k + 1] } else { amplitudes[k] };
            let f = |a: f64| {
                let (mn, mx) = self.phi_extrema(a.clamp(lo_a.min(hi_a), hi_a.max(lo_a)), phi_grid);
                sign * if sign > 0.0 { mn } else { mx }
            };
            let a = if right > left { golden_section(f, left, right) } else { amplitudes[k] };
            sign * (sign * select(&env[k])).min(f(a))
        };
        let lo = pick(1.0, |e| e.1);
        let hi = pick(-1.0, |e| e.2);
        (lo, hi)
    }
}

/// Minimizer of a unimodal function on `[a, b]`.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn single_mode_value(gamma: f64, sum: Complex64) -> f64 {
    gamma * gamma * sum.norm_sqr()
}

/// g²(0) for drive and detection through the same single mode `α` at `δ = Δ_α`.
pub fn g2_zero_single_mode(
    alpha: usize,
    singles: &SingleModeSet,
    doubles: &DoubleModeSet,
    tables: &OverlapTables,
) -> Result<f64> {
    check_doubles(doubles)?;
    singles.check_index(alpha)?;
    let den = pair_denominators(alpha, singles, doubles);
    let xa = tables.x_row(alpha);
    Ok(single_mode_value(singles.gamma[alpha], weighted_sum(&xa, &xa, &den)))
}

/// g²(0) for the two-mode drive `Ω ∝ V_α + A e^{iφ} V_α̃`, detected in mode `α`.
#[allow(clippy::too_many_arguments)]
pub fn g2_zero_two_mode(
    alpha: usize,
    partner: usize,
    amplitude: f64,
    phase: f64,
    singles: &SingleModeSet,
    doubles: &DoubleModeSet,
    tables: &OverlapTables,
    codec: &PairIndex,
) -> Result<f64> {
    if !(amplitude >= 0.0) {
        return Err(Error::InvalidArgument(format!("relative amplitude must be non-negative, got {amplitude}")));
    }
    Ok(TwoModeG2::new(alpha, partner, singles, doubles, tables, codec)?.eval(amplitude, phase))
}
