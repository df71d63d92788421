use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::SingleModeSet;
use crate::error::{Error, Result};
use crate::geometry::{AtomArray, WAVENUMBER};

/// Default low-intensity guard: `|Ω0| ≤ LOW_INTENSITY_GUARD · min γ` over driven modes.
pub const LOW_INTENSITY_GUARD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveKind {
    PlaneWave { omega0: f64, k0: [f64; 3] },
    Eigenmode { omega0: f64, mode: usize },
    TwoMode { omega0: f64, mode: usize, partner: usize, amplitude: f64, phase: f64 },
    Custom,
}

/// Coherent drive: per-atom Rabi frequencies `Ω_j` and laser detuning `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveConfig {
    pub amplitudes: DVector<Complex64>,
    pub detuning: f64,
    pub kind: DriveKind,
}

fn guard(omega0: f64, gamma: f64) -> Result<()> {
    let limit = LOW_INTENSITY_GUARD * gamma;
    if omega0.abs() > limit {
        return Err(Error::DriveTooStrong { omega0: omega0.abs(), limit });
    }
    Ok(())
}

impl DriveConfig {
    /// `Ω_j = Ω0 e^{i k0·r_j}` with `k0 = 2π · direction/|direction|`.
    ///
    /// A plane wave addresses every mode, so the guard uses the slowest one.
    pub fn plane_wave(array: &AtomArray, singles: &SingleModeSet, omega0: f64, direction: [f64; 3], detuning: f64) -> Result<Self> {
        let slowest = singles.gamma.iter().copied().fold(f64::INFINITY, f64::min);
        guard(omega0, slowest)?;
        Self::plane_wave_unguarded(array, omega0, direction, detuning)
    }

    pub fn plane_wave_unguarded(array: &AtomArray, omega0: f64, direction: [f64; 3], detuning: f64) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("plane-wave direction must be non-zero".into()));
        }
        let k0 = direction.map(|x| WAVENUMBER * x / norm);
        let amplitudes = DVector::from_iterator(
            array.len(),
            array.positions().iter().map(|r| omega0 * Complex64::cis(k0[0] * r[0] + k0[1] * r[1] + k0[2] * r[2])),
        );
        Ok(Self { amplitudes, detuning, kind: DriveKind::PlaneWave { omega0, k0 } })
    }

    /// `Ω_j = Ω0 V_{jα}` tuned to the mode's line shift, `δ = Δ_α`.
    pub fn eigenmode(singles: &SingleModeSet, alpha: usize, omega0: f64) -> Result<Self> {
        singles.check_index(alpha)?;
        guard(omega0, singles.gamma[alpha])?;
        Ok(Self {
            amplitudes: singles.mode(alpha) * Complex64::new(omega0, 0.0),
            detuning: singles.delta[alpha],
            kind: DriveKind::Eigenmode { omega0, mode: alpha },
        })
    }

    /// `Ω_j = Ω0 (V_{jα} + A e^{iφ} V_{jα̃})` with `δ = Δ_α`, the detected mode's shift.
    pub fn two_mode(singles: &SingleModeSet, alpha: usize, partner: usize, omega0: f64, amplitude: f64, phase: f64) -> Result<Self> {
        singles.check_index(alpha)?;
        singles.check_index(partner)?;
        if alpha == partner {
            return Err(Error::InvalidArgument("two-mode drive needs distinct modes".into()));
        }
        if !(amplitude >= 0.0) {
            return Err(Error::InvalidArgument(format!("relative amplitude must be non-negative, got {amplitude}")));
        }
        guard(omega0, singles.gamma[alpha].min(singles.gamma[partner]))?;
        let mix = Complex64::from_polar(amplitude, phase);
        let amplitudes = (singles.mode(alpha) + singles.mode(partner) * mix) * Complex64::new(omega0, 0.0);
        Ok(Self {
            amplitudes,
            detuning: singles.delta[alpha],
            kind: DriveKind::TwoMode { omega0, mode: alpha, partner, amplitude, phase },
        })
    }

    /// Arbitrary amplitudes; no intensity guard is applied.
    pub fn custom(amplitudes: DVector<Complex64>, detuning: f64) -> Self {
        Self { amplitudes, detuning, kind: DriveKind::Custom }
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn atoms(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn max_rabi(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
