use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::SingleModeSet;
use crate::error::{Error, Result};
use crate::geometry::{AtomArray, WAVENUMBER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetectionKind {
    /// Hermitian adjoint of the mode's raising operator: `c_j = V*_{jα}`.
    Mode { mode: usize },
    /// Bilinear dual of the mode: `c_j = V_{jα}`, so that `σ'⁻_α' σ⁺_α |g⟩ = δ_{αα'} |g⟩`.
    AdjointMode { mode: usize },
    /// Plane-wave emission along a direction: `c_j = e^{-i k·r_j}`.
    Direction { direction: [f64; 3] },
    /// All of free space through the jump kernel `2 Re G`.
    FreeSpace,
}

/// Photon detector: collective lowering operator `σ⁻ = Σ_j c_j σ⁻_j`, or free space.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOperator {
    pub kind: DetectionKind,
    coeffs: Option<DVector<Complex64>>,
}

impl DetectionOperator {
    pub fn mode(singles: &SingleModeSet, alpha: usize) -> Result<Self> {
        singles.check_index(alpha)?;
        Ok(Self { kind: DetectionKind::Mode { mode: alpha }, coeffs: Some(singles.mode(alpha).map(|z| z.conj())) })
    }

    pub fn adjoint_mode(singles: &SingleModeSet, alpha: usize) -> Result<Self> {
        singles.check_index(alpha)?;
        Ok(Self { kind: DetectionKind::AdjointMode { mode: alpha }, coeffs: Some(singles.mode(alpha)) })
    }

    pub fn direction(array: &AtomArray, direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("detection direction must be non-zero".into()));
        }
        let k = direction.map(|x| WAVENUMBER * x / norm);
        let coeffs = DVector::from_iterator(
            array.len(),
            array.positions().iter().map(|r| Complex64::cis(-(k[0] * r[0] + k[1] * r[1] + k[2] * r[2]))),
        );
        Ok(Self { kind: DetectionKind::Direction { direction }, coeffs: Some(coeffs) })
    }

    pub fn free_space() -> Self {
        Self { kind: DetectionKind::FreeSpace, coeffs: None }
    }

    /// Arbitrary lowering-operator coefficients, reported as a direction-less detector.
    pub fn from_coeffs(coeffs: DVector<Complex64>) -> Self {
        Self { kind: DetectionKind::Direction { direction: [0.0; 3] }, coeffs: Some(coeffs) }
    }

    /// `None` for free-space detection.
    pub fn coeffs(&self) -> Option<&DVector<Complex64>> {
        self.coeffs.as_ref()
    }

    pub fn is_free_space(&self) -> bool {
        self.coeffs.is_none()
    }
}
