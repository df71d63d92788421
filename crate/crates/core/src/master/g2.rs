//! Photon counting: intensities, conditional post-detection states and g²(τ).
//!
//! g²(τ) is normalized by the product of the two detectors' steady-state
//! intensities, so that uncorrelated emission gives 1 at every delay.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::GreensMatrices;

use super::detection::DetectionOperator;
use super::drive::DriveConfig;
use super::evolve::{evolve_sampled, steady_state_with, SteadyStateOptions};
use super::liouvillian::Liouvillian;
use super::state::DensityMatrix;

fn coefficients(det: &DetectionOperator, atoms: usize) -> Result<&DVector<Complex64>> {
    let c = det
        .coeffs()
        .ok_or_else(|| Error::InvalidArgument("free-space detection has no single collective mode".into()))?;
    if c.len() != atoms {
        return Err(Error::InvalidArgument(format!("detector has {} coefficients for {atoms} atoms", c.len())));
    }
    Ok(c)
}

/// `C_{kμ} = ⟨e_k|σ⁻|ee_μ⟩`: the coefficient of the atom in `μ` other than `k`.
fn lowering_map(c: &DVector<Complex64>, rho: &DensityMatrix) -> DMatrix<Complex64> {
    let n = rho.atoms();
    let codec = crate::geometry::PairIndex::new(n);
    let mut out = DMatrix::zeros(n, rho.pairs());
    for (mu, &(a, b)) in codec.pairs().iter().enumerate() {
        out[(a, mu)] = c[b];
        out[(b, mu)] = c[a];
    }
    out
}

/// Detected intensity `⟨σ⁺σ⁻⟩` for a collective-mode detector.
pub fn intensity(rho: &DensityMatrix, det: &DetectionOperator) -> Result<f64> {
    let c = coefficients(det, rho.atoms())?;
    let single = (c.transpose() * &rho.rho1 * c.map(|z| z.conj()))[(0, 0)].re;
    if rho.pairs() == 0 {
        return Ok(single);
    }
    let cm = lowering_map(c, rho);
    Ok(single + (&cm * &rho.rho2 * cm.adjoint()).trace().re)
}

/// Total emitted intensity `Σ_ij D_ij ⟨σ⁺_j σ⁻_i⟩`.
pub fn intensity_freespace(rho: &DensityMatrix, greens: &GreensMatrices) -> Result<f64> {
    rho.check_shape(greens.atoms())?;
    let d = greens.decay_kernel();
    let n = rho.atoms();
    let codec = &greens.codec;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = rho.rho1[(i, j)];
            for k in (0..n).filter(|&k| k != i && k != j) {
                acc += rho.rho2[(codec.index_unordered(i, k), codec.index_unordered(j, k))];
            }
            total += d[(i, j)] * acc.re;
        }
    }
    Ok(total)
}

/// Conditional state after one detection, `σ⁻ρσ⁺ / ⟨σ⁺σ⁻⟩`, and the detection rate.
///
/// One jump moves the double manifold into the single one and the single into
/// the ground state, so the result has no double-manifold content.
pub fn project_photon(rho: &DensityMatrix, det: &DetectionOperator) -> Result<(DensityMatrix, f64)> {
    let c = coefficients(det, rho.atoms())?;
    let rate = intensity(rho, det)?;
    if !(rate > 0.0) {
        return Err(Error::NoEmission(rate));
    }
    let n = rho.atoms();
    let cc = c.map(|z| z.conj());
    let mut out = DensityMatrix::zeros(n);
    out.a0 = (c.transpose() * &rho.rho1 * &cc)[(0, 0)].re / rate;
    if rho.pairs() > 0 {
        let cm = lowering_map(c, rho);
        let scale = Complex64::new(1.0 / rate, 0.0);
        // Σ_j s_{jμ} c*_j for every μ
        let sc = rho.s.tr_mul(&cc);
        out.v = &cm * sc * scale;
        out.rho1 = &cm * &rho.rho2 * cm.adjoint() * scale;
    }
    Ok((out, rate))
}

/// Zero-delay correlation between two collective-mode detectors.
pub fn g2_zero(rho: &DensityMatrix, first: &DetectionOperator, second: &DetectionOperator) -> Result<f64> {
    let n = rho.atoms();
    let c1 = coefficients(first, n)?;
    let c2 = coefficients(second, n)?;
    let i1 = intensity(rho, first)?;
    let i2 = intensity(rho, second)?;
    if !(i1 > 0.0) || !(i2 > 0.0) {
        return Err(Error::NoEmission(i1.min(i2)));
    }
    if rho.pairs() == 0 {
        return Ok(0.0);
    }
    let codec = crate::geometry::PairIndex::new(n);
    // ⟨g|σ⁻₂σ⁻₁|ee_μ⟩
    let q = DVector::from_iterator(codec.len(), codec.pairs().iter().map(|&(a, b)| c1[a] * c2[b] + c1[b] * c2[a]));
    let num = (q.transpose() * &rho.rho2 * q.map(|z| z.conj()))[(0, 0)].re;
    Ok(num / (i1 * i2))
}

/// Zero-delay correlation of light emitted into all of free space.
pub fn g2_zero_freespace(rho: &DensityMatrix, greens: &GreensMatrices) -> Result<f64> {
    let intensity = intensity_freespace(rho, greens)?;
    if !(intensity > 0.0) {
        return Err(Error::NoEmission(intensity));
    }
    let d = greens.decay_kernel();
    let pairs = greens.codec.pairs();
    let mut num = 0.0;
    for (mu, &(a, b)) in pairs.iter().enumerate() {
        for (nu, &(c, e)) in pairs.iter().enumerate() {
            let k = 2.0 * (d[(a, c)] * d[(b, e)] + d[(a, e)] * d[(b, c)]);
            num += k * rho.rho2[(mu, nu)].re;
        }
    }
    Ok(num / (intensity * intensity))
}

/// g²(τ) from a known steady state.
///
/// `taus` must be ascending and non-negative; `dt` is the integration step for the
/// conditional evolution.
pub fn g2_tau_from(
    steady: &DensityMatrix,
    liou: &Liouvillian,
    first: &DetectionOperator,
    second: &DetectionOperator,
    taus: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    let norm = intensity(steady, second)?;
    if !(norm > 0.0) {
        return Err(Error::NoEmission(norm));
    }
    let (projected, _) = project_photon(steady, first)?;
    evolve_sampled(&projected, liou, taus, dt)?
        .iter()
        .map(|r| Ok(intensity(r, second)? / norm))
        .collect()
}

/// g²(τ) for a drive: reaches the steady state by evolution and then applies [`g2_tau_from`].
pub fn g2_tau(
    drive: &DriveConfig,
    greens: &GreensMatrices,
    first: &DetectionOperator,
    second: &DetectionOperator,
    taus: &[f64],
    dt: f64,
    opts: SteadyStateOptions,
) -> Result<Vec<f64>> {
    if first.is_free_space() || second.is_free_space() {
        return Err(Error::InvalidArgument("free-space correlations are only available at zero delay".into()));
    }
    let liou = Liouvillian::new(greens, drive)?;
    let steady = steady_state_with(&liou, None, opts)?;
    g2_tau_from(&steady, &liou, first, second, taus, dt)
}
