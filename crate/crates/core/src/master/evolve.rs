use crate::eigen::DoubleModeSet;
use crate::error::{Error, Result};
use crate::greens::GreensMatrices;

use super::drive::DriveConfig;
use super::liouvillian::Liouvillian;
use super::state::DensityMatrix;

const TRACE_DRIFT_LIMIT: f64 = 1e-6;
const NEGATIVE_A0_LIMIT: f64 = -1e-9;
/// Equilibration times beyond this are reported as impractical for evolution.
const SLOW_EQUILIBRATION: f64 = 1e5;

/// Default transient step, `0.01 / max γ⁽²⁾`.
pub fn default_step(doubles: &DoubleModeSet) -> f64 {
    let fastest = doubles.gamma.iter().copied().fold(2.0, f64::max);
    0.01 / fastest
}

fn rk4_step(liou: &Liouvillian, rho: &DensityMatrix, dt: f64) -> DensityMatrix {
    let k1 = liou.apply(rho);
    let mut tmp = rho.clone();
    tmp.axpy(0.5 * dt, &k1);
    let k2 = liou.apply(&tmp);
    tmp = rho.clone();
    tmp.axpy(0.5 * dt, &k2);
    let k3 = liou.apply(&tmp);
    tmp = rho.clone();
    tmp.axpy(dt, &k3);
    let k4 = liou.apply(&tmp);
    let mut out = rho.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    out
}

fn check_step(rho: &DensityMatrix, trace0: f64, time: f64, dt: f64) -> Result<()> {
    if !rho.is_finite() {
        return Err(Error::StepSize { time, dt, reason: "non-finite state".into() });
    }
    let drift = (rho.trace() - trace0).abs();
    if drift > TRACE_DRIFT_LIMIT * trace0.abs().max(1.0) {
        return Err(Error::StepSize { time, dt, reason: format!("trace drift {drift:.3e}") });
    }
    if rho.a0 < NEGATIVE_A0_LIMIT {
        return Err(Error::StepSize { time, dt, reason: format!("ground population {:.3e} < 0", rho.a0) });
    }
    Ok(())
}

/// Fixed-step RK4 from `rho0` to each time in `times` (ascending, starting at 0).
///
/// The last step before each sample is shortened to land on it exactly.
pub fn evolve_sampled(rho0: &DensityMatrix, liou: &Liouvillian, times: &[f64], dt: f64) -> Result<Vec<DensityMatrix>> {
    rho0.check_shape(liou.atoms())?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {dt}")));
    }
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("sample times must be finite, non-negative and ascending".into()));
    }
    let trace0 = rho0.trace();
    let mut rho = rho0.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while target - t > 1e-12 * dt {
            let h = dt.min(target - t);
            rho = rk4_step(liou, &rho, h);
            t += h;
            check_step(&rho, trace0, t, h)?;
        }
        t = target;
        out.push(rho.clone());
    }
    Ok(out)
}

pub fn evolve_with(rho0: &DensityMatrix, liou: &Liouvillian, t_end: f64, dt: f64) -> Result<DensityMatrix> {
    Ok(evolve_sampled(rho0, liou, &[t_end], dt)?.pop().expect("one sample"))
}

/// Evolve `rho0` under `drive` for a time `t_end` (units of 1/Γ).
pub fn evolve(rho0: &DensityMatrix, drive: &DriveConfig, greens: &GreensMatrices, t_end: f64, dt: f64) -> Result<DensityMatrix> {
    evolve_with(rho0, &Liouvillian::new(greens, drive)?, t_end, dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateOptions {
    /// Relative residual target per block.
    pub tol: f64,
    /// Integration step; `None` picks one from the spectral bound of the generator.
    pub dt: Option<f64>,
    /// Give up after this much simulated time (units of 1/Γ).
    pub max_time: f64,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self { tol: 1e-10, dt: None, max_time: 1e6 }
    }
}

/// Largest relative block residual `‖(dρ/dt)_B‖ / (γ_min ‖ρ_B‖)`.
///
/// Dividing by the slowest rate turns a rate into an estimate of the
/// remaining relative distance to the fixed point.
pub fn relative_residual(liou: &Liouvillian, rho: &DensityMatrix) -> f64 {
    let d = liou.apply(rho).block_norms();
    let b = rho.block_norms();
    let gamma = liou.slowest_gamma().max(1e-300);
    d.iter()
        .zip(b.iter())
        .filter(|(dn, _)| **dn > 0.0)
        .map(|(dn, bn)| dn / (gamma * bn.max(1e-300)))
        .fold(0.0, f64::max)
}

/// Steady state by RK4 evolution from `initial` (ground state by default).
///
/// The fixed point of RK4 coincides with the fixed point of the generator, so the
/// step only needs to be stable, not accurate.
pub fn steady_state_with(liou: &Liouvillian, initial: Option<&DensityMatrix>, opts: SteadyStateOptions) -> Result<DensityMatrix> {
    let n = liou.atoms();
    let mut rho = match initial {
        Some(r) => {
            r.check_shape(n)?;
            r.clone()
        }
        None => DensityMatrix::ground(n),
    };
    if liou.drive_amplitudes().iter().all(|z| z.norm() == 0.0) && initial.is_none() {
        return Ok(rho);
    }
    let gamma = liou.slowest_gamma();
    if 1.0 / gamma > SLOW_EQUILIBRATION {
        log::warn!("slowest mode decays at {gamma:.3e}; evolution to steady state will be slow, the analytic path is recommended");
    }
    let dt = opts.dt.unwrap_or(1.5 / liou.rate_bound().max(1e-12));
    let trace0 = rho.trace();
    let check_every = ((0.05 / (gamma * dt)).ceil() as usize).clamp(1, 1000);
    let mut t = 0.0;
    let mut step = 0usize;
    let mut residual = f64::INFINITY;
    while t < opts.max_time {
        rho = rk4_step(liou, &rho, dt);
        t += dt;
        step += 1;
        check_step(&rho, trace0, t, dt)?;
        if step.is_multiple_of(check_every) {
            residual = relative_residual(liou, &rho);
            if residual < opts.tol {
                return Ok(rho);
            }
        }
    }
    Err(Error::Convergence { time: t, residual, slowest_gamma: gamma })
}

/// Steady state reached from the ground state.
pub fn steady_state(drive: &DriveConfig, greens: &GreensMatrices, opts: SteadyStateOptions) -> Result<DensityMatrix> {
    steady_state_with(&Liouvillian::new(greens, drive)?, None, opts)
}
