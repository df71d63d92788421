use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde_json::json;

use crate::analytic::{analytic_steady_state, g2_zero_single_mode, TwoModeG2};
use crate::eigen::{DoubleModeSet, SingleModeSet};
use crate::error::{Error, Result};
use crate::geometry::AtomArray;
use crate::greens::GreensMatrices;
use crate::master::{
    default_step, g2_tau_from, g2_zero, g2_zero_freespace, intensity, intensity_freespace, steady_state_direct,
    DensityMatrix, DetectionKind, DetectionOperator, DirectOptions, DriveConfig, Liouvillian,
};
use crate::overlap::{overlap_l_row, OverlapTables};

use super::config::{resolve_mode, DriveSpec, GeometrySpec, RunConfig};
use super::output::{Cell, Dataset, Table};

/// Below this slowest decay rate master-path steady states come from the analytic closure.
pub const AUTO_ANALYTIC_GAMMA: f64 = 1e-3;

/// Everything derived from one geometry.
pub struct System {
    pub array: AtomArray,
    pub greens: GreensMatrices,
    pub singles: SingleModeSet,
    pub doubles: DoubleModeSet,
    pub tables: OverlapTables,
    warned: AtomicBool,
}

impl System {
    pub fn new(array: AtomArray) -> Result<Self> {
        if array.len() < 2 {
            return Err(Error::Config("at least two atoms are needed".into()));
        }
        let greens = GreensMatrices::new(&array);
        let singles = SingleModeSet::new(&greens)?;
        let doubles = DoubleModeSet::new(&greens)?;
        let tables = OverlapTables::new(&singles, &doubles, &greens.codec)?;
        Ok(Self { array, greens, singles, doubles, tables, warned: AtomicBool::new(false) })
    }

    pub fn from_spec(spec: &GeometrySpec) -> Result<Self> {
        Self::new(spec.build()?)
    }

    pub fn slowest_gamma(&self) -> f64 {
        self.singles.gamma.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn drive(&self, spec: &DriveSpec) -> Result<DriveConfig> {
        let n = self.singles.len();
        match *spec {
            DriveSpec::PlaneWave { omega0, direction, detuning } => {
                DriveConfig::plane_wave(&self.array, &self.singles, omega0, direction, detuning)
            }
            DriveSpec::Eigenmode { omega0, mode } => DriveConfig::eigenmode(&self.singles, resolve_mode(mode, n)?, omega0),
            DriveSpec::TwoMode { omega0, mode, partner, amplitude, phase } => DriveConfig::two_mode(
                &self.singles,
                resolve_mode(mode, n)?,
                resolve_mode(partner, n)?,
                omega0,
                amplitude,
                phase,
            ),
        }
    }

    pub fn detector(&self, kind: &DetectionKind) -> Result<DetectionOperator> {
        match kind {
            DetectionKind::Mode { mode } => DetectionOperator::mode(&self.singles, *mode),
            DetectionKind::AdjointMode { mode } => DetectionOperator::adjoint_mode(&self.singles, *mode),
            DetectionKind::Direction { direction } => DetectionOperator::direction(&self.array, *direction),
            DetectionKind::FreeSpace => Ok(DetectionOperator::free_space()),
        }
    }

    /// Steady state for the master path and the name of the method that produced it.
    ///
    /// The direct solver starts from the analytic closure; arrays with modes slower
    /// than [`AUTO_ANALYTIC_GAMMA`] keep the closure itself.
    pub fn master_state(&self, drive: &DriveConfig) -> Result<(DensityMatrix, &'static str)> {
        let closure = analytic_steady_state(drive, &self.singles, &self.doubles, &self.greens.codec)?.density_matrix();
        if self.slowest_gamma() < AUTO_ANALYTIC_GAMMA {
            if !self.warned.swap(true, Ordering::Relaxed) {
                log::warn!(
                    "slowest decay rate {:.3e} is below {AUTO_ANALYTIC_GAMMA:e}; using the analytic steady state",
                    self.slowest_gamma()
                );
            }
            return Ok((closure, "analytic"));
        }
        let liou = Liouvillian::new(&self.greens, drive)?;
        let rho = steady_state_direct(&liou, &self.singles, &self.doubles, Some(&closure), DirectOptions::default())?;
        Ok((rho, "master"))
    }
}

fn rel_diff(reference: f64, other: f64) -> f64 {
    (reference - other).abs() / reference.abs()
}

fn selected_modes(cfg: &RunConfig, n: usize) -> Result<Vec<usize>> {
    match &cfg.sweep.modes {
        Some(list) => list.iter().map(|&m| resolve_mode(m, n)).collect(),
        None => Ok((0..n).collect()),
    }
}

fn systems_over_spacings(cfg: &RunConfig) -> Result<Vec<(f64, System)>> {
    cfg.sweep
        .spacings
        .par_iter()
        .map(|&d| Ok((d, System::from_spec(&cfg.geometry.with_spacing(d)?)?)))
        .collect()
}

/// Second-photon rates of every double mode over the spacing list.
///
/// The geometry must be a lattice (square or line) so that the spacing can vary.
pub fn run_fig1(cfg: &RunConfig) -> Result<Dataset> {
    let mut table = Table::new("fig1", &["d", "beta", "gamma_beta", "zeta_beta"]);
    let mut on_line = Vec::new();
    for (d, sys) in systems_over_spacings(cfg)? {
        let ds = &sys.doubles;
        for beta in 0..ds.len() {
            table.push(vec![d.into(), beta.into(), ds.gamma[beta].into(), ds.zeta[beta].into()]);
        }
        let near = (0..ds.len()).filter(|&b| (ds.zeta[b] - ds.gamma[b] / 2.0).abs() < 0.15 * ds.gamma[b]).count();
        on_line.push(json!({"d": d, "fraction_near_half_gamma": near as f64 / ds.len() as f64}));
    }
    let mut out = Dataset::new("fig1");
    out.tables.push(table);
    out.meta("line_fraction", on_line);
    Ok(out)
}

/// Overlap magnitudes against the decay-rate mismatch for a single geometry.
pub fn run_fig2(cfg: &RunConfig) -> Result<Dataset> {
    let sys = System::from_spec(&cfg.geometry)?;
    let modes = selected_modes(cfg, sys.singles.len())?;
    let (sg, dg) = (&sys.singles.gamma, &sys.doubles.gamma);

    let mut x = Table::new("fig2_x", &["alpha", "beta", "mismatch", "abs_x"]);
    let mut peak = (f64::NEG_INFINITY, 0.0);
    for &a in &modes {
        for (b, gb) in dg.iter().enumerate() {
            let mismatch = gb - 2.0 * sg[a];
            let abs = sys.tables.x(a, b).norm();
            if abs > peak.0 {
                peak = (abs, mismatch);
            }
            x.push(vec![a.into(), b.into(), mismatch.into(), abs.into()]);
        }
    }

    let pairs: Vec<(usize, usize)> =
        modes.iter().enumerate().flat_map(|(i, &a1)| modes[i + 1..].iter().map(move |&a2| (a1, a2))).collect();
    let rows: Vec<Vec<Vec<Cell>>> = pairs
        .par_iter()
        .map(|&(a1, a2)| {
            let l = overlap_l_row(a1, a2, &sys.singles, &sys.doubles, &sys.greens.codec)?;
            Ok((0..sys.doubles.len())
                .map(|b| vec![a1.into(), a2.into(), b.into(), (dg[b] - sg[a1] - sg[a2]).into(), l[b].norm().into()])
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut l = Table::new("fig2_l", &["alpha1", "alpha2", "beta", "mismatch", "abs_l"]);
    rows.into_iter().flatten().for_each(|r| l.push(r));

    let mut out = Dataset::new("fig2");
    out.tables.extend([x, l]);
    out.meta("peak_abs_x", peak.0);
    out.meta("peak_mismatch", peak.1);
    Ok(out)
}

/// Same-mode and free-space g²(0) under single-eigenmode drive, per spacing and mode.
pub fn run_fig3(cfg: &RunConfig) -> Result<Dataset> {
    let method = cfg.method;
    let mut columns = vec!["d", "alpha", "gamma_alpha", "g2_same_mode", "g2_free_space"];
    if method.master() {
        columns.push("steady_state");
    }
    if matches!(method, super::Method::Both) {
        columns.extend(["g2_same_mode_master", "g2_free_space_master", "rel_diff_same_mode", "rel_diff_free_space"]);
    }
    let mut table = Table::new("fig3", &columns);
    let systems = systems_over_spacings(cfg)?;
    let mut atoms = None;
    for (d, sys) in &systems {
        atoms = Some(sys.singles.len());
        let modes = selected_modes(cfg, sys.singles.len())?;
        let rows: Vec<Vec<Cell>> = modes
            .par_iter()
            .map(|&a| {
                let gamma = sys.singles.gamma[a];
                let drive = DriveConfig::eigenmode(&sys.singles, a, cfg.sweep.relative_drive * gamma)?;
                let same = sys.detector(&DetectionKind::AdjointMode { mode: a })?;
                let mut row: Vec<Cell> = vec![(*d).into(), a.into(), gamma.into()];
                let analytic = if method.analytic() {
                    let closure =
                        analytic_steady_state(&drive, &sys.singles, &sys.doubles, &sys.greens.codec)?.density_matrix();
                    Some((
                        g2_zero_single_mode(a, &sys.singles, &sys.doubles, &sys.tables)?,
                        g2_zero_freespace(&closure, &sys.greens)?,
                    ))
                } else {
                    None
                };
                let master = if method.master() {
                    let (rho, source) = sys.master_state(&drive)?;
                    Some((g2_zero(&rho, &same, &same)?, g2_zero_freespace(&rho, &sys.greens)?, source))
                } else {
                    None
                };
                match (analytic, master) {
                    (Some((s, f)), None) => row.extend([s.into(), f.into()]),
                    (None, Some((s, f, src))) => row.extend([s.into(), f.into(), src.into()]),
                    (Some((s, f)), Some((sm, fm, src))) => row.extend([
                        s.into(),
                        f.into(),
                        src.into(),
                        sm.into(),
                        fm.into(),
                        rel_diff(s, sm).into(),
                        rel_diff(f, fm).into(),
                    ]),
                    (None, None) => unreachable!("every method has a path"),
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        rows.into_iter().for_each(|r| table.push(r));
    }
    let mut out = Dataset::new("fig3");
    out.tables.push(table);
    let n = match atoms {
        Some(n) => n,
        None => cfg.geometry.atoms()?,
    };
    out.meta("uncorrelated_reference", 1.0 - 1.0 / n as f64);
    out.meta("relative_drive", cfg.sweep.relative_drive);
    Ok(out)
}

/// Modes, drive scale and amplitude for the two-mode runs.
fn two_mode_setup(cfg: &RunConfig, sys: &System) -> Result<(usize, usize, f64)> {
    let n = sys.singles.len();
    let (alpha, partner, omega0) = match cfg.drive {
        DriveSpec::TwoMode { omega0, mode, partner, .. } => (resolve_mode(mode, n)?, resolve_mode(partner, n)?, Some(omega0)),
        _ => (sys.singles.most_superradiant(), sys.singles.most_subradiant(), None),
    };
    if alpha == partner {
        return Err(Error::Config("two-mode drive needs distinct modes".into()));
    }
    let slow = sys.singles.gamma[alpha].min(sys.singles.gamma[partner]);
    Ok((alpha, partner, omega0.unwrap_or(cfg.sweep.relative_drive * slow)))
}

/// Two-mode drive detected in one mode: g²(0) against φ and the envelope against A.
pub fn run_fig4(cfg: &RunConfig) -> Result<Dataset> {
    let sys = System::from_spec(&cfg.geometry)?;
    let (alpha, partner, omega0) = two_mode_setup(cfg, &sys)?;
    let g2 = TwoModeG2::new(alpha, partner, &sys.singles, &sys.doubles, &sys.tables, &sys.greens.codec)?;
    let phis = cfg.sweep.phi_grid();
    let method = cfg.method;

    let mut columns = vec!["phi_over_pi", "A"];
    if method.analytic() {
        columns.push("g2_zero");
    }
    if method.master() {
        columns.extend(["g2_zero_master", "steady_state"]);
    }
    if matches!(method, super::Method::Both) {
        columns.push("rel_diff");
    }
    let det = sys.detector(&DetectionKind::AdjointMode { mode: alpha })?;
    let points: Vec<(f64, f64)> =
        cfg.sweep.fixed_amplitudes.iter().flat_map(|&a| phis.iter().map(move |&p| (a, p))).collect();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(amp, phi)| {
            let mut row: Vec<Cell> = vec![(phi / std::f64::consts::PI).into(), amp.into()];
            let analytic = g2.eval(amp, phi);
            if method.analytic() {
                row.push(analytic.into());
            }
            if method.master() {
                let drive = DriveConfig::two_mode(&sys.singles, alpha, partner, omega0, amp, phi)?;
                let (rho, source) = sys.master_state(&drive)?;
                let m = g2_zero(&rho, &det, &det)?;
                row.extend([m.into(), source.into()]);
                if method.analytic() {
                    row.push(rel_diff(analytic, m).into());
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut curves = Table::new("fig4a", &columns);
    rows.into_iter().for_each(|r| curves.push(r));

    let amps = cfg.sweep.amplitude_grid();
    let mut envelope = Table::new("fig4b", &["A", "g2_min", "g2_max"]);
    for (a, lo, hi) in g2.envelope(&amps, cfg.sweep.phi_steps) {
        envelope.push(vec![a.into(), lo.into(), hi.into()]);
    }
    let (lo, hi) = g2.extrema(&amps, cfg.sweep.phi_steps);

    let mut out = Dataset::new("fig4");
    out.tables.extend([curves, envelope]);
    out.meta("alpha", alpha);
    out.meta("partner", partner);
    out.meta("gamma_alpha", sys.singles.gamma[alpha]);
    out.meta("gamma_partner", sys.singles.gamma[partner]);
    out.meta("g2_min", lo);
    out.meta("g2_max", hi);
    if method.master() {
        out.meta("omega0", omega0);
    }
    Ok(out)
}

fn default_detector(spec: &DriveSpec, n: usize) -> Result<DetectionKind> {
    Ok(match *spec {
        DriveSpec::PlaneWave { direction, .. } => DetectionKind::Direction { direction },
        DriveSpec::Eigenmode { mode, .. } | DriveSpec::TwoMode { mode, .. } => {
            DetectionKind::AdjointMode { mode: resolve_mode(mode, n)? }
        }
    })
}

/// g²(τ) for the configured drive and detectors.
///
/// The steady state comes from the analytic closure under `analytic`, from the
/// master equation under `master`, and `both` reports the two side by side.
pub fn run_g2tau(cfg: &RunConfig) -> Result<Dataset> {
    let taus = &cfg.sweep.taus;
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("delays must be strictly ascending".into()));
    }
    let sys = System::from_spec(&cfg.geometry)?;
    let drive = sys.drive(&cfg.drive)?;
    let first_kind = match &cfg.detector {
        Some(k) => k.clone(),
        None => default_detector(&cfg.drive, sys.singles.len())?,
    };
    let second_kind = cfg.second_detector.clone().unwrap_or_else(|| first_kind.clone());
    let first = sys.detector(&first_kind)?;
    let second = sys.detector(&second_kind)?;
    let free = first.is_free_space() || second.is_free_space();
    if free && !(first.is_free_space() && second.is_free_space()) {
        return Err(Error::Config("free-space detection cannot be mixed with a mode detector".into()));
    }
    if free && taus.iter().any(|&t| t != 0.0) {
        return Err(Error::Config("free-space correlations are only available at zero delay".into()));
    }

    let liou = Liouvillian::new(&sys.greens, &drive)?;
    let dt = cfg.integrator.dt.unwrap_or_else(|| default_step(&sys.doubles));
    let curve = |rho: &DensityMatrix| -> Result<Vec<f64>> {
        if free {
            let g = g2_zero_freespace(rho, &sys.greens)?;
            return Ok(vec![g; taus.len()]);
        }
        g2_tau_from(rho, &liou, &first, &second, taus, dt)
    };
    let closure = analytic_steady_state(&drive, &sys.singles, &sys.doubles, &sys.greens.codec)?.density_matrix();
    let analytic = if cfg.method.analytic() { Some(curve(&closure)?) } else { None };
    let master = if cfg.method.master() {
        let (rho, source) = sys.master_state(&drive)?;
        Some((curve(&rho)?, source, rho))
    } else {
        None
    };

    let mut columns = vec!["tau"];
    if analytic.is_some() {
        columns.push("g2");
    }
    if master.is_some() {
        columns.push("g2_master");
    }
    if analytic.is_some() && master.is_some() {
        columns.push("rel_diff");
    }
    let mut table = Table::new("g2tau", &columns);
    for (k, &tau) in taus.iter().enumerate() {
        let mut row: Vec<Cell> = vec![tau.into()];
        if let Some(a) = &analytic {
            row.push(a[k].into());
        }
        if let Some((m, _, _)) = &master {
            row.push(m[k].into());
            if let Some(a) = &analytic {
                row.push(rel_diff(a[k], m[k]).into());
            }
        }
        table.push(row);
    }

    let reference = master.as_ref().map(|(_, _, rho)| rho).unwrap_or(&closure);
    let rate = if free { intensity_freespace(reference, &sys.greens)? } else { intensity(reference, &first)? };
    let mut out = Dataset::new("g2tau");
    out.tables.push(table);
    out.meta("first_detector", &first_kind);
    out.meta("second_detector", &second_kind);
    out.meta("detuning", drive.detuning);
    out.meta("max_rabi", drive.max_rabi());
    out.meta("steady_state_intensity", rate);
    out.meta("dt", dt);
    if let Some((_, source, _)) = &master {
        out.meta("steady_state", source);
        out.meta("direct_tol", DirectOptions::default().tol);
    }
    Ok(out)
}

/// Decay rates and shifts of the single and double modes.
pub fn run_modes(cfg: &RunConfig) -> Result<Dataset> {
    let sys = System::from_spec(&cfg.geometry)?;
    let mut singles = Table::new("modes_single", &["alpha", "gamma", "delta"]);
    for a in 0..sys.singles.len() {
        singles.push(vec![a.into(), sys.singles.gamma[a].into(), sys.singles.delta[a].into()]);
    }
    let ds = &sys.doubles;
    let mut doubles = Table::new("modes_double", &["beta", "gamma", "delta", "zeta"]);
    for b in 0..ds.len() {
        doubles.push(vec![b.into(), ds.gamma[b].into(), ds.delta[b].into(), ds.zeta[b].into()]);
    }
    let mut out = Dataset::new("modes");
    out.tables.extend([singles, doubles]);
    out.meta("atoms", sys.array.len());
    out.meta("min_distance", sys.array.min_distance());
    Ok(out)
}

/// The single-to-double overlap table `X_{αβ}` for the selected single modes.
pub fn run_overlaps(cfg: &RunConfig) -> Result<Dataset> {
    let sys = System::from_spec(&cfg.geometry)?;
    let mut table = Table::new("overlaps_x", &["alpha", "beta", "re", "im", "abs"]);
    for a in selected_modes(cfg, sys.singles.len())? {
        for b in 0..sys.doubles.len() {
            let x = sys.tables.x(a, b);
            table.push(vec![a.into(), b.into(), x.re.into(), x.im.into(), x.norm().into()]);
        }
    }
    let mut out = Dataset::new("overlaps");
    out.tables.push(table);
    Ok(out)
}
