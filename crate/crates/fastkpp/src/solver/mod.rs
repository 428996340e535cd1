//! Explicit conservative finite-volume solver for the radial equation
//! `u_t = r^{1-N} (r^{N-1} |(u^m)_r|^{p-2} (u^m)_r)_r + f(u)`
//! with regularized flux, effective-diffusivity CFL stepping, and Strang
//! diffusion-reaction-diffusion splitting.

pub mod grid;

use crate::error::{Error, Result};
use crate::field::AnalyticField;
use crate::params::{DiffusionParams, ReactionKind, ReactionSpec};
pub use grid::{build_grid, GridMode, GridSpec, RadialGrid};

#[derive(Debug, Clone)]
pub enum ReactionMode {
    None,
    Linearized { rate: f64 },
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorMode {
    /// Diffuse `u^m` with gradient power p.
    DoublyNonlinear,
    /// Diffuse `u` itself with gradient power p.
    PLaplacian,
}

#[derive(Debug, Clone)]
pub enum OuterBc {
    HomogeneousNeumann,
    DirichletFromField(AnalyticField),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub params: DiffusionParams,
    pub reaction: ReactionSpec,
    /// Flux regularization epsilon; also floors the CFL diffusivity factors.
    pub eps_reg: f64,
    pub cfl_safety: f64,
    pub t_end: f64,
    /// Sorted snapshot times within [0, t_end].
    pub snapshot_times: Vec<f64>,
    pub reaction_mode: ReactionMode,
    pub operator_mode: OperatorMode,
    pub outer_bc: OuterBc,
    /// Boundary alarm threshold under the Neumann condition.
    pub boundary_alarm: f64,
    pub max_steps: u64,
}

impl SolverConfig {
    pub fn new(params: DiffusionParams, reaction: ReactionSpec, t_end: f64) -> Self {
        Self {
            params,
            reaction,
            eps_reg: 1e-8,
            cfl_safety: 0.4,
            t_end,
            snapshot_times: vec![t_end],
            reaction_mode: ReactionMode::None,
            operator_mode: OperatorMode::DoublyNonlinear,
            outer_bc: OuterBc::HomogeneousNeumann,
            boundary_alarm: 1e-6,
            max_steps: 200_000_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps_reg > 0.0) {
            return Err(Error::ParameterDomain("eps_reg must be positive".into()));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::ParameterDomain("cfl_safety must lie in (0, 1]".into()));
        }
        if !self.snapshot_times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::ParameterDomain("snapshot times must be strictly increasing".into()));
        }
        if let (Some(&first), Some(&last)) =
            (self.snapshot_times.first(), self.snapshot_times.last())
        {
            if first < 0.0 || last > self.t_end + 1e-12 {
                return Err(Error::ParameterDomain(
                    "snapshot times must lie within [0, t_end]".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RadialState {
    pub t: f64,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Diagnostics {
    /// (t, mass) at each snapshot.
    pub mass_history: Vec<(f64, f64)>,
    /// (t, dt) sampled at each snapshot.
    pub dt_history: Vec<(f64, f64)>,
    /// (t, outermost cell value) at each snapshot.
    pub boundary_max_history: Vec<(f64, f64)>,
    pub clip_events: u64,
    pub boundary_alarm_fired: bool,
    pub steps: u64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RunResult {
    pub snapshots: Vec<RadialState>,
    pub diagnostics: Diagnostics,
}

/// Regularized face flux `r^{N-1} Phi(s)` with `s = (w_r - w_l)/dr` and
/// `Phi(s) = (s^2 + eps^2)^{(p-2)/2} s`, where `w = u^m`.
pub fn dnl_flux(
    u_left: f64,
    u_right: f64,
    r_face: f64,
    dr: f64,
    params: &DiffusionParams,
    eps_reg: f64,
) -> f64 {
    let s = (u_right.powf(params.m) - u_left.powf(params.m)) / dr;
    let phi = if params.p == 2.0 {
        s
    } else {
        (s * s + eps_reg * eps_reg).powf((params.p - 2.0) / 2.0) * s
    };
    r_face.powf(params.n() - 1.0) * phi
}

enum PowKind {
    Identity,
    Sqrt,
    General(f64),
}

impl PowKind {
    fn of(e: f64) -> Self {
        if e == 1.0 {
            PowKind::Identity
        } else if e == 0.5 {
            PowKind::Sqrt
        } else {
            PowKind::General(e)
        }
    }

    #[inline]
    fn apply(&self, x: f64) -> f64 {
        match self {
            PowKind::Identity => x,
            PowKind::Sqrt => x.sqrt(),
            PowKind::General(e) => x.powf(*e),
        }
    }
}

struct Stepper<'a> {
    grid: &'a RadialGrid,
    cfg: &'a SolverConfig,
    /// effective m: 1 for the plain p-Laplacian mode.
    m: f64,
    p: f64,
    w_pow: PowKind,
    /// per-cell `max(u, eps)^{m-1}` exponent handler
    cfl_pow: PowKind,
    /// cached face geometry: r_e^{N-1}
    face_area: Vec<f64>,
    /// center-to-center spacings per interior face
    face_dr: Vec<f64>,
    w: Vec<f64>,
    flux: Vec<f64>,
    clip_events: u64,
}

const DT_FLOOR: f64 = 1e-14;

impl<'a> Stepper<'a> {
    fn new(grid: &'a RadialGrid, cfg: &'a SolverConfig) -> Self {
        let m = match cfg.operator_mode {
            OperatorMode::DoublyNonlinear => cfg.params.m,
            OperatorMode::PLaplacian => 1.0,
        };
        let p = cfg.params.p;
        let nf = cfg.params.n();
        let n = grid.cells();
        let face_area = grid.edges.iter().map(|&r| r.powf(nf - 1.0)).collect();
        let face_dr = (1..n).map(|j| grid.centers[j] - grid.centers[j - 1]).collect();
        Self {
            grid,
            cfg,
            m,
            p,
            w_pow: PowKind::of(m),
            cfl_pow: PowKind::of(m - 1.0),
            face_area,
            face_dr,
            w: vec![0.0; n],
            flux: vec![0.0; n + 1],
            clip_events: 0,
        }
    }

    #[inline]
    fn phi(&self, s: f64, eps2: f64) -> f64 {
        if self.p == 2.0 {
            s
        } else {
            (s * s + eps2).powf((self.p - 2.0) / 2.0) * s
        }
    }

    fn fill_w(&mut self, u: &[f64]) {
        for (wi, &ui) in self.w.iter_mut().zip(u) {
            *wi = self.w_pow.apply(ui);
        }
    }

    /// CFL time step from the effective face diffusivity
    /// `Deff = m(p-1) max(u, eps)^{m-1} (s^2 + eps^2)^{(p-2)/2}`.
    fn cfl_dt(&mut self, u: &[f64], t: f64) -> Result<f64> {
        self.fill_w(u);
        let eps = self.cfg.eps_reg;
        let eps2 = eps * eps;
        let mfac = self.m * (self.p - 1.0);
        let n = self.grid.cells();
        let mut bound = f64::INFINITY;
        let mut upow_prev = self.cfl_pow.apply(u[0].max(eps));
        for j in 1..n {
            let upow = self.cfl_pow.apply(u[j].max(eps));
            let dr = self.face_dr[j - 1];
            let s = (self.w[j] - self.w[j - 1]) / dr;
            let sfac = if self.p == 2.0 { 1.0 } else { (s * s + eps2).powf((self.p - 2.0) / 2.0) };
            let deff = mfac * upow.max(upow_prev) * sfac;
            let vol = self.grid.volumes[j].min(self.grid.volumes[j - 1]);
            let b = vol * dr / (self.face_area[j] * (2.0 * deff + 1e-300));
            if b < bound {
                bound = b;
            }
            upow_prev = upow;
        }
        if let OuterBc::DirichletFromField(field) = &self.cfg.outer_bc {
            let r_edge = self.grid.r_max();
            let bc = field.eval(r_edge, t)?.max(0.0);
            let wb = self.w_pow.apply(bc);
            let dr = r_edge - self.grid.centers[n - 1];
            let s = (wb - self.w[n - 1]) / dr;
            let sfac = if self.p == 2.0 { 1.0 } else { (s * s + eps2).powf((self.p - 2.0) / 2.0) };
            let upow = self.cfl_pow.apply(bc.max(eps)).max(self.cfl_pow.apply(u[n - 1].max(eps)));
            let deff = mfac * upow * sfac;
            let b = self.grid.volumes[n - 1] * dr / (self.face_area[n] * (2.0 * deff + 1e-300));
            if b < bound {
                bound = b;
            }
        }
        Ok(self.cfg.cfl_safety * bound)
    }

    /// One explicit diffusion sweep over `dt`.
    fn diffuse(&mut self, u: &mut [f64], dt: f64, t: f64) -> Result<()> {
        self.fill_w(u);
        let n = self.grid.cells();
        let eps2 = self.cfg.eps_reg * self.cfg.eps_reg;
        self.flux[0] = 0.0; // symmetry / inner no-flux
        for j in 1..n {
            let s = (self.w[j] - self.w[j - 1]) / self.face_dr[j - 1];
            self.flux[j] = self.face_area[j] * self.phi(s, eps2);
        }
        self.flux[n] = match &self.cfg.outer_bc {
            OuterBc::HomogeneousNeumann => 0.0,
            OuterBc::DirichletFromField(field) => {
                let r_edge = self.grid.r_max();
                let bc = field.eval(r_edge, t)?.max(0.0);
                let wb = self.w_pow.apply(bc);
                let s = (wb - self.w[n - 1]) / (r_edge - self.grid.centers[n - 1]);
                self.face_area[n] * self.phi(s, eps2)
            }
        };
        let clamp_high = matches!(self.cfg.reaction_mode, ReactionMode::Full);
        for i in 0..n {
            let mut v = u[i] + dt * (self.flux[i + 1] - self.flux[i]) / self.grid.volumes[i];
            if v < 0.0 {
                if v < -1e-10 {
                    self.clip_events += 1;
                }
                v = 0.0;
            } else if clamp_high && v > 1.0 {
                if v > 1.0 + 1e-10 {
                    self.clip_events += 1;
                }
                v = 1.0;
            }
            u[i] = v;
        }
        Ok(())
    }

    fn react(&mut self, u: &mut [f64], dt: f64) {
        match &self.cfg.reaction_mode {
            ReactionMode::None => {}
            ReactionMode::Linearized { rate } => {
                let g = (rate * dt).exp();
                for v in u.iter_mut() {
                    *v *= g;
                }
            }
            ReactionMode::Full => match self.cfg.reaction.kind {
                ReactionKind::Logistic => {
                    // Exact logistic flow.
                    let e = (-dt).exp();
                    for v in u.iter_mut() {
                        *v /= *v + (1.0 - *v) * e;
                    }
                }
                ReactionKind::Custom => {
                    let f = |x: f64| self.cfg.reaction.eval(x.clamp(0.0, 1.0));
                    for v in u.iter_mut() {
                        let k1 = f(*v);
                        let k2 = f(*v + 0.5 * dt * k1);
                        let k3 = f(*v + 0.5 * dt * k2);
                        let k4 = f(*v + dt * k3);
                        *v = (*v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).clamp(0.0, 1.0);
                    }
                }
            },
        }
    }

    /// One full Strang step of size `dt`: D(dt/2) R(dt) D(dt/2).
    fn strang_step(&mut self, u: &mut [f64], t: f64, dt: f64) -> Result<()> {
        self.diffuse(u, 0.5 * dt, t)?;
        self.react(u, dt);
        self.diffuse(u, 0.5 * dt, t + 0.5 * dt)?;
        Ok(())
    }

    fn reaction_cap(&self) -> f64 {
        match &self.cfg.reaction_mode {
            ReactionMode::None => f64::INFINITY,
            ReactionMode::Linearized { rate } => 0.25 / rate.abs().max(1e-300),
            ReactionMode::Full => 0.25 / self.cfg.reaction.f_prime0.max(1e-300),
        }
    }
}

/// Advance by a single adaptive step; returns the new state and the dt used.
pub fn step(state: &RadialState, grid: &RadialGrid, cfg: &SolverConfig) -> Result<(RadialState, f64)> {
    cfg.validate()?;
    let mut stepper = Stepper::new(grid, cfg);
    let mut u = state.u.clone();
    let dt = stepper.cfl_dt(&u, state.t)?.min(stepper.reaction_cap());
    if dt < DT_FLOOR {
        return Err(Error::Stiffness { t: state.t, dt });
    }
    stepper.strang_step(&mut u, state.t, dt)?;
    Ok((RadialState { t: state.t + dt, u }, dt))
}

/// Run from a radial datum, recording snapshots at the configured times.
pub fn run<F: Fn(f64) -> f64>(datum: F, grid: &RadialGrid, cfg: &SolverConfig) -> Result<RunResult> {
    cfg.validate()?;
    let n = grid.cells();
    let mut u: Vec<f64> = grid.centers.iter().map(|&r| datum(r)).collect();
    if !u.iter().all(|v| v.is_finite()) {
        return Err(Error::Precondition("datum must be finite on cell centers".into()));
    }
    if !matches!(cfg.reaction_mode, ReactionMode::None)
        && u.iter().any(|&v| !(-1e-12..=1.0 + 1e-12).contains(&v))
    {
        return Err(Error::Precondition("datum must lie in [0,1] in reaction modes".into()));
    }
    let mut stepper = Stepper::new(grid, cfg);
    let mut diagnostics = Diagnostics::default();
    let mut snapshots = Vec::with_capacity(cfg.snapshot_times.len());
    let mut t = 0.0;
    let mut last_dt = 0.0;
    let reaction_cap = stepper.reaction_cap();

    let mut record =
        |t: f64, u: &[f64], dt: f64, stepper: &Stepper, diagnostics: &mut Diagnostics| -> Result<()> {
            if !u.iter().all(|v| v.is_finite()) {
                return Err(Error::Numeric(format!("state lost finiteness at t = {t}")));
            }
            diagnostics.mass_history.push((t, grid.mass_of(u)));
            diagnostics.dt_history.push((t, dt));
            let boundary = u[n - 1];
            diagnostics.boundary_max_history.push((t, boundary));
            if matches!(stepper.cfg.outer_bc, OuterBc::HomogeneousNeumann)
                && boundary > stepper.cfg.boundary_alarm
            {
                diagnostics.boundary_alarm_fired = true;
            }
            Ok(())
        };

    for &target in &cfg.snapshot_times {
        while t < target {
            let dt_cfl = stepper.cfl_dt(&u, t)?.min(reaction_cap);
            if dt_cfl < DT_FLOOR {
                return Err(Error::Stiffness { t, dt: dt_cfl });
            }
            let dt = dt_cfl.min(target - t);
            stepper.strang_step(&mut u, t, dt)?;
            t += dt;
            last_dt = dt;
            diagnostics.steps += 1;
            if diagnostics.steps > cfg.max_steps {
                return Err(Error::Numeric(format!(
                    "step budget exhausted ({} steps) at t = {t}",
                    cfg.max_steps
                )));
            }
            if target - t < 1e-13 * target.max(1.0) {
                t = target;
            }
        }
        record(target, &u, last_dt, &stepper, &mut diagnostics)?;
        snapshots.push(RadialState { t: target, u: u.clone() });
    }
    diagnostics.clip_events = stepper.clip_events;
    Ok(RunResult { snapshots, diagnostics })
}

/// Full-space mass of a state on its grid.
pub fn mass(state: &RadialState, grid: &RadialGrid) -> f64 {
    grid.mass_of(&state.u)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PlapRunResult {
    pub run: RunResult,
    /// Far-field amplitude fitted at each snapshot.
    pub h_history: Vec<(f64, f64)>,
    /// Worst positive forward difference seen at any snapshot (monotone
    /// profiles should keep this at roundoff level).
    pub monotone_worst: f64,
}

/// Pure p-Laplacian run with the growing datum `r^lambda`, outer Dirichlet
/// data `H r^lambda` refitted from the outermost decade after each snapshot.
pub fn run_plap_increasing(
    lambda: f64,
    grid: &RadialGrid,
    cfg: &SolverConfig,
) -> Result<PlapRunResult> {
    cfg.validate()?;
    let p = cfg.params.p;
    crate::params::self_similar_exponents(lambda, p)?;
    if cfg.operator_mode != OperatorMode::PLaplacian {
        return Err(Error::Precondition("run_plap_increasing needs the p-Laplacian mode".into()));
    }
    let n = grid.cells();
    let mut u: Vec<f64> = grid.centers.iter().map(|&r| r.powf(lambda)).collect();
    let mut h = 1.0;
    let mut diagnostics = Diagnostics::default();
    let mut snapshots = Vec::new();
    let mut h_history = Vec::new();
    let mut monotone_worst: f64 = 0.0;
    let mut t = 0.0;
    let mut last_dt = 0.0;

    let refit_h = |u: &[f64]| -> f64 {
        // Mean of u / r^lambda over the outermost decade, excluding the two
        // cells nearest the boundary.
        let r_hi = grid.centers[n - 3];
        let r_lo = r_hi / 10.0_f64.powf(0.25);
        let mut acc = 0.0;
        let mut count = 0;
        for i in 0..n - 2 {
            let r = grid.centers[i];
            if r >= r_lo && r <= r_hi {
                acc += u[i] / r.powf(lambda);
                count += 1;
            }
        }
        if count > 0 {
            acc / count as f64
        } else {
            1.0
        }
    };

    for &target in &cfg.snapshot_times {
        let bc_cfg = SolverConfig {
            outer_bc: OuterBc::DirichletFromField(AnalyticField::PowerLaw {
                coeff: h,
                exponent: lambda,
            }),
            ..cfg.clone()
        };
        let mut stepper = Stepper::new(grid, &bc_cfg);
        while t < target {
            let dt_cfl = stepper.cfl_dt(&u, t)?;
            if dt_cfl < DT_FLOOR {
                return Err(Error::Stiffness { t, dt: dt_cfl });
            }
            let dt = dt_cfl.min(target - t);
            stepper.strang_step(&mut u, t, dt)?;
            t += dt;
            last_dt = dt;
            diagnostics.steps += 1;
            if diagnostics.steps > cfg.max_steps {
                return Err(Error::Numeric(format!(
                    "step budget exhausted ({} steps) at t = {t}",
                    cfg.max_steps
                )));
            }
            if target - t < 1e-13 * target.max(1.0) {
                t = target;
            }
        }
        diagnostics.clip_events = stepper.clip_events;
        for w in u.windows(2) {
            monotone_worst = monotone_worst.max(w[0] - w[1]);
        }
        h = refit_h(&u);
        h_history.push((target, h));
        diagnostics.mass_history.push((target, grid.mass_of(&u)));
        diagnostics.dt_history.push((target, last_dt));
        diagnostics.boundary_max_history.push((target, u[n - 1]));
        snapshots.push(RadialState { t: target, u: u.clone() });
    }
    Ok(PlapRunResult {
        run: RunResult { snapshots, diagnostics },
        h_history,
        monotone_worst,
    })
}

/// Self-similar profile samples from a snapshot: `xi = r t^{-beta}`,
/// `F = u t^{alpha}` with the exponents of the `|x|^lambda` problem.
pub fn plap_profile(
    state: &RadialState,
    grid: &RadialGrid,
    lambda: f64,
    p: f64,
) -> Result<Vec<(f64, f64)>> {
    let (alpha_l, beta_l) = crate::params::self_similar_exponents(lambda, p)?;
    if !(state.t > 0.0) {
        return Err(Error::Domain("profile extraction needs t > 0".into()));
    }
    Ok(grid
        .centers
        .iter()
        .zip(&state.u)
        .map(|(&r, &u)| (r * state.t.powf(-beta_l), u * state.t.powf(alpha_l)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::BarenblattFast;

    fn params_521() -> DiffusionParams {
        DiffusionParams::new(0.5, 2.0, 1).unwrap()
    }

    fn grid_uniform(r_max: f64, cells: usize, dim: u32) -> RadialGrid {
        build_grid(&GridSpec { mode: GridMode::Uniform, r_max, cells, dim }).unwrap()
    }

    #[test]
    fn flux_basics() {
        let pr = params_521();
        // Equal states: zero flux.
        assert_eq!(dnl_flux(0.3, 0.3, 1.0, 0.1, &pr, 1e-8), 0.0);
        // p = 2 reduces to the plain difference quotient of u^m.
        let f = dnl_flux(0.16, 0.36, 2.0, 0.5, &pr, 1e-8);
        assert!((f - (0.6 - 0.4) / 0.5).abs() < 1e-12);
        // Antisymmetry under swapping the states.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pr2 = DiffusionParams::new(0.8, 1.5, 2).unwrap();
        for _ in 0..100 {
            let a: f64 = rng.gen_range(0.0..1.0);
            let b: f64 = rng.gen_range(0.0..1.0);
            let f1 = dnl_flux(a, b, 1.7, 0.3, &pr2, 1e-8);
            let f2 = dnl_flux(b, a, 1.7, 0.3, &pr2, 1e-8);
            assert_eq!(f1, -f2);
        }
    }

    #[test]
    fn constant_state_is_steady_without_reaction() {
        let grid = grid_uniform(10.0, 64, 1);
        let cfg = SolverConfig::new(params_521(), ReactionSpec::logistic(), 1.0);
        let out = run(|_| 0.42, &grid, &cfg).unwrap();
        for &v in &out.snapshots[0].u {
            assert_eq!(v, 0.42);
        }
    }

    #[test]
    fn zero_datum_stays_zero_with_logistic() {
        let grid = grid_uniform(10.0, 64, 1);
        let mut cfg = SolverConfig::new(params_521(), ReactionSpec::logistic(), 1.0);
        cfg.reaction_mode = ReactionMode::Full;
        let out = run(|_| 0.0, &grid, &cfg).unwrap();
        assert!(out.snapshots[0].u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn equilibrium_one_is_steady_under_logistic() {
        let grid = grid_uniform(10.0, 64, 1);
        let mut cfg = SolverConfig::new(params_521(), ReactionSpec::logistic(), 1.0);
        cfg.reaction_mode = ReactionMode::Full;
        let out = run(|_| 1.0, &grid, &cfg).unwrap();
        for &v in &out.snapshots[0].u {
            assert!((v - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn logistic_exact_flow_on_flat_state() {
        // Spatially constant 0.5 under full logistic: u(ln 3) = 0.75 exactly.
        let grid = grid_uniform(10.0, 64, 1);
        let t_end = 3f64.ln();
        let mut cfg = SolverConfig::new(params_521(), ReactionSpec::logistic(), t_end);
        cfg.reaction_mode = ReactionMode::Full;
        cfg.snapshot_times = vec![t_end];
        let out = run(|_| 0.5, &grid, &cfg).unwrap();
        for &v in &out.snapshots[0].u {
            assert!((v - 0.75).abs() < 1e-12, "v = {v}");
        }
    }

    #[test]
    fn single_step_decreases_bump_max() {
        // Five-cell instance padded to the minimum grid size: a single bump's
        // peak must not grow over one explicit diffusion step.
        let grid = grid_uniform(6.4, 64, 1);
        let cfg = SolverConfig::new(params_521(), ReactionSpec::logistic(), 1.0);
        let datum = |r: f64| if (2.9..3.1).contains(&r) { 0.8 } else { 0.1 };
        let u0: Vec<f64> = grid.centers.iter().map(|&r| datum(r)).collect();
        let state = RadialState { t: 0.0, u: u0.clone() };
        let (next, dt) = step(&state, &grid, &cfg).unwrap();
        assert!(dt > 0.0);
        let max0 = u0.iter().cloned().fold(0.0, f64::max);
        let max1 = next.u.iter().cloned().fold(0.0, f64::max);
        assert!(max1 < max0, "max grew: {max0} -> {max1}");
    }

    #[test]
    fn barenblatt_tracking_within_two_percent() {
        // Pure diffusion from B_1(., 1); at t = 1 compare against B_1(., 2).
        let pr = params_521();
        let b = BarenblattFast::with_mass(pr, 1.0).unwrap();
        let grid = grid_uniform(60.0, 1024, 1);
        let mut cfg = SolverConfig::new(pr, ReactionSpec::logistic(), 1.0);
        cfg.snapshot_times = vec![1.0];
        let out = run(|r| b.eval(r, 1.0).unwrap(), &grid, &cfg).unwrap();
        let snap = &out.snapshots[0];
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&r, &v), &vol) in grid.centers.iter().zip(&snap.u).zip(&grid.volumes) {
            let exact = b.eval(r, 2.0).unwrap();
            num += (v - exact).abs() * vol;
            den += exact * vol;
        }
        let rel = num / den;
        assert!(rel <= 0.02, "tracking error {rel}");
    }

    #[test]
    fn mass_conservation_pure_diffusion() {
        let pr = params_521();
        let b = BarenblattFast::with_mass(pr, 1.0).unwrap();
        let grid = grid_uniform(60.0, 512, 1);
        let mut cfg = SolverConfig::new(pr, ReactionSpec::logistic(), 1.0);
        cfg.snapshot_times = vec![0.5, 1.0];
        let out = run(|r| b.eval(r, 1.0).unwrap(), &grid, &cfg).unwrap();
        let m0 = grid.mass_of(&out.snapshots[0].u);
        assert!((m0 - 1.0).abs() < 1e-3, "Barenblatt datum mass = {m0}");
        let masses: Vec<f64> = out.diagnostics.mass_history.iter().map(|&(_, m)| m).collect();
        for w in masses.windows(2) {
            assert!((w[1] - w[0]).abs() / w[0] < 1e-2);
        }
        assert!(!out.diagnostics.boundary_alarm_fired);
    }

    #[test]
    fn mass_exactly_conserved_interior() {
        // No clipping, no boundary flux: the telescoping sum is exact.
        let pr = params_521();
        let grid = grid_uniform(20.0, 128, 1);
        let mut cfg = SolverConfig::new(pr, ReactionSpec::logistic(), 0.2);
        cfg.snapshot_times = vec![0.2];
        let datum = |r: f64| 0.2 + 0.5 * (-r * r).exp();
        let out = run(datum, &grid, &cfg).unwrap();
        let m0 = grid.mass_of(&grid.centers.iter().map(|&r| datum(r)).collect::<Vec<_>>());
        let m1 = grid.mass_of(&out.snapshots[0].u);
        assert!(
            ((m1 - m0) / m0).abs() < 1e-12,
            "interior mass drift {:.3e}",
            (m1 - m0) / m0
        );
        assert_eq!(out.diagnostics.clip_events, 0);
    }

    #[test]
    fn ordered_pairs_stay_ordered() {
        use rand::{Rng, SeedableRng};
        let pr = params_521();
        let grid = grid_uniform(15.0, 96, 1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for trial in 0..20 {
            let a: f64 = rng.gen_range(0.05..0.3);
            let b: f64 = rng.gen_range(0.1..0.5);
            let c: f64 = rng.gen_range(0.3..3.0);
            let lower = move |r: f64| a + b * (-c * r * r).exp() * 0.5;
            let gap: f64 = rng.gen_range(0.01..0.2);
            let upper = move |r: f64| (lower(r) + gap * (1.0 + 0.5 * (r * 0.7).sin())).min(1.0);
            let full = trial % 2 == 0;
            let mut cfg = SolverConfig::new(pr, ReactionSpec::logistic(), 0.5);
            cfg.reaction_mode = if full { ReactionMode::Full } else { ReactionMode::None };
            cfg.snapshot_times = vec![0.1, 0.3, 0.5];
            let lo = run(lower, &grid, &cfg).unwrap();
            let hi = run(upper, &grid, &cfg).unwrap();
            for (sl, sh) in lo.snapshots.iter().zip(&hi.snapshots) {
                for (l, h) in sl.u.iter().zip(&sh.u) {
                    assert!(l - h <= 1e-9, "ordering violated: {l} > {h} (trial {trial})");
                }
            }
        }
    }

    #[test]
    fn radial_monotonicity_preserved() {
        let pr = params_521();
        let grid = grid_uniform(20.0, 256, 1);
        let mut cfg = SolverConfig::new(pr, ReactionSpec::logistic(), 1.0);
        cfg.snapshot_times = vec![0.25, 0.5, 1.0];
        let datum = |r: f64| 0.8 / (1.0 + r * r);
        let out = run(datum, &grid, &cfg).unwrap();
        for snap in &out.snapshots {
            for w in snap.u.windows(2) {
                assert!(w[1] - w[0] <= 1e-8, "monotonicity broken: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn refinement_improves_at_least_linearly() {
        let pr = params_521();
        let b = BarenblattFast::with_mass(pr, 1.0).unwrap();
        let mut sols = Vec::new();
        for &cells in &[256usize, 512, 1024] {
            let grid = grid_uniform(60.0, cells, 1);
            let mut cfg = SolverConfig::new(pr, ReactionSpec::logistic(), 1.0);
            cfg.snapshot_times = vec![1.0];
            let mut out = run(|r| b.eval(r, 1.0).unwrap(), &grid, &cfg).unwrap();
            sols.push((grid, out.snapshots.pop().unwrap()));
        }
        // L1 distance between consecutive refinements, coarse sampled on the
        // coarse grid by cell-pair averaging of the fine one.
        let dist = |coarse: &(RadialGrid, RadialState), fine: &(RadialGrid, RadialState)| {
            let mut acc = 0.0;
            for (i, (&vol, &uc)) in coarse.0.volumes.iter().zip(&coarse.1.u).enumerate() {
                let uf = 0.5 * (fine.1.u[2 * i] + fine.1.u[2 * i + 1]);
                acc += (uc - uf).abs() * vol;
            }
            acc
        };
        let d1 = dist(&sols[0], &sols[1]);
        let d2 = dist(&sols[1], &sols[2]);
        assert!(d1 / d2 >= 1.5, "refinement ratio {} (d1 = {d1}, d2 = {d2})", d1 / d2);
    }

    #[test]
    fn stiffness_guard_fires() {
        // An absurd cfl_safety of ~0 forces dt below the floor.
        let grid = grid_uniform(10.0, 64, 1);
        let mut cfg = SolverConfig::new(params_521(), ReactionSpec::logistic(), 1.0);
        cfg.cfl_safety = 1e-30;
        let err = run(|r: f64| 0.5 * (-r).exp(), &grid, &cfg);
        assert!(matches!(err, Err(Error::Stiffness { .. })));
    }

    #[test]
    fn plap_heat_with_quadratic_datum_is_exact() {
        // p = 2, datum r^2 in N = 1: exact solution x^2 + 2t; the scheme's
        // central flux of a quadratic is exact, so only the boundary pin and
        // time stepping contribute error.
        let pr = DiffusionParams::new(1.0, 2.0, 1).unwrap();
        let grid = grid_uniform(30.0, 256, 1);
        let mut cfg = SolverConfig::new(pr, ReactionSpec::logistic(), 0.5);
        cfg.operator_mode = OperatorMode::PLaplacian;
        cfg.snapshot_times = vec![0.1, 0.25, 0.5];
        let out = run_plap_increasing(2.0, &grid, &cfg).unwrap();
        assert!(out.monotone_worst <= 1e-8);
        for snap in &out.run.snapshots {
            for (&r, &v) in grid.centers.iter().zip(&snap.u) {
                if r < 24.0 {
                    let exact = r * r + 2.0 * snap.t;
                    assert!(
                        (v - exact).abs() <= 2e-3 * exact.max(1.0),
                        "at r = {r}, t = {}: {v} vs {exact}",
                        snap.t
                    );
                }
            }
        }
    }

    #[test]
    fn determinism_bitwise() {
        let pr = params_521();
        let grid = grid_uniform(20.0, 128, 1);
        let mut cfg = SolverConfig::new(pr, ReactionSpec::logistic(), 0.5);
        cfg.reaction_mode = ReactionMode::Full;
        cfg.snapshot_times = vec![0.5];
        let d = crate::analytic::make_plateau_tail(0.1, 1.0, &pr).unwrap();
        let a = run(|r| d.eval(r), &grid, &cfg).unwrap();
        let b = run(|r| d.eval(r), &grid, &cfg).unwrap();
        assert_eq!(a.snapshots[0].u, b.snapshots[0].u);
        assert_eq!(a.diagnostics.steps, b.diagnostics.steps);
    }
}
