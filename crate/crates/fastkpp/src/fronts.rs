//! Level-set extraction from radial snapshots, propagation-rate fitting,
//! the band-confinement summary, and the traveling-wave critical speed via
//! shooting and bisection (control regime, gamma >= 0).

use crate::error::{Error, Result};
use crate::params::ReactionSpec;
use crate::quad::least_squares;
use crate::solver::{RadialGrid, RadialState, RunResult};

/// One sampled level radius; `None` marks a gap (no bracketed crossing).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LevelSample {
    pub t: f64,
    pub r: Option<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct LevelSetTrajectory {
    pub omega: f64,
    pub samples: Vec<LevelSample>,
}

/// Least-squares fit of a trajectory over a time window.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    /// 1.96 standard errors of the slope, from the residual variance.
    pub ci_half_width: f64,
    pub samples: usize,
}

/// Outermost radius where the profile crosses `omega`, located by linear
/// interpolation of `ln u` between the bracketing cell centers. Returns
/// `None` when no bracketed crossing exists (all below, or still above at
/// the outermost cell).
pub fn level_radius(state: &RadialState, grid: &RadialGrid, omega: f64) -> Option<f64> {
    assert!(omega > 0.0 && omega < 1.0, "omega must lie in (0,1)");
    let u = &state.u;
    let n = u.len();
    if u.iter().cloned().fold(f64::NEG_INFINITY, f64::max) < omega {
        return None;
    }
    for i in (0..n - 1).rev() {
        if u[i] >= omega && u[i + 1] < omega {
            let (r0, r1) = (grid.centers[i], grid.centers[i + 1]);
            if u[i] <= 0.0 {
                return Some(r0);
            }
            let right = u[i + 1].max(1e-300);
            let frac = (u[i] / omega).ln() / (u[i] / right).ln();
            return Some(r0 + frac.clamp(0.0, 1.0) * (r1 - r0));
        }
    }
    None
}

/// Extract one trajectory per threshold from a run's snapshots.
pub fn track_levels(result: &RunResult, grid: &RadialGrid, omegas: &[f64]) -> Vec<LevelSetTrajectory> {
    omegas
        .iter()
        .map(|&omega| LevelSetTrajectory {
            omega,
            samples: result
                .snapshots
                .iter()
                .map(|s| LevelSample { t: s.t, r: level_radius(s, grid, omega) })
                .collect(),
        })
        .collect()
}

fn windowed(traj: &LevelSetTrajectory, window: Option<(f64, f64)>) -> ((f64, f64), Vec<(f64, f64)>) {
    let times: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let window = window.unwrap_or_else(|| {
        let lo = times.first().copied().unwrap_or(0.0);
        let hi = times.last().copied().unwrap_or(0.0);
        (0.5 * (lo + hi), hi)
    });
    let pts = traj
        .samples
        .iter()
        .filter(|s| s.t >= window.0 && s.t <= window.1)
        .filter_map(|s| s.r.map(|r| (s.t, r)))
        .filter(|&(_, r)| r > 0.0)
        .collect();
    (window, pts)
}

/// Fit `ln r_omega` against `t`; the slope estimates the exponential rate.
/// The window defaults to the last half of the trajectory.
pub fn fit_exp_rate(traj: &LevelSetTrajectory, window: Option<(f64, f64)>) -> Result<RateFit> {
    let (window, pts) = windowed(traj, window);
    if pts.len() < 5 {
        return Err(Error::InsufficientSamples { need: 5, have: pts.len() });
    }
    let xs: Vec<f64> = pts.iter().map(|&(t, _)| t).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, r)| r.ln()).collect();
    let (slope, intercept, r2, se) = least_squares(&xs, &ys);
    Ok(RateFit {
        slope,
        intercept,
        window,
        r_squared: r2,
        ci_half_width: 1.96 * se,
        samples: pts.len(),
    })
}

/// Fit `r_omega` against `t`; the slope estimates the linear front speed.
pub fn fit_linear_speed(traj: &LevelSetTrajectory, window: Option<(f64, f64)>) -> Result<RateFit> {
    let (window, pts) = windowed(traj, window);
    if pts.len() < 5 {
        return Err(Error::InsufficientSamples { need: 5, have: pts.len() });
    }
    let xs: Vec<f64> = pts.iter().map(|&(t, _)| t).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, r)| r).collect();
    let (slope, intercept, r2, se) = least_squares(&xs, &ys);
    Ok(RateFit {
        slope,
        intercept,
        window,
        r_squared: r2,
        ci_half_width: 1.96 * se,
        samples: pts.len(),
    })
}

/// Relative slack allowed when comparing band constants across the two
/// window halves (absorbs the decaying transient of finite-time runs).
pub const BAND_HALF_SLACK: f64 = 0.02;

/// Band-confinement summary: `Cband = max over samples of max(Q, 1/Q)` with
/// `Q = r e^{-sigma* t}`, and a non-increase check across the two halves of
/// the sampled window.
pub fn band_check(traj: &LevelSetTrajectory, sigma_star: f64) -> (f64, bool) {
    let pts: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter_map(|s| s.r.map(|r| (s.t, r)))
        .filter(|&(_, r)| r > 0.0)
        .collect();
    if pts.is_empty() {
        return (f64::NAN, false);
    }
    let c_of = |slice: &[(f64, f64)]| {
        slice
            .iter()
            .map(|&(t, r)| {
                let q = r * (-sigma_star * t).exp();
                q.max(1.0 / q)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let c_band = c_of(&pts);
    let t_mid = 0.5 * (pts.first().unwrap().0 + pts.last().unwrap().0);
    let split = pts.partition_point(|&(t, _)| t < t_mid);
    let (first, second) = pts.split_at(split);
    let ok = if first.is_empty() || second.is_empty() {
        false
    } else {
        c_of(second) <= c_of(first) * (1.0 + BAND_HALF_SLACK)
    };
    (c_band, ok)
}

/// Supremum of the state over `{r >= r0}` (the outer set at one time).
pub fn sup_outside(state: &RadialState, grid: &RadialGrid, r0: f64) -> f64 {
    grid.centers
        .iter()
        .zip(&state.u)
        .filter(|(&r, _)| r >= r0)
        .map(|(_, &u)| u)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ShotClass {
    /// Profile reached 0 with monotone decay and nonpositive flux variable.
    Super,
    /// Profile slope changed sign or the profile dove below zero.
    Sub,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TWEstimate {
    pub c_star: f64,
    pub bracket: (f64, f64),
    /// Decimated (xi, phi, v) samples of the last admissible profile.
    pub profile: Vec<(f64, f64, f64)>,
    /// Every classified speed, in bisection order.
    pub trace: Vec<(f64, ShotClass)>,
}

const EVENT_TOL: f64 = 1e-10;
const STEP_BUDGET: u64 = 10_000_000;

/// Integrate the wave-profile system for `u(x,t) = phi(x - ct)` written in
/// `(phi, v)` with `v = |(phi^m)'|^{p-2}(phi^m)'`, launched from the
/// linearization near `phi = 1` along its unstable direction.
fn shoot(
    m: f64,
    p: f64,
    reaction: &ReactionSpec,
    c: f64,
    keep_profile: bool,
) -> Result<(ShotClass, Vec<(f64, f64, f64)>)> {
    let eps0 = 1e-6;
    let phi0 = 1.0 - eps0;
    let slope0 = if p == 2.0 {
        // m w'' + c w' + f'(1) w = 0 for w = 1 - phi: unstable root.
        let h = 1e-6;
        let fp1 = (reaction.eval(1.0) - reaction.eval(1.0 - h)) / h;
        let mu = (-c + (c * c - 4.0 * m * fp1).sqrt()) / (2.0 * m);
        -mu * eps0
    } else {
        // Quasi-static launch: -c phi' ~ f(phi).
        -reaction.eval(phi0) / c
    };
    let w0 = m * phi0.powf(m - 1.0) * slope0;
    let mut phi = phi0;
    let mut v = -w0.abs().powf(p - 1.0);
    let mut xi = 0.0;
    let mut profile = Vec::new();
    let mut steps: u64 = 0;

    let rhs = |phi: f64, v: f64| -> (f64, f64) {
        let phic = phi.max(1e-14);
        let dphi = v.signum() * v.abs().powf(1.0 / (p - 1.0)) / (m * phic.powf(m - 1.0));
        let f = reaction.eval(phi.clamp(0.0, 1.0));
        (dphi, -c * dphi - f)
    };

    loop {
        steps += 1;
        if steps > STEP_BUDGET {
            return Err(Error::Inconclusive { c, steps });
        }
        let (dphi, dv) = rhs(phi, v);
        let h = (1e-2f64)
            .min(2e-3 * (phi.abs() + 1e-4) / (dphi.abs() + 1e-12))
            .min(2e-3 * (v.abs() + 1e-6) / (dv.abs() + 1e-12));
        let (k1p, k1v) = (dphi, dv);
        let (k2p, k2v) = rhs(phi + 0.5 * h * k1p, v + 0.5 * h * k1v);
        let (k3p, k3v) = rhs(phi + 0.5 * h * k2p, v + 0.5 * h * k2v);
        let (k4p, k4v) = rhs(phi + h * k3p, v + h * k3v);
        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        xi += h;
        if keep_profile && steps % 64 == 0 {
            profile.push((xi, phi, v));
        }
        if v > EVENT_TOL || phi < -EVENT_TOL {
            return Ok((ShotClass::Sub, profile));
        }
        if phi <= EVENT_TOL && v >= -EVENT_TOL {
            return Ok((ShotClass::Super, profile));
        }
        if phi > 1.0 + 1e-3 {
            return Err(Error::Inconclusive { c, steps });
        }
    }
}

/// Critical traveling-wave speed by bisection on the shooting classification.
pub fn critical_speed_shooting(
    m: f64,
    p: f64,
    reaction: &ReactionSpec,
    tol: f64,
) -> Result<TWEstimate> {
    let gamma = m * (p - 1.0) - 1.0;
    if gamma < 0.0 {
        return Err(Error::Regime {
            required: "slow-or-pseudo-linear",
            actual: format!("gamma = {gamma} < 0"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::ParameterDomain("tolerance must be positive".into()));
    }
    let mut trace = Vec::new();
    let mut classify = |c: f64, keep: bool| -> Result<(ShotClass, Vec<(f64, f64, f64)>)> {
        let out = shoot(m, p, reaction, c, keep)?;
        trace.push((c, out.0));
        Ok(out)
    };

    // Expand a bracket: sub speeds from below, super speeds from above.
    let mut c_lo = 0.5;
    let mut tries = 0;
    while classify(c_lo, false)?.0 == ShotClass::Super {
        c_lo /= 2.0;
        tries += 1;
        if tries > 20 {
            return Err(Error::Numeric("no sub-critical speed found above 0".into()));
        }
    }
    let mut c_hi = c_lo.max(1.0);
    tries = 0;
    while classify(c_hi, false)?.0 == ShotClass::Sub {
        c_hi *= 2.0;
        tries += 1;
        if tries > 16 {
            return Err(Error::Numeric("no super-critical speed found".into()));
        }
    }
    while c_hi - c_lo > tol {
        let mid = 0.5 * (c_lo + c_hi);
        match classify(mid, false)?.0 {
            ShotClass::Sub => c_lo = mid,
            ShotClass::Super => c_hi = mid,
        }
    }
    let (_, profile) = classify(c_hi, true)?;
    Ok(TWEstimate { c_star: 0.5 * (c_lo + c_hi), bracket: (c_lo, c_hi), profile, trace })
}
