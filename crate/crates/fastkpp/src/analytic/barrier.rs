//! Feasibility of the level-set sub-solution barrier: computes the radius
//! threshold, the interval split point, and certifies the sign condition
//! `C_r0(xi) >= 0` on a wide logarithmic grid.

use crate::error::{Error, Result};
use crate::params::{d_constants, DiffusionParams, ReactionKind, ReactionSpec};

/// Which branch of the construction applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum BarrierBranch {
    /// `gamma_hat <= p - 1`
    Flat,
    /// `gamma_hat > p - 1`
    Steep,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FeasibilityReport {
    pub r0: f64,
    pub c: f64,
    pub b: f64,
    pub xi0: f64,
    pub branch: BarrierBranch,
    /// Minimal admissible `r0` from the flat-branch bound (on the r0 scale).
    pub r0_bound_flat: f64,
    /// Minimal admissible `r0` from the steep-branch bound.
    pub r0_bound_steep: f64,
    pub certificate_ok: bool,
    pub worst_xi: f64,
    pub min_value: f64,
    pub grid_points: usize,
}

/// Number of log-spaced certificate points spanning `[1e-8, 1e8]`.
const CERT_POINTS: usize = 100_000;

/// Compute the barrier constants for a logistic reaction at the given
/// `eps` and certify the sign condition with `b = 1`. The condition is
/// invariant under `b` rescaling (`C(b zeta; b) = b C(zeta; 1)`), so the
/// unit-`b` grid check covers every `b > 0`.
pub fn barrier_feasibility(
    params: &DiffusionParams,
    reaction: &ReactionSpec,
    eps: f64,
    r0_candidate: Option<f64>,
) -> Result<FeasibilityReport> {
    params.require_fast_good()?;
    if reaction.kind != ReactionKind::Logistic {
        return Err(Error::Precondition(
            "the barrier construction is stated for the logistic reaction".into(),
        ));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::ParameterDomain(format!("eps must lie in (0,1), got {eps}")));
    }
    let (d1, d2, d3) = d_constants(params)?;
    let p = params.p;
    let gh = params.gamma_hat();
    let c = 1.0 / (1.0 - eps);
    let b = 1.0;

    // Minimal r0^p for each branch.
    let bound_flat_pow =
        d2.powf(gh + 1.0) * (1.0 - eps).powf(-gh) / (d1.powf(gh) * d3 * (gh + 1.0)) / eps;
    let bound_steep_pow =
        d2 * d2 * (1.0 + d1 / d2).powf(gh - (p - 1.0)) / (p * d1 * d3) * eps.powf(-1.0 / gh);
    let r0_min = bound_flat_pow.max(bound_steep_pow).powf(1.0 / p);
    let r0 = r0_candidate.unwrap_or(r0_min);
    if !(r0 > 0.0) {
        return Err(Error::ParameterDomain(format!("r0 must be positive, got {r0}")));
    }
    let r0p = r0.powf(p);

    let branch = if gh <= p - 1.0 { BarrierBranch::Flat } else { BarrierBranch::Steep };
    let xi0 = match branch {
        BarrierBranch::Flat => {
            (d2 * c * b.powf(gh) / (d3 * (1.0 + gh) * r0p * (c - 1.0))).powf(1.0 / gh)
        }
        BarrierBranch::Steep => (d2 * (1.0 + d1 / d2).powf(gh - (p - 1.0)) * c * b.powf(gh)
            / (p * d3 * r0p * (c - 1.0)))
            .powf(1.0 / gh),
    };

    // C_r0(xi) = d3 (c-1)/b^{p-1} r0^p xi^{1+gh} (b + c xi)^{p-1-gh} - d2 c xi + b d1.
    // As xi -> 0 this tends to b d1 > 0; as xi -> inf the xi^p term dominates.
    let lead = d3 * (c - 1.0) / b.powf(p - 1.0) * r0p;
    let cert = |xi: f64| lead * xi.powf(1.0 + gh) * (b + c * xi).powf(p - 1.0 - gh) - d2 * c * xi + b * d1;

    let mut min_value = f64::INFINITY;
    let mut worst_xi = 0.0;
    let (lo, hi) = (1e-8f64, 1e8f64);
    let step = (hi / lo).ln() / (CERT_POINTS - 1) as f64;
    for i in 0..CERT_POINTS {
        let xi = lo * ((i as f64) * step).exp();
        let v = cert(xi);
        if v < min_value {
            min_value = v;
            worst_xi = xi;
        }
    }
    let ok = min_value >= 0.0;
    if !ok {
        return Err(Error::FeasibilityViolation { xi: worst_xi, value: min_value });
    }
    Ok(FeasibilityReport {
        r0,
        c,
        b,
        xi0,
        branch,
        r0_bound_flat: bound_flat_pow.powf(1.0 / p),
        r0_bound_steep: bound_steep_pow.powf(1.0 / p),
        certificate_ok: ok,
        worst_xi,
        min_value,
        grid_points: CERT_POINTS,
    })
}
