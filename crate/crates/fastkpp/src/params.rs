//! Parameter algebra for the doubly nonlinear operator `div(|grad u^m|^{p-2} grad u^m)`
//! with a KPP reaction: exponents, regime classification, and the scalar constants
//! used by the closed-form solutions and barriers.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default relative tolerance for detecting the critical regime `gamma_hat = p/N`.
pub const REGIME_REL_TOL: f64 = 1e-12;

/// The triple (m, p, N). `gamma = m(p-1) - 1` and `gamma_hat = -gamma`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DiffusionParams {
    pub m: f64,
    pub p: f64,
    pub dim: u32,
}

/// Diffusion regime in the (m, p-1) plane for a given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Regime {
    /// gamma >= 0: finite propagation, traveling waves exist.
    SlowOrPseudoLinear,
    /// 0 < gamma_hat < p/N: exponential propagation, Barenblatt solutions integrable.
    FastGood,
    /// gamma_hat = p/N (within tolerance): pseudo-Barenblatt solutions, eternal.
    Critical,
    /// gamma_hat > p/N: extinction in finite time.
    VeryFast,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::SlowOrPseudoLinear => "slow-or-pseudo-linear",
            Regime::FastGood => "fast-good",
            Regime::Critical => "critical",
            Regime::VeryFast => "very-fast",
        };
        f.write_str(s)
    }
}

impl DiffusionParams {
    pub fn new(m: f64, p: f64, dim: u32) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::ParameterDomain(format!("m must be positive, got {m}")));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::ParameterDomain(format!("p must exceed 1, got {p}")));
        }
        if dim < 1 {
            return Err(Error::ParameterDomain("dimension must be >= 1".into()));
        }
        Ok(Self { m, p, dim })
    }

    pub fn gamma(&self) -> f64 {
        self.m * (self.p - 1.0) - 1.0
    }

    /// `gamma_hat = 1 - m(p-1)`, the sign-flipped exponent used throughout.
    pub fn gamma_hat(&self) -> f64 {
        1.0 - self.m * (self.p - 1.0)
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    pub fn regime(&self) -> Regime {
        self.regime_with_tol(REGIME_REL_TOL)
    }

    pub fn regime_with_tol(&self, rel_tol: f64) -> Regime {
        let gh = self.gamma_hat();
        if gh <= 0.0 {
            return Regime::SlowOrPseudoLinear;
        }
        let pn = self.p / self.n();
        if (gh - pn).abs() <= rel_tol * pn.max(gh) {
            Regime::Critical
        } else if gh < pn {
            Regime::FastGood
        } else {
            Regime::VeryFast
        }
    }

    pub fn require_fast_good(&self) -> Result<()> {
        match self.regime() {
            Regime::FastGood => Ok(()),
            other => Err(Error::Regime { required: "fast-good", actual: other.to_string() }),
        }
    }

    /// Tail exponent `p / gamma_hat` of the Barenblatt profile.
    pub fn tail_exponent(&self) -> f64 {
        self.p / self.gamma_hat()
    }
}

/// Reaction term: `f: [0,1] -> R` with f(0) = f(1) = 0, f > 0 inside, concave.
#[derive(Clone)]
pub struct ReactionSpec {
    pub kind: ReactionKind,
    pub f_prime0: f64,
    evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ReactionKind {
    Logistic,
    Custom,
}

impl fmt::Debug for ReactionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReactionSpec")
            .field("kind", &self.kind)
            .field("f_prime0", &self.f_prime0)
            .finish()
    }
}

/// Number of grid points used to validate custom reaction terms.
const REACTION_GRID: usize = 4097;

impl ReactionSpec {
    /// The canonical logistic term f(u) = u(1-u), f'(0) = 1.
    pub fn logistic() -> Self {
        Self {
            kind: ReactionKind::Logistic,
            f_prime0: 1.0,
            evaluator: Arc::new(|u| u * (1.0 - u)),
        }
    }

    /// A custom KPP term, validated numerically on a 4097-point grid:
    /// zeros at the endpoints, positivity inside, discrete concavity.
    pub fn custom<F>(f_prime0: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(f_prime0.is_finite() && f_prime0 > 0.0) {
            return Err(Error::ParameterDomain(format!(
                "f'(0) must be positive, got {f_prime0}"
            )));
        }
        if f(0.0).abs() > 1e-12 || f(1.0).abs() > 1e-12 {
            return Err(Error::ParameterDomain(
                "reaction must vanish at u = 0 and u = 1".into(),
            ));
        }
        let h = 1.0 / (REACTION_GRID - 1) as f64;
        let vals: Vec<f64> = (0..REACTION_GRID).map(|i| f(i as f64 * h)).collect();
        for (i, &v) in vals.iter().enumerate().skip(1).take(REACTION_GRID - 2) {
            if v <= 0.0 {
                return Err(Error::ParameterDomain(format!(
                    "reaction must be positive on (0,1); f({}) = {v}",
                    i as f64 * h
                )));
            }
        }
        for w in vals.windows(3) {
            if w[0] - 2.0 * w[1] + w[2] > 1e-9 {
                return Err(Error::ParameterDomain(
                    "reaction fails the discrete concavity check".into(),
                ));
            }
        }
        Ok(Self { kind: ReactionKind::Custom, f_prime0, evaluator: Arc::new(f) })
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.evaluator)(u)
    }
}

/// All scalar constants derived from a fast-good parameter triple.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ExponentBundle {
    pub gamma: f64,
    pub gamma_hat: f64,
    pub sigma_star: f64,
    pub alpha: f64,
    pub k: f64,
    pub kappa: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub tau_infinity: f64,
}

impl ExponentBundle {
    pub fn new(params: &DiffusionParams, reaction: &ReactionSpec) -> Result<Self> {
        params.require_fast_good()?;
        let (alpha, k) = barenblatt_constants(params)?;
        let (d1, d2, d3) = d_constants(params)?;
        Ok(Self {
            gamma: params.gamma(),
            gamma_hat: params.gamma_hat(),
            sigma_star: sigma_star(params, reaction)?,
            alpha,
            k,
            kappa: kappa(params)?,
            d1,
            d2,
            d3,
            tau_infinity: tau_infinity(reaction.f_prime0, params.gamma_hat()),
        })
    }
}

/// Returns (gamma, gamma_hat, regime).
pub fn derive_exponents(params: &DiffusionParams) -> (f64, f64, Regime) {
    (params.gamma(), params.gamma_hat(), params.regime())
}

/// Critical level-set rate `sigma* = (gamma_hat/p) f'(0)`; at the critical
/// exponent this extends by continuity to `f'(0)/N`.
pub fn sigma_star(params: &DiffusionParams, reaction: &ReactionSpec) -> Result<f64> {
    match params.regime() {
        Regime::FastGood => Ok(params.gamma_hat() / params.p * reaction.f_prime0),
        Regime::Critical => Ok(reaction.f_prime0 / params.n()),
        other => Err(Error::Regime { required: "fast-good", actual: other.to_string() }),
    }
}

/// Barenblatt exponent and profile constant:
/// `alpha = 1/(p/N - gamma_hat)`, `k = (gamma_hat/p)(alpha/N)^{1/(p-1)}`.
pub fn barenblatt_constants(params: &DiffusionParams) -> Result<(f64, f64)> {
    params.require_fast_good()?;
    let gh = params.gamma_hat();
    let alpha = 1.0 / (params.p / params.n() - gh);
    let k = gh / params.p * (alpha / params.n()).powf(1.0 / (params.p - 1.0));
    Ok((alpha, k))
}

/// Bernoulli constant `kappa = (p - gamma_hat N)(mp)^{p-1} / gamma_hat^p`.
pub fn kappa(params: &DiffusionParams) -> Result<f64> {
    params.require_fast_good()?;
    let gh = params.gamma_hat();
    Ok((params.p - gh * params.n()) * (params.m * params.p).powf(params.p - 1.0)
        / gh.powf(params.p))
}

/// Constants of the level-set barrier computation. The grouping convention is
/// `d1 = p (p - gamma_hat N) / gamma_hat^2`,
/// `d2 = p [(p-1)(p - gamma_hat) + gamma_hat (N-1)] / gamma_hat^2`,
/// `d3 = (p/gamma_hat)^{2-p} m^{1-p}`.
pub fn d_constants(params: &DiffusionParams) -> Result<(f64, f64, f64)> {
    params.require_fast_good()?;
    let (p, gh, n) = (params.p, params.gamma_hat(), params.n());
    let gh2 = gh * gh;
    let d1 = p * (p - gh * n) / gh2;
    let d2 = p * ((p - 1.0) * (p - gh) + gh * (n - 1.0)) / gh2;
    let d3 = (p / gh).powf(2.0 - p) * params.m.powf(1.0 - p);
    Ok((d1, d2, d3))
}

/// Self-similar exponents for the p-Laplacian problem with datum `|x|^lambda`:
/// `alpha_l = -lambda / ((1-lambda)p + 2 lambda)`, `beta_l = 1 / ((1-lambda)p + 2 lambda)`.
pub fn self_similar_exponents(lambda: f64, p: f64) -> Result<(f64, f64)> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::ParameterDomain(format!("lambda must be positive, got {lambda}")));
    }
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::ParameterDomain(format!("p must exceed 1, got {p}")));
    }
    if p > 2.0 && lambda >= p / (p - 2.0) {
        return Err(Error::ParameterDomain(format!(
            "lambda must stay below p/(p-2) = {} for p = {p}",
            p / (p - 2.0)
        )));
    }
    let denom = (1.0 - lambda) * p + 2.0 * lambda;
    let beta = 1.0 / denom;
    Ok((-lambda * beta, beta))
}

/// Saturation time of the time change, `tau_inf = 1/(rate * gamma_hat)`.
pub fn tau_infinity(rate: f64, gamma_hat: f64) -> f64 {
    1.0 / (rate * gamma_hat)
}

/// Change of time variable that turns the linearized-reaction problem into a
/// pure diffusion one: `tau(t) = (1 - exp(-rate*gamma_hat*t)) / (rate*gamma_hat)`.
pub fn time_change(t: f64, rate: f64, gamma_hat: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
    }
    if !(rate > 0.0 && gamma_hat > 0.0) {
        return Err(Error::Domain("time change needs rate > 0 and gamma_hat > 0".into()));
    }
    let a = rate * gamma_hat;
    Ok((-(-a * t).exp_m1()) / a)
}

/// Inverse of [`time_change`]; defined for `0 <= tau < tau_infinity`.
pub fn inverse_time_change(tau: f64, rate: f64, gamma_hat: f64) -> Result<f64> {
    if !(rate > 0.0 && gamma_hat > 0.0) {
        return Err(Error::Domain("time change needs rate > 0 and gamma_hat > 0".into()));
    }
    let a = rate * gamma_hat;
    let tau_inf = 1.0 / a;
    if !(tau >= 0.0) || tau >= tau_inf {
        return Err(Error::Domain(format!(
            "tau must lie in [0, {tau_inf}), got {tau}"
        )));
    }
    Ok(-(-a * tau).ln_1p() / a)
}
