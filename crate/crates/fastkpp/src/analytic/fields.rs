//! Closed-form super- and sub-solutions: the Bernoulli-ODE tail envelope,
//! the similarity profile of the matched logistic reduction, the level-set
//! barrier, the plateau-tail datum, and the critical / very-fast evaluators.

use crate::error::{Error, Result};
use crate::params::{barenblatt_constants, kappa, DiffusionParams, Regime};

/// Tail super-solution `r^{-p/gh} G(t)` with `G(t) = (a e^{gh t} - kappa)^{1/gh}`,
/// which solves the reaction-linearized radial equation exactly (unit rate).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BernoulliSuper {
    pub params: DiffusionParams,
    pub a: f64,
    pub kappa: f64,
}

impl BernoulliSuper {
    pub fn new(params: DiffusionParams, a: f64) -> Result<Self> {
        let kap = kappa(&params)?;
        if !(a.is_finite() && a >= kap) {
            return Err(Error::ParameterDomain(format!(
                "Bernoulli constant a = {a} must be >= kappa = {kap}"
            )));
        }
        Ok(Self { params, a, kappa: kap })
    }

    pub fn g(&self, t: f64) -> f64 {
        let gh = self.params.gamma_hat();
        (self.a * (gh * t).exp() - self.kappa).powf(1.0 / gh)
    }

    pub fn eval(&self, r: f64, t: f64) -> Result<f64> {
        if r == 0.0 {
            return Err(Error::Domain("Bernoulli super-solution has a pole at r = 0".into()));
        }
        if t < 0.0 {
            return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
        }
        Ok(r.abs().powf(-self.params.tail_exponent()) * self.g(t))
    }

    /// Radius of the level set `{u = omega}`: `r = (G(t)/omega)^{gh/p}`.
    pub fn level_radius(&self, omega: f64, t: f64) -> f64 {
        (self.g(t) / omega).powf(1.0 / self.params.tail_exponent())
    }
}

/// Non-traveling-wave similarity form `u = a e^t / (r^{p/gh} + a e^t)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KMSimilarity {
    pub params: DiffusionParams,
    pub a_hat: f64,
}

impl KMSimilarity {
    pub fn new(params: DiffusionParams, a_hat: f64) -> Result<Self> {
        params.require_fast_good()?;
        if !(a_hat.is_finite() && a_hat > 0.0) {
            return Err(Error::ParameterDomain(format!("a_hat must be positive, got {a_hat}")));
        }
        Ok(Self { params, a_hat })
    }

    pub fn eval(&self, r: f64, t: f64) -> f64 {
        let drive = self.a_hat * t.exp();
        drive / (r.abs().powf(self.params.tail_exponent()) + drive)
    }

    /// Level radius: `r^{p/gh} = a e^t (1 - omega)/omega`.
    pub fn level_radius(&self, omega: f64, t: f64) -> f64 {
        (self.a_hat * t.exp() * (1.0 - omega) / omega).powf(1.0 / self.params.tail_exponent())
    }
}

/// Sub-solution barrier `e^t / (b r^{p/gh} + c e^t)`, values in (0, 1/c].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BarrierSub {
    pub params: DiffusionParams,
    pub b: f64,
    pub c: f64,
    pub r0: f64,
    pub t0: f64,
}

impl BarrierSub {
    pub fn new(params: DiffusionParams, b: f64, c: f64, r0: f64, t0: f64) -> Result<Self> {
        params.require_fast_good()?;
        if !(b > 0.0) {
            return Err(Error::ParameterDomain(format!("b must be positive, got {b}")));
        }
        if !(c > 1.0) {
            return Err(Error::ParameterDomain(format!("c must exceed 1, got {c}")));
        }
        if !(r0 > 0.0) || t0 < 0.0 {
            return Err(Error::ParameterDomain("need r0 > 0 and t0 >= 0".into()));
        }
        Ok(Self { params, b, c, r0, t0 })
    }

    pub fn eval(&self, r: f64, t: f64) -> f64 {
        let et = t.exp();
        et / (self.b * r.abs().powf(self.params.tail_exponent()) + self.c * et)
    }
}

/// Initial datum equal to `eps` on a plateau and `a0 r^{-p/gh}` outside,
/// continuous at the junction: `a0 = eps * rho0^{p/gh}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PlateauTailDatum {
    pub eps_tilde: f64,
    pub rho0: f64,
    pub a0: f64,
    tail: f64,
}

/// Build the plateau-tail datum for the given parameters.
pub fn make_plateau_tail(
    eps_tilde: f64,
    rho0: f64,
    params: &DiffusionParams,
) -> Result<PlateauTailDatum> {
    if !(eps_tilde > 0.0 && eps_tilde < 1.0) {
        return Err(Error::ParameterDomain(format!(
            "eps_tilde must lie in (0,1), got {eps_tilde}"
        )));
    }
    if !(rho0 > 0.0) {
        return Err(Error::ParameterDomain(format!("rho0 must be positive, got {rho0}")));
    }
    let tail = params.tail_exponent();
    Ok(PlateauTailDatum { eps_tilde, rho0, a0: eps_tilde * rho0.powf(tail), tail })
}

impl PlateauTailDatum {
    pub fn eval(&self, r: f64) -> f64 {
        if r.abs() <= self.rho0 {
            self.eps_tilde
        } else {
            self.a0 * r.abs().powf(-self.tail)
        }
    }
}

/// Eternal self-similar solution at the critical exponent, `R(t) = e^t`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PseudoBarenblattCritical {
    pub params: DiffusionParams,
    pub d: f64,
}

impl PseudoBarenblattCritical {
    pub fn new(params: DiffusionParams, d: f64) -> Result<Self> {
        match params.regime() {
            Regime::Critical => {}
            other => {
                return Err(Error::Regime { required: "critical", actual: other.to_string() })
            }
        }
        if !(d > 0.0) {
            return Err(Error::ParameterDomain(format!("D must be positive, got {d}")));
        }
        Ok(Self { params, d })
    }

    /// Defined for every real `t`. Uses the exact critical exponents
    /// `gamma_hat = p/N`, i.e. profile power `(p-1)N/p` and coefficient `1/N`.
    pub fn eval(&self, r: f64, t: f64) -> f64 {
        let n = self.params.n();
        let p = self.params.p;
        let radius = t.exp();
        let xi = r.abs() / radius;
        radius.powf(-n) * (self.d + xi.powf(p / (p - 1.0)) / n).powf(-(p - 1.0) * n / p)
    }
}

/// Extinguishing self-similar solution in the very fast range,
/// `R(t) = [(N/|alpha|)(tc - t)]^{-|alpha|/N}`, defined for `t < tc`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TypeIIVeryFast {
    pub params: DiffusionParams,
    pub d: f64,
    pub tc: f64,
    abs_alpha: f64,
}

impl TypeIIVeryFast {
    pub fn new(params: DiffusionParams, d: f64, tc: f64) -> Result<Self> {
        match params.regime() {
            Regime::VeryFast => {}
            other => {
                return Err(Error::Regime { required: "very-fast", actual: other.to_string() })
            }
        }
        if !(d >= 0.0) || !(tc > 0.0) {
            return Err(Error::ParameterDomain("need D >= 0 and tc > 0".into()));
        }
        let alpha = 1.0 / (params.p / params.n() - params.gamma_hat());
        Ok(Self { params, d, tc, abs_alpha: alpha.abs() })
    }

    pub fn eval(&self, r: f64, t: f64) -> Result<f64> {
        if t >= self.tc {
            return Err(Error::Domain(format!(
                "evaluation past the extinction time: t = {t} >= tc = {}",
                self.tc
            )));
        }
        let n = self.params.n();
        let p = self.params.p;
        let gh = self.params.gamma_hat();
        let radius = (n / self.abs_alpha * (self.tc - t)).powf(-self.abs_alpha / n);
        let xi = r.abs() / radius;
        Ok(radius.powf(-n) * (self.d + gh / p * xi.powf(p / (p - 1.0))).powf(-(p - 1.0) / gh))
    }
}

/// Far-field form at the critical exponent for `N > p`:
/// `u ~ (a^{p/N} t / (r^p ln r))^{N/p}` with `a^{p/N} = m^{p-1}(N-p)N^{p-2}`.
pub fn eval_critical_tail(params: &DiffusionParams, t: f64, r: f64) -> Result<f64> {
    match params.regime() {
        Regime::Critical => {}
        other => return Err(Error::Regime { required: "critical", actual: other.to_string() }),
    }
    let n = params.n();
    let p = params.p;
    if n <= p {
        return Err(Error::ParameterDomain(format!(
            "critical tail needs N > p, got N = {n}, p = {p}"
        )));
    }
    if !(r > 1.0) {
        return Err(Error::Domain(format!("critical tail needs r > 1, got {r}")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("critical tail needs t > 0, got {t}")));
    }
    let a_pn = params.m.powf(p - 1.0) * (n - p) * n.powf(p - 2.0);
    Ok((a_pn * t / (r.powf(p) * r.ln())).powf(n / p))
}
