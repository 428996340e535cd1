//! The constant schedule behind the expanding super-level-set iteration:
//! dyadic choice of delta, the waiting time t0, the admissible plateau
//! height and radius, and the touching Barenblatt parameters.

use crate::analytic::barenblatt::BarenblattFast;
use crate::error::{Error, Result};
use crate::params::{barenblatt_constants, sigma_star, DiffusionParams, ReactionSpec};

#[derive(Debug, Clone, serde::Serialize)]
pub struct Lemma42Schedule {
    pub sigma: f64,
    pub delta: f64,
    /// `lambda = f(delta)/delta`.
    pub lambda: f64,
    pub t0: f64,
    pub eps_tilde0: f64,
    pub rho_tilde0_min: f64,
    /// Mass of the Barenblatt solution placed under the plateau-tail datum.
    pub m1: f64,
    /// Its time delay.
    pub theta1: f64,
    pub k_bar: f64,
    pub k_tilde: f64,
    pub c1: f64,
    pub k1: f64,
    pub k2: f64,
    pub tau_infinity: f64,
}

/// Derive the schedule for a target rate `0 < sigma < sigma*`:
/// the largest dyadic `delta` with `(gh/p) f(delta)/delta > sigma`, the
/// smallest `t0` satisfying `Ktilde e^{lambda t0} >= 2^alpha` and
/// `(K2/(2 K1)) e^{lambda t0} >= e^{(p/gh) sigma t0}`, and the derived
/// plateau and Barenblatt constants.
pub fn lemma42_schedule(
    params: &DiffusionParams,
    reaction: &ReactionSpec,
    sigma: f64,
) -> Result<Lemma42Schedule> {
    params.require_fast_good()?;
    let s_star = sigma_star(params, reaction)?;
    if !(sigma > 0.0 && sigma < s_star) {
        return Err(Error::Schedule { sigma, sigma_star: s_star });
    }
    let p = params.p;
    let gh = params.gamma_hat();
    let (alpha, _) = barenblatt_constants(params)?;

    // Largest dyadic delta whose secant rate clears sigma.
    let mut delta = 0.5;
    let mut lambda = None;
    for _ in 0..40 {
        let lam = reaction.eval(delta) / delta;
        if gh / p * lam > sigma {
            lambda = Some(lam);
            break;
        }
        delta /= 2.0;
    }
    let lambda = lambda.ok_or(Error::Schedule { sigma, sigma_star: s_star })?;

    let unit = BarenblattFast::with_mass(*params, 1.0)?;
    let c1 = unit.c_m().expect("mass form");
    let bounds = unit.profile_bounds();
    let (k1, k2) = (bounds.k1, bounds.k2);

    let k_bar = (c1.powf((p - 1.0) / gh) * k1.powf(-alpha * gh)).powf(params.n() / (alpha * p));
    let k_tilde = k2 / 2.0 * c1.powf((p - 1.0) / gh);

    let t0_a = (2f64.powf(alpha) / k_tilde).ln() / lambda;
    let margin = lambda - p / gh * sigma;
    debug_assert!(margin > 0.0);
    let t0_b = (2.0 * k1 / k2).ln() / margin;
    let t0 = t0_a.max(t0_b).max(0.0);

    let eps_tilde0 = delta * (-lambda * t0).exp();
    let rho_tilde0_min = (k1.powf(gh) / (lambda * gh * eps_tilde0.powf(gh))).powf(1.0 / p);
    let m1 = k_bar * rho_tilde0_min.powf(params.n()) * eps_tilde0;
    let theta1 = k1.powf(-gh) * rho_tilde0_min.powf(p) * eps_tilde0.powf(gh);

    Ok(Lemma42Schedule {
        sigma,
        delta,
        lambda,
        t0,
        eps_tilde0,
        rho_tilde0_min,
        m1,
        theta1,
        k_bar,
        k_tilde,
        c1,
        k1,
        k2,
        tau_infinity: 1.0 / (lambda * gh),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params_521() -> DiffusionParams {
        DiffusionParams::new(0.5, 2.0, 1).unwrap()
    }

    #[test]
    fn delta_choice_and_lambda() {
        // sigma = 0.1 < sigma* = 0.25: delta = 0.5 works since 0.25*0.5 = 0.125 > 0.1.
        let s = lemma42_schedule(&params_521(), &ReactionSpec::logistic(), 0.1).unwrap();
        assert_eq!(s.delta, 0.5);
        assert!((s.lambda - 0.5).abs() < 1e-15);
        // sigma close to the secant boundary forces a smaller delta:
        // at sigma = 0.125 the dyadic 0.5 gives exactly 0.125, not >.
        let s = lemma42_schedule(&params_521(), &ReactionSpec::logistic(), 0.125).unwrap();
        assert_eq!(s.delta, 0.25);
        assert!((s.lambda - 0.75).abs() < 1e-15);
    }

    #[test]
    fn sigma_near_zero_admits_largest_delta() {
        let s = lemma42_schedule(&params_521(), &ReactionSpec::logistic(), 1e-9).unwrap();
        assert_eq!(s.delta, 0.5);
    }

    #[test]
    fn schedule_conditions_hold_at_t0() {
        for &sigma in &[0.05, 0.1, 0.2] {
            let s = lemma42_schedule(&params_521(), &ReactionSpec::logistic(), sigma).unwrap();
            let alpha = 2.0 / 3.0;
            assert!(s.k_tilde * (s.lambda * s.t0).exp() >= 2f64.powf(alpha) - 1e-9);
            let lhs = s.k2 / (2.0 * s.k1) * (s.lambda * s.t0).exp();
            let rhs = ((2.0 / 0.5) * sigma * s.t0).exp();
            assert!(lhs >= rhs * (1.0 - 1e-9), "second condition: {lhs} vs {rhs}");
            // rho bound: rho^p >= K1^gh / (lambda gh eps^gh).
            let need = s.k1.powf(0.5) / (s.lambda * 0.5 * s.eps_tilde0.powf(0.5));
            assert!(s.rho_tilde0_min.powf(2.0) >= need * (1.0 - 1e-12));
            assert!(s.m1 > 0.0 && s.theta1 > 0.0);
        }
    }

    #[test]
    fn schedule_oracle_values() {
        // Independently computed: for sigma = 0.1, t0 is forced by the
        // second condition: t0 = ln(2 K1 / K2) / (lambda - 4 sigma) = 60.78...
        let s = lemma42_schedule(&params_521(), &ReactionSpec::logistic(), 0.1).unwrap();
        assert!((s.k_bar - std::f64::consts::FRAC_PI_2).abs() < 1e-6, "Kbar = {}", s.k_bar);
        assert!((s.k_tilde - 0.4977069657131938).abs() < 1e-6, "Ktilde = {}", s.k_tilde);
        assert!((s.t0 - 60.77879322402555).abs() < 1e-4, "t0 = {}", s.t0);
    }

    #[test]
    fn t0_monotone_in_sigma() {
        let mut prev = 0.0;
        for i in 1..=20 {
            let sigma = 0.24 * i as f64 / 20.0;
            let s = lemma42_schedule(&params_521(), &ReactionSpec::logistic(), sigma).unwrap();
            assert!(
                s.t0 >= prev - 1e-12,
                "t0 must not decrease: sigma = {sigma}, t0 = {}",
                s.t0
            );
            prev = s.t0;
        }
    }

    #[test]
    fn out_of_range_sigma_rejected() {
        let lg = ReactionSpec::logistic();
        assert!(lemma42_schedule(&params_521(), &lg, 0.25).is_err());
        assert!(lemma42_schedule(&params_521(), &lg, 0.3).is_err());
        assert!(lemma42_schedule(&params_521(), &lg, 0.0).is_err());
        // Critical params refused (regime gate).
        let crit = DiffusionParams::new(1.0 / 3.0, 2.0, 3).unwrap();
        assert!(lemma42_schedule(&crit, &lg, 0.1).is_err());
    }
}
