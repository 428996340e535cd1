//! Barenblatt (source-type) self-similar solutions of the pure diffusion
//! problem in the fast-good range, in both the mass-normalized and the
//! D-constant formulations, with the profile sandwich constants.

use crate::error::{Error, Result};
use crate::params::{barenblatt_constants, DiffusionParams};
use crate::quad::{adaptive_simpson, golden_min, sphere_surface};

/// How the free constant of the profile is pinned down.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Formulation {
    /// Mass-normalized: `C_M` solves `integral B_M(., 1) = M`.
    Mass { mass: f64, c_m: f64 },
    /// Second formulation with radius scale `R(t) = [(N/alpha) t]^{alpha/N}`.
    DConst { d: f64 },
}

/// `B(x,t) = t^{-alpha} F(|x| t^{-alpha/N})` with
/// `F(xi) = [C + k xi^{p/(p-1)}]^{-(p-1)/gamma_hat}`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BarenblattFast {
    pub params: DiffusionParams,
    pub formulation: Formulation,
    alpha: f64,
    k: f64,
}

/// Sandwich constants for the profile:
/// `K2 (1 + xi^{p/gh})^{-1} <= F(xi) <= K1 xi^{-p/gh}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProfileBounds {
    pub k1: f64,
    pub k2: f64,
}

impl BarenblattFast {
    /// Mass-normalized solution; computes `C_M` by quadrature and bisection.
    pub fn with_mass(params: DiffusionParams, mass: f64) -> Result<Self> {
        let (alpha, k) = barenblatt_constants(&params)?;
        let c_m = normalize_mass(&params, mass)?;
        Ok(Self { params, formulation: Formulation::Mass { mass, c_m }, alpha, k })
    }

    /// D-form solution with a given free constant `D > 0`.
    pub fn with_d(params: DiffusionParams, d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::ParameterDomain(format!("D must be positive, got {d}")));
        }
        let (alpha, k) = barenblatt_constants(&params)?;
        Ok(Self { params, formulation: Formulation::DConst { d }, alpha, k })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn c_m(&self) -> Option<f64> {
        match self.formulation {
            Formulation::Mass { c_m, .. } => Some(c_m),
            Formulation::DConst { .. } => None,
        }
    }

    /// The equivalent mass-form constant: for the D-form,
    /// `C = D (N/alpha)^{alpha gamma_hat / (p-1)}`.
    pub fn profile_constant(&self) -> f64 {
        match self.formulation {
            Formulation::Mass { c_m, .. } => c_m,
            Formulation::DConst { d } => {
                let n = self.params.n();
                let e = (self.params.p - 1.0) / self.params.gamma_hat();
                d * (n / self.alpha).powf(self.alpha / e)
            }
        }
    }

    /// Profile `F(xi)` in the mass-form normalization.
    pub fn profile(&self, xi: f64) -> f64 {
        let p = self.params.p;
        let e = (p - 1.0) / self.params.gamma_hat();
        let c = self.profile_constant();
        (c + self.k * xi.abs().powf(p / (p - 1.0))).powf(-e)
    }

    /// Evaluate at radius `r >= 0` and time `t > 0`.
    pub fn eval(&self, r: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("Barenblatt evaluation needs t > 0, got {t}")));
        }
        Ok(self.eval_unchecked(r, t))
    }

    pub(crate) fn eval_unchecked(&self, r: f64, t: f64) -> f64 {
        let n = self.params.n();
        let xi = r * t.powf(-self.alpha / n);
        t.powf(-self.alpha) * self.profile(xi)
    }

    /// Sandwich constants. `K1 = k^{-(p-1)/gamma_hat}` is closed form and
    /// independent of the profile constant; `K2` is found numerically.
    pub fn profile_bounds(&self) -> ProfileBounds {
        let p = self.params.p;
        let gh = self.params.gamma_hat();
        let k1 = self.k.powf(-(p - 1.0) / gh);
        let tail = p / gh;
        let g = |xi: f64| self.profile(xi) * (1.0 + xi.powf(tail));
        // Coarse log-spaced scan to bracket the minimum, then golden section.
        let mut best = (0.0, g(0.0));
        let pts = 2000;
        for i in 0..=pts {
            let xi = 10f64.powf(-6.0 + 12.0 * i as f64 / pts as f64);
            let v = g(xi);
            if v < best.1 {
                best = (xi, v);
            }
        }
        let (lo, hi) = (best.0 / 10.0, best.0 * 10.0);
        let (_, gm) = golden_min(&g, lo, hi, 1e-14);
        let k2 = gm.min(best.1);
        ProfileBounds { k1, k2 }
    }
}

/// Solve for the profile constant `C_M` so that the mass at `t = 1` equals
/// `M`, by adaptive radial quadrature and bisection on the residual.
pub fn normalize_mass(params: &DiffusionParams, mass: f64) -> Result<f64> {
    params.require_fast_good()?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::ParameterDomain(format!("mass must be positive, got {mass}")));
    }
    let (_, k) = barenblatt_constants(params)?;
    let total = |c: f64| radial_profile_mass(params, k, c);

    // The mass is strictly decreasing in C; expand a bracket then bisect.
    let mut lo = 1.0;
    let mut hi = 1.0;
    let mut m_lo = total(lo)?;
    let mut iter = 0;
    while m_lo < mass {
        lo /= 16.0;
        m_lo = total(lo)?;
        iter += 1;
        if iter > 200 {
            return Err(Error::Numeric("mass bracket expansion failed (low side)".into()));
        }
    }
    let mut m_hi = total(hi)?;
    iter = 0;
    while m_hi > mass {
        hi *= 16.0;
        m_hi = total(hi)?;
        iter += 1;
        if iter > 200 {
            return Err(Error::Numeric("mass bracket expansion failed (high side)".into()));
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let m_mid = total(mid)?;
        if (m_mid - mass).abs() <= 1e-9 * mass {
            return Ok(mid);
        }
        if m_mid > mass {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

/// `A_N int_0^inf r^{N-1} [C + k r^q]^{-E} dr` with a two-term analytic tail.
fn radial_profile_mass(params: &DiffusionParams, k: f64, c: f64) -> Result<f64> {
    let n = params.n();
    let p = params.p;
    let gh = params.gamma_hat();
    let q = p / (p - 1.0);
    let e = (p - 1.0) / gh;
    // Integrand decays like r^{N-1-p/gh} with p/gh > N in the fast-good range.
    let r_cut = (c / k * 1e6).powf(1.0 / q);
    let f = |r: f64| r.powf(n - 1.0) * (c + k * r.powf(q)).powf(-e);
    let body = adaptive_simpson(&f, 0.0, r_cut, 1e-10);
    // Tail: expand (1 + C/(k r^q))^{-E} to second order.
    let tail_pow = |j: f64| {
        let expo = n - q * e - q * j;
        k.powf(-e) * (c / k).powf(j) * r_cut.powf(expo) / (q * e + q * j - n)
    };
    let tail = tail_pow(0.0) - e * tail_pow(1.0) + e * (e + 1.0) / 2.0 * tail_pow(2.0);
    let total = sphere_surface(params.dim) * (body + tail);
    if !total.is_finite() {
        return Err(Error::Numeric(format!(
            "mass quadrature diverged for C = {c} (params {params:?})"
        )));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::least_squares;
    use rand::{Rng, SeedableRng};

    fn params_521() -> DiffusionParams {
        DiffusionParams::new(0.5, 2.0, 1).unwrap()
    }

    /// Closed-form mass constant via the Beta function, as an independent
    /// route: M = A_N k^{-N/q} J C^{N/q - E} with J = (1/q) B(N/q, E - N/q).
    /// For (0.5, 2, 1), M = 1: C_1 = (pi sqrt(6) / 2)^{2/3}.
    const C1_ORACLE: f64 = 2.4554457015685778;

    #[test]
    fn mass_normalization_matches_closed_form() {
        let c1 = normalize_mass(&params_521(), 1.0).unwrap();
        assert!(
            (c1 - C1_ORACLE).abs() < 1e-7 * C1_ORACLE,
            "C_1 = {c1}, oracle = {C1_ORACLE}"
        );
    }

    #[test]
    fn mass_integral_hits_target() {
        for &mass in &[0.5, 1.0, 3.0] {
            let b = BarenblattFast::with_mass(params_521(), mass).unwrap();
            let c_m = b.c_m().unwrap();
            let (_, k) = barenblatt_constants(&params_521()).unwrap();
            let got = radial_profile_mass(&params_521(), k, c_m).unwrap();
            assert!((got - mass).abs() <= 1e-8 * mass, "mass {mass} -> {got}");
        }
        // A higher-dimensional triple.
        let pr = DiffusionParams::new(0.8, 1.5, 2).unwrap();
        let b = BarenblattFast::with_mass(pr, 2.0).unwrap();
        assert!(b.c_m().unwrap() > 0.0);
    }

    #[test]
    fn mass_scaling_consistent_with_rescaling_identity() {
        // C_M = C_1 M^{-alpha p gamma_hat / (N (p-1))} follows from
        // B_M(x,t) = M B_1(x, M^{-gamma_hat} t).
        let pr = params_521();
        let c1 = normalize_mass(&pr, 1.0).unwrap();
        let c2 = normalize_mass(&pr, 2.0).unwrap();
        let expo = -(2.0 / 3.0) * 2.0 * 0.5 / 1.0;
        let predicted = c1 * 2f64.powf(expo);
        assert!((c2 - predicted).abs() < 1e-6 * predicted, "C_2 = {c2} vs {predicted}");
    }

    #[test]
    fn rescaling_identity_pointwise() {
        let pr = params_521();
        let gh = pr.gamma_hat();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let mass: f64 = rng.gen_range(0.2..5.0);
            let bm = BarenblattFast::with_mass(pr, mass).unwrap();
            let b1 = BarenblattFast::with_mass(pr, 1.0).unwrap();
            let r: f64 = rng.gen_range(0.0..20.0);
            let t: f64 = rng.gen_range(0.05..10.0);
            let lhs = bm.eval(r, t).unwrap();
            let rhs = mass * b1.eval(r, mass.powf(-gh) * t).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()),
                "rescaling: {lhs} vs {rhs} at (r={r}, t={t}, M={mass})"
            );
        }
    }

    #[test]
    fn center_value_closed_form() {
        let b = BarenblattFast::with_mass(params_521(), 1.0).unwrap();
        let c1 = b.c_m().unwrap();
        for &t in &[0.3, 1.0, 4.0] {
            let expect = t.powf(-2.0 / 3.0) * c1.powf(-2.0);
            let got = b.eval(0.0, t).unwrap();
            assert!((got - expect).abs() < 1e-14 * expect);
        }
        assert!(b.eval(1.0, 0.0).is_err());
        assert!(b.eval(1.0, -1.0).is_err());
    }

    #[test]
    fn tail_slope_is_minus_p_over_gamma_hat() {
        let b = BarenblattFast::with_mass(params_521(), 1.0).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..=200 {
            let r = 10f64.powf(2.0 + 2.0 * i as f64 / 200.0);
            xs.push(r.ln());
            ys.push(b.eval(r, 1.0).unwrap().ln());
        }
        let (slope, _, _, _) = least_squares(&xs, &ys);
        assert!((slope + 4.0).abs() < 0.01, "tail slope {slope}");
    }

    #[test]
    fn profile_sandwich_holds() {
        let b = BarenblattFast::with_mass(params_521(), 1.0).unwrap();
        let bounds = b.profile_bounds();
        assert!((bounds.k1 - 36.0).abs() < 1e-10, "K1 = {}", bounds.k1);
        // K2 from an independent ternary-search oracle run.
        assert!((bounds.k2 - 0.16509846865004541).abs() < 1e-6, "K2 = {}", bounds.k2);
        assert!(bounds.k2 < bounds.k1);
        let tail = 4.0;
        for i in 0..=10_000 {
            let xi = 10f64.powf(-4.0 + 8.0 * i as f64 / 10_000.0);
            let f = b.profile(xi);
            assert!(f <= bounds.k1 * xi.powf(-tail) * (1.0 + 1e-12));
            assert!(f * (1.0 + xi.powf(tail)) >= bounds.k2 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn d_form_matches_mass_form_with_matched_constants() {
        let pr = params_521();
        let bm = BarenblattFast::with_mass(pr, 1.0).unwrap();
        // D = C_M (alpha/N)^{alpha gamma_hat/(p-1)}.
        let e = (pr.p - 1.0) / pr.gamma_hat();
        let d = bm.c_m().unwrap() * (bm.alpha() / pr.n()).powf(bm.alpha() / e);
        let bd = BarenblattFast::with_d(pr, d).unwrap();
        for &(r, t) in &[(0.0, 1.0), (1.5, 0.7), (30.0, 2.0), (4.0, 9.0)] {
            let a = bm.eval(r, t).unwrap();
            let b = bd.eval(r, t).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(b), "{a} vs {b} at ({r},{t})");
        }
    }
}
