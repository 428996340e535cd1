//! Small numeric helpers: adaptive Simpson quadrature, golden-section
//! minimization, least squares, and the sphere surface constant.

use std::f64::consts::PI;

/// Adaptive Simpson integration of `f` on `[a, b]` to the given relative
/// tolerance (with an absolute floor to stop recursion on negligible panels).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(1e-300);
    simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * abs_tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, abs_tol / 2.0, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, abs_tol / 2.0, depth - 1)
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
/// Returns (argmin, min).
pub fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol * (a.abs() + b.abs()).max(1.0) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Ordinary least squares fit of `y = slope * x + intercept`.
/// Returns (slope, intercept, r_squared, slope_std_err).
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let dof = (xs.len().saturating_sub(2)).max(1) as f64;
    let se = (ss_res / dof / sxx).sqrt();
    (slope, intercept, r2, se)
}

/// Gamma function at integer or half-integer argument `n_halves / 2`.
fn gamma_of_half(n_halves: u32) -> f64 {
    assert!(n_halves >= 1);
    if n_halves % 2 == 0 {
        let mut g = 1.0;
        for i in 1..(n_halves / 2) {
            g *= i as f64;
        }
        g
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x + 1.0 <= n_halves as f64 / 2.0 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Surface area of the unit sphere in `dim` dimensions: `2 pi^{d/2} / Gamma(d/2)`.
/// For dim = 1 this is 2, matching the full-line mass convention.
pub fn sphere_surface(dim: u32) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_of_half(dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_on_smooth_integrands() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
        let v = adaptive_simpson(&|x: f64| (-x * x).exp(), 0.0, 10.0, 1e-12);
        assert!((v - PI.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn golden_finds_minimum() {
        let (x, v) = golden_min(&|x: f64| (x - 1.25).powi(2) + 3.0, -10.0, 10.0, 1e-12);
        assert!((x - 1.25).abs() < 1e-6);
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_exact_line() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 7.0).collect();
        let (s, b, r2, se) = least_squares(&xs, &ys);
        assert!((s - 3.0).abs() < 1e-12);
        assert!((b + 7.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
        assert!(se < 1e-12);
    }

    #[test]
    fn surface_constants() {
        assert!((sphere_surface(1) - 2.0).abs() < 1e-14);
        assert!((sphere_surface(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_surface(3) - 4.0 * PI).abs() < 1e-13);
    }
}
