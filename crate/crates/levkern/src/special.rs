//! Special functions used by the radial reductions: log-gamma, Bessel
//! J/I/K of real order, and the spherical averages of `cos` and `cosh`.

use crate::quad;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0 (Lanczos approximation).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// Surface area of the unit sphere in R^d.
pub fn sphere_surface(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0)
}

/// Scaled modified Bessel function of the second kind, `e^x K_mu(x)`,
/// for mu >= 0 and x > 0.
///
/// Small/moderate arguments use the integral representation
/// `int_0^inf e^{-x(cosh t - 1)} cosh(mu t) dt`; large arguments the
/// Hankel asymptotic series.
pub fn bessel_k_scaled(mu: f64, x: f64) -> f64 {
    assert!(x > 0.0 && mu >= 0.0);
    if x >= 30.0 {
        let mut sum = 1.0;
        let mut term = 1.0;
        let four_mu2 = 4.0 * mu * mu;
        for k in 1..40 {
            let kf = k as f64;
            let next = term * (four_mu2 - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
            if next.abs() >= term.abs() || next.abs() < 1e-18 {
                sum += next;
                break;
            }
            term = next;
            sum += term;
        }
        (PI / (2.0 * x)).sqrt() * sum
    } else {
        // upper limit where the integrand has decayed below ~1e-26
        let mut t_max = (1.0 + 60.0 / x).acosh();
        t_max = (1.0 + (60.0 + mu * t_max) / x).acosh() + 1.0;
        quad::integrate(
            |t: f64| (-x * 2.0 * (0.5 * t).sinh().powi(2)).exp() * (mu * t).cosh(),
            0.0,
            t_max,
            1e-13,
            1e-300,
        )
        .map(|q| q.value)
        .unwrap_or(f64::NAN)
    }
}

/// `K_mu(x)` without scaling; underflows to 0 for large x.
pub fn bessel_k(mu: f64, x: f64) -> f64 {
    bessel_k_scaled(mu, x) * (-x).exp()
}

/// Bessel function of the first kind of real order `nu >= 0`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let switch = 12.0_f64.max(1.5 * nu);
    if x <= switch {
        // ascending series
        let mut term = (nu * (x / 2.0).ln() - ln_gamma(nu + 1.0)).exp();
        let mut sum = term;
        let q = 0.25 * x * x;
        for k in 1..200 {
            let kf = k as f64;
            term *= -q / (kf * (nu + kf));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-280) {
                break;
            }
        }
        sum
    } else {
        // Hankel asymptotic expansion: P collects even-index terms with
        // alternating sign, Q the odd-index ones.
        let omega = x - nu * PI / 2.0 - PI / 4.0;
        let four_nu2 = 4.0 * nu * nu;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut c = 1.0_f64; // a_k / x^k
        for k in 1..40 {
            let kf = k as f64;
            let next = c * (four_nu2 - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
            if next.abs() >= c.abs() || next.abs() < 1e-18 {
                break;
            }
            c = next;
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                p += sign * c;
            } else {
                q += sign * c;
            }
        }
        (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
    }
}

/// Approximate k-th positive zero of `J_nu` (McMahon expansion), `k >= 1`.
pub fn bessel_j_zero(nu: f64, k: usize) -> f64 {
    let b = (k as f64 + nu / 2.0 - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    b - (mu - 1.0) / (8.0 * b)
}

/// Scaled modified Bessel function of the first kind, `e^{-x} I_nu(x)`.
pub fn bessel_i_scaled(nu: f64, x: f64) -> f64 {
    assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= 35.0 {
        let mut term = (nu * (x / 2.0).ln() - ln_gamma(nu + 1.0)).exp();
        let mut sum = term;
        let q = 0.25 * x * x;
        for k in 1..400 {
            let kf = k as f64;
            term *= q / (kf * (nu + kf));
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        let four_nu2 = 4.0 * nu * nu;
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..40 {
            let kf = k as f64;
            let next = -term * (four_nu2 - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
            if next.abs() >= term.abs() || next.abs() < 1e-18 {
                sum += next;
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// `1 - M_d(u)` where `M_d(u)` is the average of `cos(<e, y>)` over unit
/// vectors `y` scaled by `u`; for d = 1 this is `1 - cos u`.
pub fn one_minus_cos_sphere_avg(d: usize, u: f64) -> f64 {
    if d == 1 {
        return 2.0 * (0.5 * u).sin().powi(2);
    }
    let half_d = d as f64 / 2.0;
    if u < 2.0 {
        // 1 - M = -Gamma(d/2) sum_{k>=1} (-1)^k (u/2)^{2k} / (k! Gamma(d/2+k))
        let q = 0.25 * u * u;
        let mut term = q / half_d; // k = 1 contribution (positive)
        let mut sum = term;
        for k in 1..60 {
            let kf = k as f64;
            term *= -q / ((kf + 1.0) * (half_d + kf));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-280) {
                break;
            }
        }
        sum
    } else {
        let nu = half_d - 1.0;
        let m = (ln_gamma(half_d) + nu * (2.0 / u).ln()).exp() * bessel_j(nu, u);
        1.0 - m
    }
}

/// `A_d(u) - 1` where `A_d(u)` is the spherical average of `cosh`; for
/// d = 1 this is `cosh u - 1`. Overflows for large u: see the ln variant.
pub fn cosh_sphere_avg_m1(d: usize, u: f64) -> f64 {
    if d == 1 {
        return 2.0 * (0.5 * u).sinh().powi(2);
    }
    let half_d = d as f64 / 2.0;
    let q = 0.25 * u * u;
    let mut term = q / half_d;
    let mut sum = term;
    for k in 1..600 {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (half_d + kf));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

// The ln_* spherical averages below are *scaled* by e^{-u}: integrands of
// exponential-moment integrals pair them with densities carrying e^{-kappa r}
// factors, and adding the huge +u and -kappa*r terms separately would lose
// ~u*eps absolute accuracy in the exponent. Callers fold the net tilt
// (s - kappa) r in analytically instead.

/// `ln(e^{-u} A_d'(u))` where `A_d` is the spherical cosh average: the
/// derivative is `Gamma(d/2) (2/u)^{d/2-1} I_{d/2}(u)` (`sinh u` in d = 1).
pub fn ln_sinh_sphere_avg_scaled(d: usize, u: f64) -> f64 {
    if d == 1 {
        // e^{-u} sinh u = (1 - e^{-2u}) / 2
        return (-(-2.0 * u).exp_m1()).ln() - std::f64::consts::LN_2;
    }
    let half_d = d as f64 / 2.0;
    let nu = half_d - 1.0;
    ln_gamma(half_d) + nu * (2.0 / u).ln() + bessel_i_scaled(nu + 1.0, u).ln()
}

/// `ln(e^{-u} (A_d(u) - 1))`, valid for all u > 0.
pub fn ln_cosh_sphere_avg_m1_scaled(d: usize, u: f64) -> f64 {
    if d == 1 {
        // e^{-u} (cosh u - 1) = (1 - e^{-u})^2 / 2
        return 2.0 * (-(-u).exp_m1()).ln() - std::f64::consts::LN_2;
    }
    if u <= 30.0 {
        return cosh_sphere_avg_m1(d, u).ln() - u;
    }
    let half_d = d as f64 / 2.0;
    let nu = half_d - 1.0;
    // A_d(u) = Gamma(d/2) (2/u)^{d/2-1} I_nu(u); the -1 is negligible here
    ln_gamma(half_d) + nu * (2.0 / u).ln() + bessel_i_scaled(nu, u).ln()
}

/// `ln(e^{-u} A_d(u))`, valid for all u >= 0.
pub fn ln_cosh_sphere_avg_scaled(d: usize, u: f64) -> f64 {
    if d == 1 {
        // e^{-u} cosh u = (1 + e^{-2u}) / 2
        return (1.0 + (-2.0 * u).exp()).ln() - std::f64::consts::LN_2;
    }
    if u <= 30.0 {
        return (cosh_sphere_avg_m1(d, u) + 1.0).ln() - u;
    }
    let half_d = d as f64 / 2.0;
    let nu = half_d - 1.0;
    ln_gamma(half_d) + nu * (2.0 / u).ln() + bessel_i_scaled(nu, u).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-12);
        assert!((gamma(5.0) - 24.0).abs() < 1e-10);
        assert!((ln_gamma(1.0)).abs() < 1e-13);
    }

    #[test]
    fn bessel_k_half_integer_closed_forms() {
        // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}; K_{3/2}(x) = same * (1 + 1/x)
        for &x in &[0.1, 1.0, 5.0, 25.0, 50.0, 400.0] {
            let base = (PI / (2.0 * x)).sqrt();
            let k12 = bessel_k_scaled(0.5, x);
            assert!((k12 - base).abs() < 1e-11 * base, "x={x}");
            let k32 = bessel_k_scaled(1.5, x);
            let exact = base * (1.0 + 1.0 / x);
            assert!((k32 - exact).abs() < 1e-11 * exact, "x={x}");
        }
    }

    #[test]
    fn bessel_k1_reference() {
        // K_1(1) reference value
        let v = bessel_k(1.0, 1.0);
        assert!((v - 0.601_907_230_197_234_6).abs() < 1e-12);
    }

    #[test]
    fn bessel_j_half_integer() {
        for &x in &[0.3, 2.0, 9.0, 15.0, 60.0] {
            let exact = (2.0 / (PI * x)).sqrt() * x.sin();
            let v = bessel_j(0.5, x);
            assert!((v - exact).abs() < 1e-9, "x={x}: {v} vs {exact}");
        }
        // first zero of J_0
        assert!(bessel_j(0.0, 2.404_825_557_695_773).abs() < 1e-9);
    }

    #[test]
    fn bessel_i_half_integer() {
        for &x in &[0.5, 3.0, 20.0, 80.0] {
            let exact = (2.0 / (PI * x)).sqrt() * (1.0 - (-2.0 * x).exp()) / 2.0;
            let v = bessel_i_scaled(0.5, x);
            assert!((v - exact).abs() < 1e-12 * exact.max(1.0), "x={x}");
        }
    }

    #[test]
    fn sphere_averages_small_u() {
        // leading order u^2/(2d)
        for d in [1usize, 2, 3] {
            let u = 1e-5;
            let v = one_minus_cos_sphere_avg(d, u);
            let w = cosh_sphere_avg_m1(d, u);
            // next series term contributes a relative O(u^2) correction
            let lead = u * u / (2.0 * d as f64);
            assert!((v - lead).abs() < 1e-9 * lead);
            assert!((w - lead).abs() < 1e-9 * lead);
        }
    }

    #[test]
    fn sphere_surface_values() {
        assert!((sphere_surface(1) - 2.0).abs() < 1e-12);
        assert!((sphere_surface(2) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_surface(3) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sinh_avg_matches_cosh_avg_derivative() {
        // central finite difference of A_d(u) - 1
        for d in [1usize, 2, 3] {
            for &u in &[0.5, 3.0, 10.0] {
                let h = 1e-5;
                let fd =
                    (cosh_sphere_avg_m1(d, u + h) - cosh_sphere_avg_m1(d, u - h)) / (2.0 * h);
                let v = (ln_sinh_sphere_avg_scaled(d, u) + u).exp();
                assert!((v - fd).abs() < 1e-7 * fd.abs().max(1.0), "d={d} u={u}");
            }
        }
    }

    #[test]
    fn cosh_avg_ln_consistent() {
        for d in [1usize, 2, 3] {
            for &u in &[0.5, 5.0, 25.0, 45.0] {
                let a = cosh_sphere_avg_m1(d, u).ln() - u;
                let b = ln_cosh_sphere_avg_m1_scaled(d, u);
                assert!((a - b).abs() < 1e-9, "d={d} u={u}: {a} vs {b}");
                let c = (cosh_sphere_avg_m1(d, u) + 1.0).ln() - u;
                let e = ln_cosh_sphere_avg_scaled(d, u);
                assert!((c - e).abs() < 1e-9, "d={d} u={u}: {c} vs {e}");
            }
        }
    }
}
