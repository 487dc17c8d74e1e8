//! Exponential moments of Levy measures.
//!
//! For a density with profile `f(r) = e^{-kappa r} h(r)` the function
//!
//! `omega(xi) = int (cosh<xi, y> - 1) nu(dy)`
//!
//! is finite inside the ball `|xi| <= kappa` (possibly at the boundary,
//! depending on the tail of `h`) and governs the exponential decay rate of
//! heat kernels: the rate in direction `theta` at resolvent parameter
//! `alpha` is `gamma_alpha(theta) = kappa` once `alpha` exceeds
//! `omega(kappa theta)`, and the inverse of `s -> omega(s theta)` below it.

use crate::error::{Error, Result};
use crate::model::{norm, LevyModel};
use crate::quad::{self, Tail};
use crate::special;

/// Cap on partial integrals before the moment is declared infinite.
const DIVERGENCE_CAP: f64 = 1e12;

/// Value of an exponential-moment integral with divergence flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaEvaluation {
    /// The integral, `f64::INFINITY` when `diverged`.
    pub value: f64,
    pub abs_error_estimate: f64,
    pub diverged: bool,
}

impl OmegaEvaluation {
    fn finite(value: f64, abs_error_estimate: f64) -> Self {
        OmegaEvaluation {
            value,
            abs_error_estimate,
            diverged: false,
        }
    }

    fn infinite() -> Self {
        OmegaEvaluation {
            value: f64::INFINITY,
            abs_error_estimate: f64::INFINITY,
            diverged: true,
        }
    }
}

/// Which part of the jump space a restricted moment integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `|y| <= r`
    Small,
    /// `|y| > r`
    Large,
}

/// The decay rate `gamma_alpha` sampled over a set of resolvent parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRateCurve {
    pub alphas: Vec<f64>,
    pub rates: Vec<f64>,
    pub theta: Vec<f64>,
    pub kappa: f64,
    /// `omega(kappa theta)`; infinite when the boundary moment diverges.
    pub omega_star_kappa: f64,
}

/// Exponential decay rate of the profile. Errors with an
/// unsupported-profile message for subexponential profiles, where no
/// positive rate exists; tabulated profiles use their terminal log-slope.
pub fn kappa_of(model: &LevyModel) -> Result<f64> {
    if let Some(k) = model.analytic_kappa() {
        return Ok(k);
    }
    if model.profile().analytic_subexponential() == Some(true) {
        return Err(Error::UnsupportedProfile(
            "profile decays subexponentially; exponential moments exist only at 0".into(),
        ));
    }
    // tabulated: the profile extrapolates with its last log-slope
    let (r0, r1) = (1.0e6, 2.0e6);
    let slope = (model.profile().ln_value(model.dim(), r1)
        - model.profile().ln_value(model.dim(), r0))
        / (r1 - r0);
    if slope >= -1e-12 {
        return Err(Error::UnsupportedProfile(
            "tabulated profile has no exponential decay".into(),
        ));
    }
    Ok(-slope)
}

fn check_theta(model: &LevyModel, theta: &[f64]) -> Result<f64> {
    if theta.len() != model.dim() {
        return Err(Error::Domain(format!(
            "direction has dimension {}, model has {}",
            theta.len(),
            model.dim()
        )));
    }
    let n = norm(theta);
    if (n - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!("direction has norm {n}, not 1")));
    }
    Ok(n)
}

/// `omega(xi)`; radial models only depend on `|xi|`.
pub fn omega(model: &LevyModel, xi: &[f64]) -> Result<OmegaEvaluation> {
    if xi.len() != model.dim() {
        return Err(Error::Domain(format!(
            "point has dimension {}, model has {}",
            xi.len(),
            model.dim()
        )));
    }
    omega_radial(model, norm(xi))
}

/// `omega` at radius `s = |xi|`.
pub fn omega_radial(model: &LevyModel, s: f64) -> Result<OmegaEvaluation> {
    if s == 0.0 {
        return Ok(OmegaEvaluation::finite(0.0, 0.0));
    }
    let kappa = kappa_of(model)?;
    if s > kappa {
        return Ok(OmegaEvaluation::infinite());
    }
    let head = omega_ball(model, s, 1.0)?;
    match omega_tail_detect(model, s, 1.0)? {
        Tail::Converged(tail) => Ok(OmegaEvaluation::finite(
            head.value + tail.value,
            head.abs_error + tail.abs_error,
        )),
        Tail::Diverged { .. } => Ok(OmegaEvaluation::infinite()),
    }
}

/// Restricted moment over `|y| <= r` (always finite) or `|y| > r`.
pub fn omega_restricted(
    model: &LevyModel,
    xi: &[f64],
    r: f64,
    side: Side,
) -> Result<OmegaEvaluation> {
    if r <= 0.0 {
        return Err(Error::Domain("restriction radius must be > 0".into()));
    }
    let s = norm(xi);
    if s == 0.0 {
        return Ok(OmegaEvaluation::finite(0.0, 0.0));
    }
    match side {
        Side::Small => {
            let inner = omega_ball(model, s, r.min(1.0))?;
            if r <= 1.0 {
                return Ok(OmegaEvaluation::finite(inner.value, inner.abs_error));
            }
            let outer = quad::integrate(
                |u: f64| omega_integrand(model, s, u),
                1.0,
                r,
                1e-10,
                1e-300,
            )?;
            Ok(OmegaEvaluation::finite(
                inner.value + outer.value,
                inner.abs_error + outer.abs_error,
            ))
        }
        Side::Large => {
            if model.analytic_kappa().map_or(false, |k| s > k) {
                return Ok(OmegaEvaluation::infinite());
            }
            match omega_tail_detect(model, s, r)? {
                Tail::Converged(q) => Ok(OmegaEvaluation::finite(q.value, q.abs_error)),
                Tail::Diverged { .. } => Ok(OmegaEvaluation::infinite()),
            }
        }
    }
}

/// Derivative of `s -> omega(s theta)` on `(0, kappa)`.
pub fn omega_prime(model: &LevyModel, s: f64, theta: &[f64]) -> Result<f64> {
    check_theta(model, theta)?;
    let kappa = kappa_of(model)?;
    if !(0.0 < s && s < kappa) {
        return Err(Error::Domain(format!(
            "omega_prime needs 0 < s < kappa = {kappa}, got {s}"
        )));
    }
    let d = model.dim();
    let integrand = |r: f64| -> f64 {
        r * (special::ln_sinh_sphere_avg_scaled(d, s * r)
            + model.ln_radial_weight_tilted(r, s))
        .exp()
    };
    let head = quad::integrate(
        |v: f64| {
            let r = v.powi(4);
            integrand(r) * 4.0 * v.powi(3)
        },
        0.0,
        1.0,
        1e-10,
        1e-300,
    )?;
    match quad::integrate_tail_detect(integrand, 1.0, 1e-10, 1e-12, DIVERGENCE_CAP)? {
        Tail::Converged(tail) => Ok(head.value + tail.value),
        Tail::Diverged { partial, .. } => Err(Error::QuadratureNonConvergence {
            partial,
            abs_error: f64::INFINITY,
            context: format!("omega derivative diverges at s = {s}"),
        }),
    }
}

/// Boundary moment `omega*(kappa) = sup_theta omega(kappa theta)`; for the
/// radial models here this is a single evaluation at radius `kappa`.
pub fn omega_star(model: &LevyModel) -> Result<OmegaEvaluation> {
    let kappa = kappa_of(model)?;
    omega_radial(model, kappa)
}

/// Decay rate `gamma_alpha(theta)`: `kappa` once `alpha >= omega(kappa
/// theta)`, otherwise the inverse of `s -> omega(s theta)` at `alpha`.
pub fn gamma_alpha(model: &LevyModel, alpha: f64, theta: &[f64]) -> Result<f64> {
    check_theta(model, theta)?;
    if alpha <= 0.0 {
        return Err(Error::Domain("gamma_alpha needs alpha > 0".into()));
    }
    let kappa = kappa_of(model)?;
    let boundary = omega_radial(model, kappa)?;
    if !boundary.diverged && alpha >= boundary.value {
        return Ok(kappa);
    }
    // omega is continuous increasing on (0, kappa) with omega(0) = 0 and
    // omega(kappa-) >= alpha, so the root exists and bisection applies
    let mut lo = 0.0_f64;
    let mut hi = kappa;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= 1e-10 * mid {
            break;
        }
        let w = omega_radial(model, mid)?;
        if w.diverged || w.value >= alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Samples `gamma_alpha` over ascending `alphas`.
pub fn decay_rate_curve(
    model: &LevyModel,
    alphas: &[f64],
    theta: &[f64],
) -> Result<DecayRateCurve> {
    if alphas.is_empty() {
        return Err(Error::Domain("decay curve needs at least one alpha".into()));
    }
    if alphas.iter().any(|&a| a <= 0.0) || alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("alphas must be positive ascending".into()));
    }
    let kappa = kappa_of(model)?;
    let boundary = omega_star(model)?;
    let rates = alphas
        .iter()
        .map(|&a| gamma_alpha(model, a, theta))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DecayRateCurve {
        alphas: alphas.to_vec(),
        rates,
        theta: theta.to_vec(),
        kappa,
        omega_star_kappa: boundary.value,
    })
}

/// Tail exponential moment `int_{|y| >= 1} e^{<xi, y>} nu(y) dy`; finite
/// for `|xi| <= kappa` under an integrable boundary tail, infinite flag
/// otherwise.
pub fn exp_moment(model: &LevyModel, xi: &[f64]) -> Result<OmegaEvaluation> {
    let s = norm(xi);
    let d = model.dim();
    let integrand = move |r: f64| -> f64 {
        if s == 0.0 {
            return model.radial_weight(r);
        }
        // spherical average of e^{<xi,y>} over |y| = r is the cosh average
        (special::ln_cosh_sphere_avg_scaled(d, s * r) + model.ln_radial_weight_tilted(r, s))
            .exp()
    };
    match quad::integrate_tail_detect(integrand, 1.0, 1e-10, 1e-14, DIVERGENCE_CAP)? {
        Tail::Converged(q) => Ok(OmegaEvaluation::finite(q.value, q.abs_error)),
        Tail::Diverged { .. } => Ok(OmegaEvaluation::infinite()),
    }
}

/// Integrand of the radial reduction of omega: the spherical cosh
/// average minus one against the surface-weighted density, in log scale
/// to survive deep exponential tails.
fn omega_integrand(model: &LevyModel, s: f64, r: f64) -> f64 {
    (special::ln_cosh_sphere_avg_m1_scaled(model.dim(), s * r)
        + model.ln_radial_weight_tilted(r, s))
    .exp()
}

/// `int over |y| <= b` with the short-range singularity tamed by `r = v^4`.
fn omega_ball(model: &LevyModel, s: f64, b: f64) -> Result<quad::Quad> {
    let scale = b.powf(0.25);
    quad::integrate(
        |v: f64| {
            let r = v.powi(4);
            omega_integrand(model, s, r) * 4.0 * v.powi(3)
        },
        0.0,
        scale,
        1e-10,
        1e-300,
    )
}

fn omega_tail_detect(model: &LevyModel, s: f64, a: f64) -> Result<Tail> {
    quad::integrate_tail_detect(
        |r| omega_integrand(model, s, r),
        a,
        1e-10,
        1e-12,
        DIVERGENCE_CAP,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel1() -> LevyModel {
        LevyModel::relativistic(1, 1.0, 1.0).unwrap()
    }

    // closed form for the relativistic family: m - (m^{2/b} - s^2)^{b/2}
    fn rel_omega(beta: f64, m: f64, s: f64) -> f64 {
        m - (m.powf(2.0 / beta) - s * s).powf(beta / 2.0)
    }

    #[test]
    fn omega_zero_and_symmetry() {
        let m = rel1();
        let w = omega(&m, &[0.0]).unwrap();
        assert_eq!(w.value, 0.0);
        let a = omega(&m, &[0.4]).unwrap().value;
        let b = omega(&m, &[-0.4]).unwrap().value;
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn omega_relativistic_closed_form() {
        let m = rel1();
        for &s in &[0.2, 0.5, 0.9, 1.0] {
            let w = omega_radial(&m, s).unwrap();
            assert!(!w.diverged, "s={s}");
            let exact = rel_omega(1.0, 1.0, s);
            assert!(
                (w.value - exact).abs() < 1e-6,
                "s={s}: {} vs {exact}",
                w.value
            );
        }
        // |xi| = 0.6 -> 1 - 0.8
        let w = omega(&m, &[0.6]).unwrap();
        assert!((w.value - 0.2).abs() < 1e-7);
    }

    #[test]
    fn omega_star_values() {
        let w = omega_star(&rel1()).unwrap();
        assert!(!w.diverged);
        assert!((w.value - 1.0).abs() < 1e-8, "{}", w.value);
        let m2 = LevyModel::relativistic(1, 0.5, 2.0).unwrap();
        let w2 = omega_star(&m2).unwrap();
        assert!((w2.value - 2.0).abs() < 1e-8, "{}", w2.value);
    }

    #[test]
    fn omega_star_tempered_finite() {
        // delta = (d+3)/2 + 0.5 makes the boundary moment integrable
        let m = LevyModel::tempered(1, 1.0, 1.0, 1.0, 2.5).unwrap();
        let w = omega_star(&m).unwrap();
        assert!(!w.diverged);
        assert!(w.value.is_finite() && w.value > 0.0);
    }

    #[test]
    fn omega_diverges_beyond_kappa() {
        let w = omega(&rel1(), &[1.2]).unwrap();
        assert!(w.diverged);
        assert!(w.value.is_infinite());
    }

    #[test]
    fn omega_subexponential_unsupported() {
        let m = LevyModel::pure_stable(1, 1.0).unwrap();
        assert_eq!(omega(&m, &[0.0]).unwrap().value, 0.0);
        assert!(matches!(
            omega(&m, &[0.5]),
            Err(Error::UnsupportedProfile(_))
        ));
    }

    #[test]
    fn restricted_sides_add_up() {
        let m = rel1();
        let s = [0.7];
        for &r in &[0.5, 2.0, 7.0] {
            let small = omega_restricted(&m, &s, r, Side::Small).unwrap();
            let large = omega_restricted(&m, &s, r, Side::Large).unwrap();
            let total = omega(&m, &s).unwrap();
            let sum = small.value + large.value;
            assert!(
                (sum - total.value).abs() < 1e-8 * total.value,
                "r={r}: {sum} vs {}",
                total.value
            );
        }
        // small side is finite even beyond kappa
        let w = omega_restricted(&m, &[2.0], 5.0, Side::Small).unwrap();
        assert!(!w.diverged && w.value.is_finite());
        assert_eq!(
            omega_restricted(&m, &[0.0], 1.0, Side::Small).unwrap().value,
            0.0
        );
    }

    #[test]
    fn omega_prime_closed_form_and_monotone() {
        let m = rel1();
        let theta = [1.0];
        // closed form s / sqrt(1 - s^2) at s = 0.6
        let v = omega_prime(&m, 0.6, &theta).unwrap();
        assert!((v - 0.75).abs() < 1e-6, "{v}");
        // positive and increasing
        let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
        let mut prev = 0.0;
        for &s in &grid {
            let p = omega_prime(&m, s, &theta).unwrap();
            assert!(p > prev, "s={s}");
            prev = p;
        }
        // finite-difference cross-check at s = 0.3
        let h = 1e-4;
        let fd = (omega_radial(&m, 0.3 + h).unwrap().value
            - omega_radial(&m, 0.3 - h).unwrap().value)
            / (2.0 * h);
        let p = omega_prime(&m, 0.3, &theta).unwrap();
        assert!((p - fd).abs() < 1e-5 * p, "{p} vs {fd}");
    }

    #[test]
    fn gamma_alpha_relativistic() {
        let m = rel1();
        let theta = [1.0];
        // gamma = sqrt(2 alpha - alpha^2) below the threshold
        let g = gamma_alpha(&m, 0.5, &theta).unwrap();
        assert!((g - 0.75_f64.sqrt()).abs() < 1e-7, "{g}");
        // above the threshold the rate saturates at kappa
        let g2 = gamma_alpha(&m, 2.0, &theta).unwrap();
        assert!((g2 - 1.0).abs() < 1e-12);
        // round trip
        let g3 = gamma_alpha(&m, 0.3, &theta).unwrap();
        let back = omega_radial(&m, g3).unwrap().value;
        assert!((back - 0.3).abs() < 1e-8, "{back}");
    }

    #[test]
    fn decay_curve_monotone_capped() {
        let m = rel1();
        let alphas = [0.1, 0.3, 0.6, 0.9, 1.0, 1.5, 2.0];
        let c = decay_rate_curve(&m, &alphas, &[1.0]).unwrap();
        assert!((c.omega_star_kappa - 1.0).abs() < 1e-8);
        for w in c.rates.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
        for (&a, &g) in c.alphas.iter().zip(&c.rates) {
            assert!(g <= c.kappa + 1e-12);
            if a >= c.omega_star_kappa {
                assert!((g - c.kappa).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn omega_strictly_convex_inside() {
        let m = rel1();
        let grid: Vec<f64> = (1..=9).map(|k| 0.1 * k as f64).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&s| omega_radial(&m, s).unwrap().value)
            .collect();
        for w in vals.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] > 0.0);
        }
    }

    #[test]
    fn exp_moment_examples() {
        let m = rel1();
        // xi = 0: the big-jump mass
        let w = exp_moment(&m, &[0.0]).unwrap();
        let mass = m.big_jump_mass(1.0).unwrap();
        assert!((w.value - mass).abs() < 1e-9 * mass);
        // boundary |xi| = kappa: finite (tail r^{-3/2} integrable)
        let wb = exp_moment(&m, &[1.0]).unwrap();
        assert!(!wb.diverged && wb.value.is_finite());
        // beyond kappa: diverges
        let wd = exp_moment(&m, &[1.2]).unwrap();
        assert!(wd.diverged);
    }
}
