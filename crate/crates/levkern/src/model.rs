//! Levy models: density, characteristic exponent and its maximal function.
//!
//! A [`LevyModel`] fixes the dimension and a radial density profile. The
//! characteristic exponent is
//!
//! `Psi(xi) = int (1 - cos<xi, y>) nu(y) dy`,
//!
//! evaluated in closed form for the stable and relativistic families and by
//! adaptive quadrature of the radial reduction otherwise. The maximal
//! function `Psi*(r) = sup_{|xi|<=r} Psi(xi)` and its generalized inverse
//! drive the frequency cutoffs used by the kernel inversion routines.

use crate::error::{Error, Result};
use crate::profile::ProfileSpec;
use crate::quad::{self, Quad};
use crate::special;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Analytic form of the characteristic exponent, when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedFormPsi {
    /// `Psi(xi) = |xi|^beta`
    Stable { beta: f64 },
    /// `Psi(xi) = (|xi|^2 + m^{2/beta})^{beta/2} - m`
    Relativistic { beta: f64, m: f64 },
}

impl ClosedFormPsi {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            ClosedFormPsi::Stable { beta } => s.abs().powf(beta),
            ClosedFormPsi::Relativistic { beta, m } => {
                (s * s + m.powf(2.0 / beta)).powf(beta / 2.0) - m
            }
        }
    }

    /// Width of the strip `|Im z| < limit` in which the symbol continues
    /// analytically off the real axis; `None` when no such strip exists
    /// (the stable symbol `|xi|^beta` has a branch point at the origin).
    pub fn strip_limit(&self) -> Option<f64> {
        match *self {
            ClosedFormPsi::Stable { .. } => None,
            ClosedFormPsi::Relativistic { beta, m } => Some(m.powf(1.0 / beta)),
        }
    }

    /// `(Re, Im)` of the symbol at `z = u + i v`, valid for `|v| <
    /// strip_limit()`. The branch is the principal one: `w = z^2 +
    /// m^{2/beta}` stays in the right half-plane throughout the strip, so
    /// `w^{beta/2}` is single-valued and continuous there.
    pub fn eval_complex(&self, u: f64, v: f64) -> Option<(f64, f64)> {
        match *self {
            ClosedFormPsi::Stable { .. } => None,
            ClosedFormPsi::Relativistic { beta, m } => {
                let re_w = u * u - v * v + m.powf(2.0 / beta);
                let im_w = 2.0 * u * v;
                let r = re_w.hypot(im_w).powf(beta / 2.0);
                let th = im_w.atan2(re_w) * beta / 2.0;
                Some((r * th.cos() - m, r * th.sin()))
            }
        }
    }

    /// Largest `v > 0` with `alpha + Psi(iv) > 0`, capped by the strip
    /// width: the contour for a resolvent inversion may be shifted up to
    /// (not onto) this height. `None` when no strip exists.
    pub fn resolvent_shift_limit(&self, alpha: f64) -> Option<f64> {
        match *self {
            ClosedFormPsi::Stable { .. } => None,
            ClosedFormPsi::Relativistic { beta, m } => {
                if alpha >= m {
                    Some(m.powf(1.0 / beta))
                } else {
                    Some((m.powf(2.0 / beta) - (m - alpha).powf(2.0 / beta)).sqrt())
                }
            }
        }
    }
}

/// How a [`PsiEvaluation`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    ClosedForm,
    Quadrature,
}

/// Value of the characteristic exponent with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiEvaluation {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: EvalMethod,
}

/// Empirical certificate for the lower scaling property
/// `Psi*(lambda r) >= C2 lambda^alpha Psi*(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingEstimate {
    pub c2: f64,
    pub alpha: f64,
    pub degenerate: bool,
}

/// A symmetric pure-jump Levy model with radial density.
#[derive(Debug, Clone)]
pub struct LevyModel {
    dim: usize,
    profile: ProfileSpec,
    comparability: f64,
    closed_form_psi: Option<ClosedFormPsi>,
    psi_monotone: bool,
}

impl LevyModel {
    /// Builds and validates a model. Checks the Levy integrability of the
    /// density and, when a closed-form exponent is available, cross-checks
    /// it against quadrature on a small probe set.
    pub fn new(dim: usize, profile: ProfileSpec, comparability: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("dimension must be >= 1".into()));
        }
        if comparability < 1.0 {
            return Err(Error::InvalidModel(format!(
                "comparability constant {comparability} must be >= 1"
            )));
        }
        profile.validate()?;
        let closed_form_psi = match &profile {
            ProfileSpec::PureStable { beta } => Some(ClosedFormPsi::Stable { beta: *beta }),
            ProfileSpec::RelativisticStable { beta, m } => Some(ClosedFormPsi::Relativistic {
                beta: *beta,
                m: *m,
            }),
            _ => None,
        };
        let mut model = LevyModel {
            dim,
            profile,
            comparability,
            closed_form_psi,
            psi_monotone: true,
        };
        model.check_levy_integrability()?;
        model.cross_validate_closed_form()?;
        model.psi_monotone = model.check_psi_monotone()?;
        Ok(model)
    }

    pub fn pure_stable(dim: usize, beta: f64) -> Result<Self> {
        Self::new(dim, ProfileSpec::PureStable { beta }, 1.0)
    }

    pub fn relativistic(dim: usize, beta: f64, m: f64) -> Result<Self> {
        Self::new(dim, ProfileSpec::RelativisticStable { beta, m }, 1.0)
    }

    pub fn tempered(dim: usize, beta: f64, kappa: f64, eta: f64, delta: f64) -> Result<Self> {
        Self::new(
            dim,
            ProfileSpec::TemperedStable {
                beta,
                kappa,
                eta,
                delta,
            },
            1.0,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> &ProfileSpec {
        &self.profile
    }

    pub fn comparability(&self) -> f64 {
        self.comparability
    }

    pub fn closed_form_psi(&self) -> Option<ClosedFormPsi> {
        self.closed_form_psi
    }

    /// Exponential rate of the profile, when known analytically.
    pub fn analytic_kappa(&self) -> Option<f64> {
        self.profile.analytic_kappa()
    }

    /// `ln nu(r)`: the exact Levy density used in all quadratures. For the
    /// relativistic family this is the Bessel-K form whose exponent is the
    /// closed-form `Psi`; for the other families it coincides with the
    /// profile.
    pub fn ln_density(&self, r: f64) -> f64 {
        assert!(r > 0.0);
        match &self.profile {
            ProfileSpec::RelativisticStable { beta, m } => {
                let d = self.dim as f64;
                let mu = (d + beta) / 2.0;
                let kap = m.powf(1.0 / beta);
                let ln_c = beta.ln() + 0.5 * (beta - d) * 2.0_f64.ln()
                    + (d + beta) / (2.0 * beta) * m.ln()
                    - 0.5 * d * PI.ln()
                    - special::ln_gamma(1.0 - beta / 2.0);
                ln_c + special::bessel_k_scaled(mu, kap * r).ln() - kap * r - mu * r.ln()
            }
            p => p.ln_value(self.dim, r),
        }
    }

    /// `nu(r)`, see [`ln_density`](Self::ln_density).
    pub fn density(&self, r: f64) -> f64 {
        self.ln_density(r).exp()
    }

    /// Radial surface weight `w(r) = |S^{d-1}| r^{d-1} nu(r)`, so that
    /// `int_{R^d} g(|y|) nu(y) dy = int_0^inf g(r) w(r) dr`.
    pub fn radial_weight(&self, r: f64) -> f64 {
        special::sphere_surface(self.dim) * r.powi(self.dim as i32 - 1) * self.density(r)
    }

    pub fn ln_radial_weight(&self, r: f64) -> f64 {
        special::sphere_surface(self.dim).ln() + (self.dim as f64 - 1.0) * r.ln()
            + self.ln_density(r)
    }

    /// `ln(e^{s r} w(r))`. The tilt is folded into the exponent
    /// analytically per family: computing `s r` and the density's
    /// `-kappa r` separately loses `~ r * eps` absolute accuracy in the
    /// exponent, which is fatal in the near-critical regime `s ~ kappa`
    /// where the product stays O(1) out to huge radii.
    pub fn ln_radial_weight_tilted(&self, r: f64, s: f64) -> f64 {
        assert!(r > 0.0);
        let d = self.dim as f64;
        let geom = special::sphere_surface(self.dim).ln() + (d - 1.0) * r.ln();
        match self.profile() {
            ProfileSpec::RelativisticStable { beta, m } => {
                let mu = (d + beta) / 2.0;
                let kap = m.powf(1.0 / beta);
                let ln_c = beta.ln() + 0.5 * (beta - d) * 2.0_f64.ln()
                    + (d + beta) / (2.0 * beta) * m.ln()
                    - 0.5 * d * PI.ln()
                    - special::ln_gamma(1.0 - beta / 2.0);
                geom + ln_c + special::bessel_k_scaled(mu, kap * r).ln() + (s - kap) * r
                    - mu * r.ln()
            }
            ProfileSpec::TemperedStable {
                beta,
                kappa,
                eta,
                delta,
            } => {
                let power = if r <= 1.0 { -(d + beta) } else { -delta };
                let tilt = if *eta == 1.0 {
                    (s - kappa) * r
                } else {
                    s * r - kappa * r.powf(*eta)
                };
                geom + power * r.ln() + tilt
            }
            _ => geom + self.ln_density(r) + s * r,
        }
    }

    /// Profile evaluation `f(|x|)`: the radial representative of the
    /// density sandwich. Errors when `x = 0` where the density is singular.
    pub fn nu_density(&self, x: &[f64]) -> Result<f64> {
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::Domain("nu is singular at the origin".into()));
        }
        Ok(self.profile.value(self.dim, r))
    }

    /// Total mass of the large-jump part, `|nu_bar_r| = nu({|y| > r})`.
    pub fn big_jump_mass(&self, r: f64) -> Result<f64> {
        let q = quad::integrate_tail(|u| self.radial_weight(u), r, 1e-10, 1e-300)?;
        Ok(q.value)
    }

    fn check_levy_integrability(&self) -> Result<()> {
        // int (1 ^ |y|^2) nu(y) dy, split at |y| = 1; r = v^4 tames the
        // short-range singularity r^{1-beta+d-1-d}.
        let head = quad::integrate(
            |v: f64| {
                let r = v.powi(4);
                r * r * self.radial_weight(r) * 4.0 * v.powi(3)
            },
            0.0,
            1.0,
            1e-8,
            1e-300,
        )
        .map_err(|e| Error::InvalidModel(format!("small-jump integral failed: {e}")))?;
        let tail = quad::integrate_tail(|r| self.radial_weight(r), 1.0, 1e-8, 1e-300)
            .map_err(|e| Error::InvalidModel(format!("large-jump mass not finite: {e}")))?;
        let total = head.value + tail.value;
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "Levy integral not finite/positive: {total}"
            )));
        }
        Ok(())
    }

    fn cross_validate_closed_form(&self) -> Result<()> {
        let Some(cf) = self.closed_form_psi else {
            return Ok(());
        };
        for &s in &[0.5, 1.0, 2.0, 5.0] {
            let q = self.psi_quadrature_radial(s)?;
            let exact = cf.eval(s);
            if (q.value - exact).abs() > 1e-6 * (1.0 + exact) {
                return Err(Error::InvalidModel(format!(
                    "closed-form exponent mismatch at |xi| = {s}: quadrature {} vs {exact}",
                    q.value
                )));
            }
        }
        Ok(())
    }

    fn check_psi_monotone(&self) -> Result<bool> {
        let mut prev = 0.0_f64;
        let mut s = 0.01_f64;
        while s <= 1.0e3 {
            let v = self.psi_radial_value(s)?;
            if v + 1e-12 * (1.0 + v) < prev {
                return Ok(false);
            }
            prev = v;
            s *= 4.0;
        }
        Ok(true)
    }

    /// Characteristic exponent at `xi`.
    pub fn psi(&self, xi: &[f64]) -> Result<PsiEvaluation> {
        self.check_dim(xi)?;
        self.psi_radial(norm(xi))
    }

    /// Characteristic exponent at radius `s = |xi|`.
    pub fn psi_radial(&self, s: f64) -> Result<PsiEvaluation> {
        if s == 0.0 {
            return Ok(PsiEvaluation {
                value: 0.0,
                abs_error_estimate: 0.0,
                method: self
                    .closed_form_psi
                    .map_or(EvalMethod::Quadrature, |_| EvalMethod::ClosedForm),
            });
        }
        if let Some(cf) = self.closed_form_psi {
            return Ok(PsiEvaluation {
                value: cf.eval(s),
                abs_error_estimate: 0.0,
                method: EvalMethod::ClosedForm,
            });
        }
        let q = self.psi_quadrature_radial(s)?;
        Ok(PsiEvaluation {
            value: q.value,
            abs_error_estimate: q.abs_error,
            method: EvalMethod::Quadrature,
        })
    }

    /// Scalar convenience used by inner loops.
    pub fn psi_radial_value(&self, s: f64) -> Result<f64> {
        Ok(self.psi_radial(s)?.value)
    }

    /// Quadrature of the radial reduction of `Psi`, independent of any
    /// closed form.
    pub fn psi_quadrature_radial(&self, s: f64) -> Result<Quad> {
        self.psi_truncated_quadrature(s, f64::INFINITY)
    }

    /// `int_{|y| <= r_max} (1 - cos<xi, y>) nu(y) dy` at `s = |xi|`
    /// (`r_max = inf` gives the full exponent). The integral splits at
    /// `min(1/s, 1, r_max)`: below it the `1 - cos` factor is
    /// oscillation-free and tames the short-range singularity; above it
    /// the cosine part is summed between its zeros with acceleration.
    pub fn psi_truncated_quadrature(&self, s: f64, r_max: f64) -> Result<Quad> {
        if s == 0.0 {
            return Ok(Quad::ZERO);
        }
        if r_max <= 0.0 {
            return Err(Error::Domain("truncation radius must be > 0".into()));
        }
        let d = self.dim;
        let split = (1.0 / s).min(1.0).min(r_max);
        // head: r = v^4 substitution over [0, split]
        let head = quad::integrate(
            |v: f64| {
                let r = v.powi(4);
                special::one_minus_cos_sphere_avg(d, s * r)
                    * self.radial_weight(r)
                    * 4.0
                    * v.powi(3)
            },
            0.0,
            split.powf(0.25),
            1e-10,
            1e-300,
        )?;
        if r_max <= split {
            return Ok(head);
        }
        // beyond: int (1 - M_d(s r)) w(r) dr = mass - oscillatory part,
        // with finite truncations written as differences of infinite tails
        let mass = if r_max.is_finite() {
            quad::integrate(|r| self.radial_weight(r), split, r_max, 1e-10, 1e-300)?
        } else {
            quad::integrate_tail(|r| self.radial_weight(r), split, 1e-10, 1e-300)?
        };
        let scale = head.value.abs() + mass.value.abs();
        let abs_tol = 1e-13 * scale.max(1e-280);
        let mut osc = self.cos_avg_tail(s, split, 1e-10, abs_tol)?;
        if r_max.is_finite() {
            let beyond = self.cos_avg_tail(s, r_max, 1e-10, abs_tol)?;
            osc = Quad {
                value: osc.value - beyond.value,
                abs_error: osc.abs_error + beyond.abs_error,
            };
        }
        Ok(Quad {
            value: head.value + mass.value - osc.value,
            abs_error: head.abs_error + mass.abs_error + osc.abs_error,
        })
    }

    /// `int_a^inf M_d(s r) w(r) dr` where `M_d` is the spherical cosine
    /// average (plain cosine in d = 1).
    fn cos_avg_tail(&self, s: f64, a: f64, rel_tol: f64, abs_tol: f64) -> Result<Quad> {
        let d = self.dim;
        if d == 1 {
            let zeros = move |k: usize| (0.5 + k as f64) * PI / s;
            quad::oscillatory_tail(
                |r: f64| (s * r).cos() * self.radial_weight(r),
                zeros,
                a,
                rel_tol,
                abs_tol,
            )
        } else {
            let nu_ord = d as f64 / 2.0 - 1.0;
            let pref = (special::ln_gamma(d as f64 / 2.0)).exp();
            let zeros = move |k: usize| special::bessel_j_zero(nu_ord, k + 1) / s;
            quad::oscillatory_tail(
                move |r: f64| {
                    let u = s * r;
                    pref * (2.0 / u).powf(nu_ord)
                        * special::bessel_j(nu_ord, u)
                        * self.radial_weight(r)
                },
                zeros,
                a,
                rel_tol,
                abs_tol,
            )
        }
    }

    /// Maximal function `Psi*(r) = sup_{|xi| <= r} Psi(xi)`.
    ///
    /// For radial non-decreasing exponents this is `Psi(r e_1)`; if the
    /// construction-time monotonicity probe failed, a dyadic grid sup is
    /// used instead.
    pub fn psi_star(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        if self.psi_monotone {
            return self.psi_radial_value(r);
        }
        // grid sup with dyadic refinement
        let mut best = 0.0_f64;
        let mut n = 8usize;
        loop {
            let mut cur = 0.0_f64;
            for i in 1..=n {
                cur = cur.max(self.psi_radial_value(r * i as f64 / n as f64)?);
            }
            if cur <= best * (1.0 + 1e-10) || n >= 1024 {
                return Ok(cur.max(best));
            }
            best = best.max(cur);
            n *= 2;
        }
    }

    /// Generalized inverse `Psi*_-(s) = sup{r > 0 : Psi*(r) = s}`.
    pub fn psi_star_inv(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Err(Error::Domain("psi_star_inv needs s > 0".into()));
        }
        let mut hi = 1.0_f64;
        let mut guard = 0;
        while self.psi_star(hi)? < s {
            hi *= 2.0;
            guard += 1;
            if guard > 400 {
                return Err(Error::UnboundedBracket(format!(
                    "Psi* plateaus below {s}"
                )));
            }
        }
        let mut lo = 0.0_f64;
        // cheap bisection; cannot borrow self in quad::bisect closure with ?
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (hi - lo) <= 1e-12 * mid {
                break;
            }
            if self.psi_star(mid)? < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Grid certificate for the lower scaling property: the largest
    /// `alpha` on a 0.05-grid admitting a sandwich constant `C2 >= 0.5`
    /// over all probed `(lambda, r)` pairs, and that constant.
    pub fn estimate_lower_scaling(
        &self,
        r_grid: &[f64],
        lambda_grid: &[f64],
    ) -> Result<ScalingEstimate> {
        if r_grid.is_empty() || lambda_grid.is_empty() {
            return Err(Error::Domain("scaling estimate needs nonempty grids".into()));
        }
        if lambda_grid.iter().any(|&l| l < 1.0) {
            return Err(Error::Domain("lambda grid entries must be >= 1".into()));
        }
        let psi_r: Vec<f64> = r_grid
            .iter()
            .map(|&r| self.psi_star(r))
            .collect::<Result<_>>()?;
        let mut ratios: Vec<(f64, f64)> = Vec::new(); // (lambda, Psi*(lr)/Psi*(r))
        for (&r, &pr) in r_grid.iter().zip(&psi_r) {
            for &l in lambda_grid {
                ratios.push((l, self.psi_star(l * r)? / pr));
            }
        }
        let mut alpha = 2.0_f64;
        while alpha >= 0.049 {
            let c2 = ratios
                .iter()
                .map(|&(l, q)| (q / l.powf(alpha)).min(1.0))
                .fold(f64::INFINITY, f64::min);
            if c2 >= 0.5 {
                return Ok(ScalingEstimate {
                    c2,
                    alpha,
                    degenerate: false,
                });
            }
            alpha -= 0.05;
        }
        let c2 = ratios
            .iter()
            .map(|&(l, q)| (q / l.powf(0.05)).min(1.0))
            .fold(f64::INFINITY, f64::min);
        Ok(ScalingEstimate {
            c2,
            alpha: 0.05,
            degenerate: true,
        })
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Domain(format!(
                "point has dimension {}, model has {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_stable_psi_exact_normalization() {
        // quadrature Psi vs closed form |xi|^beta, beta = 1.5, d = 1
        let m = LevyModel::pure_stable(1, 1.5).unwrap();
        let q = m.psi_quadrature_radial(2.0).unwrap();
        let exact = 2.0_f64.powf(1.5);
        assert!(
            (q.value - exact).abs() < 1e-8 * exact,
            "{} vs {exact}",
            q.value
        );
    }

    #[test]
    fn cauchy_density_normalization() {
        let m = LevyModel::pure_stable(1, 1.0).unwrap();
        // nu(2) = (1/pi) 2^{-2}
        let v = m.nu_density(&[2.0]).unwrap();
        assert!((v - 0.25 / PI).abs() < 1e-14);
        // radial symmetry
        assert_eq!(v, m.nu_density(&[-2.0]).unwrap());
    }

    #[test]
    fn relativistic_psi_closed_form() {
        let m = LevyModel::relativistic(1, 1.0, 1.0).unwrap();
        let p = m.psi(&[1.0]).unwrap();
        assert_eq!(p.method, EvalMethod::ClosedForm);
        assert!((p.value - (2.0_f64.sqrt() - 1.0)).abs() < 1e-14);
        assert_eq!(m.psi(&[0.0]).unwrap().value, 0.0);
        // the construction already cross-validated quadrature vs closed form
        let q = m.psi_quadrature_radial(1.0).unwrap();
        assert!((q.value - (2.0_f64.sqrt() - 1.0)).abs() < 1e-7);
    }

    #[test]
    fn relativistic_profile_vs_density() {
        // nu_density reports the profile, not the Bessel-form density
        let m = LevyModel::relativistic(1, 1.0, 1.0).unwrap();
        let exact = 3.0_f64.powf(-1.5) * (-3.0_f64).exp();
        assert!((m.nu_density(&[3.0]).unwrap() - exact).abs() < 1e-15);
        // they are comparable: ratio within [1/3, 3] here
        let ratio = m.density(3.0) / exact;
        assert!(ratio > 0.3 && ratio < 3.0, "ratio {ratio}");
    }

    #[test]
    fn nu_density_origin_is_error() {
        let m = LevyModel::pure_stable(1, 1.0).unwrap();
        assert!(m.nu_density(&[0.0]).is_err());
    }

    #[test]
    fn psi_star_monotone_and_inverse_roundtrip() {
        let m = LevyModel::relativistic(1, 1.0, 1.0).unwrap();
        assert_eq!(m.psi_star(0.0).unwrap(), 0.0);
        let a = m.psi_star(1.0).unwrap();
        assert!((a - (2.0_f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!(m.psi_star(2.0).unwrap() >= a);
        // inverse of the closed form at s = sqrt(2) - 1 is 1
        let r = m.psi_star_inv(2.0_f64.sqrt() - 1.0).unwrap();
        assert!((r - 1.0).abs() < 1e-8, "{r}");
        for &s in &[0.1, 1.0, 10.0] {
            let r = m.psi_star_inv(s).unwrap();
            let back = m.psi_star(r).unwrap();
            assert!((back - s).abs() < 1e-8 * s, "s={s}: {back}");
        }
        // non-decreasing inverse
        let mut prev = 0.0;
        for &s in &[0.01, 0.1, 1.0, 10.0, 100.0] {
            let r = m.psi_star_inv(s).unwrap();
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn scaling_estimates() {
        let lambdas: Vec<f64> = (0..7).map(|k| 10.0_f64.powi(k)).collect();
        let rs: Vec<f64> = (-2..=2).map(|k| 10.0_f64.powi(k)).collect();
        let m = LevyModel::pure_stable(1, 1.5).unwrap();
        let est = m.estimate_lower_scaling(&rs, &lambdas).unwrap();
        assert!(est.alpha >= 1.45, "alpha {}", est.alpha);
        assert!(!est.degenerate);
        let m2 = LevyModel::relativistic(1, 1.0, 1.0).unwrap();
        let est2 = m2.estimate_lower_scaling(&rs, &lambdas).unwrap();
        assert!(est2.alpha >= 0.95, "alpha {}", est2.alpha);
        // certificate holds on every probed pair by construction
        for &r in &rs {
            for &l in &lambdas {
                let lhs = m2.psi_star(l * r).unwrap();
                let rhs = est2.c2 * l.powf(est2.alpha) * m2.psi_star(r).unwrap();
                assert!(lhs >= rhs * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn tempered_model_constructs() {
        let m = LevyModel::tempered(1, 1.0, 1.0, 0.5, 0.0).unwrap();
        let p = m.psi(&[1.0]).unwrap();
        assert_eq!(p.method, EvalMethod::Quadrature);
        assert!(p.value > 0.0);
        // symmetry
        let q = m.psi(&[-1.0]).unwrap();
        assert!((p.value - q.value).abs() <= 1e-12 * p.value);
    }

    #[test]
    fn complex_symbol_extends_real_one() {
        let cf = ClosedFormPsi::Relativistic { beta: 1.3, m: 2.0 };
        for &u in &[0.1, 1.0, 7.5, 123.0] {
            // on the real axis the continuation reduces to the real symbol
            let (re, im) = cf.eval_complex(u, 0.0).unwrap();
            assert!((re - cf.eval(u)).abs() <= 1e-14 * cf.eval(u).abs().max(1.0));
            assert_eq!(im, 0.0);
            // reflection symmetry Psi(-conj z) = conj Psi(z)
            let (re2, im2) = cf.eval_complex(-u, 0.7).unwrap();
            let (re3, im3) = cf.eval_complex(u, 0.7).unwrap();
            assert!((re2 - re3).abs() <= 1e-14 * re3.abs().max(1.0));
            assert!((im2 + im3).abs() <= 1e-14 * im3.abs().max(1.0));
        }
        // on the imaginary axis, -Psi(iv) is the exponential-moment value
        let m_pow = 2.0_f64.powf(2.0 / 1.3);
        let v = 0.5 * 2.0_f64.powf(1.0 / 1.3);
        let (re, im) = cf.eval_complex(0.0, v).unwrap();
        let exact = (m_pow - v * v).powf(1.3 / 2.0) - 2.0;
        assert!((re - exact).abs() <= 1e-14);
        assert!(im.abs() <= 1e-300);
        // shift limits: pole height below the strip, saturating at it
        let strip = cf.strip_limit().unwrap();
        let lo = cf.resolvent_shift_limit(0.5).unwrap();
        assert!(lo > 0.0 && lo < strip);
        assert_eq!(cf.resolvent_shift_limit(5.0).unwrap(), strip);
        // the stable symbol has no strip
        let st = ClosedFormPsi::Stable { beta: 1.5 };
        assert!(st.strip_limit().is_none());
        assert!(st.eval_complex(1.0, 0.5).is_none());
    }

    #[test]
    fn levy_integrability_rejects_fat_profile() {
        // tabulated profile that does not decay: infinite mass at infinity
        let p = ProfileSpec::CustomTabulated {
            radii: vec![1.0, 1e6],
            values: vec![1.0, 0.999_999],
        };
        assert!(LevyModel::new(1, p, 1.0).is_err());
    }
}
