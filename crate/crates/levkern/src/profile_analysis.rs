//! Profile diagnostics: the convolution-domination functional `K_f`,
//! shift-comparability constants, and decay-class certificates.
//!
//! `K_f(r)` measures how much of the profile's convolution square
//! survives when both factors are restricted to jumps larger than `r`:
//!
//! `K_f(r) = sup_{|x| >= 1} int_{|y-x|>r, |y|>r} f(|x-y|) f(|y|) dy / f(|x|)`.
//!
//! Its vanishing as `r -> infinity` is the key structural assumption for
//! the kernel comparability results; here the sup is replaced by a finite
//! probe max with a trend report.

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::profile::ProfileSpec;
use crate::quad;
use crate::special;
use serde::{Deserialize, Serialize};

/// Direction of the probe sequence at its tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Decreasing,
    Flat,
    Increasing,
}

/// Finite-probe estimate of `K_f(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KfReport {
    pub r: f64,
    pub kf: f64,
    pub argmax_probe: f64,
    pub trend: Trend,
}

/// Decay class of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileClass {
    /// `log f(r)/r -> 0`.
    Subexponential,
    /// `f(r) = e^{-kappa r} h(r)` with subexponential `h`.
    Exponential { kappa: f64 },
    /// `log f(r)/r -> -infinity`: outside the supported family.
    SuperExponentialRejected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileClassification {
    pub class: ProfileClass,
    /// `log h(r)/r` at the probe radii (h = f for the subexponential
    /// class); must drift to 0 for a valid exponential classification.
    pub h_tail_slope_probe: Vec<f64>,
}

/// Lower bound certificate `f(r) >= c_tilde e^{-eps r}` over the probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubexpCertificate {
    pub c_tilde: f64,
    pub attained_at: f64,
    /// False when `f e^{eps r}` is still decreasing at the last probes,
    /// i.e. the probe range cannot support the claimed lower bound.
    pub tail_increasing: bool,
}

fn ln_f(model: &LevyModel, r: f64) -> f64 {
    model.profile().ln_value(model.dim(), r)
}

/// `K_f(r)` estimated over probe positions along the first axis.
pub fn kf(model: &LevyModel, r: f64, x_probe: &[f64]) -> Result<KfReport> {
    if r < 1.0 {
        return Err(Error::Domain("kf needs r >= 1".into()));
    }
    if x_probe.is_empty() || x_probe.iter().any(|&x| x < 1.0) {
        return Err(Error::Domain("probe radii must be >= 1".into()));
    }
    let mut best = f64::NEG_INFINITY;
    let mut argmax = x_probe[0];
    let mut last_two = [0.0_f64; 2];
    for (i, &x) in x_probe.iter().enumerate() {
        let v = kf_at(model, r, x)?;
        if v > best {
            best = v;
            argmax = x;
        }
        if i + 2 >= x_probe.len() {
            last_two[if i + 2 == x_probe.len() { 0 } else { 1 }] = v;
        }
    }
    let trend = if x_probe.len() < 2 {
        Trend::Flat
    } else if last_two[1] > last_two[0] * 1.01 {
        Trend::Increasing
    } else if last_two[1] < last_two[0] * 0.99 {
        Trend::Decreasing
    } else {
        Trend::Flat
    };
    Ok(KfReport {
        r,
        kf: best,
        argmax_probe: argmax,
        trend,
    })
}

fn kf_at(model: &LevyModel, r: f64, x: f64) -> Result<f64> {
    let integral = match model.dim() {
        1 => kf_integral_1d(model, r, x)?,
        _ => kf_integral_bipolar(model, r, x)?,
    };
    Ok(integral * (-ln_f(model, x)).exp())
}

/// The restricted convolution integral in d = 1:
/// `2 int_r^inf f(u) f(x+u) du + int_r^{x-r} f(x-y) f(y) dy`.
fn kf_integral_1d(model: &LevyModel, r: f64, x: f64) -> Result<f64> {
    let outer = quad::integrate_tail(
        |u: f64| (ln_f(model, u) + ln_f(model, x + u)).exp(),
        r,
        1e-9,
        1e-300,
    )?;
    let mut total = 2.0 * outer.value;
    if x > 2.0 * r {
        let inner = quad::integrate(
            |y: f64| (ln_f(model, x - y) + ln_f(model, y)).exp(),
            r,
            x - r,
            1e-9,
            1e-300,
        )?;
        total += inner.value;
    }
    Ok(total)
}

/// Bipolar reduction for d >= 2: with `s = |y|`, `u = |x - y|`,
///
/// `int F dy = omega_{d-2} 2^{3-d} x^{2-d} int int s u (A B)^{(d-3)/2} F du ds`
///
/// where `A = u^2 - (s-x)^2`, `B = (s+x)^2 - u^2`, over the triangle
/// `|s - x| < u < s + x` intersected with `s > r`, `u > r`.
fn kf_integral_bipolar(model: &LevyModel, r: f64, x: f64) -> Result<f64> {
    let d = model.dim() as f64;
    let omega = special::sphere_surface(model.dim() - 1);
    let pref = omega * 2.0_f64.powf(3.0 - d) * x.powf(2.0 - d);
    let expo = (d - 3.0) / 2.0;
    let inner = |s: f64| -> f64 {
        let lo = (s - x).abs().max(r);
        let hi = s + x;
        if lo >= hi {
            return 0.0;
        }
        let q = quad::integrate(
            |u: f64| {
                let a = u * u - (s - x) * (s - x);
                let b = (s + x) * (s + x) - u * u;
                if a <= 0.0 || b <= 0.0 {
                    return 0.0;
                }
                s * u * (a * b).powf(expo) * (ln_f(model, s) + ln_f(model, u)).exp()
            },
            lo,
            hi,
            1e-8,
            1e-300,
        );
        q.map(|v| v.value).unwrap_or(f64::NAN)
    };
    let outer = quad::integrate_tail(inner, r, 1e-7, 1e-300)?;
    if !outer.value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            partial: outer.value,
            abs_error: f64::INFINITY,
            context: "bipolar kf integral".into(),
        });
    }
    Ok(pref * outer.value)
}

/// Shift-comparability constant: `sup_{s >= 3r} f(s - r)/f(s)`, probed
/// decade by decade until three consecutive decade endpoints agree within
/// 1%. Errors when the ratio keeps growing (super-exponential profile).
pub fn comparability_constant(model: &LevyModel, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain("comparability needs r > 0".into()));
    }
    let ratio = |s: f64| (ln_f(model, s - r) - ln_f(model, s)).exp();
    let per_decade = 64usize;
    let mut sup = 1.0_f64;
    let mut decade_ends: Vec<f64> = Vec::new();
    let mut s_lo = 3.0 * r;
    for _ in 0..12 {
        let s_hi = s_lo * 10.0;
        for i in 0..per_decade {
            let s = s_lo * (s_hi / s_lo).powf(i as f64 / per_decade as f64);
            sup = sup.max(ratio(s));
        }
        decade_ends.push(ratio(s_hi));
        let n = decade_ends.len();
        if n >= 3 {
            let (a, b, c) = (decade_ends[n - 3], decade_ends[n - 2], decade_ends[n - 1]);
            if (b - a).abs() <= 0.01 * a && (c - b).abs() <= 0.01 * b {
                return Ok(sup.max(c));
            }
            if c > b * 1.01 && b > a * 1.01 {
                return Err(Error::UnsupportedProfile(
                    "shift ratio keeps growing: profile decays super-exponentially".into(),
                ));
            }
        }
        s_lo = s_hi;
    }
    Err(Error::QuadratureNonConvergence {
        partial: sup,
        abs_error: f64::INFINITY,
        context: "comparability ratio did not stabilize within 12 decades".into(),
    })
}

/// Classifies a profile by the limit of `log f(r)/r`, estimated with
/// Aitken extrapolation on the last three probes (naive last-point
/// estimates are biased by slowly decaying `log r / r` corrections).
pub fn classify_profile(
    profile: &ProfileSpec,
    dim: usize,
    probe_radii: &[f64],
) -> Result<ProfileClassification> {
    profile.validate()?;
    if probe_radii.len() < 4 || probe_radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("need >= 4 ascending probe radii".into()));
    }
    let span = probe_radii[probe_radii.len() - 1] / probe_radii[0];
    if span < 1.0e3 {
        return Err(Error::Domain("probe radii must span >= 3 decades".into()));
    }
    let a: Vec<f64> = probe_radii
        .iter()
        .map(|&r| profile.ln_value(dim, r) / r)
        .collect();
    let n = a.len();
    let d1 = a[n - 2] - a[n - 3];
    let d2 = a[n - 1] - a[n - 2];
    // diverging differences: log f(r)/r -> -inf
    if d2 < 0.0 && d2.abs() > d1.abs() * 1.05 {
        return Ok(ProfileClassification {
            class: ProfileClass::SuperExponentialRejected,
            h_tail_slope_probe: a,
        });
    }
    let limit = if (d2 - d1).abs() < 1e-14 * (1.0 + a[n - 1].abs()) {
        a[n - 1]
    } else {
        // Aitken: a_inf = a_last + d2^2 / (d1 - d2)
        a[n - 1] + d2 * d2 / (d1 - d2)
    };
    if limit < -1e-4 {
        let kappa = -limit;
        let h_slopes: Vec<f64> = probe_radii
            .iter()
            .map(|&r| profile.ln_value(dim, r) / r + kappa)
            .collect();
        Ok(ProfileClassification {
            class: ProfileClass::Exponential { kappa },
            h_tail_slope_probe: h_slopes,
        })
    } else {
        Ok(ProfileClassification {
            class: ProfileClass::Subexponential,
            h_tail_slope_probe: a,
        })
    }
}

/// Certificate `f(r) >= c_tilde e^{-eps r}` over the probe set; the tail
/// trend must be increasing for the bound to persist beyond the probes.
pub fn subexp_bound_certificate(
    profile: &ProfileSpec,
    dim: usize,
    epsilon: f64,
    probe_radii: &[f64],
) -> Result<SubexpCertificate> {
    profile.validate()?;
    if epsilon <= 0.0 {
        return Err(Error::Domain("epsilon must be > 0".into()));
    }
    if probe_radii.len() < 2 || probe_radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("need >= 2 ascending probe radii".into()));
    }
    let g: Vec<f64> = probe_radii
        .iter()
        .map(|&r| profile.ln_value(dim, r) + epsilon * r)
        .collect();
    let (mut min_ln, mut attained) = (f64::INFINITY, probe_radii[0]);
    for (i, &v) in g.iter().enumerate() {
        if v < min_ln {
            min_ln = v;
            attained = probe_radii[i];
        }
    }
    let n = g.len();
    Ok(SubexpCertificate {
        c_tilde: min_ln.exp(),
        attained_at: attained,
        tail_increasing: g[n - 1] > g[n - 2],
    })
}
