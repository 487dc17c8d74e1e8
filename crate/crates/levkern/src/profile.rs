//! Radial profiles of Levy densities.
//!
//! A profile is a positive decreasing function `f` on `(0, inf)` that
//! sandwiches the Levy density: `C0^{-1} f(|x|) <= nu(x) <= C0 f(|x|)`.
//! The built-in families cover the pure stable, tempered stable and
//! relativistic stable cases; arbitrary monotone profiles can be supplied
//! as tables.

use crate::error::{Error, Result};
use crate::special::ln_gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parametric or tabulated decreasing profile of a Levy density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `f(r) = (r^{-d-beta} on [0,1], r^{-delta} on (1,inf)) exp(-kappa r^eta)`
    TemperedStable {
        beta: f64,
        kappa: f64,
        eta: f64,
        delta: f64,
    },
    /// `f(r) = c(d, beta) r^{-d-beta}` with `c` normalized so that the
    /// characteristic exponent is exactly `|xi|^beta`.
    PureStable { beta: f64 },
    /// `f(r) = (r^{-d-beta} on [0,1], r^{-(d+beta+1)/2} on (1,inf)) e^{-m^{1/beta} r}`
    RelativisticStable { beta: f64, m: f64 },
    /// Strictly positive, non-increasing values on ascending radii;
    /// log-linear between nodes, last log-slope beyond the last node.
    CustomTabulated { radii: Vec<f64>, values: Vec<f64> },
}

/// Fractional-stable normalization `c(d, beta)` such that the density
/// `c |y|^{-d-beta}` has characteristic exponent `|xi|^beta`.
pub fn stable_normalization(dim: usize, beta: f64) -> f64 {
    let d = dim as f64;
    (beta.ln() + (beta - 1.0) * 2.0_f64.ln() + ln_gamma((d + beta) / 2.0)
        - (d / 2.0) * PI.ln()
        - ln_gamma(1.0 - beta / 2.0))
    .exp()
}

impl ProfileSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProfileSpec::TemperedStable {
                beta,
                kappa,
                eta,
                delta,
            } => {
                if !(0.0 < *beta && *beta < 2.0) {
                    return Err(Error::InvalidModel(format!("beta {beta} not in (0,2)")));
                }
                if *kappa <= 0.0 {
                    return Err(Error::InvalidModel(format!("kappa {kappa} must be > 0")));
                }
                if !(0.0 < *eta && *eta <= 1.0) {
                    return Err(Error::InvalidModel(format!("eta {eta} not in (0,1]")));
                }
                if *delta < 0.0 {
                    return Err(Error::InvalidModel(format!("delta {delta} must be >= 0")));
                }
                Ok(())
            }
            ProfileSpec::PureStable { beta } => {
                if !(0.0 < *beta && *beta < 2.0) {
                    return Err(Error::InvalidModel(format!("beta {beta} not in (0,2)")));
                }
                Ok(())
            }
            ProfileSpec::RelativisticStable { beta, m } => {
                if !(0.0 < *beta && *beta < 2.0) {
                    return Err(Error::InvalidModel(format!("beta {beta} not in (0,2)")));
                }
                if *m <= 0.0 {
                    return Err(Error::InvalidModel(format!("m {m} must be > 0")));
                }
                Ok(())
            }
            ProfileSpec::CustomTabulated { radii, values } => {
                if radii.len() < 2 || radii.len() != values.len() {
                    return Err(Error::InvalidModel(
                        "tabulated profile needs >= 2 aligned nodes".into(),
                    ));
                }
                if radii[0] <= 0.0 || radii.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidModel(
                        "tabulated radii must be positive and ascending".into(),
                    ));
                }
                if values.iter().any(|&v| v <= 0.0) || values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::InvalidModel(
                        "tabulated values must be positive and non-increasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// `ln f(r)` for dimension `dim`; stable down to deep exponential tails.
    pub fn ln_value(&self, dim: usize, r: f64) -> f64 {
        assert!(r > 0.0, "profile is evaluated on (0, inf)");
        let d = dim as f64;
        match self {
            ProfileSpec::TemperedStable {
                beta,
                kappa,
                eta,
                delta,
            } => {
                let power = if r <= 1.0 { -(d + beta) } else { -delta };
                power * r.ln() - kappa * r.powf(*eta)
            }
            ProfileSpec::PureStable { beta } => {
                stable_normalization(dim, *beta).ln() - (d + beta) * r.ln()
            }
            ProfileSpec::RelativisticStable { beta, m } => {
                let power = if r <= 1.0 {
                    -(d + beta)
                } else {
                    -(d + beta + 1.0) / 2.0
                };
                power * r.ln() - m.powf(1.0 / beta) * r
            }
            ProfileSpec::CustomTabulated { radii, values } => {
                if r <= radii[0] {
                    return values[0].ln();
                }
                let n = radii.len();
                match radii.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
                    Ok(i) => values[i].ln(),
                    Err(i) if i < n => {
                        let (r0, r1) = (radii[i - 1], radii[i]);
                        let (v0, v1) = (values[i - 1].ln(), values[i].ln());
                        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
                    }
                    Err(_) => {
                        let (r0, r1) = (radii[n - 2], radii[n - 1]);
                        let slope = (values[n - 1].ln() - values[n - 2].ln()) / (r1 - r0);
                        values[n - 1].ln() + slope * (r - r1)
                    }
                }
            }
        }
    }

    /// Profile value `f(r)`.
    pub fn value(&self, dim: usize, r: f64) -> f64 {
        self.ln_value(dim, r).exp()
    }

    /// Exponential decay rate known analytically: `Some(kappa)` for the
    /// exponential-type built-ins, `None` otherwise (subexponential or
    /// tabulated).
    pub fn analytic_kappa(&self) -> Option<f64> {
        match self {
            ProfileSpec::TemperedStable { kappa, eta, .. } if *eta == 1.0 => Some(*kappa),
            ProfileSpec::RelativisticStable { beta, m } => Some(m.powf(1.0 / beta)),
            _ => None,
        }
    }

    /// True when the profile is subexponential by construction.
    pub fn analytic_subexponential(&self) -> Option<bool> {
        match self {
            ProfileSpec::PureStable { .. } => Some(true),
            ProfileSpec::TemperedStable { eta, .. } => Some(*eta < 1.0),
            ProfileSpec::RelativisticStable { .. } => Some(false),
            ProfileSpec::CustomTabulated { .. } => None,
        }
    }

    /// Stability index of the short-range singularity `r^{-d-beta}`.
    pub fn beta(&self) -> Option<f64> {
        match self {
            ProfileSpec::TemperedStable { beta, .. }
            | ProfileSpec::PureStable { beta }
            | ProfileSpec::RelativisticStable { beta, .. } => Some(*beta),
            ProfileSpec::CustomTabulated { .. } => None,
        }
    }
}
