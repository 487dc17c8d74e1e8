//! Least-squares extraction of exponential decay rates and power-law
//! exponents from kernel grids, plus pointwise comparability reports and
//! the resolvent rate-transition sweep across the spectral threshold.

use crate::error::{Error, Result};
use crate::expmom;
use crate::kernels::{self, KernelGrid};
use crate::model::LevyModel;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fitted model `log v = -rate * x + power * log x + const`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub power: f64,
    pub constant: f64,
    pub window: (f64, f64),
    pub rms_residual: f64,
    pub n_points: usize,
    /// Set when `rms_residual` exceeds 0.05: the model family does not
    /// describe the data well and `rate` should not be trusted.
    pub poor_fit: bool,
}

/// Pointwise bounds of a ratio of two positive grids over a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityReport {
    pub inf_ratio: f64,
    pub sup_ratio: f64,
    /// `sup_ratio / inf_ratio`, the two-sided comparability band.
    pub band: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Resolvent decay rates across a sweep of `alpha` values, with the
/// analytic prediction `gamma_alpha` for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionCurve {
    pub alphas: Vec<f64>,
    pub fitted_rates: Vec<f64>,
    pub predicted_rates: Vec<f64>,
    pub omega_star: f64,
}

impl TransitionCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,fitted_rate,predicted_rate,residual\n");
        for i in 0..self.alphas.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.alphas[i],
                self.fitted_rates[i],
                self.predicted_rates[i],
                self.fitted_rates[i] - self.predicted_rates[i],
            ));
        }
        out
    }
}

const RESIDUAL_FLAG: f64 = 0.05;

fn check_fit_input(points: &[f64], values: &[f64]) -> Result<()> {
    if points.len() != values.len() {
        return Err(Error::Domain("points/values length mismatch".into()));
    }
    if points.windows(2).any(|w| w[0] >= w[1]) || points.iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain(
            "fit points must be positive and strictly ascending".into(),
        ));
    }
    if values.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::NonPositiveValues);
    }
    Ok(())
}

/// Linear least squares of `log v` against the chosen basis. Columns:
/// `-x`, optionally `log x`, and `1`.
fn ls_fit(
    xs: &[f64],
    vs: &[f64],
    with_rate: bool,
    with_power: bool,
    window: (f64, f64),
) -> Result<DecayFit> {
    let n = xs.len();
    if n < 8 {
        return Err(Error::InsufficientPoints { needed: 8, got: n });
    }
    let mut cols: Vec<Vec<f64>> = Vec::new();
    if with_rate {
        cols.push(xs.iter().map(|&x| -x).collect());
    }
    if with_power {
        cols.push(xs.iter().map(|&x| x.ln()).collect());
    }
    cols.push(vec![1.0; n]);
    let k = cols.len();
    let a = DMatrix::from_fn(n, k, |i, j| cols[j][i]);
    let b = DVector::from_iterator(n, vs.iter().map(|&v| v.ln()));
    let svd = a.clone().svd(true, true);
    let coef = svd
        .solve(&b, 1e-13)
        .map_err(|e| Error::Domain(format!("least squares failed: {e}")))?;
    let resid = &a * &coef - &b;
    let rms = (resid.norm_squared() / n as f64).sqrt();
    let mut idx = 0;
    let rate = if with_rate {
        idx += 1;
        coef[0].max(0.0)
    } else {
        0.0
    };
    let power = if with_power {
        let p = coef[idx];
        idx += 1;
        p
    } else {
        0.0
    };
    Ok(DecayFit {
        rate,
        power,
        constant: coef[idx],
        window,
        rms_residual: rms,
        n_points: n,
        poor_fit: rms > RESIDUAL_FLAG,
    })
}

/// Trims the smallest 20% of radii: the near field is dominated by
/// singular local behaviour, not the tail asymptotics being fitted.
fn default_trim<'a>(points: &'a [f64], values: &'a [f64]) -> (&'a [f64], &'a [f64]) {
    let skip = points.len() / 5;
    (&points[skip..], &values[skip..])
}

/// Fits `log v = -rate x + power log x + c` (power term optional) after
/// trimming the smallest 20% of radii.
pub fn fit_exponential_rate(
    points: &[f64],
    values: &[f64],
    power_correction: bool,
) -> Result<DecayFit> {
    check_fit_input(points, values)?;
    let (xs, vs) = default_trim(points, values);
    if xs.is_empty() {
        return Err(Error::InsufficientPoints { needed: 8, got: 0 });
    }
    ls_fit(xs, vs, true, power_correction, (xs[0], xs[xs.len() - 1]))
}

/// Same fit restricted to radii inside `window`.
pub fn fit_exponential_rate_in(
    points: &[f64],
    values: &[f64],
    power_correction: bool,
    window: (f64, f64),
) -> Result<DecayFit> {
    check_fit_input(points, values)?;
    let (mut xs, mut vs) = (Vec::new(), Vec::new());
    for (&x, &v) in points.iter().zip(values) {
        if window.0 <= x && x <= window.1 {
            xs.push(x);
            vs.push(v);
        }
    }
    ls_fit(&xs, &vs, true, power_correction, window)
}

/// Pure power-law fit `log v = power log x + c` after the default trim.
pub fn fit_powerlaw(points: &[f64], values: &[f64]) -> Result<DecayFit> {
    check_fit_input(points, values)?;
    let (xs, vs) = default_trim(points, values);
    if xs.is_empty() {
        return Err(Error::InsufficientPoints { needed: 8, got: 0 });
    }
    ls_fit(xs, vs, false, true, (xs[0], xs[xs.len() - 1]))
}

/// Extracts fit-worthy points from a kernel grid: unflagged, positive,
/// and with error estimates below 1% of the value.
pub fn grid_fit_points(grid: &KernelGrid) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for i in 0..grid.points.len() {
        let v = grid.values[i];
        if grid.flags[i] == kernels::flag::NONE
            && v > 0.0
            && grid.error_estimates[i] <= 0.01 * v
        {
            xs.push(grid.points[i]);
            vs.push(v);
        }
    }
    (xs, vs)
}

/// Inf/sup of `num/den` over radii in `window`.
pub fn ratio_report(
    points: &[f64],
    num: &[f64],
    den: &[f64],
    window: (f64, f64),
) -> Result<ComparabilityReport> {
    if points.len() != num.len() || points.len() != den.len() {
        return Err(Error::Domain("ratio_report length mismatch".into()));
    }
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    let mut n = 0usize;
    for i in 0..points.len() {
        let x = points[i];
        if x < window.0 || x > window.1 {
            continue;
        }
        if den[i] <= 0.0 || num[i] <= 0.0 {
            return Err(Error::NonPositiveValues);
        }
        let r = num[i] / den[i];
        inf = inf.min(r);
        sup = sup.max(r);
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyWindow);
    }
    Ok(ComparabilityReport {
        inf_ratio: inf,
        sup_ratio: sup,
        band: sup / inf,
        window,
        n_points: n,
    })
}

/// Sweeps the resolvent over `alphas`, fits the exponential decay rate
/// on each grid, and pairs it with the predicted rate `gamma_alpha`.
/// The fit window starts at `max(5, first point)` so local behaviour
/// near the origin does not contaminate the tail rate.
pub fn transition_sweep(
    model: &LevyModel,
    alphas: &[f64],
    points: &[f64],
) -> Result<TransitionCurve> {
    if alphas.is_empty() || alphas.iter().any(|&a| a <= 0.0) {
        return Err(Error::Domain("alphas must be positive".into()));
    }
    let theta = unit_e1(model.dim());
    let omega_star = expmom::omega_star(model)?;
    if omega_star.diverged {
        return Err(Error::UnsupportedProfile(
            "omega diverges at its own threshold".into(),
        ));
    }
    let predicted: Vec<f64> = alphas
        .iter()
        .map(|&a| expmom::gamma_alpha(model, a, &theta))
        .collect::<Result<_>>()?;
    let fitted: Vec<f64> = alphas
        .par_iter()
        .map(|&a| -> Result<f64> {
            let grid = kernels::resolvent_freq(model, a, points)?;
            let (xs, vs) = grid_fit_points(&grid);
            if xs.is_empty() {
                return Err(Error::InsufficientPoints { needed: 8, got: 0 });
            }
            let lo = xs[0].max(5.0);
            let hi = xs[xs.len() - 1];
            let fit = fit_exponential_rate_in(&xs, &vs, true, (lo, hi))?;
            Ok(fit.rate)
        })
        .collect::<Result<_>>()?;
    Ok(TransitionCurve {
        alphas: alphas.to_vec(),
        fitted_rates: fitted,
        predicted_rates: predicted,
        omega_star: omega_star.value,
    })
}

fn unit_e1(dim: usize) -> Vec<f64> {
    let mut theta = vec![0.0; dim];
    theta[0] = 1.0;
    theta
}
