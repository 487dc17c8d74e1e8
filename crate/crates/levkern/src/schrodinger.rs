//! Bound states of `H = -L + V` for negative potentials, computed
//! through the resolvent fixed point `phi = g_alpha * (|V| phi)`: the
//! integral operator `phi -> int g_alpha(. - z)|V(z)| phi(z) dz` has
//! largest eigenvalue `mu(alpha)`, strictly decreasing in `alpha`, and
//! `mu(alpha) = 1` exactly at a bound-state eigenvalue `lambda = -alpha`.

use crate::decay::{self, DecayFit};
use crate::error::{Error, Result};
use crate::expmom;
use crate::kernels;
use crate::model::LevyModel;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Attractive (nonpositive) potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `V = -v0` on `|x| <= a`, zero outside.
    SquareWell { v0: f64, a: f64 },
    /// `V = -v0 exp(-x^2 / (2 sigma_w^2))`.
    GaussianWell { v0: f64, sigma_w: f64 },
    /// Nonpositive samples on an ascending grid; zero outside its range.
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::SquareWell { v0, a } => {
                if !(*v0 > 0.0) || !(*a > 0.0) {
                    return Err(Error::Domain("square well needs v0 > 0, a > 0".into()));
                }
            }
            PotentialSpec::GaussianWell { v0, sigma_w } => {
                if !(*v0 > 0.0) || !(*sigma_w > 0.0) {
                    return Err(Error::Domain(
                        "gaussian well needs v0 > 0, sigma_w > 0".into(),
                    ));
                }
            }
            PotentialSpec::Tabulated { grid, values } => {
                if grid.len() != values.len() || grid.len() < 2 {
                    return Err(Error::Domain("tabulated potential needs >= 2 nodes".into()));
                }
                if grid.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Domain("potential grid must be ascending".into()));
                }
                if values.iter().any(|&v| v > 0.0 || !v.is_finite()) {
                    return Err(Error::Domain("potential values must be <= 0".into()));
                }
                let peak = values.iter().fold(0.0_f64, |m, &v| m.max(-v));
                if peak > 0.0 {
                    let edge = (-values[0]).max(-values[values.len() - 1]);
                    if edge > 1e-6 * peak {
                        return Err(Error::Domain(
                            "tabulated potential must vanish at its grid edges".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `|V(x)|`.
    pub fn abs_value(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::SquareWell { v0, a } => {
                if x.abs() <= *a {
                    *v0
                } else {
                    0.0
                }
            }
            PotentialSpec::GaussianWell { v0, sigma_w } => {
                v0 * (-x * x / (2.0 * sigma_w * sigma_w)).exp()
            }
            PotentialSpec::Tabulated { grid, values } => {
                let n = grid.len();
                if x < grid[0] || x > grid[n - 1] {
                    return 0.0;
                }
                let i = grid.partition_point(|&g| g < x).min(n - 1).max(1);
                let w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
                -((1.0 - w) * values[i - 1] + w * values[i])
            }
        }
    }

    /// Cell average `(1/h) int_{x-h/2}^{x+h/2} |V|`. Pointwise sampling
    /// at well edges carries an O(h) discretization error; averaging
    /// restores second-order accuracy of the Nystrom scheme.
    pub fn abs_cell_average(&self, x: f64, h: f64) -> f64 {
        match self {
            PotentialSpec::SquareWell { v0, a } => {
                let lo = (x - 0.5 * h).max(-a);
                let hi = (x + 0.5 * h).min(*a);
                v0 * (hi - lo).max(0.0) / h
            }
            _ => {
                let q = crate::quad::integrate(
                    |y| self.abs_value(y),
                    x - 0.5 * h,
                    x + 0.5 * h,
                    1e-12,
                    1e-300,
                );
                q.map(|v| v.value / h).unwrap_or_else(|_| self.abs_value(x))
            }
        }
    }

    /// Radius beyond which the potential is negligible.
    pub fn support_radius(&self) -> f64 {
        match self {
            PotentialSpec::SquareWell { a, .. } => *a,
            // decayed to 1e-12 of the depth
            PotentialSpec::GaussianWell { sigma_w, .. } => {
                sigma_w * (2.0 * 12.0 * std::f64::consts::LN_10).sqrt()
            }
            PotentialSpec::Tabulated { grid, .. } => {
                grid[0].abs().max(grid[grid.len() - 1].abs())
            }
        }
    }

    pub fn with_depth_scaled(&self, factor: f64) -> PotentialSpec {
        match self {
            PotentialSpec::SquareWell { v0, a } => PotentialSpec::SquareWell {
                v0: v0 * factor,
                a: *a,
            },
            PotentialSpec::GaussianWell { v0, sigma_w } => PotentialSpec::GaussianWell {
                v0: v0 * factor,
                sigma_w: *sigma_w,
            },
            PotentialSpec::Tabulated { grid, values } => PotentialSpec::Tabulated {
                grid: grid.clone(),
                values: values.iter().map(|&v| v * factor).collect(),
            },
        }
    }
}

/// Largest eigenvalue of the discretized operator, with its (positive,
/// unnormalized) eigenvector on the full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BsEigenpair {
    pub mu: f64,
    pub phi: Vec<f64>,
    pub converged: bool,
}

/// `mu(alpha)` sampled over an ascending alpha grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirmanSchwingerCurve {
    pub alphas: Vec<f64>,
    pub mus: Vec<f64>,
}

/// A found bound state `H phi = lambda phi`, `lambda = -alpha < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub lambda: f64,
    pub mu_at_root: f64,
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub tail_fit: Option<DecayFit>,
    pub predicted_rate: Option<f64>,
}

/// Search outcome: `bound_state` is `None` when no alpha down to 1e-6
/// reaches `mu(alpha) >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateOutcome {
    pub bound_state: Option<BoundState>,
}

impl BoundState {
    pub fn phi_to_csv(&self) -> String {
        let mut out = String::from("x,phi\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!("{:.16e},{:.16e}\n", self.grid[i], self.phi[i]));
        }
        out
    }
}

fn check_uniform(grid: &[f64]) -> Result<f64> {
    if grid.len() < 3 {
        return Err(Error::Domain("grid needs >= 3 nodes".into()));
    }
    let h = grid[1] - grid[0];
    if h <= 0.0 {
        return Err(Error::Domain("grid must be ascending".into()));
    }
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
            return Err(Error::Domain("grid must be uniform".into()));
        }
    }
    Ok(h)
}

/// Symmetric uniform grid of `2n + 1` nodes on `[-half_width, half_width]`.
pub fn uniform_grid(half_width: f64, n: usize) -> Vec<f64> {
    let h = half_width / n as f64;
    (0..=2 * n).map(|i| -half_width + h * i as f64).collect()
}

/// The kernel values needed by the Nystrom matrix: cell averages
/// `(1/h) int_{(k-1/2)h}^{(k+1/2)h} g_alpha` near the diagonal (the
/// singular and strongly curved part of the kernel must be integrated,
/// not sampled — midpoint sampling there costs a full order of
/// accuracy), pointwise values `g_alpha(k h)` farther out where the
/// kernel is smooth and cell-average differences would cancel.
fn resolvent_stencil(model: &LevyModel, alpha: f64, h: f64, n: usize) -> Result<Vec<f64>> {
    const AVERAGED_CELLS: usize = 33;
    let k_avg = n.min(AVERAGED_CELLS);
    let mut masses = Vec::with_capacity(k_avg);
    for k in 0..k_avg {
        masses.push(kernels::resolvent_mass_within(model, alpha, (k as f64 + 0.5) * h)?.value);
    }
    let mut g = Vec::with_capacity(n);
    g.push(masses[0] / h);
    for k in 1..k_avg {
        g.push((masses[k] - masses[k - 1]) / (2.0 * h));
    }
    if n > k_avg {
        let pts: Vec<f64> = (k_avg..n).map(|k| k as f64 * h).collect();
        let grid = kernels::resolvent_freq(model, alpha, &pts)?;
        g.extend_from_slice(&grid.values);
    }
    Ok(g)
}

/// Largest eigenvalue and Perron eigenvector of
/// `phi -> int g_alpha(. - z) |V(z)| phi(z) dz` discretized on `grid`.
pub fn bs_eigenvalue(
    model: &LevyModel,
    potential: &PotentialSpec,
    alpha: f64,
    grid: &[f64],
) -> Result<BsEigenpair> {
    potential.validate()?;
    if alpha <= 0.0 {
        return Err(Error::Domain("bs_eigenvalue needs alpha > 0".into()));
    }
    let h = check_uniform(grid)?;
    let weights: Vec<f64> = grid.iter().map(|&x| potential.abs_cell_average(x, h)).collect();
    let support: Vec<usize> = (0..grid.len()).filter(|&i| weights[i] > 0.0).collect();
    if support.is_empty() {
        return Ok(BsEigenpair {
            mu: 0.0,
            phi: vec![0.0; grid.len()],
            converged: true,
        });
    }
    let span = support[support.len() - 1] - support[0];
    let g = resolvent_stencil(model, alpha, h, span + 1)?;
    // similarity transform S = D^{1/2} G_h D^{1/2} is symmetric and
    // shares the spectrum of G_h D; power-iterate on S
    let m = support.len();
    let sqrt_w: Vec<f64> = support.iter().map(|&i| weights[i].sqrt()).collect();
    let s = DMatrix::from_fn(m, m, |p, q| {
        let di = support[p].abs_diff(support[q]);
        sqrt_w[p] * h * g[di] * sqrt_w[q]
    });
    let (mu, w, converged) = power_iterate(&s);
    // phi on the support is D^{-1/2} w; extend to the full grid through
    // the eigenvalue equation itself (Nystrom natural interpolation)
    let mut phi = vec![0.0; grid.len()];
    if mu > 0.0 {
        let full = grid.len();
        let span_full = full - 1;
        let g_full = if span_full > span {
            resolvent_stencil(model, alpha, h, span_full + 1)?
        } else {
            g
        };
        for i in 0..full {
            let mut acc = 0.0;
            for (p, &j) in support.iter().enumerate() {
                acc += h * g_full[i.abs_diff(j)] * sqrt_w[p] * w[p];
            }
            phi[i] = acc / mu;
        }
        let sign = if phi.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        for v in phi.iter_mut() {
            *v *= sign;
        }
    }
    Ok(BsEigenpair {
        mu,
        phi,
        converged,
    })
}

/// Power iteration on a symmetric positive matrix; returns the dominant
/// eigenvalue (Rayleigh quotient), its eigenvector, and a convergence
/// flag (relative eigenvalue change below 1e-10).
fn power_iterate(s: &DMatrix<f64>) -> (f64, DVector<f64>, bool) {
    let m = s.nrows();
    let mut v = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    let mut mu = 0.0;
    for _ in 0..20_000 {
        let mut w = s * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return (0.0, v, true);
        }
        w /= norm;
        let mu_new = (s * &w).dot(&w);
        let done = (mu_new - mu).abs() <= 1e-10 * mu_new.abs().max(1e-300);
        mu = mu_new;
        v = w;
        if done {
            return (mu, v, true);
        }
    }
    (mu, v, false)
}

/// Full-spectrum check of the same matrix: largest eigenvalue of the
/// symmetric form by a dense solver. Cross-validation oracle for
/// [`bs_eigenvalue`].
pub fn bs_eigenvalue_dense(
    model: &LevyModel,
    potential: &PotentialSpec,
    alpha: f64,
    grid: &[f64],
) -> Result<f64> {
    potential.validate()?;
    let h = check_uniform(grid)?;
    let weights: Vec<f64> = grid.iter().map(|&x| potential.abs_cell_average(x, h)).collect();
    let support: Vec<usize> = (0..grid.len()).filter(|&i| weights[i] > 0.0).collect();
    if support.is_empty() {
        return Ok(0.0);
    }
    let span = support[support.len() - 1] - support[0];
    let g = resolvent_stencil(model, alpha, h, span + 1)?;
    let m = support.len();
    let sqrt_w: Vec<f64> = support.iter().map(|&i| weights[i].sqrt()).collect();
    let s = DMatrix::from_fn(m, m, |p, q| {
        let di = support[p].abs_diff(support[q]);
        sqrt_w[p] * h * g[di] * sqrt_w[q]
    });
    let eig = s.symmetric_eigen();
    Ok(eig.eigenvalues.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)))
}

/// `mu(alpha)` over an ascending grid of alphas.
pub fn bs_curve(
    model: &LevyModel,
    potential: &PotentialSpec,
    alphas: &[f64],
    grid: &[f64],
) -> Result<BirmanSchwingerCurve> {
    if alphas.is_empty() || alphas.windows(2).any(|w| w[0] >= w[1]) || alphas[0] <= 0.0 {
        return Err(Error::Domain("alphas must be positive ascending".into()));
    }
    let mus: Vec<f64> = alphas
        .iter()
        .map(|&a| bs_eigenvalue(model, potential, a, grid).map(|p| p.mu))
        .collect::<Result<_>>()?;
    Ok(BirmanSchwingerCurve {
        alphas: alphas.to_vec(),
        mus,
    })
}

const ALPHA_FLOOR: f64 = 1e-6;

/// Finds the ground state by solving `mu(alpha) = 1` with bisection
/// (`mu` is strictly decreasing in `alpha`), then reconstructs, fits and
/// normalizes the eigenfunction. Returns `bound_state: None` when the
/// well is too shallow to bind (`mu < 1` down to `alpha = 1e-6`).
pub fn find_bound_state(
    model: &LevyModel,
    potential: &PotentialSpec,
    grid: &[f64],
) -> Result<BoundStateOutcome> {
    potential.validate()?;
    check_uniform(grid)?;
    let mu_of = |a: f64| -> Result<f64> { Ok(bs_eigenvalue(model, potential, a, grid)?.mu) };

    // bracket the root of mu(alpha) = 1
    let mut alpha = 1.0;
    let mut mu = mu_of(alpha)?;
    let (mut lo, mut hi);
    if mu >= 1.0 {
        loop {
            let next = alpha * 2.0;
            let mu_next = mu_of(next)?;
            if mu_next < 1.0 {
                lo = alpha;
                hi = next;
                break;
            }
            alpha = next;
            if alpha > 1e9 {
                return Err(Error::UnboundedBracket(
                    "mu(alpha) stayed above 1 up to alpha = 1e9".into(),
                ));
            }
        }
    } else {
        loop {
            let next = alpha / 2.0;
            if next < ALPHA_FLOOR {
                return Ok(BoundStateOutcome { bound_state: None });
            }
            let mu_next = mu_of(next)?;
            if mu_next >= 1.0 {
                lo = next;
                hi = alpha;
                break;
            }
            alpha = next;
        }
    }

    // bisection: mu(lo) >= 1 >= mu(hi)
    let mut root = 0.5 * (lo + hi);
    for _ in 0..200 {
        root = 0.5 * (lo + hi);
        mu = mu_of(root)?;
        if (mu - 1.0).abs() <= 1e-8 {
            break;
        }
        if mu > 1.0 {
            lo = root;
        } else {
            hi = root;
        }
    }

    let pair = bs_eigenvalue(model, potential, root, grid)?;
    let h = grid[1] - grid[0];
    let norm = (pair.phi.iter().map(|&p| p * p).sum::<f64>() * h).sqrt();
    let phi: Vec<f64> = pair.phi.iter().map(|&p| p / norm).collect();

    // tail analysis outside twice the potential support
    let cut = 2.0 * potential.support_radius();
    let (mut xs, mut vs) = (Vec::new(), Vec::new());
    for (i, &x) in grid.iter().enumerate() {
        if x > cut && phi[i] > 0.0 {
            xs.push(x);
            vs.push(phi[i]);
        }
    }
    let exponential = model.analytic_kappa().is_some();
    let tail_fit = if xs.len() >= 10 {
        decay::fit_exponential_rate(&xs, &vs, true).ok()
    } else {
        None
    };
    let predicted_rate = if exponential {
        let mut theta = vec![0.0; model.dim()];
        theta[0] = 1.0;
        expmom::gamma_alpha(model, root, &theta).ok()
    } else {
        None
    };

    Ok(BoundStateOutcome {
        bound_state: Some(BoundState {
            lambda: -root,
            mu_at_root: pair.mu,
            grid: grid.to_vec(),
            phi,
            tail_fit,
            predicted_rate,
        }),
    })
}

/// Two-sided comparison of the ground state against the jump profile
/// over the tail window `(2 support, end of grid]`: for subexponential
/// profiles the ratio `phi_0 / f` must stay in a bounded positive band.
pub fn ground_state_profile_report(
    state: &BoundState,
    model: &LevyModel,
    support_radius: f64,
) -> Result<decay::ComparabilityReport> {
    let cut = 2.0 * support_radius;
    let (mut xs, mut num, mut den) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &x) in state.grid.iter().enumerate() {
        if x > cut && state.phi[i] > 0.0 {
            xs.push(x);
            num.push(state.phi[i]);
            den.push(model.profile().ln_value(model.dim(), x).exp());
        }
    }
    if xs.len() < 20 {
        return Err(Error::InsufficientPoints {
            needed: 20,
            got: xs.len(),
        });
    }
    decay::ratio_report(&xs, &num, &den, (cut, xs[xs.len() - 1]))
}
