//! Adaptive Gauss-Kronrod quadrature and oscillatory tail integration.
//!
//! Everything here works on plain `Fn(f64) -> f64` integrands. The
//! oscillatory machinery sums panel integrals between consecutive zeros of
//! the oscillating factor and applies iterated averaging to the partial
//! sums, which lets integrands with slowly decaying envelopes converge in a
//! few dozen panels.

use crate::error::{Error, Result};

/// Result of a quadrature: value plus an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub abs_error: f64,
}

impl Quad {
    pub const ZERO: Quad = Quad {
        value: 0.0,
        abs_error: 0.0,
    };

    fn add(self, other: Quad) -> Quad {
        Quad {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
        }
    }
}

// 15-point Kronrod abscissae (positive half) and weights, 7-point Gauss
// weights embedded. Standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let s = f1 + f2;
        res_k += WGK[j] * s;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * s;
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let raw = ((res_k - res_g) * half).abs();
    let res_asc = res_asc * half.abs();
    let mut err = raw;
    if res_asc != 0.0 && raw != 0.0 {
        err = res_asc * 1.0_f64.min((200.0 * raw / res_asc).powf(1.5));
    }
    let res_abs = res_abs * half.abs();
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Adaptive Gauss-Kronrod integration of `f` over the finite interval `[a, b]`.
///
/// Subdivides the interval with the largest error estimate until the total
/// error drops below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quad> {
    if a == b {
        return Ok(Quad::ZERO);
    }
    let max_intervals = 4000;
    let (v, e) = kronrod15(&f, a, b);
    // (lo, hi, value, error)
    let mut intervals: Vec<(f64, f64, f64, f64)> = vec![(a, b, v, e)];
    let mut total_v = v;
    let mut total_e = e;
    loop {
        let tol = abs_tol.max(rel_tol * total_v.abs());
        if total_e <= tol || !total_e.is_finite() {
            break;
        }
        if intervals.len() >= max_intervals {
            return Err(Error::QuadratureNonConvergence {
                partial: total_v,
                abs_error: total_e,
                context: format!("adaptive GK on [{a}, {b}]"),
            });
        }
        // split the worst interval
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, v_old, e_old) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval no longer splittable in f64; accept it
            intervals.push((lo, hi, v_old, 0.0));
            total_e -= e_old;
            continue;
        }
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        total_v += v1 + v2 - v_old;
        total_e += e1 + e2 - e_old;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    Ok(Quad {
        value: total_v,
        abs_error: total_e,
    })
}

/// Outcome of a tail integration with divergence detection.
#[derive(Debug, Clone, Copy)]
pub enum Tail {
    Converged(Quad),
    Diverged { partial: f64 },
}

/// Integrate `f` over `[a, inf)` for a non-oscillatory integrand by
/// doubling panels `[a 2^k, a 2^(k+1)]`.
///
/// Divergence is declared when the running value exceeds `divergence_cap`
/// or when panel masses fail to start decaying over many consecutive
/// doubling octaves.
pub fn integrate_tail_detect<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    rel_tol: f64,
    abs_tol: f64,
    divergence_cap: f64,
) -> Result<Tail> {
    assert!(a > 0.0, "tail integration needs a positive left endpoint");
    let mut total = Quad::ZERO;
    let mut lo = a;
    let mut small_count = 0usize;
    let mut growth_count = 0usize;
    let mut prev_panel = 0.0_f64;
    for _ in 0..200 {
        let hi = lo * 2.0;
        let q = integrate(&f, lo, hi, rel_tol, abs_tol * 0.1)?;
        total = total.add(q);
        if total.value.abs() > divergence_cap {
            return Ok(Tail::Diverged {
                partial: total.value,
            });
        }
        // panel masses that stop shrinking across doubling octaves signal
        // divergence (a convergent tail must decay geometrically here).
        // 30 octaves of patience: an exponential tail with decay scale up
        // to 1e9 times the left endpoint grows its panels at first and is
        // still convergent, while 1/x-type tails never start shrinking
        if prev_panel > abs_tol && q.value.abs() > 0.99 * prev_panel {
            growth_count += 1;
            if growth_count >= 30 {
                return Ok(Tail::Diverged {
                    partial: total.value,
                });
            }
        } else {
            growth_count = 0;
        }
        prev_panel = q.value.abs();
        if q.value.abs() <= abs_tol.max(rel_tol * total.value.abs()) {
            small_count += 1;
            if small_count >= 2 {
                return Ok(Tail::Converged(total));
            }
        } else {
            small_count = 0;
        }
        lo = hi;
    }
    Err(Error::QuadratureNonConvergence {
        partial: total.value,
        abs_error: total.abs_error,
        context: format!("tail integration from {a}"),
    })
}

/// Tail integration that treats divergence as an error.
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quad> {
    match integrate_tail_detect(f, a, rel_tol, abs_tol, 1e300)? {
        Tail::Converged(q) => Ok(q),
        Tail::Diverged { partial } => Err(Error::QuadratureNonConvergence {
            partial,
            abs_error: f64::INFINITY,
            context: "tail integration diverged".into(),
        }),
    }
}

/// Iterated averaging of the partial sums `s[0..n]`; returns the top of the
/// averaging triangle together with the last correction size.
fn averaged_limit(partials: &[f64], depth: usize) -> (f64, f64) {
    let n = partials.len();
    let w = n.min(depth + 1);
    let mut row: Vec<f64> = partials[n - w..].to_vec();
    let mut prev_top = *row.last().unwrap();
    let mut last_step = f64::INFINITY;
    while row.len() > 1 {
        for i in 0..row.len() - 1 {
            row[i] = 0.5 * (row[i] + row[i + 1]);
        }
        row.pop();
        let top = *row.last().unwrap();
        last_step = (top - prev_top).abs();
        prev_top = top;
    }
    (prev_top, last_step)
}

/// Integrate `f` over `[a, inf)` where `f` oscillates with sign changes at
/// the points produced by `zeros(k)` (strictly increasing in `k`).
///
/// Panel integrals between consecutive zeros are summed directly while
/// their magnitude still grows; once the envelope decays, iterated
/// averaging (depth 12) of the partial sums is used to accelerate the
/// alternating series.
pub fn oscillatory_tail<F, Z>(f: F, zeros: Z, a: f64, rel_tol: f64, abs_tol: f64) -> Result<Quad>
where
    F: Fn(f64) -> f64,
    Z: Fn(usize) -> f64,
{
    const DEPTH: usize = 12;
    const MAX_PANELS: usize = 100_000;

    // first zero beyond a (exponential then binary search: a may sit
    // billions of oscillations in)
    let mut k0 = 0usize;
    if zeros(0) <= a {
        let mut hi = 1usize;
        while zeros(hi) <= a {
            hi *= 2;
        }
        let mut lo = hi / 2;
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if zeros(mid) <= a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        k0 = hi;
    }
    let head = integrate(&f, a, zeros(k0), rel_tol * 0.1, abs_tol * 0.1)?;

    let mut direct = head;
    let mut partials: Vec<f64> = Vec::new();
    let mut panel_err = 0.0_f64;
    let mut abs_sum = head.abs_error + head.value.abs();
    let mut running = 0.0_f64; // partial sum of accelerated segment
    let mut decreasing_run = 0usize;
    let mut prev_mag = f64::INFINITY;
    let mut accelerating = false;
    let mut best: Option<Quad> = None;
    let mut stale = 0usize;

    for k in k0..k0 + MAX_PANELS {
        let (lo, hi) = (zeros(k), zeros(k + 1));
        let (pv, pe) = kronrod15(&f, lo, hi);
        let (pv, pe) = if pe > abs_tol * 1e-3 && pe > rel_tol * pv.abs() {
            let q = integrate(&f, lo, hi, rel_tol * 0.1, abs_tol * 1e-3)?;
            (q.value, q.abs_error)
        } else {
            (pv, pe)
        };
        panel_err += pe;
        abs_sum += pv.abs();
        let mag = pv.abs();

        if !accelerating {
            if mag <= prev_mag {
                decreasing_run += 1;
            } else {
                decreasing_run = 0;
            }
            prev_mag = mag;
            if decreasing_run >= 3 {
                accelerating = true;
                running = 0.0;
                partials.clear();
            } else {
                direct = direct.add(Quad {
                    value: pv,
                    abs_error: pe,
                });
                // envelope already negligible: done without acceleration
                if mag < abs_tol * 1e-2 && k > k0 + 4 {
                    let floor = f64::EPSILON * abs_sum;
                    return Ok(Quad {
                        value: direct.value,
                        abs_error: direct.abs_error + floor + mag,
                    });
                }
                continue;
            }
        }

        running += pv;
        partials.push(running);
        if partials.len() >= 6 {
            let (limit, step) = averaged_limit(&partials, DEPTH);
            let value = direct.value + limit;
            let floor = f64::EPSILON * abs_sum;
            let err = direct.abs_error + panel_err + step + floor;
            let q = Quad {
                value,
                abs_error: err,
            };
            if best.map_or(true, |b| q.abs_error < 0.99 * b.abs_error) {
                best = Some(q);
                stale = 0;
            } else {
                stale += 1;
            }
            if err <= abs_tol.max(rel_tol * value.abs()) {
                return Ok(q);
            }
            // error estimate has hit its floor (typically roundoff in the
            // panel sum): report the best value with its honest error
            if stale >= 30 {
                return Ok(best.unwrap());
            }
        }
    }
    let b = best.unwrap_or(direct);
    Err(Error::QuadratureNonConvergence {
        partial: b.value,
        abs_error: b.abs_error,
        context: "oscillatory tail".into(),
    })
}

/// Bisection for a monotone function: finds `x` in `[lo, hi]` with
/// `f(x) = target`, assuming `f(lo) <= target <= f(hi)` up to sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, target: f64, rel_tol: f64) -> f64 {
    let increasing = f(hi) >= f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * mid.abs() {
            return mid;
        }
        let v = f(mid);
        let go_right = if increasing { v < target } else { v > target };
        if go_right {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
