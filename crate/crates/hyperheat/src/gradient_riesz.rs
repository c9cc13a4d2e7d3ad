//! Gradient-estimate verification (time and spatial derivatives of the
//! heat kernel, Li-Yau inequality) and Riesz-transform exponent
//! arithmetic: admissible p-ranges, Kunze-Stein q-ranges, and the L^q
//! gradient-norm integral with its exponential decay rate.

use crate::bounds_verifier::{GridSpec, UNDERFLOW_FLOOR_LOG};
use crate::dimension::Dimension;
use crate::error::{HyperheatError, Result};
use crate::kernel_algebra::{differentiate_heat, HeatClosedForm, HeatVariable};
use crate::logval::LogValue;
use crate::model_kernels::{cached_heat_form, dm_quantity, heat_kernel, EvalPoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

const CACHE_SLOTS: usize = (crate::dimension::MAX_EXACT_N / 2) as usize;
static TIME_FORMS: [OnceLock<HeatClosedForm>; CACHE_SLOTS] = [const { OnceLock::new() }; CACHE_SLOTS];
static RADIUS_FORMS: [OnceLock<HeatClosedForm>; CACHE_SLOTS] =
    [const { OnceLock::new() }; CACHE_SLOTS];

fn cached_derivative(dim: Dimension, var: HeatVariable) -> Result<&'static HeatClosedForm> {
    let n = dim.n();
    if n % 2 != 0 {
        return Err(HyperheatError::RequiresEvenN(n));
    }
    let slot = (n / 2 - 1) as usize;
    let cell = match var {
        HeatVariable::Time => &TIME_FORMS[slot],
        HeatVariable::Radius => &RADIUS_FORMS[slot],
    };
    if cell.get().is_none() {
        let form = differentiate_heat(cached_heat_form(dim)?, var);
        let _ = cell.set(form);
    }
    Ok(cell.get().expect("just initialized"))
}

/// Exact symbolic `d/dt` of the heat kernel, log domain (sign may be
/// negative). Even n only; odd n falls back to centered finite differences
/// of the quadrature kernel (reduced accuracy, ~1e-6 relative).
pub fn time_derivative_kernel(dim: Dimension, p: EvalPoint) -> Result<LogValue> {
    p.validate()?;
    if dim.n() % 2 == 0 {
        return Ok(cached_derivative(dim, HeatVariable::Time)?.evaluate(p.r.max(1e-7), p.t));
    }
    let h = 1e-4 * p.t.max(0.1);
    let a = heat_kernel(dim, EvalPoint { t: p.t - h, ..p })?.value();
    let b = heat_kernel(dim, EvalPoint { t: p.t + h, ..p })?.value();
    Ok(LogValue::from_value((b - a) / (2.0 * h)))
}

/// Magnitude of the spatial gradient, `|d/dr H|`: the radial derivative is
/// the full gradient for radial kernels. Returns zero at r = 0 (the kernel
/// is an even function of r). Even n only.
pub fn spatial_gradient_kernel(dim: Dimension, p: EvalPoint) -> Result<LogValue> {
    p.validate()?;
    if p.r == 0.0 {
        return Ok(LogValue::ZERO);
    }
    let v = cached_derivative(dim, HeatVariable::Radius)?.evaluate(p.r, p.t);
    Ok(v.abs())
}

/// Which gradient bound a scan verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientKind {
    TimeDerivative,
    SpatialGradient,
}

impl GradientKind {
    /// Log of the bounding envelope at the point: DM times the kind's
    /// multiplier for time, the explicit spatial envelope for space.
    pub fn envelope_log(self, dim: Dimension, p: EvalPoint) -> f64 {
        let n = dim.n() as f64;
        let (r, t) = (p.r, p.t);
        match self {
            GradientKind::TimeDerivative => {
                dm_quantity(dim, p).log_magnitude + (1.0 + 1.0 / t + r * r / (t * t)).ln()
            }
            GradientKind::SpatialGradient => {
                -(n + 2.0) / 2.0 * t.ln() - n * n * t / 4.0 - r * r / (4.0 * t) - n * r / 2.0
                    + (n / 2.0 - 1.0) * (1.0 + r + t).ln()
                    + (1.0 + r).ln()
                    + (1.0 + r / t.sqrt() + t.sqrt()).ln()
            }
        }
    }
}

/// Result of a derivative-vs-envelope scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradientBoundReport {
    pub dim: Dimension,
    pub kind: GradientKind,
    pub grid: GridSpec,
    /// Grid supremum of |derivative| / envelope.
    pub minimal_constant: f64,
    pub arg_sup: EvalPoint,
    pub underflow_count: usize,
}

/// Scan `|derivative| <= C * envelope` and report the minimal C.
pub fn gradient_bound_scan(
    dim: Dimension,
    grid: &GridSpec,
    kind: GradientKind,
) -> Result<GradientBoundReport> {
    grid.validate()?;
    let nodes = grid.nodes();
    let evals: Vec<Result<LogValue>> = nodes
        .par_iter()
        .map(|&p| match kind {
            GradientKind::TimeDerivative => time_derivative_kernel(dim, p),
            GradientKind::SpatialGradient => spatial_gradient_kernel(dim, p),
        })
        .collect();
    let mut sup = 0.0f64;
    let mut arg = nodes[0];
    let mut underflow = 0usize;
    for (p, ev) in nodes.iter().zip(evals) {
        let d = ev?;
        if d.is_zero() || d.log_magnitude < UNDERFLOW_FLOOR_LOG {
            underflow += 1;
            continue;
        }
        let ratio = (d.log_magnitude - kind.envelope_log(dim, *p)).exp();
        if !ratio.is_finite() {
            return Err(HyperheatError::NonFiniteNode {
                r: p.r,
                t: p.t,
                what: "gradient/envelope ratio".into(),
            });
        }
        if ratio > sup {
            sup = ratio;
            arg = *p;
        }
    }
    Ok(GradientBoundReport {
        dim,
        kind,
        grid: *grid,
        minimal_constant: sup,
        arg_sup: arg,
        underflow_count: underflow,
    })
}

/// Li-Yau scan outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiYauReport {
    pub dim: Dimension,
    pub alpha: f64,
    pub grid: GridSpec,
    /// Minimal C such that
    /// `|grad H|^2/H^2 - alpha (dH/dt)/H <= (n+1) alpha^2/(2t) + C n/(alpha-1)`
    /// holds at every counted node.
    pub minimal_c: f64,
    pub arg_sup: EvalPoint,
    pub underflow_count: usize,
}

/// Verify the Li-Yau-type inequality with curvature bound K = n and
/// dimension k = n + 1, reporting the minimal empirical constant.
pub fn li_yau_check(dim: Dimension, alpha: f64, grid: &GridSpec) -> Result<LiYauReport> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(HyperheatError::InvalidParameter(format!(
            "Li-Yau alpha must lie in (1, 2), got {alpha}"
        )));
    }
    grid.validate()?;
    let n = dim.n() as f64;
    let nodes = grid.nodes();
    let evals: Vec<Result<(LogValue, LogValue, LogValue)>> = nodes
        .par_iter()
        .map(|&p| {
            Ok((
                heat_kernel(dim, p)?,
                spatial_gradient_kernel(dim, p)?,
                time_derivative_kernel(dim, p)?,
            ))
        })
        .collect();
    let mut minimal = 0.0f64;
    let mut arg = nodes[0];
    let mut underflow = 0usize;
    for (p, ev) in nodes.iter().zip(evals) {
        let (h, dr, dt) = ev?;
        if h.sign != 1 || h.log_magnitude < UNDERFLOW_FLOOR_LOG {
            underflow += 1;
            continue;
        }
        let grad_sq = if dr.is_zero() {
            0.0
        } else {
            (2.0 * dr.log_ratio(&h)).exp()
        };
        let dt_over_h = if dt.is_zero() {
            0.0
        } else {
            dt.sign as f64 * dt.log_ratio(&h).exp()
        };
        let lhs = grad_sq - alpha * dt_over_h;
        let rhs0 = (n + 1.0) * alpha * alpha / (2.0 * p.t);
        let needed = (lhs - rhs0) * (alpha - 1.0) / n;
        if needed > minimal {
            minimal = needed;
            arg = *p;
        }
    }
    Ok(LiYauReport {
        dim,
        alpha,
        grid: *grid,
        minimal_c: minimal,
        arg_sup: arg,
        underflow_count: underflow,
    })
}

/// Admissible L^p range of the Riesz transform at regularity lambda.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszRange {
    pub lambda: f64,
    pub p_lo: f64,
    /// `f64::INFINITY` at lambda = n/2 (the range opens to (1, inf)).
    pub p_hi: f64,
}

/// The open interval `(2n/(n + 2 lambda), 2n/(n - 2 lambda))` of Riesz
/// boundedness; lambda = n/2 gives (1, inf).
pub fn riesz_range(dim: Dimension, lambda: f64) -> Result<RieszRange> {
    let n = dim.n() as f64;
    if !(lambda > 0.0 && lambda <= n / 2.0) {
        return Err(HyperheatError::InvalidParameter(format!(
            "Riesz regularity must lie in (0, n/2] = (0, {}], got {lambda}",
            n / 2.0
        )));
    }
    if lambda == n / 2.0 {
        return Ok(RieszRange {
            lambda,
            p_lo: 1.0,
            p_hi: f64::INFINITY,
        });
    }
    Ok(RieszRange {
        lambda,
        p_lo: 2.0 * n / (n + 2.0 * lambda),
        p_hi: 2.0 * n / (n - 2.0 * lambda),
    })
}

/// Admissible convolution exponents `[1, p0')` from the Kunze-Stein
/// interpolation; p0' is the Hölder dual of p0 > 2.
pub fn kunze_stein_q_range(p0: f64) -> Result<(f64, f64)> {
    if !(p0 > 2.0) {
        return Err(HyperheatError::InvalidParameter(format!(
            "Kunze-Stein range needs p0 > 2, got {p0}"
        )));
    }
    if p0.is_infinite() {
        return Ok((1.0, 1.0));
    }
    Ok((1.0, p0 / (p0 - 1.0)))
}

/// Evaluations of the L^q gradient-norm integral and their fitted decay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradientNormEstimate {
    pub dim: Dimension,
    pub q: f64,
    pub t_grid: Vec<f64>,
    /// Log of the bound value at each grid time.
    pub log_values: Vec<f64>,
    /// OLS decay rate alpha from log(value) + (1/2) log t ~ -alpha t over
    /// the t >= 1 portion of the grid.
    pub alpha_fit: f64,
    pub fit_residual: f64,
    /// sup of value * sqrt(t) over the t <= 1 portion.
    pub small_t_constant: f64,
}

/// Log of `t^{-(n+2)/2} e^{-n^2 t/4} (int_0^inf e^{-q r^2/4t - q n r/2}
/// (1+r+t)^{q(n/2-1)} (1+r)^q (1 + r/sqrt(t) + sqrt(t))^q sinh^n r dr)^{1/q}`.
/// The integral is computed in the log domain with a peak shift: its
/// integrand reaches e^{O(t)} heights that cancel against the prefactor.
fn gradient_norm_log_value(dim: Dimension, q: f64, t: f64) -> Result<f64> {
    let n = dim.n() as f64;
    let log_integrand = |r: f64| -> f64 {
        if r <= 1e-200 {
            return f64::NEG_INFINITY;
        }
        // log sinh^n r without overflow: n (r + log(1 - e^{-2r}) - log 2)
        let log_sinh_n = n * (r + (-(-(2.0 * r)).exp()).ln_1p() - std::f64::consts::LN_2);
        -q * r * r / (4.0 * t) - q * n * r / 2.0
            + q * (n / 2.0 - 1.0) * (1.0 + r + t).ln()
            + q * (1.0 + r).ln()
            + q * (1.0 + r / t.sqrt() + t.sqrt()).ln()
            + log_sinh_n
    };
    // The exponent is concave-ish with a single interior peak; locate it on
    // a coarse scan, then integrate exp(g - g_max) by doubling trapezoid.
    let r_peak_guess = n * t * (2.0 - q).max(0.0) / q + 1.0;
    let r_max = r_peak_guess + 30.0 * (t / q).sqrt() + 30.0;
    let coarse = 512;
    let mut g_max = f64::NEG_INFINITY;
    for i in 1..=coarse {
        let r = r_max * i as f64 / coarse as f64;
        g_max = g_max.max(log_integrand(r));
    }
    let f = |r: f64| (log_integrand(r) - g_max).exp();
    let mut nodes = 512usize;
    let trap = |m: usize| -> f64 {
        let h = r_max / m as f64;
        let mut s = 0.5 * (f(1e-300) + f(r_max));
        for i in 1..m {
            s += f(h * i as f64);
        }
        s * h
    };
    let mut prev = trap(nodes);
    let integral = loop {
        nodes *= 2;
        let cur = trap(nodes);
        if ((cur - prev) / cur).abs() <= 1e-9 {
            break cur;
        }
        if nodes >= 1 << 16 {
            return Err(HyperheatError::QuadratureNonConvergence {
                achieved: ((cur - prev) / cur).abs(),
                requested: 1e-9,
            });
        }
        prev = cur;
    };
    Ok(-(n + 2.0) / 2.0 * t.ln() - n * n * t / 4.0 + (g_max + integral.ln()) / q)
}

/// Evaluate the gradient-norm bound over the time grid and fit its
/// exponential decay rate on t in [1, infinity) (ordinary least squares of
/// `log value + (1/2) log t` against t; the first decade is excluded
/// because polynomial factors dominate there).
pub fn gradient_norm_bound(dim: Dimension, q: f64, t_grid: &[f64]) -> Result<GradientNormEstimate> {
    if !(q >= 1.0) {
        return Err(HyperheatError::InvalidParameter(format!(
            "q must be >= 1, got {q}"
        )));
    }
    if t_grid.len() < 4 || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HyperheatError::InvalidParameter(
            "t_grid must be increasing with at least 4 points".into(),
        ));
    }
    let log_values: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| gradient_norm_log_value(dim, q, t))
        .collect::<Result<_>>()?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut small_t = 0.0f64;
    for (&t, &lv) in t_grid.iter().zip(&log_values) {
        if t >= 1.0 {
            xs.push(t);
            ys.push(lv + 0.5 * t.ln());
        } else {
            small_t = small_t.max((lv + 0.5 * t.ln()).exp());
        }
    }
    if xs.len() < 2 {
        return Err(HyperheatError::InvalidParameter(
            "t_grid needs at least two points with t >= 1 for the decay fit".into(),
        ));
    }
    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0f64, f64::max);
    Ok(GradientNormEstimate {
        dim,
        q,
        t_grid: t_grid.to_vec(),
        log_values,
        alpha_fit: -slope,
        fit_residual: residual,
        small_t_constant: small_t,
    })
}
