//! The acceptance suite: one entry per release criterion, shared between
//! the `selftest` CLI command and the integration test. Each criterion
//! returns a detail string on pass and a reason on failure; regression
//! constants frozen from the first verified run are enforced with the
//! stated slack so behavior drift is caught, not hidden.

use crate::bounds_verifier::{
    dm_ratio_scan, gaussian_sharpness_slopes, heat_kernel_mass, resolvent_positivity_suite,
    GridSpec, Spacing,
};
use crate::contour_quadrature::{
    fexp_leading, gauss_weighted_integrate, shifted_contour_heat, GrowthFunction, QuadratureConfig,
    GAUSSIAN_CONSTANT_REFERENCE_ALTERNATE,
};
use crate::dimension::Dimension;
use crate::gradient_riesz::{
    gradient_bound_scan, gradient_norm_bound, kunze_stein_q_range, li_yau_check, riesz_range,
    spatial_gradient_kernel, time_derivative_kernel, GradientKind,
};
use crate::model_kernels::{
    cached_heat_form, heat_kernel, heat_kernel_via_spectral_measure, spectral_measure_kernel,
    EvalPoint,
};
use std::f64::consts::PI;
use std::time::Instant;

/// Outcome of a single acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<String, String>;

/// Frozen regression values from the first verified run. The scans are
/// deterministic, so these are enforced tightly; a drift outside the
/// bracket means the numerics changed.
mod frozen {
    /// (n, inf, sup) of H/DM on the standard 50x50 grid; relative slack.
    pub const DM_BRACKETS: [(i64, f64, f64); 4] = [
        (1, 0.079904956019, 0.204132577946),
        (2, 0.022449131132, 0.043448497288),
        (4, 0.001214459999, 0.011031590586),
        (6, 0.000142198956, 0.005534660480),
    ];
    pub const DM_SLACK: f64 = 5e-3;

    /// (n, kind-is-time, C) minimal gradient-bound constants, standard grid.
    pub const GRADIENT_CONSTANTS: [(i64, bool, f64); 4] = [
        (2, true, 0.039271908166),
        (2, false, 0.031899709220),
        (4, true, 0.040512216421),
        (4, false, 0.015871806060),
    ];
    pub const GRADIENT_SLACK: f64 = 1e-2;

    /// Minimal Li-Yau constant, n=2, alpha=3/2, standard grid.
    pub const LI_YAU_C: f64 = 1.037390871917;
    pub const LI_YAU_SLACK: f64 = 1e-2;

    /// sup over lambda in [1, 100] of |dE(lambda)(r)| / lambda^2, n=2;
    /// attained as lambda -> 1+, r -> 0, where it equals 1/(2 pi^2).
    pub const SPECTRAL_C: f64 = 0.050660591821;
    pub const SPECTRAL_SLACK: f64 = 1e-2;
}

fn dim(n: i64) -> Dimension {
    Dimension::new(n).expect("valid dimension")
}

fn pt(r: f64, t: f64) -> EvalPoint {
    EvalPoint { r, t }
}

/// Deterministic pseudo-random stream (PCG-style multiplier) so every run
/// tests the same points.
struct Rng(u64);

impl Rng {
    fn new(seed: u64) -> Self {
        Rng(seed)
    }
    fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }
}

fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// H^3 closed form oracle: r e^{-t - r^2/4t} / ((4 pi t)^{3/2} sinh r).
fn h3_oracle(r: f64, t: f64) -> f64 {
    r * (-t - r * r / (4.0 * t)).exp() / ((4.0 * PI * t).powf(1.5) * r.sinh())
}

/// H^5 closed form oracle:
/// e^{-4t - r^2/4t}/(16 pi^{5/2} t^{3/2} sinh^2 r) (-1 + r^2/2t + r coth r).
fn h5_oracle(r: f64, t: f64) -> f64 {
    (-4.0 * t - r * r / (4.0 * t)).exp() / (16.0 * PI.powf(2.5) * t.powf(1.5) * r.sinh().powi(2))
        * (-1.0 + r * r / (2.0 * t) + r * r.cosh() / r.sinh())
}

fn check_h3_exact() -> Result<String, String> {
    let form = cached_heat_form(dim(2)).map_err(|e| e.to_string())?;
    let mut rng = Rng::new(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r = rng.in_range(0.05, 20.0);
        let t = rng.in_range(0.05, 20.0);
        let got = form.evaluate(r, t).value();
        worst = worst.max(rel_err(got, h3_oracle(r, t)));
    }
    if worst < 1e-12 {
        Ok(format!("max relative error {worst:.2e} over 100 points"))
    } else {
        Err(format!("max relative error {worst:.2e} exceeds 1e-12"))
    }
}

fn check_h5_exact() -> Result<String, String> {
    let form = cached_heat_form(dim(4)).map_err(|e| e.to_string())?;
    let mut rng = Rng::new(13);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r = rng.in_range(0.05, 20.0);
        let t = rng.in_range(0.05, 20.0);
        let got = form.evaluate(r, t).value();
        worst = worst.max(rel_err(got, h5_oracle(r, t)));
    }
    if worst < 1e-12 {
        Ok(format!("max relative error {worst:.2e} over 100 points"))
    } else {
        Err(format!("max relative error {worst:.2e} exceeds 1e-12"))
    }
}

fn check_dual_path() -> Result<String, String> {
    let cfg = QuadratureConfig::default();
    let grid = GridSpec {
        r_min: 1e-2,
        r_max: 30.0,
        t_min: 1e-2,
        t_max: 50.0,
        r_points: 20,
        t_points: 20,
        spacing: Spacing::Log,
    };
    let mut worst_even = 0.0f64;
    for n in [2i64, 4, 6, 8] {
        let d = dim(n);
        for p in grid.nodes() {
            let closed = heat_kernel(d, p).map_err(|e| e.to_string())?;
            if closed.log_magnitude < -600.0 {
                continue;
            }
            let quad = shifted_contour_heat(d, p, &cfg).map_err(|e| e.to_string())?;
            let err = (quad.log_ratio(&closed).exp() - 1.0).abs();
            worst_even = worst_even.max(err);
            if err > 1e-7 {
                return Err(format!(
                    "n={n} r={} t={}: contour vs closed form off by {err:.2e}",
                    p.r, p.t
                ));
            }
        }
    }
    let mut worst_odd = 0.0f64;
    let mut compared = 0usize;
    let d1 = dim(1);
    for i in 0..10 {
        for j in 0..10 {
            let r = 0.1 * (100f64).powf(i as f64 / 9.0);
            let t = 0.1 * (100f64).powf(j as f64 / 9.0);
            // The spectral-measure reference integrates on the real axis, so its
            // integrand cancels by a factor e^{r^2/4t}; beyond ~e^30 that exceeds
            // f64 headroom and the reference (honestly) refuses to converge.
            if r * r / (4.0 * t) > 30.0 {
                continue;
            }
            compared += 1;
            let contour = shifted_contour_heat(d1, pt(r, t), &cfg).map_err(|e| e.to_string())?;
            let spectral =
                heat_kernel_via_spectral_measure(d1, pt(r, t), &cfg).map_err(|e| e.to_string())?;
            let err = (contour.log_ratio(&spectral).exp() - 1.0).abs();
            worst_odd = worst_odd.max(err);
            if err > 1e-6 {
                return Err(format!(
                    "n=1 r={r} t={t}: contour vs spectral off by {err:.2e}"
                ));
            }
        }
    }
    if compared < 85 {
        return Err(format!(
            "n=1 comparison covered only {compared}/100 nodes; cancellation filter too aggressive"
        ));
    }
    Ok(format!(
        "even n in {{2,4,6,8}} worst {worst_even:.2e} (<= 1e-7), n=1 worst {worst_odd:.2e} over {compared} nodes (<= 1e-6)"
    ))
}

fn check_dm_two_sided() -> Result<String, String> {
    let grid = GridSpec::standard();
    let mut details = Vec::new();
    for &(n, inf_frozen, sup_frozen) in &frozen::DM_BRACKETS {
        let rep = dm_ratio_scan(dim(n), &grid).map_err(|e| e.to_string())?;
        if !(rep.inf_ratio > 0.0 && rep.sup_ratio.is_finite() && rep.inf_ratio <= rep.sup_ratio) {
            return Err(format!(
                "n={n}: ratios not two-sided ({}, {})",
                rep.inf_ratio, rep.sup_ratio
            ));
        }
        if rel_err(rep.inf_ratio, inf_frozen) > frozen::DM_SLACK
            || rel_err(rep.sup_ratio, sup_frozen) > frozen::DM_SLACK
        {
            return Err(format!(
                "n={n}: ({:.9}, {:.9}) drifted from frozen ({inf_frozen:.9}, {sup_frozen:.9})",
                rep.inf_ratio, rep.sup_ratio
            ));
        }
        details.push(format!("n={n} [{:.4}, {:.4}]", rep.inf_ratio, rep.sup_ratio));
    }
    // Stability under refinement, checked on the cheapest dimension.
    let a = dm_ratio_scan(dim(2), &grid).map_err(|e| e.to_string())?;
    let b = dm_ratio_scan(dim(2), &grid.refined(2)).map_err(|e| e.to_string())?;
    if rel_err(b.inf_ratio, a.inf_ratio) > 0.10 || rel_err(b.sup_ratio, a.sup_ratio) > 0.10 {
        return Err(format!(
            "n=2 refinement moved the bracket by >10%: ({}, {}) vs ({}, {})",
            a.inf_ratio, a.sup_ratio, b.inf_ratio, b.sup_ratio
        ));
    }
    Ok(details.join("; "))
}

fn check_gaussian_sharpness() -> Result<String, String> {
    let (a, b) =
        gaussian_sharpness_slopes(dim(2), 1.0, (5.0, 40.0), 200).map_err(|e| e.to_string())?;
    if a.abs() < 0.01 && b.is_finite() {
        Ok(format!("linear residual slope {a:.2e}, log coefficient {b:.4}"))
    } else {
        Err(format!(
            "residual of log H + r^2/4 + r grows linearly: slope {a:.3e}"
        ))
    }
}

fn check_normalization() -> Result<String, String> {
    let mut worst = 0.0f64;
    for n in [1i64, 2, 4] {
        for &t in &[0.1, 1.0, 10.0] {
            let mass = heat_kernel_mass(dim(n), t).map_err(|e| e.to_string())?;
            let err = (mass - 1.0).abs();
            worst = worst.max(err);
            if err > 1e-6 {
                return Err(format!("n={n} t={t}: mass {mass} deviates by {err:.2e}"));
            }
        }
    }
    Ok(format!("max |mass - 1| = {worst:.2e} over 9 cases"))
}

fn check_positivity() -> Result<String, String> {
    let mu: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    let r: Vec<f64> = (1..=80).map(|i| 0.5 * i as f64).collect();
    let mut details = Vec::new();
    for n in [2i64, 4] {
        let rep = resolvent_positivity_suite(dim(n), &mu, &r).map_err(|e| e.to_string())?;
        if !rep.all_positive {
            return Err(format!("n={n}: a resolvent value failed positivity"));
        }
        if rep.derivative_growth_deviation > 0.05 {
            return Err(format!(
                "n={n}: r e^(-nr/2) growth profile drifts {:.2}% on [20, 40]",
                100.0 * rep.derivative_growth_deviation
            ));
        }
        details.push(format!(
            "n={n} profile deviation {:.2e}",
            rep.derivative_growth_deviation
        ));
    }
    Ok(details.join("; "))
}

fn check_fexp() -> Result<String, String> {
    let cfg = QuadratureConfig::default();
    let one = |_: f64| 1.0;
    let g1 = GrowthFunction {
        func: &one,
        growth_exponent: 0,
    };
    let f1 = fexp_leading(&g1, 1.0, &cfg).map_err(|e| e.to_string())?;
    let sqrt_pi = PI.sqrt();
    // f(1) for u == 1 is the Gaussian integral itself; the brute-force
    // oracle must land on sqrt(pi), not the alternate sqrt(2 pi).
    let (f1_num, _) = gauss_weighted_integrate(|_| 1.0, 1.0, &cfg).map_err(|e| e.to_string())?;
    if (f1_num - sqrt_pi).abs() >= 1e-10 || (f1.constant_used - sqrt_pi).abs() >= 1e-10 {
        return Err(format!(
            "f(1) = {f1_num} for u == 1; brute-force oracle wants sqrt(pi) = {sqrt_pi}"
        ));
    }
    let alt_gap = (f1.constant_used - GAUSSIAN_CONSTANT_REFERENCE_ALTERNATE).abs();
    // Error order on a decaying profile u = e^{-w^2}, where f(t) =
    // sqrt(pi/(1+t)): |f(t) sqrt(t) - sqrt(pi)| <= c/t with c <= sqrt(pi)
    // on t in [1, 1e4] (the true prefactor is sqrt(pi)/2).
    let u = |w: f64| (-w * w).exp();
    let g2 = GrowthFunction {
        func: &u,
        growth_exponent: 0,
    };
    let mut worst_c = 0.0f64;
    for &t in &[1.0, 10.0, 100.0, 1e3, 1e4] {
        let lead = fexp_leading(&g2, t, &cfg).map_err(|e| e.to_string())?;
        let (f_num, _) = gauss_weighted_integrate(u, t, &cfg).map_err(|e| e.to_string())?;
        if (f_num - lead.leading).abs() > lead.error_bound {
            return Err(format!("t={t}: remainder exceeds the reported error bound"));
        }
        let c = (f_num * t.sqrt() - sqrt_pi).abs() * t;
        worst_c = worst_c.max(c);
        if c > sqrt_pi {
            return Err(format!("t={t}: error-order constant {c:.4} exceeds sqrt(pi)"));
        }
    }
    if worst_c < 0.1 {
        return Err(format!(
            "error-order check is vacuous: largest remainder constant {worst_c:.2e}"
        ));
    }
    Ok(format!(
        "oracle constant sqrt(pi) to {:.1e}; alternate-convention gap {alt_gap:.6}; error-order c = {worst_c:.4}",
        (f1_num - sqrt_pi).abs()
    ))
}

fn check_spectral_measure_bounds() -> Result<String, String> {
    let d = dim(2);
    let two_pi_sq = 2.0 * PI * PI;
    let mut c_sup = 0.0f64;
    for i in 0..=40 {
        let lam = 10f64.powf(-2.0 + i as f64 * 4.0 / 40.0);
        for j in 0..=40 {
            let r = 10.0 * j as f64 / 40.0;
            let v = spectral_measure_kernel(d, lam, r)
                .map_err(|e| e.to_string())?
                .abs();
            if lam <= 1.0 {
                if v > lam * lam / two_pi_sq * (1.0 + 1e-9) {
                    return Err(format!(
                        "lambda={lam} r={r}: |dE| = {v:.6e} exceeds lambda^2/(2 pi^2)"
                    ));
                }
            } else {
                c_sup = c_sup.max(v / lam.powi(2));
            }
        }
    }
    if rel_err(c_sup, frozen::SPECTRAL_C) > frozen::SPECTRAL_SLACK {
        return Err(format!(
            "high-frequency constant {c_sup:.9} drifted from frozen {:.9}",
            frozen::SPECTRAL_C
        ));
    }
    Ok(format!(
        "small-lambda bound holds; frozen C = {c_sup:.6} for lambda >= 1"
    ))
}

fn check_gradient_bounds() -> Result<String, String> {
    // Symbolic derivatives against finite differences first.
    let mut rng = Rng::new(17);
    for _ in 0..50 {
        let n = if rng.next() < 0.5 { 2 } else { 4 };
        let r = rng.in_range(0.3, 4.0);
        let t = rng.in_range(0.3, 4.0);
        let d = dim(n);
        let h = 1e-3;
        let hv = |rr: f64, tt: f64| heat_kernel(d, pt(rr, tt)).unwrap().value();
        let fd_t =
            (hv(r, t - 2.0 * h) - 8.0 * hv(r, t - h) + 8.0 * hv(r, t + h) - hv(r, t + 2.0 * h))
                / (12.0 * h);
        let got_t = time_derivative_kernel(d, pt(r, t))
            .map_err(|e| e.to_string())?
            .value();
        if rel_err(got_t, fd_t) > 1e-7 {
            return Err(format!("time derivative off at n={n} r={r} t={t}"));
        }
        let fd_r =
            (hv(r - 2.0 * h, t) - 8.0 * hv(r - h, t) + 8.0 * hv(r + h, t) - hv(r + 2.0 * h, t))
                / (12.0 * h);
        let got_r = spatial_gradient_kernel(d, pt(r, t))
            .map_err(|e| e.to_string())?
            .value();
        if rel_err(got_r, fd_r.abs()) > 1e-7 {
            return Err(format!("spatial gradient off at n={n} r={r} t={t}"));
        }
    }
    let grid = GridSpec::standard();
    let mut details = Vec::new();
    for &(n, is_time, c_frozen) in &frozen::GRADIENT_CONSTANTS {
        let kind = if is_time {
            GradientKind::TimeDerivative
        } else {
            GradientKind::SpatialGradient
        };
        let rep = gradient_bound_scan(dim(n), &grid, kind).map_err(|e| e.to_string())?;
        if rel_err(rep.minimal_constant, c_frozen) > frozen::GRADIENT_SLACK {
            return Err(format!(
                "n={n} {kind:?}: C = {:.9} drifted from frozen {c_frozen:.9}",
                rep.minimal_constant
            ));
        }
        details.push(format!("n={n} {kind:?} C={:.4}", rep.minimal_constant));
    }
    Ok(details.join("; "))
}

fn check_li_yau() -> Result<String, String> {
    let grid = GridSpec::standard();
    let rep = li_yau_check(dim(2), 1.5, &grid).map_err(|e| e.to_string())?;
    if !rep.minimal_c.is_finite() {
        return Err("minimal constant not finite".into());
    }
    if rel_err(rep.minimal_c, frozen::LI_YAU_C) > frozen::LI_YAU_SLACK {
        return Err(format!(
            "C = {:.9} drifted from frozen {:.9}",
            rep.minimal_c,
            frozen::LI_YAU_C
        ));
    }
    let refined = li_yau_check(dim(2), 1.5, &grid.refined(2)).map_err(|e| e.to_string())?;
    if (refined.minimal_c - rep.minimal_c).abs() > 0.10 * rep.minimal_c.max(0.1) {
        return Err(format!(
            "refinement moved C from {} to {}",
            rep.minimal_c, refined.minimal_c
        ));
    }
    Ok(format!("minimal C = {:.6}, refinement-stable", rep.minimal_c))
}

fn check_riesz() -> Result<String, String> {
    let full = riesz_range(dim(2), 1.0).map_err(|e| e.to_string())?;
    if full.p_lo != 1.0 || !full.p_hi.is_infinite() {
        return Err(format!("lambda = n/2 gave ({}, {})", full.p_lo, full.p_hi));
    }
    let half = riesz_range(dim(2), 0.5).map_err(|e| e.to_string())?;
    if (half.p_lo - 4.0 / 3.0).abs() > 1e-15 || (half.p_hi - 4.0).abs() > 1e-15 {
        return Err(format!("lambda = 1/2 gave ({}, {})", half.p_lo, half.p_hi));
    }
    for i in 1..=100 {
        let lam = 0.99 * i as f64 / 100.0;
        let rr = riesz_range(dim(2), lam).map_err(|e| e.to_string())?;
        if (1.0 / rr.p_lo + 1.0 / rr.p_hi - 1.0).abs() > 1e-14 {
            return Err(format!("duality fails at lambda = {lam}"));
        }
    }
    let (_, hi) = kunze_stein_q_range(4.0).map_err(|e| e.to_string())?;
    if (hi - 4.0 / 3.0).abs() > 1e-15 {
        return Err(format!("Kunze-Stein dual of 4 gave {hi}"));
    }
    Ok("exact endpoints and duality to 1e-14 on 100-point grid".into())
}

fn check_gradient_norm_decay() -> Result<String, String> {
    let t_grid: Vec<f64> = (0..33)
        .map(|i| 1e-2 * 10f64.powf(i as f64 * 4.0 / 32.0))
        .collect();
    let mut details = Vec::new();
    for &q in &[1.0, 1.2, 4.0 / 3.0] {
        let est = gradient_norm_bound(dim(2), q, &t_grid).map_err(|e| e.to_string())?;
        let target = 4.0 * (q - 1.0) / (q * q);
        if est.alpha_fit < target - 0.05 * 4.0 {
            return Err(format!(
                "q={q}: alpha_fit = {:.4} below n^2(q-1)/q^2 - 0.05 n^2 = {:.4}",
                est.alpha_fit,
                target - 0.2
            ));
        }
        if !est.small_t_constant.is_finite() {
            return Err(format!("q={q}: small-t constant not finite"));
        }
        details.push(format!("q={q:.3} alpha={:.4} (target {target:.4})", est.alpha_fit));
    }
    Ok(details.join("; "))
}

const CRITERIA: &[(&str, Check)] = &[
    ("h3-exact", check_h3_exact),
    ("h5-exact", check_h5_exact),
    ("dual-path", check_dual_path),
    ("dm-two-sided", check_dm_two_sided),
    ("gaussian-sharpness", check_gaussian_sharpness),
    ("normalization", check_normalization),
    ("positivity", check_positivity),
    ("fexp-constant", check_fexp),
    ("spectral-measure-bounds", check_spectral_measure_bounds),
    ("gradient-bounds", check_gradient_bounds),
    ("li-yau", check_li_yau),
    ("riesz-arithmetic", check_riesz),
    ("gradient-norm-decay", check_gradient_norm_decay),
];

/// Run every acceptance criterion, in order, regardless of failures.
pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|&(id, check)| {
            let start = Instant::now();
            let outcome = check();
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok(detail) => CriterionResult {
                    id,
                    passed: true,
                    detail,
                    seconds,
                },
                Err(detail) => CriterionResult {
                    id,
                    passed: false,
                    detail,
                    seconds,
                },
            }
        })
        .collect()
}
