//! Green sublevel families `X_s = {G(., z0) < s}` and their variational laws.
//!
//! Sublevels depend on `Re tau` only, so traces are parameterised by `s = Re tau`
//! and harmonicity in `tau` becomes linearity in `s`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bergman::{self, KernelMethod, NumericConfig};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::green;
use crate::Point;

/// Default tolerance of the trace reports.
pub const TRACE_TOL: f64 = 1e-3;

/// `Sublevel{base, z0, s}`; for a disc base the result resolves to a disc.
pub fn sublevel_domain(base: &DomainSpec, z0: Point, s: f64) -> Result<DomainSpec> {
    if !(s < 0.0) {
        return Err(Error::InvalidLevel(s));
    }
    DomainSpec::sublevel(base.clone(), z0, s)
}

/// `n` levels `-max, ..., -min` with geometrically spaced magnitudes, ascending.
pub fn geometric_levels(min_abs: f64, max_abs: f64, n: usize) -> Result<Vec<f64>> {
    if !(min_abs > 0.0 && max_abs > min_abs) || n < 2 {
        return Err(Error::InvalidArgument("need 0 < min < max and n >= 2".into()));
    }
    let ratio = (max_abs / min_abs).ln() / (n - 1) as f64;
    Ok((0..n).rev().map(|k| -(min_abs * (ratio * k as f64).exp())).collect())
}

/// The 12-point default grid (|s| from 0.05 to 3) followed by the base sample `s = 0`.
pub fn default_levels() -> Vec<f64> {
    let mut v = geometric_levels(0.05, 3.0, 12).unwrap_or_default();
    v.push(0.0);
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub re_tau: f64,
    pub logk: f64,
    pub c_tau: f64,
    pub logk_plus_2tau: f64,
    pub kernel_method: KernelMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationTrace {
    pub pole: Point,
    pub samples: Vec<TraceSample>,
    /// Levels whose evaluation failed, with the error.
    pub gaps: Vec<(f64, Error)>,
}

/// One trace sample: `K_s(z0)` on the sublevel (the base domain at `s = 0`)
/// and `c_s(z0) = c(z0) e^{-s}`.
pub fn trace_sample(base: &DomainSpec, z0: Point, s: f64, cfg: &NumericConfig) -> Result<TraceSample> {
    if s > 0.0 {
        return Err(Error::InvalidLevel(s));
    }
    let c = green::log_capacity(base, z0)?.value;
    let k = if s == 0.0 {
        bergman::kernel_diag_with(base, z0, cfg)?
    } else {
        bergman::kernel_diag_with(&sublevel_domain(base, z0, s)?, z0, cfg)?
    };
    let logk = k.value.re.ln();
    Ok(TraceSample { re_tau: s, logk, c_tau: c * (-s).exp(), logk_plus_2tau: logk + 2.0 * s, kernel_method: k.method })
}

fn check_levels(s_values: &[f64]) -> Result<()> {
    if s_values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("levels must be strictly increasing".into()));
    }
    if let Some(s) = s_values.iter().find(|s| !(**s <= 0.0)) {
        return Err(Error::InvalidLevel(*s));
    }
    Ok(())
}

/// Assembles per-level results (in level order) into a trace.
pub fn assemble_trace(pole: Point, s_values: &[f64], results: Vec<Result<TraceSample>>) -> Result<VariationTrace> {
    check_levels(s_values)?;
    let mut samples = Vec::new();
    let mut gaps = Vec::new();
    for (s, r) in s_values.iter().zip(results) {
        match r {
            Ok(x) => samples.push(x),
            Err(e) => gaps.push((*s, e)),
        }
    }
    Ok(VariationTrace { pole, samples, gaps })
}

pub fn variation_trace(base: &DomainSpec, z0: Point, s_values: &[f64]) -> Result<VariationTrace> {
    variation_trace_with(base, z0, s_values, &NumericConfig::default())
}

pub fn variation_trace_with(base: &DomainSpec, z0: Point, s_values: &[f64], cfg: &NumericConfig) -> Result<VariationTrace> {
    check_levels(s_values)?;
    if !base.contains(z0)? {
        return Err(Error::NotInDomain);
    }
    let results = s_values.iter().map(|s| trace_sample(base, z0, *s, cfg)).collect();
    assemble_trace(z0, s_values, results)
}

/// Divided second differences `f[x1, x2, x3] * 2` of `logK` over consecutive triples.
pub fn second_differences(trace: &VariationTrace) -> Vec<f64> {
    trace
        .samples
        .windows(3)
        .map(|w| {
            let (x1, x2, x3) = (w[0].re_tau, w[1].re_tau, w[2].re_tau);
            let (f1, f2, f3) = (w[0].logk, w[1].logk, w[2].logk);
            2.0 * ((f3 - f2) / (x3 - x2) - (f2 - f1) / (x2 - x1)) / (x3 - x1)
        })
        .collect()
}

/// Least-squares slope of `logK` over the three most negative samples.
pub fn tail_slope(trace: &VariationTrace) -> Result<f64> {
    if trace.samples.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: trace.samples.len() });
    }
    let t = &trace.samples[..3];
    let mx = t.iter().map(|s| s.re_tau).sum::<f64>() / 3.0;
    let my = t.iter().map(|s| s.logk).sum::<f64>() / 3.0;
    let sxy: f64 = t.iter().map(|s| (s.re_tau - mx) * (s.logk - my)).sum();
    let sxx: f64 = t.iter().map(|s| (s.re_tau - mx) * (s.re_tau - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub min_second_diff: f64,
    pub max_abs_second_diff: f64,
    pub slope_tail: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Convexity of `logK` in `s`: every second difference `>= -tol`.
pub fn convexity_report(trace: &VariationTrace, tol: f64) -> Result<ConvexityReport> {
    let d = second_differences(trace);
    if d.is_empty() {
        return Err(Error::InsufficientSamples { needed: 3, got: trace.samples.len() });
    }
    let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_abs = d.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(ConvexityReport {
        min_second_diff: min,
        max_abs_second_diff: max_abs,
        slope_tail: tail_slope(trace)?,
        tol,
        pass: min >= -tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    /// Largest drop of `logK + 2s` between consecutive samples (0 if none).
    pub max_decrease: f64,
    /// Largest excess of `logK + 2s` over `logK` at `s = 0`.
    pub max_excess: f64,
    /// `|logK + 2s - logK(0)|` at the last negative sample, when an `s = 0` sample exists.
    pub terminal_gap: Option<f64>,
    /// Column constant within tol: the harmonic/equality regime.
    pub constant: bool,
    /// Largest increase between consecutive samples.
    pub max_increase: f64,
    pub tol: f64,
    pub pass: bool,
}

/// `logK + 2s` is non-decreasing and bounded by `logK(0)`.
pub fn monotone_report(trace: &VariationTrace, tol: f64) -> Result<MonotoneReport> {
    let n = trace.samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let col: Vec<f64> = trace.samples.iter().map(|s| s.logk_plus_2tau).collect();
    let mut dec: f64 = 0.0;
    let mut inc: f64 = 0.0;
    for w in col.windows(2) {
        dec = dec.max(w[0] - w[1]);
        inc = inc.max(w[1] - w[0]);
    }
    let base = trace.samples.iter().find(|s| s.re_tau == 0.0).map(|s| s.logk);
    let max_excess = match base {
        Some(b) => col.iter().map(|v| v - b).fold(f64::NEG_INFINITY, f64::max).max(0.0),
        None => 0.0,
    };
    let terminal_gap = base.and_then(|b| {
        trace.samples.iter().rev().find(|s| s.re_tau < 0.0).map(|s| (s.logk_plus_2tau - b).abs())
    });
    let spread = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - col.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(MonotoneReport {
        max_decrease: dec,
        max_excess,
        terminal_gap,
        constant: spread <= tol,
        max_increase: inc,
        tol,
        pass: dec <= tol && max_excess <= tol,
    })
}

/// `max |second difference|` of `logK`; near zero exactly in the equality case.
pub fn harmonicity_residual(trace: &VariationTrace) -> Result<f64> {
    let d = second_differences(trace);
    if d.is_empty() {
        return Err(Error::InsufficientSamples { needed: 3, got: trace.samples.len() });
    }
    Ok(d.iter().map(|x| x.abs()).fold(0.0, f64::max))
}

/// Kernel `K_s(t, z0)` on `X_s` (the base domain for `s = 0`).
pub fn sublevel_kernel(base: &DomainSpec, z0: Point, t: Point, s: f64, cfg: &NumericConfig) -> Result<Point> {
    let d = if s == 0.0 { base.clone() } else { sublevel_domain(base, z0, s)? };
    if !d.contains(t)? {
        return Err(Error::TOutsideSublevel);
    }
    bergman::kernel_route(&d, z0, cfg)?.value(t, z0)
}

/// `|K(t, z0) - K_s(t, z0) e^{2s}| / |K(t, z0)|`.
pub fn key_lemma_residual(base: &DomainSpec, z0: Point, t: Point, s: f64) -> Result<f64> {
    let cfg = NumericConfig::default();
    let ks = sublevel_kernel(base, z0, t, s, &cfg)?;
    let k = sublevel_kernel(base, z0, t, 0.0, &cfg)?;
    Ok((k - ks * (2.0 * s).exp()).norm() / k.norm())
}

/// `|(K_{s+h} - K_{s-h})/(2h) + 2 K_s| / |K_s|` at `(t, z0)`.
pub fn pde_residual(base: &DomainSpec, z0: Point, t: Point, s: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || s + h > 0.0 {
        return Err(Error::InvalidStep);
    }
    let cfg = NumericConfig::default();
    let lo = sublevel_kernel(base, z0, t, s - h, &cfg)?;
    let mid = sublevel_kernel(base, z0, t, s, &cfg)?;
    let hi = sublevel_kernel(base, z0, t, s + h, &cfg)?;
    Ok(((hi - lo) / (2.0 * h) + mid * 2.0).norm() / mid.norm())
}

/// `|c_s(z0) - c(z0) e^{-s}| / c(z0)` with `c_s` re-extracted by probes on the sublevel.
pub fn capacity_scaling_check(base: &DomainSpec, z0: Point, s: f64) -> Result<f64> {
    let d = sublevel_domain(base, z0, s)?;
    let c = green::log_capacity(base, z0)?.value;
    let cs = green::probe_capacity(&d, z0)?.value;
    Ok((cs - c * (-s).exp()).abs() / c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> Point {
        Point::new(re, im)
    }

    #[test]
    fn disc_trace_is_linear() {
        let t = variation_trace(&DomainSpec::UnitDisc, c(0.0, 0.0), &[-3.0, -2.0, -1.0, 0.0]).unwrap();
        for (s, e) in t.samples.iter().zip([6.0, 4.0, 2.0, 0.0]) {
            assert!((s.logk - (e - PI.ln())).abs() < 1e-12);
        }
        assert!(harmonicity_residual(&t).unwrap() < 1e-8);
        let m = monotone_report(&t, TRACE_TOL).unwrap();
        assert!(m.pass && m.constant);
        let cr = convexity_report(&t, TRACE_TOL).unwrap();
        assert!((cr.slope_tail + 2.0).abs() < 1e-10);
    }

    #[test]
    fn short_traces_rejected() {
        let t = variation_trace(&DomainSpec::UnitDisc, c(0.0, 0.0), &[-1.0, 0.0]).unwrap();
        assert_eq!(convexity_report(&t, 1e-3).unwrap_err().tag(), "insufficient-samples");
        assert_eq!(harmonicity_residual(&t).unwrap_err().tag(), "insufficient-samples");
        assert!(monotone_report(&t, 1e-3).is_ok());
    }

    #[test]
    fn decreasing_column_fails() {
        let mut t = variation_trace(&DomainSpec::UnitDisc, c(0.0, 0.0), &[-2.0, -1.0, 0.0]).unwrap();
        t.samples[2].logk_plus_2tau -= 0.1;
        assert!(!monotone_report(&t, TRACE_TOL).unwrap().pass);
    }

    #[test]
    fn levels() {
        let v = default_levels();
        assert_eq!(v.len(), 13);
        assert!((v[0] + 3.0).abs() < 1e-12 && (v[11] + 0.05).abs() < 1e-12 && v[12] == 0.0);
        assert_eq!(sublevel_domain(&DomainSpec::UnitDisc, c(0.0, 0.0), 0.0).unwrap_err().tag(), "invalid-level");
    }

    #[test]
    fn key_lemma_and_pde_on_disc() {
        assert!(key_lemma_residual(&DomainSpec::UnitDisc, c(0.0, 0.0), c(0.2, 0.0), -1.0).unwrap() < 1e-8);
        assert!(key_lemma_residual(&DomainSpec::UnitDisc, c(0.3, 0.0), c(0.35, 0.0), -0.5).unwrap() < 1e-6);
        assert!(pde_residual(&DomainSpec::UnitDisc, c(0.0, 0.0), c(0.1, 0.0), -1.0, 1e-3).unwrap() < 1e-5);
        assert!(pde_residual(&DomainSpec::UnitDisc, c(0.3, 0.0), c(0.2, 0.0), -1.0, 1e-3).unwrap() < 1e-4);
        assert_eq!(
            key_lemma_residual(&DomainSpec::UnitDisc, c(0.0, 0.0), c(0.5, 0.0), -1.0).unwrap_err().tag(),
            "t-outside-sublevel"
        );
        assert_eq!(
            pde_residual(&DomainSpec::UnitDisc, c(0.0, 0.0), c(0.1, 0.0), -1e-4, 1e-3).unwrap_err().tag(),
            "invalid-step"
        );
    }

    #[test]
    fn capacity_scaling_on_discs() {
        assert!(capacity_scaling_check(&DomainSpec::UnitDisc, c(0.0, 0.0), -1.0).unwrap() < 1e-6);
        assert!(capacity_scaling_check(&DomainSpec::UnitDisc, c(0.4, 0.0), -0.5).unwrap() < 1e-5);
        assert!(capacity_scaling_check(&DomainSpec::UnitDisc, c(0.4, 0.0), 0.0).is_err());
    }
}
