//! Minimal-norm holomorphic functions with a prescribed value at a point.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bergman::{self, BergmanBasis, NumericConfig};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::green;
use crate::quadrature::QuadratureGrid;
use crate::variation::{sublevel_domain, sublevel_kernel};
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionRoute {
    KernelFormula,
    ConstrainedQp,
}

impl ExtensionRoute {
    pub fn tag(&self) -> &'static str {
        match self {
            ExtensionRoute::KernelFormula => "kernel_formula",
            ExtensionRoute::ConstrainedQp => "constrained_qp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionSolution {
    /// Coefficients over the raw basis (qp route only).
    pub coefficients: Option<Vec<Point>>,
    pub norm: f64,
    pub value_at_pole: Point,
    pub route: ExtensionRoute,
}

/// `h(t) = c(z0) K(t, z0) / K(z0)`: norm `c / sqrt(K)`, value `c` at `z0`.
pub fn minimal_extension_closed(domain: &DomainSpec, z0: Point) -> Result<ExtensionSolution> {
    let k = bergman::kernel_diag(domain, z0)?.value.re;
    let c = green::log_capacity(domain, z0)?.value;
    Ok(ExtensionSolution {
        coefficients: None,
        norm: c / k.sqrt(),
        value_at_pole: Point::new(c, 0.0),
        route: ExtensionRoute::KernelFormula,
    })
}

/// Minimises `||g||` over the span of `basis` subject to `g(z0) = c_target`.
///
/// In the orthonormalised family `psi_i` the minimiser has coordinates
/// `c conj(psi_i(z0)) / sum |psi_j(z0)|^2`. The reported norm is the
/// quadrature norm of the resulting function on `grid`.
pub fn minimal_extension_numeric(basis: &BergmanBasis, grid: &QuadratureGrid, z0: Point, c_target: f64) -> Result<ExtensionSolution> {
    let n = basis.len();
    if c_target == 0.0 {
        return Ok(ExtensionSolution {
            coefficients: Some(alloc::vec![Point::new(0.0, 0.0); n]),
            norm: 0.0,
            value_at_pole: Point::new(0.0, 0.0),
            route: ExtensionRoute::ConstrainedQp,
        });
    }
    let psi = basis.orthonormal_at(z0);
    let kz: f64 = psi.iter().map(|p| p.norm_sqr()).sum();
    let vz = basis.eval(z0);
    let vmax = vz.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(kz > 1e-300) || vmax == 0.0 {
        return Err(Error::ConstraintInfeasible);
    }
    let cmat = basis.orthonormal_coefficients();
    let coeffs: Vec<Point> = (0..n)
        .map(|j| (0..psi.len()).map(|i| cmat[(j, i)] * psi[i].conj()).sum::<Point>() * (c_target / kz))
        .collect();
    let value: Point = vz.iter().zip(&coeffs).map(|(v, a)| v * a).sum();
    let norm2 = grid.integrate(|t| {
        let g: Point = basis.eval(t).iter().zip(&coeffs).map(|(v, a)| v * a).sum();
        g.norm_sqr()
    });
    Ok(ExtensionSolution { coefficients: Some(coeffs), norm: norm2.sqrt(), value_at_pole: value, route: ExtensionRoute::ConstrainedQp })
}

/// Evaluates a qp solution at `t`.
pub fn eval_solution(basis: &BergmanBasis, sol: &ExtensionSolution, t: Point) -> Option<Point> {
    sol.coefficients.as_ref().map(|c| basis.eval(t).iter().zip(c).map(|(v, a)| v * a).sum())
}

/// Squared Gram norm `a^T G conj(a)` of a coefficient vector.
pub fn gram_norm_sqr(basis: &BergmanBasis, coeffs: &[Point]) -> f64 {
    let n = coeffs.len();
    let mut s = Point::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            s += coeffs[j] * basis.gram[(j, k)] * coeffs[k].conj();
        }
    }
    s.re
}

/// Local uniqueness certificate: for each direction (coefficients of a
/// function), its component vanishing at `z0` is added with step `eps` and
/// the relative Gram-norm increase is returned. Positive values certify that
/// no admissible perturbation lowers the norm.
pub fn perturbation_gains(basis: &BergmanBasis, sol: &ExtensionSolution, z0: Point, directions: &[Vec<Point>], eps: f64) -> Result<Vec<f64>> {
    let a = sol.coefficients.as_ref().ok_or(Error::Unsupported("closed-form solution has no coefficients".into()))?;
    let vz = basis.eval(z0);
    let base = gram_norm_sqr(basis, a);
    let mut out = Vec::with_capacity(directions.len());
    for d in directions {
        // remove the value at z0 by subtracting the matching multiple of the minimiser
        let dv: Point = vz.iter().zip(d).map(|(v, x)| v * x).sum();
        let av: Point = vz.iter().zip(a).map(|(v, x)| v * x).sum();
        let f = dv / av;
        let dd: Vec<Point> = d.iter().zip(a).map(|(x, y)| x - y * f).collect();
        let p: Vec<Point> = a.iter().zip(&dd).map(|(x, y)| x + y * eps).collect();
        out.push((gram_norm_sqr(basis, &p) - base) / base);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub norm: f64,
    pub bound: f64,
    pub tol: f64,
    pub pass: bool,
    pub equality: bool,
}

/// Minimal norm against `sqrt(pi)`.
pub fn extension_bound_check(domain: &DomainSpec, z0: Point, tol: f64) -> Result<BoundReport> {
    let s = minimal_extension_closed(domain, z0)?;
    let bound = PI.sqrt();
    Ok(BoundReport { norm: s.norm, bound, tol, pass: s.norm <= bound + tol, equality: (s.norm - bound).abs() < tol })
}

/// Coefficient of `F_s = e^{2s} sqrt(pi) K_s(t, z0) / sqrt(K(z0)) dz` on `X_s`.
pub fn f_tau(base: &DomainSpec, z0: Point, s: f64, t: Point) -> Result<Point> {
    let cfg = NumericConfig::default();
    let k0 = bergman::kernel_diag(base, z0)?.value.re;
    let ks = sublevel_kernel(base, z0, t, s, &cfg)?;
    Ok(ks * ((2.0 * s).exp() * PI.sqrt() / k0.sqrt()))
}

/// `B_s` from the level derivative: `-(1/2) dK_s/ds` by central differences,
/// rescaled like `F_s`. Equals `F_s` exactly when `K_s` scales as `e^{-2s}`.
pub fn b_tau(base: &DomainSpec, z0: Point, s: f64, t: Point, h: f64) -> Result<Point> {
    if !(h > 0.0) || s + h > 0.0 {
        return Err(Error::InvalidStep);
    }
    let cfg = NumericConfig::default();
    let k0 = bergman::kernel_diag(base, z0)?.value.re;
    let hi = sublevel_kernel(base, z0, t, s + h, &cfg)?;
    let lo = sublevel_kernel(base, z0, t, s - h, &cfg)?;
    let d = -(hi - lo) / (2.0 * h) * 0.5;
    Ok(d * ((2.0 * s).exp() * PI.sqrt() / k0.sqrt()))
}

/// Quadrature norm of `F_s` over `X_s` on a grid of the sublevel.
pub fn f_tau_norm(base: &DomainSpec, z0: Point, s: f64, resolution: usize) -> Result<f64> {
    let d = sublevel_domain(base, z0, s)?;
    let grid = crate::quadrature::build_quadrature(&d, resolution, 0)?;
    let cfg = NumericConfig::default();
    let route = bergman::kernel_route(&d, z0, &cfg)?;
    let sec = route.section(z0)?;
    let k0 = bergman::kernel_diag(base, z0)?.value.re;
    let f = (2.0 * s).exp() * PI.sqrt() / k0.sqrt();
    let mut acc = 0.0;
    for (t, w) in grid.nodes.iter().zip(&grid.weights) {
        acc += w * (sec.eval(*t)? * f).norm_sqr();
    }
    Ok(acc.sqrt())
}
