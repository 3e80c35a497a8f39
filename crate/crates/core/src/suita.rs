//! Suita ratio `pi K / c^2`, the curvature identity and related checks.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bergman::{self, KernelMethod, NumericConfig};
use crate::error::{Error, Result};
use crate::geometry::{self, DomainSpec};
use crate::green::{self, CapacityMethod};
use crate::mapping;
use crate::quadrature::QuadratureGrid;
use crate::Point;

#[derive(Debug, Clone, PartialEq)]
pub struct SuitaRecord {
    pub z0: Point,
    pub k: f64,
    pub c: f64,
    pub ratio: f64,
    /// Gaussian curvature of `c^2 |dz|^2`, equal to `-4 ratio`.
    pub curvature: f64,
    pub method_k: KernelMethod,
    pub method_c: CapacityMethod,
}

fn record(z0: Point, k: f64, c: f64, method_k: KernelMethod, method_c: CapacityMethod) -> SuitaRecord {
    let ratio = PI * k / (c * c);
    SuitaRecord { z0, k, c, ratio, curvature: -4.0 * ratio, method_k, method_c }
}

/// Suita ratio by the preferred routes (closed form, series, scaling, Gram).
pub fn suita_ratio(domain: &DomainSpec, z0: Point) -> Result<SuitaRecord> {
    suita_ratio_with(domain, z0, &NumericConfig::default())
}

pub fn suita_ratio_with(domain: &DomainSpec, z0: Point, cfg: &NumericConfig) -> Result<SuitaRecord> {
    let k = bergman::kernel_diag_with(domain, z0, cfg)?;
    let (c, mc) = green::log_capacity_with_method(domain, z0)?;
    Ok(record(z0, k.value.re, c.value, k.method, mc))
}

/// Suita ratio with the Gram kernel and probe-extracted capacity only.
pub fn suita_ratio_numeric(domain: &DomainSpec, z0: Point, cfg: &NumericConfig) -> Result<SuitaRecord> {
    let route = bergman::numeric_route_for(domain, z0, cfg)?;
    let k = route.value(z0, z0)?.re;
    let c = green::probe_capacity(domain, z0)?;
    Ok(record(z0, k, c.value, KernelMethod::GramNumeric, CapacityMethod::ProbeRichardson))
}

/// Elementwise [`suita_ratio`], in input order.
pub fn suita_scan(domain: &DomainSpec, points: &[Point]) -> Result<Vec<SuitaRecord>> {
    points.iter().map(|z| suita_ratio(domain, *z)).collect()
}

/// `|Laplacian(log c)/4 - pi K| / (pi K)` with a 5-point Laplacian at steps
/// `h` and `h/2` combined by Richardson extrapolation (9 points in total).
pub fn curvature_residual(domain: &DomainSpec, z: Point, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let dirs = [Point::new(1.0, 0.0), Point::new(-1.0, 0.0), Point::new(0.0, 1.0), Point::new(0.0, -1.0)];
    for d in dirs {
        if !domain.contains(z + d * h)? {
            return Err(Error::StencilOutside);
        }
    }
    if !domain.contains(z)? {
        return Err(Error::StencilOutside);
    }
    let lc = |w: Point| green::log_capacity(domain, w).map(|c| c.value.ln());
    let centre = lc(z)?;
    let lap = |step: f64| -> Result<f64> {
        let mut s = -4.0 * centre;
        for d in dirs {
            s += lc(z + d * step)?;
        }
        Ok(s / (step * step))
    };
    let l1 = lap(h)?;
    let l2 = lap(0.5 * h)?;
    let l = (4.0 * l2 - l1) / 3.0;
    let pk = PI * bergman::kernel_diag(domain, z)?.value.re;
    Ok((l / 4.0 - pk).abs() / pk)
}

/// Analytic capacity of the disc `|z| < R` at `z0`, computed as the
/// derivative at `z0` of the normalised Möbius map.
pub fn analytic_capacity_disc(radius: f64, z0: Point) -> Result<f64> {
    let m = mapping::local_uniformizer_disc(radius, z0)?;
    Ok(m.derivative(z0).re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeReport {
    pub k: f64,
    pub volume: f64,
    pub product: f64,
    pub tol: f64,
    pub pass: bool,
    /// Whether equality `K Vol = 1` is expected (disc centred at `z0`).
    pub equality_expected: bool,
}

/// `K(z0) Vol >= 1`, with `Vol` the grid's total weight.
pub fn volume_bound_check(domain: &DomainSpec, z0: Point, grid: &QuadratureGrid, tol: f64) -> Result<VolumeReport> {
    let k = bergman::kernel_diag(domain, z0)?.value.re;
    let volume = grid.total_weight();
    let product = k * volume;
    let equality_expected = match geometry::as_disc(domain)? {
        Some((c, r)) => (c - z0).norm() <= 1e-12 * r && geometry::resolve(domain)?.excised().is_empty(),
        None => false,
    };
    Ok(VolumeReport { k, volume, product, tol, pass: product >= 1.0 - tol, equality_expected })
}
