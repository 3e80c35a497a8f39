//! Green functions and logarithmic capacity.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{self, DomainSpec, Resolved, Shape};
use crate::roots::brent_min;
use crate::Point;

/// Truncation tolerance of the annulus image products.
pub const SERIES_TOL: f64 = 1e-15;
/// Maximum number of image pairs before the series is declared divergent.
pub const MAX_IMAGE_PAIRS: usize = 200;

/// Capacity estimate with its extrapolation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityValue {
    pub value: f64,
    pub extrapolation_error: f64,
    pub probe_radii: Vec<f64>,
}

/// How a capacity value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMethod {
    ClosedForm,
    ProbeRichardson,
    SublevelScaling,
}

impl CapacityMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            CapacityMethod::ClosedForm => "closed_form",
            CapacityMethod::ProbeRichardson => "probe_richardson",
            CapacityMethod::SublevelScaling => "sublevel_scaling",
        }
    }
}

fn check_pole(z: Point, z0: Point) -> Result<()> {
    if (z - z0).norm() <= 4.0 * f64::EPSILON * (1.0 + z0.norm()) {
        Err(Error::PoleCollision)
    } else {
        Ok(())
    }
}

/// `ln|P(zeta)| - ln|1 - zeta|` for the image product
/// `P(zeta) = (1 - zeta) prod_k (1 - q^{2k} zeta)(1 - q^{2k}/zeta)`.
fn log_p_tail(q2: f64, zeta: Point) -> Result<f64> {
    let inv = zeta.inv();
    let big = zeta.norm().max(inv.norm());
    let mut qk = q2;
    let mut acc = 0.0;
    for _ in 0..MAX_IMAGE_PAIRS {
        acc += (Point::new(1.0, 0.0) - zeta * qk).norm().ln()
            + (Point::new(1.0, 0.0) - inv * qk).norm().ln();
        if qk * big < SERIES_TOL / 10.0 {
            return Ok(acc);
        }
        qk *= q2;
    }
    Err(Error::SeriesDiverged)
}

/// Green function of `q < |z| < 1` with pole `a`, by the image product.
pub(crate) fn annulus_green(q: f64, z: Point, a: Point) -> Result<f64> {
    check_pole(z, a)?;
    let q2 = q * q;
    let la = a.norm().ln();
    let alpha = -la / q.ln();
    let t1 = (a - z).norm().ln() - la + log_p_tail(q2, z / a)?;
    let w = z * a.conj();
    let t2 = (Point::new(1.0, 0.0) - w).norm().ln() + log_p_tail(q2, w)?;
    Ok(t1 - t2 + la + alpha * z.norm().ln())
}

fn disc_green(center: Point, radius: f64, z: Point, z0: Point) -> Result<f64> {
    check_pole(z, z0)?;
    let den = Point::new(radius * radius, 0.0) - (z0 - center).conj() * (z - center);
    Ok((z - z0).norm().ln() + radius.ln() - den.norm().ln())
}

/// Green function of a resolved shape (punctures are removable for `G`).
pub(crate) fn shape_green(shape: &Shape, z: Point, z0: Point) -> Result<f64> {
    match *shape {
        Shape::Disc { center, radius } => disc_green(center, radius, z, z0),
        Shape::Annulus { q } => annulus_green(q, z, z0),
        Shape::AnnulusSublevel { q, pole, level } => {
            if z0 != pole {
                return Err(Error::Unsupported("green function of an annulus sublevel off its pole".into()));
            }
            Ok(annulus_green(q, z, z0)? - level)
        }
    }
}

/// Green function `G(z, z0)` of `domain`.
///
/// A sublevel evaluated at its own pole returns `G_base - level`. Points are
/// not membership checked beyond `z0`, so boundary values can be sampled.
pub fn green_value(domain: &DomainSpec, z: Point, z0: Point) -> Result<f64> {
    match domain {
        DomainSpec::Sublevel { base, pole, level } if *pole == z0 => {
            Ok(green_value(base, z, z0)? - level)
        }
        DomainSpec::Punctured { base, .. } => green_value(base, z, z0),
        _ => {
            let r = geometry::resolve(domain)?;
            if !r.shape.contains(z0) {
                return Err(Error::NotInDomain);
            }
            shape_green(&r.shape, z, z0)
        }
    }
}

/// Critical point of `G(., a)` on the annulus and the critical value.
///
/// The critical point sits on the ray opposite to `a`; sublevels below the
/// critical value are simply connected, above it they surround the hole.
pub fn annulus_critical(q: f64, a: Point) -> Result<(Point, f64)> {
    let u = -a / a.norm();
    let mut err = None;
    let (r, g) = brent_min(
        |r| match annulus_green(q, u * r, a) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        q,
        1.0,
        1e-13,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok((u * r, g))
}

/// Logarithmic capacity `c(z0)`.
pub fn log_capacity(domain: &DomainSpec, z0: Point) -> Result<CapacityValue> {
    log_capacity_with_method(domain, z0).map(|(c, _)| c)
}

pub(crate) fn log_capacity_with_method(domain: &DomainSpec, z0: Point) -> Result<(CapacityValue, CapacityMethod)> {
    match domain {
        DomainSpec::Sublevel { base, pole, level } if *pole == z0 => {
            if !domain.contains(z0)? {
                return Err(Error::NotInDomain);
            }
            let (c, _) = log_capacity_with_method(base, z0)?;
            let f = (-level).exp();
            Ok((
                CapacityValue {
                    value: c.value * f,
                    extrapolation_error: c.extrapolation_error * f,
                    probe_radii: c.probe_radii,
                },
                CapacityMethod::SublevelScaling,
            ))
        }
        _ => {
            let r = geometry::resolve(domain)?;
            if !r.contains(z0) {
                return Err(Error::NotInDomain);
            }
            match r.shape {
                Shape::Disc { center, radius } => Ok((
                    CapacityValue {
                        value: radius / (radius * radius - (z0 - center).norm_sqr()),
                        extrapolation_error: 0.0,
                        probe_radii: Vec::new(),
                    },
                    CapacityMethod::ClosedForm,
                )),
                Shape::Annulus { .. } => Ok((probe_resolved(&r, z0)?, CapacityMethod::ProbeRichardson)),
                Shape::AnnulusSublevel { .. } => {
                    Err(Error::Unsupported("capacity of an annulus sublevel off its pole".into()))
                }
            }
        }
    }
}

/// Capacity re-extracted from probe averages of the domain's own Green
/// function (no closed forms, no sublevel scaling).
pub fn probe_capacity(domain: &DomainSpec, z0: Point) -> Result<CapacityValue> {
    let r = geometry::resolve(domain)?;
    if !r.contains(z0) {
        return Err(Error::NotInDomain);
    }
    probe_resolved(&r, z0)
}

fn probe_resolved(r: &Resolved, z0: Point) -> Result<CapacityValue> {
    let h = match geometry::boundary_distance(r, z0) {
        Some(d) => 0.25 * d,
        None => {
            // sublevel: stay well inside by shrinking until the probe circle fits
            let mut h = 0.05;
            while (0..16).any(|k| !r.shape.contains(z0 + Point::from_polar(4.0 * h, PI * k as f64 / 8.0))) {
                h *= 0.5;
                if h < 1e-8 {
                    return Err(Error::ExtrapolationUnstable { spread: f64::INFINITY });
                }
            }
            h
        }
    };
    probe_extract(|z| shape_green(&r.shape, z, z0), z0, h)
}

/// Richardson extrapolation of 8-angle averages of `G(z) - ln|z - z0|` at
/// radii `h, h/2, h/4`. The average cancels Fourier modes below 8, so the
/// error is a series in `rho^8`.
pub(crate) fn probe_extract<F: Fn(Point) -> Result<f64>>(g: F, z0: Point, h: f64) -> Result<CapacityValue> {
    let radii: Vec<f64> = (0..3).map(|k| h / (1u32 << k) as f64).collect();
    let mut avg = [0.0; 3];
    for (k, &rho) in radii.iter().enumerate() {
        let mut s = 0.0;
        for j in 0..8 {
            let z = z0 + Point::from_polar(rho, 2.0 * PI * (j as f64 + 0.5) / 8.0);
            s += g(z)? - rho.ln();
        }
        avg[k] = s / 8.0;
    }
    let f8 = 256.0;
    let r1 = (f8 * avg[1] - avg[0]) / (f8 - 1.0);
    let r2 = (f8 * avg[2] - avg[1]) / (f8 - 1.0);
    let f16 = 65536.0;
    let best = (f16 * r2 - r1) / (f16 - 1.0);
    let spread = (r2 - r1).abs();
    if !best.is_finite() || spread > 1e-8 * (1.0 + best.abs()) {
        return Err(Error::ExtrapolationUnstable { spread });
    }
    let value = best.exp();
    Ok(CapacityValue { value, extrapolation_error: value * spread, probe_radii: radii })
}

/// Residual diagnostics of a Green function implementation.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenReport {
    pub boundary_residual: f64,
    /// Mean-value defect of the 5-point stencil, `h^2 |Laplacian_h G| / 4`.
    pub harmonicity_residual: f64,
    pub symmetry_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks boundary vanishing, harmonicity and symmetry of `G(., z0)`.
pub fn validate_green(domain: &DomainSpec, z0: Point, tol: f64) -> GreenReport {
    let fail = GreenReport {
        boundary_residual: f64::INFINITY,
        harmonicity_residual: f64::INFINITY,
        symmetry_residual: f64::INFINITY,
        tol,
        pass: false,
    };
    let Ok(r) = geometry::resolve(domain) else { return fail };
    let (boundary, scale, inner): (Vec<Point>, f64, f64) = match r.shape {
        Shape::Disc { center, radius } => (
            (0..64).map(|k| center + Point::from_polar(radius, 2.0 * PI * k as f64 / 64.0)).collect(),
            radius,
            0.0,
        ),
        Shape::Annulus { q } => (
            (0..128)
                .map(|k| Point::from_polar(if k < 64 { 1.0 } else { q }, 2.0 * PI * k as f64 / 64.0))
                .collect(),
            1.0,
            q,
        ),
        Shape::AnnulusSublevel { .. } => return fail,
    };
    if !r.shape.contains(z0) {
        return fail;
    }
    let center = match r.shape {
        Shape::Disc { center, .. } => center,
        _ => Point::new(0.0, 0.0),
    };
    let g = |z: Point, w: Point| shape_green(&r.shape, z, w);
    let mut bres: f64 = 0.0;
    for b in &boundary {
        match g(*b, z0) {
            Ok(v) => bres = bres.max(v.abs()),
            Err(_) => return fail,
        }
    }
    let h = 1e-4 * scale;
    let mut interior = Vec::new();
    for i in 0..6 {
        let rad = inner + (scale - inner) * (i as f64 + 0.5) / 6.0;
        for j in 0..12 {
            let z = center + Point::from_polar(rad, 2.0 * PI * (j as f64 + 0.3 * i as f64) / 12.0);
            interior.push(z);
        }
    }
    let mut hres: f64 = 0.0;
    for z in &interior {
        if (z - z0).norm() < 0.1 * scale {
            continue;
        }
        let st = [Point::new(h, 0.0), Point::new(-h, 0.0), Point::new(0.0, h), Point::new(0.0, -h)];
        if st.iter().any(|d| !r.shape.contains(z + d)) {
            continue;
        }
        let (Ok(c0), Ok(e), Ok(w), Ok(n), Ok(s)) =
            (g(*z, z0), g(z + st[0], z0), g(z + st[1], z0), g(z + st[2], z0), g(z + st[3], z0))
        else {
            return fail;
        };
        hres = hres.max(((e + w + n + s) / 4.0 - c0).abs());
    }
    let mut sres: f64 = 0.0;
    for (i, z) in interior.iter().enumerate().step_by(3) {
        for w in interior.iter().skip(i + 1).step_by(5) {
            let (Ok(a), Ok(b)) = (g(*z, *w), g(*w, *z)) else { return fail };
            sres = sres.max((a - b).abs());
        }
    }
    GreenReport {
        boundary_residual: bres,
        harmonicity_residual: hres,
        symmetry_residual: sres,
        tol,
        pass: bres < tol && hres < tol && sres < tol,
    }
}
