//! Riemann maps of simply connected Green sublevels from the Bergman kernel.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bergman::{self, KernelRoute, NumericConfig};
use crate::error::{Error, Result};
use crate::geometry::{self, Connectivity, DomainSpec};
use crate::green;
use crate::variation::sublevel_domain;
use crate::Point;

/// `m(z) = R (z - z0) / (R^2 - conj(z0) z)`: maps `|z| < R` onto the unit
/// disc with `m(z0) = 0`, `m'(z0) > 0` and `G = ln|m|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub radius: f64,
    pub z0: Point,
}

impl MobiusMap {
    pub fn eval(&self, z: Point) -> Point {
        let r2 = Point::new(self.radius * self.radius, 0.0);
        (z - self.z0) * self.radius / (r2 - self.z0.conj() * z)
    }

    pub fn derivative(&self, z: Point) -> Point {
        let r2 = self.radius * self.radius;
        let den = Point::new(r2, 0.0) - self.z0.conj() * z;
        Point::new(self.radius * (r2 - self.z0.norm_sqr()), 0.0) / (den * den)
    }
}

/// The disc uniformiser at `z0`.
pub fn local_uniformizer_disc(radius: f64, z0: Point) -> Result<MobiusMap> {
    if !(radius > 0.0) || z0.norm() >= radius {
        return Err(Error::NotInDisc);
    }
    Ok(MobiusMap { radius, z0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledMap {
    pub pole: Point,
    /// `r = e^s`.
    pub radius: f64,
    /// `(t, f0(t))` in input order.
    pub samples: Vec<(Point, Point)>,
    pub derivative_at_pole: f64,
}

/// Kernel data of a simply connected sublevel on a closed-form route.
pub struct MapKernel {
    route: KernelRoute,
    domain: DomainSpec,
    z0: Point,
    r: f64,
    k0: f64,
}

impl MapKernel {
    pub fn new(base: &DomainSpec, z0: Point, s: f64) -> Result<Self> {
        let domain = sublevel_domain(base, z0, s)?;
        if geometry::connectivity(&domain)? != Connectivity::Simply {
            return Err(Error::NotSimplyConnected);
        }
        let route = bergman::kernel_route(&domain, z0, &NumericConfig::default())?;
        if matches!(route, KernelRoute::Numeric { .. }) {
            return Err(Error::Unsupported("kernel-derived map needs a closed-form or series kernel".into()));
        }
        let k0 = route.value(z0, z0)?.re;
        Ok(MapKernel { route, domain, z0, r: s.exp(), k0 })
    }

    /// Coefficient of `df0`, `r sqrt(pi) K_s(t, z0) / sqrt(K_s(z0))`.
    pub fn df0(&self, t: Point) -> Result<Point> {
        Ok(self.route.value(t, self.z0)? * (self.r * PI.sqrt() / self.k0.sqrt()))
    }

    pub fn derivative_at_pole(&self) -> f64 {
        self.r * (PI * self.k0).sqrt()
    }

    /// `integral of df0` along the polyline `path`.
    pub fn integrate_path(&self, path: &[Point]) -> Result<Point> {
        let mut acc = Point::new(0.0, 0.0);
        for seg in path.windows(2) {
            acc += self.integrate_segment(seg[0], seg[1])?;
        }
        Ok(acc)
    }

    fn integrate_segment(&self, a: Point, b: Point) -> Result<Point> {
        let d = b - a;
        if d.norm() == 0.0 {
            return Ok(Point::new(0.0, 0.0));
        }
        let steps = 64;
        for k in 0..=steps {
            let z = a + d * (k as f64 / steps as f64);
            if z != self.z0 && !self.domain.contains(z)? {
                return Err(Error::PathExitsDomain);
            }
        }
        // Romberg on the trapezoid sequence, refined until the change is below tol
        let f = |u: f64| self.df0(a + d * u).map(|v| v * d);
        let mut n = 1usize;
        let mut trap = (f(0.0)? + f(1.0)?) * 0.5;
        let mut prev_row: Vec<Point> = alloc::vec![trap];
        for _level in 1..20 {
            let h = 1.0 / (2 * n) as f64;
            let mut mid = Point::new(0.0, 0.0);
            for i in 0..n {
                mid += f((2 * i + 1) as f64 * h)?;
            }
            trap = trap * 0.5 + mid * h;
            n *= 2;
            let mut row = alloc::vec![trap];
            let mut p4 = 1.0;
            for (j, pj) in prev_row.iter().enumerate() {
                p4 *= 4.0;
                let r = (row[j] * p4 - pj) / (p4 - 1.0);
                row.push(r);
            }
            let change = (row[row.len() - 1] - prev_row[prev_row.len() - 1]).norm();
            let scale = row[row.len() - 1].norm().max(1e-300);
            prev_row = row;
            if change <= 1e-14 * scale.max(1.0) && n >= 8 {
                break;
            }
        }
        Ok(prev_row[prev_row.len() - 1])
    }
}

/// Samples of the Riemann map `f0 : X_s -> D_r` obtained by integrating
/// `df0` along straight segments from `z0`.
pub fn riemann_map_from_kernel(base: &DomainSpec, z0: Point, s: f64, sample_points: &[Point]) -> Result<SampledMap> {
    let mk = MapKernel::new(base, z0, s)?;
    let mut samples = Vec::with_capacity(sample_points.len());
    for t in sample_points {
        if !mk.domain.contains(*t)? {
            return Err(Error::PathExitsDomain);
        }
        samples.push((*t, mk.integrate_path(&[z0, *t])?));
    }
    Ok(SampledMap { pole: z0, radius: mk.r, samples, derivative_at_pole: mk.derivative_at_pole() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapReport {
    /// (a) `max |ln|f0(t)| - G_base(t, z0)|`.
    pub modulus_residual: f64,
    /// (b) `|f0(z0)|`.
    pub value_at_pole: f64,
    /// (c) positive derivative, both as recorded and as seen by the samples.
    pub derivative_positive: bool,
    /// (d) `max |df0 - sqrt(pi) K(t, z0) / sqrt(K(z0))| / |.|` over samples.
    pub corollary_residual: f64,
    pub pass: bool,
}

/// Checks a sampled map against the Green function and the base kernel.
pub fn map_validation(map: &SampledMap, base: &DomainSpec, z0: Point, s: f64) -> Result<MapReport> {
    let mk = MapKernel::new(base, z0, s)?;
    let mut modulus: f64 = 0.0;
    for (t, f) in &map.samples {
        if (t - z0).norm() < 1e-12 {
            continue;
        }
        let g = green::green_value(base, *t, z0)?;
        modulus = modulus.max((f.norm().ln() - g).abs());
    }
    let at_pole = mk.integrate_path(&[z0, z0])?.norm();
    // difference quotient at the sample closest to the pole
    let seen = map
        .samples
        .iter()
        .filter(|(t, _)| (t - z0).norm() > 1e-12)
        .min_by(|a, b| (a.0 - z0).norm().partial_cmp(&(b.0 - z0).norm()).unwrap())
        .map(|(t, f)| f / (t - z0));
    let derivative_positive = map.derivative_at_pole > 0.0
        && match seen {
            Some(q) => q.re > 0.0 && q.im.abs() < 0.1 * q.re,
            None => true,
        };
    let base_route = bergman::kernel_route(base, z0, &NumericConfig::default())?;
    let kb = base_route.value(z0, z0)?.re;
    let mut cor: f64 = 0.0;
    for (t, _) in &map.samples {
        let lhs = mk.df0(*t)?;
        let rhs = base_route.value(*t, z0)? * (PI.sqrt() / kb.sqrt());
        cor = cor.max((lhs - rhs).norm() / rhs.norm());
    }
    Ok(MapReport {
        modulus_residual: modulus,
        value_at_pole: at_pole,
        derivative_positive,
        corollary_residual: cor,
        pass: modulus < 1e-5 && at_pole < 1e-12 && derivative_positive && cor < 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Point {
        Point::new(re, im)
    }

    #[test]
    fn mobius_examples() {
        let m = local_uniformizer_disc(1.0, c(0.0, 0.0)).unwrap();
        assert_eq!(m.eval(c(0.3, 0.2)), c(0.3, 0.2));
        let m = local_uniformizer_disc(1.0, c(0.5, 0.0)).unwrap();
        assert!((m.derivative(c(0.5, 0.0)).re - 1.0 / 0.75).abs() < 1e-14);
        for k in 0..20 {
            let z = Point::from_polar(0.04 * k as f64 + 0.01, k as f64);
            if (z - 0.5).norm() < 1e-9 {
                continue;
            }
            let g = green::green_value(&DomainSpec::UnitDisc, z, c(0.5, 0.0)).unwrap();
            assert!((g - m.eval(z).norm().ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn scaled_identity() {
        let pts: Vec<Point> = (1..6).map(|k| c(0.06 * k as f64, 0.0)).collect();
        let m = riemann_map_from_kernel(&DomainSpec::UnitDisc, c(0.0, 0.0), -1.0, &pts).unwrap();
        let r = (-1.0f64).exp();
        for (t, f) in &m.samples {
            assert!((f - t).norm() < 1e-10, "{t} {f} {r}");
        }
        assert!((m.derivative_at_pole - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mobius_oracle() {
        let z0 = c(0.3, 0.0);
        let s = -0.7;
        let pts = [c(0.35, 0.05), c(0.2, -0.1), c(0.4, 0.1)];
        let m = riemann_map_from_kernel(&DomainSpec::UnitDisc, z0, s, &pts).unwrap();
        let mob = local_uniformizer_disc(1.0, z0).unwrap();
        for (t, f) in &m.samples {
            assert!((f - mob.eval(*t)).norm() < 1e-10);
        }
        let rep = map_validation(&m, &DomainSpec::UnitDisc, z0, s).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn loop_returns_to_zero() {
        let mk = MapKernel::new(&DomainSpec::UnitDisc, c(0.0, 0.0), -1.0).unwrap();
        let v = mk.integrate_path(&[c(0.0, 0.0), c(0.2, 0.0), c(0.1, 0.2), c(0.0, 0.0)]).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn rejects_doubly_connected() {
        let a = DomainSpec::Annulus { q: 0.25 };
        let e = riemann_map_from_kernel(&a, c(0.5, 0.0), -0.001, &[]).unwrap_err();
        assert_eq!(e.tag(), "not-simply-connected");
    }
}
