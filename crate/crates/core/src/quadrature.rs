//! Area quadrature on the supported domains.
//!
//! Discs and annuli use tensor grids (Gauss–Legendre in the radius, uniform
//! angles). Annulus Green sublevels use grids fitted to the level curve along
//! rays from the hole; a single excised disc inside a disc gets a polar grid
//! centred at the puncture. Other punctured domains filter the base grid.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gauss::legendre_on;
use crate::geometry::{self, Connectivity, DomainSpec, Resolved, Shape};
use crate::green::{annulus_critical, annulus_green};
use crate::roots::{brent_min, brent_root};
use crate::Point;

/// Resolution used when callers do not choose one.
pub const DEFAULT_RESOLUTION: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    /// Largest spacing between neighbouring nodes.
    pub cell_scale: f64,
    pub seed: u64,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i w_i f(z_i)` in node order.
    pub fn integrate<F: FnMut(Point) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }
}

fn radial_nodes(resolution: usize) -> usize {
    (resolution / 4).max(8)
}

/// Builds a deterministic grid; `resolution` is the number of angles.
/// The seed is recorded but no randomisation is used.
pub fn build_quadrature(domain: &DomainSpec, resolution: usize, seed: u64) -> Result<QuadratureGrid> {
    let r = geometry::resolve(domain)?;
    build_resolved(&r, resolution, seed)
}

pub(crate) fn build_resolved(r: &Resolved, resolution: usize, seed: u64) -> Result<QuadratureGrid> {
    if resolution < 16 {
        return Err(Error::InvalidResolution(resolution));
    }
    let nt = resolution;
    let nr = radial_nodes(resolution);
    let excised = r.excised();
    let mut g = match (&r.shape, excised.len()) {
        (Shape::Disc { center, radius }, 1) => punctured_disc(*center, *radius, excised[0], r.eps, nt, nr),
        (Shape::Disc { center, radius }, _) => polar(*center, 0.0, *radius, nt, nr),
        (Shape::Annulus { q }, _) => polar(Point::new(0.0, 0.0), *q, 1.0, nt, nr),
        (Shape::AnnulusSublevel { q, pole, level }, _) => sublevel_grid(*q, *pole, *level, nt, nr)?,
    };
    if excised.len() > 1 || (excised.len() == 1 && !matches!(r.shape, Shape::Disc { .. })) {
        let (mut nodes, mut weights) = (Vec::new(), Vec::new());
        for (z, w) in g.nodes.iter().zip(&g.weights) {
            if excised.iter().all(|p| (z - p).norm() > r.eps) {
                nodes.push(*z);
                weights.push(*w);
            }
        }
        g.nodes = nodes;
        g.weights = weights;
    }
    if g.nodes.is_empty() {
        return Err(Error::EmptyDomain);
    }
    g.seed = seed;
    Ok(g)
}

fn polar(center: Point, r0: f64, r1: f64, nt: usize, nr: usize) -> QuadratureGrid {
    let (rs, ws) = legendre_on(nr, r0, r1);
    let dt = 2.0 * PI / nt as f64;
    let mut nodes = Vec::with_capacity(nt * nr);
    let mut weights = Vec::with_capacity(nt * nr);
    for j in 0..nt {
        let th = dt * j as f64;
        for (r, w) in rs.iter().zip(&ws) {
            nodes.push(center + Point::from_polar(*r, th));
            weights.push(w * r * dt);
        }
    }
    QuadratureGrid { nodes, weights, cell_scale: cell(&rs, r0, r1, r1 * dt), seed: 0 }
}

fn cell(rs: &[f64], r0: f64, r1: f64, arc: f64) -> f64 {
    let mut m: f64 = arc;
    let mut prev = r0;
    for r in rs {
        m = m.max(r - prev);
        prev = *r;
    }
    m.max(r1 - prev)
}

/// Polar grid around an excised disc of radius `eps` at `p` inside a disc.
fn punctured_disc(c: Point, radius: f64, p: Point, eps: f64, nt: usize, nr: usize) -> QuadratureGrid {
    let d = p - c;
    let dt = 2.0 * PI / nt as f64;
    let (xs, ws) = legendre_on(nr, 0.0, 1.0);
    let mut nodes = Vec::with_capacity(nt * nr);
    let mut weights = Vec::with_capacity(nt * nr);
    let mut scale: f64 = 0.0;
    for j in 0..nt {
        let e = Point::from_polar(1.0, dt * j as f64);
        let b = (d.conj() * e).re;
        let rmax = -b + (b * b + radius * radius - d.norm_sqr()).sqrt();
        let len = rmax - eps;
        for (x, w) in xs.iter().zip(&ws) {
            let rho = eps + len * x;
            nodes.push(p + e * rho);
            weights.push(w * len * rho * dt);
        }
        scale = scale.max(rmax * dt).max(len * 0.5 / nr as f64 * PI);
    }
    QuadratureGrid { nodes, weights, cell_scale: scale, seed: 0 }
}

/// Minimum of `G(r e^{i theta}, pole)` over the ray, as `(r, G)`.
fn ray_min(q: f64, pole: Point, th: f64) -> (f64, f64) {
    let e = Point::from_polar(1.0, th);
    brent_min(|r| annulus_green(q, e * r, pole).unwrap_or(-1e300), q, 1.0, 1e-13)
}

/// Ends of `{ r : G(r e^{i theta}) < level }` on a ray, if non-empty.
fn ray_interval(q: f64, pole: Point, level: f64, th: f64) -> Option<(f64, f64)> {
    let (rm, gm) = ray_min(q, pole, th);
    if gm >= level {
        return None;
    }
    let e = Point::from_polar(1.0, th);
    let f = |r: f64| annulus_green(q, e * r, pole).unwrap_or(-1e300) - level;
    let lo = brent_root(f, q, rm, 1e-15)?;
    let hi = brent_root(f, rm, 1.0, 1e-15)?;
    Some((lo, hi))
}

/// Angular half-width of a simply connected sublevel seen from the origin.
pub(crate) fn sublevel_half_width(q: f64, pole: Point, level: f64) -> f64 {
    let ta = pole.arg();
    brent_root(|d| ray_min(q, pole, ta + d).1 - level, 0.0, PI, 1e-14).unwrap_or(PI)
}

fn sublevel_grid(q: f64, pole: Point, level: f64, nt: usize, nr: usize) -> Result<QuadratureGrid> {
    let (_, s_crit) = annulus_critical(q, pole)?;
    let (xs, wx) = legendre_on(nr, 0.0, 1.0);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut scale: f64 = 0.0;
    let mut push_ray = |th: f64, wt: f64, nodes: &mut Vec<Point>, weights: &mut Vec<f64>| {
        if let Some((lo, hi)) = ray_interval(q, pole, level, th) {
            let e = Point::from_polar(1.0, th);
            let len = hi - lo;
            for (x, w) in xs.iter().zip(&wx) {
                let r = lo + len * x;
                nodes.push(e * r);
                weights.push(w * len * r * wt);
            }
            scale = scale.max(len * PI / (2.0 * nr as f64)).max(hi * wt);
        }
    };
    if level >= s_crit {
        let dt = 2.0 * PI / nt as f64;
        for j in 0..nt {
            push_ray(dt * j as f64, dt, &mut nodes, &mut weights);
        }
    } else {
        let ta = pole.arg();
        let half = sublevel_half_width(q, pole, level);
        let (us, wu) = legendre_on(nt, 0.0, 1.0);
        for (u, w) in us.iter().zip(&wu) {
            let th = ta - half * (PI * u).cos();
            let jac = half * PI * (PI * u).sin();
            push_ray(th, w * jac, &mut nodes, &mut weights);
        }
    }
    Ok(QuadratureGrid { nodes, weights, cell_scale: scale, seed: 0 })
}

/// Connectivity as decided by the critical value; exposed for diagnostics.
pub fn grid_connectivity(domain: &DomainSpec) -> Result<Connectivity> {
    geometry::connectivity(domain)
}
