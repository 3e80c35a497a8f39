//! Planar domains and membership.
//!
//! Points are plane coordinates `z`; a holomorphic 1-form `f dz` is stored
//! as the function `f`, and the diagonal kernel `K(z)|dz|^2` as `K(z)`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::green;
use crate::Point;

/// Description of a planar domain.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    UnitDisc,
    Disc { center: Point, radius: f64 },
    /// The region `q < |z| < 1`.
    Annulus { q: f64 },
    /// `{ z in base : G_base(z, pole) < level }` with `level < 0`.
    Sublevel { base: Box<DomainSpec>, pole: Point, level: f64 },
    /// `base` minus closed discs of radius `excision_radius` around the punctures.
    Punctured { base: Box<DomainSpec>, punctures: Vec<Point>, excision_radius: f64 },
}

/// Domain after normalisation: every supported spec reduces to one of three
/// shapes plus a list of excised points.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Shape {
    Disc { center: Point, radius: f64 },
    Annulus { q: f64 },
    /// Green sublevel `{ G_annulus(z, pole) < level }`.
    AnnulusSublevel { q: f64, pole: Point, level: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Resolved {
    pub shape: Shape,
    pub punctures: Vec<Point>,
    pub eps: f64,
}

/// Topology of a domain as seen by the kernel routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Simply,
    Doubly,
}

fn finite(z: Point) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl DomainSpec {
    pub fn disc(center: Point, radius: f64) -> Result<Self> {
        let d = DomainSpec::Disc { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn annulus(q: f64) -> Result<Self> {
        let d = DomainSpec::Annulus { q };
        d.validate()?;
        Ok(d)
    }

    /// Green sublevel `{G(., pole) < level}` of `base`.
    pub fn sublevel(base: DomainSpec, pole: Point, level: f64) -> Result<Self> {
        let d = DomainSpec::Sublevel { base: Box::new(base), pole, level };
        d.validate()?;
        Ok(d)
    }

    /// Checks the structural invariants recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::UnitDisc => Ok(()),
            DomainSpec::Disc { center, radius } => {
                if !finite(*center) || !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidDomain(format!("disc radius {radius} must be positive")));
                }
                Ok(())
            }
            DomainSpec::Annulus { q } => {
                if !(*q > 0.0 && *q < 1.0) {
                    return Err(Error::InvalidDomain(format!("annulus needs 0 < q < 1, got {q}")));
                }
                Ok(())
            }
            DomainSpec::Sublevel { base, pole, level } => {
                base.validate()?;
                if !level.is_finite() || *level >= 0.0 {
                    return Err(Error::InvalidLevel(*level));
                }
                if !finite(*pole) || !base.contains(*pole)? {
                    return Err(Error::InvalidDomain("sublevel pole outside base".into()));
                }
                resolve(self).map(|_| ())
            }
            DomainSpec::Punctured { base, punctures, excision_radius } => {
                base.validate()?;
                let eps = *excision_radius;
                if !(eps.is_finite() && eps >= 0.0) {
                    return Err(Error::InvalidPuncture(format!("excision radius {eps}")));
                }
                for (i, p) in punctures.iter().enumerate() {
                    if !finite(*p) || !base.contains(*p)? {
                        return Err(Error::InvalidPuncture(format!("puncture {i} outside base")));
                    }
                    for q in &punctures[..i] {
                        let d = (p - q).norm();
                        if d == 0.0 || eps >= 0.5 * d {
                            return Err(Error::InvalidPuncture("punctures too close".into()));
                        }
                    }
                    if let DomainSpec::Sublevel { pole, .. } = base.as_ref() {
                        if eps >= 0.5 * (p - pole).norm() {
                            return Err(Error::InvalidPuncture("puncture too close to pole".into()));
                        }
                    }
                    if eps > 0.0 {
                        // boundary distance must exceed 2 eps
                        for k in 0..32 {
                            let w = *p + Point::from_polar(2.0 * eps, 2.0 * PI * k as f64 / 32.0);
                            if !base.contains(w)? {
                                return Err(Error::InvalidPuncture(
                                    "excision radius too large for boundary distance".into(),
                                ));
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Membership test for the open domain.
    pub fn contains(&self, z: Point) -> Result<bool> {
        contains(self, z)
    }
}

/// Whether `z` is an interior point of `domain`.
pub fn contains(domain: &DomainSpec, z: Point) -> Result<bool> {
    if !finite(z) {
        return Ok(false);
    }
    match domain {
        DomainSpec::UnitDisc => Ok(z.norm() < 1.0),
        DomainSpec::Disc { center, radius } => Ok((z - center).norm() < *radius),
        DomainSpec::Annulus { q } => {
            let r = z.norm();
            Ok(r > *q && r < 1.0)
        }
        DomainSpec::Sublevel { base, pole, level } => {
            if !contains(base, z)? {
                return Ok(false);
            }
            if z == *pole {
                return Ok(true);
            }
            match green::green_value(base, z, *pole) {
                Ok(g) => Ok(g < *level),
                Err(Error::PoleCollision) => Ok(true),
                Err(e) => Err(Error::GreenEvalFailed(format!("{e}"))),
            }
        }
        DomainSpec::Punctured { base, punctures, excision_radius } => {
            if punctures.iter().any(|p| (z - p).norm() <= *excision_radius) {
                return Ok(false);
            }
            contains(base, z)
        }
    }
}

/// Wraps `domain` with excised points.
pub fn puncture(domain: &DomainSpec, points: &[Point], eps: f64) -> Result<DomainSpec> {
    let d = DomainSpec::Punctured {
        base: Box::new(domain.clone()),
        punctures: points.to_vec(),
        excision_radius: eps,
    };
    d.validate()?;
    Ok(d)
}

/// Centre and radius of the Green sublevel `{G(., pole) < level}` of a disc.
pub(crate) fn disc_sublevel(center: Point, radius: f64, pole: Point, level: f64) -> (Point, f64) {
    let w0 = (pole - center) / radius;
    let rho2 = (2.0 * level).exp();
    let a2 = w0.norm_sqr();
    let den = 1.0 - rho2 * a2;
    let cw = w0 * ((1.0 - rho2) / den);
    let rw = level.exp() * (1.0 - a2) / den;
    (center + cw * radius, radius * rw)
}

impl Shape {
    pub(crate) fn contains(&self, z: Point) -> bool {
        match *self {
            Shape::Disc { center, radius } => (z - center).norm() < radius,
            Shape::Annulus { q } => {
                let r = z.norm();
                r > q && r < 1.0
            }
            Shape::AnnulusSublevel { q, pole, level } => {
                let r = z.norm();
                if !(r > q && r < 1.0) {
                    return false;
                }
                if z == pole {
                    return true;
                }
                match green::annulus_green(q, z, pole) {
                    Ok(g) => g < level,
                    Err(Error::PoleCollision) => true,
                    Err(_) => false,
                }
            }
        }
    }

    pub(crate) fn area(&self) -> Option<f64> {
        match *self {
            Shape::Disc { radius, .. } => Some(PI * radius * radius),
            Shape::Annulus { q } => Some(PI * (1.0 - q * q)),
            Shape::AnnulusSublevel { .. } => None,
        }
    }
}

impl Resolved {
    pub(crate) fn contains(&self, z: Point) -> bool {
        if self.punctures.iter().any(|p| (z - p).norm() <= self.eps) {
            return false;
        }
        self.shape.contains(z)
    }

    /// Excised discs actually carved out (zero radius removes nothing measurable).
    pub(crate) fn excised(&self) -> &[Point] {
        if self.eps > 0.0 {
            &self.punctures
        } else {
            &[]
        }
    }
}

/// Reduces a spec to a shape plus punctures. Disc sublevels become discs,
/// nested sublevels with a common pole add their levels, and punctures are
/// pushed outside sublevels (kept when their excised disc lies inside, dropped
/// when it lies outside).
pub(crate) fn resolve(domain: &DomainSpec) -> Result<Resolved> {
    match domain {
        DomainSpec::UnitDisc => Ok(Resolved {
            shape: Shape::Disc { center: Point::new(0.0, 0.0), radius: 1.0 },
            punctures: Vec::new(),
            eps: 0.0,
        }),
        DomainSpec::Disc { center, radius } => Ok(Resolved {
            shape: Shape::Disc { center: *center, radius: *radius },
            punctures: Vec::new(),
            eps: 0.0,
        }),
        DomainSpec::Annulus { q } => Ok(Resolved {
            shape: Shape::Annulus { q: *q },
            punctures: Vec::new(),
            eps: 0.0,
        }),
        DomainSpec::Punctured { base, punctures, excision_radius } => {
            let mut r = resolve(base)?;
            if !r.punctures.is_empty() && r.eps != *excision_radius && !punctures.is_empty() {
                return Err(Error::Unsupported("nested punctures with different radii".into()));
            }
            if !punctures.is_empty() {
                r.eps = *excision_radius;
            }
            r.punctures.extend_from_slice(punctures);
            Ok(r)
        }
        DomainSpec::Sublevel { base, pole, level } => {
            let b = resolve(base)?;
            let shape = match b.shape {
                Shape::Disc { center, radius } => {
                    let (c, r) = disc_sublevel(center, radius, *pole, *level);
                    Shape::Disc { center: c, radius: r }
                }
                Shape::Annulus { q } => Shape::AnnulusSublevel { q, pole: *pole, level: *level },
                Shape::AnnulusSublevel { q, pole: p, level: s } => {
                    if p != *pole {
                        return Err(Error::Unsupported(
                            "sublevel of an annulus sublevel with a different pole".into(),
                        ));
                    }
                    Shape::AnnulusSublevel { q, pole: p, level: s + level }
                }
            };
            let mut kept = Vec::new();
            for p in &b.punctures {
                let inside = shape.contains(*p);
                if b.eps == 0.0 {
                    if inside {
                        kept.push(*p);
                    }
                    continue;
                }
                let n_in = (0..32)
                    .filter(|k| {
                        let w = *p + Point::from_polar(b.eps, 2.0 * PI * *k as f64 / 32.0);
                        shape.contains(w)
                    })
                    .count();
                match (inside, n_in) {
                    (true, 32) => kept.push(*p),
                    (false, 0) => {}
                    _ => {
                        return Err(Error::InvalidPuncture(
                            "excised disc straddles the sublevel boundary".into(),
                        ))
                    }
                }
            }
            Ok(Resolved { shape, punctures: kept, eps: b.eps })
        }
    }
}

/// Connectivity of the domain ignoring punctures.
pub fn connectivity(domain: &DomainSpec) -> Result<Connectivity> {
    let r = resolve(domain)?;
    Ok(match r.shape {
        Shape::Disc { .. } => Connectivity::Simply,
        Shape::Annulus { .. } => Connectivity::Doubly,
        Shape::AnnulusSublevel { q, pole, level } => {
            let (_, s_crit) = green::annulus_critical(q, pole)?;
            // ties resolve to the doubly connected (superset) basis
            if level >= s_crit {
                Connectivity::Doubly
            } else {
                Connectivity::Simply
            }
        }
    })
}

/// Disc centre and radius when the domain (ignoring punctures) is a disc.
pub fn as_disc(domain: &DomainSpec) -> Result<Option<(Point, f64)>> {
    Ok(match resolve(domain)?.shape {
        Shape::Disc { center, radius } => Some((center, radius)),
        _ => None,
    })
}

/// Area of the domain: exact for discs, annuli and their punctured versions,
/// quadrature at resolution 512 for annulus sublevels.
pub fn area(domain: &DomainSpec) -> Result<f64> {
    let r = resolve(domain)?;
    let base = match r.shape.area() {
        Some(a) => a,
        None => {
            let plain = Resolved { shape: r.shape.clone(), punctures: Vec::new(), eps: 0.0 };
            crate::quadrature::build_resolved(&plain, 512, 0)?.weights.iter().sum()
        }
    };
    Ok(base - r.excised().len() as f64 * PI * r.eps * r.eps)
}

/// Distance from `z` to the boundary of a disc or annulus shape (punctures included).
pub(crate) fn boundary_distance(r: &Resolved, z: Point) -> Option<f64> {
    let d = match r.shape {
        Shape::Disc { center, radius } => radius - (z - center).norm(),
        Shape::Annulus { q } => {
            let m = z.norm();
            (1.0 - m).min(m - q)
        }
        Shape::AnnulusSublevel { .. } => return None,
    };
    let dp = r
        .excised()
        .iter()
        .map(|p| (z - p).norm() - r.eps)
        .fold(f64::INFINITY, f64::min);
    Some(d.min(dp))
}
