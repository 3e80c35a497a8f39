//! Bergman kernels: closed form on discs, Laurent series on annuli and
//! Gram-matrix projections on everything else.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{self, Connectivity, DomainSpec, Resolved, Shape};
use crate::quadrature::{self, QuadratureGrid};
use crate::Point;

/// Relative eigenvalue threshold of the regularised Gram solve.
pub const SPECTRUM_CUTOFF: f64 = 1e-10;
/// Largest admissible condition number after the cutoff.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    ClosedForm,
    LaurentSeries,
    GramNumeric,
}

impl KernelMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            KernelMethod::ClosedForm => "closed_form",
            KernelMethod::LaurentSeries => "laurent_series",
            KernelMethod::GramNumeric => "gram_numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimate {
    pub value: Point,
    pub method: KernelMethod,
    pub error_estimate: f64,
    pub condition: f64,
}

/// Knobs of the numeric route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    pub resolution: usize,
    pub max_pos: usize,
    pub max_neg: usize,
    /// Relative degree-increment error above which degrees are doubled once.
    pub tol: f64,
    pub seed: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { resolution: quadrature::DEFAULT_RESOLUTION, max_pos: 16, max_neg: 16, tol: 1e-8, seed: 0 }
    }
}

/// Monomial family with its Gram matrix and spectral data.
///
/// Functions are `(z - a)^n`, `0 <= n <= max_pos_degree`, followed by
/// `(z - b)^{-n}`, `1 <= n <= max_neg_degree`.
#[derive(Debug, Clone)]
pub struct BergmanBasis {
    pub center: Point,
    pub hole_point: Option<Point>,
    pub max_pos_degree: usize,
    pub max_neg_degree: usize,
    /// `gram[(j, k)] = <phi_j, phi_k> = sum_i w_i phi_j(z_i) conj(phi_k(z_i))`.
    pub gram: DMatrix<Point>,
    pub spectrum_cutoff: f64,
    /// Largest relative deviation from Hermitian symmetry before symmetrisation.
    pub hermitian_defect: f64,
    pub condition: f64,
    pub effective_dim: usize,
    spectral: Spectral,
}

#[derive(Debug, Clone)]
struct Spectral {
    /// Jacobi scaling `1 / sqrt(G_jj)`.
    scale: Vec<f64>,
    /// Retained eigenpairs of the scaled Gram matrix.
    values: Vec<f64>,
    vectors: DMatrix<Point>,
    /// Basis indices the decomposition refers to.
    index: Vec<usize>,
    condition: f64,
}

fn spectral(gram: &DMatrix<Point>, index: &[usize], cutoff: f64) -> Result<Spectral> {
    let m = index.len();
    let scale: Vec<f64> = index
        .iter()
        .map(|&j| {
            let d = gram[(j, j)].re;
            if d > 0.0 && d.is_finite() { 1.0 / d.sqrt() } else { 0.0 }
        })
        .collect();
    let s = DMatrix::from_fn(m, m, |i, k| gram[(index[i], index[k])] * (scale[i] * scale[k]));
    let eig = s.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if !(lmax > 0.0) {
        return Err(Error::GramSingular);
    }
    let keep: Vec<usize> = (0..m).filter(|&i| eig.eigenvalues[i] > cutoff * lmax).collect();
    if keep.is_empty() {
        return Err(Error::GramSingular);
    }
    let values: Vec<f64> = keep.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m, keep.len(), |j, c| eig.eigenvectors[(j, keep[c])]);
    let lmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(Spectral { scale, values, vectors, index: index.to_vec(), condition: lmax / lmin })
}

impl Spectral {
    /// Values `psi_i(z)` of the orthonormalised family at `z`, given the full
    /// basis evaluation vector.
    fn orthonormal(&self, v: &[Point]) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.values.len());
        for (c, lam) in self.values.iter().enumerate() {
            let mut acc = Point::new(0.0, 0.0);
            for (j, &idx) in self.index.iter().enumerate() {
                acc += v[idx] * self.scale[j] * self.vectors[(j, c)].conj();
            }
            out.push(acc / lam.sqrt());
        }
        out
    }

    fn kernel(&self, vt: &[Point], vz: &[Point]) -> Point {
        let a = self.orthonormal(vt);
        let b = self.orthonormal(vz);
        a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum()
    }
}

impl BergmanBasis {
    pub fn len(&self) -> usize {
        self.max_pos_degree + 1 + self.max_neg_degree
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Basis evaluation vector at `z`.
    pub fn eval(&self, z: Point) -> Vec<Point> {
        eval_monomials(self.center, self.hole_point, self.max_pos_degree, self.max_neg_degree, z)
    }

    /// Orthonormalised functions at `z` (one per retained eigenvalue).
    pub fn orthonormal_at(&self, z: Point) -> Vec<Point> {
        self.spectral.orthonormal(&self.eval(z))
    }

    /// Coefficients over the raw basis of each orthonormal function, column `i`
    /// holding `psi_i`.
    pub fn orthonormal_coefficients(&self) -> DMatrix<Point> {
        let sp = &self.spectral;
        let n = self.len();
        let mut c = DMatrix::from_element(n, sp.values.len(), Point::new(0.0, 0.0));
        for (col, lam) in sp.values.iter().enumerate() {
            for (j, &idx) in sp.index.iter().enumerate() {
                c[(idx, col)] = sp.vectors[(j, col)].conj() * (sp.scale[j] / lam.sqrt());
            }
        }
        c
    }

    fn reduced(&self) -> Result<Spectral> {
        let dp = self.max_pos_degree - self.max_pos_degree / 4;
        let dn = self.max_neg_degree - self.max_neg_degree / 4;
        let mut index: Vec<usize> = (0..=dp).collect();
        index.extend((0..dn).map(|k| self.max_pos_degree + 1 + k));
        spectral(&self.gram, &index, self.spectrum_cutoff)
    }
}

fn eval_monomials(a: Point, b: Option<Point>, dp: usize, dn: usize, z: Point) -> Vec<Point> {
    let mut v = Vec::with_capacity(dp + 1 + dn);
    let mut p = Point::new(1.0, 0.0);
    let u = z - a;
    for _ in 0..=dp {
        v.push(p);
        p *= u;
    }
    if dn > 0 {
        let w = (z - b.unwrap_or_default()).inv();
        let mut p = w;
        for _ in 0..dn {
            v.push(p);
            p *= w;
        }
    }
    v
}

/// Expansion centre and hole point used by the numeric route.
pub(crate) fn basis_points(r: &Resolved) -> Result<(Point, Option<Point>)> {
    Ok(match r.shape {
        Shape::Disc { center, .. } => (center, None),
        Shape::Annulus { .. } => (Point::new(0.0, 0.0), Some(Point::new(0.0, 0.0))),
        Shape::AnnulusSublevel { q, pole, level } => {
            let (_, s_crit) = crate::green::annulus_critical(q, pole)?;
            let centre = if level >= s_crit { Point::new(0.0, 0.0) } else { pole };
            (centre, Some(Point::new(0.0, 0.0)))
        }
    })
}

/// Builds the Gram matrix of the monomial family on `grid`.
pub fn numeric_basis(domain: &DomainSpec, max_pos: usize, max_neg: usize, grid: &QuadratureGrid) -> Result<BergmanBasis> {
    let r = geometry::resolve(domain)?;
    let (a, b) = basis_points(&r)?;
    numeric_basis_at(a, b, max_pos, max_neg, grid)
}

/// As [`numeric_basis`] with an explicit centre and hole point.
pub fn numeric_basis_at(
    center: Point,
    hole_point: Option<Point>,
    max_pos: usize,
    max_neg: usize,
    grid: &QuadratureGrid,
) -> Result<BergmanBasis> {
    if max_neg > 0 && hole_point.is_none() {
        return Err(Error::InvalidBasis(format!("{max_neg} negative powers need a hole point")));
    }
    let m = max_pos + 1 + max_neg;
    let mut gram = DMatrix::from_element(m, m, Point::new(0.0, 0.0));
    // fixed block order keeps the summation deterministic
    const BLOCK: usize = 2048;
    let mut start = 0;
    while start < grid.len() {
        let end = (start + BLOCK).min(grid.len());
        let a = DMatrix::from_fn(end - start, m, |i, j| {
            let z = grid.nodes[start + i];
            let v = eval_monomials(center, hole_point, max_pos, max_neg, z);
            v[j] * grid.weights[start + i].sqrt()
        });
        gram += a.transpose() * a.map(|x| x.conj());
        start = end;
    }
    let mut defect: f64 = 0.0;
    for j in 0..m {
        for k in 0..m {
            let d = (gram[(j, k)] - gram[(k, j)].conj()).norm();
            let s = (gram[(j, j)].re * gram[(k, k)].re).sqrt();
            if s > 0.0 {
                defect = defect.max(d / s);
            }
        }
    }
    let gram = (&gram + gram.adjoint()) * Point::new(0.5, 0.0);
    let index: Vec<usize> = (0..m).collect();
    let sp = spectral(&gram, &index, SPECTRUM_CUTOFF)?;
    if sp.condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition: sp.condition });
    }
    Ok(BergmanBasis {
        center,
        hole_point,
        max_pos_degree: max_pos,
        max_neg_degree: max_neg,
        gram,
        spectrum_cutoff: SPECTRUM_CUTOFF,
        hermitian_defect: defect,
        condition: sp.condition,
        effective_dim: sp.values.len(),
        spectral: sp,
    })
}

/// Projection kernel `K_n(t, z0)` of the span of the basis.
pub fn kernel_numeric(basis: &BergmanBasis, t: Point, z0: Point) -> Result<KernelEstimate> {
    let vt = basis.eval(t);
    let vz = basis.eval(z0);
    let value = basis.spectral.kernel(&vt, &vz);
    let err = match basis.reduced() {
        Ok(sp) => (value - sp.kernel(&vt, &vz)).norm(),
        Err(_) => value.norm(),
    };
    Ok(KernelEstimate { value, method: KernelMethod::GramNumeric, error_estimate: err, condition: basis.condition })
}

/// Disc kernel `R^2 / (pi (R^2 - (t - c) conj(z - c))^2)`.
pub(crate) fn disc_kernel(center: Point, radius: f64, t: Point, z: Point) -> Point {
    let r2 = radius * radius;
    let d = Point::new(r2, 0.0) - (t - center) * (z - center).conj();
    Point::new(r2 / PI, 0.0) / (d * d)
}

/// Bilateral Laurent series of the annulus kernel; returns `(value, tail bound)`.
pub(crate) fn annulus_kernel(q: f64, t: Point, z: Point) -> Result<(Point, f64)> {
    let w = t * z.conj();
    let q2 = q * q;
    let mut sum = Point::new(2.0 * PI * (1.0 / q).ln(), 0.0).inv() * w.inv();
    let mut tail = 0.0;
    // n >= 0
    let mut p = Point::new(1.0, 0.0);
    let mut qp = q2;
    let mut done = false;
    for n in 0..200_000usize {
        let term = p * ((n as f64 + 1.0) / (PI * (1.0 - qp)));
        sum += term;
        let tn = term.norm();
        if tn < 1e-18 * sum.norm() && n > 2 {
            tail = tn;
            done = true;
            break;
        }
        p *= w;
        qp *= q2;
    }
    if !done {
        return Err(Error::SeriesDiverged);
    }
    // n = -m, m >= 2
    let u = w.inv() * q2;
    let mut p = u * u;
    let mut qm = q2;
    done = false;
    for m in 2..200_000usize {
        let term = p * ((m as f64 - 1.0) / (PI * q2 * (1.0 - qm)));
        sum += term;
        let tn = term.norm();
        if tn < 1e-18 * sum.norm() && m > 3 {
            tail += tn;
            done = true;
            break;
        }
        p *= u;
        qm *= q2;
    }
    if !done {
        return Err(Error::SeriesDiverged);
    }
    Ok((sum, tail))
}

/// A kernel evaluator bound to one domain.
#[derive(Debug, Clone)]
pub enum KernelRoute {
    Disc { center: Point, radius: f64 },
    Annulus { q: f64 },
    Numeric { basis: Box<BergmanBasis> },
}

impl KernelRoute {
    pub fn method(&self) -> KernelMethod {
        match self {
            KernelRoute::Disc { .. } => KernelMethod::ClosedForm,
            KernelRoute::Annulus { .. } => KernelMethod::LaurentSeries,
            KernelRoute::Numeric { .. } => KernelMethod::GramNumeric,
        }
    }

    pub fn eval(&self, t: Point, z: Point) -> Result<KernelEstimate> {
        match self {
            KernelRoute::Disc { center, radius } => Ok(KernelEstimate {
                value: disc_kernel(*center, *radius, t, z),
                method: KernelMethod::ClosedForm,
                error_estimate: 0.0,
                condition: 1.0,
            }),
            KernelRoute::Annulus { q } => {
                let (value, tail) = annulus_kernel(*q, t, z)?;
                Ok(KernelEstimate { value, method: KernelMethod::LaurentSeries, error_estimate: tail, condition: 1.0 })
            }
            KernelRoute::Numeric { basis } => kernel_numeric(basis, t, z),
        }
    }

    /// Kernel value only (the numeric route skips the error estimate).
    pub fn value(&self, t: Point, z: Point) -> Result<Point> {
        match self {
            KernelRoute::Numeric { basis } => Ok(basis.spectral.kernel(&basis.eval(t), &basis.eval(z))),
            _ => self.eval(t, z).map(|k| k.value),
        }
    }

    /// `t -> K(t, z0)` with per-`z0` work hoisted.
    pub fn section(&self, z0: Point) -> Result<Section<'_>> {
        let coeffs = match self {
            KernelRoute::Numeric { basis } => {
                let c = basis.orthonormal_coefficients();
                let psi = basis.orthonormal_at(z0);
                let beta: Vec<Point> =
                    (0..c.nrows()).map(|j| (0..c.ncols()).map(|i| c[(j, i)] * psi[i].conj()).sum()).collect();
                Some(beta)
            }
            _ => None,
        };
        Ok(Section { route: self, z0, coeffs })
    }
}

/// Kernel section `t -> K(t, z0)`.
pub struct Section<'a> {
    route: &'a KernelRoute,
    z0: Point,
    coeffs: Option<Vec<Point>>,
}

impl Section<'_> {
    pub fn eval(&self, t: Point) -> Result<Point> {
        match (&self.coeffs, self.route) {
            (Some(beta), KernelRoute::Numeric { basis }) => {
                Ok(basis.eval(t).iter().zip(beta).map(|(v, b)| v * b).sum())
            }
            _ => self.route.value(t, self.z0),
        }
    }
}

/// Builds the kernel route of `domain`. The numeric route picks degrees by
/// the degree-increment estimate at `z0` (doubling once if needed).
pub fn kernel_route(domain: &DomainSpec, z0: Point, cfg: &NumericConfig) -> Result<KernelRoute> {
    let r = geometry::resolve(domain)?;
    if !r.contains(z0) {
        return Err(Error::NotInDomain);
    }
    match (&r.shape, r.excised().is_empty()) {
        (Shape::Disc { center, radius }, true) => Ok(KernelRoute::Disc { center: *center, radius: *radius }),
        (Shape::Annulus { q }, true) => Ok(KernelRoute::Annulus { q: *q }),
        _ => numeric_route(&r, z0, cfg),
    }
}

/// The Gram route regardless of closed forms.
pub fn numeric_route_for(domain: &DomainSpec, z0: Point, cfg: &NumericConfig) -> Result<KernelRoute> {
    let r = geometry::resolve(domain)?;
    if !r.contains(z0) {
        return Err(Error::NotInDomain);
    }
    numeric_route(&r, z0, cfg)
}

fn numeric_route(r: &Resolved, z0: Point, cfg: &NumericConfig) -> Result<KernelRoute> {
    let grid = quadrature::build_resolved(r, cfg.resolution, cfg.seed)?;
    let (a, b) = basis_points(r)?;
    let dn = if b.is_some() { cfg.max_neg } else { 0 };
    let basis = numeric_basis_at(a, b, cfg.max_pos, dn, &grid)?;
    let k = kernel_numeric(&basis, z0, z0)?;
    if k.error_estimate <= cfg.tol * k.value.norm() {
        return Ok(KernelRoute::Numeric { basis: Box::new(basis) });
    }
    let dn2 = if dn > 0 { 2 * dn } else { 0 };
    match numeric_basis_at(a, b, 2 * cfg.max_pos, dn2, &grid) {
        Ok(b2) => {
            let k2 = kernel_numeric(&b2, z0, z0)?;
            if k2.error_estimate < k.error_estimate {
                Ok(KernelRoute::Numeric { basis: Box::new(b2) })
            } else {
                Ok(KernelRoute::Numeric { basis: Box::new(basis) })
            }
        }
        Err(_) => Ok(KernelRoute::Numeric { basis: Box::new(basis) }),
    }
}

/// Diagonal kernel `K(z0)` by the domain's preferred route.
pub fn kernel_diag(domain: &DomainSpec, z0: Point) -> Result<KernelEstimate> {
    kernel_diag_with(domain, z0, &NumericConfig::default())
}

pub fn kernel_diag_with(domain: &DomainSpec, z0: Point, cfg: &NumericConfig) -> Result<KernelEstimate> {
    let route = kernel_route(domain, z0, cfg)?;
    let mut k = route.eval(z0, z0)?;
    k.value = Point::new(k.value.re, 0.0);
    Ok(k)
}

/// Off-diagonal kernel `K(t, z0)`.
pub fn kernel_offdiag(domain: &DomainSpec, t: Point, z0: Point) -> Result<KernelEstimate> {
    kernel_offdiag_with(domain, t, z0, &NumericConfig::default())
}

pub fn kernel_offdiag_with(domain: &DomainSpec, t: Point, z0: Point, cfg: &NumericConfig) -> Result<KernelEstimate> {
    if !domain.contains(t)? {
        return Err(Error::NotInDomain);
    }
    let route = kernel_route(domain, z0, cfg)?;
    route.eval(t, z0)
}

/// `| sum_i w_i |K(t_i, z0)|^2 - K(z0) | / K(z0)` on `grid`.
pub fn reproducing_residual(domain: &DomainSpec, z0: Point, grid: &QuadratureGrid) -> Result<f64> {
    let route = kernel_route(domain, z0, &NumericConfig::default())?;
    let k0 = route.value(z0, z0)?.re;
    let sec = route.section(z0)?;
    let mut s = 0.0;
    for (t, w) in grid.nodes.iter().zip(&grid.weights) {
        s += w * sec.eval(*t)?.norm_sqr();
    }
    Ok((s - k0).abs() / k0)
}

/// Connectivity used when choosing the numeric basis.
pub fn basis_connectivity(domain: &DomainSpec) -> Result<Connectivity> {
    geometry::connectivity(domain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Point {
        Point::new(re, im)
    }

    #[test]
    fn disc_kernel_examples() {
        let k = kernel_diag(&DomainSpec::UnitDisc, c(0.0, 0.0)).unwrap();
        assert!((k.value.re - 1.0 / PI).abs() < 1e-15);
        let k = kernel_diag(&DomainSpec::UnitDisc, c(0.6, 0.0)).unwrap();
        assert!((k.value.re - 1.0 / (PI * 0.64 * 0.64)).abs() < 1e-14);
        let k = kernel_offdiag(&DomainSpec::UnitDisc, c(0.5, 0.0), c(0.3, 0.0)).unwrap();
        assert!((k.value.re - 1.0 / (PI * 0.85 * 0.85)).abs() < 1e-14);
        assert_eq!(kernel_diag(&DomainSpec::UnitDisc, c(1.0, 0.0)).unwrap_err().tag(), "not-in-domain");
    }

    #[test]
    fn laurent_symmetry() {
        let a = DomainSpec::Annulus { q: 0.25 };
        let k1 = kernel_offdiag(&a, c(0.6, 0.0), c(0.5, 0.0)).unwrap().value;
        let k2 = kernel_offdiag(&a, c(0.5, 0.0), c(0.6, 0.0)).unwrap().value;
        assert!((k1 - k2.conj()).norm() < 1e-10);
        let k1 = kernel_offdiag(&a, c(0.2, 0.6), c(-0.5, 0.1)).unwrap().value;
        let k2 = kernel_offdiag(&a, c(-0.5, 0.1), c(0.2, 0.6)).unwrap().value;
        assert!((k1 - k2.conj()).norm() < 1e-10 * k1.norm());
    }

    #[test]
    fn disc_gram_is_diagonal() {
        let g = quadrature::build_quadrature(&DomainSpec::UnitDisc, 256, 0).unwrap();
        let b = numeric_basis(&DomainSpec::UnitDisc, 12, 0, &g).unwrap();
        for j in 0..=12 {
            for k in 0..=12 {
                let e = if j == k { PI / (j as f64 + 1.0) } else { 0.0 };
                assert!((b.gram[(j, k)] - e).norm() < 1e-12, "{j} {k}");
            }
        }
        assert!(b.hermitian_defect < 1e-12);
        let k = kernel_numeric(&b, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((k.value.re * PI - 1.0).abs() < 1e-12);
    }

    #[test]
    fn annulus_gram_bilateral_norms() {
        let q: f64 = 0.5;
        let a = DomainSpec::Annulus { q };
        let g = quadrature::build_quadrature(&a, 256, 0).unwrap();
        let b = numeric_basis(&a, 8, 8, &g).unwrap();
        let norm = |n: i32| {
            if n == -1 {
                2.0 * PI * (1.0 / q).ln()
            } else {
                PI * (1.0 - q.powi(2 * n + 2)) / (n as f64 + 1.0)
            }
        };
        for j in 0..17usize {
            let n = if j <= 8 { j as i32 } else { -((j - 8) as i32) };
            assert!((b.gram[(j, j)].re / norm(n) - 1.0).abs() < 1e-10, "n={n}");
        }
        let b = numeric_basis(&a, 16, 16, &g).unwrap();
        let k = kernel_numeric(&b, c(0.7, 0.0), c(0.7, 0.0)).unwrap().value.re;
        let (ks, _) = annulus_kernel(q, c(0.7, 0.0), c(0.7, 0.0)).unwrap();
        assert!((k / ks.re - 1.0).abs() < 1e-3);
    }

    #[test]
    fn scaled_disc_sublevel() {
        let s = DomainSpec::sublevel(DomainSpec::UnitDisc, c(0.0, 0.0), -1.0).unwrap();
        let k = numeric_route_for(&s, c(0.0, 0.0), &NumericConfig::default()).unwrap();
        let v = k.eval(c(0.0, 0.0), c(0.0, 0.0)).unwrap().value.re;
        assert!((v * PI / 2f64.exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn negative_powers_need_hole() {
        let g = quadrature::build_quadrature(&DomainSpec::UnitDisc, 64, 0).unwrap();
        assert_eq!(numeric_basis(&DomainSpec::UnitDisc, 4, 2, &g).unwrap_err().tag(), "invalid-basis");
    }

    #[test]
    fn reproducing_on_disc() {
        let g = quadrature::build_quadrature(&DomainSpec::UnitDisc, 512, 0).unwrap();
        assert!(reproducing_residual(&DomainSpec::UnitDisc, c(0.5, 0.0), &g).unwrap() < 1e-3);
    }
}
