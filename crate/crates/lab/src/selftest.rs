//! Deterministic invariant suite behind `suita-lab selftest`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use suita_core::bergman;
use suita_core::{extension, green, mapping, quadrature, suita, variation, Complex64, DomainSpec, Result};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `true` when the check requires `value <= threshold`, otherwise `value >= threshold`.
    pub upper: bool,
    pub error: Option<String>,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.error.is_none() && if self.upper { self.value <= self.threshold } else { self.value >= self.threshold }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "pass": self.pass(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "value": c.value,
                "threshold": c.threshold,
                "bound": if c.upper { "max" } else { "min" },
                "error": c.error,
                "pass": c.pass(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn below(name: &str, r: Result<f64>, threshold: f64) -> Check {
    mk(name, r, threshold, true)
}

fn above(name: &str, r: Result<f64>, threshold: f64) -> Check {
    mk(name, r, threshold, false)
}

fn mk(name: &str, r: Result<f64>, threshold: f64, upper: bool) -> Check {
    match r {
        Ok(v) => Check { name: name.into(), value: v, threshold, upper, error: None },
        Err(e) => Check { name: name.into(), value: f64::NAN, threshold, upper, error: Some(e.tag().into()) },
    }
}

fn green_max(d: &DomainSpec, z0: Complex64) -> f64 {
    let r = green::validate_green(d, z0, 0.0);
    r.boundary_residual.max(r.harmonicity_residual).max(r.symmetry_residual)
}

fn disc_point(rng: &mut ChaCha8Rng, rmax: f64) -> Complex64 {
    let r = rmax * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, 2.0 * PI * rng.random::<f64>())
}

fn annulus_point(rng: &mut ChaCha8Rng, q: f64) -> Complex64 {
    let r = q + (1.0 - q) * (0.1 + 0.8 * rng.random::<f64>());
    Complex64::from_polar(r, 2.0 * PI * rng.random::<f64>())
}

/// Runs every check; the same seed gives the same report.
pub fn run_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let disc = DomainSpec::UnitDisc;
    let ann = |q| DomainSpec::Annulus { q };
    let mut checks = Vec::new();

    // Disc: ratio is identically one.
    let pts: Vec<_> = (0..8).map(|_| disc_point(&mut rng, 0.9)).collect();
    checks.push(below(
        "disc_ratio_is_one",
        pts.iter().try_fold(0.0f64, |m, z| Ok(m.max((suita::suita_ratio(&disc, *z)?.ratio - 1.0).abs()))),
        1e-12,
    ));
    let off = DomainSpec::Disc { center: Complex64::new(0.4, -1.0), radius: 2.5 };
    checks.push(below(
        "shifted_disc_ratio_is_one",
        pts.iter().try_fold(0.0f64, |m, z| {
            Ok(m.max((suita::suita_ratio(&off, Complex64::new(0.4, -1.0) + z * 2.5)?.ratio - 1.0).abs()))
        }),
        1e-12,
    ));

    // Annulus: strict inequality where it is resolvable.
    let apts: Vec<_> = (0..6).map(|_| annulus_point(&mut rng, 0.1)).collect();
    checks.push(above(
        "annulus_ratio_exceeds_one",
        apts.iter().try_fold(f64::INFINITY, |m, z| Ok(m.min(suita::suita_ratio(&ann(0.1), *z)?.ratio - 1.0))),
        1e-9,
    ));

    checks.push(below("disc_curvature_residual", suita::curvature_residual(&disc, Complex64::new(0.3, 0.2), 1e-3), 1e-6));
    checks.push(below(
        "annulus_curvature_residual",
        suita::curvature_residual(&ann(0.1), Complex64::new(0.0, 0.316), 1e-3),
        1e-4,
    ));

    // Green function validity.
    checks.push(below("disc_green_valid", Ok(green_max(&disc, Complex64::new(0.4, 0.1))), 1e-8));
    checks.push(below("annulus_green_valid", Ok(green_max(&ann(0.3), Complex64::new(0.0, 0.55))), 1e-6));

    // Series against Gram route.
    checks.push(below(
        "annulus_series_vs_gram",
        (|| {
            let d = ann(0.3);
            let z = Complex64::new(0.5, 0.2);
            let a = bergman::kernel_diag(&d, z)?.value.re;
            let g = quadrature::build_quadrature(&d, 256, 0)?;
            let b = bergman::numeric_basis(&d, 24, 24, &g)?;
            let n = bergman::kernel_numeric(&b, z, z)?.value.re;
            Ok((a - n).abs() / a)
        })(),
        1e-8,
    ));

    checks.push(below(
        "disc_reproducing",
        (|| {
            let g = quadrature::build_quadrature(&disc, 256, 0)?;
            bergman::reproducing_residual(&disc, Complex64::new(0.5, 0.0), &g)
        })(),
        1e-8,
    ));

    checks.push(above(
        "volume_bound",
        (|| {
            let d = ann(0.3);
            let g = quadrature::build_quadrature(&d, 128, 0)?;
            Ok(suita::volume_bound_check(&d, Complex64::new(0.6, 0.0), &g, 1e-6)?.product)
        })(),
        1.0,
    ));

    // Extremal property: admissible perturbations never lower the norm.
    checks.push(above(
        "extension_extremal",
        (|| {
            let d = ann(0.3);
            let g = quadrature::build_quadrature(&d, 128, 0)?;
            let b = bergman::numeric_basis(&d, 10, 10, &g)?;
            let z = Complex64::new(0.6, 0.0);
            let sol = extension::minimal_extension_numeric(&b, &g, z, 1.0)?;
            let dirs: Vec<Vec<Complex64>> = (0..16)
                .map(|_| (0..b.len()).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect())
                .collect();
            let gains = extension::perturbation_gains(&b, &sol, z, &dirs, 1e-3)?;
            Ok(gains.into_iter().fold(f64::INFINITY, f64::min))
        })(),
        0.0,
    ));
    checks.push(below(
        "extension_bound",
        (|| {
            let r = extension::extension_bound_check(&ann(0.1), Complex64::new(0.316, 0.0), 1e-8)?;
            Ok(r.norm - r.bound)
        })(),
        1e-8,
    ));

    // Sublevel variation on the disc.
    let z0 = disc_point(&mut rng, 0.7);
    let levels = {
        let mut v = variation::geometric_levels(0.05, 3.0, 12).unwrap_or_default();
        v.push(0.0);
        v
    };
    let trace = variation::variation_trace(&disc, z0, &levels);
    checks.push(below(
        "disc_trace_harmonic",
        trace.as_ref().map_err(Clone::clone).and_then(variation::harmonicity_residual),
        1e-3,
    ));
    checks.push(above(
        "disc_trace_convex",
        trace.as_ref().map_err(Clone::clone).and_then(|t| Ok(variation::convexity_report(t, 1e-3)?.min_second_diff)),
        -1e-3,
    ));
    checks.push(below(
        "annulus_trace_monotone",
        (|| {
            let t = variation::variation_trace(&ann(0.1), Complex64::new(0.316, 0.0), &levels)?;
            Ok(variation::monotone_report(&t, 1e-3)?.max_decrease)
        })(),
        1e-3,
    ));
    checks.push(below(
        "key_lemma",
        variation::key_lemma_residual(&disc, z0, z0 * 0.9, -0.3),
        1e-8,
    ));
    checks.push(below(
        "capacity_scaling",
        variation::capacity_scaling_check(&ann(0.1), Complex64::new(0.316, 0.0), -0.5),
        1e-6,
    ));

    // Riemann map.
    checks.push(below(
        "disc_map_modulus",
        (|| {
            let sub = variation::sublevel_domain(&disc, z0, -0.8)?;
            let (c, r) = suita_core::geometry::as_disc(&sub)?.ok_or(suita_core::Error::NotSimplyConnected)?;
            let pts: Vec<_> = (0..6).map(|k| c + Complex64::from_polar(0.7 * r, k as f64)).collect();
            let map = mapping::riemann_map_from_kernel(&disc, z0, -0.8, &pts)?;
            Ok(mapping::map_validation(&map, &disc, z0, -0.8)?.modulus_residual)
        })(),
        1e-8,
    ));

    SuiteReport { seed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_direction() {
        assert!(below("a", Ok(1.0), 2.0).pass());
        assert!(!below("a", Ok(3.0), 2.0).pass());
        assert!(above("a", Ok(3.0), 2.0).pass());
        assert!(!above("a", Err(suita_core::Error::GramSingular), 0.0).pass());
        assert!(!below("a", Ok(f64::NAN), 1.0).pass());
    }

    #[test]
    fn draws_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert!(disc_point(&mut rng, 0.9).norm() < 0.9);
            let z = annulus_point(&mut rng, 0.2);
            assert!(z.norm() > 0.2 && z.norm() < 1.0);
        }
    }
}
