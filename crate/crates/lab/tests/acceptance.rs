//! Acceptance criteria, one test per criterion (or per subcase where the
//! criterion covers several domains). Each prints a PASS/FAIL line.

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use suita_core::bergman::{self, NumericConfig};
use suita_core::variation::{self, VariationTrace};
use suita_core::{extension, geometry, green, mapping, quadrature, suita, Complex64, DomainSpec};
use suita_lab::cli::parallel_trace;

// Tolerances, as stated by the criteria.
const C1_CLOSED_TOL: f64 = 1e-8;
const C1_NUMERIC_TOL: f64 = 1e-3;
const C1_RUNTIME_S: f64 = 10.0;
const C2_MARGIN: f64 = 1e-3;
const C2_AGREE_REL: f64 = 1e-3;
const C2_RUNTIME_S: f64 = 60.0;
const C3_DISC_TOL: f64 = 1e-4;
const C3_ANNULUS_TOL: f64 = 1e-2;
const C4_MIN_SECOND_DIFF: f64 = -1e-3;
const C5_DISC_TOL: f64 = 1e-6;
const C5_ANNULUS_MIN: f64 = 1e-2;
const C5_CLASSIFIER: f64 = 1e-4;
const C6_TOL: f64 = 1e-3;
const C7_SLOPE: f64 = -2.0;
const C7_TOL: f64 = 0.05;
const C8_KEY_TOL: f64 = 1e-6;
const C8_PDE_TOL: f64 = 1e-4;
const C8_PDE_H: f64 = 1e-3;
const C8_NEGATIVE_MIN: f64 = 1e-2;
const C9_CLOSED_TOL: f64 = 1e-8;
const C9_QP_TOL: f64 = 1e-3;
const C9_ANNULUS_GAP: f64 = 1e-3;
const C10_TOL: f64 = 1e-5;
const C10_COROLLARY_TOL: f64 = 1e-6;
const C10_SAMPLES: usize = 50;
const C11_RATIO_TOL: f64 = 1e-2;
const C11_VOLUME_TOL: f64 = 1e-3;
const C12_DISC_TOL: f64 = 1e-3;
const C12_ANNULUS_TOL: f64 = 1e-2;
const C13_RUNTIME_S: f64 = 300.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(id: &str, pass: bool, detail: String) {
    // written past the test harness capture so every line lands in the log
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "\n{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id}: {detail}");
}

const DISC_POINTS: [(f64, f64); 4] = [(0.0, 0.0), (0.3, 0.0), (0.6, 0.0), (0.3, 0.4)];
const ANNULUS_Q: [f64; 3] = [0.1, 0.25, 0.5];

/// `|z0| = sqrt(q)` and the radii `q^0.6`, `q^0.4`, mirror images under
/// the inversion `z -> q / conj(z)`.
fn annulus_points(q: f64) -> [Complex64; 3] {
    [c(q.sqrt(), 0.0), c(q.powf(0.6), 0.0), Complex64::from_polar(q.powf(0.4), 1.0)]
}

fn levels() -> Vec<f64> {
    variation::default_levels()
}

fn trace(base: &DomainSpec, z0: Complex64) -> VariationTrace {
    let t = parallel_trace(base, z0, &levels(), &NumericConfig::default()).unwrap();
    assert!(t.gaps.is_empty(), "gaps: {:?}", t.gaps);
    t
}

fn disc_trace() -> &'static VariationTrace {
    static T: OnceLock<VariationTrace> = OnceLock::new();
    T.get_or_init(|| trace(&DomainSpec::UnitDisc, c(0.3, 0.0)))
}

fn punctured() -> DomainSpec {
    geometry::puncture(&DomainSpec::UnitDisc, &[c(0.3, 0.0)], 1e-3).unwrap()
}

fn punctured_trace() -> &'static VariationTrace {
    static T: OnceLock<VariationTrace> = OnceLock::new();
    T.get_or_init(|| trace(&punctured(), c(0.6, 0.0)))
}

fn annulus_trace(q: f64) -> &'static VariationTrace {
    static T: [OnceLock<VariationTrace>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = ANNULUS_Q.iter().position(|x| *x == q).unwrap();
    T[i].get_or_init(|| trace(&DomainSpec::Annulus { q }, c(q.sqrt(), 0.0)))
}

// 1 -------------------------------------------------------------------------

#[test]
fn criterion_01_disc_equality_closed() {
    let mut worst = 0.0f64;
    for (x, y) in DISC_POINTS {
        let r = suita::suita_ratio(&DomainSpec::UnitDisc, c(x, y)).unwrap();
        worst = worst.max((r.ratio - 1.0).abs());
    }
    report("1 (closed form)", worst < C1_CLOSED_TOL, format!("max |ratio - 1| = {worst:.3e} < {C1_CLOSED_TOL:e}"));
}

#[test]
fn criterion_01_disc_equality_numeric() {
    let start = Instant::now();
    let cfg = NumericConfig { resolution: 512, max_pos: 16, max_neg: 16, ..NumericConfig::default() };
    let mut worst = 0.0f64;
    for (x, y) in DISC_POINTS {
        let r = suita::suita_ratio_numeric(&DomainSpec::UnitDisc, c(x, y), &cfg).unwrap();
        assert_eq!(r.method_k, bergman::KernelMethod::GramNumeric);
        worst = worst.max((r.ratio - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "1 (numeric route)",
        worst < C1_NUMERIC_TOL && secs < C1_RUNTIME_S,
        format!("max |ratio - 1| = {worst:.3e} < {C1_NUMERIC_TOL:e}, {secs:.2} s < {C1_RUNTIME_S} s"),
    );
}

// 2 -------------------------------------------------------------------------

fn criterion_2(q: f64) {
    let start = Instant::now();
    let d = DomainSpec::Annulus { q };
    let cfg = NumericConfig::default();
    let mut min_excess = f64::INFINITY;
    let mut worst_rel = 0.0f64;
    for z0 in annulus_points(q) {
        let r = suita::suita_ratio(&d, z0).unwrap();
        assert_eq!(r.method_k, bergman::KernelMethod::LaurentSeries);
        min_excess = min_excess.min(r.ratio - 1.0);
        let gram = bergman::numeric_route_for(&d, z0, &cfg).unwrap().value(z0, z0).unwrap().re;
        worst_rel = worst_rel.max((gram - r.k).abs() / r.k);
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        &format!("2 (annulus q = {q})"),
        min_excess > C2_MARGIN && worst_rel < C2_AGREE_REL && secs < C2_RUNTIME_S,
        format!(
            "min ratio - 1 = {min_excess:.3e} > {C2_MARGIN:e}, Laurent/Gram rel gap {worst_rel:.2e} < {C2_AGREE_REL:e}, {secs:.2} s"
        ),
    );
}

#[test]
fn criterion_02_strict_inequality_q010() {
    criterion_2(0.1);
}

#[test]
fn criterion_02_strict_inequality_q025() {
    criterion_2(0.25);
}

#[test]
fn criterion_02_strict_inequality_q050() {
    criterion_2(0.5);
}

// 3 -------------------------------------------------------------------------

#[test]
fn criterion_03_curvature_identity() {
    let h = 1e-3;
    let disc_pts = [c(0.0, 0.0), c(0.3, 0.0), c(0.6, 0.0), c(0.3, 0.4), c(-0.5, -0.5)];
    let disc = disc_pts
        .iter()
        .map(|z| suita::curvature_residual(&DomainSpec::UnitDisc, *z, h).unwrap())
        .fold(0.0, f64::max);
    let q = 0.1f64;
    let ann_pts = [
        c(q.sqrt(), 0.0),
        c(0.0, 0.2),
        Complex64::from_polar(0.5, 2.0),
        Complex64::from_polar(0.7, -1.0),
        Complex64::from_polar(0.9, 3.0),
    ];
    let ann = ann_pts
        .iter()
        .map(|z| suita::curvature_residual(&DomainSpec::Annulus { q }, *z, h).unwrap())
        .fold(0.0, f64::max);
    report(
        "3",
        disc < C3_DISC_TOL && ann < C3_ANNULUS_TOL,
        format!("disc max residual {disc:.3e} < {C3_DISC_TOL:e}, annulus q = 0.1 max residual {ann:.3e} < {C3_ANNULUS_TOL:e}"),
    );
}

// 4 -------------------------------------------------------------------------

fn criterion_4(label: &str, t: &VariationTrace) {
    let r = variation::convexity_report(t, -C4_MIN_SECOND_DIFF).unwrap();
    report(
        &format!("4 ({label})"),
        r.pass && r.min_second_diff >= C4_MIN_SECOND_DIFF,
        format!("min second difference {:.3e} >= {C4_MIN_SECOND_DIFF:e}", r.min_second_diff),
    );
}

#[test]
fn criterion_04_convexity_disc() {
    criterion_4("disc", disc_trace());
}

#[test]
fn criterion_04_convexity_annulus() {
    for q in ANNULUS_Q {
        criterion_4(&format!("annulus q = {q}"), annulus_trace(q));
    }
}

#[test]
fn criterion_04_convexity_punctured() {
    criterion_4("punctured disc", punctured_trace());
}

// 5 -------------------------------------------------------------------------

#[test]
fn criterion_05_disc_harmonic() {
    let r = variation::harmonicity_residual(disc_trace()).unwrap();
    assert!(disc_trace().samples.iter().all(|s| s.kernel_method == bergman::KernelMethod::ClosedForm));
    report("5 (disc trace)", r < C5_DISC_TOL, format!("harmonicity residual {r:.3e} < {C5_DISC_TOL:e}"));
}

fn criterion_5_annulus(q: f64) {
    let r = variation::harmonicity_residual(annulus_trace(q)).unwrap();
    report(&format!("5 (annulus q = {q})"), r > C5_ANNULUS_MIN, format!("harmonicity residual {r:.3e} > {C5_ANNULUS_MIN:e}"));
}

#[test]
fn criterion_05_annulus_q010() {
    criterion_5_annulus(0.1);
}

#[test]
fn criterion_05_annulus_q025() {
    criterion_5_annulus(0.25);
}

#[test]
fn criterion_05_annulus_q050() {
    criterion_5_annulus(0.5);
}

#[test]
fn criterion_05_classifier() {
    // labels of criteria 1-2: discs are equality cases, annuli are not
    let mut cases: Vec<(DomainSpec, Complex64, bool)> =
        DISC_POINTS.iter().map(|(x, y)| (DomainSpec::UnitDisc, c(*x, *y), true)).collect();
    for q in ANNULUS_Q {
        for z0 in annulus_points(q) {
            cases.push((DomainSpec::Annulus { q }, z0, false));
        }
    }
    let mut wrong = Vec::new();
    for (d, z0, equality) in &cases {
        let r = variation::harmonicity_residual(&trace(d, *z0)).unwrap();
        if (r < C5_CLASSIFIER) != *equality {
            wrong.push(format!("{d:?} at {z0}: residual {r:.2e}"));
        }
    }
    report(
        "5 (classifier)",
        wrong.is_empty(),
        format!("{} of {} labels reproduced by residual < {C5_CLASSIFIER:e}; misclassified: {wrong:?}", cases.len() - wrong.len(), cases.len()),
    );
}

// 6 -------------------------------------------------------------------------

fn criterion_6(label: &str, t: &VariationTrace, terminal: bool) {
    let r = variation::monotone_report(t, C6_TOL).unwrap();
    let gap = r.terminal_gap.unwrap_or(f64::NAN);
    let ok = r.max_decrease <= C6_TOL && (!terminal || gap.abs() <= C6_TOL);
    report(
        &format!("6 ({label})"),
        ok,
        format!(
            "max decrease {:.3e} <= {C6_TOL:e}, terminal gap {:.3e}{}",
            r.max_decrease,
            gap,
            if terminal { format!(" <= {C6_TOL:e}") } else { String::new() }
        ),
    );
}

#[test]
fn criterion_06_monotone_disc() {
    criterion_6("disc", disc_trace(), true);
}

#[test]
fn criterion_06_monotone_annulus() {
    for q in ANNULUS_Q {
        criterion_6(&format!("annulus q = {q}"), annulus_trace(q), false);
    }
}

#[test]
fn criterion_06_monotone_punctured() {
    criterion_6("punctured disc", punctured_trace(), false);
}

// 7 -------------------------------------------------------------------------

#[test]
fn criterion_07_tail_slope() {
    let mut rows = vec![("disc".to_string(), disc_trace()), ("punctured disc".to_string(), punctured_trace())];
    for q in ANNULUS_Q {
        rows.push((format!("annulus q = {q}"), annulus_trace(q)));
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, t) in rows {
        let s = variation::tail_slope(t).unwrap();
        ok &= (s - C7_SLOPE).abs() <= C7_TOL;
        parts.push(format!("{name} {s:.6}"));
    }
    report("7", ok, format!("tail slopes within {C7_SLOPE} ± {C7_TOL}: {}", parts.join(", ")));
}

// 8 -------------------------------------------------------------------------

#[test]
fn criterion_08_key_lemma_disc() {
    let d = DomainSpec::UnitDisc;
    let z0 = c(0.3, 0.0);
    let (mut key, mut pde) = (0.0f64, 0.0f64);
    for s in [-1.0, -0.5, -0.2] {
        for t in [c(0.3, 0.0), c(0.35, 0.0), c(0.32, -0.02)] {
            key = key.max(variation::key_lemma_residual(&d, z0, t, s).unwrap());
            pde = pde.max(variation::pde_residual(&d, z0, t, s, C8_PDE_H).unwrap());
        }
    }
    report(
        "8 (disc 3x3 grid)",
        key < C8_KEY_TOL && pde < C8_PDE_TOL,
        format!("key lemma residual {key:.3e} < {C8_KEY_TOL:e}, PDE residual {pde:.3e} < {C8_PDE_TOL:e}"),
    );
}

#[test]
fn criterion_08_negative_control_annulus() {
    let r = variation::key_lemma_residual(&DomainSpec::Annulus { q: 0.25 }, c(0.5, 0.0), c(0.55, 0.0), -0.2).unwrap();
    report("8 (annulus negative control)", r > C8_NEGATIVE_MIN, format!("key lemma residual {r:.3e} > {C8_NEGATIVE_MIN:e}"));
}

// 9 -------------------------------------------------------------------------

#[test]
fn criterion_09_disc_norm() {
    let d = DomainSpec::UnitDisc;
    let sqrt_pi = PI.sqrt();
    let g = quadrature::build_quadrature(&d, 256, 0).unwrap();
    let basis = bergman::numeric_basis(&d, 16, 0, &g).unwrap();
    let (mut closed, mut qp) = (0.0f64, 0.0f64);
    for (x, y) in DISC_POINTS {
        let z0 = c(x, y);
        closed = closed.max((extension::minimal_extension_closed(&d, z0).unwrap().norm - sqrt_pi).abs());
        let cz = green::log_capacity(&d, z0).unwrap().value;
        let sol = extension::minimal_extension_numeric(&basis, &g, z0, cz).unwrap();
        qp = qp.max((sol.norm - sqrt_pi).abs());
    }
    report(
        "9 (disc norm)",
        closed < C9_CLOSED_TOL && qp < C9_QP_TOL,
        format!("|norm - sqrt(pi)| closed {closed:.3e} < {C9_CLOSED_TOL:e}, qp {qp:.3e} < {C9_QP_TOL:e}"),
    );
}

fn criterion_9_annulus(q: f64) {
    let d = DomainSpec::Annulus { q };
    let worst = annulus_points(q)
        .iter()
        .map(|z| extension::minimal_extension_closed(&d, *z).unwrap().norm)
        .fold(0.0, f64::max);
    let bound = PI.sqrt() - C9_ANNULUS_GAP;
    report(&format!("9 (annulus q = {q})"), worst < bound, format!("max norm {worst:.9} < sqrt(pi) - {C9_ANNULUS_GAP:e} = {bound:.9}"));
}

#[test]
fn criterion_09_annulus_q010() {
    criterion_9_annulus(0.1);
}

#[test]
fn criterion_09_annulus_q025() {
    criterion_9_annulus(0.25);
}

#[test]
fn criterion_09_annulus_q050() {
    criterion_9_annulus(0.5);
}

#[test]
fn criterion_09_equality_flags() {
    let mut wrong = Vec::new();
    for (x, y) in DISC_POINTS {
        let z0 = c(x, y);
        let r = extension::extension_bound_check(&DomainSpec::UnitDisc, z0, C9_CLOSED_TOL).unwrap();
        let ratio = suita::suita_ratio(&DomainSpec::UnitDisc, z0).unwrap().ratio;
        let label = (ratio - 1.0).abs() < C1_CLOSED_TOL;
        if r.equality != label {
            wrong.push(format!("{z0}"));
        }
    }
    report("9 (equality flag vs criterion 1 labels)", wrong.is_empty(), format!("mismatches: {wrong:?}"));
}

// 10 ------------------------------------------------------------------------

fn disc_oracle(z0: Complex64, t: Complex64) -> Complex64 {
    (t - z0) / (c(1.0, 0.0) - z0.conj() * t)
}

#[test]
fn criterion_10_mapping() {
    let base = DomainSpec::UnitDisc;
    let (mut sup, mut modulus, mut corollary) = (0.0f64, 0.0f64, 0.0f64);
    for (z0, s) in [(c(0.0, 0.0), -0.5), (c(0.3, 0.2), -0.7), (c(-0.5, 0.1), -1.5)] {
        let sub = variation::sublevel_domain(&base, z0, s).unwrap();
        let (cen, rad) = geometry::as_disc(&sub).unwrap().unwrap();
        let pts: Vec<_> = (0..C10_SAMPLES)
            .map(|k| {
                let u = (k as f64 + 0.5) / C10_SAMPLES as f64;
                cen + Complex64::from_polar(rad * 0.95 * u.sqrt(), 2.399963 * k as f64)
            })
            .collect();
        let map = mapping::riemann_map_from_kernel(&base, z0, s, &pts).unwrap();
        for (t, f) in &map.samples {
            sup = sup.max((f - disc_oracle(z0, *t)).norm());
        }
        let r = mapping::map_validation(&map, &base, z0, s).unwrap();
        assert!(r.derivative_positive && r.value_at_pole < C10_TOL);
        modulus = modulus.max(r.modulus_residual);
        corollary = corollary.max(r.corollary_residual);
    }
    report(
        "10",
        sup < C10_TOL && modulus < C10_TOL && corollary < C10_COROLLARY_TOL,
        format!(
            "sup |f0 - Mobius| {sup:.3e} < {C10_TOL:e}, max |log|f0| - G| {modulus:.3e} < {C10_TOL:e}, corollary {corollary:.3e} < {C10_COROLLARY_TOL:e} ({C10_SAMPLES} samples each)"
        ),
    );
}

// 11 ------------------------------------------------------------------------

#[test]
fn criterion_11_polar_negligibility() {
    let cfg = NumericConfig::default();
    let z0 = c(0.6, 0.0);
    let dev: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|eps| {
            let d = geometry::puncture(&DomainSpec::UnitDisc, &[c(0.3, 0.0)], *eps).unwrap();
            let r = suita::suita_ratio_numeric(&d, z0, &cfg).unwrap();
            (r.ratio - 1.0).abs()
        })
        .collect();
    let monotone = dev.windows(2).all(|w| w[1] < w[0]);
    report(
        "11 (punctured ratio)",
        monotone && dev[2] < C11_RATIO_TOL,
        format!("|ratio - 1| over eps = 1e-2, 1e-3, 1e-4: {:?}, decreasing and last < {C11_RATIO_TOL:e}", dev.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()),
    );
}

#[test]
fn criterion_11_volume_bound() {
    let centred = [(DomainSpec::UnitDisc, c(0.0, 0.0)), (DomainSpec::Disc { center: c(1.0, -1.0), radius: 2.0 }, c(1.0, -1.0))];
    let elsewhere = [
        (DomainSpec::UnitDisc, c(0.3, 0.4)),
        (DomainSpec::Disc { center: c(1.0, -1.0), radius: 2.0 }, c(1.5, -1.0)),
        (DomainSpec::Annulus { q: 0.25 }, c(0.5, 0.0)),
        (DomainSpec::Annulus { q: 0.5 }, c(0.0, 0.75)),
    ];
    let product = |d: &DomainSpec, z: Complex64| {
        let g = quadrature::build_quadrature(d, 256, 0).unwrap();
        suita::volume_bound_check(d, z, &g, C11_VOLUME_TOL).unwrap().product
    };
    let at_centres: Vec<f64> = centred.iter().map(|(d, z)| product(d, *z)).collect();
    let off: Vec<f64> = elsewhere.iter().map(|(d, z)| product(d, *z)).collect();
    let ok = at_centres.iter().all(|p| (p - 1.0).abs() < C11_VOLUME_TOL) && off.iter().all(|p| *p > 1.0 + C11_VOLUME_TOL);
    report("11 (volume bound)", ok, format!("K*Vol at centres {at_centres:.6?}, elsewhere {off:.4?}"));
}

// 12 ------------------------------------------------------------------------

#[test]
fn criterion_12_reproducing() {
    let disc = DomainSpec::UnitDisc;
    let ann = DomainSpec::Annulus { q: 0.3 };
    let gd = quadrature::build_quadrature(&disc, 512, 0).unwrap();
    let ga = quadrature::build_quadrature(&ann, 512, 0).unwrap();
    let rd = [c(0.0, 0.0), c(0.5, 0.0), c(0.3, 0.4)]
        .iter()
        .map(|z| bergman::reproducing_residual(&disc, *z, &gd).unwrap())
        .fold(0.0, f64::max);
    let ra = [c(0.55, 0.0), c(0.0, 0.4), Complex64::from_polar(0.8, 2.0)]
        .iter()
        .map(|z| bergman::reproducing_residual(&ann, *z, &ga).unwrap())
        .fold(0.0, f64::max);
    report(
        "12",
        rd < C12_DISC_TOL && ra < C12_ANNULUS_TOL,
        format!("disc {rd:.3e} < {C12_DISC_TOL:e}, annulus q = 0.3 {ra:.3e} < {C12_ANNULUS_TOL:e} (grid 512)"),
    );
}

// 13 ------------------------------------------------------------------------

#[test]
fn criterion_13_selftest_determinism() {
    let run = || {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_suita-lab")).args(["selftest", "--seed", "42"]).output().unwrap();
        (out, start.elapsed().as_secs_f64())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let slowest = ta.max(tb);
    report(
        "13",
        identical && slowest < C13_RUNTIME_S,
        format!(
            "two reports byte-identical: {identical} ({} bytes, exit {:?}), slowest run {slowest:.1} s < {C13_RUNTIME_S} s",
            a.stdout.len(),
            a.status.code()
        ),
    );
}
