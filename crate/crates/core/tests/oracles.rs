//! Cross-checks against independent closed forms and quadratures.

use flexscrew::insert::engaged_thread_count;
use flexscrew::model::{annulus_section, notched_section};
use flexscrew::*;

fn reference() -> ValidatedScrewSpec {
    validate_screw_spec(ScrewSpec::reference()).unwrap()
}

/// 20-point Gauss–Legendre rule on [a, b], composite over `panels`.
fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 10] = [
        0.076_526_521_133_497_33,
        0.227_785_851_141_645_08,
        0.373_706_088_715_419_56,
        0.510_867_001_950_827_1,
        0.636_053_680_726_515,
        0.746_331_906_460_150_8,
        0.839_116_971_822_218_8,
        0.912_234_428_251_326,
        0.963_971_927_277_913_8,
        0.993_128_599_185_094_9,
    ];
    const W: [f64; 10] = [
        0.152_753_387_130_725_85,
        0.149_172_986_472_603_75,
        0.142_096_109_318_382_05,
        0.131_688_638_449_176_63,
        0.118_194_531_961_518_42,
        0.101_930_119_817_240_44,
        0.083_276_741_576_704_75,
        0.062_672_048_334_109_06,
        0.040_601_429_800_386_94,
        0.017_614_007_139_152_12,
    ];
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let (lo, hi) = (a + p as f64 * h, a + (p + 1) as f64 * h);
        let (m, r) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        for (x, w) in X.iter().zip(W) {
            sum += w * r * (f(m - r * x) + f(m + r * x));
        }
    }
    sum
}

#[test]
fn arc_length_matches_quadrature() {
    for (delta, len) in [(10.0, 35.0), (40.0, 35.0), (5.3, 20.0), (0.1, 50.0)] {
        let c = Centerline::new(delta, len).unwrap();
        let a = 2.0 * delta / (len * len);
        let q = gauss_legendre(|x| (1.0 + (a * x).powi(2)).sqrt(), 0.0, len, 8);
        assert!((c.total_arc_length() - q).abs() < 1e-10, "{delta} {len}");
    }
}

#[test]
fn frozen_tunnel_lengths() {
    // independent quadrature values, frozen
    let c10 = Centerline::new(10.0, 35.0).unwrap().total_arc_length();
    let c40 = Centerline::new(40.0, 35.0).unwrap().total_arc_length();
    let q10 = gauss_legendre(|x| (1.0 + (20.0 * x / 1225.0).powi(2)).sqrt(), 0.0, 35.0, 8);
    let q40 = gauss_legendre(|x| (1.0 + (80.0 * x / 1225.0).powi(2)).sqrt(), 0.0, 35.0, 8);
    assert!((c10 - q10).abs() < 1e-10);
    assert!((c40 - q40).abs() < 1e-10);
    assert!((c10 - 36.820_888_423_190_33).abs() < 1e-9);
    assert!((c40 - 55.639_343_156_492_62).abs() < 1e-9);
}

#[test]
fn notched_section_converges_to_annulus_at_zero_depth() {
    let a = annulus_section(7.5, 2.0);
    let n = notched_section(7.5, 2.0, 1e-12);
    assert!((a.area - n.area).abs() < 1e-6);
    assert!((a.second_moment_plane_a - n.second_moment_plane_a).abs() < 1e-6);
}

#[test]
fn engaged_threads_match_enumeration() {
    let v = reference();
    let p = v.spec().thread_pitch;
    for k in 0..=200 {
        let depth = k as f64 * 0.25;
        // count whole pitches that fit, by enumeration
        let mut n = 0;
        while n < v.spec().thread_count && (n + 1) as f64 * p <= depth + 1e-9 {
            n += 1;
        }
        assert_eq!(
            engaged_thread_count(depth, p, v.spec().thread_count),
            n,
            "{depth}"
        );
    }
}

#[test]
fn torque_grid_refinement_is_converged() {
    let v = reference();
    let bone = MaterialSpec::pcf15_foam();
    let engaged = ArcInterval::new(v.threads_start(), v.threads_end());
    let contact = ContactModel {
        conformity: 1e-3,
        ..Default::default()
    };
    let coarse = Centerline::new(10.0, 45.0).unwrap();
    let fine = Centerline::with_resolution(10.0, 45.0, 40.0).unwrap();
    let a = torque_transmission(
        &v,
        &coarse,
        engaged,
        150.0,
        &bone,
        CuttingLoad::None,
        contact,
    )
    .unwrap();
    let b =
        torque_transmission(&v, &fine, engaged, 150.0, &bone, CuttingLoad::None, contact).unwrap();
    let (ra, rb) = (a.head_torque_required, b.head_torque_required);
    assert!(rb > 0.0);
    assert!(((ra - rb) / rb).abs() < 5e-3, "{ra} {rb}");
}

#[test]
fn cantilever_converges_to_beam_formula() {
    let sec = annulus_section(7.5, 2.0);
    let (l, e, p) = (30.0f64, 83_000.0, 1.0);
    let exact = p * l.powi(3) / (3.0 * e * sec.second_moment_plane_a);
    for n in [1, 4, 32] {
        let sol = solve_cantilever(l, &sec, NotchPlane::A, e, p, n).unwrap();
        // cubic elements are nodally exact for a tip load
        assert!(((sol.tip_deflection - exact) / exact).abs() < 1e-10);
    }
}
