use std::f64::consts::PI;

use proptest::prelude::*;
use teichlab_core::angles::{angle_numeric, Schedule, Tolerances, Verdict};
use teichlab_core::geodesics::{
    alpha_mu, alpha_mu1, pulled_back_segment, sigma_prescribed, sigma_segment, standard_segment, BlendParams, End,
};
use teichlab_core::triangles::{synthesize, TriangleSpec};
use teichlab_core::{allowable_chart, distance, BlockPoint, Modulus, SigmaFunction};

fn k(x: f64) -> Modulus {
    Modulus::new(x).unwrap()
}

fn grid(k: Modulus) -> impl Iterator<Item = (f64, f64)> {
    let kk = k.k();
    let f = [-1.0, -0.5, 0.0, 0.5, 1.0];
    f.into_iter().flat_map(move |a| f.into_iter().map(move |b| (a * (1.0 - kk * kk) / kk, b / kk)))
}

#[test]
fn arclength_addressing_inverts_parametrization() {
    for kk in [0.3, 0.5, 0.7] {
        let m = k(kk);
        let sigma = sigma_prescribed(0.5 * (1.0 - kk * kk) / kk, -0.5 / kk, m, &BlendParams::default()).unwrap();
        let segs = [
            alpha_mu(m),
            sigma_segment(&sigma, m).unwrap(),
            pulled_back_segment(&sigma, m).unwrap(),
            standard_segment(BlockPoint::new(0.3, -0.7), BlockPoint::new(1.1, 0.2), m).unwrap(),
        ];
        for seg in &segs {
            let total = seg.total_length();
            for j in 0..=50 {
                let r = total * j as f64 / 50.0;
                for end in [End::Start, End::End] {
                    let p = seg.point_at_arclength(end, r).unwrap();
                    let d = distance(seg.endpoint(end), p, m).unwrap();
                    assert!((d - r).abs() < 1e-12, "{:?} {end:?} r={r}: {d}", seg.kind());
                }
            }
        }
    }
}

#[test]
fn standard_segment_reversal() {
    let m = k(0.6);
    // equal blockwise displacements: the reversed segment is the same curve
    for (p, q) in [(BlockPoint::BASE, BlockPoint::MU), (BlockPoint::MU, BlockPoint::MU1), (BlockPoint::new(0.4, -0.4), BlockPoint::new(-0.4, 0.4))] {
        let (a, b) = (standard_segment(p, q, m).unwrap(), standard_segment(q, p, m).unwrap());
        let total = a.total_length();
        for j in 0..=100 {
            let r = total * j as f64 / 100.0;
            let x = a.point_at_arclength(End::Start, r).unwrap();
            let y = b.point_at_arclength(End::End, r).unwrap();
            assert!(x.max_abs_diff(y) < 1e-10, "r={r}: {x:?} vs {y:?}");
        }
    }
    // unequal displacements: both are geodesics with the same ends, they agree
    // in the dominant block and differ in the other one
    let (p, q) = (BlockPoint::new(-0.4, 0.9), BlockPoint::new(1.2, 0.1));
    let (a, b) = (standard_segment(p, q, m).unwrap(), standard_segment(q, p, m).unwrap());
    let total = a.total_length();
    let mut max_gap: f64 = 0.0;
    for j in 0..=100 {
        let r = total * j as f64 / 100.0;
        let x = a.point_at_arclength(End::Start, r).unwrap();
        let y = b.point_at_arclength(End::End, r).unwrap();
        assert!((x.c1 - y.c1).abs() < 1e-10);
        assert!((distance(p, y, m).unwrap() - r).abs() < 1e-12);
        max_gap = max_gap.max((x.c2 - y.c2).abs());
    }
    assert!(max_gap > 1e-3);
}

#[test]
fn constant_sigma_is_the_standard_segment() {
    for kk in [0.2, 0.5, 0.8] {
        let m = k(kk);
        let beta = sigma_segment(&SigmaFunction::constant_one(m), m).unwrap();
        let std = standard_segment(BlockPoint::MU, BlockPoint::MU1, m).unwrap();
        for j in 0..=100 {
            let t = kk * j as f64 / 100.0;
            assert!(beta.point_at(t).max_abs_diff(std.point_at(t)) < 1e-14);
        }
    }
}

#[test]
fn pulled_back_segment_is_chart_image() {
    let m = k(0.5);
    let s = sigma_prescribed(0.4, 0.8, m, &BlendParams { seed: 3, ..BlendParams::default() }).unwrap();
    let seg = pulled_back_segment(&s, m).unwrap();
    for j in 0..=100 {
        let t = 0.5 * j as f64 / 100.0;
        let img = allowable_chart(seg.point_at(t), m).unwrap();
        assert!((img.c1 - (0.5 - t) / (0.5 * (1.0 - 0.5 * t))).abs() < 1e-12);
        assert!((img.c2 - s.eval(t)).abs() < 1e-12);
    }
}

#[test]
fn angles_are_symmetric_and_never_clamped() {
    let (sch, tol) = (Schedule::default(), Tolerances::default());
    for kk in [0.3, 0.5, 0.7] {
        let m = k(kk);
        for (d0, dk) in grid(m) {
            let s = sigma_prescribed(d0, dk, m, &BlendParams::default()).unwrap();
            let beta = sigma_segment(&s, m).unwrap();
            for (other, v) in [(alpha_mu(m), BlockPoint::MU), (alpha_mu1(m), BlockPoint::MU1)] {
                let ab = angle_numeric(&other, &beta, v, &sch, &tol).unwrap();
                let ba = angle_numeric(&beta, &other, v, &sch, &tol).unwrap();
                assert_eq!(ab.verdict, Verdict::Exists);
                assert!((ab.theta.unwrap() - ba.theta.unwrap()).abs() < 1e-10);
                assert!(!ab.clamped);
                // d(x, y) ≤ 2r holds exactly; allow the last-bit rounding of artanh and the division
                assert!((0.0..=2.0 + 1e-15).contains(&ab.raw_limit), "raw {}", ab.raw_limit);
                let lv = ab.limit_value.unwrap();
                assert!((2.0 * (ab.theta.unwrap() / 2.0).sin() - lv).abs() < 1e-12);
                assert!(ab.diagnostics.windows(2).all(|w| w[0].r > w[1].r));
            }
        }
    }
}

#[test]
fn family_angle_at_mu_independent_of_interior() {
    let spec = |seed| TriangleSpec { l: 0.5 * 3f64.ln(), theta: [1.0, PI / 2.0, 1.0], family_seed: seed };
    let base = synthesize(&spec(0)).unwrap().vertices[1].measured.unwrap();
    for seed in [5, 17, 99] {
        let r = synthesize(&spec(seed)).unwrap();
        assert!((r.vertices[1].measured.unwrap() - PI / 2.0).abs() < 1e-3);
        assert!((r.vertices[1].measured.unwrap() - base).abs() < 1e-9);
    }
}

#[test]
fn triangle_sides_share_exactly_the_vertices() {
    let r = synthesize(&TriangleSpec { l: 0.8, theta: [0.7, 2.1, 1.3], family_seed: 4 }).unwrap();
    let ends = |i: usize| [r.sides[i].start, r.sides[i].end];
    let shared = |i: usize, j: usize| ends(i).iter().filter(|p| ends(j).contains(p)).count();
    assert_eq!((shared(0, 1), shared(1, 2), shared(0, 2)), (1, 1, 1));
    for s in &r.sides {
        assert!((s.length - 0.8).abs() < 1e-12);
    }
    assert!(r.all_within_tol, "{:#?}", r.vertices);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chart_preserves_standard_angles(
        kk in 0.2f64..0.8,
        a in (-0.9f64..0.9, -0.9f64..0.9),
        b in (-0.9f64..0.9, -0.9f64..0.9),
        c in (-0.9f64..0.9, -0.9f64..0.9),
    ) {
        let m = k(kk);
        let s = 1.0 / kk;
        let (p, q, r) = (BlockPoint::new(a.0 * s, a.1 * s), BlockPoint::new(b.0 * s, b.1 * s), BlockPoint::new(c.0 * s, c.1 * s));
        let (Ok(x), Ok(y)) = (standard_segment(p, q, m), standard_segment(p, r, m)) else { return Ok(()) };
        prop_assume!(x.total_length() > 0.02 && y.total_length() > 0.02);
        let (sch, tol) = (Schedule::default(), Tolerances::default());
        let before = angle_numeric(&x, &y, p, &sch, &tol).unwrap();
        let chart = |z| allowable_chart(z, m).unwrap();
        let (cx, cy) = (standard_segment(chart(p), chart(q), m).unwrap(), standard_segment(chart(p), chart(r), m).unwrap());
        let after = angle_numeric(&cx, &cy, chart(p), &sch, &tol).unwrap();
        prop_assert!((before.raw_limit - after.raw_limit).abs() < 1e-6);
        for t in [0.0, 0.3, 0.7, 1.0] {
            let z = x.point_at(t * x.param_max());
            prop_assert!(chart(z).max_abs_diff(cx.point_at(t * cx.param_max())) < 1e-9);
        }
    }
}
