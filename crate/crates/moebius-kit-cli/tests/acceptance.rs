//! Acceptance suite: ten end-to-end criteria covering cross-ratio
//! arithmetic, degenerate limits, orbit structure, Apollonian detection, the
//! Möbius group, the classifier in both directions, the constructive
//! midpoint machinery, the circle criterion, and CLI determinism.
//!
//! Each test prints one `[acceptance] criterion NN PASS` line when every
//! assertion in it has held (run with `--nocapture` to see them); a failing
//! criterion shows up as an ordinary failed test named after it.

use std::process::Command;

use moebius_kit::{
    chordal_distance, circle_test, classify, fit_circle, midpoint_test, non_moebius_zoo, orbit,
    solve_fourth_point, Complex64, DiskRegion, GeneralizedCircle, MidpointSequence, MoebiusMap,
    PhiTestConfig, SampledMap, SpherePoint, Tetrad, Transposition, Verdict,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw_complex(rng: &mut ChaCha8Rng, half_width: f64) -> Complex64 {
    c(
        rng.random_range(-half_width..half_width),
        rng.random_range(-half_width..half_width),
    )
}

fn draw_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// A sphere point from an 8x8 box, infinite with probability `p_inf`.
fn draw_point(rng: &mut ChaCha8Rng, p_inf: f64) -> SpherePoint {
    if rng.random::<f64>() < p_inf {
        SpherePoint::Infinity
    } else {
        SpherePoint::from_complex(draw_complex(rng, 8.0))
    }
}

/// N points with pairwise chordal separation above `sep`.
fn draw_separated<const N: usize>(rng: &mut ChaCha8Rng, p_inf: f64, sep: f64) -> [SpherePoint; N] {
    loop {
        let pts: [SpherePoint; N] = std::array::from_fn(|_| draw_point(rng, p_inf));
        let ok = pts.iter().enumerate().all(|(i, p)| {
            pts[..i].iter().all(|q| chordal_distance(*p, *q) > sep)
        });
        if ok {
            return pts;
        }
    }
}

fn draw_tetrad(rng: &mut ChaCha8Rng) -> Tetrad {
    Tetrad::new(draw_separated::<4>(rng, 0.05, 1e-2)).expect("separated points form a tetrad")
}

fn draw_finite_tetrad(rng: &mut ChaCha8Rng) -> Tetrad {
    Tetrad::new(draw_separated::<4>(rng, 0.0, 1e-2)).expect("separated points form a tetrad")
}

/// A random Möbius map with moderate entries and determinant bounded away
/// from zero, so that conditioning stays benign.
fn draw_moebius(rng: &mut ChaCha8Rng, conjugating: bool) -> MoebiusMap {
    loop {
        let [a, b, cc, d] = std::array::from_fn(|_| draw_complex(rng, 2.0));
        if (a * d - b * cc).norm() < 0.3 {
            continue;
        }
        let built = if conjugating {
            MoebiusMap::conjugating(a, b, cc, d)
        } else {
            MoebiusMap::new(a, b, cc, d)
        };
        return built.expect("determinant was checked");
    }
}

/// An admissible ratio value, kept clear of {0, 1} by `margin`.
fn draw_alpha(rng: &mut ChaCha8Rng, margin: f64, real: bool) -> Complex64 {
    loop {
        let a = if real {
            c(rng.random_range(-4.0..4.0), 0.0)
        } else {
            draw_complex(rng, 4.0)
        };
        if a.norm() > margin && (a - 1.0).norm() > margin {
            return a;
        }
    }
}

fn assert_close(got: SpherePoint, want: SpherePoint, tol: f64, what: &str) {
    let gap = chordal_distance(got, want);
    assert!(gap <= tol, "{what}: got {got:?}, want {want:?} (chordal gap {gap:e})");
}

// ---------------------------------------------------------------------------
// 1. Cross-ratio correctness
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_cross_ratio_correctness() {
    let pt = |re: f64| SpherePoint::finite(re, 0.0);

    // frozen finite example: exact machine equality
    let t = Tetrad::new([pt(0.0), pt(1.0), pt(2.0), pt(3.0)]).unwrap();
    assert_eq!(t.cross_ratio().value(), SpherePoint::finite(4.0 / 3.0, 0.0));

    // frozen infinite example: exact machine equality
    let t = Tetrad::new([pt(0.0), pt(1.0), pt(2.0), SpherePoint::Infinity]).unwrap();
    assert_eq!(t.cross_ratio().value(), SpherePoint::finite(2.0, 0.0));

    // permutation identities on 1000 random nonsingular tetrads
    let mut r = rng(101);
    for _ in 0..1000 {
        let t = draw_tetrad(&mut r);
        assert!(t.is_nonsingular(), "distinct points must be nonsingular");
        let a = t
            .cross_ratio()
            .value()
            .as_finite()
            .expect("nonsingular ratio is finite");
        let laws = [
            (Transposition::S12, a.finv()),
            (Transposition::S13, a / (a - 1.0)),
            (Transposition::S14, 1.0 - a),
        ];
        for (s, expected) in laws {
            assert_close(
                t.permute(s).cross_ratio().value(),
                SpherePoint::from_complex(expected),
                1e-10,
                "permutation identity",
            );
        }
    }

    println!("[acceptance] criterion 01 PASS — cross-ratio values and permutation identities");
}

// ---------------------------------------------------------------------------
// 2. Limit-case consistency
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_limit_case_consistency() {
    // each coincident pair, with its exact singular ratio
    let patterns: [((usize, usize), SpherePoint); 6] = [
        ((0, 1), SpherePoint::finite(1.0, 0.0)),
        ((2, 3), SpherePoint::finite(1.0, 0.0)),
        ((0, 2), SpherePoint::finite(0.0, 0.0)),
        ((1, 3), SpherePoint::finite(0.0, 0.0)),
        ((0, 3), SpherePoint::Infinity),
        ((1, 2), SpherePoint::Infinity),
    ];

    let mut r = rng(202);
    for ((i, j), expected) in patterns {
        for with_infinity in [false, true] {
            let [p, x, y] = draw_separated::<3>(&mut r, 0.0, 0.1);
            // slots i and j coincide at p; the rest take x then y, with the
            // first free slot replaced by infinity in the with-infinity runs
            let mut points = [p; 4];
            let free: Vec<usize> = (0..4).filter(|k| *k != i && *k != j).collect();
            points[free[0]] = if with_infinity { SpherePoint::Infinity } else { x };
            points[free[1]] = y;

            let ratio = Tetrad::new(points).unwrap().cross_ratio();
            assert!(ratio.is_singular(), "coincident pair must be singular");
            assert_eq!(
                ratio.value(),
                expected,
                "closed form for pair ({i},{j}), with_infinity = {with_infinity}"
            );

            // ten random approach paths: all four entries perturbed, the
            // gap must land under 1e-6 by eps = 1e-9 and shrink with eps
            for _ in 0..10 {
                let mut dirs: [Complex64; 4] = std::array::from_fn(|_| draw_unit(&mut r));
                while (dirs[i] - dirs[j]).norm() < 0.1 {
                    dirs[j] = draw_unit(&mut r);
                }
                let ratio_at = |eps: f64| {
                    let perturbed: [SpherePoint; 4] = std::array::from_fn(|k| {
                        let step = eps * dirs[k];
                        match points[k] {
                            SpherePoint::Finite(v) => SpherePoint::from_complex(v + step),
                            SpherePoint::Infinity => SpherePoint::from_complex(step.finv()),
                        }
                    });
                    Tetrad::new(perturbed).unwrap().cross_ratio().value()
                };
                let coarse = chordal_distance(ratio_at(1e-5), expected);
                let fine = chordal_distance(ratio_at(1e-9), expected);
                assert!(
                    fine <= 1e-6,
                    "limit not reached for pair ({i},{j}): gap {fine:e} at eps = 1e-9"
                );
                assert!(
                    fine <= coarse + 1e-12,
                    "approach path not converging: {coarse:e} -> {fine:e}"
                );
            }
        }
    }

    println!("[acceptance] criterion 02 PASS — singular patterns match numeric limits");
}

// ---------------------------------------------------------------------------
// 3. Orbit structure
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_orbit_structure() {
    // 100 random generic values: full six-element orbit, closed under itself
    let mut r = rng(303);
    for _ in 0..100 {
        let alpha = draw_alpha(&mut r, 0.05, false);
        let base = orbit(alpha).unwrap();
        assert_eq!(base.len(), 6, "generic orbit of {alpha} should have 6 elements");
        for &beta in &base {
            let derived = orbit(beta).unwrap();
            assert_eq!(derived.len(), 6);
            for &gamma in &derived {
                assert!(
                    base.iter().any(|&delta| (gamma - delta).norm() <= 1e-8),
                    "orbit({beta}) strays from orbit({alpha}) at {gamma}"
                );
            }
        }
    }

    // harmonic-adjacent ratio 2: exactly {2, 1/2, -1}
    let mut three = orbit(c(2.0, 0.0)).unwrap();
    three.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    assert_eq!(three, vec![c(-1.0, 0.0), c(0.5, 0.0), c(2.0, 0.0)]);

    // equianharmonic ratio: exactly two elements, swapped by conjugation
    let omega = c(0.5, 0.75f64.sqrt());
    let two = orbit(omega).unwrap();
    assert_eq!(two.len(), 2);
    assert!(two.contains(&omega));
    assert!(
        two.iter().any(|&b| (b - omega.conj()).norm() <= 1e-9),
        "second element should be the conjugate value"
    );
    for &beta in &two {
        assert_eq!(orbit(beta).unwrap().len(), 2);
    }

    println!("[acceptance] criterion 03 PASS — orbit sizes 6/3/2 and closure");
}

// ---------------------------------------------------------------------------
// 4. Apollonian equivalence
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_apollonian_equivalence() {
    let third = 2.0 * std::f64::consts::PI / 3.0;
    let omega = c(0.5, 0.75f64.sqrt());

    // the cube-roots-of-unity tetrad with its centroid
    let t = Tetrad::new([
        SpherePoint::finite(1.0, 0.0),
        SpherePoint::from_complex(Complex64::from_polar(1.0, third)),
        SpherePoint::from_complex(Complex64::from_polar(1.0, 2.0 * third)),
        SpherePoint::finite(0.0, 0.0),
    ])
    .unwrap();
    assert!(t.is_apollonian(1e-8).unwrap(), "distance-product test");
    assert!(t.is_apollonian_by_ratio(1e-8).unwrap(), "ratio test");

    // the two tests agree on 200 random finite nonsingular tetrads
    let mut r = rng(404);
    for _ in 0..200 {
        let t = draw_finite_tetrad(&mut r);
        assert_eq!(
            t.is_apollonian(1e-8).unwrap(),
            t.is_apollonian_by_ratio(1e-8).unwrap(),
            "tests disagree on {:?}",
            t.points()
        );
    }

    // 50 constructed Apollonian tetrads pass both tests
    let mut built = 0usize;
    while built < 50 {
        let [z1, z2, z3] = draw_separated::<3>(&mut r, 0.0, 1e-2);
        let z4 = solve_fourth_point(z1, z2, z3, omega).unwrap();
        if !z4.is_finite() {
            continue; // the product test needs four finite points
        }
        let t = Tetrad::new([z1, z2, z3, z4]).unwrap();
        assert!(t.is_apollonian(1e-8).unwrap());
        assert!(t.is_apollonian_by_ratio(1e-8).unwrap());
        built += 1;
    }

    // Apollonian status is a Möbius invariant (ratio criterion), for both
    // orientations and both statuses
    for k in 0..50 {
        let f = draw_moebius(&mut r, k % 2 == 0);
        let t = if k % 4 < 2 {
            // a constructed Apollonian tetrad
            loop {
                let [z1, z2, z3] = draw_separated::<3>(&mut r, 0.0, 1e-2);
                if let Ok(z4) = solve_fourth_point(z1, z2, z3, omega) {
                    break Tetrad::new([z1, z2, z3, z4]).unwrap();
                }
            }
        } else {
            draw_tetrad(&mut r)
        };
        assert_eq!(
            t.is_apollonian_by_ratio(1e-8).unwrap(),
            f.image_tetrad(&t).is_apollonian_by_ratio(1e-8).unwrap(),
            "status changed under a Möbius image"
        );
    }

    println!("[acceptance] criterion 04 PASS — product and ratio tests agree, Möbius-invariant");
}

// ---------------------------------------------------------------------------
// 5. Möbius group and ratio invariance
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_moebius_group_invariance() {
    let mut r = rng(505);

    // group laws at 1e-10 on random samples
    for k in 0..200 {
        let f = draw_moebius(&mut r, k % 2 == 0);
        let g = draw_moebius(&mut r, k % 3 == 0);
        let h = draw_moebius(&mut r, k % 5 == 0);
        let p = draw_point(&mut r, 0.05);

        assert_eq!(MoebiusMap::identity().apply(p), p);
        assert!(f.compose(&f.inverse()).is_identity(1e-10));
        assert!(f.inverse().compose(&f).is_identity(1e-10));
        assert!(f.compose(&MoebiusMap::identity()).approx_eq(&f, 1e-10));
        assert!(MoebiusMap::identity().compose(&f).approx_eq(&f, 1e-10));
        assert!(f
            .compose(&g)
            .compose(&h)
            .approx_eq(&f.compose(&g.compose(&h)), 1e-10));
        assert_close(
            f.compose(&g).apply(p),
            f.apply(g.apply(p)),
            1e-10,
            "composition vs sequential application",
        );
    }

    // ratio invariance / conjugation law on 1000 random cases
    for k in 0..1000 {
        let f = draw_moebius(&mut r, k % 2 == 0);
        let t = draw_tetrad(&mut r);
        let before = t.cross_ratio().value();
        let expected = if f.is_conjugating() { before.conj() } else { before };
        assert_close(
            f.image_tetrad(&t).cross_ratio().value(),
            expected,
            1e-9,
            "cross-ratio transformation law",
        );
    }

    println!("[acceptance] criterion 05 PASS — group laws and the ratio transformation law");
}

// ---------------------------------------------------------------------------
// 6. Theorem dichotomy, positive direction
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_dichotomy_positive() {
    let region = DiskRegion::new(c(0.0, 0.0), 2.0).unwrap();
    let mut r = rng(606);

    // 50 random Möbius maps (both orientations) at random real ratios
    for k in 0..50 {
        let f = draw_moebius(&mut r, k % 2 == 1);
        let alpha = draw_alpha(&mut r, 0.2, true);
        let map = SampledMap::from_moebius(&f, region);
        let cfg = PhiTestConfig::new(alpha, 300, 1e-9, 6000 + k).unwrap();
        let report = classify(&map, &cfg).unwrap();
        assert_eq!(
            report.verdict,
            Verdict::Moebius,
            "map {k} at alpha {alpha}: {:?}",
            report.diagnostics
        );
        assert!(
            report.max_residual.unwrap() <= 1e-8,
            "fit residual {:e} too large",
            report.max_residual.unwrap()
        );
        // the fitted transformation generalizes to 20 fresh points
        let fitted = report.fitted_map.unwrap();
        assert_eq!(fitted.is_conjugating(), f.is_conjugating());
        for _ in 0..20 {
            let p = SpherePoint::from_complex(region.center + draw_complex(&mut r, 1.4));
            assert_close(fitted.apply(p), f.apply(p), 1e-8, "fitted map on fresh points");
        }
    }

    // constant maps classify as constant
    for k in 0..5 {
        let value = draw_complex(&mut r, 3.0);
        let map = SampledMap::rational(vec![value], vec![c(1.0, 0.0)], region).unwrap();
        let cfg = PhiTestConfig::new(c(2.0, 0.0), 100, 1e-9, 6600 + k).unwrap();
        let report = classify(&map, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Constant);
    }

    // non-real ratio: the orientation split. Non-conjugating maps pass…
    for k in 0..50 {
        let f = draw_moebius(&mut r, false);
        let mut alpha = draw_alpha(&mut r, 0.2, false);
        if alpha.im.abs() < 0.2 {
            alpha.im = alpha.im.signum() * 0.2 + alpha.im;
        }
        if alpha.im == 0.0 {
            alpha.im = 0.2;
        }
        let map = SampledMap::from_moebius(&f, region);
        let cfg = PhiTestConfig::new(alpha, 300, 1e-9, 6700 + k).unwrap();
        let report = classify(&map, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::Moebius, "non-conjugating at {alpha}");
        assert!(!report.fitted_map.unwrap().is_conjugating());
    }

    // …while conjugating maps are rejected at the phi stage
    for k in 0..50 {
        let f = draw_moebius(&mut r, true);
        let mut alpha = draw_alpha(&mut r, 0.2, false);
        if alpha.im.abs() < 0.2 {
            alpha.im = alpha.im.signum() * 0.2 + alpha.im;
        }
        if alpha.im == 0.0 {
            alpha.im = 0.2;
        }
        let map = SampledMap::from_moebius(&f, region);
        let cfg = PhiTestConfig::new(alpha, 300, 1e-9, 6800 + k).unwrap();
        let report = classify(&map, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::PhiViolating, "conjugating at {alpha}");
        let phi = report.checks.phi.as_ref().unwrap();
        assert!(phi.violations > 0, "rejection must come from the phi stage");
    }

    println!("[acceptance] criterion 06 PASS — Möbius maps certified, orientation split at non-real ratios");
}

// ---------------------------------------------------------------------------
// 7. Theorem dichotomy, negative direction
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_dichotomy_negative() {
    let region = DiskRegion::new(c(3.0, 0.0), 1.0).unwrap();
    let one = c(1.0, 0.0);
    let zero = Complex64::ZERO;
    let specimens: Vec<(&str, SampledMap)> = vec![
        (
            "z^2",
            SampledMap::rational(vec![zero, zero, one], vec![one], region).unwrap(),
        ),
        (
            "z + 0.01 z^2",
            SampledMap::rational(vec![zero, one, c(0.01, 0.0)], vec![one], region).unwrap(),
        ),
        (
            "z + 0.1 sin(Re z)",
            SampledMap::rational(vec![zero, one], vec![one], region)
                .unwrap()
                .with_sin_perturbation(0.1)
                .unwrap(),
        ),
    ];

    for (name, map) in &specimens {
        let cfg = PhiTestConfig::new(c(2.0, 0.0), 2000, 1e-6, 7000).unwrap();
        let report = classify(map, &cfg).unwrap();
        assert_eq!(report.verdict, Verdict::PhiViolating, "{name} must violate");

        // the witness must be independently verifiable: re-evaluating the
        // witness tetrad reproduces the stored image and the reported gap
        let witness = report.witness.as_ref().expect("violating verdict carries a witness");
        let recomputed: Vec<SpherePoint> = witness
            .tetrad
            .points()
            .iter()
            .map(|&p| map.eval(p).expect("witness points are evaluable"))
            .collect();
        assert_eq!(
            recomputed,
            witness.image.points().to_vec(),
            "{name}: stored image is not the map's output"
        );
        let achieved = witness.image.cross_ratio().value();
        assert_eq!(achieved, witness.achieved, "{name}: achieved ratio mismatch");
        let gap = chordal_distance(achieved, witness.reference);
        assert!(
            (gap - witness.gap).abs() <= 1e-12,
            "{name}: reported gap {:e} is not reproducible (got {gap:e})",
            witness.gap
        );
        assert!(witness.gap > 1e-6, "{name}: witness gap must exceed tolerance");
    }

    println!("[acceptance] criterion 07 PASS — violations found with reproducible witnesses");
}

// ---------------------------------------------------------------------------
// 8. Constructive machinery
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_constructive_machinery() {
    // beta = 2: conjugate parameter and contraction ratio are machine-exact
    let seq = MidpointSequence::new(c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), 20).unwrap();
    assert_eq!(seq.beta_prime, c(1.0 / 3.0, 0.0));
    assert_eq!(seq.q, 1.0 / 3.0);
    assert!(seq.is_contracting());

    let mut r = rng(808);

    // the defining product identity of the conjugate parameter
    for _ in 0..100 {
        let beta = loop {
            let b = draw_complex(&mut r, 4.0);
            if b.norm() > 0.1 && (b - 1.0).norm() > 0.1 && (1.0 - 2.0 * b).norm() > 0.1 {
                break b;
            }
        };
        let seq = MidpointSequence::new(beta, c(0.0, 0.0), c(1.0, 0.0), 1).unwrap();
        let product = (1.0 - 2.0 * beta) * (1.0 - 2.0 * seq.beta_prime);
        assert!(
            (product + 1.0).norm() <= 1e-13,
            "(1-2b)(1-2b') = {product} should be -1"
        );
    }

    // midpoint identity, machine-exact for affine maps
    for _ in 0..200 {
        let p = loop {
            let p = draw_complex(&mut r, 3.0);
            if p.norm() > 0.1 {
                break p;
            }
        };
        let q = draw_complex(&mut r, 3.0);
        let z0 = draw_complex(&mut r, 3.0);
        let w = loop {
            let w = draw_complex(&mut r, 1.0);
            if w.norm() > 1e-3 {
                break w;
            }
        };
        let f = |z: Complex64| p * z + q;
        let mid = f((z0 + w + (z0 - w)) / 2.0);
        let avg = (f(z0 + w) + f(z0 - w)) / 2.0;
        assert!(
            chordal_distance(
                SpherePoint::from_complex(mid),
                SpherePoint::from_complex(avg)
            ) <= 1e-13,
            "affine midpoint identity broke: {mid} vs {avg}"
        );
    }

    // midpoint and conservation laws through the conjugating harness, for
    // random Möbius maps of both orientations, sequence depth 20
    let region = DiskRegion::new(c(0.0, 0.0), 2.0).unwrap();
    for k in 0..40 {
        let f = draw_moebius(&mut r, k % 2 == 0);
        let map = SampledMap::from_moebius(&f, region);
        let report = midpoint_test(&map, c(3.0, 0.0), 40, 1e-8, 8800 + k).unwrap();
        assert!(report.pass, "midpoint test failed for map {k}");
        assert!(report.max_midpoint_gap <= 1e-8);
        let conservation = report
            .max_conservation_gap
            .expect("beta = 3 contracts, so the conservation law is exercised");
        assert!(conservation <= 1e-8, "conservation gap {conservation:e}");
        assert!(report.contraction_ratio < 1.0);
    }

    println!("[acceptance] criterion 08 PASS — exact parameters, midpoint and conservation laws");
}

// ---------------------------------------------------------------------------
// 9. Circle criterion
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_circle_criterion() {
    let region = DiskRegion::new(c(0.0, 0.0), 2.0).unwrap();
    let mut r = rng(909);

    // 50 random Möbius maps keep every probed circle a circle
    for k in 0..50 {
        let f = draw_moebius(&mut r, k % 2 == 0);
        let map = SampledMap::from_moebius(&f, region);
        let report = circle_test(&map, 12, 12, 1e-8, 9900 + k).unwrap();
        assert!(report.pass, "circle test failed for Möbius map {k}");
        assert!(!report.degenerate);
        assert!(
            report.max_fit_residual <= 1e-8,
            "fit residual {:e}",
            report.max_fit_residual
        );
    }

    // a small quadratic bend already breaks circles decisively
    let bent_region = DiskRegion::new(c(3.0, 0.0), 1.0).unwrap();
    let bent = SampledMap::rational(
        vec![Complex64::ZERO, c(1.0, 0.0), c(0.05, 0.0)],
        vec![c(1.0, 0.0)],
        bent_region,
    )
    .unwrap();
    let report = circle_test(&bent, 12, 12, 1e-8, 9990).unwrap();
    assert!(!report.pass, "z + 0.05 z^2 must fail the circle test");
    assert!(
        report.max_fit_residual > 1e-4,
        "violation should be far above tolerance, got {:e}",
        report.max_fit_residual
    );

    // the vertical line Re z = 1 maps under 1/z onto |w - 1/2| = 1/2
    let line = GeneralizedCircle::from_coefficients(0.0, c(0.5, 0.0), -1.0).unwrap();
    assert!(line.is_line());
    let inversion = MoebiusMap::new(Complex64::ZERO, c(1.0, 0.0), c(1.0, 0.0), Complex64::ZERO)
        .unwrap();
    let images: Vec<SpherePoint> = line
        .sample_points(16)
        .iter()
        .map(|&p| inversion.apply(p))
        .collect();
    let (fitted, residual) = fit_circle(&images).unwrap();
    assert!(residual <= 1e-8, "inverted line should fit exactly, residual {residual:e}");
    let center = fitted.center().expect("the image is a bounded circle");
    let radius = fitted.radius().unwrap();
    assert!(
        (center - c(0.5, 0.0)).norm() <= 1e-8,
        "center {center} should be 1/2"
    );
    assert!((radius - 0.5).abs() <= 1e-8, "radius {radius} should be 1/2");

    println!("[acceptance] criterion 09 PASS — circles preserved by Möbius maps only");
}

// ---------------------------------------------------------------------------
// 10. CLI determinism
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_cli_determinism() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_moebius-kit"))
            .args(["fuzz", "--seed", "4242", "--n-tetrads", "200"])
            .output()
            .expect("fuzz run starts")
    };

    let first = run();
    assert!(
        first.status.success(),
        "fuzz exited nonzero: {}",
        String::from_utf8_lossy(&first.stderr)
    );

    let parsed: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(parsed["all_phi_violating"], serde_json::Value::Bool(true));
    let results = parsed["results"].as_array().unwrap();
    assert_eq!(results.len(), non_moebius_zoo().len());
    for entry in results {
        assert_eq!(
            entry["verdict"].as_str().unwrap(),
            "phi_violating",
            "zoo map {} escaped",
            entry["name"]
        );
        assert!(entry["violations"].as_u64().unwrap() > 0);
    }

    // byte-for-byte reproducibility under the same seed
    let second = run();
    assert!(second.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "same seed must give byte-identical output"
    );

    println!("[acceptance] criterion 10 PASS — fuzz finds 100% violations, byte-stable output");
}
