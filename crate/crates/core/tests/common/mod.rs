//! Strategies and checks shared by the property suite and the acceptance gate.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use fif_core::separation::{wsp_check_1d, wsp_check_2d, FamilyElement, WspOptions};
use fif_core::system::conjugate_map_x;
use fif_core::{evaluate_f_via_branch, examples, Affine2, IfsSystem, Rational, Scalar};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Rational in `[-range, range]` with denominator at most `den`.
pub fn small_rational(range: i64, den: i64) -> impl Strategy<Value = Rational> {
    (1..=den).prop_flat_map(move |d| (-range * d..=range * d).prop_map(move |n| q(n, d)))
}

pub fn nonzero_rational(range: i64, den: i64) -> impl Strategy<Value = Rational> {
    small_rational(range, den).prop_filter("nonzero", |v| !v.is_zero())
}

pub fn affine2() -> impl Strategy<Value = Affine2<Rational>> {
    (
        nonzero_rational(3, 12),
        nonzero_rational(3, 12),
        small_rational(3, 12),
        small_rational(3, 12),
        small_rational(3, 12),
    )
        .prop_map(|(p, q, r, h, s)| Affine2::new(p, q, r, h, s))
}

/// Contraction ratio with `0 < |v| < 1`.
fn ratio(den: i64) -> impl Strategy<Value = Rational> {
    (2..=den).prop_flat_map(|d| (1..d, any::<bool>()).prop_map(move |(n, neg)| q(if neg { -n } else { n }, d)))
}

/// Two maps on `[0, 1]`, the first strip starting at 0 and the second ending
/// at 1, covering the interval. Vertical coefficients are arbitrary.
pub fn two_map_system() -> impl Strategy<Value = IfsSystem<Rational>> {
    (
        ratio(9),
        ratio(9),
        ratio(7),
        ratio(7),
        small_rational(1, 6),
        small_rational(1, 6),
        small_rational(1, 6),
        small_rational(1, 6),
    )
        .prop_filter("strips cover [0, 1]", |(p1, p2, ..)| {
            (p1.abs() + p2.abs()).to_f64() >= 1.0
        })
        .prop_map(|(p1, p2, q1, q2, r1, r2, s1, s2)| {
            let h1 = if p1.is_negative() { -p1.clone() } else { q(0, 1) };
            let h2 = if p2.is_negative() { q(1, 1) } else { q(1, 1) - p2.clone() };
            IfsSystem::new(
                vec![Affine2::new(p1, q1, r1, h1, s1), Affine2::new(p2, q2, r2, h2, s2)],
                q(0, 1),
                q(1, 1),
            )
            .unwrap()
        })
}

pub fn check_coefficient_law((g1, g2): (Affine2<Rational>, Affine2<Rational>)) -> Result<(), String> {
    let c = g1.compose(&g2);
    if c.p != g1.p.clone() * g2.p.clone() || c.q != g1.q.clone() * g2.q.clone() {
        return Err(format!("{g1} ∘ {g2} = {c}"));
    }
    Ok(())
}

pub fn check_projection_homomorphism((g1, g2): (Affine2<Rational>, Affine2<Rational>)) -> Result<(), String> {
    let lhs = g1.compose(&g2).projection();
    let rhs = g1.projection().compose(&g2.projection());
    if lhs != rhs {
        return Err(format!("{lhs} != {rhs}"));
    }
    Ok(())
}

pub fn check_inverse(g: Affine2<Rational>) -> Result<(), String> {
    let inv = g.invert().map_err(|e| e.to_string())?;
    if !inv.compose(&g).is_identity() || !g.compose(&inv).is_identity() {
        return Err(format!("{g} has no two-sided inverse {inv}"));
    }
    Ok(())
}

pub fn check_associativity(
    (g1, g2, g3): (Affine2<Rational>, Affine2<Rational>, Affine2<Rational>),
) -> Result<(), String> {
    if g1.compose(&g2).compose(&g3) != g1.compose(&g2.compose(&g3)) {
        return Err(format!("{g1}, {g2}, {g3}"));
    }
    Ok(())
}

pub fn check_gap_monotone(sys: IfsSystem<Rational>) -> Result<(), String> {
    let v = wsp_check_1d(&sys, 5, 1e-3, &WspOptions::default()).map_err(|e| e.to_string())?;
    for w in v.gap_by_depth.windows(2) {
        if w[1].delta > w[0].delta {
            return Err(format!("δ* rose from {} to {} at depth {}", w[0].delta, w[1].delta, w[1].depth));
        }
    }
    Ok(())
}

/// Conjugating by `x ↦ λx + μ` leaves the gap profiles, coincidences and
/// statuses unchanged, and carries minimizers to conjugated minimizers.
pub fn check_conjugation_covariance(
    (sys, lambda, mu): (IfsSystem<Rational>, Rational, Rational),
) -> Result<(), String> {
    let conj = sys.conjugate_x(&lambda, &mu).map_err(|e| e.to_string())?;
    let opts = WspOptions::default();
    let e = |e: fif_core::FifError| e.to_string();
    let pairs = [
        (wsp_check_1d(&sys, 4, 1e-3, &opts).map_err(e)?, wsp_check_1d(&conj, 4, 1e-3, &opts).map_err(e)?),
        (wsp_check_2d(&sys, 3, 1e-3, &opts).map_err(e)?, wsp_check_2d(&conj, 3, 1e-3, &opts).map_err(e)?),
    ];
    for (a, b) in pairs {
        if a.status != b.status || a.coincidence_count != b.coincidence_count {
            return Err("status or coincidences differ".into());
        }
        for (ga, gb) in a.gap_by_depth.iter().zip(&b.gap_by_depth) {
            if ga.delta != gb.delta {
                return Err(format!("depth {}: {} vs {}", ga.depth, ga.delta, gb.delta));
            }
            if let Some(ma) = &ga.minimizer {
                let map2 = conjugate_map_x(&ma.map2, &lambda, &mu);
                let moved = FamilyElement {
                    map1: map2.projection(),
                    map2,
                    ..ma.clone()
                };
                if b.deviation(&moved) != a.deviation(ma) {
                    return Err(format!("depth {}: conjugated minimizer moved off the gap", ga.depth));
                }
            }
        }
    }
    Ok(())
}

/// Overlap abscissae of the four-map system (parameter `a`) and of the
/// mixed-ratio parabola, evaluated through both branches. Systems and
/// abscissae are rational: for `|a|` near 1 the function is barely Hölder, so
/// rounding the first pull-back alone can move `f` far beyond `tol`.
pub fn check_branch_independence((a, t, which): (i64, i64, bool)) -> Result<(), String> {
    let tol = 1e-9;
    let (sys, x, i, j) = if which {
        (examples::four_map(q(a, 20)).map_err(|e| e.to_string())?, q(7, 15) + q(t, 15_000), 2, 3)
    } else {
        (examples::mixed_ratio_parabola::<Rational>(), q(1, 3) + q(t, 6_000), 1, 2)
    };
    let yi = evaluate_f_via_branch(&sys, &x, i, tol).map_err(|e| e.to_string())?;
    let yj = evaluate_f_via_branch(&sys, &x, j, tol).map_err(|e| e.to_string())?;
    if (yi - yj).abs() > 2.0 * tol {
        return Err(format!("x = {x}: branch {i} gives {yi}, branch {j} gives {yj}"));
    }
    Ok(())
}

/// `(20a, 1000 t, system)` with `x` at fraction `t` across the overlap.
pub fn branch_inputs() -> impl Strategy<Value = (i64, i64, bool)> {
    (-19i64..=19, 0i64..=1000, any::<bool>())
}

pub fn conjugation_inputs() -> impl Strategy<Value = (IfsSystem<Rational>, Rational, Rational)> {
    (
        two_map_system(),
        small_rational(5, 7).prop_filter("positive", |l| l.is_positive()),
        small_rational(3, 5),
    )
}

/// Runs `check` on `cases` generated inputs; returns the first failure.
pub fn run_property<S, F>(cases: u32, strategy: S, check: F) -> Result<u32, String>
where
    S: Strategy,
    S::Value: Clone + std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), String>,
{
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, |v| check(v).map_err(TestCaseError::fail))
        .map(|_| cases)
        .map_err(|e| e.to_string())
}
