//! Bundled systems used throughout tests, benchmarks and the CLI.

use std::cmp::Ordering;

use crate::affine::Affine2;
use crate::error::{FifError, Result};
use crate::scalar::Scalar;
use crate::system::IfsSystem;

/// Default value of the free vertical scaling of the four-map system.
pub fn four_map_default_param<S: Scalar>() -> S {
    S::from_ratio(1, 5)
}

/// The four-map system on `[0, 1]` whose pieces `S_2(Γ)` and `S_3(Γ)`
/// overlap over `[7/15, 8/15]`. `a` is the vertical scaling of the outer
/// maps and must satisfy `|a| < 1`.
pub fn four_map<S: Scalar>(a: S) -> Result<IfsSystem<S>> {
    if a.abs().total_cmp(&S::one()) != Ordering::Less {
        return Err(FifError::InvalidArgument(format!(
            "vertical scaling must satisfy |a| < 1, got {a}"
        )));
    }
    let f = S::from_ratio;
    let z = S::zero;
    let maps = vec![
        Affine2::new(f(1, 5), a.clone(), f(1, 5), z(), z()),
        Affine2::new(f(1, 3), f(-1, 5), f(-1, 5), f(1, 5), f(1, 5)),
        Affine2::new(f(1, 3), f(-1, 5), f(1, 5), f(7, 15), z()),
        Affine2::new(f(1, 5), a, f(-1, 5), f(4, 5), f(1, 5)),
    ];
    IfsSystem::new(maps, z(), S::one())
}

/// Two maps of ratio 1/2 whose attractor is the arc `y = x²` on `[0, 1]`.
pub fn dyadic_parabola<S: Scalar>() -> IfsSystem<S> {
    let f = S::from_ratio;
    let z = S::zero;
    IfsSystem::new(
        vec![
            Affine2::new(f(1, 2), f(1, 4), z(), z(), z()),
            Affine2::new(f(1, 2), f(1, 4), f(1, 2), f(1, 2), f(1, 4)),
        ],
        z(),
        S::one(),
    )
    .expect("well-formed")
}

/// Ratios 1/2 and 2/3 with overlapping strips; attractor is again `y = x²`.
pub fn mixed_ratio_parabola<S: Scalar>() -> IfsSystem<S> {
    let f = S::from_ratio;
    let z = S::zero;
    IfsSystem::new(
        vec![
            Affine2::new(f(1, 2), f(1, 4), z(), z(), z()),
            Affine2::new(f(2, 3), f(4, 9), f(4, 9), f(1, 3), f(1, 9)),
        ],
        z(),
        S::one(),
    )
    .expect("well-formed")
}

/// Two halves of the diagonal `y = x` on `[0, 1]`.
pub fn straight_line<S: Scalar>() -> IfsSystem<S> {
    let f = S::from_ratio;
    let z = S::zero;
    IfsSystem::new(
        vec![
            Affine2::new(f(1, 2), f(1, 2), z(), z(), z()),
            Affine2::new(f(1, 2), f(1, 2), z(), f(1, 2), f(1, 2)),
        ],
        z(),
        S::one(),
    )
    .expect("well-formed")
}

/// Horizontal segment `y = 0` on `[0, 1]`.
pub fn flat_line<S: Scalar>() -> IfsSystem<S> {
    let f = S::from_ratio;
    let z = S::zero;
    IfsSystem::new(
        vec![
            Affine2::new(f(1, 2), f(1, 2), z(), z(), z()),
            Affine2::new(f(1, 2), f(1, 2), z(), f(1, 2), z()),
        ],
        z(),
        S::one(),
    )
    .expect("well-formed")
}

/// Looks a bundled system up by name.
pub fn by_name<S: Scalar>(name: &str) -> Option<IfsSystem<S>> {
    match name {
        "four-map" => four_map(four_map_default_param()).ok(),
        "dyadic-parabola" => Some(dyadic_parabola()),
        "mixed-ratio-parabola" => Some(mixed_ratio_parabola()),
        "straight-line" => Some(straight_line()),
        "flat-line" => Some(flat_line()),
        _ => None,
    }
}

pub const NAMES: [&str; 5] = [
    "four-map",
    "dyadic-parabola",
    "mixed-ratio-parabola",
    "straight-line",
    "flat-line",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::Word;
    use crate::scalar::Rational;

    #[test]
    fn overlap_identity_holds_exactly() {
        for a in [Rational::new(1, 5), Rational::new(1, 3), Rational::new(-1, 4)] {
            let sys = four_map(a.clone()).unwrap();
            let lhs = sys.compose_word(&Word(vec![2, 4])).unwrap();
            let rhs = sys.compose_word(&Word(vec![3, 1])).unwrap();
            assert_eq!(lhs, rhs);
            let f = Rational::new;
            assert_eq!(
                lhs,
                Affine2::new(f(1, 15), -(a / f(5, 1)), f(0, 1), f(7, 15), f(0, 1))
            );
        }
    }

    #[test]
    fn apply_then_apply_matches_composition() {
        let sys = four_map(Rational::new(1, 5)).unwrap();
        let s2 = sys.map(2).unwrap();
        let s4 = sys.map(4).unwrap();
        let p = (Rational::new(1, 1), Rational::new(0, 1));
        let after_s4 = s4.apply(&p);
        assert_eq!(after_s4, (Rational::new(1, 1), Rational::new(0, 1)));
        let twice = s2.apply(&after_s4);
        assert_eq!(twice, s2.compose(s4).apply(&p));
        assert_eq!(twice, (Rational::new(8, 15), Rational::new(0, 1)));
    }

    #[test]
    fn parameter_must_be_contractive() {
        assert!(four_map(Rational::new(1, 1)).is_err());
        assert!(four_map(Rational::new(-6, 5)).is_err());
        assert!(four_map(0.99f64).is_ok());
    }

    #[test]
    fn parabola_systems_map_the_arc_to_itself() {
        for sys in [dyadic_parabola::<Rational>(), mixed_ratio_parabola()] {
            for g in sys.maps() {
                for k in 0..=10 {
                    let x = Rational::new(k, 10);
                    let (u, v) = g.apply(&(x.clone(), x.clone() * x));
                    assert_eq!(v, u.clone() * u);
                }
            }
        }
    }
}
