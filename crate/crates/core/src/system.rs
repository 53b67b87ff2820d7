use std::cmp::Ordering;

use crate::affine::{Affine1, Affine2, Word};
use crate::error::{FifError, Result};
use crate::scalar::Scalar;

/// Ordered list of generators together with the base interval `[a, b]`.
///
/// The constructor only checks structure (at least one map, `a < b`).
/// Contraction, covering and the graph property are certified by
/// [`crate::attractor::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct IfsSystem<S> {
    maps: Vec<Affine2<S>>,
    a: S,
    b: S,
}

impl<S: Scalar> IfsSystem<S> {
    pub fn new(maps: Vec<Affine2<S>>, a: S, b: S) -> Result<Self> {
        if maps.is_empty() {
            return Err(FifError::InvalidArgument("system has no maps".into()));
        }
        if a.total_cmp(&b) != Ordering::Less {
            return Err(FifError::InvalidArgument(format!(
                "interval needs a < b, got [{a}, {b}]"
            )));
        }
        Ok(IfsSystem { maps, a, b })
    }

    pub fn maps(&self) -> &[Affine2<S>] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Generator `i`, 1-based.
    pub fn map(&self, i: usize) -> Result<&Affine2<S>> {
        if i == 0 || i > self.maps.len() {
            return Err(FifError::IndexOutOfRange {
                index: i,
                count: self.maps.len(),
            });
        }
        Ok(&self.maps[i - 1])
    }

    pub fn a(&self) -> &S {
        &self.a
    }

    pub fn b(&self) -> &S {
        &self.b
    }

    pub fn width(&self) -> S {
        self.b.clone() - self.a.clone()
    }

    pub fn contains(&self, x: &S) -> bool {
        x.total_cmp(&self.a) != Ordering::Less && x.total_cmp(&self.b) != Ordering::Greater
    }

    pub fn projections(&self) -> Vec<Affine1<S>> {
        self.maps.iter().map(Affine2::projection).collect()
    }

    /// Image interval `S_i◇([a, b])` of generator `i` (1-based), ordered.
    pub fn strip(&self, i: usize) -> Result<(S, S)> {
        let g = self.map(i)?.projection();
        let u = g.apply(&self.a);
        let v = g.apply(&self.b);
        Ok(if u.total_cmp(&v) == Ordering::Greater {
            (v, u)
        } else {
            (u, v)
        })
    }

    pub fn strips(&self) -> Vec<(S, S)> {
        (1..=self.len()).map(|i| self.strip(i).unwrap()).collect()
    }

    /// `S_i1 ∘ ... ∘ S_ik`; the empty word gives the identity.
    pub fn compose_word(&self, w: &Word) -> Result<Affine2<S>> {
        let mut g = Affine2::identity();
        for &i in w.indices() {
            g = g.compose(self.map(i)?);
        }
        Ok(g)
    }

    pub fn compose_word_1d(&self, w: &Word) -> Result<Affine1<S>> {
        let mut g = Affine1::identity();
        for &i in w.indices() {
            g = g.compose(&self.map(i)?.projection());
        }
        Ok(g)
    }

    pub fn max_abs_p(&self) -> f64 {
        self.maps
            .iter()
            .map(|g| g.p.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_q(&self) -> f64 {
        self.maps
            .iter()
            .map(|g| g.q.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Floating copy of the system.
    pub fn to_f64(&self) -> IfsSystem<f64> {
        IfsSystem {
            maps: self.maps.iter().map(Affine2::to_f64).collect(),
            a: self.a.to_f64(),
            b: self.b.to_f64(),
        }
    }

    /// Conjugates by `x ↦ λx + μ` (with `y` unchanged), mapping `[a, b]` to
    /// `[λa + μ, λb + μ]`. Requires `λ > 0`.
    pub fn conjugate_x(&self, lambda: &S, mu: &S) -> Result<IfsSystem<S>> {
        if !lambda.is_positive() {
            return Err(FifError::InvalidArgument("conjugation needs λ > 0".into()));
        }
        let maps = self
            .maps
            .iter()
            .map(|g| conjugate_map_x(g, lambda, mu))
            .collect();
        IfsSystem::new(
            maps,
            lambda.clone() * self.a.clone() + mu.clone(),
            lambda.clone() * self.b.clone() + mu.clone(),
        )
    }
}

/// `Φ ∘ g ∘ Φ⁻¹` for `Φ(x, y) = (λx + μ, y)`.
pub fn conjugate_map_x<S: Scalar>(g: &Affine2<S>, lambda: &S, mu: &S) -> Affine2<S> {
    let r = g.r.clone() / lambda.clone();
    Affine2 {
        p: g.p.clone(),
        q: g.q.clone(),
        h: lambda.clone() * g.h.clone() + mu.clone() - g.p.clone() * mu.clone(),
        s: g.s.clone() - r.clone() * mu.clone(),
        r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::scalar::Rational;

    #[test]
    fn empty_word_is_identity() {
        let sys = examples::four_map(Rational::new(1, 5)).unwrap();
        assert!(sys.compose_word(&Word::empty()).unwrap().is_identity());
        assert!(sys.compose_word_1d(&Word::empty()).unwrap().is_identity());
    }

    #[test]
    fn index_out_of_range() {
        let sys = examples::dyadic_parabola::<Rational>();
        assert_eq!(
            sys.compose_word(&Word(vec![1, 3])),
            Err(FifError::IndexOutOfRange { index: 3, count: 2 })
        );
        assert!(sys.compose_word(&Word(vec![0])).is_err());
    }

    #[test]
    fn rejects_bad_structure() {
        assert!(IfsSystem::<f64>::new(vec![], 0.0, 1.0).is_err());
        assert!(IfsSystem::new(vec![Affine2::identity()], 1.0, 1.0).is_err());
    }

    #[test]
    fn conjugation_moves_the_graph() {
        let sys = examples::dyadic_parabola::<Rational>();
        let lam = Rational::new(3, 1);
        let mu = Rational::new(-1, 2);
        let conj = sys.conjugate_x(&lam, &mu).unwrap();
        assert_eq!(conj.a(), &Rational::new(-1, 2));
        assert_eq!(conj.b(), &Rational::new(5, 2));
        // (x, x²) on the old graph corresponds to (3x - 1/2, x²) on the new one
        for (i, g) in sys.maps().iter().enumerate() {
            let x = Rational::new(2, 7);
            let (u, v) = g.apply(&(x.clone(), x.clone() * x.clone()));
            let (u2, v2) = conj.maps()[i].apply(&(
                lam.clone() * x.clone() + mu.clone(),
                x.clone() * x.clone(),
            ));
            assert_eq!(u2, lam.clone() * u + mu.clone());
            assert_eq!(v2, v);
        }
    }
}
