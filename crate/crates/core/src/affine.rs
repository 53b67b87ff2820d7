//! Lower-triangular affine maps of the plane and their projections.

use std::fmt;

use crate::error::{FifError, Result};
use crate::scalar::Scalar;

/// Line map `x ↦ p·x + h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine1<S> {
    pub p: S,
    pub h: S,
}

/// Plane map `(x, y) ↦ (p·x + h, q·y + r·x + s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine2<S> {
    pub p: S,
    pub q: S,
    pub r: S,
    pub h: S,
    pub s: S,
}

/// Where a line map fixes points.
#[derive(Clone, Debug, PartialEq)]
pub enum FixedPoint1d<S> {
    Point(S),
    /// pure nonzero translation
    AtInfinity,
    /// the identity
    Everywhere,
}

impl<S: Scalar> Affine1<S> {
    pub fn new(p: S, h: S) -> Self {
        Affine1 { p, h }
    }

    pub fn identity() -> Self {
        Affine1::new(S::one(), S::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.p.is_one() && self.h.is_zero()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Affine1<S>) -> Affine1<S> {
        Affine1 {
            p: self.p.clone() * other.p.clone(),
            h: self.p.clone() * other.h.clone() + self.h.clone(),
        }
    }

    pub fn invert(&self) -> Result<Affine1<S>> {
        if self.p.is_zero() {
            return Err(FifError::SingularMap);
        }
        let inv = self.p.recip();
        Ok(Affine1 {
            h: -(inv.clone() * self.h.clone()),
            p: inv,
        })
    }

    pub fn apply(&self, x: &S) -> S {
        self.p.clone() * x.clone() + self.h.clone()
    }

    pub fn fixed_point(&self) -> FixedPoint1d<S> {
        if self.p.is_one() {
            if self.h.is_zero() {
                FixedPoint1d::Everywhere
            } else {
                FixedPoint1d::AtInfinity
            }
        } else {
            FixedPoint1d::Point(self.h.clone() / (S::one() - self.p.clone()))
        }
    }

    pub fn to_f64(&self) -> Affine1<f64> {
        Affine1::new(self.p.to_f64(), self.h.to_f64())
    }

    pub fn key(&self) -> (S::Key, S::Key) {
        (self.p.key(), self.h.key())
    }
}

impl<S: Scalar> Affine2<S> {
    pub fn new(p: S, q: S, r: S, h: S, s: S) -> Self {
        Affine2 { p, q, r, h, s }
    }

    pub fn identity() -> Self {
        Affine2::new(S::one(), S::one(), S::zero(), S::zero(), S::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.p.is_one()
            && self.q.is_one()
            && self.r.is_zero()
            && self.h.is_zero()
            && self.s.is_zero()
    }

    /// `self ∘ other`: `other` is applied first.
    pub fn compose(&self, other: &Affine2<S>) -> Affine2<S> {
        let g1 = self;
        let g2 = other;
        Affine2 {
            p: g1.p.clone() * g2.p.clone(),
            q: g1.q.clone() * g2.q.clone(),
            r: g1.q.clone() * g2.r.clone() + g1.r.clone() * g2.p.clone(),
            h: g1.p.clone() * g2.h.clone() + g1.h.clone(),
            s: g1.q.clone() * g2.s.clone() + g1.r.clone() * g2.h.clone() + g1.s.clone(),
        }
    }

    pub fn invert(&self) -> Result<Affine2<S>> {
        if self.p.is_zero() || self.q.is_zero() {
            return Err(FifError::SingularMap);
        }
        // x = (x' - h)/p ;  y = (y' - r x - s)/q
        let ip = self.p.recip();
        let iq = self.q.recip();
        let r = -(self.r.clone() * ip.clone() * iq.clone());
        let h = -(self.h.clone() * ip.clone());
        let s = (self.r.clone() * self.h.clone() * ip.clone() - self.s.clone()) * iq.clone();
        Ok(Affine2 {
            p: ip,
            q: iq,
            r,
            h,
            s,
        })
    }

    pub fn apply(&self, point: &(S, S)) -> (S, S) {
        let (x, y) = point;
        (
            self.p.clone() * x.clone() + self.h.clone(),
            self.q.clone() * y.clone() + self.r.clone() * x.clone() + self.s.clone(),
        )
    }

    pub fn projection(&self) -> Affine1<S> {
        Affine1::new(self.p.clone(), self.h.clone())
    }

    /// The unique fixed point, when `p ≠ 1` and `q ≠ 1`.
    pub fn fixed_point(&self) -> Option<(S, S)> {
        if self.p.is_one() || self.q.is_one() {
            return None;
        }
        let x = self.h.clone() / (S::one() - self.p.clone());
        let y = (self.r.clone() * x.clone() + self.s.clone()) / (S::one() - self.q.clone());
        Some((x, y))
    }

    pub fn to_f64(&self) -> Affine2<f64> {
        Affine2::new(
            self.p.to_f64(),
            self.q.to_f64(),
            self.r.to_f64(),
            self.h.to_f64(),
            self.s.to_f64(),
        )
    }

    pub fn key(&self) -> [S::Key; 5] {
        [
            self.p.key(),
            self.q.key(),
            self.r.key(),
            self.h.key(),
            self.s.key(),
        ]
    }

    pub fn coefficients(&self) -> [&S; 5] {
        [&self.p, &self.q, &self.r, &self.h, &self.s]
    }
}

impl<S: Scalar> fmt::Display for Affine2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(p={}, q={}, r={}, h={}, s={})",
            self.p, self.q, self.r, self.h, self.s
        )
    }
}

impl<S: Scalar> fmt::Display for Affine1<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, h={})", self.p, self.h)
    }
}

/// Sequence of 1-based generator indices. `[i1, ..., ik]` denotes `S_i1 ∘ ... ∘ S_ik`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn extended(&self, index: usize) -> Word {
        let mut v = self.0.clone();
        v.push(index);
        Word(v)
    }

    /// Parses `"2,4"`; the empty string is the empty word.
    pub fn parse(text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Word::empty());
        }
        text.split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| FifError::Parse {
                    line: 0,
                    message: format!("bad word index {t:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}
