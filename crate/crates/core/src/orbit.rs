//! Orbits of family elements along the graph: ε-nets and the closed-form
//! curves through `g^n(x0, y0)`.

use std::cmp::Ordering;
use std::fmt;

use crate::affine::{Affine2, FixedPoint1d};
use crate::attractor::{graph_point, modulus_with_sample, GraphSample};
use crate::error::{FifError, Result};
use crate::scalar::Scalar;
use crate::system::IfsSystem;

/// Iterations allowed before an orbit is declared too slow to cross the interval.
pub const MAX_ORBIT_STEPS: usize = 10_000_000;

/// Floating-mode threshold for treating `p`, `q` or `p − q` as exact.
pub const FLOAT_CASE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Right,
    Left,
}

/// `g^n(origin)` for `n = 0..=crossing`.
#[derive(Clone, Debug)]
pub struct OrbitTrace<S> {
    pub g: Affine2<S>,
    pub origin: (S, S),
    pub points: Vec<(S, S)>,
    /// First `n` whose abscissa reaches the far end of the interval.
    pub crossing: usize,
    pub direction: Direction,
    /// `eps` the net was certified for (zero for bare iteration).
    pub eps: f64,
    /// Modulus of continuity used for the step condition.
    pub delta: f64,
    /// Largest distance from a certification sample point to the orbit.
    pub covering_distance: f64,
}

impl<S: Scalar> OrbitTrace<S> {
    /// Bare orbit of `steps` iterates, without any net certification.
    pub fn iterate(g: &Affine2<S>, origin: (S, S), steps: usize) -> Self {
        let mut points = Vec::with_capacity(steps + 1);
        points.push(origin.clone());
        for n in 0..steps {
            let next = g.apply(&points[n]);
            points.push(next);
        }
        let direction = if g.projection().apply(&origin.0).total_cmp(&origin.0) == Ordering::Less {
            Direction::Left
        } else {
            Direction::Right
        };
        OrbitTrace {
            g: g.clone(),
            origin,
            points,
            crossing: steps,
            direction,
            eps: 0.0,
            delta: 0.0,
            covering_distance: f64::INFINITY,
        }
    }

    /// Iterates while the abscissa stays in `[lo, hi]`, at most `max_steps` times.
    pub fn within(g: &Affine2<S>, origin: (S, S), interval: (&S, &S), max_steps: usize) -> Self {
        let inside = |x: &S| x.total_cmp(interval.0) != Ordering::Less && x.total_cmp(interval.1) != Ordering::Greater;
        let mut steps = 0;
        let mut cur = origin.clone();
        while steps < max_steps {
            let next = g.apply(&cur);
            if !inside(&next.0) {
                break;
            }
            cur = next;
            steps += 1;
        }
        OrbitTrace::iterate(g, origin, steps)
    }

    pub fn points_f64(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|(x, y)| (x.to_f64(), y.to_f64()))
            .collect()
    }

    /// Largest distance from a point of `sample` to its nearest orbit point.
    pub fn distance_to(&self, sample: &GraphSample<f64>) -> f64 {
        net_distance(&self.points_f64(), &sample.points)
    }
}

/// `max_s min_o ‖s − o‖` for orbit points `net` sorted monotonically in `x`.
pub fn net_distance(net: &[(f64, f64)], sample: &[(f64, f64)]) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    if net.is_empty() {
        return f64::INFINITY;
    }
    let mut sorted: Vec<(f64, f64)> = net.to_vec();
    sorted.sort_by(|u, v| u.0.total_cmp(&v.0));
    let mut worst = 0.0f64;
    for &(x, y) in sample {
        let k = sorted.partition_point(|p| p.0 < x);
        let mut best = f64::INFINITY;
        for j in (0..k).rev() {
            let dx = x - sorted[j].0;
            if dx >= best {
                break;
            }
            best = best.min(dx.hypot(y - sorted[j].1));
        }
        for p in &sorted[k..] {
            let dx = p.0 - x;
            if dx >= best {
                break;
            }
            best = best.min(dx.hypot(y - p.1));
        }
        worst = worst.max(best);
    }
    worst
}

fn direction_of<S: Scalar>(g: &Affine2<S>, a: &S, b: &S) -> Result<Direction> {
    let g1 = g.projection();
    match g1.fixed_point() {
        FixedPoint1d::Everywhere => return Err(FifError::FixedPointInside),
        FixedPoint1d::Point(c) => {
            if c.total_cmp(a) != Ordering::Less && c.total_cmp(b) != Ordering::Greater {
                return Err(FifError::FixedPointInside);
            }
        }
        FixedPoint1d::AtInfinity => {}
    }
    Ok(if g1.apply(a).total_cmp(a) == Ordering::Greater {
        Direction::Right
    } else {
        Direction::Left
    })
}

/// Largest step `‖g(x, y) − (x, y)‖` over the sample.
pub fn max_step<S: Scalar>(g: &Affine2<S>, sample: &GraphSample<f64>) -> f64 {
    let g = g.to_f64();
    sample
        .points
        .iter()
        .map(|p| {
            let (u, v) = g.apply(p);
            (u - p.0).hypot(v - p.1)
        })
        .fold(0.0, f64::max)
}

/// The orbit of the graph's end point under `g` as an `eps`-net of the graph.
///
/// The orbit starts at `(a, f(a))` when `g◇` moves right and at `(b, f(b))`
/// otherwise, and stops at the first iterate reaching the far end point. The
/// net is certified on the dense sample used for the modulus of continuity.
pub fn epsilon_net<S: Scalar>(sys: &IfsSystem<S>, g: &Affine2<S>, eps: f64) -> Result<OrbitTrace<S>> {
    let direction = direction_of(g, sys.a(), sys.b())?;
    let (delta, sample) = modulus_with_sample(sys, eps)?;
    let step = max_step(g, &sample);
    if !(step < delta) {
        return Err(FifError::StepTooLarge { step, delta });
    }
    let (start, far) = match direction {
        Direction::Right => (sys.a(), sys.b()),
        Direction::Left => (sys.b(), sys.a()),
    };
    let (origin, _) = graph_point(sys, start)?;
    let reached = |x: &S| match direction {
        Direction::Right => x.total_cmp(far) != Ordering::Less,
        Direction::Left => x.total_cmp(far) != Ordering::Greater,
    };
    let mut points = vec![origin.clone()];
    while !reached(&points[points.len() - 1].0) {
        if points.len() > MAX_ORBIT_STEPS {
            return Err(FifError::StepTooLarge { step, delta });
        }
        let next = g.apply(&points[points.len() - 1]);
        points.push(next);
    }
    let mut trace = OrbitTrace {
        g: g.clone(),
        origin,
        crossing: points.len() - 1,
        points,
        direction,
        eps,
        delta,
        covering_distance: 0.0,
    };
    trace.covering_distance = trace.distance_to(&sample);
    if trace.covering_distance > eps {
        return Err(FifError::NotAnEpsilonNet {
            distance: trace.covering_distance,
            eps,
        });
    }
    Ok(trace)
}

/// Smallest `eps` on the grid `4·step·1.5^k` for which [`epsilon_net`] succeeds.
pub fn epsilon_net_auto<S: Scalar>(sys: &IfsSystem<S>, g: &Affine2<S>) -> Result<OrbitTrace<S>> {
    direction_of(g, sys.a(), sys.b())?;
    let (_, sample) = modulus_with_sample(sys, sys.width().to_f64())?;
    let mut eps = 4.0 * max_step(g, &sample);
    if !(eps > 0.0) {
        return Err(FifError::FixedPointInside);
    }
    let mut last = None;
    for _ in 0..40 {
        match epsilon_net(sys, g, eps) {
            Ok(trace) => return Ok(trace),
            Err(e @ (FifError::StepTooLarge { .. }
            | FifError::NotAnEpsilonNet { .. }
            | FifError::ResolutionInsufficient { .. })) => last = Some(e),
            Err(e) => return Err(e),
        }
        eps *= 1.5;
    }
    Err(last.expect("at least one attempt"))
}

/// The five closed-form orbit curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// `Y = A X² + B X`
    Parabola,
    /// `Y = A X + B (e^{K X} − 1)`
    ExpLinear,
    /// `Y = A X + B log(1 + X/C)`
    LogLinear,
    /// `Y = A X + B ((1 + X/C)^K − 1)`
    PowerLinear,
    /// `Y = A (1 + X/C) log(1 + X/C) + B X`
    XLogX,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CurveKind::Parabola => "parabola",
            CurveKind::ExpLinear => "exp-linear",
            CurveKind::LogLinear => "log-linear",
            CurveKind::PowerLinear => "power-linear",
            CurveKind::XLogX => "x-log-x",
        };
        f.write_str(s)
    }
}

/// Curve through the orbit of `origin` under `g`, in the frame
/// `X = (x − x0)/L`, `Y = y − y0` with `L = b − a`. Coefficients `A, B, C, K`
/// refer to that frame; [`CurveModel::statement_form`] gives the curve in the
/// original coordinates.
#[derive(Clone, Debug)]
pub struct CurveModel<S> {
    pub kind: CurveKind,
    pub origin: (S, S),
    pub scale: S,
    pub domain: (S, S),
    /// `g` in the normalized frame.
    pub normalized: Affine2<S>,
    pub a: f64,
    pub b: f64,
    pub c: Option<f64>,
    pub k: Option<f64>,
    /// Exact `(A, B)` of a parabola.
    pub exact_parabola: Option<(S, S)>,
    /// Set in floating mode when the case was decided by a threshold.
    pub near_case_boundary: bool,
}

/// `(e^z − 1 − z)/z²`, accurate near zero.
fn expm1_excess(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        let mut term = 0.5;
        let mut sum = 0.0;
        for n in 3..12 {
            sum += term;
            term *= z / n as f64;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// `(log(1 + e) − e)/e²`, accurate near zero.
fn ln1p_excess(e: f64) -> f64 {
    if e.abs() < 1e-2 {
        let mut sum = 0.0;
        let mut pow = 1.0;
        for n in 2..14 {
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            sum += sign * pow / n as f64;
            pow *= e;
        }
        sum
    } else {
        (e.ln_1p() - e) / (e * e)
    }
}

impl<S: Scalar> CurveModel<S> {
    /// `Y` at normalized abscissa `X`.
    pub fn eval_normalized(&self, x: f64) -> f64 {
        let g = self.normalized.to_f64();
        match self.kind {
            CurveKind::Parabola => self.a * x * x + self.b * x,
            CurveKind::ExpLinear => {
                // A X + B(e^{KX} − 1) regrouped so that q → 1 does not cancel
                let e = g.q - 1.0;
                let z = self.k.unwrap() * x;
                let bracket = g.h * z * z * expm1_excess(z) / e + x * e * ln1p_excess(e);
                g.r / e * bracket + g.s * z.exp_m1() / e
            }
            CurveKind::LogLinear => {
                let c = self.c.unwrap();
                self.a * x + self.b * (x / c).ln_1p()
            }
            CurveKind::PowerLinear => {
                let c = self.c.unwrap();
                let k = self.k.unwrap();
                self.a * x + self.b * (k * (x / c).ln_1p()).exp_m1()
            }
            CurveKind::XLogX => {
                let c = self.c.unwrap();
                let t = x / c;
                self.a * (1.0 + t) * t.ln_1p() + self.b * x
            }
        }
    }

    /// `y` at abscissa `x` in the original frame.
    pub fn eval(&self, x: f64) -> f64 {
        let big_x = (x - self.origin.0.to_f64()) / self.scale.to_f64();
        self.origin.1.to_f64() + self.eval_normalized(big_x)
    }

    /// Exact value for a parabola with rational coefficients.
    pub fn eval_exact(&self, x: &S) -> Option<S> {
        let (a, b) = self.exact_parabola.as_ref()?;
        let big_x = (x.clone() - self.origin.0.clone()) / self.scale.clone();
        Some(self.origin.1.clone() + a.clone() * big_x.clone() * big_x.clone() + b.clone() * big_x)
    }

    /// Singular abscissa `x0 − L·C` of the logarithmic and power curves; it is
    /// the fixed point of `g◇` and lies outside the interval.
    pub fn singularity(&self) -> Option<f64> {
        self.c.map(|c| self.origin.0.to_f64() - self.scale.to_f64() * c)
    }

    /// The curve written in the original coordinates.
    pub fn statement_form(&self) -> String {
        let x0 = self.origin.0.to_f64();
        let y0 = self.origin.1.to_f64();
        let l = self.scale.to_f64();
        match self.kind {
            CurveKind::Parabola => {
                let a2 = self.a / (l * l);
                let b1 = self.b / l - 2.0 * self.a * x0 / (l * l);
                let c0 = y0 + self.a * x0 * x0 / (l * l) - self.b * x0 / l;
                format!("y = {a2:?}*x^2 + {b1:?}*x + {c0:?}")
            }
            CurveKind::ExpLinear => {
                let k = self.k.unwrap() / l;
                let a1 = self.a / l;
                let bexp = self.b * (-k * x0).exp();
                let c0 = y0 - self.a * x0 / l - self.b;
                format!("y = {a1:?}*x + {bexp:?}*exp({k:?}*x) + {c0:?}")
            }
            CurveKind::LogLinear => {
                let cs = self.singularity().unwrap();
                let lc = l * self.c.unwrap();
                let a1 = self.a / l;
                let d0 = y0 - self.a * x0 / l - self.b * lc.abs().ln();
                format!("y = {a1:?}*x + {:?}*log(|x - {cs:?}|) + {d0:?}", self.b)
            }
            CurveKind::PowerLinear => {
                let cs = self.singularity().unwrap();
                let lc = l * self.c.unwrap();
                let k = self.k.unwrap();
                let a1 = self.a / l;
                let bk = self.b / lc.abs().powf(k);
                let d0 = y0 - self.a * x0 / l - self.b;
                format!("y = {a1:?}*x + {bk:?}*|x - {cs:?}|^{k:?} + {d0:?}")
            }
            CurveKind::XLogX => {
                let cs = self.singularity().unwrap();
                let lc = l * self.c.unwrap();
                let a1 = self.a / lc;
                let d1 = -a1 * lc.abs().ln() + self.b / l;
                let e0 = y0 + a1 * lc.abs().ln() * cs - self.b * x0 / l;
                format!("y = {a1:?}*(x - {cs:?})*log(|x - {cs:?}|) + {d1:?}*x + {e0:?}")
            }
        }
    }
}

enum Eq1 {
    Exact(bool),
    Near(bool),
}

fn is_one<S: Scalar>(v: &S) -> Eq1 {
    if S::EXACT {
        Eq1::Exact(v.is_one())
    } else {
        Eq1::Near((v.to_f64() - 1.0).abs() < FLOAT_CASE_EPS)
    }
}

fn equal<S: Scalar>(u: &S, v: &S) -> Eq1 {
    if S::EXACT {
        Eq1::Exact(u == v)
    } else {
        Eq1::Near((u.to_f64() - v.to_f64()).abs() < FLOAT_CASE_EPS)
    }
}

fn nonzero(v: f64, what: &'static str) -> Result<f64> {
    if v == 0.0 || !v.is_finite() {
        Err(FifError::DegenerateDenominator(what))
    } else {
        Ok(v)
    }
}

/// Conjugates `g` into the frame `X = (x − x0)/L`, `Y = y − y0`.
pub fn normalize_map<S: Scalar>(g: &Affine2<S>, origin: &(S, S), scale: &S) -> Affine2<S> {
    let (x0, y0) = origin;
    Affine2 {
        p: g.p.clone(),
        q: g.q.clone(),
        r: g.r.clone() * scale.clone(),
        h: (g.p.clone() * x0.clone() + g.h.clone() - x0.clone()) / scale.clone(),
        s: (g.q.clone() - S::one()) * y0.clone() + g.r.clone() * x0.clone() + g.s.clone(),
    }
}

/// Identifies which of the five curves carries the orbit of `origin` under
/// `g` and computes its coefficients.
pub fn classify_orbit_curve<S: Scalar>(
    g: &Affine2<S>,
    origin: (S, S),
    interval: (S, S),
) -> Result<CurveModel<S>> {
    let (lo, hi) = interval;
    if lo.total_cmp(&hi) != Ordering::Less {
        return Err(FifError::InvalidArgument("interval needs a < b".into()));
    }
    direction_of(g, &lo, &hi)?;
    if !g.p.is_positive() || !g.q.is_positive() {
        return Err(FifError::NonpositiveRatio);
    }
    let scale = hi.clone() - lo.clone();
    let n = normalize_map(g, &origin, &scale);
    let (p1, q1, pq) = (is_one(&n.p), is_one(&n.q), equal(&n.p, &n.q));
    let near = matches!(p1, Eq1::Near(true)) || matches!(q1, Eq1::Near(true)) || matches!(pq, Eq1::Near(true));
    let flag = |e: &Eq1| matches!(e, Eq1::Exact(true) | Eq1::Near(true));
    let nf = n.to_f64();
    let (p, q, r, h, s) = (nf.p, nf.q, nf.r, nf.h, nf.s);

    let mut model = CurveModel {
        kind: CurveKind::Parabola,
        origin,
        scale,
        domain: (lo, hi),
        normalized: n.clone(),
        a: 0.0,
        b: 0.0,
        c: None,
        k: None,
        exact_parabola: None,
        near_case_boundary: near,
    };
    match (flag(&p1), flag(&q1)) {
        (true, true) => {
            if n.h.is_zero() {
                return Err(FifError::DegenerateDenominator("2h"));
            }
            let two_h = S::from_i64(2) * n.h.clone();
            let a = n.r.clone() / two_h.clone();
            let b = (S::from_i64(2) * n.s.clone() - n.h.clone() * n.r.clone()) / two_h;
            model.a = a.to_f64();
            model.b = b.to_f64();
            if S::EXACT {
                model.exact_parabola = Some((a, b));
            }
        }
        (true, false) => {
            model.kind = CurveKind::ExpLinear;
            let e = nonzero(q - 1.0, "q - 1")?;
            model.k = Some(q.ln() / nonzero(h, "h")?);
            model.a = r / (1.0 - q);
            model.b = (h * r + e * s) / (e * e);
        }
        (false, true) => {
            model.kind = CurveKind::LogLinear;
            let pm = nonzero(p - 1.0, "p - 1")?;
            model.c = Some(h / pm);
            model.a = r / pm;
            model.b = (h * r + (1.0 - p) * s) / nonzero((1.0 - p) * p.ln(), "(1 - p) log p")?;
        }
        (false, false) if !flag(&pq) => {
            model.kind = CurveKind::PowerLinear;
            let pm = nonzero(p - 1.0, "p - 1")?;
            let d = nonzero(p - q, "p - q")?;
            model.c = Some(h / pm);
            model.a = r / d;
            model.b = (h * r + s * (q - p)) / nonzero((q - 1.0) * (q - p), "(q - 1)(q - p)")?;
            model.k = Some(q.ln() / nonzero(p.ln(), "log p")?);
        }
        (false, false) => {
            model.kind = CurveKind::XLogX;
            let pm = nonzero(p - 1.0, "p - 1")?;
            let c = h / pm;
            model.c = Some(c);
            model.a = r * c / nonzero(p * p.ln(), "p log p")?;
            model.b = (c * r - s) / nonzero(c - c * p, "C - Cp")?;
        }
    }
    Ok(model)
}

/// Largest `|y_n − model(x_n)|` over the trace; exact for rational parabolas.
pub fn verify_orbit_on_curve<S: Scalar>(trace: &OrbitTrace<S>, model: &CurveModel<S>) -> f64 {
    if model.exact_parabola.is_some() {
        let mut worst = S::zero();
        for (x, y) in &trace.points {
            let v = model.eval_exact(x).expect("exact parabola");
            worst = worst.max_of((v - y.clone()).abs());
        }
        return worst.to_f64();
    }
    trace
        .points
        .iter()
        .map(|(x, y)| (model.eval(x.to_f64()) - y.to_f64()).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn zero() -> (Rational, Rational) {
        (q(0, 1), q(0, 1))
    }

    #[test]
    fn translation_parabola() {
        let g = Affine2::new(q(1, 1), q(1, 1), q(1, 1), q(1, 2), q(1, 4));
        let m = classify_orbit_curve(&g, zero(), (q(0, 1), q(1, 1))).unwrap();
        assert_eq!(m.kind, CurveKind::Parabola);
        assert_eq!(m.exact_parabola, Some((q(1, 1), q(0, 1))));
        let trace = OrbitTrace::iterate(&g, zero(), 2);
        assert_eq!(trace.points, vec![zero(), (q(1, 2), q(1, 4)), (q(1, 1), q(1, 1))]);
        assert_eq!(verify_orbit_on_curve(&trace, &m), 0.0);
    }

    #[test]
    fn halving_exp_linear() {
        let g = Affine2::new(q(1, 1), q(1, 2), q(0, 1), q(1, 1), q(1, 1));
        let m = classify_orbit_curve(&g, zero(), (q(0, 1), q(2, 1))).unwrap();
        assert_eq!(m.kind, CurveKind::ExpLinear);
        assert_eq!(m.a, 0.0);
        assert_eq!(m.b, -2.0);
        // K in the original frame
        let k = m.k.unwrap() / m.scale.to_f64();
        assert!((k + 2f64.ln()).abs() < 1e-15);
        let trace = OrbitTrace::iterate(&g, zero(), 2);
        assert_eq!(trace.points[2], (q(2, 1), q(3, 2)));
        assert!(verify_orbit_on_curve(&trace, &m) < 1e-14);
        for x in [0.25, 0.5, 1.5] {
            assert!((m.eval(x) - (2.0 - 2f64.powf(1.0 - x))).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_and_inner_fixed_point_are_rejected() {
        let i = (q(0, 1), q(1, 1));
        assert_eq!(
            classify_orbit_curve(&Affine2::identity(), zero(), i.clone()).unwrap_err(),
            FifError::FixedPointInside
        );
        let g = Affine2::new(q(1, 2), q(1, 1), q(0, 1), q(1, 4), q(0, 1));
        assert_eq!(
            classify_orbit_curve(&g, zero(), i.clone()).unwrap_err(),
            FifError::FixedPointInside
        );
        let g = Affine2::new(q(-2, 1), q(1, 1), q(0, 1), q(4, 1), q(0, 1));
        assert!(classify_orbit_curve(&g, zero(), i).is_err());
    }

    #[test]
    fn nonpositive_ratio() {
        let g = Affine2::new(q(1, 1), q(-1, 2), q(0, 1), q(1, 4), q(0, 1));
        assert_eq!(
            classify_orbit_curve(&g, zero(), (q(0, 1), q(1, 1))).unwrap_err(),
            FifError::NonpositiveRatio
        );
    }

    #[test]
    fn perturbed_model_is_detected() {
        let g = Affine2::new(1.0, 1.0, 1.0, 0.5, 0.25);
        let mut m = classify_orbit_curve(&g, (0.0, 0.0), (0.0, 1.0)).unwrap();
        let trace = OrbitTrace::iterate(&g, (0.0, 0.0), 2);
        assert!(verify_orbit_on_curve(&trace, &m) < 1e-15);
        m.b += 1e-3;
        assert!(verify_orbit_on_curve(&trace, &m) >= 1e-4);
    }

    #[test]
    fn empty_tail_has_zero_residual() {
        let g = Affine2::new(1.1, 0.9, 0.3, 0.1, 0.2);
        let m = classify_orbit_curve(&g, (0.0, 0.0), (0.0, 1.0)).unwrap();
        let trace = OrbitTrace::iterate(&g, (0.0, 0.0), 0);
        assert_eq!(verify_orbit_on_curve(&trace, &m), 0.0);
    }

    fn check_case(g: Affine2<Rational>, origin: (Rational, Rational), kind: CurveKind) {
        let interval = (origin.0.clone(), origin.0.clone() + q(1, 1));
        let m = classify_orbit_curve(&g, origin.clone(), interval).unwrap();
        assert_eq!(m.kind, kind);
        let trace = OrbitTrace::iterate(&g, origin, 30);
        let res = verify_orbit_on_curve(&trace, &m);
        assert!(res < 1e-10, "{kind}: {res}");
    }

    #[test]
    fn all_five_cases_follow_their_orbits() {
        let o = (q(1, 3), q(-1, 2));
        check_case(Affine2::new(q(1, 1), q(1, 1), q(2, 7), q(1, 40), q(-1, 9)), o.clone(), CurveKind::Parabola);
        check_case(Affine2::new(q(1, 1), q(21, 20), q(2, 7), q(1, 40), q(-1, 9)), o.clone(), CurveKind::ExpLinear);
        check_case(Affine2::new(q(11, 10), q(1, 1), q(2, 7), q(1, 40), q(-1, 9)), o.clone(), CurveKind::LogLinear);
        check_case(Affine2::new(q(11, 10), q(19, 20), q(2, 7), q(1, 40), q(-1, 9)), o.clone(), CurveKind::PowerLinear);
        check_case(Affine2::new(q(9, 10), q(9, 10), q(2, 7), q(1, 5), q(-1, 9)), o, CurveKind::XLogX);
    }

    #[test]
    fn singularity_is_the_fixed_point() {
        let g = Affine2::new(q(11, 10), q(19, 20), q(2, 7), q(1, 40), q(-1, 9));
        let m = classify_orbit_curve(&g, (q(1, 3), q(0, 1)), (q(1, 3), q(4, 3))).unwrap();
        let FixedPoint1d::Point(c) = g.projection().fixed_point() else {
            panic!()
        };
        assert!((m.singularity().unwrap() - c.to_f64()).abs() < 1e-14);
        assert!(m.statement_form().starts_with("y = "));
    }

    #[test]
    fn exp_linear_tends_to_parabola() {
        let g = Affine2::new(q(1, 1), q(1, 1), q(3, 2), q(1, 10), q(1, 7));
        let i = (q(0, 1), q(1, 1));
        let par = classify_orbit_curve(&g, zero(), i.clone()).unwrap();
        for k in 3..=6 {
            for sign in [1, -1] {
                let mut gk = g.clone();
                gk.q = q(1, 1) + q(sign, 10i64.pow(k));
                let m = classify_orbit_curve(&gk, zero(), i.clone()).unwrap();
                assert_eq!(m.kind, CurveKind::ExpLinear);
                for t in 0..=10 {
                    let x = t as f64 / 10.0;
                    let d = (m.eval(x) - par.eval(x)).abs();
                    assert!(d < 10f64.powi(2 - k as i32), "k={k} x={x} d={d}");
                }
            }
        }
    }

    #[test]
    fn flat_line_translation_net() {
        let sys = examples::flat_line::<Rational>();
        let g = Affine2::new(q(1, 1), q(1, 1), q(0, 1), q(1, 2), q(0, 1));
        let trace = epsilon_net(&sys, &g, 1.0).unwrap();
        assert_eq!(trace.points, vec![zero(), (q(1, 2), q(0, 1)), (q(1, 1), q(0, 1))]);
        assert_eq!(trace.crossing, 2);
        assert_eq!(trace.direction, Direction::Right);
        // condition (ii) cannot hold at eps = 1/2 for a step of 1/2
        assert!(matches!(
            epsilon_net(&sys, &g, 0.5),
            Err(FifError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn leftward_net_on_parabola() {
        let sys = examples::dyadic_parabola::<Rational>();
        // translation by -1/16 along y = x²
        let h = q(-1, 16);
        let g = Affine2::new(q(1, 1), q(1, 1), q(2, 1) * h.clone(), h.clone(), h.clone() * h);
        let trace = epsilon_net_auto(&sys, &g).unwrap();
        assert_eq!(trace.direction, Direction::Left);
        assert_eq!(trace.origin, (q(1, 1), q(1, 1)));
        assert_eq!(trace.crossing, 16);
        for (x, y) in &trace.points {
            assert_eq!(y.clone(), x.clone() * x.clone());
        }
        assert!(trace.covering_distance <= trace.eps);
    }

    #[test]
    fn net_rejects_inner_fixed_point() {
        let sys = examples::dyadic_parabola::<Rational>();
        let g = Affine2::new(q(1, 2), q(1, 2), q(0, 1), q(1, 4), q(0, 1));
        assert_eq!(epsilon_net(&sys, &g, 0.5).unwrap_err(), FifError::FixedPointInside);
    }
}
