//! Validation, sampling and pointwise evaluation of the function whose graph
//! is the attractor of an [`IfsSystem`].

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use crate::error::{FifError, Result};
use crate::scalar::Scalar;
use crate::system::IfsSystem;

/// Knobs for [`validate`].
#[derive(Clone, Debug)]
pub struct ValidationOptions {
    /// Largest branch disagreement accepted on strip intersections.
    pub graph_tolerance: f64,
    /// Abscissae tested per overlap interval (endpoints included).
    pub samples_per_overlap: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            graph_tolerance: 1e-9,
            samples_per_overlap: 17,
        }
    }
}

/// Intersection of the strips of generators `i < j` (1-based).
#[derive(Clone, Debug, PartialEq)]
pub struct StripIntersection<S> {
    pub i: usize,
    pub j: usize,
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> StripIntersection<S> {
    /// Positive-length intersection, as opposed to a shared endpoint.
    pub fn is_overlap(&self) -> bool {
        self.hi.total_cmp(&self.lo) == Ordering::Greater
    }
}

/// Outcome of every structural check on a system. `None` means the check passed.
#[derive(Clone, Debug)]
pub struct ValidationReport<S> {
    pub map_count: usize,
    pub contraction: Option<FifError>,
    pub self_map: Option<FifError>,
    pub covering: Option<FifError>,
    pub graph: Option<FifError>,
    pub intersections: Vec<StripIntersection<S>>,
    /// Largest branch disagreement observed on strip intersections.
    pub max_discrepancy: f64,
    pub graph_tolerance: f64,
}

impl<S: Scalar> ValidationReport<S> {
    pub fn is_valid(&self) -> bool {
        self.first_error().is_none()
    }

    pub fn first_error(&self) -> Option<&FifError> {
        self.contraction
            .as_ref()
            .or(self.self_map.as_ref())
            .or(self.covering.as_ref())
            .or(self.graph.as_ref())
    }

    pub fn overlaps(&self) -> impl Iterator<Item = &StripIntersection<S>> {
        self.intersections.iter().filter(|s| s.is_overlap())
    }

    pub fn into_result(self) -> Result<Self> {
        match self.first_error() {
            Some(e) => Err(e.clone()),
            None => Ok(self),
        }
    }
}

/// Checks contraction bounds, that each projection maps `[a, b]` into itself,
/// that the strips cover `[a, b]`, and that branches agree wherever strips meet.
pub fn validate<S: Scalar>(sys: &IfsSystem<S>, opts: &ValidationOptions) -> ValidationReport<S> {
    let mut report = ValidationReport {
        map_count: sys.len(),
        contraction: None,
        self_map: None,
        covering: None,
        graph: None,
        intersections: Vec::new(),
        max_discrepancy: 0.0,
        graph_tolerance: opts.graph_tolerance,
    };

    let one = S::one();
    if sys.len() < 2 {
        report.contraction = Some(FifError::NotContractive(format!(
            "need at least two maps, got {}",
            sys.len()
        )));
    }
    for (n, g) in sys.maps().iter().enumerate() {
        if report.contraction.is_some() {
            break;
        }
        if g.p.is_zero() {
            report.contraction = Some(FifError::NotContractive(format!("map {}: p = 0", n + 1)));
        } else if g.p.abs().total_cmp(&one) != Ordering::Less {
            report.contraction = Some(FifError::NotContractive(format!(
                "map {}: |p| = {} is not below 1",
                n + 1,
                g.p.abs()
            )));
        } else if g.q.abs().total_cmp(&one) != Ordering::Less {
            report.contraction = Some(FifError::NotContractive(format!(
                "map {}: |q| = {} is not below 1",
                n + 1,
                g.q.abs()
            )));
        }
    }

    let strips = sys.strips();
    for (n, (lo, hi)) in strips.iter().enumerate() {
        if !sys.contains(lo) || !sys.contains(hi) {
            report.self_map = Some(FifError::NotContractive(format!(
                "map {} sends [{}, {}] to [{lo}, {hi}], outside itself",
                n + 1,
                sys.a(),
                sys.b()
            )));
            break;
        }
    }

    report.covering = covering_gap(sys, &strips).map(|(u, v)| FifError::NotCovering {
        gap_start: u.to_f64(),
        gap_end: v.to_f64(),
    });

    for i in 0..strips.len() {
        for j in i + 1..strips.len() {
            let lo = strips[i].0.clone().max_of(strips[j].0.clone());
            let hi = strips[i].1.clone().min_of(strips[j].1.clone());
            if lo.total_cmp(&hi) != Ordering::Greater {
                report.intersections.push(StripIntersection {
                    i: i + 1,
                    j: j + 1,
                    lo,
                    hi,
                });
            }
        }
    }

    if report.contraction.is_none() && report.self_map.is_none() && report.covering.is_none() {
        let tol = opts.graph_tolerance / 4.0;
        let mut worst: Option<(f64, f64)> = None;
        'outer: for isec in &report.intersections {
            let xs: Vec<S> = if isec.is_overlap() {
                let k = opts.samples_per_overlap.max(2) as i64 - 1;
                (0..=k)
                    .map(|t| {
                        isec.lo.clone()
                            + (isec.hi.clone() - isec.lo.clone()) * S::from_ratio(t, k)
                    })
                    .collect()
            } else {
                vec![isec.lo.clone()]
            };
            for x in xs {
                let yi = evaluate_f_via_branch(sys, &x, isec.i, tol);
                let yj = evaluate_f_via_branch(sys, &x, isec.j, tol);
                let (yi, yj) = match (yi, yj) {
                    (Ok(u), Ok(v)) => (u, v),
                    (Err(e), _) | (_, Err(e)) => {
                        report.graph = Some(e);
                        break 'outer;
                    }
                };
                let d = (yi - yj).abs();
                if worst.is_none_or(|(w, _)| d > w) {
                    worst = Some((d, x.to_f64()));
                }
            }
        }
        if let Some((d, x)) = worst {
            report.max_discrepancy = d;
            if d > opts.graph_tolerance && report.graph.is_none() {
                report.graph = Some(FifError::NotAFunctionGraph {
                    x,
                    discrepancy: d,
                    tolerance: opts.graph_tolerance,
                });
            }
        }
    }
    report
}

/// First uncovered open interval of `[a, b]`, if any.
fn covering_gap<S: Scalar>(sys: &IfsSystem<S>, strips: &[(S, S)]) -> Option<(S, S)> {
    let mut sorted: Vec<&(S, S)> = strips.iter().collect();
    sorted.sort_by(|u, v| u.0.total_cmp(&v.0));
    let mut reach = sys.a().clone();
    for (lo, hi) in sorted {
        if lo.total_cmp(&reach) == Ordering::Greater {
            return Some((reach, lo.clone()));
        }
        reach = reach.max_of(hi.clone());
    }
    if reach.total_cmp(sys.b()) == Ordering::Less {
        return Some((reach, sys.b().clone()));
    }
    None
}

/// Bound `Y` with `|f(x)| ≤ Y` on `[a, b]`, from the invariance of the box
/// `[a, b] × [-Y, Y]`.
pub fn ordinate_bound<S: Scalar>(sys: &IfsSystem<S>) -> Result<f64> {
    let qmax = sys.max_abs_q();
    if qmax >= 1.0 {
        return Err(FifError::NotContractive("max |q| is not below 1".into()));
    }
    let xmax = sys.a().to_f64().abs().max(sys.b().to_f64().abs());
    let num = sys
        .maps()
        .iter()
        .map(|g| g.r.to_f64().abs() * xmax + g.s.to_f64().abs())
        .fold(0.0, f64::max);
    Ok(num / (1.0 - qmax))
}

/// Lowest generator (1-based) whose closed strip contains `x`.
pub fn branch_of<S: Scalar>(sys: &IfsSystem<S>, x: &S) -> Option<usize> {
    (1..=sys.len()).find(|&i| {
        let (lo, hi) = sys.strip(i).unwrap();
        x.total_cmp(&lo) != Ordering::Less && x.total_cmp(&hi) != Ordering::Greater
    })
}

/// Nearest strip, used in floating mode when rounding pushed `x` into a seam.
fn nearest_branch<S: Scalar>(sys: &IfsSystem<S>, x: &S) -> usize {
    let xf = x.to_f64();
    let mut best = (f64::INFINITY, 1);
    for i in 1..=sys.len() {
        let (lo, hi) = sys.strip(i).unwrap();
        let d = (lo.to_f64() - xf).max(xf - hi.to_f64()).max(0.0);
        if d < best.0 {
            best = (d, i);
        }
    }
    best.1
}

enum Backward<S> {
    Exact(S),
    /// `f(x0)` up to `|beta|·Y`, where `beta` is the accumulated vertical scaling.
    Approx { alpha: S },
}

const MAX_BACKWARD_STEPS: usize = 200_000;

/// Pulls `x` back through the strips until the remaining uncertainty
/// `|beta|·bound` drops to `tol`, or an exact cycle of abscissae is found.
fn backward<S: Scalar>(
    sys: &IfsSystem<S>,
    x: &S,
    first_branch: Option<usize>,
    tol: f64,
    bound: f64,
) -> Result<Backward<S>> {
    if !sys.contains(x) {
        return Err(FifError::OutOfDomain { x: x.to_f64() });
    }
    let mut xs: Vec<S> = vec![x.clone()];
    let mut coeffs: Vec<(S, S)> = vec![(S::zero(), S::one())];
    let mut seen: HashMap<S::Key, Vec<usize>> = HashMap::new();
    seen.entry(x.key()).or_default().push(0);

    let mut cur = x.clone();
    let mut alpha = S::zero();
    let mut beta = S::one();
    for step in 0..MAX_BACKWARD_STEPS {
        if beta.is_zero() {
            return Ok(Backward::Exact(alpha));
        }
        if beta.to_f64().abs() * bound <= tol && !S::EXACT {
            return Ok(Backward::Approx { alpha });
        }
        let i = match (step, first_branch) {
            (0, Some(i)) => {
                let (lo, hi) = sys.strip(i)?;
                if cur.total_cmp(&lo) == Ordering::Less || cur.total_cmp(&hi) == Ordering::Greater
                {
                    return Err(FifError::InvalidArgument(format!(
                        "x = {cur} is outside the strip of map {i}"
                    )));
                }
                i
            }
            _ => match branch_of(sys, &cur) {
                Some(i) => i,
                None if !S::EXACT => nearest_branch(sys, &cur),
                None => {
                    return Err(FifError::NotCovering {
                        gap_start: cur.to_f64(),
                        gap_end: cur.to_f64(),
                    })
                }
            },
        };
        let g = sys.map(i)?;
        let mut prev = (cur.clone() - g.h.clone()) / g.p.clone();
        if !S::EXACT {
            prev = prev.max_of(sys.a().clone()).min_of(sys.b().clone());
        }
        alpha = alpha + beta.clone() * (g.r.clone() * prev.clone() + g.s.clone());
        beta = beta * g.q.clone();
        cur = prev;

        let idx = xs.len();
        if let Some(hits) = seen.get(&cur.key()) {
            if let Some(&j) = hits.iter().find(|&&j| xs[j] == cur) {
                // f(x_j) = f(x_idx) closes the loop exactly
                let (alpha_j, beta_j) = coeffs[j].clone();
                let denom = beta_j.clone() - beta.clone();
                if !denom.is_zero() {
                    let fixed = (alpha.clone() - alpha_j.clone()) / denom;
                    return Ok(Backward::Exact(alpha_j + beta_j * fixed));
                }
            }
        }
        seen.entry(cur.key()).or_default().push(idx);
        xs.push(cur.clone());
        coeffs.push((alpha.clone(), beta.clone()));

        if S::EXACT && beta.to_f64().abs() * bound <= tol && step > 64 {
            // exact pull-backs that have not cycled yet; stop and approximate
            return Ok(Backward::Approx { alpha });
        }
    }
    Ok(Backward::Approx { alpha })
}

fn finish<S: Scalar>(b: Backward<S>) -> f64 {
    match b {
        Backward::Exact(y) => y.to_f64(),
        // centre of [-Y, Y]
        Backward::Approx { alpha, .. } => alpha.to_f64(),
    }
}

/// `f(x)` within `tol`, by backward iteration through the lowest-index strip
/// containing the current abscissa.
pub fn evaluate_f<S: Scalar>(sys: &IfsSystem<S>, x: &S, tol: f64) -> Result<f64> {
    let bound = ordinate_bound(sys)?;
    backward(sys, x, None, tol, bound).map(finish)
}

/// As [`evaluate_f`], but the first pull-back goes through generator `branch`
/// (1-based), whose strip must contain `x`.
pub fn evaluate_f_via_branch<S: Scalar>(
    sys: &IfsSystem<S>,
    x: &S,
    branch: usize,
    tol: f64,
) -> Result<f64> {
    let bound = ordinate_bound(sys)?;
    backward(sys, x, Some(branch), tol, bound).map(finish)
}

/// Exact `f(x)` when the backward orbit of `x` is eventually periodic (always
/// the case for fixed points of generators and strip endpoints), else `None`.
pub fn evaluate_f_exact<S: Scalar>(sys: &IfsSystem<S>, x: &S) -> Result<Option<S>> {
    let bound = ordinate_bound(sys)?;
    match backward(sys, x, None, 1e-300, bound)? {
        Backward::Exact(y) => Ok(Some(y)),
        Backward::Approx { .. } => Ok(None),
    }
}

/// Graph point over `x`: exact if possible, otherwise a double-precision value.
pub fn graph_point<S: Scalar>(sys: &IfsSystem<S>, x: &S) -> Result<((S, S), bool)> {
    if let Some(y) = evaluate_f_exact(sys, x)? {
        return Ok(((x.clone(), y), true));
    }
    let y = evaluate_f(sys, x, 1e-15)?;
    Ok(((x.clone(), S::from_f64(y)), false))
}

/// Finite sample of the attractor, sorted by abscissa.
#[derive(Clone, Debug)]
pub struct GraphSample<S> {
    pub points: Vec<(S, S)>,
    pub depth: usize,
    /// Upper bound on the gap between consecutive abscissae.
    pub resolution: f64,
    /// Bound on the distance of any sample point from the attractor.
    pub tolerance: f64,
}

impl<S: Scalar> GraphSample<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_f64(&self) -> GraphSample<f64> {
        GraphSample {
            points: self
                .points
                .iter()
                .map(|(x, y)| (x.to_f64(), y.to_f64()))
                .collect(),
            depth: self.depth,
            resolution: self.resolution,
            tolerance: self.tolerance,
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|(x, _)| x.to_f64()).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|(_, y)| y.to_f64()).collect()
    }

    /// `(min y, max y)`.
    pub fn y_extent(&self) -> Option<(S, S)> {
        let mut it = self.points.iter().map(|(_, y)| y.clone());
        let first = it.next()?;
        Some(it.fold((first.clone(), first), |(lo, hi), y| {
            (lo.min_of(y.clone()), hi.max_of(y))
        }))
    }
}

/// Limits for [`sample_attractor`].
#[derive(Clone, Debug)]
pub struct SampleOptions {
    /// Cap on `anchors · m^depth`.
    pub max_points: u128,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            max_points: 4_000_000,
        }
    }
}

/// Anchor points lying exactly on the attractor: generator fixed points and
/// the graph points over `a` and `b`. The flag is `false` when one of them
/// had to be approximated.
pub fn anchors<S: Scalar>(sys: &IfsSystem<S>) -> Result<(Vec<(S, S)>, bool)> {
    let mut pts: Vec<(S, S)> = sys.maps().iter().filter_map(|g| g.fixed_point()).collect();
    let (pa, ea) = graph_point(sys, sys.a())?;
    let (pb, eb) = graph_point(sys, sys.b())?;
    pts.push(pa);
    pts.push(pb);
    Ok((pts, ea && eb))
}

/// Images of the anchor set under every word of length `depth`, deduplicated
/// (exactly in rational mode, to 1e-12 in floating mode) and sorted by `x`.
pub fn sample_attractor<S: Scalar>(
    sys: &IfsSystem<S>,
    depth: usize,
    opts: &SampleOptions,
) -> Result<GraphSample<S>> {
    if depth == 0 {
        return Err(FifError::InvalidArgument("depth must be at least 1".into()));
    }
    let (anchor_pts, exact_anchors) = anchors(sys)?;
    let requested = (anchor_pts.len() as u128)
        .saturating_mul((sys.len() as u128).saturating_pow(depth as u32));
    if requested > opts.max_points {
        return Err(FifError::DepthTooLarge {
            requested,
            budget: opts.max_points,
        });
    }

    let mut level = dedup_points(anchor_pts);
    for _ in 0..depth {
        let next: Vec<(S, S)> = sys
            .maps()
            .iter()
            .flat_map(|g| level.iter().map(move |pt| g.apply(pt)))
            .collect();
        level = dedup_points(next);
    }
    level.sort_by(|u, v| u.0.total_cmp(&v.0).then(u.1.total_cmp(&v.1)));

    let width = sys.width().to_f64();
    let resolution = sys.max_abs_p().powi(depth as i32) * width;
    let tolerance = if S::EXACT && exact_anchors {
        0.0
    } else {
        let scale = level
            .iter()
            .map(|(x, y)| x.to_f64().abs().max(y.to_f64().abs()))
            .fold(1.0, f64::max);
        let anchor_err = if exact_anchors { 0.0 } else { 1e-15 };
        (depth as f64 + 2.0) * 4.0 * f64::EPSILON * scale + anchor_err
    };
    Ok(GraphSample {
        points: level,
        depth,
        resolution,
        tolerance,
    })
}

fn dedup_points<S: Scalar>(pts: Vec<(S, S)>) -> Vec<(S, S)> {
    let mut seen = HashSet::with_capacity(pts.len());
    pts.into_iter()
        .filter(|(x, y)| seen.insert((x.key(), y.key())))
        .collect()
}

/// Smallest sampling depth whose resolution reaches `target`.
pub(crate) fn depth_for_resolution<S: Scalar>(sys: &IfsSystem<S>, target: f64) -> usize {
    let pmax = sys.max_abs_p();
    let width = sys.width().to_f64();
    if pmax <= 0.0 || target >= width {
        return 1;
    }
    (((target / width).ln() / pmax.ln()).ceil() as usize).max(1)
}

const MODULUS_MAX_POINTS: u128 = 1_500_000;

/// Largest `δ` (up to `√3/2·eps`) such that every window of width `δ` in the
/// sorted sample has vertical spread at most `eps/2`, reduced by twice the
/// sample resolution. Together the two bounds give `‖Δ(x, f(x))‖ < eps`.
pub fn certify_delta(sample: &GraphSample<f64>, eps: f64, width: f64) -> f64 {
    let xs: Vec<f64> = sample.points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = sample.points.iter().map(|p| p.1).collect();
    let cap = width.min(0.75f64.sqrt() * eps);
    let half = eps / 2.0;
    let delta = if window_spread(&xs, &ys, cap) <= half {
        cap
    } else {
        let (mut lo, mut hi) = (0.0, cap);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if window_spread(&xs, &ys, mid) <= half {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    delta - 2.0 * sample.resolution
}

/// Maximum of `max y − min y` over windows `[x_i, x_i + w]`.
pub fn window_spread(xs: &[f64], ys: &[f64], w: f64) -> f64 {
    use std::collections::VecDeque;
    let n = xs.len();
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut worst = 0.0f64;
    let mut right = 0;
    for left in 0..n {
        while right < n && xs[right] - xs[left] <= w {
            while maxq.back().is_some_and(|&k| ys[k] <= ys[right]) {
                maxq.pop_back();
            }
            maxq.push_back(right);
            while minq.back().is_some_and(|&k| ys[k] >= ys[right]) {
                minq.pop_back();
            }
            minq.push_back(right);
            right += 1;
        }
        while maxq.front().is_some_and(|&k| k < left) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&k| k < left) {
            minq.pop_front();
        }
        if let (Some(&hi), Some(&lo)) = (maxq.front(), minq.front()) {
            worst = worst.max(ys[hi] - ys[lo]);
        }
    }
    worst
}

/// Empirically certified modulus of continuity together with the dense sample
/// it was certified on.
pub fn modulus_with_sample<S: Scalar>(
    sys: &IfsSystem<S>,
    eps: f64,
) -> Result<(f64, GraphSample<f64>)> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(FifError::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let sysf = sys.to_f64();
    let width = sysf.width();
    let anchor_count = sys.len() as u128 + 2;
    let mut depth = depth_for_resolution(&sysf, width / 64.0);
    let opts = SampleOptions {
        max_points: MODULUS_MAX_POINTS,
    };
    let mut best: Option<(f64, GraphSample<f64>)> = None;
    loop {
        let count = anchor_count.saturating_mul((sys.len() as u128).saturating_pow(depth as u32));
        if count > MODULUS_MAX_POINTS {
            break;
        }
        let sample = sample_attractor(&sysf, depth, &opts)?;
        let delta = certify_delta(&sample, eps, width);
        let resolution = sample.resolution;
        if delta > 0.0 {
            best = Some((delta, sample));
            if resolution <= delta / 8.0 {
                break;
            }
        }
        depth += 1;
    }
    best.ok_or(FifError::ResolutionInsufficient { eps })
}

/// `δ > 0` with `|x1 − x2| < δ ⇒ ‖(x1, f(x1)) − (x2, f(x2))‖ < eps`,
/// certified on a dense sample.
pub fn modulus_of_continuity<S: Scalar>(sys: &IfsSystem<S>, eps: f64) -> Result<f64> {
    modulus_with_sample(sys, eps).map(|(d, _)| d)
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::test_support::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn overlap_values_agree_across_branches(v in branch_inputs()) {
            check_branch_independence(v).map_err(TestCaseError::fail)?;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sample_commutes_with_conjugation(
            sys in two_map_system(),
            lambda in small_rational(4, 5).prop_filter("positive", |v| v.is_positive()),
            mu in small_rational(2, 3),
            depth in 1usize..5,
        ) {
            let conj = sys.conjugate_x(&lambda, &mu).unwrap();
            let opts = SampleOptions::default();
            let a = sample_attractor(&sys, depth, &opts).unwrap();
            let b = sample_attractor(&conj, depth, &opts).unwrap();
            let moved: Vec<_> = a
                .points
                .iter()
                .map(|(x, y)| (lambda.clone() * x.clone() + mu.clone(), y.clone()))
                .collect();
            prop_assert_eq!(moved, b.points);
        }
    }
}
