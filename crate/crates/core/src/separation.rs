//! The associated family `F = G⁻¹∘G` and a bounded-depth search for
//! non-identity elements close to the identity.
//!
//! The search never proves the weak separation property; it reports the gap
//! `δ*(d)`, the smallest deviation from the identity of any non-identity
//! element `g_j⁻¹ g_i` with `|i|, |j| ≤ d`, for every depth up to the
//! requested one. A gap below the tolerance is reported as a witness.
//!
//! Deviations are max-norms of normalized coefficients. Translations are
//! measured at the left end of the interval, so that conjugating the system by
//! an affine change of the abscissa leaves every deviation unchanged.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::affine::{Affine1, Affine2, Word};
use crate::attractor::{evaluate_f, sample_attractor, GraphSample, SampleOptions};
use crate::error::{FifError, Result};
use crate::scalar::Scalar;
use crate::system::IfsSystem;

/// Default cap on the number of materialized words.
pub const DEFAULT_WORD_BUDGET: u128 = 2_000_000;

/// Deviations at or below this value count as the identity in floating mode.
pub const FLOAT_IDENTITY_EPS: f64 = 1e-12;

/// `g = g_j⁻¹ g_i` together with the words it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyElement<S> {
    pub j_word: Word,
    pub i_word: Word,
    pub map2: Affine2<S>,
    pub map1: Affine1<S>,
}

impl<S: Scalar> FamilyElement<S> {
    pub fn from_maps(j_word: Word, i_word: Word, gj: &Affine2<S>, gi: &Affine2<S>) -> Result<Self> {
        let map2 = gj.invert()?.compose(gi);
        let map1 = map2.projection();
        Ok(FamilyElement {
            j_word,
            i_word,
            map2,
            map1,
        })
    }

    pub fn from_words(sys: &IfsSystem<S>, j_word: Word, i_word: Word) -> Result<Self> {
        let gj = sys.compose_word(&j_word)?;
        let gi = sys.compose_word(&i_word)?;
        FamilyElement::from_maps(j_word, i_word, &gj, &gi)
    }

    /// Recomputes the element from its words and compares.
    pub fn matches_words(&self, sys: &IfsSystem<S>) -> Result<bool> {
        let again = FamilyElement::from_words(sys, self.j_word.clone(), self.i_word.clone())?;
        Ok(again.map2 == self.map2 && again.map1 == self.map1 && self.map1 == self.map2.projection())
    }
}

/// Scales used to make deviations dimensionless.
#[derive(Clone, Debug)]
pub struct Frame<S> {
    pub a: S,
    pub width: S,
    /// Mid-height of the attractor.
    pub y_mid: S,
    /// Vertical extent of the attractor, or `width` when the extent is zero.
    pub height: S,
}

impl<S: Scalar> Frame<S> {
    /// Frame for one-dimensional deviations only.
    pub fn horizontal(sys: &IfsSystem<S>) -> Self {
        Frame {
            a: sys.a().clone(),
            width: sys.width(),
            y_mid: S::zero(),
            height: sys.width(),
        }
    }

    /// Frame whose vertical scales come from a sample of the attractor.
    pub fn from_sample(sys: &IfsSystem<S>, sample: &GraphSample<S>) -> Self {
        let width = sys.width();
        let (lo, hi) = sample
            .y_extent()
            .unwrap_or((S::zero(), S::zero()));
        let mut height = hi.clone() - lo.clone();
        if height.is_zero() {
            height = width.clone();
        }
        Frame {
            a: sys.a().clone(),
            width,
            y_mid: (lo + hi) / S::from_i64(2),
            height,
        }
    }

    /// Samples the attractor coarsely (at most ~4k points) and builds the frame.
    pub fn for_system(sys: &IfsSystem<S>) -> Result<Self> {
        let sample = frame_sample(sys)?;
        Ok(Frame::from_sample(sys, &sample))
    }

    /// `max(|p − 1|, |g(a) − a| / (b − a))`, exactly.
    pub fn deviation_1d_exact(&self, g: &Affine1<S>) -> S {
        let dp = (g.p.clone() - S::one()).abs();
        let shift = (g.apply(&self.a) - self.a.clone()).abs() / self.width.clone();
        dp.max_of(shift)
    }

    pub fn deviation_1d(&self, g: &Affine1<S>) -> f64 {
        self.deviation_1d_exact(g).to_f64()
    }

    /// Adds `|q − 1|`, `|r|·(b − a)/H` and the vertical displacement of
    /// `(a, y_mid)` over `H` to the one-dimensional terms.
    pub fn deviation_2d_exact(&self, g: &Affine2<S>) -> S {
        let one = S::one();
        let d1 = self.deviation_1d_exact(&g.projection());
        let dq = (g.q.clone() - one.clone()).abs();
        let dr = (g.r.clone() * self.width.clone() / self.height.clone()).abs();
        let ds = ((g.q.clone() - one) * self.y_mid.clone()
            + g.r.clone() * self.a.clone()
            + g.s.clone())
        .abs()
            / self.height.clone();
        d1.max_of(dq).max_of(dr).max_of(ds)
    }

    pub fn deviation_2d(&self, g: &Affine2<S>) -> f64 {
        self.deviation_2d_exact(g).to_f64()
    }
}

fn frame_sample<S: Scalar>(sys: &IfsSystem<S>) -> Result<GraphSample<S>> {
    let anchors = sys.len() as u128 + 2;
    let mut depth = 1;
    while anchors * (sys.len() as u128).pow(depth as u32 + 1) <= 4_000 && depth < 16 {
        depth += 1;
    }
    sample_attractor(sys, depth, &SampleOptions::default())
}

/// Whether the sampled graph is a straight segment: the chord through the end
/// points and the sample point farthest from it are collinear.
pub fn is_straight_line<S: Scalar>(sample: &GraphSample<S>) -> bool {
    let pts = &sample.points;
    if pts.len() < 3 {
        return true;
    }
    let (x0, y0) = pts[0].clone();
    let (x1, y1) = pts[pts.len() - 1].clone();
    let dx = x1 - x0.clone();
    let dy = y1 - y0.clone();
    // cross product of the chord with each point
    let far = pts
        .iter()
        .map(|(x, y)| (dx.clone() * (y.clone() - y0.clone()) - dy.clone() * (x.clone() - x0.clone())).abs())
        .fold(S::zero(), |m, v| m.max_of(v));
    if S::EXACT {
        far.is_zero()
    } else {
        let scale = dx.to_f64().abs().max(dy.to_f64().abs()).max(1e-300);
        far.to_f64() / scale <= 1e-12
    }
}

/// Which maps the search runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    /// Projections `x ↦ p x + h`.
    One,
    /// Full plane maps.
    Two,
}

struct Entry<S> {
    word: Word,
    map: Affine2<S>,
    /// Exact `g(a)`.
    at_a: S,
    ln_abs_p: f64,
    positive: bool,
    abs_p: f64,
    at_a_f: f64,
    map_f: Affine2<f64>,
}

enum MapKey<S: Scalar> {
    One((S::Key, S::Key)),
    Two([S::Key; 5]),
}

impl<S: Scalar> MapKey<S> {
    fn of(dim: Dimension, g: &Affine2<S>) -> Self {
        match dim {
            Dimension::One => MapKey::One(g.projection().key()),
            Dimension::Two => MapKey::Two(g.key()),
        }
    }
}

impl<S: Scalar> PartialEq for MapKey<S> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (MapKey::One(a), MapKey::One(b)) => a == b,
            (MapKey::Two(a), MapKey::Two(b)) => a == b,
            _ => false,
        }
    }
}
impl<S: Scalar> Eq for MapKey<S> {}
impl<S: Scalar> std::hash::Hash for MapKey<S> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            MapKey::One(k) => k.hash(state),
            MapKey::Two(k) => k.hash(state),
        }
    }
}

/// Distinct maps `g_w` for all words `|w| ≤ depth`, level by level, with the
/// exact duplicates recorded as coincidences. Composed maps are memoized: the
/// maps of level `k` are built from the representatives of level `k − 1`.
struct WordTable<S: Scalar> {
    dim: Dimension,
    entries: Vec<Entry<S>>,
    /// `levels[k]` is the range of entries first realized by a word of length `k`.
    levels: Vec<std::ops::Range<usize>>,
    index: HashMap<MapKey<S>, usize>,
    coincidences: Vec<(Word, Word)>,
    coincidence_count: usize,
    materialized: u128,
}

const MAX_LISTED_COINCIDENCES: usize = 64;

impl<S: Scalar> WordTable<S> {
    fn new(sys: &IfsSystem<S>, dim: Dimension) -> Self {
        let mut table = WordTable {
            dim,
            entries: Vec::new(),
            levels: Vec::new(),
            index: HashMap::new(),
            coincidences: Vec::new(),
            coincidence_count: 0,
            materialized: 1,
        };
        table.push(sys, Word::empty(), Affine2::identity());
        table.levels.push(0..1);
        table
    }

    fn push(&mut self, sys: &IfsSystem<S>, word: Word, map: Affine2<S>) {
        let key = MapKey::of(self.dim, &map);
        if let Some(&existing) = self.index.get(&key) {
            self.coincidence_count += 1;
            if self.coincidences.len() < MAX_LISTED_COINCIDENCES {
                self.coincidences
                    .push((self.entries[existing].word.clone(), word));
            }
            return;
        }
        let at_a = map.projection().apply(sys.a());
        let p = map.p.to_f64();
        let entry = Entry {
            word,
            ln_abs_p: p.abs().ln(),
            positive: p > 0.0,
            abs_p: p.abs(),
            at_a_f: at_a.to_f64(),
            at_a,
            map_f: map.to_f64(),
            map,
        };
        self.index.insert(key, self.entries.len());
        self.entries.push(entry);
    }

    fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Adds the next level, respecting the word budget.
    fn grow(&mut self, sys: &IfsSystem<S>, budget: u128) -> Result<()> {
        let prev = self.levels.last().unwrap().clone();
        let requested = self.materialized + (prev.len() as u128) * (sys.len() as u128);
        if requested > budget {
            return Err(FifError::DepthTooLarge { requested, budget });
        }
        self.materialized = requested;
        let start = self.entries.len();
        for e in prev {
            for i in 1..=sys.len() {
                let word = self.entries[e].word.extended(i);
                let map = self.entries[e].map.compose(&sys.maps()[i - 1]);
                self.push(sys, word, map);
            }
        }
        self.levels.push(start..self.entries.len());
        Ok(())
    }

    fn element(&self, j: usize, i: usize) -> Result<FamilyElement<S>> {
        FamilyElement::from_maps(
            self.entries[j].word.clone(),
            self.entries[i].word.clone(),
            &self.entries[j].map,
            &self.entries[i].map,
        )
    }
}

/// Cheap floating estimate of the deviation of `g_j⁻¹ g_i`.
fn estimate<S: Scalar>(
    dim: Dimension,
    frame: &Frame<f64>,
    ej: &Entry<S>,
    ei: &Entry<S>,
) -> f64 {
    let p = ei.map_f.p / ej.map_f.p;
    let shift = (ei.at_a_f - ej.at_a_f) / (ej.map_f.p * frame.width);
    let d1 = (p - 1.0).abs().max(shift.abs());
    match dim {
        Dimension::One => d1,
        Dimension::Two => {
            let g = ej
                .map_f
                .invert()
                .map(|inv| inv.compose(&ei.map_f))
                .unwrap_or_else(|_| Affine2::new(f64::INFINITY, 0.0, 0.0, 0.0, 0.0));
            d1.max(frame.deviation_2d(&g))
        }
    }
}

/// Exact deviation of `g_j⁻¹ g_i`, converted at the end.
fn exact_deviation<S: Scalar>(dim: Dimension, frame: &Frame<S>, ej: &Entry<S>, ei: &Entry<S>) -> S {
    match dim {
        Dimension::One => {
            let p = ei.map.p.clone() / ej.map.p.clone();
            let dp = (p - S::one()).abs();
            let shift = ((ei.at_a.clone() - ej.at_a.clone()) / (ej.map.p.clone() * frame.width.clone())).abs();
            dp.max_of(shift)
        }
        Dimension::Two => {
            let g = ej.map.invert().expect("contractive maps invert").compose(&ei.map);
            frame.deviation_2d_exact(&g)
        }
    }
}

/// Best pair found while scanning.
struct Best {
    dev: f64,
    pair: Option<(usize, usize)>,
}

/// Scans pairs where at least one word lies in `new` and the other in
/// `0..new.end`, calling `visit(j, i, estimate)` for every ordered pair whose
/// floating deviation estimate is below `bound()`. Pairs whose projected
/// ratio or translation rule out a deviation below the bound are never formed.
fn scan_pairs<S: Scalar, F>(
    table: &WordTable<S>,
    frame: &Frame<f64>,
    new: std::ops::Range<usize>,
    radius: f64,
    mut visit: F,
) where
    F: FnMut(usize, usize, f64) -> f64,
{
    let all = 0..new.end;
    let dim = table.dim;
    let entries = &table.entries;
    let mut bound = radius;

    let mut check = |e: usize, o: usize, bound: &mut f64| {
        for (j, i) in [(o, e), (e, o)] {
            let est = estimate(dim, frame, &entries[j], &entries[i]);
            if est < *bound {
                *bound = visit(j, i, est).min(*bound);
            }
        }
    };

    if !(radius < 1.0) {
        for e in new.clone() {
            for o in all.clone() {
                if o != e && (o < new.start || o < e) {
                    check(e, o, &mut bound);
                }
            }
        }
        return;
    }

    // |p_i/p_j − 1| < U or |p_j/p_i − 1| < U forces |ln p_i − ln p_j| < −ln(1 − U)
    let window = -(1.0 - radius).ln() * (1.0 + 1e-9) + 1e-12;
    let cell_of = |lnp: f64| (lnp / window).floor() as i64;
    let mut cells: HashMap<(bool, i64), Vec<usize>> = HashMap::new();
    for o in all.clone() {
        let e = &entries[o];
        cells.entry((e.positive, cell_of(e.ln_abs_p))).or_default().push(o);
    }
    for members in cells.values_mut() {
        members.sort_by(|&u, &v| {
            entries[u]
                .at_a_f
                .total_cmp(&entries[v].at_a_f)
                .then(u.cmp(&v))
        });
    }

    for e in new.clone() {
        let ent = &entries[e];
        let c = cell_of(ent.ln_abs_p);
        // translation term: |Δg(a)| < U·max|p|·W ≤ U·|p_e|·W/(1 − U)
        let reach = bound * ent.abs_p * frame.width / (1.0 - bound) * (1.0 + 1e-9) + 1e-15;
        for cc in c - 1..=c + 1 {
            let Some(members) = cells.get(&(ent.positive, cc)) else {
                continue;
            };
            let lo = members.partition_point(|&o| entries[o].at_a_f < ent.at_a_f - reach);
            for &o in &members[lo..] {
                if entries[o].at_a_f > ent.at_a_f + reach {
                    break;
                }
                if o == e || (o >= new.start && o > e) {
                    continue;
                }
                check(e, o, &mut bound);
            }
        }
    }
}

/// One row of the gap profile.
#[derive(Clone, Debug)]
pub struct GapEntry<S> {
    pub depth: usize,
    /// `δ*(depth)`; infinite when no non-identity element exists yet.
    pub delta: f64,
    pub minimizer: Option<FamilyElement<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WspStatus {
    NoWitnessUpToDepth,
    WitnessFound,
}

/// Result of a bounded-depth search.
#[derive(Clone, Debug)]
pub struct WspVerdict<S> {
    pub status: WspStatus,
    pub dimension: Dimension,
    pub depth: usize,
    pub tolerance: f64,
    pub gap_by_depth: Vec<GapEntry<S>>,
    /// Minimizers at the depths where `δ*` strictly dropped; deviations strictly decrease.
    pub witnesses: Vec<FamilyElement<S>>,
    /// Distinct words with identical maps (exact identities in `F`), listed up to a cap.
    pub coincidences: Vec<(Word, Word)>,
    pub coincidence_count: usize,
    pub words_materialized: u128,
    /// Set by the planar search: the sampled graph is a straight segment, so
    /// the equivalence of the planar and projected verdicts is not available.
    pub straight_line_warning: bool,
    pub frame: Frame<S>,
}

impl<S: Scalar> WspVerdict<S> {
    pub fn delta_star(&self) -> f64 {
        self.gap_by_depth.last().map_or(f64::INFINITY, |g| g.delta)
    }

    pub fn deviation(&self, element: &FamilyElement<S>) -> f64 {
        match self.dimension {
            Dimension::One => self.frame.deviation_1d(&element.map1),
            Dimension::Two => self.frame.deviation_2d(&element.map2),
        }
    }
}

/// Search configuration shared by both dimensions.
#[derive(Clone, Debug)]
pub struct WspOptions {
    pub word_budget: u128,
}

impl Default for WspOptions {
    fn default() -> Self {
        WspOptions {
            word_budget: DEFAULT_WORD_BUDGET,
        }
    }
}

fn frame_to_f64<S: Scalar>(frame: &Frame<S>) -> Frame<f64> {
    Frame {
        a: frame.a.to_f64(),
        width: frame.width.to_f64(),
        y_mid: frame.y_mid.to_f64(),
        height: frame.height.to_f64(),
    }
}

fn wsp_search<S: Scalar>(
    sys: &IfsSystem<S>,
    dim: Dimension,
    frame: Frame<S>,
    depth: usize,
    tol: f64,
    opts: &WspOptions,
) -> Result<WspVerdict<S>> {
    if depth < 2 {
        return Err(FifError::InvalidArgument(format!(
            "search depth must be at least 2, got {depth}"
        )));
    }
    if !(tol > 0.0) {
        return Err(FifError::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let frame_f = frame_to_f64(&frame);
    let mut table = WordTable::new(sys, dim);
    let mut gaps: Vec<GapEntry<S>> = Vec::new();
    let mut witnesses: Vec<FamilyElement<S>> = Vec::new();
    let mut best_dev = f64::INFINITY;
    let mut best_pair: Option<(usize, usize)> = None;
    let mut minimizer: Option<FamilyElement<S>> = None;

    for d in 1..=depth {
        table.grow(sys, opts.word_budget)?;
        let new = table.levels[d].clone();
        let mut best = Best {
            dev: best_dev,
            pair: None,
        };
        scan_pairs(&table, &frame_f, new, best_dev, |j, i, est| {
            // near-ties with the current best cannot lower it; skip the exact work
            if est >= best.dev * (1.0 - 1e-9) {
                return best.dev;
            }
            let dev = exact_deviation(dim, &frame, &table.entries[j], &table.entries[i]).to_f64();
            let is_identity = if S::EXACT { dev == 0.0 } else { dev <= FLOAT_IDENTITY_EPS };
            if !is_identity && dev < best.dev {
                best.dev = dev;
                best.pair = Some((j, i));
            }
            best.dev
        });
        if let Some((j, i)) = best.pair {
            best_dev = best.dev;
            best_pair = Some((j, i));
            let el = table.element(j, i)?;
            witnesses.push(el.clone());
            minimizer = Some(el);
        }
        let _ = best_pair;
        gaps.push(GapEntry {
            depth: d,
            delta: best_dev,
            minimizer: minimizer.clone(),
        });
    }

    let status = if best_dev < tol {
        WspStatus::WitnessFound
    } else {
        WspStatus::NoWitnessUpToDepth
    };
    debug_assert_eq!(table.depth(), depth);
    Ok(WspVerdict {
        status,
        dimension: dim,
        depth,
        tolerance: tol,
        gap_by_depth: gaps,
        witnesses,
        coincidences: table.coincidences,
        coincidence_count: table.coincidence_count,
        words_materialized: table.materialized,
        straight_line_warning: false,
        frame,
    })
}

/// Bounded-depth search over the projected family `F◇`.
pub fn wsp_check_1d<S: Scalar>(
    sys: &IfsSystem<S>,
    depth: usize,
    tol: f64,
    opts: &WspOptions,
) -> Result<WspVerdict<S>> {
    wsp_search(sys, Dimension::One, Frame::horizontal(sys), depth, tol, opts)
}

/// Bounded-depth search over the planar family `F`. Vertical scales of the
/// deviation come from a coarse sample of the attractor.
pub fn wsp_check_2d<S: Scalar>(
    sys: &IfsSystem<S>,
    depth: usize,
    tol: f64,
    opts: &WspOptions,
) -> Result<WspVerdict<S>> {
    let sample = frame_sample(sys)?;
    let frame = Frame::from_sample(sys, &sample);
    let mut verdict = wsp_search(sys, Dimension::Two, frame, depth, tol, opts)?;
    verdict.straight_line_warning = is_straight_line(&sample);
    Ok(verdict)
}

/// The full projected family `{g_j◇⁻¹ g_i◇ : |i|, |j| ≤ depth}`, deduplicated
/// and sorted. The pair count is limited by `budget`.
pub fn enumerate_family_1d<S: Scalar>(
    sys: &IfsSystem<S>,
    depth: usize,
    budget: u128,
) -> Result<Vec<Affine1<S>>> {
    let mut table = WordTable::new(sys, Dimension::One);
    for _ in 0..depth {
        table.grow(sys, budget)?;
    }
    let n = table.entries.len() as u128;
    if n * n > budget {
        return Err(FifError::DepthTooLarge {
            requested: n * n,
            budget,
        });
    }
    let mut out: HashMap<(S::Key, S::Key), Affine1<S>> = HashMap::new();
    for ej in &table.entries {
        let inv = ej.map.projection().invert()?;
        for ei in &table.entries {
            let g = inv.compose(&ei.map.projection());
            out.entry(g.key()).or_insert(g);
        }
    }
    let mut v: Vec<(_, _)> = out.into_iter().collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(v.into_iter().map(|(_, g)| g).collect())
}

/// Elements of `F◇` with `|i|, |j| ≤ depth` whose deviation is below `radius`
/// (identity excluded), found by the bucketed pair scan.
pub fn near_identity_family_1d<S: Scalar>(
    sys: &IfsSystem<S>,
    depth: usize,
    radius: f64,
    budget: u128,
) -> Result<Vec<(FamilyElement<S>, f64)>> {
    let frame = Frame::horizontal(sys);
    let frame_f = frame_to_f64(&frame);
    let mut table = WordTable::new(sys, Dimension::One);
    let mut found: Vec<(usize, usize, f64)> = Vec::new();
    for d in 1..=depth {
        table.grow(sys, budget)?;
        let new = table.levels[d].clone();
        scan_pairs(&table, &frame_f, new, radius, |j, i, _| {
            let dev = exact_deviation(Dimension::One, &frame, &table.entries[j], &table.entries[i]).to_f64();
            let is_identity = if S::EXACT { dev == 0.0 } else { dev <= FLOAT_IDENTITY_EPS };
            if !is_identity && dev < radius {
                found.push((j, i, dev));
            }
            radius
        });
    }
    found.sort_by(|u, v| u.2.total_cmp(&v.2).then((u.0, u.1).cmp(&(v.0, v.1))));
    found
        .into_iter()
        .map(|(j, i, dev)| Ok((table.element(j, i)?, dev)))
        .collect()
}

/// Distinct words of length at most `depth` realizing identical projected
/// maps, i.e. exact identities `g_j◇⁻¹ g_i◇ = Id` with `i ≠ j`.
pub fn coincidences_1d<S: Scalar>(
    sys: &IfsSystem<S>,
    depth: usize,
    budget: u128,
) -> Result<(Vec<(Word, Word)>, usize)> {
    let mut table = WordTable::new(sys, Dimension::One);
    for _ in 0..depth {
        table.grow(sys, budget)?;
    }
    Ok((table.coincidences, table.coincidence_count))
}

/// Checks that `element` moves the graph point over `x` to the graph point
/// over `element◇(x)`, within `tol` in the Euclidean norm.
pub fn lemma4_transport_check<S: Scalar>(
    sys: &IfsSystem<S>,
    element: &FamilyElement<S>,
    x: f64,
    tol: f64,
) -> Result<bool> {
    let (a, b) = (sys.a().to_f64(), sys.b().to_f64());
    if !(a..=b).contains(&x) {
        return Err(FifError::OutOfDomain { x });
    }
    let g = element.map2.to_f64();
    let x2 = g.p * x + g.h;
    if !(a..=b).contains(&x2) {
        return Err(FifError::OutOfDomain { x: x2 });
    }
    let sysf = sys.to_f64();
    // evaluation error in y is amplified by |q| through the map
    let inner = tol / (4.0 * g.q.abs().max(1.0));
    let y = evaluate_f(&sysf, &x, inner)?;
    let y2 = evaluate_f(&sysf, &x2, tol / 4.0)?;
    let (u, v) = g.apply(&(x, y));
    Ok(((u - x2).powi(2) + (v - y2).powi(2)).sqrt() <= tol)
}

/// Total order used when reporting elements.
pub fn compare_elements<S: Scalar>(u: &FamilyElement<S>, v: &FamilyElement<S>) -> Ordering {
    (&u.j_word, &u.i_word).cmp(&(&v.j_word, &v.i_word))
}
