//! The metric side of globalization.
//!
//! Distances on the globalization are shortest-path distances in a layered
//! graph: one copy of the base space per prefix of the two endpoint words,
//! with zero-weight identification edges along single reduction steps. An
//! independent bounded-segment search over the truncation serves as the
//! cross-checking oracle, and for group actions a closed-form infimum over
//! domain tuples gives a third route.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::error::Error;
use crate::glob::{self, enumerate_truncation, NormalElement, Truncation};
use crate::paction::{from_category, normal_words_up_to, Config, Morphism, PartialAction, Space};
use crate::words::{GeneratorId, Word};

/// Tolerance used by the verification reports.
pub const TOL: f64 = 1e-9;

/// A finite symmetric distance matrix over the extended nonnegative reals.
#[derive(Clone, Debug)]
pub struct WeakPseudometric {
    n: usize,
    d: Vec<f64>,
}

/// Validation outcome for a distance matrix.
#[derive(Clone, Debug)]
pub struct MetricReport {
    pub issues: Vec<String>,
    /// No zero distance between distinct points.
    pub separated: bool,
    /// Separated with all distances finite.
    pub metric: bool,
}

impl MetricReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl WeakPseudometric {
    /// Entries must be nonnegative or `+∞`; shape must be square.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, Error> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadMatrix);
        }
        let mut d = Vec::with_capacity(n * n);
        for row in &rows {
            for &v in row {
                if v.is_nan() || v < 0.0 {
                    return Err(Error::BadMetricEntry);
                }
                d.push(v);
            }
        }
        Ok(WeakPseudometric { n, d })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.dist(i, j)).collect())
            .collect()
    }

    /// Distance from a point to a set; `+∞` for the empty set.
    pub fn dist_to_set<'a>(&self, x: usize, set: impl IntoIterator<Item = &'a usize>) -> f64 {
        set.into_iter()
            .map(|&y| self.dist(x, y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Check zero diagonal, symmetry and the triangle inequality with
    /// infinity-absorbing arithmetic; separation and metricity are reported
    /// as metadata.
    pub fn validate(&self) -> MetricReport {
        let mut issues = Vec::new();
        for i in 0..self.n {
            if self.dist(i, i) != 0.0 {
                issues.push(format!("d({i},{i}) must be 0"));
            }
            for j in 0..self.n {
                if self.dist(i, j) != self.dist(j, i) {
                    issues.push(format!("d({i},{j}) is not symmetric"));
                }
            }
        }
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    if self.dist(i, k) > self.dist(i, j) + self.dist(j, k) {
                        issues.push(format!(
                            "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})"
                        ));
                    }
                }
            }
        }
        let mut separated = true;
        let mut finite = true;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.dist(i, j) == 0.0 {
                    separated = false;
                }
                if self.dist(i, j).is_infinite() {
                    finite = false;
                }
            }
        }
        MetricReport {
            issues,
            separated,
            metric: separated && finite,
        }
    }
}

/// Every generator map is non-expansive on its domain; compositions then are
/// as well, so the generator-level check suffices.
pub fn check_nonexpansive(a: &PartialAction) -> Result<bool, Error> {
    let m = a.space().metric().ok_or(Error::MissingMetric)?;
    for g in a.gen_maps() {
        let dom: Vec<usize> = g.dom().collect();
        for &x in &dom {
            for &y in &dom {
                let (gx, gy) = (g.apply(x).unwrap(), g.apply(y).unwrap());
                if m.dist(gx, gy) > m.dist(x, y) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The layered prefix graph used by distance queries.
struct PrefixGraph {
    words: Vec<Word>,
    nx: usize,
    adj: Vec<Vec<(usize, f64)>>,
}

impl PrefixGraph {
    fn build(a: &PartialAction, el1: &NormalElement, el2: &NormalElement) -> Self {
        let m = a.space().metric().expect("caller checked");
        let mut widx: BTreeMap<Word, usize> = BTreeMap::new();
        let mut words: Vec<Word> = Vec::new();
        for w in el1.word.prefixes().chain(el2.word.prefixes()) {
            widx.entry(w.clone()).or_insert_with(|| {
                words.push(w);
                words.len() - 1
            });
        }
        let nx = a.space().len();
        let mut adj = vec![Vec::new(); words.len() * nx];
        for (wi, w) in words.iter().enumerate() {
            for x in 0..nx {
                let node = wi * nx + x;
                for y in 0..nx {
                    if y != x && m.dist(x, y).is_finite() {
                        adj[node].push((wi * nx + y, m.dist(x, y)));
                    }
                }
            }
            if let Some(g1) = w.last() {
                let parent = widx[&w.imprefix().unwrap()];
                for x in a.gen_map(g1).dom() {
                    let y = a.apply_gen(g1, x).unwrap();
                    let here = wi * nx + x;
                    let there = parent * nx + y;
                    adj[here].push((there, 0.0));
                    adj[there].push((here, 0.0));
                }
            }
        }
        PrefixGraph { words, nx, adj }
    }

    fn node(&self, w: &Word, x: usize) -> usize {
        self.words.iter().position(|v| v == w).unwrap() * self.nx + x
    }

    /// Dijkstra with deterministic tie-breaking: the heap orders equal
    /// distances by node id and adjacency lists are built in canonical
    /// order, so the extracted tree is reproducible.
    fn shortest(&self, src: usize, tgt: usize) -> (f64, Option<Vec<usize>>) {
        #[derive(PartialEq)]
        struct Entry(f64, usize);
        impl Eq for Entry {}
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                other
                    .0
                    .total_cmp(&self.0)
                    .then_with(|| other.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Entry(0.0, src));
        while let Some(Entry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = Some(u);
                    heap.push(Entry(nd, v));
                }
            }
        }
        if dist[tgt].is_infinite() {
            return (f64::INFINITY, None);
        }
        let mut path = vec![tgt];
        while let Some(p) = pred[*path.last().unwrap()] {
            path.push(p);
            if *path.last().unwrap() == src {
                break;
            }
        }
        path.reverse();
        (dist[tgt], Some(path))
    }
}

fn require_confluent_metric(a: &PartialAction) -> Result<&WeakPseudometric, Error> {
    let m = a.space().metric().ok_or(Error::MissingMetric)?;
    if !a.is_confluent() {
        return Err(Error::NotConfluent);
    }
    Ok(m)
}

fn require_normal(a: &PartialAction, el: &NormalElement) -> Result<(), Error> {
    if a.config_is_normal(&el.as_config()) {
        Ok(())
    } else {
        Err(Error::NotNormal(format!(
            "{}@{}",
            a.presentation().format_word(&el.word),
            a.space().point_name(el.point)
        )))
    }
}

/// The globalized distance between two normal elements: exact shortest path
/// in the prefix graph, `+∞` when unreachable.
pub fn distance(a: &PartialAction, el1: &NormalElement, el2: &NormalElement) -> Result<f64, Error> {
    require_confluent_metric(a)?;
    require_normal(a, el1)?;
    require_normal(a, el2)?;
    if el1 == el2 {
        return Ok(0.0);
    }
    let g = PrefixGraph::build(a, el1, el2);
    let (d, _) = g.shortest(g.node(&el1.word, el1.point), g.node(&el2.word, el2.point));
    Ok(d)
}

/// Pairwise distances, row-major symmetric.
pub fn distance_matrix(a: &PartialAction, els: &[NormalElement]) -> Result<Vec<Vec<f64>>, Error> {
    let mut out = vec![vec![0.0; els.len()]; els.len()];
    for i in 0..els.len() {
        for j in i + 1..els.len() {
            let d = distance(a, &els[i], &els[j])?;
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    Ok(out)
}

/// The class graph behind the bounded-segment oracle: every configuration
/// `(w, x)` with `w` normal of length at most the build depth, grouped by
/// its normal form. Built once, queried per source element.
pub struct SegmentOracle {
    ids: BTreeMap<NormalElement, usize>,
    copies: Vec<Vec<usize>>,
    nx: usize,
}

impl SegmentOracle {
    pub fn build(a: &PartialAction, depth: usize) -> Result<Self, Error> {
        if !a.is_confluent() {
            return Err(Error::NotConfluent);
        }
        let words = normal_words_up_to(a.presentation(), depth);
        let nx = a.space().len();
        let mut ids: BTreeMap<NormalElement, usize> = BTreeMap::new();
        let mut copies = vec![vec![0usize; nx]; words.len()];
        for (wi, w) in words.iter().enumerate() {
            for x in 0..nx {
                let nf = a.normalize_config(&Config::new(w.clone(), x));
                let next = ids.len();
                let id = *ids.entry(nf).or_insert(next);
                copies[wi][x] = id;
            }
        }
        Ok(SegmentOracle { ids, copies, nx })
    }

    pub fn class_of(&self, el: &NormalElement) -> Option<usize> {
        self.ids.get(el).copied()
    }

    /// Minimum path lengths from `source` after each move count, one vector
    /// per round: `rounds[k][class]` is the infimum over chains of at most
    /// `k` moves within orbit copies.
    pub fn rounds_from(
        &self,
        a: &PartialAction,
        source: &NormalElement,
        max_segments: usize,
    ) -> Result<Vec<Vec<f64>>, Error> {
        let m = a.space().metric().ok_or(Error::MissingMetric)?;
        let src = self
            .class_of(source)
            .ok_or_else(|| Error::TooLarge("oracle depth does not cover the source".into()))?;
        let mut dist = vec![f64::INFINITY; self.ids.len()];
        dist[src] = 0.0;
        let mut rounds = vec![dist.clone()];
        for _ in 0..max_segments {
            let prev = dist.clone();
            for row in &self.copies {
                for x in 0..self.nx {
                    if prev[row[x]].is_infinite() {
                        continue;
                    }
                    for y in 0..self.nx {
                        let nd = prev[row[x]] + m.dist(x, y);
                        if nd < dist[row[y]] {
                            dist[row[y]] = nd;
                        }
                    }
                }
            }
            rounds.push(dist.clone());
        }
        Ok(rounds)
    }
}

/// Oracle: the minimum length over chains of at most `max_segments` moves
/// within orbit copies, evaluated on the equivalence classes of the
/// truncation at depth `max(lg) + max_segments`. An upper bound on the
/// distance, equal to it at sufficient depth.
pub fn distance_bruteforce(
    a: &PartialAction,
    el1: &NormalElement,
    el2: &NormalElement,
    max_segments: usize,
) -> Result<f64, Error> {
    require_confluent_metric(a)?;
    require_normal(a, el1)?;
    require_normal(a, el2)?;
    if el1 == el2 {
        return Ok(0.0);
    }
    let depth = el1.lg().max(el2.lg()) + max_segments;
    let oracle = SegmentOracle::build(a, depth)?;
    let rounds = oracle.rounds_from(a, el1, max_segments)?;
    let tgt = oracle
        .class_of(el2)
        .ok_or_else(|| Error::TooLarge("oracle depth does not cover the target".into()))?;
    Ok(rounds[max_segments][tgt])
}

/// Closed-form distance for group actions:
/// `D(u·x, v·y) = inf ( d(y, x_1) + Σ d(g_i(x_i), x_{i+1}) )` where
/// `g_k…g_1` is the normal form of `u⁻¹v`, `x_i` ranges over `dom(g_i)` and
/// `x_{k+1} = x`. Evaluated by exhaustive enumeration of the tuples.
pub fn distance_group_formula(
    a: &PartialAction,
    u: &Word,
    v: &Word,
    x: usize,
    y: usize,
) -> Result<f64, Error> {
    let m = a.space().metric().ok_or(Error::MissingMetric)?;
    let p = a.presentation();
    let uinv = p.inverse_word(u)?;
    let w = p.normalize(&uinv.concat(v));
    // letters in application order: g_1 first
    let gens: Vec<GeneratorId> = w.letters().iter().rev().copied().collect();
    let doms: Vec<Vec<usize>> = gens.iter().map(|g| a.gen_map(*g).dom().collect()).collect();
    let mut best = f64::INFINITY;
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        a: &PartialAction,
        m: &WeakPseudometric,
        gens: &[GeneratorId],
        doms: &[Vec<usize>],
        i: usize,
        carry: usize,
        cost: f64,
        x: usize,
        best: &mut f64,
    ) {
        if i == gens.len() {
            let total = cost + m.dist(carry, x);
            if total < *best {
                *best = total;
            }
            return;
        }
        for &xi in &doms[i] {
            let step = cost + m.dist(carry, xi);
            if step.is_finite() && step < *best {
                recurse(
                    a,
                    m,
                    gens,
                    doms,
                    i + 1,
                    a.apply_gen(gens[i], xi).unwrap(),
                    step,
                    x,
                    best,
                );
            }
        }
    }
    recurse(a, m, &gens, &doms, 0, y, 0.0, x, &mut best);
    Ok(best)
}

/// One move inside an orbit copy.
#[derive(Clone, PartialEq, Debug)]
pub struct GeodesicSegment {
    pub word: Word,
    pub from: usize,
    pub to: usize,
}

/// The exhaustive normality patterns of reduced distance-realizing paths.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathForm {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
}

impl PathForm {
    pub fn name(self) -> &'static str {
        match self {
            PathForm::A1 => "A1",
            PathForm::A2 => "A2",
            PathForm::A3 => "A3",
            PathForm::A4 => "A4",
            PathForm::A5 => "A5",
            PathForm::A6 => "A6",
            PathForm::A7 => "A7",
        }
    }
}

/// A reduced path realizing a distance exactly.
#[derive(Clone, Debug)]
pub struct GeodesicWitness {
    pub segments: Vec<GeodesicSegment>,
    pub form: PathForm,
    pub total: f64,
}

/// Extract a distance-realizing path; `None` iff the distance is infinite.
/// The action must be confluent and non-expansive: path reductions rely on
/// generators not increasing distances.
pub fn geodesic(
    a: &PartialAction,
    el1: &NormalElement,
    el2: &NormalElement,
) -> Result<Option<GeodesicWitness>, Error> {
    let m = require_confluent_metric(a)?;
    require_normal(a, el1)?;
    require_normal(a, el2)?;
    if el1 == el2 {
        return Ok(Some(GeodesicWitness {
            segments: Vec::new(),
            form: PathForm::A3,
            total: 0.0,
        }));
    }
    let g = PrefixGraph::build(a, el1, el2);
    let src = g.node(&el1.word, el1.point);
    let tgt = g.node(&el2.word, el2.point);
    let (dist, path) = g.shortest(src, tgt);
    let Some(path) = path else { return Ok(None) };

    // fold the node path into copy visits
    let mut segments: Vec<GeodesicSegment> = Vec::new();
    let (mut wi, mut entry, mut cur) = (path[0] / g.nx, path[0] % g.nx, path[0] % g.nx);
    for &node in &path[1..] {
        let (nwi, nx_) = (node / g.nx, node % g.nx);
        if nwi == wi {
            cur = nx_;
        } else {
            if entry != cur {
                segments.push(GeodesicSegment {
                    word: g.words[wi].clone(),
                    from: entry,
                    to: cur,
                });
            }
            wi = nwi;
            entry = nx_;
            cur = nx_;
        }
    }
    if entry != cur {
        segments.push(GeodesicSegment {
            word: g.words[wi].clone(),
            from: entry,
            to: cur,
        });
    }

    reduce_segments(a, &mut segments);
    let total: f64 = segments.iter().map(|s| m.dist(s.from, s.to)).sum();
    let form = classify(a, &segments).unwrap_or(PathForm::A3);
    debug_assert!((total - dist).abs() <= TOL);
    Ok(Some(GeodesicWitness {
        segments,
        form,
        total,
    }))
}

/// Normalize a segment list to a reduced path: push both-reducible segments
/// down one letter, merge adjacent segments meeting in the same
/// configuration, and drop stationary segments.
fn reduce_segments(a: &PartialAction, segments: &mut Vec<GeodesicSegment>) {
    loop {
        let mut changed = false;
        for s in segments.iter_mut() {
            while let Some(g1) = s.word.last() {
                match (a.apply_gen(g1, s.from), a.apply_gen(g1, s.to)) {
                    (Some(f2), Some(t2)) => {
                        s.word = s.word.imprefix().unwrap();
                        s.from = f2;
                        s.to = t2;
                        changed = true;
                    }
                    _ => break,
                }
            }
        }
        let before = segments.len();
        segments.retain(|s| s.from != s.to);
        let mut i = 0;
        while i + 1 < segments.len() {
            if segments[i].word == segments[i + 1].word && segments[i].to == segments[i + 1].from {
                let merged = GeodesicSegment {
                    word: segments[i].word.clone(),
                    from: segments[i].from,
                    to: segments[i + 1].to,
                };
                segments.splice(i..=i + 1, [merged]);
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed && segments.len() == before {
            break;
        }
    }
}

/// Match the normality pattern of a reduced path against the seven forms.
fn classify(a: &PartialAction, segments: &[GeodesicSegment]) -> Option<PathForm> {
    if segments.is_empty() {
        return Some(PathForm::A3);
    }
    let pat: Vec<(bool, bool)> = segments
        .iter()
        .map(|s| {
            (
                a.config_is_normal(&Config::new(s.word.clone(), s.from)),
                a.config_is_normal(&Config::new(s.word.clone(), s.to)),
            )
        })
        .collect();
    let nn = |p: &(bool, bool)| p.0 && p.1;
    let nr = |p: &(bool, bool)| p.0 && !p.1;
    let rn = |p: &(bool, bool)| !p.0 && p.1;
    if pat.iter().any(|p| !p.0 && !p.1) {
        return None;
    }
    let k = pat.len();
    if k == 1 && nn(&pat[0]) {
        return Some(PathForm::A3);
    }
    if pat.iter().all(nr) {
        return Some(PathForm::A1);
    }
    if pat.iter().all(rn) {
        return Some(PathForm::A2);
    }
    if pat[..k - 1].iter().all(nr) && nn(&pat[k - 1]) {
        return Some(PathForm::A4);
    }
    if nn(&pat[0]) && pat[1..].iter().all(rn) {
        return Some(PathForm::A5);
    }
    if let Some(mid) = pat.iter().position(nn) {
        if mid > 0 && mid < k - 1 && pat[..mid].iter().all(nr) && pat[mid + 1..].iter().all(rn) {
            return Some(PathForm::A6);
        }
        return None;
    }
    // no doubly-normal segment: a descending run joined to an ascending run
    let split = pat.iter().position(rn)?;
    if split > 0 && pat[..split].iter().all(nr) && pat[split..].iter().all(rn) {
        return Some(PathForm::A7);
    }
    None
}

/// Separation check over a truncation: the minimum pairwise distance and the
/// layer property (no zero distance across distinct words).
#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub element_count: usize,
    pub min_distance: f64,
    pub separated: bool,
    pub layer_ok: bool,
    pub witness: Option<(NormalElement, NormalElement, f64)>,
}

impl SeparationReport {
    pub fn pass(&self) -> bool {
        self.separated && self.layer_ok
    }
}

pub fn check_separated(a: &PartialAction, bound: usize) -> Result<SeparationReport, Error> {
    require_confluent_metric(a)?;
    let elements = enumerate_truncation(a, bound).elements;
    let mut min = f64::INFINITY;
    let mut separated = true;
    let mut layer_ok = true;
    let mut witness = None;
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            let d = distance(a, &elements[i], &elements[j])?;
            if d < min {
                min = d;
                witness = Some((elements[i].clone(), elements[j].clone(), d));
            }
            if d == 0.0 {
                separated = false;
                if elements[i].word != elements[j].word {
                    layer_ok = false;
                }
            }
        }
    }
    Ok(SeparationReport {
        element_count: elements.len(),
        min_distance: min,
        separated,
        layer_ok,
        witness,
    })
}

/// One failed comparison in the local isometry check.
#[derive(Clone, Debug)]
pub struct LocalIsometryViolation {
    pub x: usize,
    pub y: usize,
    pub distance: f64,
    pub lower: f64,
    pub upper: f64,
    pub in_ball: bool,
}

#[derive(Clone, Debug)]
pub struct LocalIsometryReport {
    pub word: Word,
    pub checked_pairs: usize,
    pub violations: Vec<LocalIsometryViolation>,
}

impl LocalIsometryReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify, for each `x` in the copy of `u` with positive distance to the
/// domain of the rightmost letter, that the copy map is isometric inside
/// that ball, together with the two-sided distance bound
/// `min(d(x,y), d(x,D)+d(y,D)) ≤ D(u·x, u·y) ≤ d(x,y)` for all `y`.
pub fn check_local_isometry(a: &PartialAction, u: &Word) -> Result<LocalIsometryReport, Error> {
    let m = require_confluent_metric(a)?;
    if u.is_empty() {
        return Ok(LocalIsometryReport {
            word: u.clone(),
            checked_pairs: 0,
            violations: Vec::new(),
        });
    }
    let r_set: Vec<usize> = a.r_set(u)?.into_iter().collect();
    let g1 = u.last().unwrap();
    let dom1: Vec<usize> = a.gen_map(g1).dom().collect();
    let mut violations = Vec::new();
    let mut checked = 0;
    for &x in &r_set {
        let eps = m.dist_to_set(x, &dom1);
        for &y in &r_set {
            if y == x {
                continue;
            }
            checked += 1;
            let el_x = NormalElement {
                word: u.clone(),
                point: x,
            };
            let el_y = NormalElement {
                word: u.clone(),
                point: y,
            };
            let big_d = distance(a, &el_x, &el_y)?;
            let direct = m.dist(x, y);
            let detour = eps + m.dist_to_set(y, &dom1);
            let lower = direct.min(detour);
            let in_ball = eps > 0.0 && direct < eps;
            let upper_ok = big_d <= direct + TOL;
            let lower_ok = lower <= big_d + TOL;
            let ball_ok = !in_ball || (big_d - direct).abs() <= TOL;
            if !(upper_ok && lower_ok && ball_ok) {
                violations.push(LocalIsometryViolation {
                    x,
                    y,
                    distance: big_d,
                    lower,
                    upper: direct,
                    in_ball,
                });
            }
        }
    }
    Ok(LocalIsometryReport {
        word: u.clone(),
        checked_pairs: checked,
        violations,
    })
}

/// A pushout metric produced by [`glue`].
#[derive(Clone, Debug)]
pub struct GluedMetric {
    pub metric: WeakPseudometric,
    /// glued index of each point of the first space
    pub left_index: Vec<usize>,
    /// glued index of each point of the second space
    pub right_index: Vec<usize>,
    /// how many glued points come from the first space (the unidentified ones)
    pub left_count: usize,
}

/// Glue two weak pseudometrics along an isometric partial identification by
/// globalizing the free action of one generator that carries the identified
/// part of the first space onto the second.
pub fn glue(
    m1: &WeakPseudometric,
    m2: &WeakPseudometric,
    ident: &[(usize, usize)],
) -> Result<GluedMetric, Error> {
    let (n1, n2) = (m1.size(), m2.size());
    let mut seen1 = BTreeSet::new();
    let mut seen2 = BTreeSet::new();
    for &(z1, z2) in ident {
        if z1 >= n1 || z2 >= n2 {
            return Err(Error::BadPoint);
        }
        if !seen1.insert(z1) || !seen2.insert(z2) {
            return Err(Error::BadIdent);
        }
    }
    for &(z1, z2) in ident {
        for &(w1, w2) in ident {
            if m1.dist(z1, w1) != m2.dist(z2, w2) {
                return Err(Error::NonIsometricIdent(z1.to_string(), z2.to_string()));
            }
        }
    }

    // disjoint union metric, infinite across the two blocks
    let total = n1 + n2;
    let mut rows = vec![vec![f64::INFINITY; total]; total];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i == j {
                *cell = 0.0;
            } else if i < n1 && j < n1 {
                *cell = m1.dist(i, j);
            } else if i >= n1 && j >= n1 {
                *cell = m2.dist(i - n1, j - n1);
            }
        }
    }
    let union_metric = WeakPseudometric::new(rows)?;
    let names: Vec<String> = (0..total).map(|i| format!("pt{i}")).collect();
    let space = Space::new(names)?.with_metric(union_metric)?;

    let p = crate::words::Presentation::new(
        vec!["glue".into(), "glue_inv".into()],
        vec!["glue".into(), "glue_inv".into()],
        vec![
            (vec!["glue".into(), "glue_inv".into()], vec![]),
            (vec!["glue_inv".into(), "glue".into()], vec![]),
        ],
    )?
    .with_inverses(&[
        ("glue".into(), "glue_inv".into()),
        ("glue_inv".into(), "glue".into()),
    ])?;
    let fwd: Vec<(usize, usize)> = ident.iter().map(|&(z1, z2)| (z1, n1 + z2)).collect();
    let bwd: Vec<(usize, usize)> = ident.iter().map(|&(z1, z2)| (n1 + z2, z1)).collect();
    let gens = vec![
        crate::paction::PartialGenMap::from_pairs(GeneratorId(0), total, &fwd)?,
        crate::paction::PartialGenMap::from_pairs(GeneratorId(1), total, &bwd)?,
    ];
    let a = PartialAction::new(p, space, gens)?;

    // representatives of the pushout inside the globalization
    let ident_map: BTreeMap<usize, usize> = ident.iter().copied().collect();
    let gword = a.presentation().parse_word("glue")?;
    let mut elements = Vec::new();
    let mut left_index = vec![0usize; n1];
    let mut next = 0usize;
    for x in 0..n1 {
        if !ident_map.contains_key(&x) {
            elements.push(NormalElement {
                word: gword.clone(),
                point: x,
            });
            left_index[x] = next;
            next += 1;
        }
    }
    let left_count = next;
    let mut right_index = vec![0usize; n2];
    for y in 0..n2 {
        elements.push(NormalElement::embed(n1 + y));
        right_index[y] = next;
        next += 1;
    }
    for (&z1, &z2) in &ident_map {
        left_index[z1] = right_index[z2];
    }

    let rows = distance_matrix(&a, &elements)?;
    Ok(GluedMetric {
        metric: WeakPseudometric::new(rows)?,
        left_index,
        right_index,
        left_count,
    })
}

/// Result of one homogenization step.
#[derive(Debug)]
pub struct Homogenization {
    pub action: PartialAction,
    pub truncation: Truncation,
    pub metric: WeakPseudometric,
    /// every input map extends: it agrees with the action on its domain,
    /// stays inside the next layer, and acts isometrically on the previous
    /// layer
    pub gamma_extends: bool,
    pub embedding_isometric: bool,
}

const MORPHISM_CAP: usize = 10_000;

/// Close a family of partial isometries into a finite groupoid of maps, build
/// the induced action, and materialize the truncation at `bound` with its
/// distance matrix.
pub fn homogenize_step(
    space: Space,
    gamma: &[(String, BTreeMap<usize, usize>)],
    bound: usize,
) -> Result<Homogenization, Error> {
    let m = space.metric().ok_or(Error::MissingMetric)?.clone();
    #[derive(Clone, PartialEq, Eq)]
    struct M {
        dom: BTreeSet<usize>,
        cod: BTreeSet<usize>,
        map: BTreeMap<usize, usize>,
        name: String,
    }
    let mut closure: Vec<M> = Vec::new();
    let push = |closure: &mut Vec<M>, cand: M| -> Result<bool, Error> {
        let is_id = cand.dom == cand.cod && cand.map.iter().all(|(k, v)| k == v);
        if is_id {
            return Ok(false);
        }
        if closure
            .iter()
            .any(|m| m.dom == cand.dom && m.cod == cand.cod && m.map == cand.map)
        {
            return Ok(false);
        }
        if closure.len() >= MORPHISM_CAP {
            return Err(Error::TooLarge("morphism closure".into()));
        }
        closure.push(cand);
        Ok(true)
    };
    for (name, map) in gamma {
        if map.is_empty() {
            return Err(Error::EmptyDomainMap(name.clone()));
        }
        for (&x, &y) in map {
            if x >= space.len() || y >= space.len() {
                return Err(Error::BadPoint);
            }
        }
        for (&x1, &y1) in map {
            for (&x2, &y2) in map {
                if m.dist(y1, y2) != m.dist(x1, x2) {
                    return Err(Error::NonIsometricMap(name.clone()));
                }
            }
        }
        let values: BTreeSet<usize> = map.values().copied().collect();
        if values.len() != map.len() {
            return Err(Error::BadMorphism(name.clone(), "must be injective".into()));
        }
        let dom: BTreeSet<usize> = map.keys().copied().collect();
        let inv: BTreeMap<usize, usize> = map.iter().map(|(&x, &y)| (y, x)).collect();
        push(
            &mut closure,
            M {
                dom: dom.clone(),
                cod: values.clone(),
                map: map.clone(),
                name: name.clone(),
            },
        )?;
        push(
            &mut closure,
            M {
                dom: values,
                cod: dom,
                map: inv,
                name: format!("{name}'"),
            },
        )?;
    }
    // close under composition
    let mut changed = true;
    while changed {
        changed = false;
        let snapshot = closure.clone();
        for f in &snapshot {
            for g in &snapshot {
                if f.dom != g.cod {
                    continue;
                }
                let map: BTreeMap<usize, usize> =
                    g.map.iter().map(|(&x, &y)| (x, f.map[&y])).collect();
                let cand = M {
                    dom: g.dom.clone(),
                    cod: f.cod.clone(),
                    map,
                    name: format!("{}.{}", f.name, g.name),
                };
                if push(&mut closure, cand)? {
                    changed = true;
                }
            }
        }
    }

    let mut objects: Vec<BTreeSet<usize>> = Vec::new();
    let obj_id = |objects: &mut Vec<BTreeSet<usize>>, o: &BTreeSet<usize>| -> usize {
        if let Some(i) = objects.iter().position(|x| x == o) {
            i
        } else {
            objects.push(o.clone());
            objects.len() - 1
        }
    };
    let morphisms: Vec<Morphism> = closure
        .iter()
        .map(|mm| Morphism {
            name: mm.name.clone(),
            dom_obj: obj_id(&mut objects, &mm.dom),
            cod_obj: obj_id(&mut objects, &mm.cod),
            map: mm.map.clone(),
        })
        .collect();

    let action = if morphisms.is_empty() {
        let p = crate::words::Presentation::new(vec![], vec![], vec![])?;
        PartialAction::new(p, space, vec![])?
    } else {
        from_category(space, &objects, &morphisms)?
    };

    let truncation = enumerate_truncation(&action, bound);
    let rows = distance_matrix(&action, &truncation.elements)?;
    let metric = WeakPseudometric::new(rows)?;

    let mut embedding_isometric = true;
    for x in 0..action.space().len() {
        for y in 0..action.space().len() {
            let d = distance(&action, &NormalElement::embed(x), &NormalElement::embed(y))?;
            if (d - action.space().metric().unwrap().dist(x, y)).abs() > TOL {
                embedding_isometric = false;
            }
        }
    }

    let mut gamma_extends = true;
    let prev = if bound == 0 {
        Vec::new()
    } else {
        enumerate_truncation(&action, bound - 1).elements
    };
    for (_name, map) in gamma {
        // the input map may have landed in the closure under another name
        let gid = (0..action.presentation().generator_count())
            .map(|i| GeneratorId(i as u32))
            .find(|g| {
                let gm = action.gen_map(*g);
                gm.dom().count() == map.len() && map.iter().all(|(&x, &y)| gm.apply(x) == Some(y))
            });
        let Some(gid) = gid else {
            gamma_extends = false;
            continue;
        };
        let gw = Word::single(gid);
        for (&x, &y) in map {
            if glob::act_on_element(&action, &gw, &NormalElement::embed(x))
                != NormalElement::embed(y)
            {
                gamma_extends = false;
            }
        }
        for el in &prev {
            if glob::act_on_element(&action, &gw, el).lg() > bound {
                gamma_extends = false;
            }
        }
        for e1 in &prev {
            for e2 in &prev {
                let before = distance(&action, e1, e2)?;
                let after = distance(
                    &action,
                    &glob::act_on_element(&action, &gw, e1),
                    &glob::act_on_element(&action, &gw, e2),
                )?;
                let same =
                    (before.is_infinite() && after.is_infinite()) || (after - before).abs() <= TOL;
                if !same {
                    gamma_extends = false;
                }
            }
        }
    }

    Ok(Homogenization {
        action,
        truncation,
        metric,
        gamma_extends,
        embedding_isometric,
    })
}
