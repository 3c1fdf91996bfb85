//! Partial monoid actions on a finite point set.
//!
//! A partial action pairs a presentation with one partial self-map of the
//! point set per generator. Configurations `(word, point)` rewrite by the
//! word rules and by applying the rightmost letter to the point; confluence
//! of the combined system is decided by the word-level critical pairs plus
//! the mixed peaks `(lhs, x)` with `x` in the domain of the rightmost letter
//! of `lhs`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use crate::error::Error;
use crate::fintop::FiniteTopology;
use crate::glob::{NormalElement, QuotientGlobalization};
use crate::metglob::WeakPseudometric;
use crate::words::{ConfluenceReport, ConfluenceStatus, GeneratorId, Presentation, Word};

/// A finite point set with optional metric and topological structure.
#[derive(Clone, Debug)]
pub struct Space {
    names: Vec<String>,
    metric: Option<WeakPseudometric>,
    topology: Option<FiniteTopology>,
}

impl Space {
    pub fn new(names: Vec<String>) -> Result<Self, Error> {
        let mut seen = BTreeSet::new();
        for n in &names {
            if n.is_empty() {
                return Err(Error::EmptyName);
            }
            if !seen.insert(n.clone()) {
                return Err(Error::DuplicateName(n.clone()));
            }
        }
        Ok(Space {
            names,
            metric: None,
            topology: None,
        })
    }

    pub fn with_metric(mut self, metric: WeakPseudometric) -> Result<Self, Error> {
        if metric.size() != self.names.len() {
            return Err(Error::BadMatrix);
        }
        self.metric = Some(metric);
        Ok(self)
    }

    pub fn with_topology(mut self, topology: FiniteTopology) -> Result<Self, Error> {
        if topology.size() != self.names.len() {
            return Err(Error::BadTopology(
                "point count does not match the topology".into(),
            ));
        }
        self.topology = Some(topology);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn point_name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn point_id(&self, name: &str) -> Result<usize, Error> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn metric(&self) -> Option<&WeakPseudometric> {
        self.metric.as_ref()
    }

    pub fn topology(&self) -> Option<&FiniteTopology> {
        self.topology.as_ref()
    }
}

/// The partial self-map attached to one generator.
#[derive(Clone, Debug)]
pub struct PartialGenMap {
    pub gen: GeneratorId,
    map: Vec<Option<usize>>,
}

impl PartialGenMap {
    pub fn new(gen: GeneratorId, map: Vec<Option<usize>>) -> Self {
        PartialGenMap { gen, map }
    }

    pub fn from_pairs(
        gen: GeneratorId,
        size: usize,
        pairs: &[(usize, usize)],
    ) -> Result<Self, Error> {
        let mut map = vec![None; size];
        for &(x, y) in pairs {
            if x >= size || y >= size {
                return Err(Error::BadPoint);
            }
            map[x] = Some(y);
        }
        Ok(PartialGenMap { gen, map })
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map.get(x).copied().flatten()
    }

    pub fn dom(&self) -> impl Iterator<Item = usize> + '_ {
        self.map
            .iter()
            .enumerate()
            .filter_map(|(x, y)| y.map(|_| x))
    }

    pub fn dom_set(&self) -> BTreeSet<usize> {
        self.dom().collect()
    }

    pub fn dom_is_empty(&self) -> bool {
        self.map.iter().all(|y| y.is_none())
    }
}

/// A configuration: a word waiting to act on a point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Config {
    pub word: Word,
    pub point: usize,
}

impl Config {
    pub fn new(word: Word, point: usize) -> Self {
        Config { word, point }
    }
}

/// A mixed reduction fork whose two sides normalize differently.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ConfigFork {
    pub peak: Config,
    pub reduct1: Config,
    pub reduct2: Config,
    pub nf1: NormalElement,
    pub nf2: NormalElement,
}

/// Confluence verdict for a partial action: the word-level report plus the
/// mixed critical pairs.
#[derive(Clone, Debug)]
pub struct ActionConfluenceReport {
    pub word: ConfluenceReport,
    pub mixed: Vec<ConfigFork>,
}

impl ActionConfluenceReport {
    pub fn status(&self) -> ConfluenceStatus {
        if self.word.is_confluent() && self.mixed.is_empty() {
            ConfluenceStatus::Confluent
        } else {
            ConfluenceStatus::NotConfluent
        }
    }

    pub fn is_confluent(&self) -> bool {
        self.status() == ConfluenceStatus::Confluent
    }
}

/// A presentation acting partially on a finite space.
#[derive(Debug)]
pub struct PartialAction {
    presentation: Presentation,
    space: Space,
    gens: Vec<PartialGenMap>,
    confluent: OnceLock<bool>,
}

impl PartialAction {
    pub fn new(
        presentation: Presentation,
        space: Space,
        gens: Vec<PartialGenMap>,
    ) -> Result<Self, Error> {
        if gens.len() != presentation.generator_count() {
            return Err(Error::BadActionShape);
        }
        for (i, g) in gens.iter().enumerate() {
            if g.gen.index() != i {
                return Err(Error::BadActionShape);
            }
            if g.map.len() != space.len() {
                return Err(Error::BadActionShape);
            }
            for y in g.map.iter().flatten() {
                if *y >= space.len() {
                    return Err(Error::BadPoint);
                }
            }
        }
        Ok(PartialAction {
            presentation,
            space,
            gens,
            confluent: OnceLock::new(),
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn gen_map(&self, g: GeneratorId) -> &PartialGenMap {
        &self.gens[g.index()]
    }

    pub fn gen_maps(&self) -> &[PartialGenMap] {
        &self.gens
    }

    /// Apply a single generator.
    pub fn apply_gen(&self, g: GeneratorId, x: usize) -> Option<usize> {
        self.gens[g.index()].apply(x)
    }

    /// All one-step reducts of a configuration: word-rule steps on the word
    /// part plus the action step at the rightmost letter when enabled.
    pub fn config_reducts(&self, c: &Config) -> BTreeSet<Config> {
        let mut out: BTreeSet<Config> = self
            .presentation
            .one_step_reducts(&c.word)
            .into_iter()
            .map(|w| Config::new(w, c.point))
            .collect();
        if let Some(g) = c.word.last() {
            if let Some(y) = self.apply_gen(g, c.point) {
                out.insert(Config::new(c.word.imprefix().unwrap(), y));
            }
        }
        out
    }

    pub fn config_is_normal(&self, c: &Config) -> bool {
        if let Some(g) = c.word.last() {
            if self.apply_gen(g, c.point).is_some() {
                return false;
            }
        }
        self.presentation.is_normal(&c.word)
    }

    /// Normalize by the deterministic strategy: the action step at the
    /// rightmost letter when enabled, otherwise the leftmost word rule.
    pub fn normalize_config(&self, c: &Config) -> NormalElement {
        let trace = self.reduction_trace(c);
        let last = trace.last().unwrap();
        NormalElement {
            word: last.word.clone(),
            point: last.point,
        }
    }

    /// The deterministic reduction sequence from `c` to its normal form,
    /// including both endpoints.
    pub fn reduction_trace(&self, c: &Config) -> Vec<Config> {
        let cap = self.presentation.step_cap();
        let mut steps = 0u64;
        let mut trace = vec![c.clone()];
        loop {
            let cur = trace.last().unwrap().clone();
            steps += 1;
            if steps > cap {
                panic!("reduction step budget exhausted; rule set does not terminate");
            }
            if let Some(g) = cur.word.last() {
                if let Some(y) = self.apply_gen(g, cur.point) {
                    trace.push(Config::new(cur.word.imprefix().unwrap(), y));
                    continue;
                }
            }
            if self.presentation.is_normal(&cur.word) {
                break;
            }
            trace.push(Config::new(self.leftmost_word_step(&cur.word), cur.point));
        }
        trace
    }

    fn leftmost_word_step(&self, w: &Word) -> Word {
        for pos in 0..w.lg() {
            for rule in self.presentation.rules() {
                if pos + rule.lhs.lg() <= w.lg()
                    && w.letters()[pos..pos + rule.lhs.lg()] == rule.lhs.letters()[..]
                {
                    let mut v = Vec::with_capacity(w.lg() - rule.lhs.lg() + rule.rhs.lg());
                    v.extend_from_slice(&w.letters()[..pos]);
                    v.extend_from_slice(rule.rhs.letters());
                    v.extend_from_slice(&w.letters()[pos + rule.lhs.lg()..]);
                    return Word::new(v);
                }
            }
        }
        unreachable!("caller checked that a redex exists")
    }

    /// Normalize choosing each step with the supplied picker; used to test
    /// strategy independence.
    pub fn normalize_config_with<F: FnMut(&[Config]) -> usize>(
        &self,
        c: &Config,
        mut pick: F,
    ) -> NormalElement {
        let cap = self.presentation.step_cap();
        let mut steps = 0u64;
        let mut cur = c.clone();
        loop {
            let reducts: Vec<Config> = self.config_reducts(&cur).into_iter().collect();
            if reducts.is_empty() {
                return NormalElement {
                    word: cur.word,
                    point: cur.point,
                };
            }
            let i = pick(&reducts) % reducts.len();
            cur = reducts[i].clone();
            steps += 1;
            if steps > cap {
                panic!("reduction step budget exhausted; rule set does not terminate");
            }
        }
    }

    /// Word-level confluence plus all mixed critical pairs: for each rule
    /// `l -> r` and each point `x` in the domain of the rightmost letter of
    /// `l`, the configurations `(r, x)` and `(imprefix(l), g1(x))` must
    /// normalize identically.
    pub fn check_confluence(&self) -> ActionConfluenceReport {
        let word = self.presentation.check_confluence();
        let mut mixed = BTreeSet::new();
        for rule in self.presentation.rules() {
            let Some(g1) = rule.lhs.last() else { continue };
            for x in self.gens[g1.index()].dom() {
                let y = self.apply_gen(g1, x).unwrap();
                let peak = Config::new(rule.lhs.clone(), x);
                let reduct1 = Config::new(rule.rhs.clone(), x);
                let reduct2 = Config::new(rule.lhs.imprefix().unwrap(), y);
                let nf1 = self.normalize_config(&reduct1);
                let nf2 = self.normalize_config(&reduct2);
                if nf1 != nf2 {
                    mixed.insert(ConfigFork {
                        peak,
                        reduct1,
                        reduct2,
                        nf1,
                        nf2,
                    });
                }
            }
        }
        ActionConfluenceReport {
            word,
            mixed: mixed.into_iter().collect(),
        }
    }

    /// Cached confluence verdict.
    pub fn is_confluent(&self) -> bool {
        *self
            .confluent
            .get_or_init(|| self.check_confluence().is_confluent())
    }

    /// The partial action of an arbitrary word, defined through reduction:
    /// `u · x` is defined iff the configuration `(u, x)` reduces to a point.
    pub fn act(&self, u: &Word, x: usize) -> Option<usize> {
        let nf = self.normalize_config(&Config::new(u.clone(), x));
        nf.word.is_empty().then_some(nf.point)
    }

    /// Domain of a normal word, by the recursion
    /// `dom(e) = X`, `dom(u) = g1^{-1}[dom(imprefix(u))]`.
    pub fn dom_of(&self, u: &Word) -> Result<BTreeSet<usize>, Error> {
        if !self.presentation.is_normal(u) {
            return Err(Error::NotNormal(self.presentation.format_word(u)));
        }
        let mut dom: BTreeSet<usize> = (0..self.space.len()).collect();
        for g in u.letters().iter().rev() {
            dom = self.gens[g.index()]
                .dom()
                .filter(|&x| dom.contains(&self.apply_gen(*g, x).unwrap()))
                .collect();
        }
        Ok(dom)
    }

    /// Points on which a normal word is already normal: everything outside
    /// the domain of its rightmost letter (all of X for the empty word).
    pub fn r_set(&self, u: &Word) -> Result<BTreeSet<usize>, Error> {
        if !self.presentation.is_normal(u) {
            return Err(Error::NotNormal(self.presentation.format_word(u)));
        }
        match u.last() {
            None => Ok((0..self.space.len()).collect()),
            Some(g) => {
                let dom = self.gens[g.index()].dom_set();
                Ok((0..self.space.len()).filter(|x| !dom.contains(x)).collect())
            }
        }
    }

    /// Every generator has a nonempty domain.
    pub fn is_nowhere_degenerate(&self) -> bool {
        self.gens.iter().all(|g| !g.dom_is_empty())
    }

    /// Every generator domain is closed, in the topology when present,
    /// otherwise in the zero-distance closure of the pseudometric.
    pub fn is_closed(&self) -> Result<bool, Error> {
        for g in &self.gens {
            if !self.subset_is_closed(&g.dom_set())? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every generator domain is open; see [`PartialAction::is_closed`].
    pub fn is_open(&self) -> Result<bool, Error> {
        for g in &self.gens {
            if !self.subset_is_open(&g.dom_set())? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn subset_is_closed(&self, set: &BTreeSet<usize>) -> Result<bool, Error> {
        if let Some(t) = self.space.topology() {
            let mask = set.iter().fold(0u64, |m, &x| m | (1 << x));
            return Ok(t.is_closed(mask));
        }
        if let Some(m) = self.space.metric() {
            // closed iff the set contains every point at pseudodistance zero
            for x in 0..self.space.len() {
                if !set.contains(&x) && set.iter().any(|&y| m.dist(x, y) == 0.0) {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        Err(Error::MissingStructure)
    }

    fn subset_is_open(&self, set: &BTreeSet<usize>) -> Result<bool, Error> {
        if let Some(t) = self.space.topology() {
            let mask = set.iter().fold(0u64, |m, &x| m | (1 << x));
            return Ok(t.is_open(mask));
        }
        if let Some(m) = self.space.metric() {
            // open iff the set is a union of zero-distance classes
            for &x in set {
                for y in 0..self.space.len() {
                    if !set.contains(&y) && m.dist(x, y) == 0.0 {
                        return Ok(false);
                    }
                }
            }
            return Ok(true);
        }
        Err(Error::MissingStructure)
    }
}

/// A finite monoid given by its full multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteMonoid {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    unit: usize,
}

impl FiniteMonoid {
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>, unit: usize) -> Result<Self, Error> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        if unit >= n || table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::BadMonoid("table shape".into()));
        }
        for row in &table {
            for &v in row {
                if v >= n {
                    return Err(Error::BadMonoid("entry out of range".into()));
                }
            }
        }
        for i in 0..n {
            if table[unit][i] != i || table[i][unit] != i {
                return Err(Error::BadMonoid(format!("unit law fails at {}", names[i])));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::BadMonoid(format!(
                            "associativity fails at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMonoid { names, table, unit })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn element_name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn element_id(&self, name: &str) -> Result<usize, Error> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }
}

/// A partial action given elementwise for a finite monoid.
#[derive(Clone, Debug)]
pub struct MonoidAction {
    pub monoid: FiniteMonoid,
    pub space: Space,
    maps: Vec<Vec<Option<usize>>>,
}

impl MonoidAction {
    /// Validates the partial-action laws: the unit acts as the identity and
    /// `(uv)·x = u·(v·x)` holds as a strong equation whenever `v·x` is
    /// defined.
    pub fn new(
        monoid: FiniteMonoid,
        space: Space,
        maps: Vec<Vec<Option<usize>>>,
    ) -> Result<Self, Error> {
        if maps.len() != monoid.len() || maps.iter().any(|m| m.len() != space.len()) {
            return Err(Error::InconsistentAction("map table shape".into()));
        }
        for row in &maps {
            for y in row.iter().flatten() {
                if *y >= space.len() {
                    return Err(Error::BadPoint);
                }
            }
        }
        for x in 0..space.len() {
            if maps[monoid.unit()][x] != Some(x) {
                return Err(Error::InconsistentAction(format!(
                    "unit must fix {}",
                    space.point_name(x)
                )));
            }
        }
        for u in 0..monoid.len() {
            for v in 0..monoid.len() {
                for x in 0..space.len() {
                    if let Some(vx) = maps[v][x] {
                        let lhs = maps[monoid.mul(u, v)][x];
                        let rhs = maps[u][vx];
                        if lhs != rhs {
                            return Err(Error::InconsistentAction(format!(
                                "({}·{})·{} disagrees with {}·({}·{})",
                                monoid.element_name(u),
                                monoid.element_name(v),
                                space.point_name(x),
                                monoid.element_name(u),
                                monoid.element_name(v),
                                space.point_name(x)
                            )));
                        }
                    }
                }
            }
        }
        Ok(MonoidAction {
            monoid,
            space,
            maps,
        })
    }

    pub fn apply(&self, u: usize, x: usize) -> Option<usize> {
        self.maps[u][x]
    }
}

/// A morphism between subsets of the point set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    pub name: String,
    pub dom_obj: usize,
    pub cod_obj: usize,
    pub map: BTreeMap<usize, usize>,
}

impl Morphism {
    fn is_identity(&self, objects: &[BTreeSet<usize>]) -> bool {
        self.dom_obj == self.cod_obj
            && self.map.iter().all(|(k, v)| k == v)
            && objects[self.dom_obj]
                .iter()
                .all(|x| self.map.contains_key(x))
    }
}

/// Build the partial action of the monoid generated by a finite category of
/// maps between subsets of the point set. Generators are the (non-identity)
/// morphisms; each composable pair contributes a rule `(f, g) -> (f∘g)`, or
/// `(f, g) -> ()` when the composite is an identity; the action is by
/// evaluation.
pub fn from_category(
    space: Space,
    objects: &[BTreeSet<usize>],
    morphisms: &[Morphism],
) -> Result<PartialAction, Error> {
    for obj in objects {
        for &x in obj {
            if x >= space.len() {
                return Err(Error::BadPoint);
            }
        }
    }
    for m in morphisms {
        if m.dom_obj >= objects.len() || m.cod_obj >= objects.len() {
            return Err(Error::BadMorphism(
                m.name.clone(),
                "object out of range".into(),
            ));
        }
        let dom = &objects[m.dom_obj];
        if m.map.len() != dom.len() || !m.map.keys().all(|k| dom.contains(k)) {
            return Err(Error::BadMorphism(
                m.name.clone(),
                "map must be total on its domain object".into(),
            ));
        }
        if !m.map.values().all(|v| objects[m.cod_obj].contains(v)) {
            return Err(Error::BadMorphism(
                m.name.clone(),
                "image must lie in the codomain object".into(),
            ));
        }
        if m.is_identity(objects) {
            return Err(Error::IdentityMorphism(m.name.clone()));
        }
    }
    for (i, a) in morphisms.iter().enumerate() {
        for b in &morphisms[..i] {
            if a.dom_obj == b.dom_obj && a.cod_obj == b.cod_obj && a.map == b.map {
                return Err(Error::DuplicateMorphism(b.name.clone(), a.name.clone()));
            }
        }
    }

    let names: Vec<String> = morphisms.iter().map(|m| m.name.clone()).collect();
    let mut rules = Vec::new();
    for (fi, f) in morphisms.iter().enumerate() {
        for (gi, g) in morphisms.iter().enumerate() {
            if f.dom_obj != g.cod_obj {
                continue;
            }
            let composite: BTreeMap<usize, usize> =
                g.map.iter().map(|(&x, &y)| (x, f.map[&y])).collect();
            let lhs = Word::new(vec![GeneratorId(fi as u32), GeneratorId(gi as u32)]);
            let is_id = g.dom_obj == f.cod_obj && composite.iter().all(|(k, v)| k == v);
            let rhs = if is_id {
                Word::empty()
            } else {
                let target = morphisms
                    .iter()
                    .position(|m| {
                        m.dom_obj == g.dom_obj && m.cod_obj == f.cod_obj && m.map == composite
                    })
                    .ok_or_else(|| Error::MissingComposite {
                        f: f.name.clone(),
                        g: g.name.clone(),
                    })?;
                Word::single(GeneratorId(target as u32))
            };
            rules.push(crate::words::Rule { lhs, rhs });
        }
    }
    let rank: Vec<usize> = (0..names.len()).collect();
    let presentation = Presentation::from_ids(names, rank, rules)?;
    let gens = morphisms
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut map = vec![None; space.len()];
            for (&x, &y) in &m.map {
                map[x] = Some(y);
            }
            PartialGenMap::new(GeneratorId(i as u32), map)
        })
        .collect();
    PartialAction::new(presentation, space, gens)
}

/// The free homogeneous action: all maps between distinct singleton subsets.
/// The generator sending `{y}` to `{x}` is named by the two point names.
pub fn singleton_homogeneous_action(space: Space) -> Result<PartialAction, Error> {
    let n = space.len();
    if n < 2 {
        return Err(Error::TooFewPoints);
    }
    let objects: Vec<BTreeSet<usize>> = (0..n).map(|x| BTreeSet::from([x])).collect();
    let mut morphisms = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x != y {
                morphisms.push(Morphism {
                    name: format!("{}{}", space.point_name(x), space.point_name(y)),
                    dom_obj: y,
                    cod_obj: x,
                    map: BTreeMap::from([(y, x)]),
                });
            }
        }
    }
    from_category(space, &objects, &morphisms)
}

/// Normal words of length at most `bound`, in canonical order.
pub(crate) fn normal_words_up_to(p: &Presentation, bound: usize) -> Vec<Word> {
    let mut level = vec![Word::empty()];
    let mut out = vec![Word::empty()];
    for _ in 0..bound {
        let mut next = Vec::new();
        for w in &level {
            for g in 0..p.generator_count() {
                let cand = w.push(GeneratorId(g as u32));
                // a fresh left side can only appear as a suffix
                let normal = p.rules().iter().all(|r| {
                    r.lhs.lg() > cand.lg()
                        || cand.letters()[cand.lg() - r.lhs.lg()..] != r.lhs.letters()[..]
                });
                if normal {
                    next.push(cand);
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out.sort_by_key(|w| p.canonical_key(w));
    out
}

/// Triples `(u1, u2, u3)` of normal words of length at most `bound` for which
/// no normal word `w` of length at most `bound` covers all three pairwise
/// orbit intersections `u_i·X ∩ u_{i+1}·X ⊆ w·X` in the globalization.
pub fn triple_condition_check(a: &PartialAction, bound: usize) -> Vec<(Word, Word, Word)> {
    let words = normal_words_up_to(a.presentation(), bound);
    let orbits: Vec<BTreeSet<NormalElement>> = words
        .iter()
        .map(|w| {
            (0..a.space().len())
                .map(|x| a.normalize_config(&Config::new(w.clone(), x)))
                .collect()
        })
        .collect();
    let mut violations = Vec::new();
    for (i1, u1) in words.iter().enumerate() {
        for (i2, u2) in words.iter().enumerate() {
            for (i3, u3) in words.iter().enumerate() {
                let inter = |a: usize, b: usize| -> BTreeSet<NormalElement> {
                    orbits[a].intersection(&orbits[b]).cloned().collect()
                };
                let sides = [inter(i1, i2), inter(i2, i3), inter(i3, i1)];
                let covered = orbits
                    .iter()
                    .any(|w_orbit| sides.iter().all(|s| s.is_subset(w_orbit)));
                if !covered {
                    violations.push((u1.clone(), u2.clone(), u3.clone()));
                }
            }
        }
    }
    violations
}

/// The same triple condition evaluated in the union-find globalization of a
/// finite monoid action; triples range over monoid elements.
pub fn triple_condition_check_quotient(q: &QuotientGlobalization) -> Vec<(usize, usize, usize)> {
    let m = q.monoid().len();
    let orbits: Vec<BTreeSet<usize>> = (0..m).map(|u| q.orbit(u)).collect();
    let mut violations = Vec::new();
    for u1 in 0..m {
        for u2 in 0..m {
            for u3 in 0..m {
                let inter = |a: usize, b: usize| -> BTreeSet<usize> {
                    orbits[a].intersection(&orbits[b]).copied().collect()
                };
                let sides = [inter(u1, u2), inter(u2, u3), inter(u3, u1)];
                let covered = orbits
                    .iter()
                    .any(|w_orbit| sides.iter().all(|s| s.is_subset(w_orbit)));
                if !covered {
                    violations.push((u1, u2, u3));
                }
            }
        }
    }
    violations
}
