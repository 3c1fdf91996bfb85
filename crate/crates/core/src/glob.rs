//! The set-level universal globalization.
//!
//! Points of the globalization are canonical normal configurations
//! `(word, point)`; the monoid acts totally on them by concatenation followed
//! by normalization. For non-confluent actions of finite monoids a union-find
//! quotient over `M × X` provides the fallback model.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::paction::{Config, FiniteMonoid, MonoidAction, PartialAction, Space};
use crate::words::Word;

/// A certified normal configuration; the canonical representation of a point
/// of the globalization.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NormalElement {
    pub word: Word,
    pub point: usize,
}

impl NormalElement {
    /// The canonical image of a point of the base space.
    pub fn embed(x: usize) -> Self {
        NormalElement {
            word: Word::empty(),
            point: x,
        }
    }

    pub fn lg(&self) -> usize {
        self.word.lg()
    }

    pub fn as_config(&self) -> Config {
        Config::new(self.word.clone(), self.point)
    }
}

/// All elements of the globalization of length at most `bound`, in canonical
/// order: word length, then precedence-rank sequence, then point index.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub bound: usize,
    pub elements: Vec<NormalElement>,
}

impl Truncation {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, el: &NormalElement) -> Option<usize> {
        self.elements.iter().position(|e| e == el)
    }
}

/// Act on a globalization element: concatenate on the left and normalize.
pub fn act_on_element(a: &PartialAction, u: &Word, el: &NormalElement) -> NormalElement {
    a.normalize_config(&Config::new(u.concat(&el.word), el.point))
}

/// Two configurations represent the same globalization point.
pub fn is_equivalent(a: &PartialAction, c1: &Config, c2: &Config) -> bool {
    a.normalize_config(c1) == a.normalize_config(c2)
}

/// Enumerate the truncation by depth-first search over normal words, pruning
/// any extension that creates a rule left side; each normal word contributes
/// the points on which it is already normal.
pub fn enumerate_truncation(a: &PartialAction, bound: usize) -> Truncation {
    let p = a.presentation();
    let words = crate::paction::normal_words_up_to(p, bound);
    let mut elements = Vec::new();
    for w in words {
        for x in a.r_set(&w).expect("enumerated words are normal") {
            elements.push(NormalElement {
                word: w.clone(),
                point: x,
            });
        }
    }
    elements.sort_by(|l, r| {
        p.canonical_key(&l.word)
            .cmp(&p.canonical_key(&r.word))
            .then(l.point.cmp(&r.point))
    });
    Truncation { bound, elements }
}

/// The quotient of `M × X` by the equivalence generated by
/// `(uv, x) ~ (u, v·x)` whenever `v·x` is defined, with the induced action
/// `u·[v, x] = [uv, x]`.
#[derive(Clone, Debug)]
pub struct QuotientGlobalization {
    monoid: FiniteMonoid,
    space: Space,
    class_of: Vec<usize>,
    classes: Vec<Vec<(usize, usize)>>,
    action: Vec<Vec<usize>>,
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let mut a = self.find(a);
        let mut b = self.find(b);
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Build the union-find globalization of a finite monoid action.
pub fn finite_monoid_globalization(ma: &MonoidAction) -> QuotientGlobalization {
    let m = ma.monoid.len();
    let n = ma.space.len();
    let node = |u: usize, x: usize| u * n + x;
    let mut uf = UnionFind::new(m * n);
    for u in 0..m {
        for v in 0..m {
            for x in 0..n {
                if let Some(vx) = ma.apply(v, x) {
                    uf.union(node(ma.monoid.mul(u, v), x), node(u, vx));
                }
            }
        }
    }
    // classes keyed by their least member, in increasing order
    let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
    let mut members: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for u in 0..m {
        for x in 0..n {
            let r = uf.find(node(u, x));
            members.entry(r).or_default().push((u, x));
        }
    }
    let mut classes = Vec::new();
    let mut keys: Vec<usize> = members.keys().copied().collect();
    keys.sort_by_key(|r| members[r][0]);
    for (i, r) in keys.iter().enumerate() {
        roots.insert(*r, i);
        classes.push(members[r].clone());
    }
    let mut class_of = vec![0usize; m * n];
    for u in 0..m {
        for x in 0..n {
            class_of[node(u, x)] = roots[&uf.find(node(u, x))];
        }
    }
    let mut action = vec![vec![0usize; classes.len()]; m];
    for (u, row) in action.iter_mut().enumerate() {
        for (c, target) in row.iter_mut().enumerate() {
            let (v, x) = classes[c][0];
            *target = class_of[node(ma.monoid.mul(u, v), x)];
            debug_assert!(classes[c]
                .iter()
                .all(|&(v2, x2)| class_of[node(ma.monoid.mul(u, v2), x2)] == *target));
        }
    }
    QuotientGlobalization {
        monoid: ma.monoid.clone(),
        space: ma.space.clone(),
        class_of,
        classes,
        action,
    }
}

impl QuotientGlobalization {
    pub fn monoid(&self) -> &FiniteMonoid {
        &self.monoid
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, u: usize, x: usize) -> usize {
        self.class_of[u * self.space.len() + x]
    }

    pub fn class_members(&self, c: usize) -> &[(usize, usize)] {
        &self.classes[c]
    }

    pub fn act(&self, u: usize, class: usize) -> usize {
        self.action[u][class]
    }

    /// The orbit `u·X` as a set of classes.
    pub fn orbit(&self, u: usize) -> BTreeSet<usize> {
        (0..self.space.len()).map(|x| self.class_of(u, x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paction::{
        singleton_homogeneous_action, triple_condition_check_quotient, PartialAction, PartialGenMap,
    };
    use crate::words::{GeneratorId, Presentation};

    fn shimrat(n: usize) -> PartialAction {
        let names: Vec<String> = (0..n)
            .map(|i| format!("{}", (b'x' + i as u8) as char))
            .collect();
        singleton_homogeneous_action(Space::new(names).unwrap()).unwrap()
    }

    fn zgluing_monoid() -> PartialAction {
        let p = Presentation::new(vec!["g".into()], vec!["g".into()], vec![]).unwrap();
        let space = Space::new(vec!["p".into(), "q".into()]).unwrap();
        let gens = vec![PartialGenMap::from_pairs(GeneratorId(0), 2, &[(0, 0)]).unwrap()];
        PartialAction::new(p, space, gens).unwrap()
    }

    fn klein_four_monoid_action() -> MonoidAction {
        let names = vec!["e".into(), "u".into(), "v".into(), "uv".into()];
        let table = vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ];
        let monoid = FiniteMonoid::new(names, table, 0).unwrap();
        let space = Space::new(vec!["0".into(), "1".into(), "2".into()]).unwrap();
        let maps = vec![
            vec![Some(0), Some(1), Some(2)],
            vec![Some(0), None, None],
            vec![None, Some(1), None],
            vec![None, None, Some(2)],
        ];
        MonoidAction::new(monoid, space, maps).unwrap()
    }

    #[test]
    fn embed_is_injective() {
        let a = shimrat(3);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(NormalElement::embed(x) == NormalElement::embed(y), x == y);
            }
            assert_eq!(
                act_on_element(&a, &Word::empty(), &NormalElement::embed(x)),
                NormalElement::embed(x)
            );
        }
    }

    #[test]
    fn act_on_element_shimrat() {
        let a = shimrat(3);
        let p = a.presentation();
        let x = a.space().point_id("x").unwrap();
        let y = a.space().point_id("y").unwrap();
        let z = a.space().point_id("z").unwrap();
        let xy = p.parse_word("xy").unwrap();
        assert_eq!(
            act_on_element(&a, &xy, &NormalElement::embed(y)),
            NormalElement::embed(x)
        );
        assert_eq!(
            act_on_element(&a, &xy, &NormalElement::embed(z)),
            NormalElement {
                word: xy.clone(),
                point: z
            }
        );
    }

    #[test]
    fn truncation_levels() {
        let a = zgluing_monoid();
        let y0 = enumerate_truncation(&a, 0);
        assert_eq!(y0.len(), 2);
        assert!(y0.elements.iter().all(|e| e.word.is_empty()));
        let y1 = enumerate_truncation(&a, 1);
        assert_eq!(y1.len(), 3);

        let s2 = shimrat(2);
        let y1 = enumerate_truncation(&s2, 1);
        assert_eq!(y1.len(), 4);
    }

    #[test]
    fn truncation_monotone() {
        let a = shimrat(3);
        let y1 = enumerate_truncation(&a, 1);
        let y2 = enumerate_truncation(&a, 2);
        let set2: BTreeSet<_> = y2.elements.iter().cloned().collect();
        for el in &y1.elements {
            assert!(set2.contains(el));
        }
        let set1: BTreeSet<_> = y1.elements.iter().cloned().collect();
        for el in &y2.elements {
            if !set1.contains(el) {
                assert_eq!(el.lg(), 2);
            }
        }
    }

    #[test]
    fn klein_four_quotient_classes() {
        let ma = klein_four_monoid_action();
        let q = finite_monoid_globalization(&ma);
        let e = 0;
        let u = 1;
        let c = q.class_of(e, 0);
        let members: BTreeSet<(usize, usize)> = q.class_members(c).iter().copied().collect();
        assert_eq!(members, BTreeSet::from([(e, 0), (u, 0)]));
        // 2 is in no orbit of u
        let two_class = q.class_of(e, 2);
        assert!(!q.orbit(u).contains(&two_class));
        // the triple (e, u, uv) violates the covering condition
        let violations = triple_condition_check_quotient(&q);
        assert!(violations.contains(&(0, 1, 3)));
    }

    #[test]
    fn trivial_monoid_quotient_is_discrete() {
        let monoid = FiniteMonoid::new(vec!["e".into()], vec![vec![0]], 0).unwrap();
        let space = Space::new(vec!["0".into(), "1".into()]).unwrap();
        let ma = MonoidAction::new(monoid, space, vec![vec![Some(0), Some(1)]]).unwrap();
        let q = finite_monoid_globalization(&ma);
        assert_eq!(q.class_count(), 2);
        assert!(triple_condition_check_quotient(&q).is_empty());
    }

    #[test]
    fn quotient_matches_normal_forms_for_confluent_action() {
        // Z/2 swapping two of three points, elementwise and by generators
        let monoid = FiniteMonoid::new(
            vec!["e".into(), "s".into()],
            vec![vec![0, 1], vec![1, 0]],
            0,
        )
        .unwrap();
        let space = Space::new(vec!["0".into(), "1".into(), "2".into()]).unwrap();
        let ma = MonoidAction::new(
            monoid,
            space.clone(),
            vec![
                vec![Some(0), Some(1), Some(2)],
                vec![Some(1), Some(0), None],
            ],
        )
        .unwrap();
        let q = finite_monoid_globalization(&ma);

        let p = Presentation::new(
            vec!["s".into()],
            vec!["s".into()],
            vec![(vec!["s".into(), "s".into()], vec![])],
        )
        .unwrap();
        let gens = vec![PartialGenMap::from_pairs(GeneratorId(0), 3, &[(0, 1), (1, 0)]).unwrap()];
        let a = PartialAction::new(p, space, gens).unwrap();
        assert!(a.is_confluent());
        let elements = enumerate_truncation(&a, 1).elements;
        assert_eq!(q.class_count(), elements.len());
        // each class corresponds to exactly one normal element
        let mut seen = BTreeSet::new();
        for c in 0..q.class_count() {
            let (u, x) = q.class_members(c)[0];
            let word = if u == 0 {
                Word::empty()
            } else {
                a.presentation().parse_word("s").unwrap()
            };
            let nf = a.normalize_config(&Config::new(word, x));
            seen.insert(nf);
        }
        assert_eq!(seen.len(), q.class_count());
    }

    #[test]
    fn is_equivalent_examples() {
        let a = shimrat(3);
        let p = a.presentation();
        let z = a.space().point_id("z").unwrap();
        let c1 = Config::new(p.parse_word("xy,yz").unwrap(), z);
        let c2 = Config::new(p.parse_word("xz").unwrap(), z);
        assert!(is_equivalent(&a, &c1, &c2));
        assert!(!is_equivalent(
            &a,
            &Config::new(Word::empty(), 0),
            &Config::new(Word::empty(), 1)
        ));
        for r in a.config_reducts(&c1) {
            assert!(is_equivalent(&a, &c1, &r));
        }
    }

    #[test]
    fn reduction_trace_passes_through_intermediate_prefixes() {
        let a = shimrat(3);
        let p = a.presentation();
        let z = a.space().point_id("z").unwrap();
        // (xz)·z reduces to x through every prefix of the word
        let u = p.parse_word("xy,yz").unwrap();
        let nf = a.normalize_config(&Config::new(u.clone(), z));
        let v = &nf.word;
        let trace = a.reduction_trace(&Config::new(p.normalize(&u), z));
        for w in p.normalize(&u).prefixes() {
            if v.is_prefix_of(&w) {
                assert!(
                    trace.iter().any(|c| c.word == w),
                    "trace must pass through {}",
                    p.format_word(&w)
                );
            }
        }
    }
}
