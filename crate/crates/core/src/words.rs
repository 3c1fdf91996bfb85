//! Monoid presentations as string rewriting systems.
//!
//! A presentation is a finite alphabet of generators together with directed
//! reduction rules `lhs -> rhs` on words. Termination is certified by
//! requiring every rule to be strictly decreasing in the shortlex order
//! induced by a user-supplied generator precedence; confluence is decided by
//! normalizing both reducts of every critical pair.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;

/// Hard ceiling on reduction steps. Only reachable when the shortlex
/// certificate is violated and no explicit budget was set.
const DEFAULT_STEP_CAP: u64 = 100_000_000;

/// Index into a presentation's generator table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GeneratorId(pub u32);

impl GeneratorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A word over the generators; the empty word denotes the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word(Vec<GeneratorId>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<GeneratorId>) -> Self {
        Word(letters)
    }

    pub fn single(g: GeneratorId) -> Self {
        Word(vec![g])
    }

    pub fn letters(&self) -> &[GeneratorId] {
        &self.0
    }

    /// Letter count.
    pub fn lg(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Rightmost letter; in an action configuration this is the letter that
    /// acts first.
    pub fn last(&self) -> Option<GeneratorId> {
        self.0.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, g: GeneratorId) -> Word {
        let mut v = self.0.clone();
        v.push(g);
        Word(v)
    }

    /// True iff `self` is an initial segment of `other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.lg() <= other.lg() && other.0[..self.lg()] == self.0[..]
    }

    /// Longest common initial segment.
    pub fn meet(&self, other: &Word) -> Word {
        let k = self
            .0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count();
        Word(self.0[..k].to_vec())
    }

    /// Direct prefix predecessor: the word with the rightmost letter removed.
    pub fn imprefix(&self) -> Result<Word, Error> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(self.0[..self.lg() - 1].to_vec()))
    }

    /// All initial segments, from the empty word up to `self`.
    pub fn prefixes(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.lg()).map(move |k| Word(self.0[..k].to_vec()))
    }

    fn contains_at(&self, pat: &Word, pos: usize) -> bool {
        pos + pat.lg() <= self.lg() && self.0[pos..pos + pat.lg()] == pat.0[..]
    }

    fn replace(&self, pos: usize, len: usize, by: &Word) -> Word {
        let mut v = Vec::with_capacity(self.lg() - len + by.lg());
        v.extend_from_slice(&self.0[..pos]);
        v.extend_from_slice(&by.0);
        v.extend_from_slice(&self.0[pos + len..]);
        Word(v)
    }
}

/// A directed reduction rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Word,
}

/// A monoid presentation with a shortlex termination certificate.
#[derive(Clone, Debug)]
pub struct Presentation {
    names: Vec<String>,
    by_name: BTreeMap<String, GeneratorId>,
    rules: Vec<Rule>,
    /// rank[g] = position of g in the precedence list; rank 0 is the largest
    /// generator.
    rank: Vec<usize>,
    /// Optional group structure: the designated inverse of each generator.
    inverses: Option<Vec<GeneratorId>>,
    /// Optional reduction-step budget; see [`Presentation::normalize`].
    step_budget: Option<u64>,
}

/// Outcome of the structural certificate check.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// A peak together with its two one-step reducts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CriticalPair {
    pub peak: Word,
    pub left: Word,
    pub right: Word,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConfluenceStatus {
    Confluent,
    NotConfluent,
}

/// A reduction fork whose two sides normalize differently.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct WordFork {
    pub peak: Word,
    pub reduct1: Word,
    pub reduct2: Word,
    pub nf1: Word,
    pub nf2: Word,
}

#[derive(Clone, Debug, Default)]
pub struct ConfluenceReport {
    pub counterexamples: Vec<WordFork>,
}

impl ConfluenceReport {
    pub fn status(&self) -> ConfluenceStatus {
        if self.counterexamples.is_empty() {
            ConfluenceStatus::Confluent
        } else {
            ConfluenceStatus::NotConfluent
        }
    }

    pub fn is_confluent(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

impl Presentation {
    /// Build a presentation from generator names, a precedence list (largest
    /// generator first) and rules given as name sequences.
    pub fn new(
        generators: Vec<String>,
        precedence: Vec<String>,
        rules: Vec<(Vec<String>, Vec<String>)>,
    ) -> Result<Self, Error> {
        let mut by_name = BTreeMap::new();
        for (i, name) in generators.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::EmptyName);
            }
            if by_name
                .insert(name.clone(), GeneratorId(i as u32))
                .is_some()
            {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let mut rank = vec![usize::MAX; generators.len()];
        if precedence.len() != generators.len() {
            return Err(Error::BadPrecedence);
        }
        for (pos, name) in precedence.iter().enumerate() {
            let id = *by_name
                .get(name)
                .ok_or_else(|| Error::UnknownName(name.clone()))?;
            if rank[id.index()] != usize::MAX {
                return Err(Error::BadPrecedence);
            }
            rank[id.index()] = pos;
        }
        let resolve = |names: &[String], by_name: &BTreeMap<String, GeneratorId>| {
            names
                .iter()
                .map(|n| {
                    by_name
                        .get(n)
                        .copied()
                        .ok_or_else(|| Error::UnknownName(n.clone()))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Word::new)
        };
        let mut rs = Vec::with_capacity(rules.len());
        for (lhs, rhs) in &rules {
            let rule = Rule {
                lhs: resolve(lhs, &by_name)?,
                rhs: resolve(rhs, &by_name)?,
            };
            if rs.contains(&rule) {
                return Err(Error::DuplicateRule(format!("{:?} -> {:?}", lhs, rhs)));
            }
            rs.push(rule);
        }
        Ok(Presentation {
            names: generators,
            by_name,
            rules: rs,
            rank,
            inverses: None,
            step_budget: None,
        })
    }

    /// Build directly from identifiers; ranks must be a permutation of
    /// `0..generators`.
    pub fn from_ids(names: Vec<String>, rank: Vec<usize>, rules: Vec<Rule>) -> Result<Self, Error> {
        let mut by_name = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::EmptyName);
            }
            if by_name
                .insert(name.clone(), GeneratorId(i as u32))
                .is_some()
            {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        if rank.len() != names.len() {
            return Err(Error::BadPrecedence);
        }
        let mut seen = vec![false; rank.len()];
        for &r in &rank {
            if r >= rank.len() || seen[r] {
                return Err(Error::BadPrecedence);
            }
            seen[r] = true;
        }
        for rule in &rules {
            for g in rule.lhs.letters().iter().chain(rule.rhs.letters()) {
                if g.index() >= names.len() {
                    return Err(Error::BadGenerator);
                }
            }
        }
        for (i, a) in rules.iter().enumerate() {
            if rules[..i].contains(a) {
                return Err(Error::DuplicateRule(format!("{:?}", a.lhs)));
            }
        }
        Ok(Presentation {
            names,
            by_name,
            rules,
            rank,
            inverses: None,
            step_budget: None,
        })
    }

    /// Declare group structure by naming an inverse for every generator.
    pub fn with_inverses(mut self, pairs: &[(String, String)]) -> Result<Self, Error> {
        let mut inv = vec![None; self.names.len()];
        for (a, b) in pairs {
            let ga = self.generator_id(a)?;
            let gb = self.generator_id(b)?;
            inv[ga.index()] = Some(gb);
        }
        let inv: Option<Vec<GeneratorId>> = inv.into_iter().collect();
        let inv = inv.ok_or(Error::BadInverses)?;
        for (i, &j) in inv.iter().enumerate() {
            if inv[j.index()].index() != i {
                return Err(Error::BadInverses);
            }
        }
        self.inverses = Some(inv);
        Ok(self)
    }

    /// Cap the number of reduction steps; used to explore presentations whose
    /// certificate does not validate.
    pub fn with_step_budget(mut self, budget: u64) -> Self {
        self.step_budget = Some(budget);
        self
    }

    /// The effective reduction budget; finite even when none was set, so
    /// that a violated certificate surfaces as a panic instead of a hang.
    pub fn step_cap(&self) -> u64 {
        self.step_budget.unwrap_or(DEFAULT_STEP_CAP)
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn generator_name(&self, g: GeneratorId) -> &str {
        &self.names[g.index()]
    }

    pub fn generator_id(&self, name: &str) -> Result<GeneratorId, Error> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn inverses(&self) -> Option<&[GeneratorId]> {
        self.inverses.as_deref()
    }

    /// Inverse of a word under the declared group structure: letters reversed
    /// and inverted.
    pub fn inverse_word(&self, w: &Word) -> Result<Word, Error> {
        let inv = self.inverses.as_ref().ok_or_else(|| {
            Error::NoGroupStructure(
                w.last()
                    .map_or_else(String::new, |g| self.generator_name(g).to_string()),
            )
        })?;
        Ok(Word::new(
            w.letters().iter().rev().map(|g| inv[g.index()]).collect(),
        ))
    }

    /// Shortlex comparison: longer words are greater; equal lengths compare
    /// letterwise by precedence.
    pub fn shortlex_cmp(&self, a: &Word, b: &Word) -> Ordering {
        match a.lg().cmp(&b.lg()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (x, y) in a.letters().iter().zip(b.letters()) {
            // smaller rank = higher precedence = greater letter
            match self.rank[y.index()].cmp(&self.rank[x.index()]) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// Sort key realizing the canonical shortlex-by-precedence order.
    pub fn canonical_key(&self, w: &Word) -> (usize, Vec<usize>) {
        (
            w.lg(),
            w.letters().iter().map(|g| self.rank[g.index()]).collect(),
        )
    }

    /// Check the termination certificate: every left side has at least two
    /// letters and every rule is strictly shortlex-decreasing.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for (i, rule) in self.rules.iter().enumerate() {
            if rule.lhs.lg() < 2 {
                issues.push(format!(
                    "rule {} ({} -> {}): left side must have at least two letters",
                    i,
                    self.format_word(&rule.lhs),
                    self.format_word(&rule.rhs)
                ));
            }
            if self.shortlex_cmp(&rule.lhs, &rule.rhs) != Ordering::Greater {
                issues.push(format!(
                    "rule {} ({} -> {}): not strictly shortlex-decreasing",
                    i,
                    self.format_word(&rule.lhs),
                    self.format_word(&rule.rhs)
                ));
            }
        }
        ValidationReport { issues }
    }

    /// All words reachable by one reduction step.
    pub fn one_step_reducts(&self, w: &Word) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        for rule in &self.rules {
            if rule.lhs.lg() > w.lg() || rule.lhs.is_empty() {
                continue;
            }
            for pos in 0..=w.lg() - rule.lhs.lg() {
                if w.contains_at(&rule.lhs, pos) {
                    out.insert(w.replace(pos, rule.lhs.lg(), &rule.rhs));
                }
            }
        }
        out
    }

    /// A word is normal iff no rule left side occurs as a contiguous subword.
    pub fn is_normal(&self, w: &Word) -> bool {
        self.leftmost_redex(w).is_none()
    }

    fn leftmost_redex(&self, w: &Word) -> Option<(usize, usize)> {
        for pos in 0..w.lg() {
            for (ri, rule) in self.rules.iter().enumerate() {
                if !rule.lhs.is_empty() && w.contains_at(&rule.lhs, pos) {
                    return Some((pos, ri));
                }
            }
        }
        None
    }

    /// Normalize by the deterministic strategy: leftmost redex, lowest rule
    /// index. Panics if the step budget is exhausted, which can only happen
    /// when the shortlex certificate is violated.
    pub fn normalize(&self, w: &Word) -> Word {
        self.normalize_with_budget(w, self.step_budget.unwrap_or(DEFAULT_STEP_CAP))
            .unwrap_or_else(|| {
                panic!("reduction step budget exhausted; rule set does not terminate")
            })
    }

    /// Budgeted normalization; returns `None` when the budget runs out.
    pub fn normalize_with_budget(&self, w: &Word, budget: u64) -> Option<Word> {
        let mut cur = w.clone();
        let mut steps = 0u64;
        while let Some((pos, ri)) = self.leftmost_redex(&cur) {
            let rule = &self.rules[ri];
            cur = cur.replace(pos, rule.lhs.lg(), &rule.rhs);
            steps += 1;
            if steps > budget {
                return None;
            }
        }
        Some(cur)
    }

    /// Normalize choosing each step with the supplied picker; used to test
    /// strategy independence.
    pub fn normalize_with<F: FnMut(&[Word]) -> usize>(&self, w: &Word, mut pick: F) -> Word {
        let mut cur = w.clone();
        let mut steps = 0u64;
        loop {
            let reducts: Vec<Word> = self.one_step_reducts(&cur).into_iter().collect();
            if reducts.is_empty() {
                return cur;
            }
            let i = pick(&reducts) % reducts.len();
            cur = reducts[i].clone();
            steps += 1;
            if steps > self.step_cap() {
                panic!("reduction step budget exhausted; rule set does not terminate");
            }
        }
    }

    /// All critical peaks: proper overlaps of two left sides and containments
    /// of one left side in another (a rule may be paired with itself).
    pub fn critical_pairs(&self) -> Vec<CriticalPair> {
        let mut out = BTreeSet::new();
        for (i, ri) in self.rules.iter().enumerate() {
            for (j, rj) in self.rules.iter().enumerate() {
                let li = &ri.lhs;
                let lj = &rj.lhs;
                // proper overlap: a suffix of li equals a prefix of lj
                let kmax = li.lg().min(lj.lg());
                for k in 1..kmax {
                    if li.letters()[li.lg() - k..] == lj.letters()[..k] {
                        let tail = Word::new(lj.letters()[k..].to_vec());
                        let peak = li.concat(&tail);
                        let left = ri.rhs.concat(&tail);
                        let head = Word::new(li.letters()[..li.lg() - k].to_vec());
                        let right = head.concat(&rj.rhs);
                        out.insert(CriticalPair { peak, left, right });
                    }
                }
                // containment: lj occurs inside li
                if lj.lg() <= li.lg() {
                    for pos in 0..=li.lg() - lj.lg() {
                        if i == j && pos == 0 && lj.lg() == li.lg() {
                            continue;
                        }
                        if li.contains_at(lj, pos) {
                            let peak = li.clone();
                            let left = ri.rhs.clone();
                            let right = li.replace(pos, lj.lg(), &rj.rhs);
                            out.insert(CriticalPair { peak, left, right });
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Decide confluence by normalizing both reducts of every critical pair.
    /// Under the termination certificate this is exact: a differing pair
    /// exhibits a word with two distinct normal forms.
    pub fn check_confluence(&self) -> ConfluenceReport {
        let mut counterexamples = BTreeSet::new();
        for cp in self.critical_pairs() {
            let nf1 = self.normalize(&cp.left);
            let nf2 = self.normalize(&cp.right);
            if nf1 != nf2 {
                counterexamples.insert(WordFork {
                    peak: cp.peak,
                    reduct1: cp.left,
                    reduct2: cp.right,
                    nf1,
                    nf2,
                });
            }
        }
        ConfluenceReport {
            counterexamples: counterexamples.into_iter().collect(),
        }
    }

    /// Product in the presented monoid, on normal representatives.
    pub fn multiply_normal(&self, u: &Word, v: &Word) -> Word {
        self.normalize(&u.concat(v))
    }

    /// Render a word with generator names; the empty word prints as `e`.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "e".to_string();
        }
        w.letters()
            .iter()
            .map(|g| self.generator_name(*g))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parse `e` or a comma-separated list of generator names.
    pub fn parse_word(&self, s: &str) -> Result<Word, Error> {
        if s == "e" || s.is_empty() {
            return Ok(Word::empty());
        }
        let letters = s
            .split(',')
            .map(|n| self.generator_id(n.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Word::new(letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn dihedral() -> Presentation {
        let g = |s: &str| s.to_string();
        Presentation::new(
            vec![g("a"), g("b"), g("B")],
            vec![g("a"), g("b"), g("B")],
            vec![
                (vec![g("b"), g("B")], vec![]),
                (vec![g("B"), g("b")], vec![]),
                (vec![g("a"), g("a")], vec![]),
                (vec![g("a"), g("b")], vec![g("B"), g("a")]),
                (vec![g("a"), g("B")], vec![g("b"), g("a")]),
            ],
        )
        .unwrap()
    }

    fn dihedral_noncnf() -> Presentation {
        let g = |s: &str| s.to_string();
        Presentation::new(
            vec![g("a"), g("b"), g("B")],
            vec![g("a"), g("b"), g("B")],
            vec![
                (vec![g("b"), g("B")], vec![]),
                (vec![g("B"), g("b")], vec![]),
                (vec![g("a"), g("a")], vec![]),
                (vec![g("a"), g("b")], vec![g("B"), g("a")]),
            ],
        )
        .unwrap()
    }

    fn free_monoid(n: usize) -> Presentation {
        let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
        Presentation::new(names.clone(), names, vec![]).unwrap()
    }

    fn w(p: &Presentation, s: &str) -> Word {
        p.parse_word(s).unwrap()
    }

    #[test]
    fn validate_accepts_dihedral() {
        assert!(dihedral().validate().is_valid());
    }

    #[test]
    fn validate_accepts_empty_rule_set() {
        assert!(free_monoid(2).validate().is_valid());
    }

    #[test]
    fn validate_rejects_single_letter_lhs() {
        let p = Presentation::new(
            vec!["g".into(), "h".into()],
            vec!["g".into(), "h".into()],
            vec![(vec!["g".into()], vec![])],
        )
        .unwrap();
        let report = p.validate();
        assert!(!report.is_valid());
        assert!(report.issues[0].contains("two letters"));
    }

    #[test]
    fn validate_rejects_nondecreasing_rule() {
        let p = Presentation::new(
            vec!["g".into(), "h".into()],
            vec!["g".into(), "h".into()],
            vec![(
                vec!["h".into(), "g".into()],
                vec!["h".into(), "g".into(), "g".into()],
            )],
        )
        .unwrap();
        assert!(!p.validate().is_valid());
    }

    #[test]
    fn one_step_reducts_dihedral() {
        let p = dihedral();
        let got = p.one_step_reducts(&w(&p, "a,b,B,a"));
        let want: BTreeSet<Word> = [w(&p, "a,a"), w(&p, "B,a,B,a")].into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn one_step_reducts_free_monoid_empty() {
        let p = free_monoid(2);
        assert!(p.one_step_reducts(&w(&p, "g0,g1,g0")).is_empty());
    }

    #[test]
    fn one_step_reducts_unit_rule() {
        let p = dihedral();
        let got = p.one_step_reducts(&w(&p, "a,a"));
        assert_eq!(got.len(), 1);
        assert!(got.contains(&Word::empty()));
    }

    #[test]
    fn normalize_examples() {
        let p = dihedral();
        assert_eq!(p.normalize(&w(&p, "a,b,B,a")), Word::empty());
        assert_eq!(p.normalize(&w(&p, "B,a")), w(&p, "B,a"));
        assert_eq!(p.normalize(&w(&p, "a,b")), w(&p, "B,a"));
    }

    #[test]
    fn critical_pairs_contain_expected_peaks() {
        let p = dihedral();
        let pairs = p.critical_pairs();
        // overlap of ab and bB
        assert!(pairs.iter().any(|cp| cp.peak == w(&p, "a,b,B")));
        // self-overlap of aa
        let aaa: Vec<_> = pairs
            .iter()
            .filter(|cp| cp.peak == w(&p, "a,a,a"))
            .collect();
        assert!(!aaa.is_empty());
        for cp in aaa {
            assert_eq!(cp.left, w(&p, "a"));
            assert_eq!(cp.right, w(&p, "a"));
        }
        assert!(free_monoid(3).critical_pairs().is_empty());
    }

    #[test]
    fn confluence_dihedral() {
        assert!(dihedral().check_confluence().is_confluent());
    }

    #[test]
    fn confluence_dihedral_missing_rule_fails() {
        let p = dihedral_noncnf();
        let report = p.check_confluence();
        assert_eq!(report.status(), ConfluenceStatus::NotConfluent);
        let fork = report
            .counterexamples
            .iter()
            .find(|f| f.peak == w(&p, "a,b,B"))
            .expect("peak a,b,B must be a counterexample");
        let nfs: BTreeSet<&Word> = [&fork.nf1, &fork.nf2].into_iter().collect();
        assert!(nfs.contains(&w(&p, "a")));
        assert!(nfs.contains(&w(&p, "B,a,B")));
    }

    #[test]
    fn confluence_free_group() {
        let p = Presentation::new(
            vec!["s".into(), "S".into()],
            vec!["s".into(), "S".into()],
            vec![
                (vec!["s".into(), "S".into()], vec![]),
                (vec!["S".into(), "s".into()], vec![]),
            ],
        )
        .unwrap();
        assert!(p.check_confluence().is_confluent());
    }

    #[test]
    fn prefix_operations() {
        let p = free_monoid(3);
        let u = w(&p, "g0");
        let v = w(&p, "g0,g1");
        assert!(u.is_prefix_of(&v));
        assert_eq!(u.meet(&v), u);
        assert_eq!(v.imprefix().unwrap(), u);
        assert_eq!(w(&p, "g0,g1").meet(&w(&p, "g0,g2")), u);
        assert_eq!(v.lg(), 2);
        assert!(Word::empty().imprefix().is_err());
    }

    #[test]
    fn multiply_normal_examples() {
        let p = dihedral();
        assert_eq!(p.multiply_normal(&w(&p, "a"), &w(&p, "a")), Word::empty());
        assert_eq!(
            p.multiply_normal(&Word::empty(), &w(&p, "b,a")),
            w(&p, "b,a")
        );
        assert_eq!(p.multiply_normal(&w(&p, "a"), &w(&p, "b")), w(&p, "B,a"));
    }

    /// Every normal form reachable by any reduction sequence.
    fn reachable_normal_forms(p: &Presentation, w: &Word) -> BTreeSet<Word> {
        let mut seen = BTreeSet::new();
        let mut out = BTreeSet::new();
        let mut stack = vec![w.clone()];
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur.clone()) {
                continue;
            }
            let reducts = p.one_step_reducts(&cur);
            if reducts.is_empty() {
                out.insert(cur);
            } else {
                stack.extend(reducts);
            }
        }
        out
    }

    fn all_words(p: &Presentation, up_to: usize) -> Vec<Word> {
        let mut level: Vec<Word> = vec![Word::empty()];
        let mut out = level.clone();
        for _ in 0..up_to {
            let mut next = Vec::new();
            for w in &level {
                for g in 0..p.generator_count() {
                    next.push(w.push(GeneratorId(g as u32)));
                }
            }
            out.extend(next.iter().cloned());
            level = next;
        }
        out
    }

    #[test]
    fn critical_pair_check_matches_bruteforce_unique_normal_forms() {
        for (p, expect) in [(dihedral(), true), (dihedral_noncnf(), false)] {
            let by_pairs = p.check_confluence().is_confluent();
            assert_eq!(by_pairs, expect);
            let by_brute = all_words(&p, 5)
                .iter()
                .all(|w| reachable_normal_forms(&p, w).len() == 1);
            assert_eq!(by_brute, expect);
        }
    }

    #[test]
    fn monoid_laws_on_normal_words() {
        let p = dihedral();
        let normals: Vec<Word> = all_words(&p, 4)
            .into_iter()
            .filter(|w| p.is_normal(w))
            .collect();
        for u in &normals {
            assert_eq!(p.multiply_normal(&Word::empty(), u), *u);
            assert_eq!(p.multiply_normal(u, &Word::empty()), *u);
        }
        for u in &normals {
            for v in &normals {
                for t in &normals {
                    let uv_t = p.multiply_normal(&p.multiply_normal(u, v), t);
                    let u_vt = p.multiply_normal(u, &p.multiply_normal(v, t));
                    assert_eq!(uv_t, u_vt);
                }
            }
        }
    }

    #[test]
    fn reducts_empty_iff_no_lhs_subword() {
        let p = dihedral();
        for word in all_words(&p, 5) {
            let has_redex = p.rules().iter().any(|r| {
                (0..=word.lg().saturating_sub(r.lhs.lg())).any(|pos| word.contains_at(&r.lhs, pos))
                    && r.lhs.lg() <= word.lg()
            });
            assert_eq!(p.one_step_reducts(&word).is_empty(), !has_redex);
        }
    }

    #[test]
    fn inverse_word_reverses_and_inverts() {
        let p = dihedral()
            .with_inverses(&[
                ("a".into(), "a".into()),
                ("b".into(), "B".into()),
                ("B".into(), "b".into()),
            ])
            .unwrap();
        let u = w(&p, "a,b");
        let inv = p.inverse_word(&u).unwrap();
        assert_eq!(inv, w(&p, "B,a"));
        assert_eq!(p.normalize(&u.concat(&inv)), Word::empty());
    }

    #[test]
    fn budgeted_normalization_gives_up() {
        // a looping two-rule system without a valid certificate
        let p = Presentation::new(
            vec!["g".into(), "h".into()],
            vec!["g".into(), "h".into()],
            vec![
                (vec!["g".into(), "h".into()], vec!["h".into(), "g".into()]),
                (vec!["h".into(), "g".into()], vec!["g".into(), "h".into()]),
            ],
        )
        .unwrap();
        assert!(!p.validate().is_valid());
        let word = p.parse_word("g,h").unwrap();
        assert!(p.normalize_with_budget(&word, 10).is_none());
    }
}
