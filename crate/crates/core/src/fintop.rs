//! Finite topological spaces and the final-topology globalization for finite
//! monoid actions.
//!
//! Open families are stored as explicit bitset lists; the globalization
//! topology is the largest topology making every translation `X -> Y`
//! continuous. Small quotients are computed by filtering all subsets, larger
//! ones by enumerating up-sets of the induced specialization preorder.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::glob::QuotientGlobalization;
use crate::paction::PartialAction;

/// Threshold between subset filtering and the preorder-based enumeration.
const FILTER_LIMIT: usize = 20;
/// Hard cap on the number of open sets the enumeration may produce.
const OPENS_CAP: usize = 1 << 20;

/// An explicit family of open subsets over points `0..n`, stored as bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTopology {
    n: usize,
    opens: Vec<u64>,
}

/// Validation outcome: closure axioms plus the T1 flag as metadata.
#[derive(Clone, Debug)]
pub struct TopologyReport {
    pub issues: Vec<String>,
    /// all singletons closed
    pub t1: bool,
}

impl TopologyReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl FiniteTopology {
    pub fn new(n: usize, opens: Vec<u64>) -> Result<Self, Error> {
        if n > 63 {
            return Err(Error::TooLarge("more than 63 points".into()));
        }
        let full = Self::full_mask(n);
        let mut sorted: Vec<u64> = opens.into_iter().collect();
        for &o in &sorted {
            if o & !full != 0 {
                return Err(Error::BadTopology(
                    "open set mentions unknown points".into(),
                ));
            }
        }
        sorted.sort_unstable();
        sorted.dedup();
        Ok(FiniteTopology { n, opens: sorted })
    }

    pub fn discrete(n: usize) -> Self {
        let opens = (0..(1u64 << n)).collect();
        FiniteTopology { n, opens }
    }

    pub fn indiscrete(n: usize) -> Self {
        FiniteTopology {
            n,
            opens: vec![0, Self::full_mask(n)],
        }
    }

    fn full_mask(n: usize) -> u64 {
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn opens(&self) -> &[u64] {
        &self.opens
    }

    pub fn full(&self) -> u64 {
        Self::full_mask(self.n)
    }

    pub fn is_open(&self, mask: u64) -> bool {
        self.opens.binary_search(&mask).is_ok()
    }

    pub fn is_closed(&self, mask: u64) -> bool {
        self.is_open(self.full() & !mask)
    }

    /// Intersection of all opens containing `x`; an open set itself in a
    /// valid finite topology.
    pub fn min_open_containing(&self, x: usize) -> u64 {
        self.opens
            .iter()
            .filter(|&&o| o & (1 << x) != 0)
            .fold(self.full(), |acc, &o| acc & o)
    }

    /// Verify the closure axioms; report T1 as metadata.
    pub fn validate(&self) -> TopologyReport {
        let mut issues = Vec::new();
        if !self.is_open(0) {
            issues.push("the empty set is missing".into());
        }
        if !self.is_open(self.full()) {
            issues.push("the full set is missing".into());
        }
        for &a in &self.opens {
            for &b in &self.opens {
                if !self.is_open(a | b) {
                    issues.push(format!("union {:b} | {:b} is missing", a, b));
                }
                if !self.is_open(a & b) {
                    issues.push(format!("intersection {:b} & {:b} is missing", a, b));
                }
            }
        }
        issues.sort();
        issues.dedup();
        let t1 = (0..self.n).all(|x| self.is_closed(1 << x));
        TopologyReport { issues, t1 }
    }
}

/// Generator-level continuity: preimages of opens are open in the subspace
/// topology of each generator domain.
pub fn is_continuous_action(a: &PartialAction) -> Result<bool, Error> {
    let t = a.space().topology().ok_or(Error::MissingTopology)?;
    for g in a.gen_maps() {
        let dom_mask: u64 = g.dom().fold(0, |m, x| m | (1 << x));
        for &u in t.opens() {
            let pre: u64 = g
                .dom()
                .filter(|&x| u & (1 << g.apply(x).unwrap()) != 0)
                .fold(0, |m, x| m | (1 << x));
            let open_in_subspace = t.opens().iter().any(|&v| v & dom_mask == pre);
            if !open_in_subspace {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn preimage_masks(q: &QuotientGlobalization) -> Vec<Vec<u64>> {
    let m = q.monoid().len();
    let nx = q.space().len();
    let k = q.class_count();
    let mut pre = vec![vec![0u64; k]; m];
    for (u, row) in pre.iter_mut().enumerate() {
        for x in 0..nx {
            row[q.class_of(u, x)] |= 1 << x;
        }
    }
    pre
}

fn preimage(pre_u: &[u64], v: u64) -> u64 {
    let mut mask = 0;
    let mut rest = v;
    while rest != 0 {
        let c = rest.trailing_zeros() as usize;
        mask |= pre_u[c];
        rest &= rest - 1;
    }
    mask
}

/// The final topology on the quotient globalization: `V` is open iff the
/// preimage under every translation `x -> [u, x]` is open in the base.
pub fn globalization_topology(
    q: &QuotientGlobalization,
    t: &FiniteTopology,
) -> Result<FiniteTopology, Error> {
    if t.size() != q.space().len() {
        return Err(Error::BadTopology("topology size mismatch".into()));
    }
    let k = q.class_count();
    let pre = preimage_masks(q);
    if k <= FILTER_LIMIT {
        let mut opens = Vec::new();
        for v in 0..(1u64 << k) {
            if pre.iter().all(|row| t.is_open(preimage(row, v))) {
                opens.push(v);
            }
        }
        return FiniteTopology::new(k, opens);
    }
    // specialization route: V is open iff it is closed under the reachability
    // relation class(u, x) -> class(u, x') for x' in the minimal open of x
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for u in 0..q.monoid().len() {
        for x in 0..q.space().len() {
            let c = q.class_of(u, x);
            let min_open = t.min_open_containing(x);
            let mut rest = min_open;
            while rest != 0 {
                let x2 = rest.trailing_zeros() as usize;
                succ[c].insert(q.class_of(u, x2));
                rest &= rest - 1;
            }
        }
    }
    let mut opens = Vec::new();
    enumerate_up_sets(&succ, &mut vec![None; k], 0, &mut opens)?;
    FiniteTopology::new(k, opens)
}

/// Generate all subsets closed under `succ` by branching membership with
/// eager propagation.
fn enumerate_up_sets(
    succ: &[BTreeSet<usize>],
    state: &mut Vec<Option<bool>>,
    from: usize,
    out: &mut Vec<u64>,
) -> Result<(), Error> {
    let k = succ.len();
    let next = (from..k).find(|&i| state[i].is_none());
    let Some(i) = next else {
        let mask = state
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Some(true))
            .fold(0u64, |m, (j, _)| m | (1 << j));
        if out.len() >= OPENS_CAP {
            return Err(Error::TooLarge("open family".into()));
        }
        out.push(mask);
        return Ok(());
    };
    // exclude i: everything that reaches i must be excluded as well
    let mut touched = Vec::new();
    let mut ok = true;
    let mut stack = vec![i];
    while let Some(c) = stack.pop() {
        match state[c] {
            Some(true) => {
                ok = false;
                break;
            }
            Some(false) => continue,
            None => {
                state[c] = Some(false);
                touched.push(c);
                for (d, ds) in succ.iter().enumerate() {
                    if ds.contains(&c) && state[d] != Some(false) {
                        stack.push(d);
                    }
                }
            }
        }
    }
    if ok {
        enumerate_up_sets(succ, state, from, out)?;
    }
    for c in touched {
        state[c] = None;
    }
    // include i: all successors must be included
    let mut touched = Vec::new();
    let mut ok = true;
    let mut stack = vec![i];
    while let Some(c) = stack.pop() {
        match state[c] {
            Some(false) => {
                ok = false;
                break;
            }
            Some(true) => continue,
            None => {
                state[c] = Some(true);
                touched.push(c);
                stack.extend(succ[c].iter().copied());
            }
        }
    }
    if ok {
        enumerate_up_sets(succ, state, from, out)?;
    }
    for c in touched {
        state[c] = None;
    }
    Ok(())
}

/// Embedding check for the canonical map `x -> [e, x]`.
#[derive(Clone, Debug)]
pub struct EmbeddingReport {
    /// every base open is the trace of an open of the globalization
    pub extends: bool,
    /// every trace of a globalization open is open in the base
    pub restricts: bool,
    /// a base open with no matching trace, when `extends` fails
    pub witness: Option<u64>,
}

impl EmbeddingReport {
    pub fn pass(&self) -> bool {
        self.extends && self.restricts
    }
}

pub fn check_embedding(
    q: &QuotientGlobalization,
    t: &FiniteTopology,
) -> Result<EmbeddingReport, Error> {
    let y_top = globalization_topology(q, t)?;
    let unit = q.monoid().unit();
    let nx = q.space().len();
    let image: Vec<usize> = (0..nx).map(|x| q.class_of(unit, x)).collect();
    let image_mask: u64 = image.iter().fold(0, |m, &c| m | (1 << c));
    let to_class_mask = |xmask: u64| -> u64 {
        let mut m = 0;
        let mut rest = xmask;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            m |= 1 << image[x];
            rest &= rest - 1;
        }
        m
    };
    let mut extends = true;
    let mut witness = None;
    for &u in t.opens() {
        let want = to_class_mask(u);
        if !y_top.opens().iter().any(|&v| v & image_mask == want) {
            extends = false;
            witness = Some(u);
            break;
        }
    }
    let mut restricts = true;
    for &v in y_top.opens() {
        let trace: u64 = (0..nx)
            .filter(|&x| v & (1 << image[x]) != 0)
            .fold(0, |m, x| m | (1 << x));
        if !t.is_open(trace) {
            restricts = false;
        }
    }
    Ok(EmbeddingReport {
        extends,
        restricts,
        witness,
    })
}

/// The two sides of the T1 criterion, evaluated independently.
#[derive(Clone, Debug)]
pub struct T1Report {
    /// every singleton of the globalization is closed
    pub singletons_closed: bool,
    /// every translation preimage `u^{-1}[{x}]` of a base point is closed
    pub preimage_criterion: bool,
}

impl T1Report {
    pub fn agree(&self) -> bool {
        self.singletons_closed == self.preimage_criterion
    }
}

pub fn check_t1(q: &QuotientGlobalization, t: &FiniteTopology) -> Result<T1Report, Error> {
    let y_top = globalization_topology(q, t)?;
    let singletons_closed = (0..q.class_count()).all(|c| y_top.is_closed(1 << c));
    let unit = q.monoid().unit();
    let mut preimage_criterion = true;
    for u in 0..q.monoid().len() {
        for x in 0..q.space().len() {
            let target = q.class_of(unit, x);
            let pre: u64 = (0..q.space().len())
                .filter(|&x2| q.class_of(u, x2) == target)
                .fold(0, |m, x2| m | (1 << x2));
            if !t.is_closed(pre) {
                preimage_criterion = false;
            }
        }
    }
    Ok(T1Report {
        singletons_closed,
        preimage_criterion,
    })
}

/// Image of every closed set of the base under `x -> [u, x]` is closed.
pub fn is_closed_map_into_y(
    q: &QuotientGlobalization,
    t: &FiniteTopology,
    u: usize,
) -> Result<bool, Error> {
    let y_top = globalization_topology(q, t)?;
    for &o in t.opens() {
        let closed = t.full() & !o;
        let image: u64 = (0..q.space().len())
            .filter(|&x| closed & (1 << x) != 0)
            .fold(0, |m, x| m | (1 << q.class_of(u, x)));
        if !y_top.is_closed(image) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Image of every open set of the base under `x -> [u, x]` is open.
pub fn is_open_map_into_y(
    q: &QuotientGlobalization,
    t: &FiniteTopology,
    u: usize,
) -> Result<bool, Error> {
    let y_top = globalization_topology(q, t)?;
    for &o in t.opens() {
        let image: u64 = (0..q.space().len())
            .filter(|&x| o & (1 << x) != 0)
            .fold(0, |m, x| m | (1 << q.class_of(u, x)));
        if !y_top.is_open(image) {
            return Ok(false);
        }
    }
    Ok(true)
}
