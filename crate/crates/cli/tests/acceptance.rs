//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line and enforcing its runtime budget. Expected values follow
//! the fixture corpus in `fixtures/`.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use partact_cli::manifest::{parse_glue_manifest, parse_manifest, resolve, Loaded};
use partact_core::glob::{enumerate_truncation, finite_monoid_globalization};
use partact_core::metglob::{
    check_nonexpansive, distance, distance_group_formula, geodesic, glue, homogenize_step,
    SegmentOracle, WeakPseudometric,
};
use partact_core::paction::{
    from_category, singleton_homogeneous_action, triple_condition_check_quotient, Morphism,
    PartialAction, PartialGenMap, Space,
};
use partact_core::words::GeneratorId;
use partact_core::{fintop, Config, ConfluenceStatus, NormalElement, Word};

fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> Loaded {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture file");
    let doc = parse_manifest(&text).expect("fixture parses");
    resolve(&doc, None).expect("fixture resolves")
}

/// Confluent, non-expansive metric fixtures; the distance criteria run on
/// exactly these.
const METRIC_FIXTURES: &[&str] = &[
    "dihedral",
    "free_monoid",
    "free_group",
    "free_product",
    "product",
    "product_groups",
    "shimrat2",
    "shimrat3",
    "zgluing",
    "zgluing_group",
    "z2_swap",
    "constant_maps",
    "empty_dom",
];

/// Fixtures whose presentation declares generator inverses.
const GROUP_FIXTURES: &[&str] = &[
    "dihedral",
    "free_group",
    "free_product",
    "product_groups",
    "shimrat2",
    "shimrat3",
    "zgluing_group",
    "z2_swap",
];

fn finish(name: &str, started: Instant, budget: Option<Duration>) {
    let elapsed = started.elapsed();
    if let Some(limit) = budget {
        assert!(
            elapsed <= limit,
            "{name}: exceeded the {limit:?} budget ({elapsed:?})"
        );
    }
    println!("acceptance {name}: PASS ({elapsed:.2?})");
}

fn close(a: f64, b: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= 1e-9
}

#[test]
fn c01_confluence_classification() {
    let started = Instant::now();
    let expect = [
        ("dihedral", ConfluenceStatus::Confluent),
        ("dihedral_noncnf", ConfluenceStatus::NotConfluent),
        ("free_group", ConfluenceStatus::Confluent),
        ("free_product", ConfluenceStatus::Confluent),
        ("product", ConfluenceStatus::Confluent),
        ("product_groups", ConfluenceStatus::Confluent),
    ];
    for (name, want) in expect {
        let l = fixture(name);
        let got = l.action.presentation().check_confluence().status();
        assert_eq!(got, want, "fixture {name}");
    }
    // presentations generated from categories of maps between subsets
    for n in 2..=5 {
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let a = singleton_homogeneous_action(Space::new(names).unwrap()).unwrap();
        assert_eq!(
            a.presentation().check_confluence().status(),
            ConfluenceStatus::Confluent
        );
    }
    let space = Space::new(vec!["0".into(), "1".into()]).unwrap();
    let objects = vec![BTreeSet::from([0]), BTreeSet::from([1])];
    let morphisms = vec![
        Morphism {
            name: "f".into(),
            dom_obj: 0,
            cod_obj: 1,
            map: BTreeMap::from([(0, 1)]),
        },
        Morphism {
            name: "F".into(),
            dom_obj: 1,
            cod_obj: 0,
            map: BTreeMap::from([(1, 0)]),
        },
    ];
    let pair = from_category(space, &objects, &morphisms).unwrap();
    assert_eq!(
        pair.presentation().check_confluence().status(),
        ConfluenceStatus::Confluent
    );
    finish(
        "01 confluence-classification",
        started,
        Some(Duration::from_secs(1)),
    );
}

#[test]
fn c02_klein_four_reproduction() {
    let started = Instant::now();
    let l = fixture("klein_four");
    let report = l.action.check_confluence();
    assert_eq!(report.status(), ConfluenceStatus::NotConfluent);
    assert!(report.word.is_confluent(), "only the mixed pairs fail");

    let ma = l.monoid.as_ref().unwrap().as_ref().unwrap();
    let q = finite_monoid_globalization(ma);
    let e = ma.monoid.element_id("e").unwrap();
    let u = ma.monoid.element_id("u").unwrap();
    let uv = ma.monoid.element_id("uv").unwrap();
    let zero = ma.space.point_id("0").unwrap();
    let class = q.class_of(e, zero);
    let members: BTreeSet<(usize, usize)> = q.class_members(class).iter().copied().collect();
    assert_eq!(members, BTreeSet::from([(e, zero), (u, zero)]));

    let violations = triple_condition_check_quotient(&q);
    assert!(violations.contains(&(e, u, uv)));
    finish(
        "02 klein-four-reproduction",
        started,
        Some(Duration::from_secs(1)),
    );
}

fn random_metric(rng: &mut impl Rng, n: usize) -> WeakPseudometric {
    let mut d = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(1..=9) as f64;
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    WeakPseudometric::new(d).unwrap()
}

/// A random partial map that is isometric by construction: the identity on a
/// subset, or a jump between two points.
fn random_partial_isometry(rng: &mut impl Rng, n: usize) -> Vec<(usize, usize)> {
    if rng.gen_bool(0.5) {
        let mut pairs = Vec::new();
        for x in 0..n {
            if rng.gen_bool(0.6) {
                pairs.push((x, x));
            }
        }
        if pairs.is_empty() {
            pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
            pairs[0].1 = pairs[0].0;
        }
        pairs
    } else {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        vec![(a, b)]
    }
}

fn random_instance(rng: &mut impl Rng) -> (u8, PartialAction) {
    let n = rng.gen_range(2..=6usize);
    let metric = random_metric(rng, n);
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let space = Space::new(names).unwrap().with_metric(metric).unwrap();
    let family = rng.gen_range(0..3u8);
    let action = match family {
        0 => singleton_homogeneous_action(space).unwrap(),
        1 => {
            // free group on one or two generators acting by partial isometries
            let k = rng.gen_range(1..=2usize);
            let mut gen_names = Vec::new();
            let mut rules = Vec::new();
            for i in 0..k {
                let s = format!("s{i}");
                let cap = format!("S{i}");
                rules.push((vec![s.clone(), cap.clone()], vec![]));
                rules.push((vec![cap.clone(), s.clone()], vec![]));
                gen_names.push(s);
                gen_names.push(cap);
            }
            let mut inverses = Vec::new();
            for i in 0..k {
                inverses.push((format!("s{i}"), format!("S{i}")));
                inverses.push((format!("S{i}"), format!("s{i}")));
            }
            let p = partact_core::Presentation::new(gen_names.clone(), gen_names.clone(), rules)
                .unwrap()
                .with_inverses(&inverses)
                .unwrap();
            let mut gens = Vec::new();
            for i in 0..k {
                let fwd = random_partial_isometry(rng, n);
                let bwd: Vec<(usize, usize)> = fwd.iter().map(|&(a, b)| (b, a)).collect();
                gens.push(PartialGenMap::from_pairs(GeneratorId((2 * i) as u32), n, &fwd).unwrap());
                gens.push(
                    PartialGenMap::from_pairs(GeneratorId((2 * i + 1) as u32), n, &bwd).unwrap(),
                );
            }
            PartialAction::new(p, space, gens).unwrap()
        }
        _ => {
            // free monoid with non-expansive maps: constants and partial identities
            let k = rng.gen_range(1..=2usize);
            let gen_names: Vec<String> = (0..k).map(|i| format!("f{i}")).collect();
            let p = partact_core::Presentation::new(gen_names.clone(), gen_names, vec![]).unwrap();
            let mut gens = Vec::new();
            for i in 0..k {
                let pairs = if rng.gen_bool(0.5) {
                    let target = rng.gen_range(0..n);
                    (0..n).map(|x| (x, target)).collect::<Vec<_>>()
                } else {
                    random_partial_isometry(rng, n)
                };
                gens.push(PartialGenMap::from_pairs(GeneratorId(i as u32), n, &pairs).unwrap());
            }
            PartialAction::new(p, space, gens).unwrap()
        }
    };
    (family, action)
}

#[test]
fn c03_isometric_embedding_randomized() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0usize;
    let mut families = [0usize; 3];
    for _ in 0..200 {
        let (family, a) = random_instance(&mut rng);
        families[family as usize] += 1;
        assert!(
            a.is_confluent(),
            "instance families are confluent by construction"
        );
        assert!(check_nonexpansive(&a).unwrap());
        let m = a.space().metric().unwrap().clone();
        for x in 0..a.space().len() {
            for y in 0..a.space().len() {
                let d = distance(&a, &NormalElement::embed(x), &NormalElement::embed(y)).unwrap();
                assert!(
                    (d - m.dist(x, y)).abs() <= 1e-9,
                    "embedding must be isometric"
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
    finish(
        "03 isometric-embedding",
        started,
        Some(Duration::from_secs(30)),
    );
}

#[test]
fn c04_three_way_distance_agreement() {
    let started = Instant::now();
    for name in METRIC_FIXTURES {
        let l = fixture(name);
        let a = &l.action;
        assert!(a.space().len() <= 5, "{name}");
        let els = enumerate_truncation(a, 2).elements;
        // any reduced path between elements of the second truncation has at
        // most lg(a)+lg(b)+1 segments, so this depth is sufficient
        let max_k = 5;
        let oracle = SegmentOracle::build(a, 2 + max_k).unwrap();
        let group = GROUP_FIXTURES.contains(name);
        for e1 in &els {
            let rounds = oracle.rounds_from(a, e1, max_k).unwrap();
            for e2 in &els {
                let d = distance(a, e1, e2).unwrap();
                let k = e1.lg() + e2.lg() + 1;
                let v = rounds[k][oracle.class_of(e2).unwrap()];
                assert!(
                    close(d, v),
                    "{name}: oracle {v} vs distance {d} at {e1:?} / {e2:?}"
                );
                if group {
                    let f =
                        distance_group_formula(a, &e1.word, &e2.word, e1.point, e2.point).unwrap();
                    assert!(
                        close(d, f),
                        "{name}: group formula {f} vs distance {d} at {e1:?} / {e2:?}"
                    );
                }
            }
        }
    }
    finish(
        "04 three-way-distance-agreement",
        started,
        Some(Duration::from_secs(60)),
    );
}

#[test]
fn c05_separation() {
    let started = Instant::now();
    for name in METRIC_FIXTURES {
        let l = fixture(name);
        let report = partact_core::metglob::check_separated(&l.action, 2).unwrap();
        assert!(report.min_distance > 0.0, "{name}");
        assert!(
            report.layer_ok,
            "{name}: zero distance across distinct words"
        );
        assert!(report.pass(), "{name}");
    }
    finish("05 separation", started, Some(Duration::from_secs(10)));
}

#[test]
fn c06_pseudometric_criterion() {
    let started = Instant::now();
    let l = fixture("empty_dom");
    assert!(!l.action.is_nowhere_degenerate());
    let y1 = enumerate_truncation(&l.action, 1).elements;
    let mut infinite = 0;
    for e1 in &y1 {
        for e2 in &y1 {
            if distance(&l.action, e1, e2).unwrap().is_infinite() {
                infinite += 1;
            }
        }
    }
    assert!(
        infinite > 0,
        "degenerate fixtures must produce an infinite distance"
    );

    for name in METRIC_FIXTURES.iter().filter(|n| **n != "empty_dom") {
        let l = fixture(name);
        assert!(l.action.is_nowhere_degenerate(), "{name}");
        let y2 = enumerate_truncation(&l.action, 2).elements;
        for e1 in &y2 {
            for e2 in &y2 {
                assert!(
                    distance(&l.action, e1, e2).unwrap().is_finite(),
                    "{name}: distances must be finite"
                );
            }
        }
    }
    finish("06 pseudometric-criterion", started, None);
}

#[test]
fn c07_gluing() {
    let started = Instant::now();
    let text = std::fs::read_to_string(fixture_path("glue_chain")).unwrap();
    let doc = parse_glue_manifest(&text).unwrap();
    let s1 = partact_cli::manifest::resolve_space(&doc.space1).unwrap();
    let s2 = partact_cli::manifest::resolve_space(&doc.space2).unwrap();
    let ident = vec![(s1.point_id("z").unwrap(), s2.point_id("z").unwrap())];
    let glued = glue(s1.metric().unwrap(), s2.metric().unwrap(), &ident).unwrap();
    let a_idx = glued.left_index[s1.point_id("a").unwrap()];
    let b_idx = glued.right_index[s2.point_id("b").unwrap()];
    assert_eq!(glued.metric.dist(a_idx, b_idx), 3.0);

    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..20 {
        let nz = rng.gen_range(1..=2usize);
        let na = rng.gen_range(1..=2usize);
        let nb = rng.gen_range(1..=2usize);
        let base = random_metric(&mut rng, nz + na + nb);
        let sub = |idx: &[usize]| {
            let rows = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| base.dist(i, j)).collect())
                .collect();
            WeakPseudometric::new(rows).unwrap()
        };
        let d1 = sub(&(0..nz + na).collect::<Vec<_>>());
        let d2 = sub(&(0..nz).chain(nz + na..nz + na + nb).collect::<Vec<_>>());
        let ident: Vec<(usize, usize)> = (0..nz).map(|z| (z, z)).collect();
        let glued = glue(&d1, &d2, &ident).unwrap();
        for ai in 0..na {
            for bi in 0..nb {
                let got = glued
                    .metric
                    .dist(glued.left_index[nz + ai], glued.right_index[nz + bi]);
                let want = (0..nz)
                    .map(|z| d1.dist(nz + ai, z) + d2.dist(z, nz + bi))
                    .fold(f64::INFINITY, f64::min);
                assert!((got - want).abs() <= 1e-9);
            }
        }
    }
    finish("07 gluing", started, None);
}

/// The normality pattern of a segment list must match its tagged form.
fn form_matches(a: &PartialAction, w: &partact_core::GeodesicWitness) -> bool {
    let pat: Vec<(bool, bool)> = w
        .segments
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
    let k = pat.len();
    use partact_core::PathForm::*;
    match w.form {
        A1 => k >= 1 && pat.iter().all(nr),
        A2 => k >= 1 && pat.iter().all(rn),
        A3 => k == 0 || (k == 1 && nn(&pat[0])),
        A4 => k >= 2 && pat[..k - 1].iter().all(nr) && nn(&pat[k - 1]),
        A5 => k >= 2 && nn(&pat[0]) && pat[1..].iter().all(rn),
        A6 => {
            let Some(mid) = pat.iter().position(nn) else {
                return false;
            };
            mid > 0 && mid < k - 1 && pat[..mid].iter().all(nr) && pat[mid + 1..].iter().all(rn)
        }
        A7 => {
            let Some(split) = pat.iter().position(rn) else {
                return false;
            };
            split > 0 && pat[..split].iter().all(nr) && pat[split..].iter().all(rn)
        }
    }
}

#[test]
fn c08_geodesics() {
    let started = Instant::now();
    for name in METRIC_FIXTURES {
        let l = fixture(name);
        let a = &l.action;
        let els = enumerate_truncation(a, 2).elements;
        for e1 in &els {
            for e2 in &els {
                let d = distance(a, e1, e2).unwrap();
                let witness = geodesic(a, e1, e2).unwrap();
                if d.is_infinite() {
                    assert!(witness.is_none(), "{name}");
                    continue;
                }
                let w = witness.expect("finite distances have witnesses");
                assert!(
                    (w.total - d).abs() <= 1e-9,
                    "{name}: total must equal distance"
                );
                assert!(form_matches(a, &w), "{name}: invalid form tag {:?}", w.form);
            }
        }
    }
    finish("08 geodesics", started, None);
}

#[test]
fn c09_local_isometry() {
    let started = Instant::now();
    for name in METRIC_FIXTURES {
        let l = fixture(name);
        let a = &l.action;
        let words: BTreeSet<Word> = enumerate_truncation(a, 2)
            .elements
            .into_iter()
            .map(|el| el.word)
            .collect();
        for u in words {
            let report = partact_core::metglob::check_local_isometry(a, &u).unwrap();
            assert!(
                report.pass(),
                "{name}: local isometry fails at {} ({:?})",
                a.presentation().format_word(&u),
                report.violations
            );
        }
    }
    finish("09 local-isometry", started, None);
}

#[test]
fn c10_topology() {
    let started = Instant::now();
    let cases = [
        // (fixture, embedding passes, Y is T1)
        ("klein_four", true, true),
        ("constant_maps", true, true),
        ("z2_swap", true, true),
        ("sierpinski_constant", true, false),
    ];
    for (name, embed_pass, t1_pass) in cases {
        let l = fixture(name);
        assert!(l.action.space().len() <= 8);
        let ma = l.monoid.as_ref().unwrap().as_ref().unwrap();
        assert!(ma.monoid.len() <= 8);
        let t = ma.space.topology().unwrap().clone();
        let q = finite_monoid_globalization(ma);
        let y_top = fintop::globalization_topology(&q, &t).unwrap();
        assert!(y_top.validate().is_valid(), "{name}: axioms");
        let emb = fintop::check_embedding(&q, &t).unwrap();
        assert_eq!(emb.pass(), embed_pass, "{name}: embedding");
        let t1 = fintop::check_t1(&q, &t).unwrap();
        assert!(t1.agree(), "{name}: the two T1 criteria must agree");
        assert_eq!(
            t1.singletons_closed && t1.preimage_criterion,
            t1_pass,
            "{name}: T1 verdict"
        );
    }
    finish("10 topology", started, Some(Duration::from_secs(10)));
}

#[test]
fn c11_newman_property() {
    let started = Instant::now();
    let confluent: Vec<&str> = METRIC_FIXTURES
        .iter()
        .copied()
        .chain(["sierpinski_constant"])
        .collect();
    for name in confluent {
        let l = fixture(name);
        let a = &l.action;
        assert!(a.is_confluent(), "{name}");
        let p = a.presentation();
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        for _ in 0..100 {
            let len = rng.gen_range(0..=5usize);
            let word = Word::new(
                (0..len)
                    .map(|_| GeneratorId(rng.gen_range(0..p.generator_count()) as u32))
                    .collect(),
            );
            let point = rng.gen_range(0..a.space().len());
            let c = Config::new(word, point);
            let canonical = a.normalize_config(&c);
            for _ in 0..100 {
                let mut pick = ChaCha8Rng::seed_from_u64(rng.gen());
                let nf = a.normalize_config_with(&c, |reducts| pick.gen_range(0..reducts.len()));
                assert_eq!(nf, canonical, "{name}: all strategies reach the same form");
            }
        }
    }
    finish("11 newman-property", started, Some(Duration::from_secs(10)));
}

#[test]
fn c12_homogenization_step() {
    let started = Instant::now();
    let metric = WeakPseudometric::new(vec![
        vec![0.0, 1.0, 2.0],
        vec![1.0, 0.0, 1.0],
        vec![2.0, 1.0, 0.0],
    ])
    .unwrap();
    let space = Space::new(vec!["x".into(), "y".into(), "z".into()])
        .unwrap()
        .with_metric(metric)
        .unwrap();
    let mut gamma = Vec::new();
    for x in 0..3usize {
        for y in 0..3usize {
            if x != y {
                gamma.push((
                    format!("{}{}", space.point_name(x), space.point_name(y)),
                    BTreeMap::from([(y, x)]),
                ));
            }
        }
    }
    let h = homogenize_step(space, &gamma, 2).unwrap();
    assert!(h.gamma_extends, "every input map extends to the truncation");
    assert!(h.embedding_isometric);

    // independent count: filter all raw generator sequences for normality and
    // sum the sizes of the normal-point sets
    let a = &h.action;
    let p = a.presentation();
    let rules: Vec<(Vec<u32>, ())> = p
        .rules()
        .iter()
        .map(|r| (r.lhs.letters().iter().map(|g| g.0).collect(), ()))
        .collect();
    let g_count = p.generator_count();
    for bound in 0..=2usize {
        let mut expected = 0usize;
        let mut words: Vec<Vec<u32>> = vec![vec![]];
        for len in 0..=bound {
            if len > 0 {
                let mut next = Vec::new();
                for w in &words {
                    if w.len() == len - 1 {
                        for g in 0..g_count {
                            let mut v = w.clone();
                            v.push(g as u32);
                            next.push(v);
                        }
                    }
                }
                words.extend(next);
            }
            for w in words.iter().filter(|w| w.len() == len) {
                let normal = rules.iter().all(|(lhs, _)| {
                    w.len() < lhs.len()
                        || !(0..=w.len() - lhs.len()).any(|pos| w[pos..pos + lhs.len()] == lhs[..])
                });
                if !normal {
                    continue;
                }
                expected += match w.last() {
                    None => a.space().len(),
                    Some(&g) => a.space().len() - a.gen_map(GeneratorId(g)).dom().count(),
                };
            }
        }
        let got = enumerate_truncation(a, bound).len();
        assert_eq!(got, expected, "layer count at bound {bound}");
    }
    assert_eq!(enumerate_truncation(a, 2).len(), 63);
    finish(
        "12 homogenization-step",
        started,
        Some(Duration::from_secs(5)),
    );
}
