//! Fixtures, generators and property checks shared by the integration
//! tests and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use refdom::domain::{Cardinality, Criterion, DomainSpec, IdHint, Source};
use refdom::engine::{
    build_underspecified, compatible, Compatibility, EngineOptions, MatchOptions, Predicate, Session,
    UtteranceResult,
};
use refdom::kb::{TypeHierarchy, TypeNode};
use refdom::parser::{parse_text, UnknownPolicy};
use refdom::scene::{proximity_clusters, SceneEntity};
use refdom::trace::TraceRecord;
use refdom::{ContextModel, DomainId, KnowledgeBase, Verdict};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn kb(name: &str) -> Arc<KnowledgeBase> {
    static EN: OnceLock<Arc<KnowledgeBase>> = OnceLock::new();
    static FR: OnceLock<Arc<KnowledgeBase>> = OnceLock::new();
    let cell = match name {
        "en" => &EN,
        "fr" => &FR,
        other => panic!("no knowledge base {other}"),
    };
    cell.get_or_init(|| Arc::new(refdom::load_kb(fixture(&format!("kb_{name}.json"))).unwrap()))
        .clone()
}

pub fn session(kb_name: &str, scene: Option<&str>) -> Session {
    let mut s = Session::new(kb(kb_name), EngineOptions::default()).unwrap();
    if let Some(scene) = scene {
        s.load_scene(fixture(&format!("scenes/{scene}.json"))).unwrap();
    }
    s
}

/// Replays a dialogue fixture.
pub fn replay(kb_name: &str, scene: Option<&str>, dialogue: &str) -> Vec<UtteranceResult> {
    let text = std::fs::read_to_string(fixture(&format!("dialogues/{dialogue}.txt"))).unwrap();
    let mut s = session(kb_name, scene);
    refdom::engine::dialogue_lines(&text)
        .iter()
        .map(|l| s.process_text(l).unwrap())
        .collect()
}

pub fn referent(results: &[UtteranceResult], u: usize, a: usize) -> Option<String> {
    results[u].resolutions[a].referent.as_ref().map(ToString::to_string)
}

pub fn verdict(results: &[UtteranceResult], u: usize, a: usize) -> Verdict {
    results[u].resolutions[a].verdict
}

pub fn traces(results: &[UtteranceResult]) -> String {
    refdom::cli::trace_records(results)
        .iter()
        .map(TraceRecord::to_json)
        .collect::<Vec<_>>()
        .join("\n")
}

// ---------------------------------------------------------------------------
// Determiner class × context structure

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    NoPartition,
    Unfocused,
    Focused,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetCase {
    Indefinite,
    Definite,
    Pronoun,
    Demonstrative,
}

pub const SHAPES: [Shape; 3] = [Shape::NoPartition, Shape::Unfocused, Shape::Focused];
pub const DETS: [DetCase; 4] = [DetCase::Indefinite, DetCase::Definite, DetCase::Pronoun, DetCase::Demonstrative];

/// Whether a determiner class accepts a domain of the given shape.
pub fn expected(det: DetCase, shape: Shape) -> bool {
    match det {
        DetCase::Indefinite => true,
        DetCase::Definite => shape != Shape::NoPartition,
        DetCase::Pronoun | DetCase::Demonstrative => shape == Shape::Focused,
    }
}

/// A type-matching set domain: `cardinality` entities of one noun, two of
/// them told apart by colour when partitioned, plus unrelated distractors.
#[derive(Clone, Debug)]
pub struct MatrixFixture {
    pub noun: &'static str,
    pub colors: (&'static str, &'static str),
    pub cardinality: u32,
    pub profiled: usize,
    pub described: usize,
    pub distractors: usize,
}

const NOUNS: [(&str, &str); 4] = [("line", "LINE"), ("square", "SQUARE"), ("circle", "CIRCLE"), ("block", "BLOCK")];
const COLORS: [&str; 3] = ["red", "green", "blue"];

pub fn matrix_fixture() -> impl Strategy<Value = MatrixFixture> {
    (0..NOUNS.len(), 0..3usize, 1..3usize, 2..6u32, 0..2usize, 0..2usize, 0..4usize).prop_map(
        |(n, c, step, cardinality, profiled, described, distractors)| MatrixFixture {
            noun: NOUNS[n].0,
            colors: (COLORS[c], COLORS[(c + step) % 3]),
            cardinality,
            profiled,
            described,
            distractors,
        },
    )
}

fn type_of(noun: &str) -> &'static str {
    NOUNS.iter().find(|(n, _)| *n == noun).unwrap().1
}

/// Builds the fixture in `shape` and returns the compatibility of the
/// determiner's underspecified domain with the target domain.
pub fn matrix_outcome(f: &MatrixFixture, det: DetCase, shape: Shape) -> Compatibility {
    let kb = kb("en");
    let mut ctx = ContextModel::new();
    let ty = type_of(f.noun);
    let h = &kb.hierarchy;
    for i in 0..f.distractors {
        let other = if ty == "PYRAMID" { "MARBLE" } else { "PYRAMID" };
        let spec = DomainSpec::new(other, Cardinality::Finite(1), Source::Discourse)
            .hint(IdHint::Instance(format!("x{i}")));
        ctx.new_domain(h, spec).unwrap();
    }
    let members: Vec<DomainId> = [f.colors.0, f.colors.1]
        .iter()
        .map(|c| {
            let spec = DomainSpec::new(ty, Cardinality::Finite(1), Source::Discourse)
                .property("color", c)
                .hint(IdHint::Instance(format!("{}{}", &c[..1], ty[..1].to_lowercase())));
            ctx.new_domain(h, spec).unwrap()
        })
        .collect();
    let set = ctx
        .new_domain(
            h,
            DomainSpec::new(ty, Cardinality::Finite(f.cardinality), Source::Discourse)
                .hint(IdHint::Set(ty[..1].to_string())),
        )
        .unwrap();
    if shape != Shape::NoPartition {
        let cells = vec![
            (f.colors.0.to_string(), members[0].clone()),
            (f.colors.1.to_string(), members[1].clone()),
        ];
        let p = ctx
            .add_partition(&set, Criterion::ByProperty("color".into()), cells)
            .unwrap();
        if shape == Shape::Focused {
            ctx.profile(&set, p, f.profiled).unwrap();
        }
    }
    ctx.touch(&set).unwrap();
    let described = if f.described == 0 { f.colors.0 } else { f.colors.1 };
    let text = match det {
        DetCase::Indefinite => format!("take a {}", f.noun),
        DetCase::Definite => format!("take the {described} {}", f.noun),
        DetCase::Pronoun => "take it".to_string(),
        DetCase::Demonstrative => format!("take this {}", f.noun),
    };
    let utt = parse_text(&text, &kb.lexicon, UnknownPolicy::Fail).unwrap();
    let mention = &utt.mentions()[0];
    let usd = build_underspecified(mention.expr, &kb);
    compatible(&usd, &set, &ctx, &kb, MatchOptions::default())
}

// ---------------------------------------------------------------------------
// Random dialogues

fn np(allow_pronoun: bool) -> impl Strategy<Value = String> {
    let noun = prop::sample::select(vec!["line", "square", "circle", "triangle", "figure", "block", "pyramid"]);
    let adj = prop::option::of(prop::sample::select(vec!["red", "green", "blue", "big", "small", "horizontal"]));
    let det = prop::sample::select(vec!["a", "the", "another", "this", "the other", "two"]);
    let full = (det, adj, noun).prop_map(|(d, a, n)| {
        let n = if d == "two" { format!("{n}s") } else { n.to_string() };
        match a {
            Some(a) => format!("{d} {a} {n}"),
            None => format!("{d} {n}"),
        }
    });
    let special = prop::sample::select(vec![
        "it".to_string(),
        "the red one".to_string(),
        "the big one".to_string(),
        "the triangles".to_string(),
    ]);
    if allow_pronoun {
        prop_oneof![4 => full, 1 => special].boxed()
    } else {
        full.boxed()
    }
}

pub fn sentence() -> impl Strategy<Value = String> {
    let verb = prop::sample::select(vec!["take", "put", "stick"]);
    prop_oneof![
        (verb.clone(), np(true)).prop_map(|(v, a)| format!("{v} {a}")),
        (np(true), np(true)).prop_map(|(a, b)| format!("put {a} on the top of {b}")),
        (np(true), np(true)).prop_map(|(a, b)| format!("take {a} and {b}")),
        (np(true), np(true)).prop_map(|(a, b)| format!("{a} supports {b}")),
        np(true).prop_map(|a| format!("{a} is big")),
        (verb, np(true)).prop_map(|(v, a)| format!("dont {v} {a}")),
        (np(true), np(false)).prop_map(|(a, b)| format!("take {a} next to {b}")),
    ]
}

pub fn scene() -> impl Strategy<Value = Vec<SceneEntity>> {
    let ty = prop::sample::select(vec!["CIRCLE", "SQUARE", "TRIANGLE", "BLOCK", "LINE"]);
    let color = prop::sample::select(vec!["red", "green", "blue"]);
    prop::collection::vec((ty, color, 0..8i32, 0..8i32), 0..=6).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (ty, color, x, y))| SceneEntity {
                id: format!("e{i}"),
                ty: ty.to_string(),
                properties: [("color".to_string(), color.to_string())].into_iter().collect(),
                position: [f64::from(x), f64::from(y)],
            })
            .collect()
    })
}

#[derive(Clone, Debug)]
pub struct DialogueCase {
    pub scene: Vec<SceneEntity>,
    pub lines: Vec<String>,
    pub probe: String,
}

pub fn dialogue_case() -> impl Strategy<Value = DialogueCase> {
    (scene(), prop::collection::vec(sentence(), 0..6), np(true)).prop_map(|(scene, lines, probe)| DialogueCase {
        scene,
        lines,
        probe,
    })
}

fn open(case: &DialogueCase) -> Session {
    let mut s = Session::new(kb("en"), EngineOptions::default()).unwrap();
    s.add_scene(case.scene.clone()).unwrap();
    s
}

/// Replays the case, checking the context invariants after every step.
fn play(case: &DialogueCase) -> Result<(Session, Vec<UtteranceResult>), TestCaseError> {
    let mut s = open(case);
    let mut out = Vec::new();
    for line in &case.lines {
        let r = s
            .process_text(line)
            .map_err(|e| TestCaseError::fail(format!("{line:?}: {e}")))?;
        if let Err(e) = s.context().check_invariants() {
            return Err(TestCaseError::fail(format!("after {line:?}: {e}")));
        }
        out.push(r);
    }
    Ok((s, out))
}

/// Profiling uniqueness and activation permutation after every utterance.
pub fn prop_invariants(case: &DialogueCase) -> Result<(), TestCaseError> {
    let (s, _) = play(case)?;
    let ctx = s.context();
    for d in ctx.domains() {
        for p in &d.partitions {
            prop_assert!(p.profiled.is_none_or(|i| i < p.cells.len()));
        }
    }
    let active: BTreeSet<_> = ctx.activation().iter().collect();
    let expected: BTreeSet<_> = ctx.domains().filter(|d| !d.generic).map(|d| &d.id).collect();
    prop_assert_eq!(active.len(), ctx.activation().len());
    prop_assert_eq!(active, expected);
    Ok(())
}

/// Resolves the probe on top of the dialogue and checks what every
/// determiner class promises about the result.
pub fn prop_resolution(case: &DialogueCase) -> Result<(), TestCaseError> {
    let (mut s, _) = play(case)?;
    let kb = kb("en");
    let utt = parse_text(&format!("take {}", case.probe), &kb.lexicon, UnknownPolicy::Fail)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let expr = utt.mentions()[0].expr.clone();
    let before = s.context().clone();
    let r = s
        .resolve(&expr, &Predicate::new("take", Default::default()))
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let after = s.context();
    prop_assert!(after.check_invariants().is_ok());
    if r.verdict == Verdict::Fail {
        let b: Vec<_> = before.domains().collect();
        let a: Vec<_> = after.domains().collect();
        prop_assert_eq!(b, a, "a failed resolution left the context changed");
        return Ok(());
    }
    let referent = r.referent.clone().unwrap();
    let domain = r.domain.clone().unwrap();
    use refdom::lexicon::DetClass;
    match expr.det {
        DetClass::Pronoun => {
            let b: Vec<_> = before.domains().collect();
            let a: Vec<_> = after.domains().collect();
            prop_assert_eq!(b, a, "pronoun restructuring must be the identity");
        }
        DetClass::Indefinite | DetClass::Numeral(_) => {
            prop_assert!(r.fresh);
            prop_assert!(!before.contains(&referent), "{} existed before", referent);
        }
        DetClass::IndefiniteAnother => {
            prop_assert!(!before.contains(&referent));
            let prior = before.focused_element(&domain).cloned();
            prop_assert_ne!(Some(referent.clone()), prior);
        }
        DetClass::Demonstrative => {
            prop_assert!(!before.contains(&domain), "demonstratives create a domain");
            let d = after.domain(&domain).unwrap();
            prop_assert_eq!(d.partitions.len(), 1);
            prop_assert_eq!(d.partitions[0].cells.len(), 1);
            prop_assert!(before.contains(&referent));
            let b: Vec<_> = before.domains().collect();
            let a: Vec<_> = after.domains().filter(|d| d.id != domain).collect();
            prop_assert_eq!(b, a, "the source domain must stay unchanged");
        }
        _ => {}
    }
    // a whole-group definite refers to the group itself, which has no focus
    if referent != domain {
        prop_assert_eq!(after.focused_element(&domain), Some(&referent));
    }
    prop_assert_eq!(&after.activation()[0], &domain);
    Ok(())
}

/// Identical inputs give byte-identical traces.
pub fn prop_determinism(case: &DialogueCase) -> Result<(), TestCaseError> {
    let (_, a) = play(case)?;
    let (_, b) = play(case)?;
    prop_assert_eq!(traces(&a), traces(&b));
    Ok(())
}

// ---------------------------------------------------------------------------
// Type hierarchies

/// A random forest: node `i` has a parent among `0..i` or none.
pub fn forest() -> impl Strategy<Value = TypeHierarchy> {
    prop::collection::vec(prop::option::of(any::<prop::sample::Index>()), 1..12).prop_map(|parents| {
        let nodes = parents
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let parent = match p {
                    Some(ix) if i > 0 => Some(format!("T{}", ix.index(i))),
                    _ => None,
                };
                TypeNode::new(&format!("T{i}"), parent.as_deref())
            })
            .collect();
        TypeHierarchy::from_nodes(nodes).unwrap()
    })
}

/// Subsumption is reflexive, antisymmetric and transitive.
pub fn prop_partial_order(h: &TypeHierarchy) -> Result<(), TestCaseError> {
    let names: Vec<String> = h.names().map(str::to_string).collect();
    for a in &names {
        prop_assert!(h.subsumes(a, a));
        prop_assert!(!h.strictly_subsumes(a, a));
        for b in &names {
            if a != b && h.subsumes(a, b) {
                prop_assert!(!h.subsumes(b, a), "{} and {} subsume each other", a, b);
            }
            for c in &names {
                if h.subsumes(a, b) && h.subsumes(b, c) {
                    prop_assert!(h.subsumes(a, c), "{} ⊒ {} ⊒ {} but not transitively", a, b, c);
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Proximity clustering

pub fn positions() -> impl Strategy<Value = (Vec<[f64; 2]>, f64)> {
    (
        prop::collection::vec((0..40i32, 0..40i32), 0..=6),
        prop::sample::select(vec![0.5, 1.0, 2.0, 3.0, 5.0]),
    )
        .prop_map(|(v, t)| {
            (
                v.into_iter().map(|(x, y)| [f64::from(x) / 4.0, f64::from(y) / 4.0]).collect(),
                t,
            )
        })
}

/// Transitive closure of the "within threshold" relation, singletons dropped.
pub fn single_link_oracle(points: &[[f64; 2]], threshold: f64) -> BTreeSet<BTreeSet<usize>> {
    let n = points.len();
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let d = ((points[i][0] - points[j][0]).powi(2) + (points[i][1] - points[j][1]).powi(2)).sqrt();
            reach[i][j] = i == j || d <= threshold;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
            }
        }
    }
    (0..n)
        .map(|i| (0..n).filter(|&j| reach[i][j]).collect::<BTreeSet<_>>())
        .filter(|c| c.len() >= 2)
        .collect()
}

pub fn prop_clustering(points: &[[f64; 2]], threshold: f64) -> Result<(), TestCaseError> {
    let got: BTreeSet<BTreeSet<usize>> = proximity_clusters(points, threshold)
        .into_iter()
        .map(|c| c.into_iter().collect())
        .collect();
    prop_assert_eq!(got, single_link_oracle(points, threshold));
    Ok(())
}
