mod common;

use std::collections::BTreeSet;

use common::*;
use fqx::contextualize::ContextBuilder;
use fqx::context::Universe;
use fqx::weighting::{raw_weight, term_weight, tokenize, Analyzer, DocStats, Population, Weigher, WeightingConfig};
use fqx::xml::{normalize_whitespace, NodeKind};
use fqx::{extract_levels, DocumentTree, Error, FuzzySet, Implication, LContext, SNorm};
use proptest::prelude::*;

const LOG3: f64 = 0.47712125471966244;
const LOG1_5: f64 = 0.17609125905568124;

fn bib_tree() -> DocumentTree {
    DocumentTree::from_path(fixture("bib.xml")).unwrap()
}

#[test]
fn fixture_tree_shape() {
    let tree = bib_tree();
    let root = tree.node(tree.root());
    assert_eq!(root.label, "bib");
    let books: Vec<_> = tree.children(tree.root()).iter().map(|&c| tree.indexed_label(c)).collect();
    assert_eq!(books, ["book[0]", "book[1]", "book[2]"]);

    let levels = extract_levels(&tree);
    assert_eq!(levels.depth(), 4);
    let texts: Vec<&str> = levels.level(0).iter().map(|&n| tree.node(n).label.as_str()).collect();
    assert_eq!(texts.len(), 14);
    let distinct: BTreeSet<&str> = texts.iter().copied().collect();
    assert_eq!(distinct.len(), 11);
    assert_eq!(levels.level(3), [tree.root()]);
}

#[test]
fn fixture_lexicon_in_document_order() {
    let b = bib_bundle();
    let texts: Vec<&str> = b.lexicon.entries().iter().map(|e| e.text.as_str()).collect();
    assert_eq!(texts.len(), 11);
    assert_eq!(texts[0], "beginner");
    assert_eq!(texts[1], "css 2");
    assert_eq!(texts[2], "daniel glazman");
    assert_eq!(texts[3], "eyrolles");
    assert_eq!(texts[5], "michael j young");
    assert_eq!(texts[6], "microsoft press");
    assert_eq!(texts[7], "intermediate");
    assert_eq!(texts[8], "eng");
    assert_eq!(texts[10], "richard clark");
    assert_eq!(b.lexicon.symbol_for("Microsoft  Press"), Some("E7"));
}

#[test]
fn fixture_seq_numbers_follow_post_order() {
    let b = bib_bundle();
    let paths: Vec<(usize, &str)> = b.entries.iter().map(|e| (e.seq, e.path.as_str())).collect();
    assert_eq!(
        paths,
        [(1, "/bib/book[0]"), (2, "/bib/book[1]"), (3, "/bib/book[2]"), (4, "/bib")]
    );
}

#[test]
fn book0_context_cells() {
    let b = bib_bundle();
    let c = b.entry_by_seq(1).unwrap().context();
    let at = |o: &str, a: &str| c.degree(c.object_index(o).unwrap(), c.attribute_index(a).unwrap());
    assert_eq!(c.shape(), (6, 11));
    assert_eq!(at("title", "E2"), LOG3);
    assert_eq!(at("publisher", "E4"), LOG3);
    assert_eq!(at("level", "E1"), LOG1_5);
    assert_eq!(at("author0", "E3"), LOG1_5);
    let nonzero = c.rows().iter().flatten().filter(|&&d| d > 0.0).count();
    assert_eq!(nonzero, 4);
}

#[test]
fn root_context_cells() {
    let b = bib_bundle();
    let c = b.entry_by_seq(4).unwrap().context();
    assert_eq!(c.shape(), (6, 3));
    assert_eq!(c.attributes(), ["book[0]", "book[1]", "book[2]"]);
    let title = c.object_index("title").unwrap();
    assert_eq!(c.degree(title, 2), LOG3);
}

#[test]
fn singleton_document() {
    let tree = DocumentTree::parse_str("<a>x</a>").unwrap();
    assert_eq!(tree.len(), 2);
    assert_eq!(tree.node(1).kind, NodeKind::Text);
    assert_eq!(tree.node(1).label, "x");
    let levels = extract_levels(&tree);
    assert_eq!(levels.levels(), [vec![1], vec![0]]);
}

#[test]
fn malformed_and_empty_inputs() {
    assert!(matches!(DocumentTree::parse_str("<a><b/>"), Err(Error::Parse { .. })));
    assert!(matches!(DocumentTree::parse_str(""), Err(Error::Parse { .. } | Error::EmptyInput)));
    assert!(matches!(DocumentTree::parse(&[0xff, 0xfe]), Err(Error::Parse { .. })));
}

#[test]
fn debug_dump_schema() {
    let tree = DocumentTree::parse_str("<a><b>x</b></a>").unwrap();
    let dump = tree.debug_json(&extract_levels(&tree));
    let nodes = dump["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 3);
    for key in ["id", "kind", "label", "ordinal", "parent"] {
        assert!(nodes[0].get(key).is_some(), "missing {key}");
    }
    assert_eq!(dump["levels"], serde_json::json!([[2], [1], [0]]));
}

#[test]
fn tokenize_examples() {
    assert_eq!(tokenize("Daniel Glazman"), ["daniel", "glazman"]);
    assert_eq!(tokenize("CSS 2"), ["css", "2"]);
    assert!(tokenize("").is_empty());
}

#[test]
fn term_weight_examples() {
    assert!((raw_weight(1, 3, 2, 10.0) - 0.176).abs() < 5e-4);
    assert!((raw_weight(1, 3, 1, 10.0) - 0.477).abs() < 5e-4);
    assert_eq!(raw_weight(1, 5, 5, 10.0), 0.0);

    let tree = DocumentTree::parse_str("<r><s><a>p</a></s><s><a>p</a></s><s><a>q</a></s></r>").unwrap();
    let cfg = WeightingConfig::default();
    let stats = DocStats::build(&tree, &Analyzer::new(&cfg), cfg.population);
    let text = tree.leaves(tree.root()).next().unwrap();
    assert_eq!(term_weight("p", text, &stats, &cfg).unwrap().value(), LOG1_5);
    assert!(matches!(term_weight("zzz", text, &stats, &cfg), Err(Error::MissingStatistics { .. })));
}

#[test]
fn node_weight_takes_max_over_children() {
    // Record 0 holds "p" in two fields: one shared with another record
    // (0.1761) and one unique pair; the parent merges with max.
    let xml = "<r><s><f><a>p</a><b>u</b></f></s><s><a>p</a></s><s><a>z</a></s></r>";
    let tree = DocumentTree::parse_str(xml).unwrap();
    let cfg = WeightingConfig::default();
    let stats = DocStats::build(&tree, &Analyzer::new(&cfg), cfg.population);
    let w = Weigher::new(&tree, &stats, &cfg);
    let f = tree.find_path("/r/s[0]/f[0]").unwrap();
    let a = tree.find_path("/r/s[0]/f[0]/a[0]").unwrap();
    let b = tree.find_path("/r/s[0]/f[0]/b[0]").unwrap();
    assert_eq!(w.node_weight("p", a).unwrap().value(), LOG1_5);
    assert_eq!(w.node_weight("u", b).unwrap().value(), LOG3);
    assert_eq!(w.node_weight("p", f).unwrap().value(), LOG1_5);
    assert_eq!(w.node_weight("u", f).unwrap().value(), LOG3);
    assert_eq!(w.node_weight("z", f).unwrap().value(), 0.0);
    let text = tree.leaves(a).next().unwrap();
    assert!(matches!(w.node_weight("p", text), Err(Error::WrongKind { .. })));
}

#[test]
fn s_norm_variants() {
    assert_eq!(SNorm::Max.merge([0.17, 0.47]), 0.47);
    assert_eq!(SNorm::Max.merge([0.3]), 0.3);
    assert_eq!(SNorm::Max.merge([]), 0.0);
    assert!((SNorm::ProbabilisticSum.merge([0.5, 0.5]) - 0.75).abs() < 1e-12);
    assert_eq!(SNorm::BoundedSum.merge([0.7, 0.6]), 1.0);
}

#[test]
fn text_node_population_is_available() {
    let cfg = WeightingConfig { population: Population::TextNodes, ..Default::default() };
    let tree = bib_tree();
    let stats = DocStats::build(&tree, &Analyzer::new(&cfg), cfg.population);
    assert_eq!(stats.n_t(), 14);
}

#[test]
fn sufficiency_examples() {
    let ctx = LContext::new(
        labels("x", 2),
        labels("y", 2),
        vec![vec![1.0, 0.5], vec![0.5, 1.0]],
    )
    .unwrap();
    let x = FuzzySet::new(Universe::Objects, vec![1.0, 0.0]).unwrap();
    let up = ctx.sufficiency_up(&x, Implication::Godel).unwrap();
    assert_eq!(up.degrees(), [1.0, 0.5]);
    let empty = FuzzySet::empty(Universe::Objects, 2);
    assert_eq!(ctx.sufficiency_up(&empty, Implication::Godel).unwrap().degrees(), [1.0, 1.0]);
    let wrong = FuzzySet::empty(Universe::Attributes, 2);
    assert!(matches!(ctx.sufficiency_up(&wrong, Implication::Godel), Err(Error::Domain(_))));

    let t4 = reference_table(4);
    let ones = FuzzySet::full(Universe::Attributes, 3);
    let down = ctx_down(&t4, &ones);
    let minima: Vec<f64> = t4.rows().iter().map(|r| r.iter().copied().fold(1.0, f64::min)).collect();
    assert_eq!(down, minima);

    let id3 = LContext::new(
        labels("x", 3),
        labels("y", 3),
        vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
    )
    .unwrap();
    let y1 = FuzzySet::crisp(Universe::Attributes, 3, &[0]);
    assert_eq!(id3.closure(&y1, Implication::Godel).unwrap(), y1);
}

fn ctx_down(ctx: &LContext, y: &FuzzySet) -> Vec<f64> {
    ctx.sufficiency_down(y, Implication::Godel).unwrap().degrees().to_vec()
}

#[test]
fn context_json_and_csv_round_trip() {
    let t1 = reference_table(1);
    let back = LContext::from_json(&t1.to_json().unwrap()).unwrap();
    assert_eq!(back, t1);
    let json: serde_json::Value = serde_json::from_str(&t1.to_json().unwrap()).unwrap();
    for key in ["objects", "attributes", "degrees", "scale"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(LContext::from_csv(&t1.to_csv("R", 2)).unwrap(), t1);
}

#[test]
fn invalid_contexts_are_rejected() {
    let dup = LContext::new(vec!["a".into(), "a".into()], labels("y", 1), vec![vec![0.0], vec![1.0]]);
    assert!(dup.is_err());
    let range = LContext::new(labels("x", 1), labels("y", 1), vec![vec![1.5]]);
    assert!(range.is_err());
    let ragged = LContext::new(labels("x", 2), labels("y", 2), vec![vec![0.0], vec![1.0, 0.0]]);
    assert!(ragged.is_err());
}

/// Random element trees rendered to XML, with a few tags repeated so that
/// ordinals occur.
fn xml_tree() -> impl Strategy<Value = String> {
    let leaf = "[a-z]{1,6}( [a-z0-9]{1,4})?".prop_map(|t| t);
    let tags = prop::sample::select(vec!["a", "b", "c", "d"]);
    let element = (tags.clone(), leaf).prop_map(|(t, x)| format!("<{t}>{x}</{t}>"));
    element
        .prop_recursive(4, 40, 4, move |inner| {
            (prop::sample::select(vec!["r", "s", "t"]), prop::collection::vec(inner, 1..4))
                .prop_map(|(t, kids)| format!("<{t}>{}</{t}>", kids.concat()))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn levels_partition_the_tree(xml in xml_tree()) {
        let tree = DocumentTree::parse_str(&xml).unwrap();
        let levels = extract_levels(&tree);
        let mut all: Vec<usize> = levels.levels().iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..tree.len()).collect::<Vec<_>>());
        let texts: BTreeSet<usize> = tree.nodes().iter().filter(|n| n.is_text()).map(|n| n.id).collect();
        prop_assert_eq!(levels.level(0).iter().copied().collect::<BTreeSet<_>>(), texts);
        for n in tree.nodes() {
            if let Some(p) = n.parent {
                prop_assert!(levels.level_of(p) > levels.level_of(n.id));
            }
        }
        prop_assert_eq!(levels.levels().last().unwrap(), &vec![tree.root()]);
    }

    #[test]
    fn reserialize_is_a_fixed_point(xml in xml_tree()) {
        let tree = DocumentTree::parse_str(&xml).unwrap();
        let again = DocumentTree::parse_str(&tree.to_xml()).unwrap();
        prop_assert_eq!(&again, &tree);
        prop_assert_eq!(extract_levels(&again), extract_levels(&tree));
    }

    #[test]
    fn text_nodes_keep_normalized_source_text(words in prop::collection::vec("[A-Za-z]{1,5}", 1..5)) {
        let raw = words.join("  \n ");
        let tree = DocumentTree::parse_str(&format!("<a> {raw} </a>")).unwrap();
        prop_assert_eq!(&tree.node(1).label, &normalize_whitespace(&raw));
    }

    #[test]
    fn weight_monotonicity(n_t in 1usize..50, nf_a in 1usize..50, nf_b in 1usize..50, tf_a in 1usize..5, tf_b in 1usize..5) {
        let (lo, hi) = (nf_a.min(nf_b).min(n_t), nf_a.max(nf_b).min(n_t));
        prop_assert!(raw_weight(1, n_t, lo, 10.0) >= raw_weight(1, n_t, hi, 10.0));
        let (t1, t2) = (tf_a.min(tf_b), tf_a.max(tf_b));
        prop_assert!(raw_weight(t1, n_t, lo, 10.0) <= raw_weight(t2, n_t, lo, 10.0));
        let clamp = |v: f64| v.clamp(0.0, 1.0);
        prop_assert!(clamp(raw_weight(t1, n_t, lo, 10.0)) <= clamp(raw_weight(t2, n_t, lo, 10.0)));
    }

    #[test]
    fn node_weights_grow_up_the_tree(xml in xml_tree()) {
        let tree = DocumentTree::parse_str(&xml).unwrap();
        let cfg = WeightingConfig::default();
        let stats = DocStats::build(&tree, &Analyzer::new(&cfg), cfg.population);
        let w = Weigher::new(&tree, &stats, &cfg);
        for term in stats.vocabulary() {
            for n in tree.nodes().iter().filter(|n| n.is_element()) {
                let parent = w.node_weight(term, n.id).unwrap().value();
                prop_assert!((0.0..=1.0).contains(&parent));
                for &c in &n.children {
                    if tree.node(c).is_element() {
                        prop_assert!(parent >= w.node_weight(term, c).unwrap().value());
                    }
                }
            }
        }
    }

    #[test]
    fn contexts_share_objects_and_stay_in_range(xml in xml_tree()) {
        let tree = DocumentTree::parse_str(&xml).unwrap();
        let levels = extract_levels(&tree);
        let cfg = WeightingConfig::default();
        let stats = DocStats::build(&tree, &Analyzer::new(&cfg), cfg.population);
        let w = Weigher::new(&tree, &stats, &cfg);
        let builder = ContextBuilder::new(&w, &levels);
        let all = builder.build_all().unwrap();
        prop_assert!(!all.is_empty());
        for (i, nc) in all.iter().enumerate() {
            prop_assert_eq!(nc.seq, i + 1);
            prop_assert_eq!(nc.context.objects(), builder.objects());
            prop_assert!(nc.context.rows().iter().flatten().all(|d| (0.0..=1.0).contains(d)));
        }
    }

    #[test]
    fn stats_are_deterministic(xml in xml_tree()) {
        let tree = DocumentTree::parse_str(&xml).unwrap();
        let cfg = WeightingConfig::default();
        let a = DocStats::build(&tree, &Analyzer::new(&cfg), cfg.population);
        let b = DocStats::build(&tree, &Analyzer::new(&cfg), cfg.population);
        prop_assert_eq!(a.vocabulary(), b.vocabulary());
        for t in a.vocabulary() {
            prop_assert_eq!(a.nf(t), b.nf(t));
        }
    }
}
