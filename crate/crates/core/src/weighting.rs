//! Term statistics and fuzzy node weights.
//!
//! A text leaf's weight for a term is `tf * log_b(n_t / nf)`, clamped to
//! [0, 1]. Element weights merge their children with an s-norm.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::SNorm;
use crate::xml::{DocumentTree, NodeId, NodeKind};

/// Lowercases, strips punctuation and splits on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.chars()
                .filter(|c| !c.is_ascii_punctuation() && !is_unicode_punctuation(*c))
                .flat_map(char::to_lowercase)
                .collect::<String>()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

fn is_unicode_punctuation(c: char) -> bool {
    matches!(
        c,
        '\u{2010}'..='\u{2027}'
            | '\u{2030}'..='\u{205E}'
            | '\u{00A1}'
            | '\u{00AB}'
            | '\u{00BB}'
            | '\u{00BF}'
    )
}

/// What counts as a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermMode {
    /// The whole normalized text value of a leaf is one term.
    #[default]
    Value,
    /// Every token is a term.
    Token,
}

/// The node population over which `n_t` and `nf` are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    /// The children of the root (the document's records).
    #[default]
    Records,
    /// Every text node.
    TextNodes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeightingConfig {
    pub log_base: f64,
    pub s_norm: SNorm,
    pub clamp: bool,
    pub term_mode: TermMode,
    pub population: Population,
    pub stem: bool,
    /// Terms removed before counting (already loaded, one entry per word).
    pub stopwords: Vec<String>,
}

impl Default for WeightingConfig {
    fn default() -> Self {
        WeightingConfig {
            log_base: 10.0,
            s_norm: SNorm::Max,
            clamp: true,
            term_mode: TermMode::Value,
            population: Population::Records,
            stem: false,
            stopwords: Vec::new(),
        }
    }
}

impl WeightingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.log_base > 0.0 && self.log_base != 1.0 && self.log_base.is_finite()) {
            return Err(Error::Config(format!(
                "log_base {} is not a valid base",
                self.log_base
            )));
        }
        Ok(())
    }
}

/// Reads a stopword file: one term per line, `#` starts a comment.
pub fn load_stopwords<P: AsRef<Path>>(path: P) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}

/// Turns leaf text into terms according to the configuration.
pub struct Analyzer {
    mode: TermMode,
    stopwords: HashSet<String>,
    stemmer: Option<Stemmer>,
}

impl Analyzer {
    pub fn new(config: &WeightingConfig) -> Self {
        Analyzer {
            mode: config.term_mode,
            stopwords: config.stopwords.iter().map(|s| s.to_lowercase()).collect(),
            stemmer: config.stem.then(|| Stemmer::create(Algorithm::English)),
        }
    }

    pub fn terms(&self, text: &str) -> Vec<String> {
        let tokens: Vec<String> = tokenize(text)
            .into_iter()
            .filter(|t| !self.stopwords.contains(t))
            .map(|t| match &self.stemmer {
                Some(s) => s.stem(&t).into_owned(),
                None => t,
            })
            .collect();
        match self.mode {
            TermMode::Token => tokens,
            TermMode::Value if tokens.is_empty() => Vec::new(),
            TermMode::Value => vec![tokens.join(" ")],
        }
    }
}

/// Document-local counts feeding the weight formula.
#[derive(Debug, Clone, PartialEq)]
pub struct DocStats {
    n_t: usize,
    nf: BTreeMap<String, usize>,
    tf: BTreeMap<(String, NodeId), usize>,
    vocabulary: Vec<String>,
    leaf_terms: BTreeMap<NodeId, Vec<String>>,
}

impl DocStats {
    pub fn build(tree: &DocumentTree, analyzer: &Analyzer, population: Population) -> Self {
        let mut tf: BTreeMap<(String, NodeId), usize> = BTreeMap::new();
        let mut vocabulary = Vec::new();
        let mut seen = HashSet::new();
        let mut leaf_terms: BTreeMap<NodeId, Vec<String>> = BTreeMap::new();
        for leaf in tree.leaves(tree.root()) {
            let terms = analyzer.terms(&tree.node(leaf).label);
            let mut distinct: Vec<String> = Vec::new();
            for term in &terms {
                *tf.entry((term.clone(), leaf)).or_insert(0) += 1;
                if seen.insert(term.clone()) {
                    vocabulary.push(term.clone());
                }
                if !distinct.contains(term) {
                    distinct.push(term.clone());
                }
            }
            if !distinct.is_empty() {
                leaf_terms.insert(leaf, distinct);
            }
        }

        let units: Vec<NodeId> = match population {
            Population::Records => tree.children(tree.root()).to_vec(),
            Population::TextNodes => tree.leaves(tree.root()).collect(),
        };
        let mut nf: BTreeMap<String, usize> = BTreeMap::new();
        for &unit in &units {
            let present: HashSet<&String> = tree
                .leaves(unit)
                .flat_map(|leaf| leaf_terms.get(&leaf).into_iter().flatten())
                .collect();
            for term in present {
                *nf.entry(term.clone()).or_insert(0) += 1;
            }
        }

        DocStats {
            n_t: units.len(),
            nf,
            tf,
            vocabulary,
            leaf_terms,
        }
    }

    /// Builds statistics from raw counts.
    pub fn from_counts(
        n_t: usize,
        nf: impl IntoIterator<Item = (String, usize)>,
        tf: impl IntoIterator<Item = ((String, NodeId), usize)>,
    ) -> Result<Self> {
        let nf: BTreeMap<_, _> = nf.into_iter().collect();
        let tf: BTreeMap<_, _> = tf.into_iter().collect();
        for (term, &count) in &nf {
            if count == 0 || count > n_t {
                return Err(Error::Domain(format!(
                    "nf[{term:?}] = {count} must lie in 1..={n_t}"
                )));
            }
        }
        let mut vocabulary: Vec<String> = Vec::new();
        let mut leaf_terms: BTreeMap<NodeId, Vec<String>> = BTreeMap::new();
        for ((term, node), &count) in &tf {
            if count == 0 {
                return Err(Error::Domain(format!("tf({term:?}, {node}) must be >= 1")));
            }
            if !nf.contains_key(term) {
                return Err(Error::Domain(format!("term {term:?} has tf but no nf")));
            }
            if !vocabulary.contains(term) {
                vocabulary.push(term.clone());
            }
            leaf_terms.entry(*node).or_default().push(term.clone());
        }
        Ok(DocStats {
            n_t,
            nf,
            tf,
            vocabulary,
            leaf_terms,
        })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn nf(&self, term: &str) -> Option<usize> {
        self.nf.get(term).copied()
    }

    pub fn tf(&self, term: &str, node: NodeId) -> Option<usize> {
        self.tf.get(&(term.to_string(), node)).copied()
    }

    /// Distinct terms in order of first appearance.
    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    /// Distinct terms recorded for a text node.
    pub fn terms_of(&self, node: NodeId) -> &[String] {
        self.leaf_terms.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// A membership degree in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct NodeWeight(f64);

impl NodeWeight {
    pub const ZERO: NodeWeight = NodeWeight(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(NodeWeight(value))
        } else {
            Err(Error::DegreeOutOfRange { value })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Raw weight formula, before clamping.
pub fn raw_weight(tf: usize, n_t: usize, nf: usize, log_base: f64) -> f64 {
    tf as f64 * (n_t as f64 / nf as f64).log(log_base)
}

/// Weight of `term` in text node `node`.
pub fn term_weight(
    term: &str,
    node: NodeId,
    stats: &DocStats,
    config: &WeightingConfig,
) -> Result<NodeWeight> {
    let missing = || Error::MissingStatistics {
        term: term.to_string(),
        node,
    };
    let tf = stats.tf(term, node).ok_or_else(missing)?;
    let nf = stats.nf(term).ok_or_else(missing)?;
    let raw = raw_weight(tf, stats.n_t(), nf, config.log_base);
    let value = if config.clamp {
        raw.clamp(0.0, 1.0)
    } else {
        raw.max(0.0)
    };
    NodeWeight::new(value)
}

/// Weight computations bound to one document.
pub struct Weigher<'a> {
    tree: &'a DocumentTree,
    stats: &'a DocStats,
    config: &'a WeightingConfig,
}

impl<'a> Weigher<'a> {
    pub fn new(tree: &'a DocumentTree, stats: &'a DocStats, config: &'a WeightingConfig) -> Self {
        Weigher {
            tree,
            stats,
            config,
        }
    }

    pub fn tree(&self) -> &DocumentTree {
        self.tree
    }

    pub fn stats(&self) -> &DocStats {
        self.stats
    }

    pub fn config(&self) -> &WeightingConfig {
        self.config
    }

    pub fn term_weight(&self, term: &str, node: NodeId) -> Result<NodeWeight> {
        term_weight(term, node, self.stats, self.config)
    }

    /// s-norm merge of the children's weights for `term`; 0 when the term does
    /// not occur below `element`.
    pub fn node_weight(&self, term: &str, element: NodeId) -> Result<NodeWeight> {
        let node = self.tree.node(element);
        if node.kind != NodeKind::Element {
            return Err(Error::WrongKind {
                node: element,
                found: node.kind.as_str(),
                expected: "NE",
            });
        }
        let mut acc = 0.0;
        for &child in &node.children {
            let w = match self.tree.node(child).kind {
                NodeKind::Text if self.stats.tf(term, child).is_some() => {
                    self.term_weight(term, child)?.value()
                }
                NodeKind::Text => continue,
                NodeKind::Element => self.node_weight(term, child)?.value(),
            };
            acc = self.config.s_norm.apply(acc, w);
        }
        NodeWeight::new(acc)
    }

    /// Weight of a text node or element for `term`, whichever kind it is.
    pub fn weight(&self, term: &str, node: NodeId) -> Result<NodeWeight> {
        if self.tree.node(node).is_text() {
            match self.stats.tf(term, node) {
                Some(_) => self.term_weight(term, node),
                None => Ok(NodeWeight::ZERO),
            }
        } else {
            self.node_weight(term, node)
        }
    }

    /// Term-independent weight of `node`: the s-norm over every term that
    /// occurs below it.
    pub fn subtree_weight(&self, node: NodeId) -> Result<NodeWeight> {
        let mut terms: Vec<&str> = Vec::new();
        for leaf in self.tree.leaves(node) {
            for t in self.stats.terms_of(leaf) {
                if !terms.contains(&t.as_str()) {
                    terms.push(t);
                }
            }
        }
        let mut acc = 0.0;
        for term in terms {
            acc = self.config.s_norm.apply(acc, self.weight(term, node)?.value());
        }
        NodeWeight::new(acc)
    }
}
