//! Builds one L-context per internal node of a document.
//!
//! All contexts of a document share the same object set: the labels of the
//! field elements (level-1 elements, whose children are text), merged across
//! the document in first-seen order. A level-2 parent uses the document's
//! terms as attributes; a higher parent uses its own children, with each cell
//! merging the weights of the matching fields below that child.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::context::LContext;
use crate::error::{Error, Result};
use crate::weighting::{tokenize, Weigher};
use crate::xml::{LevelSets, NodeId};

/// Term symbols (`E1`, `E2`, ...) and the normalized text they stand for.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub symbol: String,
    pub text: String,
}

impl Lexicon {
    pub fn from_terms<S: AsRef<str>>(terms: &[S]) -> Self {
        Lexicon {
            entries: terms
                .iter()
                .enumerate()
                .map(|(i, t)| LexiconEntry {
                    symbol: format!("E{}", i + 1),
                    text: t.as_ref().to_string(),
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.symbol.as_str())
    }

    pub fn text_of(&self, symbol: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.symbol == symbol)
            .map(|e| e.text.as_str())
    }

    /// Symbol of the term whose text matches `text` after normalization.
    pub fn symbol_for(&self, text: &str) -> Option<&str> {
        let normalized = tokenize(text).join(" ");
        self.entries
            .iter()
            .find(|e| e.text == text || e.text == normalized)
            .map(|e| e.symbol.as_str())
    }
}

/// A per-node context together with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeContext {
    pub origin: NodeId,
    pub path: String,
    /// 1-based number in post-order (children before parents).
    pub seq: usize,
    pub context: LContext,
}

pub struct ContextBuilder<'a> {
    weigher: &'a Weigher<'a>,
    levels: &'a LevelSets,
    objects: Vec<String>,
    field_label: HashMap<NodeId, String>,
    lexicon: Lexicon,
}

impl<'a> ContextBuilder<'a> {
    pub fn new(weigher: &'a Weigher<'a>, levels: &'a LevelSets) -> Self {
        let tree = weigher.tree();
        let fields: HashSet<NodeId> = levels
            .level(1)
            .iter()
            .copied()
            .filter(|&n| tree.node(n).is_element())
            .collect();

        // A tag gets ordinal suffixes when some parent has two such fields.
        let mut repeating: HashSet<&str> = HashSet::new();
        for node in tree.nodes() {
            let mut counts: HashMap<&str, usize> = HashMap::new();
            for &c in &node.children {
                if fields.contains(&c) {
                    let n = counts.entry(tree.node(c).label.as_str()).or_insert(0);
                    *n += 1;
                    if *n > 1 {
                        repeating.insert(tree.node(c).label.as_str());
                    }
                }
            }
        }
        let field_label: HashMap<NodeId, String> = fields
            .iter()
            .map(|&n| {
                let node = tree.node(n);
                let label = if repeating.contains(node.label.as_str()) {
                    format!("{}{}", node.label, node.ordinal)
                } else {
                    node.label.clone()
                };
                (n, label)
            })
            .collect();

        let mut objects: Vec<String> = Vec::new();
        if fields.contains(&tree.root()) {
            objects.push(field_label[&tree.root()].clone());
        }
        for node in tree.nodes() {
            let mut anchor: Option<usize> = None;
            for c in &node.children {
                let Some(label) = field_label.get(c) else {
                    continue;
                };
                match objects.iter().position(|o| o == label) {
                    Some(pos) => anchor = Some(pos),
                    None => {
                        let at = anchor.map_or(0, |a| a + 1);
                        objects.insert(at, label.clone());
                        anchor = Some(at);
                    }
                }
            }
        }

        ContextBuilder {
            weigher,
            levels,
            objects,
            field_label,
            lexicon: Lexicon::from_terms(weigher.stats().vocabulary()),
        }
    }

    /// Shared object labels of every context of this document.
    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    /// Row label of a field element.
    pub fn field_label(&self, node: NodeId) -> Option<&str> {
        self.field_label.get(&node).map(String::as_str)
    }

    /// Internal nodes that receive a context: every element of level >= 2,
    /// or the root alone when the document is a single field.
    pub fn context_nodes(&self) -> Vec<NodeId> {
        let tree = self.weigher.tree();
        let root = tree.root();
        tree.post_order()
            .into_iter()
            .filter(|&n| {
                tree.node(n).is_element()
                    && (self.levels.level_of(n) >= 2 || (n == root && self.levels.level_of(n) == 1))
            })
            .collect()
    }

    pub fn build_level_context(&self, parent: NodeId) -> Result<LContext> {
        let tree = self.weigher.tree();
        let node = tree.node(parent);
        if !node.is_element() {
            return Err(Error::WrongKind {
                node: parent,
                found: node.kind.as_str(),
                expected: "NE",
            });
        }
        let s_norm = self.weigher.config().s_norm;
        let rows = self.objects.len();

        if self.levels.level_of(parent) <= 2 {
            let fields: Vec<NodeId> = if self.field_label.contains_key(&parent) {
                vec![parent]
            } else {
                node.children
                    .iter()
                    .copied()
                    .filter(|c| self.field_label.contains_key(c))
                    .collect()
            };
            let terms = self.weigher.stats().vocabulary();
            let mut degrees = vec![vec![0.0; terms.len()]; rows];
            for (r, label) in self.objects.iter().enumerate() {
                for &f in fields.iter().filter(|f| &self.field_label[f] == label) {
                    for (t, term) in terms.iter().enumerate() {
                        let w = self.weigher.node_weight(term, f)?.value();
                        degrees[r][t] = s_norm.apply(degrees[r][t], w);
                    }
                }
            }
            let attributes = self.lexicon.symbols().map(str::to_string).collect();
            return LContext::new(self.objects.clone(), attributes, degrees);
        }

        let columns: Vec<NodeId> = node
            .children
            .iter()
            .copied()
            .filter(|&c| tree.node(c).is_element())
            .collect();
        let mut degrees = vec![vec![0.0; columns.len()]; rows];
        for (j, &col) in columns.iter().enumerate() {
            for d in tree.descendants(col) {
                let Some(label) = self.field_label.get(&d) else {
                    continue;
                };
                let r = self
                    .objects
                    .iter()
                    .position(|o| o == label)
                    .expect("every field label is an object");
                let w = self.weigher.subtree_weight(d)?.value();
                degrees[r][j] = s_norm.apply(degrees[r][j], w);
            }
        }
        let attributes = columns.iter().map(|&c| tree.indexed_label(c)).collect();
        LContext::new(self.objects.clone(), attributes, degrees)
    }

    /// Contexts of every context node, numbered from 1 in post-order.
    pub fn build_all(&self) -> Result<Vec<NodeContext>> {
        let tree = self.weigher.tree();
        self.context_nodes()
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                Ok(NodeContext {
                    origin: n,
                    path: tree.path(n),
                    seq: i + 1,
                    context: self.build_level_context(n)?,
                })
            })
            .collect()
    }
}
