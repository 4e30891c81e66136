//! XML ingestion: a typed node tree (text and element nodes) and the
//! per-level node sets obtained by ascending traversal.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    /// Text node (NT), always a leaf.
    #[serde(rename = "NT")]
    Text,
    /// Element node (NE), always internal.
    #[serde(rename = "NE")]
    Element,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Text => "NT",
            NodeKind::Element => "NE",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XmlNode {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Tag name for elements, whitespace-normalized content for text.
    pub label: String,
    /// Index among siblings of the same kind and label.
    pub ordinal: usize,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

impl XmlNode {
    pub fn is_text(&self) -> bool {
        self.kind == NodeKind::Text
    }

    pub fn is_element(&self) -> bool {
        self.kind == NodeKind::Element
    }
}

/// A parsed document. Node ids are dense and follow document (pre-)order, so
/// the root is always node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentTree {
    nodes: Vec<XmlNode>,
}

/// Intermediate shape used while converting from the DOM, before ids exist.
enum Raw {
    Text(String),
    Element { tag: String, children: Vec<Raw> },
}

impl DocumentTree {
    /// Parses UTF-8 XML.
    ///
    /// Attributes become child elements holding a single text node,
    /// comments and processing instructions are dropped, text is
    /// whitespace-normalized and whitespace-only runs are discarded.
    /// Elements left without content are dropped as well.
    pub fn parse(source: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(source).map_err(|e| {
            let (line, column) = position_of(source, e.valid_up_to());
            Error::Parse {
                line,
                column,
                message: format!("invalid UTF-8: {e}"),
            }
        })?;
        Self::parse_str(text)
    }

    pub fn parse_str(source: &str) -> Result<Self> {
        if source.trim().is_empty() {
            return Err(Error::EmptyInput);
        }
        let doc = roxmltree::Document::parse(source).map_err(|e| {
            let pos = e.pos();
            Error::Parse {
                line: pos.row,
                column: pos.col,
                message: e.to_string(),
            }
        })?;
        let raw = convert(doc.root_element()).ok_or(Error::EmptyInput)?;
        let mut tree = DocumentTree { nodes: Vec::new() };
        tree.flatten(raw, None, 0);
        Ok(tree)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::parse(&bytes)
    }

    fn flatten(&mut self, raw: Raw, parent: Option<NodeId>, ordinal: usize) -> NodeId {
        let id = self.nodes.len();
        let (kind, label, children) = match raw {
            Raw::Text(text) => (NodeKind::Text, text, Vec::new()),
            Raw::Element { tag, children } => (NodeKind::Element, tag, children),
        };
        self.nodes.push(XmlNode {
            id,
            kind,
            label,
            ordinal,
            parent,
            children: Vec::new(),
        });
        let mut seen: HashMap<(NodeKind, String), usize> = HashMap::new();
        for child in children {
            let key = match &child {
                Raw::Text(t) => (NodeKind::Text, t.clone()),
                Raw::Element { tag, .. } => (NodeKind::Element, tag.clone()),
            };
            let counter = seen.entry(key).or_insert(0);
            let child_ordinal = *counter;
            *counter += 1;
            let child_id = self.flatten(child, Some(id), child_ordinal);
            self.nodes[id].children.push(child_id);
        }
        id
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &XmlNode {
        &self.nodes[id]
    }

    pub fn get(&self, id: NodeId) -> Option<&XmlNode> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> &[XmlNode] {
        &self.nodes
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id].parent
    }

    /// Pre-order iteration over the subtree rooted at `id`, `id` included.
    pub fn descendants(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        // Pre-order ids make every subtree a contiguous id range.
        id..self.subtree_end(id)
    }

    /// Text leaves under `id` in document order.
    pub fn leaves(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.descendants(id).filter(|&n| self.nodes[n].is_text())
    }

    fn subtree_end(&self, id: NodeId) -> NodeId {
        let mut end = id;
        while let Some(&last) = self.nodes[end].children.last() {
            end = last;
        }
        end + 1
    }

    /// Post-order traversal of the whole tree (children before parents).
    pub fn post_order(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root(), false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                out.push(id);
            } else {
                stack.push((id, true));
                for &c in self.nodes[id].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Location path such as `/bib/book[1]`; the root carries no index.
    pub fn path(&self, id: NodeId) -> String {
        let mut segments = Vec::new();
        let mut cur = Some(id);
        while let Some(n) = cur {
            let node = &self.nodes[n];
            let seg = match (node.kind, node.parent) {
                (NodeKind::Element, None) => node.label.clone(),
                (NodeKind::Element, Some(_)) => format!("{}[{}]", node.label, node.ordinal),
                (NodeKind::Text, _) => format!("text()[{}]", self.text_position(n)),
            };
            segments.push(seg);
            cur = node.parent;
        }
        segments.reverse();
        format!("/{}", segments.join("/"))
    }

    /// `tag[ordinal]` for elements, used as column labels of higher levels.
    pub fn indexed_label(&self, id: NodeId) -> String {
        let node = &self.nodes[id];
        match node.kind {
            NodeKind::Element => format!("{}[{}]", node.label, node.ordinal),
            NodeKind::Text => format!("text()[{}]", self.text_position(id)),
        }
    }

    fn text_position(&self, id: NodeId) -> usize {
        match self.nodes[id].parent {
            Some(p) => self.nodes[p]
                .children
                .iter()
                .filter(|&&c| self.nodes[c].is_text())
                .position(|&c| c == id)
                .unwrap_or(0),
            None => 0,
        }
    }

    /// Resolves a location path produced by [`DocumentTree::path`].
    pub fn find_path(&self, path: &str) -> Option<NodeId> {
        (0..self.nodes.len()).find(|&n| self.nodes[n].is_element() && self.path(n) == path)
    }

    /// Serializes the tree back to XML (attributes are emitted as the child
    /// elements they were normalized into).
    pub fn to_xml(&self) -> String {
        let mut out = String::new();
        self.write_xml(self.root(), &mut out);
        out
    }

    fn write_xml(&self, id: NodeId, out: &mut String) {
        let node = &self.nodes[id];
        match node.kind {
            NodeKind::Text => out.push_str(&escape(&node.label)),
            NodeKind::Element => {
                out.push('<');
                out.push_str(&node.label);
                out.push('>');
                for &c in &node.children {
                    self.write_xml(c, out);
                }
                out.push_str("</");
                out.push_str(&node.label);
                out.push('>');
            }
        }
    }

    /// JSON dump of the typed tree and its level sets.
    pub fn debug_json(&self, levels: &LevelSets) -> serde_json::Value {
        #[derive(Serialize)]
        struct NodeDump<'a> {
            id: NodeId,
            kind: NodeKind,
            label: &'a str,
            ordinal: usize,
            parent: Option<NodeId>,
        }
        let nodes: Vec<NodeDump<'_>> = self
            .nodes
            .iter()
            .map(|n| NodeDump {
                id: n.id,
                kind: n.kind,
                label: &n.label,
                ordinal: n.ordinal,
                parent: n.parent,
            })
            .collect();
        serde_json::json!({ "nodes": nodes, "levels": levels.levels() })
    }
}

fn convert(node: roxmltree::Node<'_, '_>) -> Option<Raw> {
    let mut children = Vec::new();
    for attr in node.attributes() {
        let value = normalize_whitespace(attr.value());
        if !value.is_empty() {
            children.push(Raw::Element {
                tag: attr.name().to_string(),
                children: vec![Raw::Text(value)],
            });
        }
    }
    for child in node.children() {
        if child.is_element() {
            if let Some(raw) = convert(child) {
                children.push(raw);
            }
        } else if child.is_text() {
            let value = normalize_whitespace(child.text().unwrap_or_default());
            if !value.is_empty() {
                children.push(Raw::Text(value));
            }
        }
    }
    if children.is_empty() {
        return None;
    }
    Some(Raw::Element {
        tag: node.tag_name().name().to_string(),
        children,
    })
}

/// Collapses whitespace runs to single spaces and trims the ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
    out
}

fn position_of(source: &[u8], offset: usize) -> (u32, u32) {
    let prefix = &source[..offset.min(source.len())];
    let line = prefix.iter().filter(|&&b| b == b'\n').count() as u32 + 1;
    let column = prefix.iter().rev().take_while(|&&b| b != b'\n').count() as u32 + 1;
    (line, column)
}

/// Node sets by height: level 0 holds the text leaves, the last level holds
/// only the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSets {
    levels: Vec<Vec<NodeId>>,
    level_of: Vec<usize>,
}

impl LevelSets {
    pub fn levels(&self) -> &[Vec<NodeId>] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &[NodeId] {
        self.levels.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn level_of(&self, node: NodeId) -> usize {
        self.level_of[node]
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// Assigns level 0 to text leaves and `1 + max(child levels)` to elements,
/// walking bottom-up until the root.
pub fn extract_levels(tree: &DocumentTree) -> LevelSets {
    let mut level_of = vec![0usize; tree.len()];
    for id in tree.post_order() {
        let node = tree.node(id);
        if node.is_element() {
            level_of[id] = 1 + node
                .children
                .iter()
                .map(|&c| level_of[c])
                .max()
                .unwrap_or(0);
        }
    }
    let height = level_of[tree.root()] + 1;
    let mut levels = vec![Vec::new(); height];
    for (id, &lvl) in level_of.iter().enumerate() {
        levels[lvl].push(id);
    }
    LevelSets { levels, level_of }
}
