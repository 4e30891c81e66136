//! Human-facing exports: context CSV, lattice JSON and Graphviz DOT.
//!
//! All floats are written at 4 decimals so exports diff cleanly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::context::{FuzzySet, LContext};
use crate::error::Result;
use crate::fuzzy::Implication;
use crate::lattice::{ConceptId, ConceptLattice, MemberSpan};
use crate::xml::NodeId;

pub const EXPORT_DECIMALS: usize = 4;

/// Fill colors for member classes, cycled when there are more members.
const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];
const SHARED_FILL: &str = "#d9d9d9";

pub fn round_degree(v: f64) -> f64 {
    let r = (v * 1e4).round() / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn context_csv(ctx: &LContext) -> String {
    ctx.to_csv("R", EXPORT_DECIMALS)
}

/// Exported lattice. Degree maps hold only non-zero entries, in column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDocument {
    pub implication: Implication,
    pub origin: Option<NodeId>,
    pub seq: Option<usize>,
    pub objects: Vec<String>,
    pub attributes: Vec<String>,
    pub members: Vec<MemberSpan>,
    pub top: ConceptId,
    pub bottom: ConceptId,
    pub concepts: Vec<ConceptDocument>,
    /// `[lower, upper]` pairs of the cover relation.
    pub covers: Vec<[ConceptId; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptDocument {
    pub id: ConceptId,
    pub extent: Map<String, Value>,
    pub intent: Map<String, Value>,
}

fn degree_map(labels: &[String], set: &FuzzySet) -> Map<String, Value> {
    labels
        .iter()
        .zip(set.degrees())
        .filter(|(_, &d)| round_degree(d) != 0.0)
        .map(|(l, &d)| (l.clone(), Value::from(round_degree(d))))
        .collect()
}

impl LatticeDocument {
    pub fn from_lattice(lattice: &ConceptLattice, members: &[MemberSpan]) -> Self {
        let ctx = lattice.context();
        LatticeDocument {
            implication: lattice.implication(),
            origin: lattice.origin(),
            seq: lattice.seq(),
            objects: ctx.objects().to_vec(),
            attributes: ctx.attributes().to_vec(),
            members: members.to_vec(),
            top: lattice.top(),
            bottom: lattice.bottom(),
            concepts: lattice
                .concepts()
                .iter()
                .map(|c| ConceptDocument {
                    id: c.id,
                    extent: degree_map(ctx.objects(), &c.extent),
                    intent: degree_map(ctx.attributes(), &c.intent),
                })
                .collect(),
            covers: lattice.covers().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn lattice_json(lattice: &ConceptLattice, members: &[MemberSpan]) -> Result<String> {
    LatticeDocument::from_lattice(lattice, members).to_json()
}

fn dot_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

/// Graphviz digraph of the cover relation, drawn bottom-up. Nodes are
/// labeled with their intent support; with members, each node is put in the
/// class of every member contributing to its intent.
pub fn lattice_dot(lattice: &ConceptLattice, members: &[MemberSpan]) -> String {
    let ctx = lattice.context();
    let mut out = String::new();
    out.push_str("digraph lattice {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=box, style=filled, fillcolor=\"#ffffff\", fontname=\"Helvetica\"];\n");
    for (i, m) in members.iter().enumerate() {
        let _ = writeln!(
            out,
            "  // m{i}: {} columns {}..{}",
            m.name.replace('\n', " "),
            m.start,
            m.end
        );
    }
    for c in lattice.concepts() {
        let support: Vec<String> = c
            .intent
            .support()
            .map(|a| format!("{}:{:.4}", ctx.attributes()[a], c.intent.get(a)))
            .collect();
        let mut label = format!("#{}", c.id);
        if support.is_empty() {
            label.push_str("\n(empty intent)");
        }
        for s in &support {
            label.push('\n');
            label.push_str(s);
        }
        let owners: Vec<usize> = members
            .iter()
            .enumerate()
            .filter(|(_, m)| c.intent.support().any(|a| m.columns().contains(&a)))
            .map(|(i, _)| i)
            .collect();
        let mut attrs = format!("label=\"{}\"", dot_escape(&label));
        if !owners.is_empty() {
            let class: Vec<String> = owners.iter().map(|i| format!("m{i}")).collect();
            let fill = if owners.len() == 1 {
                PALETTE[owners[0] % PALETTE.len()]
            } else {
                SHARED_FILL
            };
            let _ = write!(attrs, ", class=\"{}\", fillcolor=\"{fill}\"", class.join(" "));
        }
        if c.id == lattice.top() || c.id == lattice.bottom() {
            attrs.push_str(", peripheries=2");
        }
        let _ = writeln!(out, "  c{} [{attrs}];", c.id);
    }
    for &(lower, upper) in lattice.covers() {
        let _ = writeln!(out, "  c{lower} -> c{upper};");
    }
    out.push_str("}\n");
    out
}
