//! Flexible querying of a concept lattice.
//!
//! A query is a fuzzy set of wanted attributes. It is inserted as a virtual
//! object into a private copy of the context, its concept is located by a
//! pruned upward search, and objects are ranked by how much of the query
//! they share.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::context::{FuzzySet, LContext, Universe};
use crate::contextualize::Lexicon;
use crate::error::{Error, Result};
use crate::lattice::{enumerate_concepts, ConceptId, ConceptLattice};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryTerm {
    pub attribute: String,
    pub degree: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    wanted: FuzzySet,
    label: String,
    terms: Vec<QueryTerm>,
}

impl Query {
    /// Builds a query directly from resolved column degrees.
    pub fn from_wanted(ctx: &LContext, wanted: FuzzySet) -> Result<Self> {
        if wanted.universe() != Universe::Attributes || wanted.len() != ctx.n_attributes() {
            return Err(Error::Domain(
                "query must range over the context's attributes".into(),
            ));
        }
        if wanted.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let terms = wanted
            .support()
            .map(|i| QueryTerm {
                attribute: ctx.attributes()[i].clone(),
                degree: wanted.get(i),
            })
            .collect();
        Ok(Query {
            label: query_label(ctx),
            wanted,
            terms,
        })
    }

    pub fn wanted(&self) -> &FuzzySet {
        &self.wanted
    }

    /// Name of the virtual object standing for the query.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[QueryTerm] {
        &self.terms
    }

    /// Upper bound of any relevance score.
    pub fn mass(&self) -> f64 {
        self.wanted.sigma_count()
    }
}

fn query_label(ctx: &LContext) -> String {
    let mut label = "?query".to_string();
    while ctx.object_index(&label).is_some() {
        label.push('\'');
    }
    label
}

/// Parses `attribute[:degree]` items against the context's columns.
pub fn parse_query<S: AsRef<str>>(spec: &[S], ctx: &LContext) -> Result<Query> {
    parse_query_with(spec, ctx, None)
}

/// Like [`parse_query`], also accepting term text known to `lexicon`.
///
/// A name resolves to the column with that exact label, else to the symbol
/// of the matching lexicon term, else to every column labelled
/// `<member>/<name>` in a nested context.
pub fn parse_query_with<S: AsRef<str>>(
    spec: &[S],
    ctx: &LContext,
    lexicon: Option<&Lexicon>,
) -> Result<Query> {
    if spec.is_empty() {
        return Err(Error::EmptyQuery);
    }
    let mut wanted = vec![0.0; ctx.n_attributes()];
    for item in spec {
        let item = item.as_ref().trim();
        let (name, degree) = split_degree(item)?;
        if !(degree > 0.0 && degree <= 1.0) {
            return Err(Error::QueryRange {
                name: name.to_string(),
                degree,
            });
        }
        let columns = resolve(name, ctx, lexicon);
        if columns.is_empty() {
            return Err(Error::UnknownAttribute {
                name: name.to_string(),
                suggestions: suggestions(name, ctx),
            });
        }
        for c in columns {
            wanted[c] = f64::max(wanted[c], degree);
        }
    }
    Query::from_wanted(ctx, FuzzySet::new(Universe::Attributes, wanted)?)
}

fn split_degree(item: &str) -> Result<(&str, f64)> {
    if let Some((name, deg)) = item.rsplit_once(':') {
        if let Ok(d) = deg.trim().parse::<f64>() {
            return Ok((name.trim(), d));
        }
    }
    if item.is_empty() {
        return Err(Error::EmptyQuery);
    }
    Ok((item, 1.0))
}

fn resolve(name: &str, ctx: &LContext, lexicon: Option<&Lexicon>) -> Vec<usize> {
    let by_label = |label: &str| -> Vec<usize> {
        if let Some(i) = ctx.attribute_index(label) {
            return vec![i];
        }
        let suffix = format!("/{label}");
        ctx.attributes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.ends_with(&suffix))
            .map(|(i, _)| i)
            .collect()
    };
    let direct = by_label(name);
    if !direct.is_empty() {
        return direct;
    }
    match lexicon.and_then(|l| l.symbol_for(name)) {
        Some(symbol) => by_label(symbol),
        None => Vec::new(),
    }
}

fn suggestions(name: &str, ctx: &LContext) -> Vec<String> {
    let lower = name.to_lowercase();
    // Prefixed nested columns are also offered by their bare name.
    let mut names: Vec<&str> = ctx.attributes().iter().map(String::as_str).collect();
    names.extend(ctx.attributes().iter().filter_map(|a| a.rsplit_once('/').map(|(_, b)| b)));
    names.sort_unstable();
    names.dedup();
    let mut scored: Vec<(f64, &str)> = names
        .into_iter()
        .map(|a| (strsim::normalized_levenshtein(&lower, &a.to_lowercase()), a))
        .filter(|(s, _)| *s >= 0.5)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    scored.into_iter().take(3).map(|(_, a)| a.to_string()).collect()
}

/// The lattice of the query-extended context. The base lattice is left
/// untouched.
#[derive(Debug, Clone)]
pub struct Overlay {
    pub lattice: ConceptLattice,
    /// Row of the virtual query object in the extended context.
    pub query_object: usize,
    /// Concept whose intent is the closure of the query.
    pub query_concept: ConceptId,
}

impl Overlay {
    pub fn context(&self) -> &LContext {
        self.lattice.context()
    }
}

pub fn insert_query(base: &ConceptLattice, q: &Query) -> Result<Overlay> {
    let ctx = base.context();
    if q.wanted.len() != ctx.n_attributes() {
        return Err(Error::Domain(
            "query does not match the lattice's attributes".into(),
        ));
    }
    let extended = ctx.with_object(&q.label, q.wanted.degrees())?;
    let imp = base.implication();
    let lattice = enumerate_concepts(&extended, imp)?.with_provenance(base.origin(), base.seq());
    let closed = extended.closure(&q.wanted, imp)?;
    let query_concept = lattice
        .find_by_intent(&closed)
        .ok_or_else(|| Error::Domain("query closure missing from overlay".into()))?;
    Ok(Overlay {
        query_object: extended.n_objects() - 1,
        lattice,
        query_concept,
    })
}

/// Outcome of the pruned search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Localization {
    pub concept: ConceptId,
    /// Concepts whose intent was tested.
    pub examined: usize,
}

/// Walks up from the bottom concept. A concept whose intent lacks part of
/// the query is dropped together with everything above it; the result is
/// the qualifying concept none of whose super-concepts qualifies.
pub fn locate_query_concept(overlay: &Overlay, q: &Query) -> Localization {
    let lattice = &overlay.lattice;
    let qualifies = |c: ConceptId| q.wanted.is_subset(&lattice.concept(c).intent);
    let mut examined = vec![false; lattice.len()];
    let mut queue = VecDeque::from([lattice.bottom()]);
    examined[lattice.bottom()] = true;
    let mut count = 1;
    let mut maximal = Vec::new();
    while let Some(c) = queue.pop_front() {
        if !qualifies(c) {
            continue;
        }
        let mut extended = false;
        for &up in lattice.upper_covers(c) {
            if !examined[up] {
                examined[up] = true;
                count += 1;
                queue.push_back(up);
            }
            if qualifies(up) {
                extended = true;
            }
        }
        if !extended {
            maximal.push(c);
        }
    }
    maximal.sort_unstable();
    Localization {
        concept: maximal.first().copied().unwrap_or(overlay.query_concept),
        examined: count,
    }
}

/// Which concepts contribute candidate objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neighborhood {
    /// The query concept and its super-concepts up to the top.
    #[default]
    SuperConcepts,
    /// Additionally the sub-concepts of the query concept.
    WithSubConcepts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub object: String,
    pub score: f64,
    /// Nearest concept (from the query concept) whose extent holds the object.
    pub provenance: ConceptId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    pub query_concept: ConceptId,
    pub entries: Vec<RankedEntry>,
}

/// Relevance of an object: sum over query attributes of
/// `min(wanted(y), R(object, y))`, which is the shared-attribute count on
/// crisp data.
pub fn relevance(ctx: &LContext, q: &Query, object: usize) -> f64 {
    q.wanted
        .degrees()
        .iter()
        .zip(ctx.row(object))
        .map(|(&w, &r)| w.min(r))
        .sum()
}

pub fn rank_results(
    overlay: &Overlay,
    q: &Query,
    query_concept: ConceptId,
    limit: usize,
    neighborhood: Neighborhood,
) -> RankedResult {
    let lattice = &overlay.lattice;
    let ctx = overlay.context();
    let mut order = vec![query_concept];
    order.extend(lattice.ancestors(query_concept));
    if neighborhood == Neighborhood::WithSubConcepts {
        order.extend(lattice.descendants(query_concept));
    }

    let mut provenance: Vec<Option<ConceptId>> = vec![None; ctx.n_objects()];
    for &c in &order {
        for o in lattice.concept(c).extent.support() {
            provenance[o].get_or_insert(c);
        }
    }

    let mut entries: Vec<RankedEntry> = provenance
        .iter()
        .enumerate()
        .filter(|&(o, p)| o != overlay.query_object && p.is_some())
        .filter_map(|(o, p)| {
            let score = relevance(ctx, q, o);
            (score > 0.0).then(|| RankedEntry {
                object: ctx.objects()[o].clone(),
                score,
                provenance: p.expect("filtered"),
            })
        })
        .collect();
    entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.object.cmp(&b.object)));
    entries.truncate(limit);
    RankedResult {
        query_concept,
        entries,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryOptions {
    pub limit: usize,
    pub neighborhood: Neighborhood,
}

impl Default for QueryOptions {
    fn default() -> Self {
        QueryOptions {
            limit: 10,
            neighborhood: Neighborhood::SuperConcepts,
        }
    }
}

/// Runs all steps: insertion, localization and ranking.
pub fn run_query(base: &ConceptLattice, q: &Query, options: QueryOptions) -> Result<RankedResult> {
    let overlay = insert_query(base, q)?;
    let located = locate_query_concept(&overlay, q);
    Ok(rank_results(
        &overlay,
        q,
        located.concept,
        options.limit,
        options.neighborhood,
    ))
}

impl RankedResult {
    pub fn to_json(&self, q: &Query) -> serde_json::Value {
        serde_json::json!({
            "query": { "label": q.label(), "terms": q.terms() },
            "concept": self.query_concept,
            "results": self.entries,
        })
    }

    /// Plain-text table with scores at 4 decimals.
    pub fn to_table(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|e| e.object.chars().count())
            .max()
            .unwrap_or(0)
            .max("object".len());
        let mut out = String::new();
        let _ = writeln!(out, "query concept: {}", self.query_concept);
        let _ = writeln!(out, "{:>4}  {:<width$}  {:>8}  {:>7}", "rank", "object", "score", "concept");
        for (i, e) in self.entries.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>4}  {:<width$}  {:>8.4}  {:>7}",
                i + 1,
                e.object,
                e.score,
                e.provenance
            );
        }
        if self.entries.is_empty() {
            out.push_str("(no results)\n");
        }
        out
    }
}
