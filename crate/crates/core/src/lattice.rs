//! Fuzzy concept lattices: enumeration, order, meet/join and nesting.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::context::{FuzzySet, LContext, Universe};
use crate::error::{Error, Result};
use crate::fuzzy::Implication;
use crate::xml::NodeId;

pub type ConceptId = usize;

/// Identifies the context/implication pair a lattice was built from, so that
/// concepts from different lattices are never compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeKey(u64);

impl LatticeKey {
    fn of(ctx: &LContext, imp: Implication) -> Self {
        let mut h = Sha256::new();
        h.update(imp.name().as_bytes());
        for label in ctx.objects().iter().chain(ctx.attributes()) {
            h.update((label.len() as u64).to_le_bytes());
            h.update(label.as_bytes());
        }
        for d in ctx.rows().iter().flatten() {
            h.update(d.to_bits().to_le_bytes());
        }
        let digest = h.finalize();
        LatticeKey(u64::from_le_bytes(digest[..8].try_into().expect("8 bytes")))
    }
}

/// A closed (extent, intent) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyConcept {
    pub id: ConceptId,
    pub extent: FuzzySet,
    pub intent: FuzzySet,
    lattice: LatticeKey,
}

impl FuzzyConcept {
    pub fn lattice(&self) -> LatticeKey {
        self.lattice
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConceptOrder {
    Less,
    Greater,
    Equal,
    Incomparable,
}

#[derive(Debug, Clone)]
pub struct ConceptLattice {
    context: LContext,
    implication: Implication,
    key: LatticeKey,
    concepts: Vec<FuzzyConcept>,
    covers: Vec<(ConceptId, ConceptId)>,
    upper: Vec<Vec<ConceptId>>,
    lower: Vec<Vec<ConceptId>>,
    by_intent: HashMap<Vec<u64>, ConceptId>,
    top: ConceptId,
    bottom: ConceptId,
    origin: Option<NodeId>,
    seq: Option<usize>,
}

/// Enumerates every concept whose intent is the closure of a scale-valued
/// attribute set.
///
/// Generation is breadth-first from the closure of the empty set: each closed
/// intent is raised in one attribute to one higher scale degree and closed
/// again. Ids follow generation order, which is deterministic.
pub fn enumerate_concepts(ctx: &LContext, imp: Implication) -> Result<ConceptLattice> {
    let m = ctx.n_attributes();
    let scale = ctx.scale();
    let close = |y: &[f64]| ctx.up_raw(&ctx.down_raw(y, imp), imp);

    let mut intents: Vec<Vec<f64>> = Vec::new();
    let mut index: HashMap<Vec<u64>, ConceptId> = HashMap::new();
    let mut queue = VecDeque::new();

    let start = close(&vec![0.0; m]);
    index.insert(bits(&start), 0);
    intents.push(start);
    queue.push_back(0);

    while let Some(current) = queue.pop_front() {
        for a in 0..m {
            let base = intents[current][a];
            let mut reached = base;
            for &d in scale.iter().filter(|&&d| d > base) {
                if d <= reached {
                    // Already covered by the closure of a smaller raise.
                    continue;
                }
                let mut y = intents[current].clone();
                y[a] = d;
                let closed = close(&y);
                reached = closed[a];
                let key = bits(&closed);
                if let Entry::Vacant(slot) = index.entry(key) {
                    let id = intents.len();
                    slot.insert(id);
                    intents.push(closed);
                    queue.push_back(id);
                }
            }
        }
    }

    let key = LatticeKey::of(ctx, imp);
    let concepts: Vec<FuzzyConcept> = intents
        .into_iter()
        .enumerate()
        .map(|(id, intent)| FuzzyConcept {
            id,
            extent: FuzzySet::from_raw(Universe::Objects, ctx.down_raw(&intent, imp)),
            intent: FuzzySet::from_raw(Universe::Attributes, intent),
            lattice: key,
        })
        .collect();
    ConceptLattice::assemble(ctx.clone(), imp, concepts)
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|d| d.to_bits()).collect()
}

impl ConceptLattice {
    fn assemble(
        context: LContext,
        implication: Implication,
        concepts: Vec<FuzzyConcept>,
    ) -> Result<Self> {
        let key = LatticeKey::of(&context, implication);
        let by_intent: HashMap<Vec<u64>, ConceptId> =
            concepts.iter().map(|c| (c.intent.key(), c.id)).collect();
        if by_intent.len() != concepts.len() {
            return Err(Error::Domain("duplicate intents in concept set".into()));
        }
        let top_intent = context.up_raw(&vec![1.0; context.n_objects()], implication);
        let bottom_intent = context.up_raw(
            &context.down_raw(&vec![1.0; context.n_attributes()], implication),
            implication,
        );
        let top = *by_intent
            .get(&bits(&top_intent))
            .ok_or_else(|| Error::Domain("top concept missing".into()))?;
        let bottom = *by_intent
            .get(&bits(&bottom_intent))
            .ok_or_else(|| Error::Domain("bottom concept missing".into()))?;
        let (covers, upper, lower) = cover_relation(&concepts);
        Ok(ConceptLattice {
            context,
            implication,
            key,
            concepts,
            covers,
            upper,
            lower,
            by_intent,
            top,
            bottom,
            origin: None,
            seq: None,
        })
    }

    pub fn context(&self) -> &LContext {
        &self.context
    }

    pub fn implication(&self) -> Implication {
        self.implication
    }

    pub fn key(&self) -> LatticeKey {
        self.key
    }

    pub fn concepts(&self) -> &[FuzzyConcept] {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concept(&self, id: ConceptId) -> &FuzzyConcept {
        &self.concepts[id]
    }

    pub fn get(&self, id: ConceptId) -> Option<&FuzzyConcept> {
        self.concepts.get(id)
    }

    /// Covering pairs `(sub, super)`, sorted.
    pub fn covers(&self) -> &[(ConceptId, ConceptId)] {
        &self.covers
    }

    /// Upper covers (direct super-concepts) of `id`, ascending.
    pub fn upper_covers(&self, id: ConceptId) -> &[ConceptId] {
        &self.upper[id]
    }

    /// Lower covers (direct sub-concepts) of `id`, ascending.
    pub fn lower_covers(&self, id: ConceptId) -> &[ConceptId] {
        &self.lower[id]
    }

    pub fn top(&self) -> ConceptId {
        self.top
    }

    pub fn bottom(&self) -> ConceptId {
        self.bottom
    }

    pub fn origin(&self) -> Option<NodeId> {
        self.origin
    }

    pub fn seq(&self) -> Option<usize> {
        self.seq
    }

    pub fn with_provenance(mut self, origin: Option<NodeId>, seq: Option<usize>) -> Self {
        self.origin = origin;
        self.seq = seq;
        self
    }

    /// Concept whose intent equals `intent` exactly.
    pub fn find_by_intent(&self, intent: &FuzzySet) -> Option<ConceptId> {
        self.by_intent.get(&intent.key()).copied()
    }

    fn check_member(&self, c: &FuzzyConcept) -> Result<()> {
        if c.lattice != self.key || self.concepts.get(c.id) != Some(c) {
            return Err(Error::Domain(format!(
                "concept {} does not belong to this lattice",
                c.id
            )));
        }
        Ok(())
    }

    pub fn compare(&self, a: &FuzzyConcept, b: &FuzzyConcept) -> Result<ConceptOrder> {
        self.check_member(a)?;
        self.check_member(b)?;
        Ok(order_of(&a.extent, &b.extent))
    }

    pub fn compare_ids(&self, a: ConceptId, b: ConceptId) -> ConceptOrder {
        order_of(&self.concepts[a].extent, &self.concepts[b].extent)
    }

    /// `a <= b`.
    pub fn leq(&self, a: ConceptId, b: ConceptId) -> bool {
        self.concepts[a].extent.is_subset(&self.concepts[b].extent)
    }

    /// Greatest lower bound: the concept whose intent closes the union of
    /// both intents.
    ///
    /// Fails with `Domain` when that closure was never enumerated, which can
    /// only happen for Lukasiewicz or Goguen over a scale not closed under the
    /// residuum (see [`Implication::close_scale`]).
    pub fn meet(&self, a: &FuzzyConcept, b: &FuzzyConcept) -> Result<&FuzzyConcept> {
        self.check_member(a)?;
        self.check_member(b)?;
        let y = a.intent.union(&b.intent)?;
        let closed = self.context.closure(&y, self.implication)?;
        self.lookup(&closed)
    }

    /// Least upper bound: the concept whose extent closes the union of both
    /// extents.
    pub fn join(&self, a: &FuzzyConcept, b: &FuzzyConcept) -> Result<&FuzzyConcept> {
        self.check_member(a)?;
        self.check_member(b)?;
        let x = a.extent.union(&b.extent)?;
        let intent = self.context.sufficiency_up(&x, self.implication)?;
        self.lookup(&intent)
    }

    fn lookup(&self, intent: &FuzzySet) -> Result<&FuzzyConcept> {
        self.find_by_intent(intent)
            .map(|id| &self.concepts[id])
            .ok_or_else(|| Error::Domain("closure is not an enumerated concept".into()))
    }

    /// All strict super-concepts of `id` in breadth-first order from `id`
    /// (nearest first, ties by id).
    pub fn ancestors(&self, id: ConceptId) -> Vec<ConceptId> {
        self.walk(id, |c| &self.upper[c])
    }

    /// All strict sub-concepts of `id`, nearest first.
    pub fn descendants(&self, id: ConceptId) -> Vec<ConceptId> {
        self.walk(id, |c| &self.lower[c])
    }

    fn walk<'s>(&'s self, id: ConceptId, next: impl Fn(ConceptId) -> &'s [ConceptId]) -> Vec<ConceptId> {
        let mut seen = vec![false; self.concepts.len()];
        seen[id] = true;
        let mut out = Vec::new();
        let mut queue = VecDeque::from([id]);
        while let Some(c) = queue.pop_front() {
            for &n in next(c) {
                if !seen[n] {
                    seen[n] = true;
                    out.push(n);
                    queue.push_back(n);
                }
            }
        }
        out
    }

    pub fn to_record(&self) -> LatticeRecord {
        LatticeRecord {
            implication: self.implication,
            origin: self.origin,
            seq: self.seq,
            top: self.top,
            bottom: self.bottom,
            concepts: self
                .concepts
                .iter()
                .map(|c| ConceptRecord {
                    id: c.id,
                    extent: c.extent.degrees().to_vec(),
                    intent: c.intent.degrees().to_vec(),
                })
                .collect(),
            covers: self.covers.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// Rebuilds a lattice from its stored form, checking that every concept
    /// is closed in `context` and that the stored order is the cover relation.
    pub fn from_record(context: LContext, record: &LatticeRecord) -> Result<Self> {
        let imp = record.implication;
        let key = LatticeKey::of(&context, imp);
        let mut concepts = Vec::with_capacity(record.concepts.len());
        for (i, c) in record.concepts.iter().enumerate() {
            if c.id != i {
                return Err(Error::Domain(format!("concept id {} out of order", c.id)));
            }
            let extent = FuzzySet::new(Universe::Objects, c.extent.clone())?;
            let intent = FuzzySet::new(Universe::Attributes, c.intent.clone())?;
            if extent.len() != context.n_objects() || intent.len() != context.n_attributes() {
                return Err(Error::Domain(format!("concept {i} has the wrong shape")));
            }
            if context.sufficiency_up(&extent, imp)? != intent
                || context.sufficiency_down(&intent, imp)? != extent
            {
                return Err(Error::Domain(format!("concept {i} is not closed")));
            }
            concepts.push(FuzzyConcept {
                id: i,
                extent,
                intent,
                lattice: key,
            });
        }
        let lattice = ConceptLattice::assemble(context, imp, concepts)?;
        let stored: Vec<(ConceptId, ConceptId)> =
            record.covers.iter().map(|&[a, b]| (a, b)).collect();
        if stored != lattice.covers || record.top != lattice.top || record.bottom != lattice.bottom {
            return Err(Error::Domain("stored order does not match the concepts".into()));
        }
        Ok(lattice.with_provenance(record.origin, record.seq))
    }
}

fn order_of(a: &FuzzySet, b: &FuzzySet) -> ConceptOrder {
    match (a.is_subset(b), b.is_subset(a)) {
        (true, true) => ConceptOrder::Equal,
        (true, false) => ConceptOrder::Less,
        (false, true) => ConceptOrder::Greater,
        (false, false) => ConceptOrder::Incomparable,
    }
}

type Covers = (
    Vec<(ConceptId, ConceptId)>,
    Vec<Vec<ConceptId>>,
    Vec<Vec<ConceptId>>,
);

/// Transitive reduction of extent inclusion. For each concept the strict
/// super-concepts are scanned by increasing extent size; one is a cover
/// exactly when no already accepted cover lies below it.
fn cover_relation(concepts: &[FuzzyConcept]) -> Covers {
    let n = concepts.len();
    let sizes: Vec<f64> = concepts.iter().map(|c| c.extent.sigma_count()).collect();
    let mut upper = vec![Vec::new(); n];
    let mut lower = vec![Vec::new(); n];
    let mut covers = Vec::new();
    for a in 0..n {
        let mut ups: Vec<ConceptId> = (0..n)
            .filter(|&b| b != a && concepts[a].extent.is_subset(&concepts[b].extent))
            .collect();
        ups.sort_by(|&x, &y| sizes[x].total_cmp(&sizes[y]).then(x.cmp(&y)));
        let mut accepted: Vec<ConceptId> = Vec::new();
        for b in ups {
            if accepted
                .iter()
                .all(|&c| !concepts[c].extent.is_subset(&concepts[b].extent))
            {
                accepted.push(b);
            }
        }
        accepted.sort_unstable();
        for &b in &accepted {
            covers.push((a, b));
            lower[b].push(a);
        }
        upper[a] = accepted;
    }
    for l in &mut lower {
        l.sort_unstable();
    }
    covers.sort_unstable();
    (covers, upper, lower)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptRecord {
    pub id: ConceptId,
    pub extent: Vec<f64>,
    pub intent: Vec<f64>,
}

/// Serialized lattice; the context is stored alongside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub implication: Implication,
    pub origin: Option<NodeId>,
    pub seq: Option<usize>,
    pub top: ConceptId,
    pub bottom: ConceptId,
    pub concepts: Vec<ConceptRecord>,
    pub covers: Vec<[ConceptId; 2]>,
}

/// One context taking part in a nesting.
#[derive(Debug, Clone)]
pub struct NestMember<'a> {
    pub name: String,
    pub origin: Option<NodeId>,
    pub context: &'a LContext,
}

/// Which columns of the combined context came from which member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberSpan {
    pub name: String,
    pub origin: Option<NodeId>,
    pub start: usize,
    pub end: usize,
}

impl MemberSpan {
    pub fn columns(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// Several per-node contexts over the same objects combined into one.
#[derive(Debug, Clone)]
pub struct NestedLattice {
    pub combined: LContext,
    pub lattice: ConceptLattice,
    pub members: Vec<MemberSpan>,
}

impl NestedLattice {
    /// Member that contributed attribute column `attribute`.
    pub fn member_of(&self, attribute: usize) -> Option<&MemberSpan> {
        self.members.iter().find(|m| m.columns().contains(&attribute))
    }
}

/// Concatenates member contexts column-wise. Attribute labels that occur in
/// more than one member are prefixed with `<member name>/`.
pub fn concat_contexts(members: &[NestMember<'_>]) -> Result<(LContext, Vec<MemberSpan>)> {
    let first = members
        .first()
        .ok_or_else(|| Error::IncompatibleContexts("no contexts to nest".into()))?;
    let objects = first.context.objects().to_vec();
    for m in &members[1..] {
        if m.context.objects() != objects.as_slice() {
            return Err(Error::IncompatibleContexts(format!(
                "{} has objects {:?}, expected {:?}",
                m.name,
                m.context.objects(),
                objects
            )));
        }
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for m in members {
        for a in m.context.attributes() {
            *counts.entry(a.as_str()).or_insert(0) += 1;
        }
    }
    let mut attributes = Vec::new();
    let mut spans = Vec::new();
    let mut rows = vec![Vec::new(); objects.len()];
    for m in members {
        let start = attributes.len();
        for a in m.context.attributes() {
            if counts[a.as_str()] > 1 {
                attributes.push(format!("{}/{}", m.name, a));
            } else {
                attributes.push(a.clone());
            }
        }
        for (row, src) in rows.iter_mut().zip(m.context.rows()) {
            row.extend_from_slice(src);
        }
        spans.push(MemberSpan {
            name: m.name.clone(),
            origin: m.origin,
            start,
            end: attributes.len(),
        });
    }
    let combined = LContext::new(objects, attributes, rows)?;
    Ok((combined, spans))
}

/// Combines member contexts and enumerates the lattice of the result.
pub fn nest(members: &[NestMember<'_>], imp: Implication) -> Result<NestedLattice> {
    let (combined, members) = concat_contexts(members)?;
    let lattice = enumerate_concepts(&combined, imp)?;
    Ok(NestedLattice {
        combined,
        lattice,
        members,
    })
}

/// Nests already built lattices, named by their sequence number.
pub fn nest_lattices(lattices: &[&ConceptLattice]) -> Result<NestedLattice> {
    let imp = lattices
        .first()
        .map(|l| l.implication())
        .ok_or_else(|| Error::IncompatibleContexts("no lattices to nest".into()))?;
    if lattices.iter().any(|l| l.implication() != imp) {
        return Err(Error::IncompatibleContexts(
            "lattices use different implications".into(),
        ));
    }
    let members: Vec<NestMember<'_>> = lattices
        .iter()
        .enumerate()
        .map(|(i, l)| NestMember {
            name: l.seq().map_or_else(|| format!("#{}", i + 1), |s| format!("#{s}")),
            origin: l.origin(),
            context: l.context(),
        })
        .collect();
    nest(&members, imp)
}
