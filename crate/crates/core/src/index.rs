//! Index configuration and the persisted index bundle.
//!
//! A bundle holds, for one document, every per-node context with its lattice
//! and the nested lattice over them. It is written as JSON with floats in
//! shortest round-trip form, so building twice from the same input yields the
//! same bytes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::context::LContext;
use crate::contextualize::{ContextBuilder, Lexicon, NodeContext};
use crate::error::{Error, Result};
use crate::fuzzy::{Implication, SNorm};
use crate::lattice::{enumerate_concepts, nest, ConceptLattice, LatticeRecord, MemberSpan, NestMember, NestedLattice};
use crate::weighting::{load_stopwords, Analyzer, DocStats, Population, TermMode, Weigher, WeightingConfig};
use crate::xml::{extract_levels, DocumentTree, NodeId};

pub const BUNDLE_FORMAT: &str = "fqx-index";
pub const BUNDLE_VERSION: u32 = 1;

/// Settings as written in a TOML or JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexConfig {
    pub log_base: f64,
    pub s_norm: SNorm,
    pub clamp: bool,
    pub term_mode: TermMode,
    pub population: Population,
    pub stem: bool,
    /// Stopword file, relative to the config file.
    pub stopwords: Option<PathBuf>,
    pub implication: Implication,
    /// Seq numbers of the contexts to nest; empty nests all of them.
    pub nest: Vec<usize>,
}

impl Default for IndexConfig {
    fn default() -> Self {
        let w = WeightingConfig::default();
        IndexConfig {
            log_base: w.log_base,
            s_norm: w.s_norm,
            clamp: w.clamp,
            term_mode: w.term_mode,
            population: w.population,
            stem: w.stem,
            stopwords: None,
            implication: Implication::default(),
            nest: Vec::new(),
        }
    }
}

impl IndexConfig {
    /// Reads `.json` files as JSON and anything else as TOML.
    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut config: IndexConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        if let (Some(sw), Some(dir)) = (&config.stopwords, path.parent()) {
            if sw.is_relative() {
                config.stopwords = Some(dir.join(sw));
            }
        }
        Ok(config)
    }

    /// Loads referenced files and returns the self-contained settings.
    pub fn resolve(&self) -> Result<IndexSettings> {
        let stopwords = match &self.stopwords {
            Some(p) => load_stopwords(p)?,
            None => Vec::new(),
        };
        let settings = IndexSettings {
            weighting: WeightingConfig {
                log_base: self.log_base,
                s_norm: self.s_norm,
                clamp: self.clamp,
                term_mode: self.term_mode,
                population: self.population,
                stem: self.stem,
                stopwords,
            },
            implication: self.implication,
            nest: self.nest.clone(),
        };
        settings.weighting.validate()?;
        Ok(settings)
    }
}

/// Every setting that influences a bundle; stored in the bundle itself.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSettings {
    pub weighting: WeightingConfig,
    pub implication: Implication,
    pub nest: Vec<usize>,
}

/// One per-node context and its lattice.
#[derive(Debug, Clone)]
pub struct IndexEntry {
    pub origin: NodeId,
    pub path: String,
    pub seq: usize,
    pub lattice: ConceptLattice,
}

impl IndexEntry {
    pub fn context(&self) -> &LContext {
        self.lattice.context()
    }
}

#[derive(Debug, Clone)]
pub struct IndexBundle {
    pub digest: String,
    /// Node count of the parsed document tree.
    pub nodes: usize,
    pub settings: IndexSettings,
    pub lexicon: Lexicon,
    pub objects: Vec<String>,
    pub entries: Vec<IndexEntry>,
    pub nested: NestedLattice,
}

/// Hex SHA-256 of the document bytes.
pub fn digest_of(source: &[u8]) -> String {
    hex::encode(Sha256::digest(source))
}

impl IndexBundle {
    pub fn build(source: &[u8], settings: &IndexSettings) -> Result<Self> {
        settings.weighting.validate()?;
        let tree = DocumentTree::parse(source)?;
        let levels = extract_levels(&tree);
        let cfg = &settings.weighting;
        let stats = DocStats::build(&tree, &Analyzer::new(cfg), cfg.population);
        let weigher = Weigher::new(&tree, &stats, cfg);
        let builder = ContextBuilder::new(&weigher, &levels);
        let contexts = builder.build_all()?;
        log::info!(
            "{} nodes, {} terms, {} contexts",
            tree.len(),
            stats.vocabulary().len(),
            contexts.len()
        );

        let mut entries = Vec::with_capacity(contexts.len());
        for NodeContext { origin, path, seq, context } in contexts {
            let lattice = enumerate_concepts(&context, settings.implication)?
                .with_provenance(Some(origin), Some(seq));
            log::debug!("{path} (seq {seq}): {} concepts", lattice.len());
            entries.push(IndexEntry { origin, path, seq, lattice });
        }

        let chosen: Vec<&IndexEntry> = if settings.nest.is_empty() {
            entries.iter().collect()
        } else {
            settings
                .nest
                .iter()
                .map(|&s| {
                    entries
                        .iter()
                        .find(|e| e.seq == s)
                        .ok_or_else(|| Error::Config(format!("nest names unknown seq {s}")))
                })
                .collect::<Result<_>>()?
        };
        let members: Vec<NestMember<'_>> = chosen
            .iter()
            .map(|e| NestMember {
                name: e.path.clone(),
                origin: Some(e.origin),
                context: e.context(),
            })
            .collect();
        let nested = nest(&members, settings.implication)?;
        log::info!(
            "nested lattice: {} x {} context, {} concepts",
            nested.combined.n_objects(),
            nested.combined.n_attributes(),
            nested.lattice.len()
        );

        Ok(IndexBundle {
            digest: digest_of(source),
            nodes: tree.len(),
            settings: settings.clone(),
            lexicon: builder.lexicon().clone(),
            objects: builder.objects().to_vec(),
            entries,
            nested,
        })
    }

    pub fn build_from_path<P: AsRef<Path>>(path: P, settings: &IndexSettings) -> Result<Self> {
        let source = std::fs::read(path)?;
        Self::build(&source, settings)
    }

    pub fn entry_by_seq(&self, seq: usize) -> Option<&IndexEntry> {
        self.entries.iter().find(|e| e.seq == seq)
    }

    pub fn entry_by_origin(&self, origin: NodeId) -> Option<&IndexEntry> {
        self.entries.iter().find(|e| e.origin == origin)
    }

    pub fn entry_by_path(&self, path: &str) -> Option<&IndexEntry> {
        self.entries.iter().find(|e| e.path == path)
    }

    /// Resolves `nested`, a seq number, `seq:N`, `origin:N` or a node path.
    pub fn select(&self, selector: &str) -> Result<Selection<'_>> {
        let s = selector.trim();
        let bad = || Error::BadSelector(selector.to_string());
        if s == "nested" {
            return Ok(Selection::Nested(&self.nested));
        }
        let entry = if let Some(n) = s.strip_prefix("origin:") {
            self.entry_by_origin(n.parse().map_err(|_| bad())?)
        } else if let Some(n) = s.strip_prefix("seq:") {
            self.entry_by_seq(n.parse().map_err(|_| bad())?)
        } else if s.starts_with('/') {
            self.entry_by_path(s)
        } else {
            self.entry_by_seq(s.parse().map_err(|_| bad())?)
        };
        entry.map(Selection::Entry).ok_or_else(bad)
    }

    pub fn to_json(&self) -> Result<String> {
        let repr = BundleRepr {
            format: BUNDLE_FORMAT.to_string(),
            version: BUNDLE_VERSION,
            digest: self.digest.clone(),
            nodes: self.nodes,
            config: self.settings.clone(),
            lexicon: self.lexicon.clone(),
            objects: self.objects.clone(),
            entries: self
                .entries
                .iter()
                .map(|e| EntryRepr {
                    origin: e.origin,
                    path: e.path.clone(),
                    seq: e.seq,
                    context: e.context().clone(),
                    lattice: e.lattice.to_record(),
                })
                .collect(),
            nested: NestedRepr {
                members: self.nested.members.clone(),
                context: self.nested.combined.clone(),
                lattice: self.nested.lattice.to_record(),
            },
        };
        let mut text = serde_json::to_string_pretty(&repr)?;
        text.push('\n');
        Ok(text)
    }

    /// Parses a bundle, checking its version before anything else and
    /// re-validating every stored lattice against its context.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::CorruptIndex(e.to_string()))?;
        if value.get("format").and_then(|f| f.as_str()) != Some(BUNDLE_FORMAT) {
            return Err(Error::CorruptIndex("not an fqx index bundle".into()));
        }
        match value.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(BUNDLE_VERSION) => {}
            Some(v) => {
                return Err(Error::UnsupportedVersion {
                    found: u32::try_from(v).unwrap_or(u32::MAX),
                    expected: BUNDLE_VERSION,
                })
            }
            None => return Err(Error::CorruptIndex("missing version field".into())),
        }
        let repr: BundleRepr =
            serde_json::from_value(value).map_err(|e| Error::CorruptIndex(e.to_string()))?;
        let corrupt = |e: Error| Error::CorruptIndex(e.to_string());
        let entries = repr
            .entries
            .into_iter()
            .map(|e| {
                let lattice = ConceptLattice::from_record(e.context, &e.lattice).map_err(corrupt)?;
                Ok(IndexEntry {
                    origin: e.origin,
                    path: e.path,
                    seq: e.seq,
                    lattice,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let lattice = ConceptLattice::from_record(repr.nested.context.clone(), &repr.nested.lattice)
            .map_err(corrupt)?;
        let end = repr.nested.members.last().map_or(0, |m| m.end);
        if end != repr.nested.context.n_attributes() {
            return Err(Error::CorruptIndex("member spans do not cover the nested context".into()));
        }
        Ok(IndexBundle {
            digest: repr.digest,
            nodes: repr.nodes,
            settings: repr.config,
            lexicon: repr.lexicon,
            objects: repr.objects,
            entries,
            nested: NestedLattice {
                combined: repr.nested.context,
                lattice,
                members: repr.nested.members,
            },
        })
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// A lattice picked out of a bundle by selector.
#[derive(Debug, Clone, Copy)]
pub enum Selection<'a> {
    Entry(&'a IndexEntry),
    Nested(&'a NestedLattice),
}

impl<'a> Selection<'a> {
    pub fn lattice(&self) -> &'a ConceptLattice {
        match self {
            Selection::Entry(e) => &e.lattice,
            Selection::Nested(n) => &n.lattice,
        }
    }

    pub fn context(&self) -> &'a LContext {
        self.lattice().context()
    }

    /// Column provenance; only nested lattices have members.
    pub fn members(&self) -> &'a [MemberSpan] {
        match self {
            Selection::Entry(_) => &[],
            Selection::Nested(n) => &n.members,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleRepr {
    format: String,
    version: u32,
    digest: String,
    nodes: usize,
    config: IndexSettings,
    lexicon: Lexicon,
    objects: Vec<String>,
    entries: Vec<EntryRepr>,
    nested: NestedRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryRepr {
    origin: NodeId,
    path: String,
    seq: usize,
    context: LContext,
    lattice: LatticeRecord,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NestedRepr {
    members: Vec<MemberSpan>,
    context: LContext,
    lattice: LatticeRecord,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let b = IndexBundle::build(b"<a>x</a>", &IndexSettings::default()).unwrap();
        assert_eq!(b.entries.len(), 1);
        assert_eq!(b.entries[0].context().shape(), (1, 1));
        assert_eq!(b.nested.combined.shape(), (1, 1));
    }

    #[test]
    fn json_round_trip_is_stable() {
        let xml = b"<r><s><a>p</a><b>q</b></s><s><a>q</a></s></r>";
        let b = IndexBundle::build(xml, &IndexSettings::default()).unwrap();
        let text = b.to_json().unwrap();
        let back = IndexBundle::from_json(&text).unwrap();
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn rejects_other_versions() {
        let b = IndexBundle::build(b"<a>x</a>", &IndexSettings::default()).unwrap();
        let text = b.to_json().unwrap().replace("\"version\": 1", "\"version\": 99");
        assert!(matches!(
            IndexBundle::from_json(&text),
            Err(Error::UnsupportedVersion { .. })
        ));
    }

    #[test]
    fn tampered_lattice_is_corrupt() {
        let b = IndexBundle::build(b"<r><s><a>p</a></s><s><a>q</a></s></r>", &IndexSettings::default()).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&b.to_json().unwrap()).unwrap();
        value["nested"]["lattice"]["concepts"][0]["intent"][0] = serde_json::json!(0.5);
        let text = serde_json::to_string(&value).unwrap();
        assert!(matches!(IndexBundle::from_json(&text), Err(Error::CorruptIndex(_))));
    }

    #[test]
    fn selectors() {
        let b = IndexBundle::build(b"<r><s><a>p</a></s><s><a>q</a></s></r>", &IndexSettings::default()).unwrap();
        assert!(matches!(b.select("nested"), Ok(Selection::Nested(_))));
        assert_eq!(b.select("1").unwrap().lattice().seq(), Some(1));
        assert_eq!(b.select("seq:3").unwrap().lattice().seq(), Some(3));
        assert_eq!(b.select("/r").unwrap().lattice().seq(), Some(3));
        let origin = b.entries[0].origin;
        assert_eq!(b.select(&format!("origin:{origin}")).unwrap().lattice().seq(), Some(1));
        assert!(matches!(b.select("9"), Err(Error::BadSelector(_))));
        assert!(matches!(b.select("x"), Err(Error::BadSelector(_))));
    }
}
