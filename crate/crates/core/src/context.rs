//! Fuzzy formal contexts and their derivation (sufficiency) operators.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::Implication;

/// Which side of a context a fuzzy set ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Universe {
    Objects,
    Attributes,
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Universe::Objects => f.write_str("objects"),
            Universe::Attributes => f.write_str("attributes"),
        }
    }
}

/// A degree-valued set over the objects or attributes of a context, stored
/// densely in universe order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySet {
    universe: Universe,
    degrees: Vec<f64>,
}

impl FuzzySet {
    pub fn new(universe: Universe, degrees: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = degrees.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(Error::DegreeOutOfRange { value: bad });
        }
        Ok(FuzzySet { universe, degrees })
    }

    pub(crate) fn from_raw(universe: Universe, degrees: Vec<f64>) -> Self {
        FuzzySet { universe, degrees }
    }

    pub fn empty(universe: Universe, len: usize) -> Self {
        FuzzySet::from_raw(universe, vec![0.0; len])
    }

    pub fn full(universe: Universe, len: usize) -> Self {
        FuzzySet::from_raw(universe, vec![1.0; len])
    }

    /// Crisp set holding exactly the given indices.
    pub fn crisp(universe: Universe, len: usize, members: &[usize]) -> Self {
        let mut degrees = vec![0.0; len];
        for &m in members {
            degrees[m] = 1.0;
        }
        FuzzySet::from_raw(universe, degrees)
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.iter().all(|&d| d == 0.0)
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn get(&self, i: usize) -> f64 {
        self.degrees.get(i).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, i: usize, degree: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&degree) {
            return Err(Error::DegreeOutOfRange { value: degree });
        }
        self.degrees[i] = degree;
        Ok(())
    }

    /// Pointwise `self <= other`.
    pub fn is_subset(&self, other: &FuzzySet) -> bool {
        self.universe == other.universe
            && self.len() == other.len()
            && self.degrees.iter().zip(&other.degrees).all(|(a, b)| a <= b)
    }

    /// Pointwise max.
    pub fn union(&self, other: &FuzzySet) -> Result<FuzzySet> {
        self.zip_with(other, f64::max)
    }

    /// Pointwise min.
    pub fn intersection(&self, other: &FuzzySet) -> Result<FuzzySet> {
        self.zip_with(other, f64::min)
    }

    fn zip_with(&self, other: &FuzzySet, f: impl Fn(f64, f64) -> f64) -> Result<FuzzySet> {
        if self.universe != other.universe || self.len() != other.len() {
            return Err(Error::Domain(format!(
                "cannot combine a set over {} ({}) with one over {} ({})",
                self.universe,
                self.len(),
                other.universe,
                other.len()
            )));
        }
        Ok(FuzzySet::from_raw(
            self.universe,
            self.degrees
                .iter()
                .zip(&other.degrees)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// Sum of degrees.
    pub fn sigma_count(&self) -> f64 {
        self.degrees.iter().sum()
    }

    /// Indices with a non-zero degree.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.degrees
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0.0)
            .map(|(i, _)| i)
    }

    pub(crate) fn key(&self) -> Vec<u64> {
        self.degrees.iter().map(|d| d.to_bits()).collect()
    }
}

/// A fuzzy formal context: objects x attributes with degrees in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ContextRepr")]
pub struct LContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    degrees: Vec<Vec<f64>>,
    scale: Vec<f64>,
}

#[derive(Deserialize)]
struct ContextRepr {
    objects: Vec<String>,
    attributes: Vec<String>,
    degrees: Vec<Vec<f64>>,
    #[serde(default)]
    scale: Option<Vec<f64>>,
}

impl TryFrom<ContextRepr> for LContext {
    type Error = Error;

    fn try_from(r: ContextRepr) -> Result<Self> {
        match r.scale {
            Some(scale) => LContext::with_scale(r.objects, r.attributes, r.degrees, scale),
            None => LContext::new(r.objects, r.attributes, r.degrees),
        }
    }
}

impl LContext {
    /// Builds a context whose truth scale is the set of occurring degrees
    /// plus 0 and 1.
    pub fn new(objects: Vec<String>, attributes: Vec<String>, degrees: Vec<Vec<f64>>) -> Result<Self> {
        let scale = scale_of(&degrees);
        LContext::with_scale(objects, attributes, degrees, scale)
    }

    pub fn with_scale(
        objects: Vec<String>,
        attributes: Vec<String>,
        degrees: Vec<Vec<f64>>,
        scale: Vec<f64>,
    ) -> Result<Self> {
        check_unique("object", &objects)?;
        check_unique("attribute", &attributes)?;
        if degrees.len() != objects.len() {
            return Err(Error::InvalidContext(format!(
                "{} rows for {} objects",
                degrees.len(),
                objects.len()
            )));
        }
        for (row, label) in degrees.iter().zip(&objects) {
            if row.len() != attributes.len() {
                return Err(Error::InvalidContext(format!(
                    "row {label:?} has {} cells, expected {}",
                    row.len(),
                    attributes.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|d| !(0.0..=1.0).contains(*d)) {
                return Err(Error::DegreeOutOfRange { value: bad });
            }
        }
        if scale.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidContext(
                "truth scale must be strictly ascending".into(),
            ));
        }
        if scale.first() != Some(&0.0) || scale.last() != Some(&1.0) {
            return Err(Error::InvalidContext(
                "truth scale must contain 0 and 1".into(),
            ));
        }
        if let Some(&bad) = scale.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(Error::DegreeOutOfRange { value: bad });
        }
        Ok(LContext {
            objects,
            attributes,
            degrees,
            scale,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.objects.len(), self.attributes.len())
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.degrees
    }

    pub fn row(&self, object: usize) -> &[f64] {
        &self.degrees[object]
    }

    pub fn degree(&self, object: usize, attribute: usize) -> f64 {
        self.degrees[object][attribute]
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn attribute_index(&self, label: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == label)
    }

    /// Row of `object` as a fuzzy set over attributes.
    pub fn object_intent(&self, object: usize) -> FuzzySet {
        FuzzySet::from_raw(Universe::Attributes, self.degrees[object].clone())
    }

    /// Copy of this context with one more object row appended.
    pub fn with_object(&self, label: &str, row: &[f64]) -> Result<LContext> {
        let mut objects = self.objects.clone();
        objects.push(label.to_string());
        let mut degrees = self.degrees.clone();
        degrees.push(row.to_vec());
        // Keeps a custom scale, extended by the new row's degrees.
        let mut scale = self.scale.clone();
        scale.extend(row.iter().copied().filter(|d| (0.0..=1.0).contains(d)));
        scale.sort_by(f64::total_cmp);
        scale.dedup();
        LContext::with_scale(objects, self.attributes.clone(), degrees, scale)
    }

    /// Whether every degree is 0 or 1.
    pub fn is_crisp(&self) -> bool {
        self.degrees.iter().flatten().all(|&d| d == 0.0 || d == 1.0)
    }

    fn check(&self, set: &FuzzySet, universe: Universe) -> Result<()> {
        let expected = match universe {
            Universe::Objects => self.n_objects(),
            Universe::Attributes => self.n_attributes(),
        };
        if set.universe != universe || set.len() != expected {
            return Err(Error::Domain(format!(
                "expected a set over {universe} of size {expected}, got one over {} of size {}",
                set.universe,
                set.len()
            )));
        }
        Ok(())
    }

    /// Attributes shared by the objects of `x`:
    /// `up(x)(y) = inf_o (x(o) -> R(o, y))`.
    pub fn sufficiency_up(&self, x: &FuzzySet, imp: Implication) -> Result<FuzzySet> {
        self.check(x, Universe::Objects)?;
        Ok(FuzzySet::from_raw(
            Universe::Attributes,
            self.up_raw(&x.degrees, imp),
        ))
    }

    /// Objects having the attributes of `y`:
    /// `down(y)(o) = inf_a (y(a) -> R(o, a))`.
    pub fn sufficiency_down(&self, y: &FuzzySet, imp: Implication) -> Result<FuzzySet> {
        self.check(y, Universe::Attributes)?;
        Ok(FuzzySet::from_raw(
            Universe::Objects,
            self.down_raw(&y.degrees, imp),
        ))
    }

    /// Attribute closure `up(down(y))`.
    pub fn closure(&self, y: &FuzzySet, imp: Implication) -> Result<FuzzySet> {
        self.check(y, Universe::Attributes)?;
        Ok(FuzzySet::from_raw(
            Universe::Attributes,
            self.up_raw(&self.down_raw(&y.degrees, imp), imp),
        ))
    }

    /// Object closure `down(up(x))`.
    pub fn extent_closure(&self, x: &FuzzySet, imp: Implication) -> Result<FuzzySet> {
        self.check(x, Universe::Objects)?;
        Ok(FuzzySet::from_raw(
            Universe::Objects,
            self.down_raw(&self.up_raw(&x.degrees, imp), imp),
        ))
    }

    pub(crate) fn up_raw(&self, x: &[f64], imp: Implication) -> Vec<f64> {
        let mut out = vec![1.0; self.n_attributes()];
        for (row, &xo) in self.degrees.iter().zip(x) {
            if xo == 0.0 {
                continue;
            }
            for (acc, &r) in out.iter_mut().zip(row) {
                let v = imp.apply(xo, r);
                if v < *acc {
                    *acc = v;
                }
            }
        }
        out
    }

    pub(crate) fn down_raw(&self, y: &[f64], imp: Implication) -> Vec<f64> {
        self.degrees
            .iter()
            .map(|row| {
                row.iter()
                    .zip(y)
                    .filter(|(_, &ya)| ya > 0.0)
                    .map(|(&r, &ya)| imp.apply(ya, r))
                    .fold(1.0, f64::min)
            })
            .collect()
    }

    /// Parses a CSV table: header row holds the attributes (its first cell is
    /// a corner label), the first column holds the objects.
    pub fn from_csv(text: &str) -> Result<LContext> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| Error::Csv(e.to_string()))?;
        let attributes: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut objects = Vec::new();
        let mut degrees = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Csv(e.to_string()))?;
            let mut cells = record.iter();
            let label = cells
                .next()
                .ok_or_else(|| Error::Csv("empty record".into()))?;
            objects.push(label.to_string());
            let row = cells
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|e| Error::Csv(format!("cell {c:?} in row {label:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            degrees.push(row);
        }
        LContext::new(objects, attributes, degrees)
    }

    /// CSV with degrees printed at a fixed number of decimals.
    pub fn to_csv(&self, corner: &str, decimals: usize) -> String {
        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        let mut header = vec![corner.to_string()];
        header.extend(self.attributes.iter().cloned());
        writer.write_record(&header).expect("writing to memory");
        for (label, row) in self.objects.iter().zip(&self.degrees) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|d| format!("{d:.decimals$}")));
            writer.write_record(&rec).expect("writing to memory");
        }
        String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8 output")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<LContext> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Distinct degrees occurring in `degrees`, plus 0 and 1, ascending.
pub fn scale_of(degrees: &[Vec<f64>]) -> Vec<f64> {
    let mut values: Vec<f64> = degrees.iter().flatten().copied().collect();
    values.push(0.0);
    values.push(1.0);
    values.retain(|v| (0.0..=1.0).contains(v));
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

fn check_unique(what: &str, labels: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidContext(format!("duplicate {what} label {l:?}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn ctx(rows: Vec<Vec<f64>>) -> LContext {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        LContext::new(labels("x", n), labels("y", m), rows).unwrap()
    }

    #[test]
    fn up_on_two_by_two() {
        let c = ctx(vec![vec![1.0, 0.5], vec![0.5, 1.0]]);
        let x = FuzzySet::new(Universe::Objects, vec![1.0, 0.0]).unwrap();
        let up = c.sufficiency_up(&x, Implication::Godel).unwrap();
        assert_eq!(up.degrees(), &[1.0, 0.5]);
    }

    #[test]
    fn vacuous_infimum() {
        let c = ctx(vec![vec![0.2, 0.0], vec![0.5, 0.7]]);
        for imp in Implication::ALL {
            let up = c.sufficiency_up(&FuzzySet::empty(Universe::Objects, 2), imp).unwrap();
            assert_eq!(up.degrees(), &[1.0, 1.0]);
            let down = c
                .sufficiency_down(&FuzzySet::empty(Universe::Attributes, 2), imp)
                .unwrap();
            assert_eq!(down.degrees(), &[1.0, 1.0]);
        }
    }

    #[test]
    fn all_ones_intent_gives_row_minimum() {
        let c = ctx(vec![vec![0.17, 0.47, 0.47], vec![0.0, 0.0, 0.47]]);
        let down = c
            .sufficiency_down(&FuzzySet::full(Universe::Attributes, 3), Implication::Godel)
            .unwrap();
        assert_eq!(down.degrees(), &[0.17, 0.0]);
    }

    #[test]
    fn identity_context_closure() {
        let c = ctx(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let y = FuzzySet::crisp(Universe::Attributes, 3, &[0]);
        assert_eq!(c.closure(&y, Implication::Godel).unwrap(), y);
    }

    #[test]
    fn universe_mismatch_is_a_domain_error() {
        let c = ctx(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let y = FuzzySet::full(Universe::Attributes, 2);
        assert!(matches!(
            c.sufficiency_up(&y, Implication::Godel),
            Err(Error::Domain(_))
        ));
        let short = FuzzySet::full(Universe::Objects, 3);
        assert!(matches!(
            c.sufficiency_up(&short, Implication::Godel),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn invalid_contexts() {
        assert!(matches!(
            LContext::new(labels("x", 1), labels("y", 1), vec![vec![1.5]]),
            Err(Error::DegreeOutOfRange { .. })
        ));
        assert!(matches!(
            LContext::new(vec!["a".into(), "a".into()], labels("y", 1), vec![vec![1.0], vec![0.0]]),
            Err(Error::InvalidContext(_))
        ));
        assert!(matches!(
            LContext::with_scale(labels("x", 1), labels("y", 1), vec![vec![0.5]], vec![0.0, 0.5]),
            Err(Error::InvalidContext(_))
        ));
    }

    #[test]
    fn scale_contains_extremes() {
        let c = ctx(vec![vec![0.47, 0.17], vec![0.47, 0.0]]);
        assert_eq!(c.scale(), &[0.0, 0.17, 0.47, 1.0]);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let text = "R,E1,E2\n<level>,0.17,0\n<title>,0,0.47\n";
        let c = LContext::from_csv(text).unwrap();
        assert_eq!(c.objects(), ["<level>", "<title>"]);
        assert_eq!(c.degree(1, 1), 0.47);
        let csv = c.to_csv("R", 2);
        assert_eq!(csv, "R,E1,E2\n<level>,0.17,0.00\n<title>,0.00,0.47\n");
        let back = LContext::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_without_scale_recomputes_it() {
        let c = LContext::from_json(r#"{"objects":["a"],"attributes":["b"],"degrees":[[0.5]]}"#)
            .unwrap();
        assert_eq!(c.scale(), &[0.0, 0.5, 1.0]);
        assert!(LContext::from_json(r#"{"objects":["a"],"attributes":["b"],"degrees":[[2.0]]}"#)
            .is_err());
    }

    #[test]
    fn with_object_appends_a_row() {
        let c = ctx(vec![vec![1.0, 0.0]]);
        let e = c.with_object("q", &[0.5, 1.0]).unwrap();
        assert_eq!(e.shape(), (2, 2));
        assert_eq!(e.scale(), &[0.0, 0.5, 1.0]);
        assert_eq!(c.shape(), (1, 2));
    }
}
