//! Oracles shared by the integration tests. Nothing here calls the crate's
//! derivation operators or enumeration; they are re-derived from the
//! definitions so the tests compare two independent computations.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use fqx::{ConceptLattice, Implication, IndexBundle, IndexSettings, LContext};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// A reference table fixture, with `<level>`-style row labels reduced to `level`.
pub fn reference_table(n: usize) -> LContext {
    let text = std::fs::read_to_string(fixture(&format!("table{n}.csv"))).unwrap();
    let raw = LContext::from_csv(&text).unwrap();
    let objects = raw
        .objects()
        .iter()
        .map(|o| o.trim_start_matches('<').trim_end_matches('>').to_string())
        .collect();
    LContext::new(objects, raw.attributes().to_vec(), raw.rows().to_vec()).unwrap()
}

pub fn bib_bundle() -> IndexBundle {
    IndexBundle::build_from_path(fixture("bib.xml"), &IndexSettings::default()).unwrap()
}

pub fn residuum(imp: Implication, a: f64, b: f64) -> f64 {
    if a <= b {
        return 1.0;
    }
    match imp {
        Implication::Godel => b,
        Implication::Lukasiewicz => 1.0 - a + b,
        Implication::Goguen => b / a,
    }
}

/// `X^up(y) = inf_x X(x) -> R(x, y)`.
pub fn up(rows: &[Vec<f64>], x: &[f64], imp: Implication) -> Vec<f64> {
    let m = rows.first().map_or(0, Vec::len);
    (0..m)
        .map(|y| {
            rows.iter()
                .zip(x)
                .map(|(row, &xd)| residuum(imp, xd, row[y]))
                .fold(1.0, f64::min)
        })
        .collect()
}

/// `Y^down(x) = inf_y Y(y) -> R(x, y)`.
pub fn down(rows: &[Vec<f64>], y: &[f64], imp: Implication) -> Vec<f64> {
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(y)
                .map(|(&r, &yd)| residuum(imp, yd, r))
                .fold(1.0, f64::min)
        })
        .collect()
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|d| d.to_bits()).collect()
}

/// All (extent, intent) pairs obtained by closing every scale-valued
/// attribute set. Keys are bit patterns, so comparison is exact.
pub fn brute_force_concepts(
    rows: &[Vec<f64>],
    m: usize,
    scale: &[f64],
    imp: Implication,
) -> BTreeSet<(Vec<u64>, Vec<u64>)> {
    let mut out = BTreeSet::new();
    let mut digits = vec![0usize; m];
    loop {
        let y: Vec<f64> = digits.iter().map(|&d| scale[d]).collect();
        let extent = down(rows, &y, imp);
        let intent = up(rows, &extent, imp);
        out.insert((bits(&extent), bits(&intent)));
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            digits[i] += 1;
            if digits[i] < scale.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

pub fn lattice_concepts(l: &ConceptLattice) -> BTreeSet<(Vec<u64>, Vec<u64>)> {
    l.concepts()
        .iter()
        .map(|c| (bits(c.extent.degrees()), bits(c.intent.degrees())))
        .collect()
}

/// Classical derivation `B'` (objects to attributes).
pub fn crisp_prime_objects(rows: &[Vec<bool>], b: &[bool]) -> Vec<bool> {
    let m = rows.first().map_or(0, Vec::len);
    (0..m)
        .map(|y| rows.iter().zip(b).all(|(row, &inb)| !inb || row[y]))
        .collect()
}

/// Classical derivation `A'` (attributes to objects).
pub fn crisp_prime_attributes(rows: &[Vec<bool>], a: &[bool]) -> Vec<bool> {
    rows.iter()
        .map(|row| row.iter().zip(a).all(|(&r, &ina)| !ina || r))
        .collect()
}

/// Classical concepts by closing every object subset.
pub fn crisp_concepts(rows: &[Vec<bool>]) -> BTreeSet<(Vec<bool>, Vec<bool>)> {
    let n = rows.len();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let b: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        let intent = crisp_prime_objects(rows, &b);
        let extent = crisp_prime_attributes(rows, &intent);
        out.insert((extent, intent));
    }
    out
}

/// Intents in lectic order by Ganter's NextClosure.
pub fn next_closure_intents(rows: &[Vec<bool>], m: usize) -> Vec<Vec<bool>> {
    let close = |a: &[bool]| crisp_prime_objects(rows, &crisp_prime_attributes(rows, a));
    let mut current = close(&vec![false; m]);
    let mut out = vec![current.clone()];
    'outer: loop {
        for i in (0..m).rev() {
            if current[i] {
                continue;
            }
            let mut candidate: Vec<bool> = current[..i].to_vec();
            candidate.push(true);
            candidate.extend(std::iter::repeat_n(false, m - i - 1));
            let closed = close(&candidate);
            if (0..i).all(|j| closed[j] == current[j]) {
                current = closed;
                out.push(current.clone());
                continue 'outer;
            }
        }
        return out;
    }
}

pub fn to_bool(rows: &[Vec<f64>]) -> Vec<Vec<bool>> {
    rows.iter()
        .map(|r| r.iter().map(|&d| d == 1.0).collect())
        .collect()
}

pub fn to_f64(v: &[bool]) -> Vec<f64> {
    v.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn random_rows<R: Rng>(rng: &mut R, n: usize, m: usize, values: &[f64]) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..m).map(|_| values[rng.gen_range(0..values.len())]).collect())
        .collect()
}

pub fn random_context<R: Rng>(rng: &mut R, n: usize, m: usize, values: &[f64]) -> LContext {
    LContext::new(labels("o", n), labels("a", m), random_rows(rng, n, m, values)).unwrap()
}

/// Full-scan score on crisp data: number of attributes held by both.
pub fn shared_count(ctx: &LContext, wanted: &[f64], object: usize) -> usize {
    ctx.row(object)
        .iter()
        .zip(wanted)
        .filter(|(&r, &w)| r == 1.0 && w == 1.0)
        .count()
}

/// Exhaustive localization: among concepts whose intent contains `wanted`
/// pointwise, the one no other such concept lies above.
pub fn minimal_containing(l: &ConceptLattice, wanted: &[f64]) -> usize {
    let holds = |i: usize| {
        l.concept(i)
            .intent
            .degrees()
            .iter()
            .zip(wanted)
            .all(|(&d, &w)| d >= w)
    };
    let qualifying: Vec<usize> = (0..l.len()).filter(|&i| holds(i)).collect();
    let below = |a: usize, b: usize| {
        l.concept(a)
            .extent
            .degrees()
            .iter()
            .zip(l.concept(b).extent.degrees())
            .all(|(x, y)| x <= y)
    };
    let maximal: Vec<usize> = qualifying
        .iter()
        .copied()
        .filter(|&a| qualifying.iter().all(|&b| b == a || !below(a, b)))
        .collect();
    assert_eq!(maximal.len(), 1, "expected one maximal containing concept");
    maximal[0]
}

/// Declared node ids and edges of a DOT graph.
pub type DotGraph = (Vec<String>, Vec<(String, String)>);

/// Minimal DOT reader covering the syntax the exporter emits plus the usual
/// variants: `digraph`/`graph`, `strict`, quoted and bare ids, attribute
/// lists, edge chains and both comment styles. Returns declared node ids and
/// edges.
pub fn parse_dot(src: &str) -> Result<DotGraph, String> {
    let tokens = dot_tokens(src)?;
    let mut p = DotParser { t: tokens, i: 0, nodes: Vec::new(), edges: Vec::new() };
    p.graph()?;
    if p.i != p.t.len() {
        return Err(format!("trailing tokens after graph: {:?}", &p.t[p.i..]));
    }
    Ok((p.nodes, p.edges))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Sym(String),
}

fn dot_tokens(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') || c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= chars.len() {
                return Err("unterminated comment".into());
            }
            i += 2;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        s.push('\\');
                        s.push(*chars.get(i + 1).ok_or("dangling escape")?);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
        } else if c == '-' && matches!(chars.get(i + 1), Some('>') | Some('-')) {
            out.push(Tok::Sym(if chars[i + 1] == '>' { "->" } else { "--" }.into()));
            i += 2;
        } else if "{}[];,=:".contains(c) {
            out.push(Tok::Sym(c.to_string()));
            i += 1;
        } else if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                i += 1;
            }
            if i == start {
                i += 1;
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct DotParser {
    t: Vec<Tok>,
    i: usize,
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
}

impl DotParser {
    fn peek(&self) -> Option<&Tok> {
        self.t.get(self.i)
    }

    fn sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if x == s) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), String> {
        if self.sym(s) {
            Ok(())
        } else {
            Err(format!("expected {s:?} at token {}, found {:?}", self.i, self.peek()))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            other => Err(format!("expected id at token {}, found {other:?}", self.i)),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case(kw)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        self.keyword("strict");
        let edge_op = if self.keyword("digraph") {
            "->"
        } else if self.keyword("graph") {
            "--"
        } else {
            return Err("expected graph or digraph".into());
        };
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.id()?;
        }
        self.expect("{")?;
        self.stmt_list(edge_op)?;
        self.expect("}")
    }

    fn stmt_list(&mut self, edge_op: &str) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Sym(x)) if x == "}") && self.peek().is_some() {
            self.stmt(edge_op)?;
            self.sym(";");
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<(), String> {
        while self.sym("[") {
            while !self.sym("]") {
                self.id()?;
                self.expect("=")?;
                self.id()?;
                if !self.sym(",") {
                    self.sym(";");
                }
            }
        }
        Ok(())
    }

    fn stmt(&mut self, edge_op: &str) -> Result<(), String> {
        if self.keyword("subgraph") {
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.id()?;
            }
            self.expect("{")?;
            self.stmt_list(edge_op)?;
            return self.expect("}");
        }
        if matches!(self.peek(), Some(Tok::Id(s)) if ["node", "edge", "graph"].contains(&s.as_str()))
            && matches!(self.t.get(self.i + 1), Some(Tok::Sym(x)) if x == "[")
        {
            self.i += 1;
            return self.attr_list();
        }
        let first = self.id()?;
        if self.sym("=") {
            self.id()?;
            return Ok(());
        }
        if self.sym(":") {
            self.id()?;
        }
        let mut chain = vec![first];
        while self.sym(edge_op) {
            chain.push(self.id()?);
        }
        if chain.len() == 1 {
            self.nodes.push(chain.pop().unwrap());
        } else {
            for w in chain.windows(2) {
                self.edges.push((w[0].clone(), w[1].clone()));
            }
        }
        self.attr_list()
    }
}
