//! Term weights for text nodes and their merge into element weights.
//!
//! A term found in one of three records weighs log10(3/1) = 0.4771; a term
//! shared by two records weighs log10(3/2) = 0.1761.

use fqx::weighting::{raw_weight, Analyzer, DocStats, Population, TermMode, Weigher, WeightingConfig};
use fqx::{DocumentTree, SNorm};

const DOC: &str = r#"<bib>
  <book><title>Rust</title><publisher>Acme</publisher></book>
  <book><title>Go</title><publisher>Acme</publisher></book>
  <book><title>Zig</title><publisher>Orbit</publisher></book>
</bib>"#;

fn main() -> fqx::Result<()> {
    println!("unique term: {:.4}", raw_weight(1, 3, 1, 10.0));
    println!("shared term: {:.4}", raw_weight(1, 3, 2, 10.0));

    let tree = DocumentTree::parse_str(DOC)?;
    let config = WeightingConfig::default();
    let stats = DocStats::build(&tree, &Analyzer::new(&config), config.population);
    let weigher = Weigher::new(&tree, &stats, &config);
    println!("n_t = {} records, vocabulary {:?}", stats.n_t(), stats.vocabulary());

    for book in tree.children(tree.root()).to_vec() {
        let weights: Vec<String> = stats
            .vocabulary()
            .iter()
            .filter_map(|t| {
                let w = weigher.node_weight(t, book).ok()?.value();
                (w > 0.0).then(|| format!("{t}={w:.4}"))
            })
            .collect();
        println!("{}: {}", tree.path(book), weights.join(" "));
    }
    println!("root subtree weight {:.4}", weigher.subtree_weight(tree.root())?.value());

    // Token mode over every text node, merged with the probabilistic sum.
    let config = WeightingConfig {
        term_mode: TermMode::Token,
        population: Population::TextNodes,
        s_norm: SNorm::ProbabilisticSum,
        ..WeightingConfig::default()
    };
    let stats = DocStats::build(&tree, &Analyzer::new(&config), config.population);
    let weigher = Weigher::new(&tree, &stats, &config);
    println!(
        "token mode: n_t = {}, acme under /bib = {:.4}",
        stats.n_t(),
        weigher.node_weight("acme", tree.root())?.value()
    );
    Ok(())
}
