//! Build one context per internal node of a document, enumerate each
//! lattice, then nest them into a single lattice over the shared objects.

use fqx::contextualize::ContextBuilder;
use fqx::lattice::{nest, NestMember};
use fqx::weighting::{Analyzer, DocStats, Weigher, WeightingConfig};
use fqx::{enumerate_concepts, extract_levels, DocumentTree, Implication};

fn main() -> fqx::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/bib.xml");
    let tree = DocumentTree::from_path(path)?;
    let levels = extract_levels(&tree);
    let config = WeightingConfig::default();
    let stats = DocStats::build(&tree, &Analyzer::new(&config), config.population);
    let weigher = Weigher::new(&tree, &stats, &config);
    let builder = ContextBuilder::new(&weigher, &levels);

    for entry in builder.lexicon().entries() {
        println!("{:<4} {}", entry.symbol, entry.text);
    }

    let contexts = builder.build_all()?;
    for c in &contexts {
        let lattice = enumerate_concepts(&c.context, Implication::Godel)?;
        let (rows, cols) = c.context.shape();
        println!("seq {} {:<14} {rows}x{cols} {:>3} concepts", c.seq, c.path, lattice.len());
    }

    // Only the three books: their columns are concatenated, and the repeated
    // symbols are told apart by the book's path.
    let members: Vec<NestMember> = contexts
        .iter()
        .filter(|c| c.path.contains("book"))
        .map(|c| NestMember { name: c.path.clone(), origin: Some(c.origin), context: &c.context })
        .collect();
    let nested = nest(&members, Implication::Godel)?;
    let (rows, cols) = nested.combined.shape();
    println!("nested {rows}x{cols}, {} concepts", nested.lattice.len());
    for span in &nested.members {
        println!("  {:<14} columns {:?}", span.name, span.columns());
    }
    println!("column 12 is {}", nested.combined.attributes()[12]);
    Ok(())
}
