//! The four query steps against the nested lattice of an indexed document:
//! describe the wanted attributes, insert them as a virtual object, locate
//! the query concept, and rank the objects around it.

use fqx::query::{insert_query, locate_query_concept, parse_query_with, rank_results, Neighborhood};
use fqx::{IndexBundle, IndexSettings};

fn main() -> fqx::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/bib.xml");
    let bundle = IndexBundle::build_from_path(path, &IndexSettings::default())?;
    let base = &bundle.nested.lattice;
    let ctx = base.context();

    // Term text, symbols and symbols with a degree all resolve; a bare symbol
    // expands to every book that has it.
    let q = parse_query_with(&["Microsoft Press", "E2:0.4"], ctx, Some(&bundle.lexicon))?;
    for t in q.terms() {
        println!("want {} >= {}", t.attribute, t.degree);
    }

    let overlay = insert_query(base, &q)?;
    println!("overlay: {} concepts (base {})", overlay.lattice.len(), base.len());
    let located = locate_query_concept(&overlay, &q);
    println!("query concept #{} after testing {} concepts", located.concept, located.examined);

    let ranked = rank_results(&overlay, &q, located.concept, 5, Neighborhood::SuperConcepts);
    print!("{}", ranked.to_table());

    let wide = rank_results(&overlay, &q, located.concept, 5, Neighborhood::WithSubConcepts);
    println!("with sub-concepts: {} results", wide.entries.len());

    match parse_query_with(&["E99"], ctx, Some(&bundle.lexicon)) {
        Err(e) => println!("error: {e}"),
        Ok(_) => unreachable!("E99 is not a column"),
    }
    Ok(())
}
