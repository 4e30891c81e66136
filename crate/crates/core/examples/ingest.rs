//! Parse an XML document and split it into level sets.
//!
//! Level 0 holds the text leaves, level 1 the elements that carry them
//! (fields), and each further level the parents of the previous one.

use fqx::{extract_levels, DocumentTree};

const DOC: &str = r#"<library>
  <shelf>
    <book year="2004"><title>XML in a Nutshell</title><author>Harold</author></book>
    <book><title>Learning XML</title></book>
  </shelf>
</library>"#;

fn main() -> fqx::Result<()> {
    let tree = DocumentTree::parse_str(DOC)?;
    let levels = extract_levels(&tree);
    println!("{} nodes, depth {}", tree.len(), levels.depth());
    for (i, level) in levels.levels().iter().enumerate() {
        let names: Vec<String> = level.iter().map(|&n| describe(&tree, n)).collect();
        println!("level {i}: {}", names.join(", "));
    }

    // Paths are stable handles for selectors and nested attribute names.
    let second = tree.find_path("/library/shelf[0]/book[1]").expect("path exists");
    println!("second book is node {second}, {} children", tree.children(second).len());
    println!("{}", tree.to_xml());
    Ok(())
}

fn describe(tree: &DocumentTree, id: usize) -> String {
    let node = tree.node(id);
    if node.is_text() {
        format!("{:?}", node.label)
    } else {
        tree.path(id)
    }
}
