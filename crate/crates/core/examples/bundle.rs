//! Persist an index, load it back, and export its parts.

use fqx::export::{context_csv, lattice_dot, lattice_json};
use fqx::{IndexBundle, IndexConfig};

fn main() -> fqx::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/bib.xml");
    let config: IndexConfig = toml::from_str("implication = \"godel\"\nnest = [1, 2, 3]\n").expect("valid config");
    let bundle = IndexBundle::build_from_path(path, &config.resolve()?)?;
    println!("digest {}", &bundle.digest[..16]);

    let dir = std::env::temp_dir().join(format!("fqx-bundle-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let file = dir.join("bib.json");
    bundle.save(&file)?;
    let loaded = IndexBundle::load(&file)?;
    assert_eq!(loaded.to_json()?, bundle.to_json()?);
    println!("saved and reloaded {} bytes", std::fs::metadata(&file)?.len());

    // Selectors: seq number, origin node, path or the nested lattice.
    for sel in ["1", "/bib", "nested"] {
        let s = loaded.select(sel)?;
        let (rows, cols) = s.context().shape();
        println!("{sel:<7} {rows}x{cols} {} concepts", s.lattice().len());
    }

    let first = loaded.select("1")?;
    print!("{}", context_csv(first.context()));
    let dot = lattice_dot(first.lattice(), first.members());
    println!("dot: {} lines", dot.lines().count());
    let json = lattice_json(loaded.select("nested")?.lattice(), loaded.select("nested")?.members())?;
    println!("nested lattice json: {} bytes", json.len());

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
