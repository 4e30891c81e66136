//! Enumerate the concepts of a small fuzzy context and navigate the order.

use fqx::{enumerate_concepts, FuzzySet, Implication, LContext};

fn show(set: &FuzzySet, labels: &[String]) -> String {
    let parts: Vec<String> = set.support().map(|i| format!("{}/{}", labels[i], set.get(i))).collect();
    format!("{{{}}}", parts.join(", "))
}

fn main() -> fqx::Result<()> {
    let ctx = LContext::new(
        vec!["level".into(), "title".into(), "author".into(), "publisher".into()],
        vec!["b0".into(), "b1".into(), "b2".into()],
        vec![
            vec![0.17, 0.47, 0.47],
            vec![0.47, 0.47, 0.47],
            vec![0.17, 0.47, 0.0],
            vec![0.47, 0.0, 0.17],
        ],
    )?;
    let lattice = enumerate_concepts(&ctx, Implication::Godel)?;
    println!("scale {:?}, {} concepts", ctx.scale(), lattice.len());
    for c in lattice.concepts() {
        println!(
            "#{:<2} extent {:<48} intent {}",
            c.id,
            show(&c.extent, ctx.objects()),
            show(&c.intent, ctx.attributes())
        );
    }
    println!("top #{}, bottom #{}", lattice.top(), lattice.bottom());
    println!("covers (lower, upper): {:?}", lattice.covers());

    let atoms = lattice.upper_covers(lattice.bottom());
    if let [a, b, ..] = atoms {
        let (a, b) = (lattice.concept(*a), lattice.concept(*b));
        println!(
            "#{} vs #{}: {:?}, meet #{}, join #{}",
            a.id,
            b.id,
            lattice.compare(a, b)?,
            lattice.meet(a, b)?.id,
            lattice.join(a, b)?.id
        );
    }

    // Lukasiewicz residua of 0.6 produce 0.4, 0.8 and 0.2: close the scale
    // first so every meet and join is enumerated. Fine degree sets close to
    // large scales, hence the limit.
    let rows = vec![vec![0.6, 1.0], vec![1.0, 0.6], vec![0.0, 0.6]];
    let names = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let scale = Implication::Lukasiewicz.close_scale(&[0.6], 50).expect("small scale");
    let coarse = LContext::with_scale(names("o", 3), names("a", 2), rows, scale)?;
    let luk = enumerate_concepts(&coarse, Implication::Lukasiewicz)?;
    println!("lukasiewicz over {:?}: {} concepts", coarse.scale(), luk.len());
    let (first, last) = (luk.concept(1), luk.concept(luk.len() - 1));
    println!("join of #{} and #{} is #{}", first.id, last.id, luk.join(first, last)?.id);
    Ok(())
}
