//! The two derivation operators of a fuzzy context and the closures they
//! induce, under each residuated implication.

use fqx::{FuzzySet, Implication, LContext, Universe};

fn show(set: &FuzzySet, labels: &[String]) -> String {
    let parts: Vec<String> = set.support().map(|i| format!("{}/{}", labels[i], set.get(i))).collect();
    format!("{{{}}}", parts.join(", "))
}

fn main() -> fqx::Result<()> {
    let ctx = LContext::new(
        vec!["title".into(), "author".into(), "publisher".into()],
        vec!["xml".into(), "css".into(), "press".into()],
        vec![vec![1.0, 0.5, 0.0], vec![0.5, 1.0, 0.0], vec![0.0, 0.5, 1.0]],
    )?;
    let (objects, attributes) = (ctx.objects(), ctx.attributes());

    // How strongly each object has "xml" to degree 0.8.
    let want = FuzzySet::new(Universe::Attributes, vec![0.8, 0.0, 0.0])?;
    for imp in Implication::ALL {
        let extent = ctx.sufficiency_down(&want, imp)?;
        let intent = ctx.sufficiency_up(&extent, imp)?;
        println!("{:<12} down = {}  up(down) = {}", imp.name(), show(&extent, objects), show(&intent, attributes));
        assert_eq!(ctx.closure(&want, imp)?, intent);
        // A closure is idempotent.
        assert_eq!(ctx.closure(&intent, imp)?, intent);
    }

    // The residua differ only when the antecedent exceeds the consequent.
    for imp in Implication::ALL {
        println!("{:<12} 0.8 -> 0.4 = {:.4}", imp.name(), imp.apply(0.8, 0.4));
    }
    Ok(())
}
