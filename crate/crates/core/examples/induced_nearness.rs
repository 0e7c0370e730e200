//! Nearness induced by a coarse structure: on a connected partition every
//! axiom holds; with two classes of two points axiom iv fails, because a
//! union of bounded sets from different classes is unbounded.

use coarselab::backends::{self, LsrBackend};
use coarselab::structures::{self, ClosureOp};
use coarselab::Universe;

fn main() -> coarselab::Result<()> {
    let u = Universe::letters(4)?;
    for classes in [vec![0b1111], vec![0b0111, 0b1000], vec![0b0011, 0b1100]] {
        let c = LsrBackend::partition(u.clone(), &classes)?.to_explicit()?;
        let n = backends::induced_nearness(&c, &ClosureOp::discrete(4)?)?;
        let shown: Vec<String> = classes.iter().map(|m| u.fmt_subset(coarselab::Subset(*m))).collect();
        println!("classes {}", shown.join(" | "));
        print!("{}", structures::check_nearness_axioms(&n));
    }
    Ok(())
}
