//! From an LS-regular structure to its pairwise-determined regularization,
//! and the asymptotic resemblance both of them induce.

use coarselab::backends::{c_lambda, lambda_explicit, regularize, LsrBackend};
use coarselab::structures::{self, ExplicitASR};
use coarselab::Universe;

fn main() -> coarselab::Result<()> {
    let u = Universe::letters(3)?;
    let c = LsrBackend::partition(u.clone(), &[0b011, 0b100])?.to_explicit()?;
    let r = regularize(&c)?;
    println!("members: {} before, {} after", c.len(), r.len());
    println!("determined by pairs: {} before, {} after", structures::is_a_lsr(&c)?, structures::is_a_lsr(&r)?);
    println!("idempotent: {}", regularize(&r)?.maximal() == r.maximal());

    let l: ExplicitASR = lambda_explicit(&c)?;
    for block in l.blocks() {
        let shown: Vec<String> = block.iter().map(|m| u.fmt_subset(coarselab::Subset(*m))).collect();
        println!("alike: {}", shown.join(" "));
    }
    println!("c_lambda equals the regularization: {}", c_lambda(&l)?.maximal() == r.maximal());
    Ok(())
}
