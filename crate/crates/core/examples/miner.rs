//! Search small structures for a non-LS-regular one and print a document
//! that `coarselab check` accepts.

use coarselab::cli::{explicit_document, mine, MineTarget};

fn main() -> coarselab::Result<()> {
    for target in [MineTarget::NonLsRegular, MineTarget::NearnessIv, MineTarget::NoBunch] {
        match mine(target, 3, 0, 50_000)? {
            Some((c, witness, examined)) => {
                println!("{target:?}: {} points after {examined} candidates: {witness}", c.width());
                if target == MineTarget::NonLsRegular {
                    println!("{}", serde_json::to_string(&explicit_document(&c)).expect("serializes"));
                }
            }
            None => println!("{target:?}: nothing up to 3 points"),
        }
    }
    Ok(())
}
