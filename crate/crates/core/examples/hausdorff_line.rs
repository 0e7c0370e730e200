//! Exact Hausdorff distances between eventually periodic subsets of ℕ, and
//! scale-bounded answers for sets outside the exact tier.

use coarselab::lineset::{hausdorff_at_scale, hausdorff_distance};
use coarselab::LineSet;

fn main() -> coarselab::Result<()> {
    let evens = LineSet::evens();
    let fours = LineSet::progression(0, 4)?;
    let shifted = LineSet::periodic(vec![1, 2, 3], vec![(10, 3)], vec![])?;
    let sparse = LineSet::doubling_gaps(1)?;

    for (a, b) in [(&evens, &LineSet::odds()), (&evens, &fours), (&fours, &shifted), (&LineSet::finite([3, 9]), &evens)] {
        println!("d_H({a}, {b}) = {}", hausdorff_distance(a, b)?);
    }
    for k in [1, 4, 16] {
        let v = hausdorff_at_scale(&sparse, &LineSet::naturals(), k, 100_000);
        println!("d_H({sparse}, ℕ) <= {k} on [0, 1e5]: {}", v.label());
    }
    Ok(())
}
