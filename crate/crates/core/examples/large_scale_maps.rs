//! n ↦ 2n and n ↦ ⌊n/2⌋ are mutually inverse large scale equivalences of
//! the metric line. n ↦ 3n + 1 is still a map, but composing it with the
//! halving drifts without bound, so the pair is not an equivalence.

use coarselab::backends::{LsrBackend, Sampling};
use coarselab::maps::{is_ls_equivalence, round_trip_displacement, MapRule, SpaceMap};
use coarselab::Witness;

fn main() -> coarselab::Result<()> {
    let line = LsrBackend::metric_line();
    let sampling = Sampling { seed: 1, families: 200, scale: 64 };
    let double = SpaceMap::new(line.clone(), line.clone(), MapRule::Affine { a: 2, b: 0 })?;
    let halve = SpaceMap::new(line.clone(), line.clone(), MapRule::FloorDiv { d: 2 })?;
    let r = is_ls_equivalence(&double, &halve, sampling)?;
    println!("2n / floor(n/2): equivalence {}", r.verdict.label());
    println!(
        "  halve then double moves points by {}, double then halve by {}",
        round_trip_displacement(&halve, &double)?,
        round_trip_displacement(&double, &halve)?
    );

    let triple = SpaceMap::new(line.clone(), line, MapRule::Affine { a: 3, b: 1 })?;
    let r = is_ls_equivalence(&triple, &halve, sampling)?;
    println!("3n+1 / floor(n/2): f is a map {}, equivalence {}", r.f_is_map.label(), r.verdict.label());
    if let Some(Witness::Explicit { detail }) = r.verdict.witness() {
        println!("  {detail}");
    }
    Ok(())
}
