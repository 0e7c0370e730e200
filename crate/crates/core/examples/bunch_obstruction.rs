//! Evens and odds are near on the metric line, yet no bunch contains them:
//! a certificate with one refutation per scale up to 32.

use coarselab::nearness_lab::bunch_obstruction;
use coarselab::verdict::Budget;
use coarselab::LineSet;

fn main() -> coarselab::Result<()> {
    let ob = bunch_obstruction(&[LineSet::evens(), LineSet::odds()], Budget { window: 100_000, scale: 32 })?;
    println!("L = {}", ob.chosen);
    println!("L1 = {}", ob.l1);
    println!("L2 = {}", ob.l2);
    for d in ob.disjointness.iter().take(4) {
        println!("  k = {}: {} has distance {} from the other half", d.k, d.point, d.distance);
    }
    let refuted = ob.candidates.iter().filter(|c| c.passed()).count();
    println!("candidate scales refuted: {refuted}/{}", ob.candidates.len());
    println!("verdict: {} (re-validation errors: {})", ob.verdict.label(), ob.revalidate()?.len());
    Ok(())
}
