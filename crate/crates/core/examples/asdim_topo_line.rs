//! asdim of ℕ with the one-point compactification structure: the greedy
//! interval coarsening gives multiplicity 2, and a multiplicity-1
//! coarsening of {{n, n+1}} swallows the whole window.

use coarselab::dimension::{asdim_topo_line_report, greedy_interval_coarsen, IntervalRule};

fn main() -> coarselab::Result<()> {
    let cover = IntervalRule::adjacent_pairs().instantiate(16)?;
    let (coarse, cert) = greedy_interval_coarsen(&cover)?;
    println!("breakpoints {:?}", cert.breakpoints);
    for m in &coarse.members {
        print!("[{}, {}] ", m[0], m[m.len() - 1]);
    }
    println!("\nmultiplicity {}", cert.multiplicity);

    let report = asdim_topo_line_report(&[16, 32, 64, 128, 256, 512])?;
    for r in &report.rows {
        println!("N = {:>3}: {:>3} intervals, multiplicity {}, forced member {}", r.n, r.intervals, r.multiplicity, r.forced_member);
    }
    println!("{}", report.conclusion);
    Ok(())
}
