//! The three-point structure generated by {{a},{a,b}} and {{a,c},{a,b,c}}:
//! a large scale resemblance that is not LS-regular.

use coarselab::structures::{self, ExplicitLSR};
use coarselab::{Family, Universe};

fn main() -> coarselab::Result<()> {
    let u = Universe::new(["a", "b", "c"])?;
    let mut gens: Vec<Family> = u.subsets().map(|s| Family::single(3, s)).collect();
    gens.push(u.family(&[vec!["a"], vec!["a", "b"]])?);
    gens.push(u.family(&[vec!["a", "c"], vec!["a", "b", "c"]])?);
    let c = ExplicitLSR::from_generators(u.clone(), &gens)?;

    print!("{}", structures::check_lsr_axioms(&c));
    match structures::ls_regularity(&c) {
        Ok(()) => println!("LS-regular"),
        Err(w) => println!("not LS-regular: {}", w.describe(&u)),
    }
    let bounded: Vec<String> = u.subsets().filter(|s| c.is_bounded(*s)).map(|s| u.fmt_subset(s)).collect();
    println!("bounded sets: {}", bounded.join(" "));
    Ok(())
}
