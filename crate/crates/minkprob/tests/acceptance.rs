//! The twelve acceptance criteria, one pass/fail line each.
//!
//! Run with `cargo test -p minkprob --test acceptance -- --nocapture`.

use minkprob::criteria::{self, CRITERIA};

#[test]
fn acceptance() {
    let outcomes: Vec<_> = CRITERIA
        .iter()
        .map(|c| {
            let o = criteria::run(c.id, 0).expect("criterion exists");
            println!("{o}");
            o
        })
        .collect();
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
