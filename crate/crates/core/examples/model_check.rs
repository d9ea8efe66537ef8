//! Exhaustive check of every strictly ordered profile on up to five nodes.

use dmvr::verify::{model_check, strict_profiles, Verdict};
use dmvr::{Variant, VoteProfile};

fn main() -> dmvr::Result<()> {
    for variant in [Variant::CompactVoting, Variant::EnhancedVoting, Variant::CompactRanking] {
        let (mut pass, mut states) = (0, 0);
        for k in 1..=3 {
            for n in 2..=5 {
                for counts in strict_profiles(n, k) {
                    let r = model_check(&VoteProfile::from_counts(&counts)?, variant)?;
                    assert_eq!(r.verdict, Verdict::Pass, "{variant} {counts:?}");
                    pass += 1;
                    states += r.configurations;
                }
            }
        }
        println!("{variant}: {pass} profiles PASS, {states} configurations explored");
    }
    // a tie has no correct answer
    let tie = model_check(&VoteProfile::from_counts(&[2, 2])?, Variant::CompactVoting)?;
    println!("[2, 2]: {}", tie.verdict);
    Ok(())
}
