mod common;

use std::time::Instant;

use tanglefree::VolumeCache;

#[test]
fn recursion_matches_integral_form_oracle() {
    let t = Instant::now();
    assert_eq!(common::oracle_mismatches(&VolumeCache::new(12), 8), 0);
    println!("oracle comparison took {:?}", t.elapsed());
}
