//! Library values against brute-force evaluation straight from the distance
//! table, on every space with at most 16 points.

mod common;

#[test]
fn library_matches_brute_force() {
    let failures = common::oracle_suite();
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}
