//! Category systems against per-formula classification.

use std::collections::BTreeMap;

use rug::Integer;
use tautodensity::count::{self, BasisFamily};
use tautodensity::logic::Strength;

const CASES: [(BasisFamily, Strength); 3] =
    [(BasisFamily::S1, Strength::Strong), (BasisFamily::S1, Strength::Weak), (BasisFamily::S12, Strength::Weak)];

fn depth(m: u32) -> usize {
    if m == 1 {
        15
    } else {
        11
    }
}

#[test]
fn basis_member_counts_the_structural_shapes() {
    for m in 1..=2 {
        let n = depth(m);
        for (basis, strength) in CASES {
            let spec = count::category_spec(basis, strength).unwrap();
            let sys = count::system_coefficients(&spec, m, n);
            let e = count::category_counts_by_enumeration(m, n, basis, strength);
            assert_eq!(sys[spec.basis], e.structural, "{basis:?}/{strength:?} m={m}");
        }
    }
}

#[test]
fn generic_basis_reproduces_labels() {
    for m in 1..=2 {
        let n = depth(m);
        for (basis, strength) in CASES {
            let spec = count::category_spec(basis, strength).unwrap();
            let e = count::category_counts_by_enumeration(m, n, basis, strength);
            let fixed: BTreeMap<&str, Vec<Integer>> = [(spec.basis, e.counts.basis.clone())].into();
            let sys = count::system_coefficients_with(&spec, m, n, &fixed);
            for (name, want) in [("T", &e.counts.t), ("U", &e.counts.u), ("A", &e.counts.a)] {
                assert_eq!(&sys[name], want, "{basis:?}/{strength:?} m={m} {name}");
            }
        }
    }
}

#[test]
fn structural_shapes_cover_basis_with_small_excess() {
    for m in 1..=2 {
        let n = depth(m);
        for (basis, strength) in CASES {
            let e = count::category_counts_by_enumeration(m, n, basis, strength);
            assert!(e.missing.iter().all(|c| *c == 0), "{basis:?}/{strength:?} m={m} misses basic formulae");
            if let Some(v) = e.excess_max_norm2 {
                assert!(v <= -4, "{basis:?}/{strength:?} m={m}: excess at 2|phi| = {v}");
            }
        }
    }
}

#[test]
fn equation_counts_match_enumeration_where_exact() {
    // Only the combined basis over-includes; the S1 systems are exact.
    for m in 1..=2 {
        let n = depth(m);
        for (basis, strength) in &CASES[..2] {
            let c = count::category_coefficients(m, n, *basis, *strength).unwrap();
            let e = count::category_counts_by_enumeration(m, n, *basis, *strength);
            assert_eq!(c, e.counts, "{basis:?}/{strength:?} m={m}");
        }
    }
}
