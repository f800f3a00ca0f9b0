//! The acceptance suite: every closed form in the crate against its
//! independent enumeration oracle, on the full committed grids, with exact
//! (zero-tolerance) comparison. One PASS/FAIL line is printed per criterion.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;

use sumsq_core::field::Field;
use sumsq_core::verify;

fn report(num: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {num} ({name}): {verdict} {detail}");
    assert!(ok, "acceptance criterion {num} ({name}) failed: {detail}");
}

fn f3() -> Field {
    Field::prime(3).unwrap()
}

fn f5() -> Field {
    Field::prime(5).unwrap()
}

// Criterion 1: brute-force variance equals the closed formula exactly for
// q in {3, 5}, every (n, m) with 1 <= n <= 3 and 0 <= m <= n-1, every
// 0 <= h <= 2n, and every nonzero gamma. The grid must exercise all four
// regimes, including the short-interval range of the n <= 2m-1 regime.
#[test]
fn criterion_1_variance_grid() {
    let mut rows_checked = 0usize;
    let mut mismatches = Vec::new();
    let mut cases_seen = BTreeSet::new();
    let mut subcases_seen = BTreeSet::new();
    for field in [f3(), f5()] {
        let rows = verify::theorem_grid(&field, 3).unwrap();
        for row in rows {
            rows_checked += 1;
            cases_seen.insert(row.case_label);
            subcases_seen.insert((row.case_label, row.subcase_label));
            if !row.matched {
                mismatches.push(format!(
                    "q={} n={} m={} h={} gamma={}: closed {} brute {}",
                    field.q(),
                    row.n,
                    row.m,
                    row.h,
                    row.gamma,
                    row.closed,
                    row.brute
                ));
            }
        }
    }
    let all_cases = ["m=0", "n=2m", "n>=2m+1", "m+1<=n<=2m-1"]
        .iter()
        .all(|c| cases_seen.contains(c));
    let short_range_hit = subcases_seen.contains(&("m+1<=n<=2m-1", "0<=h<=2m-n-1"));
    let ok = mismatches.is_empty() && all_cases && short_range_hit;
    report(
        1,
        "variance closed = brute on the full grid",
        ok,
        &format!(
            "{} rows, regimes {:?}{}",
            rows_checked,
            cases_seen,
            if mismatches.is_empty() {
                String::new()
            } else {
                format!("; first mismatch: {}", mismatches[0])
            }
        ),
    );
}

// Criterion 2: the closed census tables equal the brute-force census cell
// for cell (including absent cells) for q = 3 across every admissible
// (n, m, h) with n <= 3 — this covers the named pairs (2,1), (3,2), (3,1)
// and the m = 0 special case.
#[test]
fn criterion_2_census_tables() {
    let field = f3();
    let checks = verify::census_grid(&field, 3, 1).unwrap();
    let mut tables = 0usize;
    let mut cells = 0usize;
    let mut failures = Vec::new();
    for check in &checks {
        tables += 1;
        cells += check.cells.len();
        if !check.all_match {
            failures.push(format!("n={} m={} h={}", check.n, check.m, check.h));
        }
    }
    let named_pairs_covered = [(2, 1), (3, 2), (3, 1), (2, 0), (3, 0)]
        .iter()
        .all(|&(n, m)| checks.iter().any(|c| c.n == n && c.m == m));
    report(
        2,
        "census closed = enumerated cell-for-cell",
        failures.is_empty() && named_pairs_covered,
        &format!("{tables} tables, {cells} cells{}", detail_list(&failures)),
    );
}

// Criterion 3: the character-sum route to the interval square sum equals the
// polynomial brute force on the same grid as criterion 2, for every gamma.
#[test]
fn criterion_3_square_sum_identity() {
    let field = f3();
    let rows = verify::square_sum_grid(&field, 3).unwrap();
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.matched)
        .map(|r| format!("n={} m={} h={} gamma={}", r.n, r.m, r.h, r.gamma))
        .collect();
    report(
        3,
        "interval square sum via characters = brute",
        failures.is_empty(),
        &format!("{} comparisons{}", rows.len(), detail_list(&failures)),
    );
}

// Criterion 4: for all 243 sequences in F_3^5 the closed paired contribution
// equals the direct double enumeration, and every sequence whose large
// matrix fails the pi filter contributes exactly zero.
#[test]
fn criterion_4_paired_contributions() {
    let field = f3();
    let check = verify::pair_contribution_exhaustive(&field, 2).unwrap();
    let ok = check.ok() && check.sequences == 243 && check.filtered > 0;
    report(
        4,
        "paired character sums closed = direct",
        ok,
        &format!(
            "{} sequences, {} filtered{}",
            check.sequences,
            check.filtered,
            detail_list(&check.failures)
        ),
    );
}

// Criterion 5: for every square Hankel matrix with n <= 4 over F_3 the
// recorded operations certify the congruence, rank is preserved, and all
// three quadratic-form value multisets are invariant under reduction.
#[test]
fn criterion_5_reduction_suite() {
    let field = f3();
    let check = verify::reduction_suite(&field, 4).unwrap();
    report(
        5,
        "reduction certificates and multiset invariance",
        check.ok() && check.matrices == 3 + 27 + 243 + 2187,
        &format!("{} matrices{}", check.matrices, detail_list(&check.failures)),
    );
}

// Criterion 6: reduction fibers have the closed size, the number of reduced
// matrices per partition matches the closed count and the enumeration, and
// the fiber sizes reassemble all q^(2n-1) sequences, for n <= 4 over F_3.
#[test]
fn criterion_6_counting_lemmas() {
    let field = f3();
    let check = verify::counting_suite(&field, 4).unwrap();
    report(
        6,
        "counting lemmas (fibers and partitions)",
        check.ok(),
        &format!(
            "{} fibers over {} partitions{}",
            check.fibers,
            check.partitions,
            detail_list(&check.failures)
        ),
    );
}

// Criterion 7: the closed value multisets match enumeration for every
// square Hankel matrix with n <= 3 over both F_3 and F_5, and the
// triangular-block closed forms match enumeration for every l <= 4, every
// lambda, every belly, in both vector ranges.
#[test]
fn criterion_7_multiset_closed_forms() {
    let mut failures = Vec::new();
    let mut hankels = 0usize;
    let mut blocks = 0usize;
    for field in [f3(), f5()] {
        let check = verify::multiset_closed_suite(&field, 3, 4).unwrap();
        hankels += check.hankel_checked;
        blocks += check.triangular_checked;
        failures.extend(check.failures);
    }
    report(
        7,
        "value multiset closed forms = enumeration",
        failures.is_empty(),
        &format!("{hankels} Hankel matrices, {blocks} triangular blocks{}", detail_list(&failures)),
    );
}

// Criterion 8: known spot values — the character sum over the product
// distribution is q, opposite scaled squares convolve to the product
// distribution, every census table has q sequences in its trivial cell, and
// the four smoothed square-sum powers come out at q = 3.
#[test]
fn criterion_8_spot_values() {
    let field = f3();
    let spots = verify::spot_checks(&field).unwrap();
    let failures: Vec<String> = spots
        .iter()
        .filter(|s| !s.ok)
        .map(|s| format!("{}: {}", s.name, s.detail))
        .collect();
    let ok = failures.is_empty() && spots.len() >= 7;
    report(
        8,
        "known spot values reproduced",
        ok,
        &format!("{} identities{}", spots.len(), detail_list(&failures)),
    );
}

// Sampled extension of criterion 4 to n = 3 (deterministic stride).
#[test]
fn paired_contributions_sampled_n3() {
    let field = f3();
    let check = verify::pair_contribution_sampled(&field, 3, 7).unwrap();
    assert!(check.ok(), "sampled paired contributions diverge: {:?}", check.failures);
    assert!(check.sequences >= 300);
}

// The rejected census sequences must carry zero paired contribution; the
// census totals must account for every sequence.
#[test]
fn census_rejections_account_for_all_sequences() {
    let field = f3();
    for (n, m) in [(2usize, 1usize), (3, 1)] {
        for h in 0..=(2 * n) {
            let check = verify::census_check(&field, n, m, h, 2).unwrap();
            let kept: BigUint = check.cells.iter().map(|c| c.enumerated.clone()).sum();
            let total = BigUint::from(field.q()).pow((2 * n + 1 - h) as u32);
            assert_eq!(kept + &check.rejected, total, "n={n} m={m} h={h}");
            if h == 0 {
                assert!(!check.rejected.is_zero());
            }
        }
    }
}

fn detail_list(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!("; failures: {}", failures.join(" | "))
    }
}
