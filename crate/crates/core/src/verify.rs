//! Closed forms against their enumeration oracles, at desk scale.
//!
//! Each function here runs one family of comparisons over an exhaustive
//! parameter grid and reports structured rows; nothing is sampled unless
//! stated, nothing is compared with a tolerance, and the two sides of every
//! comparison are computed along independent code paths.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

use crate::charsum::{
    census_closed, census_enumerate, enumerate_alpha, interval_square_sum_via_characters,
    pair_contribution, pair_contribution_direct, CharSumValue,
};
use crate::field::Field;
use crate::hankel::{
    count_reduced_with_partition, enumerate_hankel, reduce, reduce_with_certificate, CountMode,
    RhoPiPartition,
};
use crate::multiset::{
    closed_hankel, closed_triangular, quadform_values, quadform_values_hankel, BlockMode,
    MultisetFq, QuadMode,
};
use crate::variance::{
    square_sum_brute, variance_brute, variance_closed, ScaledRational,
};
use crate::Error;

/// One grid point of the variance comparison.
#[derive(Clone, Debug)]
pub struct TheoremRow {
    pub n: usize,
    pub m: usize,
    pub h: usize,
    pub gamma: String,
    pub case_label: &'static str,
    pub subcase_label: &'static str,
    pub closed: ScaledRational,
    pub brute: ScaledRational,
    pub matched: bool,
}

/// Brute-force variance against the closed formula for every admissible
/// `(n, m, h)` with `n <= n_max` and every nonzero `gamma`.
pub fn theorem_grid(field: &Field, n_max: usize) -> Result<Vec<TheoremRow>, Error> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        for m in 0..n {
            for h in 0..=(2 * n) {
                let (closed, case) = variance_closed(field, n, m, h)?;
                for gamma in field.nonzero_elements() {
                    let brute = variance_brute(field, n, m, h, gamma)?;
                    let matched = closed == brute && !brute.is_negative();
                    rows.push(TheoremRow {
                        n,
                        m,
                        h,
                        gamma: field.element_string(gamma),
                        case_label: case.case_label,
                        subcase_label: case.subcase_label,
                        closed: closed.clone(),
                        brute,
                        matched,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// One census cell compared across modes.
#[derive(Clone, Debug)]
pub struct CensusCellCheck {
    pub rho2: usize,
    pub rho1: usize,
    pub closed: BigUint,
    pub enumerated: BigUint,
    pub matched: bool,
}

/// One `(n, m, h)` census compared cell by cell, including absent cells.
#[derive(Clone, Debug)]
pub struct CensusCheck {
    pub n: usize,
    pub m: usize,
    pub h: usize,
    pub case_label: &'static str,
    pub subcase_label: &'static str,
    pub cells: Vec<CensusCellCheck>,
    pub rejected: BigUint,
    pub all_match: bool,
}

/// Closed census tables against the brute-force scan for every admissible
/// `(n, m, h)` with `n <= n_max`.
pub fn census_grid(field: &Field, n_max: usize, shards: usize) -> Result<Vec<CensusCheck>, Error> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for m in 0..n {
            for h in 0..=(2 * n) {
                out.push(census_check(field, n, m, h, shards)?);
            }
        }
    }
    Ok(out)
}

/// A single census comparison.
pub fn census_check(
    field: &Field,
    n: usize,
    m: usize,
    h: usize,
    shards: usize,
) -> Result<CensusCheck, Error> {
    let closed = census_closed(field, n, m, h)?;
    let brute = census_enumerate(field, n, m, h, shards)?;
    let mut keys: Vec<(usize, usize)> = closed.cells.keys().copied().collect();
    for key in brute.cells.keys() {
        if !closed.cells.contains_key(key) {
            keys.push(*key);
        }
    }
    keys.sort_unstable();
    let cells: Vec<CensusCellCheck> = keys
        .into_iter()
        .map(|(rho2, rho1)| {
            let c = closed.cells.get(&(rho2, rho1)).cloned().unwrap_or_default();
            let e = brute.cells.get(&(rho2, rho1)).cloned().unwrap_or_default();
            CensusCellCheck { rho2, rho1, matched: c == e, closed: c, enumerated: e }
        })
        .collect();
    let all_match = cells.iter().all(|c| c.matched);
    Ok(CensusCheck {
        n,
        m,
        h,
        case_label: closed.case_label,
        subcase_label: closed.subcase_label,
        cells,
        rejected: brute.rejected.unwrap_or_default(),
        all_match,
    })
}

/// One grid point of the interval-square-sum identity.
#[derive(Clone, Debug)]
pub struct SquareSumCheck {
    pub n: usize,
    pub m: usize,
    pub h: usize,
    pub gamma: String,
    pub brute: BigUint,
    pub via_characters: BigUint,
    pub matched: bool,
}

/// The raw square sum by polynomial enumeration against the census route,
/// for every admissible `(n, m, h)` with `n <= n_max` and every `gamma`
/// (the census route is gamma-free, so this also certifies independence).
pub fn square_sum_grid(field: &Field, n_max: usize) -> Result<Vec<SquareSumCheck>, Error> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        for m in 0..n {
            for h in 0..=(2 * n) {
                let via_characters = interval_square_sum_via_characters(field, n, m, h)?;
                for gamma in field.nonzero_elements() {
                    let brute = square_sum_brute(field, n, m, h, gamma)?;
                    rows.push(SquareSumCheck {
                        n,
                        m,
                        h,
                        gamma: field.element_string(gamma),
                        matched: brute == via_characters,
                        brute,
                        via_characters: via_characters.clone(),
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Summary of the paired-contribution comparison over a full sequence space.
#[derive(Clone, Debug)]
pub struct PairCheck {
    pub n: usize,
    pub sequences: usize,
    /// Sequences whose large matrix fails the pi filter; their contribution
    /// must vanish.
    pub filtered: usize,
    pub failures: Vec<String>,
}

impl PairCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares the closed paired contribution against the direct enumeration
/// for every sequence in `F_q^(2n+1)` (use small `n`; the space has
/// `q^(2n+1)` points).
pub fn pair_contribution_exhaustive(field: &Field, n: usize) -> Result<PairCheck, Error> {
    let mut check = PairCheck { n, sequences: 0, filtered: 0, failures: Vec::new() };
    for alpha in enumerate_alpha(field, 2 * n, 0)? {
        check.sequences += 1;
        let closed = pair_contribution(&alpha);
        let direct = pair_contribution_direct(&alpha);
        if BigInt::from(closed.clone()) != direct {
            check.failures.push(format!(
                "alpha = {}: closed {} != direct {}",
                alpha.entry_string(),
                closed,
                direct
            ));
        }
        let (_, pi) = alpha.hankel(n + 1).strict_rho_pi();
        if pi >= 2 {
            check.filtered += 1;
            if !closed.is_zero() {
                check.failures.push(format!(
                    "alpha = {}: pi = {} but contribution {} != 0",
                    alpha.entry_string(),
                    pi,
                    closed
                ));
            }
        }
    }
    Ok(check)
}

/// Deterministically strided sample of the same comparison for larger `n`.
pub fn pair_contribution_sampled(
    field: &Field,
    n: usize,
    stride: usize,
) -> Result<PairCheck, Error> {
    let mut check = PairCheck { n, sequences: 0, filtered: 0, failures: Vec::new() };
    for (i, alpha) in enumerate_alpha(field, 2 * n, 0)?.enumerate() {
        if i % stride.max(1) != 0 {
            continue;
        }
        check.sequences += 1;
        let closed = pair_contribution(&alpha);
        let direct = pair_contribution_direct(&alpha);
        if BigInt::from(closed) != direct {
            check.failures.push(format!("alpha = {}", alpha.entry_string()));
        }
    }
    Ok(check)
}

/// Summary of the reduction suite.
#[derive(Clone, Debug)]
pub struct ReductionCheck {
    pub sizes: Vec<usize>,
    pub matrices: usize,
    pub failures: Vec<String>,
}

impl ReductionCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every square Hankel matrix up to `n_max`: the recorded operations
/// certify the congruence, rank and the strict characteristic survive, the
/// leading-block commutation holds, and all three quadratic-form value
/// multisets are invariant under reduction.
pub fn reduction_suite(field: &Field, n_max: usize) -> Result<ReductionCheck, Error> {
    let mut check =
        ReductionCheck { sizes: (1..=n_max).collect(), matrices: 0, failures: Vec::new() };
    for n in 1..=n_max {
        for h in enumerate_hankel(field, n, 0, None)? {
            check.matrices += 1;
            let mut fail = |msg: String| check.failures.push(format!("{:?}: {}", h, msg));
            let (form, ops) = reduce_with_certificate(&h);
            let rendered = form.render();
            if !ops.is_invertible() {
                fail("operation matrix is singular".into());
            }
            if ops.matmul(&h.to_dense()).matmul(&ops.transpose()) != rendered {
                fail("congruence certificate fails".into());
            }
            if rendered.rank() != h.rank() {
                fail("rank not preserved".into());
            }
            let p = form.partition();
            let (rho, pi) = h.strict_rho_pi();
            if p.n() != n || p.rho() != rho || p.pi() != pi {
                fail(format!("partition {:?} inconsistent with ({rho}, {pi})", p));
            }
            for i in 1..=n {
                let inner = reduce(&h.leading(i, i)?).render();
                let agree = (0..i)
                    .all(|a| (0..i).all(|b| inner.entry(a, b) == rendered.entry(a, b)));
                if !agree {
                    fail(format!("leading-block commutation fails at {i}"));
                }
            }
            let dense = h.to_dense();
            for mode in [QuadMode::Full, QuadMode::Monic, QuadMode::LastNonzeroOne] {
                if quadform_values(&dense, mode) != quadform_values(&rendered, mode) {
                    fail(format!("{mode:?} value multiset changes under reduction"));
                }
            }
        }
    }
    Ok(check)
}

/// Summary of the counting-lemma suite.
#[derive(Clone, Debug)]
pub struct CountingCheck {
    pub sizes: Vec<usize>,
    pub fibers: usize,
    pub partitions: usize,
    pub failures: Vec<String>,
}

impl CountingCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every size up to `n_max`: group all Hankel matrices by reduced form
/// and check each fiber has the closed size, that the distinct reduced forms
/// per partition match the closed and enumerated counts, and that the fiber
/// sizes reassemble the whole sequence space.
pub fn counting_suite(field: &Field, n_max: usize) -> Result<CountingCheck, Error> {
    let q = BigUint::from(field.q());
    let mut check = CountingCheck {
        sizes: (1..=n_max).collect(),
        fibers: 0,
        partitions: 0,
        failures: Vec::new(),
    };
    for n in 1..=n_max {
        let mut fibers: HashMap<Vec<u64>, (BigUint, RhoPiPartition)> = HashMap::new();
        for h in enumerate_hankel(field, n, 0, None)? {
            let form = reduce(&h);
            let key = form.render().entry_indices();
            let entry =
                fibers.entry(key).or_insert_with(|| (BigUint::ZERO, form.partition()));
            entry.0 += BigUint::one();
        }
        check.fibers += fibers.len();
        let mut total = BigUint::ZERO;
        let mut distinct_per_partition: BTreeMap<RhoPiPartition, BigUint> = BTreeMap::new();
        for (size, p) in fibers.values() {
            let closed_fiber = q.pow((p.subscript_t() - 1) as u32);
            if *size != closed_fiber {
                check
                    .failures
                    .push(format!("n={n} {:?}: fiber {} != {}", p, size, closed_fiber));
            }
            total += size;
            *distinct_per_partition.entry(p.clone()).or_default() += BigUint::one();
        }
        if total != q.pow(2 * n as u32 - 1) {
            check.failures.push(format!("n={n}: fibers cover {total} sequences"));
        }
        check.partitions += distinct_per_partition.len();
        let mut reassembled = BigUint::ZERO;
        for (p, seen) in &distinct_per_partition {
            let closed = count_reduced_with_partition(p, field, CountMode::Closed)?;
            let enumerated = count_reduced_with_partition(p, field, CountMode::Enumerate)?;
            if *seen != closed || *seen != enumerated {
                check.failures.push(format!(
                    "n={n} {:?}: distinct {} closed {} enumerated {}",
                    p, seen, closed, enumerated
                ));
            }
            reassembled += closed * q.pow((p.subscript_t() - 1) as u32);
        }
        if reassembled != q.pow(2 * n as u32 - 1) {
            check
                .failures
                .push(format!("n={n}: partition counts reassemble {reassembled}"));
        }
    }
    Ok(check)
}

/// Summary of the multiset closed-form suite.
#[derive(Clone, Debug)]
pub struct MultisetCheck {
    pub hankel_checked: usize,
    pub triangular_checked: usize,
    pub failures: Vec<String>,
}

impl MultisetCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Closed value multisets against full enumeration: per Hankel matrix up to
/// `n_max` (pinned-last range), and per triangular block shape up to
/// `l_max` for every skew-diagonal value and every belly (both ranges).
pub fn multiset_closed_suite(
    field: &Field,
    n_max: usize,
    l_max: usize,
) -> Result<MultisetCheck, Error> {
    let mut check = MultisetCheck { hankel_checked: 0, triangular_checked: 0, failures: Vec::new() };
    for n in 1..=n_max {
        for h in enumerate_hankel(field, n, 0, None)? {
            check.hankel_checked += 1;
            if closed_hankel(&h) != quadform_values_hankel(&h, QuadMode::Monic) {
                check.failures.push(format!("{:?}: closed pinned-last multiset differs", h));
            }
        }
    }
    let q = field.q();
    for l in 1..=l_max {
        for lambda in field.nonzero_elements() {
            let full = closed_triangular(field, l, lambda, BlockMode::Full);
            let monic = closed_triangular(field, l, lambda, BlockMode::Monic);
            for belly_idx in 0..q.pow(l as u32 - 1) {
                check.triangular_checked += 1;
                let mut rest = belly_idx;
                let mut belly = Vec::with_capacity(l - 1);
                for _ in 1..l {
                    belly.push(field.element(rest % q));
                    rest /= q;
                }
                let block = crate::hankel::TriangularBlock::new(l, lambda, belly);
                let dense = block.to_hankel(field).to_dense();
                if quadform_values(&dense, QuadMode::Full) != full {
                    check.failures.push(format!(
                        "block l={l} lambda={}: full range differs",
                        field.element_string(lambda)
                    ));
                }
                if quadform_values(&dense, QuadMode::Monic) != monic {
                    check.failures.push(format!(
                        "block l={l} lambda={}: pinned-last range differs",
                        field.element_string(lambda)
                    ));
                }
            }
        }
    }
    Ok(check)
}

/// A named spot identity.
#[derive(Clone, Debug)]
pub struct SpotCheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Known exact values: the character sum over the product distribution, the
/// opposite-squares sumset identity, the trivial census cell, and the four
/// smoothed square-sum powers.
pub fn spot_checks(field: &Field) -> Result<Vec<SpotCheck>, Error> {
    let q = field.q();
    let mut out = Vec::new();

    let t_sum = CharSumValue::of_multiset(&MultisetFq::pair_products(field)).to_integer();
    out.push(SpotCheck {
        name: "char sum over product distribution equals q".into(),
        ok: t_sum == Some(BigInt::from(q)),
        detail: format!("got {:?}", t_sum),
    });

    let opposite = field.nonzero_elements().all(|mu| {
        let plus = MultisetFq::scaled_squares(field, mu);
        let minus = MultisetFq::scaled_squares(field, field.neg(mu));
        plus.sumset(&minus).expect("same field") == MultisetFq::pair_products(field)
    });
    out.push(SpotCheck {
        name: "opposite scaled squares convolve to the product distribution".into(),
        ok: opposite,
        detail: String::new(),
    });

    let mut trivial_cell_ok = true;
    let mut detail = String::new();
    for n in 1..=3usize {
        for m in 0..n {
            for h in 0..=(2 * n) {
                let census = census_closed(field, n, m, h)?;
                if census.cells.get(&(0, 0)) != Some(&BigUint::from(q)) {
                    trivial_cell_ok = false;
                    detail = format!("n={n} m={m} h={h}");
                }
            }
        }
    }
    out.push(SpotCheck {
        name: "every census table has q sequences in its trivial cell".into(),
        ok: trivial_cell_ok,
        detail,
    });

    let gamma = field.one();
    let pow = |e: usize| BigUint::from(q).pow(e as u32);
    let spots: [(&str, usize, usize, usize, BigUint); 4] = [
        ("square sum q^(2m+2h) in the fully smoothed range", 2, 1, 2, pow(2 + 4)),
        ("square sum q^(n+2m+h) in the long-interval range", 3, 1, 2, pow(3 + 2 + 2)),
        ("square sum q^(n+2h) in the middle range", 3, 1, 1, pow(3 + 2)),
        ("square sum q^(n+m+h) in the short-interval range", 3, 1, 0, pow(3 + 1)),
    ];
    for (name, n, m, h, expected) in spots {
        let brute = square_sum_brute(field, n, m, h, gamma)?;
        out.push(SpotCheck {
            name: name.into(),
            ok: brute == expected,
            detail: format!("brute {brute}, expected {expected}"),
        });
    }
    Ok(out)
}

/// Everything above in one report; the single entry point behind the
/// `verify-all` command.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub theorem: Vec<TheoremRow>,
    pub census: Vec<CensusCheck>,
    pub square_sum: Vec<SquareSumCheck>,
    pub pair: PairCheck,
    pub reduction: ReductionCheck,
    pub counting: CountingCheck,
    pub multisets: MultisetCheck,
    pub spots: Vec<SpotCheck>,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.theorem.iter().all(|r| r.matched)
            && self.census.iter().all(|c| c.all_match)
            && self.square_sum.iter().all(|r| r.matched)
            && self.pair.ok()
            && self.reduction.ok()
            && self.counting.ok()
            && self.multisets.ok()
            && self.spots.iter().all(|s| s.ok)
    }
}

/// Largest matrix size whose exhaustive reduction scan stays desk-scale for
/// this field.
pub fn default_exhaustive_size(field: &Field) -> usize {
    match field.q() {
        0..=3 => 4,
        4..=5 => 3,
        _ => 2,
    }
}

/// Runs the full battery: grid comparisons up to `n_max`, exhaustive
/// structural suites up to a size budgeted by the field order.
pub fn verify_all(field: &Field, n_max: usize, shards: usize) -> Result<VerifyReport, Error> {
    let exhaustive = default_exhaustive_size(field);
    Ok(VerifyReport {
        theorem: theorem_grid(field, n_max)?,
        census: census_grid(field, n_max, shards)?,
        square_sum: square_sum_grid(field, n_max)?,
        pair: pair_contribution_exhaustive(field, 2.min(n_max.max(1)))?,
        reduction: reduction_suite(field, exhaustive)?,
        counting: counting_suite(field, exhaustive)?,
        multisets: multiset_closed_suite(field, exhaustive.min(3), 4)?,
        spots: spot_checks(field)?,
    })
}
