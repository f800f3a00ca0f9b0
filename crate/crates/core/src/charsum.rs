//! Additive character sums evaluated exactly in `Z[zeta_p]`, the paired
//! contribution of a sequence and its negation, and the census of sequences
//! by the strict characteristics of their two nested square Hankel matrices.
//!
//! The character is fixed as `psi(a) = zeta_p^(Tr a)`; every verified
//! identity is independent of which non-trivial character is chosen. A sum
//! of character values is stored as a length-`p` vector of multiplicities by
//! trace residue. Two vectors represent the same complex number exactly when
//! they differ by a constant shift, so the canonical form subtracts the
//! minimum entry.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::field::{Field, FieldElement};
use crate::hankel::{reduce, CountMode, HankelMatrix};
use crate::multiset::{closed_reduced, quadform_values_hankel, MultisetFq, QuadMode};
use crate::Error;

/// An element of `Z[zeta_p]` arising as a sum of character values, stored as
/// multiplicities per trace residue and kept canonical (minimum entry zero).
#[derive(Clone, PartialEq, Eq)]
pub struct CharSumValue {
    p: u64,
    counts: Vec<BigUint>,
}

impl fmt::Debug for CharSumValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "zeta{}[{}]", self.p, parts.join(","))
    }
}

impl CharSumValue {
    fn canonicalize(mut self) -> CharSumValue {
        let min = self.counts.iter().min().cloned().unwrap_or_default();
        if !min.is_zero() {
            for c in self.counts.iter_mut() {
                *c -= &min;
            }
        }
        self
    }

    /// The multiplicative identity (the sum over the multiset `[0]`).
    pub fn one(p: u64) -> CharSumValue {
        CharSumValue::from_count(p, BigUint::one())
    }

    /// The rational integer `n >= 0` as a character sum.
    pub fn from_count(p: u64, n: BigUint) -> CharSumValue {
        let mut counts = vec![BigUint::ZERO; p as usize];
        counts[0] = n;
        CharSumValue { p, counts }
    }

    /// Sums `psi(a)` over the multiset `A` with multiplicity:
    /// residue `r` accumulates the mass of elements with trace `r`.
    pub fn of_multiset(a: &MultisetFq) -> CharSumValue {
        let f = a.field();
        let mut counts = vec![BigUint::ZERO; f.p() as usize];
        for e in f.elements() {
            let c = a.count_of(e);
            if !c.is_zero() {
                counts[f.trace(e) as usize] += c;
            }
        }
        CharSumValue { p: f.p(), counts }.canonicalize()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Canonical residue counts (minimum entry is zero).
    pub fn residue_counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Cyclotomic product: cyclic convolution of residue vectors mod `p`.
    /// Turns sumsets into products: the sum over `A + B` is the product of
    /// the sums over `A` and over `B`.
    pub fn mul(&self, other: &CharSumValue) -> CharSumValue {
        assert_eq!(self.p, other.p, "character sums over different characteristics");
        let p = self.p as usize;
        let mut counts = vec![BigUint::ZERO; p];
        for (i, a) in self.counts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.counts.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                counts[(i + j) % p] += a * b;
            }
        }
        CharSumValue { p: self.p, counts }.canonicalize()
    }

    /// True iff this value lies in `Z`: all residues other than zero carry
    /// equal weight (in canonical form, supported on residue zero when the
    /// integer is non-negative).
    pub fn is_rational_integer(&self) -> bool {
        self.counts[1..].windows(2).all(|w| w[0] == w[1])
    }

    /// The rational integer this value represents, if any.
    pub fn to_integer(&self) -> Option<BigInt> {
        if !self.is_rational_integer() {
            return None;
        }
        let off = self.counts.get(1).cloned().unwrap_or_default();
        Some(BigInt::from(self.counts[0].clone()) - BigInt::from(off))
    }
}

/// A coefficient sequence `alpha_0, ..., alpha_k` over `F_q`; the sequences
/// with `h` leading zeros index Hankel matrices with `h` zero skew diagonals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaSequence {
    field: Field,
    entries: Vec<FieldElement>,
}

impl AlphaSequence {
    pub fn new(field: &Field, entries: Vec<FieldElement>) -> AlphaSequence {
        AlphaSequence { field: field.clone(), entries }
    }

    /// Builds a sequence checked to have its first `h` entries zero.
    pub fn restricted(
        field: &Field,
        entries: Vec<FieldElement>,
        h: usize,
    ) -> Result<AlphaSequence, Error> {
        if entries.len() < h || entries[..h].iter().any(|&e| e != field.zero()) {
            return Err(Error::BadParameters(format!(
                "sequence does not have {h} leading zeros"
            )));
        }
        Ok(AlphaSequence::new(field, entries))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    /// Number of leading zero entries.
    pub fn zero_prefix(&self) -> usize {
        self.entries.iter().take_while(|&&e| e == self.field.zero()).count()
    }

    /// For a sequence of odd length `2n + 1`, the degree parameter `n`.
    pub fn half_degree(&self) -> usize {
        assert!(self.entries.len() % 2 == 1, "sequence length must be odd");
        (self.entries.len() - 1) / 2
    }

    pub fn negated(&self) -> AlphaSequence {
        let entries = self.entries.iter().map(|&e| self.field.neg(e)).collect();
        AlphaSequence { field: self.field.clone(), entries }
    }

    /// The square Hankel matrix on the first `2 * size - 1` entries.
    pub fn hankel(&self, size: usize) -> HankelMatrix {
        assert!(2 * size - 1 <= self.entries.len(), "sequence too short for {size}x{size}");
        HankelMatrix::from_seq(&self.field, self.entries[..2 * size - 1].to_vec(), size, size)
            .expect("length matches")
    }

    pub fn entry_string(&self) -> String {
        self.entries
            .iter()
            .map(|&e| self.field.element_string(e))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// All sequences of length `k + 1` whose first `h` entries vanish, in
/// canonical order.
pub fn enumerate_alpha(
    field: &Field,
    k: usize,
    h: usize,
) -> Result<impl Iterator<Item = AlphaSequence>, Error> {
    if h > k + 1 {
        return Err(Error::BadParameters(format!("zero prefix {h} exceeds length {}", k + 1)));
    }
    let field = field.clone();
    let q = field.q();
    let total = q.pow((k + 1 - h) as u32);
    Ok((0..total).map(move |idx| {
        let mut entries = vec![field.zero(); k + 1];
        let mut rest = idx;
        for slot in entries.iter_mut().skip(h) {
            *slot = field.element(rest % q);
            rest /= q;
        }
        AlphaSequence { field: field.clone(), entries }
    }))
}

fn q_pow(field: &Field, e: usize) -> BigUint {
    BigUint::from(field.q()).pow(e as u32)
}

/// The product of the pinned-last character sums of `H(alpha)` and
/// `H(-alpha)` for the `(n+1) x (n+1)` matrices of a length-`2n+1` sequence,
/// computed exactly through the closed value multisets and the cyclotomic
/// product. The result is always a rational integer: zero when the final
/// block of the reduced form has size at least two, and `q^(2n - rho)`
/// otherwise, where `rho` is the strict rho of `H(alpha)`.
pub fn pair_contribution(alpha: &AlphaSequence) -> BigUint {
    let n = alpha.half_degree();
    let h_pos = alpha.hankel(n + 1);
    let form = reduce(&h_pos);
    let pos = CharSumValue::of_multiset(&closed_reduced(&form));
    let neg = CharSumValue::of_multiset(&closed_reduced(&reduce(&alpha.negated().hankel(n + 1))));
    let value = pos
        .mul(&neg)
        .to_integer()
        .expect("paired character sums are rational integers");
    let value = BigUint::try_from(value).expect("paired character sums are non-negative");
    debug_assert_eq!(value, pair_contribution_formula(alpha));
    value
}

/// The rank formula for the paired contribution: `0` or `q^(2n - rho)`.
pub fn pair_contribution_formula(alpha: &AlphaSequence) -> BigUint {
    let n = alpha.half_degree();
    let field = alpha.field();
    let (rho, pi) = alpha.hankel(n + 1).strict_rho_pi();
    if pi >= 2 {
        BigUint::ZERO
    } else {
        q_pow(field, 2 * n - rho)
    }
}

/// Independent oracle: both factors evaluated by direct enumeration of the
/// `q^n` pinned-last vectors, then multiplied in `Z[zeta_p]`.
pub fn pair_contribution_direct(alpha: &AlphaSequence) -> BigInt {
    let n = alpha.half_degree();
    let pos = CharSumValue::of_multiset(&quadform_values_hankel(
        &alpha.hankel(n + 1),
        QuadMode::Monic,
    ));
    let neg = CharSumValue::of_multiset(&quadform_values_hankel(
        &alpha.negated().hankel(n + 1),
        QuadMode::Monic,
    ));
    pos.mul(&neg).to_integer().expect("paired character sums are rational integers")
}

/// Census cell map: `(rho_small, rho_large) -> count`.
pub type CensusCells = BTreeMap<(usize, usize), BigUint>;

/// A census of restricted sequences binned by the strict rho values of the
/// small and large square Hankel matrices, keeping only sequences whose two
/// strict pi values lie in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub n: usize,
    pub m: usize,
    pub h: usize,
    /// Which `(n, m)` regime applies.
    pub case_label: &'static str,
    /// Which `h` range applies within the regime.
    pub subcase_label: &'static str,
    /// Keys are `(rho2, rho1)`.
    pub cells: CensusCells,
    /// Sequences discarded by the pi filter (enumeration only).
    pub rejected: Option<BigUint>,
}

fn census_labels(n: usize, m: usize, h: usize) -> (&'static str, &'static str) {
    if m >= 1 && n <= 2 * m {
        let case = "m+1<=n<=2m";
        if h >= m {
            (case, "m<=h<=2n")
        } else if h >= 2 * m - n {
            (case, "2m-n<=h<=m-1")
        } else {
            (case, "0<=h<=2m-n-1")
        }
    } else {
        let case = "n>=2m+1";
        if h >= n {
            (case, "n<=h<=2n")
        } else if h >= 2 * m {
            (case, "2m<=h<=n-1")
        } else if h >= m {
            (case, "m<=h<=2m-1")
        } else {
            (case, "0<=h<=m-1")
        }
    }
}

fn census_check_params(n: usize, m: usize, h: usize) -> Result<(), Error> {
    if n == 0 || m > n - 1 || h > 2 * n {
        return Err(Error::BadParameters(format!(
            "census needs n >= 1, 0 <= m <= n-1, 0 <= h <= 2n; got n = {n}, m = {m}, h = {h}"
        )));
    }
    Ok(())
}

/// Census from the closed subcase tables.
pub fn census_closed(field: &Field, n: usize, m: usize, h: usize) -> Result<Census, Error> {
    census_check_params(n, m, h)?;
    let q = field.q();
    let qm1 = BigUint::from(q - 1);
    let pow = |e: usize| q_pow(field, e);
    let (case_label, subcase_label) = census_labels(n, m, h);
    let mut cells = CensusCells::new();
    cells.insert((0, 0), BigUint::from(q));

    if m >= 1 && n <= 2 * m {
        if h < m {
            for rho2 in (h + 1)..=m {
                cells.insert((rho2, rho2), &qm1 * pow(2 * rho2 - h));
            }
            let rho2_lo = if h >= 2 * m - n { h + 1 } else { 2 * m + 1 - n };
            for rho2 in rho2_lo..=m {
                for rho1 in (2 * m + 1 - rho2)..=n {
                    cells.insert(
                        (rho2, rho1),
                        &qm1 * &qm1 * pow(2 * rho1 + 2 * rho2 - 2 * m - h - 1),
                    );
                }
            }
        }
    } else if h < n {
        if h >= 2 * m {
            for rho1 in (h + 1)..=n {
                cells.insert((0, rho1), &qm1 * pow(2 * rho1 - h));
            }
        } else {
            for rho1 in (2 * m + 1)..=n {
                cells.insert((0, rho1), &qm1 * pow(2 * rho1 - 2 * m));
            }
            if h < m {
                for rho2 in (h + 1)..=m {
                    cells.insert((rho2, rho2), &qm1 * pow(2 * rho2 - h));
                }
                for rho2 in (h + 1)..=m {
                    for rho1 in (2 * m + 1 - rho2)..=n {
                        cells.insert(
                            (rho2, rho1),
                            &qm1 * &qm1 * pow(2 * rho1 + 2 * rho2 - 2 * m - h - 1),
                        );
                    }
                }
            }
        }
    }

    Ok(Census { n, m, h, case_label, subcase_label, cells, rejected: None })
}

fn census_scan_range(
    field: &Field,
    n: usize,
    m: usize,
    h: usize,
    lo: u64,
    hi: u64,
) -> (CensusCells, BigUint) {
    let q = field.q();
    let mut cells = CensusCells::new();
    let mut rejected = BigUint::ZERO;
    for idx in lo..hi {
        let mut entries = vec![field.zero(); 2 * n + 1];
        let mut rest = idx;
        for slot in entries.iter_mut().skip(h) {
            *slot = field.element(rest % q);
            rest /= q;
        }
        let alpha = AlphaSequence::new(field, entries);
        let (rho1, pi1) = alpha.hankel(n + 1).strict_rho_pi();
        let (rho2, pi2) = alpha.hankel(m + 1).strict_rho_pi();
        if pi1 <= 1 && pi2 <= 1 {
            *cells.entry((rho2, rho1)).or_default() += BigUint::one();
        } else {
            rejected += BigUint::one();
        }
    }
    (cells, rejected)
}

/// Census by brute-force scan over all `q^(2n+1-h)` restricted sequences,
/// optionally sharded across threads by index range (the merge is a
/// commutative pointwise sum, so the shard count never changes the result).
pub fn census_enumerate(
    field: &Field,
    n: usize,
    m: usize,
    h: usize,
    shards: usize,
) -> Result<Census, Error> {
    census_check_params(n, m, h)?;
    let total = field.q().pow((2 * n + 1 - h) as u32);
    let shards = shards.clamp(1, 64).min(total.max(1) as usize);
    let (case_label, subcase_label) = census_labels(n, m, h);
    let mut cells = CensusCells::new();
    let mut rejected = BigUint::ZERO;
    if shards <= 1 {
        let (c, r) = census_scan_range(field, n, m, h, 0, total);
        cells = c;
        rejected = r;
    } else {
        let chunk = total.div_ceil(shards as u64);
        let parts: Vec<(CensusCells, BigUint)> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..shards)
                    .map(|s| {
                        let lo = s as u64 * chunk;
                        let hi = (lo + chunk).min(total);
                        scope.spawn(move || census_scan_range(field, n, m, h, lo, hi))
                    })
                    .collect();
                handles.into_iter().map(|j| j.join().expect("census shard panicked")).collect()
            });
        for (c, r) in parts {
            for (key, count) in c {
                *cells.entry(key).or_default() += count;
            }
            rejected += r;
        }
    }
    Ok(Census { n, m, h, case_label, subcase_label, cells, rejected: Some(rejected) })
}

/// Census in either mode; enumeration runs single-threaded here.
pub fn census(
    field: &Field,
    n: usize,
    m: usize,
    h: usize,
    mode: CountMode,
) -> Result<Census, Error> {
    match mode {
        CountMode::Closed => census_closed(field, n, m, h),
        CountMode::Enumerate => census_enumerate(field, n, m, h, 1),
    }
}

/// The interval square sum evaluated through the census: the sum over cells
/// of `N(rho2, rho1) * q^(2n + 2m - rho1 - rho2)`, divided exactly by
/// `q^(2n - 2h + 1)` (a multiplication when that exponent is negative).
/// Equals the brute-force sum over centres of the squared interval counts.
pub fn interval_square_sum_via_characters(
    field: &Field,
    n: usize,
    m: usize,
    h: usize,
) -> Result<BigUint, Error> {
    let census = census_closed(field, n, m, h)?;
    let mut sum = BigUint::ZERO;
    for (&(rho2, rho1), count) in &census.cells {
        sum += count * q_pow(field, 2 * n + 2 * m - rho1 - rho2);
    }
    if 2 * n + 1 >= 2 * h {
        let denom = q_pow(field, 2 * n + 1 - 2 * h);
        assert!(
            (&sum % &denom).is_zero(),
            "census total is not divisible by the sequence normalisation"
        );
        Ok(sum / denom)
    } else {
        Ok(sum * q_pow(field, 2 * h - 2 * n - 1))
    }
}
