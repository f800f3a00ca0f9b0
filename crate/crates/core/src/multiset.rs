//! Multisets over `F_q` as exact multiplicity vectors, the sumset
//! (convolution) calculus on them, and the value distributions of quadratic
//! forms `v^T M v` together with their closed forms for reduced matrices.
//!
//! Multiplicities are arbitrary-precision: the zero block of a reduced form
//! contributes `q^size` copies of zero, which outgrows 64 bits quickly.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::field::{Field, FieldElement};
use crate::hankel::{reduce, DenseMatrix, HankelMatrix, ReducedForm};
use crate::Error;

/// A finite multiset of field elements, stored as a length-`q` vector of
/// multiplicities in canonical element order.
#[derive(Clone, PartialEq, Eq)]
pub struct MultisetFq {
    field: Field,
    counts: Vec<BigUint>,
}

impl fmt::Debug for MultisetFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl MultisetFq {
    pub fn empty(field: &Field) -> MultisetFq {
        MultisetFq { field: field.clone(), counts: vec![BigUint::ZERO; field.q() as usize] }
    }

    /// The multiset `[a]` containing one element.
    pub fn singleton(field: &Field, a: FieldElement) -> MultisetFq {
        let mut ms = MultisetFq::empty(field);
        ms.counts[a.index() as usize] = BigUint::one();
        ms
    }

    /// Every element of `F_q` exactly once.
    pub fn uniform(field: &Field) -> MultisetFq {
        MultisetFq { field: field.clone(), counts: vec![BigUint::one(); field.q() as usize] }
    }

    /// The distribution of products `v1 * v2` over all pairs: zero appears
    /// `2q - 1` times and every nonzero element `q - 1` times.
    pub fn pair_products(field: &Field) -> MultisetFq {
        let q = field.q();
        let mut counts = vec![BigUint::from(q - 1); q as usize];
        counts[0] = BigUint::from(2 * q - 1);
        MultisetFq { field: field.clone(), counts }
    }

    /// `n` copies of zero.
    pub fn zeros(field: &Field, n: BigUint) -> MultisetFq {
        let mut ms = MultisetFq::empty(field);
        ms.counts[0] = n;
        ms
    }

    /// The multiset `[lambda * a^2 : a in F_q]`.
    pub fn scaled_squares(field: &Field, lambda: FieldElement) -> MultisetFq {
        let mut ms = MultisetFq::empty(field);
        for a in field.elements() {
            let v = field.mul(lambda, field.mul(a, a));
            ms.counts[v.index() as usize] += BigUint::one();
        }
        ms
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn count_of(&self, a: FieldElement) -> &BigUint {
        &self.counts[a.index() as usize]
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Total multiplicity.
    pub fn mass(&self) -> BigUint {
        self.counts.iter().sum()
    }

    fn check_field(&self, other: &MultisetFq) -> Result<(), Error> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Multiset union: multiplicities add pointwise.
    pub fn union(&self, other: &MultisetFq) -> Result<MultisetFq, Error> {
        self.check_field(other)?;
        let counts =
            self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect();
        Ok(MultisetFq { field: self.field.clone(), counts })
    }

    /// Sumset `[a + b : a in self, b in other]`: the additive convolution of
    /// multiplicity vectors, so the mass multiplies.
    pub fn sumset(&self, other: &MultisetFq) -> Result<MultisetFq, Error> {
        self.check_field(other)?;
        let f = &self.field;
        let mut out = MultisetFq::empty(f);
        for a in f.elements() {
            let ca = &self.counts[a.index() as usize];
            if ca.is_zero() {
                continue;
            }
            for b in f.elements() {
                let cb = &other.counts[b.index() as usize];
                if cb.is_zero() {
                    continue;
                }
                let c = f.add(a, b);
                out.counts[c.index() as usize] += ca * cb;
            }
        }
        Ok(out)
    }

    /// `n`-fold sumset, with the empty sum equal to `[0]`.
    pub fn nfold(&self, n: usize) -> MultisetFq {
        let mut acc = MultisetFq::singleton(&self.field, self.field.zero());
        for _ in 0..n {
            acc = acc.sumset(self).expect("same field");
        }
        acc
    }
}

/// Which vectors range over the quadratic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadMode {
    /// All of `F_q^n`.
    Full,
    /// `F_q^{n-1} x {1}`: last coordinate pinned to one.
    Monic,
    /// Vectors whose last nonzero coordinate is one.
    LastNonzeroOne,
}

fn leading_principal(m: &DenseMatrix, size: usize) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(m.field(), size, size);
    for i in 0..size {
        for j in 0..size {
            out.set(i, j, m.entry(i, j));
        }
    }
    out
}

fn quadform_eval(m: &DenseMatrix, v: &[FieldElement]) -> FieldElement {
    let f = m.field();
    let mut acc = f.zero();
    for (i, &vi) in v.iter().enumerate() {
        if vi == f.zero() {
            continue;
        }
        let mut row = f.zero();
        for (j, &vj) in v.iter().enumerate() {
            row = f.add(row, f.mul(m.entry(i, j), vj));
        }
        acc = f.add(acc, f.mul(vi, row));
    }
    acc
}

fn quadform_fixed_last(m: &DenseMatrix, last: Option<FieldElement>) -> MultisetFq {
    let f = m.field().clone();
    let n = m.rows();
    let free = if last.is_some() { n - 1 } else { n };
    let q = f.q();
    let mut out = MultisetFq::empty(&f);
    let total = q.pow(free as u32);
    let mut v = vec![f.zero(); n];
    for idx in 0..total {
        let mut rest = idx;
        for slot in v.iter_mut().take(free) {
            *slot = f.element(rest % q);
            rest /= q;
        }
        if let Some(last) = last {
            v[n - 1] = last;
        }
        let value = quadform_eval(m, &v);
        out.counts[value.index() as usize] += BigUint::one();
    }
    out
}

/// The multiset of values `v^T M v` for square `M`, with `v` ranging per
/// `mode`. The last-nonzero-one range is assembled as the union of the
/// pinned-last ranges of the leading principal blocks.
pub fn quadform_values(m: &DenseMatrix, mode: QuadMode) -> MultisetFq {
    assert_eq!(m.rows(), m.cols(), "quadratic forms need square matrices");
    let f = m.field().clone();
    match mode {
        QuadMode::Full => quadform_fixed_last(m, None),
        QuadMode::Monic => quadform_fixed_last(m, Some(f.one())),
        QuadMode::LastNonzeroOne => {
            let mut acc = MultisetFq::empty(&f);
            for i in 1..=m.rows() {
                let block = leading_principal(m, i);
                let part = quadform_fixed_last(&block, Some(f.one()));
                acc = acc.union(&part).expect("same field");
            }
            acc
        }
    }
}

/// Convenience wrapper for Hankel matrices.
pub fn quadform_values_hankel(h: &HankelMatrix, mode: QuadMode) -> MultisetFq {
    quadform_values(&h.to_dense(), mode)
}

/// Vector range for the triangular-block closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMode {
    Full,
    Monic,
}

/// Closed form for the value multiset of an `l x l` lower skew-triangular
/// Hankel block with skew diagonal `lambda != 0`. The result does not depend
/// on the entries below the skew diagonal.
pub fn closed_triangular(
    field: &Field,
    l: usize,
    lambda: FieldElement,
    mode: BlockMode,
) -> MultisetFq {
    assert!(l >= 1);
    assert!(lambda != field.zero(), "skew diagonal must be nonzero");
    let t = MultisetFq::pair_products(field);
    match mode {
        BlockMode::Full => {
            if l.is_multiple_of(2) {
                t.nfold(l / 2)
            } else {
                t.nfold((l - 1) / 2)
                    .sumset(&MultisetFq::scaled_squares(field, lambda))
                    .expect("same field")
            }
        }
        BlockMode::Monic => {
            if l == 1 {
                MultisetFq::singleton(field, lambda)
            } else if l.is_multiple_of(2) {
                MultisetFq::uniform(field).sumset(&t.nfold((l - 2) / 2)).expect("same field")
            } else {
                MultisetFq::uniform(field)
                    .sumset(&t.nfold((l - 3) / 2))
                    .expect("same field")
                    .sumset(&MultisetFq::scaled_squares(field, lambda))
                    .expect("same field")
            }
        }
    }
}

/// Closed form for the pinned-last value multiset of a reduced form: the
/// sumset of the full-range closed forms of the triangular blocks with the
/// contribution of the zero block and the final block.
pub fn closed_reduced(form: &ReducedForm) -> MultisetFq {
    let f = form.field();
    let q = BigUint::from(f.q());
    let mut acc = MultisetFq::singleton(f, f.zero());
    for block in form.blocks() {
        let part = closed_triangular(f, block.size(), block.lambda(), BlockMode::Full);
        acc = acc.sumset(&part).expect("same field");
    }
    let final_part = match form.final_block() {
        None => {
            debug_assert!(form.zero_size() >= 1, "reduced form has an empty corner");
            MultisetFq::zeros(f, q.pow(form.zero_size() as u32 - 1))
        }
        Some(block) => {
            let zeros = MultisetFq::zeros(f, q.pow(form.zero_size() as u32));
            let monic = closed_triangular(f, block.size(), block.lambda(), BlockMode::Monic);
            zeros.sumset(&monic).expect("same field")
        }
    };
    acc.sumset(&final_part).expect("same field")
}

/// Closed form for the pinned-last value multiset of a square Hankel matrix,
/// computed through its reduced form.
pub fn closed_hankel(h: &HankelMatrix) -> MultisetFq {
    closed_reduced(&reduce(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::enumerate_hankel;
    use proptest::prelude::*;

    fn f3() -> Field {
        Field::prime(3).unwrap()
    }

    fn counts(ms: &MultisetFq) -> Vec<u64> {
        ms.counts().iter().map(|c| u64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn named_multisets() {
        let f = f3();
        assert_eq!(counts(&MultisetFq::pair_products(&f)), vec![5, 2, 2]);
        assert_eq!(counts(&MultisetFq::scaled_squares(&f, f.one())), vec![1, 2, 0]);
        assert_eq!(counts(&MultisetFq::zeros(&f, 4u32.into())), vec![4, 0, 0]);
        assert_eq!(counts(&MultisetFq::uniform(&f)), vec![1, 1, 1]);
    }

    #[test]
    fn union_examples() {
        let f = f3();
        let fq = MultisetFq::uniform(&f);
        let twice = fq.union(&fq).unwrap();
        assert_eq!(counts(&twice), vec![2, 2, 2]);
        assert_eq!(fq.union(&MultisetFq::empty(&f)).unwrap(), fq);
        let t = MultisetFq::pair_products(&f);
        let z1 = MultisetFq::zeros(&f, 1u32.into());
        assert_eq!(counts(&t.union(&z1).unwrap()), vec![6, 2, 2]);
        let f5 = Field::prime(5).unwrap();
        assert_eq!(fq.union(&MultisetFq::uniform(&f5)), Err(Error::FieldMismatch));
    }

    #[test]
    fn sumset_examples() {
        let f = f3();
        let t = MultisetFq::pair_products(&f);
        let zero = MultisetFq::singleton(&f, f.zero());
        assert_eq!(t.sumset(&zero).unwrap(), t);
        // squares of opposite signs convolve to the product distribution
        let plus = MultisetFq::scaled_squares(&f, f.one());
        let minus = MultisetFq::scaled_squares(&f, f.element(2));
        assert_eq!(plus.sumset(&minus).unwrap(), t);
        let fq = MultisetFq::uniform(&f);
        assert_eq!(counts(&fq.sumset(&fq).unwrap()), vec![3, 3, 3]);
    }

    #[test]
    fn nfold_examples() {
        let f = f3();
        let t = MultisetFq::pair_products(&f);
        assert_eq!(t.nfold(0), MultisetFq::singleton(&f, f.zero()));
        assert_eq!(t.nfold(1), t);
        assert_eq!(t.nfold(2).mass(), 81u32.into());
    }

    #[test]
    fn opposite_squares_cover_products_in_all_small_fields() {
        for field in [Field::prime(3).unwrap(), Field::prime(5).unwrap(), Field::prime(7).unwrap()]
        {
            for mu in field.nonzero_elements() {
                let plus = MultisetFq::scaled_squares(&field, mu);
                let minus = MultisetFq::scaled_squares(&field, field.neg(mu));
                assert_eq!(plus.sumset(&minus).unwrap(), MultisetFq::pair_products(&field));
            }
        }
    }

    #[test]
    fn quadform_examples() {
        let f = f3();
        let zero2 = DenseMatrix::zeros(&f, 2, 2);
        assert_eq!(counts(&quadform_values(&zero2, QuadMode::Monic)), vec![3, 0, 0]);
        // [[0, l], [l, b]] pinned-last sweeps F_q exactly once
        for lambda in f.nonzero_elements() {
            for beta in f.elements() {
                let mut m = DenseMatrix::zeros(&f, 2, 2);
                m.set(0, 1, lambda);
                m.set(1, 0, lambda);
                m.set(1, 1, beta);
                assert_eq!(quadform_values(&m, QuadMode::Monic), MultisetFq::uniform(&f));
            }
        }
    }

    #[test]
    fn quadform_masses() {
        let f = f3();
        for h in enumerate_hankel(&f, 3, 2, None).unwrap() {
            let d = h.to_dense();
            assert_eq!(quadform_values(&d, QuadMode::Full).mass(), 27u32.into());
            assert_eq!(quadform_values(&d, QuadMode::Monic).mass(), 9u32.into());
            assert_eq!(quadform_values(&d, QuadMode::LastNonzeroOne).mass(), 13u32.into());
        }
    }

    // the last-nonzero-one range built from leading blocks agrees with the
    // direct definition
    #[test]
    fn last_nonzero_one_matches_direct_enumeration() {
        let f = f3();
        for h in enumerate_hankel(&f, 3, 0, None).unwrap() {
            let d = h.to_dense();
            let via_blocks = quadform_values(&d, QuadMode::LastNonzeroOne);
            let mut direct = MultisetFq::empty(&f);
            let q = f.q();
            for idx in 0..q.pow(3) {
                let mut v = vec![f.zero(); 3];
                let mut rest = idx;
                for slot in v.iter_mut() {
                    *slot = f.element(rest % q);
                    rest /= q;
                }
                let last_nonzero = v.iter().rev().find(|&&c| c != f.zero());
                if last_nonzero != Some(&f.one()) {
                    continue;
                }
                let value = super::quadform_eval(&d, &v);
                direct = direct.union(&MultisetFq::singleton(&f, value)).unwrap();
            }
            assert_eq!(via_blocks, direct, "mismatch for {:?}", h);
        }
    }

    #[test]
    fn closed_triangular_examples() {
        let f = f3();
        for lambda in f.nonzero_elements() {
            assert_eq!(
                closed_triangular(&f, 1, lambda, BlockMode::Monic),
                MultisetFq::singleton(&f, lambda)
            );
            assert_eq!(
                closed_triangular(&f, 2, lambda, BlockMode::Full),
                MultisetFq::pair_products(&f)
            );
        }
        let expected = MultisetFq::pair_products(&f)
            .sumset(&MultisetFq::scaled_squares(&f, f.one()))
            .unwrap();
        assert_eq!(closed_triangular(&f, 3, f.one(), BlockMode::Full), expected);
        assert_eq!(expected.mass(), 27u32.into());
    }

    #[test]
    fn closed_triangular_matches_enumeration() {
        for field in [Field::prime(3).unwrap(), Field::prime(5).unwrap()] {
            let q = field.q();
            for l in 1..=4usize {
                for lambda in field.nonzero_elements() {
                    let full = closed_triangular(&field, l, lambda, BlockMode::Full);
                    let monic = closed_triangular(&field, l, lambda, BlockMode::Monic);
                    // the closed forms are independent of the belly entries
                    for belly_idx in 0..q.pow(l as u32 - 1) {
                        let mut rest = belly_idx;
                        let mut belly = Vec::with_capacity(l - 1);
                        for _ in 1..l {
                            belly.push(field.element(rest % q));
                            rest /= q;
                        }
                        let block = crate::hankel::TriangularBlock::new(l, lambda, belly);
                        let d = block.to_hankel(&field).to_dense();
                        assert_eq!(quadform_values(&d, QuadMode::Full), full);
                        assert_eq!(quadform_values(&d, QuadMode::Monic), monic);
                    }
                }
            }
        }
    }

    #[test]
    fn closed_hankel_examples() {
        let f = f3();
        // zero matrix: all mass on zero
        let zero = HankelMatrix::square_from_seq(&f, vec![f.zero(); 5]).unwrap();
        assert_eq!(closed_hankel(&zero), MultisetFq::zeros(&f, 9u32.into()));
        let h = HankelMatrix::square_from_seq(
            &f,
            vec![f.one(), f.zero(), f.zero(), f.zero(), f.one()],
        )
        .unwrap();
        assert_eq!(closed_hankel(&h), quadform_values_hankel(&h, QuadMode::Monic));
    }

    #[test]
    fn closed_hankel_matches_enumeration_n3_q3() {
        let f = f3();
        for h in enumerate_hankel(&f, 3, 0, None).unwrap() {
            assert_eq!(
                closed_hankel(&h),
                quadform_values_hankel(&h, QuadMode::Monic),
                "closed form mismatch for {:?}",
                h
            );
        }
    }

    #[test]
    fn large_final_block_covers_every_value() {
        let f = f3();
        for h in enumerate_hankel(&f, 3, 0, None).unwrap() {
            if reduce(&h).partition().pi() >= 2 {
                let values = closed_hankel(&h);
                assert!(values.counts().iter().all(|c| !c.is_zero()));
            }
        }
    }

    #[test]
    fn reduction_preserves_value_multisets_n3() {
        let f = f3();
        for h in enumerate_hankel(&f, 3, 1, None).unwrap() {
            let d = h.to_dense();
            let r = reduce(&h).render();
            for mode in [QuadMode::Full, QuadMode::Monic, QuadMode::LastNonzeroOne] {
                assert_eq!(quadform_values(&d, mode), quadform_values(&r, mode));
            }
        }
    }

    // deterministic stride sample of the same invariance over F_5
    #[test]
    fn reduction_preserves_value_multisets_sampled_q5() {
        let f = Field::prime(5).unwrap();
        for (i, h) in enumerate_hankel(&f, 3, 0, None).unwrap().enumerate() {
            if i % 13 != 0 {
                continue;
            }
            let d = h.to_dense();
            let r = reduce(&h).render();
            for mode in [QuadMode::Full, QuadMode::Monic, QuadMode::LastNonzeroOne] {
                assert_eq!(quadform_values(&d, mode), quadform_values(&r, mode));
            }
        }
    }

    fn arb_multiset(field: Field) -> impl Strategy<Value = MultisetFq> {
        let q = field.q() as usize;
        proptest::collection::vec(0u64..50, q).prop_map(move |v| {
            let mut ms = MultisetFq::empty(&field);
            for (i, c) in v.into_iter().enumerate() {
                ms.counts[i] = c.into();
            }
            ms
        })
    }

    proptest! {
        #[test]
        fn sumset_commutes_and_associates(
            a in arb_multiset(Field::prime(5).unwrap()),
            b in arb_multiset(Field::prime(5).unwrap()),
            c in arb_multiset(Field::prime(5).unwrap()),
        ) {
            prop_assert_eq!(a.sumset(&b).unwrap(), b.sumset(&a).unwrap());
            prop_assert_eq!(
                a.sumset(&b).unwrap().sumset(&c).unwrap(),
                a.sumset(&b.sumset(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.sumset(&b).unwrap().mass(), a.mass() * b.mass());
        }
    }
}
