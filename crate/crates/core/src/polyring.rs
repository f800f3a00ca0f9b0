//! Polynomials over `F_q`: exact ring arithmetic, monic enumeration, and
//! membership in the short interval `I(A; h) = { B : deg(B - A) < h }`.

use std::fmt;

use crate::field::{Field, FieldElement};
use crate::Error;

/// A polynomial over `F_q`, stored as coefficients low-to-high with trailing
/// zeros trimmed. The zero polynomial has an empty coefficient vector and
/// degree `None` (standing in for degree minus infinity).
#[derive(Clone, PartialEq, Eq)]
pub struct FqPoly {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "poly[{}]", self.coeff_string())
    }
}

impl FqPoly {
    pub fn zero(field: &Field) -> FqPoly {
        FqPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn constant(field: &Field, c: FieldElement) -> FqPoly {
        FqPoly::from_coeffs(field, vec![c])
    }

    /// Builds a polynomial from coefficients low-to-high, trimming trailing
    /// zeros.
    pub fn from_coeffs(field: &Field, mut coeffs: Vec<FieldElement>) -> FqPoly {
        while coeffs.last() == Some(&field.zero()) {
            coeffs.pop();
        }
        FqPoly { field: field.clone(), coeffs }
    }

    /// Parses comma-separated coefficients low-to-high, e.g. `2,0,1` for
    /// `T^2 + 2`.
    pub fn parse(field: &Field, text: &str) -> Result<FqPoly, Error> {
        let coeffs = text
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse { what: "polynomial", text: text.to_string() })
                    .and_then(|v| {
                        if v < field.q() {
                            Ok(field.element(v))
                        } else {
                            Err(Error::Parse { what: "polynomial", text: text.to_string() })
                        }
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FqPoly::from_coeffs(field, coeffs))
    }

    /// Comma-separated coefficients low-to-high (`0` for the zero polynomial).
    pub fn coeff_string(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|c| self.field.element_string(*c))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&self.field.one())
    }

    /// The `i`-th coefficient, zero beyond the degree.
    pub fn coefficient(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or_else(|| self.field.zero())
    }

    fn check_field(&self, other: &FqPoly) -> Result<(), Error> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &FqPoly) -> Result<FqPoly, Error> {
        self.check_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coefficient(i), other.coefficient(i))).collect();
        Ok(FqPoly::from_coeffs(f, coeffs))
    }

    pub fn sub(&self, other: &FqPoly) -> Result<FqPoly, Error> {
        self.check_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coefficient(i), other.coefficient(i))).collect();
        Ok(FqPoly::from_coeffs(f, coeffs))
    }

    pub fn mul(&self, other: &FqPoly) -> Result<FqPoly, Error> {
        self.check_field(other)?;
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(FqPoly::zero(f));
        }
        let mut coeffs = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == f.zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Ok(FqPoly::from_coeffs(f, coeffs))
    }

    pub fn square(&self) -> FqPoly {
        self.mul(self).expect("same field")
    }

    /// Multiplies every coefficient by the scalar `c`.
    pub fn scale(&self, c: FieldElement) -> FqPoly {
        let f = &self.field;
        let coeffs = self.coeffs.iter().map(|&a| f.mul(a, c)).collect();
        FqPoly::from_coeffs(f, coeffs)
    }
}

/// True iff `B` lies in the interval of centre `A` and radius `h`, i.e.
/// `deg(B - A) < h`. The zero difference counts as inside for every `h >= 0`.
pub fn in_interval(b: &FqPoly, a: &FqPoly, h: usize) -> Result<bool, Error> {
    let diff = b.sub(a)?;
    Ok(match diff.degree() {
        None => true,
        Some(d) => d < h,
    })
}

/// All `q^h` members of `I(A; h)`, produced by varying the `h` low
/// coefficients of `A`, in canonical order.
pub fn interval(a: &FqPoly, h: usize) -> impl Iterator<Item = FqPoly> {
    let field = a.field().clone();
    let base = a.clone();
    let q = field.q();
    let total = q.pow(h as u32);
    (0..total).map(move |idx| {
        let mut coeffs: Vec<FieldElement> =
            (0..=h.max(base.degree().map_or(0, |d| d))).map(|i| base.coefficient(i)).collect();
        let mut rest = idx;
        for c in coeffs.iter_mut().take(h) {
            *c = field.element(rest % q);
            rest /= q;
        }
        FqPoly::from_coeffs(&field, coeffs)
    })
}

/// All `q^n` monic polynomials of degree `n`, in canonical order (low
/// coefficients vary fastest).
pub fn enumerate_monic(field: &Field, n: usize) -> impl Iterator<Item = FqPoly> {
    let field = field.clone();
    let q = field.q();
    let total = q.pow(n as u32);
    (0..total).map(move |idx| monic_from_index(&field, n, idx))
}

/// The monic degree-`n` polynomial whose low `n` coefficients are the base-`q`
/// digits of `index`. Inverse of [`monic_index`].
pub fn monic_from_index(field: &Field, n: usize, index: u64) -> FqPoly {
    let q = field.q();
    debug_assert!(index < q.pow(n as u32));
    let mut coeffs = vec![field.zero(); n + 1];
    let mut rest = index;
    for c in coeffs.iter_mut().take(n) {
        *c = field.element(rest % q);
        rest /= q;
    }
    coeffs[n] = field.one();
    FqPoly::from_coeffs(field, coeffs)
}

/// Canonical index of a monic degree-`n` polynomial among all of `M_n`.
pub fn monic_index(b: &FqPoly, n: usize) -> Result<u64, Error> {
    if b.degree() != Some(n) || !b.is_monic() {
        return Err(Error::BadDegree(format!(
            "expected a monic polynomial of degree {}, got degree {:?}",
            n,
            b.degree()
        )));
    }
    let q = b.field().q();
    let mut idx = 0u64;
    for i in (0..n).rev() {
        idx = idx * q + b.coefficient(i).index();
    }
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        Field::prime(3).unwrap()
    }

    fn poly(f: &Field, coeffs: &[u64]) -> FqPoly {
        FqPoly::from_coeffs(f, coeffs.iter().map(|&c| f.element(c)).collect())
    }

    #[test]
    fn arithmetic_examples() {
        let f = f3();
        let t_plus_1 = poly(&f, &[1, 1]);
        let t_plus_2 = poly(&f, &[2, 1]);
        // (T+1)(T+2) = T^2 + 3T + 2 = T^2 + 2 over F_3
        assert_eq!(t_plus_1.mul(&t_plus_2).unwrap(), poly(&f, &[2, 0, 1]));
        assert_eq!(t_plus_1.mul(&FqPoly::zero(&f)).unwrap(), FqPoly::zero(&f));
        // (T+1) + (2T+2) = 0
        assert_eq!(t_plus_1.add(&poly(&f, &[2, 2])).unwrap(), FqPoly::zero(&f));
    }

    #[test]
    fn field_mismatch_detected() {
        let a = poly(&f3(), &[1, 1]);
        let f5 = Field::prime(5).unwrap();
        let b = poly(&f5, &[1, 1]);
        assert_eq!(a.mul(&b), Err(Error::FieldMismatch));
        assert_eq!(a.add(&b), Err(Error::FieldMismatch));
    }

    #[test]
    fn coefficient_access() {
        let f = f3();
        let p = poly(&f, &[2, 0, 1]);
        assert_eq!(p.coefficient(0), f.element(2));
        assert_eq!(p.coefficient(5), f.zero());
        let sq = poly(&f, &[1, 1]).square();
        // (T+1)^2 = T^2 + 2T + 1
        assert_eq!(sq.coefficient(1), f.element(2));
    }

    #[test]
    fn degree_of_products_adds() {
        let f = f3();
        for a_deg in 0..3usize {
            for b_deg in 0..3usize {
                for a in enumerate_monic(&f, a_deg) {
                    for b in enumerate_monic(&f, b_deg) {
                        assert_eq!(a.mul(&b).unwrap().degree(), Some(a_deg + b_deg));
                    }
                }
            }
        }
    }

    #[test]
    fn monic_enumeration() {
        let f = f3();
        let m0: Vec<FqPoly> = enumerate_monic(&f, 0).collect();
        assert_eq!(m0, vec![poly(&f, &[1])]);
        let m1: Vec<FqPoly> = enumerate_monic(&f, 1).collect();
        assert_eq!(m1, vec![poly(&f, &[0, 1]), poly(&f, &[1, 1]), poly(&f, &[2, 1])]);
        let f5 = Field::prime(5).unwrap();
        assert_eq!(enumerate_monic(&f5, 3).count(), 125);
        for (i, b) in enumerate_monic(&f, 2).enumerate() {
            assert!(b.is_monic());
            assert_eq!(monic_index(&b, 2).unwrap(), i as u64);
        }
    }

    #[test]
    fn interval_membership() {
        let f = f3();
        let a = poly(&f, &[0, 0, 1]);
        assert!(in_interval(&a, &a, 0).unwrap());
        assert!(in_interval(&a, &a, 2).unwrap());
        let b = poly(&f, &[0, 1, 1]); // T^2 + T
        assert!(!in_interval(&b, &a, 1).unwrap());
        let c = poly(&f, &[2, 0, 1]); // T^2 + 2
        assert!(in_interval(&c, &a, 1).unwrap());
    }

    #[test]
    fn interval_enumeration_matches_membership() {
        let f = f3();
        for n in 1..=2usize {
            for h in 0..=n {
                for a in enumerate_monic(&f, n) {
                    let members: Vec<FqPoly> = interval(&a, h).collect();
                    assert_eq!(members.len() as u64, f.q().pow(h as u32));
                    for b in &members {
                        assert!(in_interval(b, &a, h).unwrap());
                    }
                    // every monic of the same degree inside the interval is listed
                    let inside = enumerate_monic(&f, n)
                        .filter(|b| in_interval(b, &a, h).unwrap())
                        .count();
                    assert_eq!(inside, members.len());
                }
            }
        }
    }

    // Independent coefficient-comparison oracle for products: the i-th
    // coefficient of AB must be the sum of a_{m1} b_{n1} over m1 + n1 = i,
    // which is the entrywise content of the vector-matrix-vector identity
    // for polynomial multiplication.
    #[test]
    fn product_matches_coefficient_convolution() {
        let f = f3();
        for a_deg in 0..=3usize {
            for b_deg in 0..=3usize {
                for a in enumerate_monic(&f, a_deg) {
                    for b in enumerate_monic(&f, b_deg) {
                        let prod = a.mul(&b).unwrap();
                        for i in 0..=(a_deg + b_deg + 1) {
                            let mut acc = f.zero();
                            for m1 in 0..=i {
                                let n1 = i - m1;
                                acc = f.add(acc, f.mul(a.coefficient(m1), b.coefficient(n1)));
                            }
                            assert_eq!(prod.coefficient(i), acc);
                        }
                    }
                }
            }
        }
    }
}
