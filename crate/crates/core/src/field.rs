//! Exact arithmetic in odd-characteristic finite fields `F_q`, `q = p^k`.
//!
//! Elements are stored as canonical indices: the element with coefficient
//! vector `(c_0, ..., c_{k-1})` over `F_p` has index `sum c_i * p^i`. Index
//! order therefore coincides with lexicographic order on coefficient vectors,
//! zero is index 0 and one is index 1, and every enumeration that walks
//! `0..q` is deterministic.

use std::fmt;
use std::sync::Arc;

use crate::Error;

/// An element of a [`Field`], identified by its canonical index.
///
/// The index encodes the reduced coefficient vector base `p`; all arithmetic
/// goes through the owning [`Field`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    /// Canonical index in `0..q`.
    pub fn index(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, PartialEq, Eq)]
struct FieldRepr {
    p: u64,
    k: usize,
    q: u64,
    /// Monic irreducible modulus over `F_p`, coefficients low-to-high,
    /// length `k + 1`. Empty for prime fields.
    modulus: Vec<u64>,
}

/// An odd-characteristic finite field `F_q` with `q = p^k`.
///
/// Cheap to clone (shared representation) and immutable after construction,
/// so values may be used concurrently without restriction.
#[derive(Clone)]
pub struct Field(Arc<FieldRepr>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.k)
        }
    }
}

impl Field {
    /// Builds `F_p` for an odd prime `p`.
    pub fn prime(p: u64) -> Result<Field, Error> {
        Field::new(p, 1, None)
    }

    /// Builds `F_{p^k}`. For `k > 1` the caller supplies a monic irreducible
    /// modulus over `F_p` as coefficients low-to-high (length `k + 1`);
    /// irreducibility is verified by trial division.
    pub fn new(p: u64, k: usize, modulus: Option<Vec<u64>>) -> Result<Field, Error> {
        if p.is_multiple_of(2) {
            return Err(Error::EvenCharacteristic);
        }
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if k == 0 {
            return Err(Error::BadParameters("extension degree must be >= 1".into()));
        }
        let modulus = match (k, modulus) {
            (1, None) => Vec::new(),
            (1, Some(_)) => {
                return Err(Error::BadModulus("prime fields take no modulus".into()));
            }
            (_, None) => return Err(Error::MissingModulus(k)),
            (_, Some(raw)) => {
                if raw.len() != k + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients, got {}",
                        k + 1,
                        raw.len()
                    )));
                }
                let reduced: Vec<u64> = raw.iter().map(|c| c % p).collect();
                if reduced[k] != 1 {
                    return Err(Error::BadModulus("modulus must be monic".into()));
                }
                if !is_irreducible(&reduced, p) {
                    return Err(Error::ReducibleModulus(p));
                }
                reduced
            }
        };
        let q = p
            .checked_pow(k as u32)
            .ok_or_else(|| Error::BadParameters("q = p^k overflows u64".into()))?;
        Ok(Field(Arc::new(FieldRepr { p, k, q, modulus })))
    }

    /// Parses a field spec string: `p` for a prime field, or
    /// `p^k:c0,c1,...,ck` giving the modulus coefficients low-to-high.
    pub fn parse_spec(spec: &str) -> Result<Field, Error> {
        let parse_err = || Error::Parse { what: "field spec", text: spec.to_string() };
        let spec = spec.trim();
        match spec.split_once('^') {
            None => {
                let p: u64 = spec.parse().map_err(|_| parse_err())?;
                Field::prime(p)
            }
            Some((p_str, rest)) => {
                let p: u64 = p_str.trim().parse().map_err(|_| parse_err())?;
                let (k_str, coeffs_str) = rest.split_once(':').ok_or_else(parse_err)?;
                let k: usize = k_str.trim().parse().map_err(|_| parse_err())?;
                let coeffs = coeffs_str
                    .split(',')
                    .map(|c| c.trim().parse::<u64>().map_err(|_| parse_err()))
                    .collect::<Result<Vec<_>, _>>()?;
                Field::new(p, k, Some(coeffs))
            }
        }
    }

    /// The canonical spec string this field round-trips through
    /// [`Field::parse_spec`].
    pub fn spec_string(&self) -> String {
        if self.0.k == 1 {
            format!("{}", self.0.p)
        } else {
            let coeffs: Vec<String> = self.0.modulus.iter().map(|c| c.to_string()).collect();
            format!("{}^{}:{}", self.0.p, self.0.k, coeffs.join(","))
        }
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn extension_degree(&self) -> usize {
        self.0.k
    }

    /// Number of elements `q = p^k`.
    pub fn q(&self) -> u64 {
        self.0.q
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// The element with the given canonical index. Panics if out of range.
    pub fn element(&self, index: u64) -> FieldElement {
        assert!(index < self.0.q, "element index {} out of range for {:?}", index, self);
        FieldElement(index)
    }

    /// The element with coefficient vector `coeffs` (low-to-high over `F_p`,
    /// at most `k` entries; shorter vectors are zero-padded). Coefficients
    /// are reduced mod `p`.
    pub fn element_from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement, Error> {
        if coeffs.len() > self.0.k {
            return Err(Error::BadParameters(format!(
                "{} coefficients for extension degree {}",
                coeffs.len(),
                self.0.k
            )));
        }
        let mut digits = vec![0u64; self.0.k];
        for (i, c) in coeffs.iter().enumerate() {
            digits[i] = c % self.0.p;
        }
        Ok(FieldElement(self.encode(&digits)))
    }

    /// Parses an element from text: comma-separated coefficients low-to-high,
    /// e.g. `2` in a prime field or `1,2` in an extension field.
    pub fn parse_element(&self, text: &str) -> Result<FieldElement, Error> {
        let coeffs = text
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse { what: "field element", text: text.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.element_from_coeffs(&coeffs)
    }

    /// Canonical coefficient vector of `a`, low-to-high, length `k`.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        self.decode(a.0)
    }

    /// Renders `a` as comma-separated coefficients (a bare residue for prime
    /// fields).
    pub fn element_string(&self, a: FieldElement) -> String {
        let digits = self.decode(a.0);
        digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
    }

    /// All `q` elements in canonical (lexicographic) order, zero first.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.q).map(FieldElement)
    }

    /// The `q - 1` nonzero elements in canonical order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.0.q).map(FieldElement)
    }

    fn decode(&self, mut index: u64) -> Vec<u64> {
        let mut digits = vec![0u64; self.0.k];
        for d in digits.iter_mut() {
            *d = index % self.0.p;
            index /= self.0.p;
        }
        digits
    }

    fn encode(&self, digits: &[u64]) -> u64 {
        let mut index = 0u64;
        for &d in digits.iter().rev() {
            index = index * self.0.p + d;
        }
        index
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.0.k == 1 {
            return FieldElement((a.0 + b.0) % self.0.p);
        }
        let (da, db) = (self.decode(a.0), self.decode(b.0));
        let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.0.p).collect();
        FieldElement(self.encode(&sum))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.0.k == 1 {
            return FieldElement((self.0.p - a.0) % self.0.p);
        }
        let da = self.decode(a.0);
        let neg: Vec<u64> = da.iter().map(|x| (self.0.p - x) % self.0.p).collect();
        FieldElement(self.encode(&neg))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.0.p as u128;
        if self.0.k == 1 {
            return FieldElement(((a.0 as u128 * b.0 as u128) % p) as u64);
        }
        let (da, db) = (self.decode(a.0), self.decode(b.0));
        let k = self.0.k;
        let mut prod = vec![0u128; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        // Reduce by the monic modulus from the top down.
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &mj) in self.0.modulus.iter().take(k).enumerate() {
                let sub = (c * mj as u128) % p;
                prod[i - k + j] = (prod[i - k + j] + p - sub) % p;
            }
        }
        let digits: Vec<u64> = prod[..k].iter().map(|&x| x as u64).collect();
        FieldElement(self.encode(&digits))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via `a^(q-2)`.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, Error> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.0.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, Error> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Absolute trace down to `F_p`: `a + a^p + ... + a^{p^{k-1}}`, returned
    /// as a residue mod `p`. Additive and `F_p`-linear.
    pub fn trace(&self, a: FieldElement) -> u64 {
        if self.0.k == 1 {
            return a.0;
        }
        let mut conj = a;
        let mut acc = a;
        for _ in 1..self.0.k {
            conj = self.pow(conj, self.0.p);
            acc = self.add(acc, conj);
        }
        let digits = self.decode(acc.0);
        debug_assert!(
            digits[1..].iter().all(|&d| d == 0),
            "trace landed outside the prime subfield"
        );
        digits[0]
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Remainder of `a` divided by monic `b`, both dense coefficient vectors
/// over `F_p` (low-to-high, possibly with high zeros).
fn poly_rem_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let deg_b = b.iter().rposition(|&c| c != 0).expect("divisor is zero");
    let mut rem: Vec<u64> = a.to_vec();
    let mut deg_a = rem.iter().rposition(|&c| c != 0);
    while let Some(da) = deg_a {
        if da < deg_b {
            break;
        }
        let c = rem[da];
        let shift = da - deg_b;
        for (j, &bj) in b.iter().take(deg_b + 1).enumerate() {
            let sub = (c as u128 * bj as u128 % p as u128) as u64;
            rem[shift + j] = (rem[shift + j] + p - sub) % p;
        }
        deg_a = rem.iter().rposition(|&c| c != 0);
    }
    rem
}

/// Trial division against every monic polynomial of degree `1..=k/2`.
fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let k = modulus.len() - 1;
    for d in 1..=k / 2 {
        // Monic degree-d candidates indexed by their low d coefficients.
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut cand = vec![0u64; d + 1];
            let mut rest = idx;
            for c in cand.iter_mut().take(d) {
                *c = rest % p;
                rest /= p;
            }
            cand[d] = 1;
            let rem = poly_rem_mod_p(modulus, &cand, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}
