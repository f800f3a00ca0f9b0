//! The arithmetic side: representation counts `S(B) = #{(E, F) : B = E^2 +
//! gamma F^2}` with `E` monic of degree `n` and `F` monic of degree `m`,
//! interval sums of those counts, and their mean and variance over all
//! monic centres of degree `2n` — the brute force and the closed formulas,
//! both as exact rationals with denominator a power of `q`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::field::{Field, FieldElement};
use crate::polyring::{enumerate_monic, monic_index, FqPoly};
use crate::Error;

/// An exact rational `numerator / q^exponent`. Values are compared by
/// cross-multiplying, so equal values with different exponents compare equal.
#[derive(Clone, Debug)]
pub struct ScaledRational {
    numerator: BigInt,
    q: u64,
    exponent: u32,
}

impl ScaledRational {
    pub fn new(numerator: BigInt, q: u64, exponent: u32) -> ScaledRational {
        ScaledRational { numerator, q, exponent }
    }

    pub fn zero(q: u64) -> ScaledRational {
        ScaledRational::new(BigInt::ZERO, q, 0)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }
}

impl PartialEq for ScaledRational {
    fn eq(&self, other: &Self) -> bool {
        if self.q != other.q {
            return false;
        }
        let q = BigInt::from(self.q);
        match self.exponent.cmp(&other.exponent) {
            std::cmp::Ordering::Equal => self.numerator == other.numerator,
            std::cmp::Ordering::Less => {
                &self.numerator * q.pow(other.exponent - self.exponent) == other.numerator
            }
            std::cmp::Ordering::Greater => {
                self.numerator == &other.numerator * q.pow(self.exponent - other.exponent)
            }
        }
    }
}

impl Eq for ScaledRational {}

impl fmt::Display for ScaledRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}^{}", self.numerator, self.q, self.exponent)
        }
    }
}

fn q_pow_int(q: u64, e: usize) -> BigInt {
    BigInt::from(q).pow(e as u32)
}

fn q_pow_uint(q: u64, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

fn check_params(n: usize, m: usize, h: usize) -> Result<(), Error> {
    if n == 0 || m > n - 1 || h > 2 * n {
        return Err(Error::BadParameters(format!(
            "need n >= 1, 0 <= m <= n-1, 0 <= h <= 2n; got n = {n}, m = {m}, h = {h}"
        )));
    }
    Ok(())
}

/// The number of pairs `(E, F)` of monic polynomials with `deg E = n`,
/// `deg F = m`, and `E^2 + gamma F^2 = B`, for monic `B` of degree `2n`,
/// counted by direct enumeration of all `q^(n+m)` pairs.
pub fn s_gamma_m(b: &FqPoly, gamma: FieldElement, m: usize) -> Result<u64, Error> {
    let field = b.field().clone();
    if gamma == field.zero() {
        return Err(Error::GammaZero);
    }
    let deg = b.degree().ok_or_else(|| Error::BadDegree("zero polynomial".into()))?;
    if deg == 0 || deg % 2 != 0 || !b.is_monic() {
        return Err(Error::BadDegree(format!(
            "need a monic polynomial of even degree 2n >= 2, got degree {deg}"
        )));
    }
    let n = deg / 2;
    check_params(n, m, 0)?;
    let mut count = 0u64;
    for e in enumerate_monic(&field, n) {
        let e2 = e.square();
        for f_poly in enumerate_monic(&field, m) {
            let candidate = e2.add(&f_poly.square().scale(gamma))?;
            if candidate == *b {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// The full table of representation counts for one `(n, m, gamma)`: counts
/// are indexed by the canonical index of the monic degree-`2n` target and
/// built by one forward pass over all `q^(n+m)` pairs.
pub struct STable {
    field: Field,
    n: usize,
    m: usize,
    gamma: FieldElement,
    counts: Vec<u64>,
}

impl STable {
    pub fn build(field: &Field, n: usize, m: usize, gamma: FieldElement) -> Result<STable, Error> {
        check_params(n, m, 0)?;
        if gamma == field.zero() {
            return Err(Error::GammaZero);
        }
        let q = field.q();
        let mut counts = vec![0u64; q.pow(2 * n as u32) as usize];
        for f_poly in enumerate_monic(field, m) {
            let gf2 = f_poly.square().scale(gamma);
            for e in enumerate_monic(field, n) {
                let b = e.square().add(&gf2)?;
                let idx = monic_index(&b, 2 * n)?;
                counts[idx as usize] += 1;
            }
        }
        Ok(STable { field: field.clone(), n, m, gamma, counts })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gamma(&self) -> FieldElement {
        self.gamma
    }

    /// The count for one monic target of degree `2n`.
    pub fn count(&self, b: &FqPoly) -> Result<u64, Error> {
        let idx = monic_index(b, 2 * self.n)?;
        Ok(self.counts[idx as usize])
    }

    /// Total mass: every pair lands on exactly one target, so this is
    /// `q^(n+m)`.
    pub fn total(&self) -> BigUint {
        self.counts.iter().map(|&c| BigUint::from(c)).sum()
    }

    /// Sums counts over each interval class. Two monic targets share an
    /// interval of radius `h` exactly when they agree above the low `h`
    /// coefficients, so the class key is the canonical index shifted down by
    /// `h` base-`q` digits.
    pub fn interval_class_sums(&self, h: usize) -> Vec<u64> {
        let q = self.field.q();
        let class_count = q.pow((2 * self.n - h) as u32) as usize;
        let block = q.pow(h as u32) as usize;
        let mut sums = vec![0u64; class_count];
        for (idx, &c) in self.counts.iter().enumerate() {
            sums[idx / block] += c;
        }
        sums
    }

    /// The raw square sum over all monic centres `A` of degree `2n` of the
    /// squared interval count: each interval class of `q^h` centres shares
    /// one interval, hence the factor `q^h`.
    pub fn square_sum(&self, h: usize) -> BigUint {
        let per_class: BigUint =
            self.interval_class_sums(h).iter().map(|&s| BigUint::from(s).pow(2)).sum();
        per_class * q_pow_uint(self.field.q(), h)
    }
}

/// The closed mean of interval counts over all centres: `q^(m+h-n)`,
/// represented exactly as `q^(m+h) / q^n`.
pub fn mean_closed(field: &Field, n: usize, m: usize, h: usize) -> Result<ScaledRational, Error> {
    check_params(n, m, h)?;
    Ok(ScaledRational::new(q_pow_int(field.q(), m + h), field.q(), n as u32))
}

/// The mean computed from the representation table.
pub fn mean_brute(
    field: &Field,
    n: usize,
    m: usize,
    h: usize,
    gamma: FieldElement,
) -> Result<ScaledRational, Error> {
    check_params(n, m, h)?;
    let table = STable::build(field, n, m, gamma)?;
    let sum = BigInt::from(table.total() * q_pow_uint(field.q(), h));
    Ok(ScaledRational::new(sum, field.q(), 2 * n as u32))
}

/// The raw square sum by brute force over the representation table.
pub fn square_sum_brute(
    field: &Field,
    n: usize,
    m: usize,
    h: usize,
    gamma: FieldElement,
) -> Result<BigUint, Error> {
    check_params(n, m, h)?;
    Ok(STable::build(field, n, m, gamma)?.square_sum(h))
}

/// The exact variance by brute force: the square sum normalised by `q^(2n)`
/// minus the squared mean.
pub fn variance_brute(
    field: &Field,
    n: usize,
    m: usize,
    h: usize,
    gamma: FieldElement,
) -> Result<ScaledRational, Error> {
    check_params(n, m, h)?;
    let square_sum = BigInt::from(square_sum_brute(field, n, m, h, gamma)?);
    let numerator = square_sum - q_pow_int(field.q(), 2 * (m + h));
    Ok(ScaledRational::new(numerator, field.q(), 2 * n as u32))
}

/// Which closed-form regime and `h` range produced a variance value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarianceCase {
    pub case_label: &'static str,
    pub subcase_label: &'static str,
}

/// The closed-form variance. Exactly one regime and one `h` range applies
/// to every admissible `(n, m, h)`; the value is returned over denominator
/// `q^(2n)` together with the labels of the branch taken.
pub fn variance_closed(
    field: &Field,
    n: usize,
    m: usize,
    h: usize,
) -> Result<(ScaledRational, VarianceCase), Error> {
    check_params(n, m, h)?;
    let q = field.q();
    let pow = |e: usize| q_pow_int(q, e);
    let exp = 2 * n as u32;
    let zero = |case_label, subcase_label| {
        (ScaledRational::new(BigInt::ZERO, q, exp), VarianceCase { case_label, subcase_label })
    };
    let value = |num: BigInt, case_label, subcase_label| {
        (ScaledRational::new(num, q, exp), VarianceCase { case_label, subcase_label })
    };

    let out = if m == 0 {
        let case = "m=0";
        if h >= n {
            zero(case, "n<=h<=2n")
        } else {
            value(pow(h) * (pow(n) - pow(h)), case, "0<=h<=n-1")
        }
    } else if n > 2 * m {
        let case = "n>=2m+1";
        if h >= n {
            zero(case, "n<=h<=2n")
        } else if h >= 2 * m {
            value(pow(2 * m + h) * (pow(n) - pow(h)), case, "2m<=h<=n-1")
        } else if h >= m {
            value(pow(2 * h) * (pow(n) - pow(2 * m)), case, "m<=h<=2m-1")
        } else {
            value(pow(m + h) * (pow(n) - pow(m + h)), case, "0<=h<=m-1")
        }
    } else if n == 2 * m {
        let case = "n=2m";
        if h >= m {
            zero(case, "m<=h<=2n")
        } else {
            value(pow(n + h) * (pow(m) - pow(h)), case, "0<=h<=m-1")
        }
    } else {
        let case = "m+1<=n<=2m-1";
        if h >= m {
            zero(case, "m<=h<=2n")
        } else if h >= 2 * m - n {
            value(pow(n + h) * (pow(m) - pow(h)), case, "2m-n<=h<=m-1")
        } else {
            let spread = BigInt::from((2 * m - n - h) as u64) * BigInt::from(q - 1) * pow(m - 1);
            value(pow(m + h) * (pow(n) - pow(m) + spread), case, "0<=h<=2m-n-1")
        }
    };
    Ok(out)
}
