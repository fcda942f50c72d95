//! Truncated formal Dirichlet series with exact integer coefficients.
//!
//! A [`DirichletSeries`] carries a truncation `bound`: coefficients at every
//! index `1..=bound` are known exactly and nothing is known beyond it. Binary
//! operations return a series whose bound is the minimum of their inputs, and
//! asking for a coefficient past the bound is an error rather than a zero.

use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation bound must be at least 1")]
    ZeroBound,
    #[error("index {index} is outside 1..={bound}")]
    IndexOutOfRange { index: u64, bound: u64 },
    #[error("index {0} appears more than once")]
    DuplicateIndex(u64),
    #[error("series is not unital (coefficient at 1 is {0})")]
    NotUnital(BigInt),
    #[error("ordered factorizations need n >= 2, got {0}")]
    FactorizationDomain(u64),
    #[error("malformed coefficient {0:?}")]
    BadCoefficient(String),
}

/// Sparse truncated Dirichlet series `sum a_n / n^s` for `n <= bound`.
///
/// Terms are kept sorted by index and never hold a zero coefficient, so two
/// series are equal exactly when their bounds and term lists are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletSeries {
    bound: u64,
    terms: Vec<(u64, BigInt)>,
}

impl DirichletSeries {
    /// Builds a series from `(index, coefficient)` pairs in any order.
    /// Zero coefficients are dropped.
    pub fn new<I, C>(pairs: I, bound: u64) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (u64, C)>,
        C: Into<BigInt>,
    {
        if bound == 0 {
            return Err(SeriesError::ZeroBound);
        }
        let mut terms: Vec<(u64, BigInt)> = Vec::new();
        for (index, coeff) in pairs {
            if index == 0 || index > bound {
                return Err(SeriesError::IndexOutOfRange { index, bound });
            }
            terms.push((index, coeff.into()));
        }
        terms.sort_by_key(|(n, _)| *n);
        if let Some(w) = terms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(SeriesError::DuplicateIndex(w[0].0));
        }
        terms.retain(|(_, c)| !c.is_zero());
        Ok(DirichletSeries { bound, terms })
    }

    /// The multiplicative identity `1`.
    pub fn unit(bound: u64) -> Result<Self, SeriesError> {
        DirichletSeries::new([(1u64, 1)], bound)
    }

    /// Builds from terms already known to be sorted, in range and nonzero.
    fn from_sorted(bound: u64, terms: Vec<(u64, BigInt)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms
            .iter()
            .all(|(n, c)| *n >= 1 && *n <= bound && !c.is_zero()));
        DirichletSeries { bound, terms }
    }

    fn from_dense(bound: u64, dense: Vec<BigInt>) -> Self {
        let terms = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (n as u64, c))
            .collect();
        DirichletSeries::from_sorted(bound, terms)
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Nonzero terms in ascending index order.
    pub fn terms(&self) -> &[(u64, BigInt)] {
        &self.terms
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|(n, _)| *n)
    }

    /// Coefficient at `n`. Indices past the bound are unknown, not zero.
    pub fn coeff(&self, n: u64) -> Result<BigInt, SeriesError> {
        if n == 0 || n > self.bound {
            return Err(SeriesError::IndexOutOfRange {
                index: n,
                bound: self.bound,
            });
        }
        Ok(self
            .terms
            .binary_search_by_key(&n, |(k, _)| *k)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default())
    }

    pub fn is_unital(&self) -> bool {
        matches!(self.terms.first(), Some((1, c)) if c.is_one())
    }

    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.is_unital()
    }

    /// Restricts to a smaller bound. A larger bound is refused: the missing
    /// coefficients are unknown.
    pub fn truncate(&self, bound: u64) -> Result<Self, SeriesError> {
        if bound == 0 {
            return Err(SeriesError::ZeroBound);
        }
        if bound > self.bound {
            return Err(SeriesError::IndexOutOfRange {
                index: bound,
                bound: self.bound,
            });
        }
        let terms = self
            .terms
            .iter()
            .take_while(|(n, _)| *n <= bound)
            .cloned()
            .collect();
        Ok(DirichletSeries::from_sorted(bound, terms))
    }

    /// Dirichlet convolution, truncated to the smaller bound.
    pub fn mul(&self, other: &DirichletSeries) -> DirichletSeries {
        let bound = self.bound.min(other.bound);
        // Sparse inputs: accumulate into a map keyed by product index.
        let mut acc: std::collections::BTreeMap<u64, BigInt> = std::collections::BTreeMap::new();
        for (d, a) in &self.terms {
            if *d > bound {
                break;
            }
            let limit = bound / d;
            for (e, b) in &other.terms {
                if *e > limit {
                    break;
                }
                *acc.entry(d * e).or_default() += a * b;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        DirichletSeries::from_sorted(bound, terms)
    }

    /// Formal inverse of a unital series, exact up to the same bound.
    ///
    /// Coefficients are produced in ascending order from
    /// `c_n = -sum_{rs = n, r != 1} a_r c_s`; each finished `c_s` is pushed
    /// forward onto its multiples `r s` with `r` in the support.
    pub fn invert(&self) -> Result<DirichletSeries, SeriesError> {
        if !self.is_unital() {
            let lead = self.coeff(1).unwrap_or_default();
            return Err(SeriesError::NotUnital(lead));
        }
        let bound = self.bound;
        let size = usize::try_from(bound).expect("bound exceeds address space") + 1;
        let tail = &self.terms[1..];
        let mut dense = vec![BigInt::zero(); size];
        dense[1] = BigInt::one();
        for s in 1..size {
            if dense[s].is_zero() {
                continue;
            }
            let cs = dense[s].clone();
            let limit = bound / s as u64;
            for (r, a) in tail {
                if *r > limit {
                    break;
                }
                let idx = (*r as usize) * s;
                dense[idx] -= a * &cs;
            }
        }
        Ok(DirichletSeries::from_dense(bound, dense))
    }

    /// `self^exponent` for a unital series.
    ///
    /// Writing `self = 1 + Q`, every term of `Q^j` sits at index `>= 2^j`, so
    /// the binomial expansion stops after `log2(bound)` terms and the exponent
    /// may be arbitrarily large.
    pub fn pow(&self, exponent: &BigUint) -> Result<DirichletSeries, SeriesError> {
        if !self.is_unital() {
            let lead = self.coeff(1).unwrap_or_default();
            return Err(SeriesError::NotUnital(lead));
        }
        let bound = self.bound;
        let q = DirichletSeries::from_sorted(bound, self.terms[1..].to_vec());
        let mut result = DirichletSeries::unit(bound)?;
        let mut q_power = DirichletSeries::unit(bound)?;
        let mut binom = BigInt::one();
        let f = BigInt::from(exponent.clone());
        let mut j: u64 = 0;
        loop {
            j += 1;
            if BigInt::from(j) > f {
                break;
            }
            q_power = q_power.mul(&q);
            if q_power.terms.is_empty() {
                break;
            }
            binom = binom * (&f - BigInt::from(j - 1)) / BigInt::from(j);
            result = result.add(&q_power.scale(&binom));
        }
        Ok(result)
    }

    /// Termwise sum, truncated to the smaller bound.
    pub fn add(&self, other: &DirichletSeries) -> DirichletSeries {
        let bound = self.bound.min(other.bound);
        let mut out: Vec<(u64, BigInt)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut left = self
            .terms
            .iter()
            .take_while(|(n, _)| *n <= bound)
            .peekable();
        let mut right = other
            .terms
            .iter()
            .take_while(|(n, _)| *n <= bound)
            .peekable();
        loop {
            match (left.peek(), right.peek()) {
                (Some((a, x)), Some((b, y))) => {
                    if a < b {
                        out.push((*a, x.clone()));
                        left.next();
                    } else if b < a {
                        out.push((*b, y.clone()));
                        right.next();
                    } else {
                        let sum = x + y;
                        if !sum.is_zero() {
                            out.push((*a, sum));
                        }
                        left.next();
                        right.next();
                    }
                }
                (Some((a, x)), None) => {
                    out.push((*a, x.clone()));
                    left.next();
                }
                (None, Some((b, y))) => {
                    out.push((*b, y.clone()));
                    right.next();
                }
                (None, None) => break,
            }
        }
        DirichletSeries::from_sorted(bound, out)
    }

    /// Multiplies every coefficient by `k`.
    pub fn scale(&self, k: &BigInt) -> DirichletSeries {
        if k.is_zero() {
            return DirichletSeries::from_sorted(self.bound, Vec::new());
        }
        let terms = self.terms.iter().map(|(n, c)| (*n, c * k)).collect();
        DirichletSeries::from_sorted(self.bound, terms)
    }

    /// Smallest index carrying a negative coefficient.
    pub fn first_negative(&self) -> Option<(u64, BigInt)> {
        self.terms
            .iter()
            .find(|(_, c)| c.is_negative())
            .map(|(n, c)| (*n, c.clone()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl Mul for &DirichletSeries {
    type Output = DirichletSeries;

    fn mul(self, rhs: &DirichletSeries) -> DirichletSeries {
        DirichletSeries::mul(self, rhs)
    }
}

impl fmt::Display for DirichletSeries {
    /// Renders as `1 - 5/5^s + 20/20^s + O(N)` style text.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (n, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            match (i, *n) {
                (0, 1) => write!(f, "{c}")?,
                (0, _) => write!(f, "{c}/{n}^s")?,
                (_, _) => write!(f, " {sign} {mag}/{n}^s")?,
            }
        }
        write!(f, " [n <= {}]", self.bound)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    bound: u64,
    terms: Vec<(u64, String)>,
}

impl Serialize for DirichletSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesJson {
            bound: self.bound,
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (*n, c.to_string()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DirichletSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = SeriesJson::deserialize(deserializer)?;
        let mut pairs = Vec::with_capacity(raw.terms.len());
        for (n, text) in raw.terms {
            let c: BigInt = text
                .parse()
                .map_err(|_| D::Error::custom(SeriesError::BadCoefficient(text.clone())))?;
            pairs.push((n, c));
        }
        DirichletSeries::new(pairs, raw.bound).map_err(D::Error::custom)
    }
}

/// An ordered factorization `n = n_1 * ... * n_t` with every part `>= 2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedFactorization {
    pub parts: Vec<u64>,
}

impl OrderedFactorization {
    pub fn product(&self) -> u64 {
        self.parts.iter().product()
    }
}

/// All ordered factorizations of `n` into parts `>= 2`, lexicographic.
pub fn ordered_factorizations(n: u64) -> Result<Vec<OrderedFactorization>, SeriesError> {
    if n < 2 {
        return Err(SeriesError::FactorizationDomain(n));
    }
    let divisors: Vec<u64> = divisors(n).into_iter().filter(|d| *d >= 2).collect();
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    fill_factorizations(n, &divisors, &mut prefix, &mut out);
    Ok(out)
}

fn fill_factorizations(
    rest: u64,
    divisors: &[u64],
    prefix: &mut Vec<u64>,
    out: &mut Vec<OrderedFactorization>,
) {
    for &d in divisors {
        if d > rest {
            break;
        }
        if !rest.is_multiple_of(d) {
            continue;
        }
        prefix.push(d);
        if d == rest {
            out.push(OrderedFactorization {
                parts: prefix.clone(),
            });
        } else {
            fill_factorizations(rest / d, divisors, prefix, out);
        }
        prefix.pop();
    }
}

/// Number of ordered factorizations `H(n)`, with `H(1) = 1`.
pub fn ordered_factorization_count(n: u64) -> BigUint {
    let divs = divisors(n);
    // counts[i] = H(divs[i]); H(d) = sum over proper divisors e of d of H(e).
    let mut counts: Vec<BigUint> = Vec::with_capacity(divs.len());
    for (i, &d) in divs.iter().enumerate() {
        if d == 1 {
            counts.push(BigUint::one());
            continue;
        }
        let mut total = BigUint::zero();
        for j in 0..i {
            if d % divs[j] == 0 {
                total += &counts[j];
            }
        }
        counts.push(total);
    }
    counts.pop().unwrap_or_else(BigUint::one)
}

/// Sorted divisors of `n` (`n >= 1`).
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `sum |a_{n_1} ... a_{n_t}|` over all ordered factorizations of `n`,
/// with the empty factorization of 1 contributing 1.
pub fn factorization_bound(series: &DirichletSeries, n: u64) -> Result<BigUint, SeriesError> {
    if n == 0 || n > series.bound() {
        return Err(SeriesError::IndexOutOfRange {
            index: n,
            bound: series.bound(),
        });
    }
    let divs = divisors(n);
    let abs_coeff = |d: u64| -> BigUint {
        series
            .coeff(d)
            .map(|c| c.magnitude().clone())
            .unwrap_or_default()
    };
    // sums[i] = bound at divs[i], built over divisors of n only.
    let mut sums: Vec<BigUint> = Vec::with_capacity(divs.len());
    for (i, &d) in divs.iter().enumerate() {
        if d == 1 {
            sums.push(BigUint::one());
            continue;
        }
        let mut total = BigUint::zero();
        for j in 0..i {
            let e = divs[j];
            if d % e == 0 {
                let first = abs_coeff(d / e);
                if !first.is_zero() {
                    total += first * &sums[j];
                }
            }
        }
        sums.push(total);
    }
    Ok(sums.pop().unwrap_or_else(BigUint::one))
}

/// Checks `|c_n| <= sum over ordered factorizations of |a_{n_1} ... a_{n_t}|`
/// where `c` is the inverse of `series`.
pub fn coefficient_bound_check(series: &DirichletSeries, n: u64) -> Result<bool, SeriesError> {
    let inverse = series.invert()?;
    let c = inverse.coeff(n)?;
    Ok(c.magnitude() <= &factorization_bound(series, n)?)
}
