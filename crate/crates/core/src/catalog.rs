//! Series of groups too large to enumerate, assembled from product formulas.
//!
//! * abelian and cyclic groups: `prod (1 - c_i / q_i^s)`;
//! * large alternating groups: the leading terms coming from point and
//!   2-set stabilizers, valid up to index `m(m-1)`;
//! * powers `S^f` of a simple group: `prod_{i<f} (P_S(s) - i|Aut S| / |S|^s)`;
//! * direct products without shared chief factors: the product of the
//!   factor series.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cache::{CacheError, LatticeCache};
use crate::dseries::{DirichletSeries, SeriesError};
use crate::moebius::MoebiusTable;
use crate::permgroup::{
    GroupError, GroupSpec, PermGroup, DEFAULT_LATTICE_LIMIT, DEFAULT_ORDER_LIMIT,
};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("elementary abelian rank must be at least 1")]
    ZeroRank,
    #[error("cyclic group order must be at least 1")]
    ZeroOrder,
    #[error("alternating degree {0} is below 9; use a lattice recipe")]
    AlternatingTooSmall(u64),
    #[error("A_{m} series is only certified up to index {limit}, requested bound {bound}")]
    BeyondValidity { m: u64, limit: u64, bound: u64 },
    #[error("power multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("multiplicity {0} is too large to expand factor by factor")]
    MultiplicityTooLarge(BigUint),
    #[error("invalid orders for a simple-group power: |Aut S| = {aut}, |S| = {group}")]
    BadOrders { aut: BigUint, group: BigUint },
    #[error("product factors share the chief factor {0}")]
    SharedChiefFactor(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

/// Symbolic description of a group whose series is wanted.
///
/// JSON form is internally tagged by `"variant"`, e.g.
/// `{"variant": "brown", "factors": [{"variant": "cyclic", "order": 5}]}`.
/// Large integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SeriesRecipe {
    /// A permutation group, evaluated through its subgroup lattice.
    Lattice(GroupSpec),
    /// Cyclic group of the given order.
    Cyclic { order: u64 },
    /// `C_p^d`.
    ElementaryAbelian { p: u64, d: u32 },
    /// `A_m` for `m >= 9`, known up to index `m(m-1)`.
    #[serde(rename = "alternating")]
    AlternatingTruncated { m: u64 },
    /// `S^f` for a nonabelian simple `S` described by `base`.
    #[serde(rename = "boston")]
    BostonPower {
        base: Box<SeriesRecipe>,
        #[serde(with = "decimal")]
        f: BigUint,
        #[serde(with = "decimal")]
        aut_order: BigUint,
        #[serde(with = "decimal")]
        group_order: BigUint,
    },
    /// Direct product of factors with no chief factor in common.
    #[serde(rename = "brown")]
    BrownProduct { factors: Vec<SeriesRecipe> },
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A chief-factor class used to decide whether product factors may be
/// multiplied: abelian factors by prime, nonabelian ones by order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Constituent {
    Abelian(u64),
    NonAbelian(BigUint),
}

impl std::fmt::Display for Constituent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Constituent::Abelian(p) => write!(f, "C_{p}"),
            Constituent::NonAbelian(order) => write!(f, "nonabelian of order {order}"),
        }
    }
}

/// Limits and cache used when a recipe needs lattice enumeration.
#[derive(Clone, Debug)]
pub struct EvalConfig {
    pub order_limit: usize,
    pub lattice_limit: usize,
    pub cache: Option<LatticeCache>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            order_limit: DEFAULT_ORDER_LIMIT,
            lattice_limit: DEFAULT_LATTICE_LIMIT,
            cache: None,
        }
    }
}

impl EvalConfig {
    pub fn table_for(&self, spec: &GroupSpec) -> Result<MoebiusTable, CatalogError> {
        let group = PermGroup::close(spec, self.order_limit)?;
        match &self.cache {
            Some(cache) => Ok(cache.table_for(&group, self.lattice_limit)?),
            None => Ok(MoebiusTable::new(
                group.enumerate_subgroups(self.lattice_limit)?,
            )),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `1 - c / q^s`, or the unit when `q` lies beyond the bound.
fn linear_factor(q: u64, c: BigInt, bound: u64) -> Result<DirichletSeries, SeriesError> {
    if q > bound {
        return DirichletSeries::unit(bound);
    }
    DirichletSeries::new([(1, BigInt::one()), (q, -c)], bound)
}

/// `P_{C_p^d}(s) = prod_{i<d} (1 - p^i / p^s)`.
pub fn elementary_abelian_series(
    p: u64,
    d: u32,
    bound: u64,
) -> Result<DirichletSeries, CatalogError> {
    if !is_prime(p) {
        return Err(CatalogError::NotPrime(p));
    }
    if d == 0 {
        return Err(CatalogError::ZeroRank);
    }
    let mut series = DirichletSeries::unit(bound)?;
    for i in 0..d {
        series = series.mul(&linear_factor(p, BigInt::from(p).pow(i), bound)?);
    }
    Ok(series)
}

/// `P_{C_n}(s) = prod_{p | n} (1 - 1/p^s)`.
pub fn cyclic_series(order: u64, bound: u64) -> Result<DirichletSeries, CatalogError> {
    if order == 0 {
        return Err(CatalogError::ZeroOrder);
    }
    let mut series = DirichletSeries::unit(bound)?;
    for p in prime_divisors(order) {
        series = series.mul(&linear_factor(p, BigInt::one(), bound)?);
    }
    Ok(series)
}

/// Largest index at which the truncated `A_m` series is exact.
pub fn alternating_validity(m: u64) -> u64 {
    m * (m - 1)
}

/// `1 - m/m^s - (m(m-1)/2)/(m(m-1)/2)^s + m(m-1)/(m(m-1))^s`, for `m >= 9`
/// and `bound <= m(m-1)`.
///
/// Below index `m(m-1)` the only subgroups of `A_m` with nonzero Möbius value
/// are point stabilizers, 2-set stabilizers and 2-point stabilizers, so these
/// terms are exact; past it they are not, and larger bounds are refused.
pub fn alternating_truncated_series(m: u64, bound: u64) -> Result<DirichletSeries, CatalogError> {
    if m < 9 {
        return Err(CatalogError::AlternatingTooSmall(m));
    }
    let limit = alternating_validity(m);
    if bound > limit {
        return Err(CatalogError::BeyondValidity { m, limit, bound });
    }
    let pairs = m * (m - 1) / 2;
    let terms = [
        (1, BigInt::one()),
        (m, -BigInt::from(m)),
        (pairs, -BigInt::from(pairs)),
        (limit, BigInt::from(limit)),
    ];
    Ok(DirichletSeries::new(
        terms.into_iter().filter(|(n, _)| *n <= bound),
        bound,
    )?)
}

/// `P_{S^f}(s) = prod_{i=0}^{f-1} (P_S(s) - i |Aut S| / |S|^s)`.
///
/// When `|S|` exceeds the bound the correction terms cannot reach any index
/// that is kept, and the product is `P_S^f`, computed for any `f`.
pub fn boston_power_series(
    base: &DirichletSeries,
    f: &BigUint,
    aut_order: &BigUint,
    group_order: &BigUint,
) -> Result<DirichletSeries, CatalogError> {
    if f.is_zero() {
        return Err(CatalogError::ZeroMultiplicity);
    }
    if aut_order.is_zero() || *group_order < BigUint::from(2u32) {
        return Err(CatalogError::BadOrders {
            aut: aut_order.clone(),
            group: group_order.clone(),
        });
    }
    if !base.is_unital() {
        return Err(SeriesError::NotUnital(base.coeff(1).unwrap_or_default()).into());
    }
    let bound = base.bound();
    let index = match group_order.to_u64() {
        Some(n) if n <= bound => n,
        _ => return Ok(base.pow(f)?),
    };
    let copies = f
        .to_u32()
        .ok_or_else(|| CatalogError::MultiplicityTooLarge(f.clone()))?;
    let aut = BigInt::from(aut_order.clone());
    let mut product = DirichletSeries::unit(bound)?;
    for i in 0..copies {
        let correction = DirichletSeries::new([(index, -(&aut * i))], bound)?;
        product = product.mul(&base.add(&correction));
    }
    Ok(product)
}

impl SeriesRecipe {
    /// The example group `C_2^2 x C_5^2 x A_5`.
    pub fn example_c2c2_c5c5_a5() -> SeriesRecipe {
        SeriesRecipe::BrownProduct {
            factors: vec![
                SeriesRecipe::ElementaryAbelian { p: 2, d: 2 },
                SeriesRecipe::ElementaryAbelian { p: 5, d: 2 },
                SeriesRecipe::Lattice(GroupSpec::alternating(5)),
            ],
        }
    }

    /// `A_m^f` with `|Aut A_m| = m!` and `|A_m| = m!/2`, `m >= 9`.
    pub fn alternating_power(m: u64, f: BigUint) -> SeriesRecipe {
        let fact: BigUint = (1..=m).map(BigUint::from).product();
        SeriesRecipe::BostonPower {
            base: Box::new(SeriesRecipe::AlternatingTruncated { m }),
            f,
            group_order: &fact / 2u32,
            aut_order: fact,
        }
    }

    pub fn from_json(text: &str) -> Result<SeriesRecipe, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("recipe serialization cannot fail")
    }

    /// Series of the described group, exact up to `bound`.
    pub fn series(&self, bound: u64, config: &EvalConfig) -> Result<DirichletSeries, CatalogError> {
        self.evaluate(bound, config).map(|(s, _)| s)
    }

    /// Chief-factor classes of the described group.
    pub fn constituents(&self, config: &EvalConfig) -> Result<BTreeSet<Constituent>, CatalogError> {
        Ok(match self {
            SeriesRecipe::Lattice(spec) => lattice_constituents(&config.table_for(spec)?),
            SeriesRecipe::Cyclic { order } => prime_divisors(*order)
                .into_iter()
                .map(Constituent::Abelian)
                .collect(),
            SeriesRecipe::ElementaryAbelian { p, .. } => [Constituent::Abelian(*p)].into(),
            SeriesRecipe::AlternatingTruncated { m } => {
                let fact: BigUint = (1..=*m).map(BigUint::from).product();
                [Constituent::NonAbelian(fact / 2u32)].into()
            }
            SeriesRecipe::BostonPower { base, .. } => base.constituents(config)?,
            SeriesRecipe::BrownProduct { factors } => {
                let mut all = BTreeSet::new();
                for factor in factors {
                    merge_disjoint(&mut all, factor.constituents(config)?)?;
                }
                all
            }
        })
    }

    fn evaluate(
        &self,
        bound: u64,
        config: &EvalConfig,
    ) -> Result<(DirichletSeries, BTreeSet<Constituent>), CatalogError> {
        match self {
            SeriesRecipe::Lattice(spec) => {
                let table = config.table_for(spec)?;
                Ok((table.group_series(bound)?, lattice_constituents(&table)))
            }
            SeriesRecipe::Cyclic { order } => {
                Ok((cyclic_series(*order, bound)?, self.constituents(config)?))
            }
            SeriesRecipe::ElementaryAbelian { p, d } => Ok((
                elementary_abelian_series(*p, *d, bound)?,
                self.constituents(config)?,
            )),
            SeriesRecipe::AlternatingTruncated { m } => Ok((
                alternating_truncated_series(*m, bound)?,
                self.constituents(config)?,
            )),
            SeriesRecipe::BostonPower {
                base,
                f,
                aut_order,
                group_order,
            } => {
                let (base_series, signature) = base.evaluate(bound, config)?;
                let series = boston_power_series(&base_series, f, aut_order, group_order)?;
                Ok((series, signature))
            }
            SeriesRecipe::BrownProduct { factors } => {
                let mut series = DirichletSeries::unit(bound)?;
                let mut signature = BTreeSet::new();
                for factor in factors {
                    let (s, sig) = factor.evaluate(bound, config)?;
                    merge_disjoint(&mut signature, sig)?;
                    series = series.mul(&s);
                }
                Ok((series, signature))
            }
        }
    }
}

fn lattice_constituents(table: &MoebiusTable) -> BTreeSet<Constituent> {
    table
        .lattice()
        .chief_factor_orders()
        .into_iter()
        .map(|order| match prime_divisors(order).as_slice() {
            [p] => Constituent::Abelian(*p),
            _ => Constituent::NonAbelian(BigUint::from(order)),
        })
        .collect()
}

fn merge_disjoint(
    into: &mut BTreeSet<Constituent>,
    other: BTreeSet<Constituent>,
) -> Result<(), CatalogError> {
    if let Some(shared) = into.intersection(&other).next() {
        return Err(CatalogError::SharedChiefFactor(shared.to_string()));
    }
    into.extend(other);
    Ok(())
}

/// `c_{2^i 5^k}(H)` for `H = C_2^2 x C_5^2`:
/// `(2^{i+1} - 1)(5^{k+1} - 1) / 4`.
pub fn example_abelian_inverse_coefficient(i: u32, k: u32) -> BigInt {
    let two = BigInt::from(2).pow(i + 1) - 1;
    let five = BigInt::from(5).pow(k + 1) - 1;
    two * five / 4
}

/// Inverse coefficients `c_{2^i 5^k}(G)` of `G = C_2^2 x C_5^2 x A_5` from
/// the recurrence
///
/// `c_{2^i 5^k}(G) = 5 c_{2^i 5^{k-1}} + 10 c_{2^{i-1} 5^{k-1}}
///                   - 20 c_{2^{i-2} 5^{k-1}} + c_{2^i 5^k}(H)`,
///
/// where a term whose exponent would be negative contributes zero. Only
/// `a_5, a_10, a_20` of `A_5` divide a `{2,5}`-smooth index, which is why no
/// other terms appear.
pub fn example_recurrence_coefficients(i_max: u32, k_max: u32) -> BTreeMap<(u32, u32), BigInt> {
    let mut c: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    for k in 0..=k_max {
        for i in 0..=i_max {
            let at = |di: u32, dk: u32| -> BigInt {
                if i < di || k < dk {
                    BigInt::zero()
                } else {
                    c[&(i - di, k - dk)].clone()
                }
            };
            let value = BigInt::from(5) * at(0, 1) + BigInt::from(10) * at(1, 1)
                - BigInt::from(20) * at(2, 1)
                + example_abelian_inverse_coefficient(i, k);
            c.insert((i, k), value);
        }
    }
    c
}

/// `2^i 5^k`, if it fits.
pub fn smooth_index(i: u32, k: u32) -> Option<u64> {
    2u64.checked_pow(i)?.checked_mul(5u64.checked_pow(k)?)
}
