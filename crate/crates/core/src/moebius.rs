//! Möbius function of a subgroup lattice and the series built from it.

use num_bigint::BigInt;
use thiserror::Error;

use crate::dseries::{DirichletSeries, SeriesError};
use crate::permgroup::{GroupError, PermGroup, Subgroup, SubgroupLattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoebiusError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `mu(H, G)` for every subgroup `H` of a lattice, indexed like the lattice.
#[derive(Clone, Debug)]
pub struct MoebiusTable {
    lattice: SubgroupLattice,
    mu: Vec<i64>,
}

impl MoebiusTable {
    /// Top-down: `mu(G, G) = 1`, `mu(H, G) = -sum_{H < K <= G} mu(K, G)`.
    pub fn new(lattice: SubgroupLattice) -> MoebiusTable {
        let n = lattice.len();
        let mut mu = vec![0i64; n];
        for i in (0..n).rev() {
            if i == lattice.top() {
                mu[i] = 1;
                continue;
            }
            let sum = lattice
                .strictly_above(i)
                .iter()
                .try_fold(0i64, |acc, &j| acc.checked_add(mu[j]))
                .expect("Möbius value overflow");
            mu[i] = -sum;
        }
        MoebiusTable { lattice, mu }
    }

    /// Rebuilds from stored values; callers are responsible for consistency.
    pub(crate) fn from_parts(lattice: SubgroupLattice, mu: Vec<i64>) -> MoebiusTable {
        assert_eq!(lattice.len(), mu.len());
        MoebiusTable { lattice, mu }
    }

    pub fn lattice(&self) -> &SubgroupLattice {
        &self.lattice
    }

    pub fn group(&self) -> &PermGroup {
        self.lattice.group()
    }

    pub fn values(&self) -> &[i64] {
        &self.mu
    }

    pub fn mu(&self, i: usize) -> i64 {
        self.mu[i]
    }

    pub fn mu_of(&self, h: &Subgroup) -> Option<i64> {
        self.lattice.position(h).map(|i| self.mu[i])
    }

    /// `P_G(s)`: coefficient at `n` is the sum of `mu(H, G)` over subgroups of
    /// index `n`.
    pub fn group_series(&self, bound: u64) -> Result<DirichletSeries, SeriesError> {
        self.series_over(bound, |_| true)
    }

    /// `P_{G,N}(s)`: as [`Self::group_series`] but only over `H` with `HN = G`.
    pub fn relative_series(
        &self,
        n: &Subgroup,
        bound: u64,
    ) -> Result<DirichletSeries, MoebiusError> {
        let group = self.group();
        if !group.is_normal(n) {
            return Err(GroupError::NotNormal.into());
        }
        let mut covers = Vec::with_capacity(self.lattice.len());
        for h in self.lattice.subgroups() {
            covers.push(group.product_covers(h, n)?);
        }
        Ok(self.series_over(bound, |i| covers[i])?)
    }

    fn series_over(
        &self,
        bound: u64,
        keep: impl Fn(usize) -> bool,
    ) -> Result<DirichletSeries, SeriesError> {
        if bound == 0 {
            return Err(SeriesError::ZeroBound);
        }
        let mut sums: std::collections::BTreeMap<u64, BigInt> = std::collections::BTreeMap::new();
        for i in 0..self.lattice.len() {
            let index = self.lattice.index(i);
            if index > bound || self.mu[i] == 0 || !keep(i) {
                continue;
            }
            *sums.entry(index).or_default() += self.mu[i];
        }
        DirichletSeries::new(sums, bound)
    }

    /// `b_n(G)`: subgroups of index `n` with nonzero Möbius value.
    pub fn b_count(&self, n: u64) -> usize {
        (0..self.lattice.len())
            .filter(|&i| self.mu[i] != 0 && self.lattice.index(i) == n)
            .count()
    }

    /// Recomputes every interval sum `sum_{H <= K <= G} mu(K, G)` and returns
    /// the positions of proper subgroups where it is not zero.
    pub fn interval_sum_violations(&self) -> Vec<usize> {
        let top = self.lattice.top();
        (0..self.lattice.len())
            .filter(|&i| i != top)
            .filter(|&i| {
                let above: i64 = self
                    .lattice
                    .strictly_above(i)
                    .iter()
                    .map(|&j| self.mu[j])
                    .sum();
                above + self.mu[i] != 0
            })
            .collect()
    }

    /// Positions with `mu != 0` that are not an intersection of maximal
    /// subgroups.
    pub fn nonzero_outside_maximal_meets(&self) -> Vec<usize> {
        let lattice = &self.lattice;
        let top = lattice.top();
        let maximal = lattice.maximal();
        let subgroups = lattice.subgroups();
        (0..lattice.len())
            .filter(|&i| i != top && self.mu[i] != 0)
            .filter(|&i| {
                let h = &subgroups[i];
                let mut meet = subgroups[top].members().clone();
                for &m in &maximal {
                    if h.is_subgroup_of(&subgroups[m]) {
                        meet = meet.intersection(subgroups[m].members());
                    }
                }
                meet != *h.members()
            })
            .collect()
    }

    /// Checks `P_G = P_{G/N} * P_{G,N}` up to `bound`, with `G/N` realized on
    /// the cosets of `N`.
    pub fn quotient_factorization_check(
        &self,
        n: &Subgroup,
        bound: u64,
        order_limit: usize,
        lattice_limit: usize,
    ) -> Result<bool, MoebiusError> {
        let quotient = self.group().quotient(n, order_limit)?;
        let quotient_table = MoebiusTable::new(quotient.enumerate_subgroups(lattice_limit)?);
        let lhs = self.group_series(bound)?;
        let rhs = quotient_table
            .group_series(bound)?
            .mul(&self.relative_series(n, bound)?);
        Ok(lhs == rhs)
    }
}

/// `P_G(s)` straight from a lattice.
pub fn group_series(lattice: &SubgroupLattice, bound: u64) -> Result<DirichletSeries, SeriesError> {
    MoebiusTable::new(lattice.clone()).group_series(bound)
}
