//! Replay of the alternating-power construction at a fixed truncation.
//!
//! Starting from a seed group `G_1`, each step finds the first index `m` at
//! which the inverse series has a negative coefficient `c_m`, and multiplies
//! in `A_m^f` with `f = -c_m / m`. The new factor's inverse starts
//! `1 + f m / m^s`, which cancels `c_m` exactly and leaves every smaller
//! index untouched. A step is only taken when the truncated `A_m` series is
//! exact at the working bound, i.e. `m(m-1) >= bound`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{alternating_validity, CatalogError, EvalConfig, SeriesRecipe};
use crate::dseries::DirichletSeries;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("construction complete: no negative inverse coefficient up to {bound}")]
    Complete { bound: u64 },
    #[error(
        "bound exhausted: first negative coefficient at {index}, but A_{index} is not certified up to {bound}"
    )]
    BoundExhausted { index: u64, bound: u64 },
    #[error(
        "{index} does not divide c_{index} = {coeff}; the series is not that of a perfect group"
    )]
    Divisibility { index: u64, coeff: BigInt },
    #[error("first negative index {index} does not exceed the previous degree {previous}")]
    NotIncreasing { index: u64, previous: u64 },
    #[error("coefficient at {index} is {coeff} after the step, expected 0")]
    CancellationFailed { index: u64, coeff: BigInt },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// Snapshot of `G_k = G_1 x A_{m_2}^{f_2} x ... x A_{m_k}^{f_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionState {
    steps: Vec<(u64, BigUint)>,
    series: DirichletSeries,
    inverse: DirichletSeries,
    bound: u64,
    frontier: u64,
}

/// One trace line; serialized as `{"k":…,"m":…,"f":"…","frontier":…}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub m: u64,
    #[serde(with = "decimal_string")]
    pub f: BigUint,
    pub frontier: u64,
}

mod decimal_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

impl TraceRow {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace serialization cannot fail")
    }
}

/// Why [`run`] stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// No negative coefficient remains within the bound.
    Complete,
    /// The next negative index needs an alternating factor that is not exact
    /// at this bound.
    BoundExhausted {
        index: u64,
    },
    MaxSteps,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub state: ConstructionState,
    pub trace: Vec<TraceRow>,
    pub stop: StopReason,
}

/// Label used for the seed in the trace: the permutation degree of a lattice
/// group, `m` for `A_m`, and the largest such label inside products.
pub fn seed_degree(recipe: &SeriesRecipe) -> u64 {
    match recipe {
        SeriesRecipe::Lattice(spec) => spec.degree as u64,
        SeriesRecipe::Cyclic { order } => *order,
        SeriesRecipe::ElementaryAbelian { p, .. } => *p,
        SeriesRecipe::AlternatingTruncated { m } => *m,
        SeriesRecipe::BostonPower { base, .. } => seed_degree(base),
        SeriesRecipe::BrownProduct { factors } => {
            factors.iter().map(seed_degree).max().unwrap_or(1)
        }
    }
}

fn frontier_of(inverse: &DirichletSeries) -> u64 {
    match inverse.first_negative() {
        Some((n, _)) => n - 1,
        None => inverse.bound(),
    }
}

impl ConstructionState {
    /// `G_1` = the seed, with `f_1 = 1`.
    pub fn init(
        seed: &SeriesRecipe,
        bound: u64,
        config: &EvalConfig,
    ) -> Result<Self, ConstructError> {
        let series = seed.series(bound, config)?;
        let inverse = series.invert().map_err(CatalogError::from)?;
        Ok(ConstructionState {
            steps: vec![(seed_degree(seed), BigUint::one())],
            frontier: frontier_of(&inverse),
            series,
            inverse,
            bound,
        })
    }

    pub fn steps(&self) -> &[(u64, BigUint)] {
        &self.steps
    }

    pub fn series(&self) -> &DirichletSeries {
        &self.series
    }

    pub fn inverse(&self) -> &DirichletSeries {
        &self.inverse
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn frontier(&self) -> u64 {
        self.frontier
    }

    pub fn last_row(&self) -> TraceRow {
        let (m, f) = self.steps.last().cloned().expect("at least the seed");
        TraceRow {
            k: self.steps.len(),
            m,
            f,
            frontier: self.frontier,
        }
    }

    /// The next `(m, f)` without applying it.
    pub fn next_factor(&self) -> Result<(u64, BigUint), ConstructError> {
        let (index, coeff) = self
            .inverse
            .first_negative()
            .ok_or(ConstructError::Complete { bound: self.bound })?;
        let previous = self.steps.last().map(|(m, _)| *m).unwrap_or(0);
        if index <= previous {
            return Err(ConstructError::NotIncreasing { index, previous });
        }
        if index < 9 || alternating_validity(index) < self.bound {
            return Err(ConstructError::BoundExhausted {
                index,
                bound: self.bound,
            });
        }
        let (quotient, remainder) = coeff.div_rem(&BigInt::from(index));
        if !remainder.is_zero() {
            return Err(ConstructError::Divisibility { index, coeff });
        }
        let f = (-quotient)
            .to_biguint()
            .expect("negative coefficient gives positive multiplicity");
        Ok((index, f))
    }

    /// `G_{k+1} = G_k x A_m^f`.
    pub fn step(&self, config: &EvalConfig) -> Result<ConstructionState, ConstructError> {
        let (m, f) = self.next_factor()?;
        let factor = SeriesRecipe::alternating_power(m, f.clone()).series(self.bound, config)?;
        let series = self.series.mul(&factor);
        let inverse = series.invert().map_err(CatalogError::from)?;
        let cancelled = inverse.coeff(m).map_err(CatalogError::from)?;
        if !cancelled.is_zero() || cancelled.is_negative() {
            return Err(ConstructError::CancellationFailed {
                index: m,
                coeff: cancelled,
            });
        }
        let mut steps = self.steps.clone();
        steps.push((m, f));
        Ok(ConstructionState {
            steps,
            frontier: frontier_of(&inverse).max(self.frontier),
            series,
            inverse,
            bound: self.bound,
        })
    }
}

/// Steps from the seed until nothing negative remains, the bound is
/// exhausted, or `max_steps` factors have been added.
pub fn run(
    seed: &SeriesRecipe,
    bound: u64,
    max_steps: usize,
    config: &EvalConfig,
) -> Result<Construction, ConstructError> {
    let mut state = ConstructionState::init(seed, bound, config)?;
    let mut trace = vec![state.last_row()];
    let mut taken = 0;
    let stop = loop {
        if state.inverse.first_negative().is_none() {
            break StopReason::Complete;
        }
        if taken == max_steps {
            break StopReason::MaxSteps;
        }
        match state.step(config) {
            Ok(next) => {
                state = next;
                taken += 1;
                trace.push(state.last_row());
            }
            Err(ConstructError::BoundExhausted { index, .. }) => {
                break StopReason::BoundExhausted { index };
            }
            Err(e) => return Err(e),
        }
    };
    Ok(Construction { state, trace, stop })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::GroupSpec;

    fn a5() -> SeriesRecipe {
        SeriesRecipe::Lattice(GroupSpec::alternating(5))
    }

    #[test]
    fn init_examples() {
        let config = EvalConfig::default();
        let s = ConstructionState::init(&a5(), 380, &config).unwrap();
        assert_eq!(s.frontier(), 19);
        assert_eq!(s.steps(), &[(5, BigUint::one())]);
        let c2 = ConstructionState::init(&SeriesRecipe::Cyclic { order: 2 }, 100, &config).unwrap();
        assert_eq!(c2.frontier(), 100);
        let powers: Vec<u64> = c2.inverse().support().collect();
        assert_eq!(powers, vec![1, 2, 4, 8, 16, 32, 64]);
        let s3 = ConstructionState::init(
            &SeriesRecipe::Lattice(GroupSpec::symmetric(3)),
            100,
            &config,
        )
        .unwrap();
        assert_eq!(s3.frontier(), 100);
    }

    #[test]
    fn first_step_from_a5() {
        let config = EvalConfig::default();
        let s = ConstructionState::init(&a5(), 380, &config).unwrap();
        let next = s.step(&config).unwrap();
        assert_eq!(next.steps()[1], (20, BigUint::one()));
        assert_eq!(next.inverse().coeff(20).unwrap(), BigInt::zero());
        assert!(next.frontier() >= 20);
    }

    #[test]
    fn step_guards() {
        let config = EvalConfig::default();
        let s3 =
            ConstructionState::init(&SeriesRecipe::Lattice(GroupSpec::symmetric(3)), 50, &config)
                .unwrap();
        assert!(matches!(
            s3.step(&config),
            Err(ConstructError::Complete { bound: 50 })
        ));
        // 20 * 19 < 1000: A_20 is not certified that far.
        let wide = ConstructionState::init(&a5(), 1000, &config).unwrap();
        assert!(matches!(
            wide.step(&config),
            Err(ConstructError::BoundExhausted {
                index: 20,
                bound: 1000
            })
        ));
    }

    #[test]
    fn run_stops() {
        let config = EvalConfig::default();
        let zero = run(&a5(), 380, 0, &config).unwrap();
        assert_eq!(zero.stop, StopReason::MaxSteps);
        assert_eq!(zero.trace.len(), 1);
        assert_eq!(zero.state.steps().len(), 1);
        let s3 = run(
            &SeriesRecipe::Lattice(GroupSpec::symmetric(3)),
            100,
            5,
            &config,
        )
        .unwrap();
        assert_eq!(s3.stop, StopReason::Complete);
        assert_eq!(s3.trace.len(), 1);
        let wide = run(&a5(), 1000, 5, &config).unwrap();
        assert_eq!(wide.stop, StopReason::BoundExhausted { index: 20 });
    }

    #[test]
    fn trace_json_line() {
        let row = TraceRow {
            k: 2,
            m: 20,
            f: BigUint::one(),
            frontier: 39,
        };
        assert_eq!(
            row.to_json_line(),
            r#"{"k":2,"m":20,"f":"1","frontier":39}"#
        );
    }
}
