use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng::rng_from_seed;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_count: usize,
    pub test_count: usize,
    /// Training trajectories whose RUL labels the estimator may use.
    pub rul_supervision_count: usize,
}

impl SplitSpec {
    pub fn new(train_count: usize, test_count: usize, rul_supervision_count: usize) -> Self {
        Self {
            train_count,
            test_count,
            rul_supervision_count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.train_count == 0 || self.test_count == 0 || self.rul_supervision_count == 0 {
            return Err(Error::InvalidArgument("split counts must be positive".into()));
        }
        if self.rul_supervision_count > self.train_count {
            return Err(Error::InvalidArgument("supervision count exceeds train count".into()));
        }
        Ok(())
    }
}

/// Disjoint index sets into a fleet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Subset of `train`.
    pub supervision: Vec<usize>,
}

impl Split {
    pub fn select<T: Clone>(indices: &[usize], fleet: &[T]) -> Vec<T> {
        indices.iter().map(|&i| fleet[i].clone()).collect()
    }
}

/// Shuffles `0..fleet_size` and carves train, test and supervision sets.
pub fn split(fleet_size: usize, spec: &SplitSpec, seed: u64) -> Result<Split> {
    spec.validate()?;
    let requested = spec.train_count + spec.test_count;
    if fleet_size < requested {
        return Err(Error::InsufficientFleet {
            available: fleet_size,
            requested,
        });
    }
    let mut idx: Vec<usize> = (0..fleet_size).collect();
    idx.shuffle(&mut rng_from_seed(seed));
    let train = idx[..spec.train_count].to_vec();
    let test = idx[spec.train_count..requested].to_vec();
    let supervision = train[..spec.rul_supervision_count].to_vec();
    Ok(Split {
        train,
        test,
        supervision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn varying_load_counts_are_disjoint() {
        let s = split(200, &SplitSpec::new(100, 100, 1), 4).unwrap();
        assert_eq!((s.train.len(), s.test.len(), s.supervision.len()), (100, 100, 1));
        let train: HashSet<_> = s.train.iter().collect();
        assert!(s.test.iter().all(|i| !train.contains(i)));
        assert!(train.contains(&s.supervision[0]));
    }

    #[test]
    fn constant_load_counts() {
        let s = split(100, &SplitSpec::new(70, 30, 1), 0).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (70, 30));
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = SplitSpec::new(5, 5, 2);
        assert_eq!(split(10, &spec, 8).unwrap(), split(10, &spec, 8).unwrap());
        assert_ne!(split(10, &spec, 8).unwrap(), split(10, &spec, 9).unwrap());
    }

    #[test]
    fn insufficient_fleet_and_bad_spec() {
        assert!(matches!(
            split(10, &SplitSpec::new(8, 5, 1), 0),
            Err(Error::InsufficientFleet { available: 10, requested: 13 })
        ));
        assert!(split(10, &SplitSpec::new(2, 2, 3), 0).is_err());
    }
}
