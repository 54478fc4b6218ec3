//! Sphere-exclusion train/test splitting.
//!
//! Centers are picked one at a time and become training compounds; everything
//! inside the sphere of radius R around a center is pushed to the test set.
//! The first center is the compound with the highest activity, later centers
//! are the unassigned compounds farthest from the existing training set, with
//! ascending-id tie-breaks throughout. Distances are Euclidean in
//! standardized descriptor space and R = d·√K, so the dissimilarity level d
//! is scale-free. Raising d grows the spheres and therefore the test set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Dataset;
use crate::linalg::{euclidean, Matrix};
use crate::preprocess;

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("dataset needs at least 2 compounds, got {0}")]
    TooFewRows(usize),
    #[error("dissimilarity must be non-negative, got {0}")]
    NegativeDissimilarity(f64),
    #[error("seed index {index} out of range for {n} compounds")]
    BadSeedIndex { index: usize, n: usize },
    #[error("standardization failed: {0}")]
    Preprocess(String),
}

#[derive(Debug, Error)]
pub enum TuneError {
    #[error("target test size {0} must be strictly between 0 and the compound count")]
    BadTarget(usize),
    #[error(
        "no dissimilarity in [0, {d_max}] reaches a test set of {target}; best found {achieved} at d = {d}"
    )]
    Unreachable {
        target: usize,
        achieved: usize,
        d: f64,
        d_max: f64,
        best: Box<SplitAssignment>,
    },
    #[error(transparent)]
    Split(#[from] SplitError),
}

/// How the first sphere center is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedRule {
    MaxActivity,
    Index(usize),
}

/// A train/test partition with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssignment {
    #[serde(rename = "train")]
    pub train_ids: Vec<String>,
    #[serde(rename = "test")]
    pub test_ids: Vec<String>,
    #[serde(rename = "d")]
    pub dissimilarity: f64,
    pub radius: f64,
    pub seed_rule: SeedRule,
}

impl SplitAssignment {
    pub fn n_train(&self) -> usize {
        self.train_ids.len()
    }

    pub fn n_test(&self) -> usize {
        self.test_ids.len()
    }

    /// Row indices of train and test compounds within `ds`, in dataset order.
    pub fn row_indices(&self, ds: &Dataset) -> (Vec<usize>, Vec<usize>) {
        let train: Vec<usize> = ds
            .ids()
            .iter()
            .enumerate()
            .filter(|(_, id)| self.train_ids.contains(id))
            .map(|(i, _)| i)
            .collect();
        let test: Vec<usize> = ds
            .ids()
            .iter()
            .enumerate()
            .filter(|(_, id)| self.test_ids.contains(id))
            .map(|(i, _)| i)
            .collect();
        (train, test)
    }
}

/// Default upper bound of the dissimilarity search interval.
pub const DEFAULT_D_MAX: f64 = 10.0;
/// Bisection depth of the tuner.
pub const BISECTION_DEPTH: usize = 60;

#[derive(Clone, Copy, PartialEq)]
enum Assignment {
    Unassigned,
    Train,
    Test,
}

fn first_center(activity: &[f64], ids: &[String], rule: SeedRule) -> Result<usize, SplitError> {
    match rule {
        SeedRule::Index(index) => {
            if index >= ids.len() {
                return Err(SplitError::BadSeedIndex {
                    index,
                    n: ids.len(),
                });
            }
            Ok(index)
        }
        SeedRule::MaxActivity => {
            let mut best = 0;
            for i in 1..ids.len() {
                let better = activity[i] > activity[best]
                    || (activity[i] == activity[best] && ids[i] < ids[best]);
                if better {
                    best = i;
                }
            }
            Ok(best)
        }
    }
}

/// Sphere exclusion over rows that are already in standardized coordinates,
/// with an explicit radius.
pub fn split_by_radius(
    points: &Matrix,
    activity: &[f64],
    ids: &[String],
    radius: f64,
    dissimilarity: f64,
    seed_rule: SeedRule,
) -> Result<SplitAssignment, SplitError> {
    let n = points.rows();
    if n < 2 {
        return Err(SplitError::TooFewRows(n));
    }
    assert_eq!(activity.len(), n);
    assert_eq!(ids.len(), n);

    let mut state = vec![Assignment::Unassigned; n];
    let mut train: Vec<usize> = Vec::new();
    let mut center = first_center(activity, ids, seed_rule)?;

    loop {
        state[center] = Assignment::Train;
        train.push(center);
        for j in 0..n {
            if state[j] == Assignment::Unassigned
                && euclidean(points.row(center), points.row(j)) <= radius
            {
                state[j] = Assignment::Test;
            }
        }

        // Next center: unassigned compound farthest from the training set.
        let mut next: Option<(usize, f64)> = None;
        for j in 0..n {
            if state[j] != Assignment::Unassigned {
                continue;
            }
            let dist = train
                .iter()
                .map(|&t| euclidean(points.row(t), points.row(j)))
                .fold(f64::INFINITY, f64::min);
            let replace = match next {
                None => true,
                Some((cur, best)) => dist > best || (dist == best && ids[j] < ids[cur]),
            };
            if replace {
                next = Some((j, dist));
            }
        }
        match next {
            Some((j, _)) => center = j,
            None => break,
        }
    }

    if cfg!(debug_assertions) {
        // Separation: training compounds pairwise farther than R apart.
        for (a, &i) in train.iter().enumerate() {
            for &j in &train[a + 1..] {
                debug_assert!(
                    euclidean(points.row(i), points.row(j)) > radius,
                    "train separation violated"
                );
            }
        }
        // Coverage: every test compound within R of some training compound.
        for j in 0..n {
            if state[j] == Assignment::Test {
                let nearest = train
                    .iter()
                    .map(|&t| euclidean(points.row(t), points.row(j)))
                    .fold(f64::INFINITY, f64::min);
                debug_assert!(nearest <= radius, "test coverage violated");
            }
        }
    }

    let train_ids = ids
        .iter()
        .enumerate()
        .filter(|(i, _)| state[*i] == Assignment::Train)
        .map(|(_, id)| id.clone())
        .collect();
    let test_ids = ids
        .iter()
        .enumerate()
        .filter(|(i, _)| state[*i] == Assignment::Test)
        .map(|(_, id)| id.clone())
        .collect();
    Ok(SplitAssignment {
        train_ids,
        test_ids,
        dissimilarity,
        radius,
        seed_rule,
    })
}

/// Splits a dataset at dissimilarity level `d`: descriptors are standardized
/// internally and the sphere radius is R = d·√K.
pub fn sphere_exclusion_split(ds: &Dataset, d: f64) -> Result<SplitAssignment, SplitError> {
    sphere_exclusion_split_with_rule(ds, d, SeedRule::MaxActivity)
}

pub fn sphere_exclusion_split_with_rule(
    ds: &Dataset,
    d: f64,
    seed_rule: SeedRule,
) -> Result<SplitAssignment, SplitError> {
    if d < 0.0 {
        return Err(SplitError::NegativeDissimilarity(d));
    }
    let n = ds.n_compounds();
    if n < 2 {
        return Err(SplitError::TooFewRows(n));
    }
    let (standardized, _) =
        preprocess::standardize(&ds.matrix).map_err(|e| SplitError::Preprocess(e.to_string()))?;
    let radius = d * (ds.matrix.n_descriptors() as f64).sqrt();
    split_by_radius(
        &standardized.values,
        &ds.activity,
        ds.ids(),
        radius,
        d,
        seed_rule,
    )
}

/// Tuner output: the chosen dissimilarity, its split, and every
/// (d, test-set size) probe observed along the way.
#[derive(Debug, Clone)]
pub struct TuneResult {
    pub d: f64,
    pub assignment: SplitAssignment,
    pub probes: Vec<(f64, usize)>,
}

/// Finds by bisection the smallest probed d in [0, d_max] whose test set
/// reaches `target_test` compounds. The exact target may be unattainable, so
/// the returned assignment's achieved size can overshoot.
pub fn tune_dissimilarity(ds: &Dataset, target_test: usize) -> Result<TuneResult, TuneError> {
    tune_dissimilarity_with_max(ds, target_test, DEFAULT_D_MAX)
}

pub fn tune_dissimilarity_with_max(
    ds: &Dataset,
    target_test: usize,
    d_max: f64,
) -> Result<TuneResult, TuneError> {
    let n = ds.n_compounds();
    if target_test == 0 || target_test >= n {
        return Err(TuneError::BadTarget(target_test));
    }

    let mut probes = Vec::new();
    let mut probe = |d: f64| -> Result<SplitAssignment, SplitError> {
        let split = sphere_exclusion_split(ds, d)?;
        probes.push((d, split.n_test()));
        Ok(split)
    };

    let at_zero = probe(0.0)?;
    if at_zero.n_test() >= target_test {
        return Ok(TuneResult {
            d: 0.0,
            assignment: at_zero,
            probes,
        });
    }
    let at_max = probe(d_max)?;
    if at_max.n_test() < target_test {
        let achieved = at_max.n_test();
        return Err(TuneError::Unreachable {
            target: target_test,
            achieved,
            d: d_max,
            d_max,
            best: Box::new(at_max),
        });
    }

    let mut lo = 0.0;
    let mut hi = d_max;
    let mut best = at_max;
    for _ in 0..BISECTION_DEPTH {
        let mid = 0.5 * (lo + hi);
        let split = probe(mid)?;
        if split.n_test() >= target_test {
            hi = mid;
            best = split;
        } else {
            lo = mid;
        }
    }
    Ok(TuneResult {
        d: hi,
        assignment: best,
        probes,
    })
}
