//! Simulated-annealing descriptor subset selection.
//!
//! State: a fixed-size descriptor subset. Move: swap one selected descriptor
//! for one unselected, both drawn uniformly. Objective: leave-one-out q² of
//! the chosen method fit on the candidate subset. Moves that do not lower the
//! objective are always accepted, others with probability exp(Δq²/T) under a
//! geometric cooling schedule. A candidate whose fit fails scores −∞ and the
//! chain keeps going. The best subset ever evaluated is returned.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Dataset;
use crate::regression::{Method, ModelSpec};
use crate::rng::{self, ChaCha8Rng};
use crate::validation;

#[derive(Debug, Error, PartialEq)]
pub enum SelectError {
    #[error("subset size {k} exceeds the {p} available descriptors")]
    SubsetTooLarge { k: usize, p: usize },
    #[error("subset size must be at least 1")]
    EmptySubset,
    #[error("bad annealing config: {0}")]
    BadConfig(String),
}

/// Annealing schedule and seed. Defaults follow the usual geometric schedule:
/// T₀ = 1.0, cooling 0.9, 50 steps per temperature, stop below 1e−3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SAConfig {
    pub subset_size: usize,
    pub t_initial: f64,
    pub cooling: f64,
    pub steps_per_temp: usize,
    pub t_min: f64,
    pub rng_seed: u64,
}

impl Default for SAConfig {
    fn default() -> Self {
        SAConfig {
            subset_size: 5,
            t_initial: 1.0,
            cooling: 0.9,
            steps_per_temp: 50,
            t_min: 1e-3,
            rng_seed: 0,
        }
    }
}

impl SAConfig {
    fn validate(&self) -> Result<(), SelectError> {
        if self.subset_size == 0 {
            return Err(SelectError::EmptySubset);
        }
        if !(self.t_initial > 0.0) {
            return Err(SelectError::BadConfig("t_initial must be > 0".into()));
        }
        if !(self.t_min > 0.0) {
            return Err(SelectError::BadConfig("t_min must be > 0".into()));
        }
        if self.t_min >= self.t_initial {
            return Err(SelectError::BadConfig(
                "t_min must be below t_initial".into(),
            ));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(SelectError::BadConfig("cooling must be in (0, 1)".into()));
        }
        if self.steps_per_temp == 0 {
            return Err(SelectError::BadConfig(
                "steps_per_temp must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One annealing step: the candidate's objective, whether it was accepted,
/// and the best objective seen so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SATraceRecord {
    pub step: usize,
    pub temperature: f64,
    pub objective: f64,
    pub accepted: bool,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SATrace {
    pub records: Vec<SATraceRecord>,
}

impl SATrace {
    /// CSV with header `step,temperature,objective,accepted,best`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "step,temperature,objective,accepted,best")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.step, r.temperature, r.objective, r.accepted, r.best
            )?;
        }
        Ok(())
    }
}

/// Winning subset with its objective and the full chain trace.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    pub descriptors: Vec<String>,
    pub objective: f64,
    pub trace: SATrace,
}

/// LOO q² of `method` on the subset, −∞ when the fit or validation fails.
fn objective(ds: &Dataset, method: Method, subset: &[usize]) -> f64 {
    let descriptors: Vec<String> = subset
        .iter()
        .map(|&i| ds.matrix.descriptor_names[i].clone())
        .collect();
    let spec = ModelSpec {
        method,
        n_components: descriptors.len(),
        descriptors,
    };
    match validation::loo_q2(ds, &spec) {
        Ok(loo) => loo.q2,
        Err(_) => f64::NEG_INFINITY,
    }
}

fn subset_names(ds: &Dataset, subset: &[usize]) -> Vec<String> {
    subset
        .iter()
        .map(|&i| ds.matrix.descriptor_names[i].clone())
        .collect()
}

/// Anneals over size-`cfg.subset_size` descriptor subsets of `ds`.
pub fn sa_select(
    ds: &Dataset,
    method: Method,
    cfg: &SAConfig,
) -> Result<SelectionOutcome, SelectError> {
    cfg.validate()?;
    let p = ds.matrix.n_descriptors();
    let k = cfg.subset_size;
    if k > p {
        return Err(SelectError::SubsetTooLarge { k, p });
    }

    let mut rng: ChaCha8Rng = rng::seeded(cfg.rng_seed);

    // Initial subset: uniform without replacement, kept sorted.
    let mut pool: Vec<usize> = (0..p).collect();
    rng::shuffle(&mut pool, &mut rng);
    let mut current: Vec<usize> = pool[..k].to_vec();
    current.sort_unstable();
    let mut unselected: Vec<usize> = pool[k..].to_vec();
    unselected.sort_unstable();

    let mut current_obj = objective(ds, method, &current);
    let mut best = current.clone();
    let mut best_obj = current_obj;

    let mut trace = SATrace::default();
    trace.records.push(SATraceRecord {
        step: 0,
        temperature: cfg.t_initial,
        objective: current_obj,
        accepted: true,
        best: best_obj,
    });

    if k == p {
        // Only one state exists; nothing to anneal.
        return Ok(SelectionOutcome {
            descriptors: subset_names(ds, &best),
            objective: best_obj,
            trace,
        });
    }

    let mut temperature = cfg.t_initial;
    let mut step = 1;
    loop {
        for _ in 0..cfg.steps_per_temp {
            let out_pos = rng.random_range(0..current.len());
            let in_pos = rng.random_range(0..unselected.len());

            let mut candidate = current.clone();
            candidate[out_pos] = unselected[in_pos];
            candidate.sort_unstable();
            let cand_obj = objective(ds, method, &candidate);

            let accepted = if cand_obj >= current_obj {
                true
            } else {
                let p_accept = ((cand_obj - current_obj) / temperature).exp();
                rng.random::<f64>() < p_accept
            };
            if accepted {
                let leaving = current[out_pos];
                unselected[in_pos] = leaving;
                unselected.sort_unstable();
                current = candidate.clone();
                current_obj = cand_obj;
            }
            if cand_obj > best_obj {
                best_obj = cand_obj;
                best = candidate;
            }
            trace.records.push(SATraceRecord {
                step,
                temperature,
                objective: cand_obj,
                accepted,
                best: best_obj,
            });
            step += 1;
        }
        temperature *= cfg.cooling;
        if temperature < cfg.t_min {
            break;
        }
    }

    Ok(SelectionOutcome {
        descriptors: subset_names(ds, &best),
        objective: best_obj,
        trace,
    })
}

/// Runs one chain per seed and keeps the best outcome; ties go to the
/// earliest chain, so the result is deterministic given the seed list.
pub fn sa_select_chains(
    ds: &Dataset,
    method: Method,
    cfg: &SAConfig,
    seeds: &[u64],
) -> Result<(SelectionOutcome, usize), SelectError> {
    assert!(!seeds.is_empty(), "need at least one chain seed");
    let mut best: Option<(SelectionOutcome, usize)> = None;
    for (chain, &seed) in seeds.iter().enumerate() {
        let chain_cfg = SAConfig {
            rng_seed: seed,
            ..cfg.clone()
        };
        let outcome = sa_select(ds, method, &chain_cfg)?;
        let replace = match &best {
            None => true,
            Some((cur, _)) => outcome.objective > cur.objective,
        };
        if replace {
            best = Some((outcome, chain));
        }
    }
    Ok(best.expect("at least one chain ran"))
}
