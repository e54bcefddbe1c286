//! Pattern-deletion experiments and degradation curves.
//!
//! Deleting patterns derives a new engine; the original is never mutated.
//! Two modes differ in what survives the deletion:
//!
//! * `Frozen` keeps the similarity side (profiles, families) exactly as
//!   built on the base corpus and only shrinks the support population. Every
//!   candidate's nearest-neighbor score is then non-increasing step by step,
//!   since each step maximizes over a subset of the previous supports.
//! * `Recompute` rebuilds profiles, similarities and families from the
//!   reduced corpus, modeling total loss of the deleted knowledge.
//!
//! Random deletion draws from ChaCha8 seeded with a caller-supplied 64-bit
//! seed; index selection uses explicit rejection sampling (below), so a
//! report is reproducible from (corpus, config, seed) alone.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::PatternId;
use crate::engine::{Engine, Judgment};
use crate::error::{Error, Result};
use crate::similarity::{self, Score};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationMode {
    Frozen,
    Recompute,
}

impl AblationMode {
    pub fn render(&self) -> &'static str {
        match self {
            AblationMode::Frozen => "frozen",
            AblationMode::Recompute => "recompute",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "frozen" => Ok(AblationMode::Frozen),
            "recompute" => Ok(AblationMode::Recompute),
            other => Err(Error::Config(format!(
                "unknown ablation mode {other:?}, expected frozen or recompute"
            ))),
        }
    }
}

/// What to delete, step by step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeletionPlan {
    /// One entry per step, each listing the pattern ids deleted at that step.
    Explicit(Vec<Vec<PatternId>>),
    /// `steps` rounds, each deleting `max(1, floor(fraction * remaining))`
    /// patterns drawn uniformly without replacement from the survivors.
    Random {
        fraction: Score,
        steps: usize,
        seed: u64,
    },
}

impl DeletionPlan {
    pub fn validate(&self) -> Result<()> {
        match self {
            DeletionPlan::Explicit(_) => Ok(()),
            DeletionPlan::Random {
                fraction, steps, ..
            } => {
                if *fraction <= similarity::zero() || *fraction >= similarity::one() {
                    return Err(Error::Config(format!(
                        "deletion fraction must be in (0, 1), got {}",
                        similarity::render_score(fraction)
                    )));
                }
                if *steps == 0 {
                    return Err(Error::Config("random plan needs at least one step".into()));
                }
                Ok(())
            }
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            DeletionPlan::Explicit(_) => None,
            DeletionPlan::Random { seed, .. } => Some(*seed),
        }
    }

    fn step_count(&self) -> usize {
        match self {
            DeletionPlan::Explicit(steps) => steps.len(),
            DeletionPlan::Random { steps, .. } => *steps,
        }
    }
}

/// Uniform draw from `0..bound` by rejecting the tail of the 64-bit range
/// that does not divide evenly. Fixed here so that equal seeds give equal
/// reports on any implementation of the same scheme.
fn sample_index(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let limit = u64::MAX - u64::MAX % bound;
    loop {
        let draw = rng.next_u64();
        if draw < limit {
            return draw % bound;
        }
    }
}

fn random_step_size(fraction: &Score, remaining: u64) -> u64 {
    let k = (remaining as u128 * *fraction.numer() as u128 / *fraction.denom() as u128) as u64;
    k.max(1)
}

impl Engine {
    /// Derive an engine with the given patterns deleted. `Frozen` keeps this
    /// engine's similarity knowledge; `Recompute` rebuilds it from what is
    /// left. The receiver is untouched.
    pub fn delete_patterns(&self, ids: &[PatternId], mode: AblationMode) -> Result<Engine> {
        let reduced = std::sync::Arc::new(self.store().without_patterns(ids)?);
        match mode {
            AblationMode::Frozen => Ok(Engine::from_parts(
                reduced,
                self.knowledge_shared(),
                self.options().clone(),
            )),
            AblationMode::Recompute => Engine::build_shared(reduced, self.options().clone()),
        }
    }
}

/// Per-step measurements of a degradation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub step: usize,
    /// Pattern ids deleted to reach this step (empty at step 0).
    pub deleted: Vec<PatternId>,
    pub remaining_patterns: u64,
    pub judgments: Vec<Judgment>,
    /// Candidates whose own support list ties across several patterns.
    pub tied_supports: u64,
    /// Index pairs of same-length candidates judged exactly equal.
    pub equal_pairs: Vec<(usize, usize)>,
    /// Exact mean of the candidates' nearest-neighbor scores.
    pub mean_nn: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AblationReport {
    pub mode: AblationMode,
    pub plan: DeletionPlan,
    pub base_fingerprint: String,
    pub candidate_texts: Vec<String>,
    pub steps: Vec<StepReport>,
}

fn mean_score(judgments: &[Judgment]) -> BigRational {
    if judgments.is_empty() {
        return BigRational::from_integer(BigInt::from(0));
    }
    let sum: BigRational = judgments
        .iter()
        .map(|j| {
            BigRational::new(
                BigInt::from(*j.nn_score.numer()),
                BigInt::from(*j.nn_score.denom()),
            )
        })
        .sum();
    sum / BigRational::from_integer(BigInt::from(judgments.len() as u64))
}

fn equal_pairs(judgments: &[Judgment]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..judgments.len() {
        for j in (i + 1)..judgments.len() {
            if judgments[i].surfaces.len() == judgments[j].surfaces.len()
                && judgments[i].rank_key() == judgments[j].rank_key()
            {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Judge every candidate on an engine and fold the step-level statistics.
pub fn measure_step(
    engine: &Engine,
    step: usize,
    deleted: Vec<PatternId>,
    candidates: &[String],
) -> Result<StepReport> {
    let judgments = candidates
        .iter()
        .map(|line| engine.judge_line(line))
        .collect::<Result<Vec<_>>>()?;
    let tied_supports = judgments.iter().filter(|j| j.tied_support).count() as u64;
    let equal_pairs = equal_pairs(&judgments);
    let mean_nn = mean_score(&judgments);
    Ok(StepReport {
        step,
        deleted,
        remaining_patterns: engine.store().patterns().len() as u64,
        judgments,
        tied_supports,
        equal_pairs,
        mean_nn,
    })
}

/// Run a stepwise deletion schedule and measure every step.
///
/// Step 0 is always the unablated engine. The whole schedule is validated
/// against pattern counts before any scoring happens; a schedule that would
/// leave no pattern at some step is rejected up front.
pub fn degradation_curve(
    base: &Engine,
    candidates: &[String],
    plan: &DeletionPlan,
    mode: AblationMode,
) -> Result<AblationReport> {
    if candidates.is_empty() {
        return Err(Error::Config("no candidates to score".into()));
    }
    plan.validate()?;

    // dry-run the whole schedule before scoring anything: explicit ids must
    // exist (and not repeat across steps), and at least one pattern must
    // survive every step
    let mut live: std::collections::BTreeSet<PatternId> =
        base.store().patterns().iter().map(|p| p.id).collect();
    for step in 1..=plan.step_count() {
        match plan {
            DeletionPlan::Explicit(steps) => {
                // duplicates within one step collapse, like delete_patterns
                let step_ids: std::collections::BTreeSet<PatternId> =
                    steps[step - 1].iter().copied().collect();
                for id in step_ids {
                    if !live.remove(&id) {
                        return Err(Error::UnknownPattern { id: id.0 });
                    }
                }
            }
            DeletionPlan::Random { fraction, .. } => {
                let k = random_step_size(fraction, live.len() as u64);
                let doomed: Vec<PatternId> = live.iter().take(k as usize).copied().collect();
                for id in doomed {
                    live.remove(&id);
                }
            }
        }
        if live.is_empty() {
            return Err(Error::ExhaustedCorpus { step });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed().unwrap_or(0));
    let mut steps = Vec::with_capacity(plan.step_count() + 1);
    steps.push(measure_step(base, 0, Vec::new(), candidates)?);

    let mut current = base.clone();
    for step in 1..=plan.step_count() {
        let deleted: Vec<PatternId> = match plan {
            DeletionPlan::Explicit(ids) => ids[step - 1].clone(),
            DeletionPlan::Random { fraction, .. } => {
                let mut live: Vec<PatternId> =
                    current.store().patterns().iter().map(|p| p.id).collect();
                let k = random_step_size(fraction, live.len() as u64) as usize;
                let mut picked = Vec::with_capacity(k);
                for _ in 0..k {
                    let idx = sample_index(&mut rng, live.len() as u64) as usize;
                    picked.push(live.swap_remove(idx));
                }
                picked.sort_unstable();
                picked
            }
        };
        current = current.delete_patterns(&deleted, mode)?;
        steps.push(measure_step(&current, step, deleted, candidates)?);
    }

    Ok(AblationReport {
        mode,
        plan: plan.clone(),
        base_fingerprint: base.store().fingerprint().to_string(),
        candidate_texts: candidates.to_vec(),
        steps,
    })
}
