//! Acceptability judgments for candidate token sequences.
//!
//! Two complementary views are computed against the population:
//!
//! * the nearest-neighbor score: the best attested same-length n-gram, where
//!   each candidate slot is compared to the corresponding slot by token
//!   similarity and the weakest slot governs (max over the population of the
//!   per-slot minimum);
//! * the component view: the candidate's adjacent bigrams, each of which must
//!   be attested up to family substitution at some hierarchy level. The
//!   smallest level whose families cover enough components (the `tau`
//!   requirement) is the candidate's generality level.
//!
//! Out-of-vocabulary surfaces are admitted and scored with empty context
//! profiles: similarity 0 to every stored token.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use crate::colloc::{ContextProfile, ProfileSet};
use crate::corpus::{PatternId, PopulationStore, TokenId};
use crate::error::{Error, Result};
use crate::families::{FamilyHierarchy, Schedule};
use crate::similarity::{self, Score, SimilarityRow};

/// Window, threshold schedule and coverage requirement for an engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineOptions {
    pub window: usize,
    pub schedule: Schedule,
    pub tau: Score,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            window: 2,
            schedule: Schedule::standard(),
            tau: similarity::one(),
        }
    }
}

impl EngineOptions {
    pub fn validate(&self) -> Result<()> {
        if self.window < 1 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        if self.tau <= similarity::zero() || self.tau > similarity::one() {
            return Err(Error::Config(format!(
                "tau must be in (0, 1], got {}",
                similarity::render_score(&self.tau)
            )));
        }
        Ok(())
    }
}

/// The similarity side of an engine: context profiles and token families.
/// Shared untouched by frozen-mode ablation derivatives.
#[derive(Debug)]
pub struct Knowledge {
    pub profiles: ProfileSet,
    pub hierarchy: FamilyHierarchy,
}

/// A candidate sequence after normalization. Unknown surfaces keep `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub tokens: Vec<(String, Option<TokenId>)>,
}

impl Candidate {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn has_oov(&self) -> bool {
        self.tokens.iter().any(|(_, id)| id.is_none())
    }

    pub fn text(&self) -> String {
        self.tokens
            .iter()
            .map(|(s, _)| s.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Generality level required to support a candidate. Smaller is stricter;
/// `Unsupported` means no level of the schedule suffices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    At(usize),
    Unsupported,
}

impl Level {
    pub fn render(&self) -> String {
        match self {
            Level::At(l) => l.to_string(),
            Level::Unsupported => "unsupported".to_string(),
        }
    }
}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Level::At(a), Level::At(b)) => a.cmp(b),
            (Level::At(_), Level::Unsupported) => Ordering::Less,
            (Level::Unsupported, Level::At(_)) => Ordering::Greater,
            (Level::Unsupported, Level::Unsupported) => Ordering::Equal,
        }
    }
}

/// One attested n-gram location achieving the candidate's best score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Support {
    pub pattern: PatternId,
    pub offset: u32,
    pub slot_sims: Vec<Score>,
    pub min: Score,
}

/// The full verdict for one candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub surfaces: Vec<String>,
    pub tokens: Vec<Option<TokenId>>,
    pub oov: bool,
    pub nn_score: Score,
    /// Weighted size of the same-length attested population; 0 means the
    /// nearest-neighbor view had nothing to compare against.
    pub population: u64,
    pub supports: Vec<Support>,
    /// Two or more distinct patterns achieve the maximal score.
    pub tied_support: bool,
    pub level: Level,
    /// Component coverage at `level`, or at the widest level when unsupported.
    pub coverage: Score,
}

impl Judgment {
    pub fn text(&self) -> String {
        self.surfaces.join(" ")
    }

    /// Ordering key: level ascending, then score descending, then coverage
    /// descending. Candidates are "equal" when all three agree.
    pub fn rank_key(&self) -> (Level, std::cmp::Reverse<Score>, std::cmp::Reverse<Score>) {
        (
            self.level,
            std::cmp::Reverse(self.nn_score),
            std::cmp::Reverse(self.coverage),
        )
    }
}

/// Immutable scoring engine: population store plus similarity knowledge.
/// Safe to share across threads; concurrent queries match sequential runs.
#[derive(Debug, Clone)]
pub struct Engine {
    store: Arc<PopulationStore>,
    knowledge: Arc<Knowledge>,
    /// Per level: attested bigrams lifted to family-index pairs.
    family_bigrams: Vec<HashSet<(u32, u32)>>,
    options: EngineOptions,
}

impl Engine {
    pub fn build(store: PopulationStore, options: EngineOptions) -> Result<Engine> {
        Self::build_shared(Arc::new(store), options)
    }

    pub fn build_shared(store: Arc<PopulationStore>, options: EngineOptions) -> Result<Engine> {
        options.validate()?;
        let profiles = ProfileSet::build(&store, options.window)?;
        let hierarchy = FamilyHierarchy::build(&profiles, options.schedule.clone());
        let knowledge = Arc::new(Knowledge {
            profiles,
            hierarchy,
        });
        Ok(Self::from_parts(store, knowledge, options))
    }

    /// Combine an existing similarity side with a (possibly reduced) store.
    pub(crate) fn from_parts(
        store: Arc<PopulationStore>,
        knowledge: Arc<Knowledge>,
        options: EngineOptions,
    ) -> Engine {
        let family_bigrams = knowledge
            .hierarchy
            .levels
            .iter()
            .map(|partition| {
                store
                    .bigram_pairs()
                    .iter()
                    .map(|&(a, b)| (partition.family(a), partition.family(b)))
                    .collect::<HashSet<_>>()
            })
            .collect();
        Engine {
            store,
            knowledge,
            family_bigrams,
            options,
        }
    }

    pub fn store(&self) -> &PopulationStore {
        &self.store
    }

    pub fn store_shared(&self) -> Arc<PopulationStore> {
        self.store.clone()
    }

    pub fn knowledge(&self) -> &Knowledge {
        &self.knowledge
    }

    pub fn knowledge_shared(&self) -> Arc<Knowledge> {
        self.knowledge.clone()
    }

    pub fn options(&self) -> &EngineOptions {
        &self.options
    }

    /// Same engine with a different coverage requirement. Cheap: tau only
    /// matters when a judgment picks its level.
    pub fn with_tau(&self, tau: Score) -> Result<Engine> {
        let mut engine = self.clone();
        engine.options.tau = tau;
        engine.options.validate()?;
        Ok(engine)
    }

    /// Normalize a candidate line with the store's ingest settings.
    pub fn candidate(&self, line: &str) -> Result<Candidate> {
        let tokens = self.store.resolve_candidate(line);
        if tokens.is_empty() {
            return Err(Error::EmptyCandidate);
        }
        Ok(Candidate { tokens })
    }

    /// Context profile of a surface form; unknown surfaces are an error.
    pub fn contexts(&self, surface: &str) -> Result<&ContextProfile> {
        let normalized = if self.store.config().lowercase {
            surface.to_lowercase()
        } else {
            surface.to_string()
        };
        let id = self
            .store
            .token_id(&normalized)
            .ok_or(Error::UnknownToken {
                surface: normalized,
            })?;
        Ok(self.knowledge.profiles.profile(id))
    }

    pub fn token_similarity(&self, a: TokenId, b: TokenId) -> Score {
        similarity::token_similarity(&self.knowledge.profiles, a, b)
    }

    /// Neighbors of a surface form at a similarity threshold.
    pub fn neighbors(&self, surface: &str, theta: Score) -> Result<Vec<(TokenId, Score)>> {
        let normalized = if self.store.config().lowercase {
            surface.to_lowercase()
        } else {
            surface.to_string()
        };
        let id = self
            .store
            .token_id(&normalized)
            .ok_or(Error::UnknownToken {
                surface: normalized,
            })?;
        similarity::neighbors(&self.knowledge.profiles, id, theta)
    }

    fn slot_row(&self, token: &Option<TokenId>) -> SimilarityRow {
        match token {
            Some(id) => SimilarityRow::compute(&self.knowledge.profiles, *id),
            None => SimilarityRow::out_of_vocabulary(&self.knowledge.profiles),
        }
    }

    /// Max-min nearest-neighbor score against the same-length population.
    /// Returns the score, every argmax location, and the weighted population
    /// size (0 when there is nothing of that length to compare against).
    pub fn nn_score(&self, candidate: &Candidate) -> Result<(Score, Vec<Support>, u64)> {
        if candidate.is_empty() {
            return Err(Error::EmptyCandidate);
        }
        let n = candidate.len();
        let population = self.store.population_for(n);
        if population.is_empty() {
            return Ok((similarity::zero(), Vec::new(), 0));
        }
        let rows: Vec<SimilarityRow> = candidate
            .tokens
            .iter()
            .map(|(_, id)| self.slot_row(id))
            .collect();
        let vocab = self.knowledge.profiles.len();
        let mut memo: Vec<Vec<Option<Score>>> = vec![vec![None; vocab]; n];
        let mut slot_sim = |slot: usize, token: TokenId| -> Score {
            let cached = &mut memo[slot][token.0 as usize];
            if let Some(s) = cached {
                return *s;
            }
            let s = rows[slot].score(&self.knowledge.profiles, token);
            *cached = Some(s);
            s
        };

        let mut best = similarity::zero();
        let mut best_grams: Vec<&[TokenId]> = Vec::new();
        let mut total: u64 = 0;
        let mut first = true;
        for (gram, entry) in population.iter() {
            total += entry.count;
            let mut min = similarity::one();
            for (slot, &token) in gram.iter().enumerate() {
                let s = slot_sim(slot, token);
                if s < min {
                    min = s;
                }
            }
            if first || min > best {
                best = min;
                best_grams = vec![gram.as_ref()];
                first = false;
            } else if min == best {
                best_grams.push(gram.as_ref());
            }
        }

        let mut supports = Vec::new();
        for gram in best_grams {
            let slot_sims: Vec<Score> = gram
                .iter()
                .enumerate()
                .map(|(slot, &token)| slot_sim(slot, token))
                .collect();
            let entry = &population[gram];
            for &(pattern, offset) in &entry.locations {
                supports.push(Support {
                    pattern,
                    offset,
                    slot_sims: slot_sims.clone(),
                    min: best,
                });
            }
        }
        supports.sort_by_key(|s| (s.pattern, s.offset));
        Ok((best, supports, total))
    }

    /// Family index of a candidate slot at a level; `None` when the token is
    /// out of vocabulary and the level is not the universal (threshold 0) one.
    fn candidate_family(&self, level: usize, token: &Option<TokenId>) -> Option<u32> {
        match token {
            Some(id) => Some(self.knowledge.hierarchy.levels[level].family(*id)),
            None => {
                let universal =
                    self.knowledge.hierarchy.schedule.threshold(level) == Some(&similarity::zero());
                if universal {
                    Some(0)
                } else {
                    None
                }
            }
        }
    }

    /// Fraction of the candidate's adjacent bigrams attested at a level, up
    /// to family substitution on both slots.
    pub fn coverage_score(&self, candidate: &Candidate, level: usize) -> Result<Score> {
        if candidate.len() < 2 {
            return Err(Error::CandidateTooShort {
                len: candidate.len(),
            });
        }
        let level_count = self.knowledge.hierarchy.level_count();
        if level >= level_count {
            return Err(Error::Config(format!(
                "level {level} out of range (hierarchy has {level_count} levels)"
            )));
        }
        let pairs = &self.family_bigrams[level];
        let total = candidate.len() - 1;
        let mut supported = 0u64;
        for window in candidate.tokens.windows(2) {
            let fa = self.candidate_family(level, &window[0].1);
            let fb = self.candidate_family(level, &window[1].1);
            if let (Some(fa), Some(fb)) = (fa, fb) {
                if pairs.contains(&(fa, fb)) {
                    supported += 1;
                }
            }
        }
        Ok(similarity::score(supported, total as u64))
    }

    /// First level whose coverage reaches `tau`; `Unsupported` (with the
    /// widest level's coverage) when none does.
    pub fn acceptability_level(
        &self,
        candidate: &Candidate,
        tau: &Score,
    ) -> Result<(Level, Score)> {
        if *tau <= similarity::zero() || *tau > similarity::one() {
            return Err(Error::Config(format!(
                "tau must be in (0, 1], got {}",
                similarity::render_score(tau)
            )));
        }
        let mut widest = similarity::zero();
        for level in 0..self.knowledge.hierarchy.level_count() {
            let coverage = self.coverage_score(candidate, level)?;
            if coverage >= *tau {
                return Ok((Level::At(level), coverage));
            }
            widest = coverage;
        }
        Ok((Level::Unsupported, widest))
    }

    /// Complete judgment: nearest-neighbor view plus component view.
    pub fn judge(&self, candidate: &Candidate) -> Result<Judgment> {
        if candidate.is_empty() {
            return Err(Error::EmptyCandidate);
        }
        let (nn, supports, population) = self.nn_score(candidate)?;
        let distinct_patterns: HashSet<PatternId> = supports.iter().map(|s| s.pattern).collect();
        let (level, coverage) = if candidate.len() == 1 {
            // no components to cover: level 0 exactly when the token stands
            // attested as a whole pattern
            let attested = match candidate.tokens[0].1 {
                Some(id) => self.store.attested(&[id])?,
                None => 0,
            };
            if attested > 0 {
                (Level::At(0), similarity::one())
            } else {
                (Level::Unsupported, similarity::zero())
            }
        } else {
            self.acceptability_level(candidate, &self.options.tau)?
        };
        Ok(Judgment {
            surfaces: candidate.tokens.iter().map(|(s, _)| s.clone()).collect(),
            tokens: candidate.tokens.iter().map(|(_, id)| *id).collect(),
            oov: candidate.has_oov(),
            nn_score: nn,
            population,
            supports,
            tied_support: distinct_patterns.len() >= 2,
            level,
            coverage,
        })
    }

    pub fn judge_line(&self, line: &str) -> Result<Judgment> {
        self.judge(&self.candidate(line)?)
    }

    /// Order two same-length candidates by acceptability.
    /// `Ordering::Less` means `a` is strictly more acceptable.
    pub fn compare(&self, a: &Candidate, b: &Candidate) -> Result<(Ordering, Judgment, Judgment)> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                a: a.len(),
                b: b.len(),
            });
        }
        let ja = self.judge(a)?;
        let jb = self.judge(b)?;
        let ordering = ja.rank_key().cmp(&jb.rank_key());
        Ok((ordering, ja, jb))
    }
}
