//! Brute-force reference implementation used by the integration tests.
//!
//! Everything here recomputes from first principles on surface strings:
//! profiles by rescanning pattern windows, similarity by literally summing
//! mins and maxes over the feature union, nearest-neighbor scores by a
//! double loop over pattern windows, families by breadth-first search over
//! the threshold graph. No index structures, no shared code paths with the
//! engine beyond the rational number type. Profiles and families are
//! memoized per corpus purely for test runtime; the values are computed the
//! slow way exactly once.

// each test binary pulls in a different subset of this module
#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use popgram::{render_score, similarity, Score};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Profile = BTreeMap<(i64, String), u64>;
type FamilySet = BTreeSet<BTreeSet<String>>;

pub struct Oracle {
    /// Deduplicated normalized patterns with multiplicities, in line order.
    pub patterns: Vec<(Vec<String>, u64)>,
    pub window: usize,
    pub ngram_min: usize,
    pub ngram_max: usize,
    vocab: Vec<String>,
    profiles: BTreeMap<String, Profile>,
    family_cache: RefCell<BTreeMap<String, FamilySet>>,
}

impl Oracle {
    pub fn new(text: &str, window: usize) -> Oracle {
        Self::with_range(text, window, 2, 5)
    }

    pub fn with_range(text: &str, window: usize, ngram_min: usize, ngram_max: usize) -> Oracle {
        let mut patterns: Vec<(Vec<String>, u64)> = Vec::new();
        for raw in text.lines() {
            let line = raw.trim_start();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<String> = raw.split_whitespace().map(|w| w.to_lowercase()).collect();
            if tokens.is_empty() {
                continue;
            }
            if let Some(entry) = patterns.iter_mut().find(|(t, _)| *t == tokens) {
                entry.1 += 1;
            } else {
                patterns.push((tokens, 1));
            }
        }

        let mut vocab = Vec::new();
        let mut seen = BTreeSet::new();
        for (tokens, _) in &patterns {
            for token in tokens {
                if seen.insert(token.clone()) {
                    vocab.push(token.clone());
                }
            }
        }

        let mut profiles: BTreeMap<String, Profile> =
            vocab.iter().map(|w| (w.clone(), Profile::new())).collect();
        for (tokens, count) in &patterns {
            for (i, token) in tokens.iter().enumerate() {
                for (j, neighbor) in tokens.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let d = j as i64 - i as i64;
                    if d.unsigned_abs() as usize <= window {
                        *profiles
                            .get_mut(token)
                            .unwrap()
                            .entry((d, neighbor.clone()))
                            .or_default() += count;
                    }
                }
            }
        }

        Oracle {
            patterns,
            window,
            ngram_min,
            ngram_max,
            vocab,
            profiles,
            family_cache: RefCell::new(BTreeMap::new()),
        }
    }

    /// Vocabulary in first-occurrence order.
    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn profile(&self, word: &str) -> Profile {
        self.profiles.get(word).cloned().unwrap_or_default()
    }

    pub fn sim(&self, a: &str, b: &str) -> Score {
        if a == b {
            return similarity::one();
        }
        let empty = Profile::new();
        let pa = self.profiles.get(a).unwrap_or(&empty);
        let pb = self.profiles.get(b).unwrap_or(&empty);
        let keys: BTreeSet<&(i64, String)> = pa.keys().chain(pb.keys()).collect();
        let mut min_sum = 0u64;
        let mut max_sum = 0u64;
        for key in keys {
            let ca = pa.get(key).copied().unwrap_or(0);
            let cb = pb.get(key).copied().unwrap_or(0);
            min_sum += ca.min(cb);
            max_sum += ca.max(cb);
        }
        similarity::score(min_sum, max_sum)
    }

    /// Every attested run of length `n` as (pattern index, slice).
    fn windows(&self, n: usize) -> Vec<(usize, &[String])> {
        let mut out = Vec::new();
        let in_range = n >= self.ngram_min && n <= self.ngram_max;
        for (idx, (tokens, _)) in self.patterns.iter().enumerate() {
            if in_range {
                if tokens.len() >= n {
                    for gram in tokens.windows(n) {
                        out.push((idx, gram));
                    }
                }
            } else if tokens.len() == n {
                out.push((idx, tokens.as_slice()));
            }
        }
        out
    }

    /// Exhaustive max-min nearest-neighbor score. Returns the score and the
    /// pattern indexes of every window achieving it.
    pub fn nn(&self, candidate: &[String]) -> (Score, BTreeSet<usize>) {
        let windows = self.windows(candidate.len());
        if windows.is_empty() {
            return (similarity::zero(), BTreeSet::new());
        }
        let mut best = None;
        let mut supports = BTreeSet::new();
        for (idx, gram) in windows {
            let mut min = similarity::one();
            for (c, p) in candidate.iter().zip(gram) {
                let s = self.sim(c, p);
                if s < min {
                    min = s;
                }
            }
            match &best {
                None => {
                    best = Some(min);
                    supports.insert(idx);
                }
                Some(b) if min > *b => {
                    best = Some(min);
                    supports = BTreeSet::from([idx]);
                }
                Some(b) if min == *b => {
                    supports.insert(idx);
                }
                _ => {}
            }
        }
        (best.unwrap(), supports)
    }

    /// Families at a threshold as sets of surfaces: breadth-first search on
    /// the graph with an edge wherever similarity reaches theta. A threshold
    /// of zero is the complete graph.
    pub fn families(&self, theta: &Score) -> FamilySet {
        let key = render_score(theta);
        if let Some(cached) = self.family_cache.borrow().get(&key) {
            return cached.clone();
        }
        let families = if *theta == similarity::zero() {
            BTreeSet::from([self.vocab.iter().cloned().collect()])
        } else {
            let mut unvisited: BTreeSet<String> = self.vocab.iter().cloned().collect();
            let mut families = BTreeSet::new();
            while let Some(start) = unvisited.iter().next().cloned() {
                unvisited.remove(&start);
                let mut family = BTreeSet::from([start.clone()]);
                let mut queue = VecDeque::from([start]);
                while let Some(current) = queue.pop_front() {
                    let linked: Vec<String> = unvisited
                        .iter()
                        .filter(|other| self.sim(&current, other) >= *theta)
                        .cloned()
                        .collect();
                    for next in linked {
                        unvisited.remove(&next);
                        family.insert(next.clone());
                        queue.push_back(next);
                    }
                }
                families.insert(family);
            }
            families
        };
        self.family_cache.borrow_mut().insert(key, families.clone());
        families
    }

    /// Identity partition plus one entry per schedule threshold.
    pub fn partitions(&self, thresholds: &[Score]) -> Vec<FamilySet> {
        let mut levels = Vec::new();
        levels.push(
            self.vocab
                .iter()
                .map(|w| BTreeSet::from([w.clone()]))
                .collect(),
        );
        for theta in thresholds {
            levels.push(self.families(theta));
        }
        levels
    }

    /// Component coverage of a candidate against the families at one
    /// threshold (`None` = identity level).
    pub fn coverage(&self, candidate: &[String], theta: Option<&Score>) -> Score {
        let attested_bigrams: HashSet<(&String, &String)> = self
            .patterns
            .iter()
            .flat_map(|(tokens, _)| tokens.windows(2).map(|w| (&w[0], &w[1])))
            .collect();
        let universal = theta == Some(&similarity::zero());
        let families = theta.map(|t| self.families(t));
        let family_of = |word: &String| -> BTreeSet<String> {
            match &families {
                None => BTreeSet::from([word.clone()]),
                Some(families) => families
                    .iter()
                    .find(|f| f.contains(word))
                    .cloned()
                    .unwrap_or_else(|| BTreeSet::from([word.clone()])),
            }
        };
        let total = candidate.len() - 1;
        let mut supported = 0u64;
        for pair in candidate.windows(2) {
            let ok = if universal {
                !attested_bigrams.is_empty()
            } else {
                let fa = family_of(&pair[0]);
                let fb = family_of(&pair[1]);
                attested_bigrams
                    .iter()
                    .any(|(a, b)| fa.contains(*a) && fb.contains(*b))
            };
            if ok {
                supported += 1;
            }
        }
        similarity::score(supported, total as u64)
    }
}

/// Deterministic random corpus text: up to `max_vocab` possible surfaces,
/// up to `max_patterns` lines of length 1..=6, some lines duplicated.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_vocab: usize, max_patterns: usize) -> String {
    let vocab_size = 2 + (rng.next_u32() as usize) % max_vocab.saturating_sub(1).max(1);
    let pattern_count = 1 + (rng.next_u32() as usize) % max_patterns;
    let mut lines = Vec::with_capacity(pattern_count);
    for _ in 0..pattern_count {
        let len = 1 + (rng.next_u32() as usize) % 6;
        let line: Vec<String> = (0..len)
            .map(|_| format!("w{}", rng.next_u32() as usize % vocab_size))
            .collect();
        lines.push(line.join(" "));
        // occasionally repeat a line to exercise pattern counts
        if rng.next_u32().is_multiple_of(4) {
            let again = lines[rng.next_u32() as usize % lines.len()].clone();
            lines.push(again);
        }
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

/// A few candidates per corpus: attested patterns, single-slot
/// perturbations, and one with an out-of-vocabulary token.
pub fn sample_candidates(rng: &mut ChaCha8Rng, oracle: &Oracle) -> Vec<String> {
    let vocab = oracle.vocab();
    let mut out = Vec::new();
    for _ in 0..2 {
        let (tokens, _) = &oracle.patterns[rng.next_u32() as usize % oracle.patterns.len()];
        out.push(tokens.join(" "));
    }
    for _ in 0..2 {
        let (tokens, _) = &oracle.patterns[rng.next_u32() as usize % oracle.patterns.len()];
        let mut mutated = tokens.clone();
        let slot = rng.next_u32() as usize % mutated.len();
        mutated[slot] = vocab[rng.next_u32() as usize % vocab.len()].clone();
        out.push(mutated.join(" "));
    }
    let mut alien: Vec<String> = (0..2)
        .map(|_| vocab[rng.next_u32() as usize % vocab.len()].clone())
        .collect();
    alien[0] = "zzunseen".to_string();
    out.push(alien.join(" "));
    out
}

/// Seeded generator shared by the randomized suites.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
