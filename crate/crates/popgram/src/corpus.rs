//! Corpus ingestion and the population of attested patterns.
//!
//! A corpus is a line-oriented UTF-8 stream: one pattern per line, `#` lines
//! are comments, blank lines are skipped. Lines are whitespace-tokenized
//! (consecutive whitespace collapses) with an optional lowercase fold.
//! Identical normalized lines merge into a single [`Pattern`] with a summed
//! count. The store also keeps n-gram tables: for each `n` in the configured
//! range, the multiset of all contiguous length-`n` token runs of all
//! patterns, weighted by pattern counts.
//!
//! Token and pattern ids are assigned in first-occurrence order, so an
//! identical stream plus identical config always yields an identical store.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::BufRead;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Dense vocabulary index, contiguous from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(pub u32);

/// Index of a pattern in its original store. Stable under ablation: deleting
/// patterns never renumbers the survivors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: TokenId,
    pub surface: String,
}

/// One attested individual: a token sequence with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub id: PatternId,
    pub tokens: Vec<TokenId>,
    pub count: u64,
    /// 1-based input line numbers this pattern was read from.
    pub source_lines: BTreeSet<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestConfig {
    pub lowercase: bool,
    pub ngram_min: usize,
    pub ngram_max: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            lowercase: true,
            ngram_min: 2,
            ngram_max: 5,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ngram_min < 1 {
            return Err(Error::Config("ngram_min must be at least 1".into()));
        }
        if self.ngram_min > self.ngram_max {
            return Err(Error::Config(format!(
                "ngram range is empty: {}..={}",
                self.ngram_min, self.ngram_max
            )));
        }
        Ok(())
    }
}

/// One attested n-gram: total weighted count plus every location it occurs at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramEntry {
    pub count: u64,
    /// (pattern, start offset) pairs, sorted.
    pub locations: Vec<(PatternId, u32)>,
}

pub type NgramTable = HashMap<Box<[TokenId]>, NgramEntry>;

/// The corpus as a population: vocabulary, patterns, and n-gram tables.
///
/// Immutable once built; ablation derives reduced copies instead of mutating.
#[derive(Debug, Clone)]
pub struct PopulationStore {
    vocabulary: Vec<Token>,
    surface_ids: HashMap<String, TokenId>,
    /// Live patterns, sorted by id. Ids may be sparse in derived stores.
    patterns: Vec<Pattern>,
    ngram_tables: BTreeMap<usize, NgramTable>,
    full_patterns: HashMap<Box<[TokenId]>, PatternId>,
    /// Distinct adjacent pairs attested anywhere in the live patterns,
    /// independent of the configured n-gram range.
    bigram_pairs: BTreeSet<(TokenId, TokenId)>,
    config: IngestConfig,
    fingerprint: String,
    total_tokens: u64,
}

impl PopulationStore {
    /// Ingest a line-oriented UTF-8 stream into a population.
    pub fn ingest<R: BufRead>(mut reader: R, config: IngestConfig) -> Result<Self> {
        config.validate()?;
        let mut vocabulary: Vec<Token> = Vec::new();
        let mut surface_ids: HashMap<String, TokenId> = HashMap::new();
        let mut patterns: Vec<Pattern> = Vec::new();
        let mut by_tokens: HashMap<Vec<TokenId>, usize> = HashMap::new();

        let mut buf = Vec::new();
        let mut line_no: u64 = 0;
        loop {
            buf.clear();
            let read = reader.read_until(b'\n', &mut buf)?;
            if read == 0 {
                break;
            }
            line_no += 1;
            let line = std::str::from_utf8(&buf).map_err(|_| Error::Encoding { line: line_no })?;
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = Vec::new();
            for word in line.split_whitespace() {
                let surface = if config.lowercase {
                    word.to_lowercase()
                } else {
                    word.to_string()
                };
                let id = match surface_ids.get(&surface) {
                    Some(&id) => id,
                    None => {
                        let id = TokenId(vocabulary.len() as u32);
                        vocabulary.push(Token {
                            id,
                            surface: surface.clone(),
                        });
                        surface_ids.insert(surface, id);
                        id
                    }
                };
                tokens.push(id);
            }
            if tokens.is_empty() {
                continue;
            }
            match by_tokens.get(&tokens) {
                Some(&idx) => {
                    patterns[idx].count += 1;
                    patterns[idx].source_lines.insert(line_no);
                }
                None => {
                    let id = PatternId(patterns.len() as u32);
                    by_tokens.insert(tokens.clone(), patterns.len());
                    patterns.push(Pattern {
                        id,
                        tokens,
                        count: 1,
                        source_lines: BTreeSet::from([line_no]),
                    });
                }
            }
        }

        if patterns.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(Self::assemble(vocabulary, surface_ids, patterns, config))
    }

    /// Rebuild the derived tables for a given vocabulary + pattern set.
    fn assemble(
        vocabulary: Vec<Token>,
        surface_ids: HashMap<String, TokenId>,
        patterns: Vec<Pattern>,
        config: IngestConfig,
    ) -> Self {
        let mut ngram_tables: BTreeMap<usize, NgramTable> = BTreeMap::new();
        let mut full_patterns = HashMap::new();
        let mut bigram_pairs = BTreeSet::new();
        let mut total_tokens: u64 = 0;

        for pattern in &patterns {
            let len = pattern.tokens.len();
            total_tokens += len as u64 * pattern.count;
            full_patterns.insert(pattern.tokens.clone().into_boxed_slice(), pattern.id);
            for pair in pattern.tokens.windows(2) {
                bigram_pairs.insert((pair[0], pair[1]));
            }
            for n in config.ngram_min..=config.ngram_max.min(len) {
                let table = ngram_tables.entry(n).or_default();
                for (offset, gram) in pattern.tokens.windows(n).enumerate() {
                    let entry =
                        table
                            .entry(gram.to_vec().into_boxed_slice())
                            .or_insert(NgramEntry {
                                count: 0,
                                locations: Vec::new(),
                            });
                    entry.count += pattern.count;
                    entry.locations.push((pattern.id, offset as u32));
                }
            }
        }
        for table in ngram_tables.values_mut() {
            for entry in table.values_mut() {
                entry.locations.sort_unstable();
            }
        }

        let fingerprint = Self::compute_fingerprint(&config, &patterns, &vocabulary);
        PopulationStore {
            vocabulary,
            surface_ids,
            patterns,
            ngram_tables,
            full_patterns,
            bigram_pairs,
            config,
            fingerprint,
            total_tokens,
        }
    }

    /// Reassemble from parts that already satisfy the store invariants.
    /// Used by artifact loading; the caller is responsible for validation.
    pub(crate) fn from_parts(
        vocabulary: Vec<Token>,
        patterns: Vec<Pattern>,
        config: IngestConfig,
    ) -> Self {
        let surface_ids = vocabulary
            .iter()
            .map(|t| (t.surface.clone(), t.id))
            .collect();
        Self::assemble(vocabulary, surface_ids, patterns, config)
    }

    fn compute_fingerprint(
        config: &IngestConfig,
        patterns: &[Pattern],
        vocabulary: &[Token],
    ) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!(
            "lowercase={} ngram={}..{}\n",
            config.lowercase, config.ngram_min, config.ngram_max
        ));
        for token in vocabulary {
            hasher.update(token.surface.as_bytes());
            hasher.update([0u8]);
        }
        for pattern in patterns {
            hasher.update(format!("{} {} ", pattern.id.0, pattern.count));
            for id in &pattern.tokens {
                hasher.update(format!("{},", id.0));
            }
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Exact multiplicity of `candidate` as a whole pattern; 0 when absent.
    pub fn attested(&self, candidate: &[TokenId]) -> Result<u64> {
        if candidate.is_empty() {
            return Err(Error::EmptyCandidate);
        }
        for id in candidate {
            if id.0 as usize >= self.vocabulary.len() {
                return Err(Error::UnknownTokenId { id: id.0 });
            }
        }
        Ok(self
            .full_patterns
            .get(candidate)
            .and_then(|pid| self.pattern(*pid))
            .map_or(0, |p| p.count))
    }

    /// The attested n-gram population for candidates of length `n`.
    ///
    /// Lengths inside the configured n-gram range read the stored table.
    /// Outside the range, whole patterns of that exact length still count
    /// (an exact match must stay recognizable); anything else is empty.
    pub fn population_for(&self, n: usize) -> Cow<'_, NgramTable> {
        if n >= self.config.ngram_min && n <= self.config.ngram_max {
            return match self.ngram_tables.get(&n) {
                Some(table) => Cow::Borrowed(table),
                None => Cow::Owned(NgramTable::new()),
            };
        }
        let mut table = NgramTable::new();
        for pattern in &self.patterns {
            if pattern.tokens.len() == n {
                table.insert(
                    pattern.tokens.clone().into_boxed_slice(),
                    NgramEntry {
                        count: pattern.count,
                        locations: vec![(pattern.id, 0)],
                    },
                );
            }
        }
        Cow::Owned(table)
    }

    /// Derive a store with the given patterns removed. Ids are preserved;
    /// the original store is untouched.
    pub fn without_patterns(&self, ids: &[PatternId]) -> Result<Self> {
        let mut doomed = BTreeSet::new();
        for id in ids {
            if self.pattern(*id).is_none() {
                return Err(Error::UnknownPattern { id: id.0 });
            }
            doomed.insert(*id);
        }
        let remaining: Vec<Pattern> = self
            .patterns
            .iter()
            .filter(|p| !doomed.contains(&p.id))
            .cloned()
            .collect();
        if remaining.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        Ok(Self::assemble(
            self.vocabulary.clone(),
            self.surface_ids.clone(),
            remaining,
            self.config.clone(),
        ))
    }

    pub fn vocabulary(&self) -> &[Token] {
        &self.vocabulary
    }

    pub fn token_id(&self, surface: &str) -> Option<TokenId> {
        self.surface_ids.get(surface).copied()
    }

    pub fn surface(&self, id: TokenId) -> &str {
        &self.vocabulary[id.0 as usize].surface
    }

    /// Live patterns, ascending by id.
    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn pattern(&self, id: PatternId) -> Option<&Pattern> {
        self.patterns
            .binary_search_by_key(&id, |p| p.id)
            .ok()
            .map(|idx| &self.patterns[idx])
    }

    pub fn ngram_tables(&self) -> &BTreeMap<usize, NgramTable> {
        &self.ngram_tables
    }

    /// Distinct adjacent token pairs attested in the live patterns.
    pub fn bigram_pairs(&self) -> &BTreeSet<(TokenId, TokenId)> {
        &self.bigram_pairs
    }

    pub fn config(&self) -> &IngestConfig {
        &self.config
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Normalize a candidate line with the store's ingest settings.
    /// Unknown surfaces are kept and flagged by a `None` id.
    pub fn resolve_candidate(&self, line: &str) -> Vec<(String, Option<TokenId>)> {
        line.split_whitespace()
            .map(|word| {
                let surface = if self.config.lowercase {
                    word.to_lowercase()
                } else {
                    word.to_string()
                };
                let id = self.surface_ids.get(&surface).copied();
                (surface, id)
            })
            .collect()
    }

    /// The pattern multiset rendered back to corpus text, one line per
    /// occurrence. Re-ingesting this text reproduces the same multiset.
    pub fn pattern_text(&self) -> String {
        let mut out = String::new();
        for pattern in &self.patterns {
            let line: Vec<&str> = pattern.tokens.iter().map(|&t| self.surface(t)).collect();
            for _ in 0..pattern.count {
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        out
    }
}
