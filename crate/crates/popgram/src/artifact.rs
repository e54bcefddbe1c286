//! Versioned on-disk index artifacts.
//!
//! An artifact is UTF-8 text: one header line followed by line-delimited
//! records (tokens, patterns, non-empty profiles, an optional similarity
//! cache, multi-member families), every line in the `tsv` record syntax of
//! [`crate::emit`] with sorted keys. Counts and rationals are written as
//! plain integers and `p/q` pairs, so the format stays diff-able and
//! portable.
//!
//! Writing is atomic (temp file in the target directory, then rename).
//! Loading validates everything it can recompute: the fingerprint, the
//! profile section against a fresh rescan of the patterns, hierarchy
//! nestedness, a sample of any similarity cache, and finally that
//! re-serializing reproduces the input byte for byte. A file that fails any
//! of these is refused; a header with an unknown version is a hard error.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use crate::colloc::ProfileSet;
use crate::corpus::{IngestConfig, Pattern, PatternId, PopulationStore, Token, TokenId};
use crate::emit::{unescape, OutputFormat, Record};
use crate::engine::{Engine, EngineOptions, Knowledge};
use crate::error::{Error, Result};
use crate::families::{FamilyHierarchy, Partition, Schedule};
use crate::similarity::{self, parse_score, render_score, SimilarityRow};

pub const FORMAT_NAME: &str = "popgram-index";
pub const FORMAT_VERSION: u64 = 1;

fn corrupt(msg: impl Into<String>) -> Error {
    Error::Artifact(msg.into())
}

/// Serialize an engine to the canonical artifact text.
pub fn to_text(engine: &Engine, with_similarity_cache: bool) -> String {
    let store = engine.store();
    let knowledge = engine.knowledge();
    let options = engine.options();
    let profiles = &knowledge.profiles;

    let mut lines: Vec<String> = Vec::new();

    let nonempty_profiles = profiles.profiles().iter().filter(|p| !p.is_empty()).count();
    let mut family_records: Vec<Record> = Vec::new();
    for (level, partition) in knowledge.hierarchy.levels.iter().enumerate().skip(1) {
        let threshold = knowledge.hierarchy.schedule.threshold(level).unwrap();
        for family in &partition.families {
            if family.len() < 2 {
                continue;
            }
            let members = family
                .iter()
                .map(|t| t.0.to_string())
                .collect::<Vec<_>>()
                .join(",");
            family_records.push(
                Record::new("family")
                    .with("level", level as u64)
                    .with("members", members)
                    .with("threshold", render_score(threshold)),
            );
        }
    }

    let mut similarity_records: Vec<Record> = Vec::new();
    if with_similarity_cache {
        for a in 0..profiles.len() as u32 {
            let row = SimilarityRow::compute(profiles, TokenId(a));
            for b in (a + 1)..profiles.len() as u32 {
                let sim = row.score(profiles, TokenId(b));
                if sim > similarity::zero() {
                    similarity_records.push(
                        Record::new("similarity")
                            .with("a", a as u64)
                            .with("b", b as u64)
                            .with("sim", render_score(&sim)),
                    );
                }
            }
        }
    }

    let mut header = Record::new("header")
        .with("families", family_records.len() as u64)
        .with("fingerprint", store.fingerprint())
        .with("format", FORMAT_NAME)
        .with("levels", knowledge.hierarchy.level_count() as u64)
        .with("lowercase", store.config().lowercase)
        .with("ngram_max", store.config().ngram_max as u64)
        .with("ngram_min", store.config().ngram_min as u64)
        .with("patterns", store.patterns().len() as u64)
        .with("profiles", nonempty_profiles as u64)
        .with("schedule", knowledge.hierarchy.schedule.render())
        .with("sim_cache", with_similarity_cache)
        .with("tau", render_score(&options.tau))
        .with("tokens", store.vocabulary().len() as u64)
        .with("version", FORMAT_VERSION)
        .with("window", options.window as u64);
    if with_similarity_cache {
        header.set("similarities", similarity_records.len() as u64);
    }
    lines.push(header.render(OutputFormat::Tsv));

    for token in store.vocabulary() {
        lines.push(
            Record::new("token")
                .with("id", token.id.0 as u64)
                .with("surface", token.surface.as_str())
                .render(OutputFormat::Tsv),
        );
    }
    for pattern in store.patterns() {
        let tokens = pattern
            .tokens
            .iter()
            .map(|t| t.0.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let source_lines = pattern
            .source_lines
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",");
        lines.push(
            Record::new("pattern")
                .with("count", pattern.count)
                .with("id", pattern.id.0 as u64)
                .with("lines", source_lines)
                .with("tokens", tokens)
                .render(OutputFormat::Tsv),
        );
    }
    for (tid, profile) in profiles.profiles().iter().enumerate() {
        if profile.is_empty() {
            continue;
        }
        let features = profile
            .features
            .iter()
            .map(|((offset, neighbor), count)| format!("{offset}:{}:{count}", neighbor.0))
            .collect::<Vec<_>>()
            .join(",");
        lines.push(
            Record::new("profile")
                .with("features", features)
                .with("token", tid as u64)
                .render(OutputFormat::Tsv),
        );
    }
    for record in similarity_records {
        lines.push(record.render(OutputFormat::Tsv));
    }
    for record in family_records {
        lines.push(record.render(OutputFormat::Tsv));
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

/// Atomically write the artifact for `engine` to `path`.
///
/// The format stores patterns and profiles as two views of one corpus, so
/// only self-consistent engines serialize; a frozen ablation derivative
/// (whose similarity side predates its pattern deletions) is rejected here
/// rather than producing a file that loading would refuse.
pub fn save(engine: &Engine, with_similarity_cache: bool, path: &Path) -> Result<()> {
    let rebuilt = ProfileSet::build(engine.store(), engine.options().window)?;
    if rebuilt.profiles() != engine.knowledge().profiles.profiles() {
        return Err(Error::Artifact(
            "profiles disagree with the patterns; engines derived by frozen ablation \
             cannot be serialized"
                .into(),
        ));
    }
    let text = to_text(engine, with_similarity_cache);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

struct Line {
    kind: String,
    fields: BTreeMap<String, String>,
}

fn parse_line(line: &str, no: usize) -> Result<Line> {
    let mut kind = None;
    let mut fields = BTreeMap::new();
    for part in line.split('\t') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| corrupt(format!("line {no}: field without '=': {part:?}")))?;
        if key == "record" {
            kind = Some(value.to_string());
        } else {
            fields.insert(key.to_string(), unescape(value)?);
        }
    }
    let kind = kind.ok_or_else(|| corrupt(format!("line {no}: missing record kind")))?;
    Ok(Line { kind, fields })
}

impl Line {
    fn get(&self, key: &str) -> Result<&str> {
        self.fields
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| corrupt(format!("{} record missing {key:?}", self.kind)))
    }

    fn get_u64(&self, key: &str) -> Result<u64> {
        self.get(key)?
            .parse()
            .map_err(|_| corrupt(format!("{} record: bad number in {key:?}", self.kind)))
    }

    fn get_bool(&self, key: &str) -> Result<bool> {
        match self.get(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(corrupt(format!(
                "{} record: bad boolean {other:?} in {key:?}",
                self.kind
            ))),
        }
    }
}

fn parse_id_list(text: &str, what: &str) -> Result<Vec<u64>> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|part| {
            part.parse()
                .map_err(|_| corrupt(format!("bad {what} list entry {part:?}")))
        })
        .collect()
}

/// Load, validate and reassemble an engine from an artifact file.
/// Returns the engine and whether the file carries a similarity cache.
pub fn load(path: &Path) -> Result<(Engine, bool)> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| corrupt("artifact is not valid UTF-8"))?;
    let (engine, sim_cache) = from_text(&text)?;
    // canonical-form check doubles as the round-trip guarantee
    if to_text(&engine, sim_cache) != text {
        return Err(corrupt("artifact is not in canonical form"));
    }
    Ok((engine, sim_cache))
}

pub fn from_text(text: &str) -> Result<(Engine, bool)> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| corrupt("empty artifact"))?;
    let header = parse_line(first, 1)?;
    if header.kind != "header" {
        return Err(corrupt("first line is not a header record"));
    }
    if header.get("format")? != FORMAT_NAME {
        return Err(corrupt(format!(
            "unknown artifact format {:?}",
            header.get("format")?
        )));
    }
    let version = header.get_u64("version")?;
    if version != FORMAT_VERSION {
        return Err(corrupt(format!(
            "unsupported artifact version {version}, this build reads version {FORMAT_VERSION}"
        )));
    }

    let token_count = header.get_u64("tokens")? as usize;
    let pattern_count = header.get_u64("patterns")? as usize;
    let profile_count = header.get_u64("profiles")? as usize;
    let family_count = header.get_u64("families")? as usize;
    let level_count = header.get_u64("levels")? as usize;
    let sim_cache = header.get_bool("sim_cache")?;
    let declared_similarities = if sim_cache {
        Some(header.get_u64("similarities")? as usize)
    } else {
        None
    };
    let window = header.get_u64("window")? as usize;
    let schedule = Schedule::parse(header.get("schedule")?)?;
    if schedule.level_count() != level_count {
        return Err(corrupt("level count does not match the schedule"));
    }
    let options = EngineOptions {
        window,
        schedule: schedule.clone(),
        tau: parse_score(header.get("tau")?)?,
    };
    options.validate().map_err(|e| corrupt(e.to_string()))?;
    let ingest = IngestConfig {
        lowercase: header.get_bool("lowercase")?,
        ngram_min: header.get_u64("ngram_min")? as usize,
        ngram_max: header.get_u64("ngram_max")? as usize,
    };
    ingest.validate().map_err(|e| corrupt(e.to_string()))?;

    let mut tokens: Vec<Token> = Vec::with_capacity(token_count);
    let mut patterns: Vec<Pattern> = Vec::with_capacity(pattern_count);
    let mut profile_lines: Vec<(u64, String)> = Vec::new();
    let mut similarity_lines: Vec<(u64, u64, String)> = Vec::new();
    let mut family_lines: Vec<(u64, String, Vec<u64>)> = Vec::new();

    for (idx, raw) in lines {
        let line = parse_line(raw, idx + 1)?;
        match line.kind.as_str() {
            "token" => {
                let id = line.get_u64("id")?;
                if id as usize != tokens.len() {
                    return Err(corrupt(format!(
                        "token ids must be dense and ordered, got {id} at position {}",
                        tokens.len()
                    )));
                }
                let surface = line.get("surface")?.to_string();
                if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                    return Err(corrupt(format!("invalid token surface {surface:?}")));
                }
                tokens.push(Token {
                    id: TokenId(id as u32),
                    surface,
                });
            }
            "pattern" => {
                let id = line.get_u64("id")?;
                if let Some(last) = patterns.last() {
                    if id <= last.id.0 as u64 {
                        return Err(corrupt("pattern ids must be strictly increasing"));
                    }
                }
                let count = line.get_u64("count")?;
                if count == 0 {
                    return Err(corrupt("pattern count must be positive"));
                }
                let token_ids = parse_id_list(line.get("tokens")?, "token")?;
                if token_ids.is_empty() {
                    return Err(corrupt("pattern with no tokens"));
                }
                let source_lines: BTreeSet<u64> = parse_id_list(line.get("lines")?, "line")?
                    .into_iter()
                    .collect();
                patterns.push(Pattern {
                    id: PatternId(id as u32),
                    tokens: token_ids.iter().map(|&t| TokenId(t as u32)).collect(),
                    count,
                    source_lines,
                });
            }
            "profile" => {
                profile_lines.push((line.get_u64("token")?, line.get("features")?.to_string()));
            }
            "similarity" => {
                similarity_lines.push((
                    line.get_u64("a")?,
                    line.get_u64("b")?,
                    line.get("sim")?.to_string(),
                ));
            }
            "family" => {
                family_lines.push((
                    line.get_u64("level")?,
                    line.get("threshold")?.to_string(),
                    parse_id_list(line.get("members")?, "member")?,
                ));
            }
            other => return Err(corrupt(format!("unknown record kind {other:?}"))),
        }
    }

    if tokens.len() != token_count {
        return Err(corrupt("token count does not match the header"));
    }
    if patterns.len() != pattern_count {
        return Err(corrupt("pattern count does not match the header"));
    }
    if profile_lines.len() != profile_count {
        return Err(corrupt("profile count does not match the header"));
    }
    if family_lines.len() != family_count {
        return Err(corrupt("family count does not match the header"));
    }
    if let Some(expected) = declared_similarities {
        if similarity_lines.len() != expected {
            return Err(corrupt("similarity count does not match the header"));
        }
    } else if !similarity_lines.is_empty() {
        return Err(corrupt("similarity records present but sim_cache=false"));
    }
    let mut seen = std::collections::HashSet::new();
    for token in &tokens {
        if !seen.insert(token.surface.clone()) {
            return Err(corrupt(format!(
                "duplicate token surface {:?}",
                token.surface
            )));
        }
    }
    for pattern in &patterns {
        for t in &pattern.tokens {
            if t.0 as usize >= tokens.len() {
                return Err(corrupt(format!("pattern references unknown token {}", t.0)));
            }
        }
    }

    let store = PopulationStore::from_parts(tokens, patterns, ingest);
    if store.fingerprint() != header.get("fingerprint")? {
        return Err(corrupt("fingerprint mismatch: corpus content was altered"));
    }

    // rebuild the profiles and demand the stored section matches exactly;
    // this also re-checks the profile/index transpose by construction
    let profiles = ProfileSet::build(&store, window)?;
    let mut stored_profiles: BTreeMap<u64, String> = BTreeMap::new();
    for (token, features) in profile_lines {
        if stored_profiles.insert(token, features).is_some() {
            return Err(corrupt(format!("duplicate profile for token {token}")));
        }
    }
    for (tid, profile) in profiles.profiles().iter().enumerate() {
        let rebuilt = profile
            .features
            .iter()
            .map(|((offset, neighbor), count)| format!("{offset}:{}:{count}", neighbor.0))
            .collect::<Vec<_>>()
            .join(",");
        match stored_profiles.get(&(tid as u64)) {
            Some(stored) if profile.is_empty() => {
                return Err(corrupt(format!(
                    "token {tid} has a stored profile {stored:?} but rescanning finds none"
                )));
            }
            Some(stored) if *stored != rebuilt => {
                return Err(corrupt(format!(
                    "profile for token {tid} does not match a rescan of the patterns"
                )));
            }
            None if !profile.is_empty() => {
                return Err(corrupt(format!("missing profile for token {tid}")));
            }
            _ => {}
        }
    }

    // reassemble the hierarchy: level 0 is identity, stored families overlay
    // the singleton baseline at each later level
    let vocab = store.vocabulary().len();
    let mut levels = vec![Partition::identity(vocab)];
    for level in 1..level_count {
        let threshold = schedule.threshold(level).unwrap();
        let mut representative: Vec<u32> = (0..vocab as u32).collect();
        let mut claimed = vec![false; vocab];
        for (fam_level, fam_threshold, members) in
            family_lines.iter().filter(|(l, _, _)| *l as usize == level)
        {
            let _ = fam_level;
            if *fam_threshold != render_score(threshold) {
                return Err(corrupt(format!(
                    "family at level {level} carries threshold {fam_threshold:?}, schedule says {}",
                    render_score(threshold)
                )));
            }
            if members.len() < 2 {
                return Err(corrupt("stored families must have at least two members"));
            }
            let first = members[0];
            for pair in members.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(corrupt("family members must be sorted and distinct"));
                }
            }
            for &member in members {
                if member as usize >= vocab {
                    return Err(corrupt(format!("family references unknown token {member}")));
                }
                if std::mem::replace(&mut claimed[member as usize], true) {
                    return Err(corrupt(format!(
                        "token {member} is in two families at level {level}"
                    )));
                }
                representative[member as usize] = first as u32;
            }
        }
        let mut partition_members: BTreeMap<u32, Vec<TokenId>> = BTreeMap::new();
        for (idx, rep) in representative.iter().enumerate() {
            partition_members
                .entry(*rep)
                .or_default()
                .push(TokenId(idx as u32));
        }
        let families: Vec<Vec<TokenId>> = partition_members.into_values().collect();
        let mut family_of = vec![0u32; vocab];
        for (fam_idx, family) in families.iter().enumerate() {
            for token in family {
                family_of[token.0 as usize] = fam_idx as u32;
            }
        }
        levels.push(Partition {
            families,
            family_of,
        });
    }
    let hierarchy = FamilyHierarchy { schedule, levels };
    if !hierarchy.is_nested() {
        return Err(corrupt("family hierarchy is not nested"));
    }

    // spot-check any similarity cache against fresh computations
    let mut previous: Option<(u64, u64)> = None;
    for (idx, (a, b, sim_text)) in similarity_lines.iter().enumerate() {
        if a >= b || *b as usize >= vocab {
            return Err(corrupt(
                "similarity cache entries must have a < b in vocabulary",
            ));
        }
        if let Some(prev) = previous {
            if (*a, *b) <= prev {
                return Err(corrupt("similarity cache must be sorted by (a, b)"));
            }
        }
        previous = Some((*a, *b));
        let step = (similarity_lines.len() / 16).max(1);
        if idx.is_multiple_of(step) {
            let actual =
                similarity::token_similarity(&profiles, TokenId(*a as u32), TokenId(*b as u32));
            if render_score(&actual) != *sim_text {
                return Err(corrupt(format!(
                    "similarity cache entry ({a}, {b}) does not match a recomputation"
                )));
            }
        }
    }

    let knowledge = Arc::new(Knowledge {
        profiles,
        hierarchy,
    });
    let engine = Engine::from_parts(Arc::new(store), knowledge, options);
    Ok((engine, sim_cache))
}
