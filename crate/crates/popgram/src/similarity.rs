//! Exact token-token similarity from shared collocational contexts.
//!
//! The measure is count-weighted Jaccard over context profiles:
//! `sum_f min(a_f, b_f) / sum_f max(a_f, b_f)`, held as an exact rational so
//! equality and ordering never suffer float rounding. A token is always
//! similarity 1 to itself, even with an empty profile; two distinct tokens
//! with empty profiles are similarity 0.

use num_rational::Ratio;

use crate::colloc::ProfileSet;
use crate::corpus::TokenId;
use crate::error::{Error, Result};

/// Exact rational in [0, 1].
pub type Score = Ratio<u64>;

pub fn score(numer: u64, denom: u64) -> Score {
    if denom == 0 {
        Score::from_integer(0)
    } else {
        Score::new(numer, denom)
    }
}

pub fn zero() -> Score {
    Score::from_integer(0)
}

pub fn one() -> Score {
    Score::from_integer(1)
}

/// Canonical text form: `"3/5"`, integers without a denominator (`"0"`, `"1"`).
pub fn render_score(s: &Score) -> String {
    if *s.denom() == 1 {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Fixed six-decimal rendering, round half up, computed in integer arithmetic.
pub fn render_decimal(s: &Score) -> String {
    let n = *s.numer() as u128;
    let d = *s.denom() as u128;
    let micro = (n * 2_000_000 + d) / (2 * d);
    format!("{}.{:06}", micro / 1_000_000, micro % 1_000_000)
}

/// Parse `"p/q"` or a bare integer into an exact rational.
pub fn parse_score(text: &str) -> Result<Score> {
    let bad = || Error::Config(format!("not a rational number: {text:?}"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let numer: u64 = n.trim().parse().map_err(|_| bad())?;
    let denom: u64 = d.trim().parse().map_err(|_| bad())?;
    if denom == 0 {
        return Err(Error::Config(format!("zero denominator: {text:?}")));
    }
    Ok(Score::new(numer, denom))
}

/// Weighted Jaccard between two profiles by merging their sorted features.
pub fn token_similarity(profiles: &ProfileSet, a: TokenId, b: TokenId) -> Score {
    if a == b {
        return one();
    }
    let pa = profiles.profile(a);
    let pb = profiles.profile(b);
    let mut min_sum: u64 = 0;
    let (mut i, mut j) = (0, 0);
    while i < pa.features.len() && j < pb.features.len() {
        let (fa, ca) = pa.features[i];
        let (fb, cb) = pb.features[j];
        match fa.cmp(&fb) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                min_sum += ca.min(cb);
                i += 1;
                j += 1;
            }
        }
    }
    // sum(max) = mass(a) + mass(b) - sum(min)
    score(min_sum, pa.mass + pb.mass - min_sum)
}

/// Similarities from one source token (or an out-of-vocabulary placeholder)
/// to the whole vocabulary, computed in a single pass over the postings of
/// the source's features.
#[derive(Debug, Clone)]
pub struct SimilarityRow {
    source: Option<TokenId>,
    mins: Vec<u64>,
    mass: u64,
}

impl SimilarityRow {
    pub fn compute(profiles: &ProfileSet, source: TokenId) -> Self {
        let mut mins = vec![0u64; profiles.len()];
        let pa = profiles.profile(source);
        for &(feature, ca) in &pa.features {
            if let Some(postings) = profiles.index.postings.get(&feature) {
                for &(b, cb) in postings {
                    mins[b.0 as usize] += ca.min(cb);
                }
            }
        }
        SimilarityRow {
            source: Some(source),
            mins,
            mass: pa.mass,
        }
    }

    /// Row for a token outside the vocabulary: empty profile, similarity 0
    /// to every stored token.
    pub fn out_of_vocabulary(profiles: &ProfileSet) -> Self {
        SimilarityRow {
            source: None,
            mins: vec![0u64; profiles.len()],
            mass: 0,
        }
    }

    pub fn score(&self, profiles: &ProfileSet, b: TokenId) -> Score {
        if self.source == Some(b) {
            return one();
        }
        let min_sum = self.mins[b.0 as usize];
        score(min_sum, self.mass + profiles.profile(b).mass - min_sum)
    }
}

/// All tokens other than `token` with similarity at least `theta`, ordered by
/// descending similarity then ascending id. A threshold of 0 keeps
/// zero-similarity pairs, so it returns the whole vocabulary minus the token.
pub fn neighbors(
    profiles: &ProfileSet,
    token: TokenId,
    theta: Score,
) -> Result<Vec<(TokenId, Score)>> {
    if theta > one() {
        return Err(Error::Config(format!(
            "similarity threshold out of range: {}",
            render_score(&theta)
        )));
    }
    profiles.try_profile(token)?;
    let row = SimilarityRow::compute(profiles, token);
    let mut hits: Vec<(TokenId, Score)> = Vec::new();
    for idx in 0..profiles.len() {
        let b = TokenId(idx as u32);
        if b == token {
            continue;
        }
        let sim = row.score(profiles, b);
        if sim >= theta {
            hits.push((b, sim));
        }
    }
    hits.sort_by(|(ia, sa), (ib, sb)| sb.cmp(sa).then(ia.cmp(ib)));
    Ok(hits)
}
