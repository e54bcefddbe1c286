//! Positional collocation profiles and their inverted index.
//!
//! For every occurrence of a token at position `i` in a pattern of count `c`,
//! each in-bounds position `i + d` with `d` in `[-W, W]`, `d != 0`, adds `c`
//! to the feature `(d, neighbor)` of that token's profile. Contexts never
//! cross pattern boundaries. The inverted index is the exact transpose:
//! feature -> sorted postings of (token, count).

use std::collections::BTreeMap;

use crate::corpus::{PopulationStore, TokenId};
use crate::error::{Error, Result};

/// A signed offset and the token observed there.
pub type ContextFeature = (i32, TokenId);

/// Sparse context-count vector for one token, sorted by feature.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextProfile {
    pub features: Vec<(ContextFeature, u64)>,
    /// Sum of all feature counts.
    pub mass: u64,
}

impl ContextProfile {
    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn count(&self, feature: ContextFeature) -> u64 {
        self.features
            .binary_search_by_key(&feature, |(f, _)| *f)
            .map_or(0, |idx| self.features[idx].1)
    }
}

#[derive(Debug, Clone, Default)]
pub struct InvertedIndex {
    /// feature -> (token, count), postings sorted by token id.
    pub postings: BTreeMap<ContextFeature, Vec<(TokenId, u64)>>,
}

/// All profiles of a store at a fixed window, indexed by token id.
#[derive(Debug, Clone)]
pub struct ProfileSet {
    pub window: usize,
    profiles: Vec<ContextProfile>,
    pub index: InvertedIndex,
}

impl ProfileSet {
    /// Scan every pattern and accumulate pattern-weighted positional contexts.
    pub fn build(store: &PopulationStore, window: usize) -> Result<Self> {
        if window < 1 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        let vocab = store.vocabulary().len();
        let mut maps: Vec<BTreeMap<ContextFeature, u64>> = vec![BTreeMap::new(); vocab];
        for pattern in store.patterns() {
            let toks = &pattern.tokens;
            for (i, &t) in toks.iter().enumerate() {
                let lo = i.saturating_sub(window);
                let hi = (i + window).min(toks.len() - 1);
                for (j, &neighbor) in toks.iter().enumerate().take(hi + 1).skip(lo) {
                    if j == i {
                        continue;
                    }
                    let d = j as i32 - i as i32;
                    *maps[t.0 as usize].entry((d, neighbor)).or_default() += pattern.count;
                }
            }
        }

        let mut profiles = Vec::with_capacity(vocab);
        let mut index = InvertedIndex::default();
        for (tid, map) in maps.into_iter().enumerate() {
            let mass = map.values().sum();
            let features: Vec<(ContextFeature, u64)> = map.into_iter().collect();
            for &(feature, count) in &features {
                index
                    .postings
                    .entry(feature)
                    .or_default()
                    .push((TokenId(tid as u32), count));
            }
            profiles.push(ContextProfile { features, mass });
        }
        // tokens were visited in id order, so postings are already sorted
        Ok(ProfileSet {
            window,
            profiles,
            index,
        })
    }

    pub fn profile(&self, token: TokenId) -> &ContextProfile {
        &self.profiles[token.0 as usize]
    }

    pub fn try_profile(&self, token: TokenId) -> Result<&ContextProfile> {
        self.profiles
            .get(token.0 as usize)
            .ok_or(Error::UnknownTokenId { id: token.0 })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn profiles(&self) -> &[ContextProfile] {
        &self.profiles
    }

    pub fn total_mass(&self) -> u64 {
        self.profiles.iter().map(|p| p.mass).sum()
    }
}
