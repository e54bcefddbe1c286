//! Nested token families at a descending similarity-threshold schedule.
//!
//! Level 0 is always the identity partition (one singleton per token). Each
//! later level `l` holds the connected components of the graph with an edge
//! between two tokens whenever their similarity is at least the level's
//! threshold. Because edge sets only grow as thresholds fall, every family
//! is a union of families from the level above it; the partitions nest.

use crate::colloc::ProfileSet;
use crate::corpus::TokenId;
use crate::error::{Error, Result};
use crate::similarity::{self, render_score, Score, SimilarityRow};

/// Descending thresholds for the non-identity levels. Level 0 (identity) is
/// implicit and not listed here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    thresholds: Vec<Score>,
}

impl Schedule {
    pub fn new(thresholds: Vec<Score>) -> Result<Self> {
        for pair in thresholds.windows(2) {
            if pair[0] <= pair[1] {
                return Err(Error::Config(format!(
                    "threshold schedule must be strictly decreasing: {} then {}",
                    render_score(&pair[0]),
                    render_score(&pair[1])
                )));
            }
        }
        if let Some(first) = thresholds.first() {
            if *first > similarity::one() {
                return Err(Error::Config(format!(
                    "threshold {} is above 1",
                    render_score(first)
                )));
            }
        }
        Ok(Schedule { thresholds })
    }

    /// `identity, 3/4, 1/2, 1/4, 0`
    pub fn standard() -> Self {
        Schedule {
            thresholds: vec![
                similarity::score(3, 4),
                similarity::score(1, 2),
                similarity::score(1, 4),
                similarity::zero(),
            ],
        }
    }

    /// Only the identity level.
    pub fn identity_only() -> Self {
        Schedule { thresholds: vec![] }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "identity" {
            return Schedule::new(vec![]);
        }
        let thresholds = text
            .split(',')
            .map(similarity::parse_score)
            .collect::<Result<Vec<_>>>()?;
        Schedule::new(thresholds)
    }

    pub fn render(&self) -> String {
        if self.thresholds.is_empty() {
            "identity".to_string()
        } else {
            self.thresholds
                .iter()
                .map(render_score)
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// Thresholds of the non-identity levels.
    pub fn thresholds(&self) -> &[Score] {
        &self.thresholds
    }

    /// Total number of levels including the identity level.
    pub fn level_count(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Threshold of a level; `None` for the identity level 0.
    pub fn threshold(&self, level: usize) -> Option<&Score> {
        if level == 0 {
            None
        } else {
            self.thresholds.get(level - 1)
        }
    }
}

/// A partition of the vocabulary, in canonical form: each family is sorted,
/// families are ordered by their smallest member, and `family_of[t]` is the
/// family index of token `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub families: Vec<Vec<TokenId>>,
    pub family_of: Vec<u32>,
}

impl Partition {
    fn from_representatives(reps: Vec<u32>) -> Self {
        let mut members: std::collections::BTreeMap<u32, Vec<TokenId>> =
            std::collections::BTreeMap::new();
        for (idx, rep) in reps.iter().enumerate() {
            members.entry(*rep).or_default().push(TokenId(idx as u32));
        }
        let families: Vec<Vec<TokenId>> = members.into_values().collect();
        let mut family_of = vec![0u32; reps.len()];
        for (fam_idx, family) in families.iter().enumerate() {
            for token in family {
                family_of[token.0 as usize] = fam_idx as u32;
            }
        }
        Partition {
            families,
            family_of,
        }
    }

    pub fn identity(n: usize) -> Self {
        Partition {
            families: (0..n).map(|i| vec![TokenId(i as u32)]).collect(),
            family_of: (0..n as u32).collect(),
        }
    }

    pub fn family(&self, token: TokenId) -> u32 {
        self.family_of[token.0 as usize]
    }

    /// True when every family of `self` is a union of families of `finer`.
    pub fn refines_into(&self, finer: &Partition) -> bool {
        if self.family_of.len() != finer.family_of.len() {
            return false;
        }
        // two tokens in one finer family must share a family here
        finer.families.iter().all(|family| {
            family
                .windows(2)
                .all(|pair| self.family(pair[0]) == self.family(pair[1]))
        })
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Union by smaller root so representatives are canonical.
    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
    }

    fn representatives(&mut self) -> Vec<u32> {
        (0..self.parent.len() as u32)
            .map(|i| self.find(i))
            .collect()
    }
}

/// Vocabulary partitions at every schedule level, finest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyHierarchy {
    pub schedule: Schedule,
    pub levels: Vec<Partition>,
}

impl FamilyHierarchy {
    /// Single-linkage construction: collect all positive-similarity pairs
    /// once, then sweep them in descending order, widening a union-find as
    /// each level's threshold admits more edges.
    pub fn build(profiles: &ProfileSet, schedule: Schedule) -> Self {
        let n = profiles.len();
        let mut edges: Vec<(Score, u32, u32)> = Vec::new();
        let lowest_positive = schedule
            .thresholds()
            .iter()
            .rfind(|t| **t > similarity::zero())
            .cloned();
        if let Some(cutoff) = lowest_positive {
            for a in 0..n as u32 {
                let row = SimilarityRow::compute(profiles, TokenId(a));
                for b in (a + 1)..n as u32 {
                    let sim = row.score(profiles, TokenId(b));
                    if sim >= cutoff {
                        edges.push((sim, a, b));
                    }
                }
            }
            edges
                .sort_by(|(sa, aa, ab), (sb, ba, bb)| sb.cmp(sa).then(aa.cmp(ba)).then(ab.cmp(bb)));
        }

        let mut levels = vec![Partition::identity(n)];
        let mut uf = UnionFind::new(n);
        let mut next_edge = 0usize;
        for theta in schedule.thresholds() {
            if *theta == similarity::zero() {
                // complete graph: every token in one family
                levels.push(Partition::from_representatives(vec![0; n]));
                continue;
            }
            while next_edge < edges.len() && edges[next_edge].0 >= *theta {
                let (_, a, b) = edges[next_edge];
                uf.union(a, b);
                next_edge += 1;
            }
            levels.push(Partition::from_representatives(uf.representatives()));
        }
        FamilyHierarchy { schedule, levels }
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, idx: usize) -> Option<&Partition> {
        self.levels.get(idx)
    }

    /// Nestedness check: every level is a coarsening of the one before it.
    pub fn is_nested(&self) -> bool {
        self.levels
            .windows(2)
            .all(|pair| pair[1].refines_into(&pair[0]))
    }
}
