//! Labeled set partitions of `{0..k-1}` and the refinement order.
//!
//! A partition of a multiset `A` is always a partition of its index set, so
//! repeated values stay distinguishable. Aggregation over equal block-sum
//! multisets only happens when results are presented.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::multiset::IntMultiSet;

/// A set partition in canonical form: blocks ordered by their minimum element,
/// indices ascending within each block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
    /// `labels[i]` is the block containing `i`; this is the restricted growth string.
    labels: Vec<usize>,
}

impl SetPartition {
    /// Builds a partition from arbitrary blocks, validating and canonicalizing.
    pub fn from_blocks(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let ground: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; ground];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &i in block {
                if i >= ground {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} out of range for a ground set of size {ground}"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!("index {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        let mut labels = vec![0; ground];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block {
                labels[i] = b;
            }
        }
        Ok(Self::from_labels(&labels))
    }

    /// Builds the partition whose blocks are the level sets of `labels`.
    /// Any labeling works; it is renumbered into restricted growth form.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut renumber: Vec<Option<usize>> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut rgs = Vec::with_capacity(labels.len());
        for (i, &l) in labels.iter().enumerate() {
            if l >= renumber.len() {
                renumber.resize(l + 1, None);
            }
            let b = *renumber[l].get_or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
            rgs.push(b);
        }
        SetPartition { blocks, labels: rgs }
    }

    /// The single-block partition of `{0..k-1}` (the empty partition for k = 0).
    pub fn coarsest(k: usize) -> Self {
        Self::from_labels(&vec![0; k])
    }

    /// The all-singletons partition of `{0..k-1}`.
    pub fn finest(k: usize) -> Self {
        Self::from_labels(&(0..k).collect::<Vec<_>>())
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    /// ℓ(p), the number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn ground_size(&self) -> usize {
        self.labels.len()
    }

    /// Index of the block containing element `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn is_finest(&self) -> bool {
        self.len() == self.ground_size()
    }

    /// Parses the nested list form `[[0,2],[1]]`.
    pub fn parse(s: &str) -> Result<Self> {
        let blocks: Vec<Vec<usize>> = serde_json::from_str(s)
            .map_err(|e| Error::InvalidPartition(format!("cannot parse {s:?}: {e}")))?;
        Self::from_blocks(blocks)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, i) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(d)?;
        SetPartition::from_blocks(blocks).map_err(serde::de::Error::custom)
    }
}

/// Streaming enumeration of the set partitions of `{0..k-1}` in restricted
/// growth string order.
#[derive(Clone, Debug)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    /// prefix_max[i] = max(rgs[0..=i])
    prefix_max: Vec<usize>,
    max_blocks: usize,
    exact: Option<usize>,
    done: bool,
}

impl SetPartitions {
    fn new(k: usize, blocks: Option<usize>) -> Self {
        let max_blocks = blocks.unwrap_or(k);
        let done = match blocks {
            Some(m) => m > k || (m == 0 && k > 0),
            None => false,
        };
        SetPartitions {
            rgs: vec![0; k],
            prefix_max: vec![0; k],
            max_blocks,
            exact: blocks,
            done,
        }
    }

    fn advance(&mut self) -> bool {
        let k = self.rgs.len();
        for i in (1..k).rev() {
            let bound = self.prefix_max[i - 1] + 1;
            if self.rgs[i] < bound && self.rgs[i] + 1 < self.max_blocks {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..k {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return true;
            }
        }
        false
    }

    fn block_count(&self) -> usize {
        self.prefix_max.last().map_or(0, |m| m + 1)
    }
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        while !self.done {
            let current = SetPartition::from_labels(&self.rgs);
            let count = self.block_count();
            if !self.advance() {
                self.done = true;
            }
            if self.exact.is_none_or(|m| m == count) {
                return Some(current);
            }
        }
        None
    }
}

/// Every set partition of `{0..k-1}`, or only those with exactly `blocks`
/// blocks. Empty when `blocks > k`.
pub fn enumerate_set_partitions(k: usize, blocks: Option<usize>) -> SetPartitions {
    SetPartitions::new(k, blocks)
}

fn check_same_ground(q: &SetPartition, p: &SetPartition) -> Result<()> {
    if q.ground_size() != p.ground_size() {
        return Err(Error::SizeMismatch {
            expected: p.ground_size(),
            got: q.ground_size(),
        });
    }
    Ok(())
}

/// `q ≤ p`: every block of `q` lies inside a block of `p`.
pub fn refines(q: &SetPartition, p: &SetPartition) -> Result<bool> {
    check_same_ground(q, p)?;
    Ok(q.blocks().iter().all(|block| {
        let target = p.block_of(block[0]);
        block.iter().all(|&i| p.block_of(i) == target)
    }))
}

/// `[p:q]`, the partition of q's blocks (numbered in canonical order) that
/// groups together q-blocks lying in a common block of `p`.
pub fn induced_partition(p: &SetPartition, q: &SetPartition) -> Result<SetPartition> {
    if !refines(q, p)? {
        return Err(Error::NotRefinement {
            q: q.to_string(),
            p: p.to_string(),
        });
    }
    let labels: Vec<usize> = q.blocks().iter().map(|b| p.block_of(b[0])).collect();
    Ok(SetPartition::from_labels(&labels))
}

/// `q|_block`, re-indexed onto `0..|block|` in ascending order of `block`.
pub fn restrict_partition(q: &SetPartition, block: &[usize]) -> Result<SetPartition> {
    let mut sorted = block.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != block.len() {
        return Err(Error::InvalidInput(format!("block {block:?} repeats an index")));
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= q.ground_size()) {
        return Err(Error::InvalidInput(format!(
            "index {bad} out of range for a ground set of size {}",
            q.ground_size()
        )));
    }
    let mut inside = vec![false; q.ground_size()];
    for &i in &sorted {
        inside[i] = true;
    }
    for qb in q.blocks() {
        let count = qb.iter().filter(|&&i| inside[i]).count();
        if count != 0 && count != qb.len() {
            return Err(Error::Straddle {
                q: q.to_string(),
                block: block.to_vec(),
            });
        }
    }
    let labels: Vec<usize> = sorted.iter().map(|&i| q.block_of(i)).collect();
    Ok(SetPartition::from_labels(&labels))
}

/// Number of blocks of `q` inside the block `block` of a coarsening.
pub(crate) fn blocks_inside(q: &SetPartition, block: &[usize]) -> usize {
    let mut ids: Vec<usize> = block.iter().map(|&i| q.block_of(i)).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}

/// `|p|`: the multiset of per-block sums of `a`.
pub fn block_sums(p: &SetPartition, a: &IntMultiSet) -> Result<IntMultiSet> {
    if p.ground_size() != a.len() {
        return Err(Error::SizeMismatch {
            expected: a.len(),
            got: p.ground_size(),
        });
    }
    Ok(block_sum_values(p, a).into_iter().collect())
}

/// Per-block sums in block order (not sorted).
pub(crate) fn block_sum_values(p: &SetPartition, a: &IntMultiSet) -> Vec<u32> {
    p.blocks()
        .iter()
        .map(|b| b.iter().map(|&i| a.get(i)).sum())
        .collect()
}

/// All partitions `q ≤ p`, built blockwise from the partitions of each block of `p`.
pub fn refinements(p: &SetPartition) -> Vec<SetPartition> {
    let per_block: Vec<Vec<SetPartition>> = p
        .blocks()
        .iter()
        .map(|b| enumerate_set_partitions(b.len(), None).collect())
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_block.len()];
    loop {
        let mut labels = vec![0usize; p.ground_size()];
        let mut offset = 0;
        for (bi, block) in p.blocks().iter().enumerate() {
            let sub = &per_block[bi][choice[bi]];
            for (j, &i) in block.iter().enumerate() {
                labels[i] = offset + sub.block_of(j);
            }
            offset += sub.len();
        }
        out.push(SetPartition::from_labels(&labels));
        // odometer over the per-block choices
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return out;
            }
            choice[pos] += 1;
            if choice[pos] < per_block[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// All partitions `p ≥ s`, one for each partition of the blocks of `s`.
pub fn coarsenings(s: &SetPartition) -> Vec<SetPartition> {
    enumerate_set_partitions(s.len(), None)
        .map(|merge| {
            let labels: Vec<usize> = (0..s.ground_size())
                .map(|i| merge.block_of(s.block_of(i)))
                .collect();
            SetPartition::from_labels(&labels)
        })
        .collect()
}

/// Stirling numbers of the second kind via the triangular recurrence.
pub fn stirling2(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut row = vec![BigInt::zero(); k + 1];
    row[0] = BigInt::one();
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = &row[j] * BigInt::from(j) + &row[j - 1];
        }
        row[0] = BigInt::zero();
    }
    row[k].clone()
}

/// Bell numbers as row sums of Stirling numbers.
pub fn bell(n: usize) -> BigInt {
    (0..=n).map(|k| stirling2(n, k)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(blocks: &[&[usize]]) -> SetPartition {
        SetPartition::from_blocks(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_set_partitions(0, None).count(), 1);
        assert_eq!(enumerate_set_partitions(0, None).next().unwrap().len(), 0);
        assert_eq!(enumerate_set_partitions(3, None).count(), 5);
        assert_eq!(enumerate_set_partitions(4, Some(2)).count(), 7);
        assert_eq!(enumerate_set_partitions(3, Some(4)).count(), 0);
        assert_eq!(enumerate_set_partitions(3, Some(0)).count(), 0);
        assert_eq!(enumerate_set_partitions(0, Some(0)).count(), 1);
    }

    #[test]
    fn enumeration_order_is_rgs() {
        let all: Vec<String> = enumerate_set_partitions(3, None).map(|p| p.to_string()).collect();
        assert_eq!(
            all,
            vec![
                "[[0,1,2]]",
                "[[0,1],[2]]",
                "[[0,2],[1]]",
                "[[0],[1,2]]",
                "[[0],[1],[2]]"
            ]
        );
    }

    #[test]
    fn canonicalizes_blocks() {
        let p = sp(&[&[2, 1], &[0]]);
        assert_eq!(p.blocks(), &[vec![0], vec![1, 2]]);
        assert!(SetPartition::from_blocks(vec![vec![0], vec![0]]).is_err());
        assert!(SetPartition::from_blocks(vec![vec![0, 2]]).is_err());
        assert!(SetPartition::from_blocks(vec![vec![], vec![0]]).is_err());
        assert_eq!(SetPartition::parse("[[0,2],[1]]").unwrap(), sp(&[&[1], &[2, 0]]));
    }

    #[test]
    fn refines_examples() {
        assert!(refines(&sp(&[&[0], &[1]]), &sp(&[&[0, 1]])).unwrap());
        assert!(!refines(&sp(&[&[0, 1]]), &sp(&[&[0], &[1]])).unwrap());
        let p = sp(&[&[0, 2], &[1]]);
        assert!(refines(&p, &p).unwrap());
        assert!(matches!(
            refines(&sp(&[&[0]]), &sp(&[&[0, 1]])),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn induced_examples() {
        let got = induced_partition(&sp(&[&[0, 1, 2]]), &sp(&[&[0], &[1, 2]])).unwrap();
        assert_eq!(got, sp(&[&[0, 1]]));
        let p = sp(&[&[0, 2], &[1]]);
        assert_eq!(induced_partition(&p, &p).unwrap(), SetPartition::finest(2));
        let got = induced_partition(&sp(&[&[0, 1], &[2, 3]]), &sp(&[&[0], &[1], &[2, 3]])).unwrap();
        assert_eq!(got, sp(&[&[0, 1], &[2]]));
        assert!(matches!(
            induced_partition(&sp(&[&[0], &[1]]), &sp(&[&[0, 1]])),
            Err(Error::NotRefinement { .. })
        ));
    }

    #[test]
    fn restrict_examples() {
        let q = SetPartition::finest(3);
        assert_eq!(restrict_partition(&q, &[0, 2]).unwrap(), SetPartition::finest(2));
        let q = sp(&[&[0, 1], &[2]]);
        assert_eq!(restrict_partition(&q, &[0, 1]).unwrap(), sp(&[&[0, 1]]));
        assert!(matches!(restrict_partition(&q, &[1, 2]), Err(Error::Straddle { .. })));
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(3, 2), BigInt::from(3));
        assert_eq!(stirling2(5, 5), BigInt::from(1));
        assert_eq!(stirling2(4, 0), BigInt::from(0));
        assert_eq!(stirling2(0, 0), BigInt::from(1));
        assert_eq!(stirling2(2, 3), BigInt::from(0));
        assert_eq!(bell(10), BigInt::from(115_975));
    }

    #[test]
    fn block_sum_examples() {
        let a = IntMultiSet::from([1, 2]);
        assert_eq!(block_sums(&SetPartition::finest(2), &a).unwrap(), IntMultiSet::from([1, 2]));
        assert_eq!(block_sums(&SetPartition::coarsest(2), &a).unwrap(), IntMultiSet::from([3]));
        let a = IntMultiSet::from([1, 1, 4]);
        assert_eq!(block_sums(&sp(&[&[0, 2], &[1]]), &a).unwrap(), IntMultiSet::from([1, 5]));
        assert!(block_sums(&SetPartition::finest(2), &a).is_err());
    }

    #[test]
    fn refinements_and_coarsenings_match_filters() {
        for k in 0..=5 {
            let all: Vec<_> = enumerate_set_partitions(k, None).collect();
            for p in &all {
                let mut by_filter: Vec<_> =
                    all.iter().filter(|q| refines(q, p).unwrap()).cloned().collect();
                let mut built = refinements(p);
                by_filter.sort();
                built.sort();
                assert_eq!(by_filter, built);

                let mut up: Vec<_> = all.iter().filter(|q| refines(p, q).unwrap()).cloned().collect();
                let mut built = coarsenings(p);
                up.sort();
                built.sort();
                assert_eq!(up, built);
            }
        }
    }
}
