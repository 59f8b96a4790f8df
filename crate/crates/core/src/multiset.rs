use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A finite multiset of nonnegative integers, stored sorted non-decreasing.
///
/// Equality is sequence equality of the canonical form, so two multisets
/// built from different orderings compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntMultiSet(Vec<u32>);

impl IntMultiSet {
    pub fn new(mut values: Vec<u32>) -> Self {
        values.sort_unstable();
        IntMultiSet(values)
    }

    pub fn empty() -> Self {
        IntMultiSet(Vec::new())
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// The sub-multiset picked out by positions of the canonical order.
    pub fn select(&self, positions: &[usize]) -> IntMultiSet {
        IntMultiSet::new(positions.iter().map(|&i| self.0[i]).collect())
    }

    /// `A + 1`: every entry shifted up by one.
    pub fn shifted(&self) -> IntMultiSet {
        IntMultiSet(self.0.iter().map(|v| v + 1).collect())
    }

    pub fn all_positive(&self) -> bool {
        self.0.iter().all(|&v| v >= 1)
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// Parses a comma separated list such as `1,1,4`. Brackets are tolerated.
    pub fn parse(s: &str) -> Result<Self, String> {
        let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
        if trimmed.trim().is_empty() {
            return Ok(IntMultiSet::empty());
        }
        trimmed
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| format!("bad multiset entry {t:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(IntMultiSet::new)
    }
}

impl From<Vec<u32>> for IntMultiSet {
    fn from(v: Vec<u32>) -> Self {
        IntMultiSet::new(v)
    }
}

impl<const N: usize> From<[u32; N]> for IntMultiSet {
    fn from(v: [u32; N]) -> Self {
        IntMultiSet::new(v.to_vec())
    }
}

impl FromIterator<u32> for IntMultiSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        IntMultiSet::new(iter.into_iter().collect())
    }
}

impl fmt::Display for IntMultiSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMultiSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMultiSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Vec::<u32>::deserialize(d).map(IntMultiSet::new)
    }
}

/// All multisets with `1..=max_len` entries drawn from `lo..=hi` and total at
/// most `max_sum`, in lexicographic order of their canonical form.
pub fn bounded_multisets(max_len: usize, lo: u32, hi: u32, max_sum: u32) -> Vec<IntMultiSet> {
    fn rec(
        cur: &mut Vec<u32>,
        start: u32,
        sum: u32,
        bounds: (usize, u32, u32),
        out: &mut Vec<IntMultiSet>,
    ) {
        let (max_len, hi, max_sum) = bounds;
        if !cur.is_empty() {
            out.push(IntMultiSet(cur.clone()));
        }
        if cur.len() == max_len {
            return;
        }
        for v in start..=hi {
            if sum + v > max_sum {
                break;
            }
            cur.push(v);
            rec(cur, v, sum + v, bounds, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), lo, 0, (max_len, hi, max_sum), &mut out);
    out
}

/// Integer partitions of `total` into at most `max_parts` positive parts,
/// each returned as a canonical multiset.
pub fn integer_partitions(total: u32, max_parts: usize) -> Vec<IntMultiSet> {
    fn rec(rest: u32, max_part: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<IntMultiSet>) {
        if rest == 0 {
            out.push(IntMultiSet::new(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        for part in (1..=rest.min(max_part)).rev() {
            cur.push(part);
            rec(rest - part, part, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, total, max_parts, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        assert_eq!(IntMultiSet::from([4, 1, 1]), IntMultiSet::from([1, 4, 1]));
        assert_eq!(IntMultiSet::from([4, 1, 1]).values(), &[1, 1, 4]);
        assert_eq!(IntMultiSet::empty().sum(), 0);
        assert_eq!(IntMultiSet::empty().len(), 0);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(IntMultiSet::parse("2,1").unwrap(), IntMultiSet::from([1, 2]));
        assert_eq!(IntMultiSet::parse("[1, 1,4]").unwrap().values(), &[1, 1, 4]);
        assert!(IntMultiSet::parse("").unwrap().is_empty());
        assert!(IntMultiSet::parse("1,x").is_err());
        assert!(IntMultiSet::parse("-1").is_err());
    }

    #[test]
    fn integer_partition_counts() {
        // p(6) = 11, partitions of 6 into at most 2 parts = 4
        assert_eq!(integer_partitions(6, 6).len(), 11);
        assert_eq!(integer_partitions(6, 2).len(), 4);
        assert_eq!(integer_partitions(0, 3), vec![IntMultiSet::empty()]);
    }

    #[test]
    fn bounded_multiset_sweep() {
        let all = bounded_multisets(2, 1, 2, 3);
        let as_vecs: Vec<_> = all.iter().map(|m| m.values().to_vec()).collect();
        assert_eq!(as_vecs, vec![vec![1], vec![1, 1], vec![1, 2], vec![2]]);
    }
}
