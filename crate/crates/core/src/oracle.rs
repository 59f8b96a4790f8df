//! Independent genus-zero verification machinery.
//!
//! Nothing here calls the `λ`/`N` formulas of [`crate::kappa`]: top-degree
//! kappa integrals are computed from ψ-integrals and the inverse Faber
//! expansion, and pairings against boundary strata are assembled from those
//! integrals component by component. Since kappa-ring pairings depend only on
//! the dimension sequence of a stratum, a multiset of component dimensions is
//! all the pairing needs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg;
use crate::multiset::{integer_partitions, IntMultiSet};
use crate::numeric::{multinomial_of, sign, BigRational};
use crate::partition::{block_sum_values, enumerate_set_partitions, SetPartition};

/// The multiset `{d(v) - 3}` of component dimensions of a stable tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DimensionSequence(IntMultiSet);

impl DimensionSequence {
    pub fn new(dims: IntMultiSet) -> Self {
        DimensionSequence(dims)
    }

    pub fn dims(&self) -> &IntMultiSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Markings of a chain realizing these dimensions: `Σ(dim + 3) - 2(ℓ - 1)`.
    pub fn chain_markings(&self) -> usize {
        let valence: usize = self.0.values().iter().map(|&d| d as usize + 3).sum();
        valence - 2 * self.len().saturating_sub(1)
    }
}

/// `∫_{M̄_{0,m}} Π ψ_i^{e_i}`: the multinomial `C(m-3; e)` when the degrees add
/// up to `m - 3`, zero otherwise.
pub fn psi_integral(exponents: &[u32]) -> Result<BigInt> {
    let m = exponents.len();
    if m < 3 {
        return Err(Error::InvalidInput(format!(
            "ψ-integrals need at least 3 markings, got {m}"
        )));
    }
    let total: usize = exponents.iter().map(|&e| e as usize).sum();
    if total != m - 3 {
        return Ok(BigInt::zero());
    }
    Ok(multinomial_of(exponents))
}

/// `∫_{M̄_{0,n}} ψ(|p|)`, evaluated on `M̄_{0,n+ℓ(p)}` with exponents
/// `|p_i| + 1` at the forgotten points. Zero when `ΣA ≠ n - 3`.
pub fn integrate_psi_pushforward(p: &SetPartition, a: &IntMultiSet, n: u32) -> Result<BigInt> {
    if p.ground_size() != a.len() {
        return Err(Error::SizeMismatch {
            expected: a.len(),
            got: p.ground_size(),
        });
    }
    if a.sum() as i64 != n as i64 - 3 {
        return Ok(BigInt::zero());
    }
    let mut exponents = vec![0u32; n as usize];
    exponents.extend(block_sum_values(p, a).into_iter().map(|s| s + 1));
    psi_integral(&exponents)
}

/// `∫_{M̄_{0,n}} κ_A` through the inverse Faber expansion and ψ-integrals.
pub fn integrate_kappa_top(a: &IntMultiSet, n: u32) -> Result<BigRational> {
    if !a.all_positive() {
        return Err(Error::NonPositiveIndex(a.values().to_vec()));
    }
    Ok(BigRational::from_integer(kappa_top_int(a, n)?))
}

fn kappa_top_int(a: &IntMultiSet, n: u32) -> Result<BigInt> {
    if a.sum() as i64 != n as i64 - 3 {
        return Ok(BigInt::zero());
    }
    let mut acc = BigInt::zero();
    for p in enumerate_set_partitions(a.len(), None) {
        acc += sign(a.len() + p.len()) * integrate_psi_pushforward(&p, a, n)?;
    }
    Ok(acc)
}

/// `∫_{[G]} κ_B` for any stratum `G` with the given dimension sequence.
///
/// Each factor `κ_{b_i}` restricts to a sum over components, so the integral
/// is a sum over assignments of the indices of `B` to components whose
/// degrees fill every component exactly; a component receives the top
/// integral of its sub-monomial (1 for an empty sub-monomial on a point).
pub fn pair_kappa_stratum(b: &IntMultiSet, dims: &DimensionSequence) -> Result<BigRational> {
    if !b.all_positive() {
        return Err(Error::NonPositiveIndex(b.values().to_vec()));
    }
    Ok(BigRational::from_integer(pair_int(b, dims)?))
}

fn pair_int(b: &IntMultiSet, dims: &DimensionSequence) -> Result<BigInt> {
    let targets = dims.dims().values();
    if b.sum() != dims.dims().sum() {
        return Ok(BigInt::zero());
    }
    let mut assignment = vec![0usize; b.len()];
    let mut load = vec![0u32; targets.len()];
    let mut acc = BigInt::zero();
    assign(b, targets, 0, &mut assignment, &mut load, &mut acc)?;
    Ok(acc)
}

fn assign(
    b: &IntMultiSet,
    targets: &[u32],
    i: usize,
    assignment: &mut [usize],
    load: &mut [u32],
    acc: &mut BigInt,
) -> Result<()> {
    if i == b.len() {
        if load != targets {
            return Ok(());
        }
        let mut value = BigInt::one();
        for (v, &dim) in targets.iter().enumerate() {
            let sub: IntMultiSet = (0..b.len())
                .filter(|&j| assignment[j] == v)
                .map(|j| b.get(j))
                .collect();
            value *= kappa_top_int(&sub, dim + 3)?;
            if value.is_zero() {
                return Ok(());
            }
        }
        *acc += value;
        return Ok(());
    }
    for v in 0..targets.len() {
        if load[v] + b.get(i) > targets[v] {
            continue;
        }
        load[v] += b.get(i);
        assignment[i] = v;
        assign(b, targets, i + 1, assignment, load, acc)?;
        load[v] -= b.get(i);
    }
    Ok(())
}

/// The exact pairing system and its solution.
#[derive(Clone, Debug, Serialize)]
pub struct PairingSolution {
    pub a: IntMultiSet,
    pub markings: u32,
    pub d: usize,
    /// Unknowns: basis monomials, as integer partitions of `ΣA` with at most `d` parts.
    pub unknowns: Vec<IntMultiSet>,
    /// Rows: dimension sequences of length `d` summing to `ΣA`.
    pub strata: Vec<DimensionSequence>,
    #[serde(skip)]
    pub matrix: Vec<Vec<BigInt>>,
    #[serde(skip)]
    pub rhs: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub residual_zero: bool,
    #[serde(skip)]
    pub values: Vec<BigRational>,
}

impl PairingSolution {
    /// Coefficients of the monomials reachable as block sums of `A`, plus any
    /// other unknown that solved to a nonzero value.
    pub fn coefficients(&self) -> BTreeMap<IntMultiSet, BigRational> {
        let reachable: std::collections::BTreeSet<IntMultiSet> =
            enumerate_set_partitions(self.a.len(), None)
                .filter(|p| p.len() <= self.d)
                .map(|p| block_sum_values(&p, &self.a).into_iter().collect())
                .collect();
        self.unknowns
            .iter()
            .zip(&self.values)
            .filter(|(u, v)| reachable.contains(*u) || !v.is_zero())
            .map(|(u, v)| (u.clone(), v.clone()))
            .collect()
    }

    /// The solved value of every unknown.
    pub fn all_values(&self) -> BTreeMap<IntMultiSet, BigRational> {
        self.unknowns.iter().cloned().zip(self.values.iter().cloned()).collect()
    }
}

/// Recovers the basis coefficients of `κ_A` on `M̄_{0,n}` from pairings alone.
pub fn solve_x_by_pairing(a: &IntMultiSet, n: u32) -> Result<PairingSolution> {
    solve_x_by_pairing_with(a, n, Exec::default())
}

pub fn solve_x_by_pairing_with(a: &IntMultiSet, n: u32, exec: Exec) -> Result<PairingSolution> {
    if !a.all_positive() {
        return Err(Error::NonPositiveIndex(a.values().to_vec()));
    }
    let d = n as i64 - a.sum() as i64 - 2;
    if d < 1 {
        return Err(Error::InvalidInput(format!(
            "pairing solve needs d = n - ΣA - 2 >= 1, got {d}"
        )));
    }
    let d = d as usize;
    let total = a.sum();
    let unknowns = integer_partitions(total, d);
    let strata: Vec<DimensionSequence> = integer_partitions(total, d)
        .into_iter()
        .map(|ip| {
            let mut dims = ip.into_vec();
            dims.resize(d, 0);
            DimensionSequence::new(IntMultiSet::new(dims))
        })
        .collect();
    let rows: Vec<(Vec<BigInt>, BigInt)> = exec.try_map(&strata, |dims| {
        let row = unknowns
            .iter()
            .map(|u| pair_int(u, dims))
            .collect::<Result<Vec<_>>>()?;
        Ok::<_, Error>((row, pair_int(a, dims)?))
    })?;
    let (matrix, rhs): (Vec<Vec<BigInt>>, Vec<BigInt>) = rows.into_iter().unzip();
    let size = unknowns.len();
    let rank = linalg::rank(&matrix);
    let values = match linalg::solve_square(&matrix, &rhs) {
        Some(v) if rank == size => v,
        _ => {
            return Err(Error::RankDeficient {
                rank,
                size,
                matrix: matrix
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect())
                    .collect(),
            })
        }
    };
    let residual_zero = linalg::residual(&matrix, &values, &rhs)
        .iter()
        .all(Zero::is_zero);
    Ok(PairingSolution {
        a: a.clone(),
        markings: n,
        d,
        unknowns,
        rows: strata.len(),
        cols: size,
        strata,
        matrix,
        rhs,
        rank,
        residual_zero,
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeVertex {
    /// Marking labels in `1..=n`.
    pub markings: Vec<usize>,
    /// `d(v) = deg(v) + #markings`.
    pub valence: usize,
}

/// A genus-zero stable tree with markings on its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableTree {
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<(usize, usize)>,
}

impl StableTree {
    pub fn marking_count(&self) -> usize {
        self.vertices.iter().map(|v| v.markings.len()).sum()
    }

    pub fn dimension_sequence(&self) -> DimensionSequence {
        DimensionSequence::new(self.vertices.iter().map(|v| v.valence as u32 - 3).collect())
    }

    /// Checks the tree, marking and stability conditions.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        if nv == 0 || self.edges.len() != nv - 1 {
            return Err(Error::InvalidInput("not a tree: wrong edge count".into()));
        }
        let mut degree = vec![0usize; nv];
        let mut root: Vec<usize> = (0..nv).collect();
        fn find(root: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            if u >= nv || v >= nv {
                return Err(Error::InvalidInput("edge endpoint out of range".into()));
            }
            degree[u] += 1;
            degree[v] += 1;
            let (ru, rv) = (find(&mut root, u), find(&mut root, v));
            if ru == rv {
                return Err(Error::InvalidInput("not a tree: cycle".into()));
            }
            root[ru] = rv;
        }
        let mut labels: Vec<usize> = self.vertices.iter().flat_map(|v| v.markings.clone()).collect();
        labels.sort_unstable();
        if labels != (1..=labels.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("markings do not partition 1..=n".into()));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.valence != degree[i] + v.markings.len() || v.valence < 3 {
                return Err(Error::InvalidInput(format!("vertex {i} is unstable")));
            }
        }
        Ok(())
    }
}

/// A chain-shaped stable tree realizing `dims`, markings handed out
/// left to right.
pub fn build_stratum_tree(dims: &DimensionSequence, n: usize) -> Result<StableTree> {
    if dims.is_empty() {
        return Err(Error::InvalidInput("empty dimension sequence".into()));
    }
    let expected = dims.chain_markings();
    if expected != n {
        return Err(Error::MarkingMismatch { expected, got: n });
    }
    let len = dims.len();
    let mut next = 1;
    let vertices = dims
        .dims()
        .values()
        .iter()
        .enumerate()
        .map(|(i, &dim)| {
            let valence = dim as usize + 3;
            let deg = usize::from(i > 0) + usize::from(i + 1 < len);
            let count = valence - deg;
            let markings = (next..next + count).collect();
            next += count;
            TreeVertex { markings, valence }
        })
        .collect();
    let edges = (1..len).map(|i| (i - 1, i)).collect();
    Ok(StableTree { vertices, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    fn ms(v: &[u32]) -> IntMultiSet {
        IntMultiSet::new(v.to_vec())
    }

    fn dims(v: &[u32]) -> DimensionSequence {
        DimensionSequence::new(ms(v))
    }

    #[test]
    fn psi_integral_examples() {
        assert_eq!(psi_integral(&[0, 0, 0]).unwrap(), BigInt::from(1));
        assert_eq!(psi_integral(&[1, 1, 0, 0, 0]).unwrap(), BigInt::from(2));
        assert_eq!(psi_integral(&[1, 1, 0, 0]).unwrap(), BigInt::from(0));
        assert!(psi_integral(&[0, 0]).is_err());
        assert_eq!(psi_integral(&[0, 2, 0, 1, 0, 0]).unwrap(), psi_integral(&[1, 0, 0, 0, 0, 2]).unwrap());
    }

    #[test]
    fn pushforward_examples() {
        let a = ms(&[1, 1]);
        assert_eq!(integrate_psi_pushforward(&SetPartition::finest(2), &a, 5).unwrap(), BigInt::from(6));
        assert_eq!(integrate_psi_pushforward(&SetPartition::coarsest(2), &a, 5).unwrap(), BigInt::from(1));
        assert_eq!(integrate_psi_pushforward(&SetPartition::coarsest(1), &ms(&[2]), 5).unwrap(), BigInt::from(1));
        assert_eq!(integrate_psi_pushforward(&SetPartition::finest(2), &a, 6).unwrap(), BigInt::from(0));
    }

    #[test]
    fn kappa_top_examples() {
        assert_eq!(integrate_kappa_top(&ms(&[2]), 5).unwrap(), ratio(1, 1));
        assert_eq!(integrate_kappa_top(&ms(&[1, 1]), 5).unwrap(), ratio(5, 1));
        assert_eq!(integrate_kappa_top(&ms(&[1, 2]), 6).unwrap(), ratio(9, 1));
        assert_eq!(integrate_kappa_top(&ms(&[1, 2]), 7).unwrap(), ratio(0, 1));
        assert_eq!(integrate_kappa_top(&ms(&[]), 3).unwrap(), ratio(1, 1));
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pair_kappa_stratum(&ms(&[2]), &dims(&[2])).unwrap(), ratio(1, 1));
        assert_eq!(pair_kappa_stratum(&ms(&[1, 1]), &dims(&[1, 1])).unwrap(), ratio(2, 1));
        assert_eq!(pair_kappa_stratum(&ms(&[2]), &dims(&[1, 1])).unwrap(), ratio(0, 1));
        assert_eq!(pair_kappa_stratum(&ms(&[1, 1]), &dims(&[0, 2])).unwrap(), ratio(5, 1));
        assert_eq!(pair_kappa_stratum(&ms(&[1]), &dims(&[0, 2])).unwrap(), ratio(0, 1));
    }

    #[test]
    fn solve_examples() {
        let s = solve_x_by_pairing(&ms(&[1, 1]), 5).unwrap();
        assert_eq!(s.coefficients(), BTreeMap::from([(ms(&[2]), ratio(5, 1))]));
        assert!(s.residual_zero);
        let s = solve_x_by_pairing(&ms(&[1, 1]), 6).unwrap();
        assert_eq!(
            s.coefficients(),
            BTreeMap::from([(ms(&[1, 1]), ratio(1, 1)), (ms(&[2]), ratio(0, 1))])
        );
        assert_eq!((s.rows, s.cols, s.rank), (2, 2, 2));
        let s = solve_x_by_pairing(&ms(&[2]), 6).unwrap();
        assert_eq!(s.coefficients(), BTreeMap::from([(ms(&[2]), ratio(1, 1))]));
        assert!(solve_x_by_pairing(&ms(&[1, 1]), 4).is_err());
    }

    #[test]
    fn stratum_tree_examples() {
        let t = build_stratum_tree(&dims(&[2]), 5).unwrap();
        assert_eq!(t.vertices.len(), 1);
        assert_eq!(t.marking_count(), 5);
        t.validate().unwrap();

        let t = build_stratum_tree(&dims(&[0, 2]), 6).unwrap();
        assert_eq!(t.vertices.iter().map(|v| v.valence).collect::<Vec<_>>(), vec![3, 5]);
        assert_eq!(t.dimension_sequence(), dims(&[0, 2]));
        t.validate().unwrap();

        let t = build_stratum_tree(&dims(&[1, 1]), 6).unwrap();
        assert_eq!(t.vertices.iter().map(|v| v.valence).collect::<Vec<_>>(), vec![4, 4]);
        t.validate().unwrap();

        let t = build_stratum_tree(&dims(&[0, 0, 0, 3]), 9).unwrap();
        t.validate().unwrap();
        assert!(matches!(
            build_stratum_tree(&dims(&[1, 1]), 7),
            Err(Error::MarkingMismatch { expected: 6, got: 7 })
        ));
    }
}
