//! The kappa ring: Faber's expansion and its inverse, the `λ`, `N` and `C_k`
//! coefficients, and the product rule in the additive basis.
//!
//! A product `κ_A = κ_{a1}···κ_{ak}` on the compact-type moduli space with
//! genus `g` and `n` markings expands as
//!
//! ```text
//! κ_A = Σ_{p ∈ SP(A), ℓ(p) ≤ d} x_p κ_{|p|},    d = 2g + n - ΣA - 2,
//! ```
//!
//! where `p` runs over set partitions of the index set of `A` and `|p|` is the
//! multiset of block sums. The coefficient `x_p` is available by three routes
//! (see [`Method`]) that must agree exactly.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::cache::{self, Table};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::multiset::IntMultiSet;
use crate::numeric::{
    alt_binomial_partial_sum, binomial, factorial, format_rational, multinomial, rational, sign,
    BigRational,
};
use crate::partition::{
    block_sum_values, blocks_inside, enumerate_set_partitions, induced_partition, refinements,
    SetPartition,
};

/// `κ_q = Π κ_{q_i}`; the empty monomial is the ring unit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KappaMonomial(IntMultiSet);

impl KappaMonomial {
    pub fn new(indices: IntMultiSet) -> Result<Self> {
        if !indices.all_positive() {
            return Err(Error::NonPositiveIndex(indices.into_vec()));
        }
        Ok(KappaMonomial(indices))
    }

    pub fn unit() -> Self {
        KappaMonomial(IntMultiSet::empty())
    }

    pub fn indices(&self) -> &IntMultiSet {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for KappaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        write!(f, "κ{}", self.0)
    }
}

/// Report order: longer monomials first, then lexicographic.
fn report_order(a: &IntMultiSet, b: &IntMultiSet) -> std::cmp::Ordering {
    b.len().cmp(&a.len()).then_with(|| a.cmp(b))
}

#[derive(Serialize)]
struct TermView<'a> {
    monomial: &'a IntMultiSet,
    #[serde(serialize_with = "crate::numeric::serialize_rational")]
    coefficient: &'a BigRational,
}

fn serialize_terms<'a, S: Serializer>(
    terms: impl Iterator<Item = (&'a IntMultiSet, &'a BigRational)>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut sorted: Vec<_> = terms.collect();
    sorted.sort_by(|x, y| report_order(x.0, y.0));
    let mut seq = s.serialize_seq(Some(sorted.len()))?;
    for (monomial, coefficient) in sorted {
        seq.serialize_element(&TermView {
            monomial,
            coefficient,
        })?;
    }
    seq.end()
}

fn accumulate<K: Ord>(terms: &mut BTreeMap<K, BigRational>, key: K, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(key) {
        Entry::Vacant(slot) => {
            slot.insert(c);
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += c;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

/// A finite linear combination of kappa monomials; zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KappaPoly {
    terms: BTreeMap<KappaMonomial, BigRational>,
}

impl KappaPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: KappaMonomial, c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: KappaMonomial, c: BigRational) {
        accumulate(&mut self.terms, m, c);
    }

    pub fn add_scaled(&mut self, other: &KappaPoly, scale: &BigRational) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * scale);
        }
    }

    pub fn scaled(&self, scale: &BigRational) -> KappaPoly {
        let mut out = KappaPoly::zero();
        out.add_scaled(self, scale);
        out
    }

    pub fn coefficient(&self, m: &KappaMonomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&KappaMonomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in report order (length descending, then lexicographic).
    pub fn sorted_terms(&self) -> Vec<(&KappaMonomial, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|x, y| report_order(x.0.indices(), y.0.indices()));
        v
    }
}

impl Serialize for KappaPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_terms(self.terms.iter().map(|(m, c)| (m.indices(), c)), s)
    }
}

impl fmt::Display for KappaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})·{m}", format_rational(c))?;
        }
        Ok(())
    }
}

/// A linear combination of ψ-pushforward classes `ψ(q)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PsiPoly {
    terms: BTreeMap<IntMultiSet, BigRational>,
}

impl PsiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, key: IntMultiSet, c: BigRational) {
        accumulate(&mut self.terms, key, c);
    }

    pub fn coefficient(&self, key: &IntMultiSet) -> BigRational {
        self.terms.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IntMultiSet, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Serialize for PsiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_terms(self.terms.iter(), s)
    }
}

/// Genus and marking count of `M^ct_{g,n}`, evaluated through the genus-zero
/// model with `n + 2g` markings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModuliContext {
    pub genus: u32,
    pub markings: u32,
}

impl ModuliContext {
    pub fn new(genus: u32, markings: u32) -> Self {
        ModuliContext { genus, markings }
    }

    pub fn genus_zero(markings: u32) -> Self {
        Self::new(0, markings)
    }

    /// Marking count of the genus-zero model.
    pub fn model_markings(&self) -> u32 {
        self.markings + 2 * self.genus
    }

    pub fn socle_dimension(&self) -> i64 {
        self.model_markings() as i64 - 3
    }

    /// The maximal number of parts of a basis monomial in degree `degree`.
    pub fn max_parts(&self, degree: u32) -> i64 {
        2 * self.genus as i64 + self.markings as i64 - degree as i64 - 2
    }

    /// The genus-zero context the computation actually runs in.
    pub fn genus_zero_model(&self) -> ModuliContext {
        ModuliContext::genus_zero(self.model_markings())
    }
}

fn require_positive(a: &IntMultiSet) -> Result<()> {
    if a.all_positive() {
        Ok(())
    } else {
        Err(Error::NonPositiveIndex(a.values().to_vec()))
    }
}

/// Faber's formula `ψ(q) = Σ_{σ ∈ S_k} κ_{σ(q)}`, regrouped by cycle type:
/// each set partition `p` stands for the `Π (|block|-1)!` permutations whose
/// cycles are its blocks.
pub fn faber_expand(q: &IntMultiSet) -> Result<KappaPoly> {
    require_positive(q)?;
    let mut out = KappaPoly::zero();
    for p in enumerate_set_partitions(q.len(), None) {
        let weight: BigInt = p.blocks().iter().map(|b| factorial(b.len() - 1)).product();
        let monomial = KappaMonomial(block_sum_values(&p, q).into_iter().collect());
        out.add_term(monomial, BigRational::from_integer(weight));
    }
    Ok(out)
}

/// Inverse of Faber's formula: `κ_A = Σ_{p ∈ SP(A)} (-1)^{ℓ(A)+ℓ(p)} ψ(|p|)`.
pub fn kappa_as_psi(a: &IntMultiSet) -> Result<PsiPoly> {
    require_positive(a)?;
    let mut out = PsiPoly::zero();
    for p in enumerate_set_partitions(a.len(), None) {
        let key: IntMultiSet = block_sum_values(&p, a).into_iter().collect();
        out.add_term(key, rational(sign(a.len() + p.len())));
    }
    Ok(out)
}

/// Applies Faber's formula linearly to a ψ-combination.
pub fn psi_to_kappa(psi: &PsiPoly) -> Result<KappaPoly> {
    let mut out = KappaPoly::zero();
    for (key, c) in psi.terms() {
        out.add_scaled(&faber_expand(key)?, c);
    }
    Ok(out)
}

fn lambda_uncached(a: &IntMultiSet) -> BigInt {
    let mut acc = BigInt::zero();
    for p in enumerate_set_partitions(a.len(), None) {
        let shifted: IntMultiSet = block_sum_values(&p, a).into_iter().map(|s| s + 1).collect();
        acc += sign(a.len() + p.len()) * multinomial(&shifted);
    }
    acc
}

fn n_uncached(a: &IntMultiSet) -> BigInt {
    if a.is_empty() {
        return BigInt::one();
    }
    let mut acc = BigInt::zero();
    for r in enumerate_set_partitions(a.len(), None) {
        let mut term = sign(a.len() + r.len()) * factorial(r.len() - 1);
        for block in r.blocks() {
            term *= multinomial(&a.select(block).shifted());
        }
        acc += term;
    }
    acc
}

/// `λ_A` as an integer; `λ_∅ = 1`. Memoized per canonical multiset.
pub(crate) fn lambda_int(a: &IntMultiSet) -> BigInt {
    cache::global().get_or_compute(Table::Lambda, a, || lambda_uncached(a))
}

/// `N_A` as an integer; `N_∅ = 1`. Memoized per canonical multiset.
pub(crate) fn n_int(a: &IntMultiSet) -> BigInt {
    cache::global().get_or_compute(Table::N, a, || n_uncached(a))
}

/// Imports a cache file into the global cache after recomputing every entry;
/// a single wrong value rejects the file.
pub fn load_verified_cache(text: &str) -> std::result::Result<usize, String> {
    cache::global().import_json_checked(text, |table, key, value| {
        let fresh = match table {
            Table::Lambda => lambda_uncached(key),
            Table::N => n_uncached(key),
        };
        fresh == *value
    })
}

/// `λ_A = Σ_{p ∈ SP(A)} (-1)^{ℓ(A)+ℓ(p)} C(|(|p|+1)|; |p|+1)`, the top-degree
/// evaluation of `κ_A` relative to `κ_{ΣA}`.
pub fn lambda_coeff(a: &IntMultiSet) -> Result<BigRational> {
    require_positive(a)?;
    Ok(rational(lambda_int(a)))
}

/// `N_A = Σ_{r ∈ SP(A)} (-1)^{ℓ(A)+ℓ(r)} (ℓ(r)-1)! Π_j C(|r_j+1|; r_j+1)`.
pub fn n_coeff(a: &IntMultiSet) -> Result<BigRational> {
    require_positive(a)?;
    Ok(rational(n_int(a)))
}

/// `λ_q = Π_i λ_{q_i}` for a partition of the index set of `a`.
pub(crate) fn lambda_of_partition(q: &SetPartition, a: &IntMultiSet) -> BigInt {
    q.blocks().iter().map(|b| lambda_int(&a.select(b))).product()
}

/// `N_p = Π_i N_{p_i}` for a partition of the index set of `a`.
pub(crate) fn n_of_partition(p: &SetPartition, a: &IntMultiSet) -> BigInt {
    p.blocks().iter().map(|b| n_int(&a.select(b))).product()
}

/// `C_k(A) = Σ_{q ∈ SP(A;k)} λ_q N_{|q|}`.
pub fn c_k(a: &IntMultiSet, k: usize) -> Result<BigRational> {
    require_positive(a)?;
    if k == 0 || k > a.len() {
        return Err(Error::InvalidInput(format!(
            "C_k needs 1 <= k <= {}, got k = {k}",
            a.len()
        )));
    }
    Ok(rational(c_k_int(a, k)))
}

fn c_k_int(a: &IntMultiSet, k: usize) -> BigInt {
    enumerate_set_partitions(a.len(), Some(k))
        .map(|q| {
            let sums: IntMultiSet = block_sum_values(&q, a).into_iter().collect();
            lambda_of_partition(&q, a) * n_int(&sums)
        })
        .sum()
}

/// How to evaluate the product coefficient `x_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// `x_p = Σ_{q ≤ p, ℓ(q) ≤ d} λ_q N_{[p:q]}`.
    Recursive,
    /// `x_p = Σ_{k_1+…+k_ℓ ≤ d} Π_i C_{k_i}(p_i)`.
    Ck,
    /// The closed sum over chains `t ≤ r ≤ p`.
    Closed,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Recursive, Method::Ck, Method::Closed];

    pub fn name(self) -> &'static str {
        match self {
            Method::Recursive => "recursive",
            Method::Ck => "ck",
            Method::Closed => "closed",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Truncation factor used in the closed formula, as a function of
/// `m = ℓ(t) - ℓ(r)`, `ℓ(r)`, `d` and `M = min(ℓ(t), d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruncationVariant {
    /// `Σ_{k=ℓ(r)}^{d} (-1)^k C(m, k - ℓ(r))`.
    PartialSum,
    /// `(-1)^M C(m, M - ℓ(r))`.
    Printed,
    /// `(-1)^M C(m - 1, M - ℓ(r))` with `C(-1, 0) = 1`.
    Shifted,
}

impl TruncationVariant {
    pub const ALL: [TruncationVariant; 3] = [
        TruncationVariant::PartialSum,
        TruncationVariant::Printed,
        TruncationVariant::Shifted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TruncationVariant::PartialSum => "partial-sum",
            TruncationVariant::Printed => "printed",
            TruncationVariant::Shifted => "shifted",
        }
    }

    fn factor(self, len_t: usize, len_r: usize, d: usize) -> BigInt {
        let m = len_t as i64 - len_r as i64;
        let big_m = len_t.min(d);
        match self {
            TruncationVariant::PartialSum => alt_binomial_partial_sum(m, len_r as i64, d as i64),
            TruncationVariant::Printed => sign(big_m) * binomial(m, big_m as i64 - len_r as i64),
            TruncationVariant::Shifted => {
                sign(big_m) * binomial(m - 1, big_m as i64 - len_r as i64)
            }
        }
    }
}

/// The variant `Method::Closed` evaluates; `reconcile` confirms it against
/// the recursive method. It coincides term by term with the partial sum.
pub const PINNED_TRUNCATION: TruncationVariant = TruncationVariant::Shifted;

fn check_coefficient_args(p: &SetPartition, a: &IntMultiSet, d: usize) -> Result<()> {
    require_positive(a)?;
    if p.ground_size() != a.len() {
        return Err(Error::SizeMismatch {
            expected: a.len(),
            got: p.ground_size(),
        });
    }
    if d == 0 || p.len() > d {
        return Err(Error::TooManyBlocks {
            len: p.len(),
            d: d as i64,
        });
    }
    Ok(())
}

/// The coefficient `x_p` of `κ_{|p|}` contributed by the set partition `p`
/// in the expansion of `κ_A` with at most `d` parts.
pub fn x_coeff(p: &SetPartition, a: &IntMultiSet, d: usize, method: Method) -> Result<BigRational> {
    check_coefficient_args(p, a, d)?;
    Ok(match method {
        Method::Recursive => rational(x_recursive(p, a, d)),
        Method::Ck => rational(x_ck(p, a, d)),
        Method::Closed => x_closed(p, a, d, PINNED_TRUNCATION),
    })
}

/// The closed formula with an explicit truncation variant.
pub fn x_coeff_closed(
    p: &SetPartition,
    a: &IntMultiSet,
    d: usize,
    variant: TruncationVariant,
) -> Result<BigRational> {
    check_coefficient_args(p, a, d)?;
    Ok(x_closed(p, a, d, variant))
}

fn x_recursive(p: &SetPartition, a: &IntMultiSet, d: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for q in refinements(p) {
        if q.len() > d {
            continue;
        }
        let sums = block_sum_values(&q, a);
        let grouping = induced_partition(p, &q).expect("refinement by construction");
        let n_term: BigInt = grouping
            .blocks()
            .iter()
            .map(|c| n_int(&c.iter().map(|&j| sums[j]).collect()))
            .product();
        acc += lambda_of_partition(&q, a) * n_term;
    }
    acc
}

fn x_ck(p: &SetPartition, a: &IntMultiSet, d: usize) -> BigInt {
    // table[i][k-1] = C_k(p_i)
    let table: Vec<Vec<BigInt>> = p
        .blocks()
        .iter()
        .map(|b| {
            let sub = a.select(b);
            (1..=sub.len()).map(|k| c_k_int(&sub, k)).collect()
        })
        .collect();
    fn rec(table: &[Vec<BigInt>], budget: usize) -> BigInt {
        let Some((first, rest)) = table.split_first() else {
            return BigInt::one();
        };
        let mut acc = BigInt::zero();
        for (i, c) in first.iter().enumerate() {
            let k = i + 1;
            if k > budget {
                break;
            }
            if !c.is_zero() {
                acc += c * rec(rest, budget - k);
            }
        }
        acc
    }
    rec(&table, d)
}

fn x_closed(p: &SetPartition, a: &IntMultiSet, d: usize, variant: TruncationVariant) -> BigRational {
    let mut acc = BigRational::zero();
    for r in refinements(p) {
        let coarse_weight: BigInt = p
            .blocks()
            .iter()
            .map(|pb| factorial(blocks_inside(&r, pb) - 1))
            .product();
        let r_sums = block_sum_values(&r, a);
        for t in refinements(&r) {
            let trunc = variant.factor(t.len(), r.len(), d);
            if trunc.is_zero() {
                continue;
            }
            let den: BigInt = block_sum_values(&t, a)
                .into_iter()
                .map(|s| factorial(s as usize + 1))
                .product();
            let num: BigInt = r
                .blocks()
                .iter()
                .zip(&r_sums)
                .map(|(rb, &s)| factorial(s as usize + blocks_inside(&t, rb)))
                .product();
            let numer = sign(a.len() + t.len() + r.len()) * num * &coarse_weight * trunc;
            acc += BigRational::new(numer, den);
        }
    }
    acc
}

/// The basis expansion of `κ_A` on `M^ct_{g,n}` using the closed formula.
pub fn product(a: &IntMultiSet, genus: u32, markings: u32) -> Result<KappaPoly> {
    product_with(a, &ModuliContext::new(genus, markings), Method::Closed, Exec::default())
}

/// The basis expansion of `κ_A`, with an explicit method and execution strategy.
///
/// Returns the zero polynomial when `d = 2g + n - ΣA - 2 ≤ 0`.
pub fn product_with(
    a: &IntMultiSet,
    ctx: &ModuliContext,
    method: Method,
    exec: Exec,
) -> Result<KappaPoly> {
    require_positive(a)?;
    let d = ctx.max_parts(a.sum());
    if d <= 0 {
        return Ok(KappaPoly::zero());
    }
    let d = d as usize;
    let parts: Vec<SetPartition> = enumerate_set_partitions(a.len(), None)
        .filter(|p| p.len() <= d)
        .collect();
    let coefficients = exec.try_map(&parts, |p| x_coeff(p, a, d, method))?;
    let mut out = KappaPoly::zero();
    for (p, x) in parts.iter().zip(coefficients) {
        let monomial = KappaMonomial(block_sum_values(p, a).into_iter().collect());
        out.add_term(monomial, x);
    }
    Ok(out)
}

/// Rewrites every monomial of `poly` in the basis and sums exactly.
pub fn reduce_to_basis(poly: &KappaPoly, genus: u32, markings: u32) -> Result<KappaPoly> {
    let mut out = KappaPoly::zero();
    for (m, c) in poly.terms() {
        out.add_scaled(&product(m.indices(), genus, markings)?, c);
    }
    Ok(out)
}
