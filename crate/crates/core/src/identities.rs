//! Brute-force checkers for the standalone combinatorial identities.
//!
//! Each check evaluates both sides from their definitions and reports exact
//! equality. Sweeps are driven by [`IdentityBounds`] and come back in
//! parameter order whatever the execution strategy.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::kappa::{lambda_int, n_of_partition};
use crate::multiset::{bounded_multisets, IntMultiSet};
use crate::numeric::{
    binomial, factorial, falling_factorial, multinomial, multinomial_of, rational,
    serialize_rational, sign, BigRational,
};
use crate::partition::{block_sum_values, enumerate_set_partitions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruferCode(pub Vec<usize>);

/// Labeled tree on `0..vertex_count` from its Prüfer code. Edges come back
/// as `(min, max)` pairs, sorted.
pub fn prufer_decode(code: &PruferCode, vertex_count: usize) -> Result<Vec<(usize, usize)>> {
    if vertex_count < 2 || code.0.len() != vertex_count - 2 {
        return Err(Error::InvalidPrufer(format!(
            "code of length {} does not fit {vertex_count} vertices",
            code.0.len()
        )));
    }
    if let Some(&bad) = code.0.iter().find(|&&v| v >= vertex_count) {
        return Err(Error::InvalidPrufer(format!("label {bad} out of range")));
    }
    let mut degree = vec![1usize; vertex_count];
    for &v in &code.0 {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(vertex_count - 1);
    for &v in &code.0 {
        let leaf = (0..vertex_count).find(|&u| degree[u] == 1).expect("a leaf exists");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..vertex_count).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.sort_unstable();
    Ok(edges)
}

/// Prüfer code of a labeled tree on `0..vertex_count`.
pub fn prufer_encode(edges: &[(usize, usize)], vertex_count: usize) -> Result<PruferCode> {
    if vertex_count < 2 || edges.len() != vertex_count - 1 {
        return Err(Error::InvalidPrufer("edge count does not match a tree".into()));
    }
    let mut adj = vec![Vec::new(); vertex_count];
    for &(u, v) in edges {
        if u >= vertex_count || v >= vertex_count || u == v {
            return Err(Error::InvalidPrufer(format!("bad edge ({u}, {v})")));
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; vertex_count];
    let mut code = Vec::with_capacity(vertex_count - 2);
    for _ in 0..vertex_count - 2 {
        let leaf = (0..vertex_count)
            .find(|&u| !removed[u] && degree[u] == 1)
            .ok_or_else(|| Error::InvalidPrufer("not a tree".into()))?;
        let parent = *adj[leaf]
            .iter()
            .find(|&&w| !removed[w])
            .ok_or_else(|| Error::InvalidPrufer("not a tree".into()))?;
        code.push(parent);
        removed[leaf] = true;
        degree[parent] -= 1;
    }
    let code = PruferCode(code);
    let mut sorted = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect::<Vec<_>>();
    sorted.sort_unstable();
    if prufer_decode(&code, vertex_count)? != sorted {
        return Err(Error::InvalidPrufer("not a tree".into()));
    }
    Ok(code)
}

/// `Σ p(T)` over labeled trees on `{v0, a_1, …, a_n}` with `deg(v0) = k`,
/// where `p(T)` multiplies the values of the code entries and `v0` has
/// value 1. Every code is decoded and the degree read off the tree.
pub fn tree_sum_oracle(a: &IntMultiSet, k: usize) -> Result<BigInt> {
    let n = a.len();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("tree sum needs 1 <= k <= {n}, got {k}")));
    }
    let vertices = n + 1;
    let value = |v: usize| if v == 0 { 1 } else { a.get(v - 1) };
    let mut code = vec![0usize; n - 1];
    let mut acc = BigInt::zero();
    loop {
        let edges = prufer_decode(&PruferCode(code.clone()), vertices)?;
        let deg0 = edges.iter().filter(|&&(u, _)| u == 0).count();
        if deg0 == k {
            acc += code.iter().map(|&v| BigInt::from(value(v))).product::<BigInt>();
        }
        // odometer over all codes
        let mut i = 0;
        loop {
            if i == code.len() {
                return Ok(acc);
            }
            code[i] += 1;
            if code[i] < vertices {
                break;
            }
            code[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: Map<String, Value>,
    #[serde(serialize_with = "serialize_rational")]
    pub lhs: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub rhs: BigRational,
    /// Third value for three-way checks (the Prüfer-tree oracle).
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt")]
    pub oracle: Option<BigRational>,
    pub pass: bool,
}

fn serialize_opt<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => serialize_rational(q, s),
        None => s.serialize_none(),
    }
}

impl IdentityReport {
    fn new(identity: &str, params: Value, lhs: BigInt, rhs: BigInt, oracle: Option<BigInt>) -> Self {
        let pass = lhs == rhs && oracle.as_ref().is_none_or(|o| *o == rhs);
        let Value::Object(params) = params else {
            unreachable!("params are built as objects")
        };
        IdentityReport {
            identity: identity.to_string(),
            params,
            lhs: rational(lhs),
            rhs: rational(rhs),
            oracle: oracle.map(rational),
            pass,
        }
    }
}

pub const IDENTITIES: [&str; 5] = ["combthm", "comblemma", "stirling", "nk_lemma", "ff_multinomial"];

fn check_k(a: &IntMultiSet, k: usize) -> Result<()> {
    if !a.all_positive() || a.is_empty() {
        return Err(Error::InvalidInput("A must be a nonempty multiset of positive integers".into()));
    }
    if k == 0 || k > a.len() {
        return Err(Error::InvalidInput(format!("need 1 <= k <= {}, got {k}", a.len())));
    }
    Ok(())
}

/// `Σ_{p ∈ SP(A;k)} C(||p|+1|; |p|+1) Π_i C(|p_i+1|; p_i+1) = C(n-1,k-1) C(|A+1|; A+1)`.
pub fn check_combthm(a: &IntMultiSet, k: usize) -> Result<IdentityReport> {
    check_k(a, k)?;
    let lhs: BigInt = enumerate_set_partitions(a.len(), Some(k))
        .map(|p| {
            let outer: Vec<u32> = block_sum_values(&p, a).into_iter().map(|s| s + 1).collect();
            let inner: BigInt = p.blocks().iter().map(|b| multinomial(&a.select(b).shifted())).product();
            multinomial_of(&outer) * inner
        })
        .sum();
    let n = a.len() as i64;
    let rhs = binomial(n - 1, k as i64 - 1) * multinomial(&a.shifted());
    Ok(IdentityReport::new("combthm", json!({"a": a, "k": k}), lhs, rhs, None))
}

/// `Σ_{p ∈ SP(A;k)} Π_i |p_i|^{ℓ(p_i)-1} = C(n-1,k-1) (ΣA)^{n-k}`, with the
/// Prüfer-tree sum as a third value.
pub fn check_comblemma(a: &IntMultiSet, k: usize) -> Result<IdentityReport> {
    check_k(a, k)?;
    let lhs: BigInt = enumerate_set_partitions(a.len(), Some(k))
        .map(|p| {
            p.blocks()
                .iter()
                .zip(block_sum_values(&p, a))
                .map(|(b, s)| Pow::pow(BigInt::from(s), b.len() - 1))
                .product::<BigInt>()
        })
        .sum();
    let n = a.len();
    let rhs = binomial(n as i64 - 1, k as i64 - 1) * Pow::pow(BigInt::from(a.sum()), n - k);
    let oracle = tree_sum_oracle(a, k)?;
    Ok(IdentityReport::new("comblemma", json!({"a": a, "k": k}), lhs, rhs, Some(oracle)))
}

/// `Σ_k (-1)^k (k-1)! S(n,k) = -δ_{n,1}`, with `S(n,k)` counted by
/// enumerating set partitions.
pub fn check_stirling(n: usize) -> Result<IdentityReport> {
    if n == 0 {
        return Err(Error::InvalidInput("stirling needs n >= 1".into()));
    }
    let mut counts = vec![0usize; n + 1];
    for p in enumerate_set_partitions(n, None) {
        counts[p.len()] += 1;
    }
    let lhs: BigInt = (1..=n)
        .map(|k| sign(k) * factorial(k - 1) * BigInt::from(counts[k]))
        .sum();
    let rhs = if n == 1 { -BigInt::one() } else { BigInt::zero() };
    Ok(IdentityReport::new("stirling", json!({"n": n}), lhs, rhs, None))
}

/// `Σ_{p ∈ SP(B)} N_p λ_{|p|}`: zero when `ℓ(B) ≥ 2`, one when `ℓ(B) = 1`.
pub fn check_nk_lemma(b: &IntMultiSet) -> Result<IdentityReport> {
    if b.is_empty() || !b.all_positive() {
        return Err(Error::InvalidInput("B must be a nonempty multiset of positive integers".into()));
    }
    let lhs: BigInt = enumerate_set_partitions(b.len(), None)
        .map(|p| {
            let sums: IntMultiSet = block_sum_values(&p, b).into_iter().collect();
            n_of_partition(&p, b) * lambda_int(&sums)
        })
        .sum();
    let rhs = if b.len() == 1 { BigInt::one() } else { BigInt::zero() };
    Ok(IdentityReport::new("nk_lemma", json!({"b": b}), lhs, rhs, None))
}

/// `(x_1+…+x_r)_n = Σ_{k_1+…+k_r=n} C(n; k) Π (x_i)_{k_i}`.
pub fn check_ff_multinomial(xs: &[i64], n: usize) -> Result<IdentityReport> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("ff_multinomial needs at least one variable".into()));
    }
    let total: i64 = xs.iter().sum();
    let lhs = falling_factorial(&BigInt::from(total), n);
    let mut rhs = BigInt::zero();
    let mut ks = vec![0u32; xs.len()];
    compositions(n as u32, 0, &mut ks, &mut |ks| {
        let prod: BigInt = xs
            .iter()
            .zip(ks)
            .map(|(&x, &k)| falling_factorial(&BigInt::from(x), k as usize))
            .product();
        rhs += multinomial_of(ks) * prod;
    });
    Ok(IdentityReport::new("ff_multinomial", json!({"x": xs, "n": n}), lhs, rhs, None))
}

fn compositions(rest: u32, i: usize, ks: &mut [u32], f: &mut impl FnMut(&[u32])) {
    if i + 1 == ks.len() {
        ks[i] = rest;
        f(ks);
        return;
    }
    for k in 0..=rest {
        ks[i] = k;
        compositions(rest - k, i + 1, ks, f);
    }
}

fn param<'a>(params: &'a Value, key: &str) -> Result<&'a Value> {
    params
        .get(key)
        .ok_or_else(|| Error::InvalidInput(format!("missing parameter `{key}`")))
}

fn param_multiset(params: &Value, key: &str) -> Result<IntMultiSet> {
    serde_json::from_value(param(params, key)?.clone())
        .map_err(|e| Error::InvalidInput(format!("parameter `{key}`: {e}")))
}

fn param_usize(params: &Value, key: &str) -> Result<usize> {
    param(params, key)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::InvalidInput(format!("parameter `{key}` must be a nonnegative integer")))
}

/// Dispatches on the identity name. Parameters are JSON objects:
/// `{"a", "k"}` for combthm and comblemma, `{"n"}` for stirling, `{"b"}` for
/// nk_lemma, `{"x": [..], "n"}` for ff_multinomial.
pub fn check_identity(name: &str, params: &Value) -> Result<IdentityReport> {
    match name {
        "combthm" => check_combthm(&param_multiset(params, "a")?, param_usize(params, "k")?),
        "comblemma" => check_comblemma(&param_multiset(params, "a")?, param_usize(params, "k")?),
        "stirling" => check_stirling(param_usize(params, "n")?),
        "nk_lemma" => check_nk_lemma(&param_multiset(params, "b")?),
        "ff_multinomial" => {
            let xs: Vec<i64> = serde_json::from_value(param(params, "x")?.clone())
                .map_err(|e| Error::InvalidInput(format!("parameter `x`: {e}")))?;
            check_ff_multinomial(&xs, param_usize(params, "n")?)
        }
        other => Err(Error::InvalidInput(format!("unknown identity `{other}`"))),
    }
}

/// Sweep bounds for every identity suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityBounds {
    pub combthm_max_len: usize,
    pub combthm_max_entry: u32,
    pub combthm_max_sum: u32,
    pub comblemma_max_len: usize,
    pub comblemma_max_entry: u32,
    pub stirling_max_n: usize,
    pub nk_max_len: usize,
    pub nk_max_entry: u32,
    pub ff_max_abs: i64,
    pub ff_max_n: usize,
    pub ff3_max_abs: i64,
    pub ff3_max_n: usize,
}

impl Default for IdentityBounds {
    fn default() -> Self {
        IdentityBounds {
            combthm_max_len: 5,
            combthm_max_entry: 4,
            combthm_max_sum: 8,
            comblemma_max_len: 5,
            comblemma_max_entry: 3,
            stirling_max_n: 10,
            nk_max_len: 5,
            nk_max_entry: 4,
            ff_max_abs: 5,
            ff_max_n: 8,
            ff3_max_abs: 3,
            ff3_max_n: 5,
        }
    }
}

impl IdentityBounds {
    /// Caps the multiset sweeps at `max_len` entries and (for combthm) total
    /// `max_sum`.
    pub fn limited(max_sum: u32, max_len: usize) -> Self {
        let d = IdentityBounds::default();
        IdentityBounds {
            combthm_max_len: d.combthm_max_len.min(max_len),
            combthm_max_sum: d.combthm_max_sum.min(max_sum),
            comblemma_max_len: d.comblemma_max_len.min(max_len),
            nk_max_len: d.nk_max_len.min(max_len),
            ..d
        }
    }
}

#[derive(Clone, Debug)]
enum Case {
    Combthm(IntMultiSet, usize),
    Comblemma(IntMultiSet, usize),
    Stirling(usize),
    Nk(IntMultiSet),
    Ff(Vec<i64>, usize),
}

fn cases(bounds: &IdentityBounds) -> Vec<Case> {
    let mut out = Vec::new();
    let b = bounds;
    for a in bounded_multisets(b.combthm_max_len, 1, b.combthm_max_entry, b.combthm_max_sum) {
        for k in 1..=a.len() {
            out.push(Case::Combthm(a.clone(), k));
        }
    }
    let lemma_sum = b.comblemma_max_entry * b.comblemma_max_len as u32;
    for a in bounded_multisets(b.comblemma_max_len, 1, b.comblemma_max_entry, lemma_sum) {
        for k in 1..=a.len() {
            out.push(Case::Comblemma(a.clone(), k));
        }
    }
    out.extend((1..=b.stirling_max_n).map(Case::Stirling));
    let nk_sum = b.nk_max_entry * b.nk_max_len as u32;
    out.extend(
        bounded_multisets(b.nk_max_len, 1, b.nk_max_entry, nk_sum)
            .into_iter()
            .map(Case::Nk),
    );
    for x in -b.ff_max_abs..=b.ff_max_abs {
        for y in -b.ff_max_abs..=b.ff_max_abs {
            for n in 0..=b.ff_max_n {
                out.push(Case::Ff(vec![x, y], n));
            }
        }
    }
    let r = b.ff3_max_abs;
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                for n in 0..=b.ff3_max_n {
                    out.push(Case::Ff(vec![x, y, z], n));
                }
            }
        }
    }
    out
}

fn run_case(case: &Case) -> Result<IdentityReport> {
    match case {
        Case::Combthm(a, k) => check_combthm(a, *k),
        Case::Comblemma(a, k) => check_comblemma(a, *k),
        Case::Stirling(n) => check_stirling(*n),
        Case::Nk(b) => check_nk_lemma(b),
        Case::Ff(xs, n) => check_ff_multinomial(xs, *n),
    }
}

/// Runs every identity over `bounds`; reports in parameter order.
pub fn identity_sweep(bounds: &IdentityBounds, exec: Exec) -> Result<Vec<IdentityReport>> {
    exec.try_map(&cases(bounds), run_case)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: &[u32]) -> IntMultiSet {
        IntMultiSet::new(v.to_vec())
    }

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn decode_examples() {
        assert_eq!(prufer_decode(&PruferCode(vec![]), 2).unwrap(), vec![(0, 1)]);
        assert_eq!(prufer_decode(&PruferCode(vec![2]), 3).unwrap(), vec![(0, 2), (1, 2)]);
        assert!(prufer_decode(&PruferCode(vec![3]), 3).is_err());
        assert!(prufer_decode(&PruferCode(vec![0, 0]), 3).is_err());
    }

    #[test]
    fn roundtrip_all_small_codes() {
        for m in 2..=6usize {
            let len = m - 2;
            let total = m.pow(len as u32);
            let mut seen = std::collections::BTreeSet::new();
            for idx in 0..total {
                let mut rest = idx;
                let code: Vec<usize> = (0..len)
                    .map(|_| {
                        let v = rest % m;
                        rest /= m;
                        v
                    })
                    .collect();
                let edges = prufer_decode(&PruferCode(code.clone()), m).unwrap();
                assert_eq!(prufer_encode(&edges, m).unwrap().0, code);
                assert!(seen.insert(edges));
            }
        }
    }

    #[test]
    fn encode_rejects_cycles() {
        assert!(prufer_encode(&[(0, 1), (1, 2), (0, 2)], 4).is_err());
        assert!(prufer_encode(&[(0, 1), (2, 3), (2, 3)], 4).is_err());
    }

    #[test]
    fn tree_sum_examples() {
        assert_eq!(tree_sum_oracle(&ms(&[1, 1]), 1).unwrap(), bi(2));
        assert_eq!(tree_sum_oracle(&ms(&[1, 1]), 2).unwrap(), bi(1));
        assert_eq!(tree_sum_oracle(&ms(&[1, 1, 1]), 2).unwrap(), bi(6));
        assert_eq!(tree_sum_oracle(&ms(&[5]), 1).unwrap(), bi(1));
    }

    #[test]
    fn identity_examples() {
        let r = check_combthm(&ms(&[1, 1]), 1).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone(), r.pass), (rational(6), rational(6), true));
        let r = check_stirling(3).unwrap();
        assert!(r.pass && r.lhs == rational(0));
        assert_eq!(check_stirling(1).unwrap().lhs, rational(-1));
        let r = check_nk_lemma(&ms(&[1, 1])).unwrap();
        assert!(r.pass && r.lhs == rational(0));
        let r = check_nk_lemma(&ms(&[3])).unwrap();
        assert!(r.pass && r.lhs == rational(1));
        let r = check_comblemma(&ms(&[1, 2, 3]), 2).unwrap();
        assert!(r.pass);
        assert_eq!(r.oracle, Some(rational(12)));
        assert!(check_ff_multinomial(&[-3, 4], 5).unwrap().pass);
    }

    #[test]
    fn dispatch_by_name() {
        let r = check_identity("combthm", &json!({"a": [1, 1], "k": 1})).unwrap();
        assert!(r.pass);
        assert!(check_identity("stirling", &json!({"n": 4})).unwrap().pass);
        assert!(check_identity("ff_multinomial", &json!({"x": [2, -1, 3], "n": 4})).unwrap().pass);
        assert!(check_identity("nope", &json!({})).is_err());
        assert!(check_identity("combthm", &json!({"a": [1, 1], "k": 3})).is_err());
        assert!(check_identity("nk_lemma", &json!({"b": "x"})).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = check_stirling(2).unwrap();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"identity":"stirling","params":{"n":2},"lhs":"0/1","rhs":"0/1","pass":true}"#
        );
    }

    #[test]
    fn small_sweep_passes_in_order() {
        let bounds = IdentityBounds::limited(4, 3);
        let seq = identity_sweep(&bounds, Exec::Sequential).unwrap();
        assert!(seq.iter().all(|r| r.pass));
        assert_eq!(seq, identity_sweep(&bounds, Exec::Parallel).unwrap());
    }
}
