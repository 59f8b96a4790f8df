//! Verification suites: cross-method agreement, genus reindexing, the Faber
//! round trip, identity sweeps, reconciliation and pinned examples.
//!
//! Reports hold only exact data, so two runs over the same bounds serialize
//! identically regardless of `Exec`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::identities::{identity_sweep, IdentityBounds, IDENTITIES};
use crate::kappa::{
    kappa_as_psi, product_with, psi_to_kappa, x_coeff, KappaMonomial, KappaPoly, Method,
    ModuliContext,
};
use crate::multiset::{bounded_multisets, IntMultiSet};
use crate::numeric::{format_rational, ratio, BigRational};
use crate::oracle::{integrate_kappa_top, pair_kappa_stratum, solve_x_by_pairing, DimensionSequence};
use crate::partition::{enumerate_set_partitions, SetPartition};
use crate::reconcile::reconcile;

/// Bounds of the coefficient sweep: `ℓ(A) ≤ max_len`, entries in
/// `1..=max_entry`, `ΣA ≤ max_sum`, `1 ≤ d ≤ max_d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepBounds {
    pub max_len: usize,
    pub max_entry: u32,
    pub max_sum: u32,
    pub max_d: usize,
}

impl Default for SweepBounds {
    fn default() -> Self {
        SweepBounds {
            max_len: 4,
            max_entry: 4,
            max_sum: 6,
            max_d: 4,
        }
    }
}

impl SweepBounds {
    /// Every `(A, d)` pair of the sweep, in order.
    pub fn pairs(&self) -> Vec<(IntMultiSet, usize)> {
        bounded_multisets(self.max_len, 1, self.max_entry, self.max_sum)
            .into_iter()
            .flat_map(|a| (1..=self.max_d).map(move |d| (a.clone(), d)))
            .collect()
    }
}

/// One coefficient `x_p` of the sweep; markings are `n = ΣA + d + 2`.
#[derive(Clone, Debug)]
pub struct CoefficientCase {
    pub a: IntMultiSet,
    pub d: usize,
    pub partition: SetPartition,
}

impl CoefficientCase {
    pub fn markings(&self) -> u32 {
        self.a.sum() + self.d as u32 + 2
    }
}

pub fn coefficient_cases(bounds: &SweepBounds) -> Vec<CoefficientCase> {
    let mut out = Vec::new();
    for (a, d) in bounds.pairs() {
        for partition in enumerate_set_partitions(a.len(), None).filter(|p| p.len() <= d) {
            out.push(CoefficientCase {
                a: a.clone(),
                d,
                partition,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Methods,
    Genus,
    Faber,
    Identities,
    Reconcile,
    Examples,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] =
        ["methods", "genus", "faber", "identities", "reconcile", "examples", "all"];

    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "methods" => Suite::Methods,
            "genus" => Suite::Genus,
            "faber" => Suite::Faber,
            "identities" => Suite::Identities,
            "reconcile" => Suite::Reconcile,
            "examples" => Suite::Examples,
            "all" => Suite::All,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        Suite::NAMES[self as usize]
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub sweep: SweepBounds,
    pub identities: IdentityBounds,
    pub faber_samples: usize,
    pub faber_seed: u64,
    pub exec: Exec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            sweep: SweepBounds::default(),
            identities: IdentityBounds::default(),
            faber_samples: 20,
            faber_seed: 0x006b_6170_7061,
            exec: Exec::default(),
        }
    }
}

/// Failure descriptions kept per check; the count is always exact.
const MAX_FAILURE_NOTES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub cases: usize,
    pub failures: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckResult {
    fn from_outcomes(check: &str, outcomes: Vec<Option<String>>) -> Self {
        let cases = outcomes.len();
        let notes: Vec<String> = outcomes.into_iter().flatten().collect();
        let failures = notes.len();
        CheckResult {
            check: check.to_string(),
            cases,
            failures,
            pass: failures == 0 && cases > 0,
            notes: notes.into_iter().take(MAX_FAILURE_NOTES).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    let suites: &[Suite] = match suite {
        Suite::All => &[
            Suite::Examples,
            Suite::Methods,
            Suite::Genus,
            Suite::Identities,
            Suite::Faber,
            Suite::Reconcile,
        ],
        _ => std::slice::from_ref(&suite),
    };
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(match s {
            Suite::Methods => vec![methods_by_partition(opts)?, methods_vs_pairing(opts)?],
            Suite::Genus => vec![genus_lift(1, opts)?, genus_lift(2, opts)?],
            Suite::Faber => vec![faber_roundtrip(opts)?],
            Suite::Identities => identities(opts)?,
            Suite::Reconcile => vec![reconcile_check(opts)?],
            Suite::Examples => examples()?,
            Suite::All => unreachable!(),
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        suite: suite.name(),
        checks,
        pass,
    })
}

/// recursive = ck = closed on every coefficient of the sweep.
pub fn methods_by_partition(opts: &VerifyOptions) -> Result<CheckResult> {
    let cases = coefficient_cases(&opts.sweep);
    let outcomes = opts.exec.try_map(&cases, |case| {
        let values = Method::ALL
            .iter()
            .map(|&m| x_coeff(&case.partition, &case.a, case.d, m))
            .collect::<Result<Vec<_>>>()?;
        Ok::<_, Error>((values[1..].iter().any(|v| *v != values[0])).then(|| {
            format!(
                "A={} d={} p={}: {}",
                case.a,
                case.d,
                case.partition,
                values.iter().map(format_rational).collect::<Vec<_>>().join(" / ")
            )
        }))
    })?;
    Ok(CheckResult::from_outcomes("methods.per-partition", outcomes))
}

fn aggregated(poly: &KappaPoly) -> BTreeMap<IntMultiSet, BigRational> {
    poly.terms().map(|(m, c)| (m.indices().clone(), c.clone())).collect()
}

/// Every method's `product`, aggregated to basis monomials, against the
/// pairing solve.
pub fn methods_vs_pairing(opts: &VerifyOptions) -> Result<CheckResult> {
    let pairs = opts.sweep.pairs();
    let outcomes = opts.exec.try_map(&pairs, |(a, d)| {
        let n = a.sum() + *d as u32 + 2;
        let solved = solve_x_by_pairing(a, n)?;
        let ctx = ModuliContext::genus_zero(n);
        for method in Method::ALL {
            let poly = aggregated(&product_with(a, &ctx, method, Exec::Sequential)?);
            if let Some(key) = poly.keys().find(|k| !solved.unknowns.contains(k)) {
                return Ok(Some(format!("A={a} n={n}: {} produced off-basis {key}", method.name())));
            }
            for (u, v) in solved.all_values() {
                let got = poly.get(&u).cloned().unwrap_or_else(BigRational::zero);
                if got != v {
                    return Ok(Some(format!(
                        "A={a} n={n} {u}: {} gives {}, pairing gives {}",
                        method.name(),
                        format_rational(&got),
                        format_rational(&v)
                    )));
                }
            }
        }
        if !solved.residual_zero {
            return Ok(Some(format!("A={a} n={n}: nonzero residual")));
        }
        Ok::<_, Error>(None)
    })?;
    Ok(CheckResult::from_outcomes("methods.pairing", outcomes))
}

/// `product(A, g, n)` equals `product(A, 0, n + 2g)`; the two sides use
/// different methods so the check is not a self-comparison.
pub fn genus_lift(genus: u32, opts: &VerifyOptions) -> Result<CheckResult> {
    let pairs = opts.sweep.pairs();
    let outcomes = opts.exec.try_map(&pairs, |(a, d)| {
        let n = a.sum() + *d as u32 + 2;
        let lifted = product_with(a, &ModuliContext::new(genus, n), Method::Recursive, Exec::Sequential)?;
        let model = product_with(
            a,
            &ModuliContext::genus_zero(n + 2 * genus),
            Method::Closed,
            Exec::Sequential,
        )?;
        Ok::<_, Error>((lifted != model).then(|| format!("A={a} g={genus} n={n}: {lifted} vs {model}")))
    })?;
    Ok(CheckResult::from_outcomes(&format!("genus.g{genus}"), outcomes))
}

/// Seeded random multisets with `1..=4` entries in `1..=5`.
pub fn faber_samples(count: usize, seed: u64) -> Vec<IntMultiSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=4);
            (0..len).map(|_| rng.gen_range(1..=5u32)).collect()
        })
        .collect()
}

/// `faber_expand ∘ kappa_as_psi` is the identity on `κ_A`.
pub fn faber_roundtrip(opts: &VerifyOptions) -> Result<CheckResult> {
    let samples = faber_samples(opts.faber_samples, opts.faber_seed);
    let outcomes = opts.exec.try_map(&samples, |a| {
        let back = psi_to_kappa(&kappa_as_psi(a)?)?;
        let expected = KappaPoly::monomial(KappaMonomial::new(a.clone())?, ratio(1, 1));
        Ok::<_, Error>((back != expected).then(|| format!("A={a}: got {back}")))
    })?;
    Ok(CheckResult::from_outcomes("faber.roundtrip", outcomes))
}

pub fn identities(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let reports = identity_sweep(&opts.identities, opts.exec)?;
    Ok(IDENTITIES
        .iter()
        .map(|name| {
            let outcomes = reports
                .iter()
                .filter(|r| r.identity == *name)
                .map(|r| {
                    (!r.pass).then(|| {
                        serde_json::to_string(r).expect("identity reports serialize")
                    })
                })
                .collect();
            CheckResult::from_outcomes(&format!("identities.{name}"), outcomes)
        })
        .collect())
}

pub fn reconcile_check(opts: &VerifyOptions) -> Result<CheckResult> {
    let report = reconcile(&opts.sweep, opts.exec)?;
    let mut notes = Vec::new();
    match report.pinned {
        Some(v) => notes.push(format!("pinned variant: {v}")),
        None => notes.push("no unique candidate agrees on every case".to_string()),
    }
    for row in &report.rows {
        notes.push(format!("{}: {}/{}", row.variant, row.agree, row.total));
    }
    Ok(CheckResult {
        check: "reconcile.unique-variant".to_string(),
        cases: report.cases,
        failures: usize::from(!report.pass),
        pass: report.pass,
        notes,
    })
}

fn ms(v: &[u32]) -> IntMultiSet {
    IntMultiSet::new(v.to_vec())
}

fn poly(terms: &[(&[u32], i64)]) -> Result<KappaPoly> {
    let mut out = KappaPoly::zero();
    for (m, c) in terms {
        out.add_term(KappaMonomial::new(ms(m))?, ratio(*c, 1));
    }
    Ok(out)
}

/// Small worked instances with hand-derived values.
pub fn examples() -> Result<Vec<CheckResult>> {
    let check = |name: &str, ok: bool, detail: String| CheckResult {
        check: format!("examples.{name}"),
        cases: 1,
        failures: usize::from(!ok),
        pass: ok,
        notes: if ok { Vec::new() } else { vec![detail] },
    };
    let mut out = Vec::new();

    let a = ms(&[1, 1]);
    let p5 = product_with(&a, &ModuliContext::genus_zero(5), Method::Closed, Exec::Sequential)?;
    let want = poly(&[(&[2], 5)])?;
    out.push(check("product-11-n5", p5 == want, format!("{p5}")));
    let top = integrate_kappa_top(&a, 5)?;
    out.push(check("kappa-top-11-n5", top == ratio(5, 1), format_rational(&top)));
    let paired = pair_kappa_stratum(&a, &DimensionSequence::new(ms(&[2])))?;
    out.push(check("pair-11-dims2", paired == ratio(5, 1), format_rational(&paired)));

    let p6 = product_with(&a, &ModuliContext::genus_zero(6), Method::Closed, Exec::Sequential)?;
    let want = poly(&[(&[1, 1], 1)])?;
    let solved = solve_x_by_pairing(&a, 6)?.coefficients();
    let want_solved = BTreeMap::from([(ms(&[1, 1]), ratio(1, 1)), (ms(&[2]), ratio(0, 1))]);
    out.push(check(
        "product-11-n6",
        p6 == want && !aggregated(&p6).contains_key(&ms(&[2])) && solved == want_solved,
        format!("{p6}"),
    ));

    let coarse = SetPartition::coarsest(2);
    let x = x_coeff(&coarse, &a, 2, Method::Closed)?;
    out.push(check("xcoeff-11-coarse-d2", x.is_zero(), format_rational(&x)));

    let p = product_with(&ms(&[1, 1, 1]), &ModuliContext::genus_zero(6), Method::Closed, Exec::Sequential)?;
    let want = poly(&[(&[3], 61)])?;
    out.push(check("product-111-n6", p == want, format!("{p}")));

    let p = product_with(&ms(&[2]), &ModuliContext::genus_zero(3), Method::Closed, Exec::Sequential)?;
    out.push(check("product-zero-degree", p.is_zero(), format!("{p}")));

    let lifted = product_with(&a, &ModuliContext::new(1, 4), Method::Closed, Exec::Sequential)?;
    out.push(check("genus-1-n4", lifted == p6, format!("{lifted}")));
    Ok(out)
}
