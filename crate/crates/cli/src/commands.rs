use std::collections::BTreeMap;

use kappa_core::identities::{check_identity, IdentityBounds};
use kappa_core::kappa::{product_with, x_coeff, Method, ModuliContext};
use kappa_core::numeric::format_rational;
use kappa_core::oracle::{build_stratum_tree, pair_kappa_stratum, solve_x_by_pairing_with, DimensionSequence};
use kappa_core::partition::{block_sums, enumerate_set_partitions};
use kappa_core::reconcile::reconcile;
use kappa_core::verify::{run_suite, Suite, SweepBounds, VerifyOptions};
use kappa_core::{BigRational, Error, Exec, IntMultiSet, KappaPoly, SetPartition};
use serde_json::{json, Value};

use crate::args::{Command, MethodArg, ProductMethod, SweepArgs};

/// What a command produced: the JSON result, the same data as CSV rows, and
/// whether every check in it passed.
pub struct Outcome {
    pub command: &'static str,
    pub inputs: Value,
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub pass: bool,
}

pub fn execute(cmd: &Command, exec: Exec) -> Result<Outcome, Error> {
    match cmd {
        Command::Product { a, genus, marked, method } => product(a, *genus, *marked, *method, exec),
        Command::Xcoeff { a, partition, d, method } => xcoeff(a, partition, *d, *method, exec),
        Command::Pair { b, dims } => pair(b, dims),
        Command::Solve { a, marked } => solve(a, *marked, exec),
        Command::Reconcile { bounds } => reconcile_cmd(bounds, exec),
        Command::Verify { suite, bounds, seed } => verify(suite, bounds, *seed, exec),
        Command::Identity { name, params } => identity(name, params),
    }
}

fn poly_rows(poly: &KappaPoly) -> Vec<Vec<String>> {
    poly.sorted_terms()
        .into_iter()
        .map(|(m, c)| vec![m.indices().to_string(), format_rational(c)])
        .collect()
}

fn product(a: &IntMultiSet, genus: u32, marked: u32, method: ProductMethod, exec: Exec) -> Result<Outcome, Error> {
    let method = match method {
        ProductMethod::Recursive => Method::Recursive,
        ProductMethod::Ck => Method::Ck,
        ProductMethod::Closed => Method::Closed,
    };
    let ctx = ModuliContext::new(genus, marked);
    let poly = product_with(a, &ctx, method, exec)?;
    Ok(Outcome {
        command: "product",
        inputs: json!({
            "a": a, "genus": genus, "marked": marked, "method": method.name(),
            "d": ctx.max_parts(a.sum()),
        }),
        result: json!({ "terms": poly }),
        header: vec!["monomial", "coefficient"],
        rows: poly_rows(&poly),
        pass: true,
    })
}

fn xcoeff(a: &IntMultiSet, partition: &str, d: usize, method: MethodArg, exec: Exec) -> Result<Outcome, Error> {
    let p = SetPartition::parse(partition)?;
    let key = block_sums(&p, a)?;
    let mut values: BTreeMap<&str, BigRational> = BTreeMap::new();
    for m in Method::ALL {
        values.insert(m.name(), x_coeff(&p, a, d, m)?);
    }
    let closed = values["closed"].clone();
    let methods_agree = values.values().all(|v| *v == closed);

    // The pairing solve sees only monomials, so it is compared with the sum of
    // x over all partitions sharing the block sums of p.
    let mut partition_aggregate = BigRational::from_integer(0.into());
    for q in enumerate_set_partitions(a.len(), None).filter(|q| q.len() <= d) {
        if block_sums(&q, a)? == key {
            partition_aggregate += x_coeff(&q, a, d, Method::Closed)?;
        }
    }
    let n = a.sum() + d as u32 + 2;
    let solved = solve_x_by_pairing_with(a, n, exec)?;
    let pairing_aggregate = solved
        .all_values()
        .get(&key)
        .cloned()
        .unwrap_or_else(|| BigRational::from_integer(0.into()));
    let pairing_agrees = pairing_aggregate == partition_aggregate;

    let value = match method {
        MethodArg::Pairing => pairing_aggregate.clone(),
        MethodArg::Recursive => values["recursive"].clone(),
        MethodArg::Ck => values["ck"].clone(),
        MethodArg::Closed => closed.clone(),
    };
    let mut note = if methods_agree {
        "recursive, ck and closed agree".to_string()
    } else {
        "recursive, ck and closed DISAGREE".to_string()
    };
    note.push_str(&format!(
        "; pairing solve {} the aggregate over partitions with block sums {key}",
        if pairing_agrees { "matches" } else { "DOES NOT match" }
    ));
    if method == MethodArg::Pairing {
        note.push_str("; the pairing value is that aggregate");
    }
    let agreement: BTreeMap<&str, String> = values
        .iter()
        .map(|(k, v)| (*k, format_rational(v)))
        .chain([
            ("pairing_aggregate", format_rational(&pairing_aggregate)),
            ("partition_aggregate", format_rational(&partition_aggregate)),
        ])
        .collect();
    let pass = methods_agree && pairing_agrees;
    Ok(Outcome {
        command: "xcoeff",
        inputs: json!({ "a": a, "partition": p, "d": d, "method": method.name(), "marked": n }),
        result: json!({
            "value": format_rational(&value),
            "agreement": agreement,
            "all_agree": pass,
            "note": note,
        }),
        header: vec!["method", "value", "all_agree"],
        rows: vec![vec![method.name().to_string(), format_rational(&value), pass.to_string()]],
        pass,
    })
}

fn pair(b: &IntMultiSet, dims: &IntMultiSet) -> Result<Outcome, Error> {
    let seq = DimensionSequence::new(dims.clone());
    let value = pair_kappa_stratum(b, &seq)?;
    let tree = build_stratum_tree(&seq, seq.chain_markings())?;
    Ok(Outcome {
        command: "pair",
        inputs: json!({ "b": b, "dims": dims }),
        result: json!({
            "value": format_rational(&value),
            "markings": seq.chain_markings(),
            "stratum": tree,
        }),
        header: vec!["b", "dims", "value"],
        rows: vec![vec![b.to_string(), dims.to_string(), format_rational(&value)]],
        pass: true,
    })
}

fn solve(a: &IntMultiSet, marked: u32, exec: Exec) -> Result<Outcome, Error> {
    let s = solve_x_by_pairing_with(a, marked, exec)?;
    let coefficients = s.coefficients();
    let terms: Vec<Value> = coefficients
        .iter()
        .map(|(m, c)| json!({ "monomial": m, "coefficient": format_rational(c) }))
        .collect();
    Ok(Outcome {
        command: "solve",
        inputs: json!({ "a": a, "marked": marked, "d": s.d }),
        result: json!({
            "coefficients": terms,
            "unknowns": s.unknowns,
            "strata": s.strata,
            "rows": s.rows,
            "cols": s.cols,
            "rank": s.rank,
            "residual_zero": s.residual_zero,
        }),
        header: vec!["monomial", "coefficient"],
        rows: coefficients
            .iter()
            .map(|(m, c)| vec![m.to_string(), format_rational(c)])
            .collect(),
        pass: s.residual_zero,
    })
}

fn sweep_bounds(args: &SweepArgs) -> SweepBounds {
    let d = SweepBounds::default();
    SweepBounds {
        max_len: args.max_len.unwrap_or(d.max_len),
        max_entry: args.max_entry.unwrap_or(d.max_entry),
        max_sum: args.max_sum.unwrap_or(d.max_sum),
        max_d: args.max_d.unwrap_or(d.max_d),
    }
}

fn reconcile_cmd(args: &SweepArgs, exec: Exec) -> Result<Outcome, Error> {
    let report = reconcile(&sweep_bounds(args), exec)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.variant.to_string(),
                r.candidate.to_string(),
                r.agree.to_string(),
                r.total.to_string(),
                r.full_agreement.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        command: "reconcile",
        inputs: json!({ "bounds": report.bounds }),
        result: serde_json::to_value(&report).expect("report serializes"),
        header: vec!["variant", "candidate", "agree", "total", "full_agreement"],
        rows,
        pass: report.pass,
    })
}

fn verify(suite: &str, args: &SweepArgs, seed: Option<u64>, exec: Exec) -> Result<Outcome, Error> {
    let suite = Suite::parse(suite).ok_or_else(|| Error::InvalidInput(format!("unknown suite {suite}")))?;
    let defaults = VerifyOptions::default();
    let identities = match (args.max_sum, args.max_len) {
        (None, None) => IdentityBounds::default(),
        (s, l) => IdentityBounds::limited(s.unwrap_or(u32::MAX), l.unwrap_or(usize::MAX)),
    };
    let opts = VerifyOptions {
        sweep: sweep_bounds(args),
        identities,
        faber_seed: seed.unwrap_or(defaults.faber_seed),
        exec,
        ..defaults
    };
    let report = run_suite(suite, &opts)?;
    let rows = report
        .checks
        .iter()
        .map(|c| vec![c.check.clone(), c.cases.to_string(), c.failures.to_string(), c.pass.to_string()])
        .collect();
    Ok(Outcome {
        command: "verify",
        inputs: json!({
            "suite": suite.name(),
            "sweep": opts.sweep,
            "identities": opts.identities,
            "faber_samples": opts.faber_samples,
            "faber_seed": opts.faber_seed,
        }),
        result: serde_json::to_value(&report).expect("report serializes"),
        header: vec!["check", "cases", "failures", "pass"],
        rows,
        pass: report.pass,
    })
}

fn identity(name: &str, params: &str) -> Result<Outcome, Error> {
    let params: Value = serde_json::from_str(params)
        .map_err(|e| Error::InvalidInput(format!("--params is not JSON: {e}")))?;
    let report = check_identity(name, &params)?;
    Ok(Outcome {
        command: "identity",
        inputs: json!({ "identity": name, "params": params }),
        result: serde_json::to_value(&report).expect("report serializes"),
        header: vec!["identity", "params", "lhs", "rhs", "pass"],
        rows: vec![vec![
            report.identity.clone(),
            Value::Object(report.params.clone()).to_string(),
            format_rational(&report.lhs),
            format_rational(&report.rhs),
            report.pass.to_string(),
        ]],
        pass: report.pass,
    })
}
