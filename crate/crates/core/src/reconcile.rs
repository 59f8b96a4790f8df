//! Which truncation factor makes the closed formula agree with the recursion?
//!
//! Two readings of the closed formula's binomial are candidates: the printed
//! `(-1)^M C(ℓ(t)-ℓ(r), M-ℓ(r))` and the shifted `(-1)^M C(ℓ(t)-ℓ(r)-1, M-ℓ(r))`.
//! Both are run against the recursive method on every coefficient of the
//! sweep, alongside the untruncated partial sum as a reference row.

use serde::Serialize;

use crate::error::Result;
use crate::exec::Exec;
use crate::kappa::{x_coeff, x_coeff_closed, Method, TruncationVariant, PINNED_TRUNCATION};
use crate::multiset::IntMultiSet;
use crate::numeric::format_rational;
use crate::partition::SetPartition;
use crate::verify::{coefficient_cases, SweepBounds};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub a: IntMultiSet,
    pub d: usize,
    pub partition: SetPartition,
    pub recursive: String,
    pub closed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariantRow {
    pub variant: &'static str,
    /// Whether this row is one of the readings being decided between.
    pub candidate: bool,
    pub agree: usize,
    pub total: usize,
    pub full_agreement: bool,
    pub first_mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReconcileReport {
    pub bounds: SweepBounds,
    pub cases: usize,
    pub rows: Vec<VariantRow>,
    /// The unique candidate at 100% agreement, if exactly one exists.
    pub pinned: Option<&'static str>,
    pub pinned_is_default: bool,
    pub pass: bool,
}

const CANDIDATES: [TruncationVariant; 2] = [TruncationVariant::Printed, TruncationVariant::Shifted];

pub fn reconcile(bounds: &SweepBounds, exec: Exec) -> Result<ReconcileReport> {
    let cases = coefficient_cases(bounds);
    let variants = TruncationVariant::ALL;
    let outcomes = exec.try_map(&cases, |case| {
        let reference = x_coeff(&case.partition, &case.a, case.d, Method::Recursive)?;
        let values = variants
            .iter()
            .map(|&v| x_coeff_closed(&case.partition, &case.a, case.d, v))
            .collect::<Result<Vec<_>>>()?;
        Ok::<_, crate::error::Error>((reference, values))
    })?;
    let rows: Vec<VariantRow> = variants
        .iter()
        .enumerate()
        .map(|(i, &variant)| {
            let mut agree = 0;
            let mut first_mismatch = None;
            for (case, (reference, values)) in cases.iter().zip(&outcomes) {
                if values[i] == *reference {
                    agree += 1;
                } else if first_mismatch.is_none() {
                    first_mismatch = Some(Mismatch {
                        a: case.a.clone(),
                        d: case.d,
                        partition: case.partition.clone(),
                        recursive: format_rational(reference),
                        closed: format_rational(&values[i]),
                    });
                }
            }
            VariantRow {
                variant: variant.name(),
                candidate: CANDIDATES.contains(&variant),
                agree,
                total: cases.len(),
                full_agreement: agree == cases.len(),
                first_mismatch,
            }
        })
        .collect();
    let winners: Vec<&VariantRow> = rows.iter().filter(|r| r.candidate && r.full_agreement).collect();
    let pinned = (winners.len() == 1).then(|| winners[0].variant);
    let pinned_is_default = pinned == Some(PINNED_TRUNCATION.name());
    Ok(ReconcileReport {
        bounds: bounds.clone(),
        cases: cases.len(),
        rows,
        pinned,
        pinned_is_default,
        pass: pinned.is_some() && pinned_is_default && !cases.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_pins_shifted() {
        let bounds = SweepBounds {
            max_len: 3,
            max_entry: 3,
            max_sum: 4,
            max_d: 3,
        };
        let report = reconcile(&bounds, Exec::Sequential).unwrap();
        assert_eq!(report.pinned, Some("shifted"));
        assert!(report.pass);
        let printed = report.rows.iter().find(|r| r.variant == "printed").unwrap();
        assert!(!printed.full_agreement);
        assert!(printed.first_mismatch.is_some());
        let partial = report.rows.iter().find(|r| r.variant == "partial-sum").unwrap();
        assert!(partial.full_agreement && !partial.candidate);
    }
}
