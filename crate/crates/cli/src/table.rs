//! Row types for the comparability and bounds tables.

use std::io::Write;
use std::ops::RangeInclusive;

use serde::Serialize;
use sperner::bounds::{bounds_report, eval_bound_with, BoundId, SigmaLowerForm};
use sperner::search::CompTable;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompCsvRow {
    pub n: u32,
    pub m: u64,
    pub c_exact: u64,
    pub lower_bound: i64,
    pub equality: bool,
    /// Witness member masks joined by `;`.
    pub witness_masks: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCsvRow {
    pub n: u32,
    pub k: u64,
    pub bound_id: &'static str,
    /// Exact integer, `p/q`, or a float for irrational values.
    pub value: String,
    pub applicable: bool,
}

pub fn comp_rows(t: &CompTable) -> Vec<CompCsvRow> {
    t.rows
        .iter()
        .map(|r| CompCsvRow {
            n: t.n,
            m: r.m,
            c_exact: r.c_exact,
            lower_bound: r.lower_bound,
            equality: r.equality,
            witness_masks: r.witness.iter().map(|m| m.bits().to_string()).collect::<Vec<_>>().join(";"),
        })
        .collect()
}

/// Row id for the sum lower bound in its simplified printed form.
pub const SIGMA_LOWER_SIMPLIFIED: &str = "SIGMA_LOWER_SIMPLIFIED";

/// Every bound except `COMP_LOWER` (which takes `m`, not `k`) over the grid,
/// plus the simplified form of `SIGMA_LOWER` right after the refined one.
pub fn bound_rows(ns: RangeInclusive<u32>, ks: RangeInclusive<u64>) -> Vec<BoundCsvRow> {
    let mut rows = Vec::new();
    for n in ns {
        for k in ks.clone() {
            let report = bounds_report(n, k, None);
            for id in BoundId::ALL.into_iter().filter(|&id| id != BoundId::CompLower) {
                let v = report.get(id);
                rows.push(BoundCsvRow {
                    n,
                    k,
                    bound_id: id.name(),
                    value: v.value.to_string(),
                    applicable: v.applicable,
                });
                if id == BoundId::SigmaLower {
                    let s = eval_bound_with(id, n, k, None, SigmaLowerForm::Simplified);
                    rows.push(BoundCsvRow {
                        n,
                        k,
                        bound_id: SIGMA_LOWER_SIMPLIFIED,
                        value: s.value.to_string(),
                        applicable: s.applicable,
                    });
                }
            }
        }
    }
    rows
}

pub fn write_csv<R: Serialize>(rows: &[R], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `a`, `a..b` or `a..=b` (both forms inclusive).
pub fn parse_range<T>(s: &str) -> Result<RangeInclusive<T>, String>
where
    T: std::str::FromStr + PartialOrd + Copy,
{
    let num = |p: &str| p.trim().parse::<T>().map_err(|_| format!("`{p}` is not a valid number"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok(lo..=hi)
}
