use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SpaceDescriptor;
use crate::error::{Error, Result};
use crate::families::CountMode;
use crate::gf::Elem;

/// A surface achieving the minimum count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremal {
    pub index: u64,
    pub count: u64,
    pub coefficients: Vec<Elem>,
}

/// What the phase-1 filter removed before the census.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase1Summary {
    pub locus: String,
    pub filter_slots: Vec<String>,
    pub survivors: usize,
    /// Assignments discarded because the equation has a point on the locus.
    pub non_survivors: u64,
}

/// Sampling parameters for reports over random draws.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingSummary {
    pub seed: u64,
    pub smooth_bound: Option<u32>,
    pub drawn: u64,
    pub rejected: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub space: SpaceDescriptor,
    pub mode: CountMode,
    /// With `Some(b)` every count above `b` is recorded as `b + 1`.
    pub early_exit: Option<u64>,
    /// `None` keeps every extremal surface.
    pub extremal_cap: Option<usize>,
    pub histogram: BTreeMap<u64, u64>,
    pub min_count: Option<u64>,
    pub max_count: Option<u64>,
    pub extremal: Vec<Extremal>,
    pub scanned: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase1: Option<Phase1Summary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSummary>,
}

impl CensusReport {
    pub fn empty(
        space: SpaceDescriptor,
        mode: CountMode,
        early_exit: Option<u64>,
        extremal_cap: Option<usize>,
    ) -> Self {
        CensusReport {
            space,
            mode,
            early_exit,
            extremal_cap,
            histogram: BTreeMap::new(),
            min_count: None,
            max_count: None,
            extremal: Vec::new(),
            scanned: 0,
            phase1: None,
            sampling: None,
        }
    }

    pub fn bucket(&self, count: u64) -> u64 {
        match self.early_exit {
            Some(b) => count.min(b + 1),
            None => count,
        }
    }

    /// Number of surfaces with exactly `count` points (or, for the
    /// early-exit bucket, more than the bound).
    pub fn count_of(&self, count: u64) -> u64 {
        self.histogram.get(&count).copied().unwrap_or(0)
    }

    /// Whether `min_count` is an exact value rather than the overflow bucket.
    pub fn min_is_exact(&self) -> bool {
        match (self.min_count, self.early_exit) {
            (Some(m), Some(b)) => m <= b,
            (Some(_), None) => true,
            (None, _) => false,
        }
    }

    /// Records one surface; `coeffs` is called only if the surface is kept.
    pub fn record(&mut self, count: u64, index: u64, coeffs: impl FnOnce() -> Vec<Elem>) {
        let count = self.bucket(count);
        *self.histogram.entry(count).or_insert(0) += 1;
        self.scanned += 1;
        self.max_count = Some(self.max_count.map_or(count, |m| m.max(count)));
        match self.min_count {
            Some(m) if count > m => {}
            Some(m) if count == m => {
                if self.extremal_cap.is_none_or(|cap| self.extremal.len() < cap) {
                    self.extremal.push(Extremal { index, count, coefficients: coeffs() });
                }
            }
            _ => {
                self.min_count = Some(count);
                self.extremal.clear();
                if self.extremal_cap != Some(0) {
                    self.extremal.push(Extremal { index, count, coefficients: coeffs() });
                }
            }
        }
    }
}

/// Combines reports over disjoint parts of the same space.
pub fn merge_reports(a: &CensusReport, b: &CensusReport) -> Result<CensusReport> {
    if a.space != b.space {
        return Err(Error::ReportMismatch("different search spaces".into()));
    }
    if a.mode != b.mode || a.early_exit != b.early_exit || a.extremal_cap != b.extremal_cap {
        return Err(Error::ReportMismatch("different counting options".into()));
    }
    if a.phase1.is_some() && b.phase1.is_some() && a.phase1 != b.phase1 {
        return Err(Error::ReportMismatch("different phase-1 filters".into()));
    }
    let mut out = a.clone();
    for (&k, &v) in &b.histogram {
        *out.histogram.entry(k).or_insert(0) += v;
    }
    out.scanned += b.scanned;
    out.min_count = out.histogram.keys().next().copied();
    out.max_count = out.histogram.keys().next_back().copied();
    let mut ext: Vec<Extremal> = a
        .extremal
        .iter()
        .chain(&b.extremal)
        .filter(|e| Some(e.count) == out.min_count)
        .cloned()
        .collect();
    ext.sort_by_key(|e| e.index);
    ext.dedup_by_key(|e| e.index);
    if let Some(cap) = out.extremal_cap {
        ext.truncate(cap);
    }
    out.extremal = ext;
    out.phase1 = a.phase1.clone().or_else(|| b.phase1.clone());
    out.sampling = a.sampling.clone().or_else(|| b.sampling.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::SearchSpace;
    use crate::families::builtin;
    use crate::gf::Field;
    use proptest::prelude::*;

    fn blank(cap: Option<usize>, early: Option<u64>) -> CensusReport {
        let space = SearchSpace::new(builtin("CUBIC_P3").unwrap(), Field::parse("2").unwrap());
        CensusReport::empty(space.descriptor(), CountMode::Projective, early, cap)
    }

    fn build(entries: &[(u64, u64)], cap: Option<usize>, early: Option<u64>) -> CensusReport {
        let mut r = blank(cap, early);
        for &(count, index) in entries {
            r.record(count, index, || vec![Elem(index as u32 % 2)]);
        }
        r
    }

    #[test]
    fn early_exit_buckets() {
        let r = build(&[(0, 0), (5, 1), (9, 2)], None, Some(3));
        assert_eq!(r.count_of(4), 2);
        assert_eq!(r.max_count, Some(4));
        assert!(r.min_is_exact());
        let r = build(&[(5, 1)], None, Some(3));
        assert!(!r.min_is_exact());
    }

    #[test]
    fn merge_identity() {
        let a = build(&[(2, 0), (1, 1), (1, 4)], Some(2), None);
        assert_eq!(merge_reports(&a, &blank(Some(2), None)).unwrap(), a);
    }

    #[test]
    fn merge_rejects_mismatch() {
        let a = blank(Some(2), None);
        let b = blank(Some(2), Some(1));
        assert!(merge_reports(&a, &b).is_err());
    }

    proptest! {
        #[test]
        fn merge_of_split_equals_whole(
            counts in proptest::collection::vec(0u64..6, 0..60),
            split in 0usize..60,
            cap in proptest::option::of(0usize..4),
        ) {
            let entries: Vec<(u64, u64)> = counts.iter().enumerate().map(|(i, &c)| (c, i as u64)).collect();
            let k = split.min(entries.len());
            let whole = build(&entries, cap, Some(4));
            let left = build(&entries[..k], cap, Some(4));
            let right = build(&entries[k..], cap, Some(4));
            prop_assert_eq!(&merge_reports(&left, &right).unwrap(), &whole);
            let swapped = merge_reports(&right, &left).unwrap();
            prop_assert_eq!(&swapped, &whole);
            let total: u64 = whole.histogram.values().sum();
            prop_assert_eq!(total, whole.scanned);
        }
    }
}
