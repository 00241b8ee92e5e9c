use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::checkpoint::{Checkpoint, CHECKPOINT_VERSION};
use super::phase1::{phase1_survivors, LocusFilter, Phase1Report};
use super::report::{merge_reports, CensusReport, Extremal, Phase1Summary};
use super::tables::{count_eq, Tables};
use super::{budget, Executor, SearchSpace, SpaceDescriptor, DEFAULT_EXTREMAL_CAP};
use crate::error::{Error, Result};
use crate::families::CountMode;
use crate::gf::Elem;

/// Indices per worker between checkpoints.
pub const EPOCH_PER_WORKER: u64 = 1 << 20;

/// Target size of the per-surface inner table, in bytes.
const INNER_BYTES: usize = 1 << 20;

/// Indices handed to a worker at a time (rounded up to whole blocks).
const CHUNK: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub mode: CountMode,
    pub early_exit: Option<u64>,
    pub executor: Executor,
    pub checkpoint: Option<PathBuf>,
    /// `None` keeps every extremal surface.
    pub extremal_cap: Option<usize>,
    pub budget: u128,
    /// Indices between checkpoints; defaults to `EPOCH_PER_WORKER` times
    /// the worker count.
    pub epoch: Option<u64>,
    /// Stop (after checkpointing) once this index is reached.
    pub stop_at: Option<u64>,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            mode: CountMode::Projective,
            early_exit: None,
            executor: Executor::default(),
            checkpoint: None,
            extremal_cap: Some(DEFAULT_EXTREMAL_CAP),
            budget: budget(),
            epoch: None,
            stop_at: None,
        }
    }
}

#[derive(Serialize)]
struct RunIdentity<'a> {
    space: &'a SpaceDescriptor,
    mode: CountMode,
    early_exit: Option<u64>,
    extremal_cap: Option<usize>,
}

fn run_hash(desc: &SpaceDescriptor, opts: &CensusOptions) -> String {
    let id = RunIdentity {
        space: desc,
        mode: opts.mode,
        early_exit: opts.early_exit,
        extremal_cap: opts.extremal_cap,
    };
    hex::encode(Sha256::digest(serde_json::to_vec(&id).expect("serializable")))
}

/// Precomputed evaluation plan.
///
/// The first `k_in` free slots form the inner digits: for each of their
/// `q^k_in` assignments the table holds the partial sum at every site. A
/// block of consecutive indices shares everything else, so its surfaces'
/// counts are the numbers of sites where an inner row equals the negated
/// outer part.
struct Plan<'a> {
    space: &'a SearchSpace,
    tables: Tables,
    desc: SpaceDescriptor,
    free: Vec<usize>,
    k_in: usize,
    rows: u64,
    sub: u64,
    inner: Vec<u8>,
    overlay_base: Vec<Vec<u8>>,
    key_of: Vec<u64>,
}

impl<'a> Plan<'a> {
    fn new(space: &'a SearchSpace, opts: &CensusOptions) -> Result<Self> {
        let tables = Tables::new(space.family(), space.field(), opts.mode)?;
        let s = tables.site_count();
        let q = tables.q as u64;
        let free = space.free_slots();
        let mut k_in = 0;
        while k_in < free.len() && (q.pow(k_in as u32 + 1) as usize).saturating_mul(s.max(1)) <= INNER_BYTES {
            k_in += 1;
        }
        let rows = q.pow(k_in as u32);
        let mut inner = vec![0u8; rows as usize * s];
        for (i, &slot) in free[..k_in].iter().enumerate() {
            let stride = q.pow(i as u32) as usize;
            for d in 1..q as usize {
                let mut step = vec![0u8; s];
                tables.accumulate(&mut step, slot, Elem(d as u32));
                for r in 0..stride {
                    let (done, rest) = inner.split_at_mut((d * stride + r) * s);
                    let dst = &mut rest[..s];
                    dst.copy_from_slice(&done[r * s..(r + 1) * s]);
                    tables.add_rows(dst, &step);
                }
            }
        }
        let mut base = tables.fixed.clone();
        for (j, p) in space.pins().iter().enumerate() {
            if let Some(c) = p {
                tables.accumulate(&mut base, j, *c);
            }
        }
        let overlay_base = space
            .overlays()
            .iter()
            .map(|o| {
                let mut row = base.clone();
                for (&slot, &c) in space.overlay_slots().iter().zip(o) {
                    tables.accumulate(&mut row, slot, c);
                }
                row
            })
            .collect();
        let probe = CensusReport::empty(space.descriptor(), opts.mode, opts.early_exit, None);
        let key_of = (0..=s as u64).map(|m| probe.bucket(m * tables.weight)).collect();
        Ok(Plan {
            space,
            desc: space.descriptor(),
            sub: q.pow(free.len() as u32),
            free,
            k_in,
            rows,
            inner,
            overlay_base,
            key_of,
            tables,
        })
    }

    fn outer_row(&self, block: u64, out: &mut Vec<u8>) {
        let q = self.tables.q as u64;
        let first = block * self.rows;
        let overlay = (first / self.sub) as usize;
        out.clear();
        out.extend_from_slice(&self.overlay_base[overlay]);
        let mut rest = (first % self.sub) / self.rows;
        for &slot in &self.free[self.k_in..] {
            let d = rest % q;
            rest /= q;
            self.tables.accumulate(out, slot, Elem(d as u32));
        }
        self.tables.negate(out);
    }

    fn run_range(&self, start: u64, end: u64, opts: &CensusOptions) -> CensusReport {
        let s = self.tables.site_count();
        let mut hist = vec![0u64; s + 1];
        let mut best = u64::MAX;
        let mut ext: Vec<u64> = Vec::new();
        let cap = opts.extremal_cap.unwrap_or(usize::MAX);
        let mut outer = Vec::with_capacity(s);
        let mut block = start / self.rows;
        while block * self.rows < end {
            self.outer_row(block, &mut outer);
            let base = block * self.rows;
            let lo = start.max(base) - base;
            let hi = end.min(base + self.rows) - base;
            for r in lo..hi {
                let row = &self.inner[r as usize * s..(r as usize + 1) * s];
                let m = count_eq(row, &outer) as usize;
                hist[m] += 1;
                let key = self.key_of[m];
                if key < best {
                    best = key;
                    ext.clear();
                    if cap > 0 {
                        ext.push(base + r);
                    }
                } else if key == best && ext.len() < cap {
                    ext.push(base + r);
                }
            }
            block += 1;
        }
        let mut rep = CensusReport::empty(self.desc.clone(), opts.mode, opts.early_exit, opts.extremal_cap);
        for (m, &n) in hist.iter().enumerate() {
            if n > 0 {
                *rep.histogram.entry(self.key_of[m]).or_insert(0) += n;
                rep.scanned += n;
            }
        }
        rep.min_count = rep.histogram.keys().next().copied();
        rep.max_count = rep.histogram.keys().next_back().copied();
        rep.extremal = ext
            .into_iter()
            .map(|index| Extremal { index, count: best, coefficients: self.space.coefficients_at(index) })
            .collect();
        rep
    }
}

/// Histogram of point counts over every surface in `space`.
pub fn run_census(space: &SearchSpace, opts: &CensusOptions) -> Result<CensusReport> {
    let size = space.check_budget(opts.budget)?;
    let plan = Plan::new(space, opts)?;
    let hash = run_hash(&plan.desc, opts);
    let mut report = CensusReport::empty(plan.desc.clone(), opts.mode, opts.early_exit, opts.extremal_cap);
    let mut next = 0u64;
    if let Some(path) = &opts.checkpoint {
        if let Some(cp) = Checkpoint::load(path)? {
            if cp.space_hash != hash || cp.next_index > size || cp.partial.space != plan.desc {
                return Err(Error::CheckpointMismatch { path: path.clone() });
            }
            next = cp.next_index;
            report = cp.partial;
        }
    }
    let workers = opts.executor.workers() as u64;
    let epoch = opts.epoch.unwrap_or(EPOCH_PER_WORKER * workers).max(1);
    let end = opts.stop_at.map_or(size, |s| s.min(size));
    let chunk = plan.rows * CHUNK.div_ceil(plan.rows);
    while next < end {
        let stop = (next + epoch).min(end);
        let mut ranges = Vec::new();
        let mut a = next;
        while a < stop {
            let b = ((a / chunk + 1) * chunk).min(stop);
            ranges.push((a, b));
            a = b;
        }
        let part = opts
            .executor
            .map_reduce(ranges, |(a, b)| plan.run_range(a, b, opts), |x, y| {
                merge_reports(&x, &y).expect("partials share a space")
            })
            .expect("nonempty epoch");
        report = merge_reports(&report, &part)?;
        next = stop;
        if let Some(path) = &opts.checkpoint {
            Checkpoint {
                schema_version: CHECKPOINT_VERSION,
                space_hash: hash.clone(),
                next_index: next,
                partial: report.clone(),
            }
            .save(path)?;
        }
    }
    Ok(report)
}

/// Phase-1 filter followed by a census over the surviving assignments.
pub fn two_phase_census(
    space: &SearchSpace,
    filter: &LocusFilter,
    opts: &CensusOptions,
) -> Result<(Phase1Report, CensusReport)> {
    let phase1 = phase1_survivors(space, filter)?;
    let narrowed = space.clone().with_overlays(phase1.filter_slots.clone(), phase1.survivors.clone())?;
    let mut report = run_census(&narrowed, opts)?;
    report.phase1 = Some(Phase1Summary {
        locus: phase1.locus.clone(),
        filter_slots: phase1.filter_keys.clone(),
        survivors: phase1.survivors.len(),
        non_survivors: phase1.witnesses.len() as u64,
    });
    Ok((phase1, report))
}
