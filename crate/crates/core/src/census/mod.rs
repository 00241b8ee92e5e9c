//! Exhaustive and sampled censuses of point counts over coefficient spaces.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::families::{FamilySpec, Surface};
use crate::gf::{Elem, Field};

mod checkpoint;
mod engine;
mod exec;
mod phase1;
mod report;
mod sample;
mod tables;

pub use checkpoint::Checkpoint;
pub use engine::{run_census, two_phase_census, CensusOptions};
pub use exec::Executor;
pub use phase1::{phase1_survivors, LocusFilter, LocusVar, Phase1Report, Phase1Witness};
pub use report::{merge_reports, CensusReport, Extremal, Phase1Summary};
pub use sample::{random_sample_census, SampleOptions};
pub use tables::Tables;

/// Default cap on the number of surfaces in one census.
pub const DEFAULT_BUDGET: u128 = 1 << 40;

/// Default number of extremal surfaces kept in a report.
pub const DEFAULT_EXTREMAL_CAP: usize = 64;

/// Search budget, overridable through `DPC_BUDGET`.
pub fn budget() -> u128 {
    std::env::var("DPC_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// A coefficient space: every slot ranges over the field unless pinned.
///
/// Optionally a set of "overlay" slots is restricted to an explicit list of
/// assignments (the survivors of a phase-1 filter). Index `i` decomposes as
/// `overlay * q^f + Σ d_j q^j` where the `d_j` are the free slots in family
/// order, fastest first.
#[derive(Clone, Debug)]
pub struct SearchSpace {
    family: Arc<FamilySpec>,
    field: Arc<Field>,
    pins: Vec<Option<Elem>>,
    overlay_slots: Vec<usize>,
    overlays: Vec<Vec<Elem>>,
}

/// Serializable identity of a search space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub family: String,
    pub field: String,
    pub modulus: Vec<u32>,
    pub fixed: Vec<(String, Elem)>,
    pub slots: Vec<String>,
    pub pins: Vec<Option<Elem>>,
    pub overlay_slots: Vec<usize>,
    pub overlays: Vec<Vec<Elem>>,
    pub size: u64,
}

impl SpaceDescriptor {
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("descriptor serializes");
        hex::encode(Sha256::digest(&json))
    }
}

impl SearchSpace {
    pub fn new(family: Arc<FamilySpec>, field: Arc<Field>) -> Self {
        let n = family.slot_count();
        SearchSpace { family, field, pins: vec![None; n], overlay_slots: vec![], overlays: vec![vec![]] }
    }

    pub fn family(&self) -> &Arc<FamilySpec> {
        &self.family
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn pins(&self) -> &[Option<Elem>] {
        &self.pins
    }

    pub fn pin(mut self, slot: usize, value: Elem) -> Result<Self> {
        if slot >= self.pins.len() {
            return Err(Error::OutOfRange(format!("slot {slot}")));
        }
        self.field.check(value)?;
        self.pins[slot] = Some(value);
        Ok(self)
    }

    /// Restricts `slots` to the listed assignments.
    pub fn with_overlays(mut self, slots: Vec<usize>, overlays: Vec<Vec<Elem>>) -> Result<Self> {
        for &s in &slots {
            if s >= self.pins.len() || self.pins[s].is_some() {
                return Err(Error::BadFilter(format!("slot {s} is pinned or out of range")));
            }
        }
        if overlays.iter().any(|o| o.len() != slots.len()) {
            return Err(Error::BadFilter("assignment length differs from slot count".into()));
        }
        self.overlay_slots = slots;
        self.overlays = overlays;
        Ok(self)
    }

    pub fn overlay_slots(&self) -> &[usize] {
        &self.overlay_slots
    }

    pub fn overlays(&self) -> &[Vec<Elem>] {
        &self.overlays
    }

    /// Slots iterated by the counter, in family order.
    pub fn free_slots(&self) -> Vec<usize> {
        (0..self.pins.len())
            .filter(|&j| self.pins[j].is_none() && !self.overlay_slots.contains(&j))
            .collect()
    }

    pub fn size(&self) -> u128 {
        let q = self.field.order() as u128;
        let f = self.free_slots().len() as u32;
        q.checked_pow(f).and_then(|s| s.checked_mul(self.overlays.len() as u128)).unwrap_or(u128::MAX)
    }

    /// Coefficient vector of the surface at `index`.
    pub fn coefficients_at(&self, index: u64) -> Vec<Elem> {
        let q = self.field.order() as u64;
        let free = self.free_slots();
        let sub = q.pow(free.len() as u32);
        let mut coeffs: Vec<Elem> = self.pins.iter().map(|p| p.unwrap_or(Elem::ZERO)).collect();
        let overlay = &self.overlays[(index / sub) as usize];
        for (&s, &v) in self.overlay_slots.iter().zip(overlay) {
            coeffs[s] = v;
        }
        let mut rest = index % sub;
        for &s in &free {
            coeffs[s] = Elem((rest % q) as u32);
            rest /= q;
        }
        coeffs
    }

    pub fn surface_at(&self, index: u64) -> Surface {
        Surface::new(self.family.clone(), self.field.clone(), self.coefficients_at(index))
            .expect("coefficients lie in the field")
    }

    /// Inverse of [`coefficients_at`](Self::coefficients_at).
    pub fn index_of(&self, coeffs: &[Elem]) -> Option<u64> {
        if coeffs.len() != self.pins.len() {
            return None;
        }
        for (c, p) in coeffs.iter().zip(&self.pins) {
            if p.is_some_and(|p| p != *c) {
                return None;
            }
        }
        let assignment: Vec<Elem> = self.overlay_slots.iter().map(|&s| coeffs[s]).collect();
        let overlay = self.overlays.iter().position(|o| *o == assignment)? as u64;
        let q = self.field.order() as u64;
        let free = self.free_slots();
        let mut rest = 0u64;
        for &s in free.iter().rev() {
            rest = rest * q + coeffs[s].0 as u64;
        }
        Some(overlay * q.pow(free.len() as u32) + rest)
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            family: self.family.id.clone(),
            field: self.field.spec().literal(),
            modulus: self.field.spec().modulus().to_vec(),
            fixed: self.family.fixed.iter().map(|(m, c)| (m.key(), *c)).collect(),
            slots: self.family.free.iter().map(|m| m.key()).collect(),
            pins: self.pins.clone(),
            overlay_slots: self.overlay_slots.clone(),
            overlays: self.overlays.clone(),
            size: u64::try_from(self.size()).unwrap_or(u64::MAX),
        }
    }

    pub(crate) fn check_budget(&self, budget: u128) -> Result<u64> {
        let size = self.size();
        if size > budget || size > u64::MAX as u128 {
            return Err(Error::BudgetExceeded { size, budget });
        }
        Ok(size as u64)
    }
}
