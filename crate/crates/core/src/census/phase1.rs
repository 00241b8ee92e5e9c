use serde::{Deserialize, Serialize};

use super::SearchSpace;
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::gf::{Elem, Field};
use crate::wps;

/// Largest locus scanned per assignment.
pub const MAX_LOCUS_TUPLES: usize = 1_000_000;

/// Range of one coordinate on a locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocusVar {
    Fixed(Elem),
    All,
    NonZero,
}

/// A set of affine tuples: each coordinate is fixed, free, or nonzero, and
/// the listed tuples are left out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusFilter {
    pub vars: Vec<LocusVar>,
    #[serde(default)]
    pub excluded: Vec<Vec<Elem>>,
}

impl LocusFilter {
    pub fn new(vars: Vec<LocusVar>) -> Self {
        LocusFilter { vars, excluded: Vec::new() }
    }

    pub fn exclude(mut self, t: Vec<Elem>) -> Self {
        self.excluded.push(t);
        self
    }

    /// Parses `x=0,y!=0`; unnamed variables range over the whole field.
    pub fn parse(family: &FamilySpec, field: &Field, spec: &str) -> Result<Self> {
        let mut vars = vec![LocusVar::All; family.nvars()];
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::BadFilter(format!("cannot parse {part:?}"));
            let (name, var) = if let Some((n, v)) = part.split_once("!=") {
                if field.parse_element(v.trim())? != Elem::ZERO {
                    return Err(bad());
                }
                (n.trim(), LocusVar::NonZero)
            } else if let Some((n, v)) = part.split_once('=') {
                (n.trim(), LocusVar::Fixed(field.parse_element(v.trim())?))
            } else {
                return Err(bad());
            };
            let i = family.var_index(name).ok_or_else(|| Error::BadFilter(format!("unknown variable {name:?}")))?;
            vars[i] = var;
        }
        Ok(LocusFilter::new(vars))
    }

    pub fn describe(&self, family: &FamilySpec, field: &Field) -> String {
        let parts: Vec<String> = self
            .vars
            .iter()
            .zip(&family.vars)
            .filter_map(|(v, name)| match v {
                LocusVar::Fixed(c) => Some(format!("{name}={}", field.format(*c))),
                LocusVar::NonZero => Some(format!("{name}!=0")),
                LocusVar::All => None,
            })
            .collect();
        let mut s = parts.join(",");
        if !self.excluded.is_empty() {
            let ex: Vec<String> = self.excluded.iter().map(|t| wps::format_point(field, t)).collect();
            s.push_str(&format!(" minus {}", ex.join(" ")));
        }
        s
    }

    /// Nonzero tuples on the locus, in counter order.
    pub fn tuples(&self, field: &Field) -> Vec<Vec<Elem>> {
        let mut out = Vec::new();
        wps::for_each_tuple(field.order(), self.vars.len(), |t| {
            let on = t.iter().zip(&self.vars).all(|(c, v)| match v {
                LocusVar::Fixed(x) => c == x,
                LocusVar::All => true,
                LocusVar::NonZero => !c.is_zero(),
            });
            if on && t.iter().any(|c| !c.is_zero()) && !self.excluded.iter().any(|e| e == t) {
                out.push(t.to_vec());
            }
            true
        });
        out
    }
}

/// A discarded assignment and a locus tuple where its equation vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase1Witness {
    pub assignment: Vec<Elem>,
    pub tuple: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase1Report {
    pub locus: String,
    /// Free slots whose monomial is not identically zero on the locus.
    pub filter_slots: Vec<usize>,
    pub filter_keys: Vec<String>,
    /// Assignments to `filter_slots` with no solution on the locus.
    pub survivors: Vec<Vec<Elem>>,
    pub witnesses: Vec<Phase1Witness>,
}

/// Assignments to the slots visible on the locus for which the equation has
/// no solution there. Pinned slots keep their values; other free slots
/// vanish on the locus and do not matter.
pub fn phase1_survivors(space: &SearchSpace, filter: &LocusFilter) -> Result<Phase1Report> {
    let family = space.family();
    let field = space.field();
    if filter.vars.len() != family.nvars() {
        return Err(Error::BadFilter(format!("{} variables for a family in {}", filter.vars.len(), family.nvars())));
    }
    if !space.overlay_slots().is_empty() {
        return Err(Error::BadFilter("space is already filtered".into()));
    }
    for v in &filter.vars {
        if let LocusVar::Fixed(c) = v {
            field.check(*c)?;
        }
    }
    let tuples = filter.tuples(field);
    if tuples.len() > MAX_LOCUS_TUPLES {
        return Err(Error::BadFilter(format!("locus has {} tuples", tuples.len())));
    }
    let mono_vals: Vec<Vec<Elem>> =
        family.free.iter().map(|m| tuples.iter().map(|t| m.eval(field, t)).collect()).collect();
    let filter_slots: Vec<usize> = space
        .free_slots()
        .into_iter()
        .filter(|&j| mono_vals[j].iter().any(|v| !v.is_zero()))
        .collect();
    let base: Vec<Elem> = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let fixed = family
                .fixed
                .iter()
                .fold(Elem::ZERO, |acc, (m, c)| field.add(acc, field.mul(*c, m.eval(field, t))));
            space.pins().iter().enumerate().fold(fixed, |acc, (j, p)| match p {
                Some(c) => field.add(acc, field.mul(*c, mono_vals[j][i])),
                None => acc,
            })
        })
        .collect();
    let mut survivors = Vec::new();
    let mut witnesses = Vec::new();
    let mut ok = true;
    wps::for_each_tuple(field.order(), filter_slots.len(), |a| {
        let hit = (0..tuples.len()).find(|&i| {
            let v = filter_slots
                .iter()
                .zip(a)
                .fold(base[i], |acc, (&j, &c)| field.add(acc, field.mul(c, mono_vals[j][i])));
            v.is_zero()
        });
        match hit {
            Some(i) => witnesses.push(Phase1Witness { assignment: a.to_vec(), tuple: tuples[i].clone() }),
            None => survivors.push(a.to_vec()),
        }
        ok = witnesses.len() + survivors.len() <= MAX_LOCUS_TUPLES;
        ok
    });
    if !ok {
        return Err(Error::BadFilter("too many filter assignments".into()));
    }
    Ok(Phase1Report {
        locus: filter.describe(family, field),
        filter_keys: filter_slots.iter().map(|&j| family.free[j].key()).collect(),
        filter_slots,
        survivors,
        witnesses,
    })
}
