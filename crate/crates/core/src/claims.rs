//! Registry of machine-checked statements about point counts.
//!
//! Every claim runs a census, a phase-1 filter or a lattice computation and
//! compares the outcome with an expected value. A mismatch is a failing
//! outcome carrying the full evidence, never an error.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::census::{
    phase1_survivors, random_sample_census, run_census, two_phase_census, CensusOptions, CensusReport,
    Executor, LocusFilter, Phase1Report, SampleOptions, SearchSpace,
};
use crate::error::{Error, Result};
use crate::families::{
    builtin, reduce_exponents, reduced_family, CountMode, FamilySpec, Monomial, Poly, Surface,
    BUILTIN_FAMILIES,
};
use crate::gf::{Elem, Field};
use crate::picard::{
    candidate_fields, exceptional_classes, fibers, min_fiber_points, pair, urabe_f, PRIMED_ROWS,
};
use crate::smooth::is_smooth_up_to;
use crate::wps::{self, WeightSystem};

/// Seed of the random surfaces in `dp2_f2_conic_bound`.
pub const CONIC_SEED: u64 = 0xC0_41C;
/// Seed of the sampled census in `dp2_f5_sampled`.
pub const DP2_F5_SEED: u64 = 0xD2_F5;
/// Seed of the random surfaces in `hasse_fibers`.
pub const FIBER_SEED: u64 = 0xF1_BE;
/// Seed of the random surfaces in `engine_properties`.
pub const ENGINE_SEED: u64 = 0xE6_61E;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuntimeClass {
    Instant,
    Minutes,
    Hours,
}

/// Whether a claim pins an exact value or checks a property on many inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimKind {
    Exact,
    Property,
}

/// Settings shared by every claim run.
#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub executor: Executor,
    /// Directory for census checkpoints of long claims.
    pub checkpoint_dir: Option<PathBuf>,
}

type Procedure = fn(&VerifyOptions) -> Result<Check>;

pub struct ClaimSpec {
    pub id: &'static str,
    pub description: &'static str,
    pub expected: &'static str,
    pub kind: ClaimKind,
    pub runtime: RuntimeClass,
    run: Procedure,
}

impl std::fmt::Debug for ClaimSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClaimSpec").field("id", &self.id).field("runtime", &self.runtime).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub id: String,
    pub pass: bool,
    pub expected: String,
    pub observed: String,
    pub runtime: RuntimeClass,
    pub evidence: Value,
}

struct Check {
    pass: bool,
    observed: String,
    evidence: Value,
}

macro_rules! claim {
    ($id:literal, $kind:ident, $rt:ident, $run:ident, $desc:literal, $exp:literal) => {
        ClaimSpec {
            id: $id,
            description: $desc,
            expected: $exp,
            kind: ClaimKind::$kind,
            runtime: RuntimeClass::$rt,
            run: $run,
        }
    };
}

static REGISTRY: [ClaimSpec; 18] = [
    claim!("cubic_f2_unique", Exact, Instant, cubic_f2_unique,
        "The example cubic surface over F_2 has a single rational point and is smooth.",
        "1 point in P^3(F_2); smooth over F_2, F_4 and F_8"),
    claim!("cubic_f2_classification", Exact, Hours, cubic_f2_classification,
        "Every smooth cubic form over F_2 with one point is a linear transform of the example cubic.",
        "all smooth one-point forms lie in the GL_4(F_2)-orbit of the example cubic"),
    claim!("dp1_f2_min3", Exact, Instant, dp1_f2_min3,
        "Degree 1 surfaces over F_2 (reduced characteristic 2 form) have at least 3 solutions.",
        "min affine count 3; no surface with 0, 1 or 2 solutions"),
    claim!("dp1_f3_phase1", Exact, Instant, dp1_f3_phase1,
        "Over F_3, only (c, g, s) = (0, 2, 1) leaves the line x = 0, y = 1 without solutions.",
        "survivors exactly {z^2y^2: 0, zy^2: 2, y^2: 1}"),
    claim!("dp1_f3_min2", Exact, Minutes, dp1_f3_min2,
        "Degree 1 surfaces over F_3 have more than one rational point.",
        "two-phase census min affine count >= 2"),
    claim!("dp1_f4_phase1", Exact, Instant, dp1_f4_phase1,
        "Over F_4, six equations have no solution with x = 0 and y != 0.",
        "survivors (wyz, wy^3, zy^4, y^6) = (0, b, 0, d) for the six listed (b, d)"),
    claim!("dp1_f4_min2", Exact, Hours, dp1_f4_min2,
        "Degree 1 surfaces over F_4 have at least 2 rational points.",
        "two-phase census over the phase-1 survivors: min projective count >= 2"),
    claim!("dp1_f5_phase1_empty", Exact, Instant, dp1_f5_phase1_empty,
        "Over F_5 every pair (e, s) gives a solution with x = 0 and y != 0.",
        "no survivors over the slots zy^4, y^6"),
    claim!("dp2_f2_unique_256", Exact, Instant, dp2_f2_unique_256,
        "With G_2 = x^2 + xy + y^2 over F_2, 256 degree 2 surfaces have a unique point.",
        "histogram[1] = 256, each unique point (0:0:1:0)"),
    claim!("dp2_f2_conic_bound", Property, Instant, dp2_f2_conic_bound,
        "A degree 2 surface over F_2 has at least as many points as its conic G_2 = 0.",
        "#X(F_2) >= #C(F_2) on 1000 random surfaces"),
    claim!("dp2_f3_no_unique", Exact, Minutes, dp2_f3_no_unique,
        "No degree 2 surface over F_3 has 0 or 1 rational points.",
        "histogram[0] = histogram[1] = 0"),
    claim!("dp2_f4_no_unique", Exact, Minutes, dp2_f4_no_unique,
        "Over F_4 with G_2 = x^2 + axy + y^2, no equation avoids the locus x = 0.",
        "zero phase-1 survivors on x = 0"),
    claim!("dp2_f5_sampled", Property, Minutes, dp2_f5_sampled,
        "Smooth degree 2 surfaces over F_5 have at least q + 1 = 6 points.",
        "min projective count >= 6 over 10^4 smooth samples"),
    claim!("exc_counts", Exact, Instant, exc_counts,
        "Number of exceptional classes on the plane blown up in r points.",
        "0, 1, 3, 6, 10, 16, 27, 56, 240 for r = 0..8"),
    claim!("weil_candidates", Exact, Instant, weil_candidates,
        "Fields on which a del Pezzo surface of degree d can have exactly one point.",
        "d=3: {2}; d=1: {2,3,4,5,7}; d=2: {2,3,4,5}"),
    claim!("urabe_f_props", Exact, Instant, urabe_f_props,
        "The map from E_7 rows to E_8 rows: values, collisions and injectivity.",
        "f(1)=98, f(40)=f(50)=95, f(41)=f(55)=101, f(44)=f(59)=107, injective off 6 rows"),
    claim!("hasse_fibers", Property, Minutes, hasse_fibers,
        "Smooth fibres of the anticanonical pencil obey the Hasse bound.",
        "(N-q-1)^2 <= 4q on every smooth fibre over F_5 and F_7; min_fiber_points(5)=2, (7)=3"),
    claim!("engine_properties", Property, Minutes, engine_properties,
        "Census determinism and resumption, reduction, field axioms and point equivalence.",
        "all properties hold"),
];

pub fn registry() -> &'static [ClaimSpec] {
    &REGISTRY
}

pub fn find_claim(id: &str) -> Result<&'static ClaimSpec> {
    REGISTRY.iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownClaim(id.to_string()))
}

/// Runs one claim. Failures inside the procedure become failing outcomes.
pub fn verify_claim(id: &str, opts: &VerifyOptions) -> Result<ClaimOutcome> {
    let spec = find_claim(id)?;
    let check = (spec.run)(opts).unwrap_or_else(|e| Check {
        pass: false,
        observed: format!("error: {e}"),
        evidence: json!({ "error": e.to_string() }),
    });
    Ok(ClaimOutcome {
        id: spec.id.to_string(),
        pass: check.pass,
        expected: spec.expected.to_string(),
        observed: check.observed,
        runtime: spec.runtime,
        evidence: check.evidence,
    })
}

/// The example cubic `xw² + x²w + y³ + z²y + z³ + x³ + xyz + (y + z)x²`.
pub fn example_cubic() -> Surface {
    let terms: Vec<(Monomial, Elem)> = [
        [1, 0, 0, 2],
        [2, 0, 0, 1],
        [0, 3, 0, 0],
        [0, 1, 2, 0],
        [0, 0, 3, 0],
        [3, 0, 0, 0],
        [1, 1, 1, 0],
        [2, 1, 0, 0],
        [2, 0, 1, 0],
    ]
    .iter()
    .map(|e| (Monomial(e.to_vec()), Elem::ONE))
    .collect();
    Surface::from_terms(builtin("CUBIC_P3").expect("built-in"), Field::parse("2").expect("F_2"), &terms)
        .expect("valid cubic")
}

fn census_opts(opts: &VerifyOptions, mode: CountMode, early_exit: Option<u64>) -> CensusOptions {
    CensusOptions { mode, early_exit, executor: opts.executor, ..Default::default() }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn pin_keys(mut space: SearchSpace, pins: &[(&str, Elem)]) -> Result<SearchSpace> {
    for (key, v) in pins {
        let slot = space.family().parse_slot(key)?;
        space = space.pin(slot, *v)?;
    }
    Ok(space)
}

/// Survivors as `slot key → value` maps.
fn survivor_maps(rep: &Phase1Report) -> BTreeSet<BTreeMap<String, u32>> {
    rep.survivors
        .iter()
        .map(|a| rep.filter_keys.iter().cloned().zip(a.iter().map(|e| e.0)).collect())
        .collect()
}

/// Re-evaluates up to `n` phase-1 witnesses on random extensions of their
/// assignment.
fn spot_check_witnesses(space: &SearchSpace, rep: &Phase1Report, n: usize, seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = space.field().order();
    let mut checked = 0;
    for _ in 0..n.min(rep.witnesses.len()) {
        let w = &rep.witnesses[rng.random_range(0..rep.witnesses.len())];
        let mut coeffs: Vec<Elem> = space
            .pins()
            .iter()
            .map(|p| p.unwrap_or_else(|| Elem(rng.random_range(0..q))))
            .collect();
        for (&slot, &v) in rep.filter_slots.iter().zip(&w.assignment) {
            coeffs[slot] = v;
        }
        let s = Surface::new(space.family().clone(), space.field().clone(), coeffs)?;
        if !s.evaluate(&w.tuple)?.is_zero() {
            return Err(Error::ReportMismatch(format!("witness {:?} does not vanish", w.tuple)));
        }
        checked += 1;
    }
    Ok(checked)
}

fn report_summary(r: &CensusReport) -> Value {
    json!({
        "scanned": r.scanned,
        "min_count": r.min_count,
        "max_count": r.max_count,
        "histogram": r.histogram,
        "phase1": r.phase1,
        "sampling": r.sampling,
        "extremal_kept": r.extremal.len(),
    })
}

fn cubic_f2_unique(_: &VerifyOptions) -> Result<Check> {
    let s = example_cubic();
    let count = s.count_points(CountMode::Projective, None);
    let verdict = is_smooth_up_to(&s, 3)?;
    Ok(Check {
        pass: count == 1 && verdict.is_smooth(),
        observed: format!("{count} point(s), smooth up to degree 3: {}", verdict.is_smooth()),
        evidence: json!({ "surface": s.pretty(), "points": count, "smoothness": to_json(&verdict) }),
    })
}

/// Invertible 4×4 matrices over F_2 as row bitmasks.
fn gl4_f2() -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for code in 0u32..1 << 16 {
        let rows = [0, 1, 2, 3].map(|i| ((code >> (4 * i)) & 0xF) as u8);
        let mut m = rows;
        let mut rank = 0;
        for bit in 0..4 {
            if let Some(p) = (rank..4).find(|&r| m[r] >> bit & 1 == 1) {
                m.swap(rank, p);
                for r in 0..4 {
                    if r != rank && m[r] >> bit & 1 == 1 {
                        m[r] ^= m[rank];
                    }
                }
                rank += 1;
            }
        }
        if rank == 4 {
            out.push(rows);
        }
    }
    out
}

/// Coefficient vector of a cubic over F_2 packed into bits.
fn pack_f2(coeffs: impl Iterator<Item = Elem>) -> u32 {
    coeffs.enumerate().fold(0, |acc, (i, c)| acc | (c.0 << i))
}

fn cubic_f2_classification(opts: &VerifyOptions) -> Result<Check> {
    let base = example_cubic();
    let family = base.family().clone();
    let field = base.field().clone();
    let space = SearchSpace::new(family.clone(), field.clone());
    let co = CensusOptions { extremal_cap: None, ..census_opts(opts, CountMode::Projective, Some(1)) };
    let report = run_census(&space, &co)?;
    let one_point: Vec<Vec<Elem>> = if report.min_count == Some(1) {
        report.extremal.iter().map(|e| e.coefficients.clone()).collect()
    } else {
        Vec::new()
    };
    let smooth_flags = opts.executor.map_ordered(&one_point, |c| {
        Surface::new(family.clone(), field.clone(), c.clone())
            .and_then(|s| is_smooth_up_to(&s, 3))
            .map(|v| v.is_smooth())
    });
    let mut smooth = Vec::new();
    for (c, flag) in one_point.iter().zip(smooth_flags) {
        if flag? {
            smooth.push(pack_f2(c.iter().copied()));
        }
    }
    let poly = base.to_poly();
    let matrices = gl4_f2();
    let orbit: HashSet<u32> = opts
        .executor
        .map_ordered(&matrices, |rows| {
            let images: Vec<Poly> = rows
                .iter()
                .map(|r| Poly::linear(&[0, 1, 2, 3].map(|j| Elem((*r as u32 >> j) & 1))))
                .collect();
            let image = poly.compose(&field, &images);
            pack_f2(family.free.iter().map(|m| image.coefficient(m)))
        })
        .into_iter()
        .collect();
    let outside: Vec<u32> = smooth.iter().copied().filter(|c| !orbit.contains(c)).collect();
    let example = pack_f2(base.coefficients().iter().copied());
    let pass = report.min_count == Some(1) && smooth.contains(&example) && outside.is_empty();
    Ok(Check {
        pass,
        observed: format!(
            "{} one-point forms, {} smooth, orbit size {}, {} outside the orbit",
            one_point.len(),
            smooth.len(),
            orbit.len(),
            outside.len()
        ),
        evidence: json!({
            "census": report_summary(&report),
            "gl4_order": matrices.len(),
            "one_point_forms": one_point.len(),
            "smooth_one_point_forms": smooth.len(),
            "orbit_size": orbit.len(),
            "outside_orbit": outside.iter().take(16).map(|c| format!("{c:05x}")).collect::<Vec<_>>(),
        }),
    })
}

fn dp1_f2_min3(opts: &VerifyOptions) -> Result<Check> {
    let f2 = Field::parse("2")?;
    let fam = reduced_family(&builtin("DP1_CHAR2")?, &f2);
    let report = run_census(&SearchSpace::new(fam, f2), &census_opts(opts, CountMode::Affine, None))?;
    let low: u64 = (0..=2).map(|k| report.count_of(k)).sum();
    Ok(Check {
        pass: report.min_count == Some(3) && low == 0,
        observed: format!("min {:?} over {} surfaces", report.min_count, report.scanned),
        evidence: to_json(&report),
    })
}

fn dp1_f3_space() -> Result<SearchSpace> {
    let f3 = Field::parse("3")?;
    Ok(SearchSpace::new(reduced_family(&builtin("DP1_CHAR3")?, &f3), f3))
}

fn dp1_f3_phase1(_: &VerifyOptions) -> Result<Check> {
    let space = dp1_f3_space()?;
    let filter = LocusFilter::parse(space.family(), space.field(), "x=0,y=1")?;
    let rep = phase1_survivors(&space, &filter)?;
    let checked = spot_check_witnesses(&space, &rep, 100, 3)?;
    let expected: BTreeSet<BTreeMap<String, u32>> =
        [[("0.2.2.0", 0), ("0.2.1.0", 2), ("0.2.0.0", 1)].iter().map(|(k, v)| (k.to_string(), *v)).collect()]
            .into();
    let got = survivor_maps(&rep);
    Ok(Check {
        pass: got == expected,
        observed: format!("{} survivor(s): {:?}", got.len(), got),
        evidence: json!({ "phase1": to_json(&rep), "witnesses_checked": checked }),
    })
}

fn dp1_f3_min2(opts: &VerifyOptions) -> Result<Check> {
    let space = dp1_f3_space()?;
    let filter = LocusFilter::parse(space.family(), space.field(), "x=0,y=1")?;
    let (p1, affine) = two_phase_census(&space, &filter, &census_opts(opts, CountMode::Affine, None))?;
    let (_, projective) = two_phase_census(&space, &filter, &census_opts(opts, CountMode::Projective, None))?;
    let checked = spot_check_witnesses(&space, &p1, 100, 5)?;
    Ok(Check {
        pass: affine.min_count.is_some_and(|m| m >= 2),
        observed: format!(
            "min affine count {:?}, min projective count {:?} over {} survivor surfaces",
            affine.min_count, projective.min_count, affine.scanned
        ),
        evidence: json!({
            "affine": to_json(&affine),
            "projective": report_summary(&projective),
            "non_survivors": p1.witnesses.len(),
            "witnesses_checked": checked,
        }),
    })
}

/// The six `(wy³, y⁶)` coefficient pairs over F_4 (`α` = 2, `α + 1` = 3).
const DP1_F4_PAIRS: [(u32, u32); 6] = [(2, 2), (2, 1), (1, 2), (1, 3), (3, 2), (3, 3)];

fn dp1_f4_phase1(_: &VerifyOptions) -> Result<Check> {
    let f4 = Field::parse("4")?;
    let space = SearchSpace::new(builtin("DP1_CHAR2")?, f4);
    let filter = LocusFilter::parse(space.family(), space.field(), "x=0,y!=0")?;
    let rep = phase1_survivors(&space, &filter)?;
    let checked = spot_check_witnesses(&space, &rep, 100, 4)?;
    let expected: BTreeSet<BTreeMap<String, u32>> = DP1_F4_PAIRS
        .iter()
        .map(|&(b, d)| {
            [("0.1.1.1", 0), ("0.3.0.1", b), ("0.4.1.0", 0), ("0.6.0.0", d)]
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect()
        })
        .collect();
    let got = survivor_maps(&rep);
    Ok(Check {
        pass: got == expected,
        observed: format!("{} survivors over slots {:?}", got.len(), rep.filter_keys),
        evidence: json!({ "phase1": to_json(&rep), "witnesses_checked": checked }),
    })
}

fn dp1_f4_min2(opts: &VerifyOptions) -> Result<Check> {
    let f4 = Field::parse("4")?;
    let space = SearchSpace::new(reduced_family(&builtin("DP1_CHAR2")?, &f4), f4);
    let filter = LocusFilter::parse(space.family(), space.field(), "x=0,y!=0")?;
    let mut co = census_opts(opts, CountMode::Projective, Some(1));
    co.checkpoint = opts.checkpoint_dir.as_ref().map(|d| d.join("dp1_f4_min2.checkpoint.json"));
    let (p1, report) = two_phase_census(&space, &filter, &co)?;
    let checked = spot_check_witnesses(&space, &p1, 100, 7)?;
    Ok(Check {
        pass: report.min_count.is_some_and(|m| m >= 2),
        observed: format!(
            "{} survivors, min projective count {:?} over {} surfaces",
            p1.survivors.len(),
            report.min_count,
            report.scanned
        ),
        evidence: json!({ "census": to_json(&report), "witnesses_checked": checked }),
    })
}

fn dp1_f5_phase1_empty(_: &VerifyOptions) -> Result<Check> {
    let f5 = Field::parse("5")?;
    let space = SearchSpace::new(builtin("DP1_CLASSIC")?, f5);
    let filter = LocusFilter::parse(space.family(), space.field(), "x=0,y!=0")?;
    let rep = phase1_survivors(&space, &filter)?;
    let checked = spot_check_witnesses(&space, &rep, 100, 5)?;
    let keys: BTreeSet<&str> = rep.filter_keys.iter().map(String::as_str).collect();
    Ok(Check {
        pass: rep.survivors.is_empty() && keys == BTreeSet::from(["0.4.1.0", "0.6.0.0"]),
        observed: format!("{} survivors over slots {:?}", rep.survivors.len(), rep.filter_keys),
        evidence: json!({ "phase1": to_json(&rep), "witnesses_checked": checked }),
    })
}

/// `G_2` slots of DP2_CHAR2 pinned to `x² + a xy + y²`.
fn dp2_conic_pins(a: Elem) -> [(&'static str, Elem); 6] {
    [
        ("2.0.0.1", Elem::ONE),
        ("1.1.0.1", a),
        ("0.2.0.1", Elem::ONE),
        ("1.0.1.1", Elem::ZERO),
        ("0.1.1.1", Elem::ZERO),
        ("0.0.2.1", Elem::ZERO),
    ]
}

fn points_of(s: &Surface) -> Result<Vec<Vec<Elem>>> {
    let mut out = Vec::new();
    for p in wps::enumerate_points(&s.family().ambient, s.field()) {
        if s.evaluate(p.coords())?.is_zero() {
            out.push(p.into_coords());
        }
    }
    Ok(out)
}

fn dp2_f2_unique_256(opts: &VerifyOptions) -> Result<Check> {
    let f2 = Field::parse("2")?;
    let space = pin_keys(SearchSpace::new(builtin("DP2_CHAR2")?, f2.clone()), &dp2_conic_pins(Elem::ONE))?;
    let co = CensusOptions { extremal_cap: None, ..census_opts(opts, CountMode::Projective, Some(1)) };
    let report = run_census(&space, &co)?;
    let target = vec![Elem(0), Elem(0), Elem(1), Elem(0)];
    let mut by_point: BTreeMap<String, u64> = BTreeMap::new();
    let mut off_target = 0;
    if report.min_count == Some(1) {
        for e in &report.extremal {
            let pts = points_of(&space.surface_at(e.index))?;
            *by_point.entry(wps::format_point(&f2, &pts[0])).or_default() += 1;
            off_target += (pts[0] != target) as u64;
        }
    }
    let unique = report.count_of(1);
    let pass = unique == 256 && report.min_count == Some(1) && off_target == 0;
    Ok(Check {
        pass,
        observed: format!("{unique} surfaces with one point, by point: {by_point:?}"),
        evidence: json!({ "census": report_summary(&report), "unique_point": by_point }),
    })
}

fn dp2_f2_conic_bound(_: &VerifyOptions) -> Result<Check> {
    let f2 = Field::parse("2")?;
    let fam = builtin("DP2_CHAR2")?;
    let plane = WeightSystem::standard(2);
    let plane_points = wps::enumerate_points(&plane, &f2);
    let conic_slots: Vec<(usize, Monomial)> = fam
        .free
        .iter()
        .enumerate()
        .filter(|(_, m)| m.0[3] == 1)
        .map(|(j, m)| (j, Monomial(m.0[..3].to_vec())))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(CONIC_SEED);
    let mut violations = Vec::new();
    let mut least_slack = i64::MAX;
    for _ in 0..1000 {
        let coeffs: Vec<Elem> = (0..fam.slot_count()).map(|_| Elem(rng.random_range(0..2))).collect();
        let s = Surface::new(fam.clone(), f2.clone(), coeffs.clone())?;
        let x = s.count_points(CountMode::Projective, None);
        let c = plane_points
            .iter()
            .filter(|p| {
                conic_slots
                    .iter()
                    .fold(Elem::ZERO, |acc, (j, m)| f2.add(acc, f2.mul(coeffs[*j], m.eval(&f2, p.coords()))))
                    .is_zero()
            })
            .count() as u64;
        least_slack = least_slack.min(x as i64 - c as i64);
        if x < c {
            violations.push(json!({ "surface": s.pretty(), "points": x, "conic_points": c }));
        }
    }
    Ok(Check {
        pass: violations.is_empty(),
        observed: format!("{} violations in 1000 surfaces, least slack {least_slack}", violations.len()),
        evidence: json!({ "seed": CONIC_SEED, "violations": violations, "least_slack": least_slack }),
    })
}

fn dp2_f3_no_unique(opts: &VerifyOptions) -> Result<Check> {
    let f3 = Field::parse("3")?;
    let space = SearchSpace::new(reduced_family(&builtin("DP2_CLASSIC")?, &f3), f3);
    let report = run_census(&space, &census_opts(opts, CountMode::Projective, Some(1)))?;
    let (h0, h1) = (report.count_of(0), report.count_of(1));
    Ok(Check {
        pass: h0 == 0 && h1 == 0 && report.scanned > 0,
        observed: format!("histogram[0] = {h0}, histogram[1] = {h1} over {} surfaces", report.scanned),
        evidence: to_json(&report),
    })
}

fn dp2_f4_no_unique(opts: &VerifyOptions) -> Result<Check> {
    let f4 = Field::parse("4")?;
    let alpha = Elem(2);
    let space = pin_keys(SearchSpace::new(builtin("DP2_CHAR2")?, f4), &dp2_conic_pins(alpha))?;
    let filter = LocusFilter::parse(space.family(), space.field(), "x=0")?;
    let rep = phase1_survivors(&space, &filter)?;
    let checked = spot_check_witnesses(&space, &rep, 100, 12)?;
    // The narrower locus x = 0, y != 0 is recorded for comparison.
    let narrow = LocusFilter::parse(space.family(), space.field(), "x=0,y!=0")?;
    let co = CensusOptions { extremal_cap: None, ..census_opts(opts, CountMode::Projective, Some(1)) };
    let (narrow_rep, narrow_census) = two_phase_census(&space, &narrow, &co)?;
    let one_point: Vec<u64> = match narrow_census.min_count {
        Some(1) => narrow_census.extremal.iter().map(|e| e.index).collect(),
        _ => Vec::new(),
    };
    let flags = opts.executor.map_ordered(&one_point, |&i| {
        is_smooth_up_to(&space.surface_at(i), 2).map(|v| v.is_smooth())
    });
    let smooth_one_point = flags.into_iter().collect::<Result<Vec<bool>>>()?.into_iter().filter(|&b| b).count();
    Ok(Check {
        pass: rep.survivors.is_empty(),
        observed: format!(
            "{} survivors on x=0; on x=0,y!=0: {} survivors, min projective count {:?}, \
             {} one-point surfaces of which {} smooth up to degree 2",
            rep.survivors.len(),
            narrow_rep.survivors.len(),
            narrow_census.min_count,
            one_point.len(),
            smooth_one_point
        ),
        evidence: json!({
            "filter_slots": rep.filter_keys,
            "survivors": rep.survivors,
            "non_survivors": rep.witnesses.len(),
            "witnesses_checked": checked,
            "survivors_with_y_nonzero": narrow_rep.survivors.len(),
            "census_with_y_nonzero": report_summary(&narrow_census),
            "smooth_one_point_surfaces": smooth_one_point,
        }),
    })
}

fn dp2_f5_sampled(opts: &VerifyOptions) -> Result<Check> {
    let f5 = Field::parse("5")?;
    let so = SampleOptions {
        samples: 10_000,
        seed: DP2_F5_SEED,
        smooth_bound: Some(2),
        mode: CountMode::Projective,
        executor: opts.executor,
        max_draws: 1_000_000,
        ..Default::default()
    };
    let report = random_sample_census(&builtin("DP2_CLASSIC")?, &f5, &so)?;
    Ok(Check {
        pass: report.scanned == 10_000 && report.min_count.is_some_and(|m| m >= 6),
        observed: format!("min {:?} over {} smooth samples", report.min_count, report.scanned),
        evidence: report_summary(&report),
    })
}

fn exc_counts(_: &VerifyOptions) -> Result<Check> {
    let counts = (0..=8).map(|r| exceptional_classes(r).map(|c| c.len())).collect::<Result<Vec<_>>>()?;
    let e8 = exceptional_classes(8)?;
    let by_d: Vec<usize> = (0..=6).map(|d| e8.iter().filter(|c| c.d == d).count()).collect();
    let lines = exceptional_classes(6)?;
    let mut pairings = BTreeMap::new();
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            *pairings.entry(pair(a, b)?).or_insert(0u32) += 1;
        }
    }
    let pass = counts == [0, 1, 3, 6, 10, 16, 27, 56, 240] && pairings.keys().all(|k| (0..=2).contains(k));
    Ok(Check {
        pass,
        observed: format!("{counts:?}"),
        evidence: json!({ "counts": counts, "r8_by_degree": by_d, "r6_pairings": pairings }),
    })
}

fn weil_candidates(_: &VerifyOptions) -> Result<Check> {
    let c3 = candidate_fields(3, 1)?;
    let c1 = candidate_fields(1, 1)?;
    let c2 = candidate_fields(2, 1)?;
    let pass = c3 == [2] && c1 == [2, 3, 4, 5, 7] && c2 == [2, 3, 4, 5];
    Ok(Check {
        pass,
        observed: format!("d=3: {c3:?}, d=1: {c1:?}, d=2: {c2:?}"),
        evidence: json!({ "3": c3, "1": c1, "2": c2 }),
    })
}

fn urabe_f_props(_: &VerifyOptions) -> Result<Check> {
    let values = (1..=60).map(urabe_f).collect::<Result<Vec<_>>>()?;
    let f = |i: usize| values[i - 1];
    let pairs_ok = f(1) == 98 && f(40) == 95 && f(50) == 95 && f(41) == 101 && f(55) == 101 && f(44) == 107 && f(59) == 107;
    let mut seen = HashSet::new();
    let collisions: Vec<u32> =
        (1..=60u32).filter(|i| !PRIMED_ROWS.contains(i)).filter(|&i| !seen.insert(f(i as usize))).collect();
    Ok(Check {
        pass: pairs_ok && collisions.is_empty(),
        observed: format!("values ok: {pairs_ok}, collisions off the excluded rows: {collisions:?}"),
        evidence: json!({ "f": values, "excluded_rows": PRIMED_ROWS, "collisions": collisions }),
    })
}

fn hasse_fibers(_: &VerifyOptions) -> Result<Check> {
    let fam = builtin("DP1_CLASSIC")?;
    let mut rng = ChaCha8Rng::seed_from_u64(FIBER_SEED);
    let mut per_field = BTreeMap::new();
    let mut violations = Vec::new();
    for lit in ["5", "7"] {
        let field = Field::parse(lit)?;
        let (mut smooth, mut singular) = (0u64, 0u64);
        for _ in 0..100 {
            let coeffs = (0..fam.slot_count()).map(|_| Elem(rng.random_range(0..field.order()))).collect();
            let s = Surface::new(fam.clone(), field.clone(), coeffs)?;
            for fib in fibers(&s)?.fibers {
                if !fib.smooth {
                    singular += 1;
                    continue;
                }
                smooth += 1;
                if !fib.hasse {
                    violations.push(json!({ "field": lit, "surface": s.pretty(), "fiber": to_json(&fib) }));
                }
            }
        }
        per_field.insert(lit, json!({ "smooth_fibers": smooth, "singular_fibers": singular }));
    }
    let (m5, m7) = (min_fiber_points(5), min_fiber_points(7));
    Ok(Check {
        pass: violations.is_empty() && m5 == 2 && m7 == 3,
        observed: format!("{} Hasse violations; min_fiber_points(5) = {m5}, (7) = {m7}", violations.len()),
        evidence: json!({ "seed": FIBER_SEED, "fields": per_field, "violations": violations }),
    })
}

fn engine_properties(opts: &VerifyOptions) -> Result<Check> {
    let mut results = BTreeMap::new();
    results.insert("determinism", determinism()?);
    results.insert("checkpoint_resume", checkpoint_resume(opts)?);
    results.insert("reduction_preserves_solutions", reduction_preserves_solutions()?);
    results.insert("field_axioms", field_axioms()?);
    results.insert("equivalence_relation", equivalence_relation()?);
    let failed: Vec<&str> = results.iter().filter(|(_, ok)| !**ok).map(|(k, _)| *k).collect();
    Ok(Check {
        pass: failed.is_empty(),
        observed: if failed.is_empty() { "all properties hold".into() } else { format!("failed: {failed:?}") },
        evidence: to_json(&results),
    })
}

fn engine_spaces() -> Result<Vec<(SearchSpace, CountMode)>> {
    let f2 = Field::parse("2")?;
    let dp2 = pin_keys(SearchSpace::new(builtin("DP2_CHAR2")?, f2), &dp2_conic_pins(Elem::ONE))?;
    Ok(vec![(dp1_f3_space()?, CountMode::Affine), (dp2, CountMode::Projective)])
}

fn determinism() -> Result<bool> {
    for (space, mode) in engine_spaces()? {
        let mut reports = Vec::new();
        for w in [1, 2, 8] {
            let co = CensusOptions {
                mode,
                executor: Executor::with_workers(w),
                epoch: Some(5000),
                ..Default::default()
            };
            reports.push(run_census(&space, &co)?);
        }
        if reports.windows(2).any(|p| p[0] != p[1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn checkpoint_resume(opts: &VerifyOptions) -> Result<bool> {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    let path = std::env::temp_dir().join(format!("dpc-resume-{}-{stamp}.json", std::process::id()));
    let mut ok = true;
    for (space, mode) in engine_spaces()? {
        let base = CensusOptions { mode, executor: opts.executor, epoch: Some(3000), ..Default::default() };
        let whole = run_census(&space, &base)?;
        for stop in [1, 2999, 3000, 7777, 20000] {
            let _ = std::fs::remove_file(&path);
            let co = CensusOptions { checkpoint: Some(path.clone()), ..base.clone() };
            run_census(&space, &CensusOptions { stop_at: Some(stop), ..co.clone() })?;
            let resumed = run_census(&space, &co)?;
            ok &= resumed == whole;
        }
    }
    let _ = std::fs::remove_file(&path);
    Ok(ok)
}

fn random_surface(fam: &Arc<FamilySpec>, field: &Arc<Field>, rng: &mut ChaCha8Rng) -> Result<Surface> {
    let coeffs = (0..fam.slot_count()).map(|_| Elem(rng.random_range(0..field.order()))).collect();
    Surface::new(fam.clone(), field.clone(), coeffs)
}

fn solutions(s: &Surface) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    wps::for_each_tuple(s.field().order(), s.family().nvars(), |t| {
        if s.evaluate(t).is_ok_and(|v| v.is_zero()) {
            out.push(t.to_vec());
        }
        true
    });
    out
}

fn reduction_preserves_solutions() -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(ENGINE_SEED);
    for lit in ["2", "3", "4"] {
        let field = Field::parse(lit)?;
        for id in BUILTIN_FAMILIES {
            let fam = builtin(id)?;
            for _ in 0..1000 {
                let s = random_surface(&fam, &field, &mut rng)?;
                if solutions(&s) != solutions(&reduce_exponents(&s)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn field_axioms() -> Result<bool> {
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let (p, r) = crate::gf::prime_power(q).expect("prime power");
        let f = Field::canonical(p, r)?;
        let els: Vec<Elem> = f.elements().collect();
        for &a in &els {
            if f.add(a, Elem::ZERO) != a || f.mul(a, Elem::ONE) != a || f.add(a, f.neg(a)) != Elem::ZERO {
                return Ok(false);
            }
            if !a.is_zero() && f.mul(a, f.inv(a)?) != Elem::ONE {
                return Ok(false);
            }
            if f.pow(a, q as u64) != a {
                return Ok(false);
            }
            for &b in &els {
                if f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a) {
                    return Ok(false);
                }
                for &c in &els {
                    let assoc = f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                        && f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c));
                    let distrib = f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
                    if !assoc || !distrib {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Reflexivity, symmetry and transitivity of `equivalent` on every pair of
/// nonzero tuples. Transitivity is checked as: related tuples have equal
/// neighbourhoods.
fn equivalence_relation() -> Result<bool> {
    let ambients = [vec![1, 1, 2, 3], vec![1, 1, 1, 2], vec![1, 1, 1, 1]];
    for lit in ["2", "3", "4"] {
        let field = Field::parse(lit)?;
        for w in &ambients {
            let ws = WeightSystem::new(w.clone())?;
            let mut tuples = Vec::new();
            wps::for_each_tuple(field.order(), ws.len(), |t| {
                if t.iter().any(|c| !c.is_zero()) {
                    tuples.push(t.to_vec());
                }
                true
            });
            let n = tuples.len();
            let mut rel = vec![false; n * n];
            for i in 0..n {
                for j in 0..n {
                    rel[i * n + j] = wps::equivalent(&field, &ws, &tuples[i], &tuples[j])?;
                }
            }
            for i in 0..n {
                if !rel[i * n + i] {
                    return Ok(false);
                }
                for j in 0..n {
                    if rel[i * n + j] != rel[j * n + i] {
                        return Ok(false);
                    }
                    if rel[i * n + j] && rel[i * n..(i + 1) * n] != rel[j * n..(j + 1) * n] {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique() {
        let ids: HashSet<&str> = registry().iter().map(|c| c.id).collect();
        assert_eq!(ids.len(), registry().len());
        assert!(matches!(find_claim("no_such_claim"), Err(Error::UnknownClaim(_))));
    }

    #[test]
    fn gl4_order() {
        assert_eq!(gl4_f2().len(), 20160);
    }

    #[test]
    fn instant_claims_run_to_completion() {
        let opts = VerifyOptions::default();
        for c in registry().iter().filter(|c| c.runtime == RuntimeClass::Instant) {
            let out = verify_claim(c.id, &opts).unwrap();
            assert!(out.evidence.get("error").is_none(), "{}: {}", c.id, out.observed);
        }
    }

    #[test]
    fn example_cubic_has_nine_terms() {
        assert_eq!(example_cubic().terms().len(), 9);
    }
}
